#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance(&self, other: &Vec3) -> f64 {
        let (dx, dy, dz) = (self.x - other.x, self.y - other.y, self.z - other.z);
        libm::sqrt(dx * dx + dy * dy + dz * dz)
    }

    /// Distance between the two points projected onto the ground plane.
    pub fn ground_distance(&self, other: &Vec3) -> f64 {
        let (dx, dy) = (self.x - other.x, self.y - other.y);
        libm::sqrt(dx * dx + dy * dy)
    }
}

/// Axis-aligned rectangle on the ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub min_x: f64,
    pub min_y: f64,
    pub max_x: f64,
    pub max_y: f64,
}

impl Rect {
    pub fn centered_square(side: f64) -> Self {
        let h = side / 2.0;
        Self { min_x: -h, min_y: -h, max_x: h, max_y: h }
    }

    pub fn width(&self) -> f64 {
        self.max_x - self.min_x
    }

    pub fn height(&self) -> f64 {
        self.max_y - self.min_y
    }

    pub fn area_km2(&self) -> f64 {
        self.width() * self.height() / 1.0e6
    }

    pub fn is_degenerate(&self) -> bool {
        !(self.width() > 0.0 && self.height() > 0.0)
    }

    /// Toroidal wrap of a ground position back into the rectangle.
    pub fn wrap(&self, p: Vec3) -> Vec3 {
        Vec3 { x: wrap_coord(p.x, self.min_x, self.width()), y: wrap_coord(p.y, self.min_y, self.height()), z: p.z }
    }
}

fn wrap_coord(v: f64, lo: f64, span: f64) -> f64 {
    let mut r = (v - lo) % span;
    if r < 0.0 {
        r += span;
    }
    lo + r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_toroidal() {
        let r = Rect::centered_square(2000.0);
        let p = r.wrap(Vec3::new(1010.0, -1005.0, 0.0));
        assert!((p.x - -990.0).abs() < 1e-9);
        assert!((p.y - 995.0).abs() < 1e-9);
        let inside = Vec3::new(12.0, -40.0, 0.0);
        assert_eq!(r.wrap(inside), inside);
    }
}
