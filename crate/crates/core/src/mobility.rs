//! Vehicle placement (homogeneous Poisson point process), Gauss-Markov
//! vehicle kinematics, and the fixed circular C-UAV trajectories.

use alloc::vec::Vec;

use rand::Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};

use crate::geometry::{Rect, Vec3};
use crate::scenario::{CUavState, Interval, MobilityParams, VehicleState};

/// Drops a Poisson-distributed number of vehicles uniformly in `area`.
pub fn place_vehicles<R: Rng + ?Sized>(area: &Rect, params: &MobilityParams, rng: &mut R) -> Vec<VehicleState> {
    assert!(!area.is_degenerate(), "vehicle area must have positive extent");
    assert!(params.vehicle_density_per_km2 > 0.0, "vehicle density must be positive");
    let mean = params.vehicle_density_per_km2 * area.area_km2();
    let count = Poisson::new(mean).map(|d| d.sample(rng) as usize).unwrap_or(0);
    (0..count)
        .map(|id| VehicleState {
            id,
            position: Vec3::new(
                area.min_x + area.width() * rng.random::<f64>(),
                area.min_y + area.height() * rng.random::<f64>(),
                0.0,
            ),
            speed_mps: params.speed_bounds.sample(rng),
            heading_rad: params.heading_bounds.sample(rng),
            idle_freq_hz: params.idle_freq_hz.sample(rng),
        })
        .collect()
}

/// Clamps into the interval. Idempotent; infinite bounds disable clamping.
pub fn clamp_to(v: f64, bounds: &Interval) -> f64 {
    v.max(bounds.lo).min(bounds.hi)
}

fn gauss_markov<R: Rng + ?Sized>(current: f64, mean: f64, std: f64, memory: f64, rng: &mut R) -> f64 {
    let noise: f64 = rng.sample(StandardNormal);
    memory * current + (1.0 - memory) * mean + libm::sqrt(1.0 - memory * memory) * std * noise
}

/// Advances one vehicle by one slot. The position moves with the speed and
/// heading held at the start of the slot; both are then redrawn from the
/// Gauss-Markov recursion and clamped to their bounds.
pub fn step_vehicle<R: Rng + ?Sized>(v: &VehicleState, p: &MobilityParams, rng: &mut R) -> VehicleState {
    let speed = gauss_markov(v.speed_mps, p.mean_speed_mps, p.speed_std, p.memory_degree, rng);
    let heading = gauss_markov(v.heading_rad, p.mean_heading_rad, p.heading_std, p.memory_degree, rng);
    let dt = p.slot_duration_s;
    VehicleState {
        id: v.id,
        position: Vec3::new(
            v.position.x + v.speed_mps * libm::cos(v.heading_rad) * dt,
            v.position.y + v.speed_mps * libm::sin(v.heading_rad) * dt,
            0.0,
        ),
        speed_mps: clamp_to(speed, &p.speed_bounds),
        heading_rad: clamp_to(heading, &p.heading_bounds),
        idle_freq_hz: v.idle_freq_hz,
    }
}

/// Position of a C-UAV on its orbit at the start of slot `t`.
pub fn step_cuav(c: &CUavState, t: usize, slot_duration_s: f64, altitude_m: f64) -> CUavState {
    let o = &c.orbit;
    let angle = o.phase_rad + o.speed_mps / o.radius_m * (t as f64 * slot_duration_s);
    let (s, co) = (libm::sin(angle), libm::cos(angle));
    let mut next = c.clone();
    next.position = Vec3::new(o.center.x + o.radius_m * co, o.center.y + o.radius_m * s, altitude_m);
    next.speed_mps = o.speed_mps;
    // counter-clockwise tangent
    next.heading_rad = libm::atan2(co, -s);
    next
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{Purpose, SeedTree};
    use crate::scenario::{Scenario, ScenarioConfig};
    use core::f64::consts::PI;

    fn vehicle(speed: f64, heading: f64) -> VehicleState {
        VehicleState {
            id: 0,
            position: Vec3::new(5.0, -3.0, 0.0),
            speed_mps: speed,
            heading_rad: heading,
            idle_freq_hz: 5e8,
        }
    }

    #[test]
    fn poisson_count_moments() {
        let area = Rect::centered_square(2000.0);
        let params = MobilityParams::default();
        let seeds = SeedTree::new(77);
        let n = 10_000;
        let counts: Vec<f64> = (0..n)
            .map(|s| {
                let mut rng = seeds.stream(Purpose::Harness, s, 0);
                // Poisson count only; positions are not needed.
                Poisson::new(params.vehicle_density_per_km2 * area.area_km2()).unwrap().sample(&mut rng)
            })
            .collect();
        let mean = counts.iter().sum::<f64>() / n as f64;
        let var = counts.iter().map(|c| (c - mean) * (c - mean)).sum::<f64>() / (n as f64 - 1.0);
        assert!((mean - 800.0).abs() < 1.5, "mean {mean}");
        assert!((libm::sqrt(var) - 28.28).abs() < 1.0, "std {}", libm::sqrt(var));

        // and place_vehicles itself lands in the same ballpark
        let mut rng = seeds.stream(Purpose::Placement, 0, 0);
        let v = place_vehicles(&area, &params, &mut rng);
        assert!((v.len() as f64 - 800.0).abs() < 5.0 * 28.3);
        assert!(v.iter().all(|x| x.position.z == 0.0
            && area.min_x <= x.position.x
            && x.position.x <= area.max_x
            && params.idle_freq_hz.contains(x.idle_freq_hz)));
    }

    #[test]
    fn vanishing_density_places_nobody() {
        let area = Rect::centered_square(2000.0);
        let params = MobilityParams { vehicle_density_per_km2: 1e-9, ..MobilityParams::default() };
        let seeds = SeedTree::new(3);
        let placed: usize =
            (0..1000).map(|s| place_vehicles(&area, &params, &mut seeds.stream(Purpose::Placement, s, 0)).len()).sum();
        assert_eq!(placed, 0);
    }

    #[test]
    fn full_memory_freezes_kinematics() {
        let p = MobilityParams { memory_degree: 1.0, ..MobilityParams::default() };
        let mut rng = SeedTree::new(1).stream(Purpose::Harness, 0, 0);
        let v = vehicle(7.5, 0.3);
        let next = step_vehicle(&v, &p, &mut rng);
        assert_eq!(next.speed_mps, 7.5);
        assert_eq!(next.heading_rad, 0.3);
    }

    #[test]
    fn memoryless_noiseless_limit_hits_mean() {
        let p = MobilityParams { memory_degree: 0.0, speed_std: 0.0, heading_std: 0.0, ..MobilityParams::default() };
        let mut rng = SeedTree::new(1).stream(Purpose::Harness, 0, 0);
        let next = step_vehicle(&vehicle(3.0, 1.0), &p, &mut rng);
        assert_eq!(next.speed_mps, p.mean_speed_mps);
        assert_eq!(next.heading_rad, p.mean_heading_rad);
    }

    #[test]
    fn euler_position_update() {
        let p = MobilityParams { slot_duration_s: 1.0, ..MobilityParams::default() };
        let mut rng = SeedTree::new(1).stream(Purpose::Harness, 0, 0);
        let v = vehicle(10.0, 0.0);
        let next = step_vehicle(&v, &p, &mut rng);
        assert_eq!(next.position.x, v.position.x + 10.0);
        assert_eq!(next.position.y, v.position.y);
        assert_eq!(next.position.z, 0.0);
    }

    #[test]
    fn unclamped_speed_process_is_stationary() {
        let p = MobilityParams {
            memory_degree: 0.8,
            mean_speed_mps: 10.0,
            speed_std: 2.0,
            speed_bounds: Interval::new(f64::NEG_INFINITY, f64::INFINITY),
            heading_bounds: Interval::new(f64::NEG_INFINITY, f64::INFINITY),
            ..MobilityParams::default()
        };
        let mut rng = SeedTree::new(11).stream(Purpose::Harness, 0, 0);
        let mut v = vehicle(0.0, 0.0);
        for _ in 0..1000 {
            v = step_vehicle(&v, &p, &mut rng);
        }
        let n = 100_000;
        let (mut sum, mut sum2) = (0.0, 0.0);
        for _ in 0..n {
            v = step_vehicle(&v, &p, &mut rng);
            sum += v.speed_mps;
            sum2 += v.speed_mps * v.speed_mps;
        }
        let mean = sum / n as f64;
        let var = sum2 / n as f64 - mean * mean;
        assert!((mean / 10.0 - 1.0).abs() < 0.05, "mean {mean}");
        assert!((var / 4.0 - 1.0).abs() < 0.05, "var {var}");
    }

    #[test]
    fn clamping_respects_bounds() {
        let p = MobilityParams { speed_std: 50.0, heading_std: 10.0, ..MobilityParams::default() };
        let mut rng = SeedTree::new(5).stream(Purpose::Harness, 0, 0);
        let mut v = vehicle(10.0, 0.0);
        for _ in 0..2000 {
            v = step_vehicle(&v, &p, &mut rng);
            assert!(p.speed_bounds.contains(v.speed_mps));
            assert!(p.heading_bounds.contains(v.heading_rad));
            assert_eq!(clamp_to(v.speed_mps, &p.speed_bounds), v.speed_mps);
        }
    }

    #[test]
    fn cuav_orbit_geometry() {
        let s = Scenario::new(ScenarioConfig::default()).unwrap();
        let c = &s.cuavs[0];
        let period = 2.0 * PI * 100.0 / 20.0;
        // period is 10*pi seconds; with dt = period / 40 the orbit closes after 40 slots
        let dt = period / 40.0;
        let a = step_cuav(c, 3, dt, 100.0);
        let b = step_cuav(c, 43, dt, 100.0);
        assert!(a.position.distance(&b.position) < 1e-9);
        for t in 0..200 {
            let p = step_cuav(c, t, 1.0, 100.0);
            assert!((p.position.ground_distance(&c.orbit.center) - 100.0).abs() < 1e-9);
            assert_eq!(p.position.z, 100.0);
        }
    }
}
