//! Directional antenna gain, probabilistic LoS air-to-ground links (U2V) and
//! free-space air-to-air links (U2U).

use core::f64::consts::PI;

use thiserror::Error;

use crate::geometry::Vec3;
use crate::scenario::ChannelParams;

#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("vehicle at ground offset {offset_m:.3} m is outside the {footprint_m:.3} m beam footprint")]
pub struct Unreachable {
    pub offset_m: f64,
    pub footprint_m: f64,
}

/// Main-lobe gain `G0 / Ψ²` inside the beam, the out-of-beam gain (zero) otherwise.
pub fn antenna_gain(within_beam: bool, params: &ChannelParams) -> f64 {
    if within_beam {
        params.main_lobe_gain / (params.beamwidth_half_rad * params.beamwidth_half_rad)
    } else {
        params.out_of_beam_gain
    }
}

/// Radius of the ground footprint covered by the beam at altitude `altitude_m`.
pub fn footprint_radius(altitude_m: f64, half_beamwidth_rad: f64) -> f64 {
    altitude_m * libm::tan(half_beamwidth_rad)
}

// tan(pi/4) rounds to just under 1 in f64, so the boundary needs a hair of slack.
const FOOTPRINT_REL_TOL: f64 = 1e-12;

pub fn in_range(cuav: &Vec3, vehicle: &Vec3, altitude_m: f64, half_beamwidth_rad: f64) -> bool {
    let footprint = footprint_radius(altitude_m, half_beamwidth_rad);
    cuav.ground_distance(vehicle) <= footprint * (1.0 + FOOTPRINT_REL_TOL)
}

/// Logistic LoS probability of an elevation angle given in degrees.
pub fn los_probability(elevation_deg: f64, a: f64, b: f64) -> f64 {
    1.0 / (1.0 + a * libm::exp(-b * (elevation_deg - a)))
}

pub fn elevation_deg(distance_m: f64, altitude_m: f64) -> f64 {
    (180.0 / PI) * libm::asin((altitude_m / distance_m).min(1.0))
}

/// LoS/NLoS mixture for a given LoS probability.
pub fn mixed_gain(distance_m: f64, p_los: f64, params: &ChannelParams) -> f64 {
    let path = params.ref_gain_u2v * libm::pow(distance_m, -params.pathloss_exp);
    p_los * path + (1.0 - p_los) * params.nlos_factor * path
}

/// Expected channel power gain of a U2V link at 3-D distance `distance_m`.
pub fn expected_u2v_gain(distance_m: f64, altitude_m: f64, params: &ChannelParams) -> f64 {
    debug_assert!(distance_m >= altitude_m * (1.0 - 1e-12));
    let p_los = los_probability(elevation_deg(distance_m, altitude_m), params.los_a, params.los_b);
    mixed_gain(distance_m, p_los, params)
}

/// Average U2V rate over one subchannel, in bit/s.
pub fn u2v_rate(cuav: &Vec3, vehicle: &Vec3, params: &ChannelParams) -> Result<f64, Unreachable> {
    let altitude = cuav.z - vehicle.z;
    if !in_range(cuav, vehicle, altitude, params.beamwidth_half_rad) {
        return Err(Unreachable {
            offset_m: cuav.ground_distance(vehicle),
            footprint_m: footprint_radius(altitude, params.beamwidth_half_rad),
        });
    }
    let d = cuav.distance(vehicle);
    let gain = expected_u2v_gain(d, altitude, params);
    let snr =
        params.tx_power_u2v_w * gain * antenna_gain(true, params) / (params.noise_psd_w_per_hz * params.bandwidth_hz);
    Ok(params.bandwidth_hz * libm::log2(1.0 + snr))
}

/// Signal-to-noise ratio of the U2U link aggregated over `subchannels`.
pub fn u2u_snr(cuav: &Vec3, euav: &Vec3, subchannels: usize, params: &ChannelParams) -> f64 {
    let d = cuav.distance(euav);
    let band = subchannels as f64 * params.bandwidth_hz;
    params.tx_power_u2u_w * params.ref_gain_u2u * antenna_gain(true, params)
        / (d * d)
        / (params.noise_psd_w_per_hz * band)
}

/// Average U2U rate to the edge UAV using all `subchannels`, in bit/s.
pub fn u2u_rate(cuav: &Vec3, euav: &Vec3, subchannels: usize, params: &ChannelParams) -> f64 {
    let band = subchannels as f64 * params.bandwidth_hz;
    band * libm::log2(1.0 + u2u_snr(cuav, euav, subchannels, params))
}
