//! Air-to-ground wireless link.
//!
//! Path loss follows the 3GPP urban-micro UAV model (TR 36.777 style),
//! valid for UAV altitudes 22.5 m <= h <= 300 m:
//!
//! ```text
//! L_LOS  = 30.9 + (22.25 - 0.5 log10 h) log10 d + 20 log10 fc
//! L_NLOS = max(L_LOS, 32.4 + (43.2 - 7.6 log10 h) log10 d + 20 log10 fc)
//! ```
//!
//! with `d` the 3-D BS-UAV distance in meters and `fc` in GHz. The LOS state
//! is drawn once per control round from the altitude-dependent probability
//! model and reused for both link directions of the round. Transmission
//! delays come from the Shannon rate at the received SNR, and the uplink
//! power is boosted when the downlink delay left too little deadline budget.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Link-budget parameters shared by both directions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ChannelParams {
    /// Carrier frequency in GHz.
    pub fc_ghz: f64,
    /// UAV altitude in meters; the model is valid for 22.5..=300.
    pub altitude_m: f64,
    /// Bandwidth per link direction in Hz.
    pub bandwidth_hz: f64,
    /// Noise spectral density in dBm/Hz.
    pub noise_dbm_hz: f64,
    /// UAV transmit power for the state download, dBm.
    pub p_dl_dbm: f64,
    /// Default BS transmit power for uploads, dBm.
    pub p_ul_dbm: f64,
    /// Boosted BS transmit power, dBm.
    pub p_ul_max_dbm: f64,
    /// Testing hook: force every sampled path loss to this value.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss_override_db: Option<f64>,
}

/// One sampled link state, drawn per control round.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkDraw {
    /// 3-D BS-UAV distance in meters.
    pub distance_m: f64,
    pub los: bool,
    pub loss_db: f64,
}

#[derive(Debug, Error, PartialEq)]
pub enum ChannelError {
    #[error("3-D distance {d} m is below the altitude {h} m")]
    DistanceBelowAltitude { d: f64, h: f64 },
    #[error("{name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// LOS probability at 3-D distance `d` for altitude `h`.
///
/// With `d_h = sqrt(d^2 - h^2)` the horizontal distance: 1 on the near
/// branch `d_h <= d_o`, else `d_o/d_h + exp(-d_h/p_o) (1 - d_o/d_h)`,
/// `d_o = max(294.05 log10 h - 432.94, 18)`, `p_o = 233.98 log10 h - 0.95`.
/// The result is clamped to [0, 1] against floating-point edge cases.
pub fn los_probability(d: f64, h: f64) -> Result<f64, ChannelError> {
    if h <= 0.0 {
        return Err(ChannelError::NonPositive {
            name: "altitude",
            value: h,
        });
    }
    if d < h {
        return Err(ChannelError::DistanceBelowAltitude { d, h });
    }
    let d_h = (d * d - h * h).max(0.0).sqrt();
    let d_o = (294.05 * h.log10() - 432.94).max(18.0);
    if d_h <= d_o {
        return Ok(1.0);
    }
    let p_o = 233.98 * h.log10() - 0.95;
    let p = d_o / d_h + (-d_h / p_o).exp() * (1.0 - d_o / d_h);
    Ok(p.clamp(0.0, 1.0))
}

/// Path loss in dB at 3-D distance `d` (m), altitude `h` (m), carrier
/// `fc` (GHz). The NLOS branch never undercuts the LOS loss.
pub fn path_loss(d: f64, h: f64, fc_ghz: f64, los: bool) -> Result<f64, ChannelError> {
    for (name, value) in [("distance", d), ("altitude", h), ("carrier frequency", fc_ghz)] {
        if value <= 0.0 {
            return Err(ChannelError::NonPositive { name, value });
        }
    }
    if d < h {
        return Err(ChannelError::DistanceBelowAltitude { d, h });
    }
    let l_los = 30.9 + (22.25 - 0.5 * h.log10()) * d.log10() + 20.0 * fc_ghz.log10();
    if los {
        Ok(l_los)
    } else {
        let l_nlos = 32.4 + (43.2 - 7.6 * h.log10()) * d.log10() + 20.0 * fc_ghz.log10();
        Ok(l_nlos.max(l_los))
    }
}

/// Draw the round's link state from one uniform sample `u in [0, 1)`.
///
/// Requires `d >= altitude` (the caller builds `d` from the mission
/// geometry, so this holds by construction).
pub fn sample_link(d: f64, p: &ChannelParams, u: f64) -> LinkDraw {
    let p_los = los_probability(d, p.altitude_m).expect("3-D distance is at least the altitude");
    let los = u < p_los;
    let loss_db = match p.loss_override_db {
        Some(forced) => forced,
        None => path_loss(d, p.altitude_m, p.fc_ghz, los)
            .expect("distance and carrier validated above"),
    };
    LinkDraw {
        distance_m: d,
        los,
        loss_db,
    }
}

/// Shannon-rate transmission delay in seconds for a payload of `bits`.
///
/// `rate = W log2(1 + SNR)` with `SNR = P / (N0 W)` in linear milliwatts.
/// Returns infinity when the rate underflows to zero; downstream that is a
/// guaranteed deadline miss.
pub fn transmission_delay(bits: u64, w_hz: f64, p_dbm: f64, loss_db: f64, n0_dbm_hz: f64) -> f64 {
    debug_assert!(bits > 0, "payloads are never empty");
    let received_mw = dbm_to_mw(p_dbm - loss_db);
    let noise_mw = dbm_to_mw(n0_dbm_hz) * w_hz;
    let snr = received_mw / noise_mw;
    let rate = w_hz * (1.0 + snr).log2();
    if rate > 0.0 && rate.is_finite() {
        bits as f64 / rate
    } else {
        f64::INFINITY
    }
}

/// Threshold uplink power control: keep the default power while the downlink
/// left enough budget for the estimated upload, otherwise boost.
///
/// `est_ul` is the upload delay estimated at the default power over the
/// round's sampled loss (downlink and uplink are fully correlated within a
/// round). With power control disabled the default power is always used.
pub fn uplink_power(
    dl_delay: f64,
    deadline: f64,
    est_ul: f64,
    p: &ChannelParams,
    power_control: bool,
) -> f64 {
    if power_control && dl_delay > deadline - est_ul {
        p.p_ul_max_dbm
    } else {
        p.p_ul_dbm
    }
}
