//! Mission configuration.
//!
//! [`SimConfig::default`] reproduces the experimental setup end to end:
//! source (150, 100) m with the BS underneath it at altitude 0, UAV altitude
//! 30 m, wind (1, -1) m/s with 0.1 I perturbation, c0 = 0.1,
//! c1 = c2 = 0.015, c3 = 0.005, mu = 0.01, c_omega = 0.5, deadline 2 s,
//! switch threshold 50 states, alpha = 0.2 over a 5-round window,
//! b = 10 bytes per scalar, fc = 2 GHz, W = 2 MHz, N0 = -118 dBm/Hz, powers
//! 20 / 23 / 26 dBm, dt = 0.1 s.
//!
//! The learner defaults additionally condition the raw polynomial features
//! (`feature_scale`), bound the regularizer step (`omega_step = clipped`)
//! and cap the applied acceleration (`a_max`); with those set to identity /
//! literal / infinity the update runs exactly as the formulas are written,
//! but the raw degree-6 monomials at a 180 m mission scale then overflow
//! within the first control rounds (see README). All three knobs live in the
//! config file.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::ChannelParams;
use crate::dynamics::{CostParams, DynamicsParams, WindModel};
use crate::hjb::{OmegaStep, TimeDerivative};
use crate::protocol::{Algorithm, ProtocolConfig};
use crate::vec2::Vec2;

/// Training hyperparameters of the online HJB network.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct LearnParams {
    /// NGD step size.
    pub mu: f64,
    /// Stopping-regularizer weight.
    pub c_omega: f64,
    /// Componentwise input scaling `[kx, ky, kvx, kvy]` of the feature map.
    pub feature_scale: [f64; 4],
    /// How the regularizer enters the update: `"literal"`,
    /// `{ clipped = <max step norm> }` or `"total-loss"`.
    pub omega_step: OmegaStep,
    /// Time-derivative estimator: `"backward-difference"` or `"stationary"`.
    pub dpsi_dt: TimeDerivative,
}

/// Mission termination thresholds.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TerminationParams {
    /// Destination radius in meters.
    pub r_th: f64,
    /// Residual speed in m/s.
    pub v_th: f64,
    /// Wall-clock cap in seconds; hitting it flags the run as not reached.
    pub t_max: f64,
}

/// Full configuration of one mission.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    /// Source position (m); the BS sits at the source at altitude 0 and the
    /// destination is the origin.
    pub source: Vec2,
    pub seed: u64,
    pub wind: WindModel,
    pub dynamics: DynamicsParams,
    pub cost: CostParams,
    pub learn: LearnParams,
    pub protocol: ProtocolConfig,
    pub channel: ChannelParams,
    pub termination: TerminationParams,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            source: [150.0, 100.0],
            seed: 0,
            wind: WindModel {
                mean: [1.0, -1.0],
                sigma: [[0.1, 0.0], [0.0, 0.1]],
            },
            dynamics: DynamicsParams {
                c0: 0.1,
                dt: 0.1,
                a_max: 5.0,
            },
            cost: CostParams {
                c1: 0.015,
                c2: 0.015,
                c3: 0.005,
            },
            learn: LearnParams {
                mu: 0.01,
                c_omega: 0.5,
                feature_scale: [0.005, 0.005, 0.05, 0.05],
                omega_step: OmegaStep::Clipped(0.02),
                dpsi_dt: TimeDerivative::BackwardDifference,
            },
            protocol: ProtocolConfig {
                algo: Algorithm::Ohjb,
                deadline_s: 2.0,
                bytes_per_scalar: 10,
                dn_threshold: 50,
                alpha: 0.2,
                delay_window: 5,
                power_control: true,
            },
            channel: ChannelParams {
                fc_ghz: 2.0,
                altitude_m: 30.0,
                bandwidth_hz: 2e6,
                noise_dbm_hz: -118.0,
                p_dl_dbm: 20.0,
                p_ul_dbm: 23.0,
                p_ul_max_dbm: 26.0,
                loss_override_db: None,
            },
            termination: TerminationParams {
                r_th: 5.0,
                v_th: 1.0,
                t_max: 600.0,
            },
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("{field}: {reason}")]
    Invalid {
        field: &'static str,
        reason: String,
    },
}

fn require(ok: bool, field: &'static str, reason: impl Into<String>) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::Invalid {
            field,
            reason: reason.into(),
        })
    }
}

impl SimConfig {
    /// Check every structural invariant; called by the runner before a
    /// mission starts.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let d = &self.dynamics;
        require(d.c0 > 0.0, "dynamics.c0", "must be positive")?;
        require(d.dt > 0.0, "dynamics.dt", "must be positive")?;
        require(d.a_max > 0.0, "dynamics.a_max", "must be positive")?;
        let c = &self.cost;
        require(
            c.c1 > 0.0 && c.c2 > 0.0 && c.c3 > 0.0,
            "cost",
            "c1, c2, c3 must all be positive",
        )?;
        let l = &self.learn;
        require(l.mu > 0.0, "learn.mu", "must be positive")?;
        require(l.c_omega > 0.0, "learn.c_omega", "must be positive")?;
        require(
            l.feature_scale.iter().all(|&k| k > 0.0 && k.is_finite()),
            "learn.feature_scale",
            "all four scales must be positive and finite",
        )?;
        if let OmegaStep::Clipped(max_norm) = l.omega_step {
            require(
                max_norm > 0.0,
                "learn.omega_step",
                "clip radius must be positive",
            )?;
        }
        let p = &self.protocol;
        require(p.deadline_s > 0.0, "protocol.deadline_s", "must be positive")?;
        require(
            p.bytes_per_scalar > 0,
            "protocol.bytes_per_scalar",
            "must be positive",
        )?;
        require(
            p.alpha > 0.0 && p.alpha < 1.0,
            "protocol.alpha",
            "must lie strictly between 0 and 1",
        )?;
        require(p.delay_window >= 1, "protocol.delay_window", "must be at least 1")?;
        let ch = &self.channel;
        require(
            (22.5..=300.0).contains(&ch.altitude_m),
            "channel.altitude_m",
            "the urban-micro model is valid for 22.5..=300 m",
        )?;
        require(ch.fc_ghz > 0.0, "channel.fc_ghz", "must be positive")?;
        require(ch.bandwidth_hz > 0.0, "channel.bandwidth_hz", "must be positive")?;
        require(
            ch.p_ul_dbm <= ch.p_ul_max_dbm,
            "channel.p_ul_max_dbm",
            "boosted power must not be below the default power",
        )?;
        let t = &self.termination;
        require(t.r_th > 0.0, "termination.r_th", "must be positive")?;
        require(t.v_th > 0.0, "termination.v_th", "must be positive")?;
        require(t.t_max > 0.0, "termination.t_max", "must be positive")?;
        require(
            self.source.iter().all(|c| c.is_finite()),
            "source",
            "coordinates must be finite",
        )?;
        Ok(())
    }
}
