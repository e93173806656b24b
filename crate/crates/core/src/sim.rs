//! Mission orchestration: the tick loop interleaving dynamics, channel
//! sampling, control rounds and training; metrics collection; termination;
//! multi-seed batches.
//!
//! Randomness discipline: each mission derives two independent ChaCha
//! streams from its seed, one for the wind noise (a standard-normal pair
//! drawn every tick whether or not the perturbation matrix is zero) and one
//! for the channel (one uniform draw per control round). Consumption order
//! is fixed, so adding metrics or changing output never perturbs a
//! trajectory, and `(config, seed)` reproduces results bit for bit on any
//! host and under any batch parallelism.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel;
use crate::config::{ConfigError, SimConfig};
use crate::dynamics::{self, UavState};
use crate::hjb::{FeatureMap, ValueModel, MODEL_SIZE};
use crate::protocol::{
    self, Algorithm, ControllerMode, ControllerState, HeldPayload, RoundOutcome,
};
use crate::vec2::{self, Vec2};

/// The two per-mission random streams in their fixed consumption order.
pub struct MissionStreams {
    pub dynamics: ChaCha12Rng,
    pub channel: ChaCha12Rng,
}

impl MissionStreams {
    pub fn new(seed: u64) -> Self {
        let mut dynamics = ChaCha12Rng::seed_from_u64(seed);
        dynamics.set_stream(1);
        let mut channel = ChaCha12Rng::seed_from_u64(seed);
        channel.set_stream(2);
        Self { dynamics, channel }
    }
}

/// Per-tick record of the mission series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TickRecord {
    pub t: f64,
    pub r: Vec2,
    pub v: Vec2,
    /// Acceleration applied during `[t, t + dt)`, after the actuator clamp.
    pub a: Vec2,
    /// BS-side value estimate at its latest downloaded state, held constant
    /// between training updates.
    pub psi_hat: f64,
    /// Motion energy accumulated up to `t`.
    pub energy: f64,
    pub dn: u64,
    pub up_bytes: u64,
    pub mode: ControllerMode,
    /// Uplink power of the most recent upload attempt (default power before
    /// the first attempt).
    pub power_dbm: f64,
}

/// Mission verdict per tick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    Continue,
    Reached,
    TimedOut,
}

/// Reached iff both the remaining distance and the speed are below their
/// thresholds; timed out at `t_max` otherwise.
pub fn check_termination(
    s: &UavState,
    t: f64,
    term: &crate::config::TerminationParams,
) -> Termination {
    if vec2::norm(s.r) <= term.r_th && vec2::norm(s.v) <= term.v_th {
        Termination::Reached
    } else if t >= term.t_max {
        Termination::TimedOut
    } else {
        Termination::Continue
    }
}

/// Mission summary, recomputable from the series.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MissionSummary {
    pub algorithm: Algorithm,
    pub seed: u64,
    pub reached: bool,
    /// Timestamp of the reached event; absent when `t_max` was hit.
    pub travel_time_s: Option<f64>,
    pub final_energy: f64,
    /// Start of the round at which the opportunistic switch latched.
    pub switch_time_s: Option<f64>,
    pub rounds_total: u64,
    pub rounds_delivered: u64,
    pub dn: u64,
    pub up_bytes: u64,
    pub final_position: Vec2,
    pub final_speed: f64,
}

/// Full result of one mission.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimResult {
    pub summary: MissionSummary,
    pub series: Vec<TickRecord>,
    pub rounds: Vec<RoundOutcome>,
    /// Final weight vector in canonical feature order.
    pub weights: Vec<f64>,
}

/// Number of ticks spanned by a continuous duration, rounded up onto the
/// grid, at least one.
fn ticks_ceil(duration: f64, dt: f64) -> u64 {
    if !duration.is_finite() {
        return u64::MAX / 2;
    }
    let exact = duration / dt;
    let up = (exact - 1e-9).ceil().max(1.0);
    up as u64
}

/// Run one mission to termination.
pub fn run(cfg: &SimConfig) -> Result<SimResult, ConfigError> {
    cfg.validate()?;

    let mut streams = MissionStreams::new(cfg.seed);
    let map = FeatureMap::with_scale(cfg.learn.feature_scale);
    let mut model = ValueModel::new(map, cfg.learn.mu, cfg.learn.c_omega, cfg.learn.omega_step);
    let mut ctrl = ControllerState::new(cfg.protocol.algo);
    let mut s = UavState::new(cfg.source, [0.0, 0.0]);
    let mut held = HeldPayload::None;
    // Delivered payload waiting for its effect tick.
    let mut pending: Option<(u64, protocol::Payload)> = None;

    let dt = cfg.dynamics.dt;
    let mut series = Vec::new();
    let mut rounds = Vec::new();
    let mut energy = 0.0;
    let mut psi_log = 0.0;
    let mut power_log = cfg.channel.p_ul_dbm;
    let mut switch_time = None;
    let mut rounds_delivered = 0u64;
    let mut next_round_tick = 0u64;
    let mut travel_time = None;
    let mut reached = false;

    let mut tick = 0u64;
    loop {
        let t = tick as f64 * dt;

        if let Some((effect_tick, _)) = pending {
            if effect_tick <= tick {
                let (_, payload) = pending.take().expect("pending checked above");
                held.receive(payload);
            }
        }

        match check_termination(&s, t, &cfg.termination) {
            Termination::Reached => {
                reached = true;
                travel_time = Some(t);
                series.push(TickRecord {
                    t,
                    r: s.r,
                    v: s.v,
                    a: [0.0, 0.0],
                    psi_hat: psi_log,
                    energy,
                    dn: ctrl.dn,
                    up_bytes: ctrl.up_bytes,
                    mode: ctrl.mode,
                    power_dbm: power_log,
                });
                break;
            }
            Termination::TimedOut => {
                series.push(TickRecord {
                    t,
                    r: s.r,
                    v: s.v,
                    a: [0.0, 0.0],
                    psi_hat: psi_log,
                    energy,
                    dn: ctrl.dn,
                    up_bytes: ctrl.up_bytes,
                    mode: ctrl.mode,
                    power_dbm: power_log,
                });
                break;
            }
            Termination::Continue => {}
        }

        if tick >= next_round_tick {
            let index = rounds.len() as u64;
            let horizontal = vec2::norm([s.r[0] - cfg.source[0], s.r[1] - cfg.source[1]]);
            let d3 = vec2::norm([horizontal, cfg.channel.altitude_m]);
            let u: f64 = streams.channel.gen();
            let link = channel::sample_link(d3, &cfg.channel, u);
            let was_switched = ctrl.switched;
            let (outcome, payload) = protocol::execute_round(
                index,
                t,
                &s,
                &mut model,
                &mut ctrl,
                &cfg.protocol,
                &cfg.channel,
                &link,
                &cfg.wind,
                &cfg.dynamics,
                &cfg.cost,
                cfg.learn.dpsi_dt,
            );
            if !was_switched && ctrl.switched {
                switch_time = Some(t);
            }
            if let Some(psi) = outcome.psi_after {
                psi_log = psi;
            }
            if let Some(p) = outcome.power_dbm {
                power_log = p;
            }
            if outcome.delivered {
                rounds_delivered += 1;
                let arrival = outcome.dl_delay + outcome.ul_delay.unwrap_or(f64::INFINITY);
                pending = payload.map(|p| (tick + ticks_ceil(arrival, dt), p));
            }
            next_round_tick = tick + ticks_ceil(outcome.duration, dt);
            rounds.push(outcome);
        }

        let a = vec2::clamp_norm(
            protocol::uav_apply(&s, &held, &model.map, cfg.cost.c3),
            cfg.dynamics.a_max,
        );

        series.push(TickRecord {
            t,
            r: s.r,
            v: s.v,
            a,
            psi_hat: psi_log,
            energy,
            dn: ctrl.dn,
            up_bytes: ctrl.up_bytes,
            mode: ctrl.mode,
            power_dbm: power_log,
        });

        energy += dynamics::energy_increment(&s, a, &cfg.cost, dt);
        let noise: [f64; 2] = [
            streams.dynamics.sample(StandardNormal),
            streams.dynamics.sample(StandardNormal),
        ];
        s = dynamics::step(&s, a, &cfg.wind, &cfg.dynamics, noise);
        tick += 1;
    }

    let summary = MissionSummary {
        algorithm: cfg.protocol.algo,
        seed: cfg.seed,
        reached,
        travel_time_s: travel_time,
        final_energy: energy,
        switch_time_s: switch_time,
        rounds_total: rounds.len() as u64,
        rounds_delivered,
        dn: ctrl.dn,
        up_bytes: ctrl.up_bytes,
        final_position: s.r,
        final_speed: vec2::norm(s.v),
    };
    Ok(SimResult {
        summary,
        series,
        rounds,
        weights: model.weights.to_vec(),
    })
}

/// Batch aggregates. Travel time and energy statistics are over reaching
/// runs; the switch time is over runs that switched.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BatchStats {
    pub seeds: Vec<u64>,
    pub reach_rate: f64,
    pub mean_travel_time_s: Option<f64>,
    pub median_travel_time_s: Option<f64>,
    pub mean_final_energy: Option<f64>,
    pub mean_switch_time_s: Option<f64>,
}

impl BatchStats {
    /// Aggregates from per-seed summaries. Reductions run in seed order, so
    /// any permutation of the input yields identical values.
    pub fn from_summaries(summaries: &[MissionSummary]) -> Self {
        let mut ordered: Vec<&MissionSummary> = summaries.iter().collect();
        ordered.sort_by_key(|s| s.seed);

        let mut travel: Vec<f64> = Vec::new();
        let mut energy = Vec::new();
        let mut switches = Vec::new();
        for s in &ordered {
            if s.reached {
                travel.push(s.travel_time_s.expect("reached runs carry a travel time"));
                energy.push(s.final_energy);
            }
            if let Some(sw) = s.switch_time_s {
                switches.push(sw);
            }
        }
        let mean = |xs: &[f64]| {
            if xs.is_empty() {
                None
            } else {
                Some(xs.iter().sum::<f64>() / xs.len() as f64)
            }
        };
        let median = |xs: &mut Vec<f64>| {
            if xs.is_empty() {
                return None;
            }
            xs.sort_by(|a, b| a.partial_cmp(b).expect("travel times are finite"));
            let n = xs.len();
            Some(if n % 2 == 1 {
                xs[n / 2]
            } else {
                0.5 * (xs[n / 2 - 1] + xs[n / 2])
            })
        };

        let reach_rate = if ordered.is_empty() {
            0.0
        } else {
            travel.len() as f64 / ordered.len() as f64
        };
        let mean_travel = mean(&travel);
        let mut travel_sorted = travel;
        BatchStats {
            seeds: ordered.iter().map(|s| s.seed).collect(),
            reach_rate,
            mean_travel_time_s: mean_travel,
            median_travel_time_s: median(&mut travel_sorted),
            mean_final_energy: mean(&energy),
            mean_switch_time_s: mean(&switches),
        }
    }
}

/// Run one mission per seed (in parallel) and aggregate. Results come back
/// in input-seed order and equal a sequential execution bit for bit.
pub fn run_batch(cfg: &SimConfig, seeds: &[u64]) -> Result<(Vec<SimResult>, BatchStats), ConfigError> {
    cfg.validate()?;
    let results: Result<Vec<SimResult>, ConfigError> = seeds
        .par_iter()
        .map(|&seed| {
            let mut c = cfg.clone();
            c.seed = seed;
            run(&c)
        })
        .collect();
    let results = results?;
    let summaries: Vec<MissionSummary> = results.iter().map(|r| r.summary.clone()).collect();
    let stats = BatchStats::from_summaries(&summaries);
    Ok((results, stats))
}

/// Serialize weights for the wire and the JSON summary: a flat array of 54
/// numbers in canonical feature order.
pub fn weights_to_vec(w: &[f64; MODEL_SIZE]) -> Vec<f64> {
    w.to_vec()
}
