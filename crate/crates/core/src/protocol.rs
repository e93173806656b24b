//! Per-round control protocols: state download, training trigger, payload
//! construction, deadline-bounded upload, and the aHJB / mHJB / oHJB
//! behaviors including the opportunistic switch.
//!
//! One control round: the UAV transmits its measured state; if the download
//! fits the deadline the BS trains the network once on it, picks the upload
//! mode, and uploads either the greedy action or the weight vector. The UAV
//! waits at most the deadline `D_th` from the round start, then the next
//! round begins. The path loss is sampled once per round and reused for both
//! directions.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::channel::{self, ChannelParams, LinkDraw};
use crate::dynamics::{CostParams, DynamicsParams, UavState, WindModel};
use crate::hjb::{
    FeatureMap, PrevUpdate, TimeDerivative, TrainContext, ValueModel, MODEL_SIZE,
};
use crate::vec2::Vec2;

/// Which protocol drives the uplink.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    /// Upload the computed action every round.
    Ahjb,
    /// Upload the current weight vector every round.
    Mhjb,
    /// Start with actions, switch once to weights when the network is
    /// sufficiently trained and the link has become slow.
    Ohjb,
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Algorithm::Ahjb => "ahjb",
            Algorithm::Mhjb => "mhjb",
            Algorithm::Ohjb => "ohjb",
        };
        f.write_str(s)
    }
}

/// What the BS uploads in the current round.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ControllerMode {
    ActionUpload,
    ModelUpload,
}

/// Payload kinds with distinct wire sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PayloadKind {
    /// UAV -> BS state download: 4 scalars.
    State,
    /// BS -> UAV action upload: 2 scalars.
    Action,
    /// BS -> UAV model upload: one scalar per weight.
    Model,
}

/// Payload size in bits for `bytes_per_scalar` bytes of arithmetic precision
/// and a model of `model_size` weights.
pub fn payload_bits(kind: PayloadKind, bytes_per_scalar: u32, model_size: usize) -> u64 {
    let scalars = match kind {
        PayloadKind::State => 4,
        PayloadKind::Action => 2,
        PayloadKind::Model => model_size as u64,
    };
    scalars * u64::from(bytes_per_scalar) * 8
}

/// Protocol configuration for one mission.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub algo: Algorithm,
    /// End-to-end deadline per round, seconds.
    pub deadline_s: f64,
    /// Bytes per transmitted scalar.
    pub bytes_per_scalar: u32,
    /// Downloaded-state count required before the switch (condition i).
    pub dn_threshold: u64,
    /// Fraction of the deadline the mean downlink delay must exceed
    /// (condition ii), in (0, 1).
    pub alpha: f64,
    /// Length of the downlink-delay history window.
    pub delay_window: usize,
    /// Uplink power control enabled.
    pub power_control: bool,
}

/// BS-side controller state carried across rounds.
#[derive(Debug, Clone)]
pub struct ControllerState {
    pub mode: ControllerMode,
    /// Number of successfully downloaded states.
    pub dn: u64,
    /// Cumulative successfully uploaded payload bytes.
    pub up_bytes: u64,
    /// Last `delay_window` downlink delays (every round, delivered or not).
    pub dl_window: VecDeque<f64>,
    /// Latched once the opportunistic switch has fired.
    pub switched: bool,
    /// Previous training instant and value estimate, for the backward
    /// difference.
    pub prev_update: Option<PrevUpdate>,
}

impl ControllerState {
    pub fn new(algo: Algorithm) -> Self {
        Self {
            mode: match algo {
                Algorithm::Mhjb => ControllerMode::ModelUpload,
                Algorithm::Ahjb | Algorithm::Ohjb => ControllerMode::ActionUpload,
            },
            dn: 0,
            up_bytes: 0,
            dl_window: VecDeque::new(),
            switched: false,
            prev_update: None,
        }
    }

    fn push_delay(&mut self, delay: f64, window: usize) {
        self.dl_window.push_back(delay);
        while self.dl_window.len() > window {
            self.dl_window.pop_front();
        }
    }

    /// Mean of the delay window, available once it is full.
    pub fn window_mean(&self, window: usize) -> Option<f64> {
        if self.dl_window.len() == window {
            Some(self.dl_window.iter().sum::<f64>() / window as f64)
        } else {
            None
        }
    }
}

/// The most recently delivered payload as held by the UAV.
#[derive(Debug, Clone, PartialEq)]
pub enum Payload {
    Action(Vec2),
    Weights([f64; MODEL_SIZE]),
}

/// What the UAV is currently flying on. Starts empty; a delivered payload
/// replaces it.
#[derive(Debug, Clone, Default, PartialEq)]
pub enum HeldPayload {
    #[default]
    None,
    Action(Vec2),
    Weights([f64; MODEL_SIZE]),
}

impl HeldPayload {
    pub fn receive(&mut self, payload: Payload) {
        *self = match payload {
            Payload::Action(a) => HeldPayload::Action(a),
            Payload::Weights(w) => HeldPayload::Weights(w),
        };
    }
}

/// The UAV-side control law at one tick.
///
/// A held action is applied unchanged (zero-order hold); held weights are
/// re-evaluated at the current state every tick, which is what lets the UAV
/// keep acting when the link is gone. Before any delivery the action is zero.
pub fn uav_apply(current: &UavState, held: &HeldPayload, map: &FeatureMap, c3: f64) -> Vec2 {
    match held {
        HeldPayload::None => [0.0, 0.0],
        HeldPayload::Action(a) => *a,
        HeldPayload::Weights(w) => {
            let j = map.jacobian(current);
            let mut gv = [0.0, 0.0];
            for (m, row) in j.iter().enumerate() {
                gv[0] += w[m] * row[2];
                gv[1] += w[m] * row[3];
            }
            [-gv[0] / (2.0 * c3), -gv[1] / (2.0 * c3)]
        }
    }
}

/// Opportunistic switch: move to model upload once (i) enough states have
/// been downloaded and (ii) the mean downlink delay over a full window
/// exceeds `alpha * deadline`. Latches on first trigger; the pre-latch
/// condition is re-evaluated every round.
pub fn ohjb_switch_check(ctrl: &mut ControllerState, cfg: &ProtocolConfig) -> ControllerMode {
    if !ctrl.switched {
        if let Some(mean) = ctrl.window_mean(cfg.delay_window) {
            if ctrl.dn >= cfg.dn_threshold && mean > cfg.alpha * cfg.deadline_s {
                ctrl.switched = true;
            }
        }
    }
    if ctrl.switched {
        ControllerMode::ModelUpload
    } else {
        ControllerMode::ActionUpload
    }
}

/// Everything that happened in one control round.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundOutcome {
    pub index: u64,
    /// Round start = state measurement instant.
    pub t_start: f64,
    pub dl_delay: f64,
    /// Download completion, absent when the downlink blew the deadline.
    pub t_dl: Option<f64>,
    /// Upload delay, absent on a total miss (no upload attempted).
    pub ul_delay: Option<f64>,
    /// Upload completion, present only when delivered.
    pub t_ul: Option<f64>,
    pub delivered: bool,
    /// Whether the BS trained on this round's state.
    pub trained: bool,
    pub payload_bits: Option<u64>,
    pub power_dbm: Option<f64>,
    pub mode: ControllerMode,
    /// Value estimate right after this round's update.
    pub psi_after: Option<f64>,
    /// Mean of the delay window as seen by this round's switch check.
    pub window_mean: Option<f64>,
    pub dn_after: u64,
    /// Wall-clock span of the round: `min(dl + ul, deadline)`.
    pub duration: f64,
}

/// Execute control round `index` starting at `t_start` on the measured state.
///
/// Mutates the model (one training update when the state arrives) and the
/// controller bookkeeping; returns the outcome and the payload to deliver at
/// `t_ul`, if any.
#[allow(clippy::too_many_arguments)]
pub fn execute_round(
    index: u64,
    t_start: f64,
    s_measured: &UavState,
    model: &mut ValueModel,
    ctrl: &mut ControllerState,
    cfg: &ProtocolConfig,
    chan: &ChannelParams,
    link: &LinkDraw,
    wind: &WindModel,
    dp: &DynamicsParams,
    cp: &CostParams,
    estimator: TimeDerivative,
) -> (RoundOutcome, Option<Payload>) {
    let dl_bits = payload_bits(PayloadKind::State, cfg.bytes_per_scalar, MODEL_SIZE);
    let dl_delay = channel::transmission_delay(
        dl_bits,
        chan.bandwidth_hz,
        chan.p_dl_dbm,
        link.loss_db,
        chan.noise_dbm_hz,
    );
    ctrl.push_delay(dl_delay, cfg.delay_window);

    // The state never arrived in time: no training, no upload.
    if dl_delay >= cfg.deadline_s {
        let outcome = RoundOutcome {
            index,
            t_start,
            dl_delay,
            t_dl: None,
            ul_delay: None,
            t_ul: None,
            delivered: false,
            trained: false,
            payload_bits: None,
            power_dbm: None,
            mode: ctrl.mode,
            psi_after: None,
            window_mean: ctrl.window_mean(cfg.delay_window),
            dn_after: ctrl.dn,
            duration: cfg.deadline_s,
        };
        return (outcome, None);
    }

    let t_dl = t_start + dl_delay;
    let ctx = TrainContext {
        state: *s_measured,
        cur_time: t_dl,
        prev: ctrl.prev_update,
        estimator,
    };
    *model = model.ngd_update(&ctx, wind, dp, cp);
    let psi = model.value(s_measured);
    ctrl.prev_update = Some(PrevUpdate {
        time: t_dl,
        value: psi,
    });
    ctrl.dn += 1;

    let window_mean = ctrl.window_mean(cfg.delay_window);
    ctrl.mode = match cfg.algo {
        Algorithm::Ahjb => ControllerMode::ActionUpload,
        Algorithm::Mhjb => ControllerMode::ModelUpload,
        Algorithm::Ohjb => ohjb_switch_check(ctrl, cfg),
    };

    let kind = match ctrl.mode {
        ControllerMode::ActionUpload => PayloadKind::Action,
        ControllerMode::ModelUpload => PayloadKind::Model,
    };
    let ul_bits = payload_bits(kind, cfg.bytes_per_scalar, MODEL_SIZE);
    let est_ul = channel::transmission_delay(
        ul_bits,
        chan.bandwidth_hz,
        chan.p_ul_dbm,
        link.loss_db,
        chan.noise_dbm_hz,
    );
    let power = channel::uplink_power(dl_delay, cfg.deadline_s, est_ul, chan, cfg.power_control);
    let ul_delay = channel::transmission_delay(
        ul_bits,
        chan.bandwidth_hz,
        power,
        link.loss_db,
        chan.noise_dbm_hz,
    );

    let delivered = dl_delay + ul_delay <= cfg.deadline_s;
    let payload = if delivered {
        ctrl.up_bytes += ul_bits / 8;
        Some(match ctrl.mode {
            ControllerMode::ActionUpload => Payload::Action(model.optimal_action(s_measured, cp.c3)),
            ControllerMode::ModelUpload => Payload::Weights(model.weights),
        })
    } else {
        None
    };

    let duration = (dl_delay + ul_delay).min(cfg.deadline_s);
    let outcome = RoundOutcome {
        index,
        t_start,
        dl_delay,
        t_dl: Some(t_dl),
        ul_delay: Some(ul_delay),
        t_ul: delivered.then(|| t_start + dl_delay + ul_delay),
        delivered,
        trained: true,
        payload_bits: Some(ul_bits),
        power_dbm: Some(power),
        mode: ctrl.mode,
        psi_after: Some(psi),
        window_mean,
        dn_after: ctrl.dn,
        duration,
    };
    (outcome, payload)
}
