//! Simulation core for remote UAV online path planning over a lossy wireless link.
//!
//! A base station downloads UAV states, trains a single-layer HJB network
//! online, and uploads either control actions (`aHJB`), the network weights
//! (`mHJB`), or switches opportunistically from actions to weights (`oHJB`).
//! Every mission is driven by a single seeded random stream, so a
//! `(config, seed)` pair reproduces bit-identical results.
//!
//! Module map:
//! - [`dynamics`]: planar double-integrator kinematics with drag and wind,
//!   Euler-Maruyama integration, running cost and motion energy.
//! - [`hjb`]: polynomial feature map, value estimate, optimal action,
//!   Hamiltonian residual, loss and the normalized-gradient weight update.
//! - [`channel`]: 3GPP urban-micro air-to-ground path loss, LOS probability,
//!   Shannon-rate transmission delays and threshold uplink power control.
//! - [`protocol`]: per-round download / train / upload state machines for the
//!   three protocols, payload accounting and the opportunistic switch.
//! - [`sim`]: the tick loop, metrics series, termination and batch runs.
//! - [`config`]: mission configuration with paper-setup defaults.

pub mod channel;
pub mod config;
pub mod dynamics;
pub mod hjb;
pub mod protocol;
pub mod sim;
pub mod vec2;

pub use config::SimConfig;
pub use dynamics::{CostParams, DynamicsParams, UavState, WindModel};
pub use hjb::{FeatureMap, TrainContext, ValueModel, MODEL_SIZE};
pub use protocol::{Algorithm, ControllerMode, ControllerState, Payload, ProtocolConfig};
pub use sim::{run, run_batch, BatchStats, MissionSummary, SimResult};
