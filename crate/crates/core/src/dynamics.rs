//! UAV kinematics under control and wind.
//!
//! The state is `s = [r, v] ∈ R^4` with planar position `r` (m) and velocity
//! `v` (m/s). The controlled SDE is
//!
//! ```text
//! ds = (A s + B (a + c0 v_o)) dt + G dW,
//! A = [O I; O -c0 I],  B = [O; I],  G = [O; V_o],
//! ```
//!
//! i.e. `dr = v dt` and `dv = (-c0 v + a + c0 v_o) dt + V_o dW`. Integration
//! is Euler-Maruyama on a fixed grid; the Wiener increment is `sqrt(dt)`
//! times a standard-normal pair supplied by the caller so that the module
//! itself stays deterministic.

use serde::{Deserialize, Serialize};

use crate::vec2::{self, Vec2};

/// Planar UAV state: position (m) and velocity (m/s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UavState {
    pub r: Vec2,
    pub v: Vec2,
}

impl UavState {
    pub fn new(r: Vec2, v: Vec2) -> Self {
        Self { r, v }
    }

    /// The stacked state `[x, y, vx, vy]`.
    pub fn as_array(&self) -> [f64; 4] {
        [self.r[0], self.r[1], self.v[0], self.v[1]]
    }

    pub fn is_finite(&self) -> bool {
        self.as_array().iter().all(|c| c.is_finite())
    }
}

/// Mean wind velocity and the matrix applied to the Wiener increment.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct WindModel {
    /// Average wind velocity `v_o` in m/s.
    pub mean: Vec2,
    /// Perturbation matrix `V_o` (row-major); the velocity noise is `V_o dW`.
    pub sigma: [[f64; 2]; 2],
}

impl WindModel {
    /// `V_o V_o^T`, the only part of `G G^T` that is nonzero. Returned as
    /// `(m00, m01, m11)` of the symmetric 2x2 product.
    pub fn sigma_outer(&self) -> (f64, f64, f64) {
        let s = &self.sigma;
        let m00 = s[0][0] * s[0][0] + s[0][1] * s[0][1];
        let m01 = s[0][0] * s[1][0] + s[0][1] * s[1][1];
        let m11 = s[1][0] * s[1][0] + s[1][1] * s[1][1];
        (m00, m01, m11)
    }
}

/// Drag coefficient, integration step and the actuator limit applied by the
/// UAV when executing an action.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DynamicsParams {
    /// Drag / wind coupling coefficient `c0` (1/s), positive.
    pub c0: f64,
    /// Integration step (s), positive.
    pub dt: f64,
    /// Maximum applied acceleration norm (m/s^2). Actions are rescaled onto
    /// this ball at the point of application.
    pub a_max: f64,
}

/// Weights of the running cost: distance, kinetic energy and actuation.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct CostParams {
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

/// Deterministic drift `A s + B (a + c0 v_o)` of the state SDE.
pub fn drift(s: &UavState, a: Vec2, wind: &WindModel, p: &DynamicsParams) -> [f64; 4] {
    [
        s.v[0],
        s.v[1],
        -p.c0 * s.v[0] + a[0] + p.c0 * wind.mean[0],
        -p.c0 * s.v[1] + a[1] + p.c0 * wind.mean[1],
    ]
}

/// One Euler-Maruyama step. `noise` is a standard-normal pair drawn by the
/// caller; only the velocity block receives noise (`G = [O; V_o]`).
pub fn step(s: &UavState, a: Vec2, wind: &WindModel, p: &DynamicsParams, noise: Vec2) -> UavState {
    let d = drift(s, a, wind, p);
    let sq = p.dt.sqrt();
    let w = [
        sq * (wind.sigma[0][0] * noise[0] + wind.sigma[0][1] * noise[1]),
        sq * (wind.sigma[1][0] * noise[0] + wind.sigma[1][1] * noise[1]),
    ];
    UavState {
        r: [s.r[0] + d[0] * p.dt, s.r[1] + d[1] * p.dt],
        v: [s.v[0] + d[2] * p.dt + w[0], s.v[1] + d[3] * p.dt + w[1]],
    }
}

/// State part `phi_L` of the running cost:
/// `v.r/|r| + c1 |r|^2 + c2 |v|^2`, with the first term taken as 0 at r = 0.
pub fn state_cost(s: &UavState, cp: &CostParams) -> f64 {
    let nr = vec2::norm(s.r);
    let radial = if nr > 0.0 {
        vec2::dot(s.v, s.r) / nr
    } else {
        0.0
    };
    radial + cp.c1 * nr * nr + cp.c2 * vec2::dot(s.v, s.v)
}

/// Full running cost `phi_L(s) + c3 |a|^2`.
pub fn running_cost(s: &UavState, a: Vec2, cp: &CostParams) -> f64 {
    state_cost(s, cp) + cp.c3 * vec2::dot(a, a)
}

/// Motion-energy increment `(c2 |v|^2 + c3 |a|^2) dt`; summing over a run
/// gives `E(t)`.
pub fn energy_increment(s: &UavState, a: Vec2, cp: &CostParams, dt: f64) -> f64 {
    (cp.c2 * vec2::dot(s.v, s.v) + cp.c3 * vec2::dot(a, a)) * dt
}
