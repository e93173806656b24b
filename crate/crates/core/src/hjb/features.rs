//! Polynomial activation vector of the HJB network.
//!
//! The activations are the non-constant terms of the degree-6 expansions
//! `(1 + x + vx)^6` and `(1 + y + vy)^6`: two blocks of 27 monomials, 54
//! features in total. Each feature is `C(i,j) * p^i * w^j` where `p` is the
//! block's position coordinate, `w` its velocity coordinate, `1 <= i+j <= 6`,
//! and `C(i,j) = 6! / (i! j! (6-i-j)!)` is the multinomial coefficient, so
//! that the features of a block sum to `(1 + p + w)^6 - 1`.
//!
//! Canonical feature order (the wire format of serialized weight vectors):
//! block 1 `(x, vx)` then block 2 `(y, vy)`; within a block, ascending total
//! degree `d = i + j`, and within a degree ascending position exponent `i`.
//! Index 0 is therefore `6*vx`, index 1 is `6*x`, index 26 is `x^6`.
//!
//! An affine input scaling `s_scaled = k .* s` is supported for conditioning;
//! the identity scale reproduces the raw expansion above, and all derivatives
//! are taken with respect to the *unscaled* state.

use crate::dynamics::UavState;

/// Number of network weights (two blocks of 27 monomials).
pub const MODEL_SIZE: usize = 54;

const BLOCK: usize = 27;
const DEGREE: u32 = 6;

fn factorial(n: u32) -> f64 {
    (1..=n).map(f64::from).product()
}

/// Exponent table in canonical order: `(i, j, coefficient)` per monomial.
fn monomials() -> [(u32, u32, f64); BLOCK] {
    let mut out = [(0, 0, 0.0); BLOCK];
    let mut idx = 0;
    for d in 1..=DEGREE {
        for i in 0..=d {
            let j = d - i;
            let coeff =
                factorial(DEGREE) / (factorial(i) * factorial(j) * factorial(DEGREE - d));
            out[idx] = (i, j, coeff);
            idx += 1;
        }
    }
    debug_assert_eq!(idx, BLOCK);
    out
}

/// The fixed feature map sigma: R^4 -> R^54.
#[derive(Debug, Clone, Copy)]
pub struct FeatureMap {
    scale: [f64; 4],
    table: [(u32, u32, f64); BLOCK],
}

impl Default for FeatureMap {
    fn default() -> Self {
        Self::new()
    }
}

impl FeatureMap {
    /// The literal degree-6 map on the raw state.
    pub fn new() -> Self {
        Self::with_scale([1.0; 4])
    }

    /// Map evaluated on the componentwise-scaled state `[kx*x, ky*y, kv*vx, kv*vy]`.
    pub fn with_scale(scale: [f64; 4]) -> Self {
        Self {
            scale,
            table: monomials(),
        }
    }

    pub fn scale(&self) -> [f64; 4] {
        self.scale
    }

    #[inline]
    fn scaled(&self, s: &UavState) -> [f64; 4] {
        [
            s.r[0] * self.scale[0],
            s.r[1] * self.scale[1],
            s.v[0] * self.scale[2],
            s.v[1] * self.scale[3],
        ]
    }

    /// sigma(s) in canonical order.
    pub fn features(&self, s: &UavState) -> [f64; MODEL_SIZE] {
        let [x, y, vx, vy] = self.scaled(s);
        let mut out = [0.0; MODEL_SIZE];
        for (m, &(i, j, c)) in self.table.iter().enumerate() {
            out[m] = c * x.powi(i as i32) * vx.powi(j as i32);
            out[m + BLOCK] = c * y.powi(i as i32) * vy.powi(j as i32);
        }
        out
    }

    /// Jacobian d sigma / d s, one row `[d/dx, d/dy, d/dvx, d/dvy]` per feature.
    /// Cross-block entries are identically zero.
    pub fn jacobian(&self, s: &UavState) -> [[f64; 4]; MODEL_SIZE] {
        let [x, y, vx, vy] = self.scaled(s);
        let [kx, ky, kvx, kvy] = self.scale;
        let mut out = [[0.0; 4]; MODEL_SIZE];
        for (m, &(i, j, c)) in self.table.iter().enumerate() {
            let (i32i, i32j) = (i as i32, j as i32);
            if i > 0 {
                out[m][0] = c * f64::from(i) * x.powi(i32i - 1) * vx.powi(i32j) * kx;
                out[m + BLOCK][1] = c * f64::from(i) * y.powi(i32i - 1) * vy.powi(i32j) * ky;
            }
            if j > 0 {
                out[m][2] = c * f64::from(j) * x.powi(i32i) * vx.powi(i32j - 1) * kvx;
                out[m + BLOCK][3] = c * f64::from(j) * y.powi(i32i) * vy.powi(i32j - 1) * kvy;
            }
        }
        out
    }

    /// Velocity-velocity second derivatives per feature, packed as
    /// `[d2/dvx2, d2/dvx dvy, d2/dvy2]`. The mixed entry is structurally zero
    /// because no feature contains both velocity components.
    pub fn hessian_vv(&self, s: &UavState) -> [[f64; 3]; MODEL_SIZE] {
        let [x, y, vx, vy] = self.scaled(s);
        let [_, _, kvx, kvy] = self.scale;
        let mut out = [[0.0; 3]; MODEL_SIZE];
        for (m, &(i, j, c)) in self.table.iter().enumerate() {
            if j > 1 {
                let jj = f64::from(j) * f64::from(j - 1);
                out[m][0] = c * jj * x.powi(i as i32) * vx.powi(j as i32 - 2) * kvx * kvx;
                out[m + BLOCK][2] = c * jj * y.powi(i as i32) * vy.powi(j as i32 - 2) * kvy * kvy;
            }
        }
        out
    }
}
