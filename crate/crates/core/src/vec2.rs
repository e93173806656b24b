//! Small helpers for planar vectors stored as `[f64; 2]`.

pub type Vec2 = [f64; 2];

#[inline]
pub fn dot(a: Vec2, b: Vec2) -> f64 {
    a[0] * b[0] + a[1] * b[1]
}

#[inline]
pub fn norm(a: Vec2) -> f64 {
    a[0].hypot(a[1])
}

#[inline]
pub fn add(a: Vec2, b: Vec2) -> Vec2 {
    [a[0] + b[0], a[1] + b[1]]
}

#[inline]
pub fn scale(a: Vec2, k: f64) -> Vec2 {
    [a[0] * k, a[1] * k]
}

/// Rescale `a` onto the ball of radius `max_norm` if it lies outside.
#[inline]
pub fn clamp_norm(a: Vec2, max_norm: f64) -> Vec2 {
    let n = norm(a);
    if n > max_norm {
        scale(a, max_norm / n)
    } else {
        a
    }
}
