//! Circular arithmetic helpers.

use core::f64::consts::PI;

/// Full turn.
pub const TAU: f64 = 2.0 * PI;

/// Reduce an angle to the canonical range `[0, 2pi)`.
pub fn wrap_2pi(x: f64) -> f64 {
    let mut r = x % TAU;
    if r < 0.0 {
        r += TAU;
    }
    // x % TAU can round up to exactly TAU for tiny negative x.
    if r >= TAU {
        r -= TAU;
    }
    r
}

/// Circular distance `|((a - b + pi) mod 2pi) - pi|`, in `[0, pi]`.
pub fn circ_dist(a: f64, b: f64) -> f64 {
    let d = wrap_2pi(a - b + PI) - PI;
    if d < 0.0 {
        -d
    } else {
        d
    }
}
