//! Exact Bayesian posterior over the phase.
//!
//! The density is stored as its circular moments `c_m = <e^{i m phi}>` for
//! `m = 0..D`, i.e. `P(phi) = (1/2pi) sum_{m=-D..D} c_m e^{-i m phi}` with
//! `c_{-m} = conj(c_m)`. Multiplying by one measurement likelihood
//! `[1 + (-1)^u cos(p phi - theta)] / 2` only shifts moment indices by
//! `+-p`, so Bayesian updates are exact sparse convolutions and the degree
//! grows by at most `p` per update. A fixed-grid density is provided as an
//! independent cross-check and for campaigns where only the point estimate
//! is needed.

use crate::angle::{wrap_2pi, TAU};
use crate::measurement::{likelihood, MeasurementSetting, Outcome};
use crate::Error;
use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

/// Moments below this magnitude are treated as zero when extracting a
/// direction.
pub const DEGENERACY_EPS: f64 = 1e-12;

/// Phase posterior as a trigonometric-moment vector; `coeffs[0] == 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePosterior {
    coeffs: Vec<Complex64>,
}

impl PhasePosterior {
    /// The flat prior on `[0, 2pi)`: degree 0, density `1/2pi`.
    pub fn uniform_prior() -> Self {
        Self {
            coeffs: vec![Complex64::new(1.0, 0.0)],
        }
    }

    /// Degree `D` of the moment vector.
    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Moment `c_m = <e^{i m phi}>` for any integer `m` (conjugate symmetry
    /// below zero, zero beyond the degree).
    pub fn moment(&self, m: i64) -> Complex64 {
        let a = m.unsigned_abs() as usize;
        if a >= self.coeffs.len() {
            return Complex64::new(0.0, 0.0);
        }
        if m >= 0 {
            self.coeffs[a]
        } else {
            self.coeffs[a].conj()
        }
    }

    /// Posterior density at `phi`.
    pub fn density(&self, phi: f64) -> f64 {
        let mut acc = self.coeffs[0].re;
        for (m, c) in self.coeffs.iter().enumerate().skip(1) {
            let (s, co) = libm::sincos(m as f64 * phi);
            // 2 Re(c_m e^{-i m phi})
            acc += 2.0 * (c.re * co + c.im * s);
        }
        acc / TAU
    }

    /// Multiply in one measurement likelihood and renormalize.
    pub fn update(&mut self, u: Outcome, s: &MeasurementSetting) {
        let p = s.passes() as usize;
        let old_deg = self.degree();
        let new_deg = old_deg + p;
        let half_s = 0.25 * u.sign();
        let rot = Complex64::from_polar(1.0, -s.theta());
        let mut new = vec![Complex64::new(0.0, 0.0); new_deg + 1];
        for (m, slot) in new.iter_mut().enumerate() {
            let m = m as i64;
            let p = p as i64;
            *slot = 0.5 * self.moment(m)
                + half_s * (rot * self.moment(m + p) + rot.conj() * self.moment(m - p));
        }
        let norm = new[0].re;
        assert!(
            norm > 0.0,
            "posterior annihilated: product density is identically zero"
        );
        for c in new.iter_mut() {
            *c /= norm;
        }
        new[0] = Complex64::new(1.0, 0.0);
        self.coeffs = new;
    }

    /// Value-style update.
    pub fn updated(&self, u: Outcome, s: &MeasurementSetting) -> Self {
        let mut next = self.clone();
        next.update(u, s);
        next
    }

    /// Sharp point estimate `arg <e^{i phi}>` in `[0, 2pi)`.
    pub fn point_estimate(&self) -> Result<f64, Error> {
        let c1 = self.moment(1);
        if c1.norm() < DEGENERACY_EPS {
            return Err(Error::DegenerateEstimate);
        }
        Ok(wrap_2pi(c1.arg()))
    }

    /// Point estimate with the degenerate fallback: when the first moment
    /// vanishes, use the lowest nonzero moment `c_m`, whose argument fixes
    /// the phase only mod `2pi/m`; the branch closest to 0 is taken. The
    /// flag reports that a fallback (or full degeneracy) occurred.
    pub fn point_estimate_lenient(&self) -> (f64, bool) {
        if let Ok(est) = self.point_estimate() {
            return (est, false);
        }
        for m in 2..=self.degree() {
            let c = self.moment(m as i64);
            if c.norm() >= DEGENERACY_EPS {
                let base = c.arg() / m as f64;
                let mut best = wrap_2pi(base);
                for j in 1..m {
                    let cand = wrap_2pi(base + TAU * j as f64 / m as f64);
                    // distance to 0 on the circle
                    let d = |x: f64| if x > TAU - x { TAU - x } else { x };
                    if d(cand) < d(best) {
                        best = cand;
                    }
                }
                return (best, true);
            }
        }
        (0.0, true)
    }

    /// Holevo width `sqrt(|c_1|^{-2} - 1)` of the posterior itself;
    /// `+inf` when the first moment vanishes.
    pub fn holevo_width(&self) -> f64 {
        let r = self.moment(1).norm();
        if r < DEGENERACY_EPS {
            f64::INFINITY
        } else {
            libm::sqrt((1.0 / (r * r) - 1.0).max(0.0))
        }
    }
}

/// Fallback density on a fixed grid, updated by pointwise multiplication.
///
/// Used to cross-validate the moment representation; the two must agree on
/// every update sequence.
#[derive(Debug, Clone)]
pub struct GridPosterior {
    values: Vec<f64>,
}

impl GridPosterior {
    pub const DEFAULT_POINTS: usize = 8192;

    pub fn uniform(points: usize) -> Self {
        assert!(points >= 2);
        Self {
            values: vec![1.0 / TAU; points],
        }
    }

    pub fn points(&self) -> usize {
        self.values.len()
    }

    pub fn node(&self, i: usize) -> f64 {
        TAU * i as f64 / self.values.len() as f64
    }

    pub fn density(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn update(&mut self, u: Outcome, s: &MeasurementSetting) {
        let n = self.values.len();
        for i in 0..n {
            let phi = TAU * i as f64 / n as f64;
            self.values[i] *= likelihood(u, phi, s);
        }
        let norm: f64 = self.values.iter().sum::<f64>() * TAU / n as f64;
        assert!(norm > 0.0, "grid posterior annihilated");
        for v in self.values.iter_mut() {
            *v /= norm;
        }
    }

    /// Circular moment `<e^{i m phi}>` by the periodic trapezoid rule.
    pub fn moment(&self, m: i64) -> Complex64 {
        let n = self.values.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, v) in self.values.iter().enumerate() {
            let phi = TAU * i as f64 / n as f64;
            let (s, c) = libm::sincos(m as f64 * phi);
            acc += v * Complex64::new(c, s);
        }
        acc * TAU / n as f64
    }

    pub fn point_estimate_lenient(&self) -> (f64, bool) {
        let c1 = self.moment(1);
        if c1.norm() >= DEGENERACY_EPS {
            (wrap_2pi(c1.arg()), false)
        } else {
            (0.0, true)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    #[test]
    fn uniform_prior_shape() {
        let prior = PhasePosterior::uniform_prior();
        assert_eq!(prior.degree(), 0);
        for phi in [0.0, 1.0, 5.0] {
            assert!((prior.density(phi) - 1.0 / TAU).abs() < 1e-15);
        }
        assert_eq!(prior.point_estimate(), Err(Error::DegenerateEstimate));
        assert_eq!(prior.holevo_width(), f64::INFINITY);
    }

    #[test]
    fn single_update_populates_first_moment() {
        let mut post = PhasePosterior::uniform_prior();
        post.update(Outcome::U0, &MeasurementSetting::new(1, 0.0));
        // density (1 + cos phi) / 2pi
        assert!((post.moment(1).re - 0.5).abs() < 1e-15);
        assert!(post.moment(1).im.abs() < 1e-15);
        assert!((post.density(0.0) - 2.0 / TAU).abs() < 1e-12);
        assert!((post.point_estimate().unwrap() - 0.0).abs() < 1e-12);
    }

    #[test]
    fn double_pass_update_skips_odd_moments() {
        let mut post = PhasePosterior::uniform_prior();
        post.update(Outcome::U0, &MeasurementSetting::new(2, 0.0));
        assert_eq!(post.degree(), 2);
        assert!(post.moment(1).norm() < 1e-15);
        assert!((post.moment(2).norm() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn opposite_updates_cancel_first_moment() {
        // (1 + cos)(1 - cos) ~ sin^2 = (1 - cos 2phi)/2: c_1 = 0, c_2 = -1/2
        let mut post = PhasePosterior::uniform_prior();
        post.update(Outcome::U0, &MeasurementSetting::new(1, 0.0));
        post.update(Outcome::U0, &MeasurementSetting::new(1, PI));
        assert!(post.moment(1).norm() < 1e-15);
        assert!((post.moment(2).norm() - 0.5).abs() < 1e-12);
        // cross-check against the quadrature representation
        let mut grid = GridPosterior::uniform(4096);
        grid.update(Outcome::U0, &MeasurementSetting::new(1, 0.0));
        grid.update(Outcome::U0, &MeasurementSetting::new(1, PI));
        assert!((grid.moment(2) - post.moment(2)).norm() < 1e-10);
    }

    #[test]
    fn covariant_point_estimate() {
        let mut post = PhasePosterior::uniform_prior();
        post.update(Outcome::U0, &MeasurementSetting::new(1, 1.0));
        assert!((post.point_estimate().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lenient_fallback_uses_lowest_moment() {
        let mut post = PhasePosterior::uniform_prior();
        post.update(Outcome::U0, &MeasurementSetting::new(2, 0.0));
        let (est, degenerate) = post.point_estimate_lenient();
        assert!(degenerate);
        // arg(c_2)/2 = 0, tie broken toward 0
        assert!(est.abs() < 1e-12);
    }

    #[test]
    fn grid_matches_moments() {
        let mut post = PhasePosterior::uniform_prior();
        let mut grid = GridPosterior::uniform(4096);
        let updates = [
            (Outcome::U0, MeasurementSetting::new(1, 0.3)),
            (Outcome::U1, MeasurementSetting::new(2, 1.7)),
            (Outcome::U0, MeasurementSetting::new(4, 0.9)),
        ];
        for (u, s) in updates {
            post.update(u, &s);
            grid.update(u, &s);
        }
        for m in 0..=post.degree() as i64 {
            let d = (post.moment(m) - grid.moment(m)).norm();
            assert!(d < 1e-10, "m={m} diff={d}");
        }
    }
}
