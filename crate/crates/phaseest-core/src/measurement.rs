//! Single-measurement likelihood and outcome sampling.
//!
//! One probe configuration is a multiplicity `p` (number of passes through
//! the unknown phase) and a total control phase `theta`. The binary outcome
//! `u` occurs with probability `[1 + (-1)^u cos(p*phi - theta)] / 2`. The
//! sine-form convention found elsewhere is this one with `theta` shifted by
//! `pi/2`: at `theta = 0` the outcome-0 probability is `(1 + cos phi)/2`,
//! at `theta = pi/2` it is `(1 + sin phi)/2`.

use crate::angle::wrap_2pi;
use rand_core::RngCore;

/// One probe configuration: pass multiplicity and total control phase.
///
/// Physically the control wave plate is applied once per pass; here the
/// already-multiplied total is stored, so callers pass e.g. `2^k * theta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    passes: u32,
    theta: f64,
}

impl MeasurementSetting {
    /// `passes >= 1`; `theta` is reduced mod 2pi.
    pub fn new(passes: u32, theta: f64) -> Self {
        assert!(passes >= 1, "multiplicity must be at least 1");
        Self {
            passes,
            theta: wrap_2pi(theta),
        }
    }

    pub fn passes(&self) -> u32 {
        self.passes
    }

    /// Total control phase in `[0, 2pi)`.
    pub fn theta(&self) -> f64 {
        self.theta
    }
}

/// Binary measurement outcome; `U0` is the "+" port.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    U0,
    U1,
}

impl Outcome {
    pub fn bit(self) -> u8 {
        match self {
            Outcome::U0 => 0,
            Outcome::U1 => 1,
        }
    }

    /// `(-1)^u`.
    pub fn sign(self) -> f64 {
        match self {
            Outcome::U0 => 1.0,
            Outcome::U1 => -1.0,
        }
    }

    pub fn from_bit(bit: u8) -> Self {
        if bit & 1 == 0 {
            Outcome::U0
        } else {
            Outcome::U1
        }
    }
}

/// Probability of observing `u` at true phase `phi` under setting `s`.
///
/// Total by construction: `likelihood(U0, ..) + likelihood(U1, ..) == 1`
/// exactly, since the second branch is computed as the complement.
pub fn likelihood(u: Outcome, phi: f64, s: &MeasurementSetting) -> f64 {
    let p0 = 0.5 * (1.0 + libm::cos(s.passes as f64 * phi - s.theta));
    match u {
        Outcome::U0 => p0,
        Outcome::U1 => 1.0 - p0,
    }
}

/// Uniform f64 in `[0, 1)` from the upper 53 bits of one u64 draw.
pub(crate) fn uniform_f64<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Bernoulli draw from the likelihood; mutates only the supplied stream.
pub fn sample_outcome<R: RngCore + ?Sized>(
    phi_true: f64,
    s: &MeasurementSetting,
    rng: &mut R,
) -> Outcome {
    let p0 = likelihood(Outcome::U0, phi_true, s);
    if uniform_f64(rng) < p0 {
        Outcome::U0
    } else {
        Outcome::U1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn likelihood_reference_points() {
        let s = MeasurementSetting::new(1, 0.0);
        assert_eq!(likelihood(Outcome::U0, 0.0, &s), 1.0);

        let s = MeasurementSetting::new(1, FRAC_PI_2);
        assert!((likelihood(Outcome::U0, 0.0, &s) - 0.5).abs() < 1e-15);

        let s = MeasurementSetting::new(2, 0.0);
        assert!((likelihood(Outcome::U1, FRAC_PI_4, &s) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn outcomes_sum_to_one_exactly() {
        let s = MeasurementSetting::new(3, 1.234);
        for i in 0..100 {
            let phi = i as f64 * 0.37;
            let sum = likelihood(Outcome::U0, phi, &s) + likelihood(Outcome::U1, phi, &s);
            assert_eq!(sum, 1.0);
        }
    }

    #[test]
    fn deterministic_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let s = MeasurementSetting::new(1, 0.0);
        for _ in 0..50 {
            assert_eq!(sample_outcome(0.0, &s, &mut rng), Outcome::U0);
            assert_eq!(sample_outcome(PI, &s, &mut rng), Outcome::U1);
        }
        // cos(2 * pi/2) = -1 forces u = 1
        let s = MeasurementSetting::new(2, 0.0);
        for _ in 0..50 {
            assert_eq!(sample_outcome(FRAC_PI_2, &s, &mut rng), Outcome::U1);
        }
    }

    #[test]
    fn empirical_frequency_matches_likelihood() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let s = MeasurementSetting::new(3, 0.9);
        let phi = 2.1;
        let p0 = likelihood(Outcome::U0, phi, &s);
        let n = 200_000usize;
        let hits = (0..n)
            .filter(|_| sample_outcome(phi, &s, &mut rng) == Outcome::U0)
            .count();
        let nu = hits as f64 / n as f64;
        let sigma = libm::sqrt(p0 * (1.0 - p0) / n as f64);
        assert!((nu - p0).abs() < 5.0 * sigma, "nu={nu} p0={p0}");
    }
}
