//! Brute-force enumeration of small protocol instances.
//!
//! For a protocol with `m` binary measurements there are `2^m` outcome
//! strings; each has an exact probability (the product of likelihoods along
//! the adaptive path) and a deterministic estimate. Enumerating them yields
//! the exact estimate distribution and the exact variance, against which
//! the Monte Carlo engine is validated. The digit-extraction scheme with a
//! continuously randomized reference additionally admits a closed-form
//! error density, which must match the Fejer kernel.

use crate::angle::{wrap_2pi, TAU};
use crate::measurement::{likelihood, Outcome};
use crate::posterior::DEGENERACY_EPS;
use crate::schemes::{Protocol, QpeaScheme, SchemeConfig};
use crate::Error;
use alloc::vec::Vec;
use core::f64::consts::PI;
use libm::sin;
use num_complex::Complex64;

/// Work cap for exact enumeration (outcome strings times grid points).
pub const ENUMERATION_CAP: u64 = 1 << 20;

/// Exact ensemble moments of one enumerated instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExactResult {
    /// Exact `4 <sin^2[(phi - phi_est)/2]>`.
    pub v: f64,
    /// Exact Holevo variance; `+inf` when the mean vector vanishes.
    pub v_holevo: f64,
    /// Number of outcome strings enumerated.
    pub strings: u64,
}

struct Accumulator {
    moment: Complex64,
    sin2: f64,
    weight: f64,
    strings: u64,
}

impl Accumulator {
    fn new() -> Self {
        Self {
            moment: Complex64::new(0.0, 0.0),
            sin2: 0.0,
            weight: 0.0,
            strings: 0,
        }
    }

    fn finish(&self) -> ExactResult {
        let r = self.moment.norm() / self.weight;
        let v_holevo = if r < DEGENERACY_EPS {
            f64::INFINITY
        } else {
            (1.0 / (r * r) - 1.0).max(0.0)
        };
        ExactResult {
            v: 4.0 * self.sin2 / self.weight,
            v_holevo,
            strings: self.strings,
        }
    }
}

fn walk(
    proto: &dyn Protocol,
    phi_true: f64,
    outcomes: &mut Vec<Outcome>,
    weight: f64,
    acc: &mut Accumulator,
) {
    if outcomes.len() == proto.num_measurements() {
        let est = proto.estimate(outcomes);
        let delta = phi_true - est.phi;
        acc.moment += weight * Complex64::from_polar(1.0, delta);
        let h = sin(delta / 2.0);
        acc.sin2 += weight * h * h;
        acc.weight += weight;
        acc.strings += 1;
        return;
    }
    let setting = proto.next_setting(outcomes);
    for u in [Outcome::U0, Outcome::U1] {
        let w = weight * likelihood(u, phi_true, &setting);
        if w == 0.0 {
            // deterministic branch: the subtree has zero probability
            continue;
        }
        outcomes.push(u);
        walk(proto, phi_true, outcomes, w, acc);
        outcomes.pop();
    }
}

fn check_cap(measurements: usize, grid_points: u64) -> Result<u64, Error> {
    if measurements >= 63 {
        return Err(Error::EnumerationCapExceeded {
            required: u64::MAX,
            cap: ENUMERATION_CAP,
        });
    }
    let strings = 1u64 << measurements;
    let required = strings.saturating_mul(grid_points.max(1));
    if required > ENUMERATION_CAP {
        return Err(Error::EnumerationCapExceeded {
            required,
            cap: ENUMERATION_CAP,
        });
    }
    Ok(strings)
}

/// Exact variance of one protocol instance at a fixed true phase.
pub fn exact_v(proto: &dyn Protocol, phi_true: f64) -> Result<ExactResult, Error> {
    check_cap(proto.num_measurements(), 1)?;
    let mut acc = Accumulator::new();
    let mut outcomes = Vec::with_capacity(proto.num_measurements());
    walk(proto, phi_true, &mut outcomes, 1.0, &mut acc);
    Ok(acc.finish())
}

/// Exact variance of a configured scheme averaged over midpoint grids of
/// the true phase and (when randomized) the reference phase.
pub fn exact_v_grid(
    cfg: &SchemeConfig,
    phi_points: usize,
    xi_points: usize,
) -> Result<ExactResult, Error> {
    cfg.validate()?;
    let xi_points = if cfg.randomize_reference { xi_points.max(1) } else { 1 };
    let phi_points = phi_points.max(1);
    let measurements = cfg.protocol(0.0).num_measurements();
    check_cap(measurements, (phi_points * xi_points) as u64)?;

    let mut acc = Accumulator::new();
    for i in 0..phi_points {
        let phi = TAU * (i as f64 + 0.5) / phi_points as f64;
        for j in 0..xi_points {
            let xi = TAU * (j as f64 + 0.5) / xi_points as f64;
            let proto = cfg.protocol(xi);
            let mut outcomes = Vec::with_capacity(measurements);
            walk(proto.as_ref(), phi, &mut outcomes, 1.0, &mut acc);
        }
    }
    Ok(acc.finish())
}

/// Exact error density of the digit-extraction scheme at error `delta`,
/// with the reference phase uniformly randomized (marginalized in closed
/// form, no reference grid).
pub fn qpea_error_density(k_max: u32, delta: f64) -> f64 {
    let phi = 0.0;
    let stages: Vec<u32> = (0..=k_max).rev().collect();
    let n_strings = 1u64 << (k_max + 1);
    let mut total = 0.0;
    for string in 0..n_strings {
        let bits: Vec<Outcome> = (0..=k_max)
            .map(|i| Outcome::from_bit(((string >> (k_max - i)) & 1) as u8))
            .collect();
        let offset: f64 = bits
            .iter()
            .zip(stages.iter())
            .map(|(u, k)| PI * u.bit() as f64 / (1u64 << k) as f64)
            .sum();
        // the unique reference that maps this string's estimate to phi+delta
        let reference = wrap_2pi(phi + delta - offset);
        let proto = QpeaScheme::new(k_max, reference);
        let mut w = 1.0;
        for i in 0..bits.len() {
            let s = proto.next_setting(&bits[..i]);
            w *= likelihood(bits[i], phi, &s);
            if w == 0.0 {
                break;
            }
        }
        total += w;
    }
    total / TAU
}

/// The Fejer-kernel error density `sin^2[(n+1) d/2] / (2pi (n+1) sin^2(d/2))`
/// for a digit budget of `n_q` resources.
pub fn fejer_kernel(delta: f64, n_q: u64) -> f64 {
    let m = (n_q + 1) as f64;
    let s = sin(delta / 2.0);
    if s.abs() < 1e-9 {
        // removable singularity at delta = 0
        return m / TAU;
    }
    let t = sin(m * delta / 2.0);
    t * t / (TAU * m * s * s)
}
