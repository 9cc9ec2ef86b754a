//! Circular statistics over trial ensembles.
//!
//! The uncertainty measure is the square root of the Holevo variance
//! `V_H = |<e^{i(phi - phi_est)}>|^{-2} - 1`, which has no branch-cut
//! sensitivity; the small-angle form `V = 4 <sin^2(delta/2)>` is reported
//! alongside, and the Monte Carlo standard error comes from a leave-one-out
//! jackknife.

use crate::posterior::DEGENERACY_EPS;
use crate::schemes::EstimateSample;
use crate::Error;
use libm::{sin, sqrt};
use num_complex::Complex64;

/// Ensemble summary of phase-estimate errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HolevoSummary {
    pub trials: usize,
    /// `sqrt(V_H)`; `+inf` when the mean error vector vanishes.
    pub holevo_std: f64,
    /// The Holevo variance itself.
    pub v_holevo: f64,
    /// Small-angle variance `4 <sin^2(delta/2)>`.
    pub v_small_angle: f64,
    /// Jackknife standard error of `holevo_std`.
    pub mc_stderr: f64,
    /// Jackknife standard error of `v_holevo`.
    pub mc_stderr_v: f64,
    /// Length of the mean error vector.
    pub mean_resultant: f64,
    pub degenerate_count: usize,
}

fn holevo_from_resultant(r: f64) -> (f64, f64) {
    if r < DEGENERACY_EPS {
        (f64::INFINITY, f64::INFINITY)
    } else {
        let v = (1.0 / (r * r) - 1.0).max(0.0);
        (sqrt(v), v)
    }
}

/// Holevo statistics of `phi_true - phi_est` over the samples.
pub fn holevo_std(samples: &[EstimateSample]) -> Result<HolevoSummary, Error> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let n = samples.len();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut sin2 = 0.0;
    let mut degenerate_count = 0;
    let mut zs = alloc::vec::Vec::with_capacity(n);
    for s in samples {
        let delta = s.phi_true - s.phi_est;
        let z = Complex64::from_polar(1.0, delta);
        zs.push(z);
        sum += z;
        let h = sin(delta / 2.0);
        sin2 += h * h;
        if s.degenerate {
            degenerate_count += 1;
        }
    }
    let r = sum.norm() / n as f64;
    let (std, v) = holevo_from_resultant(r);
    let v_small_angle = 4.0 * sin2 / n as f64;

    // leave-one-out jackknife on both sqrt(V_H) and V_H
    let (mc_stderr, mc_stderr_v) = if n >= 2 && std.is_finite() {
        let mut mean_s = 0.0;
        let mut mean_v = 0.0;
        let mut loo = alloc::vec::Vec::with_capacity(n);
        let mut finite = true;
        for z in &zs {
            let ri = (sum - z).norm() / (n - 1) as f64;
            let (si, vi) = holevo_from_resultant(ri);
            if !si.is_finite() {
                finite = false;
                break;
            }
            mean_s += si;
            mean_v += vi;
            loo.push((si, vi));
        }
        if finite {
            mean_s /= n as f64;
            mean_v /= n as f64;
            let mut var_s = 0.0;
            let mut var_v = 0.0;
            for (si, vi) in &loo {
                var_s += (si - mean_s) * (si - mean_s);
                var_v += (vi - mean_v) * (vi - mean_v);
            }
            let scale = (n - 1) as f64 / n as f64;
            (sqrt(scale * var_s), sqrt(scale * var_v))
        } else {
            (f64::INFINITY, f64::INFINITY)
        }
    } else {
        (f64::INFINITY, f64::INFINITY)
    };

    Ok(HolevoSummary {
        trials: n,
        holevo_std: std,
        v_holevo: v,
        v_small_angle,
        mc_stderr,
        mc_stderr_v,
        mean_resultant: r,
        degenerate_count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::PI;

    fn sample(phi_true: f64, phi_est: f64) -> EstimateSample {
        EstimateSample {
            phi_true,
            phi_est,
            n_resources: 1,
            degenerate: false,
        }
    }

    #[test]
    fn zero_error_ensemble() {
        let samples: alloc::vec::Vec<_> = (0..10).map(|i| sample(i as f64 * 0.1, i as f64 * 0.1)).collect();
        let s = holevo_std(&samples).unwrap();
        assert_eq!(s.holevo_std, 0.0);
        assert_eq!(s.v_small_angle, 0.0);
    }

    #[test]
    fn antipodal_errors_give_sentinel() {
        let samples = [sample(0.0, 0.0), sample(0.0, PI)];
        let s = holevo_std(&samples).unwrap();
        assert_eq!(s.holevo_std, f64::INFINITY);
    }

    #[test]
    fn empty_rejected() {
        assert_eq!(holevo_std(&[]), Err(Error::EmptySamples));
    }

    #[test]
    fn order_independence() {
        let samples: alloc::vec::Vec<_> =
            (0..1000).map(|i| sample(0.0, libm::sin(i as f64) * 0.3)).collect();
        let mut rev = samples.clone();
        rev.reverse();
        let a = holevo_std(&samples).unwrap();
        let b = holevo_std(&rev).unwrap();
        assert!((a.holevo_std - b.holevo_std).abs() < 1e-10);
    }
}
