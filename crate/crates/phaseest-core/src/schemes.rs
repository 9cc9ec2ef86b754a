//! Protocol drivers.
//!
//! Every scheme is expressed through the [`Protocol`] trait: a fixed number
//! of measurements, a setting that may depend on the outcomes observed so
//! far, and a final estimate computed from the full outcome string. The
//! Monte Carlo runner and the exact enumeration oracle both drive the same
//! trait, so there is a single source of truth for each scheme's settings
//! and estimator.
//!
//! Schemes:
//! - [`StandardScheme`]: single-pass interferometry with the control phase
//!   alternating between 0 and pi/2; estimate from the outcome frequencies.
//! - [`QpeaScheme`]: the iterative phase estimation algorithm, reading one
//!   binary digit per multiplicity `2^k` from `k = K` down to 0 with the
//!   Markovian digit-feedback correction.
//! - [`HybridBayesianScheme`]: QPEA measurements plus `N_S = 2^K`
//!   single-pass measurements on a phase ramp, all folded through the exact
//!   posterior.
//! - [`HybridProofScheme`]: the two sub-estimates combined by the
//!   agreement window `2 * delta_phi`.
//! - [`NonAdaptiveScheme`]: the predetermined schedule `M(K,k) = M_K +
//!   mu*(K-k)` repetitions at multiplicity `2^k`, control phase ramped by
//!   `pi/M(K,k)` within each block; covers the fixed-M variant at `mu = 0`.

use crate::angle::{circ_dist, wrap_2pi, TAU};
use crate::bounds;
use crate::measurement::{sample_outcome, uniform_f64, MeasurementSetting, Outcome};
use crate::posterior::PhasePosterior;
use crate::Error;
use alloc::boxed::Box;
use alloc::vec::Vec;
use core::f64::consts::{FRAC_PI_2, PI};
use rand_core::RngCore;

/// Result of one estimation run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateSample {
    /// True phase, `[0, 2pi)`.
    pub phi_true: f64,
    /// Estimated phase, `[0, 2pi)`.
    pub phi_est: f64,
    /// Phase-shift applications consumed.
    pub n_resources: u64,
    /// Set when a degenerate fallback produced the estimate.
    pub degenerate: bool,
}

/// A point estimate plus the degenerate-fallback flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub phi: f64,
    pub degenerate: bool,
}

/// A measurement protocol: deterministic given the outcome string.
pub trait Protocol {
    /// Total number of binary measurements.
    fn num_measurements(&self) -> usize;

    /// Setting for the next measurement, given all outcomes so far.
    fn next_setting(&self, prefix: &[Outcome]) -> MeasurementSetting;

    /// Final estimate from the complete outcome string.
    fn estimate(&self, outcomes: &[Outcome]) -> Estimate;
}

/// Drive a protocol against a true phase, sampling outcomes from `rng`.
pub fn run_protocol<P: Protocol + ?Sized, R: RngCore + ?Sized>(
    proto: &P,
    phi_true: f64,
    rng: &mut R,
) -> EstimateSample {
    let n = proto.num_measurements();
    let mut outcomes: Vec<Outcome> = Vec::with_capacity(n);
    let mut resources: u64 = 0;
    for _ in 0..n {
        let s = proto.next_setting(&outcomes);
        resources += s.passes() as u64;
        outcomes.push(sample_outcome(phi_true, &s, rng));
    }
    let est = proto.estimate(&outcomes);
    EstimateSample {
        phi_true: wrap_2pi(phi_true),
        phi_est: est.phi,
        n_resources: resources,
        degenerate: est.degenerate,
    }
}

/// Replay a protocol's settings for a given outcome string.
pub fn settings_for_outcomes<P: Protocol + ?Sized>(
    proto: &P,
    outcomes: &[Outcome],
) -> Vec<MeasurementSetting> {
    (0..outcomes.len())
        .map(|i| proto.next_setting(&outcomes[..i]))
        .collect()
}

/// Fold a (setting, outcome) sequence through the exact posterior and take
/// the first-moment direction.
pub fn posterior_point_estimate(settings: &[MeasurementSetting], outcomes: &[Outcome]) -> Estimate {
    assert_eq!(settings.len(), outcomes.len());
    let mut post = PhasePosterior::uniform_prior();
    for (s, &u) in settings.iter().zip(outcomes) {
        post.update(u, s);
    }
    let (phi, degenerate) = post.point_estimate_lenient();
    Estimate { phi, degenerate }
}

fn posterior_estimate<P: Protocol + ?Sized>(proto: &P, outcomes: &[Outcome]) -> Estimate {
    let mut post = PhasePosterior::uniform_prior();
    for (i, &u) in outcomes.iter().enumerate() {
        let s = proto.next_setting(&outcomes[..i]);
        post.update(u, &s);
    }
    let (phi, degenerate) = post.point_estimate_lenient();
    Estimate { phi, degenerate }
}

// ---------------------------------------------------------------------------
// standard interferometry

/// Single-pass measurements alternating the control phase between 0 and
/// pi/2; the estimate is the direction of `(2 nu_1 - 1, 2 nu_2 - 1)` where
/// `nu_k` are the outcome-0 frequencies in the two halves.
#[derive(Debug, Clone, Copy)]
pub struct StandardScheme {
    n_s: u32,
}

impl StandardScheme {
    /// `n_s` must be even and at least 2.
    pub fn new(n_s: u32) -> Self {
        assert!(n_s >= 2 && n_s % 2 == 0, "standard budget must be even");
        Self { n_s }
    }

    /// Estimate from the two quadrature frequencies.
    pub fn estimate_from_frequencies(nu1: f64, nu2: f64) -> Estimate {
        let x = 2.0 * nu1 - 1.0;
        let y = 2.0 * nu2 - 1.0;
        if x == 0.0 && y == 0.0 {
            return Estimate {
                phi: 0.0,
                degenerate: true,
            };
        }
        Estimate {
            phi: wrap_2pi(libm::atan2(y, x)),
            degenerate: false,
        }
    }
}

impl Protocol for StandardScheme {
    fn num_measurements(&self) -> usize {
        self.n_s as usize
    }

    fn next_setting(&self, prefix: &[Outcome]) -> MeasurementSetting {
        let theta = if prefix.len() % 2 == 0 { 0.0 } else { FRAC_PI_2 };
        MeasurementSetting::new(1, theta)
    }

    fn estimate(&self, outcomes: &[Outcome]) -> Estimate {
        let half = outcomes.len() / 2;
        let mut hits = [0u32; 2];
        for (i, u) in outcomes.iter().enumerate() {
            if *u == Outcome::U0 {
                hits[i % 2] += 1;
            }
        }
        let nu1 = hits[0] as f64 / half as f64;
        let nu2 = hits[1] as f64 / half as f64;
        Self::estimate_from_frequencies(nu1, nu2)
    }
}

// ---------------------------------------------------------------------------
// iterative phase estimation

/// Digit-by-digit phase estimation: for `k = K` down to 0 one measurement
/// at multiplicity `2^k` with control phase `2^k * (reference + partial)`,
/// where `partial` accumulates `pi * u / 2^k` per read digit. The final
/// estimate is `reference + partial`.
#[derive(Debug, Clone, Copy)]
pub struct QpeaScheme {
    k_max: u32,
    reference: f64,
}

impl QpeaScheme {
    pub fn new(k_max: u32, reference: f64) -> Self {
        Self {
            k_max,
            reference: wrap_2pi(reference),
        }
    }

    pub fn reference(&self) -> f64 {
        self.reference
    }

    /// Partial estimate (relative to the reference) from already-read
    /// digits; `prefix[i]` is the digit read at `k = K - i`.
    fn partial(&self, prefix: &[Outcome]) -> f64 {
        let mut acc = 0.0;
        for (i, u) in prefix.iter().enumerate() {
            let k = self.k_max - i as u32;
            acc += PI * u.bit() as f64 / (1u64 << k) as f64;
        }
        acc
    }
}

impl Protocol for QpeaScheme {
    fn num_measurements(&self) -> usize {
        self.k_max as usize + 1
    }

    fn next_setting(&self, prefix: &[Outcome]) -> MeasurementSetting {
        let k = self.k_max - prefix.len() as u32;
        let p = 1u32 << k;
        MeasurementSetting::new(p, p as f64 * (self.reference + self.partial(prefix)))
    }

    fn estimate(&self, outcomes: &[Outcome]) -> Estimate {
        Estimate {
            phi: wrap_2pi(self.reference + self.partial(outcomes)),
            degenerate: false,
        }
    }
}

// ---------------------------------------------------------------------------
// hybrid schemes

/// QPEA measurements followed by `n_s` single-pass measurements on the
/// ramp `theta_j = reference + j*pi/n_s`; every outcome feeds the exact
/// posterior and the estimate is its first-moment direction.
#[derive(Debug, Clone, Copy)]
pub struct HybridBayesianScheme {
    qpea: QpeaScheme,
    n_s: u32,
}

impl HybridBayesianScheme {
    pub fn new(k_max: u32, n_s: u32, reference: f64) -> Self {
        assert!(n_s >= 1);
        Self {
            qpea: QpeaScheme::new(k_max, reference),
            n_s,
        }
    }
}

impl Protocol for HybridBayesianScheme {
    fn num_measurements(&self) -> usize {
        self.qpea.num_measurements() + self.n_s as usize
    }

    fn next_setting(&self, prefix: &[Outcome]) -> MeasurementSetting {
        let n_q = self.qpea.num_measurements();
        if prefix.len() < n_q {
            self.qpea.next_setting(prefix)
        } else {
            let j = (prefix.len() - n_q) as f64;
            MeasurementSetting::new(1, self.qpea.reference() + j * PI / self.n_s as f64)
        }
    }

    fn estimate(&self, outcomes: &[Outcome]) -> Estimate {
        posterior_estimate(self, outcomes)
    }
}

/// Standard measurements followed by QPEA; the two point estimates are
/// combined by the agreement window: take the QPEA estimate when the two
/// differ by less than `2 * delta_phi` with `delta_phi =
/// (pi/3) sqrt(f(n_s)/n_s)`, the standard estimate otherwise.
#[derive(Debug, Clone, Copy)]
pub struct HybridProofScheme {
    standard: StandardScheme,
    qpea: QpeaScheme,
}

impl HybridProofScheme {
    pub fn new(k_max: u32, n_s: u32, reference: f64) -> Self {
        Self {
            standard: StandardScheme::new(n_s),
            qpea: QpeaScheme::new(k_max, reference),
        }
    }

    /// Half the agreement window.
    pub fn delta_phi(&self) -> f64 {
        let n_s = self.standard.n_s as f64;
        (PI / 3.0) * libm::sqrt(bounds::f_of(self.standard.n_s as u64) / n_s)
    }

    /// The combiner itself, exposed for direct testing.
    pub fn combine(phi_s: &Estimate, phi_q: f64, delta_phi: f64) -> Estimate {
        if circ_dist(phi_s.phi, phi_q) < 2.0 * delta_phi {
            Estimate {
                phi: phi_q,
                degenerate: phi_s.degenerate,
            }
        } else {
            *phi_s
        }
    }
}

impl Protocol for HybridProofScheme {
    fn num_measurements(&self) -> usize {
        self.standard.num_measurements() + self.qpea.num_measurements()
    }

    fn next_setting(&self, prefix: &[Outcome]) -> MeasurementSetting {
        let n_std = self.standard.num_measurements();
        if prefix.len() < n_std {
            self.standard.next_setting(prefix)
        } else {
            self.qpea.next_setting(&prefix[n_std..])
        }
    }

    fn estimate(&self, outcomes: &[Outcome]) -> Estimate {
        let n_std = self.standard.num_measurements();
        let phi_s = self.standard.estimate(&outcomes[..n_std]);
        let phi_q = self.qpea.estimate(&outcomes[n_std..]);
        Self::combine(&phi_s, phi_q.phi, self.delta_phi())
    }
}

// ---------------------------------------------------------------------------
// predetermined schedules

/// Non-adaptive schedule: for `k = 0..=K`, `M(K,k) = m_k + mu*(K-k)`
/// measurements at multiplicity `2^k`, control phase ramped within the
/// block as `theta_j = j * pi / M(K,k)` (reset at each block). The full
/// setting list is fixed before any outcome is observed.
#[derive(Debug, Clone)]
pub struct NonAdaptiveScheme {
    settings: Vec<MeasurementSetting>,
}

impl NonAdaptiveScheme {
    pub fn new(k_max: u32, m_k: u32, mu: u32) -> Self {
        assert!(m_k >= 1);
        let mut settings = Vec::new();
        for k in 0..=k_max {
            let m = m_k + mu * (k_max - k);
            let p = 1u32 << k;
            for j in 0..m {
                settings.push(MeasurementSetting::new(p, j as f64 * PI / m as f64));
            }
        }
        Self { settings }
    }

    /// Fixed repetition count at every multiplicity.
    pub fn fixed_m(k_max: u32, m: u32) -> Self {
        Self::new(k_max, m, 0)
    }

    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }
}

impl Protocol for NonAdaptiveScheme {
    fn num_measurements(&self) -> usize {
        self.settings.len()
    }

    fn next_setting(&self, prefix: &[Outcome]) -> MeasurementSetting {
        self.settings[prefix.len()]
    }

    fn estimate(&self, outcomes: &[Outcome]) -> Estimate {
        posterior_estimate(self, outcomes)
    }
}

// ---------------------------------------------------------------------------
// configuration

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchemeKind {
    Standard,
    Qpea,
    Hybrid,
    NonAdaptive,
    FixedM,
}

impl SchemeKind {
    pub fn name(&self) -> &'static str {
        match self {
            SchemeKind::Standard => "standard",
            SchemeKind::Qpea => "qpea",
            SchemeKind::Hybrid => "hybrid",
            SchemeKind::NonAdaptive => "nonadaptive",
            SchemeKind::FixedM => "fixedm",
        }
    }
}

/// Estimator variant for the hybrid scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HybridMode {
    /// All outcomes through the exact posterior (the numerical scheme).
    Bayesian,
    /// The agreement-window combiner from the analytic bound.
    ProofCombiner,
}

/// Control-phase policy; informational, fixed per scheme kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThetaPolicy {
    /// Alternate between 0 and pi/2 (standard interferometry).
    Alternate0HalfPi,
    /// Ramp by pi/M within each multiplicity block.
    IncrementPerBlock,
}

/// Full description of one protocol run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SchemeConfig {
    pub kind: SchemeKind,
    pub k_max: u32,
    pub m_k: u32,
    pub mu: u32,
    pub n_s: u32,
    pub theta_policy: ThetaPolicy,
    pub randomize_reference: bool,
    pub hybrid_mode: HybridMode,
}

impl SchemeConfig {
    pub fn standard(n_s: u32) -> Self {
        Self {
            kind: SchemeKind::Standard,
            k_max: 0,
            m_k: 1,
            mu: 0,
            n_s,
            theta_policy: ThetaPolicy::Alternate0HalfPi,
            randomize_reference: false,
            hybrid_mode: HybridMode::Bayesian,
        }
    }

    pub fn qpea(k_max: u32, randomize_reference: bool) -> Self {
        Self {
            kind: SchemeKind::Qpea,
            k_max,
            m_k: 1,
            mu: 0,
            n_s: 0,
            theta_policy: ThetaPolicy::IncrementPerBlock,
            randomize_reference,
            hybrid_mode: HybridMode::Bayesian,
        }
    }

    /// Hybrid with the near-optimal budget `n_s = 2^k_max`.
    pub fn hybrid(k_max: u32, mode: HybridMode) -> Self {
        Self {
            kind: SchemeKind::Hybrid,
            k_max,
            m_k: 1,
            mu: 0,
            n_s: 1 << k_max,
            theta_policy: ThetaPolicy::IncrementPerBlock,
            randomize_reference: true,
            hybrid_mode: mode,
        }
    }

    pub fn nonadaptive(k_max: u32, m_k: u32, mu: u32) -> Self {
        Self {
            kind: SchemeKind::NonAdaptive,
            k_max,
            m_k,
            mu,
            n_s: 0,
            theta_policy: ThetaPolicy::IncrementPerBlock,
            randomize_reference: false,
            hybrid_mode: HybridMode::Bayesian,
        }
    }

    pub fn fixed_m(k_max: u32, m: u32) -> Self {
        Self {
            kind: SchemeKind::FixedM,
            k_max,
            m_k: m,
            mu: 0,
            n_s: 0,
            theta_policy: ThetaPolicy::IncrementPerBlock,
            randomize_reference: false,
            hybrid_mode: HybridMode::Bayesian,
        }
    }

    pub fn validate(&self) -> Result<(), Error> {
        match self.kind {
            SchemeKind::Standard => {
                if self.n_s < 2 || self.n_s % 2 != 0 {
                    return Err(Error::InvalidConfig("standard budget must be even and >= 2"));
                }
            }
            SchemeKind::Hybrid => {
                if self.n_s == 0 {
                    return Err(Error::InvalidConfig("hybrid requires a standard budget"));
                }
                if self.hybrid_mode == HybridMode::ProofCombiner && self.n_s % 2 != 0 {
                    return Err(Error::InvalidConfig("proof combiner needs an even budget"));
                }
                if self.k_max < 1 {
                    return Err(Error::InvalidConfig("hybrid requires k_max >= 1"));
                }
            }
            SchemeKind::FixedM => {
                if self.mu != 0 {
                    return Err(Error::InvalidConfig("fixed-M requires mu = 0"));
                }
                if self.m_k < 1 {
                    return Err(Error::InvalidConfig("repetition count must be >= 1"));
                }
            }
            SchemeKind::NonAdaptive => {
                if self.m_k < 1 {
                    return Err(Error::InvalidConfig("repetition count must be >= 1"));
                }
            }
            SchemeKind::Qpea => {}
        }
        if self.total_resources() < 1 {
            return Err(Error::InvalidConfig("zero-resource configuration"));
        }
        Ok(())
    }

    /// Exact count of phase-shift applications for one run.
    pub fn total_resources(&self) -> u64 {
        let n_q = (1u64 << (self.k_max + 1)) - 1;
        match self.kind {
            SchemeKind::Standard => self.n_s as u64,
            SchemeKind::Qpea => n_q,
            SchemeKind::Hybrid => n_q + self.n_s as u64,
            SchemeKind::NonAdaptive | SchemeKind::FixedM => (0..=self.k_max)
                .map(|k| (self.m_k + self.mu * (self.k_max - k)) as u64 * (1u64 << k))
                .sum(),
        }
    }

    /// Build the protocol, with the given reference phase where one applies.
    pub fn protocol(&self, reference: f64) -> Box<dyn Protocol> {
        match self.kind {
            SchemeKind::Standard => Box::new(StandardScheme::new(self.n_s)),
            SchemeKind::Qpea => Box::new(QpeaScheme::new(self.k_max, reference)),
            SchemeKind::Hybrid => match self.hybrid_mode {
                HybridMode::Bayesian => {
                    Box::new(HybridBayesianScheme::new(self.k_max, self.n_s, reference))
                }
                HybridMode::ProofCombiner => {
                    Box::new(HybridProofScheme::new(self.k_max, self.n_s, reference))
                }
            },
            SchemeKind::NonAdaptive | SchemeKind::FixedM => {
                Box::new(NonAdaptiveScheme::new(self.k_max, self.m_k, self.mu))
            }
        }
    }

    /// Run one trial: draws the reference phase (if randomized) from `rng`
    /// and then samples every measurement from the same stream.
    pub fn run<R: RngCore + ?Sized>(&self, phi_true: f64, rng: &mut R) -> EstimateSample {
        let reference = if self.randomize_reference {
            TAU * uniform_f64(rng)
        } else {
            0.0
        };
        let proto = self.protocol(reference);
        run_protocol(proto.as_ref(), phi_true, rng)
    }
}

/// Convenience wrapper for [`SchemeConfig::total_resources`].
pub fn total_resources(cfg: &SchemeConfig) -> u64 {
    cfg.total_resources()
}

/// Standard interferometry with an even budget `n_s`.
pub fn run_standard<R: RngCore + ?Sized>(n_s: u32, phi_true: f64, rng: &mut R) -> EstimateSample {
    run_protocol(&StandardScheme::new(n_s), phi_true, rng)
}

/// One QPEA run, optionally with a randomized reference phase.
pub fn run_qpea<R: RngCore + ?Sized>(
    k_max: u32,
    phi_true: f64,
    rng: &mut R,
    randomize_reference: bool,
) -> EstimateSample {
    let reference = if randomize_reference {
        TAU * uniform_f64(rng)
    } else {
        0.0
    };
    run_protocol(&QpeaScheme::new(k_max, reference), phi_true, rng)
}

/// One hybrid run with `n_s = 2^k_max`; the reference is randomized.
pub fn run_hybrid<R: RngCore + ?Sized>(
    k_max: u32,
    phi_true: f64,
    rng: &mut R,
    mode: HybridMode,
) -> EstimateSample {
    SchemeConfig::hybrid(k_max, mode).run(phi_true, rng)
}

/// One run of the predetermined schedule `M(K,k) = m_k + mu*(K-k)`.
pub fn run_nonadaptive<R: RngCore + ?Sized>(
    k_max: u32,
    m_k: u32,
    mu: u32,
    phi_true: f64,
    rng: &mut R,
) -> EstimateSample {
    run_protocol(&NonAdaptiveScheme::new(k_max, m_k, mu), phi_true, rng)
}

/// One run with a constant repetition count at every multiplicity.
pub fn run_fixed_m<R: RngCore + ?Sized>(
    k_max: u32,
    m: u32,
    phi_true: f64,
    rng: &mut R,
) -> EstimateSample {
    run_protocol(&NonAdaptiveScheme::fixed_m(k_max, m), phi_true, rng)
}
