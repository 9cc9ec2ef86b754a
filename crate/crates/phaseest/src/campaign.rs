//! Parallel trial ensembles over scheme configurations.
//!
//! Every trial owns a `ChaCha8Rng` seeded from `(campaign seed, point
//! index, trial index)` through a splitmix64 finalizer, so the results are
//! independent of how rayon schedules the work.

use phaseest_core::angle::TAU;
use phaseest_core::bounds::{heisenberg_limit, hybrid_variance_bound, nonadaptive_vmax, sql};
use phaseest_core::schemes::{EstimateSample, SchemeConfig, SchemeKind};
use phaseest_core::stats::{holevo_std, HolevoSummary};
use phaseest_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// How the unknown phase is drawn for each trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PhiPolicy {
    /// Fresh uniform phase per trial (the default: the phase is unknown).
    UniformRandom,
    /// Fixed phase, randomized reference; equivalent by covariance for the
    /// reference-bearing schemes. Schemes without a reference phase fall
    /// back to a uniform phase.
    FixedWithRandomReference,
}

impl PhiPolicy {
    pub fn name(&self) -> &'static str {
        match self {
            PhiPolicy::UniformRandom => "uniform",
            PhiPolicy::FixedWithRandomReference => "fixed-ref",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "uniform" => Some(PhiPolicy::UniformRandom),
            "fixed-ref" => Some(PhiPolicy::FixedWithRandomReference),
            _ => None,
        }
    }
}

/// Phase used by [`PhiPolicy::FixedWithRandomReference`].
pub const FIXED_PHI: f64 = 1.0;

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(GOLDEN);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of the stream owned by one `(point, trial)` work item.
pub fn trial_seed(seed: u64, point: usize, trial: usize) -> u64 {
    let a = splitmix64(seed ^ splitmix64(point as u64));
    splitmix64(a ^ splitmix64(trial as u64))
}

fn run_one(cfg: &SchemeConfig, policy: PhiPolicy, stream: u64) -> EstimateSample {
    let mut rng = ChaCha8Rng::seed_from_u64(stream);
    let has_reference = matches!(cfg.kind, SchemeKind::Qpea | SchemeKind::Hybrid);
    match policy {
        PhiPolicy::FixedWithRandomReference if has_reference => {
            let mut cfg = *cfg;
            cfg.randomize_reference = true;
            cfg.run(FIXED_PHI, &mut rng)
        }
        _ => {
            let phi = TAU * rng.gen::<f64>();
            cfg.run(phi, &mut rng)
        }
    }
}

/// One ensemble of independent trials for a single configuration.
pub fn run_trials(
    cfg: &SchemeConfig,
    trials: usize,
    seed: u64,
    point: usize,
    policy: PhiPolicy,
) -> Vec<EstimateSample> {
    (0..trials)
        .into_par_iter()
        .map(|t| run_one(cfg, policy, trial_seed(seed, point, t)))
        .collect()
}

/// Aggregated statistics of one campaign point.
#[derive(Debug, Clone)]
pub struct CampaignRow {
    pub cfg: SchemeConfig,
    pub n_resources: u64,
    pub stats: HolevoSummary,
    pub sql: f64,
    pub heisenberg: f64,
    /// Analytic variance bound for the scheme, where one exists.
    pub v_bound: Option<f64>,
    /// `sqrt` of the variance bound, comparable to `holevo_std`.
    pub bound: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct CampaignSummary {
    pub rows: Vec<CampaignRow>,
}

fn attach_bound(cfg: &SchemeConfig) -> Option<(f64, f64)> {
    match cfg.kind {
        SchemeKind::Hybrid => {
            let n_q = (1u64 << (cfg.k_max + 1)) - 1;
            let report = hybrid_variance_bound(n_q, cfg.n_s as u64);
            Some((report.v_bound, report.delta_phi_bound))
        }
        SchemeKind::NonAdaptive | SchemeKind::FixedM => {
            let (k_max, m_k, mu) = (cfg.k_max, cfg.m_k, cfg.mu);
            let schedule = move |k: u32| (m_k + mu * (k_max - k)) as f64;
            let report = nonadaptive_vmax(k_max, &schedule);
            Some((report.v_bound, report.delta_phi_bound))
        }
        SchemeKind::Standard | SchemeKind::Qpea => None,
    }
}

/// Runs `trials` independent trials for every configuration and aggregates
/// the circular statistics, reference curves and matching analytic bounds.
/// Deterministic in `(cfg_list, trials, seed, policy)`.
pub fn run_campaign(
    cfg_list: &[SchemeConfig],
    trials: usize,
    seed: u64,
    policy: PhiPolicy,
) -> Result<CampaignSummary, Error> {
    let mut rows = Vec::with_capacity(cfg_list.len());
    for (point, cfg) in cfg_list.iter().enumerate() {
        cfg.validate()?;
        let samples = run_trials(cfg, trials, seed, point, policy);
        let stats = holevo_std(&samples)?;
        let n = cfg.total_resources();
        let (v_bound, bound) = match attach_bound(cfg) {
            Some((v, d)) => (Some(v), Some(d)),
            None => (None, None),
        };
        rows.push(CampaignRow {
            cfg: *cfg,
            n_resources: n,
            stats,
            sql: sql(n),
            heisenberg: heisenberg_limit(n),
            v_bound,
            bound,
        });
    }
    Ok(CampaignSummary { rows })
}
