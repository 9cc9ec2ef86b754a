//! End-to-end acceptance gate: one test per headline claim, each printing a
//! PASS/FAIL line (run with `--nocapture` to see them on success).

use phaseest::campaign::{run_campaign, CampaignRow, PhiPolicy};
use phaseest_core::angle::TAU;
use phaseest_core::bounds::{nonadaptive_vmax, proven_schedule_overhead, proven_schedule_vmax_cap, PROVEN_MU};
use phaseest_core::measurement::{likelihood, sample_outcome, MeasurementSetting, Outcome};
use phaseest_core::oracle::{fejer_kernel, qpea_error_density};
use phaseest_core::schemes::SchemeConfig;
use rand::distributions::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::sync::OnceLock;
use std::time::Instant;

fn report(name: &str, pass: bool, detail: &str) {
    println!("criterion {name}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
    assert!(pass, "criterion {name} failed: {detail}");
}

/// Nonadaptive rows (M_K=2, mu=3) for K=3..=8, 10^4 trials each.
fn nonadaptive_rows() -> &'static Vec<CampaignRow> {
    static ROWS: OnceLock<Vec<CampaignRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        let cfgs: Vec<SchemeConfig> = (3..=8).map(|k| SchemeConfig::nonadaptive(k, 2, 3)).collect();
        run_campaign(&cfgs, 10_000, 41, PhiPolicy::UniformRandom)
            .unwrap()
            .rows
    })
}

/// Hybrid rows for K=1..=8, 10^5 trials at K=1 tapering to 10^4.
fn hybrid_rows() -> &'static Vec<CampaignRow> {
    static ROWS: OnceLock<Vec<CampaignRow>> = OnceLock::new();
    ROWS.get_or_init(|| {
        (1u32..=8)
            .map(|k| {
                let trials = (100_000usize >> (k - 1)).max(10_000);
                let cfg = SchemeConfig::hybrid(k, phaseest_core::schemes::HybridMode::Bayesian);
                run_campaign(&[cfg], trials, 900 + k as u64, PhiPolicy::UniformRandom)
                    .unwrap()
                    .rows
                    .remove(0)
            })
            .collect()
    })
}

#[test]
fn criterion_1_nonadaptive_heisenberg_scaling() {
    let start = Instant::now();
    let rows = nonadaptive_rows();
    let mut worst = (0.0f64, 0u64);
    let mut in_band = true;
    for row in rows {
        let overhead = row.stats.holevo_std * row.n_resources as f64 / PI;
        if !(1.5..=2.3).contains(&overhead) {
            in_band = false;
        }
        if overhead > worst.0 {
            worst = (overhead, row.n_resources);
        }
    }
    let last = rows.iter().find(|r| r.n_resources == 297).unwrap();
    let at_297 = last.stats.holevo_std * 297.0 / PI;
    let anchored = (at_297 / 1.91 - 1.0).abs() <= 0.10;
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "1",
        in_band && anchored && elapsed < 120.0,
        &format!(
            "overhead in [1.5,2.3] for K=3..8 (worst {:.3} at N={}), {:.3} at N=297 vs 1.91, {elapsed:.1}s",
            worst.0, worst.1, at_297
        ),
    );
}

#[test]
fn criterion_2_hybrid_scaling_constants() {
    let start = Instant::now();
    let rows = hybrid_rows();
    let mut detail = String::new();
    let mut pass = true;
    for (row, target) in [(&rows[0], 4.83), (&rows[7], 6.17)] {
        let scale = (row.n_resources as f64).powf(1.5);
        let got = row.stats.v_holevo * scale;
        let tol = 4.0 * row.stats.mc_stderr_v * scale;
        if (got - target).abs() > tol {
            pass = false;
        }
        detail.push_str(&format!(
            "N={}: V_H*N^1.5 = {got:.3} vs {target} (tol {tol:.3}); ",
            row.n_resources
        ));
    }
    let elapsed = start.elapsed().as_secs_f64();
    detail.push_str(&format!("{elapsed:.1}s"));
    report("2", pass && elapsed < 300.0, &detail);
}

#[test]
fn criterion_3_digit_scheme_sql_scaling() {
    // Delta_phi * sqrt(N) neither escapes a factor-1.5 band nor trends down
    let cfgs: Vec<SchemeConfig> = (1..=8).map(|k| SchemeConfig::qpea(k, true)).collect();
    let rows = run_campaign(&cfgs, 10_000, 57, PhiPolicy::UniformRandom)
        .unwrap()
        .rows;
    let scaled: Vec<f64> = rows
        .iter()
        .map(|r| r.stats.holevo_std * (r.n_resources as f64).sqrt())
        .collect();
    let (lo, hi) = scaled
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let band_ok = hi / lo <= 1.5;

    // least-squares slope of ln(scaled) against ln(N)
    let xs: Vec<f64> = rows.iter().map(|r| (r.n_resources as f64).ln()).collect();
    let ys: Vec<f64> = scaled.iter().map(|s| s.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    report(
        "3",
        band_ok && slope >= -0.1,
        &format!("band ratio {:.3} (<= 1.5), log-log slope {slope:.4} (>= -0.1)", hi / lo),
    );
}

#[test]
fn criterion_4_fixed_m_variance_floor() {
    let mut detail = String::new();
    let mut pass = true;
    for m in 1u32..=3 {
        let cfgs = [SchemeConfig::fixed_m(7, m), SchemeConfig::fixed_m(10, m)];
        let rows = run_campaign(&cfgs, 10_000, 70 + m as u64, PhiPolicy::UniformRandom)
            .unwrap()
            .rows;
        let ratio = rows[1].stats.holevo_std / rows[0].stats.holevo_std;
        if (ratio - 1.0).abs() > 0.2 {
            pass = false;
        }
        detail.push_str(&format!("M={m}: K10/K7 = {ratio:.3}; "));
    }
    report("4", pass, detail.trim_end_matches("; "));
}

#[test]
fn criterion_5_enumerated_error_density_matches_kernel() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for k_max in 0..=4u32 {
        let n_q = (1u64 << (k_max + 1)) - 1;
        for i in 0..512 {
            let d = TAU * (i as f64 + 0.5) / 512.0;
            worst = worst.max((qpea_error_density(k_max, d) - fejer_kernel(d, n_q)).abs());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    report(
        "5",
        worst < 1e-6 && elapsed < 10.0,
        &format!("Linf = {worst:.2e} over K=0..4, {elapsed:.2}s"),
    );
}

#[test]
fn criterion_6_bound_dominance() {
    let mut pass = true;
    let mut worst_margin = f64::INFINITY;
    for row in nonadaptive_rows().iter().chain(hybrid_rows()) {
        let bound = row.v_bound.expect("bound attached");
        let margin = bound + 5.0 * row.stats.mc_stderr_v - row.stats.v_small_angle;
        worst_margin = worst_margin.min(margin / bound);
        if margin < 0.0 {
            pass = false;
        }
    }
    report(
        "6",
        pass,
        &format!("V <= bound + 5 stderr at all campaign points; tightest relative margin {worst_margin:.3}"),
    );
}

#[test]
fn criterion_7_proven_schedule_bound() {
    // closed-form cap dominates the exact exponential sums
    let mut worst_slack = f64::INFINITY;
    let mut pass = true;
    for k_max in 0..=30u32 {
        for m_k in 1..=40u32 {
            let schedule = move |k: u32| m_k as f64 + PROVEN_MU * (k_max - k) as f64;
            let exact: f64 = nonadaptive_vmax(k_max, &schedule)
                .components
                .iter()
                .map(|(_, v)| v)
                .sum();
            let cap = proven_schedule_vmax_cap(m_k, k_max);
            let slack = cap - exact;
            worst_slack = worst_slack.min(slack);
            if exact > cap + 1e-12 {
                pass = false;
            }
        }
    }
    let overhead = proven_schedule_overhead(23, 25);
    let anchored = (overhead / 54.0 - 1.0).abs() <= 0.15;
    report(
        "7",
        pass && anchored,
        &format!("min cap slack {worst_slack:.2e} over K<=30, M_K<=40; overhead(23) = {overhead:.3} vs ~54"),
    );
}

/// Tail frequency of |nu - P| >= eps over `batches` simulated frequency
/// estimates of `n` single-pass measurements at Theta = 0.
fn empirical_tail_direct(n: u64, eps: f64, batches: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let setting = MeasurementSetting::new(1, 0.0);
    let phi = 1.0;
    let p0 = likelihood(Outcome::U0, phi, &setting);
    let mut hits = 0usize;
    for _ in 0..batches {
        let mut zeros = 0u64;
        for _ in 0..n {
            if sample_outcome(phi, &setting, &mut rng) == Outcome::U0 {
                zeros += 1;
            }
        }
        if (zeros as f64 / n as f64 - p0).abs() >= eps {
            hits += 1;
        }
    }
    hits as f64 / batches as f64
}

/// Same tail via binomial sampling (identical distribution, faster).
fn empirical_tail_binomial(n: u64, eps: f64, batches: usize, seed: u64) -> f64 {
    let phi: f64 = 1.0;
    let p0 = likelihood(Outcome::U0, phi, &MeasurementSetting::new(1, 0.0));
    let binom = rand_distr::Binomial::new(n, p0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..batches {
        let zeros = binom.sample(&mut rng);
        if (zeros as f64 / n as f64 - p0).abs() >= eps {
            hits += 1;
        }
    }
    hits as f64 / batches as f64
}

#[test]
fn criterion_8_property_suites_and_tail_bounds() {
    // the likelihood/posterior/covariance/oracle property suites run as
    // their own test targets; this checks the concentration bound itself
    let start = Instant::now();
    let batches = 100_000;
    let cases = [
        (100u64, 0.1, empirical_tail_direct(100, 0.1, batches, 81)),
        (1_000, 0.05, empirical_tail_binomial(1_000, 0.05, batches, 82)),
        (10_000, 0.05, empirical_tail_binomial(10_000, 0.05, batches, 83)),
    ];
    let mut pass = true;
    let mut detail = String::new();
    for (n, eps, freq) in cases {
        let bound = phaseest_core::bounds::chernoff_tail(n, eps);
        if freq > bound {
            pass = false;
        }
        detail.push_str(&format!("N={n}: tail {freq:.2e} <= {bound:.2e}; "));
    }
    let elapsed = start.elapsed().as_secs_f64();
    detail.push_str(&format!("{elapsed:.1}s"));
    report("8", pass && elapsed < 60.0, &detail);
}
