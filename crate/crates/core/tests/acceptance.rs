//! Acceptance suite: every release gate in one place, one pass/fail line
//! per criterion (visible with `--nocapture`). Criterion 6's 200-seed
//! coverage check is in the slow suite; run it with
//! `cargo test -p wva-core --test acceptance -- --ignored`.

use std::time::Instant;

use wva_core::experiments::{
    fig2_reconstructed_settings, run_scenario, ScenarioSpec, REPORTED_VALIDITY_RATIOS,
};
use wva_core::fock_oracle::{weak_value_exact, weak_value_sum};
use wva_core::montecarlo::{
    estimate_shift_rejection, estimate_shift_weighted, with_default_eta, ShiftEstimate,
};
use wva_core::quadrature::{integrate, QuadOptions};
use wva_core::quantum::{
    quantum_shift, weak_value_coherent, BsMode, CoherentAmplitude, InterferometerParams,
};
use wva_core::stochastic::{
    clamp_engages_within, intensity_shift_exact, intensity_shift_quadrature,
    intensity_shift_vacuum, posterior_pdf, validity, NoisePrior, QUAD_WINDOW_SIGMAS,
};

fn amp(a: f64) -> CoherentAmplitude {
    CoherentAmplitude::new(a).unwrap()
}

fn report(criterion: &str, started: Instant, budget_s: f64, detail: &str) {
    let elapsed = started.elapsed().as_secs_f64();
    assert!(
        elapsed < budget_s,
        "{criterion}: runtime {elapsed:.2}s exceeds budget {budget_s}s"
    );
    println!("ACCEPTANCE {criterion}: PASS ({elapsed:.2}s) {detail}");
}

#[test]
fn criterion_1_vacuum_shift_equals_quantum_shift() {
    let started = Instant::now();
    let mut worst = 0.0f64;
    for i in 0..50 {
        let delta = 0.01 + (0.5 - 0.01) * i as f64 / 49.0;
        let gap = (intensity_shift_vacuum(delta).unwrap() - quantum_shift(delta).unwrap()).abs();
        worst = worst.max(gap);
    }
    assert!(worst <= 1e-12, "worst gap {worst}");
    report(
        "1 formula-equivalence",
        started,
        1.0,
        &format!("max |vacuum - quantum| = {worst:.2e} over 50 deltas"),
    );
}

#[test]
fn criterion_2_fock_oracle_validation() {
    let started = Instant::now();
    let cutoff = 40;
    let mut worst_first = 0.0f64;
    let mut worst_sum = 0.0f64;
    for &alpha in &[0.5, 1.0, 2.0] {
        for &delta in &[0.05, 0.1, 0.3, 0.5] {
            let formula = weak_value_coherent(amp(alpha), delta).unwrap();

            let w_first = weak_value_exact(amp(alpha), delta, BsMode::FirstOrder, cutoff).unwrap();
            worst_first = worst_first.max((w_first - formula).abs());
            assert!(
                (w_first - formula).abs() <= 1e-6,
                "first-order oracle vs formula at alpha={alpha}, delta={delta}"
            );

            let w_exact =
                weak_value_exact(amp(alpha), delta, BsMode::ExactUnitary, cutoff).unwrap();
            assert!(
                (w_exact - formula).abs() <= delta,
                "exact-unitary deviation beyond delta at alpha={alpha}, delta={delta}"
            );

            for mode in [BsMode::FirstOrder, BsMode::ExactUnitary] {
                let s = weak_value_sum(amp(alpha), delta, mode, cutoff).unwrap();
                worst_sum = worst_sum.max((s - (alpha * alpha + 1.0)).abs());
                assert!(
                    (s - (alpha * alpha + 1.0)).abs() <= 1e-6,
                    "sum rule at alpha={alpha}, delta={delta}, mode={mode:?}"
                );
            }
        }
    }
    report(
        "2 fock-oracle",
        started,
        30.0,
        &format!("max first-order gap {worst_first:.2e}, max sum-rule gap {worst_sum:.2e}"),
    );
}

#[test]
fn criterion_3_posterior_normalization_and_closed_form_exactness() {
    let started = Instant::now();
    let deltas = [0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 1.0];
    let e0s = [2.0, 5.0, 10.0, 20.0, 50.0, 100.0];
    let sigmas = [0.1, 0.25, 0.5, 1.0, 2.0];
    let mut worst_norm = 0.0f64;
    let mut worst_rel = 0.0f64;
    for mode in [BsMode::FirstOrder, BsMode::ExactUnitary] {
        for &delta in &deltas {
            for &e0 in &e0s {
                for &sigma in &sigmas {
                    let params = InterferometerParams::new(delta, mode).unwrap();
                    let prior = NoisePrior::new(e0, sigma).unwrap();

                    let half = QUAD_WINDOW_SIGMAS * sigma;
                    let total = integrate(
                        |e| posterior_pdf(e, &params, &prior).unwrap(),
                        prior.mean_e1() - half,
                        prior.mean_e1() + half,
                        &QuadOptions::default(),
                    )
                    .unwrap()
                    .value;
                    worst_norm = worst_norm.max((total - 1.0).abs());
                    assert!(
                        (total - 1.0).abs() <= 1e-8,
                        "posterior norm {total} at delta={delta}, e0={e0}, sigma={sigma}, {mode:?}"
                    );

                    let exact = intensity_shift_exact(&params, &prior).unwrap();
                    let quad = intensity_shift_quadrature(&params, &prior).unwrap();
                    let rel = (exact - quad).abs() / exact.abs();
                    worst_rel = worst_rel.max(rel);
                    assert!(
                        rel <= 1e-6,
                        "quadrature vs closed form rel {rel} at delta={delta}, e0={e0}, sigma={sigma}, {mode:?}"
                    );

                    // The closed form is exact only while the likelihood
                    // clamp is inactive; verify it never engages under the
                    // default efficiency.
                    let mc_params = with_default_eta(params, &prior);
                    assert!(
                        !clamp_engages_within(&mc_params, &prior, QUAD_WINDOW_SIGMAS),
                        "clamp engages at delta={delta}, e0={e0}, sigma={sigma}, {mode:?}"
                    );
                }
            }
        }
    }
    report(
        "3 posterior-exactness",
        started,
        60.0,
        &format!(
            "420 grid points: max |norm-1| = {worst_norm:.2e}, max rel gap = {worst_rel:.2e}, clamp inactive"
        ),
    );
}

#[test]
fn criterion_4_validity_regime_convergence() {
    let started = Instant::now();
    let params = InterferometerParams::new(0.1, BsMode::FirstOrder).unwrap();
    let dq = quantum_shift(0.1).unwrap();
    let n = 20;
    let mut deviations = Vec::with_capacity(n);
    for i in 0..n {
        // delta^2 alpha^2 log-spaced over [1, 100].
        let intensity = 10f64.powf(2.0 * i as f64 / (n - 1) as f64);
        let e0 = intensity.sqrt() / 0.1;
        let prior = NoisePrior::new(e0, 0.5).unwrap();
        let d = intensity_shift_exact(&params, &prior).unwrap();
        deviations.push((intensity, (d - dq).abs() / dq));
    }
    let first = deviations.first().unwrap().1;
    let last = deviations.last().unwrap().1;
    assert!(first > 0.10, "deviation at intensity 1 is {first}");
    assert!(last < 0.01, "deviation at intensity 100 is {last}");
    for pair in deviations.windows(2) {
        assert!(
            pair[1].1 <= pair[0].1 + 1e-12,
            "deviation not monotone: {pair:?}"
        );
    }
    report(
        "4 validity-convergence",
        started,
        10.0,
        &format!("deviation {first:.3} at intensity 1 -> {last:.5} at 100, monotone"),
    );
}

#[test]
fn criterion_5_base_shift_at_full_imbalance() {
    let started = Instant::now();
    let params = InterferometerParams::new(1.0, BsMode::ExactUnitary).unwrap();
    let prior = NoisePrior::new(10.0, 0.5).unwrap();
    let d = intensity_shift_quadrature(&params, &prior).unwrap();
    assert!((d - 0.5).abs() <= 0.02, "base shift {d}");
    report(
        "5 base-shift",
        started,
        1.0,
        &format!("quadrature D_I(1) = {d:.6}"),
    );
}

fn reference_setting() -> (InterferometerParams, NoisePrior) {
    let prior = NoisePrior::new(10.0, 0.5).unwrap();
    let params = with_default_eta(
        InterferometerParams::new(0.1, BsMode::FirstOrder).unwrap(),
        &prior,
    );
    (params, prior)
}

#[test]
fn criterion_6_monte_carlo_consistency() {
    let started = Instant::now();
    let (params, prior) = reference_setting();
    let truth = intensity_shift_quadrature(&params, &prior).unwrap();
    let n = 1_000_000;

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap();
    let single_thread_start = Instant::now();
    let (rej, wei) = pool.install(|| {
        (
            estimate_shift_rejection(&params, &prior, n, 2024).unwrap(),
            estimate_shift_weighted(&params, &prior, n, 2024).unwrap(),
        )
    });
    let single_thread = single_thread_start.elapsed().as_secs_f64();
    assert!(
        single_thread < 60.0,
        "single-thread estimators took {single_thread:.1}s"
    );

    assert!(
        (rej.value - truth).abs() < 3.0 * rej.stderr,
        "rejection {} +/- {} vs {truth}",
        rej.value,
        rej.stderr
    );
    assert!(
        (wei.value - truth).abs() < 3.0 * wei.stderr,
        "weighted {} +/- {} vs {truth}",
        wei.value,
        wei.stderr
    );
    assert!(
        wei.stderr < rej.stderr,
        "weighted stderr {} not below rejection {}",
        wei.stderr,
        rej.stderr
    );
    report(
        "6 monte-carlo",
        started,
        60.0,
        &format!(
            "rejection {:.4}+/-{:.4}, weighted {:.4}+/-{:.4}, quadrature {truth:.4}, single-thread {single_thread:.2}s",
            rej.value, rej.stderr, wei.value, wei.stderr
        ),
    );
}

#[test]
#[ignore = "slow suite (~1 min): 200-seed coverage check; run with --ignored"]
fn criterion_6_coverage_over_seeds() {
    let started = Instant::now();
    let (params, prior) = reference_setting();
    let truth = intensity_shift_quadrature(&params, &prior).unwrap();
    let n = 1_000_000;
    let seeds = 200u64;
    let mut covered_rej = 0u32;
    let mut covered_wei = 0u32;
    for seed in 0..seeds {
        let rej = estimate_shift_rejection(&params, &prior, n, seed).unwrap();
        if (rej.value - truth).abs() <= 1.96 * rej.stderr {
            covered_rej += 1;
        }
        let wei = estimate_shift_weighted(&params, &prior, n, seed).unwrap();
        if (wei.value - truth).abs() <= 1.96 * wei.stderr {
            covered_wei += 1;
        }
    }
    let cov_r = f64::from(covered_rej) / seeds as f64;
    let cov_w = f64::from(covered_wei) / seeds as f64;
    assert!(
        (0.90..=0.99).contains(&cov_r),
        "rejection coverage {cov_r}"
    );
    assert!(
        (0.90..=0.99).contains(&cov_w),
        "weighted coverage {cov_w}"
    );
    report(
        "6 coverage",
        started,
        1800.0,
        &format!("rejection {cov_r:.3}, weighted {cov_w:.3} over {seeds} seeds"),
    );
}

#[test]
fn criterion_7_reported_validity_ratios() {
    let started = Instant::now();
    let settings = fig2_reconstructed_settings();
    assert_eq!(settings.len(), 5);
    let mut worst = 0.0f64;
    for ((delta, alpha), &expected) in settings.iter().zip(REPORTED_VALIDITY_RATIOS.iter()) {
        let params = InterferometerParams::new(*delta, BsMode::FirstOrder).unwrap();
        let prior = NoisePrior::new(*alpha, 0.5).unwrap();
        let ratio = validity(&params, &prior).ratio;
        worst = worst.max((ratio - expected).abs());
        assert!(
            (ratio - expected).abs() <= 0.005,
            "ratio {ratio} vs reported {expected}"
        );
    }
    report(
        "7 validity-ratios",
        started,
        1.0,
        &format!("max |ratio - reported| = {worst:.2e}"),
    );
}

#[test]
fn criterion_8_determinism_across_workers() {
    let started = Instant::now();
    let (params, prior) = reference_setting();

    let serialize = |est: &ShiftEstimate| serde_json::to_string(est).unwrap();
    let scenario_text = r#"
        name = "determinism"
        bs_mode = "first-order"
        deltas = [0.1, 0.3]
        e0s = [10.0]
        sigmas = [0.5]
        methods = ["quantum", "exact", "quadrature", "mc"]

        [mc]
        n_trials = 120000
        seed = 77
        estimator = "weighted"
    "#;
    let spec = ScenarioSpec::from_toml_str(scenario_text).unwrap();

    let mut estimate_bytes = Vec::new();
    let mut csv_bytes = Vec::new();
    for workers in [1usize, 2, 8] {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .unwrap();
        let (rej, wei, csv) = pool.install(|| {
            let rej = estimate_shift_rejection(&params, &prior, 200_000, 7).unwrap();
            let wei = estimate_shift_weighted(&params, &prior, 200_000, 7).unwrap();
            let csv = run_scenario(&spec).unwrap().rows_to_csv(9);
            (rej, wei, csv)
        });
        estimate_bytes.push((serialize(&rej), serialize(&wei)));
        csv_bytes.push(csv);
        // Rerunning in the same pool is also byte-identical.
        let again = pool.install(|| estimate_shift_rejection(&params, &prior, 200_000, 7).unwrap());
        assert_eq!(serialize(&again), estimate_bytes.last().unwrap().0);
    }
    assert!(estimate_bytes.windows(2).all(|w| w[0] == w[1]));
    assert!(csv_bytes.windows(2).all(|w| w[0] == w[1]));
    report(
        "8 determinism",
        started,
        60.0,
        "estimates and sweep CSV byte-identical across worker counts {1, 2, 8}",
    );
}
