//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured values. All criteria run the desk-scale setup
//! (d = 1, N = 256, h = 2^-1 .. 2^-8).
//!
//! Known limitation, kept honest rather than tuned away: criterion 6's
//! sup-variation bound fails at this resolution because the truncated
//! frequency grid deflates resolvent norms once 1/h^m exceeds the grid's
//! symbol range (~(N/2)^m); see README "Known limitations". The slope
//! sub-checks pass.

use psical::config::ExperimentConfig;
use psical::experiments;
use psical::report::ExperimentReport;
use std::path::PathBuf;

fn default_config() -> ExperimentConfig {
    ExperimentConfig::parse(
        "grid.d = 1\n\
         grid.N = 256\n\
         grid.h_pow_min = 1\n\
         grid.h_pow_max = 8\n\
         symbol.name = perturbed\n\
         symbol.m = 1\n\
         symbol.eps = 0.3\n\
         spectral.lambda = 0+1i\n\
         contour.nodes = 64\n\
         norms.trials = 5\n\
         run.seed = 0\n",
    )
    .expect("default config parses")
}

fn out_dir(tag: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(format!("acceptance_{tag}"));
    std::fs::create_dir_all(&dir).expect("create output dir");
    dir
}

fn print_verdict(criterion: &str, report: &ExperimentReport, names: &[&str]) -> bool {
    let mut all_ok = true;
    for name in names {
        let ok = *report.checks.get(*name).unwrap_or_else(|| {
            panic!("check '{name}' missing from {} report", report.experiment)
        });
        let metric = report
            .metrics
            .get(*name)
            .or_else(|| report.metrics.get(&name.replace("slope_", "level_slope_")))
            .map(|v| format!(" (measured {v:.6e})"))
            .unwrap_or_default();
        println!("{criterion} [{}] {name}{metric}", if ok { "PASS" } else { "FAIL" });
        all_ok &= ok;
    }
    all_ok
}

#[test]
fn criterion01_blowup_identities() {
    let rep = experiments::run_weights(&default_config(), &out_dir("c01")).unwrap();
    let ok = print_verdict("criterion 01", &rep, &["ratios_in_band", "ratios_equal"]);
    println!(
        "criterion 01 ratios in [{:.12}, {:.12}], max |r_h - r_inf| = {:.3e}",
        rep.metrics["ratio_min"], rep.metrics["ratio_max"], rep.metrics["equality_gap"]
    );
    assert!(ok, "blow-up identities failed");
}

#[test]
fn criterion02_quantization_scaling_identity() {
    let rep = experiments::run_quantize_check(&default_config(), &out_dir("c02")).unwrap();
    let ok = print_verdict("criterion 02", &rep, &["scaling_identity"]);
    println!(
        "criterion 02 worst relative Frobenius error = {:.3e} (tolerance 1e-12)",
        rep.metrics["scaling_identity_worst"]
    );
    assert!(ok, "scaling identity failed");
}

#[test]
fn criterion03_order_bookkeeping() {
    let rep = experiments::run_orders(&default_config(), &out_dir("c03")).unwrap();
    let ok = print_verdict("criterion 03", &rep, &["monomial_fits", "classical_membership"]);
    println!(
        "criterion 03 worst monomial fit error = {:.4} (tolerance 0.1)",
        rep.metrics["fit_worst_error"]
    );
    assert!(ok, "order bookkeeping failed");
}

#[test]
fn criterion04_differential_composition_exactness() {
    let rep = experiments::run_compose(&default_config(), &out_dir("c04")).unwrap();
    let ok = print_verdict("criterion 04", &rep, &["differential_composition_exact"]);
    println!(
        "criterion 04 worst relative error = {:.3e} (tolerance 1e-10)",
        rep.metrics["compose_exactness_worst"]
    );
    assert!(ok, "differential composition exactness failed");
}

#[test]
fn criterion05_parametrix_correction() {
    let rep = experiments::run_parametrix(&default_config(), &out_dir("c05")).unwrap();
    let ok = print_verdict(
        "criterion 05",
        &rep,
        &[
            "iterate_slope_J1",
            "iterate_slope_J2",
            "iterate_slope_J3",
            "exact_solve_residual",
            "contraction_window_nonempty",
        ],
    );
    println!(
        "criterion 05 slopes J=1..3: {:.3}, {:.3}, {:.3}; exact-solve residual {:.3e}",
        rep.metrics["iterate_slope_J1"],
        rep.metrics["iterate_slope_J2"],
        rep.metrics["iterate_slope_J3"],
        rep.metrics["exact_solve_residual"]
    );
    assert!(ok, "parametrix correction failed");
}

#[test]
fn criterion06_resolvent_slopes() {
    let rep = experiments::run_resolvent(&default_config(), &out_dir("c06a")).unwrap();
    let ok = print_verdict("criterion 06", &rep, &["slope_m1", "slope_m2"]);
    println!(
        "criterion 06 slopes: m=1 -> {:.4}, m=2 -> {:.4} (targets 1.00, 2.00 +/- 0.1)",
        rep.metrics["level_slope_m1"], rep.metrics["level_slope_m2"]
    );
    assert!(ok, "resolvent decay slopes failed");
}

#[test]
fn criterion06_resolvent_sup_variation() {
    // Fails at this resolution: once 1/h exceeds the grid's largest symbol
    // value, the truncated resolvent norm deflates instead of plateauing.
    // The uniform bound itself holds on the resolved sub-grid h >= 2/N.
    let rep = experiments::run_resolvent(&default_config(), &out_dir("c06b")).unwrap();
    let ok = print_verdict("criterion 06", &rep, &["bounded_variation_m1"]);
    println!(
        "criterion 06 sup-variation m=1: {:.4} (bound 2.0); m=2: {:.4} (reported); \
         the bound holds for h >= 2/N - see README known limitations",
        rep.metrics["bounded_variation_m1"], rep.metrics["bounded_variation_m2"]
    );
    assert!(
        ok,
        "sup-variation {:.4} exceeds 2.0: frequency truncation deflates the norm once \
         h^-m exceeds the grid's symbol range; uniform boundedness requires h >= 2/N \
         (documented limitation)",
        rep.metrics["bounded_variation_m1"]
    );
}

#[test]
fn criterion07_interpolation_slopes() {
    let rep = experiments::run_interp(&default_config(), &out_dir("c07")).unwrap();
    let ok = print_verdict(
        "criterion 07",
        &rep,
        &[
            "slope_t0",
            "slope_t1",
            "slope_t2",
            "oracle_agreement_t0",
            "oracle_agreement_t1",
            "oracle_agreement_t2",
        ],
    );
    println!(
        "criterion 07 slopes t=0,1,2: {:.4}, {:.4}, {:.4} (targets -1, -0.5, 0 +/- 0.05)",
        rep.metrics["slope_t0"], rep.metrics["slope_t1"], rep.metrics["slope_t2"]
    );
    assert!(ok, "interpolation slopes failed");
}

#[test]
fn criterion08_functional_calculus() {
    let rep = experiments::run_power(&default_config(), &out_dir("c08")).unwrap();
    let ok = print_verdict(
        "criterion 08",
        &rep,
        &[
            "shifted_laplacian_oracle",
            "shifted_laplacian_semigroup",
            "shifted_laplacian_inverse",
            "symmetrized_bracket_oracle",
            "symmetrized_bracket_semigroup",
            "symmetrized_bracket_inverse",
        ],
    );
    println!(
        "criterion 08 vs eigen oracle: {:.3e} / {:.3e} (tolerance 1e-8); \
         semigroup: {:.3e} / {:.3e} (tolerance 1e-6)",
        rep.metrics["shifted_laplacian_vs_oracle"],
        rep.metrics["symmetrized_bracket_vs_oracle"],
        rep.metrics["shifted_laplacian_semigroup"],
        rep.metrics["symmetrized_bracket_semigroup"]
    );
    println!(
        "criterion 08 note: uniform-node ellipse at 64 nodes reaches only {:.3e} / {:.3e} \
         on these spectra; the default contour places its 64 nodes conformally",
        rep.metrics["shifted_laplacian_uniform_ellipse"],
        rep.metrics["symmetrized_bracket_uniform_ellipse"]
    );
    assert!(ok, "functional calculus failed");
}

#[test]
fn criterion09_normal_operator() {
    let rep = experiments::run_resolvent(&default_config(), &out_dir("c09")).unwrap();
    let ok = print_verdict(
        "criterion 09",
        &rep,
        &[
            "normal_residual_slope",
            "fully_elliptic_spectral_family",
            "not_fully_elliptic_real_zero",
        ],
    );
    println!(
        "criterion 09 normal-residual slope {:.4} (target 1.0 +/- 0.1); \
         spectral-family margin {:.3}, normal margin {:.3}; real-zero margin {:.3e}",
        rep.metrics["normal_residual_slope"],
        rep.metrics["spectral_family_margin"],
        rep.metrics["spectral_family_normal_margin"],
        rep.metrics["real_zero_margin"]
    );
    assert!(ok, "normal operator checks failed");
}

#[test]
fn criterion10_sobolev_identification() {
    let rep = experiments::run_norms(&default_config(), &out_dir("c10")).unwrap();
    let ok = print_verdict("criterion 10", &rep, &["norm_equivalence_band"]);
    println!(
        "criterion 10 worst band excess = {:.3e} (slack 1e-12)",
        rep.metrics["band_excess"]
    );
    assert!(ok, "Sobolev identification failed");
}
