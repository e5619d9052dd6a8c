//! Config-driven experiments behind the `psical` binary.
//!
//! Each experiment runs one verification campaign, writes per-point CSV data
//! plus a JSON verdict block into the output directory, and returns the
//! report. Identical configs produce byte-identical CSV output.

use crate::calculus::{
    compose_asymptotic, compose_exact, neumann_correct, parametrix_symbol, remainder_decay,
    NeumannMode,
};
use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::geometry::{boundary_weights, equivalence_ratios, PhasePoint};
use crate::linalg::{loglog_slope, sigma_max, CMatrix};
use crate::orders::{classical_membership, resolve_orders, ClassicalOrders, Orders};
use crate::quantize::{assemble, assemble_semiclassical, rel_frobenius, scale_symbol, symmetrize,
    GridSpec, OperatorMatrix, StateVector};
use crate::report::{fmt_f64, CsvWriter, ExperimentReport};
use crate::sobolev::{classical_triple, norm as sobolev_norm, SobolevTriple};
use crate::spectral::{
    complex_power, eigen_oracle_power, spectral_family, verify_interpolation,
    verify_resolvent_bounds, ContourSpec, SpectralParameter,
};
use crate::symbols::{
    fit_orders, is_fully_elliptic, library, EllipticityConfig, SampleGrid, SymbolFamily,
};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::path::Path;

/// Tolerances the default experiment configs pin.
pub mod tolerances {
    /// Blow-up identity band `[1, sqrt 2]` and equality slack.
    pub const RATIO_EQUALITY: f64 = 1e-12;
    /// Scaling identity, relative Frobenius.
    pub const SCALING_IDENTITY: f64 = 1e-12;
    /// Order regression slack per slot.
    pub const ORDER_FIT: f64 = 0.1;
    /// Differential-composition exactness, relative Frobenius.
    pub const COMPOSE_EXACTNESS: f64 = 1e-10;
    /// Parametrix slope slack: slope >= J - this.
    pub const SLOPE_SLACK: f64 = 0.2;
    /// Exact-solve residual bound.
    pub const EXACT_SOLVE_RESIDUAL: f64 = 1e-10;
    /// Resolvent slope slack around the order m.
    pub const RESOLVENT_SLOPE: f64 = 0.1;
    /// Allowed max/min variation of the bounded resolvent norms.
    pub const RESOLVENT_VARIATION: f64 = 2.0;
    /// Interpolation slope slack.
    pub const INTERP_SLOPE: f64 = 0.05;
    /// Interpolation matrix-vs-oracle agreement.
    pub const INTERP_ORACLE: f64 = 1e-9;
    /// Functional calculus vs eigendecomposition oracle, entrywise.
    pub const POWER_ORACLE: f64 = 1e-8;
    /// Semigroup property, relative Frobenius.
    pub const POWER_SEMIGROUP: f64 = 1e-6;
    /// Sobolev norm-equivalence band slack.
    pub const NORM_BAND: f64 = 1e-12;
}

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn grid_from_config(cfg: &ExperimentConfig) -> Result<GridSpec> {
    let n = cfg.usize_or("grid.N", 256)?;
    if n % 2 != 0 {
        return Err(Error::Config(format!("grid.N = {n} must be even")));
    }
    GridSpec::new(cfg.usize_or("grid.d", 1)?, n, cfg.h_grid()?)
}

fn symbol_from_config(cfg: &ExperimentConfig, dim: usize) -> Result<SymbolFamily> {
    let name = cfg.str_or("symbol.name", "perturbed");
    let params = library::SymbolParams {
        m: Some(cfg.f64_or("symbol.m", 1.0)?),
        k: cfg.get("symbol.k").map(|v| v.parse()).transpose().map_err(|_| {
            Error::Config("symbol.k must be a number".into())
        })?,
        eps: Some(cfg.f64_or("symbol.eps", 0.3)?),
    };
    library::by_name(name, dim, params)
}

/// Blow-up identities on the default sample grid.
pub fn run_weights(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("weights", cfg.entries().clone());
    let dim = cfg.usize_or("grid.d", 1)?;
    if !(dim == 1 || dim == 2) {
        return Err(Error::Config(format!("grid.d = {dim} not in {{1, 2}}")));
    }
    let g = SampleGrid::default_for_dim(dim);
    let mut csv = CsvWriter::create(
        out,
        "weights",
        &["h", "zeta", "rho_inf", "rho_h_inf", "rho_h_ff", "rho_h_0", "ratio_h", "ratio_inf"],
    )?;
    let mut ratio_min = f64::INFINITY;
    let mut ratio_max = 0.0f64;
    let mut equality_gap = 0.0f64;
    for r in 0..g.rays.len() {
        for i in 0..g.radii.len() {
            for &h in &g.hs {
                let zeta = g.zeta_at(r, i);
                let p = PhasePoint::new(&zeta, h)?;
                let w = boundary_weights(&p);
                let (rh, rinf) = equivalence_ratios(&p)?;
                ratio_min = ratio_min.min(rh.min(rinf));
                ratio_max = ratio_max.max(rh.max(rinf));
                equality_gap = equality_gap.max((rh - rinf).abs());
                csv.row(&[
                    fmt_f64(h),
                    fmt_f64(zeta[0]),
                    fmt_f64(w.rho_inf),
                    fmt_f64(w.rho_h_inf),
                    fmt_f64(w.rho_h_ff),
                    fmt_f64(w.rho_h_0),
                    fmt_f64(rh),
                    fmt_f64(rinf),
                ])?;
            }
        }
    }
    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.metric("ratio_min", ratio_min);
    report.metric("ratio_max", ratio_max);
    report.metric("equality_gap", equality_gap);
    report.check("ratios_in_band", ratio_min >= 1.0 - tolerances::RATIO_EQUALITY
        && ratio_max <= SQRT2 + tolerances::RATIO_EQUALITY);
    report.check("ratios_equal", equality_gap <= tolerances::RATIO_EQUALITY);
    report.write_json(out)?;
    Ok(report)
}

/// Order bookkeeping: regression on monomials and the embedding exponents.
pub fn run_orders(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("orders", cfg.entries().clone());
    let g = SampleGrid::default_for_dim(1);
    let mut csv = CsvWriter::create(
        out,
        "orders",
        &["m", "k", "fit_m", "fit_l", "fit_k", "residual", "condition"],
    )?;
    let mut worst = 0.0f64;
    for m in 0..=2 {
        for k in 0..=2 {
            let sym = library::monomial(1, m as f64, k as f64);
            let fit = fit_orders(&sym, &g)?;
            let target = resolve_orders(ClassicalOrders::new(m as f64, k as f64));
            worst = worst
                .max((fit.orders.m - target.m).abs())
                .max((fit.orders.l - target.l).abs())
                .max((fit.orders.k - target.k).abs());
            csv.row(&[
                m.to_string(),
                k.to_string(),
                fmt_f64(fit.orders.m),
                fmt_f64(fit.orders.l),
                fmt_f64(fit.orders.k),
                fmt_f64(fit.residual),
                fmt_f64(fit.condition),
            ])?;
        }
    }
    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.metric("fit_worst_error", worst);
    report.check("monomial_fits", worst <= tolerances::ORDER_FIT);

    // the double membership of the order -m resolvent classes
    let mut membership_ok = true;
    for m in [1.0, 2.0] {
        let o = Orders::new(-m, -m, -m);
        membership_ok &= classical_membership(o, 0.0)? == -m;
        membership_ok &= classical_membership(o, -m)? == 0.0;
    }
    for m in 0..=2 {
        for k in 0..=2 {
            let o = resolve_orders(ClassicalOrders::new(m as f64, k as f64));
            membership_ok &= classical_membership(o, k as f64)? == m as f64;
        }
    }
    report.check("classical_membership", membership_ok);
    report.write_json(out)?;
    Ok(report)
}

/// Scaling identity `Op_h(a) = Op(a~)` over the built-in library.
pub fn run_quantize_check(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("quantize-check", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let mut csv = CsvWriter::create(out, "quantize_check", &["symbol", "h", "rel_frobenius"])?;
    let mut worst = 0.0f64;
    for sym in library::builtin_suite(g.dim) {
        for &h in &g.h_grid {
            let direct = assemble_semiclassical(&sym, h, &g)?;
            let scaled = assemble(&scale_symbol(&sym), h, &g)?;
            let err = rel_frobenius(&scaled.entries, &direct.entries);
            worst = worst.max(err);
            csv.row(&[sym.name().to_string(), fmt_f64(h), fmt_f64(err)])?;
        }
    }
    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.metric("scaling_identity_worst", worst);
    report.check("scaling_identity", worst <= tolerances::SCALING_IDENTITY);
    report.write_json(out)?;
    Ok(report)
}

/// Differential-composition exactness for zeta-polynomial symbols.
pub fn run_compose(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("compose", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let h = g.h_grid[0];
    let mut csv = CsvWriter::create(out, "compose", &["degree", "partner", "rel_frobenius"])?;
    let mut worst = 0.0f64;
    let zeta = library::zeta(1, 0);
    let partners: Vec<SymbolFamily> =
        vec![library::exp_iz(1, 1), library::perturbed(1, 1.0, 0.3)];
    for degree in 0..=3usize {
        let mut a = library::one(1);
        for _ in 0..degree {
            a = a.mul(&zeta)?;
        }
        // keep the polynomial well-scaled by mixing a lower-order term
        if degree >= 2 {
            a = a.sub(&zeta.scale(Complex64::new(2.0, 0.0)))?;
        }
        for b in &partners {
            let truncated = compose_asymptotic(&a, b, degree + 1)?;
            let lhs = compose_exact(&assemble(&a, h, &g)?, &assemble(b, h, &g)?)?;
            let rhs = assemble(&truncated, h, &g)?;
            let err = rel_frobenius(&lhs.entries, &rhs.entries);
            worst = worst.max(err);
            csv.row(&[degree.to_string(), b.name().to_string(), fmt_f64(err)])?;
        }
    }
    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.metric("compose_exactness_worst", worst);
    report.check("differential_composition_exact", worst <= tolerances::COMPOSE_EXACTNESS);
    report.write_json(out)?;
    Ok(report)
}

/// Parametrix correction: iterate-mode decay slopes and the exact-solve limit.
pub fn run_parametrix(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("parametrix", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let lambda = cfg.complex_or("spectral.lambda", Complex64::new(0.0, 1.0))?;
    let base = symbol_from_config(cfg, 1)?;
    let m_order = base.declared_orders().m;
    let sp = SpectralParameter::new(lambda, m_order)?;
    let family_symbol = spectral_family(&base, &sp)?;
    let btilde_symbol = parametrix_symbol(
        &family_symbol,
        Orders::new(m_order, m_order, m_order),
        1,
        &SampleGrid::default_for_dim(1),
    )?;

    let mut a_family = Vec::new();
    let mut btilde = Vec::new();
    let mut b0 = Vec::new();
    for &h in &g.h_grid {
        a_family.push(assemble(&family_symbol, h, &g)?);
        btilde.push(assemble(&btilde_symbol, h, &g)?);
        // inverse of the normal operator -lambda/h^m
        let scale = -h.powf(m_order) / lambda;
        let mut id = OperatorMatrix::identity(&g, h);
        id.entries *= scale;
        id.provenance = format!("normal_inverse@h={h}");
        b0.push(id);
    }

    let mut csv = CsvWriter::create(out, "parametrix", &["mode", "h", "norm_pair", "value"])?;
    let pairs = [(SobolevTriple::L2, SobolevTriple::L2)];

    for j in 1..=3usize {
        let outcome =
            neumann_correct(&a_family, &btilde, &b0, NeumannMode::Iterate(j), 1e-12)?;
        let rows = remainder_decay(&outcome.remainders, &pairs, &[j as f64], &g)?;
        for (h, v) in &rows[0].norms {
            csv.row(&[format!("iterate{j}"), fmt_f64(*h), "L2->L2".into(), fmt_f64(*v)])?;
        }
        report.metric(&format!("iterate_slope_J{j}"), rows[0].slope);
        report.check(
            &format!("iterate_slope_J{j}"),
            rows[0].slope >= j as f64 - tolerances::SLOPE_SLACK,
        );
        if j == 1 {
            let h0 = outcome.h_contraction;
            report.metric("contraction_h0", h0.unwrap_or(f64::NAN));
            report.check("contraction_window_nonempty", h0.is_some());
            for (a, t) in a_family.iter().zip(&outcome.etilde_norms) {
                csv.row(&["etilde".into(), fmt_f64(a.h), "L2->L2".into(), fmt_f64(*t)])?;
            }
        }
    }

    let exact = neumann_correct(&a_family, &btilde, &b0, NeumannMode::ExactSolve, 1e-12)?;
    let mut worst_residual = 0.0f64;
    for e in &exact.remainders {
        let v = sigma_max(&e.entries);
        worst_residual = worst_residual.max(v);
        csv.row(&["exact-solve".into(), fmt_f64(e.h), "L2->L2".into(), fmt_f64(v)])?;
    }
    report.metric("exact_solve_residual", worst_residual);
    report.check("exact_solve_residual", worst_residual <= tolerances::EXACT_SOLVE_RESIDUAL);

    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.write_json(out)?;
    Ok(report)
}

/// Resolvent-bound verification plus the normal-operator checks.
pub fn run_resolvent(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("resolvent", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let eps = cfg.f64_or("symbol.eps", 0.3)?;
    let lambda = cfg.complex_or("spectral.lambda", Complex64::new(0.0, 1.0))?;
    let mut csv =
        CsvWriter::create(out, "resolvent", &["m", "h", "norm_name", "value"])?;

    for m_order in [1.0, 2.0] {
        let base = library::perturbed(1, m_order, eps);
        let sp = SpectralParameter::new(lambda, m_order)?;
        let rep = verify_resolvent_bounds(&base, &sp, &g, 0.0)?;
        for (h, v) in &rep.level_norms {
            csv.row(&[fmt_f64(m_order), fmt_f64(*h), "L2->L2".into(), fmt_f64(*v)])?;
        }
        for (h, v) in &rep.bounded_norms {
            csv.row(&[fmt_f64(m_order), fmt_f64(*h), format!("L2->H{m_order}"), fmt_f64(*v)])?;
        }
        let tag = if m_order == 1.0 { "m1" } else { "m2" };
        report.metric(&format!("level_slope_{tag}"), rep.level_slope);
        report.metric(&format!("bounded_sup_{tag}"), rep.bounded_sup);
        report.metric(&format!("bounded_variation_{tag}"), rep.bounded_variation);
        report.check(
            &format!("slope_{tag}"),
            (rep.level_slope - m_order).abs() <= tolerances::RESOLVENT_SLOPE,
        );
        if m_order == 1.0 {
            report.check(
                "bounded_variation_m1",
                rep.bounded_variation <= tolerances::RESOLVENT_VARIATION,
            );
        }
    }

    // normal operator: || h^m A_h + lambda I || decays with slope m
    let m_order = 1.0;
    let base = library::perturbed(1, m_order, eps);
    let sp = SpectralParameter::new(lambda, m_order)?;
    let family = spectral_family(&base, &sp)?;
    let mut hs = Vec::new();
    let mut norms = Vec::new();
    for &h in &g.h_grid {
        let mat = assemble(&family, h, &g)?;
        let mut shifted = mat.entries * Complex64::new(h.powf(m_order), 0.0);
        for i in 0..shifted.nrows() {
            shifted[(i, i)] += lambda;
        }
        let v = sigma_max(&shifted);
        csv.row(&[fmt_f64(m_order), fmt_f64(h), "normal_residual".into(), fmt_f64(v)])?;
        hs.push(h);
        norms.push(v);
    }
    let normal_slope = loglog_slope(&hs, &norms);
    report.metric("normal_residual_slope", normal_slope);
    report.check(
        "normal_residual_slope",
        (normal_slope - m_order).abs() <= tolerances::RESOLVENT_SLOPE,
    );

    // full ellipticity: spectral family yes, real-zero counterexample no
    let sample = SampleGrid::default_for_dim(1);
    let reference = GridSpec::new(1, 64, vec![0.5])?;
    let ecfg = EllipticityConfig::default();
    let fe = is_fully_elliptic(
        &family,
        Orders::new(m_order, m_order, m_order),
        &sample,
        &reference,
        &ecfg,
    )?;
    report.metric("spectral_family_margin", fe.margin);
    report.metric("spectral_family_normal_margin", fe.normal_margin);
    report.check("fully_elliptic_spectral_family", fe.fully_elliptic);

    let real_zero = library::sc_spectral(&base, m_order, Complex64::new(1.0, 0.0));
    let fe_bad = is_fully_elliptic(
        &real_zero,
        Orders::new(m_order, m_order, m_order),
        &sample,
        &reference,
        &ecfg,
    )?;
    report.metric("real_zero_margin", fe_bad.margin);
    report.check("not_fully_elliptic_real_zero", !fe_bad.fully_elliptic);

    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.write_json(out)?;
    Ok(report)
}

/// Regularity/decay interpolation sweep for the Laplacian resolvent.
pub fn run_interp(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("interp", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let zs: Vec<Complex64> = (1..=6).map(|j| Complex64::new(0.0, 4f64.powi(j))).collect();
    let rows = verify_interpolation(&zs, &[0.0, 1.0, 2.0], 0.0, &g)?;
    let mut csv = CsvWriter::create(out, "interp", &["t", "abs_z", "norm"])?;
    for row in &rows {
        for (az, v) in &row.norms {
            csv.row(&[fmt_f64(row.t), fmt_f64(*az), fmt_f64(*v)])?;
        }
        let tag = format!("slope_t{}", row.t);
        report.metric(&tag, row.slope);
        report.metric(&format!("oracle_rel_err_t{}", row.t), row.oracle_max_rel_err);
        report.check(
            &tag,
            (row.slope - row.slope_target).abs() <= tolerances::INTERP_SLOPE,
        );
        report.check(
            &format!("oracle_agreement_t{}", row.t),
            row.oracle_max_rel_err <= tolerances::INTERP_ORACLE,
        );
    }
    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.write_json(out)?;
    Ok(report)
}

fn entrywise_rel_err(q: &CMatrix, e: &CMatrix) -> f64 {
    let floor = (0..e.nrows())
        .map(|i| e[(i, i)].norm())
        .fold(f64::INFINITY, f64::min)
        .max(1e-300);
    let mut worst = 0.0f64;
    for c in 0..e.ncols() {
        for r in 0..e.nrows() {
            let denom = e[(r, c)].norm().max(floor);
            worst = worst.max((q[(r, c)] - e[(r, c)]).norm() / denom);
        }
    }
    worst
}

/// Contour functional calculus vs the eigendecomposition oracle.
pub fn run_power(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("power", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let nodes = cfg.usize_or("contour.nodes", 64)?;
    let h = g.h_grid[0];
    let s_half = Complex64::new(0.5, 0.0);
    let s_one = Complex64::new(1.0, 0.0);
    let mut csv = CsvWriter::create(out, "power", &["operator", "check", "value"])?;

    let run_case = |name: &str,
                        a: &OperatorMatrix,
                        report: &mut ExperimentReport,
                        csv: &mut CsvWriter|
     -> Result<()> {
        let half = complex_power(a, &ContourSpec::conformal(nodes, s_half)?)?;
        let oracle = eigen_oracle_power(a, s_half)?;
        let vs_oracle = entrywise_rel_err(&half.matrix.entries, &oracle.entries);
        let whole = complex_power(a, &ContourSpec::conformal(nodes, s_one)?)?;
        let semigroup = rel_frobenius(
            &whole.matrix.entries,
            &(&half.matrix.entries * &half.matrix.entries),
        );
        let inverse_vs = {
            let direct = crate::linalg::inverse(&a.entries, 1e-14)?;
            rel_frobenius(&direct, &whole.matrix.entries)
        };
        // the literal uniform-node ellipse, reported for comparison
        let (delta, lam) = half.spectrum_bounds;
        let ellipse_err = match complex_power(
            a,
            &ContourSpec::default_ellipse(delta, lam, nodes, s_half)?,
        ) {
            Ok(p) => entrywise_rel_err(&p.matrix.entries, &oracle.entries),
            Err(_) => f64::INFINITY,
        };
        for (check, v) in [
            ("vs_eigen_oracle_s_half", vs_oracle),
            ("semigroup_half_half", semigroup),
            ("inverse_vs_quadrature", inverse_vs),
            ("quadrature_error_estimate", half.error_estimate),
            ("uniform_ellipse_rel_err", ellipse_err),
            ("spectrum_min", delta),
            ("contour_distance", half.contour_distance),
        ] {
            csv.row(&[name.into(), check.into(), fmt_f64(v)])?;
        }
        report.metric(&format!("{name}_vs_oracle"), vs_oracle);
        report.metric(&format!("{name}_semigroup"), semigroup);
        report.metric(&format!("{name}_uniform_ellipse"), ellipse_err);
        report.check(&format!("{name}_oracle"), vs_oracle <= tolerances::POWER_ORACLE);
        report.check(&format!("{name}_semigroup"), semigroup <= tolerances::POWER_SEMIGROUP);
        report.check(&format!("{name}_inverse"), inverse_vs <= tolerances::POWER_ORACLE);
        Ok(())
    };

    // shifted Laplacian: exact diagonal, eigenvalues 1 + n^2
    let lap = library::laplacian(1).add(&library::one(1))?;
    let a1 = assemble(&lap, h, &g)?;
    run_case("shifted_laplacian", &a1, &mut report, &mut csv)?;

    // symmetrized pseudodifferential example
    let pseudo = library::japanese_bracket(1, 1.0)
        .add(&library::cos_z(1).scale(Complex64::new(0.2, 0.0)))?;
    let a2 = symmetrize(&assemble(&pseudo, h, &g)?);
    run_case("symmetrized_bracket", &a2, &mut report, &mut csv)?;

    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.write_json(out)?;
    Ok(report)
}

/// Sobolev identification bands on random vectors.
pub fn run_norms(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut report = ExperimentReport::new("norms", cfg.entries().clone());
    let g = grid_from_config(cfg)?;
    let seed = cfg.usize_or("run.seed", 0)? as u64;
    let trials = cfg.usize_or("norms.trials", 5)?;
    let mut rng = StdRng::seed_from_u64(seed);
    let mut csv = CsvWriter::create(out, "norms", &["h", "s", "r", "p", "norm", "ratio"])?;
    let mut band_ok = true;
    let mut worst_excess = 0.0f64;
    for _ in 0..trials {
        let u = StateVector::from_coeffs(
            (0..g.size())
                .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                .collect(),
        );
        for &h in &g.h_grid {
            for s in 0..=2 {
                for p in 0..=2 {
                    let triple = classical_triple(s as f64, p as f64);
                    let lhs = sobolev_norm(&u, triple, h, &g)?;
                    // reference classical weights <zeta>^s h^-p
                    let mut acc = 0.0;
                    for (i, mode) in g.modes().iter().enumerate() {
                        let q: f64 = mode.iter().map(|&k| (k * k) as f64).sum();
                        let w = (1.0 + q).powf(s as f64 / 2.0) * h.powf(-(p as f64));
                        acc += (u.coeffs[i].norm() * w).powi(2);
                    }
                    let rhs = acc.sqrt();
                    let ratio = lhs / rhs;
                    let band = 2f64.powf((s as f64 + p as f64) / 2.0);
                    let lo = 1.0 / band - tolerances::NORM_BAND;
                    let hi = band + tolerances::NORM_BAND;
                    band_ok &= ratio >= lo && ratio <= hi;
                    worst_excess = worst_excess
                        .max((ratio - band).max(0.0))
                        .max((1.0 / band - ratio).max(0.0));
                    csv.row(&[
                        fmt_f64(h),
                        s.to_string(),
                        fmt_f64(triple.r),
                        p.to_string(),
                        fmt_f64(lhs),
                        fmt_f64(ratio),
                    ])?;
                }
            }
        }
    }
    report.csv_paths.push(
        csv.finish()?
            .file_name()
            .map(|n| n.to_string_lossy().into_owned())
            .unwrap_or_default(),
    );
    report.metric("band_excess", worst_excess);
    report.check("norm_equivalence_band", band_ok);
    report.write_json(out)?;
    Ok(report)
}

/// Every experiment, in order; the summary verdict is the conjunction.
type ExperimentFn = fn(&ExperimentConfig, &Path) -> Result<ExperimentReport>;

pub fn run_all(cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    let mut summary = ExperimentReport::new("all", cfg.entries().clone());
    let runs: Vec<(&str, ExperimentFn)> = vec![
        ("weights", run_weights),
        ("orders", run_orders),
        ("quantize-check", run_quantize_check),
        ("compose", run_compose),
        ("parametrix", run_parametrix),
        ("resolvent", run_resolvent),
        ("interp", run_interp),
        ("power", run_power),
        ("norms", run_norms),
    ];
    for (name, f) in runs {
        let rep = f(cfg, out)?;
        summary.check(name, rep.passed());
    }
    summary.write_json(out)?;
    Ok(summary)
}

/// Dispatch an experiment by name.
pub fn run(name: &str, cfg: &ExperimentConfig, out: &Path) -> Result<ExperimentReport> {
    match name {
        "weights" => run_weights(cfg, out),
        "orders" => run_orders(cfg, out),
        "quantize-check" => run_quantize_check(cfg, out),
        "compose" => run_compose(cfg, out),
        "parametrix" => run_parametrix(cfg, out),
        "resolvent" => run_resolvent(cfg, out),
        "interp" => run_interp(cfg, out),
        "power" => run_power(cfg, out),
        "norms" => run_norms(cfg, out),
        "all" => run_all(cfg, out),
        other => Err(Error::Config(format!("unknown experiment '{other}'"))),
    }
}
