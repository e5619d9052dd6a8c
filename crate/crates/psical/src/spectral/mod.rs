//! Spectral families, resolvent bounds, and contour functional calculus.
//!
//! The large-parameter resolvent problem `(A - z)^-1`, `z = lambda / h^m`,
//! is re-expressed through the bounded parameter `lambda` and the family
//! `a - lambda / h^m` of triple order `(m, m, m)`. The resolvent is computed
//! by a dense solve; membership claims are checked as norm bounds and
//! log-log slopes. Complex powers integrate the resolvent along a closed
//! contour around the spectrum avoiding `(-inf, 0]`.

pub mod elliptic;

use crate::error::{Error, Result};
use crate::linalg::{
    assemble_from_eigen, frobenius, hermitian_defect, hermitian_eigen, inverse, loglog_slope,
    sigma_max, sigma_min, CMatrix,
};
use crate::orders::Orders;
use crate::quantize::{assemble, GridSpec, OperatorMatrix};
use crate::symbols::{expr, is_elliptic, EllipticityConfig, SampleGrid, SymbolFamily};
use elliptic::{ellip_k, jacobi_sn_cn_dn};
use num_complex::Complex64;
use rayon::prelude::*;

/// Bounded spectral parameter `lambda` (off the reals) and the order `m` of
/// the operator; the running parameter is `z = lambda / h^m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParameter {
    pub lambda: Complex64,
    pub m: f64,
}

impl SpectralParameter {
    pub fn new(lambda: Complex64, m: f64) -> Result<Self> {
        if lambda.im == 0.0 {
            return Err(Error::Domain("spectral parameter lambda must satisfy Im(lambda) != 0".into()));
        }
        if m <= 0.0 || m.is_nan() {
            return Err(Error::Domain("spectral order m must be positive".into()));
        }
        Ok(SpectralParameter { lambda, m })
    }

    pub fn z_at(&self, h: f64) -> Complex64 {
        self.lambda / h.powf(self.m)
    }
}

fn check_h_independent(a: &SymbolFamily) -> Result<()> {
    let probes: [(&[f64], f64); 3] = [(&[2.0], 0.3), (&[-7.0], 0.3), (&[0.0], 0.3)];
    let z = vec![0.4; a.dim()];
    for (zeta1, _) in probes {
        let zeta: Vec<f64> = (0..a.dim()).map(|i| zeta1.get(i).copied().unwrap_or(1.0)).collect();
        let v1 = a.eval(&z, &zeta, 0.9);
        let v2 = a.eval(&z, &zeta, 0.3);
        if (v1 - v2).norm() > 1e-12 * v1.norm().max(1.0) {
            return Err(Error::Domain(format!(
                "spectral families need an h-independent base symbol; '{}' varies with h",
                a.name()
            )));
        }
    }
    Ok(())
}

/// The family `a(z, zeta) - lambda / h^m` with declared orders `(m, m, m)`.
/// Defined for `h > 0`; at `h = 0` the shift is non-finite and consumers
/// reject the evaluation.
pub fn spectral_family(a: &SymbolFamily, sp: &SpectralParameter) -> Result<SymbolFamily> {
    check_h_independent(a)?;
    let d = a.declared_orders();
    if d.k != 0.0 || (d.l - d.m).abs() > 1e-12 {
        return Err(Error::Order(format!(
            "spectral families need classical orders (m, m, 0); got {d}"
        )));
    }
    Ok(crate::symbols::library::sc_spectral(a, sp.m, sp.lambda))
}

/// Dense resolvent `(Op(a) - lambda/h^m)^-1` at one `h`.
pub fn resolvent(
    a: &SymbolFamily,
    sp: &SpectralParameter,
    h: f64,
    g: &GridSpec,
    sigma_floor: f64,
) -> Result<OperatorMatrix> {
    let family = spectral_family(a, sp)?;
    let mat = assemble(&family, h, g)?;
    let entries = inverse(&mat.entries, sigma_floor)?;
    Ok(OperatorMatrix {
        h,
        entries,
        orders: Orders::new(-sp.m, -sp.m, -sp.m),
        provenance: format!("resolvent({}, lambda={}, m={})@h={h}", a.name(), sp.lambda, sp.m),
        dim: mat.dim,
        n: mat.n,
    })
}

/// `sigma_max(diag(<zeta>^s_out) . M . diag(<zeta>^-s_in))` - the classical
/// Sobolev operator norm `H^{s_in} -> H^{s_out}` on the mode basis.
pub fn classical_operator_norm(m: &OperatorMatrix, s_in: f64, s_out: f64, g: &GridSpec) -> f64 {
    let modes = g.modes();
    let mut weighted = m.entries.clone();
    let bracket = |mode: &Vec<i64>| {
        (1.0 + mode.iter().map(|&k| (k * k) as f64).sum::<f64>()).sqrt()
    };
    for c in 0..weighted.ncols() {
        let win = bracket(&modes[c]).powf(-s_in);
        for r in 0..weighted.nrows() {
            let wout = bracket(&modes[r]).powf(s_out);
            weighted[(r, c)] *= wout * win;
        }
    }
    sigma_max(&weighted)
}

#[derive(Debug, Clone)]
pub struct ResolventBoundsReport {
    /// `(h, ||R_h||_{H^s -> H^{s+m}})` - the uniform-boundedness route.
    pub bounded_norms: Vec<(f64, f64)>,
    pub bounded_sup: f64,
    /// max/min of the bounded norms across the h grid.
    pub bounded_variation: f64,
    /// `(h, ||R_h||_{H^s -> H^s})` - the parameter-decay route.
    pub level_norms: Vec<(f64, f64)>,
    /// Log-log slope of the level norms; the class membership predicts `m`.
    pub level_slope: f64,
}

/// Double-membership check for the inverse spectral family: uniform
/// `H^s -> H^{s+m}` bounds and `h^m` smallness at fixed regularity.
pub fn verify_resolvent_bounds(
    a: &SymbolFamily,
    sp: &SpectralParameter,
    g: &GridSpec,
    s: f64,
) -> Result<ResolventBoundsReport> {
    // precondition: real-valued elliptic of order m
    let sample = SampleGrid::default_for_dim(a.dim());
    let probe_im = {
        let mut worst = 0.0f64;
        for (r, i, j, w) in sample.indices().step_by(37) {
            let v = a.eval(&sample.z_points[w], &sample.zeta_at(r, i), sample.hs[j]);
            worst = worst.max(v.im.abs() / v.norm().max(1.0));
        }
        worst
    };
    if probe_im > 1e-12 {
        return Err(Error::Domain(format!(
            "resolvent-bound verification needs a real-valued symbol; '{}' has imaginary part",
            a.name()
        )));
    }
    let cfg = EllipticityConfig::default();
    let d = a.declared_orders();
    let rep = is_elliptic(a, d, &sample, &cfg)?;
    if !rep.elliptic {
        return Err(Error::NotElliptic { margin: rep.margin, threshold: cfg.threshold });
    }

    let resolvents: Vec<Result<OperatorMatrix>> = g
        .h_grid
        .par_iter()
        .map(|&h| resolvent(a, sp, h, g, 1e-12))
        .collect();
    let mut bounded_norms = Vec::with_capacity(g.h_grid.len());
    let mut level_norms = Vec::with_capacity(g.h_grid.len());
    for r in resolvents {
        let r = r?;
        bounded_norms.push((r.h, classical_operator_norm(&r, s, s + sp.m, g)));
        level_norms.push((r.h, classical_operator_norm(&r, s, s, g)));
    }
    let sup = bounded_norms.iter().map(|&(_, v)| v).fold(0.0, f64::max);
    let min = bounded_norms.iter().map(|&(_, v)| v).fold(f64::INFINITY, f64::min);
    let hs: Vec<f64> = level_norms.iter().map(|&(h, _)| h).collect();
    let ys: Vec<f64> = level_norms.iter().map(|&(_, v)| v).collect();
    Ok(ResolventBoundsReport {
        bounded_norms,
        bounded_sup: sup,
        bounded_variation: if min > 0.0 { sup / min } else { f64::INFINITY },
        level_norms,
        level_slope: loglog_slope(&hs, &ys),
    })
}

#[derive(Debug, Clone)]
pub struct InterpolationRow {
    pub t: f64,
    /// `(|z|, matrix-route norm)`.
    pub norms: Vec<(f64, f64)>,
    pub slope: f64,
    pub slope_target: f64,
    /// Worst relative disagreement between the dense-matrix route and the
    /// mode-supremum oracle.
    pub oracle_max_rel_err: f64,
}

/// Trade-off between regained regularity and large-parameter decay for the
/// Laplacian resolvent: slope of `log ||<D>^t (Delta - z)^-1||` in `log |z|`
/// is `-(2 - t)/2` for `t` in `[0, 2]`.
pub fn verify_interpolation(
    z_list: &[Complex64],
    t_list: &[f64],
    s: f64,
    g: &GridSpec,
) -> Result<Vec<InterpolationRow>> {
    if z_list.iter().any(|z| z.im == 0.0) {
        return Err(Error::Domain("interpolation sweep needs Im(z) != 0".into()));
    }
    let modes = g.modes();
    let resolvents: Vec<Result<CMatrix>> = z_list
        .par_iter()
        .map(|&z| {
            let shifted = SymbolFamily::from_node(
                expr::sum(vec![expr::abs_zeta_sq(), expr::constant(-z)]),
                format!("laplacian - {z}"),
                Orders::new(2.0, 2.0, 0.0),
                g.dim,
            );
            let mat = assemble(&shifted, 1.0, g)?;
            inverse(&mat.entries, 1e-14)
        })
        .collect();
    let resolvents: Vec<CMatrix> = resolvents.into_iter().collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(t_list.len());
    for &t in t_list {
        let mut norms = Vec::with_capacity(z_list.len());
        let mut worst_rel = 0.0f64;
        for (zi, &z) in z_list.iter().enumerate() {
            let m = OperatorMatrix {
                h: 1.0,
                entries: resolvents[zi].clone(),
                orders: Orders::new(-2.0, -2.0, 0.0),
                provenance: format!("(laplacian - {z})^-1"),
                dim: g.dim,
                n: g.n,
            };
            let matrix_route = classical_operator_norm(&m, s, s + t, g);
            // independent oracle: mode supremum <n>^t / |n^2 - z|
            let oracle = modes
                .iter()
                .map(|mode| {
                    let q: f64 = mode.iter().map(|&k| (k * k) as f64).sum();
                    (1.0 + q).powf(t / 2.0) / (Complex64::new(q, 0.0) - z).norm()
                })
                .fold(0.0, f64::max);
            worst_rel = worst_rel.max((matrix_route - oracle).abs() / oracle);
            norms.push((z.norm(), matrix_route));
        }
        let xs: Vec<f64> = norms.iter().map(|&(x, _)| x).collect();
        let ys: Vec<f64> = norms.iter().map(|&(_, y)| y).collect();
        rows.push(InterpolationRow {
            t,
            norms,
            slope: loglog_slope(&xs, &ys),
            slope_target: -(2.0 - t) / 2.0,
            oracle_max_rel_err: worst_rel,
        });
    }
    Ok(rows)
}

/// Contour geometry for the functional calculus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourShape {
    /// Conformally-mapped closed contour around the spectrum, clear of
    /// `(-inf, 0]`; node placement equidistributes the quadrature's
    /// convergence rate (the default, and the accuracy path).
    Conformal,
    /// Ellipse `center + semi_x cos t - i semi_y sin t` with uniform nodes.
    Ellipse { center: f64, semi_x: f64, semi_y: f64 },
    /// Vertical line `Re z = abscissa` truncated at `|Im z| <= half_height`;
    /// exercises large-|z| decay, not an accuracy path.
    VerticalLine { abscissa: f64, half_height: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContourSpec {
    pub shape: ContourShape,
    pub node_count: usize,
    /// Exponent `s` of `z^-s`.
    pub exponent: Complex64,
}

impl ContourSpec {
    pub fn new(shape: ContourShape, node_count: usize, exponent: Complex64) -> Result<Self> {
        if node_count < 8 {
            return Err(Error::Contour("node_count must be at least 8".into()));
        }
        Ok(ContourSpec { shape, node_count, exponent })
    }

    pub fn conformal(node_count: usize, exponent: Complex64) -> Result<Self> {
        Self::new(ContourShape::Conformal, node_count, exponent)
    }

    /// The ellipse around `[delta, lambda_max]` with safety distance `delta/2`.
    pub fn default_ellipse(
        delta: f64,
        lambda_max: f64,
        node_count: usize,
        exponent: Complex64,
    ) -> Result<Self> {
        let semi_x = (lambda_max - delta) / 2.0 + delta / 2.0;
        let center = (delta + lambda_max) / 2.0;
        Self::new(
            ContourShape::Ellipse { center, semi_x, semi_y: semi_x / 2.0 },
            node_count,
            exponent,
        )
    }
}

/// Nodes and weights such that `(1/2pi i) sum_j f(z_j) (A - z_j)^-1 w_j`
/// realizes `f(A)` (orientation folded into the weights).
fn contour_nodes(
    shape: &ContourShape,
    node_count: usize,
    delta: f64,
    lambda_max: f64,
) -> Result<(Vec<Complex64>, Vec<Complex64>)> {
    match *shape {
        ContourShape::Conformal => {
            // widen the bracket so the map stays nondegenerate for narrow spectra
            let lo = delta / 1.05;
            let hi = lambda_max * 1.05;
            let kappa = hi / lo;
            let p = (lo * hi).sqrt();
            let k = (kappa.sqrt() - 1.0) / (kappa.sqrt() + 1.0);
            let big_k = ellip_k(k);
            let big_kp = ellip_k((1.0 - k * k).sqrt());
            let mut zs = Vec::with_capacity(node_count);
            let mut ws = Vec::with_capacity(node_count);
            let dt = 4.0 * big_k / node_count as f64;
            for j in 0..node_count {
                let t = Complex64::new(dt * (j as f64 + 0.5), big_kp / 2.0);
                let (sn, cn, dn) = jacobi_sn_cn_dn(t, k);
                let u = k * sn;
                let one = Complex64::new(1.0, 0.0);
                let z = p * (one + u) / (one - u);
                let dz = (one - u).powi(-2) * 2.0 * p * k * cn * dn;
                zs.push(z);
                ws.push(dz * dt);
            }
            Ok((zs, ws))
        }
        ContourShape::Ellipse { center, semi_x, semi_y } => {
            if center - semi_x <= 0.0 {
                return Err(Error::Contour(format!(
                    "ellipse reaches Re z = {} <= 0 and meets the branch cut",
                    center - semi_x
                )));
            }
            let inside = |x: f64| {
                let dx = (x - center) / semi_x;
                dx * dx <= 1.0 + 1e-12
            };
            if !inside(delta) || !inside(lambda_max) {
                return Err(Error::Contour(format!(
                    "ellipse [{}, {}] does not enclose the spectrum [{delta:.6e}, {lambda_max:.6e}]",
                    center - semi_x,
                    center + semi_x
                )));
            }
            let mut zs = Vec::with_capacity(node_count);
            let mut ws = Vec::with_capacity(node_count);
            let dt = 2.0 * std::f64::consts::PI / node_count as f64;
            for j in 0..node_count {
                let t = dt * (j as f64 + 0.5);
                // clockwise so that the (A - z)^-1 convention integrates to f(A)
                let z = Complex64::new(center + semi_x * t.cos(), -semi_y * t.sin());
                let dz = Complex64::new(-semi_x * t.sin(), -semi_y * t.cos());
                zs.push(z);
                ws.push(dz * dt);
            }
            Ok((zs, ws))
        }
        ContourShape::VerticalLine { abscissa, half_height } => {
            if abscissa <= 0.0 || abscissa >= delta {
                return Err(Error::Contour(format!(
                    "vertical line Re z = {abscissa} must separate 0 from the spectrum at {delta:.6e}"
                )));
            }
            let mut zs = Vec::with_capacity(node_count);
            let mut ws = Vec::with_capacity(node_count);
            let dy = 2.0 * half_height / node_count as f64;
            for j in 0..node_count {
                let y = -half_height + dy * (j as f64 + 0.5);
                zs.push(Complex64::new(abscissa, y));
                // downward traversal encloses the spectrum on the right
                ws.push(Complex64::new(0.0, dy));
            }
            Ok((zs, ws))
        }
    }
}

fn distance_to_segment(z: Complex64, lo: f64, hi: f64) -> f64 {
    let x = z.re.clamp(lo, hi);
    (z - Complex64::new(x, 0.0)).norm()
}

#[derive(Debug, Clone)]
pub struct PowerResult {
    pub matrix: OperatorMatrix,
    /// Relative Frobenius difference against the node-doubled rule.
    pub error_estimate: f64,
    /// `(sigma_min, sigma_max)` of the operator - for a Hermitian positive
    /// matrix these bracket the spectrum.
    pub spectrum_bounds: (f64, f64),
    /// Minimum distance from the quadrature nodes to `[delta, lambda_max]`.
    pub contour_distance: f64,
}

fn quadrature_pass(
    a: &CMatrix,
    zs: &[Complex64],
    ws: &[Complex64],
    s: Complex64,
) -> Result<CMatrix> {
    let n = a.nrows();
    let terms: Vec<Result<CMatrix>> = zs
        .par_iter()
        .zip(ws)
        .map(|(&z, &w)| {
            let mut shifted = a.clone();
            for i in 0..n {
                shifted[(i, i)] -= z;
            }
            let r = shifted
                .try_inverse()
                .ok_or_else(|| Error::Contour(format!("resolvent solve failed at node z = {z}")))?;
            let factor = z.powc(-s) * w;
            Ok(r * factor)
        })
        .collect();
    let mut acc = CMatrix::zeros(n, n);
    for t in terms {
        acc += t?;
    }
    let two_pi_i = Complex64::new(0.0, 2.0 * std::f64::consts::PI);
    Ok(acc / two_pi_i)
}

/// `A^-s` by contour quadrature of `z^-s (A - z)^-1` (principal branch),
/// for self-adjoint positive `A`. Returns the `node_count`-node result and a
/// node-doubling error estimate.
pub fn complex_power(a: &OperatorMatrix, c: &ContourSpec) -> Result<PowerResult> {
    if hermitian_defect(&a.entries) > 1e-12 {
        return Err(Error::Numeric(format!(
            "complex power needs a self-adjoint operator (defect {:.3e})",
            hermitian_defect(&a.entries)
        )));
    }
    let delta = sigma_min(&a.entries);
    let lambda_max = sigma_max(&a.entries);
    if delta <= 0.0 || delta.is_nan() {
        return Err(Error::Conditioning { sigma_min: delta });
    }
    // positivity probe: the mean Rayleigh quotient of a positive matrix is positive
    let ones = crate::linalg::CVector::from_element(a.size(), Complex64::new(1.0, 0.0));
    let rayleigh = (ones.adjoint() * &a.entries * &ones)[(0, 0)].re;
    if rayleigh <= 0.0 {
        return Err(Error::Domain("complex power needs a positive operator".into()));
    }

    let (zs, ws) = contour_nodes(&c.shape, c.node_count, delta, lambda_max)?;
    let contour_distance =
        zs.iter().map(|&z| distance_to_segment(z, delta, lambda_max)).fold(f64::INFINITY, f64::min);
    if matches!(c.shape, ContourShape::Ellipse { .. }) && contour_distance < delta / 2.0 * (1.0 - 1e-9)
    {
        return Err(Error::Contour(format!(
            "ellipse passes within {contour_distance:.6e} of the spectrum (safety margin {:.6e})",
            delta / 2.0
        )));
    }
    if contour_distance <= 0.0 {
        return Err(Error::Contour("contour touches the spectrum".into()));
    }

    let coarse = quadrature_pass(&a.entries, &zs, &ws, c.exponent)?;
    let (zs2, ws2) = contour_nodes(&c.shape, 2 * c.node_count, delta, lambda_max)?;
    let fine = quadrature_pass(&a.entries, &zs2, &ws2, c.exponent)?;
    let scale = frobenius(&coarse).max(1e-300);
    let error_estimate = frobenius(&(&coarse - &fine)) / scale;

    Ok(PowerResult {
        matrix: OperatorMatrix {
            h: a.h,
            entries: coarse,
            orders: Orders::new(
                -c.exponent.re * a.orders.m,
                -c.exponent.re * a.orders.l,
                -c.exponent.re * a.orders.k,
            ),
            provenance: format!("power({}, s={})", a.provenance, c.exponent),
            dim: a.dim,
            n: a.n,
        },
        error_estimate,
        spectrum_bounds: (delta, lambda_max),
        contour_distance,
    })
}

/// Independent oracle: full Hermitian eigendecomposition, `lambda -> lambda^-s`
/// on the (strictly positive) eigenvalues, reassembled.
pub fn eigen_oracle_power(a: &OperatorMatrix, s: Complex64) -> Result<OperatorMatrix> {
    let (vals, vecs) = hermitian_eigen(&a.entries)?;
    if vals.iter().any(|&v| v <= 0.0) {
        return Err(Error::Domain(format!(
            "eigen oracle needs positive eigenvalues (min {:.6e})",
            vals.iter().cloned().fold(f64::INFINITY, f64::min)
        )));
    }
    let entries = assemble_from_eigen(&vals, &vecs, |lam| Complex64::new(lam, 0.0).powc(-s));
    Ok(OperatorMatrix {
        h: a.h,
        entries,
        orders: Orders::new(
            -s.re * a.orders.m,
            -s.re * a.orders.l,
            -s.re * a.orders.k,
        ),
        provenance: format!("eigen_power({}, s={s})", a.provenance),
        dim: a.dim,
        n: a.n,
    })
}
