//! Empirical symbol analysis: order regression, conormal seminorms,
//! ellipticity and wave-front probes, and normal operators.

use super::expr::{self, NodeRef};
use super::grid::SampleGrid;
use super::SymbolFamily;
use crate::error::{Error, Result};
use crate::geometry::{face_weight_scalars, weights_from_scalars};
use crate::linalg::least_squares;
use crate::orders::Orders;
use crate::quantize::{assemble, GridSpec};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use std::f64::consts::PI;

/// Result of the least-squares order regression.
#[derive(Debug, Clone, Copy)]
pub struct OrderFit {
    pub orders: Orders,
    /// Root-mean-square residual of the log fit.
    pub residual: f64,
    /// Design-matrix condition number (`inf` when rank deficient).
    pub condition: f64,
    /// False when the design matrix was rank deficient.
    pub reliable: bool,
}

/// Least-squares fit of `log|a|` against the three log boundary weights.
///
/// Requires `|a| > 0` on at least 90% of the grid; zeros are excluded.
pub fn fit_orders(a: &SymbolFamily, g: &SampleGrid) -> Result<OrderFit> {
    if g.dim() != a.dim() {
        return Err(Error::Dimension("sample grid and symbol dimension differ".into()));
    }
    let mut rows: Vec<[f64; 4]> = Vec::with_capacity(g.len());
    let mut ys: Vec<f64> = Vec::with_capacity(g.len());
    let mut total = 0usize;
    for (r, i, j, w) in g.indices() {
        let zeta = g.zeta_at(r, i);
        let h = g.hs[j];
        let v = a.eval(&g.z_points[w], &zeta, h);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numeric(format!(
                "symbol '{}' non-finite at |zeta|={}, h={}",
                a.name(),
                g.radii[i],
                h
            )));
        }
        total += 1;
        let mag = v.norm();
        if mag == 0.0 {
            continue;
        }
        let q: f64 = zeta.iter().map(|c| c * c).sum();
        let bw = weights_from_scalars(q, h);
        rows.push([-bw.rho_h_inf.ln(), -bw.rho_h_ff.ln(), -bw.rho_h_0.ln(), 1.0]);
        ys.push(mag.ln());
    }
    if rows.len() * 10 < total * 9 {
        return Err(Error::Fit(format!(
            "symbol '{}' vanishes on {} of {} grid points (need |a| > 0 on 90%)",
            a.name(),
            total - rows.len(),
            total
        )));
    }
    let x = DMatrix::from_fn(rows.len(), 4, |i, j| rows[i][j]);
    let y = DVector::from_vec(ys);
    let (beta, residual, condition) = least_squares(&x, &y);
    Ok(OrderFit {
        orders: Orders::new(beta[0], beta[1], beta[2]),
        residual,
        condition,
        reliable: condition.is_finite(),
    })
}

/// 3-point Lagrange first derivative at the middle node of `(t0,f0),(t1,f1),(t2,f2)`.
fn lagrange_derivative(
    t0: f64,
    t1: f64,
    t2: f64,
    f0: Complex64,
    f1: Complex64,
    f2: Complex64,
) -> Complex64 {
    f0 * ((t1 - t2) / ((t0 - t1) * (t0 - t2)))
        + f1 * ((2.0 * t1 - t0 - t2) / ((t1 - t0) * (t1 - t2)))
        + f2 * ((t1 - t0) / ((t2 - t0) * (t2 - t1)))
}

struct TensorField {
    vals: Vec<Complex64>,
    nr: usize,
    ni: usize,
    nj: usize,
    nz: usize,
    i_lo: usize,
    i_hi: usize,
    j_lo: usize,
    j_hi: usize,
}

impl TensorField {
    fn idx(&self, r: usize, i: usize, j: usize, w: usize) -> usize {
        ((r * self.ni + i) * self.nj + j) * self.nz + w
    }

    fn differentiate_radius(&mut self, log_radii: &[f64]) -> Result<()> {
        if self.i_hi - self.i_lo < 3 {
            return Err(Error::Domain("too few radii for a radial difference".into()));
        }
        let mut out = self.vals.clone();
        for r in 0..self.nr {
            for i in (self.i_lo + 1)..(self.i_hi - 1) {
                for j in 0..self.nj {
                    for w in 0..self.nz {
                        out[self.idx(r, i, j, w)] = lagrange_derivative(
                            log_radii[i - 1],
                            log_radii[i],
                            log_radii[i + 1],
                            self.vals[self.idx(r, i - 1, j, w)],
                            self.vals[self.idx(r, i, j, w)],
                            self.vals[self.idx(r, i + 1, j, w)],
                        );
                    }
                }
            }
        }
        self.vals = out;
        self.i_lo += 1;
        self.i_hi -= 1;
        Ok(())
    }

    fn differentiate_h(&mut self, log_hs: &[f64]) -> Result<()> {
        if self.j_hi - self.j_lo < 3 {
            return Err(Error::Domain("too few h values for an h-difference".into()));
        }
        let mut out = self.vals.clone();
        for r in 0..self.nr {
            for i in 0..self.ni {
                for j in (self.j_lo + 1)..(self.j_hi - 1) {
                    for w in 0..self.nz {
                        out[self.idx(r, i, j, w)] = lagrange_derivative(
                            log_hs[j - 1],
                            log_hs[j],
                            log_hs[j + 1],
                            self.vals[self.idx(r, i, j - 1, w)],
                            self.vals[self.idx(r, i, j, w)],
                            self.vals[self.idx(r, i, j + 1, w)],
                        );
                    }
                }
            }
        }
        self.vals = out;
        self.j_lo += 1;
        self.j_hi -= 1;
        Ok(())
    }
}

fn sample_node(node: &NodeRef, g: &SampleGrid) -> Result<TensorField> {
    let (nr, ni, nj, nz) = (g.rays.len(), g.radii.len(), g.hs.len(), g.z_points.len());
    let mut vals = vec![Complex64::new(0.0, 0.0); nr * ni * nj * nz];
    let mut field = TensorField { vals: Vec::new(), nr, ni, nj, nz, i_lo: 0, i_hi: ni, j_lo: 0, j_hi: nj };
    for (r, i, j, w) in g.indices() {
        let zeta = g.zeta_at(r, i);
        let v = node.eval(&g.z_points[w], &zeta, g.hs[j]);
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numeric("non-finite symbol sample in seminorm sweep".into()));
        }
        vals[((r * ni + i) * nj + j) * nz + w] = v;
    }
    field.vals = vals;
    Ok(field)
}

/// `zeta . d/dzeta` applied `times` times, structurally.
fn radial_derivative(node: NodeRef, dim: usize, times: usize) -> Result<NodeRef> {
    let mut cur = node;
    for _ in 0..times {
        let mut terms = Vec::with_capacity(dim);
        for j in 0..dim {
            let d = cur.zeta_derivative(j).ok_or_else(|| {
                Error::Capability("symbol lacks analytic zeta derivatives".into())
            })?;
            terms.push(expr::product(vec![expr::zeta_component(j), d]));
        }
        cur = expr::sum(terms);
    }
    Ok(cur)
}

fn words_up_to(dim: usize, budget: usize) -> Vec<(Vec<usize>, usize, usize)> {
    // (z-derivative counts per dim, radial count, h count) with total <= budget
    let mut out = Vec::new();
    fn rec(dim: usize, left: usize, q: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, usize, usize)>) {
        if q.len() == dim {
            for jz in 0..=left {
                for p in 0..=(left - jz) {
                    out.push((q.clone(), jz, p));
                }
            }
            return;
        }
        for c in 0..=left {
            q.push(c);
            rec(dim, left - c, q, out);
            q.pop();
        }
    }
    rec(dim, budget, &mut Vec::new(), &mut out);
    out
}

/// Grid supremum of `|V_1 ... V_N a| / face_weight(o, .)` over all words of
/// length at most `derivative_budget` in the fields `h d_h` (log-h difference),
/// `zeta . d_zeta` (analytic when available, log-radius difference otherwise),
/// and `d_z` (exact spectral differentiation).
pub fn seminorm(
    a: &SymbolFamily,
    o: Orders,
    derivative_budget: usize,
    g: &SampleGrid,
) -> Result<f64> {
    let analytic = a.has_zeta_derivatives();
    if derivative_budget > 2 && !analytic {
        return Err(Error::Capability(format!(
            "derivative budget {derivative_budget} > 2 needs analytic zeta-derivative callbacks"
        )));
    }
    let log_radii: Vec<f64> = g.radii.iter().map(|r| r.ln()).collect();
    let log_hs: Vec<f64> = g.hs.iter().map(|h| h.ln()).collect();
    let mut sup = 0.0f64;
    for (q, jz, p) in words_up_to(a.dim(), derivative_budget) {
        let mut node = a.node().clone();
        for (dimz, &count) in q.iter().enumerate() {
            node = expr::z_derivative(node, dimz, count);
        }
        let mut fd_radial = jz;
        if analytic && jz > 0 {
            node = radial_derivative(node, a.dim(), jz)?;
            fd_radial = 0;
        }
        let mut field = sample_node(&node, g)?;
        for _ in 0..fd_radial {
            field.differentiate_radius(&log_radii)?;
        }
        for _ in 0..p {
            field.differentiate_h(&log_hs)?;
        }
        for r in 0..field.nr {
            for i in field.i_lo..field.i_hi {
                let zeta = g.zeta_at(r, i);
                let qn: f64 = zeta.iter().map(|c| c * c).sum();
                for j in field.j_lo..field.j_hi {
                    let weight = face_weight_scalars(o, qn, g.hs[j])?;
                    for w in 0..field.nz {
                        let ratio = field.vals[field.idx(r, i, j, w)].norm() / weight;
                        sup = sup.max(ratio);
                    }
                }
            }
        }
    }
    Ok(sup)
}

/// Which lower bound the ellipticity test compares against.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightConvention {
    /// `rho_h_inf^-m rho_h_ff^-l rho_h_0^-k` (matches the symbol class).
    ClassMatched,
    /// `rho_inf^-m h^-k` (coincides with the class weight only when l = m+k).
    Displayed,
}

#[derive(Debug, Clone, Copy)]
pub struct EllipticityConfig {
    pub threshold: f64,
    pub weight: WeightConvention,
}

impl Default for EllipticityConfig {
    fn default() -> Self {
        EllipticityConfig { threshold: 1e-3, weight: WeightConvention::ClassMatched }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EllipticityReport {
    pub elliptic: bool,
    /// Infimum of `|a| / weight` over the near-boundary region
    /// `min(rho_h_inf, rho_h_ff) <= 1/4`.
    pub margin: f64,
}

fn elliptic_weight(o: Orders, q: f64, h: f64, conv: WeightConvention) -> Result<f64> {
    match conv {
        WeightConvention::ClassMatched => face_weight_scalars(o, q, h),
        WeightConvention::Displayed => {
            let v = (1.0 + q).powf(o.m / 2.0) * h.powf(-o.k);
            if v.is_finite() {
                Ok(v)
            } else {
                Err(Error::Numeric("displayed elliptic weight overflow".into()))
            }
        }
    }
}

/// Lower-bound test for `|a|` against the class weight near the boundary.
pub fn is_elliptic(
    a: &SymbolFamily,
    o: Orders,
    g: &SampleGrid,
    cfg: &EllipticityConfig,
) -> Result<EllipticityReport> {
    let mut margin = f64::INFINITY;
    for (r, i, j, w) in g.indices() {
        let zeta = g.zeta_at(r, i);
        let q: f64 = zeta.iter().map(|c| c * c).sum();
        let h = g.hs[j];
        let bw = weights_from_scalars(q, h);
        if bw.rho_h_inf.min(bw.rho_h_ff) > 0.25 {
            continue;
        }
        let weight = elliptic_weight(o, q, h, cfg.weight)?;
        let ratio = a.eval(&g.z_points[w], &zeta, h).norm() / weight;
        margin = margin.min(ratio);
    }
    Ok(EllipticityReport { elliptic: margin > cfg.threshold, margin })
}

/// Pointwise wave-front verdicts over the sample grid (canonical order).
pub struct WavefrontField {
    pub outside: Vec<bool>,
    nr: usize,
    ni: usize,
    nj: usize,
    nz: usize,
}

impl WavefrontField {
    pub fn at(&self, ray: usize, radius: usize, h: usize, z: usize) -> bool {
        self.outside[((ray * self.ni + radius) * self.nj + h) * self.nz + z]
    }

    pub fn shape(&self) -> (usize, usize, usize, usize) {
        (self.nr, self.ni, self.nj, self.nz)
    }
}

/// Marks a grid point outside the wave front set when `|a|/face_weight(o,.)`
/// decays to order at least `probe_depth` in the local fit against
/// `log(rho_h_inf * rho_h_ff)`, or when `a` vanishes there outright.
pub fn wavefront_indicator(
    a: &SymbolFamily,
    o: Orders,
    g: &SampleGrid,
    probe_depth: usize,
) -> Result<WavefrontField> {
    if probe_depth == 0 {
        return Err(Error::Domain("probe_depth must be at least 1".into()));
    }
    let (nr, ni, nj, nz) = (g.rays.len(), g.radii.len(), g.hs.len(), g.z_points.len());
    // log(|a|/weight); None marks an exact zero of a
    let mut logs: Vec<Option<f64>> = vec![None; nr * ni * nj * nz];
    let mut xs: Vec<f64> = vec![0.0; ni * nj];
    for i in 0..ni {
        for j in 0..nj {
            let q = g.radii[i] * g.radii[i];
            let bw = weights_from_scalars(q, g.hs[j]);
            xs[i * nj + j] = (bw.rho_h_inf * bw.rho_h_ff).ln();
        }
    }
    for (r, i, j, w) in g.indices() {
        let zeta = g.zeta_at(r, i);
        let q: f64 = zeta.iter().map(|c| c * c).sum();
        let weight = face_weight_scalars(o, q, g.hs[j])?;
        let mag = a.eval(&g.z_points[w], &zeta, g.hs[j]).norm();
        if mag > 0.0 {
            logs[((r * ni + i) * nj + j) * nz + w] = Some((mag / weight).ln());
        }
    }
    let mut outside = vec![false; nr * ni * nj * nz];
    let idx = |r: usize, i: usize, j: usize, w: usize| ((r * ni + i) * nj + j) * nz + w;
    for (r, i, j, w) in g.indices() {
        if logs[idx(r, i, j, w)].is_none() {
            outside[idx(r, i, j, w)] = true; // exact vanishing
            continue;
        }
        let mut pts: Vec<(f64, f64)> = Vec::with_capacity(5);
        let push = |ii: usize, jj: usize, pts: &mut Vec<(f64, f64)>| {
            if let Some(y) = logs[idx(r, ii, jj, w)] {
                pts.push((xs[ii * nj + jj], y));
            }
        };
        push(i, j, &mut pts);
        if i > 0 {
            push(i - 1, j, &mut pts);
        }
        if i + 1 < ni {
            push(i + 1, j, &mut pts);
        }
        if j > 0 {
            push(i, j - 1, &mut pts);
        }
        if j + 1 < nj {
            push(i, j + 1, &mut pts);
        }
        if pts.len() < 3 {
            continue;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|p| p.0).sum();
        let sy: f64 = pts.iter().map(|p| p.1).sum();
        let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
        let denom = n * sxx - sx * sx;
        if denom.abs() < 1e-12 {
            continue;
        }
        let slope = (n * sxy - sx * sy) / denom;
        outside[idx(r, i, j, w)] = slope >= probe_depth as f64 - 0.25;
    }
    Ok(WavefrontField { outside, nr, ni, nj, nz })
}

/// Probe points used for the extrapolation-consistency check.
fn normal_probe_points(dim: usize) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
    let radii = [0.0, 1.0, 4.0, 32.0, 256.0, 4096.0];
    let rays: Vec<Vec<f64>> = match dim {
        1 => vec![vec![1.0], vec![-1.0]],
        _ => (0..4)
            .map(|k| {
                let t = PI * k as f64 / 2.0;
                vec![t.cos(), t.sin()]
            })
            .collect(),
    };
    let mut zetas = Vec::new();
    for r in &radii {
        for ray in &rays {
            zetas.push(ray.iter().map(|c| c * r).collect());
        }
    }
    let zs: Vec<Vec<f64>> = (0..4).map(|k| vec![PI * k as f64 / 2.0; dim]).collect();
    (zetas, zs)
}

/// Pointwise limit `n(z, zeta) = lim_{h->0} h^k a(z, zeta, h)`, checked for
/// extrapolation consistency on a probe set before being returned as a plain
/// h-independent symbol.
pub fn normal_operator_symbol(a: &SymbolFamily, k: f64) -> Result<SymbolFamily> {
    let h_probe = 1e-2;
    let (zetas, zs) = normal_probe_points(a.dim());
    for zeta in &zetas {
        for z in &zs {
            let g = |h: f64| a.eval(z, zeta, h) * Complex64::new(h.powf(k), 0.0);
            let (g1, g2, g3) = (g(h_probe), g(h_probe / 2.0), g(h_probe / 4.0));
            if !g3.re.is_finite() || !g3.im.is_finite() {
                return Err(Error::LimitDoesNotExist(format!(
                    "h^{k} * {} is non-finite near h = 0",
                    a.name()
                )));
            }
            let scale = g1.norm().max(g2.norm()).max(g3.norm()).max(1e-300);
            let d1 = (g2 - g1).norm();
            let d2 = (g3 - g2).norm();
            if d2 > 0.8 * d1 + 1e-9 * scale {
                return Err(Error::LimitDoesNotExist(format!(
                    "h^{k} * {} shows no Cauchy decay at zeta = {zeta:?} (|d1| = {d1:.3e}, |d2| = {d2:.3e})",
                    a.name()
                )));
            }
        }
    }
    let declared = a.declared_orders();
    Ok(SymbolFamily::from_node(
        expr::normal_limit(a.node().clone(), k, h_probe),
        format!("normal({}, k={k})", a.name()),
        Orders::new(declared.m, declared.l - k, 0.0),
        a.dim(),
    ))
}

/// Smallest singular value the quantized normal operator must clear.
pub fn norm_operator_threshold() -> f64 {
    1e-3
}

#[derive(Debug, Clone, Copy)]
pub struct FullEllipticityReport {
    pub fully_elliptic: bool,
    pub margin: f64,
    pub normal_margin: f64,
}

/// Ellipticity plus invertibility of the quantized normal operator on the
/// reference grid.
pub fn is_fully_elliptic(
    a: &SymbolFamily,
    o: Orders,
    g: &SampleGrid,
    reference: &GridSpec,
    cfg: &EllipticityConfig,
) -> Result<FullEllipticityReport> {
    let ell = is_elliptic(a, o, g, cfg)?;
    let normal = normal_operator_symbol(a, o.k)?;
    let mat = assemble(&normal, 1.0, reference)?;
    let normal_margin = crate::linalg::sigma_min(&mat.entries);
    Ok(FullEllipticityReport {
        fully_elliptic: ell.elliptic && normal_margin >= norm_operator_threshold(),
        margin: ell.margin,
        normal_margin,
    })
}

/// Fit of the difference `a - a2`; both must share declared orders.
pub fn principal_residual_orders(
    a: &SymbolFamily,
    a2: &SymbolFamily,
    g: &SampleGrid,
) -> Result<OrderFit> {
    if a.declared_orders() != a2.declared_orders() {
        return Err(Error::Order(format!(
            "principal comparison needs matching declared orders ({} vs {})",
            a.declared_orders(),
            a2.declared_orders()
        )));
    }
    let diff = a.sub(a2)?;
    // identically zero difference: trivially one class lower at every face
    let all_zero = g.indices().all(|(r, i, j, w)| {
        diff.eval(&g.z_points[w], &g.zeta_at(r, i), g.hs[j]).norm() == 0.0
    });
    if all_zero {
        return Ok(OrderFit {
            orders: Orders::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
            residual: 0.0,
            condition: 1.0,
            reliable: true,
        });
    }
    fit_orders(&diff, g)
}

/// True when `a` and `a2` agree modulo one order lower at semiclassical fiber
/// infinity and the front face.
pub fn share_principal(a: &SymbolFamily, a2: &SymbolFamily, g: &SampleGrid) -> Result<bool> {
    let fit = principal_residual_orders(a, a2, g)?;
    let target = a.declared_orders();
    Ok(fit.orders.m <= target.m - 1.0 + 0.2 && fit.orders.l <= target.l - 1.0 + 0.2)
}
