//! Frequency-basis quantization on the torus.
//!
//! The left quantization of a symbol `a(z, zeta, h)` acts on Fourier
//! coefficients by `(Op(a) u)^(eta) = sum_zeta ahat(eta - zeta; zeta, h)
//! uhat(zeta)`, where `ahat(.; zeta, h)` are the z-Fourier coefficients of
//! `z -> a(z, zeta, h)`. On an N-point grid with symbol bandwidth `2K < N`
//! the N-point transform recovers those coefficients exactly, so the dense
//! matrix below is the operator, not an approximation of it.

use crate::error::{Error, Result};
use crate::fourier::{coeff_index, fft_forward};
use crate::linalg::{sigma_max, CMatrix, CVector};
use crate::orders::Orders;
use crate::symbols::{Bandwidth, SymbolFamily};
use num_complex::Complex64;
use rayon::prelude::*;
use std::f64::consts::PI;
use std::io::Write;

/// Discretization: `n` modes per dimension (even), frequencies in
/// `[-n/2, n/2)`, `n^d` equispaced z points on `[0, 2pi)^d`, and the h sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub dim: usize,
    pub n: usize,
    pub h_grid: Vec<f64>,
}

impl GridSpec {
    pub fn new(dim: usize, n: usize, h_grid: Vec<f64>) -> Result<Self> {
        if !(dim == 1 || dim == 2) {
            return Err(Error::Dimension(format!("grid dimension {dim} not in {{1, 2}}")));
        }
        if n < 2 || !n.is_multiple_of(2) {
            return Err(Error::Domain(format!("mode count {n} must be even and >= 2")));
        }
        if h_grid.is_empty() || h_grid.iter().any(|&h| h.is_nan() || h <= 0.0 || h > 1.0) {
            return Err(Error::Domain("h grid must be nonempty with values in (0, 1]".into()));
        }
        Ok(GridSpec { dim, n, h_grid })
    }

    /// One-dimensional grid with the default sweep `h = 2^-1 .. 2^-8`.
    pub fn d1(n: usize) -> Result<Self> {
        GridSpec::new(1, n, (1..=8).map(|j| 2f64.powi(-j)).collect())
    }

    pub fn size(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    fn axis_modes(&self) -> Vec<i64> {
        let half = self.n as i64 / 2;
        (-half..half).collect()
    }

    /// Frequency lattice in flat row-major order (last dimension fastest).
    pub fn modes(&self) -> Vec<Vec<i64>> {
        let axis = self.axis_modes();
        match self.dim {
            1 => axis.iter().map(|&k| vec![k]).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.size());
                for &k1 in &axis {
                    for &k2 in &axis {
                        out.push(vec![k1, k2]);
                    }
                }
                out
            }
        }
    }

    /// Flat index of a frequency, if on the grid.
    pub fn index_of_mode(&self, mode: &[i64]) -> Option<usize> {
        if mode.len() != self.dim {
            return None;
        }
        let half = self.n as i64 / 2;
        let mut flat = 0usize;
        for &k in mode {
            if !(-half..half).contains(&k) {
                return None;
            }
            flat = flat * self.n + (k + half) as usize;
        }
        Some(flat)
    }

    /// z sample points in flat row-major order.
    pub fn z_grid(&self) -> Vec<Vec<f64>> {
        let step = 2.0 * PI / self.n as f64;
        match self.dim {
            1 => (0..self.n).map(|j| vec![step * j as f64]).collect(),
            _ => {
                let mut out = Vec::with_capacity(self.size());
                for j1 in 0..self.n {
                    for j2 in 0..self.n {
                        out.push(vec![step * j1 as f64, step * j2 as f64]);
                    }
                }
                out
            }
        }
    }
}

/// Dense frequency-basis matrix of a quantized symbol at one `h`.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub h: f64,
    pub entries: CMatrix,
    pub orders: Orders,
    pub provenance: String,
    pub dim: usize,
    pub n: usize,
}

impl OperatorMatrix {
    pub fn identity(g: &GridSpec, h: f64) -> Self {
        OperatorMatrix {
            h,
            entries: CMatrix::identity(g.size(), g.size()),
            orders: Orders::ZERO,
            provenance: "identity".into(),
            dim: g.dim,
            n: g.n,
        }
    }

    pub fn size(&self) -> usize {
        self.entries.nrows()
    }

    /// Operator norm on unweighted l2.
    pub fn op_norm(&self) -> f64 {
        sigma_max(&self.entries)
    }

    pub fn same_grid(&self, other: &OperatorMatrix) -> bool {
        self.dim == other.dim && self.n == other.n
    }

    /// Debug dump: `row_mode, col_mode, re, im` per entry (d=1 modes printed
    /// as integers, d=2 as `k1|k2`).
    pub fn write_csv(&self, path: &std::path::Path, g: &GridSpec) -> Result<()> {
        let modes = g.modes();
        let mut f = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(f, "row,col,entry_re,entry_im")?;
        let fmt = |m: &Vec<i64>| {
            m.iter().map(|k| k.to_string()).collect::<Vec<_>>().join("|")
        };
        for r in 0..self.entries.nrows() {
            for c in 0..self.entries.ncols() {
                let e = self.entries[(r, c)];
                writeln!(f, "{},{},{:.16e},{:.16e}", fmt(&modes[r]), fmt(&modes[c]), e.re, e.im)?;
            }
        }
        Ok(())
    }
}

/// Fourier coefficient vector with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub coeffs: CVector,
}

impl StateVector {
    pub fn zeros(g: &GridSpec) -> Self {
        StateVector { coeffs: CVector::zeros(g.size()) }
    }

    /// Unit mass on a single frequency.
    pub fn delta(g: &GridSpec, mode: &[i64]) -> Result<Self> {
        let idx = g
            .index_of_mode(mode)
            .ok_or_else(|| Error::Domain(format!("mode {mode:?} not on the grid")))?;
        let mut v = Self::zeros(g);
        v.coeffs[idx] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn from_coeffs(coeffs: Vec<Complex64>) -> Self {
        StateVector { coeffs: CVector::from_vec(coeffs) }
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.norm()
    }
}

/// In-place forward DFT over each axis of a flat row-major `n^dim` array.
fn fft_nd(vals: &mut [Complex64], dim: usize, n: usize) {
    match dim {
        1 => fft_forward(vals),
        2 => {
            for row in vals.chunks_mut(n) {
                fft_forward(row);
            }
            let mut scratch = vec![Complex64::new(0.0, 0.0); n];
            for c in 0..n {
                for r in 0..n {
                    scratch[r] = vals[r * n + c];
                }
                fft_forward(&mut scratch);
                for r in 0..n {
                    vals[r * n + c] = scratch[r];
                }
            }
        }
        _ => unreachable!("GridSpec admits only d = 1, 2"),
    }
}

/// Effective truncation degree for a bandwidth on an `n`-point grid.
fn truncation_degree(bw: Bandwidth, n: usize) -> Result<usize> {
    match bw {
        Bandwidth::Exact(k) => {
            if 2 * k >= n {
                Err(Error::Aliasing(format!(
                    "z-bandwidth {k} needs more than {n} modes per dimension (2K < N)"
                )))
            } else {
                Ok(k)
            }
        }
        Bandwidth::Effective(k) => Ok(k.min(n / 2 - 1)),
    }
}

/// Largest dropped Fourier coefficient of one column; compared against the
/// whole matrix scale after assembly (a column that is itself at roundoff
/// level cannot alias anything).
fn tail_magnitude(
    coeffs: &[Complex64],
    modes_axis: &[i64],
    dim: usize,
    n: usize,
    kmax: usize,
) -> f64 {
    let mut worst = 0.0f64;
    match dim {
        1 => {
            for &kappa in modes_axis {
                if kappa.unsigned_abs() as usize > kmax {
                    worst = worst.max(coeffs[coeff_index(kappa, n)].norm());
                }
            }
        }
        _ => {
            for &k1 in modes_axis {
                for &k2 in modes_axis {
                    if k1.unsigned_abs() as usize > kmax || k2.unsigned_abs() as usize > kmax {
                        let idx = coeff_index(k1, n) * n + coeff_index(k2, n);
                        worst = worst.max(coeffs[idx].norm());
                    }
                }
            }
        }
    }
    worst
}

fn column_coeffs(
    a: &SymbolFamily,
    zeta: &[f64],
    h: f64,
    g: &GridSpec,
    modulate: Option<&[i64]>,
) -> Result<Vec<Complex64>> {
    let z_grid = g.z_grid();
    let mut vals: Vec<Complex64> = Vec::with_capacity(g.size());
    for z in &z_grid {
        let mut v = a.eval(z, zeta, h);
        if let Some(mode) = modulate {
            let phase: f64 = z.iter().zip(mode).map(|(zc, &k)| zc * k as f64).sum();
            v *= Complex64::new(0.0, phase).exp();
        }
        if !v.re.is_finite() || !v.im.is_finite() {
            return Err(Error::Numeric(format!(
                "symbol '{}' non-finite at zeta = {zeta:?}, h = {h}",
                a.name()
            )));
        }
        vals.push(v);
    }
    fft_nd(&mut vals, g.dim, g.n);
    let norm = g.size() as f64;
    for v in vals.iter_mut() {
        *v /= norm;
    }
    Ok(vals)
}

/// Assemble the dense matrix of `Op(a)` at parameter `h`:
/// `A(eta, zeta) = ahat(eta - zeta; zeta, h)`.
pub fn assemble(a: &SymbolFamily, h: f64, g: &GridSpec) -> Result<OperatorMatrix> {
    if a.dim() != g.dim {
        return Err(Error::Dimension("symbol and grid dimension differ".into()));
    }
    let kmax = truncation_degree(a.z_bandwidth(), g.n)?;
    let modes = g.modes();
    let size = g.size();
    let axis: Vec<i64> = {
        let half = g.n as i64 / 2;
        (-half..half).collect()
    };

    // z-independent symbols quantize to exact diagonal multipliers
    if kmax == 0 && a.z_bandwidth().is_exact() {
        let z0 = vec![0.0; g.dim];
        let mut entries = CMatrix::zeros(size, size);
        for (c, mode) in modes.iter().enumerate() {
            let zeta: Vec<f64> = mode.iter().map(|&k| k as f64).collect();
            let v = a.eval(&z0, &zeta, h);
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::Numeric(format!(
                    "symbol '{}' non-finite at zeta = {zeta:?}, h = {h}",
                    a.name()
                )));
            }
            entries[(c, c)] = v;
        }
        return Ok(OperatorMatrix {
            h,
            entries,
            orders: a.declared_orders(),
            provenance: format!("Op({})@h={h}", a.name()),
            dim: g.dim,
            n: g.n,
        });
    }

    let cols: Vec<Result<(Vec<Complex64>, f64, f64)>> = (0..size)
        .into_par_iter()
        .map(|c| {
            let zeta: Vec<f64> = modes[c].iter().map(|&k| k as f64).collect();
            let coeffs = column_coeffs(a, &zeta, h, g, None)?;
            let scale = coeffs.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let tail = tail_magnitude(&coeffs, &axis, g.dim, g.n, kmax);
            let mut col = vec![Complex64::new(0.0, 0.0); size];
            for (r, eta) in modes.iter().enumerate() {
                let kappa: Vec<i64> = eta.iter().zip(&modes[c]).map(|(e, z)| e - z).collect();
                if kappa.iter().any(|k| k.unsigned_abs() as usize > kmax) {
                    continue;
                }
                let idx = match g.dim {
                    1 => coeff_index(kappa[0], g.n),
                    _ => coeff_index(kappa[0], g.n) * g.n + coeff_index(kappa[1], g.n),
                };
                col[r] = coeffs[idx];
            }
            Ok((col, scale, tail))
        })
        .collect();

    let mut entries = CMatrix::zeros(size, size);
    let mut global_scale = 0.0f64;
    let mut worst_tail = 0.0f64;
    for (c, col) in cols.into_iter().enumerate() {
        let (col, scale, tail) = col?;
        global_scale = global_scale.max(scale);
        worst_tail = worst_tail.max(tail);
        for (r, v) in col.into_iter().enumerate() {
            entries[(r, c)] = v;
        }
    }
    if global_scale > 0.0 && worst_tail > 1e-12 * global_scale {
        return Err(Error::Aliasing(format!(
            "{}: dropped Fourier tail {worst_tail:.3e} exceeds 1e-12 of the operator scale {global_scale:.3e}",
            a.name()
        )));
    }
    Ok(OperatorMatrix {
        h,
        entries,
        orders: a.declared_orders(),
        provenance: format!("Op({})@h={h}", a.name()),
        dim: g.dim,
        n: g.n,
    })
}

/// The change of variables `a~(z, zeta, h) = a(z, h zeta, h)` connecting the
/// semiclassical and standard quantizations; order bookkeeping follows the
/// semiclassical embedding `(m, k) -> (m, k, k)`.
pub fn scale_symbol(a: &SymbolFamily) -> SymbolFamily {
    let declared = a.declared_orders();
    SymbolFamily::from_node(
        crate::symbols::expr::semiclassical_scale(a.node().clone()),
        format!("scaled({})", a.name()),
        Orders::new(declared.m, declared.k, declared.k),
        a.dim(),
    )
}

/// Assemble the semiclassical quantization `Op_h(a)` directly: column `zeta`
/// is the transform of `z -> a(z, h zeta, h) e^{i z . zeta}`. Agrees with
/// `assemble(scale_symbol(a), h, g)` entrywise up to roundoff, by the change
/// of variables; the two code paths share nothing past the evaluator.
pub fn assemble_semiclassical(a: &SymbolFamily, h: f64, g: &GridSpec) -> Result<OperatorMatrix> {
    if a.dim() != g.dim {
        return Err(Error::Dimension("symbol and grid dimension differ".into()));
    }
    let kmax = truncation_degree(a.z_bandwidth(), g.n)?;
    let modes = g.modes();
    let size = g.size();

    let cols: Vec<Result<Vec<Complex64>>> = (0..size)
        .into_par_iter()
        .map(|c| {
            let zeta_scaled: Vec<f64> = modes[c].iter().map(|&k| h * k as f64).collect();
            let coeffs = column_coeffs(a, &zeta_scaled, h, g, Some(&modes[c]))?;
            let mut col = vec![Complex64::new(0.0, 0.0); size];
            for (r, eta) in modes.iter().enumerate() {
                let kappa: Vec<i64> = eta.iter().zip(&modes[c]).map(|(e, z)| e - z).collect();
                if kappa.iter().any(|k| k.unsigned_abs() as usize > kmax) {
                    continue;
                }
                let idx = match g.dim {
                    1 => coeff_index(eta[0], g.n),
                    _ => coeff_index(eta[0], g.n) * g.n + coeff_index(eta[1], g.n),
                };
                col[r] = coeffs[idx];
            }
            Ok(col)
        })
        .collect();

    let mut entries = CMatrix::zeros(size, size);
    for (c, col) in cols.into_iter().enumerate() {
        let col = col?;
        for (r, v) in col.into_iter().enumerate() {
            entries[(r, c)] = v;
        }
    }
    let declared = a.declared_orders();
    Ok(OperatorMatrix {
        h,
        entries,
        orders: Orders::new(declared.m, declared.k, declared.k),
        provenance: format!("Op_h({})@h={h}", a.name()),
        dim: g.dim,
        n: g.n,
    })
}

/// Matrix-vector action.
pub fn apply(a: &OperatorMatrix, u: &StateVector) -> Result<StateVector> {
    if a.entries.ncols() != u.coeffs.len() {
        return Err(Error::Dimension(format!(
            "operator is {}x{} but state has {} coefficients",
            a.entries.nrows(),
            a.entries.ncols(),
            u.coeffs.len()
        )));
    }
    Ok(StateVector { coeffs: &a.entries * &u.coeffs })
}

/// Conjugate transpose; class orders are preserved.
pub fn adjoint(a: &OperatorMatrix) -> OperatorMatrix {
    OperatorMatrix {
        h: a.h,
        entries: a.entries.adjoint(),
        orders: a.orders,
        provenance: format!("adj({})", a.provenance),
        dim: a.dim,
        n: a.n,
    }
}

/// Hermitian part `(A + A*)/2`.
pub fn symmetrize(a: &OperatorMatrix) -> OperatorMatrix {
    let adj = a.entries.adjoint();
    OperatorMatrix {
        h: a.h,
        entries: (&a.entries + adj) * Complex64::new(0.5, 0.0),
        orders: a.orders,
        provenance: format!("sym({})", a.provenance),
        dim: a.dim,
        n: a.n,
    }
}

/// Relative Frobenius distance, normalized by the first argument's scale.
pub fn rel_frobenius(a: &CMatrix, b: &CMatrix) -> f64 {
    let denom = crate::linalg::frobenius(a).max(1e-300);
    crate::linalg::frobenius(&(a - b)) / denom
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symbols::library;
    use approx::assert_relative_eq;

    fn small_grid() -> GridSpec {
        GridSpec::new(1, 16, vec![0.5, 0.25]).unwrap()
    }

    #[test]
    fn identity_and_multiplier() {
        let g = small_grid();
        let id = assemble(&library::one(1), 0.5, &g).unwrap();
        assert_eq!(rel_frobenius(&id.entries, &CMatrix::identity(16, 16)), 0.0);

        let dz = assemble(&library::zeta(1, 0), 0.5, &g).unwrap();
        for (i, mode) in g.modes().iter().enumerate() {
            assert_eq!(dz.entries[(i, i)].re, mode[0] as f64);
        }
        assert!(crate::linalg::is_diagonal(&dz.entries));
        // operator norm of a multiplier is the max modulus over modes
        assert_relative_eq!(dz.op_norm(), 8.0, epsilon = 1e-13);
    }

    #[test]
    fn exp_iz_is_the_shift_matrix() {
        let g = small_grid();
        let shift = assemble(&library::exp_iz(1, 1), 0.5, &g).unwrap();
        let u = StateVector::delta(&g, &[0]).unwrap();
        let v = apply(&shift, &u).unwrap();
        let idx1 = g.index_of_mode(&[1]).unwrap();
        assert_relative_eq!(v.coeffs[idx1].re, 1.0, epsilon = 1e-12);
        assert!(v.coeffs.iter().enumerate().all(|(i, c)| i == idx1 || c.norm() < 1e-12));

        // Op(zeta) acting on the mode 5 delta
        let dz = assemble(&library::zeta(1, 0), 0.5, &g).unwrap();
        let u = StateVector::delta(&g, &[5]).unwrap();
        let v = apply(&dz, &u).unwrap();
        let idx5 = g.index_of_mode(&[5]).unwrap();
        assert_relative_eq!(v.coeffs[idx5].re, 5.0, epsilon = 1e-12);
    }

    #[test]
    fn assembly_is_linear() {
        let g = small_grid();
        let a = library::perturbed(1, 1.0, 0.3);
        let b = library::exp_iz(1, 1);
        let sum = a.add(&b).unwrap();
        let ma = assemble(&a, 0.5, &g).unwrap();
        let mb = assemble(&b, 0.5, &g).unwrap();
        let msum = assemble(&sum, 0.5, &g).unwrap();
        assert!(rel_frobenius(&msum.entries, &(&ma.entries + &mb.entries)) < 1e-13);
    }

    #[test]
    fn bandwidth_gate() {
        let g = GridSpec::new(1, 4, vec![0.5]).unwrap();
        // bandwidth 2 on a 4-mode grid violates 2K < N
        let wide = library::exp_iz(1, 1).mul(&library::exp_iz(1, 1)).unwrap();
        assert!(matches!(assemble(&wide, 0.5, &g), Err(Error::Aliasing(_))));
    }

    #[test]
    fn scaling_examples() {
        let a = library::japanese_bracket(1, 2.0);
        let scaled = scale_symbol(&a);
        // <h zeta>^2 = 1 + h^2 zeta^2 = rho_h_inf^-2
        assert_relative_eq!(scaled.eval1(0.0, 4.0, 0.5).re, 5.0, epsilon = 1e-14);
        assert_eq!(scaled.declared_orders(), Orders::new(2.0, 0.0, 0.0));

        let one = library::one(1);
        assert_relative_eq!(scale_symbol(&one).eval1(0.3, 7.0, 0.1).re, 1.0, epsilon = 1e-15);

        let z = library::zeta(1, 0);
        assert_relative_eq!(scale_symbol(&z).eval1(0.0, 4.0, 0.5).re, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn semiclassical_assembly_matches_scaled_standard() {
        let g = small_grid();
        for h in [1.0, 0.5, 0.125] {
            for a in [
                library::japanese_bracket(1, -2.0),
                library::perturbed(1, 1.0, 0.3),
                library::zeta(1, 0).mul(&library::zeta(1, 0)).unwrap(),
            ] {
                let direct = assemble_semiclassical(&a, h, &g).unwrap();
                let via_scaling = assemble(&scale_symbol(&a), h, &g).unwrap();
                let err = rel_frobenius(&via_scaling.entries, &direct.entries);
                assert!(err < 1e-12, "symbol {} at h={h}: rel err {err:.3e}", a.name());
            }
        }
        // h = 1 reduces Op_h to Op
        let a = library::perturbed(1, 1.0, 0.3);
        let direct = assemble_semiclassical(&a, 1.0, &g).unwrap();
        let std = assemble(&a, 1.0, &g).unwrap();
        assert!(rel_frobenius(&std.entries, &direct.entries) < 1e-12);
    }

    #[test]
    fn semiclassical_multiplier_values() {
        let g = small_grid();
        // Op_h(<zeta>^-2) is diagonal (1 + h^2 zeta^2)^-1
        let a = library::japanese_bracket(1, -2.0);
        let m = assemble_semiclassical(&a, 0.5, &g).unwrap();
        for (i, mode) in g.modes().iter().enumerate() {
            let want = 1.0 / (1.0 + 0.25 * (mode[0] * mode[0]) as f64);
            assert_relative_eq!(m.entries[(i, i)].re, want, epsilon = 1e-12);
        }
        // Op_h(zeta^2) is h^2 D^2
        let zsq = library::zeta(1, 0).mul(&library::zeta(1, 0)).unwrap();
        let m = assemble_semiclassical(&zsq, 0.5, &g).unwrap();
        for (i, mode) in g.modes().iter().enumerate() {
            assert_relative_eq!(
                m.entries[(i, i)].re,
                0.25 * (mode[0] * mode[0]) as f64,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn adjoint_of_shift_is_inverse_shift() {
        let g = small_grid();
        let shift = assemble(&library::exp_iz(1, 1), 0.5, &g).unwrap();
        let back = assemble(&library::exp_iz(1, -1), 0.5, &g).unwrap();
        assert!(rel_frobenius(&adjoint(&shift).entries, &back.entries) < 1e-12);

        // real multipliers are self-adjoint
        let dz = assemble(&library::zeta(1, 0), 0.5, &g).unwrap();
        assert!(rel_frobenius(&adjoint(&dz).entries, &dz.entries) < 1e-15);

        // symmetrization is exactly Hermitian
        let a = assemble(&library::perturbed(1, 1.0, 0.3), 0.5, &g).unwrap();
        let sym = symmetrize(&a);
        assert!(crate::linalg::hermitian_defect(&sym.entries) < 1e-15);
    }

    #[test]
    fn two_dimensional_assembly() {
        let g = GridSpec::new(2, 8, vec![0.5]).unwrap();
        let id = assemble(&library::one(2), 0.5, &g).unwrap();
        assert_eq!(rel_frobenius(&id.entries, &CMatrix::identity(64, 64)), 0.0);

        let lap = assemble(&library::laplacian(2), 0.5, &g).unwrap();
        for (i, mode) in g.modes().iter().enumerate() {
            let want = (mode[0] * mode[0] + mode[1] * mode[1]) as f64;
            assert_relative_eq!(lap.entries[(i, i)].re, want, epsilon = 1e-12);
        }

        // e^{i z_1} shifts the first frequency component
        let s = assemble(&library::exp_iz(2, 1), 0.5, &g).unwrap();
        let u = StateVector::delta(&g, &[0, 2]).unwrap();
        let v = apply(&s, &u).unwrap();
        let idx = g.index_of_mode(&[1, 2]).unwrap();
        assert_relative_eq!(v.coeffs[idx].re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn csv_dump_round_trips_entries() {
        let g = GridSpec::new(1, 4, vec![0.5]).unwrap();
        let m = assemble(&library::exp_iz(1, 1), 0.5, &g).unwrap();
        let dir = std::env::temp_dir().join("psical_quantize_csv");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("op.csv");
        m.write_csv(&path, &g).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("row,col,entry_re,entry_im"));
        // the (eta = -1, zeta = -2) entry of the shift is 1
        let row = text
            .lines()
            .find(|l| l.starts_with("-1,-2,"))
            .expect("entry row present");
        let cells: Vec<f64> = row.split(',').skip(2).map(|c| c.parse().unwrap()).collect();
        assert!((cells[0] - 1.0).abs() < 1e-12 && cells[1].abs() < 1e-12, "{row}");
        assert_eq!(text.lines().count(), 1 + 16);
        let _ = std::fs::remove_dir_all(dir);
    }

    #[test]
    fn apply_dimension_mismatch() {
        let g = small_grid();
        let id = assemble(&library::one(1), 0.5, &g).unwrap();
        let bad = StateVector::from_coeffs(vec![Complex64::new(1.0, 0.0); 7]);
        assert!(matches!(apply(&id, &bad), Err(Error::Dimension(_))));
    }
}
