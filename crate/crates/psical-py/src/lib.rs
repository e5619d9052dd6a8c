//! Python bindings for the psical toolkit: symbol families, boundary
//! weights, quantization, Sobolev norms, resolvents, and the contour
//! functional calculus.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use psical::calculus;
use psical::orders::Orders;
use psical::quantize;
use psical::sobolev;
use psical::spectral;
use psical::symbols::{self, library, EllipticityConfig, SampleGrid, SymbolFamily};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

/// The four boundary defining functions at `(zeta, h)`:
/// `(rho_inf, rho_h_inf, rho_h_ff, rho_h_0)`.
#[pyfunction]
fn boundary_weights(zeta: Vec<f64>, h: f64) -> PyResult<(f64, f64, f64, f64)> {
    let p = psical::PhasePoint::new(&zeta, h).map_err(err)?;
    let w = psical::boundary_weights(&p);
    Ok((w.rho_inf, w.rho_h_inf, w.rho_h_ff, w.rho_h_0))
}

/// The product identities `(rho_h_0 rho_h_ff / h, rho_h_inf rho_h_ff / rho_inf)`.
#[pyfunction]
fn equivalence_ratios(zeta: Vec<f64>, h: f64) -> PyResult<(f64, f64)> {
    let p = psical::PhasePoint::new(&zeta, h).map_err(err)?;
    psical::equivalence_ratios(&p).map_err(err)
}

/// Class weight `rho_h_inf^-m rho_h_ff^-l rho_h_0^-k`.
#[pyfunction]
fn face_weight(m: f64, l: f64, k: f64, zeta: Vec<f64>, h: f64) -> PyResult<f64> {
    let p = psical::PhasePoint::new(&zeta, h).map_err(err)?;
    psical::face_weight(Orders::new(m, l, k), &p).map_err(err)
}

/// Lift two-index orders onto the resolved space: `(m, k) -> (m, m+k, k)`.
#[pyfunction]
fn resolve_orders(m: f64, k: f64) -> (f64, f64, f64) {
    let o = psical::resolve_orders(psical::ClassicalOrders::new(m, k));
    (o.m, o.l, o.k)
}

/// Minimal classical differential order embedding `(m, l, k)` at `k_target`.
#[pyfunction]
fn classical_membership(m: f64, l: f64, k: f64, k_target: f64) -> PyResult<f64> {
    psical::classical_membership(Orders::new(m, l, k), k_target).map_err(err)
}

/// A symbol family with declared triple orders.
#[pyclass(name = "Symbol", skip_from_py_object)]
struct PySymbol {
    inner: SymbolFamily,
}

#[pymethods]
impl PySymbol {
    /// `<zeta>^m`.
    #[staticmethod]
    fn japanese_bracket(m: f64) -> Self {
        PySymbol { inner: library::japanese_bracket(1, m) }
    }

    /// `<zeta>^m (1 + eps sin z)`.
    #[staticmethod]
    fn perturbed(m: f64, eps: f64) -> Self {
        PySymbol { inner: library::perturbed(1, m, eps) }
    }

    /// `|zeta|^2`.
    #[staticmethod]
    fn laplacian() -> Self {
        PySymbol { inner: library::laplacian(1) }
    }

    /// `<zeta>^m h^-k`.
    #[staticmethod]
    fn monomial(m: f64, k: f64) -> Self {
        PySymbol { inner: library::monomial(1, m, k) }
    }

    /// The coordinate symbol `zeta`.
    #[staticmethod]
    fn zeta() -> Self {
        PySymbol { inner: library::zeta(1, 0) }
    }

    /// `e^{i z}`.
    #[staticmethod]
    fn exp_iz() -> Self {
        PySymbol { inner: library::exp_iz(1, 1) }
    }

    /// Spectral family `base - lambda / h^m`.
    #[staticmethod]
    fn sc_spectral(base: &PySymbol, m: f64, lambda: Complex64) -> Self {
        PySymbol { inner: library::sc_spectral(&base.inner, m, lambda) }
    }

    fn eval(&self, z: f64, zeta: f64, h: f64) -> Complex64 {
        self.inner.eval1(z, zeta, h)
    }

    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    /// Declared `(m, l, k)`.
    fn orders(&self) -> (f64, f64, f64) {
        let o = self.inner.declared_orders();
        (o.m, o.l, o.k)
    }

    fn add(&self, other: &PySymbol) -> PyResult<PySymbol> {
        Ok(PySymbol { inner: self.inner.add(&other.inner).map_err(err)? })
    }

    fn mul(&self, other: &PySymbol) -> PyResult<PySymbol> {
        Ok(PySymbol { inner: self.inner.mul(&other.inner).map_err(err)? })
    }

    fn scale(&self, c: Complex64) -> PySymbol {
        PySymbol { inner: self.inner.scale(c) }
    }

    fn recip(&self) -> PySymbol {
        PySymbol { inner: self.inner.recip() }
    }

    /// The rescaled symbol `a(z, h zeta, h)` of the scaling identity.
    fn scaled_to_semiclassical(&self) -> PySymbol {
        PySymbol { inner: quantize::scale_symbol(&self.inner) }
    }

    /// Least-squares order regression on the default sample grid:
    /// `(m, l, k, rms_residual, condition)`.
    fn fit_orders(&self) -> PyResult<(f64, f64, f64, f64, f64)> {
        let g = SampleGrid::default_for_dim(1);
        let fit = symbols::fit_orders(&self.inner, &g).map_err(err)?;
        Ok((fit.orders.m, fit.orders.l, fit.orders.k, fit.residual, fit.condition))
    }

    /// Conormal seminorm at orders `(m, l, k)` with the given derivative budget.
    fn seminorm(&self, m: f64, l: f64, k: f64, budget: usize) -> PyResult<f64> {
        let g = SampleGrid::default_for_dim(1);
        symbols::seminorm(&self.inner, Orders::new(m, l, k), budget, &g).map_err(err)
    }

    /// `(elliptic, margin)` in the class `(m, l, k)`.
    fn is_elliptic(&self, m: f64, l: f64, k: f64) -> PyResult<(bool, f64)> {
        let g = SampleGrid::default_for_dim(1);
        let rep = symbols::is_elliptic(
            &self.inner,
            Orders::new(m, l, k),
            &g,
            &EllipticityConfig::default(),
        )
        .map_err(err)?;
        Ok((rep.elliptic, rep.margin))
    }

    /// The normal operator symbol `lim h^k a` as a new (h-independent) symbol.
    fn normal_operator(&self, k: f64) -> PyResult<PySymbol> {
        Ok(PySymbol { inner: symbols::normal_operator_symbol(&self.inner, k).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("Symbol({}, orders={:?})", self.inner.name(), self.orders())
    }
}

/// A one-dimensional quantization grid with `n` modes.
#[pyclass(name = "Grid", skip_from_py_object)]
struct PyGrid {
    inner: quantize::GridSpec,
}

#[pymethods]
impl PyGrid {
    #[new]
    #[pyo3(signature = (n, h_grid = None))]
    fn new(n: usize, h_grid: Option<Vec<f64>>) -> PyResult<Self> {
        let inner = match h_grid {
            Some(hs) => quantize::GridSpec::new(1, n, hs).map_err(err)?,
            None => quantize::GridSpec::d1(n).map_err(err)?,
        };
        Ok(PyGrid { inner })
    }

    fn size(&self) -> usize {
        self.inner.size()
    }

    /// Frequencies in matrix order.
    fn modes(&self) -> Vec<i64> {
        self.inner.modes().iter().map(|m| m[0]).collect()
    }

    fn h_grid(&self) -> Vec<f64> {
        self.inner.h_grid.clone()
    }
}

/// A dense frequency-basis operator matrix at one `h`.
#[pyclass(name = "Operator", skip_from_py_object)]
struct PyOperator {
    inner: quantize::OperatorMatrix,
    grid: quantize::GridSpec,
}

#[pymethods]
impl PyOperator {
    fn shape(&self) -> (usize, usize) {
        (self.inner.entries.nrows(), self.inner.entries.ncols())
    }

    fn h(&self) -> f64 {
        self.inner.h
    }

    fn provenance(&self) -> String {
        self.inner.provenance.clone()
    }

    /// Entry by matrix indices (rows/columns in `Grid.modes()` order).
    fn entry(&self, row: usize, col: usize) -> PyResult<Complex64> {
        if row >= self.inner.entries.nrows() || col >= self.inner.entries.ncols() {
            return Err(PyValueError::new_err("index out of range"));
        }
        Ok(self.inner.entries[(row, col)])
    }

    /// Entry by frequency pair `(eta, zeta)`.
    fn entry_at_modes(&self, eta: i64, zeta: i64) -> PyResult<Complex64> {
        let r = self
            .grid
            .index_of_mode(&[eta])
            .ok_or_else(|| PyValueError::new_err(format!("mode {eta} not on the grid")))?;
        let c = self
            .grid
            .index_of_mode(&[zeta])
            .ok_or_else(|| PyValueError::new_err(format!("mode {zeta} not on the grid")))?;
        Ok(self.inner.entries[(r, c)])
    }

    /// Row-major list of all entries.
    fn to_list(&self) -> Vec<Complex64> {
        let n = self.inner.entries.nrows();
        let mut out = Vec::with_capacity(n * n);
        for r in 0..n {
            for c in 0..n {
                out.push(self.inner.entries[(r, c)]);
            }
        }
        out
    }

    /// Operator norm on unweighted l2.
    fn op_norm(&self) -> f64 {
        self.inner.op_norm()
    }

    /// Largest singular value as a map `H^{t_in} -> H^{t_out}` between
    /// triple-weighted spaces.
    fn operator_norm(&self, t_in: (f64, f64, f64), t_out: (f64, f64, f64)) -> PyResult<f64> {
        sobolev::operator_norm(
            &self.inner,
            sobolev::SobolevTriple::new(t_in.0, t_in.1, t_in.2),
            sobolev::SobolevTriple::new(t_out.0, t_out.1, t_out.2),
            &self.grid,
        )
        .map_err(err)
    }

    fn apply(&self, coeffs: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let u = quantize::StateVector::from_coeffs(coeffs);
        let v = quantize::apply(&self.inner, &u).map_err(err)?;
        Ok(v.coeffs.iter().cloned().collect())
    }

    fn adjoint(&self) -> PyOperator {
        PyOperator { inner: quantize::adjoint(&self.inner), grid: self.grid.clone() }
    }

    fn symmetrize(&self) -> PyOperator {
        PyOperator { inner: quantize::symmetrize(&self.inner), grid: self.grid.clone() }
    }

    /// Matrix product `self . other`.
    fn compose(&self, other: &PyOperator) -> PyResult<PyOperator> {
        Ok(PyOperator {
            inner: calculus::compose_exact(&self.inner, &other.inner).map_err(err)?,
            grid: self.grid.clone(),
        })
    }

    /// Relative Frobenius distance to another operator.
    fn frobenius_distance(&self, other: &PyOperator) -> f64 {
        quantize::rel_frobenius(&self.inner.entries, &other.inner.entries)
    }
}

/// Quantize `Op(a)` at parameter `h`.
#[pyfunction]
fn assemble(symbol: &PySymbol, h: f64, grid: &PyGrid) -> PyResult<PyOperator> {
    Ok(PyOperator {
        inner: quantize::assemble(&symbol.inner, h, &grid.inner).map_err(err)?,
        grid: grid.inner.clone(),
    })
}

/// Quantize the semiclassical `Op_h(a)` directly.
#[pyfunction]
fn assemble_semiclassical(symbol: &PySymbol, h: f64, grid: &PyGrid) -> PyResult<PyOperator> {
    Ok(PyOperator {
        inner: quantize::assemble_semiclassical(&symbol.inner, h, &grid.inner).map_err(err)?,
        grid: grid.inner.clone(),
    })
}

/// Dense resolvent `(Op(a) - lambda/h^m)^-1`.
#[pyfunction]
fn resolvent(
    symbol: &PySymbol,
    lambda: Complex64,
    m: f64,
    h: f64,
    grid: &PyGrid,
) -> PyResult<PyOperator> {
    let sp = spectral::SpectralParameter::new(lambda, m).map_err(err)?;
    Ok(PyOperator {
        inner: spectral::resolvent(&symbol.inner, &sp, h, &grid.inner, 1e-13).map_err(err)?,
        grid: grid.inner.clone(),
    })
}

/// `A^-s` by conformal contour quadrature; returns `(operator, error_estimate)`.
#[pyfunction]
fn complex_power(op: &PyOperator, s: Complex64, nodes: usize) -> PyResult<(PyOperator, f64)> {
    let spec = spectral::ContourSpec::conformal(nodes, s).map_err(err)?;
    let out = spectral::complex_power(&op.inner, &spec).map_err(err)?;
    Ok((PyOperator { inner: out.matrix, grid: op.grid.clone() }, out.error_estimate))
}

/// `A^-s` by Hermitian eigendecomposition (the independent oracle).
#[pyfunction]
fn eigen_oracle_power(op: &PyOperator, s: Complex64) -> PyResult<PyOperator> {
    Ok(PyOperator {
        inner: spectral::eigen_oracle_power(&op.inner, s).map_err(err)?,
        grid: op.grid.clone(),
    })
}

/// Triple-weighted Sobolev norm of a coefficient vector.
#[pyfunction]
fn sobolev_norm(
    coeffs: Vec<Complex64>,
    s: f64,
    r: f64,
    p: f64,
    h: f64,
    grid: &PyGrid,
) -> PyResult<f64> {
    let u = quantize::StateVector::from_coeffs(coeffs);
    sobolev::norm(&u, sobolev::SobolevTriple::new(s, r, p), h, &grid.inner).map_err(err)
}

/// `H^{s,p} = H^{s,s+p,p}`.
#[pyfunction]
fn classical_triple(s: f64, p: f64) -> (f64, f64, f64) {
    let t = sobolev::classical_triple(s, p);
    (t.s, t.r, t.p)
}

/// `H_h^{s,r} = H^{s,r,r}`.
#[pyfunction]
fn semiclassical_triple(s: f64, r: f64) -> (f64, f64, f64) {
    let t = sobolev::semiclassical_triple(s, r);
    (t.s, t.r, t.p)
}

#[pymodule]
fn psical_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(boundary_weights, m)?)?;
    m.add_function(wrap_pyfunction!(equivalence_ratios, m)?)?;
    m.add_function(wrap_pyfunction!(face_weight, m)?)?;
    m.add_function(wrap_pyfunction!(resolve_orders, m)?)?;
    m.add_function(wrap_pyfunction!(classical_membership, m)?)?;
    m.add_function(wrap_pyfunction!(assemble, m)?)?;
    m.add_function(wrap_pyfunction!(assemble_semiclassical, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(complex_power, m)?)?;
    m.add_function(wrap_pyfunction!(eigen_oracle_power, m)?)?;
    m.add_function(wrap_pyfunction!(sobolev_norm, m)?)?;
    m.add_function(wrap_pyfunction!(classical_triple, m)?)?;
    m.add_function(wrap_pyfunction!(semiclassical_triple, m)?)?;
    m.add_class::<PySymbol>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyOperator>()?;
    m.add("__version__", psical::VERSION)?;
    Ok(())
}
