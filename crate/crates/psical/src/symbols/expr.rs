//! Expression nodes behind `SymbolFamily`.
//!
//! Symbols are closed under the operations the calculus needs (sums, products,
//! reciprocals, semiclassical rescaling, spectral z-derivatives), and every
//! node that can knows its own analytic zeta-derivative. That is what lets the
//! composition expansion and the parametrix recursion differentiate constructed
//! symbols to arbitrary order instead of falling back to noisy finite
//! differences.

use crate::fourier::{coeff_index, fft_forward, transform_len};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::Arc;

pub type NodeRef = Arc<dyn SymbolNode>;

/// Trigonometric degree in z. `Exact` means the symbol is a genuine trig
/// polynomial; `Effective` bounds where the Fourier tail drops below roundoff
/// (reciprocals of trig polynomials are analytic but not polynomial).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bandwidth {
    Exact(usize),
    Effective(usize),
}

impl Bandwidth {
    pub fn degree(self) -> usize {
        match self {
            Bandwidth::Exact(k) | Bandwidth::Effective(k) => k,
        }
    }

    pub fn is_exact(self) -> bool {
        matches!(self, Bandwidth::Exact(_))
    }

    /// Bandwidth of a product.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: Bandwidth) -> Bandwidth {
        let k = self.degree() + other.degree();
        if self.is_exact() && other.is_exact() {
            Bandwidth::Exact(k)
        } else {
            Bandwidth::Effective(k)
        }
    }

    /// Bandwidth of a sum.
    pub fn join(self, other: Bandwidth) -> Bandwidth {
        let k = self.degree().max(other.degree());
        if self.is_exact() && other.is_exact() {
            Bandwidth::Exact(k)
        } else {
            Bandwidth::Effective(k)
        }
    }
}

pub trait SymbolNode: Send + Sync {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64;

    /// Analytic `d/d zeta_dim` as a new node, `None` when unavailable.
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef>;

    fn bandwidth(&self) -> Bandwidth;

    /// Constant folding hook.
    fn as_constant(&self) -> Option<Complex64> {
        None
    }
}

fn zero() -> NodeRef {
    constant(Complex64::new(0.0, 0.0))
}

pub fn constant(c: Complex64) -> NodeRef {
    Arc::new(Constant(c))
}

struct Constant(Complex64);

impl SymbolNode for Constant {
    fn eval(&self, _z: &[f64], _zeta: &[f64], _h: f64) -> Complex64 {
        self.0
    }
    fn zeta_derivative(&self, _dim: usize) -> Option<NodeRef> {
        Some(zero())
    }
    fn bandwidth(&self) -> Bandwidth {
        Bandwidth::Exact(0)
    }
    fn as_constant(&self) -> Option<Complex64> {
        Some(self.0)
    }
}

pub fn zeta_component(dim: usize) -> NodeRef {
    Arc::new(ZetaComponent(dim))
}

struct ZetaComponent(usize);

impl SymbolNode for ZetaComponent {
    fn eval(&self, _z: &[f64], zeta: &[f64], _h: f64) -> Complex64 {
        Complex64::new(zeta[self.0], 0.0)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        Some(constant(Complex64::new(if dim == self.0 { 1.0 } else { 0.0 }, 0.0)))
    }
    fn bandwidth(&self) -> Bandwidth {
        Bandwidth::Exact(0)
    }
}

/// `<zeta>^m = (1 + |zeta|^2)^{m/2}`.
pub fn japanese_bracket(m: f64) -> NodeRef {
    Arc::new(JapaneseBracket(m))
}

struct JapaneseBracket(f64);

impl SymbolNode for JapaneseBracket {
    fn eval(&self, _z: &[f64], zeta: &[f64], _h: f64) -> Complex64 {
        let q: f64 = zeta.iter().map(|c| c * c).sum();
        Complex64::new((1.0 + q).powf(self.0 / 2.0), 0.0)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        if self.0 == 0.0 {
            return Some(zero());
        }
        Some(product(vec![
            constant(Complex64::new(self.0, 0.0)),
            zeta_component(dim),
            japanese_bracket(self.0 - 2.0),
        ]))
    }
    fn bandwidth(&self) -> Bandwidth {
        Bandwidth::Exact(0)
    }
}

/// `|zeta|^2`.
pub fn abs_zeta_sq() -> NodeRef {
    Arc::new(AbsZetaSq)
}

struct AbsZetaSq;

impl SymbolNode for AbsZetaSq {
    fn eval(&self, _z: &[f64], zeta: &[f64], _h: f64) -> Complex64 {
        Complex64::new(zeta.iter().map(|c| c * c).sum(), 0.0)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        Some(product(vec![constant(Complex64::new(2.0, 0.0)), zeta_component(dim)]))
    }
    fn bandwidth(&self) -> Bandwidth {
        Bandwidth::Exact(0)
    }
}

/// `h^p`, with the conventions `0^0 = 1` and `0^p = 0` for `p > 0`.
pub fn h_power(p: f64) -> NodeRef {
    Arc::new(HPower(p))
}

struct HPower(f64);

impl SymbolNode for HPower {
    fn eval(&self, _z: &[f64], _zeta: &[f64], h: f64) -> Complex64 {
        let v = if self.0 == 0.0 {
            1.0
        } else if h == 0.0 {
            if self.0 > 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            h.powf(self.0)
        };
        Complex64::new(v, 0.0)
    }
    fn zeta_derivative(&self, _dim: usize) -> Option<NodeRef> {
        Some(zero())
    }
    fn bandwidth(&self) -> Bandwidth {
        Bandwidth::Exact(0)
    }
}

/// `sin(z_dim)`, `cos(z_dim)`, `e^{+/- i z_dim}`.
pub fn sin_z(dim: usize) -> NodeRef {
    Arc::new(TrigZ { dim, kind: TrigKind::Sin })
}

pub fn cos_z(dim: usize) -> NodeRef {
    Arc::new(TrigZ { dim, kind: TrigKind::Cos })
}

pub fn exp_iz(dim: usize, sign: i8) -> NodeRef {
    Arc::new(TrigZ { dim, kind: TrigKind::Exp(sign) })
}

enum TrigKind {
    Sin,
    Cos,
    Exp(i8),
}

struct TrigZ {
    dim: usize,
    kind: TrigKind,
}

impl SymbolNode for TrigZ {
    fn eval(&self, z: &[f64], _zeta: &[f64], _h: f64) -> Complex64 {
        let t = z[self.dim];
        match self.kind {
            TrigKind::Sin => Complex64::new(t.sin(), 0.0),
            TrigKind::Cos => Complex64::new(t.cos(), 0.0),
            TrigKind::Exp(s) => Complex64::new(0.0, s as f64 * t).exp(),
        }
    }
    fn zeta_derivative(&self, _dim: usize) -> Option<NodeRef> {
        Some(zero())
    }
    fn bandwidth(&self) -> Bandwidth {
        Bandwidth::Exact(1)
    }
}

/// Flattening, zero-dropping sum.
pub fn sum(terms: Vec<NodeRef>) -> NodeRef {
    let mut flat: Vec<NodeRef> = Vec::new();
    let mut const_acc = Complex64::new(0.0, 0.0);
    for t in terms {
        if let Some(c) = t.as_constant() {
            const_acc += c;
        } else {
            flat.push(t);
        }
    }
    if const_acc != Complex64::new(0.0, 0.0) || flat.is_empty() {
        flat.push(constant(const_acc));
    }
    if flat.len() == 1 {
        return flat.pop().unwrap();
    }
    Arc::new(Sum(flat))
}

struct Sum(Vec<NodeRef>);

impl SymbolNode for Sum {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        self.0.iter().map(|t| t.eval(z, zeta, h)).sum()
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        let mut out = Vec::with_capacity(self.0.len());
        for t in &self.0 {
            out.push(t.zeta_derivative(dim)?);
        }
        Some(sum(out))
    }
    fn bandwidth(&self) -> Bandwidth {
        self.0
            .iter()
            .map(|t| t.bandwidth())
            .fold(Bandwidth::Exact(0), Bandwidth::join)
    }
}

/// Flattening, constant-folding product; short-circuits to zero.
pub fn product(factors: Vec<NodeRef>) -> NodeRef {
    let mut flat: Vec<NodeRef> = Vec::new();
    let mut const_acc = Complex64::new(1.0, 0.0);
    for f in factors {
        if let Some(c) = f.as_constant() {
            const_acc *= c;
        } else {
            flat.push(f);
        }
    }
    if const_acc == Complex64::new(0.0, 0.0) {
        return zero();
    }
    if const_acc != Complex64::new(1.0, 0.0) || flat.is_empty() {
        flat.insert(0, constant(const_acc));
    }
    if flat.len() == 1 {
        return flat.pop().unwrap();
    }
    Arc::new(Product(flat))
}

struct Product(Vec<NodeRef>);

impl SymbolNode for Product {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        self.0
            .iter()
            .map(|t| t.eval(z, zeta, h))
            .fold(Complex64::new(1.0, 0.0), |a, b| a * b)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        let mut terms = Vec::with_capacity(self.0.len());
        for i in 0..self.0.len() {
            let di = self.0[i].zeta_derivative(dim)?;
            let mut fac = self.0.clone();
            fac[i] = di;
            terms.push(product(fac));
        }
        Some(sum(terms))
    }
    fn bandwidth(&self) -> Bandwidth {
        self.0
            .iter()
            .map(|t| t.bandwidth())
            .fold(Bandwidth::Exact(0), Bandwidth::add)
    }
}

/// `1 / inner`. Not a trig polynomial in z once `inner` is z-dependent, so it
/// carries an effective bandwidth sized for roundoff-level Fourier tails.
pub fn recip(inner: NodeRef) -> NodeRef {
    if let Some(c) = inner.as_constant() {
        return constant(1.0 / c);
    }
    Arc::new(Recip(inner))
}

struct Recip(NodeRef);

impl SymbolNode for Recip {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        1.0 / self.0.eval(z, zeta, h)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        let d = self.0.zeta_derivative(dim)?;
        Some(product(vec![
            constant(Complex64::new(-1.0, 0.0)),
            d,
            recip(self.0.clone()),
            recip(self.0.clone()),
        ]))
    }
    fn bandwidth(&self) -> Bandwidth {
        let k = self.0.bandwidth().degree();
        if k == 0 {
            Bandwidth::Exact(0)
        } else {
            Bandwidth::Effective((64 * k).min(4096))
        }
    }
}

/// `inner(z, h*zeta, h)` - the change of variables behind the scaling identity.
pub fn semiclassical_scale(inner: NodeRef) -> NodeRef {
    Arc::new(SemiclassicalScale(inner))
}

struct SemiclassicalScale(NodeRef);

impl SymbolNode for SemiclassicalScale {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        let scaled: Vec<f64> = zeta.iter().map(|c| h * c).collect();
        self.0.eval(z, &scaled, h)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        let d = self.0.zeta_derivative(dim)?;
        Some(product(vec![h_power(1.0), semiclassical_scale(d)]))
    }
    fn bandwidth(&self) -> Bandwidth {
        self.0.bandwidth()
    }
}

/// Exact spectral `(d/dz_dim)^order` computed through the z-Fourier series.
pub fn z_derivative(inner: NodeRef, dim: usize, order: usize) -> NodeRef {
    if order == 0 {
        return inner;
    }
    Arc::new(ZDeriv { inner, dim, order })
}

struct ZDeriv {
    inner: NodeRef,
    dim: usize,
    order: usize,
}

impl SymbolNode for ZDeriv {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        let l = transform_len(self.inner.bandwidth().degree());
        let mut zz = z.to_vec();
        let mut buf: Vec<Complex64> = (0..l)
            .map(|j| {
                zz[self.dim] = 2.0 * PI * j as f64 / l as f64;
                self.inner.eval(&zz, zeta, h)
            })
            .collect();
        fft_forward(&mut buf);
        let half = (l / 2) as i64;
        let mut acc = Complex64::new(0.0, 0.0);
        for kappa in -half..half {
            let c = buf[coeff_index(kappa, l)] / l as f64;
            if c.norm_sqr() == 0.0 {
                continue;
            }
            let ik = Complex64::new(0.0, kappa as f64);
            let mut factor = Complex64::new(1.0, 0.0);
            for _ in 0..self.order {
                factor *= ik;
            }
            acc += c * factor * Complex64::new(0.0, kappa as f64 * z[self.dim]).exp();
        }
        acc
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        let d = self.inner.zeta_derivative(dim)?;
        Some(z_derivative(d, self.dim, self.order))
    }
    fn bandwidth(&self) -> Bandwidth {
        self.inner.bandwidth()
    }
}

/// Boxed evaluator signature `(z, zeta, h) -> value`.
pub type EvalFn = Arc<dyn Fn(&[f64], &[f64], f64) -> Complex64 + Send + Sync>;

/// An arbitrary user evaluator with optional first zeta-derivatives.
pub struct ClosureSpec {
    pub eval: EvalFn,
    pub zeta_derivs: Vec<NodeRef>,
    pub bandwidth: Bandwidth,
}

pub fn closure_node(spec: ClosureSpec) -> NodeRef {
    Arc::new(ClosureSym(spec))
}

struct ClosureSym(ClosureSpec);

impl SymbolNode for ClosureSym {
    fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        (self.0.eval)(z, zeta, h)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        self.0.zeta_derivs.get(dim).cloned()
    }
    fn bandwidth(&self) -> Bandwidth {
        self.0.bandwidth
    }
}

/// Pointwise limit of `h^k * inner` as `h -> 0`, by Aitken extrapolation from
/// three geometric samples. Construction-time consistency is checked by
/// `normal_operator_symbol`; per-point evaluation is deterministic.
pub fn normal_limit(inner: NodeRef, k: f64, h_probe: f64) -> NodeRef {
    Arc::new(NormalLimit { inner, k, h_probe })
}

struct NormalLimit {
    inner: NodeRef,
    k: f64,
    h_probe: f64,
}

pub(crate) fn aitken_limit(g1: Complex64, g2: Complex64, g3: Complex64) -> Complex64 {
    let d1 = g2 - g1;
    let d2 = g3 - g2;
    let den = d1 - d2;
    let scale = g1.norm().max(g2.norm()).max(g3.norm()).max(1e-300);
    if d2.norm() <= 1e-14 * scale || den.norm() <= 1e-10 * d2.norm() {
        return g3;
    }
    g3 + d2 * d2 / den
}

impl NormalLimit {
    pub(crate) fn samples(&self, z: &[f64], zeta: &[f64]) -> (Complex64, Complex64, Complex64) {
        let g = |h: f64| self.inner.eval(z, zeta, h) * Complex64::new(h.powf(self.k), 0.0);
        (g(self.h_probe), g(self.h_probe / 2.0), g(self.h_probe / 4.0))
    }
}

impl SymbolNode for NormalLimit {
    fn eval(&self, z: &[f64], zeta: &[f64], _h: f64) -> Complex64 {
        let (g1, g2, g3) = self.samples(z, zeta);
        aitken_limit(g1, g2, g3)
    }
    fn zeta_derivative(&self, dim: usize) -> Option<NodeRef> {
        let d = self.inner.zeta_derivative(dim)?;
        Some(normal_limit(d, self.k, self.h_probe))
    }
    fn bandwidth(&self) -> Bandwidth {
        self.inner.bandwidth()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn bracket_derivative_chain() {
        // d/dzeta <zeta>^3 = 3 zeta <zeta>
        let n = japanese_bracket(3.0);
        let d = n.zeta_derivative(0).unwrap();
        let got = d.eval(&[0.0], &[2.0], 0.5);
        assert_relative_eq!(got.re, 3.0 * 2.0 * 5.0f64.sqrt(), epsilon = 1e-13);
        // second derivative: 3<zeta> + 3 zeta^2 <zeta>^-1
        let d2 = d.zeta_derivative(0).unwrap();
        let got = d2.eval(&[0.0], &[2.0], 0.5);
        let want = 3.0 * 5.0f64.sqrt() + 3.0 * 4.0 / 5.0f64.sqrt();
        assert_relative_eq!(got.re, want, epsilon = 1e-13);
    }

    #[test]
    fn product_rule() {
        // d/dzeta (zeta * <zeta>^-1) at zeta=1: <z>^-1 - z^2 <z>^-3
        let n = product(vec![zeta_component(0), japanese_bracket(-1.0)]);
        let d = n.zeta_derivative(0).unwrap();
        let got = d.eval(&[0.0], &[1.0], 1.0);
        let s = 2.0f64.sqrt();
        assert_relative_eq!(got.re, 1.0 / s - 1.0 / (s * s * s), epsilon = 1e-13);
    }

    #[test]
    fn recip_derivative() {
        // d/dzeta (1/<zeta>^2) = -2 zeta <zeta>^-4
        let n = recip(japanese_bracket(2.0));
        let d = n.zeta_derivative(0).unwrap();
        let got = d.eval(&[0.0], &[3.0], 1.0);
        assert_relative_eq!(got.re, -2.0 * 3.0 / 100.0, epsilon = 1e-13);
    }

    #[test]
    fn spectral_z_derivative_is_exact_on_trig_polys() {
        // d/dz (1 + 0.3 sin z) = 0.3 cos z
        let n = sum(vec![constant(c(1.0)), product(vec![constant(c(0.3)), sin_z(0)])]);
        let d = z_derivative(n, 0, 1);
        for z in [0.0, 0.7, 2.9] {
            let got = d.eval(&[z], &[1.0], 0.5);
            assert_relative_eq!(got.re, 0.3 * z.cos(), epsilon = 1e-12);
            assert!(got.im.abs() < 1e-12);
        }
    }

    #[test]
    fn semiclassical_scale_rescales_zeta() {
        let n = semiclassical_scale(japanese_bracket(2.0));
        let got = n.eval(&[0.0], &[4.0], 0.5);
        assert_relative_eq!(got.re, 1.0 + 4.0, epsilon = 1e-14); // <0.5*4>^2 = 5
        // derivative picks up the h factor: d/dzeta <h zeta>^2 = 2 h^2 zeta
        let d = n.zeta_derivative(0).unwrap();
        let got = d.eval(&[0.0], &[4.0], 0.5);
        assert_relative_eq!(got.re, 2.0 * 0.25 * 4.0, epsilon = 1e-14);
    }

    #[test]
    fn aitken_kills_single_power() {
        // g(h) = 7 + 3 h^2 sampled at h, h/2, h/4 extrapolates exactly
        let g = |h: f64| c(7.0 + 3.0 * h * h);
        let got = aitken_limit(g(0.01), g(0.005), g(0.0025));
        assert_relative_eq!(got.re, 7.0, epsilon = 1e-12);
    }
}
