//! Built-in symbol library, referenced by name from experiment configs.

use super::expr;
use super::SymbolFamily;
use crate::error::{Error, Result};
use crate::orders::Orders;
use num_complex::Complex64;

/// The constant symbol 1.
pub fn one(dim: usize) -> SymbolFamily {
    SymbolFamily::from_node(expr::constant(Complex64::new(1.0, 0.0)), "one", Orders::ZERO, dim)
}

/// `<zeta>^m`, orders `(m, m, 0)`.
pub fn japanese_bracket(dim: usize, m: f64) -> SymbolFamily {
    SymbolFamily::from_node(
        expr::japanese_bracket(m),
        format!("japanese_bracket({m})"),
        Orders::new(m, m, 0.0),
        dim,
    )
}

/// `<zeta>^m (1 + eps sin z_1)`, orders `(m, m, 0)`.
pub fn perturbed(dim: usize, m: f64, eps: f64) -> SymbolFamily {
    let factor = expr::sum(vec![
        expr::constant(Complex64::new(1.0, 0.0)),
        expr::product(vec![expr::constant(Complex64::new(eps, 0.0)), expr::sin_z(0)]),
    ]);
    SymbolFamily::from_node(
        expr::product(vec![expr::japanese_bracket(m), factor]),
        format!("perturbed({m},{eps})"),
        Orders::new(m, m, 0.0),
        dim,
    )
}

/// `|zeta|^2`, orders `(2, 2, 0)`.
pub fn laplacian(dim: usize) -> SymbolFamily {
    SymbolFamily::from_node(expr::abs_zeta_sq(), "laplacian", Orders::new(2.0, 2.0, 0.0), dim)
}

/// `<zeta>^m h^-k`, orders `(m, m+k, k)`.
pub fn monomial(dim: usize, m: f64, k: f64) -> SymbolFamily {
    SymbolFamily::from_node(
        expr::product(vec![expr::japanese_bracket(m), expr::h_power(-k)]),
        format!("monomial({m},{k})"),
        Orders::new(m, m + k, k),
        dim,
    )
}

/// Spectral family `base - lambda / h^m`, orders `(m, m, m)`.
pub fn sc_spectral(base: &SymbolFamily, m: f64, lambda: Complex64) -> SymbolFamily {
    let shift = expr::product(vec![expr::constant(-lambda), expr::h_power(-m)]);
    SymbolFamily::from_node(
        expr::sum(vec![base.node().clone(), shift]),
        format!("sc_spectral({}, m={m}, lambda={lambda})", base.name()),
        Orders::new(m, m, m),
        base.dim(),
    )
}

/// The coordinate symbol `zeta_component`, orders `(1, 1, 0)`.
pub fn zeta(dim: usize, component: usize) -> SymbolFamily {
    SymbolFamily::from_node(
        expr::zeta_component(component),
        format!("zeta[{component}]"),
        Orders::new(1.0, 1.0, 0.0),
        dim,
    )
}

/// `e^{+/- i z_1}`, orders `(0, 0, 0)`, bandwidth 1.
pub fn exp_iz(dim: usize, sign: i8) -> SymbolFamily {
    SymbolFamily::from_node(
        expr::exp_iz(0, sign),
        if sign >= 0 { "exp_iz" } else { "exp_minus_iz" },
        Orders::ZERO,
        dim,
    )
}

/// `cos z_1` helper used by the symmetrized functional-calculus example.
pub fn cos_z(dim: usize) -> SymbolFamily {
    SymbolFamily::from_node(expr::cos_z(0), "cos_z", Orders::ZERO, dim)
}

/// Parameters for [`by_name`].
#[derive(Debug, Clone, Copy, Default)]
pub struct SymbolParams {
    pub m: Option<f64>,
    pub k: Option<f64>,
    pub eps: Option<f64>,
}

/// Resolve a config-level symbol name. `sc_spectral` is intentionally absent:
/// spectral families are assembled by the spectral experiments from a base
/// symbol and a spectral parameter.
pub fn by_name(name: &str, dim: usize, p: SymbolParams) -> Result<SymbolFamily> {
    let need = |v: Option<f64>, what: &str| {
        v.ok_or_else(|| Error::Config(format!("symbol '{name}' needs parameter {what}")))
    };
    match name {
        "one" => Ok(one(dim)),
        "japanese_bracket" => Ok(japanese_bracket(dim, need(p.m, "m")?)),
        "perturbed" => Ok(perturbed(dim, need(p.m, "m")?, need(p.eps, "eps")?)),
        "laplacian" => Ok(laplacian(dim)),
        "monomial" => Ok(monomial(dim, need(p.m, "m")?, need(p.k, "k")?)),
        "zeta" => Ok(zeta(dim, 0)),
        "exp_iz" => Ok(exp_iz(dim, 1)),
        _ => Err(Error::Config(format!("unknown built-in symbol '{name}'"))),
    }
}

/// The library sweep used by whole-library checks (scaling identity, etc.).
pub fn builtin_suite(dim: usize) -> Vec<SymbolFamily> {
    let mut v = vec![
        one(dim),
        japanese_bracket(dim, 2.0),
        japanese_bracket(dim, -1.0),
        perturbed(dim, 1.0, 0.3),
        laplacian(dim),
        monomial(dim, 1.0, 1.0),
        monomial(dim, 2.0, 2.0),
        zeta(dim, 0),
        exp_iz(dim, 1),
    ];
    v.push(sc_spectral(&laplacian(dim), 2.0, Complex64::new(0.0, 1.0)));
    v
}
