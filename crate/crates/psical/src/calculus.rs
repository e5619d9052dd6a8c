//! Composition, parametrices, and the normal-operator Neumann correction.
//!
//! Composition is available twice over: exactly, as the matrix product of two
//! assembled operators, and asymptotically, as the truncated left-reduction
//! expansion `sum_{|alpha| < M} (1/alpha!) d_zeta^alpha a . D_z^alpha b` at
//! symbol level. For symbols polynomial in zeta the expansion terminates and
//! the two routes agree to roundoff.

use crate::error::{Error, Result};
use crate::linalg::{inverse, loglog_slope, sigma_max, CMatrix};
use crate::orders::Orders;
use crate::quantize::{GridSpec, OperatorMatrix};
use crate::sobolev::{operator_norm, SobolevTriple};
use crate::symbols::{expr, is_elliptic, EllipticityConfig, SampleGrid, SymbolFamily};
use num_complex::Complex64;
use rayon::prelude::*;

/// Matrix product `A . B`; orders add, grids and h must match.
pub fn compose_exact(a: &OperatorMatrix, b: &OperatorMatrix) -> Result<OperatorMatrix> {
    if !a.same_grid(b) {
        return Err(Error::Dimension("composing operators from different grids".into()));
    }
    if (a.h - b.h).abs() > 1e-15 * a.h.abs().max(b.h.abs()) {
        return Err(Error::Domain(format!(
            "composing operators at different h ({} vs {})",
            a.h, b.h
        )));
    }
    Ok(OperatorMatrix {
        h: a.h,
        entries: &a.entries * &b.entries,
        orders: a.orders + b.orders,
        provenance: format!("({}) . ({})", a.provenance, b.provenance),
        dim: a.dim,
        n: a.n,
    })
}

fn multi_indices(dim: usize, below: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    fn rec(dim: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == dim {
            out.push(cur.clone());
            return;
        }
        for c in 0..=left {
            cur.push(c);
            rec(dim, left - c, cur, out);
            cur.pop();
        }
    }
    for total in 0..below {
        let mut layer = Vec::new();
        rec(dim, total, &mut Vec::new(), &mut layer);
        for idx in layer {
            if idx.iter().sum::<usize>() == total {
                out.push(idx);
            }
        }
    }
    out
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product::<f64>().max(1.0)
}

/// Truncated composition symbol
/// `a # b = sum_{|alpha| < m_terms} (1/alpha!) d_zeta^alpha a . D_z^alpha b`
/// with `D_z = -i d_z`. Needs analytic zeta-derivatives of `a` up to order
/// `m_terms - 1`.
pub fn compose_asymptotic(
    a: &SymbolFamily,
    b: &SymbolFamily,
    m_terms: usize,
) -> Result<SymbolFamily> {
    if a.dim() != b.dim() {
        return Err(Error::Dimension("composing symbols of different dimension".into()));
    }
    if m_terms == 0 {
        return Err(Error::Domain("composition needs at least one term".into()));
    }
    let dim = a.dim();
    let mut terms: Vec<expr::NodeRef> = Vec::new();
    for alpha in multi_indices(dim, m_terms) {
        let total: usize = alpha.iter().sum();
        // d_zeta^alpha a
        let mut da = a.node().clone();
        for (d, &count) in alpha.iter().enumerate() {
            for _ in 0..count {
                da = da.zeta_derivative(d).ok_or_else(|| {
                    Error::Capability(format!(
                        "symbol '{}' lacks zeta-derivatives up to order {}",
                        a.name(),
                        m_terms - 1
                    ))
                })?;
            }
        }
        // D_z^alpha b = (-i)^|alpha| d_z^alpha b
        let mut db = b.node().clone();
        for (d, &count) in alpha.iter().enumerate() {
            db = expr::z_derivative(db, d, count);
        }
        let fact: f64 = alpha.iter().map(|&c| factorial(c)).product();
        let phase = Complex64::new(0.0, -1.0).powu(total as u32);
        terms.push(expr::product(vec![expr::constant(phase / fact), da, db]));
    }
    Ok(SymbolFamily::from_node(
        expr::sum(terms),
        format!("({} # {})", a.name(), b.name()),
        a.declared_orders() + b.declared_orders(),
        dim,
    ))
}

/// Which side the parametrix sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParametrixSide {
    Left,
    Right,
}

/// Symbolic parametrix `b = sum_{j<J} b_j` with `b_0 = 1/a` and each
/// correction chosen so `compose_asymptotic(b, a, J) = 1 + r` with `r` of
/// order `(-J, -J, 0)`. Requires grid ellipticity of `a` in its class.
pub fn parametrix_symbol(
    a: &SymbolFamily,
    o: Orders,
    j_corrections: usize,
    g: &SampleGrid,
) -> Result<SymbolFamily> {
    parametrix_symbol_sided(a, o, j_corrections, g, ParametrixSide::Left)
}

pub fn parametrix_symbol_sided(
    a: &SymbolFamily,
    o: Orders,
    j_corrections: usize,
    g: &SampleGrid,
    side: ParametrixSide,
) -> Result<SymbolFamily> {
    if j_corrections == 0 {
        return Err(Error::Domain("parametrix needs at least one term".into()));
    }
    let cfg = EllipticityConfig::default();
    let rep = is_elliptic(a, o, g, &cfg)?;
    if !rep.elliptic {
        return Err(Error::NotElliptic { margin: rep.margin, threshold: cfg.threshold });
    }
    let one = expr::constant(Complex64::new(1.0, 0.0));
    let recip_a = a.recip();
    let mut b = recip_a.clone();
    for _ in 1..j_corrections {
        let composed = match side {
            ParametrixSide::Left => compose_asymptotic(&b, a, j_corrections)?,
            ParametrixSide::Right => compose_asymptotic(a, &b, j_corrections)?,
        };
        // r = b # a - 1, next correction -r / a
        let r = expr::sum(vec![
            composed.node().clone(),
            expr::product(vec![expr::constant(Complex64::new(-1.0, 0.0)), one.clone()]),
        ]);
        let correction = expr::product(vec![
            expr::constant(Complex64::new(-1.0, 0.0)),
            r,
            recip_a.node().clone(),
        ]);
        let next = SymbolFamily::from_node(
            expr::sum(vec![b.node().clone(), correction]),
            b.name().to_string(),
            -o,
            a.dim(),
        );
        b = next;
    }
    Ok(SymbolFamily::from_node(
        b.node().clone(),
        format!("parametrix({}, J={j_corrections})", a.name()),
        -o,
        a.dim(),
    ))
}

/// How `neumann_correct` produces the corrected inverse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NeumannMode {
    /// `B_{j+1} = B_j - E_j B0`, `J` times; the remainder gains one power of
    /// the parameter decay per step.
    Iterate(usize),
    /// Direct dense solve `B = A^-1` (the limit object); `E` is solver noise.
    ExactSolve,
}

#[derive(Debug, Clone)]
pub struct NeumannOutput {
    pub corrected: Vec<OperatorMatrix>,
    pub remainders: Vec<OperatorMatrix>,
    /// `||Btilde A - I||` per h, in family order.
    pub etilde_norms: Vec<f64>,
    /// Largest grid h with `||Btilde A - I|| < 0.9`; `None` when no h
    /// satisfies the contraction condition.
    pub h_contraction: Option<f64>,
}

/// Correct a symbolic parametrix into an inverse modulo rapidly vanishing
/// remainders, per h: `B A = I + E`.
pub fn neumann_correct(
    family: &[OperatorMatrix],
    btilde: &[OperatorMatrix],
    b0_normal_inverse: &[OperatorMatrix],
    mode: NeumannMode,
    sigma_floor: f64,
) -> Result<NeumannOutput> {
    if family.len() != btilde.len() || family.len() != b0_normal_inverse.len() {
        return Err(Error::Dimension("family, parametrix, and normal inverse lengths differ".into()));
    }
    let size = match family.first() {
        Some(a) => a.size(),
        None => return Err(Error::Domain("empty operator family".into())),
    };
    let id = CMatrix::identity(size, size);

    let worked: Vec<Result<(OperatorMatrix, OperatorMatrix, f64)>> = family
        .par_iter()
        .zip(btilde)
        .zip(b0_normal_inverse)
        .map(|((a, bt), b0)| {
            let etilde = &bt.entries * &a.entries - &id;
            let etilde_norm = sigma_max(&etilde);
            let (b_entries, e_entries) = match mode {
                NeumannMode::Iterate(j_steps) => {
                    let mut b = bt.entries.clone();
                    let mut e = etilde.clone();
                    for _ in 0..j_steps {
                        b = &b - &e * &b0.entries;
                        e = &b * &a.entries - &id;
                    }
                    (b, e)
                }
                NeumannMode::ExactSolve => {
                    let b = inverse(&a.entries, sigma_floor)?;
                    let e = &b * &a.entries - &id;
                    (b, e)
                }
            };
            let b = OperatorMatrix {
                h: a.h,
                entries: b_entries,
                orders: -a.orders,
                provenance: format!("neumann({})", a.provenance),
                dim: a.dim,
                n: a.n,
            };
            let e = OperatorMatrix {
                h: a.h,
                entries: e_entries,
                orders: Orders::new(f64::NEG_INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
                provenance: format!("remainder({})", a.provenance),
                dim: a.dim,
                n: a.n,
            };
            Ok((b, e, etilde_norm))
        })
        .collect();

    let mut corrected = Vec::with_capacity(family.len());
    let mut remainders = Vec::with_capacity(family.len());
    let mut etilde_norms = Vec::with_capacity(family.len());
    for w in worked {
        let (b, e, t) = w?;
        corrected.push(b);
        remainders.push(e);
        etilde_norms.push(t);
    }
    let h_contraction = family
        .iter()
        .zip(&etilde_norms)
        .filter(|&(_, &t)| t < 0.9)
        .map(|(a, _)| a.h)
        .fold(None, |acc: Option<f64>, h| Some(acc.map_or(h, |m: f64| m.max(h))));
    Ok(NeumannOutput { corrected, remainders, etilde_norms, h_contraction })
}

#[derive(Debug, Clone)]
pub struct DecayRow {
    pub t_in: SobolevTriple,
    pub t_out: SobolevTriple,
    pub slope: f64,
    /// `(order, slope >= order - 0.2)` per tested order.
    pub verdicts: Vec<(f64, bool)>,
    pub norms: Vec<(f64, f64)>,
}

/// Least-squares slopes of `log ||E_h||` against `log h` for each Sobolev
/// pair, with pass/fail against each tested order.
pub fn remainder_decay(
    remainders: &[OperatorMatrix],
    pairs: &[(SobolevTriple, SobolevTriple)],
    orders_tested: &[f64],
    g: &GridSpec,
) -> Result<Vec<DecayRow>> {
    if remainders.len() < 4 {
        return Err(Error::Domain("remainder decay needs at least 4 h values".into()));
    }
    let hs: Vec<f64> = remainders.iter().map(|e| e.h).collect();
    let mut rows = Vec::with_capacity(pairs.len());
    for &(t_in, t_out) in pairs {
        let mut norms = Vec::with_capacity(remainders.len());
        for e in remainders {
            norms.push((e.h, operator_norm(e, t_in, t_out, g)?));
        }
        let ys: Vec<f64> = norms.iter().map(|&(_, v)| v).collect();
        let slope = loglog_slope(&hs, &ys);
        // -inf marks degenerate (vanishing) norms: faster than any order
        let degenerate = slope == f64::NEG_INFINITY;
        let verdicts =
            orders_tested.iter().map(|&m| (m, degenerate || slope >= m - 0.2)).collect();
        rows.push(DecayRow { t_in, t_out, slope, verdicts, norms });
    }
    Ok(rows)
}
