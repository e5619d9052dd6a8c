//! Symbol families with triple orders, the built-in library, and the
//! empirical order/seminorm/ellipticity analysis.

pub mod analysis;
pub mod expr;
pub mod grid;
pub mod library;

pub use analysis::{
    fit_orders, is_elliptic, is_fully_elliptic, norm_operator_threshold, normal_operator_symbol,
    principal_residual_orders, seminorm, share_principal, wavefront_indicator, EllipticityConfig,
    EllipticityReport, FullEllipticityReport, OrderFit, WavefrontField, WeightConvention,
};
pub use expr::{Bandwidth, ClosureSpec, NodeRef};
pub use grid::SampleGrid;

use crate::error::{Error, Result};
use crate::orders::Orders;
use num_complex::Complex64;
use std::sync::Arc;

/// An h-dependent symbol `a(z, zeta, h)` together with its declared triple
/// orders, dimension, and z-bandwidth. Immutable after construction; cloning
/// shares the expression tree.
#[derive(Clone)]
pub struct SymbolFamily {
    node: NodeRef,
    name: String,
    declared: Orders,
    dim: usize,
}

impl SymbolFamily {
    pub fn from_node(node: NodeRef, name: impl Into<String>, declared: Orders, dim: usize) -> Self {
        SymbolFamily { node, name: name.into(), declared, dim }
    }

    /// Wrap a plain evaluator (no analytic derivatives).
    pub fn from_closure(
        f: impl Fn(&[f64], &[f64], f64) -> Complex64 + Send + Sync + 'static,
        name: impl Into<String>,
        declared: Orders,
        dim: usize,
        bandwidth: Bandwidth,
    ) -> Self {
        let node = expr::closure_node(ClosureSpec {
            eval: Arc::new(f),
            zeta_derivs: Vec::new(),
            bandwidth,
        });
        SymbolFamily::from_node(node, name, declared, dim)
    }

    pub fn eval(&self, z: &[f64], zeta: &[f64], h: f64) -> Complex64 {
        debug_assert_eq!(zeta.len(), self.dim);
        self.node.eval(z, zeta, h)
    }

    /// One-dimensional convenience.
    pub fn eval1(&self, z: f64, zeta: f64, h: f64) -> Complex64 {
        self.eval(&[z], &[zeta], h)
    }

    pub fn node(&self) -> &NodeRef {
        &self.node
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn declared_orders(&self) -> Orders {
        self.declared
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn z_bandwidth(&self) -> Bandwidth {
        self.node.bandwidth()
    }

    pub fn has_zeta_derivatives(&self) -> bool {
        (0..self.dim).all(|j| self.node.zeta_derivative(j).is_some())
    }

    /// Analytic `d/d zeta_dim`; lowers the first two orders by one.
    pub fn zeta_derivative(&self, dim: usize) -> Option<SymbolFamily> {
        let node = self.node.zeta_derivative(dim)?;
        Some(SymbolFamily::from_node(
            node,
            format!("d_zeta[{dim}]({})", self.name),
            Orders::new(self.declared.m - 1.0, self.declared.l - 1.0, self.declared.k),
            self.dim,
        ))
    }

    /// Exact spectral `(d/dz_dim)^order`; orders unchanged.
    pub fn z_derivative(&self, dim: usize, order: usize) -> SymbolFamily {
        SymbolFamily::from_node(
            expr::z_derivative(self.node.clone(), dim, order),
            format!("d_z[{dim}]^{order}({})", self.name),
            self.declared,
            self.dim,
        )
    }

    pub fn add(&self, other: &SymbolFamily) -> Result<SymbolFamily> {
        self.check_dim(other)?;
        let declared = Orders::new(
            self.declared.m.max(other.declared.m),
            self.declared.l.max(other.declared.l),
            self.declared.k.max(other.declared.k),
        );
        Ok(SymbolFamily::from_node(
            expr::sum(vec![self.node.clone(), other.node.clone()]),
            format!("({} + {})", self.name, other.name),
            declared,
            self.dim,
        ))
    }

    pub fn sub(&self, other: &SymbolFamily) -> Result<SymbolFamily> {
        self.check_dim(other)?;
        let neg = expr::product(vec![expr::constant(Complex64::new(-1.0, 0.0)), other.node.clone()]);
        let declared = Orders::new(
            self.declared.m.max(other.declared.m),
            self.declared.l.max(other.declared.l),
            self.declared.k.max(other.declared.k),
        );
        Ok(SymbolFamily::from_node(
            expr::sum(vec![self.node.clone(), neg]),
            format!("({} - {})", self.name, other.name),
            declared,
            self.dim,
        ))
    }

    pub fn mul(&self, other: &SymbolFamily) -> Result<SymbolFamily> {
        self.check_dim(other)?;
        Ok(SymbolFamily::from_node(
            expr::product(vec![self.node.clone(), other.node.clone()]),
            format!("({} * {})", self.name, other.name),
            self.declared + other.declared,
            self.dim,
        ))
    }

    pub fn scale(&self, c: Complex64) -> SymbolFamily {
        SymbolFamily::from_node(
            expr::product(vec![expr::constant(c), self.node.clone()]),
            format!("({c} * {})", self.name),
            self.declared,
            self.dim,
        )
    }

    pub fn recip(&self) -> SymbolFamily {
        SymbolFamily::from_node(
            expr::recip(self.node.clone()),
            format!("1/({})", self.name),
            -self.declared,
            self.dim,
        )
    }

    fn check_dim(&self, other: &SymbolFamily) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::Dimension(format!(
                "symbol dimensions differ: {} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(())
    }
}

impl std::fmt::Debug for SymbolFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SymbolFamily")
            .field("name", &self.name)
            .field("orders", &self.declared)
            .field("dim", &self.dim)
            .field("bandwidth", &self.z_bandwidth())
            .finish()
    }
}
