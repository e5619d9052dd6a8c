//! Numerical semiclassical-classical pseudodifferential calculus on the
//! discrete torus.
//!
//! The crate realizes, at desk scale, the calculus that treats the
//! semiclassical parameter `h` and the frequency `zeta` jointly on a blown-up
//! phase space with three boundary hypersurfaces. It provides:
//!
//! - the boundary defining functions and their product identities
//!   ([`geometry`]);
//! - symbol families with triple orders `(m, l, k)`, empirical order
//!   regression, conormal seminorms, ellipticity / wave-front probes, and
//!   normal operators ([`symbols`], [`orders`]);
//! - exact Kohn-Nirenberg quantization to dense frequency-basis matrices and
//!   the classical/semiclassical scaling identity ([`quantize`]);
//! - exact and asymptotic composition, symbolic parametrices, and the
//!   normal-operator Neumann correction ([`calculus`]);
//! - triple-weighted Sobolev norms and mapping constants ([`sobolev`]);
//! - spectral families `A - lambda/h^m`, resolvent-bound verification, and
//!   contour-integral functional calculus with an eigendecomposition oracle
//!   ([`spectral`]);
//! - a config-driven experiment runner behind the `psical` binary
//!   ([`experiments`], [`config`], [`report`]).

pub mod calculus;
pub mod config;
pub mod error;
pub mod fourier;
pub mod geometry;
pub mod linalg;
pub mod orders;
pub mod quantize;
pub mod report;
pub mod sobolev;
pub mod spectral;
pub mod symbols;

pub mod experiments;

pub use error::{Error, Result};
pub use geometry::{boundary_weights, equivalence_ratios, face_weight, BoundaryWeights, PhasePoint};
pub use orders::{classical_membership, resolve_orders, ClassicalOrders, Orders};
pub use quantize::{
    adjoint, apply, assemble, assemble_semiclassical, scale_symbol, symmetrize, GridSpec,
    OperatorMatrix, StateVector,
};
pub use sobolev::{classical_triple, semiclassical_triple, SobolevTriple};
pub use symbols::{SampleGrid, SymbolFamily};

/// Crate version string baked into reports.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
