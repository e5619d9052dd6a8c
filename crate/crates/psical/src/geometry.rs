//! Defining functions of the compactified, blown-up phase space.
//!
//! The fiber-compactified cotangent bundle over the torus carries the boundary
//! defining function `rho_inf = <zeta>^-1`. Adding the parameter `h` and
//! blowing up the corner `{h = 0, rho_inf = 0}` produces three boundary
//! hypersurfaces with global defining functions
//!
//! ```text
//! rho_h_inf = (1 + h^2|zeta|^2)^-1/2          (semiclassical fiber infinity)
//! rho_h_ff  = (h^2 + (1+|zeta|^2)^-1)^1/2     (front face)
//! rho_h_0   = ((h^2 + |h zeta|^2)/(1 + |h zeta|^2))^1/2   (parameter boundary)
//! ```
//!
//! and the product identities `rho_h_0 * rho_h_ff / h` and
//! `rho_h_inf * rho_h_ff / rho_inf` are both equal to
//! `((1 + h^2 + h^2|zeta|^2)/(1 + h^2|zeta|^2))^1/2`, which lies in `[1, sqrt(2)]`.

use crate::error::{Error, Result};
use crate::orders::Orders;

/// A point `(zeta, h)` of parameter-dependent frequency space.
#[derive(Debug, Clone, PartialEq)]
pub struct PhasePoint {
    zeta: Vec<f64>,
    h: f64,
}

impl PhasePoint {
    pub fn new(zeta: &[f64], h: f64) -> Result<Self> {
        if zeta.is_empty() || zeta.iter().any(|c| !c.is_finite()) {
            return Err(Error::Domain("zeta must be a nonempty finite vector".into()));
        }
        if !(0.0..=1.0).contains(&h) {
            return Err(Error::Domain(format!("h = {h} outside [0, 1]")));
        }
        Ok(PhasePoint { zeta: zeta.to_vec(), h })
    }

    /// One-dimensional convenience constructor.
    pub fn scalar(zeta: f64, h: f64) -> Result<Self> {
        Self::new(&[zeta], h)
    }

    pub fn zeta(&self) -> &[f64] {
        &self.zeta
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn zeta_norm_sq(&self) -> f64 {
        self.zeta.iter().map(|c| c * c).sum()
    }
}

/// The four defining-function values at a phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryWeights {
    pub rho_inf: f64,
    pub rho_h_inf: f64,
    pub rho_h_ff: f64,
    pub rho_h_0: f64,
}

/// Evaluate all four defining functions at `p`.
pub fn boundary_weights(p: &PhasePoint) -> BoundaryWeights {
    weights_from_scalars(p.zeta_norm_sq(), p.h())
}

/// Scalar-kernel version: `q = |zeta|^2`.
pub(crate) fn weights_from_scalars(q: f64, h: f64) -> BoundaryWeights {
    let h2 = h * h;
    let rho_inf = 1.0 / (1.0 + q).sqrt();
    let rho_h_inf = 1.0 / (1.0 + h2 * q).sqrt();
    let rho_h_ff = (h2 + 1.0 / (1.0 + q)).sqrt();
    let rho_h_0 = ((h2 + h2 * q) / (1.0 + h2 * q)).sqrt();
    BoundaryWeights { rho_inf, rho_h_inf, rho_h_ff, rho_h_0 }
}

/// Product identities `(rho_h_0 rho_h_ff / h, rho_h_inf rho_h_ff / rho_inf)`.
///
/// Both equal `((1 + h^2 + h^2|zeta|^2)/(1 + h^2|zeta|^2))^1/2`; the first
/// requires `h > 0`.
pub fn equivalence_ratios(p: &PhasePoint) -> Result<(f64, f64)> {
    if p.h() == 0.0 {
        return Err(Error::Domain("equivalence ratio rho_h_0*rho_h_ff/h needs h > 0".into()));
    }
    let w = boundary_weights(p);
    let r_h = w.rho_h_0 * w.rho_h_ff / p.h();
    let r_inf = w.rho_h_inf * w.rho_h_ff / w.rho_inf;
    Ok((r_h, r_inf))
}

/// Class weight `rho_h_inf^-m rho_h_ff^-l rho_h_0^-k` for orders `(m, l, k)`.
pub fn face_weight(orders: Orders, p: &PhasePoint) -> Result<f64> {
    face_weight_scalars(orders, p.zeta_norm_sq(), p.h())
}

pub(crate) fn face_weight_scalars(orders: Orders, q: f64, h: f64) -> Result<f64> {
    let w = weights_from_scalars(q, h);
    if w.rho_h_0 == 0.0 && orders.k > 0.0 {
        return Err(Error::Domain(format!(
            "face weight with k = {} > 0 at the parameter boundary (rho_h_0 = 0)",
            orders.k
        )));
    }
    let value = w.rho_h_inf.powf(-orders.m) * w.rho_h_ff.powf(-orders.l)
        * if orders.k == 0.0 { 1.0 } else { w.rho_h_0.powf(-orders.k) };
    if !value.is_finite() {
        return Err(Error::Numeric(format!("face weight overflow at q={q}, h={h}")));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    const SQRT2: f64 = std::f64::consts::SQRT_2;

    #[test]
    fn weights_at_origin() {
        let w = boundary_weights(&PhasePoint::scalar(0.0, 0.0).unwrap());
        assert_eq!((w.rho_inf, w.rho_h_inf, w.rho_h_ff, w.rho_h_0), (1.0, 1.0, 1.0, 0.0));
    }

    #[test]
    fn weights_closed_form_point() {
        // direct evaluation of the closed forms at zeta = 3, h = 0.5
        let w = boundary_weights(&PhasePoint::scalar(3.0, 0.5).unwrap());
        assert_relative_eq!(w.rho_inf, 0.31623, max_relative = 1e-4);
        assert_relative_eq!(w.rho_h_inf, 0.55470, max_relative = 1e-4);
        assert_relative_eq!(w.rho_h_ff, 0.59161, max_relative = 1e-4);
        assert_relative_eq!(w.rho_h_0, 0.87706, max_relative = 1e-4);
        // cross-check against the raw formulas
        assert_relative_eq!(w.rho_h_ff, (0.25f64 + 0.1).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(w.rho_h_0, (2.5f64 / 3.25).sqrt(), epsilon = 1e-15);
    }

    #[test]
    fn weights_at_h_one() {
        let w = boundary_weights(&PhasePoint::scalar(0.0, 1.0).unwrap());
        assert_eq!(w.rho_inf, 1.0);
        assert_eq!(w.rho_h_inf, 1.0);
        assert_relative_eq!(w.rho_h_ff, SQRT2, epsilon = 1e-15);
        // main-text global form: rho_h_0(0, h) = h
        assert_relative_eq!(w.rho_h_0, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn ratios_closed_form() {
        let p = PhasePoint::scalar(3.0, 0.5).unwrap();
        let (r_h, r_inf) = equivalence_ratios(&p).unwrap();
        let expect = ((1.0f64 + 0.25 + 0.25 * 9.0) / (1.0 + 0.25 * 9.0)).sqrt();
        assert_relative_eq!(r_h, expect, epsilon = 1e-14);
        assert_relative_eq!(r_inf, expect, epsilon = 1e-14);
        assert_relative_eq!(r_h, 1.03775, max_relative = 2e-5);

        let (r_h, r_inf) = equivalence_ratios(&PhasePoint::scalar(0.0, 1.0).unwrap()).unwrap();
        assert_relative_eq!(r_h, SQRT2, epsilon = 1e-14);
        assert_relative_eq!(r_inf, SQRT2, epsilon = 1e-14);
    }

    #[test]
    fn ratio_limit_as_h_vanishes() {
        for zeta in [0.0, 1.0, 77.5, -2048.0] {
            let p = PhasePoint::scalar(zeta, 1e-9).unwrap();
            let (_, r_inf) = equivalence_ratios(&p).unwrap();
            assert_relative_eq!(r_inf, 1.0, epsilon = 1e-10);
        }
        assert!(equivalence_ratios(&PhasePoint::scalar(1.0, 0.0).unwrap()).is_err());
    }

    #[test]
    fn face_weight_examples() {
        let one = face_weight(Orders::ZERO, &PhasePoint::scalar(17.0, 0.25).unwrap()).unwrap();
        assert_eq!(one, 1.0);

        let w = face_weight(Orders::new(2.0, 2.0, 2.0), &PhasePoint::scalar(0.0, 0.5).unwrap())
            .unwrap();
        assert_relative_eq!(w, 3.2, epsilon = 1e-12); // 1 * (1.25)^-1 * (0.25)^-1

        let w = face_weight(Orders::new(1.0, 1.0, 0.0), &PhasePoint::scalar(3.0, 0.5).unwrap())
            .unwrap();
        assert_relative_eq!(w, 1.0 / (0.55470 * 0.59161), max_relative = 1e-4);
        assert_relative_eq!(w, 3.0475, max_relative = 1e-4);
    }

    #[test]
    fn face_weight_parameter_boundary_error() {
        let p = PhasePoint::scalar(2.0, 0.0).unwrap();
        assert!(face_weight(Orders::new(0.0, 0.0, 1.0), &p).is_err());
        // k <= 0 stays total at h = 0
        assert!(face_weight(Orders::new(1.0, 1.0, 0.0), &p).is_ok());
        assert!(face_weight(Orders::new(0.0, 0.0, -1.0), &p).is_ok());
    }

    #[test]
    fn monotone_limits() {
        // rho_h_ff -> h as |zeta| -> inf at fixed h > 0
        let h = 0.25;
        let w = boundary_weights(&PhasePoint::scalar(1e8, h).unwrap());
        assert_relative_eq!(w.rho_h_ff, h, max_relative = 1e-15);
        // rho_h_inf -> 1 as h -> 0 at fixed zeta
        let w = boundary_weights(&PhasePoint::scalar(42.0, 1e-12).unwrap());
        assert_relative_eq!(w.rho_h_inf, 1.0, epsilon = 1e-15);
    }
}
