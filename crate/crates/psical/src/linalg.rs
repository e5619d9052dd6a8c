//! Dense complex linear-algebra helpers.
//!
//! Thin wrappers over nalgebra so the rest of the crate speaks in terms of
//! the few primitives it needs: largest/smallest singular value, inverse by
//! LU, shifted solves, and Hermitian eigendecomposition.

use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

/// Largest singular value (operator norm on unweighted l2).
pub fn sigma_max(m: &CMatrix) -> f64 {
    if is_diagonal(m) {
        return (0..m.nrows()).map(|i| m[(i, i)].norm()).fold(0.0, f64::max);
    }
    m.clone().singular_values().iter().cloned().fold(0.0, f64::max)
}

/// Smallest singular value.
pub fn sigma_min(m: &CMatrix) -> f64 {
    if is_diagonal(m) {
        return (0..m.nrows()).map(|i| m[(i, i)].norm()).fold(f64::INFINITY, f64::min);
    }
    m.clone().singular_values().iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|e| e.norm_sqr()).sum::<f64>().sqrt()
}

pub fn is_diagonal(m: &CMatrix) -> bool {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if i != j && m[(i, j)] != Complex64::new(0.0, 0.0) {
                return false;
            }
        }
    }
    true
}

/// Dense inverse by LU with a conditioning guard.
pub fn inverse(m: &CMatrix, sigma_floor: f64) -> Result<CMatrix> {
    let smin = sigma_min(m);
    if !smin.is_finite() || smin < sigma_floor {
        return Err(Error::Conditioning { sigma_min: smin });
    }
    m.clone()
        .try_inverse()
        .ok_or(Error::Conditioning { sigma_min: smin })
}

/// Solve `(z I - a) X = I` for the resolvent at a contour node.
pub fn shifted_inverse(a: &CMatrix, z: Complex64) -> Result<CMatrix> {
    let n = a.nrows();
    let mut m = -a.clone();
    for i in 0..n {
        m[(i, i)] += z;
    }
    m.try_inverse().ok_or(Error::Conditioning { sigma_min: 0.0 })
}

/// Max entrywise distance from Hermitian symmetry, relative to the scale.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let scale = m.iter().map(|e| e.norm()).fold(0.0, f64::max).max(1e-300);
    let adj = m.adjoint();
    (m - adj).iter().map(|e| e.norm()).fold(0.0, f64::max) / scale
}

/// Eigendecomposition of a Hermitian matrix: real eigenvalues + unitary columns.
pub fn hermitian_eigen(m: &CMatrix) -> Result<(Vec<f64>, CMatrix)> {
    if hermitian_defect(m) > 1e-12 {
        return Err(Error::Numeric(format!(
            "matrix is not Hermitian (relative defect {:.3e})",
            hermitian_defect(m)
        )));
    }
    let sym = nalgebra::SymmetricEigen::new(m.clone());
    let eigenvalues: Vec<f64> = sym.eigenvalues.iter().cloned().collect();
    Ok((eigenvalues, sym.eigenvectors))
}

/// `u * diag(f(lambda)) * u^H` for a Hermitian eigendecomposition.
pub fn assemble_from_eigen(
    eigenvalues: &[f64],
    vectors: &CMatrix,
    f: impl Fn(f64) -> Complex64,
) -> CMatrix {
    let n = eigenvalues.len();
    let mut d = CMatrix::zeros(n, n);
    for (i, lam) in eigenvalues.iter().enumerate() {
        d[(i, i)] = f(*lam);
    }
    vectors * d * vectors.adjoint()
}

/// Least-squares slope of `ln y` against `ln x`. Pairs with `y <= 0` are
/// dropped; fewer than two usable pairs yields `-inf` (treated as "decays
/// faster than any tested order").
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|&(&x, &y)| x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return f64::NEG_INFINITY;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

/// Least-squares fit of `y ~ X beta` by SVD; returns (beta, rms residual, condition).
pub fn least_squares(x: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, f64, f64) {
    let svd = x.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let condition = if smin <= smax * 1e-13 { f64::INFINITY } else { smax / smin };
    let beta = svd.solve(y, smax * 1e-13).expect("svd solve");
    let resid = x * &beta - y;
    let rms = (resid.norm_squared() / y.len() as f64).sqrt();
    (beta, rms, condition)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn singular_values_of_diagonal() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(3.0, 0.0), c(0.0, -1.0)]));
        assert_relative_eq!(sigma_max(&m), 3.0, epsilon = 1e-14);
        assert_relative_eq!(sigma_min(&m), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn inverse_and_guard() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 1.0)]);
        let inv = inverse(&m, 1e-12).unwrap();
        let id = &m * &inv;
        assert!(frobenius(&(&id - CMatrix::identity(2, 2))) < 1e-14);
        let sing = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0); 4]);
        assert!(matches!(inverse(&sing, 1e-12), Err(Error::Conditioning { .. })));
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let m = CMatrix::from_row_slice(
            2,
            2,
            &[c(2.0, 0.0), c(0.0, 1.0), c(0.0, -1.0), c(3.0, 0.0)],
        );
        let (vals, vecs) = hermitian_eigen(&m).unwrap();
        let back = assemble_from_eigen(&vals, &vecs, |x| c(x, 0.0));
        assert!(frobenius(&(&back - &m)) < 1e-12);
        let skew = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(0.0, 0.0)]);
        assert!(hermitian_eigen(&skew).is_err());
    }

    #[test]
    fn least_squares_recovers_plane() {
        let x = DMatrix::from_row_slice(4, 2, &[1.0, 1.0, 2.0, 1.0, 3.0, 1.0, 4.0, 1.0]);
        let y = DVector::from_vec(vec![3.0, 5.0, 7.0, 9.0]);
        let (beta, rms, cond) = least_squares(&x, &y);
        assert_relative_eq!(beta[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(beta[1], 1.0, epsilon = 1e-12);
        assert!(rms < 1e-12);
        assert!(cond.is_finite());
    }
}
