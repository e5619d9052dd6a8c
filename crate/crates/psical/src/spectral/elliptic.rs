//! Complete elliptic integrals and Jacobi elliptic functions for complex
//! argument, via the arithmetic-geometric mean and theta series. Used to put
//! quadrature nodes on a conformally-balanced contour around a positive
//! spectrum while staying clear of the branch cut on `(-inf, 0]`.

use num_complex::Complex64;

/// Complete elliptic integral `K(k)` by the arithmetic-geometric mean.
pub fn ellip_k(k: f64) -> f64 {
    debug_assert!((0.0..1.0).contains(&k));
    let mut a = 1.0f64;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    std::f64::consts::PI / (2.0 * a)
}

fn theta_series(v: Complex64, q: f64) -> (Complex64, Complex64, Complex64, Complex64) {
    let one = Complex64::new(1.0, 0.0);
    let mut th1 = Complex64::new(0.0, 0.0);
    let mut th2 = Complex64::new(0.0, 0.0);
    let mut th3 = one;
    let mut th4 = one;
    for n in 0..60usize {
        let half = n as f64 + 0.5;
        let q_half = q.powf(half * half);
        let arg = v * (2.0 * n as f64 + 1.0);
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        th1 += 2.0 * q_half * sign * arg.sin();
        th2 += 2.0 * q_half * arg.cos();
        let np = (n + 1) as f64;
        let q_n = q.powf(np * np);
        let argn = v * (2.0 * np);
        th3 += 2.0 * q_n * argn.cos();
        th4 += 2.0 * q_n * (if (n + 1) % 2 == 0 { 1.0 } else { -1.0 }) * argn.cos();
        // terms decay like q^{n^2} uniformly on the strips we use
        if q_half < 1e-18 && q_n < 1e-18 {
            break;
        }
    }
    (th1, th2, th3, th4)
}

/// Jacobi `sn`, `cn`, `dn` at complex `t` for modulus `k` in (0, 1).
pub fn jacobi_sn_cn_dn(t: Complex64, k: f64) -> (Complex64, Complex64, Complex64) {
    let big_k = ellip_k(k);
    let big_kp = ellip_k((1.0 - k * k).sqrt());
    let q = (-std::f64::consts::PI * big_kp / big_k).exp();
    let v = t * (std::f64::consts::PI / (2.0 * big_k));
    let (th1, th2, th3, th4) = theta_series(v, q);
    let zero = Complex64::new(0.0, 0.0);
    let (_, z2, z3, z4) = theta_series(zero, q);
    let sn = (z3 / z2) * (th1 / th4);
    let cn = (z4 / z2) * (th2 / th4);
    let dn = (z4 / z3) * (th3 / th4);
    (sn, cn, dn)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn k_known_values() {
        // K(0) = pi/2; K(1/sqrt2) = Gamma(1/4)^2 / (4 sqrt(pi))
        assert_relative_eq!(ellip_k(1e-14), std::f64::consts::FRAC_PI_2, epsilon = 1e-12);
        assert_relative_eq!(ellip_k(std::f64::consts::FRAC_1_SQRT_2), 1.8540746773013719, epsilon = 1e-12);
    }

    #[test]
    fn jacobi_identities() {
        let k = 0.95;
        for t in [
            Complex64::new(0.3, 0.0),
            Complex64::new(1.1, 0.4),
            Complex64::new(-0.7, 0.2),
        ] {
            let (sn, cn, dn) = jacobi_sn_cn_dn(t, k);
            assert!((sn * sn + cn * cn - Complex64::new(1.0, 0.0)).norm() < 1e-11);
            assert!((dn * dn + k * k * sn * sn - Complex64::new(1.0, 0.0)).norm() < 1e-11);
        }
    }

    #[test]
    fn jacobi_special_points() {
        let k = 0.8;
        let big_k = ellip_k(k);
        let (sn, cn, _) = jacobi_sn_cn_dn(Complex64::new(big_k, 0.0), k);
        assert!((sn - Complex64::new(1.0, 0.0)).norm() < 1e-11);
        assert!(cn.norm() < 1e-11);
        let (sn0, cn0, dn0) = jacobi_sn_cn_dn(Complex64::new(0.0, 0.0), k);
        assert!(sn0.norm() < 1e-13);
        assert!((cn0 - Complex64::new(1.0, 0.0)).norm() < 1e-13);
        assert!((dn0 - Complex64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn derivative_consistency() {
        // d/dt sn = cn dn
        let k = 0.9;
        let t = Complex64::new(0.4, 0.3);
        let eps = 1e-6;
        let (sp, _, _) = jacobi_sn_cn_dn(t + eps, k);
        let (sm, _, _) = jacobi_sn_cn_dn(t - eps, k);
        let (_, cn, dn) = jacobi_sn_cn_dn(t, k);
        let fd = (sp - sm) / (2.0 * eps);
        assert!((fd - cn * dn).norm() < 1e-8);
    }
}
