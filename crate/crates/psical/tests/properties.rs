//! Property tests for the structural invariants.

use num_complex::Complex64;
use proptest::prelude::*;
use psical::geometry::{boundary_weights, equivalence_ratios, PhasePoint};
use psical::orders::{classical_membership, resolve_orders, ClassicalOrders};
use psical::quantize::{assemble, assemble_semiclassical, rel_frobenius, scale_symbol, GridSpec};
use psical::sobolev::{weight, SobolevTriple};
use psical::symbols::library;

const SQRT2: f64 = std::f64::consts::SQRT_2;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn equivalence_ratios_stay_in_band(
        zeta in -1e6f64..1e6f64,
        h_log in -20.0f64..0.0f64,
    ) {
        let h = 2f64.powf(h_log);
        let p = PhasePoint::scalar(zeta, h).unwrap();
        let (rh, rinf) = equivalence_ratios(&p).unwrap();
        prop_assert!((1.0 - 1e-12..=SQRT2 + 1e-12).contains(&rh), "r_h = {rh}");
        prop_assert!((rh - rinf).abs() <= 1e-12, "gap {}", (rh - rinf).abs());
    }

    #[test]
    fn all_weights_bounded_by_sqrt2(
        zeta in -1e8f64..1e8f64,
        h in 0.0f64..=1.0f64,
    ) {
        let w = boundary_weights(&PhasePoint::scalar(zeta, h).unwrap());
        for v in [w.rho_inf, w.rho_h_inf, w.rho_h_ff, w.rho_h_0] {
            prop_assert!((0.0..=SQRT2 + 1e-12).contains(&v), "weight {v}");
        }
        prop_assert!(w.rho_inf > 0.0 && w.rho_h_inf > 0.0 && w.rho_h_ff > 0.0);
        // the parameter boundary weight vanishes exactly on h = 0
        prop_assert_eq!(w.rho_h_0 == 0.0, h == 0.0);
    }

    #[test]
    fn resolve_then_membership_is_identity(
        m in -5.0f64..5.0f64,
        k in -5.0f64..5.0f64,
    ) {
        let o = resolve_orders(ClassicalOrders::new(m, k));
        // exact on dyadic orders; one ulp of slack for arbitrary reals
        let got = classical_membership(o, k).unwrap();
        prop_assert!((got - m).abs() <= 1e-12 * (1.0 + m.abs() + k.abs()));
    }

    #[test]
    fn sobolev_weight_monotone_on_valid_domain(
        radius in 1.0f64..1e5f64,
        h_log in -16.0f64..-0.5f64,  // h <= 1/sqrt(2): all defining functions < 1
        s in -2.0f64..2.0f64,
        r in -2.0f64..2.0f64,
        p in -2.0f64..2.0f64,
        bump in 0.1f64..2.0f64,
    ) {
        let h = 2f64.powf(h_log);
        let base = SobolevTriple::new(s, r, p);
        let w0 = weight(base, &[radius], h).unwrap();
        for grown in [
            SobolevTriple::new(s + bump, r, p),
            SobolevTriple::new(s, r + bump, p),
            SobolevTriple::new(s, r, p + bump),
        ] {
            let w1 = weight(grown, &[radius], h).unwrap();
            prop_assert!(w1 >= w0 * (1.0 - 1e-12), "weight dropped: {w0} -> {w1}");
        }
    }
}

proptest! {
    // matrix assembly is slower; fewer cases
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_identity_on_random_parameters(
        h_log in -8.0f64..0.0f64,
        m in -2.0f64..2.0f64,
        eps in 0.0f64..0.8f64,
    ) {
        let h = 2f64.powf(h_log);
        let g = GridSpec::new(1, 16, vec![h]).unwrap();
        let a = library::perturbed(1, m, eps);
        let direct = assemble_semiclassical(&a, h, &g).unwrap();
        let scaled = assemble(&scale_symbol(&a), h, &g).unwrap();
        prop_assert!(rel_frobenius(&scaled.entries, &direct.entries) < 1e-12);
    }

    #[test]
    fn quantization_is_linear(
        c_re in -3.0f64..3.0f64,
        c_im in -3.0f64..3.0f64,
    ) {
        let g = GridSpec::new(1, 16, vec![0.5]).unwrap();
        let a = library::perturbed(1, 1.0, 0.3);
        let b = library::exp_iz(1, 1).scale(Complex64::new(c_re, c_im));
        let sum = a.add(&b).unwrap();
        let ma = assemble(&a, 0.5, &g).unwrap();
        let mb = assemble(&b, 0.5, &g).unwrap();
        let msum = assemble(&sum, 0.5, &g).unwrap();
        prop_assert!(rel_frobenius(&msum.entries, &(&ma.entries + &mb.entries)) < 1e-12);
    }
}
