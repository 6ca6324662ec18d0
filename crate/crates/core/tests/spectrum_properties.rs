use biharmonic::quartic::q4_eval;
use biharmonic::spectrum::{eigen_poly_eval, eigen_poly_scale};
use biharmonic::{compute_pc, compute_spectrum, ProblemParams};
use proptest::prelude::*;

fn supercritical(n: u32, t: f64) -> ProblemParams {
    ProblemParams::new(n, compute_pc(n).unwrap() + t).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn roots_are_roots(n in 13u32..=60, t in 0.0f64..50.0) {
        let params = supercritical(n, t);
        let spec = compute_spectrum(&params).unwrap();
        let scale = eigen_poly_scale(&params);
        for l in spec.lambdas {
            prop_assert!(eigen_poly_eval(&params, l).abs() < 1e-9 * scale, "λ = {}", l);
        }
    }

    #[test]
    fn ordering_chain_holds(n in 13u32..=60, t in 0.0f64..50.0) {
        let spec = compute_spectrum(&supercritical(n, t)).unwrap();
        prop_assert!(spec.ordering_holds(), "{:?}", spec);
        let [l1, l2, l3, l4] = spec.lambdas;
        let ls = spec.lambda_star;
        prop_assert!((l1 + l4 - 2.0 * ls).abs() < 1e-9 * (1.0 + ls.abs()));
        prop_assert!((l2 + l3 - 2.0 * ls).abs() < 1e-9 * (1.0 + ls.abs()));
    }

    #[test]
    fn polynomial_is_symmetric_about_lambda_star(
        n in 5u32..=80,
        t in 0.01f64..60.0,
        u in proptest::collection::vec(-1.0f64..1.0, 100),
    ) {
        let params = ProblemParams::new(n, (f64::from(n) + 4.0) / (f64::from(n) - 4.0) + t).unwrap();
        let ls = params.lambda_star();
        let reach = 3.0 * ls.abs() + 5.0;
        let scale = eigen_poly_scale(&params);
        for u in u {
            let l = ls + u * reach;
            let a = eigen_poly_eval(&params, l);
            let b = eigen_poly_eval(&params, 2.0 * ls - l);
            prop_assert!((a - b).abs() <= 1e-10 * (a.abs() + scale), "λ = {}: {} vs {}", l, a, b);
        }
    }

    #[test]
    fn symbol_signs_between_its_zeros(
        n in 5u32..=80,
        u in proptest::collection::vec(0.0f64..1.0, 100),
    ) {
        let top = f64::from(n) - 4.0;
        for u in u {
            let inside = (u * top).max(1e-9).min(top - 1e-9);
            prop_assert!(q4_eval(n, inside) > 0.0, "α = {}", inside);
            let left = (-2.0 * u).min(-1e-9).max(-2.0 + 1e-9);
            prop_assert!(q4_eval(n, left) < 0.0, "α = {}", left);
        }
    }
}

#[test]
fn symbol_vanishes_at_its_factors() {
    for n in 5..=80u32 {
        let nf = f64::from(n);
        for a in [0.0, -2.0, nf - 2.0, nf - 4.0] {
            assert_eq!(q4_eval(n, a), 0.0);
        }
    }
}

#[test]
fn double_root_at_pc() {
    for n in 13..=60 {
        let params = supercritical(n, 0.0);
        let spec = compute_spectrum(&params).unwrap();
        assert!(spec.degenerate, "n = {n}");
        let ls = spec.lambda_star;
        assert!((spec.l2() - ls).abs() < 1e-6 && (spec.l3() - ls).abs() < 1e-6, "n = {n}");
        assert!((spec.l2() - spec.l3()).abs() < 1e-5 * ls.abs());
    }
}
