mod common;

use common::*;
use g2monge::distribution::derived_flag;
use g2monge::models::*;
use g2monge::{Form, PfaffianSystem, Scalar};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn addition_commutes_and_associates(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!((&(&a + &b) - &(&b + &a)).is_zero());
        prop_assert!((&(&(&a + &b) + &c) - &(&a + &(&b + &c))).is_zero());
    }

    #[test]
    fn multiplication_commutes_associates_distributes(a in scalar(), b in scalar(), c in scalar()) {
        prop_assert!((&(&a * &b) - &(&b * &a)).is_zero());
        prop_assert!((&(&(&a * &b) * &c) - &(&a * &(&b * &c))).is_zero());
        prop_assert!((&(&a * &(&b + &c)) - &(&(&a * &b) + &(&a * &c))).is_zero());
    }

    #[test]
    fn derivative_obeys_leibniz(a in scalar(), b in scalar(), v in prop::sample::select(vec!["x", "z", "q"])) {
        scalar_leibniz(&a, &b, v)?;
    }

    #[test]
    fn mixed_partials_commute(a in scalar(), u in prop::sample::select(vec!["x", "y", "z", "p", "q"]), v in prop::sample::select(vec!["x", "y", "z", "p", "q"])) {
        let (u, v) = (coord(u), coord(v));
        let uv = a.diff(&v).unwrap().diff(&u).unwrap();
        let vu = a.diff(&u).unwrap().diff(&v).unwrap();
        prop_assert!((&uv - &vu).is_zero());
    }

    #[test]
    fn evaluation_is_a_ring_homomorphism(a in scalar(), b in scalar(), pt in point()) {
        let (ea, eb) = (a.eval(&pt).unwrap(), b.eval(&pt).unwrap());
        let prod = (&a * &b).eval(&pt).unwrap();
        let sum = (&a + &b).eval(&pt).unwrap();
        prop_assert!(close(prod, ea * eb, 1e-12), "{prod} vs {}", ea * eb);
        prop_assert!(close(sum, ea + eb, 1e-12));
    }

    #[test]
    fn exterior_derivative_squares_to_zero(f in form_upto3()) {
        d_squared_vanishes(&f)?;
    }

    #[test]
    fn graded_leibniz_rule(a in form_upto3(), b in form_upto3()) {
        graded_leibniz(&a, &b)?;
    }

    #[test]
    fn jacobi_identity(x in fields(), y in fields(), z in fields()) {
        jacobi(&x, &y, &z)?;
    }

    #[test]
    fn curvature_symmetries_and_trace_free_weyl(g in random_metric(), pt in point()) {
        curvature_identities(&g, &pt)?;
    }

    #[test]
    fn pullback_commutes_with_d_on_hat_map(f in hat_form(1)) {
        pullback_commutes(&hat_map(&Default::default()).unwrap(), &f)?;
    }

    #[test]
    fn pullback_commutes_with_d_on_jet_maps(f in jet_form(1), g in hat_form(1)) {
        let b = Default::default();
        pullback_commutes(&jet_map(&b).unwrap(), &f)?;
        pullback_commutes(&jet_inverse(&b).unwrap(), &g)?;
    }

    #[test]
    fn pullback_commutes_with_d_on_pair_maps(f in pair_hat_form(1), g in jet_form(1)) {
        pullback_commutes(&pair_hat_map(&Default::default()).unwrap(), &f)?;
        pullback_commutes(&pair_jet_map().unwrap(), &g)?;
    }

    #[test]
    fn pullback_commutes_with_d_on_two_forms(f in sparse_two_form(jet_chart(), map_scalar(JET_ATOMS, JET_DENOMINATORS)), g in sparse_two_form(hat_chart(), map_scalar(HAT_ATOMS, HAT_DENOMINATORS))) {
        pullback_commutes(&jet_map(&Default::default()).unwrap(), &f)?;
        pullback_commutes(&hat_map(&Default::default()).unwrap(), &g)?;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn inverse_pairs_undo_each_other(f in jet_form(1)) {
        let b = Default::default();
        let back = jet_inverse(&b).unwrap().pullback(&jet_map(&b).unwrap().pullback(&f).unwrap()).unwrap();
        prop_assert!(back.sub(&f).unwrap().is_zero());
    }

    #[test]
    fn is_zero_implies_numeric_zero(a in scalar(), b in scalar(), pts in prop::collection::vec(point(), 100)) {
        let z = &(&(&a + &b) * &(&a - &b)) - &(&(&a * &a) - &(&b * &b));
        prop_assert!(z.is_zero());
        for pt in &pts {
            prop_assert!(z.eval(pt).unwrap().abs() <= 1e-10);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn growth_vector_invariant_under_constant_mixing(m in prop::collection::vec(-3i64..=3, 9), a in prop::sample::select(vec![(2, 1), (3, 1), (1, 3), (5, 7)])) {
        let det = m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6]) + m[2] * (m[3] * m[7] - m[4] * m[6]);
        prop_assume!(det != 0);
        let b = params(&[("alpha", Scalar::rational(a.0, a.1))]);
        let sys = rolling_system(&b).unwrap();
        let mixed: Vec<Form> = (0..3).map(|i| {
            (0..3).fold(Form::zero(sys.chart(), 1), |acc, j| acc.add(&sys.forms()[j].scale(&Scalar::integer(m[3 * i + j]))).unwrap())
        }).collect();
        let other = PfaffianSystem::new("mixed", mixed).unwrap();
        prop_assert_eq!(derived_flag(&sys, 3, &[]).unwrap(), derived_flag(&other, 3, &[]).unwrap());
    }
}
