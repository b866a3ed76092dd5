use g2monge::cartan::*;
use g2monge::models::*;
use g2monge::sampling::Sampler;
use g2monge::{Bindings, Form, Point, Scalar, Symbol};

fn alpha(n: i64, d: i64) -> Bindings {
    params(&[("alpha", Scalar::rational(n, d))])
}

fn fixed(pairs: &[(&str, f64)]) -> Point {
    pairs
        .iter()
        .map(|(n, v)| (Symbol::parameter(n).unwrap(), *v))
        .collect()
}

#[test]
fn rolling_coframe_solves_structure_equations() {
    let cf = rolling_adapted(&Bindings::new()).unwrap();
    let sol = solve_connection(&cf).unwrap();
    assert!(sol.is_valid());
    assert!(sol.verify(&cf).unwrap());
}

#[test]
fn perturbed_rolling_coframe_does_not() {
    let b = alpha(2, 1);
    let mut c = rolling_constants(&b).unwrap();
    c.q = &c.q + &Scalar::one();
    let sol = solve_connection(&rolling_adapted_with(&c, &b).unwrap()).unwrap();
    assert!(!sol.is_valid());
    assert!(sol.require_valid().is_err());
}

#[test]
fn monge_coframe_solves_structure_equations() {
    let cf = monge_adapted(&Bindings::new()).unwrap();
    let sol = solve_connection(&cf).unwrap();
    assert!(sol.is_valid() && sol.verify(&cf).unwrap());
}

#[test]
fn two_copy_coframe_solves_at_flat_ratios() {
    for b in [
        params(&[("beta", Scalar::integer(3)), ("gamma", Scalar::integer(3))]),
        params(&[("beta", Scalar::integer(1)), ("gamma", Scalar::rational(1, 9))]),
    ] {
        let cf = pair_adapted(&b, Branch::ALL[0]).unwrap();
        let sol = solve_connection(&cf).unwrap();
        assert!(sol.is_valid() && sol.verify(&cf).unwrap());
    }
}

#[test]
fn coordinate_coframe_gives_split_signature() {
    let c = rolling_chart();
    let theta: Vec<Form> = (0..5).map(|i| Form::basis(&c, i)).collect();
    let g = nurowski_metric(&AdaptedCoframe::new("coordinates", theta).unwrap()).unwrap();
    let pt = Sampler::new(1).point(&c, &Point::new(), &[]).unwrap();
    let (pos, neg) = g.signature(&pt).unwrap();
    assert_eq!((pos.min(neg), pos.max(neg)), (2, 3));
    assert!(curvature_numeric(&g, &pt).unwrap().riemann_norm < 1e-12);
}

#[test]
fn metric_identities() {
    let b = Bindings::new();
    let lines = rolling_metric_lines(&b).unwrap();
    for w in lines.windows(2) {
        assert!(quadratic_identity_check(&w[0].1, &w[1].1).unwrap(), "{} -> {}", w[0].0, w[1].0);
    }
    let (l, r) = rolling_quadratic_identity(&b).unwrap();
    assert!(quadratic_identity_check(&l, &r).unwrap());
    for br in Branch::ALL {
        let (l, r) = pair_metric_display(&b, br).unwrap();
        assert!(quadratic_identity_check(&l, &r).unwrap(), "{br}");
    }
}

#[test]
fn monge_flatness_verdicts() {
    for ((n, d), flat) in [((3, 1), true), ((1, 3), true), ((2, 1), false)] {
        let g = nurowski_metric(&monge_adapted(&alpha(n, d)).unwrap()).unwrap();
        let v = weyl_flat_certificate(&g, &Point::new(), &[], 8, 1e-9, 7).unwrap();
        assert_eq!(v.flat, flat, "alpha = {n}/{d}");
        for s in &v.samples {
            assert!(s.path_gap < PATH_AGREEMENT);
        }
    }
}

#[test]
fn constant_rescaling_keeps_weyl_verdict() {
    for (n, d) in [(3, 1), (2, 1)] {
        let b = alpha(n, d);
        let g = nurowski_metric(&monge_adapted(&b).unwrap()).unwrap();
        let k = rolling_k(&b).unwrap().cbrt().unwrap();
        let kg = g.scale(&k);
        let pt = Sampler::new(3).point(g.chart(), &Point::new(), &[]).unwrap();
        let (c1, c2) = (curvature_numeric(&g, &pt).unwrap(), curvature_numeric(&kg, &pt).unwrap());
        let kv = k.eval(&Point::new()).unwrap();
        // raised index: unchanged; lowered: scales with the factor
        assert!(c1.riemann.max_gap(&c2.riemann) <= 1e-9 * c1.riemann.norm());
        let scaled = Tensor4(c1.weyl.0.iter().map(|a| a.iter().map(|b| b.iter().map(|c| c.iter().map(|x| x * kv).collect()).collect()).collect()).collect());
        assert!(scaled.max_gap(&c2.weyl) <= 1e-9 * c2.riemann_lower.norm());
        assert!((c1.weyl_ratio() < 1e-9) == (c2.weyl_ratio() < 1e-9));
    }
}

#[test]
fn kernel_is_null() {
    let b = Bindings::new();
    let g = nurowski_metric(&monge_adapted(&b).unwrap()).unwrap();
    for x in monge_kernel_fields(&b).unwrap() {
        assert!(g.apply(&x, &x).is_zero());
    }
}

#[test]
fn finite_difference_path_tracks_exact_path() {
    let g = nurowski_metric(&rolling_adapted(&alpha(2, 1)).unwrap()).unwrap();
    let mut s = Sampler::new(11);
    for _ in 0..5 {
        let pt = s.point(g.chart(), &fixed(&[]), &[]).unwrap();
        let exact = curvature_numeric(&g, &pt).unwrap();
        let fd = curvature_finite_difference(&g, &pt, FD_STEP).unwrap();
        assert!(exact.riemann_lower.max_gap(&fd.riemann_lower) < PATH_AGREEMENT * exact.riemann_norm);
    }
}

#[test]
fn too_few_points_rejected() {
    let g = nurowski_metric(&monge_adapted(&alpha(3, 1)).unwrap()).unwrap();
    assert!(weyl_flat_certificate(&g, &Point::new(), &[], 4, 1e-9, 1).is_err());
}
