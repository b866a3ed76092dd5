use g2monge::distribution::{derived_flag_sampled, ideal_equivalent};
use g2monge::models::*;
use g2monge::{Bindings, CoordMap, Form, PfaffianSystem, Point, Scalar, Symbol};

fn alpha(n: i64, d: i64) -> Bindings {
    params(&[("alpha", Scalar::rational(n, d))])
}

fn pair(b: (i64, i64), g: (i64, i64)) -> Bindings {
    params(&[("beta", Scalar::rational(b.0, b.1)), ("gamma", Scalar::rational(g.0, g.1))])
}

fn fixed(pairs: &[(&str, f64)]) -> Point {
    pairs
        .iter()
        .map(|(n, v)| (Symbol::parameter(n).unwrap(), *v))
        .collect()
}

#[test]
fn rolling_growth_vectors() {
    for (n, d) in [(2, 1), (3, 1), (1, 3), (5, 7)] {
        let g = derived_flag_sampled(&rolling_system(&alpha(n, d)).unwrap(), 3, &Point::new(), 5, 42).unwrap();
        assert!(g.is_235(), "alpha = {n}/{d}: {g}");
    }
    let g = derived_flag_sampled(&rolling_system(&alpha(1, 1)).unwrap(), 3, &Point::new(), 5, 42).unwrap();
    assert!(!g.is_235());
    let g = derived_flag_sampled(&rolling_system(&Bindings::new()).unwrap(), 3, &fixed(&[("alpha", 2.0)]), 5, 42).unwrap();
    assert_eq!(g.to_string(), "(2,3,5)");
}

#[test]
fn two_copy_growth_vectors() {
    for (b, g) in [((3, 1), (3, 1)), ((1, 1), (1, 9)), ((2, 1), (5, 1))] {
        let at = fixed(&[("beta", b.0 as f64 / b.1 as f64), ("gamma", g.0 as f64 / g.1 as f64)]);
        let v = derived_flag_sampled(&pair_system(&pair(b, g)).unwrap(), 3, &at, 5, 42).unwrap();
        assert!(v.is_235());
    }
    let at = fixed(&[("beta", 2.0), ("gamma", 0.5)]);
    let v = derived_flag_sampled(&pair_system(&pair((2, 1), (1, 2))).unwrap(), 3, &at, 5, 42).unwrap();
    assert!(!v.is_235());
}

#[test]
fn monge_growth_vector() {
    let sys = monge_system(&monge_f(&Bindings::new()).unwrap()).unwrap();
    assert!(derived_flag_sampled(&sys, 3, &fixed(&[("alpha", 3.0)]), 5, 42).unwrap().is_235());
}

#[test]
fn certificates_compose() {
    let b = alpha(2, 1);
    let img = sigma_from_s().unwrap();
    let a = PfaffianSystem::new("over-s", rolling_from_sigma(&img, &b).unwrap()).unwrap();
    let mid = prolonged_system(&b).unwrap();
    let end = hat_system(&b).unwrap();
    let id = CoordMap::identity(&prolonged_chart());
    let hm = hat_map(&b).unwrap();
    let first = ideal_equivalent(&a, &mid, &id).unwrap();
    let second = ideal_equivalent(&mid, &end, &hm).unwrap();
    let total = first.then(&second, &id).unwrap();
    // pullback of each target form equals the certified combination of source forms
    for (i, f) in end.forms().iter().enumerate() {
        let pulled = hm.pullback(f).unwrap();
        let combo = a
            .forms()
            .iter()
            .zip(&total.g[i])
            .fold(Form::zero(a.chart(), 1), |acc, (s, c)| acc.add(&s.scale(c)).unwrap());
        assert!(pulled.sub(&combo).unwrap().is_zero(), "row {i}");
    }
    assert!(!total.det.is_zero());
}

#[test]
fn inequivalent_systems_are_rejected() {
    let b = alpha(2, 1);
    let sys = prolonged_system(&b).unwrap();
    let other = prolonged_system(&alpha(3, 1)).unwrap();
    assert!(ideal_equivalent(&sys, &other, &CoordMap::identity(&prolonged_chart())).is_err());
}

#[test]
fn dependent_forms_are_rejected() {
    let sys = rolling_system(&alpha(2, 1)).unwrap();
    let f = sys.forms();
    let twice = f[0].scale(&Scalar::integer(2));
    assert!(PfaffianSystem::new("dependent", vec![f[0].clone(), twice, f[1].clone()]).is_err());
}
