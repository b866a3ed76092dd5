use g2monge::distribution::{derive_monge_f, ideal_equivalent};
use g2monge::models::*;
use g2monge::{parse, Bindings, CoordMap, Error, PfaffianSystem, Point, Scalar, Symbol};

fn p(s: &str) -> Scalar {
    parse(s).unwrap()
}

fn alpha(n: i64, d: i64) -> Bindings {
    params(&[("alpha", Scalar::rational(n, d))])
}

fn pair(b: (i64, i64), g: (i64, i64)) -> Bindings {
    params(&[("beta", Scalar::rational(b.0, b.1)), ("gamma", Scalar::rational(g.0, g.1))])
}

fn symbolic() -> Bindings {
    Bindings::new()
}

fn same(a: &Scalar, b: &Scalar) -> bool {
    (a - b).is_zero()
}

#[test]
fn named_coframes_satisfy_their_relations() {
    for nc in [sigma_coframe(), prolonged_coframe(), pair_coframe()] {
        let nc = nc.unwrap();
        assert!(nc.holds().unwrap(), "{}", nc.name);
    }
}

#[test]
fn displayed_expansions_hold() {
    for (label, lhs, rhs) in prolonged_displays(&symbolic()).unwrap() {
        assert!(lhs.sub(&rhs).unwrap().is_zero(), "{label}");
    }
    for (label, lhs, rhs) in pair_displays(&symbolic()).unwrap() {
        assert!(lhs.sub(&rhs).unwrap().is_zero(), "{label}");
    }
}

#[test]
fn sigma_identification_carries_rolling_over() {
    let b = symbolic();
    let img = sigma_from_s().unwrap();
    let over = PfaffianSystem::new("over-s", rolling_from_sigma(&img, &b).unwrap()).unwrap();
    let cert = ideal_equivalent(&over, &prolonged_system(&b).unwrap(), &CoordMap::identity(&prolonged_chart())).unwrap();
    assert_eq!(cert.det, Scalar::integer(-1));
}

#[test]
fn hat_coordinates_rewrite_exp_2z() {
    let m = hat_map(&symbolic()).unwrap();
    assert!(same(&m.pull_scalar(&p("zh^2/(alpha^2*qh^2)")).unwrap(), &p("exp(2*z)")));
}

#[test]
fn hat_system_spans_pulled_back_ideal() {
    let b = symbolic();
    let c = ideal_equivalent(&prolonged_system(&b).unwrap(), &hat_system(&b).unwrap(), &hat_map(&b).unwrap()).unwrap();
    assert!(same(&c.det, &p("1/2*exp(z - alpha*x)")));
}

#[test]
fn jet_maps_are_mutually_inverse() {
    let b = symbolic();
    let (j, i) = (jet_map(&b).unwrap(), jet_inverse(&b).unwrap());
    assert!(j.is_left_inverse_of(&i).unwrap());
    assert!(i.is_left_inverse_of(&j).unwrap());
    let e2z = i.pull_scalar(&p("zh^2/(alpha^2*qh^2)")).unwrap();
    assert!(same(&e2z, &p("(1/(2*q*x) - z)^2/(alpha^2*(1 - 1/alpha^2)^2)")));
}

#[test]
fn derived_f_matches_normal_form() {
    let b = symbolic();
    let fh = derive_monge_f(&hat_system(&b).unwrap(), &jet_map(&b).unwrap()).unwrap();
    assert!(same(&fh, &hat_f(&b).unwrap()));
    let f = jet_inverse(&b).unwrap().pull_scalar(&fh).unwrap();
    assert!(same(&f, &monge_f(&b).unwrap()));
    let text = p("q*z^2 + 1/(alpha^2 - 1)*(sqrt(q)*z - 1/(2*sqrt(q)*x))^2");
    assert!(same(&f, &text));
}

#[test]
fn normal_form_at_special_ratios() {
    let f3 = p("9/8*q*z^2 - z/(8*x) + 1/(32*q*x^2)");
    let f13 = p("-1/8*q*z^2 + 9/8*z/x - 9/(32*q*x^2)");
    assert!(same(&monge_f(&alpha(3, 1)).unwrap(), &f3));
    assert!(same(&monge_f(&alpha(-3, 1)).unwrap(), &f3));
    assert!(same(&monge_f(&alpha(1, 3)).unwrap(), &f13));
    assert!(same(&monge_f(&alpha(-1, 3)).unwrap(), &f13));
}

#[test]
fn derivative_of_f_matches_finite_differences() {
    let f = monge_f(&symbolic()).unwrap();
    let z = Symbol::coordinate("z").unwrap();
    let fz = f.diff(&z).unwrap();
    let at = |zv: f64| -> Point {
        [("alpha", 2.0), ("x", 1.0), ("z", zv), ("q", 1.0)]
            .into_iter()
            .map(|(n, v)| (Symbol::lookup(n).unwrap(), v))
            .collect()
    };
    let h = 1e-5;
    let fd = (f.eval(&at(1.0 + h)).unwrap() - f.eval(&at(1.0 - h)).unwrap()) / (2.0 * h);
    assert!((fz.eval(&at(1.0)).unwrap() - fd).abs() < 1e-6);
}

#[test]
fn monge_equivalence_certificate() {
    let b = symbolic();
    let m = hat_map(&b).unwrap().then(&jet_map(&b).unwrap()).unwrap();
    let c = ideal_equivalent(&prolonged_system(&b).unwrap(), &monge_system(&monge_f(&b).unwrap()).unwrap(), &m).unwrap();
    assert!(!c.det.is_zero());
    assert_eq!(c.g.len(), 3);
}

#[test]
fn degenerate_alpha_is_rejected() {
    assert!(matches!(monge_f(&alpha(1, 1)), Err(Error::GuardViolation(_))));
    assert!(matches!(rolling_constants(&alpha(-1, 1)), Err(Error::GuardViolation(_))));
}

#[test]
fn mu_reduces_to_closed_form() {
    let c = pair_constants(&symbolic(), Branch::ALL[0]).unwrap();
    assert!(same(&c.mu, &p("beta*gamma/(beta*gamma - 1)")));
}

#[test]
fn pair_reduction_gives_both_closed_forms() {
    let b = symbolic();
    let fh = derive_monge_f(&pair_hat_system(&b).unwrap(), &pair_jet_map().unwrap()).unwrap();
    let f = pair_jet_inverse().unwrap().pull_scalar(&fh).unwrap();
    assert!(same(&f, &pair_f(&b).unwrap()));
    assert!(same(&f, &pair_f_theorem(&b).unwrap()));
    let sub = params(&[("beta", p("1/(alpha^2*gamma)"))]);
    assert!(same(&f.subst(&sub).unwrap(), &monge_f(&b).unwrap()));
}

#[test]
fn pair_equivalence_for_any_c() {
    for c in [None, Some(1), Some(-2)] {
        let mut b = symbolic();
        if let Some(c) = c {
            b.extend(params(&[("c", Scalar::integer(c))]));
        }
        let m = pair_hat_map(&b).unwrap().then(&pair_jet_map().unwrap()).unwrap();
        let cert = ideal_equivalent(&pair_system(&b).unwrap(), &monge_system(&pair_f(&b).unwrap()).unwrap(), &m);
        assert!(cert.is_ok(), "c = {c:?}");
    }
}

#[test]
fn discriminant_values() {
    assert_eq!(pair_discriminant(&pair((3, 1), (3, 1))).unwrap(), Scalar::integer(36));
    assert_eq!(pair_discriminant(&pair((1, 1), (1, 9))).unwrap(), Scalar::rational(4, 9));
    assert!(matches!(pair_constants(&pair((2, 1), (1, 1)), Branch::ALL[0]), Err(Error::DomainViolation(_))));
}

#[test]
fn catalogue_dumps_every_entry() {
    let entries = catalogue();
    assert!(entries.len() >= 20);
    for e in &entries {
        let text = dump(e.name, &alpha(3, 1).into_iter().chain(pair((3, 1), (3, 1))).collect()).unwrap();
        assert!(!text.is_empty(), "{}", e.name);
    }
    assert!(dump("nope", &symbolic()).is_err());
}
