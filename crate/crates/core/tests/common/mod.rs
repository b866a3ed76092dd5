#![allow(dead_code)]

use std::sync::Arc;

use g2monge::cartan::{CurvatureModel, Metric};
use g2monge::models::*;
use g2monge::{parse, Chart, CoordMap, Form, Point, Scalar, Symbol, VectorField};
use proptest::prelude::*;

pub const ROLLING_ATOMS: &[&str] = &[
    "x",
    "y",
    "z",
    "p",
    "q",
    "alpha",
    "exp(alpha*x)",
    "exp(z - alpha*x)",
    "sqrt(q)",
    "cbrt(x)",
];
pub const SAFE_DENOMINATORS: &[&str] = &["x", "q", "x + 1", "q*x + 2", "alpha^2 + 1"];

pub fn p(s: &str) -> Scalar {
    parse(s).unwrap()
}

pub fn scalar_from(atoms: &'static [&'static str], dens: &'static [&'static str]) -> BoxedStrategy<Scalar> {
    let leaf = prop_oneof![
        prop::sample::select(atoms).prop_map(p),
        (-4i64..=4).prop_map(Scalar::integer),
        (-5i64..=5, 1i64..=4).prop_map(|(n, d)| Scalar::rational(n, d)),
    ];
    leaf.prop_recursive(3, 12, 2, move |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a - &b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a * &b),
            (inner, prop::sample::select(dens)).prop_map(|(a, d)| a.try_div(&p(d)).unwrap()),
        ]
    })
    .boxed()
}

pub fn scalar() -> BoxedStrategy<Scalar> {
    scalar_from(ROLLING_ATOMS, SAFE_DENOMINATORS)
}

pub fn grid() -> impl Strategy<Value = f64> {
    (2u32..=18).prop_map(|k| k as f64 / 6.0)
}

pub fn point() -> impl Strategy<Value = Point> {
    (prop::collection::vec(grid(), 5), prop::sample::select(vec![2.0, 3.0, 1.0 / 3.0, 5.0 / 7.0]))
        .prop_map(|(v, a)| {
            let mut pt: Point = ["x", "y", "z", "p", "q"]
                .iter()
                .zip(v)
                .map(|(n, x)| (Symbol::coordinate(n).unwrap(), x))
                .collect();
            pt.insert(Symbol::parameter("alpha").unwrap(), a);
            pt
        })
}

pub fn coord(name: &str) -> Symbol {
    Symbol::coordinate(name).unwrap()
}

pub fn one_form(chart: &Arc<Chart>, coefs: BoxedStrategy<Scalar>) -> impl Strategy<Value = Form> {
    let chart = chart.clone();
    prop::collection::vec(coefs, 5).prop_map(move |c| Form::one_form(&chart, c).unwrap())
}

/// Sums of wedges of 1-forms, of the given degree.
pub fn form_of_degree(chart: &Arc<Chart>, degree: usize, coefs: BoxedStrategy<Scalar>) -> BoxedStrategy<Form> {
    let chart = chart.clone();
    if degree == 0 {
        return coefs.prop_map(move |s| Form::function(&chart, s)).boxed();
    }
    let term = prop::collection::vec(one_form(&chart, coefs), degree).prop_map(|fs| {
        fs[1..].iter().fold(fs[0].clone(), |acc, f| acc.wedge(f).unwrap())
    });
    prop::collection::vec(term, 1..=2)
        .prop_map(|ts| ts[1..].iter().fold(ts[0].clone(), |acc, t| acc.add(t).unwrap()))
        .boxed()
}

pub fn small_scalar() -> BoxedStrategy<Scalar> {
    prop_oneof![
        prop::sample::select(ROLLING_ATOMS).prop_map(p),
        (-3i64..=3).prop_map(Scalar::integer),
    ]
    .prop_recursive(1, 4, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner).prop_map(|(a, b)| &a * &b),
        ]
    })
    .boxed()
}

pub fn form_upto3() -> BoxedStrategy<Form> {
    let c = rolling_chart();
    (0usize..=3)
        .prop_flat_map(move |k| form_of_degree(&c, k, small_scalar()))
        .boxed()
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

pub fn poly_scalar() -> BoxedStrategy<Scalar> {
    prop_oneof![
        prop::sample::select(vec!["x", "y", "z", "p", "q"]).prop_map(p),
        (-3i64..=3).prop_map(Scalar::integer),
    ]
    .prop_recursive(2, 6, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| &a + &b),
            (inner.clone(), inner).prop_map(|(a, b)| &a * &b),
        ]
    })
    .boxed()
}

pub fn fields() -> impl Strategy<Value = VectorField> {
    prop::collection::vec(poly_scalar(), 5)
        .prop_map(|c| VectorField::new(&rolling_chart(), c).unwrap())
}

/// Split-signature constant part plus small polynomial perturbations.
#[allow(clippy::needless_range_loop)]
pub fn random_metric() -> impl Strategy<Value = Metric> {
    let entry = (prop::sample::select(vec!["x", "y*z", "p*q", "x^2", "q*z + y", "exp(z)", "x*p^2"]), -2i64..=2)
        .prop_map(|(m, c)| &p(m) * &Scalar::rational(c, 5));
    prop::collection::vec(entry, 15).prop_map(|e| {
        let base = [1i64, -1, 1, -1, 1];
        let mut g = vec![vec![Scalar::zero(); 5]; 5];
        let mut k = 0;
        for a in 0..5 {
            for b in a..5 {
                let c = if a == b { Scalar::integer(base[a] * 3) } else if b == 4 - a { Scalar::one() } else { Scalar::zero() };
                g[a][b] = &c + &e[k];
                g[b][a] = g[a][b].clone();
                k += 1;
            }
        }
        Metric::from_components(&rolling_chart(), g).unwrap()
    })
}

// ---- forms under the model coordinate changes

pub const HAT_ATOMS: &[&str] = &["xh", "yh", "zh", "ph", "qh", "alpha"];
pub const HAT_DENOMINATORS: &[&str] = &["zh", "qh", "yh^2 + 1"];
pub const JET_ATOMS: &[&str] = &["x", "y", "z", "p", "q", "alpha"];
pub const JET_DENOMINATORS: &[&str] = &["x", "q", "z^2 + 1"];

/// Shallow coefficients: rational maps compose into large rational functions.
pub fn map_scalar(atoms: &'static [&'static str], dens: &'static [&'static str]) -> BoxedStrategy<Scalar> {
    let leaf = prop_oneof![
        prop::sample::select(atoms).prop_map(p),
        (-3i64..=3).prop_map(Scalar::integer),
    ];
    let term = (leaf.clone(), leaf).prop_map(|(a, b)| &a * &b);
    (term.clone(), term, prop::option::of(prop::sample::select(dens)))
        .prop_map(|(a, b, d)| {
            let s = &a + &b;
            match d {
                Some(d) => s.try_div(&p(d)).unwrap(),
                None => s,
            }
        })
        .boxed()
}

pub fn hat_form(max: usize) -> BoxedStrategy<Form> {
    (0usize..=max)
        .prop_flat_map(|k| form_of_degree(&hat_chart(), k, map_scalar(HAT_ATOMS, HAT_DENOMINATORS)))
        .boxed()
}

pub fn jet_form(max: usize) -> BoxedStrategy<Form> {
    (0usize..=max)
        .prop_flat_map(|k| form_of_degree(&jet_chart(), k, map_scalar(JET_ATOMS, JET_DENOMINATORS)))
        .boxed()
}

/// A few monomial 2-forms `c dx^i ∧ dx^j`.
pub fn sparse_two_form(chart: Arc<Chart>, coefs: BoxedStrategy<Scalar>) -> BoxedStrategy<Form> {
    prop::collection::vec((coefs, 0usize..5, 0usize..5), 1..=3)
        .prop_map(move |terms| {
            terms.iter().fold(Form::zero(&chart, 2), |acc, (c, i, j)| {
                let t = Form::basis(&chart, *i).wedge(&Form::basis(&chart, *j)).unwrap();
                acc.add(&t.scale(c)).unwrap()
            })
        })
        .boxed()
}

pub fn commutes(m: &CoordMap, f: &Form) -> bool {
    let lhs = m.pullback(&f.d().unwrap()).unwrap();
    let rhs = m.pullback(f).unwrap().d().unwrap();
    lhs.sub(&rhs).unwrap().is_zero()
}


pub fn pair_hat_form(max: usize) -> BoxedStrategy<Form> {
    (0usize..=max)
        .prop_flat_map(|k| form_of_degree(&pair_hat_chart(), k, map_scalar(HAT_ATOMS, HAT_DENOMINATORS)))
        .boxed()
}

// ---- property bodies, shared with the acceptance runner

pub type Verdict = Result<(), TestCaseError>;

pub fn d_squared_vanishes(f: &Form) -> Verdict {
    prop_assert!(f.d().unwrap().d().unwrap().is_zero());
    Ok(())
}

pub fn scalar_leibniz(a: &Scalar, b: &Scalar, v: &str) -> Verdict {
    let v = coord(v);
    let lhs = (a * b).diff(&v).unwrap();
    let rhs = &(a * &b.diff(&v).unwrap()) + &(b * &a.diff(&v).unwrap());
    prop_assert!((&lhs - &rhs).is_zero(), "{lhs} vs {rhs}");
    Ok(())
}

pub fn graded_leibniz(a: &Form, b: &Form) -> Verdict {
    prop_assume!(a.degree() + b.degree() < 5);
    let lhs = a.wedge(b).unwrap().d().unwrap();
    let first = a.d().unwrap().wedge(b).unwrap();
    let second = a.wedge(&b.d().unwrap()).unwrap();
    let second = if a.degree().is_multiple_of(2) { second } else { second.neg() };
    prop_assert!(lhs.sub(&first.add(&second).unwrap()).unwrap().is_zero());
    Ok(())
}

pub fn jacobi(x: &VectorField, y: &VectorField, z: &VectorField) -> Verdict {
    let s = x.bracket(&y.bracket(z).unwrap()).unwrap()
        .add(&y.bracket(&z.bracket(x).unwrap()).unwrap()).unwrap()
        .add(&z.bracket(&x.bracket(y).unwrap()).unwrap()).unwrap();
    prop_assert!(s.is_zero());
    Ok(())
}

/// Bianchi, pair symmetry and Weyl trace-freeness at one point.
pub fn curvature_identities(g: &Metric, pt: &Point) -> Verdict {
    let model = CurvatureModel::new(g).unwrap();
    let c = model.at(pt);
    prop_assume!(c.is_ok());
    let c = c.unwrap();
    prop_assume!(c.riemann_norm > 1e-6);
    let ginv = model.inverse_metric(pt).unwrap();
    prop_assert!(c.bianchi_defect() < 1e-9, "bianchi {}", c.bianchi_defect());
    prop_assert!(c.pair_symmetry_defect() < 1e-9);
    prop_assert!(c.weyl_trace_defect(&ginv) < 1e-9, "trace {}", c.weyl_trace_defect(&ginv));
    Ok(())
}

pub fn pullback_commutes(m: &CoordMap, f: &Form) -> Verdict {
    prop_assert!(commutes(m, f), "pullback and d disagree on {f}");
    Ok(())
}
