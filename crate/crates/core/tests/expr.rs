use g2monge::{parse, Point, Scalar, Symbol};

fn p(s: &str) -> Scalar {
    parse(s).unwrap()
}

#[test]
fn radical_relation() {
    let s = p("sqrt(q)");
    assert_eq!((&s * &s).to_string(), "q");
}

#[test]
fn hyperbolic_identity() {
    let e = p("cosh(z)^2 - sinh(z)^2");
    assert!((e - Scalar::one()).is_zero());
}

#[test]
fn exponential_group_law() {
    assert_eq!(p("exp(z - alpha*x)*exp(alpha*x)").to_string(), "exp(z)");
    assert!(p("exp(0*x)").is_one());
}

#[test]
fn derivative_rules() {
    let x = Symbol::coordinate("x").unwrap();
    let q = Symbol::coordinate("q").unwrap();
    assert_eq!(p("exp(alpha*x)").diff(&x).unwrap(), p("alpha*exp(alpha*x)"));
    assert_eq!(p("sqrt(q)").diff(&q).unwrap(), p("1/(2*sqrt(q))"));
}

#[test]
fn monge_f_specialisations() {
    let f = p("q*z^2 + 1/(alpha^2 - 1)*(sqrt(q)*z - 1/(2*sqrt(q)*x))^2");
    let alpha = Symbol::parameter("alpha").unwrap();
    let f9 = f
        .subst(&[(alpha.clone(), Scalar::integer(3))].into())
        .unwrap();
    assert!((f9 - p("9/8*q*z^2 - z/(8*x) + 1/(32*q*x^2)")).is_zero());
    let f19 = f.subst(&[(alpha, Scalar::rational(1, 3))].into()).unwrap();
    assert!((f19 - p("-1/8*q*z^2 + 9/8*z/x - 9/(32*q*x^2)")).is_zero());
}

#[test]
fn round_trips() {
    for s in [
        "1/(alpha^2-1)",
        "q*z^2",
        "(x + 1)/(x^2*(alpha^2 - 1))",
        "3/10*q - exp(-alpha*x + z)",
        "cbrt(alpha^2 - 1)*x^(1/3)/cbrt(2)",
        "1/(2*q^3*x^2*(alpha^2 - 1))",
        "q*z^2 + 1/(alpha^2 - 1)*(sqrt(q)*z - 1/(2*sqrt(q)*x))^2",
    ] {
        let a = p(s);
        let printed = a.to_string();
        let b = p(&printed);
        assert_eq!(b.to_string(), printed, "from {s}");
        assert!((a - b).is_zero());
    }
    assert_eq!(p("1/(alpha^2-1)").to_string(), "1/(alpha^2 - 1)");
}

#[test]
fn numeric_values() {
    let k = p("1/(2*q^3*x^2*(alpha^2 - 1))");
    let pt: Point = [("q", 1.0), ("x", 1.0), ("alpha", 3.0), ("z", 1.0)]
        .into_iter()
        .map(|(n, v)| (Symbol::lookup(n).unwrap(), v))
        .collect();
    assert!((k.eval(&pt).unwrap() - 0.0625).abs() < 1e-15);
    let f = p("q*z^2 + 1/(alpha^2 - 1)*(sqrt(q)*z - 1/(2*sqrt(q)*x))^2");
    assert!((f.eval(&pt).unwrap() - 1.03125).abs() < 1e-14);
}
