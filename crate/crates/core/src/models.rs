//! Concrete coframes, Pfaffian systems, coordinate changes and adapted coframes
//! for the hyperboloid rolling distribution, the two-copy `sl(2)` family and the
//! Monge normal form they reduce to.
//!
//! Every builder is symbolic in the parameters `alpha`, `beta`, `gamma`, `c`;
//! pass [`Bindings`] to specialize them. An empty binding keeps them free.

use std::fmt;
use std::sync::{Arc, LazyLock};

use crate::cartan::{nurowski_metric, AdaptedCoframe, Metric};
use crate::distribution::PfaffianSystem;
use crate::error::{Error, Result};
use crate::expr::{parse, Bindings, Scalar, Symbol};
use crate::forms::{Chart, CoordMap, Form, Guard, VectorField};

const XYZPQ: [&str; 5] = ["x", "y", "z", "p", "q"];
const HAT: [&str; 5] = ["xh", "yh", "zh", "ph", "qh"];

fn ex(text: &str) -> Scalar {
    parse(text).unwrap_or_else(|e| panic!("catalogue expression {text}: {e}"))
}

fn chart(name: &str, coords: &[&str], guards: &[(bool, &str)]) -> Arc<Chart> {
    let guards = guards
        .iter()
        .map(|(pos, t)| if *pos { Guard::Positive(ex(t)) } else { Guard::Nonzero(ex(t)) })
        .collect();
    Chart::new(name, coords, guards).expect("catalogue chart")
}

static ROLLING: LazyLock<Arc<Chart>> = LazyLock::new(|| chart("rolling", &XYZPQ, &[(false, "y")]));
static PROLONGED: LazyLock<Arc<Chart>> =
    LazyLock::new(|| chart("prolonged", &XYZPQ, &[(true, "y + alpha")]));
static HAT3: LazyLock<Arc<Chart>> = LazyLock::new(|| {
    chart(
        "hat",
        &HAT,
        &[(true, "zh"), (false, "qh"), (false, "yh*qh + (1 - 1/alpha^2)*zh")],
    )
});
static JET: LazyLock<Arc<Chart>> = LazyLock::new(|| {
    chart("jet", &XYZPQ, &[(true, "x"), (true, "q"), (false, "1 - 2*z*q*x")])
});
static PAIR: LazyLock<Arc<Chart>> =
    LazyLock::new(|| chart("pair", &XYZPQ, &[(false, "q"), (false, "gamma*y - 1")]));
static HAT4: LazyLock<Arc<Chart>> =
    LazyLock::new(|| chart("hat-pair", &HAT, &[(false, "qh"), (false, "yh + zh")]));

/// Chart of the left-invariant `sl(2)` parametrisation.
pub fn rolling_chart() -> Arc<Chart> {
    ROLLING.clone()
}

/// Chart of the prolonged fractional-linear parametrisation.
pub fn prolonged_chart() -> Arc<Chart> {
    PROLONGED.clone()
}

/// Intermediate chart `(xh, yh, zh, ph, qh)` of the rolling reduction.
pub fn hat_chart() -> Arc<Chart> {
    HAT3.clone()
}

/// Mixed jet space `(x, y, z, p, q)` on the branch `x > 0`, `q > 0`.
pub fn jet_chart() -> Arc<Chart> {
    JET.clone()
}

/// Chart carrying two copies of `sl(2)`.
pub fn pair_chart() -> Arc<Chart> {
    PAIR.clone()
}

/// Intermediate chart of the two-copy reduction.
pub fn pair_hat_chart() -> Arc<Chart> {
    HAT4.clone()
}

/// Parameter symbol by name.
pub fn param(name: &str) -> Scalar {
    Scalar::parameter(name).expect("parameter name")
}

/// Bindings from `(name, value)` pairs, e.g. `params(&[("alpha", Scalar::integer(3))])`.
pub fn params(pairs: &[(&str, Scalar)]) -> Bindings {
    pairs
        .iter()
        .map(|(n, v)| (Symbol::parameter(n).expect("parameter name"), v.clone()))
        .collect()
}

fn sp(s: &Scalar, b: &Bindings) -> Result<Scalar> {
    if b.is_empty() {
        Ok(s.clone())
    } else {
        s.subst(b)
    }
}

fn spf(f: &Form, b: &Bindings) -> Result<Form> {
    if b.is_empty() {
        Ok(f.clone())
    } else {
        f.subst(b)
    }
}

fn nonzero(s: &Scalar, what: &str) -> Result<()> {
    if s.is_zero() {
        Err(Error::GuardViolation(format!("{what} must be nonzero")))
    } else {
        Ok(())
    }
}

fn d(ch: &Arc<Chart>, name: &str) -> Form {
    Form::dcoord(ch, name).expect("chart coordinate")
}

/// `Σ coef · d(coord)` with coefficients given as expression text.
fn lin(ch: &Arc<Chart>, terms: &[(&str, &str)]) -> Form {
    let mut f = Form::zero(ch, 1);
    for (c, t) in terms {
        f = f.add(&d(ch, c).scale(&ex(t))).expect("same chart");
    }
    f
}

fn sum(forms: &[(Scalar, &Form)]) -> Result<Form> {
    let mut out = Form::zero(forms[0].1.chart(), forms[0].1.degree());
    for (c, f) in forms {
        out = out.add(&f.scale(c))?;
    }
    Ok(out)
}

fn int(n: i64) -> Scalar {
    Scalar::integer(n)
}

fn rat(n: i64, d: i64) -> Scalar {
    Scalar::rational(n, d)
}

/// Named coframe together with the exterior derivatives it is expected to have.
#[derive(Clone)]
pub struct NamedCoframe {
    pub name: &'static str,
    pub labels: Vec<&'static str>,
    pub forms: Vec<Form>,
    pub expected: Vec<Form>,
}

impl NamedCoframe {
    /// `d(form_i) − expected_i` for every form.
    pub fn defects(&self) -> Result<Vec<Form>> {
        self.forms
            .iter()
            .zip(&self.expected)
            .map(|(f, e)| f.d()?.sub(e))
            .collect()
    }

    pub fn holds(&self) -> Result<bool> {
        Ok(self.defects()?.iter().all(Form::is_zero))
    }
}

impl fmt::Display for NamedCoframe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (l, x) in self.labels.iter().zip(&self.forms) {
            writeln!(f, "{l} = {x}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// left-invariant parametrisation and the rolling system

/// `σ1, σ2, σ3` with `dσ1 = −σ2∧σ3`, `dσ2 = −σ1∧σ3`, `dσ3 = σ1∧σ2`.
pub fn sigma_coframe() -> Result<NamedCoframe> {
    let ch = rolling_chart();
    let s1 = lin(&ch, &[("p", "sinh(y)*cosh(z)"), ("y", "-sinh(z)")]);
    let s2 = lin(&ch, &[("p", "-sinh(y)*sinh(z)"), ("y", "cosh(z)")]);
    let s3 = lin(&ch, &[("z", "-1"), ("p", "-cosh(y)")]);
    let expected = vec![s2.wedge(&s3)?.neg(), s1.wedge(&s3)?.neg(), s1.wedge(&s2)?];
    Ok(NamedCoframe {
        name: "sigma",
        labels: vec!["sigma1", "sigma2", "sigma3"],
        forms: vec![s1, s2, s3],
        expected,
    })
}

/// `ω1, ω2, ω3` of the rolling system written over arbitrary `σ`'s on a chart
/// with coordinates `x` and `q`.
pub fn rolling_from_sigma(sigma: &[Form], b: &Bindings) -> Result<Vec<Form>> {
    let ch = sigma[0].chart().clone();
    let a = sp(&param("alpha"), b)?;
    let e = (&a * &ch.coord("x")?).exp()?;
    let dq = d(&ch, "q").scale(&e);
    Ok(vec![
        sigma[0].add(&dq)?.neg(),
        sigma[1].add(&d(&ch, "x"))?,
        sigma[2].add(&dq.scale(&a))?.neg(),
    ])
}

/// `ω1..ω5`: the rolling forms completed by `ω4 = −dx`, `ω5 = exp(αx) dq`.
pub fn rolling_coframe(b: &Bindings) -> Result<Vec<Form>> {
    let ch = rolling_chart();
    let sigma = sigma_coframe()?.forms;
    let mut w = rolling_from_sigma(&sigma, b)?;
    let a = sp(&param("alpha"), b)?;
    w.push(d(&ch, "x").neg());
    w.push(d(&ch, "q").scale(&(&a * &ch.coord("x")?).exp()?));
    Ok(w)
}

/// The rolling Pfaffian system `{ω1, ω2, ω3}`.
pub fn rolling_system(b: &Bindings) -> Result<PfaffianSystem> {
    let w = rolling_coframe(b)?;
    PfaffianSystem::new("rolling", w[..3].to_vec())
}

/// Constants of the adapted rolling coframe.
#[derive(Clone, Debug)]
pub struct RollingConstants {
    pub k: Scalar,
    pub p: Scalar,
    pub q: Scalar,
    pub r: Scalar,
    pub s: Scalar,
    pub t: Scalar,
    pub u: Scalar,
}

pub fn rolling_constants(b: &Bindings) -> Result<RollingConstants> {
    let a2m1 = sp(&ex("alpha^2 - 1"), b)?;
    nonzero(&a2m1, "alpha^2 - 1")?;
    let k = a2m1.inv()?;
    let q = sp(&ex("(3*alpha^2 - 7)/10"), b)?.try_div(&a2m1.pow_ratio(2, 3)?)?;
    Ok(RollingConstants {
        k,
        p: Scalar::zero(),
        q: q.clone(),
        r: Scalar::zero(),
        s: q,
        t: Scalar::zero(),
        u: Scalar::zero(),
    })
}

/// `θ1 = ω1, θ2 = ω2, θ3 = K^{1/3} ω3, θ4 = K^{-1/3} ω4 + Pθ1 + Qθ2 + Rθ3,
/// θ5 = K^{-1/3} ω5 + Sθ1 + Tθ2 + Uθ3`.
pub fn rolling_adapted_with(c: &RollingConstants, b: &Bindings) -> Result<AdaptedCoframe> {
    let w = rolling_coframe(b)?;
    let k3 = c.k.cbrt()?;
    let km3 = k3.inv()?;
    let t1 = w[0].clone();
    let t2 = w[1].clone();
    let t3 = w[2].scale(&k3);
    let t4 = sum(&[(km3.clone(), &w[3]), (c.p.clone(), &t1), (c.q.clone(), &t2), (c.r.clone(), &t3)])?;
    let t5 = sum(&[(km3, &w[4]), (c.s.clone(), &t1), (c.t.clone(), &t2), (c.u.clone(), &t3)])?;
    AdaptedCoframe::new("rolling-adapted", vec![t1, t2, t3, t4, t5])
}

pub fn rolling_adapted(b: &Bindings) -> Result<AdaptedCoframe> {
    rolling_adapted_with(&rolling_constants(b)?, b)
}

fn sq(f: &Form) -> Result<Metric> {
    Metric::square(f)
}

fn sym(a: &Form, c: &Form) -> Result<Metric> {
    Metric::sym(a, c)
}

/// `ω̄1 = −σ1 + ω5` and `ω̄2 = σ2 + ω4`.
pub fn rolling_bar_forms(b: &Bindings) -> Result<(Form, Form)> {
    let s = sigma_coframe()?.forms;
    let w = rolling_coframe(b)?;
    Ok((w[4].sub(&s[0])?, s[1].add(&w[3])?))
}

/// The successive expressions of `K^{1/3} g` for the adapted rolling coframe:
/// the metric itself, then five rewritings in terms of `ω`, `σ` and `ω̄`.
pub fn rolling_metric_lines(b: &Bindings) -> Result<Vec<(&'static str, Metric)>> {
    let c = rolling_constants(b)?;
    let cf = rolling_adapted_with(&c, b)?;
    let k = &c.k;
    let g0 = nurowski_metric(&cf)?.scale(&k.cbrt()?);
    let w = rolling_coframe(b)?;
    let s = sigma_coframe()?.forms;
    let (wb1, wb2) = rolling_bar_forms(b)?;
    let a2m1 = sp(&ex("alpha^2 - 1"), b)?;
    let coef = sp(&ex("3*alpha^2 - 7"), b)?.try_div(&(&a2m1 * &int(5)))?;
    let cube = rat(4, 3).try_div(&a2m1)?;
    let half = rat(1, 2);
    let diff12 = sq(&w[0])?.sub(&sq(&w[1])?);
    let tail = |c: &Scalar| -> Result<Metric> {
        Ok(diff12.scale(c).add(&sq(&w[2])?.scale(&cube)))
    };

    let g1 = sym(&w[0], &w[4])?
        .scale(&int(2))
        .sub(&sym(&w[1], &w[3])?.scale(&int(2)))
        .add(&diff12.scale(&(&sp(&ex("(3*alpha^2 - 7)/5"), b)? * k)))
        .add(&sq(&w[2])?.scale(&(&rat(4, 3) * k)));

    let lead = sq(&w[3])?.scale(&int(2)).sub(&sq(&w[4])?.scale(&int(2)));
    let g2 = lead
        .add(&sq(&s[0].sub(&w[4])?)?.scale(&half))
        .sub(&sq(&w[0])?.scale(&half))
        .sub(&sq(&s[1].add(&w[3])?)?.scale(&half))
        .add(&sq(&w[1])?.scale(&half))
        .add(&tail(&coef)?);
    let g3 = lead
        .add(&sq(&wb1)?.scale(&half))
        .sub(&sq(&w[0])?.scale(&half))
        .sub(&sq(&wb2)?.scale(&half))
        .add(&sq(&w[1])?.scale(&half))
        .add(&tail(&coef)?);
    let shifted = &coef - &Scalar::one();
    let g4 = lead
        .add(&sq(&wb1)?.scale(&half))
        .add(&sq(&w[0])?.scale(&half))
        .sub(&sq(&wb2)?.scale(&half))
        .sub(&sq(&w[1])?.scale(&half))
        .add(&tail(&shifted)?);
    let g5 = sq(&w[3])?
        .sub(&sq(&w[4])?)
        .sub(&sq(&s[1])?.sub(&sq(&s[0])?))
        .add(&tail(&shifted)?);
    Ok(vec![
        ("K^(1/3) g", g0),
        ("omega form", g1),
        ("sigma form", g2),
        ("bar form", g3),
        ("regrouped bar form", g4),
        ("diagonal form", g5),
    ])
}

/// Both sides of `σ1² − σ2² + ω5² − ω4² = ½(ω1² − ω2²) + ½(ω̄1² − ω̄2²)`.
pub fn rolling_quadratic_identity(b: &Bindings) -> Result<(Metric, Metric)> {
    let w = rolling_coframe(b)?;
    let s = sigma_coframe()?.forms;
    let (wb1, wb2) = rolling_bar_forms(b)?;
    let half = rat(1, 2);
    let lhs = sq(&s[0])?.sub(&sq(&s[1])?).add(&sq(&w[4])?).sub(&sq(&w[3])?);
    let rhs = sq(&w[0])?
        .sub(&sq(&w[1])?)
        .add(&sq(&wb1)?)
        .sub(&sq(&wb2)?)
        .scale(&half);
    Ok((lhs, rhs))
}

// ---------------------------------------------------------------------------
// prolonged parametrisation

/// `τ1 = dy + y dz`, `τ2 = −(dp − p dz)`, `τ3 = −dz` on a chart with `y, z, p`.
fn tau(ch: &Arc<Chart>) -> [Form; 3] {
    [
        lin(ch, &[("y", "1"), ("z", "y")]),
        lin(ch, &[("p", "-1"), ("z", "p")]),
        lin(ch, &[("z", "-1")]),
    ]
}

/// `s1 = τ1 + y²τ2, s2 = τ2, s3 = τ3 − 2yτ2`.
fn s_forms(ch: &Arc<Chart>) -> Result<[Form; 3]> {
    let [t1, t2, t3] = tau(ch);
    Ok([
        t1.add(&t2.scale(&ex("y^2")))?,
        t2.clone(),
        t3.sub(&t2.scale(&ex("2*y")))?,
    ])
}

/// `s1, s2, s3` with `ds1 = −s1∧s3`, `ds2 = s2∧s3`, `ds3 = −2 s1∧s2`.
pub fn prolonged_coframe() -> Result<NamedCoframe> {
    let ch = prolonged_chart();
    let [s1, s2, s3] = s_forms(&ch)?;
    let expected = vec![
        s1.wedge(&s3)?.neg(),
        s2.wedge(&s3)?,
        s1.wedge(&s2)?.scale(&int(-2)),
    ];
    Ok(NamedCoframe {
        name: "prolonged-s",
        labels: vec!["s1", "s2", "s3"],
        forms: vec![s1, s2, s3],
        expected,
    })
}

/// `∂y`, `y²∂y − 2y∂z − (2yp + 1)∂p`, `y∂y − ∂z − p∂p` on the prolonged chart.
pub fn sl2_fields() -> Result<Vec<VectorField>> {
    let ch = prolonged_chart();
    let f = |c: [&str; 5]| VectorField::new(&ch, c.iter().map(|t| ex(t)).collect());
    Ok(vec![
        f(["0", "1", "0", "0", "0"])?,
        f(["0", "y^2", "-2*y", "-(2*y*p + 1)", "0"])?,
        f(["0", "y", "-1", "-p", "0"])?,
    ])
}

/// Images of `σ1, σ2, σ3` under the identification with `−(s1 + s2), s1 − s2, −s3`.
pub fn sigma_from_s() -> Result<Vec<Form>> {
    let [s1, s2, s3] = s_forms(&prolonged_chart())?;
    Ok(vec![s1.add(&s2)?.neg(), s1.sub(&s2)?, s3.neg()])
}

/// `θ1 = s1 + s2 − exp(αx)dq`, `θ2 = s1 − s2 + dx`, `θ3 = −s3 + α exp(αx)dq`.
pub fn prolonged_system(b: &Bindings) -> Result<PfaffianSystem> {
    let ch = prolonged_chart();
    let [s1, s2, s3] = s_forms(&ch)?;
    let a = sp(&param("alpha"), b)?;
    let edq = d(&ch, "q").scale(&(&a * &ch.coord("x")?).exp()?);
    PfaffianSystem::new(
        "prolonged-rolling",
        vec![
            s1.add(&s2)?.sub(&edq)?,
            s1.sub(&s2)?.add(&d(&ch, "x"))?,
            s3.neg().add(&edq.scale(&a))?,
        ],
    )
}

/// Pairs `(combination of θ's, displayed coordinate expression)` for the
/// prolonged rolling system: the three θ's themselves, then `θ1 + θ3/α`,
/// `θ1 − θ2` and `θ3 − y(θ1 − θ2)`.
pub fn prolonged_displays(b: &Bindings) -> Result<Vec<(&'static str, Form, Form)>> {
    let ch = prolonged_chart();
    let sys = prolonged_system(b)?;
    let t = sys.forms();
    let dp_pdz = lin(&ch, &[("p", "1"), ("z", "-p")]);
    let dy_ydz = lin(&ch, &[("y", "1"), ("z", "y")]);
    let a = sp(&param("alpha"), b)?;
    let y = ch.coord("y")?;
    let e = (&a * &ch.coord("x")?).exp()?;
    let dq = d(&ch, "q");
    let dx = d(&ch, "x");
    let dz = d(&ch, "z");

    let d1 = dy_ydz
        .sub(&dp_pdz.scale(&ex("y^2 + 1")))?
        .sub(&dq.scale(&e))?;
    let d2 = dp_pdz.scale(&ex("1 - y^2")).add(&dy_ydz)?.add(&dx)?;
    let d3 = dp_pdz
        .scale(&ex("-2*y"))
        .add(&dz)?
        .add(&dq.scale(&(&a * &e)))?;
    let inv_a = a.inv()?;
    let c1 = t[0].add(&t[2].scale(&inv_a))?;
    let c1d = dy_ydz
        .sub(&dp_pdz.scale(&(&ex("y^2 + 1") + &(&int(2) * &(&y * &inv_a)))))?
        .add(&dz.scale(&inv_a))?;
    let c2 = t[0].sub(&t[1])?;
    let c2d = dp_pdz.scale(&int(-2)).sub(&dx)?.sub(&dq.scale(&e))?;
    let c3 = t[2].sub(&c2.scale(&y))?;
    let c3d = dz.add(&dx.scale(&y))?.add(&dq.scale(&(&(&y + &a) * &e)))?;
    Ok(vec![
        ("theta1", t[0].clone(), d1),
        ("theta2", t[1].clone(), d2),
        ("theta3", t[2].clone(), d3),
        ("theta1 + theta3/alpha", c1, c1d),
        ("theta1 - theta2", c2, c2d),
        ("theta3 - y*(theta1 - theta2)", c3, c3d),
    ])
}

/// `1 − 1/α²`.
pub fn rolling_k(b: &Bindings) -> Result<Scalar> {
    sp(&ex("1 - 1/alpha^2"), b)
}

fn guard_alpha(b: &Bindings) -> Result<()> {
    nonzero(&sp(&ex("alpha^2 - 1"), b)?, "alpha^2 - 1")?;
    nonzero(&sp(&param("alpha"), b)?, "alpha")
}

/// Prolonged chart to hat chart:
/// `xh = q − exp(−αx)/α, yh = exp(z)(y + 1/α), zh = exp(z − αx), ph = exp(−z)p, qh = exp(−αx)/α`.
pub fn hat_map(b: &Bindings) -> Result<CoordMap> {
    guard_alpha(b)?;
    let exprs = [
        "q - exp(-alpha*x)/alpha",
        "exp(z)*(y + 1/alpha)",
        "exp(z - alpha*x)",
        "exp(-z)*p",
        "exp(-alpha*x)/alpha",
    ]
    .iter()
    .map(|t| sp(&ex(t), b))
    .collect::<Result<Vec<_>>>()?;
    CoordMap::new("hat", &prolonged_chart(), &hat_chart(), exprs)
}

/// `dyh − (yh² + k zh²/(α² qh²)) dph`, `dph + dxh/(2 zh)`, `dzh + (yh + k zh/qh) dxh`
/// with `k = 1 − 1/α²`.
pub fn hat_system(b: &Bindings) -> Result<PfaffianSystem> {
    guard_alpha(b)?;
    let ch = hat_chart();
    let forms = [
        lin(&ch, &[("yh", "1"), ("ph", "-(yh^2 + (1 - 1/alpha^2)*zh^2/(alpha^2*qh^2))")]),
        lin(&ch, &[("ph", "1"), ("xh", "1/(2*zh)")]),
        lin(&ch, &[("zh", "1"), ("xh", "yh + (1 - 1/alpha^2)*zh/qh")]),
    ]
    .iter()
    .map(|f| spf(f, b))
    .collect::<Result<Vec<_>>>()?;
    PfaffianSystem::new("hat", forms)
}

/// Hat chart to jet space:
/// `x = 2zh, y = xh + 2zh ph, z = yh, p = ph, q = 1/(4(zh yh + k zh²/qh))`.
pub fn jet_map(b: &Bindings) -> Result<CoordMap> {
    guard_alpha(b)?;
    let exprs = [
        "2*zh",
        "xh + 2*zh*ph",
        "yh",
        "ph",
        "1/(4*(zh*yh + (1 - 1/alpha^2)*zh^2/qh))",
    ]
    .iter()
    .map(|t| sp(&ex(t), b))
    .collect::<Result<Vec<_>>>()?;
    CoordMap::new("jet", &hat_chart(), &jet_chart(), exprs)
}

/// Jet space to hat chart:
/// `xh = y − xp, yh = z, zh = x/2, ph = p, qh = k q x²/(1 − 2zqx)`.
pub fn jet_inverse(b: &Bindings) -> Result<CoordMap> {
    guard_alpha(b)?;
    let exprs = [
        "y - x*p",
        "z",
        "x/2",
        "p",
        "(1 - 1/alpha^2)*q*x^2/(1 - 2*z*q*x)",
    ]
    .iter()
    .map(|t| sp(&ex(t), b))
    .collect::<Result<Vec<_>>>()?;
    CoordMap::new("jet-inverse", &jet_chart(), &hat_chart(), exprs)
}

// ---------------------------------------------------------------------------
// Monge normal form

/// `F = q z² + (√q z − 1/(2√q x))² / (α² − 1)`.
pub fn monge_f(b: &Bindings) -> Result<Scalar> {
    let a2m1 = sp(&ex("alpha^2 - 1"), b)?;
    nonzero(&a2m1, "alpha^2 - 1")?;
    monge_f_with(&a2m1.inv()?)
}

/// `q z² + m (√q z − 1/(2√q x))²` on the jet chart.
pub fn monge_f_with(m: &Scalar) -> Result<Scalar> {
    let ch = jet_chart();
    let (x, z, q) = (ch.coord("x")?, ch.coord("z")?, ch.coord("q")?);
    let rq = q.sqrt()?;
    let inner = &(&rq * &z) - &(&(&int(2) * &rq) * &x).inv()?;
    Ok(&(&q * &z.pow(2)?) + &(m * &inner.pow(2)?))
}

/// Monge system `dy − p dx`, `dp − q dx`, `dz − F dx` on the jet chart.
pub fn monge_system(f: &Scalar) -> Result<PfaffianSystem> {
    let ch = jet_chart();
    let dx = d(&ch, "x");
    PfaffianSystem::new(
        "monge",
        vec![
            d(&ch, "y").sub(&dx.scale(&ch.coord("p")?))?,
            d(&ch, "p").sub(&dx.scale(&ch.coord("q")?))?,
            d(&ch, "z").sub(&dx.scale(f))?,
        ],
    )
}

/// `F` of the rolling reduction written on the hat chart before returning to
/// jet coordinates: `q z² + (1 − 1/α²) q exp(2z)` with `exp(2z)` replaced by
/// `zh²/(α² qh²)` and `q, z` by their hat-chart images.
pub fn hat_f(b: &Bindings) -> Result<Scalar> {
    let jm = jet_map(b)?;
    let bind = jm.bindings();
    let ch = jet_chart();
    let q = ch.coord("q")?.subst(&bind)?;
    let z = ch.coord("z")?.subst(&bind)?;
    let e2z = sp(&ex("zh^2/(alpha^2*qh^2)"), b)?;
    Ok(&(&q * &z.pow(2)?) + &(&(&rolling_k(b)? * &q) * &e2z))
}

// ---------------------------------------------------------------------------
// two copies of sl(2)

/// Base forms `ω1..ω5` of the two-copy chart.
pub fn pair_base_forms() -> Vec<Form> {
    let ch = pair_chart();
    vec![
        lin(&ch, &[("y", "1"), ("z", "y")]),
        lin(&ch, &[("p", "-1"), ("z", "p")]),
        lin(&ch, &[("z", "-1")]),
        lin(&ch, &[("q", "1"), ("z", "q")]),
        lin(&ch, &[("x", "-1"), ("z", "x")]),
    ]
}

/// `s1, s2, s3, s4, s5, s̄3, s̄4, s̄5` in that order.
pub fn pair_s_forms() -> Result<Vec<Form>> {
    let w = pair_base_forms();
    let s1 = w[0].add(&w[1].scale(&ex("y^2")))?;
    let s2 = w[1].clone();
    let s3 = w[2].sub(&w[1].scale(&ex("2*y")))?;
    let s4 = w[3].add(&w[4].scale(&ex("q^2")))?;
    let s5 = w[4].clone();
    let sb3 = s3.sub(&w[4].scale(&ex("2*q")))?;
    let sb4 = s4.scale(&ex("1/q"));
    let sb5 = w[4].scale(&ex("q"));
    Ok(vec![s1, s2, s3, s4, s5, sb3, sb4, sb5])
}

/// `s1, s2, s̄3, s̄4, s̄5` with their displayed exterior derivatives.
pub fn pair_coframe() -> Result<NamedCoframe> {
    let s = pair_s_forms()?;
    let (s1, s2, sb3, sb4, sb5) = (&s[0], &s[1], &s[5], &s[6], &s[7]);
    let expected = vec![
        s1.wedge(sb3)?.neg().sub(&s1.wedge(sb5)?.scale(&int(2)))?,
        s2.wedge(sb3)?.add(&s2.wedge(sb5)?.scale(&int(2)))?,
        s1.wedge(s2)?
            .scale(&int(-2))
            .sub(&sb4.wedge(sb5)?.scale(&int(2)))?,
        sb4.wedge(sb5)?,
        sb4.wedge(sb5)?,
    ];
    Ok(NamedCoframe {
        name: "pair-s",
        labels: vec!["s1", "s2", "sbar3", "sbar4", "sbar5"],
        forms: vec![s1.clone(), s2.clone(), sb3.clone(), sb4.clone(), sb5.clone()],
        expected,
    })
}

fn guard_pair(b: &Bindings) -> Result<()> {
    nonzero(&sp(&ex("beta*gamma - 1"), b)?, "beta*gamma - 1")?;
    nonzero(&sp(&param("gamma"), b)?, "gamma")
}

/// `θ1 = s1 − β s̄4`, `θ2 = s2 − γ s̄5`, `θ3 = s3 + s̄4 + s̄5`.
pub fn pair_system(b: &Bindings) -> Result<PfaffianSystem> {
    let s = pair_s_forms()?;
    let (beta, gamma) = (sp(&param("beta"), b)?, sp(&param("gamma"), b)?);
    PfaffianSystem::new(
        "pair",
        vec![
            s[0].sub(&s[6].scale(&beta))?,
            s[1].sub(&s[7].scale(&gamma))?,
            s[2].add(&s[6])?.add(&s[7])?,
        ],
    )
}

/// Pairs `(combination, displayed coordinate expression)` for the two-copy
/// system: the three θ's, then `θ1 + βθ3 + (β/γ)θ2`, `θ2`, and
/// `(θ3 + 2yθ2)/(2q(γy − 1))` written with `ỹ = y − β`.
pub fn pair_displays(b: &Bindings) -> Result<Vec<(&'static str, Form, Form)>> {
    let ch = pair_chart();
    let sys = pair_system(b)?;
    let t = sys.forms();
    let (beta, gamma) = (sp(&param("beta"), b)?, sp(&param("gamma"), b)?);
    let (y, q) = (ch.coord("y")?, ch.coord("q")?);
    let dp_pdz = lin(&ch, &[("p", "1"), ("z", "-p")]);
    let dy_ydz = lin(&ch, &[("y", "1"), ("z", "y")]);
    let dq_qdz = lin(&ch, &[("q", "1"), ("z", "q")]);
    let dx_xdz = lin(&ch, &[("x", "1"), ("z", "-x")]);
    let dq = d(&ch, "q");
    let dz = d(&ch, "z");

    let d1 = dy_ydz
        .sub(&dp_pdz.scale(&y.pow(2)?))?
        .sub(&dq_qdz.sub(&dx_xdz.scale(&q.pow(2)?))?.scale(&beta.try_div(&q)?))?;
    let d2 = dp_pdz.neg().add(&dx_xdz.scale(&(&gamma * &q)))?;
    let d3 = dp_pdz
        .scale(&(&int(2) * &y))
        .add(&dq.scale(&q.inv()?))?
        .sub(&dx_xdz.scale(&(&int(2) * &q)))?;

    let yt = &y - &beta;
    let shift = &beta - &gamma.inv()?;
    // dỹ + ỹ dz with dỹ = dy
    let dyt = d(&ch, "y").add(&dz.scale(&yt))?;
    let c1 = t[0]
        .add(&t[2].scale(&beta))?
        .add(&t[1].scale(&beta.try_div(&gamma)?))?;
    let c1d = dyt.sub(&dp_pdz.scale(
        &(&yt.try_div(&gamma)? + &(&(&yt + &shift) * &(&yt - &beta))),
    ))?;
    let c3 = t[2]
        .add(&t[1].scale(&(&int(2) * &y)))?
        .scale(&(&(&int(2) * &q) * &(&(&gamma * &y) - &Scalar::one())).inv()?);
    let c3d = dx_xdz.add(&dq.scale(
        &(&(&(&int(2) * &(&yt + &shift)) * &gamma) * &q.pow(2)?).inv()?,
    ))?;
    Ok(vec![
        ("theta1", t[0].clone(), d1),
        ("theta2", t[1].clone(), d2.clone()),
        ("theta3", t[2].clone(), d3),
        ("theta1 + beta*theta3 + (beta/gamma)*theta2", c1, c1d),
        ("(theta3 + 2*y*theta2)/(2*q*(gamma*y - 1))", c3, c3d),
    ])
}

/// Sign choices in `λ = (−9βγ ± 3 ± √D)/(6(βγ − 1))`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Branch {
    pub plus_three: bool,
    pub plus_root: bool,
}

impl Branch {
    pub const ALL: [Branch; 4] = [
        Branch { plus_three: true, plus_root: true },
        Branch { plus_three: true, plus_root: false },
        Branch { plus_three: false, plus_root: true },
        Branch { plus_three: false, plus_root: false },
    ];
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |b: bool| if b { '+' } else { '-' };
        write!(f, "({}3,{}sqrt)", s(self.plus_three), s(self.plus_root))
    }
}

/// Constants of the adapted two-copy coframe.
#[derive(Clone, Debug)]
pub struct PairConstants {
    pub k: Scalar,
    pub discriminant: Scalar,
    pub lambda: Scalar,
    pub t: Scalar,
    pub mu: Scalar,
}

/// `D = 3(3β²γ² − 26βγ + 3)`.
pub fn pair_discriminant(b: &Bindings) -> Result<Scalar> {
    sp(&ex("3*(3*beta^2*gamma^2 - 26*beta*gamma + 3)"), b)
}

/// `K = βγ/(2(βγ − 1))`, `λ`, `T = λ/K^{1/3}` and `μ = βγ/(βγ − 1)`.
/// A negative numeric discriminant is a `DomainViolation`.
pub fn pair_constants(b: &Bindings, branch: Branch) -> Result<PairConstants> {
    guard_pair(b)?;
    let bg = sp(&ex("beta*gamma"), b)?;
    let bgm1 = &bg - &Scalar::one();
    let k = bg.try_div(&(&int(2) * &bgm1))?;
    let disc = pair_discriminant(b)?;
    if let Some(v) = disc.as_rational() {
        if v < num_rational::BigRational::from_integer(0.into()) {
            return Err(Error::DomainViolation(format!("discriminant {disc} is negative")));
        }
    }
    let root = disc.sqrt()?;
    let three = if branch.plus_three { int(3) } else { int(-3) };
    let root = if branch.plus_root { root } else { -root };
    let lambda = (&(&(&int(-9) * &bg) + &three) + &root).try_div(&(&int(6) * &bgm1))?;
    let t = lambda.try_div(&k.cbrt()?)?;
    let mu = bg.try_div(&bgm1)?;
    Ok(PairConstants {
        k,
        discriminant: disc,
        lambda,
        t,
        mu,
    })
}

/// `θ1, θ2, θ̄3 = K^{1/3}(s3 + s̄4 + s̄5), θ4 = K^{-1/3}β s̄4, θ5 = −K^{-1/3}γ s̄5 + Tθ2`.
pub fn pair_adapted_with(c: &PairConstants, b: &Bindings) -> Result<AdaptedCoframe> {
    let sys = pair_system(b)?;
    let s = pair_s_forms()?;
    let (beta, gamma) = (sp(&param("beta"), b)?, sp(&param("gamma"), b)?);
    let k3 = c.k.cbrt()?;
    let km3 = k3.inv()?;
    let t = sys.forms();
    let t3 = t[2].scale(&k3);
    let t4 = s[6].scale(&(&km3 * &beta));
    let t5 = s[7]
        .scale(&-(&km3 * &gamma))
        .add(&t[1].scale(&c.t))?;
    AdaptedCoframe::new("pair-adapted", vec![t[0].clone(), t[1].clone(), t3, t4, t5])
}

pub fn pair_adapted(b: &Bindings, branch: Branch) -> Result<AdaptedCoframe> {
    pair_adapted_with(&pair_constants(b, branch)?, b)
}

/// `K^{1/3} g` for the adapted two-copy coframe and its displayed expansion
/// `−2γ(1+λ)s1s̄5 − 2β(1+λ)s2s̄4 + 2βγ(2+λ)s4s5 + 2λs1s2 + (4/3)K(s3+s̄4+s̄5)²`.
pub fn pair_metric_display(b: &Bindings, branch: Branch) -> Result<(Metric, Metric)> {
    let c = pair_constants(b, branch)?;
    let cf = pair_adapted_with(&c, b)?;
    let lhs = nurowski_metric(&cf)?.scale(&c.k.cbrt()?);
    let s = pair_s_forms()?;
    let (beta, gamma) = (sp(&param("beta"), b)?, sp(&param("gamma"), b)?);
    let l = &c.lambda;
    let one_l = &Scalar::one() + l;
    let two_l = &int(2) + l;
    let theta3 = s[2].add(&s[6])?.add(&s[7])?;
    let rhs = sym(&s[0], &s[7])?
        .scale(&(&(&int(-2) * &gamma) * &one_l))
        .add(&sym(&s[1], &s[6])?.scale(&(&(&int(-2) * &beta) * &one_l)))
        .add(&sym(&s[3], &s[4])?.scale(&(&(&(&int(2) * &beta) * &gamma) * &two_l)))
        .add(&sym(&s[0], &s[1])?.scale(&(&int(2) * l)))
        .add(&sq(&theta3)?.scale(&(&rat(4, 3) * &c.k)));
    Ok((lhs, rhs))
}

fn guard_c(b: &Bindings) -> Result<()> {
    nonzero(&sp(&param("c"), b)?, "c")
}

/// Two-copy chart to its hat chart:
/// `xh = −c exp(−z)x, yh = exp(z)(y − β)/c, zh = (β − 1/γ)exp(z)/c, ph = c exp(−z)p, qh = −1/(γq)`.
pub fn pair_hat_map(b: &Bindings) -> Result<CoordMap> {
    guard_pair(b)?;
    guard_c(b)?;
    let exprs = [
        "-c*exp(-z)*x",
        "exp(z)*(y - beta)/c",
        "(beta - 1/gamma)*exp(z)/c",
        "c*exp(-z)*p",
        "-1/(gamma*q)",
    ]
    .iter()
    .map(|t| sp(&ex(t), b))
    .collect::<Result<Vec<_>>>()?;
    CoordMap::new("pair-hat", &pair_chart(), &pair_hat_chart(), exprs)
}

/// `dxh − qh dph`, `dyh − (yh² − μ zh²) dph`, `dxh − dqh/(2(yh + zh))`.
pub fn pair_hat_system(b: &Bindings) -> Result<PfaffianSystem> {
    guard_pair(b)?;
    let ch = pair_hat_chart();
    let forms = [
        lin(&ch, &[("xh", "1"), ("ph", "-qh")]),
        lin(
            &ch,
            &[("yh", "1"), ("ph", "-(yh^2 - beta*gamma/(beta*gamma - 1)*zh^2)")],
        ),
        lin(&ch, &[("xh", "1"), ("qh", "-1/(2*(yh + zh))")]),
    ]
    .iter()
    .map(|f| spf(f, b))
    .collect::<Result<Vec<_>>>()?;
    PfaffianSystem::new("pair-hat", forms)
}

/// `(x, y, z, p, q) = (qh, xh − ph qh, −yh, −ph, −1/(2(yh + zh)qh))`.
pub fn pair_jet_map() -> Result<CoordMap> {
    let exprs = ["qh", "xh - ph*qh", "-yh", "-ph", "-1/(2*(yh + zh)*qh)"]
        .iter()
        .map(|t| ex(t))
        .collect();
    CoordMap::new("pair-jet", &pair_hat_chart(), &jet_chart(), exprs)
}

/// `(xh, yh, zh, ph, qh) = (y − px, −z, z − 1/(2qx), −p, x)`.
pub fn pair_jet_inverse() -> Result<CoordMap> {
    let exprs = ["y - p*x", "-z", "z - 1/(2*q*x)", "-p", "x"]
        .iter()
        .map(|t| ex(t))
        .collect();
    CoordMap::new("pair-jet-inverse", &jet_chart(), &pair_hat_chart(), exprs)
}

/// `q(z² − μ(z − 1/(2qx))²)`.
pub fn pair_f(b: &Bindings) -> Result<Scalar> {
    guard_pair(b)?;
    sp(&ex("q*(z^2 - beta*gamma/(beta*gamma - 1)*(z - 1/(2*q*x))^2)"), b)
}

/// `q z² + (βγ/(1 − βγ))(√q z − 1/(2√q x))²`.
pub fn pair_f_theorem(b: &Bindings) -> Result<Scalar> {
    guard_pair(b)?;
    monge_f_with(&sp(&ex("beta*gamma/(1 - beta*gamma)"), b)?)
}

// ---------------------------------------------------------------------------
// coframe adapted to the Monge normal form

/// `ω1 = dy − p dx, ω2 = dp − q dx, ω3 = dz − F dx, ω4, ω5 = −dx`.
pub fn monge_coframe(b: &Bindings) -> Result<Vec<Form>> {
    let ch = jet_chart();
    let f = monge_f(b)?;
    let sys = monge_system(&f)?;
    let mut w = sys.forms().to_vec();
    let w4 = lin(
        &ch,
        &[
            ("q", "1/(2*q^3*x^2*(alpha^2 - 1))"),
            (
                "x",
                "-(4*alpha^2*q^2*x^2*z^2 - 4*alpha^2*q*x*z + (3 - 2*alpha^2))/(4*(alpha^2 - 1)^2*x^3*q^2)",
            ),
        ],
    );
    w.push(spf(&w4, b)?);
    w.push(d(&ch, "x").neg());
    Ok(w)
}

/// Constants of the coframe adapted to the Monge normal form; they depend on
/// `x, z, q` as well as `α`.
#[derive(Clone, Debug)]
pub struct MongeConstants {
    pub k: Scalar,
    pub a41: Scalar,
    pub a42: Scalar,
    pub a43: Scalar,
    pub a51: Scalar,
    pub a52: Scalar,
    pub a53: Scalar,
}

pub fn monge_constants(b: &Bindings) -> Result<MongeConstants> {
    guard_alpha(b)?;
    let e = |t: &str| sp(&ex(t), b);
    Ok(MongeConstants {
        k: e("1/(2*q^3*x^2*(alpha^2 - 1))")?,
        a41: Scalar::zero(),
        a42: e("2^(1/3)*alpha^2*(alpha^2 - 9)*(4*q*x*z*(q*x*z - 1) + 1)/(60*x^(10/3)*(alpha^2 - 1)^(8/3)*q^2)")?,
        a43: e("-2^(2/3)*(12*alpha^2*q^2*x^2*z^2 - 8*alpha^2*q*x*z - 2*alpha^2 + 3)/(12*x^(5/3)*(alpha^2 - 1)^(4/3)*q)")?,
        a51: Scalar::zero(),
        a52: e("2^(1/3)*(2*alpha^2 - 3)/(5*(alpha^2 - 1)^(2/3)*x^(1/3))")?,
        a53: e("-2^(2/3)*q*x^(4/3)*(alpha^2 - 1)^(2/3)")?,
    })
}

/// `θ1 = ω3 − (4α²q²x²z² − 1)/(4q²x²(α² − 1)) ω2, θ2 = ω1, θ3 = K^{1/3}ω2,
/// θ4 = K^{-1/3}ω4 + a41θ1 + a42θ2 + a43θ3, θ5 = K^{-1/3}ω5 + a51θ1 + a52θ2 + a53θ3`.
pub fn monge_adapted_with(c: &MongeConstants, b: &Bindings) -> Result<AdaptedCoframe> {
    let w = monge_coframe(b)?;
    let shift = sp(&ex("(4*alpha^2*q^2*x^2*z^2 - 1)/(4*q^2*x^2*(alpha^2 - 1))"), b)?;
    let k3 = c.k.cbrt()?;
    let km3 = k3.inv()?;
    let t1 = w[2].sub(&w[1].scale(&shift))?;
    let t2 = w[0].clone();
    let t3 = w[1].scale(&k3);
    let t4 = sum(&[
        (km3.clone(), &w[3]),
        (c.a41.clone(), &t1),
        (c.a42.clone(), &t2),
        (c.a43.clone(), &t3),
    ])?;
    let t5 = sum(&[
        (km3, &w[4]),
        (c.a51.clone(), &t1),
        (c.a52.clone(), &t2),
        (c.a53.clone(), &t3),
    ])?;
    AdaptedCoframe::new("monge-adapted", vec![t1, t2, t3, t4, t5])
}

pub fn monge_adapted(b: &Bindings) -> Result<AdaptedCoframe> {
    monge_adapted_with(&monge_constants(b)?, b)
}

/// Generators `∂x + p∂y + F∂z + q∂p` and `∂q` of the Monge distribution.
pub fn monge_kernel_fields(b: &Bindings) -> Result<Vec<VectorField>> {
    let ch = jet_chart();
    let f = monge_f(b)?;
    Ok(vec![
        VectorField::new(
            &ch,
            vec![Scalar::one(), ch.coord("p")?, f, ch.coord("q")?, Scalar::zero()],
        )?,
        VectorField::basis(&ch, 4),
    ])
}

// ---------------------------------------------------------------------------
// catalogue

/// Kind of a catalogue entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Coframe,
    System,
    Map,
    Adapted,
    Function,
    Metric,
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Coframe => "coframe",
            Kind::System => "system",
            Kind::Map => "map",
            Kind::Adapted => "adapted-coframe",
            Kind::Function => "function",
            Kind::Metric => "metric",
        })
    }
}

/// Catalogue entry.
#[derive(Clone, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub kind: Kind,
    pub chart: &'static str,
    pub summary: &'static str,
}

const ENTRIES: [(&str, Kind, &str, &str); 22] = [
    ("sigma", Kind::Coframe, "rolling", "left-invariant sl(2) coframe sigma1..sigma3"),
    ("rolling", Kind::System, "rolling", "rolling system omega1..omega3"),
    ("rolling-coframe", Kind::Coframe, "rolling", "omega1..omega5"),
    ("rolling-adapted", Kind::Adapted, "rolling", "adapted rolling coframe with K, Q, S"),
    ("rolling-metric", Kind::Metric, "rolling", "K^(1/3) g for the adapted rolling coframe"),
    ("prolonged-s", Kind::Coframe, "prolonged", "prolonged sl(2) coframe s1..s3"),
    ("prolonged-rolling", Kind::System, "prolonged", "rolling system over s1..s3"),
    ("hat-map", Kind::Map, "prolonged -> hat", "exponential change of coordinates"),
    ("hat-system", Kind::System, "hat", "rolling system in hat coordinates"),
    ("jet-map", Kind::Map, "hat -> jet", "map onto the mixed jet space"),
    ("jet-inverse", Kind::Map, "jet -> hat", "inverse of jet-map"),
    ("monge-f", Kind::Function, "jet", "F of the Monge normal form"),
    ("monge", Kind::System, "jet", "Monge system dy - p dx, dp - q dx, dz - F dx"),
    ("pair-s", Kind::Coframe, "pair", "two-copy coframe s1, s2, sbar3, sbar4, sbar5"),
    ("pair", Kind::System, "pair", "two-copy system theta1..theta3"),
    ("pair-adapted", Kind::Adapted, "pair", "adapted two-copy coframe, branch (+3,+sqrt)"),
    ("pair-hat-map", Kind::Map, "pair -> hat-pair", "exponential change of coordinates"),
    ("pair-hat-system", Kind::System, "hat-pair", "two-copy system in hat coordinates"),
    ("pair-jet-map", Kind::Map, "hat-pair -> jet", "map onto the mixed jet space"),
    ("pair-jet-inverse", Kind::Map, "jet -> hat-pair", "inverse of pair-jet-map"),
    ("pair-f", Kind::Function, "jet", "F of the two-copy reduction"),
    ("monge-adapted", Kind::Adapted, "jet", "coframe adapted to the Monge normal form"),
];

pub fn catalogue() -> Vec<Entry> {
    ENTRIES
        .iter()
        .map(|(name, kind, chart, summary)| Entry {
            name,
            kind: *kind,
            chart,
            summary,
        })
        .collect()
}

fn lines<T: fmt::Display>(labels: &[String], items: &[T]) -> String {
    labels
        .iter()
        .zip(items)
        .map(|(l, x)| format!("{l} = {x}\n"))
        .collect()
}

fn numbered(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// Text serialization of a catalogue entry; the output reparses with [`parse`]
/// coefficient by coefficient.
pub fn dump(name: &str, b: &Bindings) -> Result<String> {
    Ok(match name {
        "sigma" => sigma_coframe()?.to_string(),
        "rolling" => {
            let s = rolling_system(b)?;
            lines(&numbered("omega", 3), s.forms())
        }
        "rolling-coframe" => lines(&numbered("omega", 5), &rolling_coframe(b)?),
        "rolling-adapted" => rolling_adapted(b)?.to_string(),
        "rolling-metric" => {
            let c = rolling_constants(b)?;
            let g = nurowski_metric(&rolling_adapted_with(&c, b)?)?.scale(&c.k.cbrt()?);
            format!("{g}\n")
        }
        "prolonged-s" => prolonged_coframe()?.to_string(),
        "prolonged-rolling" => lines(&numbered("theta", 3), prolonged_system(b)?.forms()),
        "hat-map" => format!("{}\n", hat_map(b)?),
        "hat-system" => lines(&numbered("eta", 3), hat_system(b)?.forms()),
        "jet-map" => format!("{}\n", jet_map(b)?),
        "jet-inverse" => format!("{}\n", jet_inverse(b)?),
        "monge-f" => format!("F = {}\n", monge_f(b)?),
        "monge" => lines(&numbered("omega", 3), monge_system(&monge_f(b)?)?.forms()),
        "pair-s" => pair_coframe()?.to_string(),
        "pair" => lines(&numbered("theta", 3), pair_system(b)?.forms()),
        "pair-adapted" => pair_adapted(b, Branch::ALL[0])?.to_string(),
        "pair-hat-map" => format!("{}\n", pair_hat_map(b)?),
        "pair-hat-system" => lines(&numbered("eta", 3), pair_hat_system(b)?.forms()),
        "pair-jet-map" => format!("{}\n", pair_jet_map()?),
        "pair-jet-inverse" => format!("{}\n", pair_jet_inverse()?),
        "pair-f" => format!("F = {}\n", pair_f(b)?),
        "monge-adapted" => monge_adapted(b)?.to_string(),
        other => return Err(Error::UnknownSymbol(format!("catalogue entry {other}"))),
    })
}
