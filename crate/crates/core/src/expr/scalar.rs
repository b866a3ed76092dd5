use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive, Zero};
use smallvec::SmallVec;

use super::monomial::{Axis, ExpCoef, ExpForm, Monomial};
use super::poly::{Poly, Q};
use super::symbol::{Symbol, SymbolKind};
use crate::error::{Error, Result};

/// Simultaneous substitution `symbol -> expression`.
pub type Bindings = BTreeMap<Symbol, Scalar>;

/// Numeric assignment of coordinates and parameters.
pub type Point = BTreeMap<Symbol, f64>;

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
struct Repr {
    num: Poly,
    /// Monic, radical-free, pairwise distinct factors with multiplicities.
    den: Vec<(Poly, u32)>,
}

/// Exact scalar: a polynomial in coordinates, parameters, exponentials and radicals,
/// over a product of normalized denominator factors.
///
/// Zero testing is exact: a scalar is zero iff its reduced numerator is the zero
/// polynomial. Values are immutable and cheap to clone.
#[derive(Clone)]
pub struct Scalar(Arc<Repr>);

impl Scalar {
    fn raw(num: Poly, den: Vec<(Poly, u32)>) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        Scalar(Arc::new(Repr { num, den }))
    }

    pub(crate) fn from_poly(p: Poly) -> Scalar {
        Scalar::raw(p, Vec::new())
    }

    pub fn zero() -> Scalar {
        Scalar(Arc::new(Repr {
            num: Poly::zero(),
            den: Vec::new(),
        }))
    }

    pub fn one() -> Scalar {
        Scalar::from_poly(Poly::one())
    }

    pub fn integer(n: i64) -> Scalar {
        Scalar::from_poly(Poly::constant(Q::from_integer(n.into())))
    }

    /// The rational constant `n/d`. Panics if `d == 0`.
    pub fn rational(n: i64, d: i64) -> Scalar {
        Scalar::from_poly(Poly::constant(Q::new(n.into(), d.into())))
    }

    pub fn from_big_rational(q: Q) -> Scalar {
        Scalar::from_poly(Poly::constant(q))
    }

    pub fn symbol(s: &Symbol) -> Scalar {
        Scalar::from_poly(Poly::var(s))
    }

    pub fn coordinate(name: &str) -> Result<Scalar> {
        Ok(Scalar::symbol(&Symbol::coordinate(name)?))
    }

    pub fn parameter(name: &str) -> Result<Scalar> {
        Ok(Scalar::symbol(&Symbol::parameter(name)?))
    }

    pub fn is_zero(&self) -> bool {
        self.0.num.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.0.den.is_empty() && self.0.num.is_one()
    }

    pub fn is_polynomial(&self) -> bool {
        self.0.den.is_empty()
    }

    pub fn as_rational(&self) -> Option<Q> {
        if self.0.den.is_empty() {
            self.0.num.constant_value()
        } else {
            None
        }
    }

    /// Rough size measure, used to prefer simple pivots.
    pub fn complexity(&self) -> usize {
        self.0.num.terms.len()
            + self
                .0
                .den
                .iter()
                .map(|(a, e)| a.terms.len() * *e as usize)
                .sum::<usize>()
    }

    pub fn is_single_term(&self) -> bool {
        self.0.num.terms.len() == 1
    }

    /// Sign of the leading numerator coefficient.
    pub fn leading_negative(&self) -> bool {
        self.0.num.leading().is_some_and(|(_, c)| c.is_negative())
    }

    fn den_poly(&self) -> Poly {
        self.0
            .den
            .iter()
            .fold(Poly::one(), |acc, (a, e)| acc.mul(&a.pow(*e)))
    }

    /// Divides out every denominator factor that divides the numerator.
    fn cancel(num: Poly, den: Vec<(Poly, u32)>) -> Scalar {
        if num.is_zero() {
            return Scalar::zero();
        }
        let mut num = num;
        let mut out = Vec::with_capacity(den.len());
        for (a, e) in den {
            let mut e = e;
            while e > 0 {
                match num.div_exact(&a) {
                    Some(q) => {
                        num = q;
                        e -= 1;
                    }
                    None => break,
                }
            }
            if e > 0 {
                out.push((a, e));
            }
        }
        Scalar::raw(num, out)
    }

    fn merge_den(
        a: &[(Poly, u32)],
        b: &[(Poly, u32)],
        f: impl Fn(u32, u32) -> u32,
    ) -> Vec<(Poly, u32)> {
        let mut map: BTreeMap<&Poly, (u32, u32)> = BTreeMap::new();
        for (p, e) in a {
            map.entry(p).or_default().0 = *e;
        }
        for (p, e) in b {
            map.entry(p).or_default().1 = *e;
        }
        map.into_iter()
            .filter_map(|(p, (x, y))| {
                let e = f(x, y);
                (e > 0).then(|| (p.clone(), e))
            })
            .collect()
    }

    fn add_impl(&self, other: &Scalar) -> Scalar {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.0.den == other.0.den {
            let num = self.0.num.add(&other.0.num);
            if self.0.den.is_empty() {
                return Scalar::raw(num, Vec::new());
            }
            return Scalar::cancel(num, self.0.den.clone());
        }
        let lcm = Scalar::merge_den(&self.0.den, &other.0.den, |x, y| x.max(y));
        let cofactor = |den: &[(Poly, u32)]| {
            lcm.iter().fold(Poly::one(), |acc, (p, e)| {
                let have = den.iter().find(|(q, _)| q == p).map_or(0, |(_, f)| *f);
                if *e > have {
                    acc.mul(&p.pow(e - have))
                } else {
                    acc
                }
            })
        };
        let num = self
            .0
            .num
            .mul(&cofactor(&self.0.den))
            .add(&other.0.num.mul(&cofactor(&other.0.den)));
        Scalar::cancel(num, lcm)
    }

    fn mul_impl(&self, other: &Scalar) -> Scalar {
        if self.is_zero() || other.is_zero() {
            return Scalar::zero();
        }
        if let Some(c) = other.as_rational() {
            return self.scale(&c);
        }
        if let Some(c) = self.as_rational() {
            return other.scale(&c);
        }
        if self.0.den.is_empty() && other.0.den.is_empty() {
            return Scalar::raw(self.0.num.mul(&other.0.num), Vec::new());
        }
        fn cross(num: &Poly, den: &[(Poly, u32)]) -> (Poly, Vec<(Poly, u32)>) {
            let mut num = num.clone();
            let mut left = Vec::with_capacity(den.len());
            for (a, e) in den {
                let mut e = *e;
                while e > 0 {
                    match num.div_exact(a) {
                        Some(q) => {
                            num = q;
                            e -= 1;
                        }
                        None => break,
                    }
                }
                if e > 0 {
                    left.push((a.clone(), e));
                }
            }
            (num, left)
        }
        let (bn, aden) = cross(&other.0.num, &self.0.den);
        let (an, bden) = cross(&self.0.num, &other.0.den);
        let den = Scalar::merge_den(&aden, &bden, |x, y| x + y);
        Scalar::raw(an.mul(&bn), den)
    }

    pub(crate) fn scale(&self, c: &Q) -> Scalar {
        if c.is_zero() {
            return Scalar::zero();
        }
        Scalar::raw(self.0.num.scale(c), self.0.den.clone())
    }

    /// Multiplicative inverse.
    pub fn inv(&self) -> Result<Scalar> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let (cof, norm) = rationalize(&self.0.num);
        if norm.is_zero() {
            return Err(Error::Internal(
                "radical norm vanished; a radical base is a perfect power".into(),
            ));
        }
        let hints: Vec<&Poly> = self.0.den.iter().map(|(p, _)| p).collect();
        let (c, shift, atoms) = factor(&norm, &hints);
        let num = self
            .den_poly()
            .mul(&cof)
            .mul_term(&Monomial::exponential(shift.neg()), &c.recip());
        Ok(Scalar::cancel(num, atoms))
    }

    pub fn try_div(&self, other: &Scalar) -> Result<Scalar> {
        if let Some(c) = other.as_rational() {
            if c.is_zero() {
                return Err(Error::DivisionByZero);
            }
            return Ok(self.scale(&c.recip()));
        }
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i32) -> Result<Scalar> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut out = Scalar::one();
        let mut b = base;
        while e > 0 {
            if e & 1 == 1 {
                out = &out * &b;
            }
            e >>= 1;
            if e > 0 {
                b = &b * &b;
            }
        }
        Ok(out)
    }

    /// `exp(self)`; the argument must be a rational combination of
    /// `parameter-monomial * coordinate` terms.
    pub fn exp(&self) -> Result<Scalar> {
        let form = self.to_exp_form()?;
        Ok(Scalar::from_poly(Poly::term(
            Monomial::exponential(form),
            Q::one(),
        )))
    }

    pub fn sinh(&self) -> Result<Scalar> {
        let e = self.exp()?;
        let m = (-self).exp()?;
        Ok((&e - &m).scale(&Q::new(1.into(), 2.into())))
    }

    pub fn cosh(&self) -> Result<Scalar> {
        let e = self.exp()?;
        let m = (-self).exp()?;
        Ok((&e + &m).scale(&Q::new(1.into(), 2.into())))
    }

    pub fn sqrt(&self) -> Result<Scalar> {
        self.root(2)
    }

    pub fn cbrt(&self) -> Result<Scalar> {
        self.root(3)
    }

    /// Real `k`-th root. Radicals of radicals are rejected.
    pub fn root(&self, k: u32) -> Result<Scalar> {
        if k == 0 {
            return Err(Error::DomainViolation("zeroth root".into()));
        }
        if k == 1 || self.is_zero() {
            return Ok(self.clone());
        }
        if self.0.num.has_radicals() {
            return Err(Error::SubstitutionOutsideClass(format!(
                "nested radical in root of {self}"
            )));
        }
        let mut out = root_poly(&self.0.num, k)?;
        for (a, e) in &self.0.den {
            let r = root_atom_pow(a, *e, k, false);
            out = out.try_div(&r)?;
        }
        Ok(out)
    }

    /// Rational power `self^(n/d)`.
    pub fn pow_ratio(&self, n: i32, d: u32) -> Result<Scalar> {
        self.root(d)?.pow(n)
    }

    fn to_exp_form(&self) -> Result<ExpForm> {
        let outside = || Error::SubstitutionOutsideClass(format!("exp({self})"));
        if !self.0.den.is_empty() {
            return Err(outside());
        }
        let mut acc = ExpForm::default();
        for (m, c) in &self.0.num.terms {
            if !m.exp.is_zero() {
                return Err(outside());
            }
            let mut coord = None;
            let mut params: SmallVec<[(Symbol, u32); 2]> = SmallVec::new();
            for (s, e) in &m.vars {
                match s.kind() {
                    SymbolKind::Coordinate if *e == 1 && coord.is_none() => {
                        coord = Some(s.clone())
                    }
                    SymbolKind::Parameter => params.push((s.clone(), *e)),
                    _ => return Err(outside()),
                }
            }
            let coord = coord.ok_or_else(outside)?;
            let (n, d) = (c.numer().to_i64(), c.denom().to_i64());
            let (Some(n), Some(d)) = (n, d) else {
                return Err(outside());
            };
            let mut one = SmallVec::new();
            one.push((Axis { coord, params }, Ratio::new(n, d)));
            acc = acc.add(&ExpForm(one));
        }
        Ok(acc)
    }

    /// Symbols appearing anywhere, including inside radical bases and exponents.
    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut set = self.0.num.symbols();
        for (a, _) in &self.0.den {
            set.extend(a.symbols());
        }
        let radicals: Vec<Symbol> = set
            .iter()
            .filter(|s| s.radical_def().is_some())
            .cloned()
            .collect();
        for r in radicals {
            if let Some(def) = r.radical_def() {
                set.extend(def.base.symbols());
            }
        }
        set
    }

    /// Coordinates and parameters the value depends on.
    pub fn free_symbols(&self) -> BTreeSet<Symbol> {
        self.symbols()
            .into_iter()
            .filter(|s| s.kind() != SymbolKind::Generator)
            .collect()
    }

    pub fn depends_on(&self, s: &Symbol) -> bool {
        self.free_symbols().contains(s)
    }

    /// Partial derivative with respect to a coordinate.
    pub fn diff(&self, v: &Symbol) -> Result<Scalar> {
        if !v.is_coordinate() {
            return Err(Error::UnknownSymbol(format!(
                "{v} is not a coordinate"
            )));
        }
        if self.is_zero() {
            return Ok(Scalar::zero());
        }
        let dn = diff_poly(&self.0.num, v)?;
        if self.0.den.is_empty() {
            return Ok(dn);
        }
        let inv_den = Scalar::raw(Poly::one(), self.0.den.clone());
        let mut out = &dn * &inv_den;
        for (a, e) in &self.0.den {
            let da = diff_poly(a, v)?;
            if da.is_zero() {
                continue;
            }
            let atom = Scalar::raw(Poly::one(), vec![(a.clone(), 1)]);
            let term = &(self * &da) * &atom;
            out = &out - &term.scale(&Q::from_integer((*e).into()));
        }
        Ok(out)
    }

    /// Simultaneous substitution; unbound symbols are left alone.
    pub fn subst(&self, bindings: &Bindings) -> Result<Scalar> {
        if bindings.is_empty() || !self.symbols().iter().any(|s| bindings.contains_key(s)) {
            return Ok(self.clone());
        }
        let mut cache = SubstCache::new(bindings);
        let mut out = cache.poly(&self.0.num)?;
        for (a, e) in &self.0.den {
            let img = cache.poly(a)?;
            if img.is_zero() {
                return Err(Error::DivisionByZero);
            }
            out = out.try_div(&img.pow(*e as i32)?)?;
        }
        Ok(out)
    }

    /// Floating point value at `point`, which must bind every free symbol.
    pub fn eval(&self, point: &Point) -> Result<f64> {
        let mut radicals = BTreeMap::new();
        let n = eval_poly(&self.0.num, point, &mut radicals)?;
        let mut d = 1.0;
        for (a, e) in &self.0.den {
            d *= eval_poly(a, point, &mut radicals)?.powi(*e as i32);
        }
        if d == 0.0 || !d.is_finite() {
            return Err(Error::DomainViolation(format!(
                "denominator of {self} vanishes"
            )));
        }
        Ok(n / d)
    }

    /// Evaluation at an exact rational point.
    pub fn eval_rational(&self, point: &BTreeMap<Symbol, Q>) -> Result<f64> {
        let p: Point = point
            .iter()
            .map(|(s, q)| (s.clone(), q.to_f64().unwrap_or(f64::NAN)))
            .collect();
        self.eval(&p)
    }
}

fn exp_coef_to_q(c: &ExpCoef) -> Q {
    Q::new((*c.numer()).into(), (*c.denom()).into())
}

fn diff_poly(p: &Poly, v: &Symbol) -> Result<Scalar> {
    let mut plain = Poly::zero();
    let mut by_radical: BTreeMap<Symbol, Poly> = BTreeMap::new();
    for (m, c) in &p.terms {
        let e = m.exponent(v);
        if e > 0 {
            plain = plain.add(&Poly::term(
                m.with_exponent(v, e - 1),
                c * Q::from_integer(e.into()),
            ));
        }
        let mut dl = Poly::zero();
        for (axis, k) in &m.exp.0 {
            if &axis.coord == v {
                let mut pm = Monomial::one();
                for (s, pe) in &axis.params {
                    pm = pm.mul(&Monomial::var(s, *pe));
                }
                dl = dl.add(&Poly::term(pm, exp_coef_to_q(k)));
            }
        }
        if !dl.is_zero() {
            plain = plain.add(&dl.mul_term(m, c));
        }
        for (r, er) in &m.vars {
            if let Some(def) = r.radical_def() {
                if def.base.mentions(v) {
                    let coef = c * Q::new((*er).into(), def.index.into());
                    let entry = by_radical.entry(r.clone()).or_insert_with(Poly::zero);
                    *entry = entry.add(&Poly::term(m.clone(), coef));
                }
            }
        }
    }
    let mut out = Scalar::from_poly(plain);
    for (r, part) in by_radical {
        let def = r.radical_def().expect("radical symbol");
        let db = diff_poly(&def.base, v)?;
        let base = Scalar::from_poly(def.base.clone());
        out = &out + &(&Scalar::from_poly(part) * &db.try_div(&base)?);
    }
    Ok(out)
}

/// Splits a nonzero radical-free polynomial as `c * exp(shift) * prod(atoms^e)`.
fn factor(p: &Poly, hints: &[&Poly]) -> (Q, ExpForm, Vec<(Poly, u32)>) {
    let content = p.monomial_content();
    let mut atoms: BTreeMap<Poly, u32> = BTreeMap::new();
    for (s, e) in &content.vars {
        *atoms.entry(Poly::var(s)).or_default() += e;
    }
    let rest = if content.vars.is_empty() {
        p.clone()
    } else {
        Poly {
            terms: p
                .terms
                .iter()
                .map(|(m, c)| (m.div(&content).expect("content divides"), c.clone()))
                .collect(),
        }
    };
    let (lm, lc) = rest.leading().cloned().expect("nonzero");
    if rest.terms.len() == 1 {
        return (lc, lm.exp, atoms.into_iter().collect());
    }
    let mut c = lc.clone();
    let mut shift = lm.exp.clone();
    let mut atom = rest.mul_term(&Monomial::exponential(shift.neg()), &lc.recip());
    for h in hints {
        if h.terms.len() < 2 || **h == atom {
            continue;
        }
        while atom.terms.len() > h.terms.len() {
            match atom.div_exact(h) {
                Some(q) => {
                    *atoms.entry((*h).clone()).or_default() += 1;
                    let (qm, qc) = q.leading().cloned().expect("nonzero");
                    c *= &qc;
                    shift = shift.add(&qm.exp);
                    atom = q.mul_term(&Monomial::exponential(qm.exp.neg()), &qc.recip());
                }
                None => break,
            }
        }
    }
    if !atom.is_one() {
        *atoms.entry(atom).or_default() += 1;
    }
    (c, shift, atoms.into_iter().collect())
}

/// Returns `(cofactor, norm)` with `p * cofactor = norm` and `norm` free of radicals.
fn rationalize(p: &Poly) -> (Poly, Poly) {
    let mut cof = Poly::one();
    let mut cur = p.clone();
    loop {
        let Some(r) = cur
            .symbols()
            .into_iter()
            .find(|s| s.radical_def().is_some())
        else {
            return (cof, cur);
        };
        let def = r.radical_def().expect("radical").clone();
        let k = def.index as usize;
        if cur.terms.len() == 1 {
            // monomial in r: multiply up to the next power of the base
            let e = cur.terms[0].0.exponent(&r);
            let fix = Poly::term(Monomial::var(&r, def.index - e), Q::one());
            cof = cof.mul(&fix);
            cur = cur.mul(&fix);
            continue;
        }
        let parts = cur.split_by(&r, def.index);
        let m: Vec<Vec<Poly>> = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        if i >= j {
                            parts[i - j].clone()
                        } else {
                            def.base.mul(&parts[i + k - j])
                        }
                    })
                    .collect()
            })
            .collect();
        let mut det = Poly::zero();
        let mut c = Poly::zero();
        for i in 0..k {
            let minor = minor_det(&m, 0, i);
            let signed = if i % 2 == 0 { minor } else { minor.neg() };
            det = det.add(&m[0][i].mul(&signed));
            c = c.add(&signed.mul_term(&Monomial::var(&r, i as u32), &Q::one()));
        }
        cof = cof.mul(&c);
        cur = det;
    }
}

fn minor_det(m: &[Vec<Poly>], row: usize, col: usize) -> Poly {
    let sub: Vec<Vec<Poly>> = m
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != row)
        .map(|(_, r)| {
            r.iter()
                .enumerate()
                .filter(|(j, _)| *j != col)
                .map(|(_, p)| p.clone())
                .collect()
        })
        .collect();
    det_poly(&sub)
}

fn det_poly(m: &[Vec<Poly>]) -> Poly {
    match m.len() {
        0 => Poly::one(),
        1 => m[0][0].clone(),
        2 => m[0][0].mul(&m[1][1]).sub(&m[0][1].mul(&m[1][0])),
        n => {
            let mut acc = Poly::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let t = m[0][j].mul(&minor_det(m, 0, j));
                acc = if j % 2 == 0 { acc.add(&t) } else { acc.sub(&t) };
            }
            acc
        }
    }
}

fn integer_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let r = n.nth_root(k);
    (r.pow(k) == *n).then_some(r)
}

/// `n^(1/k)` for a positive integer, extracting perfect powers of small primes.
fn root_integer(n: &BigInt, k: u32) -> Scalar {
    let mut n = n.clone();
    let mut out = Scalar::one();
    let mut p = BigInt::from(2u32);
    let limit = BigInt::from(100_000u32);
    while p <= limit && &p * &p <= n {
        let mut e = 0u32;
        while (&n % &p).is_zero() {
            n /= &p;
            e += 1;
        }
        if e > 0 {
            out = &out * &root_atom_pow(&Poly::constant(Q::from_integer(p.clone())), e, k, false);
        }
        p += 1u32;
    }
    if n > BigInt::one() {
        match integer_root(&n, k) {
            Some(r) => out = out.scale(&Q::from_integer(r)),
            None => {
                out = &out * &root_atom_pow(&Poly::constant(Q::from_integer(n)), 1, k, false)
            }
        }
    }
    out
}

/// `(±atom)^(e/k)` as `atom^(e div k) * r^(e mod k)` with `r` the radical generator.
fn root_atom_pow(atom: &Poly, e: u32, k: u32, negate: bool) -> Scalar {
    let q = e / k;
    let j = e % k;
    let mut out = Scalar::from_poly(atom.pow(q));
    if negate && q % 2 == 1 {
        out = -&out;
    }
    if j > 0 {
        let base = if negate { atom.neg() } else { atom.clone() };
        let r = Symbol::radical(base, k);
        out = &out * &Scalar::from_poly(Poly::term(Monomial::var(&r, j), Q::one()));
    }
    out
}

fn root_poly(p: &Poly, k: u32) -> Result<Scalar> {
    let (c, shift, atoms) = factor(p, &[]);
    let mut negate_atom = None;
    if c.is_negative() && k.is_multiple_of(2) {
        negate_atom = atoms
            .iter()
            .position(|(a, e)| a.terms.len() > 1 && e % 2 == 1)
            .or_else(|| atoms.iter().position(|(_, e)| e % 2 == 1));
        if negate_atom.is_none() {
            return Err(Error::DomainViolation(format!("even root of negative {p}")));
        }
    }
    let mag = c.abs();
    let numer = mag.numer() * mag.denom().pow(k - 1);
    let mut out = root_integer(&numer, k).scale(&Q::new(BigInt::one(), mag.denom().clone()));
    if c.is_negative() && k % 2 == 1 {
        out = -&out;
    }
    out = &out
        * &Scalar::from_poly(Poly::term(
            Monomial::exponential(shift.scale(Ratio::new(1, k as i64))),
            Q::one(),
        ));
    for (i, (a, e)) in atoms.iter().enumerate() {
        out = &out * &root_atom_pow(a, *e, k, negate_atom == Some(i));
    }
    Ok(out)
}

struct SubstCache<'a> {
    bindings: &'a Bindings,
    images: BTreeMap<Symbol, Scalar>,
    powers: BTreeMap<(Symbol, u32), Scalar>,
}

impl<'a> SubstCache<'a> {
    fn new(bindings: &'a Bindings) -> Self {
        SubstCache {
            bindings,
            images: BTreeMap::new(),
            powers: BTreeMap::new(),
        }
    }

    fn image(&mut self, s: &Symbol) -> Result<Scalar> {
        if let Some(v) = self.images.get(s) {
            return Ok(v.clone());
        }
        let img = if let Some(b) = self.bindings.get(s) {
            b.clone()
        } else if let Some(def) = s.radical_def() {
            let base = Scalar::from_poly(def.base.clone());
            if base.symbols().iter().any(|t| self.bindings.contains_key(t)) {
                let b = self.poly(&def.base)?;
                b.root(def.index)?
            } else {
                Scalar::symbol(s)
            }
        } else {
            Scalar::symbol(s)
        };
        self.images.insert(s.clone(), img.clone());
        Ok(img)
    }

    fn power(&mut self, s: &Symbol, e: u32) -> Result<Scalar> {
        if e == 1 {
            return self.image(s);
        }
        if let Some(v) = self.powers.get(&(s.clone(), e)) {
            return Ok(v.clone());
        }
        let v = self.image(s)?.pow(e as i32)?;
        self.powers.insert((s.clone(), e), v.clone());
        Ok(v)
    }

    fn exponential(&mut self, form: &ExpForm) -> Result<Scalar> {
        if !self.bindings.keys().any(|s| form.mentions(s)) {
            return Ok(Scalar::from_poly(Poly::term(
                Monomial::exponential(form.clone()),
                Q::one(),
            )));
        }
        let mut arg = Scalar::zero();
        for (axis, c) in &form.0 {
            let mut t = self.image(&axis.coord)?.scale(&exp_coef_to_q(c));
            for (p, e) in &axis.params {
                t = &t * &self.power(p, *e)?;
            }
            arg = &arg + &t;
        }
        arg.exp()
    }

    fn poly(&mut self, p: &Poly) -> Result<Scalar> {
        // group terms by denominator so most additions stay polynomial
        let mut groups: BTreeMap<Vec<(Poly, u32)>, Poly> = BTreeMap::new();
        for (m, c) in &p.terms {
            let mut t = Scalar::from_poly(Poly::constant(c.clone()));
            let mut plain = Monomial::one();
            for (s, e) in &m.vars {
                let touched = self.bindings.contains_key(s)
                    || s.radical_def().is_some_and(|d| {
                        d.base.symbols().iter().any(|x| self.bindings.contains_key(x))
                    });
                if touched {
                    t = &t * &self.power(s, *e)?;
                } else {
                    plain = plain.mul(&Monomial::var(s, *e));
                }
            }
            let ex = self.exponential(&m.exp)?;
            t = &t * &ex;
            if !plain.is_one() {
                t = Scalar::raw(t.0.num.mul_term(&plain, &Q::one()), t.0.den.clone());
            }
            if t.is_zero() {
                continue;
            }
            let entry = groups.entry(t.0.den.clone()).or_insert_with(Poly::zero);
            *entry = entry.add(&t.0.num);
        }
        let mut out = Scalar::zero();
        for (den, num) in groups {
            out = &out + &Scalar::cancel(num, den);
        }
        Ok(out)
    }
}

fn eval_poly(p: &Poly, point: &Point, radicals: &mut BTreeMap<Symbol, f64>) -> Result<f64> {
    let mut total = 0.0;
    for (m, c) in &p.terms {
        let mut t = c.to_f64().unwrap_or(f64::NAN);
        for (s, e) in &m.vars {
            let v = match s.radical_def() {
                Some(def) => match radicals.get(s) {
                    Some(v) => *v,
                    None => {
                        let b = eval_poly(&def.base, point, radicals)?;
                        let v = if def.index % 2 == 0 {
                            if b < 0.0 {
                                return Err(Error::DomainViolation(format!(
                                    "{s} of negative value {b}"
                                )));
                            }
                            b.powf(1.0 / def.index as f64)
                        } else if def.index == 3 {
                            b.cbrt()
                        } else {
                            b.signum() * b.abs().powf(1.0 / def.index as f64)
                        };
                        radicals.insert(s.clone(), v);
                        v
                    }
                },
                None => *point
                    .get(s)
                    .ok_or_else(|| Error::UnknownSymbol(s.name().to_string()))?,
            };
            t *= v.powi(*e as i32);
        }
        if !m.exp.is_zero() {
            let mut arg = 0.0;
            for (axis, k) in &m.exp.0 {
                let mut a = *k.numer() as f64 / *k.denom() as f64;
                a *= *point
                    .get(&axis.coord)
                    .ok_or_else(|| Error::UnknownSymbol(axis.coord.name().to_string()))?;
                for (s, e) in &axis.params {
                    a *= point
                        .get(s)
                        .ok_or_else(|| Error::UnknownSymbol(s.name().to_string()))?
                        .powi(*e as i32);
                }
                arg += a;
            }
            t *= arg.exp();
        }
        total += t;
    }
    Ok(total)
}

impl PartialEq for Scalar {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0 == other.0 || (self - other).is_zero()
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let num = &self.0.num;
        if self.0.den.is_empty() {
            return write!(f, "{num}");
        }
        if num.terms.len() > 1 {
            write!(f, "({num})/")?;
        } else {
            write!(f, "{num}/")?;
        }
        let single_var = |a: &Poly| {
            matches!(a.terms.as_slice(), [(m, c)] if c.is_one() && m.vars.len() == 1 && m.vars[0].1 == 1 && m.exp.is_zero())
        };
        let factors: Vec<String> = self
            .0
            .den
            .iter()
            .map(|(a, e)| {
                let base = if single_var(a) {
                    a.to_string()
                } else {
                    format!("({a})")
                };
                if *e == 1 {
                    base
                } else {
                    format!("{base}^{e}")
                }
            })
            .collect();
        if factors.len() == 1 && self.0.den[0].1 == 1 {
            write!(f, "{}", factors[0])
        } else {
            write!(f, "({})", factors.join("*"))
        }
    }
}

impl fmt::Debug for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Default for Scalar {
    fn default() -> Self {
        Scalar::zero()
    }
}

impl From<i64> for Scalar {
    fn from(n: i64) -> Self {
        Scalar::integer(n)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                let f: fn(&Scalar, &Scalar) -> Scalar = $body;
                f(self, rhs)
            }
        }
        impl $tr<Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Scalar> for Scalar {
            type Output = Scalar;
            fn $m(self, rhs: &Scalar) -> Scalar {
                (&self).$m(rhs)
            }
        }
        impl $tr<Scalar> for &Scalar {
            type Output = Scalar;
            fn $m(self, rhs: Scalar) -> Scalar {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| a.add_impl(b));
binop!(Sub, sub, |a, b| a.add_impl(&-b));
binop!(Mul, mul, |a, b| a.mul_impl(b));

impl Neg for &Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        Scalar::raw(self.0.num.neg(), self.0.den.clone())
    }
}

impl Neg for Scalar {
    type Output = Scalar;
    fn neg(self) -> Scalar {
        -&self
    }
}

impl std::iter::Sum for Scalar {
    fn sum<I: Iterator<Item = Scalar>>(iter: I) -> Scalar {
        iter.fold(Scalar::zero(), |a, b| &a + &b)
    }
}
