use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::monomial::{ExpForm, Monomial};
use super::symbol::Symbol;

pub(crate) type Q = BigRational;

/// Sparse polynomial with rational coefficients, terms sorted by decreasing monomial.
///
/// Radical generators appear with exponents below their index; every product
/// is reduced with `r^k = base`.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub(crate) struct Poly {
    pub terms: Vec<(Monomial, Q)>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: Vec::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Q::one())
    }

    pub fn constant(c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly {
                terms: vec![(Monomial::one(), c)],
            }
        }
    }

    pub fn term(m: Monomial, c: Q) -> Poly {
        if c.is_zero() {
            Poly::zero()
        } else {
            Poly { terms: vec![(m, c)] }
        }
    }

    pub fn var(s: &Symbol) -> Poly {
        Poly::term(Monomial::var(s, 1), Q::one())
    }

    fn from_map(map: BTreeMap<Monomial, Q>) -> Poly {
        let mut terms: Vec<(Monomial, Q)> =
            map.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.reverse();
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn constant_value(&self) -> Option<Q> {
        match self.terms.as_slice() {
            [] => Some(Q::zero()),
            [(m, c)] if m.is_one() => Some(c.clone()),
            _ => None,
        }
    }

    pub fn is_one(&self) -> bool {
        matches!(self.terms.as_slice(), [(m, c)] if m.is_one() && c.is_one())
    }

    pub fn leading(&self) -> Option<&(Monomial, Q)> {
        self.terms.first()
    }

    pub fn add(&self, other: &Poly) -> Poly {
        if other.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return other.clone();
        }
        let mut terms = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (a, b) = (&self.terms, &other.terms);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Greater,
                _ => Ordering::Less,
            };
            match ord {
                Ordering::Greater => {
                    terms.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    terms.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = &a[i].1 + &b[j].1;
                    if !c.is_zero() {
                        terms.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        Poly { terms }
    }

    pub fn neg(&self) -> Poly {
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * s)).collect(),
        }
    }

    /// Multiplies by a monomial. Order is preserved because the order is multiplicative.
    pub fn mul_term(&self, m: &Monomial, s: &Q) -> Poly {
        if s.is_zero() {
            return Poly::zero();
        }
        let p = Poly {
            terms: self
                .terms
                .iter()
                .map(|(n, c)| (n.mul(m), c * s))
                .collect(),
        };
        if m.vars.iter().any(|(v, _)| v.radical_def().is_some()) {
            p.reduce_radicals()
        } else {
            p
        }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        if other.terms.len() == 1 {
            return self.mul_term(&other.terms[0].0, &other.terms[0].1);
        }
        if self.terms.len() == 1 {
            return other.mul_term(&self.terms[0].0, &self.terms[0].1);
        }
        let mut acc: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let m = m1.mul(m2);
                let c = c1 * c2;
                match acc.get_mut(&m) {
                    Some(v) => *v += c,
                    None => {
                        acc.insert(m, c);
                    }
                }
            }
        }
        let p = Poly::from_map(acc);
        if p.has_radicals() {
            p.reduce_radicals()
        } else {
            p
        }
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn has_radicals(&self) -> bool {
        self.terms
            .iter()
            .any(|(m, _)| m.vars.iter().any(|(v, _)| v.radical_def().is_some()))
    }

    /// Replaces `r^(qk + j)` by `base^q r^j` for every radical generator `r`.
    pub fn reduce_radicals(&self) -> Poly {
        let needs = |m: &Monomial| {
            m.vars
                .iter()
                .any(|(v, e)| v.radical_def().is_some_and(|d| *e >= d.index))
        };
        if !self.terms.iter().any(|(m, _)| needs(m)) {
            return self.clone();
        }
        let mut out = Poly::zero();
        let mut plain: BTreeMap<Monomial, Q> = BTreeMap::new();
        for (m, c) in &self.terms {
            if !needs(m) {
                *plain.entry(m.clone()).or_insert_with(Q::zero) += c;
                continue;
            }
            let mut mono = m.clone();
            let mut factor = Poly::one();
            for (v, e) in &m.vars {
                if let Some(def) = v.radical_def() {
                    if *e >= def.index {
                        let q = e / def.index;
                        mono = mono.with_exponent(v, e % def.index);
                        factor = factor.mul(&def.base.pow(q));
                    }
                }
            }
            out = out.add(&factor.mul_term(&mono, c));
        }
        out.add(&Poly::from_map(plain))
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        let mut set = BTreeSet::new();
        for (m, _) in &self.terms {
            for (v, _) in &m.vars {
                set.insert(v.clone());
            }
            for (a, _) in &m.exp.0 {
                set.insert(a.coord.clone());
                for (p, _) in &a.params {
                    set.insert(p.clone());
                }
            }
        }
        set
    }

    pub fn mentions(&self, s: &Symbol) -> bool {
        self.terms
            .iter()
            .any(|(m, _)| m.exponent(s) > 0 || m.exp.mentions(s))
    }

    /// Minimum of each symbol exponent over all terms.
    pub fn monomial_content(&self) -> Monomial {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return Monomial::one();
        };
        let mut vars = first.vars.clone();
        for (m, _) in it {
            vars.retain(|(v, e)| {
                let f = m.exponent(v);
                *e = (*e).min(f);
                *e > 0
            });
            if vars.is_empty() {
                break;
            }
        }
        Monomial {
            vars,
            exp: ExpForm::default(),
        }
    }

    /// Minimum exponential part over all terms.
    pub fn exp_floor(&self) -> ExpForm {
        let mut it = self.terms.iter();
        let Some((first, _)) = it.next() else {
            return ExpForm::default();
        };
        let mut acc = first.exp.clone();
        for (m, _) in it {
            acc = acc.min(&m.exp);
        }
        acc
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    ///
    /// Exponential factors are units: both operands are first shifted so that every
    /// exponential exponent is nonnegative, which makes ordinary division terminate.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        if d.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if d.terms.len() == 1 {
            let (dm, dc) = &d.terms[0];
            let inv = dc.recip();
            let mut terms = Vec::with_capacity(self.terms.len());
            for (m, c) in &self.terms {
                terms.push((m.div(dm)?, c * &inv));
            }
            return Some(Poly { terms });
        }
        let shift_n = self.exp_floor();
        let shift_d = d.exp_floor();
        let n = self.mul_term(&Monomial::exponential(shift_n.neg()), &Q::one());
        let d = d.mul_term(&Monomial::exponential(shift_d.neg()), &Q::one());
        let (lm, lc) = d.terms[0].clone();
        let lc_inv = lc.recip();
        let mut rem = n;
        let mut quot: Vec<(Monomial, Q)> = Vec::new();
        while let Some((m, c)) = rem.terms.first() {
            let qm = m.div_strict(&lm)?;
            let qc = c * &lc_inv;
            rem = rem.sub(&d.mul_term(&qm, &qc));
            quot.push((qm, qc));
        }
        let q = Poly { terms: quot };
        Some(q.mul_term(
            &Monomial::exponential(shift_n.add(&shift_d.neg())),
            &Q::one(),
        ))
    }

    /// Coefficients of `r^j`, `j < index`, viewing the polynomial as univariate in `r`.
    pub fn split_by(&self, r: &Symbol, index: u32) -> Vec<Poly> {
        let mut parts = vec![Vec::new(); index as usize];
        for (m, c) in &self.terms {
            let e = m.exponent(r) as usize;
            parts[e].push((m.without(r), c.clone()));
        }
        parts.into_iter().map(|terms| Poly { terms }).collect()
    }

    fn fmt_term(f: &mut fmt::Formatter<'_>, m: &Monomial, c: &Q, first: bool) -> fmt::Result {
        let neg = c.is_negative();
        let mag = c.abs();
        if first {
            if neg {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if neg { " - " } else { " + " })?;
        }
        if m.is_one() {
            write!(f, "{mag}")
        } else if mag.is_one() {
            write!(f, "{m}")
        } else {
            write!(f, "{mag}*{m}")
        }
    }
}

impl Ord for Poly {
    fn cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.terms.iter().zip(&other.terms) {
            let o = a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1));
            if o != Ordering::Equal {
                return o;
            }
        }
        self.terms.len().cmp(&other.terms.len())
    }
}

impl PartialOrd for Poly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            Poly::fmt_term(f, m, c, k == 0)?;
        }
        Ok(())
    }
}
