use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use num_traits::{One, Signed, Zero};
use smallvec::SmallVec;

use super::symbol::Symbol;

pub(crate) type ExpCoef = Ratio<i64>;

/// One direction of an exponent: a coordinate times a monomial in parameters.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub(crate) struct Axis {
    pub coord: Symbol,
    pub params: SmallVec<[(Symbol, u32); 2]>,
}

/// Exponent `L` of an exponential factor `exp(L)`, a rational combination of axes.
/// Sorted by axis, no zero coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub(crate) struct ExpForm(pub SmallVec<[(Axis, ExpCoef); 2]>);

impl ExpForm {
    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add(&self, other: &ExpForm) -> ExpForm {
        if other.0.is_empty() {
            return self.clone();
        }
        if self.0.is_empty() {
            return other.clone();
        }
        let mut out = SmallVec::new();
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.0, &other.0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let c = a[i].1 + b[j].1;
                    if !c.is_zero() {
                        out.push((a[i].0.clone(), c));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        ExpForm(out)
    }

    pub fn neg(&self) -> ExpForm {
        ExpForm(self.0.iter().map(|(a, c)| (a.clone(), -c)).collect())
    }

    pub fn scale(&self, s: ExpCoef) -> ExpForm {
        if s.is_zero() {
            return ExpForm::default();
        }
        ExpForm(self.0.iter().map(|(a, c)| (a.clone(), c * s)).collect())
    }

    pub fn coef(&self, axis: &Axis) -> ExpCoef {
        self.0
            .iter()
            .find(|(a, _)| a == axis)
            .map(|(_, c)| *c)
            .unwrap_or_else(ExpCoef::zero)
    }

    /// Componentwise minimum, treating absent axes as zero.
    pub fn min(&self, other: &ExpForm) -> ExpForm {
        let mut out: SmallVec<[(Axis, ExpCoef); 2]> = SmallVec::new();
        for (a, c) in &self.0 {
            let m = (*c).min(other.coef(a));
            if !m.is_zero() {
                out.push((a.clone(), m));
            }
        }
        for (a, c) in &other.0 {
            if self.0.iter().all(|(b, _)| b != a) && c.is_negative() {
                out.push((a.clone(), *c));
            }
        }
        out.sort_by(|x, y| x.0.cmp(&y.0));
        ExpForm(out)
    }

    /// True when every coefficient of `self - other` is nonnegative.
    pub fn dominates(&self, other: &ExpForm) -> bool {
        other.0.iter().all(|(a, c)| self.coef(a) >= *c)
            && self.0.iter().all(|(a, c)| !c.is_negative() || other.coef(a) <= *c)
    }

    pub fn mentions(&self, s: &Symbol) -> bool {
        self.0
            .iter()
            .any(|(a, _)| &a.coord == s || a.params.iter().any(|(p, _)| p == s))
    }

    fn cmp_lex(&self, other: &ExpForm) -> Ordering {
        let (a, b) = (&self.0, &other.0);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(x), None) => return x.1.cmp(&ExpCoef::zero()),
                (None, Some(y)) => return ExpCoef::zero().cmp(&y.1),
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Equal => {
                        let o = x.1.cmp(&y.1);
                        if o != Ordering::Equal {
                            return o;
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return x.1.cmp(&ExpCoef::zero()),
                    Ordering::Greater => return ExpCoef::zero().cmp(&y.1),
                },
            }
        }
    }
}

impl fmt::Display for ExpForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, (axis, c)) in self.0.iter().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if !mag.is_one() {
                write!(f, "{mag}*")?;
            }
            for (p, e) in &axis.params {
                if *e == 1 {
                    write!(f, "{p}*")?;
                } else {
                    write!(f, "{p}^{e}*")?;
                }
            }
            write!(f, "{}", axis.coord)?;
        }
        Ok(())
    }
}

/// Power product of symbols times an exponential factor.
#[derive(Clone, PartialEq, Eq, Hash, Default, Debug)]
pub(crate) struct Monomial {
    pub vars: SmallVec<[(Symbol, u32); 4]>,
    pub exp: ExpForm,
}

impl Monomial {
    pub fn one() -> Monomial {
        Monomial::default()
    }

    pub fn var(s: &Symbol, e: u32) -> Monomial {
        let mut m = Monomial::default();
        if e > 0 {
            m.vars.push((s.clone(), e));
        }
        m
    }

    pub fn exponential(exp: ExpForm) -> Monomial {
        Monomial {
            vars: SmallVec::new(),
            exp,
        }
    }

    pub fn is_one(&self) -> bool {
        self.vars.is_empty() && self.exp.is_zero()
    }

    pub fn degree(&self) -> u32 {
        self.vars.iter().map(|(_, e)| e).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.vars
            .iter()
            .find(|(v, _)| v == s)
            .map(|(_, e)| *e)
            .unwrap_or(0)
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut vars: SmallVec<[(Symbol, u32); 4]> = SmallVec::new();
        let (a, b) = (&self.vars, &other.vars);
        let (mut i, mut j) = (0, 0);
        while i < a.len() || j < b.len() {
            let ord = match (a.get(i), b.get(j)) {
                (Some(x), Some(y)) => x.0.cmp(&y.0),
                (Some(_), None) => Ordering::Less,
                _ => Ordering::Greater,
            };
            match ord {
                Ordering::Less => {
                    vars.push(a[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    vars.push(b[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    vars.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        Monomial {
            vars,
            exp: self.exp.add(&other.exp),
        }
    }

    /// `self / other` when the symbol part divides; exponentials are units.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut vars = self.vars.clone();
        for (s, e) in &other.vars {
            let pos = vars.iter().position(|(v, _)| v == s)?;
            if vars[pos].1 < *e {
                return None;
            }
            vars[pos].1 -= e;
            if vars[pos].1 == 0 {
                vars.remove(pos);
            }
        }
        Some(Monomial {
            vars,
            exp: self.exp.add(&other.exp.neg()),
        })
    }

    /// Same as `div` but also requires the exponential part to divide
    /// componentwise (used when exponentials have been shifted to be nonnegative).
    pub fn div_strict(&self, other: &Monomial) -> Option<Monomial> {
        if !self.exp.dominates(&other.exp) {
            return None;
        }
        self.div(other)
    }

    pub fn without(&self, s: &Symbol) -> Monomial {
        Monomial {
            vars: self.vars.iter().filter(|(v, _)| v != s).cloned().collect(),
            exp: self.exp.clone(),
        }
    }

    pub fn with_exponent(&self, s: &Symbol, e: u32) -> Monomial {
        let mut m = self.without(s);
        if e > 0 {
            let pos = m.vars.iter().position(|(v, _)| v > s).unwrap_or(m.vars.len());
            m.vars.insert(pos, (s.clone(), e));
        }
        m
    }

    fn cmp_vars_lex(&self, other: &Monomial) -> Ordering {
        let (a, b) = (&self.vars, &other.vars);
        let (mut i, mut j) = (0, 0);
        loop {
            match (a.get(i), b.get(j)) {
                (None, None) => return Ordering::Equal,
                (Some(_), None) => return Ordering::Greater,
                (None, Some(_)) => return Ordering::Less,
                (Some(x), Some(y)) => match x.0.cmp(&y.0) {
                    Ordering::Equal => {
                        let o = x.1.cmp(&y.1);
                        if o != Ordering::Equal {
                            return o;
                        }
                        i += 1;
                        j += 1;
                    }
                    Ordering::Less => return Ordering::Greater,
                    Ordering::Greater => return Ordering::Less,
                },
            }
        }
    }
}

/// Graded lexicographic order on the symbol part, then lexicographic on exponents.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.cmp_vars_lex(other))
            .then_with(|| self.exp.cmp_lex(&other.exp))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (s, e) in &self.vars {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        if !self.exp.is_zero() {
            if !first {
                f.write_str("*")?;
            }
            first = false;
            write!(f, "exp({})", self.exp)?;
        }
        if first {
            f.write_str("1")?;
        }
        Ok(())
    }
}
