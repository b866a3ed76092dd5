//! Differential forms, vector fields and coordinate maps on a chart.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Point, Scalar, Symbol};
use crate::linalg;

/// Condition a chart imposes on admissible points.
#[derive(Clone, Debug)]
pub enum Guard {
    Nonzero(Scalar),
    Positive(Scalar),
}

impl Guard {
    pub fn expr(&self) -> &Scalar {
        match self {
            Guard::Nonzero(s) | Guard::Positive(s) => s,
        }
    }

    pub fn holds(&self, point: &Point) -> Result<bool> {
        let v = match self.expr().eval(point) {
            Ok(v) => v,
            Err(Error::DomainViolation(_)) => return Ok(false),
            Err(e) => return Err(e),
        };
        Ok(match self {
            Guard::Nonzero(_) => v.abs() > 1e-9,
            Guard::Positive(_) => v > 1e-9,
        })
    }
}

impl fmt::Display for Guard {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Guard::Nonzero(s) => write!(f, "{s} != 0"),
            Guard::Positive(s) => write!(f, "{s} > 0"),
        }
    }
}

/// A coordinate chart: an ordered list of coordinates plus the guard locus.
#[derive(Debug)]
pub struct Chart {
    name: String,
    coords: Vec<Symbol>,
    guards: Vec<Guard>,
}

impl Chart {
    pub fn new(name: &str, coords: &[&str], guards: Vec<Guard>) -> Result<Arc<Chart>> {
        let coords = coords
            .iter()
            .map(|c| Symbol::coordinate(c))
            .collect::<Result<Vec<_>>>()?;
        if coords.len() > 8 {
            return Err(Error::DegreeOverflow(coords.len(), 8));
        }
        Ok(Arc::new(Chart {
            name: name.to_string(),
            coords,
            guards,
        }))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn coords(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn index_of(&self, s: &Symbol) -> Option<usize> {
        self.coords.iter().position(|c| c == s)
    }

    pub fn coord(&self, name: &str) -> Result<Scalar> {
        self.coords
            .iter()
            .find(|c| c.name() == name)
            .map(Scalar::symbol)
            .ok_or_else(|| Error::UnknownSymbol(format!("{name} on chart {}", self.name)))
    }

    /// Fails with `GuardViolation` naming the first guard that does not hold.
    pub fn check(&self, point: &Point) -> Result<()> {
        for g in &self.guards {
            if !g.holds(point)? {
                return Err(Error::GuardViolation(format!("{g} on chart {}", self.name)));
            }
        }
        Ok(())
    }

    fn same(a: &Arc<Chart>, b: &Arc<Chart>) -> Result<()> {
        if Arc::ptr_eq(a, b) || (a.name == b.name && a.coords == b.coords) {
            Ok(())
        } else {
            Err(Error::ChartMismatch(a.name.clone(), b.name.clone()))
        }
    }
}

fn sign_between(a: u8, b: u8) -> bool {
    // parity of pairs (i in a, j in b) with i > j
    let mut n = 0;
    for j in 0..8 {
        if b & (1 << j) != 0 {
            n += (a >> (j + 1)).count_ones();
        }
    }
    n % 2 == 1
}

/// Alternating form with sparse components over increasing index sets.
#[derive(Clone)]
pub struct Form {
    chart: Arc<Chart>,
    degree: usize,
    comps: BTreeMap<u8, Scalar>,
}

impl Form {
    pub fn zero(chart: &Arc<Chart>, degree: usize) -> Form {
        Form {
            chart: chart.clone(),
            degree,
            comps: BTreeMap::new(),
        }
    }

    pub fn function(chart: &Arc<Chart>, f: Scalar) -> Form {
        Form::zero(chart, 0).with(0, f)
    }

    /// The coordinate differential `d(coords[i])`.
    pub fn basis(chart: &Arc<Chart>, i: usize) -> Form {
        Form::zero(chart, 1).with(1 << i, Scalar::one())
    }

    /// `d(name)` for a coordinate of the chart.
    pub fn dcoord(chart: &Arc<Chart>, name: &str) -> Result<Form> {
        let i = chart
            .coords
            .iter()
            .position(|c| c.name() == name)
            .ok_or_else(|| Error::UnknownSymbol(format!("{name} on chart {}", chart.name)))?;
        Ok(Form::basis(chart, i))
    }

    /// The 1-form with the given coefficients on `d(coords[i])`.
    pub fn one_form(chart: &Arc<Chart>, coefs: Vec<Scalar>) -> Result<Form> {
        if coefs.len() != chart.dim() {
            return Err(Error::ChartMismatch(
                format!("{} coefficients", coefs.len()),
                chart.name.clone(),
            ));
        }
        let mut f = Form::zero(chart, 1);
        for (i, c) in coefs.into_iter().enumerate() {
            f = f.with(1 << i, c);
        }
        Ok(f)
    }

    fn with(mut self, mask: u8, c: Scalar) -> Form {
        if !c.is_zero() {
            self.comps.insert(mask, c);
        }
        self
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.comps.values().all(Scalar::is_zero)
    }

    /// Component on the increasing index tuple `idx`.
    pub fn component(&self, idx: &[usize]) -> Scalar {
        let mask = idx.iter().fold(0u8, |m, i| m | (1 << i));
        self.comps.get(&mask).cloned().unwrap_or_default()
    }

    /// Nonzero components as `(indices, coefficient)`.
    pub fn components(&self) -> impl Iterator<Item = (Vec<usize>, &Scalar)> + '_ {
        self.comps.iter().map(|(m, c)| {
            ((0..8).filter(|i| m & (1 << i) != 0).collect(), c)
        })
    }

    /// Coefficients of a 1-form, one per coordinate.
    pub fn coefficients(&self) -> Vec<Scalar> {
        (0..self.chart.dim()).map(|i| self.component(&[i])).collect()
    }

    fn zip(&self, other: &Form, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Result<Form> {
        Chart::same(&self.chart, &other.chart)?;
        if self.degree != other.degree {
            return Err(Error::ChartMismatch(
                format!("degree {}", self.degree),
                format!("degree {}", other.degree),
            ));
        }
        let zero = Scalar::zero();
        let mut out = Form::zero(&self.chart, self.degree);
        let masks: std::collections::BTreeSet<u8> =
            self.comps.keys().chain(other.comps.keys()).copied().collect();
        for m in masks {
            let a = self.comps.get(&m).unwrap_or(&zero);
            let b = other.comps.get(&m).unwrap_or(&zero);
            out = out.with(m, f(a, b));
        }
        Ok(out)
    }

    pub fn add(&self, other: &Form) -> Result<Form> {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Form) -> Result<Form> {
        self.zip(other, |a, b| a - b)
    }

    pub fn neg(&self) -> Form {
        self.scale(&Scalar::integer(-1))
    }

    pub fn scale(&self, s: &Scalar) -> Form {
        let mut out = Form::zero(&self.chart, self.degree);
        for (m, c) in &self.comps {
            out = out.with(*m, c * s);
        }
        out
    }

    pub fn wedge(&self, other: &Form) -> Result<Form> {
        Chart::same(&self.chart, &other.chart)?;
        let deg = self.degree + other.degree;
        if deg > self.chart.dim() {
            return Err(Error::DegreeOverflow(deg, self.chart.dim()));
        }
        let mut acc: BTreeMap<u8, Scalar> = BTreeMap::new();
        for (ma, a) in &self.comps {
            for (mb, b) in &other.comps {
                if ma & mb != 0 {
                    continue;
                }
                let mut t = a * b;
                if sign_between(*ma, *mb) {
                    t = -t;
                }
                let e = acc.entry(ma | mb).or_default();
                *e = &*e + &t;
            }
        }
        let mut out = Form::zero(&self.chart, deg);
        for (m, c) in acc {
            out = out.with(m, c);
        }
        Ok(out)
    }

    /// Exterior derivative.
    pub fn d(&self) -> Result<Form> {
        let deg = self.degree + 1;
        if deg > self.chart.dim() {
            return Err(Error::DegreeOverflow(deg, self.chart.dim()));
        }
        let mut acc: BTreeMap<u8, Scalar> = BTreeMap::new();
        for (m, c) in &self.comps {
            for (j, v) in self.chart.coords.iter().enumerate() {
                if m & (1 << j) != 0 {
                    continue;
                }
                let mut t = c.diff(v)?;
                if t.is_zero() {
                    continue;
                }
                if (m & ((1u8 << j) - 1)).count_ones() % 2 == 1 {
                    t = -t;
                }
                let e = acc.entry(m | (1 << j)).or_default();
                *e = &*e + &t;
            }
        }
        let mut out = Form::zero(&self.chart, deg);
        for (m, c) in acc {
            out = out.with(m, c);
        }
        Ok(out)
    }

    /// Interior product `i_X self`.
    pub fn contract(&self, x: &VectorField) -> Result<Form> {
        Chart::same(&self.chart, &x.chart)?;
        if self.degree == 0 {
            return Ok(Form::zero(&self.chart, 0));
        }
        let mut acc: BTreeMap<u8, Scalar> = BTreeMap::new();
        for (m, c) in &self.comps {
            let mut pos = 0;
            for i in 0..self.chart.dim() {
                if m & (1 << i) == 0 {
                    continue;
                }
                let xi = &x.comps[i];
                if !xi.is_zero() {
                    let mut t = c * xi;
                    if pos % 2 == 1 {
                        t = -t;
                    }
                    let e = acc.entry(m & !(1 << i)).or_default();
                    *e = &*e + &t;
                }
                pos += 1;
            }
        }
        let mut out = Form::zero(&self.chart, self.degree - 1);
        for (m, c) in acc {
            out = out.with(m, c);
        }
        Ok(out)
    }

    /// Value of a 1-form on a vector field.
    pub fn pair(&self, x: &VectorField) -> Result<Scalar> {
        Ok(self.contract(x)?.component(&[]))
    }

    /// Value of a 2-form on a pair of vector fields.
    pub fn pair2(&self, x: &VectorField, y: &VectorField) -> Result<Scalar> {
        Ok(self.contract(x)?.contract(y)?.component(&[]))
    }

    pub fn subst(&self, b: &Bindings) -> Result<Form> {
        let mut out = Form::zero(&self.chart, self.degree);
        for (m, c) in &self.comps {
            out = out.with(*m, c.subst(b)?);
        }
        Ok(out)
    }

    /// Componentwise numeric values keyed by index tuple.
    pub fn eval(&self, point: &Point) -> Result<Vec<(Vec<usize>, f64)>> {
        self.components()
            .map(|(i, c)| Ok((i, c.eval(point)?)))
            .collect()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.comps.is_empty() {
            return f.write_str("0");
        }
        for (k, (idx, c)) in self.components().enumerate() {
            let basis: Vec<String> = idx
                .iter()
                .map(|i| format!("d({})", self.chart.coords[*i]))
                .collect();
            let basis = basis.join("^");
            let minus = c.is_single_term() && c.leading_negative();
            let body = if minus { (-c).to_string() } else { c.to_string() };
            if k == 0 {
                if minus {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if minus { " - " } else { " + " })?;
            }
            if self.degree == 0 {
                write!(f, "{body}")?;
            } else if body == "1" {
                write!(f, "{basis}")?;
            } else if body.contains(' ') {
                write!(f, "({body})*{basis}")?;
            } else {
                write!(f, "{body}*{basis}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Vector field with one component per coordinate.
#[derive(Clone)]
pub struct VectorField {
    chart: Arc<Chart>,
    comps: Vec<Scalar>,
}

impl VectorField {
    pub fn new(chart: &Arc<Chart>, comps: Vec<Scalar>) -> Result<VectorField> {
        if comps.len() != chart.dim() {
            return Err(Error::ChartMismatch(
                format!("{} components", comps.len()),
                chart.name.clone(),
            ));
        }
        Ok(VectorField {
            chart: chart.clone(),
            comps,
        })
    }

    /// Coordinate field `D(coords[i])`.
    pub fn basis(chart: &Arc<Chart>, i: usize) -> VectorField {
        let mut comps = vec![Scalar::zero(); chart.dim()];
        comps[i] = Scalar::one();
        VectorField {
            chart: chart.clone(),
            comps,
        }
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Scalar] {
        &self.comps
    }

    /// Directional derivative `X(f)`.
    pub fn apply(&self, f: &Scalar) -> Result<Scalar> {
        let mut out = Scalar::zero();
        for (c, v) in self.comps.iter().zip(&self.chart.coords) {
            if c.is_zero() {
                continue;
            }
            out = &out + &(c * &f.diff(v)?);
        }
        Ok(out)
    }

    pub fn bracket(&self, other: &VectorField) -> Result<VectorField> {
        Chart::same(&self.chart, &other.chart)?;
        let comps = (0..self.chart.dim())
            .map(|i| Ok(&self.apply(&other.comps[i])? - &other.apply(&self.comps[i])?))
            .collect::<Result<Vec<_>>>()?;
        VectorField::new(&self.chart, comps)
    }

    pub fn add(&self, other: &VectorField) -> Result<VectorField> {
        Chart::same(&self.chart, &other.chart)?;
        let comps = self.comps.iter().zip(&other.comps).map(|(a, b)| a + b).collect();
        VectorField::new(&self.chart, comps)
    }

    pub fn scale(&self, s: &Scalar) -> VectorField {
        VectorField {
            chart: self.chart.clone(),
            comps: self.comps.iter().map(|c| c * s).collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.comps.iter().all(Scalar::is_zero)
    }

    pub fn eval(&self, point: &Point) -> Result<Vec<f64>> {
        self.comps.iter().map(|c| c.eval(point)).collect()
    }

    pub fn subst(&self, b: &Bindings) -> Result<VectorField> {
        let comps = self.comps.iter().map(|c| c.subst(b)).collect::<Result<_>>()?;
        VectorField::new(&self.chart, comps)
    }
}

impl PartialEq for VectorField {
    fn eq(&self, other: &Self) -> bool {
        self.chart.name == other.chart.name && self.comps == other.comps
    }
}

impl fmt::Display for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (c, v) in self.comps.iter().zip(&self.chart.coords) {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            if c.is_one() {
                write!(f, "D({v})")?;
            } else {
                write!(f, "({c})*D({v})")?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Debug for VectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Annihilator of a list of independent 1-forms: `dim - count` vector fields.
pub fn kernel(forms: &[Form]) -> Result<Vec<VectorField>> {
    let Some(first) = forms.first() else {
        return Err(Error::DependentForms { rank: 0, count: 0 });
    };
    let chart = first.chart.clone();
    for f in forms {
        Chart::same(&chart, &f.chart)?;
        if f.degree != 1 {
            return Err(Error::DegreeOverflow(f.degree, 1));
        }
    }
    let rows: Vec<Vec<Scalar>> = forms.iter().map(Form::coefficients).collect();
    let ech = linalg::rref(rows)?;
    if ech.pivots.len() < forms.len() {
        return Err(Error::DependentForms {
            rank: ech.pivots.len(),
            count: forms.len(),
        });
    }
    let pivot_cols: Vec<usize> = ech.pivots.iter().map(|(_, c)| *c).collect();
    let mut out = Vec::new();
    for free in (0..chart.dim()).filter(|c| !pivot_cols.contains(c)) {
        let mut comps = vec![Scalar::zero(); chart.dim()];
        comps[free] = Scalar::one();
        for (r, c) in &ech.pivots {
            comps[*c] = -&ech.rows[*r][free];
        }
        out.push(VectorField::new(&chart, comps)?);
    }
    Ok(out)
}

/// Map `source -> target` given by target coordinates as functions on the source.
#[derive(Clone)]
pub struct CoordMap {
    name: String,
    source: Arc<Chart>,
    target: Arc<Chart>,
    exprs: Vec<Scalar>,
    differentials: Vec<Form>,
}

impl CoordMap {
    pub fn new(
        name: &str,
        source: &Arc<Chart>,
        target: &Arc<Chart>,
        exprs: Vec<Scalar>,
    ) -> Result<CoordMap> {
        if exprs.len() != target.dim() {
            return Err(Error::ChartMismatch(
                format!("{} expressions", exprs.len()),
                target.name.clone(),
            ));
        }
        let differentials = exprs
            .iter()
            .map(|e| Form::function(source, e.clone()).d())
            .collect::<Result<_>>()?;
        Ok(CoordMap {
            name: name.to_string(),
            source: source.clone(),
            target: target.clone(),
            exprs,
            differentials,
        })
    }

    pub fn identity(chart: &Arc<Chart>) -> CoordMap {
        let exprs = chart.coords.iter().map(Scalar::symbol).collect();
        CoordMap::new("identity", chart, chart, exprs).expect("identity map")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> &Arc<Chart> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Chart> {
        &self.target
    }

    pub fn exprs(&self) -> &[Scalar] {
        &self.exprs
    }

    /// Bindings `target coordinate -> expression`.
    pub fn bindings(&self) -> Bindings {
        self.target
            .coords
            .iter()
            .cloned()
            .zip(self.exprs.iter().cloned())
            .collect()
    }

    /// Pulls a function on the target back to the source.
    pub fn pull_scalar(&self, f: &Scalar) -> Result<Scalar> {
        f.subst(&self.bindings())
    }

    pub fn pullback(&self, form: &Form) -> Result<Form> {
        Chart::same(&self.target, &form.chart)?;
        let b = self.bindings();
        let mut out = Form::zero(&self.source, form.degree);
        for (idx, c) in form.components() {
            let mut term = Form::function(&self.source, c.subst(&b)?);
            for i in idx {
                term = term.wedge(&self.differentials[i])?;
            }
            out = out.add(&term)?;
        }
        Ok(out)
    }

    /// `next ∘ self`, a map from `self.source` to `next.target`.
    pub fn then(&self, next: &CoordMap) -> Result<CoordMap> {
        Chart::same(&self.target, &next.source)?;
        let b = self.bindings();
        let exprs = next
            .exprs
            .iter()
            .map(|e| e.subst(&b))
            .collect::<Result<Vec<_>>>()?;
        CoordMap::new(
            &format!("{} then {}", self.name, next.name),
            &self.source,
            &next.target,
            exprs,
        )
    }

    /// Jacobian `d(target_i)/d(source_j)` at a point.
    pub fn jacobian(&self, point: &Point) -> Result<Vec<Vec<f64>>> {
        self.differentials
            .iter()
            .map(|d| {
                let c = d.coefficients();
                c.iter().map(|s| s.eval(point)).collect()
            })
            .collect()
    }

    /// Image of a source point.
    pub fn apply(&self, point: &Point) -> Result<Point> {
        let mut out: Point = point
            .iter()
            .filter(|(s, _)| !s.is_coordinate())
            .map(|(s, v)| (s.clone(), *v))
            .collect();
        for (c, e) in self.target.coords.iter().zip(&self.exprs) {
            out.insert(c.clone(), e.eval(point)?);
        }
        Ok(out)
    }

    /// True when `self` followed by `inverse` is the identity on the source.
    pub fn is_left_inverse_of(&self, inverse: &CoordMap) -> Result<bool> {
        let round = self.then(inverse)?;
        Ok(round
            .exprs
            .iter()
            .zip(&self.source.coords)
            .all(|(e, c)| (e - &Scalar::symbol(c)).is_zero()))
    }
}

impl fmt::Display for CoordMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .target
            .coords
            .iter()
            .zip(&self.exprs)
            .map(|(c, e)| format!("{c} = {e}"))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

impl fmt::Debug for CoordMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {self}", self.name)
    }
}
