//! Pfaffian systems, derived flags and ideal equivalence.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Bindings, Point, Scalar};
use crate::forms::{kernel, Chart, CoordMap, Form, VectorField};
use crate::linalg::{self, Echelon};
use crate::sampling;

/// Independent 1-forms whose common kernel is a distribution.
#[derive(Clone)]
pub struct PfaffianSystem {
    name: String,
    chart: Arc<Chart>,
    forms: Vec<Form>,
    // [reduced coefficient rows | transformation from the original forms]
    echelon: Echelon,
}

impl PfaffianSystem {
    pub fn new(name: &str, forms: Vec<Form>) -> Result<PfaffianSystem> {
        let chart = forms
            .first()
            .ok_or(Error::DependentForms { rank: 0, count: 0 })?
            .chart()
            .clone();
        let n = chart.dim();
        let k = forms.len();
        let mut rows = Vec::with_capacity(k);
        for (i, f) in forms.iter().enumerate() {
            if f.chart().name() != chart.name() {
                return Err(Error::ChartMismatch(
                    chart.name().to_string(),
                    f.chart().name().to_string(),
                ));
            }
            if f.degree() != 1 {
                return Err(Error::DegreeOverflow(f.degree(), 1));
            }
            let mut row = f.coefficients();
            row.extend((0..k).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            rows.push(row);
        }
        let ech = linalg::rref_partial(rows, n)?;
        if ech.rank() < k {
            return Err(Error::DependentForms {
                rank: ech.rank(),
                count: k,
            });
        }
        Ok(PfaffianSystem {
            name: name.to_string(),
            chart,
            forms,
            echelon: ech,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn forms(&self) -> &[Form] {
        &self.forms
    }

    pub fn kernel(&self) -> Result<Vec<VectorField>> {
        kernel(&self.forms)
    }

    pub fn subst(&self, b: &Bindings) -> Result<PfaffianSystem> {
        let forms = self
            .forms
            .iter()
            .map(|f| f.subst(b))
            .collect::<Result<Vec<_>>>()?;
        PfaffianSystem::new(&self.name, forms)
    }

    /// Writes `f = sum g_j forms[j] + remainder` with the remainder supported
    /// off the pivot columns; `f` lies in the span iff the remainder vanishes.
    pub fn reduce(&self, f: &Form) -> Result<(Vec<Scalar>, Form)> {
        if f.chart().name() != self.chart.name() {
            return Err(Error::ChartMismatch(
                self.chart.name().to_string(),
                f.chart().name().to_string(),
            ));
        }
        let n = self.chart.dim();
        let k = self.forms.len();
        let v = f.coefficients();
        let mut rem = v.clone();
        let mut g = vec![Scalar::zero(); k];
        for (r, c) in &self.echelon.pivots {
            let t = &v[*c];
            if t.is_zero() {
                continue;
            }
            let row = &self.echelon.rows[*r];
            for j in 0..n {
                if !row[j].is_zero() {
                    rem[j] = &rem[j] - &(t * &row[j]);
                }
            }
            for j in 0..k {
                if !row[n + j].is_zero() {
                    g[j] = &g[j] + &(t * &row[n + j]);
                }
            }
        }
        Ok((g, Form::one_form(&self.chart, rem)?))
    }
}

impl fmt::Display for PfaffianSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, form) in self.forms.iter().enumerate() {
            writeln!(f, "{}[{}] = {form}", self.name, i + 1)?;
        }
        Ok(())
    }
}

/// Ranks of the derived flag.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GrowthVector {
    pub ranks: Vec<usize>,
}

impl GrowthVector {
    pub fn is_235(&self) -> bool {
        self.ranks == [2, 3, 5]
    }
}

impl fmt::Display for GrowthVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.ranks.iter().map(usize::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Reduced row basis that grows one vector at a time.
struct Span {
    rows: Vec<Vec<Scalar>>,
    pivots: Vec<usize>,
}

impl Span {
    fn new() -> Span {
        Span {
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn insert(&mut self, v: &[Scalar]) -> Result<bool> {
        let mut v = v.to_vec();
        for (row, p) in self.rows.iter().zip(&self.pivots) {
            let t = v[*p].clone();
            if t.is_zero() {
                continue;
            }
            for (x, y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = &*x - &(&t * y);
                }
            }
        }
        let Some(p) = (0..v.len())
            .filter(|i| !v[*i].is_zero())
            .min_by_key(|i| (v[*i].as_rational().is_none(), v[*i].complexity(), *i))
        else {
            return Ok(false);
        };
        let inv = v[p].inv()?;
        for x in v.iter_mut() {
            if !x.is_zero() {
                *x = &*x * &inv;
            }
        }
        for row in self.rows.iter_mut() {
            let t = row[p].clone();
            if t.is_zero() {
                continue;
            }
            for (x, y) in row.iter_mut().zip(&v) {
                if !y.is_zero() {
                    *x = &*x - &(&t * y);
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        Ok(true)
    }
}

fn numeric_ranks(fields: &[VectorField], points: &[Point]) -> Result<Vec<usize>> {
    points
        .iter()
        .map(|p| {
            let rows = fields.iter().map(|f| f.eval(p)).collect::<Result<Vec<_>>>()?;
            Ok(linalg::numeric_rank(&rows))
        })
        .collect()
}

/// Derived flag of the kernel distribution: each step adds all pairwise brackets
/// of the current generators. Symbolic ranks are cross-checked numerically at
/// `points`; `InconsistentRank` is raised only when every point disagrees.
pub fn derived_flag(
    sys: &PfaffianSystem,
    max_steps: usize,
    points: &[Point],
) -> Result<GrowthVector> {
    let mut gens = Vec::new();
    let mut span = Span::new();
    for g in sys.kernel()? {
        if span.insert(g.components())? {
            gens.push(g);
        }
    }
    let mut ranks = vec![gens.len()];
    check_ranks(&gens, points, gens.len())?;
    let dim = sys.chart().dim();
    for _ in 0..max_steps {
        let before = gens.len();
        if before == dim {
            break;
        }
        let mut next = gens.clone();
        for i in 0..before {
            for j in i + 1..before {
                let b = gens[i].bracket(&gens[j])?;
                if span.insert(b.components())? {
                    next.push(b);
                }
            }
        }
        check_ranks(&next, points, next.len())?;
        if next.len() == before {
            break;
        }
        ranks.push(next.len());
        gens = next;
    }
    Ok(GrowthVector { ranks })
}

fn check_ranks(fields: &[VectorField], points: &[Point], symbolic: usize) -> Result<()> {
    if points.is_empty() {
        return Ok(());
    }
    let numeric = numeric_ranks(fields, points)?;
    if numeric.iter().all(|r| *r != symbolic) {
        return Err(Error::InconsistentRank { symbolic, numeric });
    }
    Ok(())
}

/// Derived flag with numeric checks at `n` seeded admissible points of the chart.
pub fn derived_flag_sampled(
    sys: &PfaffianSystem,
    max_steps: usize,
    fixed: &Point,
    n: usize,
    seed: u64,
) -> Result<GrowthVector> {
    let points = sampling::admissible_points(sys.chart(), fixed, &[], n, seed)?;
    derived_flag(sys, max_steps, &points)
}

pub fn is_235(sys: &PfaffianSystem, fixed: &Point, seed: u64) -> Result<bool> {
    Ok(derived_flag_sampled(sys, 3, fixed, 5, seed)?.is_235())
}

/// Witness that `pullback(m, b.forms) = g * a.forms`.
#[derive(Clone, Debug)]
pub struct Certificate {
    pub g: Vec<Vec<Scalar>>,
    pub det: Scalar,
}

#[derive(Serialize)]
pub struct CertificateJson {
    pub matrix: Vec<Vec<String>>,
    pub det: String,
}

impl Certificate {
    pub fn to_json(&self) -> CertificateJson {
        CertificateJson {
            matrix: self
                .g
                .iter()
                .map(|r| r.iter().map(Scalar::to_string).collect())
                .collect(),
            det: self.det.to_string(),
        }
    }

    /// Given `self: a ~ b under m` and `next: b ~ c under m2`, the witness of
    /// `a ~ c` under `m` followed by `m2`.
    pub fn then(&self, next: &Certificate, m: &CoordMap) -> Result<Certificate> {
        let b = m.bindings();
        let g2: Vec<Vec<Scalar>> = next
            .g
            .iter()
            .map(|r| r.iter().map(|s| s.subst(&b)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let k = self.g.len();
        let g: Vec<Vec<Scalar>> = (0..g2.len())
            .map(|i| {
                (0..k)
                    .map(|j| (0..g2[i].len()).map(|l| &g2[i][l] * &self.g[l][j]).sum())
                    .collect()
            })
            .collect();
        let det = linalg::det(&g);
        Ok(Certificate { g, det })
    }
}

pub fn ideal_equivalent(
    a: &PfaffianSystem,
    b: &PfaffianSystem,
    m: &CoordMap,
) -> Result<Certificate> {
    if m.source().name() != a.chart().name() || m.target().name() != b.chart().name() {
        return Err(Error::ChartMismatch(
            format!("{} -> {}", m.source().name(), m.target().name()),
            format!("{} -> {}", a.chart().name(), b.chart().name()),
        ));
    }
    let mut g = Vec::with_capacity(b.forms().len());
    for (i, f) in b.forms().iter().enumerate() {
        let pulled = m.pullback(f)?;
        let (row, rem) = a.reduce(&pulled)?;
        if !rem.is_zero() {
            return Err(Error::NotEquivalent(format!(
                "{}[{}] leaves the ideal of {}; remainder {rem}",
                b.name(),
                i + 1,
                a.name()
            )));
        }
        g.push(row);
    }
    let det = linalg::det(&g);
    if det.is_zero() {
        return Err(Error::NotEquivalent("certificate is singular".into()));
    }
    Ok(Certificate { g, det })
}

/// Finds `F` with `pullback(m, dz - F dx)` in the ideal of `source`, where `m`
/// maps into a jet chart with coordinates `x, y, z, p, q`; the first two contact
/// forms must pull back into the ideal as well. Returns `F` on the source chart.
pub fn derive_monge_f(source: &PfaffianSystem, m: &CoordMap) -> Result<Scalar> {
    let t = m.target();
    let d = |n: &str| Form::dcoord(t, n);
    let p = t.coord("p")?;
    let q = t.coord("q")?;
    let contact = [
        d("y")?.sub(&d("x")?.scale(&p))?,
        d("p")?.sub(&d("x")?.scale(&q))?,
    ];
    for (i, f) in contact.iter().enumerate() {
        let (_, rem) = source.reduce(&m.pullback(f)?)?;
        if !rem.is_zero() {
            return Err(Error::NotSolvable(format!(
                "contact form {} is not in the ideal; remainder {rem}",
                i + 1
            )));
        }
    }
    let (_, u) = source.reduce(&m.pullback(&d("z")?)?)?;
    let (_, v) = source.reduce(&m.pullback(&d("x")?)?)?;
    let (uc, vc) = (u.coefficients(), v.coefficients());
    let j = (0..vc.len())
        .find(|j| !vc[*j].is_zero())
        .ok_or_else(|| Error::NotSolvable("dx pulls back into the ideal".into()))?;
    let f = uc[j].try_div(&vc[j])?;
    let residual = u.sub(&v.scale(&f))?;
    if !residual.is_zero() {
        return Err(Error::NotSolvable(format!("remainder {residual}")));
    }
    Ok(f)
}
