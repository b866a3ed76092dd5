//! Cartan structure equations, the conformal metric of a coframe, and numeric
//! curvature.
//!
//! Curvature conventions (dimension `n = 5`):
//!
//! * `Γ^a_bc = ½ g^ad (∂_b g_dc + ∂_c g_db − ∂_d g_bc)`
//! * `R^a_bcd = ∂_c Γ^a_db − ∂_d Γ^a_cb + Γ^a_ce Γ^e_db − Γ^a_de Γ^e_cb`
//! * `Ric_bd = R^a_bad`, `R = g^bd Ric_bd`
//! * `P = (Ric − R g / (2(n−1))) / (n−2)`
//! * `C_abcd = R_abcd − (P_ac g_bd − P_ad g_bc + P_bd g_ac − P_bc g_ad)`

#![allow(clippy::needless_range_loop)]

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::expr::{Point, Scalar};
use crate::forms::{Chart, Form, Guard, VectorField};
use crate::linalg;
use crate::sampling::Sampler;

/// Five 1-forms `θ1..θ5` forming a coframe.
#[derive(Clone)]
pub struct AdaptedCoframe {
    name: String,
    chart: Arc<Chart>,
    theta: Vec<Form>,
}

impl AdaptedCoframe {
    pub fn new(name: &str, theta: Vec<Form>) -> Result<AdaptedCoframe> {
        if theta.len() != 5 {
            return Err(Error::DependentForms {
                rank: theta.len(),
                count: 5,
            });
        }
        let chart = theta[0].chart().clone();
        let rows: Vec<Vec<Scalar>> = theta.iter().map(Form::coefficients).collect();
        let rank = linalg::rank(rows)?;
        if rank < 5 {
            return Err(Error::DependentForms { rank, count: 5 });
        }
        Ok(AdaptedCoframe {
            name: name.to_string(),
            chart,
            theta,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn theta(&self) -> &[Form] {
        &self.theta
    }

    /// Vector fields `e_a` with `θ_i(e_a) = δ_ia`.
    pub fn dual_frame(&self) -> Result<Vec<VectorField>> {
        let m: Vec<Vec<Scalar>> = self.theta.iter().map(Form::coefficients).collect();
        let inv = linalg::inverse(&m)?;
        let n = self.chart.dim();
        (0..5)
            .map(|a| VectorField::new(&self.chart, (0..n).map(|mu| inv[mu][a].clone()).collect()))
            .collect()
    }
}

impl fmt::Display for AdaptedCoframe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.theta.iter().enumerate() {
            writeln!(f, "theta{} = {t}", i + 1)?;
        }
        Ok(())
    }
}

/// `(equation, θ index, Ω index, coefficient)`: `dθ_i ∋ coef · θ_a ∧ Ω_k` (1-based).
const TERMS: [(usize, usize, usize, i64, i64); 19] = [
    (1, 1, 1, 2, 1),
    (1, 1, 4, 1, 1),
    (1, 2, 2, 1, 1),
    (2, 1, 3, 1, 1),
    (2, 2, 1, 1, 1),
    (2, 2, 4, 2, 1),
    (3, 1, 5, 1, 1),
    (3, 2, 6, 1, 1),
    (3, 3, 1, 1, 1),
    (3, 3, 4, 1, 1),
    (4, 1, 7, 1, 1),
    (4, 3, 6, 4, 3),
    (4, 4, 1, 1, 1),
    (4, 5, 2, 1, 1),
    (5, 2, 7, 1, 1),
    (5, 3, 5, -4, 3),
    (5, 4, 3, 1, 1),
    (5, 5, 4, 1, 1),
    (0, 0, 0, 0, 1),
];

/// `dθ_i ∋ θ_a ∧ θ_b` without connection forms.
const FIXED: [(usize, usize, usize); 3] = [(1, 3, 4), (2, 3, 5), (3, 4, 5)];

fn pairs() -> Vec<(usize, usize)> {
    let mut v = Vec::with_capacity(10);
    for a in 0..5 {
        for b in a + 1..5 {
            v.push((a, b));
        }
    }
    v
}

fn unknown(k: usize, j: usize) -> usize {
    k * 5 + j
}

/// The constant 50×35 coefficient matrix of the structure equations in the
/// `θ_a ∧ θ_b` basis; row `10 i + pair`, column `5 k + j` for `Ω_k` on `θ_j`.
pub fn structure_matrix() -> Vec<Vec<Scalar>> {
    let pairs = pairs();
    let mut m = vec![vec![Scalar::zero(); 35]; 50];
    for (i, a, k, n, d) in TERMS.iter().copied().filter(|t| t.0 > 0) {
        let (i, a, k) = (i - 1, a - 1, k - 1);
        let coef = Scalar::rational(n, d);
        for j in (0..5).filter(|j| *j != a) {
            let (lo, hi, sign) = if a < j { (a, j, 1) } else { (j, a, -1) };
            let row = i * 10 + pairs.iter().position(|p| *p == (lo, hi)).expect("pair");
            let col = unknown(k, j);
            let t = if sign > 0 { coef.clone() } else { -&coef };
            m[row][col] = &m[row][col] + &t;
        }
    }
    m
}

/// Coefficients `C^i_ab` of `dθ_i = Σ_{a<b} C^i_ab θ_a ∧ θ_b`.
pub fn structure_functions(cf: &AdaptedCoframe) -> Result<Vec<Vec<Scalar>>> {
    let e = cf.dual_frame()?;
    let pairs = pairs();
    cf.theta
        .iter()
        .map(|t| {
            let dt = t.d()?;
            pairs
                .iter()
                .map(|(a, b)| dt.pair2(&e[*a], &e[*b]))
                .collect::<Result<Vec<_>>>()
        })
        .collect()
}

/// Residual entry of the structure equations.
#[derive(Clone, Debug)]
pub struct ResidualEntry {
    pub row: usize,
    pub value: Scalar,
}

/// Connection coefficients `Ω_k = Σ_j omega[k][j] θ_j` and the consistency residual.
#[derive(Clone, Debug)]
pub struct ConnectionSolution {
    pub omega: Vec<Vec<Scalar>>,
    pub residual: Vec<ResidualEntry>,
}

impl ConnectionSolution {
    pub fn is_valid(&self) -> bool {
        self.residual.iter().all(|r| r.value.is_zero())
    }

    pub fn nonzero_residual(&self) -> Vec<&ResidualEntry> {
        self.residual.iter().filter(|r| !r.value.is_zero()).collect()
    }

    pub fn require_valid(&self) -> Result<()> {
        let n = self.nonzero_residual().len();
        if n == 0 {
            Ok(())
        } else {
            Err(Error::NoSolution(n))
        }
    }

    pub fn omega_forms(&self, cf: &AdaptedCoframe) -> Result<Vec<Form>> {
        self.omega
            .iter()
            .map(|row| {
                let mut f = Form::zero(cf.chart(), 1);
                for (c, t) in row.iter().zip(cf.theta()) {
                    if !c.is_zero() {
                        f = f.add(&t.scale(c))?;
                    }
                }
                Ok(f)
            })
            .collect()
    }

    /// Differences `dθ_i − rhs_i` in the coordinate basis.
    pub fn back_substitute(&self, cf: &AdaptedCoframe) -> Result<Vec<Form>> {
        let omega = self.omega_forms(cf)?;
        let th = cf.theta();
        let mut out = Vec::with_capacity(5);
        for i in 0..5 {
            let mut rhs = Form::zero(cf.chart(), 2);
            for (ti, a, k, n, d) in TERMS.iter().copied().filter(|t| t.0 == i + 1) {
                let _ = ti;
                let w = th[a - 1].wedge(&omega[k - 1])?.scale(&Scalar::rational(n, d));
                rhs = rhs.add(&w)?;
            }
            for (fi, a, b) in FIXED {
                if fi == i + 1 {
                    rhs = rhs.add(&th[a - 1].wedge(&th[b - 1])?)?;
                }
            }
            out.push(th[i].d()?.sub(&rhs)?);
        }
        Ok(out)
    }

    /// True when the back substitution vanishes identically.
    pub fn verify(&self, cf: &AdaptedCoframe) -> Result<bool> {
        Ok(self.back_substitute(cf)?.iter().all(Form::is_zero))
    }
}

/// Solves the structure equations for `Ω_1..Ω_7`; free unknowns are set to zero.
pub fn solve_connection(cf: &AdaptedCoframe) -> Result<ConnectionSolution> {
    let c = structure_functions(cf)?;
    let pairs = pairs();
    let mut rhs = Vec::with_capacity(50);
    for (i, row) in c.iter().enumerate() {
        for (p, (a, b)) in pairs.iter().enumerate() {
            let mut v = row[p].clone();
            if FIXED.contains(&(i + 1, a + 1, b + 1)) {
                v = &v - &Scalar::one();
            }
            rhs.push(v);
        }
    }
    let sol = linalg::solve(&structure_matrix(), &rhs)?;
    let omega = (0..7)
        .map(|k| (0..5).map(|j| sol.x[unknown(k, j)].clone()).collect())
        .collect();
    let residual = sol
        .residual
        .into_iter()
        .map(|(row, value)| ResidualEntry { row, value })
        .collect();
    Ok(ConnectionSolution { omega, residual })
}

/// Symmetric 2-tensor in the coordinate basis.
#[derive(Clone, Debug)]
pub struct Metric {
    chart: Arc<Chart>,
    g: Vec<Vec<Scalar>>,
}

impl Metric {
    pub fn zero(chart: &Arc<Chart>) -> Metric {
        let n = chart.dim();
        Metric {
            chart: chart.clone(),
            g: vec![vec![Scalar::zero(); n]; n],
        }
    }

    pub fn from_components(chart: &Arc<Chart>, g: Vec<Vec<Scalar>>) -> Result<Metric> {
        let n = chart.dim();
        if g.len() != n || g.iter().any(|r| r.len() != n) {
            return Err(Error::ChartMismatch(format!("{}x? matrix", g.len()), chart.name().into()));
        }
        for i in 0..n {
            for j in 0..i {
                if g[i][j] != g[j][i] {
                    return Err(Error::Internal(format!("component ({i},{j}) is not symmetric")));
                }
            }
        }
        Ok(Metric {
            chart: chart.clone(),
            g,
        })
    }

    /// Symmetric product `a ⊙ b = ½(a ⊗ b + b ⊗ a)`.
    pub fn sym(a: &Form, b: &Form) -> Result<Metric> {
        if a.chart().name() != b.chart().name() {
            return Err(Error::ChartMismatch(a.chart().name().into(), b.chart().name().into()));
        }
        let (ca, cb) = (a.coefficients(), b.coefficients());
        let n = ca.len();
        let half = Scalar::rational(1, 2);
        let g = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| &half * &(&(&ca[i] * &cb[j]) + &(&ca[j] * &cb[i])))
                    .collect()
            })
            .collect();
        Ok(Metric {
            chart: a.chart().clone(),
            g,
        })
    }

    pub fn square(a: &Form) -> Result<Metric> {
        Metric::sym(a, a)
    }

    pub fn chart(&self) -> &Arc<Chart> {
        &self.chart
    }

    pub fn components(&self) -> &[Vec<Scalar>] {
        &self.g
    }

    pub fn add(&self, other: &Metric) -> Metric {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Metric) -> Metric {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Metric, f: impl Fn(&Scalar, &Scalar) -> Scalar) -> Metric {
        let g = self
            .g
            .iter()
            .zip(&other.g)
            .map(|(r, s)| r.iter().zip(s).map(|(a, b)| f(a, b)).collect())
            .collect();
        Metric {
            chart: self.chart.clone(),
            g,
        }
    }

    pub fn scale(&self, s: &Scalar) -> Metric {
        Metric {
            chart: self.chart.clone(),
            g: self
                .g
                .iter()
                .map(|r| r.iter().map(|a| a * s).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.g.iter().flatten().all(Scalar::is_zero)
    }

    /// `g(X, Y)`.
    pub fn apply(&self, x: &VectorField, y: &VectorField) -> Scalar {
        let (a, b) = (x.components(), y.components());
        let mut out = Scalar::zero();
        for (i, row) in self.g.iter().enumerate() {
            if a[i].is_zero() {
                continue;
            }
            for (j, gij) in row.iter().enumerate() {
                if !gij.is_zero() && !b[j].is_zero() {
                    out = &out + &(&(&a[i] * gij) * &b[j]);
                }
            }
        }
        out
    }

    pub fn eval(&self, point: &Point) -> Result<Vec<Vec<f64>>> {
        self.g
            .iter()
            .map(|r| r.iter().map(|s| s.eval(point)).collect())
            .collect()
    }

    pub fn subst(&self, b: &crate::expr::Bindings) -> Result<Metric> {
        let g = self
            .g
            .iter()
            .map(|r| r.iter().map(|s| s.subst(b)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        Ok(Metric {
            chart: self.chart.clone(),
            g,
        })
    }

    /// Numbers of positive and negative eigenvalues at a point.
    pub fn signature(&self, point: &Point) -> Result<(usize, usize)> {
        let m = self.eval(point)?;
        let n = m.len();
        let a = nalgebra::DMatrix::from_fn(n, n, |i, j| m[i][j]);
        let ev = a.symmetric_eigenvalues();
        let scale = ev.iter().fold(0.0f64, |s, v| s.max(v.abs()));
        let pos = ev.iter().filter(|v| **v > 1e-12 * scale).count();
        let neg = ev.iter().filter(|v| **v < -1e-12 * scale).count();
        Ok((pos, neg))
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords = self.chart.coords();
        let mut first = true;
        for i in 0..self.g.len() {
            for j in i..self.g.len() {
                let c = &self.g[i][j];
                if c.is_zero() {
                    continue;
                }
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                let w = if i == j { c.clone() } else { c * &Scalar::integer(2) };
                write!(f, "({w})*d({})*d({})", coords[i], coords[j])?;
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// `2 θ1⊙θ5 − 2 θ2⊙θ4 + (4/3) θ3⊙θ3`.
pub fn nurowski_metric(cf: &AdaptedCoframe) -> Result<Metric> {
    let t = cf.theta();
    Ok(Metric::sym(&t[0], &t[4])?
        .scale(&Scalar::integer(2))
        .sub(&Metric::sym(&t[1], &t[3])?.scale(&Scalar::integer(2)))
        .add(&Metric::square(&t[2])?.scale(&Scalar::rational(4, 3))))
}

/// Componentwise exact equality of two quadratic forms.
pub fn quadratic_identity_check(lhs: &Metric, rhs: &Metric) -> Result<bool> {
    if lhs.chart.name() != rhs.chart.name() {
        return Err(Error::ChartMismatch(lhs.chart.name().into(), rhs.chart.name().into()));
    }
    Ok(lhs.sub(rhs).is_zero())
}

/// Dense rank-4 tensor stored row-major.
#[derive(Clone, Debug, Serialize)]
pub struct Tensor4(pub Vec<Vec<Vec<Vec<f64>>>>);

impl Tensor4 {
    fn zeros(n: usize) -> Tensor4 {
        Tensor4(vec![vec![vec![vec![0.0; n]; n]; n]; n])
    }

    pub fn norm(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn max_gap(&self, other: &Tensor4) -> f64 {
        self.0
            .iter()
            .flatten()
            .flatten()
            .flatten()
            .zip(other.0.iter().flatten().flatten().flatten())
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }
}

/// Curvature at one point.
#[derive(Clone, Debug, Serialize)]
pub struct Curvature {
    /// `Γ^a_bc` as `[a][b][c]`.
    pub christoffel: Vec<Vec<Vec<f64>>>,
    /// `R^a_bcd` as `[a][b][c][d]`.
    pub riemann: Tensor4,
    /// `R_abcd`, first index lowered.
    pub riemann_lower: Tensor4,
    pub ricci: Vec<Vec<f64>>,
    pub scalar: f64,
    /// `C_abcd`, all indices down.
    pub weyl: Tensor4,
    pub riemann_norm: f64,
    pub weyl_norm: f64,
}

impl Curvature {
    /// `‖C‖∞ / ‖Riem‖∞` using the lowered tensors.
    pub fn weyl_ratio(&self) -> f64 {
        let r = self.riemann_lower.norm();
        if r == 0.0 {
            self.weyl.norm()
        } else {
            self.weyl.norm() / r
        }
    }

    /// Largest violation of the first Bianchi identity relative to `‖Riem‖∞`.
    pub fn bianchi_defect(&self) -> f64 {
        let r = &self.riemann_lower.0;
        let n = r.len();
        let mut m: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        m = m.max((r[a][b][c][d] + r[a][c][d][b] + r[a][d][b][c]).abs());
                    }
                }
            }
        }
        m / self.riemann_lower.norm().max(f64::MIN_POSITIVE)
    }

    /// Largest violation of `R_abcd = −R_bacd = R_cdab` relative to `‖Riem‖∞`.
    pub fn pair_symmetry_defect(&self) -> f64 {
        let r = &self.riemann_lower.0;
        let n = r.len();
        let mut m: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        m = m.max((r[a][b][c][d] + r[b][a][c][d]).abs());
                        m = m.max((r[a][b][c][d] - r[c][d][a][b]).abs());
                    }
                }
            }
        }
        m / self.riemann_lower.norm().max(f64::MIN_POSITIVE)
    }

    /// Largest trace `g^ac C_abcd` relative to `‖Riem‖∞`.
    pub fn weyl_trace_defect(&self, ginv: &[Vec<f64>]) -> f64 {
        let w = &self.weyl.0;
        let n = w.len();
        let mut m: f64 = 0.0;
        for b in 0..n {
            for d in 0..n {
                let mut t = 0.0;
                for a in 0..n {
                    for c in 0..n {
                        t += ginv[a][c] * w[a][b][c][d];
                    }
                }
                m = m.max(t.abs());
            }
        }
        m / self.riemann_lower.norm().max(f64::MIN_POSITIVE)
    }
}

fn invert(g: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    let n = g.len();
    let inv = linalg::numeric_inverse(g).ok_or(Error::SingularMetric)?;
    // reject near-singular matrices
    let cond = g.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
        * inv.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if !cond.is_finite() || cond > 1e12 * n as f64 {
        return Err(Error::SingularMetric);
    }
    Ok(inv)
}

type D3 = Vec<Vec<Vec<f64>>>;

/// Christoffel symbols from `g^-1` and `∂_c g_ab` given as `dg[c][a][b]`.
fn christoffel(ginv: &[Vec<f64>], dg: &D3) -> D3 {
    let n = ginv.len();
    let mut gam = vec![vec![vec![0.0; n]; n]; n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut s = 0.0;
                for d in 0..n {
                    s += ginv[a][d] * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                }
                gam[a][b][c] = 0.5 * s;
            }
        }
    }
    gam
}

/// Assembles curvature from `Γ` and `∂_e Γ^a_bc` given as `dgam[e][a][b][c]`.
fn assemble(g: &[Vec<f64>], ginv: &[Vec<f64>], gam: D3, dgam: &[D3]) -> Curvature {
    let n = g.len();
    let mut riem = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let mut v = dgam[c][a][d][b] - dgam[d][a][c][b];
                    for e in 0..n {
                        v += gam[a][c][e] * gam[e][d][b] - gam[a][d][e] * gam[e][c][b];
                    }
                    riem.0[a][b][c][d] = v;
                }
            }
        }
    }
    let mut low = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    low.0[a][b][c][d] = (0..n).map(|e| g[a][e] * riem.0[e][b][c][d]).sum();
                }
            }
        }
    }
    let mut ric = vec![vec![0.0; n]; n];
    for b in 0..n {
        for d in 0..n {
            ric[b][d] = (0..n).map(|a| riem.0[a][b][a][d]).sum();
        }
    }
    let mut scalar = 0.0;
    for b in 0..n {
        for d in 0..n {
            scalar += ginv[b][d] * ric[b][d];
        }
    }
    let nf = n as f64;
    let p: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (ric[i][j] - scalar * g[i][j] / (2.0 * (nf - 1.0))) / (nf - 2.0))
                .collect()
        })
        .collect();
    let mut weyl = Tensor4::zeros(n);
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                for d in 0..n {
                    let kn = p[a][c] * g[b][d] - p[a][d] * g[b][c] + p[b][d] * g[a][c]
                        - p[b][c] * g[a][d];
                    weyl.0[a][b][c][d] = low.0[a][b][c][d] - kn;
                }
            }
        }
    }
    let riemann_norm = low.norm();
    let weyl_norm = weyl.norm();
    Curvature {
        christoffel: gam,
        riemann: riem,
        riemann_lower: low,
        ricci: ric,
        scalar,
        weyl,
        riemann_norm,
        weyl_norm,
    }
}

/// Metric with exact first and second derivatives, evaluated numerically.
pub struct CurvatureModel {
    metric: Metric,
    dg: Vec<Vec<Vec<Scalar>>>,
    ddg: Vec<Vec<Vec<Vec<Scalar>>>>,
}

impl CurvatureModel {
    pub fn new(metric: &Metric) -> Result<CurvatureModel> {
        let coords = metric.chart.coords().to_vec();
        let n = coords.len();
        let g = &metric.g;
        let dg = coords
            .iter()
            .map(|c| {
                (0..n)
                    .map(|a| (0..n).map(|b| g[a.min(b)][a.max(b)].diff(c)).collect())
                    .collect::<Result<Vec<Vec<_>>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let mut ddg = vec![vec![vec![vec![Scalar::zero(); n]; n]; n]; n];
        for e in 0..n {
            for c in e..n {
                for a in 0..n {
                    for b in a..n {
                        let v = dg[c][a][b].diff(&coords[e])?;
                        ddg[e][c][a][b] = v.clone();
                        ddg[e][c][b][a] = v.clone();
                        ddg[c][e][a][b] = v.clone();
                        ddg[c][e][b][a] = v;
                    }
                }
            }
        }
        Ok(CurvatureModel {
            metric: metric.clone(),
            dg,
            ddg,
        })
    }

    pub fn metric(&self) -> &Metric {
        &self.metric
    }

    /// Curvature from exact derivatives.
    pub fn at(&self, point: &Point) -> Result<Curvature> {
        let g = self.metric.eval(point)?;
        let n = g.len();
        let ginv = invert(&g)?;
        let ev3 = |t: &Vec<Vec<Vec<Scalar>>>| -> Result<D3> {
            t.iter()
                .map(|m| {
                    m.iter()
                        .map(|r| r.iter().map(|s| s.eval(point)).collect())
                        .collect()
                })
                .collect()
        };
        let dg = ev3(&self.dg)?;
        let ddg: Vec<D3> = self.ddg.iter().map(ev3).collect::<Result<_>>()?;
        let gam = christoffel(&ginv, &dg);
        // Γ_dbc lowered and its derivatives
        let mut dgam = vec![vec![vec![vec![0.0; n]; n]; n]; n];
        for e in 0..n {
            // ∂_e g^{ad} = −g^{ai} ∂_e g_ij g^{jd}
            let mut dginv = vec![vec![0.0; n]; n];
            for a in 0..n {
                for d in 0..n {
                    let mut s = 0.0;
                    for i in 0..n {
                        for j in 0..n {
                            s += ginv[a][i] * dg[e][i][j] * ginv[j][d];
                        }
                    }
                    dginv[a][d] = -s;
                }
            }
            for a in 0..n {
                for b in 0..n {
                    for c in 0..n {
                        let mut s = 0.0;
                        for d in 0..n {
                            let low = 0.5 * (dg[b][d][c] + dg[c][d][b] - dg[d][b][c]);
                            let dlow =
                                0.5 * (ddg[e][b][d][c] + ddg[e][c][d][b] - ddg[e][d][b][c]);
                            s += dginv[a][d] * low + ginv[a][d] * dlow;
                        }
                        dgam[e][a][b][c] = s;
                    }
                }
            }
        }
        Ok(assemble(&g, &ginv, gam, &dgam))
    }

    pub fn inverse_metric(&self, point: &Point) -> Result<Vec<Vec<f64>>> {
        invert(&self.metric.eval(point)?)
    }
}

/// Curvature from symbolic derivatives of `g`, evaluated at `point`.
pub fn curvature_numeric(g: &Metric, point: &Point) -> Result<Curvature> {
    CurvatureModel::new(g)?.at(point)
}

/// Independent path: Christoffels from five-point differences of `g` with step `h`,
/// their derivatives from a five-point stencil with step [`FD_OUTER_STEP`].
pub fn curvature_finite_difference(g: &Metric, point: &Point, h: f64) -> Result<Curvature> {
    let coords = g.chart.coords().to_vec();
    let n = coords.len();
    let shifted = |p: &Point, i: usize, t: f64| {
        let mut q = p.clone();
        *q.get_mut(&coords[i]).expect("point binds coordinate") += t;
        q
    };
    let gamma_at = |p: &Point| -> Result<D3> {
        let gm = g.eval(p)?;
        let ginv = invert(&gm)?;
        let mut dg = vec![vec![vec![0.0; n]; n]; n];
        for c in 0..n {
            let p2 = g.eval(&shifted(p, c, 2.0 * h))?;
            let p1 = g.eval(&shifted(p, c, h))?;
            let m1 = g.eval(&shifted(p, c, -h))?;
            let m2 = g.eval(&shifted(p, c, -2.0 * h))?;
            for a in 0..n {
                for b in 0..n {
                    dg[c][a][b] =
                        (-p2[a][b] + 8.0 * p1[a][b] - 8.0 * m1[a][b] + m2[a][b]) / (12.0 * h);
                }
            }
        }
        Ok(christoffel(&ginv, &dg))
    };
    if coords.iter().any(|c| !point.contains_key(c)) {
        return Err(Error::UnknownSymbol("point misses a coordinate".into()));
    }
    let gm = g.eval(point)?;
    let ginv = invert(&gm)?;
    let gam = gamma_at(point)?;
    let k = FD_OUTER_STEP;
    let mut dgam = Vec::with_capacity(n);
    for e in 0..n {
        let p2 = gamma_at(&shifted(point, e, 2.0 * k))?;
        let p1 = gamma_at(&shifted(point, e, k))?;
        let m1 = gamma_at(&shifted(point, e, -k))?;
        let m2 = gamma_at(&shifted(point, e, -2.0 * k))?;
        let mut d = vec![vec![vec![0.0; n]; n]; n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    d[a][b][c] = (-p2[a][b][c] + 8.0 * p1[a][b][c] - 8.0 * m1[a][b][c]
                        + m2[a][b][c])
                        / (12.0 * k);
                }
            }
        }
        dgam.push(d);
    }
    Ok(assemble(&gm, &ginv, gam, &dgam))
}

/// Per-point record of a flatness certificate.
#[derive(Clone, Debug, Serialize)]
pub struct WeylSample {
    pub point: Vec<(String, f64)>,
    pub weyl_ratio: f64,
    pub fd_weyl_ratio: f64,
    /// `‖C_exact − C_fd‖∞ / ‖Riem‖∞`.
    pub path_gap: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct WeylVerdict {
    pub flat: bool,
    pub tolerance: f64,
    pub max_ratio: f64,
    pub min_ratio: f64,
    pub samples: Vec<WeylSample>,
}

/// Step of the finite-difference Christoffels on the oracle path.
pub const FD_STEP: f64 = 1e-3;
/// Step of the five-point stencil differentiating those Christoffels.
pub const FD_OUTER_STEP: f64 = 2e-3;
/// Maximal relative gap between the exact-derivative and finite-difference paths.
pub const PATH_AGREEMENT: f64 = 1e-4;

/// Samples `n_points` admissible points and decides conformal flatness by
/// `‖C‖∞ / ‖Riem‖∞ < tol` at every point, cross-checked against finite differences.
pub fn weyl_flat_certificate(
    g: &Metric,
    fixed: &Point,
    extra: &[Guard],
    n_points: usize,
    tol: f64,
    seed: u64,
) -> Result<WeylVerdict> {
    if n_points < 5 {
        return Err(Error::Internal("at least five sample points are required".into()));
    }
    let model = CurvatureModel::new(g)?;
    let mut sampler = Sampler::new(seed);
    let mut samples = Vec::with_capacity(n_points);
    let mut tries = 0;
    while samples.len() < n_points {
        tries += 1;
        if tries > 50 * n_points {
            return Err(Error::GuardViolation("no admissible curvature points".into()));
        }
        let p = sampler.point(g.chart(), fixed, extra)?;
        let exact = match model.at(&p) {
            Ok(c) => c,
            Err(Error::SingularMetric) | Err(Error::DomainViolation(_)) => continue,
            Err(e) => return Err(e),
        };
        let fd = curvature_finite_difference(g, &p, FD_STEP)?;
        let scale = exact.riemann_lower.norm().max(f64::MIN_POSITIVE);
        let gap = exact.weyl.max_gap(&fd.weyl) / scale;
        if gap > PATH_AGREEMENT {
            return Err(Error::OracleDisagreement(gap));
        }
        samples.push(WeylSample {
            point: g
                .chart()
                .coords()
                .iter()
                .map(|c| (c.name().to_string(), p[c]))
                .collect(),
            weyl_ratio: exact.weyl_ratio(),
            fd_weyl_ratio: fd.weyl_ratio(),
            path_gap: gap,
        });
    }
    let max_ratio = samples.iter().fold(0.0f64, |m, s| m.max(s.weyl_ratio));
    let min_ratio = samples.iter().fold(f64::INFINITY, |m, s| m.min(s.weyl_ratio));
    Ok(WeylVerdict {
        flat: max_ratio < tol,
        tolerance: tol,
        max_ratio,
        min_ratio,
        samples,
    })
}
