//! Exact elimination over scalars and numeric rank.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::expr::Scalar;

/// Reduced row echelon form. `pivots` lists `(row, column)` in pivot order;
/// pivot entries are 1 and pivot columns are zero elsewhere.
#[derive(Clone, Debug)]
pub struct Echelon {
    pub rows: Vec<Vec<Scalar>>,
    pub pivots: Vec<(usize, usize)>,
}

impl Echelon {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }
}

fn score(s: &Scalar) -> (bool, usize) {
    (s.as_rational().is_none(), s.complexity())
}

/// Gauss-Jordan elimination restricted to the first `cols` columns.
///
/// Pivots are chosen globally: rational constants first, then the entry of least
/// size, ties broken by leftmost column and then topmost row.
fn eliminate(rows: &mut [Vec<Scalar>], cols: usize) -> Result<Vec<(usize, usize)>> {
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    let mut used_row = vec![false; rows.len()];
    let mut used_col = vec![false; cols];
    loop {
        let mut best: Option<((bool, usize), usize, usize)> = None;
        for c in (0..cols).filter(|c| !used_col[*c]) {
            for (r, row) in rows.iter().enumerate() {
                if used_row[r] || row[c].is_zero() {
                    continue;
                }
                let s = score(&row[c]);
                if best.as_ref().is_none_or(|(b, _, _)| s < *b) {
                    best = Some((s, r, c));
                }
            }
        }
        let Some((_, r, c)) = best else {
            return Ok(pivots);
        };
        let p = rows[r][c].clone();
        if !p.is_one() {
            let inv = p.inv()?;
            for v in rows[r].iter_mut() {
                if !v.is_zero() {
                    *v = &*v * &inv;
                }
            }
        }
        let prow = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, pv) in row.iter_mut().zip(&prow) {
                if !pv.is_zero() {
                    *v = &*v - &(&f * pv);
                }
            }
        }
        used_row[r] = true;
        used_col[c] = true;
        pivots.push((r, c));
    }
}

pub fn rref(mut rows: Vec<Vec<Scalar>>) -> Result<Echelon> {
    let cols = rows.first().map_or(0, Vec::len);
    let pivots = eliminate(&mut rows, cols)?;
    Ok(Echelon { rows, pivots })
}

/// Elimination with pivots restricted to the first `cols` columns.
pub fn rref_partial(mut rows: Vec<Vec<Scalar>>, cols: usize) -> Result<Echelon> {
    let pivots = eliminate(&mut rows, cols)?;
    Ok(Echelon { rows, pivots })
}

pub fn rank(rows: Vec<Vec<Scalar>>) -> Result<usize> {
    Ok(rref(rows)?.rank())
}

/// Solution of `A x = b` with free unknowns set to zero.
#[derive(Clone, Debug)]
pub struct Solution {
    pub x: Vec<Scalar>,
    /// Rows with no pivot, with their reduced right-hand sides.
    pub residual: Vec<(usize, Scalar)>,
}

impl Solution {
    pub fn is_consistent(&self) -> bool {
        self.residual.iter().all(|(_, r)| r.is_zero())
    }
}

pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Result<Solution> {
    let n = a.first().map_or(0, Vec::len);
    let mut rows: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, v)| {
            let mut r = row.clone();
            r.push(v.clone());
            r
        })
        .collect();
    let pivots = eliminate(&mut rows, n)?;
    let mut x = vec![Scalar::zero(); n];
    for (r, c) in &pivots {
        x[*c] = rows[*r][n].clone();
    }
    let residual = (0..rows.len())
        .filter(|r| pivots.iter().all(|(pr, _)| pr != r))
        .map(|r| (r, rows[r][n].clone()))
        .collect();
    Ok(Solution { x, residual })
}

/// Inverse of a square matrix.
pub fn inverse(m: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
    let n = m.len();
    let mut rows: Vec<Vec<Scalar>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { Scalar::one() } else { Scalar::zero() }));
            r
        })
        .collect();
    let pivots = eliminate(&mut rows, n)?;
    if pivots.len() < n {
        return Err(Error::DependentForms {
            rank: pivots.len(),
            count: n,
        });
    }
    let mut out = vec![Vec::new(); n];
    for (r, c) in pivots {
        out[c] = rows[r][n..].to_vec();
    }
    Ok(out)
}

pub fn det(m: &[Vec<Scalar>]) -> Scalar {
    match m.len() {
        0 => Scalar::one(),
        1 => m[0][0].clone(),
        2 => &(&m[0][0] * &m[1][1]) - &(&m[0][1] * &m[1][0]),
        n => {
            let mut acc = Scalar::zero();
            for j in 0..n {
                if m[0][j].is_zero() {
                    continue;
                }
                let minor: Vec<Vec<Scalar>> = m[1..]
                    .iter()
                    .map(|row| {
                        row.iter()
                            .enumerate()
                            .filter(|(k, _)| *k != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let t = &m[0][j] * &det(&minor);
                acc = if j % 2 == 0 { &acc + &t } else { &acc - &t };
            }
            acc
        }
    }
}

/// Numeric rank with singular values below `1e-9 * max` treated as zero.
pub fn numeric_rank(rows: &[Vec<f64>]) -> usize {
    let nr = rows.len();
    let nc = rows.first().map_or(0, Vec::len);
    if nr == 0 || nc == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(nr, nc, |i, j| rows[i][j]);
    let sv = m.singular_values();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    if max == 0.0 {
        return 0;
    }
    sv.iter().filter(|s| **s > 1e-9 * max).count()
}

/// Inverse of a dense float matrix.
pub fn numeric_inverse(m: &[Vec<f64>]) -> Option<Vec<Vec<f64>>> {
    let n = m.len();
    let a = DMatrix::from_fn(n, n, |i, j| m[i][j]);
    let inv = a.try_inverse()?;
    Some((0..n).map(|i| (0..n).map(|j| inv[(i, j)]).collect()).collect())
}
