//! Dense-tableau simplex over exact rationals.
//!
//! Solves `maximize c·x subject to A x <= b, x >= 0` for right-hand sides of
//! any sign (two phases; rows with `b_i < 0` get a surplus and an artificial
//! variable). Entering and leaving variables follow Bland's rule, so the
//! method terminates on degenerate problems.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn q_ratio(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

#[derive(Clone, Debug, PartialEq)]
pub struct LpOutcome {
    pub value: Q,
    /// Optimal primal point.
    pub x: Vec<Q>,
    /// Optimal dual prices, one per constraint row (all `>= 0`).
    pub duals: Vec<Q>,
    pub pivots: usize,
}

struct Tableau {
    rows: Vec<Vec<Q>>,
    rhs: Vec<Q>,
    obj: Vec<Q>,
    obj_rhs: Q,
    basis: Vec<usize>,
    pivots: usize,
}

impl Tableau {
    fn pivot(&mut self, r: usize, col: usize) {
        let p = self.rows[r][col].clone();
        if !p.is_one() {
            let inv = p.recip();
            for v in self.rows[r].iter_mut().filter(|v| !v.is_zero()) {
                *v *= &inv;
            }
            self.rhs[r] *= &inv;
        }
        let pivot_row = std::mem::take(&mut self.rows[r]);
        let nz: Vec<usize> = (0..pivot_row.len()).filter(|&j| !pivot_row[j].is_zero()).collect();
        let prhs = self.rhs[r].clone();
        for i in 0..self.rows.len() {
            if i == r || self.rows[i][col].is_zero() {
                continue;
            }
            let factor = self.rows[i][col].clone();
            let row = &mut self.rows[i];
            for &j in &nz {
                row[j] -= &factor * &pivot_row[j];
            }
            self.rhs[i] -= &factor * &prhs;
        }
        if !self.obj[col].is_zero() {
            let factor = self.obj[col].clone();
            for &j in &nz {
                self.obj[j] -= &factor * &pivot_row[j];
            }
            self.obj_rhs -= &factor * &prhs;
        }
        self.rows[r] = pivot_row;
        self.basis[r] = col;
        self.pivots += 1;
    }

    /// Runs Bland's rule over columns `< limit`. Returns false when unbounded.
    fn optimize(&mut self, limit: usize) -> bool {
        loop {
            let Some(col) = (0..limit).find(|&j| self.obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Q)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &best {
                    None => true,
                    Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                };
                if better {
                    best = Some((i, ratio));
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, col),
                None => return false,
            }
        }
    }
}

/// `maximize c·x` subject to `a x <= b`, `x >= 0`.
pub fn maximize(c: &[Q], a: &[Vec<Q>], b: &[Q]) -> Result<LpOutcome> {
    let m = a.len();
    let nv = c.len();
    if b.len() != m || a.iter().any(|row| row.len() != nv) {
        return Err(Error::InvalidParameters("inconsistent LP dimensions".into()));
    }
    let flipped: Vec<usize> = (0..m).filter(|&i| b[i].is_negative()).collect();
    let n_art = flipped.len();
    let width = nv + m + n_art;
    let mut t = Tableau {
        rows: Vec::with_capacity(m),
        rhs: Vec::with_capacity(m),
        obj: vec![Q::zero(); width],
        obj_rhs: Q::zero(),
        basis: Vec::with_capacity(m),
        pivots: 0,
    };
    let mut art = 0;
    for i in 0..m {
        let mut row = vec![Q::zero(); width];
        if b[i].is_negative() {
            for j in 0..nv {
                row[j] = -a[i][j].clone();
            }
            row[nv + i] = -Q::one();
            row[nv + m + art] = Q::one();
            t.basis.push(nv + m + art);
            t.rhs.push(-b[i].clone());
            art += 1;
        } else {
            row[..nv].clone_from_slice(&a[i]);
            row[nv + i] = Q::one();
            t.basis.push(nv + i);
            t.rhs.push(b[i].clone());
        }
        t.rows.push(row);
    }

    if n_art > 0 {
        // phase 1: maximize -(sum of artificials)
        for k in 0..n_art {
            t.obj[nv + m + k] = Q::one();
        }
        for &i in &flipped {
            for j in 0..width {
                if !t.rows[i][j].is_zero() {
                    let v = t.rows[i][j].clone();
                    t.obj[j] -= v;
                }
            }
            let r = t.rhs[i].clone();
            t.obj_rhs -= r;
        }
        t.optimize(width);
        if t.obj_rhs.is_negative() {
            return Err(Error::Infeasible("linear program has no feasible point".into()));
        }
        for r in 0..m {
            if t.basis[r] >= nv + m {
                if let Some(col) = (0..nv + m).find(|&j| !t.rows[r][j].is_zero()) {
                    t.pivot(r, col);
                }
            }
        }
        t.obj = vec![Q::zero(); width];
        t.obj_rhs = Q::zero();
    }

    for j in 0..nv {
        t.obj[j] = -c[j].clone();
    }
    for r in 0..m {
        let bcol = t.basis[r];
        if bcol < nv && !t.obj[bcol].is_zero() {
            let factor = t.obj[bcol].clone();
            for j in 0..width {
                if !t.rows[r][j].is_zero() {
                    let d = &factor * &t.rows[r][j];
                    t.obj[j] -= d;
                }
            }
            let d = &factor * &t.rhs[r];
            t.obj_rhs -= d;
        }
    }
    if !t.optimize(nv + m) {
        return Err(Error::Infeasible("linear program is unbounded".into()));
    }

    let mut x = vec![Q::zero(); nv];
    for r in 0..m {
        if t.basis[r] < nv {
            x[t.basis[r]] = t.rhs[r].clone();
        }
    }
    let duals = (0..m).map(|i| t.obj[nv + i].clone()).collect();
    Ok(LpOutcome {
        value: t.obj_rhs,
        x,
        duals,
        pivots: t.pivots,
    })
}

/// Packing LP `max Σμ_r` with `Σ_{r ∋ i} μ_r <= 1` for every column `i`.
/// Returns `(value, μ, λ)` where `λ` is an optimal covering solution read off
/// the dual prices.
pub fn solve_packing(n_cols: usize, rows: &[Vec<usize>]) -> Result<(Q, Vec<Q>, Vec<Q>)> {
    if rows.is_empty() {
        return Ok((Q::zero(), Vec::new(), vec![Q::zero(); n_cols]));
    }
    let mut a = vec![vec![Q::zero(); rows.len()]; n_cols];
    for (r, row) in rows.iter().enumerate() {
        for &i in row {
            a[i][r] = Q::one();
        }
    }
    let out = maximize(&vec![Q::one(); rows.len()], &a, &vec![Q::one(); n_cols])?;
    Ok((out.value, out.x, out.duals))
}

/// Covering LP `min Σλ_i` with `Σ_{i ∈ r} λ_i >= 1` for every row, solved in
/// its own form by the two-phase method. Returns `(value, λ, μ)`.
pub fn solve_covering(n_cols: usize, rows: &[Vec<usize>]) -> Result<(Q, Vec<Q>, Vec<Q>)> {
    if rows.is_empty() {
        return Ok((Q::zero(), vec![Q::zero(); n_cols], Vec::new()));
    }
    let a: Vec<Vec<Q>> = rows
        .iter()
        .map(|row| {
            let mut v = vec![Q::zero(); n_cols];
            for &i in row {
                v[i] = -Q::one();
            }
            v
        })
        .collect();
    let out = maximize(&vec![-Q::one(); n_cols], &a, &vec![-Q::one(); rows.len()])?;
    Ok((-out.value, out.x, out.duals))
}
