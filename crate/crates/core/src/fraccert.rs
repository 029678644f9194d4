//! Fractional certificate complexity: the covering LP over disagreement sets
//! and its packing dual, solved exactly.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cube::mask_positions;
use crate::error::{Error, Result};
use crate::function::{lattice_perimeter, FunctionObject, InputPoint, Kind};
use crate::lp::{self, Q};
use crate::measures::{disagreement_rows, minimal_shifts};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Covering tableaus with more entries than this are solved through the
/// packing form instead (the optimum and both vectors are the same).
pub const PRIMAL_TABLEAU_CAP: usize = 1 << 18;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CertificateLP {
    pub x: InputPoint,
    pub value: bool,
    /// Minimal disagreement sets as masks (position `i` at bit `i - 1`).
    pub rows: Vec<u64>,
}

impl CertificateLP {
    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn row_positions(&self) -> Vec<Vec<usize>> {
        self.rows.iter().map(|&m| mask_positions(m)).collect()
    }

    fn zero_based_rows(&self) -> Vec<Vec<usize>> {
        self.rows
            .iter()
            .map(|&m| mask_positions(m).into_iter().map(|p| p - 1).collect())
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LPSolution {
    /// Optimal covering weights, one per position.
    pub lambda: Vec<Q>,
    /// Optimal packing weights, one per row.
    pub mu: Vec<Q>,
    pub value: Q,
}

impl LPSolution {
    /// Checks primal and dual feasibility and equality of both objectives.
    pub fn verify(&self, lp: &CertificateLP) -> Result<()> {
        let n = lp.n();
        if self.lambda.len() != n || self.mu.len() != lp.rows.len() {
            return Err(Error::Consistency("solution dimensions do not match the LP".into()));
        }
        if self.lambda.iter().chain(&self.mu).any(|v| v.is_negative()) {
            return Err(Error::Consistency("negative LP weight".into()));
        }
        for &row in &lp.rows {
            let load: Q = mask_positions(row).iter().map(|&p| &self.lambda[p - 1]).sum();
            if load < Q::one() {
                return Err(Error::Infeasible(format!(
                    "row {:?} has load {load} < 1",
                    mask_positions(row)
                )));
            }
        }
        for i in 0..n {
            let load: Q = lp
                .rows
                .iter()
                .zip(&self.mu)
                .filter(|(r, _)| *r >> i & 1 == 1)
                .map(|(_, m)| m)
                .sum();
            if load > Q::one() {
                return Err(Error::Infeasible(format!("column {} has load {load} > 1", i + 1)));
            }
        }
        let primal: Q = self.lambda.iter().sum();
        let dual: Q = self.mu.iter().sum();
        if primal != self.value || dual != self.value {
            return Err(Error::Consistency(format!(
                "objectives differ: primal {primal}, dual {dual}, reported {}",
                self.value
            )));
        }
        Ok(())
    }
}

pub fn build_cert_lp(f: &FunctionObject, x: &InputPoint) -> Result<CertificateLP> {
    let rows = disagreement_rows(f, x)?;
    Ok(CertificateLP {
        x: x.clone(),
        value: rows.value,
        rows: rows.masks,
    })
}

/// Solves the covering LP `min Σλ` subject to every row having load at least 1.
pub fn solve_primal(lp: &CertificateLP) -> Result<LPSolution> {
    let n = lp.n();
    let r = lp.rows.len();
    if r * (n + r) > PRIMAL_TABLEAU_CAP {
        return solve_dual(lp);
    }
    let (value, lambda, mu) = lp::solve_covering(n, &lp.zero_based_rows())?;
    Ok(LPSolution { lambda, mu, value })
}

/// Solves the packing LP `max Σμ` subject to every column having load at most 1.
pub fn solve_dual(lp: &CertificateLP) -> Result<LPSolution> {
    let (value, mu, lambda) = lp::solve_packing(lp.n(), &lp.zero_based_rows())?;
    Ok(LPSolution { lambda, mu, value })
}

/// `FC^X(f)` with a verified optimal primal/dual pair.
pub fn fractional_certificate(f: &FunctionObject, x: &InputPoint) -> Result<(CertificateLP, LPSolution)> {
    let lp = build_cert_lp(f, x)?;
    let sol = solve_dual(&lp)?;
    sol.verify(&lp)?;
    Ok((lp, sol))
}

/// `FC` of a symmetric function at weight `w` through the two-variable LP in
/// `(λ₀, λ₁)`, the common weight on 0-positions and on 1-positions.
///
/// Only the minimal displacement profiles are kept as constraints: a profile
/// flipping `a` zeros and `b` ones is sensitive iff `v[w + a - b] != v[w]`, so
/// every sensitive profile dominates a pure shift with the same net change.
pub fn fc_symmetric(f: &FunctionObject, w: usize) -> Result<Q> {
    let profile = f.profile().ok_or(Error::NotSymmetric)?;
    let n = f.n();
    if w > n {
        return Err(Error::InvalidParameters(format!("weight {w} exceeds n = {n}")));
    }
    let (up, down) = minimal_shifts(profile, w);
    let mut a = Vec::new();
    let mut b = Vec::new();
    if let Some(d) = up {
        a.push(vec![lp::q(-(d as i64)), Q::zero()]);
        b.push(lp::q(-1));
    }
    if let Some(d) = down {
        a.push(vec![Q::zero(), lp::q(-(d as i64))]);
        b.push(lp::q(-1));
    }
    if a.is_empty() {
        return Ok(Q::zero());
    }
    let c = [lp::q(-((n - w) as i64)), lp::q(-(w as i64))];
    Ok(-lp::maximize(&c, &a, &b)?.value)
}

/// `√fc` as a float; exact when numerator and denominator are perfect squares.
pub fn qc_estimate(fc: &Q) -> Result<f64> {
    if fc.is_negative() {
        return Err(Error::InvalidParameters(format!("negative FC value {fc}")));
    }
    let (num, den) = (fc.numer(), fc.denom());
    let (rn, rd) = (num.sqrt(), den.sqrt());
    if &(&rn * &rn) == num && &(&rd * &rd) == den {
        return Ok(rn.to_f64().unwrap_or(f64::INFINITY) / rd.to_f64().unwrap_or(f64::INFINITY));
    }
    Ok(fc.to_f64().unwrap_or(f64::INFINITY).sqrt())
}

/// How the primal candidate of [`fc_bounds_promise`] was checked.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CheckMode {
    /// Every disagreeing domain point was covered (directly or by an exact
    /// worst-case argument).
    Exhaustive,
    /// Only sampled disagreeing points were checked; the bound is empirical.
    Sampled,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PromiseBounds {
    /// `Σλ`, when a primal candidate was supplied and passed.
    pub upper: Option<Q>,
    pub upper_mode: Option<CheckMode>,
    /// `Σμ`, when a dual candidate was supplied and passed.
    pub lower: Option<Q>,
}

/// Uniform covering weights `1/δ` for a function whose value-differing domain
/// points differ on at least `δ` positions.
pub fn uniform_primal(n: usize, delta: usize) -> Vec<Q> {
    vec![lp::q_ratio(1, delta as i64); n]
}

/// Certifies `FC^X ≤ Σλ` and `FC^X ≥ Σμ` for supplied candidates without
/// solving the LP.
pub fn fc_bounds_promise(
    f: &FunctionObject,
    x: &InputPoint,
    primal: Option<&[Q]>,
    dual: Option<&[(InputPoint, Q)]>,
) -> Result<PromiseBounds> {
    let value = f.evaluate(x)?.ok_or(Error::NotInDomain)?;
    let n = f.n();
    let mut out = PromiseBounds {
        upper: None,
        upper_mode: None,
        lower: None,
    };
    if let Some(lambda) = primal {
        if lambda.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: lambda.len(),
            });
        }
        if let Some(i) = lambda.iter().position(|l| l.is_negative()) {
            return Err(Error::Infeasible(format!("λ_{} is negative", i + 1)));
        }
        let mode = check_primal(f, x, value, lambda)?;
        out.upper = Some(lambda.iter().sum());
        out.upper_mode = Some(mode);
    }
    if let Some(mu) = dual {
        let mut loads = vec![Q::zero(); n];
        let mut total = Q::zero();
        for (y, w) in mu {
            if w.is_negative() {
                return Err(Error::Infeasible(format!("negative weight on {y}")));
            }
            match f.evaluate(y)? {
                Some(v) if v != value => {}
                _ => {
                    return Err(Error::Infeasible(format!(
                        "dual support point {y} is not a value-differing domain point"
                    )))
                }
            }
            for i in x.disagreement(y) {
                loads[i - 1] += w;
            }
            total += w;
        }
        if let Some(i) = loads.iter().position(|l| *l > Q::one()) {
            return Err(Error::Infeasible(format!(
                "column {} has dual load {} > 1",
                i + 1,
                loads[i]
            )));
        }
        out.lower = Some(total);
    }
    Ok(out)
}

fn check_primal(f: &FunctionObject, x: &InputPoint, value: bool, lambda: &[Q]) -> Result<CheckMode> {
    let total: Q = lambda.iter().sum();
    let fail = |what: String, load: &Q| Err(Error::Infeasible(format!("{what} receives load {load} < 1")));
    match f.kind() {
        Kind::Design(d) => {
            let xs = x.values();
            for (j, set) in d.design.sets.iter().enumerate() {
                if d.labels[j] == value {
                    continue;
                }
                // an ordering of S_j can agree with x exactly on the positions
                // holding elements of S_j, all at once
                let agree: Q = xs
                    .iter()
                    .zip(lambda)
                    .filter(|(s, _)| set.binary_search(&(**s as usize + 1)).is_ok())
                    .map(|(_, l)| l)
                    .sum();
                let load = &total - agree;
                if load < Q::one() {
                    return fail(format!("orderings of set {} (worst case)", j + 1), &load);
                }
            }
            Ok(CheckMode::Exhaustive)
        }
        Kind::Collision => {
            let xs = x.values();
            let mut sorted: Vec<&Q> = lambda.iter().collect();
            // maximum λ-mass on which a value-differing input can agree with x
            let agree: Q = if value {
                // x is two-to-one: a one-to-one input keeps at most one position per pair
                let mut best = Q::zero();
                let mut seen = std::collections::HashMap::new();
                for (i, s) in xs.iter().enumerate() {
                    if let Some(j) = seen.insert(*s, i) {
                        best += std::cmp::max(&lambda[i], &lambda[j]).clone();
                    }
                }
                best
            } else {
                // x is one-to-one: a two-to-one input agrees on at most n/2 positions
                sorted.sort();
                sorted.iter().rev().take(f.n() / 2).copied().sum()
            };
            let load = &total - agree;
            if load < Q::one() {
                return fail("the worst value-differing input".into(), &load);
            }
            Ok(CheckMode::Exhaustive)
        }
        _ => {
            let rows = match disagreement_rows(f, x) {
                Ok(rows) => rows,
                Err(Error::CapExceeded { .. } | Error::Unsupported(_)) => {
                    return check_primal_sampled(f, x, value, lambda)
                }
                Err(e) => return Err(e),
            };
            for &r in &rows.masks {
                let load: Q = mask_positions(r).iter().map(|&p| &lambda[p - 1]).sum();
                if load < Q::one() {
                    return fail(format!("row {:?}", mask_positions(r)), &load);
                }
            }
            Ok(CheckMode::Exhaustive)
        }
    }
}

/// Number of random inputs checked when the rows cannot be enumerated.
pub const PROMISE_SAMPLES: usize = 10_000;

/// Random inputs, and each one's single-position neighbours, checked against
/// the covering constraints. The resulting bound is empirical.
fn check_primal_sampled(f: &FunctionObject, x: &InputPoint, value: bool, lambda: &[Q]) -> Result<CheckMode> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let n = f.n();
    let alpha = f.alphabet();
    let check = |y: &InputPoint| -> Result<()> {
        if f.evaluate(y)? == Some(!value) {
            let load: Q = x.disagreement(y).iter().map(|&p| &lambda[p - 1]).sum();
            if load < Q::one() {
                return Err(Error::Infeasible(format!("sampled input {y} receives load {load} < 1")));
            }
        }
        Ok(())
    };
    for _ in 0..PROMISE_SAMPLES {
        // walk from x towards a random input so that near disagreements are seen too
        let target: Vec<u32> = (0..n).map(|_| rng.gen_range(0..alpha)).collect();
        let keep = rng.gen_range(0..=n);
        let values: Vec<u32> = (0..n)
            .map(|i| {
                if rng.gen_range(0..n.max(1)) < keep {
                    x.values()[i]
                } else {
                    target[i]
                }
            })
            .collect();
        check(&InputPoint::new(values))?;
    }
    for i in 1..=n {
        for s in 0..alpha {
            if s != x.symbol(i) {
                check(&x.with_symbol(i, s))?;
            }
        }
    }
    Ok(CheckMode::Sampled)
}

/// Dual candidate spreading `1/|perimeter|` on each input whose only ones are
/// the perimeter of a single square of the lattice.
pub fn lattice_square_dual(side: usize, square: usize) -> Vec<(InputPoint, Q)> {
    let mut out = Vec::with_capacity(side * side);
    for t in 0..side * side {
        let cells = lattice_perimeter(side, square, t / side, t % side);
        let mut values = vec![0u32; side * side];
        for &c in &cells {
            values[c] = 1;
        }
        let w = Q::new(BigInt::one(), BigInt::from(cells.len()));
        out.push((InputPoint::new(values), w));
    }
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    out
}

/// Convenience: exact rational as a float.
pub fn to_f64(v: &BigRational) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}
