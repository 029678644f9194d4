//! Multilinear polynomials over the rationals: Möbius coefficients, degree,
//! nondeterministic degree, maxonomials and the shrinking process on
//! monomial sets.
//!
//! A monomial is a mask over at most 64 variables (variable `i` at bit `i - 1`).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::{full_mask, lex_less, mask_positions, BitCube};
use crate::error::{Error, Result};
use crate::function::{FunctionObject, InputPoint};
use crate::linalg::{rref, Field, Fp};
use crate::lp::Q;
use crate::measures::CubeFunction;

/// Largest `n` for the Möbius transform.
pub const MOBIUS_CAP: usize = 20;
/// `ndeg` is solved over the rationals up to this many variables.
pub const NDEG_EXACT_VARS: usize = 5;
/// `ndeg` is certified by rank arguments modulo a prime up to this many variables.
pub const NDEG_MODULAR_VARS: usize = 10;
/// Above the modular range only a certified lower bound is returned.
pub const NDEG_MAX_VARS: usize = 12;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultilinearPoly {
    n: usize,
    terms: BTreeMap<u64, Q>,
}

impl MultilinearPoly {
    pub fn new(n: usize, terms: impl IntoIterator<Item = (u64, Q)>) -> Self {
        let mut map = BTreeMap::new();
        for (m, c) in terms {
            let e: &mut Q = map.entry(m).or_insert_with(Q::zero);
            *e += c;
        }
        map.retain(|_, c| !c.is_zero());
        MultilinearPoly { n, terms: map }
    }

    pub fn zero(n: usize) -> Self {
        MultilinearPoly {
            n,
            terms: BTreeMap::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &BTreeMap<u64, Q> {
        &self.terms
    }

    pub fn monomials(&self) -> Vec<u64> {
        self.terms.keys().copied().collect()
    }

    pub fn coefficient(&self, monomial: u64) -> Q {
        self.terms.get(&monomial).cloned().unwrap_or_else(Q::zero)
    }

    /// Largest monomial size; 0 for constants and for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.terms.keys().map(|m| m.count_ones() as usize).max().unwrap_or(0)
    }

    /// Value at a 0/1 point packed as a mask.
    pub fn eval_bits(&self, x: u64) -> Q {
        self.terms.iter().filter(|(m, _)| *m & x == **m).map(|(_, c)| c).sum()
    }
}

impl fmt::Display for MultilinearPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut ordered: Vec<(&u64, &Q)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| {
            a.0.count_ones().cmp(&b.0.count_ones()).then_with(|| {
                if lex_less(*a.0, *b.0) {
                    std::cmp::Ordering::Less
                } else {
                    std::cmp::Ordering::Greater
                }
            })
        });
        for (k, (m, c)) in ordered.into_iter().enumerate() {
            let neg = *c < Q::zero();
            let abs = if neg { -c.clone() } else { c.clone() };
            match (k, neg) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let vars: String = mask_positions(*m).iter().map(|p| format!("x{p}")).collect();
            if vars.is_empty() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{vars}")?;
            } else {
                write!(f, "{abs}{vars}")?;
            }
        }
        Ok(())
    }
}

fn dense_values(f: &FunctionObject) -> Result<Vec<bool>> {
    if !f.is_boolean() {
        return Err(Error::NotBoolean);
    }
    if !f.is_total() {
        return Err(Error::Partial);
    }
    if f.n() > MOBIUS_CAP {
        return Err(Error::CapExceeded {
            what: "polynomial transform",
            needed: 1u128 << f.n(),
            cap: 1u128 << MOBIUS_CAP,
        });
    }
    Ok((0..1u64 << f.n()).map(|x| f.eval_bits(x) == Some(true)).collect())
}

/// The unique multilinear polynomial agreeing with `f` on `{0,1}^n`.
pub fn mobius_transform(f: &FunctionObject) -> Result<MultilinearPoly> {
    let values = dense_values(f)?;
    let n = f.n();
    let mut a: Vec<i64> = values.iter().map(|&v| v as i64).collect();
    for i in 0..n {
        let bit = 1usize << i;
        for m in 0..a.len() {
            if m & bit != 0 {
                a[m] -= a[m ^ bit];
            }
        }
    }
    Ok(MultilinearPoly::new(
        n,
        a.into_iter()
            .enumerate()
            .filter(|(_, c)| *c != 0)
            .map(|(m, c)| (m as u64, Q::from_integer(c.into()))),
    ))
}

pub fn degree(f: &FunctionObject) -> Result<usize> {
    Ok(mobius_transform(f)?.degree())
}

/// Monomials not strictly contained in another monomial of the set.
pub fn maxonomials_of(n: usize, monomials: &[u64]) -> Vec<u64> {
    if n <= 16 {
        let mut s = BitCube::new(n);
        for &m in monomials {
            s.set(m);
        }
        let mut covered = s.one_step_down();
        covered.close_downward();
        let mut out: Vec<u64> = monomials.iter().copied().filter(|&m| !covered.get(m)).collect();
        out.sort_unstable();
        out.dedup();
        return out;
    }
    let mut out: Vec<u64> = monomials
        .iter()
        .copied()
        .filter(|&m| !monomials.iter().any(|&o| o != m && o & m == m))
        .collect();
    out.sort_unstable();
    out.dedup();
    out
}

pub fn maxonomials(p: &MultilinearPoly) -> Result<Vec<u64>> {
    if p.is_zero() {
        return Err(Error::InvalidParameters("the zero polynomial has no monomials".into()));
    }
    Ok(maxonomials_of(p.n(), &p.monomials()))
}

/// `Σ deg(M)!` over the set.
pub fn omega_weight(monomials: &[u64]) -> BigUint {
    monomials
        .iter()
        .map(|m| (1..=m.count_ones() as u64).fold(BigUint::one(), |acc, k| acc * k))
        .sum()
}

/// Checks that `p(Y) != 0` exactly when `f(Y) = 1`.
pub fn represents_nondeterministically(p: &MultilinearPoly, f: &FunctionObject) -> Result<bool> {
    let values = dense_values(f)?;
    Ok(values
        .iter()
        .enumerate()
        .all(|(x, &v)| !p.eval_bits(x as u64).is_zero() == v))
}

/// A block `B ⊆ vars(M)` with `f(X^(B)) = 1`, first in size-then-lexicographic order.
pub fn nisan_smolensky_block(
    f: &FunctionObject,
    p: &MultilinearPoly,
    monomial: u64,
    x: &InputPoint,
) -> Result<Vec<usize>> {
    if !represents_nondeterministically(p, f)? {
        return Err(Error::InvalidParameters(
            "p does not represent f nondeterministically".into(),
        ));
    }
    if !maxonomials(p)?.contains(&monomial) {
        return Err(Error::InvalidParameters(format!(
            "{:?} is not a maxonomial of p",
            mask_positions(monomial)
        )));
    }
    if f.evaluate(x)? != Some(false) {
        return Err(Error::InvalidParameters(format!("f({x}) is not 0")));
    }
    let xb = x.bits().ok_or(Error::NotBoolean)?;
    Ok(mask_positions(find_block(f, monomial, xb)?))
}

fn find_block(f: &FunctionObject, monomial: u64, xb: u64) -> Result<u64> {
    let vars = mask_positions(monomial);
    let mut subsets: Vec<u64> = (1u64..1 << vars.len())
        .map(|s| mask_positions(s).iter().fold(0u64, |m, &i| m | 1 << (vars[i - 1] - 1)))
        .collect();
    subsets.sort_by(|&a, &b| {
        a.count_ones().cmp(&b.count_ones()).then_with(|| {
            if a == b {
                std::cmp::Ordering::Equal
            } else if lex_less(a, b) {
                std::cmp::Ordering::Less
            } else {
                std::cmp::Ordering::Greater
            }
        })
    });
    subsets
        .into_iter()
        .find(|&b| f.eval_bits(xb ^ b) == Some(true))
        .ok_or_else(|| {
            Error::Consistency(format!(
                "no block inside maxonomial {:?} flips f at {xb:b}",
                mask_positions(monomial)
            ))
        })
}

// ---------------------------------------------------------------------------
// nondeterministic degree

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NdegCertificate {
    /// Feasibility and minimality both decided over the rationals.
    Exact,
    /// Decided by full-rank arguments modulo a prime, which transfer to the rationals.
    Modular,
    /// Only `degree <= ndeg(f)` is certified (largest isolated subcube).
    LowerBound,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Ndeg {
    pub degree: usize,
    /// Polynomial nonzero exactly on `f⁻¹(1)`, when computed over the rationals.
    pub witness: Option<MultilinearPoly>,
    pub certificate: NdegCertificate,
    /// Set for the identically-zero function, where the zero polynomial is returned.
    pub degenerate: bool,
}

fn monomials_up_to(n: usize, d: usize) -> Vec<u64> {
    let mut out: Vec<u64> = (0..1u64 << n).filter(|m| m.count_ones() as usize <= d).collect();
    out.sort_by_key(|m| (m.count_ones(), *m));
    out
}

fn eval_row<F: Field>(cols: &[u64], x: u64) -> Vec<F> {
    cols.iter()
        .map(|&m| if m & x == m { F::one_el() } else { F::zero_el() })
        .collect()
}

struct KernelTest<F> {
    rank: usize,
    ncols: usize,
    /// Per 1-input, the values of the kernel basis functionals.
    functionals: Vec<Vec<F>>,
    reduced: Vec<Vec<F>>,
    pivots: Vec<usize>,
}

impl<F: Field> KernelTest<F> {
    fn feasible(&self) -> bool {
        self.functionals.iter().all(|v| v.iter().any(|c| !c.is_zero_el()))
    }
}

fn kernel_test<F: Field>(n: usize, d: usize, zeros: &[u64], ones: &[u64]) -> (Vec<u64>, KernelTest<F>) {
    let cols = monomials_up_to(n, d);
    let mut rows: Vec<Vec<F>> = zeros.iter().map(|&z| eval_row(&cols, z)).collect();
    let pivots = rref(&mut rows, cols.len());
    let is_pivot: Vec<bool> = {
        let mut v = vec![false; cols.len()];
        for &p in &pivots {
            v[p] = true;
        }
        v
    };
    let free: Vec<usize> = (0..cols.len()).filter(|&c| !is_pivot[c]).collect();
    let functionals = ones
        .iter()
        .map(|&x| {
            let e: Vec<F> = eval_row(&cols, x);
            free.iter()
                .map(|&c| {
                    let mut v = e[c].clone();
                    for (i, &p) in pivots.iter().enumerate() {
                        if !e[p].is_zero_el() && !rows[i][c].is_zero_el() {
                            v = v.sub(&rows[i][c]);
                        }
                    }
                    v
                })
                .collect()
        })
        .collect();
    let t = KernelTest {
        rank: pivots.len(),
        ncols: cols.len(),
        functionals,
        reduced: rows,
        pivots,
    };
    (cols, t)
}

fn exact_witness(
    n: usize,
    cols: &[u64],
    t: &KernelTest<BigRational>,
    zeros: &[u64],
    ones: &[u64],
) -> Result<MultilinearPoly> {
    let mut is_pivot = vec![false; cols.len()];
    for &p in &t.pivots {
        is_pivot[p] = true;
    }
    let free: Vec<usize> = (0..cols.len()).filter(|&c| !is_pivot[c]).collect();
    for step in 1u64.. {
        let tq = BigRational::from_integer(step.into());
        let coeffs: Vec<BigRational> = (0..free.len())
            .scan(BigRational::one(), |acc, _| {
                let c = acc.clone();
                *acc = &*acc * &tq;
                Some(c)
            })
            .collect();
        let ok = t
            .functionals
            .iter()
            .all(|v| !v.iter().zip(&coeffs).map(|(a, b)| a * b).sum::<BigRational>().is_zero());
        if !ok {
            continue;
        }
        let mut k = vec![BigRational::zero(); cols.len()];
        for (j, &c) in free.iter().enumerate() {
            k[c] = coeffs[j].clone();
        }
        for (i, &p) in t.pivots.iter().enumerate() {
            let s: BigRational = free
                .iter()
                .enumerate()
                .map(|(j, &c)| &t.reduced[i][c] * &coeffs[j])
                .sum();
            k[p] = -s;
        }
        let poly = MultilinearPoly::new(n, cols.iter().copied().zip(k));
        let good =
            zeros.iter().all(|&z| poly.eval_bits(z).is_zero()) && ones.iter().all(|&x| !poly.eval_bits(x).is_zero());
        if !good {
            return Err(Error::Consistency("ndeg witness failed verification".into()));
        }
        return Ok(poly);
    }
    unreachable!()
}

/// Largest `k` such that some 1-input has a `k`-dimensional subcube around it
/// on which it is the only 1. Always at most `ndeg(f)`.
pub fn ndeg_lower_bound(f: &FunctionObject) -> Result<usize> {
    dense_values(f)?;
    let cube = CubeFunction::new(f)?;
    let n = f.n();
    let mut best = 0;
    for x in 0..1u64 << n {
        if cube.value(x) != Some(true) {
            continue;
        }
        // sensitive masks at a 1-input are exactly the D with f(X ^ D) = 0
        let a = cube.analyze(x)?;
        let mut other_ones = a.sensitive.clone();
        other_ones.invert();
        other_ones.clear(0);
        other_ones.close_upward();
        let len = 1u64 << n;
        for (j, &w) in other_ones.words().iter().enumerate() {
            let mut free = !w;
            if len < 64 {
                free &= (1u64 << len) - 1;
            }
            while free != 0 {
                let t = ((j as u64) << 6) | free.trailing_zeros() as u64;
                free &= free - 1;
                best = best.max(t.count_ones() as usize);
            }
        }
        if best == n {
            break;
        }
    }
    let _ = full_mask(n);
    Ok(best)
}

/// Minimum degree of a polynomial that is nonzero exactly on `f⁻¹(1)`.
pub fn ndeg(f: &FunctionObject) -> Result<Ndeg> {
    let values = dense_values(f)?;
    let n = f.n();
    if n > NDEG_MAX_VARS {
        return Err(Error::CapExceeded {
            what: "nondeterministic degree",
            needed: n as u128,
            cap: NDEG_MAX_VARS as u128,
        });
    }
    let zeros: Vec<u64> = (0..values.len() as u64).filter(|&x| !values[x as usize]).collect();
    let ones: Vec<u64> = (0..values.len() as u64).filter(|&x| values[x as usize]).collect();
    if ones.is_empty() {
        return Ok(Ndeg {
            degree: 0,
            witness: Some(MultilinearPoly::zero(n)),
            certificate: NdegCertificate::Exact,
            degenerate: true,
        });
    }
    if zeros.is_empty() {
        return Ok(Ndeg {
            degree: 0,
            witness: Some(MultilinearPoly::new(n, [(0, Q::one())])),
            certificate: NdegCertificate::Exact,
            degenerate: false,
        });
    }
    if n <= NDEG_EXACT_VARS {
        return ndeg_exact(n, &zeros, &ones, 0);
    }
    if n <= NDEG_MODULAR_VARS {
        let mut prev_full_column = true;
        for d in 0..=n {
            let (_, t) = kernel_test::<Fp>(n, d, &zeros, &ones);
            if t.feasible() {
                let full_row = t.rank == zeros.len();
                if full_row && prev_full_column {
                    return Ok(Ndeg {
                        degree: d,
                        witness: None,
                        certificate: NdegCertificate::Modular,
                        degenerate: false,
                    });
                }
                break;
            }
            prev_full_column = t.rank == t.ncols;
        }
        if n <= 8 {
            return ndeg_exact(n, &zeros, &ones, 0);
        }
    }
    Ok(Ndeg {
        degree: ndeg_lower_bound(f)?,
        witness: None,
        certificate: NdegCertificate::LowerBound,
        degenerate: false,
    })
}

fn ndeg_exact(n: usize, zeros: &[u64], ones: &[u64], start: usize) -> Result<Ndeg> {
    for d in start..=n {
        let (cols, t) = kernel_test::<BigRational>(n, d, zeros, ones);
        if t.feasible() {
            return Ok(Ndeg {
                degree: d,
                witness: Some(exact_witness(n, &cols, &t, zeros, ones)?),
                certificate: NdegCertificate::Exact,
                degenerate: false,
            });
        }
    }
    Err(Error::Consistency("no degree up to n represents f".into()))
}

// ---------------------------------------------------------------------------
// shrinking process

/// Decides which maxonomials shrink in an iteration and what they become.
pub trait ShrinkRule {
    /// Whether `monomial` shrinks; the marginal probability must be at least 1/2.
    fn shrinks(&mut self, rng: &mut ChaCha8Rng, monomial: u64) -> bool;

    /// Replacement of degree `deg(monomial) - 1`.
    fn replacement(&mut self, _rng: &mut ChaCha8Rng, monomial: u64) -> u64 {
        let top = 63 - monomial.leading_zeros();
        monomial & !(1u64 << top)
    }
}

/// Independent fair coin per maxonomial; drops the largest variable index.
#[derive(Clone, Copy, Debug, Default)]
pub struct FairCoin;

impl ShrinkRule for FairCoin {
    fn shrinks(&mut self, rng: &mut ChaCha8Rng, _monomial: u64) -> bool {
        rng.gen::<bool>()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShrinkTrace {
    /// `ω` of the monomial set before each iteration, then the final value.
    pub omegas: Vec<BigUint>,
    pub iterations: usize,
}

fn shrink_step(n: usize, set: &mut Vec<u64>, rule: &mut dyn ShrinkRule, rng: &mut ChaCha8Rng) {
    let maxo = maxonomials_of(n, set);
    let mut next: Vec<u64> = set.iter().copied().filter(|m| maxo.binary_search(m).is_err()).collect();
    for &m in &maxo {
        if rule.shrinks(rng, m) {
            let r = rule.replacement(rng, m);
            debug_assert_eq!(r.count_ones() + 1, m.count_ones());
            if r != 0 {
                next.push(r);
            }
        } else {
            next.push(m);
        }
    }
    next.sort_unstable();
    next.dedup();
    *set = next;
}

fn initial_set(p: &MultilinearPoly) -> Vec<u64> {
    p.monomials().into_iter().filter(|&m| m != 0).collect()
}

/// Runs the shrinking process until no nonconstant monomial remains, recording `ω`.
pub fn shrink_simulation(p: &MultilinearPoly, rule: &mut dyn ShrinkRule, seed: u64) -> ShrinkTrace {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = initial_set(p);
    let mut omegas = vec![omega_weight(&set)];
    let mut iterations = 0;
    while !set.is_empty() {
        shrink_step(p.n(), &mut set, rule, &mut rng);
        iterations += 1;
        omegas.push(omega_weight(&set));
    }
    ShrinkTrace { omegas, iterations }
}

/// Iteration count of one run, stopping early once `cap` iterations are used.
pub fn shrink_iterations(p: &MultilinearPoly, rule: &mut dyn ShrinkRule, seed: u64, cap: usize) -> usize {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut set = initial_set(p);
    let mut iterations = 0;
    while !set.is_empty() && iterations < cap {
        shrink_step(p.n(), &mut set, rule, &mut rng);
        iterations += 1;
    }
    iterations
}

/// `log_{4e/(4e-1)}(2 n^d d!)`, the iteration count after which the expected
/// weight of the monomial set drops below 1/2.
pub fn shrink_iteration_bound(n: usize, d: usize) -> f64 {
    let e4 = 4.0 * std::f64::consts::E;
    let ln_fact: f64 = (1..=d).map(|k| (k as f64).ln()).sum();
    let ln_start = 2f64.ln() + d as f64 * (n as f64).ln() + ln_fact;
    ln_start / (e4 / (e4 - 1.0)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::*;
    use crate::lp::q;

    fn poly(n: usize, terms: &[(&[usize], i64)]) -> MultilinearPoly {
        MultilinearPoly::new(n, terms.iter().map(|(v, c)| (crate::cube::positions_mask(v), q(*c))))
    }

    #[test]
    fn mobius_examples() {
        let and2 = mobius_transform(&make_and(2).unwrap()).unwrap();
        assert_eq!(and2, poly(2, &[(&[1, 2], 1)]));
        assert_eq!(and2.degree(), 2);
        assert_eq!(degree(&make_parity(5).unwrap()).unwrap(), 5);
        let maj = mobius_transform(&make_majority(3).unwrap()).unwrap();
        assert_eq!(
            maj,
            poly(3, &[(&[1, 2], 1), (&[1, 3], 1), (&[2, 3], 1), (&[1, 2, 3], -2)])
        );
        assert_eq!(maj.to_string(), "x1x2 + x1x3 + x2x3 - 2x1x2x3");
    }

    #[test]
    fn maxonomial_examples() {
        let p = poly(3, &[(&[1, 2], 1), (&[2, 3], 1), (&[1], 1)]);
        assert_eq!(maxonomials(&p).unwrap(), vec![0b011, 0b110]);
        let single = poly(3, &[(&[1, 2, 3], 1)]);
        assert_eq!(maxonomials(&single).unwrap(), vec![0b111]);
        let or2 = mobius_transform(&make_or(2).unwrap()).unwrap();
        assert_eq!(maxonomials(&or2).unwrap(), vec![0b11]);
        assert!(maxonomials(&MultilinearPoly::zero(2)).is_err());
        // the quadratic path agrees with the cube path
        assert_eq!(maxonomials_of(40, &[0b011, 0b110, 0b001]), vec![0b011, 0b110]);
    }

    #[test]
    fn omega_examples() {
        assert_eq!(omega_weight(&[0b011, 0b110]), BigUint::from(4u32));
        assert_eq!(omega_weight(&[]), BigUint::zero());
        assert_eq!(omega_weight(&[0b1]), BigUint::one());
    }

    #[test]
    fn ns_block_examples() {
        let or2 = make_or(2).unwrap();
        let p = mobius_transform(&or2).unwrap();
        let b = nisan_smolensky_block(&or2, &p, 0b11, &InputPoint::zeros(2)).unwrap();
        assert_eq!(b, vec![1]);
        let and2 = make_and(2).unwrap();
        let p = mobius_transform(&and2).unwrap();
        let b = nisan_smolensky_block(&and2, &p, 0b11, &InputPoint::zeros(2)).unwrap();
        assert_eq!(b, vec![1, 2]);
        assert!(nisan_smolensky_block(&and2, &p, 0b01, &InputPoint::zeros(2)).is_err());
    }

    #[test]
    fn ndeg_examples() {
        let r = ndeg(&make_or(3).unwrap()).unwrap();
        assert_eq!(r.degree, 1);
        assert_eq!(r.witness.unwrap(), poly(3, &[(&[1], 1), (&[2], 1), (&[3], 1)]));
        for n in 1..=5 {
            let r = ndeg(&make_and(n).unwrap()).unwrap();
            assert_eq!(r.degree, n);
            let w = r.witness.unwrap();
            assert_eq!(w.monomials(), vec![full_mask(n)]);
        }
        let zero = ndeg(&FunctionObject::from_truth_bits(2, 0)).unwrap();
        assert!(zero.degenerate);
        assert_eq!(zero.degree, 0);
        let one = ndeg(&FunctionObject::from_truth_bits(2, 0b1111)).unwrap();
        assert_eq!(one.degree, 0);
    }

    #[test]
    fn ndeg_witness_on_window() {
        let f = make_weight_window(5, 2, 3).unwrap().to_dense().unwrap();
        let r = ndeg(&f).unwrap();
        let w = r.witness.as_ref().unwrap();
        assert!(represents_nondeterministically(w, &f).unwrap());
        assert_eq!(w.degree(), r.degree);
        for m in maxonomials(w).unwrap() {
            for x in 0..32u64 {
                if f.eval_bits(x) == Some(false) {
                    let b = nisan_smolensky_block(&f, w, m, &InputPoint::from_bits(5, x)).unwrap();
                    assert!(!b.is_empty());
                }
            }
        }
    }

    #[test]
    fn modular_path_agrees_with_exact_path() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..3 {
            let bits: u64 = rng.gen();
            let f = FunctionObject::from_predicate(6, |x| bits >> x & 1 == 1).unwrap();
            let values: Vec<bool> = (0..64).map(|x| bits >> x & 1 == 1).collect();
            let zeros: Vec<u64> = (0..64).filter(|&x| !values[x as usize]).collect();
            let ones: Vec<u64> = (0..64).filter(|&x| values[x as usize]).collect();
            let exact = ndeg_exact(6, &zeros, &ones, 0).unwrap();
            let fast = ndeg(&f).unwrap();
            assert_eq!(fast.degree, exact.degree);
            assert!(ndeg_lower_bound(&f).unwrap() <= exact.degree);
        }
    }

    #[test]
    fn shrink_single_monomial() {
        let p = poly(3, &[(&[1, 2, 3], 1)]);
        for seed in 0..50 {
            let t = shrink_simulation(&p, &mut FairCoin, seed);
            assert!(t.iterations >= 3);
            assert_eq!(t.omegas.last().unwrap(), &BigUint::zero());
            assert_eq!(t.omegas[0], BigUint::from(6u32));
        }
        let c = poly(3, &[(&[], 5)]);
        assert_eq!(shrink_simulation(&c, &mut FairCoin, 0).iterations, 0);
        assert!((shrink_iteration_bound(8, 8) - 289.0).abs() < 1.0);
    }
}
