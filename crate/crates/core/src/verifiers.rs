//! Randomized verifiers: nonadaptive query vectors, conversion from adaptive
//! verifiers, the one-sided transform, the recursive child sampler for
//! composed symmetric functions and the zero-error evaluator.

use std::collections::HashMap;
use std::hash::Hasher;

use fnv::FnvHasher;
use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cube::full_mask;
use crate::error::{Error, Result};
use crate::fraccert::{fractional_certificate, to_f64};
use crate::function::{FunctionObject, InputPoint};
use crate::lp::Q;

/// RNG for trial `trial` of a Monte Carlo run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerifierRun {
    pub reject: bool,
    /// Whether some queried position disagreed with the claimed input.
    pub disagreement: bool,
    /// Queried positions (1-based) in query order.
    pub queried: Vec<usize>,
}

pub trait RandomizedVerifier {
    fn claimed(&self) -> &InputPoint;
    fn run(&self, y: &InputPoint, rng: &mut ChaCha8Rng) -> VerifierRun;
}

/// Fraction of `trials` runs on `y` that reject.
pub fn rejection_rate(v: &dyn RandomizedVerifier, y: &InputPoint, trials: u64, seed: u64) -> f64 {
    let hits = (0..trials)
        .filter(|&t| v.run(y, &mut trial_rng(seed, t)).reject)
        .count();
    hits as f64 / trials.max(1) as f64
}

/// Nonadaptive verifier: position `i` is queried with independent probability `λ_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct VerifierSpec {
    x: InputPoint,
    lambda: Vec<f64>,
}

impl VerifierSpec {
    pub fn new(x: InputPoint, lambda: Vec<f64>) -> Result<Self> {
        if lambda.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: lambda.len(),
            });
        }
        if let Some(i) = lambda.iter().position(|l| !(0.0..=1.0).contains(l)) {
            return Err(Error::InvalidParameters(format!(
                "query probability {} at position {} is outside [0,1]",
                lambda[i],
                i + 1
            )));
        }
        Ok(VerifierSpec { x, lambda })
    }

    /// `min(1, 2λ_i)` from a fractional certificate weighting.
    pub fn doubled(x: InputPoint, weights: &[Q]) -> Result<Self> {
        let lambda = weights.iter().map(|w| (2.0 * to_f64(w)).min(1.0)).collect();
        VerifierSpec::new(x, lambda)
    }

    pub fn lambda(&self) -> &[f64] {
        &self.lambda
    }

    pub fn expected_queries(&self) -> f64 {
        self.lambda.iter().sum()
    }

    /// Exact rejection probability on `y`: `1 - Π (1 - λ_i)` over disagreements.
    pub fn rejection_probability(&self, y: &InputPoint) -> f64 {
        1.0 - self
            .x
            .disagreement(y)
            .iter()
            .map(|&p| 1.0 - self.lambda[p - 1])
            .product::<f64>()
    }
}

impl RandomizedVerifier for VerifierSpec {
    fn claimed(&self) -> &InputPoint {
        &self.x
    }

    fn run(&self, y: &InputPoint, rng: &mut ChaCha8Rng) -> VerifierRun {
        let mut queried = Vec::new();
        let mut disagreement = false;
        for (i, &l) in self.lambda.iter().enumerate() {
            if l > 0.0 && rng.gen_bool(l) {
                queried.push(i + 1);
                disagreement |= y.symbol(i + 1) != self.x.symbol(i + 1);
            }
        }
        VerifierRun {
            reject: disagreement,
            disagreement,
            queried,
        }
    }
}

pub fn run_nonadaptive(v: &VerifierSpec, y: &InputPoint, seed: u64) -> VerifierRun {
    v.run(y, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Distribution over deterministic decision trees that reject on the first
/// disagreement with `x`. Each tree is represented by its query sequence
/// along the all-agree path, which determines it completely.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveVerifier {
    x: InputPoint,
    trees: Vec<(Q, Vec<usize>)>,
}

impl AdaptiveVerifier {
    pub fn new(x: InputPoint, trees: Vec<(Q, Vec<usize>)>) -> Result<Self> {
        let total: Q = trees.iter().map(|(p, _)| p).sum();
        if !total.is_one() {
            return Err(Error::InvalidParameters(format!(
                "tree probabilities sum to {total}, not 1"
            )));
        }
        for (p, path) in &trees {
            if p.is_negative() {
                return Err(Error::InvalidParameters("negative tree probability".into()));
            }
            if let Some(&pos) = path.iter().find(|&&q| q == 0 || q > x.len()) {
                return Err(Error::PositionOutOfRange {
                    position: pos,
                    n: x.len(),
                });
            }
        }
        Ok(AdaptiveVerifier { x, trees })
    }

    pub fn trees(&self) -> &[(Q, Vec<usize>)] {
        &self.trees
    }

    /// Expected number of queries on the claimed input.
    pub fn expected_queries(&self) -> Q {
        self.trees
            .iter()
            .map(|(p, path)| p * Q::from_integer(path.len().into()))
            .sum()
    }
}

impl RandomizedVerifier for AdaptiveVerifier {
    fn claimed(&self) -> &InputPoint {
        &self.x
    }

    fn run(&self, y: &InputPoint, rng: &mut ChaCha8Rng) -> VerifierRun {
        let r: f64 = rng.gen();
        let mut acc = 0.0;
        let mut chosen = &self.trees[self.trees.len() - 1].1;
        for (p, path) in &self.trees {
            acc += to_f64(p);
            if r < acc {
                chosen = path;
                break;
            }
        }
        let mut queried = Vec::new();
        for &pos in chosen {
            queried.push(pos);
            if y.symbol(pos) != self.x.symbol(pos) {
                return VerifierRun {
                    reject: true,
                    disagreement: true,
                    queried,
                };
            }
        }
        VerifierRun {
            reject: false,
            disagreement: false,
            queried,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Conversion {
    /// `⌈2 S_V⌉`.
    pub t: u64,
    /// Exact probability that each position is queried in `4T` repetitions.
    pub lambda: Vec<Q>,
    pub spec: VerifierSpec,
}

impl Conversion {
    pub fn total(&self) -> Q {
        self.lambda.iter().sum()
    }
}

/// Nonadaptive verifier obtained by `4T` repetitions of "pick `t ≤ T`
/// uniformly, simulate the `t`-th query assuming earlier queries agreed".
/// Probabilities are computed exactly from the query sequences.
pub fn adaptive_to_nonadaptive(v: &AdaptiveVerifier) -> Result<Conversion> {
    let n = v.x.len();
    let s = v.expected_queries();
    let t_big = (s * Q::from_integer(2.into())).ceil().to_integer();
    let t: u64 = t_big
        .try_into()
        .map_err(|_| Error::InvalidParameters("expected query count is too large".into()))?;
    let mut per_round = vec![Q::zero(); n];
    if t > 0 {
        let tq = Q::from_integer(t.into());
        for (p, path) in &v.trees {
            for &pos in path.iter().take(t as usize) {
                per_round[pos - 1] += p / &tq;
            }
        }
    }
    let reps = 4 * t;
    let lambda: Vec<Q> = per_round
        .iter()
        .map(|q| Q::one() - num_traits::pow(Q::one() - q, reps as usize))
        .collect();
    let spec = VerifierSpec::new(v.x.clone(), lambda.iter().map(to_f64).collect())?;
    Ok(Conversion { t, lambda, spec })
}

/// `V` followed by a fixed-probability spurious rejection whenever no
/// disagreement was found. Used to exercise the one-sided transform.
#[derive(Clone, Debug, PartialEq)]
pub struct NoisyVerifier {
    pub inner: VerifierSpec,
    pub spurious_reject: f64,
}

impl RandomizedVerifier for NoisyVerifier {
    fn claimed(&self) -> &InputPoint {
        self.inner.claimed()
    }

    fn run(&self, y: &InputPoint, rng: &mut ChaCha8Rng) -> VerifierRun {
        let mut r = self.inner.run(y, rng);
        if !r.disagreement && rng.gen_bool(self.spurious_reject) {
            r.reject = true;
        }
        r
    }
}

/// `V*`: accepts whenever `V` rejects without having seen a disagreement.
#[derive(Clone, Debug)]
pub struct OneSided<V> {
    pub inner: V,
}

impl<V: RandomizedVerifier> RandomizedVerifier for OneSided<V> {
    fn claimed(&self) -> &InputPoint {
        self.inner.claimed()
    }

    fn run(&self, y: &InputPoint, rng: &mut ChaCha8Rng) -> VerifierRun {
        let mut r = self.inner.run(y, rng);
        r.reject &= r.disagreement;
        r
    }
}

pub fn one_sided_transform<V: RandomizedVerifier>(v: V) -> OneSided<V> {
    OneSided { inner: v }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneSidedReport {
    /// Measured rejection rate of `V` on the claimed input.
    pub eps0: f64,
    /// Largest measured acceptance rate of `V` over the supplied bad inputs.
    pub eps1: f64,
    /// `(1 - ε₁)(1 - 2ε₀/(1 - ε₁))`; `None` when `ε₁ >= 1`.
    pub bound: Option<f64>,
    /// Set when the bound is missing or not positive.
    pub vacuous: bool,
    pub star_reject_claimed: f64,
    /// Smallest measured rejection rate of `V*` over the bad inputs.
    pub star_reject_bad: f64,
}

/// Measures `V` and `V*` on the claimed input and on inputs with the other value.
pub fn one_sided_report<V: RandomizedVerifier + Clone>(
    v: &V,
    bad: &[InputPoint],
    trials: u64,
    seed: u64,
) -> OneSidedReport {
    let star = one_sided_transform(v.clone());
    let x = v.claimed().clone();
    let eps0 = rejection_rate(v, &x, trials, seed);
    let star_reject_claimed = rejection_rate(&star, &x, trials, seed);
    let mut eps1: f64 = 0.0;
    let mut star_reject_bad: f64 = 1.0;
    for (k, y) in bad.iter().enumerate() {
        let s = seed.wrapping_add(1 + k as u64);
        eps1 = eps1.max(1.0 - rejection_rate(v, y, trials, s));
        star_reject_bad = star_reject_bad.min(rejection_rate(&star, y, trials, s));
    }
    let bound = (eps1 < 1.0).then(|| (1.0 - eps1) * (1.0 - 2.0 * eps0 / (1.0 - eps1)));
    OneSidedReport {
        eps0,
        eps1,
        bound,
        vacuous: bound.is_none_or(|b| b <= 0.0),
        star_reject_claimed,
        star_reject_bad,
    }
}

// ---------------------------------------------------------------------------
// recursive verifier for iterated symmetric compositions

fn check_table(profile: &[bool], p: &[Q]) -> Result<()> {
    let k = profile.len() - 1;
    if p.len() != k + 1 {
        return Err(Error::LengthMismatch {
            expected: k + 1,
            got: p.len(),
        });
    }
    for (kk, pk) in p.iter().enumerate() {
        if pk.is_negative() || *pk > Q::one() {
            return Err(Error::InvalidParameters(format!("p_{kk} = {pk} is outside [0,1]")));
        }
        if kk == 0 && !pk.is_zero() {
            return Err(Error::InvalidParameters(
                "p_0 > 0 chooses from an empty class of 1-children".into(),
            ));
        }
        if kk == k && !pk.is_one() {
            return Err(Error::InvalidParameters(format!(
                "p_{k} < 1 chooses from an empty class of 0-children"
            )));
        }
    }
    Ok(())
}

/// Choice table from the gap construction for the 13..16 window on 29 inputs.
pub fn gap_table_g1() -> Vec<Q> {
    (0..=29)
        .map(|k| match k {
            0..=12 => Q::zero(),
            13 => Q::new(13.into(), 17.into()),
            14 => Q::new(7.into(), 12.into()),
            15 => Q::new(5.into(), 12.into()),
            16 => Q::new(4.into(), 17.into()),
            _ => Q::one(),
        })
        .collect()
}

/// Child values at each level of an iterated composition of a symmetric
/// base with itself; level 0 is the input.
fn level_values(profile: &[bool], x: &[bool]) -> Result<Vec<Vec<bool>>> {
    let k = profile.len() - 1;
    if k < 2 {
        return Err(Error::InvalidParameters("base must have at least 2 inputs".into()));
    }
    let mut levels = vec![x.to_vec()];
    let mut len = x.len();
    while len > 1 {
        if len % k != 0 {
            return Err(Error::InvalidParameters(format!(
                "input length {} is not a power of {k}",
                x.len()
            )));
        }
        let prev = levels.last().expect("nonempty");
        let next: Vec<bool> = prev
            .chunks(k)
            .map(|c| profile[c.iter().filter(|&&b| b).count()])
            .collect();
        len = next.len();
        levels.push(next);
    }
    if levels.len() < 2 {
        return Err(Error::InvalidParameters("input is a single variable".into()));
    }
    Ok(levels)
}

/// Descends from the root choosing a claimed-1 child with probability `p_K`
/// and a claimed-0 child otherwise, uniformly within the class. Returns the
/// 1-based leaf position reached.
pub fn recursive_child_sampler(profile: &[bool], p: &[Q], x: &[bool], seed: u64) -> Result<usize> {
    check_table(profile, p)?;
    let k = profile.len() - 1;
    let levels = level_values(profile, x)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut node = 0usize;
    for level in (0..levels.len() - 1).rev() {
        let children = &levels[level][node * k..(node + 1) * k];
        let ones: Vec<usize> = (0..k).filter(|&i| children[i]).collect();
        let zeros: Vec<usize> = (0..k).filter(|&i| !children[i]).collect();
        let pk = to_f64(&p[ones.len()]);
        let class = if rng.gen_bool(pk) { &ones } else { &zeros };
        node = node * k + class[rng.gen_range(0..class.len())];
    }
    Ok(node + 1)
}

/// Exact probability that the sampled leaf of `x` disagrees with `y`.
pub fn leaf_hit_probability(profile: &[bool], p: &[Q], x: &[bool], y: &[bool]) -> Result<Q> {
    check_table(profile, p)?;
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    let k = profile.len() - 1;
    let levels = level_values(profile, x)?;
    fn hit(levels: &[Vec<bool>], p: &[Q], k: usize, y: &[bool], level: usize, node: usize) -> Q {
        if level == 0 {
            return if levels[0][node] != y[node] {
                Q::one()
            } else {
                Q::zero()
            };
        }
        let children = &levels[level - 1][node * k..(node + 1) * k];
        let ones = children.iter().filter(|&&b| b).count();
        let pk = &p[ones];
        let mut total = Q::zero();
        for (i, &c) in children.iter().enumerate() {
            let (w, size) = if c {
                (pk.clone(), ones)
            } else {
                (Q::one() - pk, k - ones)
            };
            if w.is_zero() {
                continue;
            }
            let h = hit(levels, p, k, y, level - 1, node * k + i);
            total += w * h / Q::from_integer(size.into());
        }
        total
    }
    Ok(hit(&levels, p, k, y, levels.len() - 1, 0))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimax {
    /// Worst-case probability that the chosen child's value is wrong.
    pub value: Q,
    /// `(K, a, b)` attaining it: `a` claimed-1 and `b` claimed-0 children are wrong.
    pub worst: Option<(usize, usize, usize)>,
    /// No profile pair changes the base value (constant base); value is 1 by convention.
    pub vacuous: bool,
}

/// Pareto-minimal `(a, b)` such that changing `a` claimed-1 and `b`
/// claimed-0 children changes the base value.
fn pareto_lines(profile: &[bool], kk: usize) -> Vec<(usize, usize)> {
    let k = profile.len() - 1;
    let mut out = Vec::new();
    let mut best_b = usize::MAX;
    for a in 0..=kk {
        let b = (0..=k - kk).find(|&b| profile[kk - a + b] != profile[kk]);
        if let Some(b) = b {
            if b < best_b {
                out.push((a, b));
                best_b = b;
            }
        }
    }
    out
}

fn line_value(kk: usize, k: usize, a: usize, b: usize, p: &Q) -> Q {
    let mut v = Q::zero();
    if a > 0 {
        v += p * Q::new(a.into(), kk.into());
    }
    if b > 0 {
        v += (Q::one() - p) * Q::new(b.into(), (k - kk).into());
    }
    v
}

fn worst_line(lines: &[(usize, usize)], kk: usize, k: usize, p: &Q) -> (Q, (usize, usize)) {
    lines
        .iter()
        .map(|&(a, b)| (line_value(kk, k, a, b, p), (a, b)))
        .min_by(|x, y| x.0.cmp(&y.0))
        .expect("nonempty")
}

/// Exact worst case, over the claimed count `K` and the wrong children, of the
/// probability that the sampler picks a wrong child.
pub fn child_hit_minimax(profile: &[bool], p: &[Q]) -> Result<Minimax> {
    check_table(profile, p)?;
    let k = profile.len() - 1;
    let mut best: Option<(Q, (usize, usize, usize))> = None;
    for kk in 0..=k {
        let lines = pareto_lines(profile, kk);
        if lines.is_empty() {
            continue;
        }
        let (v, (a, b)) = worst_line(&lines, kk, k, &p[kk]);
        if best.as_ref().is_none_or(|(bv, _)| v < *bv) {
            best = Some((v, (kk, a, b)));
        }
    }
    Ok(match best {
        Some((value, w)) => Minimax {
            value,
            worst: Some(w),
            vacuous: false,
        },
        None => Minimax {
            value: Q::one(),
            worst: None,
            vacuous: true,
        },
    })
}

/// Per-`K` choice probabilities maximizing the worst-case hit probability,
/// with the resulting minimax value. Ties go to the smallest `p_K`.
pub fn optimal_child_table(profile: &[bool]) -> Result<(Vec<Q>, Minimax)> {
    let k = profile.len() - 1;
    if k < 1 {
        return Err(Error::InvalidParameters("base must have at least one input".into()));
    }
    let mut table = Vec::with_capacity(k + 1);
    for kk in 0..=k {
        let lines = pareto_lines(profile, kk);
        if kk == 0 || lines.is_empty() {
            table.push(if kk == k { Q::one() } else { Q::zero() });
            continue;
        }
        if kk == k {
            table.push(Q::one());
            continue;
        }
        // the lower envelope is concave, so its maximum sits at an endpoint
        // or at a crossing of two lines
        let mut candidates = vec![Q::zero(), Q::one()];
        let slope_icept = |&(a, b): &(usize, usize)| {
            let sa = Q::new(a.into(), kk.into());
            let sb = Q::new(b.into(), (k - kk).into());
            (&sa - &sb, sb)
        };
        for i in 0..lines.len() {
            for j in i + 1..lines.len() {
                let (m1, c1) = slope_icept(&lines[i]);
                let (m2, c2) = slope_icept(&lines[j]);
                if m1 != m2 {
                    let x = (c2 - c1) / (m1 - m2);
                    if !x.is_negative() && x <= Q::one() {
                        candidates.push(x);
                    }
                }
            }
        }
        candidates.sort();
        candidates.dedup();
        let mut best: Option<(Q, Q)> = None;
        for c in candidates {
            let (v, _) = worst_line(&lines, kk, k, &c);
            if best.as_ref().is_none_or(|(bv, _)| v > *bv) {
                best = Some((v, c));
            }
        }
        table.push(best.expect("candidates nonempty").1);
    }
    let mm = child_hit_minimax(profile, &table)?;
    Ok((table, mm))
}

// ---------------------------------------------------------------------------
// zero-error evaluation

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TranscriptLine {
    pub position: usize,
    pub value: bool,
    /// FNV-1a hash of the restriction after this query.
    pub restriction_hash: u64,
}

impl std::fmt::Display for TranscriptLine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{}\t{}\t{:016x}",
            self.position, self.value as u8, self.restriction_hash
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZeroErrorRun {
    pub value: bool,
    /// Distinct positions queried.
    pub queries: usize,
    pub iterations: usize,
    pub transcript: Vec<TranscriptLine>,
}

/// Largest input length accepted by [`ZeroErrorEvaluator`].
pub const ZERO_ERROR_MAX_VARS: usize = 16;

fn restriction_hash(mask: u64, values: u64) -> u64 {
    let mut h = FnvHasher::default();
    h.write_u64(mask);
    h.write_u64(values & mask);
    h.finish()
}

/// Evaluates a total Boolean function by repeatedly querying a random
/// fractional certificate for a 0-input of the current restriction.
/// Verifier weights are cached per restriction.
#[derive(Debug)]
pub struct ZeroErrorEvaluator {
    f: FunctionObject,
    n: usize,
    values: Vec<bool>,
    cache: HashMap<(u64, u64), Vec<f64>>,
}

impl ZeroErrorEvaluator {
    pub fn new(f: &FunctionObject) -> Result<Self> {
        if !f.is_boolean() {
            return Err(Error::NotBoolean);
        }
        if !f.is_total() {
            return Err(Error::Partial);
        }
        let n = f.n();
        if n > ZERO_ERROR_MAX_VARS {
            return Err(Error::CapExceeded {
                what: "zero-error evaluation",
                needed: n as u128,
                cap: ZERO_ERROR_MAX_VARS as u128,
            });
        }
        let values: Vec<bool> = (0..1u64 << n).map(|x| f.eval_bits(x) == Some(true)).collect();
        let table = values.iter().map(|&v| Some(v)).collect();
        Ok(ZeroErrorEvaluator {
            f: FunctionObject::dense(n, 2, table)?,
            n,
            values,
            cache: HashMap::new(),
        })
    }

    /// Constant value of the restriction, or the lexicographically least
    /// 0-input (position 1 compared first).
    fn scan(&self, mask: u64, vals: u64) -> std::result::Result<bool, u64> {
        let free = full_mask(self.n) & !mask;
        let (mut has0, mut has1) = (false, false);
        let mut least: Option<u64> = None;
        let mut s = 0u64;
        loop {
            let x = (vals & mask) | s;
            if self.values[x as usize] {
                has1 = true;
            } else {
                has0 = true;
                if least.is_none_or(|l| s.reverse_bits() < l.reverse_bits()) {
                    least = Some(s);
                }
            }
            if s == free {
                break;
            }
            s = (s.wrapping_sub(free)) & free;
        }
        match (has0, has1) {
            (true, false) => Ok(false),
            (false, true) => Ok(true),
            _ => Err((vals & mask) | least.expect("has a 0-input")),
        }
    }

    fn weights(&mut self, mask: u64, vals: u64, x0: u64) -> Result<Vec<f64>> {
        let key = (mask, vals & mask);
        if let Some(w) = self.cache.get(&key) {
            return Ok(w.clone());
        }
        let assignment: Vec<(usize, u32)> = (0..self.n)
            .filter(|&i| mask >> i & 1 == 1)
            .map(|i| (i + 1, (vals >> i & 1) as u32))
            .collect();
        let free: Vec<usize> = (0..self.n).filter(|&i| mask >> i & 1 == 0).collect();
        let g = self.f.restrict(&assignment)?;
        let local = free
            .iter()
            .enumerate()
            .fold(0u64, |acc, (j, &i)| acc | ((x0 >> i & 1) << j));
        let (_, sol) = fractional_certificate(&g, &InputPoint::from_bits(free.len(), local))?;
        let mut w = vec![0.0; self.n];
        for (j, &i) in free.iter().enumerate() {
            w[i] = (2.0 * to_f64(&sol.lambda[j])).min(1.0);
        }
        self.cache.insert(key, w.clone());
        Ok(w)
    }

    pub fn evaluate(&mut self, y: &InputPoint, seed: u64) -> Result<ZeroErrorRun> {
        if y.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: y.len(),
            });
        }
        let yb = y.bits().ok_or(Error::NotBoolean)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut mask, mut vals) = (0u64, 0u64);
        let mut transcript = Vec::new();
        let mut iterations = 0;
        loop {
            let x0 = match self.scan(mask, vals) {
                Ok(value) => {
                    if value != (self.values[yb as usize]) {
                        return Err(Error::Consistency("restriction value disagrees with f(Y)".into()));
                    }
                    return Ok(ZeroErrorRun {
                        value,
                        queries: mask.count_ones() as usize,
                        iterations,
                        transcript,
                    });
                }
                Err(x0) => x0,
            };
            iterations += 1;
            let w = self.weights(mask, vals, x0)?;
            for (i, &l) in w.iter().enumerate() {
                if l > 0.0 && rng.gen_bool(l) {
                    mask |= 1 << i;
                    vals |= yb & (1 << i);
                    transcript.push(TranscriptLine {
                        position: i + 1,
                        value: yb >> i & 1 == 1,
                        restriction_hash: restriction_hash(mask, vals),
                    });
                }
            }
        }
    }
}

/// One zero-error evaluation of `f` at `y`.
pub fn zero_error_eval(f: &FunctionObject, y: &InputPoint, seed: u64) -> Result<ZeroErrorRun> {
    ZeroErrorEvaluator::new(f)?.evaluate(y, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::*;

    fn bits(s: &str) -> InputPoint {
        InputPoint::parse_bits(s).unwrap()
    }

    #[test]
    fn nonadaptive_trivial_cases() {
        let x = bits("0000");
        let all = VerifierSpec::new(x.clone(), vec![1.0; 4]).unwrap();
        let none = VerifierSpec::new(x.clone(), vec![0.0; 4]).unwrap();
        for seed in 0..20 {
            assert!(run_nonadaptive(&all, &bits("0010"), seed).reject);
            assert!(!run_nonadaptive(&none, &bits("1111"), seed).reject);
        }
        assert!(VerifierSpec::new(x.clone(), vec![1.5; 4]).is_err());
        assert!(VerifierSpec::new(x, vec![0.5; 3]).is_err());
    }

    #[test]
    fn conversion_of_single_query() {
        let v = AdaptiveVerifier::new(bits("000"), vec![(Q::one(), vec![1])]).unwrap();
        let c = adaptive_to_nonadaptive(&v).unwrap();
        assert_eq!(c.t, 2);
        // one round hits position 1 with probability 1/2; 8 rounds miss it with 2^-8
        assert_eq!(c.lambda[0], Q::new(255.into(), 256.into()));
        assert!(c.lambda[1].is_zero() && c.lambda[2].is_zero());
        assert!(c.total() <= Q::from_integer(8.into()));
    }

    #[test]
    fn conversion_of_uniform_pair() {
        let half = Q::new(1.into(), 2.into());
        let v = AdaptiveVerifier::new(bits("00"), vec![(half.clone(), vec![1]), (half, vec![2])]).unwrap();
        let c = adaptive_to_nonadaptive(&v).unwrap();
        // per round: 1/2 (tree) * 1/2 (t = 1) = 1/4; λ = 1 - (3/4)^8
        let want = Q::one() - num_traits::pow(Q::new(3.into(), 4.into()), 8);
        assert_eq!(c.lambda, vec![want.clone(), want]);
        assert!(c.lambda[0] > Q::zero() && c.lambda[0] < Q::one());
        assert!(c.total() <= Q::from_integer((4 * c.t).into()));
    }

    #[test]
    fn one_sided_examples() {
        let x = bits("00");
        let accept_all = VerifierSpec::new(x.clone(), vec![0.0, 0.0]).unwrap();
        let r = one_sided_report(&accept_all, &[bits("11")], 1000, 1);
        assert!(r.vacuous);
        assert_eq!(r.eps1, 1.0);
        assert_eq!(r.star_reject_claimed, 0.0);

        let noisy = NoisyVerifier {
            inner: VerifierSpec::new(x.clone(), vec![8.0 / 9.0, 0.0]).unwrap(),
            spurious_reject: 0.1,
        };
        let r = one_sided_report(&noisy, &[bits("10")], 20_000, 2);
        assert!((r.eps0 - 0.1).abs() < 0.02);
        assert!((r.eps1 - 0.1).abs() < 0.02);
        assert_eq!(r.star_reject_claimed, 0.0);
        let bound = r.bound.unwrap();
        let sigma = (bound * (1.0 - bound) / 20_000.0).sqrt();
        assert!(r.star_reject_bad >= bound - 3.0 * sigma);
        assert!(r.star_reject_bad >= 0.7 - 3.0 * sigma);
    }

    #[test]
    fn gap_table_minimax() {
        let g1 = make_weight_window(29, 13, 16).unwrap();
        let profile = g1.profile().unwrap().to_vec();
        let mm = child_hit_minimax(&profile, &gap_table_g1()).unwrap();
        assert_eq!(mm.value, Q::new(1.into(), 17.into()));
        let (table, opt) = optimal_child_table(&profile).unwrap();
        assert_eq!(opt.value, Q::new(1.into(), 17.into()));
        for kk in 13..=16 {
            assert_eq!(table[kk], gap_table_g1()[kk]);
        }
    }

    #[test]
    fn small_window_optimum() {
        let f = make_weight_window(5, 2, 3).unwrap();
        let profile = f.profile().unwrap().to_vec();
        let (table, opt) = optimal_child_table(&profile).unwrap();
        // brute force over a grid of tables gives no better worst case
        let grid: Vec<Q> = (0..=24).map(|i| Q::new(i.into(), 24.into())).collect();
        for kk in 1..5 {
            for g in &grid {
                let mut t = table.clone();
                t[kk] = g.clone();
                assert!(child_hit_minimax(&profile, &t).unwrap().value <= opt.value);
            }
        }
        assert!(opt.value > Q::zero());
    }

    #[test]
    fn constant_base_is_vacuous() {
        let mm = child_hit_minimax(&[true; 4], &[Q::zero(), Q::zero(), Q::zero(), Q::one()]).unwrap();
        assert!(mm.vacuous);
        assert!(mm.value.is_one());
        assert!(child_hit_minimax(&[true; 4], &[Q::one(), Q::zero(), Q::zero(), Q::one()]).is_err());
    }

    #[test]
    fn sampler_on_single_level() {
        let profile = make_weight_window(29, 13, 16).unwrap().profile().unwrap().to_vec();
        let x: Vec<bool> = (0..29).map(|i| i < 13).collect();
        for seed in 0..50 {
            let leaf = recursive_child_sampler(&profile, &gap_table_g1(), &x, seed).unwrap();
            assert!((1..=29).contains(&leaf));
        }
        let zero = vec![false; 29];
        for seed in 0..20 {
            let leaf = recursive_child_sampler(&profile, &gap_table_g1(), &zero, seed).unwrap();
            assert!((1..=29).contains(&leaf));
        }
    }

    #[test]
    fn two_level_hit_probability() {
        let profile = make_weight_window(5, 2, 3).unwrap().profile().unwrap().to_vec();
        let (table, opt) = optimal_child_table(&profile).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = make_weight_window(5, 2, 3).unwrap();
        let g2 = compose(&f, &f, 2).unwrap();
        let mut checked = 0;
        while checked < 40 {
            let x: Vec<bool> = (0..25).map(|_| rng.gen()).collect();
            let y: Vec<bool> = (0..25).map(|_| rng.gen()).collect();
            let xb = x.iter().enumerate().fold(0u64, |m, (i, &b)| m | (b as u64) << i);
            let yb = y.iter().enumerate().fold(0u64, |m, (i, &b)| m | (b as u64) << i);
            if g2.eval_bits(xb) == g2.eval_bits(yb) {
                continue;
            }
            checked += 1;
            let h = leaf_hit_probability(&profile, &table, &x, &y).unwrap();
            assert!(h >= &opt.value * &opt.value, "hit {h} below squared minimax");
        }
    }

    #[test]
    fn zero_error_trivial() {
        let or4 = make_or(4).unwrap();
        let r = zero_error_eval(&or4, &bits("0000"), 5).unwrap();
        assert!(!r.value);
        assert_eq!(r.queries, 4);
        let and4 = make_and(4).unwrap();
        assert!(zero_error_eval(&and4, &bits("1111"), 5).unwrap().value);
    }

    #[test]
    fn zero_error_exhaustive_small() {
        for n in 1..=3usize {
            for tt in 0..1u64 << (1 << n) {
                let f = FunctionObject::from_truth_bits(n, tt);
                let mut ev = ZeroErrorEvaluator::new(&f).unwrap();
                for y in 0..1u64 << n {
                    for seed in 0..10 {
                        let r = ev.evaluate(&InputPoint::from_bits(n, y), seed).unwrap();
                        assert_eq!(Some(r.value), f.eval_bits(y));
                        assert_eq!(r.transcript.len(), r.queries);
                    }
                }
            }
        }
    }
}
