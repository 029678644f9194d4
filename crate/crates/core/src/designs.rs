//! Set designs with bounded pairwise intersections, the symmetric promise
//! functions built from them, and promise-distance checks.
//!
//! Set elements are 1-based (`1..=u`). As function symbols they are shifted
//! down by one, so element `e` is symbol `e - 1`.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::function::{FunctionObject, Kind, DENSE_CAP};

/// Universe sizes above this do not fit the 128-bit set masks.
pub const MAX_UNIVERSE: usize = 128;

/// Candidate draws allowed per requested set by [`build_design`].
pub const DEFAULT_RETRIES_PER_SET: usize = 50_000;

#[derive(Clone, Debug, PartialEq)]
pub struct SetDesign {
    pub universe: usize,
    pub gamma: f64,
    pub n: usize,
    /// Sorted 1-based elements.
    pub sets: Vec<Vec<usize>>,
    /// Certified inclusive bound on pairwise intersections.
    pub bound: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DesignCheck {
    Pass,
    /// Set `index` has the wrong size, repeats an element or leaves the universe.
    BadSet {
        index: usize,
    },
    /// Sets `i` and `j` (0-based) share `intersection` elements, above the bound.
    Overlap {
        i: usize,
        j: usize,
        intersection: usize,
    },
}

impl DesignCheck {
    pub fn passed(&self) -> bool {
        matches!(self, DesignCheck::Pass)
    }
}

/// `ceil(x)` with a small tolerance so that `3.0 * 4` style products stay exact.
fn ceil_tol(x: f64) -> usize {
    (x - 1e-9).ceil().max(0.0) as usize
}

pub fn universe_size(n: usize, gamma: f64) -> usize {
    ceil_tol(gamma * n as f64)
}

pub fn intersection_bound(n: usize, gamma: f64) -> usize {
    ceil_tol(n as f64 / gamma)
}

fn set_mask(set: &[usize]) -> u128 {
    set.iter().fold(0u128, |m, &e| m | (1u128 << (e - 1)))
}

impl SetDesign {
    /// Design from explicit sets; the bound defaults to `ceil(n / gamma)`.
    pub fn from_sets(n: usize, gamma: f64, sets: Vec<Vec<usize>>) -> Result<Self> {
        if gamma <= 1.0 {
            return Err(Error::InvalidParameters(format!("gamma {gamma} must exceed 1")));
        }
        let universe = universe_size(n, gamma);
        if universe > MAX_UNIVERSE {
            return Err(Error::CapExceeded {
                what: "design universe",
                needed: universe as u128,
                cap: MAX_UNIVERSE as u128,
            });
        }
        let sets = sets
            .into_iter()
            .map(|mut s| {
                s.sort_unstable();
                s
            })
            .collect();
        Ok(SetDesign {
            universe,
            gamma,
            n,
            sets,
            bound: intersection_bound(n, gamma),
        })
    }

    pub fn m(&self) -> usize {
        self.sets.len()
    }

    pub fn masks(&self) -> Vec<u128> {
        self.sets.iter().map(|s| set_mask(s)).collect()
    }

    /// Largest intersection over distinct pairs, or `None` with fewer than two sets.
    pub fn max_intersection(&self) -> Option<usize> {
        let masks = self.masks();
        let mut best = None;
        for i in 0..masks.len() {
            for j in i + 1..masks.len() {
                let k = (masks[i] & masks[j]).count_ones() as usize;
                best = Some(best.map_or(k, |b: usize| b.max(k)));
            }
        }
        best
    }
}

/// Randomized greedy construction with the default retry budget.
pub fn build_design(n: usize, gamma: f64, target_m: usize, seed: u64) -> Result<SetDesign> {
    build_design_with_budget(
        n,
        gamma,
        target_m,
        seed,
        target_m.saturating_mul(DEFAULT_RETRIES_PER_SET),
    )
}

pub fn build_design_with_budget(n: usize, gamma: f64, target_m: usize, seed: u64, budget: usize) -> Result<SetDesign> {
    let mut design = SetDesign::from_sets(n, gamma, Vec::new())?;
    if n == 0 || n > design.universe {
        return Err(Error::InvalidParameters(format!(
            "cannot draw {n}-subsets of a universe of {}",
            design.universe
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept: Vec<u128> = Vec::new();
    let mut draws = 0usize;
    while kept.len() < target_m {
        if draws >= budget {
            return Err(Error::Infeasible(format!(
                "retry budget {budget} exhausted with m = {} of {target_m}",
                kept.len()
            )));
        }
        draws += 1;
        let mask = sample(&mut rng, design.universe, n)
            .iter()
            .fold(0u128, |m, e| m | (1u128 << e));
        if kept.iter().all(|&k| (k & mask).count_ones() as usize <= design.bound) {
            kept.push(mask);
        }
    }
    design.sets = kept
        .iter()
        .map(|&m| {
            (0..design.universe)
                .filter(|&e| m >> e & 1 == 1)
                .map(|e| e + 1)
                .collect()
        })
        .collect();
    Ok(design)
}

pub fn verify_design(d: &SetDesign) -> DesignCheck {
    for (index, s) in d.sets.iter().enumerate() {
        let distinct = s.windows(2).all(|w| w[0] < w[1]);
        let in_range = s.iter().all(|&e| e >= 1 && e <= d.universe);
        if s.len() != d.n || !distinct || !in_range {
            return DesignCheck::BadSet { index };
        }
    }
    let masks = d.masks();
    for i in 0..masks.len() {
        for j in i + 1..masks.len() {
            let intersection = (masks[i] & masks[j]).count_ones() as usize;
            if intersection > d.bound {
                return DesignCheck::Overlap { i, j, intersection };
            }
        }
    }
    DesignCheck::Pass
}

/// Text form: header `u γ n m`, one sorted set per line, then a comment
/// recording that the intersection bound is inclusive.
pub fn write_design(d: &SetDesign) -> String {
    let mut out = format!("{} {} {} {}\n", d.universe, d.gamma, d.n, d.m());
    for s in &d.sets {
        let line: Vec<String> = s.iter().map(|e| e.to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    let _ = writeln!(out, "# pairwise intersections <= {} (inclusive bound)", d.bound);
    out
}

pub fn parse_design(text: &str) -> Result<SetDesign> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let (hline, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        message: "missing header".into(),
    })?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    let bad = |line: usize, message: String| Error::Parse { line, message };
    if fields.len() != 4 {
        return Err(bad(hline, "header must be `u gamma n m`".into()));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|e| bad(hline, format!("{s:?}: {e}")));
    let u = num(fields[0])?;
    let gamma: f64 = fields[1]
        .parse()
        .map_err(|e| bad(hline, format!("{:?}: {e}", fields[1])))?;
    let n = num(fields[2])?;
    let m = num(fields[3])?;
    let mut sets = Vec::with_capacity(m);
    for (line, l) in lines {
        let set = l
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| bad(line, format!("{t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        if set.len() != n {
            return Err(bad(line, format!("set has {} elements, expected {n}", set.len())));
        }
        sets.push(set);
    }
    if sets.len() != m {
        return Err(bad(hline, format!("header promises {m} sets, found {}", sets.len())));
    }
    let d = SetDesign::from_sets(n, gamma, sets)?;
    if d.universe != u {
        return Err(bad(
            hline,
            format!("universe {u} does not match ceil(gamma*n) = {}", d.universe),
        ));
    }
    Ok(d)
}

/// Domain data of a design-based promise function.
#[derive(Clone, Debug, PartialEq)]
pub struct DesignDomain {
    pub design: SetDesign,
    pub labels: Vec<bool>,
    index: HashMap<u128, usize>,
}

impl DesignDomain {
    pub fn evaluate(&self, xs: &[u32]) -> Option<bool> {
        let mut mask = 0u128;
        for &x in xs {
            let bit = 1u128.checked_shl(x)?;
            if mask & bit != 0 {
                return None;
            }
            mask |= bit;
        }
        self.index.get(&mask).map(|&j| self.labels[j])
    }

    /// Index of the set a domain point orders, if any.
    pub fn class_of(&self, xs: &[u32]) -> Option<usize> {
        let mask = xs.iter().fold(0u128, |m, &x| m | (1u128 << x));
        self.index.get(&mask).copied()
    }

    pub fn enumerate_domain(&self, visit: &mut dyn FnMut(&[u32], bool)) -> Result<()> {
        let fact = (1..=self.design.n as u64).try_fold(1u64, |a, k| a.checked_mul(k));
        let total = fact.and_then(|f| f.checked_mul(self.design.m() as u64));
        if total.is_none_or(|t| t > DENSE_CAP) {
            return Err(Error::CapExceeded {
                what: "design domain enumeration",
                needed: total.map_or(u128::MAX, u128::from),
                cap: DENSE_CAP as u128,
            });
        }
        for (j, s) in self.design.sets.iter().enumerate() {
            let mut symbols: Vec<u32> = s.iter().map(|&e| e as u32 - 1).collect();
            permutations(&mut symbols, 0, &mut |p| visit(p, self.labels[j]));
        }
        Ok(())
    }
}

fn permutations(items: &mut Vec<u32>, k: usize, visit: &mut dyn FnMut(&[u32])) {
    if k == items.len() {
        visit(items);
        return;
    }
    for i in k..items.len() {
        items.swap(k, i);
        permutations(items, k + 1, visit);
        items.swap(k, i);
    }
}

/// Promise function whose domain is every ordering of every design set, valued by `labels`.
pub fn design_to_symmetric_partial(d: &SetDesign, labels: &[bool]) -> Result<FunctionObject> {
    if labels.len() != d.m() {
        return Err(Error::LengthMismatch {
            expected: d.m(),
            got: labels.len(),
        });
    }
    if let DesignCheck::BadSet { index } = verify_design(d) {
        return Err(Error::InvalidParameters(format!("set {} is malformed", index + 1)));
    }
    let mut index = HashMap::new();
    for (j, mask) in d.masks().into_iter().enumerate() {
        if let Some(prev) = index.insert(mask, j) {
            return Err(Error::InvalidParameters(format!(
                "sets {} and {} are identical",
                prev + 1,
                j + 1
            )));
        }
    }
    let domain = DesignDomain {
        design: d.clone(),
        labels: labels.to_vec(),
        index,
    };
    Ok(FunctionObject::from_parts(
        d.n,
        d.universe as u32,
        Kind::Design(Arc::new(domain)),
        None,
    ))
}

/// Seeded random label per set.
pub fn random_labels(m: usize, seed: u64) -> Vec<bool> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..m).map(|_| rng.gen()).collect()
}

/// Visits every one-to-one (value 0) and two-to-one (value 1) sequence of
/// length `n` over `n^2` symbols.
pub(crate) fn enumerate_collision_domain(n: usize, visit: &mut dyn FnMut(&[u32], bool)) -> Result<()> {
    let q = (n * n) as u64;
    let one_to_one = (0..n as u64).try_fold(1u64, |a, k| a.checked_mul(q - k));
    if one_to_one.is_none_or(|c| c > DENSE_CAP) {
        return Err(Error::CapExceeded {
            what: "collision domain enumeration",
            needed: one_to_one.map_or(u128::MAX, u128::from),
            cap: DENSE_CAP as u128,
        });
    }
    let mut counts = vec![0u8; n * n];
    let mut seq = vec![0u32; n];
    fill(&mut seq, 0, &mut counts, 1, &mut |s| visit(s, false));
    fill(&mut seq, 0, &mut counts, 2, &mut |s| visit(s, true));
    Ok(())
}

/// Sequences in which every used symbol appears exactly `mult` times.
fn fill(seq: &mut [u32], k: usize, counts: &mut [u8], mult: u8, visit: &mut dyn FnMut(&[u32])) {
    let open = counts.iter().filter(|&&c| c > 0 && c < mult).count();
    let remaining = seq.len() - k;
    if open > remaining {
        return;
    }
    if remaining == 0 {
        visit(seq);
        return;
    }
    for s in 0..counts.len() {
        if counts[s] < mult {
            counts[s] += 1;
            seq[k] = s as u32;
            fill(seq, k + 1, counts, mult, visit);
            counts[s] -= 1;
        }
    }
}

/// Certified lower bound on the number of positions where two domain points
/// with different values differ.
///
/// Design functions use `n - max |S_i ∩ S_j|` over all distinct pairs. Collision
/// functions are brute-forced when the domain is enumerable and sampled otherwise.
pub fn min_pairwise_disagreement(f: &FunctionObject, sample_budget: usize, seed: u64) -> Result<usize> {
    match f.kind() {
        Kind::Design(d) => {
            let max = d
                .design
                .max_intersection()
                .ok_or_else(|| Error::InvalidParameters("fewer than two domain classes".into()))?;
            Ok(d.design.n - max)
        }
        Kind::Collision => {
            let n = f.n();
            if let Ok(best) = collision_brute_force(n) {
                return Ok(best);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let q = (n * n) as u32;
            let mut best = n;
            for _ in 0..sample_budget {
                let x: Vec<u32> = sample(&mut rng, q as usize, n).iter().map(|v| v as u32).collect();
                let vals: Vec<u32> = sample(&mut rng, q as usize, n / 2).iter().map(|v| v as u32).collect();
                let mut y: Vec<u32> = vals.iter().flat_map(|&v| [v, v]).collect();
                rand::seq::SliceRandom::shuffle(y.as_mut_slice(), &mut rng);
                best = best.min(x.iter().zip(&y).filter(|(a, b)| a != b).count());
            }
            Ok(best)
        }
        _ => Err(Error::Unsupported(format!(
            "minimum disagreement of a {} function",
            f.kind_name()
        ))),
    }
}

fn collision_brute_force(n: usize) -> Result<usize> {
    let mut zeros = Vec::new();
    let mut ones = Vec::new();
    enumerate_collision_domain(n, &mut |s, v| {
        if v {
            ones.push(s.to_vec())
        } else {
            zeros.push(s.to_vec())
        }
    })?;
    let mut best = n;
    for y in &ones {
        for x in &zeros {
            let d = x.iter().zip(y).filter(|(a, b)| a != b).count();
            best = best.min(d);
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{make_collision, InputPoint};

    fn hand_design() -> SetDesign {
        SetDesign::from_sets(
            4,
            2.0,
            vec![vec![1, 2, 3, 4], vec![5, 6, 7, 8], vec![1, 2, 5, 6], vec![3, 4, 7, 8]],
        )
        .unwrap()
    }

    #[test]
    fn hand_design_passes() {
        let d = hand_design();
        assert_eq!(d.universe, 8);
        assert_eq!(d.bound, 2);
        assert_eq!(verify_design(&d), DesignCheck::Pass);
    }

    #[test]
    fn identical_sets_fail_with_witness() {
        let d = SetDesign::from_sets(4, 2.0, vec![vec![1, 2, 3, 4], vec![1, 2, 3, 4]]).unwrap();
        assert_eq!(
            verify_design(&d),
            DesignCheck::Overlap {
                i: 0,
                j: 1,
                intersection: 4
            }
        );
        assert!(design_to_symmetric_partial(&d, &[false, true]).is_err());
    }

    #[test]
    fn greedy_design_n12_gamma3() {
        let d = build_design(12, 3.0, 16, 1).unwrap();
        assert_eq!(d.universe, 36);
        assert_eq!(d.m(), 16);
        assert!(verify_design(&d).passed());
        assert!(d.max_intersection().unwrap() <= 4);
        let single = build_design(5, 2.0, 1, 9).unwrap();
        assert_eq!(single.m(), 1);
        assert!(verify_design(&single).passed());
    }

    #[test]
    fn design_file_round_trip() {
        let d = build_design(6, 2.5, 5, 3).unwrap();
        let text = write_design(&d);
        assert!(text.starts_with("15 2.5 6 5\n"));
        assert_eq!(parse_design(&text).unwrap(), d);
        assert!(parse_design("8 2 4 2\n1 2 3 4\n").is_err());
    }

    #[test]
    fn design_function_domain() {
        let d = SetDesign::from_sets(3, 2.0, vec![vec![1, 2, 3], vec![4, 5, 6]]).unwrap();
        let f = design_to_symmetric_partial(&d, &[false, true]).unwrap();
        let mut count = 0;
        f.for_each_domain_point(|xs, v| {
            count += 1;
            assert_eq!(v, xs[0] >= 3);
        })
        .unwrap();
        assert_eq!(count, 2 * 6);
        let p = InputPoint::new(vec![2, 0, 1]);
        assert_eq!(f.evaluate(&p).unwrap(), Some(false));
        assert_eq!(f.evaluate(&InputPoint::new(vec![5, 3, 4])).unwrap(), Some(true));
        assert_eq!(f.evaluate(&InputPoint::new(vec![0, 0, 1])).unwrap(), None);
        assert_eq!(f.evaluate(&InputPoint::new(vec![0, 3, 1])).unwrap(), None);
    }

    #[test]
    fn min_disagreement_examples() {
        let d = build_design(12, 3.0, 16, 1).unwrap();
        let f = design_to_symmetric_partial(&d, &random_labels(16, 2)).unwrap();
        assert!(min_pairwise_disagreement(&f, 0, 0).unwrap() >= 8);
        let col = make_collision(4).unwrap();
        assert_eq!(min_pairwise_disagreement(&col, 0, 0).unwrap(), 2);
        let one = build_design(4, 2.0, 1, 0).unwrap();
        let g = design_to_symmetric_partial(&one, &[true]).unwrap();
        assert!(min_pairwise_disagreement(&g, 0, 0).is_err());
    }

    #[test]
    fn collision_enumeration_counts() {
        let (mut zeros, mut ones) = (0, 0);
        enumerate_collision_domain(4, &mut |_, v| if v { ones += 1 } else { zeros += 1 }).unwrap();
        assert_eq!(zeros, 16 * 15 * 14 * 13);
        assert_eq!(ones, 3 * 16 * 15);
    }
}
