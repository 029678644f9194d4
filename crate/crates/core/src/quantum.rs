//! Weighted Grover search over copy-expanded basis states, the adversary
//! bound for a single claimed input, the rotation that makes a quantum
//! verifier one-sided, and the counting bound for symmetric functions.

use num_bigint::BigUint;
use num_complex::Complex64;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::fraccert::to_f64;
use crate::function::InputPoint;
use crate::lp::Q;

const NORM_TOL: f64 = 1e-12;

/// Basis states split among positions in proportion to verifier weights.
#[derive(Clone, Debug, PartialEq)]
pub struct GroverInstance {
    copies: Vec<usize>,
    marked: Vec<bool>,
}

/// `max(1, round(N λ_i / S))` for positive weights, then adjusted to sum to
/// `N` by largest remainder.
pub fn copy_counts(lambda: &[f64], states: usize) -> Result<Vec<usize>> {
    if lambda.iter().any(|l| !l.is_finite() || *l < 0.0) {
        return Err(Error::InvalidParameters(
            "weights must be finite and nonnegative".into(),
        ));
    }
    let s: f64 = lambda.iter().sum();
    let support = lambda.iter().filter(|&&l| l > 0.0).count();
    if s <= 0.0 {
        return Err(Error::InvalidParameters("total weight must be positive".into()));
    }
    if states < support {
        return Err(Error::InvalidParameters(format!(
            "{states} basis states cannot cover {support} weighted positions"
        )));
    }
    let ideal: Vec<f64> = lambda.iter().map(|l| states as f64 * l / s).collect();
    let mut c: Vec<usize> = ideal
        .iter()
        .zip(lambda)
        .map(|(&x, &l)| if l > 0.0 { (x.round() as usize).max(1) } else { 0 })
        .collect();
    let mut total: usize = c.iter().sum();
    while total < states {
        let i = (0..c.len())
            .filter(|&i| lambda[i] > 0.0)
            .max_by(|&a, &b| {
                (ideal[a] - c[a] as f64)
                    .total_cmp(&(ideal[b] - c[b] as f64))
                    .then(b.cmp(&a))
            })
            .expect("positive support");
        c[i] += 1;
        total += 1;
    }
    while total > states {
        let i = (0..c.len())
            .filter(|&i| c[i] > 1)
            .max_by(|&a, &b| {
                (c[a] as f64 - ideal[a])
                    .total_cmp(&(c[b] as f64 - ideal[b]))
                    .then(b.cmp(&a))
            })
            .expect("some count above 1");
        c[i] -= 1;
        total -= 1;
    }
    Ok(c)
}

impl GroverInstance {
    /// `states` defaults to `n²`; `disagreement` lists the 1-based positions where `y ≠ x`.
    pub fn new(lambda: &[f64], states: Option<usize>, disagreement: &[usize]) -> Result<Self> {
        let n = lambda.len();
        let copies = copy_counts(lambda, states.unwrap_or(n * n))?;
        let mut marked = vec![false; n];
        for &p in disagreement {
            if p == 0 || p > n {
                return Err(Error::PositionOutOfRange { position: p, n });
            }
            marked[p - 1] = true;
        }
        Ok(GroverInstance { copies, marked })
    }

    pub fn from_points(lambda: &[f64], states: Option<usize>, x: &InputPoint, y: &InputPoint) -> Result<Self> {
        GroverInstance::new(lambda, states, &x.disagreement(y))
    }

    pub fn states(&self) -> usize {
        self.copies.iter().sum()
    }

    pub fn copies(&self) -> &[usize] {
        &self.copies
    }

    pub fn marked_states(&self) -> usize {
        self.copies
            .iter()
            .zip(&self.marked)
            .filter(|(_, &m)| m)
            .map(|(c, _)| c)
            .sum()
    }

    /// `arcsin(√(M/N))`.
    pub fn theta(&self) -> f64 {
        (self.marked_states() as f64 / self.states() as f64).sqrt().asin()
    }

    /// Success probability after `k` iterations by statevector simulation.
    pub fn simulate(&self, k: usize) -> f64 {
        let flags: Vec<bool> = self
            .copies
            .iter()
            .zip(&self.marked)
            .flat_map(|(&c, &m)| std::iter::repeat(m).take(c))
            .collect();
        let n = flags.len();
        if !flags.iter().any(|&m| m) {
            return 0.0;
        }
        let mut amp = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..k {
            for (a, &m) in amp.iter_mut().zip(&flags) {
                if m {
                    *a = -*a;
                }
            }
            let mean = amp.iter().sum::<f64>() / n as f64;
            for a in amp.iter_mut() {
                *a = 2.0 * mean - *a;
            }
            debug_assert!((amp.iter().map(|a| a * a).sum::<f64>() - 1.0).abs() < 1e-9);
        }
        amp.iter().zip(&flags).filter(|(_, &m)| m).map(|(a, _)| a * a).sum()
    }

    /// `sin²((2k+1)θ)`.
    pub fn closed_form(&self, k: usize) -> f64 {
        ((2 * k + 1) as f64 * self.theta()).sin().powi(2)
    }

    /// Best success probability over `0..=budget` iterations, with the iteration count.
    pub fn best_within(&self, budget: usize) -> (usize, f64) {
        (0..=budget)
            .map(|k| (k, self.closed_form(k)))
            .fold((0, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best })
    }
}

pub fn grover_simulate(instance: &GroverInstance, k: usize) -> f64 {
    instance.simulate(k)
}

/// `⌈(π/4) √(N / M_min)⌉`.
pub fn grover_iteration_budget(states: usize, min_marked: usize) -> Result<usize> {
    if min_marked == 0 || min_marked > states {
        return Err(Error::InvalidParameters(format!(
            "marked count {min_marked} is outside 1..={states}"
        )));
    }
    Ok((std::f64::consts::FRAC_PI_4 * (states as f64 / min_marked as f64).sqrt()).ceil() as usize)
}

/// Budget over a family of disagreement sets, with the smallest marked count.
pub fn family_budget(lambda: &[f64], states: Option<usize>, family: &[Vec<usize>]) -> Result<(usize, usize)> {
    let mut min_marked = usize::MAX;
    let mut n_states = 0;
    for d in family {
        let inst = GroverInstance::new(lambda, states, d)?;
        n_states = inst.states();
        min_marked = min_marked.min(inst.marked_states());
    }
    if family.is_empty() {
        return Err(Error::InvalidParameters("empty instance family".into()));
    }
    Ok((grover_iteration_budget(n_states, min_marked)?, min_marked))
}

// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq)]
pub struct AdversaryBound {
    /// Largest column load `max_i Σ_{Y: y_i ≠ x_i} β(Y)` on the side of `X`.
    pub delta_x: Q,
    /// Load on the other side, `β(X)`.
    pub delta_y: Q,
    /// `1 / (δ_X δ_Y)`; the bound is its square root.
    pub squared: Q,
    pub value: f64,
}

/// Adversary bound for the relation pairing `x` with every weighted `Y`.
pub fn adversary_bound(x: &InputPoint, weights: &[(InputPoint, Q)], beta_x: &Q) -> Result<AdversaryBound> {
    let total: Q = weights.iter().map(|(_, w)| w).sum();
    if total < Q::one() {
        return Err(Error::InvalidParameters(format!("weights over Y sum to {total} < 1")));
    }
    if *beta_x < Q::one() {
        return Err(Error::InvalidParameters(format!("β(X) = {beta_x} < 1")));
    }
    let mut load = vec![Q::zero(); x.len()];
    for (y, w) in weights {
        if w.is_negative() {
            return Err(Error::InvalidParameters("negative weight".into()));
        }
        if y.len() != x.len() {
            return Err(Error::LengthMismatch {
                expected: x.len(),
                got: y.len(),
            });
        }
        let d = x.disagreement(y);
        if d.is_empty() {
            return Err(Error::InvalidParameters("Y equals X".into()));
        }
        for p in d {
            load[p - 1] += w;
        }
    }
    let delta_x = load.into_iter().max().unwrap_or_else(Q::zero);
    if delta_x.is_zero() {
        return Err(Error::InvalidParameters("no weighted Y".into()));
    }
    let delta_y = beta_x.clone();
    let squared = (&delta_x * &delta_y).recip();
    let value = to_f64(&squared).sqrt();
    Ok(AdversaryBound {
        delta_x,
        delta_y,
        squared,
        value,
    })
}

// ---------------------------------------------------------------------------

/// Final verifier state on one input: per branch `z`, amplitude `α_z` and the
/// answer qubit `β_z|reject⟩ + γ_z|accept⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct BranchState {
    pub alpha: Vec<Complex64>,
    pub beta: Vec<Complex64>,
    pub gamma: Vec<Complex64>,
}

impl BranchState {
    pub fn new(alpha: Vec<Complex64>, beta: Vec<Complex64>, gamma: Vec<Complex64>) -> Result<Self> {
        if alpha.len() != beta.len() || alpha.len() != gamma.len() {
            return Err(Error::LengthMismatch {
                expected: alpha.len(),
                got: beta.len().min(gamma.len()),
            });
        }
        let s = BranchState { alpha, beta, gamma };
        s.check()?;
        Ok(s)
    }

    fn check(&self) -> Result<()> {
        let total: f64 = self.alpha.iter().map(|a| a.norm_sqr()).sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParameters(format!("Σ|α|² = {total}, not 1")));
        }
        for (z, (b, g)) in self.beta.iter().zip(&self.gamma).enumerate() {
            let s = b.norm_sqr() + g.norm_sqr();
            if (s - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidParameters(format!("branch {z} has |β|² + |γ|² = {s}")));
            }
        }
        Ok(())
    }

    /// `Σ |α_z γ_z|²`.
    pub fn acceptance(&self) -> f64 {
        self.alpha
            .iter()
            .zip(&self.gamma)
            .map(|(a, g)| (a * g).norm_sqr())
            .sum()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exactified {
    pub accept_x: f64,
    pub accept_y: f64,
    /// `2(ε₀ + ε₁)`.
    pub bound: f64,
    /// Whether both states share branch amplitudes; the bound relies on it.
    pub shared_alpha: bool,
    pub within_bound: bool,
}

/// Applies, per branch, the unitary `[[γ^X, -β^X], [conj β^X, conj γ^X]]`,
/// which sends the claimed input's answer qubit to `|accept⟩`.
pub fn exactify_rotation(x: &BranchState, y: &BranchState, eps0: f64, eps1: f64) -> Result<Exactified> {
    x.check()?;
    y.check()?;
    if x.alpha.len() != y.alpha.len() {
        return Err(Error::LengthMismatch {
            expected: x.alpha.len(),
            got: y.alpha.len(),
        });
    }
    if x.acceptance() < 1.0 - eps0 - NORM_TOL {
        return Err(Error::InvalidParameters(format!(
            "A^X = {} is below 1 - ε₀",
            x.acceptance()
        )));
    }
    if y.acceptance() > eps1 + NORM_TOL {
        return Err(Error::InvalidParameters(format!("A^Y = {} exceeds ε₁", y.acceptance())));
    }
    let accept = |s: &BranchState| -> f64 {
        (0..s.alpha.len())
            .map(|z| {
                let amp = x.beta[z].conj() * s.beta[z] + x.gamma[z].conj() * s.gamma[z];
                s.alpha[z].norm_sqr() * amp.norm_sqr()
            })
            .sum()
    };
    let accept_x = accept(x);
    let accept_y = accept(y);
    let bound = 2.0 * (eps0 + eps1);
    let shared_alpha = x
        .alpha
        .iter()
        .zip(&y.alpha)
        .all(|(a, b)| (a.norm_sqr() - b.norm_sqr()).abs() < 1e-12);
    Ok(Exactified {
        accept_x,
        accept_y,
        bound,
        shared_alpha,
        within_bound: accept_y <= bound + NORM_TOL,
    })
}

// ---------------------------------------------------------------------------

/// `Σ_{i ≤ d} C(N, i)`.
pub fn delta_count(big_n: u64, d: u64) -> Result<BigUint> {
    if d > big_n {
        return Err(Error::InvalidParameters(format!("d = {d} exceeds N = {big_n}")));
    }
    let mut term = BigUint::one();
    let mut total = BigUint::one();
    for i in 1..=d {
        term = term * BigUint::from(big_n - i + 1) / BigUint::from(i);
        total += &term;
    }
    Ok(total)
}

/// `⌈n log₂ n⌉`.
pub fn encoding_length(n: u64) -> u64 {
    (n as f64 * (n as f64).log2()).ceil() as u64
}

/// Largest `T` with `2T · Δ(L, 2T) · L² < 2^{n/3}`, `L = ⌈n log₂ n⌉`,
/// compared exactly after cubing both sides.
pub fn symthm_bound(n: u64) -> Result<u64> {
    if n < 2 {
        return Err(Error::InvalidParameters("n must be at least 2".into()));
    }
    let l = encoding_length(n);
    let rhs = BigUint::one() << n;
    let l2 = BigUint::from(l) * BigUint::from(l);
    let mut t = 0u64;
    loop {
        let next = t + 1;
        let d = (2 * next).min(l);
        let lhs = BigUint::from(2 * next) * delta_count(l, d)? * &l2;
        if lhs.pow(3) >= rhs {
            return Ok(t);
        }
        t = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grover_uniform_examples() {
        let inst = GroverInstance::new(&[1.0; 4], Some(16), &[1]).unwrap();
        assert_eq!(inst.copies(), &[4, 4, 4, 4]);
        assert!((inst.simulate(1) - 1.0).abs() < 1e-12);
        let none = GroverInstance::new(&[1.0; 4], Some(16), &[]).unwrap();
        for k in 0..5 {
            assert_eq!(none.simulate(k), 0.0);
        }
        for n in [8usize, 10, 32] {
            for m in 1..=3 {
                let marked: Vec<usize> = (1..=m).collect();
                let inst = GroverInstance::new(&vec![1.0; n], None, &marked).unwrap();
                for k in 0..30 {
                    assert!((inst.simulate(k) - inst.closed_form(k)).abs() < 1e-9);
                }
            }
        }
    }

    #[test]
    fn copy_counts_track_weights() {
        let c = copy_counts(&[0.1, 0.0, 5.0, 1.0], 16).unwrap();
        assert_eq!(c.iter().sum::<usize>(), 16);
        assert_eq!(c[1], 0);
        assert!(c[0] >= 1);
        assert!(c[2] > c[3]);
        assert!(copy_counts(&[0.0, 0.0], 4).is_err());
    }

    #[test]
    fn budget_examples() {
        // four copies per position: θ = 30°
        assert_eq!(grover_iteration_budget(16, 4).unwrap(), 2);
        assert_eq!(grover_iteration_budget(16, 16).unwrap(), 1);
        let (k, m) = family_budget(&[1.0, 0.0, 0.0, 0.0], None, &[vec![1]]).unwrap();
        assert_eq!((k, m), (1, 16));
        assert!(grover_iteration_budget(16, 0).is_err());
    }

    #[test]
    fn adversary_examples() {
        let x = InputPoint::zeros(4);
        let quarter = Q::new(1.into(), 4.into());
        let ws: Vec<(InputPoint, Q)> = (0..4)
            .map(|i| (InputPoint::from_bits(4, 1 << i), quarter.clone()))
            .collect();
        let b = adversary_bound(&x, &ws, &Q::one()).unwrap();
        assert_eq!(b.squared, Q::from_integer(4.into()));
        assert!((b.value - 2.0).abs() < 1e-12);
        let single = adversary_bound(&x, &[(InputPoint::from_bits(4, 3), Q::one())], &Q::one()).unwrap();
        assert!(single.squared.is_one());
        assert!(adversary_bound(&x, &ws[..2], &Q::one()).is_err());
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn rotation_examples() {
        let x = BranchState::new(vec![c(1.0)], vec![c(0.0)], vec![c(1.0)]).unwrap();
        let y = BranchState::new(vec![c(1.0)], vec![c(1.0)], vec![c(0.0)]).unwrap();
        let r = exactify_rotation(&x, &y, 0.0, 0.0).unwrap();
        assert_eq!(r.accept_x, 1.0);
        assert_eq!(r.accept_y, 0.0);
        let r = exactify_rotation(&x, &x, 0.0, 1.0).unwrap();
        assert_eq!(r.accept_x, 1.0);
    }

    #[test]
    fn rotation_with_complex_phases() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let alpha = vec![c(s), Complex64::new(0.0, s)];
        let bx = vec![Complex64::new(0.0, 0.1), c(0.05)];
        let gx: Vec<Complex64> = bx
            .iter()
            .zip([0.3f64, 1.1])
            .map(|(b, ph)| Complex64::from_polar((1.0 - b.norm_sqr()).sqrt(), ph))
            .collect();
        let x = BranchState::new(alpha.clone(), bx, gx).unwrap();
        let gy = vec![c(0.1), Complex64::new(0.0, 0.1)];
        let by: Vec<Complex64> = gy.iter().map(|g| c((1.0 - g.norm_sqr()).sqrt())).collect();
        let y = BranchState::new(alpha, by, gy).unwrap();
        let r = exactify_rotation(&x, &y, 0.05, 0.05).unwrap();
        assert!((r.accept_x - 1.0).abs() < 1e-12);
        assert!(r.shared_alpha && r.within_bound);
    }

    #[test]
    fn delta_and_counting_bound() {
        assert_eq!(delta_count(4, 2).unwrap(), BigUint::from(11u32));
        assert_eq!(delta_count(9, 0).unwrap(), BigUint::one());
        assert_eq!(delta_count(5, 5).unwrap(), BigUint::from(32u32));
        assert!(delta_count(3, 4).is_err());
        assert_eq!(symthm_bound(40).unwrap(), 0);
        let t = symthm_bound(200).unwrap();
        assert!(t >= 1);
        // the defining inequality holds at T and fails at T + 1
        let l = encoding_length(200);
        let lhs = |t: u64| BigUint::from(2 * t) * delta_count(l, (2 * t).min(l)).unwrap() * BigUint::from(l * l);
        assert!(lhs(t).pow(3) < BigUint::one() << 200u32);
        assert!(lhs(t + 1).pow(3) >= BigUint::one() << 200u32);
    }
}
