//! Verifiers, zero-error evaluation and the quantum kernels.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::ToPrimitive;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use certlab_core::quantum::{exactify_rotation, BranchState, GroverInstance};
use certlab_core::verifiers::{
    adaptive_to_nonadaptive, one_sided_transform, rejection_rate, zero_error_eval, AdaptiveVerifier, NoisyVerifier,
    VerifierSpec,
};
use certlab_core::{FunctionObject, InputPoint};

type Q = BigRational;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn zero_error_is_always_right(n in 1usize..=5, t in any::<u32>(), y in any::<u64>(), seed in any::<u64>()) {
        let t = if n == 5 { t as u64 } else { t as u64 & ((1 << (1 << n)) - 1) };
        let f = FunctionObject::from_truth_bits(n, t);
        let y = y & ((1 << n) - 1);
        let r = zero_error_eval(&f, &InputPoint::from_bits(n, y), seed).unwrap();
        prop_assert_eq!(Some(r.value), f.eval_bits(y));
        prop_assert!(r.queries <= n);
        prop_assert_eq!(r.transcript.len(), r.queries);
    }

    #[test]
    fn grover_matches_closed_form(exp in 2u32..=10, npos in 1usize..=8, marked in 0usize..=8, k in 0usize..=200) {
        let states = 1usize << exp;
        let npos = npos.min(states);
        let marked: Vec<usize> = (1..=marked.min(npos)).collect();
        let inst = GroverInstance::new(&vec![1.0; npos], Some(states), &marked).unwrap();
        prop_assert!((inst.simulate(k) - inst.closed_form(k)).abs() < 1e-9);
    }

    #[test]
    fn rotation_meets_the_bound(seed in any::<u64>(), z in 1usize..=6, e0 in 0.0f64..0.3, e1 in 0.0f64..0.3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut alpha: Vec<Complex64> =
            (0..z).map(|_| Complex64::new(rng.gen_range(0.1..1.0), rng.gen_range(-1.0..1.0))).collect();
        let norm = alpha.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        alpha.iter_mut().for_each(|a| *a /= norm);
        let mut branch = |small: f64| {
            let s: f64 = rng.gen_range(0.0..=small);
            (
                Complex64::from_polar(s.sqrt(), rng.gen_range(0.0..6.3)),
                Complex64::from_polar((1.0 - s).sqrt(), rng.gen_range(0.0..6.3)),
            )
        };
        let (bx, gx): (Vec<_>, Vec<_>) = (0..z).map(|_| branch(e0)).unzip();
        let (gy, by): (Vec<_>, Vec<_>) = (0..z).map(|_| branch(e1)).unzip();
        let x = BranchState::new(alpha.clone(), bx, gx).unwrap();
        let y = BranchState::new(alpha, by, gy).unwrap();
        let r = exactify_rotation(&x, &y, e0, e1).unwrap();
        prop_assert!((r.accept_x - 1.0).abs() < 1e-12);
        prop_assert!(r.accept_y <= 2.0 * (e0 + e1) + 1e-12);
        prop_assert!(r.shared_alpha && r.within_bound);
    }

    #[test]
    fn one_sided_never_rejects_claimed(lambda in prop::collection::vec(0.0f64..1.0, 1..6), noise in 0.0f64..0.5, seed in any::<u64>()) {
        let n = lambda.len();
        let x = InputPoint::zeros(n);
        let v = NoisyVerifier { inner: VerifierSpec::new(x.clone(), lambda).unwrap(), spurious_reject: noise };
        prop_assert_eq!(rejection_rate(&one_sided_transform(v), &x, 500, seed), 0.0);
    }
}

/// Monte Carlo replay of the conversion: pick `t ≤ T` uniformly, follow the
/// chosen tree along the all-agree path and record its `t`-th query.
fn simulated_lambda(v: &AdaptiveVerifier, t: u64, n: usize, reps: u64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = vec![0u64; n];
    for _ in 0..reps {
        let mut seen = vec![false; n];
        for _ in 0..4 * t {
            let mut r: f64 = rng.gen();
            let mut path = &v.trees()[0].1;
            for (p, pth) in v.trees() {
                let pf = p.to_f64().unwrap();
                if r < pf {
                    path = pth;
                    break;
                }
                r -= pf;
            }
            let step = rng.gen_range(0..t as usize);
            if let Some(&pos) = path.get(step) {
                seen[pos - 1] = true;
            }
        }
        for (h, s) in hits.iter_mut().zip(seen) {
            *h += s as u64;
        }
    }
    hits.iter().map(|&h| h as f64 / reps as f64).collect()
}

#[test]
fn conversion_matches_monte_carlo() {
    let x = InputPoint::zeros(4);
    let trees = vec![
        (Q::new(1.into(), 2.into()), vec![1, 2]),
        (Q::new(1.into(), 4.into()), vec![3]),
        (Q::new(1.into(), 4.into()), vec![4, 1, 2]),
    ];
    let v = AdaptiveVerifier::new(x, trees).unwrap();
    let c = adaptive_to_nonadaptive(&v).unwrap();
    assert!(c.total() <= Q::from_integer((4 * c.t).into()));
    let sim = simulated_lambda(&v, c.t, 4, 40_000, 3);
    for (exact, mc) in c.lambda.iter().zip(sim) {
        let e = exact.to_f64().unwrap();
        assert!((e - mc).abs() < 0.01, "exact {e} vs simulated {mc}");
    }
}
