//! Engines against brute-force oracles on small random functions.

use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;

use certlab_core::fraccert::{fc_symmetric, fractional_certificate};
use certlab_core::function::{compose, make_majority};
use certlab_core::measures::{
    block_sensitivity, block_sensitivity_max, certificate_complexity, certificate_complexity_max,
    composed_level_values, decision_tree_complexity, symmetric_measures,
};
use certlab_core::poly::mobius_transform;
use certlab_core::text::{parse_function, serialize_function};
use certlab_core::{FunctionObject, InputPoint};

type Q = BigRational;

/// Smallest set of positions whose values at `x` force `f`.
fn brute_certificate(n: usize, table: u64, x: u64) -> usize {
    let v = table >> x & 1;
    (0u64..1 << n)
        .filter(|&s| (0..1u64 << n).all(|y| (y ^ x) & s != 0 || table >> y & 1 == v))
        .map(|s| s.count_ones() as usize)
        .min()
        .unwrap()
}

/// Largest number of disjoint sensitive blocks, by search over all blocks.
fn brute_bs(n: usize, table: u64, x: u64) -> usize {
    let v = table >> x & 1;
    let sens: Vec<u64> = (1u64..1 << n).filter(|&b| table >> (x ^ b) & 1 != v).collect();
    fn go(sens: &[u64], used: u64, from: usize) -> usize {
        let mut best = 0;
        for i in from..sens.len() {
            if sens[i] & used == 0 {
                best = best.max(1 + go(sens, used | sens[i], i + 1));
            }
        }
        best
    }
    go(&sens, 0, 0)
}

/// Minimum depth over all decision trees, by recursion on restrictions.
fn brute_depth(n: usize, table: u64) -> usize {
    fn go(n: usize, fixed: u64, vals: u64, table: u64) -> usize {
        let pts: Vec<u64> = (0..1u64 << n).filter(|y| y & fixed == vals).collect();
        let first = table >> pts[0] & 1;
        if pts.iter().all(|&y| table >> y & 1 == first) {
            return 0;
        }
        (0..n)
            .filter(|i| fixed >> i & 1 == 0)
            .map(|i| {
                let b = 1u64 << i;
                1 + go(n, fixed | b, vals, table).max(go(n, fixed | b, vals | b, table))
            })
            .min()
            .unwrap()
    }
    go(n, 0, 0, table)
}

fn table_strategy() -> impl Strategy<Value = (usize, u64)> {
    (1usize..=4).prop_flat_map(|n| {
        let mask = (1u64 << (1 << n)) - 1;
        (Just(n), any::<u64>().prop_map(move |t| t & mask))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn certificate_and_bs_match_brute_force((n, t) in table_strategy(), xr in any::<u64>()) {
        let f = FunctionObject::from_truth_bits(n, t);
        let x = xr & ((1 << n) - 1);
        let xp = InputPoint::from_bits(n, x);
        prop_assert_eq!(certificate_complexity(&f, &xp).unwrap().0, brute_certificate(n, t, x));
        prop_assert_eq!(block_sensitivity(&f, &xp).unwrap().0, brute_bs(n, t, x));
    }

    #[test]
    fn decision_tree_matches_brute_force((n, t) in table_strategy()) {
        let f = FunctionObject::from_truth_bits(n, t);
        prop_assert_eq!(decision_tree_complexity(&f).unwrap(), brute_depth(n, t));
    }

    #[test]
    fn sandwich_on_five_variables(t in any::<u32>(), x in 0u64..32) {
        let f = FunctionObject::from_truth_bits(5, t as u64);
        let xp = InputPoint::from_bits(5, x);
        let bs = Q::from_integer(block_sensitivity(&f, &xp).unwrap().0.into());
        let c = Q::from_integer(certificate_complexity(&f, &xp).unwrap().0.into());
        let d = Q::from_integer(decision_tree_complexity(&f).unwrap().into());
        let (lp, sol) = fractional_certificate(&f, &xp).unwrap();
        sol.verify(&lp).unwrap();
        prop_assert!(bs <= sol.value && sol.value <= c && c <= d);
    }

    #[test]
    fn fc_does_not_grow_under_restriction(t in any::<u32>(), x in 0u64..32, fix in 1u64..31) {
        let f = FunctionObject::from_truth_bits(5, t as u64);
        let xp = InputPoint::from_bits(5, x);
        let assignment: Vec<(usize, u32)> = (0..5)
            .filter(|i| fix >> i & 1 == 1)
            .map(|i| (i + 1, (x >> i & 1) as u32))
            .collect();
        let g = f.restrict(&assignment).unwrap();
        let free: Vec<u32> = (0..5).filter(|i| fix >> i & 1 == 0).map(|i| (x >> i & 1) as u32).collect();
        let full = fractional_certificate(&f, &xp).unwrap().1.value;
        let restricted = fractional_certificate(&g, &InputPoint::new(free)).unwrap().1.value;
        prop_assert!(restricted <= full);
    }

    #[test]
    fn symmetric_closed_forms_match_generic(profile in prop::collection::vec(any::<bool>(), 2..=9), w in 0usize..9) {
        let n = profile.len() - 1;
        let w = w % (n + 1);
        let f = FunctionObject::symmetric(profile).unwrap();
        let x = InputPoint::from_bits(n, (1u64 << w) - 1);
        let dense = f.to_dense().unwrap();
        let (c, bs) = symmetric_measures(&f, w).unwrap();
        prop_assert_eq!(c, certificate_complexity(&dense, &x).unwrap().0);
        prop_assert_eq!(bs, block_sensitivity(&dense, &x).unwrap().0);
        prop_assert_eq!(fc_symmetric(&f, w).unwrap(), fractional_certificate(&dense, &x).unwrap().1.value);
    }

    #[test]
    fn mobius_polynomial_reproduces_the_table((n, t) in table_strategy()) {
        let f = FunctionObject::from_truth_bits(n, t);
        let p = mobius_transform(&f).unwrap();
        for x in 0..1u64 << n {
            let want = if t >> x & 1 == 1 { Q::one() } else { Q::zero() };
            prop_assert_eq!(p.eval_bits(x), want);
        }
    }

    #[test]
    fn text_round_trip((n, t) in table_strategy()) {
        let f = FunctionObject::from_truth_bits(n, t);
        let g = parse_function(&serialize_function(&f).unwrap()).unwrap();
        for x in 0..1u64 << n {
            prop_assert_eq!(f.eval_bits(x), g.eval_bits(x));
        }
    }
}

#[test]
fn composed_values_match_generic_engine() {
    let maj = make_majority(3).unwrap();
    let g = compose(&maj, &maj, 2).unwrap();
    let level = composed_level_values(&g).unwrap();
    let dense = g.to_dense().unwrap();
    let c = certificate_complexity_max(&dense).unwrap();
    let bs = block_sensitivity_max(&dense).unwrap();
    assert_eq!((level.c0, level.c1), (c.zero as u128, c.one as u128));
    assert_eq!((level.bs0, level.bs1), (bs.zero as u128, bs.one as u128));
}

#[test]
fn fc_of_or_is_n() {
    let f = FunctionObject::from_predicate(5, |m| m != 0).unwrap();
    let v = fractional_certificate(&f, &InputPoint::zeros(5)).unwrap().1.value;
    assert_eq!(v.to_u32(), Some(5));
}
