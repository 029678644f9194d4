//! Level-by-level certificate complexity of iterated compositions in big
//! integers, and the separation exponents read off its growth rate.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use certlab_core::measures::certificate_shape;
use certlab_core::{Error, Result};

/// Number of recurrence steps used to estimate the growth constant.
pub const GROWTH_STEPS: usize = 200;
/// Convergence tolerance on consecutive ratios.
pub const GROWTH_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Rule {
    /// `C¹ ← a C¹ + b C⁰`, `C⁰ ← k max(C¹, C⁰)`.
    Linear { a: u64, b: u64, k: u64 },
    /// Exact certificate recurrence for a symmetric outer function given by its profile.
    Symmetric(Vec<bool>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceSpec {
    pub c0: u64,
    pub c1: u64,
    pub bs: u64,
    /// Largest fractional certificate complexity at level one, when known.
    pub fc: Option<BigRational>,
    pub rule: Rule,
}

impl RecurrenceSpec {
    pub fn linear(c0: u64, c1: u64, bs: u64, a: u64, b: u64, k: u64) -> Result<Self> {
        if c0 == 0 || c1 == 0 || bs == 0 || a + b == 0 || k == 0 {
            return Err(Error::InvalidParameters(
                "recurrence needs positive base values and coefficients".into(),
            ));
        }
        Ok(RecurrenceSpec {
            c0,
            c1,
            bs,
            fc: None,
            rule: Rule::Linear { a, b, k },
        })
    }

    pub fn symmetric(c0: u64, c1: u64, bs: u64, profile: Vec<bool>) -> Result<Self> {
        if c0 == 0 || c1 == 0 || bs == 0 {
            return Err(Error::InvalidParameters("recurrence needs positive base values".into()));
        }
        if profile.iter().all(|&v| v == profile[0]) {
            return Err(Error::InvalidParameters("constant outer function".into()));
        }
        Ok(RecurrenceSpec {
            c0,
            c1,
            bs,
            fc: None,
            rule: Rule::Symmetric(profile),
        })
    }

    pub fn with_fc(mut self, fc: BigRational) -> Self {
        self.fc = Some(fc);
        self
    }

    fn step(&self, c0: &BigUint, c1: &BigUint) -> (BigUint, BigUint) {
        match &self.rule {
            Rule::Linear { a, b, k } => {
                let m = c0.max(c1);
                (m * *k, c1 * *a + c0 * *b)
            }
            Rule::Symmetric(profile) => {
                let (mut n0, mut n1) = (BigUint::zero(), BigUint::zero());
                for w in 0..profile.len() {
                    let (s0, s1) = certificate_shape(profile, w);
                    let cost = c0 * s0 + c1 * s1;
                    let slot = if profile[w] { &mut n1 } else { &mut n0 };
                    if cost > *slot {
                        *slot = cost;
                    }
                }
                (n0, n1)
            }
        }
    }

    /// `(C⁰_t, C¹_t)` for `t = 1..=steps`.
    pub fn iterate(&self, steps: usize) -> Vec<(BigUint, BigUint)> {
        let mut out = Vec::with_capacity(steps);
        let mut cur = (BigUint::from(self.c0), BigUint::from(self.c1));
        for _ in 0..steps {
            out.push(cur.clone());
            cur = self.step(&cur.0, &cur.1);
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Growth {
    pub ratio: f64,
    pub converged: bool,
    /// Last two consecutive ratios.
    pub last: (f64, f64),
}

fn ratio(a: &BigUint, b: &BigUint) -> f64 {
    BigRational::new(a.clone().into(), b.clone().into())
        .to_f64()
        .unwrap_or(f64::NAN)
}

/// Consecutive ratio of `C_t = max(C⁰_t, C¹_t)` after [`GROWTH_STEPS`] steps.
pub fn growth_constant(r: &RecurrenceSpec) -> Growth {
    let seq = r.iterate(GROWTH_STEPS + 1);
    let c: Vec<&BigUint> = seq.iter().map(|(a, b)| a.max(b)).collect();
    let t = c.len() - 1;
    let r1 = ratio(c[t - 1], c[t - 2]);
    let r2 = ratio(c[t], c[t - 1]);
    Growth {
        ratio: r2,
        converged: (r2 - r1).abs() < GROWTH_TOL,
        last: (r1, r2),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Exponents {
    /// `ln bs₁ / ln growth`.
    pub rc_vs_c: f64,
    /// `2 / rc_vs_c`.
    pub c_vs_qc: f64,
    /// `ln bs₁ / ln FC₁`, when `FC₁` is known.
    pub bs_vs_rc: Option<f64>,
    pub growth: Growth,
}

pub fn separation_exponents(r: &RecurrenceSpec) -> Exponents {
    let growth = growth_constant(r);
    let lbs = (r.bs as f64).ln();
    let rc_vs_c = lbs / growth.ratio.ln();
    Exponents {
        rc_vs_c,
        c_vs_qc: 2.0 / rc_vs_c,
        bs_vs_rc: r.fc.as_ref().map(|fc| lbs / fc.to_f64().unwrap_or(f64::NAN).ln()),
        growth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use certlab_core::function::make_weight_window;

    #[test]
    fn g_family_constants() {
        let r = RecurrenceSpec::linear(17, 26, 17, 13, 13, 17).unwrap();
        let e = separation_exponents(&r);
        let root = (13.0 + 1053f64.sqrt()) / 2.0;
        assert!(e.growth.converged);
        assert!((e.growth.ratio - root).abs() < 1e-6);
        assert!((e.rc_vs_c - 0.907).abs() < 1e-3);
        assert!((e.c_vs_qc - 2.205).abs() < 2e-3);
    }

    #[test]
    fn exact_rule_matches_linear_rule_for_g1() {
        let p = make_weight_window(29, 13, 16).unwrap().profile().unwrap().to_vec();
        let exact = RecurrenceSpec::symmetric(17, 26, 17, p).unwrap();
        let lin = RecurrenceSpec::linear(17, 26, 17, 13, 13, 17).unwrap();
        assert_eq!(exact.iterate(30), lin.iterate(30));
    }

    #[test]
    fn h_family_constants() {
        let r = RecurrenceSpec::linear(5, 5, 4, 5, 0, 5)
            .unwrap()
            .with_fc(BigRational::new(9.into(), 2.into()));
        let e = separation_exponents(&r);
        assert!((e.growth.ratio - 5.0).abs() < 1e-12);
        assert!((e.rc_vs_c - 4f64.ln() / 5f64.ln()).abs() < 1e-12);
        assert!((e.bs_vs_rc.unwrap() - 0.922).abs() < 1e-3);
    }

    #[test]
    fn invalid_specs() {
        assert!(RecurrenceSpec::linear(0, 1, 1, 1, 1, 1).is_err());
        assert!(RecurrenceSpec::symmetric(1, 1, 1, vec![true, true]).is_err());
    }
}
