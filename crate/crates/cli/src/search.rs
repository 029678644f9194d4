//! Searches behind the separation examples: weight windows whose iterated
//! composition separates certificate complexity from its randomized
//! counterpart, and 6-variable functions with uniform `C^X` and `bs^X`.

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use certlab_core::fraccert::fractional_certificate;
use certlab_core::function::make_weight_window;
use certlab_core::measures::{
    block_sensitivity, certificate_complexity, composition_step, max_packing, CubeFunction, LevelValues,
};
use certlab_core::verifiers::optimal_child_table;
use certlab_core::{Error, FunctionObject, InputPoint, Result};

use crate::recurrence::{separation_exponents, RecurrenceSpec};

pub const WINDOW_SEARCH_MAX_N: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct WindowEntry {
    pub n: usize,
    pub a: usize,
    pub b: usize,
    pub level: LevelValues,
    pub growth: f64,
    pub converged: bool,
    /// `ln bs / ln growth`, using `min(bs⁰, bs¹)` when they differ.
    pub bs_exponent: f64,
    /// Best worst-case child hit probability of the recursive verifier.
    pub hit: BigRational,
    /// `ln(1/hit) / ln growth`: an exponent the verifier actually achieves.
    pub certified_exponent: f64,
}

impl WindowEntry {
    pub fn equal_bs(&self) -> bool {
        self.level.bs0 == self.level.bs1
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct WindowSearch {
    /// Windows with `bs⁰ = bs¹`, best first.
    pub ranked: Vec<WindowEntry>,
    /// Windows with `bs⁰ ≠ bs¹`; their exponents are unproven.
    pub unequal: Vec<WindowEntry>,
}

fn window_entry(n: usize, a: usize, b: usize) -> Result<Option<WindowEntry>> {
    let f = make_weight_window(n, a, b)?;
    let profile = f.profile().expect("symmetric").to_vec();
    let level = composition_step(&profile, LevelValues::identity());
    let bs = level.bs0.min(level.bs1);
    let spec = RecurrenceSpec::symmetric(level.c0 as u64, level.c1 as u64, bs as u64, profile.clone())?;
    let e = separation_exponents(&spec);
    if e.growth.ratio <= 1.0 || bs < 2 {
        return Ok(None);
    }
    let (_, mm) = optimal_child_table(&profile)?;
    if mm.vacuous {
        return Ok(None);
    }
    let hit = mm.value;
    let certified_exponent = -hit.to_f64().unwrap_or(f64::NAN).ln() / e.growth.ratio.ln();
    Ok(Some(WindowEntry {
        n,
        a,
        b,
        level,
        growth: e.growth.ratio,
        converged: e.growth.converged,
        bs_exponent: e.rc_vs_c,
        hit,
        certified_exponent,
    }))
}

/// All nonconstant windows `[a, b]` on `n ≤ n_max` inputs, ranked by the
/// certified exponent (smaller is a stronger separation), ties by `(n, a, b)`.
pub fn window_search(n_max: usize) -> Result<WindowSearch> {
    if n_max > WINDOW_SEARCH_MAX_N {
        return Err(Error::CapExceeded {
            what: "window search size",
            needed: n_max as u128,
            cap: WINDOW_SEARCH_MAX_N as u128,
        });
    }
    let jobs: Vec<(usize, usize, usize)> = (2..=n_max)
        .flat_map(|n| (0..=n).flat_map(move |a| (a..=n).map(move |b| (n, a, b))))
        .filter(|&(n, a, b)| !(a == 0 && b == n))
        .collect();
    let entries: Vec<WindowEntry> = jobs
        .par_iter()
        .map(|&(n, a, b)| window_entry(n, a, b))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();
    let (mut ranked, mut unequal): (Vec<_>, Vec<_>) = entries.into_iter().partition(|e| e.equal_bs());
    let key = |x: &WindowEntry, y: &WindowEntry| {
        x.certified_exponent
            .total_cmp(&y.certified_exponent)
            .then((x.n, x.a, x.b).cmp(&(y.n, y.a, y.b)))
    };
    ranked.sort_by(key);
    unequal.sort_by(key);
    Ok(WindowSearch { ranked, unequal })
}

// ---------------------------------------------------------------------------

pub const UNIFORM_C: usize = 5;
pub const UNIFORM_BS: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct UniformCheck {
    pub pass: bool,
    /// First input (in index order) where a measure differs from its target.
    pub witness: Option<(InputPoint, usize, usize)>,
    /// Largest `FC^X`, reported for passing functions.
    pub fc_max: Option<BigRational>,
}

fn measures_fast(cube: &CubeFunction, x: u64) -> Result<(usize, usize)> {
    let a = cube.analyze(x)?;
    let (c, _) = a.certificate();
    let bs = max_packing(&a.minimal_blocks()).len();
    Ok((c, bs))
}

/// Verifies `C^X = 5` and `bs^X = 4` at all 64 inputs with the verified engines.
pub fn uniform_measure_check(f: &FunctionObject) -> Result<UniformCheck> {
    if f.n() != 6 || !f.is_boolean() || !f.is_total() {
        return Err(Error::InvalidParameters(
            "expected a total Boolean function on 6 variables".into(),
        ));
    }
    for x in 0..64u64 {
        let xp = InputPoint::from_bits(6, x);
        let (c, _) = certificate_complexity(f, &xp)?;
        let (bs, _) = block_sensitivity(f, &xp)?;
        if c != UNIFORM_C || bs != UNIFORM_BS {
            return Ok(UniformCheck {
                pass: false,
                witness: Some((xp, c, bs)),
                fc_max: None,
            });
        }
    }
    let mut fc_max: Option<BigRational> = None;
    for x in 0..64u64 {
        let (_, sol) = fractional_certificate(f, &InputPoint::from_bits(6, x))?;
        if fc_max.as_ref().is_none_or(|m| sol.value > *m) {
            fc_max = Some(sol.value);
        }
    }
    Ok(UniformCheck {
        pass: true,
        witness: None,
        fc_max,
    })
}

fn violation(table: u64) -> Result<usize> {
    let f = FunctionObject::from_truth_bits(6, table);
    let cube = CubeFunction::new(&f)?;
    let mut v = 0;
    for x in 0..64u64 {
        let (c, bs) = measures_fast(&cube, x)?;
        v += c.abs_diff(UNIFORM_C) + bs.abs_diff(UNIFORM_BS);
    }
    Ok(v)
}

/// Seeded simulated annealing on the truth table with single-bit flips,
/// restarting from a fresh random table every `RESTART` steps. Returns a
/// verified truth table, or `None` when the budget of evaluations runs out.
pub fn uniform_measure_search(budget: u64, seed: u64) -> Result<Option<u64>> {
    const RESTART: u64 = 4000;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut table: u64 = rng.gen();
    let mut score = violation(table)?;
    let mut used = 0u64;
    while score != 0 && used < budget {
        if used.is_multiple_of(RESTART) && used > 0 {
            table = rng.gen();
            score = violation(table)?;
        }
        let temp = 2.0 * (1.0 - (used % RESTART) as f64 / RESTART as f64) + 0.05;
        let cand = table ^ (1u64 << rng.gen_range(0..64));
        let s = violation(cand)?;
        used += 1;
        if s <= score || rng.gen::<f64>() < (-((s - score) as f64) / temp).exp() {
            table = cand;
            score = s;
        }
    }
    if score != 0 {
        return Ok(None);
    }
    let check = uniform_measure_check(&FunctionObject::from_truth_bits(6, table))?;
    if !check.pass {
        return Err(Error::Consistency(format!(
            "fast engine accepted {table:#018x} but the verified check fails"
        )));
    }
    Ok(Some(table))
}
