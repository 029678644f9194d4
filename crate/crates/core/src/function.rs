//! Function representations: dense tables, symmetric profiles, recursive
//! compositions, toroidal lattice "square" functions and promise problems.
//!
//! Positions are 1-based in every public API. A Boolean input packed into an
//! integer stores position `i` at bit `i - 1`, so position 1 is the least
//! significant bit of a truth-table index.

use std::fmt;
use std::sync::Arc;

use crate::designs::DesignDomain;
use crate::error::{Error, Result};

/// Function value: `Some(bit)` inside the domain, `None` outside it.
pub type Output = Option<bool>;

/// Largest number of entries a dense table may hold.
pub const DENSE_CAP: u64 = 1 << 20;

/// Largest variable count accepted for compositions (structured evaluation only).
pub const MAX_COMPOSED_VARS: usize = 1 << 24;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InputPoint {
    values: Vec<u32>,
}

impl InputPoint {
    pub fn new(values: Vec<u32>) -> Self {
        InputPoint { values }
    }

    pub fn zeros(n: usize) -> Self {
        InputPoint { values: vec![0; n] }
    }

    /// Boolean point from a packed integer (position 1 = least significant bit).
    pub fn from_bits(n: usize, bits: u64) -> Self {
        assert!(n <= 64, "packed inputs hold at most 64 positions");
        InputPoint {
            values: (0..n).map(|i| ((bits >> i) & 1) as u32).collect(),
        }
    }

    /// Parses a `0`/`1` string written position 1 first.
    pub fn parse_bits(s: &str) -> Result<Self> {
        let values = s
            .trim()
            .chars()
            .enumerate()
            .map(|(i, c)| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(Error::Parse {
                    line: 1,
                    message: format!("illegal character {other:?} at offset {i} of input"),
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(InputPoint { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// Symbol at a 1-based position.
    pub fn symbol(&self, position: usize) -> u32 {
        self.values[position - 1]
    }

    pub fn is_boolean(&self) -> bool {
        self.values.iter().all(|&v| v <= 1)
    }

    /// Packed form, when the point is Boolean and has at most 64 positions.
    pub fn bits(&self) -> Option<u64> {
        if self.values.len() > 64 || !self.is_boolean() {
            return None;
        }
        Some(
            self.values
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &v)| acc | ((v as u64) << i)),
        )
    }

    /// Number of nonzero symbols.
    pub fn weight(&self) -> usize {
        self.values.iter().filter(|&&v| v != 0).count()
    }

    /// Returns `X^(B)`: the point with every position in `block` flipped.
    pub fn flip_block(&self, block: &[usize]) -> Result<InputPoint> {
        let n = self.values.len();
        if !self.is_boolean() {
            return Err(Error::NotBoolean);
        }
        let mut values = self.values.clone();
        for &p in block {
            if p == 0 || p > n {
                return Err(Error::PositionOutOfRange { position: p, n });
            }
            values[p - 1] ^= 1;
        }
        Ok(InputPoint { values })
    }

    pub fn with_symbol(&self, position: usize, symbol: u32) -> InputPoint {
        let mut values = self.values.clone();
        values[position - 1] = symbol;
        InputPoint { values }
    }

    /// Positions (1-based) where the two points differ.
    pub fn disagreement(&self, other: &InputPoint) -> Vec<usize> {
        self.values
            .iter()
            .zip(&other.values)
            .enumerate()
            .filter(|(_, (a, b))| a != b)
            .map(|(i, _)| i + 1)
            .collect()
    }
}

impl fmt::Display for InputPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_boolean() {
            for v in &self.values {
                write!(f, "{v}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Returns `X^(B)`.
pub fn flip_block(x: &InputPoint, block: &[usize]) -> Result<InputPoint> {
    x.flip_block(block)
}

/// Outer function applied to `arity` consecutive equal blocks, each evaluated by `child`.
#[derive(Clone, Debug, PartialEq)]
pub struct Composition {
    pub outer: Arc<FunctionObject>,
    pub child: Arc<FunctionObject>,
    pub arity: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Kind {
    Dense(Arc<[Output]>),
    /// `profile[w]` is the value on inputs of Hamming weight `w`.
    Symmetric(Arc<[bool]>),
    Composed(Composition),
    /// `side x side` torus; value 1 iff some `square x square` perimeter is all ones.
    Lattice {
        side: usize,
        square: usize,
    },
    /// One-to-one (value 0) versus two-to-one (value 1) sequences over `n^2` symbols.
    Collision,
    Design(Arc<DesignDomain>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionObject {
    n: usize,
    alphabet: u32,
    kind: Kind,
    ctor: Option<String>,
}

impl FunctionObject {
    /// Dense table over `alphabet^n` entries indexed with position 1 as the least
    /// significant digit.
    pub fn dense(n: usize, alphabet: u32, table: Vec<Output>) -> Result<Self> {
        if alphabet < 2 {
            return Err(Error::InvalidParameters(format!(
                "alphabet size {alphabet} must be at least 2"
            )));
        }
        let size = checked_pow(alphabet as u64, n).filter(|&s| s <= DENSE_CAP);
        let Some(size) = size else {
            return Err(Error::CapExceeded {
                what: "dense table",
                needed: (alphabet as u128).saturating_pow(n as u32),
                cap: DENSE_CAP as u128,
            });
        };
        if table.len() as u64 != size {
            return Err(Error::LengthMismatch {
                expected: size as usize,
                got: table.len(),
            });
        }
        Ok(FunctionObject {
            n,
            alphabet,
            kind: Kind::Dense(table.into()),
            ctor: None,
        })
    }

    /// Total Boolean function from the low `2^n` bits of `bits` (n ≤ 6).
    pub fn from_truth_bits(n: usize, bits: u64) -> Self {
        assert!(n <= 6);
        let table = (0..1u64 << n).map(|i| Some((bits >> i) & 1 == 1)).collect();
        FunctionObject::dense(n, 2, table).expect("small table")
    }

    /// Total Boolean function given by a predicate on packed inputs.
    pub fn from_predicate(n: usize, pred: impl Fn(u64) -> bool) -> Result<Self> {
        if n > 20 {
            return Err(Error::CapExceeded {
                what: "dense table",
                needed: 1u128 << n,
                cap: DENSE_CAP as u128,
            });
        }
        FunctionObject::dense(n, 2, (0..1u64 << n).map(|i| Some(pred(i))).collect())
    }

    pub fn symmetric(profile: Vec<bool>) -> Result<Self> {
        if profile.is_empty() {
            return Err(Error::InvalidParameters("empty profile".into()));
        }
        Ok(FunctionObject {
            n: profile.len() - 1,
            alphabet: 2,
            kind: Kind::Symmetric(profile.into()),
            ctor: None,
        })
    }

    pub(crate) fn from_parts(n: usize, alphabet: u32, kind: Kind, ctor: Option<String>) -> Self {
        FunctionObject {
            n,
            alphabet,
            kind,
            ctor,
        }
    }

    fn named(mut self, ctor: String) -> Self {
        self.ctor = Some(ctor);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn alphabet(&self) -> u32 {
        self.alphabet
    }

    pub fn kind(&self) -> &Kind {
        &self.kind
    }

    /// Constructor expression, when the function was built by a named constructor.
    pub fn ctor(&self) -> Option<&str> {
        self.ctor.as_deref()
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            Kind::Dense(_) => "dense-table",
            Kind::Symmetric(_) => "symmetric-profile",
            Kind::Composed(_) => "composed",
            Kind::Lattice { .. } => "lattice",
            Kind::Collision | Kind::Design(_) => "promise-enumerated",
        }
    }

    pub fn is_boolean(&self) -> bool {
        self.alphabet == 2
    }

    pub fn is_total(&self) -> bool {
        match &self.kind {
            Kind::Dense(t) => t.iter().all(|v| v.is_some()),
            Kind::Symmetric(_) | Kind::Composed(_) | Kind::Lattice { .. } => true,
            Kind::Collision | Kind::Design(_) => false,
        }
    }

    pub fn profile(&self) -> Option<&[bool]> {
        match &self.kind {
            Kind::Symmetric(p) => Some(p),
            _ => None,
        }
    }

    pub fn composition(&self) -> Option<&Composition> {
        match &self.kind {
            Kind::Composed(c) => Some(c),
            _ => None,
        }
    }

    pub fn table(&self) -> Option<&[Output]> {
        match &self.kind {
            Kind::Dense(t) => Some(t),
            _ => None,
        }
    }

    /// Number of entries of the dense expansion, if within the cap.
    pub fn dense_size(&self) -> Option<u64> {
        checked_pow(self.alphabet as u64, self.n).filter(|&s| s <= DENSE_CAP)
    }

    pub fn validate(&self, x: &InputPoint) -> Result<()> {
        if x.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: x.len(),
            });
        }
        for (i, &v) in x.values().iter().enumerate() {
            if v >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    position: i + 1,
                    symbol: v,
                    alphabet: self.alphabet,
                });
            }
        }
        Ok(())
    }

    /// `f(x)`, or `None` when `x` is outside the domain.
    pub fn evaluate(&self, x: &InputPoint) -> Result<Output> {
        self.validate(x)?;
        Ok(self.eval_symbols(x.values()))
    }

    /// Unchecked evaluation on a symbol slice of length `n`.
    pub fn eval_symbols(&self, xs: &[u32]) -> Output {
        match &self.kind {
            Kind::Dense(t) => t[self.index_of(xs) as usize],
            Kind::Symmetric(p) => Some(p[xs.iter().filter(|&&v| v != 0).count()]),
            Kind::Composed(c) => {
                let m = c.child.n;
                let outer: Vec<u32> = xs
                    .chunks(m)
                    .map(|block| c.child.eval_symbols(block).map(u32::from).unwrap_or(0))
                    .collect();
                c.outer.eval_symbols(&outer)
            }
            Kind::Lattice { side, square } => Some(lattice_has_square(*side, *square, |cell| xs[cell] != 0)),
            Kind::Collision => collision_value(xs),
            Kind::Design(d) => d.evaluate(xs),
        }
    }

    /// Unchecked evaluation of a packed Boolean input (requires `n ≤ 64`).
    pub fn eval_bits(&self, bits: u64) -> Output {
        debug_assert!(self.n <= 64 && self.alphabet == 2);
        match &self.kind {
            Kind::Dense(t) => t[bits as usize],
            Kind::Symmetric(p) => Some(p[bits.count_ones() as usize]),
            Kind::Composed(c) => {
                let m = c.child.n;
                let child_mask = crate::cube::full_mask(m);
                let mut outer = 0u64;
                for i in 0..c.arity {
                    if c.child.eval_bits((bits >> (i * m)) & child_mask) == Some(true) {
                        outer |= 1 << i;
                    }
                }
                c.outer.eval_bits(outer)
            }
            Kind::Lattice { side, square } => Some(lattice_has_square(*side, *square, |cell| (bits >> cell) & 1 == 1)),
            _ => self.eval_symbols(&InputPoint::from_bits(self.n, bits).values),
        }
    }

    fn index_of(&self, xs: &[u32]) -> u64 {
        if self.alphabet == 2 {
            xs.iter().enumerate().fold(0u64, |acc, (i, &v)| acc | ((v as u64) << i))
        } else {
            xs.iter()
                .rev()
                .fold(0u64, |acc, &v| acc * self.alphabet as u64 + v as u64)
        }
    }

    /// Point at a dense-table index.
    pub fn point_at(&self, index: u64) -> InputPoint {
        let mut values = Vec::with_capacity(self.n);
        let mut rest = index;
        for _ in 0..self.n {
            values.push((rest % self.alphabet as u64) as u32);
            rest /= self.alphabet as u64;
        }
        InputPoint { values }
    }

    /// Full dense expansion.
    pub fn to_dense(&self) -> Result<FunctionObject> {
        if let Kind::Dense(_) = self.kind {
            return Ok(FunctionObject {
                ctor: None,
                ..self.clone()
            });
        }
        let size = self.dense_size().ok_or(Error::CapExceeded {
            what: "dense expansion",
            needed: (self.alphabet as u128).saturating_pow(self.n as u32),
            cap: DENSE_CAP as u128,
        })?;
        let table: Vec<Output> = if self.alphabet == 2 {
            (0..size).map(|i| self.eval_bits(i)).collect()
        } else {
            (0..size)
                .map(|i| self.eval_symbols(self.point_at(i).values()))
                .collect()
        };
        FunctionObject::dense(self.n, self.alphabet, table)
    }

    /// Visits every point of `Dom(f)` with its value.
    pub fn for_each_domain_point(&self, mut visit: impl FnMut(&[u32], bool)) -> Result<()> {
        match &self.kind {
            Kind::Collision if self.dense_size().is_none() => {
                crate::designs::enumerate_collision_domain(self.n, &mut visit)
            }
            Kind::Design(d) if self.dense_size().is_none() => d.enumerate_domain(&mut visit),
            _ => {
                let size = self.dense_size().ok_or(Error::CapExceeded {
                    what: "domain enumeration",
                    needed: (self.alphabet as u128).saturating_pow(self.n as u32),
                    cap: DENSE_CAP as u128,
                })?;
                for i in 0..size {
                    let p = self.point_at(i);
                    if let Some(v) = self.eval_symbols(p.values()) {
                        visit(p.values(), v);
                    }
                }
                Ok(())
            }
        }
    }

    /// Restriction to the positions not named in `assignment`, which maps
    /// 1-based positions to symbols. Free positions keep their relative order.
    pub fn restrict(&self, assignment: &[(usize, u32)]) -> Result<FunctionObject> {
        let mut fixed: Vec<Option<u32>> = vec![None; self.n];
        for &(p, s) in assignment {
            if p == 0 || p > self.n {
                return Err(Error::PositionOutOfRange { position: p, n: self.n });
            }
            if fixed[p - 1].is_some() {
                return Err(Error::InvalidParameters(format!("position {p} assigned twice")));
            }
            if s >= self.alphabet {
                return Err(Error::SymbolOutOfRange {
                    position: p,
                    symbol: s,
                    alphabet: self.alphabet,
                });
            }
            fixed[p - 1] = Some(s);
        }
        if let Kind::Symmetric(profile) = &self.kind {
            let ones = assignment.iter().filter(|(_, s)| *s != 0).count();
            let free = self.n - assignment.len();
            return FunctionObject::symmetric((0..=free).map(|w| profile[w + ones]).collect());
        }
        let free: Vec<usize> = (0..self.n).filter(|&i| fixed[i].is_none()).collect();
        let size = checked_pow(self.alphabet as u64, free.len()).filter(|&s| s <= DENSE_CAP);
        let Some(size) = size else {
            return Err(Error::CapExceeded {
                what: "restriction table",
                needed: (self.alphabet as u128).saturating_pow(free.len() as u32),
                cap: DENSE_CAP as u128,
            });
        };
        let base: Vec<u32> = fixed.iter().map(|s| s.unwrap_or(0)).collect();
        let alpha = self.alphabet as u64;
        let mut full = base.clone();
        let table = (0..size)
            .map(|idx| {
                let mut rest = idx;
                for &pos in &free {
                    full[pos] = (rest % alpha) as u32;
                    rest /= alpha;
                }
                self.eval_symbols(&full)
            })
            .collect();
        FunctionObject::dense(free.len(), self.alphabet, table)
    }
}

pub(crate) fn checked_pow(base: u64, exp: usize) -> Option<u64> {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

fn lattice_has_square(side: usize, square: usize, cell: impl Fn(usize) -> bool) -> bool {
    let at = |r: usize, c: usize| cell((r % side) * side + (c % side));
    (0..side).any(|r0| {
        (0..side).any(|c0| {
            let last = square - 1;
            (0..square).all(|k| at(r0, c0 + k) && at(r0 + last, c0 + k) && at(r0 + k, c0) && at(r0 + k, c0 + last))
        })
    })
}

/// Cells (0-based, row-major) on the perimeter of the square with top-left `(r0, c0)`.
pub fn lattice_perimeter(side: usize, square: usize, r0: usize, c0: usize) -> Vec<usize> {
    let mut cells = Vec::with_capacity(4 * square);
    let last = square - 1;
    for r in 0..square {
        for c in 0..square {
            if r == 0 || c == 0 || r == last || c == last {
                cells.push(((r0 + r) % side) * side + (c0 + c) % side);
            }
        }
    }
    cells.sort_unstable();
    cells.dedup();
    cells
}

fn collision_value(xs: &[u32]) -> Output {
    let mut sorted = xs.to_vec();
    sorted.sort_unstable();
    let mut runs = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        runs.push(j - i);
        i = j;
    }
    if runs.iter().all(|&r| r == 1) {
        Some(false)
    } else if runs.iter().all(|&r| r == 2) {
        Some(true)
    } else {
        None
    }
}

pub fn make_weight_window(n: usize, a: usize, b: usize) -> Result<FunctionObject> {
    if a > b || b > n {
        return Err(Error::InvalidParameters(format!(
            "window needs 0 <= a <= b <= n, got n={n} a={a} b={b}"
        )));
    }
    Ok(FunctionObject::symmetric((0..=n).map(|w| a <= w && w <= b).collect())?.named(format!("window({n},{a},{b})")))
}

/// Smallest `r` with `r * r >= n`.
pub fn ceil_sqrt(n: usize) -> usize {
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 0 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r
}

/// Value 1 iff the Hamming weight is at least `ceil(sqrt(n))`.
pub fn make_threshold(n: usize) -> Result<FunctionObject> {
    if n == 0 {
        return Err(Error::InvalidParameters("threshold needs n >= 1".into()));
    }
    let t = ceil_sqrt(n);
    Ok(FunctionObject::symmetric((0..=n).map(|w| w >= t).collect())?.named(format!("threshold({n})")))
}

pub fn make_or(n: usize) -> Result<FunctionObject> {
    Ok(FunctionObject::symmetric((0..=n).map(|w| w >= 1).collect())?.named(format!("or({n})")))
}

pub fn make_and(n: usize) -> Result<FunctionObject> {
    Ok(FunctionObject::symmetric((0..=n).map(|w| w == n).collect())?.named(format!("and({n})")))
}

pub fn make_parity(n: usize) -> Result<FunctionObject> {
    Ok(FunctionObject::symmetric((0..=n).map(|w| w % 2 == 1).collect())?.named(format!("parity({n})")))
}

pub fn make_majority(n: usize) -> Result<FunctionObject> {
    Ok(FunctionObject::symmetric((0..=n).map(|w| 2 * w > n).collect())?.named(format!("majority({n})")))
}

pub fn make_lattice(side: usize, square: usize) -> Result<FunctionObject> {
    if square == 0 || square > side {
        return Err(Error::InvalidParameters(format!(
            "lattice needs side >= square >= 1, got side={side} square={square}"
        )));
    }
    Ok(FunctionObject::from_parts(
        side * side,
        2,
        Kind::Lattice { side, square },
        Some(format!("lattice({side},{square})")),
    ))
}

/// Collision problem on `n` positions over symbols `0..n^2` (the integers `1..=n^2`).
pub fn make_collision(n: usize) -> Result<FunctionObject> {
    if n < 2 || n % 2 == 1 {
        return Err(Error::InvalidParameters(format!(
            "collision needs an even n >= 2, got {n}"
        )));
    }
    let alphabet = u32::try_from(n * n)
        .map_err(|_| Error::InvalidParameters(format!("collision alphabet too large for n={n}")))?;
    Ok(FunctionObject::from_parts(
        n,
        alphabet,
        Kind::Collision,
        Some(format!("collision({n})")),
    ))
}

/// `t`-level recursive composition: level 1 is `inner`, level `t` applies `outer`
/// to `k` consecutive equal blocks evaluated at level `t - 1`.
pub fn compose(outer: &FunctionObject, inner: &FunctionObject, t: usize) -> Result<FunctionObject> {
    if t == 0 {
        return Err(Error::InvalidParameters("composition needs t >= 1".into()));
    }
    if !outer.is_boolean() || !inner.is_boolean() || !outer.is_total() || !inner.is_total() {
        return Err(Error::InvalidParameters(
            "composition needs total Boolean functions".into(),
        ));
    }
    if outer.n == 0 {
        return Err(Error::InvalidParameters("outer function has no inputs".into()));
    }
    let mut current = inner.clone();
    for level in 2..=t {
        let n = outer
            .n
            .checked_mul(current.n)
            .filter(|&n| n <= MAX_COMPOSED_VARS)
            .ok_or_else(|| {
                Error::InvalidParameters(format!(
                    "composition level {level} exceeds {MAX_COMPOSED_VARS} variables"
                ))
            })?;
        current = FunctionObject {
            n,
            alphabet: 2,
            kind: Kind::Composed(Composition {
                outer: Arc::new(outer.clone()),
                child: Arc::new(current),
                arity: outer.n,
            }),
            ctor: None,
        };
    }
    if t > 1 {
        current.ctor = match (outer.ctor(), inner.ctor()) {
            (Some(_), Some(i)) if outer == inner => Some(format!("compose({i},{t})")),
            (Some(o), Some(i)) => Some(format!("compose({o},{i},{t})")),
            _ => None,
        };
    }
    Ok(current)
}
