//! Bitsets indexed by subsets of `{1..n}` (encoded as masks), with
//! subset/superset closure. The measure engines use these to turn a
//! sensitivity predicate into minimal blocks and certificates in
//! `O(n 2^n)` word operations.

/// Largest `n` for which a full cube bitset is allocated (2^26 bits = 8 MiB).
pub const MAX_CUBE_VARS: usize = 26;

const LOW_MASKS: [u64; 6] = [
    0xAAAA_AAAA_AAAA_AAAA,
    0xCCCC_CCCC_CCCC_CCCC,
    0xF0F0_F0F0_F0F0_F0F0,
    0xFF00_FF00_FF00_FF00,
    0xFFFF_0000_FFFF_0000,
    0xFFFF_FFFF_0000_0000,
];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitCube {
    n: usize,
    words: Vec<u64>,
}

impl BitCube {
    pub fn new(n: usize) -> Self {
        assert!(n <= MAX_CUBE_VARS, "cube over {n} variables is too large");
        let bits = 1usize << n;
        BitCube {
            n,
            words: vec![0; bits.div_ceil(64)],
        }
    }

    pub fn vars(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    #[inline]
    pub fn get(&self, mask: u64) -> bool {
        let m = mask as usize;
        (self.words[m >> 6] >> (m & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, mask: u64) {
        let m = mask as usize;
        self.words[m >> 6] |= 1u64 << (m & 63);
    }

    #[inline]
    pub fn clear(&mut self, mask: u64) {
        let m = mask as usize;
        self.words[m >> 6] &= !(1u64 << (m & 63));
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// After the call, a mask is set iff some subset of it was set before.
    pub fn close_upward(&mut self) {
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let high = LOW_MASKS[i];
                for w in &mut self.words {
                    *w |= (*w & !high) << shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for j in 0..self.words.len() {
                    if j & stride != 0 {
                        self.words[j] |= self.words[j ^ stride];
                    }
                }
            }
        }
    }

    /// After the call, a mask is set iff some superset of it was set before.
    pub fn close_downward(&mut self) {
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let high = LOW_MASKS[i];
                for w in &mut self.words {
                    *w |= (*w & high) >> shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for j in 0..self.words.len() {
                    if j & stride == 0 {
                        self.words[j] |= self.words[j | stride];
                    }
                }
            }
        }
    }

    /// Cube with bit `D` set iff `pred(D)`.
    pub fn from_fn(n: usize, mut pred: impl FnMut(u64) -> bool) -> Self {
        let mut c = BitCube::new(n);
        for m in 0..1u64 << n {
            if pred(m) {
                c.set(m);
            }
        }
        c
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Cube `C'` with `C'[D] = C[D ^ x]`.
    pub fn translate(&self, x: u64) -> BitCube {
        let hi = (x >> 6) as usize;
        let lo = x & 63;
        let words = (0..self.words.len())
            .map(|j| {
                let mut w = self.words[j ^ hi];
                for (k, &high) in LOW_MASKS.iter().enumerate() {
                    if lo >> k & 1 == 1 {
                        let s = 1u32 << k;
                        w = ((w & high) >> s) | ((w & !high) << s);
                    }
                }
                w
            })
            .collect();
        BitCube { n: self.n, words }
    }

    /// Cube with `D` set iff `D \ {i}` is set here for some `i ∈ D`.
    pub fn one_step_up(&self) -> BitCube {
        let mut out = BitCube::new(self.n);
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let high = LOW_MASKS[i];
                for (o, &w) in out.words.iter_mut().zip(&self.words) {
                    *o |= (w & !high) << shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for j in 0..self.words.len() {
                    if j & stride != 0 {
                        out.words[j] |= self.words[j ^ stride];
                    }
                }
            }
        }
        out
    }

    /// Cube with `D` set iff `D ∪ {i}` is set here for some `i ∉ D`.
    pub fn one_step_down(&self) -> BitCube {
        let mut out = BitCube::new(self.n);
        for i in 0..self.n {
            if i < 6 {
                let shift = 1u32 << i;
                let high = LOW_MASKS[i];
                for (o, &w) in out.words.iter_mut().zip(&self.words) {
                    *o |= (w & high) >> shift;
                }
            } else {
                let stride = 1usize << (i - 6);
                for j in 0..self.words.len() {
                    if j & stride == 0 {
                        out.words[j] |= self.words[j | stride];
                    }
                }
            }
        }
        out
    }

    /// `self &= !other`.
    pub fn and_not(&mut self, other: &BitCube) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    /// `self &= other`.
    pub fn and(&mut self, other: &BitCube) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Flips every bit of the cube.
    pub fn invert(&mut self) {
        let len = self.len();
        for w in &mut self.words {
            *w = !*w;
        }
        if len < 64 {
            self.words[0] &= (1u64 << len) - 1;
        }
    }

    /// Set masks in increasing numeric order.
    pub fn ones(&self) -> impl Iterator<Item = u64> + '_ {
        let limit = self.len() as u64;
        self.words.iter().enumerate().flat_map(move |(j, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(((j as u64) << 6) | b)
            })
            .filter(move |&m| m < limit)
        })
    }
}

/// Sorted 1-based positions of a mask.
pub fn mask_positions(mask: u64) -> Vec<usize> {
    let mut out = Vec::with_capacity(mask.count_ones() as usize);
    let mut m = mask;
    while m != 0 {
        out.push(m.trailing_zeros() as usize + 1);
        m &= m - 1;
    }
    out
}

/// Mask of sorted or unsorted 1-based positions; positions must be in `1..=64`.
pub fn positions_mask(positions: &[usize]) -> u64 {
    positions.iter().fold(0u64, |m, &p| m | (1u64 << (p - 1)))
}

/// `a` precedes `b` in lexicographic order of their sorted position lists,
/// for sets of equal size.
pub fn lex_less(a: u64, b: u64) -> bool {
    let diff = a ^ b;
    diff != 0 && (a & diff & diff.wrapping_neg()) != 0
}

pub fn full_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_up(n: usize, seeds: &[u64]) -> Vec<bool> {
        (0..1u64 << n).map(|m| seeds.iter().any(|&s| s & m == s)).collect()
    }

    #[test]
    fn upward_closure_matches_brute_force() {
        for n in [3usize, 6, 7, 9] {
            let seeds = [0b101u64, 1 << (n - 1), 0b11 << (n - 2)];
            let mut c = BitCube::new(n);
            for &s in &seeds {
                c.set(s);
            }
            c.close_upward();
            let want = brute_up(n, &seeds);
            for m in 0..1u64 << n {
                assert_eq!(c.get(m), want[m as usize], "n={n} m={m:b}");
            }
        }
    }

    #[test]
    fn downward_closure_matches_brute_force() {
        let n = 8;
        let seeds = [0b1001_0110u64, 0b0000_0001];
        let mut c = BitCube::new(n);
        for &s in &seeds {
            c.set(s);
        }
        c.close_downward();
        for m in 0..1u64 << n {
            let want = seeds.iter().any(|&s| s & m == m);
            assert_eq!(c.get(m), want);
        }
    }

    #[test]
    fn translate_and_one_step() {
        for n in [2usize, 5, 8] {
            let c = BitCube::from_fn(n, |m| m % 3 == 1 || m.count_ones() == 2);
            for x in [0u64, 1, (1 << n) - 1, 0b10 % (1 << n)] {
                let t = c.translate(x);
                for d in 0..1u64 << n {
                    assert_eq!(t.get(d), c.get(d ^ x));
                }
            }
            let s = c.one_step_up();
            for d in 0..1u64 << n {
                let want = (0..n).any(|i| d >> i & 1 == 1 && c.get(d ^ (1 << i)));
                assert_eq!(s.get(d), want);
            }
            let s = c.one_step_down();
            for d in 0..1u64 << n {
                let want = (0..n).any(|i| d >> i & 1 == 0 && c.get(d | (1 << i)));
                assert_eq!(s.get(d), want);
            }
            let mut inv = c.clone();
            inv.invert();
            assert_eq!(inv.count() + c.count(), 1 << n);
        }
    }

    #[test]
    fn ones_iterates_in_order() {
        let mut c = BitCube::new(7);
        for m in [100u64, 3, 64, 127] {
            c.set(m);
        }
        assert_eq!(c.ones().collect::<Vec<_>>(), vec![3, 64, 100, 127]);
        assert_eq!(c.count(), 4);
    }

    #[test]
    fn lexicographic_order_on_masks() {
        // {1,3} < {2,3}; {1,4} < {2,3}
        assert!(lex_less(0b101, 0b110));
        assert!(lex_less(0b1001, 0b0110));
        assert!(!lex_less(0b110, 0b101));
        assert!(!lex_less(0b11, 0b11));
        assert_eq!(mask_positions(0b1010), vec![2, 4]);
        assert_eq!(positions_mask(&[2, 4]), 0b1010);
    }
}
