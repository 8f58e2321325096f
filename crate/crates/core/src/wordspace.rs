//! Words over a finite alphabet and dense word sets.
//!
//! A word `(w_1, ..., w_n)` over `{0, ..., q-1}` is identified with the
//! base-`q` integer whose most significant digit is `w_1`. With that
//! convention dropping the first symbol is `index mod q^(n-1)` and the
//! cylinder `B x Omega^k` is a run of `q^k` consecutive indices per member
//! of `B`.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::ratio::Ratio;

/// Default cap on `q^n` for dense membership tables.
pub const DEFAULT_MAX_INDEX: u64 = 1 << 28;

/// Environment variable overriding [`DEFAULT_MAX_INDEX`]. Raising it is
/// unsafe in the sense that tables are allocated densely.
pub const MAX_INDEX_ENV: &str = "NONOVERLAP_MAX_INDEX";

pub fn max_index() -> u64 {
    static LIMIT: OnceLock<u64> = OnceLock::new();
    *LIMIT.get_or_init(|| {
        std::env::var(MAX_INDEX_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
            .unwrap_or(DEFAULT_MAX_INDEX)
    })
}

/// `q^n`, or `None` on overflow.
pub fn checked_pow(q: u32, n: u32) -> Option<u64> {
    (q as u64).checked_pow(n)
}

/// Validates `(q, n)` and returns `q^n` if it fits the capacity guard.
pub fn space_size(q: u32, n: u32) -> Result<u64> {
    if q < 2 {
        return Err(Error::InvalidAlphabet(q));
    }
    if n < 1 {
        return Err(Error::InvalidLength(n));
    }
    let limit = max_index();
    match checked_pow(q, n) {
        Some(size) if size <= limit => Ok(size),
        Some(size) => Err(Error::Capacity {
            required: size.to_string(),
            limit,
        }),
        None => Err(Error::Capacity {
            required: format!("{q}^{n}"),
            limit,
        }),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    q: u32,
    symbols: Vec<u32>,
}

impl Word {
    pub fn new(q: u32, symbols: Vec<u32>) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        if symbols.is_empty() {
            return Err(Error::InvalidLength(0));
        }
        if let Some((position, &symbol)) = symbols.iter().enumerate().find(|(_, &s)| s >= q) {
            return Err(Error::SymbolOutOfRange {
                symbol,
                position,
                q,
            });
        }
        Ok(Word { q, symbols })
    }

    /// Inverse of [`Word::encode`].
    pub fn decode(q: u32, n: u32, index: u64) -> Result<Self> {
        let size = checked_pow(q, n).ok_or_else(|| Error::Capacity {
            required: format!("{q}^{n}"),
            limit: u64::MAX,
        })?;
        if q < 2 {
            return Err(Error::InvalidAlphabet(q));
        }
        if n < 1 {
            return Err(Error::InvalidLength(n));
        }
        if index >= size {
            return Err(Error::IndexOutOfRange { index, size });
        }
        let mut symbols = vec![0u32; n as usize];
        let mut rest = index;
        for slot in symbols.iter_mut().rev() {
            *slot = (rest % q as u64) as u32;
            rest /= q as u64;
        }
        Ok(Word { q, symbols })
    }

    /// `sum_i w_i q^(n-i)`, first symbol most significant.
    pub fn encode(&self) -> u64 {
        self.symbols
            .iter()
            .fold(0u64, |acc, &s| acc * self.q as u64 + s as u64)
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// The shift map: drops the first symbol.
    pub fn shift(&self) -> Result<Word> {
        if self.symbols.len() < 2 {
            return Err(Error::ShiftTooFar(self.symbols.len() as u32));
        }
        Ok(Word {
            q: self.q,
            symbols: self.symbols[1..].to_vec(),
        })
    }
}

/// Encodes a word, validating every symbol against `q`.
pub fn encode_word(q: u32, symbols: &[u32]) -> Result<u64> {
    Word::new(q, symbols.to_vec()).map(|w| w.encode())
}

/// True iff some final segment of `w` equals the initial segment of `u`
/// of the same length, the full-length case `w = u` included.
pub fn overlaps_pair(w: &Word, u: &Word) -> Result<bool> {
    if w.q != u.q || w.len() != u.len() {
        return Err(Error::DimensionMismatch {
            left: (w.q, w.len() as u32),
            right: (u.q, u.len() as u32),
        });
    }
    let n = w.len();
    Ok((1..=n).any(|j| w.symbols[n - j..] == u.symbols[..j]))
}

/// Subset of `Omega^n`, stored as one bit per word index.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct WordSet {
    q: u32,
    n: u32,
    size: u64,
    bits: Vec<u64>,
    count: u64,
}

impl std::fmt::Debug for WordSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WordSet")
            .field("q", &self.q)
            .field("n", &self.n)
            .field("members", &self.iter().collect::<Vec<_>>())
            .finish()
    }
}

impl WordSet {
    pub fn empty(q: u32, n: u32) -> Result<Self> {
        let size = space_size(q, n)?;
        Ok(WordSet {
            q,
            n,
            size,
            bits: vec![0; size.div_ceil(64) as usize],
            count: 0,
        })
    }

    pub fn full(q: u32, n: u32) -> Result<Self> {
        Ok(WordSet::empty(q, n)?.complement())
    }

    pub fn from_indices(q: u32, n: u32, indices: impl IntoIterator<Item = u64>) -> Result<Self> {
        let mut set = WordSet::empty(q, n)?;
        for index in indices {
            if index >= set.size {
                return Err(Error::IndexOutOfRange {
                    index,
                    size: set.size,
                });
            }
            set.insert(index);
        }
        Ok(set)
    }

    pub fn from_words<'a>(
        q: u32,
        n: u32,
        words: impl IntoIterator<Item = &'a Word>,
    ) -> Result<Self> {
        let mut set = WordSet::empty(q, n)?;
        for w in words {
            if w.q != q || w.len() != n as usize {
                return Err(Error::DimensionMismatch {
                    left: (q, n),
                    right: (w.q, w.len() as u32),
                });
            }
            set.insert(w.encode());
        }
        Ok(set)
    }

    /// Builds a set from a predicate over indices.
    pub fn from_fn(q: u32, n: u32, mut pred: impl FnMut(u64) -> bool) -> Result<Self> {
        let mut set = WordSet::empty(q, n)?;
        for index in 0..set.size {
            if pred(index) {
                set.insert(index);
            }
        }
        Ok(set)
    }

    /// Set with membership bits taken from `mask` (bit `i` = index `i`);
    /// only meaningful for `q^n <= 64`.
    pub fn from_mask(q: u32, n: u32, mask: u64) -> Result<Self> {
        let set = WordSet::empty(q, n)?;
        if set.size > 64 {
            return Err(Error::InvalidParameter(format!(
                "bit mask construction needs q^n <= 64, got {}",
                set.size
            )));
        }
        let valid = if set.size == 64 {
            u64::MAX
        } else {
            (1u64 << set.size) - 1
        };
        Ok(WordSet::from_bits(q, n, set.size, vec![mask & valid]))
    }

    pub(crate) fn from_bits(q: u32, n: u32, size: u64, bits: Vec<u64>) -> Self {
        let count = bits.iter().map(|b| b.count_ones() as u64).sum();
        WordSet {
            q,
            n,
            size,
            bits,
            count,
        }
    }

    pub(crate) fn insert(&mut self, index: u64) {
        let (w, b) = ((index / 64) as usize, index % 64);
        if self.bits[w] & (1 << b) == 0 {
            self.bits[w] |= 1 << b;
            self.count += 1;
        }
    }

    pub(crate) fn insert_range(&mut self, start: u64, end: u64) {
        let mut i = start;
        while i < end {
            if i.is_multiple_of(64) && i + 64 <= end {
                let w = (i / 64) as usize;
                self.count += 64 - self.bits[w].count_ones() as u64;
                self.bits[w] = u64::MAX;
                i += 64;
            } else {
                self.insert(i);
                i += 1;
            }
        }
    }

    pub fn q(&self) -> u32 {
        self.q
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    /// `q^n`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn is_empty(&self) -> bool {
        self.count == 0
    }

    pub fn is_full(&self) -> bool {
        self.count == self.size
    }

    pub fn contains(&self, index: u64) -> bool {
        index < self.size && self.bits[(index / 64) as usize] & (1 << (index % 64)) != 0
    }

    pub fn contains_word(&self, w: &Word) -> bool {
        w.q == self.q && w.len() == self.n as usize && self.contains(w.encode())
    }

    /// Member indices in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.bits.iter().enumerate().flat_map(|(wi, &word)| {
            let mut rest = word;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as u64;
                rest &= rest - 1;
                Some(wi as u64 * 64 + b)
            })
        })
    }

    pub fn words(&self) -> impl Iterator<Item = Word> + '_ {
        self.iter()
            .map(move |i| Word::decode(self.q, self.n, i).expect("member index in range"))
    }

    /// Uniform measure `|A| / q^n`.
    pub fn measure(&self) -> Ratio {
        Ratio::from_counts(self.count, self.size)
    }

    fn check_same(&self, other: &WordSet) -> Result<()> {
        if self.q != other.q || self.n != other.n {
            return Err(Error::DimensionMismatch {
                left: (self.q, self.n),
                right: (other.q, other.n),
            });
        }
        Ok(())
    }

    fn zip_with(&self, other: &WordSet, op: impl Fn(u64, u64) -> u64) -> Result<WordSet> {
        self.check_same(other)?;
        let bits = self
            .bits
            .iter()
            .zip(&other.bits)
            .map(|(&a, &b)| op(a, b))
            .collect();
        Ok(WordSet::from_bits(self.q, self.n, self.size, bits))
    }

    pub fn union(&self, other: &WordSet) -> Result<WordSet> {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &WordSet) -> Result<WordSet> {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &WordSet) -> Result<WordSet> {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> WordSet {
        let mut bits: Vec<u64> = self.bits.iter().map(|b| !b).collect();
        let tail = self.size % 64;
        if tail != 0 {
            if let Some(last) = bits.last_mut() {
                *last &= (1u64 << tail) - 1;
            }
        }
        WordSet::from_bits(self.q, self.n, self.size, bits)
    }

    pub fn is_subset(&self, other: &WordSet) -> Result<bool> {
        self.check_same(other)?;
        Ok(self
            .bits
            .iter()
            .zip(&other.bits)
            .all(|(&a, &b)| a & !b == 0))
    }

    /// `s(A)`, a set over `Omega^(n-1)`.
    pub fn shift_set(&self) -> Result<WordSet> {
        self.shift_by(1)
    }

    /// `s^j(A)`, a set over `Omega^(n-j)`; `j = 0` returns a copy.
    pub fn shift_by(&self, j: u32) -> Result<WordSet> {
        if j >= self.n {
            return Err(Error::ShiftTooFar(self.n));
        }
        if j == 0 {
            return Ok(self.clone());
        }
        let mut out = WordSet::empty(self.q, self.n - j)?;
        let modulus = out.size;
        if self.count == 0 {
            return Ok(out);
        }
        for i in self.iter() {
            out.insert(i % modulus);
            if out.is_full() {
                break;
            }
        }
        Ok(out)
    }

    /// Cylinder `B x Omega^(j-i)` as a set over `Omega^j`.
    pub fn lift_set(&self, j: u32) -> Result<WordSet> {
        if j < self.n {
            return Err(Error::LiftShorter {
                from: self.n,
                to: j,
            });
        }
        if j == self.n {
            return Ok(self.clone());
        }
        let mut out = WordSet::empty(self.q, j)?;
        let block = out.size / self.size;
        for i in self.iter() {
            out.insert_range(i * block, (i + 1) * block);
        }
        Ok(out)
    }

    /// Slice `A(w) = { u : (w, u) in A }` for a prefix index `w` of length `r`,
    /// returned as a member count out of `q^(n-r)`.
    pub fn slice_count(&self, r: u32, prefix: u64) -> u64 {
        let block = self.size / checked_pow(self.q, r).unwrap_or(u64::MAX);
        let start = prefix * block;
        (start..start + block).filter(|&i| self.contains(i)).count() as u64
    }
}

pub fn union(a: &WordSet, b: &WordSet) -> Result<WordSet> {
    a.union(b)
}

pub fn intersect(a: &WordSet, b: &WordSet) -> Result<WordSet> {
    a.intersect(b)
}

pub fn complement(a: &WordSet) -> WordSet {
    a.complement()
}

pub fn measure(a: &WordSet) -> Ratio {
    a.measure()
}

pub fn shift_set(a: &WordSet) -> Result<WordSet> {
    a.shift_set()
}

pub fn lift_set(b: &WordSet, j: u32) -> Result<WordSet> {
    b.lift_set(j)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(q: u32, s: &[u32]) -> Word {
        Word::new(q, s.to_vec()).unwrap()
    }

    #[test]
    fn encode_examples() {
        assert_eq!(encode_word(2, &[1, 0, 1]).unwrap(), 5);
        assert_eq!(encode_word(3, &[0, 0]).unwrap(), 0);
        assert_eq!(encode_word(4, &[3, 3, 3]).unwrap(), 63);
        assert!(matches!(
            encode_word(2, &[0, 2]),
            Err(Error::SymbolOutOfRange {
                symbol: 2,
                position: 1,
                q: 2
            })
        ));
    }

    #[test]
    fn roundtrip_exhaustive() {
        for (q, n) in [(2u32, 16u32), (3, 10), (4, 8), (16, 4)] {
            let size = checked_pow(q, n).unwrap();
            for i in 0..size {
                assert_eq!(Word::decode(q, n, i).unwrap().encode(), i);
            }
        }
    }

    #[test]
    fn shift_examples() {
        let a = WordSet::from_words(2, 2, [&w(2, &[1, 0])]).unwrap();
        assert_eq!(
            a.shift_set().unwrap(),
            WordSet::from_indices(2, 1, [0]).unwrap()
        );
        let a = WordSet::from_words(2, 2, [&w(2, &[0, 0]), &w(2, &[1, 0])]).unwrap();
        assert_eq!(
            a.shift_set().unwrap(),
            WordSet::from_indices(2, 1, [0]).unwrap()
        );
        // Omega^2 x {0} -> Omega x {0}, by enumerating all eight words
        let a = WordSet::from_fn(2, 3, |i| i % 2 == 0).unwrap();
        let expected: Vec<u64> = (0..8u64)
            .filter(|&i| a.contains(i))
            .map(|i| {
                let word = Word::decode(2, 3, i).unwrap();
                word.shift().unwrap().encode()
            })
            .collect();
        let s = a.shift_set().unwrap();
        assert_eq!(s, WordSet::from_indices(2, 2, expected).unwrap());
        assert_eq!(s, WordSet::from_fn(2, 2, |i| i % 2 == 0).unwrap());
        assert_eq!(
            WordSet::empty(2, 1).unwrap().shift_set(),
            Err(Error::ShiftTooFar(1))
        );
    }

    #[test]
    fn shift_is_index_mod() {
        for (q, n) in [(2u32, 6u32), (3, 4)] {
            let size = checked_pow(q, n).unwrap();
            let small = size / q as u64;
            for i in 0..size {
                let word = Word::decode(q, n, i).unwrap();
                assert_eq!(word.shift().unwrap().encode(), i % small);
            }
        }
    }

    #[test]
    fn lift_examples() {
        let b = WordSet::from_indices(2, 1, [1]).unwrap();
        let l = b.lift_set(2).unwrap();
        assert_eq!(
            l,
            WordSet::from_words(2, 2, [&w(2, &[1, 0]), &w(2, &[1, 1])]).unwrap()
        );

        let e = WordSet::empty(2, 1).unwrap().lift_set(5).unwrap();
        assert!(e.is_empty());
        assert_eq!(e.n(), 5);

        let b = WordSet::from_indices(3, 1, [0]).unwrap();
        let l = b.lift_set(2).unwrap();
        assert_eq!(l.iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(l.measure(), Ratio::new(1, 3));

        assert_eq!(
            WordSet::empty(2, 3).unwrap().lift_set(2),
            Err(Error::LiftShorter { from: 3, to: 2 })
        );
    }

    #[test]
    fn lift_large_blocks() {
        let b = WordSet::from_indices(2, 2, [1, 3]).unwrap();
        let l = b.lift_set(9).unwrap();
        assert_eq!(l.count(), 256);
        assert_eq!(l.measure(), b.measure());
        assert!(l.contains(128) && !l.contains(127) && l.contains(511));
    }

    #[test]
    fn overlap_examples() {
        assert!(overlaps_pair(&w(2, &[0, 1]), &w(2, &[1, 0])).unwrap());
        assert!(!overlaps_pair(&w(2, &[0, 0]), &w(2, &[1, 1])).unwrap());
        assert!(overlaps_pair(&w(2, &[0, 1]), &w(2, &[0, 1])).unwrap());
        assert!(overlaps_pair(&w(2, &[0, 1]), &w(2, &[0, 1, 1])).is_err());
    }

    #[test]
    fn self_overlap_always() {
        for i in 0..81 {
            let word = Word::decode(3, 4, i).unwrap();
            assert!(overlaps_pair(&word, &word).unwrap());
        }
    }

    #[test]
    fn set_algebra() {
        assert_eq!(WordSet::full(2, 2).unwrap().measure(), Ratio::one());
        assert_eq!(
            WordSet::from_indices(2, 2, [0]).unwrap().measure(),
            Ratio::new(1, 4)
        );
        assert_eq!(
            WordSet::empty(3, 3).unwrap().complement(),
            WordSet::full(3, 3).unwrap()
        );

        let a = WordSet::from_indices(3, 2, [0, 1, 2]).unwrap();
        let b = WordSet::from_indices(3, 2, [2, 5]).unwrap();
        assert_eq!(a.union(&b).unwrap().count(), 4);
        assert_eq!(a.intersect(&b).unwrap().iter().collect::<Vec<_>>(), vec![2]);
        assert_eq!(a.complement().count(), 6);
        assert!(a.union(&WordSet::empty(2, 2).unwrap()).is_err());
    }

    #[test]
    fn capacity_guard() {
        assert!(matches!(WordSet::empty(2, 29), Err(Error::Capacity { .. })));
        assert!(matches!(
            WordSet::empty(10, 30),
            Err(Error::Capacity { .. })
        ));
        assert_eq!(WordSet::empty(1, 3), Err(Error::InvalidAlphabet(1)));
        assert_eq!(WordSet::empty(2, 0), Err(Error::InvalidLength(0)));
    }

    #[test]
    fn slices() {
        // A = {00, 01, 11} over q = 2
        let a = WordSet::from_indices(2, 2, [0, 1, 3]).unwrap();
        assert_eq!(a.slice_count(1, 0), 2);
        assert_eq!(a.slice_count(1, 1), 1);
    }
}
