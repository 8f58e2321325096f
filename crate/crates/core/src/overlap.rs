//! Non-overlap sets `U(A)` and the coverage function `f`.
//!
//! `U(A)` is everything outside the union of cylinders `s^j(A) x Omega^j`,
//! `j = 0..n-1`. It is computed two ways: directly from that union, and
//! through the prefix sets `B_1, ..., B_n` built by
//! `B_{j+1} = (B_j x Omega) u A_{j+1}`.

use crate::error::{Error, Result};
use crate::ratio::Ratio;
use crate::wordspace::{checked_pow, WordSet};

/// `U(A)` from the union of shifted cylinders.
pub fn non_overlap_bruteforce(a: &WordSet) -> Result<WordSet> {
    non_overlap_strided(a, 1)
}

/// The same complement of cylinders, but only over shifts that are multiples
/// of `block`. With `Omega^block` read as a single letter this is `U` over
/// the blocked alphabet. `n` must be a multiple of `block`.
pub fn non_overlap_blocked(a: &WordSet, block: u32) -> Result<WordSet> {
    if block == 0 || !a.n().is_multiple_of(block) {
        return Err(Error::InvalidParameter(format!(
            "block length {block} does not divide word length {}",
            a.n()
        )));
    }
    non_overlap_strided(a, block)
}

fn non_overlap_strided(a: &WordSet, stride: u32) -> Result<WordSet> {
    let (q, n) = (a.q(), a.n());
    let images: Vec<(u64, WordSet)> = (0..n)
        .step_by(stride as usize)
        .map(|j| Ok((checked_pow(q, j).expect("within capacity"), a.shift_by(j)?)))
        .collect::<Result<_>>()?;
    WordSet::from_fn(q, n, |u| {
        images.iter().all(|(scale, img)| !img.contains(u / scale))
    })
}

/// Shift images `A_j = s^(n-j)(A)` for `j = 1..=n`; entry `j-1` is over `Omega^j`.
pub fn shift_images(a: &WordSet) -> Result<Vec<WordSet>> {
    let n = a.n();
    (1..=n).map(|j| a.shift_by(n - j)).collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncrementalOverlap {
    pub u: WordSet,
    /// `B_1, ..., B_n`; entry `j-1` is over `Omega^j`.
    pub b_seq: Vec<WordSet>,
}

/// `U(A)` as the complement of `B_n`, keeping every `B_j`.
pub fn non_overlap_incremental(a: &WordSet) -> Result<IncrementalOverlap> {
    let images = shift_images(a)?;
    let mut b_seq: Vec<WordSet> = Vec::with_capacity(images.len());
    for (idx, a_j) in images.iter().enumerate() {
        let b_j = match b_seq.last() {
            None => a_j.clone(),
            Some(prev) => prev.lift_set(idx as u32 + 1)?.union(a_j)?,
        };
        b_seq.push(b_j);
    }
    let u = b_seq.last().expect("n >= 1").complement();
    Ok(IncrementalOverlap { u, b_seq })
}

/// `f(w)`: how many of the cylinders `s^j(A) x Omega^j` contain `w`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageProfile {
    pub q: u32,
    pub n: u32,
    pub f: Vec<u32>,
    pub alpha: Ratio,
}

impl CoverageProfile {
    /// Number of words with `f(w) <= t`.
    pub fn level_count(&self, t: u32) -> u64 {
        self.f.iter().filter(|&&v| v <= t).count() as u64
    }

    pub fn level_measure(&self, t: u32) -> Ratio {
        Ratio::from_counts(self.level_count(t), self.f.len() as u64)
    }

    /// Words with `f(w) = 0`, which is exactly `U(A)`.
    pub fn zero_set(&self) -> WordSet {
        WordSet::from_fn(self.q, self.n, |i| self.f[i as usize] == 0)
            .expect("dimensions already validated")
    }
}

pub fn coverage_counts(a: &WordSet) -> Result<CoverageProfile> {
    let (q, n) = (a.q(), a.n());
    let mut f = vec![0u32; a.size() as usize];
    for j in 0..n {
        let image = a.shift_by(j)?;
        let scale = checked_pow(q, j).expect("within capacity");
        for (u, slot) in f.iter_mut().enumerate() {
            if image.contains(u as u64 / scale) {
                *slot += 1;
            }
        }
    }
    Ok(CoverageProfile {
        q,
        n,
        f,
        alpha: a.measure(),
    })
}

const CACHED_ROWS_LIMIT: u64 = 1 << 12;

/// For each word `w`, the bit set of words `u` such that `(w, u)` overlaps.
/// `U(A)` is the complement of the union of rows over `w in A`.
#[derive(Debug, Clone)]
pub struct OverlapKernel {
    q: u32,
    n: u32,
    size: u64,
    words_per_row: usize,
    rows: Option<Vec<u64>>,
}

impl OverlapKernel {
    pub fn new(q: u32, n: u32) -> Result<Self> {
        let size = WordSet::empty(q, n)?.size();
        let words_per_row = size.div_ceil(64) as usize;
        let mut kernel = OverlapKernel {
            q,
            n,
            size,
            words_per_row,
            rows: None,
        };
        if size <= CACHED_ROWS_LIMIT {
            let mut rows = vec![0u64; words_per_row * size as usize];
            for (w, row) in rows.chunks_mut(words_per_row).enumerate() {
                kernel.fill_row(w as u64, row);
            }
            kernel.rows = Some(rows);
        }
        Ok(kernel)
    }

    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn words_per_row(&self) -> usize {
        self.words_per_row
    }

    fn fill_row(&self, w: u64, row: &mut [u64]) {
        row.iter_mut().for_each(|x| *x = 0);
        for j in 1..=self.n {
            // suffix of w of length j equals prefix of u of length j
            let suffix = w % checked_pow(self.q, j).unwrap();
            let block = checked_pow(self.q, self.n - j).unwrap();
            set_range(row, suffix * block, (suffix + 1) * block);
        }
    }

    /// ORs the row of `w` into `acc`.
    pub fn accumulate(&self, w: u64, acc: &mut [u64]) {
        match &self.rows {
            Some(rows) => {
                let start = w as usize * self.words_per_row;
                for (a, r) in acc.iter_mut().zip(&rows[start..start + self.words_per_row]) {
                    *a |= r;
                }
            }
            None => {
                let mut row = vec![0u64; self.words_per_row];
                self.fill_row(w, &mut row);
                for (a, r) in acc.iter_mut().zip(&row) {
                    *a |= r;
                }
            }
        }
    }

    /// Number of words in the row of `w` that are not yet in `acc`.
    pub fn new_coverage(&self, w: u64, acc: &[u64]) -> u64 {
        let count = |row: &[u64]| -> u64 {
            row.iter()
                .zip(acc)
                .map(|(r, a)| (r & !a).count_ones() as u64)
                .sum()
        };
        match &self.rows {
            Some(rows) => {
                let start = w as usize * self.words_per_row;
                count(&rows[start..start + self.words_per_row])
            }
            None => {
                let mut row = vec![0u64; self.words_per_row];
                self.fill_row(w, &mut row);
                count(&row)
            }
        }
    }

    /// Covered set for the members of `a`; its complement is `U(a)`.
    pub fn covered(&self, members: impl IntoIterator<Item = u64>) -> Vec<u64> {
        let mut acc = vec![0u64; self.words_per_row];
        for w in members {
            self.accumulate(w, &mut acc);
        }
        acc
    }

    pub fn non_overlap(&self, a: &WordSet) -> Result<WordSet> {
        if a.q() != self.q || a.n() != self.n {
            return Err(Error::DimensionMismatch {
                left: (self.q, self.n),
                right: (a.q(), a.n()),
            });
        }
        let covered = self.covered(a.iter());
        Ok(WordSet::from_bits(self.q, self.n, self.size, covered).complement())
    }
}

fn set_range(bits: &mut [u64], start: u64, end: u64) {
    let mut i = start;
    while i < end {
        let (w, b) = ((i / 64) as usize, i % 64);
        let span = (64 - b).min(end - i);
        let mask = if span == 64 {
            u64::MAX
        } else {
            ((1u64 << span) - 1) << b
        };
        bits[w] |= mask;
        i += span;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wordspace::{overlaps_pair, Word};

    fn set(q: u32, n: u32, idx: &[u64]) -> WordSet {
        WordSet::from_indices(q, n, idx.iter().copied()).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        // A = {00}: U = {10, 11}
        let u = non_overlap_bruteforce(&set(2, 2, &[0])).unwrap();
        assert_eq!(u, set(2, 2, &[2, 3]));
        assert_eq!(u.measure(), Ratio::new(1, 2));
        // A = {00, 10}: U = {11}
        let u = non_overlap_bruteforce(&set(2, 2, &[0, 2])).unwrap();
        assert_eq!(u, set(2, 2, &[3]));
        assert_eq!(u.measure(), Ratio::new(1, 4));
        assert!(non_overlap_bruteforce(&WordSet::full(3, 3).unwrap())
            .unwrap()
            .is_empty());
        assert!(non_overlap_bruteforce(&WordSet::empty(3, 3).unwrap())
            .unwrap()
            .is_full());
    }

    #[test]
    fn incremental_examples() {
        let inc = non_overlap_incremental(&set(2, 2, &[0])).unwrap();
        assert_eq!(inc.b_seq[0], set(2, 1, &[0]));
        assert_eq!(inc.b_seq[1], set(2, 2, &[0, 1]));
        assert_eq!(inc.u, set(2, 2, &[2, 3]));

        let inc = non_overlap_incremental(&set(3, 2, &[0])).unwrap();
        assert_eq!(inc.u.count(), 6);
        assert_eq!(inc.u.measure(), Ratio::new(2, 3));
        assert!(inc.u.iter().all(|i| i / 3 != 0));
    }

    #[test]
    fn coverage_counts_zeros() {
        // A = Omega^3 x {0}: f(w) = number of zero symbols
        let a = WordSet::from_fn(2, 4, |i| i % 2 == 0).unwrap();
        let cov = coverage_counts(&a).unwrap();
        for i in 0..16u64 {
            let zeros = Word::decode(2, 4, i)
                .unwrap()
                .symbols()
                .iter()
                .filter(|&&s| s == 0)
                .count();
            assert_eq!(cov.f[i as usize], zeros as u32);
        }
        assert_eq!(cov.f[15], 0);
        let full = coverage_counts(&WordSet::full(2, 3).unwrap()).unwrap();
        assert!(full.f.iter().all(|&v| v == 3));
    }

    #[test]
    fn zero_set_is_u() {
        let a = set(3, 3, &[1, 4, 13, 20]);
        let cov = coverage_counts(&a).unwrap();
        assert_eq!(cov.zero_set(), non_overlap_bruteforce(&a).unwrap());
        assert_eq!(
            cov.level_measure(0),
            non_overlap_bruteforce(&a).unwrap().measure()
        );
    }

    #[test]
    fn kernel_matches_pairwise_exhaustively() {
        for (q, n) in [(2u32, 3u32), (3, 2), (2, 4), (4, 2)] {
            let kernel = OverlapKernel::new(q, n).unwrap();
            for w in 0..kernel.size() {
                let row = kernel.covered([w]);
                let ww = Word::decode(q, n, w).unwrap();
                for u in 0..kernel.size() {
                    let uu = Word::decode(q, n, u).unwrap();
                    let bit = row[(u / 64) as usize] >> (u % 64) & 1 == 1;
                    assert_eq!(bit, overlaps_pair(&ww, &uu).unwrap());
                }
            }
        }
    }

    #[test]
    fn uncached_kernel_agrees() {
        // q^n = 4096 is cached, 8192 is not
        let a = WordSet::from_fn(2, 13, |i| i % 97 == 3).unwrap();
        let kernel = OverlapKernel::new(2, 13).unwrap();
        assert!(kernel.rows.is_none());
        assert_eq!(
            kernel.non_overlap(&a).unwrap(),
            non_overlap_bruteforce(&a).unwrap()
        );
    }

    #[test]
    fn blocked_requires_divisor() {
        let a = set(2, 4, &[0]);
        assert!(non_overlap_blocked(&a, 3).is_err());
        assert_eq!(
            non_overlap_blocked(&a, 1).unwrap(),
            non_overlap_bruteforce(&a).unwrap()
        );
        // one block: only the full-length cylinder A itself
        assert_eq!(non_overlap_blocked(&a, 4).unwrap(), a.complement());
    }
}
