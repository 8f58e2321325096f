//! Extremal non-overlap densities over a fixed alphabet.
//!
//! Results here are `gamma_q(m/q^n, n)`: the best `mu(U(A))` over sets of
//! size `m` in `Omega^n` with `|Omega| = q`. That is a lower bound on the
//! supremum over all finite alphabets.

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::overlap::OverlapKernel;
use crate::ratio::Ratio;
use crate::wordspace::{space_size, WordSet};

/// Largest number of subsets [`exhaustive_gamma`] will examine.
pub const SEARCH_BUDGET: u64 = 100_000_000;

/// Witness sets kept per result.
pub const WITNESS_CAP: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchMethod {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchResult {
    pub method: SearchMethod,
    pub q: u32,
    pub n: u32,
    pub m: u64,
    pub alpha: Ratio,
    pub best_mu_u: Ratio,
    /// Argmax sets, first [`WITNESS_CAP`] in enumeration order.
    pub witnesses: Vec<WordSet>,
    /// Number of argmax sets found (exhaustive) or distinct best sets seen (greedy).
    pub witness_count: u64,
    pub explored: u64,
}

fn binomial(n: u64, k: u64) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc = acc * BigUint::from(n - i) / BigUint::from(i + 1);
    }
    acc
}

fn check_size(q: u32, n: u32, m: u64) -> Result<u64> {
    let size = space_size(q, n)?;
    if m < 1 || m >= size {
        return Err(Error::InvalidParameter(format!(
            "set size m = {m} must lie in [1, {}]",
            size - 1
        )));
    }
    Ok(size)
}

/// Number of subsets [`exhaustive_gamma`] would examine.
pub fn search_space(q: u32, n: u32, m: u64) -> Result<BigUint> {
    let size = check_size(q, n, m)?;
    Ok(binomial(size, m))
}

#[derive(Default)]
struct Best {
    covered: u64,
    witnesses: Vec<Vec<u64>>,
    ties: u64,
    explored: u64,
}

impl Best {
    fn new() -> Self {
        Best {
            covered: u64::MAX,
            ..Default::default()
        }
    }

    fn offer(&mut self, covered: u64, combo: &[u64]) {
        self.explored += 1;
        if covered < self.covered {
            self.covered = covered;
            self.witnesses.clear();
            self.ties = 0;
        }
        if covered == self.covered {
            self.ties += 1;
            if self.witnesses.len() < WITNESS_CAP {
                let mut sorted = combo.to_vec();
                sorted.sort_unstable();
                self.witnesses.push(sorted);
            }
        }
    }

    /// Merges a later block of the enumeration into this one.
    fn merge(mut self, later: Best) -> Best {
        self.explored += later.explored;
        if later.covered < self.covered {
            let explored = self.explored;
            return Best { explored, ..later };
        }
        if later.covered == self.covered {
            self.ties += later.ties;
            let room = WITNESS_CAP - self.witnesses.len();
            self.witnesses
                .extend(later.witnesses.into_iter().take(room));
        }
        self
    }
}

struct Walker<'a> {
    kernel: &'a OverlapKernel,
    levels: Vec<Vec<u64>>,
    combo: Vec<u64>,
    best: Best,
}

impl Walker<'_> {
    /// Chooses `remaining` more elements below `upper`, largest first and in
    /// increasing order at each level, which visits combinations in colex order.
    fn walk(&mut self, remaining: usize, upper: u64) {
        let depth = self.combo.len();
        if remaining == 0 {
            let covered = self.levels[depth]
                .iter()
                .map(|w| w.count_ones() as u64)
                .sum();
            let combo = std::mem::take(&mut self.combo);
            self.best.offer(covered, &combo);
            self.combo = combo;
            return;
        }
        for c in (remaining as u64 - 1)..upper {
            let (head, tail) = self.levels.split_at_mut(depth + 1);
            tail[0].copy_from_slice(&head[depth]);
            self.kernel.accumulate(c, &mut tail[0]);
            self.combo.push(c);
            self.walk(remaining - 1, c);
            self.combo.pop();
        }
    }
}

/// Exact maximum of `mu(U(A))` over all `A` of size `m`.
///
/// The enumeration is split by the largest chosen word; each block is a
/// contiguous colex rank interval, so the merged result does not depend on
/// the thread count.
pub fn exhaustive_gamma(q: u32, n: u32, m: u64) -> Result<SearchResult> {
    let size = check_size(q, n, m)?;
    let total = binomial(size, m);
    if total > BigUint::from(SEARCH_BUDGET) {
        return Err(Error::SearchBudget {
            required: total.to_string(),
            limit: SEARCH_BUDGET,
        });
    }
    let kernel = OverlapKernel::new(q, n)?;
    let wpr = kernel.words_per_row();
    let blocks: Vec<Best> = ((m - 1)..size)
        .into_par_iter()
        .map(|top| {
            let mut walker = Walker {
                kernel: &kernel,
                levels: vec![vec![0u64; wpr]; m as usize + 1],
                combo: Vec::with_capacity(m as usize),
                best: Best::new(),
            };
            kernel.accumulate(top, &mut walker.levels[1]);
            walker.combo.push(top);
            walker.walk(m as usize - 1, top);
            walker.best
        })
        .collect();
    let best = blocks.into_iter().fold(Best::new(), Best::merge);
    debug_assert_eq!(BigUint::from(best.explored), total);
    let witnesses = best
        .witnesses
        .iter()
        .map(|w| WordSet::from_indices(q, n, w.iter().copied()))
        .collect::<Result<_>>()?;
    Ok(SearchResult {
        method: SearchMethod::Exhaustive,
        q,
        n,
        m,
        alpha: Ratio::from_counts(m, size),
        best_mu_u: Ratio::from_counts(size - best.covered, size),
        witnesses,
        witness_count: best.ties,
        explored: best.explored,
    })
}

struct GreedyState<'a> {
    kernel: &'a OverlapKernel,
    members: Vec<u64>,
    in_set: Vec<bool>,
    /// How many members cover each word.
    cover_count: Vec<u32>,
    covered_bits: Vec<u64>,
    covered: u64,
}

impl<'a> GreedyState<'a> {
    fn new(kernel: &'a OverlapKernel) -> Self {
        let size = kernel.size() as usize;
        GreedyState {
            kernel,
            members: Vec::new(),
            in_set: vec![false; size],
            cover_count: vec![0; size],
            covered_bits: vec![0; kernel.words_per_row()],
            covered: 0,
        }
    }

    fn row(&self, w: u64) -> Vec<u64> {
        let mut row = vec![0u64; self.kernel.words_per_row()];
        self.kernel.accumulate(w, &mut row);
        row
    }

    fn for_each_in_row(&self, w: u64, mut f: impl FnMut(usize)) {
        for (wi, &bits) in self.row(w).iter().enumerate() {
            let mut rest = bits;
            while rest != 0 {
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                f(wi * 64 + b);
            }
        }
    }

    fn add(&mut self, w: u64) {
        let mut hits = Vec::new();
        self.for_each_in_row(w, |u| hits.push(u));
        for u in hits {
            self.cover_count[u] += 1;
            if self.cover_count[u] == 1 {
                self.covered_bits[u / 64] |= 1 << (u % 64);
                self.covered += 1;
            }
        }
        self.members.push(w);
        self.in_set[w as usize] = true;
    }

    fn remove(&mut self, w: u64) {
        let mut hits = Vec::new();
        self.for_each_in_row(w, |u| hits.push(u));
        for u in hits {
            self.cover_count[u] -= 1;
            if self.cover_count[u] == 0 {
                self.covered_bits[u / 64] &= !(1 << (u % 64));
                self.covered -= 1;
            }
        }
        self.members.retain(|&x| x != w);
        self.in_set[w as usize] = false;
    }

    /// Covered set with `w`'s exclusive coverage removed.
    fn covered_without(&self, w: u64) -> (Vec<u64>, u64) {
        let mut bits = self.covered_bits.clone();
        let mut freed = 0;
        self.for_each_in_row(w, |u| {
            if self.cover_count[u] == 1 {
                bits[u / 64] &= !(1 << (u % 64));
                freed += 1;
            }
        });
        (bits, freed)
    }
}

/// Lower bound on `gamma_q` by greedy growth plus pairwise swaps.
///
/// Each restart starts from a random word and repeatedly adds the word
/// whose overlap row covers the fewest still-uncovered words (ties broken
/// at random). It then applies improving member/non-member swaps until
/// none is left. Deterministic for a given `seed`.
pub fn greedy_gamma(q: u32, n: u32, m: u64, restarts: u32, seed: u64) -> Result<SearchResult> {
    let size = check_size(q, n, m)?;
    let kernel = OverlapKernel::new(q, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut explored = 0u64;
    let mut best_covered = u64::MAX;
    let mut best_sets: Vec<Vec<u64>> = Vec::new();

    for _ in 0..restarts.max(1) {
        let mut state = GreedyState::new(&kernel);
        state.add(rng.gen_range(0..size));
        while (state.members.len() as u64) < m {
            let mut best_gain = u64::MAX;
            let mut candidates = Vec::new();
            for w in 0..size {
                if state.in_set[w as usize] {
                    continue;
                }
                explored += 1;
                let gain = kernel.new_coverage(w, &state.covered_bits);
                if gain < best_gain {
                    best_gain = gain;
                    candidates.clear();
                }
                if gain == best_gain {
                    candidates.push(w);
                }
            }
            let pick = *candidates
                .choose(&mut rng)
                .expect("m < q^n leaves a candidate");
            state.add(pick);
        }

        let max_passes = 4 * m as usize + 4;
        for _ in 0..max_passes {
            let mut improved = false;
            let mut members = state.members.clone();
            members.shuffle(&mut rng);
            'outer: for &out in &members {
                let (without, freed) = state.covered_without(out);
                for cand in 0..size {
                    if state.in_set[cand as usize] {
                        continue;
                    }
                    explored += 1;
                    if kernel.new_coverage(cand, &without) < freed {
                        state.remove(out);
                        state.add(cand);
                        improved = true;
                        break 'outer;
                    }
                }
            }
            if !improved {
                break;
            }
        }

        let mut set = state.members.clone();
        set.sort_unstable();
        if state.covered < best_covered {
            best_covered = state.covered;
            best_sets.clear();
        }
        if state.covered == best_covered && !best_sets.contains(&set) {
            best_sets.push(set);
        }
    }

    let witness_count = best_sets.len() as u64;
    best_sets.sort();
    let witnesses = best_sets
        .iter()
        .take(WITNESS_CAP)
        .map(|w| WordSet::from_indices(q, n, w.iter().copied()))
        .collect::<Result<_>>()?;
    Ok(SearchResult {
        method: SearchMethod::Greedy,
        q,
        n,
        m,
        alpha: Ratio::from_counts(m, size),
        best_mu_u: Ratio::from_counts(size - best_covered, size),
        witnesses,
        witness_count,
        explored,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum N2Branch {
    /// `(1 - alpha)^2`, attained by `Omega x S`.
    Product,
    /// `1 - alpha^(1/2)`, attained by `S^2`.
    Power,
    Tie,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GammaN2 {
    pub alpha: Ratio,
    pub product: Ratio,
    /// `1 - sqrt(alpha)` when `sqrt(alpha)` is rational.
    pub power_exact: Option<Ratio>,
    pub power: f64,
    pub branch: N2Branch,
    /// The maximum, exact whenever the attaining branch is rational.
    pub exact: Option<Ratio>,
    pub value: f64,
}

/// `max{(1 - alpha)^2, 1 - alpha^(1/2)}`, with the winning branch decided exactly.
pub fn gamma_n2_formula(alpha: &Ratio) -> Result<GammaN2> {
    if !alpha.is_positive() || alpha >= &Ratio::one() {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    let one = Ratio::one();
    let product = (&one - alpha).pow(2);
    let power_exact = alpha.sqrt_exact().map(|r| &one - r);
    let power = 1.0 - alpha.to_f64().sqrt();
    // 1 - sqrt(a) > (1-a)^2  <=>  a (2-a)^2 > 1
    let key = alpha * (Ratio::from_integer(2) - alpha).pow(2);
    let branch = match key.cmp(&one) {
        std::cmp::Ordering::Greater => N2Branch::Power,
        std::cmp::Ordering::Less => N2Branch::Product,
        std::cmp::Ordering::Equal => N2Branch::Tie,
    };
    let exact = match branch {
        N2Branch::Product | N2Branch::Tie => Some(product.clone()),
        N2Branch::Power => power_exact.clone(),
    };
    let value = match &exact {
        Some(r) => r.to_f64(),
        None => power,
    };
    Ok(GammaN2 {
        alpha: alpha.clone(),
        product,
        power_exact,
        power,
        branch,
        exact,
        value,
    })
}

/// Exhaustive `gamma_q` for every `m` in `1..q^n`, used for monotonicity scans.
pub fn exhaustive_profile(q: u32, n: u32) -> Result<Vec<SearchResult>> {
    let size = space_size(q, n)?;
    (1..size).map(|m| exhaustive_gamma(q, n, m)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::overlap::non_overlap_bruteforce;

    #[test]
    fn exhaustive_small() {
        let r = exhaustive_gamma(2, 2, 2).unwrap();
        assert_eq!(r.best_mu_u, Ratio::new(1, 4));
        assert_eq!(r.explored, 6);
        assert!(r
            .witnesses
            .iter()
            .any(|w| w.iter().collect::<Vec<_>>() == vec![0, 2]));
        for w in &r.witnesses {
            assert_eq!(w.count(), 2);
            assert_eq!(non_overlap_bruteforce(w).unwrap().measure(), r.best_mu_u);
        }
    }

    #[test]
    fn exhaustive_n2_sharpness() {
        let r = exhaustive_gamma(4, 2, 4).unwrap();
        assert_eq!(r.best_mu_u, Ratio::new(9, 16));
        assert_eq!(r.explored, 1820);
        let r = exhaustive_gamma(4, 2, 9).unwrap();
        assert_eq!(r.best_mu_u, Ratio::new(1, 4));
        assert_eq!(r.explored, 11440);
    }

    #[test]
    fn exhaustive_guard() {
        assert!(matches!(
            exhaustive_gamma(2, 5, 16),
            Err(Error::SearchBudget { .. })
        ));
        assert!(exhaustive_gamma(2, 2, 0).is_err());
        assert!(exhaustive_gamma(2, 2, 4).is_err());
    }

    #[test]
    fn witnesses_in_colex_order() {
        let r = exhaustive_gamma(2, 3, 2).unwrap();
        let keys: Vec<Vec<u64>> = r
            .witnesses
            .iter()
            .map(|w| {
                let mut v: Vec<u64> = w.iter().collect();
                v.reverse();
                v
            })
            .collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
    }

    #[test]
    fn greedy_examples() {
        let g = greedy_gamma(2, 2, 1, 4, 1).unwrap();
        assert_eq!(g.best_mu_u, Ratio::new(1, 2));
        let g = greedy_gamma(4, 2, 4, 8, 1).unwrap();
        assert_eq!(g.best_mu_u, exhaustive_gamma(4, 2, 4).unwrap().best_mu_u);
        let g = greedy_gamma(2, 3, 7, 2, 3).unwrap();
        assert!(g.best_mu_u == Ratio::zero() || g.best_mu_u == Ratio::new(1, 8));
    }

    #[test]
    fn greedy_deterministic() {
        let a = greedy_gamma(3, 3, 5, 3, 42).unwrap();
        let b = greedy_gamma(3, 3, 5, 3, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn n2_formula_examples() {
        let g = gamma_n2_formula(&Ratio::new(1, 4)).unwrap();
        assert_eq!(g.exact, Some(Ratio::new(9, 16)));
        assert_eq!(g.branch, N2Branch::Product);
        assert_eq!(g.power_exact, Some(Ratio::new(1, 2)));
        let g = gamma_n2_formula(&Ratio::new(9, 16)).unwrap();
        assert_eq!(g.product, Ratio::new(49, 256));
        assert_eq!(g.exact, Some(Ratio::new(1, 4)));
        assert_eq!(g.branch, N2Branch::Power);
        let g = gamma_n2_formula(&Ratio::new(999_999, 1_000_000)).unwrap();
        assert!(g.value < 1e-6);
        let g = gamma_n2_formula(&Ratio::new(1, 2)).unwrap();
        assert_eq!(g.branch, N2Branch::Power);
        assert!(g.exact.is_none());
        assert!((g.value - (1.0 - 0.5f64.sqrt())).abs() < 1e-15);
    }
}
