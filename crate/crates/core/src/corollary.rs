//! Level sets of the coverage function `f` and the blocked-alphabet argument
//! behind the estimate `mu({f <= t}) <= 4t / (alpha n)` for `1 <= t <= n/4`.

use serde::Serialize;

use crate::certificates::theorem_bound;
use crate::error::{Error, Result};
use crate::overlap::{coverage_counts, non_overlap_blocked, CoverageProfile};
use crate::ratio::Ratio;
use crate::wordspace::{checked_pow, WordSet};

fn check_hypothesis(a: &WordSet, t: u32) -> Result<()> {
    if a.is_empty() || a.is_full() {
        return Err(Error::AlphaOutOfRange {
            alpha: a.measure().to_string(),
        });
    }
    let max = a.n() / 4;
    if t < 1 || t > max {
        return Err(Error::OutOfHypothesis { t, max });
    }
    Ok(())
}

/// `mu({w : f(w) <= t})`.
pub fn level_set_measure(a: &WordSet, t: u32) -> Result<Ratio> {
    check_hypothesis(a, t)?;
    Ok(coverage_counts(a)?.level_measure(t))
}

/// The "at least half is covered `alpha n / 8` times" consequence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfCoverage {
    /// `floor(alpha n / 8)`.
    pub t: u32,
    pub measure: Ratio,
    /// `mu({f > t}) >= 1/2`.
    pub at_least_half: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CorollaryReport {
    pub q: u32,
    pub n: u32,
    pub t: u32,
    pub alpha: Ratio,
    pub measure: Ratio,
    /// `4t / (alpha n)`.
    pub bound: Ratio,
    pub slack: Ratio,
    /// The bound is at least 1 and says nothing.
    pub vacuous: bool,
    /// Present when `alpha >= 1/n` and `floor(alpha n / 8) >= 1`.
    pub half_coverage: Option<HalfCoverage>,
    pub passed: bool,
}

fn half_coverage(cov: &CoverageProfile, alpha: &Ratio, n: u32) -> Option<HalfCoverage> {
    if alpha < &Ratio::new(1, n) {
        return None;
    }
    let scaled = alpha * Ratio::new(n, 8);
    let t = (scaled.numer() / scaled.denom()).try_into().ok()?;
    if t < 1 {
        return None;
    }
    let measure = cov.level_measure(t);
    let at_least_half = measure <= Ratio::new(1, 2);
    Some(HalfCoverage {
        t,
        measure,
        at_least_half,
    })
}

pub fn corollary_check(a: &WordSet, t: u32) -> Result<CorollaryReport> {
    check_hypothesis(a, t)?;
    let cov = coverage_counts(a)?;
    let alpha = a.measure();
    let n = a.n();
    let measure = cov.level_measure(t);
    let bound = Ratio::from_integer(4 * t as i64) / (&alpha * Ratio::from_integer(n as i64));
    let slack = &bound - &measure;
    let vacuous = bound >= Ratio::one();
    let half_coverage = half_coverage(&cov, &alpha, n);
    let passed = !slack.is_negative() && half_coverage.as_ref().is_none_or(|h| h.at_least_half);
    Ok(CorollaryReport {
        q: a.q(),
        n,
        t,
        alpha,
        measure,
        bound,
        slack,
        vacuous,
        half_coverage,
        passed,
    })
}

/// The sets `A~_i = s^(r+i)(A) x Omega^i` over `Omega^(2t n~)`, read as words
/// of length `n~ = floor(n / 2t)` over the alphabet `Omega^(2t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockedFamily {
    pub t: u32,
    pub n_tilde: u32,
    /// `n - 2t n~`.
    pub r: u32,
    pub families: Vec<WordSet>,
    /// `U~(A~_i)`, complements of block-shift cylinders.
    pub non_overlap: Vec<WordSet>,
}

impl BlockedFamily {
    pub fn block(&self) -> u32 {
        2 * self.t
    }
}

/// Needs `1 <= 2t <= n` so that `n~ >= 1`; the level-set estimate itself
/// additionally needs `t <= n/4`.
pub fn blocked_families(a: &WordSet, t: u32) -> Result<BlockedFamily> {
    if a.is_empty() || a.is_full() {
        return Err(Error::AlphaOutOfRange {
            alpha: a.measure().to_string(),
        });
    }
    if t < 1 || 2 * t > a.n() {
        return Err(Error::OutOfHypothesis { t, max: a.n() / 2 });
    }
    let block = 2 * t;
    let n_tilde = a.n() / block;
    let r = a.n() - block * n_tilde;
    let len = block * n_tilde;
    let families = (0..block)
        .map(|i| a.shift_by(r + i)?.lift_set(len))
        .collect::<Result<Vec<_>>>()?;
    let non_overlap = families
        .iter()
        .map(|f| non_overlap_blocked(f, block))
        .collect::<Result<_>>()?;
    Ok(BlockedFamily {
        t,
        n_tilde,
        r,
        families,
        non_overlap,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockedCountingReport {
    pub t: u32,
    pub n_tilde: u32,
    pub r: u32,
    pub family_measures: Vec<Ratio>,
    /// Every `mu(A~_i) >= alpha`.
    pub measures_ok: bool,
    pub non_overlap_measures: Vec<Ratio>,
    /// Every `mu(U~(A~_i))` respects the upper bound at length `n~`.
    pub theorem_ok: bool,
    /// Words where `#{i : w~ not in U~(A~_i)} > f(w)`.
    pub pointwise_violations: u64,
    /// `max_w (#{i : w~ not in U~(A~_i)} - f(w))`.
    pub max_excess: i64,
    /// `t mu({f <= t})`.
    pub union_lhs: Ratio,
    /// `sum_i mu(U~(A~_i))`.
    pub union_rhs: Ratio,
    pub union_ok: bool,
    pub passed: bool,
}

/// Checks the pointwise counting inequality for every word, with `w~` the
/// length-`2t n~` prefix of `w`, and the union bound derived from it.
pub fn blocked_counting_check(a: &WordSet, t: u32) -> Result<BlockedCountingReport> {
    let family = blocked_families(a, t)?;
    let cov = coverage_counts(a)?;
    let alpha = a.measure();
    let prefix_scale = checked_pow(a.q(), family.r).expect("within capacity");

    let mut pointwise_violations = 0;
    let mut max_excess = i64::MIN;
    for (w, &f) in cov.f.iter().enumerate() {
        let prefix = w as u64 / prefix_scale;
        let missed = family
            .non_overlap
            .iter()
            .filter(|u| !u.contains(prefix))
            .count() as i64;
        let excess = missed - f as i64;
        max_excess = max_excess.max(excess);
        if excess > 0 {
            pointwise_violations += 1;
        }
    }

    let family_measures: Vec<Ratio> = family.families.iter().map(WordSet::measure).collect();
    let measures_ok = family_measures.iter().all(|m| m >= &alpha);
    let non_overlap_measures: Vec<Ratio> =
        family.non_overlap.iter().map(WordSet::measure).collect();
    let theorem_ok = family_measures
        .iter()
        .zip(&non_overlap_measures)
        .all(|(fam, u)| {
            if fam >= &Ratio::one() {
                u.is_zero()
            } else {
                theorem_bound(fam, family.n_tilde).is_ok_and(|b| u <= &b)
            }
        });
    let union_lhs = Ratio::from_integer(t as i64) * cov.level_measure(t);
    let union_rhs: Ratio = non_overlap_measures.iter().sum();
    let union_ok = union_lhs <= union_rhs;
    let passed = pointwise_violations == 0 && measures_ok && theorem_ok && union_ok;
    Ok(BlockedCountingReport {
        t,
        n_tilde: family.n_tilde,
        r: family.r,
        family_measures,
        measures_ok,
        non_overlap_measures,
        theorem_ok,
        pointwise_violations,
        max_excess,
        union_lhs,
        union_rhs,
        union_ok,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn last_zero(n: u32) -> WordSet {
        WordSet::from_fn(2, n, |i| i % 2 == 0).unwrap()
    }

    #[test]
    fn level_set_example() {
        let a = last_zero(4);
        assert_eq!(level_set_measure(&a, 1).unwrap(), Ratio::new(5, 16));
        let rep = corollary_check(&a, 1).unwrap();
        assert_eq!(rep.bound, Ratio::from_integer(2));
        assert!(rep.passed && rep.vacuous);
        assert!(rep.half_coverage.is_none());
    }

    #[test]
    fn full_set_has_empty_low_levels() {
        let cov = coverage_counts(&WordSet::full(2, 8).unwrap()).unwrap();
        for t in 0..8 {
            assert!(cov.level_measure(t).is_zero());
        }
        assert!(matches!(
            level_set_measure(&WordSet::full(2, 8).unwrap(), 1),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn hypothesis_range() {
        let a = last_zero(4);
        assert_eq!(
            corollary_check(&a, 0),
            Err(Error::OutOfHypothesis { t: 0, max: 1 })
        );
        assert_eq!(
            corollary_check(&a, 2),
            Err(Error::OutOfHypothesis { t: 2, max: 1 })
        );
        assert!(matches!(
            corollary_check(&last_zero(3), 1),
            Err(Error::OutOfHypothesis { max: 0, .. })
        ));
    }

    #[test]
    fn blocked_shapes() {
        let a = last_zero(4);
        let fam = blocked_families(&a, 1).unwrap();
        assert_eq!((fam.n_tilde, fam.r, fam.block()), (2, 0, 2));
        assert_eq!(fam.families[0], a);
        assert_eq!(fam.families[1], a.shift_set().unwrap().lift_set(4).unwrap());
        assert!(fam.families.iter().all(|f| f.measure() >= a.measure()));

        let a = WordSet::from_fn(2, 9, |i| i % 5 == 1).unwrap();
        let fam = blocked_families(&a, 2).unwrap();
        assert_eq!((fam.n_tilde, fam.r), (2, 1));
        assert!(fam.families.iter().all(|f| f.n() == 8));

        // a single block: n = 4, t = 2
        let fam = blocked_families(&last_zero(4), 2).unwrap();
        assert_eq!((fam.n_tilde, fam.r, fam.families.len()), (1, 0, 4));
        assert!(blocked_families(&last_zero(4), 3).is_err());
    }

    #[test]
    fn counting_example() {
        let rep = blocked_counting_check(&last_zero(4), 1).unwrap();
        assert_eq!(rep.pointwise_violations, 0);
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn counting_with_remainder() {
        // n = 9, t = 2 gives r = 1
        for seed in 0..20u64 {
            let a = WordSet::from_fn(2, 9, |i| (i * 2654435761 + seed * 97) % 7 < 2).unwrap();
            let rep = blocked_counting_check(&a, 2).unwrap();
            assert!(rep.passed, "seed {seed}: {rep:?}");
        }
    }
}
