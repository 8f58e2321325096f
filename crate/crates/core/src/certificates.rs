//! Density profiles and checkable certificates for the upper bound
//! `alpha * mu(U(A)) <= (1/n) (n/(n+1))^(n+1)`.
//!
//! For a set `A` over `Omega^n` the profile records, for `j = 1..=n`,
//!
//! * `alpha_j = mu(A_j)` with `A_j = s^(n-j)(A)` and `alpha_0 = 1`,
//! * `beta_j = mu(B_j)` with `B_j = Omega^j \ U(A_j)` and `beta_0 = 0`,
//! * `gamma_j = 1 - beta_j`, so `gamma_0 = 1` and `gamma_n = mu(U(A))`,
//! * `delta_j = alpha_(j-1) - alpha_j`.
//!
//! Every inequality between these quantities is checked exactly. The one
//! irrational quantity is the root `rho > 1` of `F(rho) = sum_j delta_j rho^j = 1`,
//! which is enclosed between rational endpoints whose `F` values are
//! compared to 1 in exact arithmetic.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::overlap::{non_overlap_incremental, shift_images};
use crate::ratio::Ratio;
use crate::wordspace::{checked_pow, WordSet};

/// Default tolerance for the `rho`-dependent comparison.
pub const RHO_TOLERANCE: f64 = 1e-9;

/// Maximum width of the enclosure returned by [`solve_rho`].
pub const RHO_WIDTH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DensityProfile {
    pub q: u32,
    pub n: u32,
    /// `alpha_1..alpha_n`.
    pub alpha: Vec<Ratio>,
    /// `beta_1..beta_n`.
    pub beta: Vec<Ratio>,
    /// `gamma_0..gamma_n`.
    pub gamma: Vec<Ratio>,
    /// `delta_1..delta_n`.
    pub delta: Vec<Ratio>,
    /// `mu(D_j)` for `D_j = A_j \ (B_(j-1) x Omega)`, `j = 1..=n`.
    pub d_measure: Vec<Ratio>,
}

impl DensityProfile {
    /// Builds a profile from `alpha_1..alpha_n` and `beta_1..beta_n`,
    /// deriving `gamma`, `delta`, and taking `mu(D_j) = beta_j - beta_(j-1)`.
    pub fn from_parts(q: u32, alpha: Vec<Ratio>, beta: Vec<Ratio>) -> Result<Self> {
        if alpha.is_empty() || alpha.len() != beta.len() {
            return Err(Error::InconsistentProfile(format!(
                "alpha has {} entries, beta has {}",
                alpha.len(),
                beta.len()
            )));
        }
        let n = alpha.len() as u32;
        let gamma = std::iter::once(Ratio::one())
            .chain(beta.iter().map(|b| Ratio::one() - b))
            .collect();
        let delta = (1..=n as usize)
            .map(|j| alpha_at(&alpha, j - 1) - &alpha[j - 1])
            .collect();
        let d_measure = (1..=n as usize)
            .map(|j| &beta[j - 1] - beta_at(&beta, j - 1))
            .collect();
        Ok(DensityProfile {
            q,
            n,
            alpha,
            beta,
            gamma,
            delta,
            d_measure,
        })
    }

    /// `alpha_j` for `j` in `0..=n`.
    pub fn alpha_at(&self, j: usize) -> Ratio {
        alpha_at(&self.alpha, j)
    }

    /// `beta_j` for `j` in `0..=n`.
    pub fn beta_at(&self, j: usize) -> Ratio {
        beta_at(&self.beta, j).clone()
    }

    /// `delta_j` for `j` in `1..=n`.
    pub fn delta_at(&self, j: usize) -> &Ratio {
        &self.delta[j - 1]
    }

    /// `alpha = alpha_n = mu(A)`.
    pub fn alpha_n(&self) -> &Ratio {
        self.alpha.last().expect("n >= 1")
    }

    /// `gamma_n = mu(U(A))`.
    pub fn gamma_n(&self) -> &Ratio {
        self.gamma.last().expect("n >= 1")
    }

    /// Checks the structural relations that hold for every profile of a set.
    pub fn check_invariants(&self) -> Result<()> {
        let n = self.n as usize;
        let fail = |msg: String| Err(Error::InconsistentProfile(msg));
        if self.alpha.len() != n
            || self.beta.len() != n
            || self.gamma.len() != n + 1
            || self.delta.len() != n
        {
            return fail("vector lengths do not match n".into());
        }
        if self.beta[0] != self.alpha[0] {
            return fail(format!(
                "beta_1 = {} differs from alpha_1 = {}",
                self.beta[0], self.alpha[0]
            ));
        }
        for j in 2..=n {
            if self.beta[j - 1] < self.beta[j - 2] {
                return fail(format!("beta_{j} < beta_{}", j - 1));
            }
            if self.alpha[j - 1] > self.alpha[j - 2] {
                return fail(format!("alpha_{j} > alpha_{}", j - 1));
            }
        }
        for j in 1..=n {
            if self.delta[j - 1].is_negative() {
                return fail(format!("delta_{j} = {} is negative", self.delta[j - 1]));
            }
            let step = &self.beta[j - 1] - beta_at(&self.beta, j - 1);
            if step != self.d_measure[j - 1] {
                return fail(format!(
                    "mu(D_{j}) = {} but beta_{j} - beta_{} = {step}",
                    self.d_measure[j - 1],
                    j - 1
                ));
            }
            if self.gamma[j] != Ratio::one() - &self.beta[j - 1] {
                return fail(format!("gamma_{j} != 1 - beta_{j}"));
            }
        }
        let total: Ratio = self.delta.iter().sum();
        if total + self.alpha_n() != Ratio::one() {
            return fail("sum of delta_j plus alpha_n is not 1".into());
        }
        Ok(())
    }
}

fn alpha_at(alpha: &[Ratio], j: usize) -> Ratio {
    if j == 0 {
        Ratio::one()
    } else {
        alpha[j - 1].clone()
    }
}

fn beta_at(beta: &[Ratio], j: usize) -> &Ratio {
    static ZERO: std::sync::OnceLock<Ratio> = std::sync::OnceLock::new();
    if j == 0 {
        ZERO.get_or_init(Ratio::zero)
    } else {
        &beta[j - 1]
    }
}

fn require_proper(a: &WordSet) -> Result<()> {
    if a.is_empty() || a.is_full() {
        return Err(Error::AlphaOutOfRange {
            alpha: a.measure().to_string(),
        });
    }
    Ok(())
}

/// Exact density profile of `A`; `mu(D_j)` is measured on the sets themselves.
pub fn density_profile(a: &WordSet) -> Result<DensityProfile> {
    require_proper(a)?;
    let images = shift_images(a)?;
    let inc = non_overlap_incremental(a)?;
    let q = a.q();
    let n = a.n();
    let alpha: Vec<Ratio> = images.iter().map(WordSet::measure).collect();
    let beta: Vec<Ratio> = inc.b_seq.iter().map(WordSet::measure).collect();
    let mut profile = DensityProfile::from_parts(q, alpha, beta)?;
    for j in 1..=n as usize {
        let d_j = if j == 1 {
            images[0].clone()
        } else {
            images[j - 1].difference(&inc.b_seq[j - 2].lift_set(j as u32)?)?
        };
        profile.d_measure[j - 1] = d_j.measure();
    }
    profile.check_invariants()?;
    Ok(profile)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaEntry {
    pub j: u32,
    pub r: u32,
    pub lambda: Ratio,
}

/// `lambda_(j,r) = max over w in Omega^r of mu(A_j(w))`, `1 <= r <= j-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LambdaTable {
    pub n: u32,
    pub entries: Vec<LambdaEntry>,
}

impl LambdaTable {
    pub fn get(&self, j: u32, r: u32) -> Option<&Ratio> {
        self.entries
            .iter()
            .find(|e| e.j == j && e.r == r)
            .map(|e| &e.lambda)
    }

    /// Entries violating `alpha_(j-r) >= lambda_(j,r)`.
    pub fn violations<'a>(
        &'a self,
        profile: &'a DensityProfile,
    ) -> impl Iterator<Item = &'a LambdaEntry> + 'a {
        self.entries
            .iter()
            .filter(move |e| profile.alpha_at((e.j - e.r) as usize) < e.lambda)
    }
}

fn max_slice_measure(set: &WordSet, r: u32) -> Ratio {
    let q = set.q();
    let tail = checked_pow(q, set.n() - r).expect("within capacity");
    let mut counts = vec![0u64; checked_pow(q, r).expect("within capacity") as usize];
    for i in set.iter() {
        counts[(i / tail) as usize] += 1;
    }
    Ratio::from_counts(counts.into_iter().max().unwrap_or(0), tail)
}

pub fn lambda_table(a: &WordSet) -> Result<LambdaTable> {
    let images = shift_images(a)?;
    let n = a.n();
    let mut entries = Vec::new();
    for j in 2..=n {
        let a_j = &images[j as usize - 1];
        for r in 1..j {
            entries.push(LambdaEntry {
                j,
                r,
                lambda: max_slice_measure(a_j, r),
            });
        }
    }
    Ok(LambdaTable { n, entries })
}

/// One side of the slice bound `mu(A n (B x Omega^(n-r))) <= lambda mu(B)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SliceBound {
    pub lhs: Ratio,
    pub lambda: Ratio,
    pub rhs: Ratio,
    pub holds: bool,
}

/// Checks the slice bound for `A` over `Omega^n` and `B` over `Omega^r`.
pub fn slice_bound(a: &WordSet, b: &WordSet) -> Result<SliceBound> {
    if a.q() != b.q() || b.n() > a.n() {
        return Err(Error::DimensionMismatch {
            left: (a.q(), a.n()),
            right: (b.q(), b.n()),
        });
    }
    let lhs = a.intersect(&b.lift_set(a.n())?)?.measure();
    let lambda = if b.n() == a.n() {
        // A(w) lives in Omega^0: measure 1 if w in A
        if a.is_empty() {
            Ratio::zero()
        } else {
            Ratio::one()
        }
    } else {
        max_slice_measure(a, b.n())
    };
    let rhs = &lambda * &b.measure();
    let holds = lhs <= rhs;
    Ok(SliceBound {
        lhs,
        lambda,
        rhs,
        holds,
    })
}

/// Per-`j` exact slacks of one family of inequalities; `slacks[j-1]` is for `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InequalityReport {
    pub name: &'static str,
    pub slacks: Vec<Ratio>,
    pub min_slack: Ratio,
    /// Indices `j` with zero slack.
    pub tight: Vec<u32>,
    pub passed: bool,
}

impl InequalityReport {
    fn from_slacks(name: &'static str, slacks: Vec<Ratio>) -> Self {
        let min_slack = slacks.iter().min().cloned().unwrap_or_else(Ratio::zero);
        let tight = slacks
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_zero())
            .map(|(i, _)| i as u32 + 1)
            .collect();
        let passed = !min_slack.is_negative();
        InequalityReport {
            name,
            slacks,
            min_slack,
            tight,
            passed,
        }
    }

    pub fn is_tight_at(&self, j: u32) -> bool {
        self.tight.contains(&j)
    }
}

/// `beta_j >= alpha_j + sum_(i=1)^(j-1) (1 - alpha_(j-i)) (beta_i - beta_(i-1))`.
pub fn verify_beta_inequality(p: &DensityProfile) -> InequalityReport {
    let slacks = (1..=p.n as usize)
        .map(|j| {
            let rhs: Ratio = (1..j)
                .map(|i| (Ratio::one() - p.alpha_at(j - i)) * (p.beta_at(i) - p.beta_at(i - 1)))
                .sum::<Ratio>()
                + p.alpha_at(j);
            p.beta_at(j) - rhs
        })
        .collect();
    InequalityReport::from_slacks("beta", slacks)
}

/// `gamma_j <= sum_(i=0)^(j-1) gamma_i delta_(j-i)`.
pub fn verify_gamma_inequality(p: &DensityProfile) -> InequalityReport {
    let slacks = (1..=p.n as usize)
        .map(|j| {
            let rhs: Ratio = (0..j).map(|i| &p.gamma[i] * p.delta_at(j - i)).sum();
            rhs - &p.gamma[j]
        })
        .collect();
    InequalityReport::from_slacks("gamma", slacks)
}

/// Rational enclosure `[lo, hi]` of the root of `F(rho) = 1` on `rho > 1`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RhoEnclosure {
    pub lo: Ratio,
    pub hi: Ratio,
    pub rho: f64,
}

/// `F(rho) = sum_j delta_j rho^j` with exact comparison against 1.
struct Polynomial {
    /// `delta_j * D` for a common denominator `D`.
    scaled: Vec<BigInt>,
    denominator: BigInt,
    coeffs: Vec<f64>,
}

impl Polynomial {
    fn new(delta: &[Ratio]) -> Self {
        let denominator = delta
            .iter()
            .fold(BigInt::one(), |acc, d| acc.lcm(d.denom()));
        let scaled = delta
            .iter()
            .map(|d| d.numer() * (&denominator / d.denom()))
            .collect();
        let coeffs = delta.iter().map(Ratio::to_f64).collect();
        Polynomial {
            scaled,
            denominator,
            coeffs,
        }
    }

    /// Sign of `F(rho) - 1`, exactly.
    fn compare_exact(&self, rho: &Ratio) -> Ordering {
        let n = self.scaled.len();
        let (a, b) = (rho.numer(), rho.denom());
        let mut b_pows = Vec::with_capacity(n + 1);
        b_pows.push(BigInt::one());
        for k in 1..=n {
            let next = &b_pows[k - 1] * b;
            b_pows.push(next);
        }
        let mut a_pow = BigInt::one();
        let mut total = BigInt::zero();
        for (j, d) in self.scaled.iter().enumerate() {
            a_pow *= a;
            if !d.is_zero() {
                total += d * &a_pow * &b_pows[n - j - 1];
            }
        }
        total.cmp(&(&self.denominator * &b_pows[n]))
    }

    /// Sign of `F(rho) - 1` from floating point, when the margin is clear.
    fn compare_float(&self, rho: f64) -> Option<Ordering> {
        let mut value = 0.0;
        let mut pow = 1.0;
        for c in &self.coeffs {
            pow *= rho;
            value += c * pow;
        }
        if !value.is_finite() {
            return Some(Ordering::Greater);
        }
        let margin = 64.0 * (self.coeffs.len() as f64 + 2.0) * f64::EPSILON * value.max(1.0);
        if value - 1.0 > margin {
            Some(Ordering::Greater)
        } else if 1.0 - value > margin {
            Some(Ordering::Less)
        } else {
            None
        }
    }

    fn compare(&self, rho: &Ratio, allow_float: bool) -> Ordering {
        if allow_float {
            if let Some(ord) = self.compare_float(rho.to_f64()) {
                return ord;
            }
        }
        self.compare_exact(rho)
    }
}

fn bisect(poly: &Polynomial, width: &Ratio, allow_float: bool) -> (Ratio, Ratio) {
    let two = Ratio::from_integer(2);
    let mut lo = Ratio::one();
    let mut hi = two.clone();
    while poly.compare_exact(&hi) == Ordering::Less {
        lo = hi.clone();
        hi = &hi * &two;
    }
    while &(&hi - &lo) > width {
        let mid = (&lo + &hi) / &two;
        match poly.compare(&mid, allow_float) {
            Ordering::Less => lo = mid,
            _ => hi = mid,
        }
    }
    (lo, hi)
}

/// Solves `sum_j delta_j rho^j = 1` for `rho > 1`, where
/// `sum_j delta_j = 1 - alpha` with `alpha` in `(0, 1)`.
///
/// The result satisfies `F(lo) <= 1 <= F(hi)` exactly and `hi - lo <= 1e-12`.
pub fn solve_rho(delta: &[Ratio], alpha: &Ratio) -> Result<RhoEnclosure> {
    if !alpha.is_positive() || alpha >= &Ratio::one() {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    if delta.is_empty() {
        return Err(Error::InconsistentProfile("empty delta vector".into()));
    }
    if let Some(d) = delta.iter().find(|d| d.is_negative()) {
        return Err(Error::InconsistentProfile(format!("negative delta {d}")));
    }
    if delta.iter().all(Ratio::is_zero) {
        return Err(Error::InconsistentProfile("all delta_j vanish".into()));
    }
    let total: Ratio = delta.iter().sum();
    if total + alpha != Ratio::one() {
        return Err(Error::InconsistentProfile(
            "sum of delta_j is not 1 - alpha".into(),
        ));
    }
    let poly = Polynomial::new(delta);
    let width = Ratio::new(1, 1_000_000_000_000i64);
    let (mut lo, mut hi) = bisect(&poly, &width, true);
    if poly.compare_exact(&lo) == Ordering::Greater || poly.compare_exact(&hi) == Ordering::Less {
        (lo, hi) = bisect(&poly, &width, false);
    }
    let rho = ((&lo + &hi) / Ratio::from_integer(2)).to_f64();
    Ok(RhoEnclosure { lo, hi, rho })
}

/// `(rho - 1) / rho^(n+1)`.
fn rho_ratio(rho: &Ratio, n: u32) -> Ratio {
    (rho - Ratio::one()) / rho.pow(n + 1)
}

/// `(n/(n+1))^(n+1) / (alpha n)`.
pub fn theorem_bound(alpha: &Ratio, n: u32) -> Result<Ratio> {
    if n < 1 {
        return Err(Error::InvalidLength(n));
    }
    if !alpha.is_positive() || alpha >= &Ratio::one() {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    let base = Ratio::new(n, n + 1).pow(n + 1);
    Ok(base / (alpha * Ratio::from_integer(n)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TheoremCertificate {
    pub q: u32,
    pub n: u32,
    pub alpha: Ratio,
    pub gamma_n: Ratio,
    pub rho: f64,
    pub rho_lo: Ratio,
    pub rho_hi: Ratio,
    /// `alpha * gamma_n`.
    pub lhs: Ratio,
    /// `min((rho - 1)/rho^(n+1))` over the enclosure endpoints.
    pub rhs: f64,
    /// `(1/n) (n/(n+1))^(n+1)`, compared against `lhs` exactly.
    pub outer_bound: Ratio,
    /// `(n/(n+1))^(n+1) / (alpha n)`, the bound on `gamma_n` alone.
    pub bound: Ratio,
    pub inner_slack: f64,
    pub outer_slack: Ratio,
    pub tolerance: f64,
    pub inner_pass: bool,
    pub outer_pass: bool,
    pub passed: bool,
}

/// Assembles the two-stage certificate from a validated profile.
pub fn certificate_from_profile(p: &DensityProfile, tolerance: f64) -> Result<TheoremCertificate> {
    p.check_invariants()?;
    let alpha = p.alpha_n().clone();
    let gamma_n = p.gamma_n().clone();
    let enclosure = solve_rho(&p.delta, &alpha)?;
    let lhs = &alpha * &gamma_n;
    // g is unimodal, so its minimum over the enclosure sits at an endpoint
    let rhs_exact = rho_ratio(&enclosure.lo, p.n).min(rho_ratio(&enclosure.hi, p.n));
    let inner_slack_exact = &rhs_exact - &lhs;
    let tol = Ratio::from_f64(tolerance)
        .ok_or_else(|| Error::InvalidParameter(format!("tolerance {tolerance} is not finite")))?;
    let inner_pass = inner_slack_exact >= -tol;
    let bound = theorem_bound(&alpha, p.n)?;
    let outer_bound = &bound * &alpha;
    let outer_slack = &outer_bound - &lhs;
    let outer_pass = !outer_slack.is_negative();
    Ok(TheoremCertificate {
        q: p.q,
        n: p.n,
        alpha,
        gamma_n,
        rho: enclosure.rho,
        rho_lo: enclosure.lo,
        rho_hi: enclosure.hi,
        lhs,
        rhs: rhs_exact.to_f64(),
        outer_bound,
        bound,
        inner_slack: inner_slack_exact.to_f64(),
        outer_slack,
        tolerance,
        inner_pass,
        outer_pass,
        passed: inner_pass && outer_pass,
    })
}

pub fn verify_theorem_certificate(a: &WordSet) -> Result<TheoremCertificate> {
    verify_theorem_certificate_with(a, RHO_TOLERANCE)
}

pub fn verify_theorem_certificate_with(a: &WordSet, tolerance: f64) -> Result<TheoremCertificate> {
    let profile = density_profile(a)?;
    certificate_from_profile(&profile, tolerance)
}

/// Everything checkable about one set: profile, slice maxima, both proof
/// inequalities and the final certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FullCertificate {
    pub profile: DensityProfile,
    pub lambda: LambdaTable,
    pub lambda_pass: bool,
    pub beta: InequalityReport,
    pub gamma: InequalityReport,
    pub theorem: TheoremCertificate,
    pub passed: bool,
}

pub fn certify(a: &WordSet, tolerance: f64) -> Result<FullCertificate> {
    let profile = density_profile(a)?;
    let lambda = lambda_table(a)?;
    let lambda_pass = lambda.violations(&profile).next().is_none();
    let beta = verify_beta_inequality(&profile);
    let gamma = verify_gamma_inequality(&profile);
    let theorem = certificate_from_profile(&profile, tolerance)?;
    let passed = lambda_pass && beta.passed && gamma.passed && theorem.passed;
    Ok(FullCertificate {
        profile,
        lambda,
        lambda_pass,
        beta,
        gamma,
        theorem,
        passed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MaximizerReport {
    pub n: u32,
    pub peak_rho: f64,
    pub peak_value: f64,
    pub grid_max: f64,
    pub grid_argmax: f64,
    pub passed: bool,
}

pub const MAXIMIZER_GRID: u32 = 10_000;

/// Scans `(rho - 1)/rho^(n+1)` on `rho = 1 + 9i/10^4`, `i = 1..=10^4`, and
/// checks that nothing exceeds the value at `(n+1)/n` by more than `1e-12`.
pub fn rho_maximizer_check(n: u32) -> Result<MaximizerReport> {
    if n < 1 {
        return Err(Error::InvalidLength(n));
    }
    let g = |rho: f64| (rho - 1.0) / rho.powi(n as i32 + 1);
    let peak_rho = (n as f64 + 1.0) / n as f64;
    let peak_value = g(peak_rho);
    let (grid_argmax, grid_max) = (1..=MAXIMIZER_GRID)
        .map(|i| {
            let rho = 1.0 + 9.0 * i as f64 / MAXIMIZER_GRID as f64;
            (rho, g(rho))
        })
        .fold((1.0, f64::NEG_INFINITY), |best, cur| {
            if cur.1 > best.1 {
                cur
            } else {
                best
            }
        });
    Ok(MaximizerReport {
        n,
        peak_rho,
        peak_value,
        grid_max,
        grid_argmax,
        passed: grid_max <= peak_value + 1e-12,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64, d: i64) -> Ratio {
        Ratio::new(n, d)
    }

    fn set(q: u32, n: u32, idx: &[u64]) -> WordSet {
        WordSet::from_indices(q, n, idx.iter().copied()).unwrap()
    }

    #[test]
    fn profile_single_zero_word() {
        let p = density_profile(&set(2, 2, &[0])).unwrap();
        assert_eq!(p.alpha, vec![r(1, 2), r(1, 4)]);
        assert_eq!(p.beta, vec![r(1, 2), r(1, 2)]);
        assert_eq!(p.gamma, vec![r(1, 1), r(1, 2), r(1, 2)]);
        assert_eq!(p.delta, vec![r(1, 2), r(1, 4)]);
    }

    #[test]
    fn profile_omega_times_s() {
        let p = density_profile(&set(2, 2, &[0, 2])).unwrap();
        assert_eq!(p.alpha, vec![r(1, 2), r(1, 2)]);
        assert_eq!(p.beta, vec![r(1, 2), r(3, 4)]);
        assert_eq!(p.gamma, vec![r(1, 1), r(1, 2), r(1, 4)]);
        assert_eq!(p.delta, vec![r(1, 2), r(0, 1)]);
    }

    #[test]
    fn degenerate_sets_rejected() {
        assert!(matches!(
            density_profile(&WordSet::full(2, 3).unwrap()),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            density_profile(&WordSet::empty(2, 3).unwrap()),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn tampered_profile_detected() {
        let mut p = density_profile(&set(2, 3, &[0, 5])).unwrap();
        p.beta[1] = r(1, 8);
        assert!(matches!(
            p.check_invariants(),
            Err(Error::InconsistentProfile(_))
        ));
        assert!(certificate_from_profile(&p, RHO_TOLERANCE).is_err());
    }

    #[test]
    fn lambda_examples() {
        let t = lambda_table(&set(2, 2, &[0])).unwrap();
        assert_eq!(t.get(2, 1), Some(&r(1, 2)));
        let t = lambda_table(&WordSet::full(3, 3).unwrap()).unwrap();
        assert!(t.entries.iter().all(|e| e.lambda == Ratio::one()));
        let t = lambda_table(&set(2, 4, &[11])).unwrap();
        for e in &t.entries {
            let single = r(1, 1 << (e.j - e.r));
            assert!(e.lambda == single || e.lambda.is_zero(), "{e:?}");
        }
    }

    #[test]
    fn beta_and_gamma_examples() {
        let p = density_profile(&set(2, 2, &[0])).unwrap();
        let beta = verify_beta_inequality(&p);
        assert_eq!(beta.slacks, vec![r(0, 1), r(0, 1)]);
        assert!(beta.passed);
        let gamma = verify_gamma_inequality(&p);
        assert_eq!(gamma.slacks, vec![r(0, 1), r(0, 1)]);
        assert!(gamma.is_tight_at(2));
    }

    #[test]
    fn negative_slack_fails() {
        let p =
            DensityProfile::from_parts(2, vec![r(1, 2), r(1, 4)], vec![r(1, 2), r(1, 4)]).unwrap();
        // beta decreasing: not a real profile
        assert!(p.check_invariants().is_err());
        assert!(!verify_beta_inequality(&p).passed);
        assert!(!verify_gamma_inequality(&p).passed);
    }

    fn assert_encloses(e: &RhoEnclosure, exact: f64) {
        assert!(&e.hi - &e.lo <= Ratio::new(1, 1_000_000_000_000i64));
        assert!(
            e.lo.to_f64() <= exact + 1e-15 && exact <= e.hi.to_f64() + 1e-15,
            "{e:?} vs {exact}"
        );
    }

    #[test]
    fn rho_examples() {
        let e = solve_rho(&[r(1, 2)], &r(1, 2)).unwrap();
        assert_encloses(&e, 2.0);
        let e = solve_rho(&[r(1, 2), r(1, 4)], &r(1, 4)).unwrap();
        assert_encloses(&e, 5f64.sqrt() - 1.0);
        let e = solve_rho(&[r(0, 1), r(0, 1), r(7, 8)], &r(1, 8)).unwrap();
        assert_encloses(&e, (7.0f64 / 8.0).powf(-1.0 / 3.0));
    }

    #[test]
    fn rho_far_from_one() {
        // alpha close to 1 forces rho ~ 2^16
        let e = solve_rho(&[r(1, 65536)], &r(65535, 65536)).unwrap();
        assert_eq!(e.hi, Ratio::from_integer(65536));
        assert!(&e.hi - &e.lo <= Ratio::new(1, 1_000_000_000_000i64));
    }

    #[test]
    fn rho_errors() {
        assert!(solve_rho(&[r(0, 1), r(0, 1)], &r(1, 1)).is_err());
        assert!(matches!(
            solve_rho(&[r(0, 1)], &r(1, 2)),
            Err(Error::InconsistentProfile(_))
        ));
        assert!(solve_rho(&[r(1, 4)], &r(1, 2)).is_err());
    }

    #[test]
    fn theorem_bound_examples() {
        assert_eq!(theorem_bound(&r(1, 2), 1).unwrap(), r(1, 2));
        assert_eq!(theorem_bound(&r(1, 2), 2).unwrap(), r(8, 27));
        assert_eq!(theorem_bound(&r(1, 4), 2).unwrap(), r(16, 27));
        assert!(theorem_bound(&r(1, 1), 2).is_err());
        assert!(theorem_bound(&r(1, 2), 0).is_err());
    }

    #[test]
    fn certificate_equality_case() {
        let c = verify_theorem_certificate(&set(2, 2, &[0])).unwrap();
        assert_eq!(c.lhs, r(1, 8));
        assert_eq!(c.bound, r(16, 27));
        assert_eq!(c.outer_bound, r(4, 27));
        assert!((c.rhs - 0.125).abs() < 1e-11);
        assert!(c.inner_slack.abs() < 1e-11);
        assert!(c.passed);
    }

    #[test]
    fn certificate_n1() {
        for q in 2..=6u32 {
            for m in 1..q as u64 {
                let a = WordSet::from_indices(q, 1, 0..m).unwrap();
                let c = verify_theorem_certificate(&a).unwrap();
                let alpha = Ratio::from_counts(m, q as u64);
                assert_eq!(c.lhs, &alpha * (Ratio::one() - &alpha));
                assert!(c.lhs <= r(1, 4));
                assert!(c.passed);
            }
        }
    }

    #[test]
    fn maximizer_examples() {
        let m = rho_maximizer_check(1).unwrap();
        assert!((m.peak_value - 0.25).abs() < 1e-15 && m.passed);
        let m = rho_maximizer_check(2).unwrap();
        assert!((m.peak_value - 4.0 / 27.0).abs() < 1e-15 && m.passed);
        let m = rho_maximizer_check(10).unwrap();
        assert!(m.passed && m.grid_max <= m.peak_value + 1e-12);
        assert!((m.grid_argmax - 1.1).abs() < 1e-3);
    }

    #[test]
    fn slice_bound_simple() {
        let a = set(2, 3, &[0, 1, 2, 7]);
        let b = set(2, 1, &[0]);
        let s = slice_bound(&a, &b).unwrap();
        assert_eq!(s.lhs, r(3, 8));
        assert_eq!(s.lambda, r(3, 4));
        assert!(s.holds);
    }
}
