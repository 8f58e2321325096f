//! Product families `A = Omega^(n-k) x S^k` with `S = {0, ..., s-1}`.
//!
//! For these sets `U(A)` is the set of words whose first letter lies outside
//! `S` and whose last `n-1` letters contain no run of `k` letters from `S`,
//! so `mu(U) = (1 - p) Pr[R_(n-1) < k]` with `p = s/q` and `R_m` the longest
//! success run in `m` Bernoulli(`p`) trials. Word counts avoiding such runs
//! satisfy `N(m) = q N(m-1) - (q-s) s^k N(m-k-1)` for `m > k`.

use num_bigint::BigUint;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ratio::Ratio;
use crate::wordspace::WordSet;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ProductFamilySpec {
    pub q: u32,
    pub s: u32,
    pub n: u32,
    pub k: u32,
}

impl ProductFamilySpec {
    pub fn new(q: u32, s: u32, n: u32, k: u32) -> Result<Self> {
        let spec = ProductFamilySpec { q, s, n, k };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.q < 2 {
            return Err(Error::InvalidAlphabet(self.q));
        }
        if self.n < 1 {
            return Err(Error::InvalidLength(self.n));
        }
        if self.s == 0 || self.s >= self.q {
            return Err(Error::InvalidParameter(format!(
                "|S| = {} must satisfy 0 < s < q = {}",
                self.s, self.q
            )));
        }
        if self.k < 1 || self.k > self.n {
            return Err(Error::InvalidParameter(format!(
                "k = {} must satisfy 1 <= k <= n = {}",
                self.k, self.n
            )));
        }
        Ok(())
    }

    pub fn p(&self) -> Ratio {
        Ratio::new(self.s, self.q)
    }

    /// `alpha = (s/q)^k`.
    pub fn alpha(&self) -> Ratio {
        self.p().pow(self.k)
    }
}

/// Membership table of `Omega^(n-k) x S^k`.
pub fn product_family(spec: &ProductFamilySpec) -> Result<WordSet> {
    spec.validate()?;
    let (q, s, k) = (spec.q as u64, spec.s as u64, spec.k);
    WordSet::from_fn(spec.q, spec.n, |index| {
        let mut rest = index;
        (0..k).all(|_| {
            let digit = rest % q;
            rest /= q;
            digit < s
        })
    })
}

fn big_pow(base: u32, exp: u32) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

/// Number of words of length `m` over `q` letters with no `k` consecutive
/// letters from a fixed `s`-subset.
pub fn no_run_count(m: u32, k: u32, q: u32, s: u32) -> Result<BigUint> {
    Ok(no_run_counts(m, k, q, s)?.pop().expect("m + 1 entries"))
}

/// `N(0), ..., N(m)`.
pub fn no_run_counts(m: u32, k: u32, q: u32, s: u32) -> Result<Vec<BigUint>> {
    if k < 1 {
        return Err(Error::InvalidParameter(
            "run threshold k must be at least 1".into(),
        ));
    }
    if s > q {
        return Err(Error::InvalidParameter(format!("s = {s} exceeds q = {q}")));
    }
    let mut counts: Vec<BigUint> = Vec::with_capacity(m as usize + 1);
    let decay = BigUint::from(q - s) * big_pow(s, k);
    let q_big = BigUint::from(q);
    for len in 0..=m {
        let value = if len < k {
            big_pow(q, len)
        } else if len == k {
            big_pow(q, k) - big_pow(s, k)
        } else {
            &q_big * &counts[len as usize - 1] - &decay * &counts[(len - k - 1) as usize]
        };
        counts.push(value);
    }
    Ok(counts)
}

/// `Pr[R_m < k]` for success probability `p`, exactly.
pub fn no_run_probability(m: u32, k: u32, p: &Ratio) -> Result<Ratio> {
    if k < 1 {
        return Err(Error::InvalidParameter(
            "run threshold k must be at least 1".into(),
        ));
    }
    if p.is_negative() || p > &Ratio::one() {
        return Err(Error::InvalidParameter(format!(
            "p = {p} is not a probability"
        )));
    }
    let pk = p.pow(k);
    let decay = (Ratio::one() - p) * &pk;
    let mut probs: Vec<Ratio> = Vec::with_capacity(m as usize + 1);
    for len in 0..=m {
        let value = if len < k {
            Ratio::one()
        } else if len == k {
            Ratio::one() - &pk
        } else {
            &probs[len as usize - 1] - &decay * &probs[(len - k - 1) as usize]
        };
        probs.push(value);
    }
    Ok(probs.pop().expect("m + 1 entries"))
}

/// `Pr[R_m < k]` in floating point: O(m) time, O(k) memory.
pub fn no_run_probability_f64(m: u64, k: u64, p: f64) -> f64 {
    assert!(k >= 1, "run threshold must be positive");
    if m < k {
        return 1.0;
    }
    let pk = p.powi(k.min(i32::MAX as u64) as i32);
    let decay = (1.0 - p) * pk;
    // ring[i % (k+1)] holds a_i for the last k+1 lengths
    let width = (k + 1) as usize;
    let mut ring = vec![1.0f64; width];
    ring[k as usize % width] = 1.0 - pk;
    for len in (k + 1)..=m {
        let prev = ring[((len - 1) % width as u64) as usize];
        let back = ring[((len - k - 1) % width as u64) as usize];
        ring[(len % width as u64) as usize] = prev - decay * back;
    }
    ring[(m % width as u64) as usize]
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RunDistribution {
    pub m: u32,
    pub k: u32,
    pub p: Ratio,
    pub prob_no_run: Ratio,
    #[serde(serialize_with = "serialize_big")]
    pub counts: BigUint,
}

fn serialize_big<S: serde::Serializer>(
    value: &BigUint,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

pub fn run_distribution(m: u32, k: u32, q: u32, s: u32) -> Result<RunDistribution> {
    let counts = no_run_count(m, k, q, s)?;
    let prob_no_run = Ratio::from_big_counts(&counts, &big_pow(q, m));
    Ok(RunDistribution {
        m,
        k,
        p: Ratio::new(s, q),
        prob_no_run,
        counts,
    })
}

/// `mu(U(A)) = (1 - s/q) N(n-1) / q^(n-1)`.
pub fn closed_form_mu_u(spec: &ProductFamilySpec) -> Result<Ratio> {
    spec.validate()?;
    let dist = run_distribution(spec.n - 1, spec.k, spec.q, spec.s)?;
    Ok((Ratio::one() - spec.p()) * dist.prob_no_run)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoissonEstimate {
    pub lambda: f64,
    /// `exp(-lambda)`.
    pub approx: f64,
    /// `lambda (2k+1)/(n-1) + 2 p^k`.
    pub error_bound: f64,
}

/// Poisson approximation of `Pr[R_(n-1) < k]` with
/// `lambda = p^k ((n-2)(1-p) + 1)`.
pub fn poisson_estimate(n: u64, k: u64, p: f64) -> Result<PoissonEstimate> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "n = {n} must be at least 2"
        )));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "p = {p} must lie in (0,1)"
        )));
    }
    let pk = p.powf(k as f64);
    let lambda = pk * ((n as f64 - 2.0) * (1.0 - p) + 1.0);
    Ok(PoissonEstimate {
        lambda,
        approx: (-lambda).exp(),
        error_bound: lambda * (2.0 * k as f64 + 1.0) / (n as f64 - 1.0) + 2.0 * pk,
    })
}

/// How `n alpha ln(1/alpha)` is turned into an integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KRounding {
    #[default]
    Nearest,
    Floor,
}

impl std::str::FromStr for KRounding {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nearest" => Ok(KRounding::Nearest),
            "floor" => Ok(KRounding::Floor),
            other => Err(Error::InvalidParameter(format!(
                "unknown rounding `{other}`"
            ))),
        }
    }
}

/// `k = [n alpha ln(1/alpha)]`, clamped to `[1, n]`.
pub fn optimal_k(n: u64, alpha: f64, rounding: KRounding) -> Result<u64> {
    if n < 1 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    let raw = n as f64 * alpha * (1.0 / alpha).ln();
    let k = match rounding {
        KRounding::Nearest => raw.round(),
        KRounding::Floor => raw.floor(),
    };
    Ok((k as u64).clamp(1, n))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticPoint {
    pub n: u64,
    pub alpha: f64,
    pub k: u64,
    /// `alpha^(1/k)`.
    pub p: f64,
    pub prob_no_run: f64,
    pub mu_u: f64,
    /// `alpha n mu(U)`.
    pub scaled: f64,
}

/// `alpha n mu(U)` for the family with `k` fixed by [`optimal_k`].
pub fn asymptotic_scan(n: u64, alpha: f64, rounding: KRounding) -> Result<AsymptoticPoint> {
    let k = optimal_k(n, alpha, rounding)?;
    family_point(n, k, alpha)
}

/// Same as [`asymptotic_scan`] with an explicit `k`.
pub fn family_point(n: u64, k: u64, alpha: f64) -> Result<AsymptoticPoint> {
    if n < 1 || k < 1 || k > n {
        return Err(Error::InvalidParameter(format!(
            "need 1 <= k = {k} <= n = {n}"
        )));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::AlphaOutOfRange {
            alpha: alpha.to_string(),
        });
    }
    let p = alpha.powf(1.0 / k as f64);
    let prob_no_run = no_run_probability_f64(n - 1, k, p);
    let mu_u = (1.0 - p) * prob_no_run;
    Ok(AsymptoticPoint {
        n,
        alpha,
        k,
        p,
        prob_no_run,
        mu_u,
        scaled: alpha * n as f64 * mu_u,
    })
}
