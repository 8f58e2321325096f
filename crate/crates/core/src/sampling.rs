//! Seeded random word sets for sweeps and batch certification.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::wordspace::WordSet;

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Each word is included independently with probability `density`.
pub fn random_set<R: Rng + ?Sized>(q: u32, n: u32, density: f64, rng: &mut R) -> Result<WordSet> {
    WordSet::from_fn(q, n, |_| rng.gen_bool(density.clamp(0.0, 1.0)))
}

/// A set that is neither empty nor full, with its density itself drawn
/// uniformly so that sparse and dense sets both show up.
pub fn random_proper_set<R: Rng + ?Sized>(q: u32, n: u32, rng: &mut R) -> Result<WordSet> {
    loop {
        let density = rng.gen_range(0.0..1.0);
        let set = random_set(q, n, density, rng)?;
        if !set.is_empty() && !set.is_full() {
            return Ok(set);
        }
    }
}

/// `count` proper sets from one seed; the same seed always yields the same list.
pub fn seeded_proper_sets(q: u32, n: u32, count: usize, seed: u64) -> Result<Vec<WordSet>> {
    let mut rng = rng_from_seed(seed);
    (0..count)
        .map(|_| random_proper_set(q, n, &mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let a = seeded_proper_sets(3, 3, 10, 7).unwrap();
        let b = seeded_proper_sets(3, 3, 10, 7).unwrap();
        assert_eq!(a, b);
        assert!(a.iter().all(|s| !s.is_empty() && !s.is_full()));
        assert_ne!(a, seeded_proper_sets(3, 3, 10, 8).unwrap());
    }
}
