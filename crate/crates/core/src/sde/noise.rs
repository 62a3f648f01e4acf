use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifies one Brownian path: a master seed plus the path's index within
/// an ensemble.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedLineage {
    pub master_seed: u64,
    pub path_index: u64,
}

impl SeedLineage {
    pub const fn new(master_seed: u64, path_index: u64) -> Self {
        SeedLineage {
            master_seed,
            path_index,
        }
    }
}

impl fmt::Display for SeedLineage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "seed {} path {}", self.master_seed, self.path_index)
    }
}

/// Stream of independent standard normal pairs `(ζ_k, ξ_k)` driving the two
/// Brownian motions.
///
/// The generator is ChaCha8 keyed by the master seed with the path index as
/// the 64-bit stream id, so every path reads its own disjoint keystream and
/// the sequence does not depend on which thread runs it. Normals come from
/// the ziggurat transform of `rand_distr::StandardNormal`; `ζ_k` is drawn
/// before `ξ_k`.
#[derive(Debug, Clone)]
pub struct NoiseStream {
    lineage: SeedLineage,
    rng: ChaCha8Rng,
    step: u64,
}

impl NoiseStream {
    pub fn new(lineage: SeedLineage) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(lineage.master_seed);
        rng.set_stream(lineage.path_index);
        NoiseStream {
            lineage,
            rng,
            step: 0,
        }
    }

    pub fn lineage(&self) -> SeedLineage {
        self.lineage
    }

    /// Number of pairs drawn so far.
    pub fn step(&self) -> u64 {
        self.step
    }

    #[inline]
    pub fn gaussian_pair(&mut self) -> (f64, f64) {
        self.step += 1;
        let zeta: f64 = self.rng.sample(StandardNormal);
        let xi: f64 = self.rng.sample(StandardNormal);
        (zeta, xi)
    }
}
