//! Seeded low-discrepancy sampling shared by the initial design, the
//! acquisition optimiser, and quasi-Monte-Carlo acquisition estimates.
//!
//! The sequence is a digit-scrambled Halton sequence: dimension `d` uses the
//! `d`-th prime as its base and a seeded random permutation of the digits
//! `0..p`, applied to every digit of the radical-inverse expansion. Points
//! lie strictly inside the open unit interval per coordinate, so they can be
//! mapped through inverse CDFs without hitting the endpoints.

/// Bases for the first 25 dimensions; callers validate their dimension
/// against [`MAX_DIMS`] before sampling.
const PRIMES: [u64; 25] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97,
];

/// Largest supported dimensionality of the scrambled Halton sequence.
pub const MAX_DIMS: usize = PRIMES.len();

/// Derives an independent stream seed from a base seed, so nested components
/// (per-step optimiser runs, per-seed initial designs) never share streams.
/// SplitMix64 finalisation keeps the mapping well spread even for small
/// consecutive inputs.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed
        .wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Digit-scrambled Halton sequence over `(0, 1)^dims`.
#[derive(Debug, Clone)]
pub struct ScrambledHalton {
    /// One digit permutation per dimension.
    perms: Vec<Vec<u64>>,
    /// Expansion depth per dimension, deep enough to exhaust f64 precision.
    depths: Vec<u32>,
    next_index: u64,
}

impl ScrambledHalton {
    /// # Panics
    ///
    /// Panics when `dims` is zero or exceeds [`MAX_DIMS`]; public callers
    /// validate their search spaces first.
    pub fn new(dims: usize, seed: u64) -> Self {
        assert!(dims > 0, "sampler needs at least one dimension");
        assert!(
            dims <= MAX_DIMS,
            "sampler supports at most {MAX_DIMS} dimensions, got {dims}"
        );
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut perms = Vec::with_capacity(dims);
        let mut depths = Vec::with_capacity(dims);
        for &p in PRIMES.iter().take(dims) {
            let mut perm: Vec<u64> = (0..p).collect();
            perm.shuffle(&mut rng);
            perms.push(perm);
            // p^depth > 2^53 so the expansion carries full f64 resolution.
            depths.push((53.0 / (p as f64).log2()).ceil() as u32);
        }
        Self {
            perms,
            depths,
            next_index: 1, // index 0 would map every digit through perm[0]
        }
    }

    /// Returns the next point of the sequence, each coordinate in `(0, 1)`.
    pub fn next_point(&mut self) -> Vec<f64> {
        let index = self.next_index;
        self.next_index += 1;
        (0..self.perms.len())
            .map(|d| self.coordinate(index, d))
            .collect()
    }

    fn coordinate(&self, index: u64, dim: usize) -> f64 {
        let p = PRIMES[dim];
        let perm = &self.perms[dim];
        let mut remaining = index;
        let mut value = 0.0;
        let mut scale = 1.0 / p as f64;
        for _ in 0..self.depths[dim] {
            let digit = remaining % p;
            remaining /= p;
            value += perm[digit as usize] as f64 * scale;
            scale /= p as f64;
        }
        value
    }
}

/// `count` scrambled-Halton points in `(0, 1)^dims`, deterministic in `seed`.
pub fn unit_samples(count: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut sampler = ScrambledHalton::new(dims, seed);
    (0..count).map(|_| sampler.next_point()).collect()
}
