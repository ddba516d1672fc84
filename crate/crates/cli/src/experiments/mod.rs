//! One module per experiment; each parses its own parameters and returns an [`Outcome`](crate::Outcome).

pub mod audit_maps;
pub mod capacity;
pub mod coarea;
pub mod green;
pub mod growth;
pub mod net_ip;
pub mod poincare;
pub mod transfer;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream per purpose so adding draws in one place leaves others unchanged.
pub(crate) fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(id);
    r
}

pub(crate) fn max_of(xs: impl IntoIterator<Item = f64>) -> f64 {
    xs.into_iter().fold(0.0, f64::max)
}
