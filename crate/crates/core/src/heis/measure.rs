use super::{gauge_dist, Gauge, HeisPoint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

const CHUNK: usize = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloVolume {
    pub estimate: f64,
    pub std_error: f64,
    pub hits: u64,
    pub samples: u64,
}

/// Lebesgue volume of the Korányi ball `B(p, r)`.
pub fn ball_volume_mc(p: &HeisPoint, r: f64, n: usize, seed: u64) -> f64 {
    ball_volume_mc_gauge(Gauge::Koranyi, p, r, n, seed).estimate
}

/// Rejection sampling from the box `p·([−r,r]² × [−r²,r²])`, which contains
/// both gauge balls.
pub fn ball_volume_mc_gauge(g: Gauge, p: &HeisPoint, r: f64, n: usize, seed: u64) -> MonteCarloVolume {
    let box_vol = 8.0 * r.powi(4);
    let hits = mc_box_count([-r, -r, -r * r], [r, r, r * r], n, seed, |v| gauge_dist(g, p, &p.mul(&v)) < r);
    volume_from_hits(box_vol, hits, n)
}

pub(crate) fn volume_from_hits(box_vol: f64, hits: u64, n: usize) -> MonteCarloVolume {
    let frac = hits as f64 / n as f64;
    MonteCarloVolume {
        estimate: box_vol * frac,
        std_error: box_vol * (frac * (1.0 - frac) / n as f64).sqrt(),
        hits,
        samples: n as u64,
    }
}

/// Counts uniform samples of the coordinate box `[lo, hi]` satisfying `pred`.
/// Sample `i` belongs to chunk `i / 2¹⁶` and each chunk has its own ChaCha
/// stream, so the count does not depend on the thread count.
pub(crate) fn mc_box_count<F>(lo: [f64; 3], hi: [f64; 3], n: usize, seed: u64, pred: F) -> u64
where
    F: Fn(HeisPoint) -> bool + Sync,
{
    (0..n.div_ceil(CHUNK))
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            let len = CHUNK.min(n - c * CHUNK);
            let mut h = 0u64;
            for _ in 0..len {
                let v = HeisPoint::new(
                    rng.gen_range(lo[0]..hi[0]),
                    rng.gen_range(lo[1]..hi[1]),
                    rng.gen_range(lo[2]..hi[2]),
                );
                if pred(v) {
                    h += 1;
                }
            }
            h
        })
        .sum()
}
