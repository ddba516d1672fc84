use super::checks::weak_contact_residual;
use super::differential::{horizontal_differential, norm_det_identity_check, DEFAULT_STEP};
use super::MapSpec;
use crate::error::Result;
use crate::heis::HeisPoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub spec: String,
    pub n_samples: usize,
    pub seed: u64,
    pub max_distortion: f64,
    pub min_distortion: f64,
    pub max_contact_residual: f64,
    pub det_identity_max_err: f64,
    /// Draws discarded by the singular-locus guard.
    pub rejected: usize,
}

/// `n` points of `[−2,2]² × [−4,4]` away from the singular locus of `spec`.
pub fn sample_points(spec: &MapSpec, n: usize, seed: u64) -> (Vec<HeisPoint>, usize) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pts = Vec::with_capacity(n);
    let mut rejected = 0;
    while pts.len() < n {
        let p = HeisPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-4.0..4.0));
        if spec.guard(&p).is_ok() {
            pts.push(p);
        } else {
            rejected += 1;
        }
    }
    (pts, rejected)
}

pub fn audit_map(spec: &MapSpec, n: usize, seed: u64) -> Result<AuditRecord> {
    spec.validate()?;
    let (pts, rejected) = sample_points(spec, n, seed);
    let rows: Vec<(f64, f64, f64)> = pts
        .par_iter()
        .map(|p| -> Result<(f64, f64, f64)> {
            let d = horizontal_differential(spec, p, DEFAULT_STEP)?;
            let (lhs, rhs) = norm_det_identity_check(&d.m);
            let res = weak_contact_residual(spec, p, DEFAULT_STEP)?;
            Ok((d.distortion(), res, (lhs - rhs).abs()))
        })
        .collect::<Result<_>>()?;
    let fold = |f: fn(f64, f64) -> f64, init: f64, pick: fn(&(f64, f64, f64)) -> f64| rows.iter().map(pick).fold(init, f);
    Ok(AuditRecord {
        spec: spec.to_string(),
        n_samples: n,
        seed,
        max_distortion: fold(f64::max, 0.0, |r| r.0),
        min_distortion: fold(f64::min, f64::INFINITY, |r| r.0),
        max_contact_residual: fold(f64::max, 0.0, |r| r.1),
        det_identity_max_err: fold(f64::max, 0.0, |r| r.2),
        rejected,
    })
}
