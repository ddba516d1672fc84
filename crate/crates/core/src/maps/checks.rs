use super::differential::{central, frame_derivatives, horizontal_differential};
use super::{MapSpec, TargetKind};
use crate::error::{Error, Result};
use crate::heis::{flow, gauge_dist, mc_box_count, volume_from_hits, Gauge, HeisPoint};
use crate::scalar::Polynomial;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// `|α(Xf)| + |α(Yf)|` with plain central differences at `step`.
pub fn weak_contact_residual(spec: &MapSpec, p: &HeisPoint, step: f64) -> Result<f64> {
    let (xf, yf, frame, _) = frame_derivatives(spec, p, step, false)?;
    Ok(frame.contact_value(&xf).abs() + frame.contact_value(&yf).abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PushforwardReport {
    /// `|ι∗Z − c·W|` with `c = −i(1+w₂)²/(1+w̄₂)`.
    pub residual: f64,
    /// `|ι∗Z̄ − c̄·W̄|` on antiholomorphic coordinates plus `|Z̄ wⱼ|`.
    pub residual_conj: f64,
    /// `|ι∗Z + c·W|`; smaller than `residual` would signal a global sign flip.
    pub residual_flipped: f64,
}

impl PushforwardReport {
    pub fn sign_flipped(&self) -> bool {
        self.residual_flipped < self.residual
    }
}

fn complex_pair(c: &[f64]) -> [Complex64; 2] {
    [Complex64::new(c[0], c[1]), Complex64::new(c[2], c[3])]
}

pub fn pushforward_formula_check(p: &HeisPoint, step: f64) -> Result<PushforwardReport> {
    let spec = MapSpec::StereoIota;
    let w = super::eval_iota(p);
    if (w.w2 + 1.0).norm() < 1e-8 {
        return Err(Error::InvalidArgument("ι(p) is too close to (0,−1)".into()));
    }
    let vx = complex_pair(&central(&spec, p, 1.0, 0.0, step));
    let vy = complex_pair(&central(&spec, p, 0.0, 1.0, step));
    let i = Complex64::i();
    let z: Vec<Complex64> = (0..2).map(|j| 0.5 * (vx[j] - i * vy[j])).collect();
    let zbar_hol: Vec<Complex64> = (0..2).map(|j| 0.5 * (vx[j] + i * vy[j])).collect();
    let zbar_anti: Vec<Complex64> = (0..2).map(|j| 0.5 * (vx[j].conj() + i * vy[j].conj())).collect();
    let c = -i * (1.0 + w.w2).powi(2) / (1.0 + w.w2.conj());
    let pred = [c * w.w2.conj(), -c * w.w1.conj()];
    let pred_conj = [c.conj() * w.w2, -c.conj() * w.w1];
    let dist = |a: &[Complex64], b: &[Complex64; 2], s: f64| ((a[0] - s * b[0]).norm_sqr() + (a[1] - s * b[1]).norm_sqr()).sqrt();
    let hol = (zbar_hol[0].norm_sqr() + zbar_hol[1].norm_sqr()).sqrt();
    Ok(PushforwardReport {
        residual: dist(&z, &pred, 1.0),
        residual_conj: dist(&zbar_anti, &pred_conj, 1.0) + hol,
        residual_flipped: dist(&z, &pred, -1.0),
    })
}

/// `|h(p·(0,0,s)) − h(p)|`.
pub fn unknot_translation_residual(p: &HeisPoint, s: f64) -> f64 {
    let a = MapSpec::UnknotH.eval(&p.mul(&HeisPoint::new(0.0, 0.0, s))).coords();
    let b = MapSpec::UnknotH.eval(p).coords();
    a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn unknot_periodicity_check(p: &HeisPoint) -> f64 {
    unknot_translation_residual(p, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianReport {
    pub volume_ratio: f64,
    pub det_sq: f64,
    pub ball_volume: f64,
    pub image_volume: f64,
}

/// Monte-Carlo volume of `φ(B(p,r))` against `(det D_Hφ(p))²` for affine contact maps.
pub fn jacobian_identity_check(spec: &MapSpec, p: &HeisPoint, r: f64, n: usize, seed: u64) -> Result<JacobianReport> {
    if spec.target_kind() != TargetKind::Heis || !spec.is_affine() {
        return Err(Error::InvalidArgument(format!("{spec} is not an affine Heisenberg self-map")));
    }
    let inv = spec.inverse().ok_or_else(|| Error::InvalidArgument(format!("{spec} has no inverse")))?;
    if !(r > 0.0) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {r}")));
    }
    let g = Gauge::Koranyi;
    let inside = |q: &HeisPoint| gauge_dist(g, p, q) < r;

    // Coordinate box of B(p, r), pushed through the map corner by corner.
    let dt = r * r + 2.0 * r * (p.x.abs() + p.y.abs());
    let (lo, hi) = ([p.x - r, p.y - r, p.t - dt], [p.x + r, p.y + r, p.t + dt]);
    let vol = |lo: &[f64; 3], hi: &[f64; 3]| (hi[0] - lo[0]) * (hi[1] - lo[1]) * (hi[2] - lo[2]);
    let ball_hits = mc_box_count(lo, hi, n, seed, |q| inside(&q));
    let ball = volume_from_hits(vol(&lo, &hi), ball_hits, n);

    let (mut ilo, mut ihi) = ([f64::INFINITY; 3], [f64::NEG_INFINITY; 3]);
    for k in 0..8 {
        let c = HeisPoint::new(
            if k & 1 == 0 { lo[0] } else { hi[0] },
            if k & 2 == 0 { lo[1] } else { hi[1] },
            if k & 4 == 0 { lo[2] } else { hi[2] },
        );
        let img = spec.eval(&c).coords();
        for d in 0..3 {
            ilo[d] = ilo[d].min(img[d]);
            ihi[d] = ihi[d].max(img[d]);
        }
    }
    let img_hits = mc_box_count(ilo, ihi, n, seed.wrapping_add(0x9E37_79B9), |q| {
        inside(&inv.eval(&q).as_heis().expect("Heisenberg target"))
    });
    let image = volume_from_hits(vol(&ilo, &ihi), img_hits, n);
    let det = horizontal_differential(spec, p, super::DEFAULT_STEP)?.det();
    Ok(JacobianReport {
        volume_ratio: image.estimate / ball.estimate,
        det_sq: det * det,
        ball_volume: ball.estimate,
        image_volume: image.estimate,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleReport {
    /// `max |X(u∘f) − Σ ∂ᵢu·X(fᵢ)|` over `X, Y`.
    pub coordinate_residual: f64,
    /// `max |∇_H(u∘f) − (D_H f)ᵀ ∇_H u(f(p))|`.
    pub horizontal_residual: f64,
    pub lhs: [f64; 2],
    pub rhs_horizontal: [f64; 2],
}

pub fn appendix_chain_rule_check(spec: &MapSpec, u: &Polynomial, p: &HeisPoint, step: f64) -> Result<ChainRuleReport> {
    let (xf, yf, frame, image) = frame_derivatives(spec, p, step, true)?;
    let y = image.coords();
    if u.dim != y.len() {
        return Err(Error::InvalidArgument(format!("test function has dimension {}, target has {}", u.dim, y.len())));
    }
    let comp = |a: f64, b: f64, s: f64| -> f64 {
        let f = |s: f64| u.value(&spec.eval(&flow(p, a, b, s)).coords());
        (f(s) - f(-s)) / (2.0 * s)
    };
    let d = |a: f64, b: f64| (4.0 * comp(a, b, 0.5 * step) - comp(a, b, step)) / 3.0;
    let lhs = [d(1.0, 0.0), d(0.0, 1.0)];
    let grad = u.gradient(&y);
    let dotg = |v: &[f64]| v.iter().zip(&grad).map(|(a, b)| a * b).sum::<f64>();
    let coord = [dotg(&xf), dotg(&yf)];
    let gh = frame.horizontal_gradient(&grad);
    let cx = frame.coefficients(&xf);
    let cy = frame.coefficients(&yf);
    let rhs = [cx[0] * gh[0] + cx[1] * gh[1], cy[0] * gh[0] + cy[1] * gh[1]];
    Ok(ChainRuleReport {
        coordinate_residual: (lhs[0] - coord[0]).abs().max((lhs[1] - coord[1]).abs()),
        horizontal_residual: (lhs[0] - rhs[0]).abs().max((lhs[1] - rhs[1]).abs()),
        lhs,
        rhs_horizontal: rhs,
    })
}
