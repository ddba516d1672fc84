use super::frame::{target_frame, FrameId, TargetFrame};
use super::{MapSpec, TargetPoint};
use crate::error::{Error, Result};
use crate::heis::{flow, HeisPoint};
use nalgebra::Matrix2;
use serde::{Deserialize, Serialize};

pub const DEFAULT_STEP: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalDifferential {
    /// Row `i` holds the `eᵢ` coefficients of `Xf` and `Yf`.
    pub m: [[f64; 2]; 2],
    pub source_base: HeisPoint,
    pub target_frame_id: FrameId,
}

impl HorizontalDifferential {
    pub fn matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.m[0][0], self.m[0][1], self.m[1][0], self.m[1][1])
    }

    pub fn det(&self) -> f64 {
        self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]
    }

    /// `(σ_max, σ_min)`.
    pub fn singular_values(&self) -> (f64, f64) {
        singular_values(&self.m)
    }

    pub fn distortion(&self) -> f64 {
        let (smax, smin) = self.singular_values();
        if smax == 0.0 {
            1.0
        } else {
            smax / smin
        }
    }
}

pub fn singular_values(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let sv = Matrix2::new(m[0][0], m[0][1], m[1][0], m[1][1]).singular_values();
    (sv[0].max(sv[1]), sv[0].min(sv[1]))
}

/// `(σ_max·σ_min, |det|)`.
pub fn norm_det_identity_check(m: &[[f64; 2]; 2]) -> (f64, f64) {
    let (a, b) = singular_values(m);
    (a * b, (m[0][0] * m[1][1] - m[0][1] * m[1][0]).abs())
}

fn sub_scaled(a: &[f64], b: &[f64], s: f64) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| (x - y) * s).collect()
}

/// Central difference of the map's ambient coordinates along `aX + bY`.
pub(crate) fn central(spec: &MapSpec, p: &HeisPoint, a: f64, b: f64, s: f64) -> Vec<f64> {
    let fp = spec.eval(&flow(p, a, b, s)).coords();
    let fm = spec.eval(&flow(p, a, b, -s)).coords();
    sub_scaled(&fp, &fm, 0.5 / s)
}

/// Central difference at steps `s` and `s/2`, combined to cancel the `s²` term.
pub(crate) fn richardson(spec: &MapSpec, p: &HeisPoint, a: f64, b: f64, s: f64) -> Vec<f64> {
    let d1 = central(spec, p, a, b, s);
    let d2 = central(spec, p, a, b, 0.5 * s);
    d1.iter().zip(&d2).map(|(x, y)| (4.0 * y - x) / 3.0).collect()
}

/// `(Xf, Yf, frame at f(p))` in ambient coordinates.
pub(crate) fn frame_derivatives(
    spec: &MapSpec,
    p: &HeisPoint,
    step: f64,
    extrapolate: bool,
) -> Result<(Vec<f64>, Vec<f64>, TargetFrame, TargetPoint)> {
    if !(step > 0.0) {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")));
    }
    spec.guard(p)?;
    let d = if extrapolate { richardson } else { central };
    let xf = d(spec, p, 1.0, 0.0, step);
    let yf = d(spec, p, 0.0, 1.0, step);
    let image = spec.eval(p);
    Ok((xf, yf, target_frame(spec, &image), image))
}

fn assemble(xf: &[f64], yf: &[f64], frame: &TargetFrame, p: &HeisPoint) -> HorizontalDifferential {
    let cx = frame.coefficients(xf);
    let cy = frame.coefficients(yf);
    HorizontalDifferential { m: [[cx[0], cy[0]], [cx[1], cy[1]]], source_base: *p, target_frame_id: frame.id }
}

pub fn horizontal_differential(spec: &MapSpec, p: &HeisPoint, step: f64) -> Result<HorizontalDifferential> {
    let (xf, yf, frame, _) = frame_derivatives(spec, p, step, true)?;
    Ok(assemble(&xf, &yf, &frame, p))
}

/// Plain central differences, without extrapolation; for convergence studies.
pub fn horizontal_differential_plain(spec: &MapSpec, p: &HeisPoint, step: f64) -> Result<HorizontalDifferential> {
    let (xf, yf, frame, _) = frame_derivatives(spec, p, step, false)?;
    Ok(assemble(&xf, &yf, &frame, p))
}

pub fn distortion(spec: &MapSpec, p: &HeisPoint) -> Result<f64> {
    Ok(horizontal_differential(spec, p, DEFAULT_STEP)?.distortion())
}
