use super::{MapSpec, TargetPoint};
use crate::heis::HeisPoint;
use nalgebra::Matrix3;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FrameId {
    /// `e₁ = (w̄₂, −w̄₁)`, `e₂ = i·e₁` in `C² = R⁴`.
    SphereW,
    /// Left-invariant `X, Y` at the image point.
    HeisXY,
    /// Image of `X, Y` under the differential of the unknot map.
    UnknotInduced,
}

/// Horizontal frame at an image point, in ambient coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetFrame {
    pub id: FrameId,
    pub e: [Vec<f64>; 2],
    /// Covectors reading off the `e₁, e₂` coefficients.
    pub dual: [Vec<f64>; 2],
    /// Contact covector; annihilates `e₁, e₂`.
    pub contact: Vec<f64>,
}

impl TargetFrame {
    pub fn coefficients(&self, v: &[f64]) -> [f64; 2] {
        [dot(&self.dual[0], v), dot(&self.dual[1], v)]
    }

    pub fn contact_value(&self, v: &[f64]) -> f64 {
        dot(&self.contact, v)
    }

    /// `(e₁·g, e₂·g)` for an ambient gradient `g`.
    pub fn horizontal_gradient(&self, g: &[f64]) -> [f64; 2] {
        [dot(&self.e[0], g), dot(&self.e[1], g)]
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn target_frame(spec: &MapSpec, image: &TargetPoint) -> TargetFrame {
    match (spec, image) {
        (MapSpec::Compose { outer, .. }, _) => target_frame(outer, image),
        (_, TargetPoint::Sphere(w)) => {
            let (a, b) = (w.w2.conj(), -w.w1.conj());
            let e1 = vec![a.re, a.im, b.re, b.im];
            let e2 = vec![-a.im, a.re, -b.im, b.re];
            let contact = vec![-2.0 * w.w1.im, 2.0 * w.w1.re, -2.0 * w.w2.im, 2.0 * w.w2.re];
            TargetFrame { id: FrameId::SphereW, dual: [e1.clone(), e2.clone()], e: [e1, e2], contact }
        }
        (MapSpec::UnknotH, TargetPoint::Heis(q)) => unknot_frame(q),
        (_, TargetPoint::Heis(q)) => TargetFrame {
            id: FrameId::HeisXY,
            e: [vec![1.0, 0.0, 2.0 * q.y], vec![0.0, 1.0, -2.0 * q.x]],
            dual: [vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0]],
            contact: vec![-2.0 * q.y, 2.0 * q.x, 1.0],
        },
    }
}

/// A preimage of `q` under the unknot map; defined up to integer `t`-shifts,
/// which do not change the differential.
pub(crate) fn unknot_preimage(q: &HeisPoint) -> HeisPoint {
    HeisPoint::new(q.x.hypot(q.y).ln(), q.t, q.y.atan2(q.x) / (2.0 * PI))
}

pub(crate) fn unknot_jacobian(p: &HeisPoint) -> Matrix3<f64> {
    let (s, c) = (2.0 * PI * p.t).sin_cos();
    let e = p.x.exp();
    Matrix3::new(
        e * c, 0.0, -2.0 * PI * e * s, //
        e * s, 0.0, 2.0 * PI * e * c, //
        0.0, 1.0, 0.0,
    )
}

fn unknot_frame(q: &HeisPoint) -> TargetFrame {
    let p = unknot_preimage(q);
    let j = unknot_jacobian(&p);
    let ji = j.try_inverse().expect("unknot Jacobian has determinant 2π e^{2x}");
    let col = |v: nalgebra::Vector3<f64>| vec![v[0], v[1], v[2]];
    let e1 = col(j * nalgebra::Vector3::new(1.0, 0.0, 2.0 * p.y));
    let e2 = col(j * nalgebra::Vector3::new(0.0, 1.0, -2.0 * p.x));
    let row = |i: usize| vec![ji[(i, 0)], ji[(i, 1)], ji[(i, 2)]];
    let alpha = nalgebra::RowVector3::new(-2.0 * p.y, 2.0 * p.x, 1.0) * ji;
    TargetFrame {
        id: FrameId::UnknotInduced,
        e: [e1, e2],
        dual: [row(0), row(1)],
        contact: vec![alpha[0], alpha[1], alpha[2]],
    }
}
