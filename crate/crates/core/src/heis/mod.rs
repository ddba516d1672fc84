//! The first Heisenberg group in exponential coordinates.
//!
//! Group law `(x,y,t)·(x',y',t') = (x+x', y+y', t+t' − 2xy' + 2yx')`,
//! left-invariant frame `X = ∂x + 2y∂t`, `Y = ∂y − 2x∂t`, contact form
//! `α = dt + 2(x dy − y dx)`.

mod cc;
mod gauge;
mod measure;

pub use cc::{cc_dist, cc_dist_report, CcReport};
pub use gauge::{gauge_dist, Gauge};
pub use measure::{ball_volume_mc, ball_volume_mc_gauge, MonteCarloVolume};
pub(crate) use measure::{mc_box_count, volume_from_hits};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::ops::Mul;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HeisPoint {
    pub x: f64,
    pub y: f64,
    pub t: f64,
}

impl HeisPoint {
    pub const IDENTITY: HeisPoint = HeisPoint { x: 0.0, y: 0.0, t: 0.0 };

    pub const fn new(x: f64, y: f64, t: f64) -> Self {
        HeisPoint { x, y, t }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.t.is_finite()
    }

    pub fn inv(&self) -> Self {
        HeisPoint::new(-self.x, -self.y, -self.t)
    }

    /// Unchecked product; see [`group_mul`] for the validating version.
    pub fn mul(&self, q: &HeisPoint) -> Self {
        HeisPoint::new(
            self.x + q.x,
            self.y + q.y,
            self.t + q.t - 2.0 * self.x * q.y + 2.0 * self.y * q.x,
        )
    }

    pub fn dilate(&self, r: f64) -> Self {
        HeisPoint::new(r * self.x, r * self.y, r * r * self.t)
    }

    pub fn to_array(&self) -> [f64; 3] {
        [self.x, self.y, self.t]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        HeisPoint::new(a[0], a[1], a[2])
    }

    /// Max-norm distance of coordinates (not a group metric).
    pub fn coord_dist(&self, q: &HeisPoint) -> f64 {
        (self.x - q.x).abs().max((self.y - q.y).abs()).max((self.t - q.t).abs())
    }
}

impl Mul for HeisPoint {
    type Output = HeisPoint;
    fn mul(self, rhs: HeisPoint) -> HeisPoint {
        HeisPoint::mul(&self, &rhs)
    }
}

fn check(p: &HeisPoint, what: &'static str) -> Result<()> {
    if p.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

pub fn group_mul(p: &HeisPoint, q: &HeisPoint) -> Result<HeisPoint> {
    check(p, "left factor")?;
    check(q, "right factor")?;
    Ok(p.mul(q))
}

pub fn group_inv(p: &HeisPoint) -> HeisPoint {
    p.inv()
}

pub fn dilate(r: f64, p: &HeisPoint) -> Result<HeisPoint> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {r}")));
    }
    Ok(p.dilate(r))
}

/// Vector in the coordinate frame `∂x, ∂y, ∂t` at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    pub base: HeisPoint,
    pub dx: f64,
    pub dy: f64,
    pub dt: f64,
}

impl TangentVector {
    pub fn new(base: HeisPoint, dx: f64, dy: f64, dt: f64) -> Self {
        TangentVector { base, dx, dy, dt }
    }
}

/// Vector `aX + bY` at `base`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalVector {
    pub base: HeisPoint,
    pub a: f64,
    pub b: f64,
}

impl HorizontalVector {
    pub fn new(base: HeisPoint, a: f64, b: f64) -> Self {
        HorizontalVector { base, a, b }
    }

    pub fn to_tangent(&self) -> TangentVector {
        let p = self.base;
        TangentVector::new(p, self.a, self.b, 2.0 * p.y * self.a - 2.0 * p.x * self.b)
    }
}

pub fn frame_x(p: &HeisPoint) -> TangentVector {
    TangentVector::new(*p, 1.0, 0.0, 2.0 * p.y)
}

pub fn frame_y(p: &HeisPoint) -> TangentVector {
    TangentVector::new(*p, 0.0, 1.0, -2.0 * p.x)
}

/// `α(v) = dt + 2x dy − 2y dx` at `p`.
pub fn contact_form(p: &HeisPoint, v: &TangentVector) -> Result<f64> {
    if v.base != *p {
        return Err(Error::BaseMismatch);
    }
    Ok(contact_value(p, v.dx, v.dy, v.dt))
}

pub(crate) fn contact_value(p: &HeisPoint, dx: f64, dy: f64, dt: f64) -> f64 {
    dt + 2.0 * p.x * dy - 2.0 * p.y * dx
}

/// Flow along the left-invariant field `aX + bY` for time `s`.
pub fn exp_flow(p: &HeisPoint, h: &HorizontalVector, s: f64) -> Result<HeisPoint> {
    if h.base != *p {
        return Err(Error::BaseMismatch);
    }
    Ok(flow(p, h.a, h.b, s))
}

pub(crate) fn flow(p: &HeisPoint, a: f64, b: f64, s: f64) -> HeisPoint {
    p.mul(&HeisPoint::new(s * a, s * b, 0.0))
}

/// Differential of left translation by `q`, applied to `v`.
pub fn left_translate_vector(q: &HeisPoint, v: &TangentVector) -> TangentVector {
    let p = v.base;
    TangentVector::new(
        q.mul(&p),
        v.dx,
        v.dy,
        v.dt - 2.0 * q.x * v.dy + 2.0 * q.y * v.dx,
    )
}
