//! Explicit maps out of the Heisenberg group, their horizontal differentials,
//! and the type-4 operator calculus transported through them.

mod audit;
mod checks;
mod differential;
mod frame;
mod operator;

pub use audit::{audit_map, sample_points, AuditRecord};
pub use checks::{
    appendix_chain_rule_check, jacobian_identity_check, pushforward_formula_check,
    unknot_periodicity_check, unknot_translation_residual, weak_contact_residual, ChainRuleReport,
    JacobianReport, PushforwardReport,
};
pub use differential::{
    distortion, horizontal_differential, horizontal_differential_plain, norm_det_identity_check,
    singular_values, HorizontalDifferential, DEFAULT_STEP,
};
pub use frame::{target_frame, FrameId, TargetFrame};
pub use operator::{
    check_type4_axioms, pullback_chain_check, pullback_operator, AxiomReport, LocalOperator,
    OperatorType4,
};

use crate::error::{Error, Result};
use crate::heis::{gauge_dist, Gauge, HeisPoint};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// Distance to the singular locus below which differentials are refused.
pub const SINGULAR_GUARD: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpherePoint {
    pub w1: Complex64,
    pub w2: Complex64,
}

impl SpherePoint {
    pub fn norm_sqr(&self) -> f64 {
        self.w1.norm_sqr() + self.w2.norm_sqr()
    }

    /// `(Re w1, Im w1, Re w2, Im w2)`.
    pub fn to_real(&self) -> [f64; 4] {
        [self.w1.re, self.w1.im, self.w2.re, self.w2.im]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TargetPoint {
    Sphere(SpherePoint),
    Heis(HeisPoint),
}

impl TargetPoint {
    pub fn coords(&self) -> Vec<f64> {
        match self {
            TargetPoint::Sphere(w) => w.to_real().to_vec(),
            TargetPoint::Heis(p) => p.to_array().to_vec(),
        }
    }

    pub fn as_heis(&self) -> Option<HeisPoint> {
        match self {
            TargetPoint::Heis(p) => Some(*p),
            TargetPoint::Sphere(_) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetKind {
    Sphere,
    Heis,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum MapSpec {
    StereoIota,
    /// Angle multiplication by `a` on both factors of S³, after `ι`.
    MultiTwist { a: u32 },
    UnknotH,
    /// Left translation by `(0, b, c)`.
    HopfAction { b: i64, c: i64 },
    LeftTranslation { q: HeisPoint },
    Dilation { r: f64 },
    /// `outer ∘ inner`; `inner` must land in the Heisenberg group.
    Compose { outer: Box<MapSpec>, inner: Box<MapSpec> },
}

impl MapSpec {
    pub fn multi_twist(a: u32) -> Result<Self> {
        if a < 2 {
            return Err(Error::InvalidArgument(format!("MultiTwist needs a >= 2, got {a}")));
        }
        Ok(MapSpec::MultiTwist { a })
    }

    pub fn dilation(r: f64) -> Result<Self> {
        if !(r > 0.0) || !r.is_finite() {
            return Err(Error::InvalidArgument(format!("dilation factor must be positive, got {r}")));
        }
        Ok(MapSpec::Dilation { r })
    }

    pub fn compose(outer: MapSpec, inner: MapSpec) -> Result<Self> {
        if inner.target_kind() != TargetKind::Heis {
            return Err(Error::InvalidArgument(format!("{inner} does not land in the Heisenberg group")));
        }
        Ok(MapSpec::Compose { outer: Box::new(outer), inner: Box::new(inner) })
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            MapSpec::MultiTwist { a } if *a < 2 => {
                Err(Error::InvalidArgument(format!("MultiTwist needs a >= 2, got {a}")))
            }
            MapSpec::Dilation { r } if !(*r > 0.0) => {
                Err(Error::InvalidArgument(format!("dilation factor must be positive, got {r}")))
            }
            MapSpec::Compose { outer, inner } => {
                if inner.target_kind() != TargetKind::Heis {
                    return Err(Error::InvalidArgument(format!("{inner} does not land in the Heisenberg group")));
                }
                outer.validate()?;
                inner.validate()
            }
            _ => Ok(()),
        }
    }

    pub fn target_kind(&self) -> TargetKind {
        match self {
            MapSpec::StereoIota | MapSpec::MultiTwist { .. } => TargetKind::Sphere,
            MapSpec::Compose { outer, .. } => outer.target_kind(),
            _ => TargetKind::Heis,
        }
    }

    pub fn eval(&self, p: &HeisPoint) -> TargetPoint {
        match self {
            MapSpec::StereoIota => TargetPoint::Sphere(eval_iota(p)),
            MapSpec::MultiTwist { a } => {
                let w = eval_iota(p);
                TargetPoint::Sphere(SpherePoint { w1: twist(w.w1, *a), w2: twist(w.w2, *a) })
            }
            MapSpec::UnknotH => {
                let (s, c) = (2.0 * std::f64::consts::PI * p.t).sin_cos();
                let e = p.x.exp();
                TargetPoint::Heis(HeisPoint::new(c * e, s * e, p.y))
            }
            MapSpec::HopfAction { b, c } => {
                TargetPoint::Heis(HeisPoint::new(0.0, *b as f64, *c as f64).mul(p))
            }
            MapSpec::LeftTranslation { q } => TargetPoint::Heis(q.mul(p)),
            MapSpec::Dilation { r } => TargetPoint::Heis(p.dilate(*r)),
            MapSpec::Compose { outer, inner } => {
                let mid = inner.eval(p).as_heis().expect("validated composition");
                outer.eval(&mid)
            }
        }
    }

    /// Inverse for the affine Heisenberg self-maps.
    pub fn inverse(&self) -> Option<MapSpec> {
        match self {
            MapSpec::Dilation { r } => Some(MapSpec::Dilation { r: 1.0 / r }),
            MapSpec::LeftTranslation { q } => Some(MapSpec::LeftTranslation { q: q.inv() }),
            MapSpec::HopfAction { b, c } => Some(MapSpec::HopfAction { b: -b, c: -c }),
            MapSpec::Compose { outer, inner } => {
                Some(MapSpec::Compose { outer: Box::new(inner.inverse()?), inner: Box::new(outer.inverse()?) })
            }
            _ => None,
        }
    }

    /// Whether the map is affine in exponential coordinates.
    pub fn is_affine(&self) -> bool {
        match self {
            MapSpec::Dilation { .. } | MapSpec::LeftTranslation { .. } | MapSpec::HopfAction { .. } => true,
            MapSpec::Compose { outer, inner } => outer.is_affine() && inner.is_affine(),
            _ => false,
        }
    }

    /// Korányi distance from `p` to the singular locus, if the map has one.
    pub fn singular_distance(&self, p: &HeisPoint) -> Option<f64> {
        match self {
            MapSpec::MultiTwist { .. } => Some(twist_singular_distance(p)),
            MapSpec::Compose { outer, inner } => {
                let a = inner.singular_distance(p);
                let b = inner.eval(p).as_heis().and_then(|m| outer.singular_distance(&m));
                match (a, b) {
                    (Some(a), Some(b)) => Some(a.min(b)),
                    (a, b) => a.or(b),
                }
            }
            _ => None,
        }
    }

    pub(crate) fn guard(&self, p: &HeisPoint) -> Result<()> {
        if let Some(d) = self.singular_distance(p) {
            if d < SINGULAR_GUARD {
                return Err(Error::NearSingularLocus { spec: self.to_string(), distance: d });
            }
        }
        Ok(())
    }
}

fn twist(w: Complex64, a: u32) -> Complex64 {
    let r = w.norm();
    if r == 0.0 {
        return w;
    }
    let u = w / r;
    u.powu(a) * r
}

/// Distance to the t-axis and to the circle `{x²+y²=1, t=0}`, the preimages of `w1=0` and `w2=0`.
fn twist_singular_distance(p: &HeisPoint) -> f64 {
    let axis = p.x.hypot(p.y);
    let circle = |phi: f64| gauge_dist(Gauge::Koranyi, p, &HeisPoint::new(phi.cos(), phi.sin(), 0.0));
    let n = 256;
    let step = 2.0 * std::f64::consts::PI / n as f64;
    let mut best = (0..n).map(|k| k as f64 * step).fold((f64::INFINITY, 0.0), |acc, phi| {
        let d = circle(phi);
        if d < acc.0 {
            (d, phi)
        } else {
            acc
        }
    });
    // Golden-section refinement around the coarse minimum.
    let (mut a, mut b) = (best.1 - step, best.1 + step);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - g * (b - a);
        let d = a + g * (b - a);
        if circle(c) < circle(d) {
            b = d;
        } else {
            a = c;
        }
    }
    best.0 = best.0.min(circle(0.5 * (a + b)));
    axis.min(best.0)
}

/// Inverse stereographic projection onto `S³ ∖ {(0,−1)}`.
pub fn eval_iota(p: &HeisPoint) -> SpherePoint {
    let r2 = p.x * p.x + p.y * p.y;
    let den = Complex64::new(1.0 + r2, -p.t);
    SpherePoint {
        w1: Complex64::new(2.0 * p.y, -2.0 * p.x) / den,
        w2: Complex64::new(1.0 - r2, p.t) / den,
    }
}

/// Imaginary part of `w̄₁dw₁ − w₁dw̄₁ + w̄₂dw₂ − w₂dw̄₂` on `v`, i.e. `2 Im(Σ w̄ⱼ vⱼ)`.
pub fn sphere_contact_form(w: &SpherePoint, v: &[Complex64; 2]) -> Result<f64> {
    let inner = w.w1.conj() * v[0] + w.w2.conj() * v[1];
    let scale = 1.0 + v[0].norm() + v[1].norm();
    if inner.re.abs() > 1e-8 * scale {
        return Err(Error::NotTangent(inner.re));
    }
    Ok(2.0 * inner.im)
}

impl fmt::Display for MapSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MapSpec::StereoIota => write!(f, "StereoIota"),
            MapSpec::MultiTwist { a } => write!(f, "MultiTwist({a})"),
            MapSpec::UnknotH => write!(f, "UnknotH"),
            MapSpec::HopfAction { b, c } => write!(f, "HopfAction({b},{c})"),
            MapSpec::LeftTranslation { q } => write!(f, "LeftTranslation({},{},{})", q.x, q.y, q.t),
            MapSpec::Dilation { r } => write!(f, "Dilation({r})"),
            MapSpec::Compose { outer, inner } => write!(f, "Compose({outer};{inner})"),
        }
    }
}

impl FromStr for MapSpec {
    type Err = Error;

    /// Parses the `Display` form, e.g. `MultiTwist(3)` or `Compose(UnknotH;Dilation(2))`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::InvalidArgument(format!("unrecognized map spec `{s}`"));
        let (name, args) = match s.find('(') {
            Some(i) if s.ends_with(')') => (&s[..i], &s[i + 1..s.len() - 1]),
            Some(_) => return Err(bad()),
            None => (s, ""),
        };
        let nums = || -> Result<Vec<f64>> {
            args.split(',').map(|a| a.trim().parse::<f64>().map_err(|_| bad())).collect()
        };
        let spec = match name {
            "StereoIota" if args.is_empty() => MapSpec::StereoIota,
            "UnknotH" if args.is_empty() => MapSpec::UnknotH,
            "MultiTwist" => {
                let a: u32 = args.trim().parse().map_err(|_| bad())?;
                MapSpec::multi_twist(a)?
            }
            "HopfAction" => {
                let v: Vec<i64> =
                    args.split(',').map(|a| a.trim().parse::<i64>().map_err(|_| bad())).collect::<Result<_>>()?;
                match v[..] {
                    [b, c] => MapSpec::HopfAction { b, c },
                    _ => return Err(bad()),
                }
            }
            "LeftTranslation" => match nums()?[..] {
                [x, y, t] => MapSpec::LeftTranslation { q: HeisPoint::new(x, y, t) },
                _ => return Err(bad()),
            },
            "Dilation" => match nums()?[..] {
                [r] => MapSpec::dilation(r)?,
                _ => return Err(bad()),
            },
            "Compose" => {
                // Split at the top-level ';'.
                let mut depth = 0i32;
                let mut cut = None;
                for (i, ch) in args.char_indices() {
                    match ch {
                        '(' => depth += 1,
                        ')' => depth -= 1,
                        ';' if depth == 0 => cut = Some(i),
                        _ => {}
                    }
                }
                let i = cut.ok_or_else(bad)?;
                MapSpec::compose(args[..i].parse()?, args[i + 1..].parse()?)?
            }
            _ => return Err(bad()),
        };
        Ok(spec)
    }
}
