//! Operators of type 4 on horizontal bundles and their pullbacks
//! `f#A_x(h) = det(M)² M⁻¹ A_{f(x)}(M⁻ᵀ h)`, `M = D_H f(x)`.

use super::differential::{horizontal_differential, DEFAULT_STEP};
use super::{MapSpec, TargetPoint};
use crate::error::{Error, Result};
use crate::heis::HeisPoint;
use nalgebra::{Matrix2, Vector2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorType4 {
    /// `h ↦ |h|²h`.
    Standard,
    Pullback { spec: MapSpec, inner: Box<OperatorType4> },
}

impl OperatorType4 {
    pub fn pullback(spec: MapSpec, inner: OperatorType4) -> Self {
        OperatorType4::Pullback { spec, inner: Box::new(inner) }
    }

    pub fn apply(&self, base: &TargetPoint, h: [f64; 2]) -> Result<[f64; 2]> {
        match self {
            OperatorType4::Standard => Ok(standard(h)),
            OperatorType4::Pullback { spec, inner } => {
                let x = base.as_heis().ok_or_else(|| {
                    Error::InvalidArgument("pullback operators live on the Heisenberg group".into())
                })?;
                pullback_operator(spec, inner, &x)?.apply(h)
            }
        }
    }

    /// Structure constants at `base`: `(α, β)`.
    pub fn constants(&self, base: &TargetPoint) -> Result<(f64, f64)> {
        match self {
            OperatorType4::Standard => Ok((1.0, 1.0)),
            OperatorType4::Pullback { spec, inner } => {
                let x = base.as_heis().ok_or_else(|| {
                    Error::InvalidArgument("pullback operators live on the Heisenberg group".into())
                })?;
                let l = pullback_operator(spec, inner, &x)?;
                Ok((l.alpha, l.beta))
            }
        }
    }
}

fn standard(h: [f64; 2]) -> [f64; 2] {
    let n2 = h[0] * h[0] + h[1] * h[1];
    [n2 * h[0], n2 * h[1]]
}

/// Pullback frozen at one base point.
#[derive(Debug, Clone)]
pub struct LocalOperator {
    pub base: HeisPoint,
    /// `None` where the differential vanishes; the standard operator is used there.
    pub m: Option<Matrix2<f64>>,
    pub image: TargetPoint,
    pub inner: OperatorType4,
    pub alpha: f64,
    pub beta: f64,
}

impl LocalOperator {
    pub fn apply(&self, h: [f64; 2]) -> Result<[f64; 2]> {
        let Some(m) = self.m else { return Ok(standard(h)) };
        let det = m.determinant();
        let minv = m.try_inverse().ok_or(Error::SingularDifferential(det))?;
        let k = minv.transpose() * Vector2::new(h[0], h[1]);
        let a = self.inner.apply(&self.image, [k[0], k[1]])?;
        let out = minv * Vector2::new(a[0], a[1]) * (det * det);
        Ok([out[0], out[1]])
    }
}

pub fn pullback_operator(spec: &MapSpec, a: &OperatorType4, p: &HeisPoint) -> Result<LocalOperator> {
    let d = horizontal_differential(spec, p, DEFAULT_STEP)?;
    let m = d.matrix();
    let det = m.determinant();
    let image = spec.eval(p);
    let (ia, ib) = a.constants(&image)?;
    if det == 0.0 {
        return Ok(LocalOperator { base: *p, m: None, image, inner: OperatorType4::Standard, alpha: 1.0, beta: 1.0 });
    }
    if det.abs() <= 1e-10 * m.norm_squared() {
        return Err(Error::SingularDifferential(det));
    }
    let k = d.distortion();
    Ok(LocalOperator { base: *p, m: Some(m), image, inner: a.clone(), alpha: ia / (k * k), beta: ib * k * k })
}

/// Relative gap between `h#(f#A)` and `(f∘h)#A` at `(p, v)`.
pub fn pullback_chain_check(
    h_spec: &MapSpec,
    f_spec: &MapSpec,
    a: &OperatorType4,
    p: &HeisPoint,
    v: [f64; 2],
) -> Result<f64> {
    let lhs = pullback_operator(h_spec, &OperatorType4::pullback(f_spec.clone(), a.clone()), p)?.apply(v)?;
    let comp = MapSpec::compose(f_spec.clone(), h_spec.clone())?;
    let rhs = pullback_operator(&comp, a, p)?.apply(v)?;
    let num = (lhs[0] - rhs[0]).hypot(lhs[1] - rhs[1]);
    let den = rhs[0].hypot(rhs[1]);
    Ok(if den == 0.0 { num } else { num / den })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxiomReport {
    /// `min ⟨Ah,h⟩ / (α|h|⁴)`; at least 1 when coercivity holds.
    pub coercivity: f64,
    /// `max |Ah| / (β|h|³)`; at most 1 when the growth bound holds.
    pub growth: f64,
    /// `min ⟨Ah₁−Ah₂, h₁−h₂⟩ / |h₁−h₂|⁴`; positive for strict monotonicity.
    pub monotonicity: f64,
    /// `max |A(λh) − |λ|²λA(h)| / |λ|³|A(h)|`.
    pub homogeneity_err: f64,
}

impl AxiomReport {
    pub fn holds(&self, tol: f64) -> bool {
        self.coercivity >= 1.0 - tol && self.growth <= 1.0 + tol && self.monotonicity > 0.0 && self.homogeneity_err <= tol
    }
}

pub fn check_type4_axioms(op: &LocalOperator, n: usize, seed: u64) -> Result<AxiomReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rep = AxiomReport { coercivity: f64::INFINITY, growth: 0.0, monotonicity: f64::INFINITY, homogeneity_err: 0.0 };
    let draw = |rng: &mut ChaCha8Rng| -> [f64; 2] {
        let s = 10f64.powf(rng.gen_range(-1.0..1.0));
        [s * rng.gen_range(-1.0..1.0), s * rng.gen_range(-1.0..1.0)]
    };
    for _ in 0..n {
        let h = draw(&mut rng);
        let g = draw(&mut rng);
        let ah = op.apply(h)?;
        let ag = op.apply(g)?;
        let n2 = h[0] * h[0] + h[1] * h[1];
        if n2 > 0.0 {
            rep.coercivity = rep.coercivity.min((ah[0] * h[0] + ah[1] * h[1]) / (op.alpha * n2 * n2));
            rep.growth = rep.growth.max(ah[0].hypot(ah[1]) / (op.beta * n2.powf(1.5)));
        }
        let d = [h[0] - g[0], h[1] - g[1]];
        let d2 = d[0] * d[0] + d[1] * d[1];
        if d2 > 0.0 {
            let q = ((ah[0] - ag[0]) * d[0] + (ah[1] - ag[1]) * d[1]) / (d2 * d2);
            rep.monotonicity = rep.monotonicity.min(q);
        }
        let lam: f64 = rng.gen_range(-3.0..3.0);
        let al = op.apply([lam * h[0], lam * h[1]])?;
        let c = lam * lam * lam;
        let scale = (c.abs() * ah[0].hypot(ah[1])).max(f64::MIN_POSITIVE);
        rep.homogeneity_err = rep.homogeneity_err.max((al[0] - c * ah[0]).hypot(al[1] - c * ah[1]) / scale);
    }
    Ok(rep)
}
