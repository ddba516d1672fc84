use super::HeisPoint;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Gauge {
    /// `((x²+y²)² + t²)^{1/4}`
    Koranyi,
    /// `max(|z|, √|t|)`
    LInfty,
}

impl Gauge {
    pub fn norm(&self, p: &HeisPoint) -> f64 {
        let r2 = p.x * p.x + p.y * p.y;
        match self {
            Gauge::Koranyi => (r2 * r2 + p.t * p.t).sqrt().sqrt(),
            Gauge::LInfty => r2.sqrt().max(p.t.abs().sqrt()),
        }
    }
}

/// `‖p⁻¹·q‖`.
pub fn gauge_dist(g: Gauge, p: &HeisPoint, q: &HeisPoint) -> f64 {
    g.norm(&p.inv().mul(q))
}
