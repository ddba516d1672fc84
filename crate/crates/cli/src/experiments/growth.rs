use crate::report::{col, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::growth::{growth_fit_report, MarkedGroup};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    group: String,
    #[serde(rename = "R", alias = "r_max")]
    r: usize,
    /// Log-log fit window; defaults to `[10, 40]` clipped to `R`.
    fit: Option<[usize; 2]>,
    slope_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { group: "Z2".into(), r: 40, fit: None, slope_tol: 0.2 }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// Closed-form ball sizes where known.
pub fn oracle(group: MarkedGroup, r: usize) -> Option<u128> {
    let r = r as u64;
    match group {
        MarkedGroup::FreeGroup(k) if k >= 2 => {
            let k = k as u128;
            Some(1 + 2 * k * ((2 * k - 1).pow(r as u32) - 1) / (2 * k - 2))
        }
        MarkedGroup::FreeGroup(_) => Some(2 * r as u128 + 1),
        MarkedGroup::ZSquared => Some(2 * (r as u128).pow(2) + 2 * r as u128 + 1),
        MarkedGroup::ZLattice(d) => Some((0..=d as u64).map(|k| (1u128 << k) * binomial(d as u64, k) * binomial(r, k)).sum()),
        MarkedGroup::DiscreteHeisenberg => None,
    }
}

pub fn run(_seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    let group: MarkedGroup = p.group.parse().map_err(|e: heislab_core::Error| CliError::Usage(e.to_string()))?;
    let sizes = group.ball_sizes(p.r)?;
    let mut table = Table::new(
        "ball_sizes",
        "Word-metric ball and sphere sizes",
        vec![
            col("R", "word radius"),
            col("ball_size", "|B(R)| by breadth-first search"),
            col("sphere_size", "|S(R)| = |B(R)| − |B(R−1)|"),
            col("oracle", "closed-form |B(R)| when known, empty otherwise"),
        ],
    );
    let mut mismatches = 0usize;
    for (r, &b) in sizes.iter().enumerate() {
        let sphere = if r == 0 { b } else { b - sizes[r - 1] };
        let o = oracle(group, r);
        if o.is_some_and(|o| o != b as u128) {
            mismatches += 1;
        }
        table.push(vec![r.to_string(), b.to_string(), sphere.to_string(), o.map_or(String::new(), |o| o.to_string())]);
    }
    let mut assertions = Vec::new();
    if oracle(group, 0).is_some() {
        assertions.push(Assertion::within(format!("{group} ball sizes match closed form"), mismatches as f64, 0.0, 0.0));
    }
    let window = p.fit.unwrap_or(match group.growth_degree() {
        Some(_) => [10.min(p.r / 4).max(2), 40.min(p.r)],
        None => [2, p.r],
    });
    let mut fit_json = Value::Null;
    if window[1] > window[0] && window[1] <= p.r {
        let fit = growth_fit_report(&sizes, window[0], window[1])?;
        match group.growth_degree() {
            Some(d) => assertions.push(Assertion::within(
                format!("{group} log-log slope on [{}, {}]", window[0], window[1]),
                fit.slope,
                d as f64,
                p.slope_tol,
            )),
            None => assertions.push(Assertion::holds(format!("{group} flagged exponential"), fit.exponential)),
        }
        fit_json = json!({
            "window": window,
            "slope": fit.slope,
            "band": [fit.band.0, fit.band.1],
            "std_error": fit.std_error,
            "exponential": fit.exponential,
        });
    }
    Ok(Outcome {
        results: json!({ "group": group.to_string(), "R": p.r, "ball_size": sizes.last(), "fit": fit_json }),
        assertions,
        tables: vec![table],
    })
}
