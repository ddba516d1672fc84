use super::coarea::library_function;
use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::heis::HeisPoint;
use heislab_core::scalar::Polynomial;
use heislab_core::subelliptic::{poincare_ratio, poincare_sweep, PoincareConfig};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    center: [f64; 3],
    eps: f64,
    c: f64,
    /// Mesh sizes `1/n`; the first is coarse, the last fine.
    resolutions: Vec<u32>,
    /// Function whose ratio must agree between coarsest and finest mesh.
    stable_function: String,
    stability_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { center: [0.0; 3], eps: 1.0, c: 2.0, resolutions: vec![8, 16], stable_function: "x".into(), stability_tol: 0.1 }
    }
}

pub fn run(_seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    if p.resolutions.is_empty() || p.resolutions.contains(&0) {
        return Err(CliError::Usage("resolutions must be positive".into()));
    }
    let center = HeisPoint::new(p.center[0], p.center[1], p.center[2]);
    let cfgs: Vec<PoincareConfig> = p.resolutions.iter().map(|&n| PoincareConfig { h: 1.0 / n as f64, c: p.c }).collect();
    let mut table = Table::new(
        "poincare",
        "(⨍_B |u − u_B|^(4/3))^(3/4) / (ε ⨍_cB |∇_H u|) on gauge balls",
        vec![
            col("function", "test function"),
            col("h", "mesh size"),
            col("lhs", "(⨍_B |u − u_B|^(4/3))^(3/4)"),
            col("rhs", "⨍_cB |∇_H u|"),
            col("ratio", "lhs / (ε·rhs)"),
            col("ball_nodes", "nodes in B"),
            col("big_nodes", "nodes in cB"),
            col("artifact", "nonconstant u with vanishing discrete gradient"),
        ],
    );
    let library = Polynomial::library(3);
    let mut constants = Vec::new();
    let mut artifacts = 0usize;
    for cfg in &cfgs {
        let (rows, max) = poincare_sweep(&center, p.eps, &library, cfg)?;
        for (name, r) in &rows {
            artifacts += usize::from(r.artifact);
            table.push(vec![name.clone(), num(cfg.h), num(r.lhs), num(r.rhs), num(r.ratio), r.ball_nodes.to_string(), r.big_nodes.to_string(), r.artifact.to_string()]);
        }
        constants.push(max);
    }
    let flat = poincare_ratio(&center, p.eps, &Polynomial::constant(3, 1.0), &cfgs[0])?;
    let u = library_function(&p.stable_function)?;
    let coarse = poincare_ratio(&center, p.eps, &u, &cfgs[0])?.ratio;
    let fine = poincare_ratio(&center, p.eps, &u, &cfgs[cfgs.len() - 1])?.ratio;
    let drift = (coarse - fine).abs() / fine;
    let worst = constants.iter().copied().fold(0.0, f64::max);
    let assertions = vec![
        Assertion::within("constant function ratio", flat.ratio, 0.0, 0.0),
        Assertion::within("discretisation artifacts", artifacts as f64, 0.0, 0.0),
        Assertion::holds("empirical constant finite and positive", worst.is_finite() && worst > 0.0),
        Assertion::below(format!("{} ratio drift between meshes", p.stable_function), drift, p.stability_tol),
    ];
    Ok(Outcome {
        results: json!({ "empirical_constant": constants, "stable_function": { "coarse": coarse, "fine": fine, "rel_drift": drift } }),
        assertions,
        tables: vec![table],
    })
}
