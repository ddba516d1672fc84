use super::{max_of, stream};
use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::subelliptic::{green_function, weak_identity_residual};
use heislab_core::WeightedGraph;
use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    graphs: usize,
    /// Vertex counts are drawn from `[n_min, n_max)`.
    n_min: usize,
    n_max: usize,
    edge_probability: f64,
    /// Exponents cycled over the graphs.
    exponents: Vec<f64>,
    tol: f64,
    residual_max: f64,
    tent_length: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { graphs: 50, n_min: 8, n_max: 40, edge_probability: 0.15, exponents: vec![1.5, 2.0, 3.0, 4.0], tol: 1e-9, residual_max: 1e-8, tent_length: 8 }
    }
}

/// Max residual over the indicator basis of free vertices and the smallest value on the pole's free component.
fn check(g: &WeightedGraph, values: &[f64], pole: usize, p: f64) -> (f64, f64) {
    let n = g.len();
    let worst = max_of((0..n).filter(|&v| !g.boundary[v]).map(|v| {
        let mut phi = vec![0.0; n];
        phi[v] = 1.0;
        weak_identity_residual(g, values, pole, p, &phi).abs()
    }));
    let mut seen = vec![false; n];
    let mut stack = vec![pole];
    seen[pole] = true;
    let mut min = f64::INFINITY;
    while let Some(v) = stack.pop() {
        min = min.min(values[v]);
        for &(w, _) in g.neighbors(v) {
            let w = w as usize;
            if !seen[w] && !g.boundary[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    (worst, min)
}

pub fn run(seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    if p.n_min < 2 || p.n_max <= p.n_min || p.exponents.is_empty() {
        return Err(CliError::Usage("need 2 ≤ n_min < n_max and at least one exponent".into()));
    }
    let mut rng = stream(seed, 6);
    let mut table = Table::new(
        "green",
        "Green functions with pole 0 on random connected graphs",
        vec![
            col("graph", "graph index"),
            col("n", "vertices"),
            col("edges", "edges"),
            col("boundary", "Dirichlet vertices"),
            col("p", "exponent"),
            col("iterations", "solver iterations"),
            col("max_residual", "max weak-identity residual over the indicator basis"),
            col("min_value", "smallest G on the pole's free component"),
            col("pole_value", "G(pole)"),
        ],
    );
    let (mut worst, mut min_value) = (0.0f64, f64::INFINITY);
    for i in 0..p.graphs {
        let n = rng.gen_range(p.n_min..p.n_max);
        let g = WeightedGraph::random_connected(n, p.edge_probability, rng.gen());
        let bdry: Vec<usize> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(1..n)).collect();
        let g = g.with_boundary(&bdry);
        let e = p.exponents[i % p.exponents.len()];
        let res = green_function(&g, 0, e, p.tol)?;
        let (r, m) = check(&g, &res.values, 0, e);
        worst = worst.max(r);
        min_value = min_value.min(m);
        let nb = g.boundary.iter().filter(|&&b| b).count();
        table.push(vec![i.to_string(), n.to_string(), g.edges.len().to_string(), nb.to_string(), num(e), res.iterations.to_string(), num(r), num(m), num(res.values[0])]);
    }
    let mut assertions = Vec::new();
    if p.graphs > 0 {
        assertions.push(Assertion::below("weak identity residual", worst, p.residual_max));
        assertions.push(Assertion::above("Green function minimum on the pole's component", min_value, 0.0));
    }
    // Unit path grounded at both ends: at p = 2 the Green function is the tent with peak y(L−y)/L.
    let l = p.tent_length.max(2);
    let y = l / 2;
    let path = WeightedGraph::path(l).with_boundary(&[0, l]);
    let tent = green_function(&path, y, 2.0, 1e-12)?;
    let tent_err = max_of((0..=l).map(|v| {
        let exact = if v <= y { v as f64 * (l - y) as f64 } else { (l - v) as f64 * y as f64 } / l as f64;
        (tent.values[v] - exact).abs()
    }));
    assertions.push(Assertion::below("path tent at p = 2", tent_err, 1e-9));
    Ok(Outcome {
        results: json!({ "graphs": p.graphs, "max_residual": worst, "min_value": min_value, "tent_max_error": tent_err }),
        assertions,
        tables: vec![table],
    })
}
