use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::growth::MarkedGroup;
use heislab_core::subelliptic::{capacity_lower_bound_check, graph_capacity, parabolicity_scan, ScanFamily, SolveOptions};
use heislab_core::WeightedGraph;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct Scan {
    family: String,
    p: f64,
    radii: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    scans: Vec<Scan>,
    /// Upper bound on `cap(R_max)/cap(R_min)` when `p` is at least the growth degree.
    parabolic_decay_max: f64,
    /// Lower bound on `cap(R_max)/cap(R_min)` when `p` is below the growth degree.
    hyperbolic_plateau_min: f64,
    path_lengths: Vec<usize>,
    path_exponents: Vec<f64>,
    path_tol: f64,
    /// Segment lengths for the `cap₄³·μ(G)/diam⁴` family; empty skips it.
    lower_bound_lengths: Vec<usize>,
    lower_bound_spread_max: f64,
    tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            scans: vec![
                Scan { family: "H3".into(), p: 4.0, radii: vec![4, 8, 16, 32] },
                Scan { family: "Z5".into(), p: 4.0, radii: vec![8, 16, 32] },
            ],
            parabolic_decay_max: 0.6,
            hyperbolic_plateau_min: 0.5,
            path_lengths: vec![1, 2, 5, 16, 32],
            path_exponents: vec![1.5, 2.0, 3.0, 4.0],
            path_tol: 1e-6,
            lower_bound_lengths: vec![8, 16],
            lower_bound_spread_max: 4.0,
            tol: 1e-12,
        }
    }
}

fn growth_degree(f: ScanFamily) -> u32 {
    match f {
        ScanFamily::ZLattice(d) => d as u32,
        ScanFamily::DiscreteHeisenbergCayley => MarkedGroup::DiscreteHeisenberg.growth_degree().unwrap_or(4),
    }
}

pub fn run(_seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    let opts = SolveOptions { tol: p.tol, ..SolveOptions::default() };
    let mut assertions = Vec::new();

    let mut scans = Table::new(
        "capacity_scan",
        "cap_p({e}, complement of B(R)) on symmetry quotients of Cayley balls",
        vec![
            col("family", "group"),
            col("p", "exponent"),
            col("R", "outer radius"),
            col("capacity", "discrete p-capacity"),
            col("sweeps", "solver iterations"),
            col("residual", "max free-vertex gradient at exit"),
        ],
    );
    let mut scan_json = Vec::new();
    for s in &p.scans {
        let family: ScanFamily = s.family.parse().map_err(|e: heislab_core::Error| CliError::Usage(e.to_string()))?;
        let rows = parabolicity_scan(family, s.p, &s.radii, &opts)?;
        for r in &rows {
            scans.push(vec![r.family.clone(), num(r.p), r.radius.to_string(), num(r.capacity), r.iterations.to_string(), num(r.residual)]);
        }
        let caps: Vec<f64> = rows.iter().map(|r| r.capacity).collect();
        let label = format!("{family} p={}", s.p);
        let rises = caps.windows(2).filter(|w| w[1] > w[0]).count();
        assertions.push(Assertion::within(format!("{label} capacity increases along R"), rises as f64, 0.0, 0.0));
        if let (Some(first), Some(last), true) = (caps.first(), caps.last(), caps.len() >= 2) {
            let ratio = last / first;
            let (lo, hi) = (s.radii[0], s.radii[s.radii.len() - 1]);
            if s.p >= growth_degree(family) as f64 {
                assertions.push(Assertion::below(format!("{label} cap(R={hi})/cap(R={lo})"), ratio, p.parabolic_decay_max));
            } else {
                assertions.push(Assertion::above(format!("{label} cap(R={hi})/cap(R={lo})"), ratio, p.hyperbolic_plateau_min));
            }
        }
        scan_json.push(json!({ "family": family.to_string(), "p": s.p, "radii": s.radii, "capacity": caps }));
    }

    let mut paths = Table::new(
        "path_capacity",
        "Capacity of an endpoint in a path with the other endpoint grounded",
        vec![col("p", "exponent"), col("R", "path length"), col("capacity", "computed capacity"), col("exact", "R^(1−p)"), col("rel_error", "relative error")],
    );
    let mut path_err = 0.0f64;
    for &e in &p.path_exponents {
        for &r in &p.path_lengths {
            if r == 0 {
                return Err(CliError::Usage("path lengths must be positive".into()));
            }
            let g = WeightedGraph::path(r).with_boundary(&[r]);
            let cap = graph_capacity(&g, &[0], e, 1e-14)?;
            let exact = (r as f64).powf(1.0 - e);
            let rel = (cap - exact).abs() / exact;
            path_err = path_err.max(rel);
            paths.push(vec![num(e), r.to_string(), num(cap), num(exact), num(rel)]);
        }
    }
    if !p.path_lengths.is_empty() && !p.path_exponents.is_empty() {
        assertions.push(Assertion::below("path capacity relative error", path_err, p.path_tol));
    }

    let mut tables = vec![scans, paths];
    let mut lb_json = Value::Null;
    if !p.lower_bound_lengths.is_empty() {
        let rows = capacity_lower_bound_check(&p.lower_bound_lengths, &opts)?;
        let mut t = Table::new(
            "lower_bound",
            "cap₄(G,E)³·μ(G)/diam(E)⁴ for segments E in their L-neighbourhoods G",
            vec![
                col("L", "segment length"),
                col("diameter", "diam(E)"),
                col("neighborhood_size", "μ(G)"),
                col("capacity", "cap₄(G,E)"),
                col("ratio", "cap³·μ(G)/diam⁴"),
            ],
        );
        for r in &rows {
            t.push(vec![r.length.to_string(), r.diameter.to_string(), r.neighborhood_size.to_string(), num(r.capacity), num(r.ratio)]);
        }
        let min = rows.iter().map(|r| r.ratio).fold(f64::INFINITY, f64::min);
        let spread = rows.windows(2).map(|w| (w[1].ratio / w[0].ratio).max(w[0].ratio / w[1].ratio)).fold(1.0, f64::max);
        assertions.push(Assertion::above("lower-bound ratio positive", min, 0.0));
        assertions.push(Assertion::below("lower-bound ratio change per doubling", spread, p.lower_bound_spread_max));
        lb_json = json!({ "ratios": rows.iter().map(|r| r.ratio).collect::<Vec<_>>(), "min": min, "max_step_factor": spread });
        tables.push(t);
    }
    Ok(Outcome {
        results: json!({ "scans": scan_json, "path_max_rel_error": path_err, "lower_bound": lb_json }),
        assertions,
        tables,
    })
}
