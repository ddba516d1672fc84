use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::graph::box_index;
use heislab_core::growth::{sub_box_family, transfer_harness, TransferConfig, TransferReport};
use heislab_core::WeightedGraph;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    side: usize,
    sides: Vec<usize>,
    eps: f64,
    c: f64,
    ratio_max: f64,
    /// Second run on a smaller box with one heavy vertex; it must trip the measure condition.
    violator: bool,
    violator_side: usize,
    violator_sides: Vec<usize>,
    heavy_measure: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params {
            side: 12,
            sides: vec![1, 2, 3, 4, 6],
            eps: 0.5,
            c: 1.0,
            ratio_max: 10.0,
            violator: true,
            violator_side: 8,
            violator_sides: vec![1, 2, 3, 4],
            heavy_measure: 100.0,
        }
    }
}

fn conditions_table(name: &str, rep: &TransferReport) -> Table {
    let mut t = Table::new(
        name,
        "Hypothesis checks of the transfer harness",
        vec![col("condition", "hypothesis number"), col("name", "hypothesis"), col("value", "measured quantity"), col("pass", "hypothesis holds")],
    );
    for c in &rep.conditions {
        t.push(vec![c.condition.to_string(), c.name.clone(), num(c.value), c.pass.to_string()]);
    }
    t
}

fn summary(rep: &TransferReport) -> Value {
    json!({
        "vertices": rep.vertices,
        "net_size": rep.net_size,
        "c_rough": rep.c_rough,
        "c_rel_eps": rep.c_rel_eps,
        "c_rel_3eps": rep.c_rel_3eps,
        "nu_c": rep.nu_c,
        "nu_3c": rep.nu_3c,
        "uniformity": rep.uniformity,
        "c_minus": rep.c_minus,
        "c_plus": rep.c_plus,
        "c_pred": rep.c_pred,
        "c_meas": rep.c_meas,
        "prediction_ratio": rep.prediction_ratio(),
        "chain_ok": rep.chain_ok,
    })
}

pub fn run(_seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    if p.side == 0 || p.violator_side < 2 {
        return Err(CliError::Usage("box sides must be positive".into()));
    }
    let cfg = TransferConfig { eps: p.eps, c: p.c, ..TransferConfig::default() };
    let dims = [p.side; 4];
    let g = WeightedGraph::lattice_box(&dims);
    let family = sub_box_family(&dims, &p.sides);
    let rep = transfer_harness(&g, &cfg, &family)?;
    let mut sets = Table::new(
        "sets",
        "Candidate sub-boxes and the proof chain on each",
        vec![
            col("id", "index in the family"),
            col("size", "vertex count"),
            col("measure", "μ(E)"),
            col("perimeter", "edge-cut perimeter P(E)"),
            col("s_size", "♯S, net points more than half covered"),
            col("boundary_size", "♯∂S"),
            col("p0_size", "♯P₀"),
            col("ratio", "μ(E)^((d−1)/d) / P(E)"),
            col("chain_ok", "every step of the chain verified"),
        ],
    );
    for s in &rep.sets {
        sets.push(vec![
            s.id.to_string(),
            s.size.to_string(),
            num(s.measure),
            num(s.perimeter),
            s.s_size.to_string(),
            s.boundary_size.to_string(),
            s.p0_size.to_string(),
            num(s.ratio),
            s.chain_ok.to_string(),
        ]);
    }
    let meas = rep.c_meas.unwrap_or(f64::NAN);
    let mut assertions = vec![
        Assertion::holds("hypotheses hold on the lattice box", rep.hypotheses_hold()),
        Assertion::holds("proof chain verified on every set", rep.chain_ok && !rep.degenerate),
        Assertion::at_most("measured constant within prediction", meas, rep.c_pred),
        Assertion::at_most("prediction ratio", rep.prediction_ratio().unwrap_or(f64::INFINITY), p.ratio_max),
    ];
    let mut tables = vec![conditions_table("conditions", &rep), sets];
    let mut results = json!({ "box": summary(&rep) });
    if p.violator {
        let vdims = [p.violator_side; 4];
        let base = WeightedGraph::lattice_box(&vdims);
        let mid = p.violator_side / 2;
        let mut measures = base.measures.clone();
        measures[box_index(&vdims, &[mid; 4])] = p.heavy_measure;
        let heavy = WeightedGraph::new(measures, base.edges.clone())?;
        let vrep = transfer_harness(&heavy, &cfg, &sub_box_family(&vdims, &p.violator_sides))?;
        let c4 = vrep.conditions.iter().find(|c| c.condition == 4).is_some_and(|c| !c.pass);
        assertions.push(Assertion::holds("heavy vertex flags the measure condition", c4));
        assertions.push(Assertion::holds("chain still verified with a heavy vertex", vrep.chain_ok));
        tables.push(conditions_table("violator_conditions", &vrep));
        results["violator"] = summary(&vrep);
    }
    Ok(Outcome { results, assertions, tables })
}
