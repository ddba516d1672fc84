use super::max_of;
use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::scalar::Polynomial;
use heislab_core::subelliptic::{coarea_check, CoareaConfig, PerimeterMethod};
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    /// Names from the polynomial library on R³, e.g. `x`, `x^2+y^2`.
    functions: Vec<String>,
    /// Mesh sizes are `1/n` for each entry.
    resolutions: Vec<u32>,
    /// `crofton` or `axis`.
    method: String,
    t_extent: f64,
    rel_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        Params { functions: vec!["x".into(), "x^2+y^2".into()], resolutions: vec![8, 16, 32], method: "crofton".into(), t_extent: 0.125, rel_tol: 0.02 }
    }
}

pub(crate) fn library_function(name: &str) -> CliResult<Polynomial> {
    Polynomial::library(3)
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, u)| u)
        .ok_or_else(|| CliError::Usage(format!("unknown test function `{name}`")))
}

pub fn run(_seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    let method = match p.method.as_str() {
        "crofton" => PerimeterMethod::CroftonAuto,
        "axis" => PerimeterMethod::AxisCut,
        m => return Err(CliError::Usage(format!("unknown perimeter method `{m}` (expected crofton or axis)"))),
    };
    if p.resolutions.is_empty() || p.resolutions.contains(&0) {
        return Err(CliError::Usage("resolutions must be positive".into()));
    }
    let cfg = CoareaConfig { t_extent: p.t_extent, method };
    let hs: Vec<f64> = p.resolutions.iter().map(|&n| 1.0 / n as f64).collect();
    let mut table = Table::new(
        "coarea",
        "∫|∇_H u| against ∫ P({u > s}) ds on the window [0,1]² × [0,T]",
        vec![
            col("function", "test function"),
            col("h", "mesh size"),
            col("nodes", "grid nodes"),
            col("directions", "perimeter stencil directions"),
            col("lhs", "∫ |∇_H u|"),
            col("rhs", "∫ P({u > s}) ds"),
            col("rel_error", "|lhs − rhs| / lhs"),
        ],
    );
    let mut assertions = Vec::new();
    let mut out = serde_json::Map::new();
    for name in &p.functions {
        let u = library_function(name)?;
        let rows = coarea_check(&u, &hs, &cfg)?;
        for r in &rows {
            table.push(vec![name.clone(), num(r.h), r.nodes.to_string(), r.directions.to_string(), num(r.lhs), num(r.rhs), num(r.rel_error)]);
        }
        let errs: Vec<f64> = rows.iter().map(|r| r.rel_error).collect();
        let finest = *errs.last().unwrap_or(&f64::NAN);
        let rises = errs.windows(2).filter(|w| w[1] >= w[0]).count();
        assertions.push(Assertion::below(format!("{name} relative error at h = {}", num(hs[hs.len() - 1])), finest, p.rel_tol));
        assertions.push(Assertion::within(format!("{name} refinements without error decrease"), rises as f64, 0.0, 0.0));
        out.insert(name.clone(), json!({ "rel_error": errs, "max_rel_error": max_of(errs.iter().copied()) }));
    }
    Ok(Outcome { results: Value::Object(out), assertions, tables: vec![table] })
}
