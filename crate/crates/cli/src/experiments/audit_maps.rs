use super::{max_of, stream};
use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliError, CliResult};
use heislab_core::heis::HeisPoint;
use heislab_core::maps::{
    audit_map, check_type4_axioms, jacobian_identity_check, norm_det_identity_check, pullback_chain_check, pullback_operator,
    pushforward_formula_check, sample_points, MapSpec, OperatorType4,
};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{json, Value};
use std::collections::BTreeMap;

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    /// Map specs in display form, e.g. `MultiTwist(3)`.
    specs: Vec<String>,
    n: usize,
    /// Random 2×2 matrices for the σ_max·σ_min = |det| identity.
    matrices: usize,
    step: f64,
    contact_tol: f64,
    /// Per-spec weak-contact tolerances replacing `contact_tol`.
    contact_tol_overrides: BTreeMap<String, f64>,
    conformal_tol: f64,
    /// Slack over `a` allowed for multi-twist distortion.
    twist_slack: f64,
    det_tol: f64,
    pushforward_points: usize,
    pushforward_tol: f64,
    jacobian_samples: usize,
    jacobian_tol: f64,
    dilation: f64,
    axiom_points: usize,
    axiom_vectors: usize,
    /// `[h, f]` pairs for `h#(f#A) = (f∘h)#A`.
    chain_pairs: Vec<[String; 2]>,
    chain_points: usize,
    chain_tol: f64,
    conformal_specs: Vec<String>,
    conformal_points: usize,
    standard_tol: f64,
}

impl Default for Params {
    fn default() -> Self {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect();
        Params {
            specs: s(&["StereoIota", "MultiTwist(2)", "MultiTwist(3)", "UnknotH", "HopfAction(1,-2)", "LeftTranslation(0.5,-1,2)", "Dilation(1.7)"]),
            n: 1000,
            matrices: 10_000,
            step: 1e-4,
            contact_tol: 1e-5,
            // Central-difference truncation error grows like e^{3x}(2π)³ step² on the sampling box.
            contact_tol_overrides: BTreeMap::from([("UnknotH".to_string(), 1e-4)]),
            conformal_tol: 1e-3,
            twist_slack: 0.05,
            det_tol: 1e-10,
            pushforward_points: 200,
            pushforward_tol: 1e-5,
            jacobian_samples: 400_000,
            jacobian_tol: 0.05,
            dilation: 1.5,
            axiom_points: 100,
            axiom_vectors: 10,
            chain_pairs: vec![
                ["Dilation(2)".into(), "LeftTranslation(1,2,-1)".into()],
                ["Dilation(0.5)".into(), "MultiTwist(2)".into()],
                ["LeftTranslation(1,2,-1)".into(), "StereoIota".into()],
                ["HopfAction(1,3)".into(), "MultiTwist(3)".into()],
            ],
            chain_points: 20,
            chain_tol: 1e-5,
            conformal_specs: s(&["Dilation(2.5)", "LeftTranslation(1,-1,0.5)", "HopfAction(1,3)", "StereoIota"]),
            conformal_points: 20,
            standard_tol: 1e-4,
        }
    }
}

fn parse_spec(s: &str) -> CliResult<MapSpec> {
    s.parse().map_err(|e: heislab_core::Error| CliError::Usage(e.to_string()))
}

fn random_point(rng: &mut ChaCha8Rng) -> HeisPoint {
    HeisPoint::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0), rng.gen_range(-4.0..4.0))
}

/// Distortion bounds known in closed form: `[1, a]` for the multi-twist, `1` for conformal maps.
fn distortion_bounds(spec: &MapSpec, p: &Params) -> Option<(f64, f64)> {
    match spec {
        MapSpec::MultiTwist { a } => Some((1.0 - 1e-9, *a as f64 + p.twist_slack)),
        MapSpec::UnknotH | MapSpec::Compose { .. } => None,
        _ => Some((1.0 - p.conformal_tol, 1.0 + p.conformal_tol)),
    }
}

pub fn run(seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    let specs: Vec<MapSpec> = p.specs.iter().map(|s| parse_spec(s)).collect::<CliResult<_>>()?;
    let mut assertions = Vec::new();

    let mut audits = Table::new(
        "audits",
        "Distortion, weak-contact and norm-determinant audit per map",
        vec![
            col("spec", "map"),
            col("n_samples", "sample points"),
            col("rejected", "draws discarded near the singular locus"),
            col("min_distortion", "smallest σ_max/σ_min"),
            col("max_distortion", "largest σ_max/σ_min"),
            col("max_contact_residual", "largest |α(Xf)| + |α(Yf)|"),
            col("det_identity_max_err", "largest |σ_max·σ_min − |det||"),
        ],
    );
    let mut audit_json = Vec::new();
    for (i, spec) in specs.iter().enumerate() {
        let rec = audit_map(spec, p.n, seed.wrapping_add(i as u64))?;
        audits.push(vec![
            rec.spec.clone(),
            rec.n_samples.to_string(),
            rec.rejected.to_string(),
            num(rec.min_distortion),
            num(rec.max_distortion),
            num(rec.max_contact_residual),
            num(rec.det_identity_max_err),
        ]);
        if let Some((lo, hi)) = distortion_bounds(spec, &p) {
            assertions.push(Assertion::at_least(format!("{spec} min distortion"), rec.min_distortion, lo));
            assertions.push(Assertion::at_most(format!("{spec} max distortion"), rec.max_distortion, hi));
        }
        let tol = p.contact_tol_overrides.get(&spec.to_string()).copied().unwrap_or(p.contact_tol);
        assertions.push(Assertion::below(format!("{spec} weak-contact residual"), rec.max_contact_residual, tol));
        assertions.push(Assertion::below(format!("{spec} norm-det identity on differentials"), rec.det_identity_max_err, p.det_tol));
        audit_json.push(serde_json::to_value(&rec).map_err(|e| CliError::Runtime(e.to_string()))?);
    }

    let mut rng = stream(seed, 2);
    let det_err = max_of((0..p.matrices).map(|_| {
        let mut e = || rng.gen_range(-3.0..3.0);
        let m = [[e(), e()], [e(), e()]];
        let (l, r) = norm_det_identity_check(&m);
        (l - r).abs() / (1.0 + r)
    }));
    assertions.push(Assertion::below("norm-det identity on random matrices (relative)", det_err, p.det_tol));

    let mut rng = stream(seed, 3);
    let mut push_res = 0.0f64;
    let mut flipped = 0usize;
    for _ in 0..p.pushforward_points {
        let r = pushforward_formula_check(&random_point(&mut rng), p.step)?;
        push_res = push_res.max(r.residual).max(r.residual_conj);
        flipped += usize::from(r.sign_flipped());
    }
    let q = HeisPoint::new(0.4, 0.2, -0.3);
    let decay = pushforward_formula_check(&q, 2e-2)?.residual / pushforward_formula_check(&q, 1e-2)?.residual;
    assertions.push(Assertion::below("pushforward residual", push_res, p.pushforward_tol));
    assertions.push(Assertion::within("pushforward sign flips", flipped as f64, 0.0, 0.0));
    assertions.push(Assertion::within("pushforward decay ratio under step halving", decay, 4.0, 0.5));

    let dil = MapSpec::dilation(p.dilation)?;
    let jac = jacobian_identity_check(&dil, &HeisPoint::new(0.3, -0.2, 0.1), 0.2, p.jacobian_samples, seed)?;
    assertions.push(Assertion::within("dilation volume ratio / det²", jac.volume_ratio / jac.det_sq, 1.0, p.jacobian_tol));
    assertions.push(Assertion::within("dilation det² = r⁴ (relative)", jac.det_sq / p.dilation.powi(4), 1.0, 1e-8));

    let mut axioms = Table::new(
        "axioms",
        "Type-4 axioms for pullbacks of the standard operator",
        vec![
            col("spec", "map"),
            col("points", "base points"),
            col("min_coercivity", "min ⟨Ah,h⟩/(α|h|⁴), at least 1"),
            col("max_growth", "max |Ah|/(β|h|³), at most 1"),
            col("min_monotonicity", "min ⟨Ah−Ag,h−g⟩/|h−g|⁴, positive"),
            col("max_homogeneity_err", "max relative degree-3 homogeneity error"),
        ],
    );
    for (i, spec) in specs.iter().enumerate() {
        let (pts, _) = sample_points(spec, p.axiom_points, seed.wrapping_add(100 + i as u64));
        let (mut co, mut gr, mut mo, mut ho) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
        for (k, x) in pts.iter().enumerate() {
            let op = pullback_operator(spec, &OperatorType4::Standard, x)?;
            let r = check_type4_axioms(&op, p.axiom_vectors, seed.wrapping_add(k as u64))?;
            co = co.min(r.coercivity);
            gr = gr.max(r.growth);
            mo = mo.min(r.monotonicity);
            ho = ho.max(r.homogeneity_err);
        }
        axioms.push(vec![spec.to_string(), pts.len().to_string(), num(co), num(gr), num(mo), num(ho)]);
        assertions.push(Assertion::holds(format!("{spec} pullback satisfies type-4 axioms"), co >= 1.0 - 1e-9 && gr <= 1.0 + 1e-9 && mo > 0.0 && ho <= 1e-9));
    }

    let mut rng = stream(seed, 4);
    let mut chains = Table::new(
        "chain_rule",
        "Relative gap between h#(f#A) and (f∘h)#A",
        vec![col("h", "inner map"), col("f", "outer map"), col("points", "base points"), col("max_residual", "largest relative gap")],
    );
    for [h, f] in &p.chain_pairs {
        let (hs, fs) = (parse_spec(h)?, parse_spec(f)?);
        let comp = MapSpec::compose(fs.clone(), hs.clone())?;
        let (pts, _) = sample_points(&comp, p.chain_points, rng.gen());
        let mut worst = 0.0f64;
        for x in &pts {
            let v = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            worst = worst.max(pullback_chain_check(&hs, &fs, &OperatorType4::Standard, x, v)?);
        }
        chains.push(vec![h.clone(), f.clone(), pts.len().to_string(), num(worst)]);
        assertions.push(Assertion::below(format!("chain rule {f} after {h}"), worst, p.chain_tol));
    }

    let mut rng = stream(seed, 5);
    let mut conformal = Table::new(
        "conformal_pullbacks",
        "Deviation of the pulled-back standard operator from h ↦ |h|²h",
        vec![col("spec", "map"), col("points", "base points"), col("max_rel_err", "largest |f#A(h) − |h|²h| / |h|³")],
    );
    for s in &p.conformal_specs {
        let spec = parse_spec(s)?;
        let mut worst = 0.0f64;
        for _ in 0..p.conformal_points {
            let x = random_point(&mut rng);
            let op = pullback_operator(&spec, &OperatorType4::Standard, &x)?;
            let h = [rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)];
            let got = op.apply(h)?;
            let n2: f64 = h[0] * h[0] + h[1] * h[1];
            worst = worst.max((got[0] - n2 * h[0]).hypot(got[1] - n2 * h[1]) / n2.powf(1.5));
        }
        conformal.push(vec![spec.to_string(), p.conformal_points.to_string(), num(worst)]);
        assertions.push(Assertion::below(format!("{spec} pullback of standard operator"), worst, p.standard_tol));
    }

    Ok(Outcome {
        results: json!({
            "audits": audit_json,
            "matrix_det_identity_max_rel_err": det_err,
            "pushforward_max_residual": push_res,
            "pushforward_decay_ratio": decay,
            "jacobian": serde_json::to_value(jac).map_err(|e| CliError::Runtime(e.to_string()))?,
        }),
        assertions,
        tables: vec![audits, axioms, chains, conformal],
    })
}
