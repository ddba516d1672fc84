use super::{max_of, stream};
use crate::report::{col, num, Assertion, Outcome, Table};
use crate::{parse_params, CliResult};
use heislab_core::growth::{build_net, cayley_net, is_maximal, rough_ip_profile, DiscreteHeisenberg};
use rand::Rng;
use serde::Deserialize;
use serde_json::{json, Value};

#[derive(Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
struct Params {
    /// Largest word ball in the family.
    #[serde(rename = "R")]
    r: usize,
    d: f64,
    /// Largest accepted IP ratio on the family.
    ratio_max: f64,
    /// Radii from this one on form the tail whose spread is bounded.
    tail_from: usize,
    tail_spread_max: f64,
    clouds: usize,
    cloud_points: usize,
}

impl Default for Params {
    fn default() -> Self {
        Params { r: 20, d: 4.0, ratio_max: 1.0, tail_from: 11, tail_spread_max: 1.5, clouds: 100, cloud_points: 60 }
    }
}

fn euclid(a: &(f64, f64), b: &(f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

pub fn run(seed: u64, params: &Value) -> CliResult<Outcome> {
    let p: Params = parse_params(params)?;
    if p.r < 2 || p.tail_from > p.r {
        return Err(crate::CliError::Usage(format!("need R ≥ 2 and tail_from ≤ R, got R = {}, tail_from = {}", p.r, p.tail_from)));
    }
    let cn = cayley_net(&DiscreteHeisenberg, p.r + 1)?;
    let family: Vec<Vec<usize>> = (1..=p.r).map(|r| cn.word_ball(r)).collect();
    let stats = rough_ip_profile(&cn.net, &family, p.d)?;
    let mut balls = Table::new(
        "word_balls",
        "Rough isoperimetric ratios of word balls in the discrete Heisenberg Cayley net",
        vec![
            col("R", "word radius"),
            col("size", "♯B(R)"),
            col("boundary_size", "♯∂B(R) in the net"),
            col("ip_ratio", "♯B(R)^((d−1)/d) / ♯∂B(R)"),
        ],
    );
    for (k, s) in stats.iter().enumerate() {
        balls.push(vec![(k + 1).to_string(), s.size.to_string(), s.boundary_size.to_string(), num(s.ip_ratio)]);
    }
    let ratios: Vec<f64> = stats.iter().map(|s| s.ip_ratio).collect();
    let c = max_of(ratios.iter().copied());
    let tail = &ratios[p.tail_from - 1..];
    let spread = max_of(tail.iter().copied()) / tail.iter().copied().fold(f64::INFINITY, f64::min);

    let mut rng = stream(seed, 1);
    let mut clouds = Table::new(
        "clouds",
        "Greedy ε-nets of random point clouds in the unit square",
        vec![
            col("cloud", "cloud index"),
            col("points", "sample count"),
            col("eps", "net scale"),
            col("net_size", "number of net points"),
            col("min_separation", "smallest distance between net points"),
            col("symmetric", "neighbour relation symmetric"),
            col("maximal", "every sample within ε of the net"),
        ],
    );
    let (mut sym_fail, mut sep_fail, mut max_fail) = (0usize, 0usize, 0usize);
    for i in 0..p.clouds {
        let n = rng.gen_range(1..=p.cloud_points.max(1));
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect();
        let eps = rng.gen_range(0.05..0.6);
        let net = build_net(&pts, euclid, eps)?;
        let sep = net.min_separation();
        let sym = net.is_symmetric();
        let maximal = is_maximal(&net, &pts, euclid);
        sym_fail += usize::from(!sym);
        sep_fail += usize::from(sep < eps);
        max_fail += usize::from(!maximal);
        clouds.push(vec![i.to_string(), n.to_string(), num(eps), net.len().to_string(), num(sep), sym.to_string(), maximal.to_string()]);
    }
    let assertions = vec![
        Assertion::below("word-ball rough IP constant", c, p.ratio_max),
        Assertion::below("tail max/min ratio", spread, p.tail_spread_max),
        Assertion::within("clouds with asymmetric neighbours", sym_fail as f64, 0.0, 0.0),
        Assertion::within("clouds with separation below eps", sep_fail as f64, 0.0, 0.0),
        Assertion::within("clouds with a non-maximal net", max_fail as f64, 0.0, 0.0),
    ];
    Ok(Outcome {
        results: json!({ "net_size": cn.net.len(), "rough_ip_constant": c, "tail_spread": spread, "clouds": p.clouds }),
        assertions,
        tables: vec![balls, clouds],
    })
}
