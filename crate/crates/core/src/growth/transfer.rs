//! Executable form of the local-to-global isoperimetric transfer on a finite
//! weighted graph with hop metric, vertex measure `μ` and edge-cut perimeter.
//!
//! For each candidate `E` the harness rebuilds the proof chain: the net
//! points are split into `S = {y : μ(E∩B(y,ε)) > ½μ(B(y,ε))}` and the
//! remaining points `P₀` whose `ε`-ball meets `E`; `S` is controlled by the
//! rough inequality on the net, `P₀` by the relative inequality at scale `ε`,
//! and `♯∂S` by the relative inequality at scale `3ε`.

use super::net::{boundary, Net};
use crate::error::{Error, Result};
use crate::graph::{indicator, sub_box, WeightedGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferConfig {
    /// Net scale in hops.
    pub eps: f64,
    /// Enlargement factor in the relative inequality.
    pub c: f64,
    pub d: f64,
    /// Largest `c₊/c₋` accepted as condition (4).
    pub measure_ratio_max: f64,
}

impl Default for TransferConfig {
    fn default() -> Self {
        TransferConfig { eps: 0.5, c: 1.0, d: 4.0, measure_ratio_max: 10.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionCheck {
    pub condition: u8,
    pub name: String,
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetRecord {
    pub id: usize,
    pub size: usize,
    pub measure: f64,
    pub perimeter: f64,
    pub s_size: usize,
    pub boundary_size: usize,
    pub p0_size: usize,
    /// `μ(E)^{(d−1)/d} / P(E)`.
    pub ratio: f64,
    pub chain_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub config: TransferConfig,
    pub vertices: usize,
    pub net_size: usize,
    pub c_rough: f64,
    pub c_rel_eps: f64,
    pub c_rel_3eps: f64,
    pub nu_c: usize,
    pub nu_3c: usize,
    /// `sup ♯(B(y, 3cε) ∩ Y)`.
    pub uniformity: usize,
    pub c_minus: f64,
    pub c_plus: f64,
    pub conditions: Vec<ConditionCheck>,
    pub c_pred: f64,
    /// Measured global constant; `None` when the family is degenerate.
    pub c_meas: Option<f64>,
    pub degenerate: bool,
    pub chain_ok: bool,
    pub sets: Vec<SetRecord>,
}

impl TransferReport {
    pub fn hypotheses_hold(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }

    pub fn prediction_ratio(&self) -> Option<f64> {
        self.c_meas.map(|m| self.c_pred / m)
    }
}

/// Open hop ball `{x : d(y,x) < r}`, sorted. `stamp` and `dist` are scratch buffers of length `|V|`;
/// `stamp` entries equal to `y` are treated as visited.
fn hop_ball_into(g: &WeightedGraph, y: usize, r: f64, stamp: &mut [u32], dist: &mut [usize]) -> Vec<u32> {
    if r <= 0.0 {
        return Vec::new();
    }
    let reach = (r.ceil() as usize).saturating_sub(1);
    let tag = y as u32;
    stamp[y] = tag;
    dist[y] = 0;
    let mut ball = vec![tag];
    let mut head = 0;
    while head < ball.len() {
        let v = ball[head] as usize;
        head += 1;
        if dist[v] >= reach {
            continue;
        }
        for &(w, _) in g.neighbors(v) {
            if stamp[w as usize] != tag {
                stamp[w as usize] = tag;
                dist[w as usize] = dist[v] + 1;
                ball.push(w);
            }
        }
    }
    ball.sort_unstable();
    ball
}

fn scratch(g: &WeightedGraph) -> (Vec<u32>, Vec<usize>) {
    (vec![u32::MAX; g.len()], vec![0usize; g.len()])
}

fn hop_balls(g: &WeightedGraph, centers: &[usize], r: f64) -> Vec<Vec<u32>> {
    centers
        .par_iter()
        .map_init(|| scratch(g), |(stamp, dist), &y| hop_ball_into(g, y, r, stamp, dist))
        .collect()
}

/// Edge indices with both ends in `ball` (sorted vertex list).
fn inner_edges(g: &WeightedGraph, ball: &[u32]) -> Vec<u32> {
    let mut out = Vec::new();
    for &v in ball {
        for &(w, e) in g.neighbors(v as usize) {
            if w > v && ball.binary_search(&w).is_ok() {
                out.push(e);
            }
        }
    }
    out
}

/// Greedy hop-metric `ε`-net over vertices in index order.
pub fn graph_net(g: &WeightedGraph, eps: f64) -> Net {
    let n = g.len();
    let mut covered = vec![false; n];
    let mut points = Vec::new();
    let (mut stamp, mut dist) = scratch(g);
    for v in 0..n {
        if !covered[v] {
            points.push(v);
            for x in &hop_ball_into(g, v, eps, &mut stamp, &mut dist) {
                covered[*x as usize] = true;
            }
        }
    }
    let mut slot = vec![u32::MAX; n];
    for (i, &p) in points.iter().enumerate() {
        slot[p] = i as u32;
    }
    let neighbors = hop_balls(g, &points, (2.0 * eps).floor() + 0.5)
        .into_iter()
        .zip(&points)
        .map(|(ball, &p)| {
            let mut nb: Vec<u32> = ball.iter().filter(|&&x| x as usize != p && slot[x as usize] != u32::MAX).map(|&x| slot[x as usize]).collect();
            nb.sort_unstable();
            nb
        })
        .collect();
    let graph = Arc::new(g.clone());
    let pts = points.clone();
    let oracle = Arc::new(move |i: usize, j: usize| graph.bfs(&[pts[i]], None)[pts[j]].map_or(f64::INFINITY, |h| h as f64));
    Net::from_parts(points, eps, neighbors, oracle)
}

struct Geometry {
    net: Net,
    ball_eps: Vec<Vec<u32>>,
    ball_3eps: Vec<Vec<u32>>,
    edges_c: Vec<Vec<u32>>,
    edges_3c: Vec<Vec<u32>>,
    mu_eps: Vec<f64>,
    mu_3eps: Vec<f64>,
}

struct SetEval {
    record: SetRecord,
    c_rough: f64,
    c_rel_eps: f64,
    c_rel_3eps: f64,
    cover_sum: f64,
    p0_sum: f64,
}

fn evaluate(g: &WeightedGraph, geo: &Geometry, d: f64, id: usize, set: &[usize]) -> SetEval {
    let q = (d - 1.0) / d;
    let inside = indicator(g.len(), set);
    let m_of = |ball: &[u32]| ball.iter().filter(|&&x| inside[x as usize]).map(|&x| g.measures[x as usize]).sum::<f64>();
    let cut = |edges: &[u32]| edges.iter().map(|&e| &g.edges[e as usize]).filter(|(a, b, _)| inside[*a as usize] != inside[*b as usize]).map(|e| e.2).sum::<f64>();
    let measure = g.measure_of(&inside);
    let perimeter = g.edge_cut(&inside, None);

    let mut s = Vec::new();
    let mut p0 = Vec::new();
    let (mut cover_sum, mut p0_sum) = (0.0, 0.0);
    let (mut c_rel_eps, mut c_rel_3eps) = (0.0f64, 0.0f64);
    for y in 0..geo.net.len() {
        let me = m_of(&geo.ball_eps[y]);
        if me > 0.5 * geo.mu_eps[y] {
            s.push(y);
            cover_sum += me;
        } else if me > 0.0 {
            p0.push(y);
            cover_sum += me;
            p0_sum += me;
        }
        let rel = |m_in: f64, total: f64, edges: &[u32]| -> f64 {
            let m = m_in.min(total - m_in);
            if m <= 1e-12 * total {
                return 0.0;
            }
            let p = cut(edges);
            if p > 0.0 {
                m.powf(q) / p
            } else {
                f64::INFINITY
            }
        };
        c_rel_eps = c_rel_eps.max(rel(me, geo.mu_eps[y], &geo.edges_c[y]));
        let m3 = m_of(&geo.ball_3eps[y]);
        c_rel_3eps = c_rel_3eps.max(rel(m3, geo.mu_3eps[y], &geo.edges_3c[y]));
    }
    let ds = boundary(&geo.net, &s).len();
    let c_rough = match (s.len(), ds) {
        (0, _) => 0.0,
        (_, 0) => f64::INFINITY,
        (k, b) => (k as f64).powf(q) / b as f64,
    };
    let ratio = if perimeter > 0.0 { measure.powf(q) / perimeter } else { f64::INFINITY };
    SetEval {
        record: SetRecord { id, size: set.len(), measure, perimeter, s_size: s.len(), boundary_size: ds, p0_size: p0.len(), ratio, chain_ok: false },
        c_rough,
        c_rel_eps,
        c_rel_3eps,
        cover_sum,
        p0_sum,
    }
}

pub fn transfer_harness(g: &WeightedGraph, cfg: &TransferConfig, family: &[Vec<usize>]) -> Result<TransferReport> {
    if !(cfg.eps > 0.0) || !(cfg.c >= 1.0) || !(cfg.d > 1.0) {
        return Err(Error::InvalidArgument(format!("need eps > 0, c ≥ 1, d > 1; got {cfg:?}")));
    }
    if g.is_empty() {
        return Err(Error::InvalidArgument("empty space".into()));
    }
    if let Some(v) = family.iter().flatten().find(|&&v| v >= g.len()) {
        return Err(Error::InvalidArgument(format!("subset vertex {v} out of range")));
    }
    let net = graph_net(g, cfg.eps);
    let pts = net.points.clone();
    let ball_eps = hop_balls(g, &pts, cfg.eps);
    let ball_3eps = hop_balls(g, &pts, 3.0 * cfg.eps);
    let edges_c: Vec<Vec<u32>> = hop_balls(g, &pts, cfg.c * cfg.eps).iter().map(|b| inner_edges(g, b)).collect();
    let edges_3c: Vec<Vec<u32>> = hop_balls(g, &pts, 3.0 * cfg.c * cfg.eps).iter().map(|b| inner_edges(g, b)).collect();
    let mu = |b: &Vec<u32>| b.iter().map(|&x| g.measures[x as usize]).sum::<f64>();
    let mu_eps: Vec<f64> = ball_eps.iter().map(mu).collect();
    let mu_3eps: Vec<f64> = ball_3eps.iter().map(mu).collect();
    let multiplicity = |lists: &[Vec<u32>]| -> usize {
        let mut count = vec![0usize; g.edges.len()];
        for l in lists {
            for &e in l {
                count[e as usize] += 1;
            }
        }
        count.into_iter().max().unwrap_or(0)
    };
    let nu_c = multiplicity(&edges_c);
    let nu_3c = multiplicity(&edges_3c);
    let mut slot = vec![false; g.len()];
    for &p in &pts {
        slot[p] = true;
    }
    let uniformity = hop_balls(g, &pts, 3.0 * cfg.c * cfg.eps)
        .iter()
        .map(|b| b.iter().filter(|&&x| slot[x as usize]).count())
        .max()
        .unwrap_or(0);
    let c_minus = mu_eps.iter().copied().fold(f64::INFINITY, f64::min);
    let c_plus = mu_eps.iter().copied().fold(0.0, f64::max);
    let geo = Geometry { net, ball_eps, ball_3eps, edges_c, edges_3c, mu_eps, mu_3eps };

    // Relatively compact candidates only: nonempty and not the whole space.
    let proper: Vec<(usize, &Vec<usize>)> = family
        .iter()
        .enumerate()
        .filter(|(_, s)| {
            let mut u = (*s).clone();
            u.sort_unstable();
            u.dedup();
            !u.is_empty() && u.len() < g.len()
        })
        .collect();
    let mut evals: Vec<SetEval> = proper.par_iter().map(|(id, s)| evaluate(g, &geo, cfg.d, *id, s)).collect();

    let fold = |evals: &[SetEval], f: &dyn Fn(&SetEval) -> f64| evals.iter().map(f).fold(0.0, f64::max);
    let c_rough = fold(&evals, &|e| e.c_rough);
    let c_rel_eps = fold(&evals, &|e| e.c_rel_eps);
    let c_rel_3eps = fold(&evals, &|e| e.c_rel_3eps);
    let d = cfg.d;
    let q = d / (d - 1.0);
    let c_pred = ((c_rel_eps * nu_c as f64).powf(q)
        + c_plus * (c_rough * (2.0 / c_minus).powf(1.0 / q) * c_rel_3eps * nu_3c as f64).powf(q))
    .powf(1.0 / q);

    let tol = 1e-9;
    for e in &mut evals {
        let r = &e.record;
        let cover = e.cover_sum >= r.measure * (1.0 - tol);
        let bd = r.boundary_size as f64 <= (2.0 / c_minus).powf(1.0 / q) * c_rel_3eps * nu_3c as f64 * r.perimeter * (1.0 + tol) || r.s_size == 0;
        let p0 = e.p0_sum <= (c_rel_eps * nu_c as f64 * r.perimeter).powf(q) * (1.0 + tol);
        let concl = r.ratio <= c_pred * (1.0 + tol);
        e.record.chain_ok = cover && bd && p0 && concl;
    }
    let degenerate = evals.is_empty();
    let c_meas = if degenerate { None } else { Some(fold(&evals, &|e| e.record.ratio)) };
    let conditions = vec![
        ConditionCheck { condition: 1, name: "rough isoperimetric inequality on the net".into(), value: c_rough, pass: c_rough.is_finite() },
        ConditionCheck {
            condition: 2,
            name: "relative isoperimetric inequality at scales eps and 3 eps".into(),
            value: c_rel_eps.max(c_rel_3eps),
            pass: c_rel_eps.is_finite() && c_rel_3eps.is_finite(),
        },
        ConditionCheck { condition: 3, name: "uniformity of the net".into(), value: uniformity as f64, pass: true },
        ConditionCheck {
            condition: 4,
            name: "ball measure bounds c_minus <= mu(B(y,eps)) <= c_plus".into(),
            value: c_plus / c_minus,
            pass: c_plus / c_minus <= cfg.measure_ratio_max,
        },
    ];
    Ok(TransferReport {
        config: *cfg,
        vertices: g.len(),
        net_size: geo.net.len(),
        c_rough,
        c_rel_eps,
        c_rel_3eps,
        nu_c,
        nu_3c,
        uniformity,
        c_minus,
        c_plus,
        conditions,
        c_pred,
        c_meas,
        degenerate,
        chain_ok: evals.iter().all(|e| e.record.chain_ok),
        sets: evals.into_iter().map(|e| e.record).collect(),
    })
}

/// Sub-boxes of a lattice box: for each side `k`, every corner in `{0, ⌊(n−k)/2⌋, n−k}^dim`.
pub fn sub_box_family(dims: &[usize], sides: &[usize]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for &k in sides {
        if dims.iter().any(|&n| k == 0 || k > n) {
            continue;
        }
        let choices: Vec<Vec<usize>> = dims
            .iter()
            .map(|&n| {
                let mut c = vec![0, (n - k) / 2, n - k];
                c.dedup();
                c
            })
            .collect();
        let mut idx = vec![0usize; dims.len()];
        loop {
            let lo: Vec<usize> = idx.iter().zip(&choices).map(|(&i, c)| c[i]).collect();
            out.push(sub_box(dims, &lo, &vec![k; dims.len()]));
            let mut axis = 0;
            while axis < dims.len() {
                idx[axis] += 1;
                if idx[axis] < choices[axis].len() {
                    break;
                }
                idx[axis] = 0;
                axis += 1;
            }
            if axis == dims.len() {
                break;
            }
        }
    }
    out
}
