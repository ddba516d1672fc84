use super::solver::{Problem, SolveOptions};
use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::growth::{CayleyGroup, DiscreteHeisenberg};
use serde::{Deserialize, Serialize};
use std::collections::{hash_map::Entry, HashMap, VecDeque};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityResult {
    pub capacity: f64,
    pub u: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Dirichlet data for `u = 1` on `K`, `u = 0` on the boundary; components that cannot carry
/// energy are pinned (to 1 if they contain `K`, else 0).
fn dirichlet(g: &WeightedGraph, k: &[usize]) -> Result<Vec<Option<f64>>> {
    if k.is_empty() {
        return Err(Error::InvalidArgument("K is empty".into()));
    }
    if let Some(v) = k.iter().find(|&&v| v >= g.len()) {
        return Err(Error::InvalidArgument(format!("K vertex {v} out of range")));
    }
    if let Some(v) = k.iter().find(|&&v| g.boundary[v]) {
        return Err(Error::InvalidArgument(format!("K meets the boundary at vertex {v}")));
    }
    let comp = g.components();
    let ncomp = comp.iter().max().map_or(0, |m| m + 1);
    let mut has_k = vec![false; ncomp];
    let mut has_b = vec![false; ncomp];
    for &v in k {
        has_k[comp[v]] = true;
    }
    for v in 0..g.len() {
        if g.boundary[v] {
            has_b[comp[v]] = true;
        }
    }
    let mut fixed: Vec<Option<f64>> = (0..g.len())
        .map(|v| {
            let c = comp[v];
            match (has_k[c], has_b[c]) {
                (true, true) => None,
                (true, false) => Some(1.0),
                _ => Some(0.0),
            }
        })
        .collect();
    for &v in k {
        fixed[v] = Some(1.0);
    }
    for v in 0..g.len() {
        if g.boundary[v] {
            fixed[v] = Some(0.0);
        }
    }
    Ok(fixed)
}

/// `inf Σ c_e |u(a) − u(b)|^p` over `u = 1` on `K`, `u = 0` on the boundary.
pub fn graph_capacity_with(g: &WeightedGraph, k: &[usize], p: f64, opts: &SolveOptions, init: Option<&[f64]>) -> Result<CapacityResult> {
    let fixed = dirichlet(g, k)?;
    let pr = Problem { g, p, scale: 1.0, fixed, load: vec![0.0; g.len()] };
    let sol = pr.solve(opts, init)?;
    Ok(CapacityResult { capacity: sol.energy, u: sol.u, iterations: sol.iterations, residual: sol.residual })
}

pub fn graph_capacity(g: &WeightedGraph, k: &[usize], p: f64, tol: f64) -> Result<f64> {
    let opts = SolveOptions { tol, ..SolveOptions::default() };
    Ok(graph_capacity_with(g, k, p, &opts, None)?.capacity)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ScanFamily {
    ZLattice(usize),
    DiscreteHeisenbergCayley,
}

impl fmt::Display for ScanFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanFamily::ZLattice(d) => write!(f, "Z{d}"),
            ScanFamily::DiscreteHeisenbergCayley => write!(f, "H3"),
        }
    }
}

impl FromStr for ScanFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "H3" => Ok(ScanFamily::DiscreteHeisenbergCayley),
            _ => s
                .strip_prefix('Z')
                .and_then(|d| d.parse().ok())
                .filter(|d| (1..=8).contains(d))
                .map(ScanFamily::ZLattice)
                .ok_or_else(|| Error::InvalidArgument(format!("unknown scan family `{s}` (expected Z<dim> or H3)"))),
        }
    }
}

/// Cayley ball `B(R)` modulo a symmetry group of the marked group: one vertex per orbit,
/// measure = orbit size, conductance between orbits = number of Cayley edges joining them.
#[derive(Debug, Clone)]
pub struct QuotientBall {
    pub graph: WeightedGraph,
    pub word_length: Vec<usize>,
    pub radius: usize,
}

impl QuotientBall {
    pub fn build(family: ScanFamily, radius: usize) -> Result<Self> {
        match family {
            ScanFamily::ZLattice(d) => Ok(lattice_quotient(d, radius)),
            ScanFamily::DiscreteHeisenbergCayley => heisenberg_quotient(radius),
        }
    }

    /// Number of group elements represented.
    pub fn elements(&self) -> f64 {
        self.graph.measures.iter().sum()
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Orbits of the hyperoctahedral group: non-increasing tuples of absolute values.
fn lattice_quotient(dim: usize, radius: usize) -> QuotientBall {
    let mut reps: Vec<Vec<usize>> = Vec::new();
    fn rec(prefix: &mut Vec<usize>, dim: usize, max: usize, budget: usize, out: &mut Vec<Vec<usize>>) {
        if prefix.len() == dim {
            out.push(prefix.clone());
            return;
        }
        for v in 0..=max.min(budget) {
            prefix.push(v);
            rec(prefix, dim, v, budget - v, out);
            prefix.pop();
        }
    }
    rec(&mut Vec::new(), dim, radius, radius, &mut reps);
    reps.sort_by_key(|r| (r.iter().sum::<usize>(), std::cmp::Reverse(r.clone())));
    let index: HashMap<Vec<usize>, usize> = reps.iter().cloned().enumerate().map(|(i, r)| (r, i)).collect();
    let size = |r: &[usize]| -> f64 {
        let nonzero = r.iter().filter(|&&v| v > 0).count();
        let mut mult: HashMap<usize, usize> = HashMap::new();
        for &v in r {
            *mult.entry(v).or_default() += 1;
        }
        2f64.powi(nonzero as i32) * factorial(r.len()) / mult.values().map(|&m| factorial(m)).product::<f64>()
    };
    let measures: Vec<f64> = reps.iter().map(|r| size(r)).collect();
    let mut edges = Vec::new();
    for (i, r) in reps.iter().enumerate() {
        for axis in 0..dim {
            for delta in [1i64, -1] {
                let mut n: Vec<usize> = r.clone();
                let v = r[axis] as i64 + delta;
                n[axis] = v.unsigned_abs() as usize;
                n.sort_unstable_by(|a, b| b.cmp(a));
                if let Some(&j) = index.get(&n) {
                    if j != i {
                        edges.push((i as u32, j as u32, 0.5 * measures[i]));
                    }
                }
            }
        }
    }
    let word_length = reps.iter().map(|r| r.iter().sum()).collect();
    QuotientBall { graph: WeightedGraph::new(measures, edges).expect("valid quotient"), word_length, radius }
}

/// Dihedral symmetries `(x,y,t) ↦ (−y,x,t)` and `(x,y,t) ↦ (y,x,−t)` of the marked Heisenberg group.
fn dihedral_images(e: &[i64; 3]) -> [[i64; 3]; 8] {
    let [x, y, t] = *e;
    [
        [x, y, t],
        [-y, x, t],
        [-x, -y, t],
        [y, -x, t],
        [y, x, -t],
        [-x, y, -t],
        [-y, -x, -t],
        [x, -y, -t],
    ]
}

fn heisenberg_quotient(radius: usize) -> Result<QuotientBall> {
    let elems = crate::growth::ball_elements(&DiscreteHeisenberg, radius)?;
    let canon = |e: &[i64; 3]| *dihedral_images(e).iter().min().unwrap();
    let mut reps: Vec<([i64; 3], usize)> = elems.iter().filter(|(e, _)| canon(e) == *e).cloned().collect();
    reps.sort_by_key(|(e, l)| (*l, *e));
    let index: HashMap<[i64; 3], usize> = reps.iter().enumerate().map(|(i, (e, _))| (*e, i)).collect();
    let measures: Vec<f64> = reps
        .iter()
        .map(|(e, _)| {
            let mut imgs = dihedral_images(e).to_vec();
            imgs.sort_unstable();
            imgs.dedup();
            imgs.len() as f64
        })
        .collect();
    let h = DiscreteHeisenberg;
    let mut edges = Vec::new();
    for (i, (e, _)) in reps.iter().enumerate() {
        for s in h.generators() {
            if let Some(&j) = index.get(&canon(&h.mul(e, &s))) {
                if j != i {
                    edges.push((i as u32, j as u32, 0.5 * measures[i]));
                }
            }
        }
    }
    let word_length = reps.iter().map(|(_, l)| *l).collect();
    Ok(QuotientBall { graph: WeightedGraph::new(measures, edges)?, word_length, radius })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub family: String,
    pub p: f64,
    pub radius: usize,
    pub capacity: f64,
    pub iterations: usize,
    pub residual: f64,
    pub orbits: usize,
}

/// `cap_p(B(1), S(R))` for each radius, `B(1) = {e}` being the open unit ball, warm-starting each solve from the previous minimiser
/// extended by zero so the sequence is nonincreasing.
pub fn parabolicity_scan(family: ScanFamily, p: f64, radii: &[usize], opts: &SolveOptions) -> Result<Vec<ScanRow>> {
    if radii.windows(2).any(|w| w[1] <= w[0]) || radii.first().is_some_and(|&r| r < 2) {
        return Err(Error::InvalidArgument("radii must be increasing and at least 2".into()));
    }
    let Some(&r_max) = radii.last() else {
        return Ok(Vec::new());
    };
    let q = QuotientBall::build(family, r_max)?;
    let k: Vec<usize> = (0..q.graph.len()).filter(|&v| q.word_length[v] < 1).collect();
    let mut prev: Option<Vec<f64>> = None;
    let mut rows = Vec::new();
    for &r in radii {
        let boundary: Vec<usize> = (0..q.graph.len()).filter(|&v| q.word_length[v] >= r).collect();
        let g = q.graph.clone().with_boundary(&boundary);
        let res = graph_capacity_with(&g, &k, p, opts, prev.as_deref())?;
        rows.push(ScanRow {
            family: family.to_string(),
            p,
            radius: r,
            capacity: res.capacity,
            iterations: res.iterations,
            residual: res.residual,
            orbits: (0..g.len()).filter(|&v| q.word_length[v] <= r).count(),
        });
        prev = Some(res.u);
    }
    Ok(rows)
}

/// Double cover: vertex `v` lifts to `v` and `v + n`; crossed edges swap sheets.
pub fn double_cover(g: &WeightedGraph, crossed: &[bool]) -> WeightedGraph {
    let n = g.len() as u32;
    let mut edges = Vec::with_capacity(2 * g.edges.len());
    for (e, &(a, b, c)) in g.edges.iter().enumerate() {
        if crossed[e] {
            edges.push((a, b + n, c));
            edges.push((a + n, b, c));
        } else {
            edges.push((a, b, c));
            edges.push((a + n, b + n, c));
        }
    }
    let measures = g.measures.iter().chain(&g.measures).copied().collect();
    let boundary: Vec<usize> = g.boundary_vertices().iter().flat_map(|&v| [v, v + n as usize]).collect();
    WeightedGraph::new(measures, edges).expect("valid cover").with_boundary(&boundary)
}

/// Full preimage of `set` in a double cover of a graph with `n` vertices.
pub fn lift(set: &[usize], n: usize) -> Vec<usize> {
    set.iter().copied().chain(set.iter().map(|&v| v + n)).collect()
}

/// Condenser on the discrete Heisenberg Cayley graph: the segment `E = {(k,0,0) : 0 ≤ k ≤ len}`
/// inside its closed `radius`-neighbourhood `G`; the outer shell at distance `radius + 1` is the boundary.
#[derive(Debug, Clone)]
pub struct SegmentCondenser {
    pub graph: WeightedGraph,
    pub segment: Vec<usize>,
    pub neighborhood_size: usize,
    pub diameter: usize,
}

pub fn segment_condenser(len: usize, radius: usize) -> Result<SegmentCondenser> {
    if len == 0 {
        return Err(Error::InvalidArgument("segment must have positive diameter".into()));
    }
    let h = DiscreteHeisenberg;
    let gens = h.generators();
    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut dist: Vec<usize> = Vec::new();
    let mut elems: Vec<[i64; 3]> = Vec::new();
    let mut queue = VecDeque::new();
    for k in 0..=len as i64 {
        let e = [k, 0, 0];
        index.insert(e, elems.len());
        elems.push(e);
        dist.push(0);
        queue.push_back(e);
    }
    while let Some(e) = queue.pop_front() {
        let d = dist[index[&e]];
        if d > radius {
            continue;
        }
        for s in &gens {
            let n = h.mul(&e, s);
            if let Entry::Vacant(slot) = index.entry(n) {
                slot.insert(elems.len());
                elems.push(n);
                dist.push(d + 1);
                queue.push_back(n);
            }
        }
    }
    let mut edges = Vec::new();
    for (i, e) in elems.iter().enumerate() {
        for s in &gens {
            if let Some(&j) = index.get(&h.mul(e, s)) {
                if i < j {
                    edges.push((i as u32, j as u32));
                }
            }
        }
    }
    let boundary: Vec<usize> = (0..elems.len()).filter(|&i| dist[i] == radius + 1).collect();
    let graph = WeightedGraph::unit(elems.len(), edges)?.with_boundary(&boundary);
    Ok(SegmentCondenser { graph, segment: (0..=len).collect(), neighborhood_size: elems.len() - boundary.len(), diameter: len })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LowerBoundRow {
    pub length: usize,
    pub radius: usize,
    pub diameter: usize,
    pub neighborhood_size: usize,
    pub capacity: f64,
    /// `cap₄(G,E)³ μ(G) / diam(E)⁴`.
    pub ratio: f64,
}

/// `cap₄(G,E)³·μ(G)/diam(E)⁴` for segments of each length `L` inside their `L`-neighbourhoods.
pub fn capacity_lower_bound_check(lengths: &[usize], opts: &SolveOptions) -> Result<Vec<LowerBoundRow>> {
    lengths
        .iter()
        .map(|&l| {
            let sc = segment_condenser(l, l)?;
            let cap = graph_capacity_with(&sc.graph, &sc.segment, 4.0, opts, None)?.capacity;
            Ok(LowerBoundRow {
                length: l,
                radius: l,
                diameter: sc.diameter,
                neighborhood_size: sc.neighborhood_size,
                capacity: cap,
                ratio: cap.powi(3) * sc.neighborhood_size as f64 / (sc.diameter as f64).powi(4),
            })
        })
        .collect()
}
