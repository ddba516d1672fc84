//! Finite weighted graphs with vertex measures, conductances, and a
//! designated boundary.

use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    pub measures: Vec<f64>,
    /// `(a, b, conductance)` with `a < b`, no duplicates.
    pub edges: Vec<(u32, u32, f64)>,
    pub boundary: Vec<bool>,
    offsets: Vec<usize>,
    /// `(neighbor, edge index)`.
    adj: Vec<(u32, u32)>,
}

/// JSON form `{vertices, edges: [[a, b, c]], measures, K, boundary}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct GraphInstance {
    pub vertices: usize,
    pub edges: Vec<(u32, u32, f64)>,
    pub measures: Vec<f64>,
    #[serde(rename = "K", default)]
    pub k: Vec<u32>,
    #[serde(default)]
    pub boundary: Vec<u32>,
}

impl WeightedGraph {
    /// Merges parallel edges by summing conductances and drops loops.
    pub fn new(measures: Vec<f64>, edges: impl IntoIterator<Item = (u32, u32, f64)>) -> Result<Self> {
        let n = measures.len();
        if let Some(m) = measures.iter().find(|m| !(**m > 0.0) || !m.is_finite()) {
            return Err(Error::InvalidArgument(format!("vertex measures must be positive, got {m}")));
        }
        let mut list: Vec<(u32, u32, f64)> = Vec::new();
        for (a, b, c) in edges {
            if a as usize >= n || b as usize >= n {
                return Err(Error::InvalidArgument(format!("edge ({a},{b}) out of range for {n} vertices")));
            }
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidArgument(format!("conductances must be positive, got {c}")));
            }
            if a != b {
                list.push((a.min(b), a.max(b), c));
            }
        }
        list.sort_by_key(|x| (x.0, x.1));
        let mut merged: Vec<(u32, u32, f64)> = Vec::with_capacity(list.len());
        for e in list {
            match merged.last_mut() {
                Some(last) if last.0 == e.0 && last.1 == e.1 => last.2 += e.2,
                _ => merged.push(e),
            }
        }
        let mut deg = vec![0usize; n + 1];
        for &(a, b, _) in &merged {
            deg[a as usize + 1] += 1;
            deg[b as usize + 1] += 1;
        }
        for i in 0..n {
            deg[i + 1] += deg[i];
        }
        let offsets = deg.clone();
        let mut fill = deg;
        let mut adj = vec![(0u32, 0u32); 2 * merged.len()];
        for (k, &(a, b, _)) in merged.iter().enumerate() {
            adj[fill[a as usize]] = (b, k as u32);
            fill[a as usize] += 1;
            adj[fill[b as usize]] = (a, k as u32);
            fill[b as usize] += 1;
        }
        Ok(WeightedGraph { boundary: vec![false; n], measures, edges: merged, offsets, adj })
    }

    pub fn unit(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Result<Self> {
        Self::new(vec![1.0; n], edges.into_iter().map(|(a, b)| (a, b, 1.0)))
    }

    pub fn with_boundary(mut self, boundary: &[usize]) -> Self {
        for &b in boundary {
            self.boundary[b] = true;
        }
        self
    }

    pub fn len(&self) -> usize {
        self.measures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.measures.is_empty()
    }

    pub fn boundary_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.boundary[v]).collect()
    }

    /// `(neighbor, edge index)` pairs of `v`.
    pub fn neighbors(&self, v: usize) -> &[(u32, u32)] {
        &self.adj[self.offsets[v]..self.offsets[v + 1]]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    pub fn conductance(&self, e: usize) -> f64 {
        self.edges[e].2
    }

    pub fn measure_of(&self, set: &[bool]) -> f64 {
        self.measures.iter().zip(set).filter(|(_, &s)| s).map(|(m, _)| m).sum()
    }

    /// Hop distances from `sources`; `None` if unreachable. Stops expanding at `max_hops`.
    pub fn bfs(&self, sources: &[usize], max_hops: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            if dist[s].is_none() {
                dist[s] = Some(0);
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            if max_hops.is_some_and(|m| d >= m) {
                continue;
            }
            for &(w, _) in self.neighbors(v) {
                if dist[w as usize].is_none() {
                    dist[w as usize] = Some(d + 1);
                    queue.push_back(w as usize);
                }
            }
        }
        dist
    }

    /// Open hop ball `{x : d(v, x) < r}`, sorted.
    pub fn hop_ball(&self, v: usize, r: f64) -> Vec<usize> {
        if r <= 0.0 {
            return Vec::new();
        }
        let max = (r.ceil() as usize).saturating_sub(1);
        let d = self.bfs(&[v], Some(max));
        (0..self.len()).filter(|&x| d[x].is_some_and(|h| (h as f64) < r)).collect()
    }

    /// Connected component labels.
    pub fn components(&self) -> Vec<usize> {
        let mut label = vec![usize::MAX; self.len()];
        let mut next = 0;
        for s in 0..self.len() {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(v) = stack.pop() {
                for &(w, _) in self.neighbors(v) {
                    if label[w as usize] == usize::MAX {
                        label[w as usize] = next;
                        stack.push(w as usize);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// Weighted edge cut `Σ c(e)` over edges with both ends in `window`
    /// (all edges when `None`) and exactly one end in `set`.
    pub fn edge_cut(&self, set: &[bool], window: Option<&[bool]>) -> f64 {
        self.edges
            .iter()
            .filter(|(a, b, _)| window.is_none_or(|w| w[*a as usize] && w[*b as usize]))
            .filter(|(a, b, _)| set[*a as usize] != set[*b as usize])
            .map(|e| e.2)
            .sum()
    }

    pub fn to_instance(&self, k: &[usize]) -> GraphInstance {
        GraphInstance {
            vertices: self.len(),
            edges: self.edges.clone(),
            measures: self.measures.clone(),
            k: k.iter().map(|&v| v as u32).collect(),
            boundary: self.boundary_vertices().iter().map(|&v| v as u32).collect(),
        }
    }

    pub fn from_instance(inst: &GraphInstance) -> Result<(Self, Vec<usize>)> {
        if inst.measures.len() != inst.vertices {
            return Err(Error::InvalidArgument(format!(
                "{} measures for {} vertices",
                inst.measures.len(),
                inst.vertices
            )));
        }
        let boundary: Vec<usize> = inst.boundary.iter().map(|&b| b as usize).collect();
        if let Some(b) = boundary.iter().find(|&&b| b >= inst.vertices) {
            return Err(Error::InvalidArgument(format!("boundary vertex {b} out of range")));
        }
        let k: Vec<usize> = inst.k.iter().map(|&v| v as usize).collect();
        if let Some(v) = k.iter().find(|&&v| v >= inst.vertices) {
            return Err(Error::InvalidArgument(format!("K vertex {v} out of range")));
        }
        let g = WeightedGraph::new(inst.measures.clone(), inst.edges.iter().copied())?.with_boundary(&boundary);
        Ok((g, k))
    }

    /// Path on vertices `0, 1, …, len` with unit weights.
    pub fn path(len: usize) -> Self {
        WeightedGraph::unit(len + 1, (0..len as u32).map(|i| (i, i + 1))).expect("valid path")
    }

    /// Grid graph on `Π [0, dims[i])` with unit weights; vertex index is row-major.
    pub fn lattice_box(dims: &[usize]) -> Self {
        let n: usize = dims.iter().product();
        let mut edges = Vec::new();
        let mut stride = vec![1usize; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * dims[i + 1];
        }
        for v in 0..n {
            for (axis, &s) in stride.iter().enumerate() {
                let coord = (v / s) % dims[axis];
                if coord + 1 < dims[axis] {
                    edges.push((v as u32, (v + s) as u32));
                }
            }
        }
        WeightedGraph::unit(n, edges).expect("valid lattice box")
    }

    /// Connected random graph: a random spanning tree plus extra edges with probability `p`,
    /// conductances in `[0.5, 2)`, measures in `[0.5, 2)`.
    pub fn random_connected(n: usize, p: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut edges = Vec::new();
        for v in 1..n {
            let u = rng.gen_range(0..v);
            edges.push((u as u32, v as u32, rng.gen_range(0.5..2.0)));
        }
        for a in 0..n {
            for b in (a + 1)..n {
                if rng.gen_bool(p) {
                    edges.push((a as u32, b as u32, rng.gen_range(0.5..2.0)));
                }
            }
        }
        let measures = (0..n).map(|_| rng.gen_range(0.5..2.0)).collect();
        WeightedGraph::new(measures, edges).expect("valid random graph")
    }
}

/// Row-major index helpers for lattice boxes.
pub fn box_index(dims: &[usize], coord: &[usize]) -> usize {
    coord.iter().zip(dims).fold(0, |acc, (&c, &d)| acc * d + c)
}

/// Vertices of the sub-box `Π [lo_i, lo_i + side_i)` of a lattice box.
pub fn sub_box(dims: &[usize], lo: &[usize], side: &[usize]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut c = lo.to_vec();
    if side.contains(&0) {
        return out;
    }
    loop {
        out.push(box_index(dims, &c));
        let mut axis = dims.len();
        loop {
            if axis == 0 {
                out.sort_unstable();
                return out;
            }
            axis -= 1;
            c[axis] += 1;
            if c[axis] < lo[axis] + side[axis] {
                break;
            }
            c[axis] = lo[axis];
        }
    }
}

pub fn indicator(n: usize, set: &[usize]) -> Vec<bool> {
    let mut s = vec![false; n];
    for &v in set {
        s[v] = true;
    }
    s
}
