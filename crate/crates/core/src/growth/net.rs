use super::group::{ball_elements, CayleyGroup};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

pub type Oracle = Arc<dyn Fn(usize, usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum Metric {
    /// Distance between net points `i`, `j`.
    Oracle(Oracle),
    /// Hop distance in the neighbour graph scaled by `step`.
    Graph { step: f64 },
}

/// Maximal ε-separated point set with `N(y) = {x : 0 < d(y,x) ≤ 2ε}`.
#[derive(Clone)]
pub struct Net {
    /// Index of each net point in the sample list it was built from.
    pub points: Vec<usize>,
    pub eps: f64,
    pub neighbors: Vec<Vec<u32>>,
    metric: Metric,
}

impl fmt::Debug for Net {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Net").field("len", &self.points.len()).field("eps", &self.eps).finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FiniteSubsetStats {
    pub size: usize,
    pub boundary_size: usize,
    pub ip_ratio: f64,
}

/// Greedy pass in input order: keep a sample iff it is at distance `≥ eps` from every kept one.
pub fn build_net<P, M>(samples: &[P], metric: M, eps: f64) -> Result<Net>
where
    P: Clone + Send + Sync + 'static,
    M: Fn(&P, &P) -> f64 + Send + Sync + 'static,
{
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let mut points: Vec<usize> = Vec::new();
    for (i, s) in samples.iter().enumerate() {
        if points.iter().all(|&j| metric(&samples[j], s) >= eps) {
            points.push(i);
        }
    }
    let kept: Arc<Vec<P>> = Arc::new(points.iter().map(|&i| samples[i].clone()).collect());
    let metric = Arc::new(metric);
    let n = kept.len();
    let mut neighbors = vec![Vec::new(); n];
    for i in 0..n {
        for j in (i + 1)..n {
            if metric(&kept[i], &kept[j]) <= 2.0 * eps {
                neighbors[i].push(j as u32);
                neighbors[j].push(i as u32);
            }
        }
    }
    let oracle: Oracle = Arc::new(move |i, j| metric(&kept[i], &kept[j]));
    Ok(Net { points, eps, neighbors, metric: Metric::Oracle(oracle) })
}

/// Ball of a Cayley graph as a net with `ε = 1/2`, so `N(y)` is the generator neighbourhood
/// and the combinatorial distance is the word distance within the enumerated ball.
#[derive(Debug, Clone)]
pub struct CayleyNet<E> {
    pub net: Net,
    pub elements: Vec<E>,
    pub word_length: Vec<usize>,
}

impl<E: Clone + Eq + std::hash::Hash> CayleyNet<E> {
    pub fn index_of(&self) -> HashMap<E, usize> {
        self.elements.iter().cloned().enumerate().map(|(i, e)| (e, i)).collect()
    }

    /// Net points of word length at most `r`.
    pub fn word_ball(&self, r: usize) -> Vec<usize> {
        (0..self.elements.len()).filter(|&i| self.word_length[i] <= r).collect()
    }
}

pub fn cayley_net<G: CayleyGroup>(g: &G, r_max: usize) -> Result<CayleyNet<G::Elem>> {
    let elems = ball_elements(g, r_max)?;
    let (elements, word_length): (Vec<_>, Vec<_>) = elems.into_iter().unzip();
    let index: HashMap<&G::Elem, usize> = elements.iter().enumerate().map(|(i, e)| (e, i)).collect();
    let gens = g.generators();
    let neighbors = elements
        .iter()
        .map(|e| {
            let mut nb: Vec<u32> = gens.iter().filter_map(|s| index.get(&g.mul(e, s)).map(|&j| j as u32)).collect();
            nb.sort_unstable();
            nb.dedup();
            nb
        })
        .collect();
    let net = Net { points: (0..elements.len()).collect(), eps: 0.5, neighbors, metric: Metric::Graph { step: 1.0 } };
    Ok(CayleyNet { net, elements, word_length })
}

impl Net {
    /// Net with an explicit distance oracle on net indices.
    pub fn from_parts(points: Vec<usize>, eps: f64, neighbors: Vec<Vec<u32>>, oracle: Oracle) -> Self {
        Net { points, eps, neighbors, metric: Metric::Oracle(oracle) }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient distance between net points `i` and `j`.
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        match &self.metric {
            Metric::Oracle(d) => d(i, j),
            Metric::Graph { step } => combinatorial_distance(self, i, j).map_or(f64::INFINITY, |h| h as f64 * step),
        }
    }

    /// Net points `x` with `d(y, x) < r`, sorted.
    pub fn metric_ball(&self, y: usize, r: f64) -> Vec<usize> {
        match &self.metric {
            Metric::Oracle(d) => (0..self.len()).filter(|&x| d(y, x) < r).collect(),
            Metric::Graph { step } => {
                let reach = (r / step).ceil() as usize;
                let dist = hop_distances(self, &[y], Some(reach));
                (0..self.len()).filter(|&x| dist[x].is_some_and(|h| (h as f64) * step < r)).collect()
            }
        }
    }

    pub fn is_symmetric(&self) -> bool {
        self.neighbors
            .iter()
            .enumerate()
            .all(|(i, nb)| nb.iter().all(|&j| self.neighbors[j as usize].binary_search(&(i as u32)).is_ok()))
    }

    /// Minimum pairwise distance over distinct net points (`∞` for fewer than two).
    pub fn min_separation(&self) -> f64 {
        let n = self.len();
        (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).map(|(i, j)| self.distance(i, j)).fold(f64::INFINITY, f64::min)
    }
}

/// Every sample has some net point within distance `< eps`.
pub fn is_maximal<P, M: Fn(&P, &P) -> f64>(net: &Net, samples: &[P], metric: M) -> bool {
    samples.iter().all(|s| net.points.iter().any(|&p| metric(&samples[p], s) < net.eps))
}

fn hop_distances(net: &Net, sources: &[usize], max_hops: Option<usize>) -> Vec<Option<usize>> {
    let mut dist = vec![None; net.len()];
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
        for &w in &net.neighbors[v] {
            if dist[w as usize].is_none() {
                dist[w as usize] = Some(d + 1);
                queue.push_back(w as usize);
            }
        }
    }
    dist
}

/// Chain length between net points; `None` when disconnected.
pub fn combinatorial_distance(net: &Net, y: usize, x: usize) -> Option<usize> {
    if y == x {
        return Some(0);
    }
    let mut dist = vec![usize::MAX; net.len()];
    let mut queue = VecDeque::from([y]);
    dist[y] = 0;
    while let Some(v) = queue.pop_front() {
        for &w in &net.neighbors[v] {
            let w = w as usize;
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                if w == x {
                    return Some(dist[w]);
                }
                queue.push_back(w);
            }
        }
    }
    None
}

/// `∂S = {y : δ(y, S) = 1}`, sorted.
pub fn boundary(net: &Net, set: &[usize]) -> Vec<usize> {
    let mut inside = vec![false; net.len()];
    for &s in set {
        inside[s] = true;
    }
    let mut mark = vec![false; net.len()];
    for &s in set {
        for &w in &net.neighbors[s] {
            if !inside[w as usize] {
                mark[w as usize] = true;
            }
        }
    }
    (0..net.len()).filter(|&v| mark[v]).collect()
}

/// `max_y ♯(B(y, r) ∩ Y)`.
pub fn uniformity_stat(net: &Net, r: f64) -> usize {
    (0..net.len()).into_par_iter().map(|y| net.metric_ball(y, r).len()).max().unwrap_or(0)
}

pub fn subset_stats(net: &Net, set: &[usize], d: f64) -> Result<FiniteSubsetStats> {
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty subset".into()));
    }
    let b = boundary(net, set).len();
    if b == 0 {
        return Err(Error::EmptyBoundary);
    }
    let size = set.len();
    Ok(FiniteSubsetStats { size, boundary_size: b, ip_ratio: (size as f64).powf((d - 1.0) / d) / b as f64 })
}

/// Per-subset statistics over a family, evaluated in parallel.
pub fn rough_ip_profile(net: &Net, family: &[Vec<usize>], d: f64) -> Result<Vec<FiniteSubsetStats>> {
    if !(d >= 1.0) {
        return Err(Error::InvalidArgument(format!("dimension must be at least 1, got {d}")));
    }
    family.par_iter().map(|s| subset_stats(net, s, d)).collect()
}

/// Smallest `C` with `(♯S)^{(d−1)/d} ≤ C ♯∂S` over the family.
pub fn rough_ip_constant(net: &Net, family: &[Vec<usize>], d: f64) -> Result<f64> {
    Ok(rough_ip_profile(net, family, d)?.iter().map(|s| s.ip_ratio).fold(0.0, f64::max))
}

/// Combinatorial balls `{x : δ(center, x) ≤ r}` for each radius.
pub fn combinatorial_balls(net: &Net, center: usize, radii: &[usize]) -> Vec<Vec<usize>> {
    let dist = hop_distances(net, &[center], radii.iter().max().copied());
    radii
        .iter()
        .map(|&r| (0..net.len()).filter(|&x| dist[x].is_some_and(|h| h <= r)).collect())
        .collect()
}

/// Connected clusters grown from random seeds by attaching random boundary points.
/// Points outside `allowed` are never used.
pub fn random_clusters(net: &Net, allowed: &[bool], count: usize, max_size: usize, seed: u64) -> Vec<Vec<usize>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool: Vec<usize> = (0..net.len()).filter(|&v| allowed[v]).collect();
    if pool.is_empty() || max_size == 0 {
        return Vec::new();
    }
    (0..count)
        .map(|_| {
            let target = rng.gen_range(1..=max_size);
            let start = pool[rng.gen_range(0..pool.len())];
            let mut inside = vec![false; net.len()];
            inside[start] = true;
            let mut set = vec![start];
            let mut frontier: Vec<usize> = Vec::new();
            let push = |v: usize, inside: &[bool], frontier: &mut Vec<usize>| {
                for &w in &net.neighbors[v] {
                    let w = w as usize;
                    if allowed[w] && !inside[w] {
                        frontier.push(w);
                    }
                }
            };
            push(start, &inside, &mut frontier);
            while set.len() < target {
                frontier.retain(|&w| !inside[w]);
                if frontier.is_empty() {
                    break;
                }
                let w = frontier.swap_remove(rng.gen_range(0..frontier.len()));
                inside[w] = true;
                set.push(w);
                push(w, &inside, &mut frontier);
            }
            set.sort_unstable();
            set
        })
        .collect()
}
