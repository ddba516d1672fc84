use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

/// Upper bound on elements held during enumeration.
pub const MEMORY_GUARD: usize = 100_000_000;

/// A group given by unique normal forms and a symmetric generating set.
pub trait CayleyGroup {
    type Elem: Clone + Eq + Hash + Ord + Send + Sync + fmt::Debug;

    fn identity(&self) -> Self::Elem;
    /// Generators, closed under inversion.
    fn generators(&self) -> Vec<Self::Elem>;
    /// Right multiplication `g·s`.
    fn mul(&self, g: &Self::Elem, s: &Self::Elem) -> Self::Elem;
}

/// Free group on `rank` letters; elements are freely reduced words with letters `±(i+1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FreeGroup {
    pub rank: u8,
}

impl CayleyGroup for FreeGroup {
    type Elem = Vec<i8>;

    fn identity(&self) -> Vec<i8> {
        Vec::new()
    }

    fn generators(&self) -> Vec<Vec<i8>> {
        (1..=self.rank as i8).flat_map(|i| [vec![i], vec![-i]]).collect()
    }

    fn mul(&self, g: &Vec<i8>, s: &Vec<i8>) -> Vec<i8> {
        let mut out = g.clone();
        for &l in s {
            if out.last() == Some(&-l) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        out
    }
}

/// `Z^dim` with the standard basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ZLattice {
    pub dim: usize,
}

impl CayleyGroup for ZLattice {
    type Elem = Vec<i64>;

    fn identity(&self) -> Vec<i64> {
        vec![0; self.dim]
    }

    fn generators(&self) -> Vec<Vec<i64>> {
        let mut gens = Vec::with_capacity(2 * self.dim);
        for i in 0..self.dim {
            for s in [1, -1] {
                let mut e = vec![0; self.dim];
                e[i] = s;
                gens.push(e);
            }
        }
        gens
    }

    fn mul(&self, g: &Vec<i64>, s: &Vec<i64>) -> Vec<i64> {
        g.iter().zip(s).map(|(a, b)| a + b).collect()
    }
}

/// Integer points of the Heisenberg group under the same law as the continuous group,
/// marked by `(±1,0,0)`, `(0,±1,0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DiscreteHeisenberg;

impl DiscreteHeisenberg {
    pub fn product(g: &[i64; 3], s: &[i64; 3]) -> [i64; 3] {
        [g[0] + s[0], g[1] + s[1], g[2] + s[2] - 2 * g[0] * s[1] + 2 * g[1] * s[0]]
    }
}

impl CayleyGroup for DiscreteHeisenberg {
    type Elem = [i64; 3];

    fn identity(&self) -> [i64; 3] {
        [0; 3]
    }

    fn generators(&self) -> Vec<[i64; 3]> {
        vec![[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0]]
    }

    fn mul(&self, g: &[i64; 3], s: &[i64; 3]) -> [i64; 3] {
        Self::product(g, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MarkedGroup {
    FreeGroup(u8),
    ZSquared,
    ZLattice(usize),
    DiscreteHeisenberg,
}

impl fmt::Display for MarkedGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarkedGroup::FreeGroup(r) => write!(f, "F{r}"),
            MarkedGroup::ZSquared => write!(f, "Z2"),
            MarkedGroup::ZLattice(d) => write!(f, "Z{d}"),
            MarkedGroup::DiscreteHeisenberg => write!(f, "H3"),
        }
    }
}

impl FromStr for MarkedGroup {
    type Err = Error;

    /// `F<rank>`, `Z2`, `Z<dim>`, `H3`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("unknown group `{s}` (expected F<rank>, Z<dim> or H3)"));
        let (head, tail) = s.split_at(s.len().min(1));
        let n: usize = tail.parse().map_err(|_| bad())?;
        match (head, n) {
            ("F", 1..=100) => Ok(MarkedGroup::FreeGroup(n as u8)),
            ("Z", 2) => Ok(MarkedGroup::ZSquared),
            ("Z", 1..=16) => Ok(MarkedGroup::ZLattice(n)),
            ("H", 3) => Ok(MarkedGroup::DiscreteHeisenberg),
            _ => Err(bad()),
        }
    }
}

impl MarkedGroup {
    pub fn ball_sizes(&self, r_max: usize) -> Result<Vec<u64>> {
        ball_sizes(self, r_max)
    }

    /// Word-metric growth degree when polynomial, `None` for exponential growth.
    pub fn growth_degree(&self) -> Option<u32> {
        match self {
            MarkedGroup::FreeGroup(1) => Some(1),
            MarkedGroup::FreeGroup(_) => None,
            MarkedGroup::ZSquared => Some(2),
            MarkedGroup::ZLattice(d) => Some(*d as u32),
            MarkedGroup::DiscreteHeisenberg => Some(4),
        }
    }
}

/// Sphere sizes `|S(0)|, …, |S(r_max)|` by layered BFS. Only two spheres are held
/// at a time since Cayley-graph neighbours of `S(r)` lie in `S(r−1) ∪ S(r) ∪ S(r+1)`.
pub fn sphere_sizes_with<G: CayleyGroup>(g: &G, r_max: usize, guard: usize) -> Result<Vec<u64>> {
    let gens = g.generators();
    let mut prev: HashSet<G::Elem> = HashSet::new();
    let mut cur: HashSet<G::Elem> = HashSet::from([g.identity()]);
    let mut sizes = vec![1u64];
    for _ in 0..r_max {
        let mut next = HashSet::new();
        for e in &cur {
            for s in &gens {
                let n = g.mul(e, s);
                if !prev.contains(&n) && !cur.contains(&n) {
                    next.insert(n);
                }
            }
            if prev.len() + cur.len() + next.len() > guard {
                return Err(Error::MemoryGuard(guard));
            }
        }
        sizes.push(next.len() as u64);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(sizes)
}

/// Exact `|B(R)|` for `R = 0..=r_max`.
pub fn ball_sizes(g: &MarkedGroup, r_max: usize) -> Result<Vec<u64>> {
    ball_sizes_with_guard(g, r_max, MEMORY_GUARD)
}

pub fn ball_sizes_with_guard(g: &MarkedGroup, r_max: usize, guard: usize) -> Result<Vec<u64>> {
    let spheres = match *g {
        MarkedGroup::FreeGroup(rank) => sphere_sizes_with(&FreeGroup { rank }, r_max, guard)?,
        MarkedGroup::ZSquared => sphere_sizes_with(&ZLattice { dim: 2 }, r_max, guard)?,
        MarkedGroup::ZLattice(dim) => sphere_sizes_with(&ZLattice { dim }, r_max, guard)?,
        MarkedGroup::DiscreteHeisenberg => sphere_sizes_with(&DiscreteHeisenberg, r_max, guard)?,
    };
    Ok(spheres
        .iter()
        .scan(0u64, |acc, s| {
            *acc += s;
            Some(*acc)
        })
        .collect())
}

/// All elements of `B(r_max)` in BFS order (ties broken by normal-form order) with their word length.
pub fn ball_elements<G: CayleyGroup>(g: &G, r_max: usize) -> Result<Vec<(G::Elem, usize)>> {
    let gens = g.generators();
    let mut out = vec![(g.identity(), 0)];
    let mut prev: HashSet<G::Elem> = HashSet::new();
    let mut cur: HashSet<G::Elem> = HashSet::from([g.identity()]);
    for r in 1..=r_max {
        let mut next = HashSet::new();
        for e in &cur {
            for s in &gens {
                let n = g.mul(e, s);
                if !prev.contains(&n) && !cur.contains(&n) {
                    next.insert(n);
                }
            }
        }
        if out.len() + next.len() > MEMORY_GUARD {
            return Err(Error::MemoryGuard(MEMORY_GUARD));
        }
        let mut layer: Vec<G::Elem> = next.iter().cloned().collect();
        layer.sort();
        out.extend(layer.into_iter().map(|e| (e, r)));
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    /// Least-squares slope over the full window.
    pub slope: f64,
    /// Slopes over the lower and upper halves of the window.
    pub band: (f64, f64),
    /// Standard error of the full-window slope.
    pub std_error: f64,
    pub exponential: bool,
}

impl GrowthFit {
    /// The slope, or `+∞` when exponential growth was detected.
    pub fn exponent(&self) -> f64 {
        if self.exponential {
            f64::INFINITY
        } else {
            self.slope
        }
    }
}

fn ls_slope(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - my - slope * (x - mx)).powi(2)).sum();
    let se = if xs.len() > 2 { (rss / (n - 2.0) / sxx).sqrt() } else { 0.0 };
    (slope, se)
}

/// Relative increase of the upper-half slope over the lower-half slope that counts as exponential.
const EXPONENTIAL_SLOPE_GAIN: f64 = 0.25;

/// Log-log fit of `sizes[R]` over `R ∈ [r_lo, r_hi]` with an exponential-growth flag.
pub fn growth_fit_report(sizes: &[u64], r_lo: usize, r_hi: usize) -> Result<GrowthFit> {
    if r_lo < 2 || r_hi <= r_lo {
        return Err(Error::InvalidArgument(format!("need r_hi > r_lo ≥ 2, got [{r_lo}, {r_hi}]")));
    }
    if r_hi >= sizes.len() {
        return Err(Error::InvalidArgument(format!("window up to {r_hi} but only {} sizes", sizes.len())));
    }
    let pts = |a: usize, b: usize| -> (Vec<f64>, Vec<f64>) {
        (a..=b).map(|r| ((r as f64).ln(), (sizes[r] as f64).ln())).unzip()
    };
    let (xs, ys) = pts(r_lo, r_hi);
    let (slope, std_error) = ls_slope(&xs, &ys);
    let mid = (r_lo + r_hi) / 2;
    let (xl, yl) = pts(r_lo, mid.max(r_lo + 1));
    let (xu, yu) = pts(mid.min(r_hi - 1), r_hi);
    let lo = ls_slope(&xl, &yl).0;
    let hi = ls_slope(&xu, &yu).0;
    Ok(GrowthFit { slope, band: (lo, hi), std_error, exponential: hi > lo * (1.0 + EXPONENTIAL_SLOPE_GAIN) })
}

/// Slope of `log |B(R)|` against `log R`; `+∞` flags exponential growth.
pub fn growth_exponent_fit(sizes: &[u64], r_lo: usize, r_hi: usize) -> Result<f64> {
    Ok(growth_fit_report(sizes, r_lo, r_hi)?.exponent())
}
