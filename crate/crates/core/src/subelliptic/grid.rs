use crate::error::{Error, Result};
use crate::heis::HeisPoint;
use serde::{Deserialize, Serialize};

/// Lattice `(i h, j h, k h²)` over inclusive index ranges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisGrid {
    pub h: f64,
    pub i: (i64, i64),
    pub j: (i64, i64),
    pub k: (i64, i64),
}

impl HeisGrid {
    pub fn new(h: f64, i: (i64, i64), j: (i64, i64), k: (i64, i64)) -> Result<Self> {
        if !(h > 0.0) || !h.is_finite() {
            return Err(Error::InvalidArgument(format!("spacing must be positive, got {h}")));
        }
        if i.1 < i.0 || j.1 < j.0 || k.1 < k.0 {
            return Err(Error::InvalidArgument("empty index range".into()));
        }
        Ok(HeisGrid { h, i, j, k })
    }

    /// Smallest grid containing the coordinate box `[lo, hi]`.
    pub fn covering(h: f64, lo: [f64; 3], hi: [f64; 3]) -> Result<Self> {
        let ht = h * h;
        let r = |a: f64, b: f64, s: f64| ((a / s - 1e-9).floor() as i64, (b / s + 1e-9).ceil() as i64);
        HeisGrid::new(h, r(lo[0], hi[0], h), r(lo[1], hi[1], h), r(lo[2], hi[2], ht))
    }

    pub fn ht(&self) -> f64 {
        self.h * self.h
    }

    pub fn cell_measure(&self) -> f64 {
        self.h.powi(4)
    }

    pub fn dims(&self) -> [usize; 3] {
        [(self.i.1 - self.i.0 + 1) as usize, (self.j.1 - self.j.0 + 1) as usize, (self.k.1 - self.k.0 + 1) as usize]
    }

    pub fn len(&self) -> usize {
        self.dims().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, i: i64, j: i64, k: i64) -> Option<usize> {
        if i < self.i.0 || i > self.i.1 || j < self.j.0 || j > self.j.1 || k < self.k.0 || k > self.k.1 {
            return None;
        }
        let [_, nj, nk] = self.dims();
        Some((((i - self.i.0) as usize * nj) + (j - self.j.0) as usize) * nk + (k - self.k.0) as usize)
    }

    pub fn ijk(&self, idx: usize) -> (i64, i64, i64) {
        let [_, nj, nk] = self.dims();
        let k = (idx % nk) as i64 + self.k.0;
        let j = ((idx / nk) % nj) as i64 + self.j.0;
        let i = (idx / (nk * nj)) as i64 + self.i.0;
        (i, j, k)
    }

    pub fn point(&self, idx: usize) -> HeisPoint {
        let (i, j, k) = self.ijk(idx);
        HeisPoint::new(i as f64 * self.h, j as f64 * self.h, k as f64 * self.ht())
    }

    /// Node reached from `idx` by the left-invariant flow `exp(h(aX + bY))`,
    /// which is exact on the lattice: `(i+a, j+b, k + 2(ja − ib))`.
    pub fn flow_step(&self, idx: usize, a: i64, b: i64) -> Option<usize> {
        let (i, j, k) = self.ijk(idx);
        self.index(i + a, j + b, k + 2 * (j * a - i * b))
    }

    /// Inverse of [`flow_step`](Self::flow_step).
    pub fn flow_step_back(&self, idx: usize, a: i64, b: i64) -> Option<usize> {
        let (i, j, k) = self.ijk(idx);
        let (pi, pj) = (i - a, j - b);
        self.index(pi, pj, k - 2 * (pj * a - pi * b))
    }

    /// Refinement by 2 horizontally and 4 vertically; dilation by ½ carries `self` into it.
    pub fn refine(&self) -> Self {
        HeisGrid { h: self.h / 2.0, i: (2 * self.i.0, 2 * self.i.1), j: (2 * self.j.0, 2 * self.j.1), k: (4 * self.k.0, 4 * self.k.1) }
    }

    fn degenerate(&self) -> [bool; 3] {
        self.dims().map(|n| n == 1)
    }

    /// Product trapezoid weights: ½ per axis on a face, 1 inside and on degenerate axes.
    pub fn trapezoid_weight(&self, idx: usize) -> f64 {
        let (i, j, k) = self.ijk(idx);
        let deg = self.degenerate();
        let face = |v: i64, r: (i64, i64), d: bool| if !d && (v == r.0 || v == r.1) { 0.5 } else { 1.0 };
        face(i, self.i, deg[0]) * face(j, self.j, deg[1]) * face(k, self.k, deg[2])
    }

    pub fn is_interior(&self, idx: usize) -> bool {
        let (i, j, k) = self.ijk(idx);
        let deg = self.degenerate();
        let inside = |v: i64, r: (i64, i64), d: bool| d || (v > r.0 && v < r.1);
        inside(i, self.i, deg[0]) && inside(j, self.j, deg[1]) && inside(k, self.k, deg[2])
    }
}

/// Scalar field on a grid with per-node boundary data (`Some(v)` = Dirichlet).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubellipticField {
    pub grid: HeisGrid,
    pub values: Vec<f64>,
    pub dirichlet: Vec<Option<f64>>,
}

impl SubellipticField {
    pub fn from_fn(grid: HeisGrid, f: impl Fn(&HeisPoint) -> f64) -> Result<Self> {
        let values: Vec<f64> = (0..grid.len()).map(|n| f(&grid.point(n))).collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("field value"));
        }
        Ok(SubellipticField { grid, dirichlet: vec![None; values.len()], values })
    }

    pub fn constant(grid: HeisGrid, c: f64) -> Self {
        SubellipticField { grid, values: vec![c; grid.len()], dirichlet: vec![None; grid.len()] }
    }

    fn coord_derivative(&self, idx: usize, axis: usize, one_sided: bool) -> Result<f64> {
        let g = &self.grid;
        if g.degenerate()[axis] {
            return Ok(0.0);
        }
        let (i, j, k) = g.ijk(idx);
        let step = if axis == 2 { g.ht() } else { g.h };
        let at = |s: i64| match axis {
            0 => g.index(i + s, j, k),
            1 => g.index(i, j + s, k),
            _ => g.index(i, j, k + s),
        };
        let v = |n: usize| self.values[n];
        match (at(-1), at(1)) {
            (Some(a), Some(b)) => Ok((v(b) - v(a)) / (2.0 * step)),
            (None, Some(b)) if one_sided => Ok((v(b) - v(idx)) / step),
            (Some(a), None) if one_sided => Ok((v(idx) - v(a)) / step),
            _ => Err(Error::InvalidArgument(format!("node {idx} has no central stencil along axis {axis}"))),
        }
    }

    fn gradient_impl(&self, idx: usize, one_sided: bool) -> Result<(f64, f64)> {
        let p = self.grid.point(idx);
        let dx = self.coord_derivative(idx, 0, one_sided)?;
        let dy = self.coord_derivative(idx, 1, one_sided)?;
        let dt = self.coord_derivative(idx, 2, one_sided)?;
        Ok((dx + 2.0 * p.y * dt, dy - 2.0 * p.x * dt))
    }

    /// `(Xu, Yu)` by central differences (steps `h`, `h²`); interior nodes only.
    pub fn horizontal_gradient(&self, idx: usize) -> Result<(f64, f64)> {
        self.gradient_impl(idx, false)
    }

    /// As [`horizontal_gradient`](Self::horizontal_gradient) with one-sided differences on faces.
    pub fn horizontal_gradient_one_sided(&self, idx: usize) -> (f64, f64) {
        self.gradient_impl(idx, true).expect("one-sided stencil always exists")
    }
}

pub fn horizontal_gradient(f: &SubellipticField, idx: usize) -> Result<(f64, f64)> {
    f.horizontal_gradient(idx)
}

/// `Σ w_n |∇_H u(n)|^p h⁴` with trapezoid weights and one-sided differences on faces.
pub fn p_energy(f: &SubellipticField, p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!("exponent must be at least 1, got {p}")));
    }
    let g = &f.grid;
    let sum: f64 = (0..g.len())
        .map(|n| {
            let (a, b) = f.horizontal_gradient_one_sided(n);
            g.trapezoid_weight(n) * (a * a + b * b).powf(p / 2.0)
        })
        .sum();
    Ok(sum * g.cell_measure())
}

/// Domain `Ω` and compact set `C ⊆ Ω` on a grid; admissible fields are 1 on `C`, 0 off `Ω`.
#[derive(Debug, Clone, PartialEq)]
pub struct Condenser {
    pub grid: HeisGrid,
    pub omega: Vec<bool>,
    pub compact: Vec<bool>,
    pub p: f64,
}

impl Condenser {
    pub fn new(grid: HeisGrid, omega: Vec<bool>, compact: Vec<bool>, p: f64) -> Result<Self> {
        if omega.len() != grid.len() || compact.len() != grid.len() {
            return Err(Error::InvalidArgument("mask length does not match grid".into()));
        }
        if !(1.5..=8.0).contains(&p) {
            return Err(Error::InvalidArgument(format!("exponent must lie in [1.5, 8], got {p}")));
        }
        if !compact.iter().any(|&c| c) {
            return Err(Error::InvalidArgument("compact set is empty".into()));
        }
        if compact.iter().zip(&omega).any(|(&c, &o)| c && !o) {
            return Err(Error::InvalidArgument("compact set is not inside the domain".into()));
        }
        let deg = grid.degenerate();
        for n in (0..grid.len()).filter(|&n| omega[n]) {
            let bad_x = !deg[0] && grid.flow_step_back(n, 1, 0).is_none();
            let bad_y = !deg[1] && grid.flow_step_back(n, 0, 1).is_none();
            if bad_x || bad_y {
                return Err(Error::InvalidArgument(format!("domain node {n} touches the grid edge")));
            }
        }
        Ok(Condenser { grid, omega, compact, p })
    }

    /// Domain and compact set as sub-level sets of a node predicate pair.
    pub fn from_predicates(grid: HeisGrid, omega: impl Fn(&HeisPoint) -> bool, compact: impl Fn(&HeisPoint) -> bool, p: f64) -> Result<Self> {
        let pts: Vec<HeisPoint> = (0..grid.len()).map(|n| grid.point(n)).collect();
        Condenser::new(grid, pts.iter().map(&omega).collect(), pts.iter().map(|q| compact(q) && omega(q)).collect(), p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizeResult {
    pub field: SubellipticField,
    pub capacity: f64,
    pub sweeps: usize,
    pub rel_decrease: f64,
}

/// Flow-edge energy `Σ_n h⁴ (|u(Xn)−u(n)|² + |u(Yn)−u(n)|²)^{p/2} / h^p`, values off the grid = 0.
struct FlowEnergy<'a> {
    grid: &'a HeisGrid,
    p: f64,
    fwd: Vec<[Option<usize>; 2]>,
    back: Vec<[Option<usize>; 2]>,
    active: [bool; 2],
}

impl<'a> FlowEnergy<'a> {
    fn new(grid: &'a HeisGrid, p: f64) -> Self {
        let deg = grid.degenerate();
        let active = [!deg[0], !deg[1]];
        let fwd = (0..grid.len()).map(|n| [grid.flow_step(n, 1, 0), grid.flow_step(n, 0, 1)]).collect();
        let back = (0..grid.len()).map(|n| [grid.flow_step_back(n, 1, 0), grid.flow_step_back(n, 0, 1)]).collect();
        FlowEnergy { grid, p, fwd, back, active }
    }

    fn diffs(&self, u: &[f64], n: usize) -> [f64; 2] {
        let at = |m: Option<usize>| m.map_or(0.0, |m| u[m]);
        let mut d = [0.0; 2];
        for (a, item) in d.iter_mut().enumerate() {
            if self.active[a] {
                *item = (at(self.fwd[n][a]) - u[n]) / self.grid.h;
            }
        }
        d
    }

    fn term(&self, d: [f64; 2]) -> f64 {
        (d[0] * d[0] + d[1] * d[1]).powf(self.p / 2.0)
    }

    fn total(&self, u: &[f64]) -> f64 {
        (0..u.len()).map(|n| self.term(self.diffs(u, n))).sum::<f64>() * self.grid.cell_measure()
    }

    /// Derivative of the energy in `u[v]` (up to the factor `h⁴`).
    fn local_derivative(&self, u: &[f64], v: usize) -> f64 {
        let h = self.grid.h;
        let w = |d: [f64; 2]| (d[0] * d[0] + d[1] * d[1]).powf(self.p / 2.0 - 1.0) * self.p;
        let d = self.diffs(u, v);
        let own = if d == [0.0, 0.0] { 0.0 } else { -w(d) * (d[0] + d[1]) / h };
        let mut total = own;
        for a in 0..2 {
            if !self.active[a] {
                continue;
            }
            if let Some(m) = self.back[v][a] {
                let dm = self.diffs(u, m);
                if dm != [0.0, 0.0] {
                    total += w(dm) * dm[a] / h;
                }
            }
        }
        total
    }
}

/// Nonlinear Gauss–Seidel: each free node solves its 1-D convex problem on `[0, 1]` by bisection.
pub fn minimize_p_energy(c: &Condenser, tol: f64, max_sweeps: usize) -> Result<MinimizeResult> {
    let grid = &c.grid;
    let n = grid.len();
    let free: Vec<usize> = (0..n).filter(|&v| c.omega[v] && !c.compact[v]).collect();
    let mut u: Vec<f64> = (0..n).map(|v| if c.compact[v] { 1.0 } else { 0.0 }).collect();

    // Harmonic-like start: quadratic sweeps have closed-form node updates.
    let quad = FlowEnergy::new(grid, 2.0);
    for _ in 0..20 {
        for &v in &free {
            u[v] = 0.0;
            let g0 = quad.local_derivative(&u, v);
            u[v] = 1.0;
            let g1 = quad.local_derivative(&u, v);
            u[v] = if g1 != g0 { (-g0 / (g1 - g0)).clamp(0.0, 1.0) } else { 0.0 };
        }
    }

    let fe = FlowEnergy::new(grid, c.p);
    let mut energy = fe.total(&u);
    let mut rel = f64::INFINITY;
    for sweep in 1..=max_sweeps {
        for &v in &free {
            let (mut lo, mut hi) = (0.0f64, 1.0f64);
            let deriv = |x: f64, u: &mut [f64]| {
                u[v] = x;
                fe.local_derivative(u, v)
            };
            if deriv(lo, &mut u) >= 0.0 {
                u[v] = lo;
                continue;
            }
            if deriv(hi, &mut u) <= 0.0 {
                u[v] = hi;
                continue;
            }
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if deriv(mid, &mut u) > 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            u[v] = 0.5 * (lo + hi);
        }
        let next = fe.total(&u);
        rel = if energy > 0.0 { (energy - next) / energy } else { 0.0 };
        energy = next;
        if rel.abs() < tol {
            let field = SubellipticField {
                grid: *grid,
                dirichlet: (0..n).map(|v| if c.compact[v] { Some(1.0) } else if !c.omega[v] { Some(0.0) } else { None }).collect(),
                values: u,
            };
            return Ok(MinimizeResult { field, capacity: energy, sweeps: sweep, rel_decrease: rel });
        }
    }
    Err(Error::NoConvergence { what: "minimize_p_energy", iterations: max_sweeps, residual: rel })
}
