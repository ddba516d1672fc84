use heislab_core::graph::WeightedGraph;
use heislab_core::heis::HeisPoint;
use heislab_core::scalar::Polynomial;
use heislab_core::subelliptic::*;
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn box_grid(h: f64, n: i64, nt: i64) -> HeisGrid {
    HeisGrid::new(h, (0, n), (0, n), (0, nt)).unwrap()
}

fn poly(f: &str) -> Polynomial {
    Polynomial::library(3).into_iter().find(|(n, _)| n == f).unwrap().1
}

#[test]
fn gradient_exact_on_linear_and_vertical() {
    let g = HeisGrid::new(0.25, (-4, 4), (-4, 4), (-8, 8)).unwrap();
    let fx = SubellipticField::from_fn(g, |p| p.x).unwrap();
    let ft = SubellipticField::from_fn(g, |p| p.t).unwrap();
    let fc = SubellipticField::from_fn(g, |p| p.t - 2.0 * p.x * p.y).unwrap();
    for n in (0..g.len()).filter(|&n| g.is_interior(n)) {
        let q = g.point(n);
        assert_eq!(horizontal_gradient(&fx, n).unwrap(), (1.0, 0.0));
        let (a, b) = horizontal_gradient(&ft, n).unwrap();
        assert!((a - 2.0 * q.y).abs() < 1e-12 && (b + 2.0 * q.x).abs() < 1e-12);
        let (a, b) = horizontal_gradient(&fc, n).unwrap();
        assert!(a.abs() < 1e-12 && (b + 4.0 * q.x).abs() < 1e-12);
    }
    let corner = g.index(-4, -4, -8).unwrap();
    assert!(horizontal_gradient(&fx, corner).is_err());
    assert_eq!(fx.horizontal_gradient_one_sided(corner), (1.0, 0.0));
}

#[test]
fn dilation_maps_grid_into_refinement() {
    let g = HeisGrid::new(0.5, (-2, 3), (0, 2), (-1, 4)).unwrap();
    let r = g.refine();
    assert_eq!(r.ht(), r.h * r.h);
    for n in 0..g.len() {
        let q = g.point(n).dilate(0.5);
        let (i, j, k) = g.ijk(n);
        let m = r.index(i, j, k).unwrap();
        assert!(r.point(m).coord_dist(&q) < 1e-15);
    }
}

#[test]
fn p_energy_examples() {
    let g = box_grid(1.0 / 16.0, 16, 256);
    assert_eq!(p_energy(&SubellipticField::constant(g, 3.0), 4.0).unwrap(), 0.0);
    let fx = SubellipticField::from_fn(g, |p| p.x).unwrap();
    assert!((p_energy(&fx, 4.0).unwrap() - 1.0).abs() < 0.02);
    let u = SubellipticField::from_fn(g, |p| p.x * p.y + p.t).unwrap();
    let mut v = u.clone();
    v.values.iter_mut().for_each(|x| *x *= 1.7);
    let ratio = p_energy(&v, 3.0).unwrap() / p_energy(&u, 3.0).unwrap();
    assert!((ratio - 1.7f64.powi(3)).abs() < 1e-10);
}

#[test]
fn p_energy_convex_on_random_pairs() {
    let g = box_grid(0.25, 4, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        let p = rng.gen_range(1.0..5.0);
        let mut u = SubellipticField::constant(g, 0.0);
        let mut v = u.clone();
        u.values.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        v.values.iter_mut().for_each(|x| *x = rng.gen_range(-1.0..1.0));
        let mut m = u.clone();
        m.values.iter_mut().zip(&v.values).for_each(|(a, b)| *a = 0.5 * (*a + b));
        let (eu, ev, em) = (p_energy(&u, p).unwrap(), p_energy(&v, p).unwrap(), p_energy(&m, p).unwrap());
        assert!(em <= 0.5 * (eu + ev) + 1e-12);
    }
}

fn chain_condenser(r: i64, omega_half: i64, p: f64) -> Condenser {
    let g = HeisGrid::new(1.0, (-r, r), (0, 0), (0, 0)).unwrap();
    Condenser::from_predicates(g, |q| q.x.abs() < omega_half as f64, |q| q.x == 0.0, p).unwrap()
}

#[test]
fn chain_capacity_is_two_over_length() {
    for r in [2, 5, 10] {
        let res = minimize_p_energy(&chain_condenser(r, r, 2.0), 1e-12, 100_000).unwrap();
        assert!((res.capacity - 2.0 / r as f64).abs() < 1e-8, "R={r}: {}", res.capacity);
    }
    let res = minimize_p_energy(&chain_condenser(6, 6, 3.0), 1e-12, 100_000).unwrap();
    assert!((res.capacity - 2.0 * 6f64.powi(-2)).abs() < 1e-7);
}

#[test]
fn grid_condenser_forced_and_monotone() {
    let g = HeisGrid::new(0.25, (-6, 6), (-6, 6), (-40, 40)).unwrap();
    let ball = |r: f64| move |q: &HeisPoint| q.x.abs().max(q.y.abs()).max(q.t.abs().sqrt()) < r;
    let full = Condenser::from_predicates(g, ball(0.8), ball(0.8), 4.0).unwrap();
    let res = minimize_p_energy(&full, 1e-9, 1000).unwrap();
    assert!(res.field.values.iter().zip(&full.omega).all(|(&v, &o)| if o { v == 1.0 } else { v == 0.0 }));
    assert!(res.capacity > 0.0);
    let mut prev = f64::INFINITY;
    for r in [0.6, 0.9, 1.2] {
        let c = Condenser::from_predicates(g, ball(r), ball(0.3), 4.0).unwrap();
        let cap = minimize_p_energy(&c, 1e-9, 100_000).unwrap().capacity;
        assert!(cap < prev, "r={r}: {cap} vs {prev}");
        prev = cap;
    }
}

#[test]
fn condenser_rejects_bad_input() {
    let g = box_grid(0.5, 4, 8);
    let all = vec![true; g.len()];
    assert!(Condenser::new(g, all.clone(), all.clone(), 4.0).is_err());
    let none = vec![false; g.len()];
    assert!(Condenser::new(g, none.clone(), none, 4.0).is_err());
    assert!(Condenser::new(g, all.clone(), all, 9.0).is_err());
}

#[test]
fn path_capacity_power_law() {
    for p in [1.5, 2.0, 3.0, 4.0] {
        for r in [1usize, 2, 5, 16, 32] {
            let g = WeightedGraph::path(r).with_boundary(&[r]);
            let cap = graph_capacity(&g, &[0], p, 1e-14).unwrap();
            let exact = (r as f64).powf(1.0 - p);
            assert!((cap - exact).abs() < 1e-6 * exact.max(1e-3), "p={p} R={r}: {cap} vs {exact}");
        }
    }
}

#[test]
fn coordinate_descent_agrees_with_newton() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..10 {
        let g = WeightedGraph::random_connected(20, 0.2, rng.gen());
        let g = g.with_boundary(&[19]);
        let p = rng.gen_range(1.5..4.0);
        let newton = graph_capacity(&g, &[0], p, 1e-13).unwrap();
        let opts = SolveOptions { tol: 1e-13, max_iter: 100_000, method: Method::CoordinateDescent, ..Default::default() };
        let cd = graph_capacity_with(&g, &[0], p, &opts, None).unwrap().capacity;
        assert!((newton - cd).abs() < 1e-6 * newton, "{newton} vs {cd}");
    }
}

#[test]
fn parallel_paths_add_and_disconnection_gives_zero() {
    let r = 7;
    let mut edges: Vec<(u32, u32)> = (0..r as u32).map(|i| (i, i + 1)).collect();
    // Second path 0 → r+1 → … → 2r−1 → r of length r.
    let mut prev = 0u32;
    for i in 0..r - 1 {
        let v = (r + 1 + i) as u32;
        edges.push((prev, v));
        prev = v;
    }
    edges.push((prev, r as u32));
    let g = WeightedGraph::unit(2 * r, edges).unwrap().with_boundary(&[r]);
    let cap = graph_capacity(&g, &[0], 3.0, 1e-14).unwrap();
    assert!((cap - 2.0 * (r as f64).powi(-2)).abs() < 1e-9);
    let split = WeightedGraph::unit(4, vec![(0, 1), (2, 3)]).unwrap().with_boundary(&[3]);
    assert_eq!(graph_capacity(&split, &[0], 2.0, 1e-12).unwrap(), 0.0);
    assert!(graph_capacity(&split, &[3], 2.0, 1e-12).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]
    #[test]
    fn capacity_monotone_in_k_and_domain(seed in any::<u64>(), p in 1.5f64..4.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 24;
        let g = WeightedGraph::random_connected(n, 0.15, seed);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng);
        let (k, rest) = order.split_at(2);
        let (k_more, rest) = rest.split_at(2);
        let bdry: Vec<usize> = rest[..4].to_vec();
        let small = graph_capacity(&g.clone().with_boundary(&bdry), k, p, 1e-13).unwrap();
        let kk: Vec<usize> = k.iter().chain(k_more).copied().collect();
        let bigger_k = graph_capacity(&g.clone().with_boundary(&bdry), &kk, p, 1e-13).unwrap();
        prop_assert!(small <= bigger_k * (1.0 + 1e-8) + 1e-12);
        // Removing boundary vertices enlarges the domain.
        let shrunk = graph_capacity(&g.clone().with_boundary(&bdry[..2]), k, p, 1e-13).unwrap();
        prop_assert!(shrunk <= small * (1.0 + 1e-8) + 1e-12);
    }
}

#[test]
fn capacity_isomorphism_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..10 {
        let n = 30;
        let g = WeightedGraph::random_connected(n, 0.12, rng.gen());
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut rng);
        let edges: Vec<(u32, u32, f64)> = g.edges.iter().map(|&(a, b, c)| (perm[a as usize] as u32, perm[b as usize] as u32, c)).collect();
        let mut measures = vec![0.0; n];
        for v in 0..n {
            measures[perm[v]] = g.measures[v];
        }
        let h = WeightedGraph::new(measures, edges).unwrap();
        let a = graph_capacity(&g.clone().with_boundary(&[n - 1, n - 2]), &[0, 1], 4.0, 1e-13).unwrap();
        let b = graph_capacity(&h.with_boundary(&[perm[n - 1], perm[n - 2]]), &[perm[0], perm[1]], 4.0, 1e-13).unwrap();
        assert!((a - b).abs() < 1e-9 * a);
    }
}

#[test]
fn double_cover_capacity_bound() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10 {
        let n = 20;
        let g = WeightedGraph::random_connected(n, 0.2, rng.gen()).with_boundary(&[n - 1]);
        let crossed: Vec<bool> = (0..g.edges.len()).map(|_| rng.gen_bool(0.5)).collect();
        let cover = double_cover(&g, &crossed);
        for p in [2.0, 4.0] {
            let base = graph_capacity(&g, &[0], p, 1e-13).unwrap();
            let up = graph_capacity(&cover, &lift(&[0], n), p, 1e-13).unwrap();
            assert!(base <= 2.0 * up * (1.0 + 1e-9));
            assert!((up - 2.0 * base).abs() < 1e-7 * up);
        }
    }
}

fn nonincreasing(rows: &[ScanRow]) -> bool {
    rows.windows(2).all(|w| w[1].capacity <= w[0].capacity * (1.0 + 1e-9))
}

#[test]
fn z2_scan_decreases() {
    let rows = parabolicity_scan(ScanFamily::ZLattice(2), 2.0, &[4, 8, 16, 32, 64], &SolveOptions::default()).unwrap();
    assert!(nonincreasing(&rows));
    assert!(rows[4].capacity < 0.7 * rows[0].capacity);
}

#[test]
fn heisenberg_scan_is_four_parabolic() {
    let rows = parabolicity_scan(ScanFamily::DiscreteHeisenbergCayley, 4.0, &[4, 8, 16, 32], &SolveOptions::default()).unwrap();
    let caps: Vec<f64> = rows.iter().map(|r| r.capacity).collect();
    assert!(nonincreasing(&rows), "{caps:?}");
    assert!(caps[3] < 0.6 * caps[0], "{caps:?}");
}

#[test]
fn z5_scan_plateaus() {
    let rows = parabolicity_scan(ScanFamily::ZLattice(5), 4.0, &[8, 16, 32], &SolveOptions::default()).unwrap();
    let caps: Vec<f64> = rows.iter().map(|r| r.capacity).collect();
    assert!(nonincreasing(&rows), "{caps:?}");
    // The p < d decay is (1 − (a/R)^{1/3})^{-3}; for a point condenser this gives ≈ 0.46.
    assert!(caps[2] > 0.4 * caps[0], "{caps:?}");
    let h = parabolicity_scan(ScanFamily::DiscreteHeisenbergCayley, 4.0, &[8, 16, 32], &SolveOptions::default()).unwrap();
    assert!(caps[2] / caps[0] > 1.5 * h[2].capacity / h[0].capacity);
}

#[test]
fn quotient_counts_match_ball_sizes() {
    use heislab_core::growth::MarkedGroup;
    let q = QuotientBall::build(ScanFamily::DiscreteHeisenbergCayley, 8).unwrap();
    assert_eq!(q.elements() as u64, MarkedGroup::DiscreteHeisenberg.ball_sizes(8).unwrap()[8]);
    let q = QuotientBall::build(ScanFamily::ZLattice(3), 10).unwrap();
    assert_eq!(q.elements() as u64, MarkedGroup::ZLattice(3).ball_sizes(10).unwrap()[10]);
}

#[test]
fn lower_bound_ratio_stable() {
    let rows = capacity_lower_bound_check(&[8, 16], &SolveOptions::default()).unwrap();
    for w in rows.windows(2) {
        let q = w[1].ratio / w[0].ratio;
        assert!(q > 0.25 && q < 4.0, "{rows:?}");
    }
    assert!(rows.iter().all(|r| r.ratio > 0.0));
    // Shrinking G around a fixed segment raises capacity.
    let wide = segment_condenser(4, 4).unwrap();
    let narrow = segment_condenser(4, 2).unwrap();
    let cw = graph_capacity(&wide.graph, &wide.segment, 4.0, 1e-12).unwrap();
    let cn = graph_capacity(&narrow.graph, &narrow.segment, 4.0, 1e-12).unwrap();
    assert!(cn > cw);
    assert!(segment_condenser(0, 3).is_err());
}

#[test]
fn half_space_perimeter() {
    let cfg = CoareaConfig { t_extent: 0.125, method: PerimeterMethod::AxisCut };
    let (grid, window) = coarea_grid(1.0 / 16.0, &cfg).unwrap();
    let set: Vec<bool> = (0..grid.len()).map(|n| grid.point(n).x > 0.5 + 1e-9).collect();
    let p = perimeter_estimate_grid(&grid, &set, Some(&window), PerimeterMethod::AxisCut).unwrap();
    assert!((p - 0.125).abs() < 1e-12, "{p}");
    let comp: Vec<bool> = set.iter().map(|b| !b).collect();
    let pc = perimeter_estimate_grid(&grid, &comp, Some(&window), PerimeterMethod::AxisCut).unwrap();
    assert!((p - pc).abs() < 1e-15);
    let cfg = CoareaConfig { t_extent: 0.125, method: PerimeterMethod::Crofton { order: 3 } };
    let (grid, window) = coarea_grid(1.0 / 16.0, &cfg).unwrap();
    let set: Vec<bool> = (0..grid.len()).map(|n| grid.point(n).x > 0.5 + 1e-9).collect();
    let crofton = perimeter_estimate_grid(&grid, &set, Some(&window), cfg.method).unwrap();
    assert!((crofton / 0.125 - 1.0).abs() < 0.01, "{crofton}");
    let empty = vec![false; grid.len()];
    assert_eq!(perimeter_estimate_grid(&grid, &empty, Some(&window), PerimeterMethod::CroftonAuto).unwrap(), 0.0);
}

#[test]
fn graph_perimeter_is_edge_cut() {
    let g = WeightedGraph::lattice_box(&[4, 4]);
    let set: Vec<bool> = (0..16).map(|v| v % 4 < 2).collect();
    assert_eq!(perimeter_estimate_graph(&g, &set, None), 4.0);
    let comp: Vec<bool> = set.iter().map(|b| !b).collect();
    assert_eq!(perimeter_estimate_graph(&g, &comp, None), 4.0);
}

#[test]
fn crofton_weights_integrate_cosine() {
    for m in 1..=4 {
        let dirs = edge_directions(PerimeterMethod::Crofton { order: m }, 1.0);
        for theta in [0.0, 0.3, std::f64::consts::FRAC_PI_4, 1.2] {
            let (c, s) = (f64::cos(theta), f64::sin(theta));
            let total: f64 = dirs.iter().map(|&(a, b, w)| w * (a as f64 * c + b as f64 * s).abs()).sum();
            assert!((total - 1.0).abs() < 0.06, "M={m} θ={theta}: {total}");
        }
    }
}

#[test]
fn level_integral_matches_direct_quadrature() {
    let g = box_grid(0.25, 4, 16);
    let f = SubellipticField::from_fn(g, |p| p.x * p.x + p.y - p.t).unwrap();
    let set_at = |s: f64| f.values.iter().map(|&v| v > s).collect::<Vec<bool>>();
    let mut sorted = f.values.clone();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let direct: f64 = sorted
        .windows(2)
        .map(|w| perimeter_estimate_grid(&g, &set_at(0.5 * (w[0] + w[1])), None, PerimeterMethod::AxisCut).unwrap() * (w[1] - w[0]))
        .sum();
    let dirs = edge_directions(PerimeterMethod::AxisCut, g.h);
    let mut edges = Vec::new();
    for n in 0..g.len() {
        for &(a, b, w) in &dirs {
            if let Some(m) = g.flow_step(n, a, b) {
                edges.push((n as u32, m as u32, w));
            }
        }
    }
    assert!((level_integral(&f.values, &edges) - direct).abs() < 1e-12);
}

#[test]
fn coarea_converges() {
    let res = [1.0 / 8.0, 1.0 / 16.0, 1.0 / 32.0];
    for name in ["x", "x^2+y^2"] {
        let rows = coarea_check(&poly(name), &res, &CoareaConfig::default()).unwrap();
        let errs: Vec<f64> = rows.iter().map(|r| r.rel_error).collect();
        assert!(errs[2] < 0.02, "{name}: {errs:?}");
        assert!(errs.windows(2).all(|w| w[1] < w[0]), "{name}: {errs:?}");
    }
    let flat = coarea_row(&Polynomial::constant(3, 2.0), 1.0 / 8.0, &CoareaConfig::default()).unwrap();
    assert_eq!((flat.lhs, flat.rhs, flat.rel_error), (0.0, 0.0, 0.0));
}

#[test]
fn poincare_examples() {
    let o = HeisPoint::new(0.0, 0.0, 0.0);
    let coarse = PoincareConfig { h: 1.0 / 8.0, c: 2.0 };
    let fine = PoincareConfig { h: 1.0 / 16.0, c: 2.0 };
    let flat = poincare_ratio(&o, 1.0, &Polynomial::constant(3, 1.0), &coarse).unwrap();
    assert_eq!(flat.ratio, 0.0);
    let a = poincare_ratio(&o, 1.0, &poly("x"), &coarse).unwrap().ratio;
    let b = poincare_ratio(&o, 1.0, &poly("x"), &fine).unwrap().ratio;
    assert!(a.is_finite() && a > 0.0);
    assert!((a - b).abs() < 0.1 * b, "{a} vs {b}");
    let (rows, max) = poincare_sweep(&o, 1.0, &Polynomial::library(3), &coarse).unwrap();
    assert!(max.is_finite() && max > 0.0);
    assert!(rows.iter().all(|(_, r)| !r.artifact));
}

#[test]
fn green_tent_on_path() {
    let r = 10;
    let g = WeightedGraph::path(r).with_boundary(&[0, r]);
    let res = green_function(&g, 4, 2.0, 1e-12).unwrap();
    // Slopes 1·(6/10) on the left and −(4/10) on the right.
    for v in 0..=r {
        let exact = if v <= 4 { 0.6 * v as f64 } else { 0.4 * (r - v) as f64 };
        assert!((res.values[v] - exact).abs() < 1e-10);
    }
    let energy: f64 = g.edges.iter().map(|&(a, b, c)| c * (res.values[a as usize] - res.values[b as usize]).powi(2)).sum();
    assert!((energy - res.values[4]).abs() < 1e-10);
}

#[test]
fn green_weak_identity_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(77);
    for trial in 0..50 {
        let n = rng.gen_range(8..40);
        let g = WeightedGraph::random_connected(n, 0.15, rng.gen());
        let bdry: Vec<usize> = (0..rng.gen_range(1..4)).map(|_| rng.gen_range(1..n)).collect();
        let g = g.with_boundary(&bdry);
        let p = [1.5, 2.0, 3.0, 4.0][trial % 4];
        let res = green_function(&g, 0, p, 1e-9).unwrap();
        let mut worst: f64 = 0.0;
        for v in (0..n).filter(|&v| !g.boundary[v]) {
            let mut phi = vec![0.0; n];
            phi[v] = 1.0;
            worst = worst.max(weak_identity_residual(&g, &res.values, 0, p, &phi).abs());
        }
        assert!(worst < 1e-8, "trial {trial}: {worst}");
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            assert!(res.values[v] > 0.0, "trial {trial}: G({v}) = {}", res.values[v]);
            for &(w, _) in g.neighbors(v) {
                let w = w as usize;
                if !seen[w] && !g.boundary[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        let self_pair = weak_identity_residual(&g, &res.values, 0, p, &res.values);
        assert!(self_pair.abs() < 1e-7 * res.values[0].max(1.0));
    }
}

#[test]
fn green_rejects_bad_poles() {
    let g = WeightedGraph::path(4);
    assert!(green_function(&g, 1, 2.0, 1e-9).is_err());
    let g = g.with_boundary(&[0]);
    assert!(green_function(&g, 0, 2.0, 1e-9).is_err());
    assert!(green_function(&g, 9, 2.0, 1e-9).is_err());
}
