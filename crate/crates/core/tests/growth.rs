use heislab_core::graph::{box_index, sub_box, WeightedGraph};
use heislab_core::growth::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn l1(a: &Vec<i64>, b: &Vec<i64>) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<i64>() as f64
}

fn euclid(a: &(f64, f64), b: &(f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

#[test]
fn free_group_ball_sizes_exact() {
    let sizes = ball_sizes(&MarkedGroup::FreeGroup(2), 12).unwrap();
    for (r, &b) in sizes.iter().enumerate() {
        assert_eq!(b, 2 * 3u64.pow(r as u32) - 1, "R = {r}");
    }
    assert_eq!(&sizes[..4], &[1, 5, 17, 53]);
}

#[test]
fn z2_ball_sizes_exact() {
    let sizes = ball_sizes(&MarkedGroup::ZSquared, 60).unwrap();
    for (r, &b) in sizes.iter().enumerate() {
        let r = r as u64;
        assert_eq!(b, 2 * r * r + 2 * r + 1);
    }
}

#[test]
fn radius_zero() {
    for g in [MarkedGroup::FreeGroup(2), MarkedGroup::ZSquared, MarkedGroup::DiscreteHeisenberg] {
        assert_eq!(ball_sizes(&g, 0).unwrap(), vec![1]);
    }
}

#[test]
fn heisenberg_small_balls_match_brute_force() {
    // Words of length ≤ 4 enumerated directly.
    let h = DiscreteHeisenberg;
    let gens = h.generators();
    let mut layer = vec![h.identity()];
    let mut seen = std::collections::BTreeSet::from([h.identity()]);
    let sizes = ball_sizes(&MarkedGroup::DiscreteHeisenberg, 4).unwrap();
    for r in 1..=4 {
        layer = layer.iter().flat_map(|e| gens.iter().map(|s| h.mul(e, s)).collect::<Vec<_>>()).collect();
        seen.extend(layer.iter().copied());
        assert_eq!(sizes[r], seen.len() as u64, "R = {r}");
    }
}

#[test]
fn growth_fits() {
    let z2 = ball_sizes(&MarkedGroup::ZSquared, 40).unwrap();
    let fz = growth_fit_report(&z2, 10, 40).unwrap();
    assert!((fz.slope - 2.0).abs() < 0.1 && !fz.exponential, "{fz:?}");

    let h = ball_sizes(&MarkedGroup::DiscreteHeisenberg, 40).unwrap();
    let fh = growth_fit_report(&h, 10, 40).unwrap();
    assert!((fh.slope - 4.0).abs() < 0.2 && !fh.exponential, "{fh:?}");

    let f2 = ball_sizes(&MarkedGroup::FreeGroup(2), 14).unwrap();
    assert_eq!(growth_exponent_fit(&f2, 2, 14).unwrap(), f64::INFINITY);
}

#[test]
fn growth_fit_rejects_bad_windows() {
    let s = vec![1u64; 50];
    assert!(growth_exponent_fit(&s, 1, 10).is_err());
    assert!(growth_exponent_fit(&s, 10, 10).is_err());
    assert!(growth_exponent_fit(&s, 10, 60).is_err());
}

#[test]
fn grid_net_covers_square() {
    let eps: f64 = 0.25;
    let m = (1.0 / (eps / 2.0)).round() as usize;
    let samples: Vec<(f64, f64)> =
        (0..=m).flat_map(|i| (0..=m).map(move |j| (i as f64 * eps / 2.0, j as f64 * eps / 2.0))).collect();
    let net = build_net(&samples, euclid, eps).unwrap();
    assert!(is_maximal(&net, &samples, euclid));
    assert!(net.min_separation() >= eps);
    assert!(net.is_symmetric());
    assert_eq!(uniformity_stat(&net, 0.5 * eps), 1);
    assert!(uniformity_stat(&net, 2.0 * eps) <= 9);
    let mut last = 0;
    for k in 1..8 {
        let u = uniformity_stat(&net, k as f64 * 0.5 * eps);
        assert!(u >= last);
        last = u;
    }
}

#[test]
fn single_sample_net() {
    let net = build_net(&[(0.3, 0.4)], euclid, 1.0).unwrap();
    assert_eq!(net.len(), 1);
    assert!(net.neighbors[0].is_empty());
    assert_eq!(combinatorial_distance(&net, 0, 0), Some(0));
    assert!(build_net(&[(0.0, 0.0)], euclid, 0.0).is_err());
}

#[test]
fn random_cloud_nets() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.gen_range(1..150);
        let eps = rng.gen_range(0.05..0.5);
        let samples: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
        let net = build_net(&samples, euclid, eps).unwrap();
        assert!(net.is_symmetric());
        assert!(net.min_separation() >= eps);
        assert!(is_maximal(&net, &samples, euclid));
        for (i, nb) in net.neighbors.iter().enumerate() {
            for &j in nb {
                let d = net.distance(i, j as usize);
                assert!(d > 0.0 && d <= 2.0 * eps);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 10_000, ..ProptestConfig::default() })]
    #[test]
    fn separation_on_random_clouds(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 1..24), eps in 0.05f64..0.6) {
        let net = build_net(&pts, euclid, eps).unwrap();
        prop_assert!(net.min_separation() >= eps);
        prop_assert!(net.is_symmetric());
        prop_assert!(is_maximal(&net, &pts, euclid));
    }
}

#[test]
fn z2_cayley_boundaries() {
    let cn = cayley_net(&ZLattice { dim: 2 }, 12).unwrap();
    assert!(cn.net.is_symmetric());
    let idx = cn.index_of();
    let o = idx[&vec![0, 0]];
    assert_eq!(boundary(&cn.net, &[o]).len(), 4);
    for r in 0..=10 {
        let ball = cn.word_ball(r);
        let b = boundary(&cn.net, &ball);
        assert_eq!(b.len(), 4 * (r + 1));
        assert!(b.iter().all(|&v| cn.word_length[v] == r + 1));
    }
    assert_eq!(combinatorial_distance(&cn.net, o, idx[&vec![3, -4]]), Some(7));
    // Whole vertex set of a finite net has empty boundary.
    assert!(boundary(&cn.net, &cn.net.points).is_empty());
    assert!(matches!(rough_ip_constant(&cn.net, &[cn.net.points.clone()], 2.0), Err(heislab_core::Error::EmptyBoundary)));
}

#[test]
fn singleton_ratio_is_inverse_degree() {
    let cn = cayley_net(&ZLattice { dim: 2 }, 3).unwrap();
    let o = cn.index_of()[&vec![0, 0]];
    let c = rough_ip_constant(&cn.net, &[vec![o]], 2.0).unwrap();
    assert_eq!(c, 0.25);
}

#[test]
fn z2_boxes_rough_ip() {
    let half = 26usize;
    let cn = cayley_net(&ZLattice { dim: 2 }, 2 * half + 2).unwrap();
    let idx = cn.index_of();
    let family: Vec<Vec<usize>> = (1..=50)
        .map(|side: i64| {
            let lo = -(side / 2);
            (lo..lo + side).flat_map(|i| (lo..lo + side).map(move |j| vec![i, j])).map(|e| idx[&e]).collect()
        })
        .collect();
    let stats = rough_ip_profile(&cn.net, &family, 2.0).unwrap();
    for (k, s) in stats.iter().enumerate() {
        let side = k + 1;
        assert_eq!(s.size, side * side);
        assert_eq!(s.boundary_size, 4 * side);
        assert!(s.boundary_size > 0 && s.ip_ratio <= 0.5);
    }
    // Enlarging the family never lowers the constant.
    let small = rough_ip_constant(&cn.net, &family[..10], 2.0).unwrap();
    let all = rough_ip_constant(&cn.net, &family, 2.0).unwrap();
    assert!(all >= small);
}

#[test]
fn heisenberg_cayley_balls_rough_ip_bounded() {
    let cn = cayley_net(&DiscreteHeisenberg, 21).unwrap();
    let family: Vec<Vec<usize>> = (1..=20).map(|r| cn.word_ball(r)).collect();
    let stats = rough_ip_profile(&cn.net, &family, 4.0).unwrap();
    let ratios: Vec<f64> = stats.iter().map(|s| s.ip_ratio).collect();
    let c = ratios.iter().copied().fold(0.0, f64::max);
    assert!(c < 1.0, "{ratios:?}");
    // Ratios settle rather than grow with R.
    let tail = &ratios[10..];
    assert!(tail.iter().copied().fold(0.0, f64::max) < 1.5 * tail.iter().copied().fold(f64::INFINITY, f64::min));
}

#[test]
fn random_clusters_are_connected() {
    let cn = cayley_net(&DiscreteHeisenberg, 8).unwrap();
    let allowed: Vec<bool> = cn.word_length.iter().map(|&l| l <= 7).collect();
    let clusters = random_clusters(&cn.net, &allowed, 20, 60, 3);
    assert_eq!(clusters.len(), 20);
    for c in &clusters {
        assert!(!c.is_empty() && c.len() <= 60);
        assert!(c.iter().all(|&v| allowed[v]));
        let b = boundary(&cn.net, c);
        assert!(b.iter().all(|v| c.binary_search(v).is_err()));
    }
    assert_eq!(clusters, random_clusters(&cn.net, &allowed, 20, 60, 3));
}

#[test]
fn kanai_stability_under_two_dense_subsampling() {
    let r_max = 24;
    let cn = cayley_net(&ZLattice { dim: 2 }, r_max + 1).unwrap();
    let base: Vec<Vec<usize>> = (2..=r_max).map(|r| cn.word_ball(r)).collect();
    let c_full = rough_ip_constant(&cn.net, &base, 2.0).unwrap();

    let coarse = build_net(&cn.elements, l1, 2.0).unwrap();
    let family: Vec<Vec<usize>> = (2..=r_max - 4)
        .map(|r| (0..coarse.len()).filter(|&i| cn.word_length[coarse.points[i]] <= r).collect())
        .collect();
    let c_coarse = rough_ip_constant(&coarse, &family, 2.0).unwrap();
    let ratio = c_full / c_coarse;
    assert!((1.0 / 8.0..=8.0).contains(&ratio), "{c_full} vs {c_coarse}");
}

fn z4_box(n: usize) -> WeightedGraph {
    WeightedGraph::lattice_box(&[n; 4])
}

#[test]
fn transfer_on_z4_box() {
    let n = 12;
    let g = z4_box(n);
    let family = sub_box_family(&[n; 4], &[1, 2, 3, 4, 6]);
    let rep = transfer_harness(&g, &TransferConfig::default(), &family).unwrap();
    assert_eq!(rep.net_size, n.pow(4));
    assert!(rep.hypotheses_hold(), "{:?}", rep.conditions);
    assert!(!rep.degenerate && rep.chain_ok);
    let meas = rep.c_meas.unwrap();
    assert!(meas.is_finite() && meas <= rep.c_pred);
    assert!(rep.prediction_ratio().unwrap() <= 10.0, "pred {} meas {meas}", rep.c_pred);
}

#[test]
fn transfer_coarse_net() {
    let n = 8;
    let g = z4_box(n);
    let family = sub_box_family(&[n; 4], &[2, 3, 4]);
    let cfg = TransferConfig { eps: 2.0, ..TransferConfig::default() };
    let rep = transfer_harness(&g, &cfg, &family).unwrap();
    assert!(rep.net_size < n.pow(4));
    assert!(rep.chain_ok);
    assert!(rep.c_meas.unwrap() <= rep.c_pred);
}

#[test]
fn transfer_degenerate_family() {
    let g = z4_box(4);
    let rep = transfer_harness(&g, &TransferConfig::default(), &[(0..g.len()).collect()]).unwrap();
    assert!(rep.degenerate);
    assert_eq!(rep.c_meas, None);
}

#[test]
fn transfer_flags_heavy_vertex() {
    let n = 8;
    let mut g = z4_box(n);
    let heavy = box_index(&[n; 4], &[4, 4, 4, 4]);
    let mut measures = g.measures.clone();
    measures[heavy] = 100.0;
    g = WeightedGraph::new(measures, g.edges.clone()).unwrap();
    let family = sub_box_family(&[n; 4], &[1, 2, 3, 4]);
    let rep = transfer_harness(&g, &TransferConfig::default(), &family).unwrap();
    let c4 = rep.conditions.iter().find(|c| c.condition == 4).unwrap();
    assert!(!c4.pass);
    assert!(rep.c_meas.unwrap().is_finite());
    assert!(rep.chain_ok);
    assert!(sub_box(&[n; 4], &[4, 4, 4, 4], &[1, 1, 1, 1]) == vec![heavy]);
}
