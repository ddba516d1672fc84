use approx::assert_abs_diff_eq;
use heislab_core::heis::*;
use heislab_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn hp(x: f64, y: f64, t: f64) -> HeisPoint {
    HeisPoint::new(x, y, t)
}

fn random_point(rng: &mut ChaCha8Rng, s: f64) -> HeisPoint {
    hp(rng.gen_range(-s..s), rng.gen_range(-s..s), rng.gen_range(-s * s..s * s))
}

#[test]
fn mul_examples() {
    assert_eq!(group_mul(&hp(1., 0., 0.), &hp(0., 1., 0.)).unwrap(), hp(1., 1., -2.));
    let p = hp(0.3, -1.2, 7.0);
    assert_eq!(group_mul(&HeisPoint::IDENTITY, &p).unwrap(), p);
    assert_eq!(group_mul(&p, &hp(-0.3, 1.2, -7.0)).unwrap(), HeisPoint::IDENTITY);
    assert_eq!(group_mul(&hp(f64::NAN, 0., 0.), &p), Err(Error::NonFinite("left factor")));
    assert!(group_mul(&p, &hp(0., f64::INFINITY, 0.)).is_err());
}

#[test]
fn inv_examples() {
    assert_eq!(group_inv(&HeisPoint::IDENTITY), HeisPoint::IDENTITY);
    let p = hp(1., 2., 3.);
    assert_eq!(group_inv(&p), hp(-1., -2., -3.));
    assert_eq!(p.mul(&group_inv(&p)), HeisPoint::IDENTITY);
    assert_eq!(group_inv(&group_inv(&p)), p);
}

#[test]
fn integer_group_axioms_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut int = || hp(rng.gen_range(-1000..=1000) as f64, rng.gen_range(-1000..=1000) as f64, rng.gen_range(-1000..=1000) as f64);
    for _ in 0..10_000 {
        let (p, q, w) = (int(), int(), int());
        assert_eq!(p.mul(&q).mul(&w), p.mul(&q.mul(&w)));
        assert_eq!(p.mul(&p.inv()), HeisPoint::IDENTITY);
        assert_eq!(p.inv().mul(&p), HeisPoint::IDENTITY);
        assert_eq!(HeisPoint::IDENTITY.mul(&p), p);
        assert_eq!(p.mul(&HeisPoint::IDENTITY), p);
    }
}

#[test]
fn float_associativity() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..10_000 {
        let (p, q, w) = (random_point(&mut rng, 3.), random_point(&mut rng, 3.), random_point(&mut rng, 3.));
        let a = p.mul(&q).mul(&w);
        let b = p.mul(&q.mul(&w));
        assert!(a.coord_dist(&b) < 1e-10);
        assert!(p.mul(&p.inv()).coord_dist(&HeisPoint::IDENTITY) < 1e-12);
    }
}

#[test]
fn dilation() {
    let p = hp(1., 1., 1.);
    assert_eq!(dilate(1., &p).unwrap(), p);
    assert_eq!(dilate(2., &p).unwrap(), hp(2., 2., 4.));
    assert!(dilate(0., &p).is_err());
    assert!(dilate(-1., &p).is_err());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..1000 {
        let (p, q) = (random_point(&mut rng, 2.), random_point(&mut rng, 2.));
        let r = rng.gen_range(0.1..3.0);
        let s = rng.gen_range(0.1..3.0);
        let lhs = p.mul(&q).dilate(r);
        let rhs = p.dilate(r).mul(&q.dilate(r));
        assert!(lhs.coord_dist(&rhs) < 1e-10);
        assert!(p.dilate(s).dilate(r).coord_dist(&p.dilate(r * s)) < 1e-12);
    }
}

#[test]
fn frames_and_contact() {
    let x0 = frame_x(&HeisPoint::IDENTITY);
    assert_eq!((x0.dx, x0.dy, x0.dt), (1., 0., 0.));
    let y3 = frame_y(&hp(3., 0., 0.));
    assert_eq!((y3.dx, y3.dy, y3.dt), (0., 1., -6.));
    let o = HeisPoint::IDENTITY;
    assert_eq!(contact_form(&o, &TangentVector::new(o, 0., 0., 1.)).unwrap(), 1.);
    let p = hp(1., 0., 0.);
    assert_eq!(contact_form(&p, &TangentVector::new(p, 0., 1., 0.)).unwrap(), 2.);
    assert_eq!(contact_form(&o, &frame_x(&p)), Err(Error::BaseMismatch));
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    for _ in 0..1000 {
        let p = random_point(&mut rng, 10.);
        assert_eq!(contact_form(&p, &frame_x(&p)).unwrap(), 0.);
        assert_eq!(contact_form(&p, &frame_y(&p)).unwrap(), 0.);
        let h = HorizontalVector::new(p, rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        assert!(contact_form(&p, &h.to_tangent()).unwrap().abs() < 1e-12);
    }
}

#[test]
fn frames_left_invariant() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..1000 {
        let (p, q) = (random_point(&mut rng, 5.), random_point(&mut rng, 5.));
        assert_eq!(left_translate_vector(&q, &frame_x(&p)), frame_x(&q.mul(&p)));
        assert_eq!(left_translate_vector(&q, &frame_y(&p)), frame_y(&q.mul(&p)));
    }
}

#[test]
fn gauge_examples() {
    let o = HeisPoint::IDENTITY;
    assert_abs_diff_eq!(gauge_dist(Gauge::Koranyi, &o, &hp(3., 4., 0.)), 5., epsilon = 1e-12);
    assert_abs_diff_eq!(gauge_dist(Gauge::LInfty, &o, &hp(0., 0., 4.)), 2., epsilon = 1e-12);
    let p = hp(0.5, -2., 3.);
    for g in [Gauge::Koranyi, Gauge::LInfty] {
        assert_eq!(gauge_dist(g, &p, &p), 0.);
    }
}

#[test]
fn gauge_properties() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for g in [Gauge::Koranyi, Gauge::LInfty] {
        for _ in 0..10_000 {
            let (p, q, w) = (random_point(&mut rng, 2.), random_point(&mut rng, 2.), random_point(&mut rng, 2.));
            let d = gauge_dist(g, &p, &q);
            assert!((d - gauge_dist(g, &q, &p)).abs() < 1e-12);
            assert!((d - gauge_dist(g, &w.mul(&p), &w.mul(&q))).abs() < 1e-9 * (1. + d));
            let r = rng.gen_range(0.1..4.0);
            assert!((gauge_dist(g, &p.dilate(r), &q.dilate(r)) - r * d).abs() < 1e-10 * (1. + r * d));
            assert!(d <= gauge_dist(g, &p, &w) + gauge_dist(g, &w, &q) + 1e-12);
        }
    }
}

#[test]
fn exp_flow_examples() {
    let o = HeisPoint::IDENTITY;
    let p = hp(0., 1., 0.);
    assert_eq!(exp_flow(&p, &HorizontalVector::new(p, 1., 0.), 0.).unwrap(), p);
    assert_eq!(exp_flow(&o, &HorizontalVector::new(o, 1., 0.), 1.).unwrap(), hp(1., 0., 0.));
    assert_eq!(exp_flow(&p, &HorizontalVector::new(p, 1., 0.), 1.).unwrap(), hp(1., 1., 2.));
    assert_eq!(exp_flow(&o, &HorizontalVector::new(p, 1., 0.), 1.), Err(Error::BaseMismatch));
}

#[test]
fn exp_flow_horizontal() {
    // The flow is affine in s, so integer-step differences are exact tangents.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let p = hp(rng.gen_range(-50..50) as f64, rng.gen_range(-50..50) as f64, rng.gen_range(-50..50) as f64);
        let (a, b) = (rng.gen_range(-5..5) as f64, rng.gen_range(-5..5) as f64);
        let h = HorizontalVector::new(p, a, b);
        let s = rng.gen_range(-5..5) as f64;
        let c0 = exp_flow(&p, &h, s).unwrap();
        let c1 = exp_flow(&p, &h, s + 1.).unwrap();
        let v = TangentVector::new(c0, c1.x - c0.x, c1.y - c0.y, c1.t - c0.t);
        assert_eq!(contact_form(&c0, &v).unwrap(), 0.);
        assert_eq!(v.dx * v.dx + v.dy * v.dy, a * a + b * b);
    }
}

#[test]
fn cc_examples() {
    let o = HeisPoint::IDENTITY;
    let p = hp(0.2, 0.4, -1.);
    assert_eq!(cc_dist(&p, &p, 1e-6).unwrap(), 0.);
    assert_abs_diff_eq!(cc_dist(&o, &hp(1., 0., 0.), 1e-6).unwrap(), 1., epsilon = 1e-12);
    assert!(cc_dist(&o, &p, 0.).is_err());
}

#[test]
fn cc_vertical_axis() {
    // Closed horizontal circle of circumference L encloses area L²/4π, lifting by 4·area.
    for t in [0.5, 1., 4., -2.] {
        let d = cc_dist(&HeisPoint::IDENTITY, &hp(0., 0., t), 1e-8).unwrap();
        assert!((d - (PI * f64::abs(t)).sqrt()).abs() < 1e-6 * d, "t={t} d={d}");
    }
}

/// Circular-arc geodesic to `(c, 0, t)`: chord c, enclosed area |t|/4.
fn arc_oracle(c: f64, t: f64) -> f64 {
    let target = t.abs() / (4.0 * c * c);
    let f = |th: f64| (th - th.sin()) / (8.0 * (th / 2.0).sin().powi(2));
    let (mut lo, mut hi) = (1e-9, 2.0 * PI - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < target {
            lo = mid
        } else {
            hi = mid
        }
    }
    let th = 0.5 * (lo + hi);
    c / (2.0 * (th / 2.0).sin()) * th
}

#[test]
fn cc_matches_arc_oracle() {
    for (c, t) in [(1.0, 0.3), (1.0, -1.0), (0.5, 2.0), (2.0, 0.1), (1.0, 3.0)] {
        let d = cc_dist(&HeisPoint::IDENTITY, &hp(c, 0., t), 1e-8).unwrap();
        let e = arc_oracle(c, t);
        assert!((d - e).abs() < 1e-6 * e, "c={c} t={t} d={d} oracle={e}");
    }
}

#[test]
fn cc_invariance_and_sandwich() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let tol = 1e-6;
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for _ in 0..40 {
        let (p, q, w) = (random_point(&mut rng, 1.), random_point(&mut rng, 1.), random_point(&mut rng, 1.));
        let d = cc_dist(&p, &q, tol).unwrap();
        let dw = cc_dist(&w.mul(&p), &w.mul(&q), tol).unwrap();
        assert!((d - dw).abs() < 10. * tol * d);
        let r = rng.gen_range(0.2..3.0);
        let dr = cc_dist(&p.dilate(r), &q.dilate(r), tol).unwrap();
        assert!((dr - r * d).abs() < 10. * tol * r * d);
        let ratio = d / gauge_dist(Gauge::Koranyi, &p, &q);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
    }
    // Extremes: 1 on horizontal lines, √π on the vertical axis.
    assert!(lo >= 1. - 1e-6 && hi <= PI.sqrt() + 1e-6, "lo={lo} hi={hi}");
    assert!(hi / lo <= 2.);
}

#[test]
fn mc_volume_oracles() {
    let o = HeisPoint::IDENTITY;
    let k = ball_volume_mc_gauge(Gauge::Koranyi, &o, 1., 400_000, 11);
    assert!((k.estimate - PI * PI / 2.).abs() < 4. * k.std_error);
    let l = ball_volume_mc_gauge(Gauge::LInfty, &o, 1., 400_000, 12);
    assert!((l.estimate - 2. * PI).abs() < 4. * l.std_error);
}

#[test]
fn mc_volume_scaling_and_invariance() {
    let o = HeisPoint::IDENTITY;
    let n = 200_000;
    let v1 = ball_volume_mc(&o, 1., n, 21);
    for (r, seed) in [(0.5, 22), (2., 23)] {
        let vr = ball_volume_mc(&o, r, n, seed);
        assert!((vr / v1 / r.powi(4) - 1.).abs() < 0.03);
    }
    let vp = ball_volume_mc(&hp(3., -1., 5.), 1., n, 24);
    assert!((vp / v1 - 1.).abs() < 0.03);
}

#[test]
fn mc_volume_deterministic_across_threads() {
    let o = HeisPoint::IDENTITY;
    let a = ball_volume_mc(&o, 1.3, 300_001, 5);
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let b = pool.install(|| ball_volume_mc(&o, 1.3, 300_001, 5));
    assert_eq!(a.to_bits(), b.to_bits());
}

#[test]
fn mc_volume_converges() {
    let o = HeisPoint::IDENTITY;
    let mut prev: Option<MonteCarloVolume> = None;
    for n in [25_000, 50_000, 100_000, 200_000] {
        let v = ball_volume_mc_gauge(Gauge::Koranyi, &o, 1., n, 99);
        if let Some(p) = prev {
            let bar = 4. * (p.std_error.powi(2) + v.std_error.powi(2)).sqrt();
            assert!((v.estimate - p.estimate).abs() < bar);
        }
        prev = Some(v);
    }
}
