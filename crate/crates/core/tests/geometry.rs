use constrained_sampling::geometry::{ConvexBody, Halfspace, Penalty, PenaltyKind};
use constrained_sampling::linalg::SpdMatrix;
use constrained_sampling::potential::{Potential, SurrogatePotential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn simplex() -> ConvexBody {
    ConvexBody::polytope(vec![
        Halfspace::new(vec![-1.0, 0.0], 0.3),
        Halfspace::new(vec![0.0, -1.0], 0.3),
        Halfspace::new(vec![1.0, 1.0], 0.6),
    ])
    .unwrap()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn membership() {
    let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
    assert!(ball.contains(&[0.3, 0.0]));
    assert!(!ball.contains(&[0.6, 0.0]));
    assert!(simplex().contains(&[-0.3, -0.3]));
    assert!(!simplex().contains(&[0.4, 0.4]));
}

#[test]
fn euclidean_projection_examples() {
    let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
    assert_eq!(ball.euclidean_project(&[1.0, 0.0]).unwrap(), vec![0.5, 0.0]);
    assert_eq!(ball.euclidean_project(&[0.1, 0.1]).unwrap(), vec![0.1, 0.1]);
    let bx = ConvexBody::cuboid(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    assert_eq!(bx.euclidean_project(&[2.0, 0.5]).unwrap(), vec![1.0, 0.5]);
    // nearest point of the triangle to (1, 1) is the midpoint of the long edge
    let p = simplex().euclidean_project(&[1.0, 1.0]).unwrap();
    assert!(close(&p, &[0.3, 0.3], 1e-9), "{p:?}");
}

#[test]
fn bregman_projection_examples() {
    let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
    let p = ball.bregman_project(&SpdMatrix::identity(2), &[1.0, 0.0]).unwrap();
    assert!(close(&p, &[0.5, 0.0], 1e-12));
    let q = SpdMatrix::diagonal(&[4.0, 1.0]).unwrap();
    let bx = ConvexBody::cuboid(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
    assert!(close(&bx.bregman_project(&q, &[2.0, 3.0]).unwrap(), &[1.0, 1.0], 1e-9));
}

#[test]
fn bregman_ball_matches_boundary_grid() {
    let q = SpdMatrix::diagonal(&[4.0, 1.0]).unwrap();
    let unit = ConvexBody::centered_ball(2, 1.0).unwrap();
    let x = [1.0, 1.0];
    let p = unit.bregman_project(&q, &x).unwrap();
    let cost = |y: [f64; 2]| 4.0 * (x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2);
    let mut best = (f64::INFINITY, [0.0; 2]);
    let n = 1_000_000;
    for k in 0..n {
        let t = std::f64::consts::TAU * k as f64 / n as f64;
        let y = [t.cos(), t.sin()];
        let c = cost(y);
        if c < best.0 {
            best = (c, y);
        }
    }
    assert!(close(&p, &best.1, 1e-5), "{p:?} vs grid {:?}", best.1);
    assert!(cost([p[0], p[1]]) <= best.0 + 1e-12);
}

#[test]
fn gauge_examples() {
    let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
    assert_eq!(ball.gauge(&[1.0, 0.0]).unwrap(), 2.0);
    assert_eq!(ball.gauge(&[0.1, 0.0]).unwrap(), 1.0);
    assert_eq!(simplex().gauge(&[0.0, 0.1]).unwrap(), 1.0);
    assert!((simplex().gauge(&[0.6, 0.6]).unwrap() - 2.0).abs() < 1e-12);
    // bisection on membership of x / t
    let x = [0.6, 0.6];
    let (mut lo, mut hi) = (1.0f64, 4.0f64);
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if simplex().contains(&[x[0] / mid, x[1] / mid]) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    assert!((hi - 2.0).abs() < 1e-10);
}

#[test]
fn penalty_examples() {
    let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
    let g = Penalty::gauge(0.1, &ball).unwrap();
    let e = Penalty::euclidean(0.1, &ball).unwrap();
    assert!((g.distance(&ball, &[1.0, 0.0]).unwrap() - 1.0).abs() < 1e-12);
    assert!((e.distance(&ball, &[1.0, 0.0]).unwrap() - 0.25).abs() < 1e-12);
    assert!(close(&e.gradient(&ball, &[1.0, 0.0]).unwrap(), &[1.0, 0.0], 1e-12));
    assert!(close(&g.gradient(&ball, &[1.0, 0.0]).unwrap(), &[4.0, 0.0], 1e-12));
    for pen in [&g, &e] {
        assert_eq!(pen.distance(&ball, &[0.1, 0.0]).unwrap(), 0.0);
        assert_eq!(pen.gradient(&ball, &[0.1, 0.0]).unwrap(), vec![0.0, 0.0]);
    }
    assert!((g.c1 - 1.0 / 0.25).abs() < 1e-12 && (g.c2 - 1.0 / 0.25).abs() < 1e-12);
}

#[test]
fn penalty_constants_bracket_distance() {
    let q = SpdMatrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for body in [ConvexBody::centered_ball(2, 0.5).unwrap(), simplex()] {
        for kind in [PenaltyKind::Euclidean, PenaltyKind::Gauge, PenaltyKind::Bregman { q: q.clone() }] {
            let pen = Penalty::new(kind, 0.1, &body).unwrap();
            assert!(0.0 < pen.c1 && pen.c1 <= pen.c2);
            for _ in 0..500 {
                let x = [rng.random_range(-2.0..2.0), rng.random_range(-2.0..2.0)];
                let p = body.euclidean_project(&x).unwrap();
                let r2 = (x[0] - p[0]).powi(2) + (x[1] - p[1]).powi(2);
                let d = pen.distance(&body, &x).unwrap();
                assert!(d >= pen.c1 * r2 * (1.0 - 1e-9) - 1e-12, "{} lower at {x:?}", pen.kind);
                assert!(d <= pen.c2 * r2 * (1.0 + 1e-9) + 1e-12, "{} upper at {x:?}", pen.kind);
            }
        }
    }
}

#[test]
fn inner_and_outer_radii_hold() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let body = simplex();
    let (r, big_r) = (body.inner_radius(), body.outer_radius());
    assert!(0.0 < r && r <= big_r);
    for _ in 0..10_000 {
        let x: [f64; 2] = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
        let n = x[0].hypot(x[1]);
        if n <= r {
            assert!(body.contains(&x));
        }
        if body.contains(&x) {
            assert!(n <= big_r + 1e-12);
        }
    }
}

#[test]
fn invalid_bodies_are_rejected() {
    assert!(ConvexBody::centered_ball(2, 0.0).is_err());
    assert!(ConvexBody::cuboid(vec![1.0, 0.0], vec![0.0, 1.0]).is_err());
    assert!(ConvexBody::polytope(vec![Halfspace::new(vec![1.0, 0.0], -0.1)]).is_err());
}

#[test]
fn surrogate_examples() {
    let ball = ConvexBody::centered_ball(2, 0.5).unwrap();
    let f = Potential::standard_gaussian(2);
    let e = SurrogatePotential::new(f.clone(), Penalty::euclidean(0.1, &ball).unwrap(), ball.clone()).unwrap();
    assert!((e.value(&[1.0, 0.0]).unwrap() - 13.0).abs() < 1e-12);
    assert!((e.value(&[0.1, 0.0]).unwrap() - 0.005).abs() < 1e-15);
    assert!(close(&e.gradient(&[1.0, 0.0]).unwrap(), &[51.0, 0.0], 1e-12));
    assert!((e.smoothness_bound() - 101.0).abs() < 1e-9);
    let g = SurrogatePotential::new(f.clone(), Penalty::gauge(0.1, &ball).unwrap(), ball.clone()).unwrap();
    assert!((g.value(&[1.0, 0.0]).unwrap() - 50.5).abs() < 1e-12);
    let q = SpdMatrix::diagonal(&[4.0, 1.0]).unwrap();
    let b = SurrogatePotential::new(f, Penalty::bregman(q, 0.1, &ball).unwrap(), ball).unwrap();
    assert!((b.smoothness_bound() - 401.0).abs() < 1e-9);
}
