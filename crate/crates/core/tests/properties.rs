use constrained_sampling::geometry::{ConvexBody, Halfspace, Penalty, PenaltyKind};
use constrained_sampling::linalg::{dist, SpdMatrix};
use constrained_sampling::metrics::{sliced_wasserstein, wasserstein_empirical, EmpiricalMeasure};
use proptest::prelude::*;

fn bodies() -> Vec<ConvexBody> {
    vec![
        ConvexBody::centered_ball(2, 0.5).unwrap(),
        ConvexBody::ball(vec![0.1, -0.2], 0.7).unwrap(),
        ConvexBody::cuboid(vec![-1.0, -0.5], vec![0.5, 1.0]).unwrap(),
        ConvexBody::polytope(vec![
            Halfspace::new(vec![-1.0, 0.0], 0.3),
            Halfspace::new(vec![0.0, -1.0], 0.3),
            Halfspace::new(vec![1.0, 1.0], 0.6),
        ])
        .unwrap(),
    ]
}

fn point() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-3.0f64..3.0, 2)
}

fn cloud(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(point(), n)
}

fn spd() -> impl Strategy<Value = SpdMatrix> {
    (0.2f64..4.0, 0.2f64..4.0, -0.9f64..0.9).prop_map(|(a, b, rho)| {
        let off = rho * (a * b).sqrt();
        SpdMatrix::from_rows(&[vec![a, off], vec![off, b]]).unwrap()
    })
}

proptest! {
    #[test]
    fn projection_idempotent_and_nonexpansive(x in point(), y in point()) {
        for body in bodies() {
            let px = body.euclidean_project(&x).unwrap();
            let py = body.euclidean_project(&y).unwrap();
            prop_assert!(body.contains(&px));
            let again = body.euclidean_project(&px).unwrap();
            prop_assert!(dist(&again, &px) <= 1e-9);
            prop_assert!(dist(&px, &py) <= dist(&x, &y) + 1e-9);
        }
    }

    #[test]
    fn bregman_projection_is_optimal(q in spd(), x in point(), y in point()) {
        for body in bodies() {
            let p = body.bregman_project(&q, &x).unwrap();
            prop_assert!(body.contains(&p));
            // variational inequality against a feasible point
            let z = body.euclidean_project(&y).unwrap();
            let r: Vec<f64> = x.iter().zip(&p).map(|(a, b)| a - b).collect();
            let qr = q.apply(&r);
            let dir: Vec<f64> = z.iter().zip(&p).map(|(a, b)| a - b).collect();
            let ip: f64 = qr.iter().zip(&dir).map(|(a, b)| a * b).sum();
            prop_assert!(ip <= 1e-8, "{ip}");
        }
    }

    #[test]
    fn gauge_scaling_lands_in_body(x in point()) {
        for body in bodies() {
            let g = body.gauge(&x).unwrap();
            let n = x[0].hypot(x[1]);
            prop_assert!(g >= 1.0);
            prop_assert!(g >= n / body.outer_radius() - 1e-12);
            let scaled = [x[0] / g, x[1] / g];
            prop_assert!(body.contains(&scaled));
            if g > 1.0 + 1e-9 {
                let beyond = [x[0] / g * (1.0 + 1e-6), x[1] / g * (1.0 + 1e-6)];
                prop_assert!(!body.contains(&beyond));
            }
        }
    }

    #[test]
    fn penalty_gradient_matches_differences(x in point(), q in spd()) {
        for body in bodies() {
            for kind in [PenaltyKind::Euclidean, PenaltyKind::Gauge, PenaltyKind::Bregman { q: q.clone() }] {
                let pen = Penalty::new(kind, 0.1, &body).unwrap();
                let g = pen.gradient(&body, &x).unwrap();
                let s = 1e-6;
                for i in 0..2 {
                    let mut xp = x.clone();
                    let mut xm = x.clone();
                    xp[i] += s;
                    xm[i] -= s;
                    let fd = (pen.distance(&body, &xp).unwrap() - pen.distance(&body, &xm).unwrap()) / (2.0 * s);
                    // kinks of the polytope gauge are measure zero; stay off them
                    let tol = 1e-4 * g[i].abs().max(1.0);
                    if (fd - g[i]).abs() > tol {
                        let near_kink = matches!(pen.kind, PenaltyKind::Gauge) && body.halfspaces().is_some();
                        prop_assert!(near_kink, "{} on body {:?}: fd {fd} vs {}", pen.kind, body.shape(), g[i]);
                    }
                }
            }
        }
    }

    #[test]
    fn wasserstein_is_a_metric(a in cloud(6), b in cloud(6), c in cloud(6)) {
        let (a, b, c) = (
            EmpiricalMeasure::new(a).unwrap(),
            EmpiricalMeasure::new(b).unwrap(),
            EmpiricalMeasure::new(c).unwrap(),
        );
        for q in [1.0, 2.0] {
            let ab = wasserstein_empirical(q, &a, &b).unwrap();
            let ba = wasserstein_empirical(q, &b, &a).unwrap();
            let bc = wasserstein_empirical(q, &b, &c).unwrap();
            let ac = wasserstein_empirical(q, &a, &c).unwrap();
            prop_assert!(wasserstein_empirical(q, &a, &a).unwrap().abs() < 1e-12);
            prop_assert!((ab - ba).abs() < 1e-12);
            prop_assert!(ac <= ab + bc + 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn sliced_never_exceeds_exact(a in cloud(30), b in cloud(30), seed in any::<u64>()) {
        let (a, b) = (EmpiricalMeasure::new(a).unwrap(), EmpiricalMeasure::new(b).unwrap());
        let exact = wasserstein_empirical(2.0, &a, &b).unwrap();
        let sliced = sliced_wasserstein(2.0, &a, &b, 50, seed).unwrap();
        prop_assert!(sliced <= exact + 1e-12, "{sliced} > {exact}");
    }
}
