use constrained_sampling::geometry::{ConvexBody, Penalty};
use constrained_sampling::metrics::{
    radial_wasserstein, rejection_sample_target, sliced_wasserstein, surrogate_radial_density, wasserstein_empirical,
    EmpiricalMeasure, GRID_POINTS,
};
use constrained_sampling::potential::Potential;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn measure(points: &[&[f64]]) -> EmpiricalMeasure {
    EmpiricalMeasure::new(points.iter().map(|p| p.to_vec()).collect()).unwrap()
}

#[test]
fn exact_examples() {
    let a = measure(&[&[0.0, 0.0], &[1.0, 0.0]]);
    let b = measure(&[&[0.0, 0.0], &[0.0, 1.0]]);
    assert!((wasserstein_empirical(2.0, &a, &b).unwrap() - 1.0).abs() < 1e-15);
    assert_eq!(wasserstein_empirical(2.0, &a, &a).unwrap(), 0.0);
    let a = measure(&[&[0.0], &[2.0]]);
    let b = measure(&[&[1.0], &[3.0]]);
    assert!((wasserstein_empirical(1.0, &a, &b).unwrap() - 1.0).abs() < 1e-15);
    let s = sliced_wasserstein(1.0, &a, &b, 10, 0).unwrap();
    assert!((s - 1.0).abs() < 1e-12);
}

#[test]
fn mismatched_inputs_fail() {
    let a = measure(&[&[0.0, 0.0], &[1.0, 0.0]]);
    let b = measure(&[&[0.0, 0.0]]);
    assert!(wasserstein_empirical(2.0, &a, &b).is_err());
    assert!(wasserstein_empirical(0.5, &a, &a).is_err());
}

#[test]
fn rejection_acceptance_matches_ball_mass() {
    let body = ConvexBody::centered_ball(2, 0.5).unwrap();
    let f = Potential::standard_gaussian(2);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let s = rejection_sample_target(&f, &body, 117_500, &mut rng).unwrap();
    let p = 1.0 - (-0.125f64).exp();
    let se = (p * (1.0 - p) / s.proposals as f64).sqrt();
    assert!((s.acceptance_rate() - p).abs() <= 3.0 * se, "{} vs {p} ± {se}", s.acceptance_rate());
    assert!(s.measure.points().iter().all(|x| body.contains(x)));
    let n = s.measure.len() as f64;
    let mean = s.measure.mean();
    let sd = (s.measure.points().iter().map(|x| x[0] * x[0]).sum::<f64>() / n).sqrt();
    assert!(mean.iter().all(|m| m.abs() <= 3.0 * sd / n.sqrt()), "{mean:?}");
}

fn golden_cloud(radii: &[f64]) -> EmpiricalMeasure {
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    let points = radii
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let t = std::f64::consts::TAU * (i as f64 * phi).fract();
            vec![r * t.cos(), r * t.sin()]
        })
        .collect();
    EmpiricalMeasure::new(points).unwrap()
}

#[test]
fn radial_agrees_with_assignment() {
    // stratified clouds: radius from the quantile at (i + ½)/n, angle on a
    // golden-ratio sequence shared by both clouds
    let body = ConvexBody::centered_ball(2, 0.5).unwrap();
    let f = Potential::standard_gaussian(2);
    let pen = Penalty::euclidean(0.05, &body).unwrap();
    let target = surrogate_radial_density(&f, &body, None, GRID_POINTS).unwrap();
    let approx = surrogate_radial_density(&f, &body, Some(&pen), GRID_POINTS).unwrap();
    let radial = radial_wasserstein(2.0, &target, &approx).unwrap();
    let n = 2000;
    let a = golden_cloud(&target.quantiles(n));
    let b = golden_cloud(&approx.quantiles(n));
    let exact = wasserstein_empirical(2.0, &a, &b).unwrap();
    assert!((exact - radial).abs() <= 0.05 * radial, "assignment {exact} vs radial {radial}");
}
