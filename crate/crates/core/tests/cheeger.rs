use ahgeo_core::catenoid::*;
use ahgeo_core::cheeger::*;
use ahgeo_core::metrics::{Euclidean, PoincareBall};
use ahgeo_core::submanifold::PolynomialEmbedding;
use ahgeo_core::tensor::ScalarField;
use ahgeo_core::{GeoError, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn upper_bound_closed_form() {
    assert_eq!(cheeger_upper_bound(2, 0.0).unwrap(), 2.0);
    for k in 1..6 {
        assert_eq!(cheeger_upper_bound(k, 0.0).unwrap(), k as f64);
    }
    let v = cheeger_upper_bound(3, 2.0).unwrap();
    assert!((v - 1.5 * 3f64.sqrt()).abs() < 1e-15);
    assert!(matches!(cheeger_upper_bound(1, 2.0), Err(GeoError::InvalidCMC { .. })));
    assert!(matches!(cheeger_upper_bound(2, -3.5), Err(GeoError::InvalidCMC { .. })));
}

#[test]
fn eigenvalue_chain() {
    let lam = lambda1p_upper(2, 0.0, 2.0).unwrap();
    assert!((lam - 1.0).abs() < 1e-15);
    assert!((cheeger_upper_from_lambda(lam, 2.0).unwrap() - 2.0).abs() < 1e-15);
    let v = cheeger_upper_from_lambda(lambda1p_upper(3, 2.0, 3.0).unwrap(), 3.0).unwrap();
    assert!((v - 1.5 * 3f64.sqrt()).abs() < 1e-14);
    assert!(matches!(lambda1p_upper(2, 0.0, 1.0), Err(GeoError::InvalidP { .. })));
    assert!(matches!(cheeger_upper_from_lambda(1.0, 0.5), Err(GeoError::InvalidP { .. })));

    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let k = rng.gen_range(1..8usize);
        let c = rng.gen_range(-0.99..0.99) * (k + 1) as f64;
        let p = rng.gen_range(1.05..6.0);
        let a = cheeger_upper_from_lambda(lambda1p_upper(k, c, p).unwrap(), p).unwrap();
        let b = cheeger_upper_bound(k, c).unwrap();
        assert!((a - b).abs() < 1e-12 * b.max(1.0), "{k} {c} {p}");
    }
}

#[test]
fn lee_function_of_hyperbolic_space() {
    let s = lee_hyperbolic(&[0.0, 0.0, 0.0]).unwrap();
    assert!((s.u - 2.0).abs() < 1e-15 && s.grad.iter().all(|g| g.abs() < 1e-15) && s.b.max_abs() < 1e-14);

    // u − 1/r₂ = (1 − ρ)/(1 + ρ) with r₂ = (1 − ρ)/(1 + ρ)
    let s = lee_hyperbolic(&[0.9, 0.0, 0.0]).unwrap();
    assert!((s.u - 19.0 - 1.0 / 19.0).abs() < 1e-12);

    assert!(matches!(lee_hyperbolic(&[1.0, 0.0]), Err(GeoError::OutOfDomain { .. })));

    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut points = Vec::new();
    for i in 0..1000 {
        let d = 2 + i % 4;
        let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = rng.gen_range(0.0..0.9);
        let x: Vec<f64> = dir.iter().map(|v| v * rho / norm).collect();
        let s = lee_hyperbolic(&x).unwrap();
        assert!(s.pde_residual(d as f64) < 1e-8 * s.u, "{x:?}");
        assert!(s.b.max_abs() < 1e-8 * s.u * s.u);
        assert!((s.gradient_slack() - 4.0).abs() < 1e-8 * s.u * s.u.max(1.0));
        if d == 3 {
            points.push(x);
        }
    }
    let lee = LeeField::new(PoincareBall(3), LeeHyperbolic, &points, 1e-8).unwrap();
    assert!(lee.diagnostics.gradient_excess < 0.0);
}

struct ExpX;

impl ScalarField for ExpX {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        x[0].exp()
    }
}

#[test]
fn fake_lee_function_is_rejected() {
    let pts = vec![vec![0.1, 0.2, 0.3], vec![-0.5, 0.0, 0.4]];
    assert!(matches!(LeeField::new(Euclidean(3), ExpX, &pts, 1e-6), Err(GeoError::InvalidLeeFunction { .. })));
}

#[test]
fn lower_bound() {
    assert_eq!(cheeger_lower_bound(2, 0.0, 0.0), LowerBound { value: 2.0, vacuous: false });
    let b = cheeger_lower_bound(3, 0.5, 0.2);
    assert!((b.value - 2.3).abs() < 1e-15 && !b.vacuous);
    assert!(cheeger_lower_bound(2, 3.0, 0.0).vacuous);
}

#[test]
fn geodesic_ball_ratio() {
    let closed = |r: f64| 2.0 * r.sinh().powi(2) / (r.sinh() * r.cosh() - r);
    for r in [0.1, 1.0, 3.0, 10.0] {
        assert!((ball_isoperimetric_ratio(3, r).unwrap() - closed(r)).abs() < 1e-10 * closed(r));
    }
    let r10 = ball_isoperimetric_ratio(3, 10.0).unwrap();
    let r20 = ball_isoperimetric_ratio(3, 20.0).unwrap();
    assert!((r10 - 2.0).abs() < 1e-3);
    assert!(r20 < r10 && r20 > 2.0);
    let small = ball_isoperimetric_ratio(2, 1e-3).unwrap();
    assert!((small * 1e-3 / 2.0 - 1.0).abs() < 1e-3);
    for m in [2, 3, 5] {
        let sweep = ball_ratio_sweep(m, 0.05, 1.5, 15).unwrap();
        for w in sweep.windows(2) {
            assert!(w[1].1 < w[0].1);
        }
        assert!(sweep.iter().all(|(_, v)| *v > (m - 1) as f64));
    }
    assert!(ball_isoperimetric_ratio(1, 1.0).is_err());
}

fn catenoid() -> CatenoidEmbedding {
    build_embedding(&solve_profile(&CatenoidParams::spherical(2, 1.0, 12.0)).unwrap()).unwrap()
}

#[test]
fn catenoid_bracket_closes() {
    let e = catenoid();
    let pts = interior_points(&e, 10, 3.0);
    let r = cheeger_bracket_hyperbolic(&BallModel(&e), &pts, 0.0, true, 1e-4).unwrap();
    assert_eq!(r.k, 2);
    assert_eq!(r.upper, 2.0);
    let lower = r.lower.unwrap();
    assert!((lower.value - 2.0).abs() < 1e-6 && !lower.vacuous);
    assert!(r.beta.unwrap().value.abs() < 1e-6);
    assert_eq!(r.determined, Some(2.0));
    assert!(r.bracket_valid);
}

#[test]
fn totally_geodesic_bracket() {
    let slice = PolynomialEmbedding::slice(3, 4);
    let pts = vec![vec![0.1, 0.2, -0.3], vec![0.5, -0.1, 0.2], vec![0.0, 0.0, 0.7]];
    let r = cheeger_bracket_hyperbolic(&slice, &pts, 0.0, true, 1e-8).unwrap();
    assert_eq!(r.determined, Some(2.0));
    assert!(r.beta.unwrap().value.abs() < 1e-8);
}

#[test]
fn cmc_bracket_has_upper_only() {
    let r = cheeger_bracket_cmc(3, 2.0).unwrap();
    assert!((r.upper - 1.5 * 3f64.sqrt()).abs() < 1e-15);
    assert!(r.lower.is_none() && r.determined.is_none());
}

#[test]
fn non_minimal_scenario_is_refused() {
    let e = catenoid().perturbed(1.05);
    let pts = interior_points(&e, 4, 2.0);
    assert!(matches!(
        cheeger_bracket_hyperbolic(&BallModel(&e), &pts, 0.0, true, 1e-4),
        Err(GeoError::NotMinimal { .. })
    ));
    let r = cheeger_bracket_hyperbolic(&BallModel(&e), &pts, 0.0, false, 1e-4).unwrap();
    assert!(r.alpha.unwrap() > 0.01 && r.determined.is_none());
}

#[test]
fn beta_vanishes_on_catenoid() {
    let e = catenoid();
    let be = BallModel(&e);
    let pts = interior_points(&e, 15, 4.0);
    let points: Vec<Vec<f64>> = pts.iter().map(|u| ahgeo_core::submanifold::Embedding::map(&be, u)).collect();
    let lee = LeeField::new(PoincareBall(4), LeeHyperbolic, &points, 1e-8).unwrap();
    assert!(beta_y(&be, &lee, &pts).unwrap().value.abs() < 1e-6);
}

#[test]
fn log_lee_is_subharmonic_enough() {
    let e = catenoid();
    let restricted = RestrictedLee { profile: e.profile.clone() };
    let pts = interior_points(&e, 12, 4.0);
    // û agrees with u ∘ f
    for u in &pts {
        let p: Vec<f64> = ahgeo_core::submanifold::Embedding::map(&BallModel(&e), u);
        let a = LeeHyperbolic.eval(&p);
        let b: f64 = restricted.eval(u);
        assert!((a - b).abs() < 1e-9 * a);
    }
    let metric = WarpedCatenoidMetric { profile: e.profile.clone() };
    let margin = log_lee_laplacian_margin(&metric, &LogRestrictedLee(restricted), 2, &pts).unwrap();
    assert!(margin >= -1e-4, "{margin}");
}
