use ahgeo_core::catenoid::*;
use ahgeo_core::metrics::PoincareBall;
use ahgeo_core::submanifold::{extrinsic_data, minimal_hyperbolic_identities};
use ahgeo_core::{Dual, GeoError};

fn max_err(sol: &ProfileSolution, exact: impl Fn(f64) -> (f64, f64), hi: f64) -> f64 {
    sol.samples
        .iter()
        .filter(|q| q.s <= hi)
        .map(|q| {
            let (x, dx) = exact(q.s);
            ((q.x1 - x).abs() / x.max(1.0)).max((q.dx1 - dx).abs() / dx.abs().max(1.0))
        })
        .fold(0.0, f64::max)
}

#[test]
fn exact_profiles() {
    for n in [1, 2, 3] {
        let e = solve_profile(&CatenoidParams::with_data(n, 0, 1.0, 1.0, 5.0)).unwrap();
        assert!(max_err(&e, |s| (s.exp(), s.exp()), 5.0) < 1e-8);
        let c = solve_profile(&CatenoidParams::with_data(n, -1, 1.0, 0.0, 5.0)).unwrap();
        assert!(max_err(&c, |s| (s.cosh(), s.sinh()), 5.0) < 1e-8);
        let eps: f64 = 1e-3;
        let sh = solve_profile(&CatenoidParams::with_data(n, 1, eps.sinh(), eps.cosh(), 5.0)).unwrap();
        assert!(max_err(&sh, |s| ((s + eps).sinh(), (s + eps).cosh()), 5.0) < 1e-7);
        for sol in [&e, &c, &sh] {
            assert!(sol.residual_max < 10.0 * sol.params.integrator.abs_tol);
            assert!(sol.max_ode_defect() < 1e-12);
        }
    }
}

#[test]
fn dense_evaluation_matches_closed_form() {
    let c = solve_profile(&CatenoidParams::with_data(2, -1, 1.0, 0.0, 6.0)).unwrap();
    for s in [-3.3, -0.01, 0.77, 2.5, 5.9] {
        let (x, dx, _) = c.eval(s);
        assert!((x - f64::cosh(s)).abs() < 1e-8 * x);
        assert!((dx - f64::sinh(s)).abs() < 1e-8 * x);
        // derivative of the evaluator is x₁'
        let (xd, _, _) = c.eval(Dual::new(s, 1.0));
        assert!((xd.d - f64::sinh(s)).abs() < 1e-8 * x);
    }
}

#[test]
fn first_integral_is_conserved() {
    for (n, a) in [(1, 0.5), (2, 1.0), (3, 2.0)] {
        let sol = solve_profile(&CatenoidParams::spherical(n, a, 8.0)).unwrap();
        let k = -a.powi(2 * n as i32) * (a * a + 1.0);
        assert!((sol.first_integral - k).abs() < 1e-14 * k.abs());
        assert!(sol.first_integral_drift() < 1e-6, "{}", sol.first_integral_drift());
    }
}

#[test]
fn log_variable_switch() {
    let mut p = CatenoidParams::spherical(2, 1.0, 20.0);
    p.integrator.x_switch = 1e3;
    let sol = solve_profile(&p).unwrap();
    assert!(sol.switch_s.is_some());
    let base = solve_profile(&CatenoidParams::spherical(2, 1.0, 20.0)).unwrap();
    let a = sol.eval(15.0).0;
    let b = base.eval(15.0).0;
    assert!((a - b).abs() < 1e-7 * b);
    assert!(sol.first_integral_drift() < 1e-6);
}

#[test]
fn two_grid_convergence() {
    let sol = solve_profile(&CatenoidParams::spherical(2, 1.0, 8.0)).unwrap();
    let tg = sol.two_grid_check().unwrap();
    assert!(tg.coarse_vs_half < 1e-8, "{tg:?}");
    let mut p = CatenoidParams::spherical(2, 1.0, 4.0);
    p.integrator.abs_tol = 1e-6;
    p.integrator.rel_tol = 1e-6;
    let tg = solve_profile(&p).unwrap().two_grid_check().unwrap();
    assert!(tg.observed_order() > 4.0, "{tg:?}");
}

#[test]
fn invalid_parameters() {
    assert!(matches!(
        solve_profile(&CatenoidParams::spherical(2, -1.0, 3.0)),
        Err(GeoError::InvalidParameter(_))
    ));
    assert!(matches!(
        solve_profile(&CatenoidParams::with_data(2, 2, 1.0, 0.0, 3.0)),
        Err(GeoError::InvalidParameter(_))
    ));
    // falling into the axis
    assert!(matches!(
        solve_profile(&CatenoidParams::with_data(2, -1, 0.3, -2.0, 3.0)),
        Err(GeoError::Blowup { .. }) | Err(GeoError::ArcLengthViolation { .. })
    ));
    let c = solve_profile(&CatenoidParams::with_data(2, -1, 1.0, 0.0, 3.0)).unwrap();
    assert!(build_embedding(&c).is_err());
}

#[test]
fn ball_transport() {
    let o = hyperboloid_to_ball(&[0.0, 0.0, 0.0, 1.0]);
    assert!(o.iter().all(|v| *v == 0.0));
    // the geodesic (sinh t e_0, cosh t) lands on the diameter along e_0
    for t in [0.3, 2.0, 7.0] {
        let p = hyperboloid_to_ball(&[f64::sinh(t), 0.0, 0.0, f64::cosh(t)]);
        assert!(p[1] == 0.0 && p[2] == 0.0 && (p[0] - (t / 2.0).tanh()).abs() < 1e-15);
    }
    let x = [0.3, -0.5, 0.2];
    let y = hyperboloid_to_ball(&ball_to_hyperboloid(&x));
    assert!(x.iter().zip(&y).all(|(a, b)| (a - b).abs() < 1e-15));
    let h = ball_to_hyperboloid(&x);
    assert!((h[0] * h[0] + h[1] * h[1] + h[2] * h[2] - h[3] * h[3] + 1.0).abs() < 1e-13);
}

fn catenoid(n: usize, a: f64, s_max: f64) -> CatenoidEmbedding {
    build_embedding(&solve_profile(&CatenoidParams::spherical(n, a, s_max)).unwrap()).unwrap()
}

#[test]
fn embedding_geometry() {
    let e = catenoid(2, 1.0, 12.0);
    for u in [[0.0, 0.2, -0.3], [1.0, 0.7, 0.1], [-2.5, -1.0, 2.0], [6.0, 0.0, 0.0]] {
        assert!(hyperboloid_residual(&e, &u) < 1e-8 * (1.0 + e.profile.eval(u[0]).0.powi(2)));
        assert!(warped_product_residual(&e, &u).unwrap() < 1e-6);
    }
    for u in [[0.0, 0.2, -0.3], [1.0, 0.7, 0.1], [-2.5, -1.0, 2.0]] {
        assert!(ball_isometry_residual(&e, &u).unwrap() < 1e-8);
    }
}

#[test]
fn degenerate_catenoid_is_totally_geodesic() {
    let eps: f64 = 1e-3;
    let sol = solve_profile(&CatenoidParams::with_data(2, 1, eps.sinh(), eps.cosh(), 6.0)).unwrap();
    let e = build_embedding(&sol).unwrap();
    assert!(sol.samples.iter().all(|q| q.phi.abs() < 1e-14));
    let pts = interior_points(&e, 6, 3.0);
    assert!(minimality_residual(&e, &pts).unwrap() < 1e-8);
    let d = extrinsic_data(&BallModel(&e), &PoincareBall(4), &pts[2]).unwrap();
    assert!(d.sff[0].max_abs() < 1e-8);
}

#[test]
fn catenoid_is_minimal() {
    let e = catenoid(2, 1.0, 12.0);
    let pts = interior_points(&e, 12, 3.0);
    assert!(minimality_residual(&e, &pts).unwrap() < 1e-4);
    assert!(minimality_residual(&e.perturbed(1.05), &pts).unwrap() > 0.01);
    for u in &pts {
        let r = minimal_hyperbolic_identities(&BallModel(&e), &PoincareBall(4), u, 1e-4).unwrap();
        assert!(r.ricci < 1e-4 && r.scalar < 1e-4, "{r:?}");
    }
    // not totally geodesic: at the neck
    let d = extrinsic_data(&BallModel(&e), &PoincareBall(4), &[0.0, 0.3, 0.1]).unwrap();
    assert!(d.sff_norm2() > 0.1);
    let e3 = catenoid(3, 0.7, 8.0);
    assert!(minimality_residual(&e3, &interior_points(&e3, 5, 2.0)).unwrap() < 1e-4);
}

#[test]
fn asymptotic_sectional_curvatures() {
    let c = solve_profile(&CatenoidParams::with_data(2, -1, 1.0, 0.0, 10.0)).unwrap();
    let a = asymptotic_curvature(&c).unwrap();
    assert!((a.radial + 1.0).abs() < 1e-6 && (a.spherical + 1.0).abs() < 1e-6);
    let ex = solve_profile(&CatenoidParams::with_data(2, 0, 1.0, 1.0, 10.0)).unwrap();
    let a = asymptotic_curvature(&ex).unwrap();
    assert!((a.spherical + 1.0).abs() < 1e-6);
    let sph = solve_profile(&CatenoidParams::spherical(2, 1.0, 12.0)).unwrap();
    let a = asymptotic_curvature(&sph).unwrap();
    assert!((a.radial + 1.0).abs() < 1e-3 && (a.spherical + 1.0).abs() < 1e-3);
    let short = solve_profile(&CatenoidParams::spherical(2, 1.0, 1.0)).unwrap();
    assert!(matches!(asymptotic_curvature(&short), Err(GeoError::InsufficientRange { .. })));
}

#[test]
fn holographic_profile_fit() {
    let ladder = profile_ladder();
    let eps: f64 = 1e-9;
    let sh = solve_profile(&CatenoidParams::with_data(2, 1, eps.sinh(), eps.cosh(), 12.0)).unwrap();
    let f = holographic_profile_expansion(&sh, &ladder, 1e-3).unwrap();
    assert!((f.c2 - 0.25).abs() < 1e-5 && f.beta1.abs() < 1e-5 && (f.beta2 + 0.5).abs() < 1e-5, "{f:?}");
    assert!(f.wpe);

    let ex = solve_profile(&CatenoidParams::with_data(2, 0, 1.0, 1.0, 12.0)).unwrap();
    let f = holographic_profile_expansion(&ex, &ladder, 1e-3).unwrap();
    assert!((f.c2 - 1.0).abs() < 1e-5 && f.beta1.abs() < 1e-5 && f.beta2.abs() < 1e-5, "{f:?}");
    assert!(f.wpe && f.expected_beta2 == 0.0);

    let ch = solve_profile(&CatenoidParams::with_data(2, -1, 1.0, 0.0, 12.0)).unwrap();
    let f = holographic_profile_expansion(&ch, &ladder, 1e-3).unwrap();
    assert!((f.c2 - 0.25).abs() < 1e-5 && (f.beta2 - 0.5).abs() < 1e-5);

    for (n, a) in [(2, 1.0), (3, 0.6), (1, 2.0)] {
        let sol = solve_profile(&CatenoidParams::spherical(n, a, 12.0)).unwrap();
        let f = holographic_profile_expansion(&sol, &ladder, 1e-3).unwrap();
        assert!(f.beta1.abs() < 1e-3 && (f.beta2 + 0.5).abs() < 1e-3, "{f:?}");
        assert!(f.wpe);
    }
    let short = solve_profile(&CatenoidParams::spherical(2, 1.0, 5.0)).unwrap();
    assert!(matches!(
        holographic_profile_expansion(&short, &ladder, 1e-3),
        Err(GeoError::InsufficientRange { .. })
    ));
}

#[test]
fn boundary_invariant_vanishes() {
    let e = catenoid(2, 1.0, 12.0);
    let phi_inf = e.profile.phi_infinity();
    let ladder = ahgeo_core::fit::Ladder::default();
    let z = [0.4, -0.3];
    let b = catenoid_boundary_invariant(&e, &z, 1.0, &ladder).unwrap();
    // the end is asymptotic to the latitude sphere at height tanh φ∞
    assert!((b.eta_hat.abs() - 2.0 * phi_inf.sinh()).abs() < 1e-3, "{b:?} {phi_inf}");
    assert!((b.b00.abs() - phi_inf.sinh()).abs() < 1e-3);
    assert!(b.invariant.abs() < 1e-3);
    assert!(b.mean_expansion[1].abs() < 1e-3);
    let w: f64 = 0.3;
    let g = catenoid_boundary_invariant(&e, &z, w.exp(), &ladder).unwrap();
    assert!((b.invariant - w.exp() * g.invariant).abs() < 1e-3);
}
