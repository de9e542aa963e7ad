//! Drivers that evaluate an entry and assemble a report.

use ahgeo_core::catenoid::*;
use ahgeo_core::cheeger::*;
use ahgeo_core::holographic::*;
use ahgeo_core::linalg::Mat;
use ahgeo_core::metrics::PoincareBall;
use ahgeo_core::submanifold::*;
use ahgeo_core::tensor::{symmetry_residuals, Engine};
use ahgeo_core::{GeoError, MetricField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::catalog::{Ambient, CatalogEntry, EmbeddedEntry, Family, Geometry, Surface};
use crate::config::Config;
use crate::error::{CliError, CliResult};
use crate::report::{Basis, Check, Report, Series, Table};

const DUAL_PATH_TOL: f64 = 1e-5;
const EXACT_IDENTITY_TOL: f64 = 1e-6;
const EMBEDDING_IDENTITY_TOL: f64 = 1e-5;
const MINIMALITY_TOL: f64 = 1e-4;
const HYPERBOLOID_TOL: f64 = 1e-8;
const FIT_TOL: f64 = 1e-3;
const CHEEGER_TOL: f64 = 1e-6;
const LEE_TOL: f64 = 1e-8;

fn incompatible(entry: &CatalogEntry, runner: &'static str) -> CliError {
    CliError::IncompatibleEntry { entry: entry.name.clone(), kind: entry.kind.label(), runner }
}

fn new_report(command: &str, entry: &CatalogEntry, cfg: &Config) -> Report {
    let mut r = Report::new(format!("{command}:{}", entry.name), cfg);
    r.datum("entry", json!({ "name": entry.name, "kind": entry.kind, "parameters": entry.parameters, "note": entry.note }));
    r
}

/// Records a failed check for an error, passes values through.
fn attempt<T>(report: &mut Report, name: &str, r: Result<T, GeoError>) -> Option<T> {
    match r {
        Ok(v) => Some(v),
        Err(e) => {
            report.check(Check::failed(name, e));
            None
        }
    }
}

fn max_over<T>(items: &[T], mut f: impl FnMut(&T) -> Result<f64, GeoError>) -> Result<f64, GeoError> {
    let mut worst = 0.0f64;
    for it in items {
        let v = f(it)?;
        worst = if v.is_nan() { f64::NAN } else { worst.max(v) };
    }
    Ok(worst)
}

fn mat_json(m: &Mat<f64>) -> serde_json::Value {
    json!((0..m.n).map(|i| (0..m.n).map(|j| m.at(i, j)).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn family_of<'a>(entry: &'a CatalogEntry, runner: &'static str) -> CliResult<&'a Family> {
    match &entry.geometry {
        Geometry::Family(f) => Ok(f),
        _ => Err(incompatible(entry, runner)),
    }
}

fn sample_points(fam: &Family, cfg: &Config) -> Vec<Vec<f64>> {
    boundary_points(fam, cfg.points, (cfg.seed % 1000) as usize)
}

/// `(r, x)` drawn uniformly from the collar `(0.02, min(0.9 r_max, 1)) × box`.
fn collar_points(fam: &Family, count: usize, seed: u64) -> Vec<(f64, Vec<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (lo, hi) = fam.boundary_box();
    let top = (0.9 * fam.r_max()).min(1.0);
    let n = fam.boundary_dim();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..hi)).collect();
        if fam.boundary_in_domain(&x) {
            out.push((rng.gen_range(0.02..top), x));
        }
    }
    out
}

fn ball_points(dim: usize, count: usize, radius: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let x: Vec<f64> = (0..dim).map(|_| rng.gen_range(-radius..radius)).collect();
        if x.iter().map(|v| v * v).sum::<f64>() < radius * radius {
            out.push(x);
        }
    }
    out
}

fn dual_path_checks(report: &mut Report, fam: &Family, points: &[Vec<f64>], cfg: &Config) -> Option<Vec<DualPath>> {
    let ladder = cfg.ladder();
    let paths: Result<Vec<_>, _> = points.iter().map(|x| dual_path_check(fam, x, &ladder, false)).collect();
    let paths = attempt(report, "dual-path expansion", paths)?;
    for (k, label) in ["g1", "g2", "g3"].iter().enumerate() {
        let worst = paths.iter().fold(0.0f64, |a, d| a.max(d.residuals[k]));
        report.check(Check::small(format!("dual-path {label} max residual"), worst, DUAL_PATH_TOL, Basis::Identity));
    }
    Some(paths)
}

pub fn run_expand(entry: &CatalogEntry, cfg: &Config) -> CliResult<Report> {
    let fam = family_of(entry, "expand")?;
    let mut report = new_report("expand", entry, cfg);
    let points = sample_points(fam, cfg);
    report.datum("points", points.len());
    let Some(paths) = dual_path_checks(&mut report, fam, &points, cfg) else {
        return Ok(report);
    };
    let mut rows = Vec::new();
    for (p, d) in paths.iter().enumerate() {
        for k in 0..3 {
            rows.push(vec![p as f64, (k + 1) as f64, d.residuals[k]]);
        }
    }
    report.tables.push(Table {
        name: "dual-path".into(),
        columns: vec!["point".into(), "order".into(), "residual".into()],
        rows,
    });
    let first = &paths[0];
    report.datum(
        "expansion",
        json!({
            "x": points[0],
            "method": format!("{:?}", first.extracted.method),
            "g": first.extracted.g.iter().map(mat_json).collect::<Vec<_>>(),
            "error_estimates": first.extracted.error_estimates,
            "predicted": first.predicted.iter().map(mat_json).collect::<Vec<_>>(),
        }),
    );
    let mut closed = 0.0f64;
    let mut have_closed = false;
    for (x, d) in points.iter().zip(&paths) {
        if let Some(c) = fam.closed_form_expansion(x) {
            have_closed = true;
            for k in 0..4 {
                closed = closed.max(d.extracted.g[k].sub(&c[k]).max_abs());
            }
        }
    }
    if have_closed {
        report.check(Check::small("expansion matches closed form", closed, DUAL_PATH_TOL, Basis::ClosedForm));
    }
    if let Some(ladder) = attempt(&mut report, "ladder extraction", extract_metric_expansion(fam, &points[0], &cfg.ladder(), true)) {
        let gap = (0..4).fold(0.0f64, |a, k| a.max(ladder.g[k].sub(&first.extracted.g[k]).max_abs()));
        report.datum("ladder_vs_exact", json!({ "max_difference": gap, "error_estimates": ladder.error_estimates }));
    }
    Ok(report)
}

fn flag_json(f: &Flag) -> serde_json::Value {
    json!({ "value": f.value, "residual": f.residual, "threshold": f.threshold })
}

pub fn run_classify(entry: &CatalogEntry, cfg: &Config) -> CliResult<Report> {
    let fam = family_of(entry, "classify")?;
    let mut report = new_report("classify", entry, cfg);
    let ccfg =
        ClassifyConfig { tol: cfg.tol, ladder: cfg.ladder(), points: boundary_points(fam, cfg.points.min(6), (cfg.seed % 1000) as usize), ricci_radii: 4 };
    let Some(c) = attempt(&mut report, "classification", classify(fam, &ccfg)) else {
        return Ok(report);
    };
    report.datum("wpe", c.wpe);
    report.datum(
        "flags",
        json!({
            "g1_zero": flag_json(&c.g1_zero),
            "umbilic": flag_json(&c.umbilic),
            "totally_geodesic": flag_json(&c.totally_geodesic),
            "mean_curvature_zero": flag_json(&c.mean_curvature_zero),
            "g2_is_minus_schouten": c.g2_is_minus_schouten.as_ref().map(flag_json),
            "w0i0j_zero": c.w0i0j_zero.as_ref().map(flag_json),
            "c1_zero": flag_json(&c.c1_zero),
            "c2_zero": flag_json(&c.c2_zero),
            "ricci_order_m1_zero": flag_json(&c.ricci_order_m1_zero),
            "ricci_order0_zero": flag_json(&c.ricci_order0_zero),
        }),
    );
    report.datum("scalar_defect", [c.scalar_defect.0, c.scalar_defect.1]);
    report.datum(
        "ricci_sign",
        json!({
            "min_eigenvalue": c.ricci_sign.min_eigenvalue,
            "max_eigenvalue": c.ricci_sign.max_eigenvalue,
            "samples": c.ricci_sign.samples,
            "nonnegative": c.ricci_sign.nonnegative,
            "nonpositive": c.ricci_sign.nonpositive,
        }),
    );
    report.datum(
        "coherence",
        json!({
            "part1": [c.part1.expansion, c.part1.ricci, c.part1.scalar_and_umbilic],
            "part2": c.part2.map(|p| [p.expansion, p.ricci, p.scalar_and_umbilic]),
            "nonnegative_ricci_check": c.nonnegative_ricci_check,
            "nonpositive_ricci_check": c.nonpositive_ricci_check,
        }),
    );
    if let Some(b) = &c.mean_curvature_bound {
        report.datum("mean_curvature_bound", json!({ "h2": b.h2, "bound": b.bound, "holds": b.holds, "equality": b.equality }));
    }
    report.notes.extend(c.notes.iter().cloned());

    report.check(Check::flag("first-order characterisations agree", c.part1.agrees(), true, Basis::Identity));
    if let Some(p) = c.part2 {
        report.check(Check::flag("second-order characterisations agree", p.agrees(), true, Basis::Identity));
    }
    report.check(Check::flag("classification equivalences consistent", c.consistent, true, Basis::Identity));
    let expect = fam.expected_classification();
    if let (Some(w), Some(got)) = (expect.wpe, c.wpe) {
        report.check(Check::flag("wpe", got, w, Basis::ClosedForm));
    }
    if let Some(u) = expect.umbilic {
        report.check(Check::flag("umbilic", c.umbilic.value, u, Basis::ClosedForm));
    }
    if let Some(t) = expect.totally_geodesic {
        report.check(Check::flag("totally geodesic", c.totally_geodesic.value, t, Basis::ClosedForm));
    }
    if let Some((c1, c2)) = expect.scalar_defect {
        report.check(Check::close("scalar defect c1", c.scalar_defect.0, c1, 1e-5, Basis::ClosedForm));
        report.check(Check::close("scalar defect c2", c.scalar_defect.1, c2, 1e-5, Basis::ClosedForm));
    }
    Ok(report)
}

fn solve_catenoid(entry: &CatalogEntry, cfg: &Config, runner: &'static str) -> CliResult<ProfileSolution> {
    let Geometry::Catenoid(p) = &entry.geometry else {
        return Err(incompatible(entry, runner));
    };
    let mut p = *p;
    p.s_max = cfg.smax;
    p.validate()?;
    Ok(solve_profile(&p)?)
}

pub fn run_catenoid(entry: &CatalogEntry, cfg: &Config) -> CliResult<Report> {
    let sol = solve_catenoid(entry, cfg, "catenoid")?;
    let mut report = new_report("catenoid", entry, cfg);
    let n = sol.n();
    report.tables.push(Table {
        name: "profile".into(),
        columns: ["s", "x1", "x1p", "x1pp", "residual"].map(String::from).to_vec(),
        rows: sol.samples.iter().map(|q| vec![q.s, q.x1, q.dx1, q.ddx1, q.residual]).collect(),
    });
    report.series.push(Series {
        name: "profile x1".into(),
        x_label: "s".into(),
        y_label: "x1".into(),
        points: sol.samples.iter().map(|q| [q.s, q.x1]).collect(),
    });
    report.series.push(Series {
        name: "phase".into(),
        x_label: "s".into(),
        y_label: "phi".into(),
        points: sol.samples.iter().map(|q| [q.s, q.phi]).collect(),
    });
    report.datum(
        "profile",
        json!({
            "samples": sol.samples.len(),
            "first_integral": sol.first_integral,
            "phi_infinity": sol.phi_infinity(),
            "log_switch_s": sol.switch_s,
            "residual_max": sol.residual_max,
        }),
    );
    report.check(Check::small("first integral drift", sol.first_integral_drift(), 1e-6, Basis::Identity));
    report.check(Check::small("profile ODE defect", sol.max_ode_defect(), 1e-8, Basis::Identity));
    if let Some(tg) = attempt(&mut report, "two-grid convergence", sol.two_grid_check()) {
        report.datum("two_grid", json!({ "coarse_vs_half": tg.coarse_vs_half, "half_vs_quarter": tg.half_vs_quarter }));
        report.check(Check::small("two-grid difference", tg.coarse_vs_half, 1e-7, Basis::Identity));
    }

    let Some(e) = attempt(&mut report, "embedding", build_embedding(&sol)) else {
        return Ok(report);
    };
    let pts = interior_points(&e, cfg.points, 3.0);
    let hyp = pts
        .iter()
        .map(|u| hyperboloid_residual(&e, u) / (1.0 + e.profile.eval(u[0]).0.powi(2)))
        .fold(0.0f64, f64::max);
    report.check(Check::small("hyperboloid constraint", hyp, HYPERBOLOID_TOL, Basis::Convention));
    if let Some(v) = attempt(&mut report, "ball isometry", max_over(&pts, |u| ball_isometry_residual(&e, u))) {
        report.check(Check::small("ball model isometry", v, HYPERBOLOID_TOL, Basis::Identity));
    }
    if let Some(v) = attempt(&mut report, "warped product", max_over(&pts, |u| warped_product_residual(&e, u))) {
        report.check(Check::small("induced warped-product metric", v, 1e-6, Basis::Derived));
    }
    if let Some(v) = attempt(&mut report, "minimality", minimality_residual(&e, &pts)) {
        report.check(Check::small("max mean curvature", v, MINIMALITY_TOL, Basis::Derived));
    }
    if let Some(v) = attempt(&mut report, "perturbed minimality", minimality_residual(&e.perturbed(1.05), &pts)) {
        report.check(Check::above("perturbed profile is detected as non-minimal", v, 1e-2));
    }
    let ball = BallModel(&e);
    let amb = PoincareBall(n + 2);
    if let Some(v) = attempt(
        &mut report,
        "minimal hypersurface identities",
        max_over(&pts, |u| {
            let r = minimal_hyperbolic_identities(&ball, &amb, u, MINIMALITY_TOL)?;
            Ok(r.ricci.max(r.scalar))
        }),
    ) {
        report.check(Check::small("minimal hypersurface Ricci and scalar identities", v, 1e-4, Basis::Identity));
    }
    match asymptotic_curvature(&sol) {
        Ok(a) => {
            report.datum("asymptotic_curvature", json!({ "s": a.s, "radial": a.radial, "spherical": a.spherical }));
            report.check(Check::close("asymptotic radial sectional curvature", a.radial, -1.0, FIT_TOL, Basis::Derived));
            report.check(Check::close("asymptotic spherical sectional curvature", a.spherical, -1.0, FIT_TOL, Basis::Derived));
        }
        Err(err) => report.check(Check::failed("asymptotic curvature", err)),
    }
    if let Some(f) = attempt(&mut report, "profile expansion", holographic_profile_expansion(&sol, &profile_ladder(), FIT_TOL)) {
        report.datum(
            "profile_expansion",
            json!({ "c2": f.c2, "beta1": f.beta1, "beta2": f.beta2, "error_estimate": f.error_estimate, "wpe": f.wpe }),
        );
        report.check(Check::close("beta1", f.beta1, 0.0, FIT_TOL, Basis::Derived));
        report.check(Check::close("beta2", f.beta2, f.expected_beta2, FIT_TOL, Basis::Derived));
        report.check(Check::flag("wpe", f.wpe, true, Basis::Derived));
    }
    let z = vec![0.4; n].iter().enumerate().map(|(k, v)| v - 0.35 * k as f64).collect::<Vec<_>>();
    let ladder = ahgeo_core::fit::Ladder::default();
    if let Some(b) = attempt(&mut report, "boundary invariant", catenoid_boundary_invariant(&e, &z, 1.0, &ladder)) {
        report.datum(
            "boundary_invariant",
            json!({ "eta_hat": b.eta_hat, "b00": b.b00, "invariant": b.invariant, "mean_expansion": b.mean_expansion, "error_estimate": b.error_estimate }),
        );
        report.check(Check::small("boundary conformal invariant", b.invariant, FIT_TOL, Basis::Derived));
        report.check(Check::small("linear coefficient of mean curvature", b.mean_expansion[1], FIT_TOL, Basis::Derived));
        let w: f64 = 0.3;
        if let Some(g) = attempt(&mut report, "gauge change", catenoid_boundary_invariant(&e, &z, w.exp(), &ladder)) {
            report.check(Check::close("invariant weight under gauge change", b.invariant, w.exp() * g.invariant, FIT_TOL, Basis::Derived));
        }
    }
    cheeger_of_catenoid(&mut report, &e, &pts);
    Ok(report)
}

fn cheeger_report_json(r: &CheegerReport) -> serde_json::Value {
    json!({
        "k": r.k,
        "c": r.c,
        "upper": r.upper,
        "alpha": r.alpha,
        "beta": r.beta.as_ref().map(|b| b.value),
        "lower": r.lower.map(|l| l.value),
        "lower_vacuous": r.lower.map(|l| l.vacuous),
        "bracket_valid": r.bracket_valid,
        "determined": r.determined,
    })
}

fn cheeger_of_catenoid(report: &mut Report, e: &CatenoidEmbedding, pts: &[Vec<f64>]) {
    let n = e.n();
    let ball = BallModel(e);
    let Some(r) = attempt(report, "cheeger bracket", cheeger_bracket_hyperbolic(&ball, pts, 0.0, true, MINIMALITY_TOL)) else {
        return;
    };
    report.datum("cheeger", cheeger_report_json(&r));
    report.check(Check::close("cheeger upper bound", r.upper, n as f64, CHEEGER_TOL, Basis::Derived));
    if let Some(l) = r.lower {
        report.check(Check::close("cheeger lower bound", l.value, n as f64, CHEEGER_TOL, Basis::Derived));
    }
    report.check(Check::flag("cheeger constant determined", r.determined.is_some(), true, Basis::Derived));
    let restricted = RestrictedLee { profile: e.profile.clone() };
    let metric = WarpedCatenoidMetric { profile: e.profile.clone() };
    if let Some(m) = attempt(report, "log Lee margin", log_lee_laplacian_margin(&metric, &LogRestrictedLee(restricted), n, pts)) {
        report.check(Check::above("laplacian of log Lee function minus k", m, -1e-4));
    }
}

/// Upper-bound report for asymptotically CMC data.
pub fn run_cheeger_cmc(k: usize, c: f64, cfg: &Config) -> CliResult<Report> {
    let mut report = Report::new(format!("cheeger:cmc(k={k}, c={c:?})"), cfg);
    let r = cheeger_bracket_cmc(k, c)?;
    report.datum("cheeger", cheeger_report_json(&r));
    for p in [1.5, 2.0, 3.0] {
        let chain = cheeger_upper_from_lambda(lambda1p_upper(k, c, p)?, p)?;
        report.check(Check::close(format!("eigenvalue chain p = {p}"), chain, r.upper, 1e-12 * r.upper.max(1.0), Basis::Identity));
    }
    Ok(report)
}

fn lee_checks(report: &mut Report, dim: usize, cfg: &Config) {
    let pts = ball_points(dim, cfg.points.max(50), 0.9, cfg.seed);
    let mut pde = 0.0f64;
    let mut b = 0.0f64;
    let mut slack = 0.0f64;
    for x in &pts {
        let Some(s) = attempt(report, "lee function", lee_hyperbolic(x)) else {
            return;
        };
        pde = pde.max(s.pde_residual(dim as f64) / s.u);
        b = b.max(s.b.max_abs() / (s.u * s.u));
        slack = slack.max((s.gradient_slack() - 4.0).abs() / (s.u * s.u.max(1.0)));
    }
    report.datum("lee_samples", pts.len());
    report.check(Check::small("Lee function eigen-equation", pde, LEE_TOL, Basis::ClosedForm));
    report.check(Check::small("Lee function trace-free hessian", b, LEE_TOL, Basis::ClosedForm));
    report.check(Check::small("Lee function gradient slack minus 4", slack, LEE_TOL, Basis::ClosedForm));
}

pub fn run_cheeger(entry: &CatalogEntry, cfg: &Config) -> CliResult<Report> {
    let mut report = new_report("cheeger", entry, cfg);
    match &entry.geometry {
        Geometry::Chart(Ambient::Hyperbolic(m)) => {
            let dim = m.dim();
            lee_checks(&mut report, dim, cfg);
            if let Some(sweep) = attempt(&mut report, "ball ratio sweep", ball_ratio_sweep(dim, 0.05, 1.5, 15)) {
                let decreasing = sweep.windows(2).all(|w| w[1].1 < w[0].1);
                report.check(Check::flag("ball ratio strictly decreasing", decreasing, true, Basis::Derived));
                let floor = (dim - 1) as f64;
                report.check(Check::flag("ball ratio above dim - 1", sweep.iter().all(|p| p.1 > floor), true, Basis::Derived));
                report.series.push(Series {
                    name: "ball isoperimetric ratio".into(),
                    x_label: "R".into(),
                    y_label: "ratio".into(),
                    points: sweep.iter().map(|&(r, v)| [r, v]).collect(),
                });
            }
            if let Some(v) = attempt(&mut report, "ball ratio at R = 10", ball_isoperimetric_ratio(dim, 10.0)) {
                report.check(Check::close("ball ratio at R = 10", v, (dim - 1) as f64, FIT_TOL, Basis::Derived));
            }
            let k = dim - 1;
            let u = cheeger_upper_bound(k, 0.0)?;
            report.check(Check::close("upper bound for minimal data", u, k as f64, 0.0, Basis::ClosedForm));
        }
        Geometry::Embedding(EmbeddedEntry { surface, ambient: Ambient::Hyperbolic(_), sample_radius, .. }) => {
            let pts = ball_points(surface.intrinsic_dim(), cfg.points, *sample_radius, cfg.seed);
            let k = surface.intrinsic_dim() - 1;
            if let Some(r) = attempt(&mut report, "cheeger bracket", cheeger_bracket_hyperbolic(surface, &pts, 0.0, true, 1e-8)) {
                report.datum("cheeger", cheeger_report_json(&r));
                report.check(Check::close("cheeger upper bound", r.upper, k as f64, CHEEGER_TOL, Basis::Derived));
                match r.determined {
                    Some(v) => report.check(Check::close("cheeger constant determined", v, k as f64, CHEEGER_TOL, Basis::Derived)),
                    None => report.check(Check::flag("cheeger constant determined", false, true, Basis::Derived)),
                }
            }
        }
        Geometry::Catenoid(_) => {
            let sol = solve_catenoid(entry, cfg, "cheeger")?;
            let Some(e) = attempt(&mut report, "embedding", build_embedding(&sol)) else {
                return Ok(report);
            };
            let pts = interior_points(&e, cfg.points, 3.0);
            let ball = BallModel(&e);
            let points: Vec<Vec<f64>> = pts.iter().map(|u| ball.map(u)).collect();
            if let Some(lee) = attempt(&mut report, "Lee field", LeeField::new(PoincareBall(e.n() + 2), LeeHyperbolic, &points, LEE_TOL)) {
                if let Some(b) = attempt(&mut report, "beta", beta_y(&ball, &lee, &pts)) {
                    report.check(Check::small("beta on the catenoid", b.value, CHEEGER_TOL, Basis::Derived));
                }
            }
            cheeger_of_catenoid(&mut report, &e, &pts);
        }
        _ => return Err(incompatible(entry, "cheeger")),
    }
    Ok(report)
}

fn verify_family(report: &mut Report, fam: &Family, cfg: &Config) {
    let collar = collar_points(fam, 50, cfg.seed);
    let mut lap = 0.0f64;
    let mut scal = 0.0f64;
    let mut inv1 = 0.0f64;
    let mut inv2 = 0.0f64;
    for (r, x) in &collar {
        let Some(res) = attempt(report, "exact identities", exact_identity_residuals(fam, *r, x)) else {
            return;
        };
        lap = lap.max(res.laplace_r);
        scal = scal.max(res.scalar_conformal);
        let Some((a, b)) = attempt(report, "inverse metric identities", inverse_metric_identity_residuals(fam, *r, x)) else {
            return;
        };
        inv1 = inv1.max(a);
        inv2 = inv2.max(b);
    }
    report.datum("collar_points", collar.len());
    report.check(Check::small("laplacian of r equals minus level-set mean curvature", lap, EXACT_IDENTITY_TOL, Basis::Identity));
    report.check(Check::small("scalar curvature of the singular metric", scal, EXACT_IDENTITY_TOL, Basis::Identity));
    report.check(Check::small("first r-derivative of inverse metric", inv1, cfg.tol, Basis::Identity));
    report.check(Check::small("second r-derivative of inverse metric", inv2, cfg.tol, Basis::Identity));
    let points = sample_points(fam, cfg);
    dual_path_checks(report, fam, &points, cfg);
    if let Some(v) = attempt(report, "boundary normal Ricci", max_over(&points, |x| Ok(boundary_data(fam, x)?.r00_residual().abs()))) {
        report.check(Check::small("boundary normal Ricci component", v, cfg.tol, Basis::Identity));
    }
    if let Some(v) = attempt(report, "mean curvature expansion", max_over(&points, |x| Ok(mean_curvature_expansion(fam, x)?.max_residual()))) {
        report.check(Check::small("mean curvature expansion", v, cfg.tol, Basis::Identity));
    }
}

fn verify_embedding<E: Embedding, M: MetricField>(report: &mut Report, e: &E, ambient: &M, pts: &[Vec<f64>]) {
    if let Some(v) = attempt(report, "gauss", max_over(pts, |u| gauss_residual(e, ambient, u))) {
        report.check(Check::small("gauss equation", v, EMBEDDING_IDENTITY_TOL, Basis::Identity));
    }
    if e.intrinsic_dim() >= 3 {
        if let Some(v) = attempt(report, "fialkow-gauss", max_over(pts, |u| fialkow_gauss_residual(e, ambient, u))) {
            report.check(Check::small("fialkow-gauss equation", v, EMBEDDING_IDENTITY_TOL, Basis::Identity));
        }
    }
}

pub fn run_verify(entry: &CatalogEntry, cfg: &Config) -> CliResult<Report> {
    let mut report = new_report("verify", entry, cfg);
    match &entry.geometry {
        Geometry::Family(fam) => verify_family(&mut report, fam, cfg),
        Geometry::Chart(m) => {
            let pts = ball_points(m.dim(), cfg.points, 0.9, cfg.seed);
            let eng = Engine::exact();
            let mut sym = 0.0f64;
            let mut hyp = 0.0f64;
            for x in &pts {
                let Some((jet, _)) = attempt(&mut report, "metric jet", eng.jet(m, x)) else {
                    return Ok(report);
                };
                let Some(b) = attempt(&mut report, "curvature", eng.curvature(m, x)) else {
                    return Ok(report);
                };
                sym = sym.max(symmetry_residuals(&b, &jet).max());
                hyp = hyp.max(hyperbolic_residual(&b) / (1.0 + b.g.max_abs() * b.g.max_abs()));
            }
            report.check(Check::small("curvature tensor symmetries", sym, cfg.tol, Basis::Identity));
            if matches!(m, Ambient::Hyperbolic(_)) {
                report.check(Check::small("constant sectional curvature -1", hyp, cfg.tol, Basis::ClosedForm));
                lee_checks(&mut report, m.dim(), cfg);
            }
        }
        Geometry::Embedding(emb) => {
            let m = emb.surface.intrinsic_dim();
            let pts = ball_points(m, cfg.points.min(10), emb.sample_radius, cfg.seed);
            verify_embedding(&mut report, &emb.surface, &emb.ambient, &pts);
            if let (Surface::Sphere(s), true) = (&emb.surface, m >= 3) {
                // both sides equal h / (2ρ²) for a round sphere in flat space
                let worst = max_over(&pts, |u| {
                    let fg = fialkow_gauss(s, &emb.ambient, u)?;
                    let h = induced_metric(s, &emb.ambient, u)?.scale(0.5 / (s.rho * s.rho));
                    Ok(fg.lhs.sub(&h).max_abs().max(fg.rhs.sub(&h).max_abs()))
                });
                if let Some(v) = attempt(&mut report, "round sphere schouten", worst) {
                    report.check(Check::small("round sphere: both sides equal h/(2 rho^2)", v, EMBEDDING_IDENTITY_TOL, Basis::ClosedForm));
                }
            }
            if let Ambient::Hyperbolic(b) = &emb.ambient {
                if b.dim() == m + 1 {
                    let v = max_over(&pts, |u| {
                        let r = pe_hypersurface_identities(&emb.surface, b, u, 1e-8)?;
                        Ok(r.ricci.max(r.scalar))
                    });
                    if let Some(v) = attempt(&mut report, "hypersurface identities", v) {
                        report.check(Check::small("hypersurface Ricci and scalar identities", v, EMBEDDING_IDENTITY_TOL, Basis::Identity));
                    }
                }
            }
            report.datum("sample_points", pts.len());
        }
        Geometry::Catenoid(_) => {
            let sol = solve_catenoid(entry, cfg, "verify")?;
            let Some(e) = attempt(&mut report, "embedding", build_embedding(&sol)) else {
                return Ok(report);
            };
            let pts = interior_points(&e, cfg.points.min(10), 3.0);
            let ball = BallModel(&e);
            let amb = PoincareBall(e.n() + 2);
            verify_embedding(&mut report, &ball, &amb, &pts);
            let v = max_over(&pts, |u| {
                let r = pe_hypersurface_identities(&ball, &amb, u, 1e-8)?;
                Ok(r.ricci.max(r.scalar))
            });
            if let Some(v) = attempt(&mut report, "hypersurface identities", v) {
                report.check(Check::small("hypersurface Ricci and scalar identities", v, 1e-4, Basis::Identity));
            }
            let v = max_over(&pts, |u| {
                let r = minimal_hyperbolic_identities(&ball, &amb, u, MINIMALITY_TOL)?;
                Ok(r.ricci.max(r.scalar))
            });
            if let Some(v) = attempt(&mut report, "minimal hypersurface identities", v) {
                report.check(Check::small("minimal hypersurface Ricci and scalar identities", v, 1e-4, Basis::Identity));
            }
        }
    }
    Ok(report)
}
