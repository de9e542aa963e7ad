//! One line per acceptance criterion; exits nonzero if any fails.

use ahgeo::catalog::{catalog_get, random_ambient_dim, Family, Geometry};
use ahgeo::config::Config;
use ahgeo::runners::run_catenoid;
use ahgeo_core::catenoid::*;
use ahgeo_core::cheeger::*;
use ahgeo_core::fit::Ladder;
use ahgeo_core::holographic::*;
use ahgeo_core::metrics::{Euclidean, PoincareBall};
use ahgeo_core::submanifold::*;
use ahgeo_core::tensor::ScalarField;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const FAMILIES: [&str; 6] = [
    "hyperbolic-half-space",
    "hyperbolic-normal-sphere",
    "product-collar-sphere",
    "linear-perturb-torus",
    "quadratic-perturb",
    "generic-collar",
];

fn family(name: &str) -> Family {
    match catalog_get(name).expect("catalog entry").geometry {
        Geometry::Family(f) => f,
        _ => panic!("{name} is not a family"),
    }
}

fn all_families() -> Vec<(String, Family)> {
    let mut out = Vec::new();
    for n in [3, 4] {
        for f in FAMILIES {
            let name = format!("{f}({n})");
            out.push((name.clone(), family(&name)));
        }
    }
    out
}

type Outcome = Result<String, String>;

fn ensure(ok: bool, what: impl Into<String>) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(what.into())
    }
}

fn dual_path() -> Outcome {
    let ladder = Ladder::default();
    let mut worst = 0.0f64;
    for (name, fam) in all_families() {
        let points = boundary_points(&fam, 20, 0);
        for x in &points {
            let d = dual_path_check(&fam, x, &ladder, false).map_err(|e| format!("{name}: {e}"))?;
            worst = worst.max(d.max_residual());
            ensure(d.max_residual() < 1e-5, format!("{name} at {x:?}: {:?}", d.residuals))?;
        }
    }
    Ok(format!("12 families x 20 points, max residual {worst:.1e}"))
}

fn exact_identities() -> Outcome {
    let mut worst = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for (name, fam) in all_families() {
        let (lo, hi) = fam.boundary_box();
        let top = (0.9 * fam.r_max()).min(1.0);
        for _ in 0..50 {
            let x: Vec<f64> = (0..fam.boundary_dim()).map(|_| rng.gen_range(lo..hi)).collect();
            let r = rng.gen_range(0.02..top);
            let res = exact_identity_residuals(&fam, r, &x).map_err(|e| format!("{name}: {e}"))?;
            let m = res.laplace_r.max(res.scalar_conformal);
            worst = worst.max(m);
            ensure(m < 1e-6, format!("{name} at r = {r}: {res:?}"))?;
        }
    }
    Ok(format!("50 collar points per family, max residual {worst:.1e}"))
}

fn classify_default(fam: &Family) -> Result<ClassificationReport, String> {
    let cfg = ClassifyConfig { tol: 1e-6, ladder: Ladder::default(), points: boundary_points(fam, 4, 0), ricci_radii: 4 };
    classify(fam, &cfg).map_err(|e| e.to_string())
}

fn classification() -> Outcome {
    for n in [3usize, 4] {
        for base in ["hyperbolic-normal-sphere", "hyperbolic-half-space"] {
            let r = classify_default(&family(&format!("{base}({n})")))?;
            ensure(r.wpe == Some(true), format!("{base}({n}) wpe = {:?}", r.wpe))?;
        }
        let r = classify_default(&family(&format!("linear-perturb-torus({n})")))?;
        ensure(
            r.wpe == Some(false) && r.umbilic.value && !r.totally_geodesic.value,
            format!("linear-perturb-torus({n}): wpe {:?}, umbilic {}, tg {}", r.wpe, r.umbilic.value, r.totally_geodesic.value),
        )?;
        let r = classify_default(&family(&format!("product-collar-sphere({n})")))?;
        let nf = n as f64;
        let (c1, c2) = r.scalar_defect;
        ensure(
            c1.abs() < 1e-5 && (c2 - nf * (nf - 1.0)).abs() < 1e-5,
            format!("product-collar-sphere({n}) scalar defect ({c1}, {c2})"),
        )?;
    }
    Ok("ground truth reproduced for n = 3, 4".into())
}

fn coherence() -> Outcome {
    for (name, fam) in all_families() {
        let r = classify_default(&fam)?;
        ensure(r.part1.agrees(), format!("{name}: first-order disagreement {:?}", r.part1))?;
        let p2 = r.part2.ok_or(format!("{name}: second-order part missing"))?;
        ensure(p2.agrees(), format!("{name}: second-order disagreement {p2:?}"))?;
        ensure(r.consistent, format!("{name}: inconsistent equivalences"))?;
    }
    Ok("all characterisations agree on 12 family instances".into())
}

fn profile_error(sol: &ProfileSolution, exact: impl Fn(f64) -> (f64, f64)) -> f64 {
    sol.samples
        .iter()
        .filter(|q| q.s <= 5.0)
        .map(|q| {
            let (x, dx) = exact(q.s);
            ((q.x1 - x).abs() / x.max(1.0)).max((q.dx1 - dx).abs() / dx.abs().max(1.0))
        })
        .fold(0.0, f64::max)
}

fn catenoid_exact() -> Outcome {
    let solve = |d: i8, x0: f64, dx0: f64| solve_profile(&CatenoidParams::with_data(2, d, x0, dx0, 5.0)).map_err(|e| e.to_string());
    let e = profile_error(&solve(0, 1.0, 1.0)?, |s| (s.exp(), s.exp()));
    let c = profile_error(&solve(-1, 1.0, 0.0)?, |s| (s.cosh(), s.sinh()));
    let eps: f64 = 1e-3;
    let sh = profile_error(&solve(1, eps.sinh(), eps.cosh())?, |s| ((s + eps).sinh(), (s + eps).cosh()));
    ensure(e < 1e-7 && c < 1e-7 && sh < 1e-7, format!("errors e^s {e:.1e}, cosh {c:.1e}, sinh {sh:.1e}"))?;
    let mut drift = 0.0f64;
    for (n, a) in [(1, 0.5), (2, 1.0), (3, 2.0)] {
        let sol = solve_profile(&CatenoidParams::spherical(n, a, 8.0)).map_err(|e| e.to_string())?;
        drift = drift.max(sol.first_integral_drift());
    }
    ensure(drift < 1e-6, format!("first integral drift {drift:.1e}"))?;
    Ok(format!("profile errors {:.1e}, first integral drift {drift:.1e}", e.max(c).max(sh)))
}

fn catenoid_end_to_end() -> Outcome {
    let entry = catalog_get("catenoid(2, 1.0)").map_err(|e| e.to_string())?;
    let report = run_catenoid(&entry, &Config::default()).map_err(|e| e.to_string())?;
    let value = |name: &str| -> Result<f64, String> {
        let c = report.checks.iter().find(|c| c.name == name).ok_or(format!("missing check `{name}`"))?;
        ensure(c.passed, format!("check `{name}` failed: {:?}", c.value))?;
        c.value.as_f64().ok_or(format!("`{name}` has no value"))
    };
    let hyp = value("hyperboloid constraint")?;
    ensure(hyp < 1e-8, "hyperboloid")?;
    let h = value("max mean curvature")?;
    ensure(h < 1e-4, "minimality")?;
    let ids = value("minimal hypersurface Ricci and scalar identities")?;
    ensure(ids < 1e-4, "identities")?;
    for name in ["asymptotic radial sectional curvature", "asymptotic spherical sectional curvature"] {
        ensure((value(name)? + 1.0).abs() < 1e-3, name)?;
    }
    let b1 = value("beta1")?;
    let b2 = value("beta2")?;
    ensure(b1.abs() < 1e-3 && (b2 + 0.5).abs() < 1e-3, format!("beta = ({b1}, {b2})"))?;
    ensure(report.checks.iter().any(|c| c.name == "wpe" && c.passed), "wpe verdict")?;
    Ok(format!("|H| {h:.1e}, identities {ids:.1e}, beta = ({b1:.1e}, {b2:.6})"))
}

fn appendix_identities() -> Outcome {
    let mut g_worst = 0.0f64;
    let mut fg_worst = 0.0f64;
    let mut dims = Vec::new();
    for seed in 1..=10u64 {
        let Geometry::Embedding(emb) = catalog_get(&format!("random-embedding({seed})")).map_err(|e| e.to_string())?.geometry
        else {
            return Err("random-embedding is not an embedding".into());
        };
        dims.push(random_ambient_dim(seed));
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..3 {
            let u: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let g = gauss_residual(&emb.surface, &emb.ambient, &u).map_err(|e| e.to_string())?;
            let fg = fialkow_gauss_residual(&emb.surface, &emb.ambient, &u).map_err(|e| e.to_string())?;
            g_worst = g_worst.max(g);
            fg_worst = fg_worst.max(fg);
        }
    }
    ensure(dims.contains(&5) && dims.contains(&6), "ambient dimensions")?;
    ensure(g_worst < 1e-5 && fg_worst < 1e-5, format!("gauss {g_worst:.1e}, fialkow-gauss {fg_worst:.1e}"))?;
    let s3 = RoundSphere::centered(3, 1.0);
    let u = [0.3, -0.2, 0.1];
    let fg = fialkow_gauss(&s3, &Euclidean(4), &u).map_err(|e| e.to_string())?;
    let half = induced_metric(&s3, &Euclidean(4), &u).map_err(|e| e.to_string())?.scale(0.5);
    let s3_err = fg.lhs.sub(&half).max_abs().max(fg.rhs.sub(&half).max_abs());
    ensure(s3_err < 1e-10, format!("S^3 sides differ from h/2 by {s3_err:.1e}"))?;
    Ok(format!("gauss {g_worst:.1e}, fialkow-gauss {fg_worst:.1e}, S^3 {s3_err:.1e}"))
}

fn cheeger_suite() -> Outcome {
    for k in 1..8 {
        ensure(cheeger_upper_bound(k, 0.0).map_err(|e| e.to_string())? == k as f64, "upper bound at c = 0")?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let k = rng.gen_range(1..8usize);
        let c = rng.gen_range(-0.99..0.99) * (k + 1) as f64;
        let p = rng.gen_range(1.05..6.0);
        let a = cheeger_upper_from_lambda(lambda1p_upper(k, c, p).map_err(|e| e.to_string())?, p).map_err(|e| e.to_string())?;
        let b = cheeger_upper_bound(k, c).map_err(|e| e.to_string())?;
        ensure((a - b).abs() < 1e-12 * b.max(1.0), format!("chain at ({k}, {c}, {p})"))?;
    }
    let r10 = ball_isoperimetric_ratio(3, 10.0).map_err(|e| e.to_string())?;
    ensure((r10 - 2.0).abs() < 1e-3, format!("ratio(3, 10) = {r10}"))?;
    let sweep = ball_ratio_sweep(3, 0.05, 1.5, 15).map_err(|e| e.to_string())?;
    ensure(sweep.windows(2).all(|w| w[1].1 < w[0].1), "ratio not strictly decreasing")?;
    let e = build_embedding(&solve_profile(&CatenoidParams::spherical(2, 1.0, 12.0)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let r = cheeger_bracket_hyperbolic(&BallModel(&e), &interior_points(&e, 10, 3.0), 0.0, true, 1e-4).map_err(|e| e.to_string())?;
    let lower = r.lower.ok_or("no lower bound")?.value;
    ensure(r.determined.is_some() && (r.upper - 2.0).abs() < 1e-6 && (lower - 2.0).abs() < 1e-6, format!("bracket {lower} .. {}", r.upper))?;
    Ok(format!("ratio(3, 10) = {r10:.6}, catenoid bracket [{lower:.9}, {}]", r.upper))
}

fn lee_machinery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut pde, mut b, mut slack) = (0.0f64, 0.0f64, 0.0f64);
    for i in 0..1000 {
        let d = 2 + i % 4;
        let dir: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let norm = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        let rho = rng.gen_range(0.0..0.9);
        let x: Vec<f64> = dir.iter().map(|v| v * rho / norm).collect();
        let s = lee_hyperbolic(&x).map_err(|e| e.to_string())?;
        pde = pde.max(s.pde_residual(d as f64) / s.u);
        b = b.max(s.b.max_abs() / (s.u * s.u));
        slack = slack.max((s.gradient_slack() - 4.0).abs() / (s.u * s.u));
    }
    ensure(pde < 1e-8 && b < 1e-8 && slack < 1e-8, format!("pde {pde:.1e}, b {b:.1e}, slack {slack:.1e}"))?;

    let e = build_embedding(&solve_profile(&CatenoidParams::spherical(2, 1.0, 12.0)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let ball = BallModel(&e);
    let pts = interior_points(&e, 15, 4.0);
    let images: Vec<Vec<f64>> = pts.iter().map(|u| ball.map(u)).collect();
    let lee = LeeField::new(PoincareBall(4), LeeHyperbolic, &images, 1e-8).map_err(|e| e.to_string())?;
    let beta = beta_y(&ball, &lee, &pts).map_err(|e| e.to_string())?.value;
    ensure(beta.abs() < 1e-6, format!("beta {beta:.1e}"))?;
    let restricted = RestrictedLee { profile: e.profile.clone() };
    for (u, p) in pts.iter().zip(&images) {
        let a: f64 = restricted.eval(u);
        ensure((a - LeeHyperbolic.eval(p)).abs() < 1e-9 * a, "restricted Lee function")?;
    }
    let metric = WarpedCatenoidMetric { profile: e.profile.clone() };
    let margin = log_lee_laplacian_margin(&metric, &LogRestrictedLee(restricted), 2, &pts).map_err(|e| e.to_string())?;
    ensure(margin >= -1e-4, format!("margin {margin:.1e}"))?;
    Ok(format!("pde {pde:.1e}, b {b:.1e}, slack {slack:.1e}, beta {beta:.1e}, margin {margin:.1e}"))
}

fn conformal_invariant() -> Outcome {
    let e = build_embedding(&solve_profile(&CatenoidParams::spherical(2, 1.0, 12.0)).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    let ladder = Ladder::default();
    let z = [0.4, -0.3];
    let b = catenoid_boundary_invariant(&e, &z, 1.0, &ladder).map_err(|e| e.to_string())?;
    ensure(b.invariant.abs() < 1e-3, format!("invariant {}", b.invariant))?;
    ensure(b.mean_expansion[1].abs() < 1e-3, format!("linear coefficient {}", b.mean_expansion[1]))?;
    let w: f64 = 0.3;
    let g = catenoid_boundary_invariant(&e, &z, w.exp(), &ladder).map_err(|e| e.to_string())?;
    let law = (b.invariant - w.exp() * g.invariant).abs();
    ensure(law < 1e-3, format!("weight law {law:.1e}"))?;
    Ok(format!("invariant {:.1e}, linear coefficient {:.1e}, weight law {law:.1e}", b.invariant, b.mean_expansion[1]))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("dual-path expansion", dual_path),
        ("exact collar identities", exact_identities),
        ("classification ground truth", classification),
        ("classification coherence", coherence),
        ("catenoid exact profiles", catenoid_exact),
        ("catenoid end to end", catenoid_end_to_end),
        ("gauss and fialkow-gauss", appendix_identities),
        ("cheeger suite", cheeger_suite),
        ("Lee machinery", lee_machinery),
        ("boundary conformal invariant", conformal_invariant),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", k + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why}", k + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all 10 acceptance criteria passed");
}
