use ahgeo_core::fit::Ladder;
use ahgeo_core::linalg::Mat;
use ahgeo_core::metrics::{Euclidean, HalfSpace, PoincareBall, StereographicSphere, WaveMode, WavyMetric};
use ahgeo_core::submanifold::*;
use ahgeo_core::{Dual, GeoError, Scalar};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `ρ θ(z) + c` with `θ` the inverse stereographic map onto the unit sphere.
struct Sphere {
    m: usize,
    rho: f64,
    center: Vec<f64>,
}

fn stereo<S: Scalar>(z: &[S]) -> Vec<S> {
    let q = z.iter().fold(S::zero(), |s, &v| s + v * v);
    let d = (q + 1.0).recip();
    let mut out: Vec<S> = z.iter().map(|&v| v * 2.0 * d).collect();
    out.push((q - 1.0) * d);
    out
}

impl Embedding for Sphere {
    fn intrinsic_dim(&self) -> usize {
        self.m
    }
    fn ambient_dim(&self) -> usize {
        self.m + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        stereo(u).into_iter().zip(&self.center).map(|(v, &c)| v * self.rho + c).collect()
    }
}

/// `(τ, ρ₀ θ(z))` in the upper half space: a vertical cylinder over a round sphere.
struct Cylinder {
    n: usize,
    rho0: f64,
}

impl Embedding for Cylinder {
    fn intrinsic_dim(&self) -> usize {
        self.n + 1
    }
    fn ambient_dim(&self) -> usize {
        self.n + 2
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let mut p = vec![u[self.n]];
        p.extend(stereo(&u[..self.n]).into_iter().map(|v| v * self.rho0));
        p
    }
}

/// Inversion in the sphere of radius √2 about `−e_0`; swaps half space and ball.
fn invert<S: Scalar>(x: &[S]) -> Vec<S> {
    let mut y: Vec<S> = x.to_vec();
    y[0] = y[0] + 1.0;
    let q = y.iter().fold(S::zero(), |s, &v| s + v * v);
    let mut out: Vec<S> = y.iter().map(|&v| v * 2.0 * q.recip()).collect();
    out[0] = out[0] - 1.0;
    out
}

struct InBall<E>(E);

impl<E: Embedding> Embedding for InBall<E> {
    fn intrinsic_dim(&self) -> usize {
        self.0.intrinsic_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim()
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        invert(&self.0.map(u))
    }
}

struct Clifford;

impl Embedding for Clifford {
    fn intrinsic_dim(&self) -> usize {
        2
    }
    fn ambient_dim(&self) -> usize {
        4
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        vec![u[0].cos(), u[0].sin(), u[1].cos(), u[1].sin()]
    }
}

fn random_metric(rng: &mut ChaCha8Rng, dim: usize, amp: f64) -> WavyMetric {
    let modes = (0..3)
        .map(|_| {
            let mut s = Mat::zeros(dim);
            for i in 0..dim {
                for j in i..dim {
                    let v = amp * rng.gen_range(-1.0..1.0) / dim as f64;
                    s.set(i, j, v);
                    s.set(j, i, v);
                }
            }
            WaveMode { k: (0..dim).map(|_| rng.gen_range(-1.5..1.5)).collect(), phase: rng.gen_range(0.0..6.0), s }
        })
        .collect();
    WavyMetric { dim, modes }
}

fn random_embedding(rng: &mut ChaCha8Rng, m: usize, n: usize) -> PolynomialEmbedding {
    let mut e = PolynomialEmbedding::slice(m, n);
    for v in e.linear.iter_mut() {
        *v += 0.3 * rng.gen_range(-1.0..1.0);
    }
    for v in e.quadratic.iter_mut() {
        *v = 0.2 * rng.gen_range(-1.0..1.0);
    }
    for v in e.offset.iter_mut() {
        *v = 0.2 * rng.gen_range(-1.0..1.0);
    }
    e
}

#[test]
fn extrinsic_examples() {
    // equatorial slice of the ball is totally geodesic
    let slice = PolynomialEmbedding::slice(3, 4);
    let d = extrinsic_data(&slice, &PoincareBall(4), &[0.1, -0.2, 0.3]).unwrap();
    assert!(d.sff[0].max_abs() < 1e-13 && d.mean_norm() < 1e-13);

    // round sphere: B = ±h/ρ, |H| = n/ρ
    for m in [2, 3] {
        let rho = 1.7;
        let s = Sphere { m, rho, center: vec![0.3; m + 1] };
        let u: Vec<f64> = (0..m).map(|i| 0.2 + 0.1 * i as f64).collect();
        let d = extrinsic_data(&s, &Euclidean(m + 1), &u).unwrap();
        assert!((d.mean_norm() - m as f64 / rho).abs() < 1e-12);
        assert!(d.sff[0].abs_sub_scaled(&d.h, 1.0 / rho) < 1e-12);
        assert!(d.traceless[0].max_abs() < 1e-12);
        assert!(d.frame_residual < 1e-13);
    }

    // saddle z = x² − y² at the origin
    let mut saddle = PolynomialEmbedding::slice(2, 3);
    saddle.quadratic[(2 * 2) * 2] = 1.0;
    saddle.quadratic[(2 * 2 + 1) * 2 + 1] = -1.0;
    let d = extrinsic_data(&saddle, &Euclidean(3), &[0.0, 0.0]).unwrap();
    assert!(d.mean_norm() < 1e-14);
    let b = &d.traceless[0];
    assert!((b.at(0, 0).abs() - 2.0).abs() < 1e-14 && (b.at(0, 0) + b.at(1, 1)).abs() < 1e-14);
}

trait AbsSubScaled {
    fn abs_sub_scaled(&self, h: &Mat<f64>, c: f64) -> f64;
}

impl AbsSubScaled for Mat<f64> {
    /// `min(|self − c h|, |self + c h|)`.
    fn abs_sub_scaled(&self, h: &Mat<f64>, c: f64) -> f64 {
        self.sub(&h.scale(c)).max_abs().min(self.add(&h.scale(c)).max_abs())
    }
}

#[test]
fn frame_order_independence() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let g = random_metric(&mut rng, 5, 0.1);
    let e = random_embedding(&mut rng, 2, 5);
    let u = [0.1, -0.2];
    let a = extrinsic_data(&e, &g, &u).unwrap();
    let b = extrinsic_data_ordered(&e, &g, &u, &[4, 2, 0, 3, 1]).unwrap();
    assert!((a.mean_norm() - b.mean_norm()).abs() < 1e-8);
    assert!((a.sff_norm2() - b.sff_norm2()).abs() < 1e-8);
    assert!(a.sff_sq().sub(&b.sff_sq()).max_abs() < 1e-8);
    let ma = a.mean_vector();
    let mb = b.mean_vector();
    assert!(ma.iter().zip(&mb).all(|(x, y)| (x - y).abs() < 1e-8));
    for t in a.traceless.iter().chain(&b.traceless) {
        assert!(ahgeo_core::tensor::contract(&a.h_inv, t).abs() < 1e-10);
    }
}

#[test]
fn gauss_equation() {
    assert!(gauss_residual(&Clifford, &Euclidean(4), &[0.3, 1.1]).unwrap() < 1e-12);
    let s = Sphere { m: 2, rho: 0.8, center: vec![0.0; 3] };
    assert!(gauss_residual(&s, &Euclidean(3), &[0.4, -0.7]).unwrap() < 1e-6);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..5 {
        let g = random_metric(&mut rng, 4, 0.2);
        let e = random_embedding(&mut rng, 2, 4);
        let u = [rng.gen_range(-0.3..0.3), rng.gen_range(-0.3..0.3)];
        assert!(gauss_residual(&e, &g, &u).unwrap() < 1e-5);
    }
}

#[test]
fn fialkow_gauss_equation() {
    let flat = fialkow_gauss(&PolynomialEmbedding::slice(3, 5), &Euclidean(5), &[0.1, 0.2, 0.3]).unwrap();
    assert!(flat.lhs.max_abs() < 1e-14 && flat.rhs.max_abs() < 1e-14);

    let s = Sphere { m: 3, rho: 1.0, center: vec![0.0; 4] };
    let u = [0.2, -0.1, 0.4];
    let fg = fialkow_gauss(&s, &Euclidean(4), &u).unwrap();
    let h = induced_metric(&s, &Euclidean(4), &u).unwrap();
    assert!(fg.lhs.sub(&h.scale(0.5)).max_abs() < 1e-10);
    assert!(fg.rhs.sub(&h.scale(0.5)).max_abs() < 1e-10);

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in [5, 6] {
        for _ in 0..3 {
            let g = random_metric(&mut rng, n, 0.2);
            let e = random_embedding(&mut rng, 3, n);
            let u: Vec<f64> = (0..3).map(|_| rng.gen_range(-0.3..0.3)).collect();
            let fg = fialkow_gauss(&e, &g, &u).unwrap();
            assert!(fg.residual < 1e-5, "{fg:?}");
            assert!(fg.lhs.max_abs() > 1e-3);
        }
    }
    assert!(matches!(
        fialkow_gauss(&Clifford, &Euclidean(4), &[0.0, 0.0]),
        Err(GeoError::DimensionTooSmall { .. })
    ));
}

#[test]
fn hypersurfaces_of_hyperbolic_space() {
    for n in [1, 2, 3] {
        let dim = n + 2;
        let slice = PolynomialEmbedding::slice(n + 1, dim);
        let u: Vec<f64> = (0..n + 1).map(|i| 0.1 + 0.15 * i as f64).collect();
        let r = pe_hypersurface_identities(&slice, &PoincareBall(dim), &u, 1e-8).unwrap();
        assert!(r.ricci < 1e-10 && r.scalar < 1e-10);
        let r = minimal_hyperbolic_identities(&slice, &PoincareBall(dim), &u, 1e-8).unwrap();
        assert!(r.ricci < 1e-10 && r.scalar < 1e-10);

        // geodesic sphere of hyperbolic radius d: umbilic with principal curvatures coth d
        let rho0: f64 = 0.4;
        let sph = Sphere { m: n + 1, rho: rho0, center: vec![0.0; dim] };
        let r = pe_hypersurface_identities(&sph, &PoincareBall(dim), &u, 1e-8).unwrap();
        assert!(r.ricci < 1e-5 && r.scalar < 1e-5, "{r:?}");
        let d = extrinsic_data(&sph, &PoincareBall(dim), &u).unwrap();
        let coth = 1.0 / (2.0 * rho0.atanh()).tanh();
        assert!((d.mean_norm() - (n + 1) as f64 * coth).abs() < 1e-10);
        assert!(d.traceless[0].max_abs() < 1e-10);
        assert!(matches!(
            minimal_hyperbolic_identities(&sph, &PoincareBall(dim), &u, 1e-6),
            Err(GeoError::NotMinimal { .. })
        ));
    }
    let slice = PolynomialEmbedding::slice(3, 4);
    assert!(matches!(
        pe_hypersurface_identities(&slice, &Sphere4, &[0.1, 0.1, 0.1], 1e-8),
        Err(GeoError::AmbientNotPE { .. })
    ));
}

struct Sphere4;

impl ahgeo_core::MetricField for Sphere4 {
    fn dim(&self) -> usize {
        4
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        StereographicSphere::unit(4).components(x)
    }
}

#[test]
fn special_defining_functions() {
    let ball = Compactified { plus: PoincareBall(4), r: BallDefiningFunction { scale: 1.0 } };
    let half = Compactified { plus: HalfSpace(4), r: HeightFunction { scale: 1.3 } };
    for x in [[0.3, -0.2, 0.5, 0.1], [0.7, 0.1, -0.6, 0.2]] {
        assert!(ball.special_residual(&x).unwrap().abs() < 1e-13);
        assert!(half.special_residual(&x).unwrap().abs() < 1e-13);
    }
}

#[test]
fn conformal_sff_law() {
    let ball = Compactified { plus: PoincareBall(4), r: BallDefiningFunction { scale: 1.0 } };
    let slice = PolynomialEmbedding::slice(3, 4);
    let r = conformal_sff_law_residual(&slice, &ball, &[0.2, 0.3, -0.1]).unwrap();
    assert!(r.tensor < 1e-12 && r.normal_component < 1e-12);
    let sph = Sphere { m: 3, rho: 0.7, center: vec![0.0; 4] };
    let r = conformal_sff_law_residual(&sph, &ball, &[0.2, 0.3, -0.1]).unwrap();
    assert!(r.tensor < 1e-10 && r.normal_component < 1e-10, "{r:?}");
    let cyl = InBall(Cylinder { n: 2, rho0: 0.6 });
    let r = conformal_sff_law_residual(&cyl, &ball, &[0.2, 0.3, 0.1]).unwrap();
    assert!(r.tensor < 1e-10 && r.normal_component < 1e-10, "{r:?}");
}

/// Covector `d(|y|²)` of the half-space `y` coordinates, pulled back to the ball.
fn ball_outward(x: &[f64]) -> Vec<f64> {
    (0..x.len())
        .map(|k| {
            let xs: Vec<Dual<f64>> =
                x.iter().enumerate().map(|(i, &v)| Dual::new(v, if i == k { 1.0 } else { 0.0 })).collect();
            let y = invert(&xs);
            y[1..].iter().fold(Dual::new(0.0, 0.0), |s, &v| s + v * v).d
        })
        .collect()
}

fn half_outward(x: &[f64]) -> Vec<f64> {
    let mut c = x.to_vec();
    c[0] = 0.0;
    c
}

#[test]
fn boundary_invariant_of_cylinders() {
    let n = 2;
    let nf = n as f64;
    let rho0: f64 = 0.6;
    let z0 = [0.3, -0.4];
    let approach = |t: f64| vec![z0[0], z0[1], t];
    let ladder = Ladder::default();
    let cyl = Cylinder { n, rho0 };

    // flat gauge: η̂ = −n/ρ₀ for the outward normal, B̄_00 = 0, H^Y = −n t/ρ₀
    let half = Compactified { plus: HalfSpace(n + 2), r: HeightFunction { scale: 1.0 } };
    let flat = boundary_conformal_invariant(&cyl, &half, &approach, &ladder, &half_outward).unwrap();
    assert!((flat.eta_hat + nf / rho0).abs() < 1e-9, "{flat:?}");
    assert!(flat.b00.abs() < 1e-9);
    assert!((flat.mean_expansion[1] - flat.invariant).abs() < 1e-8);

    // constant rescaling of the gauge
    let w: f64 = 0.3;
    let scaled = Compactified { plus: HalfSpace(n + 2), r: HeightFunction { scale: w.exp() } };
    let s = boundary_conformal_invariant(&cyl, &scaled, &approach, &ladder, &half_outward).unwrap();
    assert!((flat.invariant - w.exp() * s.invariant).abs() < 1e-8);

    // round gauge on the ball: the boundary metrics differ by e^{2w} with e^w = (1 + ρ₀²)/2
    let ball = Compactified { plus: PoincareBall(n + 2), r: BallDefiningFunction { scale: 1.0 } };
    let round = boundary_conformal_invariant(&InBall(Cylinder { n, rho0 }), &ball, &approach, &ladder, &ball_outward)
        .unwrap();
    let ew = (1.0 + rho0 * rho0) / 2.0;
    assert!((round.invariant - ew * flat.invariant).abs() < 1e-6, "{round:?}");
    // latitude sphere of polar angle β with cot β = (1 − ρ₀²)/(2ρ₀)
    assert!((round.eta_hat + nf * (1.0 - rho0 * rho0) / (2.0 * rho0)).abs() < 1e-6);
    assert!((round.b00 - rho0).abs() < 1e-6);
    assert!((round.mean_expansion[1] - round.invariant).abs() < 10.0 * round.error_estimate + 1e-8);
}

#[test]
fn boundary_second_fundamental_form() {
    let n = 2;
    let rho0 = 0.6;
    let z0 = [0.3, -0.4];
    let approach = |t: f64| vec![z0[0], z0[1], t];
    let ladder = Ladder::default();
    let boundary = Sphere { m: n, rho: rho0, center: vec![0.0; n + 1] };
    let out = |y: &[f64]| y.to_vec();

    let half = Compactified { plus: HalfSpace(n + 2), r: HeightFunction { scale: 1.0 } };
    let c = ii_equals_bbar(
        &Cylinder { n, rho0 },
        &half,
        &approach,
        &ladder,
        &half_outward,
        &[0, 1],
        (&boundary, &Euclidean(n + 1), &z0),
        &out,
    )
    .unwrap();
    assert!(c.residual < 1e-9, "{c:?}");

    let ball = Compactified { plus: PoincareBall(n + 2), r: BallDefiningFunction { scale: 1.0 } };
    let c = ii_equals_bbar(
        &InBall(Cylinder { n, rho0 }),
        &ball,
        &approach,
        &ladder,
        &ball_outward,
        &[0, 1],
        (&boundary, &StereographicSphere::unit(n + 1), &z0),
        &out,
    )
    .unwrap();
    assert!(c.residual < 1e-6, "{c:?}");
    assert!(c.ii.max_abs() > 0.1);
}
