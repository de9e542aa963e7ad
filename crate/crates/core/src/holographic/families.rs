use alloc::vec;
use alloc::vec::Vec;

use super::{FamilyMetadata, NormalFormFamily};
use crate::error::{GeoError, Result};
use crate::linalg::{sym_eigenvalues, Mat};
use crate::metrics::StereographicSphere;
use crate::scalar::Scalar;

const TAU: f64 = 2.0 * core::f64::consts::PI;

fn scaled_identity<S: Scalar>(n: usize, c: S) -> Vec<S> {
    let mut g = vec![S::zero(); n * n];
    for i in 0..n {
        g[i * n + i] = c;
    }
    g
}

/// Hyperbolic space as the upper half space: `g_r = δ`.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicHalfSpace {
    pub n: usize,
}

impl NormalFormFamily for HyperbolicHalfSpace {
    fn boundary_dim(&self) -> usize {
        self.n
    }
    fn g_r<S: Scalar>(&self, _r: S, _x: &[S]) -> Vec<S> {
        scaled_identity(self.n, S::one())
    }
    fn r_max(&self) -> f64 {
        f64::INFINITY
    }
    fn metadata(&self) -> FamilyMetadata {
        FamilyMetadata { claimed_einstein: Some(true), yamabe_sign: Some(0) }
    }
}

/// Hyperbolic space in geodesic normal form around a round sphere:
/// `g_r = (1 − r²/4)² g_{S^n}`.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicNormalSphere {
    pub n: usize,
}

impl NormalFormFamily for HyperbolicNormalSphere {
    fn boundary_dim(&self) -> usize {
        self.n
    }
    fn g_r<S: Scalar>(&self, r: S, x: &[S]) -> Vec<S> {
        let w = S::one() - r * r * 0.25;
        let c = StereographicSphere::unit(self.n).factor(x) * w * w;
        scaled_identity(self.n, c)
    }
    fn r_max(&self) -> f64 {
        2.0
    }
    fn metadata(&self) -> FamilyMetadata {
        FamilyMetadata { claimed_einstein: Some(true), yamabe_sign: Some(1) }
    }
}

/// Product collar `g_r ≡ g_{S^n}`.
#[derive(Clone, Copy, Debug)]
pub struct ProductCollarSphere {
    pub n: usize,
}

impl NormalFormFamily for ProductCollarSphere {
    fn boundary_dim(&self) -> usize {
        self.n
    }
    fn g_r<S: Scalar>(&self, _r: S, x: &[S]) -> Vec<S> {
        scaled_identity(self.n, StereographicSphere::unit(self.n).factor(x))
    }
    fn r_max(&self) -> f64 {
        f64::INFINITY
    }
    fn metadata(&self) -> FamilyMetadata {
        FamilyMetadata { claimed_einstein: Some(false), yamabe_sign: Some(1) }
    }
}

/// `g_r = (1 + r) δ` over the flat torus.
#[derive(Clone, Copy, Debug)]
pub struct LinearPerturbTorus {
    pub n: usize,
}

impl NormalFormFamily for LinearPerturbTorus {
    fn boundary_dim(&self) -> usize {
        self.n
    }
    fn g_r<S: Scalar>(&self, r: S, _x: &[S]) -> Vec<S> {
        scaled_identity(self.n, r + 1.0)
    }
    fn r_max(&self) -> f64 {
        1.0
    }
    fn boundary_box(&self) -> (f64, f64) {
        (0.0, TAU)
    }
    fn metadata(&self) -> FamilyMetadata {
        FamilyMetadata { claimed_einstein: Some(false), yamabe_sign: Some(0) }
    }
}

/// `g_r = δ + A r²` over the flat torus, `A` constant and symmetric.
#[derive(Clone, Debug)]
pub struct QuadraticPerturb {
    pub n: usize,
    pub a: Mat<f64>,
    r_max: f64,
}

impl QuadraticPerturb {
    pub fn new(a: Mat<f64>) -> Result<Self> {
        let n = a.n;
        if n == 0 || a.sub(&a.transpose()).max_abs() > 0.0 {
            return Err(GeoError::InvalidParameter("perturbation must be a nonempty symmetric matrix".into()));
        }
        let lo = sym_eigenvalues(&a)[0];
        // keep δ + A r² uniformly positive on [0, r_max)
        let r_max = if lo < 0.0 { libm::sqrt(0.5 / -lo).min(2.0) } else { 2.0 };
        Ok(QuadraticPerturb { n, a, r_max })
    }
    /// `A = amp · diag(1, −1, 0, …, 0)`, trace free.
    pub fn with_amplitude(n: usize, amp: f64) -> Result<Self> {
        if n < 2 {
            return Err(GeoError::InvalidParameter("quadratic perturbation needs n >= 2".into()));
        }
        let mut a = Mat::zeros(n);
        a.set(0, 0, amp);
        a.set(1, 1, -amp);
        Self::new(a)
    }
}

impl NormalFormFamily for QuadraticPerturb {
    fn boundary_dim(&self) -> usize {
        self.n
    }
    fn g_r<S: Scalar>(&self, r: S, _x: &[S]) -> Vec<S> {
        let n = self.n;
        let r2 = r * r;
        (0..n * n)
            .map(|k| {
                let base = if k / n == k % n { S::one() } else { S::zero() };
                base + r2 * self.a.a[k]
            })
            .collect()
    }
    fn r_max(&self) -> f64 {
        self.r_max
    }
    fn boundary_box(&self) -> (f64, f64) {
        (0.0, TAU)
    }
}

/// A collar with no special structure, over the torus:
/// `g_r = e^{2w(x)} (δ + r α(x) + r² β + sin(r)³ γ)` with
/// `w = 0.1 Σ sin x_k`, `α_ij = 0.2 cos(x_i + x_j)` and constant `β`, `γ`.
#[derive(Clone, Copy, Debug)]
pub struct GenericCollar {
    pub n: usize,
}

impl GenericCollar {
    fn beta(&self, i: usize, j: usize) -> f64 {
        let d = if i == j { 0.15 } else { 0.0 };
        d + 0.05 * libm::cos((i + 2 * j) as f64) * libm::cos((j + 2 * i) as f64)
    }
    fn gamma(&self, i: usize, j: usize) -> f64 {
        0.1 * libm::sin((1 + i + j) as f64)
    }
}

impl NormalFormFamily for GenericCollar {
    fn boundary_dim(&self) -> usize {
        self.n
    }
    fn g_r<S: Scalar>(&self, r: S, x: &[S]) -> Vec<S> {
        let n = self.n;
        let w = x.iter().fold(S::zero(), |a, &v| a + v.sin()) * 0.1;
        let e = (w * 2.0).exp();
        let s3 = r.sin().powi(3);
        let mut g = vec![S::zero(); n * n];
        for i in 0..n {
            for j in 0..n {
                let base = if i == j { S::one() } else { S::zero() };
                let alpha = (x[i] + x[j]).cos() * 0.2;
                g[i * n + j] = e * (base + r * alpha + r * r * self.beta(i, j) + s3 * self.gamma(i, j));
            }
        }
        g
    }
    fn r_max(&self) -> f64 {
        0.5
    }
    fn boundary_box(&self) -> (f64, f64) {
        (0.0, TAU)
    }
}

/// Hides the analytic structure of a family so that expansions are fitted.
#[derive(Clone, Copy, Debug)]
pub struct BlackBox<F>(pub F);

impl<F: NormalFormFamily> NormalFormFamily for BlackBox<F> {
    fn boundary_dim(&self) -> usize {
        self.0.boundary_dim()
    }
    fn g_r<S: Scalar>(&self, r: S, x: &[S]) -> Vec<S> {
        self.0.g_r(r, x)
    }
    fn r_max(&self) -> f64 {
        self.0.r_max()
    }
    fn analytic_in_r(&self) -> bool {
        false
    }
    fn boundary_box(&self) -> (f64, f64) {
        self.0.boundary_box()
    }
    fn boundary_in_domain(&self, x: &[f64]) -> bool {
        self.0.boundary_in_domain(x)
    }
    fn metadata(&self) -> FamilyMetadata {
        self.0.metadata()
    }
}

/// Checks the structural invariants of a family at the given points:
/// `g_0` positive definite and `dr² + g_r` positive definite on a grid of `r`.
pub fn validate_family<F: NormalFormFamily + ?Sized>(fam: &F, points: &[Vec<f64>]) -> Result<()> {
    let n = fam.boundary_dim();
    let r_top = if fam.r_max().is_finite() { 0.95 * fam.r_max() } else { 5.0 };
    for x in points {
        for k in 0..8 {
            let r = r_top * k as f64 / 7.0;
            let g = Mat::from_vec(n, fam.g_r(r, x));
            if sym_eigenvalues(&g)[0] <= 0.0 {
                return Err(GeoError::Degenerate("normal-form family"));
            }
        }
    }
    Ok(())
}
