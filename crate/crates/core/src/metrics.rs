//! Standard chart metrics.

use alloc::vec;
use alloc::vec::Vec;

use crate::linalg::Mat;
use crate::scalar::Scalar;
use crate::tensor::{MetricField, ScalarField};

fn diag<S: Scalar>(d: usize, f: impl Fn(usize) -> S) -> Vec<S> {
    let mut g = vec![S::zero(); d * d];
    for i in 0..d {
        g[i * d + i] = f(i);
    }
    g
}

fn norm2<S: Scalar>(x: &[S]) -> S {
    x.iter().fold(S::zero(), |a, &v| a + v * v)
}

/// Flat metric `δ` on `R^d`.
#[derive(Clone, Copy, Debug)]
pub struct Euclidean(pub usize);

impl MetricField for Euclidean {
    fn dim(&self) -> usize {
        self.0
    }
    fn components<S: Scalar>(&self, _x: &[S]) -> Vec<S> {
        diag(self.0, |_| S::one())
    }
}

/// Flat metric on the torus `R^d / (2π Z)^d`, written in periodic coordinates.
#[derive(Clone, Copy, Debug)]
pub struct FlatTorus(pub usize);

impl MetricField for FlatTorus {
    fn dim(&self) -> usize {
        self.0
    }
    fn components<S: Scalar>(&self, _x: &[S]) -> Vec<S> {
        diag(self.0, |_| S::one())
    }
}

/// Minkowski metric `diag(1, …, 1, −1)` with the timelike coordinate last.
#[derive(Clone, Copy, Debug)]
pub struct Minkowski(pub usize);

impl MetricField for Minkowski {
    fn dim(&self) -> usize {
        self.0
    }
    fn signature(&self) -> Vec<i8> {
        let mut s = vec![1; self.0];
        s[self.0 - 1] = -1;
        s
    }
    fn components<S: Scalar>(&self, _x: &[S]) -> Vec<S> {
        let d = self.0;
        diag(d, |i| if i + 1 == d { -S::one() } else { S::one() })
    }
}

/// Hyperbolic metric `4 (1 − |x|²)^{-2} δ` on the unit ball.
#[derive(Clone, Copy, Debug)]
pub struct PoincareBall(pub usize);

impl MetricField for PoincareBall {
    fn dim(&self) -> usize {
        self.0
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let c = (S::one() - norm2(x)).powi(-2) * 4.0;
        diag(self.0, |_| c)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        norm2(x) < 1.0
    }
}

/// Hyperbolic metric `t^{-2} (dt² + |dy|²)` on the upper half space, `t = x[0]`.
#[derive(Clone, Copy, Debug)]
pub struct HalfSpace(pub usize);

impl MetricField for HalfSpace {
    fn dim(&self) -> usize {
        self.0
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let c = x[0].powi(-2);
        diag(self.0, |_| c)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] > 0.0
    }
}

/// Round sphere of radius `radius` in stereographic coordinates:
/// `4 ρ² (1 + |z|²)^{-2} δ`.
#[derive(Clone, Copy, Debug)]
pub struct StereographicSphere {
    pub dim: usize,
    pub radius: f64,
}

impl StereographicSphere {
    pub fn unit(dim: usize) -> Self {
        StereographicSphere { dim, radius: 1.0 }
    }
    pub fn factor<S: Scalar>(&self, z: &[S]) -> S {
        (norm2(z) + 1.0).powi(-2) * (4.0 * self.radius * self.radius)
    }
}

impl MetricField for StereographicSphere {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let c = self.factor(x);
        diag(self.dim, |_| c)
    }
}

/// Unit round sphere in hyperspherical angles `(θ_1, …, θ_d)`:
/// `dθ_1² + sin²θ_1 (dθ_2² + sin²θ_2 (…))`.
#[derive(Clone, Copy, Debug)]
pub struct AngularSphere(pub usize);

impl AngularSphere {
    /// Point of the unit sphere in `R^{d+1}` with the given angles.
    pub fn embed<S: Scalar>(theta: &[S]) -> Vec<S> {
        let d = theta.len();
        let mut out = Vec::with_capacity(d + 1);
        let mut prod = S::one();
        for t in theta {
            out.push(prod * t.cos());
            prod *= t.sin();
        }
        out.push(prod);
        out
    }
}

impl MetricField for AngularSphere {
    fn dim(&self) -> usize {
        self.0
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.0;
        let mut w = vec![S::one(); d];
        for i in 1..d {
            let s = x[i - 1].sin();
            w[i] = w[i - 1] * s * s;
        }
        diag(d, |i| w[i])
    }
}

/// `e^{2w} g` for a smooth function `w`.
#[derive(Clone, Debug)]
pub struct Conformal<M, W> {
    pub base: M,
    pub w: W,
}

impl<M: MetricField, W: ScalarField> MetricField for Conformal<M, W> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn signature(&self) -> Vec<i8> {
        self.base.signature()
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let f = (self.w.eval(x) * 2.0).exp();
        self.base.components(x).into_iter().map(|v| v * f).collect()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.base.in_domain(x)
    }
}

/// `c² g` for a constant `c > 0`.
#[derive(Clone, Debug)]
pub struct Scaled<M> {
    pub base: M,
    pub c: f64,
}

impl<M: MetricField> MetricField for Scaled<M> {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn signature(&self) -> Vec<i8> {
        self.base.signature()
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let f = self.c * self.c;
        self.base.components(x).into_iter().map(|v| v * f).collect()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.base.in_domain(x)
    }
}

/// One term `sin(k·x + phase) S` of a [`WavyMetric`].
#[derive(Clone, Debug)]
pub struct WaveMode {
    pub k: Vec<f64>,
    pub phase: f64,
    /// Symmetric amplitude matrix.
    pub s: Mat<f64>,
}

/// `δ + Σ sin(k·x + phase) S`, an analytic metric with no symmetry.
/// Positivity is the caller's responsibility.
#[derive(Clone, Debug)]
pub struct WavyMetric {
    pub dim: usize,
    pub modes: Vec<WaveMode>,
}

impl MetricField for WavyMetric {
    fn dim(&self) -> usize {
        self.dim
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let d = self.dim;
        let mut g = diag(d, |_| S::one());
        for m in &self.modes {
            let arg = x.iter().zip(&m.k).fold(S::cst(m.phase), |a, (&xi, &ki)| a + xi * ki);
            let w = arg.sin();
            for (gij, &sij) in g.iter_mut().zip(&m.s.a) {
                *gij += w * sij;
            }
        }
        g
    }
}

/// A constant function.
#[derive(Clone, Copy, Debug)]
pub struct Constant(pub f64);

impl ScalarField for Constant {
    fn eval<S: Scalar>(&self, _x: &[S]) -> S {
        S::cst(self.0)
    }
}

/// `Σ_k a_k sin(x_k) + b_k cos(x_k)`, a smooth bounded weight.
#[derive(Clone, Debug)]
pub struct TrigWeight {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl ScalarField for TrigWeight {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let mut s = S::zero();
        for (k, &xk) in x.iter().enumerate() {
            if let Some(&a) = self.a.get(k) {
                s += xk.sin() * a;
            }
            if let Some(&b) = self.b.get(k) {
                s += xk.cos() * b;
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Engine;

    #[test]
    fn stereographic_sphere_scalar_curvature() {
        let e = Engine::exact();
        for n in 2..6 {
            let z: Vec<f64> = (0..n).map(|i| 0.3 - 0.2 * i as f64).collect();
            let b = e.curvature(&StereographicSphere::unit(n), &z).unwrap();
            assert!((b.scalar - (n * (n - 1)) as f64).abs() < 1e-10);
            let b = e.curvature(&StereographicSphere { dim: n, radius: 2.0 }, &z).unwrap();
            assert!((b.scalar - (n * (n - 1)) as f64 / 4.0).abs() < 1e-10);
        }
    }

    #[test]
    fn angular_sphere_matches_embedding() {
        // pullback of δ under the hyperspherical embedding equals the angular metric
        let th = [0.7, 1.1, 0.4];
        let e = Engine::exact();
        let b = e.curvature(&AngularSphere(3), &th).unwrap();
        assert!((b.scalar - 6.0).abs() < 1e-10);
        let p = AngularSphere::embed(&th);
        assert!((p.iter().map(|v| v * v).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn minkowski_and_half_space() {
        let e = Engine::exact();
        let b = e.curvature(&Minkowski(4), &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(b.riemann.iter().all(|v| *v == 0.0));
        let b = e.curvature(&HalfSpace(3), &[0.7, 0.2, -1.0]).unwrap();
        for i in 0..3 {
            assert!((b.ricci.at(i, i) + 2.0 * b.g.at(i, i)).abs() < 1e-10);
        }
    }
}
