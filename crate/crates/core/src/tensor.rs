//! Pointwise curvature of coordinate metrics.
//!
//! Index layout (all row-major, `d = dim`):
//! - metric jets: `dg[k][i][j] = ∂_k g_ij`, `ddg[k][l][i][j] = ∂_k ∂_l g_ij`
//! - Christoffel symbols: `gamma[l][i][j] = Γ^l_ij`
//! - Riemann: `riemann[i][j][k][l] = g(R(∂_i, ∂_j) ∂_l, ∂_k)`

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GeoError, Result};
use crate::linalg::{sym_eigenvalues, Mat};
use crate::scalar::{HyperDual, Scalar};

/// A metric given by its components in a single coordinate chart.
pub trait MetricField {
    fn dim(&self) -> usize;
    /// Signs of the metric's eigenvalues; all `+1` for Riemannian metrics.
    fn signature(&self) -> Vec<i8> {
        vec![1; self.dim()]
    }
    /// Components `g_ij(x)`, row-major `dim × dim`.
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S>;
    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }
}

impl<M: MetricField + ?Sized> MetricField for &M {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn signature(&self) -> Vec<i8> {
        (**self).signature()
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        (**self).components(x)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        (**self).in_domain(x)
    }
}

/// A smooth function on a chart, evaluated generically so it can be differentiated.
pub trait ScalarField {
    fn eval<S: Scalar>(&self, x: &[S]) -> S;
}

impl<F: ScalarField + ?Sized> ScalarField for &F {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        (**self).eval(x)
    }
}

/// The `k`-th coordinate function.
#[derive(Clone, Copy, Debug)]
pub struct Coordinate(pub usize);

impl ScalarField for Coordinate {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        x[self.0]
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Differentiation {
    /// Forward-mode hyper-dual evaluation.
    Exact,
    /// Fourth-order central differences with step `ε^{1/5} · scale`.
    FiniteDifference { scale: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Engine {
    pub mode: Differentiation,
    /// Relative determinant threshold below which a metric counts as degenerate.
    pub eps_degenerate: f64,
}

impl Default for Engine {
    fn default() -> Self {
        Engine { mode: Differentiation::Exact, eps_degenerate: 1e-12 }
    }
}

/// Metric value with first and second partial derivatives at a point.
#[derive(Clone, Debug)]
pub struct MetricJet<S> {
    pub dim: usize,
    pub g: Mat<S>,
    pub dg: Vec<S>,
    pub ddg: Vec<S>,
}

pub fn exact_jet<S: Scalar, M: MetricField + ?Sized>(m: &M, x: &[S]) -> MetricJet<S> {
    let d = m.dim();
    let dd = d * d;
    let mut dg = vec![S::zero(); d * dd];
    let mut ddg = vec![S::zero(); dd * dd];
    let mut g = vec![S::zero(); dd];
    let mut pt: Vec<HyperDual<S>> =
        x.iter().map(|&v| HyperDual::new(v, S::zero(), S::zero(), S::zero())).collect();
    for k in 0..d {
        for l in k..d {
            pt[k].a = S::one();
            pt[l].b = S::one();
            let c = m.components(&pt);
            pt[k].a = S::zero();
            pt[l].b = S::zero();
            for ij in 0..dd {
                if k == 0 && l == 0 {
                    g[ij] = c[ij].v;
                }
                if k == l {
                    dg[k * dd + ij] = c[ij].a;
                }
                ddg[(k * d + l) * dd + ij] = c[ij].ab;
                ddg[(l * d + k) * dd + ij] = c[ij].ab;
            }
        }
    }
    MetricJet { dim: d, g: Mat::from_vec(d, g), dg, ddg }
}

const D1: [(f64, f64); 4] = [(-2.0, 1.0 / 12.0), (-1.0, -8.0 / 12.0), (1.0, 8.0 / 12.0), (2.0, -1.0 / 12.0)];
const D2: [(f64, f64); 5] =
    [(-2.0, -1.0 / 12.0), (-1.0, 16.0 / 12.0), (0.0, -30.0 / 12.0), (1.0, 16.0 / 12.0), (2.0, -1.0 / 12.0)];

pub fn fd_jet<M: MetricField + ?Sized>(m: &M, x: &[f64], h: f64) -> MetricJet<f64> {
    let d = m.dim();
    let dd = d * d;
    let g = m.components(x);
    let mut dg = vec![0.0; d * dd];
    let mut ddg = vec![0.0; dd * dd];
    let mut pt = x.to_vec();
    for k in 0..d {
        for &(o, w) in &D1 {
            pt[k] = x[k] + o * h;
            let c = m.components(&pt);
            for ij in 0..dd {
                dg[k * dd + ij] += w * c[ij] / h;
            }
        }
        pt[k] = x[k];
        for &(o, w) in &D2 {
            pt[k] = x[k] + o * h;
            let c = m.components(&pt);
            for ij in 0..dd {
                ddg[(k * d + k) * dd + ij] += w * c[ij] / (h * h);
            }
        }
        pt[k] = x[k];
        for l in k + 1..d {
            for &(ok, wk) in &D1 {
                for &(ol, wl) in &D1 {
                    pt[k] = x[k] + ok * h;
                    pt[l] = x[l] + ol * h;
                    let c = m.components(&pt);
                    for ij in 0..dd {
                        let v = wk * wl * c[ij] / (h * h);
                        ddg[(k * d + l) * dd + ij] += v;
                        ddg[(l * d + k) * dd + ij] += v;
                    }
                }
            }
            pt[k] = x[k];
            pt[l] = x[l];
        }
    }
    MetricJet { dim: d, g: Mat::from_vec(d, g), dg, ddg }
}

/// Curvature data at a point together with an estimate of its truncation error.
#[derive(Clone, Debug)]
pub struct CurvatureBundle<S> {
    pub dim: usize,
    pub g: Mat<S>,
    pub ginv: Mat<S>,
    pub christoffel: Vec<S>,
    pub riemann: Vec<S>,
    pub ricci: Mat<S>,
    pub scalar: S,
    /// Present when `dim >= 3`.
    pub schouten: Option<Mat<S>>,
    /// Present when `dim >= 4`.
    pub weyl: Option<Vec<S>>,
    pub error_estimate: f64,
}

impl<S: Scalar> CurvatureBundle<S> {
    #[inline]
    pub fn rm(&self, i: usize, j: usize, k: usize, l: usize) -> S {
        let d = self.dim;
        self.riemann[((i * d + j) * d + k) * d + l]
    }
    #[inline]
    pub fn gamma(&self, l: usize, i: usize, j: usize) -> S {
        let d = self.dim;
        self.christoffel[(l * d + i) * d + j]
    }
    pub fn weyl_at(&self, i: usize, j: usize, k: usize, l: usize) -> Option<S> {
        let d = self.dim;
        self.weyl.as_ref().map(|w| w[((i * d + j) * d + k) * d + l])
    }
    pub fn re(&self) -> CurvatureBundle<f64> {
        let re = |v: &Vec<S>| v.iter().map(|x| x.re()).collect::<Vec<f64>>();
        CurvatureBundle {
            dim: self.dim,
            g: self.g.re(),
            ginv: self.ginv.re(),
            christoffel: re(&self.christoffel),
            riemann: re(&self.riemann),
            ricci: self.ricci.re(),
            scalar: self.scalar.re(),
            schouten: self.schouten.as_ref().map(|p| p.re()),
            weyl: self.weyl.as_ref().map(re),
            error_estimate: self.error_estimate,
        }
    }
}

fn check_metric<S: Scalar>(g: &Mat<S>, signature: &[i8], eps: f64) -> Result<Mat<S>> {
    let gr = g.re();
    let d = g.n;
    let scale = gr.max_abs().max(1e-300);
    let det = gr.det();
    if !(det.abs() > eps * libm::pow(scale, d as f64)) {
        return Err(GeoError::Degenerate("metric"));
    }
    if signature.iter().all(|&s| s > 0) {
        let ev = sym_eigenvalues(&gr);
        if ev[0] <= 0.0 {
            return Err(GeoError::Degenerate("Riemannian metric is not positive definite"));
        }
    }
    g.inverse().ok_or(GeoError::Degenerate("metric"))
}

pub fn christoffel_from_jet<S: Scalar>(jet: &MetricJet<S>, ginv: &Mat<S>) -> Vec<S> {
    let d = jet.dim;
    let dd = d * d;
    let dg = |k: usize, i: usize, j: usize| jet.dg[k * dd + i * d + j];
    // first kind: Γ_mij = ½(∂_i g_mj + ∂_j g_mi − ∂_m g_ij)
    let mut first = vec![S::zero(); d * dd];
    for m in 0..d {
        for i in 0..d {
            for j in 0..d {
                first[(m * d + i) * d + j] = (dg(i, m, j) + dg(j, m, i) - dg(m, i, j)) * 0.5;
            }
        }
    }
    let mut gamma = vec![S::zero(); d * dd];
    for l in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = S::zero();
                for m in 0..d {
                    s += ginv.at(l, m) * first[(m * d + i) * d + j];
                }
                gamma[(l * d + i) * d + j] = s;
            }
        }
    }
    gamma
}

/// Assemble the full curvature bundle from a metric jet.
pub fn curvature_from_jet<S: Scalar>(jet: &MetricJet<S>, signature: &[i8], eps: f64) -> Result<CurvatureBundle<S>> {
    let d = jet.dim;
    let dd = d * d;
    let ginv = check_metric(&jet.g, signature, eps)?;
    let gamma = christoffel_from_jet(jet, &ginv);
    let dg = |k: usize, i: usize, j: usize| jet.dg[k * dd + i * d + j];
    let ddg = |k: usize, l: usize, i: usize, j: usize| jet.ddg[(k * d + l) * dd + i * d + j];

    // ∂_k g^{lm} = −g^{la} ∂_k g_ab g^{bm}
    let mut dginv = vec![S::zero(); d * dd];
    for k in 0..d {
        for l in 0..d {
            for m in 0..d {
                let mut s = S::zero();
                for a in 0..d {
                    for b in 0..d {
                        s += ginv.at(l, a) * dg(k, a, b) * ginv.at(b, m);
                    }
                }
                dginv[(k * d + l) * d + m] = -s;
            }
        }
    }
    // ∂_k Γ^l_ij
    let mut dgamma = vec![S::zero(); dd * dd];
    for k in 0..d {
        for i in 0..d {
            for j in i..d {
                let mut f = vec![S::zero(); d];
                let mut df = vec![S::zero(); d];
                for m in 0..d {
                    f[m] = (dg(i, m, j) + dg(j, m, i) - dg(m, i, j)) * 0.5;
                    df[m] = (ddg(k, i, m, j) + ddg(k, j, m, i) - ddg(k, m, i, j)) * 0.5;
                }
                for l in 0..d {
                    let mut s = S::zero();
                    for m in 0..d {
                        s += dginv[(k * d + l) * d + m] * f[m] + ginv.at(l, m) * df[m];
                    }
                    dgamma[((k * d + l) * d + i) * d + j] = s;
                    dgamma[((k * d + l) * d + j) * d + i] = s;
                }
            }
        }
    }
    let gam = |l: usize, i: usize, j: usize| gamma[(l * d + i) * d + j];
    let dgam = |k: usize, l: usize, i: usize, j: usize| dgamma[((k * d + l) * d + i) * d + j];

    // R^l_ijk with R(∂_i, ∂_j)∂_k = R^l_ijk ∂_l
    let mut rup = vec![S::zero(); dd * dd];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = dgam(i, l, j, k) - dgam(j, l, i, k);
                    for m in 0..d {
                        s += gam(l, i, m) * gam(m, j, k) - gam(l, j, m) * gam(m, i, k);
                    }
                    rup[((i * d + j) * d + k) * d + l] = s;
                }
            }
        }
    }
    let mut riemann = vec![S::zero(); dd * dd];
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let mut s = S::zero();
                    for m in 0..d {
                        s += jet.g.at(k, m) * rup[((i * d + j) * d + l) * d + m];
                    }
                    riemann[((i * d + j) * d + k) * d + l] = s;
                }
            }
        }
    }
    let rm = |i: usize, j: usize, k: usize, l: usize| riemann[((i * d + j) * d + k) * d + l];
    let mut ricci = Mat::zeros(d);
    for j in 0..d {
        for k in 0..d {
            let mut s = S::zero();
            for i in 0..d {
                for l in 0..d {
                    s += ginv.at(i, l) * rm(i, j, l, k);
                }
            }
            ricci.set(j, k, s);
        }
    }
    let mut scalar = S::zero();
    for j in 0..d {
        for k in 0..d {
            scalar += ginv.at(j, k) * ricci.at(j, k);
        }
    }
    let schouten = if d >= 3 {
        let c = scalar / (2.0 * (d as f64 - 1.0));
        let mut p = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                p.set(i, j, (ricci.at(i, j) - c * jet.g.at(i, j)) / (d as f64 - 2.0));
            }
        }
        Some(p)
    } else {
        None
    };
    let weyl = match (&schouten, d >= 4) {
        (Some(p), true) => {
            let g = &jet.g;
            let mut w = vec![S::zero(); dd * dd];
            for i in 0..d {
                for j in 0..d {
                    for k in 0..d {
                        for l in 0..d {
                            let kn = p.at(i, k) * g.at(j, l) + p.at(j, l) * g.at(i, k)
                                - p.at(i, l) * g.at(j, k)
                                - p.at(j, k) * g.at(i, l);
                            w[((i * d + j) * d + k) * d + l] = rm(i, j, k, l) - kn;
                        }
                    }
                }
            }
            Some(w)
        }
        _ => None,
    };
    Ok(CurvatureBundle {
        dim: d,
        g: jet.g.clone(),
        ginv,
        christoffel: gamma,
        riemann,
        ricci,
        scalar,
        schouten,
        weyl,
        error_estimate: 0.0,
    })
}

fn domain_check<M: MetricField + ?Sized>(m: &M, x: &[f64]) -> Result<()> {
    if x.len() != m.dim() {
        return Err(GeoError::DimensionMismatch { expected: m.dim(), got: x.len() });
    }
    if !m.in_domain(x) {
        return Err(GeoError::OutOfDomain { what: "metric", detail: format!("{x:?}") });
    }
    Ok(())
}

/// Exact curvature at a point whose coordinates may themselves carry jets.
pub fn curvature_exact<S: Scalar, M: MetricField + ?Sized>(m: &M, x: &[S], eps: f64) -> Result<CurvatureBundle<S>> {
    let xr: Vec<f64> = x.iter().map(|v| v.re()).collect();
    domain_check(m, &xr)?;
    let jet = exact_jet(m, x);
    curvature_from_jet(&jet, &m.signature(), eps)
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |s, (x, y)| s.max((x - y).abs()))
}

impl Engine {
    pub fn exact() -> Self {
        Engine::default()
    }
    pub fn finite_difference(scale: f64) -> Self {
        Engine { mode: Differentiation::FiniteDifference { scale }, ..Engine::default() }
    }

    fn step(scale: f64) -> f64 {
        libm::pow(f64::EPSILON, 0.2) * scale
    }

    pub fn jet<M: MetricField + ?Sized>(&self, m: &M, x: &[f64]) -> Result<(MetricJet<f64>, f64)> {
        domain_check(m, x)?;
        Ok(match self.mode {
            Differentiation::Exact => (exact_jet(m, x), 0.0),
            Differentiation::FiniteDifference { scale } => {
                let h = Self::step(scale);
                let a = fd_jet(m, x, h);
                let b = fd_jet(m, x, 2.0 * h);
                let err = max_diff(&a.dg, &b.dg).max(max_diff(&a.ddg, &b.ddg));
                (a, err)
            }
        })
    }

    pub fn christoffel<M: MetricField + ?Sized>(&self, m: &M, x: &[f64]) -> Result<Vec<f64>> {
        let (jet, _) = self.jet(m, x)?;
        let ginv = check_metric(&jet.g, &m.signature(), self.eps_degenerate)?;
        Ok(christoffel_from_jet(&jet, &ginv))
    }

    pub fn curvature<M: MetricField + ?Sized>(&self, m: &M, x: &[f64]) -> Result<CurvatureBundle<f64>> {
        match self.mode {
            Differentiation::Exact => {
                let mut b = curvature_exact(m, x, self.eps_degenerate)?;
                b.error_estimate = 0.0;
                Ok(b)
            }
            Differentiation::FiniteDifference { scale } => {
                domain_check(m, x)?;
                let h = Self::step(scale);
                let sig = m.signature();
                let mut a = curvature_from_jet(&fd_jet(m, x, h), &sig, self.eps_degenerate)?;
                let b = curvature_from_jet(&fd_jet(m, x, 2.0 * h), &sig, self.eps_degenerate)?;
                a.error_estimate = max_diff(&a.riemann, &b.riemann)
                    .max(max_diff(&a.christoffel, &b.christoffel));
                Ok(a)
            }
        }
    }

    /// Covariant Hessian `∂_i ∂_j f − Γ^k_ij ∂_k f`.
    pub fn hessian_scalar<M: MetricField + ?Sized, F: ScalarField + ?Sized>(
        &self,
        m: &M,
        f: &F,
        x: &[f64],
    ) -> Result<Mat<f64>> {
        let gamma = self.christoffel(m, x)?;
        let d = m.dim();
        let (df, ddf) = match self.mode {
            Differentiation::Exact => {
                let (_, g, h) = crate::scalar::value_grad_hessian(x, |p| f.eval(p));
                (g, h)
            }
            Differentiation::FiniteDifference { scale } => fd_grad_hessian(x, Self::step(scale), |p| f.eval(p)),
        };
        let mut h = Mat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                let mut s = ddf[i * d + j];
                for k in 0..d {
                    s -= gamma[(k * d + i) * d + j] * df[k];
                }
                h.set(i, j, s);
            }
        }
        Ok(h)
    }

    pub fn laplacian_scalar<M: MetricField + ?Sized, F: ScalarField + ?Sized>(
        &self,
        m: &M,
        f: &F,
        x: &[f64],
    ) -> Result<f64> {
        let h = self.hessian_scalar(m, f, x)?;
        let (jet, _) = self.jet(m, x)?;
        let ginv = check_metric(&jet.g, &m.signature(), self.eps_degenerate)?;
        Ok(contract(&ginv, &h))
    }

    pub fn sectional_curvature<M: MetricField + ?Sized>(&self, m: &M, x: &[f64], u: &[f64], v: &[f64]) -> Result<f64> {
        let b = self.curvature(m, x)?;
        sectional_from_bundle(&b, u, v)
    }
}

/// Full contraction `a^{ij} b_ij`.
pub fn contract<S: Scalar>(a: &Mat<S>, b: &Mat<S>) -> S {
    let mut s = S::zero();
    for i in 0..a.n {
        for j in 0..a.n {
            s += a.at(i, j) * b.at(i, j);
        }
    }
    s
}

pub fn sectional_from_bundle(b: &CurvatureBundle<f64>, u: &[f64], v: &[f64]) -> Result<f64> {
    let d = b.dim;
    let ip = |a: &[f64], c: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..d {
            for j in 0..d {
                s += a[i] * b.g.at(i, j) * c[j];
            }
        }
        s
    };
    let (uu, vv, uv) = (ip(u, u), ip(v, v), ip(u, v));
    let gram = uu * vv - uv * uv;
    if gram.abs() <= 1e-12 * (uu.abs() * vv.abs()).max(1e-300) {
        return Err(GeoError::Degenerate("plane"));
    }
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    s += b.rm(i, j, k, l) * u[i] * v[j] * u[k] * v[l];
                }
            }
        }
    }
    Ok(s / gram)
}

fn fd_grad_hessian<F: Fn(&[f64]) -> f64>(x: &[f64], h: f64, f: F) -> (Vec<f64>, Vec<f64>) {
    let d = x.len();
    let mut g = vec![0.0; d];
    let mut hs = vec![0.0; d * d];
    let mut pt = x.to_vec();
    for k in 0..d {
        for &(o, w) in &D1 {
            pt[k] = x[k] + o * h;
            g[k] += w * f(&pt) / h;
        }
        for &(o, w) in &D2 {
            pt[k] = x[k] + o * h;
            hs[k * d + k] += w * f(&pt) / (h * h);
        }
        pt[k] = x[k];
        for l in k + 1..d {
            for &(ok, wk) in &D1 {
                for &(ol, wl) in &D1 {
                    pt[k] = x[k] + ok * h;
                    pt[l] = x[l] + ol * h;
                    let v = wk * wl * f(&pt) / (h * h);
                    hs[k * d + l] += v;
                    hs[l * d + k] += v;
                }
            }
            pt[k] = x[k];
            pt[l] = x[l];
        }
    }
    (g, hs)
}

/// Residuals of the algebraic identities every Levi-Civita curvature satisfies.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SymmetryResiduals {
    pub antisymmetry: f64,
    pub pair_symmetry: f64,
    pub bianchi: f64,
    pub ricci_symmetry: f64,
    pub scalar_trace: f64,
    pub weyl_trace: f64,
    pub metric_compatibility: f64,
}

impl SymmetryResiduals {
    pub fn max(&self) -> f64 {
        [
            self.antisymmetry,
            self.pair_symmetry,
            self.bianchi,
            self.ricci_symmetry,
            self.scalar_trace,
            self.weyl_trace,
            self.metric_compatibility,
        ]
        .iter()
        .fold(0.0, |a, &b| a.max(b))
    }
}

pub fn symmetry_residuals(b: &CurvatureBundle<f64>, jet: &MetricJet<f64>) -> SymmetryResiduals {
    let d = b.dim;
    let mut r = SymmetryResiduals::default();
    let upd = |slot: &mut f64, v: f64| *slot = slot.max(v.abs());
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    upd(&mut r.antisymmetry, b.rm(i, j, k, l) + b.rm(j, i, k, l));
                    upd(&mut r.antisymmetry, b.rm(i, j, k, l) + b.rm(i, j, l, k));
                    upd(&mut r.pair_symmetry, b.rm(i, j, k, l) - b.rm(k, l, i, j));
                    upd(&mut r.bianchi, b.rm(i, j, k, l) + b.rm(j, k, i, l) + b.rm(k, i, j, l));
                }
            }
        }
    }
    for i in 0..d {
        for j in 0..d {
            upd(&mut r.ricci_symmetry, b.ricci.at(i, j) - b.ricci.at(j, i));
        }
    }
    upd(&mut r.scalar_trace, b.scalar - contract(&b.ginv, &b.ricci));
    if let Some(w) = &b.weyl {
        for j in 0..d {
            for k in 0..d {
                let mut s = 0.0;
                for i in 0..d {
                    for l in 0..d {
                        s += b.ginv.at(i, l) * w[((i * d + j) * d + l) * d + k];
                    }
                }
                upd(&mut r.weyl_trace, s);
            }
        }
    }
    // ∇_k g_ij = ∂_k g_ij − Γ^m_ki g_mj − Γ^m_kj g_im
    for k in 0..d {
        for i in 0..d {
            for j in 0..d {
                let mut s = jet.dg[(k * d + i) * d + j];
                for m in 0..d {
                    s -= b.gamma(m, k, i) * b.g.at(m, j) + b.gamma(m, k, j) * b.g.at(i, m);
                }
                upd(&mut r.metric_compatibility, s);
            }
        }
    }
    r
}
