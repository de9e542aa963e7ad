//! Metrics in normal form `ḡ = dr² + g_r` near a boundary `Σ = {r = 0}`.
//!
//! Bulk coordinates are `(r, x_1, …, x_n)`; index `0` is always `r`.

mod classify;
mod expansion;
mod families;

pub use classify::*;
pub use expansion::*;
pub use families::*;

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GeoError, Result};
use crate::linalg::Mat;
use crate::scalar::{Dual, HyperDual, Scalar};
use crate::tensor::MetricField;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FamilyMetadata {
    /// Whether `g_+` is claimed to be Einstein.
    pub claimed_einstein: Option<bool>,
    /// Sign of the Yamabe invariant of the conformal infinity, when known.
    pub yamabe_sign: Option<i8>,
}

/// A one-parameter family of boundary metrics `g_r`, `0 ≤ r < r_max`.
pub trait NormalFormFamily {
    fn boundary_dim(&self) -> usize;
    /// Components of `g_r` at boundary coordinates `x`, row-major `n × n`.
    fn g_r<S: Scalar>(&self, r: S, x: &[S]) -> Vec<S>;
    fn r_max(&self) -> f64;
    /// Whether `g_r` may be differentiated in `r` at `r = 0` directly.
    /// Families answering `false` have their expansion fitted on a ladder.
    fn analytic_in_r(&self) -> bool {
        true
    }
    /// Coordinate box `[lo, hi]^n` used when sampling boundary points.
    fn boundary_box(&self) -> (f64, f64) {
        (-1.0, 1.0)
    }
    fn boundary_in_domain(&self, _x: &[f64]) -> bool {
        true
    }
    fn metadata(&self) -> FamilyMetadata {
        FamilyMetadata::default()
    }
}

impl<F: NormalFormFamily + ?Sized> NormalFormFamily for &F {
    fn boundary_dim(&self) -> usize {
        (**self).boundary_dim()
    }
    fn g_r<S: Scalar>(&self, r: S, x: &[S]) -> Vec<S> {
        (**self).g_r(r, x)
    }
    fn r_max(&self) -> f64 {
        (**self).r_max()
    }
    fn analytic_in_r(&self) -> bool {
        (**self).analytic_in_r()
    }
    fn boundary_box(&self) -> (f64, f64) {
        (**self).boundary_box()
    }
    fn boundary_in_domain(&self, x: &[f64]) -> bool {
        (**self).boundary_in_domain(x)
    }
    fn metadata(&self) -> FamilyMetadata {
        (**self).metadata()
    }
}

/// The compactified bulk metric `dr² + g_r`.
#[derive(Clone, Copy, Debug)]
pub struct Collar<F>(pub F);

impl<F: NormalFormFamily> MetricField for Collar<F> {
    fn dim(&self) -> usize {
        self.0.boundary_dim() + 1
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let n = self.0.boundary_dim();
        let d = n + 1;
        let gr = self.0.g_r(x[0], &x[1..]);
        let mut g = vec![S::zero(); d * d];
        g[0] = S::one();
        for i in 0..n {
            for j in 0..n {
                g[(i + 1) * d + j + 1] = gr[i * n + j];
            }
        }
        g
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] >= 0.0 && x[0] < self.0.r_max() && self.0.boundary_in_domain(&x[1..])
    }
}

/// The complete metric `g_+ = r^{-2} (dr² + g_r)` on `r > 0`.
#[derive(Clone, Copy, Debug)]
pub struct Singular<F>(pub F);

impl<F: NormalFormFamily> MetricField for Singular<F> {
    fn dim(&self) -> usize {
        self.0.boundary_dim() + 1
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let c = x[0].powi(-2);
        Collar(&self.0).components(x).into_iter().map(|v| v * c).collect()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        x[0] > 0.0 && x[0] < self.0.r_max() && self.0.boundary_in_domain(&x[1..])
    }
}

/// The boundary representative `ĝ = g_0`.
#[derive(Clone, Copy, Debug)]
pub struct BoundaryMetric<F>(pub F);

impl<F: NormalFormFamily> MetricField for BoundaryMetric<F> {
    fn dim(&self) -> usize {
        self.0.boundary_dim()
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        self.0.g_r(S::zero(), x)
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.0.boundary_in_domain(x)
    }
}

pub(crate) fn check_point<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<()> {
    let n = fam.boundary_dim();
    if x.len() != n {
        return Err(GeoError::DimensionMismatch { expected: n, got: x.len() });
    }
    if !(r >= 0.0 && r < fam.r_max()) || !fam.boundary_in_domain(x) {
        return Err(GeoError::OutOfDomain { what: "normal-form collar", detail: format!("r = {r}, x = {x:?}") });
    }
    Ok(())
}

/// Geometry of the level set `{r = const}` in `ḡ`.
#[derive(Clone, Debug)]
pub struct LevelSet<S> {
    pub g: Mat<S>,
    pub ginv: Mat<S>,
    /// Second fundamental form `L̄_r = −½ ∂_r g_r`.
    pub l: Mat<S>,
    /// Mean curvature `H̄_r = g_r^{ij} (L̄_r)_ij`.
    pub h: S,
}

/// Level-set data at `(r, x)`; the inputs may carry jets.
pub fn level_set<S: Scalar, F: NormalFormFamily + ?Sized>(fam: &F, r: S, x: &[S]) -> Result<LevelSet<S>> {
    let n = fam.boundary_dim();
    let rr = Dual::new(r, S::one());
    let xs: Vec<Dual<S>> = x.iter().map(|&v| Dual::new(v, S::zero())).collect();
    let c = fam.g_r(rr, &xs);
    let g = Mat::from_vec(n, c.iter().map(|v| v.v).collect());
    let l = Mat::from_vec(n, c.iter().map(|v| v.d * (-0.5)).collect());
    let ginv = g.inverse().ok_or(GeoError::Degenerate("level-set metric"))?;
    let mut h = S::zero();
    for i in 0..n {
        for j in 0..n {
            h += ginv.at(i, j) * l.at(i, j);
        }
    }
    Ok(LevelSet { g, ginv, l, h })
}

/// `L̄_r` at `(r, x)`.
pub fn shape_operator_level_set<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<Mat<f64>> {
    check_point(fam, r, x)?;
    Ok(level_set(fam, r, x)?.l)
}

/// `H̄_r` at `(r, x)`.
pub fn mean_curvature_level_set<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<f64> {
    check_point(fam, r, x)?;
    Ok(level_set(fam, r, x)?.h)
}

/// Mean curvature of `{r = const}` in `g_+`: `n + r H̄_r`.
pub fn singular_mean_curvature<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<f64> {
    if !(r > 0.0) {
        return Err(GeoError::OutOfDomain { what: "singular mean curvature", detail: format!("r = {r}") });
    }
    Ok(fam.boundary_dim() as f64 + r * mean_curvature_level_set(fam, r, x)?)
}

type Jet3 = HyperDual<Dual<f64>>;

/// Taylor coefficients `[f(0), f'(0), f''(0)/2, f'''(0)/6]` in `r` of a
/// vector-valued function evaluated on third-order jets.
pub fn r_taylor3<G: Fn(Jet3) -> Result<Vec<Jet3>>>(r0: f64, f: G) -> Result<[Vec<f64>; 4]> {
    let t = HyperDual::new(Dual::new(r0, 1.0), Dual::cst(1.0), Dual::cst(1.0), Dual::cst(0.0));
    let out = f(t)?;
    Ok([
        out.iter().map(|v| v.v.v).collect(),
        out.iter().map(|v| v.a.v).collect(),
        out.iter().map(|v| v.ab.v * 0.5).collect(),
        out.iter().map(|v| v.ab.d / 6.0).collect(),
    ])
}

/// Taylor coefficients of `g_r` at `r = 0`.
pub fn metric_taylor<F: NormalFormFamily + ?Sized>(fam: &F, x: &[f64]) -> Result<[Mat<f64>; 4]> {
    let n = fam.boundary_dim();
    let xs: Vec<Jet3> = x.iter().map(|&v| Jet3::cst(v)).collect();
    let [a, b, c, d] = r_taylor3(0.0, |t| Ok(fam.g_r(t, &xs)))?;
    Ok([Mat::from_vec(n, a), Mat::from_vec(n, b), Mat::from_vec(n, c), Mat::from_vec(n, d)])
}

/// Norm of a symmetric 2-tensor with respect to `g` (via `g^{-1}`).
pub fn tensor_norm(ginv: &Mat<f64>, t: &Mat<f64>) -> f64 {
    let n = t.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    s += ginv.at(i, k) * ginv.at(j, l) * t.at(i, j) * t.at(k, l);
                }
            }
        }
    }
    libm::sqrt(s.abs())
}

/// `(A g^{-1} B)_ij = A_ia g^{ab} B_bj`.
pub fn raise_mul<S: Scalar>(a: &Mat<S>, ginv: &Mat<S>, b: &Mat<S>) -> Mat<S> {
    a.mul(ginv).mul(b)
}
