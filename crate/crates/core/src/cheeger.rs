//! Cheeger-constant bounds for conformally compact submanifolds and the
//! Lee-function machinery behind the lower bound.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{GeoError, Result};
use crate::fit::integrate;
use crate::linalg::Mat;
use crate::metrics::PoincareBall;
use crate::scalar::{value_grad_hessian, Scalar};
use crate::submanifold::{extrinsic_data, Embedding};
use crate::tensor::{contract, Engine, MetricField, ScalarField};

/// `k (1 − C²/(k+1)²)^{1/2}` for `|C| < k + 1`.
pub fn cheeger_upper_bound(k: usize, c: f64) -> Result<f64> {
    if k < 1 {
        return Err(GeoError::InvalidParameter("k must be at least 1".into()));
    }
    let kp = (k + 1) as f64;
    if !(c.abs() < kp) {
        return Err(GeoError::InvalidCMC { c, k });
    }
    if c == 0.0 {
        return Ok(k as f64);
    }
    Ok(k as f64 * libm::sqrt(1.0 - (c / kp) * (c / kp)))
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(GeoError::InvalidP { p });
    }
    Ok(())
}

/// `(k/p)^p (1 − C²/(k+1)²)^{p/2}`.
pub fn lambda1p_upper(k: usize, c: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    let q = cheeger_upper_bound(k, c)? / k as f64;
    Ok(libm::pow(k as f64 / p, p) * libm::pow(q, p))
}

/// `p λ^{1/p}`, the Cheeger bound implied by `λ_{1,p} ≥ (Ch/p)^p`.
pub fn cheeger_upper_from_lambda(lambda: f64, p: f64) -> Result<f64> {
    check_p(p)?;
    if !(lambda >= 0.0) {
        return Err(GeoError::InvalidParameter(format!("negative eigenvalue bound {lambda}")));
    }
    Ok(p * libm::pow(lambda, 1.0 / p))
}

/// `u = 2 (1 + |x|²)/(1 − |x|²) = 2 cosh d(0, x)` on the Poincaré ball.
#[derive(Clone, Copy, Debug, Default)]
pub struct LeeHyperbolic;

impl ScalarField for LeeHyperbolic {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let q = x.iter().fold(S::zero(), |a, &v| a + v * v);
        (q + 1.0) * 2.0 * (S::one() - q).recip()
    }
}

/// Value, coordinate gradient and covariant Hessian of a Lee candidate.
#[derive(Clone, Debug)]
pub struct LeeSample {
    pub u: f64,
    pub grad: Vec<f64>,
    pub hess: Mat<f64>,
    pub laplacian: f64,
    /// `|∇u|²`.
    pub grad_norm2: f64,
    /// `b(u) = ∇²u − u g`.
    pub b: Mat<f64>,
}

impl LeeSample {
    pub fn pde_residual(&self, eigenvalue: f64) -> f64 {
        (self.laplacian - eigenvalue * self.u).abs()
    }
    /// `u² − |∇u|²`.
    pub fn gradient_slack(&self) -> f64 {
        self.u * self.u - self.grad_norm2
    }
}

fn lee_sample<M: MetricField, U: ScalarField>(ambient: &M, u: &U, x: &[f64]) -> Result<LeeSample> {
    let eng = Engine::exact();
    let hess = eng.hessian_scalar(ambient, u, x)?;
    let (val, grad, _) = value_grad_hessian(x, |p| u.eval(p));
    let g = Mat::from_vec(ambient.dim(), ambient.components(x));
    let gi = g.inverse().ok_or(GeoError::Degenerate("ambient metric"))?;
    let d = ambient.dim();
    let mut grad_norm2 = 0.0;
    for i in 0..d {
        for j in 0..d {
            grad_norm2 += gi.at(i, j) * grad[i] * grad[j];
        }
    }
    Ok(LeeSample { u: val, laplacian: contract(&gi, &hess), b: hess.sub(&g.scale(val)), hess, grad, grad_norm2 })
}

pub fn lee_hyperbolic(x: &[f64]) -> Result<LeeSample> {
    let q: f64 = x.iter().map(|v| v * v).sum();
    if !(q < 1.0) {
        return Err(GeoError::OutOfDomain { what: "lee_hyperbolic", detail: format!("|x|^2 = {q}") });
    }
    lee_sample(&PoincareBall(x.len()), &LeeHyperbolic, x)
}

/// Worst values of the Lee-function identities over a sample set.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeeDiagnostics {
    pub samples: usize,
    pub min_u: f64,
    /// `max |Δu − (dim) u| / u`.
    pub pde_residual: f64,
    /// `max (|∇u|² − u²) / u²`; nonpositive when the gradient estimate holds.
    pub gradient_excess: f64,
    pub min_gradient_slack: f64,
    pub max_gradient_slack: f64,
}

/// A positive `u` with `Δu = (dim) u` and `|∇u|² ≤ u²` on a sample set.
#[derive(Clone, Debug)]
pub struct LeeField<M, U> {
    pub ambient: M,
    pub u: U,
    pub diagnostics: LeeDiagnostics,
}

impl<M: MetricField, U: ScalarField> LeeField<M, U> {
    /// Validates the candidate at `points`; fails with the worst residual.
    pub fn new(ambient: M, u: U, points: &[Vec<f64>], tol: f64) -> Result<Self> {
        let lambda = ambient.dim() as f64;
        let mut d = LeeDiagnostics {
            samples: points.len(),
            min_u: f64::INFINITY,
            pde_residual: 0.0,
            gradient_excess: f64::NEG_INFINITY,
            min_gradient_slack: f64::INFINITY,
            max_gradient_slack: f64::NEG_INFINITY,
        };
        for x in points {
            let s = lee_sample(&ambient, &u, x)?;
            d.min_u = d.min_u.min(s.u);
            if !(s.u > 0.0) {
                return Err(GeoError::InvalidLeeFunction { residual: s.u });
            }
            d.pde_residual = d.pde_residual.max(s.pde_residual(lambda) / s.u);
            d.gradient_excess = d.gradient_excess.max((s.grad_norm2 - s.u * s.u) / (s.u * s.u));
            d.min_gradient_slack = d.min_gradient_slack.min(s.gradient_slack());
            d.max_gradient_slack = d.max_gradient_slack.max(s.gradient_slack());
        }
        if d.pde_residual > tol {
            return Err(GeoError::InvalidLeeFunction { residual: d.pde_residual });
        }
        if d.gradient_excess > tol {
            return Err(GeoError::InvalidLeeFunction { residual: d.gradient_excess });
        }
        Ok(LeeField { ambient, u, diagnostics: d })
    }

    pub fn sample(&self, x: &[f64]) -> Result<LeeSample> {
        lee_sample(&self.ambient, &self.u, x)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BetaEstimate {
    /// Max over samples of `u⁻¹ Σ_η b(u)(ν_η, ν_η)`.
    pub value: f64,
    pub samples: usize,
}

pub fn beta_y<E: Embedding, M: MetricField, U: ScalarField>(
    e: &E,
    lee: &LeeField<M, U>,
    samples: &[Vec<f64>],
) -> Result<BetaEstimate> {
    let mut value = f64::NEG_INFINITY;
    for y in samples {
        let data = extrinsic_data(e, &lee.ambient, y)?;
        let s = lee.sample(&data.point)?;
        let mut tr = 0.0;
        for nu in &data.normals {
            for i in 0..nu.len() {
                for j in 0..nu.len() {
                    tr += s.b.at(i, j) * nu[i] * nu[j];
                }
            }
        }
        value = value.max(tr / s.u);
    }
    Ok(BetaEstimate { value, samples: samples.len() })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LowerBound {
    pub value: f64,
    /// `β + α ≥ k`: the bound says nothing.
    pub vacuous: bool,
}

/// `k − β − α`.
pub fn cheeger_lower_bound(k: usize, beta: f64, alpha: f64) -> LowerBound {
    let value = k as f64 - beta - alpha;
    LowerBound { value, vacuous: !(beta + alpha < k as f64) }
}

/// `sinh^{m−1}(R) / ∫₀^R sinh^{m−1}(t) dt` for a geodesic ball in `H^m`.
pub fn ball_isoperimetric_ratio(m: usize, radius: f64) -> Result<f64> {
    if m < 2 || !(radius > 0.0) || !radius.is_finite() {
        return Err(GeoError::InvalidParameter(format!("need m >= 2 and R > 0, got ({m}, {radius})")));
    }
    let e = (m - 1) as f64;
    let den = -libm::expm1(-2.0 * radius);
    // (sinh t / sinh R)^{m−1} without overflow
    let f = |t: f64| libm::pow(libm::exp(t - radius) * (-libm::expm1(-2.0 * t)) / den, e);
    let panels = (libm::ceil(4.0 * radius * e) as usize).clamp(8, 4000);
    Ok(1.0 / integrate(f, 0.0, radius, panels, 12))
}

/// Ratio sampled on the radii `r_0 · q^j`.
pub fn ball_ratio_sweep(m: usize, r0: f64, q: f64, count: usize) -> Result<Vec<(f64, f64)>> {
    (0..count)
        .map(|j| {
            let r = r0 * libm::pow(q, j as f64);
            Ok((r, ball_isoperimetric_ratio(m, r)?))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheegerReport {
    pub k: usize,
    pub c: f64,
    pub upper: f64,
    pub alpha: Option<f64>,
    pub beta: Option<BetaEstimate>,
    pub lower: Option<LowerBound>,
    /// `lower ≤ upper` (trivially true without a lower bound).
    pub bracket_valid: bool,
    /// Set when the bracket closes.
    pub determined: Option<f64>,
}

/// Upper bound only, for asymptotically CMC data without an embedding.
pub fn cheeger_bracket_cmc(k: usize, c: f64) -> Result<CheegerReport> {
    Ok(CheegerReport {
        k,
        c,
        upper: cheeger_upper_bound(k, c)?,
        alpha: None,
        beta: None,
        lower: None,
        bracket_valid: true,
        determined: None,
    })
}

/// Bracket for `Y` in the Poincaré ball, using `LeeHyperbolic`.
///
/// With `minimal` the sampled `|H|` must stay below `tol` and `α` is taken as
/// zero; otherwise `α` is the sampled maximum.
pub fn cheeger_bracket_hyperbolic<E: Embedding>(
    e: &E,
    samples: &[Vec<f64>],
    c: f64,
    minimal: bool,
    tol: f64,
) -> Result<CheegerReport> {
    let k = e.intrinsic_dim() - 1;
    let ambient = PoincareBall(e.ambient_dim());
    let mut h_max = 0.0f64;
    let mut points = Vec::with_capacity(samples.len());
    for y in samples {
        let d = extrinsic_data(e, &ambient, y)?;
        h_max = h_max.max(d.mean_norm());
        points.push(d.point);
    }
    let alpha = if minimal {
        if h_max >= tol {
            return Err(GeoError::NotMinimal { mean_curvature: h_max });
        }
        0.0
    } else {
        h_max
    };
    let lee = LeeField::new(ambient, LeeHyperbolic, &points, tol)?;
    let beta = beta_y(e, &lee, samples)?;
    let upper = cheeger_upper_bound(k, c)?;
    let lower = cheeger_lower_bound(k, beta.value, alpha);
    let bracket_valid = lower.vacuous || lower.value <= upper + tol;
    let determined = if !lower.vacuous && (upper - lower.value).abs() < tol { Some(upper) } else { None };
    Ok(CheegerReport { k, c, upper, alpha: Some(alpha), beta: Some(beta), lower: Some(lower), bracket_valid, determined })
}

/// Smallest `Δ_h ln û − k` over intrinsic sample points.
pub fn log_lee_laplacian_margin<M: MetricField, F: ScalarField>(
    metric: &M,
    log_u: &F,
    k: usize,
    points: &[Vec<f64>],
) -> Result<f64> {
    let eng = Engine::exact();
    let mut worst = f64::INFINITY;
    for y in points {
        worst = worst.min(eng.laplacian_scalar(metric, log_u, y)? - k as f64);
    }
    Ok(worst)
}
