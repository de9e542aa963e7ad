//! Minimal rotation hypersurfaces ("catenoids") of hyperbolic space.
//!
//! The orbit radius `x₁(s)` of an arclength-parametrised profile solves
//! `x₁ x₁'' + n x₁'² − (n+1) x₁² − δ n = 0`. Along solutions
//! `K = x₁^{2n} (x₁'² − x₁² − δ)` is constant, and the rotation phase obeys
//! `φ' = √(1 − δ − K x₁^{−2n}) / (1 + x₁²)`.
//!
//! The hypersurface lives in the hyperboloid `⟨X, X⟩ = −1` of Minkowski
//! space with the timelike coordinate last:
//! `f(s, z) = (x₁ θ(z), R sinh φ, R cosh φ)` with `R = √(1 + x₁²)` and `θ`
//! the inverse stereographic chart of the unit sphere.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GeoError, Result};
use crate::fit::{ladder_fit, Ladder};
use crate::linalg::Mat;
use crate::metrics::{Minkowski, PoincareBall};
use crate::scalar::Scalar;
use crate::tensor::{MetricField, ScalarField};
use crate::submanifold::{
    boundary_conformal_invariant, extrinsic_data, induced_metric, BallDefiningFunction, BoundaryInvariant, Compactified,
    Embedding,
};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Switch to `u = ln x₁` once `x₁` exceeds this.
    pub x_switch: f64,
    pub max_steps: usize,
    pub h_max: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig { abs_tol: 1e-10, rel_tol: 1e-10, x_switch: 1e6, max_steps: 200_000, h_max: 0.05 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CatenoidParams {
    /// Orbit dimension; the hypersurface has dimension `n + 1`.
    pub n: usize,
    /// `+1` spherical, `0` parabolic, `−1` hyperbolic.
    pub delta: i8,
    pub x0: f64,
    pub dx0: f64,
    pub s_max: f64,
    pub integrator: IntegratorConfig,
}

impl CatenoidParams {
    /// Spherical catenoid with neck radius `a`.
    pub fn spherical(n: usize, a: f64, s_max: f64) -> Self {
        CatenoidParams { n, delta: 1, x0: a, dx0: 0.0, s_max, integrator: IntegratorConfig::default() }
    }

    pub fn with_data(n: usize, delta: i8, x0: f64, dx0: f64, s_max: f64) -> Self {
        CatenoidParams { n, delta, x0, dx0, s_max, integrator: IntegratorConfig::default() }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(GeoError::InvalidParameter(m.into()));
        if self.n < 1 {
            return bad("orbit dimension n must be at least 1");
        }
        if !(-1..=1).contains(&self.delta) {
            return bad("delta must be -1, 0 or 1");
        }
        if !(self.x0 > 0.0) || !self.x0.is_finite() || !self.dx0.is_finite() {
            return bad("initial radius must be positive");
        }
        if !(self.s_max > 0.0) || !self.s_max.is_finite() {
            return bad("s_max must be positive");
        }
        let c = &self.integrator;
        if !(c.abs_tol > 0.0 && c.rel_tol >= 0.0 && c.h_max > 0.0 && c.x_switch > 0.0) {
            return bad("integrator tolerances must be positive");
        }
        Ok(())
    }

    /// `K = x₁^{2n} (x₁'² − x₁² − δ)` from the initial data, snapped to zero
    /// below its own rounding error.
    pub fn first_integral(&self) -> f64 {
        let (x2, dx2, d) = (self.x0 * self.x0, self.dx0 * self.dx0, self.delta as f64);
        let inner = dx2 - x2 - d;
        if inner.abs() <= 8.0 * f64::EPSILON * (dx2 + x2 + d.abs()) {
            return 0.0;
        }
        libm::pow(self.x0, 2.0 * self.n as f64) * inner
    }

    /// Neck data: the profile is even in `s`.
    pub fn symmetric(&self) -> bool {
        self.dx0 == 0.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileSample {
    pub s: f64,
    pub x1: f64,
    pub dx1: f64,
    pub ddx1: f64,
    pub phi: f64,
    /// Local error estimate of the step ending here, relative to `max(1, x₁)`.
    pub residual: f64,
}

impl ProfileSample {
    /// `x₁ x₁'' + n x₁'² − (n+1) x₁² − δ n`.
    pub fn ode_defect(&self, n: usize, delta: i8) -> f64 {
        let nf = n as f64;
        self.x1 * self.ddx1 + nf * self.dx1 * self.dx1 - (nf + 1.0) * self.x1 * self.x1 - delta as f64 * nf
    }

    /// `1 − x₁'² + R'²` with `R = √(1 + x₁²)`.
    pub fn arc_length_slack(&self) -> f64 {
        1.0 - self.dx1 * self.dx1 / (1.0 + self.x1 * self.x1)
    }
}

#[derive(Clone, Debug)]
pub struct ProfileSolution {
    pub params: CatenoidParams,
    /// Accepted integration nodes on `[0, s_max]`.
    pub samples: Vec<ProfileSample>,
    pub residual_max: f64,
    pub first_integral: f64,
    /// Where the log variable took over, if it did.
    pub switch_s: Option<f64>,
}

type State = [f64; 3];

#[derive(Clone, Copy, PartialEq)]
enum Phase {
    Linear,
    Log,
}

struct Rhs {
    n: f64,
    delta: f64,
    k: f64,
}

impl Rhs {
    fn new(p: &CatenoidParams) -> Self {
        Rhs { n: p.n as f64, delta: p.delta as f64, k: p.first_integral() }
    }

    fn phase_rate<S: Scalar>(&self, x: S, x_pow_m2n: S) -> S {
        let rad = x_pow_m2n * (-self.k) + (1.0 - self.delta);
        if rad.re() <= 0.0 {
            S::zero()
        } else {
            rad.sqrt() * (x * x + 1.0).recip()
        }
    }

    fn eval(&self, phase: Phase, s: f64, y: &State) -> Result<State> {
        match phase {
            Phase::Linear => {
                let (x, dx) = (y[0], y[1]);
                if !(x > 0.0) {
                    return Err(GeoError::Blowup { s });
                }
                let ddx = ((self.n + 1.0) * x * x + self.delta * self.n - self.n * dx * dx) / x;
                let xm = libm::pow(x, -2.0 * self.n);
                self.check_arc(s, xm)?;
                Ok([dx, ddx, self.phase_rate(x, xm)])
            }
            Phase::Log => Ok(self.log_rhs(&[y[0], y[1], y[2]])),
        }
    }

    fn check_arc(&self, s: f64, x_pow_m2n: f64) -> Result<()> {
        let rad = 1.0 - self.delta - self.k * x_pow_m2n;
        if rad < -1e-8 {
            return Err(GeoError::ArcLengthViolation { s, value: rad });
        }
        Ok(())
    }

    /// `(u', v', φ')` for `u = ln x₁`, `v = u'`.
    fn log_rhs<S: Scalar>(&self, y: &[S; 3]) -> [S; 3] {
        let (u, v) = (y[0], y[1]);
        let e2 = (u * -2.0).exp();
        let dv = (S::one() - v * v) * (self.n + 1.0) + e2 * (self.delta * self.n);
        let x = u.exp();
        let xm = (u * (-2.0 * self.n)).exp();
        [v, dv, self.phase_rate(x, xm)]
    }
}

// Dormand–Prince 5(4) tableau
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One step; returns the fifth-order update and the embedded error estimate.
fn dp5_step(f: &Rhs, phase: Phase, s: f64, y: &State, h: f64) -> Result<(State, State)> {
    let mut k = [[0.0; 3]; 7];
    for i in 0..7 {
        let mut yi = *y;
        for (j, kj) in k.iter().enumerate().take(i) {
            for d in 0..3 {
                yi[d] += h * A[i][j] * kj[d];
            }
        }
        if i == 6 {
            // FSAL: the last stage is evaluated at the solution
            let y_new = yi;
            k[6] = f.eval(phase, s + h, &y_new)?;
            let mut err = [0.0; 3];
            for d in 0..3 {
                err[d] = h * (0..7).map(|j| E[j] * k[j][d]).sum::<f64>();
            }
            return Ok((y_new, err));
        }
        k[i] = f.eval(phase, s + C[i] * h, &yi)?;
    }
    unreachable!()
}

fn to_log(y: &State) -> State {
    [libm::log(y[0]), y[1] / y[0], y[2]]
}

fn sample(f: &Rhs, phase: Phase, s: f64, y: &State, residual: f64) -> ProfileSample {
    let (x1, dx1) = match phase {
        Phase::Linear => (y[0], y[1]),
        Phase::Log => {
            let x = libm::exp(y[0]);
            (x, y[1] * x)
        }
    };
    let ddx1 = ((f.n + 1.0) * x1 * x1 + f.delta * f.n - f.n * dx1 * dx1) / x1;
    ProfileSample { s, x1, dx1, ddx1, phi: y[2], residual }
}

/// Adaptive integration of the profile on `[0, s_max]`.
pub fn solve_profile(p: &CatenoidParams) -> Result<ProfileSolution> {
    p.validate()?;
    let cfg = p.integrator;
    let f = Rhs::new(p);
    let mut phase = Phase::Linear;
    let mut y: State = [p.x0, p.dx0, 0.0];
    f.eval(phase, 0.0, &y)?;
    let mut s = 0.0;
    let mut h = 1e-3f64.min(cfg.h_max);
    let mut samples = vec![sample(&f, phase, s, &y, 0.0)];
    let mut switch_s = None;
    let mut residual_max = 0.0f64;
    let mut steps = 0;
    while s < p.s_max {
        steps += 1;
        if steps > cfg.max_steps {
            return Err(GeoError::IntegrationFailed(format!("step budget exhausted at s = {s}")));
        }
        let last = p.s_max - s <= h;
        let hs = if last { p.s_max - s } else { h };
        let (y_new, err) = dp5_step(&f, phase, s, &y, hs)?;
        let norm = libm::sqrt(
            (0..3)
                .map(|d| {
                    let sc = cfg.abs_tol + cfg.rel_tol * y[d].abs().max(y_new[d].abs());
                    (err[d] / sc) * (err[d] / sc)
                })
                .sum::<f64>()
                / 3.0,
        );
        if norm <= 1.0 {
            s = if last { p.s_max } else { s + hs };
            y = y_new;
            if phase == Phase::Linear && !(y[0] > 0.0) {
                return Err(GeoError::Blowup { s });
            }
            let residual = match phase {
                Phase::Linear => err[0].abs() / y[0].abs().max(1.0),
                Phase::Log => err[0].abs(),
            };
            residual_max = residual_max.max(residual);
            samples.push(sample(&f, phase, s, &y, residual));
            if phase == Phase::Linear && y[0] > cfg.x_switch {
                phase = Phase::Log;
                y = to_log(&y);
                switch_s = Some(s);
            }
        }
        let fac = if norm == 0.0 { 5.0 } else { (0.9 * libm::pow(norm, -0.2)).clamp(0.2, 5.0) };
        h = (hs * fac).min(cfg.h_max);
        if h < 1e-14 * (1.0 + s.abs()) {
            return Err(GeoError::ToleranceNotMet { residual: norm * cfg.abs_tol, tol: cfg.abs_tol });
        }
    }
    if residual_max >= 10.0 * cfg.abs_tol {
        return Err(GeoError::ToleranceNotMet { residual: residual_max, tol: 10.0 * cfg.abs_tol });
    }
    Ok(ProfileSolution { params: *p, samples, residual_max, first_integral: f.k, switch_s })
}

/// Differences between re-integrations on the accepted grid with every step
/// split into 1, 2 and 4 fixed substeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoGridCheck {
    pub coarse_vs_half: f64,
    pub half_vs_quarter: f64,
}

impl TwoGridCheck {
    /// Observed convergence order `log₂` of the ratio of successive differences.
    pub fn observed_order(&self) -> f64 {
        libm::log2(self.coarse_vs_half / self.half_vs_quarter)
    }
}

impl ProfileSolution {
    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn s_max(&self) -> f64 {
        self.params.s_max
    }

    pub fn last(&self) -> &ProfileSample {
        self.samples.last().expect("profile has at least one sample")
    }

    /// Max over samples of `|x₁^{2n}(x₁'² − x₁² − δ) − K|` relative to
    /// `|K| + x₁^{2n}(x₁'² + x₁² + |δ|)`, the size of the cancelling terms.
    pub fn first_integral_drift(&self) -> f64 {
        let nn = 2.0 * self.n() as f64;
        let d = self.params.delta as f64;
        let k = self.first_integral;
        self.samples
            .iter()
            .map(|q| {
                let p = libm::pow(q.x1, nn);
                let v = p * (q.dx1 * q.dx1 - q.x1 * q.x1 - d);
                (v - k).abs() / (k.abs() + p * (q.dx1 * q.dx1 + q.x1 * q.x1 + d.abs()))
            })
            .fold(0.0, f64::max)
    }

    pub fn max_ode_defect(&self) -> f64 {
        self.samples
            .iter()
            .map(|q| q.ode_defect(self.n(), self.params.delta).abs() / (1.0 + q.x1 * q.x1))
            .fold(0.0, f64::max)
    }

    fn fixed_run(&self, sub: usize) -> Result<Vec<(f64, f64)>> {
        let f = Rhs::new(&self.params);
        let mut out = Vec::with_capacity(self.samples.len());
        let mut phase = Phase::Linear;
        let mut y: State = [self.params.x0, self.params.dx0, 0.0];
        out.push((y[0], y[2]));
        for w in self.samples.windows(2) {
            let h = (w[1].s - w[0].s) / sub as f64;
            for k in 0..sub {
                y = dp5_step(&f, phase, w[0].s + k as f64 * h, &y, h)?.0;
            }
            let x = if phase == Phase::Log { libm::exp(y[0]) } else { y[0] };
            out.push((x, y[2]));
            if phase == Phase::Linear && Some(w[1].s) == self.switch_s {
                phase = Phase::Log;
                y = to_log(&y);
            }
        }
        Ok(out)
    }

    /// Re-integrate on the accepted grid with halved and quartered steps.
    pub fn two_grid_check(&self) -> Result<TwoGridCheck> {
        let runs = [self.fixed_run(1)?, self.fixed_run(2)?, self.fixed_run(4)?];
        let diff = |a: &[(f64, f64)], b: &[(f64, f64)]| {
            a.iter()
                .zip(b)
                .map(|(p, q)| ((p.0 - q.0).abs() / p.0.abs().max(1.0)).max((p.1 - q.1).abs()))
                .fold(0.0, f64::max)
        };
        Ok(TwoGridCheck { coarse_vs_half: diff(&runs[0], &runs[1]), half_vs_quarter: diff(&runs[1], &runs[2]) })
    }

    /// `(x₁, x₁', φ)` at any `s`, continued from the nearest node by RK4
    /// substeps in the log variable so that jets differentiate through it.
    pub fn eval<S: Scalar>(&self, s: S) -> (S, S, S) {
        if s.re() < 0.0 && self.params.symmetric() {
            let (x, dx, phi) = self.eval(-s);
            return (x, -dx, -phi);
        }
        let sr = s.re();
        let i = self.samples.partition_point(|q| q.s < sr);
        let node = if i == 0 {
            &self.samples[0]
        } else if i == self.samples.len() || sr - self.samples[i - 1].s <= self.samples[i].s - sr {
            &self.samples[i - 1]
        } else {
            &self.samples[i]
        };
        let f = Rhs::new(&self.params);
        let mut y = [S::cst(libm::log(node.x1)), S::cst(node.dx1 / node.x1), S::cst(node.phi)];
        let h_total = s - node.s;
        let m = libm::ceil(h_total.re().abs() / 0.004).max(1.0) as usize;
        let h = h_total * (1.0 / m as f64);
        let add = |y: &[S; 3], k: &[S; 3], c: S| [y[0] + k[0] * c, y[1] + k[1] * c, y[2] + k[2] * c];
        for _ in 0..m {
            let k1 = f.log_rhs(&y);
            let k2 = f.log_rhs(&add(&y, &k1, h * 0.5));
            let k3 = f.log_rhs(&add(&y, &k2, h * 0.5));
            let k4 = f.log_rhs(&add(&y, &k3, h));
            for d in 0..3 {
                y[d] += (k1[d] + (k2[d] + k3[d]) * 2.0 + k4[d]) * h * (1.0 / 6.0);
            }
        }
        let x = y[0].exp();
        (x, y[1] * x, y[2])
    }

    /// `lim_{s→∞} φ(s)`, using the tail `∫ φ' ≈ √(−K) x₁^{−n−2}/(n+2)`.
    pub fn phi_infinity(&self) -> f64 {
        let q = self.last();
        let nf = self.n() as f64;
        let tail = libm::sqrt((-self.first_integral).max(0.0)) * libm::pow(q.x1, -nf - 2.0) / (nf + 2.0);
        q.phi + tail
    }
}

/// Inverse stereographic chart `z ↦ (2z, |z|² − 1)/(|z|² + 1)` of the unit sphere.
pub fn sphere_chart<S: Scalar>(z: &[S]) -> Vec<S> {
    let q = z.iter().fold(S::zero(), |a, &v| a + v * v);
    let d = (q + 1.0).recip();
    let mut out: Vec<S> = z.iter().map(|&v| v * 2.0 * d).collect();
    out.push((q - 1.0) * d);
    out
}

/// Hyperboloid point `(X, T)` to the ball point `X / (1 + T)`.
pub fn hyperboloid_to_ball<S: Scalar>(p: &[S]) -> Vec<S> {
    let (x, t) = p.split_at(p.len() - 1);
    let d = (t[0] + 1.0).recip();
    x.iter().map(|&v| v * d).collect()
}

pub fn ball_to_hyperboloid<S: Scalar>(x: &[S]) -> Vec<S> {
    let q = x.iter().fold(S::zero(), |a, &v| a + v * v);
    let d = (S::one() - q).recip();
    let mut out: Vec<S> = x.iter().map(|&v| v * 2.0 * d).collect();
    out.push((q + 1.0) * d);
    out
}

/// Catenoid in the hyperboloid model; intrinsic coordinates `(s, z)`.
#[derive(Clone, Debug)]
pub struct CatenoidEmbedding {
    pub profile: ProfileSolution,
    /// Multiplies `x₁`; `1` for the actual catenoid.
    pub x_scale: f64,
}

pub fn build_embedding(sol: &ProfileSolution) -> Result<CatenoidEmbedding> {
    if sol.params.delta != 1 {
        return Err(GeoError::InvalidParameter("only spherical profiles are embedded".into()));
    }
    for q in &sol.samples {
        let v = q.arc_length_slack();
        if v < -1e-8 {
            return Err(GeoError::ArcLengthViolation { s: q.s, value: v });
        }
    }
    Ok(CatenoidEmbedding { profile: sol.clone(), x_scale: 1.0 })
}

impl CatenoidEmbedding {
    pub fn perturbed(&self, factor: f64) -> Self {
        CatenoidEmbedding { profile: self.profile.clone(), x_scale: self.x_scale * factor }
    }

    pub fn n(&self) -> usize {
        self.profile.n()
    }
}

impl Embedding for CatenoidEmbedding {
    fn intrinsic_dim(&self) -> usize {
        self.n() + 1
    }
    fn ambient_dim(&self) -> usize {
        self.n() + 3
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let (x, _, phi) = self.profile.eval(u[0]);
        let x = x * self.x_scale;
        let r = (x * x + 1.0).sqrt();
        let mut out: Vec<S> = sphere_chart(&u[1..]).into_iter().map(|t| t * x).collect();
        out.push(r * phi.sinh());
        out.push(r * phi.cosh());
        out
    }
    fn in_domain(&self, u: &[f64]) -> bool {
        let lo = if self.profile.params.symmetric() { -self.profile.s_max() } else { 0.0 };
        u.len() == self.intrinsic_dim() && u[0] >= lo && u[0] <= self.profile.s_max()
    }
}

/// Any hyperboloid embedding carried into the Poincaré ball.
#[derive(Clone, Debug)]
pub struct BallModel<E>(pub E);

impl<E: Embedding> Embedding for BallModel<E> {
    fn intrinsic_dim(&self) -> usize {
        self.0.intrinsic_dim()
    }
    fn ambient_dim(&self) -> usize {
        self.0.ambient_dim() - 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        hyperboloid_to_ball(&self.0.map(u))
    }
    fn in_domain(&self, u: &[f64]) -> bool {
        self.0.in_domain(u)
    }
}

/// `|⟨f, f⟩ + 1|` in the Minkowski inner product.
pub fn hyperboloid_residual<E: Embedding>(e: &E, u: &[f64]) -> f64 {
    let p: Vec<f64> = e.map(u);
    let (x, t) = p.split_at(p.len() - 1);
    (x.iter().map(|v| v * v).sum::<f64>() - t[0] * t[0] + 1.0).abs()
}

/// Induced metric from the ball model minus the one from Minkowski space.
pub fn ball_isometry_residual<E: Embedding>(e: &E, u: &[f64]) -> Result<f64> {
    let n = e.ambient_dim();
    let a = induced_metric(e, &Minkowski(n), u)?;
    let b = induced_metric(&BallModel(e), &PoincareBall(n - 1), u)?;
    Ok(a.sub(&b).max_abs())
}

/// Induced metric minus `ds² + x₁(s)² g_{S^n}` in the stereographic chart.
pub fn warped_product_residual(e: &CatenoidEmbedding, u: &[f64]) -> Result<f64> {
    let m = e.intrinsic_dim();
    let h = induced_metric(e, &Minkowski(e.ambient_dim()), u)?;
    let x = e.profile.eval(u[0]).0 * e.x_scale;
    let q: f64 = u[1..].iter().map(|v| v * v).sum();
    let w = x * x * 4.0 / ((1.0 + q) * (1.0 + q));
    let mut g = Mat::zeros(m);
    g.set(0, 0, 1.0);
    for i in 1..m {
        g.set(i, i, w);
    }
    Ok(h.sub(&g).max_abs())
}

/// Largest `|H|` in the ball model over the given intrinsic points.
pub fn minimality_residual(e: &CatenoidEmbedding, points: &[Vec<f64>]) -> Result<f64> {
    let be = BallModel(e);
    let amb = PoincareBall(e.ambient_dim() - 1);
    let mut worst = 0.0f64;
    for u in points {
        if !e.in_domain(u) {
            return Err(GeoError::OutOfDomain { what: "catenoid", detail: format!("{u:?}") });
        }
        worst = worst.max(extrinsic_data(&be, &amb, u)?.mean_norm());
    }
    Ok(worst)
}

/// Deterministic interior points `(s, z)` with `|s| ≤ s_hi`.
pub fn interior_points(e: &CatenoidEmbedding, count: usize, s_hi: f64) -> Vec<Vec<f64>> {
    let n = e.n();
    let lo = if e.profile.params.symmetric() { -s_hi } else { 0.1 };
    (0..count)
        .map(|k| {
            let t = (k as f64 + 0.5) / count as f64;
            let mut u = vec![lo + (s_hi - lo) * t];
            for d in 0..n {
                u.push(libm::sin(1.7 * (k + 1) as f64 + 2.3 * d as f64) * 1.2);
            }
            u
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticCurvature {
    pub s: f64,
    /// `−x₁''/x₁`.
    pub radial: f64,
    /// `(1 − x₁'²)/x₁²`.
    pub spherical: f64,
}

pub fn asymptotic_curvature(sol: &ProfileSolution) -> Result<AsymptoticCurvature> {
    let q = sol.last();
    if q.x1 <= 10.0 {
        return Err(GeoError::InsufficientRange { needed: 10.0, got: q.x1 });
    }
    Ok(AsymptoticCurvature { s: q.s, radial: -q.ddx1 / q.x1, spherical: (1.0 - q.dx1 * q.dx1) / (q.x1 * q.x1) })
}

/// Fit of `(ρ x₁)² = c² + β₁ ρ + β₂ ρ² + …` with `ρ = e^{−s}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ProfileExpansion {
    pub c2: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub error_estimate: [f64; 3],
    /// `−P` of the unit orbit: `−δ/2`.
    pub expected_beta2: f64,
    pub wpe: bool,
}

/// Default ladder in `ρ`: eight rungs below `e^{−3}`.
pub fn profile_ladder() -> Ladder {
    Ladder { r_min: libm::exp(-3.0) / 128.0, rungs: 8 }
}

pub fn holographic_profile_expansion(sol: &ProfileSolution, ladder: &Ladder, tol: f64) -> Result<ProfileExpansion> {
    let needed = -libm::log(ladder.r_min);
    if sol.s_max() < needed {
        return Err(GeoError::InsufficientRange { needed, got: sol.s_max() });
    }
    let (c, err) = ladder_fit(ladder, 0, 4, |rho| {
        let x = sol.eval(-libm::log(rho)).0;
        Ok(rho * rho * x * x)
    })?;
    let scale = 1.0 + c[0].abs();
    if err[..3].iter().any(|e| *e > 1e-2 * scale) {
        return Err(GeoError::IllConditionedFit { disagreement: err[..3].iter().fold(0.0, |a, b| a.max(*b)) });
    }
    let expected_beta2 = -0.5 * sol.params.delta as f64;
    let wpe = c[1].abs() < tol && (c[2] - expected_beta2).abs() < tol;
    Ok(ProfileExpansion {
        c2: c[0],
        beta1: c[1],
        beta2: c[2],
        error_estimate: [err[0], err[1], err[2]],
        expected_beta2,
        wpe,
    })
}

/// `d(X_{n+1}/T)` in ball coordinates: picks the normal pointing to larger `φ`.
pub fn phase_covector(p: &[f64]) -> Vec<f64> {
    let last = p.len() - 1;
    let q: f64 = p.iter().map(|v| v * v).sum();
    let d = 1.0 + q;
    (0..p.len())
        .map(|k| {
            let diag = if k == last { 2.0 / d } else { 0.0 };
            diag - 4.0 * p[last] * p[k] / (d * d)
        })
        .collect()
}

/// Boundary invariant at the upper end, approached along `s = −ln t` at
/// fixed `z`, in the gauge `r = scale · 2(1 − |x|)/(1 + |x|)`.
pub fn catenoid_boundary_invariant(
    e: &CatenoidEmbedding,
    z: &[f64],
    scale: f64,
    ladder: &Ladder,
) -> Result<BoundaryInvariant> {
    let n = e.n();
    let pair = Compactified { plus: PoincareBall(n + 2), r: BallDefiningFunction { scale } };
    let approach = |t: f64| {
        let mut u = vec![-libm::log(t)];
        u.extend_from_slice(z);
        u
    };
    boundary_conformal_invariant(&BallModel(e), &pair, &approach, ladder, &phase_covector)
}

/// Intrinsic metric `ds² + x₁(s)² g_{S^n}` in the coordinates `(s, z)`.
#[derive(Clone, Debug)]
pub struct WarpedCatenoidMetric {
    pub profile: ProfileSolution,
}

impl MetricField for WarpedCatenoidMetric {
    fn dim(&self) -> usize {
        self.profile.n() + 1
    }
    fn components<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.dim();
        let x = self.profile.eval(u[0]).0;
        let q = u[1..].iter().fold(S::zero(), |a, &v| a + v * v);
        let w = x * x * 4.0 * ((q + 1.0) * (q + 1.0)).recip();
        let mut g = vec![S::zero(); m * m];
        g[0] = S::one();
        for i in 1..m {
            g[i * m + i] = w;
        }
        g
    }
}

/// `û = 2 R cosh φ`, the restriction of `2 cosh d(o, ·)` to the catenoid.
#[derive(Clone, Debug)]
pub struct RestrictedLee {
    pub profile: ProfileSolution,
}

impl ScalarField for RestrictedLee {
    fn eval<S: Scalar>(&self, u: &[S]) -> S {
        let (x, _, phi) = self.profile.eval(u[0]);
        (x * x + 1.0).sqrt() * phi.cosh() * 2.0
    }
}

/// `ln û`.
#[derive(Clone, Debug)]
pub struct LogRestrictedLee(pub RestrictedLee);

impl ScalarField for LogRestrictedLee {
    fn eval<S: Scalar>(&self, u: &[S]) -> S {
        self.0.eval(u).ln()
    }
}
