use alloc::vec;
use alloc::vec::Vec;

use super::{
    check_point, level_set, metric_taylor, r_taylor3, raise_mul, tensor_norm, BoundaryMetric, Collar,
    NormalFormFamily, Singular,
};
use crate::error::{GeoError, Result};
use crate::fit::{ladder_fit_many, Ladder};
use crate::linalg::Mat;
use crate::scalar::{Dual, HyperDual, Scalar};
use crate::tensor::{curvature_exact, Coordinate, Engine};

const EPS_DEG: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtractionMethod {
    /// Exact Taylor coefficients from jets at `r = 0`.
    Taylor,
    /// Least-squares fit on a ladder of radii.
    Ladder,
}

/// Coefficients of `g_r = g0 + g1 r + g2 r² + g3 r³ + O(r⁴)` at one boundary point.
#[derive(Clone, Debug)]
pub struct ExpansionCoefficients {
    pub n: usize,
    pub g: [Mat<f64>; 4],
    pub error_estimates: [f64; 4],
    pub method: ExtractionMethod,
}

impl ExpansionCoefficients {
    /// `max_j |g(r_j) − Σ g_k r_j^k| / r_j⁴` over the ladder.
    pub fn reproduction_residual<F: NormalFormFamily + ?Sized>(&self, fam: &F, x: &[f64], ladder: &Ladder) -> f64 {
        let mut worst = 0.0f64;
        for r in ladder.radii() {
            let g = fam.g_r(r, x);
            for (k, gk) in g.iter().enumerate() {
                let model = self.g[0].a[k] + r * (self.g[1].a[k] + r * (self.g[2].a[k] + r * self.g[3].a[k]));
                worst = worst.max((gk - model).abs() / (r * r * r * r));
            }
        }
        worst
    }
}

/// Extract the expansion at `x`. Families that are analytic in `r` use exact
/// jets unless `force_ladder` is set; the ladder fit is quintic in `r` and its
/// error estimate is the disagreement with the fit on the doubled ladder.
pub fn extract_metric_expansion<F: NormalFormFamily + ?Sized>(
    fam: &F,
    x: &[f64],
    ladder: &Ladder,
    force_ladder: bool,
) -> Result<ExpansionCoefficients> {
    check_point(fam, 0.0, x)?;
    let n = fam.boundary_dim();
    if fam.analytic_in_r() && !force_ladder {
        let g = metric_taylor(fam, x)?;
        let scale = g.iter().fold(0.0f64, |m, t| m.max(t.max_abs()));
        let e = 64.0 * f64::EPSILON * (1.0 + scale);
        return Ok(ExpansionCoefficients { n, g, error_estimates: [0.0, e, e, e], method: ExtractionMethod::Taylor });
    }
    if ladder.shifted().r_max() >= fam.r_max() {
        return Err(GeoError::InvalidParameter("ladder exceeds the collar".into()));
    }
    let g0 = fam.g_r(0.0, x);
    let (c, err) = ladder_fit_many(ladder, 1, 5, |r| {
        Ok(fam.g_r(r, x).iter().zip(&g0).map(|(a, b)| a - b).collect())
    })?;
    let mut g = [Mat::from_vec(n, g0), Mat::zeros(n), Mat::zeros(n), Mat::zeros(n)];
    let mut est = [0.0f64; 4];
    for k in 1..4 {
        for ij in 0..n * n {
            g[k].a[ij] = c[ij][k - 1];
            est[k] = est[k].max(err[ij][k - 1]);
        }
    }
    let scale = g[1].max_abs().max(g[2].max_abs()).max(g[3].max_abs());
    let worst = est.iter().fold(0.0f64, |a, &b| a.max(b));
    if worst > 1e-2 * (1.0 + scale) {
        return Err(GeoError::IllConditionedFit { disagreement: worst });
    }
    Ok(ExpansionCoefficients { n, g, error_estimates: est, method: ExtractionMethod::Ladder })
}

/// Bulk and boundary curvature at a boundary point, all exact.
#[derive(Clone, Debug)]
pub struct BoundaryData {
    pub n: usize,
    pub x: Vec<f64>,
    pub ghat: Mat<f64>,
    pub ghat_inv: Mat<f64>,
    /// `L̂ = Γ̄^r_ij` at `r = 0`.
    pub l_hat: Mat<f64>,
    pub h_hat: f64,
    /// `|L̂|²`.
    pub l_norm2: f64,
    /// `L̂^a_i L̂_aj`.
    pub l_sq: Mat<f64>,
    /// `R̄_{0i0j}` and its partial `r`-derivative.
    pub r0i0j: Mat<f64>,
    pub dr_r0i0j: Mat<f64>,
    /// Tangential, mixed and normal Ricci components of `ḡ`.
    pub ric_ij: Mat<f64>,
    pub ric_0i: Vec<f64>,
    pub ric_00: f64,
    /// `ĝ^{ij} ∂_r R̄_{0i0j}`.
    pub trace_dr_r0i0j: f64,
    pub scalar_bar: f64,
    /// `W̄_{0i0j}`, present when `n ≥ 3`.
    pub w0i0j: Option<Mat<f64>>,
    pub scalar_hat: f64,
    pub ric_hat: Mat<f64>,
    /// `P̂`, present when `n ≥ 3`.
    pub p_hat: Option<Mat<f64>>,
}

pub fn boundary_data<F: NormalFormFamily + ?Sized>(fam: &F, x: &[f64]) -> Result<BoundaryData> {
    check_point(fam, 0.0, x)?;
    let n = fam.boundary_dim();
    let d = n + 1;
    let mut pt = vec![Dual::new(0.0, 1.0)];
    pt.extend(x.iter().map(|&v| Dual::cst(v)));
    let bulk = curvature_exact(&Collar(fam), &pt, EPS_DEG)?;
    let hat = curvature_exact(&BoundaryMetric(fam), x, EPS_DEG)?;
    let tan = |f: &dyn Fn(usize, usize) -> f64| {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.set(i, j, f(i + 1, j + 1));
            }
        }
        m
    };
    let ghat = hat.g.clone();
    let ghat_inv = hat.ginv.clone();
    let l_hat = tan(&|i, j| bulk.gamma(0, i, j).v);
    let h_hat = crate::tensor::contract(&ghat_inv, &l_hat);
    let l_norm2 = tensor_norm(&ghat_inv, &l_hat).powi(2);
    let l_sq = raise_mul(&l_hat, &ghat_inv, &l_hat);
    let r0i0j = tan(&|i, j| bulk.rm(0, i, 0, j).v);
    let dr_r0i0j = tan(&|i, j| bulk.rm(0, i, 0, j).d);
    let trace_dr_r0i0j = crate::tensor::contract(&ghat_inv, &dr_r0i0j);
    let ric_ij = tan(&|i, j| bulk.ricci.at(i, j).v);
    let ric_0i = (1..d).map(|i| bulk.ricci.at(0, i).v).collect();
    let w0i0j = if bulk.weyl.is_some() {
        Some(tan(&|i, j| bulk.weyl_at(0, i, 0, j).unwrap().v))
    } else {
        None
    };
    Ok(BoundaryData {
        n,
        x: x.to_vec(),
        ghat,
        ghat_inv,
        l_hat,
        h_hat,
        l_norm2,
        l_sq,
        r0i0j,
        dr_r0i0j,
        trace_dr_r0i0j,
        ric_ij,
        ric_0i,
        ric_00: bulk.ricci.at(0, 0).v,
        scalar_bar: bulk.scalar.v,
        w0i0j,
        scalar_hat: hat.scalar,
        ric_hat: hat.ricci.clone(),
        p_hat: hat.schouten.clone(),
    })
}

impl BoundaryData {
    /// `(L̂ ĝ^{-1} R̄_{0·0·})_ij`, i.e. `L̂^k_i R̄_{0k0j}`.
    fn l_r(&self) -> Mat<f64> {
        raise_mul(&self.l_hat, &self.ghat_inv, &self.r0i0j)
    }

    /// Predicted `(g1, g2, g3)` from the bulk curvature.
    pub fn predicted_coefficients(&self) -> [Mat<f64>; 3] {
        let g1 = self.l_hat.scale(-2.0);
        let g2 = self.l_sq.sub(&self.r0i0j);
        let lr = self.l_r();
        let g3 = lr.add(&lr.transpose()).sub(&self.dr_r0i0j).scale(1.0 / 3.0);
        [g1, g2, g3]
    }

    /// Predicted Taylor coefficients of `H̄_r` up to `r²`.
    pub fn predicted_mean_curvature(&self) -> [f64; 3] {
        let lup = self.ghat_inv.mul(&self.l_hat).mul(&self.ghat_inv);
        let mut lr = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                lr += lup.at(i, j) * self.r0i0j.at(i, j);
            }
        }
        let a = self.ghat_inv.mul(&self.l_hat);
        let l3 = a.mul(&a).mul(&a).trace();
        [self.h_hat, self.l_norm2 + self.ric_00, 2.0 * lr + l3 + 0.5 * self.trace_dr_r0i0j]
    }

    /// Predicted Taylor coefficients of the singular mean curvature `H_r` up to `r²`.
    pub fn predicted_singular_mean_curvature(&self) -> [f64; 3] {
        [self.n as f64, self.h_hat, self.l_norm2 + self.ric_00]
    }

    pub fn ricci_defect(&self) -> RicciDefect {
        let nf = self.n as f64;
        let order_m1_ij = self.l_hat.scale(-(nf - 1.0)).sub(&self.ghat.scale(self.h_hat));
        // the last term comes from g_r = ĝ − 2 L̂ r + …
        let order0_ij = self
            .ric_ij
            .sub(&self.r0i0j.sub(&self.l_sq).scale(nf - 1.0))
            .sub(&self.ghat.scale(self.l_norm2 + self.ric_00))
            .add(&self.l_hat.scale(2.0 * self.h_hat));
        RicciDefect { order_m1_ij, order0_ij, order_m1_rr: -self.h_hat, order0_rr: -self.l_norm2 }
    }

    pub fn scalar_defect(&self) -> (f64, f64) {
        let nf = self.n as f64;
        let c1 = -2.0 * nf * self.h_hat;
        let c2 = -(nf - 1.0) * self.scalar_bar + nf * self.scalar_hat - nf * (self.l_norm2 + self.h_hat * self.h_hat);
        (c1, c2)
    }

    /// `R̄_00 − ½(R̄|_Σ − R̂ − |L̂|² + Ĥ²)`.
    pub fn r00_residual(&self) -> f64 {
        self.ric_00
            - 0.5 * (self.scalar_bar - self.scalar_hat - self.l_norm2 + self.h_hat * self.h_hat)
    }

    /// Trace-free part of `L̂`.
    pub fn l_trace_free(&self) -> Mat<f64> {
        self.l_hat.sub(&self.ghat.scale(self.h_hat / self.n as f64))
    }
}

/// `P̂ = (Ric_ĝ − R_ĝ ĝ / (2(n−1))) / (n−2)`, defined for `n ≥ 3`.
pub fn schouten_boundary<F: NormalFormFamily + ?Sized>(fam: &F, x: &[f64]) -> Result<Mat<f64>> {
    let n = fam.boundary_dim();
    if n < 3 {
        return Err(GeoError::DimensionTooSmall { needed: 3, got: n });
    }
    let b = Engine::exact().curvature(&BoundaryMetric(fam), x)?;
    Ok(b.schouten.expect("schouten present for n >= 3"))
}

/// Leading coefficients of `Ric_{g+} + n g_+` in the `r^{-1}` and `r^0` orders.
#[derive(Clone, Debug)]
pub struct RicciDefect {
    pub order_m1_ij: Mat<f64>,
    pub order0_ij: Mat<f64>,
    pub order_m1_rr: f64,
    pub order0_rr: f64,
}

/// The same coefficients fitted from `r (Ric_{g+} + n g_+)` evaluated directly.
/// Matrices are `(n+1) × (n+1)` with index `0 = r`.
#[derive(Clone, Debug)]
pub struct RicciDefectFit {
    pub order_m1: Mat<f64>,
    pub order0: Mat<f64>,
    pub error_estimate: f64,
}

impl RicciDefectFit {
    fn tangential(m: &Mat<f64>) -> Mat<f64> {
        let n = m.n - 1;
        let mut t = Mat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                t.set(i, j, m.at(i + 1, j + 1));
            }
        }
        t
    }
    pub fn order_m1_ij(&self) -> Mat<f64> {
        Self::tangential(&self.order_m1)
    }
    pub fn order0_ij(&self) -> Mat<f64> {
        Self::tangential(&self.order0)
    }
}

/// `Ric_{g+} + n g_+` at `(r, x)` computed from the curvature of `g_+` itself.
pub fn ricci_defect_direct_at<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<Mat<f64>> {
    let mut p = vec![r];
    p.extend_from_slice(x);
    let b = Engine::exact().curvature(&Singular(fam), &p)?;
    Ok(b.ricci.add(&b.g.scale(fam.boundary_dim() as f64)))
}

pub fn ricci_defect_fit<F: NormalFormFamily + ?Sized>(fam: &F, x: &[f64], ladder: &Ladder) -> Result<RicciDefectFit> {
    let d = fam.boundary_dim() + 1;
    let (c, err) = ladder_fit_many(ladder, 0, 4, |r| Ok(ricci_defect_direct_at(fam, r, x)?.scale(r).a))?;
    let mut m1 = Mat::zeros(d);
    let mut m0 = Mat::zeros(d);
    let mut e = 0.0f64;
    for k in 0..d * d {
        m1.a[k] = c[k][0];
        m0.a[k] = c[k][1];
        e = e.max(err[k][0]).max(err[k][1]);
    }
    Ok(RicciDefectFit { order_m1: m1, order0: m0, error_estimate: e })
}

/// Scalar-curvature defect `R_{g+} + n(n+1) = c1 r + c2 r² + O(r³)` by three routes.
#[derive(Clone, Copy, Debug)]
pub struct ScalarDefect {
    /// From boundary curvature data.
    pub formula: (f64, f64),
    /// From exact jets of `r² R̄ − 2 n r H̄_r`.
    pub identity: (f64, f64),
    /// From a ladder fit of the directly computed `R_{g+}`.
    pub direct: (f64, f64),
    pub direct_error: f64,
}

impl ScalarDefect {
    pub fn max_disagreement(&self) -> f64 {
        let d = |a: (f64, f64), b: (f64, f64)| (a.0 - b.0).abs().max((a.1 - b.1).abs());
        d(self.formula, self.identity).max(d(self.formula, self.direct))
    }
}

pub fn scalar_defect_coefficients<F: NormalFormFamily + ?Sized>(
    fam: &F,
    x: &[f64],
    ladder: &Ladder,
) -> Result<ScalarDefect> {
    let data = boundary_data(fam, x)?;
    let nf = fam.boundary_dim() as f64;
    let xs: Vec<HyperDual<Dual<f64>>> = x.iter().map(|&v| HyperDual::cst(v)).collect();
    let [h0, h1, _, _] = r_taylor3(0.0, |t| Ok(vec![level_set(fam, t, &xs)?.h]))?;
    let identity = (-2.0 * nf * h0[0], data.scalar_bar - 2.0 * nf * h1[0]);
    let (c, err) = crate::fit::ladder_fit(ladder, 0, 4, |r| {
        let mut p = vec![r];
        p.extend_from_slice(x);
        let b = Engine::exact().curvature(&Singular(fam), &p)?;
        Ok((b.scalar + nf * (nf + 1.0)) / r)
    })?;
    Ok(ScalarDefect {
        formula: data.scalar_defect(),
        identity,
        direct: (c[0], c[1]),
        direct_error: err[0].max(err[1]),
    })
}

/// Residuals of `Δ_ḡ r = −H̄_r` and `R_{g+} = r² R̄ − 2 n r H̄_r − n(n+1)`,
/// each relative to the size of the compared terms.
#[derive(Clone, Copy, Debug)]
pub struct IdentityResiduals {
    pub laplace_r: f64,
    pub scalar_conformal: f64,
}

pub fn exact_identity_residuals<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<IdentityResiduals> {
    if !(r > 0.0) {
        return Err(GeoError::OutOfDomain { what: "exact identities", detail: alloc::format!("r = {r}") });
    }
    check_point(fam, r, x)?;
    let e = Engine::exact();
    let mut p = vec![r];
    p.extend_from_slice(x);
    let hbar = level_set(fam, r, x)?.h;
    let lap = e.laplacian_scalar(&Collar(fam), &Coordinate(0), &p)?;
    let rbar = e.curvature(&Collar(fam), &p)?.scalar;
    let rplus = e.curvature(&Singular(fam), &p)?.scalar;
    let nf = fam.boundary_dim() as f64;
    let rhs = r * r * rbar - 2.0 * nf * r * hbar - nf * (nf + 1.0);
    Ok(IdentityResiduals {
        laplace_r: (lap + hbar).abs() / (1.0 + hbar.abs()),
        scalar_conformal: (rplus - rhs).abs() / (1.0 + rplus.abs()),
    })
}

/// Residuals of `(g^{ij})' = 2 L̄^{ij}` and
/// `(g^{ij})'' = 2 g^{ib} g^{jc} R̄_{rbrc} + 6 L̄^{ai} L̄_a^j` at `(r, x)`.
pub fn inverse_metric_identity_residuals<F: NormalFormFamily + ?Sized>(fam: &F, r: f64, x: &[f64]) -> Result<(f64, f64)> {
    check_point(fam, r, x)?;
    let n = fam.boundary_dim();
    let t = HyperDual::new(r, 1.0, 1.0, 0.0);
    let xs: Vec<HyperDual<f64>> = x.iter().map(|&v| HyperDual::cst(v)).collect();
    let inv = Mat::from_vec(n, fam.g_r(t, &xs)).inverse().ok_or(GeoError::Degenerate("g_r"))?;
    let d1 = Mat::from_vec(n, inv.a.iter().map(|v| v.a).collect());
    let d2 = Mat::from_vec(n, inv.a.iter().map(|v| v.ab).collect());
    let ls = level_set(fam, r, x)?;
    let lup = ls.ginv.mul(&ls.l).mul(&ls.ginv);
    let mut p = vec![r];
    p.extend_from_slice(x);
    let b = Engine::exact().curvature(&Collar(fam), &p)?;
    let mut rr = Mat::zeros(n);
    for i in 0..n {
        for j in 0..n {
            rr.set(i, j, b.rm(0, i + 1, 0, j + 1));
        }
    }
    let expect2 = ls.ginv.mul(&rr).mul(&ls.ginv).scale(2.0).add(&lup.mul(&ls.g).mul(&lup).scale(6.0));
    Ok((d1.sub(&lup.scale(2.0)).max_abs(), d2.sub(&expect2).max_abs()))
}

/// Comparison of extracted and curvature-predicted expansion coefficients.
#[derive(Clone, Debug)]
pub struct DualPath {
    pub extracted: ExpansionCoefficients,
    pub predicted: [Mat<f64>; 3],
    /// Componentwise maximum differences for `g1`, `g2`, `g3`.
    pub residuals: [f64; 3],
}

impl DualPath {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().fold(0.0, |a, &b| a.max(b))
    }
}

pub fn dual_path_check<F: NormalFormFamily + ?Sized>(fam: &F, x: &[f64], ladder: &Ladder, force_ladder: bool) -> Result<DualPath> {
    let extracted = extract_metric_expansion(fam, x, ladder, force_ladder)?;
    let predicted = boundary_data(fam, x)?.predicted_coefficients();
    let mut residuals = [0.0; 3];
    for k in 0..3 {
        residuals[k] = extracted.g[k + 1].sub(&predicted[k]).max_abs();
    }
    Ok(DualPath { extracted, predicted, residuals })
}

/// Taylor coefficients of `H̄_r` and `H_r` at `r = 0` from jets, next to the
/// curvature predictions.
#[derive(Clone, Copy, Debug)]
pub struct MeanCurvatureExpansion {
    pub extracted: [f64; 3],
    pub predicted: [f64; 3],
    pub singular_extracted: [f64; 3],
    pub singular_predicted: [f64; 3],
}

impl MeanCurvatureExpansion {
    pub fn max_residual(&self) -> f64 {
        let mut m = 0.0f64;
        for k in 0..3 {
            m = m.max((self.extracted[k] - self.predicted[k]).abs());
            m = m.max((self.singular_extracted[k] - self.singular_predicted[k]).abs());
        }
        m
    }
}

pub fn mean_curvature_expansion<F: NormalFormFamily + ?Sized>(fam: &F, x: &[f64]) -> Result<MeanCurvatureExpansion> {
    let data = boundary_data(fam, x)?;
    let xs: Vec<HyperDual<Dual<f64>>> = x.iter().map(|&v| HyperDual::cst(v)).collect();
    let nf = fam.boundary_dim() as f64;
    let [a, b, c, _] = r_taylor3(0.0, |t| Ok(vec![level_set(fam, t, &xs)?.h]))?;
    let [sa, sb, sc, _] = r_taylor3(0.0, |t| Ok(vec![t * level_set(fam, t, &xs)?.h + nf]))?;
    Ok(MeanCurvatureExpansion {
        extracted: [a[0], b[0], c[0]],
        predicted: data.predicted_mean_curvature(),
        singular_extracted: [sa[0], sb[0], sc[0]],
        singular_predicted: data.predicted_singular_mean_curvature(),
    })
}
