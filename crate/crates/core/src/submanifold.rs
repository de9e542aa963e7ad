//! Extrinsic geometry of immersions `f: Y → (M, g)` given in coordinates.
//!
//! Second fundamental forms are `B^η(X, Y) = g(∇_X Y, ν_η)` for the
//! orthonormal normal frame `ν_η`; the mean curvature is `H^η = tr_h B^η`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{GeoError, Result};
use crate::fit::{polyfit, Ladder};
use crate::linalg::{gram_schmidt, Mat};
use crate::scalar::{Dual, HyperDual, Scalar};
use crate::tensor::{curvature_exact, CurvatureBundle, Engine, MetricField, ScalarField};

const EPS_DEG: f64 = 1e-12;

/// A parametrised immersion of an intrinsic chart into an ambient chart.
pub trait Embedding {
    fn intrinsic_dim(&self) -> usize;
    fn ambient_dim(&self) -> usize;
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S>;
    fn in_domain(&self, _u: &[f64]) -> bool {
        true
    }
}

impl<E: Embedding + ?Sized> Embedding for &E {
    fn intrinsic_dim(&self) -> usize {
        (**self).intrinsic_dim()
    }
    fn ambient_dim(&self) -> usize {
        (**self).ambient_dim()
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        (**self).map(u)
    }
    fn in_domain(&self, u: &[f64]) -> bool {
        (**self).in_domain(u)
    }
}

/// `f^i(u) = c_i + L_{ia} u_a + Q_{iab} u_a u_b`.
#[derive(Clone, Debug)]
pub struct PolynomialEmbedding {
    pub m: usize,
    pub n: usize,
    pub offset: Vec<f64>,
    /// Row-major `n × m`.
    pub linear: Vec<f64>,
    /// Row-major `n × m × m`.
    pub quadratic: Vec<f64>,
}

impl PolynomialEmbedding {
    /// The affine map `u ↦ (u, 0, …, 0)`.
    pub fn slice(m: usize, n: usize) -> Self {
        let mut linear = vec![0.0; n * m];
        for a in 0..m {
            linear[a * m + a] = 1.0;
        }
        PolynomialEmbedding { m, n, offset: vec![0.0; n], linear, quadratic: vec![0.0; n * m * m] }
    }
}

impl Embedding for PolynomialEmbedding {
    fn intrinsic_dim(&self) -> usize {
        self.m
    }
    fn ambient_dim(&self) -> usize {
        self.n
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.m;
        (0..self.n)
            .map(|i| {
                let mut v = S::cst(self.offset[i]);
                for a in 0..m {
                    v += u[a] * self.linear[i * m + a];
                    for b in 0..m {
                        let q = self.quadratic[(i * m + a) * m + b];
                        if q != 0.0 {
                            v += u[a] * u[b] * q;
                        }
                    }
                }
                v
            })
            .collect()
    }
}

/// `ρ θ(z) + c` with `θ` the inverse stereographic chart of the unit sphere.
#[derive(Clone, Debug)]
pub struct RoundSphere {
    pub m: usize,
    pub rho: f64,
    pub center: Vec<f64>,
}

impl RoundSphere {
    pub fn centered(m: usize, rho: f64) -> Self {
        RoundSphere { m, rho, center: vec![0.0; m + 1] }
    }
}

impl Embedding for RoundSphere {
    fn intrinsic_dim(&self) -> usize {
        self.m
    }
    fn ambient_dim(&self) -> usize {
        self.m + 1
    }
    fn map<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        crate::catenoid::sphere_chart(u).into_iter().zip(&self.center).map(|(v, &c)| v * self.rho + c).collect()
    }
}

/// Point, first and second partial derivatives of an embedding.
#[derive(Clone, Debug)]
pub struct EmbeddingJet {
    pub point: Vec<f64>,
    /// `d1[α][i] = ∂_α f^i`.
    pub d1: Vec<Vec<f64>>,
    /// `d2[α][β][i] = ∂_α ∂_β f^i`.
    pub d2: Vec<Vec<Vec<f64>>>,
}

fn unit(i: usize, k: usize) -> f64 {
    if i == k {
        1.0
    } else {
        0.0
    }
}

pub fn embedding_jet<E: Embedding + ?Sized>(e: &E, u: &[f64]) -> Result<EmbeddingJet> {
    let m = e.intrinsic_dim();
    if u.len() != m {
        return Err(GeoError::DimensionMismatch { expected: m, got: u.len() });
    }
    if !e.in_domain(u) {
        return Err(GeoError::OutOfDomain { what: "embedding", detail: format!("{u:?}") });
    }
    let n = e.ambient_dim();
    let mut point = vec![0.0; n];
    let mut d1 = vec![vec![0.0; n]; m];
    let mut d2 = vec![vec![vec![0.0; n]; m]; m];
    for a in 0..m {
        for b in a..m {
            let x: Vec<HyperDual<f64>> =
                (0..m).map(|i| HyperDual::new(u[i], unit(i, a), unit(i, b), 0.0)).collect();
            let y = e.map(&x);
            if a == b {
                point = y.iter().map(|v| v.v).collect();
                d1[a] = y.iter().map(|v| v.a).collect();
            }
            d2[a][b] = y.iter().map(|v| v.ab).collect();
            d2[b][a] = d2[a][b].clone();
        }
    }
    Ok(EmbeddingJet { point, d1, d2 })
}

/// The pulled-back metric `h = f^* g` as a metric on the intrinsic chart.
#[derive(Clone, Copy, Debug)]
pub struct InducedMetric<E, M> {
    pub emb: E,
    pub ambient: M,
}

impl<E: Embedding, M: MetricField> MetricField for InducedMetric<E, M> {
    fn dim(&self) -> usize {
        self.emb.intrinsic_dim()
    }
    fn components<S: Scalar>(&self, u: &[S]) -> Vec<S> {
        let m = self.emb.intrinsic_dim();
        let n = self.emb.ambient_dim();
        let mut point: Vec<S> = Vec::new();
        let mut tangents: Vec<Vec<S>> = Vec::with_capacity(m);
        for a in 0..m {
            let x: Vec<Dual<S>> = (0..m)
                .map(|i| Dual::new(u[i], if i == a { S::one() } else { S::zero() }))
                .collect();
            let y = self.emb.map(&x);
            if a == 0 {
                point = y.iter().map(|v| v.v).collect();
            }
            tangents.push(y.iter().map(|v| v.d).collect());
        }
        let g = self.ambient.components(&point);
        let mut h = vec![S::zero(); m * m];
        for a in 0..m {
            for b in a..m {
                let mut s = S::zero();
                for i in 0..n {
                    for j in 0..n {
                        s += tangents[a][i] * g[i * n + j] * tangents[b][j];
                    }
                }
                h[a * m + b] = s;
                h[b * m + a] = s;
            }
        }
        h
    }
    fn in_domain(&self, u: &[f64]) -> bool {
        self.emb.in_domain(u) && self.ambient.in_domain(&self.emb.map(u))
    }
}

/// Induced metric at a point (any ambient signature).
pub fn induced_metric<E: Embedding, M: MetricField>(e: &E, ambient: &M, u: &[f64]) -> Result<Mat<f64>> {
    let jet = embedding_jet(e, u)?;
    if !ambient.in_domain(&jet.point) {
        return Err(GeoError::OutOfDomain { what: "ambient metric", detail: format!("{:?}", jet.point) });
    }
    let g = Mat::from_vec(ambient.dim(), ambient.components(&jet.point));
    Ok(pull2(&g, &jet.d1, &jet.d1))
}

/// `T(a_α, b_β)` for a bilinear form `T`.
pub fn pull2(t: &Mat<f64>, a: &[Vec<f64>], b: &[Vec<f64>]) -> Mat<f64> {
    debug_assert_eq!(a.len(), b.len());
    let n = t.n;
    let m = a.len();
    let mut out = Mat::zeros(m);
    for p in 0..m {
        for q in 0..m {
            let mut s = 0.0;
            for i in 0..n {
                for j in 0..n {
                    s += a[p][i] * t.at(i, j) * b[q][j];
                }
            }
            out.set(p, q, s);
        }
    }
    out
}

/// Contract each slot of a 4-tensor on an `n`-dimensional space with a list of vectors.
pub fn pull4(t: &[f64], n: usize, v: [&[Vec<f64>]; 4]) -> Vec<f64> {
    let mut cur = t.to_vec();
    let mut shape = [n; 4];
    for slot in 0..4 {
        let mut next = shape;
        next[slot] = v[slot].len();
        let mut out = vec![0.0; next.iter().product()];
        for (flat, o) in out.iter_mut().enumerate() {
            let mut idx = [0usize; 4];
            let mut rem = flat;
            for s in (0..4).rev() {
                idx[s] = rem % next[s];
                rem /= next[s];
            }
            let vec = &v[slot][idx[slot]];
            let mut acc = 0.0;
            for (i, &c) in vec.iter().enumerate() {
                if c == 0.0 {
                    continue;
                }
                let mut j = idx;
                j[slot] = i;
                acc += c * cur[((j[0] * shape[1] + j[1]) * shape[2] + j[2]) * shape[3] + j[3]];
            }
            *o = acc;
        }
        cur = out;
        shape = next;
    }
    cur
}

fn ip(g: &Mat<f64>, a: &[f64], b: &[f64]) -> f64 {
    let n = g.n;
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[i] * g.at(i, j) * b[j];
        }
    }
    s
}

#[derive(Clone, Debug)]
pub struct ExtrinsicData {
    pub point: Vec<f64>,
    pub tangents: Vec<Vec<f64>>,
    /// Ambient metric at the image point.
    pub g: Mat<f64>,
    pub h: Mat<f64>,
    pub h_inv: Mat<f64>,
    pub normals: Vec<Vec<f64>>,
    /// One symmetric form per normal.
    pub sff: Vec<Mat<f64>>,
    /// `H^η = tr_h B^η`.
    pub mean: Vec<f64>,
    pub traceless: Vec<Mat<f64>>,
    /// Largest deviation of the frame `(f_α, ν_η)` from adapted orthonormality.
    pub frame_residual: f64,
}

impl ExtrinsicData {
    pub fn codim(&self) -> usize {
        self.normals.len()
    }
    /// Mean curvature vector in ambient coordinates.
    pub fn mean_vector(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.point.len()];
        for (h, nu) in self.mean.iter().zip(&self.normals) {
            for (x, y) in v.iter_mut().zip(nu) {
                *x += h * y;
            }
        }
        v
    }
    pub fn mean_norm(&self) -> f64 {
        libm::sqrt(self.mean.iter().map(|h| h * h).sum())
    }
    /// `Σ_η |B^η|²_h`.
    pub fn sff_norm2(&self) -> f64 {
        self.sff.iter().map(|b| crate::tensor::contract(&self.h_inv, &b.mul(&self.h_inv).mul(b))).sum()
    }
    /// `Σ_η B^η h^{-1} B^η`.
    pub fn sff_sq(&self) -> Mat<f64> {
        let m = self.h.n;
        self.sff.iter().fold(Mat::zeros(m), |acc, b| acc.add(&b.mul(&self.h_inv).mul(b)))
    }
    /// Flip each normal whose pairing with `covector` is negative.
    pub fn orient(&mut self, covector: &[f64]) {
        for e in 0..self.normals.len() {
            let c: f64 = self.normals[e].iter().zip(covector).map(|(a, b)| a * b).sum();
            if c < 0.0 {
                self.normals[e].iter_mut().for_each(|v| *v = -*v);
                self.sff[e] = self.sff[e].scale(-1.0);
                self.traceless[e] = self.traceless[e].scale(-1.0);
                self.mean[e] = -self.mean[e];
            }
        }
    }
}

/// Extrinsic data with the normal frame built from the ambient coordinate basis in natural order.
pub fn extrinsic_data<E: Embedding, M: MetricField>(e: &E, ambient: &M, u: &[f64]) -> Result<ExtrinsicData> {
    let order: Vec<usize> = (0..ambient.dim()).collect();
    extrinsic_data_ordered(e, ambient, u, &order)
}

/// As [`extrinsic_data`], feeding the coordinate basis to Gram–Schmidt in the given order.
pub fn extrinsic_data_ordered<E: Embedding, M: MetricField>(
    e: &E,
    ambient: &M,
    u: &[f64],
    order: &[usize],
) -> Result<ExtrinsicData> {
    let n = ambient.dim();
    if e.ambient_dim() != n {
        return Err(GeoError::DimensionMismatch { expected: n, got: e.ambient_dim() });
    }
    if ambient.signature().iter().any(|&s| s < 0) {
        return Err(GeoError::InvalidParameter("normal frames need a Riemannian ambient metric".into()));
    }
    let m = e.intrinsic_dim();
    if m >= n {
        return Err(GeoError::DimensionMismatch { expected: n - 1, got: m });
    }
    let jet = embedding_jet(e, u)?;
    let gamma = Engine::exact().christoffel(ambient, &jet.point)?;
    let g = Mat::from_vec(n, ambient.components(&jet.point));
    let h = pull2(&g, &jet.d1, &jet.d1);
    let scale = (0..m).fold(0.0f64, |s, a| s.max(h.at(a, a).abs())).max(1e-300);
    if h.det().abs() <= EPS_DEG * libm::pow(scale, m as f64) {
        return Err(GeoError::Degenerate("embedding differential"));
    }
    let h_inv = h.inverse().ok_or(GeoError::Degenerate("embedding differential"))?;

    let tangent_basis = gram_schmidt(&g, &jet.d1, &[]);
    if tangent_basis.len() != m {
        return Err(GeoError::Degenerate("embedding differential"));
    }
    let candidates: Vec<Vec<f64>> = order.iter().map(|&k| (0..n).map(|i| unit(i, k)).collect()).collect();
    let mut normals = gram_schmidt(&g, &candidates, &tangent_basis);
    normals.truncate(n - m);
    if normals.len() != n - m {
        return Err(GeoError::Degenerate("normal frame"));
    }

    let mut frame_residual = 0.0f64;
    for (a, na) in normals.iter().enumerate() {
        for (b, nb) in normals.iter().enumerate() {
            frame_residual = frame_residual.max((ip(&g, na, nb) - unit(a, b)).abs());
        }
        for t in &jet.d1 {
            frame_residual = frame_residual.max(ip(&g, na, t).abs() / libm::sqrt(ip(&g, t, t)));
        }
    }

    // ∇_{f_α} f_β = ∂_α∂_β f + Γ(f_α, f_β)
    let mut accel = vec![vec![vec![0.0; n]; m]; m];
    for a in 0..m {
        for b in a..m {
            let mut v = jet.d2[a][b].clone();
            for (l, vl) in v.iter_mut().enumerate() {
                for i in 0..n {
                    for j in 0..n {
                        *vl += gamma[(l * n + i) * n + j] * jet.d1[a][i] * jet.d1[b][j];
                    }
                }
            }
            accel[a][b] = v.clone();
            accel[b][a] = v;
        }
    }
    let mut sff = Vec::with_capacity(normals.len());
    let mut mean = Vec::with_capacity(normals.len());
    let mut traceless = Vec::with_capacity(normals.len());
    for nu in &normals {
        let mut b = Mat::zeros(m);
        for p in 0..m {
            for q in 0..m {
                b.set(p, q, ip(&g, &accel[p][q], nu));
            }
        }
        let b = b.sym_part();
        let hm = crate::tensor::contract(&h_inv, &b);
        traceless.push(b.sub(&h.scale(hm / m as f64)));
        mean.push(hm);
        sff.push(b);
    }
    Ok(ExtrinsicData { point: jet.point, tangents: jet.d1, g, h, h_inv, normals, sff, mean, traceless, frame_residual })
}

fn ambient_and_intrinsic<E: Embedding + Copy, M: MetricField + Copy>(
    e: E,
    ambient: M,
    u: &[f64],
    ext: &ExtrinsicData,
) -> Result<(CurvatureBundle<f64>, CurvatureBundle<f64>)> {
    let bm = curvature_exact(&ambient, &ext.point, EPS_DEG)?;
    let by = curvature_exact(&InducedMetric { emb: e, ambient }, u, EPS_DEG)?;
    Ok((bm, by))
}

/// Max-norm of `R^M(f_α, f_β, f_γ, f_δ) − R^Y_{αβγδ} − Σ_η (B_αδ B_βγ − B_αγ B_βδ)`.
pub fn gauss_residual<E: Embedding, M: MetricField>(e: &E, ambient: &M, u: &[f64]) -> Result<f64> {
    let ext = extrinsic_data(e, ambient, u)?;
    let (bm, by) = ambient_and_intrinsic(e, ambient, u, &ext)?;
    let m = ext.h.n;
    let t = &ext.tangents;
    let pm = pull4(&bm.riemann, bm.dim, [t, t, t, t]);
    let mut res = 0.0f64;
    for a in 0..m {
        for b in 0..m {
            for c in 0..m {
                for d in 0..m {
                    let mut q = 0.0;
                    for s in &ext.sff {
                        q += s.at(a, d) * s.at(b, c) - s.at(a, c) * s.at(b, d);
                    }
                    let i = ((a * m + b) * m + c) * m + d;
                    res = res.max((pm[i] - by.riemann[i] - q).abs());
                }
            }
        }
    }
    Ok(res)
}

/// `W^M(f_α, ν, f_β, ν)` summed over the normal frame.
fn weyl_normal_trace(bm: &CurvatureBundle<f64>, ext: &ExtrinsicData) -> Mat<f64> {
    let m = ext.h.n;
    let Some(w) = bm.weyl.as_ref() else {
        return Mat::zeros(m);
    };
    let mut out = Mat::zeros(m);
    for nu in &ext.normals {
        let one = core::slice::from_ref(nu);
        let p = pull4(w, bm.dim, [&ext.tangents, one, &ext.tangents, one]);
        for a in 0..m {
            for b in 0..m {
                out.set(a, b, out.at(a, b) + p[a * m + b]);
            }
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct FialkowGauss {
    /// `P^Y − P^M|_{TY}`.
    pub lhs: Mat<f64>,
    /// Trace-free second fundamental form, mean curvature and Weyl terms.
    pub rhs: Mat<f64>,
    pub residual: f64,
}

/// Both sides of the relation between the intrinsic and ambient Schouten tensors.
pub fn fialkow_gauss<E: Embedding, M: MetricField>(e: &E, ambient: &M, u: &[f64]) -> Result<FialkowGauss> {
    let m = e.intrinsic_dim();
    if m < 3 {
        return Err(GeoError::DimensionTooSmall { needed: 3, got: m });
    }
    let ext = extrinsic_data(e, ambient, u)?;
    let (bm, by) = ambient_and_intrinsic(e, ambient, u, &ext)?;
    let k = (m - 1) as f64;
    let py = by.schouten.clone().ok_or(GeoError::DimensionTooSmall { needed: 3, got: m })?;
    let pm_full = bm.schouten.clone().ok_or(GeoError::DimensionTooSmall { needed: 3, got: bm.dim })?;
    let pm = pull2(&pm_full, &ext.tangents, &ext.tangents);
    let h = &ext.h;
    let hi = &ext.h_inv;

    let h2: f64 = ext.mean.iter().map(|v| v * v).sum();
    let mut bh = Mat::zeros(m);
    let mut b2 = Mat::zeros(m);
    let mut b_norm2 = 0.0;
    for (bo, &hm) in ext.traceless.iter().zip(&ext.mean) {
        bh = bh.add(&bo.scale(hm));
        let sq = bo.mul(hi).mul(bo);
        b_norm2 += crate::tensor::contract(hi, &sq);
        b2 = b2.add(&sq);
    }
    let wn = weyl_normal_trace(&bm, &ext);
    let wtr = crate::tensor::contract(hi, &wn);
    let rhs = bh
        .scale(1.0 / (k + 1.0))
        .add(&h.scale(h2 / (2.0 * (k + 1.0) * (k + 1.0))))
        .sub(&b2.scale(1.0 / (k - 1.0)))
        .sub(&wn.scale(1.0 / (k - 1.0)))
        .add(&h.scale((b_norm2 + wtr) / (2.0 * k * (k - 1.0))));
    let lhs = py.sub(&pm);
    let residual = lhs.sub(&rhs).max_abs();
    Ok(FialkowGauss { lhs, rhs, residual })
}

pub fn fialkow_gauss_residual<E: Embedding, M: MetricField>(e: &E, ambient: &M, u: &[f64]) -> Result<f64> {
    Ok(fialkow_gauss(e, ambient, u)?.residual)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CurvatureIdentityResiduals {
    pub ricci: f64,
    pub scalar: f64,
}

/// Ricci and scalar curvature of a hypersurface `Y^{n+1}` in an Einstein
/// ambient with `Ric = −(n+1) g`:
/// `Ric^Y + n h = −B² + H B − W(·, N, ·, N)` and `R^Y + n(n+1) = H² − |B|²`.
pub fn pe_hypersurface_identities<E: Embedding, M: MetricField>(
    e: &E,
    ambient: &M,
    u: &[f64],
    tol: f64,
) -> Result<CurvatureIdentityResiduals> {
    let m = e.intrinsic_dim();
    if ambient.dim() != m + 1 {
        return Err(GeoError::DimensionMismatch { expected: m + 1, got: ambient.dim() });
    }
    let ext = extrinsic_data(e, ambient, u)?;
    let (bm, by) = ambient_and_intrinsic(e, ambient, u, &ext)?;
    let einstein = bm.ricci.add(&bm.g.scale(m as f64)).max_abs();
    if einstein > tol * (1.0 + bm.g.max_abs()) {
        return Err(GeoError::AmbientNotPE { residual: einstein });
    }
    let n = (m - 1) as f64;
    let b = &ext.sff[0];
    let hm = ext.mean[0];
    let wn = weyl_normal_trace(&bm, &ext);
    let rhs = ext.sff_sq().scale(-1.0).add(&b.scale(hm)).sub(&wn);
    let ricci = by.ricci.add(&ext.h.scale(n)).sub(&rhs).max_abs();
    let scalar = (by.scalar + n * (n + 1.0) - (hm * hm - ext.sff_norm2())).abs();
    Ok(CurvatureIdentityResiduals { ricci, scalar })
}

/// Largest deviation of the ambient curvature from the constant-curvature −1 form.
pub fn hyperbolic_residual(b: &CurvatureBundle<f64>) -> f64 {
    let d = b.dim;
    let mut r = 0.0f64;
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    let model = -(b.g.at(i, k) * b.g.at(j, l) - b.g.at(i, l) * b.g.at(j, k));
                    r = r.max((b.rm(i, j, k, l) - model).abs());
                }
            }
        }
    }
    r
}

/// `Ric^Y = −n h − B²` and `R^Y = −n(n+1) − |B|²` for minimal `Y^{n+1}` in hyperbolic space.
pub fn minimal_hyperbolic_identities<E: Embedding, M: MetricField>(
    e: &E,
    ambient: &M,
    u: &[f64],
    tol_minimal: f64,
) -> Result<CurvatureIdentityResiduals> {
    let ext = extrinsic_data(e, ambient, u)?;
    let (bm, by) = ambient_and_intrinsic(e, ambient, u, &ext)?;
    let hyp = hyperbolic_residual(&bm);
    if hyp > 1e-6 * (1.0 + bm.g.max_abs() * bm.g.max_abs()) {
        return Err(GeoError::AmbientNotPE { residual: hyp });
    }
    let hn = ext.mean_norm();
    if hn >= tol_minimal {
        return Err(GeoError::NotMinimal { mean_curvature: hn });
    }
    let n = (ext.h.n - 1) as f64;
    let ricci = by.ricci.add(&ext.h.scale(n)).add(&ext.sff_sq()).max_abs();
    let scalar = (by.scalar + n * (n + 1.0) + ext.sff_norm2()).abs();
    Ok(CurvatureIdentityResiduals { ricci, scalar })
}

/// The compactified metric `ḡ = r² g_+` for a defining function `r`.
#[derive(Clone, Copy, Debug)]
pub struct Compactified<M, R> {
    pub plus: M,
    pub r: R,
}

impl<M: MetricField, R: ScalarField> MetricField for Compactified<M, R> {
    fn dim(&self) -> usize {
        self.plus.dim()
    }
    fn components<S: Scalar>(&self, x: &[S]) -> Vec<S> {
        let r = self.r.eval(x);
        let r2 = r * r;
        self.plus.components(x).into_iter().map(|v| v * r2).collect()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.plus.in_domain(x)
    }
}

impl<M: MetricField, R: ScalarField> Compactified<M, R> {
    /// `r` and `dr` at `x`.
    pub fn defining_jet(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let n = x.len();
        let mut dr = vec![0.0; n];
        let mut r = 0.0;
        for k in 0..n {
            let xs: Vec<Dual<f64>> = (0..n).map(|i| Dual::new(x[i], unit(i, k))).collect();
            let v = self.r.eval(&xs);
            r = v.v;
            dr[k] = v.d;
        }
        (r, dr)
    }
    /// `|dr|²_ḡ − 1`; zero for a special defining function.
    pub fn special_residual(&self, x: &[f64]) -> Result<f64> {
        let (_, dr) = self.defining_jet(x);
        let g = Mat::from_vec(self.dim(), self.components(x));
        let gi = g.inverse().ok_or(GeoError::Degenerate("compactified metric"))?;
        Ok(ip(&gi, &dr, &dr) - 1.0)
    }
}

/// `scale · 2 (1 − |x|) / (1 + |x|)` on the Poincaré ball; special, with
/// boundary metric `scale²` times the unit round metric.
#[derive(Clone, Copy, Debug)]
pub struct BallDefiningFunction {
    pub scale: f64,
}

impl ScalarField for BallDefiningFunction {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        let rho = x.iter().fold(S::zero(), |s, &v| s + v * v).sqrt();
        (S::one() - rho) / (S::one() + rho) * (2.0 * self.scale)
    }
}

/// `scale · t` on the upper half space; special, with boundary metric `scale²` times the flat one.
#[derive(Clone, Copy, Debug)]
pub struct HeightFunction {
    pub scale: f64,
}

impl ScalarField for HeightFunction {
    fn eval<S: Scalar>(&self, x: &[S]) -> S {
        x[0] * self.scale
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SffLawResiduals {
    /// `B − B̄/r − N̄(r) h̄ / r²`, relative to `1 + |B|`.
    pub tensor: f64,
    /// `N̄(r) − (H − r H̄)/(n+1)`.
    pub normal_component: f64,
    pub r: f64,
}

/// Conformal transformation law between the second fundamental forms of a
/// hypersurface in `g_+` and in `ḡ = r² g_+`.
pub fn conformal_sff_law_residual<E: Embedding, M: MetricField, R: ScalarField>(
    e: &E,
    pair: &Compactified<M, R>,
    u: &[f64],
) -> Result<SffLawResiduals> {
    let plus = extrinsic_data(e, &pair.plus, u)?;
    let bar = extrinsic_data(e, pair, u)?;
    if plus.codim() != 1 {
        return Err(GeoError::DimensionMismatch { expected: e.intrinsic_dim() + 1, got: e.ambient_dim() });
    }
    let (r, dr) = pair.defining_jet(&plus.point);
    let n_r: f64 = bar.normals[0].iter().zip(&dr).map(|(a, b)| a * b).sum();
    let model = bar.sff[0].scale(1.0 / r).add(&bar.h.scale(n_r / (r * r)));
    let tensor = plus.sff[0].sub(&model).max_abs() / (1.0 + plus.sff[0].max_abs());
    let m = bar.h.n as f64;
    let normal_component = (n_r - (plus.mean[0] - r * bar.mean[0]) / m).abs();
    Ok(SffLawResiduals { tensor, normal_component, r })
}

/// Quantities of a hypersurface near one point of its boundary at infinity.
#[derive(Clone, Debug)]
struct BoundarySample {
    r: f64,
    eta: f64,
    b00: f64,
    mean_plus: f64,
    n_r: f64,
    tangential: Mat<f64>,
}

fn boundary_sample<E, M, R, O>(e: &E, pair: &Compactified<M, R>, u: &[f64], orient: &O, tangent_idx: &[usize]) -> Result<BoundarySample>
where
    E: Embedding,
    M: MetricField,
    R: ScalarField,
    O: Fn(&[f64]) -> Vec<f64>,
{
    let mut bar = extrinsic_data(e, pair, u)?;
    if bar.codim() != 1 {
        return Err(GeoError::DimensionMismatch { expected: e.intrinsic_dim() + 1, got: e.ambient_dim() });
    }
    bar.orient(&orient(&bar.point));
    let mut plus = extrinsic_data(e, &pair.plus, u)?;
    plus.orient(&orient(&plus.point));
    let (r, dr) = pair.defining_jet(&bar.point);
    let m = bar.h.n;
    // ∇̄r projected onto TY, in intrinsic components
    let dr_t: Vec<f64> = bar.tangents.iter().map(|t| t.iter().zip(&dr).map(|(a, b)| a * b).sum()).collect();
    let v: Vec<f64> = (0..m).map(|a| (0..m).map(|b| bar.h_inv.at(a, b) * dr_t[b]).sum()).collect();
    let b = &bar.sff[0];
    let mut bvv = 0.0;
    let mut hvv = 0.0;
    for a in 0..m {
        for c in 0..m {
            bvv += v[a] * b.at(a, c) * v[c];
            hvv += v[a] * bar.h.at(a, c) * v[c];
        }
    }
    let b00 = bvv / hvv;
    let n_r: f64 = bar.normals[0].iter().zip(&dr).map(|(a, b)| a * b).sum();
    let k = tangent_idx.len();
    let mut tangential = Mat::zeros(k);
    for (p, &i) in tangent_idx.iter().enumerate() {
        for (q, &j) in tangent_idx.iter().enumerate() {
            tangential.set(p, q, b.at(i, j));
        }
    }
    Ok(BoundarySample { r, eta: bar.mean[0] - b00, b00, mean_plus: plus.mean[0], n_r, tangential })
}

/// Boundary values of the quantities entering the weight −1 invariant `η̂ − n B̄_00`.
#[derive(Clone, Debug)]
pub struct BoundaryInvariant {
    /// Mean curvature of `∂Y` in the boundary metric.
    pub eta_hat: f64,
    /// `B̄(∂_r, ∂_r)` on `∂Y`.
    pub b00: f64,
    pub invariant: f64,
    /// Fit `H^Y ≈ c_0 + c_1 r + c_2 r²` of the mean curvature for `g_+`.
    pub mean_expansion: [f64; 3],
    /// `ḡ(∇̄r, N̄)` at the rung closest to the boundary.
    pub normal_r: f64,
    /// Disagreement between the primary and shifted ladders.
    pub error_estimate: f64,
}

fn quadratic_fit(rs: &[f64], ys: &[f64]) -> Result<[f64; 3]> {
    let c = polyfit(rs, ys, 0, 2)?;
    Ok([c[0], c[1], c[2]])
}

/// Orthogonality threshold for `ḡ(∇̄r, N̄)` at the smallest rung.
pub const ORTHOGONALITY_TOL: f64 = 1e-3;

/// Extrapolates `η̂`, `B̄_00` and the expansion of `H^Y` to the boundary
/// along `approach(t)`, `t → 0⁺`, sampled at the ladder radii.  The normal is
/// oriented so that it pairs positively with `orient(point)`.
pub fn boundary_conformal_invariant<E, M, R, A, O>(
    e: &E,
    pair: &Compactified<M, R>,
    approach: &A,
    ladder: &Ladder,
    orient: &O,
) -> Result<BoundaryInvariant>
where
    E: Embedding,
    M: MetricField,
    R: ScalarField,
    A: Fn(f64) -> Vec<f64>,
    O: Fn(&[f64]) -> Vec<f64>,
{
    let n = (e.intrinsic_dim() - 1) as f64;
    let run = |l: &Ladder| -> Result<([f64; 3], [f64; 3], [f64; 3], f64)> {
        let samples = l
            .radii()
            .iter()
            .map(|&t| boundary_sample(e, pair, &approach(t), orient, &[]))
            .collect::<Result<Vec<_>>>()?;
        let rs: Vec<f64> = samples.iter().map(|s| s.r).collect();
        let col = |f: &dyn Fn(&BoundarySample) -> f64| -> Vec<f64> { samples.iter().map(f).collect() };
        let eta = quadratic_fit(&rs, &col(&|s| s.eta))?;
        let b00 = quadratic_fit(&rs, &col(&|s| s.b00))?;
        let hy = quadratic_fit(&rs, &col(&|s| s.mean_plus))?;
        let closest = samples
            .iter()
            .min_by(|a, b| a.r.partial_cmp(&b.r).unwrap_or(core::cmp::Ordering::Equal))
            .map(|s| s.n_r)
            .unwrap_or(f64::NAN);
        Ok((eta, b00, hy, closest))
    };
    let (eta, b00, hy, n_r) = run(ladder)?;
    if !(n_r.abs() < ORTHOGONALITY_TOL) {
        return Err(GeoError::NotOrthogonal { residual: n_r.abs() });
    }
    let (eta2, b002, hy2, _) = run(&ladder.shifted())?;
    let error_estimate = (eta[0] - eta2[0]).abs().max((b00[0] - b002[0]).abs()).max((hy[1] - hy2[1]).abs());
    Ok(BoundaryInvariant {
        eta_hat: eta[0],
        b00: b00[0],
        invariant: eta[0] - n * b00[0],
        mean_expansion: hy,
        normal_r: n_r,
        error_estimate,
    })
}

#[derive(Clone, Debug)]
pub struct BoundaryFormComparison {
    /// Second fundamental form of `∂Y` in `(Σ, ĝ)`.
    pub ii: Mat<f64>,
    /// `B̄` restricted to `T∂Y`, extrapolated to the boundary.
    pub b_bar: Mat<f64>,
    pub residual: f64,
    /// `ĥ^{ab} II_ab`.
    pub eta_hat: f64,
    pub error_estimate: f64,
}

/// Compares the second fundamental form of `∂Y ⊂ (Σ, ĝ)` with the boundary
/// limit of `B̄` on the intrinsic directions `tangent_idx`, which must
/// parametrise `∂Y` with the same coordinates as `boundary`.
#[allow(clippy::too_many_arguments)]
pub fn ii_equals_bbar<E, M, R, A, O, BE, BM, BO>(
    e: &E,
    pair: &Compactified<M, R>,
    approach: &A,
    ladder: &Ladder,
    orient: &O,
    tangent_idx: &[usize],
    boundary: (&BE, &BM, &[f64]),
    boundary_orient: &BO,
) -> Result<BoundaryFormComparison>
where
    E: Embedding,
    M: MetricField,
    R: ScalarField,
    A: Fn(f64) -> Vec<f64>,
    O: Fn(&[f64]) -> Vec<f64>,
    BE: Embedding,
    BM: MetricField,
    BO: Fn(&[f64]) -> Vec<f64>,
{
    let k = tangent_idx.len();
    let (be, bm, y) = boundary;
    if be.intrinsic_dim() != k {
        return Err(GeoError::DimensionMismatch { expected: k, got: be.intrinsic_dim() });
    }
    let mut sig = extrinsic_data(be, bm, y)?;
    if sig.codim() != 1 {
        return Err(GeoError::DimensionMismatch { expected: k + 1, got: be.ambient_dim() });
    }
    sig.orient(&boundary_orient(&sig.point));
    let run = |l: &Ladder| -> Result<(Mat<f64>, f64)> {
        let samples = l
            .radii()
            .iter()
            .map(|&t| boundary_sample(e, pair, &approach(t), orient, tangent_idx))
            .collect::<Result<Vec<_>>>()?;
        let rs: Vec<f64> = samples.iter().map(|s| s.r).collect();
        let mut out = Mat::zeros(k);
        for p in 0..k {
            for q in 0..k {
                let ys: Vec<f64> = samples.iter().map(|s| s.tangential.at(p, q)).collect();
                out.set(p, q, quadratic_fit(&rs, &ys)?[0]);
            }
        }
        let n_r = samples.iter().map(|s| s.n_r.abs()).fold(f64::INFINITY, f64::min);
        Ok((out, n_r))
    };
    let (b_bar, n_r) = run(ladder)?;
    if !(n_r < ORTHOGONALITY_TOL) {
        return Err(GeoError::NotOrthogonal { residual: n_r });
    }
    let (b_bar2, _) = run(&ladder.shifted())?;
    let ii = sig.sff[0].clone();
    Ok(BoundaryFormComparison {
        residual: ii.sub(&b_bar).max_abs(),
        eta_hat: sig.mean[0],
        error_estimate: b_bar.sub(&b_bar2).max_abs(),
        ii,
        b_bar,
    })
}
