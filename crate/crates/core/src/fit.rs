//! Polynomial fitting on geometric ladders of radii.

use alloc::vec::Vec;

use crate::error::{GeoError, Result};
use crate::linalg::least_squares;

/// Radii `r_j = r_min · 2^j` for `j < rungs`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ladder {
    pub r_min: f64,
    pub rungs: usize,
}

impl Default for Ladder {
    fn default() -> Self {
        Ladder { r_min: 1e-3, rungs: 6 }
    }
}

impl Ladder {
    pub fn radii(&self) -> Vec<f64> {
        (0..self.rungs).map(|j| self.r_min * libm::pow(2.0, j as f64)).collect()
    }
    pub fn shifted(&self) -> Ladder {
        Ladder { r_min: 2.0 * self.r_min, rungs: self.rungs }
    }
    pub fn r_max(&self) -> f64 {
        self.r_min * libm::pow(2.0, (self.rungs.max(1) - 1) as f64)
    }
}

/// Least-squares coefficients of `Σ_{k=lo}^{hi} c_k t^k` through `(ts, ys)`.
/// The returned vector is indexed by `k - lo`.
pub fn polyfit(ts: &[f64], ys: &[f64], lo: usize, hi: usize) -> Result<Vec<f64>> {
    let cols = hi + 1 - lo;
    if ts.len() < cols {
        return Err(GeoError::InvalidParameter(alloc::format!(
            "{} samples cannot determine {} coefficients",
            ts.len(),
            cols
        )));
    }
    // scale t to O(1) for conditioning
    let s = ts.iter().fold(0.0f64, |m, t| m.max(t.abs())).max(1e-300);
    let mut a = Vec::with_capacity(ts.len() * cols);
    for &t in ts {
        for k in lo..=hi {
            a.push(libm::pow(t / s, k as f64));
        }
    }
    let c = least_squares(ts.len(), cols, &a, ys).ok_or(GeoError::InvalidParameter("rank-deficient fit".into()))?;
    Ok(c.iter().enumerate().map(|(i, v)| v / libm::pow(s, (i + lo) as f64)).collect())
}

/// Fit `f` sampled on `ladder` and on the shifted ladder; returns the
/// coefficients from the primary ladder and the per-coefficient disagreement.
pub fn ladder_fit<F: FnMut(f64) -> Result<f64>>(
    ladder: &Ladder,
    lo: usize,
    hi: usize,
    mut f: F,
) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut sample = |l: &Ladder| -> Result<Vec<f64>> {
        let ts = l.radii();
        let ys = ts.iter().map(|&t| f(t)).collect::<Result<Vec<f64>>>()?;
        polyfit(&ts, &ys, lo, hi)
    };
    let a = sample(ladder)?;
    let b = sample(&ladder.shifted())?;
    let err = a.iter().zip(&b).map(|(x, y)| (x - y).abs()).collect();
    Ok((a, err))
}

/// Fit many functions at once: `f(t)` returns one value per component.
pub fn ladder_fit_many<F: FnMut(f64) -> Result<Vec<f64>>>(
    ladder: &Ladder,
    lo: usize,
    hi: usize,
    mut f: F,
) -> Result<(Vec<Vec<f64>>, Vec<Vec<f64>>)> {
    let mut sample = |l: &Ladder| -> Result<Vec<Vec<f64>>> {
        let ts = l.radii();
        let rows = ts.iter().map(|&t| f(t)).collect::<Result<Vec<Vec<f64>>>>()?;
        let m = rows.first().map(|r| r.len()).unwrap_or(0);
        (0..m)
            .map(|c| {
                let ys: Vec<f64> = rows.iter().map(|r| r[c]).collect();
                polyfit(&ts, &ys, lo, hi)
            })
            .collect()
    };
    let a = sample(ladder)?;
    let b = sample(&ladder.shifted())?;
    let err = a
        .iter()
        .zip(&b)
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q).abs()).collect())
        .collect();
    Ok((a, err))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, computed by Newton iteration.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = Vec::with_capacity(m);
    let mut w = Vec::with_capacity(m);
    for i in 0..m {
        let mut z = libm::cos(core::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut pp = 1.0;
        for _ in 0..100 {
            let (mut p1, mut p2) = (1.0, 0.0);
            for j in 1..=m {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j - 1) as f64 * z * p2 - (j - 1) as f64 * p3) / j as f64;
            }
            pp = m as f64 * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() < 1e-15 {
                break;
            }
        }
        x.push(z);
        w.push(2.0 / ((1.0 - z * z) * pp * pp));
    }
    (x, w)
}

/// Composite Gauss–Legendre quadrature of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize, order: usize) -> f64 {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut s = 0.0;
    for p in 0..panels {
        let c = a + (p as f64 + 0.5) * h;
        for (xi, wi) in x.iter().zip(&w) {
            s += wi * f(c + 0.5 * h * xi);
        }
    }
    0.5 * h * s
}
