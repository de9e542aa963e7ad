//! Small dense linear algebra on row-major `Vec`s.

use alloc::vec;
use alloc::vec::Vec;

use crate::scalar::Scalar;

/// Square matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct Mat<S> {
    pub n: usize,
    pub a: Vec<S>,
}

impl<S: Scalar> Mat<S> {
    pub fn zeros(n: usize) -> Self {
        Mat { n, a: vec![S::zero(); n * n] }
    }
    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.a[i * n + i] = S::one();
        }
        m
    }
    pub fn from_vec(n: usize, a: Vec<S>) -> Self {
        assert_eq!(a.len(), n * n);
        Mat { n, a }
    }
    #[inline]
    pub fn at(&self, i: usize, j: usize) -> S {
        self.a[i * self.n + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: S) {
        self.a[i * self.n + j] = v;
    }
    pub fn mul(&self, o: &Self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let aik = self.at(i, k);
                for j in 0..n {
                    out.a[i * n + j] += aik * o.at(k, j);
                }
            }
        }
        out
    }
    pub fn transpose(&self) -> Self {
        let n = self.n;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out.a[j * n + i] = self.at(i, j);
            }
        }
        out
    }
    pub fn trace(&self) -> S {
        (0..self.n).fold(S::zero(), |acc, i| acc + self.at(i, i))
    }
    pub fn scale(&self, c: S) -> Self {
        Mat { n: self.n, a: self.a.iter().map(|&x| x * c).collect() }
    }
    pub fn add(&self, o: &Self) -> Self {
        Mat { n: self.n, a: self.a.iter().zip(&o.a).map(|(&x, &y)| x + y).collect() }
    }
    pub fn sub(&self, o: &Self) -> Self {
        Mat { n: self.n, a: self.a.iter().zip(&o.a).map(|(&x, &y)| x - y).collect() }
    }
    pub fn re(&self) -> Mat<f64> {
        Mat { n: self.n, a: self.a.iter().map(|x| x.re()).collect() }
    }

    /// Inverse by Gauss–Jordan with partial pivoting; `None` when singular.
    pub fn inverse(&self) -> Option<Self> {
        let n = self.n;
        let mut m = self.a.clone();
        let mut inv = Self::identity(n).a;
        let scale = self.a.iter().fold(0.0f64, |s, x| s.max(x.re().abs()));
        for c in 0..n {
            let p = (c..n).max_by(|&i, &j| {
                m[i * n + c].re().abs().partial_cmp(&m[j * n + c].re().abs()).unwrap_or(core::cmp::Ordering::Equal)
            })?;
            if !(m[p * n + c].re().abs() > 1e-300 + 1e-14 * scale) {
                return None;
            }
            if p != c {
                for j in 0..n {
                    m.swap(p * n + j, c * n + j);
                    inv.swap(p * n + j, c * n + j);
                }
            }
            let piv = m[c * n + c].recip();
            for j in 0..n {
                m[c * n + j] *= piv;
                inv[c * n + j] *= piv;
            }
            for i in 0..n {
                if i != c {
                    let f = m[i * n + c];
                    for j in 0..n {
                        let mc = m[c * n + j];
                        let ic = inv[c * n + j];
                        m[i * n + j] -= f * mc;
                        inv[i * n + j] -= f * ic;
                    }
                }
            }
        }
        Some(Mat { n, a: inv })
    }

    pub fn det(&self) -> S {
        let n = self.n;
        let mut m = self.a.clone();
        let mut det = S::one();
        for c in 0..n {
            let p = (c..n)
                .max_by(|&i, &j| {
                    m[i * n + c].re().abs().partial_cmp(&m[j * n + c].re().abs()).unwrap_or(core::cmp::Ordering::Equal)
                })
                .unwrap();
            if m[p * n + c].re() == 0.0 {
                return S::zero();
            }
            if p != c {
                for j in 0..n {
                    m.swap(p * n + j, c * n + j);
                }
                det = -det;
            }
            let piv = m[c * n + c];
            det *= piv;
            let inv = piv.recip();
            for i in c + 1..n {
                let f = m[i * n + c] * inv;
                for j in c..n {
                    let mc = m[c * n + j];
                    m[i * n + j] -= f * mc;
                }
            }
        }
        det
    }
}

impl Mat<f64> {
    pub fn max_abs(&self) -> f64 {
        self.a.iter().fold(0.0, |s, x| s.max(x.abs()))
    }
    pub fn sym_part(&self) -> Self {
        let t = self.transpose();
        Mat { n: self.n, a: self.a.iter().zip(&t.a).map(|(x, y)| 0.5 * (x + y)).collect() }
    }
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn sym_eigenvalues(m: &Mat<f64>) -> Vec<f64> {
    let n = m.n;
    let mut a = m.sym_part().a;
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + libm::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / libm::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap_or(core::cmp::Ordering::Equal));
    ev
}

/// Least-squares solution of the `rows × cols` system `A x = b`
/// by Householder QR. Returns `None` when `A` is rank deficient.
pub fn least_squares(rows: usize, cols: usize, a: &[f64], b: &[f64]) -> Option<Vec<f64>> {
    assert!(rows >= cols);
    let mut r = a.to_vec();
    let mut y = b.to_vec();
    let col_norm = |r: &[f64], j: usize, from: usize| -> f64 {
        libm::sqrt((from..rows).map(|i| r[i * cols + j] * r[i * cols + j]).sum())
    };
    let scale = (0..cols).map(|j| col_norm(a, j, 0)).fold(0.0f64, f64::max);
    for j in 0..cols {
        let norm = col_norm(&r, j, j);
        if norm <= 1e-13 * scale.max(1e-300) {
            return None;
        }
        let alpha = if r[j * cols + j] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..rows).map(|i| r[i * cols + j]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        for k in j..cols {
            let dot: f64 = (j..rows).map(|i| v[i - j] * r[i * cols + k]).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..rows {
                r[i * cols + k] -= f * v[i - j];
            }
        }
        let dot: f64 = (j..rows).map(|i| v[i - j] * y[i]).sum();
        let f = 2.0 * dot / vnorm2;
        for i in j..rows {
            y[i] -= f * v[i - j];
        }
    }
    let mut x = vec![0.0; cols];
    for j in (0..cols).rev() {
        let mut s = y[j];
        for k in j + 1..cols {
            s -= r[j * cols + k] * x[k];
        }
        x[j] = s / r[j * cols + j];
    }
    Some(x)
}

/// Orthonormalise `vectors` (each of length `n`) with respect to the
/// symmetric positive definite `g`, dropping any that become dependent.
pub fn gram_schmidt<S: Scalar>(g: &Mat<S>, vectors: &[Vec<S>], start: &[Vec<S>]) -> Vec<Vec<S>> {
    let n = g.n;
    let ip = |u: &[S], v: &[S]| -> S {
        let mut s = S::zero();
        for i in 0..n {
            for j in 0..n {
                s += u[i] * g.at(i, j) * v[j];
            }
        }
        s
    };
    let mut basis: Vec<Vec<S>> = start.to_vec();
    let mut out = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for e in basis.iter() {
                let c = ip(&w, e) / ip(e, e);
                for i in 0..n {
                    w[i] -= c * e[i];
                }
            }
        }
        let nn = ip(&w, &w);
        let ref_norm = ip(v, v).re().abs().max(1e-300);
        if nn.re() > 1e-16 * ref_norm {
            let inv = nn.sqrt().recip();
            let u: Vec<S> = w.iter().map(|&x| x * inv).collect();
            basis.push(u.clone());
            out.push(u);
        }
    }
    out
}
