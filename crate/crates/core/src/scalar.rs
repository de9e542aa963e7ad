//! Scalar arithmetic used by every geometric routine.
//!
//! Metrics, embeddings and scalar fields are written once against the
//! [`Scalar`] trait and evaluated either on plain `f64` or on forward-mode
//! jets. [`Dual`] carries one infinitesimal, [`HyperDual`] carries two
//! (`e1`, `e2`) together with their product `e1 e2`, which yields exact mixed
//! second derivatives. Both are generic over an inner scalar, so nesting them
//! (e.g. `HyperDual<Dual<f64>>`) gives exact third derivatives.

use core::fmt::Debug;
use core::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Scalar:
    Copy
    + Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + Add<f64, Output = Self>
    + Sub<f64, Output = Self>
    + Mul<f64, Output = Self>
    + Div<f64, Output = Self>
{
    fn cst(v: f64) -> Self;
    /// Real (value) part, with every infinitesimal dropped.
    fn re(&self) -> f64;

    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn atan(self) -> Self;

    fn zero() -> Self {
        Self::cst(0.0)
    }
    fn one() -> Self {
        Self::cst(1.0)
    }
    fn recip(self) -> Self {
        Self::one() / self
    }
    fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut acc = Self::one();
        let mut base = self;
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc *= base;
            }
            base *= base;
            k >>= 1;
        }
        acc
    }
    /// Sign taken from the real part.
    fn abs(self) -> Self {
        if self.re() < 0.0 {
            -self
        } else {
            self
        }
    }
}

impl Scalar for f64 {
    fn cst(v: f64) -> Self {
        v
    }
    fn re(&self) -> f64 {
        *self
    }
    fn sqrt(self) -> Self {
        libm::sqrt(self)
    }
    fn exp(self) -> Self {
        libm::exp(self)
    }
    fn ln(self) -> Self {
        libm::log(self)
    }
    fn sin(self) -> Self {
        libm::sin(self)
    }
    fn cos(self) -> Self {
        libm::cos(self)
    }
    fn sinh(self) -> Self {
        libm::sinh(self)
    }
    fn cosh(self) -> Self {
        libm::cosh(self)
    }
    fn tanh(self) -> Self {
        libm::tanh(self)
    }
    fn atan(self) -> Self {
        libm::atan(self)
    }
}

/// `v + d·ε` with `ε² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<S> {
    pub v: S,
    pub d: S,
}

impl<S: Scalar> Dual<S> {
    pub fn new(v: S, d: S) -> Self {
        Dual { v, d }
    }
    pub fn var(v: S) -> Self {
        Dual { v, d: S::one() }
    }
    fn chain(self, f: S, df: S) -> Self {
        Dual { v: f, d: df * self.d }
    }
}

/// `v + a·e1 + b·e2 + ab·e1e2` with `e1² = e2² = 0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperDual<S> {
    pub v: S,
    pub a: S,
    pub b: S,
    pub ab: S,
}

impl<S: Scalar> HyperDual<S> {
    pub fn new(v: S, a: S, b: S, ab: S) -> Self {
        HyperDual { v, a, b, ab }
    }
    fn chain(self, f: S, df: S, ddf: S) -> Self {
        HyperDual {
            v: f,
            a: df * self.a,
            b: df * self.b,
            ab: df * self.ab + ddf * self.a * self.b,
        }
    }
}

macro_rules! impl_jet_ops {
    ($T:ident, [$($f:ident),+], $mul:expr, $div:expr) => {
        impl<S: Scalar> Add for $T<S> {
            type Output = Self;
            fn add(self, o: Self) -> Self {
                $T { $($f: self.$f + o.$f),+ }
            }
        }
        impl<S: Scalar> Sub for $T<S> {
            type Output = Self;
            fn sub(self, o: Self) -> Self {
                $T { $($f: self.$f - o.$f),+ }
            }
        }
        impl<S: Scalar> Neg for $T<S> {
            type Output = Self;
            fn neg(self) -> Self {
                $T { $($f: -self.$f),+ }
            }
        }
        impl<S: Scalar> Mul for $T<S> {
            type Output = Self;
            fn mul(self, o: Self) -> Self {
                $mul(self, o)
            }
        }
        impl<S: Scalar> Div for $T<S> {
            type Output = Self;
            fn div(self, o: Self) -> Self {
                $div(self, o)
            }
        }
        impl<S: Scalar> AddAssign for $T<S> {
            fn add_assign(&mut self, o: Self) {
                *self = *self + o;
            }
        }
        impl<S: Scalar> SubAssign for $T<S> {
            fn sub_assign(&mut self, o: Self) {
                *self = *self - o;
            }
        }
        impl<S: Scalar> MulAssign for $T<S> {
            fn mul_assign(&mut self, o: Self) {
                *self = *self * o;
            }
        }
        impl<S: Scalar> Add<f64> for $T<S> {
            type Output = Self;
            fn add(mut self, o: f64) -> Self {
                self.v = self.v + o;
                self
            }
        }
        impl<S: Scalar> Sub<f64> for $T<S> {
            type Output = Self;
            fn sub(mut self, o: f64) -> Self {
                self.v = self.v - o;
                self
            }
        }
        impl<S: Scalar> Mul<f64> for $T<S> {
            type Output = Self;
            fn mul(self, o: f64) -> Self {
                $T { $($f: self.$f * o),+ }
            }
        }
        impl<S: Scalar> Div<f64> for $T<S> {
            type Output = Self;
            fn div(self, o: f64) -> Self {
                $T { $($f: self.$f / o),+ }
            }
        }
    };
}

impl_jet_ops!(
    Dual,
    [v, d],
    |x: Dual<S>, y: Dual<S>| Dual { v: x.v * y.v, d: x.d * y.v + x.v * y.d },
    |x: Dual<S>, y: Dual<S>| {
        let inv = y.v.recip();
        Dual { v: x.v * inv, d: (x.d - x.v * inv * y.d) * inv }
    }
);

impl_jet_ops!(
    HyperDual,
    [v, a, b, ab],
    |x: HyperDual<S>, y: HyperDual<S>| HyperDual {
        v: x.v * y.v,
        a: x.a * y.v + x.v * y.a,
        b: x.b * y.v + x.v * y.b,
        ab: x.ab * y.v + x.a * y.b + x.b * y.a + x.v * y.ab,
    },
    |x: HyperDual<S>, y: HyperDual<S>| {
        let inv = y.v.recip();
        x * y.chain(inv, -inv * inv, inv * inv * inv * 2.0)
    }
);

impl<S: Scalar> Scalar for Dual<S> {
    fn cst(v: f64) -> Self {
        Dual { v: S::cst(v), d: S::zero() }
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, (s * 2.0).recip())
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.v.ln(), self.v.recip())
    }
    fn sin(self) -> Self {
        self.chain(self.v.sin(), self.v.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.v.cos(), -self.v.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.v.sinh(), self.v.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.v.cosh(), self.v.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        self.chain(t, S::one() - t * t)
    }
    fn atan(self) -> Self {
        self.chain(self.v.atan(), (self.v * self.v + 1.0).recip())
    }
}

impl<S: Scalar> Scalar for HyperDual<S> {
    fn cst(v: f64) -> Self {
        HyperDual { v: S::cst(v), a: S::zero(), b: S::zero(), ab: S::zero() }
    }
    fn re(&self) -> f64 {
        self.v.re()
    }
    fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        let ds = (s * 2.0).recip();
        self.chain(s, ds, -ds / (self.v * 2.0))
    }
    fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }
    fn ln(self) -> Self {
        let inv = self.v.recip();
        self.chain(self.v.ln(), inv, -inv * inv)
    }
    fn sin(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(s, c, -s)
    }
    fn cos(self) -> Self {
        let (s, c) = (self.v.sin(), self.v.cos());
        self.chain(c, -s, -c)
    }
    fn sinh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(s, c, s)
    }
    fn cosh(self) -> Self {
        let (s, c) = (self.v.sinh(), self.v.cosh());
        self.chain(c, s, c)
    }
    fn tanh(self) -> Self {
        let t = self.v.tanh();
        let d = S::one() - t * t;
        self.chain(t, d, d * t * (-2.0))
    }
    fn atan(self) -> Self {
        let q = (self.v * self.v + 1.0).recip();
        self.chain(self.v.atan(), q, q * q * self.v * (-2.0))
    }
}

/// Value, gradient and Hessian of `f` at `x`, exact to roundoff.
pub fn value_grad_hessian<F>(x: &[f64], f: F) -> (f64, alloc::vec::Vec<f64>, alloc::vec::Vec<f64>)
where
    F: Fn(&[HyperDual<f64>]) -> HyperDual<f64>,
{
    let n = x.len();
    let mut grad = alloc::vec![0.0; n];
    let mut hess = alloc::vec![0.0; n * n];
    let mut value = 0.0;
    let mut pt: alloc::vec::Vec<HyperDual<f64>> = x.iter().map(|&v| HyperDual::cst(v)).collect();
    for k in 0..n {
        for l in k..n {
            pt[k].a = 1.0;
            pt[l].b = 1.0;
            let out = f(&pt);
            pt[k].a = 0.0;
            pt[l].b = 0.0;
            value = out.v;
            if k == l {
                grad[k] = out.a;
            }
            hess[k * n + l] = out.ab;
            hess[l * n + k] = out.ab;
        }
    }
    if n == 0 {
        value = f(&pt).v;
    }
    (value, grad, hess)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + b.abs())
    }

    #[test]
    fn dual_derivatives_match_closed_forms() {
        let x = Dual::var(0.7);
        let y = (x.sin() * x.exp()) / (x * x + 1.0).sqrt();
        let f = |t: f64| libm::sin(t) * libm::exp(t) / libm::sqrt(t * t + 1.0);
        let h = 1e-5;
        let fd = (f(0.7 + h) - f(0.7 - h)) / (2.0 * h);
        assert!(close(y.v, f(0.7), 1e-15));
        assert!(close(y.d, fd, 1e-9));
    }

    #[test]
    fn hyperdual_gives_mixed_partials() {
        // f(x, y) = x^2 y^3 + sinh(x y)
        let (v, g, h) = value_grad_hessian(&[0.4, -1.3], |p| {
            p[0] * p[0] * p[1].powi(3) + (p[0] * p[1]).sinh()
        });
        let (x, y) = (0.4f64, -1.3f64);
        assert!(close(v, x * x * y.powi(3) + (x * y).sinh(), 1e-14));
        assert!(close(g[0], 2.0 * x * y.powi(3) + y * (x * y).cosh(), 1e-14));
        assert!(close(g[1], 3.0 * x * x * y * y + x * (x * y).cosh(), 1e-14));
        let hxy = 6.0 * x * y * y + (x * y).cosh() + x * y * (x * y).sinh();
        assert!(close(h[1], hxy, 1e-14));
        assert!(close(h[2], hxy, 1e-14));
        assert!(close(h[0], 2.0 * y.powi(3) + y * y * (x * y).sinh(), 1e-14));
    }

    #[test]
    fn nested_jets_give_third_derivative() {
        // d^3/dt^3 of t^5 at t = 1.1 is 60 t^2
        let t = 1.1;
        let x = HyperDual::new(Dual::var(t), Dual::cst(1.0), Dual::cst(1.0), Dual::cst(0.0));
        let y = x.powi(5);
        assert!(close(y.ab.d, 60.0 * t * t, 1e-13));
        assert!(close(y.ab.v, 20.0 * t * t * t, 1e-13));
    }

    #[test]
    fn division_and_elementary_functions() {
        let x = HyperDual::new(0.3, 1.0, 1.0, 0.0);
        for (y, d1, d2) in [
            (x.tanh(), 1.0 - 0.3f64.tanh().powi(2), -2.0 * 0.3f64.tanh() * (1.0 - 0.3f64.tanh().powi(2))),
            (x.atan(), 1.0 / 1.09, -0.6 / (1.09 * 1.09)),
            (x.ln(), 1.0 / 0.3, -1.0 / 0.09),
            (x.recip(), -1.0 / 0.09, 2.0 / 0.027),
        ] {
            assert!(close(y.a, d1, 1e-13), "{y:?}");
            assert!(close(y.ab, d2, 1e-12), "{y:?}");
        }
    }
}
