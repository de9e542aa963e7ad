//! Numerical geometry for asymptotically hyperbolic manifolds.
//!
//! The crate is `no_std` (with `alloc`). Everything is built on a single
//! generic [`scalar::Scalar`] abstraction so that metrics, embeddings and
//! profile curves can be differentiated exactly with forward-mode jets.
//!
//! Conventions: `Rm[i][j][k][l] = g(R(e_i, e_j) e_l, e_k)` with
//! `R(X, Y) = [∇_X, ∇_Y] - ∇_[X,Y]`, so that `Rm[i][j][i][j]` is the
//! sectional curvature of an orthonormal pair.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod catenoid;
pub mod cheeger;
pub mod error;
pub mod fit;
pub mod holographic;
pub mod linalg;
pub mod metrics;
pub mod scalar;
pub mod submanifold;
pub mod tensor;

pub use error::{GeoError, Result};
pub use scalar::{Dual, HyperDual, Scalar};
pub use tensor::{Differentiation, MetricField};
