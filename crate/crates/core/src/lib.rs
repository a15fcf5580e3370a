//! Desingularization of branch points of minimal disks in ℝ⁴.
//!
//! A conformal minimal disk is described by four holomorphic derivatives
//! ([`weierstrass`]). Near a branch point of multiplicity `N` the disk is
//! deformed into minimal immersions with transverse double points
//! ([`deformation`]); the double points are located and counted
//! ([`intersect`]) and compared against the braid invariants of the link of
//! the branch point ([`knot`]) through `2D = e(K) − (N − 1)`.
//!
//! All numeric code is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which is what the tolerances are
//! tuned for.

// `!(x > 0)` is used on purpose so that NaN is rejected too
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod cpoly;
pub mod deformation;
pub mod error;
pub mod intersect;
pub mod knot;
pub mod linalg;
pub mod scalar;
pub mod weierstrass;

pub use cpoly::{CPoly, Order};
pub use error::{Error, Result};
pub use scalar::{Real, C};
pub use weierstrass::{GaussValue, Orientation, TwoVector, WeierstrassData};

pub type CPoly64 = CPoly<f64>;
pub type CPoly32 = CPoly<f32>;
pub type WeierstrassData64 = WeierstrassData<f64>;
pub type TwoVector64 = TwoVector<f64>;
