//! Exact algebra for presymplectic spaces, canonical Poisson and CCR
//! algebras, and the Fedosov construction of the star product.

#![allow(clippy::needless_range_loop)]

pub mod ccr;
pub mod error;
pub mod fedosov;
pub mod json;
pub mod linalg;
pub mod poisson;
pub mod poly;
pub mod presymplectic;
pub mod sample;
pub mod scalar;

pub use error::{AlgebraError, Result};
pub use scalar::{cq, q, Coeff, ComplexCoeff, Real, C64, CQ, Q};
