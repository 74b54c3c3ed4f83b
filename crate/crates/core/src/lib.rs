// SPDX-License-Identifier: Apache-2.0

//! Exact symbolic checks of Poisson pencils and contact systems, GKSL
//! generators and their pencils, and Moyal/Weyl semiclassics.
//!
//! Numerical code is generic over [`scalar::Real`]; the aliases below fix the
//! two float widths. Symbolic code is exact over big rationals.

pub mod config;
pub mod error;
pub mod geometry;
pub mod gksl;
pub mod linalg;
pub mod models;
pub mod moyal;
pub mod poly;
pub mod scalar;
pub mod suite;
pub mod symbolic;

pub use error::{Error, Result};
pub use symbolic::Expression;

pub type C64 = num_complex::Complex<f64>;
pub type C32 = num_complex::Complex<f32>;
pub type CMatrix64 = linalg::CMatrix<f64>;
pub type CMatrix32 = linalg::CMatrix<f32>;
pub type Gksl64 = gksl::Gksl<f64>;
pub type Gksl32 = gksl::Gksl<f32>;
pub type Superoperator64 = gksl::Superoperator<f64>;
pub type FockOperator64 = moyal::FockOperator<f64>;
pub type EgorovSweep64 = moyal::EgorovSweep<f64>;
/// Exact scalar of the symbolic layer.
pub type Rational = scalar::Rational;
/// Exact complex scalar of phase-space symbols.
pub type GaussianRational = scalar::GaussianRational;
