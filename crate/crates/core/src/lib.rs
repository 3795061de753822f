//! Free-field realization of the elliptic quantum group `U_{q,p}(sl_N-hat)` at
//! level one: vertex operators, exchange relations, dynamical R-matrices and
//! the deformed W-algebra fusion, checked numerically at high precision.

pub mod config;
pub mod lin;
pub mod modealg;
pub mod currents;
pub mod fusionwn;
pub mod modefn;
pub mod opecalc;
pub mod params;
pub mod qspecial;
pub mod report;
pub mod rmatrix;
pub mod rexpr;
pub mod scalar;
pub mod series;
pub mod suites;
pub mod zeromode;

pub use params::QParams;
pub use scalar::{Real, Scalar};
