//! Semi-analytic bond and swaption pricing in the Black-Karasinski short-rate
//! model.
//!
//! The short rate is lognormal: `ln r_t` follows a mean-reverting Gaussian
//! process `d ln r_t = (a(t) - b ln r_t) dt + sigma dW_t`. No closed-form bond
//! or swaption prices exist in this model. This crate implements fast
//! approximations built from the Karhunen-Loeve expansion of the driving
//! Ornstein-Uhlenbeck process (zero-coupon bonds) and of the associated OU
//! bridge (swaptions), together with two ground-truth oracles used to verify
//! them:
//!
//! - an exact-transition Monte Carlo simulator for bonds, and
//! - a mean-reverting trinomial lattice for bonds and swaptions.
//!
//! Layout follows the pricing pipeline:
//!
//! - [`numerics`]: Hermite polynomials, Gauss quadrature, Lagrange
//!   interpolation, Gaussian partial-moment operators, root finding.
//! - [`model`]: model parameters, OU / bridge covariance kernels and their
//!   closed-form Karhunen-Loeve bases.
//! - [`bond`]: zero-coupon bond approximations (full tensor-quadrature and
//!   fast single-factor forms).
//! - [`swaption`]: European payer/receiver swaption approximation and the
//!   Black implied-volatility conversions used for reporting.
//! - [`oracle`]: Monte Carlo and lattice benchmark engines.
//! - [`calibrate`]: drift bootstrap and (sigma, b) fitting.

// `!(x > 0.0)` rejects NaN along with non-positive values in one test;
// the negated form is deliberate in the validation paths.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bond;
pub mod calibrate;
mod error;
pub mod model;
pub mod numerics;
pub mod oracle;
pub mod swaption;

pub use bond::{bond_price_fast, bond_price_full, yield_from_price, BondQuote, FastBondPricer};
pub use error::Error;
pub use model::{bridge_kl_basis, ou_kl_basis, Kernel, KernelKind, KlBasis, ModelParams};
pub use oracle::{lattice_build, mc_bond_price, Lattice, LatticeConfig, McConfig, McEstimate};
pub use swaption::{
    black_swaption_price, implied_vol, parity_disparity, swaption_price, Side, SwaptionPricer,
    SwaptionSpec,
};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, Error>;
