//! Scalar and polynomial numerics shared by the pricers.
//!
//! Everything here is a pure function of its inputs: probabilists' Hermite
//! polynomials and their zeros, Gauss-Hermite and Gauss-Legendre rules,
//! Lagrange interpolation expanded to monomial coefficients, the Gaussian
//! partial-moment operators, the normal distribution, and a safeguarded
//! bracketed root finder.

mod gaussian;
mod hermite;
mod lagrange;
mod partial_moment;
mod polynomial;
mod quadrature;
mod roots;

pub use gaussian::{normal_cdf, normal_pdf};
pub use hermite::{hermite_polynomial, hermite_value, hermite_zeros};
pub use lagrange::lagrange_on_hermite_nodes;
pub use partial_moment::{
    gaussian_tail_expectation, partial_moment_decompose, PartialMomentDecomposition,
};
pub use polynomial::Polynomial;
pub use quadrature::{gauss_hermite_rule, gauss_legendre_rule, integrate_time, QuadratureRule};
pub use roots::solve_bracketed_root;
