//! Neutrix-regularized special functions: the lower incomplete gamma function
//! and its `α`-derivatives for every real order, the negative-argument
//! companion `γ*(α, x₋)`, and polygamma functions at every real point
//! including the nonpositive integers.
//!
//! Every closed form is paired with an independent numerical route, either a
//! regularized quadrature or a direct finite-part fit of the divergent
//! integral (see [`neutrix`]).

pub mod cli;
pub mod error;
pub mod incgamma;
pub mod incgamma_star;
pub mod neutrix;
pub mod polygamma;
pub mod quadrature;
pub mod summation;
pub mod verify;

pub use error::{Error, Result};
pub use incgamma::{classify, lower_gamma, lower_gamma_deriv, ArgClass, EvalConfig};
pub use quadrature::{integrate, Evaluation, Method, QuadratureConfig};
