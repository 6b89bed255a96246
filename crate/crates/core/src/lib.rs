//! Random-codebook channel resolvability: information measures, exact and
//! Monte Carlo variational distances, concentration bounds and the converse
//! audit.

// `!(x > 0.0)` is used on purpose so that NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod channel;
pub mod codebook;
pub mod converse;
pub mod error;
pub mod experiments;
pub mod info;
pub mod numeric;

pub use channel::{Alphabet, Channel, Distribution, Family, Pmf, Symbol};
pub use codebook::{draw_codebook, tv_exact, tv_monte_carlo, Codebook, TVReport, TvMethod};
pub use error::{Error, Result};
pub use info::{Estimate, EvalConfig, InfoStats};
