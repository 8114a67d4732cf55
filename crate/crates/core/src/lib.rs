//! Classical and Bayesian inference for the Gumbel type-II distribution
//! under adaptive type-II progressive hybrid censoring (AT-II PHCS).
//!
//! The crate covers the full pipeline:
//!
//! * [`models`] — distribution primitives and comparator families;
//! * [`censoring`] — removal plans and censored-sample generation;
//! * [`mle`] / [`mps`] — maximum likelihood and maximum product spacing fits;
//! * [`bayes`] — Metropolis-Hastings posterior sampling and loss-based
//!   point estimates;
//! * [`intervals`] — asymptotic, bootstrap and HPD intervals;
//! * [`gof`] — goodness-of-fit statistics and plot-ready tables;
//! * [`sim`] — Monte Carlo evaluation campaigns;
//! * [`data`] — the bundled Covid-19 death-rate data set.

pub mod bayes;
pub mod censoring;
pub mod data;
pub mod error;
pub mod gof;
pub mod intervals;
pub mod mle;
pub mod models;
pub mod mps;
pub mod numeric;
mod optim;
pub mod sim;

pub use censoring::{AdaptiveCensoredSample, CensoringPlan};
pub use error::{Error, Result};
pub use mle::{FitOptions, FitReport};
pub use models::Params;
