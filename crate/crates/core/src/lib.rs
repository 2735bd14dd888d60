//! Incremental generative Monte Carlo (IGMC).
//!
//! Given a handful of observations of a random variable and a *generative
//! approach* (a deterministic rule that turns a sample set into a samplable
//! distribution), IGMC estimates the posterior distribution of the variable's
//! expectation by repeatedly fitting, drawing one value and appending it to
//! the set. Each of `N` independent chains of depth `H` yields one posterior
//! draw; their empirical CDF is the estimate.
//!
//! The crate is organised as:
//!
//! - [`generative`]: sample sets, the [`GenerativeApproach`] contract and the
//!   built-in Bernoulli / exponential moment-matching fits.
//! - [`engine`]: chains, seeding and the posterior sample collection.
//! - [`ecdf`]: step CDFs, exact L1 distances, Kolmogorov–Smirnov distance and
//!   DKW bands.
//! - [`reference`]: closed-form CDFs (Beta, Gamma, ...) and the concentration
//!   bounds that govern convergence.
//! - [`deep`]: the classification variant, with a small softmax network that
//!   is retrained from scratch after every pseudo-labelled append.
//! - [`experiment`]: reproducible experiment runners that emit CSV/JSON
//!   artifacts, used by the `igmc` command-line tool.
//!
//! ```
//! use igmc::{engine, generative::{Bernoulli, SampleSet, Support}, IgmcConfig};
//!
//! let observed = SampleSet::binary_counts(9, 4).unwrap();
//! let config = IgmcConfig::new(200, 100, 7).unwrap();
//! let posterior = engine::run_igmc(&observed, &Bernoulli, &config).unwrap();
//! assert_eq!(posterior.mus().len(), 200);
//! assert!(posterior.mus().iter().all(|mu| (0.0..=1.0).contains(mu)));
//! # let _ = Support::Binary;
//! ```

pub mod deep;
pub mod ecdf;
pub mod engine;
mod error;
pub mod experiment;
pub mod generative;
pub mod reference;
pub mod seeding;
pub mod special;

pub use ecdf::{Cdf, EmpiricalCdf, Interval};
pub use engine::{IgmcConfig, PosteriorSamples};
pub use error::{Error, Result};
pub use generative::{GenerativeApproach, GenerativeModel, SampleSet, Support};
