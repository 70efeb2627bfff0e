//! Analytical and stochastic machinery for n-type Markov branching
//! processes with immigration and resurrection.
//!
//! The library computes extinction probabilities and mean extinction times,
//! recurrence/ergodicity classifications, decay parameters, invariant
//! measures and quasi-stationary distributions for continuous-time
//! multi-type branching processes whose q-matrix is factored into an
//! immigration family, a resurrection family, and one branch family per
//! type. Every analytic quantity can be cross-checked against an exact
//! event-driven simulator ([`simulate`]) and a truncated-generator
//! uniformization oracle ([`oracle`]).
//!
//! The one-dimensional reduction behind the analytic formulas is a
//! characteristic curve through the branching generating functions
//! ([`curve`]); the decisive improper integrals along it are classified by
//! tail-exponent analysis ([`num::quad`]).

pub mod classify;
pub mod curve;
pub mod decay;
pub mod error;
pub mod extinction;
pub mod fixtures;
pub mod index;
pub mod model;
pub mod modelfile;
pub mod num;
pub mod oracle;
pub mod rates;
pub mod simulate;

pub use error::{Error, Result};
pub use index::MultiIndex;
pub use model::{validate, GenFn, ModelSpec, Resurrection, ValidatedModel};
pub use rates::{RateDistribution, RateKind};
