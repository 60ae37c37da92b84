//! Band-traversal tour heuristics for uniform random points in the unit
//! square, together with the machinery to turn them into statements about the
//! Euclidean TSP constant:
//!
//! * [`sampling`]: reproducible, splittable random streams and the band-local
//!   random variates (exponential gaps, uniform heights, Rayleigh neighbours).
//! * [`tuple_geometry`]: fixed-endpoint shortest paths through a `(k+1)`-tuple.
//! * [`crossover`]: the band-crossing 2-cycle alternative.
//! * [`estimator`]: deterministic parallel Monte Carlo estimates.
//! * [`concentration`]: closed-form deviation radii for those estimates.
//! * [`certifier`]: the rigorous lower bound on the crossover improvement and
//!   the classical three-point integral.
//! * [`tour`]: an end-to-end tour builder on concrete point sets.
//! * [`verify`]: the numerical property suite behind `bandtsp verify`.

pub mod certifier;
pub mod concentration;
pub mod crossover;
mod error;
pub mod estimator;
pub mod exec;
pub mod path;
pub mod sampling;
pub mod stats;
pub mod tour;
pub mod tuple_geometry;
pub mod verify;

pub use error::{Error, Result};
