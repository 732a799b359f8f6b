//! Numerical checks around random coverings of the circle.
//!
//! * [`sequences`]: capped arc-length families and the integration window.
//! * [`shepp`]: the pair factors, their exact product integral, the growth
//!   function and the divergence certificate, and the covering-criterion series.
//! * [`chebyshev`]: the Chebyshev integral inequality for commonly monotone
//!   piecewise-linear functions.
//! * [`covering`]: Monte Carlo simulation of arcs tossed on the circle.

pub mod chebyshev;
pub mod covering;
pub mod error;
pub mod numerics;
pub mod rng;
pub mod sequences;
pub mod shepp;

pub use error::{Error, Result};
pub use sequences::LengthSequence;
