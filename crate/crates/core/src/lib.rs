//! Exact self-intersection numbers of Hirzebruch-Zagier curves on Hilbert
//! modular surfaces over Q(sqrt p), the explicit lower bounds derived for
//! them, and an audit harness comparing the two.

pub mod arith;
pub mod bounds;
pub mod classnum;
pub mod error;
pub mod hz;
pub mod quad;
pub mod rational;
pub mod scan;
pub mod surface;
pub mod verify;

pub use arith::BoundConstants;
pub use classnum::{ClassNumberCache, Discriminant};
pub use error::{Error, Result};
pub use hz::{HzParams, HzSurface, SelfIntersection, TnOptions};
pub use quad::{FundamentalUnit, QuadElement};
pub use rational::Rational;
