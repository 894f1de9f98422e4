// Negated float comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod acceptance;
pub mod error;
pub mod estimates;
pub mod exec;
pub mod geometry;
pub mod kernels;
pub mod numeric;
pub mod propagator;
pub mod spherical;
pub mod symbolic;

pub use error::{Error, Result};
pub use exec::Execution;
pub use geometry::{Decay, GroupPoint, HTypeGroup, RadialFunction, SpaceParams};
pub use symbolic::ComplexTime;
