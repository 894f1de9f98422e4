//! Quadrature, summation, extrapolation and ODE building blocks.

pub mod accel;
mod dop853_tableau;
pub mod ode;
pub mod quad;
pub mod scaled;
pub mod special;
pub mod sum;

pub use accel::WynnEpsilon;
pub use quad::{CompositeRule, QuadBackend, QuadConfig, QuadResult};
pub use scaled::ScaledComplex;
