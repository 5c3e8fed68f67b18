//! Ricci–DeTurck flow on cohomogeneity-one ALE Ricci-flat backgrounds.
//!
//! Every field depends on the radial coordinate only and is expressed in the
//! orthonormal invariant frame of the background `g0`. The pointwise frame
//! calculus (`operators::frame`, `operators::dense`, `operators::pointwise`)
//! is generic over [`Real`], so radial derivatives of any operator output
//! can be taken exactly with nested [`Dual`] numbers. Grid, spectral and
//! flow layers work in `f64`.

pub mod error;
pub mod flow;
pub mod geometry;
pub mod operators;
pub mod scalar;
pub mod spectral;

pub use error::{Error, Result};
pub use scalar::{Dual, Jet2, Real};

pub use geometry::{BackgroundKind, BackgroundMetric, RadialGrid, TensorField, WeightSpec};

/// Second-order jet carried as a nested dual number.
pub type J2<T> = Dual<Dual<T>>;
/// Frame profile of a metric at one radius, in double precision.
pub type Profile64 = operators::frame::Profile<f64>;
/// Single-precision profile, for cheap sweeps.
pub type Profile32 = operators::frame::Profile<f32>;
/// Connection and curvature data at one node, in double precision.
pub type GeometryData64 = operators::dense::GeometryData<f64>;
