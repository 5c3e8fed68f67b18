//! Radial grids, ALE Ricci-flat backgrounds, invariant tensor fields and
//! weighted norms.

pub mod background;
pub mod fd;
pub mod field;
pub mod grid;
pub mod norms;
pub mod quad;

pub use background::{BackgroundKind, BackgroundMetric, Inner, Link};
pub use field::{FieldKind, TensorField};
pub use grid::RadialGrid;

/// Weighted-space exponents `(p, k, δ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightSpec {
    pub p: f64,
    pub k: usize,
    pub delta: f64,
}
