//! Connection, curvature, DeTurck field, Lichnerowicz Laplacian and the
//! Ricci–DeTurck right-hand side on the invariant sector.

pub mod dense;
pub mod discrete;
pub mod frame;
pub mod grid;
pub mod pointwise;
pub mod radial;
