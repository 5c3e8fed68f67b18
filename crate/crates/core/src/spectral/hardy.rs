//! Sharp radial Hardy constant `sup ∫ r⁻²φ² / ∫|∇φ|²` on a grid.

use super::banded::SymBand;
use super::eigen;
use crate::error::{Error, Result};
use crate::geometry::background::{BackgroundMetric, Inner};
use crate::geometry::norms::avr_estimate;
use crate::geometry::quad::integrate;
use crate::geometry::RadialGrid;

/// AVR below which the Hardy hypothesis is treated as failed.
pub const AVR_MIN: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct HardyResult {
    pub constant: f64,
    /// Same quantity on the refined grid.
    pub refined: f64,
    /// `|C − C_refined| / C_refined`.
    pub refinement_residual: f64,
    pub avr: f64,
}

/// `1/μ_min` of the generalized problem `(−Δ, r⁻²)` on radial functions,
/// Dirichlet at `r_max` (and at `r_min` unless the inner end is a bolt).
pub fn hardy_constant(g0: &BackgroundMetric, grid: &RadialGrid) -> Result<HardyResult> {
    let avr = avr_estimate(g0, grid)?;
    if avr.value < AVR_MIN {
        return Err(Error::InvalidInput(format!("asymptotic volume ratio {:.3e} is not positive", avr.value)));
    }
    let constant = constant_on(g0, grid)?;
    let refined = constant_on(g0, &grid.refined())?;
    Ok(HardyResult { constant, refined, refinement_residual: (constant - refined).abs() / refined, avr: avr.value })
}

fn constant_on(g0: &BackgroundMetric, grid: &RadialGrid) -> Result<f64> {
    g0.validate_grid(grid)?;
    let n = grid.len();
    let vol = |r: f64| g0.volume_density(r);
    let edge: Vec<f64> = (0..n - 1)
        .map(|j| {
            let (a, b) = (grid.r(j), grid.r(j + 1));
            let m = 0.5 * (a + b);
            let f = g0.coeffs(m).f;
            vol(m) / (f * f * (b - a))
        })
        .collect();
    let first = if g0.inner(grid) == Inner::Bolt { 0 } else { 1 };
    let dofs = n - 1 - first;
    if dofs == 0 {
        return Err(Error::InvalidInput("grid too small for the Hardy problem".into()));
    }
    let mut k = SymBand::zeros(dofs, 1);
    let mut w = vec![0.0; dofs];
    for p in 0..dofs {
        let j = p + first;
        k.add_lower(p, p, edge[j] + if j > 0 { edge[j - 1] } else { 0.0 });
        if p > 0 {
            k.add_lower(p, p - 1, -edge[j - 1]);
        }
        let (a, b) = grid.cell(j);
        w[p] = integrate(a, b, |r| vol(r) / (r * r));
    }
    let e = eigen::lowest(&k, &[], &w, 1, super::SEED)?;
    Ok(1.0 / e.values[0])
}
