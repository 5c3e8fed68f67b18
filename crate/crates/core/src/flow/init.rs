//! Initial-data families.

use crate::geometry::background::BackgroundMetric;
use crate::geometry::TensorField;
use crate::operators::grid::Discretization;

#[derive(Clone, Debug, PartialEq)]
pub enum InitialData {
    /// `amp·exp(−((r−center)/width)²)·g0` (conformal, radial).
    Gaussian { amp: f64, width: f64, center: f64 },
    /// Traceless bump compatible with the inner regularity constraint.
    TracelessBump { amp: f64, width: f64, center: f64 },
    /// `amp·(1 + (r/width)²)^{−n/4}·g0`: borderline L² data whose heat flow
    /// saturates the `t^{−n/4}` rate.
    SlowTail { amp: f64, width: f64 },
    /// `amp·w·(1 + r²)^{−power/2}·(1 − (r/r_max)²)` with traceless weights
    /// `w`; for `power < n` the kernel component exceeds the data near the
    /// inner end, so the flow drifts away from `g0`.
    TracelessTail { amp: f64, power: f64 },
    /// `amp·g0` inside `r < radius`, zero outside (a jump).
    Step { amp: f64, radius: f64 },
    /// `amp·k/‖k‖_∞` for a supplied kernel field `k`.
    Kernel { amp: f64, field: TensorField },
    Zero,
}

/// Block weights of a traceless tensor obeying the inner constraint.
pub fn traceless_weights(g0: &BackgroundMetric) -> Vec<f64> {
    let m = g0.block_mults();
    match m.len() {
        // rr, link (sphere): 1·a + (n−1)·b = 0.
        2 => vec![1.0, -1.0 / m[1] as f64],
        // rr, 11=22, 33: rr = 33 at the bolt.
        _ => vec![1.0, -1.0, 1.0],
    }
}

impl InitialData {
    pub fn sample(&self, disc: &Discretization) -> TensorField {
        let g0 = disc.g0();
        let n = g0.dim() as f64;
        let nb = disc.blocks();
        let tw = traceless_weights(g0);
        let mut h = match self {
            InitialData::Gaussian { amp, width, center } => {
                TensorField::from_fn(disc.grid_arc().clone(), g0, |r, _| amp * (-((r - center) / width).powi(2)).exp())
            }
            InitialData::TracelessBump { amp, width, center } => TensorField::from_fn(disc.grid_arc().clone(), g0, |r, b| {
                amp * tw[b] * (-((r - center) / width).powi(2)).exp()
            }),
            InitialData::SlowTail { amp, width } => TensorField::from_fn(disc.grid_arc().clone(), g0, |r, _| {
                amp * (1.0 + (r / width).powi(2)).powf(-n / 4.0)
            }),
            InitialData::TracelessTail { amp, power } => {
                let rmax = disc.grid().r_max();
                TensorField::from_fn(disc.grid_arc().clone(), g0, |r, b| {
                    amp * tw[b] * (1.0 + r * r).powf(-power / 2.0) * (1.0 - (r / rmax).powi(2))
                })
            }
            InitialData::Step { amp, radius } => {
                TensorField::from_fn(disc.grid_arc().clone(), g0, |r, _| if r < *radius { *amp } else { 0.0 })
            }
            InitialData::Kernel { amp, field } => {
                let m = field.max_abs();
                field.scaled(if m > 0.0 { amp / m } else { 0.0 })
            }
            InitialData::Zero => disc.zeros(),
        };
        let last = disc.grid().len() - 1;
        for b in 0..nb {
            h.set(last, b, 0.0);
        }
        disc.stiffness().enforce_inner(h.values_mut());
        h
    }
}
