//! Per-sample norms of a flow state.

use super::{Flow, FlowState};
use crate::error::Result;
use crate::geometry::norms::derivative_norms_on_grid;
use crate::geometry::TensorField;

/// One diagnostic record. Field order is the CSV column order.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub l2: f64,
    pub linf: f64,
    /// `‖h‖_∞` outside the geodesic ball of radius `√t` about the base point.
    pub linf_outside: f64,
    pub grad_l2: f64,
    pub grad_linf: f64,
    pub perp_l2: f64,
    pub grad_perp_l2: f64,
    /// `(−L_{g0}(h − h0), h − h0)`.
    pub energy: f64,
    pub dh0_l2: f64,
    pub ric_linf: f64,
    pub deturck_linf: f64,
    pub hess_linf: f64,
    /// `‖∂_t h‖_{L²}`.
    pub dt_l2: f64,
}

impl Sample {
    pub const COLUMNS: [&'static str; 14] = [
        "t",
        "l2",
        "linf",
        "linf_outside",
        "grad_l2",
        "grad_linf",
        "perp_l2",
        "grad_perp_l2",
        "energy",
        "dh0_l2",
        "ric_linf",
        "deturck_linf",
        "hess_linf",
        "dt_l2",
    ];

    pub fn values(&self) -> [f64; 14] {
        [
            self.t,
            self.l2,
            self.linf,
            self.linf_outside,
            self.grad_l2,
            self.grad_linf,
            self.perp_l2,
            self.grad_perp_l2,
            self.energy,
            self.dh0_l2,
            self.ric_linf,
            self.deturck_linf,
            self.hess_linf,
            self.dt_l2,
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub samples: Vec<Sample>,
}

impl Diagnostics {
    pub fn push(&mut self, s: Sample) {
        self.samples.push(s);
    }
    pub fn len(&self) -> usize {
        self.samples.len()
    }
    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
    pub fn column(&self, f: impl Fn(&Sample) -> f64) -> Vec<(f64, f64)> {
        self.samples.iter().map(|s| (s.t, f(s))).collect()
    }
}

impl Flow {
    fn grad_norms(&self, h: &TensorField) -> Result<(f64, f64, f64)> {
        let d = derivative_norms_on_grid(h, self.disc.g0())?;
        let mass = &self.disc.stiffness().mass;
        let l2 = d.iter().zip(mass).map(|(x, m)| m * x[1] * x[1]).sum::<f64>().sqrt();
        let linf = d.iter().fold(0.0_f64, |a, x| a.max(x[1]));
        let hess = d.iter().fold(0.0_f64, |a, x| a.max(x[2]));
        Ok((l2, linf, hess))
    }

    pub fn sample(&self, s: &FlowState) -> Result<Sample> {
        let h = &s.h;
        let norm = h.pointwise_norm();
        let dist = self.disc.g0().distances(self.disc.grid());
        let rt = s.t.sqrt();
        let linf = norm.iter().fold(0.0_f64, |a, &b| a.max(b));
        let linf_outside = norm.iter().zip(&dist).filter(|(_, &d)| d >= rt).fold(0.0_f64, |a, (&b, _)| a.max(b));
        let (grad_l2, grad_linf, hess_linf) = self.grad_norms(h)?;
        let perp = h.axpy(-1.0, &s.h0);
        let (grad_perp_l2, _, _) = self.grad_norms(&perp)?;
        let kp = self.disc.stiffness().apply(perp.values(), true);
        let energy: f64 = kp.iter().zip(perp.values()).map(|(a, b)| a * b).sum();
        let f = self.rhs(h)?;
        let (df0, _) = self.project_kernel(&f);
        let (ric_linf, deturck_linf) = self.gauge(h)?;
        Ok(Sample {
            t: s.t,
            l2: self.l2(h),
            linf,
            linf_outside,
            grad_l2,
            grad_linf,
            perp_l2: self.l2(&perp),
            grad_perp_l2,
            energy,
            dh0_l2: self.l2(&df0),
            ric_linf,
            deturck_linf,
            hess_linf,
            dt_l2: self.l2(&f),
        })
    }
}
