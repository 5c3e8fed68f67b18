//! Discrete Lichnerowicz spectrum: stability, kernel, strong positivity and
//! the Hardy constant.

pub mod banded;
pub mod eigen;
pub mod hardy;
pub mod matrix;

pub use hardy::{hardy_constant, HardyResult};
pub use matrix::{assemble, assemble_scaled, OperatorMatrix};

use crate::error::{Error, Result};
use crate::geometry::TensorField;
use crate::operators::grid::Discretization;
use eigen::dot;

/// Fixed seed of every randomized start block.
pub const SEED: u64 = 0x5eed;
/// Minimum ratio between the first non-kernel eigenvalue and the kernel cluster.
pub const GAP_RATIO: f64 = 10.0;

#[derive(Clone, Debug)]
pub struct KernelCandidate {
    pub eigenvalue: f64,
    /// Reduced coordinates, M-normalised.
    pub coords: Vec<f64>,
    pub field: TensorField,
    /// `‖tr h‖ / ‖h‖` in the weighted L² norm.
    pub trace_residual: f64,
    /// `‖div h‖ / ‖h‖`.
    pub div_residual: f64,
    /// Log–log slope of the pointwise norm over the outer third.
    pub decay_slope: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum KernelStatus {
    /// Cluster separated by at least [`GAP_RATIO`].
    Resolved { gap_ratio: f64 },
    /// No clean separation between near-zero and nonzero eigenvalues.
    Ambiguous { gap_ratio: f64 },
}

#[derive(Clone, Debug)]
pub struct KernelSlice {
    pub status: KernelStatus,
    pub candidates: Vec<KernelCandidate>,
}

impl KernelSlice {
    pub fn dim(&self) -> usize {
        self.candidates.len()
    }
    pub fn is_ambiguous(&self) -> bool {
        matches!(self.status, KernelStatus::Ambiguous { .. })
    }
    pub fn coords(&self) -> Vec<Vec<f64>> {
        self.candidates.iter().map(|c| c.coords.clone()).collect()
    }
}

#[derive(Clone, Debug)]
pub struct SpectralResult {
    /// Lowest eigenvalues of `−L`, nondecreasing.
    pub eigenvalues: Vec<f64>,
    /// Reduced coordinates of the eigenfields, M-orthonormal.
    pub coords: Vec<Vec<f64>>,
    pub eigenfields: Vec<TensorField>,
    /// `‖(−L)v − λv‖ / ‖v‖`.
    pub residuals: Vec<f64>,
    pub kernel: Option<KernelSlice>,
    pub alpha: Option<f64>,
}

impl SpectralResult {
    pub fn lambda_min(&self) -> f64 {
        self.eigenvalues[0]
    }
    /// Smallest eigenvalue outside the kernel cluster.
    pub fn first_nonzero(&self) -> Option<f64> {
        let k = self.kernel.as_ref().map_or(0, KernelSlice::dim);
        self.eigenvalues.get(k).copied()
    }
}

/// The `m` lowest eigenpairs of `−L` represented by `a`.
pub fn lowest_eigenpairs(a: &OperatorMatrix, disc: &Discretization, m: usize) -> Result<SpectralResult> {
    if m == 0 {
        return Err(Error::InvalidInput("need m >= 1 eigenpairs".into()));
    }
    let e = eigen::lowest(&a.k, &a.lowrank, &a.mass, m.min(a.dofs()), SEED)?;
    let eigenfields = e.vectors.iter().map(|v| a.to_field(disc, v)).collect();
    Ok(SpectralResult {
        eigenvalues: e.values,
        coords: e.vectors,
        eigenfields,
        residuals: e.residuals,
        kernel: None,
        alpha: None,
    })
}

/// Splits off the near-zero cluster `|λ| ≤ tol_kern` and measures each
/// candidate's TT residuals and decay.
pub fn kernel_basis(res: &SpectralResult, a: &OperatorMatrix, disc: &Discretization, tol_kern: f64) -> KernelSlice {
    let lam = &res.eigenvalues;
    let k = lam.iter().take_while(|l| l.abs() <= tol_kern).count();
    let gap_ratio = if k == lam.len() {
        0.0
    } else if k == 0 {
        lam[0] / tol_kern
    } else {
        lam[k] / lam[..k].iter().fold(f64::MIN_POSITIVE, |m, l| m.max(l.abs()))
    };
    let status =
        if gap_ratio >= GAP_RATIO { KernelStatus::Resolved { gap_ratio } } else { KernelStatus::Ambiguous { gap_ratio } };
    let candidates = (0..k)
        .map(|i| {
            let field = res.eigenfields[i].clone();
            let norm = a.norm(&res.coords[i]);
            let (tr, dv) = disc.trace_divergence(&field);
            let l2 = |u: &TensorField| disc.stiffness().mass.iter().zip(u.values()).map(|(m, v)| m * v * v).sum::<f64>().sqrt();
            KernelCandidate {
                eigenvalue: lam[i],
                coords: res.coords[i].clone(),
                trace_residual: l2(&tr) / norm,
                div_residual: l2(&dv) / norm,
                decay_slope: decay_slope(&field),
                field,
            }
        })
        .collect();
    KernelSlice { status, candidates }
}

/// Least-squares slope of `log|h|` against `log r` over the outer third,
/// skipping the Dirichlet node.
pub fn decay_slope(h: &TensorField) -> f64 {
    let grid = h.grid();
    let norm = h.pointwise_norm();
    let cut = grid.r_min() + (grid.r_max() - grid.r_min()) * 2.0 / 3.0;
    let pts: Vec<(f64, f64)> = (0..grid.len() - 1)
        .filter(|&i| grid.r(i) >= cut && grid.r(i) > 0.0 && norm[i] > 0.0)
        .map(|i| (grid.r(i).ln(), norm[i].ln()))
        .collect();
    fit_slope(&pts)
}

pub(crate) fn fit_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return f64::NAN;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Strong-positivity constant: the smallest generalized eigenvalue of
/// `(−L, −Δ)` on fields M-orthogonal to `kernel`. `rough` must share the
/// layout of `a` (same discretization, `curv = false`).
///
/// Computed as `1 − λ_max(C⁻¹ D C⁻ᵀ)` with `−Δ = CCᵀ` and `D = (−Δ) − (−L)`.
/// A value `≤ 0` is an instability finding, not an error.
pub fn strong_positivity_alpha(a: &OperatorMatrix, rough: &OperatorMatrix, kernel: &[Vec<f64>]) -> Result<f64> {
    if a.dofs() != rough.dofs() {
        return Err(Error::InvalidInput("operator layouts differ".into()));
    }
    if !rough.lowrank.is_empty() {
        return Err(Error::InvalidInput("rough Laplacian must be purely banded".into()));
    }
    let chol = rough.k.cholesky()?;
    let n = a.dofs();
    // Constraint directions C⁻¹ M k, orthonormalised.
    let mut z: Vec<Vec<f64>> = Vec::new();
    for k in kernel {
        let mk: Vec<f64> = k.iter().zip(&a.mass).map(|(x, m)| x * m).collect();
        let mut v = chol.forward(&mk);
        for _ in 0..2 {
            for q in &z {
                let d = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(x, y)| *x -= d * y);
            }
        }
        let nv = dot(&v, &v).sqrt();
        if nv > 0.0 {
            v.iter_mut().for_each(|x| *x /= nv);
            z.push(v);
        }
    }
    let op = |y: &[f64]| {
        let h = chol.backward(y);
        let kd = rough.apply_k(&h);
        let kl = a.apply_k(&h);
        let d: Vec<f64> = kd.iter().zip(&kl).map(|(p, q)| p - q).collect();
        chol.forward(&d)
    };
    let (top, _) = eigen::lanczos_max(op, n, &z, SEED);
    Ok(1.0 - top)
}
