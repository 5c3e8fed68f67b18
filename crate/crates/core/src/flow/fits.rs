//! Exponent fits and inequality checks over diagnostics.

use super::{Diagnostics, Snapshot};
use crate::error::{Error, Result};
use crate::operators::grid::Discretization;

#[derive(Clone, Debug, PartialEq)]
pub struct Fit {
    pub exponent: f64,
    pub constant: f64,
    /// RMS residual of the log–log fit.
    pub residual: f64,
    pub samples: usize,
}

/// Least-squares `y ≈ C t^p` over `(t, y)` with `t` in `window`.
pub fn power_fit(pts: &[(f64, f64)], window: (f64, f64), min_decades: f64, min_samples: usize) -> Result<Fit> {
    let sel: Vec<(f64, f64)> = pts
        .iter()
        .filter(|(t, y)| *t >= window.0 * (1.0 - 1e-12) && *t <= window.1 * (1.0 + 1e-12) && *t > 0.0 && *y > 0.0)
        .map(|(t, y)| (t.ln(), y.ln()))
        .collect();
    let span = if sel.is_empty() {
        0.0
    } else {
        (sel.last().unwrap().0 - sel[0].0) / std::f64::consts::LN_10
    };
    if sel.len() < min_samples || span < min_decades - 1e-9 {
        return Err(Error::InvalidInput(format!(
            "insufficient dynamic range: {} samples over {span:.2} decades (need {min_samples} over {min_decades})",
            sel.len()
        )));
    }
    let n = sel.len() as f64;
    let mx = sel.iter().map(|p| p.0).sum::<f64>() / n;
    let my = sel.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = sel.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = sel.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let slope = sxy / sxx;
    let icpt = my - slope * mx;
    let residual = (sel.iter().map(|p| (p.1 - icpt - slope * p.0).powi(2)).sum::<f64>() / n).sqrt();
    Ok(Fit { exponent: slope, constant: icpt.exp(), residual, samples: sel.len() })
}

/// Decay exponent of `‖h‖_∞` (whole manifold) or of `‖h‖_{L∞(M∖B(√t))}`.
pub fn decay_fit(diag: &Diagnostics, window: (f64, f64), whole_manifold: bool) -> Result<Fit> {
    let pts = diag.column(|s| if whole_manifold { s.linf } else { s.linf_outside });
    power_fit(&pts, window, 2.0, 10)
}

/// Slope of `‖∇^k h‖_∞` against `t`, `k ∈ {1, 2}`.
pub fn smoothing_fit(diag: &Diagnostics, window: (f64, f64), k: usize) -> Result<Fit> {
    let pts = match k {
        1 => diag.column(|s| s.grad_linf),
        2 => diag.column(|s| s.hess_linf),
        _ => return Err(Error::InvalidInput(format!("derivative order must be 1 or 2, got {k}"))),
    };
    power_fit(&pts, window, 1.5, 5)
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeanValueRow {
    pub t: f64,
    pub r: f64,
    /// `sup_{P(t, r/2)} |h|²`.
    pub lhs: f64,
    /// `∫_{P(t, r)} |h|²`.
    pub integral: f64,
    /// `lhs · r^{n+2} / integral`; `None` when vacuous or skipped.
    pub implied: Option<f64>,
    pub notice: Option<String>,
}

/// Parabolic mean-value check at infinity over `P(t, r) = (M∖B(r)) × (t − r², t]`.
pub fn meanvalue_check(disc: &Discretization, snaps: &[Snapshot], t: f64, radii: &[f64]) -> Vec<MeanValueRow> {
    let dist = disc.g0().distances(disc.grid());
    let mass = &disc.stiffness().mass;
    let n = disc.g0().dim() as i32;
    let tol = 1e-9 * t.max(1.0);
    radii
        .iter()
        .map(|&r| {
            let mut row = MeanValueRow { t, r, lhs: 0.0, integral: 0.0, implied: None, notice: None };
            if r >= t.sqrt() {
                row.notice = Some(format!("skipped: r = {r} is not below sqrt(t) = {}", t.sqrt()));
                return row;
            }
            let mut win: Vec<&Snapshot> = snaps.iter().filter(|s| s.t >= t - r * r - tol && s.t <= t + tol).collect();
            win.sort_by(|a, b| a.t.total_cmp(&b.t));
            if win.len() < 3 || win[0].t > t - r * r + tol || win.last().unwrap().t < t - tol {
                row.notice = Some("skipped: snapshots do not cover (t − r², t]".into());
                return row;
            }
            let sq = |s: &Snapshot| -> Vec<f64> { s.h.pointwise_norm().into_iter().map(|x| x * x).collect() };
            for s in win.iter().filter(|s| s.t > t - r * r / 4.0 + tol || (s.t - t).abs() <= tol) {
                for (v, d) in sq(s).iter().zip(&dist) {
                    if *d >= r / 2.0 {
                        row.lhs = row.lhs.max(*v);
                    }
                }
            }
            let space = |s: &Snapshot| -> f64 { sq(s).iter().zip(&dist).zip(mass).filter(|((_, d), _)| **d >= r).map(|((v, _), m)| v * m).sum() };
            for w in win.windows(2) {
                row.integral += 0.5 * (w[1].t - w[0].t) * (space(w[0]) + space(w[1]));
            }
            if row.integral > 0.0 && row.lhs > 0.0 {
                row.implied = Some(row.lhs * r.powi(n + 2) / row.integral);
            } else {
                row.notice = Some("vacuous: h vanishes on the cylinder".into());
            }
            row
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct Monotonicity {
    /// Largest `d/dt‖h − h0‖²` over samples with `t ≥ t_from`.
    pub max_excursion: f64,
    pub flagged: bool,
    /// `‖∂_t h0‖ / ‖∇(h − h0)‖²` statistics (`None` without kernel tracking).
    pub modulation_max: Option<f64>,
    pub modulation_median: Option<f64>,
    /// Smallest `C ≥ 0` with `‖h(t)‖ ≤ e^{Ct}‖h(0)‖` on every sample.
    pub growth_constant: f64,
}

pub fn monotonicity_report(diag: &Diagnostics, t_from: f64, tol_mono: f64) -> Monotonicity {
    let s = &diag.samples;
    let mut max_excursion = f64::NEG_INFINITY;
    for w in s.windows(2) {
        if w[0].t >= t_from && w[1].t > w[0].t {
            let d = (w[1].perp_l2.powi(2) - w[0].perp_l2.powi(2)) / (w[1].t - w[0].t);
            max_excursion = max_excursion.max(d);
        }
    }
    let mut ratios: Vec<f64> = s
        .iter()
        .filter(|x| x.t > 0.0 && x.grad_perp_l2 > 0.0 && x.dh0_l2 > 0.0)
        .map(|x| x.dh0_l2 / x.grad_perp_l2.powi(2))
        .collect();
    ratios.sort_by(f64::total_cmp);
    let (modulation_max, modulation_median) =
        if ratios.is_empty() { (None, None) } else { (ratios.last().copied(), Some(ratios[ratios.len() / 2])) };
    let mut growth_constant: f64 = 0.0;
    if let Some(first) = s.first() {
        for x in s.iter().filter(|x| x.t > first.t && first.l2 > 0.0 && x.l2 > 0.0) {
            growth_constant = growth_constant.max((x.l2 / first.l2).ln() / (x.t - first.t));
        }
    }
    Monotonicity {
        max_excursion,
        flagged: max_excursion > tol_mono,
        modulation_max,
        modulation_median,
        growth_constant,
    }
}
