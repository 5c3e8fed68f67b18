//! Weighted Lebesgue/Sobolev norms and the asymptotic volume ratio.

use super::background::BackgroundMetric;
use super::fd::{extrapolate_first, Stencils};
use super::field::{FieldKind, TensorField};
use super::grid::RadialGrid;
use super::quad::integrate;
use super::WeightSpec;
use crate::error::{invalid, Result};
use crate::operators::dense::derivative_norms;
use crate::operators::frame::{background_coeffs, jet, Profile, R};
use crate::operators::pointwise::slot_jets;

/// `|u|, |∇u|, |∇²u|` at every node (g0 covariant derivatives).
pub fn derivative_norms_on_grid(u: &TensorField, g0: &BackgroundMetric) -> Result<Vec<[f64; 3]>> {
    u.check_finite()?;
    let grid = u.grid();
    let n = grid.len();
    let st = Stencils::new(grid);
    let nb = u.blocks();
    let start = if g0.inner(grid) == super::Inner::Boundary { 0 } else { 1 };
    let vals = u.pointwise_norm();
    let mut d1 = vec![0.0; n];
    let mut d2 = vec![0.0; n];
    for i in start..n {
        let r = grid.r(i);
        let mut blocks = [jet(0.0, 0.0, 0.0); R];
        for b in 0..nb {
            let (a, c) = st.derivs(u.values(), nb, b, i);
            blocks[b] = jet(u.values()[i * nb + b], a, c);
        }
        match u.kind() {
            FieldKind::Tensor => {
                let p = Profile::background(g0, r);
                let jets = slot_jets(&p.shape, &blocks[..nb]);
                let (a, b) = derivative_norms(g0, &background_coeffs(g0, r), &jets);
                d1[i] = a.sqrt();
                d2[i] = b.sqrt();
            }
            FieldKind::Scalar => {
                let p = Profile::background(g0, r);
                let (f, df) = (p.a.re, p.a.eps);
                let (du, ddu) = (blocks[0].re.eps, blocks[0].eps.eps);
                d1[i] = du.abs() / f;
                let mut h2 = (ddu / (f * f) - df * du / (f * f * f)).powi(2);
                for k in 0..p.shape.reps {
                    h2 += p.shape.mult[k + 1] as f64 * (p.k[k].re * du / f).powi(2);
                }
                d2[i] = h2.sqrt();
            }
        }
    }
    if start == 1 {
        extrapolate_first(grid.nodes(), &mut d1, 1, 0);
        extrapolate_first(grid.nodes(), &mut d2, 1, 0);
        d1[0] = d1[0].max(0.0);
        d2[0] = d2[0].max(0.0);
    }
    Ok((0..n).map(|i| [vals[i], d1[i], d2[i]]).collect())
}

/// Trapezoid weights times the Riemannian density.
pub fn volume_weights(g0: &BackgroundMetric, grid: &RadialGrid) -> Vec<f64> {
    grid.trapezoid_weights().iter().zip(grid.nodes()).map(|(w, &r)| w * g0.volume_density(r)).collect()
}

/// `‖u‖_{W^{k,p}_δ} = Σ_{l≤k} ‖∇^l u‖_{L^p_{δ−l}}`, with
/// `‖v‖_{L^p_δ} = (∫ |ρ^{−δ} v|^p ρ^{−n} dμ)^{1/p}`; `p = ∞` takes the sup of
/// `ρ^{−δ+l}|∇^l u|` over nodes and `l ≤ k`.
pub fn weighted_norm(u: &TensorField, spec: WeightSpec, g0: &BackgroundMetric) -> Result<f64> {
    if !(spec.p >= 1.0) {
        return invalid(format!("p must be >= 1, got {}", spec.p));
    }
    if spec.k > 2 {
        return invalid("derivative order above 2 is not supported");
    }
    u.check_finite()?;
    let grid = u.grid();
    let rho = g0.rho(grid);
    let norms = if spec.k == 0 {
        u.pointwise_norm().into_iter().map(|v| [v, 0.0, 0.0]).collect()
    } else {
        derivative_norms_on_grid(u, g0)?
    };
    let n = g0.dim() as f64;
    if spec.p.is_infinite() {
        let mut m: f64 = 0.0;
        for (j, row) in norms.iter().enumerate() {
            for (l, v) in row.iter().enumerate().take(spec.k + 1) {
                m = m.max(rho[j].powf(-spec.delta + l as f64) * v);
            }
        }
        return Ok(m);
    }
    let w = volume_weights(g0, grid);
    let mut total = 0.0;
    for l in 0..=spec.k {
        let d = spec.delta - l as f64;
        let s: f64 = norms.iter().enumerate().map(|(j, row)| w[j] * (rho[j].powf(-d) * row[l]).powf(spec.p) * rho[j].powf(-n)).sum();
        total += s.powf(1.0 / spec.p);
    }
    Ok(total)
}

/// Asymptotic volume ratio `lim Vol B(s)/sⁿ`, extrapolated in `1/s`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvrEstimate {
    pub value: f64,
    /// Relative change between the extrapolated value and the raw ratio at `r_max`.
    pub residual: f64,
    /// Set when the residual exceeds 10%.
    pub flagged: bool,
}

pub fn avr_estimate(g0: &BackgroundMetric, grid: &RadialGrid) -> Result<AvrEstimate> {
    g0.validate_grid(grid)?;
    let n = g0.dim() as i32;
    let r0 = grid.r_min();
    let s = g0.distances(grid);
    // Densities are polynomial in r (r³/8 down to the bolt), so one Gauss
    // panel is exact.
    let vol_to = |r: f64| integrate(r0, r, |x| g0.volume_density(x));
    let last = grid.len() - 1;
    let half = grid.nearest(0.5 * (r0 + grid.r_max()));
    if half == 0 || half == last {
        return invalid("grid too short for a volume-ratio estimate");
    }
    let (s1, s2) = (s[last], s[half]);
    let q1 = vol_to(grid.r(last)) / s1.powi(n);
    let q2 = vol_to(grid.r(half)) / s2.powi(n);
    let value = (s1 * q1 - s2 * q2) / (s1 - s2);
    let residual = ((value - q1) / value).abs();
    Ok(AvrEstimate { value, residual, flagged: residual > 0.1 })
}
