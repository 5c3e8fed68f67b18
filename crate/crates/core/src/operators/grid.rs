//! Grid-level operators on invariant fields.
//!
//! Second-order finite-difference jets feed the pointwise frame kernels;
//! Laplace-type operators use the conservative stiffness so that they agree
//! with the assembled spectral matrices. At a singular inner node (origin,
//! bolt) pointwise outputs are extrapolated from the next three nodes.

use super::dense::{self, GeometryData};
use super::discrete::Stiffness;
use super::frame::{background_coeffs, jet, Profile, Shape, R};
use super::pointwise::{self, Jets};
use crate::error::{Error, Result};
use crate::geometry::background::{BackgroundMetric, Coeffs, Inner};
use crate::geometry::fd::{extrapolate_first, Stencils};
use crate::geometry::{RadialGrid, TensorField};
use crate::scalar::Dual;
use crate::J2;
use std::sync::Arc;

/// Residual allowed for `Φ(ḡ)` when splitting around `ḡ`.
pub const STATIONARY_TOL: f64 = 1e-6;

/// Decomposition of the Ricci–DeTurck right-hand side around a stationary `ḡ`.
#[derive(Clone, Debug)]
pub struct RhsSplit {
    /// `L_ḡ h`.
    pub linear_part: TensorField,
    /// `−𝓛_{⟨h, Γ(ḡ) − Γ(g0)⟩} ḡ`.
    pub lie_part: TensorField,
    /// Everything else (at least quadratic in `h`).
    pub remainder: TensorField,
    pub total: TensorField,
}

impl RhsSplit {
    pub fn max_split_residual(&self) -> f64 {
        let mut m: f64 = 0.0;
        for (k, t) in self.total.values().iter().enumerate() {
            let s = self.linear_part.values()[k] + self.lie_part.values()[k] + self.remainder.values()[k];
            m = m.max((t - s).abs());
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct Discretization {
    stiff: Stiffness,
    st: Stencils,
    coeffs: Vec<Coeffs<J2<f64>>>,
    p0: Vec<Profile<f64>>,
    start: usize,
}

impl Discretization {
    pub fn new(g0: &BackgroundMetric, grid: Arc<RadialGrid>) -> Result<Self> {
        if grid.len() < 4 {
            return Err(Error::InvalidInput("grid needs at least 4 nodes".into()));
        }
        let stiff = Stiffness::new(g0, grid.clone())?;
        let start = if stiff.inner == Inner::Boundary { 0 } else { 1 };
        let st = Stencils::new(&grid);
        let mut coeffs = Vec::with_capacity(grid.len());
        let mut p0 = Vec::with_capacity(grid.len());
        for (i, &r) in grid.nodes().iter().enumerate() {
            // The singular node carries the next node's data; it is never read.
            let rr = if i < start { grid.r(start) } else { r };
            coeffs.push(background_coeffs(g0, rr));
            p0.push(Profile::background(g0, rr));
        }
        Ok(Self { stiff, st, coeffs, p0, start })
    }

    pub fn g0(&self) -> &BackgroundMetric {
        &self.stiff.g0
    }
    pub fn grid(&self) -> &RadialGrid {
        &self.stiff.grid
    }
    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.stiff.grid
    }
    pub fn stiffness(&self) -> &Stiffness {
        &self.stiff
    }
    pub fn stencils(&self) -> &Stencils {
        &self.st
    }
    pub fn shape(&self) -> Shape {
        self.stiff.shape
    }
    pub fn blocks(&self) -> usize {
        self.stiff.mults.len()
    }
    pub fn inner(&self) -> Inner {
        self.stiff.inner
    }
    /// First node at which pointwise kernels are evaluated.
    pub fn first_regular(&self) -> usize {
        self.start
    }
    pub fn background_profile(&self, i: usize) -> &Profile<f64> {
        &self.p0[i]
    }
    pub fn background_coeffs(&self, i: usize) -> &Coeffs<J2<f64>> {
        &self.coeffs[i]
    }

    pub fn zeros(&self) -> TensorField {
        TensorField::zeros(self.grid_arc().clone(), self.g0())
    }

    pub fn tensor(&self, values: Vec<f64>) -> TensorField {
        TensorField::from_values(self.grid_arc().clone(), self.stiff.mults.clone(), values).expect("length")
    }

    fn scalar(&self, values: Vec<f64>) -> TensorField {
        TensorField::scalar(self.grid_arc().clone(), values).expect("length")
    }

    /// Slot jets of a node-major block array at node `i`.
    pub fn jets(&self, h: &[f64], nb: usize, i: usize) -> Jets<f64> {
        let mut blocks = [jet(0.0, 0.0, 0.0); R];
        for (b, out) in blocks.iter_mut().enumerate().take(nb) {
            let (d1, d2) = self.st.derivs(h, nb, b, i);
            *out = jet(h[i * nb + b], d1, d2);
        }
        pointwise::slot_jets(&self.shape(), &blocks[..nb])
    }

    /// Evaluates a slot-valued kernel at every regular node.
    fn map_tensor<F>(&self, h: &[f64], nb_in: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(usize, &Jets<f64>) -> Result<[f64; R]>,
    {
        let n = self.grid().len();
        let shape = self.shape();
        let nb = self.blocks();
        let mut out = vec![0.0; n * nb];
        for i in self.start..n {
            let v = f(i, &self.jets(h, nb_in, i))?;
            for b in 0..nb {
                out[i * nb + b] = v[shape.block_rep(b)];
            }
        }
        if self.start == 1 {
            for b in 0..nb {
                extrapolate_first(self.grid().nodes(), &mut out, nb, b);
            }
        }
        Ok(out)
    }

    fn map_scalar<F>(&self, h: &[f64], nb_in: usize, f: F) -> Result<Vec<f64>>
    where
        F: Fn(usize, &Jets<f64>) -> Result<f64>,
    {
        let n = self.grid().len();
        let mut out = vec![0.0; n];
        for i in self.start..n {
            out[i] = f(i, &self.jets(h, nb_in, i))?;
        }
        if self.start == 1 {
            extrapolate_first(self.grid().nodes(), &mut out, 1, 0);
        }
        Ok(out)
    }

    /// Errors at the first node where `g0 + h` is not positive definite.
    pub fn check_metric(&self, h: &TensorField) -> Result<()> {
        h.check_finite()?;
        let nb = h.blocks();
        for i in 0..self.grid().len() {
            if h.node(i).iter().any(|&x| !(1.0 + x > 0.0)) {
                return Err(Error::NotPositiveDefinite { node: i, r: self.grid().r(i) });
            }
            let _ = nb;
        }
        Ok(())
    }

    /// Conservative Lichnerowicz Laplacian `L_{g0} h` (zero at the Dirichlet node).
    pub fn lichnerowicz(&self, h: &TensorField) -> TensorField {
        self.tensor(self.stiff.operator(h.values(), true))
    }

    /// Conservative rough Laplacian.
    pub fn rough_laplacian(&self, h: &TensorField) -> TensorField {
        self.tensor(self.stiff.operator(h.values(), false))
    }

    /// Conservative scalar Laplacian.
    pub fn scalar_laplacian(&self, u: &TensorField) -> TensorField {
        self.scalar(self.stiff.scalar_laplacian(u.values()))
    }

    /// Finite-difference Lichnerowicz Laplacian through the pointwise kernel.
    pub fn lichnerowicz_pointwise(&self, h: &TensorField) -> TensorField {
        let v = self.map_tensor(h.values(), h.blocks(), |i, j| Ok(pointwise::lichnerowicz(&self.p0[i], j)));
        self.tensor(v.expect("infallible"))
    }

    /// Finite-difference scalar Laplacian through the pointwise kernel.
    pub fn scalar_laplacian_pointwise(&self, u: &TensorField) -> TensorField {
        let v = self.map_scalar(u.values(), 1, |i, j| Ok(pointwise::scalar_laplacian(&self.p0[i], &j[0])));
        self.scalar(v.expect("infallible"))
    }

    pub fn trace(&self, h: &TensorField) -> TensorField {
        self.scalar(h.trace())
    }

    /// Radial component of `div_{g0} h`.
    pub fn divergence(&self, h: &TensorField) -> TensorField {
        let v = self.map_scalar(h.values(), h.blocks(), |i, j| Ok(pointwise::divergence(&self.p0[i], j)));
        self.scalar(v.expect("infallible"))
    }

    pub fn trace_divergence(&self, h: &TensorField) -> (TensorField, TensorField) {
        (self.trace(h), self.divergence(h))
    }

    /// `Ric(g0 + h)` in the `g0` frame.
    pub fn ricci(&self, h: &TensorField) -> Result<TensorField> {
        self.check_metric(h)?;
        let shape = self.shape();
        let v = self.map_tensor(h.values(), h.blocks(), |i, j| Ok(pointwise::ricci_metric(shape, &self.coeffs[i], j)))?;
        Ok(self.tensor(v))
    }

    /// Ricci of the background from sampled frame coefficients (no analytic
    /// derivatives).
    pub fn ricci_background_fd(&self) -> TensorField {
        let g = self.grid();
        let n = g.len();
        let reps = self.g0().reps();
        let stride = 1 + reps;
        let mut samples = vec![0.0; n * stride];
        for i in self.start..n {
            let c = self.g0().coeffs(g.r(i));
            samples[i * stride] = c.f;
            for k in 0..reps {
                samples[i * stride + 1 + k] = c.w[k];
            }
        }
        let shape = self.shape();
        let nb = self.blocks();
        let st = Stencils::new_from(g, self.start);
        let mut out = vec![0.0; n * nb];
        for i in self.start..n {
            let take = |k: usize| {
                let (d1, d2) = st.derivs(&samples, stride, k, i);
                jet(samples[i * stride + k], d1, d2)
            };
            let a = take(0);
            let mut b = [jet(1.0, 0.0, 0.0); 3];
            for (k, bk) in b.iter_mut().enumerate().take(reps) {
                *bk = take(1 + k);
            }
            let p = Profile::new(shape, a, b);
            for blk in 0..nb {
                out[i * nb + blk] = p.ric[shape.block_rep(blk)];
            }
        }
        if self.start == 1 {
            for blk in 0..nb {
                extrapolate_first(g.nodes(), &mut out, nb, blk);
            }
        }
        self.tensor(out)
    }

    /// Radial component of `V(g0 + h, g0)`.
    pub fn deturck_vector(&self, h: &TensorField) -> Result<TensorField> {
        self.check_metric(h)?;
        let v = self.map_scalar(h.values(), h.blocks(), |i, j| Ok(pointwise::deturck(&self.p0[i], j).re))?;
        Ok(self.scalar(v))
    }

    /// Independent route to `V` through the Koszul connection of `g` itself.
    pub fn deturck_vector_koszul(&self, h: &TensorField) -> Result<TensorField> {
        self.check_metric(h)?;
        let v = self.map_scalar(h.values(), h.blocks(), |i, j| Ok(dense::deturck_koszul(self.g0(), &self.coeffs[i], j)))?;
        Ok(self.scalar(v))
    }

    /// `Φ(g0 + h)` through the coordinate (Shi) form.
    pub fn ricci_deturck_rhs(&self, h: &TensorField) -> Result<TensorField> {
        self.check_metric(h)?;
        let v = self.map_tensor(h.values(), h.blocks(), |i, j| Ok(dense::rhs_shi(self.g0(), &self.coeffs[i], j)))?;
        Ok(self.tensor(v))
    }

    /// `Φ(g0 + h) = −2Ric + 𝓛_V g`, assembled from Ricci and the DeTurck field.
    pub fn ricci_deturck_rhs_direct(&self, h: &TensorField) -> Result<TensorField> {
        self.check_metric(h)?;
        let v = self.rhs_direct_values(h.values())?;
        Ok(self.tensor(v))
    }

    pub(crate) fn rhs_direct_values(&self, h: &[f64]) -> Result<Vec<f64>> {
        let nb = self.blocks();
        self.map_tensor(h, nb, |i, j| Ok(pointwise::rhs_direct(&self.p0[i], &self.coeffs[i], j)))
    }

    /// `Φ(g0 + h) − L_{g0} h` with both terms from the same jets.
    pub fn nonlinear_values(&self, h: &[f64]) -> Result<Vec<f64>> {
        let nb = self.blocks();
        self.map_tensor(h, nb, |i, j| {
            let phi = pointwise::rhs_direct(&self.p0[i], &self.coeffs[i], j);
            let lin = pointwise::lichnerowicz(&self.p0[i], j);
            let mut out = [0.0; R];
            for s in 0..R {
                out[s] = phi[s] - lin[s];
            }
            if out.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite(format!("right-hand side at node {i}")));
            }
            Ok(out)
        })
    }

    /// Connection and curvature of `g0 + h` at every regular node
    /// (`None` at a singular inner node).
    pub fn connection_curvature(&self, h: &TensorField) -> Result<Vec<Option<GeometryData<f64>>>> {
        self.check_metric(h)?;
        let n = self.grid().len();
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            if i < self.start {
                out.push(None);
                continue;
            }
            let j = self.jets(h.values(), h.blocks(), i);
            let gd = dense::connection_curvature(self.g0(), &self.coeffs[i], &j)
                .map_err(|_| Error::NotPositiveDefinite { node: i, r: self.grid().r(i) })?;
            out.push(Some(gd));
        }
        Ok(out)
    }

    /// Splits `Φ(ḡ + h)` around a stationary `ḡ = g0 + hbar`.
    pub fn rhs_expansion(&self, h: &TensorField, hbar: &TensorField) -> Result<RhsSplit> {
        let base = self.ricci_deturck_rhs(hbar)?;
        let resid = base.max_abs();
        if resid > STATIONARY_TOL {
            return Err(Error::NotStationary(resid));
        }
        let full = hbar.axpy(1.0, h);
        let total = self.ricci_deturck_rhs(&full)?;
        let shape = self.shape();
        let nb = self.blocks();
        let n = self.grid().len();
        let linear = self.map_tensor(h.values(), nb, |i, jh| {
            let jb = self.jets(hbar.values(), nb, i);
            let pb = Profile::metric(shape, &self.coeffs[i], &jb);
            let one = jet(1.0, 0.0, 0.0);
            let mut hat = *jh;
            for s in 0..shape.slots() {
                hat[s] = jh[s] / (one + jb[s]);
            }
            let l = pointwise::lichnerowicz(&pb, &hat);
            let mut out = [0.0; R];
            for s in 0..shape.slots() {
                out[s] = l[s] * (1.0 + jb[s].re.re);
            }
            Ok(out)
        })?;
        // X^0 = Σ_a h_a/Ḡ_a² C^0_aa(ḡ)
        let g0 = self.g0();
        let x = self.map_scalar(hbar.values(), nb, |i, jb| {
            let c0 = dense::christoffel_radial(g0, &self.coeffs[i], jb);
            let hv = self.jets(h.values(), nb, i);
            let mut s = 0.0;
            for (a, ca) in c0.iter().enumerate() {
                let slot = if a == 0 { 0 } else { g0.index_rep(a) + 1 };
                let gb = 1.0 + jb[slot].re.re;
                s += hv[slot].re.re / (gb * gb) * ca;
            }
            Ok(s)
        })?;
        let dx = self.st.d1(&x);
        let lie = self.map_tensor(hbar.values(), nb, |i, jb| {
            let l = pointwise::lie_radial(&self.p0[i], Dual::new(x[i], dx[i]), jb);
            Ok(l.map(|v| -v))
        })?;
        let mut rem = vec![0.0; n * nb];
        for k in 0..n * nb {
            rem[k] = total.values()[k] - linear[k] - lie[k];
        }
        Ok(RhsSplit { linear_part: self.tensor(linear), lie_part: self.tensor(lie), remainder: self.tensor(rem), total })
    }
}

/// Finite-difference Ricci of the background on `count` nodes uniform in a
/// coordinate in which the metric is smooth up to the inner end
/// (`r = a + u²` at a bolt, `r = u` otherwise). Returns `(r, Ric per slot)`
/// at every node but a singular inner one.
pub fn ricci_fd_oracle(g0: &BackgroundMetric, r_min: f64, r_max: f64, count: usize) -> Vec<(f64, [f64; R])> {
    let bolt = g0.kind() == crate::BackgroundKind::EguchiHanson && r_min <= g0.bolt();
    let (u0, u1) = if bolt { (0.0, (r_max - g0.bolt()).sqrt()) } else { (r_min, r_max) };
    let to_r = |u: f64| if bolt { g0.bolt() + u * u } else { u };
    let dr = |u: f64| if bolt { 2.0 * u } else { 1.0 };
    let us: Vec<f64> = (0..count).map(|i| u0 + (u1 - u0) * i as f64 / (count - 1) as f64).collect();
    let reps = g0.reps();
    let stride = 1 + reps;
    let mut samples = vec![0.0; count * stride];
    for (i, &u) in us.iter().enumerate() {
        let r = to_r(u);
        let c = g0.coeffs(r);
        // f dr/du stays finite at the bolt: √a.
        samples[i * stride] = if bolt && i == 0 { g0.bolt().sqrt() } else { c.f * dr(u) };
        for k in 0..reps {
            samples[i * stride + 1 + k] = if bolt && i == 0 && k == 2 { 0.0 } else { c.w[k] };
        }
    }
    let st = Stencils::from_points(&us);
    let shape = Shape::of(g0);
    let first = if bolt || r_min == 0.0 { 1 } else { 0 };
    (first..count)
        .map(|i| {
            let take = |k: usize| {
                let (d1, d2) = st.derivs(&samples, stride, k, i);
                jet(samples[i * stride + k], d1, d2)
            };
            let mut b = [jet(1.0, 0.0, 0.0); 3];
            for (k, bk) in b.iter_mut().enumerate().take(reps) {
                *bk = take(1 + k);
            }
            let p = Profile::new(shape, take(0), b);
            (to_r(us[i]), p.ric)
        })
        .collect()
}
