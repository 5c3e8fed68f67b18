//! Conservative (variational) discretization of the rough and Lichnerowicz
//! Laplacians on a radial grid.
//!
//! The quadratic form
//! `−(Lh, h) = ∫ Σ_B m_B |h_B'|²/A² + hᵀ Q(r) h  dμ`
//! is discretized with midpoint edge weights `w_e = vol/A²(r_e) / Δr_e` and dual-cell
//! masses `μ_j = ∫_cell vol dr`, so that `−L = M⁻¹K` with `K` symmetric and
//! `M = diag(m_B μ_j)`. Potentials are sampled at regular nodes and
//! cell-integrated at a singular inner node (origin or bolt).

use super::frame::{Profile, Shape};
use crate::geometry::background::{BackgroundMetric, Inner};
use crate::geometry::quad::integrate;
use crate::geometry::RadialGrid;
use std::sync::Arc;

/// Block-level potential densities `(pair part, curvature part)`, each
/// `nb × nb` row-major.
pub fn potential(p: &Profile<f64>, skip_pair: Option<(usize, usize)>) -> (Vec<f64>, Vec<f64>) {
    let s: &Shape = &p.shape;
    let nb = s.blocks;
    let mut lap = vec![0.0; nb * nb];
    let mut cur = vec![0.0; nb * nb];
    let m = |a: usize| s.mult[a] as f64;
    for a in 0..s.slots() {
        let ba = s.rep_block[a];
        for c in 0..s.slots() {
            let bc = s.rep_block[c];
            if a != c {
                cur[ba * nb + bc] -= 2.0 * m(a) * m(c) * p.sec[a][c];
            }
            if a < c && ba != bc && skip_pair != Some((a, c)) {
                let w = m(a) * m(c) * p.pair[a][c];
                lap[ba * nb + ba] += w;
                lap[bc * nb + bc] += w;
                lap[ba * nb + bc] -= w;
                lap[bc * nb + ba] -= w;
            }
        }
        cur[ba * nb + ba] += 2.0 * m(a) * (p.ric[a] - (m(a) - 1.0) * p.sec[a][a]);
    }
    (lap, cur)
}

/// Symmetric, node-block-tridiagonal stiffness data plus lumped masses.
#[derive(Clone, Debug)]
pub struct Stiffness {
    pub g0: BackgroundMetric,
    pub grid: Arc<RadialGrid>,
    pub shape: Shape,
    pub inner: Inner,
    pub mults: Vec<usize>,
    /// `w_e` for edges `(j, j+1)`.
    pub edge: Vec<f64>,
    /// Dual-cell volumes `μ_j`.
    pub mass: Vec<f64>,
    /// `∫_cell vol·Q dr` per node, pair part.
    pub pot_lap: Vec<Vec<f64>>,
    /// Same, curvature part.
    pub pot_curv: Vec<Vec<f64>>,
}

impl Stiffness {
    pub fn new(g0: &BackgroundMetric, grid: Arc<RadialGrid>) -> crate::Result<Self> {
        g0.validate_grid(&grid)?;
        let shape = Shape::of(g0);
        let inner = g0.inner(&grid);
        let n = grid.len();
        let nb = shape.blocks;
        let vol = |r: f64| g0.volume_density(r);
        // Midpoint face flux: exact for quadratics on flat space, including
        // the origin cell.
        let edge = (0..n - 1)
            .map(|j| {
                let (a, b) = (grid.r(j), grid.r(j + 1));
                let m = 0.5 * (a + b);
                let f = g0.coeffs(m).f;
                vol(m) / (f * f * (b - a))
            })
            .collect();
        let mass: Vec<f64> = (0..n)
            .map(|j| {
                let (a, b) = grid.cell(j);
                integrate(a, b, vol)
            })
            .collect();
        // Bolt: the (rr, 33) pair weight diverges like 1/(r−a) but multiplies
        // h_rr − h_33, which the regularity constraint sets to zero.
        let skip = if inner == Inner::Bolt { Some((0, 3)) } else { None };
        let mut pot_lap = Vec::with_capacity(n);
        let mut pot_curv = Vec::with_capacity(n);
        for j in 0..n {
            if j == 0 && inner != Inner::Boundary {
                let (a, b) = grid.cell(0);
                let (x, w) = crate::geometry::quad::gauss_legendre(16);
                let mut lap = vec![0.0; nb * nb];
                let mut cur = vec![0.0; nb * nb];
                for (xi, wi) in x.iter().zip(&w) {
                    let r = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                    let wt = 0.5 * (b - a) * wi * vol(r);
                    let (l, c) = potential(&Profile::background(g0, r), skip);
                    for k in 0..nb * nb {
                        lap[k] += wt * l[k];
                        cur[k] += wt * c[k];
                    }
                }
                pot_lap.push(lap);
                pot_curv.push(cur);
            } else {
                let (l, c) = potential(&Profile::background(g0, grid.r(j)), None);
                pot_lap.push(l.into_iter().map(|x| x * mass[j]).collect());
                pot_curv.push(c.into_iter().map(|x| x * mass[j]).collect());
            }
        }
        Ok(Self { g0: g0.clone(), grid, shape, inner, mults: g0.block_mults(), edge, mass, pot_lap, pot_curv })
    }

    pub fn nodes(&self) -> usize {
        self.grid.len()
    }

    pub fn blocks(&self) -> usize {
        self.mults.len()
    }

    /// `K h` for node-major block values (`curv = false`: rough Laplacian only).
    pub fn apply(&self, h: &[f64], curv: bool) -> Vec<f64> {
        let n = self.nodes();
        let nb = self.blocks();
        let mut out = vec![0.0; n * nb];
        for j in 0..n - 1 {
            let w = self.edge[j];
            for b in 0..nb {
                let d = w * self.mults[b] as f64 * (h[(j + 1) * nb + b] - h[j * nb + b]);
                out[j * nb + b] -= d;
                out[(j + 1) * nb + b] += d;
            }
        }
        for j in 0..n {
            for b in 0..nb {
                let mut s = 0.0;
                for c in 0..nb {
                    let mut q = self.pot_lap[j][b * nb + c];
                    if curv {
                        q += self.pot_curv[j][b * nb + c];
                    }
                    s += q * h[j * nb + c];
                }
                out[j * nb + b] += s;
            }
        }
        out
    }

    /// `−M⁻¹ K h`, zero at the Dirichlet node.
    pub fn operator(&self, h: &[f64], curv: bool) -> Vec<f64> {
        let n = self.nodes();
        let nb = self.blocks();
        let mut out = self.apply(h, curv);
        for j in 0..n {
            for b in 0..nb {
                out[j * nb + b] = if j == n - 1 { 0.0 } else { -out[j * nb + b] / (self.mults[b] as f64 * self.mass[j]) };
            }
        }
        out
    }

    /// Conservative scalar Laplacian `(1/vol)(vol u'/A²)'` with the same
    /// edge weights.
    pub fn scalar_laplacian(&self, u: &[f64]) -> Vec<f64> {
        let n = self.nodes();
        let mut out = vec![0.0; n];
        for j in 0..n - 1 {
            let d = self.edge[j] * (u[j + 1] - u[j]);
            out[j] += d;
            out[j + 1] -= d;
        }
        for j in 0..n {
            out[j] = if j == n - 1 { 0.0 } else { out[j] / self.mass[j] };
        }
        out
    }

    /// Weighted inner product `Σ_j μ_j Σ_B m_B u v`.
    pub fn inner_product(&self, u: &[f64], v: &[f64]) -> f64 {
        let nb = self.blocks();
        let mut s = 0.0;
        for (j, m) in self.mass.iter().enumerate() {
            for b in 0..nb {
                s += m * self.mults[b] as f64 * u[j * nb + b] * v[j * nb + b];
            }
        }
        s
    }

    /// Reduction at the inner node: columns are the free combinations of
    /// blocks at node 0.
    pub fn inner_basis(&self) -> Vec<Vec<f64>> {
        let nb = self.blocks();
        match self.inner {
            Inner::Origin => vec![vec![1.0; nb]],
            Inner::Bolt => {
                let b33 = self.shape.rep_block[3];
                (0..nb)
                    .filter(|&b| b != b33)
                    .map(|b| (0..nb).map(|c| if c == b || (b == 0 && c == b33) { 1.0 } else { 0.0 }).collect())
                    .collect()
            }
            Inner::Boundary => (0..nb).map(|b| (0..nb).map(|c| if c == b { 1.0 } else { 0.0 }).collect()).collect(),
        }
    }

    /// Projects node 0 onto the regularity constraint (mass-weighted).
    pub fn enforce_inner(&self, h: &mut [f64]) {
        let nb = self.blocks();
        let mut out = vec![0.0; nb];
        for col in self.inner_basis() {
            let (mut num, mut den) = (0.0, 0.0);
            for b in 0..nb {
                let w = self.mults[b] as f64 * col[b];
                num += w * h[b];
                den += w * col[b];
            }
            for b in 0..nb {
                out[b] += col[b] * num / den;
            }
        }
        h[..nb].copy_from_slice(&out);
    }

    /// Gershgorin bound on the spectral radius of `M⁻¹K`.
    pub fn gershgorin(&self) -> f64 {
        let n = self.nodes();
        let nb = self.blocks();
        let mut best: f64 = 0.0;
        for j in 0..n - 1 {
            for b in 0..nb {
                let m = self.mults[b] as f64;
                let mut row = m * (self.edge[j] + if j > 0 { self.edge[j - 1] } else { 0.0 }) * 2.0;
                for c in 0..nb {
                    row += (self.pot_lap[j][b * nb + c] + self.pot_curv[j][b * nb + c]).abs();
                }
                best = best.max(row / (m * self.mass[j]));
            }
        }
        best
    }
}
