//! Assembly of the discrete `−L` (or `−Δ`) in reduced coordinates: the
//! Dirichlet node is dropped and the inner node carries only the degrees of
//! freedom allowed by its regularity constraint.

use super::banded::SymBand;
use crate::error::{Error, Result};
use crate::geometry::background::Inner;
use crate::geometry::TensorField;
use crate::operators::discrete::Stiffness;
use crate::operators::grid::Discretization;

/// Map between node-major block values and reduced coordinates.
#[derive(Clone, Debug)]
pub struct Layout {
    pub nodes: usize,
    pub nb: usize,
    pub mults: Vec<usize>,
    /// Free block combinations at node 0.
    pub inner_cols: Vec<Vec<f64>>,
    pub dofs: usize,
}

impl Layout {
    fn new(k: &Stiffness) -> Self {
        let nodes = k.nodes();
        let nb = k.blocks();
        let inner_cols = k.inner_basis();
        let dofs = inner_cols.len() + (nodes - 2) * nb;
        Self { nodes, nb, mults: k.mults.clone(), inner_cols, dofs }
    }

    /// Reduced index of `(node, local)` for nodes `1..N−1`.
    #[inline]
    pub fn index(&self, node: usize, b: usize) -> usize {
        self.inner_cols.len() + (node - 1) * self.nb + b
    }

    /// Expands reduced coordinates to node-major block values.
    pub fn expand(&self, x: &[f64]) -> Vec<f64> {
        let nb = self.nb;
        let mut out = vec![0.0; self.nodes * nb];
        for (c, col) in self.inner_cols.iter().enumerate() {
            for b in 0..nb {
                out[b] += col[b] * x[c];
            }
        }
        for j in 1..self.nodes - 1 {
            for b in 0..nb {
                out[j * nb + b] = x[self.index(j, b)];
            }
        }
        out
    }

    /// Mass-weighted restriction (exact for values obeying the constraints).
    pub fn restrict(&self, h: &[f64]) -> Vec<f64> {
        let nb = self.nb;
        let mut x = vec![0.0; self.dofs];
        for (c, col) in self.inner_cols.iter().enumerate() {
            let (mut num, mut den) = (0.0, 0.0);
            for b in 0..nb {
                let w = self.mults[b] as f64 * col[b];
                num += w * h[b];
                den += w * col[b];
            }
            x[c] = num / den;
        }
        for j in 1..self.nodes - 1 {
            for b in 0..nb {
                x[self.index(j, b)] = h[j * nb + b];
            }
        }
        x
    }
}

/// Symmetric stiffness `K`, diagonal mass `M` and an optional low-rank
/// correction `Σ c_i u_i u_iᵀ`; the operator is `M⁻¹K = −L`.
#[derive(Clone, Debug)]
pub struct OperatorMatrix {
    pub k: SymBand,
    pub mass: Vec<f64>,
    pub lowrank: Vec<(f64, Vec<f64>)>,
    pub layout: Layout,
    pub inner: Inner,
    /// Largest `|K_pq − K_qp|` seen during assembly, relative to `max|K_pp|`.
    pub asymmetry: f64,
}

/// Tolerance on the assembly asymmetry.
pub const ASYMMETRY_TOL: f64 = 1e-10;

impl OperatorMatrix {
    pub fn dofs(&self) -> usize {
        self.layout.dofs
    }

    pub fn apply_k(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.k.matvec(x);
        for (c, u) in &self.lowrank {
            let d: f64 = u.iter().zip(x).map(|(a, b)| a * b).sum();
            y.iter_mut().zip(u).for_each(|(yi, ui)| *yi += c * d * ui);
        }
        y
    }

    /// `−L x = M⁻¹ K x`.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.apply_k(x).iter().zip(&self.mass).map(|(y, m)| y / m).collect()
    }

    pub fn inner(&self, x: &[f64], y: &[f64]) -> f64 {
        x.iter().zip(y).zip(&self.mass).map(|((a, b), m)| a * b * m).sum()
    }

    pub fn norm(&self, x: &[f64]) -> f64 {
        self.inner(x, x).sqrt()
    }

    /// Adds `c · (M f)(M f)ᵀ`, i.e. `c` times the projector onto `f` when
    /// `f` is M-normalised.
    pub fn plant(&mut self, c: f64, f: &[f64]) {
        let u = f.iter().zip(&self.mass).map(|(a, m)| a * m).collect();
        self.lowrank.push((c, u));
    }

    /// Adds a general symmetric rank-one term `c · u uᵀ`.
    pub fn add_rank_one(&mut self, c: f64, u: Vec<f64>) {
        self.lowrank.push((c, u));
    }

    pub fn to_field(&self, disc: &Discretization, x: &[f64]) -> TensorField {
        disc.tensor(self.layout.expand(x))
    }

    pub fn from_field(&self, h: &TensorField) -> Vec<f64> {
        self.layout.restrict(h.values())
    }
}

/// Assembles `−L_{g0}` (`curv = true`) or `−Δ` (`curv = false`) on `disc`.
pub fn assemble(disc: &Discretization, curv: bool) -> Result<OperatorMatrix> {
    assemble_scaled(disc, curv, 1.0)
}

/// `−L_{c·g0}` = `c⁻¹(−L_{g0})`; homothetic references are the stationary
/// metrics available in the invariant sector.
pub fn assemble_scaled(disc: &Discretization, curv: bool, c: f64) -> Result<OperatorMatrix> {
    let k = disc.stiffness();
    let layout = Layout::new(k);
    let nb = layout.nb;
    let n = layout.nodes;
    let dofs = layout.dofs;
    let kd = 2 * nb.max(layout.inner_cols.len()) - 1;
    let mut lower = SymBand::zeros(dofs, kd);
    let mut upper = SymBand::zeros(dofs, kd);
    let mut add = |p: usize, q: usize, v: f64| {
        if v == 0.0 {
            return;
        }
        if p >= q {
            lower.add_lower(p, q, v);
        } else {
            upper.add_lower(q, p, v);
        }
    };
    let m = |b: usize| k.mults[b] as f64;
    // Full-space entry K[(j,B),(l,C)].
    let entry = |j: usize, b: usize, l: usize, cc: usize| -> f64 {
        let mut v = 0.0;
        if j == l {
            if b == cc {
                v += m(b) * (k.edge[j] + if j > 0 { k.edge[j - 1] } else { 0.0 });
            }
            v += k.pot_lap[j][b * nb + cc];
            if curv {
                v += k.pot_curv[j][b * nb + cc];
            }
        } else if b == cc && (j + 1 == l || l + 1 == j) {
            v -= m(b) * k.edge[j.min(l)];
        }
        v / c
    };
    // Reduced basis vectors as sparse (node, block, weight) lists.
    let mut basis: Vec<Vec<(usize, usize, f64)>> = Vec::with_capacity(dofs);
    for col in &layout.inner_cols {
        basis.push((0..nb).filter(|&b| col[b] != 0.0).map(|b| (0, b, col[b])).collect());
    }
    for j in 1..n - 1 {
        for b in 0..nb {
            basis.push(vec![(j, b, 1.0)]);
        }
    }
    let node_of = |p: usize| basis[p][0].0;
    for p in 0..dofs {
        let jp = node_of(p);
        let lo = p.saturating_sub(kd);
        for q in lo..(p + kd + 1).min(dofs) {
            let jq = node_of(q);
            if jp.abs_diff(jq) > 1 {
                continue;
            }
            let mut v = 0.0;
            for &(j, b, wp) in &basis[p] {
                for &(l, cc, wq) in &basis[q] {
                    v += wp * wq * entry(j, b, l, cc);
                }
            }
            add(p, q, v);
        }
    }
    let scale = lower.diag_max_abs().max(f64::MIN_POSITIVE);
    let mut asym: f64 = 0.0;
    for p in 0..dofs {
        for q in p.saturating_sub(kd)..p {
            asym = asym.max((lower.get(p, q) - upper.get(p, q)).abs() / scale);
        }
    }
    if asym > ASYMMETRY_TOL {
        return Err(Error::Asymmetric(asym));
    }
    let mut mass = vec![0.0; dofs];
    for (p, bv) in basis.iter().enumerate() {
        for &(j, b, w) in bv {
            mass[p] += m(b) * k.mass[j] * w * w;
        }
    }
    Ok(OperatorMatrix { k: lower, mass, lowrank: Vec::new(), layout, inner: k.inner, asymmetry: asym })
}
