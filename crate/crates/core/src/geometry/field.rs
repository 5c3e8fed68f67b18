use crate::error::{Error, Result};
use crate::geometry::background::BackgroundMetric;
use crate::geometry::grid::RadialGrid;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FieldKind {
    Scalar,
    /// Diagonal symmetric 2-tensor in the invariant sector.
    Tensor,
}

/// Per-node block values of a radial field.
///
/// Tensor blocks hold frame components of `h` in the `g0`-orthonormal frame;
/// each block stands for `mults[b]` equal diagonal entries. The radial/link
/// cross component is not stored: the diagonal sector is closed under every
/// operator in this crate.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorField {
    grid: Arc<RadialGrid>,
    kind: FieldKind,
    mults: Vec<usize>,
    values: Vec<f64>,
}

impl TensorField {
    pub fn zeros(grid: Arc<RadialGrid>, g0: &BackgroundMetric) -> Self {
        let mults = g0.block_mults();
        let values = vec![0.0; grid.len() * mults.len()];
        Self { grid, kind: FieldKind::Tensor, mults, values }
    }

    pub fn from_values(grid: Arc<RadialGrid>, mults: Vec<usize>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() * mults.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} values, got {}",
                grid.len() * mults.len(),
                values.len()
            )));
        }
        Ok(Self { grid, kind: FieldKind::Tensor, mults, values })
    }

    pub fn scalar(grid: Arc<RadialGrid>, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::InvalidInput("scalar field length mismatch".into()));
        }
        Ok(Self { grid, kind: FieldKind::Scalar, mults: vec![1], values })
    }

    /// Tensor field from per-block profiles `f(r, block)`.
    pub fn from_fn(grid: Arc<RadialGrid>, g0: &BackgroundMetric, f: impl Fn(f64, usize) -> f64) -> Self {
        let mut out = Self::zeros(grid, g0);
        let nb = out.blocks();
        for i in 0..out.grid.len() {
            let r = out.grid.r(i);
            for b in 0..nb {
                out.values[i * nb + b] = f(r, b);
            }
        }
        out
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }
    pub fn grid_arc(&self) -> &Arc<RadialGrid> {
        &self.grid
    }
    pub fn kind(&self) -> FieldKind {
        self.kind
    }
    pub fn mults(&self) -> &[usize] {
        &self.mults
    }
    pub fn blocks(&self) -> usize {
        self.mults.len()
    }
    pub fn includes_cross(&self) -> bool {
        false
    }
    pub fn values(&self) -> &[f64] {
        &self.values
    }
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }
    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
    pub fn get(&self, node: usize, block: usize) -> f64 {
        self.values[node * self.mults.len() + block]
    }
    pub fn set(&mut self, node: usize, block: usize, v: f64) {
        let nb = self.mults.len();
        self.values[node * nb + block] = v;
    }
    pub fn node(&self, i: usize) -> &[f64] {
        let nb = self.mults.len();
        &self.values[i * nb..(i + 1) * nb]
    }

    /// Values of one block across the grid.
    pub fn block(&self, b: usize) -> Vec<f64> {
        let nb = self.mults.len();
        self.values.iter().skip(b).step_by(nb).copied().collect()
    }

    pub fn check_finite(&self) -> Result<()> {
        match self.values.iter().position(|v| !v.is_finite()) {
            None => Ok(()),
            Some(k) => Err(Error::NonFinite(format!(
                "field at node {} (r = {})",
                k / self.mults.len(),
                self.grid.r(k / self.mults.len())
            ))),
        }
    }

    /// Frame trace `Σ m_b h_b` per node.
    pub fn trace(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.node(i).iter().zip(&self.mults).map(|(v, &m)| m as f64 * v).sum())
            .collect()
    }

    /// Pointwise frame norm `√(Σ m_b h_b²)`.
    pub fn pointwise_norm(&self) -> Vec<f64> {
        (0..self.grid.len())
            .map(|i| self.node(i).iter().zip(&self.mults).map(|(v, &m)| m as f64 * v * v).sum::<f64>().sqrt())
            .collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = self.clone();
        out.values.iter_mut().for_each(|v| *v *= s);
        out
    }

    /// `self + s·other`.
    pub fn axpy(&self, s: f64, other: &Self) -> Self {
        debug_assert_eq!(self.values.len(), other.values.len());
        let mut out = self.clone();
        out.values.iter_mut().zip(&other.values).for_each(|(a, b)| *a += s * b);
        out
    }

    /// Pointwise product with a scalar profile.
    pub fn weighted(&self, w: &[f64]) -> Self {
        let nb = self.mults.len();
        let mut out = self.clone();
        for (k, v) in out.values.iter_mut().enumerate() {
            *v *= w[k / nb];
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_uses_multiplicities() {
        let g0 = BackgroundMetric::euclidean(4).unwrap();
        let grid = Arc::new(RadialGrid::new(4, 0.0, 1.0, 16, 1.0).unwrap());
        let h = TensorField::from_fn(grid, &g0, |_, _| 1.0);
        assert!(h.trace().iter().all(|&t| (t - 4.0).abs() < 1e-15));
        assert!(h.pointwise_norm().iter().all(|&t| (t - 2.0).abs() < 1e-15));
        assert!(!h.includes_cross());
    }

    #[test]
    fn nan_is_reported() {
        let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
        let grid = Arc::new(RadialGrid::new(4, 1.0, 4.0, 16, 1.0).unwrap());
        let mut h = TensorField::zeros(grid, &g0);
        h.set(3, 2, f64::NAN);
        assert!(h.check_finite().is_err());
    }
}
