use crate::error::{invalid, Result};

/// Radial nodes with geometric spacing `Δr_i = Δr_0 · stretch^i`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialGrid {
    dim: usize,
    stretch: f64,
    nodes: Vec<f64>,
}

/// Smallest node count accepted by [`RadialGrid::new`]; run configs demand 16.
pub const MIN_NODES: usize = 3;

impl RadialGrid {
    pub fn new(dim: usize, r_min: f64, r_max: f64, count: usize, stretch: f64) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite() && stretch.is_finite()) {
            return invalid("grid parameters must be finite");
        }
        if r_min < 0.0 || r_max <= r_min {
            return invalid(format!("need r_max > r_min >= 0, got [{r_min}, {r_max}]"));
        }
        if count < MIN_NODES {
            return invalid(format!("need at least {MIN_NODES} nodes, got {count}"));
        }
        if stretch < 1.0 {
            return invalid(format!("stretch must be >= 1, got {stretch}"));
        }
        let cells = count - 1;
        let total = if stretch == 1.0 {
            cells as f64
        } else {
            (stretch.powi(cells as i32) - 1.0) / (stretch - 1.0)
        };
        let dr0 = (r_max - r_min) / total;
        let mut nodes = Vec::with_capacity(count);
        let mut r = r_min;
        let mut dr = dr0;
        nodes.push(r);
        for _ in 0..cells {
            r += dr;
            dr *= stretch;
            nodes.push(r);
        }
        nodes[cells] = r_max;
        Ok(Self { dim, stretch, nodes })
    }

    /// Grid with a prescribed first spacing; the node count follows from `r_max`.
    pub fn with_first_spacing(dim: usize, r_min: f64, r_max: f64, dr0: f64, stretch: f64) -> Result<Self> {
        if dr0 <= 0.0 || r_max <= r_min {
            return invalid("need dr0 > 0 and r_max > r_min");
        }
        let cells = if stretch == 1.0 {
            ((r_max - r_min) / dr0).round()
        } else {
            (1.0 + (r_max - r_min) * (stretch - 1.0) / dr0).ln() / stretch.ln()
        };
        Self::new(dim, r_min, r_max, (cells.round() as usize).max(MIN_NODES - 1) + 1, stretch)
    }

    /// Same domain, twice the cells; keeps every existing node.
    pub fn refined(&self) -> Self {
        let s = self.stretch.sqrt();
        Self::new(self.dim, self.r_min(), self.r_max(), 2 * self.len() - 1, s)
            .expect("refinement of a valid grid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn len(&self) -> usize {
        self.nodes.len()
    }
    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }
    pub fn r(&self, i: usize) -> f64 {
        self.nodes[i]
    }
    pub fn r_min(&self) -> f64 {
        self.nodes[0]
    }
    pub fn r_max(&self) -> f64 {
        self.nodes[self.nodes.len() - 1]
    }
    pub fn stretch(&self) -> f64 {
        self.stretch
    }
    /// `r_{i+1} − r_i`.
    pub fn spacing(&self, i: usize) -> f64 {
        self.nodes[i + 1] - self.nodes[i]
    }
    pub fn min_spacing(&self) -> f64 {
        (0..self.len() - 1).map(|i| self.spacing(i)).fold(f64::INFINITY, f64::min)
    }

    /// Largest relative deviation of consecutive spacing ratios from `stretch`.
    pub fn ratio_defect(&self) -> f64 {
        (1..self.len() - 1)
            .map(|i| (self.spacing(i) / self.spacing(i - 1) / self.stretch - 1.0).abs())
            .fold(0.0, f64::max)
    }

    /// Index of the node closest to `r`.
    pub fn nearest(&self, r: f64) -> usize {
        match self.nodes.binary_search_by(|x| x.partial_cmp(&r).unwrap()) {
            Ok(i) => i,
            Err(0) => 0,
            Err(i) if i >= self.len() => self.len() - 1,
            Err(i) => {
                if r - self.nodes[i - 1] < self.nodes[i] - r {
                    i - 1
                } else {
                    i
                }
            }
        }
    }

    /// Dual-cell bounds of node `i`, clipped to the domain.
    pub fn cell(&self, i: usize) -> (f64, f64) {
        let lo = if i == 0 { self.nodes[0] } else { 0.5 * (self.nodes[i - 1] + self.nodes[i]) };
        let hi = if i + 1 == self.len() {
            self.nodes[i]
        } else {
            0.5 * (self.nodes[i] + self.nodes[i + 1])
        };
        (lo, hi)
    }

    /// Trapezoid weights `∫ u dr ≈ Σ w_i u_i`.
    pub fn trapezoid_weights(&self) -> Vec<f64> {
        let n = self.len();
        let mut w = vec![0.0; n];
        for i in 0..n - 1 {
            let h = 0.5 * self.spacing(i);
            w[i] += h;
            w[i + 1] += h;
        }
        w
    }
}
