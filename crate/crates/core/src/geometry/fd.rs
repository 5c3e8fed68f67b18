//! Second-order finite-difference stencils on a (stretched) radial grid.

use super::grid::RadialGrid;

/// Fornberg weights for derivatives 0..=m at `z` from nodes `x`.
pub fn fornberg(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] *= c4 / c3;
        }
        c1 = c2;
    }
    c
}

#[derive(Clone, Debug)]
struct Stencil {
    start: usize,
    w: Vec<f64>,
}

/// Precomputed first/second derivative stencils for every node.
#[derive(Clone, Debug)]
pub struct Stencils {
    d1: Vec<Stencil>,
    d2: Vec<Stencil>,
}

impl Stencils {
    pub fn new(grid: &RadialGrid) -> Self {
        Self::from_nodes(grid.nodes())
    }

    /// Stencils that never reach below `first` (nodes before it get empty
    /// stencils).
    pub fn new_from(grid: &RadialGrid, first: usize) -> Self {
        let mut s = Self::from_nodes(&grid.nodes()[first..]);
        for st in s.d1.iter_mut().chain(s.d2.iter_mut()) {
            st.start += first;
        }
        let pad = |v: &mut Vec<Stencil>| {
            let mut out: Vec<Stencil> = (0..first).map(|_| Stencil { start: 0, w: Vec::new() }).collect();
            out.append(v);
            *v = out;
        };
        pad(&mut s.d1);
        pad(&mut s.d2);
        s
    }

    /// Stencils on arbitrary increasing points.
    pub fn from_points(x: &[f64]) -> Self {
        Self::from_nodes(x)
    }

    fn from_nodes(x: &[f64]) -> Self {
        let n = x.len();
        let build = |order: usize, ends: usize| -> Vec<Stencil> {
            (0..n)
                .map(|i| {
                    let (start, len) = if i == 0 {
                        (0, ends)
                    } else if i == n - 1 {
                        (n - ends, ends)
                    } else {
                        (i - 1, 3)
                    };
                    let w = fornberg(x[i], &x[start..start + len], order);
                    Stencil { start, w: w[order].clone() }
                })
                .collect()
        };
        Self { d1: build(1, 3), d2: build(2, 4) }
    }

    fn apply(s: &Stencil, u: &[f64], stride: usize, off: usize) -> f64 {
        s.w.iter().enumerate().map(|(k, w)| w * u[(s.start + k) * stride + off]).sum()
    }

    /// `(u', u'')` at node `i` for the strided component `off`.
    #[inline]
    pub fn derivs(&self, u: &[f64], stride: usize, off: usize, i: usize) -> (f64, f64) {
        (Self::apply(&self.d1[i], u, stride, off), Self::apply(&self.d2[i], u, stride, off))
    }

    pub fn d1(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len()).map(|i| Self::apply(&self.d1[i], u, 1, 0)).collect()
    }

    pub fn d2(&self, u: &[f64]) -> Vec<f64> {
        (0..u.len()).map(|i| Self::apply(&self.d2[i], u, 1, 0)).collect()
    }
}

/// Quadratic extrapolation of node 0 from nodes 1..=3.
pub fn extrapolate_first(x: &[f64], u: &mut [f64], stride: usize, off: usize) {
    let w = fornberg(x[0], &x[1..4], 0);
    u[off] = (0..3).map(|k| w[0][k] * u[(k + 1) * stride + off]).sum();
}
