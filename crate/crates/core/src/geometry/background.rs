use crate::error::{invalid, Result};
use crate::geometry::grid::RadialGrid;
use crate::scalar::Real;
use std::f64::consts::PI;

/// Largest supported ambient dimension.
pub const MAX_DIM: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BackgroundKind {
    Euclidean,
    Cone,
    EguchiHanson,
}

impl BackgroundKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Euclidean => "euclidean",
            Self::Cone => "cone",
            Self::EguchiHanson => "eguchi_hanson",
        }
    }
}

/// Link of the cohomogeneity-one frame.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Link {
    /// Round sphere (or space form); one representative link direction.
    Sphere,
    /// Left-invariant Milnor frame on SU(2) with `[e_j, e_k] = λ_i e_i`.
    Su2,
}

/// How the inner end of a grid is treated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Inner {
    /// r = 0 of ℝⁿ: all frame components coincide.
    Origin,
    /// Eguchi–Hanson bolt: h_rr = h_33.
    Bolt,
    /// A genuine boundary (cone apex excised): natural condition.
    Boundary,
}

/// Frame coefficients at one radius: `g0 = f² dr² + Σ w_i² e_i²` with one
/// entry per link representative.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coeffs<T> {
    pub f: T,
    pub w: [T; 3],
}

#[derive(Clone, Debug, PartialEq)]
pub struct BackgroundMetric {
    kind: BackgroundKind,
    dim: usize,
    gamma_order: usize,
    bolt: f64,
    link: Link,
}

impl BackgroundMetric {
    pub fn euclidean(n: usize) -> Result<Self> {
        check_dim(n)?;
        Ok(Self { kind: BackgroundKind::Euclidean, dim: n, gamma_order: 1, bolt: 0.0, link: Link::Sphere })
    }

    pub fn cone(n: usize, gamma_order: usize) -> Result<Self> {
        check_dim(n)?;
        if gamma_order < 2 {
            return invalid(format!("cone needs |Γ| >= 2, got {gamma_order}"));
        }
        Ok(Self { kind: BackgroundKind::Cone, dim: n, gamma_order, bolt: 0.0, link: Link::Sphere })
    }

    pub fn eguchi_hanson(a: f64) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return invalid(format!("bolt parameter must be positive, got {a}"));
        }
        Ok(Self { kind: BackgroundKind::EguchiHanson, dim: 4, gamma_order: 2, bolt: a, link: Link::Su2 })
    }

    /// Flat ℝ⁴ written in the SU(2) frame (w_i = r/2); a test bed for the
    /// Bianchi-IX machinery.
    pub fn euclidean_su2() -> Self {
        Self { kind: BackgroundKind::Euclidean, dim: 4, gamma_order: 1, bolt: 0.0, link: Link::Su2 }
    }

    pub fn kind(&self) -> BackgroundKind {
        self.kind
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn gamma_order(&self) -> usize {
        self.gamma_order
    }
    pub fn bolt(&self) -> f64 {
        self.bolt
    }
    pub fn link(&self) -> Link {
        self.link
    }
    pub fn is_flat(&self) -> bool {
        self.kind != BackgroundKind::EguchiHanson
    }

    /// ALE order τ; `f64::INFINITY` for exact cones.
    pub fn ale_order(&self) -> f64 {
        match self.kind {
            BackgroundKind::EguchiHanson => 4.0,
            _ => f64::INFINITY,
        }
    }

    /// Number of link representatives.
    pub fn reps(&self) -> usize {
        match self.link {
            Link::Sphere => 1,
            Link::Su2 => 3,
        }
    }

    /// Multiplicity of each link representative.
    pub fn rep_mult(&self, i: usize) -> usize {
        match self.link {
            Link::Sphere => self.dim - 1,
            Link::Su2 => {
                debug_assert!(i < 3);
                1
            }
        }
    }

    /// Invariant-sector block multiplicities, radial block first.
    pub fn block_mults(&self) -> Vec<usize> {
        match self.link {
            Link::Sphere => vec![1, self.dim - 1],
            Link::Su2 => vec![1, 2, 1],
        }
    }

    /// Block holding frame representative `rep` (0 = radial, 1.. = link).
    pub fn rep_block(&self, rep: usize) -> usize {
        match self.link {
            Link::Sphere => rep.min(1),
            Link::Su2 => [0, 1, 1, 2][rep],
        }
    }

    /// Block of full frame index `a` (0 = radial, 1..n−1 link).
    pub fn index_block(&self, a: usize) -> usize {
        match self.link {
            Link::Sphere => a.min(1),
            Link::Su2 => [0, 1, 1, 2][a],
        }
    }

    /// Link representative of full frame index `a ≥ 1`.
    pub fn index_rep(&self, a: usize) -> usize {
        match self.link {
            Link::Sphere => 0,
            Link::Su2 => a - 1,
        }
    }

    /// Sign of the SU(2) structure constants.
    pub fn su2_sign(&self) -> f64 {
        1.0
    }

    /// Frame coefficients at radius `r`.
    pub fn coeffs<T: Real>(&self, r: T) -> Coeffs<T> {
        match (self.kind, self.link) {
            (BackgroundKind::EguchiHanson, _) => {
                let x = T::from_f64(self.bolt) / r;
                let q = T::one() - x.powi(4);
                let sq = q.sqrt();
                let half = r.scale(0.5);
                Coeffs { f: sq.recip(), w: [half, half, half * sq] }
            }
            (_, Link::Su2) => {
                let half = r.scale(0.5);
                Coeffs { f: T::one(), w: [half; 3] }
            }
            (_, Link::Sphere) => Coeffs { f: T::one(), w: [r; 3] },
        }
    }

    /// Volume of the link for unit frame coefficients, divided by |Γ|.
    pub fn link_volume(&self) -> f64 {
        let v = match self.link {
            Link::Sphere => sphere_area(self.dim),
            Link::Su2 => 16.0 * PI * PI,
        };
        v / self.gamma_order as f64
    }

    /// Riemannian density `dμ = vol(r) dr` including the link volume.
    pub fn volume_density(&self, r: f64) -> f64 {
        let core = match (self.kind, self.link) {
            // f · w1 w2 w3 simplifies; avoids ∞·0 at the bolt.
            (BackgroundKind::EguchiHanson, _) => r * r * r / 8.0,
            (_, Link::Su2) => r * r * r / 8.0,
            (_, Link::Sphere) => r.powi(self.dim as i32 - 1),
        };
        core * self.link_volume()
    }

    /// Inner-end treatment on `grid`.
    pub fn inner(&self, grid: &RadialGrid) -> Inner {
        match self.kind {
            BackgroundKind::EguchiHanson if grid.r_min() <= self.bolt * (1.0 + 1e-12) => Inner::Bolt,
            BackgroundKind::Euclidean if grid.r_min() == 0.0 => Inner::Origin,
            _ => Inner::Boundary,
        }
    }

    /// Checks that `grid` lies in the domain of this background.
    pub fn validate_grid(&self, grid: &RadialGrid) -> Result<()> {
        if grid.dim() != self.dim {
            return invalid(format!("grid dimension {} differs from background dimension {}", grid.dim(), self.dim));
        }
        match self.kind {
            BackgroundKind::Cone if grid.r_min() <= 0.0 => {
                invalid("cone backgrounds need r_min > 0 (orbifold apex excluded)")
            }
            BackgroundKind::EguchiHanson if grid.r_min() < self.bolt * (1.0 - 1e-12) => {
                invalid(format!("Eguchi–Hanson grid must start at r >= a = {}", self.bolt))
            }
            _ => Ok(()),
        }
    }

    /// Geodesic distance from the base point (inner end) to each node,
    /// `s(r) = ∫ f dr`.
    pub fn distances(&self, grid: &RadialGrid) -> Vec<f64> {
        let mut s = vec![0.0; grid.len()];
        let r0 = grid.r_min();
        for i in 1..grid.len() {
            let (a, b) = (grid.r(i - 1), grid.r(i));
            let piece = if self.kind == BackgroundKind::EguchiHanson && a <= r0 {
                super::quad::integrate_sqrt_endpoint(a, b, |r| self.coeffs(r).f)
            } else {
                super::quad::integrate(a, b, |r| self.coeffs(r).f)
            };
            s[i] = s[i - 1] + piece;
        }
        s
    }

    /// Weight ρ = √(1 + s²) at each node.
    pub fn rho(&self, grid: &RadialGrid) -> Vec<f64> {
        self.distances(grid).into_iter().map(|s| (1.0 + s * s).sqrt()).collect()
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return invalid(format!("dimension must be >= 3, got {n}"));
    }
    if n > MAX_DIM {
        return invalid(format!("dimension must be <= {MAX_DIM}, got {n}"));
    }
    Ok(())
}

/// Area of the unit (n−1)-sphere, 2π^{n/2}/Γ(n/2).
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half(n)
}

/// Γ(n/2) for a positive integer n.
fn gamma_half(n: usize) -> f64 {
    if n.is_multiple_of(2) {
        (1..n / 2).map(|k| k as f64).product()
    } else {
        let mut g = PI.sqrt();
        let mut x = 0.5;
        while x < n as f64 / 2.0 - 0.25 {
            g *= x;
            x += 1.0;
        }
        g
    }
}
