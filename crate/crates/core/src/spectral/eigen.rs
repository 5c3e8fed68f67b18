//! Deterministic symmetric eigen-solvers on banded generalized problems
//! `K x = λ M x` (M diagonal, positive).

use super::banded::{BandCholesky, SymBand};
use crate::error::{Error, Result};
use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Target residual `‖(M⁻¹K) v − λ v‖_M / ‖v‖_M`.
pub const RESIDUAL_TOL: f64 = 1e-9;
/// Accepted residual when the iteration stagnates.
pub const RESIDUAL_ACCEPT: f64 = 1e-8;
pub const MAX_ITER: usize = 400;

/// Eigenpairs of `M⁻¹K` with M-orthonormal vectors.
#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub shift: f64,
    pub iterations: usize,
}

/// `B + Σ c_i u_i u_iᵀ` solved through a Cholesky factor of `B` and Woodbury.
struct ShiftInvert {
    chol: BandCholesky,
    u: Vec<Vec<f64>>,
    binv_u: Vec<Vec<f64>>,
    cap: Option<nalgebra::LU<f64, nalgebra::Dyn, nalgebra::Dyn>>,
}

impl ShiftInvert {
    fn new(b: &SymBand, lowrank: &[(f64, Vec<f64>)]) -> Result<Self> {
        let chol = b.cholesky()?;
        let u: Vec<Vec<f64>> = lowrank.iter().map(|(_, u)| u.clone()).collect();
        let binv_u: Vec<Vec<f64>> = u.iter().map(|v| chol.solve(v)).collect();
        let cap = if u.is_empty() {
            None
        } else {
            let r = u.len();
            let mut cm = DMatrix::zeros(r, r);
            for i in 0..r {
                cm[(i, i)] = 1.0 / lowrank[i].0;
                for j in 0..r {
                    cm[(i, j)] += dot(&u[i], &binv_u[j]);
                }
            }
            Some(cm.lu())
        };
        Ok(Self { chol, u, binv_u, cap })
    }

    fn solve(&self, x: &[f64]) -> Vec<f64> {
        let mut y = self.chol.solve(x);
        if let Some(cap) = &self.cap {
            let rhs = DVector::from_iterator(self.u.len(), self.u.iter().map(|u| dot(u, &y)));
            let z = cap.solve(&rhs).expect("capacitance matrix singular");
            for (k, bu) in self.binv_u.iter().enumerate() {
                y.iter_mut().zip(bu).for_each(|(a, b)| *a -= z[k] * b);
            }
        }
        y
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn apply_sym(a: &SymBand, lowrank: &[(f64, Vec<f64>)], x: &[f64]) -> Vec<f64> {
    let mut y = a.matvec(x);
    for (c, u) in lowrank {
        let d = dot(u, x);
        y.iter_mut().zip(u).for_each(|(yi, ui)| *yi += c * d * ui);
    }
    y
}

/// The `m` smallest eigenpairs of `M⁻¹(K + Σ c u uᵀ)`.
pub fn lowest(k: &SymBand, lowrank: &[(f64, Vec<f64>)], mass: &[f64], m: usize, seed: u64) -> Result<Eigenpairs> {
    let n = k.n;
    if m == 0 || m > n {
        return Err(Error::InvalidInput(format!("cannot compute {m} eigenpairs of a {n}-dimensional operator")));
    }
    // Symmetric form A = M^{-1/2} K M^{-1/2}.
    let dinv: Vec<f64> = mass.iter().map(|x| 1.0 / x.sqrt()).collect();
    let a = k.scaled(&dinv);
    let lr: Vec<(f64, Vec<f64>)> =
        lowrank.iter().map(|(c, u)| (*c, u.iter().zip(&dinv).map(|(x, d)| x * d).collect())).collect();
    let p = (m + m.max(4)).min(n);
    // Shift just below the spectrum; walk further down until A − σ is definite.
    let (glo, ghi) = a.gershgorin();
    let scale = ghi.abs().max(glo.abs()).max(1e-300);
    let factor = |sigma: f64| ShiftInvert::new(&a.shifted(sigma), &lr);
    let mut sigma = -1e-9 * scale;
    let mut failed = None;
    let mut si = loop {
        match factor(sigma) {
            Ok(s) => break s,
            Err(_) if sigma > glo - scale => {
                failed = Some(sigma);
                sigma = 10.0 * sigma - 1e-9 * scale;
            }
            Err(e) => return Err(e),
        }
    };
    // A negative eigenvalue lies in (sigma, failed]; a shift far below it
    // stalls the iteration on the rest of the spectrum, so close in on it.
    if let Some(mut hi) = failed {
        let mut lo = sigma;
        while hi - lo > 1e-3 * lo.abs() {
            let mid = 0.5 * (lo + hi);
            if factor(mid).is_ok() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        sigma = lo - 1e-2 * lo.abs();
        si = factor(sigma)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x = DMatrix::from_fn(n, p, |_, _| rng.gen_range(-1.0..1.0));
    let mut best = f64::INFINITY;
    let mut out = None;
    for it in 1..=MAX_ITER {
        let mut y = DMatrix::zeros(n, p);
        for c in 0..p {
            let col: Vec<f64> = x.column(c).iter().copied().collect();
            let s = si.solve(&col);
            y.set_column(c, &DVector::from_vec(s));
        }
        let q = y.qr().q();
        let mut aq = DMatrix::zeros(n, p);
        for c in 0..p {
            let col: Vec<f64> = q.column(c).iter().copied().collect();
            aq.set_column(c, &DVector::from_vec(apply_sym(&a, &lr, &col)));
        }
        let h = q.transpose() * &aq;
        let h = (&h + h.transpose()) * 0.5;
        let eig = SymmetricEigen::new(h);
        let mut order: Vec<usize> = (0..p).collect();
        order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
        let vs = DMatrix::from_fn(p, p, |r, c| eig.eigenvectors[(r, order[c])]);
        let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        x = &q * &vs;
        let axs = &aq * &vs;
        let res: Vec<f64> = (0..m).map(|c| (axs.column(c) - x.column(c) * theta[c]).norm()).collect();
        let worst = res.iter().fold(0.0_f64, |a, &b| a.max(b));
        let done = worst <= RESIDUAL_TOL || it == MAX_ITER || (worst >= 0.999 * best && worst <= RESIDUAL_ACCEPT);
        best = best.min(worst);
        if done {
            if worst > RESIDUAL_ACCEPT {
                return Err(Error::NoConvergence { iterations: it, residual: worst });
            }
            let vectors = (0..m).map(|c| x.column(c).iter().zip(&dinv).map(|(v, d)| v * d).collect()).collect();
            out = Some(Eigenpairs { values: theta[..m].to_vec(), vectors, residuals: res, shift: sigma, iterations: it });
            break;
        }
    }
    out.ok_or(Error::NoConvergence { iterations: MAX_ITER, residual: best })
}

/// Largest eigenvalue of a symmetric operator restricted to the orthogonal
/// complement of `constraints` (orthonormal), by Lanczos with full
/// reorthogonalization.
pub fn lanczos_max(op: impl Fn(&[f64]) -> Vec<f64>, n: usize, constraints: &[Vec<f64>], seed: u64) -> (f64, Vec<f64>) {
    let project = |v: &mut Vec<f64>| {
        for z in constraints {
            let d = dot(z, v);
            v.iter_mut().zip(z).for_each(|(a, b)| *a -= d * b);
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    project(&mut q);
    let nq = dot(&q, &q).sqrt();
    q.iter_mut().for_each(|x| *x /= nq);
    let max_steps = (n - constraints.len()).clamp(1, 600);
    let mut basis: Vec<Vec<f64>> = vec![q];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut last = (0.0, basis[0].clone());
    for step in 0..max_steps {
        let mut w = op(&basis[step]);
        project(&mut w);
        let a = dot(&w, &basis[step]);
        alpha.push(a);
        for _ in 0..2 {
            for b in &basis {
                let d = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
            project(&mut w);
        }
        let bnorm = dot(&w, &w).sqrt();
        let k = alpha.len();
        let check = step % 10 == 9 || bnorm < 1e-14 || step + 1 == max_steps;
        if check {
            let t = DMatrix::from_fn(k, k, |i, j| {
                if i == j {
                    alpha[i]
                } else if i == j + 1 || j == i + 1 {
                    beta[i.min(j)]
                } else {
                    0.0
                }
            });
            let eig = SymmetricEigen::new(t);
            let (imax, theta) = eig.eigenvalues.iter().enumerate().fold((0, f64::NEG_INFINITY), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
            let s = eig.eigenvectors.column(imax);
            let mut vec = vec![0.0; n];
            for (j, b) in basis.iter().enumerate() {
                vec.iter_mut().zip(b).for_each(|(x, y)| *x += s[j] * y);
            }
            last = (theta, vec);
            let err = bnorm * s[k - 1].abs();
            if err <= 1e-12 * theta.abs().max(1.0) || bnorm < 1e-14 {
                break;
            }
        }
        if bnorm < 1e-14 {
            break;
        }
        beta.push(bnorm);
        w.iter_mut().for_each(|x| *x /= bnorm);
        basis.push(w);
    }
    last
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian(n: usize) -> SymBand {
        let mut a = SymBand::zeros(n, 1);
        for i in 0..n {
            a.add_lower(i, i, 2.0);
            if i > 0 {
                a.add_lower(i, i - 1, -1.0);
            }
        }
        a
    }

    #[test]
    fn dirichlet_laplacian_spectrum() {
        let n = 200;
        let e = lowest(&laplacian(n), &[], &vec![1.0; n], 4, 1).unwrap();
        for (k, v) in e.values.iter().enumerate() {
            let want = 2.0 - 2.0 * ((k + 1) as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
            assert!((v - want).abs() < 1e-10, "{k}: {v} vs {want}");
        }
        assert!(e.residuals.iter().all(|r| *r < 1e-8));
    }

    #[test]
    fn lanczos_finds_top() {
        let n = 100;
        let a = laplacian(n);
        let (top, _) = lanczos_max(|x| a.matvec(x), n, &[], 3);
        let want = 2.0 - 2.0 * (n as f64 * std::f64::consts::PI / (n + 1) as f64).cos();
        assert!((top - want).abs() < 1e-8, "{top} {want}");
    }
}
