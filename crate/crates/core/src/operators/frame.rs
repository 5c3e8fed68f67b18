//! Closed-form frame geometry of diagonal cohomogeneity-one metrics
//! `A² dr² + Σ B_i² e_i²`.
//!
//! Index convention for per-representative arrays: slot 0 is the radial
//! direction, slots 1..=reps are the link representatives.

use crate::geometry::background::{BackgroundMetric, Coeffs, Link};
use crate::scalar::{Dual, Real};
use crate::J2;

/// Radial slot plus up to three link representatives.
pub const R: usize = 4;

/// Link layout shared by every profile of one background.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shape {
    pub link: Link,
    pub sign: f64,
    pub reps: usize,
    pub mult: [usize; R],
    /// Field block holding each representative.
    pub rep_block: [usize; R],
    pub blocks: usize,
}

impl Shape {
    pub fn of(g0: &BackgroundMetric) -> Self {
        let reps = g0.reps();
        let mut mult = [0; R];
        let mut rep_block = [0; R];
        mult[0] = 1;
        for i in 0..reps {
            mult[i + 1] = g0.rep_mult(i);
        }
        for (s, rb) in rep_block.iter_mut().enumerate().take(reps + 1) {
            *rb = g0.rep_block(s);
        }
        Self { link: g0.link(), sign: g0.su2_sign(), reps, mult, rep_block, blocks: g0.block_mults().len() }
    }

    pub fn slots(&self) -> usize {
        self.reps + 1
    }

    /// First representative slot of each block.
    pub fn block_rep(&self, b: usize) -> usize {
        (0..self.slots()).find(|&s| self.rep_block[s] == b).expect("block without representative")
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Profile<T> {
    pub shape: Shape,
    /// Radial coefficient with its r-derivative.
    pub a: Dual<T>,
    pub b: [Dual<T>; 3],
    /// `k_i = B_i'/(A B_i)` with r-derivative.
    pub k: [Dual<T>; 3],
    /// `Σ m_i B_i'/B_i − A'/A`.
    pub dlogvol: T,
    /// Milnor coefficients (zero for sphere links).
    pub lam: [T; 3],
    pub mu: [T; 3],
    pub ric: [T; R],
    /// Sectional curvatures between slots; the diagonal holds the value for
    /// two distinct directions of the same representative.
    pub sec: [[T; R]; R],
    /// `Σ_a 2 Γ_{a b c}²` for a frame pair (b, c) in the given slots.
    pub pair: [[T; R]; R],
}

/// The identity jet `r + ε`.
pub fn variable2<T: Real>(r: T) -> J2<T> {
    Dual::new(Dual::new(r, T::one()), Dual::new(T::one(), T::zero()))
}

/// Builds a jet from value, first and second derivative.
pub fn jet<T: Real>(v: T, d1: T, d2: T) -> J2<T> {
    Dual::new(Dual::new(v, d1), Dual::new(d1, d2))
}

pub fn constant2<T: Real>(v: T) -> J2<T> {
    jet(v, T::zero(), T::zero())
}

/// Background frame coefficients as jets at `r`.
pub fn background_coeffs<T: Real>(g0: &BackgroundMetric, r: T) -> Coeffs<J2<T>> {
    g0.coeffs(variable2(r))
}

impl<T: Real> Profile<T> {
    pub fn new(shape: Shape, a: J2<T>, b: [J2<T>; 3]) -> Self {
        let z = T::zero();
        let zd = Dual::constant(z);
        let reps = shape.reps;
        let mut bd = [zd; 3];
        let mut k = [zd; 3];
        let ad = a.re;
        let mut dlogvol = -(a.eps.re / a.re.re);
        for i in 0..reps {
            bd[i] = b[i].re;
            k[i] = b[i].eps / (ad * b[i].re);
            dlogvol += (b[i].eps.re / b[i].re.re).scale(shape.mult[i + 1] as f64);
        }
        let av = ad.re;
        let dk = |i: usize| k[i].eps / av;

        let mut lam = [z; 3];
        let mut mu = [z; 3];
        let mut ric_link = [z; 3];
        let mut sec = [[z; R]; R];
        let mut pair = [[z; R]; R];
        match shape.link {
            Link::Sphere => {
                let bv = bd[0].re;
                let inv2 = (bv * bv).recip();
                let m = shape.mult[1] as f64;
                ric_link[0] = inv2.scale(m - 1.0);
                sec[1][1] = inv2 - k[0].re * k[0].re;
            }
            Link::Su2 => {
                let bv = [bd[0].re, bd[1].re, bd[2].re];
                for i in 0..3 {
                    let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                    lam[i] = bv[i] / (bv[j] * bv[l]).scale(1.0 / shape.sign);
                }
                let half = (lam[0] + lam[1] + lam[2]).scale(0.5);
                for i in 0..3 {
                    mu[i] = half - lam[i];
                }
                for i in 0..3 {
                    let (j, l) = ((i + 1) % 3, (i + 2) % 3);
                    ric_link[i] = (mu[j] * mu[l]).scale(2.0);
                }
                for i in 0..3 {
                    for j in 0..3 {
                        if i != j {
                            let l = 3 - i - j;
                            sec[i + 1][j + 1] =
                                (ric_link[i] + ric_link[j] - ric_link[l]).scale(0.5) - k[i].re * k[j].re;
                            pair[i + 1][j + 1] = (mu[l] * mu[l]).scale(2.0);
                        }
                    }
                }
            }
        }
        for i in 0..reps {
            let kv = k[i].re;
            let s = -(dk(i) + kv * kv);
            sec[0][i + 1] = s;
            sec[i + 1][0] = s;
            pair[0][i + 1] = (kv * kv).scale(2.0);
            pair[i + 1][0] = pair[0][i + 1];
        }
        let mut ric = [z; R];
        for s in 1..=reps {
            ric[0] += sec[0][s].scale(shape.mult[s] as f64);
        }
        for s in 1..=reps {
            let mut acc = sec[s][0];
            for t in 1..=reps {
                let m = if t == s { shape.mult[t] as f64 - 1.0 } else { shape.mult[t] as f64 };
                acc += sec[s][t].scale(m);
            }
            ric[s] = acc;
        }
        let _ = ric_link;
        Self { shape, a: ad, b: bd, k, dlogvol, lam, mu, ric, sec, pair }
    }

    /// Profile of `g0` itself at radius `r`.
    pub fn background(g0: &BackgroundMetric, r: T) -> Self {
        let c = background_coeffs(g0, r);
        Self::new(Shape::of(g0), c.f, c.w)
    }

    /// Profile of `g = g0 + h`, with `h` given per slot in the `g0` frame.
    pub fn metric(shape: Shape, c: &Coeffs<J2<T>>, h: &[J2<T>; R]) -> Self {
        let one = J2::<T>::one();
        let a = c.f * (one + h[0]).sqrt();
        let mut b = c.w;
        for i in 0..shape.reps {
            b[i] = c.w[i] * (one + h[i + 1]).sqrt();
        }
        Self::new(shape, a, b)
    }

    /// Scalar curvature.
    pub fn scalar_curvature(&self) -> T {
        let mut s = self.ric[0];
        for i in 1..=self.shape.reps {
            s += self.ric[i].scale(self.shape.mult[i] as f64);
        }
        s
    }

    /// Largest frame curvature component magnitude (sectional curvatures).
    pub fn max_sectional(&self) -> f64 {
        let mut m: f64 = 0.0;
        for s in 0..self.shape.slots() {
            for t in 0..self.shape.slots() {
                m = m.max(self.sec[s][t].value().abs());
            }
        }
        m
    }
}

use num_traits::One;

#[cfg(test)]
mod tests {
    use super::*;

    fn max_ric(p: &Profile<f64>) -> f64 {
        p.ric.iter().take(p.shape.slots()).fold(0.0, |m, v| m.max(v.abs()))
    }

    #[test]
    fn flat_backgrounds_have_zero_curvature() {
        for g0 in [
            BackgroundMetric::euclidean(3).unwrap(),
            BackgroundMetric::euclidean(5).unwrap(),
            BackgroundMetric::cone(4, 3).unwrap(),
            BackgroundMetric::euclidean_su2(),
        ] {
            for r in [0.3, 1.0, 7.5] {
                let p = Profile::background(&g0, r);
                assert!(p.max_sectional() < 1e-14, "{:?} r={r}", g0.kind());
            }
        }
    }

    #[test]
    fn eguchi_hanson_is_ricci_flat_not_flat() {
        let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
        for r in [1.001, 1.2, 2.0, 10.0] {
            let p = Profile::background(&g0, r);
            assert!(max_ric(&p) < 1e-10 * p.max_sectional().max(1.0), "r={r} {:?}", p.ric);
            assert!(p.max_sectional() > 1e-6);
        }
        // |Rm| ~ a⁴/r⁶ far out.
        let p = Profile::background(&g0, 10.0);
        assert!(p.max_sectional() * 1e6 < 10.0);
    }

    #[test]
    fn curvature_scales_inversely() {
        let g0 = BackgroundMetric::euclidean(4).unwrap();
        let shape = Shape::of(&g0);
        let c = background_coeffs(&g0, 2.0);
        let one = constant2(1.0);
        // A scaled sphere link (B = c·r with c ≠ 1) is a cone with curvature ∝ 1/r².
        let s = constant2(1.5);
        let p1 = Profile::new(shape, one, [c.w[0] * s, c.w[1], c.w[2]]);
        let c4 = background_coeffs(&g0, 4.0);
        let p2 = Profile::new(shape, one, [c4.w[0] * s, c4.w[1], c4.w[2]]);
        assert!((p1.sec[1][1] / p2.sec[1][1] - 4.0).abs() < 1e-12);
    }
}
