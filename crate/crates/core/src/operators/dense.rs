//! Dense frame calculus: structure constants → Koszul connection →
//! Riemann tensor, plus the coordinate (Shi) form of the Ricci–DeTurck
//! right-hand side. Used for `GeometryData` and as an independent
//! cross-check of the closed forms in `frame`/`pointwise`.

use super::frame::{constant2, Shape, R};
use super::pointwise::Jets;
use crate::error::{Error, Result};
use crate::geometry::background::{BackgroundMetric, Coeffs, Link};
use crate::scalar::{Dual, Real};
use crate::J2;

#[inline]
fn i3(n: usize, a: usize, b: usize, c: usize) -> usize {
    (a * n + b) * n + c
}
#[inline]
fn i4(n: usize, a: usize, b: usize, c: usize, d: usize) -> usize {
    ((a * n + b) * n + c) * n + d
}

/// Orthonormal frame of a diagonal cohomogeneity-one metric with all
/// coefficients carried as r-duals.
#[derive(Clone, Debug)]
pub struct Frame<T> {
    pub n: usize,
    pub a: Dual<T>,
    /// Link coefficient per full frame index (index 0 unused).
    pub b: Vec<Dual<T>>,
    /// `c_{abc} = ⟨[e_a, e_b], e_c⟩`.
    pub c: Vec<Dual<T>>,
    /// `Γ_{abc} = ⟨∇_{e_a} e_b, e_c⟩`.
    pub gamma: Vec<Dual<T>>,
    link: Link,
}

impl<T: Real> Frame<T> {
    pub fn new(g0: &BackgroundMetric, a: J2<T>, b_reps: [J2<T>; 3]) -> Self {
        let n = g0.dim();
        let zero = Dual::constant(T::zero());
        let mut b = vec![zero; n];
        let mut bj = vec![constant2(T::one()); n];
        for (idx, bi) in b.iter_mut().enumerate().skip(1) {
            bj[idx] = b_reps[g0.index_rep(idx)];
            *bi = bj[idx].re;
        }
        let mut c = vec![zero; n * n * n];
        for i in 1..n {
            let k = bj[i].eps / (a.re * bj[i].re);
            c[i3(n, 0, i, i)] = -k;
            c[i3(n, i, 0, i)] = k;
        }
        if g0.link() == Link::Su2 {
            let s = Dual::constant(T::from_f64(g0.su2_sign()));
            for i in 1..4 {
                let (j, l) = (i % 3 + 1, (i + 1) % 3 + 1);
                let lam = s * b[i] / (b[j] * b[l]);
                c[i3(n, j, l, i)] = lam;
                c[i3(n, l, j, i)] = -lam;
            }
        }
        let half = Dual::constant(T::from_f64(0.5));
        let mut gamma = vec![zero; n * n * n];
        for x in 0..n {
            for y in 0..n {
                for z in 0..n {
                    gamma[i3(n, x, y, z)] =
                        half * (c[i3(n, x, y, z)] - c[i3(n, y, z, x)] + c[i3(n, z, x, y)]);
                }
            }
        }
        Self { n, a: a.re, b, c, gamma, link: g0.link() }
    }

    pub fn background(g0: &BackgroundMetric, c: &Coeffs<J2<T>>) -> Self {
        Self::new(g0, c.f, c.w)
    }

    /// Frame of `g0 + h` (h per slot, g0 frame).
    pub fn metric(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> Self {
        let one = constant2(T::one());
        let a = c.f * (one + h[0]).sqrt();
        let mut b = c.w;
        for i in 0..g0.reps() {
            b[i] = c.w[i] * (one + h[i + 1]).sqrt();
        }
        Self::new(g0, a, b)
    }

    #[inline]
    pub fn g(&self, a: usize, b: usize, c: usize) -> T {
        self.gamma[i3(self.n, a, b, c)].re
    }

    /// `e_a` applied to `Γ_{bcd}`.
    #[inline]
    fn dg(&self, a: usize, b: usize, c: usize, d: usize) -> T {
        if a == 0 {
            self.gamma[i3(self.n, b, c, d)].eps / self.a.re
        } else {
            T::zero()
        }
    }

    /// `R_{abcd} = ⟨R(e_a, e_b) e_c, e_d⟩`, sectional curvature `R_{abba}`.
    pub fn riemann(&self) -> Vec<T> {
        let n = self.n;
        let mut rm = vec![T::zero(); n * n * n * n];
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let mut v = self.dg(a, b, c, d) - self.dg(b, a, c, d);
                        for f in 0..n {
                            v += self.g(b, c, f) * self.g(a, f, d) - self.g(a, c, f) * self.g(b, f, d);
                            v -= self.c[i3(n, a, b, f)].re * self.g(f, c, d);
                        }
                        rm[i4(n, a, b, c, d)] = v;
                    }
                }
            }
        }
        if self.link == Link::Sphere {
            // Intrinsic curvature of the round link, invisible to the
            // (locally trivialised) structure constants.
            for i in 1..n {
                let kappa = (self.b[i].re * self.b[i].re).recip();
                for j in 1..n {
                    if i != j {
                        rm[i4(n, i, j, j, i)] += kappa;
                        rm[i4(n, i, j, i, j)] -= kappa;
                    }
                }
            }
        }
        rm
    }
}

/// Per-node connection and curvature of a metric in its own orthonormal frame.
#[derive(Clone, Debug)]
pub struct GeometryData<T> {
    pub n: usize,
    pub gamma: Vec<T>,
    pub rm: Vec<T>,
    pub ric: Vec<T>,
    pub scalar: T,
    /// Diagonal of `g^{-1}` in the `g0` frame.
    pub ginv: Vec<T>,
}

impl<T: Real> GeometryData<T> {
    pub fn from_frame(f: &Frame<T>, ginv: Vec<T>) -> Self {
        let n = f.n;
        let rm = f.riemann();
        let mut ric = vec![T::zero(); n * n];
        for b in 0..n {
            for c in 0..n {
                let mut s = T::zero();
                for a in 0..n {
                    s += rm[i4(n, a, b, c, a)];
                }
                ric[b * n + c] = s;
            }
        }
        let scalar = (0..n).fold(T::zero(), |s, a| s + ric[a * n + a]);
        Self { n, gamma: f.gamma.iter().map(|x| x.re).collect(), rm, ric, scalar, ginv }
    }

    pub fn rm(&self, a: usize, b: usize, c: usize, d: usize) -> T {
        self.rm[i4(self.n, a, b, c, d)]
    }

    /// Largest violation of `R_{abcd} = −R_{bacd} = R_{cdab}`.
    pub fn symmetry_residual(&self) -> f64 {
        let n = self.n;
        let mut m: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    for d in 0..n {
                        let x = self.rm(a, b, c, d);
                        m = m.max((x + self.rm(b, a, c, d)).value().abs());
                        m = m.max((x - self.rm(c, d, a, b)).value().abs());
                        m = m.max((x + self.rm(a, b, d, c)).value().abs());
                    }
                }
            }
        }
        m
    }

    pub fn max_ricci(&self) -> f64 {
        self.ric.iter().fold(0.0, |m, x| m.max(x.value().abs()))
    }

    pub fn max_riemann(&self) -> f64 {
        self.rm.iter().fold(0.0, |m, x| m.max(x.value().abs()))
    }
}

/// Connection and curvature of `g0 + h` at one radius.
pub fn connection_curvature<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> Result<GeometryData<T>> {
    let n = g0.dim();
    let shape = Shape::of(g0);
    let mut ginv = vec![T::zero(); n];
    for (a, gi) in ginv.iter_mut().enumerate() {
        let slot = if a == 0 { 0 } else { g0.index_rep(a) + 1 };
        let g = T::one() + h[slot].re.re;
        if !(g.value() > 0.0) {
            return Err(Error::NotPositiveDefinite { node: 0, r: f64::NAN });
        }
        *gi = g.recip();
    }
    let _ = shape;
    Ok(GeometryData::from_frame(&Frame::metric(g0, c, h), ginv))
}

/// Full-index diagonal of a slot field, as r-duals.
fn expand<T: Real>(g0: &BackgroundMetric, h: &Jets<T>) -> (Vec<Dual<T>>, Vec<Dual<T>>) {
    let n = g0.dim();
    let mut v = Vec::with_capacity(n);
    let mut d = Vec::with_capacity(n);
    for a in 0..n {
        let slot = if a == 0 { 0 } else { g0.index_rep(a) + 1 };
        v.push(h[slot].re);
        d.push(h[slot].eps);
    }
    (v, d)
}

/// `(∇_a h)_{bc}` for diagonal `h`, with r-derivatives.
pub fn nabla_h<T: Real>(f: &Frame<T>, hv: &[Dual<T>], hd: &[Dual<T>]) -> Vec<Dual<T>> {
    let n = f.n;
    let zero = Dual::constant(T::zero());
    let mut out = vec![zero; n * n * n];
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                let mut v = zero;
                if a == 0 && b == c {
                    v = hd[b] / f.a;
                }
                v -= f.gamma[i3(n, a, b, c)] * hv[c] + f.gamma[i3(n, a, c, b)] * hv[b];
                out[i3(n, a, b, c)] = v;
            }
        }
    }
    out
}

/// `Σ_a w_a (∇²h)_{a a c d}`.
fn traced_hessian<T: Real>(f: &Frame<T>, nh: &[Dual<T>], w: &[T]) -> Vec<T> {
    let n = f.n;
    let mut out = vec![T::zero(); n * n];
    for c in 0..n {
        for d in 0..n {
            let mut acc = T::zero();
            for a in 0..n {
                let mut v = if a == 0 { nh[i3(n, a, c, d)].eps / f.a.re } else { T::zero() };
                for x in 0..n {
                    v -= f.g(a, a, x) * nh[i3(n, x, c, d)].re
                        + f.g(a, c, x) * nh[i3(n, a, x, d)].re
                        + f.g(a, d, x) * nh[i3(n, a, c, x)].re;
                }
                acc += w[a] * v;
            }
            out[c * n + d] = acc;
        }
    }
    out
}

/// Norm² of `∇h` and `∇²h` for a diagonal field on the background frame.
pub fn derivative_norms<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> (T, T) {
    let f = Frame::background(g0, c);
    let (hv, hd) = expand(g0, h);
    let nh = nabla_h(&f, &hv, &hd);
    let n = f.n;
    let first = nh.iter().fold(T::zero(), |s, x| s + x.re * x.re);
    let mut second = T::zero();
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                for d in 0..n {
                    let mut v = if a == 0 { nh[i3(n, b, cc, d)].eps / f.a.re } else { T::zero() };
                    for x in 0..n {
                        v -= f.g(a, b, x) * nh[i3(n, x, cc, d)].re
                            + f.g(a, cc, x) * nh[i3(n, b, x, d)].re
                            + f.g(a, d, x) * nh[i3(n, b, cc, x)].re;
                    }
                    second += v * v;
                }
            }
        }
    }
    (first, second)
}

/// Coordinate form of `Φ(g0 + h)`:
///
/// `g^{ab}∇²_{ab}g_ij − g^{ab}g_ip g0^{pq}(R_{jaqb} + R_{iaqb})
///  + ½g^{ab}g^{pq}(∇_i g_pa ∇_j g_qb + 2∇_a g_jp ∇_q g_ib − 2∇_a g_jp ∇_b g_iq
///  + s·2∇_j g_pa ∇_b g_iq + s·2∇_i g_pa ∇_b g_jq)`
///
/// with `R_{jaqb}` the curvature of `g0` in the convention where
/// `Σ_a R_{jaia} = Ric_ij`, and `s = −1` for the correct equation.
pub fn rhs_shi_signed<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>, s: f64) -> [T; R] {
    let f = Frame::background(g0, c);
    let n = f.n;
    let rm = f.riemann();
    // Convention switch: R^S_{jaqb} = R_{jabq}.
    let rs = |j: usize, a: usize, q: usize, b: usize| rm[i4(n, j, a, b, q)];
    let (hv, hd) = expand(g0, h);
    let gl: Vec<T> = hv.iter().map(|x| T::one() + x.re).collect();
    let gi: Vec<T> = gl.iter().map(|x| x.recip()).collect();
    let nh = nabla_h(&f, &hv, &hd);
    let nn = |x: usize, y: usize, z: usize| nh[i3(n, x, y, z)].re;
    let hess = traced_hessian(&f, &nh, &gi);
    let mut full = vec![T::zero(); n];
    for i in 0..n {
        let j = i;
        let mut v = hess[i * n + j];
        for a in 0..n {
            // g_ip g0^{pq} = G_i δ_iq.
            v -= gi[a] * gl[i] * (rs(j, a, i, a) + rs(i, a, j, a));
        }
        let mut quad = T::zero();
        for a in 0..n {
            for p in 0..n {
                let w = gi[a] * gi[p];
                let t = nn(i, p, a) * nn(j, p, a) + (nn(a, j, p) * nn(p, i, a)).scale(2.0)
                    - (nn(a, j, p) * nn(a, i, p)).scale(2.0)
                    + (nn(j, p, a) * nn(a, i, p)).scale(2.0 * s)
                    + (nn(i, p, a) * nn(a, j, p)).scale(2.0 * s);
                quad += w * t;
            }
        }
        full[i] = v + quad.scale(0.5);
    }
    let mut out = [T::zero(); R];
    for slot in 0..=g0.reps() {
        let a = if slot == 0 { 0 } else { (1..n).find(|&a| g0.index_rep(a) == slot - 1).unwrap() };
        out[slot] = full[a];
    }
    out
}

pub fn rhs_shi<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> [T; R] {
    rhs_shi_signed(g0, c, h, -1.0)
}

/// `C^c_{ab} = (Γ(g) − Γ(g0))` along `e_c`, assembled from the Koszul
/// connection of `g` itself.
fn christoffel_difference<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> (Vec<T>, Vec<T>) {
    let f0 = Frame::background(g0, c);
    let fg = Frame::metric(g0, c, h);
    let n = f0.n;
    let (hv, hd) = expand(g0, h);
    let s: Vec<T> = hv.iter().map(|x| (T::one() + x.re).sqrt()).collect();
    let mut diff = vec![T::zero(); n * n * n];
    for a in 0..n {
        for b in 0..n {
            for cc in 0..n {
                let mut v = s[a] * s[b] * fg.g(a, b, cc) / s[cc] - f0.g(a, b, cc);
                if a == 0 && b == cc {
                    // e_0(s_b)/s_b = h_b'/(2F G_b)
                    v += hd[b].re / (f0.a.re * (T::one() + hv[b].re)).scale(2.0);
                }
                diff[i3(n, a, b, cc)] = v;
            }
        }
    }
    let gi = hv.iter().map(|x| (T::one() + x.re).recip()).collect();
    (diff, gi)
}

/// `C^0_{aa}` for every frame index `a`.
pub fn christoffel_radial<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> Vec<T> {
    let (d, _) = christoffel_difference(g0, c, h);
    let n = g0.dim();
    (0..n).map(|a| d[i3(n, a, a, 0)]).collect()
}

/// Radial DeTurck component from `g^{ab} C^0_{ab}`, via `g`'s own connection.
pub fn deturck_koszul<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> T {
    let (d, gi) = christoffel_difference(g0, c, h);
    let n = g0.dim();
    (0..n).fold(T::zero(), |s, a| s + gi[a] * d[i3(n, a, a, 0)])
}

/// Radial component of `div_g g0 − ½ d tr_g g0` (lowered with `g0`).
pub fn deturck_intrinsic<T: Real>(g0: &BackgroundMetric, c: &Coeffs<J2<T>>, h: &Jets<T>) -> T {
    let (d, gi) = christoffel_difference(g0, c, h);
    let n = g0.dim();
    let f = c.f.re.re;
    let (hv, hd) = expand(g0, h);
    let mut div = T::zero();
    let mut dtr = T::zero();
    for a in 0..n {
        // (∇^g_a g0)_{b c} = −C^c_{ab} − C^b_{ac}
        div -= gi[a] * (d[i3(n, a, a, 0)] + d[i3(n, a, 0, a)]);
        let g = T::one() + hv[a].re;
        dtr -= hd[a].re / (f * g * g);
    }
    div - dtr.scale(0.5)
}

#[cfg(test)]
mod tests {
    use super::super::frame::{background_coeffs, Profile};
    use super::*;

    #[test]
    fn flat_su2_frame_is_flat() {
        let g0 = BackgroundMetric::euclidean_su2();
        let c = background_coeffs(&g0, 1.7);
        let gd = GeometryData::from_frame(&Frame::background(&g0, &c), vec![1.0; 4]);
        assert!(gd.max_riemann() < 1e-14, "{}", gd.max_riemann());
    }

    #[test]
    fn dense_matches_closed_form_on_eguchi_hanson() {
        let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
        for r in [1.1, 2.0, 5.0] {
            let c = background_coeffs(&g0, r);
            let gd = GeometryData::from_frame(&Frame::background(&g0, &c), vec![1.0; 4]);
            let p = Profile::background(&g0, r);
            assert!(gd.symmetry_residual() < 1e-12);
            assert!(gd.max_ricci() < 1e-10);
            assert!((gd.rm(0, 3, 3, 0) - p.sec[0][3]).abs() < 1e-10);
            assert!((gd.rm(1, 2, 2, 1) - p.sec[1][2]).abs() < 1e-10);
            assert!((gd.rm(1, 3, 3, 1) - p.sec[1][3]).abs() < 1e-10);
        }
    }

    #[test]
    fn round_link_has_einstein_constant() {
        // The (n−1)-sphere link on its own: Ric = (n−2)/r² in an orthonormal frame.
        let g0 = BackgroundMetric::euclidean(5).unwrap();
        let c = background_coeffs(&g0, 2.0);
        let f = Frame::background(&g0, &c);
        let rm = f.riemann();
        let n = 5;
        let link_ric: f64 = (1..n).map(|a| rm[i4(n, a, 1, 1, a)]).sum::<f64>()
            + (1..n).map(|a| f.g(a, a, 0) * f.g(1, 1, 0)).sum::<f64>()
            - (1..n).map(|a| f.g(a, 1, 0) * f.g(1, a, 0)).sum::<f64>();
        assert!((link_ric - 3.0 / 4.0).abs() < 1e-12, "{link_ric}");
    }
}
