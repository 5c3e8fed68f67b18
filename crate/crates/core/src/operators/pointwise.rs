//! Pointwise operators on diagonal invariant tensors, generic over the
//! scalar type. Fields enter as second-order jets per frame slot.

use super::frame::{Profile, Shape, R};
use crate::geometry::background::Coeffs;
use crate::scalar::{Dual, Real};
use crate::J2;

/// Field jets per frame slot (value, d/dr, d²/dr²).
pub type Jets<T> = [J2<T>; R];

#[inline]
fn v<T: Real>(x: &J2<T>) -> T {
    x.re.re
}
#[inline]
fn d1<T: Real>(x: &J2<T>) -> T {
    x.re.eps
}
#[inline]
fn d2<T: Real>(x: &J2<T>) -> T {
    x.eps.eps
}

/// Rough Laplacian `Δh` in the profile's own frame.
pub fn rough_laplacian<T: Real>(p: &Profile<T>, h: &Jets<T>) -> [T; R] {
    let s = &p.shape;
    let inv_a2 = (p.a.re * p.a.re).recip();
    let mut out = [T::zero(); R];
    for a in 0..s.slots() {
        let mut acc = (d2(&h[a]) + d1(&h[a]) * p.dlogvol) * inv_a2;
        for c in 0..s.slots() {
            if c != a {
                acc -= p.pair[a][c].scale(s.mult[c] as f64) * (v(&h[a]) - v(&h[c]));
            }
        }
        out[a] = acc;
    }
    out
}

/// `(R̊h)_aa = Σ_c K_ac h_c` over frame directions c ≠ a.
pub fn curvature_action<T: Real>(p: &Profile<T>, h: &Jets<T>) -> [T; R] {
    let s = &p.shape;
    let mut out = [T::zero(); R];
    for a in 0..s.slots() {
        let mut acc = T::zero();
        for c in 0..s.slots() {
            let m = if c == a { s.mult[c] as f64 - 1.0 } else { s.mult[c] as f64 };
            if m > 0.0 {
                acc += p.sec[a][c].scale(m) * v(&h[c]);
            }
        }
        out[a] = acc;
    }
    out
}

/// Lichnerowicz Laplacian `Δh + 2R̊h − Ric∘h − h∘Ric`.
pub fn lichnerowicz<T: Real>(p: &Profile<T>, h: &Jets<T>) -> [T; R] {
    let mut out = rough_laplacian(p, h);
    let rh = curvature_action(p, h);
    for a in 0..p.shape.slots() {
        out[a] += rh[a].scale(2.0) - (p.ric[a] * v(&h[a])).scale(2.0);
    }
    out
}

pub fn trace<T: Real>(shape: &Shape, h: &[T; R]) -> T {
    let mut t = T::zero();
    for a in 0..shape.slots() {
        t += h[a].scale(shape.mult[a] as f64);
    }
    t
}

/// Radial component of `div h`.
pub fn divergence<T: Real>(p: &Profile<T>, h: &Jets<T>) -> T {
    let mut acc = d1(&h[0]) / p.a.re;
    for i in 1..p.shape.slots() {
        acc += (p.k[i - 1].re * (v(&h[0]) - v(&h[i]))).scale(p.shape.mult[i] as f64);
    }
    acc
}

pub fn scalar_laplacian<T: Real>(p: &Profile<T>, u: &J2<T>) -> T {
    (d2(u) + d1(u) * p.dlogvol) / (p.a.re * p.a.re)
}

/// Rough Laplacian of the radial 1-form `φ e⁰`, radial component.
pub fn oneform_laplacian<T: Real>(p: &Profile<T>, phi: &J2<T>) -> T {
    let mut acc = scalar_laplacian(p, phi);
    for i in 1..p.shape.slots() {
        let k = p.k[i - 1].re;
        acc -= (k * k * v(phi)).scale(p.shape.mult[i] as f64);
    }
    acc
}

/// Radial component of `V^k = g^{ij}(Γ(g) − Γ(g0))^k_{ij}` in the `g0`
/// frame, with its r-derivative. `p0` is the background profile.
pub fn deturck<T: Real>(p0: &Profile<T>, h: &Jets<T>) -> Dual<T> {
    let one = Dual::<T>::constant(T::one());
    let half = Dual::<T>::constant(T::from_f64(0.5));
    let f = p0.a;
    let g0 = one + h[0].re;
    let mut acc = half * h[0].eps / (f * g0);
    for i in 1..p0.shape.slots() {
        let gi = one + h[i].re;
        let term = (p0.k[i - 1] * (h[0].re - h[i].re) - half * h[i].eps / f) / gi;
        acc += term * Dual::constant(T::from_f64(p0.shape.mult[i] as f64));
    }
    acc / g0
}

/// `𝓛_V g` for `V = v e_0` and `g = g0 + h`, in the `g0` frame.
pub fn lie_radial<T: Real>(p0: &Profile<T>, vf: Dual<T>, h: &Jets<T>) -> [T; R] {
    let f = p0.a.re;
    let mut out = [T::zero(); R];
    out[0] = (vf.re * d1(&h[0]) + (T::one() + v(&h[0])) * vf.eps.scale(2.0)) / f;
    for i in 1..p0.shape.slots() {
        out[i] = vf.re * d1(&h[i]) / f + ((T::one() + v(&h[i])) * p0.k[i - 1].re * vf.re).scale(2.0);
    }
    out
}

/// `Ric(g0 + h)` in the `g0` frame.
pub fn ricci_metric<T: Real>(shape: Shape, c: &Coeffs<J2<T>>, h: &Jets<T>) -> [T; R] {
    let p = Profile::metric(shape, c, h);
    let mut out = [T::zero(); R];
    for a in 0..shape.slots() {
        out[a] = p.ric[a] * (T::one() + v(&h[a]));
    }
    out
}

/// `Φ(g) = −2Ric(g) + 𝓛_{V(g, g0)} g` via Ricci and the DeTurck field.
pub fn rhs_direct<T: Real>(p0: &Profile<T>, c: &Coeffs<J2<T>>, h: &Jets<T>) -> [T; R] {
    let ric = ricci_metric(p0.shape, c, h);
    let vf = deturck(p0, h);
    let lie = lie_radial(p0, vf, h);
    let mut out = [T::zero(); R];
    for a in 0..p0.shape.slots() {
        out[a] = lie[a] - ric[a].scale(2.0);
    }
    out
}

/// Expands block jets to slot jets. Missing blocks (scalar inputs) read as 0.
pub fn slot_jets<T: Real>(shape: &Shape, blocks: &[J2<T>]) -> Jets<T> {
    let zero = J2::<T>::constant(Dual::constant(T::zero()));
    let mut out = [zero; R];
    for s in 0..shape.slots() {
        out[s] = blocks.get(shape.rep_block[s]).copied().unwrap_or(zero);
    }
    out
}

/// Collapses slot values to block values.
pub fn to_blocks<T: Real>(shape: &Shape, slots: &[T; R]) -> Vec<T> {
    (0..shape.blocks).map(|b| slots[shape.block_rep(b)]).collect()
}

#[cfg(test)]
mod tests {
    use super::super::frame::{background_coeffs, jet, Shape};
    use super::*;
    use crate::geometry::background::BackgroundMetric;

    fn jets_from(shape: &Shape, vals: &[(f64, f64, f64)]) -> Jets<f64> {
        let blocks: Vec<_> = vals.iter().map(|&(a, b, c)| jet(a, b, c)).collect();
        slot_jets(shape, &blocks)
    }

    #[test]
    fn background_is_stationary() {
        for g0 in [BackgroundMetric::euclidean(4).unwrap(), BackgroundMetric::eguchi_hanson(1.0).unwrap()] {
            let shape = Shape::of(&g0);
            let zero = vec![(0.0, 0.0, 0.0); shape.blocks];
            for r in [1.3, 3.0] {
                let p0 = Profile::background(&g0, r);
                let c = background_coeffs(&g0, r);
                let phi = rhs_direct(&p0, &c, &jets_from(&shape, &zero));
                assert!(phi.iter().all(|x| x.abs() < 1e-12), "{phi:?}");
            }
        }
    }

    #[test]
    fn scaled_background_is_stationary() {
        let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
        let shape = Shape::of(&g0);
        let h = jets_from(&shape, &[(0.7, 0.0, 0.0); 3]);
        let p0 = Profile::background(&g0, 1.7);
        let c = background_coeffs(&g0, 1.7);
        assert!(deturck(&p0, &h).re.abs() < 1e-14);
        assert!(rhs_direct(&p0, &c, &h).iter().all(|x| x.abs() < 1e-12));
    }

    #[test]
    fn metric_is_lichnerowicz_harmonic() {
        let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
        let shape = Shape::of(&g0);
        let h = jets_from(&shape, &[(1.0, 0.0, 0.0); 3]);
        let p0 = Profile::background(&g0, 2.2);
        let lh = lichnerowicz(&p0, &h);
        assert!(lh.iter().all(|x| x.abs() < 1e-12), "{lh:?}");
        assert!((trace(&shape, &[1.0; 4]) - 4.0).abs() < 1e-15);
        assert!(divergence(&p0, &h).abs() < 1e-14);
    }
}
