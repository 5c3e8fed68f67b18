//! Analytic radial fields. Operators compose exactly: each wrapper
//! evaluates its input on nested duals to obtain the jets it needs.

use super::frame::{background_coeffs, variable2, Profile, Shape, R};
use super::pointwise::{self, Jets};
use crate::geometry::background::BackgroundMetric;
use crate::scalar::Real;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// A field whose block values can be evaluated at any scalar type.
pub trait RadialField {
    fn blocks(&self) -> usize;
    fn eval<T: Real>(&self, r: T) -> [T; R];
}

/// Slot jets of `f` at `r`.
pub fn jets_at<T: Real, F: RadialField>(f: &F, shape: &Shape, r: T) -> Jets<T> {
    let vals = f.eval(variable2(r));
    pointwise::slot_jets(shape, &vals[..f.blocks()])
}

/// Sum of Gaussian bumps, one amplitude vector per bump.
#[derive(Clone, Debug)]
pub struct Bumps {
    pub blocks: usize,
    pub bumps: Vec<(f64, f64, [f64; R])>,
}

impl Bumps {
    pub fn single(blocks: usize, center: f64, width: f64, amp: [f64; R]) -> Self {
        Self { blocks, bumps: vec![(center, width, amp)] }
    }

    /// Seeded random smooth field supported (numerically) in `[lo, hi]`.
    pub fn random(blocks: usize, lo: f64, hi: f64, count: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let span = hi - lo;
        let bumps = (0..count)
            .map(|_| {
                let c = lo + span * rng.gen_range(0.25..0.75);
                let w = span * rng.gen_range(0.06..0.15);
                let mut amp = [0.0; R];
                for a in amp.iter_mut().take(blocks) {
                    *a = rng.gen_range(-1.0..1.0);
                }
                (c, w, amp)
            })
            .collect();
        Self { blocks, bumps }
    }
}

impl RadialField for Bumps {
    fn blocks(&self) -> usize {
        self.blocks
    }
    fn eval<T: Real>(&self, r: T) -> [T; R] {
        let mut out = [T::zero(); R];
        for &(c, w, amp) in &self.bumps {
            let x = (r - T::from_f64(c)).scale(1.0 / w);
            let g = (-(x * x)).exp();
            for b in 0..self.blocks {
                out[b] += g.scale(amp[b]);
            }
        }
        out
    }
}

/// `amp · profile(r) · diag(block weights)` with profile `(a/r)^p`.
#[derive(Clone, Debug)]
pub struct PowerLaw {
    pub blocks: usize,
    pub scale: f64,
    pub power: i32,
    pub weights: [f64; R],
}

impl RadialField for PowerLaw {
    fn blocks(&self) -> usize {
        self.blocks
    }
    fn eval<T: Real>(&self, r: T) -> [T; R] {
        let p = (T::from_f64(self.scale) / r).powi(self.power);
        let mut out = [T::zero(); R];
        for b in 0..self.blocks {
            out[b] = p.scale(self.weights[b]);
        }
        out
    }
}

/// The invariant L²-kernel candidate of Eguchi–Hanson, `(a/r)⁴ diag(1, −1, −1, 1)`.
pub fn eguchi_hanson_mode(a: f64) -> PowerLaw {
    PowerLaw { blocks: 3, scale: a, power: 4, weights: [1.0, -1.0, 1.0, 0.0] }
}

macro_rules! tensor_op {
    ($(#[$m:meta])* $name:ident, $out_blocks:expr, |$p:ident, $c:ident, $h:ident, $shape:ident| $body:expr) => {
        $(#[$m])*
        pub struct $name<'a, F> {
            pub g0: &'a BackgroundMetric,
            pub inner: F,
        }
        impl<'a, F: RadialField> RadialField for $name<'a, F> {
            fn blocks(&self) -> usize {
                let $shape = Shape::of(self.g0);
                let _ = &$shape;
                $out_blocks
            }
            #[allow(unused_variables)]
            fn eval<T: Real>(&self, r: T) -> [T; R] {
                let $shape = Shape::of(self.g0);
                let $p = Profile::<T>::background(self.g0, r);
                let $c = background_coeffs(self.g0, r);
                let $h = jets_at(&self.inner, &$shape, r);
                $body
            }
        }
    };
}

fn blocks_out<T: Real>(shape: &Shape, slots: [T; R]) -> [T; R] {
    let mut out = [T::zero(); R];
    for (b, o) in out.iter_mut().enumerate().take(shape.blocks) {
        *o = slots[shape.block_rep(b)];
    }
    out
}

fn scalar_out<T: Real>(x: T) -> [T; R] {
    let mut out = [T::zero(); R];
    out[0] = x;
    out
}

tensor_op!(
    /// `L_{g0} h`.
    Lich, shape.blocks, |p, c, h, shape| blocks_out(&shape, pointwise::lichnerowicz(&p, &h))
);
tensor_op!(
    /// Rough Laplacian of a tensor field.
    RoughLap, shape.blocks, |p, c, h, shape| blocks_out(&shape, pointwise::rough_laplacian(&p, &h))
);
tensor_op!(
    /// `Φ(g0 + h)` through Ricci and the DeTurck field.
    RhsDirect, shape.blocks, |p, c, h, shape| blocks_out(&shape, pointwise::rhs_direct(&p, &c, &h))
);
tensor_op!(
    /// `tr_{g0} h` (scalar).
    Trace, 1, |p, c, h, shape| {
        let mut vals = [T::zero(); R];
        for s in 0..shape.slots() {
            vals[s] = h[s].re.re;
        }
        scalar_out(pointwise::trace(&shape, &vals))
    }
);
tensor_op!(
    /// Radial component of `div_{g0} h` (scalar profile).
    Div, 1, |p, c, h, shape| scalar_out(pointwise::divergence(&p, &h))
);
tensor_op!(
    /// Scalar Laplacian of block 0 of the input.
    ScalarLap, 1, |p, c, h, shape| scalar_out(pointwise::scalar_laplacian(&p, &h[0]))
);
tensor_op!(
    /// Rough Laplacian of the radial 1-form whose component is block 0.
    OneFormLap, 1, |p, c, h, shape| scalar_out(pointwise::oneform_laplacian(&p, &h[0]))
);
tensor_op!(
    /// Radial DeTurck component `V(g0 + h, g0)` (scalar profile).
    Deturck, 1, |p, c, h, shape| scalar_out(pointwise::deturck(&p, &h).re)
);

/// `s · f`.
pub struct Scaled<F>(pub f64, pub F);

impl<F: RadialField> RadialField for Scaled<F> {
    fn blocks(&self) -> usize {
        self.1.blocks()
    }
    fn eval<T: Real>(&self, r: T) -> [T; R] {
        let mut v = self.1.eval(r);
        v.iter_mut().for_each(|x| *x = x.scale(self.0));
        v
    }
}

/// Samples `f` on grid nodes, node-major.
pub fn sample<F: RadialField>(f: &F, nodes: &[f64]) -> Vec<f64> {
    let nb = f.blocks();
    let mut out = Vec::with_capacity(nodes.len() * nb);
    for &r in nodes {
        let v = f.eval(r);
        out.extend_from_slice(&v[..nb]);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eguchi_hanson_mode_is_tt_and_harmonic() {
        let g0 = BackgroundMetric::eguchi_hanson(1.0).unwrap();
        let k = eguchi_hanson_mode(1.0);
        for r in [1.05, 1.5, 3.0, 9.0] {
            let lh = Lich { g0: &g0, inner: k.clone() }.eval(r);
            assert!(lh.iter().all(|x| x.abs() < 1e-12), "r={r} {lh:?}");
            assert!(Trace { g0: &g0, inner: k.clone() }.eval(r)[0].abs() < 1e-15);
            assert!(Div { g0: &g0, inner: k.clone() }.eval(r)[0].abs() < 1e-12);
        }
    }
}
