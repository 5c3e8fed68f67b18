//! Scalar abstraction shared by every pointwise kernel.
//!
//! The frame calculus is written once over [`Real`] and instantiated with
//! `f64` for production, `f32` for cheap sweeps, and [`Dual`] whenever a
//! radial derivative (or a directional derivative in field space) of a
//! kernel output is needed.

use num_traits::{Float, One, Zero};
use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, DivAssign, Mul, MulAssign, Neg, Sub, SubAssign};

pub trait Real:
    Copy
    + Debug
    + PartialOrd
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Send
    + Sync
    + 'static
{
    fn from_f64(x: f64) -> Self;
    /// Leading (non-infinitesimal) part as `f64`.
    fn value(self) -> f64;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn powi(self, n: i32) -> Self;
    fn powf(self, p: f64) -> Self;

    fn abs(self) -> Self {
        if self.value() < 0.0 {
            -self
        } else {
            self
        }
    }

    fn recip(self) -> Self {
        Self::one() / self
    }

    fn scale(self, s: f64) -> Self {
        self * Self::from_f64(s)
    }
}

macro_rules! impl_real_float {
    ($t:ty) => {
        impl Real for $t {
            #[inline]
            fn from_f64(x: f64) -> Self {
                x as $t
            }
            #[inline]
            fn value(self) -> f64 {
                self as f64
            }
            #[inline]
            fn sqrt(self) -> Self {
                Float::sqrt(self)
            }
            #[inline]
            fn exp(self) -> Self {
                Float::exp(self)
            }
            #[inline]
            fn ln(self) -> Self {
                Float::ln(self)
            }
            #[inline]
            fn powi(self, n: i32) -> Self {
                Float::powi(self, n)
            }
            #[inline]
            fn powf(self, p: f64) -> Self {
                Float::powf(self, p as $t)
            }
        }
    };
}

impl_real_float!(f64);
impl_real_float!(f32);

/// First-order dual number `re + eps·ε`, ε² = 0.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Dual<T> {
    pub re: T,
    pub eps: T,
}

impl<T: Real> Dual<T> {
    #[inline]
    pub fn new(re: T, eps: T) -> Self {
        Self { re, eps }
    }

    #[inline]
    pub fn constant(re: T) -> Self {
        Self { re, eps: T::zero() }
    }

    /// The independent variable: `x + 1·ε`.
    #[inline]
    pub fn variable(x: T) -> Self {
        Self { re: x, eps: T::one() }
    }

    #[inline]
    fn chain(self, f: T, df: T) -> Self {
        Self { re: f, eps: self.eps * df }
    }
}

impl<T: Real> PartialOrd for Dual<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        self.re.partial_cmp(&other.re)
    }
}

impl<T: Real> Zero for Dual<T> {
    fn zero() -> Self {
        Self::constant(T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.eps.is_zero()
    }
}

impl<T: Real> One for Dual<T> {
    fn one() -> Self {
        Self::constant(T::one())
    }
}

impl<T: Real> Add for Dual<T> {
    type Output = Self;
    #[inline]
    fn add(self, o: Self) -> Self {
        Self::new(self.re + o.re, self.eps + o.eps)
    }
}

impl<T: Real> Sub for Dual<T> {
    type Output = Self;
    #[inline]
    fn sub(self, o: Self) -> Self {
        Self::new(self.re - o.re, self.eps - o.eps)
    }
}

impl<T: Real> Mul for Dual<T> {
    type Output = Self;
    #[inline]
    fn mul(self, o: Self) -> Self {
        Self::new(self.re * o.re, self.re * o.eps + self.eps * o.re)
    }
}

impl<T: Real> Div for Dual<T> {
    type Output = Self;
    #[inline]
    fn div(self, o: Self) -> Self {
        let inv = T::one() / o.re;
        let re = self.re * inv;
        Self::new(re, (self.eps - re * o.eps) * inv)
    }
}

impl<T: Real> Neg for Dual<T> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Self::new(-self.re, -self.eps)
    }
}

impl<T: Real> AddAssign for Dual<T> {
    fn add_assign(&mut self, o: Self) {
        *self = *self + o;
    }
}
impl<T: Real> SubAssign for Dual<T> {
    fn sub_assign(&mut self, o: Self) {
        *self = *self - o;
    }
}
impl<T: Real> MulAssign for Dual<T> {
    fn mul_assign(&mut self, o: Self) {
        *self = *self * o;
    }
}
impl<T: Real> DivAssign for Dual<T> {
    fn div_assign(&mut self, o: Self) {
        *self = *self / o;
    }
}

impl<T: Real> Real for Dual<T> {
    fn from_f64(x: f64) -> Self {
        Self::constant(T::from_f64(x))
    }
    fn value(self) -> f64 {
        self.re.value()
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, (s + s).recip())
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), self.re.recip())
    }
    fn powi(self, n: i32) -> Self {
        if n == 0 {
            return Self::one();
        }
        let lower = self.re.powi(n - 1);
        self.chain(lower * self.re, lower.scale(n as f64))
    }
    fn powf(self, p: f64) -> Self {
        let lower = self.re.powf(p - 1.0);
        self.chain(lower * self.re, lower.scale(p))
    }
}

/// Value, first and second radial derivative of a scalar.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Real> Jet2<T> {
    pub fn new(v: T, d1: T, d2: T) -> Self {
        Self { v, d1, d2 }
    }

    pub fn constant(v: T) -> Self {
        Self::new(v, T::zero(), T::zero())
    }

    /// `(v, d1)` as a dual number in r.
    #[inline]
    pub fn lower(&self) -> Dual<T> {
        Dual::new(self.v, self.d1)
    }

    /// `(d1, d2)` as a dual number in r.
    #[inline]
    pub fn upper(&self) -> Dual<T> {
        Dual::new(self.d1, self.d2)
    }
}

/// Evaluate `f` at `r` and return its 2-jet, using nested duals.
pub fn jet2_of<T: Real, F>(r: T, f: F) -> Jet2<T>
where
    F: Fn(Dual<Dual<T>>) -> Dual<Dual<T>>,
{
    let x = Dual::new(Dual::new(r, T::one()), Dual::new(T::one(), T::zero()));
    let y = f(x);
    Jet2::new(y.re.re, y.re.eps, y.eps.eps)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dual_derivatives_match_calculus() {
        let x = Dual::variable(2.0_f64);
        let y = (x * x + Dual::from_f64(1.0)).sqrt();
        assert!((y.re - 5.0_f64.sqrt()).abs() < 1e-15);
        assert!((y.eps - 2.0 / 5.0_f64.sqrt()).abs() < 1e-15);

        let z = x.powi(-3);
        assert!((z.eps + 3.0 / 16.0).abs() < 1e-15);
        let w = x.powf(0.5);
        assert!((w.eps - 0.5 / 2.0_f64.sqrt()).abs() < 1e-15);
        let e = (x.ln() * Dual::from_f64(3.0)).exp();
        assert!((e.re - 8.0).abs() < 1e-12 && (e.eps - 12.0).abs() < 1e-12);
    }

    #[test]
    fn nested_duals_give_second_derivative() {
        let j = jet2_of(0.7_f64, |r| r.powi(4) + r.exp());
        let want_d2 = 12.0 * 0.7_f64.powi(2) + 0.7_f64.exp();
        assert!((j.d2 - want_d2).abs() < 1e-12);
        assert!((j.d1 - (4.0 * 0.7_f64.powi(3) + 0.7_f64.exp())).abs() < 1e-12);
    }

    #[test]
    fn f32_instantiation() {
        let y: f32 = Real::sqrt(Real::from_f64(9.0));
        assert_eq!(y, 3.0);
    }
}
