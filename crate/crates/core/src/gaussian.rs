//! Gaussian integers `a + bi` over any signed integer type.
//!
//! Every complex quantity in this crate (character values, structure
//! constants, convolution sums) lies in `Z[i]`, so the generic type is
//! instantiated at [`crate::HeckeCoeff`] (`BigInt`) for the pipeline and at
//! `i64` in tests.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use crate::residue::UnitI;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Gaussian<T> {
    pub re: T,
    pub im: T,
}

impl<T> Gaussian<T> {
    pub const fn new(re: T, im: T) -> Self {
        Gaussian { re, im }
    }
}

impl<T: Clone + Signed> Gaussian<T> {
    pub fn i() -> Self {
        Gaussian::new(T::zero(), T::one())
    }

    pub fn from_int(n: T) -> Self {
        Gaussian::new(n, T::zero())
    }

    pub fn conj(&self) -> Self {
        Gaussian::new(self.re.clone(), -self.im.clone())
    }

    /// `a² + b²`.
    pub fn norm(&self) -> T {
        self.re.clone() * self.re.clone() + self.im.clone() * self.im.clone()
    }

    /// True for the four units `±1, ±i`.
    pub fn is_unit(&self) -> bool {
        self.norm().is_one()
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base.clone();
            }
            base = base.clone() * base;
            exp >>= 1;
        }
        acc
    }
}

impl<T: Clone + Signed> From<UnitI> for Gaussian<T> {
    fn from(u: UnitI) -> Self {
        match u.exponent() {
            0 => Gaussian::new(T::one(), T::zero()),
            1 => Gaussian::new(T::zero(), T::one()),
            2 => Gaussian::new(-T::one(), T::zero()),
            _ => Gaussian::new(T::zero(), -T::one()),
        }
    }
}

impl<T: Clone + Signed> Zero for Gaussian<T> {
    fn zero() -> Self {
        Gaussian::new(T::zero(), T::zero())
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

impl<T: Clone + Signed> One for Gaussian<T> {
    fn one() -> Self {
        Gaussian::new(T::one(), T::zero())
    }
}

impl<T: Clone + Signed> Add for Gaussian<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Gaussian::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl<T: Clone + Signed> Sub for Gaussian<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Gaussian::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl<T: Clone + Signed> Mul for Gaussian<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let re = self.re.clone() * rhs.re.clone() - self.im.clone() * rhs.im.clone();
        let im = self.re * rhs.im + self.im * rhs.re;
        Gaussian::new(re, im)
    }
}

impl<T: Clone + Signed> Neg for Gaussian<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Gaussian::new(-self.re, -self.im)
    }
}

impl<T: Clone + Signed> AddAssign for Gaussian<T> {
    fn add_assign(&mut self, rhs: Self) {
        *self = self.clone() + rhs;
    }
}

impl<T: Clone + Signed> SubAssign for Gaussian<T> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = self.clone() - rhs;
    }
}

impl<T: Clone + Signed> MulAssign for Gaussian<T> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = self.clone() * rhs;
    }
}

impl<T: Clone + Signed> std::iter::Sum for Gaussian<T> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |a, b| a + b)
    }
}

impl<T: Clone + Signed + fmt::Display> fmt::Display for Gaussian<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im.is_zero() {
            write!(f, "{}", self.re)
        } else if self.re.is_zero() {
            match (self.im.is_one(), (-self.im.clone()).is_one()) {
                (true, _) => write!(f, "i"),
                (_, true) => write!(f, "-i"),
                _ => write!(f, "{}i", self.im),
            }
        } else if self.im.is_negative() {
            write!(f, "{}-{}i", self.re, self.im.abs())
        } else {
            write!(f, "{}+{}i", self.re, self.im)
        }
    }
}

impl<T: Clone + Signed + fmt::Display> Serialize for Gaussian<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    type G = Gaussian<i64>;

    fn small() -> impl Strategy<Value = G> {
        (-1000i64..1000, -1000i64..1000).prop_map(|(a, b)| G::new(a, b))
    }

    #[test]
    fn i_squared_is_minus_one() {
        assert_eq!(G::i() * G::i(), -G::one());
        assert_eq!(G::i().pow(4), G::one());
    }

    #[test]
    fn units_embed() {
        let vals: Vec<G> = (0..4).map(|k| UnitI::new(k).into()).collect();
        assert_eq!(vals, vec![G::one(), G::i(), -G::one(), -G::i()]);
        assert!(vals.iter().all(|u| u.is_unit()));
    }

    #[test]
    fn display() {
        assert_eq!(G::new(3, -2).to_string(), "3-2i");
        assert_eq!(G::new(0, -1).to_string(), "-i");
        assert_eq!(G::new(-4, 0).to_string(), "-4");
        assert_eq!(G::new(1, 5).to_string(), "1+5i");
    }

    proptest! {
        #[test]
        fn ring_axioms(a in small(), b in small(), c in small()) {
            prop_assert_eq!((a.clone() * b.clone()) * c.clone(), a.clone() * (b.clone() * c.clone()));
            prop_assert_eq!(a.clone() * (b.clone() + c.clone()), a.clone() * b.clone() + a.clone() * c.clone());
            prop_assert_eq!(a.clone() * b.clone(), b.clone() * a.clone());
            prop_assert_eq!((a.clone() * b.clone()).norm(), a.norm() * b.norm());
        }
    }
}
