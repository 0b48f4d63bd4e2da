//! Scalar traits shared by the dense linear algebra.
//!
//! The engine works over three kinds of scalars: residues in `F_p` for the
//! symplectic geometry, exact cyclotomic numbers for representation spaces,
//! and floating complex numbers for unitarity spot checks. Matrix code is
//! written once against these traits.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{One, Zero};

/// Commutative ring element usable as a matrix entry.
///
/// The `*_ref` methods let bignum-backed types avoid clones in inner loops;
/// the defaults suit `Copy` types.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn mul_ref(&self, rhs: &Self) -> Self {
        self.clone() * rhs.clone()
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self.clone() + rhs.clone()
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self.clone() - rhs.clone()
    }
}

/// A scalar with exact multiplicative inverses; enables elimination.
pub trait FieldScalar: Scalar {
    fn try_inverse(&self) -> Option<Self>;
}

impl Scalar for f64 {}
impl Scalar for f32 {}
impl Scalar for Complex<f64> {}
impl Scalar for Complex<f32> {}

impl FieldScalar for f64 {
    fn try_inverse(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

impl FieldScalar for f32 {
    fn try_inverse(&self) -> Option<Self> {
        (*self != 0.0).then(|| 1.0 / self)
    }
}

impl Scalar for BigRational {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
}

impl FieldScalar for BigRational {
    fn try_inverse(&self) -> Option<Self> {
        (!self.is_zero()).then(|| self.recip())
    }
}

impl Scalar for BigInt {
    fn mul_ref(&self, rhs: &Self) -> Self {
        self * rhs
    }

    fn add_ref(&self, rhs: &Self) -> Self {
        self + rhs
    }

    fn sub_ref(&self, rhs: &Self) -> Self {
        self - rhs
    }
}
