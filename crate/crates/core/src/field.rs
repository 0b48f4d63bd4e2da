//! Prime field arithmetic `F_p` for odd primes, with the modulus fixed at
//! the type level.

use std::fmt;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, WeilError};
use crate::scalar::{FieldScalar, Scalar};

/// Trial-division primality test for odd moduli.
pub const fn is_odd_prime(p: u64) -> bool {
    if p < 3 || p.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Runtime validation of a modulus read from user input.
pub fn check_modulus(p: u64) -> Result<()> {
    if is_odd_prime(p) {
        Ok(())
    } else {
        Err(WeilError::InvalidModulus(p))
    }
}

/// A residue modulo the odd prime `P`.
///
/// Using an even or composite `P` is a compile-time error as soon as a
/// value is constructed:
///
/// ```compile_fail
/// let _ = weil_core::Fp::<9>::new(1);
/// ```
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Fp<const P: u32>(u32);

impl<const P: u32> Fp<P> {
    const VALID: () = assert!(is_odd_prime(P as u64), "modulus must be an odd prime");

    pub fn new(value: i64) -> Self {
        #[allow(clippy::let_unit_value)]
        let () = Self::VALID;
        Self(value.rem_euclid(P as i64) as u32)
    }

    pub const fn modulus() -> u32 {
        P
    }

    pub fn value(self) -> u32 {
        self.0
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn signed(self) -> i64 {
        let v = self.0 as i64;
        if v > P as i64 / 2 {
            v - P as i64
        } else {
            v
        }
    }

    pub fn pow(self, mut exp: u64) -> Self {
        let mut base = self;
        let mut acc = Self::new(1);
        while exp > 0 {
            if exp & 1 == 1 {
                acc *= base;
            }
            base *= base;
            exp >>= 1;
        }
        acc
    }

    pub fn inv(self) -> Result<Self> {
        if self.0 == 0 {
            return Err(WeilError::ZeroInverse);
        }
        Ok(self.pow(P as u64 - 2))
    }

    /// The element `1/2`, which exists since `p` is odd.
    pub fn half() -> Self {
        Self::new((P as i64 + 1) / 2)
    }

    /// Legendre character: `0` at zero, `+1` on nonzero squares, `-1` otherwise.
    pub fn legendre(self) -> i8 {
        if self.0 == 0 {
            return 0;
        }
        if self.pow((P as u64 - 1) / 2).0 == 1 {
            1
        } else {
            -1
        }
    }

    /// `(-1)^e` as a field element.
    pub fn sign(e: usize) -> Self {
        if e.is_multiple_of(2) {
            Self::new(1)
        } else {
            Self::new(-1)
        }
    }

    /// All residues `0, 1, ..., p-1` in order.
    pub fn elements() -> impl Iterator<Item = Self> {
        (0..P as i64).map(Self::new)
    }

    pub fn units() -> impl Iterator<Item = Self> {
        (1..P as i64).map(Self::new)
    }
}

impl<const P: u32> Default for Fp<P> {
    fn default() -> Self {
        Self::new(0)
    }
}

impl<const P: u32> fmt::Debug for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> fmt::Display for Fp<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<const P: u32> From<u32> for Fp<P> {
    fn from(v: u32) -> Self {
        Self::new(v as i64)
    }
}

impl<const P: u32> Add for Fp<P> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let s = self.0 + rhs.0;
        Self(if s >= P { s - P } else { s })
    }
}

impl<const P: u32> Sub for Fp<P> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(if self.0 >= rhs.0 { self.0 - rhs.0 } else { self.0 + P - rhs.0 })
    }
}

impl<const P: u32> Mul for Fp<P> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        Self(((self.0 as u64 * rhs.0 as u64) % P as u64) as u32)
    }
}

impl<const P: u32> Neg for Fp<P> {
    type Output = Self;
    fn neg(self) -> Self {
        Self(if self.0 == 0 { 0 } else { P - self.0 })
    }
}

/// Panics when dividing by zero, like integer division.
impl<const P: u32> Div for Fp<P> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Self) -> Self {
        self * rhs.inv().expect("division by zero in F_p")
    }
}

impl<const P: u32> AddAssign for Fp<P> {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<const P: u32> SubAssign for Fp<P> {
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<const P: u32> MulAssign for Fp<P> {
    fn mul_assign(&mut self, rhs: Self) {
        *self = *self * rhs;
    }
}

impl<const P: u32> Zero for Fp<P> {
    fn zero() -> Self {
        Self::new(0)
    }

    fn is_zero(&self) -> bool {
        self.0 == 0
    }
}

impl<const P: u32> One for Fp<P> {
    fn one() -> Self {
        Self::new(1)
    }
}

impl<const P: u32> Scalar for Fp<P> {}

impl<const P: u32> FieldScalar for Fp<P> {
    fn try_inverse(&self) -> Option<Self> {
        self.inv().ok()
    }
}

impl<const P: u32> Serialize for Fp<P> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_u32(self.0)
    }
}

impl<'de, const P: u32> Deserialize<'de> for Fp<P> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = i64::deserialize(d)?;
        Ok(Self::new(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F3 = Fp<3>;
    type F5 = Fp<5>;
    type F7 = Fp<7>;

    #[test]
    fn arithmetic_examples() {
        assert_eq!(F3::new(2) + F3::new(2), F3::new(1));
        assert_eq!(F5::new(4) * F5::new(4), F5::new(1));
        for a in F7::elements() {
            assert_eq!(F7::new(0) * a, F7::zero());
        }
        assert_eq!(F5::new(-1), F5::new(4));
        assert_eq!(F5::new(1) - F5::new(3), F5::new(3));
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(F3::new(2).inv().unwrap(), F3::new(2));
        assert_eq!(F7::new(1).inv().unwrap(), F7::new(1));
        // brute force search for 3^-1 in F_7
        let found = F7::elements().find(|b| F7::new(3) * *b == F7::one()).unwrap();
        assert_eq!(found, F7::new(5));
        assert_eq!(F7::new(3).inv().unwrap(), found);
        assert_eq!(F5::zero().inv(), Err(WeilError::ZeroInverse));
    }

    fn inverse_exhaustive<const P: u32>() {
        for a in Fp::<P>::units() {
            assert_eq!(a * a.inv().unwrap(), Fp::one());
        }
    }

    #[test]
    fn inverse_exhaustive_small_primes() {
        inverse_exhaustive::<3>();
        inverse_exhaustive::<5>();
        inverse_exhaustive::<7>();
        inverse_exhaustive::<11>();
        inverse_exhaustive::<13>();
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(F5::zero().legendre(), 0);
        assert_eq!(F5::one().legendre(), 1);
        // squares mod 5 are {1, 4}
        let squares: Vec<_> = F5::units().map(|x| x * x).collect();
        assert!(!squares.contains(&F5::new(2)));
        assert_eq!(F5::new(2).legendre(), -1);
    }

    fn legendre_properties<const P: u32>() {
        let squares: std::collections::BTreeSet<_> = Fp::<P>::units().map(|x| x * x).collect();
        for a in Fp::<P>::units() {
            let expected = if squares.contains(&a) { 1 } else { -1 };
            assert_eq!(a.legendre(), expected);
            for b in Fp::<P>::units() {
                assert_eq!((a * b).legendre(), a.legendre() * b.legendre());
            }
        }
        let residues = Fp::<P>::units().filter(|a| a.legendre() == 1).count();
        assert_eq!(residues, (P as usize - 1) / 2);
    }

    #[test]
    fn legendre_is_multiplicative() {
        legendre_properties::<3>();
        legendre_properties::<5>();
        legendre_properties::<7>();
        legendre_properties::<13>();
    }

    #[test]
    fn modulus_validation() {
        assert!(check_modulus(3).is_ok());
        assert!(check_modulus(13).is_ok());
        for bad in [0, 1, 2, 4, 9, 15, 21] {
            let err = check_modulus(bad).unwrap_err();
            assert!(err.to_string().contains("modulus must be an odd prime"));
        }
    }

    #[test]
    fn half_doubles_to_one() {
        assert_eq!(F3::half(), F3::new(2));
        assert_eq!(F5::half(), F5::new(3));
        assert_eq!(F7::half() + F7::half(), F7::one());
    }
}
