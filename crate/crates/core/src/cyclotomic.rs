//! Exact arithmetic in the cyclotomic field `Q(ζ_p)`.
//!
//! Elements are stored over the power basis `1, ζ, ..., ζ^{p-2}` with a
//! single positive common denominator. Every result is reduced by
//! `1 + ζ + ... + ζ^{p-1} = 0` and by the gcd of numerators and
//! denominator, so two values are equal exactly when their representations
//! are.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Result, WeilError};
use crate::field::Fp;
use crate::matrix::Matrix;
use crate::scalar::{FieldScalar, Scalar};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CycNumber<const P: u32> {
    num: Vec<BigInt>,
    den: BigInt,
}

/// Floating value of a cyclotomic number under `ζ ↦ e^{2πi/p}`, with an
/// error bound `eps` on the distance to the exact complex value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexApprox {
    pub re: f64,
    pub im: f64,
    pub eps: f64,
}

impl ComplexApprox {
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re, self.im)
    }
}

const fn degree(p: u32) -> usize {
    p as usize - 1
}

impl<const P: u32> CycNumber<P> {
    fn from_parts(num: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(num.len(), degree(P));
        let mut out = Self { num, den };
        out.normalize();
        out
    }

    /// Folds a length-`p` coefficient vector over `ζ^0..ζ^{p-1}` into the
    /// power basis using `ζ^{p-1} = -(1 + ... + ζ^{p-2})`.
    fn from_full(mut full: Vec<BigInt>, den: BigInt) -> Self {
        debug_assert_eq!(full.len(), P as usize);
        let top = full.pop().expect("p >= 3");
        if !top.is_zero() {
            for c in full.iter_mut() {
                *c -= &top;
            }
        }
        Self::from_parts(full, den)
    }

    fn normalize(&mut self) {
        if self.num.iter().all(Zero::is_zero) {
            self.den = BigInt::one();
            return;
        }
        if self.den.is_negative() {
            self.den = -std::mem::take(&mut self.den);
            for c in self.num.iter_mut() {
                *c = -std::mem::take(c);
            }
        }
        if self.den.is_one() {
            return;
        }
        let mut g = self.den.clone();
        for c in &self.num {
            if g.is_one() {
                return;
            }
            if !c.is_zero() {
                g = g.gcd(c);
            }
        }
        if !g.is_one() {
            self.den /= &g;
            for c in self.num.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn from_integer(v: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn from_rational(r: BigRational) -> Self {
        let mut num = vec![BigInt::zero(); degree(P)];
        num[0] = r.numer().clone();
        Self::from_parts(num, r.denom().clone())
    }

    /// Builds `Σ c_i ζ^i` from exactly `p - 1` rational coefficients.
    pub fn from_coeffs(coeffs: &[BigRational]) -> Result<Self> {
        if coeffs.len() != degree(P) {
            return Err(WeilError::DimensionMismatch {
                expected: degree(P),
                found: coeffs.len(),
            });
        }
        let den = coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let num = coeffs
            .iter()
            .map(|c| c.numer() * (&den / c.denom()))
            .collect();
        Ok(Self::from_parts(num, den))
    }

    /// `ζ^e` for any integer exponent.
    pub fn zeta_pow(e: i64) -> Self {
        let e = e.rem_euclid(P as i64) as usize;
        let mut full = vec![BigInt::zero(); P as usize];
        full[e] = BigInt::one();
        Self::from_full(full, BigInt::one())
    }

    pub fn zeta() -> Self {
        Self::zeta_pow(1)
    }

    /// The coefficients over `1, ζ, ..., ζ^{p-2}`; always `p - 1` of them.
    pub fn coeffs(&self) -> Vec<BigRational> {
        self.num
            .iter()
            .map(|c| BigRational::new(c.clone(), self.den.clone()))
            .collect()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        BigRational::new(self.num[i].clone(), self.den.clone())
    }

    pub fn is_rational(&self) -> bool {
        self.num[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<BigRational> {
        self.is_rational().then(|| self.coeff(0))
    }

    pub fn scale_rational(&self, r: &BigRational) -> Self {
        let num = self.num.iter().map(|c| c * r.numer()).collect();
        Self::from_parts(num, &self.den * r.denom())
    }

    /// Image under the Galois automorphism `ζ ↦ ζ^j`, `j` prime to `p`.
    pub fn galois(&self, j: u32) -> Self {
        assert!(!j.is_multiple_of(P), "galois exponent must be prime to p");
        let mut full = vec![BigInt::zero(); P as usize];
        for (i, c) in self.num.iter().enumerate() {
            if !c.is_zero() {
                full[(i * j as usize) % P as usize] += c;
            }
        }
        Self::from_full(full, self.den.clone())
    }

    /// Complex conjugation, `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> Self {
        self.galois(P - 1)
    }

    /// Field norm down to `Q`: the product of all Galois conjugates.
    pub fn norm(&self) -> BigRational {
        let mut acc = self.clone();
        for j in 2..P {
            acc = acc.mul_ref(&self.galois(j));
        }
        acc.to_rational().expect("norm is rational")
    }

    pub fn inverse(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(WeilError::ZeroInverse);
        }
        let mut others = Self::one();
        for j in 2..P {
            others = others.mul_ref(&self.galois(j));
        }
        let norm = self
            .mul_ref(&others)
            .to_rational()
            .expect("norm is rational");
        Ok(others.scale_rational(&norm.recip()))
    }

    pub fn pow(&self, mut exp: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.mul_ref(&base);
            }
            base = base.mul_ref(&base);
            exp >>= 1;
        }
        acc
    }

    /// Numerical embedding at `ζ = e^{2πi/p}`.
    ///
    /// The bound accounts for rounding of each coefficient, of each root of
    /// unity, and of the accumulation.
    pub fn embed(&self) -> ComplexApprox {
        let u = f64::EPSILON;
        let mut acc = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        let step = std::f64::consts::TAU / P as f64;
        for (i, c) in self.num.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let coeff = BigRational::new(c.clone(), self.den.clone())
                .to_f64()
                .unwrap_or(f64::NAN);
            let angle = step * i as f64;
            acc += Complex64::new(angle.cos(), angle.sin()) * coeff;
            mass += coeff.abs();
        }
        let eps = mass * u * (16.0 + 2.0 * P as f64);
        ComplexApprox {
            re: acc.re,
            im: acc.im,
            eps,
        }
    }

    pub fn to_complex(&self) -> Complex64 {
        self.embed().value()
    }
}

impl<const P: u32> Zero for CycNumber<P> {
    fn zero() -> Self {
        Self {
            num: vec![BigInt::zero(); degree(P)],
            den: BigInt::one(),
        }
    }

    fn is_zero(&self) -> bool {
        self.num.iter().all(Zero::is_zero)
    }
}

impl<const P: u32> One for CycNumber<P> {
    fn one() -> Self {
        Self::from_integer(1)
    }
}

impl<const P: u32> Default for CycNumber<P> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<'a, const P: u32> Add<&'a CycNumber<P>> for &'a CycNumber<P> {
    type Output = CycNumber<P>;

    fn add(self, rhs: &'a CycNumber<P>) -> CycNumber<P> {
        if rhs.is_zero() {
            return self.clone();
        }
        if self.is_zero() {
            return rhs.clone();
        }
        if self.den == rhs.den {
            let num = self.num.iter().zip(&rhs.num).map(|(a, b)| a + b).collect();
            return CycNumber::from_parts(num, self.den.clone());
        }
        let den = self.den.lcm(&rhs.den);
        let fa = &den / &self.den;
        let fb = &den / &rhs.den;
        let num = self
            .num
            .iter()
            .zip(&rhs.num)
            .map(|(a, b)| a * &fa + b * &fb)
            .collect();
        CycNumber::from_parts(num, den)
    }
}

impl<'a, const P: u32> Sub<&'a CycNumber<P>> for &'a CycNumber<P> {
    type Output = CycNumber<P>;

    fn sub(self, rhs: &'a CycNumber<P>) -> CycNumber<P> {
        self + &(-rhs)
    }
}

impl<'a, const P: u32> Mul<&'a CycNumber<P>> for &'a CycNumber<P> {
    type Output = CycNumber<P>;

    fn mul(self, rhs: &'a CycNumber<P>) -> CycNumber<P> {
        if self.is_zero() || rhs.is_zero() {
            return CycNumber::zero();
        }
        if rhs.is_rational() {
            return self.scale_rational(&BigRational::new(rhs.num[0].clone(), rhs.den.clone()));
        }
        if self.is_rational() {
            return rhs.scale_rational(&BigRational::new(self.num[0].clone(), self.den.clone()));
        }
        let p = P as usize;
        let mut full = vec![BigInt::zero(); p];
        for (i, a) in self.num.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.num.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let k = (i + j) % p;
                full[k] += a * b;
            }
        }
        CycNumber::from_full(full, &self.den * &rhs.den)
    }
}

impl<const P: u32> Neg for &CycNumber<P> {
    type Output = CycNumber<P>;

    fn neg(self) -> CycNumber<P> {
        CycNumber {
            num: self.num.iter().map(|c| -c).collect(),
            den: self.den.clone(),
        }
    }
}

impl<const P: u32> Neg for CycNumber<P> {
    type Output = CycNumber<P>;

    fn neg(mut self) -> CycNumber<P> {
        for c in self.num.iter_mut() {
            *c = -std::mem::take(c);
        }
        self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $method:ident) => {
        impl<const P: u32> $tr for CycNumber<P> {
            type Output = CycNumber<P>;

            fn $method(self, rhs: CycNumber<P>) -> CycNumber<P> {
                (&self).$method(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl<const P: u32> Scalar for CycNumber<P> {
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

impl<const P: u32> FieldScalar for CycNumber<P> {
    fn try_inverse(&self) -> Option<Self> {
        self.inverse().ok()
    }
}

impl<const P: u32> Matrix<CycNumber<P>> {
    /// Entrywise complex embedding.
    pub fn embed(&self) -> Matrix<Complex64> {
        self.map(CycNumber::to_complex)
    }
}

/// The additive character `ψ(z) = ζ^z` of `F_p`.
pub fn psi<const P: u32>(z: Fp<P>) -> CycNumber<P> {
    CycNumber::zeta_pow(z.value() as i64)
}

/// The quadratic Gauss sum `G₁ = Σ_z ψ(z²/2)`.
pub fn gauss_sum<const P: u32>() -> CycNumber<P> {
    let half = Fp::<P>::half();
    let mut full = vec![BigInt::zero(); P as usize];
    for z in Fp::<P>::elements() {
        full[(half * z * z).value() as usize] += 1;
    }
    CycNumber::from_full(full, BigInt::one())
}

/// The Legendre character as a cyclotomic scalar; panics on zero.
pub fn sigma<const P: u32>(t: Fp<P>) -> CycNumber<P> {
    match t.legendre() {
        1 => CycNumber::one(),
        -1 => CycNumber::from_integer(-1),
        _ => panic!("Legendre character evaluated at zero"),
    }
}

fn fmt_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Human-readable form such as `1 + 2/3*z^2`, where `z` is `ζ_p`.
impl<const P: u32> fmt::Display for CycNumber<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs().iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (neg, mag) = if c.is_negative() { (true, -c) } else { (false, c.clone()) };
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, "{}", if neg { " - " } else { " + " })?;
            }
            first = false;
            let body = fmt_rational(&mag);
            match i {
                0 => write!(f, "{body}")?,
                _ => {
                    let monomial = if i == 1 { "z".to_string() } else { format!("z^{i}") };
                    if mag.is_one() {
                        write!(f, "{monomial}")?
                    } else {
                        write!(f, "{body}*{monomial}")?
                    }
                }
            }
        }
        Ok(())
    }
}

impl<const P: u32> fmt::Debug for CycNumber<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cyc<{P}>({self})")
    }
}

/// Serialized as a JSON array of `p - 1` strings `"num/den"`.
impl<const P: u32> Serialize for CycNumber<P> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let strings: Vec<String> = self
            .coeffs()
            .iter()
            .map(|c| format!("{}/{}", c.numer(), c.denom()))
            .collect();
        strings.serialize(s)
    }
}

impl<'de, const P: u32> Deserialize<'de> for CycNumber<P> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let strings = Vec::<String>::deserialize(d)?;
        let coeffs = strings
            .iter()
            .map(|s| BigRational::from_str(s.trim()).map_err(|e| D::Error::custom(format!("{s}: {e}"))))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Self::from_coeffs(&coeffs).map_err(D::Error::custom)
    }
}
