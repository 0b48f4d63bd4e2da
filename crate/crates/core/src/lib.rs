//! Exact canonical quantization of symplectic spaces over odd prime fields.
//!
//! The crate builds, bottom up, prime field arithmetic ([`Fp`]), exact
//! cyclotomic scalars ([`CycNumber`]), symplectic linear algebra
//! ([`SympSpace`], [`Subspace`], [`Oriented`]), the Heisenberg group and
//! its Lagrangian models ([`Model`]), the canonical multiplicative system of
//! intertwining operators and kernels ([`IntertwinerSystem`]), and the
//! canonical model of the Weil representation ([`CanonicalSpace`]).
//!
//! The modulus is a const generic, so mixing residues or cyclotomic numbers
//! of different primes is a type error. Dense linear algebra is generic over
//! [`Scalar`] and works equally over `Fp`, `CycNumber`, rationals and
//! floating complex numbers.
//!
//! ```
//! use weil_core::{CanonicalSpace, SpElement, SympSpace};
//!
//! let v = SympSpace::<3>::standard(1);
//! let h = CanonicalSpace::new(v.clone(), 10_000).unwrap();
//! let g = SpElement::transvection(&v, &[1.into(), 2.into()], 1.into());
//! let rho = h.rho(&g).unwrap();
//! assert_eq!(&rho * &h.rho(&g.inverse()).unwrap(), weil_core::Matrix::identity(3));
//! ```

pub mod cyclotomic;
pub mod error;
pub mod field;
pub mod heisenberg;
pub mod intertwining;
pub mod matrix;
pub mod quantization;
pub mod scalar;
pub mod symplectic;

pub use cyclotomic::{gauss_sum, psi, sigma, ComplexApprox, CycNumber};
pub use error::{Result, WeilError};
pub use field::{check_modulus, is_odd_prime, Fp};
pub use heisenberg::{HElement, Model, ModelVector};
pub use intertwining::{CycMatrix, IntertwinerSystem, Kernel, Normalization, Normalizer, Pairing};
pub use matrix::{Echelon, Matrix};
pub use quantization::{
    proportionality, CanonicalSpace, CartesianIso, CorrespondenceQuantizer, DualityPairing,
    FlatSection, ReductionIso,
};
pub use scalar::{FieldScalar, Scalar};
pub use symplectic::{
    in_general_position, Oriented, OrientedIsotropic, OrientedLagrangian, Reduction, SpElement,
    Subspace, SympSpace, Vector,
};

pub type Fp3 = Fp<3>;
pub type Fp5 = Fp<5>;
pub type Fp7 = Fp<7>;
pub type Cyc3 = CycNumber<3>;
pub type Cyc5 = CycNumber<5>;
pub type Cyc7 = CycNumber<7>;
pub type FpMatrix<const P: u32> = Matrix<Fp<P>>;
pub type ComplexMatrix = Matrix<num_complex::Complex64>;
pub type RationalMatrix = Matrix<num_rational::BigRational>;
