//! The Heisenberg group `H = V × F_p` and its Lagrangian models.

use num_traits::{One, Zero};

use crate::cyclotomic::{psi, CycNumber};
use crate::error::{Result, WeilError};
use crate::field::Fp;
use crate::matrix::Matrix;
use crate::symplectic::{Subspace, SympSpace, SpElement, Vector};

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct HElement<const P: u32> {
    pub v: Vector<P>,
    pub z: Fp<P>,
}

impl<const P: u32> HElement<P> {
    pub fn new(v: Vector<P>, z: Fp<P>) -> Self {
        Self { v, z }
    }

    pub fn central(dim: usize, z: Fp<P>) -> Self {
        Self { v: vec![Fp::zero(); dim], z }
    }

    pub fn from_vector(v: Vector<P>) -> Self {
        Self { v, z: Fp::zero() }
    }
}

/// Lexicographic position of a vector, first coordinate most significant.
pub fn vector_index<const P: u32>(v: &[Fp<P>]) -> usize {
    v.iter().fold(0, |acc, x| acc * P as usize + x.value() as usize)
}

pub fn vector_from_index<const P: u32>(dim: usize, mut k: usize) -> Vector<P> {
    let mut v = vec![Fp::zero(); dim];
    for slot in v.iter_mut().rev() {
        *slot = Fp::new((k % P as usize) as i64);
        k /= P as usize;
    }
    v
}

/// Group operations on `H(V)`; points are indexed by `(v, z) ↦ idx(v)·p + z`.
impl<const P: u32> SympSpace<P> {
    pub fn h_identity(&self) -> HElement<P> {
        HElement::central(self.dim(), Fp::zero())
    }

    /// `(v, z)(v', z') = (v + v', z + z' + ½ω(v, v'))`.
    pub fn h_mul(&self, a: &HElement<P>, b: &HElement<P>) -> Result<HElement<P>> {
        for h in [a, b] {
            if h.v.len() != self.dim() {
                return Err(WeilError::DimensionMismatch { expected: self.dim(), found: h.v.len() });
            }
        }
        Ok(self.h_mul_unchecked(a, b))
    }

    pub fn h_mul_unchecked(&self, a: &HElement<P>, b: &HElement<P>) -> HElement<P> {
        let v = a.v.iter().zip(&b.v).map(|(x, y)| *x + *y).collect();
        HElement { v, z: a.z + b.z + Fp::half() * self.pair(&a.v, &b.v) }
    }

    pub fn h_inv(&self, a: &HElement<P>) -> HElement<P> {
        HElement { v: a.v.iter().map(|x| -*x).collect(), z: -a.z }
    }

    pub fn h_order(&self) -> usize {
        (P as usize).pow(self.dim() as u32 + 1)
    }

    pub fn h_index(&self, h: &HElement<P>) -> usize {
        vector_index(&h.v) * P as usize + h.z.value() as usize
    }

    pub fn h_from_index(&self, k: usize) -> HElement<P> {
        HElement {
            v: vector_from_index(self.dim(), k / P as usize),
            z: Fp::new((k % P as usize) as i64),
        }
    }

    pub fn h_elements(&self) -> impl Iterator<Item = HElement<P>> + '_ {
        (0..self.h_order()).map(move |k| self.h_from_index(k))
    }

    /// `g·(v, z) = (gv, z)`.
    pub fn h_act(&self, g: &SpElement<P>, h: &HElement<P>) -> HElement<P> {
        HElement { v: g.apply(&h.v), z: h.z }
    }

    /// `(v, 0)` for the standard basis vectors, and `(0, 1)`.
    pub fn h_generators(&self) -> Vec<HElement<P>> {
        let mut gens: Vec<HElement<P>> = (0..self.dim())
            .map(|i| HElement::from_vector(crate::symplectic::unit_vec(self.dim(), i)))
            .collect();
        gens.push(HElement::central(self.dim(), Fp::one()));
        gens
    }
}

/// `ψ(0), …, ψ(p-1)`.
pub fn psi_table<const P: u32>() -> Vec<CycNumber<P>> {
    Fp::<P>::elements().map(psi).collect()
}

/// The model `H_L`: ψ-equivariant, left `L`-invariant functions on `H`,
/// stored by their values on the transversal `{(c, 0)}` with `c` supported
/// on the free columns of `L`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Model<const P: u32> {
    space: SympSpace<P>,
    lagrangian: Subspace<P>,
    free: Vec<usize>,
}

impl<const P: u32> Model<P> {
    pub fn new(space: &SympSpace<P>, lagrangian: &Subspace<P>) -> Result<Self> {
        if !space.is_lagrangian(lagrangian) {
            return Err(WeilError::NotLagrangian);
        }
        Ok(Self { space: space.clone(), lagrangian: lagrangian.clone(), free: lagrangian.free_columns() })
    }

    pub fn space(&self) -> &SympSpace<P> {
        &self.space
    }

    pub fn lagrangian(&self) -> &Subspace<P> {
        &self.lagrangian
    }

    pub fn dim(&self) -> usize {
        (P as usize).pow(self.free.len() as u32)
    }

    pub fn rep(&self, i: usize) -> Vector<P> {
        let coords = vector_from_index::<P>(self.free.len(), i);
        let mut v = self.space.zero_vector();
        for (&c, x) in self.free.iter().zip(coords) {
            v[c] = x;
        }
        v
    }

    pub fn transversal(&self) -> Vec<HElement<P>> {
        (0..self.dim()).map(|i| HElement::from_vector(self.rep(i))).collect()
    }

    fn rep_position(&self, c: &[Fp<P>]) -> usize {
        self.free.iter().fold(0, |acc, &j| acc * P as usize + c[j].value() as usize)
    }

    /// Writes `h = (0, z₀)·(l, 0)·(c, 0)` and returns `(z₀, position of c)`.
    pub fn factorize(&self, h: &HElement<P>) -> (Fp<P>, usize) {
        let (l, c) = self.lagrangian.split(&h.v);
        let z0 = h.z - Fp::half() * self.space.pair(&l, &c);
        (z0, self.rep_position(&c))
    }

    pub fn evaluate(&self, f: &ModelVector<P>, h: &HElement<P>) -> CycNumber<P> {
        let (z0, i) = self.factorize(h);
        &psi(z0) * &f.values[i]
    }

    /// Matrix of right translation `(π(h)f)(x) = f(x·h)` on transversal
    /// values.
    pub fn pi_matrix(&self, h: &HElement<P>) -> Matrix<CycNumber<P>> {
        let table = psi_table::<P>();
        let n = self.dim();
        let mut m = Matrix::zeros(n, n);
        for t in 0..n {
            let x = self.space.h_mul_unchecked(&HElement::from_vector(self.rep(t)), h);
            let (z0, c) = self.factorize(&x);
            m[(t, c)] = table[z0.value() as usize].clone();
        }
        m
    }

    /// Values on the transversal of a ψ-equivariant, left-invariant
    /// function given on all of `H`.
    pub fn restrict(&self, f: impl Fn(&HElement<P>) -> CycNumber<P>) -> ModelVector<P> {
        ModelVector { values: self.transversal().iter().map(f).collect() }
    }

    /// The vector supported on `Z·L` with value `ψ(z)` there.
    pub fn delta(&self) -> ModelVector<P> {
        let mut values = vec![CycNumber::zero(); self.dim()];
        values[0] = CycNumber::one();
        ModelVector { values }
    }

    /// Dimension of `{A : A π(h) = π(h) A}` over the generators of `H`.
    pub fn commutant_dimension(&self) -> usize {
        let n = self.dim();
        let id = Matrix::<CycNumber<P>>::identity(n);
        let mut system: Option<Matrix<CycNumber<P>>> = None;
        for h in self.space.h_generators() {
            let pi = self.pi_matrix(&h);
            let block = &id.kron(&pi.transpose()) - &pi.kron(&id);
            system = Some(match system {
                None => block,
                Some(s) => s.vstack(&block),
            });
        }
        system.map_or(1, |s| s.nullspace().len())
    }
}

/// Values of an element of a model on its transversal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModelVector<const P: u32> {
    pub values: Vec<CycNumber<P>>,
}

impl<const P: u32> ModelVector<P> {
    pub fn zero(dim: usize) -> Self {
        Self { values: vec![CycNumber::zero(); dim] }
    }

    pub fn apply(&self, m: &Matrix<CycNumber<P>>) -> Self {
        Self { values: m.mul_vec(&self.values) }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::unit_vec;

    type F3 = Fp<3>;

    fn h3(v: &[i64], z: i64) -> HElement<3> {
        HElement::new(v.iter().map(|&x| F3::new(x)).collect(), F3::new(z))
    }

    #[test]
    fn group_law_examples() {
        let v = SympSpace::<3>::standard(1);
        let prod = v.h_mul(&h3(&[1, 0], 0), &h3(&[0, 1], 0)).unwrap();
        assert_eq!(prod, h3(&[1, 1], 2));
        let h = h3(&[2, 1], 1);
        assert_eq!(v.h_mul(&h, &v.h_identity()).unwrap(), h);
        assert!(v.h_mul(&h3(&[1], 0), &h).is_err());
    }

    #[test]
    fn commutators_and_inverses() {
        let v = SympSpace::<3>::standard(1);
        for a in v.h_elements() {
            assert_eq!(v.h_mul(&v.h_inv(&a), &a).unwrap(), v.h_identity());
            for b in v.h_elements() {
                let ab = v.h_mul(&a, &b).unwrap();
                let ba = v.h_mul(&b, &a).unwrap();
                let comm = v.h_mul(&ab, &v.h_inv(&ba)).unwrap();
                assert_eq!(comm, HElement::central(2, v.pair(&a.v, &b.v)));
                for c in v.h_elements().step_by(5) {
                    let left = v.h_mul(&ab, &c).unwrap();
                    let right = v.h_mul(&a, &v.h_mul(&b, &c).unwrap()).unwrap();
                    assert_eq!(left, right);
                }
            }
        }
        assert_eq!(v.h_inv(&h3(&[0, 0], 2)), h3(&[0, 0], 1));
    }

    #[test]
    fn indexing_round_trips() {
        let v = SympSpace::<3>::standard(2);
        for (k, h) in v.h_elements().enumerate() {
            assert_eq!(v.h_index(&h), k);
        }
        assert_eq!(v.h_order(), 243);
    }

    #[test]
    fn model_factorization_matches_search() {
        let v = SympSpace::<3>::standard(1);
        let l = Subspace::span(2, &[unit_vec(2, 0)]);
        let model = Model::new(&v, &l).unwrap();
        assert_eq!(model.dim(), 3);
        assert_eq!(model.transversal(), vec![h3(&[0, 0], 0), h3(&[0, 1], 0), h3(&[0, 2], 0)]);
        for h in v.h_elements() {
            let (z0, i) = model.factorize(&h);
            let mut hits = Vec::new();
            for z in Fp::<3>::elements() {
                for lv in l.elements() {
                    for (j, t) in model.transversal().iter().enumerate() {
                        let x = v.h_mul(&v.h_mul(&HElement::central(2, z), &HElement::from_vector(lv.clone())).unwrap(), t).unwrap();
                        if x == h {
                            hits.push((z, j));
                        }
                    }
                }
            }
            assert_eq!(hits, vec![(z0, i)]);
        }
    }

    #[test]
    fn model_dimensions() {
        let v = SympSpace::<3>::standard(2);
        for l in v.enumerate_lagrangians(100).unwrap() {
            assert_eq!(Model::new(&v, &l).unwrap().dim(), 9);
        }
    }

    fn check_representation<const P: u32>(n: usize, step: usize) {
        let v = SympSpace::<P>::standard(n);
        for l in v.enumerate_lagrangians(1000).unwrap() {
            let model = Model::new(&v, &l).unwrap();
            assert!(model.pi_matrix(&v.h_identity()).is_identity());
            for z in Fp::<P>::elements() {
                let pz = model.pi_matrix(&HElement::central(v.dim(), z));
                assert_eq!(pz, Matrix::identity(model.dim()).scale(&psi(z)));
            }
            let elements: Vec<_> = v.h_elements().step_by(step).collect();
            let mats: Vec<_> = elements.iter().map(|h| model.pi_matrix(h)).collect();
            for (a, ma) in elements.iter().zip(&mats) {
                for nz in 0..ma.rows() {
                    assert_eq!(ma.row(nz).iter().filter(|x| !x.is_zero()).count(), 1);
                }
                for (b, mb) in elements.iter().zip(&mats) {
                    let ab = v.h_mul(a, b).unwrap();
                    assert_eq!(ma * mb, model.pi_matrix(&ab));
                }
            }
        }
    }

    #[test]
    fn pi_is_a_representation() {
        check_representation::<3>(1, 1);
        check_representation::<5>(1, 3);
        check_representation::<3>(2, 17);
    }

    #[test]
    fn commutant_is_scalar() {
        for l in SympSpace::<3>::standard(1).enumerate_lagrangians(10).unwrap() {
            assert_eq!(Model::new(&SympSpace::standard(1), &l).unwrap().commutant_dimension(), 1);
        }
        let v5 = SympSpace::<5>::standard(1);
        let l = v5.enumerate_lagrangians(10).unwrap().remove(2);
        assert_eq!(Model::new(&v5, &l).unwrap().commutant_dimension(), 1);
    }

    #[test]
    fn evaluation_is_equivariant() {
        let v = SympSpace::<3>::standard(1);
        let l = Subspace::span(2, &[vec![F3::new(1), F3::new(2)]]);
        let model = Model::new(&v, &l).unwrap();
        let f = ModelVector { values: vec![CycNumber::from_integer(2), CycNumber::zeta(), CycNumber::from_integer(-1)] };
        for h in v.h_elements() {
            for lv in l.elements() {
                let lh = v.h_mul(&HElement::from_vector(lv), &h).unwrap();
                assert_eq!(model.evaluate(&f, &lh), model.evaluate(&f, &h));
            }
            let zh = v.h_mul(&HElement::central(2, F3::new(1)), &h).unwrap();
            assert_eq!(model.evaluate(&f, &zh), &psi(F3::new(1)) * &model.evaluate(&f, &h));
        }
    }
}
