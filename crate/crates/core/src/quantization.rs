//! The canonical space `H(V)` of flat sections, the Weil representation
//! on it, and its compatibilities with products, duals and reduction.

use std::collections::HashMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::cyclotomic::CycNumber;
use crate::error::{Result, WeilError};
use crate::field::Fp;
use crate::heisenberg::{psi_table, HElement, Model, ModelVector};
use crate::intertwining::{CycMatrix, IntertwinerSystem};
use crate::matrix::Matrix;
use crate::symplectic::{Oriented, Reduction, SpElement, SympSpace};

/// `H(V)` represented at a base oriented Lagrangian, the first in
/// enumeration order.
#[derive(Debug)]
pub struct CanonicalSpace<const P: u32> {
    system: Arc<IntertwinerSystem<P>>,
    lagrangians: Vec<Oriented<P>>,
    positions: HashMap<Oriented<P>, usize>,
}

/// A flat section, stored by its value at the base point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlatSection<const P: u32> {
    pub coords: ModelVector<P>,
}

impl<const P: u32> FlatSection<P> {
    pub fn from_coords(values: Vec<CycNumber<P>>) -> Self {
        Self { coords: ModelVector { values } }
    }
}

impl<const P: u32> CanonicalSpace<P> {
    pub fn new(space: SympSpace<P>, cap: u128) -> Result<Self> {
        Self::with_system(Arc::new(IntertwinerSystem::new(space)), cap)
    }

    pub fn with_system(system: Arc<IntertwinerSystem<P>>, cap: u128) -> Result<Self> {
        let lagrangians = system.space().enumerate_oriented_lagrangians(cap)?;
        let positions = lagrangians.iter().cloned().enumerate().map(|(i, l)| (l, i)).collect();
        Ok(Self { system, lagrangians, positions })
    }

    pub fn system(&self) -> &Arc<IntertwinerSystem<P>> {
        &self.system
    }

    pub fn space(&self) -> &SympSpace<P> {
        self.system.space()
    }

    pub fn base(&self) -> &Oriented<P> {
        &self.lagrangians[0]
    }

    pub fn lagrangians(&self) -> &[Oriented<P>] {
        &self.lagrangians
    }

    pub fn dim(&self) -> usize {
        (P as usize).pow(self.space().n() as u32)
    }

    pub fn base_model(&self) -> Result<Arc<Model<P>>> {
        self.system.model(&self.base().subspace)
    }

    pub fn operator(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<Arc<CycMatrix<P>>> {
        self.system.closed_operator(m, l)
    }

    pub fn evaluate_section(&self, s: &FlatSection<P>, m: &Oriented<P>) -> Result<ModelVector<P>> {
        Ok(s.coords.apply(self.operator(m, self.base())?.as_ref()))
    }

    /// The section whose value at `l` is `f`.
    pub fn section_from(&self, l: &Oriented<P>, f: &ModelVector<P>) -> Result<FlatSection<P>> {
        Ok(FlatSection { coords: f.apply(self.operator(self.base(), l)?.as_ref()) })
    }

    /// `f ↦ f ∘ g⁻¹` from `H_{L}` to `H_{gL}`.
    pub fn translation(&self, g: &SpElement<P>, l: &Oriented<P>) -> Result<CycMatrix<P>> {
        let source = self.system.model(&l.subspace)?;
        let target = self.system.model(&g.apply_subspace(&l.subspace))?;
        let inv = g.inverse();
        let table = psi_table::<P>();
        let mut m = Matrix::zeros(target.dim(), source.dim());
        for t in 0..target.dim() {
            let x = HElement::from_vector(inv.apply(&target.rep(t)));
            let (z0, c) = source.factorize(&x);
            m[(t, c)] = table[z0.value() as usize].clone();
        }
        Ok(m)
    }

    /// `ρ(g) = F_{L₀°, gL₀°} ∘ T_g` in base coordinates.
    pub fn rho(&self, g: &SpElement<P>) -> Result<CycMatrix<P>> {
        if g.matrix().shape() != (self.space().dim(), self.space().dim()) {
            return Err(WeilError::DimensionMismatch { expected: self.space().dim(), found: g.matrix().rows() });
        }
        let moved = g.act(self.base());
        Ok(self.operator(self.base(), &moved)?.as_ref() * &self.translation(g, self.base())?)
    }

    pub fn pi(&self, h: &HElement<P>) -> Result<CycMatrix<P>> {
        Ok(self.base_model()?.pi_matrix(h))
    }

    /// `(1/#Lag°) [F_{M°,L°}]` on `⊕_{L°} H_{L°}`, blocks in enumeration
    /// order.
    pub fn total_fourier(&self) -> Result<CycMatrix<P>> {
        let d = self.dim();
        let count = self.lagrangians.len();
        let weight = BigRational::new(BigInt::one(), BigInt::from(count));
        let mut out = Matrix::zeros(count * d, count * d);
        for (i, m) in self.lagrangians.iter().enumerate() {
            for (j, l) in self.lagrangians.iter().enumerate() {
                let f = self.operator(m, l)?;
                for r in 0..d {
                    for c in 0..d {
                        let x = &f[(r, c)];
                        if !x.is_zero() {
                            out[(i * d + r, j * d + c)] = x.scale_rational(&weight);
                        }
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(g·v)_{gL°} = T_g v_{L°}` on `⊕_{L°} H_{L°}`.
    pub fn geometric_action(&self, g: &SpElement<P>) -> Result<CycMatrix<P>> {
        let d = self.dim();
        let count = self.lagrangians.len();
        let mut out = Matrix::zeros(count * d, count * d);
        for (j, l) in self.lagrangians.iter().enumerate() {
            let i = self.positions[&g.act(l)];
            let t = self.translation(g, l)?;
            for r in 0..d {
                for c in 0..d {
                    out[(i * d + r, j * d + c)] = t[(r, c)].clone();
                }
            }
        }
        Ok(out)
    }

    /// The section generated by the function equal to `ψ(z)` on `Z·L` and
    /// zero elsewhere.
    pub fn lagrangian_vector(&self, l: &Oriented<P>) -> Result<FlatSection<P>> {
        let model = self.system.model(&l.subspace)?;
        self.section_from(l, &model.delta())
    }

    /// Basis of the joint fixed space of `π(h)` in base coordinates.
    pub fn fixed_space(&self, elements: &[HElement<P>]) -> Result<Vec<Vec<CycNumber<P>>>> {
        let d = self.dim();
        if elements.is_empty() {
            return Ok((0..d).map(|i| unit(d, i)).collect());
        }
        let id = Matrix::identity(d);
        let mut system: Option<CycMatrix<P>> = None;
        for h in elements {
            let block = &self.pi(h)? - &id;
            system = Some(match system {
                None => block,
                Some(s) => s.vstack(&block),
            });
        }
        Ok(system.expect("nonempty").nullspace())
    }
}

fn unit<const P: u32>(d: usize, i: usize) -> Vec<CycNumber<P>> {
    let mut v = vec![CycNumber::zero(); d];
    v[i] = CycNumber::one();
    v
}

/// `λ` with `a = λ b`, if one exists and `b ≠ 0`.
pub fn proportionality<const P: u32>(a: &CycMatrix<P>, b: &CycMatrix<P>) -> Option<CycNumber<P>> {
    if a.shape() != b.shape() {
        return None;
    }
    let pos = b.data().iter().position(|x| !x.is_zero())?;
    let lambda = &a.data()[pos] * &b.data()[pos].inverse().ok()?;
    (b.scale(&lambda) == *a).then_some(lambda)
}

/// `α : H(V₁ × V₂) → H(V₁) ⊗ H(V₂)`, in base coordinates with tensor index
/// `i₁·dim₂ + i₂`.
#[derive(Debug)]
pub struct CartesianIso<const P: u32> {
    matrix: CycMatrix<P>,
    factor_base: Oriented<P>,
}

impl<const P: u32> CartesianIso<P> {
    pub fn new(first: &CanonicalSpace<P>, second: &CanonicalSpace<P>, product: &CanonicalSpace<P>) -> Result<Self> {
        if *product.space() != first.space().product(second.space()) {
            return Err(WeilError::DimensionMismatch {
                expected: first.space().dim() + second.space().dim(),
                found: product.space().dim(),
            });
        }
        let factor_base = first.base().product(second.base());
        let matrix = product.operator(&factor_base, product.base())?.as_ref().clone();
        Ok(Self { matrix, factor_base })
    }

    pub fn matrix(&self) -> &CycMatrix<P> {
        &self.matrix
    }

    /// `L₁° × L₂°` for the two base points.
    pub fn factor_base(&self) -> &Oriented<P> {
        &self.factor_base
    }

    pub fn apply(&self, s: &FlatSection<P>) -> Vec<CycNumber<P>> {
        self.matrix.mul_vec(&s.coords.values)
    }
}

/// `⟨·,·⟩ : H(V̄) × H(V) → Q(ζ)`, `⟨f, g⟩ = Σ_t f(t) g(t)` over the
/// transversal of the Lagrangian where both sections are evaluated.
#[derive(Debug)]
pub struct DualityPairing<'a, const P: u32> {
    bar: &'a CanonicalSpace<P>,
    space: &'a CanonicalSpace<P>,
}

impl<'a, const P: u32> DualityPairing<'a, P> {
    pub fn new(bar: &'a CanonicalSpace<P>, space: &'a CanonicalSpace<P>) -> Result<Self> {
        if *bar.space() != space.space().dual() {
            return Err(WeilError::NotDual);
        }
        Ok(Self { bar, space })
    }

    pub fn pair_at(&self, at: &Oriented<P>, s_bar: &FlatSection<P>, s: &FlatSection<P>) -> Result<CycNumber<P>> {
        let f = self.bar.evaluate_section(s_bar, at)?;
        let g = self.space.evaluate_section(s, at)?;
        Ok(f.values.iter().zip(&g.values).fold(CycNumber::zero(), |acc, (a, b)| &acc + &(a * b)))
    }

    pub fn pair(&self, s_bar: &FlatSection<P>, s: &FlatSection<P>) -> Result<CycNumber<P>> {
        self.pair_at(self.space.base(), s_bar, s)
    }

    /// `gram[i][k] = ⟨ē_i, e_k⟩` for the base coordinate vectors.
    pub fn gram(&self) -> Result<CycMatrix<P>> {
        let d = self.space.dim();
        let mut m = Matrix::zeros(d, d);
        for i in 0..d {
            for k in 0..d {
                let a = FlatSection::from_coords(unit(d, i));
                let b = FlatSection::from_coords(unit(d, k));
                m[(i, k)] = self.pair(&a, &b)?;
            }
        }
        Ok(m)
    }
}

/// `H(V)^I → H(I^⊥/I)`: restricts sections to `L° = o_I ∧ lift(o_{W₀})`
/// and descends `I`-invariant functions to the reduced Heisenberg group.
#[derive(Debug)]
pub struct ReductionIso<'a, const P: u32> {
    space: &'a CanonicalSpace<P>,
    reduced: &'a CanonicalSpace<P>,
    reduction: Reduction<P>,
    fixed: Vec<Vec<CycNumber<P>>>,
    matrix: CycMatrix<P>,
}

impl<'a, const P: u32> ReductionIso<'a, P> {
    pub fn new(space: &'a CanonicalSpace<P>, iso: &Oriented<P>, reduced: &'a CanonicalSpace<P>) -> Result<Self> {
        let reduction = Reduction::new(space.space(), iso)?;
        if reduced.space() != reduction.reduced() {
            return Err(WeilError::DimensionMismatch {
                expected: reduction.reduced().dim(),
                found: reduced.space().dim(),
            });
        }
        let elements: Vec<HElement<P>> =
            iso.subspace.row_iter().map(|r| HElement::from_vector(r.to_vec())).collect();
        let fixed = space.fixed_space(&elements)?;
        let lifted = reduction.lift_oriented(reduced.base());
        let model = space.system().model(&lifted.subspace)?;
        let target = reduced.base_model()?;
        let table = psi_table::<P>();
        let mut descent = Matrix::zeros(target.dim(), model.dim());
        for r in 0..target.dim() {
            let x = HElement::from_vector(reduction.lift(&target.rep(r)));
            let (z0, c) = model.factorize(&x);
            descent[(r, c)] = table[z0.value() as usize].clone();
        }
        let matrix = &descent * space.operator(&lifted, space.base())?.as_ref();
        Ok(Self { space, reduced, reduction, fixed, matrix })
    }

    pub fn reduction(&self) -> &Reduction<P> {
        &self.reduction
    }

    /// Basis of `H(V)^I` in base coordinates.
    pub fn invariant_basis(&self) -> &[Vec<CycNumber<P>>] {
        &self.fixed
    }

    pub fn matrix(&self) -> &CycMatrix<P> {
        &self.matrix
    }

    pub fn apply(&self, v: &[CycNumber<P>]) -> Vec<CycNumber<P>> {
        self.matrix.mul_vec(v)
    }

    /// Rank of the map on `H(V)^I`.
    pub fn rank_on_invariants(&self) -> usize {
        if self.fixed.is_empty() {
            return 0;
        }
        let images: Vec<Vec<CycNumber<P>>> = self.fixed.iter().map(|v| self.apply(v)).collect();
        Matrix::from_rows(&images).rank()
    }

    /// `Φ ρ_V(g) = ρ_W(ḡ) Φ` on `H(V)^I`, for `g` preserving `I°`.
    pub fn is_equivariant(&self, g: &SpElement<P>) -> Result<bool> {
        let induced = self.reduction.induced(g)?;
        let rho_v = self.space.rho(g)?;
        let rho_w = self.reduced.rho(&induced)?;
        Ok(self.fixed.iter().all(|v| {
            self.apply(&rho_v.mul_vec(v)) == rho_w.mul_vec(&self.apply(v))
        }))
    }
}

/// Quantizes oriented Lagrangians `L° ⊂ V̄ × V` to operators on `H(V)`.
#[derive(Debug)]
pub struct CorrespondenceQuantizer<const P: u32> {
    product: CanonicalSpace<P>,
    alpha: CartesianIso<P>,
    gram: CycMatrix<P>,
    dims: (usize, usize),
}

impl<const P: u32> CorrespondenceQuantizer<P> {
    pub fn new(space: &CanonicalSpace<P>, cap: u128) -> Result<Self> {
        let bar = CanonicalSpace::new(space.space().dual(), cap)?;
        let product = CanonicalSpace::new(bar.space().product(space.space()), cap)?;
        let alpha = CartesianIso::new(&bar, space, &product)?;
        let gram = DualityPairing::new(&bar, space)?.gram()?;
        Ok(Self { product, alpha, gram, dims: (bar.dim(), space.dim()) })
    }

    pub fn product(&self) -> &CanonicalSpace<P> {
        &self.product
    }

    pub fn gram(&self) -> &CycMatrix<P> {
        &self.gram
    }

    /// `A[j][k] = Σ_i a[i][j] ⟨ē_i, e_k⟩` where `a = α(v_{L°})`.
    pub fn quantize(&self, l: &Oriented<P>) -> Result<CycMatrix<P>> {
        if !self.product.space().is_lagrangian(&l.subspace) {
            return Err(WeilError::NotLagrangian);
        }
        let v = self.product.lagrangian_vector(l)?;
        let a = self.alpha.apply(&v);
        let (d1, d2) = self.dims;
        let a = Matrix::from_vec(d1, d2, a);
        Ok(&a.transpose() * &self.gram)
    }
}

/// Elements of `Sp(V)` fixing `I` pointwise: products of transvections
/// along a basis of `I^⊥`.
pub fn isotropic_stabilizer_generators<const P: u32>(reduction: &Reduction<P>) -> Vec<SpElement<P>> {
    let space = reduction.ambient();
    reduction
        .perp()
        .row_iter()
        .map(|v| SpElement::transvection(space, v, Fp::one()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{unit_vec, Subspace};

    fn sp3() -> Vec<SpElement<3>> {
        SpElement::enumerate(&SympSpace::standard(1), 1000).unwrap()
    }

    #[test]
    fn base_and_dimension() {
        let h = CanonicalSpace::<3>::new(SympSpace::standard(1), 100).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h.base().subspace, Subspace::span(2, &[unit_vec(2, 1)]));
        assert_eq!(h.base().scale, Fp::new(1));
    }

    #[test]
    fn sections_evaluate_consistently() {
        let h = CanonicalSpace::<3>::new(SympSpace::standard(1), 100).unwrap();
        let s = FlatSection::from_coords(vec![CycNumber::from_integer(1), CycNumber::zeta(), CycNumber::from_integer(-2)]);
        assert_eq!(h.evaluate_section(&s, h.base()).unwrap(), s.coords);
        for m in h.lagrangians() {
            for n in h.lagrangians() {
                let at_m = h.evaluate_section(&s, m).unwrap();
                assert_eq!(at_m.apply(&h.operator(n, m).unwrap()), h.evaluate_section(&s, n).unwrap());
            }
            let zero = FlatSection::from_coords(vec![CycNumber::zero(); 3]);
            assert!(h.evaluate_section(&zero, m).unwrap().is_zero());
        }
    }

    #[test]
    fn rho_identity_and_cross_check() {
        let v = SympSpace::<3>::standard(1);
        let h = CanonicalSpace::new(v.clone(), 100).unwrap();
        assert!(h.rho(&SpElement::identity(&v)).unwrap().is_identity());
        for g in sp3() {
            let direct = h.operator(h.base(), &g.act(h.base())).unwrap().as_ref() * &h.translation(&g, h.base()).unwrap();
            assert_eq!(h.rho(&g).unwrap(), direct);
        }
    }

    #[test]
    fn lagrangian_vectors_are_invariant() {
        let v = SympSpace::<3>::standard(1);
        let h = CanonicalSpace::new(v.clone(), 100).unwrap();
        for l in h.lagrangians() {
            let model = h.system().model(&l.subspace).unwrap();
            assert_eq!(model.delta().values[0], CycNumber::one());
            let s = h.lagrangian_vector(l).unwrap();
            assert!(!s.coords.is_zero());
            for x in l.subspace.elements() {
                let pi = h.pi(&HElement::from_vector(x)).unwrap();
                assert_eq!(s.coords.apply(&pi), s.coords);
            }
        }
    }

    #[test]
    fn proportionality_detection() {
        let a: CycMatrix<3> = Matrix::identity(2);
        let b = a.scale(&CycNumber::zeta());
        assert_eq!(proportionality(&b, &a), Some(CycNumber::zeta()));
        let mut c = a.clone();
        c[(0, 1)] = CycNumber::one();
        assert_eq!(proportionality(&c, &a), None);
        assert_eq!(proportionality(&a, &Matrix::zeros(2, 2)), None);
    }

    #[test]
    fn duality_requires_dual_spaces() {
        let h = CanonicalSpace::<3>::new(SympSpace::standard(1), 100).unwrap();
        assert_eq!(DualityPairing::new(&h, &h).unwrap_err(), WeilError::NotDual);
    }

    #[test]
    fn identity_correspondence_is_scalar() {
        let v = SympSpace::<3>::standard(1);
        let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
        let q = CorrespondenceQuantizer::new(&h, 1000).unwrap();
        let diag = v.graph_lagrangian(&SpElement::identity(&v)).unwrap();
        let a = q.quantize(&diag).unwrap();
        assert!(proportionality(&a, &Matrix::identity(3)).is_some());
    }
}
