//! The canonical system of intertwining operators `F_{M°,L°}` between
//! Lagrangian models, and its presentation by kernels on `H`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::cyclotomic::{gauss_sum, sigma, CycNumber};
use crate::error::{Result, WeilError};
use crate::field::Fp;
use crate::heisenberg::{psi_table, HElement, Model};
use crate::matrix::Matrix;
use crate::symplectic::{
    add_vec, all_vectors, binom2, in_general_position, scale_vec, Oriented, Subspace, SympSpace,
    Vector,
};

pub type CycMatrix<const P: u32> = Matrix<CycNumber<P>>;

/// Power of the Gauss sum in the normalizing constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Normalizer {
    /// `(G₁/q)^k`
    Scaled,
    /// `G₁^k`
    Unscaled,
}

/// How `ω_∧` is evaluated on a pair of frames inside the Legendre symbol.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pairing {
    /// `(-1)^{k(k-1)/2} det[ω(a_i, b_j)]`
    Determinant,
    /// `(-1)^{k(k-1)/2} det[ω(b_i, a_j)]`
    Transposed,
    /// `(-1)^{k(k-1)/2}` times the volume pairing, i.e. `det[ω(a_i, b_j)]`.
    Volume,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Normalization {
    pub normalizer: Normalizer,
    pub pairing: Pairing,
}

impl Normalization {
    pub const CANONICAL: Self = Self { normalizer: Normalizer::Scaled, pairing: Pairing::Volume };

    pub fn variants() -> Vec<Self> {
        let mut out = Vec::new();
        for normalizer in [Normalizer::Scaled, Normalizer::Unscaled] {
            for pairing in [Pairing::Determinant, Pairing::Transposed, Pairing::Volume] {
                out.push(Self { normalizer, pairing });
            }
        }
        out
    }

    fn sign_argument<const P: u32>(
        &self,
        space: &SympSpace<P>,
        ratio: Fp<P>,
        a: &[Vector<P>],
        b: &[Vector<P>],
    ) -> Fp<P> {
        let sign = Fp::sign(binom2(a.len()));
        match self.pairing {
            Pairing::Determinant => sign * ratio * space.pairing_determinant(a, b),
            Pairing::Transposed => sign * ratio * space.pairing_determinant(b, a),
            Pairing::Volume => ratio * space.pairing_determinant(a, b),
        }
    }
}

impl Default for Normalization {
    fn default() -> Self {
        Self::CANONICAL
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.normalizer {
            Normalizer::Scaled => "(G1/q)^k",
            Normalizer::Unscaled => "G1^k",
        };
        let s = match self.pairing {
            Pairing::Determinant => "determinant",
            Pairing::Transposed => "transposed",
            Pairing::Volume => "volume",
        };
        write!(f, "{c}, {s} pairing")
    }
}

type OperatorKey<const P: u32> = (Oriented<P>, Oriented<P>);

// Roughly 2·10⁷ stored rational coefficients.
fn default_budget<const P: u32>(n: usize) -> usize {
    let d = (P as usize).saturating_pow(n as u32);
    (20_000_000 / (d * d * (P as usize - 1)).max(1)).max(64)
}

/// Operators and models for one symplectic space, memoized.
///
/// Cache entries are computed outside the lock and published once; a
/// racing duplicate computation yields an identical value and is dropped.
pub struct IntertwinerSystem<const P: u32> {
    space: SympSpace<P>,
    normalization: Normalization,
    gauss: CycNumber<P>,
    models: Mutex<HashMap<Subspace<P>, Arc<Model<P>>>>,
    operators: Mutex<HashMap<OperatorKey<P>, Arc<CycMatrix<P>>>>,
    operator_budget: usize,
}

impl<const P: u32> fmt::Debug for IntertwinerSystem<P> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("IntertwinerSystem")
            .field("space", &self.space)
            .field("normalization", &self.normalization)
            .finish_non_exhaustive()
    }
}

/// A ψ-equivariant, `(M, L)`-bi-invariant function on `H`, stored at every
/// point in [`SympSpace::h_index`] order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Kernel<const P: u32> {
    pub left: Oriented<P>,
    pub right: Oriented<P>,
    values: Vec<CycNumber<P>>,
}

impl<const P: u32> Kernel<P> {
    pub fn values(&self) -> &[CycNumber<P>] {
        &self.values
    }

    pub fn value(&self, space: &SympSpace<P>, h: &HElement<P>) -> &CycNumber<P> {
        &self.values[space.h_index(h)]
    }

    pub fn zero(space: &SympSpace<P>, left: Oriented<P>, right: Oriented<P>) -> Self {
        Self { left, right, values: vec![CycNumber::zero(); space.h_order()] }
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(Zero::is_zero)
    }

    /// Checks `K(z·h) = ψ(z)K(h)` and `K(m·h·l) = K(h)` on generators.
    pub fn is_equivariant(&self, space: &SympSpace<P>) -> bool {
        let table = psi_table::<P>();
        let one = HElement::central(space.dim(), Fp::one());
        let lefts: Vec<HElement<P>> =
            self.left.subspace.row_iter().map(|r| HElement::from_vector(r.to_vec())).collect();
        let rights: Vec<HElement<P>> =
            self.right.subspace.row_iter().map(|r| HElement::from_vector(r.to_vec())).collect();
        space.h_elements().all(|h| {
            let k = self.value(space, &h);
            let zh = space.h_mul_unchecked(&one, &h);
            self.value(space, &zh) == &(&table[1] * k)
                && lefts.iter().all(|m| self.value(space, &space.h_mul_unchecked(m, &h)) == k)
                && rights.iter().all(|l| self.value(space, &space.h_mul_unchecked(&h, l)) == k)
        })
    }
}

impl<const P: u32> IntertwinerSystem<P> {
    pub fn new(space: SympSpace<P>) -> Self {
        Self::with_normalization(space, Normalization::CANONICAL)
    }

    pub fn with_normalization(space: SympSpace<P>, normalization: Normalization) -> Self {
        let n = space.n();
        Self {
            space,
            normalization,
            gauss: gauss_sum::<P>(),
            models: Mutex::new(HashMap::new()),
            operators: Mutex::new(HashMap::new()),
            operator_budget: default_budget::<P>(n),
        }
    }

    /// Caps the number of memoized operators; past the cap, operators are
    /// recomputed on every request.
    pub fn with_operator_budget(mut self, budget: usize) -> Self {
        self.operator_budget = budget;
        self
    }

    pub fn operator_budget(&self) -> usize {
        self.operator_budget
    }

    pub fn space(&self) -> &SympSpace<P> {
        &self.space
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn model(&self, l: &Subspace<P>) -> Result<Arc<Model<P>>> {
        if let Some(m) = self.models.lock().expect("model cache").get(l) {
            return Ok(m.clone());
        }
        let built = Arc::new(Model::new(&self.space, l)?);
        let mut cache = self.models.lock().expect("model cache");
        Ok(cache.entry(l.clone()).or_insert(built).clone())
    }

    fn lagrangian_check(&self, o: &Oriented<P>) -> Result<()> {
        if self.space.is_lagrangian(&o.subspace) {
            Ok(())
        } else {
            Err(WeilError::NotLagrangian)
        }
    }

    fn gauss_power(&self, k: usize) -> CycNumber<P> {
        let base = match self.normalization.normalizer {
            Normalizer::Scaled => self
                .gauss
                .scale_rational(&BigRational::new(BigInt::one(), BigInt::from(P))),
            Normalizer::Unscaled => self.gauss.clone(),
        };
        base.pow(k as u32)
    }

    /// `(G₁/q)^n σ((-1)^{n(n-1)/2} ω_∧(o_L, o_M))` for a transversal pair.
    pub fn ansatz_constant(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<CycNumber<P>> {
        self.lagrangian_check(m)?;
        self.lagrangian_check(l)?;
        if !in_general_position(&m.subspace, &l.subspace) {
            return Err(WeilError::NotGeneralPosition);
        }
        let t = self.normalization.sign_argument(
            &self.space,
            l.scale * m.scale,
            &l.subspace.vectors(),
            &m.subspace.vectors(),
        );
        let base = self.gauss.scale_rational(&BigRational::new(BigInt::one(), BigInt::from(P)));
        Ok(&base.pow(self.space.n() as u32) * &sigma(t))
    }

    /// `C · Σ_{m ∈ M} f(m·h)` for `M`, `L` in general position.
    pub fn ansatz_operator(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<CycMatrix<P>> {
        let c = self.ansatz_constant(m, l)?;
        let source = self.model(&l.subspace)?;
        let target = self.model(&m.subspace)?;
        let members: Vec<Vector<P>> = m.subspace.elements().collect();
        Ok(averaging(&self.space, &target, &source, &members).scale(&c))
    }

    /// The canonical operator `H_{L°} → H_{M°}` for an arbitrary pair.
    pub fn closed_operator(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<Arc<CycMatrix<P>>> {
        let key = (m.clone(), l.clone());
        if let Some(op) = self.operators.lock().expect("operator cache").get(&key) {
            return Ok(op.clone());
        }
        let built = Arc::new(self.compute_closed(m, l, |_| None)?);
        let mut cache = self.operators.lock().expect("operator cache");
        if cache.len() >= self.operator_budget {
            return Ok(built);
        }
        Ok(cache.entry(key).or_insert(built).clone())
    }

    /// Recomputes the operator with each representative `m` of `M/I`
    /// replaced by `m + shift(m)`; `shift` must take values in `M ∩ L`.
    pub fn closed_operator_shifted(
        &self,
        m: &Oriented<P>,
        l: &Oriented<P>,
        shift: impl Fn(&[Fp<P>]) -> Option<Vector<P>>,
    ) -> Result<CycMatrix<P>> {
        self.compute_closed(m, l, shift)
    }

    fn compute_closed(
        &self,
        m: &Oriented<P>,
        l: &Oriented<P>,
        shift: impl Fn(&[Fp<P>]) -> Option<Vector<P>>,
    ) -> Result<CycMatrix<P>> {
        self.lagrangian_check(m)?;
        self.lagrangian_check(l)?;
        let inter = l.subspace.intersect(&m.subspace);
        let i_rows = inter.vectors();
        let a = l.subspace.extend_basis(&i_rows);
        let b = m.subspace.extend_basis(&i_rows);
        let k = a.len();

        let frame = |ext: &[Vector<P>]| {
            let mut f = i_rows.clone();
            f.extend_from_slice(ext);
            f
        };
        let iota_l = l.coefficient_against(&frame(&a));
        let iota_m = m.coefficient_against(&frame(&b));
        let ratio = iota_m * iota_l.inv()?;
        let t = self.normalization.sign_argument(&self.space, ratio, &a, &b);
        let c = &self.gauss_power(k) * &sigma(t);

        let source = self.model(&l.subspace)?;
        let target = self.model(&m.subspace)?;
        let mut reps = Vec::new();
        for coords in all_vectors::<P>(k) {
            let rep = if b.is_empty() { self.space.zero_vector() } else { combine_frame(&b, &coords) };
            let rep = match shift(&rep) {
                Some(s) => {
                    if !inter.contains(&s) {
                        return Err(WeilError::NotInSubspace);
                    }
                    add_vec(&rep, &s)
                }
                None => rep,
            };
            reps.push(rep);
        }
        Ok(averaging(&self.space, &target, &source, &reps).scale(&c))
    }

    /// Checks `F π_L(h) = π_M(h) F` on generators of `H`.
    pub fn is_intertwiner(&self, f: &CycMatrix<P>, m: &Oriented<P>, l: &Oriented<P>) -> Result<bool> {
        let source = self.model(&l.subspace)?;
        let target = self.model(&m.subspace)?;
        Ok(self
            .space
            .h_generators()
            .iter()
            .all(|h| f * &source.pi_matrix(h) == &target.pi_matrix(h) * f))
    }

    /// `K(m·(0, z)·l) = C·ψ(z)` for a transversal pair.
    pub fn kernel_general(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<Kernel<P>> {
        let c = self.ansatz_constant(m, l)?;
        let n = self.space.n();
        let stacked = m.subspace.basis().vstack(l.subspace.basis());
        let inverse = stacked.inverse().ok_or(WeilError::NotGeneralPosition)?;
        let table: Vec<CycNumber<P>> = psi_table::<P>().iter().map(|x| x * &c).collect();
        let values = self
            .space
            .h_elements()
            .map(|h| {
                let coords = inverse.vec_mul(&h.v);
                let mv = m.subspace.combine(&coords[..n]);
                let lv = l.subspace.combine(&coords[n..]);
                let z = h.z - Fp::half() * self.space.pair(&mv, &lv);
                table[z.value() as usize].clone()
            })
            .collect();
        Ok(Kernel { left: m.clone(), right: l.clone(), values })
    }

    /// `(I[K] f)(h) = Σ_t K(h·t⁻¹) f(t)` over the transversal of the right
    /// model.
    pub fn operator_of_kernel(&self, k: &Kernel<P>) -> Result<CycMatrix<P>> {
        let source = self.model(&k.right.subspace)?;
        let target = self.model(&k.left.subspace)?;
        let reps: Vec<HElement<P>> = source.transversal();
        Ok(Matrix::from_fn(target.dim(), source.dim(), |d, c| {
            let h = HElement::from_vector(target.rep(d));
            let x = self.space.h_mul_unchecked(&h, &self.space.h_inv(&reps[c]));
            k.value(&self.space, &x).clone()
        }))
    }

    /// `(K₁ ∗ K₂)(h) = Σ_t K₁(h·t⁻¹) K₂(t)` over the transversal of the
    /// middle model.
    pub fn convolve(&self, k1: &Kernel<P>, k2: &Kernel<P>) -> Result<Kernel<P>> {
        if k1.right != k2.left {
            return Err(WeilError::LabelMismatch(format!(
                "{:?} vs {:?}",
                k1.right.subspace.to_u32_rows(),
                k2.left.subspace.to_u32_rows()
            )));
        }
        let middle = self.model(&k1.right.subspace)?;
        let reps = middle.transversal();
        let inverses: Vec<HElement<P>> = reps.iter().map(|t| self.space.h_inv(t)).collect();
        let values = self
            .space
            .h_elements()
            .map(|h| {
                let mut acc = CycNumber::zero();
                for (t, ti) in reps.iter().zip(&inverses) {
                    let b = k2.value(&self.space, t);
                    if b.is_zero() {
                        continue;
                    }
                    let a = k1.value(&self.space, &self.space.h_mul_unchecked(&h, ti));
                    if !a.is_zero() {
                        acc = &acc + &(a * b);
                    }
                }
                acc
            })
            .collect();
        Ok(Kernel { left: k1.left.clone(), right: k2.right.clone(), values })
    }

    /// The canonical kernel: direct for transversal pairs, otherwise through
    /// the first Lagrangian transversal to both.
    pub fn canonical_kernel(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<Kernel<P>> {
        if in_general_position(&m.subspace, &l.subspace) {
            return self.kernel_general(m, l);
        }
        let aux = self.space.find_transversal_lagrangian(&[&m.subspace, &l.subspace])?;
        self.canonical_kernel_via(m, l, &Oriented::new(aux, Fp::one())?)
    }

    /// `K_{M°,N°} ∗ K_{N°,L°}` for an auxiliary `N°` transversal to both.
    pub fn canonical_kernel_via(
        &self,
        m: &Oriented<P>,
        l: &Oriented<P>,
        aux: &Oriented<P>,
    ) -> Result<Kernel<P>> {
        let k1 = self.kernel_general(m, aux)?;
        let k2 = self.kernel_general(aux, l)?;
        self.convolve(&k1, &k2)
    }

    /// A basis of the space of ψ-equivariant `(M, L)`-bi-invariant
    /// functions: one kernel per double coset whose stabilizer acts
    /// trivially.
    pub fn kernel_space(&self, m: &Oriented<P>, l: &Oriented<P>) -> Vec<Kernel<P>> {
        let space = &self.space;
        let order = space.h_order();
        let lefts: Vec<HElement<P>> =
            m.subspace.row_iter().map(|r| HElement::from_vector(r.to_vec())).collect();
        let rights: Vec<HElement<P>> =
            l.subspace.row_iter().map(|r| HElement::from_vector(r.to_vec())).collect();
        let one = HElement::central(space.dim(), Fp::one());
        let table = psi_table::<P>();
        let mut phase: Vec<Option<Fp<P>>> = vec![None; order];
        let mut basis = Vec::new();
        for root in 0..order {
            if phase[root].is_some() {
                continue;
            }
            phase[root] = Some(Fp::zero());
            let mut orbit = vec![root];
            let mut consistent = true;
            let mut cursor = 0;
            while cursor < orbit.len() {
                let idx = orbit[cursor];
                cursor += 1;
                let h = space.h_from_index(idx);
                let e = phase[idx].expect("visited");
                let mut moves = vec![(space.h_mul_unchecked(&one, &h), e + Fp::one())];
                moves.extend(lefts.iter().map(|x| (space.h_mul_unchecked(x, &h), e)));
                moves.extend(rights.iter().map(|x| (space.h_mul_unchecked(&h, x), e)));
                for (next, ne) in moves {
                    let j = space.h_index(&next);
                    match phase[j] {
                        None => {
                            phase[j] = Some(ne);
                            orbit.push(j);
                        }
                        Some(old) if old != ne => consistent = false,
                        Some(_) => {}
                    }
                }
            }
            if consistent {
                let mut values = vec![CycNumber::zero(); order];
                for &j in &orbit {
                    values[j] = table[phase[j].expect("visited").value() as usize].clone();
                }
                basis.push(Kernel { left: m.clone(), right: l.clone(), values });
            }
        }
        basis
    }

    /// Rank of the transform `K ↦ I[K]` on the full kernel space.
    pub fn transform_rank(&self, m: &Oriented<P>, l: &Oriented<P>) -> Result<usize> {
        let basis = self.kernel_space(m, l);
        if basis.is_empty() {
            return Ok(0);
        }
        let rows: Vec<Vec<CycNumber<P>>> = basis
            .iter()
            .map(|k| self.operator_of_kernel(k).map(|op| op.data().to_vec()))
            .collect::<Result<_>>()?;
        Ok(Matrix::from_rows(&rows).rank())
    }
}

fn combine_frame<const P: u32>(frame: &[Vector<P>], coords: &[Fp<P>]) -> Vector<P> {
    let mut out = vec![Fp::zero(); frame[0].len()];
    for (v, c) in frame.iter().zip(coords) {
        out = add_vec(&out, &scale_vec(*c, v));
    }
    out
}

/// `Σ_{m ∈ reps} f(m·h)` as a matrix from `source` values to `target`
/// values.
fn averaging<const P: u32>(
    space: &SympSpace<P>,
    target: &Model<P>,
    source: &Model<P>,
    reps: &[Vector<P>],
) -> CycMatrix<P> {
    let p = P as usize;
    let (rows, cols) = (target.dim(), source.dim());
    let mut counts = vec![0i64; rows * cols * p];
    for d in 0..rows {
        let dd = HElement::from_vector(target.rep(d));
        for m in reps {
            let x = space.h_mul_unchecked(&HElement::from_vector(m.clone()), &dd);
            let (z0, c) = source.factorize(&x);
            counts[(d * cols + c) * p + z0.value() as usize] += 1;
        }
    }
    let table = psi_table::<P>();
    Matrix::from_fn(rows, cols, |d, c| {
        let base = (d * cols + c) * p;
        let mut acc = CycNumber::zero();
        for z in 0..p {
            let n = counts[base + z];
            if n != 0 {
                acc = &acc + &table[z].scale_rational(&BigRational::from_integer(BigInt::from(n)));
            }
        }
        acc
    })
}
