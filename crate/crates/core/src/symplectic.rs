//! Symplectic vector spaces over `F_p`: subspaces, oriented Lagrangians,
//! the symplectic group, graphs and symplectic reduction.

use std::collections::{BTreeSet, VecDeque};

use num_traits::{One, Zero};
use rand::Rng;

use crate::error::{Result, WeilError};
use crate::field::Fp;
use crate::matrix::Matrix;

pub type Vector<const P: u32> = Vec<Fp<P>>;

fn check_len<const P: u32>(v: &[Fp<P>], expected: usize) -> Result<()> {
    if v.len() == expected {
        Ok(())
    } else {
        Err(WeilError::DimensionMismatch { expected, found: v.len() })
    }
}

pub fn add_vec<const P: u32>(a: &[Fp<P>], b: &[Fp<P>]) -> Vector<P> {
    a.iter().zip(b).map(|(x, y)| *x + *y).collect()
}

pub fn sub_vec<const P: u32>(a: &[Fp<P>], b: &[Fp<P>]) -> Vector<P> {
    a.iter().zip(b).map(|(x, y)| *x - *y).collect()
}

pub fn scale_vec<const P: u32>(s: Fp<P>, a: &[Fp<P>]) -> Vector<P> {
    a.iter().map(|x| s * *x).collect()
}

pub fn unit_vec<const P: u32>(dim: usize, i: usize) -> Vector<P> {
    let mut v = vec![Fp::zero(); dim];
    v[i] = Fp::one();
    v
}

/// Every vector of `F_p^dim`, in lexicographic order.
pub fn all_vectors<const P: u32>(dim: usize) -> impl Iterator<Item = Vector<P>> {
    let total = (P as u64).pow(dim as u32);
    (0..total).map(move |mut k| {
        let mut v = vec![Fp::zero(); dim];
        for slot in v.iter_mut().rev() {
            *slot = Fp::new((k % P as u64) as i64);
            k /= P as u64;
        }
        v
    })
}

/// A finite-dimensional symplectic space `(F_p^{2n}, ω)` with
/// `ω(u, v) = uᵀ Ω v`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SympSpace<const P: u32> {
    n: usize,
    form: Matrix<Fp<P>>,
}

impl<const P: u32> SympSpace<P> {
    /// The standard form `ω(e_i, e_{n+j}) = δ_ij`.
    pub fn standard(n: usize) -> Self {
        let form = Matrix::from_fn(2 * n, 2 * n, |i, j| {
            if j == i + n {
                Fp::one()
            } else if i == j + n {
                -Fp::one()
            } else {
                Fp::zero()
            }
        });
        Self { n, form }
    }

    pub fn from_form(form: Matrix<Fp<P>>) -> Result<Self> {
        if !form.is_square() || !form.rows().is_multiple_of(2) {
            return Err(WeilError::DimensionMismatch {
                expected: form.rows() + form.rows() % 2,
                found: form.cols(),
            });
        }
        let d = form.rows();
        for i in 0..d {
            for j in 0..d {
                if form[(i, j)] != -form[(j, i)] {
                    return Err(WeilError::NotAntisymmetric);
                }
            }
        }
        if d > 0 && form.determinant().is_zero() {
            return Err(WeilError::DegenerateForm);
        }
        Ok(Self { n: d / 2, form })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn form(&self) -> &Matrix<Fp<P>> {
        &self.form
    }

    pub fn omega(&self, u: &[Fp<P>], v: &[Fp<P>]) -> Result<Fp<P>> {
        check_len(u, self.dim())?;
        check_len(v, self.dim())?;
        Ok(self.pair(u, v))
    }

    /// `ω(u, v)` without length checks.
    pub fn pair(&self, u: &[Fp<P>], v: &[Fp<P>]) -> Fp<P> {
        let mut acc = Fp::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                let w = self.form[(i, j)];
                if !w.is_zero() && !vj.is_zero() {
                    acc += *ui * w * *vj;
                }
            }
        }
        acc
    }

    /// `(V, -ω)`.
    pub fn dual(&self) -> Self {
        Self { n: self.n, form: self.form.map(|x| -*x) }
    }

    /// Direct sum with block-diagonal form, coordinates of `self` first.
    pub fn product(&self, other: &Self) -> Self {
        Self {
            n: self.n + other.n,
            form: Matrix::block_diag(&self.form, &other.form, Fp::zero()),
        }
    }

    pub fn pfaffian(&self) -> Fp<P> {
        self.form.pfaffian()
    }

    pub fn zero_vector(&self) -> Vector<P> {
        vec![Fp::zero(); self.dim()]
    }

    pub fn perp(&self, sub: &Subspace<P>) -> Subspace<P> {
        if sub.dim() == 0 {
            return Subspace::full(self.dim());
        }
        let constraints = sub.basis() * &self.form;
        Subspace::span(self.dim(), &constraints.nullspace())
    }

    pub fn is_isotropic(&self, sub: &Subspace<P>) -> bool {
        sub.row_iter().all(|a| sub.row_iter().all(|b| self.pair(a, b).is_zero()))
    }

    pub fn is_lagrangian(&self, sub: &Subspace<P>) -> bool {
        sub.ambient_dim() == self.dim() && sub.dim() == self.n && self.is_isotropic(sub)
    }

    pub fn oriented_lagrangian(&self, rows: &[Vector<P>], scale: Fp<P>) -> Result<Oriented<P>> {
        let o = Oriented::from_rref_rows(self.dim(), rows, scale)?;
        if !self.is_lagrangian(&o.subspace) {
            return Err(WeilError::NotLagrangian);
        }
        Ok(o)
    }

    /// `det[ω(a_i, b_j)]`.
    pub fn pairing_determinant(&self, a: &[Vector<P>], b: &[Vector<P>]) -> Fp<P> {
        if a.is_empty() {
            return Fp::one();
        }
        Matrix::from_fn(a.len(), b.len(), |i, j| self.pair(&a[i], &b[j])).determinant()
    }

    /// The pairing `ω_∧(o_L, o_M) = s_L s_M det[ω(l_i, m_j)]`, rows from
    /// `l`, columns from `m`.
    pub fn wedge_pairing(&self, l: &Oriented<P>, m: &Oriented<P>) -> Fp<P> {
        l.scale * m.scale * self.pairing_determinant(&l.subspace.vectors(), &m.subspace.vectors())
    }

    /// The pairing induced by the volume form `ω^k / k!` on
    /// `o_L ∧ o_M`; differs from [`Self::wedge_pairing`] by `(-1)^{k(k-1)/2}`.
    pub fn volume_pairing(&self, l: &Oriented<P>, m: &Oriented<P>) -> Fp<P> {
        Fp::sign(binom2(l.subspace.dim())) * self.wedge_pairing(l, m)
    }

    /// All Lagrangian subspaces in increasing RREF order.
    pub fn enumerate_lagrangians(&self, cap: u128) -> Result<Vec<Subspace<P>>> {
        let count = lagrangian_count(P, self.n);
        if count > cap {
            return Err(WeilError::CapExceeded { count, cap });
        }
        let mut out: Vec<Subspace<P>> = enumerate_subspaces::<P>(self.dim(), self.n)
            .filter(|s| self.is_isotropic(s))
            .collect();
        out.sort();
        Ok(out)
    }

    /// All oriented Lagrangians, ordered by subspace and then by scale.
    pub fn enumerate_oriented_lagrangians(&self, cap: u128) -> Result<Vec<Oriented<P>>> {
        let count = oriented_lagrangian_count(P, self.n);
        if count > cap {
            return Err(WeilError::CapExceeded { count, cap });
        }
        let lags = self.enumerate_lagrangians(u128::MAX)?;
        Ok(lags
            .into_iter()
            .flat_map(|l| Fp::<P>::units().map(move |s| Oriented { subspace: l.clone(), scale: s }))
            .collect())
    }

    /// All isotropic subspaces of dimension `d`.
    pub fn enumerate_isotropic(&self, d: usize) -> Vec<Subspace<P>> {
        let mut out: Vec<_> =
            enumerate_subspaces::<P>(self.dim(), d).filter(|s| self.is_isotropic(s)).collect();
        out.sort();
        out
    }

    /// First Lagrangian in enumeration order meeting every subspace of
    /// `avoid` trivially.
    pub fn find_transversal_lagrangian(&self, avoid: &[&Subspace<P>]) -> Result<Subspace<P>> {
        let mut lags: Vec<Subspace<P>> =
            enumerate_subspaces::<P>(self.dim(), self.n).collect();
        lags.sort();
        lags.into_iter()
            .find(|n| self.is_isotropic(n) && avoid.iter().all(|a| in_general_position(n, a)))
            .ok_or(WeilError::NoTransversal)
    }

    /// Orientation of `Γ_g ⊂ V̄ × V` whose image under the second
    /// projection is the top vector dual to `Pf(Ω) · det`.
    pub fn graph_lagrangian(&self, g: &SpElement<P>) -> Result<Oriented<P>> {
        let d = self.dim();
        let rows: Vec<Vector<P>> = (0..d)
            .map(|i| {
                let mut r = unit_vec(2 * d, i);
                r[d..].copy_from_slice(&g.matrix.column(i));
                r
            })
            .collect();
        let det = g.matrix.determinant();
        let top = self.pfaffian() * det;
        let scale = top.inv()?;
        self.dual().product(self).oriented_lagrangian(&rows, scale)
    }
}

pub(crate) fn binom2(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// `∏_{i=1..n} (q^i + 1)`.
pub fn lagrangian_count(q: u32, n: usize) -> u128 {
    (1..=n as u32).fold(1u128, |acc, i| acc.saturating_mul((q as u128).saturating_pow(i).saturating_add(1)))
}

pub fn oriented_lagrangian_count(q: u32, n: usize) -> u128 {
    lagrangian_count(q, n).saturating_mul(q as u128 - 1)
}

/// `|Sp(2n, q)| = q^{n²} ∏ (q^{2i} - 1)`.
pub fn symplectic_group_order(q: u32, n: usize) -> u128 {
    let q = q as u128;
    let mut acc = q.saturating_pow((n * n) as u32);
    for i in 1..=n as u32 {
        acc = acc.saturating_mul(q.saturating_pow(2 * i) - 1);
    }
    acc
}

/// Every subspace of dimension `k` of `F_p^dim`, one per RREF matrix.
pub fn enumerate_subspaces<const P: u32>(dim: usize, k: usize) -> impl Iterator<Item = Subspace<P>> {
    let mut out = Vec::new();
    for pivots in combinations(dim, k) {
        let free: Vec<(usize, usize)> = (0..k)
            .flat_map(|r| {
                let pivots = &pivots;
                (pivots[r] + 1..dim).filter(move |c| !pivots.contains(c)).map(move |c| (r, c))
            })
            .collect();
        for values in all_vectors::<P>(free.len()) {
            let mut m = Matrix::zeros(k, dim);
            for (r, &c) in pivots.iter().enumerate() {
                m[(r, c)] = Fp::one();
            }
            for (&(r, c), x) in free.iter().zip(values) {
                m[(r, c)] = x;
            }
            out.push(Subspace { basis: m, pivots: pivots.clone(), ambient: dim });
        }
    }
    out.into_iter()
}

fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, k, &mut Vec::new(), &mut out);
    out
}

/// A linear subspace of `F_p^d` stored by its reduced row echelon basis,
/// so equal subspaces have equal representations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Subspace<const P: u32> {
    basis: Matrix<Fp<P>>,
    pivots: Vec<usize>,
    ambient: usize,
}

impl<const P: u32> Subspace<P> {
    pub fn span(ambient: usize, vectors: &[Vector<P>]) -> Self {
        if vectors.is_empty() {
            return Self::zero(ambient);
        }
        let e = Matrix::from_rows(vectors).rref();
        Self { basis: e.matrix, pivots: e.pivots, ambient }
    }

    pub fn zero(ambient: usize) -> Self {
        Self { basis: Matrix::empty(ambient), pivots: Vec::new(), ambient }
    }

    pub fn full(ambient: usize) -> Self {
        Self { basis: Matrix::identity(ambient), pivots: (0..ambient).collect(), ambient }
    }

    pub fn dim(&self) -> usize {
        self.basis.rows()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &Matrix<Fp<P>> {
        &self.basis
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[Fp<P>]> {
        self.basis.row_iter()
    }

    pub fn vectors(&self) -> Vec<Vector<P>> {
        self.basis.to_rows()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Non-pivot columns; their unit vectors span a complement.
    pub fn free_columns(&self) -> Vec<usize> {
        (0..self.ambient).filter(|c| !self.pivots.contains(c)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dim() == 0
    }

    /// Coordinates against the RREF basis, if `v` lies in the subspace.
    pub fn coordinates(&self, v: &[Fp<P>]) -> Option<Vec<Fp<P>>> {
        let coords: Vec<Fp<P>> = self.pivots.iter().map(|&c| v[c]).collect();
        let back = self.combine(&coords);
        (back == v).then_some(coords)
    }

    pub fn contains(&self, v: &[Fp<P>]) -> bool {
        v.len() == self.ambient && self.coordinates(v).is_some()
    }

    pub fn contains_subspace(&self, other: &Subspace<P>) -> bool {
        other.row_iter().all(|r| self.contains(r))
    }

    pub fn combine(&self, coords: &[Fp<P>]) -> Vector<P> {
        if self.dim() == 0 {
            return vec![Fp::zero(); self.ambient];
        }
        self.basis.vec_mul(coords)
    }

    /// Splits `v` as `l + c` with `l` in the subspace and `c` supported on
    /// the free columns.
    pub fn split(&self, v: &[Fp<P>]) -> (Vector<P>, Vector<P>) {
        let coords: Vec<Fp<P>> = self.pivots.iter().map(|&c| v[c]).collect();
        let l = self.combine(&coords);
        let c = sub_vec(v, &l);
        (l, c)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.ambient);
        }
        let stacked = self.basis.vstack(&other.basis);
        let vectors: Vec<Vector<P>> = stacked
            .transpose()
            .nullspace()
            .into_iter()
            .map(|y| self.combine(&y[..self.dim()]))
            .collect();
        Self::span(self.ambient, &vectors)
    }

    pub fn sum(&self, other: &Self) -> Self {
        let mut vectors = self.vectors();
        vectors.extend(other.vectors());
        Self::span(self.ambient, &vectors)
    }

    /// Every vector of the subspace, ordered by coordinates.
    pub fn elements(&self) -> impl Iterator<Item = Vector<P>> + '_ {
        all_vectors::<P>(self.dim()).map(move |c| self.combine(&c))
    }

    /// `det` of the coordinates of `frame` against the RREF basis, so
    /// that `frame_1 ∧ … ∧ frame_k = det · (r_1 ∧ … ∧ r_k)`.
    pub fn frame_determinant(&self, frame: &[Vector<P>]) -> Fp<P> {
        if frame.is_empty() {
            return Fp::one();
        }
        Matrix::from_fn(frame.len(), self.dim(), |i, j| frame[i][self.pivots[j]]).determinant()
    }

    /// Extends `start` (independent vectors inside the subspace) to a basis
    /// by greedily adding RREF rows; returns only the added vectors.
    pub fn extend_basis(&self, start: &[Vector<P>]) -> Vec<Vector<P>> {
        let mut current = Subspace::span(self.ambient, start);
        let mut added = Vec::new();
        for row in self.row_iter() {
            if !current.contains(row) {
                added.push(row.to_vec());
                let mut all = current.vectors();
                all.push(row.to_vec());
                current = Subspace::span(self.ambient, &all);
            }
        }
        added
    }

    pub fn to_u32_rows(&self) -> Vec<Vec<u32>> {
        self.row_iter().map(|r| r.iter().map(|x| x.value()).collect()).collect()
    }
}

pub fn in_general_position<const P: u32>(a: &Subspace<P>, b: &Subspace<P>) -> bool {
    a.intersect(b).is_zero()
}

/// A subspace with a nonzero top exterior vector `scale · (r_1 ∧ … ∧ r_k)`
/// against its RREF rows.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Oriented<const P: u32> {
    pub subspace: Subspace<P>,
    pub scale: Fp<P>,
}

pub type OrientedLagrangian<const P: u32> = Oriented<P>;
pub type OrientedIsotropic<const P: u32> = Oriented<P>;

impl<const P: u32> Oriented<P> {
    pub fn new(subspace: Subspace<P>, scale: Fp<P>) -> Result<Self> {
        if scale.is_zero() {
            return Err(WeilError::ZeroOrientation);
        }
        Ok(Self { subspace, scale })
    }

    /// Oriented by `v_1 ∧ … ∧ v_k` for independent `vectors`.
    pub fn from_frame(ambient: usize, vectors: &[Vector<P>]) -> Result<Self> {
        for v in vectors {
            check_len(v, ambient)?;
        }
        let subspace = Subspace::span(ambient, vectors);
        if subspace.dim() != vectors.len() {
            return Err(WeilError::ZeroOrientation);
        }
        let scale = subspace.frame_determinant(vectors);
        Self::new(subspace, scale)
    }

    fn from_rref_rows(ambient: usize, rows: &[Vector<P>], scale: Fp<P>) -> Result<Self> {
        let o = Self::from_frame(ambient, rows)?;
        Self::new(o.subspace, o.scale * scale)
    }

    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    pub fn rescale(&self, t: Fp<P>) -> Result<Self> {
        Self::new(self.subspace.clone(), self.scale * t)
    }

    /// `self × other` oriented by `o_self ∧ o_other`.
    pub fn product(&self, other: &Self) -> Self {
        let a = self.subspace.ambient_dim();
        let b = other.subspace.ambient_dim();
        let mut rows: Vec<Vector<P>> = self
            .subspace
            .row_iter()
            .map(|r| {
                let mut v = r.to_vec();
                v.resize(a + b, Fp::zero());
                v
            })
            .collect();
        rows.extend(other.subspace.row_iter().map(|r| {
            let mut v = vec![Fp::zero(); a];
            v.extend_from_slice(r);
            v
        }));
        let o = Self::from_frame(a + b, &rows).expect("product of independent frames");
        Self { subspace: o.subspace, scale: o.scale * self.scale * other.scale }
    }

    /// Coefficient of the orientation against the frame
    /// `frame_1 ∧ … ∧ frame_k` (which must be a basis of the subspace).
    pub fn coefficient_against(&self, frame: &[Vector<P>]) -> Fp<P> {
        let det = self.subspace.frame_determinant(frame);
        self.scale * det.inv().expect("frame spans the subspace")
    }
}

/// An element of `Sp(V)` in the standard basis, acting on column vectors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SpElement<const P: u32> {
    matrix: Matrix<Fp<P>>,
}

impl<const P: u32> SpElement<P> {
    pub fn new(space: &SympSpace<P>, matrix: Matrix<Fp<P>>) -> Result<Self> {
        if matrix.shape() != (space.dim(), space.dim()) {
            return Err(WeilError::DimensionMismatch { expected: space.dim(), found: matrix.rows() });
        }
        if &(&matrix.transpose() * space.form()) * &matrix != *space.form() {
            return Err(WeilError::NotSymplectic);
        }
        Ok(Self { matrix })
    }

    pub fn identity(space: &SympSpace<P>) -> Self {
        Self { matrix: Matrix::identity(space.dim()) }
    }

    pub fn matrix(&self) -> &Matrix<Fp<P>> {
        &self.matrix
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self { matrix: &self.matrix * &other.matrix }
    }

    pub fn inverse(&self) -> Self {
        Self { matrix: self.matrix.inverse().expect("symplectic matrices are invertible") }
    }

    pub fn apply(&self, v: &[Fp<P>]) -> Vector<P> {
        self.matrix.mul_vec(v)
    }

    pub fn apply_subspace(&self, s: &Subspace<P>) -> Subspace<P> {
        let images: Vec<Vector<P>> = s.row_iter().map(|r| self.apply(r)).collect();
        Subspace::span(s.ambient_dim(), &images)
    }

    /// Pushes the orientation forward by `⋀^top g`.
    pub fn act(&self, o: &Oriented<P>) -> Oriented<P> {
        let images: Vec<Vector<P>> = o.subspace.row_iter().map(|r| self.apply(r)).collect();
        let pushed = Oriented::from_frame(o.subspace.ambient_dim(), &images)
            .expect("invertible maps preserve independence");
        Oriented { subspace: pushed.subspace, scale: pushed.scale * o.scale }
    }

    /// `x ↦ x + a ω(v, x) v`.
    pub fn transvection(space: &SympSpace<P>, v: &[Fp<P>], a: Fp<P>) -> Self {
        let d = space.dim();
        let matrix = Matrix::from_fn(d, d, |i, j| {
            let e = if i == j { Fp::one() } else { Fp::zero() };
            e + a * space.pair(v, &unit_vec(d, j)) * v[i]
        });
        Self { matrix }
    }

    /// A product of `steps` random transvections.
    pub fn random(space: &SympSpace<P>, rng: &mut impl Rng, steps: usize) -> Self {
        let mut g = Self::identity(space);
        for _ in 0..steps {
            let v: Vector<P> = (0..space.dim()).map(|_| Fp::new(rng.gen_range(0..P as i64))).collect();
            let a = Fp::new(rng.gen_range(1..P as i64));
            g = g.compose(&Self::transvection(space, &v, a));
        }
        g
    }

    /// The whole group by breadth-first search over unit transvections,
    /// sorted.
    pub fn enumerate(space: &SympSpace<P>, cap: u128) -> Result<Vec<Self>> {
        let count = symplectic_group_order(P, space.n());
        if count > cap {
            return Err(WeilError::CapExceeded { count, cap });
        }
        let gens: Vec<Self> = all_vectors::<P>(space.dim())
            .skip(1)
            .map(|v| Self::transvection(space, &v, Fp::one()))
            .collect();
        let start = Self::identity(space);
        let mut seen = BTreeSet::from([start.clone()]);
        let mut queue = VecDeque::from([start]);
        while let Some(g) = queue.pop_front() {
            for t in &gens {
                let h = g.compose(t);
                if seen.insert(h.clone()) {
                    queue.push_back(h);
                }
            }
        }
        Ok(seen.into_iter().collect())
    }

    /// `g₁ ⊕ g₂` acting on the product space.
    pub fn direct_sum(&self, other: &Self) -> Self {
        Self { matrix: Matrix::block_diag(&self.matrix, &other.matrix, Fp::zero()) }
    }
}

/// Symplectic reduction `I^⊥ / I` with a symplectic basis of the quotient
/// lifted into `I^⊥`.
#[derive(Clone, Debug)]
pub struct Reduction<const P: u32> {
    ambient: SympSpace<P>,
    isotropic: Oriented<P>,
    perp: Subspace<P>,
    lifts: Vec<Vector<P>>,
    reduced: SympSpace<P>,
}

impl<const P: u32> Reduction<P> {
    pub fn new(space: &SympSpace<P>, isotropic: &Oriented<P>) -> Result<Self> {
        if isotropic.subspace.ambient_dim() != space.dim() {
            return Err(WeilError::DimensionMismatch {
                expected: space.dim(),
                found: isotropic.subspace.ambient_dim(),
            });
        }
        if !space.is_isotropic(&isotropic.subspace) {
            return Err(WeilError::NotIsotropic);
        }
        let perp = space.perp(&isotropic.subspace);
        let complement = perp.extend_basis(&isotropic.subspace.vectors());
        let lifts = symplectic_basis(space, complement);
        let k = lifts.len() / 2;
        Ok(Self {
            ambient: space.clone(),
            isotropic: isotropic.clone(),
            perp,
            lifts,
            reduced: SympSpace::standard(k),
        })
    }

    pub fn ambient(&self) -> &SympSpace<P> {
        &self.ambient
    }

    pub fn isotropic(&self) -> &Oriented<P> {
        &self.isotropic
    }

    pub fn perp(&self) -> &Subspace<P> {
        &self.perp
    }

    pub fn reduced(&self) -> &SympSpace<P> {
        &self.reduced
    }

    /// Lifts of the standard basis of the quotient.
    pub fn lifts(&self) -> &[Vector<P>] {
        &self.lifts
    }

    pub fn project(&self, u: &[Fp<P>]) -> Result<Vector<P>> {
        if !self.perp.contains(u) {
            return Err(WeilError::NotInSubspace);
        }
        let k = self.reduced.n();
        let mut w = vec![Fp::zero(); 2 * k];
        for i in 0..k {
            w[i] = self.ambient.pair(u, &self.lifts[k + i]);
            w[k + i] = -self.ambient.pair(u, &self.lifts[i]);
        }
        Ok(w)
    }

    pub fn lift(&self, w: &[Fp<P>]) -> Vector<P> {
        let mut u = self.ambient.zero_vector();
        for (c, l) in w.iter().zip(&self.lifts) {
            u = add_vec(&u, &scale_vec(*c, l));
        }
        u
    }

    /// Preimage of a subspace of the quotient, containing `I`.
    pub fn lift_subspace(&self, s: &Subspace<P>) -> Subspace<P> {
        let mut vectors = self.isotropic.subspace.vectors();
        vectors.extend(s.row_iter().map(|r| self.lift(r)));
        Subspace::span(self.ambient.dim(), &vectors)
    }

    /// `o_I ∧ lift(o_W)` for an oriented subspace of the quotient.
    pub fn lift_oriented(&self, o: &Oriented<P>) -> Oriented<P> {
        let mut frame = self.isotropic.subspace.vectors();
        frame.extend(o.subspace.row_iter().map(|r| self.lift(r)));
        let lifted = Oriented::from_frame(self.ambient.dim(), &frame).expect("independent lift");
        Oriented { subspace: lifted.subspace, scale: lifted.scale * self.isotropic.scale * o.scale }
    }

    /// The induced map on the quotient of an element preserving `I`.
    pub fn induced(&self, g: &SpElement<P>) -> Result<SpElement<P>> {
        if g.apply_subspace(&self.isotropic.subspace) != self.isotropic.subspace {
            return Err(WeilError::NotInSubspace);
        }
        let k2 = self.reduced.dim();
        let cols: Vec<Vector<P>> = self
            .lifts
            .iter()
            .map(|l| self.project(&g.apply(l)))
            .collect::<Result<_>>()?;
        let m = Matrix::from_fn(k2, k2, |i, j| cols[j][i]);
        SpElement::new(&self.reduced, m)
    }
}

/// Symplectic Gram-Schmidt: returns `e_1..e_k, f_1..f_k` with
/// `ω(e_i, f_j) = δ_ij` spanning the same space as `vectors`, assumed
/// nondegenerate.
fn symplectic_basis<const P: u32>(space: &SympSpace<P>, mut vectors: Vec<Vector<P>>) -> Vec<Vector<P>> {
    let mut es = Vec::new();
    let mut fs = Vec::new();
    while let Some(u) = (!vectors.is_empty()).then(|| vectors.remove(0)) {
        let j = vectors
            .iter()
            .position(|v| !space.pair(&u, v).is_zero())
            .expect("nondegenerate complement");
        let v = vectors.remove(j);
        let v = scale_vec(space.pair(&u, &v).inv().expect("nonzero"), &v);
        vectors = vectors
            .into_iter()
            .map(|x| {
                let a = space.pair(&x, &v);
                let b = space.pair(&x, &u);
                add_vec(&sub_vec(&x, &scale_vec(a, &u)), &scale_vec(b, &v))
            })
            .collect();
        es.push(u);
        fs.push(v);
    }
    es.extend(fs);
    es
}

#[cfg(test)]
mod tests {
    use super::*;

    type F3 = Fp<3>;

    fn v3(xs: &[i64]) -> Vector<3> {
        xs.iter().map(|&x| F3::new(x)).collect()
    }

    fn line(xs: &[i64]) -> Subspace<3> {
        Subspace::span(xs.len(), &[v3(xs)])
    }

    #[test]
    fn omega_examples() {
        let v = SympSpace::<3>::standard(1);
        assert_eq!(v.omega(&v3(&[1, 0]), &v3(&[0, 1])).unwrap(), F3::new(1));
        assert_eq!(v.omega(&v3(&[1, 2]), &v3(&[1, 2])).unwrap(), F3::new(0));
        assert_eq!(v.omega(&v3(&[1, 1]), &v3(&[2, 1])).unwrap(), F3::new(2));
        assert!(matches!(
            v.omega(&v3(&[1]), &v3(&[1, 0])),
            Err(WeilError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn form_validation() {
        let bad = Matrix::from_rows(&[v3(&[0, 1]), v3(&[1, 0])]);
        assert_eq!(SympSpace::from_form(bad), Err(WeilError::NotAntisymmetric));
        let zero = Matrix::<F3>::zeros(2, 2);
        assert_eq!(SympSpace::from_form(zero), Err(WeilError::DegenerateForm));
    }

    #[test]
    fn oriented_counts() {
        assert_eq!(SympSpace::<3>::standard(1).enumerate_oriented_lagrangians(1000).unwrap().len(), 8);
        assert_eq!(SympSpace::<5>::standard(1).enumerate_oriented_lagrangians(1000).unwrap().len(), 24);
        assert_eq!(SympSpace::<3>::standard(2).enumerate_oriented_lagrangians(1000).unwrap().len(), 80);
        assert!(matches!(
            SympSpace::<3>::standard(2).enumerate_oriented_lagrangians(10),
            Err(WeilError::CapExceeded { count: 80, cap: 10 })
        ));
    }

    #[test]
    fn lagrangian_counts_match_formula() {
        assert_eq!(SympSpace::<3>::standard(1).enumerate_lagrangians(u128::MAX).unwrap().len(), 4);
        assert_eq!(SympSpace::<5>::standard(1).enumerate_lagrangians(u128::MAX).unwrap().len(), 6);
        assert_eq!(SympSpace::<7>::standard(1).enumerate_lagrangians(u128::MAX).unwrap().len(), 8);
        assert_eq!(SympSpace::<3>::standard(2).enumerate_lagrangians(u128::MAX).unwrap().len(), 40);
    }

    #[test]
    fn brute_force_lagrangian_scan() {
        let v = SympSpace::<3>::standard(2);
        let vecs: Vec<Vector<3>> = all_vectors::<3>(4).skip(1).collect();
        let mut found = BTreeSet::new();
        for a in &vecs {
            for b in &vecs {
                let s = Subspace::span(4, &[a.clone(), b.clone()]);
                if s.dim() == 2 && v.is_isotropic(&s) {
                    found.insert(s);
                }
            }
        }
        let enumerated: BTreeSet<_> = v.enumerate_lagrangians(u128::MAX).unwrap().into_iter().collect();
        assert_eq!(found, enumerated);
    }

    #[test]
    fn subspace_calculus() {
        let v = SympSpace::<3>::standard(1);
        let l = line(&[1, 0]);
        let m = line(&[0, 1]);
        assert!(in_general_position(&l, &m));
        assert_eq!(l.intersect(&l), l);
        assert_eq!(v.perp(&l), l);
        assert_eq!(l.sum(&m), Subspace::full(2));
        assert!(!in_general_position(&l, &line(&[2, 0])));
    }

    #[test]
    fn wedge_pairing_examples() {
        let v = SympSpace::<3>::standard(1);
        let l = v.oriented_lagrangian(&[v3(&[1, 0])], F3::new(1)).unwrap();
        let m = v.oriented_lagrangian(&[v3(&[0, 1])], F3::new(1)).unwrap();
        assert_eq!(v.wedge_pairing(&l, &m), F3::new(1));
        let m2 = m.rescale(F3::new(2)).unwrap();
        assert_eq!(v.wedge_pairing(&l, &m2), F3::new(2));
        let diag = v.oriented_lagrangian(&[v3(&[1, 1])], F3::new(1)).unwrap();
        assert_eq!(v.wedge_pairing(&l, &diag), F3::new(1));
    }

    #[test]
    fn wedge_pairing_detects_general_position() {
        fn check<const P: u32>(n: usize) {
            let v = SympSpace::<P>::standard(n);
            let lags = v.enumerate_oriented_lagrangians(u128::MAX).unwrap();
            for l in &lags {
                for m in &lags {
                    let gp = in_general_position(&l.subspace, &m.subspace);
                    assert_eq!(!v.wedge_pairing(l, m).is_zero(), gp);
                }
            }
        }
        check::<3>(1);
        check::<5>(1);
        check::<3>(2);
    }

    #[test]
    fn action_examples() {
        let v = SympSpace::<3>::standard(1);
        let l = v.oriented_lagrangian(&[v3(&[1, 0])], F3::new(1)).unwrap();
        assert_eq!(SpElement::identity(&v).act(&l), l);
        let minus = SpElement::new(&v, Matrix::identity(2).scale(&F3::new(-1))).unwrap();
        assert_eq!(minus.act(&l), l.rescale(F3::new(-1)).unwrap());
        let j = SpElement::new(&v, Matrix::from_rows(&[v3(&[0, -1]), v3(&[1, 0])])).unwrap();
        let image = j.act(&l);
        assert_eq!(image.subspace, line(&[0, 1]));
        assert_eq!(image.scale, F3::new(1));
        let not_symplectic = Matrix::from_rows(&[v3(&[1, 1]), v3(&[0, 2])]);
        assert_eq!(SpElement::new(&v, not_symplectic), Err(WeilError::NotSymplectic));
    }

    #[test]
    fn group_order_and_action_laws() {
        let v = SympSpace::<3>::standard(1);
        let group = SpElement::enumerate(&v, 1000).unwrap();
        assert_eq!(group.len(), 24);
        let lags = v.enumerate_oriented_lagrangians(100).unwrap();
        for g in &group {
            for h in &group {
                for l in &lags {
                    assert_eq!(g.act(&h.act(l)), g.compose(h).act(l));
                }
            }
            for l in &lags {
                for m in &lags {
                    assert_eq!(v.wedge_pairing(&g.act(l), &g.act(m)), v.wedge_pairing(l, m));
                }
            }
        }
    }

    #[test]
    fn graphs_are_lagrangian() {
        let v = SympSpace::<3>::standard(1);
        let prod = v.dual().product(&v);
        for g in SpElement::enumerate(&v, 1000).unwrap() {
            let gamma = v.graph_lagrangian(&g).unwrap();
            assert!(prod.is_lagrangian(&gamma.subspace));
        }
        let diag = v.graph_lagrangian(&SpElement::identity(&v)).unwrap();
        assert_eq!(diag.subspace, Subspace::span(4, &[v3(&[1, 0, 1, 0]), v3(&[0, 1, 0, 1])]));
        assert_eq!(diag.scale, F3::new(1));
    }

    #[test]
    fn product_form_is_block_diagonal() {
        let v = SympSpace::<3>::standard(1);
        let p = v.product(&v);
        assert_eq!(p.form()[(0, 1)], F3::new(1));
        assert_eq!(p.form()[(2, 3)], F3::new(1));
        assert_eq!(p.form()[(0, 3)], F3::new(0));
    }

    #[test]
    fn reduction_examples() {
        let v = SympSpace::<3>::standard(2);
        let trivial = Reduction::new(&v, &Oriented::new(Subspace::zero(4), F3::new(1)).unwrap()).unwrap();
        assert_eq!(trivial.reduced().n(), 2);
        let e1 = Oriented::from_frame(4, &[v3(&[1, 0, 0, 0])]).unwrap();
        let r = Reduction::new(&v, &e1).unwrap();
        assert_eq!(r.reduced(), &SympSpace::standard(1));
        assert_eq!(r.lifts(), &[v3(&[0, 1, 0, 0]), v3(&[0, 0, 0, 1])]);
        assert_eq!(r.project(&v3(&[2, 1, 0, 0])).unwrap(), v3(&[1, 0]));
        assert!(r.project(&v3(&[0, 0, 1, 0])).is_err());
        let lag = v.enumerate_lagrangians(100).unwrap().remove(0);
        let full = Reduction::new(&v, &Oriented::new(lag, F3::new(1)).unwrap()).unwrap();
        assert_eq!(full.reduced().n(), 0);
        let non_iso = Oriented::from_frame(4, &[v3(&[1, 0, 0, 0]), v3(&[0, 0, 1, 0])]).unwrap();
        assert_eq!(Reduction::new(&v, &non_iso).unwrap_err(), WeilError::NotIsotropic);
    }

    #[test]
    fn reduced_forms_are_compatible_for_all_isotropic() {
        let v = SympSpace::<3>::standard(2);
        for d in 0..=2 {
            for i in v.enumerate_isotropic(d) {
                let r = Reduction::new(&v, &Oriented::new(i, F3::new(1)).unwrap()).unwrap();
                let w = r.reduced();
                assert_eq!(w.dim(), 2 * (2 - d));
                for a in all_vectors::<3>(w.dim()) {
                    let la = r.lift(&a);
                    assert_eq!(r.project(&la).unwrap(), a);
                    for b in all_vectors::<3>(w.dim()) {
                        assert_eq!(v.pair(&la, &r.lift(&b)), w.pair(&a, &b));
                    }
                }
                for u in r.perp().elements() {
                    for x in r.isotropic().subspace.elements() {
                        assert_eq!(r.project(&add_vec(&u, &x)).unwrap(), r.project(&u).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn first_transversal_in_order() {
        let v = SympSpace::<3>::standard(1);
        let n = v.find_transversal_lagrangian(&[&line(&[1, 0]), &line(&[0, 1])]).unwrap();
        assert_eq!(n, line(&[1, 1]));
        let v2 = SympSpace::<3>::standard(2);
        let lags = v2.enumerate_lagrangians(100).unwrap();
        for l in &lags {
            for m in &lags {
                let n = v2.find_transversal_lagrangian(&[l, m]).unwrap();
                assert!(in_general_position(&n, l) && in_general_position(&n, m));
            }
        }
    }

    #[test]
    fn transvections_are_symplectic() {
        let v = SympSpace::<5>::standard(2);
        for x in all_vectors::<5>(4).step_by(37) {
            let t = SpElement::transvection(&v, &x, Fp::new(3));
            assert!(SpElement::new(&v, t.matrix().clone()).is_ok());
        }
    }
}
