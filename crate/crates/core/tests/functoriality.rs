use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weil_core::quantization::isotropic_stabilizer_generators;
use weil_core::symplectic::unit_vec;
use weil_core::{
    proportionality, CanonicalSpace, CartesianIso, CorrespondenceQuantizer, CycNumber,
    DualityPairing, FlatSection, Fp, Matrix, Oriented, ReductionIso, SpElement, Subspace,
    SympSpace,
};

fn random_section<const P: u32>(rng: &mut impl Rng, d: usize) -> FlatSection<P> {
    FlatSection::from_coords(
        (0..d).map(|_| CycNumber::zeta_pow(rng.gen_range(0..P as i64)) * CycNumber::from_integer(rng.gen_range(-3..4))).collect(),
    )
}

#[test]
fn cartesian_iso_intertwines_products() {
    let v = SympSpace::<3>::standard(1);
    let h1 = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let h2 = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let prod = CanonicalSpace::new(v.product(&v), 1000).unwrap();
    let alpha = CartesianIso::new(&h1, &h2, &prod).unwrap();
    assert_eq!(alpha.matrix().shape(), (9, 9));
    let group = SpElement::enumerate(&v, 1000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..30 {
        let g1 = group.choose(&mut rng).unwrap();
        let g2 = group.choose(&mut rng).unwrap();
        let lhs = alpha.matrix() * &prod.rho(&g1.direct_sum(g2)).unwrap();
        let rhs = &h1.rho(g1).unwrap().kron(&h2.rho(g2).unwrap()) * alpha.matrix();
        assert_eq!(lhs, rhs);
    }
}

#[test]
fn cartesian_iso_sends_product_sections_to_tensors() {
    let v = SympSpace::<3>::standard(1);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let prod = CanonicalSpace::new(v.product(&v), 1000).unwrap();
    let alpha = CartesianIso::new(&h, &h, &prod).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..5 {
        let x1 = random_section::<3>(&mut rng, 3);
        let x2 = random_section::<3>(&mut rng, 3);
        let tensor = Matrix::from_vec(3, 1, x1.coords.values.clone())
            .kron(&Matrix::from_vec(3, 1, x2.coords.values.clone()));
        let section = prod
            .section_from(alpha.factor_base(), &weil_core::ModelVector { values: tensor.data().to_vec() })
            .unwrap();
        assert_eq!(alpha.apply(&section), tensor.data());
        for m1 in h.lagrangians().iter().step_by(3) {
            for m2 in h.lagrangians().iter().step_by(2) {
                let at = prod.evaluate_section(&section, &m1.product(m2)).unwrap();
                let a = h.evaluate_section(&x1, m1).unwrap().values;
                let b = h.evaluate_section(&x2, m2).unwrap().values;
                let expected = Matrix::from_vec(3, 1, a).kron(&Matrix::from_vec(3, 1, b));
                assert_eq!(at.values, expected.data());
            }
        }
    }
}

fn duality_checks<const P: u32>() {
    let v = SympSpace::<P>::standard(1);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let bar = CanonicalSpace::new(v.dual(), 1000).unwrap();
    let pairing = DualityPairing::new(&bar, &h).unwrap();
    let gram = pairing.gram().unwrap();
    assert!(gram.is_identity());
    assert_eq!(gram.rank(), h.dim());
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let a = random_section::<P>(&mut rng, h.dim());
        let b = random_section::<P>(&mut rng, h.dim());
        let c = random_section::<P>(&mut rng, h.dim());
        let m = h.lagrangians().choose(&mut rng).unwrap();
        let base = pairing.pair(&a, &b).unwrap();
        assert_eq!(pairing.pair_at(m, &a, &b).unwrap(), base);
        let t = CycNumber::zeta_pow(2);
        let combo = FlatSection::from_coords(
            b.coords.values.iter().zip(&c.coords.values).map(|(x, y)| &(&t * x) + y).collect(),
        );
        assert_eq!(pairing.pair(&a, &combo).unwrap(), &(&t * &base) + &pairing.pair(&a, &c).unwrap());
    }
}

#[test]
fn duality_pairing_is_natural_and_nondegenerate() {
    duality_checks::<3>();
    duality_checks::<5>();
}

#[test]
fn reduction_along_a_line_in_rank_two() {
    let v = SympSpace::<3>::standard(2);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let w = CanonicalSpace::new(SympSpace::standard(1), 1000).unwrap();
    let line = Oriented::from_frame(4, &[unit_vec(4, 0)]).unwrap();
    let iso = ReductionIso::new(&h, &line, &w).unwrap();
    assert_eq!(iso.invariant_basis().len(), 3);
    assert_eq!(iso.rank_on_invariants(), 3);
    let gens = isotropic_stabilizer_generators(iso.reduction());
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut elements = gens.clone();
    for _ in 0..20 {
        let mut g = SpElement::identity(&v);
        for _ in 0..5 {
            g = g.compose(gens.choose(&mut rng).unwrap());
        }
        elements.push(g);
    }
    for g in &elements {
        assert!(iso.is_equivariant(g).unwrap());
    }
}

#[test]
fn reduction_extremes() {
    let v = SympSpace::<3>::standard(2);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let zero = Oriented::new(Subspace::zero(4), Fp::new(1)).unwrap();
    let iso = ReductionIso::new(&h, &zero, &h).unwrap();
    assert!(iso.matrix().is_identity());
    let point = CanonicalSpace::new(SympSpace::standard(0), 1000).unwrap();
    for l in v.enumerate_lagrangians(100).unwrap().iter().step_by(9) {
        let lo = Oriented::new(l.clone(), Fp::new(1)).unwrap();
        let iso = ReductionIso::new(&h, &lo, &point).unwrap();
        assert_eq!(iso.invariant_basis().len(), 1);
        assert_eq!(iso.rank_on_invariants(), 1);
    }
}

#[test]
fn graphs_quantize_to_the_weil_representation() {
    let v = SympSpace::<3>::standard(1);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let q = CorrespondenceQuantizer::new(&h, 1000).unwrap();
    for g in SpElement::enumerate(&v, 1000).unwrap() {
        let a = q.quantize(&v.graph_lagrangian(&g).unwrap()).unwrap();
        assert!(proportionality(&a, &h.rho(&g).unwrap()).is_some(), "graph of {g:?}");
    }
}

#[test]
fn product_lagrangians_quantize_to_rank_one() {
    let v = SympSpace::<3>::standard(1);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let q = CorrespondenceQuantizer::new(&h, 1000).unwrap();
    for l1 in h.lagrangians().iter().step_by(3) {
        for l2 in h.lagrangians().iter().step_by(3) {
            assert_eq!(q.quantize(&l1.product(l2)).unwrap().rank(), 1);
        }
    }
}
