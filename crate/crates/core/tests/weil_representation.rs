use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use weil_core::{CanonicalSpace, Matrix, SpElement, SympSpace};

fn group() -> Vec<SpElement<3>> {
    SpElement::enumerate(&SympSpace::standard(1), 1000).unwrap()
}

#[test]
fn rho_is_a_homomorphism_on_sp2_f3() {
    let h = CanonicalSpace::<3>::new(SympSpace::standard(1), 100).unwrap();
    let g = group();
    let rho: Vec<_> = g.iter().map(|x| h.rho(x).unwrap()).collect();
    for (a, ra) in g.iter().zip(&rho) {
        for (b, rb) in g.iter().zip(&rho) {
            assert_eq!(ra * rb, h.rho(&a.compose(b)).unwrap());
        }
    }
}

#[test]
fn rho_is_a_homomorphism_on_sampled_sp4_f3() {
    let v = SympSpace::<3>::standard(2);
    let h = CanonicalSpace::new(v.clone(), 1000).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..40 {
        let a = SpElement::random(&v, &mut rng, 6);
        let b = SpElement::random(&v, &mut rng, 6);
        assert_eq!(&h.rho(&a).unwrap() * &h.rho(&b).unwrap(), h.rho(&a.compose(&b)).unwrap());
    }
}

#[test]
fn rho_conjugates_pi_geometrically() {
    let v = SympSpace::<3>::standard(1);
    let h = CanonicalSpace::new(v.clone(), 100).unwrap();
    for g in group() {
        let r = h.rho(&g).unwrap();
        let r_inv = h.rho(&g.inverse()).unwrap();
        for x in v.h_elements() {
            let lhs = &(&r * &h.pi(&x).unwrap()) * &r_inv;
            assert_eq!(lhs, h.pi(&v.h_act(&g, &x)).unwrap());
        }
    }
}

#[test]
fn total_fourier_is_an_invariant_idempotent() {
    let h = CanonicalSpace::<3>::new(SympSpace::standard(1), 100).unwrap();
    let f = h.total_fourier().unwrap();
    assert_eq!(f.shape(), (24, 24));
    assert_eq!(&f * &f, f);
    assert_eq!(f.rank(), 3);
    for g in group() {
        let a = h.geometric_action(&g).unwrap();
        assert_eq!(&a * &f, &f * &a);
    }
}

#[test]
fn rho_and_operators_are_unitary() {
    let h = CanonicalSpace::<5>::new(SympSpace::standard(1), 100).unwrap();
    let v = h.space().clone();
    for m in h.lagrangians() {
        for l in h.lagrangians() {
            assert!(h.operator(m, l).unwrap().embed().unitarity_defect() <= 1e-10);
        }
    }
    for g in SpElement::enumerate(&v, 1000).unwrap().iter().step_by(5) {
        assert!(h.rho(g).unwrap().embed().unitarity_defect() <= 1e-10);
    }
}

#[test]
fn lagrangian_vectors_follow_the_action() {
    let h = CanonicalSpace::<3>::new(SympSpace::standard(1), 100).unwrap();
    for g in group() {
        let r = h.rho(&g).unwrap();
        for l in h.lagrangians() {
            let moved = h.lagrangian_vector(&g.act(l)).unwrap();
            let image = h.lagrangian_vector(l).unwrap().coords.apply(&r);
            let a = Matrix::from_vec(3, 1, image.values);
            let b = Matrix::from_vec(3, 1, moved.coords.values);
            assert!(weil_core::proportionality(&a, &b).is_some());
        }
    }
}
