use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use weil_core::quantization::isotropic_stabilizer_generators;
use weil_core::symplectic::{oriented_lagrangian_count, symplectic_group_order, unit_vec};
use weil_core::{
    gauss_sum, in_general_position, proportionality, psi, sigma, CanonicalSpace, CartesianIso,
    CorrespondenceQuantizer, CycMatrix, CycNumber, DualityPairing, FlatSection, Fp, HElement,
    IntertwinerSystem, Matrix, Normalization, Oriented, ReductionIso, SpElement, Subspace, SympSpace,
};

use crate::config::RunConfig;
use crate::error::Result;
use crate::report::{CheckCount, NormalizationReport, Scope, SuiteResult, Tally, VariantRecord};

const GROUP_LIMIT: u128 = 2_500;
const UNITARITY_TOLERANCE: f64 = 1e-10;

/// Everything the suites share for one `(p, n)`.
pub struct Context<const P: u32> {
    pub config: RunConfig,
    pub canonical: CanonicalSpace<P>,
    group: Option<Vec<SpElement<P>>>,
}

impl<const P: u32> Context<P> {
    pub fn new(config: RunConfig) -> Result<Self> {
        let space = SympSpace::<P>::standard(config.n);
        let canonical = CanonicalSpace::new(space.clone(), config.cap)?;
        let group = if symplectic_group_order(P, config.n) <= GROUP_LIMIT {
            Some(SpElement::enumerate(&space, GROUP_LIMIT)?)
        } else {
            None
        };
        Ok(Self { config, canonical, group })
    }

    pub fn space(&self) -> &SympSpace<P> {
        self.canonical.space()
    }

    pub fn system(&self) -> &IntertwinerSystem<P> {
        self.canonical.system()
    }

    pub fn lags(&self) -> &[Oriented<P>] {
        self.canonical.lagrangians()
    }

    pub fn group(&self) -> Option<&[SpElement<P>]> {
        self.group.as_deref()
    }

    fn rng(&self, salt: u64) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed);
        rng.set_stream(salt);
        rng
    }

    fn sampled(&self, count: u64) -> Scope {
        Scope::Sampled { count, seed: self.config.seed }
    }

    fn random_element(&self, rng: &mut ChaCha8Rng) -> SpElement<P> {
        match &self.group {
            Some(g) => g.choose(rng).expect("nonempty group").clone(),
            None => SpElement::random(self.space(), rng, 4 * self.space().dim()),
        }
    }

    /// The whole group when it has at most `limit` elements, else `fallback`
    /// seeded samples.
    pub fn elements(&self, limit: usize, fallback: u64, salt: u64) -> (Scope, Vec<SpElement<P>>) {
        if let Some(g) = &self.group {
            if g.len() <= limit {
                return (Scope::Exhaustive, g.clone());
            }
        }
        let mut rng = self.rng(salt);
        let count = fallback.min(self.config.sample_size());
        (self.sampled(count), (0..count).map(|_| self.random_element(&mut rng)).collect())
    }

    /// All ordered pairs of oriented Lagrangians when `#pairs · weight` fits
    /// in `budget`, else seeded samples.
    pub fn pairs(&self, weight: u128, budget: u128, fallback: u64, salt: u64) -> (Scope, Vec<(usize, usize)>) {
        let l = self.lags().len();
        if (l * l) as u128 * weight.max(1) <= budget {
            let all = (0..l).flat_map(|i| (0..l).map(move |j| (i, j))).collect();
            return (Scope::Exhaustive, all);
        }
        let mut rng = self.rng(salt);
        let count = fallback.min(self.config.sample_size());
        let picks = (0..count).map(|_| (rng.gen_range(0..l), rng.gen_range(0..l))).collect();
        (self.sampled(count), picks)
    }

    pub fn triple_scope(&self) -> Scope {
        let total = (self.lags().len() as u128).pow(3);
        let within_sample = self.config.sample.is_none_or(|s| total <= s as u128);
        if total <= self.config.exhaustive_limit && within_sample {
            Scope::Exhaustive
        } else {
            self.sampled(self.config.sample_size())
        }
    }

    fn triples(&self, scope: Scope, salt: u64) -> Box<dyn Iterator<Item = (usize, usize, usize)>> {
        let l = self.lags().len();
        match scope {
            Scope::Sampled { count, .. } => {
                let mut rng = self.rng(salt);
                Box::new((0..count).map(move |_| (rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l))))
            }
            _ => Box::new((0..l).flat_map(move |i| (0..l).flat_map(move |j| (0..l).map(move |k| (i, j, k))))),
        }
    }
}

pub fn describe<const P: u32>(o: &Oriented<P>) -> String {
    format!("{:?}x{}", o.subspace.to_u32_rows(), o.scale)
}

fn describe_g<const P: u32>(g: &SpElement<P>) -> String {
    format!("{:?}", g.matrix().to_rows().iter().map(|r| r.iter().map(|x| x.value()).collect::<Vec<_>>()).collect::<Vec<_>>())
}

fn distinct_scalars<const P: u32>(scalars: &BTreeSet<String>) -> String {
    let mut parts: Vec<&str> = scalars.iter().map(String::as_str).collect();
    if parts.len() > 8 {
        parts.truncate(8);
        parts.push("...");
    }
    format!("{} distinct scalars: {}", scalars.len(), parts.join(" | "))
}

/// `G₁ · conj(G₁) = p`, `G₁² = (−1/p)·p`, and the floating sign pattern.
pub fn gauss_sum_suite<const P: u32>() -> SuiteResult {
    let mut t = Tally::new(&format!("gauss_sum_p{P}"), Scope::Exhaustive);
    let g = gauss_sum::<P>();
    let p = CycNumber::<P>::from_integer(P as i64);
    t.check(&g * &g.conj() == p, || format!("G1*conj(G1) = {}", &g * &g.conj()));
    let minus_one = Fp::<P>::new(-1).legendre() as i64;
    t.check(&g * &g == CycNumber::from_integer(minus_one * P as i64), || format!("G1^2 = {}", &g * &g));
    let direct: num_complex::Complex64 = Fp::<P>::elements()
        .map(|z| psi(Fp::half() * z * z).to_complex())
        .sum();
    let approx = g.embed().value();
    t.check((approx - direct).norm() <= 1e-10, || format!("embedding {approx} differs from direct sum {direct}"));
    let root = (P as f64).sqrt();
    let candidates = [
        ("+sqrt(p)", num_complex::Complex64::new(root, 0.0)),
        ("-sqrt(p)", num_complex::Complex64::new(-root, 0.0)),
        ("+i*sqrt(p)", num_complex::Complex64::new(0.0, root)),
        ("-i*sqrt(p)", num_complex::Complex64::new(0.0, -root)),
    ];
    let hit = candidates.iter().find(|(_, c)| (approx - c).norm() <= 1e-10);
    if t.check(hit.is_some(), || format!("G1 ~ {approx} matches none of +-sqrt(p), +-i*sqrt(p)")) {
        t.note(format!("G1 = {} ~ {}", g, hit.expect("checked").0));
    }
    for s in Fp::<P>::units() {
        let expected = CycNumber::from_integer(s.legendre() as i64);
        t.check(sigma(s) == expected, || format!("sigma({s}) = {}", sigma(s)));
    }
    t.finish()
}

/// π is a representation, the center acts by ψ, and the commutant of the
/// base model is one-dimensional.
pub fn heisenberg_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let v = ctx.space();
    let model = ctx.canonical.base_model()?;
    let order = v.h_order();
    let total = (order * order) as u128;
    let mut t = Tally::new("heisenberg", Scope::Exhaustive);
    let cached: Option<Vec<CycMatrix<P>>> = (order <= 500).then(|| v.h_elements().map(|h| model.pi_matrix(&h)).collect());
    let pi = |k: usize| -> CycMatrix<P> {
        match &cached {
            Some(c) => c[k].clone(),
            None => model.pi_matrix(&v.h_from_index(k)),
        }
    };
    let pairs: Vec<(usize, usize)> = if total <= 200_000 {
        (0..order).flat_map(|a| (0..order).map(move |b| (a, b))).collect()
    } else {
        let mut rng = ctx.rng(1);
        let count = ctx.config.sample_size().min(20_000);
        t.set_scope(ctx.sampled(count));
        (0..count).map(|_| (rng.gen_range(0..order), rng.gen_range(0..order))).collect()
    };
    for (a, b) in pairs {
        let ha = v.h_from_index(a);
        let hb = v.h_from_index(b);
        let ab = v.h_index(&v.h_mul_unchecked(&ha, &hb));
        t.check(&pi(a) * &pi(b) == pi(ab), || format!("pi({ha:?}) pi({hb:?}) != pi(product)"));
    }
    let id = Matrix::identity(model.dim());
    for z in Fp::<P>::elements() {
        let c = HElement::central(v.dim(), z);
        t.check(model.pi_matrix(&c) == id.scale(&psi(z)), || format!("center element z={z} does not act by psi"));
    }
    let d = model.dim();
    if d * d <= 200 {
        let dim = model.commutant_dimension();
        t.check(dim == 1, || format!("commutant dimension {dim}"));
        t.note(format!("commutant dimension {dim}"));
    } else {
        t.note("commutant dimension not computed at this size");
    }
    Ok(t.finish())
}

fn multiplicativity_count<const P: u32>(
    ctx: &Context<P>,
    system: &IntertwinerSystem<P>,
    scope: Scope,
    stop_early: bool,
    t: &mut Tally,
) {
    let lags = ctx.lags();
    for (i, j, k) in ctx.triples(scope, 2) {
        let (nn, mm, ll) = (&lags[i], &lags[j], &lags[k]);
        let r = (|| -> weil_core::Result<bool> {
            let left = system.closed_operator(nn, ll)?;
            let composed = system.closed_operator(nn, mm)?.as_ref() * system.closed_operator(mm, ll)?.as_ref();
            Ok(*left == composed)
        })();
        let ok = r.unwrap_or(false);
        t.check(ok, || format!("F({},{}) != F({},{}) F({},{})", describe(nn), describe(ll), describe(nn), describe(mm), describe(mm), describe(ll)));
        if stop_early && !ok {
            return;
        }
    }
}

pub fn multiplicativity_suite<const P: u32>(ctx: &Context<P>) -> SuiteResult {
    let scope = ctx.triple_scope();
    let mut t = Tally::new("multiplicativity", scope);
    multiplicativity_count(ctx, ctx.system(), scope, false, &mut t);
    t.finish()
}

fn ansatz_count<const P: u32>(ctx: &Context<P>, system: &IntertwinerSystem<P>, stop_early: bool, t: &mut Tally) {
    let lags = ctx.lags();
    let (scope, pairs) = ctx.pairs(1, 100_000, 2_000, 3);
    t.set_scope(scope);
    for (i, j) in pairs {
        let (m, l) = (&lags[i], &lags[j]);
        if !in_general_position(&m.subspace, &l.subspace) {
            continue;
        }
        let ok = match (system.closed_operator(m, l), system.ansatz_operator(m, l)) {
            (Ok(a), Ok(b)) => *a == b,
            _ => false,
        };
        t.check(ok, || format!("closed != ansatz at ({}, {})", describe(m), describe(l)));
        if stop_early && !ok {
            return;
        }
    }
}

pub fn ansatz_suite<const P: u32>(ctx: &Context<P>) -> SuiteResult {
    let mut t = Tally::new("ansatz_consistency", Scope::Exhaustive);
    ansatz_count(ctx, ctx.system(), false, &mut t);
    t.finish()
}

fn rescalings<const P: u32>() -> Vec<Fp<P>> {
    let mut out = Vec::new();
    if let Some(r) = Fp::<P>::units().find(|t| t.legendre() == 1 && t.value() != 1) {
        out.push(r);
    }
    if let Some(n) = Fp::<P>::units().find(|t| t.legendre() == -1) {
        out.push(n);
    }
    out
}

fn identity_count<const P: u32>(ctx: &Context<P>, system: &IntertwinerSystem<P>, stop_early: bool, t: &mut Tally) {
    let lags = ctx.lags();
    for l in lags {
        let ok = system.closed_operator(l, l).map(|f| f.is_identity()).unwrap_or(false);
        t.check(ok, || format!("F({0},{0}) is not the identity", describe(l)));
        if stop_early && !ok {
            return;
        }
    }
    let (scope, pairs) = ctx.pairs(1, 10_000, 1_000, 4);
    t.set_scope(scope);
    let units = rescalings::<P>();
    for (i, j) in pairs {
        let (m, l) = (&lags[i], &lags[j]);
        let Ok(base) = system.closed_operator(m, l) else {
            t.check(false, || format!("F({}, {}) failed", describe(m), describe(l)));
            continue;
        };
        for &s in &units {
            let expected = base.scale(&sigma(s));
            let left = m.rescale(s).and_then(|m2| system.closed_operator(&m2, l));
            let right = l.rescale(s).and_then(|l2| system.closed_operator(m, &l2));
            let ok = matches!(left, Ok(ref f) if **f == expected) && matches!(right, Ok(ref f) if **f == expected);
            t.check(ok, || format!("rescaling by {s} at ({}, {}) is not sigma-covariant", describe(m), describe(l)));
            if stop_early && !ok {
                return;
            }
        }
    }
}

pub fn identity_suite<const P: u32>(ctx: &Context<P>) -> SuiteResult {
    let mut t = Tally::new("identity_and_orientation", Scope::Exhaustive);
    identity_count(ctx, ctx.system(), false, &mut t);
    t.finish()
}

pub fn intertwining_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let v = ctx.space();
    let lags = ctx.lags();
    let (scope, pairs) = ctx.pairs(1, 10_000, 1_000, 5);
    let all_h = (pairs.len() * v.h_order()) as u128 <= 200_000;
    let hs: Vec<HElement<P>> = if all_h { v.h_elements().collect() } else { v.h_generators() };
    let mut t = Tally::new("intertwining", if all_h { scope } else { Scope::Generators });
    if !all_h {
        t.note(format!("pairs {scope}, Heisenberg generators only"));
    }
    for (i, j) in pairs {
        let (m, l) = (&lags[i], &lags[j]);
        let f = ctx.canonical.operator(m, l)?;
        let source = ctx.system().model(&l.subspace)?;
        let target = ctx.system().model(&m.subspace)?;
        for h in &hs {
            t.check(f.as_ref() * &source.pi_matrix(h) == &target.pi_matrix(h) * f.as_ref(), || {
                format!("F({}, {}) does not intertwine at {h:?}", describe(m), describe(l))
            });
        }
    }
    Ok(t.finish())
}

pub fn unitarity_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let lags = ctx.lags();
    let (scope, pairs) = ctx.pairs(1, 10_000, 1_000, 6);
    let (gscope, elements) = ctx.elements(1_000, 200, 7);
    let both = if scope == Scope::Exhaustive { gscope } else { scope };
    let mut t = Tally::new("unitarity", both);
    let mut worst: f64 = 0.0;
    for (i, j) in pairs {
        let d = ctx.canonical.operator(&lags[i], &lags[j])?.embed().unitarity_defect();
        worst = worst.max(d);
        t.check(d <= UNITARITY_TOLERANCE, || format!("F({}, {}) defect {d:e}", describe(&lags[i]), describe(&lags[j])));
    }
    for g in &elements {
        let d = ctx.canonical.rho(g)?.embed().unitarity_defect();
        worst = worst.max(d);
        t.check(d <= UNITARITY_TOLERANCE, || format!("rho({}) defect {d:e}", describe_g(g)));
    }
    t.note(format!("max defect {worst:.3e}"));
    Ok(t.finish())
}

pub fn kernel_coherence_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let v = ctx.space();
    let sys = ctx.system();
    let lags = ctx.lags();
    let (scope, pairs) = ctx.pairs((v.h_order() * ctx.canonical.dim()) as u128, 400_000, 200, 8);
    let mut t = Tally::new("kernel_coherence", scope);
    let auxiliaries = scope == Scope::Exhaustive && lags.len() <= 24;
    for &(i, j) in &pairs {
        let (m, l) = (&lags[i], &lags[j]);
        let Some(k) = t.check_result(sys.canonical_kernel(m, l), || format!("kernel ({}, {})", describe(m), describe(l))) else {
            continue;
        };
        t.check(k.is_equivariant(v), || format!("kernel ({}, {}) is not bi-invariant", describe(m), describe(l)));
        let op = sys.operator_of_kernel(&k)?;
        t.check(op == *sys.closed_operator(m, l)?, || format!("I[K({}, {})] != F", describe(m), describe(l)));
        if auxiliaries {
            for aux in lags {
                if in_general_position(&aux.subspace, &m.subspace) && in_general_position(&aux.subspace, &l.subspace) {
                    let via = sys.canonical_kernel_via(m, l, aux)?;
                    t.check(via == k, || format!("kernel ({}, {}) depends on auxiliary {}", describe(m), describe(l), describe(aux)));
                }
            }
        }
    }
    if !auxiliaries {
        t.note("auxiliary independence checked only on exhaustive runs with at most 24 oriented Lagrangians");
    }
    let l = lags.len();
    let mut rng = ctx.rng(9);
    let triples: Vec<(usize, usize, usize)> = if scope == Scope::Exhaustive && l <= 8 {
        (0..l).flat_map(|a| (0..l).flat_map(move |b| (0..l).map(move |c| (a, b, c)))).collect()
    } else {
        (0..50).map(|_| (rng.gen_range(0..l), rng.gen_range(0..l), rng.gen_range(0..l))).collect()
    };
    for (a, b, c) in triples {
        let k1 = sys.canonical_kernel(&lags[a], &lags[b])?;
        let k2 = sys.canonical_kernel(&lags[b], &lags[c])?;
        let conv = sys.convolve(&k1, &k2)?;
        let composed = sys.closed_operator(&lags[a], &lags[b])?.as_ref() * sys.closed_operator(&lags[b], &lags[c])?.as_ref();
        t.check(sys.operator_of_kernel(&conv)? == composed, || {
            format!("convolution differs from composition at ({}, {}, {})", describe(&lags[a]), describe(&lags[b]), describe(&lags[c]))
        });
    }
    Ok(t.finish())
}

/// Dimension of the space of bi-invariant kernels and rank of the kernel
/// transform on it.
pub fn kernel_space_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let v = ctx.space();
    let sys = ctx.system();
    let lags = ctx.lags();
    let (scope, pairs) = ctx.pairs(v.h_order() as u128, 200_000, 100, 10);
    let mut t = Tally::new("kernel_space", scope);
    let mut dims = BTreeSet::new();
    for (i, j) in pairs {
        let (m, l) = (&lags[i], &lags[j]);
        let dim = sys.kernel_space(m, l).len();
        let rank = sys.transform_rank(m, l)?;
        dims.insert(dim);
        t.check(dim == 1 && rank == dim, || format!("({}, {}): kernel space dim {dim}, transform rank {rank}", describe(m), describe(l)));
    }
    t.note(format!("kernel space dimensions seen: {dims:?}; the transform is injective on every checked pair"));
    Ok(t.finish())
}

pub fn weil_homomorphism_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let h = &ctx.canonical;
    let v = ctx.space();
    let mut t = Tally::new("weil_homomorphism", Scope::Exhaustive);
    t.check(h.rho(&SpElement::identity(v))?.is_identity(), || "rho(Id) is not the identity".into());
    match ctx.group() {
        Some(g) if g.len() * g.len() <= 20_000 => {
            let rho: Vec<CycMatrix<P>> = g.iter().map(|x| h.rho(x)).collect::<weil_core::Result<_>>()?;
            for (a, ra) in g.iter().zip(&rho) {
                for (b, rb) in g.iter().zip(&rho) {
                    t.check(ra * rb == h.rho(&a.compose(b))?, || format!("rho({}) rho({}) != rho(product)", describe_g(a), describe_g(b)));
                }
            }
        }
        _ => {
            let mut rng = ctx.rng(11);
            let count = ctx.config.sample_size().min(500);
            t.set_scope(ctx.sampled(count));
            for _ in 0..count {
                let a = ctx.random_element(&mut rng);
                let b = ctx.random_element(&mut rng);
                t.check(&h.rho(&a)? * &h.rho(&b)? == h.rho(&a.compose(&b))?, || {
                    format!("rho({}) rho({}) != rho(product)", describe_g(&a), describe_g(&b))
                });
            }
        }
    }
    let j = standard_j(v);
    let moved = j.act(h.base());
    let cross = h.operator(h.base(), &moved)?.as_ref() * &h.translation(&j, h.base())?;
    t.check(h.rho(&j)? == cross, || "rho(J) differs from F(L0, J L0) T_J".into());
    Ok(t.finish())
}

/// `J = [[0, Id], [−Id, 0]]` in the coordinates of [`SympSpace::standard`].
pub fn standard_j<const P: u32>(v: &SympSpace<P>) -> SpElement<P> {
    let n = v.n();
    let m = Matrix::from_fn(2 * n, 2 * n, |r, c| {
        if c == r + n {
            Fp::new(1)
        } else if r == c + n {
            Fp::new(-1)
        } else {
            Fp::new(0)
        }
    });
    SpElement::new(v, m).expect("J is symplectic")
}

pub fn heisenberg_compatibility_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let h = &ctx.canonical;
    let v = ctx.space();
    let (mut scope, elements) = ctx.elements(200, 50, 12);
    let all_h = scope == Scope::Exhaustive && elements.len() * v.h_order() <= 20_000;
    let hs: Vec<HElement<P>> = if all_h { v.h_elements().collect() } else { v.h_generators() };
    if !all_h && scope == Scope::Exhaustive {
        scope = Scope::Generators;
    }
    let mut t = Tally::new("heisenberg_compatibility", scope);
    for g in &elements {
        let r = h.rho(g)?;
        let r_inv = h.rho(&g.inverse())?;
        t.check((&r * &r_inv).is_identity(), || format!("rho({}) rho(g^-1) != Id", describe_g(g)));
        for x in &hs {
            t.check(&(&r * &h.pi(x)?) * &r_inv == h.pi(&v.h_act(g, x))?, || format!("conjugation by rho({}) at {x:?}", describe_g(g)));
        }
    }
    Ok(t.finish())
}

pub fn total_fourier_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let h = &ctx.canonical;
    let d = h.dim();
    let l = ctx.lags().len();
    if l * d <= 150 {
        let mut t = Tally::new("total_fourier", Scope::Exhaustive);
        let f = h.total_fourier()?;
        t.check(&f * &f == f, || "total Fourier transform is not idempotent".into());
        let rank = f.rank();
        t.check(rank == d, || format!("rank {rank}, expected {d}"));
        t.note(format!("{}x{} idempotent of rank {rank}", f.rows(), f.cols()));
        let (_, elements) = ctx.elements(150, 20, 13);
        for g in &elements {
            let a = h.geometric_action(g)?;
            t.check(&a * &f == &f * &a, || format!("F does not commute with the action of {}", describe_g(g)));
        }
        return Ok(t.finish());
    }
    // F = (1/#Lag) A·B with A the column of blocks F(M, L0) and B the row of
    // blocks F(L0, L); both have rank dim, so F does.
    let mut t = Tally::new("total_fourier", Scope::Factored);
    let base = h.base();
    let mut a = Matrix::empty(d);
    let mut b = Matrix::empty(d);
    for m in ctx.lags() {
        a = a.vstack(h.operator(m, base)?.as_ref());
        b = b.vstack(&h.operator(base, m)?.transpose());
    }
    let (ra, rb) = (a.rank(), b.rank());
    t.check(ra == d, || format!("rank of the block column {ra}, expected {d}"));
    t.check(rb == d, || format!("rank of the block row {rb}, expected {d}"));
    let mut rng = ctx.rng(14);
    for _ in 0..200 {
        let (i, j) = (rng.gen_range(0..l), rng.gen_range(0..l));
        let (m, n) = (&ctx.lags()[i], &ctx.lags()[j]);
        t.check(*h.operator(m, n)? == h.operator(m, base)?.as_ref() * h.operator(base, n)?.as_ref(), || {
            format!("block ({}, {}) does not factor through the base", describe(m), describe(n))
        });
    }
    t.note(format!("rank {d} via the factorization through the base model"));
    Ok(t.finish())
}

fn random_section<const P: u32>(rng: &mut impl Rng, d: usize) -> FlatSection<P> {
    FlatSection::from_coords(
        (0..d)
            .map(|_| CycNumber::zeta_pow(rng.gen_range(0..P as i64)) * CycNumber::from_integer(rng.gen_range(-3..4)))
            .collect(),
    )
}

/// Present only when `V × V` fits under the enumeration cap.
pub fn cartesian_suite<const P: u32>(ctx: &Context<P>) -> Result<Option<SuiteResult>> {
    let n = ctx.config.n;
    if oriented_lagrangian_count(P, 2 * n) > ctx.config.cap {
        return Ok(None);
    }
    let v = ctx.space();
    let h = &ctx.canonical;
    let prod = CanonicalSpace::new(v.product(v), ctx.config.cap)?;
    let alpha = CartesianIso::new(h, h, &prod)?;
    let count = 100.min(ctx.config.sample_size());
    let mut t = Tally::new("cartesian_product", ctx.sampled(count));
    let mut rng = ctx.rng(15);
    for _ in 0..count {
        let g1 = ctx.random_element(&mut rng);
        let g2 = ctx.random_element(&mut rng);
        let lhs = alpha.matrix() * &prod.rho(&g1.direct_sum(&g2))?;
        let rhs = &h.rho(&g1)?.kron(&h.rho(&g2)?) * alpha.matrix();
        t.check(lhs == rhs, || format!("alpha fails to intertwine ({}, {})", describe_g(&g1), describe_g(&g2)));
    }
    Ok(Some(t.finish()))
}

pub fn duality_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let h = &ctx.canonical;
    let bar = CanonicalSpace::new(ctx.space().dual(), ctx.config.cap)?;
    let pairing = DualityPairing::new(&bar, h)?;
    let gram = pairing.gram()?;
    let count = 100.min(ctx.config.sample_size());
    let mut t = Tally::new("duality", ctx.sampled(count));
    let rank = gram.rank();
    t.check(rank == h.dim(), || format!("Gram rank {rank}, expected {}", h.dim()));
    t.check(gram.is_identity(), || "Gram matrix in base coordinates is not the identity".into());
    let mut rng = ctx.rng(16);
    for _ in 0..count {
        let a = random_section::<P>(&mut rng, h.dim());
        let b = random_section::<P>(&mut rng, h.dim());
        let m = h.lagrangians().choose(&mut rng).expect("nonempty");
        t.check(pairing.pair_at(m, &a, &b)? == pairing.pair(&a, &b)?, || {
            format!("pairing evaluated at {} differs from the base", describe(m))
        });
    }
    Ok(t.finish())
}

pub fn reduction_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let n = ctx.config.n;
    let v = ctx.space();
    let h = &ctx.canonical;
    let w = CanonicalSpace::new(SympSpace::standard(n - 1), ctx.config.cap)?;
    let line = Oriented::from_frame(2 * n, &[unit_vec(2 * n, 0)])?;
    let iso = ReductionIso::new(h, &line, &w)?;
    let mut t = Tally::new("reduction", Scope::Generators);
    let expected = (P as usize).pow(n as u32 - 1);
    let dim = iso.invariant_basis().len();
    t.check(dim == expected, || format!("invariant dimension {dim}, expected {expected}"));
    let rank = iso.rank_on_invariants();
    t.check(rank == expected, || format!("rank on invariants {rank}, expected {expected}"));
    t.note(format!("I = <e1>: invariants of dimension {dim}, reduction map of rank {rank}"));
    let gens = isotropic_stabilizer_generators(iso.reduction());
    let mut rng = ctx.rng(17);
    let mut elements = gens.clone();
    for _ in 0..20 {
        let mut g = SpElement::identity(v);
        for _ in 0..5 {
            g = g.compose(gens.choose(&mut rng).expect("nonempty"));
        }
        elements.push(g);
    }
    for g in &elements {
        t.check(iso.is_equivariant(g)?, || format!("reduction is not equivariant under {}", describe_g(g)));
    }
    let zero = Oriented::new(Subspace::zero(2 * n), Fp::new(1))?;
    t.check(ReductionIso::new(h, &zero, h)?.matrix().is_identity(), || "reduction along 0 is not the identity".into());
    Ok(t.finish())
}

/// One entry of the correspondence table: `A_{Γ_g} = λ ρ(g)`.
#[derive(Clone, Debug, serde::Serialize)]
pub struct ScalarRecord<const P: u32> {
    pub g: Vec<Vec<u32>>,
    pub scalar: Option<CycNumber<P>>,
    pub exact: String,
    pub re: f64,
    pub im: f64,
}

pub fn correspondence_table<const P: u32>(ctx: &Context<P>, elements: &[SpElement<P>]) -> Result<Vec<ScalarRecord<P>>> {
    let h = &ctx.canonical;
    let q = CorrespondenceQuantizer::new(h, ctx.config.cap)?;
    let mut out = Vec::new();
    for g in elements {
        let a = q.quantize(&ctx.space().graph_lagrangian(g)?)?;
        let scalar = proportionality(&a, &h.rho(g)?);
        let approx = scalar.as_ref().map(|s| s.embed().value()).unwrap_or_default();
        out.push(ScalarRecord {
            g: g.matrix().to_rows().iter().map(|r| r.iter().map(|x| x.value()).collect()).collect(),
            exact: scalar.as_ref().map(|s| s.to_string()).unwrap_or_else(|| "none".into()),
            scalar,
            re: approx.re,
            im: approx.im,
        });
    }
    Ok(out)
}

/// Present only when `V̄ × V` fits under the enumeration cap.
pub fn correspondence_suite<const P: u32>(ctx: &Context<P>) -> Result<Option<SuiteResult>> {
    if oriented_lagrangian_count(P, 2 * ctx.config.n) > ctx.config.cap {
        return Ok(None);
    }
    let (scope, elements) = ctx.elements(400, 30, 18);
    let mut t = Tally::new("correspondences", scope);
    let table = correspondence_table(ctx, &elements)?;
    let mut scalars = BTreeSet::new();
    for (g, rec) in elements.iter().zip(&table) {
        if t.check(rec.scalar.is_some(), || format!("A(graph of {}) is not proportional to rho(g)", describe_g(g))) {
            scalars.insert(rec.exact.clone());
        }
    }
    t.note(distinct_scalars::<P>(&scalars));
    Ok(Some(t.finish()))
}

pub fn lagrangian_vector_suite<const P: u32>(ctx: &Context<P>) -> Result<SuiteResult> {
    let h = &ctx.canonical;
    let lags = ctx.lags();
    let limit = 20_000 / lags.len().max(1);
    let (scope, elements) = ctx.elements(limit, 20, 19);
    let mut t = Tally::new("lagrangian_vectors", scope);
    let vectors: Vec<FlatSection<P>> = lags.iter().map(|l| h.lagrangian_vector(l)).collect::<weil_core::Result<_>>()?;
    let d = h.dim();
    let mut scalars = BTreeSet::new();
    for g in &elements {
        let r = h.rho(g)?;
        for (l, vl) in lags.iter().zip(&vectors) {
            let moved = h.lagrangian_vector(&g.act(l))?;
            let image = Matrix::from_vec(d, 1, vl.coords.apply(&r).values);
            let target = Matrix::from_vec(d, 1, moved.coords.values);
            match proportionality(&image, &target) {
                Some(s) => {
                    t.check(true, String::new);
                    scalars.insert(s.to_string());
                }
                None => {
                    t.check(false, || format!("rho({}) v({}) is not proportional to v(gL)", describe_g(g), describe(l)));
                }
            }
        }
    }
    t.note(distinct_scalars::<P>(&scalars));
    Ok(t.finish())
}

fn count_of(t: Tally) -> CheckCount {
    let r = t.finish();
    CheckCount { checked: r.checked, passed: r.passed }
}

/// Runs the identity, ansatz and multiplicativity checks for every constant
/// variant, stopping each check at its first failure.
pub fn normalization_report<const P: u32>(ctx: &Context<P>) -> NormalizationReport {
    let scope = ctx.triple_scope();
    let mut variants = Vec::new();
    for variant in Normalization::variants() {
        let owned;
        let system = if variant == ctx.system().normalization() {
            ctx.system()
        } else {
            owned = IntertwinerSystem::with_normalization(ctx.space().clone(), variant);
            &owned
        };
        let mut identity = Tally::new("identity", Scope::Exhaustive);
        identity_count(ctx, system, true, &mut identity);
        let mut ansatz = Tally::new("ansatz", Scope::Exhaustive);
        ansatz_count(ctx, system, true, &mut ansatz);
        let mut mult = Tally::new("multiplicativity", scope);
        multiplicativity_count(ctx, system, scope, true, &mut mult);
        let (identity, ansatz, multiplicativity) = (count_of(identity), count_of(ansatz), count_of(mult));
        let passed = identity.passed && ansatz.passed && multiplicativity.passed;
        variants.push(VariantRecord { variant: variant.to_string(), identity, ansatz, multiplicativity, passed });
    }
    NormalizationReport {
        selected: Normalization::CANONICAL.to_string(),
        scope: scope.to_string(),
        passing: variants.iter().filter(|v| v.passed).map(|v| v.variant.clone()).collect(),
        variants,
    }
}

/// Every suite that applies to the configured `(p, n)`.
pub fn all_suites<const P: u32>(ctx: &Context<P>) -> Result<Vec<SuiteResult>> {
    let mut out = vec![
        gauss_sum_suite::<P>(),
        heisenberg_suite(ctx)?,
        multiplicativity_suite(ctx),
        ansatz_suite(ctx),
        identity_suite(ctx),
        intertwining_suite(ctx)?,
        unitarity_suite(ctx)?,
        kernel_coherence_suite(ctx)?,
        kernel_space_suite(ctx)?,
        weil_homomorphism_suite(ctx)?,
        heisenberg_compatibility_suite(ctx)?,
        total_fourier_suite(ctx)?,
        duality_suite(ctx)?,
        reduction_suite(ctx)?,
        lagrangian_vector_suite(ctx)?,
    ];
    out.extend(cartesian_suite(ctx)?);
    out.extend(correspondence_suite(ctx)?);
    Ok(out)
}
