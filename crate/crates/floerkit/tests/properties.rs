use std::collections::BTreeSet;
use std::sync::Arc;

use proptest::prelude::*;

use floerkit::algebra::{dehn_reduce, free_conjugate_test, surface_equal, FiniteGroup, SurfaceAutomorphism, Word};
use floerkit::bordism::AttachingCircle;
use floerkit::quilt::{cap, concentric, find_isomorphism, scramble, zigzag};
use floerkit::relcat::{generator_set, geometric_compose, rotation_bijection, CyclicChain};
use floerkit::repvar::{FiniteRelation, RepContext, RepVariety};

const BUDGET: u64 = 10_000_000;

fn set(name: &str, n: usize) -> Arc<RepVariety> {
    Arc::new(RepVariety::abstract_set(name, n))
}

/// Pairs as a bit mask over an n × m grid.
fn relation(a: &Arc<RepVariety>, b: &Arc<RepVariety>, mask: u64) -> FiniteRelation {
    let (n, m) = (a.len(), b.len());
    let pairs = (0..n * m).filter(|k| mask >> k & 1 == 1).map(|k| (k / m, k % m));
    FiniteRelation::new(a.clone(), b.clone(), pairs).unwrap()
}

fn naive_compose(l: &FiniteRelation, r: &FiniteRelation) -> BTreeSet<(u32, u32)> {
    let mut out = BTreeSet::new();
    for &(x, y) in l.pairs() {
        for &(y2, z) in r.pairs() {
            if y == y2 {
                out.insert((x, z));
            }
        }
    }
    out
}

fn library_word(genus: usize, picks: &[usize]) -> SurfaceAutomorphism {
    let lib = SurfaceAutomorphism::library(genus);
    picks.iter().fold(SurfaceAutomorphism::identity(genus), |acc, &k| acc.compose(&lib[k % lib.len()].1).unwrap())
}

fn word(genus: usize, letters: &[i32]) -> Word {
    let n = 2 * genus as i32;
    let letters = letters.iter().map(|&l| if l > 0 { (l - 1) % n + 1 } else { -((-l - 1) % n + 1) }).collect();
    Word::new(genus, letters).unwrap()
}

fn letters() -> impl Strategy<Value = Vec<i32>> {
    prop::collection::vec(prop_oneof![1..9i32, -8..0i32], 0..12)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn group_tables_are_associative_with_inverses(gi in 0usize..5, a in 0usize..24, b in 0usize..24, c in 0usize..24) {
        let g = &FiniteGroup::test_groups()[gi];
        let n = g.order();
        let (a, b, c) = ((a % n) as u32, (b % n) as u32, (c % n) as u32);
        prop_assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
        prop_assert_eq!(g.mul(a, g.inv(a)), 0);
        prop_assert_eq!(g.mul(g.inv(a), a), 0);
        prop_assert_eq!(g.class_of(g.conj(b, a)), g.class_of(a));
    }

    #[test]
    fn automorphism_composites_invert(genus in 1usize..3, picks in prop::collection::vec(0usize..16, 0..5)) {
        let phi = library_word(genus, &picks);
        prop_assert!(phi.validate().is_ok());
        prop_assert!(phi.compose(&phi.inverse()).unwrap().is_identity());
        prop_assert!(phi.inverse().compose(&phi).unwrap().is_identity());
        let r = Word::relator(genus);
        prop_assert!(free_conjugate_test(&r, &phi.apply(&r)));
    }

    #[test]
    fn automorphisms_act_on_words(genus in 1usize..3, picks in prop::collection::vec(0usize..16, 0..4), w in letters()) {
        let phi = library_word(genus, &picks);
        let w = word(genus, &w);
        prop_assert!(surface_equal(&phi.apply_inverse(&phi.apply(&w)), &w));
        let g = FiniteGroup::symmetric(3);
        let ctx = RepContext::new(g.clone());
        prop_assert!(ctx.verify_action(&phi).is_ok());
    }

    #[test]
    fn free_and_dehn_reduction_are_idempotent(genus in 1usize..3, w in letters()) {
        let w = word(genus, &w);
        let r = w.reduce_free();
        prop_assert!(r.is_reduced());
        prop_assert_eq!(r.reduce_free(), r.clone());
        prop_assert_eq!(w.concat(&w.inverse()).reduce_free(), Word::empty(genus));
        let d = dehn_reduce(&w);
        prop_assert!(d.len() <= r.len());
        prop_assert!(surface_equal(&d, &w));
        prop_assert!(surface_equal(&dehn_reduce(&d), &d));
    }

    #[test]
    fn composition_matches_the_naive_join(n in 1usize..5, m in 1usize..5, k in 1usize..5, p in any::<u64>(), q in any::<u64>()) {
        let (a, b, c) = (set("A", n), set("B", m), set("C", k));
        let (l, r) = (relation(&a, &b, p), relation(&b, &c, q));
        let got: BTreeSet<(u32, u32)> = geometric_compose(&l, &r).unwrap().pairs().iter().copied().collect();
        prop_assert_eq!(got, naive_compose(&l, &r));
    }

    #[test]
    fn composition_is_associative_and_transposes(n in 1usize..4, m in 1usize..4, k in 1usize..4, j in 1usize..4,
                                                   p in any::<u64>(), q in any::<u64>(), r in any::<u64>()) {
        let (a, b, c, d) = (set("A", n), set("B", m), set("C", k), set("D", j));
        let (x, y, z) = (relation(&a, &b, p), relation(&b, &c, q), relation(&c, &d, r));
        let left = geometric_compose(&geometric_compose(&x, &y).unwrap(), &z).unwrap();
        let right = geometric_compose(&x, &geometric_compose(&y, &z).unwrap()).unwrap();
        prop_assert!(left.same_as(&right));
        let t = geometric_compose(&x, &y).unwrap().transpose();
        prop_assert!(t.same_as(&geometric_compose(&y.transpose(), &x.transpose()).unwrap()));
        prop_assert!(geometric_compose(&FiniteRelation::diagonal(a.clone()), &x).unwrap().same_as(&x));
    }

    #[test]
    fn rotating_a_cycle_permutes_generators(n in 1usize..4, m in 1usize..4, k in 1usize..4,
                                              p in any::<u64>(), q in any::<u64>(), r in any::<u64>(), rot in 0usize..3) {
        let (a, b, c) = (set("A", n), set("B", m), set("C", k));
        let cycle = CyclicChain::new(vec![relation(&a, &b, p), relation(&b, &c, q), relation(&c, &a, r)]).unwrap();
        let gens = generator_set(&cycle, BUDGET).unwrap();
        let rotated = generator_set(&cycle.rotate(rot), BUDGET).unwrap();
        prop_assert_eq!(gens.len(), rotated.len());
        let bij = rotation_bijection(&cycle, rot, BUDGET).unwrap();
        prop_assert!(bij.verify());
        for t in &gens.tuples {
            let moved: Vec<u32> = (0..3).map(|i| t[(i + rot) % 3]).collect();
            prop_assert!(rotated.index_of(&moved).is_some());
        }
    }

    #[test]
    fn scrambled_diagrams_stay_isomorphic(seed in any::<u64>(), which in 0usize..3, n in 1usize..4, m in 1usize..4, p in any::<u64>()) {
        let y = relation(&set("A", n), &set("B", m), p);
        let q = match which {
            0 => cap(&y).unwrap(),
            1 => zigzag(&y).unwrap(),
            _ => concentric(&y, &y.transpose()).unwrap(),
        };
        let s = scramble(&q, seed);
        prop_assert!(s.validate().valid);
        prop_assert_eq!(s.surface.euler_characteristic(), q.surface.euler_characteristic());
        prop_assert!(find_isomorphism(&q, &s).is_some());
        prop_assert!(find_isomorphism(&s, &q).is_some());
        let (eq, es) = (q.evaluate_all(BUDGET).unwrap(), s.evaluate_all(BUDGET).unwrap());
        let sizes = |e: &floerkit::quilt::Evaluation| e.map.values().map(BTreeSet::len).collect::<BTreeSet<_>>();
        prop_assert_eq!(eq.map.len(), es.map.len());
        prop_assert_eq!(sizes(&eq), sizes(&es));
    }
}

#[test]
fn attach_relations_agree_with_the_direct_definition() {
    for g in FiniteGroup::test_groups() {
        let ctx = RepContext::new(g);
        for genus in 1..=2 {
            for (_, psi) in SurfaceAutomorphism::library(genus) {
                let circle = AttachingCircle::new(psi).unwrap();
                let a = ctx.relation_of_attach2(&circle).unwrap();
                let b = ctx.relation_of_attach2_direct(&circle).unwrap();
                assert!(a.same_as(&b), "{} genus {genus}", ctx.group().name());
            }
        }
    }
}
