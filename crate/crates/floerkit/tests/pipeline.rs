use floerkit::algebra::{FiniteGroup, SurfaceAutomorphism};
use floerkit::bordism::{cerf_apply, cerf_neighbors, fixtures, inverse_move, AttachingCircle, BordObject};
use floerkit::config::DEFAULT_BUDGET;
use floerkit::fieldfun::{closed_invariant, lens_presentations, presentation_oracle, PartialFunctorSpec, Presentation};
use floerkit::relcat::{geometric_compose, is_embedded};
use floerkit::repvar::{repvariety, RepContext};

#[test]
fn surface_varieties_count_conjugacy_classes_of_homs() {
    for g in FiniteGroup::test_groups() {
        for genus in 0..=2 {
            let v = repvariety(&g, BordObject::Surface(genus), DEFAULT_BUDGET).unwrap();
            let want = presentation_oracle(&g, &Presentation::surface(genus), DEFAULT_BUDGET).unwrap();
            assert_eq!(v.len(), want, "{} genus {genus}", g.name());
        }
    }
}

#[test]
fn invariant_is_unchanged_by_every_move() {
    let mut chains = fixtures::closed_fixtures();
    chains.push(("S3 rotated".into(), fixtures::s3_rotated()));
    for g in [FiniteGroup::cyclic(3), FiniteGroup::symmetric(3)] {
        let spec = PartialFunctorSpec::new(g.clone(), DEFAULT_BUDGET);
        for (name, c) in &chains {
            let (_, n) = closed_invariant(&spec, c).unwrap();
            for (m, next) in cerf_neighbors(c) {
                assert_eq!(closed_invariant(&spec, &next).unwrap().1, n, "{} {name} {}", g.name(), m.describe());
                let back = cerf_apply(&next, &inverse_move(c, &m).unwrap()).unwrap();
                assert!(back.surface_eq(c), "{name} {}", m.describe());
            }
        }
    }
}

#[test]
fn lens_spaces_match_cyclic_presentations() {
    for g in FiniteGroup::test_groups() {
        let spec = PartialFunctorSpec::new(g.clone(), DEFAULT_BUDGET);
        for (name, chain, pres) in lens_presentations() {
            let got = closed_invariant(&spec, &chain).unwrap().1;
            assert_eq!(got, presentation_oracle(&g, &pres, DEFAULT_BUDGET).unwrap(), "{} {name}", g.name());
        }
    }
}

#[test]
fn disjoint_handles_embed_over_abelian_groups_only() {
    let alpha = AttachingCircle::canonical(2);
    let beta = AttachingCircle::new(SurfaceAutomorphism::handle_swap(2, 1)).unwrap();
    for (g, expect) in [(FiniteGroup::cyclic(2), true), (FiniteGroup::cyclic(3), true), (FiniteGroup::symmetric(3), false)] {
        let ctx = RepContext::new(g.clone());
        let la = ctx.relation_of_attach2(&alpha).unwrap();
        let lb = ctx.relation_of_attach2(&beta).unwrap();
        let e = is_embedded(&la.transpose(), &lb).unwrap();
        assert_eq!(e.embedded, expect, "{}", g.name());
        let c = geometric_compose(&la.transpose(), &lb).unwrap();
        assert!(c.transpose().same_as(&geometric_compose(&lb.transpose(), &la).unwrap()));
    }
}
