use floerkit::algebra::{FiniteGroup, SurfaceAutomorphism};
use floerkit::bordism::{AttachingCircle, BordObject, CobordismChain, SimpleCobordism};
use floerkit::cat::{quotient_by_2isos, yoneda};
use floerkit::config::DEFAULT_BUDGET;
use floerkit::fieldfun::{functor_eval, PartialFunctorSpec};
use floerkit::relcat::{geometric_compose, is_embedded, relation_bicategory};
use floerkit::repvar::FiniteRelation;

struct Setup {
    spec: PartialFunctorSpec,
    objects: Vec<std::sync::Arc<floerkit::repvar::RepVariety>>,
    generators: Vec<FiniteRelation>,
}

fn setup() -> Setup {
    let spec = PartialFunctorSpec::new(FiniteGroup::cyclic(3), DEFAULT_BUDGET);
    let objects = [BordObject::Empty, BordObject::Surface(0), BordObject::Surface(1)]
        .map(|o| spec.object(o).unwrap())
        .to_vec();
    let simple = [
        SimpleCobordism::Cap0,
        SimpleCobordism::Attach1(AttachingCircle::canonical(1)),
        SimpleCobordism::Cyl(SurfaceAutomorphism::s_move(1, 1)),
        SimpleCobordism::Cyl(SurfaceAutomorphism::twist_a(1, 1)),
    ];
    let generators = simple.iter().map(|s| spec.simple(s).unwrap()).collect();
    Setup { spec, objects, generators }
}

fn index_of(cells: &[FiniteRelation], r: &FiniteRelation) -> usize {
    cells.iter().position(|c| c.same_as(r)).expect("relation lies in the closure")
}

#[test]
fn relation_bicategory_is_valid() {
    let s = setup();
    let (b, _) = relation_bicategory(&s.objects, &s.generators, 200).unwrap();
    b.validate().unwrap();
}

#[test]
fn quotient_composition_is_geometric_composition() {
    let s = setup();
    let (b, cells) = relation_bicategory(&s.objects, &s.generators, 200).unwrap();
    let q = quotient_by_2isos(&b).unwrap();
    // inclusions both ways force equality, so classes are single relations
    assert_eq!(q.category.morphism_count(), cells.len());
    let mut embedded_pairs = 0;
    for (i, l) in cells.iter().enumerate() {
        for (j, r) in cells.iter().enumerate() {
            if l.target() != r.source() {
                continue;
            }
            if !is_embedded(l, r).unwrap().embedded {
                continue;
            }
            embedded_pairs += 1;
            let k = index_of(&cells, &geometric_compose(l, r).unwrap());
            assert_eq!(q.category.compose(q.class_of[i], q.class_of[j]), Some(q.class_of[k]));
        }
    }
    assert!(embedded_pairs > cells.len());
}

#[test]
fn yoneda_at_point_matches_functor_values() {
    let s = setup();
    let (b, cells) = relation_bicategory(&s.objects, &s.generators, 200).unwrap();
    let y = yoneda(&b, 0).unwrap();
    let handlebody = vec![SimpleCobordism::Cap0, SimpleCobordism::Attach1(AttachingCircle::canonical(1))];
    let base = functor_eval(&s.spec, &CobordismChain::new(handlebody.clone()).unwrap()).unwrap();
    let start = index_of(&cells, base.composed.as_ref().unwrap());
    for phi in [SurfaceAutomorphism::s_move(1, 1), SurfaceAutomorphism::twist_a(1, 1)] {
        let cyl = index_of(&cells, &s.spec.simple(&SimpleCobordism::Cyl(phi.clone())).unwrap());
        let mut longer = handlebody.clone();
        longer.push(SimpleCobordism::Cyl(phi));
        let value = functor_eval(&s.spec, &CobordismChain::new(longer).unwrap()).unwrap();
        let expected = index_of(&cells, value.composed.as_ref().unwrap());
        let functor = &y.functors[cyl];
        let local = y.objects_of[2].iter().position(|&f| f == start).unwrap();
        assert_eq!(y.objects_of[2][functor.ob[local]], expected);
    }
}
