use std::collections::BTreeSet;
use std::sync::Arc;

use floerkit::algebra::{FiniteGroup, SurfaceAutomorphism};
use floerkit::bordism::AttachingCircle;
use floerkit::quilt::*;
use floerkit::relcat::geometric_compose;
use floerkit::repvar::{FiniteRelation, RepContext, RepVariety};

const BUDGET: u64 = 10_000_000;

fn set(name: &str, n: usize) -> Arc<RepVariety> {
    Arc::new(RepVariety::abstract_set(name, n))
}

fn rel(a: &Arc<RepVariety>, b: &Arc<RepVariety>, pairs: &[(usize, usize)]) -> FiniteRelation {
    FiniteRelation::new(a.clone(), b.clone(), pairs.iter().copied()).unwrap()
}

/// A 3-point to 2-point relation that is neither injective nor surjective onto pairs.
fn sample_y() -> FiniteRelation {
    let (a, b) = (set("A", 3), set("B", 2));
    rel(&a, &b, &[(0, 0), (0, 1), (2, 1)])
}

fn attach_y() -> FiniteRelation {
    let ctx = RepContext::new(FiniteGroup::symmetric(3));
    ctx.relation_of_attach2(&AttachingCircle::new(SurfaceAutomorphism::s_move(2, 1)).unwrap()).unwrap()
}

fn pairs_of(y: &FiniteRelation) -> BTreeSet<Vec<u32>> {
    y.pairs().iter().map(|&(x, z)| vec![x, z]).collect()
}

#[test]
fn sphere_reads_the_diagonal() {
    let m = set("M", 4);
    let q = sphere::<FiniteRelation>(m.clone()).unwrap();
    let r = q.validate();
    assert!(r.valid, "{:?}", r.entries);
    assert_eq!(r.genus, Some(0));
    let c = q.end_cyclic_morphism(0).unwrap();
    assert_eq!(c.relations(), &[FiniteRelation::diagonal(m)]);
}

#[test]
fn two_seam_cylinder_and_concentric_circles() {
    let y = sample_y();
    let q = cylinder(&[y.clone(), y.transpose()]).unwrap();
    let r = q.validate();
    assert!(r.valid);
    assert_eq!((r.patches, r.genus), (2, Some(0)));
    let c = concentric(&y, &y.transpose()).unwrap();
    let r = c.validate();
    assert!(r.valid);
    assert_eq!((r.patches, r.genus), (3, Some(0)));
}

#[test]
fn duplicate_seam_end_is_reported_with_index() {
    let mut q = cylinder(&[sample_y(), sample_y().transpose()]).unwrap();
    q.surface.ends[0].darts[1] = q.surface.ends[1].darts[0];
    let r = q.validate();
    assert!(!r.valid);
    let bad = r.entries.iter().find(|e| e.check == "seam_ends").unwrap();
    assert!(!bad.passed());
    assert!(bad.witness.as_ref().unwrap().get("index").is_some());
}

#[test]
fn reading_rotates_with_stored_order() {
    let y = sample_y();
    let q = cylinder(&[y.clone(), y.transpose()]).unwrap();
    let mut rotated = q.clone();
    rotated.surface.ends[1].darts.rotate_left(1);
    let c = q.end_cyclic_morphism(1).unwrap();
    let d = rotated.end_cyclic_morphism(1).unwrap();
    assert_eq!(d, c.rotate(1));
    assert_ne!(c, d);
}

#[test]
fn cap_reads_y_then_transpose_and_evaluates_to_all_pairs() {
    for y in [sample_y(), attach_y()] {
        let q = cap(&y).unwrap();
        let c = q.end_cyclic_morphism(0).unwrap();
        assert_eq!(c.relations(), &[y.clone(), y.transpose()]);
        assert_eq!(q.quilt_evaluate(&[], BUDGET).unwrap(), pairs_of(&y));
    }
}

#[test]
fn zigzag_is_a_cylinder_and_evaluates_to_the_identity() {
    for y in [sample_y(), attach_y()] {
        let z = zigzag(&y).unwrap();
        assert_eq!(z.surface.patch_count(), 2);
        let cyl = cylinder(&[y.clone(), y.transpose()]).unwrap();
        assert!(find_isomorphism(&z, &cyl).is_some());
        let ev = z.evaluate_all(BUDGET).unwrap();
        assert_eq!(ev.map.len(), y.len());
        for (input, out) in &ev.map {
            assert_eq!(out, &input.iter().cloned().collect::<BTreeSet<_>>());
        }
    }
}

#[test]
fn gluing_cylinders_gives_a_cylinder() {
    let y = sample_y();
    let chain = [y.clone(), y.transpose()];
    let cyl = cylinder(&chain).unwrap();
    let twice = quilt_glue(&cyl, &cyl, 0).unwrap();
    assert!(find_isomorphism(&twice, &cyl).is_some());
    let onto_cap = quilt_glue(&cap(&y).unwrap(), &cyl, 0).unwrap();
    assert!(find_isomorphism(&onto_cap, &cap(&y).unwrap()).is_some());
}

#[test]
fn cap_into_cup_closes_a_circle() {
    let y = sample_y();
    let s = quilt_glue(&cap(&y).unwrap(), &cup(&y).unwrap(), 0).unwrap();
    assert_eq!(s.surface.seams.len(), 0);
    assert_eq!(s.surface.circles.len(), 1);
    assert_eq!(s.validate().genus, Some(0));
    let image: BTreeSet<Vec<u32>> = y.pairs().iter().map(|&(_, z)| vec![z]).collect();
    assert_eq!(s.quilt_evaluate(&[], BUDGET).unwrap(), image);
}

#[test]
fn mismatched_ends_do_not_glue() {
    let y = sample_y();
    let other = rel(y.source(), y.target(), &[(1, 1)]);
    let err = quilt_glue(&cap(&y).unwrap(), &cup(&other).unwrap(), 0).unwrap_err();
    assert_eq!(err, QuiltError::CyclicMismatch { position: 0 });
}

#[test]
fn shrinking_next_to_a_diagonal_keeps_the_label() {
    let y = sample_y();
    let q = cylinder(&[y.clone(), FiniteRelation::diagonal(y.target().clone()), y.transpose()]).unwrap();
    let s = shrink_strip(&q, 1).unwrap().diagram;
    assert_eq!(s.surface.seams.len(), 2);
    assert!(s.seam_labels.iter().any(|l| l.same_as(&y)));
    assert!(find_isomorphism(&s, &cylinder(&[y.clone(), y.transpose()]).unwrap()).is_some());
}

#[test]
fn shrinking_the_middle_annulus_composes_the_circles() {
    let (a, b, c) = (set("A", 2), set("B", 2), set("C", 3));
    let y1 = rel(&a, &b, &[(0, 1), (1, 0)]);
    let y2 = rel(&b, &c, &[(0, 2), (1, 0), (1, 1)]);
    let q = concentric(&y1, &y2).unwrap();
    let s = shrink_strip(&q, 1).unwrap().diagram;
    assert_eq!(s.surface.patch_count(), 2);
    assert_eq!(s.circle_labels, vec![geometric_compose(&y1, &y2).unwrap()]);
    assert_eq!(shrink_strip(&q, 0).unwrap_err(), QuiltError::NotAStrip(0));
}

#[test]
fn non_embedded_strip_is_refused_with_witness() {
    let (q_, p) = (set("Q", 2), set("P", 2));
    let full = |a: &Arc<RepVariety>, b: &Arc<RepVariety>| rel(a, b, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
    let q = incoming_strip(&full(&q_, &p), &full(&p, &q_)).unwrap();
    match shrink_strip(&q, 1) {
        Err(QuiltError::NotEmbedded { x, y, y2, z }) => {
            assert_ne!(y, y2);
            assert!(x < 2 && z < 2);
        }
        other => panic!("expected NotEmbedded, got {other:?}"),
    }
    let (embedded, entry) = strip_check("full", &q, 1, BUDGET).unwrap();
    assert!(!embedded);
    assert!(!entry.passed(), "the strip axiom should fail without embeddedness");

    let swap = |a: &Arc<RepVariety>, b: &Arc<RepVariety>| rel(a, b, &[(0, 1), (1, 0)]);
    let good = incoming_strip(&swap(&q_, &p), &swap(&p, &q_)).unwrap();
    let (embedded, entry) = strip_check("swap", &good, 1, BUDGET).unwrap();
    assert!(embedded);
    assert!(entry.passed(), "{entry:?}");
}

#[test]
fn axioms_hold_on_small_fixtures() {
    let y = sample_y();
    let cyl = cylinder(&[y.clone(), y.transpose()]).unwrap();
    assert!(cylinder_check("cyl", &cyl, BUDGET).unwrap().passed());
    assert!(gluing_check("cap-cyl", &cap(&y).unwrap(), &cyl, 0, BUDGET).unwrap().passed());
    assert!(gluing_check("snake", &cap_beside(&y).unwrap(), &cup_beside(&y).unwrap(), 0, BUDGET).unwrap().passed());
    assert!(gluing_check("cap-cup", &cap(&y).unwrap(), &cup(&y).unwrap(), 0, BUDGET).unwrap().passed());
    for seed in 0..5 {
        for q in [cyl.clone(), cap_beside(&y).unwrap(), cup_beside(&y).unwrap(), zigzag(&y).unwrap()] {
            let e = deformation_check("fixture", &q, seed, BUDGET).unwrap();
            assert!(e.passed(), "{e:?}");
        }
    }
}

#[test]
fn pants_join_two_legs() {
    let (w, b) = (set("W", 2), set("B", 3));
    let l1 = rel(&w, &b, &[(0, 0), (1, 2)]);
    let l2 = rel(&b, &w, &[(0, 0), (2, 1), (1, 1)]);
    let loop_ = rel(&w, &w, &[(0, 1), (1, 0)]);
    let q = pants(w.clone(), &[l1.clone(), l2.clone()], std::slice::from_ref(&loop_)).unwrap();
    let r = q.validate();
    assert!(r.valid, "{:?}", r.entries);
    assert_eq!(r.genus, Some(0));
    assert_eq!(q.end_cyclic_morphism(2).unwrap().relations(), &[l1, l2, loop_]);
    let dartless = pants::<FiniteRelation>(w, &[], &[]).unwrap();
    assert!(dartless.validate().valid);
}

#[test]
fn generic_labels_glue_and_shrink() {
    let f = GenericLabel::new("f", "A", "B");
    let z = zigzag(&f).unwrap();
    let cyl = cylinder(&[f.clone(), f.adjoint()]).unwrap();
    assert!(find_isomorphism(&z, &cyl).is_some());
    let g = GenericLabel::new("g", "B", "C");
    let q = concentric(&f, &g).unwrap();
    let s = shrink_strip(&q, 1).unwrap().diagram;
    assert_eq!(s.circle_labels[0].name, "f;g");
}

#[test]
fn file_round_trip_and_dot() {
    let y = sample_y();
    let q = zigzag(&y).unwrap();
    let file = QuiltFile::from_relation_diagram(&q);
    let text = serde_json::to_string(&file).unwrap();
    let back: QuiltFile = serde_json::from_str(&text).unwrap();
    let r = back.to_relation_diagram().unwrap();
    assert!(r.validate().valid);
    assert_eq!(r.evaluate_all(BUDGET).unwrap(), q.evaluate_all(BUDGET).unwrap());
    let dot = export_dot(&q);
    assert!(dot.starts_with("graph quilt {"));
    assert_eq!(dot.matches("subgraph cluster_").count(), 2);

    let f = GenericLabel::new("f", "A", "B");
    let g = zigzag(&f).unwrap();
    let back = QuiltFile::from_generic_diagram(&g).to_generic_diagram().unwrap();
    assert_eq!(back.seam_labels.len(), g.seam_labels.len());
    assert!(find_isomorphism(&back, &g).is_some());
}
