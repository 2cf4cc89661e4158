//! Canonical diagrams: cylinders, caps, cups, pants and the strip examples.

use super::{quilt_glue, End, QuiltDiagram, QuiltError, QuiltSurface, Seam, SeamLabel};

fn mismatch<L: SeamLabel>(what: &str, a: &L, b: &L) -> QuiltError {
    QuiltError::LabelMismatch(format!("{what}: {} then {}", a.name(), b.name()))
}

fn check_cyclic<L: SeamLabel>(chain: &[L]) -> Result<(), QuiltError> {
    let k = chain.len();
    for i in 0..k {
        let (a, b) = (&chain[i], &chain[(i + 1) % k]);
        if !L::same_object(a.cod(), b.dom()) {
            return Err(mismatch("chain is not cyclic", a, b));
        }
    }
    Ok(())
}

fn diagram<L: SeamLabel>(
    ends: Vec<End>,
    outgoing: usize,
    seams: Vec<(Seam, L)>,
    circles: Vec<(Seam, L)>,
    patch_labels: Vec<L::Object>,
) -> Result<QuiltDiagram<L>, QuiltError> {
    let (seams, seam_labels) = seams.into_iter().unzip();
    let (circles, circle_labels) = circles.into_iter().unzip();
    let q = QuiltDiagram {
        surface: QuiltSurface { ends, outgoing, seams, circles, patch_genus: vec![0; patch_labels.len()] },
        patch_labels,
        seam_labels,
        circle_labels,
    };
    q.require_valid()?;
    Ok(q)
}

/// A sphere with one outgoing end and no seams.
pub fn sphere<L: SeamLabel>(obj: L::Object) -> Result<QuiltDiagram<L>, QuiltError> {
    diagram(vec![End::empty(0)], 0, vec![], vec![], vec![obj])
}

/// Cylinder from an incoming end (end 0) to the outgoing end (end 1) with one
/// seam per label of a cyclic chain. Seam i runs from the outgoing end to the
/// incoming one and separates node i from node i+1.
pub fn cylinder<L: SeamLabel>(chain: &[L]) -> Result<QuiltDiagram<L>, QuiltError> {
    let k = chain.len();
    if k == 0 {
        return Err(QuiltError::LabelMismatch("empty chain; use empty_cylinder".into()));
    }
    check_cyclic(chain)?;
    let seams = (0..k).map(|i| (Seam { minus: i, plus: (i + 1) % k }, chain[i].clone())).collect();
    let incoming = (0..k).map(|j| 2 * ((k - j) % k) + 1).collect();
    let outgoing = (0..k).map(|i| 2 * i).collect();
    let objects = chain.iter().map(|l| l.dom().clone()).collect();
    diagram(vec![End::with_darts(incoming), End::with_darts(outgoing)], 1, seams, vec![], objects)
}

/// Cylinder without seams on a single patch.
pub fn empty_cylinder<L: SeamLabel>(obj: L::Object) -> Result<QuiltDiagram<L>, QuiltError> {
    diagram(vec![End::empty(0), End::empty(0)], 1, vec![], vec![], vec![obj])
}

/// Cylinder with one seam labeled by an endomorphism.
pub fn identity<L: SeamLabel>(y: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    cylinder(std::slice::from_ref(y))
}

/// A disc whose boundary end reads (Y, Yᵀ): one arc with both ends on it.
pub fn cap<L: SeamLabel>(y: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    diagram(
        vec![End::with_darts(vec![0, 1])],
        0,
        vec![(Seam { minus: 0, plus: 1 }, y.clone())],
        vec![],
        vec![y.dom().clone(), y.cod().clone()],
    )
}

/// An incoming end reading (Y, Yᵀ) closed off by one arc; the outgoing end
/// has no seams and sits on the codomain side.
pub fn cup<L: SeamLabel>(y: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    diagram(
        vec![End::with_darts(vec![1, 0]), End::empty(1)],
        1,
        vec![(Seam { minus: 0, plus: 1 }, y.clone())],
        vec![],
        vec![y.dom().clone(), y.cod().clone()],
    )
}

/// (Y, Yᵀ) → (Y, Yᵀ, Y, Yᵀ): the identity next to a new arc.
pub fn cap_beside<L: SeamLabel>(y: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    let yt = y.adjoint();
    diagram(
        vec![End::with_darts(vec![1, 3]), End::with_darts(vec![0, 4, 5, 2])],
        1,
        vec![
            (Seam { minus: 0, plus: 1 }, y.clone()),
            (Seam { minus: 1, plus: 0 }, yt.clone()),
            (Seam { minus: 1, plus: 2 }, yt),
        ],
        vec![],
        vec![y.dom().clone(), y.cod().clone(), y.dom().clone()],
    )
}

/// (Y, Yᵀ, Y, Yᵀ) → (Y, Yᵀ): closes off the first two positions.
pub fn cup_beside<L: SeamLabel>(y: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    let yt = y.adjoint();
    diagram(
        vec![End::with_darts(vec![1, 5, 3, 0]), End::with_darts(vec![2, 4])],
        1,
        vec![
            (Seam { minus: 0, plus: 2 }, y.clone()),
            (Seam { minus: 0, plus: 1 }, y.clone()),
            (Seam { minus: 1, plus: 0 }, yt),
        ],
        vec![],
        vec![y.dom().clone(), y.cod().clone(), y.cod().clone()],
    )
}

/// The snake: cap_beside followed by cup_beside, a cylinder on (Y, Yᵀ).
pub fn zigzag<L: SeamLabel>(y: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    quilt_glue(&cap_beside(y)?, &cup_beside(y)?, 0)
}

/// Pair of pants: incoming ends 0 and 1 reading `left` and `right`, both
/// starting and ending at `waist`; the outgoing end 2 reads left then right.
pub fn pants<L: SeamLabel>(waist: L::Object, left: &[L], right: &[L]) -> Result<QuiltDiagram<L>, QuiltError> {
    for part in [left, right] {
        if let (Some(first), Some(last)) = (part.first(), part.last()) {
            if !L::same_object(first.dom(), &waist) || !L::same_object(last.cod(), &waist) {
                return Err(QuiltError::LabelMismatch(format!(
                    "leg {} .. {} does not start and end at {}",
                    first.name(),
                    last.name(),
                    L::object_name(&waist)
                )));
            }
            for w in part.windows(2) {
                if !L::same_object(w[0].cod(), w[1].dom()) {
                    return Err(mismatch("leg is not composable", &w[0], &w[1]));
                }
            }
        }
    }
    let mut objects = vec![waist];
    let mut seams = Vec::new();
    let mut legs = Vec::new();
    for part in [left, right] {
        let m = part.len();
        let base = seams.len();
        // node j of the leg: the waist for j = 0 and j = m, else a new patch
        let node = |j: usize, objects: &Vec<L::Object>| if j == 0 || j == m { 0 } else { objects.len() - (m - 1) + (j - 1) };
        for l in part.iter().skip(1) {
            objects.push(l.dom().clone());
        }
        for (j, l) in part.iter().enumerate() {
            seams.push((Seam { minus: node(j, &objects), plus: node(j + 1, &objects) }, l.clone()));
        }
        legs.push(if m == 0 {
            End::empty(0)
        } else {
            End::with_darts((0..m).map(|j| 2 * (base + (m - j) % m) + 1).collect())
        });
    }
    let outgoing = End::with_darts((0..seams.len()).map(|i| 2 * i).collect());
    let mut ends = legs;
    ends.push(if seams.is_empty() { End::empty(0) } else { outgoing });
    diagram(ends, 2, seams, vec![], objects)
}

/// A cylinder split by two parallel circle seams into three patches; both ends
/// have no seams. Circles carry Y1 (patch 0 to 1) and Y2 (patch 1 to 2).
pub fn concentric<L: SeamLabel>(y1: &L, y2: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    if !L::same_object(y1.cod(), y2.dom()) {
        return Err(mismatch("circles are not composable", y1, y2));
    }
    diagram(
        vec![End::empty(0), End::empty(2)],
        1,
        vec![],
        vec![(Seam { minus: 0, plus: 1 }, y1.clone()), (Seam { minus: 1, plus: 2 }, y2.clone())],
        vec![y1.dom().clone(), y1.cod().clone(), y2.cod().clone()],
    )
}

/// Two incoming ends joined by a strip (patch 1) bounded by seams labeled
/// Y1: Q → P and Y2: P → Q; the outgoing end has no seams and sits in Q
/// (patch 0). Shrinking the strip composes Y1 then Y2.
pub fn incoming_strip<L: SeamLabel>(y1: &L, y2: &L) -> Result<QuiltDiagram<L>, QuiltError> {
    if !L::same_object(y1.cod(), y2.dom()) || !L::same_object(y2.cod(), y1.dom()) {
        return Err(mismatch("strip labels are not mutually inverse in shape", y1, y2));
    }
    diagram(
        vec![End::with_darts(vec![3, 1]), End::with_darts(vec![0, 2]), End::empty(0)],
        2,
        vec![(Seam { minus: 0, plus: 1 }, y1.clone()), (Seam { minus: 1, plus: 0 }, y2.clone())],
        vec![],
        vec![y1.dom().clone(), y1.cod().clone()],
    )
}

/// Named string-diagram shapes.
#[derive(Debug, Clone)]
pub enum StringKind<L: SeamLabel> {
    /// One seam on an endomorphism.
    Identity(L),
    /// Two stacked cylinders on the same cyclic chain.
    Vertical(Vec<L>),
    /// Pants merging two legs that meet at a waist object.
    Horizontal { waist: L::Object, left: Vec<L>, right: Vec<L> },
    Cap(L),
    Cup(L),
}

pub fn string_diagram<L: SeamLabel>(kind: &StringKind<L>) -> Result<QuiltDiagram<L>, QuiltError> {
    match kind {
        StringKind::Identity(y) => identity(y),
        StringKind::Vertical(chain) => quilt_glue(&cylinder(chain)?, &cylinder(chain)?, 0),
        StringKind::Horizontal { waist, left, right } => pants(waist.clone(), left, right),
        StringKind::Cap(y) => cap(y),
        StringKind::Cup(y) => cup(y),
    }
}
