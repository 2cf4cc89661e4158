use super::{is_tail, seam_of, Dart, QuiltDiagram, QuiltError, Seam, SeamLabel};

/// A shrunk diagram with the maps back to the original: `patch_map[old]` is
/// the new patch (None for the removed one) and `node_maps[e][j]` the old
/// node of end e that new node j continues.
#[derive(Debug, Clone)]
pub struct ShrinkResult<L: SeamLabel> {
    pub diagram: QuiltDiagram<L>,
    pub patch_map: Vec<Option<usize>>,
    pub node_maps: Vec<Vec<usize>>,
}

/// Removes strip or annulus patch p, merging its two boundary seams into one
/// labeled by the composite. Fails with NotEmbedded when the composite is not.
pub fn shrink_strip<L: SeamLabel>(q: &QuiltDiagram<L>, p: usize) -> Result<ShrinkResult<L>, QuiltError> {
    shrink(q, p, true)
}

/// Same as `shrink_strip` without the embeddedness requirement.
pub fn shrink_strip_unchecked<L: SeamLabel>(q: &QuiltDiagram<L>, p: usize) -> Result<ShrinkResult<L>, QuiltError> {
    shrink(q, p, false)
}

fn shrink<L: SeamLabel>(q: &QuiltDiagram<L>, p: usize, check: bool) -> Result<ShrinkResult<L>, QuiltError> {
    q.require_valid()?;
    let s = &q.surface;
    if p >= s.patch_count() || s.patch_genus[p] != 0 || s.ends.iter().any(|e| e.darts.is_empty() && e.patch == Some(p))
    {
        return Err(QuiltError::NotAStrip(p));
    }
    let orbits: Vec<Vec<Dart>> = s.face_orbits().into_iter().filter(|o| s.corner(o[0]) == p).collect();
    let sides: Vec<(usize, bool)> = s
        .circles
        .iter()
        .enumerate()
        .flat_map(|(i, c)| [(i, c.minus == p), (i, c.plus == p)])
        .filter(|x| x.1)
        .collect();
    let patch_map: Vec<Option<usize>> =
        (0..s.patch_count()).map(|x| (x != p).then(|| if x > p { x - 1 } else { x })).collect();
    let remap = |x: usize| patch_map[x].expect("surviving patch");

    let mut out = q.clone();
    out.surface.patch_genus.remove(p);
    out.patch_labels.remove(p);

    if orbits.is_empty() && sides.len() == 2 && sides[0].0 != sides[1].0 {
        let (i, j) = (sides[0].0, sides[1].0);
        let (ci, cj) = (s.circles[i], s.circles[j]);
        // orient circle i into p and circle j out of p
        let (l1, other1) =
            if ci.plus == p { (q.circle_labels[i].clone(), ci.minus) } else { (q.circle_labels[i].adjoint(), ci.plus) };
        let (l2, other2) =
            if cj.minus == p { (q.circle_labels[j].clone(), cj.plus) } else { (q.circle_labels[j].adjoint(), cj.minus) };
        let composite = l1.then_label(&l2, check)?;
        out.surface.circles[i] = Seam { minus: other1, plus: other2 };
        out.circle_labels[i] = composite;
        out.surface.circles.remove(j);
        out.circle_labels.remove(j);
        renumber_patches(&mut out, &remap);
        let node_maps = (0..s.ends.len())
            .map(|e| s.node_starts(e).map(|v| (0..v.len()).collect()))
            .collect::<Result<_, _>>()?;
        out.require_valid()?;
        return Ok(ShrinkResult { diagram: out, patch_map, node_maps });
    }

    if !sides.is_empty() || orbits.len() != 1 || orbits[0].len() != 2 {
        return Err(QuiltError::NotAStrip(p));
    }
    let c1 = orbits[0][0];
    let d = s.sigma(c1);
    let (sa, sb) = (seam_of(c1), seam_of(d));
    if sa == sb {
        return Err(QuiltError::NotAStrip(p));
    }
    let composite = q.lab_from(c1).then_label(&q.lab_from(d), check)?;
    let pb = s.corner(d);
    if is_tail(c1) {
        out.surface.seams[sa].plus = pb;
        out.seam_labels[sa] = composite;
    } else {
        out.surface.seams[sa].minus = pb;
        out.seam_labels[sa] = composite.adjoint();
    }
    out.surface.seams.remove(sb);
    out.seam_labels.remove(sb);
    let dart_map = |x: Dart| -> Option<Dart> {
        match seam_of(x).cmp(&sb) {
            std::cmp::Ordering::Less => Some(x),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(x - 2),
        }
    };
    for end in out.surface.ends.iter_mut() {
        end.darts = end.darts.iter().filter_map(|&x| dart_map(x)).collect();
    }
    renumber_patches(&mut out, &remap);

    // the wedge after d survives as the wedge after c1; the one after c1 is gone
    let back = |x: Dart| if seam_of(x) >= sb { x + 2 } else { x };
    let mut node_maps = Vec::new();
    for e in 0..s.ends.len() {
        let old = s.node_starts(e)?;
        let new = out.surface.node_starts(e)?;
        let mut map = Vec::new();
        for start in new {
            let target = start.map(|x| if back(x) == c1 { d } else { back(x) });
            let i = old.iter().position(|&o| o == target).ok_or_else(|| {
                QuiltError::Invalid(format!("node of end {e} lost while shrinking patch {p}"))
            })?;
            map.push(i);
        }
        node_maps.push(map);
    }
    out.require_valid()?;
    Ok(ShrinkResult { diagram: out, patch_map, node_maps })
}

fn renumber_patches<L: SeamLabel>(q: &mut QuiltDiagram<L>, remap: &dyn Fn(usize) -> usize) {
    let s = &mut q.surface;
    for seam in s.seams.iter_mut().chain(s.circles.iter_mut()) {
        seam.minus = remap(seam.minus);
        seam.plus = remap(seam.plus);
    }
    for end in s.ends.iter_mut() {
        end.patch = end.patch.map(remap);
    }
}
