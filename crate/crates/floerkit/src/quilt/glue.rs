use super::{alpha, End, QuiltDiagram, QuiltError, QuiltSurface, Seam, SeamLabel, UnionFind};

/// Glues the outgoing end of q1 into the incoming end e of q2. The result
/// lists q1's remaining ends, then q2's, and keeps q2's outgoing end.
pub fn quilt_glue<L: SeamLabel>(
    q1: &QuiltDiagram<L>,
    q2: &QuiltDiagram<L>,
    e: usize,
) -> Result<QuiltDiagram<L>, QuiltError> {
    q1.require_valid()?;
    q2.require_valid()?;
    let (a, b) = (&q1.surface, &q2.surface);
    if e >= b.ends.len() {
        return Err(QuiltError::InvalidEnd(e));
    }
    if e == b.outgoing {
        return Err(QuiltError::NotIncoming(e));
    }
    let o = a.outgoing;
    let r = QuiltDiagram::match_readings(&q1.end_reading(o)?, &q2.end_reading(e)?)?;

    // combined numbering: q2 darts after q1's, q2 patches after q1's
    let off = a.dart_count();
    let p1 = a.patch_count();
    let n = off + b.dart_count();
    let np = p1 + b.patch_count();
    let corner = |d: usize| if d < off { a.corner(d) } else { p1 + b.corner(d - off) };
    let lab = |d: usize| if d < off { q1.lab_from(d) } else { q2.lab_from(d - off) };

    let r1 = a.reading_darts(o)?;
    let r2: Vec<usize> = b.reading_darts(e)?.into_iter().map(|d| d + off).collect();
    let k = r1.len();
    let mut partner = vec![usize::MAX; n];
    for i in 0..k {
        let (x, y) = (r1[i], r2[(i + r) % k]);
        partner[x] = y;
        partner[y] = x;
    }
    let removed = |d: usize| partner[d] != usize::MAX;

    let mut uf = UnionFind::new(np);
    let nodes1 = a.node_patches(o)?;
    let nodes2: Vec<usize> = b.node_patches(e)?.into_iter().map(|p| p + p1).collect();
    let m = nodes1.len();
    for i in 0..m {
        uf.union(nodes1[i], nodes2[(i + r) % m]);
    }

    let mut visited = vec![false; n];
    let mut new_dart = vec![usize::MAX; n];
    let mut seams: Vec<(usize, usize)> = Vec::new();
    for x in 0..n {
        if removed(x) || new_dart[x] != usize::MAX {
            continue;
        }
        let mut y = alpha(x);
        while removed(y) {
            visited[y] = true;
            let z = partner[y];
            visited[z] = true;
            y = alpha(z);
        }
        new_dart[x] = 2 * seams.len();
        new_dart[y] = 2 * seams.len() + 1;
        seams.push((x, y));
    }
    // closed paths through the glued circle become circle seams
    let mut cycles = Vec::new();
    for z in 0..n {
        if !removed(z) || visited[z] {
            continue;
        }
        cycles.push(z);
        let mut w = z;
        loop {
            visited[w] = true;
            let t = alpha(w);
            visited[t] = true;
            w = partner[t];
            if w == z {
                break;
            }
        }
    }

    let mut new_id = vec![usize::MAX; np];
    let mut roots = Vec::new();
    for p in 0..np {
        let root = uf.find(p);
        if new_id[root] == usize::MAX {
            new_id[root] = roots.len();
            roots.push(root);
        }
        new_id[p] = new_id[root];
    }

    let mut ends = Vec::new();
    let map_end = |end: &End, doff: usize, poff: usize, uf: &mut UnionFind| End {
        darts: end.darts.iter().map(|&d| new_dart[d + doff]).collect(),
        patch: end.patch.map(|p| new_id[uf.find(p + poff)]),
    };
    for (i, end) in a.ends.iter().enumerate() {
        if i != o {
            ends.push(map_end(end, 0, 0, &mut uf));
        }
    }
    let mut outgoing = 0;
    for (i, end) in b.ends.iter().enumerate() {
        if i == b.outgoing {
            outgoing = ends.len();
        }
        if i != e {
            ends.push(map_end(end, off, p1, &mut uf));
        }
    }

    let seam_list: Vec<Seam> =
        seams.iter().map(|&(x, y)| Seam { minus: new_id[corner(y)], plus: new_id[corner(x)] }).collect();
    let seam_labels: Vec<L> = seams.iter().map(|&(x, _)| lab(x)).collect();
    let mut circles: Vec<Seam> = a.circles.clone();
    circles.extend(b.circles.iter().map(|c| Seam { minus: c.minus + p1, plus: c.plus + p1 }));
    for c in circles.iter_mut() {
        *c = Seam { minus: new_id[c.minus], plus: new_id[c.plus] };
    }
    let mut circle_labels: Vec<L> = q1.circle_labels.iter().chain(&q2.circle_labels).cloned().collect();
    for &z in &cycles {
        circles.push(Seam { minus: new_id[corner(alpha(z))], plus: new_id[corner(z)] });
        circle_labels.push(lab(z));
    }

    let patch_labels: Vec<L::Object> = roots
        .iter()
        .map(|&p| if p < p1 { q1.patch_labels[p].clone() } else { q2.patch_labels[p - p1].clone() })
        .collect();

    // χ of a merged patch: pieces minus one per glued sector
    let (b1, b2) = (a.boundary_counts(), b.boundary_counts());
    let mut chi = vec![0i64; roots.len()];
    for p in 0..np {
        let (g, bc) = if p < p1 { (a.patch_genus[p], b1[p]) } else { (b.patch_genus[p - p1], b2[p - p1]) };
        chi[new_id[p]] += 2 - 2 * g as i64 - bc as i64;
    }
    if k > 0 {
        for &p in &nodes1 {
            chi[new_id[p]] -= 1;
        }
    }

    let mut surface = QuiltSurface {
        ends,
        outgoing,
        seams: seam_list,
        circles,
        patch_genus: vec![0; roots.len()],
    };
    let bnew = surface.boundary_counts();
    for p in 0..roots.len() {
        let twice = 2 - bnew[p] as i64 - chi[p];
        if twice < 0 || twice % 2 != 0 {
            return Err(QuiltError::Invalid(format!("glued patch {p} has Euler characteristic {}", chi[p])));
        }
        surface.patch_genus[p] = (twice / 2) as usize;
    }
    let out = QuiltDiagram { surface, patch_labels, seam_labels, circle_labels };
    out.require_valid()?;
    Ok(out)
}
