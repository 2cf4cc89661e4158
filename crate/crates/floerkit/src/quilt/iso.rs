use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{alpha, seam_of, Dart, End, QuiltDiagram, QuiltError, QuiltSurface, Seam, SeamLabel};

/// A combinatorial isomorphism between two labeled quilts. Seams may be
/// reversed; `circle_map[c] = (c′, reversed)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuiltIsomorphism {
    pub end_map: Vec<usize>,
    pub dart_map: Vec<Dart>,
    pub patch_map: Vec<usize>,
    pub circle_map: Vec<(usize, bool)>,
}

impl QuiltIsomorphism {
    /// For each node j of end `end_map[e]` in b, the node of end e in a it corresponds to.
    pub fn node_map<L: SeamLabel>(
        &self,
        a: &QuiltDiagram<L>,
        b: &QuiltDiagram<L>,
        e: usize,
    ) -> Result<Vec<usize>, QuiltError> {
        let sa = a.surface.node_starts(e)?;
        let sb = b.surface.node_starts(self.end_map[e])?;
        sb.iter()
            .map(|t| {
                sa.iter()
                    .position(|s| s.map(|d| self.dart_map[d]) == *t)
                    .ok_or_else(|| QuiltError::Invalid(format!("no node of end {e} maps to {t:?}")))
            })
            .collect()
    }
}

#[derive(Clone)]
struct State {
    dart: Vec<usize>,
    patch: Vec<usize>,
    patch_inv: Vec<usize>,
    end_used: Vec<bool>,
    end_map: Vec<usize>,
    circle_used: Vec<bool>,
    circle_map: Vec<(usize, bool)>,
}

impl State {
    fn bind_patch(&mut self, x: usize, y: usize) -> bool {
        match (self.patch[x], self.patch_inv[y]) {
            (usize::MAX, usize::MAX) => {
                self.patch[x] = y;
                self.patch_inv[y] = x;
                true
            }
            (px, py) => px == y && py == x,
        }
    }
}

/// Backtracking search over end images and rotations, then circle matchings.
pub fn find_isomorphism<L: SeamLabel>(a: &QuiltDiagram<L>, b: &QuiltDiagram<L>) -> Option<QuiltIsomorphism> {
    let (sa, sb) = (&a.surface, &b.surface);
    if sa.ends.len() != sb.ends.len()
        || sa.seams.len() != sb.seams.len()
        || sa.circles.len() != sb.circles.len()
        || sa.patch_count() != sb.patch_count()
        || !a.validate().valid
        || !b.validate().valid
    {
        return None;
    }
    let st = State {
        dart: vec![usize::MAX; sa.dart_count()],
        patch: vec![usize::MAX; sa.patch_count()],
        patch_inv: vec![usize::MAX; sb.patch_count()],
        end_used: vec![false; sb.ends.len()],
        end_map: vec![usize::MAX; sa.ends.len()],
        circle_used: vec![false; sb.circles.len()],
        circle_map: vec![(usize::MAX, false); sa.circles.len()],
    };
    let st = match_ends(a, b, st, 0)?;
    Some(QuiltIsomorphism { end_map: st.end_map, dart_map: st.dart, patch_map: st.patch, circle_map: st.circle_map })
}

fn match_ends<L: SeamLabel>(a: &QuiltDiagram<L>, b: &QuiltDiagram<L>, st: State, i: usize) -> Option<State> {
    let (sa, sb) = (&a.surface, &b.surface);
    if i == sa.ends.len() {
        return match_circles(a, b, st, 0);
    }
    let ea = &sa.ends[i];
    let k = ea.darts.len();
    for j in 0..sb.ends.len() {
        let eb = &sb.ends[j];
        if st.end_used[j] || eb.darts.len() != k || (i == sa.outgoing) != (j == sb.outgoing) {
            continue;
        }
        for r in 0..k.max(1) {
            let mut next = st.clone();
            next.end_used[j] = true;
            next.end_map[i] = j;
            if try_assign(a, b, &mut next, ea, eb, r) {
                if let Some(done) = match_ends(a, b, next, i + 1) {
                    return Some(done);
                }
            }
        }
    }
    None
}

fn try_assign<L: SeamLabel>(
    a: &QuiltDiagram<L>,
    b: &QuiltDiagram<L>,
    st: &mut State,
    ea: &End,
    eb: &End,
    r: usize,
) -> bool {
    let k = ea.darts.len();
    if k == 0 {
        return st.bind_patch(ea.patch.expect("seamless end patch"), eb.patch.expect("seamless end patch"));
    }
    for t in 0..k {
        let (x, y) = (ea.darts[t], eb.darts[(t + r) % k]);
        st.dart[x] = y;
        let partner = st.dart[alpha(x)];
        if partner != usize::MAX && partner != alpha(y) {
            return false;
        }
        if !a.lab_from(x).same(&b.lab_from(y)) {
            return false;
        }
        if !st.bind_patch(a.surface.corner(x), b.surface.corner(y)) {
            return false;
        }
    }
    true
}

fn match_circles<L: SeamLabel>(a: &QuiltDiagram<L>, b: &QuiltDiagram<L>, st: State, i: usize) -> Option<State> {
    let (sa, sb) = (&a.surface, &b.surface);
    if i == sa.circles.len() {
        let ok = (0..sa.patch_count()).all(|p| {
            let q = st.patch[p];
            q != usize::MAX
                && sa.patch_genus[p] == sb.patch_genus[q]
                && L::same_object(&a.patch_labels[p], &b.patch_labels[q])
        });
        return ok.then_some(st);
    }
    let c = sa.circles[i];
    let la = &a.circle_labels[i];
    for j in 0..sb.circles.len() {
        if st.circle_used[j] {
            continue;
        }
        let d = sb.circles[j];
        let lb = &b.circle_labels[j];
        for rev in [false, true] {
            let (m, p) = if rev { (d.plus, d.minus) } else { (d.minus, d.plus) };
            let same = if rev { la.adjoint().same(lb) } else { la.same(lb) };
            if !same {
                continue;
            }
            let mut next = st.clone();
            if next.bind_patch(c.minus, m) && next.bind_patch(c.plus, p) {
                next.circle_used[j] = true;
                next.circle_map[i] = (j, rev);
                if let Some(done) = match_circles(a, b, next, i + 1) {
                    return Some(done);
                }
            }
        }
    }
    None
}

/// A relabeled copy: ends, seams, circles and patches permuted, end lists
/// rotated, and some seams and circles reversed with transposed labels.
pub fn scramble<L: SeamLabel>(q: &QuiltDiagram<L>, seed: u64) -> QuiltDiagram<L> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = &q.surface;
    let perm = |n: usize, rng: &mut ChaCha8Rng| {
        let mut v: Vec<usize> = (0..n).collect();
        v.shuffle(rng);
        v
    };
    let sp = perm(s.seams.len(), &mut rng);
    let flip: Vec<bool> = (0..s.seams.len()).map(|_| rng.gen_bool(0.5)).collect();
    let pp = perm(s.patch_count(), &mut rng);
    let ep = perm(s.ends.len(), &mut rng);
    let cp = perm(s.circles.len(), &mut rng);
    let cflip: Vec<bool> = (0..s.circles.len()).map(|_| rng.gen_bool(0.5)).collect();
    let dart = |d: Dart| 2 * sp[seam_of(d)] + ((d & 1) ^ flip[seam_of(d)] as usize);

    let mut seams = vec![Seam { minus: 0, plus: 0 }; s.seams.len()];
    let mut seam_labels = q.seam_labels.clone();
    for (i, seam) in s.seams.iter().enumerate() {
        let (m, p) = (pp[seam.minus], pp[seam.plus]);
        if flip[i] {
            seams[sp[i]] = Seam { minus: p, plus: m };
            seam_labels[sp[i]] = q.seam_labels[i].adjoint();
        } else {
            seams[sp[i]] = Seam { minus: m, plus: p };
            seam_labels[sp[i]] = q.seam_labels[i].clone();
        }
    }
    let mut circles = vec![Seam { minus: 0, plus: 0 }; s.circles.len()];
    let mut circle_labels = q.circle_labels.clone();
    for (i, c) in s.circles.iter().enumerate() {
        let (m, p) = (pp[c.minus], pp[c.plus]);
        if cflip[i] {
            circles[cp[i]] = Seam { minus: p, plus: m };
            circle_labels[cp[i]] = q.circle_labels[i].adjoint();
        } else {
            circles[cp[i]] = Seam { minus: m, plus: p };
            circle_labels[cp[i]] = q.circle_labels[i].clone();
        }
    }
    let mut ends = vec![End { darts: Vec::new(), patch: None }; s.ends.len()];
    for (i, end) in s.ends.iter().enumerate() {
        let mut darts: Vec<Dart> = end.darts.iter().map(|&d| dart(d)).collect();
        if !darts.is_empty() {
            let r = rng.gen_range(0..darts.len());
            darts.rotate_left(r);
        }
        ends[ep[i]] = End { darts, patch: end.patch.map(|p| pp[p]) };
    }
    let mut patch_genus = vec![0; s.patch_count()];
    let mut patch_labels = q.patch_labels.clone();
    for p in 0..s.patch_count() {
        patch_genus[pp[p]] = s.patch_genus[p];
        patch_labels[pp[p]] = q.patch_labels[p].clone();
    }
    QuiltDiagram {
        surface: QuiltSurface { ends, outgoing: ep[s.outgoing], seams, circles, patch_genus },
        patch_labels,
        seam_labels,
        circle_labels,
    }
}
