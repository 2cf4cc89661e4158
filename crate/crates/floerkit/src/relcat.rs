//! Chains of finite relations: geometric composition, embeddedness, bounded
//! composition-move search, cyclic chains and their generator sets.

use std::collections::HashMap;
use std::sync::Arc;

use rayon::prelude::*;
use thiserror::Error;

use crate::cat::{Arrow, BicategoryFile, Cell2, FinBicategory};
use crate::config::{check_budget, ResourceLimit};
use crate::repvar::{same_variety, FiniteRelation, RepVariety};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RelError {
    #[error("endpoint mismatch: {0} vs {1}")]
    EndpointMismatch(String, String),
    #[error("composition is not embedded: ({x}, {y}) and ({x}, {y2}) both reach {z}")]
    NotEmbedded { x: usize, y: usize, y2: usize, z: usize },
    #[error("cyclic chain is not composable at position {0}")]
    NotCyclic(usize),
    #[error("position {0} is out of range")]
    BadPosition(usize),
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error("more than {0} relations in the composition closure")]
    ClosureLimit(usize),
}

fn check_composable(l12: &FiniteRelation, l23: &FiniteRelation) -> Result<(), RelError> {
    if same_variety(l12.target(), l23.source()) {
        Ok(())
    } else {
        Err(RelError::EndpointMismatch(l12.target().label().into(), l23.source().label().into()))
    }
}

/// {(x, z) : ∃y, (x, y) ∈ L₁₂, (y, z) ∈ L₂₃}
pub fn geometric_compose(l12: &FiniteRelation, l23: &FiniteRelation) -> Result<FiniteRelation, RelError> {
    check_composable(l12, l23)?;
    let fwd = l23.forward_lists();
    let mut pairs: Vec<(usize, usize)> = l12
        .pairs()
        .par_iter()
        .flat_map_iter(|&(x, y)| fwd[y as usize].iter().map(move |&z| (x as usize, z as usize)))
        .collect();
    pairs.par_sort_unstable();
    pairs.dedup();
    Ok(FiniteRelation::new(l12.source().clone(), l23.target().clone(), pairs).expect("indices in range"))
}

/// Result of an embeddedness check: the number of matching triples and, when
/// an intermediate point is not unique, the least such (x, y, y′, z).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Embedding {
    pub embedded: bool,
    pub triples: usize,
    pub composite_size: usize,
    pub witness: Option<(usize, usize, usize, usize)>,
}

pub fn is_embedded(l12: &FiniteRelation, l23: &FiniteRelation) -> Result<Embedding, RelError> {
    check_composable(l12, l23)?;
    let fwd = l23.forward_lists();
    let mut triples: Vec<(u32, u32, u32)> = l12
        .pairs()
        .par_iter()
        .flat_map_iter(|&(x, y)| fwd[y as usize].iter().map(move |&z| (x, z, y)))
        .collect();
    triples.par_sort_unstable();
    let n = triples.len();
    let mut witness = None;
    let mut composite = 0;
    for (k, t) in triples.iter().enumerate() {
        if k == 0 || (triples[k - 1].0, triples[k - 1].1) != (t.0, t.1) {
            composite += 1;
        } else if witness.is_none() {
            let p = triples[k - 1];
            witness = Some((t.0 as usize, p.2 as usize, t.2 as usize, t.1 as usize));
        }
    }
    Ok(Embedding { embedded: witness.is_none(), triples: n, composite_size: composite, witness })
}

fn require_embedded(l12: &FiniteRelation, l23: &FiniteRelation) -> Result<(), RelError> {
    let e = is_embedded(l12, l23)?;
    match e.witness {
        None => Ok(()),
        Some((x, y, y2, z)) => Err(RelError::NotEmbedded { x, y, y2, z }),
    }
}

/// A composable chain of relations; the empty chain remembers its variety.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RelationChain {
    source: Arc<RepVariety>,
    relations: Vec<FiniteRelation>,
}

impl RelationChain {
    pub fn new(relations: Vec<FiniteRelation>) -> Result<Self, RelError> {
        let Some(first) = relations.first() else {
            return Err(RelError::BadPosition(0));
        };
        for w in relations.windows(2) {
            check_composable(&w[0], &w[1])?;
        }
        Ok(RelationChain { source: first.source().clone(), relations })
    }

    pub fn identity(v: Arc<RepVariety>) -> Self {
        RelationChain { source: v, relations: Vec::new() }
    }

    pub fn source(&self) -> &Arc<RepVariety> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RepVariety> {
        self.relations.last().map(|r| r.target()).unwrap_or(&self.source)
    }

    pub fn relations(&self) -> &[FiniteRelation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn concat(&self, other: &RelationChain) -> Result<Self, RelError> {
        if !same_variety(self.target(), other.source()) {
            return Err(RelError::EndpointMismatch(self.target().label().into(), other.source().label().into()));
        }
        let mut relations = self.relations.clone();
        relations.extend(other.relations.iter().cloned());
        Ok(RelationChain { source: self.source.clone(), relations })
    }

    pub fn transpose(&self) -> Self {
        RelationChain {
            source: self.target().clone(),
            relations: self.relations.iter().rev().map(FiniteRelation::transpose).collect(),
        }
    }

    /// Left-to-right composite when every step along the way is embedded.
    pub fn composed_if_embedded(&self) -> Result<Option<FiniteRelation>, RelError> {
        let Some(first) = self.relations.first() else {
            return Ok(Some(FiniteRelation::diagonal(self.source.clone())));
        };
        let mut acc = first.clone();
        for r in &self.relations[1..] {
            if !is_embedded(&acc, r)?.embedded {
                return Ok(None);
            }
            acc = geometric_compose(&acc, r)?;
        }
        Ok(Some(acc))
    }

    /// The full composite regardless of embeddedness.
    pub fn composed(&self) -> Result<FiniteRelation, RelError> {
        let mut acc = FiniteRelation::diagonal(self.source.clone());
        for r in &self.relations {
            acc = geometric_compose(&acc, r)?;
        }
        Ok(acc)
    }

    /// Replaces relations `at`, `at+1` by their composite, which must be embedded.
    pub fn compose_at(&self, at: usize) -> Result<Self, RelError> {
        if at + 1 >= self.relations.len() {
            return Err(RelError::BadPosition(at));
        }
        let (l, r) = (&self.relations[at], &self.relations[at + 1]);
        require_embedded(l, r)?;
        let mut relations = self.relations[..at].to_vec();
        relations.push(geometric_compose(l, r)?);
        relations.extend_from_slice(&self.relations[at + 2..]);
        Ok(RelationChain { source: self.source.clone(), relations })
    }

    fn factor_at(&self, at: usize, left: &FiniteRelation, right: &FiniteRelation) -> Result<Self, RelError> {
        let Some(cur) = self.relations.get(at) else {
            return Err(RelError::BadPosition(at));
        };
        require_embedded(left, right)?;
        if !geometric_compose(left, right)?.same_as(cur) {
            return Err(RelError::BadPosition(at));
        }
        let mut relations = self.relations[..at].to_vec();
        relations.push(left.clone());
        relations.push(right.clone());
        relations.extend_from_slice(&self.relations[at + 1..]);
        Ok(RelationChain { source: self.source.clone(), relations })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RelMove {
    /// Replace an embedded adjacent pair by its composite.
    Compose { at: usize },
    /// Replace a relation by a recorded embedded factorization.
    Factor { at: usize, left: FiniteRelation, right: FiniteRelation },
}

pub fn apply_rel_move(c: &RelationChain, m: &RelMove) -> Result<RelationChain, RelError> {
    match m {
        RelMove::Compose { at } => c.compose_at(*at),
        RelMove::Factor { at, left, right } => c.factor_at(*at, left, right),
    }
}

struct RelSearch {
    nodes: Vec<RelationChain>,
    parent: Vec<Option<(usize, usize)>>,
    index: HashMap<RelationChain, usize>,
    frontier: Vec<usize>,
}

impl RelSearch {
    fn new(root: &RelationChain) -> Self {
        let mut index = HashMap::new();
        index.insert(root.clone(), 0);
        RelSearch { nodes: vec![root.clone()], parent: vec![None], index, frontier: vec![0] }
    }

    fn expand(&mut self, other: &RelSearch) -> Option<(usize, usize)> {
        let layer: Vec<Vec<(usize, RelationChain)>> = self
            .frontier
            .par_iter()
            .map(|&i| {
                let c = &self.nodes[i];
                (0..c.len().saturating_sub(1)).filter_map(|at| c.compose_at(at).ok().map(|n| (at, n))).collect()
            })
            .collect();
        let mut next = Vec::new();
        let mut hit = None;
        for (&from, nbrs) in self.frontier.iter().zip(layer) {
            for (at, ch) in nbrs {
                if self.index.contains_key(&ch) {
                    continue;
                }
                let id = self.nodes.len();
                self.index.insert(ch.clone(), id);
                self.nodes.push(ch);
                self.parent.push(Some((from, at)));
                next.push(id);
                if hit.is_none() {
                    if let Some(&j) = other.index.get(&self.nodes[id]) {
                        hit = Some((id, j));
                    }
                }
            }
        }
        self.frontier = next;
        hit
    }

    fn path(&self, mut i: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        while let Some((p, at)) = self.parent[i] {
            out.push((p, at));
            i = p;
        }
        out.reverse();
        out
    }
}

/// Bounded search for composition/factorization moves from `c1` to `c2`. The
/// factorizations available are exactly the compositions met while searching
/// back from `c2`. `None` is not a proof that the chains are inequivalent.
pub fn chain_equivalent(
    c1: &RelationChain,
    c2: &RelationChain,
    depth: usize,
) -> Result<Option<Vec<RelMove>>, RelError> {
    if !same_variety(c1.source(), c2.source()) || !same_variety(c1.target(), c2.target()) {
        return Err(RelError::EndpointMismatch(
            format!("{} -> {}", c1.source().label(), c1.target().label()),
            format!("{} -> {}", c2.source().label(), c2.target().label()),
        ));
    }
    let mut fwd = RelSearch::new(c1);
    let mut bwd = RelSearch::new(c2);
    if fwd.index.contains_key(c2) {
        return Ok(Some(Vec::new()));
    }
    let mut meet = None;
    for step in 0..depth {
        let hit = if step % 2 == 0 { fwd.expand(&bwd) } else { bwd.expand(&fwd).map(|(j, i)| (i, j)) };
        if hit.is_some() {
            meet = hit;
            break;
        }
        if fwd.frontier.is_empty() && bwd.frontier.is_empty() {
            break;
        }
    }
    let Some((i, j)) = meet else {
        return Ok(None);
    };
    let mut moves: Vec<RelMove> = fwd.path(i).into_iter().map(|(_, at)| RelMove::Compose { at }).collect();
    for (p, at) in bwd.path(j).into_iter().rev() {
        let before = &bwd.nodes[p];
        moves.push(RelMove::Factor {
            at,
            left: before.relations[at].clone(),
            right: before.relations[at + 1].clone(),
        });
    }
    Ok(Some(moves))
}

/// Relations L_0, …, L_{k-1} with the target of each the source of the next,
/// closing up; node i is the source of L_i.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicChain {
    relations: Vec<FiniteRelation>,
}

impl CyclicChain {
    pub fn new(relations: Vec<FiniteRelation>) -> Result<Self, RelError> {
        let k = relations.len();
        if k == 0 {
            return Err(RelError::NotCyclic(0));
        }
        for i in 0..k {
            if !same_variety(relations[i].target(), relations[(i + 1) % k].source()) {
                return Err(RelError::NotCyclic(i));
            }
        }
        Ok(CyclicChain { relations })
    }

    /// Closes a chain whose target equals its source.
    pub fn close(chain: &RelationChain) -> Result<Self, RelError> {
        if chain.is_empty() {
            return Self::new(vec![FiniteRelation::diagonal(chain.source().clone())]);
        }
        Self::new(chain.relations().to_vec())
    }

    pub fn relations(&self) -> &[FiniteRelation] {
        &self.relations
    }

    pub fn len(&self) -> usize {
        self.relations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.relations.is_empty()
    }

    pub fn node(&self, i: usize) -> &Arc<RepVariety> {
        self.relations[i].source()
    }

    /// Node r becomes node 0.
    pub fn rotate(&self, r: usize) -> Self {
        let k = self.len();
        CyclicChain { relations: (0..k).map(|i| self.relations[(i + r) % k].clone()).collect() }
    }

    /// Replaces L_i, L_{i+1} by their composite, deleting node i+1. When
    /// i = k-1 the composite becomes the new L_0 and old node k-1 becomes node 0.
    pub fn contract(&self, i: usize) -> Result<Self, RelError> {
        let k = self.len();
        if k < 2 || i >= k {
            return Err(RelError::BadPosition(i));
        }
        let j = (i + 1) % k;
        let comp = geometric_compose(&self.relations[i], &self.relations[j])?;
        let relations = if j > i {
            let mut r = self.relations[..i].to_vec();
            r.push(comp);
            r.extend_from_slice(&self.relations[j + 1..]);
            r
        } else {
            let mut r = vec![comp];
            r.extend_from_slice(&self.relations[1..k - 1]);
            r
        };
        Ok(CyclicChain { relations })
    }

    /// Old node indices kept by `contract(i)`, in new-node order.
    pub fn contract_kept_nodes(&self, i: usize) -> Vec<usize> {
        let k = self.len();
        let j = (i + 1) % k;
        if j > i {
            (0..k).filter(|&n| n != j).collect()
        } else {
            std::iter::once(k - 1).chain(1..k - 1).collect()
        }
    }
}

/// All coherent tuples (m_0, …, m_{k-1}) of a cyclic chain, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratorSet {
    pub chain: CyclicChain,
    pub tuples: Vec<Vec<u32>>,
}

impl GeneratorSet {
    pub fn len(&self) -> usize {
        self.tuples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tuples.is_empty()
    }

    pub fn index_of(&self, t: &[u32]) -> Option<usize> {
        self.tuples.binary_search_by(|q| q.as_slice().cmp(t)).ok()
    }
}

pub fn generator_set(c: &CyclicChain, budget: u64) -> Result<GeneratorSet, RelError> {
    let k = c.len();
    let lists: Vec<Vec<Vec<u32>>> = c.relations.iter().map(FiniteRelation::forward_lists).collect();
    // crude bound on partial tuples visited
    let mut estimate: u128 = c.node(0).len() as u128;
    for l in &lists[..k - 1] {
        let deg = l.iter().map(Vec::len).max().unwrap_or(0).max(1);
        estimate = estimate.saturating_mul(deg as u128);
    }
    check_budget(estimate, budget)?;
    let last = &c.relations[k - 1];
    let chunks: Vec<Vec<Vec<u32>>> = (0..c.node(0).len() as u32)
        .into_par_iter()
        .map(|m0| {
            let mut out = Vec::new();
            let mut cur = vec![m0];
            extend(&lists, last, &mut cur, &mut out);
            out
        })
        .collect();
    let mut tuples: Vec<Vec<u32>> = chunks.into_iter().flatten().collect();
    tuples.sort();
    Ok(GeneratorSet { chain: c.clone(), tuples })
}

fn extend(lists: &[Vec<Vec<u32>>], last: &FiniteRelation, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
    let k = lists.len();
    let i = cur.len();
    if i == k {
        if last.contains(cur[k - 1] as usize, cur[0] as usize) {
            out.push(cur.clone());
        }
        return;
    }
    for &n in &lists[i - 1][cur[i - 1] as usize] {
        cur.push(n);
        extend(lists, last, cur, out);
        cur.pop();
    }
}

/// A bijection between two generator sets given by an index map.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenBijection {
    pub from: GeneratorSet,
    pub to: GeneratorSet,
    pub map: Vec<usize>,
}

impl GenBijection {
    /// Checks the map is a bijection between the stored sets.
    pub fn verify(&self) -> bool {
        if self.map.len() != self.from.len() || self.from.len() != self.to.len() {
            return false;
        }
        let mut seen = vec![false; self.to.len()];
        self.map.iter().all(|&j| j < seen.len() && !std::mem::replace(&mut seen[j], true))
    }

    pub fn inverse(&self) -> GenBijection {
        let mut inv = vec![0; self.map.len()];
        for (i, &j) in self.map.iter().enumerate() {
            inv[j] = i;
        }
        GenBijection { from: self.to.clone(), to: self.from.clone(), map: inv }
    }
}

/// Rotating a cyclic chain relabels tuples by the same rotation.
pub fn rotation_bijection(c: &CyclicChain, r: usize, budget: u64) -> Result<GenBijection, RelError> {
    let from = generator_set(c, budget)?;
    let to = generator_set(&c.rotate(r), budget)?;
    let k = c.len();
    let map = from
        .tuples
        .iter()
        .map(|t| {
            let rt: Vec<u32> = (0..k).map(|i| t[(i + r) % k]).collect();
            to.index_of(&rt).expect("rotated tuple is a generator")
        })
        .collect();
    Ok(GenBijection { from, to, map })
}

/// Dropping the intermediate coordinate of an embedded pair (i, i+1) maps the
/// generators bijectively onto those of the contracted chain.
pub fn composition_bijection(c: &CyclicChain, i: usize, budget: u64) -> Result<GenBijection, RelError> {
    let k = c.len();
    if k < 2 || i >= k {
        return Err(RelError::BadPosition(i));
    }
    require_embedded(&c.relations[i], &c.relations[(i + 1) % k])?;
    let from = generator_set(c, budget)?;
    let contracted = c.contract(i)?;
    let to = generator_set(&contracted, budget)?;
    let kept = c.contract_kept_nodes(i);
    let mut map = Vec::with_capacity(from.len());
    for t in &from.tuples {
        let img: Vec<u32> = kept.iter().map(|&n| t[n]).collect();
        match to.index_of(&img) {
            Some(j) => map.push(j),
            None => return Err(RelError::BadPosition(i)),
        }
    }
    let b = GenBijection { from, to, map };
    if !b.verify() {
        return Err(RelError::BadPosition(i));
    }
    Ok(b)
}

/// A finite piece of the relation 2-category: the given sets as objects, the
/// composition closure of `generators` together with the diagonals as
/// 1-cells, and inclusions between parallel relations as 2-cells.
pub fn relation_bicategory(
    objects: &[Arc<RepVariety>],
    generators: &[FiniteRelation],
    max_one: usize,
) -> Result<(FinBicategory, Vec<FiniteRelation>), RelError> {
    let obj = |v: &Arc<RepVariety>| {
        objects
            .iter()
            .position(|w| same_variety(v, w))
            .ok_or_else(|| RelError::EndpointMismatch(v.label().into(), "objects".into()))
    };
    let mut cells: Vec<FiniteRelation> = objects.iter().map(|v| FiniteRelation::diagonal(v.clone())).collect();
    let mut index: HashMap<(usize, usize, Vec<(u32, u32)>), usize> = HashMap::new();
    for (i, r) in cells.iter().enumerate() {
        index.insert((i, i, r.pairs().to_vec()), i);
    }
    let mut pending: Vec<FiniteRelation> = generators.to_vec();
    let mut done = 0;
    loop {
        for r in pending.drain(..) {
            let key = (obj(r.source())?, obj(r.target())?, r.pairs().to_vec());
            if let std::collections::hash_map::Entry::Vacant(e) = index.entry(key) {
                e.insert(cells.len());
                cells.push(r);
                if cells.len() > max_one {
                    return Err(RelError::ClosureLimit(max_one));
                }
            }
        }
        if done == cells.len() {
            break;
        }
        let n = cells.len();
        for i in 0..n {
            for j in 0..n {
                if (i >= done || j >= done) && same_variety(cells[i].target(), cells[j].source()) {
                    pending.push(geometric_compose(&cells[i], &cells[j])?);
                }
            }
        }
        done = n;
    }
    let ends: Vec<(usize, usize)> =
        cells.iter().map(|r| Ok((obj(r.source())?, obj(r.target())?))).collect::<Result<_, RelError>>()?;
    let lookup = |r: &FiniteRelation| index[&(obj(r.source()).unwrap(), obj(r.target()).unwrap(), r.pairs().to_vec())];
    let subset = |a: &FiniteRelation, b: &FiniteRelation| a.pairs().iter().all(|p| b.contains(p.0 as usize, p.1 as usize));
    let n1 = cells.len();
    let mut two = Vec::new();
    let mut two_index = HashMap::new();
    for i in 0..n1 {
        for j in 0..n1 {
            if ends[i] == ends[j] && subset(&cells[i], &cells[j]) {
                two_index.insert((i, j), two.len());
                two.push((i, j));
            }
        }
    }
    let mut vertical = Vec::new();
    let mut h2 = Vec::new();
    for (a, &(i, j)) in two.iter().enumerate() {
        for (b, &(k, l)) in two.iter().enumerate() {
            if j == k {
                vertical.push([a, b, two_index[&(i, l)]]);
            }
            if ends[i].1 == ends[k].0 {
                let s = lookup(&geometric_compose(&cells[i], &cells[k])?);
                let t = lookup(&geometric_compose(&cells[j], &cells[l])?);
                h2.push([a, b, two_index[&(s, t)]]);
            }
        }
    }
    let mut h1 = Vec::new();
    for i in 0..n1 {
        for j in 0..n1 {
            if ends[i].1 == ends[j].0 {
                h1.push([i, j, lookup(&geometric_compose(&cells[i], &cells[j])?)]);
            }
        }
    }
    let file = BicategoryFile {
        objects: objects.iter().map(|v| v.label().to_string()).collect(),
        one_cells: (0..n1).map(|i| Arrow { name: format!("R{i}"), source: ends[i].0, target: ends[i].1 }).collect(),
        two_cells: two
            .iter()
            .enumerate()
            .map(|(a, &(i, j))| Cell2 { name: format!("R{i}<=R{j}#{a}"), source: i, target: j })
            .collect(),
        identity_two_cells: (0..n1).map(|i| two_index[&(i, i)]).collect(),
        units: (0..objects.len()).collect(),
        vertical,
        horizontal_one: h1,
        horizontal_two: h2,
    };
    let b = FinBicategory::from_file(file).expect("indices are in range by construction");
    Ok((b, cells))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(n: usize, label: &str) -> Arc<RepVariety> {
        Arc::new(RepVariety::abstract_set(label, n))
    }

    fn rel(a: &Arc<RepVariety>, b: &Arc<RepVariety>, pairs: &[(usize, usize)]) -> FiniteRelation {
        FiniteRelation::new(a.clone(), b.clone(), pairs.iter().copied()).unwrap()
    }

    #[test]
    fn diagonal_is_unit_and_embedded() {
        let a = set(3, "A");
        let b = set(2, "B");
        let l = rel(&a, &b, &[(0, 1), (1, 1), (2, 0)]);
        let d = FiniteRelation::diagonal(b.clone());
        assert!(geometric_compose(&l, &d).unwrap().same_as(&l));
        assert!(is_embedded(&l, &d).unwrap().embedded);
        assert!(is_embedded(&FiniteRelation::diagonal(a.clone()), &l).unwrap().embedded);
    }

    #[test]
    fn doubled_relation_is_not_embedded() {
        let a = set(2, "A");
        let l = rel(&a, &a, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        let e = is_embedded(&l, &l.transpose()).unwrap();
        assert!(!e.embedded);
        assert_eq!(e.witness, Some((0, 0, 1, 0)));
    }

    #[test]
    fn mismatched_endpoints() {
        let a = set(2, "A");
        let b = set(2, "B");
        let l = rel(&a, &b, &[(0, 0)]);
        assert!(geometric_compose(&l, &l).is_err());
    }

    #[test]
    fn chain_search_removes_a_diagonal() {
        let a = set(3, "A");
        let l = rel(&a, &a, &[(0, 1), (1, 2)]);
        let c1 = RelationChain::new(vec![l.clone(), FiniteRelation::diagonal(a.clone())]).unwrap();
        let c2 = RelationChain::new(vec![l.clone()]).unwrap();
        let path = chain_equivalent(&c1, &c2, 3).unwrap().unwrap();
        assert_eq!(path, vec![RelMove::Compose { at: 0 }]);
        assert_eq!(chain_equivalent(&c1, &c1, 0).unwrap(), Some(vec![]));
        // and back by factoring
        let back = chain_equivalent(&c2, &c1, 3).unwrap().unwrap();
        let mut cur = c2.clone();
        for m in &back {
            cur = apply_rel_move(&cur, m).unwrap();
        }
        assert_eq!(cur, c1);
    }

    #[test]
    fn generators_of_diagonal_cycle() {
        let a = set(4, "A");
        let c = CyclicChain::new(vec![FiniteRelation::diagonal(a.clone()); 3]).unwrap();
        let g = generator_set(&c, 1000).unwrap();
        assert_eq!(g.len(), 4);
        assert!(g.tuples.iter().all(|t| t[0] == t[1] && t[1] == t[2]));
        let b = composition_bijection(&c, 2, 1000).unwrap();
        assert!(b.verify());
        let r = rotation_bijection(&c, 1, 1000).unwrap();
        assert!(r.verify());
    }

    #[test]
    fn contraction_at_the_seam() {
        let a = set(2, "A");
        let b = set(3, "B");
        let f = rel(&a, &b, &[(0, 2), (1, 0)]);
        let g = rel(&b, &a, &[(0, 1), (2, 0), (1, 1)]);
        let c = CyclicChain::new(vec![f, g]).unwrap();
        for i in 0..2 {
            let bij = composition_bijection(&c, i, 1000).unwrap();
            assert_eq!(bij.from.len(), 2);
        }
    }
}
