//! Representation varieties Hom(π₁Σ_g, G)/G for finite G and the relations
//! that simple cobordisms induce between them.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{AlgebraError, Elem, FiniteGroup, SurfaceAutomorphism};
use crate::bordism::{AttachingCircle, BordObject, SimpleCobordism};
use crate::config::{check_budget, pow_estimate, ResourceLimit, DEFAULT_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RepError {
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("relation endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("pair index out of range: ({0}, {1})")]
    BadPair(usize, usize),
}

/// A finite set of canonical tuples. Varieties built from a group carry the
/// bordism object they came from; abstract ones only a label.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RepVariety {
    label: String,
    object: Option<BordObject>,
    points: Vec<Vec<Elem>>,
}

impl fmt::Debug for RepVariety {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RepVariety({}, {} points)", self.label, self.points.len())
    }
}

impl RepVariety {
    /// An arbitrary finite set; points are sorted and deduplicated.
    pub fn from_points(label: impl Into<String>, mut points: Vec<Vec<Elem>>) -> Self {
        points.sort();
        points.dedup();
        RepVariety { label: label.into(), object: None, points }
    }

    /// {0, …, n-1} as one-coordinate points.
    pub fn abstract_set(label: impl Into<String>, n: usize) -> Self {
        Self::from_points(label, (0..n as Elem).map(|i| vec![i]).collect())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn object(&self) -> Option<BordObject> {
        self.object
    }

    pub fn points(&self) -> &[Vec<Elem>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn index_of(&self, p: &[Elem]) -> Option<usize> {
        self.points.binary_search_by(|q| q.as_slice().cmp(p)).ok()
    }
}

pub fn same_variety(x: &Arc<RepVariety>, y: &Arc<RepVariety>) -> bool {
    Arc::ptr_eq(x, y) || x == y
}

/// A relation between two varieties stored as sorted, deduplicated index pairs.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FiniteRelation {
    source: Arc<RepVariety>,
    target: Arc<RepVariety>,
    pairs: Vec<(u32, u32)>,
}

impl fmt::Debug for FiniteRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Relation({} -> {}, {:?})", self.source.label, self.target.label, self.pairs)
    }
}

impl FiniteRelation {
    pub fn new(
        source: Arc<RepVariety>,
        target: Arc<RepVariety>,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, RepError> {
        let mut out = Vec::new();
        for (x, y) in pairs {
            if x >= source.len() || y >= target.len() {
                return Err(RepError::BadPair(x, y));
            }
            out.push((x as u32, y as u32));
        }
        out.sort_unstable();
        out.dedup();
        Ok(FiniteRelation { source, target, pairs: out })
    }

    pub(crate) fn from_sorted(source: Arc<RepVariety>, target: Arc<RepVariety>, pairs: Vec<(u32, u32)>) -> Self {
        debug_assert!(pairs.windows(2).all(|w| w[0] < w[1]));
        FiniteRelation { source, target, pairs }
    }

    pub fn diagonal(v: Arc<RepVariety>) -> Self {
        let pairs = (0..v.len() as u32).map(|i| (i, i)).collect();
        FiniteRelation { source: v.clone(), target: v, pairs }
    }

    pub fn source(&self) -> &Arc<RepVariety> {
        &self.source
    }

    pub fn target(&self) -> &Arc<RepVariety> {
        &self.target
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.binary_search(&(x as u32, y as u32)).is_ok()
    }

    pub fn transpose(&self) -> Self {
        let mut pairs: Vec<(u32, u32)> = self.pairs.iter().map(|&(x, y)| (y, x)).collect();
        pairs.sort_unstable();
        FiniteRelation { source: self.target.clone(), target: self.source.clone(), pairs }
    }

    /// Targets related to source point x.
    pub fn image(&self, x: usize) -> impl Iterator<Item = usize> + '_ {
        let start = self.pairs.partition_point(|&(a, _)| (a as usize) < x);
        self.pairs[start..].iter().take_while(move |&&(a, _)| a as usize == x).map(|&(_, b)| b as usize)
    }

    /// Adjacency lists from source points.
    pub fn forward_lists(&self) -> Vec<Vec<u32>> {
        let mut out = vec![Vec::new(); self.source.len()];
        for &(x, y) in &self.pairs {
            out[x as usize].push(y);
        }
        out
    }

    /// Some(f) when the relation is the graph of a bijection.
    pub fn as_bijection(&self) -> Option<Vec<usize>> {
        if self.source.len() != self.target.len() || self.pairs.len() != self.source.len() {
            return None;
        }
        let mut f = vec![usize::MAX; self.source.len()];
        let mut hit = vec![false; self.target.len()];
        for &(x, y) in &self.pairs {
            if f[x as usize] != usize::MAX || hit[y as usize] {
                return None;
            }
            f[x as usize] = y as usize;
            hit[y as usize] = true;
        }
        Some(f)
    }

    /// Set equality including endpoints.
    pub fn same_as(&self, other: &FiniteRelation) -> bool {
        same_variety(&self.source, &other.source)
            && same_variety(&self.target, &other.target)
            && self.pairs == other.pairs
    }
}

/// Lexicographically least tuple among the simultaneous conjugates.
pub fn canonical(g: &FiniteGroup, t: &[Elem]) -> Vec<Elem> {
    let mut best = t.to_vec();
    let mut cand = vec![0; t.len()];
    for h in 1..g.order() as Elem {
        let mut ord = std::cmp::Ordering::Equal;
        for (k, &x) in t.iter().enumerate() {
            let y = g.conj(h, x);
            cand[k] = y;
            if ord.is_eq() {
                ord = y.cmp(&best[k]);
                if ord.is_gt() {
                    break;
                }
            }
        }
        if ord.is_lt() {
            best.copy_from_slice(&cand);
        }
    }
    best
}

/// ∏ [A_i, B_i] for a tuple (A₁, B₁, …).
pub fn relator_value(g: &FiniteGroup, t: &[Elem]) -> Elem {
    t.chunks(2).fold(0, |acc, h| g.mul(acc, g.commutator(h[0], h[1])))
}

fn odometer(t: &mut [Elem], n: Elem) -> bool {
    for x in t.iter_mut().rev() {
        *x += 1;
        if *x < n {
            return true;
        }
        *x = 0;
    }
    false
}

/// All homomorphisms π₁Σ_g → G as tuples, in lexicographic order.
pub fn hom_tuples(g: &FiniteGroup, genus: usize, budget: u64) -> Result<Vec<Vec<Elem>>, ResourceLimit> {
    check_budget(pow_estimate(g.order(), 2 * genus), budget)?;
    if genus == 0 {
        return Ok(vec![Vec::new()]);
    }
    let n = g.order() as Elem;
    let out: Vec<Vec<Vec<Elem>>> = (0..n * n)
        .into_par_iter()
        .map(|ab| {
            let mut local = Vec::new();
            let mut rest = vec![0; 2 * genus - 2];
            let head = [ab / n, ab % n];
            loop {
                let t: Vec<Elem> = head.iter().chain(&rest).copied().collect();
                if relator_value(g, &t) == 0 {
                    local.push(t);
                }
                if !odometer(&mut rest, n) {
                    break;
                }
            }
            local
        })
        .collect();
    Ok(out.into_iter().flatten().collect())
}

pub fn variety_label(g: &FiniteGroup, obj: BordObject) -> String {
    format!("{}:{}", g.name(), obj)
}

/// The canonical points of Hom(π₁Σ_g, G)/G. Empty and Σ₀ give one point.
pub fn repvariety(g: &FiniteGroup, obj: BordObject, budget: u64) -> Result<RepVariety, ResourceLimit> {
    let genus = match obj {
        BordObject::Empty | BordObject::Surface(0) => {
            return Ok(RepVariety { label: variety_label(g, obj), object: Some(obj), points: vec![Vec::new()] })
        }
        BordObject::Surface(k) => k,
    };
    check_budget(pow_estimate(g.order(), 2 * genus), budget)?;
    let n = g.order() as Elem;
    // first coordinate of a canonical tuple is the least element of its class
    let heads: Vec<(Elem, Elem)> = g
        .classes()
        .iter()
        .flat_map(|c| (0..n).map(move |b| (c[0], b)))
        .collect();
    let chunks: Vec<Vec<Vec<Elem>>> = heads
        .into_par_iter()
        .map(|(a1, b1)| {
            let mut local = Vec::new();
            let mut rest = vec![0; 2 * genus - 2];
            let first = g.commutator(a1, b1);
            loop {
                let mut t = Vec::with_capacity(2 * genus);
                t.push(a1);
                t.push(b1);
                t.extend_from_slice(&rest);
                if g.mul(first, relator_value(g, &rest)) == 0 && canonical(g, &t) == t {
                    local.push(t);
                }
                if !odometer(&mut rest, n) {
                    break;
                }
            }
            local
        })
        .collect();
    let mut points: Vec<Vec<Elem>> = chunks.into_iter().flatten().collect();
    points.sort();
    Ok(RepVariety { label: variety_label(g, obj), object: Some(obj), points })
}

/// A group together with cached varieties and an enumeration budget.
pub struct RepContext {
    group: Arc<FiniteGroup>,
    budget: u64,
    cache: Mutex<HashMap<BordObject, Arc<RepVariety>>>,
}

impl RepContext {
    pub fn new(group: FiniteGroup) -> Self {
        Self::with_budget(group, DEFAULT_BUDGET)
    }

    pub fn with_budget(group: FiniteGroup, budget: u64) -> Self {
        RepContext { group: Arc::new(group), budget, cache: Mutex::new(HashMap::new()) }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn variety(&self, obj: BordObject) -> Result<Arc<RepVariety>, RepError> {
        if let Some(v) = self.cache.lock().unwrap().get(&obj) {
            return Ok(v.clone());
        }
        let v = Arc::new(repvariety(&self.group, obj, self.budget)?);
        Ok(self.cache.lock().unwrap().entry(obj).or_insert(v).clone())
    }

    fn genus_variety(&self, genus: usize) -> Result<Arc<RepVariety>, RepError> {
        self.variety(BordObject::Surface(genus))
    }

    fn locate(&self, v: &RepVariety, t: &[Elem]) -> usize {
        let c = canonical(&self.group, t);
        v.index_of(&c).expect("tuple satisfies the relator")
    }

    /// Graph of [ρ] ↦ [ρ∘φ⁻¹].
    pub fn relation_of_cyl(&self, phi: &SurfaceAutomorphism) -> Result<FiniteRelation, RepError> {
        let v = self.genus_variety(phi.genus())?;
        let g = &*self.group;
        let mut pairs: Vec<(u32, u32)> = v
            .points()
            .par_iter()
            .enumerate()
            .map(|(i, rho)| {
                let img: Vec<Elem> = phi.inverse_images().iter().map(|w| w.eval_unchecked(rho, g)).collect();
                (i as u32, self.locate(&v, &img) as u32)
            })
            .collect();
        pairs.sort_unstable();
        Ok(FiniteRelation::from_sorted(v.clone(), v, pairs))
    }

    /// Pairs ([σ∘ψ⁻¹], [σ|handles ≥ 2]) over σ with σ(a₁) = e.
    pub fn relation_of_attach2(&self, circle: &AttachingCircle) -> Result<FiniteRelation, RepError> {
        let genus = circle.genus();
        let psi = circle.transport();
        check_budget(pow_estimate(self.group.order(), 2 * genus - 1), self.budget)?;
        let src = self.genus_variety(genus)?;
        let tgt = self.genus_variety(genus - 1)?;
        let g = &*self.group;
        let n = g.order() as Elem;
        let chunks: Vec<Vec<(u32, u32)>> = (0..n)
            .into_par_iter()
            .map(|b1| {
                let mut local = Vec::new();
                let mut rest = vec![0; 2 * genus - 2];
                loop {
                    if relator_value(g, &rest) == 0 {
                        let mut sigma = vec![0, b1];
                        sigma.extend_from_slice(&rest);
                        if canonical(g, &sigma) == sigma {
                            let rho: Vec<Elem> =
                                psi.inverse_images().iter().map(|w| w.eval_unchecked(&sigma, g)).collect();
                            local.push((self.locate(&src, &rho) as u32, self.locate(&tgt, &rest) as u32));
                        }
                    }
                    if !odometer(&mut rest, n) {
                        break;
                    }
                }
                local
            })
            .collect();
        let mut pairs: Vec<(u32, u32)> = chunks.into_iter().flatten().collect();
        pairs.sort_unstable();
        pairs.dedup();
        Ok(FiniteRelation::from_sorted(src, tgt, pairs))
    }

    /// Same relation by the direct definition: ρ(ψ(a₁)) = e, ρ′ = (ρ(ψ(a_i)), ρ(ψ(b_i)))_{i≥2}.
    pub fn relation_of_attach2_direct(&self, circle: &AttachingCircle) -> Result<FiniteRelation, RepError> {
        let genus = circle.genus();
        let psi = circle.transport();
        let src = self.genus_variety(genus)?;
        let tgt = self.genus_variety(genus - 1)?;
        let g = &*self.group;
        let mut pairs: Vec<(u32, u32)> = src
            .points()
            .par_iter()
            .enumerate()
            .filter(|(_, rho)| psi.images()[0].eval_unchecked(rho, g) == 0)
            .map(|(i, rho)| {
                let rest: Vec<Elem> = psi.images()[2..].iter().map(|w| w.eval_unchecked(rho, g)).collect();
                (i as u32, self.locate(&tgt, &rest) as u32)
            })
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        Ok(FiniteRelation::from_sorted(src, tgt, pairs))
    }

    pub fn relation_of_simple(&self, s: &SimpleCobordism) -> Result<FiniteRelation, RepError> {
        match s {
            SimpleCobordism::Cyl(phi) => self.relation_of_cyl(phi),
            SimpleCobordism::Attach2(c) => self.relation_of_attach2(c),
            SimpleCobordism::Attach1(c) => Ok(self.relation_of_attach2(c)?.transpose()),
            SimpleCobordism::Cap3 | SimpleCobordism::Cap0 => {
                let src = self.variety(s.source())?;
                let tgt = self.variety(s.target())?;
                Ok(FiniteRelation::from_sorted(src, tgt, vec![(0, 0)]))
            }
        }
    }

    /// Checks that ρ ↦ ρ∘φ⁻¹ permutes Hom(π₁Σ_g, G) with inverse ρ ↦ ρ∘φ.
    pub fn verify_action(&self, phi: &SurfaceAutomorphism) -> Result<(), String> {
        let g = &*self.group;
        let homs = hom_tuples(g, phi.genus(), self.budget).map_err(|e| e.to_string())?;
        for rho in &homs {
            let fwd: Vec<Elem> = phi.inverse_images().iter().map(|w| w.eval_unchecked(rho, g)).collect();
            if relator_value(g, &fwd) != 0 {
                return Err(format!("{rho:?} is sent outside Hom"));
            }
            let back: Vec<Elem> = phi.images().iter().map(|w| w.eval_unchecked(&fwd, g)).collect();
            if &back != rho {
                return Err(format!("{rho:?} does not return to itself"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn burnside_commuting_pairs(g: &FiniteGroup) -> usize {
        // (1/|G|) Σ_h #{(a,b) commuting, fixed by h}
        let mut total = 0;
        for h in g.elements() {
            for a in g.elements() {
                for b in g.elements() {
                    if g.commutator(a, b) == 0 && g.conj(h, a) == a && g.conj(h, b) == b {
                        total += 1;
                    }
                }
            }
        }
        total / g.order()
    }

    #[test]
    fn variety_sizes() {
        let s3 = FiniteGroup::symmetric(3);
        let v = repvariety(&s3, BordObject::Surface(1), DEFAULT_BUDGET).unwrap();
        assert_eq!(v.len(), burnside_commuting_pairs(&s3));
        assert_eq!(v.len(), 8);
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(repvariety(&z2, BordObject::Surface(2), DEFAULT_BUDGET).unwrap().len(), 16);
        assert_eq!(repvariety(&s3, BordObject::Empty, DEFAULT_BUDGET).unwrap().len(), 1);
        assert_eq!(repvariety(&s3, BordObject::Surface(0), DEFAULT_BUDGET).unwrap().len(), 1);
    }

    #[test]
    fn budget_is_enforced_up_front() {
        let s4 = FiniteGroup::symmetric(4);
        let err = repvariety(&s4, BordObject::Surface(3), 1000).unwrap_err();
        assert_eq!(err.budget, 1000);
    }

    #[test]
    fn cylinder_relations() {
        let ctx = RepContext::new(FiniteGroup::cyclic(4));
        let d = ctx.relation_of_cyl(&SurfaceAutomorphism::identity(1)).unwrap();
        assert!(d.same_as(&FiniteRelation::diagonal(ctx.variety(BordObject::Surface(1)).unwrap())));
        let t = ctx.relation_of_cyl(&SurfaceAutomorphism::t_move()).unwrap();
        let f = t.as_bijection().unwrap();
        let v = ctx.variety(BordObject::Surface(1)).unwrap();
        assert_eq!(v.len(), 16);
        // T⁻¹ sends b to b a⁻¹
        let z4 = ctx.group();
        for (i, p) in v.points().iter().enumerate() {
            let q = &v.points()[f[i]];
            assert_eq!(q[0], p[0]);
            assert_eq!(q[1], z4.mul(p[1], z4.inv(p[0])));
        }
    }

    #[test]
    fn attach2_on_torus_over_z2() {
        let ctx = RepContext::new(FiniteGroup::cyclic(2));
        let r = ctx.relation_of_attach2(&AttachingCircle::canonical(1)).unwrap();
        assert_eq!(r.len(), 2);
        let v = r.source();
        for &(x, y) in r.pairs() {
            assert_eq!(v.points()[x as usize][0], 0);
            assert_eq!(y, 0);
        }
    }

    #[test]
    fn attach2_along_b1_kills_b() {
        let ctx = RepContext::new(FiniteGroup::symmetric(3));
        let c = AttachingCircle::new(SurfaceAutomorphism::s_move(1, 1)).unwrap();
        let r = ctx.relation_of_attach2(&c).unwrap();
        let v = r.source();
        let support: Vec<&Vec<Elem>> = r.pairs().iter().map(|&(x, _)| &v.points()[x as usize]).collect();
        assert_eq!(support.len(), 3);
        assert!(support.iter().all(|p| p[1] == 0));
        assert!(r.same_as(&ctx.relation_of_attach2_direct(&c).unwrap()));
    }

    #[test]
    fn action_check_on_library() {
        let ctx = RepContext::new(FiniteGroup::symmetric(3));
        for g in 1..=2 {
            for (_, phi) in SurfaceAutomorphism::library(g) {
                ctx.verify_action(&phi).unwrap();
            }
        }
    }
}
