//! Finite table-driven categories, functors, natural transformations and
//! bicategories, with the Yoneda construction and the quotient by invertible
//! 2-cells.
//!
//! Composition is written in diagrammatic order throughout: `compose(f, g)`
//! is "f, then g" and requires `target(f) == source(g)`.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::report::CheckEntry;

const NONE: u32 = u32::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
pub enum CatError {
    #[error("index {0} out of range")]
    OutOfRange(usize),
    #[error("composite of {f} and {g} is defined but their endpoints do not match")]
    Spurious { f: usize, g: usize },
    #[error("composite of {f} and {g} is missing")]
    Missing { f: usize, g: usize },
    #[error("composite of {f} and {g} has the wrong endpoints")]
    Endpoints { f: usize, g: usize },
    #[error("identity of object {0} is not an endomorphism of it")]
    BadIdentity(usize),
    #[error("identity law fails for morphism {0}")]
    IdentityLaw(usize),
    #[error("associativity fails for ({f}, {g}, {h})")]
    Associativity { f: usize, g: usize, h: usize },
    #[error("functor does not preserve the endpoints of morphism {0}")]
    FunctorEndpoints(usize),
    #[error("functor does not preserve the identity of object {0}")]
    FunctorIdentity(usize),
    #[error("functor does not preserve the composite of {f} and {g}")]
    FunctorComposition { f: usize, g: usize },
    #[error("component at object {0} has the wrong endpoints")]
    ComponentEndpoints(usize),
    #[error("naturality square fails for morphism {0}")]
    Naturality(usize),
    #[error("the middle functors differ")]
    MiddleMismatch,
    #[error("categories do not match")]
    CategoryMismatch,
    #[error("object {0} does not exist")]
    InvalidObject(usize),
    #[error("horizontal composite of 2-cells {a} and {b} is missing")]
    MissingHorizontal { a: usize, b: usize },
    #[error("horizontal composite of 2-cells {a} and {b} has the wrong endpoints")]
    HorizontalEndpoints { a: usize, b: usize },
    #[error("horizontal composite of the identities on {f} and {g} is not an identity")]
    HorizontalIdentity { f: usize, g: usize },
    #[error("interchange fails for ({a} ; {a2}) against ({b} ; {b2})")]
    Interchange { a: usize, a2: usize, b: usize, b2: usize },
    #[error("({f} {g}) {h} and {f} ({g} {h}) are not isomorphic")]
    HorizontalAssociativity { f: usize, g: usize, h: usize },
    #[error("weak unit of object {x} is not a unit for {f}")]
    Unit { x: usize, f: usize },
    #[error("ill-formed quotient: [{f}] = [{f2}] and [{g}] = [{g2}] but [{f} {g}] != [{f2} {g2}]")]
    IllFormedQuotient { f: usize, g: usize, f2: usize, g2: usize },
    #[error("enumeration limit {0} exceeded")]
    Limit(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    morphisms: Vec<Arrow>,
    identity: Vec<usize>,
    table: Vec<u32>,
    homs: Vec<Vec<usize>>,
}

/// JSON form of a category: composites are `[f, g, f;g]` triples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryFile {
    pub objects: Vec<String>,
    pub morphisms: Vec<Arrow>,
    pub identity: Vec<usize>,
    pub compose: Vec<[usize; 3]>,
}

impl FinCategory {
    /// Builds the tables; only index ranges are checked here, the laws by [`FinCategory::validate`].
    pub fn new(
        objects: Vec<String>,
        morphisms: Vec<Arrow>,
        identity: Vec<usize>,
        composites: &[[usize; 3]],
    ) -> Result<Self, CatError> {
        let n = objects.len();
        let m = morphisms.len();
        for a in &morphisms {
            if a.source >= n || a.target >= n {
                return Err(CatError::OutOfRange(a.source.max(a.target)));
            }
        }
        if identity.len() != n {
            return Err(CatError::OutOfRange(identity.len()));
        }
        if let Some(&i) = identity.iter().find(|&&i| i >= m) {
            return Err(CatError::OutOfRange(i));
        }
        let mut table = vec![NONE; m * m];
        for &[f, g, h] in composites {
            if f >= m || g >= m || h >= m {
                return Err(CatError::OutOfRange(f.max(g).max(h)));
            }
            table[f * m + g] = h as u32;
        }
        let mut homs = vec![Vec::new(); n * n];
        for (i, a) in morphisms.iter().enumerate() {
            homs[a.source * n + a.target].push(i);
        }
        Ok(FinCategory { objects, morphisms, identity, table, homs })
    }

    fn from_fn(
        objects: Vec<String>,
        morphisms: Vec<Arrow>,
        identity: Vec<usize>,
        compose: impl Fn(usize, usize) -> Option<usize>,
    ) -> Self {
        let m = morphisms.len();
        let mut triples = Vec::new();
        for f in 0..m {
            for g in 0..m {
                if morphisms[f].target == morphisms[g].source {
                    if let Some(h) = compose(f, g) {
                        triples.push([f, g, h]);
                    }
                }
            }
        }
        FinCategory::new(objects, morphisms, identity, &triples).expect("indices in range")
    }

    pub fn from_file(f: CategoryFile) -> Result<Self, CatError> {
        FinCategory::new(f.objects, f.morphisms, f.identity, &f.compose)
    }

    pub fn to_file(&self) -> CategoryFile {
        let m = self.morphisms.len();
        let compose = (0..m * m)
            .filter(|&k| self.table[k] != NONE)
            .map(|k| [k / m, k % m, self.table[k] as usize])
            .collect();
        CategoryFile {
            objects: self.objects.clone(),
            morphisms: self.morphisms.clone(),
            identity: self.identity.clone(),
            compose,
        }
    }

    pub fn object_count(&self) -> usize {
        self.objects.len()
    }

    pub fn morphism_count(&self) -> usize {
        self.morphisms.len()
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn morphisms(&self) -> &[Arrow] {
        &self.morphisms
    }

    pub fn source(&self, f: usize) -> usize {
        self.morphisms[f].source
    }

    pub fn target(&self, f: usize) -> usize {
        self.morphisms[f].target
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn is_identity(&self, f: usize) -> bool {
        self.identity[self.source(f)] == f
    }

    pub fn hom(&self, x: usize, y: usize) -> &[usize] {
        &self.homs[x * self.objects.len() + y]
    }

    pub fn compose(&self, f: usize, g: usize) -> Option<usize> {
        let h = self.table[f * self.morphisms.len() + g];
        (h != NONE).then_some(h as usize)
    }

    pub fn is_invertible(&self, f: usize) -> bool {
        self.hom(self.target(f), self.source(f)).iter().any(|&g| {
            self.compose(f, g) == Some(self.identity(self.source(f)))
                && self.compose(g, f) == Some(self.identity(self.target(f)))
        })
    }

    pub fn validate(&self) -> Result<(), CatError> {
        let m = self.morphisms.len();
        for (x, &i) in self.identity.iter().enumerate() {
            if self.source(i) != x || self.target(i) != x {
                return Err(CatError::BadIdentity(x));
            }
        }
        for f in 0..m {
            for g in 0..m {
                let matching = self.target(f) == self.source(g);
                match (self.compose(f, g), matching) {
                    (Some(_), false) => return Err(CatError::Spurious { f, g }),
                    (None, true) => return Err(CatError::Missing { f, g }),
                    (Some(h), true) if self.source(h) != self.source(f) || self.target(h) != self.target(g) => {
                        return Err(CatError::Endpoints { f, g })
                    }
                    _ => {}
                }
            }
        }
        for f in 0..m {
            if self.compose(self.identity(self.source(f)), f) != Some(f)
                || self.compose(f, self.identity(self.target(f))) != Some(f)
            {
                return Err(CatError::IdentityLaw(f));
            }
        }
        let bad = (0..m)
            .into_par_iter()
            .find_map_first(|f| {
                for &g in self.outgoing(self.target(f)) {
                    let fg = self.compose(f, g).unwrap();
                    for &h in self.outgoing(self.target(g)) {
                        let gh = self.compose(g, h).unwrap();
                        if self.compose(fg, h) != self.compose(f, gh) {
                            return Some(CatError::Associativity { f, g, h });
                        }
                    }
                }
                None
            });
        bad.map_or(Ok(()), Err)
    }

    fn outgoing(&self, x: usize) -> impl Iterator<Item = &usize> + '_ {
        let n = self.objects.len();
        (0..n).flat_map(move |y| self.hom(x, y).iter())
    }
}

#[derive(Debug, Clone)]
pub struct FinFunctor {
    pub source: Arc<FinCategory>,
    pub target: Arc<FinCategory>,
    pub ob: Vec<usize>,
    pub mor: Vec<usize>,
}

fn same_category(a: &Arc<FinCategory>, b: &Arc<FinCategory>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

impl PartialEq for FinFunctor {
    fn eq(&self, other: &Self) -> bool {
        self.ob == other.ob
            && self.mor == other.mor
            && same_category(&self.source, &other.source)
            && same_category(&self.target, &other.target)
    }
}

impl FinFunctor {
    pub fn identity(c: &Arc<FinCategory>) -> Self {
        FinFunctor {
            source: c.clone(),
            target: c.clone(),
            ob: (0..c.object_count()).collect(),
            mor: (0..c.morphism_count()).collect(),
        }
    }

    pub fn constant(c: &Arc<FinCategory>, d: &Arc<FinCategory>, x: usize) -> Self {
        FinFunctor {
            source: c.clone(),
            target: d.clone(),
            ob: vec![x; c.object_count()],
            mor: vec![d.identity(x); c.morphism_count()],
        }
    }

    pub fn validate(&self) -> Result<(), CatError> {
        let (c, d) = (&self.source, &self.target);
        if self.ob.len() != c.object_count() || self.mor.len() != c.morphism_count() {
            return Err(CatError::CategoryMismatch);
        }
        if let Some(&x) = self.ob.iter().find(|&&x| x >= d.object_count()) {
            return Err(CatError::OutOfRange(x));
        }
        if let Some(&f) = self.mor.iter().find(|&&f| f >= d.morphism_count()) {
            return Err(CatError::OutOfRange(f));
        }
        for f in 0..c.morphism_count() {
            let img = self.mor[f];
            if d.source(img) != self.ob[c.source(f)] || d.target(img) != self.ob[c.target(f)] {
                return Err(CatError::FunctorEndpoints(f));
            }
        }
        for x in 0..c.object_count() {
            if self.mor[c.identity(x)] != d.identity(self.ob[x]) {
                return Err(CatError::FunctorIdentity(x));
            }
        }
        for f in 0..c.morphism_count() {
            for &g in c.outgoing(c.target(f)) {
                let fg = c.compose(f, g).unwrap();
                if d.compose(self.mor[f], self.mor[g]) != Some(self.mor[fg]) {
                    return Err(CatError::FunctorComposition { f, g });
                }
            }
        }
        Ok(())
    }

    /// `self`, then `other`.
    pub fn then(&self, other: &FinFunctor) -> Result<FinFunctor, CatError> {
        if !same_category(&self.target, &other.source) {
            return Err(CatError::CategoryMismatch);
        }
        Ok(FinFunctor {
            source: self.source.clone(),
            target: other.target.clone(),
            ob: self.ob.iter().map(|&x| other.ob[x]).collect(),
            mor: self.mor.iter().map(|&f| other.mor[f]).collect(),
        })
    }

    fn key(&self) -> (Vec<usize>, Vec<usize>) {
        (self.ob.clone(), self.mor.clone())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NatTransformation {
    pub source: FinFunctor,
    pub target: FinFunctor,
    pub components: Vec<usize>,
}

impl NatTransformation {
    pub fn identity(f: &FinFunctor) -> Self {
        NatTransformation {
            source: f.clone(),
            target: f.clone(),
            components: f.ob.iter().map(|&x| f.target.identity(x)).collect(),
        }
    }

    pub fn validate(&self) -> Result<(), CatError> {
        let (f, g) = (&self.source, &self.target);
        if !same_category(&f.source, &g.source) || !same_category(&f.target, &g.target) {
            return Err(CatError::CategoryMismatch);
        }
        let (c, d) = (&f.source, &f.target);
        if self.components.len() != c.object_count() {
            return Err(CatError::CategoryMismatch);
        }
        for x in 0..c.object_count() {
            let k = self.components[x];
            if k >= d.morphism_count() || d.source(k) != f.ob[x] || d.target(k) != g.ob[x] {
                return Err(CatError::ComponentEndpoints(x));
            }
        }
        for k in 0..c.morphism_count() {
            let (x, y) = (c.source(k), c.target(k));
            if d.compose(f.mor[k], self.components[y]) != d.compose(self.components[x], g.mor[k]) {
                return Err(CatError::Naturality(k));
            }
        }
        Ok(())
    }

    pub fn is_invertible(&self) -> bool {
        let d = &self.source.target;
        self.components.iter().all(|&k| d.is_invertible(k))
    }
}

/// x ↦ η(x) ; ζ(x).
pub fn nat_vertical_compose(eta: &NatTransformation, zeta: &NatTransformation) -> Result<NatTransformation, CatError> {
    if eta.target != zeta.source {
        return Err(CatError::MiddleMismatch);
    }
    let d = &eta.source.target;
    let components = eta
        .components
        .iter()
        .zip(&zeta.components)
        .map(|(&a, &b)| d.compose(a, b).ok_or(CatError::MiddleMismatch))
        .collect::<Result<_, _>>()?;
    let out = NatTransformation { source: eta.source.clone(), target: zeta.target.clone(), components };
    out.validate()?;
    Ok(out)
}

/// Horizontal composite of η₀₁: F₀₁ ⇒ G₀₁ (C → D) and η₁₂: F₁₂ ⇒ G₁₂ (D → E).
/// Both whiskering orders are computed and must agree.
pub fn nat_horizontal_compose(
    e01: &NatTransformation,
    e12: &NatTransformation,
) -> Result<NatTransformation, CatError> {
    if !same_category(&e01.source.target, &e12.source.source) {
        return Err(CatError::CategoryMismatch);
    }
    let (f01, g01, f12, g12) = (&e01.source, &e01.target, &e12.source, &e12.target);
    let e = &f12.target;
    let mut components = Vec::with_capacity(f01.ob.len());
    for x in 0..f01.ob.len() {
        let first = e.compose(e12.components[f01.ob[x]], g12.mor[e01.components[x]]);
        let second = e.compose(f12.mor[e01.components[x]], e12.components[g01.ob[x]]);
        match (first, second) {
            (Some(a), Some(b)) if a == b => components.push(a),
            _ => return Err(CatError::Naturality(e01.source.source.identity(x))),
        }
    }
    let out = NatTransformation { source: f01.then(f12)?, target: g01.then(g12)?, components };
    out.validate()?;
    Ok(out)
}

/// Up to `limit` functors C → D found by backtracking over shuffled object maps
/// and morphism images; the search is deterministic for a given rng state.
pub fn find_functors<R: Rng>(
    c: &Arc<FinCategory>,
    d: &Arc<FinCategory>,
    rng: &mut R,
    limit: usize,
    attempts: usize,
) -> Vec<FinFunctor> {
    let (n, m) = (c.object_count(), c.morphism_count());
    let mut order: Vec<usize> = (0..m).filter(|&f| !c.is_identity(f)).collect();
    order.sort_by_key(|&f| (c.source(f), c.target(f), f));
    let mut pos = vec![usize::MAX; m];
    for (i, &f) in order.iter().enumerate() {
        pos[f] = i;
    }
    // triples checked once the last of f, g, f;g (in search order) is assigned
    let mut checks: Vec<Vec<(usize, usize, usize)>> = vec![Vec::new(); order.len()];
    for f in 0..m {
        for &g in c.outgoing(c.target(f)) {
            let h = c.compose(f, g).unwrap();
            let last = [f, g, h].iter().filter(|&&k| pos[k] != usize::MAX).map(|&k| pos[k]).max();
            if let Some(p) = last {
                checks[p].push((f, g, h));
            }
        }
    }
    let mut found = Vec::new();
    let mut seen = HashSet::new();
    for attempt in 0..attempts {
        if found.len() >= limit {
            break;
        }
        let ob: Vec<usize> = if attempt < d.object_count() {
            vec![attempt; n]
        } else {
            (0..n).map(|_| rng.gen_range(0..d.object_count())).collect()
        };
        if order.iter().any(|&f| d.hom(ob[c.source(f)], ob[c.target(f)]).is_empty()) {
            continue;
        }
        let mut mor = vec![usize::MAX; m];
        for x in 0..n {
            mor[c.identity(x)] = d.identity(ob[x]);
        }
        let cands: Vec<Vec<usize>> = order
            .iter()
            .map(|&f| {
                let mut v = d.hom(ob[c.source(f)], ob[c.target(f)]).to_vec();
                v.shuffle(rng);
                v
            })
            .collect();
        let mut budget = 20_000usize;
        if search_functor(c, d, &order, &cands, &checks, 0, &mut mor, &mut budget) {
            let f = FinFunctor { source: c.clone(), target: d.clone(), ob, mor };
            if seen.insert(f.key()) {
                found.push(f);
            }
        }
    }
    found
}

#[allow(clippy::too_many_arguments)]
fn search_functor(
    c: &FinCategory,
    d: &FinCategory,
    order: &[usize],
    cands: &[Vec<usize>],
    checks: &[Vec<(usize, usize, usize)>],
    i: usize,
    mor: &mut [usize],
    budget: &mut usize,
) -> bool {
    if i == order.len() {
        return true;
    }
    for &img in &cands[i] {
        if *budget == 0 {
            return false;
        }
        *budget -= 1;
        mor[order[i]] = img;
        let ok = checks[i].iter().all(|&(f, g, h)| d.compose(mor[f], mor[g]) == Some(mor[h]));
        if ok && search_functor(c, d, order, cands, checks, i + 1, mor, budget) {
            return true;
        }
    }
    mor[order[i]] = usize::MAX;
    false
}

/// Every natural transformation F ⇒ G, in lexicographic order of components.
pub fn nat_transformations(f: &FinFunctor, g: &FinFunctor, limit: usize) -> Result<Vec<NatTransformation>, CatError> {
    if !same_category(&f.source, &g.source) || !same_category(&f.target, &g.target) {
        return Err(CatError::CategoryMismatch);
    }
    let (c, d) = (&f.source, &f.target);
    let n = c.object_count();
    let mut out = Vec::new();
    let mut comp = vec![0usize; n];
    fn rec(
        f: &FinFunctor,
        g: &FinFunctor,
        c: &FinCategory,
        d: &FinCategory,
        x: usize,
        comp: &mut Vec<usize>,
        out: &mut Vec<NatTransformation>,
        limit: usize,
    ) -> Result<(), CatError> {
        if x == c.object_count() {
            if out.len() >= limit {
                return Err(CatError::Limit(limit));
            }
            out.push(NatTransformation { source: f.clone(), target: g.clone(), components: comp.clone() });
            return Ok(());
        }
        for &k in d.hom(f.ob[x], g.ob[x]) {
            comp[x] = k;
            let ok = (0..c.morphism_count()).all(|h| {
                let (s, t) = (c.source(h), c.target(h));
                s.max(t) != x || d.compose(f.mor[h], comp[t]) == d.compose(comp[s], g.mor[h])
            });
            if ok {
                rec(f, g, c, d, x + 1, comp, out, limit)?;
            }
        }
        Ok(())
    }
    rec(f, g, c, d, 0, &mut comp, &mut out, limit)?;
    Ok(out)
}

pub fn naturally_isomorphic(f: &FinFunctor, g: &FinFunctor, limit: usize) -> Result<bool, CatError> {
    Ok(nat_transformations(f, g, limit)?.iter().any(NatTransformation::is_invertible))
}

/// The full subcategory of the functor category on the given functors.
pub fn functor_category(
    functors: &[FinFunctor],
    limit: usize,
) -> Result<(FinCategory, Vec<NatTransformation>), CatError> {
    let mut cells = Vec::new();
    let mut index = HashMap::new();
    let mut arrows = Vec::new();
    for (i, f) in functors.iter().enumerate() {
        for (j, g) in functors.iter().enumerate() {
            for t in nat_transformations(f, g, limit)? {
                index.insert((i, j, t.components.clone()), cells.len());
                arrows.push(Arrow { name: format!("t{}", cells.len()), source: i, target: j });
                cells.push(t);
                if cells.len() > limit {
                    return Err(CatError::Limit(limit));
                }
            }
        }
    }
    let identity = functors
        .iter()
        .enumerate()
        .map(|(i, f)| index[&(i, i, NatTransformation::identity(f).components)])
        .collect();
    let objects = (0..functors.len()).map(|i| format!("F{i}")).collect();
    let cat = FinCategory::from_fn(objects, arrows.clone(), identity, |a, b| {
        let v = nat_vertical_compose(&cells[a], &cells[b]).ok()?;
        index.get(&(arrows[a].source, arrows[b].target, v.components)).copied()
    });
    Ok((cat, cells))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Cell2 {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

/// Objects, 1-cells and 2-cells with vertical and horizontal composition
/// tables. Horizontal 2-composition may be partial; such data is rejected
/// by [`FinBicategory::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinBicategory {
    objects: Vec<String>,
    one_cells: Vec<Arrow>,
    two_cells: Vec<Cell2>,
    id2: Vec<usize>,
    units: Vec<usize>,
    vertical: Vec<u32>,
    h1: Vec<u32>,
    h2: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BicategoryFile {
    pub objects: Vec<String>,
    pub one_cells: Vec<Arrow>,
    pub two_cells: Vec<Cell2>,
    pub identity_two_cells: Vec<usize>,
    pub units: Vec<usize>,
    pub vertical: Vec<[usize; 3]>,
    pub horizontal_one: Vec<[usize; 3]>,
    pub horizontal_two: Vec<[usize; 3]>,
}

fn fill(table: &mut [u32], width: usize, triples: &[[usize; 3]], bound: usize) -> Result<(), CatError> {
    for &[a, b, c] in triples {
        if a >= width || b >= width || c >= bound {
            return Err(CatError::OutOfRange(a.max(b).max(c)));
        }
        table[a * width + b] = c as u32;
    }
    Ok(())
}

impl FinBicategory {
    pub fn from_file(f: BicategoryFile) -> Result<Self, CatError> {
        let (n, n1, n2) = (f.objects.len(), f.one_cells.len(), f.two_cells.len());
        if f.one_cells.iter().any(|a| a.source >= n || a.target >= n)
            || f.two_cells.iter().any(|a| a.source >= n1 || a.target >= n1)
            || f.identity_two_cells.len() != n1
            || f.identity_two_cells.iter().any(|&i| i >= n2)
            || f.units.len() != n
            || f.units.iter().any(|&u| u >= n1)
        {
            return Err(CatError::OutOfRange(n1.max(n2)));
        }
        let mut vertical = vec![NONE; n2 * n2];
        let mut h1 = vec![NONE; n1 * n1];
        let mut h2 = vec![NONE; n2 * n2];
        fill(&mut vertical, n2, &f.vertical, n2)?;
        fill(&mut h1, n1, &f.horizontal_one, n1)?;
        fill(&mut h2, n2, &f.horizontal_two, n2)?;
        Ok(FinBicategory {
            objects: f.objects,
            one_cells: f.one_cells,
            two_cells: f.two_cells,
            id2: f.identity_two_cells,
            units: f.units,
            vertical,
            h1,
            h2,
        })
    }

    pub fn to_file(&self) -> BicategoryFile {
        let triples = |t: &[u32], w: usize| -> Vec<[usize; 3]> {
            (0..t.len()).filter(|&k| t[k] != NONE).map(|k| [k / w, k % w, t[k] as usize]).collect()
        };
        BicategoryFile {
            objects: self.objects.clone(),
            one_cells: self.one_cells.clone(),
            two_cells: self.two_cells.clone(),
            identity_two_cells: self.id2.clone(),
            units: self.units.clone(),
            vertical: triples(&self.vertical, self.two_cells.len()),
            horizontal_one: triples(&self.h1, self.one_cells.len()),
            horizontal_two: triples(&self.h2, self.two_cells.len()),
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn one_cells(&self) -> &[Arrow] {
        &self.one_cells
    }

    pub fn two_cells(&self) -> &[Cell2] {
        &self.two_cells
    }

    pub fn unit(&self, x: usize) -> usize {
        self.units[x]
    }

    pub fn id2(&self, f: usize) -> usize {
        self.id2[f]
    }

    pub fn vertical(&self, a: usize, b: usize) -> Option<usize> {
        let v = self.vertical[a * self.two_cells.len() + b];
        (v != NONE).then_some(v as usize)
    }

    pub fn horizontal1(&self, f: usize, g: usize) -> Option<usize> {
        let v = self.h1[f * self.one_cells.len() + g];
        (v != NONE).then_some(v as usize)
    }

    pub fn horizontal2(&self, a: usize, b: usize) -> Option<usize> {
        let v = self.h2[a * self.two_cells.len() + b];
        (v != NONE).then_some(v as usize)
    }

    fn cell_source_object(&self, a: usize) -> usize {
        self.one_cells[self.two_cells[a].source].source
    }

    fn cell_target_object(&self, a: usize) -> usize {
        self.one_cells[self.two_cells[a].source].target
    }

    /// 1-cells as objects, 2-cells as morphisms, vertical composition.
    pub fn vertical_category(&self) -> Result<FinCategory, CatError> {
        let objects = self.one_cells.iter().map(|a| a.name.clone()).collect();
        let arrows = self
            .two_cells
            .iter()
            .map(|c| Arrow { name: c.name.clone(), source: c.source, target: c.target })
            .collect();
        let n2 = self.two_cells.len();
        let triples: Vec<[usize; 3]> = (0..n2 * n2)
            .filter(|&k| self.vertical[k] != NONE)
            .map(|k| [k / n2, k % n2, self.vertical[k] as usize])
            .collect();
        FinCategory::new(objects, arrows, self.id2.clone(), &triples)
    }

    fn invertible(&self, a: usize) -> bool {
        let c = &self.two_cells[a];
        self.two_cells.iter().enumerate().any(|(b, d)| {
            d.source == c.target
                && d.target == c.source
                && self.vertical(a, b) == Some(self.id2[c.source])
                && self.vertical(b, a) == Some(self.id2[c.target])
        })
    }

    /// Whether an invertible 2-cell f ⇒ g exists.
    pub fn isomorphic(&self, f: usize, g: usize) -> bool {
        self.two_cells.iter().enumerate().any(|(a, c)| c.source == f && c.target == g && self.invertible(a))
    }

    /// Class index of every 1-cell under isomorphism, numbered by first occurrence.
    pub fn iso_classes(&self) -> Vec<usize> {
        let n1 = self.one_cells.len();
        let mut parent: Vec<usize> = (0..n1).collect();
        fn find(p: &mut [usize], x: usize) -> usize {
            let mut r = x;
            while p[r] != r {
                r = p[r];
            }
            let mut y = x;
            while p[y] != r {
                let nx = p[y];
                p[y] = r;
                y = nx;
            }
            r
        }
        let inv: Vec<bool> = (0..self.two_cells.len()).into_par_iter().map(|a| self.invertible(a)).collect();
        for (a, c) in self.two_cells.iter().enumerate() {
            if inv[a] {
                let (x, y) = (find(&mut parent, c.source), find(&mut parent, c.target));
                if x != y {
                    parent[x.max(y)] = x.min(y);
                }
            }
        }
        let mut label = HashMap::new();
        (0..n1)
            .map(|f| {
                let r = find(&mut parent, f);
                let next = label.len();
                *label.entry(r).or_insert(next)
            })
            .collect()
    }

    pub fn validate(&self) -> Result<(), CatError> {
        self.vertical_category()?.validate()?;
        let (n1, n2) = (self.one_cells.len(), self.two_cells.len());
        let oc = &self.one_cells;
        for (x, &u) in self.units.iter().enumerate() {
            if oc[u].source != x || oc[u].target != x {
                return Err(CatError::BadIdentity(x));
            }
        }
        for f in 0..n1 {
            for g in 0..n1 {
                let matching = oc[f].target == oc[g].source;
                match (self.horizontal1(f, g), matching) {
                    (Some(_), false) => return Err(CatError::Spurious { f, g }),
                    (None, true) => return Err(CatError::Missing { f, g }),
                    (Some(h), true) if oc[h].source != oc[f].source || oc[h].target != oc[g].target => {
                        return Err(CatError::Endpoints { f, g })
                    }
                    _ => {}
                }
            }
        }
        for a in 0..n2 {
            for b in 0..n2 {
                let matching = self.cell_target_object(a) == self.cell_source_object(b);
                let (ca, cb) = (&self.two_cells[a], &self.two_cells[b]);
                match (self.horizontal2(a, b), matching) {
                    (Some(_), false) => return Err(CatError::Spurious { f: a, g: b }),
                    (None, true) => return Err(CatError::MissingHorizontal { a, b }),
                    (Some(h), true) => {
                        let ch = &self.two_cells[h];
                        if self.horizontal1(ca.source, cb.source) != Some(ch.source)
                            || self.horizontal1(ca.target, cb.target) != Some(ch.target)
                        {
                            return Err(CatError::HorizontalEndpoints { a, b });
                        }
                    }
                    _ => {}
                }
            }
        }
        for f in 0..n1 {
            for g in 0..n1 {
                if let Some(fg) = self.horizontal1(f, g) {
                    if self.horizontal2(self.id2[f], self.id2[g]) != Some(self.id2[fg]) {
                        return Err(CatError::HorizontalIdentity { f, g });
                    }
                }
            }
        }
        let mut out_of: Vec<Vec<usize>> = vec![Vec::new(); n1];
        for (a, c) in self.two_cells.iter().enumerate() {
            out_of[c.source].push(a);
        }
        let bad = (0..n2).into_par_iter().find_map_first(|a| {
            let ca = &self.two_cells[a];
            for b in 0..n2 {
                if self.cell_target_object(a) != self.cell_source_object(b) {
                    continue;
                }
                let ab = self.horizontal2(a, b).unwrap();
                for &a2 in &out_of[ca.target] {
                    let aa = self.vertical(a, a2).unwrap();
                    for &b2 in &out_of[self.two_cells[b].target] {
                        let lhs = self.horizontal2(aa, self.vertical(b, b2).unwrap()).unwrap();
                        let rhs = self.vertical(ab, self.horizontal2(a2, b2).unwrap());
                        if rhs != Some(lhs) {
                            return Some(CatError::Interchange { a, a2, b, b2 });
                        }
                    }
                }
            }
            None
        });
        if let Some(e) = bad {
            return Err(e);
        }
        let classes = self.iso_classes();
        for f in 0..n1 {
            let (x, y) = (oc[f].source, oc[f].target);
            let l = self.horizontal1(self.units[x], f).unwrap();
            let r = self.horizontal1(f, self.units[y]).unwrap();
            if classes[l] != classes[f] {
                return Err(CatError::Unit { x, f });
            }
            if classes[r] != classes[f] {
                return Err(CatError::Unit { x: y, f });
            }
            for g in 0..n1 {
                let Some(fg) = self.horizontal1(f, g) else { continue };
                for h in 0..n1 {
                    let Some(gh) = self.horizontal1(g, h) else { continue };
                    if classes[self.horizontal1(fg, h).unwrap()] != classes[self.horizontal1(f, gh).unwrap()] {
                        return Err(CatError::HorizontalAssociativity { f, g, h });
                    }
                }
            }
        }
        Ok(())
    }
}

/// The images of one bicategory under the Yoneda construction at a base object.
#[derive(Debug, Clone)]
pub struct YonedaImage {
    pub base: usize,
    /// Mor(x₀, x) for each object x.
    pub categories: Vec<Arc<FinCategory>>,
    /// Global 1-cell index of each object of `categories[x]`.
    pub objects_of: Vec<Vec<usize>>,
    /// Post-composition functor for each 1-cell.
    pub functors: Vec<FinFunctor>,
    /// Whiskering transformation for each 2-cell.
    pub transformations: Vec<NatTransformation>,
}

impl YonedaImage {
    pub fn validate(&self) -> Result<(), CatError> {
        for c in &self.categories {
            c.validate()?;
        }
        for f in &self.functors {
            f.validate()?;
        }
        for t in &self.transformations {
            t.validate()?;
        }
        Ok(())
    }
}

pub fn yoneda(b: &FinBicategory, x0: usize) -> Result<YonedaImage, CatError> {
    if x0 >= b.objects.len() {
        return Err(CatError::InvalidObject(x0));
    }
    let n = b.objects.len();
    let mut local1 = vec![usize::MAX; b.one_cells.len()];
    let mut objects_of = vec![Vec::new(); n];
    for (f, a) in b.one_cells.iter().enumerate() {
        if a.source == x0 {
            local1[f] = objects_of[a.target].len();
            objects_of[a.target].push(f);
        }
    }
    let mut local2 = vec![usize::MAX; b.two_cells.len()];
    let mut cells_of = vec![Vec::new(); n];
    for (a, c) in b.two_cells.iter().enumerate() {
        let x = &b.one_cells[c.source];
        if x.source == x0 {
            local2[a] = cells_of[x.target].len();
            cells_of[x.target].push(a);
        }
    }
    let mut categories = Vec::with_capacity(n);
    for x in 0..n {
        let objects = objects_of[x].iter().map(|&f| b.one_cells[f].name.clone()).collect();
        let arrows = cells_of[x]
            .iter()
            .map(|&a| {
                let c = &b.two_cells[a];
                Arrow { name: c.name.clone(), source: local1[c.source], target: local1[c.target] }
            })
            .collect();
        let identity = objects_of[x].iter().map(|&f| local2[b.id2[f]]).collect();
        let cells = &cells_of[x];
        let cat = FinCategory::from_fn(objects, arrows, identity, |i, j| b.vertical(cells[i], cells[j]).map(|v| local2[v]));
        categories.push(Arc::new(cat));
    }
    let mut functors = Vec::with_capacity(b.one_cells.len());
    for (f, a) in b.one_cells.iter().enumerate() {
        let (x, y) = (a.source, a.target);
        let ob = objects_of[x]
            .iter()
            .map(|&g| b.horizontal1(g, f).map(|h| local1[h]).ok_or(CatError::Missing { f: g, g: f }))
            .collect::<Result<_, _>>()?;
        let mor = cells_of[x]
            .iter()
            .map(|&c| {
                b.horizontal2(c, b.id2[f]).map(|h| local2[h]).ok_or(CatError::MissingHorizontal { a: c, b: b.id2[f] })
            })
            .collect::<Result<_, _>>()?;
        functors.push(FinFunctor { source: categories[x].clone(), target: categories[y].clone(), ob, mor });
    }
    let mut transformations = Vec::with_capacity(b.two_cells.len());
    for (beta, c) in b.two_cells.iter().enumerate() {
        let x = b.one_cells[c.source].source;
        let components = objects_of[x]
            .iter()
            .map(|&g| {
                b.horizontal2(b.id2[g], beta)
                    .map(|h| local2[h])
                    .ok_or(CatError::MissingHorizontal { a: b.id2[g], b: beta })
            })
            .collect::<Result<_, _>>()?;
        transformations.push(NatTransformation {
            source: functors[c.source].clone(),
            target: functors[c.target].clone(),
            components,
        });
    }
    let image = YonedaImage { base: x0, categories, objects_of, functors, transformations };
    image.validate()?;
    Ok(image)
}

#[derive(Debug, Clone)]
pub struct Quotient {
    pub category: FinCategory,
    /// Class index (a morphism of `category`) of every 1-cell.
    pub class_of: Vec<usize>,
}

/// 1-cells modulo invertible 2-cells. Descent of horizontal composition to
/// classes is checked before anything else so the failure carries a witness.
pub fn quotient_by_2isos(b: &FinBicategory) -> Result<Quotient, CatError> {
    b.vertical_category()?.validate()?;
    let class_of = b.iso_classes();
    let n1 = b.one_cells.len();
    let mut rep: HashMap<(usize, usize), (usize, usize, usize)> = HashMap::new();
    for f in 0..n1 {
        for g in 0..n1 {
            let Some(h) = b.horizontal1(f, g) else { continue };
            match rep.get(&(class_of[f], class_of[g])) {
                None => {
                    rep.insert((class_of[f], class_of[g]), (f, g, class_of[h]));
                }
                Some(&(f0, g0, c)) if c != class_of[h] => {
                    return Err(CatError::IllFormedQuotient { f: f0, g: g0, f2: f, g2: g })
                }
                _ => {}
            }
        }
    }
    b.validate()?;
    let k = class_of.iter().max().map_or(0, |m| m + 1);
    let mut first = vec![usize::MAX; k];
    for f in (0..n1).rev() {
        first[class_of[f]] = f;
    }
    let arrows = first
        .iter()
        .map(|&f| {
            let a = &b.one_cells[f];
            Arrow { name: format!("[{}]", a.name), source: a.source, target: a.target }
        })
        .collect();
    let identity = b.units.iter().map(|&u| class_of[u]).collect();
    let category = FinCategory::from_fn(b.objects.clone(), arrows, identity, |i, j| {
        rep.get(&(i, j)).map(|&(_, _, c)| c)
    });
    category.validate()?;
    Ok(Quotient { category, class_of })
}

/// The 2-category of the given categories, the composition closure of the
/// given functors (plus identities), and all natural transformations.
pub fn functor_bicategory(
    cats: &[Arc<FinCategory>],
    generators: &[FinFunctor],
    max_one: usize,
    max_two: usize,
) -> Result<(FinBicategory, Vec<FinFunctor>, Vec<NatTransformation>), CatError> {
    let obj = |c: &Arc<FinCategory>| {
        cats.iter()
            .position(|d| Arc::ptr_eq(c, d))
            .or_else(|| cats.iter().position(|d| **c == **d))
            .ok_or(CatError::CategoryMismatch)
    };
    let mut functors: Vec<FinFunctor> = cats.iter().map(FinFunctor::identity).collect();
    let mut keys: HashMap<(usize, usize, (Vec<usize>, Vec<usize>)), usize> = HashMap::new();
    for (i, f) in functors.iter().enumerate() {
        keys.insert((i, i, f.key()), i);
    }
    let mut queue: Vec<FinFunctor> = generators.to_vec();
    let mut done = 0;
    loop {
        for f in queue.drain(..) {
            let k = (obj(&f.source)?, obj(&f.target)?, f.key());
            if let std::collections::hash_map::Entry::Vacant(e) = keys.entry(k) {
                e.insert(functors.len());
                functors.push(f);
                if functors.len() > max_one {
                    return Err(CatError::Limit(max_one));
                }
            }
        }
        if done == functors.len() {
            break;
        }
        let n = functors.len();
        for i in 0..n {
            for j in 0..n {
                if i < done && j < done {
                    continue;
                }
                if let Ok(h) = functors[i].then(&functors[j]) {
                    queue.push(h);
                }
            }
        }
        done = n;
    }
    let ends: Vec<(usize, usize)> =
        functors.iter().map(|f| Ok((obj(&f.source)?, obj(&f.target)?))).collect::<Result<_, CatError>>()?;
    let n1 = functors.len();
    let mut cells = Vec::new();
    let mut index = HashMap::new();
    for i in 0..n1 {
        for j in 0..n1 {
            if ends[i] != ends[j] {
                continue;
            }
            for t in nat_transformations(&functors[i], &functors[j], max_two)? {
                index.insert((i, j, t.components.clone()), cells.len());
                cells.push((i, j, t));
                if cells.len() > max_two {
                    return Err(CatError::Limit(max_two));
                }
            }
        }
    }
    let n2 = cells.len();
    let mut h1 = vec![NONE; n1 * n1];
    for i in 0..n1 {
        for j in 0..n1 {
            if ends[i].1 == ends[j].0 {
                let h = functors[i].then(&functors[j])?;
                h1[i * n1 + j] = keys[&(ends[i].0, ends[j].1, h.key())] as u32;
            }
        }
    }
    let lookup = |f: usize, g: usize, t: &NatTransformation| index.get(&(f, g, t.components.clone())).copied();
    let rows: Vec<(Vec<u32>, Vec<u32>)> = (0..n2)
        .into_par_iter()
        .map(|a| {
            let (fa, ga, ta) = &cells[a];
            let mut v = vec![NONE; n2];
            let mut h = vec![NONE; n2];
            for (b, (fb, gb, tb)) in cells.iter().enumerate() {
                if fb == ga {
                    if let Ok(c) = nat_vertical_compose(ta, tb) {
                        v[b] = lookup(*fa, *gb, &c).map_or(NONE, |x| x as u32);
                    }
                }
                if ends[*fa].1 == ends[*fb].0 {
                    if let Ok(c) = nat_horizontal_compose(ta, tb) {
                        let (s, t) = (h1[fa * n1 + fb] as usize, h1[ga * n1 + gb] as usize);
                        h[b] = lookup(s, t, &c).map_or(NONE, |x| x as u32);
                    }
                }
            }
            (v, h)
        })
        .collect();
    let mut vertical = Vec::with_capacity(n2 * n2);
    let mut h2 = Vec::with_capacity(n2 * n2);
    for (v, h) in rows {
        vertical.extend(v);
        h2.extend(h);
    }
    let id2 = (0..n1).map(|i| index[&(i, i, NatTransformation::identity(&functors[i]).components)]).collect();
    let bicat = FinBicategory {
        objects: (0..cats.len()).map(|i| format!("C{i}")).collect(),
        one_cells: (0..n1).map(|i| Arrow { name: format!("F{i}"), source: ends[i].0, target: ends[i].1 }).collect(),
        two_cells: cells
            .iter()
            .enumerate()
            .map(|(k, (i, j, _))| Cell2 { name: format!("t{k}"), source: *i, target: *j })
            .collect(),
        id2,
        units: (0..cats.len()).collect(),
        vertical,
        h1,
        h2,
    };
    Ok((bicat, functors, cells.into_iter().map(|c| c.2).collect()))
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..n {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out.sort();
    out
}

fn all_maps(from: usize, to: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..from {
        out = out.into_iter().flat_map(|v| (0..to).map(move |y| [v.clone(), vec![y]].concat())).collect();
    }
    out
}

/// Sets of the given sizes, maps S_i → S_j for i < j plus identities, and
/// conjugating pairs of bijections (α_i, α_j) with α_j⁻¹ ∘ f ∘ α_i = g as
/// 2-cells f ⇒ g. No horizontal 2-composition is recorded.
pub fn conjugacy_bicategory(sizes: &[usize]) -> FinBicategory {
    let k = sizes.len();
    let mut one = Vec::new();
    let mut maps: Vec<(usize, usize, Vec<usize>)> = Vec::new();
    for i in 0..k {
        maps.push((i, i, (0..sizes[i]).collect()));
        for j in i + 1..k {
            for m in all_maps(sizes[i], sizes[j]) {
                maps.push((i, j, m));
            }
        }
    }
    maps.sort();
    let index: HashMap<_, _> = maps.iter().enumerate().map(|(n, m)| (m.clone(), n)).collect();
    for (n, (i, j, _)) in maps.iter().enumerate() {
        one.push(Arrow { name: format!("f{n}"), source: *i, target: *j });
    }
    let perms: Vec<Vec<Vec<usize>>> = sizes.iter().map(|&s| permutations(s)).collect();
    let invert = |p: &[usize]| {
        let mut q = vec![0; p.len()];
        for (x, &y) in p.iter().enumerate() {
            q[y] = x;
        }
        q
    };
    let mut two: Vec<(usize, usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for (n, (i, j, f)) in maps.iter().enumerate() {
        for ai in &perms[*i] {
            for aj in &perms[*j] {
                let aj_inv = invert(aj);
                let g: Vec<usize> = (0..sizes[*i]).map(|x| aj_inv[f[ai[x]]]).collect();
                if let Some(&t) = index.get(&(*i, *j, g)) {
                    two.push((n, t, ai.clone(), aj.clone()));
                }
            }
        }
    }
    let tindex: HashMap<_, _> = two.iter().enumerate().map(|(n, (s, _, a, b))| ((*s, a.clone(), b.clone()), n)).collect();
    let n1 = maps.len();
    let n2 = two.len();
    let mut vertical = vec![NONE; n2 * n2];
    for (a, (s, t, a1, a2)) in two.iter().enumerate() {
        for (b, (s2, _, b1, b2)) in two.iter().enumerate() {
            if s2 == t {
                let c1: Vec<usize> = b1.iter().map(|&x| a1[x]).collect();
                let c2: Vec<usize> = b2.iter().map(|&x| a2[x]).collect();
                vertical[a * n2 + b] = tindex[&(*s, c1, c2)] as u32;
            }
        }
    }
    let mut h1 = vec![NONE; n1 * n1];
    for (f, (i, j, fm)) in maps.iter().enumerate() {
        for (g, (j2, l, gm)) in maps.iter().enumerate() {
            if j == j2 {
                let h: Vec<usize> = fm.iter().map(|&x| gm[x]).collect();
                h1[f * n1 + g] = index[&(*i, *l, h)] as u32;
            }
        }
    }
    let id2 = (0..n1)
        .map(|f| {
            let (i, j, _) = &maps[f];
            tindex[&(f, (0..sizes[*i]).collect::<Vec<_>>(), (0..sizes[*j]).collect::<Vec<_>>())]
        })
        .collect();
    let units = (0..k).map(|i| index[&(i, i, (0..sizes[i]).collect::<Vec<_>>())]).collect();
    FinBicategory {
        objects: sizes.iter().enumerate().map(|(i, s)| format!("S{i}({s})")).collect(),
        one_cells: one,
        two_cells: two.iter().enumerate().map(|(n, (s, t, _, _))| Cell2 { name: format!("c{n}"), source: *s, target: *t }).collect(),
        id2,
        units,
        vertical,
        h1,
        h2: vec![NONE; n2 * n2],
    }
}

/// A concrete category: objects are sets of size ≤ 3 (all singletons with
/// some probability, giving a preorder) and morphisms are the composition
/// closure of random maps, kept only while the total stays ≤ `max_morphisms`.
pub fn random_category<R: Rng>(rng: &mut R, max_objects: usize, max_morphisms: usize) -> FinCategory {
    let n = rng.gen_range(1..=max_objects.max(1));
    let thin = rng.gen_bool(0.3);
    let sizes: Vec<usize> = (0..n).map(|_| if thin { 1 } else { rng.gen_range(1..=3) }).collect();
    let mut maps: Vec<(usize, usize, Vec<usize>)> = (0..n).map(|i| (i, i, (0..sizes[i]).collect())).collect();
    let tries = rng.gen_range(0..=8);
    for _ in 0..tries {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        let m: Vec<usize> = (0..sizes[i]).map(|_| rng.gen_range(0..sizes[j])).collect();
        if let Some(closed) = close_maps(&maps, (i, j, m), max_morphisms) {
            maps = closed;
        }
    }
    let index: HashMap<_, _> = maps.iter().enumerate().map(|(k, m)| (m.clone(), k)).collect();
    let arrows = maps
        .iter()
        .enumerate()
        .map(|(k, (i, j, _))| Arrow { name: if i == j && k < n { format!("id{i}") } else { format!("m{k}") }, source: *i, target: *j })
        .collect();
    FinCategory::from_fn((0..n).map(|i| format!("o{i}")).collect(), arrows, (0..n).collect(), |f, g| {
        let (i, _, fm) = &maps[f];
        let (_, l, gm) = &maps[g];
        index.get(&(*i, *l, fm.iter().map(|&x| gm[x]).collect::<Vec<_>>())).copied()
    })
}

type Map = (usize, usize, Vec<usize>);

fn close_maps(maps: &[Map], new: Map, max: usize) -> Option<Vec<Map>> {
    let mut out = maps.to_vec();
    let mut seen: HashSet<Map> = out.iter().cloned().collect();
    if !seen.insert(new.clone()) {
        return Some(out);
    }
    out.push(new);
    let mut frontier = out.len() - 1;
    while frontier < out.len() {
        let end = out.len();
        for a in 0..end {
            for b in 0..end {
                if a < frontier && b < frontier {
                    continue;
                }
                let ((i, j, fm), (j2, l, gm)) = (&out[a], &out[b]);
                if j != j2 {
                    continue;
                }
                let h = (*i, *l, fm.iter().map(|&x| gm[x]).collect::<Vec<_>>());
                if seen.insert(h.clone()) {
                    out.push(h);
                    if out.len() > max {
                        return None;
                    }
                }
            }
        }
        frontier = end;
    }
    Some(out)
}

struct Sample {
    c: Arc<FinCategory>,
    d: Arc<FinCategory>,
    functors: Vec<FinFunctor>,
    fun_cd: (FinCategory, Vec<NatTransformation>),
    fun_dd: (FinCategory, Vec<NatTransformation>),
    bicat: FinBicategory,
}

/// Two random categories, a few functors C → D and D → D, and everything
/// built from them, all within fixed enumeration limits.
fn draw_sample<R: Rng>(rng: &mut R) -> Result<Sample, CatError> {
    let c = Arc::new(random_category(rng, 5, 40));
    let d = Arc::new(random_category(rng, 5, 40));
    let cd = find_functors(&c, &d, rng, 3, 12);
    let id_d = FinFunctor::identity(&d);
    let mut dd = vec![id_d.clone()];
    dd.extend(find_functors(&d, &d, rng, 2, 12).into_iter().filter(|f| *f != id_d));
    let fun_cd = functor_category(&cd, 400)?;
    let fun_dd = functor_category(&dd, 400)?;
    let mut gens = cd.clone();
    gens.extend(dd.iter().skip(1).cloned());
    let (bicat, _, _) = functor_bicategory(&[c.clone(), d.clone()], &gens, 16, 200)?;
    gens.push(id_d);
    Ok(Sample { c, d, functors: gens, fun_cd, fun_dd, bicat })
}

/// Category, functor-category, interchange, bicategory, isomorphism,
/// Yoneda and quotient checks on random data drawn from one seed. Samples
/// whose enumerations exceed the limits are redrawn from the same stream.
pub fn law_suite(seed: u64) -> Vec<CheckEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let tag = |s: &str| format!("seed{seed}/{s}");
    let mut out = Vec::new();
    let record = |out: &mut Vec<CheckEntry>, name: String, r: Result<(), CatError>| {
        out.push(match r {
            Ok(()) => CheckEntry::pass(name),
            Err(e) => CheckEntry::fail(name, json!(e.to_string())),
        });
    };
    let mut sample = Err(CatError::Limit(0));
    for _ in 0..16 {
        sample = draw_sample(&mut rng);
        if !matches!(sample, Err(CatError::Limit(_))) {
            break;
        }
    }
    let s = match sample {
        Ok(s) => s,
        Err(e) => {
            record(&mut out, tag("materialize"), Err(e));
            return out;
        }
    };
    record(&mut out, tag("category/C"), s.c.validate());
    record(&mut out, tag("category/D"), s.d.validate());
    record(&mut out, tag("functors"), s.functors.iter().try_for_each(FinFunctor::validate));
    for (name, (cat, cells)) in [("functor_category/CD", &s.fun_cd), ("functor_category/DD", &s.fun_dd)] {
        let r = cat.validate().and_then(|_| {
            cells.iter().try_for_each(|t| {
                let id_l = NatTransformation::identity(&t.source);
                let id_r = NatTransformation::identity(&t.target);
                if nat_vertical_compose(&id_l, t)? != *t || nat_vertical_compose(t, &id_r)? != *t {
                    return Err(CatError::IdentityLaw(0));
                }
                Ok(())
            })
        });
        record(&mut out, tag(name), r);
    }
    record(&mut out, tag("interchange"), interchange_check(&s.fun_cd.1, &s.fun_dd.1));

    let b = &s.bicat;
    record(&mut out, tag("bicategory"), b.validate());
    let n1 = b.one_cells().len();
    let triples: Vec<[usize; 3]> = (0..32).map(|_| [0; 3].map(|_| rng.gen_range(0..n1))).collect();
    let bad = triples.iter().find(|&&[f, g, h]| {
        !(b.isomorphic(f, f)
            && b.isomorphic(f, g) == b.isomorphic(g, f)
            && (!(b.isomorphic(f, g) && b.isomorphic(g, h)) || b.isomorphic(f, h)))
    });
    out.push(match bad {
        None => CheckEntry::pass(tag("isomorphism_is_equivalence")),
        Some(t) => CheckEntry::fail(tag("isomorphism_is_equivalence"), json!(t)),
    });
    for x0 in 0..b.objects().len() {
        record(&mut out, tag(&format!("yoneda/x{x0}")), yoneda(b, x0).map(|_| ()));
    }
    record(&mut out, tag("quotient"), quotient_by_2isos(b).map(|_| ()));
    out
}

/// (η ; ζ) ∘ₕ (η′ ; ζ′) = (η ∘ₕ η′) ; (ζ ∘ₕ ζ′) over vertically composable
/// pairs from each list, at most 40 pairs per side.
fn interchange_check(left: &[NatTransformation], right: &[NatTransformation]) -> Result<(), CatError> {
    let pairs = |v: &[NatTransformation]| -> Vec<(usize, usize)> {
        let mut p = Vec::new();
        for (i, a) in v.iter().enumerate() {
            for (j, b) in v.iter().enumerate() {
                if a.target == b.source {
                    p.push((i, j));
                }
            }
        }
        p
    };
    for &(i, j) in pairs(left).iter().take(40) {
        for &(k, l) in pairs(right).iter().take(40) {
            let (eta, zeta, eta2, zeta2) = (&left[i], &left[j], &right[k], &right[l]);
            let lhs = nat_horizontal_compose(&nat_vertical_compose(eta, zeta)?, &nat_vertical_compose(eta2, zeta2)?)?;
            let rhs = nat_vertical_compose(&nat_horizontal_compose(eta, eta2)?, &nat_horizontal_compose(zeta, zeta2)?)?;
            if lhs != rhs {
                return Err(CatError::Interchange { a: i, a2: j, b: k, b2: l });
            }
        }
    }
    Ok(())
}

/// The conjugacy non-example: must fail to descend on sets of sizes 2, 3, 2.
pub fn conjugacy_check() -> CheckEntry {
    let b = conjugacy_bicategory(&[2, 3, 2]);
    match quotient_by_2isos(&b) {
        Err(CatError::IllFormedQuotient { f, g, f2, g2 }) => {
            let iso = b.isomorphic(f, f2) && b.isomorphic(g, g2);
            let h = b.horizontal1(f, g).unwrap();
            let h2 = b.horizontal1(f2, g2).unwrap();
            CheckEntry::new(
                "conjugacy/ill_formed_quotient",
                iso && !b.isomorphic(h, h2),
                Some(json!({ "f": f, "g": g, "f2": f2, "g2": g2 })),
            )
        }
        other => CheckEntry::fail("conjugacy/ill_formed_quotient", json!(format!("{:?}", other.map(|_| ())))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn chain3() -> Arc<FinCategory> {
        // 0 → 1 → 2 with the composite
        let arrows = vec![
            Arrow { name: "id0".into(), source: 0, target: 0 },
            Arrow { name: "id1".into(), source: 1, target: 1 },
            Arrow { name: "id2".into(), source: 2, target: 2 },
            Arrow { name: "a".into(), source: 0, target: 1 },
            Arrow { name: "b".into(), source: 1, target: 2 },
            Arrow { name: "ab".into(), source: 0, target: 2 },
        ];
        let comp = vec![
            [0, 0, 0], [1, 1, 1], [2, 2, 2], [0, 3, 3], [3, 1, 3], [1, 4, 4], [4, 2, 4],
            [0, 5, 5], [5, 2, 5], [3, 4, 5],
        ];
        Arc::new(FinCategory::new(vec!["0".into(), "1".into(), "2".into()], arrows, vec![0, 1, 2], &comp).unwrap())
    }

    #[test]
    fn chain_category_is_valid() {
        chain3().validate().unwrap();
    }

    #[test]
    fn missing_composite_is_reported() {
        let c = chain3();
        let mut file = c.to_file();
        file.compose.retain(|t| *t != [3, 4, 5]);
        let bad = FinCategory::from_file(file).unwrap();
        assert_eq!(bad.validate(), Err(CatError::Missing { f: 3, g: 4 }));
    }

    #[test]
    fn vertical_unit_and_constants() {
        let c = chain3();
        let f = FinFunctor::constant(&c, &c, 0);
        let g = FinFunctor::constant(&c, &c, 2);
        let ts = nat_transformations(&f, &g, 100).unwrap();
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].components, vec![5, 5, 5]);
        let id = NatTransformation::identity(&f);
        assert_eq!(nat_vertical_compose(&id, &ts[0]).unwrap(), ts[0]);
        assert_eq!(nat_vertical_compose(&ts[0], &id), Err(CatError::MiddleMismatch));
    }

    #[test]
    fn horizontal_identity_is_identity() {
        let c = chain3();
        let f = FinFunctor::identity(&c);
        let k = FinFunctor::constant(&c, &c, 1);
        let h = nat_horizontal_compose(&NatTransformation::identity(&f), &NatTransformation::identity(&k)).unwrap();
        assert_eq!(h, NatTransformation::identity(&f.then(&k).unwrap()));
    }

    #[test]
    fn chain_interchange_instance() {
        let c = chain3();
        let fs: Vec<FinFunctor> = (0..3).map(|x| FinFunctor::constant(&c, &c, x)).chain([FinFunctor::identity(&c)]).collect();
        let (_, cells) = functor_category(&fs, 1000).unwrap();
        interchange_check(&cells, &cells).unwrap();
    }

    #[test]
    fn quotient_with_only_identities_is_underlying() {
        let c = chain3();
        let (b, _, _) = functor_bicategory(std::slice::from_ref(&c), &[], 4, 10).unwrap();
        b.validate().unwrap();
        let q = quotient_by_2isos(&b).unwrap();
        assert_eq!(q.category.morphism_count(), 1);
        let y = yoneda(&b, 0).unwrap();
        assert_eq!(y.categories[0].object_count(), 1);
        assert_eq!(y.categories[0].morphism_count(), 1);
    }

    #[test]
    fn conjugacy_fails_to_descend() {
        let b = conjugacy_bicategory(&[2, 3, 2]);
        b.vertical_category().unwrap().validate().unwrap();
        let e = conjugacy_check();
        assert!(e.passed(), "{e:?}");
    }

    #[test]
    fn yoneda_unit_is_identity_up_to_iso() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let c = Arc::new(random_category(&mut rng, 3, 12));
        let fs = find_functors(&c, &c, &mut rng, 2, 8);
        let (b, _, _) = functor_bicategory(std::slice::from_ref(&c), &fs, 16, 400).unwrap();
        let y = yoneda(&b, 0).unwrap();
        let unit = &y.functors[b.unit(0)];
        assert!(naturally_isomorphic(unit, &FinFunctor::identity(&y.categories[0]), 1000).unwrap());
    }

    #[test]
    fn random_categories_are_valid() {
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let c = random_category(&mut rng, 5, 40);
            assert!(c.morphism_count() <= 40);
            c.validate().unwrap();
        }
    }
}
