//! Quilted surfaces as rotation systems, quilt diagrams labeled by relations
//! (or by abstract 1-morphisms), gluing, strip shrinking and evaluation.
//!
//! Seam s has a tail dart 2s and a head dart 2s+1. Each end lists its darts
//! counterclockwise. The wedge from dart d to the next dart at the same end
//! is the corner of d; the corner of a tail is the P⁺ side of its seam and the
//! corner of a head the P⁻ side. A seam label maps P⁻ to P⁺.

mod eval;
mod fixtures;
mod glue;
mod io;
mod iso;
mod shrink;
mod suite;

pub use eval::{cylinder_check, deformation_check, gluing_check, strip_check, Evaluation};
pub use fixtures::*;
pub use glue::quilt_glue;
pub use io::{export_dot, QuiltFile};
pub use iso::{find_isomorphism, scramble, QuiltIsomorphism};
pub use shrink::{shrink_strip, shrink_strip_unchecked, ShrinkResult};
pub use suite::{axiom_suite, small_groups, zigzag_suite};

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::config::ResourceLimit;
use crate::relcat::{geometric_compose, is_embedded, CyclicChain, RelError};
use crate::report::CheckEntry;
use crate::repvar::{same_variety, FiniteRelation, RepError, RepVariety};

pub type Dart = usize;

pub fn seam_of(d: Dart) -> usize {
    d / 2
}

pub fn is_tail(d: Dart) -> bool {
    d.is_multiple_of(2)
}

/// The other end of the seam.
pub fn alpha(d: Dart) -> Dart {
    d ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QuiltError {
    #[error("invalid quilt: {0}")]
    Invalid(String),
    #[error("end {0} does not exist")]
    InvalidEnd(usize),
    #[error("end {0} is not an incoming end")]
    NotIncoming(usize),
    #[error("cyclic morphisms differ at position {position}")]
    CyclicMismatch { position: usize },
    #[error("patch {0} is not a strip or an annulus")]
    NotAStrip(usize),
    #[error("composition is not embedded: ({x}, {y}) and ({x}, {y2}) both reach {z}")]
    NotEmbedded { x: usize, y: usize, y2: usize, z: usize },
    #[error("label mismatch: {0}")]
    LabelMismatch(String),
    #[error("input {tuple:?} for end {end} is not a generator")]
    InputNotGenerator { end: usize, tuple: Vec<u32> },
    #[error("expected {expected} input tuples, got {got}")]
    InputCount { expected: usize, got: usize },
    #[error(transparent)]
    ResourceLimit(#[from] ResourceLimit),
    #[error(transparent)]
    Rel(#[from] RelError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("quilt file: {0}")]
    File(String),
}

/// A 1-morphism usable as a seam label: relations in relation mode, named
/// arrows in generic mode.
pub trait SeamLabel: Clone + fmt::Debug + PartialEq + Send + Sync {
    type Object: Clone + fmt::Debug + PartialEq + Send + Sync;

    fn dom(&self) -> &Self::Object;
    fn cod(&self) -> &Self::Object;
    fn adjoint(&self) -> Self;
    /// `self` followed by `next`; with `check_embedded`, fails unless the
    /// composite is embedded.
    fn then_label(&self, next: &Self, check_embedded: bool) -> Result<Self, QuiltError>;
    fn name(&self) -> String;
    fn object_name(obj: &Self::Object) -> String;

    fn same(&self, other: &Self) -> bool {
        self == other
    }

    fn same_object(a: &Self::Object, b: &Self::Object) -> bool {
        a == b
    }
}

impl SeamLabel for FiniteRelation {
    type Object = Arc<RepVariety>;

    fn dom(&self) -> &Arc<RepVariety> {
        self.source()
    }

    fn cod(&self) -> &Arc<RepVariety> {
        self.target()
    }

    fn adjoint(&self) -> Self {
        self.transpose()
    }

    fn then_label(&self, next: &Self, check_embedded: bool) -> Result<Self, QuiltError> {
        if check_embedded {
            if let Some((x, y, y2, z)) = is_embedded(self, next)?.witness {
                return Err(QuiltError::NotEmbedded { x, y, y2, z });
            }
        }
        Ok(geometric_compose(self, next)?)
    }

    fn name(&self) -> String {
        format!("{}->{} ({} pairs)", self.source().label(), self.target().label(), self.len())
    }

    fn object_name(obj: &Arc<RepVariety>) -> String {
        obj.label().to_string()
    }

    fn same(&self, other: &Self) -> bool {
        self.same_as(other)
    }

    fn same_object(a: &Arc<RepVariety>, b: &Arc<RepVariety>) -> bool {
        same_variety(a, b)
    }
}

/// An abstract 1-morphism with a designated adjoint name.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenericLabel {
    pub name: String,
    pub dom: String,
    pub cod: String,
    pub adjoint: String,
}

impl GenericLabel {
    pub fn new(name: impl Into<String>, dom: impl Into<String>, cod: impl Into<String>) -> Self {
        let name = name.into();
        let adjoint = format!("{name}*");
        GenericLabel { name, dom: dom.into(), cod: cod.into(), adjoint }
    }
}

impl SeamLabel for GenericLabel {
    type Object = String;

    fn dom(&self) -> &String {
        &self.dom
    }

    fn cod(&self) -> &String {
        &self.cod
    }

    fn adjoint(&self) -> Self {
        GenericLabel {
            name: self.adjoint.clone(),
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            adjoint: self.name.clone(),
        }
    }

    fn then_label(&self, next: &Self, _check_embedded: bool) -> Result<Self, QuiltError> {
        if self.cod != next.dom {
            return Err(QuiltError::LabelMismatch(format!("{} then {}", self.name, next.name)));
        }
        Ok(GenericLabel {
            name: format!("{};{}", self.name, next.name),
            dom: self.dom.clone(),
            cod: next.cod.clone(),
            adjoint: format!("{};{}", next.adjoint, self.adjoint),
        })
    }

    fn name(&self) -> String {
        self.name.clone()
    }

    fn object_name(obj: &String) -> String {
        obj.clone()
    }
}

/// Patch adjacency of a seam: P⁻ and P⁺.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seam {
    pub minus: usize,
    pub plus: usize,
}

/// An end: its darts counterclockwise, or the surrounding patch when it has none.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct End {
    pub darts: Vec<Dart>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch: Option<usize>,
}

impl End {
    pub fn with_darts(darts: Vec<Dart>) -> Self {
        End { darts, patch: None }
    }

    pub fn empty(patch: usize) -> Self {
        End { darts: Vec::new(), patch: Some(patch) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuiltSurface {
    pub ends: Vec<End>,
    pub outgoing: usize,
    pub seams: Vec<Seam>,
    #[serde(default)]
    pub circles: Vec<Seam>,
    pub patch_genus: Vec<usize>,
}

/// Where each dart sits: (end, position).
type Locator = Vec<Option<(usize, usize)>>;

impl QuiltSurface {
    pub fn patch_count(&self) -> usize {
        self.patch_genus.len()
    }

    pub fn dart_count(&self) -> usize {
        2 * self.seams.len()
    }

    pub fn corner(&self, d: Dart) -> usize {
        let s = self.seams[seam_of(d)];
        if is_tail(d) {
            s.plus
        } else {
            s.minus
        }
    }

    pub fn incoming_ends(&self) -> Vec<usize> {
        (0..self.ends.len()).filter(|&e| e != self.outgoing).collect()
    }

    fn locate(&self) -> Locator {
        let mut loc = vec![None; self.dart_count()];
        for (e, end) in self.ends.iter().enumerate() {
            for (i, &d) in end.darts.iter().enumerate() {
                if d < loc.len() && loc[d].is_none() {
                    loc[d] = Some((e, i));
                }
            }
        }
        loc
    }

    fn sigma_with(&self, loc: &Locator, d: Dart) -> Dart {
        let (e, i) = loc[d].expect("located dart");
        let darts = &self.ends[e].darts;
        darts[(i + 1) % darts.len()]
    }

    fn sigma_inv_with(&self, loc: &Locator, d: Dart) -> Dart {
        let (e, i) = loc[d].expect("located dart");
        let darts = &self.ends[e].darts;
        darts[(i + darts.len() - 1) % darts.len()]
    }

    /// Next dart counterclockwise at the same end.
    pub fn sigma(&self, d: Dart) -> Dart {
        self.sigma_with(&self.locate(), d)
    }

    pub fn sigma_inv(&self, d: Dart) -> Dart {
        self.sigma_inv_with(&self.locate(), d)
    }

    pub fn end_of(&self, d: Dart) -> Option<usize> {
        self.locate().get(d).copied().flatten().map(|(e, _)| e)
    }

    fn faces_with(&self, loc: &Locator) -> Vec<Vec<Dart>> {
        let n = self.dart_count();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = start;
            while !seen[d] {
                seen[d] = true;
                orbit.push(d);
                d = alpha(self.sigma_with(loc, d));
            }
            out.push(orbit);
        }
        out
    }

    /// Orbits of d ↦ α(σ(d)), each starting at its least dart. Requires every
    /// dart to sit at exactly one end.
    pub fn face_orbits(&self) -> Vec<Vec<Dart>> {
        self.faces_with(&self.locate())
    }

    /// Boundary components of each patch: face orbits, seamless ends and circle sides.
    pub fn boundary_counts(&self) -> Vec<usize> {
        let mut b = vec![0; self.patch_count()];
        for orbit in self.face_orbits() {
            b[self.corner(orbit[0])] += 1;
        }
        for end in &self.ends {
            if end.darts.is_empty() {
                if let Some(p) = end.patch {
                    b[p] += 1;
                }
            }
        }
        for c in &self.circles {
            b[c.minus] += 1;
            b[c.plus] += 1;
        }
        b
    }

    /// χ of the closed surface obtained by capping the ends.
    pub fn euler_characteristic(&self) -> i64 {
        let b = self.boundary_counts();
        let patches: i64 = (0..self.patch_count()).map(|p| 2 - 2 * self.patch_genus[p] as i64 - b[p] as i64).sum();
        self.ends.len() as i64 - self.seams.len() as i64 + patches
    }

    pub fn genus(&self) -> Option<usize> {
        let chi = self.euler_characteristic();
        (chi <= 2 && chi % 2 == 0).then(|| ((2 - chi) / 2) as usize)
    }

    /// Darts of end e in reading order: counterclockwise for the outgoing end,
    /// clockwise from the first stored dart for incoming ends.
    pub fn reading_darts(&self, e: usize) -> Result<Vec<Dart>, QuiltError> {
        let end = self.ends.get(e).ok_or(QuiltError::InvalidEnd(e))?;
        let k = end.darts.len();
        if e == self.outgoing {
            Ok(end.darts.clone())
        } else {
            Ok((0..k).map(|i| end.darts[(k - i) % k]).collect())
        }
    }

    /// For each node of the reading of e, the dart starting its wedge; a
    /// seamless end has a single node with no dart.
    pub fn node_starts(&self, e: usize) -> Result<Vec<Option<Dart>>, QuiltError> {
        let r = self.reading_darts(e)?;
        if r.is_empty() {
            return Ok(vec![None]);
        }
        if e == self.outgoing {
            let loc = self.locate();
            Ok(r.iter().map(|&d| Some(self.sigma_inv_with(&loc, d))).collect())
        } else {
            Ok(r.into_iter().map(Some).collect())
        }
    }

    /// Patches of the nodes of the reading of e.
    pub fn node_patches(&self, e: usize) -> Result<Vec<usize>, QuiltError> {
        let starts = self.node_starts(e)?;
        starts
            .into_iter()
            .map(|s| match s {
                Some(d) => Ok(self.corner(d)),
                None => self.ends[e].patch.ok_or_else(|| QuiltError::Invalid(format!("end {e} has no patch"))),
            })
            .collect()
    }

    /// Structural checks; never panics.
    pub fn validate(&self) -> Vec<CheckEntry> {
        let mut out = Vec::new();
        let np = self.patch_count();
        out.push(if self.outgoing < self.ends.len() {
            CheckEntry::pass("outgoing")
        } else {
            CheckEntry::fail("outgoing", json!({"outgoing": self.outgoing, "ends": self.ends.len()}))
        });

        let n = self.dart_count();
        let mut count = vec![0usize; n];
        let mut stray = None;
        for (e, end) in self.ends.iter().enumerate() {
            for (i, &d) in end.darts.iter().enumerate() {
                if d < n {
                    count[d] += 1;
                } else if stray.is_none() {
                    stray = Some(json!({"end": e, "index": i, "dart": d}));
                }
            }
        }
        let bad = (0..n).find(|&d| count[d] != 1);
        let darts_ok = stray.is_none() && bad.is_none();
        out.push(match (stray, bad) {
            (Some(w), _) => CheckEntry::fail("seam_ends", w),
            (None, Some(d)) => CheckEntry::fail(
                "seam_ends",
                json!({"dart": d, "seam": seam_of(d), "occurrences": count[d], "index": d}),
            ),
            (None, None) => CheckEntry::pass("seam_ends"),
        });

        let mut bad_ref = None;
        for (s, seam) in self.seams.iter().enumerate() {
            if seam.minus >= np || seam.plus >= np {
                bad_ref.get_or_insert(json!({"seam": s}));
            }
        }
        for (c, seam) in self.circles.iter().enumerate() {
            if seam.minus >= np || seam.plus >= np {
                bad_ref.get_or_insert(json!({"circle": c}));
            }
        }
        for (e, end) in self.ends.iter().enumerate() {
            match (end.darts.is_empty(), end.patch) {
                (true, None) => {
                    bad_ref.get_or_insert(json!({"end": e, "reason": "seamless end without patch"}));
                }
                (_, Some(p)) if p >= np => {
                    bad_ref.get_or_insert(json!({"end": e, "patch": p}));
                }
                (false, Some(_)) => {
                    bad_ref.get_or_insert(json!({"end": e, "reason": "patch given for an end with seams"}));
                }
                _ => {}
            }
        }
        let refs_ok = bad_ref.is_none();
        out.push(match bad_ref {
            Some(w) => CheckEntry::fail("patch_indices", w),
            None => CheckEntry::pass("patch_indices"),
        });
        if !(darts_ok && refs_ok) || self.outgoing >= self.ends.len() {
            return out;
        }

        let faces = self.face_orbits();
        let bad_face = faces.iter().find(|o| o.iter().any(|&d| self.corner(d) != self.corner(o[0])));
        out.push(match bad_face {
            Some(o) => CheckEntry::fail(
                "faces",
                json!({"orbit": o, "patches": o.iter().map(|&d| self.corner(d)).collect::<Vec<_>>()}),
            ),
            None => CheckEntry::pass("faces"),
        });
        if bad_face.is_some() {
            return out;
        }

        let b = self.boundary_counts();
        out.push(match (0..np).find(|&p| b[p] == 0) {
            Some(p) => CheckEntry::fail("patches_used", json!({"isolated_patch": p})),
            None => CheckEntry::pass("patches_used"),
        });

        // patches and ends in one union-find
        let mut uf = UnionFind::new(np + self.ends.len());
        for (e, end) in self.ends.iter().enumerate() {
            for &d in &end.darts {
                uf.union(np + e, self.corner(d));
                uf.union(np + e, self.corner(alpha(d)));
            }
            if let Some(p) = end.patch {
                uf.union(np + e, p);
            }
        }
        for c in &self.circles {
            uf.union(c.minus, c.plus);
        }
        let root = uf.find(np + self.outgoing);
        out.push(match (0..np + self.ends.len()).find(|&x| uf.find(x) != root) {
            Some(x) if x < np => CheckEntry::fail("connected", json!({"patch": x})),
            Some(x) => CheckEntry::fail("connected", json!({"end": x - np})),
            None => CheckEntry::pass("connected"),
        });

        let chi = self.euler_characteristic();
        out.push(match self.genus() {
            Some(g) => CheckEntry::new("euler", true, Some(json!({"euler_characteristic": chi, "genus": g}))),
            None => CheckEntry::fail("euler", json!({"euler_characteristic": chi})),
        });
        out
    }
}

/// A labeled quilt. Each seam stores one label, oriented P⁻ → P⁺; reading it
/// the other way gives the adjoint, so opposite orientations are transposes.
#[derive(Debug, Clone, PartialEq)]
pub struct QuiltDiagram<L: SeamLabel> {
    pub surface: QuiltSurface,
    pub patch_labels: Vec<L::Object>,
    pub seam_labels: Vec<L>,
    pub circle_labels: Vec<L>,
}

pub type RelationQuilt = QuiltDiagram<FiniteRelation>;
pub type GenericQuilt = QuiltDiagram<GenericLabel>;

/// Labels met going counterclockwise around an end, with the node objects.
#[derive(Debug, Clone, PartialEq)]
pub struct EndReading<L: SeamLabel> {
    pub labels: Vec<L>,
    pub nodes: Vec<usize>,
    pub objects: Vec<L::Object>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub valid: bool,
    pub entries: Vec<CheckEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler_characteristic: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<usize>,
    pub patches: usize,
}

impl<L: SeamLabel> QuiltDiagram<L> {
    /// The label met when leaving along dart d: corner(α d) → corner(d).
    pub fn lab_from(&self, d: Dart) -> L {
        let l = &self.seam_labels[seam_of(d)];
        if is_tail(d) {
            l.clone()
        } else {
            l.adjoint()
        }
    }

    pub fn validate(&self) -> ValidationReport {
        let s = &self.surface;
        let mut entries = s.validate();
        let structural = entries.iter().all(CheckEntry::passed);
        let counts_ok = self.patch_labels.len() == s.patch_count()
            && self.seam_labels.len() == s.seams.len()
            && self.circle_labels.len() == s.circles.len();
        entries.push(if counts_ok {
            CheckEntry::pass("label_counts")
        } else {
            CheckEntry::fail(
                "label_counts",
                json!({
                    "patches": [s.patch_count(), self.patch_labels.len()],
                    "seams": [s.seams.len(), self.seam_labels.len()],
                    "circles": [s.circles.len(), self.circle_labels.len()],
                }),
            )
        });
        if counts_ok && entries.iter().take(3).all(CheckEntry::passed) {
            let mut bad = None;
            let all = s.seams.iter().zip(&self.seam_labels).map(|x| ("seam", x));
            let circles = s.circles.iter().zip(&self.circle_labels).map(|x| ("circle", x));
            for (i, (kind, (seam, label))) in all.chain(circles).enumerate() {
                let dom_ok = L::same_object(label.dom(), &self.patch_labels[seam.minus]);
                let cod_ok = L::same_object(label.cod(), &self.patch_labels[seam.plus]);
                if !(dom_ok && cod_ok) && bad.is_none() {
                    let index = if kind == "seam" { i } else { i - s.seams.len() };
                    bad = Some(json!({
                        "kind": kind,
                        "index": index,
                        "label": label.name(),
                        "minus": L::object_name(&self.patch_labels[seam.minus]),
                        "plus": L::object_name(&self.patch_labels[seam.plus]),
                    }));
                }
            }
            entries.push(match bad {
                Some(w) => CheckEntry::fail("label_endpoints", w),
                None => CheckEntry::pass("label_endpoints"),
            });
        }
        let valid = entries.iter().all(CheckEntry::passed);
        ValidationReport {
            valid,
            entries,
            euler_characteristic: structural.then(|| s.euler_characteristic()),
            genus: if structural { s.genus() } else { None },
            patches: s.patch_count(),
        }
    }

    pub fn require_valid(&self) -> Result<(), QuiltError> {
        let r = self.validate();
        match r.entries.iter().find(|e| !e.passed()) {
            None => Ok(()),
            Some(e) => Err(QuiltError::Invalid(format!(
                "{}: {}",
                e.check,
                e.witness.as_ref().map(|w| w.to_string()).unwrap_or_default()
            ))),
        }
    }

    /// Labels crossed going around end e in its reading order. Crossing dart
    /// d of the outgoing end counterclockwise meets lab_from(d); crossing a
    /// dart of an incoming end clockwise meets its adjoint.
    pub fn end_reading(&self, e: usize) -> Result<EndReading<L>, QuiltError> {
        let darts = self.surface.reading_darts(e)?;
        let outgoing = e == self.surface.outgoing;
        let labels = darts
            .iter()
            .map(|&d| if outgoing { self.lab_from(d) } else { self.lab_from(d).adjoint() })
            .collect();
        let nodes = self.surface.node_patches(e)?;
        let objects = nodes.iter().map(|&p| self.patch_labels[p].clone()).collect();
        Ok(EndReading { labels, nodes, objects })
    }

    /// Least rotation r with reading(a)[i] = reading(b)[(i + r) % k], or the
    /// first disagreeing position at rotation 0.
    pub(crate) fn match_readings(a: &EndReading<L>, b: &EndReading<L>) -> Result<usize, QuiltError> {
        let k = a.labels.len();
        if k != b.labels.len() {
            return Err(QuiltError::CyclicMismatch { position: k.min(b.labels.len()) });
        }
        if k == 0 {
            return if L::same_object(&a.objects[0], &b.objects[0]) {
                Ok(0)
            } else {
                Err(QuiltError::CyclicMismatch { position: 0 })
            };
        }
        let mismatch = |r: usize| {
            (0..k).find(|&i| {
                let j = (i + r) % k;
                !(a.labels[i].same(&b.labels[j]) && L::same_object(&a.objects[i], &b.objects[j]))
            })
        };
        for r in 0..k {
            if mismatch(r).is_none() {
                return Ok(r);
            }
        }
        Err(QuiltError::CyclicMismatch { position: mismatch(0).unwrap_or(0) })
    }
}

impl QuiltDiagram<FiniteRelation> {
    /// The cyclic chain of an end; a seamless end gives the diagonal of its patch.
    pub fn end_cyclic_morphism(&self, e: usize) -> Result<CyclicChain, QuiltError> {
        let r = self.end_reading(e)?;
        if r.labels.is_empty() {
            return Ok(CyclicChain::new(vec![FiniteRelation::diagonal(r.objects[0].clone())])?);
        }
        Ok(CyclicChain::new(r.labels)?)
    }
}

pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    /// Keeps the smaller root.
    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}
