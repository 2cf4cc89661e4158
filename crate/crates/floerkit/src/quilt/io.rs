use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{End, GenericLabel, QuiltDiagram, QuiltError, QuiltSurface, Seam, SeamLabel};
use crate::algebra::Elem;
use crate::repvar::{FiniteRelation, RepVariety};

/// A variety given by size (points 0..n) or by explicit points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VarietySpec {
    Size(usize),
    Points(Vec<Vec<Elem>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RelationSpec {
    pub source: String,
    pub target: String,
    pub pairs: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneCellSpec {
    pub dom: String,
    pub cod: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adjoint: Option<String>,
}

/// Diagram file. Darts are numbered 2·seam for the tail and 2·seam+1 for the
/// head; seam labels name a relation (relation mode) or a 1-cell (generic
/// mode), with a `^T` suffix for the adjoint.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct QuiltFile {
    pub ends: Vec<End>,
    pub outgoing: usize,
    #[serde(default)]
    pub seams: Vec<Seam>,
    #[serde(default)]
    pub circle_seams: Vec<Seam>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub patch_genus: Option<Vec<usize>>,
    pub patch_labels: BTreeMap<usize, String>,
    #[serde(default)]
    pub seam_labels: BTreeMap<usize, String>,
    #[serde(default)]
    pub circle_labels: BTreeMap<usize, String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub varieties: BTreeMap<String, VarietySpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub relations: BTreeMap<String, RelationSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub one_cells: BTreeMap<String, OneCellSpec>,
}

fn err(msg: impl Into<String>) -> QuiltError {
    QuiltError::File(msg.into())
}

fn collect_labels<T: Clone>(
    what: &str,
    n: usize,
    names: &BTreeMap<usize, String>,
    resolve: &dyn Fn(&str) -> Result<T, QuiltError>,
) -> Result<Vec<T>, QuiltError> {
    (0..n)
        .map(|i| {
            let name = names.get(&i).ok_or_else(|| err(format!("{what} {i} has no label")))?;
            resolve(name)
        })
        .collect()
}

impl QuiltFile {
    pub fn is_relation_mode(&self) -> bool {
        !self.relations.is_empty() || !self.varieties.is_empty()
    }

    fn surface(&self) -> QuiltSurface {
        let patches = self.patch_labels.keys().next_back().map_or(0, |&k| k + 1);
        QuiltSurface {
            ends: self.ends.clone(),
            outgoing: self.outgoing,
            seams: self.seams.clone(),
            circles: self.circle_seams.clone(),
            patch_genus: self.patch_genus.clone().unwrap_or_else(|| vec![0; patches]),
        }
    }

    fn split(name: &str) -> (&str, bool) {
        match name.strip_suffix("^T") {
            Some(base) => (base, true),
            None => (name, false),
        }
    }

    pub fn to_relation_diagram(&self) -> Result<QuiltDiagram<FiniteRelation>, QuiltError> {
        let surface = self.surface();
        let varieties: BTreeMap<&str, Arc<RepVariety>> = self
            .varieties
            .iter()
            .map(|(name, spec)| {
                let v = match spec {
                    VarietySpec::Size(n) => RepVariety::abstract_set(name.clone(), *n),
                    VarietySpec::Points(p) => RepVariety::from_points(name.clone(), p.clone()),
                };
                (name.as_str(), Arc::new(v))
            })
            .collect();
        let variety = |name: &str| varieties.get(name).cloned().ok_or_else(|| err(format!("unknown variety {name}")));
        let mut relations = BTreeMap::new();
        for (name, spec) in &self.relations {
            let r = FiniteRelation::new(variety(&spec.source)?, variety(&spec.target)?, spec.pairs.iter().copied())
                .map_err(|e| err(format!("relation {name}: {e}")))?;
            relations.insert(name.as_str(), r);
        }
        let resolve = |name: &str| -> Result<FiniteRelation, QuiltError> {
            let (base, t) = Self::split(name);
            let r = relations.get(base).ok_or_else(|| err(format!("unknown relation {base}")))?;
            Ok(if t { r.transpose() } else { r.clone() })
        };
        let patch_labels = collect_labels("patch", surface.patch_count(), &self.patch_labels, &variety)?;
        let seam_labels = collect_labels("seam", surface.seams.len(), &self.seam_labels, &resolve)?;
        let circle_labels = collect_labels("circle", surface.circles.len(), &self.circle_labels, &resolve)?;
        Ok(QuiltDiagram { surface, patch_labels, seam_labels, circle_labels })
    }

    pub fn to_generic_diagram(&self) -> Result<QuiltDiagram<GenericLabel>, QuiltError> {
        let surface = self.surface();
        let resolve = |name: &str| -> Result<GenericLabel, QuiltError> {
            let (base, t) = Self::split(name);
            let label = match self.one_cells.get(base) {
                Some(c) => GenericLabel {
                    name: base.to_string(),
                    dom: c.dom.clone(),
                    cod: c.cod.clone(),
                    adjoint: c.adjoint.clone().unwrap_or_else(|| format!("{base}*")),
                },
                None => {
                    let (k, c) = self
                        .one_cells
                        .iter()
                        .find(|(_, c)| c.adjoint.as_deref() == Some(base))
                        .ok_or_else(|| err(format!("unknown 1-cell {base}")))?;
                    GenericLabel { name: base.to_string(), dom: c.cod.clone(), cod: c.dom.clone(), adjoint: k.clone() }
                }
            };
            Ok(if t { label.adjoint() } else { label })
        };
        let object = |name: &str| Ok(name.to_string());
        let patch_labels = collect_labels("patch", surface.patch_count(), &self.patch_labels, &object)?;
        let seam_labels = collect_labels("seam", surface.seams.len(), &self.seam_labels, &resolve)?;
        let circle_labels = collect_labels("circle", surface.circles.len(), &self.circle_labels, &resolve)?;
        Ok(QuiltDiagram { surface, patch_labels, seam_labels, circle_labels })
    }

    /// Writes a relation diagram with one named relation per seam and circle.
    pub fn from_relation_diagram(q: &QuiltDiagram<FiniteRelation>) -> Self {
        let mut file = Self::base(&q.surface);
        let mut names: Vec<(Arc<RepVariety>, String)> = Vec::new();
        let mut name_of = |v: &Arc<RepVariety>, file: &mut QuiltFile| -> String {
            if let Some((_, n)) = names.iter().find(|(w, _)| Arc::ptr_eq(w, v) || **w == **v) {
                return n.clone();
            }
            let mut n = v.label().to_string();
            if file.varieties.contains_key(&n) {
                n = format!("{n}#{}", names.len());
            }
            file.varieties.insert(n.clone(), VarietySpec::Points(v.points().to_vec()));
            names.push((v.clone(), n.clone()));
            n
        };
        for (p, v) in q.patch_labels.iter().enumerate() {
            let n = name_of(v, &mut file);
            file.patch_labels.insert(p, n);
        }
        let mut add = |key: String, r: &FiniteRelation, file: &mut QuiltFile| {
            let source = name_of(r.source(), file);
            let target = name_of(r.target(), file);
            let pairs = r.pairs().iter().map(|&(x, y)| (x as usize, y as usize)).collect();
            file.relations.insert(key.clone(), RelationSpec { source, target, pairs });
            key
        };
        for (s, r) in q.seam_labels.iter().enumerate() {
            let key = add(format!("R{s}"), r, &mut file);
            file.seam_labels.insert(s, key);
        }
        for (c, r) in q.circle_labels.iter().enumerate() {
            let key = add(format!("C{c}"), r, &mut file);
            file.circle_labels.insert(c, key);
        }
        file
    }

    pub fn from_generic_diagram(q: &QuiltDiagram<GenericLabel>) -> Self {
        let mut file = Self::base(&q.surface);
        for (p, v) in q.patch_labels.iter().enumerate() {
            file.patch_labels.insert(p, v.clone());
        }
        let labels = q.seam_labels.iter().map(|l| (true, l)).chain(q.circle_labels.iter().map(|l| (false, l)));
        for (i, (is_seam, l)) in labels.enumerate() {
            let known = file.one_cells.contains_key(&l.name);
            let adjoint_known = file.one_cells.contains_key(&l.adjoint);
            let name = if known || !adjoint_known {
                file.one_cells.insert(
                    l.name.clone(),
                    OneCellSpec { dom: l.dom.clone(), cod: l.cod.clone(), adjoint: Some(l.adjoint.clone()) },
                );
                l.name.clone()
            } else {
                format!("{}^T", l.adjoint)
            };
            if is_seam {
                file.seam_labels.insert(i, name);
            } else {
                file.circle_labels.insert(i - q.seam_labels.len(), name);
            }
        }
        file
    }

    fn base(s: &QuiltSurface) -> Self {
        QuiltFile {
            ends: s.ends.clone(),
            outgoing: s.outgoing,
            seams: s.seams.clone(),
            circle_seams: s.circles.clone(),
            patch_genus: s.patch_genus.iter().any(|&g| g > 0).then(|| s.patch_genus.clone()),
            ..Default::default()
        }
    }
}

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// DOT graph: ends as nodes, one cluster per patch, seams as edges between
/// ends and circle seams as dashed edges between patches.
pub fn export_dot<L: SeamLabel>(q: &QuiltDiagram<L>) -> String {
    let s = &q.surface;
    let mut out = String::from("graph quilt {\n");
    for (p, obj) in q.patch_labels.iter().enumerate() {
        let genus = s.patch_genus.get(p).copied().unwrap_or(0);
        let label = if genus > 0 { format!("P{p}: {} (genus {genus})", L::object_name(obj)) } else {
            format!("P{p}: {}", L::object_name(obj))
        };
        let _ = writeln!(out, "  subgraph cluster_p{p} {{\n    label={};\n    p{p} [shape=point];\n  }}", quote(&label));
    }
    for (e, end) in s.ends.iter().enumerate() {
        let kind = if e == s.outgoing { "outgoing" } else { "incoming" };
        let shape = if e == s.outgoing { "doublecircle" } else { "circle" };
        let _ = writeln!(out, "  e{e} [shape={shape}, label={}];", quote(&format!("e{e} ({kind})")));
        if let Some(p) = end.patch {
            let _ = writeln!(out, "  e{e} -- p{p} [style=dotted];");
        }
    }
    let end_of: Vec<Option<usize>> = (0..s.dart_count()).map(|d| s.end_of(d)).collect();
    for (i, l) in q.seam_labels.iter().enumerate() {
        let (t, h) = (end_of[2 * i].unwrap_or(usize::MAX), end_of[2 * i + 1].unwrap_or(usize::MAX));
        let _ = writeln!(
            out,
            "  e{t} -- e{h} [label={}];",
            quote(&format!("s{i}: {} (P{} -> P{})", l.name(), s.seams[i].minus, s.seams[i].plus))
        );
    }
    for (i, (c, l)) in s.circles.iter().zip(&q.circle_labels).enumerate() {
        let _ = writeln!(out, "  p{} -- p{} [style=dashed, label={}];", c.minus, c.plus, quote(&format!("c{i}: {}", l.name())));
    }
    out.push_str("}\n");
    out
}
