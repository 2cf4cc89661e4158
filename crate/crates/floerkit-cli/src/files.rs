//! JSON file formats read and written by the command line.

use std::path::Path;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use floerkit::algebra::{Elem, FiniteGroup, SurfaceAutomorphism, Word};
use floerkit::bordism::{AttachingCircle, CobordismChain, SimpleCobordism};
use floerkit::repvar::{FiniteRelation, RepVariety};

use crate::CliError;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))
}

/// Cayley table with the identity at index 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupFile {
    pub name: String,
    pub order: usize,
    pub mul: Vec<Vec<usize>>,
}

impl GroupFile {
    pub fn from_group(g: &FiniteGroup) -> Self {
        GroupFile { name: g.name().to_string(), order: g.order(), mul: g.table() }
    }

    pub fn to_group(&self) -> Result<FiniteGroup, CliError> {
        if self.mul.len() != self.order {
            return Err(CliError::Input(format!("order {} but {} table rows", self.order, self.mul.len())));
        }
        FiniteGroup::load(self.name.clone(), &self.mul).map_err(|e| CliError::Input(e.to_string()))
    }
}

/// Group from a file path, or by name (`Z4`, `S3`, `D3`, `Q8`, `trivial`).
pub fn load_group(spec: &str) -> Result<FiniteGroup, CliError> {
    let path = Path::new(spec);
    if path.exists() {
        return read_json::<GroupFile>(path)?.to_group();
    }
    FiniteGroup::by_name(spec).ok_or_else(|| CliError::Input(format!("{spec}: no such file or group name")))
}

/// Words are lists of [generator, ±1] with a_i = 2i−1 and b_i = 2i.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AutomorphismFile {
    pub genus: usize,
    pub images: Vec<Vec<(i64, i64)>>,
    pub inverse_images: Vec<Vec<(i64, i64)>>,
}

impl AutomorphismFile {
    pub fn from_automorphism(phi: &SurfaceAutomorphism) -> Self {
        let words = |ws: &[Word]| ws.iter().map(Word::pairs).collect();
        AutomorphismFile { genus: phi.genus(), images: words(phi.images()), inverse_images: words(phi.inverse_images()) }
    }

    pub fn to_automorphism(&self) -> Result<SurfaceAutomorphism, CliError> {
        let words = |ws: &[Vec<(i64, i64)>]| -> Result<Vec<Word>, CliError> {
            ws.iter().map(|w| Word::from_pairs(self.genus, w).map_err(|e| CliError::Input(e.to_string()))).collect()
        };
        SurfaceAutomorphism::new(self.genus, words(&self.images)?, words(&self.inverse_images)?)
            .map_err(|e| CliError::Input(e.to_string()))
    }
}

/// A library name such as `S1` or `Ta2`, or an inline automorphism.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AutoRef {
    Named(String),
    Inline(AutomorphismFile),
}

impl AutoRef {
    fn resolve(&self, genus: usize) -> Result<SurfaceAutomorphism, CliError> {
        match self {
            AutoRef::Named(name) => SurfaceAutomorphism::library(genus)
                .into_iter()
                .find(|(n, _)| n == name)
                .map(|(_, phi)| phi)
                .ok_or_else(|| CliError::Input(format!("no automorphism named {name} at genus {genus}"))),
            AutoRef::Inline(f) => {
                if f.genus != genus {
                    return Err(CliError::Input(format!("automorphism has genus {}, step has {genus}", f.genus)));
                }
                f.to_automorphism()
            }
        }
    }
}

/// One simple cobordism. For attachments `genus` is the genus of the surface
/// carrying the attaching circle, which is the higher of the two.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepFile {
    pub kind: String,
    #[serde(default)]
    pub genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub auto: Option<AutoRef>,
}

impl StepFile {
    pub fn from_step(s: &SimpleCobordism) -> Self {
        let inline = |phi: &SurfaceAutomorphism| Some(AutoRef::Inline(AutomorphismFile::from_automorphism(phi)));
        match s {
            SimpleCobordism::Cyl(phi) => StepFile { kind: "cyl".into(), genus: phi.genus(), auto: inline(phi) },
            SimpleCobordism::Attach2(c) => StepFile { kind: "attach2".into(), genus: c.genus(), auto: inline(c.transport()) },
            SimpleCobordism::Attach1(c) => StepFile { kind: "attach1".into(), genus: c.genus(), auto: inline(c.transport()) },
            SimpleCobordism::Cap3 => StepFile { kind: "cap3".into(), genus: 0, auto: None },
            SimpleCobordism::Cap0 => StepFile { kind: "cap0".into(), genus: 0, auto: None },
        }
    }

    pub fn to_step(&self) -> Result<SimpleCobordism, CliError> {
        let phi = || match &self.auto {
            Some(a) => a.resolve(self.genus),
            None => Ok(SurfaceAutomorphism::identity(self.genus)),
        };
        let circle = || -> Result<AttachingCircle, CliError> {
            AttachingCircle::new(phi()?).map_err(|e| CliError::Input(e.to_string()))
        };
        Ok(match self.kind.as_str() {
            "cyl" => SimpleCobordism::Cyl(phi()?),
            "attach2" => SimpleCobordism::Attach2(circle()?),
            "attach1" => SimpleCobordism::Attach1(circle()?),
            "cap3" => SimpleCobordism::Cap3,
            "cap0" => SimpleCobordism::Cap0,
            other => return Err(CliError::Input(format!("unknown step kind {other}"))),
        })
    }
}

pub fn chain_to_file(c: &CobordismChain) -> Vec<StepFile> {
    c.steps().iter().map(StepFile::from_step).collect()
}

pub fn load_chain(path: &Path) -> Result<CobordismChain, CliError> {
    let steps: Vec<StepFile> = read_json(path)?;
    let steps = steps.iter().map(StepFile::to_step).collect::<Result<Vec<_>, _>>()?;
    CobordismChain::new(steps).map_err(|e| CliError::Check(e.to_string()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarietyFile {
    pub label: String,
    pub points: Vec<Vec<Elem>>,
}

impl VarietyFile {
    pub fn from_variety(v: &RepVariety) -> Self {
        VarietyFile { label: v.label().to_string(), points: v.points().to_vec() }
    }
}

/// A relation with both varieties spelled out; pairs index the points as listed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelationFile {
    pub source: VarietyFile,
    pub target: VarietyFile,
    pub pairs: Vec<(u32, u32)>,
}

impl RelationFile {
    pub fn from_relation(r: &FiniteRelation) -> Self {
        RelationFile {
            source: VarietyFile::from_variety(r.source()),
            target: VarietyFile::from_variety(r.target()),
            pairs: r.pairs().to_vec(),
        }
    }
}

/// Loads relations so that equal varieties are shared between consecutive files.
pub fn load_relations(paths: &[std::path::PathBuf]) -> Result<Vec<FiniteRelation>, CliError> {
    let mut known: Vec<Arc<RepVariety>> = Vec::new();
    let mut intern = |v: &VarietyFile| -> Arc<RepVariety> {
        let fresh = RepVariety::from_points(v.label.clone(), v.points.clone());
        if let Some(k) = known.iter().find(|k| ***k == fresh) {
            return k.clone();
        }
        let a = Arc::new(fresh);
        known.push(a.clone());
        a
    };
    let mut out = Vec::new();
    for p in paths {
        let f: RelationFile = read_json(p)?;
        let (s, t) = (intern(&f.source), intern(&f.target));
        let bad = |x: u32, y: u32| CliError::Input(format!("{}: pair ({x}, {y}) is out of range", p.display()));
        // listed point index -> sorted point index
        let pairs = f
            .pairs
            .iter()
            .map(|&(x, y)| {
                let a = f.source.points.get(x as usize).and_then(|pt| s.index_of(pt));
                let b = f.target.points.get(y as usize).and_then(|pt| t.index_of(pt));
                a.zip(b).ok_or_else(|| bad(x, y))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let r = FiniteRelation::new(s, t, pairs).map_err(|e| CliError::Input(format!("{}: {e}", p.display())))?;
        out.push(r);
    }
    Ok(out)
}
