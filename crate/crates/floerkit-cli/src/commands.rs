use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use floerkit::bordism::{cerf_apply, cerf_connected, cerf_neighbors, BordObject, CobordismChain};
use floerkit::cat::{quotient_by_2isos, yoneda, BicategoryFile, CatError, CategoryFile, FinBicategory, FinCategory};
use floerkit::config::RunConfig;
use floerkit::fieldfun::{closed_invariant, presentation_oracle, verify_cerf_compatibility, PartialFunctorSpec, Presentation};
use floerkit::quilt::{export_dot, quilt_glue, shrink_strip, shrink_strip_unchecked, QuiltDiagram, QuiltFile, SeamLabel};
use floerkit::relcat::{generator_set, geometric_compose, is_embedded, CyclicChain};
use floerkit::report::CheckEntry;
use floerkit::repvar::{repvariety, FiniteRelation, RepContext};

use crate::files::{self, chain_to_file, load_chain, load_group, load_relations, read_json, AutomorphismFile, RelationFile, StepFile};
use crate::{Body, CliError, Command, Output};

pub fn run(cmd: &Command, cfg: &RunConfig) -> Result<Output, CliError> {
    let budget = cfg.budget;
    match cmd {
        Command::GroupCheck { group, automorphisms } => group_check(group, automorphisms, budget),
        Command::Repvar { group, genus } => {
            let g = load_group(group)?;
            let v = repvariety(&g, BordObject::Surface(*genus), budget).map_err(|e| CliError::failed("repvar", e))?;
            Ok(Output::data(json!({
                "group": g.name(), "genus": genus, "count": v.len(), "points": v.points(),
            })))
        }
        Command::Lagrangian { group, step } => {
            let ctx = RepContext::with_budget(load_group(group)?, budget);
            let s = read_json::<StepFile>(step)?.to_step()?;
            let r = ctx.relation_of_simple(&s).map_err(|e| CliError::failed("lagrangian", e))?;
            Ok(Output::data(json!(RelationFile::from_relation(&r))))
        }
        Command::Compose { relations } => {
            let rels = load_relations(relations)?;
            let mut acc = rels[0].clone();
            for r in &rels[1..] {
                acc = geometric_compose(&acc, r).map_err(|e| CliError::failed("compose", e))?;
            }
            Ok(Output::data(json!(RelationFile::from_relation(&acc))))
        }
        Command::Embedded { first, second } => {
            let rels = load_relations(&[first.clone(), second.clone()])?;
            let e = is_embedded(&rels[0], &rels[1]).map_err(|e| CliError::failed("embedded", e))?;
            let witness = match e.witness {
                None => json!({ "triples": e.triples, "composite_size": e.composite_size }),
                Some((x, y, y2, z)) => json!({
                    "x": rels[0].source().points()[x], "y": rels[0].target().points()[y],
                    "y_alt": rels[0].target().points()[y2], "z": rels[1].target().points()[z],
                }),
            };
            Ok(Output::report(vec![CheckEntry::new("embedded", e.embedded, Some(witness))]))
        }
        Command::Generators { cyclic, relations } => {
            let rels = load_relations(relations)?;
            let tuples = if *cyclic {
                let c = CyclicChain::new(rels).map_err(|e| CliError::failed("generators", e))?;
                generator_set(&c, budget).map_err(|e| CliError::failed("generators", e))?.tuples
            } else {
                path_tuples(&rels)?
            };
            Ok(Output::data(json!({ "cyclic": cyclic, "count": tuples.len(), "tuples": tuples })))
        }
        Command::Invariant { chain, group } => {
            let spec = PartialFunctorSpec::new(load_group(group)?, budget);
            let c = load_chain(chain)?;
            let (gens, n) = closed_invariant(&spec, &c).map_err(|e| CliError::failed("invariant", e))?;
            Ok(Output::data(json!({ "group": spec.group().name(), "count": n, "generators": gens.tuples })))
        }
        Command::VerifyCerf { group, genus } => {
            if *genus == 0 {
                return Err(CliError::Usage("--genus must be at least 1".into()));
            }
            let spec = PartialFunctorSpec::new(load_group(group)?, budget);
            let entries = verify_cerf_compatibility(&spec, *genus).map_err(|e| CliError::failed("verify-cerf", e))?;
            Ok(Output::report(entries))
        }
        Command::Oracle { presentation, group } => {
            let g = load_group(group)?;
            let p: Presentation = read_json(presentation)?;
            let n = presentation_oracle(&g, &p, budget).map_err(|e| CliError::failed("oracle", e))?;
            Ok(Output::data(json!({ "group": g.name(), "count": n })))
        }
        Command::BordismValidate { chain } => {
            let steps: Vec<StepFile> = read_json(chain)?;
            let steps = steps.iter().map(StepFile::to_step).collect::<Result<Vec<_>, _>>()?;
            let entry = match CobordismChain::new(steps) {
                Ok(c) => CheckEntry::new(
                    "chain",
                    true,
                    Some(json!({ "source": c.source().to_string(), "target": c.target().to_string(), "steps": c.len() })),
                ),
                Err(e) => CheckEntry::fail("chain", json!({ "error": e.to_string() })),
            };
            Ok(Output::report(vec![entry]))
        }
        Command::BordismNeighbors { chain } => {
            let c = load_chain(chain)?;
            let list: Vec<Value> = cerf_neighbors(&c)
                .iter()
                .map(|(m, next)| json!({ "move": m.describe(), "chain": chain_to_file(next) }))
                .collect();
            Ok(Output::data(json!(list)))
        }
        Command::BordismConnect { chain, to, depth } => {
            let (a, b) = (load_chain(chain)?, load_chain(to)?);
            let path = cerf_connected(&a, &b, *depth).map_err(|e| CliError::failed("bordism-connect", e))?;
            let entry = match path {
                Some(moves) => {
                    let mut cur = a.clone();
                    let mut steps = Vec::new();
                    for m in &moves {
                        cur = cerf_apply(&cur, m).map_err(|e| CliError::failed("bordism-connect", e))?;
                        steps.push(json!({ "move": m.describe(), "chain": chain_to_file(&cur) }));
                    }
                    CheckEntry::new("connected", true, Some(json!({ "length": moves.len(), "path": steps })))
                }
                None => CheckEntry::fail("connected", json!({ "depth": depth, "reason": "no move sequence within the depth" })),
            };
            Ok(Output::report(vec![entry]))
        }
        Command::QuiltValidate { quilt } => {
            let f: QuiltFile = read_json(quilt)?;
            let report = if f.is_relation_mode() {
                f.to_relation_diagram().map_err(|e| CliError::Input(e.to_string()))?.validate()
            } else {
                f.to_generic_diagram().map_err(|e| CliError::Input(e.to_string()))?.validate()
            };
            let ok = report.valid;
            Ok(Output { body: Body::Json(json!(report)), ok })
        }
        Command::QuiltGlue { first, second, end } => {
            let (f1, f2): (QuiltFile, QuiltFile) = (read_json(first)?, read_json(second)?);
            let fail = |e| CliError::failed("quilt-glue", e);
            let file = match (f1.is_relation_mode(), f2.is_relation_mode()) {
                (true, true) => {
                    let (q1, q2) = (relation_quilt(&f1)?, relation_quilt(&f2)?);
                    QuiltFile::from_relation_diagram(&quilt_glue(&q1, &q2, *end).map_err(fail)?)
                }
                (false, false) => {
                    let (q1, q2) = (generic_quilt(&f1)?, generic_quilt(&f2)?);
                    QuiltFile::from_generic_diagram(&quilt_glue(&q1, &q2, *end).map_err(fail)?)
                }
                _ => return Err(CliError::Input("cannot glue a relation diagram to a generic one".into())),
            };
            Ok(Output::data(json!(file)))
        }
        Command::QuiltShrink { quilt, patch, unchecked } => {
            let f: QuiltFile = read_json(quilt)?;
            if f.is_relation_mode() {
                shrink_output(&relation_quilt(&f)?, *patch, *unchecked, QuiltFile::from_relation_diagram)
            } else {
                shrink_output(&generic_quilt(&f)?, *patch, *unchecked, QuiltFile::from_generic_diagram)
            }
        }
        Command::QuiltEval { quilt, input } => {
            let f: QuiltFile = read_json(quilt)?;
            if !f.is_relation_mode() {
                return Err(CliError::Input("evaluation needs a relation-mode diagram".into()));
            }
            let q = relation_quilt(&f)?;
            let fail = |e| CliError::failed("quilt-eval", e);
            match input {
                Some(path) => {
                    let inputs: Vec<Vec<u32>> = read_json(path)?;
                    let outputs = q.quilt_evaluate(&inputs, budget).map_err(fail)?;
                    Ok(Output::data(json!({ "inputs": inputs, "outputs": outputs })))
                }
                None => {
                    let ev = q.evaluate_all(budget).map_err(fail)?;
                    let map: Vec<Value> =
                        ev.map.iter().map(|(i, o)| json!({ "inputs": i, "outputs": o })).collect();
                    Ok(Output::data(json!({ "incoming_ends": ev.incoming, "map": map })))
                }
            }
        }
        Command::QuiltExportDot { quilt } => {
            let f: QuiltFile = read_json(quilt)?;
            let dot = if f.is_relation_mode() { export_dot(&relation_quilt(&f)?) } else { export_dot(&generic_quilt(&f)?) };
            Ok(Output { body: Body::Dot(dot), ok: true })
        }
        Command::CatValidate { file } => {
            let v: Value = read_json(file)?;
            let (name, r) = if v.get("one_cells").is_some() {
                let f: BicategoryFile = parse(v)?;
                ("bicategory", FinBicategory::from_file(f).and_then(|b| b.validate()))
            } else {
                let f: CategoryFile = parse(v)?;
                ("category", FinCategory::from_file(f).and_then(|c| c.validate()))
            };
            Ok(Output::report(vec![cat_entry(name, r)]))
        }
        Command::CatYoneda { file, base } => {
            let b = load_bicategory(file)?;
            match yoneda(&b, *base) {
                Ok(img) => Ok(Output::data(json!({
                    "base": img.base,
                    "categories": img.categories.iter().map(|c| c.to_file()).collect::<Vec<_>>(),
                    "objects_of": img.objects_of,
                    "functors": img.functors.iter().map(|f| json!({ "ob": f.ob, "mor": f.mor })).collect::<Vec<_>>(),
                    "transformations": img.transformations.iter().map(|t| json!(t.components)).collect::<Vec<_>>(),
                }))),
                Err(e) => Ok(Output::report(vec![cat_entry("yoneda", Err(e))])),
            }
        }
        Command::CatQuotient { file } => {
            let b = load_bicategory(file)?;
            match quotient_by_2isos(&b) {
                Ok(q) => Ok(Output::data(json!({ "category": q.category.to_file(), "class_of": q.class_of }))),
                Err(e) => Ok(Output::report(vec![cat_entry("quotient", Err(e))])),
            }
        }
    }
}

fn parse<T: serde::de::DeserializeOwned>(v: Value) -> Result<T, CliError> {
    serde_json::from_value(v).map_err(|e| CliError::Input(e.to_string()))
}

fn load_bicategory(path: &Path) -> Result<FinBicategory, CliError> {
    FinBicategory::from_file(read_json(path)?).map_err(|e| CliError::Input(e.to_string()))
}

fn cat_entry(name: &str, r: Result<(), CatError>) -> CheckEntry {
    match r {
        Ok(()) => CheckEntry::pass(name),
        Err(e) => CheckEntry::fail(name, json!({ "error": e.to_string(), "violation": e })),
    }
}

fn relation_quilt(f: &QuiltFile) -> Result<QuiltDiagram<FiniteRelation>, CliError> {
    f.to_relation_diagram().map_err(|e| CliError::Input(e.to_string()))
}

fn generic_quilt(f: &QuiltFile) -> Result<QuiltDiagram<floerkit::quilt::GenericLabel>, CliError> {
    f.to_generic_diagram().map_err(|e| CliError::Input(e.to_string()))
}

fn shrink_output<L: SeamLabel>(
    q: &QuiltDiagram<L>,
    patch: usize,
    unchecked: bool,
    write: fn(&QuiltDiagram<L>) -> QuiltFile,
) -> Result<Output, CliError> {
    let r = if unchecked { shrink_strip_unchecked(q, patch) } else { shrink_strip(q, patch) }
        .map_err(|e| CliError::failed("quilt-shrink", e))?;
    Ok(Output::data(json!({
        "quilt": write(&r.diagram),
        "patch_map": r.patch_map,
        "node_maps": r.node_maps,
    })))
}

/// Tuples (m₀, …, m_k) with (m_i, m_{i+1}) in the i-th relation, in lexicographic order.
fn path_tuples(rels: &[FiniteRelation]) -> Result<Vec<Vec<u32>>, CliError> {
    for (i, w) in rels.windows(2).enumerate() {
        if !floerkit::repvar::same_variety(w[0].target(), w[1].source()) {
            return Err(CliError::failed("generators", format!("relations {i} and {} are not composable", i + 1)));
        }
    }
    let fwd: Vec<Vec<Vec<u32>>> = rels.iter().map(FiniteRelation::forward_lists).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(rels.len() + 1);
    fn extend(fwd: &[Vec<Vec<u32>>], cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        let i = cur.len() - 1;
        if i == fwd.len() {
            out.push(cur.clone());
            return;
        }
        for &n in &fwd[i][cur[i] as usize] {
            cur.push(n);
            extend(fwd, cur, out);
            cur.pop();
        }
    }
    for x in 0..rels[0].source().len() as u32 {
        cur.push(x);
        extend(&fwd, &mut cur, &mut out);
        cur.pop();
    }
    Ok(out)
}

fn group_check(group: &str, automorphisms: &[PathBuf], budget: u64) -> Result<Output, CliError> {
    let mut entries = Vec::new();
    let g = match load_group(group) {
        Ok(g) => g,
        Err(CliError::Input(msg)) => {
            entries.push(CheckEntry::fail("group", json!({ "error": msg })));
            return Ok(Output::report(entries));
        }
        Err(e) => return Err(e),
    };
    // the identity must already sit at index 0 in a group file
    let identity_first = match Path::new(group).exists() {
        true => {
            let f: files::GroupFile = read_json(Path::new(group))?;
            f.mul.first().is_some_and(|row| row.iter().enumerate().all(|(i, &x)| i == x))
        }
        false => true,
    };
    entries.push(CheckEntry::new(
        "group",
        true,
        Some(json!({ "name": g.name(), "order": g.order(), "abelian": g.is_abelian(), "classes": g.classes().len() })),
    ));
    entries.push(CheckEntry::new("identity_at_0", identity_first, (!identity_first).then(|| json!({ "identity": 0 }))));
    let ctx = RepContext::with_budget(g, budget);
    let mut names = BTreeMap::new();
    for path in automorphisms {
        let base = path.display().to_string();
        let n = names.entry(base.clone()).or_insert(0);
        *n += 1;
        let name = if *n > 1 { format!("automorphism/{base}#{n}") } else { format!("automorphism/{base}") };
        let phi = match read_json::<AutomorphismFile>(path).and_then(|f| f.to_automorphism()) {
            Ok(phi) => phi,
            Err(e) => {
                entries.push(CheckEntry::fail(name, json!({ "error": e.to_string() })));
                continue;
            }
        };
        entries.push(match ctx.verify_action(&phi) {
            Ok(()) => CheckEntry::new(name, true, Some(json!({ "genus": phi.genus() }))),
            Err(msg) => CheckEntry::fail(name, json!({ "error": msg })),
        });
    }
    Ok(Output::report(entries))
}
