use std::path::Path;
use std::sync::Arc;

use serde_json::Value;

use floerkit::algebra::FiniteGroup;
use floerkit::bordism::fixtures;
use floerkit::cat::conjugacy_bicategory;
use floerkit::quilt::{cap, cup, QuiltFile};
use floerkit::bordism::AttachingCircle;
use floerkit::relcat::{geometric_compose, relation_bicategory};
use floerkit::repvar::{FiniteRelation, RepContext, RepVariety};
use floerkit_cli::dispatch;
use floerkit_cli::files::{chain_to_file, GroupFile, RelationFile};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("floerkit").chain(args.iter().copied());
    let code = dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, v: &impl serde::Serialize) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn small_relation_bicategory() -> floerkit::cat::FinBicategory {
    let (a, b) = (Arc::new(RepVariety::abstract_set("A", 2)), Arc::new(RepVariety::abstract_set("B", 2)));
    let swap = FiniteRelation::new(a.clone(), a.clone(), [(0, 1), (1, 0)]).unwrap();
    let r = FiniteRelation::new(a.clone(), b.clone(), [(0, 0), (1, 0)]).unwrap();
    relation_bicategory(&[a, b], &[swap, r], 64).unwrap().0
}

fn json(s: &str) -> Value {
    serde_json::from_str(s).unwrap()
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let (code, out, err) = run(&[]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("Usage"));
    assert_eq!(run(&["no-such-command"]).0, 2);
    assert_eq!(run(&["repvar", "--group", "Z2", "--genus", "1", "--threads", "0"]).0, 2);
}

#[test]
fn invariant_of_the_sphere_is_one() {
    let dir = tempfile::tempdir().unwrap();
    let chain = write(dir.path(), "s3.json", &chain_to_file(&fixtures::s3()));
    let group = write(dir.path(), "z2.json", &GroupFile::from_group(&FiniteGroup::cyclic(2)));
    let (code, out, _) = run(&["invariant", "--chain", &chain, "--group", &group]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], 1);
    let (code, out, _) = run(&["fieldfun", "invariant", "--chain", &chain, "--group", "S3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], 1);
}

#[test]
fn handwritten_chain_file_with_named_automorphisms() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("lens.json");
    // the S-move glues the two handles of the genus-1 Heegaard splitting into S^3
    std::fs::write(
        &p,
        r#"[{"kind":"cap0"},{"kind":"attach1","genus":1},{"kind":"attach2","genus":1,"auto":"S1"},{"kind":"cap3"}]"#,
    )
    .unwrap();
    let (code, out, _) = run(&["invariant", "--chain", p.to_str().unwrap(), "--group", "S3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], 1);
    let (code, out, _) = run(&["bordism", "validate", "--chain", p.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)[0]["witness"]["steps"], 4);
}

#[test]
fn verify_cerf_reports_every_check() {
    let dir = tempfile::tempdir().unwrap();
    let group = write(dir.path(), "s3.json", &GroupFile::from_group(&FiniteGroup::symmetric(3)));
    let (code, out, _) = run(&["verify-cerf", "--group", &group, "--genus", "1"]);
    assert_eq!(code, 0);
    assert!(json(&out).as_array().unwrap().iter().all(|e| e["status"] == "pass"));

    // genus 2 over S3: the disjoint handles compose non-embeddedly, everything else holds
    let (code, out, _) = run(&["verify-cerf", "--group", &group, "--genus", "2"]);
    assert_eq!(code, 1);
    let report = json(&out);
    let failed: Vec<&Value> = report.as_array().unwrap().iter().filter(|e| e["status"] == "fail").collect();
    assert!(!failed.is_empty());
    for e in failed {
        assert!(e["check"].as_str().unwrap().ends_with("embedded/alphaT.beta"), "{e}");
        assert!(e["witness"]["y"] != e["witness"]["y_alt"]);
    }
}

#[test]
fn oracle_reads_a_presentation_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("c2.json");
    std::fs::write(&p, r#"{"generators": 1, "relators": [[1, 1]]}"#).unwrap();
    let (code, out, _) = run(&["oracle", "--presentation", p.to_str().unwrap(), "--group", "S3"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], 2);
}

#[test]
fn group_check_flags_bad_tables() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"name": "bad", "order": 3, "mul": [[0,1,2],[1,0,2],[2,2,0]]}"#).unwrap();
    let (code, out, _) = run(&["group-check", "--group", bad.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)[0]["status"], "fail");

    let swapped = dir.path().join("z2.json");
    std::fs::write(&swapped, r#"{"name": "Z2", "order": 2, "mul": [[1,0],[0,1]]}"#).unwrap();
    let (code, out, _) = run(&["group-check", "--group", swapped.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert_eq!(json(&out)[1]["check"], "identity_at_0");

    let auto = dir.path().join("s.json");
    std::fs::write(&auto, r#"{"genus": 1, "images": [[[2,1]], [[1,-1]]], "inverse_images": [[[2,-1]], [[1,1]]]}"#).unwrap();
    let (code, out, _) = run(&["group-check", "--group", "S3", "--automorphism", auto.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn relation_files_compose_like_the_library() {
    let ctx = RepContext::new(FiniteGroup::symmetric(3));
    let y = ctx.relation_of_attach2(&AttachingCircle::canonical(2)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let a = write(dir.path(), "yt.json", &RelationFile::from_relation(&y.transpose()));
    let b = write(dir.path(), "y.json", &RelationFile::from_relation(&y));
    let (code, out, _) = run(&["relcat", "compose", &a, &b]);
    assert_eq!(code, 0);
    let got: RelationFile = serde_json::from_str(&out).unwrap();
    let want = geometric_compose(&y.transpose(), &y).unwrap();
    assert_eq!(got, RelationFile::from_relation(&want));
    let (code, out, _) = run(&["embedded", &a, &b]);
    assert_eq!(code, 1);
    assert!(json(&out)[0]["witness"].get("y_alt").is_some());
    let (code, out, _) = run(&["generators", "--cyclic", &b, &a]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["count"], y.len());
}

#[test]
fn lagrangian_emits_a_relation_file() {
    let dir = tempfile::tempdir().unwrap();
    let step = dir.path().join("step.json");
    std::fs::write(&step, r#"{"kind": "attach2", "genus": 1}"#).unwrap();
    let (code, out, _) = run(&["lagrangian", "--group", "Z2", "--step", step.to_str().unwrap()]);
    assert_eq!(code, 0);
    let r: RelationFile = serde_json::from_str(&out).unwrap();
    assert_eq!(r.source.points.len(), 4);
    assert_eq!(r.target.points.len(), 1);
    assert_eq!(r.pairs.len(), 2);
}

#[test]
fn quilt_commands_round_trip() {
    let ctx = RepContext::new(FiniteGroup::cyclic(3));
    let y = ctx.relation_of_attach2(&AttachingCircle::canonical(1)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "cap.json", &QuiltFile::from_relation_diagram(&cap(&y).unwrap()));
    let u = write(dir.path(), "cup.json", &QuiltFile::from_relation_diagram(&cup(&y).unwrap()));
    let (code, out, _) = run(&["quilt", "validate", &c]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["valid"], true);
    let (code, out, _) = run(&["quilt-glue", &c, &u, "--end", "0"]);
    assert_eq!(code, 0);
    let glued: QuiltFile = serde_json::from_str(&out).unwrap();
    assert_eq!(glued.circle_seams.len(), 1);
    let (code, out, _) = run(&["quilt-eval", &c]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["map"][0]["outputs"].as_array().unwrap().len(), y.len());
    let (code, out, _) = run(&["quilt-export-dot", &c]);
    assert_eq!(code, 0);
    assert!(out.starts_with("graph quilt {"));
    let (code, out, _) = run(&["quilt-shrink", &c, "--patch", "0"]);
    assert_eq!(code, 1);
    assert!(json(&out)[0]["witness"]["error"].as_str().unwrap().contains("not a strip"));
}

#[test]
fn conjugacy_quotient_fails_with_witness() {
    let dir = tempfile::tempdir().unwrap();
    let b = write(dir.path(), "conj.json", &conjugacy_bicategory(&[2, 3, 2]).to_file());
    // horizontal composition of 2-cells does not exist for every pair here
    let (code, out, _) = run(&["cat", "validate", &b]);
    assert_eq!(code, 1);
    assert!(json(&out)[0]["witness"]["violation"].get("MissingHorizontal").is_some());
    let ok = write(dir.path(), "ok.json", &small_relation_bicategory().to_file());
    assert_eq!(run(&["cat-validate", &ok]).0, 0);
    let (code, out, _) = run(&["cat-quotient", &b]);
    assert_eq!(code, 1);
    let w = &json(&out)[0]["witness"]["violation"]["IllFormedQuotient"];
    assert!(w.get("f").is_some() && w.get("g2").is_some());
    let (code, out, _) = run(&["cat-yoneda", &ok, "--base", "0"]);
    assert_eq!(code, 0);
    assert_eq!(json(&out)["base"], 0);
}

#[test]
fn out_dir_receives_the_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("artifacts");
    let (code, out, _) = run(&["repvar", "--group", "Z2", "--genus", "1", "--out-dir", target.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let text = std::fs::read_to_string(target.join("repvar.json")).unwrap();
    assert_eq!(json(&text)["count"], 4);
}

#[test]
fn budget_overrun_is_reported_before_work() {
    let (code, out, _) = run(&["repvar", "--group", "S3", "--genus", "3", "--budget", "1000"]);
    assert_eq!(code, 1);
    let w = &json(&out)[0]["witness"];
    assert!(w["error"].as_str().unwrap().contains("resource limit"));
}
