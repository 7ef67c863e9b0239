//! End-to-end acceptance checks against the shipped example registry.
//! Each test prints one pass line; run with `--nocapture` to see them.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use catpipe::formats::{can_represent, parse, serialize};
use catpipe::{
    apply, compose, load_manifest, plan, verify_axioms, AnnotationLayerKind, Document,
    DocumentDescriptor, FormatTag, MorphismKind, PlanRequest, Registry,
};

fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/data")
}

fn sec9_manifest() -> PathBuf {
    data_dir().join("example-sec9.json")
}

fn catpipe_cmd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_catpipe"))
        .args(args)
        .output()
        .expect("failed to launch catpipe")
}

fn stdout_lines(output: &Output) -> Vec<String> {
    String::from_utf8_lossy(&output.stdout)
        .lines()
        .map(str::to_string)
        .collect()
}

#[test]
fn criterion_1_hom_reproduction() {
    let started = Instant::now();
    let output = catpipe_cmd(&["hom", "--registry", sec9_manifest().to_str().unwrap(), "--flat"]);
    assert!(output.status.success());
    let ids: BTreeSet<String> = stdout_lines(&output).into_iter().collect();
    let expected: BTreeSet<String> =
        ["t_o", "t_p", "id_plain", "id_kaf", "id_tab", "c_2", "c_3", "c_4", "c_5", "c_6", "c_7"]
            .map(str::to_string)
            .into();
    assert_eq!(ids, expected);
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 1 (hom reproduction, 11 ids): pass");
}

#[test]
fn criterion_2_object_reproduction() {
    let started = Instant::now();
    let output = catpipe_cmd(&[
        "objects",
        "--registry",
        sec9_manifest().to_str().unwrap(),
        "--mode",
        "as_paper",
    ]);
    assert!(output.status.success());
    let labels: Vec<String> = stdout_lines(&output)
        .iter()
        .map(|l| l.split(" = ").next().unwrap().to_string())
        .collect();
    assert_eq!(
        labels,
        vec![
            "D0", "D0_2", "D0_3", "D1_o4", "D1_o5", "D1_o6", "D1_o7", "D1_p4", "D1_p5", "D1_p6",
            "D1_p7"
        ]
    );
    assert!(started.elapsed() < Duration::from_secs(1));
    println!("criterion 2 (object reproduction, 11 labels): pass");
}

#[test]
fn criterion_3_axiom_suite() {
    let started = Instant::now();
    let output = catpipe_cmd(&["verify-laws", "--registry", sec9_manifest().to_str().unwrap()]);
    assert!(output.status.success(), "verify-laws exited nonzero");
    let text = String::from_utf8_lossy(&output.stdout).to_string();
    assert!(!text.contains("counterexample"), "unexpected counterexamples:\n{text}");
    // all three families attempted, none skipped
    let report = verify_axioms(&load_manifest(&sec9_manifest()).unwrap()).unwrap();
    assert!(report.all_passed());
    assert!(report.identity.attempted > 0);
    assert!(report.associativity.attempted > 0);
    assert!(report.closure.attempted >= 16);
    assert!(started.elapsed() < Duration::from_secs(10));
    println!("criterion 3 (axiom suite, zero counterexamples): pass");
}

#[test]
fn criterion_4_converter_law() {
    let reg = load_manifest(&sec9_manifest()).unwrap();
    for m in reg.morphisms() {
        if m.kind() != MorphismKind::Converter {
            continue;
        }
        for (name, doc) in reg.corpus() {
            if !m.signature().source.matches(&doc.descriptor()) {
                continue;
            }
            let out = apply(m, doc).unwrap();
            assert_eq!(out.content(), doc.content(), "{} on {}", m.id(), name);
            assert_eq!(out.annotations(), doc.annotations(), "{} on {}", m.id(), name);
        }
    }
    for (first, second) in [("c_2", "c_4"), ("c_4", "c_2"), ("c_5", "c_6"), ("c_6", "c_5")] {
        let round = compose(reg.get(second).unwrap(), reg.get(first).unwrap()).unwrap();
        for (name, doc) in reg.corpus() {
            if round.signature().source.matches(&doc.descriptor()) {
                assert_eq!(
                    &apply(&round, doc).unwrap(),
                    doc,
                    "{second}∘{first} on {name}"
                );
            }
        }
    }
    println!("criterion 4 (converter law and inverse pairs): pass");
}

#[test]
fn criterion_5_lemmatizer_commutation() {
    let reg = load_manifest(&data_dir().join("example-tools.json")).unwrap();
    let lemmas = |d: &Document| -> Vec<(String, String)> {
        d.annotations()
            .layer(&AnnotationLayerKind::lemma())
            .iter()
            .map(|a| (a.target_id.clone(), a.value.clone()))
            .collect()
    };
    let mut checked = 0usize;
    for (name, doc) in reg.corpus() {
        if doc.format() != &FormatTag::plain() || !doc.annotations().is_empty() {
            continue;
        }
        let tokenized = apply(reg.get("t_o").unwrap(), doc).unwrap();
        if !tokenized.annotations().has_layer(&AnnotationLayerKind::token()) {
            continue;
        }
        let via_l1 = apply(reg.get("t_l1").unwrap(), &tokenized).unwrap();
        let via_l2 = apply(reg.get("t_l2").unwrap(), &tokenized).unwrap();
        let tagged = apply(reg.get("t_p1").unwrap(), &tokenized).unwrap();
        let via_l3 = apply(reg.get("t_l3").unwrap(), &tagged).unwrap();
        assert_eq!(lemmas(&via_l1), lemmas(&via_l2), "t_l1 vs t_l2 on {name}");
        assert_eq!(lemmas(&via_l1), lemmas(&via_l3), "t_l1 vs t_l3 on {name}");
        checked += 1;
    }
    assert!(checked > 0, "no plain corpus document exercised the routes");
    println!("criterion 5 (lemmatizer route commutation): pass");
}

/// Independent brute-force BFS that only computes shortest distance.
fn oracle_shortest_len(
    reg: &Registry,
    src: &DocumentDescriptor,
    dst: &DocumentDescriptor,
    max_steps: usize,
) -> Option<usize> {
    if src == dst {
        return Some(0);
    }
    let mut seen: BTreeSet<DocumentDescriptor> = [src.clone()].into();
    let mut frontier = vec![src.clone()];
    for depth in 1..=max_steps {
        let mut next = Vec::new();
        for desc in &frontier {
            for m in reg.morphisms() {
                if !m.signature().source.matches(desc) {
                    continue;
                }
                let out = m.signature().output_descriptor(desc);
                if out == *dst {
                    return Some(depth);
                }
                if seen.insert(out.clone()) {
                    next.push(out);
                }
            }
        }
        frontier = next;
    }
    None
}

#[test]
fn criterion_6_planner_vs_oracle() {
    let started = Instant::now();
    let reg = load_manifest(&sec9_manifest()).unwrap();
    let layers = [
        AnnotationLayerKind::token(),
        AnnotationLayerKind::pos(),
        AnnotationLayerKind::lemma(),
    ];
    let mut descriptors = Vec::new();
    for format in reg.formats() {
        for mask in 0u8..8 {
            let set: BTreeSet<AnnotationLayerKind> = layers
                .iter()
                .enumerate()
                .filter(|(i, _)| mask & (1 << i) != 0)
                .map(|(_, l)| l.clone())
                .collect();
            descriptors.push(DocumentDescriptor::new(format.clone(), set));
        }
    }
    for src in &descriptors {
        for dst in &descriptors {
            let request = PlanRequest::new(src.clone(), dst.clone()).with_max_steps(6);
            let planned = plan(&reg, &request);
            let oracle = oracle_shortest_len(&reg, src, dst, 6);
            match (&planned, oracle) {
                (Ok(p), Some(len)) => assert_eq!(p.steps.len(), len, "{src} -> {dst}"),
                (Err(_), None) => {}
                _ => panic!("planner and oracle disagree on {src} -> {dst}"),
            }
        }
    }
    let pipeline = plan(
        &reg,
        &PlanRequest::new("tcf:".parse().unwrap(), "tcf:token".parse().unwrap()).with_max_steps(6),
    )
    .unwrap();
    assert_eq!(pipeline.steps, vec!["c_3", "t_p", "c_7"]);
    assert!(started.elapsed() < Duration::from_secs(5));
    println!("criterion 6 (planner vs oracle, all descriptor pairs): pass");
}

#[test]
fn criterion_7_round_trip() {
    let reg = load_manifest(&sec9_manifest()).unwrap();
    for (name, doc) in reg.corpus() {
        for format in reg.formats() {
            if doc.format() != format || !can_represent(doc, format) {
                continue;
            }
            let once = serialize(doc, format).unwrap();
            let twice = serialize(doc, format).unwrap();
            assert_eq!(once.bytes, twice.bytes, "{name}/{format} nondeterministic");
            assert_eq!(&parse(&once).unwrap(), doc, "{name}/{format} round-trip");
        }
    }
    println!("criterion 7 (round-trip and byte determinism): pass");
}

#[test]
fn criterion_8_fault_injection() {
    let dir = tempfile::tempdir().unwrap();
    let manifest_path = dir.path().join("faulty.json");
    // the shipped registry plus one deliberately broken converter;
    // corpus paths are absolute so the manifest can live anywhere
    let corpus_dir = data_dir().join("corpus").canonicalize().unwrap();
    let manifest = format!(
        r#"{{
  "formats": ["plain", "tab", "kaf", "tcf"],
  "layers": ["token", "pos", "lemma"],
  "morphisms": [
    {{ "id": "t_o", "builtin": "t_o" }},
    {{ "id": "id_kaf", "builtin": "id_kaf" }},
    {{ "id": "c_2", "builtin": "c_2" }},
    {{ "id": "faulty_tcf2kaf", "builtin": "faulty_tcf2kaf" }}
  ],
  "corpus": {{
    "lysa_tcf": "{}/lysa.tcf.xml",
    "lysa_plain": "{}/lysa.txt"
  }}
}}"#,
        corpus_dir.display(),
        corpus_dir.display()
    );
    std::fs::write(&manifest_path, manifest).unwrap();
    let output = catpipe_cmd(&["verify-laws", "--registry", manifest_path.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(5), "expected law-failure exit code");
    let text = format!(
        "{}{}",
        String::from_utf8_lossy(&output.stdout),
        String::from_utf8_lossy(&output.stderr)
    );
    assert!(
        text.contains("faulty_tcf2kaf"),
        "offending morphism not named:\n{text}"
    );
    println!("criterion 8 (fault injection caught and named): pass");
}
