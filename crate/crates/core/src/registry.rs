//! The category materialized: a registry of morphisms over a format and
//! layer universe, hom-sets, object enumeration, manifest loading and
//! machine-checked axiom verification.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use serde::Deserialize;

use crate::convert::{build_converters, kaf2plain};
use crate::document::{
    AnnotationLayerKind, Document, DocumentDescriptor, FormatTag,
};
use crate::error::{Error, Result};
use crate::formats::read_file;
use crate::morphism::{apply, classify_composite, compose, identity, Morphism, MorphismKind};
use crate::tools::{morphism_lemmatizer, morphism_t_o, morphism_t_p, morphism_t_p1, LemmatizerVariant};

/// The category: registered morphisms in registration order, the format
/// and layer universes their signatures may draw from, and a named corpus
/// of test documents for extensional law checking.
#[derive(Debug, Clone)]
pub struct Registry {
    morphisms: Vec<Morphism>,
    index: BTreeMap<String, usize>,
    formats: BTreeSet<FormatTag>,
    layers: BTreeSet<AnnotationLayerKind>,
    corpus: Vec<(String, Document)>,
}

impl Registry {
    pub fn new(formats: BTreeSet<FormatTag>, layers: BTreeSet<AnnotationLayerKind>) -> Self {
        Registry {
            morphisms: Vec::new(),
            index: BTreeMap::new(),
            formats,
            layers,
            corpus: Vec::new(),
        }
    }

    /// Registers a morphism, checking id uniqueness and that its
    /// signature stays inside the format and layer universes.
    pub fn register(&mut self, m: Morphism) -> Result<()> {
        if self.index.contains_key(m.id()) {
            return Err(Error::DuplicateId(m.id().to_string()));
        }
        let sig = m.signature();
        for f in &sig.source.formats {
            if !self.formats.contains(f) {
                return Err(Error::UnknownFormat(f.to_string()));
            }
        }
        if let Some(f) = &sig.target.format {
            if !self.formats.contains(f) {
                return Err(Error::UnknownFormat(f.to_string()));
            }
        }
        for layer in sig
            .source
            .required_layers
            .iter()
            .chain(&sig.source.forbidden_layers)
            .chain(&sig.target.produced_layers)
            .chain(&sig.target.removed_layers)
        {
            if !self.layers.contains(layer) {
                return Err(Error::UnknownLayer(layer.to_string()));
            }
        }
        self.index.insert(m.id().to_string(), self.morphisms.len());
        self.morphisms.push(m);
        Ok(())
    }

    pub fn add_corpus_doc(&mut self, name: impl Into<String>, doc: Document) {
        self.corpus.push((name.into(), doc));
    }

    pub fn get(&self, id: &str) -> Option<&Morphism> {
        self.index.get(id).map(|&i| &self.morphisms[i])
    }

    /// All morphisms in registration order.
    pub fn morphisms(&self) -> &[Morphism] {
        &self.morphisms
    }

    /// All registered ids in registration order: the flat view of the
    /// hom-sets.
    pub fn flat_ids(&self) -> Vec<&str> {
        self.morphisms.iter().map(|m| m.id()).collect()
    }

    pub fn formats(&self) -> &BTreeSet<FormatTag> {
        &self.formats
    }

    pub fn layers(&self) -> &BTreeSet<AnnotationLayerKind> {
        &self.layers
    }

    pub fn corpus(&self) -> &[(String, Document)] {
        &self.corpus
    }

    /// The hom-set from `src` to `dst`: all and only registered morphisms
    /// whose signature sends `src` to `dst`, in registration order.
    pub fn hom(&self, src: &DocumentDescriptor, dst: &DocumentDescriptor) -> HomSet {
        let morphisms = self
            .morphisms
            .iter()
            .filter(|m| m.signature().connects(src, dst))
            .map(|m| m.id().to_string())
            .collect();
        HomSet {
            source: src.clone(),
            target: dst.clone(),
            morphisms,
        }
    }
}

/// The morphisms between one ordered pair of objects.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HomSet {
    pub source: DocumentDescriptor,
    pub target: DocumentDescriptor,
    pub morphisms: Vec<String>,
}

/// A builtin morphism by its canonical name, or `None` for an unknown
/// name.
pub fn builtin_morphism(name: &str) -> Option<Morphism> {
    match name {
        "t_o" => Some(morphism_t_o()),
        "t_p" => Some(morphism_t_p()),
        "t_p1" => Some(morphism_t_p1()),
        "t_l1" => Some(morphism_lemmatizer(LemmatizerVariant::Wordlist)),
        "t_l2" => Some(morphism_lemmatizer(LemmatizerVariant::Sentential)),
        "t_l3" => Some(morphism_lemmatizer(LemmatizerVariant::PosBased)),
        "c_kaf2plain" => Some(kaf2plain()),
        // Deliberately broken converter for exercising the law checker:
        // declares content preservation, then mutates the content.
        "faulty_tcf2kaf" => {
            let template = build_converters(false)
                .into_iter()
                .find(|m| m.id() == "c_2")
                .unwrap();
            let signature = template.signature().clone();
            Some(Morphism::primitive(
                "faulty_tcf2kaf",
                MorphismKind::Converter,
                signature,
                |doc| {
                    Document::new(
                        format!("{}!", doc.content()),
                        FormatTag::kaf(),
                        doc.annotations().clone(),
                    )
                },
            ))
        }
        _ => build_converters(false).into_iter().find(|m| m.id() == name).or_else(|| {
            if name == "id_tcf" {
                Some(crate::morphism::format_identity("id_tcf", FormatTag::tcf()))
            } else {
                None
            }
        }),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestFile {
    formats: Vec<String>,
    layers: Vec<String>,
    morphisms: Vec<ManifestMorphism>,
    #[serde(default)]
    corpus: BTreeMap<String, String>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestMorphism {
    id: String,
    #[serde(default)]
    builtin: Option<String>,
    #[serde(default)]
    pipeline: Option<Vec<String>>,
}

/// Loads a registry from a JSON manifest. Builtin entries are resolved by
/// name; pipeline entries are composed from previously defined ids;
/// corpus paths are resolved relative to the manifest file.
pub fn load_manifest(path: &Path) -> Result<Registry> {
    let text = std::fs::read_to_string(path)?;
    let manifest: ManifestFile =
        serde_json::from_str(&text).map_err(|e| Error::ManifestParse(e.to_string()))?;

    let mut formats = BTreeSet::new();
    for f in &manifest.formats {
        formats.insert(FormatTag::new(f.as_str())?);
    }
    let mut layers = BTreeSet::new();
    for l in &manifest.layers {
        layers.insert(AnnotationLayerKind::new(l.as_str())?);
    }
    let mut registry = Registry::new(formats, layers);

    for entry in &manifest.morphisms {
        let morphism = match (&entry.builtin, &entry.pipeline) {
            (Some(name), None) => builtin_morphism(name)
                .ok_or_else(|| Error::UnknownBuiltin(name.clone()))?
                .with_id(&entry.id),
            (None, Some(steps)) => {
                if steps.is_empty() {
                    return Err(Error::ManifestParse(format!(
                        "morphism `{}` has an empty pipeline",
                        entry.id
                    )));
                }
                let mut composed: Option<Morphism> = None;
                for step in steps {
                    let m = registry
                        .get(step)
                        .ok_or_else(|| Error::UnknownMorphism(step.clone()))?
                        .clone();
                    composed = Some(match composed {
                        None => m,
                        Some(acc) => compose(&m, &acc)?,
                    });
                }
                composed.unwrap().with_id(&entry.id)
            }
            _ => {
                return Err(Error::ManifestParse(format!(
                    "morphism `{}` must have exactly one of `builtin` or `pipeline`",
                    entry.id
                )))
            }
        };
        registry.register(morphism)?;
    }

    let base = path.parent().unwrap_or_else(|| Path::new("."));
    for (name, rel) in &manifest.corpus {
        let doc = read_file(&base.join(rel))?;
        registry.add_corpus_doc(name, doc);
    }
    Ok(registry)
}

/// How to enumerate the registry's objects.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ObjectsMode {
    /// The fixed Cartesian listing of eleven labels, including those the
    /// typing restrictions make unreachable.
    AsPaper,
    /// The closure of the bare initial descriptors under registered
    /// morphisms.
    Reachable,
}

/// A descriptor with a display label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledObject {
    pub label: String,
    pub descriptor: DocumentDescriptor,
}

impl fmt::Display for LabeledObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.label, self.descriptor)
    }
}

pub fn enumerate_objects(registry: &Registry, mode: ObjectsMode) -> Vec<LabeledObject> {
    match mode {
        ObjectsMode::AsPaper => as_paper_objects(),
        ObjectsMode::Reachable => reachable_objects(registry),
    }
}

/// The Cartesian construction: the bare initial object, its two converter
/// images, then the two tokenizer outputs pushed through each of the four
/// output converters — eleven labels, several sharing a descriptor.
fn as_paper_objects() -> Vec<LabeledObject> {
    let token: BTreeSet<AnnotationLayerKind> = [AnnotationLayerKind::token()].into();
    let obj = |label: &str, format: FormatTag, layers: &BTreeSet<AnnotationLayerKind>| LabeledObject {
        label: label.to_string(),
        descriptor: DocumentDescriptor::new(format, layers.clone()),
    };
    let bare = BTreeSet::new();
    // Output-converter target formats, in c_4..c_7 order.
    let outputs = [
        ("4", FormatTag::tcf()),
        ("5", FormatTag::tab()),
        ("6", FormatTag::kaf()),
        ("7", FormatTag::tcf()),
    ];
    let mut out = vec![
        obj("D0", FormatTag::tcf(), &bare),
        obj("D0_2", FormatTag::kaf(), &bare),
        obj("D0_3", FormatTag::plain(), &bare),
    ];
    for branch in ["o", "p"] {
        for (suffix, format) in &outputs {
            out.push(obj(&format!("D1_{branch}{suffix}"), format.clone(), &token));
        }
    }
    out
}

/// Descriptor-level closure: starting from the bare plain, kaf and tcf
/// descriptors, repeatedly apply every registered morphism whose source
/// pattern matches. Labels are the descriptor strings.
fn reachable_objects(registry: &Registry) -> Vec<LabeledObject> {
    let mut seen: BTreeSet<DocumentDescriptor> = [
        DocumentDescriptor::bare(FormatTag::plain()),
        DocumentDescriptor::bare(FormatTag::kaf()),
        DocumentDescriptor::bare(FormatTag::tcf()),
    ]
    .into_iter()
    .filter(|d| registry.formats().contains(&d.format))
    .collect();
    let mut frontier: Vec<DocumentDescriptor> = seen.iter().cloned().collect();
    while let Some(desc) = frontier.pop() {
        for m in registry.morphisms() {
            if m.signature().source.matches(&desc) {
                let next = m.signature().output_descriptor(&desc);
                if seen.insert(next.clone()) {
                    frontier.push(next);
                }
            }
        }
    }
    seen.into_iter()
        .map(|descriptor| LabeledObject {
            label: descriptor.to_string(),
            descriptor,
        })
        .collect()
}

/// One family of law checks: how many were attempted, how many passed,
/// and the failures as (morphism ids, document name) pairs.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LawCheck {
    pub attempted: usize,
    pub passed: usize,
    pub counterexamples: Vec<(String, String)>,
}

impl LawCheck {
    fn record(&mut self, ok: bool, morphisms: String, doc: String) {
        self.attempted += 1;
        if ok {
            self.passed += 1;
        } else {
            self.counterexamples.push((morphisms, doc));
        }
    }

    fn finish(&mut self) {
        self.counterexamples.sort();
    }

    pub fn all_passed(&self) -> bool {
        self.passed == self.attempted
    }
}

/// The result of checking the category axioms extensionally over the
/// corpus.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub identity: LawCheck,
    pub associativity: LawCheck,
    pub closure: LawCheck,
}

impl AxiomReport {
    pub fn all_passed(&self) -> bool {
        self.identity.all_passed() && self.associativity.all_passed() && self.closure.all_passed()
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (name, check) in [
            ("identity", &self.identity),
            ("associativity", &self.associativity),
            ("closure", &self.closure),
        ] {
            writeln!(f, "{name}: {}/{} passed", check.passed, check.attempted)?;
            for (morphisms, doc) in &check.counterexamples {
                writeln!(f, "  counterexample: {morphisms} on {doc}")?;
            }
        }
        Ok(())
    }
}

/// The sixteen-entry kind table the composition closure must reproduce.
fn expected_kind(first: MorphismKind, second: MorphismKind) -> MorphismKind {
    use MorphismKind::*;
    match (first, second) {
        (Identity, Identity) => Identity,
        (Identity, k) | (k, Identity) => k,
        (Converter, Converter) => Converter,
        (Tool, Tool) => Tool,
        (Converter, Tool) | (Tool, Converter) => Composite,
        (Composite, _) | (_, Composite) => Composite,
    }
}

/// Verifies the category axioms over the registry and its corpus:
/// identity laws per morphism and in-domain document, associativity for
/// every composable triple and document, and the kind-closure table.
pub fn verify_axioms(registry: &Registry) -> Result<AxiomReport> {
    if registry.corpus().is_empty() {
        return Err(Error::EmptyCorpus);
    }
    let mut identity_check = LawCheck::default();
    let mut associativity = LawCheck::default();
    let mut closure = LawCheck::default();

    // (a) identity laws: m∘id_src and id_dst∘m agree with m on every
    // in-domain corpus document.
    for m in registry.morphisms() {
        for (name, doc) in registry.corpus() {
            let src = doc.descriptor();
            if !m.signature().source.matches(&src) {
                continue;
            }
            let ok = (|| {
                let direct = apply(m, doc)?;
                let pre = compose(m, &identity(&src))?;
                // post-identity checked on the concrete codomain: the
                // declared one may name a produced layer that came out
                // empty on this document.
                let post = identity(&direct.descriptor());
                Ok::<bool, Error>(
                    apply(&pre, doc)? == direct && apply(&post, &direct)? == direct,
                )
            })()
            .unwrap_or(false);
            identity_check.record(ok, m.id().to_string(), name.clone());
        }
    }

    // (b) associativity: h∘(g∘f) = (h∘g)∘f extensionally, for every
    // composable registered triple.
    let composable_pairs: Vec<(usize, usize, Morphism)> = {
        let ms = registry.morphisms();
        let mut out = Vec::new();
        for (i, f) in ms.iter().enumerate() {
            for (j, g) in ms.iter().enumerate() {
                if let Ok(gf) = compose(g, f) {
                    out.push((i, j, gf));
                }
            }
        }
        out
    };
    let pair_index: BTreeMap<(usize, usize), &Morphism> =
        composable_pairs.iter().map(|(i, j, m)| ((*i, *j), m)).collect();
    for (i, j, gf) in &composable_pairs {
        for (k, h) in registry.morphisms().iter().enumerate() {
            let (Ok(left), Some(hg)) = (compose(h, gf), pair_index.get(&(*j, k))) else {
                continue;
            };
            let Ok(right) = compose(hg, registry.morphisms().get(*i).unwrap()) else {
                continue;
            };
            let ids = format!(
                "{},{},{}",
                registry.morphisms()[*i].id(),
                registry.morphisms()[*j].id(),
                h.id()
            );
            for (name, doc) in registry.corpus() {
                let src = doc.descriptor();
                if !left.signature().source.matches(&src)
                    || !right.signature().source.matches(&src)
                {
                    continue;
                }
                let ok = match (apply(&left, doc), apply(&right, doc)) {
                    (Ok(a), Ok(b)) => a == b,
                    _ => false,
                };
                associativity.record(ok, ids.clone(), name.clone());
            }
        }
    }

    // (c) closure: the classification matches the sixteen-entry table,
    // and every composable pair's composite carries the table's kind.
    use MorphismKind::*;
    for first in [Identity, Converter, Tool, Composite] {
        for second in [Identity, Converter, Tool, Composite] {
            let ok = classify_composite(first, second) == expected_kind(first, second);
            closure.record(ok, format!("{first}∘-kind,{second}∘-kind"), "-".to_string());
        }
    }
    for (i, j, gf) in &composable_pairs {
        let f = &registry.morphisms()[*i];
        let g = &registry.morphisms()[*j];
        let ok = gf.kind() == expected_kind(f.kind(), g.kind());
        closure.record(ok, format!("{},{}", f.id(), g.id()), "-".to_string());
    }

    identity_check.finish();
    associativity.finish();
    closure.finish();
    Ok(AxiomReport {
        identity: identity_check,
        associativity,
        closure,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::make_initial;

    fn universe() -> (BTreeSet<FormatTag>, BTreeSet<AnnotationLayerKind>) {
        (
            [FormatTag::plain(), FormatTag::tab(), FormatTag::kaf(), FormatTag::tcf()].into(),
            [
                AnnotationLayerKind::token(),
                AnnotationLayerKind::pos(),
                AnnotationLayerKind::lemma(),
            ]
            .into(),
        )
    }

    /// The eleven-morphism worked registry, assembled in code.
    fn worked_registry() -> Registry {
        let (formats, layers) = universe();
        let mut reg = Registry::new(formats, layers);
        for id in ["t_o", "t_p", "id_plain", "id_kaf", "id_tab", "c_2", "c_3", "c_4", "c_5", "c_6", "c_7"] {
            reg.register(builtin_morphism(id).unwrap()).unwrap();
        }
        reg.add_corpus_doc(
            "lysa_plain",
            make_initial("Lysa likes oranges", FormatTag::plain()).unwrap(),
        );
        reg.add_corpus_doc("empty_plain", make_initial("", FormatTag::plain()).unwrap());
        reg.add_corpus_doc(
            "lysa_tcf",
            make_initial("Lysa likes oranges", FormatTag::tcf()).unwrap(),
        );
        reg
    }

    #[test]
    fn duplicate_registration_rejected() {
        let mut reg = worked_registry();
        assert!(matches!(
            reg.register(builtin_morphism("t_o").unwrap()),
            Err(Error::DuplicateId(_))
        ));
    }

    #[test]
    fn hom_plain_to_tokenized_kaf_is_t_o() {
        let reg = worked_registry();
        let src: DocumentDescriptor = "plain:".parse().unwrap();
        let dst: DocumentDescriptor = "kaf:token".parse().unwrap();
        assert_eq!(reg.hom(&src, &dst).morphisms, vec!["t_o"]);
    }

    #[test]
    fn hom_tokenized_tab_to_plain_is_empty() {
        let reg = worked_registry();
        let src: DocumentDescriptor = "tab:token".parse().unwrap();
        let dst: DocumentDescriptor = "plain:".parse().unwrap();
        assert!(reg.hom(&src, &dst).morphisms.is_empty());
    }

    #[test]
    fn flat_view_has_eleven_ids() {
        let reg = worked_registry();
        assert_eq!(reg.flat_ids().len(), 11);
    }

    #[test]
    fn as_paper_listing_has_eleven_labels() {
        let reg = worked_registry();
        let objects = enumerate_objects(&reg, ObjectsMode::AsPaper);
        let labels: Vec<&str> = objects.iter().map(|o| o.label.as_str()).collect();
        assert_eq!(
            labels,
            vec![
                "D0", "D0_2", "D0_3", "D1_o4", "D1_o5", "D1_o6", "D1_o7", "D1_p4", "D1_p5",
                "D1_p6", "D1_p7"
            ]
        );
    }

    #[test]
    fn reachable_closure_of_a_small_registry() {
        let (formats, layers) = universe();
        let mut reg = Registry::new(formats, layers);
        for id in ["t_o", "c_4", "c_5", "id_kaf"] {
            reg.register(builtin_morphism(id).unwrap()).unwrap();
        }
        let objects = enumerate_objects(&reg, ObjectsMode::Reachable);
        let descriptors: BTreeSet<String> =
            objects.iter().map(|o| o.descriptor.to_string()).collect();
        for expected in ["plain:", "kaf:", "tcf:", "kaf:token", "tcf:token", "tab:token"] {
            assert!(descriptors.contains(expected), "missing {expected}");
        }
    }

    #[test]
    fn reachable_is_a_fixed_point() {
        let reg = worked_registry();
        let objects = enumerate_objects(&reg, ObjectsMode::Reachable);
        let members: BTreeSet<&DocumentDescriptor> =
            objects.iter().map(|o| &o.descriptor).collect();
        for o in &objects {
            for m in reg.morphisms() {
                if m.signature().source.matches(&o.descriptor) {
                    let next = m.signature().output_descriptor(&o.descriptor);
                    assert!(members.contains(&next), "{next} escapes the closure");
                }
            }
        }
    }

    #[test]
    fn axioms_hold_on_the_worked_registry() {
        let report = verify_axioms(&worked_registry()).unwrap();
        assert!(report.all_passed(), "{report}");
        assert!(report.identity.attempted > 0);
        assert!(report.closure.attempted >= 16);
    }

    #[test]
    fn faulty_converter_is_caught() {
        let mut reg = worked_registry();
        reg.register(builtin_morphism("faulty_tcf2kaf").unwrap()).unwrap();
        let report = verify_axioms(&reg).unwrap();
        assert!(!report.all_passed());
        assert!(report
            .identity
            .counterexamples
            .iter()
            .any(|(m, _)| m.contains("faulty_tcf2kaf")));
    }

    #[test]
    fn single_identity_registry_is_vacuously_associative() {
        let (formats, layers) = universe();
        let mut reg = Registry::new(formats, layers);
        reg.register(builtin_morphism("id_plain").unwrap()).unwrap();
        reg.add_corpus_doc("d", make_initial("x", FormatTag::plain()).unwrap());
        let report = verify_axioms(&reg).unwrap();
        assert!(report.all_passed());
        assert!(report.identity.attempted > 0);
        // the only triple is id∘id∘id on the one document
        assert_eq!(report.associativity.attempted, 1);
    }

    #[test]
    fn empty_corpus_is_an_error() {
        let (formats, layers) = universe();
        let reg = Registry::new(formats, layers);
        assert!(matches!(verify_axioms(&reg), Err(Error::EmptyCorpus)));
    }

    #[test]
    fn unknown_builtin_name() {
        assert!(builtin_morphism("t_x").is_none());
    }
}
