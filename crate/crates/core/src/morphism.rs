//! The morphism algebra: identity, composition, kind classification and
//! application, together with the signature typing that drives hom-sets
//! and planning.
//!
//! A morphism is classified as one of four kinds:
//!
//! * identity — returns its input unchanged;
//! * converter — changes only the format, preserving content and
//!   annotations;
//! * tool — changes content and/or annotations, preserving the format;
//! * composite — may change all three components.
//!
//! Kinds close under composition: converter∘converter is a converter,
//! tool∘tool a tool, identity is neutral, and any mix of converter and
//! tool is a composite.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::document::{
    AnnotationLayerKind, Document, DocumentDescriptor, FormatTag,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MorphismKind {
    Identity,
    Converter,
    Tool,
    Composite,
}

impl fmt::Display for MorphismKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MorphismKind::Identity => "identity",
            MorphismKind::Converter => "converter",
            MorphismKind::Tool => "tool",
            MorphismKind::Composite => "composite",
        };
        f.write_str(s)
    }
}

/// What a morphism accepts: a format drawn from an explicit set, a set of
/// layers that must be present, and a set that must be absent. With
/// `exact` the layer set must equal `required_layers` exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourcePattern {
    pub formats: BTreeSet<FormatTag>,
    pub required_layers: BTreeSet<AnnotationLayerKind>,
    pub forbidden_layers: BTreeSet<AnnotationLayerKind>,
    pub exact: bool,
}

impl SourcePattern {
    pub fn matches(&self, descriptor: &DocumentDescriptor) -> bool {
        if !self.formats.contains(&descriptor.format) {
            return false;
        }
        if self.exact {
            descriptor.layers == self.required_layers
        } else {
            self.required_layers.is_subset(&descriptor.layers)
                && descriptor.layers.is_disjoint(&self.forbidden_layers)
        }
    }
}

impl fmt::Display for SourcePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let formats: Vec<&str> = self.formats.iter().map(|t| t.as_str()).collect();
        let req: Vec<&str> = self.required_layers.iter().map(|l| l.as_str()).collect();
        write!(f, "{{{}}}:{}", formats.join("|"), req.join("+"))?;
        if self.exact {
            write!(f, " (exact)")?;
        } else if !self.forbidden_layers.is_empty() {
            let forb: Vec<&str> = self.forbidden_layers.iter().map(|l| l.as_str()).collect();
            write!(f, " !{}", forb.join("+"))?;
        }
        Ok(())
    }
}

/// What a morphism does to a matching document's type: the output format
/// (`None` keeps the input's), layers added and dropped, and whether the
/// content survives unchanged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetSpec {
    pub format: Option<FormatTag>,
    pub produced_layers: BTreeSet<AnnotationLayerKind>,
    pub removed_layers: BTreeSet<AnnotationLayerKind>,
    pub content_preserved: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub source: SourcePattern,
    pub target: TargetSpec,
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> ", self.source)?;
        match &self.target.format {
            Some(t) => write!(f, "{t}")?,
            None => write!(f, "<same>")?,
        }
        if !self.target.produced_layers.is_empty() {
            let p: Vec<&str> = self.target.produced_layers.iter().map(|l| l.as_str()).collect();
            write!(f, " +{}", p.join("+"))?;
        }
        if !self.target.removed_layers.is_empty() {
            let r: Vec<&str> = self.target.removed_layers.iter().map(|l| l.as_str()).collect();
            write!(f, " -{}", r.join("+"))?;
        }
        Ok(())
    }
}

impl Signature {
    /// Output descriptor for an input matching the source pattern.
    pub fn output_descriptor(&self, input: &DocumentDescriptor) -> DocumentDescriptor {
        let format = self
            .target
            .format
            .clone()
            .unwrap_or_else(|| input.format.clone());
        let mut layers: BTreeSet<AnnotationLayerKind> = input
            .layers
            .difference(&self.target.removed_layers)
            .cloned()
            .collect();
        layers.extend(self.target.produced_layers.iter().cloned());
        DocumentDescriptor::new(format, layers)
    }

    /// True when the signature sends `src` to `dst`.
    pub fn connects(&self, src: &DocumentDescriptor, dst: &DocumentDescriptor) -> bool {
        self.source.matches(src) && self.output_descriptor(src) == *dst
    }
}

type Transform = Arc<dyn Fn(&Document) -> Result<Document> + Send + Sync>;

#[derive(Clone)]
enum Body {
    Primitive(Transform),
    /// Lazy composite: the flattened step list, applied left to right.
    Composite(Vec<Morphism>),
}

/// An identified, signature-typed document transformation.
#[derive(Clone)]
pub struct Morphism {
    id: String,
    kind: MorphismKind,
    signature: Signature,
    body: Body,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism")
            .field("id", &self.id)
            .field("kind", &self.kind)
            .field("signature", &self.signature)
            .finish_non_exhaustive()
    }
}

impl Morphism {
    pub fn primitive(
        id: impl Into<String>,
        kind: MorphismKind,
        signature: Signature,
        transform: impl Fn(&Document) -> Result<Document> + Send + Sync + 'static,
    ) -> Self {
        Morphism {
            id: id.into(),
            kind,
            signature,
            body: Body::Primitive(Arc::new(transform)),
        }
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn kind(&self) -> MorphismKind {
        self.kind
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    /// Renames a morphism, keeping everything else.
    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// The flattened primitive steps of this morphism; a primitive is its
    /// own single step, an identity composite has none.
    pub fn steps(&self) -> Vec<&Morphism> {
        match &self.body {
            Body::Primitive(_) => vec![self],
            Body::Composite(steps) => steps.iter().flat_map(|m| m.steps()).collect(),
        }
    }
}

/// The "do-nothing" tool on one descriptor: source = target = descriptor,
/// returns its input unchanged.
pub fn identity(descriptor: &DocumentDescriptor) -> Morphism {
    let signature = Signature {
        source: SourcePattern {
            formats: [descriptor.format.clone()].into(),
            required_layers: descriptor.layers.clone(),
            forbidden_layers: BTreeSet::new(),
            exact: true,
        },
        target: TargetSpec {
            format: None,
            produced_layers: BTreeSet::new(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism {
        id: format!("id_{descriptor}"),
        kind: MorphismKind::Identity,
        signature,
        body: Body::Primitive(Arc::new(|doc: &Document| Ok(doc.clone()))),
    }
}

/// An identity over a whole format, whatever the layers: the `id_plain`,
/// `id_kaf`, `id_tab` entries of the shipped registry.
pub fn format_identity(id: impl Into<String>, format: FormatTag) -> Morphism {
    let signature = Signature {
        source: SourcePattern {
            formats: [format].into(),
            required_layers: BTreeSet::new(),
            forbidden_layers: BTreeSet::new(),
            exact: false,
        },
        target: TargetSpec {
            format: None,
            produced_layers: BTreeSet::new(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism {
        id: id.into(),
        kind: MorphismKind::Identity,
        signature,
        body: Body::Primitive(Arc::new(|doc: &Document| Ok(doc.clone()))),
    }
}

/// Kind of the composition `second ∘ first`.
pub fn classify_composite(first: MorphismKind, second: MorphismKind) -> MorphismKind {
    use MorphismKind::*;
    match (first, second) {
        (Identity, k) | (k, Identity) => k,
        (Converter, Converter) => Converter,
        (Tool, Tool) => Tool,
        _ => Composite,
    }
}

/// Composes `g` after `f`, checking eagerly that the signatures chain.
///
/// The result stores the flattened step list rather than a fused closure,
/// so failures during application name the exact step.
pub fn compose(g: &Morphism, f: &Morphism) -> Result<Morphism> {
    let signature = chain_signatures(&f.signature, &g.signature).map_err(|reason| {
        Error::IncomposableSignatures {
            first: f.id.clone(),
            second: g.id.clone(),
            reason,
            first_signature: f.signature.to_string(),
            second_signature: g.signature.to_string(),
        }
    })?;
    let kind = classify_composite(f.kind, g.kind);
    let mut steps = Vec::new();
    collect_steps(f, &mut steps);
    collect_steps(g, &mut steps);
    Ok(Morphism {
        id: format!("{}∘{}", g.id, f.id),
        kind,
        signature,
        body: Body::Composite(steps),
    })
}

fn collect_steps(m: &Morphism, out: &mut Vec<Morphism>) {
    match &m.body {
        Body::Primitive(_) => out.push(m.clone()),
        Body::Composite(steps) => {
            for s in steps {
                collect_steps(s, out);
            }
        }
    }
}

/// The signature of `g ∘ f`, or the reason the two do not chain.
fn chain_signatures(f: &Signature, g: &Signature) -> std::result::Result<Signature, String> {
    // Exact sources concretize everything: walk the single descriptor.
    if f.source.exact {
        if f.source.formats.len() != 1 {
            return Err("exact source with several formats".into());
        }
        let src = DocumentDescriptor::new(
            f.source.formats.iter().next().unwrap().clone(),
            f.source.required_layers.clone(),
        );
        let mid = f.output_descriptor(&src);
        if !g.source.matches(&mid) {
            return Err(format!("intermediate {mid} is not accepted"));
        }
        let out = g.output_descriptor(&mid);
        return Ok(Signature {
            source: f.source.clone(),
            target: TargetSpec {
                format: Some(out.format.clone()),
                produced_layers: out.layers.difference(&src.layers).cloned().collect(),
                removed_layers: src.layers.difference(&out.layers).cloned().collect(),
                content_preserved: f.target.content_preserved && g.target.content_preserved,
            },
        });
    }

    // Formats: f's outputs must land inside g's accepted set.
    let formats = match &f.target.format {
        Some(t) => {
            if !g.source.formats.contains(t) {
                return Err(format!("`{t}` output is not accepted"));
            }
            f.source.formats.clone()
        }
        None => {
            let both: BTreeSet<FormatTag> =
                f.source.formats.intersection(&g.source.formats).cloned().collect();
            if both.is_empty() {
                return Err("no shared format".into());
            }
            both
        }
    };

    let f_net_produced: BTreeSet<AnnotationLayerKind> = f
        .target
        .produced_layers
        .difference(&f.target.removed_layers)
        .cloned()
        .collect();

    if g.source.exact {
        // g pins the intermediate layer set exactly; solve for the layers
        // the original input must carry.
        if !f_net_produced.is_subset(&g.source.required_layers) {
            return Err("a produced layer is not accepted".into());
        }
        let mut input_layers: BTreeSet<AnnotationLayerKind> = g
            .source
            .required_layers
            .difference(&f.target.produced_layers)
            .cloned()
            .collect();
        input_layers.extend(f.source.required_layers.iter().cloned());
        if !input_layers.is_disjoint(&f.source.forbidden_layers) {
            return Err("required and forbidden layers overlap".into());
        }
        let reduced: BTreeSet<AnnotationLayerKind> = input_layers
            .difference(&f.target.removed_layers)
            .cloned()
            .collect();
        let mut mid = reduced;
        mid.extend(f.target.produced_layers.iter().cloned());
        if mid != g.source.required_layers {
            return Err("intermediate layer set cannot match".into());
        }
        let source = SourcePattern {
            formats,
            required_layers: input_layers.clone(),
            forbidden_layers: BTreeSet::new(),
            exact: true,
        };
        let out_layers = {
            let mut l: BTreeSet<AnnotationLayerKind> = g
                .source
                .required_layers
                .difference(&g.target.removed_layers)
                .cloned()
                .collect();
            l.extend(g.target.produced_layers.iter().cloned());
            l
        };
        return Ok(Signature {
            source,
            target: TargetSpec {
                format: g.target.format.clone().or_else(|| f.target.format.clone()),
                produced_layers: out_layers.difference(&input_layers).cloned().collect(),
                removed_layers: input_layers.difference(&out_layers).cloned().collect(),
                content_preserved: f.target.content_preserved && g.target.content_preserved,
            },
        });
    }

    // Layers g needs that f does not produce must come in from the start,
    // and must not be removed by f.
    let mut required = f.source.required_layers.clone();
    for layer in g.source.required_layers.difference(&f_net_produced) {
        if f.target.removed_layers.contains(layer) {
            return Err(format!("`{layer}` is removed before it is needed"));
        }
        required.insert(layer.clone());
    }
    // Layers g forbids must not be produced by f, and must be absent from
    // the start unless f removes them.
    let mut forbidden = f.source.forbidden_layers.clone();
    for layer in &g.source.forbidden_layers {
        if f_net_produced.contains(layer) {
            return Err(format!("`{layer}` is produced but not accepted"));
        }
        if !f.target.removed_layers.contains(layer) {
            forbidden.insert(layer.clone());
        }
    }
    if !required.is_disjoint(&forbidden) {
        return Err("required and forbidden layers overlap".into());
    }

    let mut produced: BTreeSet<AnnotationLayerKind> = f
        .target
        .produced_layers
        .difference(&g.target.removed_layers)
        .cloned()
        .collect();
    produced.extend(g.target.produced_layers.iter().cloned());
    let mut removed: BTreeSet<AnnotationLayerKind> = f
        .target
        .removed_layers
        .difference(&g.target.produced_layers)
        .cloned()
        .collect();
    removed.extend(
        g.target
            .removed_layers
            .difference(&produced)
            .cloned(),
    );
    let removed = removed.difference(&produced).cloned().collect();

    Ok(Signature {
        source: SourcePattern {
            formats,
            required_layers: required,
            forbidden_layers: forbidden,
            exact: false,
        },
        target: TargetSpec {
            format: g.target.format.clone().or_else(|| f.target.format.clone()),
            produced_layers: produced,
            removed_layers: removed,
            content_preserved: f.target.content_preserved && g.target.content_preserved,
        },
    })
}

/// Applies a morphism, checking the source pattern up front and the
/// declared target afterwards. A postcondition failure is always a bug in
/// the transform and is surfaced loudly.
pub fn apply(m: &Morphism, doc: &Document) -> Result<Document> {
    let input_desc = doc.descriptor();
    if !m.signature.source.matches(&input_desc) {
        return Err(Error::SignatureViolation {
            morphism: m.id.clone(),
            reason: format!(
                "input {} does not match source pattern {}",
                input_desc, m.signature.source
            ),
        });
    }
    let result = match &m.body {
        Body::Primitive(f) => f(doc)?,
        Body::Composite(steps) => {
            let mut current = doc.clone();
            for (i, step) in steps.iter().enumerate() {
                current = apply(step, &current).map_err(|e| Error::StepFailed {
                    step: i,
                    morphism: step.id.clone(),
                    source: Box::new(e),
                })?;
            }
            current
        }
    };
    check_postconditions(m, doc, &input_desc, &result)?;
    Ok(result)
}

fn check_postconditions(
    m: &Morphism,
    input: &Document,
    input_desc: &DocumentDescriptor,
    result: &Document,
) -> Result<()> {
    let fail = |reason: String| {
        Err(Error::PostconditionViolation {
            morphism: m.id.clone(),
            reason,
        })
    };
    let expected = m.signature.output_descriptor(input_desc);
    let got = result.descriptor();
    if got != expected {
        // A declared produced layer may come out empty (e.g. tokenizing an
        // empty document) and an empty layer is not stored, so its absence
        // alone is not a violation.
        let produced = &m.signature.target.produced_layers;
        let only_empty_produced = got.format == expected.format
            && got.layers.is_subset(&expected.layers)
            && expected
                .layers
                .difference(&got.layers)
                .all(|l| produced.contains(l));
        if !only_empty_produced {
            return fail(format!("output is {got}, signature declares {expected}"));
        }
    }
    if m.signature.target.content_preserved && result.content() != input.content() {
        return fail("content changed by a content-preserving morphism".into());
    }
    match m.kind {
        MorphismKind::Identity => {
            if result != input {
                return fail("identity changed its input".into());
            }
        }
        MorphismKind::Converter => {
            // Eq. of converters: content and annotations pass through.
            if result.content() != input.content() {
                return fail("converter changed the content".into());
            }
            if result.annotations() != input.annotations() {
                return fail("converter changed the annotation set".into());
            }
        }
        MorphismKind::Tool => {
            if result.format() != input.format() {
                return fail("tool changed the format tag".into());
            }
        }
        MorphismKind::Composite => {}
    }
    Ok(())
}

/// Ordered sequence of morphism ids, applied left to right; the
/// executable form of a composite.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Pipeline {
    pub steps: Vec<String>,
}

impl Pipeline {
    pub fn new(steps: Vec<String>) -> Self {
        Pipeline { steps }
    }

    pub fn empty() -> Self {
        Pipeline::default()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

impl fmt::Display for Pipeline {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.steps.join(","))
    }
}
