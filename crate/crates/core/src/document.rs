//! The document triple: content, format, annotation set.
//!
//! Documents are immutable once built. Span offsets count Unicode scalar
//! values, not bytes, so the bounds invariant is independent of how a
//! document is serialized.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Name of a document serialization format.
///
/// The shipped universe is `plain`, `tab`, `kaf` and `tcf`; manifests may
/// register further tags, which then only planning (not file I/O) knows about.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FormatTag(String);

impl FormatTag {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyName("format tag"));
        }
        Ok(FormatTag(name))
    }

    pub fn plain() -> Self {
        FormatTag("plain".into())
    }

    pub fn tab() -> Self {
        FormatTag("tab".into())
    }

    pub fn kaf() -> Self {
        FormatTag("kaf".into())
    }

    pub fn tcf() -> Self {
        FormatTag("tcf".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for FormatTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Kind of annotation layer a document may carry (tokens, part of speech, ...).
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AnnotationLayerKind(String);

impl AnnotationLayerKind {
    pub fn new(name: impl Into<String>) -> Result<Self> {
        let name = name.into();
        if name.is_empty() {
            return Err(Error::EmptyName("annotation layer kind"));
        }
        Ok(AnnotationLayerKind(name))
    }

    pub fn token() -> Self {
        AnnotationLayerKind("token".into())
    }

    pub fn sentence() -> Self {
        AnnotationLayerKind("sentence".into())
    }

    pub fn pos() -> Self {
        AnnotationLayerKind("pos".into())
    }

    pub fn lemma() -> Self {
        AnnotationLayerKind("lemma".into())
    }

    pub fn role() -> Self {
        AnnotationLayerKind("role".into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for AnnotationLayerKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Character span into the owning document's content.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Span {
    pub offset: usize,
    pub length: usize,
}

impl Span {
    pub fn new(offset: usize, length: usize) -> Self {
        Span { offset, length }
    }

    pub fn end(&self) -> usize {
        self.offset + self.length
    }
}

/// One annotation: a value attached to a target id, optionally anchored
/// to a character span of the content.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Annotation {
    pub layer: AnnotationLayerKind,
    pub target_id: String,
    pub value: String,
    pub span: Option<Span>,
}

impl Annotation {
    pub fn new(
        layer: AnnotationLayerKind,
        target_id: impl Into<String>,
        value: impl Into<String>,
        span: Option<Span>,
    ) -> Self {
        Annotation {
            layer,
            target_id: target_id.into(),
            value: value.into(),
            span,
        }
    }
}

/// Map from layer kind to the ordered annotations of that layer.
///
/// A layer key is present iff its list is non-empty; the empty annotation
/// set is the map with no keys.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnnotationSet {
    layers: BTreeMap<AnnotationLayerKind, Vec<Annotation>>,
}

impl AnnotationSet {
    pub fn empty() -> Self {
        AnnotationSet::default()
    }

    /// Appends one annotation to its layer.
    pub fn push(&mut self, annotation: Annotation) {
        self.layers
            .entry(annotation.layer.clone())
            .or_default()
            .push(annotation);
    }

    /// Adds a whole layer; an empty list leaves the set unchanged.
    pub fn add_layer(&mut self, annotations: Vec<Annotation>) {
        for a in annotations {
            self.push(a);
        }
    }

    pub fn kinds(&self) -> BTreeSet<AnnotationLayerKind> {
        self.layers.keys().cloned().collect()
    }

    pub fn layer(&self, kind: &AnnotationLayerKind) -> &[Annotation] {
        self.layers.get(kind).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn has_layer(&self, kind: &AnnotationLayerKind) -> bool {
        self.layers.contains_key(kind)
    }

    pub fn is_empty(&self) -> bool {
        self.layers.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AnnotationLayerKind, &[Annotation])> {
        self.layers.iter().map(|(k, v)| (k, v.as_slice()))
    }
}

/// A document: content, format, annotation set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Document {
    content: String,
    format: FormatTag,
    annotations: AnnotationSet,
}

impl Document {
    /// Builds a document, checking span bounds and per-layer target id
    /// uniqueness.
    pub fn new(
        content: impl Into<String>,
        format: FormatTag,
        annotations: AnnotationSet,
    ) -> Result<Self> {
        let content = content.into();
        let content_len = content.chars().count();
        for (kind, layer) in annotations.iter() {
            let mut seen = BTreeSet::new();
            for a in layer {
                if !seen.insert(a.target_id.as_str()) {
                    return Err(Error::DuplicateTargetId {
                        layer: kind.to_string(),
                        target_id: a.target_id.clone(),
                    });
                }
                if let Some(span) = a.span {
                    if span.length == 0 {
                        return Err(Error::EmptySpan(a.target_id.clone()));
                    }
                    if span.end() > content_len {
                        return Err(Error::SpanOutOfBounds {
                            target_id: a.target_id.clone(),
                            offset: span.offset,
                            length: span.length,
                            content_len,
                        });
                    }
                }
            }
        }
        Ok(Document {
            content,
            format,
            annotations,
        })
    }

    pub fn content(&self) -> &str {
        &self.content
    }

    /// Content length in Unicode scalar values.
    pub fn content_len(&self) -> usize {
        self.content.chars().count()
    }

    pub fn format(&self) -> &FormatTag {
        &self.format
    }

    pub fn annotations(&self) -> &AnnotationSet {
        &self.annotations
    }

    /// The planning-level type of this document: format plus layer kinds.
    pub fn descriptor(&self) -> DocumentDescriptor {
        DocumentDescriptor {
            format: self.format.clone(),
            layers: self.annotations.kinds(),
        }
    }
}

/// Builds an initial document: given content, given format, no annotations.
///
/// Initial documents come in plain, kaf or tcf; a tabbed initial document
/// is rejected.
pub fn make_initial(content: impl Into<String>, format: FormatTag) -> Result<Document> {
    if format != FormatTag::plain() && format != FormatTag::kaf() && format != FormatTag::tcf() {
        return Err(Error::UnsupportedInitialFormat(format));
    }
    Document::new(content, format, AnnotationSet::empty())
}

/// Component-wise document equality: identical content, equal format tags,
/// equal annotation sets as maps of ordered lists.
pub fn documents_equal(a: &Document, b: &Document) -> bool {
    a == b
}

/// Format plus set of annotation layer kinds: the objects the planner and
/// the hom-sets are keyed by.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DocumentDescriptor {
    pub format: FormatTag,
    pub layers: BTreeSet<AnnotationLayerKind>,
}

impl DocumentDescriptor {
    pub fn new(format: FormatTag, layers: BTreeSet<AnnotationLayerKind>) -> Self {
        DocumentDescriptor { format, layers }
    }

    pub fn bare(format: FormatTag) -> Self {
        DocumentDescriptor {
            format,
            layers: BTreeSet::new(),
        }
    }
}

impl fmt::Display for DocumentDescriptor {
    /// `format:layer1+layer2`; the layer list may be empty.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let layers: Vec<&str> = self.layers.iter().map(|l| l.as_str()).collect();
        write!(f, "{}:{}", self.format, layers.join("+"))
    }
}

impl FromStr for DocumentDescriptor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (fmt, layers) = s
            .split_once(':')
            .ok_or_else(|| Error::UnknownFormat(s.to_string()))?;
        let format = FormatTag::new(fmt)?;
        let mut set = BTreeSet::new();
        for part in layers.split('+').filter(|p| !p.is_empty()) {
            set.insert(AnnotationLayerKind::new(part)?);
        }
        Ok(DocumentDescriptor::new(format, set))
    }
}
