//! Bit-exact serialization and parsing of documents.
//!
//! Four concrete grammars are shipped:
//!
//! * `plain` — the raw UTF-8 content, nothing else.
//! * `tab` — optional `#key=value` header lines (`#content=` carries the
//!   content with backslash-escaped newlines), then one token per line:
//!   `index<TAB>surface<TAB>pos<TAB>lemma`, `_` for absent fields,
//!   1-based index.
//! * `kaf` — standoff XML: `<KAF><raw>…</raw><text><wf …>…</wf></text>
//!   <terms><term …/></terms></KAF>`, `terms` only when pos or lemma
//!   layers exist.
//! * `tcf` — standoff XML: `<TCF><text>…</text><tokens>…</tokens>
//!   <POStags>…</POStags><lemmas>…</lemmas></TCF>`, trailing sections
//!   only when the layers exist.
//!
//! Serialization is deterministic: equal documents produce byte-identical
//! output. `parse(serialize(d)) == d` for every representable document.

mod kaf;
mod tab;
mod tcf;
pub(crate) mod xml;

use std::path::Path;

use crate::document::{
    AnnotationLayerKind, AnnotationSet, Document, FormatTag,
};
use crate::error::{Error, Result};

/// A document rendered to bytes in one concrete format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SerializedDocument {
    pub bytes: Vec<u8>,
    pub format: FormatTag,
}

impl SerializedDocument {
    pub fn new(bytes: Vec<u8>, format: FormatTag) -> Self {
        SerializedDocument { bytes, format }
    }
}

/// Renders `doc` in `format`. Serialization never converts: the document's
/// own format tag must match.
pub fn serialize(doc: &Document, format: &FormatTag) -> Result<SerializedDocument> {
    if doc.format() != format {
        return Err(Error::FormatMismatch {
            document: doc.format().clone(),
            requested: format.clone(),
        });
    }
    if let Err(reason) = representability(doc, format) {
        return Err(Error::UnrepresentableDocument {
            format: format.clone(),
            reason,
        });
    }
    let text = match format.as_str() {
        "plain" => doc.content().to_string(),
        "tab" => tab::serialize(doc),
        "kaf" => kaf::serialize(doc),
        "tcf" => tcf::serialize(doc),
        other => return Err(Error::UnknownFormat(other.to_string())),
    };
    Ok(SerializedDocument::new(text.into_bytes(), format.clone()))
}

/// Parses bytes in the given format back into a document.
pub fn parse(input: &SerializedDocument) -> Result<Document> {
    let text = std::str::from_utf8(&input.bytes).map_err(|e| Error::MalformedInput {
        format: input.format.clone(),
        reason: format!("invalid UTF-8: {e}"),
    })?;
    match input.format.as_str() {
        "plain" => Document::new(text, FormatTag::plain(), AnnotationSet::empty()),
        "tab" => tab::parse(text),
        "kaf" => kaf::parse(text),
        "tcf" => tcf::parse(text),
        other => Err(Error::UnknownFormat(other.to_string())),
    }
}

/// True when `format` has an exact representation for `doc`, i.e.
/// `parse(serialize(doc, format))` would reproduce it bit-exactly.
pub fn can_represent(doc: &Document, format: &FormatTag) -> bool {
    representability(doc, format).is_ok()
}

fn representability(doc: &Document, format: &FormatTag) -> std::result::Result<(), String> {
    match format.as_str() {
        "plain" => {
            if !doc.annotations().is_empty() {
                return Err("plain text carries no annotations".into());
            }
            Ok(())
        }
        "tab" => tab::representability(doc),
        "kaf" | "tcf" => standoff_representability(doc),
        other => Err(format!("no grammar for format `{other}`")),
    }
}

/// Shared constraints of the two standoff XML grammars: only token, pos
/// and lemma layers; pos/lemma entries reference token ids, in token order.
fn standoff_representability(doc: &Document) -> std::result::Result<(), String> {
    let token = AnnotationLayerKind::token();
    for (kind, _) in doc.annotations().iter() {
        if *kind != token && *kind != AnnotationLayerKind::pos() && *kind != AnnotationLayerKind::lemma()
        {
            return Err(format!("layer `{kind}` has no representation"));
        }
    }
    check_alignment(doc)
}

/// pos/lemma annotations must target existing tokens, at most one per
/// token, listed in token order (so re-parsing restores the same order).
pub(crate) fn check_alignment(doc: &Document) -> std::result::Result<(), String> {
    let tokens = doc.annotations().layer(&AnnotationLayerKind::token());
    let index_of = |id: &str| tokens.iter().position(|t| t.target_id == id);
    for kind in [AnnotationLayerKind::pos(), AnnotationLayerKind::lemma()] {
        let layer = doc.annotations().layer(&kind);
        if !layer.is_empty() && tokens.is_empty() {
            return Err(format!("`{kind}` layer without a token layer"));
        }
        let mut last: Option<usize> = None;
        for a in layer {
            let Some(idx) = index_of(&a.target_id) else {
                return Err(format!(
                    "`{kind}` annotation targets unknown token `{}`",
                    a.target_id
                ));
            };
            if last.is_some_and(|l| idx <= l) {
                return Err(format!("`{kind}` layer is not in token order"));
            }
            last = Some(idx);
        }
    }
    Ok(())
}

/// Maps a file name to its format by extension: `.txt`, `.tab`,
/// `.kaf.xml`, `.tcf.xml`.
pub fn format_for_path(path: &Path) -> Option<FormatTag> {
    let name = path.file_name()?.to_str()?;
    if name.ends_with(".kaf.xml") {
        Some(FormatTag::kaf())
    } else if name.ends_with(".tcf.xml") {
        Some(FormatTag::tcf())
    } else if name.ends_with(".tab") {
        Some(FormatTag::tab())
    } else if name.ends_with(".txt") {
        Some(FormatTag::plain())
    } else {
        None
    }
}

/// Reads and parses a document file, inferring the format from the
/// extension.
pub fn read_file(path: &Path) -> Result<Document> {
    let format = format_for_path(path)
        .ok_or_else(|| Error::UnknownFormat(path.display().to_string()))?;
    let bytes = std::fs::read(path)?;
    parse(&SerializedDocument::new(bytes, format))
}

/// Serializes a document (in its own format) and writes it to `path`.
pub fn write_file(path: &Path, doc: &Document) -> Result<()> {
    let serialized = serialize(doc, doc.format())?;
    std::fs::write(path, &serialized.bytes)?;
    Ok(())
}
