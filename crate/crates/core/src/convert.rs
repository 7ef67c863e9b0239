//! The concrete converter set of the shipped registry: three format
//! identities and six proper converters, plus an optional kaf→plain
//! converter that is off by default.

use std::collections::BTreeSet;

use crate::document::{Document, FormatTag};
use crate::error::{Error, Result};
use crate::morphism::{
    apply, format_identity, Morphism, MorphismKind, Signature, SourcePattern, TargetSpec,
};

/// A pure format converter: rewrites the format tag, passes content and
/// annotations through untouched.
pub fn converter(id: impl Into<String>, from: FormatTag, to: FormatTag) -> Morphism {
    let target = to.clone();
    let signature = Signature {
        source: SourcePattern {
            formats: [from].into(),
            required_layers: BTreeSet::new(),
            forbidden_layers: BTreeSet::new(),
            exact: false,
        },
        target: TargetSpec {
            format: Some(to),
            produced_layers: BTreeSet::new(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism::primitive(id, MorphismKind::Converter, signature, move |doc| {
        Document::new(doc.content(), target.clone(), doc.annotations().clone())
    })
}

/// The kaf→plain converter of the initial-document caveat. Plain text
/// cannot carry annotations, so it accepts only annotation-free input;
/// anything else is a signature violation rather than silent loss.
pub fn kaf2plain() -> Morphism {
    let signature = Signature {
        source: SourcePattern {
            formats: [FormatTag::kaf()].into(),
            required_layers: BTreeSet::new(),
            forbidden_layers: BTreeSet::new(),
            exact: true,
        },
        target: TargetSpec {
            format: Some(FormatTag::plain()),
            produced_layers: BTreeSet::new(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism::primitive(
        "c_kaf2plain",
        MorphismKind::Converter,
        signature,
        move |doc| Document::new(doc.content(), FormatTag::plain(), doc.annotations().clone()),
    )
}

/// The converter set of the worked registry: `id_plain`, `id_kaf` and
/// `id_tab` (the two kaf identities collapse to one), then tcf→kaf,
/// tcf→plain, kaf→tcf, kaf→tab, tab→kaf and tab→tcf. With
/// `include_kaf2plain` the caveat converter is appended.
pub fn build_converters(include_kaf2plain: bool) -> Vec<Morphism> {
    let mut out = vec![
        format_identity("id_plain", FormatTag::plain()),
        format_identity("id_kaf", FormatTag::kaf()),
        format_identity("id_tab", FormatTag::tab()),
        converter("c_2", FormatTag::tcf(), FormatTag::kaf()),
        converter("c_3", FormatTag::tcf(), FormatTag::plain()),
        converter("c_4", FormatTag::kaf(), FormatTag::tcf()),
        converter("c_5", FormatTag::kaf(), FormatTag::tab()),
        converter("c_6", FormatTag::tab(), FormatTag::kaf()),
        converter("c_7", FormatTag::tab(), FormatTag::tcf()),
    ];
    if include_kaf2plain {
        out.push(kaf2plain());
    }
    out
}

/// Converts a document to `target` through the registered converter set
/// (or the identity when the format already matches).
pub fn convert(doc: &Document, target: &FormatTag) -> Result<Document> {
    if doc.format() == target {
        return Ok(doc.clone());
    }
    let descriptor = doc.descriptor();
    for c in build_converters(true) {
        if c.kind() != MorphismKind::Converter {
            continue;
        }
        if c.signature().source.matches(&descriptor)
            && c.signature().target.format.as_ref() == Some(target)
        {
            return apply(&c, doc);
        }
    }
    Err(Error::NoSuchConverter {
        from: doc.format().clone(),
        to: target.clone(),
    })
}
