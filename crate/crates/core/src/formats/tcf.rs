//! The minimal TCF-like standoff grammar.
//!
//! `<TCF><text>…</text><tokens><token ID="t1" offset="0" length="4">Lysa
//! </token>…</tokens><POStags><tag tokID="t1">…</tag>…</POStags>
//! <lemmas><lemma tokID="t1">…</lemma>…</lemmas></TCF>`
//!
//! Trailing sections appear only when the corresponding layers exist.

use std::collections::BTreeSet;

use crate::document::{Annotation, AnnotationLayerKind, AnnotationSet, Document, FormatTag};
use crate::error::{Error, Result};
use crate::formats::kaf::parse_span;
use crate::formats::xml::{escape, parse_document, Element};

pub(super) fn serialize(doc: &Document) -> String {
    let mut out = String::from("<TCF><text>");
    out.push_str(&escape(doc.content()));
    out.push_str("</text><tokens>");
    for t in doc.annotations().layer(&AnnotationLayerKind::token()) {
        out.push_str(&format!("<token ID=\"{}\"", escape(&t.target_id)));
        if let Some(span) = t.span {
            out.push_str(&format!(" offset=\"{}\" length=\"{}\"", span.offset, span.length));
        }
        out.push('>');
        out.push_str(&escape(&t.value));
        out.push_str("</token>");
    }
    out.push_str("</tokens>");
    let pos = doc.annotations().layer(&AnnotationLayerKind::pos());
    if !pos.is_empty() {
        out.push_str("<POStags>");
        for a in pos {
            out.push_str(&format!(
                "<tag tokID=\"{}\">{}</tag>",
                escape(&a.target_id),
                escape(&a.value)
            ));
        }
        out.push_str("</POStags>");
    }
    let lemmas = doc.annotations().layer(&AnnotationLayerKind::lemma());
    if !lemmas.is_empty() {
        out.push_str("<lemmas>");
        for a in lemmas {
            out.push_str(&format!(
                "<lemma tokID=\"{}\">{}</lemma>",
                escape(&a.target_id),
                escape(&a.value)
            ));
        }
        out.push_str("</lemmas>");
    }
    out.push_str("</TCF>\n");
    out
}

fn malformed(reason: impl Into<String>) -> Error {
    Error::MalformedInput {
        format: FormatTag::tcf(),
        reason: reason.into(),
    }
}

pub(super) fn parse(text: &str) -> Result<Document> {
    let root = parse_document(text).map_err(malformed)?;
    if root.name != "TCF" {
        return Err(malformed(format!("root element is `{}`, expected `TCF`", root.name)));
    }
    let children: Vec<&Element> = root.child_elements().collect();
    if children.is_empty() || children[0].name != "text" {
        return Err(malformed("first element must be `text`"));
    }
    let content = children[0].text();
    let tokens_el = children
        .get(1)
        .filter(|e| e.name == "tokens")
        .ok_or_else(|| malformed("second element must be `tokens`"))?;

    let mut set = AnnotationSet::empty();
    let mut token_ids = BTreeSet::new();
    for token in tokens_el.child_elements() {
        if token.name != "token" {
            return Err(malformed(format!("unexpected `{}` inside `tokens`", token.name)));
        }
        let id = token.attr("ID").ok_or_else(|| malformed("token has no ID"))?;
        let span = parse_span(token, "tcf")?;
        token_ids.insert(id.to_string());
        set.push(Annotation::new(AnnotationLayerKind::token(), id, token.text(), span));
    }

    for section in &children[2..] {
        let (layer, item_name) = match section.name.as_str() {
            "POStags" => (AnnotationLayerKind::pos(), "tag"),
            "lemmas" => (AnnotationLayerKind::lemma(), "lemma"),
            other => return Err(malformed(format!("unexpected section `{other}`"))),
        };
        for item in section.child_elements() {
            if item.name != item_name {
                return Err(malformed(format!(
                    "unexpected `{}` inside `{}`",
                    item.name, section.name
                )));
            }
            let tok_id = item
                .attr("tokID")
                .ok_or_else(|| malformed(format!("`{item_name}` has no tokID")))?;
            if !token_ids.contains(tok_id) {
                return Err(malformed(format!(
                    "`{item_name}` references unknown token `{tok_id}`"
                )));
            }
            set.push(Annotation::new(layer.clone(), tok_id, item.text(), None));
        }
    }
    let doc = Document::new(content, FormatTag::tcf(), set);
    match doc {
        Err(Error::SpanOutOfBounds { .. }) => doc,
        other => other,
    }
}
