//! The minimal KAF-like standoff grammar.
//!
//! `<KAF><raw>…</raw><text><wf wid="w1" offset="0" length="4">Lysa</wf>…
//! </text><terms><term tid="t1" wid="w1" lemma="…" pos="…"/>…</terms></KAF>`
//!
//! `offset`/`length` appear only when the token carries a span; the
//! `terms` section only when pos or lemma layers exist.

use std::collections::BTreeMap;

use crate::document::{Annotation, AnnotationLayerKind, AnnotationSet, Document, FormatTag, Span};
use crate::error::{Error, Result};
use crate::formats::xml::{escape, parse_document, Element};

pub(super) fn serialize(doc: &Document) -> String {
    let tokens = doc.annotations().layer(&AnnotationLayerKind::token());
    let value_for = |kind: AnnotationLayerKind, id: &str| -> Option<String> {
        doc.annotations()
            .layer(&kind)
            .iter()
            .find(|a| a.target_id == id)
            .map(|a| a.value.clone())
    };
    let mut out = String::from("<KAF><raw>");
    out.push_str(&escape(doc.content()));
    out.push_str("</raw><text>");
    for t in tokens {
        out.push_str(&format!("<wf wid=\"{}\"", escape(&t.target_id)));
        if let Some(span) = t.span {
            out.push_str(&format!(" offset=\"{}\" length=\"{}\"", span.offset, span.length));
        }
        out.push('>');
        out.push_str(&escape(&t.value));
        out.push_str("</wf>");
    }
    out.push_str("</text>");
    let terms: Vec<(usize, &str, Option<String>, Option<String>)> = tokens
        .iter()
        .enumerate()
        .filter_map(|(i, t)| {
            let lemma = value_for(AnnotationLayerKind::lemma(), &t.target_id);
            let pos = value_for(AnnotationLayerKind::pos(), &t.target_id);
            (lemma.is_some() || pos.is_some()).then_some((i, t.target_id.as_str(), lemma, pos))
        })
        .collect();
    if !terms.is_empty() {
        out.push_str("<terms>");
        for (i, wid, lemma, pos) in terms {
            out.push_str(&format!("<term tid=\"t{}\" wid=\"{}\"", i + 1, escape(wid)));
            if let Some(lemma) = lemma {
                out.push_str(&format!(" lemma=\"{}\"", escape(&lemma)));
            }
            if let Some(pos) = pos {
                out.push_str(&format!(" pos=\"{}\"", escape(&pos)));
            }
            out.push_str("/>");
        }
        out.push_str("</terms>");
    }
    out.push_str("</KAF>\n");
    out
}

fn malformed(reason: impl Into<String>) -> Error {
    Error::MalformedInput {
        format: FormatTag::kaf(),
        reason: reason.into(),
    }
}

pub(super) fn parse(text: &str) -> Result<Document> {
    let root = parse_document(text).map_err(malformed)?;
    if root.name != "KAF" {
        return Err(malformed(format!("root element is `{}`, expected `KAF`", root.name)));
    }
    let children: Vec<&Element> = root.child_elements().collect();
    if children.is_empty() || children[0].name != "raw" {
        return Err(malformed("first element must be `raw`"));
    }
    let content = children[0].text();
    let text_el = children
        .get(1)
        .filter(|e| e.name == "text")
        .ok_or_else(|| malformed("second element must be `text`"))?;
    if children.len() > 3 || (children.len() == 3 && children[2].name != "terms") {
        return Err(malformed("only `raw`, `text` and `terms` are accepted"));
    }

    let mut set = AnnotationSet::empty();
    let mut token_ids = BTreeMap::new();
    for (i, wf) in text_el.child_elements().enumerate() {
        if wf.name != "wf" {
            return Err(malformed(format!("unexpected `{}` inside `text`", wf.name)));
        }
        let wid = wf
            .attr("wid")
            .ok_or_else(|| malformed(format!("wf {} has no wid", i + 1)))?;
        let span = parse_span(wf, "kaf")?;
        token_ids.insert(wid.to_string(), ());
        set.push(Annotation::new(
            AnnotationLayerKind::token(),
            wid,
            wf.text(),
            span,
        ));
    }
    if let Some(terms) = children.get(2) {
        for term in terms.child_elements() {
            if term.name != "term" {
                return Err(malformed(format!("unexpected `{}` inside `terms`", term.name)));
            }
            let wid = term
                .attr("wid")
                .ok_or_else(|| malformed("term has no wid"))?;
            if !token_ids.contains_key(wid) {
                return Err(malformed(format!("term references unknown token `{wid}`")));
            }
            if let Some(lemma) = term.attr("lemma") {
                set.push(Annotation::new(AnnotationLayerKind::lemma(), wid, lemma, None));
            }
            if let Some(pos) = term.attr("pos") {
                set.push(Annotation::new(AnnotationLayerKind::pos(), wid, pos, None));
            }
        }
    }
    let doc = Document::new(content, FormatTag::kaf(), set);
    match doc {
        Err(Error::SpanOutOfBounds { .. }) => doc, // keep the specific error
        other => other,
    }
}

pub(super) fn parse_span(el: &Element, _format: &str) -> Result<Option<Span>> {
    match (el.attr("offset"), el.attr("length")) {
        (None, None) => Ok(None),
        (Some(off), Some(len)) => {
            let offset = off.parse().map_err(|_| malformed("non-numeric offset"))?;
            let length = len.parse().map_err(|_| malformed("non-numeric length"))?;
            Ok(Some(Span::new(offset, length)))
        }
        _ => Err(malformed("offset and length must appear together")),
    }
}
