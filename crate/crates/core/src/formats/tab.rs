//! The tabbed token-table format.
//!
//! Header lines `#key=value` come first; `#content=` carries the document
//! content with `\n` and `\\` escapes so the token table stays one row per
//! token. A file without a `#content` header parses with the content
//! reconstructed as the newline-joined token surfaces.

use crate::document::{Annotation, AnnotationLayerKind, AnnotationSet, Document, FormatTag};
use crate::error::{Error, Result};

pub(super) fn representability(doc: &Document) -> std::result::Result<(), String> {
    let token = AnnotationLayerKind::token();
    for (kind, _) in doc.annotations().iter() {
        if *kind != token && *kind != AnnotationLayerKind::pos() && *kind != AnnotationLayerKind::lemma()
        {
            return Err(format!("layer `{kind}` has no representation"));
        }
    }
    let tokens = doc.annotations().layer(&token);
    for (i, t) in tokens.iter().enumerate() {
        if t.span.is_some() {
            return Err("the token table carries no character spans".into());
        }
        let expected = format!("w{}", i + 1);
        if t.target_id != expected {
            return Err(format!(
                "token ids must be positional (`{expected}`), found `{}`",
                t.target_id
            ));
        }
        if t.value.contains(['\t', '\n', '\r']) {
            return Err(format!("surface of `{}` contains a tab or newline", t.target_id));
        }
    }
    for kind in [AnnotationLayerKind::pos(), AnnotationLayerKind::lemma()] {
        for a in doc.annotations().layer(&kind) {
            if a.value == "_" || a.value.contains(['\t', '\n', '\r']) {
                return Err(format!("`{kind}` value `{}` has no representation", a.value));
            }
            if a.span.is_some() {
                return Err(format!("`{kind}` spans have no representation"));
            }
        }
    }
    if doc.content().contains('\r') {
        return Err("carriage returns in content have no representation".into());
    }
    super::check_alignment(doc)
}

fn escape_content(s: &str) -> String {
    s.replace('\\', "\\\\").replace('\n', "\\n")
}

fn unescape_content(s: &str) -> std::result::Result<String, String> {
    let mut out = String::with_capacity(s.len());
    let mut chars = s.chars();
    while let Some(c) = chars.next() {
        if c != '\\' {
            out.push(c);
            continue;
        }
        match chars.next() {
            Some('n') => out.push('\n'),
            Some('\\') => out.push('\\'),
            other => return Err(format!("bad escape `\\{}`", other.map(String::from).unwrap_or_default())),
        }
    }
    Ok(out)
}

pub(super) fn serialize(doc: &Document) -> String {
    let tokens = doc.annotations().layer(&AnnotationLayerKind::token());
    let value_for = |kind: AnnotationLayerKind, id: &str| -> String {
        doc.annotations()
            .layer(&kind)
            .iter()
            .find(|a| a.target_id == id)
            .map(|a| a.value.clone())
            .unwrap_or_else(|| "_".into())
    };
    let mut out = String::new();
    out.push_str("#content=");
    out.push_str(&escape_content(doc.content()));
    out.push('\n');
    for (i, t) in tokens.iter().enumerate() {
        let pos = value_for(AnnotationLayerKind::pos(), &t.target_id);
        let lemma = value_for(AnnotationLayerKind::lemma(), &t.target_id);
        out.push_str(&format!("{}\t{}\t{}\t{}\n", i + 1, t.value, pos, lemma));
    }
    out
}

pub(super) fn parse(text: &str) -> Result<Document> {
    let malformed = |reason: String| Error::MalformedInput {
        format: FormatTag::tab(),
        reason,
    };
    let mut content: Option<String> = None;
    let mut rows: Vec<(String, Option<String>, Option<String>)> = Vec::new();
    let mut in_header = true;
    for (lineno, line) in text.lines().enumerate() {
        if in_header && line.starts_with('#') {
            let (key, value) = line[1..]
                .split_once('=')
                .ok_or_else(|| malformed(format!("header line {} has no `=`", lineno + 1)))?;
            if key == "content" {
                content = Some(unescape_content(value).map_err(malformed)?);
            }
            // unknown header keys are carried by other producers; ignored
            continue;
        }
        in_header = false;
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 4 {
            return Err(malformed(format!(
                "row {} has {} fields, expected 4",
                lineno + 1,
                fields.len()
            )));
        }
        let index: usize = fields[0]
            .parse()
            .map_err(|_| malformed(format!("row {} has a non-numeric index", lineno + 1)))?;
        if index != rows.len() + 1 {
            return Err(malformed(format!(
                "row {} has index {}, expected {}",
                lineno + 1,
                index,
                rows.len() + 1
            )));
        }
        let opt = |f: &str| (f != "_").then(|| f.to_string());
        rows.push((fields[1].to_string(), opt(fields[2]), opt(fields[3])));
    }
    let content = content.unwrap_or_else(|| {
        rows.iter().map(|(s, _, _)| s.as_str()).collect::<Vec<_>>().join("\n")
    });
    let mut set = AnnotationSet::empty();
    for (i, (surface, pos, lemma)) in rows.iter().enumerate() {
        let id = format!("w{}", i + 1);
        set.push(Annotation::new(AnnotationLayerKind::token(), &id, surface, None));
        if let Some(pos) = pos {
            set.push(Annotation::new(AnnotationLayerKind::pos(), &id, pos, None));
        }
        if let Some(lemma) = lemma {
            set.push(Annotation::new(AnnotationLayerKind::lemma(), &id, lemma, None));
        }
    }
    Document::new(content, FormatTag::tab(), set)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::document::Span;
    use crate::formats::{parse as parse_any, serialize as serialize_any, SerializedDocument};

    fn tokenized_tab(content: &str, surfaces: &[&str]) -> Document {
        let mut set = AnnotationSet::empty();
        for (i, s) in surfaces.iter().enumerate() {
            set.push(Annotation::new(
                AnnotationLayerKind::token(),
                format!("w{}", i + 1),
                *s,
                None,
            ));
        }
        Document::new(content, FormatTag::tab(), set).unwrap()
    }

    #[test]
    fn three_token_sentence_serializes_to_header_and_rows() {
        // grammar applied by hand to the three-token document
        let d = tokenized_tab("Lysa likes oranges", &["Lysa", "likes", "oranges"]);
        let s = serialize_any(&d, &FormatTag::tab()).unwrap();
        assert_eq!(
            String::from_utf8(s.bytes.clone()).unwrap(),
            "#content=Lysa likes oranges\n1\tLysa\t_\t_\n2\tlikes\t_\t_\n3\toranges\t_\t_\n"
        );
        assert_eq!(parse_any(&s).unwrap(), d);
    }

    #[test]
    fn missing_content_header_joins_surfaces() {
        let input = SerializedDocument::new(
            b"1\tLysa\t_\t_\n2\tlikes\t_\t_\n3\toranges\t_\t_\n".to_vec(),
            FormatTag::tab(),
        );
        let d = parse_any(&input).unwrap();
        assert_eq!(d.content(), "Lysa\nlikes\noranges");
    }

    #[test]
    fn newlines_in_content_round_trip_via_escapes() {
        let d = tokenized_tab("a\nb \\ c", &["a", "b"]);
        let s = serialize_any(&d, &FormatTag::tab()).unwrap();
        assert_eq!(parse_any(&s).unwrap(), d);
    }

    #[test]
    fn pos_and_lemma_columns_round_trip() {
        let mut set = AnnotationSet::empty();
        set.push(Annotation::new(AnnotationLayerKind::token(), "w1", "likes", None));
        set.push(Annotation::new(AnnotationLayerKind::pos(), "w1", "V", None));
        set.push(Annotation::new(AnnotationLayerKind::lemma(), "w1", "like", None));
        let d = Document::new("likes", FormatTag::tab(), set).unwrap();
        let s = serialize_any(&d, &FormatTag::tab()).unwrap();
        assert!(String::from_utf8(s.bytes.clone()).unwrap().contains("1\tlikes\tV\tlike\n"));
        assert_eq!(parse_any(&s).unwrap(), d);
    }

    #[test]
    fn spanned_tokens_are_unrepresentable() {
        let mut set = AnnotationSet::empty();
        set.push(Annotation::new(
            AnnotationLayerKind::token(),
            "w1",
            "a",
            Some(Span::new(0, 1)),
        ));
        let d = Document::new("a", FormatTag::tab(), set).unwrap();
        assert!(matches!(
            serialize_any(&d, &FormatTag::tab()),
            Err(Error::UnrepresentableDocument { .. })
        ));
    }

    #[test]
    fn bad_row_index_is_malformed() {
        let input = SerializedDocument::new(b"2\tLysa\t_\t_\n".to_vec(), FormatTag::tab());
        assert!(matches!(parse_any(&input), Err(Error::MalformedInput { .. })));
    }
}
