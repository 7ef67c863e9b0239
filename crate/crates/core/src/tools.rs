//! Toy NLP tools: the two tokenizers of the worked example, a
//! part-of-speech tagger and three lemmatizer variants.
//!
//! These are deliberately simple, deterministic stand-ins: a
//! whitespace-and-punctuation tokenizer, a lookup-table tagger with
//! default tag `N`, and a lemmatizer driven by an exception table plus
//! suffix rules. The three lemmatizer variants differ in what they read
//! (a word list, running text, a pos layer) but produce identical lemma
//! layers.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use std::sync::LazyLock;

use crate::document::{Annotation, AnnotationLayerKind, Document, FormatTag, Span};
use crate::error::{Error, Result};
use crate::morphism::{Morphism, MorphismKind, Signature, SourcePattern, TargetSpec};

/// Lookup table: surface form to (pos, lemma). Loaded from a tab-separated
/// file, one `surface<TAB>pos<TAB>lemma` entry per line.
#[derive(Debug, Clone, Default)]
pub struct Lexicon {
    entries: BTreeMap<String, (String, String)>,
}

static BUILTIN_LEXICON: LazyLock<Lexicon> =
    LazyLock::new(|| Lexicon::parse_str(include_str!("../data/lexicon.tab")).unwrap());

impl Lexicon {
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut fields = line.split('\t');
            match (fields.next(), fields.next(), fields.next(), fields.next()) {
                (Some(surface), Some(pos), Some(lemma), None) => {
                    entries.insert(surface.to_string(), (pos.to_string(), lemma.to_string()));
                }
                _ => {
                    return Err(Error::MalformedInput {
                        format: FormatTag::tab(),
                        reason: format!("lexicon line {} is not surface<TAB>pos<TAB>lemma", lineno + 1),
                    })
                }
            }
        }
        Ok(Lexicon { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        Lexicon::parse_str(&std::fs::read_to_string(path)?)
    }

    /// The lexicon shipped with the crate.
    pub fn builtin() -> &'static Lexicon {
        &BUILTIN_LEXICON
    }

    pub fn pos(&self, surface: &str) -> Option<&str> {
        self.entries.get(surface).map(|(p, _)| p.as_str())
    }

    pub fn lemma(&self, surface: &str) -> Option<&str> {
        self.entries.get(surface).map(|(_, l)| l.as_str())
    }
}

/// Splits text on Unicode whitespace; leading and trailing punctuation of
/// a chunk becomes tokens of its own. Offsets count scalar values.
pub fn tokenize(text: &str) -> Vec<(String, usize, usize)> {
    const PUNCT: &[char] = &['.', ',', ';', ':', '!', '?', '"', '\'', '(', ')'];
    let mut out = Vec::new();
    let mut chunk_start = 0usize;
    let mut chunk = String::new();
    let flush = |chunk: &mut String, start: usize, out: &mut Vec<(String, usize, usize)>| {
        if chunk.is_empty() {
            return;
        }
        let chars: Vec<char> = chunk.chars().collect();
        let mut lead = 0;
        while lead < chars.len() && PUNCT.contains(&chars[lead]) {
            lead += 1;
        }
        let mut trail = chars.len();
        while trail > lead && PUNCT.contains(&chars[trail - 1]) {
            trail -= 1;
        }
        for (i, c) in chars[..lead].iter().enumerate() {
            out.push((c.to_string(), start + i, 1));
        }
        if trail > lead {
            let core: String = chars[lead..trail].iter().collect();
            out.push((core, start + lead, trail - lead));
        }
        for (i, c) in chars[trail..].iter().enumerate() {
            out.push((c.to_string(), start + trail + i, 1));
        }
        chunk.clear();
    };
    for (i, c) in text.chars().enumerate() {
        if c.is_whitespace() {
            flush(&mut chunk, chunk_start, &mut out);
        } else {
            if chunk.is_empty() {
                chunk_start = i;
            }
            chunk.push(c);
        }
    }
    flush(&mut chunk, chunk_start, &mut out);
    out
}

fn signature_violation(morphism: &str, reason: impl Into<String>) -> Error {
    Error::SignatureViolation {
        morphism: morphism.to_string(),
        reason: reason.into(),
    }
}

/// The `t_o` tokenizer: consumes plain or kaf, produces kaf, keeps the
/// original content and adds a spanned token layer.
pub fn tokenize_o(doc: &Document) -> Result<Document> {
    if doc.format() != &FormatTag::plain() && doc.format() != &FormatTag::kaf() {
        return Err(signature_violation(
            "t_o",
            format!("consumes plain or kaf, got `{}`", doc.format()),
        ));
    }
    if doc.annotations().has_layer(&AnnotationLayerKind::token()) {
        return Err(signature_violation("t_o", "input is already tokenized"));
    }
    let mut set = doc.annotations().clone();
    for (i, (surface, offset, length)) in tokenize(doc.content()).into_iter().enumerate() {
        set.push(Annotation::new(
            AnnotationLayerKind::token(),
            format!("w{}", i + 1),
            surface,
            Some(Span::new(offset, length)),
        ));
    }
    Document::new(doc.content(), FormatTag::kaf(), set)
}

/// The `t_p` tokenizer: consumes plain text, produces a tabbed document.
/// It does not keep the original content; the output content is the
/// newline-joined token surfaces, and its tokens carry no spans.
pub fn tokenize_p(doc: &Document) -> Result<Document> {
    if doc.format() != &FormatTag::plain() {
        return Err(signature_violation(
            "t_p",
            format!("consumes plain only, got `{}`", doc.format()),
        ));
    }
    if doc.annotations().has_layer(&AnnotationLayerKind::token()) {
        return Err(signature_violation("t_p", "input is already tokenized"));
    }
    let surfaces: Vec<String> = tokenize(doc.content()).into_iter().map(|(s, _, _)| s).collect();
    let mut set = doc.annotations().clone();
    for (i, surface) in surfaces.iter().enumerate() {
        set.push(Annotation::new(
            AnnotationLayerKind::token(),
            format!("w{}", i + 1),
            surface,
            None,
        ));
    }
    Document::new(surfaces.join("\n"), FormatTag::tab(), set)
}

/// The `t_p1` tagger: adds one pos tag per token from the lexicon,
/// defaulting to `N`; format and content are untouched.
pub fn pos_tag(doc: &Document, lexicon: &Lexicon) -> Result<Document> {
    if !doc.annotations().has_layer(&AnnotationLayerKind::token()) {
        return Err(signature_violation("t_p1", "input is not tokenized"));
    }
    if doc.annotations().has_layer(&AnnotationLayerKind::pos()) {
        return Err(signature_violation("t_p1", "input is already pos-tagged"));
    }
    let mut set = doc.annotations().clone();
    for token in doc.annotations().layer(&AnnotationLayerKind::token()) {
        let pos = lexicon.pos(&token.value).unwrap_or("N");
        set.push(Annotation::new(
            AnnotationLayerKind::pos(),
            token.target_id.clone(),
            pos,
            None,
        ));
    }
    Document::new(doc.content(), doc.format().clone(), set)
}

/// How a lemmatizer variant obtains its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LemmatizerVariant {
    /// `t_l1`: reads the token list as a bag of words.
    Wordlist,
    /// `t_l2`: reads tokens in sentence order.
    Sentential,
    /// `t_l3`: reads the pos layer instead of guessing.
    PosBased,
}

impl LemmatizerVariant {
    fn morphism_id(self) -> &'static str {
        match self {
            LemmatizerVariant::Wordlist => "t_l1",
            LemmatizerVariant::Sentential => "t_l2",
            LemmatizerVariant::PosBased => "t_l3",
        }
    }
}

/// Exception table first, then pos-keyed suffix rules, otherwise the
/// surface itself.
fn lemma_of(surface: &str, pos: &str, lexicon: &Lexicon) -> String {
    if let Some(lemma) = lexicon.lemma(surface) {
        return lemma.to_string();
    }
    let undouble = |stem: &str| -> String {
        let chars: Vec<char> = stem.chars().collect();
        let n = chars.len();
        if n >= 2 && chars[n - 1] == chars[n - 2] && !"aeiou".contains(chars[n - 1]) {
            chars[..n - 1].iter().collect()
        } else {
            stem.to_string()
        }
    };
    match pos {
        "V" => {
            if let Some(stem) = surface.strip_suffix("ing").filter(|s| s.chars().count() >= 2) {
                undouble(stem)
            } else if let Some(stem) = surface.strip_suffix("ed").filter(|s| s.chars().count() >= 2) {
                undouble(stem)
            } else if surface.ends_with('s') && !surface.ends_with("ss") {
                surface[..surface.len() - 1].to_string()
            } else {
                surface.to_string()
            }
        }
        "N" => {
            if surface.ends_with('s') && !surface.ends_with("ss") {
                surface[..surface.len() - 1].to_string()
            } else {
                surface.to_string()
            }
        }
        _ => surface.to_string(),
    }
}

/// Adds a lemma layer, one lemma per token, format preserved. All three
/// variants agree on documents whose pos layer (if read) came from
/// [`pos_tag`] with the same lexicon.
pub fn lemmatize(doc: &Document, variant: LemmatizerVariant, lexicon: &Lexicon) -> Result<Document> {
    let id = variant.morphism_id();
    if !doc.annotations().has_layer(&AnnotationLayerKind::token()) {
        return Err(signature_violation(id, "input is not tokenized"));
    }
    if doc.annotations().has_layer(&AnnotationLayerKind::lemma()) {
        return Err(signature_violation(id, "input is already lemmatized"));
    }
    let pos_by_id: BTreeMap<&str, &str> = match variant {
        LemmatizerVariant::PosBased => {
            if !doc.annotations().has_layer(&AnnotationLayerKind::pos()) {
                return Err(signature_violation(id, "needs the part of speech"));
            }
            doc.annotations()
                .layer(&AnnotationLayerKind::pos())
                .iter()
                .map(|a| (a.target_id.as_str(), a.value.as_str()))
                .collect()
        }
        _ => BTreeMap::new(),
    };
    let mut set = doc.annotations().clone();
    for token in doc.annotations().layer(&AnnotationLayerKind::token()) {
        let pos = pos_by_id
            .get(token.target_id.as_str())
            .copied()
            .map(str::to_string)
            .unwrap_or_else(|| lexicon.pos(&token.value).unwrap_or("N").to_string());
        set.push(Annotation::new(
            AnnotationLayerKind::lemma(),
            token.target_id.clone(),
            lemma_of(&token.value, &pos, lexicon),
            None,
        ));
    }
    Document::new(doc.content(), doc.format().clone(), set)
}

fn all_formats() -> BTreeSet<FormatTag> {
    [FormatTag::plain(), FormatTag::tab(), FormatTag::kaf(), FormatTag::tcf()].into()
}

/// `t_o` as a registered morphism. It may change the format (plain→kaf),
/// so it is a composite, not a pure tool.
pub fn morphism_t_o() -> Morphism {
    let signature = Signature {
        source: SourcePattern {
            formats: [FormatTag::plain(), FormatTag::kaf()].into(),
            required_layers: BTreeSet::new(),
            forbidden_layers: [AnnotationLayerKind::token()].into(),
            exact: false,
        },
        target: TargetSpec {
            format: Some(FormatTag::kaf()),
            produced_layers: [AnnotationLayerKind::token()].into(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism::primitive("t_o", MorphismKind::Composite, signature, tokenize_o)
}

/// `t_p` as a registered morphism: changes both format and content, hence
/// composite.
pub fn morphism_t_p() -> Morphism {
    let signature = Signature {
        source: SourcePattern {
            formats: [FormatTag::plain()].into(),
            required_layers: BTreeSet::new(),
            forbidden_layers: [AnnotationLayerKind::token()].into(),
            exact: false,
        },
        target: TargetSpec {
            format: Some(FormatTag::tab()),
            produced_layers: [AnnotationLayerKind::token()].into(),
            removed_layers: BTreeSet::new(),
            content_preserved: false,
        },
    };
    Morphism::primitive("t_p", MorphismKind::Composite, signature, tokenize_p)
}

/// `t_p1` as a registered morphism: a pure tool, format-preserving.
pub fn morphism_t_p1() -> Morphism {
    let signature = Signature {
        source: SourcePattern {
            formats: all_formats(),
            required_layers: [AnnotationLayerKind::token()].into(),
            forbidden_layers: [AnnotationLayerKind::pos()].into(),
            exact: false,
        },
        target: TargetSpec {
            format: None,
            produced_layers: [AnnotationLayerKind::pos()].into(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism::primitive("t_p1", MorphismKind::Tool, signature, |doc| {
        pos_tag(doc, Lexicon::builtin())
    })
}

/// One of `t_l1`, `t_l2`, `t_l3` as a registered morphism: a pure tool.
pub fn morphism_lemmatizer(variant: LemmatizerVariant) -> Morphism {
    let mut required: BTreeSet<AnnotationLayerKind> = [AnnotationLayerKind::token()].into();
    if variant == LemmatizerVariant::PosBased {
        required.insert(AnnotationLayerKind::pos());
    }
    let signature = Signature {
        source: SourcePattern {
            formats: all_formats(),
            required_layers: required,
            forbidden_layers: [AnnotationLayerKind::lemma()].into(),
            exact: false,
        },
        target: TargetSpec {
            format: None,
            produced_layers: [AnnotationLayerKind::lemma()].into(),
            removed_layers: BTreeSet::new(),
            content_preserved: true,
        },
    };
    Morphism::primitive(variant.morphism_id(), MorphismKind::Tool, signature, move |doc| {
        lemmatize(doc, variant, Lexicon::builtin())
    })
}
