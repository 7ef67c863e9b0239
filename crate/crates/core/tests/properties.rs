//! Property tests for the core algebra: document equality, format
//! round-trips, hom-set soundness, planner optimality and the law
//! checker's bookkeeping.

use std::collections::{BTreeSet, VecDeque};

use proptest::prelude::*;

use catpipe::formats::{can_represent, parse, serialize};
use catpipe::{
    builtin_morphism, documents_equal, plan, verify_axioms, Annotation, AnnotationLayerKind,
    AnnotationSet, Document, DocumentDescriptor, FormatTag, PlanRequest, Registry, Span,
};

fn universe_registry() -> Registry {
    let mut reg = Registry::new(
        [FormatTag::plain(), FormatTag::tab(), FormatTag::kaf(), FormatTag::tcf()].into(),
        [
            AnnotationLayerKind::token(),
            AnnotationLayerKind::pos(),
            AnnotationLayerKind::lemma(),
        ]
        .into(),
    );
    for id in ["t_o", "t_p", "id_plain", "id_kaf", "id_tab", "c_2", "c_3", "c_4", "c_5", "c_6", "c_7"] {
        reg.register(builtin_morphism(id).unwrap()).unwrap();
    }
    reg
}

/// Tokens without tabs, newlines, or the `_` placeholder, so the
/// document stays representable in every standoff format.
fn surface_strategy() -> impl Strategy<Value = String> {
    "[a-zA-Z0-9]{1,8}"
}

fn format_strategy() -> impl Strategy<Value = FormatTag> {
    prop_oneof![
        Just(FormatTag::plain()),
        Just(FormatTag::tab()),
        Just(FormatTag::kaf()),
        Just(FormatTag::tcf()),
    ]
}

/// A structurally valid document: content is the space-joined surfaces,
/// tokens optionally spanned (all or none, so tab stays in play), pos and
/// lemma layers over prefixes of the tokens.
fn document_strategy() -> impl Strategy<Value = Document> {
    (
        proptest::collection::vec(surface_strategy(), 0..6),
        any::<bool>(),
        0usize..7,
        0usize..7,
        format_strategy(),
    )
        .prop_map(|(surfaces, spanned, pos_n, lemma_n, format)| {
            let content = surfaces.join(" ");
            let mut set = AnnotationSet::empty();
            let mut offset = 0usize;
            for (i, s) in surfaces.iter().enumerate() {
                let len = s.chars().count();
                let span = spanned.then_some(Span::new(offset, len));
                offset += len + 1;
                set.push(Annotation::new(
                    AnnotationLayerKind::token(),
                    format!("w{}", i + 1),
                    s,
                    span,
                ));
            }
            for i in 0..pos_n.min(surfaces.len()) {
                set.push(Annotation::new(
                    AnnotationLayerKind::pos(),
                    format!("w{}", i + 1),
                    "N",
                    None,
                ));
            }
            for (i, s) in surfaces.iter().take(lemma_n).enumerate() {
                set.push(Annotation::new(
                    AnnotationLayerKind::lemma(),
                    format!("w{}", i + 1),
                    s.to_lowercase(),
                    None,
                ));
            }
            Document::new(content, format, set).unwrap()
        })
}

fn descriptor_strategy() -> impl Strategy<Value = DocumentDescriptor> {
    (format_strategy(), proptest::collection::btree_set(
        prop_oneof![
            Just(AnnotationLayerKind::token()),
            Just(AnnotationLayerKind::pos()),
            Just(AnnotationLayerKind::lemma()),
        ],
        0..3,
    ))
        .prop_map(|(format, layers)| DocumentDescriptor::new(format, layers))
}

/// Independent shortest-path oracle: plain queue BFS that only tracks
/// distance, no tie-breaking, no per-node path bookkeeping.
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
    let mut queue: VecDeque<(DocumentDescriptor, usize)> = [(src.clone(), 0)].into();
    while let Some((desc, depth)) = queue.pop_front() {
        if depth == max_steps {
            continue;
        }
        for m in reg.morphisms() {
            if !m.signature().source.matches(&desc) {
                continue;
            }
            let next = m.signature().output_descriptor(&desc);
            if next == *dst {
                return Some(depth + 1);
            }
            if seen.insert(next.clone()) {
                queue.push_back((next, depth + 1));
            }
        }
    }
    None
}

proptest! {
    #[test]
    fn documents_equal_is_an_equivalence(
        a in document_strategy(),
        b in document_strategy(),
        c in document_strategy(),
    ) {
        // reflexive
        prop_assert!(documents_equal(&a, &a));
        // symmetric
        prop_assert_eq!(documents_equal(&a, &b), documents_equal(&b, &a));
        // transitive
        if documents_equal(&a, &b) && documents_equal(&b, &c) {
            prop_assert!(documents_equal(&a, &c));
        }
    }

    #[test]
    fn round_trip_through_every_representable_format(d in document_strategy()) {
        let format = d.format().clone();
        if can_represent(&d, &format) {
            let bytes = serialize(&d, &format).unwrap();
            prop_assert_eq!(&parse(&bytes).unwrap(), &d);
            // byte-determinism
            prop_assert_eq!(serialize(&d, &format).unwrap().bytes, bytes.bytes);
        }
    }

    #[test]
    fn hom_matches_a_brute_force_scan(
        src in descriptor_strategy(),
        dst in descriptor_strategy(),
    ) {
        let reg = universe_registry();
        let expected: Vec<&str> = reg
            .morphisms()
            .iter()
            .filter(|m| {
                m.signature().source.matches(&src)
                    && m.signature().output_descriptor(&src) == dst
            })
            .map(|m| m.id())
            .collect();
        prop_assert_eq!(reg.hom(&src, &dst).morphisms, expected);
    }

    #[test]
    fn planner_is_as_short_as_the_oracle(
        src in descriptor_strategy(),
        dst in descriptor_strategy(),
    ) {
        let reg = universe_registry();
        let request = PlanRequest::new(src.clone(), dst.clone()).with_max_steps(6);
        match (plan(&reg, &request), oracle_shortest_len(&reg, &src, &dst, 6)) {
            (Ok(pipeline), Some(len)) => prop_assert_eq!(pipeline.steps.len(), len),
            (Err(_), None) => {}
            (got, oracle) => prop_assert!(false, "planner {:?} vs oracle {:?}", got, oracle),
        }
    }
}

#[test]
fn attempted_counts_match_the_combinatorial_oracle() {
    use catpipe::{apply, compose};

    let mut reg = universe_registry();
    for (name, content, format) in [
        ("a", "Lysa likes oranges", FormatTag::plain()),
        ("b", "", FormatTag::plain()),
        ("c", "Lysa likes oranges", FormatTag::tcf()),
    ] {
        reg.add_corpus_doc(name, catpipe::make_initial(content, format).unwrap());
    }
    let report = verify_axioms(&reg).unwrap();

    // identity: one check per (morphism, in-domain doc) pair
    let mut identity_expected = 0usize;
    for m in reg.morphisms() {
        for (_, d) in reg.corpus() {
            if m.signature().source.matches(&d.descriptor()) {
                identity_expected += 1;
            }
        }
    }
    assert_eq!(report.identity.attempted, identity_expected);

    // associativity: one check per fully composable ordered triple and
    // document accepted by both groupings
    let ms = reg.morphisms();
    let mut assoc_expected = 0usize;
    for f in ms {
        for g in ms {
            let Ok(gf) = compose(g, f) else { continue };
            for h in ms {
                let (Ok(left), Ok(hg)) = (compose(h, &gf), compose(h, g)) else {
                    continue;
                };
                let Ok(right) = compose(&hg, f) else { continue };
                for (_, d) in reg.corpus() {
                    let src = d.descriptor();
                    if left.signature().source.matches(&src)
                        && right.signature().source.matches(&src)
                    {
                        assoc_expected += 1;
                        // and the law itself, via an independent grouping
                        assert_eq!(
                            apply(&left, d).unwrap(),
                            apply(&right, d).unwrap(),
                            "associativity broken for {},{},{}",
                            f.id(),
                            g.id(),
                            h.id()
                        );
                    }
                }
            }
        }
    }
    assert_eq!(report.associativity.attempted, assoc_expected);

    // closure: the 16-entry kind table plus every composable pair
    let composable_pairs = ms
        .iter()
        .flat_map(|f| ms.iter().map(move |g| (f, g)))
        .filter(|(f, g)| compose(g, f).is_ok())
        .count();
    assert_eq!(report.closure.attempted, 16 + composable_pairs);
}
