//! A pipeline-interoperability engine built on a small dose of category
//! theory: documents are objects, format converters and NLP tools are
//! morphisms, and pipelines are composites whose laws — identity,
//! associativity, kind closure — are machine-checked over a test corpus.
//!
//! The crate is organized bottom-up:
//!
//! * [`document`] — the document triple (content, format, annotations)
//!   and its planning-level descriptor;
//! * [`formats`] — bit-exact serialization to plain, tab, kaf and tcf;
//! * [`morphism`] — identity, composition, classification, application;
//! * [`convert`] — the concrete converter set;
//! * [`tools`] — toy tokenizers, part-of-speech tagger and lemmatizers;
//! * [`registry`] — the category: hom-sets, object enumeration, manifest
//!   loading and axiom verification;
//! * [`planner`] — shortest-pipeline search and execution.

// Error variants deliberately carry rich diagnostic payloads (signatures,
// frontiers); the enum's size is accepted.
#![allow(clippy::result_large_err)]

pub mod convert;
pub mod document;
pub mod error;
pub mod formats;
pub mod morphism;
pub mod planner;
pub mod registry;
pub mod tools;

pub use document::{
    documents_equal, make_initial, Annotation, AnnotationLayerKind, AnnotationSet, Document,
    DocumentDescriptor, FormatTag, Span,
};
pub use error::{Error, Result};
pub use morphism::{
    apply, classify_composite, compose, identity, Morphism, MorphismKind, Pipeline, Signature,
    SourcePattern, TargetSpec,
};
pub use planner::{compose_pipeline, plan, run, PlanRequest, DEFAULT_MAX_STEPS};
pub use registry::{
    builtin_morphism, enumerate_objects, load_manifest, verify_axioms, AxiomReport, HomSet,
    LabeledObject, LawCheck, ObjectsMode, Registry,
};
