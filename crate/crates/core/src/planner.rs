//! Pipeline planning and execution: shortest morphism chains between two
//! document descriptors, searched breadth-first over the descriptor
//! graph.

use std::collections::BTreeMap;

use crate::document::{Document, DocumentDescriptor};
use crate::error::{Error, Result};
use crate::morphism::{apply, compose, Morphism, Pipeline};
use crate::registry::Registry;

pub const DEFAULT_MAX_STEPS: usize = 8;

/// What to plan: where from, where to, and how deep to search.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlanRequest {
    pub source: DocumentDescriptor,
    pub target: DocumentDescriptor,
    pub max_steps: usize,
}

impl PlanRequest {
    pub fn new(source: DocumentDescriptor, target: DocumentDescriptor) -> Self {
        PlanRequest {
            source,
            target,
            max_steps: DEFAULT_MAX_STEPS,
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps.max(1);
        self
    }
}

/// Finds a shortest pipeline from the request's source to its target.
///
/// Search is breadth-first over descriptors with uniform step cost; among
/// equally short pipelines the lexicographically greatest id sequence is
/// returned, which makes the result deterministic. `source == target`
/// yields the empty pipeline.
pub fn plan(registry: &Registry, request: &PlanRequest) -> Result<Pipeline> {
    if request.source == request.target {
        return Ok(Pipeline::empty());
    }
    // best path to each descriptor at its first-reached depth; a prefix of
    // any shortest path is itself first reached at its own depth, so
    // keeping one maximal path per node is enough for the global maximum.
    let mut best: BTreeMap<DocumentDescriptor, Vec<String>> =
        [(request.source.clone(), Vec::new())].into();
    let mut level: Vec<DocumentDescriptor> = vec![request.source.clone()];
    for _ in 0..request.max_steps {
        let mut next_level: BTreeMap<DocumentDescriptor, Vec<String>> = BTreeMap::new();
        for desc in &level {
            let path = best[desc].clone();
            for m in registry.morphisms() {
                if !m.signature().source.matches(desc) {
                    continue;
                }
                let next = m.signature().output_descriptor(desc);
                if best.contains_key(&next) {
                    continue;
                }
                let mut candidate = path.clone();
                candidate.push(m.id().to_string());
                match next_level.get_mut(&next) {
                    Some(existing) if *existing >= candidate => {}
                    Some(existing) => *existing = candidate,
                    None => {
                        next_level.insert(next, candidate);
                    }
                }
            }
        }
        if next_level.is_empty() {
            break;
        }
        if let Some(path) = next_level.get(&request.target) {
            return Ok(Pipeline::new(path.clone()));
        }
        level = next_level.keys().cloned().collect();
        best.extend(next_level);
    }
    Err(Error::NoPlan {
        from: request.source.clone(),
        to: request.target.clone(),
        max_steps: request.max_steps,
        frontier: best.keys().cloned().collect(),
    })
}

/// Folds a pipeline into one composite morphism; `None` for the empty
/// pipeline.
pub fn compose_pipeline(registry: &Registry, pipeline: &Pipeline) -> Result<Option<Morphism>> {
    let mut composed: Option<Morphism> = None;
    for id in &pipeline.steps {
        let m = registry
            .get(id)
            .ok_or_else(|| Error::UnknownMorphism(id.clone()))?;
        composed = Some(match composed {
            None => m.clone(),
            Some(acc) => compose(m, &acc)?,
        });
    }
    Ok(composed)
}

/// Runs a pipeline left to right. A failing step is reported with its
/// index and morphism id; the result equals applying the fully composed
/// morphism.
pub fn run(registry: &Registry, pipeline: &Pipeline, doc: &Document) -> Result<Document> {
    let mut current = doc.clone();
    for (step, id) in pipeline.steps.iter().enumerate() {
        let m = registry
            .get(id)
            .ok_or_else(|| Error::UnknownMorphism(id.clone()))?;
        current = apply(m, &current).map_err(|e| Error::StepFailed {
            step,
            morphism: id.clone(),
            source: Box::new(e),
        })?;
    }
    Ok(current)
}
