//! The counterexample sequences, with positional bookkeeping, and seeded
//! random baselines.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::core1d::Block;

pub mod nested;
pub mod random;
pub mod runs;
pub mod toeplitz;

pub use nested::gen_nested;
pub use random::{bernoulli_field, gen_bernoulli, gen_periodic, striped_field};
pub use runs::{gen_runs, runs_cuts, runs_region};
pub use toeplitz::{gen_toeplitz, ToeplitzLayout};

/// Named coordinate data attached to a generated sequence.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Annotation {
    Points(Vec<usize>),
    /// Half-open `[start, end)` spans.
    Spans(Vec<[usize; 2]>),
}

impl Annotation {
    pub fn spans(&self) -> Vec<[usize; 2]> {
        match self {
            Annotation::Points(p) => p.iter().map(|&i| [i, i + 1]).collect(),
            Annotation::Spans(s) => s.clone(),
        }
    }

    pub fn coordinates(&self) -> Vec<usize> {
        self.spans().into_iter().flat_map(|[a, b]| a..b).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AnnotatedSequence {
    pub block: Block,
    pub annotations: BTreeMap<String, Annotation>,
    /// Construction parameters and derived quantities.
    pub meta: BTreeMap<String, serde_json::Value>,
}

#[derive(Serialize)]
struct AnnotationDump<'a> {
    annotations: &'a BTreeMap<String, Annotation>,
    meta: &'a BTreeMap<String, serde_json::Value>,
}

impl AnnotatedSequence {
    pub fn annotation(&self, name: &str) -> Option<&Annotation> {
        self.annotations.get(name)
    }

    pub fn annotations_json(&self) -> serde_json::Value {
        serde_json::to_value(AnnotationDump {
            annotations: &self.annotations,
            meta: &self.meta,
        })
        .expect("annotations serialize")
    }
}
