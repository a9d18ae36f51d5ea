//! Re3 inconsistency detection: extract character attributes from premise
//! and story, majority-vote across three sampled generations, render the
//! surviving attribute values as sentences, score contradictions with an
//! entailment client, and report ROC-AUC over labeled pairs.

mod extract;
mod synth;

pub use extract::{derive_roster, extract_attributes, prompt_for_text, split_sentences};
pub use synth::{scripted_backend, synthetic_scorer, synthetic_tuples};

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fault::{Fault, FaultKind};
use crate::gateway::{Completer, EntailmentScorer};
use crate::metrics::{roc_auc, MetricsError};
use crate::prompt::PromptStyle;
use crate::world::{display_name, AttributeKind, WorldState};

/// One dataset tuple: a premise, its contradictory variant, and the story
/// generated from each. Crossing premise and story yields the labels.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Re3Tuple {
    pub id: String,
    pub premise: String,
    pub alt_premise: String,
    pub story: String,
    pub alt_story: String,
}

#[derive(Debug, Error)]
pub enum Re3Error {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("bad dataset json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("tuple {id} has an empty `{field}` field")]
    EmptyField { id: String, field: String },
    #[error("unknown attribute key `{0}`")]
    UnknownKey(String),
    #[error("empty attribute value for key `{0}`")]
    EmptyValue(String),
    #[error(transparent)]
    Metrics(#[from] MetricsError),
}

/// Load a JSON array of `{id, premise, alt_premise, story, alt_story}`.
pub fn load_tuples(path: &Path) -> Result<Vec<Re3Tuple>, Re3Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Re3Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    let tuples: Vec<Re3Tuple> = serde_json::from_str(&text)?;
    for tuple in &tuples {
        for (field, value) in [
            ("premise", &tuple.premise),
            ("alt_premise", &tuple.alt_premise),
            ("story", &tuple.story),
            ("alt_story", &tuple.alt_story),
        ] {
            if value.trim().is_empty() {
                return Err(Re3Error::EmptyField {
                    id: tuple.id.clone(),
                    field: field.to_string(),
                });
            }
        }
    }
    Ok(tuples)
}

/// An attribute key under the character schema: a list attribute by name, or
/// one relation binding by its relation key.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum AttributeKey {
    List(String),
    Relation(String),
}

impl std::fmt::Display for AttributeKey {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            AttributeKey::List(name) => f.write_str(name),
            AttributeKey::Relation(key) => write!(f, "relations:{key}"),
        }
    }
}

/// Lowercase, trim, and collapse internal whitespace. No stemming.
pub fn normalize_value(value: &str) -> String {
    value
        .to_lowercase()
        .split_whitespace()
        .collect::<Vec<_>>()
        .join(" ")
}

/// One asserted value: its first-seen surface form plus which generations
/// asserted it.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValueEntry {
    pub display: String,
    pub generations: BTreeSet<usize>,
}

/// Attribute assertions per character: key -> normalized value -> provenance.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AttributeExtraction {
    pub characters: BTreeMap<String, BTreeMap<AttributeKey, BTreeMap<String, ValueEntry>>>,
}

impl AttributeExtraction {
    pub fn is_empty(&self) -> bool {
        self.characters.values().all(|keys| keys.is_empty())
    }

    pub fn assert_value(
        &mut self,
        character: &str,
        key: AttributeKey,
        value: &str,
        generation: usize,
    ) {
        let normalized = normalize_value(value);
        if normalized.is_empty() {
            return;
        }
        let entry = self
            .characters
            .entry(character.to_string())
            .or_default()
            .entry(key)
            .or_default()
            .entry(normalized)
            .or_insert_with(|| ValueEntry {
                display: value.trim().to_string(),
                generations: BTreeSet::new(),
            });
        entry.generations.insert(generation);
    }

    /// Read every assertion off a finished world state.
    pub fn from_world(world: &WorldState, generation: usize) -> AttributeExtraction {
        let mut extraction = AttributeExtraction::default();
        for entity in world.entities() {
            let Some(schema) = world.preset().schema(entity.kind()) else {
                continue;
            };
            for (attr, kind) in &schema.attributes {
                if attr == "name" {
                    continue;
                }
                match kind {
                    AttributeKind::List => {
                        for value in entity.list(attr) {
                            extraction.assert_value(
                                entity.name(),
                                AttributeKey::List(attr.clone()),
                                value,
                                generation,
                            );
                        }
                    }
                    AttributeKind::Map => {
                        if let Some(bindings) = entity.map(attr) {
                            for (key, value) in bindings {
                                extraction.assert_value(
                                    entity.name(),
                                    AttributeKey::Relation(normalize_value(key)),
                                    value,
                                    generation,
                                );
                            }
                        }
                    }
                    AttributeKind::Scalar => {}
                }
            }
        }
        extraction
    }

    fn merge_from(&mut self, other: &AttributeExtraction) {
        for (character, keys) in &other.characters {
            for (key, values) in keys {
                for (normalized, entry) in values {
                    let slot = self
                        .characters
                        .entry(character.clone())
                        .or_default()
                        .entry(key.clone())
                        .or_default()
                        .entry(normalized.clone())
                        .or_insert_with(|| ValueEntry {
                            display: entry.display.clone(),
                            generations: BTreeSet::new(),
                        });
                    slot.generations.extend(entry.generations.iter().copied());
                }
            }
        }
    }
}

/// The raw result of extracting one text: one extraction per requested
/// generation (failed generations stay empty) plus audit faults.
#[derive(Debug, Clone)]
pub struct Extraction {
    pub generations: Vec<AttributeExtraction>,
    pub faults: Vec<Fault>,
}

impl Extraction {
    pub fn new(samples: usize) -> Extraction {
        Extraction {
            generations: vec![AttributeExtraction::default(); samples],
            faults: Vec::new(),
        }
    }

    pub fn voted(&self) -> AttributeExtraction {
        majority_vote(&self.generations)
    }
}

/// Keep a (character, key, value) triple only when a strict majority of the
/// generations asserted it — two of three in the standard setup. List and
/// map attributes vote per element and per binding.
pub fn majority_vote(generations: &[AttributeExtraction]) -> AttributeExtraction {
    let threshold = generations.len() / 2 + 1;
    let mut merged = AttributeExtraction::default();
    for generation in generations {
        merged.merge_from(generation);
    }
    let mut voted = AttributeExtraction::default();
    for (character, keys) in &merged.characters {
        for (key, values) in keys {
            for (normalized, entry) in values {
                if entry.generations.len() >= threshold {
                    voted
                        .characters
                        .entry(character.clone())
                        .or_default()
                        .entry(key.clone())
                        .or_default()
                        .insert(normalized.clone(), entry.clone());
                }
            }
        }
    }
    voted
}

/// Render one attribute assertion as a plain sentence for the entailment
/// scorer. Templates are fixed: `X's <key> is <value>.`
pub fn attribute_sentence(
    character: &str,
    key: &AttributeKey,
    value: &str,
) -> Result<String, Re3Error> {
    if value.trim().is_empty() {
        return Err(Re3Error::EmptyValue(key.to_string()));
    }
    let who = display_name(character);
    match key {
        AttributeKey::List(name) => {
            let known = matches!(name.as_str(), "appearance" | "occupation" | "gender" | "age");
            if !known {
                return Err(Re3Error::UnknownKey(name.clone()));
            }
            Ok(format!("{who}'s {name} is {}.", value.trim()))
        }
        AttributeKey::Relation(relation) => {
            if relation.trim().is_empty() {
                return Err(Re3Error::UnknownKey("relations:".to_string()));
            }
            Ok(format!("{who}'s {relation} is {}.", display_name(value.trim())))
        }
    }
}

/// One scored (premise value, story value) comparison.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub character: String,
    pub key: String,
    pub premise_value: String,
    pub story_value: String,
    pub contradiction: f64,
}

/// The verdict for one (premise, story) pair: the maximum contradiction
/// probability over all shared attribute comparisons.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DetectionVerdict {
    pub pair_id: String,
    pub score: f64,
    pub evidence: Vec<EvidenceRow>,
    pub faulted: bool,
    pub faults: Vec<Fault>,
}

/// Compare voted extractions: for each character present in both, for each
/// shared attribute key, score every (premise value, story value) sentence
/// pair; the verdict score is the maximum contradiction probability, zero
/// when nothing is shared. A scorer failure marks the pair faulted.
pub fn detect(
    pair_id: &str,
    premise: &AttributeExtraction,
    story: &AttributeExtraction,
    scorer: &dyn EntailmentScorer,
) -> DetectionVerdict {
    let mut verdict = DetectionVerdict {
        pair_id: pair_id.to_string(),
        score: 0.0,
        evidence: Vec::new(),
        faulted: false,
        faults: Vec::new(),
    };
    for (character, premise_keys) in &premise.characters {
        let Some(story_keys) = story.characters.get(character) else {
            continue;
        };
        for (key, premise_values) in premise_keys {
            let Some(story_values) = story_keys.get(key) else {
                continue;
            };
            for premise_entry in premise_values.values() {
                for story_entry in story_values.values() {
                    let sentences = attribute_sentence(character, key, &premise_entry.display)
                        .and_then(|p| {
                            attribute_sentence(character, key, &story_entry.display)
                                .map(|s| (p, s))
                        });
                    let (premise_sentence, story_sentence) = match sentences {
                        Ok(pair) => pair,
                        Err(err) => {
                            verdict.faults.push(Fault::new(
                                FaultKind::ScorerFailure,
                                None,
                                err.to_string(),
                            ));
                            verdict.faulted = true;
                            continue;
                        }
                    };
                    match scorer.score(&premise_sentence, &story_sentence) {
                        Ok(score) => {
                            verdict.score = verdict.score.max(score.contradiction);
                            verdict.evidence.push(EvidenceRow {
                                character: character.clone(),
                                key: key.to_string(),
                                premise_value: premise_entry.display.clone(),
                                story_value: story_entry.display.clone(),
                                contradiction: score.contradiction,
                            });
                        }
                        Err(err) => {
                            verdict.faults.push(Fault::new(
                                FaultKind::ScorerFailure,
                                None,
                                err.to_string(),
                            ));
                            verdict.faulted = true;
                        }
                    }
                }
            }
        }
    }
    verdict
}

#[derive(Debug, Clone)]
pub struct Re3RunConfig {
    pub style: PromptStyle,
    pub model: String,
    pub tuple_limit: Option<usize>,
    pub jobs: usize,
}

impl Re3RunConfig {
    pub fn new(style: PromptStyle) -> Re3RunConfig {
        Re3RunConfig {
            style,
            model: "code-davinci-002".to_string(),
            tuple_limit: None,
            jobs: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairVerdict {
    pub pair_id: String,
    /// True when the pair is a premise/story cross, i.e. contradictory.
    pub contradictory: bool,
    pub score: f64,
    pub faulted: bool,
    pub evidence: Vec<EvidenceRow>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Re3Report {
    pub style: String,
    pub n_tuples: usize,
    pub n_pairs: usize,
    pub n_faulted: usize,
    /// Absent when every pair faulted or only one class survived.
    pub auc: Option<f64>,
    pub faults_by_kind: BTreeMap<String, usize>,
    pub pairs: Vec<PairVerdict>,
}

impl Re3Report {
    pub fn table(&self) -> String {
        let mut out = String::new();
        let auc = self
            .auc
            .map(|a| format!("{a:.3}"))
            .unwrap_or_else(|| "n/a".to_string());
        out.push_str(&format!(
            "Re3 detection — style {}: ROC-AUC {auc} over {} pairs from {} tuples ({} faulted)\n",
            self.style, self.n_pairs, self.n_tuples, self.n_faulted
        ));
        if !self.faults_by_kind.is_empty() {
            out.push_str("faults:\n");
            for (kind, count) in &self.faults_by_kind {
                out.push_str(&format!("  {kind:<24} {count}\n"));
            }
        }
        out
    }
}

/// Run detection over the tuples: four labeled pairs per tuple — (P,S) and
/// (P',S') consistent, the crosses contradictory. Faulted pairs are excluded
/// from the AUC and counted.
pub fn run_re3(
    tuples: &[Re3Tuple],
    backend: &dyn Completer,
    scorer: &dyn EntailmentScorer,
    exemplar_text: &str,
    config: &Re3RunConfig,
) -> Re3Report {
    let limit = config.tuple_limit.unwrap_or(tuples.len()).min(tuples.len());
    let tuples = &tuples[..limit];

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");

    struct TupleOutcome {
        pairs: Vec<PairVerdict>,
        faults: Vec<Fault>,
    }

    let outcomes: Vec<TupleOutcome> = pool.install(|| {
        tuples
            .par_iter()
            .map(|tuple| {
                let mut faults = Vec::new();
                let mut extract = |text: &str| {
                    let extraction = extract_attributes(
                        text,
                        config.style,
                        backend,
                        &config.model,
                        exemplar_text,
                    );
                    faults.extend(extraction.faults.iter().cloned());
                    extraction.voted()
                };
                let premise = extract(&tuple.premise);
                let alt_premise = extract(&tuple.alt_premise);
                let story = extract(&tuple.story);
                let alt_story = extract(&tuple.alt_story);

                let crossings = [
                    ("P-S", &premise, &story, false),
                    ("P'-S'", &alt_premise, &alt_story, false),
                    ("P-S'", &premise, &alt_story, true),
                    ("P'-S", &alt_premise, &story, true),
                ];
                let pairs = crossings
                    .into_iter()
                    .map(|(tag, p, s, contradictory)| {
                        let verdict =
                            detect(&format!("{}:{tag}", tuple.id), p, s, scorer);
                        PairVerdict {
                            pair_id: verdict.pair_id.clone(),
                            contradictory,
                            score: verdict.score,
                            faulted: verdict.faulted,
                            evidence: verdict.evidence,
                        }
                    })
                    .collect();
                TupleOutcome { pairs, faults }
            })
            .collect()
    });

    let mut pairs = Vec::new();
    let mut faults_by_kind: BTreeMap<String, usize> = BTreeMap::new();
    for outcome in outcomes {
        for fault in &outcome.faults {
            *faults_by_kind
                .entry(fault.kind.as_str().to_string())
                .or_insert(0usize) += 1;
        }
        pairs.extend(outcome.pairs);
    }
    let scores: Vec<(f64, bool)> = pairs
        .iter()
        .filter(|p| !p.faulted)
        .map(|p| (p.score, p.contradictory))
        .collect();
    let n_faulted = pairs.iter().filter(|p| p.faulted).count();
    let auc = roc_auc(&scores).ok();

    Re3Report {
        style: config.style.as_str().to_string(),
        n_tuples: tuples.len(),
        n_pairs: pairs.len(),
        n_faulted,
        auc,
        faults_by_kind,
        pairs,
    }
}

#[cfg(test)]
mod tests;
