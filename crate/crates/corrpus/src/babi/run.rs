//! The accuracy run: render, complete, slice, parse, evaluate, extract,
//! compare. Samples run in parallel up to the configured in-flight limit;
//! the report is an order-independent reduction and contains no timestamps,
//! so cache-mode reruns are byte-identical.

use std::collections::BTreeMap;
use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{derive_entities, oracle_solve, ActionLexicon, BabiSample};
use crate::dsl::{
    evaluate, extract_answer, parse_program, pretty::render_comment_body,
    pretty::render_specific_defs, AbstractFunctionTable, Answer,
};
use crate::fault::{Fault, FaultKind};
use crate::gateway::{Completer, CompletionRequest, GatewayError};
use crate::prompt::{completion_slice, render, PromptStyle, StoryCase};
use crate::world::{SchemaPreset, WorldState};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub style: PromptStyle,
    pub model: String,
    pub sample_limit: Option<usize>,
    /// Parallel in-flight requests.
    pub jobs: usize,
}

impl RunConfig {
    pub fn new(style: PromptStyle) -> RunConfig {
        RunConfig {
            style,
            model: "code-davinci-002".to_string(),
            sample_limit: None,
            jobs: 4,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleVerdict {
    pub index: usize,
    pub question: String,
    pub gold: String,
    pub answer: Option<String>,
    pub correct: bool,
    pub faults: Vec<Fault>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BabiReport {
    pub style: String,
    pub n: usize,
    pub correct: usize,
    pub accuracy: f64,
    pub unanswerable: usize,
    pub faults_by_kind: BTreeMap<String, usize>,
    pub verdicts: Vec<SampleVerdict>,
}

fn story_case(sample: &BabiSample, lexicon: &ActionLexicon) -> StoryCase {
    StoryCase {
        sentences: sample.sentences(),
        entities: derive_entities(sample, lexicon),
        query: Some(sample.question.clone()),
        gold_answer: Some(sample.answer.clone()),
    }
}

fn answers_match(answer: &str, gold: &str) -> bool {
    answer.trim().eq_ignore_ascii_case(gold.trim())
}

fn judge(
    index: usize,
    sample: &BabiSample,
    backend: &dyn Completer,
    exemplar_text: &str,
    lexicon: &ActionLexicon,
    config: &RunConfig,
) -> SampleVerdict {
    let preset = SchemaPreset::babi_task2();
    let mut faults: Vec<Fault> = Vec::new();
    let mut answer: Option<String> = None;

    let case = story_case(sample, lexicon);
    'pipeline: {
        let bundle = match render(&case, config.style, &preset, exemplar_text) {
            Ok(b) => b,
            Err(err) => {
                faults.push(Fault::new(FaultKind::UnparsedLine, None, err.to_string()));
                break 'pipeline;
            }
        };
        let request = CompletionRequest::new(&config.model, bundle.request_text());
        let completions = match backend.complete(&request) {
            Ok(texts) => texts,
            Err(err) => {
                let kind = match err {
                    GatewayError::CacheMiss(_) => FaultKind::CacheMiss,
                    _ => FaultKind::Transport,
                };
                faults.push(Fault::new(kind, None, err.to_string()));
                break 'pipeline;
            }
        };
        let raw = completions.first().cloned().unwrap_or_default();
        let sliced = match completion_slice(&bundle, &raw) {
            Ok(text) => text,
            Err(err) => {
                faults.push(Fault::new(FaultKind::EmptyCompletion, None, err.to_string()));
                break 'pipeline;
            }
        };
        if config.style == PromptStyle::NaturalLanguage {
            answer = Some(sliced.trim().to_string());
            break 'pipeline;
        }
        let program = match parse_program(&sliced, config.style, &preset) {
            Ok(p) => p,
            Err(err) => {
                faults.push(Fault::new(FaultKind::UnparsedLine, None, err.to_string()));
                break 'pipeline;
            }
        };
        let world = match WorldState::init(preset.clone(), &case.entities) {
            Ok(w) => w,
            Err(err) => {
                faults.push(Fault::new(FaultKind::UnknownEntity, None, err.to_string()));
                break 'pipeline;
            }
        };
        let table = AbstractFunctionTable::babi_task2();
        let evaluation = evaluate(&program, world, &table);
        faults.extend(evaluation.faults.iter().cloned());
        match extract_answer(&evaluation, Some(&sample.question)) {
            Answer::Text(text) => answer = Some(text),
            Answer::Unanswerable => {
                faults.push(Fault::new(
                    FaultKind::Unanswerable,
                    None,
                    format!("no answer for `{}`", sample.question),
                ));
            }
        }
    }

    let correct = answer
        .as_deref()
        .map(|a| answers_match(a, &sample.answer))
        .unwrap_or(false);
    SampleVerdict {
        index,
        question: sample.question.clone(),
        gold: sample.answer.clone(),
        answer,
        correct,
        faults,
    }
}

/// Run the full pipeline over the samples and score accuracy. Per-case
/// problems become faults on the verdicts; the run always completes.
pub fn run_babi(
    samples: &[BabiSample],
    backend: &dyn Completer,
    exemplar_text: &str,
    lexicon: &ActionLexicon,
    config: &RunConfig,
) -> BabiReport {
    let limit = config.sample_limit.unwrap_or(samples.len()).min(samples.len());
    let samples = &samples[..limit];

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs.max(1))
        .build()
        .expect("thread pool");
    let verdicts: Vec<SampleVerdict> = pool.install(|| {
        samples
            .par_iter()
            .enumerate()
            .map(|(index, sample)| judge(index, sample, backend, exemplar_text, lexicon, config))
            .collect()
    });

    let n = verdicts.len();
    let correct = verdicts.iter().filter(|v| v.correct).count();
    let unanswerable = verdicts.iter().filter(|v| v.answer.is_none()).count();
    let mut faults_by_kind = BTreeMap::new();
    for verdict in &verdicts {
        for fault in &verdict.faults {
            *faults_by_kind
                .entry(fault.kind.as_str().to_string())
                .or_insert(0usize) += 1;
        }
    }
    BabiReport {
        style: config.style.as_str().to_string(),
        n,
        correct,
        accuracy: if n == 0 { 0.0 } else { correct as f64 / n as f64 },
        unanswerable,
        faults_by_kind,
        verdicts,
    }
}

impl BabiReport {
    /// Human-readable summary table.
    pub fn table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "bAbI Task 2 — style {}: accuracy {:.3} ({}/{} correct, {} unanswerable)\n",
            self.style, self.accuracy, self.correct, self.n, self.unanswerable
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

/// The perfect completer: answers each rendered prompt with the oracle's own
/// gold program, in the style the prompt was rendered for.
pub struct OracleBackend {
    completions: HashMap<String, String>,
    id: String,
}

impl OracleBackend {
    /// Pre-render every sample's request and pair it with the oracle's gold
    /// completion. Samples the oracle cannot solve are skipped; asking for
    /// them later surfaces as a per-case fault.
    pub fn new(
        samples: &[BabiSample],
        style: PromptStyle,
        exemplar_text: &str,
        lexicon: &ActionLexicon,
    ) -> OracleBackend {
        let preset = SchemaPreset::babi_task2();
        let mut completions = HashMap::new();
        for sample in samples {
            let Ok(solution) = oracle_solve(sample, lexicon) else {
                continue;
            };
            let case = story_case(sample, lexicon);
            let Ok(bundle) = render(&case, style, &preset, exemplar_text) else {
                continue;
            };
            let completion = match style {
                PromptStyle::NaturalLanguage => format!(" {}\n", solution.answer),
                PromptStyle::SpecificFunctions => {
                    let program = solution.gold_program(style);
                    let mut text = render_specific_defs(&program, "    ", "        ");
                    text.push('\n');
                    text
                }
                _ => {
                    let program = solution.gold_program(style);
                    let mut text = render_comment_body(&program, "        ");
                    text.push('\n');
                    text
                }
            };
            completions.insert(bundle.request_text(), completion);
        }
        OracleBackend {
            completions,
            id: format!("oracle:{}", style.as_str()),
        }
    }
}

impl Completer for OracleBackend {
    fn complete(&self, request: &CompletionRequest) -> Result<Vec<String>, GatewayError> {
        let completion = self
            .completions
            .get(&request.prompt)
            .ok_or(GatewayError::NoScript)?;
        Ok(vec![completion.clone(); request.sample_count as usize])
    }

    fn id(&self) -> &str {
        &self.id
    }
}
