//! From raw story text to attribute extractions: sentence splitting,
//! character roster detection, prompt rendering, and the three-generation
//! sampling loop.

use super::{AttributeExtraction, Extraction};
use crate::dsl::{evaluate, parse_program, AbstractFunctionTable};
use crate::fault::{Fault, FaultKind};
use crate::gateway::{Completer, CompletionRequest};
use crate::prompt::{completion_slice, render, PromptBundle, PromptStyle, StoryCase};
use crate::world::{SchemaPreset, WorldState};

/// Split free text into sentences: newlines always split; `.`, `!`, `?`
/// split only when followed by whitespace and a capital or quote, so
/// clause-internal periods survive.
pub fn split_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    for line in text.lines() {
        let chars: Vec<char> = line.chars().collect();
        let mut start = 0usize;
        let mut i = 0usize;
        while i < chars.len() {
            let c = chars[i];
            if c == '.' || c == '!' || c == '?' {
                let mut j = i + 1;
                while j < chars.len() && chars[j].is_whitespace() {
                    j += 1;
                }
                let boundary = j > i + 1
                    && j < chars.len()
                    && (chars[j].is_uppercase() || chars[j] == '"' || chars[j] == '\'');
                if boundary {
                    let sentence: String = chars[start..=i].iter().collect();
                    let sentence = sentence.trim().to_string();
                    if !sentence.is_empty() {
                        sentences.push(sentence);
                    }
                    start = j;
                    i = j;
                    continue;
                }
            }
            i += 1;
        }
        let tail: String = chars[start..].iter().collect();
        let tail = tail.trim().to_string();
        if !tail.is_empty() {
            sentences.push(tail);
        }
    }
    sentences
}

/// Words that open sentences without naming anyone; applied only to
/// single-token header candidates.
const NOT_NAMES: [&str; 22] = [
    "The", "A", "An", "This", "That", "There", "Then", "She", "He", "It", "They", "I", "We",
    "You", "His", "Her", "Their", "When", "But", "And", "Once", "After",
];

fn strip_possessive(token: &str) -> &str {
    let token = token.trim_matches(|c: char| !c.is_alphanumeric() && c != '\'' && c != '-');
    token
        .strip_suffix("'s")
        .or_else(|| token.strip_suffix('\''))
        .unwrap_or(token)
}

fn capitalized_word(token: &str) -> Option<String> {
    let cleaned = strip_possessive(token);
    let mut chars = cleaned.chars();
    match chars.next() {
        Some(first) if first.is_uppercase() => {
            if chars.all(|c| c.is_alphabetic() || c == '-') {
                Some(cleaned.to_string())
            } else {
                None
            }
        }
        _ => None,
    }
}

/// The character roster for a text: names in premise-style header lines
/// (`<Name> is …`) plus any capitalized multi-token name that recurs.
/// Identifiers join the tokens with underscores, in order of first mention.
pub fn derive_roster(text: &str) -> Vec<(String, String)> {
    let sentences = split_sentences(text);
    let mut counts: Vec<(String, usize)> = Vec::new(); // display name -> count
    let mut headers: Vec<String> = Vec::new();

    let bump = |list: &mut Vec<(String, usize)>, name: String| {
        match list.iter_mut().find(|(n, _)| *n == name) {
            Some((_, c)) => *c += 1,
            None => list.push((name, 1)),
        }
    };

    for sentence in &sentences {
        let tokens: Vec<&str> = sentence.split_whitespace().collect();
        let mut i = 0usize;
        while i < tokens.len() {
            let mut run: Vec<String> = Vec::new();
            let mut j = i;
            while j < tokens.len() {
                match capitalized_word(tokens[j]) {
                    Some(word) => {
                        run.push(word);
                        // A possessive ends the name even when capitalized.
                        if strip_possessive(tokens[j]).len() != tokens[j].trim_matches(|c: char| !c.is_alphanumeric() && c != '\'').len() {
                            j += 1;
                            break;
                        }
                        j += 1;
                    }
                    None => break,
                }
            }
            if run.is_empty() {
                i += 1;
                continue;
            }
            let name = run.join(" ");
            if run.len() >= 2 {
                bump(&mut counts, name.clone());
            }
            // Header-line names: sentence starts with the run, then `is`.
            if i == 0 && tokens.get(j).copied() == Some("is") {
                let acceptable = run.len() >= 2 || !NOT_NAMES.contains(&run[0].as_str());
                if acceptable && !headers.contains(&name) {
                    headers.push(name);
                }
            }
            i = j.max(i + 1);
        }
    }

    let mut roster: Vec<String> = Vec::new();
    for name in headers {
        if !roster.contains(&name) {
            roster.push(name);
        }
    }
    for (name, count) in counts {
        if count >= 2 && !roster.contains(&name) {
            roster.push(name);
        }
    }
    roster
        .into_iter()
        .map(|display| ("character".to_string(), display.replace(' ', "_")))
        .collect()
}

/// Render the extraction prompt for a text. Shared by the live pipeline and
/// the scripted test backends so both key on identical bytes.
pub fn prompt_for_text(
    text: &str,
    style: PromptStyle,
    exemplar_text: &str,
) -> Result<(StoryCase, PromptBundle), crate::prompt::RenderError> {
    let preset = SchemaPreset::re3_character();
    let case = StoryCase {
        sentences: split_sentences(text),
        entities: derive_roster(text),
        query: None,
        gold_answer: None,
    };
    let bundle = render(&case, style, &preset, exemplar_text)?;
    Ok((case, bundle))
}

/// Extract character attributes from a text: render the prompt, request
/// three samples at temperature 0.7, interpret each sample into a world
/// state, and read the attribute assertions off each world. Failed samples
/// become empty generations with faults; an empty text extracts nothing.
pub fn extract_attributes(
    text: &str,
    style: PromptStyle,
    backend: &dyn Completer,
    model: &str,
    exemplar_text: &str,
) -> Extraction {
    let mut extraction = Extraction::new(3);
    if text.trim().is_empty() {
        return extraction;
    }
    let preset = SchemaPreset::re3_character();
    let (case, bundle) = match prompt_for_text(text, style, exemplar_text) {
        Ok(pair) => pair,
        Err(err) => {
            extraction
                .faults
                .push(Fault::new(FaultKind::UnparsedLine, None, err.to_string()));
            return extraction;
        }
    };
    let request = CompletionRequest::new(model, bundle.request_text())
        .with_temperature(0.7)
        .with_samples(3);
    let completions = match backend.complete(&request) {
        Ok(texts) => texts,
        Err(err) => {
            extraction
                .faults
                .push(Fault::new(FaultKind::Transport, None, err.to_string()));
            extraction
                .faults
                .push(Fault::new(FaultKind::AllSamplesUnparseable, None, "no generations"));
            return extraction;
        }
    };

    let table = AbstractFunctionTable::re3_character();
    let mut parsed_any = false;
    for (index, raw) in completions.iter().enumerate().take(3) {
        let sliced = match completion_slice(&bundle, raw) {
            Ok(text) => text,
            Err(err) => {
                extraction.faults.push(Fault::new(
                    FaultKind::EmptyCompletion,
                    None,
                    format!("generation {index}: {err}"),
                ));
                continue;
            }
        };
        let program = match parse_program(&sliced, style, &preset) {
            Ok(p) => p,
            Err(err) => {
                extraction.faults.push(Fault::new(
                    FaultKind::UnparsedLine,
                    None,
                    format!("generation {index}: {err}"),
                ));
                continue;
            }
        };
        let world = match WorldState::init(preset.clone(), &case.entities) {
            Ok(w) => w,
            Err(err) => {
                extraction.faults.push(Fault::new(
                    FaultKind::UnknownEntity,
                    None,
                    err.to_string(),
                ));
                continue;
            }
        };
        let evaluation = evaluate(&program, world, &table);
        extraction.faults.extend(evaluation.faults.iter().cloned());
        extraction.generations[index] = AttributeExtraction::from_world(&evaluation.world, index);
        parsed_any = true;
    }
    if !parsed_any {
        extraction.faults.push(Fault::new(
            FaultKind::AllSamplesUnparseable,
            None,
            "all generations failed to parse",
        ));
    }
    extraction
}
