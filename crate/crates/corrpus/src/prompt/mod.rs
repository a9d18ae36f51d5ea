//! Prompt rendering for the three code prompting styles plus the plain
//! natural-language baseline.
//!
//! Rendering is pure and byte-exact: the golden files under `assets/prompts/`
//! pin the wire format, and `render_worked` must reproduce them exactly. A
//! worked example (story plus its gold update program) doubles as the 1-shot
//! exemplar; a target prefix ends where generation begins.

pub mod exemplar;

use thiserror::Error;

use crate::dsl::{
    pretty::{render_comment_body, render_specific_defs, render_specific_story},
    GroupKey, UpdateProgram,
};
use crate::world::{display_name, PresetId, SchemaPreset};

/// The prompt scaffolding handed to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PromptStyle {
    CommentOnly,
    SpecificFunctions,
    AbstractFunctions,
    NaturalLanguage,
}

impl PromptStyle {
    pub const CODE_STYLES: [PromptStyle; 3] = [
        PromptStyle::CommentOnly,
        PromptStyle::SpecificFunctions,
        PromptStyle::AbstractFunctions,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            PromptStyle::CommentOnly => "comment",
            PromptStyle::SpecificFunctions => "specific",
            PromptStyle::AbstractFunctions => "abstract",
            PromptStyle::NaturalLanguage => "natural",
        }
    }

    pub fn parse(s: &str) -> Option<PromptStyle> {
        match s {
            "comment" | "comment-only" => Some(PromptStyle::CommentOnly),
            "specific" | "specific-functions" => Some(PromptStyle::SpecificFunctions),
            "abstract" | "abstract-functions" => Some(PromptStyle::AbstractFunctions),
            "natural" | "natural-language" => Some(PromptStyle::NaturalLanguage),
            _ => None,
        }
    }
}

impl std::fmt::Display for PromptStyle {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One story to run: its sentences, the entities the world starts with, and
/// the optional question.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StoryCase {
    pub sentences: Vec<String>,
    /// `(kind, identifier)` pairs in declaration order.
    pub entities: Vec<(String, String)>,
    pub query: Option<String>,
    pub gold_answer: Option<String>,
}

/// The rendered request for one story: `exemplar + target_prefix` is the
/// exact text sent to the model.
#[derive(Debug, Clone)]
pub struct PromptBundle {
    pub exemplar: String,
    pub target_prefix: String,
    pub style: PromptStyle,
    /// Scaffold statements that live in the prefix but belong to the program
    /// (the Specific Functions story body); prepended by `completion_slice`.
    pub program_prelude: String,
}

impl PromptBundle {
    pub fn request_text(&self) -> String {
        format!("{}{}", self.exemplar, self.target_prefix)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RenderError {
    #[error("story has no sentences")]
    EmptyStory,
    #[error("sentence has no alphanumeric characters: `{0}`")]
    Unsluggable(String),
    #[error("exemplar program does not match the {style} style: {detail}")]
    StyleMismatch { style: PromptStyle, detail: String },
    #[error("the natural-language style needs a query and a gold answer")]
    NaturalNeedsAnswer,
    #[error("no exemplar is shipped for {task}/{style}")]
    NoExemplar { task: &'static str, style: PromptStyle },
    #[error("completion is empty")]
    EmptyCompletion,
}

/// Lowercase a sentence into a function-name slug: every maximal run of
/// non-alphanumeric characters becomes one underscore.
pub fn slugify(sentence: &str) -> Result<String, RenderError> {
    let mut out = String::new();
    let mut pending = false;
    for c in sentence.chars() {
        if c.is_ascii_alphanumeric() {
            if pending && !out.is_empty() {
                out.push('_');
            }
            pending = false;
            out.push(c.to_ascii_lowercase());
        } else {
            pending = true;
        }
    }
    if out.is_empty() {
        return Err(RenderError::Unsluggable(sentence.to_string()));
    }
    Ok(out)
}

/// Slugs for a whole story, with `_2`, `_3`, … suffixes on collisions so the
/// Specific Functions style always gets unique names.
pub fn unique_slugs(sentences: &[String]) -> Result<Vec<String>, RenderError> {
    let mut seen: std::collections::HashSet<String> = std::collections::HashSet::new();
    let mut slugs = Vec::with_capacity(sentences.len());
    for sentence in sentences {
        let base = slugify(sentence)?;
        let mut candidate = base.clone();
        let mut n = 1usize;
        while !seen.insert(candidate.clone()) {
            n += 1;
            candidate = format!("{base}_{n}");
        }
        slugs.push(candidate);
    }
    Ok(slugs)
}

fn instruction(preset: PresetId, style: PromptStyle) -> &'static str {
    match (preset, style) {
        (PresetId::Re3Character, PromptStyle::SpecificFunctions) => {
            "Create a world model state and track each character's appearance, personality, relationship to other characters, and other cruical attributes."
        }
        (PresetId::Re3Character, _) => {
            "Create a world model state to track each character's appearance, personality, and relations with other characters."
        }
        (PresetId::BabiTask2, _) => {
            "Create a world model state to track the locations of the characters and the objects they carry, then answer the query."
        }
    }
}

fn class_blocks(preset: &SchemaPreset) -> String {
    let mut blocks = Vec::new();
    for schema in preset.schemas() {
        let mut lines = vec![
            format!("class {}:", schema.kind),
            "    def __init__(self, name):".to_string(),
            "        self.name = name".to_string(),
        ];
        for (attr, kind) in &schema.attributes {
            if attr == "name" {
                continue;
            }
            let default = match kind {
                crate::world::AttributeKind::Scalar => "None",
                crate::world::AttributeKind::List => "[]",
                crate::world::AttributeKind::Map => "{}",
            };
            lines.push(format!("        self.{attr} = {default}"));
        }
        blocks.push(lines.join("\n"));
    }
    blocks.join("\n\n")
}

fn world_init(case: &StoryCase) -> String {
    let mut lines = vec![
        "class World:".to_string(),
        "    def __init__(self):".to_string(),
    ];
    if case.entities.is_empty() {
        lines.push("        pass".to_string());
    }
    for (kind, name) in &case.entities {
        lines.push(format!(
            "        self.{name} = {kind}('{}')",
            display_name(name)
        ));
    }
    lines.join("\n")
}

fn abstract_defs(preset: &SchemaPreset) -> String {
    let table = match preset.id {
        PresetId::BabiTask2 => crate::dsl::AbstractFunctionTable::babi_task2(),
        PresetId::Re3Character => crate::dsl::AbstractFunctionTable::re3_character(),
    };
    let mut blocks = Vec::new();
    for function in table.functions() {
        let mut lines = vec![format!(
            "    def {}(self, {}):",
            function.name,
            function.params.join(", ")
        )];
        for body_line in &function.body {
            lines.push(format!("        {body_line}"));
        }
        blocks.push(lines.join("\n"));
    }
    blocks.join("\n\n")
}

/// Everything up to and including the `def story(self):` header (or, for the
/// Specific Functions style, the slug-call body as well).
fn document_head(case: &StoryCase, style: PromptStyle, preset: &SchemaPreset) -> Result<String, RenderError> {
    let mut sections: Vec<String> = Vec::new();
    match style {
        PromptStyle::CommentOnly | PromptStyle::AbstractFunctions => {
            let mut header: Vec<String> =
                case.sentences.iter().map(|s| format!("## {s}")).collect();
            if let Some(query) = &case.query {
                header.push(format!("## {query}"));
            }
            header.push(format!("## {}", instruction(preset.id, style)));
            sections.push(header.join("\n"));
            sections.push(class_blocks(preset));
        }
        PromptStyle::SpecificFunctions => {
            // The instruction banner sits directly above the class block.
            sections.push(format!(
                "### {}\n{}",
                instruction(preset.id, style),
                class_blocks(preset)
            ));
        }
        PromptStyle::NaturalLanguage => unreachable!("natural prompts have no code head"),
    }
    sections.push(world_init(case));
    if style == PromptStyle::AbstractFunctions {
        sections.push(abstract_defs(preset));
    }
    sections.push("    def story(self):".to_string());
    Ok(sections.join("\n\n"))
}

/// The Specific Functions story-body scaffold: one call per sentence, then
/// the query comment and answer print when a query is present.
fn specific_story_scaffold(case: &StoryCase) -> Result<String, RenderError> {
    let slugs = unique_slugs(&case.sentences)?;
    let mut lines: Vec<String> = slugs
        .iter()
        .map(|slug| format!("        self.{slug}()"))
        .collect();
    if let Some(query) = &case.query {
        lines.push(format!("        ## {query}"));
        if let Some(object) = crate::dsl::object_of_query(query) {
            lines.push(format!("        print(self.{object}.location)"));
        }
    }
    Ok(lines.join("\n"))
}

/// Render the complete worked example for a story and its gold program.
/// This is the exemplar format pinned byte-for-byte by the golden files.
pub fn render_worked(
    case: &StoryCase,
    program: &UpdateProgram,
    style: PromptStyle,
    preset: &SchemaPreset,
) -> Result<String, RenderError> {
    if case.sentences.is_empty() {
        return Err(RenderError::EmptyStory);
    }
    let has_slugs = program
        .groups
        .iter()
        .any(|g| matches!(g.key, GroupKey::Slug(_)));
    match style {
        PromptStyle::NaturalLanguage => {
            let (Some(query), Some(answer)) = (&case.query, &case.gold_answer) else {
                return Err(RenderError::NaturalNeedsAnswer);
            };
            let mut out = case.sentences.join("\n");
            out.push_str(&format!("\nQ: {query}\nA: {answer}\n"));
            return Ok(out);
        }
        PromptStyle::SpecificFunctions => {
            if !has_slugs {
                return Err(RenderError::StyleMismatch {
                    style,
                    detail: "program has no slug-named groups".to_string(),
                });
            }
        }
        _ => {
            if has_slugs {
                return Err(RenderError::StyleMismatch {
                    style,
                    detail: "program groups are slug-named".to_string(),
                });
            }
        }
    }

    let head = document_head(case, style, preset)?;
    let body = match style {
        PromptStyle::SpecificFunctions => {
            let story = render_specific_story(program, "        ");
            let defs = render_specific_defs(program, "    ", "        ");
            format!("{story}\n\n{defs}")
        }
        _ => render_comment_body(program, "        "),
    };
    Ok(format!("{head}\n{body}\n"))
}

/// Render everything the model is given for the current story, ending exactly
/// where generation begins.
pub fn render_target_prefix(
    case: &StoryCase,
    style: PromptStyle,
    preset: &SchemaPreset,
) -> Result<String, RenderError> {
    if case.sentences.is_empty() {
        return Err(RenderError::EmptyStory);
    }
    match style {
        PromptStyle::NaturalLanguage => {
            let Some(query) = &case.query else {
                return Err(RenderError::NaturalNeedsAnswer);
            };
            Ok(format!("{}\nQ: {query}\nA:", case.sentences.join("\n")))
        }
        PromptStyle::SpecificFunctions => {
            let head = document_head(case, style, preset)?;
            let scaffold = specific_story_scaffold(case)?;
            Ok(format!("{head}\n{scaffold}\n\n"))
        }
        _ => {
            let head = document_head(case, style, preset)?;
            Ok(format!("{head}\n"))
        }
    }
}

/// Build the full request bundle from a target story and an exemplar text
/// (normally a shipped worked example, optionally a user-supplied one).
pub fn render(
    case: &StoryCase,
    style: PromptStyle,
    preset: &SchemaPreset,
    exemplar_text: &str,
) -> Result<PromptBundle, RenderError> {
    let target_prefix = render_target_prefix(case, style, preset)?;
    let program_prelude = match style {
        PromptStyle::SpecificFunctions => {
            let mut scaffold = specific_story_scaffold(case)?;
            scaffold.push('\n');
            scaffold
        }
        _ => String::new(),
    };
    let mut exemplar = exemplar_text.to_string();
    if !exemplar.ends_with('\n') {
        exemplar.push('\n');
    }
    exemplar.push('\n');
    Ok(PromptBundle {
        exemplar,
        target_prefix,
        style,
        program_prelude,
    })
}

/// Cut a raw completion down to exactly the program text to parse: strip any
/// echo of the request, truncate at the first construct past the story body,
/// trim trailing whitespace, and prepend the scaffold statements the prefix
/// already contained.
pub fn completion_slice(bundle: &PromptBundle, raw: &str) -> Result<String, RenderError> {
    if raw.trim().is_empty() {
        return Err(RenderError::EmptyCompletion);
    }
    let request = bundle.request_text();
    let mut text: &str = raw;
    if let Some(rest) = text.strip_prefix(request.as_str()) {
        text = rest;
    } else if let Some(rest) = text.strip_prefix(bundle.target_prefix.as_str()) {
        text = rest;
    }

    if bundle.style == PromptStyle::NaturalLanguage {
        let answer = text.lines().map(str::trim).find(|l| !l.is_empty());
        return match answer {
            Some(line) => Ok(line.to_string()),
            None => Err(RenderError::EmptyCompletion),
        };
    }

    let mut kept: Vec<&str> = Vec::new();
    for line in text.lines() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            kept.push(line);
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        // Anything at column zero is past the program: another class, a new
        // prompt, prose.
        if indent == 0 {
            break;
        }
        match bundle.style {
            // A method definition means the model moved past the story body.
            PromptStyle::CommentOnly | PromptStyle::AbstractFunctions => {
                if indent <= 4 && trimmed.starts_with("def ") {
                    break;
                }
            }
            // A fresh story() means the model started the next example.
            PromptStyle::SpecificFunctions => {
                if trimmed == "def story(self):" {
                    break;
                }
            }
            PromptStyle::NaturalLanguage => unreachable!(),
        }
        kept.push(line);
    }
    let sliced = kept.join("\n");
    let sliced = sliced.trim_end();
    if sliced.trim().is_empty() && bundle.program_prelude.is_empty() {
        return Err(RenderError::EmptyCompletion);
    }
    let mut program = bundle.program_prelude.clone();
    program.push_str(sliced);
    if !program.ends_with('\n') {
        program.push('\n');
    }
    Ok(program)
}
