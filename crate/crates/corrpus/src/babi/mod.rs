//! bAbI Task 2 harness: dataset parsing, a fully symbolic oracle solver, a
//! seeded synthetic story generator, and the accuracy run driver.
//!
//! The oracle answers location questions by direct simulation, with no help
//! from the world model or the dialect interpreter; it also emits the gold
//! update program for any story, which makes it double as the perfect
//! completion backend and the fuel for interpreter-equivalence tests.

mod run;
mod synth;

pub use run::{run_babi, BabiReport, OracleBackend, RunConfig, SampleVerdict};
pub use synth::{generate_dataset, generate_synthetic, SynthConfig};

use std::collections::HashMap;
use std::path::Path;

use thiserror::Error;

use crate::dsl::{
    ArgValue, CallArg, Group, GroupKey, Literal, PrintExpr, Statement, Stmt, UpdateProgram,
};
use crate::prompt::{unique_slugs, PromptStyle};
use crate::world::{SchemaPreset, WorldError, WorldState};

/// One (story, question, answer) tuple in the Task 2 line format.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BabiSample {
    /// Statement lines before the question: (line id, sentence).
    pub story: Vec<(u32, String)>,
    pub question: String,
    pub answer: String,
    pub supporting: Vec<u32>,
}

impl BabiSample {
    pub fn sentences(&self) -> Vec<String> {
        self.story.iter().map(|(_, s)| s.clone()).collect()
    }
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("line {line}: malformed: {detail}")]
    Malformed { line: usize, detail: String },
    #[error("line {line}: ids must increase within a story (got {id} after {previous})")]
    NonMonotoneId { line: usize, id: u32, previous: u32 },
}

/// Verb patterns for the three Task 2 action shapes. The sets are disjoint
/// and locked against the shipped dataset by a totality test.
#[derive(Debug, Clone)]
pub struct ActionLexicon {
    pub movement: Vec<String>,
    pub take: Vec<String>,
    pub drop: Vec<String>,
}

impl Default for ActionLexicon {
    fn default() -> Self {
        let words = |items: &[&str]| items.iter().map(|s| s.to_string()).collect();
        ActionLexicon {
            movement: words(&["moved", "went", "journeyed", "travelled"]),
            take: words(&["took", "got", "grabbed", "picked up"]),
            drop: words(&["dropped", "discarded", "left", "put down"]),
        }
    }
}

/// A story sentence reduced to its action.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParsedAction {
    Move { actor: String, room: String },
    Take { actor: String, object: String },
    Drop { actor: String, object: String },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("sentence matches no lexicon pattern: `{0}`")]
    Unmatched(String),
    #[error("question asks about `{0}`, which the story never mentions")]
    UnknownQueryObject(String),
    #[error("the location of `{0}` is undetermined")]
    Unanswerable(String),
    #[error(transparent)]
    World(#[from] WorldError),
}

impl ActionLexicon {
    fn match_verb<'a>(verbs: &[String], tokens: &'a [&'a str]) -> Option<&'a [&'a str]> {
        for verb in verbs {
            let parts: Vec<&str> = verb.split_whitespace().collect();
            if tokens.len() > parts.len() && tokens[..parts.len()] == parts[..] {
                return Some(&tokens[parts.len()..]);
            }
        }
        None
    }

    /// Parse one story sentence into an action.
    pub fn parse_sentence(&self, sentence: &str) -> Result<ParsedAction, OracleError> {
        let text = sentence.trim().trim_end_matches('.');
        let tokens: Vec<&str> = text.split_whitespace().collect();
        if tokens.len() < 3 {
            return Err(OracleError::Unmatched(sentence.to_string()));
        }
        let actor = tokens[0].to_string();
        let rest = &tokens[1..];

        if let Some(after) = Self::match_verb(&self.movement, rest) {
            let after = if after.first() == Some(&"back") {
                &after[1..]
            } else {
                after
            };
            if after.len() >= 3 && after[0] == "to" && after[1] == "the" {
                return Ok(ParsedAction::Move {
                    actor,
                    room: after[2..].join(" "),
                });
            }
        }
        if let Some(after) = Self::match_verb(&self.take, rest) {
            if after.len() >= 2 && after[0] == "the" {
                let mut object = &after[1..];
                if object.last() == Some(&"there") {
                    object = &object[..object.len() - 1];
                }
                if !object.is_empty() {
                    return Ok(ParsedAction::Take {
                        actor,
                        object: object.join(" "),
                    });
                }
            }
        }
        if let Some(after) = Self::match_verb(&self.drop, rest) {
            if after.len() >= 2 && after[0] == "the" {
                return Ok(ParsedAction::Drop {
                    actor,
                    object: after[1..].join(" "),
                });
            }
        }
        Err(OracleError::Unmatched(sentence.to_string()))
    }
}

/// Parse the plain-text line format: `ID sentence` for statements,
/// `ID question\tanswer\tsupporting-ids` for questions. A new story starts
/// when the id resets to 1; every question yields one sample carrying the
/// statements seen so far in its story.
pub fn parse_babi_text(text: &str) -> Result<Vec<BabiSample>, DatasetError> {
    let mut samples = Vec::new();
    let mut story: Vec<(u32, String)> = Vec::new();
    let mut previous: Option<u32> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let raw = raw.trim_end_matches('\r');
        if raw.trim().is_empty() {
            continue;
        }
        let (id_text, rest) = raw.split_once(' ').ok_or(DatasetError::Malformed {
            line: line_no,
            detail: "expected `ID text`".to_string(),
        })?;
        let id: u32 = id_text.parse().map_err(|_| DatasetError::Malformed {
            line: line_no,
            detail: format!("bad line id `{id_text}`"),
        })?;
        match previous {
            None if id != 1 => {
                return Err(DatasetError::Malformed {
                    line: line_no,
                    detail: format!("first story must start at id 1, got {id}"),
                })
            }
            Some(_) if id == 1 => story.clear(),
            Some(prev) if id <= prev => {
                return Err(DatasetError::NonMonotoneId {
                    line: line_no,
                    id,
                    previous: prev,
                })
            }
            _ => {}
        }
        previous = Some(id);

        if rest.contains('\t') {
            let fields: Vec<&str> = rest.split('\t').collect();
            if fields.len() < 2 {
                return Err(DatasetError::Malformed {
                    line: line_no,
                    detail: "question line needs an answer field".to_string(),
                });
            }
            let question = fields[0].trim().to_string();
            let answer = fields[1].trim().to_string();
            let supporting = fields
                .get(2)
                .map(|s| {
                    s.split_whitespace()
                        .map(|t| {
                            t.parse::<u32>().map_err(|_| DatasetError::Malformed {
                                line: line_no,
                                detail: format!("bad supporting id `{t}`"),
                            })
                        })
                        .collect::<Result<Vec<u32>, _>>()
                })
                .transpose()?
                .unwrap_or_default();
            samples.push(BabiSample {
                story: story.clone(),
                question,
                answer,
                supporting,
            });
        } else {
            story.push((id, rest.trim().to_string()));
        }
    }
    Ok(samples)
}

pub fn parse_babi_file(path: &Path) -> Result<Vec<BabiSample>, DatasetError> {
    let text = std::fs::read_to_string(path).map_err(|source| DatasetError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_babi_text(&text)
}

/// Entity declarations for a sample, in order of first appearance:
/// characters first as they act, then objects as they are handled, then the
/// queried object if it never appeared.
pub fn derive_entities(sample: &BabiSample, lexicon: &ActionLexicon) -> Vec<(String, String)> {
    let mut characters: Vec<String> = Vec::new();
    let mut objects: Vec<String> = Vec::new();
    let note = |list: &mut Vec<String>, name: &str| {
        if !list.iter().any(|n| n == name) {
            list.push(name.to_string());
        }
    };
    for (_, sentence) in &sample.story {
        if let Ok(action) = lexicon.parse_sentence(sentence) {
            match action {
                ParsedAction::Move { actor, .. } => note(&mut characters, &actor),
                ParsedAction::Take { actor, object } | ParsedAction::Drop { actor, object } => {
                    note(&mut characters, &actor);
                    note(&mut objects, &object);
                }
            }
        }
    }
    if let Some(object) = crate::dsl::object_of_query(&sample.question) {
        if !characters.iter().any(|c| c == &object) {
            note(&mut objects, &object);
        }
    }
    characters
        .into_iter()
        .map(|name| ("character".to_string(), name))
        .chain(objects.into_iter().map(|name| ("object".to_string(), name)))
        .collect()
}

/// An action enriched with everything the gold program needs.
#[derive(Debug, Clone)]
enum GoldAction {
    Move {
        actor: String,
        room: String,
    },
    Take {
        actor: String,
        object: String,
    },
    Drop {
        actor: String,
        object: String,
        /// The actor's room at drop time; the object's location pins there.
        room: Option<String>,
    },
}

/// The oracle's result: the answer, the final world, and the gold update
/// program in whichever style the caller asks for.
#[derive(Debug, Clone)]
pub struct OracleSolution {
    pub answer: String,
    pub entities: Vec<(String, String)>,
    pub world: WorldState,
    pub query_object: String,
    sentences: Vec<String>,
    actions: Vec<GoldAction>,
}

/// Deterministically simulate a sample: movement sets character location,
/// taking sets the carrier (and the inventory through duality), dropping
/// clears the carrier and pins the object where the character stands.
pub fn oracle_solve(
    sample: &BabiSample,
    lexicon: &ActionLexicon,
) -> Result<OracleSolution, OracleError> {
    // Answer-side simulation: plain maps, independent of the world model.
    let mut char_room: HashMap<String, String> = HashMap::new();
    let mut obj_carrier: HashMap<String, String> = HashMap::new();
    let mut obj_room: HashMap<String, String> = HashMap::new();

    let entities = derive_entities(sample, lexicon);
    let mut world = WorldState::init(SchemaPreset::babi_task2(), &entities)?;
    let mut actions = Vec::new();
    let mut sentences = Vec::new();

    for (_, sentence) in &sample.story {
        let action = lexicon.parse_sentence(sentence)?;
        sentences.push(sentence.clone());
        match action {
            ParsedAction::Move { actor, room } => {
                char_room.insert(actor.clone(), room.clone());
                world.set_scalar(&actor, "location", Some(&room))?;
                actions.push(GoldAction::Move { actor, room });
            }
            ParsedAction::Take { actor, object } => {
                obj_carrier.insert(object.clone(), actor.clone());
                obj_room.remove(&object);
                world.set_scalar(&object, "carrier", Some(&actor))?;
                actions.push(GoldAction::Take { actor, object });
            }
            ParsedAction::Drop { actor, object } => {
                let room = char_room.get(&actor).cloned();
                obj_carrier.remove(&object);
                match &room {
                    Some(r) => {
                        obj_room.insert(object.clone(), r.clone());
                    }
                    None => {
                        obj_room.remove(&object);
                    }
                }
                world.set_scalar(&object, "location", room.as_deref())?;
                world.set_scalar(&object, "carrier", None)?;
                actions.push(GoldAction::Drop {
                    actor,
                    object,
                    room,
                });
            }
        }
        world.bump_step();
    }

    let query_object = crate::dsl::object_of_query(&sample.question)
        .ok_or_else(|| OracleError::UnknownQueryObject(sample.question.clone()))?;
    let mentioned = obj_carrier.contains_key(&query_object)
        || obj_room.contains_key(&query_object)
        || actions.iter().any(|a| match a {
            GoldAction::Take { object, .. } | GoldAction::Drop { object, .. } => {
                object == &query_object
            }
            GoldAction::Move { .. } => false,
        });
    if !mentioned {
        return Err(OracleError::UnknownQueryObject(query_object));
    }
    let answer = match obj_carrier.get(&query_object) {
        Some(carrier) => char_room
            .get(carrier)
            .cloned()
            .ok_or_else(|| OracleError::Unanswerable(query_object.clone()))?,
        None => obj_room
            .get(&query_object)
            .cloned()
            .ok_or_else(|| OracleError::Unanswerable(query_object.clone()))?,
    };

    Ok(OracleSolution {
        answer,
        entities,
        world,
        query_object,
        sentences,
        actions,
    })
}

impl OracleSolution {
    fn statements_for(&self, action: &GoldAction, abstract_calls: bool) -> Vec<Stmt> {
        let lit = |v: &str| Literal::double(v);
        let arg = |v: ArgValue| CallArg {
            name: None,
            value: v,
        };
        match action {
            GoldAction::Move { actor, room } => {
                if abstract_calls {
                    vec![Stmt::new(
                        Statement::AbstractCall {
                            name: "go".to_string(),
                            method_form: true,
                            args: vec![
                                arg(ArgValue::EntityRef(actor.clone())),
                                arg(ArgValue::Lit(lit(room))),
                            ],
                        },
                        0,
                    )]
                } else {
                    vec![Stmt::new(
                        Statement::ScalarAssign {
                            entity: actor.clone(),
                            attribute: "location".to_string(),
                            value: lit(room),
                        },
                        0,
                    )]
                }
            }
            GoldAction::Take { actor, object } => {
                if abstract_calls {
                    vec![Stmt::new(
                        Statement::AbstractCall {
                            name: "grab".to_string(),
                            method_form: true,
                            args: vec![
                                arg(ArgValue::EntityRef(actor.clone())),
                                arg(ArgValue::EntityRef(object.clone())),
                            ],
                        },
                        0,
                    )]
                } else {
                    vec![Stmt::new(
                        Statement::ScalarAssign {
                            entity: object.clone(),
                            attribute: "carrier".to_string(),
                            value: lit(actor),
                        },
                        0,
                    )]
                }
            }
            GoldAction::Drop {
                actor,
                object,
                room,
            } => {
                if abstract_calls {
                    // The drop recipe reads the carrier's location itself.
                    return vec![Stmt::new(
                        Statement::AbstractCall {
                            name: "drop".to_string(),
                            method_form: true,
                            args: vec![
                                arg(ArgValue::EntityRef(actor.clone())),
                                arg(ArgValue::EntityRef(object.clone())),
                            ],
                        },
                        0,
                    )];
                }
                let mut stmts = Vec::new();
                match room {
                    Some(r) => stmts.push(Stmt::new(
                        Statement::ScalarAssign {
                            entity: object.clone(),
                            attribute: "location".to_string(),
                            value: lit(r),
                        },
                        0,
                    )),
                    None => stmts.push(Stmt::new(
                        Statement::ScalarAssign {
                            entity: object.clone(),
                            attribute: "location".to_string(),
                            value: Literal::None,
                        },
                        0,
                    )),
                }
                stmts.push(Stmt::new(
                    Statement::ScalarAssign {
                        entity: object.clone(),
                        attribute: "carrier".to_string(),
                        value: Literal::None,
                    },
                    0,
                ));
                stmts
            }
        }
    }

    /// The gold update program in the requested style. Groups follow the
    /// story sentences exactly; the answer print sits in the trailing slot.
    pub fn gold_program(&self, style: PromptStyle) -> UpdateProgram {
        let abstract_calls = style == PromptStyle::AbstractFunctions;
        let trailing = vec![Stmt::new(
            Statement::Print(PrintExpr::Path {
                entity: self.query_object.clone(),
                attribute: "location".to_string(),
            }),
            0,
        )];
        let groups: Vec<Group> = match style {
            PromptStyle::SpecificFunctions => {
                let slugs =
                    unique_slugs(&self.sentences).expect("story sentences are sluggable");
                self.actions
                    .iter()
                    .zip(slugs)
                    .map(|(action, slug)| Group {
                        key: GroupKey::Slug(slug),
                        statements: self.statements_for(action, false),
                    })
                    .collect()
            }
            _ => self
                .actions
                .iter()
                .zip(&self.sentences)
                .map(|(action, sentence)| Group {
                    key: GroupKey::Sentence(sentence.clone()),
                    statements: self.statements_for(action, abstract_calls),
                })
                .collect(),
        };
        UpdateProgram {
            groups,
            trailing,
            faults: Vec::new(),
        }
    }
}

#[cfg(test)]
mod tests;
