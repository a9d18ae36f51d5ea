//! Built-in one-shot exemplars: a fully worked story per task and style.
//!
//! The byte-exact exemplar texts ship under `assets/prompts/` and are
//! embedded here; the equivalent structured fixtures below are what
//! `render_worked` must reproduce, and what the golden-file tests compare
//! against. The bAbI exemplar is a hand-authored reconstruction; the re3
//! exemplar follows the published worked example for the Joan Westfall story.

use super::{PromptStyle, StoryCase};
use crate::dsl::{
    ArgValue, CallArg, Group, GroupKey, Literal, PrintExpr, Statement, Stmt, UpdateProgram,
};
use crate::world::PresetId;

/// A worked example: the story case plus its gold update program.
#[derive(Debug, Clone)]
pub struct Exemplar {
    pub case: StoryCase,
    pub program: UpdateProgram,
}

fn stmt(statement: Statement) -> Stmt {
    Stmt::new(statement, 0)
}

fn scalar(entity: &str, attribute: &str, value: Literal) -> Stmt {
    stmt(Statement::ScalarAssign {
        entity: entity.to_string(),
        attribute: attribute.to_string(),
        value,
    })
}

fn append(entity: &str, attribute: &str, value: Literal) -> Stmt {
    stmt(Statement::ListAppend {
        entity: entity.to_string(),
        attribute: attribute.to_string(),
        value,
    })
}

fn bind(entity: &str, attribute: &str, key: Literal, value: Literal) -> Stmt {
    stmt(Statement::MapAssign {
        entity: entity.to_string(),
        attribute: attribute.to_string(),
        key,
        value,
    })
}

fn call(name: &str, args: Vec<ArgValue>) -> Stmt {
    stmt(Statement::AbstractCall {
        name: name.to_string(),
        method_form: true,
        args: args
            .into_iter()
            .map(|value| CallArg { name: None, value })
            .collect(),
    })
}

fn entity(name: &str) -> ArgValue {
    ArgValue::EntityRef(name.to_string())
}

fn dq(value: &str) -> Literal {
    Literal::double(value)
}

fn sq(value: &str) -> Literal {
    Literal::single(value)
}

fn print_path(entity: &str, attribute: &str) -> Stmt {
    stmt(Statement::Print(PrintExpr::Path {
        entity: entity.to_string(),
        attribute: attribute.to_string(),
    }))
}

fn sentence_group(key: &str, statements: Vec<Stmt>) -> Group {
    Group {
        key: GroupKey::Sentence(key.to_string()),
        statements,
    }
}

fn slug_group(key: &str, statements: Vec<Stmt>) -> Group {
    Group {
        key: GroupKey::Slug(key.to_string()),
        statements,
    }
}

// ─── bAbI Task 2 ─────────────────────────────────────────────────

const BABI_SENTENCES: [&str; 6] = [
    "Mary moved to the bathroom.",
    "Sandra journeyed to the bedroom.",
    "Mary got the football there.",
    "John went to the kitchen.",
    "Mary went back to the kitchen.",
    "Mary went back to the garden.",
];

pub fn babi_case() -> StoryCase {
    StoryCase {
        sentences: BABI_SENTENCES.iter().map(|s| s.to_string()).collect(),
        entities: vec![
            ("character".to_string(), "Mary".to_string()),
            ("character".to_string(), "Sandra".to_string()),
            ("character".to_string(), "John".to_string()),
            ("object".to_string(), "football".to_string()),
        ],
        query: Some("Where is the football?".to_string()),
        gold_answer: Some("garden".to_string()),
    }
}

fn babi_comment_statements() -> Vec<Vec<Stmt>> {
    vec![
        vec![scalar("Mary", "location", dq("bathroom"))],
        vec![scalar("Sandra", "location", dq("bedroom"))],
        vec![
            scalar("football", "carrier", dq("Mary")),
            append("Mary", "inventory", dq("football")),
        ],
        vec![scalar("John", "location", dq("kitchen"))],
        vec![scalar("Mary", "location", dq("kitchen"))],
        vec![scalar("Mary", "location", dq("garden"))],
    ]
}

fn babi_program(groups: Vec<Group>) -> UpdateProgram {
    let mut groups = groups;
    groups.push(sentence_group("Where is the football?", Vec::new()));
    UpdateProgram {
        groups,
        trailing: vec![print_path("football", "location")],
        faults: Vec::new(),
    }
}

fn babi_comment_program() -> UpdateProgram {
    let groups = BABI_SENTENCES
        .iter()
        .zip(babi_comment_statements())
        .map(|(key, statements)| sentence_group(key, statements))
        .collect();
    babi_program(groups)
}

fn babi_specific_program() -> UpdateProgram {
    let slugs = [
        "mary_moved_to_the_bathroom",
        "sandra_journeyed_to_the_bedroom",
        "mary_got_the_football_there",
        "john_went_to_the_kitchen",
        "mary_went_back_to_the_kitchen",
        "mary_went_back_to_the_garden",
    ];
    let groups = slugs
        .iter()
        .zip(babi_comment_statements())
        .map(|(slug, statements)| slug_group(slug, statements))
        .collect();
    babi_program(groups)
}

fn babi_abstract_program() -> UpdateProgram {
    let statements = vec![
        vec![call("go", vec![entity("Mary"), ArgValue::Lit(dq("bathroom"))])],
        vec![call("go", vec![entity("Sandra"), ArgValue::Lit(dq("bedroom"))])],
        vec![call("grab", vec![entity("Mary"), entity("football")])],
        vec![call("go", vec![entity("John"), ArgValue::Lit(dq("kitchen"))])],
        vec![call("go", vec![entity("Mary"), ArgValue::Lit(dq("kitchen"))])],
        vec![call("go", vec![entity("Mary"), ArgValue::Lit(dq("garden"))])],
    ];
    let groups = BABI_SENTENCES
        .iter()
        .zip(statements)
        .map(|(key, stmts)| sentence_group(key, stmts))
        .collect();
    babi_program(groups)
}

// ─── Re3 character tracking ──────────────────────────────────────

const RE3_SENTENCES: [&str; 10] = [
    "The story is set in the present day and takes place in the United States.",
    "Joan Westfall is a woman who has died in a car accident. She is a kind and sympathetic person who is eager to help the people she left behind.",
    "Brent Westfall is Joan's husband. He is a kind and loving man who is struggling to cope with his wife's death.",
    "Jason Westfall is Joan's son. He is a young boy who is struggling to understand his mother's death.",
    "Jason Westfall sits on the floor, looking at the empty box that used to hold his sister-in-law's belongings.",
    "His gaze is unfocused. his dark blue eyes brimming with tears.",
    "He cries for hours, eventually falling asleep from exhaustion.",
    "When he wakes up, he feels dazed and ill.",
    "Joan died in a car accident on a rainy day several weeks ago.",
    "Jason has been carrying on with life ever since as best he can manage, but he still doesn't really know how to cope with Joan's death.",
];

/// The Specific Functions exemplar keeps its own, finer segmentation: the
/// compound sentences split at their natural seams so each slug stays
/// readable.
const RE3_SPECIFIC_SENTENCES: [&str; 12] = [
    "The story is set in the present day and takes place in the United States.",
    "Joan Westfall is a woman who has died in a car accident.",
    "She is a kind and sympathetic person who is eager to help the people she left behind.",
    "Brent Westfall is Joan's husband. He is a kind and loving man who is struggling to cope with his wife's death.",
    "Jason Westfall is Joan's son. He is a young boy who is struggling to understand his mother's death.",
    "Jason Westfall sits on the floor, looking at the empty box that used to hold his sister-in-law's belongings.",
    "His gaze is unfocused. his dark blue eyes brimming with tears.",
    "He cries for hours, eventually falling asleep from exhaustion.",
    "When he wakes up, he feels dazed and ill.",
    "Joan died in a car accident on a rainy day several weeks ago.",
    "Jason has been carrying on with life ever since as best he can manage",
    "but he still doesn't really know how to cope with Joan's death.",
];

fn re3_entities() -> Vec<(String, String)> {
    ["Joan_Westfall", "Jason_Westfall", "Brent_Westfall"]
        .iter()
        .map(|n| ("character".to_string(), n.to_string()))
        .collect()
}

pub fn re3_case() -> StoryCase {
    StoryCase {
        sentences: RE3_SENTENCES.iter().map(|s| s.to_string()).collect(),
        entities: re3_entities(),
        query: None,
        gold_answer: None,
    }
}

pub fn re3_specific_case() -> StoryCase {
    StoryCase {
        sentences: RE3_SPECIFIC_SENTENCES.iter().map(|s| s.to_string()).collect(),
        entities: re3_entities(),
        query: None,
        gold_answer: None,
    }
}

fn re3_comment_program() -> UpdateProgram {
    let statements = vec![
        Vec::new(),
        vec![append("Joan_Westfall", "gender", sq("female"))],
        vec![
            bind("Joan_Westfall", "relations", sq("husband"), sq("Brent_Westfall")),
            bind("Brent_Westfall", "relations", sq("wife"), sq("Joan_Westfall")),
            append("Brent_Westfall", "gender", sq("male")),
        ],
        vec![
            bind("Joan_Westfall", "relations", sq("son"), sq("Jason_Westfall")),
            bind("Jason_Westfall", "relations", sq("mother"), sq("Joan_Westfall")),
            append("Jason_Westfall", "age", sq("young")),
            append("Jason_Westfall", "gender", sq("male")),
        ],
        vec![bind(
            "Jason_Westfall",
            "relations",
            sq("sister_in_laws"),
            sq("Joan_Westfall"),
        )],
        vec![append("Jason_Westfall", "appearance", dq("dark blue eyes"))],
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
    ];
    UpdateProgram {
        groups: RE3_SENTENCES
            .iter()
            .zip(statements)
            .map(|(key, stmts)| sentence_group(key, stmts))
            .collect(),
        trailing: Vec::new(),
        faults: Vec::new(),
    }
}

fn re3_abstract_program() -> UpdateProgram {
    let statements = vec![
        Vec::new(),
        vec![call(
            "set_gender",
            vec![entity("Joan_Westfall"), ArgValue::Lit(dq("female"))],
        )],
        vec![
            call(
                "set_relation",
                vec![entity("Joan_Westfall"), ArgValue::Lit(sq("husband")), entity("Brent_Westfall")],
            ),
            call(
                "set_relation",
                vec![entity("Brent_Westfall"), ArgValue::Lit(sq("wife")), entity("Joan_Westfall")],
            ),
            call(
                "set_gender",
                vec![entity("Brent_Westfall"), ArgValue::Lit(dq("male"))],
            ),
        ],
        vec![
            call(
                "set_relation",
                vec![entity("Joan_Westfall"), ArgValue::Lit(sq("son")), entity("Jason_Westfall")],
            ),
            call(
                "set_relation",
                vec![entity("Jason_Westfall"), ArgValue::Lit(sq("mother")), entity("Joan_Westfall")],
            ),
            call(
                "set_age",
                vec![entity("Jason_Westfall"), ArgValue::Lit(dq("young"))],
            ),
            call(
                "set_gender",
                vec![entity("Jason_Westfall"), ArgValue::Lit(dq("male"))],
            ),
        ],
        vec![
            call(
                "set_relation",
                vec![entity("Jason_Westfall"), ArgValue::Lit(sq("sister_in_laws")), entity("Joan_Westfall")],
            ),
            call(
                "set_relation",
                vec![entity("Joan_Westfall"), ArgValue::Lit(sq("brother_in_laws")), entity("Jason_Westfall")],
            ),
        ],
        vec![call(
            "set_appearance",
            vec![entity("Jason_Westfall"), ArgValue::Lit(dq("dark blue eyes"))],
        )],
        Vec::new(),
        Vec::new(),
        Vec::new(),
        Vec::new(),
    ];
    UpdateProgram {
        groups: RE3_SENTENCES
            .iter()
            .zip(statements)
            .map(|(key, stmts)| sentence_group(key, stmts))
            .collect(),
        trailing: Vec::new(),
        faults: Vec::new(),
    }
}

fn re3_specific_program() -> UpdateProgram {
    let pass = || vec![stmt(Statement::Pass)];
    let statements = vec![
        pass(),
        pass(),
        vec![append("Joan_Westfall", "gender", sq("female"))],
        vec![
            bind("Joan_Westfall", "relations", sq("husband"), sq("Brent_Westfall")),
            bind("Brent_Westfall", "relations", sq("wife"), sq("Joan_Westfall")),
            append("Brent_Westfall", "gender", sq("male")),
        ],
        vec![
            bind("Joan_Westfall", "relations", sq("son"), sq("Jason_Westfall")),
            bind("Jason_Westfall", "relations", sq("mother"), sq("Joan_Westfall")),
            append("Jason_Westfall", "age", sq("young")),
            append("Jason_Westfall", "gender", sq("male")),
        ],
        vec![bind(
            "Jason_Westfall",
            "relations",
            sq("sister_in_laws"),
            sq("Joan_Westfall"),
        )],
        vec![append("Jason_Westfall", "appearance", dq("dark blue eyes"))],
        pass(),
        pass(),
        pass(),
        pass(),
        pass(),
    ];
    let groups = RE3_SPECIFIC_SENTENCES
        .iter()
        .zip(statements)
        .map(|(sentence, stmts)| {
            let slug = super::slugify(sentence).expect("exemplar sentences are sluggable");
            slug_group(&slug, stmts)
        })
        .collect();
    UpdateProgram {
        groups,
        trailing: Vec::new(),
        faults: Vec::new(),
    }
}

/// The structured worked example for a task and style, when one ships.
pub fn builtin(preset: PresetId, style: PromptStyle) -> Option<Exemplar> {
    match (preset, style) {
        (PresetId::BabiTask2, PromptStyle::CommentOnly) => Some(Exemplar {
            case: babi_case(),
            program: babi_comment_program(),
        }),
        (PresetId::BabiTask2, PromptStyle::SpecificFunctions) => Some(Exemplar {
            case: babi_case(),
            program: babi_specific_program(),
        }),
        (PresetId::BabiTask2, PromptStyle::AbstractFunctions) => Some(Exemplar {
            case: babi_case(),
            program: babi_abstract_program(),
        }),
        (PresetId::BabiTask2, PromptStyle::NaturalLanguage) => Some(Exemplar {
            case: babi_case(),
            program: UpdateProgram::default(),
        }),
        (PresetId::Re3Character, PromptStyle::CommentOnly) => Some(Exemplar {
            case: re3_case(),
            program: re3_comment_program(),
        }),
        (PresetId::Re3Character, PromptStyle::SpecificFunctions) => Some(Exemplar {
            case: re3_specific_case(),
            program: re3_specific_program(),
        }),
        (PresetId::Re3Character, PromptStyle::AbstractFunctions) => Some(Exemplar {
            case: re3_case(),
            program: re3_abstract_program(),
        }),
        (PresetId::Re3Character, PromptStyle::NaturalLanguage) => None,
    }
}

/// The shipped exemplar bytes for a task and style.
pub fn builtin_text(preset: PresetId, style: PromptStyle) -> Option<&'static str> {
    match (preset, style) {
        (PresetId::BabiTask2, PromptStyle::CommentOnly) => Some(include_str!(
            "../../../../assets/prompts/babi/comment_only/exemplar.txt"
        )),
        (PresetId::BabiTask2, PromptStyle::SpecificFunctions) => Some(include_str!(
            "../../../../assets/prompts/babi/specific_functions/exemplar.txt"
        )),
        (PresetId::BabiTask2, PromptStyle::AbstractFunctions) => Some(include_str!(
            "../../../../assets/prompts/babi/abstract_functions/exemplar.txt"
        )),
        (PresetId::BabiTask2, PromptStyle::NaturalLanguage) => Some(include_str!(
            "../../../../assets/prompts/babi/natural_language/exemplar.txt"
        )),
        (PresetId::Re3Character, PromptStyle::CommentOnly) => Some(include_str!(
            "../../../../assets/prompts/re3/comment_only/exemplar.txt"
        )),
        (PresetId::Re3Character, PromptStyle::SpecificFunctions) => Some(include_str!(
            "../../../../assets/prompts/re3/specific_functions/exemplar.txt"
        )),
        (PresetId::Re3Character, PromptStyle::AbstractFunctions) => Some(include_str!(
            "../../../../assets/prompts/re3/abstract_functions/exemplar.txt"
        )),
        (PresetId::Re3Character, PromptStyle::NaturalLanguage) => None,
    }
}
