//! Synthetic detection tuples with known-good extractions and injected
//! contradictions, plus the scripted backend and lookup scorer that drive
//! them end to end without any model.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{attribute_sentence, prompt_for_text, AttributeKey, Re3Tuple};
use crate::dsl::{Group, GroupKey, Literal, Statement, Stmt, UpdateProgram};
use crate::gateway::{EntailmentScore, StaticBackend, TableScorer};
use crate::prompt::PromptStyle;

const NAMES: [&str; 10] = [
    "Riley Carter",
    "Avery Brooks",
    "Jordan Hale",
    "Morgan Ellis",
    "Casey Winters",
    "Rowan Pierce",
    "Quinn Masters",
    "Harper Vance",
    "Emerson Cole",
    "Sawyer North",
];

const OCCUPATIONS_A: [&str; 10] = [
    "teacher", "painter", "carpenter", "nurse", "pilot", "gardener", "baker", "librarian",
    "fisherman", "tailor",
];

const OCCUPATIONS_B: [&str; 10] = [
    "doctor", "lawyer", "sailor", "chef", "farmer", "singer", "banker", "soldier", "jeweler",
    "clerk",
];

/// Texts for one tuple: the premise asserts occupation `a`, the alternative
/// premise occupation `b`, and each story restates its own premise's value.
fn tuple_texts(name: &str, a: &str, b: &str) -> (String, String, String, String) {
    let premise = format!("{name} is a {a}. {name} lives at the edge of town.");
    let alt_premise = format!("{name} is a {b}. {name} lives at the edge of town.");
    let story = format!(
        "{name} walked home at dusk. Everyone knew {name} worked as a {a} in the village."
    );
    let alt_story = format!(
        "{name} walked home at dusk. Everyone knew {name} worked as a {b} in the village."
    );
    (premise, alt_premise, story, alt_story)
}

/// `n` deterministic tuples (at most ten distinct value pairs).
pub fn synthetic_tuples(n: usize, seed: u64) -> Vec<Re3Tuple> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..NAMES.len()).collect();
    order.shuffle(&mut rng);
    (0..n.min(NAMES.len()))
        .map(|i| {
            let slot = order[i];
            let (premise, alt_premise, story, alt_story) =
                tuple_texts(NAMES[slot], OCCUPATIONS_A[slot], OCCUPATIONS_B[slot]);
            Re3Tuple {
                id: format!("synth-{i}"),
                premise,
                alt_premise,
                story,
                alt_story,
            }
        })
        .collect()
}

fn occupation_program(character_ident: &str, value: &str, sentences: &[String]) -> UpdateProgram {
    let assertion = Stmt::new(
        Statement::ListAppend {
            entity: character_ident.to_string(),
            attribute: "occupation".to_string(),
            value: Literal::single(value),
        },
        0,
    );
    let groups = sentences
        .iter()
        .enumerate()
        .map(|(i, sentence)| Group {
            key: GroupKey::Sentence(sentence.clone()),
            statements: if i == 0 { vec![assertion.clone()] } else { Vec::new() },
        })
        .collect();
    UpdateProgram {
        groups,
        trailing: Vec::new(),
        faults: Vec::new(),
    }
}

fn value_of(text: &str) -> &'static str {
    for value in OCCUPATIONS_A.iter().chain(OCCUPATIONS_B.iter()) {
        if text.contains(value) {
            return value;
        }
    }
    unreachable!("synthetic texts always carry a known occupation")
}

fn name_of(text: &str) -> &'static str {
    for name in NAMES.iter() {
        if text.contains(name) {
            return name;
        }
    }
    unreachable!("synthetic texts always carry a known name")
}

/// A completion backend scripted with the gold extraction for every text in
/// the tuples, keyed by the exact rendered prompt. Comment style only.
pub fn scripted_backend(tuples: &[Re3Tuple], exemplar_text: &str) -> StaticBackend {
    let mut backend = StaticBackend::new();
    for tuple in tuples {
        for text in [
            &tuple.premise,
            &tuple.alt_premise,
            &tuple.story,
            &tuple.alt_story,
        ] {
            let (case, bundle) = prompt_for_text(text, PromptStyle::CommentOnly, exemplar_text)
                .expect("synthetic texts always render");
            let ident = name_of(text).replace(' ', "_");
            let program = occupation_program(&ident, value_of(text), &case.sentences);
            let mut completion =
                crate::dsl::pretty::render_comment_body(&program, "        ");
            completion.push('\n');
            backend.insert(bundle.request_text(), vec![completion; 3]);
        }
    }
    backend
}

/// A lookup scorer that flags exactly the injected (a, b) occupation
/// mismatches as contradictions; everything else scores low.
pub fn synthetic_scorer(tuples: &[Re3Tuple]) -> TableScorer {
    let mut scorer = TableScorer::new(EntailmentScore {
        entailment: 0.6,
        neutral: 0.3,
        contradiction: 0.1,
    });
    let contradiction = EntailmentScore {
        entailment: 0.0,
        neutral: 0.0,
        contradiction: 1.0,
    };
    for tuple in tuples {
        let name = name_of(&tuple.premise);
        let ident = name.replace(' ', "_");
        let a = value_of(&tuple.premise);
        let b = value_of(&tuple.alt_premise);
        let key = AttributeKey::List("occupation".to_string());
        let sentence_a = attribute_sentence(&ident, &key, a).expect("known key");
        let sentence_b = attribute_sentence(&ident, &key, b).expect("known key");
        scorer.insert(sentence_a.clone(), sentence_b.clone(), contradiction);
        scorer.insert(sentence_b, sentence_a, contradiction);
    }
    scorer
}
