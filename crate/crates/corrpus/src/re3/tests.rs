use super::*;
use crate::gateway::{EntailmentScore, GatewayError, StaticBackend, TableScorer};
use crate::prompt::exemplar::builtin_text;
use crate::world::PresetId;

fn re3_exemplar() -> &'static str {
    builtin_text(PresetId::Re3Character, PromptStyle::CommentOnly).unwrap()
}

#[test]
fn splits_sentences_conservatively() {
    let text = "Joan Westfall is a woman who has died in a car accident. She is kind.\nHis gaze is unfocused. his dark blue eyes brimming with tears.";
    let sentences = split_sentences(text);
    assert_eq!(
        sentences,
        vec![
            "Joan Westfall is a woman who has died in a car accident.".to_string(),
            "She is kind.".to_string(),
            "His gaze is unfocused. his dark blue eyes brimming with tears.".to_string(),
        ]
    );
}

#[test]
fn roster_finds_header_names_and_recurring_names() {
    let text = "The story is set in the present day.\nJoan Westfall is a woman who has died. Brent Westfall is Joan's husband.\nJason Westfall sits on the floor. Jason Westfall cries for hours.";
    let roster = derive_roster(text);
    let names: Vec<&str> = roster.iter().map(|(_, n)| n.as_str()).collect();
    assert!(names.contains(&"Joan_Westfall"));
    assert!(names.contains(&"Brent_Westfall"));
    assert!(names.contains(&"Jason_Westfall"));
    assert!(!names.iter().any(|n| n.starts_with("The")));
}

#[test]
fn roster_skips_pronoun_headers_and_one_off_bigrams() {
    let text = "She is a kind person. He is tall. Mark Woodbury smiled once here.";
    let roster = derive_roster(text);
    assert!(roster.is_empty(), "{roster:?}");

    let text = "Shannon is a journalist. She walked in.";
    let roster = derive_roster(text);
    assert_eq!(roster, vec![("character".to_string(), "Shannon".to_string())]);
}

/// Build a backend that answers the prompt for `text` with the same
/// completion for all three samples.
fn backend_for(text: &str, completion: &str) -> StaticBackend {
    let mut backend = StaticBackend::new();
    let (_, bundle) = prompt_for_text(text, PromptStyle::CommentOnly, re3_exemplar()).unwrap();
    backend.insert(bundle.request_text(), vec![completion.to_string(); 3]);
    backend
}

#[test]
fn extracts_attributes_from_a_worked_story() {
    let text = "Joan Westfall is a woman who has died in a car accident. Jason Westfall is Joan's son. Jason Westfall sits alone. His gaze is unfocused, his dark blue eyes brimming with tears.";
    let completion = "        ## intro\n        self.Joan_Westfall.gender.append('female')\n        self.Jason_Westfall.age.append('young')\n        self.Jason_Westfall.appearance.append(\"dark blue eyes\")\n";
    let backend = backend_for(text, completion);
    let extraction =
        extract_attributes(text, PromptStyle::CommentOnly, &backend, "m", re3_exemplar());
    let voted = extraction.voted();
    let joan = &voted.characters["Joan_Westfall"];
    assert!(joan[&AttributeKey::List("gender".into())].contains_key("female"));
    let jason = &voted.characters["Jason_Westfall"];
    assert!(jason[&AttributeKey::List("age".into())].contains_key("young"));
    assert!(jason[&AttributeKey::List("appearance".into())].contains_key("dark blue eyes"));
}

#[test]
fn extracts_the_mark_woodbury_sentence() {
    let text = "Mark Woodbury is a manager. Mark Woodbury, a middle-aged man with graying hair and a mustache, smiled at Shannon as she walked into his office.";
    let completion = "        ## intro\n        self.Mark_Woodbury.appearance.append('graying hair')\n        self.Mark_Woodbury.appearance.append('mustache')\n        self.Mark_Woodbury.age.append('middle-aged')\n";
    let backend = backend_for(text, completion);
    let extraction =
        extract_attributes(text, PromptStyle::CommentOnly, &backend, "m", re3_exemplar());
    let voted = extraction.voted();
    let mark = &voted.characters["Mark_Woodbury"];
    let appearance = &mark[&AttributeKey::List("appearance".into())];
    assert!(appearance.contains_key("graying hair"));
    assert!(appearance.contains_key("mustache"));
    assert!(mark[&AttributeKey::List("age".into())].contains_key("middle-aged"));
}

#[test]
fn empty_text_extracts_nothing_without_touching_the_backend() {
    struct PanicBackend;
    impl crate::gateway::Completer for PanicBackend {
        fn complete(
            &self,
            _request: &crate::gateway::CompletionRequest,
        ) -> Result<Vec<String>, GatewayError> {
            panic!("backend must not be called for empty text");
        }
        fn id(&self) -> &str {
            "panic"
        }
    }
    let extraction =
        extract_attributes("  ", PromptStyle::CommentOnly, &PanicBackend, "m", re3_exemplar());
    assert!(extraction.voted().is_empty());
    assert!(extraction.faults.is_empty());
}

#[test]
fn unparseable_generations_leave_an_empty_extraction_with_fault() {
    let text = "Shannon is a journalist. Shannon walked in.";
    let completion = "        self.Shannon.gender.append('female\n"; // unterminated
    let backend = backend_for(text, completion);
    let extraction =
        extract_attributes(text, PromptStyle::CommentOnly, &backend, "m", re3_exemplar());
    assert!(extraction.voted().is_empty());
    assert!(extraction
        .faults
        .iter()
        .any(|f| f.kind == crate::fault::FaultKind::AllSamplesUnparseable));
}

fn extraction_with(values: &[(&str, usize)]) -> AttributeExtraction {
    // values: (value, generation)
    let mut extraction = AttributeExtraction::default();
    for (value, generation) in values {
        extraction.assert_value(
            "Riley_Carter",
            AttributeKey::List("occupation".into()),
            value,
            *generation,
        );
    }
    extraction
}

#[test]
fn vote_keeps_unanimous_and_majority_values() {
    let gens = [
        extraction_with(&[("teacher", 0)]),
        extraction_with(&[("teacher", 1)]),
        extraction_with(&[("teacher", 2)]),
    ];
    let voted = majority_vote(&gens);
    assert!(voted.characters["Riley_Carter"][&AttributeKey::List("occupation".into())]
        .contains_key("teacher"));

    let gens = [
        extraction_with(&[("teacher", 0), ("doctor", 0)]),
        extraction_with(&[("teacher", 1)]),
        extraction_with(&[]),
    ];
    let voted = majority_vote(&gens);
    let values = &voted.characters["Riley_Carter"][&AttributeKey::List("occupation".into())];
    assert!(values.contains_key("teacher"));
    assert!(!values.contains_key("doctor"));
}

#[test]
fn vote_drops_minority_values() {
    let gens = [
        extraction_with(&[("doctor", 0)]),
        extraction_with(&[]),
        extraction_with(&[]),
    ];
    let voted = majority_vote(&gens);
    assert!(voted.is_empty());
}

#[test]
fn vote_normalizes_before_counting() {
    let gens = [
        extraction_with(&[("Graying  Hair", 0)]),
        extraction_with(&[("graying hair", 1)]),
        extraction_with(&[]),
    ];
    let voted = majority_vote(&gens);
    let values = &voted.characters["Riley_Carter"][&AttributeKey::List("occupation".into())];
    assert!(values.contains_key("graying hair"));
}

#[test]
fn vote_is_permutation_invariant() {
    let a = extraction_with(&[("teacher", 0), ("doctor", 0)]);
    let b = extraction_with(&[("teacher", 1)]);
    let c = extraction_with(&[("doctor", 2)]);
    let voted = majority_vote(&[a.clone(), b.clone(), c.clone()]);
    for permutation in [
        [&a, &c, &b],
        [&b, &a, &c],
        [&b, &c, &a],
        [&c, &a, &b],
        [&c, &b, &a],
    ] {
        let gens: Vec<AttributeExtraction> = permutation.into_iter().cloned().collect();
        assert_eq!(majority_vote(&gens), voted);
    }
}

#[test]
fn attribute_sentences_follow_the_templates() {
    assert_eq!(
        attribute_sentence("Shannon", &AttributeKey::List("appearance".into()), "red hair")
            .unwrap(),
        "Shannon's appearance is red hair."
    );
    assert_eq!(
        attribute_sentence(
            "Joan_Westfall",
            &AttributeKey::Relation("husband".into()),
            "Brent_Westfall"
        )
        .unwrap(),
        "Joan Westfall's husband is Brent Westfall."
    );
    assert!(matches!(
        attribute_sentence("X", &AttributeKey::List("mood".into()), "happy"),
        Err(Re3Error::UnknownKey(_))
    ));
    assert!(matches!(
        attribute_sentence("X", &AttributeKey::List("age".into()), "  "),
        Err(Re3Error::EmptyValue(_))
    ));
}

fn single_value(character: &str, key: AttributeKey, value: &str) -> AttributeExtraction {
    let mut extraction = AttributeExtraction::default();
    extraction.assert_value(character, key, value, 0);
    extraction
}

#[test]
fn detect_scores_shared_keys_and_takes_the_max() {
    let premise = single_value("A_B", AttributeKey::List("appearance".into()), "tall");
    let story = single_value("A_B", AttributeKey::List("appearance".into()), "short");
    let mut scorer = TableScorer::new(EntailmentScore {
        entailment: 0.5,
        neutral: 0.4,
        contradiction: 0.1,
    });
    scorer.insert(
        "A B's appearance is tall.",
        "A B's appearance is short.",
        EntailmentScore {
            entailment: 0.0,
            neutral: 0.0,
            contradiction: 1.0,
        },
    );
    let verdict = detect("t:P-S", &premise, &story, &scorer);
    assert_eq!(verdict.score, 1.0);
    assert_eq!(verdict.evidence.len(), 1);
    assert!(!verdict.faulted);
}

#[test]
fn detect_gives_zero_on_disjoint_keys() {
    let premise = single_value("A_B", AttributeKey::List("age".into()), "young");
    let story = single_value("A_B", AttributeKey::List("gender".into()), "male");
    let scorer = TableScorer::constant(EntailmentScore {
        entailment: 0.0,
        neutral: 0.0,
        contradiction: 1.0,
    });
    let verdict = detect("t", &premise, &story, &scorer);
    assert_eq!(verdict.score, 0.0);
    assert!(verdict.evidence.is_empty());
}

#[test]
fn detect_max_rule_over_evidence() {
    let premise = single_value("A_B", AttributeKey::List("age".into()), "young");
    let mut story = single_value("A_B", AttributeKey::List("age".into()), "old");
    story.assert_value("A_B", AttributeKey::List("age".into()), "ancient", 0);
    let mut scorer = TableScorer::new(EntailmentScore {
        entailment: 0.6,
        neutral: 0.3,
        contradiction: 0.1,
    });
    scorer.insert(
        "A B's age is young.",
        "A B's age is old.",
        EntailmentScore {
            entailment: 0.4,
            neutral: 0.3,
            contradiction: 0.3,
        },
    );
    scorer.insert(
        "A B's age is young.",
        "A B's age is ancient.",
        EntailmentScore {
            entailment: 0.1,
            neutral: 0.1,
            contradiction: 0.8,
        },
    );
    let verdict = detect("t", &premise, &story, &scorer);
    assert!((verdict.score - 0.8).abs() < 1e-12);
    assert_eq!(verdict.evidence.len(), 2);
}

#[test]
fn detect_marks_scorer_failures_as_faulted() {
    struct FailingScorer;
    impl crate::gateway::EntailmentScorer for FailingScorer {
        fn score(&self, _p: &str, _h: &str) -> Result<EntailmentScore, GatewayError> {
            Err(GatewayError::Transport("down".into()))
        }
    }
    let premise = single_value("A_B", AttributeKey::List("age".into()), "young");
    let story = single_value("A_B", AttributeKey::List("age".into()), "old");
    let verdict = detect("t", &premise, &story, &FailingScorer);
    assert!(verdict.faulted);
}

#[test]
fn premise_against_itself_shares_identical_value_sets() {
    let text = "Riley Carter is a teacher. Riley Carter lives at the edge of town.";
    let completion = "        ## intro\n        self.Riley_Carter.occupation.append('teacher')\n";
    let backend = backend_for(text, completion);
    let extraction =
        extract_attributes(text, PromptStyle::CommentOnly, &backend, "m", re3_exemplar());
    let voted = extraction.voted();
    let scorer = TableScorer::constant(EntailmentScore {
        entailment: 0.9,
        neutral: 0.05,
        contradiction: 0.05,
    });
    let verdict = detect("self", &voted, &voted, &scorer);
    for row in &verdict.evidence {
        assert_eq!(row.premise_value, row.story_value);
    }
    assert!(!verdict.evidence.is_empty());
}

#[test]
fn run_re3_end_to_end_with_injected_contradictions() {
    let tuples = synthetic_tuples(4, 5);
    let exemplar = re3_exemplar();
    let backend = scripted_backend(&tuples, exemplar);
    let scorer = synthetic_scorer(&tuples);
    let config = Re3RunConfig::new(PromptStyle::CommentOnly);
    let report = run_re3(&tuples, &backend, &scorer, exemplar, &config);
    assert_eq!(report.n_pairs, 16);
    assert_eq!(report.n_faulted, 0);
    assert_eq!(report.auc, Some(1.0), "{}", report.table());
}

#[test]
fn constant_scores_give_auc_half() {
    let tuples = synthetic_tuples(4, 6);
    let exemplar = re3_exemplar();
    let backend = scripted_backend(&tuples, exemplar);
    let scorer = TableScorer::constant(EntailmentScore {
        entailment: 0.5,
        neutral: 0.3,
        contradiction: 0.2,
    });
    let config = Re3RunConfig::new(PromptStyle::CommentOnly);
    let report = run_re3(&tuples, &backend, &scorer, exemplar, &config);
    assert_eq!(report.auc, Some(0.5));
}

#[test]
fn load_tuples_validates_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tuples.json");
    std::fs::write(
        &path,
        r#"[{"id":"t1","premise":"A.","alt_premise":"B.","story":"C.","alt_story":""}]"#,
    )
    .unwrap();
    assert!(matches!(
        load_tuples(&path).unwrap_err(),
        Re3Error::EmptyField { .. }
    ));
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    proptest! {
        /// Monotonicity: adding evidence can only raise the max score.
        #[test]
        fn verdict_score_is_monotone_in_evidence(
            contradictions in proptest::collection::vec(0.0f64..=1.0, 1..8)
        ) {
            let mut premise = AttributeExtraction::default();
            premise.assert_value("A_B", AttributeKey::List("age".into()), "young", 0);
            let mut running = f64::NEG_INFINITY;
            let mut story = AttributeExtraction::default();
            let mut scorer = TableScorer::new(EntailmentScore {
                entailment: 1.0, neutral: 0.0, contradiction: 0.0,
            });
            let mut previous = 0.0f64;
            for (i, c) in contradictions.iter().enumerate() {
                let value = format!("value{i}");
                story.assert_value("A_B", AttributeKey::List("age".into()), &value, 0);
                scorer.insert(
                    "A B's age is young.",
                    format!("A B's age is {value}."),
                    EntailmentScore { entailment: 1.0 - c, neutral: 0.0, contradiction: *c },
                );
                let verdict = detect("t", &premise, &story, &scorer);
                prop_assert!(verdict.score + 1e-12 >= previous);
                previous = verdict.score;
                running = running.max(*c);
            }
            prop_assert!((previous - running.max(0.0)).abs() < 1e-9);
        }
    }
}
