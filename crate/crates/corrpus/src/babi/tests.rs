use super::*;
use crate::dsl::{evaluate, extract_answer, AbstractFunctionTable, Answer};
use crate::prompt::exemplar::builtin_text;
use crate::world::PresetId;

const TWO_STORIES: &str = "\
1 Mary moved to the bathroom.
2 Mary got the football there.
3 Where is the football?\tbathroom\t2 1
1 John went to the hallway.
2 John took the milk.
3 John journeyed to the office.
4 Where is the milk?\toffice\t2 3
";

#[test]
fn parses_two_stories_into_two_samples() {
    let samples = parse_babi_text(TWO_STORIES).unwrap();
    assert_eq!(samples.len(), 2);
    assert_eq!(samples[0].story.len(), 2);
    assert_eq!(samples[1].story.len(), 3);
}

#[test]
fn question_lines_capture_answer_and_supports() {
    let samples = parse_babi_text(TWO_STORIES).unwrap();
    assert_eq!(samples[0].question, "Where is the football?");
    assert_eq!(samples[0].answer, "bathroom");
    assert_eq!(samples[0].supporting, vec![2, 1]);
}

#[test]
fn multi_question_stories_accumulate_statements() {
    let text = "\
1 Mary moved to the garden.
2 Mary grabbed the apple.
3 Where is the apple?\tgarden\t2 1
4 Mary went back to the kitchen.
5 Where is the apple?\tkitchen\t2 4
";
    let samples = parse_babi_text(text).unwrap();
    assert_eq!(samples.len(), 2);
    assert_eq!(samples[0].story.len(), 2);
    assert_eq!(samples[1].story.len(), 3);
    assert_eq!(samples[1].answer, "kitchen");
}

#[test]
fn non_monotone_ids_are_rejected() {
    let err = parse_babi_text("1 Mary moved to the garden.\n3 Mary went back to the kitchen.\n2 Where is the apple?\tgarden\t1\n")
        .unwrap_err();
    assert!(matches!(err, DatasetError::NonMonotoneId { line: 3, .. }));
    let err = parse_babi_text("2 Mary moved to the garden.\n").unwrap_err();
    assert!(matches!(err, DatasetError::Malformed { .. }));
}

#[test]
fn lexicon_covers_all_verb_forms() {
    let lexicon = ActionLexicon::default();
    let cases = [
        (
            "Mary moved to the bathroom.",
            ParsedAction::Move {
                actor: "Mary".into(),
                room: "bathroom".into(),
            },
        ),
        (
            "Sandra went back to the kitchen.",
            ParsedAction::Move {
                actor: "Sandra".into(),
                room: "kitchen".into(),
            },
        ),
        (
            "Daniel picked up the milk there.",
            ParsedAction::Take {
                actor: "Daniel".into(),
                object: "milk".into(),
            },
        ),
        (
            "John put down the apple.",
            ParsedAction::Drop {
                actor: "John".into(),
                object: "apple".into(),
            },
        ),
        (
            "Mary discarded the football.",
            ParsedAction::Drop {
                actor: "Mary".into(),
                object: "football".into(),
            },
        ),
    ];
    for (sentence, expected) in cases {
        assert_eq!(lexicon.parse_sentence(sentence).unwrap(), expected, "{sentence}");
    }
    assert!(lexicon.parse_sentence("Mary pondered existence.").is_err());
}

fn sample_from(lines: &[&str], question: &str, answer: &str) -> BabiSample {
    BabiSample {
        story: lines
            .iter()
            .enumerate()
            .map(|(i, s)| ((i + 1) as u32, s.to_string()))
            .collect(),
        question: question.to_string(),
        answer: answer.to_string(),
        supporting: vec![],
    }
}

#[test]
fn oracle_follows_a_carried_object() {
    let lexicon = ActionLexicon::default();
    let sample = sample_from(
        &[
            "Sandra journeyed to the bedroom.",
            "Sandra took the football.",
        ],
        "Where is the football?",
        "bedroom",
    );
    let solution = oracle_solve(&sample, &lexicon).unwrap();
    assert_eq!(solution.answer, "bedroom");
    assert_eq!(solution.world.step(), 2);
    assert!(solution.world.duality_holds());
}

#[test]
fn oracle_pins_dropped_objects_at_the_drop_site() {
    let lexicon = ActionLexicon::default();
    let sample = sample_from(
        &[
            "Mary moved to the garden.",
            "Mary grabbed the milk.",
            "Mary went back to the office.",
            "Mary dropped the milk.",
            "Mary journeyed to the kitchen.",
        ],
        "Where is the milk?",
        "office",
    );
    let solution = oracle_solve(&sample, &lexicon).unwrap();
    assert_eq!(solution.answer, "office");
    assert_eq!(
        solution.world.query_object_location("milk").unwrap(),
        "office"
    );
}

#[test]
fn oracle_rejects_unknown_sentences_and_objects() {
    let lexicon = ActionLexicon::default();
    let sample = sample_from(
        &["Mary pondered the sea."],
        "Where is the football?",
        "garden",
    );
    assert!(matches!(
        oracle_solve(&sample, &lexicon).unwrap_err(),
        OracleError::Unmatched(_)
    ));

    let sample = sample_from(
        &["Mary moved to the garden."],
        "Where is the football?",
        "garden",
    );
    assert!(matches!(
        oracle_solve(&sample, &lexicon).unwrap_err(),
        OracleError::UnknownQueryObject(_)
    ));
}

#[test]
fn gold_programs_reproduce_the_oracle_state_in_every_style() {
    let lexicon = ActionLexicon::default();
    let sample = sample_from(
        &[
            "Mary moved to the garden.",
            "Mary grabbed the milk.",
            "John went to the hallway.",
            "Mary dropped the milk.",
            "Mary journeyed to the kitchen.",
        ],
        "Where is the milk?",
        "garden",
    );
    let solution = oracle_solve(&sample, &lexicon).unwrap();
    let table = AbstractFunctionTable::babi_task2();
    for style in crate::prompt::PromptStyle::CODE_STYLES {
        let program = solution.gold_program(style);
        let world =
            crate::world::WorldState::init(SchemaPreset::babi_task2(), &solution.entities)
                .unwrap();
        let evaluation = evaluate(&program, world, &table);
        assert!(evaluation.faults.is_empty(), "{style}: {:?}", evaluation.faults);
        assert_eq!(
            evaluation.world.snapshot(),
            solution.world.snapshot(),
            "{style}"
        );
        assert_eq!(
            extract_answer(&evaluation, Some(&sample.question)),
            Answer::Text(solution.answer.clone()),
            "{style}"
        );
    }
}

#[test]
fn synthetic_generation_is_seed_deterministic() {
    let config = SynthConfig::default();
    let a = generate_synthetic(7, 8, config);
    let b = generate_synthetic(7, 8, config);
    assert_eq!(a, b);
    let c = generate_synthetic(8, 8, config);
    assert_ne!(a, c);
}

#[test]
fn synthetic_samples_agree_with_the_oracle() {
    let lexicon = ActionLexicon::default();
    let config = SynthConfig::default();
    for seed in 0..50 {
        let sample = generate_synthetic(seed, 9, config);
        let solution = oracle_solve(&sample, &lexicon).unwrap();
        assert_eq!(solution.answer, sample.answer, "seed {seed}: {sample:?}");
    }
}

#[test]
fn generated_dataset_parses_and_counts_questions() {
    let text = generate_dataset(11, 25, SynthConfig::default());
    let samples = parse_babi_text(&text).unwrap();
    assert_eq!(samples.len(), 25);
}

#[test]
fn oracle_backend_run_is_perfect_on_a_small_set() {
    let lexicon = ActionLexicon::default();
    let text = generate_dataset(3, 12, SynthConfig::default());
    let samples = parse_babi_text(&text).unwrap();
    let exemplar = builtin_text(PresetId::BabiTask2, crate::prompt::PromptStyle::CommentOnly).unwrap();
    let backend = OracleBackend::new(
        &samples,
        crate::prompt::PromptStyle::CommentOnly,
        exemplar,
        &lexicon,
    );
    let config = RunConfig::new(crate::prompt::PromptStyle::CommentOnly);
    let report = run_babi(&samples, &backend, exemplar, &lexicon, &config);
    assert_eq!(report.n, 12);
    assert_eq!(report.accuracy, 1.0, "{}", report.table());
}

#[test]
fn empty_completions_fault_every_case() {
    struct EmptyBackend;
    impl crate::gateway::Completer for EmptyBackend {
        fn complete(
            &self,
            request: &crate::gateway::CompletionRequest,
        ) -> Result<Vec<String>, crate::gateway::GatewayError> {
            Ok(vec![String::new(); request.sample_count as usize])
        }
        fn id(&self) -> &str {
            "empty"
        }
    }
    let lexicon = ActionLexicon::default();
    let text = generate_dataset(5, 6, SynthConfig::default());
    let samples = parse_babi_text(&text).unwrap();
    let exemplar = builtin_text(PresetId::BabiTask2, crate::prompt::PromptStyle::CommentOnly).unwrap();
    let config = RunConfig::new(crate::prompt::PromptStyle::CommentOnly);
    let report = run_babi(&samples, &EmptyBackend, exemplar, &lexicon, &config);
    assert_eq!(report.accuracy, 0.0);
    assert_eq!(report.faults_by_kind["empty_completion"], 6);
}

#[test]
fn accuracy_is_invariant_to_sample_order() {
    let lexicon = ActionLexicon::default();
    let text = generate_dataset(9, 20, SynthConfig::default());
    let samples = parse_babi_text(&text).unwrap();
    let exemplar = builtin_text(PresetId::BabiTask2, crate::prompt::PromptStyle::AbstractFunctions).unwrap();
    let style = crate::prompt::PromptStyle::AbstractFunctions;
    let backend = OracleBackend::new(&samples, style, exemplar, &lexicon);
    let config = RunConfig::new(style);

    let forward = run_babi(&samples, &backend, exemplar, &lexicon, &config);
    let mut shuffled = samples.clone();
    let order = synth::shuffled_indices(samples.len(), 99);
    shuffled = order.iter().map(|&i| shuffled[i].clone()).collect();
    let permuted = run_babi(&shuffled, &backend, exemplar, &lexicon, &config);
    assert_eq!(forward.accuracy, permuted.accuracy);
    assert_eq!(forward.correct, permuted.correct);
}

#[test]
fn sample_limit_truncates_the_run() {
    let lexicon = ActionLexicon::default();
    let text = generate_dataset(2, 15, SynthConfig::default());
    let samples = parse_babi_text(&text).unwrap();
    let exemplar = builtin_text(PresetId::BabiTask2, crate::prompt::PromptStyle::CommentOnly).unwrap();
    let style = crate::prompt::PromptStyle::CommentOnly;
    let backend = OracleBackend::new(&samples, style, exemplar, &lexicon);
    let mut config = RunConfig::new(style);
    config.sample_limit = Some(10);
    let report = run_babi(&samples, &backend, exemplar, &lexicon, &config);
    assert_eq!(report.n, 10);
}
