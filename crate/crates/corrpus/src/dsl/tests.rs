use super::*;
use crate::fault::FaultKind;
use crate::prompt::PromptStyle;
use crate::world::{SchemaPreset, WorldState};

fn babi_world(entities: &[(&str, &str)]) -> WorldState {
    let declarations: Vec<(String, String)> = entities
        .iter()
        .map(|(k, n)| (k.to_string(), n.to_string()))
        .collect();
    WorldState::init(SchemaPreset::babi_task2(), &declarations).unwrap()
}

fn parse_comment(source: &str) -> UpdateProgram {
    parse_program(
        source,
        PromptStyle::CommentOnly,
        &SchemaPreset::babi_task2(),
    )
    .unwrap()
}

#[test]
fn parses_comment_group_with_assignment() {
    let program = parse_comment(
        "## Sandra journeyed to the bedroom.\nself.Sandra.location = \"bedroom\"\n",
    );
    assert_eq!(program.groups.len(), 1);
    assert_eq!(
        program.groups[0].key,
        GroupKey::Sentence("Sandra journeyed to the bedroom.".to_string())
    );
    assert_eq!(
        program.groups[0].statements,
        vec![Stmt::new(
            Statement::ScalarAssign {
                entity: "Sandra".to_string(),
                attribute: "location".to_string(),
                value: Literal::double("bedroom"),
            },
            0
        )]
    );
    assert!(program.faults.is_empty());
}

#[test]
fn parses_pass_inside_function_body() {
    let source = "        self.nothing_happens()\n\n    def nothing_happens(self):\n        pass\n";
    let program = parse_program(
        source,
        PromptStyle::SpecificFunctions,
        &SchemaPreset::re3_character(),
    )
    .unwrap();
    assert_eq!(program.groups.len(), 1);
    assert_eq!(
        program.groups[0].key,
        GroupKey::Slug("nothing_happens".to_string())
    );
    assert_eq!(
        program.groups[0].statements,
        vec![Stmt::new(Statement::Pass, 0)]
    );
}

#[test]
fn empty_source_gives_empty_program() {
    let program = parse_comment("");
    assert!(program.is_empty());
    assert!(program.groups.is_empty());
    assert!(program.faults.is_empty());
}

#[test]
fn unterminated_string_is_fatal() {
    let err = parse_program(
        "self.Sandra.location = \"bedroom\n",
        PromptStyle::CommentOnly,
        &SchemaPreset::babi_task2(),
    )
    .unwrap_err();
    assert_eq!(err, ParseError::UnterminatedString { line: 1 });
}

#[test]
fn unknown_lines_become_faults_not_drops() {
    let program = parse_comment("## A sentence.\nimport os\nself.Mary.location = \"garden\"\n");
    assert_eq!(program.groups[0].statements.len(), 1);
    assert_eq!(program.faults.len(), 1);
    assert_eq!(program.faults[0].kind, FaultKind::UnparsedLine);
    assert_eq!(program.faults[0].line, Some(2));
}

#[test]
fn statement_lines_are_recorded() {
    let program = parse_comment("## One.\nself.Mary.location = \"garden\"\npass\n");
    assert_eq!(program.groups[0].statements[0].line, 2);
    assert_eq!(program.groups[0].statements[1].line, 3);
}

#[test]
fn map_assignment_and_bare_keyword_call_forms() {
    let preset = SchemaPreset::re3_character();
    let program = parse_program(
        "self.Joan_Westfall.relations['husband'] = 'Brent_Westfall'\nset_gender(character=Joan_Westfall, gender=female)\n",
        PromptStyle::AbstractFunctions,
        &preset,
    )
    .unwrap();
    let stmts = &program.groups[0].statements;
    assert_eq!(
        stmts[0].statement,
        Statement::MapAssign {
            entity: "Joan_Westfall".to_string(),
            attribute: "relations".to_string(),
            key: Literal::single("husband"),
            value: Literal::single("Brent_Westfall"),
        }
    );
    assert_eq!(
        stmts[1].statement,
        Statement::AbstractCall {
            name: "set_gender".to_string(),
            method_form: false,
            args: vec![
                CallArg {
                    name: Some("character".to_string()),
                    value: ArgValue::Lit(Literal::Ident("Joan_Westfall".to_string())),
                },
                CallArg {
                    name: Some("gender".to_string()),
                    value: ArgValue::Lit(Literal::Ident("female".to_string())),
                },
            ],
        }
    );
}

#[test]
fn evaluates_comment_program_on_fresh_world() {
    let program = parse_comment("## Sandra journeyed to the bedroom.\nself.Sandra.location = \"bedroom\"\n");
    let world = babi_world(&[("character", "Sandra")]);
    let evaluation = evaluate(&program, world, &AbstractFunctionTable::babi_task2());
    assert!(evaluation.faults.is_empty());
    assert_eq!(
        evaluation.world.entity("Sandra").unwrap().scalar("location"),
        Some("bedroom")
    );
    assert_eq!(evaluation.world.step(), 1);
}

#[test]
fn pass_only_program_changes_nothing_but_steps() {
    let program = parse_comment("## One.\npass\n## Two.\npass\n");
    let world = babi_world(&[("character", "Sandra")]);
    let before = world.snapshot();
    let evaluation = evaluate(&program, world, &AbstractFunctionTable::babi_task2());
    assert_eq!(evaluation.world.snapshot(), before);
    assert_eq!(evaluation.world.step(), 2);
    assert!(evaluation.faults.is_empty());
}

#[test]
fn abstract_call_equals_direct_assignment() {
    let table = AbstractFunctionTable::babi_task2();
    let call_form = parse_program(
        "## Sandra journeyed to the bedroom.\ngo(character=Sandra, destination=bedroom)\n",
        PromptStyle::AbstractFunctions,
        &SchemaPreset::babi_task2(),
    )
    .unwrap();
    let direct_form =
        parse_comment("## Sandra journeyed to the bedroom.\nself.Sandra.location = \"bedroom\"\n");

    let a = evaluate(&call_form, babi_world(&[("character", "Sandra")]), &table);
    let b = evaluate(&direct_form, babi_world(&[("character", "Sandra")]), &table);
    assert!(a.faults.is_empty());
    assert_eq!(a.world.snapshot(), b.world.snapshot());
}

#[test]
fn grab_and_drop_recipes_match_their_expansions() {
    let table = AbstractFunctionTable::babi_task2();
    let entities: [(&str, &str); 2] = [("character", "Mary"), ("object", "football")];
    let setup = "## Mary moved to the garden.\nself.Mary.location = \"garden\"\n";

    let call_form = parse_comment(&format!(
        "{setup}## Mary got the football.\nself.grab(self.Mary, self.football)\n## Mary dropped the football.\nself.drop(self.Mary, self.football)\n"
    ));
    let expanded = parse_comment(&format!(
        "{setup}## Mary got the football.\nself.football.carrier = \"Mary\"\n## Mary dropped the football.\nself.football.carrier = None\nself.football.location = \"garden\"\n"
    ));
    let a = evaluate(&call_form, babi_world(&entities), &table);
    let b = evaluate(&expanded, babi_world(&entities), &table);
    assert!(a.faults.is_empty(), "{:?}", a.faults);
    assert!(b.faults.is_empty(), "{:?}", b.faults);
    assert_eq!(a.world.snapshot(), b.world.snapshot());
    assert!(a.world.duality_holds());
}

#[test]
fn faulted_statements_are_skipped_and_isolated() {
    let with_fault = parse_comment(
        "## One.\nself.Mary.location = \"garden\"\nself.Mary.mood = \"happy\"\n",
    );
    let without = parse_comment("## One.\nself.Mary.location = \"garden\"\n");
    let table = AbstractFunctionTable::babi_task2();
    let a = evaluate(&with_fault, babi_world(&[("character", "Mary")]), &table);
    let b = evaluate(&without, babi_world(&[("character", "Mary")]), &table);
    assert_eq!(a.world.snapshot(), b.world.snapshot());
    assert!(!a.faults.is_empty());
}

#[test]
fn auto_declares_unknown_entities_with_a_fault() {
    let program = parse_comment("## One.\nself.apple.location = \"kitchen\"\n");
    let evaluation = evaluate(
        &program,
        babi_world(&[("character", "Mary")]),
        &AbstractFunctionTable::babi_task2(),
    );
    assert!(evaluation
        .faults
        .iter()
        .any(|f| f.kind == FaultKind::AutoDeclared));
    let apple = evaluation.world.entity("apple").unwrap();
    assert_eq!(apple.kind(), "object");
    assert_eq!(apple.scalar("location"), Some("kitchen"));
}

#[test]
fn unknown_function_and_arity_faults() {
    let table = AbstractFunctionTable::babi_task2();
    let program = parse_program(
        "## One.\nself.teleport(self.Mary)\ngo(character=Mary)\n",
        PromptStyle::AbstractFunctions,
        &SchemaPreset::babi_task2(),
    )
    .unwrap();
    let evaluation = evaluate(&program, babi_world(&[("character", "Mary")]), &table);
    let kinds: Vec<FaultKind> = evaluation.faults.iter().map(|f| f.kind).collect();
    assert!(kinds.contains(&FaultKind::UnknownFunction));
    assert!(kinds.contains(&FaultKind::ArityMismatch));
}

#[test]
fn prints_evaluate_against_the_final_state() {
    let program = parse_comment(
        "print(self.football.location)\n## Mary moved.\nself.Mary.location = \"garden\"\n## Mary got it.\nself.football.carrier = \"Mary\"\n",
    );
    let world = babi_world(&[("character", "Mary"), ("object", "football")]);
    let evaluation = evaluate(&program, world, &AbstractFunctionTable::babi_task2());
    assert_eq!(evaluation.printed, vec!["garden".to_string()]);
}

#[test]
fn extract_answer_prefers_last_print_then_falls_back() {
    let program = parse_comment(
        "## Mary moved.\nself.Mary.location = \"garden\"\n## Mary got it.\nself.football.carrier = \"Mary\"\nprint(self.football.location)\n",
    );
    let world = babi_world(&[("character", "Mary"), ("object", "football")]);
    let evaluation = evaluate(&program, world, &AbstractFunctionTable::babi_task2());
    assert_eq!(
        extract_answer(&evaluation, Some("Where is the football?")),
        Answer::Text("garden".to_string())
    );

    // No print: the fallback asks the world directly.
    let no_print = parse_comment(
        "## Mary moved.\nself.Mary.location = \"garden\"\n## Mary got it.\nself.football.carrier = \"Mary\"\n",
    );
    let world = babi_world(&[("character", "Mary"), ("object", "football")]);
    let evaluation = evaluate(&no_print, world, &AbstractFunctionTable::babi_task2());
    assert!(evaluation.printed.is_empty());
    assert_eq!(
        extract_answer(&evaluation, Some("Where is the football?")),
        Answer::Text("garden".to_string())
    );
}

#[test]
fn extract_answer_signals_unanswerable_on_empty_state() {
    let program = parse_comment("");
    let world = babi_world(&[("object", "football")]);
    let evaluation = evaluate(&program, world, &AbstractFunctionTable::babi_task2());
    assert_eq!(
        extract_answer(&evaluation, Some("Where is the football?")),
        Answer::Unanswerable
    );
    assert_eq!(extract_answer(&evaluation, None), Answer::Unanswerable);
}

#[test]
fn failed_print_produces_no_text_so_fallback_runs() {
    let program = parse_comment(
        "## Setup.\nself.Mary.location = \"garden\"\nself.football.carrier = \"Mary\"\nprint(self.frisbee.location)\n",
    );
    let world = babi_world(&[("character", "Mary"), ("object", "football")]);
    let evaluation = evaluate(&program, world, &AbstractFunctionTable::babi_task2());
    assert!(evaluation.printed.is_empty());
    assert!(evaluation
        .faults
        .iter()
        .any(|f| f.kind == FaultKind::PrintFailed));
    assert_eq!(
        extract_answer(&evaluation, Some("Where is the football?")),
        Answer::Text("garden".to_string())
    );
}

#[test]
fn missing_def_is_a_fault_with_empty_group() {
    let program = parse_program(
        "        self.never_defined()\n",
        PromptStyle::SpecificFunctions,
        &SchemaPreset::babi_task2(),
    )
    .unwrap();
    assert_eq!(program.groups.len(), 1);
    assert!(program.groups[0].statements.is_empty());
    assert!(program.faults.iter().any(|f| f.kind == FaultKind::MissingDef));
}

#[test]
fn def_blocks_are_illegal_outside_specific_style() {
    let program = parse_comment("    def sneaky(self):\n        self.Mary.location = \"x\"\n");
    assert!(program.groups.is_empty());
    assert!(program.faults.iter().any(|f| f.kind == FaultKind::IllegalForm));
}

#[test]
fn round_trip_is_a_fixed_point() {
    let preset = SchemaPreset::re3_character();
    let source = "## A sentence here.\nself.Joan_Westfall.gender.append('female')\nself.Joan_Westfall.relations['husband'] = 'Brent_Westfall'\n## Another one.\nset_age(character=Jason, age=young)\nprint('done')\n";
    let once = parse_program(source, PromptStyle::AbstractFunctions, &preset).unwrap();
    let again = parse_program(
        &pretty_print(&once),
        PromptStyle::AbstractFunctions,
        &preset,
    )
    .unwrap();
    assert_eq!(once, again);
}

#[test]
fn specific_round_trip_is_a_fixed_point() {
    let preset = SchemaPreset::re3_character();
    let source = "        self.first_thing()\n        self.second_thing()\n\n    def first_thing(self):\n        self.Joan_Westfall.gender.append('female')\n\n    def second_thing(self):\n        pass\n";
    let once = parse_program(source, PromptStyle::SpecificFunctions, &preset).unwrap();
    let again = parse_program(
        &pretty_print(&once),
        PromptStyle::SpecificFunctions,
        &preset,
    )
    .unwrap();
    assert_eq!(once, again);
}

#[test]
fn evaluation_is_deterministic() {
    let program = parse_comment(
        "## One.\nself.Mary.location = \"garden\"\n## Two.\nself.football.carrier = \"Mary\"\nprint(self.football.location)\n",
    );
    let table = AbstractFunctionTable::babi_task2();
    let run = || {
        let world = babi_world(&[("character", "Mary"), ("object", "football")]);
        let evaluation = evaluate(&program, world, &table);
        (
            evaluation.world.snapshot(),
            evaluation.printed.clone(),
            evaluation.faults.clone(),
        )
    };
    assert_eq!(run(), run());
}

#[test]
fn dump_ast_is_line_oriented() {
    let program = parse_comment("## Sandra journeyed to the bedroom.\nself.Sandra.location = \"bedroom\"\n");
    let dump = dump_ast(&program);
    assert!(dump.contains("group 1 sentence \"Sandra journeyed to the bedroom.\""));
    assert!(dump.contains("scalar-assign self.Sandra.location = \"bedroom\" [line 2]"));
}

#[test]
fn object_of_query_extracts_the_object() {
    assert_eq!(
        object_of_query("Where is the football?"),
        Some("football".to_string())
    );
    assert_eq!(object_of_query("Where is the milk? "), Some("milk".to_string()));
    assert_eq!(object_of_query("???"), None);
}
