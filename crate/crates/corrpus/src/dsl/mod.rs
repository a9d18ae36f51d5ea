//! The restricted update dialect: the code surface in which prompts are
//! written and in which model completions are interpreted.
//!
//! Programs are never executed by a host-language interpreter. They are
//! parsed into [`UpdateProgram`] values and applied statement by statement
//! through [`crate::world::WorldState`] operations. Problems never abort an
//! evaluation; each is recorded as a [`Fault`] and the offending statement is
//! skipped.

mod parse;
pub mod pretty;
mod table;

pub use parse::{parse_program, ParseError};
pub use pretty::{dump_ast, pretty_print};
pub use table::{AbstractFunction, AbstractFunctionTable, EffectRecipe};

use crate::fault::{Fault, FaultKind};
use crate::world::{AttributeKind, WorldError, WorldState};

/// A literal value as written in the dialect.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Literal {
    Str { value: String, double_quoted: bool },
    /// `None`: clears a scalar when assigned.
    None,
    /// A bare identifier used as a value (`destination=bedroom`).
    Ident(String),
}

impl Literal {
    pub fn double(value: &str) -> Literal {
        Literal::Str {
            value: value.to_string(),
            double_quoted: true,
        }
    }

    pub fn single(value: &str) -> Literal {
        Literal::Str {
            value: value.to_string(),
            double_quoted: false,
        }
    }

    /// The text this literal denotes; `None` for the `None` literal.
    pub fn text(&self) -> Option<&str> {
        match self {
            Literal::Str { value, .. } => Some(value),
            Literal::None => None,
            Literal::Ident(name) => Some(name),
        }
    }
}

/// An argument in an abstract-function call.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ArgValue {
    /// `self.Mary` — a reference to a world entity.
    EntityRef(String),
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CallArg {
    /// Present for keyword arguments (`character=Sandra`).
    pub name: Option<String>,
    pub value: ArgValue,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PrintExpr {
    Path { entity: String, attribute: String },
    Lit(Literal),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Statement {
    ScalarAssign {
        entity: String,
        attribute: String,
        value: Literal,
    },
    ListAppend {
        entity: String,
        attribute: String,
        value: Literal,
    },
    MapAssign {
        entity: String,
        attribute: String,
        key: Literal,
        value: Literal,
    },
    AbstractCall {
        name: String,
        /// True for the `self.fn(...)` spelling, false for bare `fn(...)`.
        method_form: bool,
        args: Vec<CallArg>,
    },
    Print(PrintExpr),
    Pass,
}

/// A statement plus its originating source line. Line numbers are carried for
/// diagnostics only and do not take part in equality.
#[derive(Debug, Clone, Eq)]
pub struct Stmt {
    pub statement: Statement,
    pub line: u32,
}

impl Stmt {
    pub fn new(statement: Statement, line: u32) -> Self {
        Stmt { statement, line }
    }
}

impl PartialEq for Stmt {
    fn eq(&self, other: &Self) -> bool {
        self.statement == other.statement
    }
}

/// What a group of statements is keyed by: the story sentence it updates for,
/// or the slugified function name in the Specific Functions style.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupKey {
    Sentence(String),
    Slug(String),
}

impl GroupKey {
    pub fn text(&self) -> &str {
        match self {
            GroupKey::Sentence(s) | GroupKey::Slug(s) => s,
        }
    }
}

/// One sentence-level update U_i.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Group {
    pub key: GroupKey,
    pub statements: Vec<Stmt>,
}

/// A parsed, validated update program. Parse problems are attached as faults
/// rather than silently dropped.
#[derive(Debug, Clone, Default)]
pub struct UpdateProgram {
    pub groups: Vec<Group>,
    /// Statements outside any sentence group; print statements always land
    /// here since they are evaluated against the final state.
    pub trailing: Vec<Stmt>,
    pub faults: Vec<Fault>,
}

impl PartialEq for UpdateProgram {
    fn eq(&self, other: &Self) -> bool {
        self.groups == other.groups && self.trailing == other.trailing
    }
}

impl UpdateProgram {
    pub fn is_empty(&self) -> bool {
        self.groups.is_empty() && self.trailing.is_empty()
    }

    pub fn statement_count(&self) -> usize {
        self.groups.iter().map(|g| g.statements.len()).sum::<usize>() + self.trailing.len()
    }
}

/// The result of running an [`UpdateProgram`] against a world.
#[derive(Debug, Clone)]
pub struct Evaluation {
    pub world: WorldState,
    pub printed: Vec<String>,
    pub faults: Vec<Fault>,
}

/// The answer a program produced, or an explicit signal that none could be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Answer {
    Text(String),
    Unanswerable,
}

impl Answer {
    pub fn text(&self) -> Option<&str> {
        match self {
            Answer::Text(t) => Some(t),
            Answer::Unanswerable => None,
        }
    }
}

fn world_fault(err: WorldError, line: u32) -> Fault {
    let kind = match &err {
        WorldError::UnknownEntity(_) | WorldError::DuplicateEntity(_) => FaultKind::UnknownEntity,
        WorldError::UnknownKind(_) | WorldError::InvalidName { .. } => FaultKind::UnknownEntity,
        WorldError::UnknownAttribute { .. } => FaultKind::UnknownAttribute,
        WorldError::KindMismatch { .. } => FaultKind::KindMismatch,
        WorldError::Unanswerable(_) => FaultKind::Unanswerable,
    };
    Fault::new(kind, Some(line), err.to_string())
}

/// Make sure `entity` exists, declaring it with `kind` when it does not.
/// Auto-declaration is recorded as a fault so reports can surface it.
fn ensure_entity(world: &mut WorldState, entity: &str, kind: &str, line: u32, faults: &mut Vec<Fault>) -> bool {
    if world.contains(entity) {
        return true;
    }
    match world.declare(kind, entity) {
        Ok(()) => {
            faults.push(Fault::new(
                FaultKind::AutoDeclared,
                Some(line),
                format!("`{entity}` was not declared; added as {kind}"),
            ));
            true
        }
        Err(err) => {
            faults.push(world_fault(err, line));
            false
        }
    }
}

fn apply_statement(
    world: &mut WorldState,
    stmt: &Stmt,
    table: &AbstractFunctionTable,
    faults: &mut Vec<Fault>,
) {
    let line = stmt.line;
    let default_kind = world.preset().default_kind();
    match &stmt.statement {
        Statement::Pass | Statement::Print(_) => {}
        Statement::ScalarAssign {
            entity,
            attribute,
            value,
        } => {
            if !ensure_entity(world, entity, default_kind, line, faults) {
                return;
            }
            if let Err(err) = world.set_scalar(entity, attribute, value.text()) {
                faults.push(world_fault(err, line));
            }
        }
        Statement::ListAppend {
            entity,
            attribute,
            value,
        } => {
            if !ensure_entity(world, entity, default_kind, line, faults) {
                return;
            }
            match value.text() {
                Some(text) => {
                    if let Err(err) = world.append_list(entity, attribute, text) {
                        faults.push(world_fault(err, line));
                    }
                }
                None => faults.push(Fault::new(
                    FaultKind::KindMismatch,
                    Some(line),
                    "cannot append None to a list",
                )),
            }
        }
        Statement::MapAssign {
            entity,
            attribute,
            key,
            value,
        } => {
            if !ensure_entity(world, entity, default_kind, line, faults) {
                return;
            }
            match (key.text(), value.text()) {
                (Some(k), Some(v)) => {
                    if let Err(err) = world.put_map(entity, attribute, k, v) {
                        faults.push(world_fault(err, line));
                    }
                }
                _ => faults.push(Fault::new(
                    FaultKind::KindMismatch,
                    Some(line),
                    "map bindings need text key and value",
                )),
            }
        }
        Statement::AbstractCall { name, args, .. } => {
            apply_abstract_call(world, name, args, table, line, faults);
        }
    }
}

/// Resolve a call argument to an entity identifier.
fn arg_entity(arg: &ArgValue) -> Option<&str> {
    match arg {
        ArgValue::EntityRef(name) => Some(name),
        ArgValue::Lit(lit) => lit.text(),
    }
}

/// Resolve a call argument to a plain text value.
fn arg_text(arg: &ArgValue) -> Option<&str> {
    match arg {
        ArgValue::EntityRef(name) => Some(name),
        ArgValue::Lit(lit) => lit.text(),
    }
}

fn apply_abstract_call(
    world: &mut WorldState,
    name: &str,
    args: &[CallArg],
    table: &AbstractFunctionTable,
    line: u32,
    faults: &mut Vec<Fault>,
) {
    let function = match table.get(name) {
        Some(f) => f,
        None => {
            faults.push(Fault::new(
                FaultKind::UnknownFunction,
                Some(line),
                format!("no abstract function `{name}`"),
            ));
            return;
        }
    };
    let bound = match function.bind(args) {
        Ok(b) => b,
        Err(detail) => {
            faults.push(Fault::new(FaultKind::ArityMismatch, Some(line), detail));
            return;
        }
    };

    macro_rules! entity_arg {
        ($idx:expr, $kind:expr) => {{
            let Some(name) = arg_entity(bound[$idx]) else {
                faults.push(Fault::new(
                    FaultKind::ArityMismatch,
                    Some(line),
                    format!("argument `{}` must name an entity", function.params[$idx]),
                ));
                return;
            };
            let name = name.to_string();
            if !ensure_entity(world, &name, $kind, line, faults) {
                return;
            }
            name
        }};
    }
    macro_rules! text_arg {
        ($idx:expr) => {{
            match arg_text(bound[$idx]) {
                Some(t) => t.to_string(),
                None => {
                    faults.push(Fault::new(
                        FaultKind::ArityMismatch,
                        Some(line),
                        format!("argument `{}` must be a value", function.params[$idx]),
                    ));
                    return;
                }
            }
        }};
    }

    let result = match &function.effect {
        EffectRecipe::Go => {
            let character = entity_arg!(0, "character");
            let destination = text_arg!(1);
            world.set_scalar(&character, "location", Some(&destination))
        }
        EffectRecipe::Grab => {
            let character = entity_arg!(0, "character");
            let object = entity_arg!(1, "object");
            world.set_scalar(&object, "carrier", Some(&character))
        }
        EffectRecipe::Drop => {
            let character = entity_arg!(0, "character");
            let object = entity_arg!(1, "object");
            let location = world
                .entity(&character)
                .and_then(|c| c.scalar("location"))
                .map(|s| s.to_string());
            world
                .set_scalar(&object, "carrier", None)
                .and_then(|()| world.set_scalar(&object, "location", location.as_deref()))
        }
        EffectRecipe::AppendAttr(attribute) => {
            let character = entity_arg!(0, "character");
            let value = text_arg!(1);
            world.append_list(&character, attribute, &value)
        }
        EffectRecipe::SetRelation => {
            let character = entity_arg!(0, "character");
            let relation = text_arg!(1);
            // The third argument is usually an entity reference; its display
            // name is what gets stored, mirroring `other_character.name`.
            let value = match &bound[2] {
                ArgValue::EntityRef(other) => {
                    if !ensure_entity(world, other, "character", line, faults) {
                        return;
                    }
                    world
                        .entity(other)
                        .map(|e| e.display_name())
                        .unwrap_or_else(|| other.clone())
                }
                ArgValue::Lit(lit) => match lit.text() {
                    Some(t) => t.to_string(),
                    None => {
                        faults.push(Fault::new(
                            FaultKind::ArityMismatch,
                            Some(line),
                            "relation target must be a value",
                        ));
                        return;
                    }
                },
            };
            world.put_map(&character, "relations", &relation, &value)
        }
    };
    if let Err(err) = result {
        faults.push(world_fault(err, line));
    }
}

fn eval_print(world: &WorldState, expr: &PrintExpr, line: u32, faults: &mut Vec<Fault>) -> Option<String> {
    match expr {
        PrintExpr::Lit(lit) => Some(match lit {
            Literal::None => "None".to_string(),
            other => other.text().unwrap_or_default().to_string(),
        }),
        PrintExpr::Path { entity, attribute } => {
            let Some(ent) = world.entity(entity) else {
                faults.push(Fault::new(
                    FaultKind::PrintFailed,
                    Some(line),
                    format!("print of unknown entity `{entity}`"),
                ));
                return None;
            };
            let schema = world
                .preset()
                .schema(ent.kind())
                .expect("declared entity always has a schema");
            match schema.attribute_kind(attribute) {
                Some(AttributeKind::Scalar) => {
                    // A carried object's location resolves through its carrier.
                    if attribute == "location" && schema.attribute_kind("carrier").is_some() {
                        match world.query_object_location(entity) {
                            Ok(answer) => return Some(answer),
                            Err(err) => {
                                faults.push(world_fault(err, line));
                                return None;
                            }
                        }
                    }
                    match ent.scalar(attribute) {
                        Some(v) => Some(v.to_string()),
                        None => {
                            faults.push(Fault::new(
                                FaultKind::PrintFailed,
                                Some(line),
                                format!("`{entity}.{attribute}` is unset"),
                            ));
                            None
                        }
                    }
                }
                Some(AttributeKind::List) => {
                    let items: Vec<String> = ent
                        .list(attribute)
                        .iter()
                        .map(|v| format!("'{v}'"))
                        .collect();
                    Some(format!("[{}]", items.join(", ")))
                }
                Some(AttributeKind::Map) => {
                    let bindings: Vec<String> = ent
                        .map(attribute)
                        .map(|m| m.iter().map(|(k, v)| format!("'{k}': '{v}'")).collect())
                        .unwrap_or_default();
                    Some(format!("{{{}}}", bindings.join(", ")))
                }
                None => {
                    faults.push(Fault::new(
                        FaultKind::UnknownAttribute,
                        Some(line),
                        format!("entity `{entity}` has no attribute `{attribute}`"),
                    ));
                    None
                }
            }
        }
    }
}

/// Apply each group as one sentence-level update, bumping the step index per
/// group, then evaluate print statements against the final state. Never
/// aborts: all problems surface as faults.
pub fn evaluate(
    program: &UpdateProgram,
    world: WorldState,
    table: &AbstractFunctionTable,
) -> Evaluation {
    let mut world = world;
    let mut faults = program.faults.clone();
    let mut prints: Vec<(PrintExpr, u32)> = Vec::new();

    for group in &program.groups {
        for stmt in &group.statements {
            if let Statement::Print(expr) = &stmt.statement {
                prints.push((expr.clone(), stmt.line));
            } else {
                apply_statement(&mut world, stmt, table, &mut faults);
            }
        }
        world.bump_step();
    }
    for stmt in &program.trailing {
        if let Statement::Print(expr) = &stmt.statement {
            prints.push((expr.clone(), stmt.line));
        } else {
            apply_statement(&mut world, stmt, table, &mut faults);
        }
    }

    let mut printed = Vec::new();
    for (expr, line) in prints {
        if let Some(text) = eval_print(&world, &expr, line, &mut faults) {
            printed.push(text);
        }
    }

    Evaluation {
        world,
        printed,
        faults,
    }
}

/// The object a bAbI-style location question asks about:
/// `Where is the football?` -> `football`.
pub fn object_of_query(query: &str) -> Option<String> {
    let trimmed = query.trim().trim_end_matches('?').trim();
    let token = trimmed.rsplit(char::is_whitespace).next()?;
    let cleaned: String = token
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    if cleaned.is_empty() {
        None
    } else {
        Some(cleaned)
    }
}

/// The answer of an evaluation: the last printed text when any print ran,
/// otherwise a direct location query for the object the question names.
pub fn extract_answer(evaluation: &Evaluation, query: Option<&str>) -> Answer {
    if let Some(last) = evaluation.printed.last() {
        return Answer::Text(last.clone());
    }
    let Some(query) = query else {
        return Answer::Unanswerable;
    };
    let Some(object) = object_of_query(query) else {
        return Answer::Unanswerable;
    };
    match evaluation.world.query_object_location(&object) {
        Ok(answer) => Answer::Text(answer),
        Err(_) => Answer::Unanswerable,
    }
}

#[cfg(test)]
mod tests;
