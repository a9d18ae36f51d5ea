//! Line-oriented parser for the update dialect.
//!
//! The only fatal condition is unrecoverable lexical structure (an
//! unterminated string). Everything else — unknown statement shapes, illegal
//! forms for the active style, attributes outside the schema — becomes a
//! per-line fault attached to the parsed program.

use std::collections::HashMap;

use thiserror::Error;

use super::{ArgValue, CallArg, Group, GroupKey, Literal, PrintExpr, Statement, Stmt, UpdateProgram};
use crate::fault::{Fault, FaultKind};
use crate::prompt::PromptStyle;
use crate::world::SchemaPreset;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("unterminated string literal at line {line}")]
    UnterminatedString { line: u32 },
}

enum LineIssue {
    Fault(FaultKind, String),
    Fatal(ParseError),
}

impl LineIssue {
    fn fault(kind: FaultKind, detail: impl Into<String>) -> Self {
        LineIssue::Fault(kind, detail.into())
    }
}

fn indent_width(raw: &str) -> usize {
    let mut width = 0;
    for c in raw.chars() {
        match c {
            ' ' => width += 1,
            '\t' => width += 4,
            _ => break,
        }
    }
    width
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s.chars().next().map(|c| c.is_ascii_alphabetic() || c == '_').unwrap_or(false)
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

/// A value token: quoted string, `None`, or a bare word.
fn parse_literal(s: &str, line: u32) -> Result<Literal, LineIssue> {
    let s = s.trim();
    if let Some(quote) = s.chars().next().filter(|c| *c == '\'' || *c == '"') {
        let rest = &s[1..];
        match rest.find(quote) {
            Some(end) if end == rest.len() - 1 => {
                return Ok(Literal::Str {
                    value: rest[..end].to_string(),
                    double_quoted: quote == '"',
                });
            }
            Some(_) => {
                return Err(LineIssue::fault(
                    FaultKind::UnparsedLine,
                    format!("trailing text after string literal: `{s}`"),
                ))
            }
            None => return Err(LineIssue::Fatal(ParseError::UnterminatedString { line })),
        }
    }
    if s == "None" {
        return Ok(Literal::None);
    }
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
        return Ok(Literal::Ident(s.to_string()));
    }
    Err(LineIssue::fault(
        FaultKind::UnparsedLine,
        format!("not a literal: `{s}`"),
    ))
}

/// Find `needle` outside quotes, parentheses, and brackets.
fn find_top_level(s: &str, needle: char, line: u32) -> Result<Option<usize>, LineIssue> {
    let bytes: Vec<char> = s.chars().collect();
    let mut depth = 0i32;
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            '\'' | '"' => {
                let mut j = i + 1;
                while j < bytes.len() && bytes[j] != c {
                    j += 1;
                }
                if j == bytes.len() {
                    return Err(LineIssue::Fatal(ParseError::UnterminatedString { line }));
                }
                i = j;
            }
            c if c == needle && depth == 0 => return Ok(Some(i)),
            '(' | '[' => depth += 1,
            ')' | ']' => depth -= 1,
            _ => {}
        }
        i += 1;
    }
    Ok(None)
}

fn split_top_level(s: &str, sep: char, line: u32) -> Result<Vec<String>, LineIssue> {
    let mut parts = Vec::new();
    let mut rest = s;
    loop {
        match find_top_level(rest, sep, line)? {
            Some(i) => {
                parts.push(rest[..i].to_string());
                rest = &rest[i + 1..];
            }
            None => {
                parts.push(rest.to_string());
                return Ok(parts);
            }
        }
    }
}

/// `self.A.B.C` -> ["A", "B", "C"].
fn split_path(s: &str) -> Option<Vec<String>> {
    let rest = s.strip_prefix("self.")?;
    let parts: Vec<String> = rest.split('.').map(|p| p.trim().to_string()).collect();
    if parts.iter().all(|p| is_ident(p)) {
        Some(parts)
    } else {
        None
    }
}

fn parse_arg_value(s: &str, line: u32) -> Result<ArgValue, LineIssue> {
    let s = s.trim();
    if let Some(rest) = s.strip_prefix("self.") {
        if is_ident(rest) {
            return Ok(ArgValue::EntityRef(rest.to_string()));
        }
        return Err(LineIssue::fault(
            FaultKind::UnparsedLine,
            format!("unsupported argument `{s}`"),
        ));
    }
    parse_literal(s, line).map(ArgValue::Lit)
}

fn parse_call_args(s: &str, line: u32) -> Result<Vec<CallArg>, LineIssue> {
    let s = s.trim();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut args = Vec::new();
    for part in split_top_level(s, ',', line)? {
        let part = part.trim();
        match find_top_level(part, '=', line)? {
            Some(i) => {
                let name = part[..i].trim();
                if !is_ident(name) {
                    return Err(LineIssue::fault(
                        FaultKind::UnparsedLine,
                        format!("bad keyword argument `{part}`"),
                    ));
                }
                args.push(CallArg {
                    name: Some(name.to_string()),
                    value: parse_arg_value(&part[i + 1..], line)?,
                });
            }
            None => args.push(CallArg {
                name: None,
                value: parse_arg_value(part, line)?,
            }),
        }
    }
    Ok(args)
}

/// `name(...)` with the closing parenthesis at the end of the text.
fn split_call(s: &str, line: u32) -> Result<Option<(String, String)>, LineIssue> {
    let Some(open) = find_top_level(s, '(', line).ok().flatten() else {
        return Ok(None);
    };
    if !s.ends_with(')') {
        return Ok(None);
    }
    let callee = s[..open].trim().to_string();
    let args = s[open + 1..s.len() - 1].to_string();
    Ok(Some((callee, args)))
}

fn parse_statement(text: &str, line: u32) -> Result<Statement, LineIssue> {
    if text == "pass" {
        return Ok(Statement::Pass);
    }

    if let Some(inner) = text.strip_prefix("print(").and_then(|t| t.strip_suffix(')')) {
        let inner = inner.trim();
        if inner.starts_with("self.") {
            match split_path(inner) {
                Some(parts) if parts.len() == 2 => {
                    return Ok(Statement::Print(PrintExpr::Path {
                        entity: parts[0].clone(),
                        attribute: parts[1].clone(),
                    }));
                }
                _ => {
                    return Err(LineIssue::fault(
                        FaultKind::UnparsedLine,
                        format!("print takes an entity attribute path or a literal: `{text}`"),
                    ))
                }
            }
        }
        let lit = parse_literal(inner, line)?;
        return Ok(Statement::Print(PrintExpr::Lit(lit)));
    }

    if let Some(eq) = find_top_level(text, '=', line)? {
        let left = text[..eq].trim();
        let right = text[eq + 1..].trim();
        if !left.starts_with("self.") {
            return Err(LineIssue::fault(
                FaultKind::UnparsedLine,
                format!("assignment target must be a `self` path: `{text}`"),
            ));
        }
        // Map binding: self.E.A['key'] = value
        if let Some(bracket) = find_top_level(left, '[', line)? {
            let path = left[..bracket].trim();
            let Some(key_text) = left[bracket + 1..].trim().strip_suffix(']') else {
                return Err(LineIssue::fault(
                    FaultKind::UnparsedLine,
                    format!("unclosed map key: `{text}`"),
                ));
            };
            let parts = split_path(path).filter(|p| p.len() == 2).ok_or_else(|| {
                LineIssue::fault(
                    FaultKind::UnparsedLine,
                    format!("map target must be `self.<entity>.<attribute>`: `{text}`"),
                )
            })?;
            return Ok(Statement::MapAssign {
                entity: parts[0].clone(),
                attribute: parts[1].clone(),
                key: parse_literal(key_text, line)?,
                value: parse_literal(right, line)?,
            });
        }
        let Some(parts) = split_path(left) else {
            return Err(LineIssue::fault(
                FaultKind::UnparsedLine,
                format!("assignment target must be a `self` path: `{text}`"),
            ));
        };
        return match parts.len() {
            1 => Err(LineIssue::fault(
                FaultKind::IllegalForm,
                format!("entity declarations belong to __init__, not story code: `{text}`"),
            )),
            2 => Ok(Statement::ScalarAssign {
                entity: parts[0].clone(),
                attribute: parts[1].clone(),
                value: parse_literal(right, line)?,
            }),
            _ => Err(LineIssue::fault(
                FaultKind::UnparsedLine,
                format!("path too deep: `{text}`"),
            )),
        };
    }

    if let Some((callee, args_text)) = split_call(text, line)? {
        if let Some(rest) = callee.strip_prefix("self.") {
            let parts: Vec<&str> = rest.split('.').collect();
            match parts.len() {
                1 if is_ident(parts[0]) => {
                    return Ok(Statement::AbstractCall {
                        name: parts[0].to_string(),
                        method_form: true,
                        args: parse_call_args(&args_text, line)?,
                    });
                }
                3 if parts[2] == "append" && is_ident(parts[0]) && is_ident(parts[1]) => {
                    return Ok(Statement::ListAppend {
                        entity: parts[0].to_string(),
                        attribute: parts[1].to_string(),
                        value: parse_literal(&args_text, line)?,
                    });
                }
                3 => {
                    return Err(LineIssue::fault(
                        FaultKind::UnparsedLine,
                        format!("unsupported list method `.{}()`: `{text}`", parts[2]),
                    ));
                }
                _ => {
                    return Err(LineIssue::fault(
                        FaultKind::UnparsedLine,
                        format!("unsupported call target: `{text}`"),
                    ))
                }
            }
        }
        if is_ident(&callee) {
            return Ok(Statement::AbstractCall {
                name: callee,
                method_form: false,
                args: parse_call_args(&args_text, line)?,
            });
        }
    }

    Err(LineIssue::fault(
        FaultKind::UnparsedLine,
        format!("unrecognized statement: `{text}`"),
    ))
}

/// `def some_name(self):` -> `some_name`.
fn parse_def_header(text: &str) -> Option<String> {
    let rest = text.strip_prefix("def ")?.trim();
    let open = rest.find('(')?;
    let name = rest[..open].trim();
    let tail = rest[open + 1..].trim();
    let params = tail.strip_suffix("):")?.trim();
    if is_ident(name) && (params == "self" || params.starts_with("self,") || params.starts_with("self ")) {
        Some(name.to_string())
    } else {
        None
    }
}

struct DefBlock {
    statements: Vec<Stmt>,
    header_indent: usize,
}

enum BodyItem {
    Comment(String),
    Stmt(Stmt),
}

/// Parse program text under a prompt style. Comment lines beginning `##`
/// delimit sentence groups; `###` and single-`#` lines are plain comments.
/// Under the Specific Functions style, `def <name>(self):` blocks are
/// collected and attached to the `self.<name>()` calls that invoke them.
pub fn parse_program(
    source: &str,
    style: PromptStyle,
    preset: &SchemaPreset,
) -> Result<UpdateProgram, ParseError> {
    let mut program = UpdateProgram::default();
    if style == PromptStyle::NaturalLanguage {
        return Ok(program);
    }

    let mut defs: Vec<DefBlock> = Vec::new();
    let mut def_index: HashMap<String, usize> = HashMap::new();
    let mut current_def: Option<usize> = None;
    let mut body: Vec<BodyItem> = Vec::new();
    // Indent of a faulted def header whose whole block is being skipped.
    let mut skip_deeper_than: Option<usize> = None;

    for (idx, raw) in source.lines().enumerate() {
        let line = (idx + 1) as u32;
        let text = raw.trim();
        if text.is_empty() {
            continue;
        }
        let indent = indent_width(raw);

        if let Some(limit) = skip_deeper_than {
            if indent > limit {
                continue;
            }
            skip_deeper_than = None;
        }

        if let Some(def_idx) = current_def {
            if indent <= defs[def_idx].header_indent {
                current_def = None;
            }
        }

        if let Some(comment) = text.strip_prefix("##") {
            if comment.starts_with('#') {
                continue; // `###` instruction banner, not a sentence
            }
            if current_def.is_some() {
                continue; // comment inside a function body
            }
            body.push(BodyItem::Comment(comment.trim().to_string()));
            continue;
        }
        if text.starts_with('#') {
            continue;
        }

        if text.starts_with("def ") {
            match parse_def_header(text) {
                Some(name) if style == PromptStyle::SpecificFunctions => {
                    defs.push(DefBlock {
                        statements: Vec::new(),
                        header_indent: indent,
                    });
                    def_index.insert(name, defs.len() - 1);
                    current_def = Some(defs.len() - 1);
                }
                Some(name) => {
                    program.faults.push(Fault::new(
                        FaultKind::IllegalForm,
                        Some(line),
                        format!("function definitions are not accepted in this style: `{name}`"),
                    ));
                    skip_deeper_than = Some(indent);
                }
                None => {
                    program.faults.push(Fault::new(
                        FaultKind::UnparsedLine,
                        Some(line),
                        format!("malformed function header: `{text}`"),
                    ));
                    skip_deeper_than = Some(indent);
                }
            }
            continue;
        }

        match parse_statement(text, line) {
            Ok(statement) => {
                // Attribute names outside the preset are rejected up front.
                let bad_attr = match &statement {
                    Statement::ScalarAssign { attribute, .. }
                    | Statement::ListAppend { attribute, .. }
                    | Statement::MapAssign { attribute, .. }
                        if !preset.knows_attribute(attribute) =>
                    {
                        Some(attribute.clone())
                    }
                    _ => None,
                };
                if let Some(attribute) = bad_attr {
                    program.faults.push(Fault::new(
                        FaultKind::UnknownAttribute,
                        Some(line),
                        format!("no schema declares attribute `{attribute}`"),
                    ));
                    continue;
                }
                let stmt = Stmt::new(statement, line);
                match current_def {
                    Some(def_idx) => defs[def_idx].statements.push(stmt),
                    None => body.push(BodyItem::Stmt(stmt)),
                }
            }
            Err(LineIssue::Fault(kind, detail)) => {
                program.faults.push(Fault::new(kind, Some(line), detail));
            }
            Err(LineIssue::Fatal(err)) => return Err(err),
        }
    }

    // Assemble groups in textual order.
    let mut current: Option<Group> = None;
    for item in body {
        match item {
            BodyItem::Comment(text) => {
                if let Some(group) = current.take() {
                    program.groups.push(group);
                }
                current = Some(Group {
                    key: GroupKey::Sentence(text),
                    statements: Vec::new(),
                });
            }
            BodyItem::Stmt(stmt) => {
                let is_print = matches!(stmt.statement, Statement::Print(_));
                if is_print {
                    program.trailing.push(stmt);
                    continue;
                }
                let slug_call = match &stmt.statement {
                    Statement::AbstractCall {
                        name,
                        method_form: true,
                        args,
                    } if args.is_empty() && style == PromptStyle::SpecificFunctions => {
                        Some(name.clone())
                    }
                    _ => None,
                };
                if let Some(name) = slug_call {
                    if let Some(group) = current.take() {
                        program.groups.push(group);
                    }
                    let statements = match def_index.get(&name) {
                        Some(&idx) => defs[idx].statements.clone(),
                        None => {
                            program.faults.push(Fault::new(
                                FaultKind::MissingDef,
                                Some(stmt.line),
                                format!("no definition for `{name}`"),
                            ));
                            Vec::new()
                        }
                    };
                    program.groups.push(Group {
                        key: GroupKey::Slug(name),
                        statements,
                    });
                    continue;
                }
                match &mut current {
                    Some(group) => group.statements.push(stmt),
                    // A statement with no delimiter opens an anonymous group
                    // so evaluation order matches textual order.
                    None => {
                        current = Some(Group {
                            key: GroupKey::Sentence(String::new()),
                            statements: vec![stmt],
                        });
                    }
                }
            }
        }
    }
    if let Some(group) = current.take() {
        program.groups.push(group);
    }

    Ok(program)
}
