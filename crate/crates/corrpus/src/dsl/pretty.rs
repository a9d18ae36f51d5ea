//! Render parsed programs back to dialect source, and dump a stable
//! line-oriented AST view for debugging.

use super::{ArgValue, CallArg, GroupKey, Literal, PrintExpr, Statement, UpdateProgram};

pub fn literal_source(lit: &Literal) -> String {
    match lit {
        Literal::Str {
            value,
            double_quoted: true,
        } => format!("\"{value}\""),
        Literal::Str {
            value,
            double_quoted: false,
        } => format!("'{value}'"),
        Literal::None => "None".to_string(),
        Literal::Ident(name) => name.clone(),
    }
}

fn arg_source(arg: &CallArg) -> String {
    let value = match &arg.value {
        ArgValue::EntityRef(name) => format!("self.{name}"),
        ArgValue::Lit(lit) => literal_source(lit),
    };
    match &arg.name {
        Some(name) => format!("{name}={value}"),
        None => value,
    }
}

pub fn statement_source(statement: &Statement) -> String {
    match statement {
        Statement::ScalarAssign {
            entity,
            attribute,
            value,
        } => format!("self.{entity}.{attribute} = {}", literal_source(value)),
        Statement::ListAppend {
            entity,
            attribute,
            value,
        } => format!("self.{entity}.{attribute}.append({})", literal_source(value)),
        Statement::MapAssign {
            entity,
            attribute,
            key,
            value,
        } => format!(
            "self.{entity}.{attribute}[{}] = {}",
            literal_source(key),
            literal_source(value)
        ),
        Statement::AbstractCall {
            name,
            method_form,
            args,
        } => {
            let rendered: Vec<String> = args.iter().map(arg_source).collect();
            if *method_form {
                format!("self.{name}({})", rendered.join(", "))
            } else {
                format!("{name}({})", rendered.join(", "))
            }
        }
        Statement::Print(PrintExpr::Path { entity, attribute }) => {
            format!("print(self.{entity}.{attribute})")
        }
        Statement::Print(PrintExpr::Lit(lit)) => format!("print({})", literal_source(lit)),
        Statement::Pass => "pass".to_string(),
    }
}

/// Story body in the Comment Only / Abstract Functions shape: each group as a
/// `## sentence` line followed by its statements, then trailing statements.
pub fn render_comment_body(program: &UpdateProgram, pad: &str) -> String {
    let mut lines = Vec::new();
    for group in &program.groups {
        match &group.key {
            GroupKey::Sentence(text) if text.is_empty() => {}
            GroupKey::Sentence(text) => lines.push(format!("{pad}## {text}")),
            // Slug groups have no comment form here; keep the call line.
            GroupKey::Slug(name) => lines.push(format!("{pad}self.{name}()")),
        }
        for stmt in &group.statements {
            lines.push(format!("{pad}{}", statement_source(&stmt.statement)));
        }
    }
    for stmt in &program.trailing {
        lines.push(format!("{pad}{}", statement_source(&stmt.statement)));
    }
    lines.join("\n")
}

/// The `story()` body in the Specific Functions shape: one call per slug
/// group, sentence groups as comments, then trailing statements.
pub fn render_specific_story(program: &UpdateProgram, pad: &str) -> String {
    let mut lines = Vec::new();
    for group in &program.groups {
        match &group.key {
            GroupKey::Slug(name) => lines.push(format!("{pad}self.{name}()")),
            GroupKey::Sentence(text) if text.is_empty() => {
                for stmt in &group.statements {
                    lines.push(format!("{pad}{}", statement_source(&stmt.statement)));
                }
            }
            GroupKey::Sentence(text) => {
                lines.push(format!("{pad}## {text}"));
                for stmt in &group.statements {
                    lines.push(format!("{pad}{}", statement_source(&stmt.statement)));
                }
            }
        }
    }
    for stmt in &program.trailing {
        lines.push(format!("{pad}{}", statement_source(&stmt.statement)));
    }
    lines.join("\n")
}

/// The definition blocks for every slug group, blank-line separated. An empty
/// group renders as a `pass` body.
pub fn render_specific_defs(program: &UpdateProgram, def_pad: &str, body_pad: &str) -> String {
    let mut blocks = Vec::new();
    for group in &program.groups {
        let GroupKey::Slug(name) = &group.key else {
            continue;
        };
        let mut lines = vec![format!("{def_pad}def {name}(self):")];
        if group.statements.is_empty() {
            lines.push(format!("{body_pad}pass"));
        } else {
            for stmt in &group.statements {
                lines.push(format!("{body_pad}{}", statement_source(&stmt.statement)));
            }
        }
        blocks.push(lines.join("\n"));
    }
    blocks.join("\n\n")
}

/// Canonical source for a program, shaped like the completion it came from:
/// specific-style programs render as calls plus definition blocks, everything
/// else as commented groups.
pub fn pretty_print(program: &UpdateProgram) -> String {
    let has_slugs = program
        .groups
        .iter()
        .any(|g| matches!(g.key, GroupKey::Slug(_)));
    let mut out = if has_slugs {
        let story = render_specific_story(program, "        ");
        let defs = render_specific_defs(program, "    ", "        ");
        if defs.is_empty() {
            story
        } else {
            format!("{story}\n\n{defs}")
        }
    } else {
        render_comment_body(program, "        ")
    };
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

/// Stable line-oriented AST rendering for `--dump-ast`.
pub fn dump_ast(program: &UpdateProgram) -> String {
    let mut lines = Vec::new();
    for (i, group) in program.groups.iter().enumerate() {
        let kind = match &group.key {
            GroupKey::Sentence(_) => "sentence",
            GroupKey::Slug(_) => "slug",
        };
        lines.push(format!("group {} {} {:?}", i + 1, kind, group.key.text()));
        for stmt in &group.statements {
            lines.push(format!(
                "  {} [line {}]",
                node_label(&stmt.statement),
                stmt.line
            ));
        }
    }
    if !program.trailing.is_empty() {
        lines.push("trailing".to_string());
        for stmt in &program.trailing {
            lines.push(format!(
                "  {} [line {}]",
                node_label(&stmt.statement),
                stmt.line
            ));
        }
    }
    for fault in &program.faults {
        lines.push(format!("fault {fault}"));
    }
    let mut out = lines.join("\n");
    if !out.is_empty() {
        out.push('\n');
    }
    out
}

fn node_label(statement: &Statement) -> String {
    let name = match statement {
        Statement::ScalarAssign { .. } => "scalar-assign",
        Statement::ListAppend { .. } => "list-append",
        Statement::MapAssign { .. } => "map-assign",
        Statement::AbstractCall { .. } => "abstract-call",
        Statement::Print(_) => "print",
        Statement::Pass => "pass",
    };
    format!("{name} {}", statement_source(statement))
}
