//! Built-in abstract function tables: the action vocabulary handed to the
//! model in the Abstract Functions style, with the effect each call has on
//! the world.

use std::collections::HashMap;

use super::{ArgValue, CallArg};

/// What an abstract function does when called.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum EffectRecipe {
    /// `go(character, destination)`: set the character's location.
    Go,
    /// `grab(character, object)`: the character becomes the object's carrier.
    Grab,
    /// `drop(character, object)`: clear the carrier and pin the object to the
    /// character's current location.
    Drop,
    /// `set_<attr>(character, value)`: append to the named list attribute.
    AppendAttr(String),
    /// `set_relation(character, relation, other_character)`: bind a relation.
    SetRelation,
}

#[derive(Debug, Clone)]
pub struct AbstractFunction {
    pub name: String,
    pub params: Vec<String>,
    /// Rendered body, one line per statement, as shown in prompts.
    pub body: Vec<String>,
    pub effect: EffectRecipe,
}

impl AbstractFunction {
    fn new(name: &str, params: &[&str], body: &[&str], effect: EffectRecipe) -> Self {
        AbstractFunction {
            name: name.to_string(),
            params: params.iter().map(|p| p.to_string()).collect(),
            body: body.iter().map(|b| b.to_string()).collect(),
            effect,
        }
    }

    /// Match call arguments to parameter slots: positionals in order, then
    /// keywords by name. Every slot must be filled exactly once.
    pub fn bind<'a>(&self, args: &'a [CallArg]) -> Result<Vec<&'a ArgValue>, String> {
        let mut slots: Vec<Option<&ArgValue>> = vec![None; self.params.len()];
        let mut next_positional = 0usize;
        for arg in args {
            match &arg.name {
                None => {
                    if next_positional >= self.params.len() {
                        return Err(format!(
                            "`{}` takes {} arguments, got more",
                            self.name,
                            self.params.len()
                        ));
                    }
                    slots[next_positional] = Some(&arg.value);
                    next_positional += 1;
                }
                Some(name) => {
                    let idx = self
                        .params
                        .iter()
                        .position(|p| p == name)
                        .ok_or_else(|| format!("`{}` has no parameter `{name}`", self.name))?;
                    if slots[idx].is_some() {
                        return Err(format!("parameter `{name}` bound twice"));
                    }
                    slots[idx] = Some(&arg.value);
                }
            }
        }
        slots
            .into_iter()
            .enumerate()
            .map(|(i, slot)| {
                slot.ok_or_else(|| format!("`{}` missing argument `{}`", self.name, self.params[i]))
            })
            .collect()
    }
}

/// The functions a prompt style may call, with lookup by name.
#[derive(Debug, Clone, Default)]
pub struct AbstractFunctionTable {
    functions: Vec<AbstractFunction>,
    by_name: HashMap<String, usize>,
}

impl AbstractFunctionTable {
    pub fn empty() -> Self {
        Self::default()
    }

    fn from_functions(functions: Vec<AbstractFunction>) -> Self {
        let by_name = functions
            .iter()
            .enumerate()
            .map(|(i, f)| (f.name.clone(), i))
            .collect();
        AbstractFunctionTable { functions, by_name }
    }

    /// Movement and carrying actions for bAbI Task 2.
    pub fn babi_task2() -> Self {
        Self::from_functions(vec![
            AbstractFunction::new(
                "go",
                &["character", "destination"],
                &["character.location = destination"],
                EffectRecipe::Go,
            ),
            AbstractFunction::new(
                "grab",
                &["character", "object"],
                &[
                    "object.carrier = character.name",
                    "character.inventory.append(object.name)",
                ],
                EffectRecipe::Grab,
            ),
            AbstractFunction::new(
                "drop",
                &["character", "object"],
                &[
                    "object.carrier = None",
                    "object.location = character.location",
                    "character.inventory.remove(object.name)",
                ],
                EffectRecipe::Drop,
            ),
        ])
    }

    /// Attribute setters for character tracking.
    pub fn re3_character() -> Self {
        let setter = |attr: &str| {
            AbstractFunction::new(
                &format!("set_{attr}"),
                &["character", attr],
                &[&format!("character.{attr}.append({attr})")],
                EffectRecipe::AppendAttr(attr.to_string()),
            )
        };
        Self::from_functions(vec![
            setter("appearance"),
            setter("occupation"),
            setter("gender"),
            setter("age"),
            AbstractFunction::new(
                "set_relation",
                &["character", "relation", "other_character"],
                &["character.relations[relation] = other_character.name"],
                EffectRecipe::SetRelation,
            ),
        ])
    }

    pub fn get(&self, name: &str) -> Option<&AbstractFunction> {
        self.by_name.get(name).map(|&i| &self.functions[i])
    }

    pub fn functions(&self) -> &[AbstractFunction] {
        &self.functions
    }
}
