//! Seeded synthetic Task 2 stories in the upstream line format.
//!
//! The generator runs its own tiny simulation (independent of both the world
//! model and the oracle) so that generated answers give the oracle something
//! real to agree with. Questions are only asked about objects whose location
//! is determined.

use std::collections::{HashMap, HashSet};

#[cfg(test)]
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::BabiSample;

const CHARACTERS: [&str; 4] = ["Mary", "John", "Sandra", "Daniel"];
const OBJECTS: [&str; 3] = ["football", "milk", "apple"];
const ROOMS: [&str; 6] = ["bathroom", "bedroom", "kitchen", "garden", "hallway", "office"];

const MOVE_VERBS: [&str; 4] = ["moved", "went", "journeyed", "travelled"];
const BACK_VERBS: [&str; 2] = ["went", "moved"];
const TAKE_VERBS: [&str; 4] = ["took", "got", "grabbed", "picked up"];
const DROP_VERBS: [&str; 4] = ["dropped", "discarded", "left", "put down"];

/// How many characters and objects a generated story draws on.
#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub characters: usize,
    pub objects: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            characters: 4,
            objects: 3,
        }
    }
}

struct Sim {
    characters: Vec<String>,
    objects: Vec<String>,
    char_room: HashMap<String, String>,
    obj_carrier: HashMap<String, String>,
    obj_room: HashMap<String, String>,
    visited: HashMap<String, HashSet<String>>,
    lines: Vec<(u32, String)>,
    next_id: u32,
    take_line: HashMap<String, u32>,
    last_move_line: HashMap<String, u32>,
    /// (drop line, mover's last movement line at drop time) per dropped object.
    drop_support: HashMap<String, (u32, u32)>,
    /// Who acted on the previous line, if it was a movement.
    last_mover: Option<String>,
}

impl Sim {
    fn new(config: SynthConfig) -> Sim {
        let characters = CHARACTERS
            .iter()
            .take(config.characters.clamp(1, CHARACTERS.len()))
            .map(|s| s.to_string())
            .collect();
        let objects = OBJECTS
            .iter()
            .take(config.objects.clamp(1, OBJECTS.len()))
            .map(|s| s.to_string())
            .collect();
        Sim {
            characters,
            objects,
            char_room: HashMap::new(),
            obj_carrier: HashMap::new(),
            obj_room: HashMap::new(),
            visited: HashMap::new(),
            lines: Vec::new(),
            next_id: 1,
            take_line: HashMap::new(),
            last_move_line: HashMap::new(),
            drop_support: HashMap::new(),
            last_mover: None,
        }
    }

    fn push_line(&mut self, text: String) -> u32 {
        let id = self.next_id;
        self.lines.push((id, text));
        self.next_id += 1;
        id
    }

    /// Statement ids consumed by questions too; the caller bumps.
    fn reserve_question_id(&mut self) -> u32 {
        let id = self.next_id;
        self.next_id += 1;
        id
    }

    fn act(&mut self, rng: &mut ChaCha8Rng) {
        let located: Vec<String> = self
            .characters
            .iter()
            .filter(|c| self.char_room.contains_key(*c))
            .cloned()
            .collect();
        let free_objects: Vec<String> = self
            .objects
            .iter()
            .filter(|o| !self.obj_carrier.contains_key(*o))
            .cloned()
            .collect();
        let carried: Vec<String> = self
            .objects
            .iter()
            .filter(|o| self.obj_carrier.contains_key(*o))
            .cloned()
            .collect();

        let can_take = !located.is_empty() && !free_objects.is_empty();
        let can_drop = !carried.is_empty();
        let roll: f64 = rng.gen();
        if can_take && roll < 0.25 {
            let actor = located.choose(rng).unwrap().clone();
            let object = free_objects.choose(rng).unwrap().clone();
            let verb = TAKE_VERBS.choose(rng).unwrap();
            let there = self.last_mover.as_deref() == Some(actor.as_str()) && rng.gen_bool(0.5);
            let suffix = if there { " there" } else { "" };
            let id = self.push_line(format!("{actor} {verb} the {object}{suffix}."));
            self.obj_carrier.insert(object.clone(), actor);
            self.obj_room.remove(&object);
            self.take_line.insert(object, id);
            self.last_mover = None;
        } else if can_drop && roll < 0.5 {
            let object = carried.choose(rng).unwrap().clone();
            let actor = self.obj_carrier[&object].clone();
            let verb = DROP_VERBS.choose(rng).unwrap();
            let id = self.push_line(format!("{actor} {verb} the {object}."));
            self.obj_carrier.remove(&object);
            if let Some(room) = self.char_room.get(&actor) {
                self.obj_room.insert(object.clone(), room.clone());
            }
            if let Some(&move_id) = self.last_move_line.get(&actor) {
                self.drop_support.insert(object, (id, move_id));
            }
            self.last_mover = None;
        } else {
            let actor = self.characters.choose(rng).unwrap().clone();
            let current = self.char_room.get(&actor).cloned();
            let room = loop {
                let candidate = ROOMS.choose(rng).unwrap().to_string();
                if Some(&candidate) != current.as_ref() {
                    break candidate;
                }
            };
            let been_there = self
                .visited
                .get(&actor)
                .map(|rooms| rooms.contains(&room))
                .unwrap_or(false);
            let text = if been_there {
                let verb = BACK_VERBS.choose(rng).unwrap();
                format!("{actor} {verb} back to the {room}.")
            } else {
                let verb = MOVE_VERBS.choose(rng).unwrap();
                format!("{actor} {verb} to the {room}.")
            };
            let id = self.push_line(text);
            self.visited
                .entry(actor.clone())
                .or_default()
                .insert(room.clone());
            self.char_room.insert(actor.clone(), room);
            self.last_move_line.insert(actor.clone(), id);
            self.last_mover = Some(actor);
        }
    }

    /// Objects whose location the story determines right now.
    fn answerable(&self) -> Vec<String> {
        self.objects
            .iter()
            .filter(|o| match self.obj_carrier.get(*o) {
                Some(carrier) => self.char_room.contains_key(carrier),
                None => self.obj_room.contains_key(*o),
            })
            .cloned()
            .collect()
    }

    /// Ask about one determinable object; returns the full question line.
    fn question(&mut self, rng: &mut ChaCha8Rng) -> Option<(u32, String, String, Vec<u32>)> {
        let candidates = self.answerable();
        let object = candidates.choose(rng)?.clone();
        let (answer, mut support) = match self.obj_carrier.get(&object) {
            Some(carrier) => {
                let answer = self.char_room[carrier].clone();
                let take = self.take_line[&object];
                let moved = self.last_move_line[carrier];
                (answer, vec![take, moved])
            }
            None => {
                let answer = self.obj_room[&object].clone();
                match self.drop_support.get(&object) {
                    Some(&(drop, moved)) => (answer, vec![drop, moved]),
                    None => return None,
                }
            }
        };
        support.sort_unstable();
        support.dedup();
        let id = self.reserve_question_id();
        Some((id, format!("Where is the {object}?"), answer, support))
    }
}

/// One deterministic synthetic sample: `length` actions, then a question
/// about a determinable object. Regenerates (still seed-deterministic) when a
/// walk ends with nothing answerable.
pub fn generate_synthetic(seed: u64, length: usize, config: SynthConfig) -> BabiSample {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let mut sim = Sim::new(config);
        for _ in 0..length.max(1) {
            sim.act(&mut rng);
        }
        if let Some((_, question, answer, supporting)) = sim.question(&mut rng) {
            return BabiSample {
                story: sim.lines,
                question,
                answer,
                supporting,
            };
        }
    }
}

/// A full dataset file in the upstream format: stories with one to three
/// questions each, ids continuing across questions within a story, exactly
/// `questions` question lines in total.
pub fn generate_dataset(seed: u64, questions: usize, config: SynthConfig) -> String {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = String::new();
    let mut emitted = 0usize;

    while emitted < questions {
        let mut sim = Sim::new(config);
        let block_questions = (rng.gen_range(1..=3usize)).min(questions - emitted);
        let mut block = String::new();
        let mut produced = 0usize;
        let mut consumed = 0usize;
        while produced < block_questions {
            let segment = rng.gen_range(2..=7usize);
            for _ in 0..segment {
                sim.act(&mut rng);
            }
            for (id, text) in &sim.lines[consumed..] {
                block.push_str(&format!("{id} {text}\n"));
            }
            consumed = sim.lines.len();
            if let Some((id, question, answer, support)) = sim.question(&mut rng) {
                let ids: Vec<String> = support.iter().map(|s| s.to_string()).collect();
                block.push_str(&format!("{id} {question}\t{answer}\t{}\n", ids.join(" ")));
                produced += 1;
            } else if sim.lines.len() > 60 {
                break; // degenerate walk, start a fresh story
            }
        }
        if produced > 0 {
            out.push_str(&block);
            emitted += produced;
        }
    }
    out
}

/// Deterministic shuffle helper for order-invariance tests.
#[cfg(test)]
pub fn shuffled_indices(n: usize, seed: u64) -> Vec<usize> {
    let mut indices: Vec<usize> = (0..n).collect();
    let mut rng = StdRng::seed_from_u64(seed);
    indices.shuffle(&mut rng);
    indices
}
