//! corrpus: neurosymbolic story understanding.
//!
//! The pipeline renders code-style prompts from stories, obtains update
//! programs from a completion backend, interprets them in a sandboxed
//! dialect against a symbolic world model, and evaluates the results on
//! two harnesses: bAbI Task 2 question answering and Re3 story
//! inconsistency detection.
//!
//! Modules, roughly bottom-up:
//!
//! - [`world`]: entity schemas and the deterministic world state W_i.
//! - [`dsl`]: the restricted update dialect (parse, evaluate, print).
//! - [`prompt`]: byte-exact prompt rendering and completion slicing.
//! - [`gateway`]: completion backends (live HTTP, replay cassette, mocks)
//!   and the entailment-scoring client.
//! - [`babi`]: dataset parsing, the symbolic oracle solver, synthetic story
//!   generation, and the accuracy harness.
//! - [`re3`]: attribute extraction, majority voting, entailment-based
//!   contradiction detection, and the ROC-AUC harness.
//! - [`metrics`]: ranking metrics, generic over the float type.

pub mod babi;
pub mod dsl;
pub mod fault;
pub mod gateway;
pub mod metrics;
pub mod prompt;
pub mod re3;
pub mod world;

/// The score scalar used throughout the harnesses.
pub type Score = f64;
