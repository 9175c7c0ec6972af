//! A deterministic farming, crafting and social simulator with an agent
//! evaluation harness on top.

pub mod content;
pub mod env;
pub mod evaluator;
pub mod harness;
pub mod mechanics;
pub mod observation;
pub mod protocol;
pub mod tasks;
pub mod world;
