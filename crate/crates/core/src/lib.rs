//! Core building blocks for layered agent-based simulation.
//!
//! A model is a stack of layers, each holding streams that read and write a
//! shared [`kernel::Context`]. The same model can be run forward
//! ([`kernel::run_episode`]), searched over ([`evolution`]), or compared
//! across scenarios ([`game`]).

pub mod evolution;
pub mod game;
pub mod kernel;
pub mod policy;
pub mod rng;
pub mod schemas;

pub use rng::{rng_substream, RngHandle};
