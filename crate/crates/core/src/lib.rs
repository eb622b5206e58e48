//! Pre-flop choice extraction and random-utility risk estimation for poker
//! hand histories.

pub mod analysis;
pub mod cards;
pub mod choice;
pub mod error;
pub mod hand_history;
pub mod io;
pub mod outcome;
pub mod pipeline;
pub mod rng;
pub mod rum;
pub mod synthetic;

pub use error::{Error, ErrorKind, Result};
