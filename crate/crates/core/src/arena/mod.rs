//! The abstraction parity game and a positional solver.

mod build;
mod game;
mod zielonka;

pub use build::{build_game, AbstractionGame, Vertex};
pub use game::{GameDump, ParityGame, Player, PositionalStrategy};
pub use zielonka::{solve, Solution};
