//! Game engine for exchange games over the group (Z_m)^n: group arithmetic,
//! palettes, the rules of play, reference policies and simulation.

pub mod group;
pub mod multiset;
pub mod palette;
pub mod policy;
pub mod reduce;
pub mod rules;
pub mod sim;
pub mod verify;

pub use group::{ColorVector, GroupError, GroupParams, Residue};
pub use multiset::Multiset;
pub use palette::Palette;
pub use rules::{GameConfig, GameEvent, GameState, Move};

/// A color of any group up to the engine's size limit.
pub type Color = ColorVector<u16>;
pub type Pieces = Multiset<u16>;
pub type Game = GameState<u16>;
pub type GameMove = Move<u16>;
