//! The rules of play: setup, turn structure, move legality, cancellation,
//! draw obligations, final-round signaling and scoring, for any (Z_m)^n.

mod config;
mod event;
mod moves;
mod replay;
mod rng;
mod state;

pub use config::{deal_size, ConfigError, ConfigSummary, GameConfig, PoolSpec, STANDARD_COPIES, STANDARD_PLAYERS};
pub use event::{read_log, write_log, BlackSource, DealMode, DrawReason, FinalCause, GameEvent, LogReadError};
pub use moves::{has_play, legal_plays, spectrum_set, Move, Rejection, WireMove};
pub use replay::{replay, replay_partial, replay_reader, ReplayError};
pub use rng::{mix_seed, GameRng};
pub use state::{
    process_cancellations, winners_of, Cancellations, EngineError, FinalTrigger, GameState, InvariantViolation,
    TurnOutcome,
};
