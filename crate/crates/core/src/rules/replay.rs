//! Rebuilds a game from its event log by re-driving the engine with the
//! logged actions and checking every derived event line for line.

use std::io::BufRead;

use thiserror::Error;

use super::config::{ConfigError, GameConfig};
use super::event::{read_log, DealMode, DrawReason, FinalCause, GameEvent, LogReadError};
use super::moves::Move;
use super::state::{EngineError, GameState};
use crate::group::{GroupError, Residue};
use crate::multiset::Multiset;

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error(transparent)]
    Read(#[from] LogReadError),
    #[error("line 1: log does not begin with a start event")]
    MissingStart,
    #[error("line 1: {0}")]
    Config(ConfigError),
    #[error("line {line}: {source}")]
    Code { line: usize, source: GroupError },
    #[error("line {line}: {source}")]
    Engine { line: usize, source: EngineError },
    #[error("line {line}: expected {expected}, found {found}")]
    Mismatch { line: usize, expected: String, found: String },
    #[error("line {line}: log ends before the game does")]
    Truncated { line: usize },
    #[error("line {line}: events after game over")]
    Trailing { line: usize },
}

/// Replays a complete game; the log must end with `game_over`.
pub fn replay<R: Residue>(events: &[GameEvent]) -> Result<GameState<R>, ReplayError> {
    let state = replay_partial(events)?;
    if !state.is_finished() {
        return Err(ReplayError::Truncated { line: events.len() + 1 });
    }
    Ok(state)
}

pub fn replay_reader<R: Residue, B: BufRead>(input: B) -> Result<GameState<R>, ReplayError> {
    replay(&read_log(input)?)
}

/// Replays a possibly unfinished game, e.g. a live session's log.
pub fn replay_partial<R: Residue>(events: &[GameEvent]) -> Result<GameState<R>, ReplayError> {
    let Some(GameEvent::Start { config, deal }) = events.first() else {
        return Err(ReplayError::MissingStart);
    };
    let config = GameConfig::from_summary(*config).map_err(ReplayError::Config)?;
    let mut state = match deal {
        DealMode::Seeded => GameState::new(config).map_err(|source| ReplayError::Engine { line: 1, source })?,
        DealMode::Scripted => scripted_start(config, events)?,
    };
    compare(&state, events, 0)?;

    while state.log().len() < events.len() {
        let at = state.log().len();
        let line = at + 1;
        if state.is_finished() {
            return Err(ReplayError::Trailing { line });
        }
        let palette = state.config().palette().clone();
        let parse = |codes: &[String]| -> Result<Multiset<R>, ReplayError> {
            palette.parse_all(codes).map_err(|source| ReplayError::Code { line, source })
        };
        let result = match &events[at] {
            GameEvent::Announce { player, cause: FinalCause::Declared, .. } => state.announce_final(*player).map(drop),
            GameEvent::Draw { player, reason: DrawReason::Voluntary, .. } => state.draw(*player, 1).map(drop),
            GameEvent::Draw { player, reason: DrawReason::Stuck, .. } => state.resolve_stuck(*player).map(drop),
            GameEvent::Exchange { player, give, take } => {
                let mv = Move::exchange(parse(give)?, parse(take)?);
                state.apply_move(*player, mv, 0).map(drop)
            }
            GameEvent::Spectrum { player, .. } => state.apply_move(*player, Move::Spectrum, 0).map(drop),
            GameEvent::Pass { player } => state.apply_move(*player, Move::Pass, 0).map(drop),
            other => {
                return Err(ReplayError::Mismatch {
                    line,
                    expected: "a player action".into(),
                    found: other.to_line(),
                })
            }
        };
        result.map_err(|source| ReplayError::Engine { line, source })?;
        compare(&state, events, at)?;
    }
    Ok(state)
}

fn scripted_start<R: Residue>(config: GameConfig, events: &[GameEvent]) -> Result<GameState<R>, ReplayError> {
    let players = config.players();
    let palette = config.palette().clone();
    let mut hands = Vec::with_capacity(players);
    for player in 0..players {
        let line = player + 2;
        match events.get(line - 1) {
            Some(GameEvent::Deal { player: p, pieces, .. }) if *p == player => {
                hands.push(palette.parse_all(pieces).map_err(|source| ReplayError::Code { line, source })?)
            }
            Some(other) => {
                return Err(ReplayError::Mismatch { line, expected: format!("deal for player {player}"), found: other.to_line() })
            }
            None => return Err(ReplayError::Truncated { line }),
        }
    }
    let line = players + 2;
    let center = match events.get(line - 1) {
        Some(GameEvent::CenterInit { pieces, .. }) => {
            palette.parse_all(pieces).map_err(|source| ReplayError::Code { line, source })?
        }
        Some(other) => {
            return Err(ReplayError::Mismatch { line, expected: "center_init".into(), found: other.to_line() })
        }
        None => return Err(ReplayError::Truncated { line }),
    };
    GameState::from_position(config, hands, center).map_err(|source| ReplayError::Engine { line, source })
}

/// Checks the engine's log against the file from index `from` on.
fn compare<R: Residue>(state: &GameState<R>, events: &[GameEvent], from: usize) -> Result<(), ReplayError> {
    let produced = state.log();
    for (i, want) in produced.iter().enumerate().skip(from) {
        match events.get(i) {
            None => return Err(ReplayError::Truncated { line: i + 1 }),
            Some(e) if e != want => {
                return Err(ReplayError::Mismatch { line: i + 1, expected: want.to_line(), found: e.to_line() })
            }
            Some(_) => {}
        }
    }
    Ok(())
}
