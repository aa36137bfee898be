use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::config::ConfigSummary;

/// How the opening hands were produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DealMode {
    /// Drawn from the seeded generator.
    Seeded,
    /// Supplied explicitly; the generator is used only for later draws.
    Scripted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DrawReason {
    /// Chosen by the player before their move.
    Voluntary,
    /// Compelled: more than n pieces and no legal move.
    Stuck,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FinalCause {
    /// The player's hand was down to one piece after their turn.
    OnePiece,
    /// The player, holding at most n pieces, declared the final round.
    Declared,
    /// No legal move, more than n pieces, and nothing left to draw.
    BagExhausted,
    /// The same position arose for the third time.
    Repetition,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlackSource {
    Center,
    Supply,
}

/// One line of the JSON-lines game log. Colors are palette codes; multisets
/// are code arrays in canonical order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameEvent {
    Start {
        #[serde(flatten)]
        config: ConfigSummary,
        deal: DealMode,
    },
    Deal {
        player: usize,
        pieces: Vec<String>,
        /// Bag indices drawn, in order; absent for scripted deals.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        draws: Option<Vec<u64>>,
    },
    CenterInit {
        pieces: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        draw: Option<u64>,
    },
    Announce {
        player: usize,
        cause: FinalCause,
        round: u32,
    },
    Draw {
        player: usize,
        piece: String,
        index: u64,
        reason: DrawReason,
    },
    Exchange {
        player: usize,
        give: Vec<String>,
        take: Vec<String>,
    },
    Spectrum {
        player: usize,
        give: Vec<String>,
        black_from: BlackSource,
    },
    Pass {
        player: usize,
    },
    Cancel {
        color: String,
        tuples: usize,
        exempt: bool,
    },
    ForcedDraw {
        player: usize,
        count: usize,
    },
    GameOver {
        winners: Vec<usize>,
        hand_sizes: Vec<usize>,
    },
}

impl GameEvent {
    pub fn to_line(&self) -> String {
        serde_json::to_string(self).expect("events always serialize")
    }

    /// Acting player, if the event belongs to one.
    pub fn actor(&self) -> Option<usize> {
        match self {
            GameEvent::Announce { player, .. }
            | GameEvent::Draw { player, .. }
            | GameEvent::Exchange { player, .. }
            | GameEvent::Spectrum { player, .. }
            | GameEvent::Pass { player } => Some(*player),
            _ => None,
        }
    }
}

/// Writes one event per line.
pub fn write_log<W: Write>(events: &[GameEvent], mut out: W) -> io::Result<()> {
    for e in events {
        writeln!(out, "{}", e.to_line())?;
    }
    out.flush()
}

#[derive(Debug, thiserror::Error)]
pub enum LogReadError {
    #[error("line {line}: {source}")]
    Parse { line: usize, source: serde_json::Error },
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses a JSON-lines log; blank lines are skipped, line numbers are
/// 1-based.
pub fn read_log<B: BufRead>(input: B) -> Result<Vec<GameEvent>, LogReadError> {
    let mut events = Vec::new();
    for (i, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let event = serde_json::from_str(&line).map_err(|source| LogReadError::Parse { line: i + 1, source })?;
        events.push(event);
    }
    Ok(events)
}
