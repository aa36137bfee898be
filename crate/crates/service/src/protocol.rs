//! Wire format. Every WebSocket text frame carries one JSON object:
//!
//! ```json
//! {"kind": "state", "seq": 7, "payload": {...}}
//! ```
//!
//! Broadcasts (`event`, `state`, `game_over`) carry the session's sequence
//! number, which increases by exactly one per broadcast. Direct replies carry
//! `"seq": null` and echo the request's `id`, if any, as `re`.

use aljabar_core::rules::{ConfigSummary, FinalTrigger, GameEvent, WireMove};
use aljabar_core::palette::PaletteDescription;
use aljabar_core::Game;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub const PROTOCOL_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Kind {
    Hello,
    Join,
    State,
    LegalMoves,
    SubmitMove,
    MoveResult,
    AnnounceFinal,
    Event,
    Error,
    GameOver,
}

/// Server-to-client message.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Outgoing {
    pub kind: Kind,
    pub seq: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub re: Option<Value>,
    pub payload: Value,
}

impl Outgoing {
    pub fn reply(kind: Kind, re: Option<Value>, payload: impl Serialize) -> Self {
        Outgoing { kind, seq: None, re, payload: to_value(payload) }
    }

    pub fn error(re: Option<Value>, message: impl Into<String>) -> Self {
        Self::reply(Kind::Error, re, ErrorPayload { message: message.into() })
    }

    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("messages always serialize")
    }
}

pub(crate) fn to_value(payload: impl Serialize) -> Value {
    serde_json::to_value(payload).expect("payloads always serialize")
}

/// Client-to-server message. The payload is decoded per kind.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Incoming {
    pub kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<Value>,
    #[serde(default)]
    pub payload: Value,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct JoinRequest {
    pub session: String,
    /// A seat token, the spectator token, or nothing to watch.
    #[serde(default)]
    pub token: Option<String>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct HintRequest {
    #[serde(default)]
    pub limit: Option<usize>,
}

/// `move` absent: with `pre_draws > 0` the player draws and keeps the turn;
/// with `pre_draws == 0` a stuck player draws until a move exists.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct SubmitRequest {
    #[serde(default)]
    pub pre_draws: usize,
    #[serde(default, rename = "move")]
    pub mv: Option<WireMove>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct HelloPayload {
    pub server: &'static str,
    pub protocol: u32,
    pub sessions: Vec<SessionSummary>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Player,
    Spectator,
}

#[derive(Clone, Debug, Serialize)]
pub struct JoinPayload {
    pub session: String,
    pub role: Role,
    pub seat: Option<usize>,
    /// Sequence number of the last broadcast; the next one is `seq + 1`.
    pub seq: u64,
    pub palette: PaletteDescription,
    pub state: StateView,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct Hints {
    pub moves: Vec<WireMove>,
    pub your_turn: bool,
    /// More than n pieces and nothing playable: submit with no move.
    pub must_draw: bool,
    pub may_announce: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MoveResult {
    pub ok: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    /// Pieces the player drew during this request.
    #[serde(default)]
    pub drawn: Vec<String>,
    pub hand_size: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum SeatKind {
    Human,
    Bot,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SeatView {
    pub kind: SeatKind,
    /// Bot policy, or the fallback policy once a human seat timed out.
    pub policy: Option<String>,
    pub connected: bool,
}

/// Everything public about a game. Hands are visible to all.
#[derive(Clone, Debug, Serialize)]
pub struct StateView {
    pub session: String,
    pub config: ConfigSummary,
    pub hands: Vec<Vec<String>>,
    pub hand_sizes: Vec<usize>,
    pub center: Vec<String>,
    pub center_sum: String,
    pub bag_count: usize,
    pub to_act: usize,
    pub round: u32,
    pub first_player: usize,
    pub turns_played: u64,
    pub final_round: Option<u32>,
    pub final_trigger: Option<FinalTrigger>,
    pub finished: bool,
    pub winners: Option<Vec<usize>>,
    pub seats: Vec<SeatView>,
    pub log_len: usize,
}

impl StateView {
    pub fn of(session: &str, state: &Game, seats: Vec<SeatView>) -> Self {
        let palette = state.config().palette();
        StateView {
            session: session.to_string(),
            config: state.config().summary(),
            hands: state.hands().iter().map(|h| palette.codes(h)).collect(),
            hand_sizes: state.hand_sizes(),
            center: palette.codes(state.center()),
            center_sum: palette.code(state.center_sum()),
            bag_count: state.bag().len(),
            to_act: state.to_act(),
            round: state.round(),
            first_player: state.first_player(),
            turns_played: state.turns_played(),
            final_round: state.final_round(),
            final_trigger: state.final_trigger(),
            finished: state.is_finished(),
            winners: state.winners().ok(),
            seats,
            log_len: state.log().len(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GameOverPayload {
    pub winners: Vec<usize>,
    pub hand_sizes: Vec<usize>,
    pub hands: Vec<Vec<String>>,
}

/// Payload of an `event` broadcast: the log line and its index.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct EventPayload {
    pub index: usize,
    pub event: GameEvent,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SessionSummary {
    pub id: String,
    pub config: ConfigSummary,
    pub seats: Vec<SeatView>,
    pub to_act: usize,
    pub turns_played: u64,
    pub finished: bool,
    pub created_ms: u64,
    pub updated_ms: u64,
}
