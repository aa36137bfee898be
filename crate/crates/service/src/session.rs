//! One live game. All mutation goes through the engine; every commit
//! broadcasts the new log lines, then a state snapshot.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use aljabar_core::policy::{policy_by_name, seed_for, GreedyPolicy, Policy};
use aljabar_core::rules::{EngineError, GameConfig, GameEvent, Move};
use aljabar_core::sim::play_turn;
use aljabar_core::{Game, Multiset};
use serde::Deserialize;
use tokio::sync::broadcast;

use crate::error::ServiceError;
use crate::protocol::{
    to_value, EventPayload, GameOverPayload, Hints, Kind, MoveResult, Outgoing, SeatKind, SeatView, SessionSummary,
    StateView, SubmitRequest,
};

/// Name of the policy that moves for a human seat left disconnected.
pub const FALLBACK_POLICY: &str = "greedy";
const CHANNEL_CAPACITY: usize = 4096;

pub(crate) fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

/// Opening hands and Center given as palette codes.
#[derive(Clone, Debug, Deserialize)]
pub struct ScriptedDeal {
    pub hands: Vec<Vec<String>>,
    pub center: Vec<String>,
}

/// Who sits in a seat: `"human"` or a policy name.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SeatPlan {
    Human,
    Bot(String),
}

impl SeatPlan {
    pub fn parse(s: &str) -> SeatPlan {
        match s {
            "human" => SeatPlan::Human,
            other => SeatPlan::Bot(other.to_string()),
        }
    }
}

enum Seat {
    Human { token: String, connections: usize, fallback: bool },
    Bot { policy: Box<dyn Policy<u16>> },
}

impl Seat {
    fn view(&self) -> SeatView {
        match self {
            Seat::Human { connections, fallback, .. } => SeatView {
                kind: SeatKind::Human,
                policy: fallback.then(|| FALLBACK_POLICY.to_string()),
                connected: *connections > 0,
            },
            Seat::Bot { policy } => {
                SeatView { kind: SeatKind::Bot, policy: Some(policy.name().to_string()), connected: true }
            }
        }
    }
}

/// Whose credentials a token carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Access {
    Seat(usize),
    Spectator,
}

pub struct Session {
    id: String,
    state: Game,
    seats: Vec<Seat>,
    spectator_token: String,
    created_ms: u64,
    updated_ms: u64,
    seq: u64,
    published: usize,
    game_over_sent: bool,
    log_path: Option<PathBuf>,
    tx: broadcast::Sender<Arc<str>>,
}

/// Tokens handed out when a session is created.
#[derive(Clone, Debug)]
pub struct Credentials {
    /// One per seat; `None` for bots.
    pub seat_tokens: Vec<Option<String>>,
    pub spectator_token: String,
}

impl Session {
    pub(crate) fn create(
        id: String,
        config: GameConfig,
        plan: &[SeatPlan],
        deal: Option<&ScriptedDeal>,
        log_path: Option<PathBuf>,
    ) -> Result<(Session, Credentials), ServiceError> {
        if plan.len() != config.players() {
            return Err(ServiceError::BadRequest(format!(
                "seat plan has {} seats for {} players",
                plan.len(),
                config.players()
            )));
        }
        let seed = config.seed();
        let state = match deal {
            None => Game::new(config).map_err(|e| ServiceError::Config(e.to_string()))?,
            Some(deal) => {
                let palette = config.palette().clone();
                let hands = deal
                    .hands
                    .iter()
                    .map(|h| palette.parse_all::<u16, _>(h))
                    .collect::<Result<Vec<Multiset<u16>>, _>>()
                    .map_err(|e| ServiceError::BadRequest(e.to_string()))?;
                let center = palette.parse_all(&deal.center).map_err(|e| ServiceError::BadRequest(e.to_string()))?;
                Game::from_position(config, hands, center).map_err(|e| ServiceError::BadRequest(e.to_string()))?
            }
        };
        let mut seat_tokens = Vec::new();
        let mut seats = Vec::new();
        for (index, seat) in plan.iter().enumerate() {
            match seat {
                SeatPlan::Human => {
                    let token = new_token();
                    seat_tokens.push(Some(token.clone()));
                    seats.push(Seat::Human { token, connections: 0, fallback: false });
                }
                SeatPlan::Bot(name) => {
                    let policy = policy_by_name::<u16>(name, seed_for(seed, index))
                        .map_err(|e| ServiceError::BadRequest(e.to_string()))?;
                    seat_tokens.push(None);
                    seats.push(Seat::Bot { policy });
                }
            }
        }
        let spectator_token = new_token();
        let (tx, _) = broadcast::channel(CHANNEL_CAPACITY);
        let now = now_ms();
        let session = Session {
            id,
            state,
            seats,
            spectator_token: spectator_token.clone(),
            created_ms: now,
            updated_ms: now,
            seq: 0,
            published: 0,
            game_over_sent: false,
            log_path,
            tx,
        };
        Ok((session, Credentials { seat_tokens, spectator_token }))
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn state(&self) -> &Game {
        &self.state
    }

    /// Sequence number of the last broadcast.
    pub fn seq(&self) -> u64 {
        self.seq
    }

    pub fn subscribe(&self) -> broadcast::Receiver<Arc<str>> {
        self.tx.subscribe()
    }

    pub fn view(&self) -> StateView {
        StateView::of(&self.id, &self.state, self.seats.iter().map(Seat::view).collect())
    }

    pub fn summary(&self) -> SessionSummary {
        SessionSummary {
            id: self.id.clone(),
            config: self.state.config().summary(),
            seats: self.seats.iter().map(Seat::view).collect(),
            to_act: self.state.to_act(),
            turns_played: self.state.turns_played(),
            finished: self.state.is_finished(),
            created_ms: self.created_ms,
            updated_ms: self.updated_ms,
        }
    }

    /// Resolves a token; `None` means an anonymous spectator.
    pub fn access(&self, token: Option<&str>) -> Result<Access, ServiceError> {
        let Some(token) = token else { return Ok(Access::Spectator) };
        if token == self.spectator_token {
            return Ok(Access::Spectator);
        }
        self.seats
            .iter()
            .position(|s| matches!(s, Seat::Human { token: t, .. } if t == token))
            .map(Access::Seat)
            .ok_or(ServiceError::UnknownToken)
    }

    fn seat_of(&self, token: &str) -> Result<usize, ServiceError> {
        match self.access(Some(token))? {
            Access::Seat(seat) => Ok(seat),
            Access::Spectator => Err(ServiceError::NotASeat),
        }
    }

    fn acting_seat(&self, token: &str) -> Result<usize, ServiceError> {
        let seat = self.seat_of(token)?;
        if self.state.is_finished() {
            return Err(ServiceError::Finished);
        }
        if self.state.to_act() != seat {
            return Err(ServiceError::NotYourTurn { expected: self.state.to_act() });
        }
        Ok(seat)
    }

    pub fn connect(&mut self, seat: usize) {
        if let Seat::Human { connections, .. } = &mut self.seats[seat] {
            *connections += 1;
        }
    }

    pub fn disconnect(&mut self, seat: usize) {
        if let Seat::Human { connections, .. } = &mut self.seats[seat] {
            *connections = connections.saturating_sub(1);
        }
    }

    pub fn hints(&self, token: &str, limit: Option<usize>) -> Result<Hints, ServiceError> {
        let seat = self.seat_of(token)?;
        let your_turn = !self.state.is_finished() && self.state.to_act() == seat;
        if !your_turn {
            return Ok(Hints { moves: Vec::new(), your_turn, must_draw: false, may_announce: false });
        }
        let palette = self.state.config().palette();
        let moves = self.state.enumerate_moves(seat);
        let moves = moves.iter().take(limit.unwrap_or(usize::MAX)).map(|m| m.to_wire(palette)).collect();
        Ok(Hints {
            moves,
            your_turn,
            must_draw: self.state.is_stuck(seat),
            may_announce: self.state.can_announce(seat),
        })
    }

    /// Applies one request from the seat to act. A rejected request leaves
    /// the state and the sequence untouched.
    pub fn submit(&mut self, token: &str, request: &SubmitRequest) -> Result<MoveResult, ServiceError> {
        let seat = self.acting_seat(token)?;
        let palette = self.state.config().palette().clone();
        let drawn = match &request.mv {
            Some(wire) => {
                let mv = Move::from_wire(wire, &palette).map_err(|e| ServiceError::Rejected(e.to_string()))?;
                self.state.apply_move(seat, mv, request.pre_draws)?.drawn
            }
            None if request.pre_draws > 0 => self.state.draw(seat, request.pre_draws)?,
            None if self.state.is_stuck(seat) => self.state.resolve_stuck(seat)?,
            None => return Err(ServiceError::BadRequest("no move given".into())),
        };
        let result = MoveResult {
            ok: true,
            error: None,
            drawn: drawn.iter().map(|c| palette.code(c)).collect(),
            hand_size: self.state.hand(seat).len(),
        };
        self.commit();
        self.run_bots()?;
        Ok(result)
    }

    pub fn announce(&mut self, token: &str) -> Result<MoveResult, ServiceError> {
        let seat = self.acting_seat(token)?;
        self.state.announce_final(seat)?;
        self.commit();
        Ok(MoveResult { ok: true, error: None, drawn: Vec::new(), hand_size: self.state.hand(seat).len() })
    }

    /// Lets bots move until a human seat is to act or the game ends.
    pub fn run_bots(&mut self) -> Result<(), ServiceError> {
        while !self.state.is_finished() {
            let seat = self.state.to_act();
            let Seat::Bot { policy } = &mut self.seats[seat] else { break };
            let turn = self.state.turns_played() + 1;
            let result = play_turn(&mut self.state, policy.as_mut(), turn);
            self.commit();
            result.map_err(|e| ServiceError::Bot(e.to_string()))?;
        }
        Ok(())
    }

    /// The human seat the game waits on, if nobody is connected to it, with
    /// the log length that identifies the wait.
    pub fn idle_seat(&self) -> Option<(usize, usize)> {
        if self.state.is_finished() {
            return None;
        }
        let seat = self.state.to_act();
        match &self.seats[seat] {
            Seat::Human { connections: 0, .. } => Some((seat, self.state.log().len())),
            _ => None,
        }
    }

    /// Plays the fallback policy for an idle seat, if the game is still
    /// waiting exactly where it was when the timer started.
    pub fn fallback_turn(&mut self, seat: usize, log_len: usize) -> Result<bool, ServiceError> {
        if self.idle_seat() != Some((seat, log_len)) {
            return Ok(false);
        }
        if let Seat::Human { fallback, .. } = &mut self.seats[seat] {
            *fallback = true;
        }
        let turn = self.state.turns_played() + 1;
        let result = play_turn(&mut self.state, &mut GreedyPolicy, turn);
        self.commit();
        result.map_err(|e| ServiceError::Bot(e.to_string()))?;
        self.run_bots()?;
        Ok(true)
    }

    /// Broadcasts the state alone, for changes outside the game such as
    /// a seat connecting.
    pub(crate) fn refresh(&mut self) {
        self.updated_ms = now_ms();
        let view = to_value(self.view());
        self.broadcast(Kind::State, view);
    }

    fn broadcast(&mut self, kind: Kind, payload: serde_json::Value) {
        self.seq += 1;
        let msg = Outgoing { kind, seq: Some(self.seq), re: None, payload };
        // no receivers is fine
        let _ = self.tx.send(Arc::from(msg.to_text()));
    }

    /// Persists and broadcasts the log lines since the last commit, then
    /// the new state, then the result once the game ends.
    pub(crate) fn commit(&mut self) {
        let fresh: Vec<GameEvent> = self.state.log()[self.published..].to_vec();
        if fresh.is_empty() && self.seq > 0 {
            return;
        }
        self.persist(&fresh);
        for (offset, event) in fresh.into_iter().enumerate() {
            let index = self.published + offset;
            self.broadcast(Kind::Event, to_value(EventPayload { index, event }));
        }
        self.published = self.state.log().len();
        self.updated_ms = now_ms();
        let view = to_value(self.view());
        self.broadcast(Kind::State, view);
        if self.state.is_finished() && !self.game_over_sent {
            self.game_over_sent = true;
            let palette = self.state.config().palette();
            let payload = GameOverPayload {
                winners: self.state.winners().unwrap_or_default(),
                hand_sizes: self.state.hand_sizes(),
                hands: self.state.hands().iter().map(|h| palette.codes(h)).collect(),
            };
            self.broadcast(Kind::GameOver, to_value(payload));
        }
    }

    fn persist(&self, events: &[GameEvent]) {
        let Some(path) = &self.log_path else { return };
        let written = OpenOptions::new().create(true).append(true).open(path).and_then(|mut file| {
            let mut text = String::new();
            for event in events {
                text.push_str(&event.to_line());
                text.push('\n');
            }
            file.write_all(text.as_bytes())
        });
        if let Err(err) = written {
            tracing::error!(session = %self.id, path = %path.display(), "log write failed: {err}");
        }
    }
}

impl From<EngineError> for ServiceError {
    fn from(err: EngineError) -> Self {
        ServiceError::Rejected(err.to_string())
    }
}

fn new_token() -> String {
    uuid::Uuid::new_v4().simple().to_string()
}
