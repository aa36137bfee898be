//! Registry of live sessions. Each session is a mutex-guarded single
//! writer; the registry itself is only locked to add or look up entries.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::{Arc, Mutex, MutexGuard, RwLock, Weak};
use std::time::Duration;

use aljabar_core::rules::{GameConfig, STANDARD_COPIES};
use aljabar_core::GroupParams;
use serde::{Deserialize, Serialize};

use crate::error::ServiceError;
use crate::protocol::{Hints, MoveResult, SessionSummary, StateView, SubmitRequest};
use crate::session::{ScriptedDeal, SeatPlan, Session};

pub type SessionHandle = Arc<Mutex<Session>>;

/// Parameters used when a create request leaves them out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Defaults {
    pub m: u32,
    pub n: u32,
    pub copies: u32,
    pub players: usize,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults { m: 2, n: 3, copies: STANDARD_COPIES, players: 2 }
    }
}

#[derive(Clone, Debug)]
pub struct ServiceConfig {
    pub defaults: Defaults,
    /// One `<session>.jsonl` per session when set.
    pub log_dir: Option<PathBuf>,
    /// How long a disconnected human seat may hold up play; `None` waits
    /// forever.
    pub fallback_after: Option<Duration>,
    /// Player limit for non-standard groups.
    pub max_players: usize,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            defaults: Defaults::default(),
            log_dir: None,
            fallback_after: Some(Duration::from_secs(60)),
            max_players: 8,
        }
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
pub struct CreateRequest {
    pub m: Option<u32>,
    pub n: Option<u32>,
    #[serde(alias = "A")]
    pub copies: Option<u32>,
    pub players: Option<usize>,
    pub seed: Option<u64>,
    /// `"human"` or a policy name per seat; all human when absent.
    pub seats: Option<Vec<String>>,
    pub deal: Option<ScriptedDeal>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CreateResponse {
    pub id: String,
    /// One per seat, `null` for bots.
    pub seat_tokens: Vec<Option<String>>,
    pub spectator_token: String,
    pub state: StateView,
}

struct Inner {
    config: ServiceConfig,
    sessions: RwLock<BTreeMap<String, SessionHandle>>,
}

#[derive(Clone)]
pub struct SessionManager {
    inner: Arc<Inner>,
}

pub(crate) fn lock(handle: &SessionHandle) -> MutexGuard<'_, Session> {
    handle.lock().unwrap_or_else(|poisoned| poisoned.into_inner())
}

impl SessionManager {
    pub fn new(config: ServiceConfig) -> Self {
        SessionManager { inner: Arc::new(Inner { config, sessions: RwLock::new(BTreeMap::new()) }) }
    }

    pub fn config(&self) -> &ServiceConfig {
        &self.inner.config
    }

    fn game_config(&self, req: &CreateRequest) -> Result<GameConfig, ServiceError> {
        let d = self.inner.config.defaults;
        let params = GroupParams::new(req.m.unwrap_or(d.m), req.n.unwrap_or(d.n))
            .map_err(|e| ServiceError::Config(e.to_string()))?;
        let players = req.players.or(req.seats.as_ref().map(Vec::len)).unwrap_or(d.players);
        if params != GroupParams::STANDARD && players > self.inner.config.max_players {
            return Err(ServiceError::Config(format!(
                "at most {} players, got {players}",
                self.inner.config.max_players
            )));
        }
        let copies = req.copies.unwrap_or(d.copies);
        let seed = req.seed.unwrap_or_else(|| uuid::Uuid::new_v4().as_u64_pair().0);
        GameConfig::new(params, players, copies, seed).map_err(|e| ServiceError::Config(e.to_string()))
    }

    /// Creates and starts a session; bots to act first move immediately.
    pub fn create(&self, req: CreateRequest) -> Result<CreateResponse, ServiceError> {
        let config = self.game_config(&req)?;
        let plan: Vec<SeatPlan> = match &req.seats {
            Some(seats) => seats.iter().map(|s| SeatPlan::parse(s)).collect(),
            None => vec![SeatPlan::Human; config.players()],
        };
        let id = uuid::Uuid::new_v4().simple().to_string()[..12].to_string();
        let log_path = match &self.inner.config.log_dir {
            Some(dir) => {
                std::fs::create_dir_all(dir).map_err(|e| ServiceError::Config(format!("{}: {e}", dir.display())))?;
                Some(dir.join(format!("{id}.jsonl")))
            }
            None => None,
        };
        let (mut session, credentials) = Session::create(id.clone(), config, &plan, req.deal.as_ref(), log_path)?;
        session.commit();
        session.run_bots()?;
        let state = session.view();
        let handle = Arc::new(Mutex::new(session));
        self.inner.sessions.write().unwrap_or_else(|p| p.into_inner()).insert(id.clone(), handle.clone());
        self.schedule_fallback(&handle);
        tracing::info!(session = %id, "session created");
        Ok(CreateResponse {
            id,
            seat_tokens: credentials.seat_tokens,
            spectator_token: credentials.spectator_token,
            state,
        })
    }

    pub fn get(&self, id: &str) -> Result<SessionHandle, ServiceError> {
        let sessions = self.inner.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.get(id).cloned().ok_or_else(|| ServiceError::UnknownSession(id.to_string()))
    }

    pub fn list(&self) -> Vec<SessionSummary> {
        let sessions = self.inner.sessions.read().unwrap_or_else(|p| p.into_inner());
        sessions.values().map(|h| lock(h).summary()).collect()
    }

    pub fn state(&self, id: &str) -> Result<StateView, ServiceError> {
        Ok(lock(&self.get(id)?).view())
    }

    pub fn submit(&self, id: &str, token: &str, req: &SubmitRequest) -> Result<MoveResult, ServiceError> {
        let handle = self.get(id)?;
        let result = lock(&handle).submit(token, req);
        self.schedule_fallback(&handle);
        result
    }

    pub fn announce(&self, id: &str, token: &str) -> Result<MoveResult, ServiceError> {
        let handle = self.get(id)?;
        let result = lock(&handle).announce(token);
        self.schedule_fallback(&handle);
        result
    }

    pub fn hints(&self, id: &str, token: &str, limit: Option<usize>) -> Result<Hints, ServiceError> {
        lock(&self.get(id)?).hints(token, limit)
    }

    pub fn connect(&self, handle: &SessionHandle, seat: usize) {
        let mut session = lock(handle);
        session.connect(seat);
        session.refresh();
    }

    pub fn disconnect(&self, handle: &SessionHandle, seat: usize) {
        {
            let mut session = lock(handle);
            session.disconnect(seat);
            session.refresh();
        }
        self.schedule_fallback(handle);
    }

    /// Starts the fallback timer if the game waits on a human seat nobody
    /// is connected to. A timer whose wait has ended does nothing.
    pub fn schedule_fallback(&self, handle: &SessionHandle) {
        let Some(after) = self.inner.config.fallback_after else { return };
        let Some((seat, log_len)) = lock(handle).idle_seat() else { return };
        let Ok(runtime) = tokio::runtime::Handle::try_current() else { return };
        let weak: Weak<Mutex<Session>> = Arc::downgrade(handle);
        let manager = self.clone();
        runtime.spawn(async move {
            tokio::time::sleep(after).await;
            let Some(handle) = weak.upgrade() else { return };
            let played = {
                let mut session = lock(&handle);
                match session.fallback_turn(seat, log_len) {
                    Ok(played) => played,
                    Err(err) => {
                        tracing::error!(session = %session.id(), "fallback move failed: {err}");
                        false
                    }
                }
            };
            if played {
                manager.schedule_fallback(&handle);
            }
        });
    }
}
