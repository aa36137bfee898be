//! HTTP routes and the WebSocket endpoint.

use std::io;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::Arc;

use aljabar_core::rules::write_log;
use aljabar_core::{GroupParams, Palette};
use axum::body::Bytes;
use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::{Path, Query, State};
use axum::http::{header, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::broadcast;
use tower_http::services::ServeDir;

use crate::error::ServiceError;
use crate::manager::{lock, CreateRequest, SessionHandle, SessionManager};
use crate::protocol::{
    HelloPayload, HintRequest, Incoming, JoinPayload, JoinRequest, Kind, MoveResult, Outgoing, Role, SubmitRequest,
    PROTOCOL_VERSION,
};
use crate::session::Access;

impl IntoResponse for ServiceError {
    fn into_response(self) -> Response {
        let status = match self {
            ServiceError::UnknownSession(_) => StatusCode::NOT_FOUND,
            ServiceError::UnknownToken | ServiceError::NotASeat => StatusCode::FORBIDDEN,
            ServiceError::Bot(_) => StatusCode::INTERNAL_SERVER_ERROR,
            _ => StatusCode::BAD_REQUEST,
        };
        (status, Json(json!({ "error": self.to_string() }))).into_response()
    }
}

/// All routes. Files under `static_dir`, if given, are served for any
/// other path.
pub fn router(manager: SessionManager, static_dir: Option<PathBuf>) -> Router {
    let app = Router::new()
        .route("/api/sessions", post(create_session).get(list_sessions))
        .route("/api/sessions/{id}/state", get(session_state))
        .route("/api/sessions/{id}/log", get(session_log))
        .route("/api/palette", get(palette))
        .route("/ws", get(ws_upgrade))
        .with_state(manager);
    match static_dir {
        Some(dir) => app.fallback_service(ServeDir::new(dir)),
        None => app,
    }
}

/// Binds the listen address, with the address in the error on failure.
pub async fn bind(addr: SocketAddr) -> io::Result<TcpListener> {
    TcpListener::bind(addr).await.map_err(|e| io::Error::new(e.kind(), format!("cannot listen on {addr}: {e}")))
}

pub async fn serve(listener: TcpListener, app: Router) -> io::Result<()> {
    axum::serve(listener, app).await
}

async fn create_session(
    State(manager): State<SessionManager>,
    body: Bytes,
) -> Result<impl IntoResponse, ServiceError> {
    let req: CreateRequest = if body.iter().all(u8::is_ascii_whitespace) {
        CreateRequest::default()
    } else {
        serde_json::from_slice(&body).map_err(|e| ServiceError::BadRequest(e.to_string()))?
    };
    let created = manager.create(req)?;
    Ok((StatusCode::CREATED, Json(created)))
}

async fn list_sessions(State(manager): State<SessionManager>) -> impl IntoResponse {
    Json(manager.list())
}

async fn session_state(
    State(manager): State<SessionManager>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ServiceError> {
    let handle = manager.get(&id)?;
    let session = lock(&handle);
    let mut view = serde_json::to_value(session.view()).expect("views serialize");
    view["seq"] = json!(session.seq());
    Ok(Json(view))
}

async fn session_log(
    State(manager): State<SessionManager>,
    Path(id): Path<String>,
) -> Result<impl IntoResponse, ServiceError> {
    let handle = manager.get(&id)?;
    let mut text = Vec::new();
    write_log(lock(&handle).state().log(), &mut text).expect("writing to memory");
    Ok(([(header::CONTENT_TYPE, "application/x-ndjson")], text))
}

#[derive(Deserialize)]
struct PaletteQuery {
    m: Option<u32>,
    n: Option<u32>,
}

async fn palette(
    State(manager): State<SessionManager>,
    Query(q): Query<PaletteQuery>,
) -> Result<impl IntoResponse, ServiceError> {
    let d = manager.config().defaults;
    let params = GroupParams::new(q.m.unwrap_or(d.m), q.n.unwrap_or(d.n))
        .map_err(|e| ServiceError::Config(e.to_string()))?;
    Ok(Json(Palette::standard(params).describe::<u16>()))
}

async fn ws_upgrade(State(manager): State<SessionManager>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| Connection::new(manager, socket).run())
}

struct Joined {
    id: String,
    handle: SessionHandle,
    access: Access,
    token: Option<String>,
    rx: broadcast::Receiver<Arc<str>>,
}

struct Connection {
    manager: SessionManager,
    socket: WebSocket,
    joined: Option<Joined>,
}

impl Connection {
    fn new(manager: SessionManager, socket: WebSocket) -> Self {
        Connection { manager, socket, joined: None }
    }

    async fn run(mut self) {
        if self.send(&self.hello(None)).await.is_err() {
            return;
        }
        loop {
            let joined = &mut self.joined;
            let broadcast = async {
                match joined {
                    Some(j) => j.rx.recv().await,
                    None => std::future::pending().await,
                }
            };
            tokio::select! {
                incoming = self.socket.recv() => match incoming {
                    Some(Ok(Message::Text(text))) => {
                        if self.handle_text(text.as_str()).await.is_err() {
                            break;
                        }
                    }
                    Some(Ok(Message::Close(_))) | None | Some(Err(_)) => break,
                    Some(Ok(_)) => {}
                },
                message = broadcast => match message {
                    Ok(text) => {
                        if self.socket.send(Message::Text(text.as_ref().into())).await.is_err() {
                            break;
                        }
                    }
                    Err(broadcast::error::RecvError::Lagged(missed)) => {
                        let note = Outgoing::error(None, format!("missed {missed} messages; join again"));
                        if self.send(&note).await.is_err() {
                            break;
                        }
                    }
                    Err(broadcast::error::RecvError::Closed) => break,
                },
            }
        }
        self.leave();
    }

    fn hello(&self, re: Option<Value>) -> Outgoing {
        let payload = HelloPayload { server: "aljabar", protocol: PROTOCOL_VERSION, sessions: self.manager.list() };
        Outgoing::reply(Kind::Hello, re, payload)
    }

    async fn send(&mut self, msg: &Outgoing) -> Result<(), axum::Error> {
        self.socket.send(Message::Text(msg.to_text().into())).await
    }

    /// Forwards broadcasts already queued, so a reply follows the events it
    /// caused.
    async fn drain(&mut self) -> Result<(), axum::Error> {
        let Some(joined) = &mut self.joined else { return Ok(()) };
        let mut pending = Vec::new();
        while let Ok(text) = joined.rx.try_recv() {
            pending.push(text);
        }
        for text in pending {
            self.socket.send(Message::Text(text.as_ref().into())).await?;
        }
        Ok(())
    }

    async fn handle_text(&mut self, text: &str) -> Result<(), axum::Error> {
        let incoming: Incoming = match serde_json::from_str(text) {
            Ok(msg) => msg,
            Err(e) => return self.send(&Outgoing::error(None, format!("malformed message: {e}"))).await,
        };
        let re = incoming.id.clone();
        let reply = match self.dispatch(incoming) {
            Ok(reply) => reply,
            Err(err @ (ServiceError::Rejected(_) | ServiceError::NotYourTurn { .. } | ServiceError::Finished)) => {
                let hand_size = self.hand_size();
                Outgoing::reply(
                    Kind::MoveResult,
                    re.clone(),
                    MoveResult { ok: false, error: Some(err.to_string()), drawn: Vec::new(), hand_size },
                )
            }
            Err(err) => Outgoing::error(re.clone(), err.to_string()),
        };
        self.drain().await?;
        self.send(&Outgoing { re, ..reply }).await
    }

    fn hand_size(&self) -> usize {
        match &self.joined {
            Some(Joined { handle, access: Access::Seat(seat), .. }) => lock(handle).state().hand(*seat).len(),
            _ => 0,
        }
    }

    fn dispatch(&mut self, msg: Incoming) -> Result<Outgoing, ServiceError> {
        let re = msg.id;
        let payload = msg.payload;
        match msg.kind {
            Kind::Hello => Ok(self.hello(re)),
            Kind::Join => {
                let req: JoinRequest = decode(payload)?;
                self.join(req, re)
            }
            Kind::LegalMoves => {
                let req: HintRequest = if payload.is_null() { HintRequest::default() } else { decode(payload)? };
                let (id, token) = self.seat_credentials()?;
                let hints = self.manager.hints(&id, &token, req.limit)?;
                Ok(Outgoing::reply(Kind::LegalMoves, re, hints))
            }
            Kind::SubmitMove => {
                let req: SubmitRequest = decode(payload)?;
                let (id, token) = self.seat_credentials()?;
                let result = self.manager.submit(&id, &token, &req)?;
                Ok(Outgoing::reply(Kind::MoveResult, re, result))
            }
            Kind::AnnounceFinal => {
                let (id, token) = self.seat_credentials()?;
                let result = self.manager.announce(&id, &token)?;
                Ok(Outgoing::reply(Kind::MoveResult, re, result))
            }
            other => Err(ServiceError::BadRequest(format!("{other:?} is not a client message"))),
        }
    }

    fn seat_credentials(&self) -> Result<(String, String), ServiceError> {
        let joined = self.joined.as_ref().ok_or(ServiceError::NotJoined)?;
        match (&joined.access, &joined.token) {
            (Access::Seat(_), Some(token)) => Ok((joined.id.clone(), token.clone())),
            _ => Err(ServiceError::NotASeat),
        }
    }

    fn join(&mut self, req: JoinRequest, re: Option<Value>) -> Result<Outgoing, ServiceError> {
        let handle = self.manager.get(&req.session)?;
        let access = lock(&handle).access(req.token.as_deref())?;
        self.leave();
        if let Access::Seat(seat) = access {
            self.manager.connect(&handle, seat);
        }
        // subscribe and snapshot under one lock: nothing is lost or repeated
        let (rx, payload) = {
            let session = lock(&handle);
            let rx = session.subscribe();
            let payload = JoinPayload {
                session: req.session.clone(),
                role: if matches!(access, Access::Seat(_)) { Role::Player } else { Role::Spectator },
                seat: match access {
                    Access::Seat(seat) => Some(seat),
                    Access::Spectator => None,
                },
                seq: session.seq(),
                palette: session.state().config().palette().describe::<u16>(),
                state: session.view(),
            };
            (rx, payload)
        };
        self.joined = Some(Joined { id: req.session, handle, access, token: req.token, rx });
        Ok(Outgoing::reply(Kind::Join, re, payload))
    }

    fn leave(&mut self) {
        if let Some(Joined { handle, access: Access::Seat(seat), .. }) = self.joined.take() {
            self.manager.disconnect(&handle, seat);
        }
    }
}

fn decode<T: serde::de::DeserializeOwned>(payload: Value) -> Result<T, ServiceError> {
    serde_json::from_value(payload).map_err(|e| ServiceError::BadRequest(e.to_string()))
}
