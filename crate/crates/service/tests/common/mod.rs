#![allow(dead_code)]

use std::net::SocketAddr;
use std::time::Duration;

use aljabar_core::rules::{DrawReason, FinalCause, GameEvent, WireMove};
use aljabar_service::{bind, router, serve, ServiceConfig, SessionManager};
use futures_util::{SinkExt, StreamExt};
use serde_json::{json, Value};
use tempfile::TempDir;
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{MaybeTlsStream, WebSocketStream};

pub struct Server {
    pub addr: SocketAddr,
    pub manager: SessionManager,
    pub dir: TempDir,
}

pub async fn start(fallback_after: Option<Duration>) -> Server {
    let dir = tempfile::tempdir().unwrap();
    let config = ServiceConfig { log_dir: Some(dir.path().to_path_buf()), fallback_after, ..Default::default() };
    let manager = SessionManager::new(config);
    let listener = bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = listener.local_addr().unwrap();
    tokio::spawn(serve(listener, router(manager.clone(), None)));
    Server { addr, manager, dir }
}

pub struct Client {
    ws: WebSocketStream<MaybeTlsStream<TcpStream>>,
    /// Broadcasts received so far, in order.
    pub broadcasts: Vec<Value>,
    next_id: u64,
}

impl Client {
    pub async fn connect(addr: SocketAddr) -> Client {
        let (ws, _) = tokio_tungstenite::connect_async(format!("ws://{addr}/ws")).await.unwrap();
        let mut client = Client { ws, broadcasts: Vec::new(), next_id: 0 };
        let hello = client.recv().await;
        assert_eq!(hello["kind"], "hello");
        client
    }

    pub async fn recv(&mut self) -> Value {
        loop {
            let msg = tokio::time::timeout(Duration::from_secs(10), self.ws.next())
                .await
                .expect("message within 10 s")
                .expect("open socket")
                .unwrap();
            if let Message::Text(text) = msg {
                return serde_json::from_str(text.as_str()).unwrap();
            }
        }
    }

    pub async fn send_raw(&mut self, text: &str) {
        self.ws.send(Message::Text(text.into())).await.unwrap();
    }

    /// Sends a request and returns its reply; broadcasts that arrive in
    /// between are kept.
    pub async fn request(&mut self, kind: &str, payload: Value) -> Value {
        self.next_id += 1;
        let id = self.next_id;
        let text = json!({ "kind": kind, "id": id, "payload": payload }).to_string();
        self.send_raw(&text).await;
        loop {
            let msg = self.recv().await;
            if msg["seq"].is_u64() {
                self.broadcasts.push(msg);
            } else if msg["re"] == json!(id) {
                return msg;
            }
        }
    }

    pub async fn join(&mut self, session: &str, token: Option<&str>) -> Value {
        let reply = self.request("join", json!({ "session": session, "token": token })).await;
        assert_eq!(reply["kind"], "join", "{reply}");
        reply
    }

    /// Reads broadcasts until one of `kind` arrives.
    pub async fn until(&mut self, kind: &str) -> Value {
        loop {
            let msg = self.recv().await;
            if msg["seq"].is_u64() {
                self.broadcasts.push(msg.clone());
                if msg["kind"] == kind {
                    return msg;
                }
            }
        }
    }

    pub async fn close(mut self) {
        let _ = self.ws.close(None).await;
    }
}

/// A player action recovered from an engine log.
#[derive(Clone, Debug, PartialEq)]
pub enum Action {
    Announce,
    Submit { pre_draws: usize, mv: Option<WireMove> },
}

/// The protocol requests that reproduce a logged game, per acting player.
pub fn script(events: &[GameEvent]) -> Vec<(usize, Action)> {
    let mut out = Vec::new();
    let mut voluntary = 0;
    let mut in_stuck_run = false;
    for event in events {
        let stuck = matches!(event, GameEvent::Draw { reason: DrawReason::Stuck, .. });
        match event {
            GameEvent::Announce { player, cause: FinalCause::Declared, .. } => out.push((*player, Action::Announce)),
            GameEvent::Draw { player, reason: DrawReason::Stuck, .. } if !in_stuck_run => {
                out.push((*player, Action::Submit { pre_draws: 0, mv: None }));
            }
            GameEvent::Draw { reason: DrawReason::Voluntary, .. } => voluntary += 1,
            GameEvent::Exchange { player, give, take } => {
                let mv = WireMove::Exchange { give: give.clone(), take: take.clone() };
                out.push((*player, Action::Submit { pre_draws: voluntary, mv: Some(mv) }));
                voluntary = 0;
            }
            GameEvent::Spectrum { player, .. } => {
                out.push((*player, Action::Submit { pre_draws: voluntary, mv: Some(WireMove::Spectrum) }));
                voluntary = 0;
            }
            GameEvent::Pass { player } => out.push((*player, Action::Submit { pre_draws: 0, mv: Some(WireMove::Pass) })),
            _ => {}
        }
        in_stuck_run = stuck;
    }
    out
}

pub fn submit_payload(pre_draws: usize, mv: &Option<WireMove>) -> Value {
    json!({ "pre_draws": pre_draws, "move": mv })
}
