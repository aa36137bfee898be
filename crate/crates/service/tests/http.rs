use axum::body::{to_bytes, Body};
use axum::http::{Request, StatusCode};
use axum::Router;
use aljabar_service::{bind, router, ServiceConfig, SessionManager};
use serde_json::{json, Value};
use tower::ServiceExt;

fn app(static_dir: Option<std::path::PathBuf>) -> Router {
    router(SessionManager::new(ServiceConfig { fallback_after: None, ..Default::default() }), static_dir)
}

async fn call(app: &Router, method: &str, uri: &str, body: Option<Value>) -> (StatusCode, Vec<u8>) {
    let builder = Request::builder().method(method).uri(uri).header("content-type", "application/json");
    let body = body.map(|b| Body::from(b.to_string())).unwrap_or_else(Body::empty);
    let response = app.clone().oneshot(builder.body(body).unwrap()).await.unwrap();
    let status = response.status();
    (status, to_bytes(response.into_body(), 1 << 24).await.unwrap().to_vec())
}

fn json_of(bytes: &[u8]) -> Value {
    serde_json::from_slice(bytes).unwrap()
}

#[tokio::test]
async fn create_list_and_state() {
    let app = app(None);
    let (status, body) = call(&app, "POST", "/api/sessions", Some(json!({ "seed": 3, "seats": ["human", "greedy"] }))).await;
    assert_eq!(status, StatusCode::CREATED);
    let created = json_of(&body);
    let id = created["id"].as_str().unwrap().to_string();
    assert!(created["seat_tokens"][0].is_string());
    assert!(created["seat_tokens"][1].is_null());
    assert_eq!(created["state"]["config"], json!({ "m": 2, "n": 3, "copies": 10, "players": 2, "seed": 3 }));

    let (status, body) = call(&app, "GET", "/api/sessions", None).await;
    assert_eq!(status, StatusCode::OK);
    let list = json_of(&body);
    assert_eq!(list.as_array().unwrap().len(), 1);
    assert_eq!(list[0]["id"], id.as_str());
    assert_eq!(list[0]["seats"][1]["policy"], "greedy");

    let (status, body) = call(&app, "GET", &format!("/api/sessions/{id}/state"), None).await;
    assert_eq!(status, StatusCode::OK);
    let state = json_of(&body);
    assert!(state["seq"].as_u64().unwrap() >= 1);
    // greedy moved first and the game now waits on the human seat
    assert_eq!(state["to_act"], 0);
    assert_eq!(state["turns_played"], 1);

    let (status, body) = call(&app, "GET", &format!("/api/sessions/{id}/log"), None).await;
    assert_eq!(status, StatusCode::OK);
    let text = String::from_utf8(body).unwrap();
    assert!(text.starts_with("{\"kind\":\"start\""));
    assert_eq!(text.lines().count(), state["log_len"].as_u64().unwrap() as usize);
}

#[tokio::test]
async fn bad_requests() {
    let app = app(None);
    let (status, body) = call(&app, "POST", "/api/sessions", Some(json!({ "players": 5 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    assert!(json_of(&body)["error"].as_str().unwrap().contains("2 to 4 players"));
    let (status, _) = call(&app, "POST", "/api/sessions", Some(json!({ "m": 2, "players": 4, "A": 7 }))).await;
    assert_eq!(status, StatusCode::BAD_REQUEST);
    let (status, _) = call(&app, "GET", "/api/sessions/missing/state", None).await;
    assert_eq!(status, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn empty_body_uses_defaults() {
    let app = app(None);
    let (status, body) = call(&app, "POST", "/api/sessions", None).await;
    assert_eq!(status, StatusCode::CREATED, "{}", String::from_utf8_lossy(&body));
    assert_eq!(json_of(&body)["state"]["hand_sizes"], json!([13, 13]));
}

#[tokio::test]
async fn palette_for_other_groups() {
    let app = app(None);
    let (status, body) = call(&app, "GET", "/api/palette?m=3&n=2", None).await;
    assert_eq!(status, StatusCode::OK);
    let palette = json_of(&body);
    assert_eq!(palette["colors"].as_array().unwrap().len(), 9);
    assert_eq!(palette["table"].as_array().unwrap().len(), 9);
}

#[tokio::test]
async fn serves_static_files() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("index.html"), "<h1>board</h1>").unwrap();
    let app = app(Some(dir.path().to_path_buf()));
    let (status, body) = call(&app, "GET", "/index.html", None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body, b"<h1>board</h1>");
    let (status, _) = call(&app, "GET", "/", None).await;
    assert_eq!(status, StatusCode::OK);
    let (status, _) = call(&app, "GET", "/api/sessions", None).await;
    assert_eq!(status, StatusCode::OK);
}

#[tokio::test]
async fn occupied_port_is_a_clear_error() {
    let first = bind("127.0.0.1:0".parse().unwrap()).await.unwrap();
    let addr = first.local_addr().unwrap();
    let err = bind(addr).await.unwrap_err();
    assert!(err.to_string().starts_with(&format!("cannot listen on {addr}")), "{err}");
}
