//! Live Al-Jabar games over WebSocket, with an HTTP mirror for tooling.
//!
//! [`SessionManager`] owns the sessions; [`server::router`] exposes them.
//! The wire format is described in `PROTOCOL.md` and [`protocol`].

pub mod error;
pub mod manager;
pub mod protocol;
pub mod server;
pub mod session;

pub use error::ServiceError;
pub use manager::{CreateRequest, CreateResponse, Defaults, ServiceConfig, SessionManager};
pub use server::{bind, router, serve};
