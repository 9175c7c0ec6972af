//! Wire protocol: length-prefixed JSON messages over TCP, one instance per
//! port. See docs/protocol.md for the byte-level description.

pub mod client;
pub mod frame;
pub mod message;
pub mod server;

pub use client::{Client, ClientError};
pub use message::{Body, ErrorCode, ErrorPayload, Message, Reply, Status};
pub use server::{ServeError, Server, ServerHandle};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::Content;
    use crate::env::{Env, EnvConfig};
    use crate::observation::{Modality, ObsConfig};
    use crate::tasks::TaskSuite;
    use std::sync::Arc;

    fn text_env() -> Env {
        let cfg = EnvConfig {
            observation: ObsConfig {
                modality: Modality::TextOnly,
                ..Default::default()
            },
            ..Default::default()
        };
        Env::new(Content::shared(), Arc::new(TaskSuite::bundled().clone()), cfg)
    }

    #[test]
    fn reset_step_shutdown_over_tcp() {
        let h = Server::bind("127.0.0.1:0", text_env()).unwrap().spawn();
        let mut c = Client::connect(h.addr).unwrap();
        let out = c.reset("go_to_bus_stop", 1).unwrap();
        assert_eq!(out.max_steps, 30);
        assert_eq!(out.observation.text.unwrap().location, "FarmHouse");
        let out = c.step(&["move(x=5, y=7)", "interact(direction=\"down\")"]).unwrap();
        assert_eq!(out.steps_used, 1);
        assert_eq!(out.observation.text.unwrap().location, "Farm");
        c.shutdown().unwrap();
        h.join().unwrap();
    }

    #[test]
    fn errors_keep_the_connection_usable() {
        let h = Server::bind("127.0.0.1:0", text_env()).unwrap().spawn();
        let mut c = Client::connect(h.addr).unwrap();
        let r = c.step(&["use(direction=\"up\")"]);
        assert!(
            matches!(
                r,
                Err(ClientError::Remote {
                    code: ErrorCode::NoTask,
                    ..
                })
            ),
            "{r:?}"
        );
        assert!(matches!(
            c.reset("nope", 1),
            Err(ClientError::Remote {
                code: ErrorCode::UnknownTask,
                ..
            })
        ));
        let m = c.raw(b"{\"request_id\": 41, \"kind\": \"step\"}").unwrap();
        assert_eq!(m.request_id, 41);
        assert!(matches!(
            m.body,
            Body::Error(ErrorPayload {
                code: ErrorCode::BadMessage,
                ..
            })
        ));
        let m = c.raw(b"{\"request_id\": 4").unwrap();
        assert_eq!(m.request_id, 0);
        c.reset("go_to_bus_stop", 1).unwrap();
        let a = "use(direction=\"up\")";
        assert!(matches!(
            c.step(&[a, a, a]),
            Err(ClientError::Remote {
                code: ErrorCode::TooManyActions,
                ..
            })
        ));
        assert_eq!(c.observe().unwrap().steps_used, 0);
        c.shutdown().unwrap();
        h.join().unwrap();
    }

    #[test]
    fn second_client_is_busy_and_port_conflicts_fail() {
        let server = Server::bind("127.0.0.1:0", text_env()).unwrap();
        let addr = server.local_addr();
        assert!(matches!(Server::bind(addr, text_env()), Err(ServeError::PortInUse(p)) if p == addr.port()));
        let h = server.spawn();
        let mut a = Client::connect(addr).unwrap();
        a.reset("go_to_bed", 1).unwrap();
        let mut b = Client::connect(addr).unwrap();
        assert!(matches!(b.observe(), Err(ClientError::Remote { code: ErrorCode::Busy, .. })));
        drop(a);
        // The instance frees up once the first client leaves.
        let mut c = loop {
            let mut c = Client::connect(addr).unwrap();
            match c.observe() {
                Err(ClientError::Remote { code: ErrorCode::Busy, .. }) => std::thread::yield_now(),
                r => {
                    r.unwrap();
                    break c;
                }
            }
        };
        c.pause().unwrap();
        c.shutdown().unwrap();
        h.join().unwrap();
    }
}
