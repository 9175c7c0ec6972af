//! Message bodies. Every message is `{"kind": ..., "request_id": n,
//! "payload": {...}}`; kinds without a payload leave it out.

use crate::env::{EnvConfig, StepOutcome};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "payload", rename_all = "snake_case")]
pub enum Body {
    Reset { task: String, seed: u64 },
    Step { actions: Vec<String> },
    Observe,
    Pause,
    Resume,
    Configure(EnvConfig),
    Shutdown,
    Response(Box<Reply>),
    Error(ErrorPayload),
}

impl Body {
    pub fn kind(&self) -> &'static str {
        match self {
            Body::Reset { .. } => "reset",
            Body::Step { .. } => "step",
            Body::Observe => "observe",
            Body::Pause => "pause",
            Body::Resume => "resume",
            Body::Configure(_) => "configure",
            Body::Shutdown => "shutdown",
            Body::Response(_) => "response",
            Body::Error(_) => "error",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Message {
    pub request_id: u64,
    #[serde(flatten)]
    pub body: Body,
}

/// Instance state echoed on every response.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Status {
    pub task: Option<String>,
    pub paused: bool,
    pub config: EnvConfig,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reply {
    /// Present for reset, step and observe.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<StepOutcome>,
    pub status: Status,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    /// Body was not valid JSON for any request kind.
    BadMessage,
    /// A response or error kind was sent as a request.
    NotARequest,
    NoTask,
    UnknownTask,
    TooManyActions,
    NoActions,
    EpisodeDone,
    /// Task setup or observation rendering failed.
    Internal,
    /// Another client holds the instance.
    Busy,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPayload {
    pub code: ErrorCode,
    pub message: String,
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn wire_shapes() {
        let m = Message {
            request_id: 7,
            body: Body::Reset {
                task: "go_to_bed".into(),
                seed: 3,
            },
        };
        let v = serde_json::to_value(&m).unwrap();
        assert_eq!(
            v,
            json!({"request_id": 7, "kind": "reset", "payload": {"task": "go_to_bed", "seed": 3}})
        );
        let back: Message = serde_json::from_value(v).unwrap();
        assert_eq!(back, m);

        let obs: Message = serde_json::from_value(json!({"request_id": 1, "kind": "observe"})).unwrap();
        assert_eq!(obs.body, Body::Observe);
        assert_eq!(serde_json::to_value(&obs).unwrap(), json!({"request_id": 1, "kind": "observe"}));
    }

    #[test]
    fn configure_fills_defaults() {
        let m: Message = serde_json::from_value(json!({
            "request_id": 2, "kind": "configure",
            "payload": {"realtime": true, "observation": {"modality": "text_only"}}
        }))
        .unwrap();
        let Body::Configure(c) = m.body else { panic!() };
        assert!(c.realtime);
        assert_eq!(c.observation.window, 3);
    }
}
