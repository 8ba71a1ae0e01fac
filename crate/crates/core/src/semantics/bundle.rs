//! Stream bundles and their JSON form:
//! `{"ticks": N, "ports": {"<name>": ["STOP", null, "FORWARD", ...]}}`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::transducer::PortSig;
use crate::model::Message;

/// One timed stream of messages per port; `null` in JSON is epsilon.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamBundle {
    pub ticks: usize,
    pub ports: BTreeMap<String, Vec<Message>>,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum BundleError {
    #[error("invalid stream bundle JSON: {0}")]
    Json(String),
    #[error("stream bundle is missing port `{0}`")]
    MissingPort(String),
    #[error("stream bundle has unexpected port `{0}`")]
    ExtraPort(String),
    #[error("port `{port}` has {found} messages but the bundle declares {ticks} ticks")]
    Length { port: String, found: usize, ticks: usize },
    #[error("port `{port}` at tick {tick}: `{value}` is not a message of its type")]
    BadValue { port: String, tick: usize, value: String },
}

impl StreamBundle {
    pub fn new(ticks: usize) -> Self {
        StreamBundle { ticks, ports: BTreeMap::new() }
    }

    /// An all-epsilon bundle over `ports`.
    pub fn silent<'a>(ticks: usize, ports: impl IntoIterator<Item = &'a str>) -> Self {
        StreamBundle { ticks, ports: ports.into_iter().map(|p| (p.to_string(), vec![None; ticks])).collect() }
    }

    pub fn from_json(text: &str) -> Result<Self, BundleError> {
        serde_json::from_str(text).map_err(|e| BundleError::Json(e.to_string()))
    }

    /// Pretty JSON with sorted port names, terminated by a newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("bundle serializes");
        s.push('\n');
        s
    }

    pub fn port(&self, name: &str) -> Option<&[Message]> {
        self.ports.get(name).map(Vec::as_slice)
    }

    /// Checks that exactly `ports` are present, every stream has `ticks`
    /// messages and every message belongs to its port's type.
    pub fn validate(&self, ports: &[PortSig]) -> Result<(), BundleError> {
        for p in ports {
            let stream = self.ports.get(&p.name).ok_or_else(|| BundleError::MissingPort(p.name.clone()))?;
            if stream.len() != self.ticks {
                return Err(BundleError::Length { port: p.name.clone(), found: stream.len(), ticks: self.ticks });
            }
            for (tick, m) in stream.iter().enumerate() {
                if p.encode(m).is_none() {
                    return Err(BundleError::BadValue {
                        port: p.name.clone(),
                        tick,
                        value: m.as_ref().map(|v| v.to_string()).unwrap_or_default(),
                    });
                }
            }
        }
        if let Some(extra) = self.ports.keys().find(|k| !ports.iter().any(|p| &p.name == *k)) {
            return Err(BundleError::ExtraPort(extra.clone()));
        }
        Ok(())
    }
}
