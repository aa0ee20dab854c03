use serde::{Deserialize, Serialize};

pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Everything a command consumed and produced, for later audit or replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub command: String,
    pub config: serde_json::Value,
    pub outputs: serde_json::Value,
    /// Seconds since the Unix epoch; honours `SOURCE_DATE_EPOCH` when set.
    pub timestamp: u64,
    pub seed: Option<u64>,
    pub artifact_version: String,
}

impl RunRecord {
    pub fn new<C: Serialize, O: Serialize>(
        command: &str,
        config: &C,
        outputs: &O,
        seed: Option<u64>,
    ) -> crate::Result<Self> {
        Ok(RunRecord {
            command: command.to_string(),
            config: serde_json::to_value(config)?,
            outputs: serde_json::to_value(outputs)?,
            timestamp: now(),
            seed,
            artifact_version: ARTIFACT_VERSION.to_string(),
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    pub fn from_json(s: &str) -> crate::Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

fn now() -> u64 {
    if let Some(t) = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse().ok())
    {
        return t;
    }
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}
