pub mod branch;
pub mod kepler;
pub mod map;
pub mod perp_check;
pub mod pitchfork;
pub mod torus;

use std::path::PathBuf;

use crate::out::Formats;

/// Shared run context from the global flags.
pub struct Ctx {
    pub out_dir: PathBuf,
    pub formats: Formats,
    pub seed: u64,
}

impl Ctx {
    pub fn meta(&self) -> serde_json::Value {
        serde_json::json!({
            "schema": crate::out::SCHEMA,
            "seed": self.seed,
        })
    }
}

/// User-input problem distinct from the numeric core errors; maps to exit 2.
#[derive(Debug)]
pub struct ValidationError(pub String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ValidationError {}

pub fn validate(cond: bool, msg: &str) -> anyhow::Result<()> {
    if cond {
        Ok(())
    } else {
        Err(ValidationError(msg.to_string()).into())
    }
}
