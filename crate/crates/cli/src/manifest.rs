use serde::{Deserialize, Serialize};

/// Provenance record embedded in every file the CLI writes.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Command line after the program name; feeding it back reproduces the run.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp: String,
    pub output: Option<String>,
}

impl RunManifest {
    pub fn new(
        subcommand: &str,
        params: impl Serialize,
        seed: Option<u64>,
        output: Option<&std::path::Path>,
    ) -> Self {
        Self {
            subcommand: subcommand.into(),
            argv: std::env::args().skip(1).collect(),
            params: serde_json::to_value(params).unwrap_or(serde_json::Value::Null),
            version: env!("CARGO_PKG_VERSION").into(),
            seed,
            timestamp: chrono::Utc::now().to_rfc3339(),
            output: output.map(|p| p.display().to_string()),
        }
    }
}

#[derive(Serialize)]
pub struct WithManifest<'a, T: Serialize> {
    #[serde(flatten)]
    pub result: &'a T,
    pub manifest: &'a RunManifest,
}
