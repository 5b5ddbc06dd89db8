//! Run directories and their checksummed manifests.

use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use gasket_hydro::sim::{BoundarySpec, Regime};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutputRecord {
    pub file: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub subcommand: String,
    pub config_hash: String,
    pub config: ExperimentConfig,
    pub seed: u64,
    /// How RNG stream ids of the master seed map to replicas.
    pub streams: String,
    pub level: u32,
    pub boundary: BoundarySpec<f64>,
    pub regimes: [Regime; 3],
    pub git_describe: String,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub outputs: Vec<OutputRecord>,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of the resolved configuration in its JSON form.
pub fn config_hash(cfg: &ExperimentConfig) -> String {
    sha256_hex(serde_json::to_string(cfg).expect("config serializes").as_bytes())
}

fn now() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0.0, |d| d.as_secs_f64())
}

fn git_describe() -> String {
    std::process::Command::new("git")
        .args(["describe", "--always", "--dirty"])
        .output()
        .ok()
        .filter(|o| o.status.success())
        .map(|o| String::from_utf8_lossy(&o.stdout).trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into())
}

/// Output directory of one run; every file written through it is recorded.
pub struct RunDir {
    pub dir: PathBuf,
    subcommand: String,
    streams: String,
    started: f64,
    outputs: Vec<OutputRecord>,
}

impl RunDir {
    pub fn create(subcommand: &str, cfg: &ExperimentConfig, root: Option<&Path>) -> CliResult<Self> {
        let dir = match &cfg.output {
            Some(d) => d.clone(),
            None => {
                let root = root.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("runs"));
                root.join(format!("{subcommand}-{}", &config_hash(cfg)[..12]))
            }
        };
        std::fs::create_dir_all(&dir)
            .map_err(|e| CliError::Runtime(format!("cannot create {}: {e}", dir.display())))?;
        Ok(RunDir { dir, subcommand: subcommand.into(), streams: "none".into(), started: now(), outputs: Vec::new() })
    }

    pub fn set_streams(&mut self, description: impl Into<String>) {
        self.streams = description.into();
    }

    pub fn write(&mut self, name: &str, contents: &str) -> CliResult<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| CliError::Runtime(format!("cannot write {}: {e}", path.display())))?;
        self.outputs.push(OutputRecord {
            file: name.into(),
            sha256: sha256_hex(contents.as_bytes()),
            bytes: contents.len() as u64,
        });
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value)? + "\n";
        self.write(name, &text)
    }

    pub fn finish(self, cfg: &ExperimentConfig) -> CliResult<PathBuf> {
        let boundary = cfg.boundary_spec()?;
        let manifest = RunManifest {
            tool: "gasket-hydro".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            subcommand: self.subcommand,
            config_hash: config_hash(cfg),
            config: cfg.clone(),
            seed: cfg.seed,
            streams: self.streams,
            level: cfg.level,
            regimes: boundary.regimes(),
            boundary,
            git_describe: git_describe(),
            started_unix: self.started,
            finished_unix: now(),
            outputs: self.outputs,
        };
        let path = self.dir.join(MANIFEST);
        std::fs::write(&path, serde_json::to_string_pretty(&manifest)? + "\n")?;
        Ok(self.dir)
    }
}

/// Files whose checksum does not match the manifest (missing files included).
pub fn verify(dir: &Path) -> CliResult<Vec<String>> {
    let text = std::fs::read_to_string(dir.join(MANIFEST))?;
    let m: RunManifest = serde_json::from_str(&text)?;
    Ok(m.outputs
        .iter()
        .filter(|o| std::fs::read(dir.join(&o.file)).map_or(true, |b| sha256_hex(&b) != o.sha256))
        .map(|o| o.file.clone())
        .collect())
}
