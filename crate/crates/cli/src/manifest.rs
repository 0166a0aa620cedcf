//! Output directory bookkeeping and the run manifest.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Serialize)]
pub struct FileEntry {
    /// Path relative to the output directory, `/`-separated.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StageStatus {
    pub name: String,
    pub status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_digest: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_seconds: f64,
    pub stages: Vec<StageStatus>,
    pub files: Vec<FileEntry>,
}

/// Collects produced files and stage outcomes for one run.
pub struct Artifacts {
    root: PathBuf,
    started: Instant,
    stages: Vec<StageStatus>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

impl Artifacts {
    pub fn create(root: PathBuf) -> CliResult<Self> {
        fs::create_dir_all(&root).map_err(|e| CliError::io("output", e))?;
        Ok(Self {
            root,
            started: Instant::now(),
            stages: Vec::new(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn path(&self, rel: &str) -> PathBuf {
        self.root.join(rel)
    }

    pub fn write(&self, rel: &str, bytes: impl AsRef<[u8]>) -> CliResult<()> {
        let path = self.path(rel);
        if let Some(parent) = path.parent() {
            fs::create_dir_all(parent).map_err(|e| CliError::io("output", e))?;
        }
        fs::write(&path, bytes).map_err(|e| CliError::io("output", e))
    }

    pub fn write_json(&self, rel: &str, value: &impl Serialize) -> CliResult<()> {
        let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Compute {
            stage: "output".into(),
            kind: "json".into(),
            message: e.to_string(),
        })?;
        self.write(rel, text + "\n")
    }

    pub fn stage(&mut self, name: &str, status: &str, detail: Option<String>) {
        self.stages.push(StageStatus {
            name: name.into(),
            status: status.into(),
            detail,
        });
    }

    /// Hash every file under the root except the manifest and write the manifest.
    pub fn finish(self, command: &str, digest: &str, seed: u64, threads: usize) -> CliResult<()> {
        let files = inventory(&self.root).map_err(|e| CliError::io("manifest", e))?;
        let manifest = RunManifest {
            tool: "csns".into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config_digest: digest.into(),
            seed,
            threads,
            wall_time_seconds: self.started.elapsed().as_secs_f64(),
            stages: self.stages.clone(),
            files,
        };
        self.write_json(MANIFEST_NAME, &manifest)
    }
}

/// Sorted list of files below `root` with their hashes, the manifest excluded.
pub fn inventory(root: &Path) -> std::io::Result<Vec<FileEntry>> {
    let mut paths = Vec::new();
    collect(root, root, &mut paths)?;
    paths.sort();
    paths
        .into_iter()
        .filter(|rel| rel != MANIFEST_NAME)
        .map(|rel| {
            let bytes = fs::read(root.join(&rel))?;
            Ok(FileEntry {
                sha256: hex::encode(Sha256::digest(&bytes)),
                bytes: bytes.len() as u64,
                path: rel,
            })
        })
        .collect()
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<String>) -> std::io::Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect(root, &path, out)?;
        } else {
            let rel = path.strip_prefix(root).expect("below root");
            let parts: Vec<String> = rel
                .components()
                .map(|c| c.as_os_str().to_string_lossy().into_owned())
                .collect();
            out.push(parts.join("/"));
        }
    }
    Ok(())
}
