use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::support::{ensure, Context, Verdict};

const COMMANDS: [&str; 5] = ["simulate", "steady", "perturb", "profiles", "verify"];

fn config() -> Value {
    json!({
        "grid": {"n": 16},
        "solver": {"dt": 0.01, "t_end": 0.3, "snapshot_stride": 5},
        "seed": 7,
        "initial": {"kind": "random", "kmax": 2, "rms": 0.1},
        "force": {"kind": "shell", "weights": [1.0, -1.0, 0.5, 0.0, 0.3, -0.2], "diagonal": 0.0, "amplitude": 0.05},
        "perturb": {"drift": {"kind": "random", "kmax": 2, "rms": 0.05, "seed_offset": 3}},
        "verify": {"resolutions": [16, 32]}
    })
}

/// Content hash of every file below `root` except the manifest, keyed by relative path.
fn hashes(root: &Path) -> Result<BTreeMap<String, String>, String> {
    fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, String>) -> Result<(), String> {
        for entry in fs::read_dir(dir).ctx("read dir")? {
            let path = entry.ctx("dir entry")?.path();
            if path.is_dir() {
                walk(root, &path, out)?;
                continue;
            }
            let rel = path
                .strip_prefix(root)
                .expect("below root")
                .to_string_lossy()
                .replace('\\', "/");
            if rel != "manifest.json" {
                let bytes = fs::read(&path).ctx("read file")?;
                out.insert(rel, hex::encode(Sha256::digest(&bytes)));
            }
        }
        Ok(())
    }
    let mut out = BTreeMap::new();
    walk(root, root, &mut out)?;
    Ok(out)
}

fn replay(cmd: &str, cfg: &Path, out: &Path) -> Result<(String, BTreeMap<String, String>), String> {
    let _ = fs::remove_dir_all(out);
    let status = Command::new(env!("CARGO_BIN_EXE_csns"))
        .args([cmd, "--serial", "--config"])
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .env_remove("CSNS_OUT")
        .output()
        .ctx("spawn csns")?;
    ensure(status.status.success(), || {
        format!(
            "{cmd} exited with {:?}: {}",
            status.status.code(),
            String::from_utf8_lossy(&status.stderr)
        )
    })?;
    let manifest: Value =
        serde_json::from_slice(&fs::read(out.join("manifest.json")).ctx("manifest")?)
            .ctx("manifest json")?;
    let files = hashes(out)?;
    let listed: BTreeMap<String, String> = manifest["files"]
        .as_array()
        .ok_or("manifest without files")?
        .iter()
        .map(|f| {
            (
                f["path"].as_str().unwrap_or_default().to_string(),
                f["sha256"].as_str().unwrap_or_default().to_string(),
            )
        })
        .collect();
    ensure(listed == files, || {
        format!("{cmd}: manifest disagrees with the files on disk")
    })?;
    let digest = manifest["config_digest"]
        .as_str()
        .unwrap_or_default()
        .to_string();
    Ok((digest, files))
}

pub fn replays() -> Verdict {
    let base = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join("acceptance-determinism");
    fs::create_dir_all(&base).ctx("scratch dir")?;
    let cfg_path = base.join("config.json");
    fs::write(
        &cfg_path,
        serde_json::to_vec_pretty(&config()).expect("json"),
    )
    .ctx("config")?;
    let mut total = 0;
    for cmd in COMMANDS {
        let runs = (0..3)
            .map(|i| replay(cmd, &cfg_path, &base.join(format!("{cmd}-{i}"))))
            .collect::<Result<Vec<_>, _>>()?;
        for (i, run) in runs.iter().enumerate().skip(1) {
            ensure(run.0 == runs[0].0, || {
                format!("{cmd}: digest changed in replay {i}")
            })?;
            for (path, hash) in &runs[0].1 {
                ensure(run.1.get(path) == Some(hash), || {
                    format!("{cmd}: {path} differs in replay {i}")
                })?;
            }
            ensure(run.1.len() == runs[0].1.len(), || {
                format!("{cmd}: replay {i} wrote a different file set")
            })?;
        }
        total += runs[0].1.len();
    }
    Ok(format!(
        "{} commands x 3 serial replays, {total} artifacts hash-identical per replay",
        COMMANDS.len()
    ))
}
