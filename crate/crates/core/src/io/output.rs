use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::flow::{FlowConfig, FlowProblem, FlowState, Trajectory};
use crate::geometry::{curvature, Grid};
use crate::par::{self, Execution};

use super::config::{config_to_text, parse_config};
use super::csv::{fmt_num, load_profile_csv, write_curvature_csv, write_profile_csv};

pub const MANIFEST_FILE: &str = "manifest.json";
pub const CONFIG_FILE: &str = "run.cfg";
pub const TRAJECTORY_INDEX: &str = "trajectory.csv";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InventoryEntry {
    pub name: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Incomplete { reason: String },
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub software_version: &'static str,
    pub config: FlowConfig,
    pub grid_hash: String,
    pub started_unix_s: f64,
    pub finished_unix_s: f64,
    pub steps: usize,
    pub completion: RunStatus,
    pub files: Vec<InventoryEntry>,
}

/// The subset of a manifest needed to check it against the files on disk.
#[derive(Debug, Clone, Deserialize)]
pub struct ManifestInventory {
    pub steps: usize,
    pub completion: RunStatus,
    pub files: Vec<InventoryEntry>,
}

fn now_unix() -> f64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs_f64())
        .unwrap_or(0.0)
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// SHA-256 of the node coordinates as little-endian bytes.
pub fn grid_hash(grid: &Grid) -> String {
    let mut h = Sha256::new();
    for x in grid.nodes() {
        h.update(x.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// An output directory that checksums everything written through it.
#[derive(Debug)]
pub struct OutputDir {
    root: PathBuf,
    files: Vec<InventoryEntry>,
    started: f64,
}

impl OutputDir {
    pub fn create(root: impl Into<PathBuf>) -> Result<Self> {
        let root = root.into();
        fs::create_dir_all(&root)?;
        Ok(OutputDir {
            root,
            files: Vec::new(),
            started: now_unix(),
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<PathBuf> {
        let path = self.root.join(name);
        fs::write(&path, bytes)?;
        self.files.retain(|e| e.name != name);
        self.files.push(InventoryEntry {
            name: name.to_string(),
            sha256: sha256_hex(bytes),
            bytes: bytes.len() as u64,
        });
        Ok(path)
    }

    pub fn write_with(&mut self, name: &str, f: impl FnOnce(&mut Vec<u8>) -> Result<()>) -> Result<PathBuf> {
        let mut buf = Vec::new();
        f(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn write_json<T: Serialize + ?Sized>(&mut self, name: &str, value: &T) -> Result<PathBuf> {
        let mut bytes = serde_json::to_vec_pretty(value)?;
        bytes.push(b'\n');
        self.write(name, &bytes)
    }

    pub fn inventory(&self) -> &[InventoryEntry] {
        &self.files
    }

    /// Writes `manifest.json` listing every file written so far.
    pub fn finish(self, config: &FlowConfig, grid: &Grid, steps: usize, completion: RunStatus) -> Result<RunManifest> {
        let manifest = RunManifest {
            software_version: env!("CARGO_PKG_VERSION"),
            config: config.clone(),
            grid_hash: grid_hash(grid),
            started_unix_s: self.started,
            finished_unix_s: now_unix(),
            steps,
            completion,
            files: self.files,
        };
        let mut bytes = serde_json::to_vec_pretty(&manifest)?;
        bytes.push(b'\n');
        fs::write(self.root.join(MANIFEST_FILE), bytes)?;
        Ok(manifest)
    }
}

/// Names of inventory entries whose file is missing or whose checksum differs.
pub fn verify_manifest(dir: &Path) -> Result<Vec<String>> {
    let inv = read_manifest(dir)?;
    let mut bad = Vec::new();
    for e in &inv.files {
        match fs::read(dir.join(&e.name)) {
            Ok(bytes) if sha256_hex(&bytes) == e.sha256 => {}
            _ => bad.push(e.name.clone()),
        }
    }
    Ok(bad)
}

pub fn read_manifest(dir: &Path) -> Result<ManifestInventory> {
    let text = fs::read_to_string(dir.join(MANIFEST_FILE))?;
    Ok(serde_json::from_str(&text)?)
}

fn state_names(index: usize, t: f64) -> (String, String) {
    let stem = format!("{index:05}_t={t:.6e}");
    (format!("state_{stem}.csv"), format!("profile_{stem}.csv"))
}

/// Writes the curvature field and the raw profile of one recorded state.
pub fn emit_state(out: &mut OutputDir, index: usize, state: &FlowState) -> Result<(PathBuf, PathBuf)> {
    let field = curvature(&state.profile)?;
    let (state_name, profile_name) = state_names(index, state.t);
    let a = out.write_with(&state_name, |b| write_curvature_csv(b, &field))?;
    let b = out.write_with(&profile_name, |b| write_profile_csv(b, &state.profile))?;
    Ok((a, b))
}

/// Writes every recorded state, the run config and the index linking them.
/// CSV rendering fans out across states; files are written in index order.
pub fn emit_trajectory(out: &mut OutputDir, traj: &Trajectory, exec: Execution) -> Result<()> {
    let rendered = par::map_indexed(exec, traj.states.len(), |k| -> Result<_> {
        let s = &traj.states[k];
        let field = curvature(&s.profile)?;
        let mut state_csv = Vec::new();
        write_curvature_csv(&mut state_csv, &field)?;
        let mut profile_csv = Vec::new();
        write_profile_csv(&mut profile_csv, &s.profile)?;
        Ok((state_csv, profile_csv))
    });
    let mut index = csv::Writer::from_writer(Vec::new());
    index.write_record(["index", "t", "profile", "state"])?;
    for (k, r) in rendered.into_iter().enumerate() {
        let (state_csv, profile_csv) = r?;
        let t = traj.states[k].t;
        let (state_name, profile_name) = state_names(k, t);
        out.write(&state_name, &state_csv)?;
        out.write(&profile_name, &profile_csv)?;
        index.write_record([k.to_string(), fmt_num(t), profile_name, state_name])?;
    }
    let index = index.into_inner().map_err(|e| Error::Io(e.into_error()))?;
    out.write(TRAJECTORY_INDEX, &index)?;
    out.write(CONFIG_FILE, config_to_text(&traj.config).as_bytes())?;
    Ok(())
}

/// Reads back a trajectory written by [`emit_trajectory`].
pub fn load_trajectory(dir: &Path) -> Result<Trajectory> {
    let config = parse_config(&fs::read_to_string(dir.join(CONFIG_FILE))?)?;
    let mut reader = csv::Reader::from_path(dir.join(TRAJECTORY_INDEX))?;
    let mut states: Vec<FlowState> = Vec::new();
    for record in reader.records() {
        let record = record?;
        let t: f64 = record[1]
            .parse()
            .map_err(|_| Error::Contract(format!("bad time `{}` in {TRAJECTORY_INDEX}", &record[1])))?;
        let profile = load_profile_csv(&dir.join(&record[2]), config.n)?;
        states.push(FlowState { t, profile });
    }
    if states.is_empty() {
        return Err(Error::InsufficientData(format!("{} lists no states", TRAJECTORY_INDEX)));
    }
    let steps = read_manifest(dir).map(|m| m.steps).unwrap_or(0);
    let boundary_mismatch = FlowProblem::from_config(&config, &states[0].profile).boundary_mismatch(&states[0].profile);
    Ok(Trajectory {
        states,
        config,
        boundary_mismatch,
        steps,
    })
}
