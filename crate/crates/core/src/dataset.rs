//! Line-delimited JSON scene files and the generators behind them.
//!
//! Every scene of a run gets its own seed, split from the run seed with
//! [`instance_seed`], so any scene can be regenerated alone.

use std::fs;
use std::io::{self, BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::data::{DataSet, Domain};
use crate::glyph::{generate_scene, GlyphError, GlyphFamily, GlyphSceneSpec, NoiseParams};
use crate::inference::instance_seed;
use crate::metrics::GroundTruth;
use crate::temporal::{generate_stream, Activity, EventStreamSpec, StreamError};
use crate::workspace::SceneInterpretation;

/// One scene. Generated scenes carry their seed, spec and ground truth;
/// hand-written ones may carry data only.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneRecord {
    pub index: usize,
    #[serde(default)]
    pub seed: u64,
    /// The concrete spec the scene was generated from.
    #[serde(default)]
    pub spec: serde_json::Value,
    pub data: DataSet,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth: Option<GroundTruth>,
}

/// Interpretation of one scene.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SceneReport {
    pub index: usize,
    pub interpretation: SceneInterpretation,
}

/// What glyph scenes are drawn from: one fixed layout or a random family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GlyphSource {
    Fixed(GlyphSceneSpec),
    Family(GlyphFamily),
}

/// Event streams cycle through `activities`, otherwise following `template`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StreamFamily {
    pub activities: Vec<Activity>,
    pub template: EventStreamSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StreamSource {
    Family(StreamFamily),
    Fixed(EventStreamSpec),
}

/// Noise applied on top of a stream spec.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct StreamNoise {
    /// Probability that a core label degrades to its ambiguous variant.
    pub confusion: f64,
    pub insertion_rate: f64,
    pub deletion_rate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GenerateRequest {
    Glyph { source: GlyphSource, noise: NoiseParams },
    Temporal { source: StreamSource, noise: Option<StreamNoise> },
}

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}:{line}: {source}")]
    Parse { path: PathBuf, line: usize, source: serde_json::Error },
    #[error(transparent)]
    Glyph(#[from] GlyphError),
    #[error(transparent)]
    Stream(#[from] StreamError),
    #[error("invalid spec: {0}")]
    Spec(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> DatasetError + '_ {
    move |source| DatasetError::Io { path: path.to_path_buf(), source }
}

impl GenerateRequest {
    pub fn domain(&self) -> Domain {
        match self {
            GenerateRequest::Glyph { .. } => Domain::Glyph,
            GenerateRequest::Temporal { .. } => Domain::Temporal,
        }
    }

    /// Scene `index` of a run seeded with `seed`.
    pub fn scene(&self, index: usize, seed: u64) -> Result<SceneRecord, DatasetError> {
        let scene_seed = instance_seed(seed, index);
        let (spec, data, truth) = match self {
            GenerateRequest::Glyph { source, noise } => {
                let spec = match source {
                    GlyphSource::Fixed(s) => s.clone(),
                    GlyphSource::Family(f) => {
                        f.validate()?;
                        f.sample(scene_seed)
                    }
                };
                let noise = NoiseParams { seed: scene_seed, ..noise.clone() };
                let (data, truth) = generate_scene(&spec, &noise)?;
                (serde_json::to_value(&spec).expect("specs serialize"), data, truth)
            }
            GenerateRequest::Temporal { source, noise } => {
                let mut spec = match source {
                    StreamSource::Fixed(s) => s.clone(),
                    StreamSource::Family(f) => {
                        if f.activities.is_empty() {
                            return Err(DatasetError::Spec("stream family lists no activities".into()));
                        }
                        EventStreamSpec { activity: f.activities[index % f.activities.len()], ..f.template.clone() }
                    }
                };
                if let Some(n) = noise {
                    spec = spec.with_confusion(n.confusion);
                    spec.insertion_rate = n.insertion_rate;
                    spec.deletion_rate = n.deletion_rate;
                }
                spec.seed = scene_seed;
                let (data, truth) = generate_stream(&spec)?;
                (serde_json::to_value(&spec).expect("specs serialize"), data, truth)
            }
        };
        Ok(SceneRecord { index, seed: scene_seed, spec, data, truth: Some(truth) })
    }

    pub fn generate(&self, count: usize, seed: u64) -> Result<Vec<SceneRecord>, DatasetError> {
        (0..count).map(|i| self.scene(i, seed)).collect()
    }
}

/// Parse a JSON document from `path`.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, DatasetError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    serde_json::from_str(&text).map_err(|source| DatasetError::Parse { path: path.to_path_buf(), line: 1, source })
}

/// One value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, DatasetError> {
    let file = fs::File::open(path).map_err(io_err(path))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(io_err(path))?;
        if line.trim().is_empty() {
            continue;
        }
        let value = serde_json::from_str(&line)
            .map_err(|source| DatasetError::Parse { path: path.to_path_buf(), line: i + 1, source })?;
        out.push(value);
    }
    Ok(out)
}

/// Replace `path` with `bytes` in one rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), DatasetError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io_err(dir))?;
    tmp.write_all(bytes).map_err(io_err(path))?;
    tmp.persist(path).map_err(|e| DatasetError::Io { path: path.to_path_buf(), source: e.error })?;
    Ok(())
}

pub fn to_jsonl<T: Serialize>(values: &[T]) -> String {
    let mut out = String::new();
    for v in values {
        out.push_str(&serde_json::to_string(v).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn write_jsonl<T: Serialize>(path: &Path, values: &[T]) -> Result<(), DatasetError> {
    write_atomic(path, to_jsonl(values).as_bytes())
}
