//! JSON-lines record files: a manifest line, then one line per replication.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use lcslab_core::SeedSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{ExperimentConfig, SCHEMA_VERSION};
use crate::error::{LabError, LabResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: u32,
    pub config_hash: String,
    pub config: ExperimentConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedRecord {
    pub base_seed: u64,
    pub stream_id: u64,
}

impl From<SeedSpec> for SeedRecord {
    fn from(s: SeedSpec) -> Self {
        Self {
            base_seed: s.base_seed,
            stream_id: s.stream_id,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub experiment_id: String,
    pub rep_index: usize,
    pub n: usize,
    pub values: BTreeMap<String, f64>,
    /// Seconds spent on this replication.
    pub wall_time: f64,
    pub seed: SeedRecord,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Line {
    Manifest(Manifest),
    Rep(ReplicationRecord),
}

/// `stream_id` from the first eight bytes of
/// `sha256(experiment_id \0 rep_index \0 n)`.
pub fn stream_id(experiment_id: &str, rep_index: usize, n: usize) -> u64 {
    let mut h = Sha256::new();
    h.update(experiment_id.as_bytes());
    h.update([0]);
    h.update((rep_index as u64).to_le_bytes());
    h.update([0]);
    h.update((n as u64).to_le_bytes());
    let d = h.finalize();
    u64::from_le_bytes(d[..8].try_into().expect("digest has 32 bytes"))
}

impl Manifest {
    pub fn new(config: &ExperimentConfig) -> Self {
        Self {
            schema: SCHEMA_VERSION,
            config_hash: config.hash(),
            config: config.clone(),
        }
    }
}

/// Parsed contents of a record file.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordFile {
    pub manifest: Option<Manifest>,
    pub records: Vec<ReplicationRecord>,
    /// Byte length of the complete lines; anything after it is a torn write.
    pub valid_len: u64,
}

/// Reads a record file. A final line without its newline is treated as an
/// interrupted write and ignored; any other bad line is an error.
pub fn read_records(path: &Path) -> LabResult<RecordFile> {
    let file = File::open(path).map_err(|e| LabError::io(path, e))?;
    let mut reader = BufReader::new(file);
    let mut out = RecordFile {
        manifest: None,
        records: Vec::new(),
        valid_len: 0,
    };
    let mut buf = String::new();
    let mut line_no = 0;
    loop {
        buf.clear();
        let read = reader.read_line(&mut buf).map_err(|e| LabError::io(path, e))?;
        if read == 0 {
            break;
        }
        line_no += 1;
        if !buf.ends_with('\n') {
            break;
        }
        let text = buf.trim_end();
        if !text.is_empty() {
            let parse_err = |message: String| LabError::Parse {
                path: path.to_owned(),
                line: line_no,
                message,
            };
            match serde_json::from_str::<Line>(text).map_err(|e| parse_err(e.to_string()))? {
                Line::Manifest(m) => {
                    if line_no != 1 {
                        return Err(parse_err("manifest must be the first line".into()));
                    }
                    out.manifest = Some(m);
                }
                Line::Rep(r) => {
                    if out.manifest.is_none() {
                        return Err(parse_err("record before manifest".into()));
                    }
                    out.records.push(r);
                }
            }
        }
        out.valid_len += read as u64;
    }
    Ok(out)
}

/// Append-only writer; every batch is flushed before `append` returns.
pub struct RecordWriter {
    path: PathBuf,
    out: BufWriter<File>,
}

impl RecordWriter {
    /// Starts a fresh file holding only the manifest.
    pub fn create(path: &Path, manifest: &Manifest) -> LabResult<Self> {
        let file = File::create(path).map_err(|e| LabError::io(path, e))?;
        let mut w = Self {
            path: path.to_owned(),
            out: BufWriter::new(file),
        };
        w.write_line(&Line::Manifest(manifest.clone()))?;
        w.flush()?;
        Ok(w)
    }

    /// Reopens an existing file, cutting it back to `valid_len` bytes.
    pub fn reopen(path: &Path, valid_len: u64) -> LabResult<Self> {
        let file = OpenOptions::new().write(true).open(path).map_err(|e| LabError::io(path, e))?;
        file.set_len(valid_len).map_err(|e| LabError::io(path, e))?;
        let mut file = file;
        std::io::Seek::seek(&mut file, std::io::SeekFrom::End(0)).map_err(|e| LabError::io(path, e))?;
        Ok(Self {
            path: path.to_owned(),
            out: BufWriter::new(file),
        })
    }

    fn write_line(&mut self, line: &Line) -> LabResult<()> {
        serde_json::to_writer(&mut self.out, line)?;
        self.out.write_all(b"\n").map_err(|e| LabError::io(&self.path, e))
    }

    pub fn append(&mut self, records: &[ReplicationRecord]) -> LabResult<()> {
        for r in records {
            self.write_line(&Line::Rep(r.clone()))?;
        }
        self.flush()
    }

    fn flush(&mut self) -> LabResult<()> {
        self.out.flush().map_err(|e| LabError::io(&self.path, e))?;
        self.out.get_ref().sync_data().map_err(|e| LabError::io(&self.path, e))
    }
}
