//! JSON Lines helpers and checksummed, versioned artifact files.

use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Json {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}: expected a {expected} file, found {found}")]
    WrongKind {
        path: PathBuf,
        expected: String,
        found: String,
    },
    #[error("{path}: unsupported format version {found} (supported: {supported})")]
    Version {
        path: PathBuf,
        found: u32,
        supported: u32,
    },
    #[error("{path}: checksum mismatch, the file is corrupt")]
    Corrupt { path: PathBuf },
}

impl IoError {
    fn io(path: &Path, source: std::io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn json(path: &Path, line: usize, err: impl std::fmt::Display) -> Self {
        IoError::Json {
            path: path.to_path_buf(),
            line,
            message: err.to_string(),
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>, IoError> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| IoError::io(parent, e))?;
    }
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| IoError::io(path, e))
}

pub fn write_jsonl<T: Serialize>(path: &Path, items: &[T]) -> Result<(), IoError> {
    let mut out = create(path)?;
    for item in items {
        serde_json::to_writer(&mut out, item).map_err(|e| IoError::json(path, 0, e))?;
        out.write_all(b"\n").map_err(|e| IoError::io(path, e))?;
    }
    out.flush().map_err(|e| IoError::io(path, e))
}

/// Reads one value per non-blank line.
pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, IoError> {
    let file = File::open(path).map_err(|e| IoError::io(path, e))?;
    let mut items = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| IoError::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        items.push(serde_json::from_str(&line).map_err(|e| IoError::json(path, i + 1, e))?);
    }
    Ok(items)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value).map_err(|e| IoError::json(path, 0, e))?;
    out.write_all(b"\n").map_err(|e| IoError::io(path, e))?;
    out.flush().map_err(|e| IoError::io(path, e))
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| IoError::json(path, 0, e))
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    let mut out = create(path)?;
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| IoError::io(path, e))
}

/// Hex SHA-256 of the compact JSON form of `value`.
pub fn content_hash<T: Serialize>(value: &T) -> String {
    let json = serde_json::to_string(value).expect("serializable value");
    hex::encode(Sha256::digest(json.as_bytes()))
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    kind: String,
    version: u32,
    sha256: String,
    payload: serde_json::Value,
}

/// Writes `payload` wrapped with its kind, format version and checksum.
pub fn save_artifact<T: Serialize>(
    path: &Path,
    kind: &str,
    version: u32,
    payload: &T,
) -> Result<(), IoError> {
    let payload = serde_json::to_value(payload).map_err(|e| IoError::json(path, 0, e))?;
    let envelope = Envelope {
        kind: kind.to_string(),
        version,
        sha256: content_hash(&payload),
        payload,
    };
    write_json(path, &envelope)
}

/// Reads an artifact written by [`save_artifact`], checking kind, version and
/// checksum before decoding the payload.
pub fn load_artifact<T: DeserializeOwned>(
    path: &Path,
    kind: &str,
    version: u32,
) -> Result<T, IoError> {
    let envelope: Envelope = read_json(path)?;
    if envelope.kind != kind {
        return Err(IoError::WrongKind {
            path: path.to_path_buf(),
            expected: kind.to_string(),
            found: envelope.kind,
        });
    }
    if envelope.version != version {
        return Err(IoError::Version {
            path: path.to_path_buf(),
            found: envelope.version,
            supported: version,
        });
    }
    if content_hash(&envelope.payload) != envelope.sha256 {
        return Err(IoError::Corrupt {
            path: path.to_path_buf(),
        });
    }
    serde_json::from_value(envelope.payload).map_err(|e| IoError::json(path, 0, e))
}
