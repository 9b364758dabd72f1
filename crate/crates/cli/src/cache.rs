//! Persisted theta memo tables under `PARAHECKE_CACHE_DIR`.
//!
//! One file per datum, named by the SHA-256 of the datum's canonical JSON, so
//! editing a datum never picks up stale entries. The format version is part
//! of both the file name and the payload.

use std::path::{Path, PathBuf};

use parahecke::HeckeAlgebra;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const CACHE_VERSION: u64 = 1;
pub const CACHE_ENV: &str = "PARAHECKE_CACHE_DIR";

pub fn datum_hash(h: &HeckeAlgebra) -> String {
    let digest = Sha256::digest(h.datum.canonical_json().as_bytes());
    format!("{digest:x}")
}

pub fn cache_file(dir: &Path, h: &HeckeAlgebra) -> PathBuf {
    dir.join(format!("theta-v{CACHE_VERSION}-{}.json", datum_hash(h)))
}

pub fn cache_dir() -> Option<PathBuf> {
    std::env::var_os(CACHE_ENV).filter(|s| !s.is_empty()).map(PathBuf::from)
}

/// Loads cached theta entries; unreadable or mismatched files are ignored.
pub fn load(dir: &Path, h: &HeckeAlgebra) -> usize {
    let Ok(text) = std::fs::read_to_string(cache_file(dir, h)) else { return 0 };
    let Ok(v) = serde_json::from_str::<Value>(&text) else { return 0 };
    if v["version"] != json!(CACHE_VERSION) || v["datum_hash"] != json!(datum_hash(h)) {
        return 0;
    }
    h.import_theta_cache(&v["theta"]).unwrap_or(0)
}

pub fn save(dir: &Path, h: &HeckeAlgebra) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    let payload = json!({
        "version": CACHE_VERSION,
        "datum_hash": datum_hash(h),
        "theta": h.export_theta_cache(),
    });
    let path = cache_file(dir, h);
    let tmp = path.with_extension(format!("tmp{}", std::process::id()));
    std::fs::write(&tmp, payload.to_string())?;
    std::fs::rename(tmp, path)
}
