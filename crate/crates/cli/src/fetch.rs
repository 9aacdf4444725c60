//! Download-once cache for registry datasets.

use std::fs::File;
use std::io::{self, Read};
use std::path::{Path, PathBuf};
use std::time::Duration;

use sha2::{Digest, Sha256};

use crate::error::{CliError, Result};
use crate::registry::DatasetDescriptor;

/// Environment variable naming the cache directory.
pub const CACHE_ENV: &str = "ZINET_CACHE_DIR";

/// `explicit`, else `$ZINET_CACHE_DIR`, else `$XDG_CACHE_HOME/zinet`,
/// else `~/.cache/zinet`, else `./.zinet-cache`.
pub fn resolve_cache_dir(explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    let var = |k: &str| std::env::var_os(k).filter(|v| !v.is_empty()).map(PathBuf::from);
    if let Some(p) = var(CACHE_ENV) {
        return p;
    }
    if let Some(p) = var("XDG_CACHE_HOME") {
        return p.join("zinet");
    }
    if let Some(p) = var("HOME") {
        return p.join(".cache").join("zinet");
    }
    PathBuf::from(".zinet-cache")
}

pub fn cache_path(desc: &DatasetDescriptor, cache_dir: &Path) -> PathBuf {
    cache_dir.join(format!("{}.raw", desc.name))
}

pub fn sha256_file(path: &Path) -> Result<String> {
    let mut file = File::open(path).map_err(|e| CliError::file(path, e))?;
    let mut hasher = Sha256::new();
    let mut buf = vec![0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf).map_err(|e| CliError::file(path, e))?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(hex::encode(hasher.finalize()))
}

pub fn sha256_bytes(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn expected_digest(desc: &DatasetDescriptor) -> Option<String> {
    desc.checksum.as_ref().map(|c| c.strip_prefix("sha256:").unwrap_or(c).to_ascii_lowercase())
}

/// The cached file when present and (if a checksum is known) intact.
pub fn cached(desc: &DatasetDescriptor, cache_dir: &Path) -> Result<Option<PathBuf>> {
    let path = cache_path(desc, cache_dir);
    if !path.is_file() {
        return Ok(None);
    }
    match expected_digest(desc) {
        Some(want) if sha256_file(&path)? != want => Ok(None),
        _ => Ok(Some(path)),
    }
}

/// Returns the local copy of `desc`, downloading it on a cache miss.
///
/// Downloads go to a temporary file that is renamed into place only after
/// the checksum (when one is registered) has been verified.
pub fn fetch_dataset(desc: &DatasetDescriptor, cache_dir: &Path) -> Result<PathBuf> {
    if let Some(hit) = cached(desc, cache_dir)? {
        return Ok(hit);
    }
    let url = desc.url.as_deref().ok_or_else(|| CliError::NoUrl(desc.name.clone()))?;
    std::fs::create_dir_all(cache_dir).map_err(|e| CliError::file(cache_dir, e))?;
    let target = cache_path(desc, cache_dir);
    let partial = cache_dir.join(format!("{}.part", desc.name));
    let result = download(desc, url, &partial).and_then(|()| {
        let actual = sha256_file(&partial)?;
        match expected_digest(desc) {
            Some(want) if want != actual => {
                Err(CliError::Checksum { dataset: desc.name.clone(), expected: want, actual })
            }
            _ => std::fs::rename(&partial, &target).map_err(|e| CliError::file(&target, e)),
        }
    });
    if result.is_err() {
        let _ = std::fs::remove_file(&partial);
    }
    result.map(|()| target)
}

fn download(desc: &DatasetDescriptor, url: &str, to: &Path) -> Result<()> {
    let agent: ureq::Agent = ureq::Agent::config_builder()
        .timeout_global(Some(Duration::from_secs(300)))
        .build()
        .into();
    let transport = |message: String| CliError::Transport { dataset: desc.name.clone(), url: url.to_owned(), message };
    let response = agent.get(url).call().map_err(|e| match e {
        ureq::Error::StatusCode(status) => {
            CliError::HttpStatus { dataset: desc.name.clone(), url: url.to_owned(), status }
        }
        other => transport(other.to_string()),
    })?;
    let mut out = File::create(to).map_err(|e| CliError::file(to, e))?;
    let mut body = response.into_body().into_reader();
    io::copy(&mut body, &mut out).map_err(|e| transport(e.to_string()))?;
    Ok(())
}
