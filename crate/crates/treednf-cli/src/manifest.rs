//! Run manifests: every file-producing subcommand records its resolved
//! flags, seeds, and input digests next to the output, so identical
//! manifests plus identical inputs reproduce byte-identical outputs.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Serialize, Default)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub argv: Vec<String>,
    pub seeds: Vec<u64>,
    pub inputs: BTreeMap<String, String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl RunManifest {
    pub fn new(subcommand: &str) -> Self {
        RunManifest {
            tool: "treednf",
            version: env!("CARGO_PKG_VERSION"),
            subcommand: subcommand.to_string(),
            argv: std::env::args().collect(),
            ..Default::default()
        }
    }

    pub fn record_input(&mut self, path: &Path, content: &str) {
        let mut hasher = Sha256::new();
        hasher.update(content.as_bytes());
        let digest = hasher.finalize();
        let hex: String = digest.iter().map(|b| format!("{b:02x}")).collect();
        self.inputs.insert(path.display().to_string(), format!("sha256:{hex}"));
    }

    /// Writes the manifest to `explicit` when given, else next to `output`
    /// as `<output>.manifest.json`. Stdout-only runs without an explicit
    /// path write no manifest.
    pub fn write(&self, explicit: Option<&Path>, output: Option<&Path>) -> Result<()> {
        let target: Option<PathBuf> = match (explicit, output) {
            (Some(p), _) => Some(p.to_path_buf()),
            (None, Some(out)) => {
                let mut name = out.file_name().unwrap_or_default().to_os_string();
                name.push(".manifest.json");
                Some(out.with_file_name(name))
            }
            (None, None) => None,
        };
        if let Some(path) = target {
            let body = serde_json::to_string_pretty(self)?;
            atomic_write(&path, &body)?;
        }
        Ok(())
    }
}

/// Reads a text input and records its digest in the manifest.
pub fn read_input(path: &Path, manifest: &mut RunManifest) -> Result<String> {
    let content =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    manifest.record_input(path, &content);
    Ok(content)
}

/// Write-temp-then-rename so partially written outputs never land.
pub fn atomic_write(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .with_context(|| format!("creating temp file in {}", dir.display()))?;
    tmp.write_all(content.as_bytes())?;
    tmp.persist(path).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}
