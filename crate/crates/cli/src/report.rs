use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, Serialize)]
pub struct Input {
    pub path: String,
    pub sha256: String,
}

/// Everything a command claims. `verdicts` are pass/fail checks and decide
/// the exit code; `flags` are informational. Maps are ordered so the JSON
/// form is stable; `timestamp` is the only field that varies between runs.
#[derive(Clone, Debug, Default, Serialize)]
pub struct CommandReport {
    pub command: String,
    pub inputs: Vec<Input>,
    pub verdicts: BTreeMap<String, bool>,
    pub flags: BTreeMap<String, bool>,
    pub counts: BTreeMap<String, u64>,
    pub genus: BTreeMap<String, u64>,
    pub details: Vec<String>,
    pub outputs: Vec<String>,
    pub timestamp: u64,
}

impl CommandReport {
    pub fn new(command: &str) -> Self {
        CommandReport { command: command.to_string(), ..Default::default() }
    }

    /// Reads a file and records its hash.
    pub fn read(&mut self, path: &Path) -> Result<String> {
        let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
        let digest = Sha256::digest(&bytes);
        self.inputs.push(Input {
            path: path.display().to_string(),
            sha256: digest.iter().map(|b| format!("{b:02x}")).collect(),
        });
        String::from_utf8(bytes).with_context(|| format!("{} is not UTF-8", path.display()))
    }

    pub fn write(&mut self, path: &Path, text: &str) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        }
        std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))?;
        self.outputs.push(path.display().to_string());
        Ok(())
    }

    pub fn verdict(&mut self, key: &str, ok: bool) {
        self.verdicts.insert(key.to_string(), ok);
    }

    pub fn flag(&mut self, key: &str, on: bool) {
        self.flags.insert(key.to_string(), on);
    }

    pub fn count(&mut self, key: &str, value: impl TryInto<u64>) {
        self.counts.insert(key.to_string(), value.try_into().unwrap_or(u64::MAX));
    }

    pub fn genus(&mut self, key: &str, value: impl Into<u64>) {
        self.genus.insert(key.to_string(), value.into());
    }

    pub fn detail(&mut self, line: impl Into<String>) {
        self.details.push(line.into());
    }

    pub fn passed(&self) -> bool {
        self.verdicts.values().all(|&v| v)
    }

    pub fn stamp(&mut self) {
        self.timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    }

    pub fn to_text(&self) -> String {
        let yes = |b: bool| if b { "yes" } else { "no" };
        let mut out = String::new();
        let _ = writeln!(out, "{}", self.command);
        for i in &self.inputs {
            let _ = writeln!(out, "  input   {} (sha256 {})", i.path, &i.sha256[..16]);
        }
        for (k, v) in &self.counts {
            let _ = writeln!(out, "  {k:<22} {v}");
        }
        for (k, v) in &self.genus {
            let _ = writeln!(out, "  genus {:<16} {v}", k);
        }
        for (k, v) in &self.flags {
            let _ = writeln!(out, "  {k:<22} {}", yes(*v));
        }
        for (k, v) in &self.verdicts {
            let _ = writeln!(out, "  check {:<16} {}", k, if *v { "PASS" } else { "FAIL" });
        }
        for d in &self.details {
            let _ = writeln!(out, "  - {d}");
        }
        for o in &self.outputs {
            let _ = writeln!(out, "  wrote   {o}");
        }
        out
    }
}
