use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::engine::TaskResult;
use crate::error::{Error, Result};

/// Saved progress of a search: finished task results keyed by the hash of
/// the search specification. Tasks not listed are pending.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub spec_hash: String,
    pub tasks_total: usize,
    pub results: Vec<TaskResult>,
}

impl Checkpoint {
    pub const VERSION: u32 = 1;

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        let cp: Checkpoint = serde_json::from_str(&text)
            .map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))?;
        if cp.version != Self::VERSION {
            return Err(Error::Checkpoint(format!(
                "{}: version {} is not supported",
                path.display(),
                cp.version
            )));
        }
        Ok(cp)
    }

    /// Writes to a temporary file first so that an interrupted save never
    /// leaves a truncated checkpoint.
    pub fn save(&self, path: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Checkpoint(e.to_string()))?;
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text).map_err(|e| Error::Checkpoint(format!("{}: {e}", tmp.display())))?;
        fs::rename(&tmp, path).map_err(|e| Error::Checkpoint(format!("{}: {e}", path.display())))
    }

    pub fn pending(&self) -> Vec<usize> {
        let done: std::collections::BTreeSet<usize> = self.results.iter().map(|r| r.task).collect();
        (0..self.tasks_total).filter(|t| !done.contains(t)).collect()
    }
}
