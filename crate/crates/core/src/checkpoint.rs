//! Resumable search state on disk.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::search::{ClassificationResult, SearchSpec, SearchStats, Survivor};

pub const CHECKPOINT_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub version: u32,
    pub spec_digest: String,
    pub spec: SearchSpec,
    /// Every `r_A` rank below this one is done.
    pub next_rank: u64,
    pub survivors: Vec<Survivor>,
    pub stats: SearchStats,
    /// Wall-clock time spent so far, across resumptions.
    pub elapsed_ms: u64,
    pub complete: bool,
    pub result: Option<ClassificationResult>,
}

impl Checkpoint {
    pub fn fresh(spec: &SearchSpec) -> Self {
        Checkpoint {
            version: CHECKPOINT_VERSION,
            spec_digest: spec.digest(),
            spec: spec.clone(),
            next_rank: 0,
            survivors: Vec::new(),
            stats: SearchStats::default(),
            elapsed_ms: 0,
            complete: false,
            result: None,
        }
    }

    /// Reads a checkpoint, refusing one written for a different spec.
    pub fn load(path: &Path, spec: &SearchSpec) -> Result<Self> {
        let cp: Checkpoint = serde_json::from_slice(&fs::read(path)?)?;
        if cp.version != CHECKPOINT_VERSION {
            return Err(Error::InvalidInput(format!(
                "{}: checkpoint version {} is not supported",
                path.display(),
                cp.version
            )));
        }
        let expected = spec.digest();
        if cp.spec_digest != expected {
            return Err(Error::StaleCheckpoint { path: path.to_path_buf(), expected, found: cp.spec_digest });
        }
        Ok(cp)
    }

    /// Writes to a sibling temporary file and renames it into place.
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut tmp = path.as_os_str().to_owned();
        tmp.push(".tmp");
        let tmp = std::path::PathBuf::from(tmp);
        {
            let mut f = fs::File::create(&tmp)?;
            serde_json::to_writer(&mut f, self)?;
            f.write_all(b"\n")?;
            f.sync_all()?;
        }
        fs::rename(&tmp, path)?;
        Ok(())
    }
}
