//! Append-only NDJSON cache of free-factor verdicts, keyed by canonical code.

use std::collections::HashMap;
use std::fs::{self, OpenOptions};
use std::io::{Read, Seek, SeekFrom, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::{Deserialize, Serialize};
use subfactor_core::{is_free_factor, FactorClass, FreeFactorVerdict, ReductionBudget};

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheRecord {
    pub key: String,
    pub verdict: FreeFactorVerdict,
}

pub struct Cache {
    path: Option<PathBuf>,
    map: HashMap<String, FreeFactorVerdict>,
    pub hits: usize,
    pub misses: usize,
}

fn key(a: &FactorClass) -> String {
    format!("F{}:{}", a.ambient_rank(), a.code())
}

fn ends_mid_line(path: &Path) -> bool {
    let mut last = [0u8];
    fs::File::open(path)
        .and_then(|mut f| {
            f.seek(SeekFrom::End(-1))?;
            f.read_exact(&mut last)
        })
        .is_ok()
        && last[0] != b'\n'
}

impl Cache {
    pub fn disabled() -> Self {
        Cache {
            path: None,
            map: HashMap::new(),
            hits: 0,
            misses: 0,
        }
    }

    /// Loads every complete record; a torn final line is ignored.
    pub fn open(path: &Path) -> Result<Self> {
        let mut map = HashMap::new();
        if let Ok(text) = fs::read_to_string(path) {
            for line in text.lines() {
                if let Ok(r) = serde_json::from_str::<CacheRecord>(line) {
                    map.insert(r.key, r.verdict);
                }
            }
        }
        Ok(Cache {
            path: Some(path.to_path_buf()),
            map,
            hits: 0,
            misses: 0,
        })
    }

    /// Verdict for `a`, from the cache or by reduction. Only decided verdicts
    /// are stored, since they do not depend on the budget.
    pub fn free_factor(&mut self, a: &FactorClass, budget: ReductionBudget) -> Result<FreeFactorVerdict> {
        let k = key(a);
        if let Some(v) = self.map.get(&k) {
            self.hits += 1;
            return Ok(v.clone());
        }
        self.misses += 1;
        let v = is_free_factor(a, budget)?;
        if matches!(v, FreeFactorVerdict::NotReduced { .. }) {
            return Ok(v);
        }
        if let Some(path) = &self.path {
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).ok();
            }
            let mut f = OpenOptions::new()
                .create(true)
                .append(true)
                .open(path)
                .with_context(|| format!("opening cache {}", path.display()))?;
            let line = serde_json::to_string(&CacheRecord {
                key: k.clone(),
                verdict: v.clone(),
            })?;
            // a previous writer may have died mid-line
            if ends_mid_line(path) {
                writeln!(f)?;
            }
            writeln!(f, "{line}")?;
        }
        self.map.insert(k, v.clone());
        Ok(v)
    }
}
