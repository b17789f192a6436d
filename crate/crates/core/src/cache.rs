//! Persistent store of verified solvable distributions.
//!
//! Long searches are worth saving: the cache keeps, per `(graph, k)`, a
//! distribution known to be k-solvable, its size, and whether the size was
//! proved minimal by a completed scan. Entries are re-verified against the
//! engine when read, so a stale or hand-edited cache fails loudly instead of
//! leaking wrong answers.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::grid::{GraphId, PebbleGraph};
use crate::pebble::{is_k_solvable, Distribution};
use crate::{Error, Result};

/// One cached result.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CacheEntry {
    pub graph: GraphId,
    pub k: u32,
    pub size: u32,
    /// Sparse `(vertex, count)` pairs of the stored distribution.
    pub pebbles: Vec<(usize, u32)>,
    /// True when a completed scan proved no smaller distribution works.
    pub exact: bool,
}

#[derive(Serialize, Deserialize, Default)]
struct CacheFile {
    entries: Vec<CacheEntry>,
}

/// A set of cached witnesses, optionally backed by a file.
#[derive(Debug, Default)]
pub struct WitnessCache {
    entries: Vec<CacheEntry>,
    path: Option<PathBuf>,
}

/// Results bundled with the crate, gathered by long offline runs.
const BUILTIN: &str = include_str!("../data/witness_cache.json");

impl WitnessCache {
    pub fn empty() -> Self {
        WitnessCache::default()
    }

    /// The witnesses shipped with the crate.
    pub fn builtin() -> Result<Self> {
        let file: CacheFile = serde_json::from_str(BUILTIN)?;
        Ok(WitnessCache { entries: file.entries, path: None })
    }

    /// Loads a cache file; a missing path yields an empty cache that will be
    /// created on save.
    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Ok(WitnessCache { entries: Vec::new(), path: Some(path.to_path_buf()) });
        }
        let text = std::fs::read_to_string(path)?;
        let file: CacheFile = serde_json::from_str(&text)
            .map_err(|e| Error::Cache(format!("{}: {e}", path.display())))?;
        Ok(WitnessCache { entries: file.entries, path: Some(path.to_path_buf()) })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[CacheEntry] {
        &self.entries
    }

    pub fn lookup(&self, graph: &GraphId, k: u32) -> Option<&CacheEntry> {
        self.entries.iter().find(|e| e.graph == *graph && e.k == k)
    }

    /// Returns the cached distribution for the graph after re-proving it
    /// k-solvable. A cached entry that fails verification is an error, not a
    /// miss: it means the cache does not describe this engine's world.
    pub fn verified_witness(
        &self,
        g: &PebbleGraph,
        k: u32,
    ) -> Result<Option<(Distribution, &CacheEntry)>> {
        let Some(entry) = self.lookup(&g.graph_id(), k) else {
            return Ok(None);
        };
        let dist = Distribution::from_pairs(g.n_vertices(), &entry.pebbles)?;
        if dist.size() != entry.size {
            return Err(Error::Cache(format!(
                "cached entry for {} k={k} declares size {} but stores {} pebbles",
                entry.graph,
                entry.size,
                dist.size()
            )));
        }
        if !is_k_solvable(g, &dist, k)? {
            return Err(Error::Cache(format!(
                "cached distribution for {} k={k} is not {k}-solvable",
                entry.graph
            )));
        }
        Ok(Some((dist, entry)))
    }

    /// Inserts or replaces the entry for `(entry.graph, entry.k)`.
    pub fn insert(&mut self, entry: CacheEntry) {
        match self
            .entries
            .iter_mut()
            .find(|e| e.graph == entry.graph && e.k == entry.k)
        {
            Some(slot) => *slot = entry,
            None => self.entries.push(entry),
        }
    }

    /// Writes the cache back to its file atomically.
    pub fn save(&self) -> Result<()> {
        let path = self
            .path
            .as_ref()
            .ok_or_else(|| Error::Cache("cache has no backing file".into()))?;
        let tmp = path.with_extension("tmp");
        let file = CacheFile { entries: self.entries.clone() };
        std::fs::write(&tmp, serde_json::to_string_pretty(&file)?)?;
        std::fs::rename(&tmp, path)?;
        Ok(())
    }
}
