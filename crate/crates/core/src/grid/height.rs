use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use serde::{Deserialize, Serialize};

use crate::format::{read_tiling, TilingFile};
use crate::lattice::{RectangleTiling, StepType};
use crate::oracle::{solve_rectangle, SearchConfig, SearchStatus};
use crate::verify::verify_rectangle_tiling;

use super::{stair_tiling, GridError};

/// Heights above this are not searched unless the caller raises the bound.
pub const DEFAULT_MAX_HEIGHT: u64 = 64;

/// Environment variable naming the directory a [`HeightTable`] persists to.
pub const CACHE_DIR_ENV: &str = "GAPTILE_CACHE_DIR";

const INDEX_FILE: &str = "heights.json";

/// Least `f` such that `[0, m-1] × [0, f-1]` is tiled by paths with `k`
/// unit steps right and `l` unit steps up, with a witness.
pub fn min_height_rect(k: usize, l: usize, m: usize) -> Result<(u64, RectangleTiling), GridError> {
    min_height_rect_with(k, l, m, DEFAULT_MAX_HEIGHT, &SearchConfig::default())
}

pub fn min_height_rect_with(
    k: usize,
    l: usize,
    m: usize,
    max_height: u64,
    cfg: &SearchConfig,
) -> Result<(u64, RectangleTiling), GridError> {
    let (lo, hi) = (k + 1, k + l + 1);
    if k == 0 || l == 0 || m < lo || m > hi {
        return Err(GridError::RangeError { k, l, m, lo, hi });
    }
    if m == hi {
        return Ok((l as u64 + 1, stair_tiling(k, l)));
    }
    let step_type = StepType::unit(k, l);
    let per_path = hi as u64;
    let cfg = SearchConfig {
        max_solutions: 1,
        ..*cfg
    };
    for f in (l as u64 + 1)..=max_height {
        if !(m as u64 * f).is_multiple_of(per_path) {
            continue;
        }
        let out = solve_rectangle(&step_type, m as u64, f, &cfg)
            .expect("unit steps are always admissible");
        match out.status {
            SearchStatus::Found => {
                let mut w = out.witnesses;
                return Ok((f, w.swap_remove(0)));
            }
            SearchStatus::BudgetExceeded => return Err(GridError::SearchBudget { m, f }),
            SearchStatus::ExhaustedNoSolution => {}
        }
    }
    Err(GridError::SearchExhausted {
        k,
        l,
        m,
        bound: max_height,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightEntry {
    pub f: u64,
    pub witness: RectangleTiling,
}

#[derive(Debug, Serialize, Deserialize)]
struct IndexRecord {
    f: u64,
    witness_path: String,
}

type Key = (usize, usize, usize);

/// Memoized [`min_height_rect`] results, optionally persisted to a directory
/// as `heights.json` plus one witness file per entry.
///
/// Reads are concurrent; writes to disk are serialized and atomic
/// (temporary file, then rename).
#[derive(Debug)]
pub struct HeightTable {
    entries: RwLock<BTreeMap<Key, Arc<HeightEntry>>>,
    dir: Option<PathBuf>,
    write_lock: Mutex<()>,
    max_height: u64,
    search: SearchConfig,
}

impl Default for HeightTable {
    fn default() -> Self {
        Self::in_memory()
    }
}

fn cache_err(e: impl std::fmt::Display) -> GridError {
    GridError::Cache(e.to_string())
}

fn key_string((k, l, m): Key) -> String {
    format!("{k},{l},{m}")
}

fn parse_key(s: &str) -> Option<Key> {
    let mut it = s.split(',').map(|p| p.trim().parse::<usize>().ok());
    let key = (it.next()??, it.next()??, it.next()??);
    it.next().is_none().then_some(key)
}

impl HeightTable {
    pub fn in_memory() -> Self {
        HeightTable {
            entries: RwLock::new(BTreeMap::new()),
            dir: None,
            write_lock: Mutex::new(()),
            max_height: DEFAULT_MAX_HEIGHT,
            search: SearchConfig::default(),
        }
    }

    /// Opens (or creates) a persistent table. Stored witnesses are verified
    /// on load; entries that fail are dropped and recomputed on demand.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, GridError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir).map_err(cache_err)?;
        let mut map = BTreeMap::new();
        let index = dir.join(INDEX_FILE);
        if index.exists() {
            let raw = fs::read_to_string(&index).map_err(cache_err)?;
            let records: BTreeMap<String, IndexRecord> =
                serde_json::from_str(&raw).map_err(cache_err)?;
            for (key, rec) in records {
                let Some(key) = parse_key(&key) else { continue };
                let Ok(file) = read_tiling(&dir.join(&rec.witness_path)) else {
                    continue;
                };
                let Some(witness) = file.into_rectangle() else {
                    continue;
                };
                if valid_entry(key, rec.f, &witness) {
                    map.insert(key, Arc::new(HeightEntry { f: rec.f, witness }));
                }
            }
        }
        Ok(HeightTable {
            entries: RwLock::new(map),
            dir: Some(dir),
            ..Self::in_memory()
        })
    }

    /// Persistent table in `$GAPTILE_CACHE_DIR` when set, else in memory.
    pub fn from_env() -> Result<Self, GridError> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Self::open(d),
            _ => Ok(Self::in_memory()),
        }
    }

    pub fn with_max_height(mut self, max_height: u64) -> Self {
        self.max_height = max_height;
        self
    }

    pub fn with_search(mut self, search: SearchConfig) -> Self {
        self.search = search;
        self
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("height table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cached(&self, k: usize, l: usize, m: usize) -> Option<Arc<HeightEntry>> {
        self.entries
            .read()
            .expect("height table poisoned")
            .get(&(k, l, m))
            .cloned()
    }

    /// Cached or freshly searched entry for `(k, l, m)`.
    pub fn get(&self, k: usize, l: usize, m: usize) -> Result<Arc<HeightEntry>, GridError> {
        if let Some(e) = self.cached(k, l, m) {
            return Ok(e);
        }
        let (f, witness) = min_height_rect_with(k, l, m, self.max_height, &self.search)?;
        let entry = Arc::new(HeightEntry { f, witness });
        let entry = {
            let mut map = self.entries.write().expect("height table poisoned");
            map.entry((k, l, m)).or_insert(entry).clone()
        };
        self.persist((k, l, m), &entry)?;
        Ok(entry)
    }

    pub fn f(&self, k: usize, l: usize, m: usize) -> Result<u64, GridError> {
        self.get(k, l, m).map(|e| e.f)
    }

    fn persist(&self, key: Key, entry: &HeightEntry) -> Result<(), GridError> {
        let Some(dir) = &self.dir else { return Ok(()) };
        let _guard = self.write_lock.lock().expect("height table poisoned");
        let name = format!("rect_{}_{}_{}.json", key.0, key.1, key.2);
        let body = TilingFile::from(entry.witness.clone()).to_json() + "\n";
        atomic_write(dir, &name, body.as_bytes())?;

        let index: BTreeMap<String, IndexRecord> = self
            .entries
            .read()
            .expect("height table poisoned")
            .iter()
            .map(|(&k, e)| {
                let rec = IndexRecord {
                    f: e.f,
                    witness_path: format!("rect_{}_{}_{}.json", k.0, k.1, k.2),
                };
                (key_string(k), rec)
            })
            .collect();
        let body = serde_json::to_string_pretty(&index).map_err(cache_err)? + "\n";
        atomic_write(dir, INDEX_FILE, body.as_bytes())
    }
}

fn valid_entry((k, l, m): Key, f: u64, w: &RectangleTiling) -> bool {
    w.width == m as u64
        && w.height == f
        && w.step_type == StepType::unit(k, l)
        && verify_rectangle_tiling(w).ok
}

fn atomic_write(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), GridError> {
    use std::io::Write;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(cache_err)?;
    tmp.write_all(bytes).map_err(cache_err)?;
    tmp.persist(dir.join(name)).map_err(cache_err)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticePath;

    #[test]
    fn smallest_search_instance() {
        let (f, w) = min_height_rect(1, 1, 2).unwrap();
        assert_eq!(f, 3);
        let expected = vec![
            LatticePath::new(vec![[0, 0], [1, 0], [1, 1]]).unwrap(),
            LatticePath::new(vec![[0, 1], [0, 2], [1, 2]]).unwrap(),
        ];
        let mut got = w.paths.clone();
        got.sort_by_key(|p| p.start()[1]);
        assert_eq!(got, expected);
    }

    #[test]
    fn stair_width_needs_no_search() {
        for (k, l) in [(1, 1), (2, 3), (5, 2)] {
            let (f, w) = min_height_rect(k, l, k + l + 1).unwrap();
            assert_eq!(f, l as u64 + 1);
            assert_eq!(w, stair_tiling(k, l));
        }
    }

    #[test]
    fn range_errors() {
        assert_eq!(
            min_height_rect(1, 1, 4),
            Err(GridError::RangeError {
                k: 1,
                l: 1,
                m: 4,
                lo: 2,
                hi: 3
            })
        );
        assert!(matches!(
            min_height_rect(2, 1, 2),
            Err(GridError::RangeError { .. })
        ));
    }

    #[test]
    fn exhausted_bound() {
        assert!(matches!(
            min_height_rect_with(1, 1, 2, 2, &SearchConfig::default()),
            Err(GridError::SearchExhausted { bound: 2, .. })
        ));
    }

    #[test]
    fn table_persists_and_reloads() {
        let dir = tempfile::tempdir().unwrap();
        let t = HeightTable::open(dir.path()).unwrap();
        assert_eq!(t.f(2, 1, 3).unwrap(), 4);
        assert_eq!(t.f(1, 1, 2).unwrap(), 3);
        let index = fs::read_to_string(dir.path().join(INDEX_FILE)).unwrap();
        assert!(index.contains("\"2,1,3\""));
        let again = HeightTable::open(dir.path()).unwrap();
        assert_eq!(again.len(), 2);
        assert_eq!(again.cached(2, 1, 3).unwrap().f, 4);
    }

    #[test]
    fn corrupt_witness_is_dropped() {
        let dir = tempfile::tempdir().unwrap();
        HeightTable::open(dir.path()).unwrap().get(1, 1, 2).unwrap();
        fs::write(
            dir.path().join("rect_1_1_2.json"),
            "{\"kind\":\"rectangle\"}",
        )
        .unwrap();
        let t = HeightTable::open(dir.path()).unwrap();
        assert!(t.is_empty());
        assert_eq!(t.f(1, 1, 2).unwrap(), 3);
    }

    #[test]
    fn key_parsing() {
        assert_eq!(parse_key("1,2,3"), Some((1, 2, 3)));
        assert_eq!(parse_key("1,2"), None);
        assert_eq!(parse_key("1,2,3,4"), None);
    }
}
