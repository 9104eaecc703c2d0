//! Resumable JSONL catalog: the shortest tileable interval of every small
//! gap set.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::Args;
use gaptile::oracle::OracleError;
use gaptile::{min_interval, write_tiling, GapSet, SearchConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::commands::{CmdResult, Failure};

#[derive(Args)]
pub struct CatalogArgs {
    /// Largest distance D.
    #[arg(long)]
    max_distance: u64,
    /// Largest total multiplicity K.
    #[arg(long)]
    max_size: usize,
    /// Smallest total multiplicity.
    #[arg(long, default_value_t = 2)]
    min_size: usize,
    /// Longest interval tried per gap set.
    #[arg(long)]
    n_max: u64,
    #[arg(long, default_value = "catalog.jsonl")]
    out: PathBuf,
    /// Node budget per interval length.
    #[arg(long, default_value_t = 2_000_000)]
    max_nodes: u64,
    /// Worker threads (0: all cores).
    #[arg(long, default_value_t = 0)]
    threads: usize,
    /// Stop after this many new records.
    #[arg(long)]
    limit: Option<usize>,
    /// Record wall time per gap set (makes output run-dependent).
    #[arg(long)]
    timings: bool,
}

/// Everything that determines the catalog contents.
#[derive(Serialize)]
struct Config {
    format: u32,
    max_distance: u64,
    min_size: usize,
    max_size: usize,
    n_max: u64,
    max_nodes: u64,
}

impl Config {
    fn hash(&self) -> String {
        let json = serde_json::to_vec(self).expect("config serializes");
        Sha256::digest(&json)[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Found { n: u64, witness: String },
    NotFound { n_max: u64, incomplete: bool },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogRecord {
    pub config: String,
    pub index: usize,
    pub gap_set: String,
    pub method: String,
    #[serde(flatten)]
    pub outcome: Outcome,
    /// Set when no tiling was found: worth a deeper search.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub candidate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

/// Multisets of distances in `1..=d` with `lo..=hi` elements, by size and
/// then lexicographically.
pub fn enumerate(d: u64, lo: usize, hi: usize) -> Vec<Vec<u64>> {
    fn rec(d: u64, from: u64, left: usize, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for x in from..=d {
            cur.push(x);
            rec(d, x, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for size in lo.max(1)..=hi {
        rec(d, 1, size, &mut Vec::new(), &mut out);
    }
    out
}

/// Reads the completed records, dropping a torn final line.
fn resume(path: &Path, config: &str) -> Result<Vec<CatalogRecord>, Failure> {
    let file = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
        Err(e) => return Err(Failure::io(format!("{}: {e}", path.display()))),
    };
    let io = |e: std::io::Error| Failure::io(format!("{}: {e}", path.display()));
    let mut reader = BufReader::new(file);
    let mut records = Vec::new();
    let mut good_len = 0u64;
    let mut line = String::new();
    loop {
        line.clear();
        let n = reader.read_line(&mut line).map_err(io)?;
        if n == 0 {
            break;
        }
        if !line.ends_with('\n') {
            break;
        }
        let rec: CatalogRecord = match serde_json::from_str(line.trim_end()) {
            Ok(r) => r,
            Err(e) => {
                return Err(Failure::io(format!(
                    "{}: record {} is malformed: {e}",
                    path.display(),
                    records.len()
                )))
            }
        };
        if rec.config != config {
            return Err(Failure::io(format!(
                "{} was written with configuration {}, this run is {config}",
                path.display(),
                rec.config
            )));
        }
        if rec.index != records.len() {
            return Err(Failure::io(format!(
                "{}: expected record {}, found {}",
                path.display(),
                records.len(),
                rec.index
            )));
        }
        good_len += n as u64;
        records.push(rec);
    }
    let len = std::fs::metadata(path).map_err(io)?.len();
    if len != good_len {
        OpenOptions::new()
            .write(true)
            .open(path)
            .and_then(|f| f.set_len(good_len))
            .map_err(io)?;
    }
    Ok(records)
}

fn witness_dir(out: &Path) -> (PathBuf, String) {
    let name = out
        .file_name()
        .and_then(|s| s.to_str())
        .unwrap_or("catalog.jsonl");
    let rel = format!("{name}.witnesses");
    (out.with_file_name(&rel), rel)
}

pub fn run(a: CatalogArgs) -> CmdResult {
    if a.max_distance == 0 || a.max_size == 0 || a.min_size > a.max_size {
        return Err(Failure::io(
            "bounds must satisfy D >= 1 and 1 <= min-size <= max-size",
        ));
    }
    let config = Config {
        format: 1,
        max_distance: a.max_distance,
        min_size: a.min_size,
        max_size: a.max_size,
        n_max: a.n_max,
        max_nodes: a.max_nodes,
    };
    let hash = config.hash();
    let sets = enumerate(a.max_distance, a.min_size, a.max_size);
    let done = resume(&a.out, &hash)?;
    let start = done.len();
    let end = a.limit.map_or(sets.len(), |l| sets.len().min(start + l));

    let (wdir, wrel) = witness_dir(&a.out);
    if start < end {
        std::fs::create_dir_all(&wdir)
            .map_err(|e| Failure::io(format!("{}: {e}", wdir.display())))?;
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(Failure::io)?;
    let cfg = SearchConfig {
        max_nodes: a.max_nodes,
        ..SearchConfig::default()
    };
    let mut file = OpenOptions::new()
        .create(true)
        .append(true)
        .open(&a.out)
        .map_err(|e| Failure::io(format!("{}: {e}", a.out.display())))?;

    let work = |index: usize| -> Result<CatalogRecord, Failure> {
        let gaps = GapSet::from_gaps(&sets[index]).map_err(Failure::io)?;
        let t0 = Instant::now();
        let outcome = match min_interval(&gaps, a.n_max, &cfg) {
            Ok((n, w)) => {
                let name = format!("{index:06}.json");
                write_tiling(&wdir.join(&name), &w.into()).map_err(Failure::io)?;
                Outcome::Found {
                    n,
                    witness: format!("{wrel}/{name}"),
                }
            }
            Err(OracleError::NotFoundWithinBound { n_max, incomplete }) => {
                Outcome::NotFound { n_max, incomplete }
            }
            Err(e) => return Err(Failure::io(e)),
        };
        Ok(CatalogRecord {
            config: hash.clone(),
            index,
            gap_set: gaps.to_cli_string(),
            method: "oracle".into(),
            candidate: matches!(outcome, Outcome::NotFound { .. }),
            outcome,
            elapsed_ms: a.timings.then(|| t0.elapsed().as_millis() as u64),
        })
    };

    // Workers fill a batch in parallel; the single appender below writes it
    // in enumeration order, so an interrupted run leaves a clean prefix.
    let batch = pool.current_num_threads().max(1) * 4;
    let mut records = done;
    let mut next = start;
    while next < end {
        let hi = end.min(next + batch);
        let results: Vec<Result<CatalogRecord, Failure>> =
            pool.install(|| (next..hi).into_par_iter().map(work).collect());
        for r in results {
            let rec = r?;
            let mut line = serde_json::to_string(&rec).map_err(Failure::io)?;
            line.push('\n');
            file.write_all(line.as_bytes())
                .map_err(|e| Failure::io(format!("{}: {e}", a.out.display())))?;
            records.push(rec);
        }
        file.sync_data()
            .map_err(|e| Failure::io(format!("{}: {e}", a.out.display())))?;
        next = hi;
    }

    let found = records.iter().filter(|r| !r.candidate).count();
    let candidates: Vec<&CatalogRecord> = records.iter().filter(|r| r.candidate).collect();
    println!(
        "{}: {} of {} gap sets done ({} new), {found} tiled",
        a.out.display(),
        records.len(),
        sets.len(),
        records.len() - start
    );
    for c in &candidates {
        if let Outcome::NotFound { n_max, incomplete } = c.outcome {
            println!(
                "CANDIDATE {}: no tiling up to N = {n_max}{}",
                c.gap_set,
                if incomplete { " (budget hit)" } else { "" }
            );
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_order() {
        let sets = enumerate(3, 2, 2);
        assert_eq!(
            sets,
            vec![
                vec![1, 1],
                vec![1, 2],
                vec![1, 3],
                vec![2, 2],
                vec![2, 3],
                vec![3, 3]
            ]
        );
        assert_eq!(enumerate(2, 1, 3).len(), 2 + 3 + 4);
    }

    #[test]
    fn config_hash_tracks_bounds() {
        let mut c = Config {
            format: 1,
            max_distance: 3,
            min_size: 2,
            max_size: 2,
            n_max: 30,
            max_nodes: 10,
        };
        let h = c.hash();
        assert_eq!(h.len(), 16);
        c.n_max = 31;
        assert_ne!(h, c.hash());
    }

    #[test]
    fn resume_drops_torn_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.jsonl");
        let rec = CatalogRecord {
            config: "abc".into(),
            index: 0,
            gap_set: "1:2".into(),
            method: "oracle".into(),
            outcome: Outcome::Found {
                n: 3,
                witness: "w".into(),
            },
            candidate: false,
            elapsed_ms: None,
        };
        let line = serde_json::to_string(&rec).unwrap();
        std::fs::write(&p, format!("{line}\n{{\"config\":\"ab")).unwrap();
        let got = resume(&p, "abc").unwrap();
        assert_eq!(got, vec![rec]);
        assert_eq!(std::fs::read_to_string(&p).unwrap(), format!("{line}\n"));
        assert!(resume(&p, "other").is_err());
    }
}
