//! Exhaustive exact-cover search over intervals and rectangles.
//!
//! This is the ground truth for small instances and the engine behind
//! minimal-height rectangle searches. An `ExhaustedNoSolution` status is a
//! proof that no tiling exists at the given size.

mod engine;

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gapset::GapSet;
use crate::interval::IntervalTiling;
use crate::lattice::{LatticePath, RectangleTiling, StepType};
use crate::tile::Tile;
use crate::verify::{verify_interval_tiling, verify_rectangle_tiling};
use engine::{Board, Control, RawTiling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchConfig {
    pub max_nodes: u64,
    pub max_solutions: usize,
    /// Skip orderings that only swap equal gaps.
    pub canonicalize: bool,
    /// Worker threads splitting the root branches; 0 runs sequentially.
    pub parallel_width: usize,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            max_nodes: 50_000_000,
            max_solutions: 1,
            canonicalize: true,
            parallel_width: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SearchStatus {
    Found,
    ExhaustedNoSolution,
    BudgetExceeded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome<W> {
    pub status: SearchStatus,
    pub witnesses: Vec<W>,
    pub nodes_explored: u64,
}

impl<W> SearchOutcome<W> {
    pub fn found(&self) -> bool {
        self.status == SearchStatus::Found
    }

    pub fn first(&self) -> Option<&W> {
        self.witnesses.first()
    }

    fn map<V>(self, f: impl FnMut(W) -> V) -> SearchOutcome<V> {
        SearchOutcome {
            status: self.status,
            witnesses: self.witnesses.into_iter().map(f).collect(),
            nodes_explored: self.nodes_explored,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("no tiling of an interval of length <= {n_max} found{}", if *.incomplete { " (some searches hit the node budget)" } else { "" })]
    NotFoundWithinBound { n_max: u64, incomplete: bool },
    #[error("step vectors must be nonzero with nonnegative coordinates")]
    BadStep,
}

/// Searches for a tiling of `{0..n-1}` by gap-permuted tiles of `gaps`.
pub fn solve_interval(gaps: &GapSet, n: u64, cfg: &SearchConfig) -> SearchOutcome<IntervalTiling> {
    let per_tile = gaps.points_per_tile() as u64;
    if n == 0 || !n.is_multiple_of(per_tile) {
        return SearchOutcome {
            status: SearchStatus::ExhaustedNoSolution,
            witnesses: Vec::new(),
            nodes_explored: 0,
        };
    }
    let steps: Vec<([i64; 2], usize)> = gaps
        .entries()
        .iter()
        .map(|&(d, k)| ([d as i64, 0], k))
        .collect();
    run(n, 1, &steps, cfg).map(|raw| {
        let mut tiles: Vec<Tile> = raw
            .into_iter()
            .map(|p| Tile::from_points_unchecked(p.into_iter().map(|q| q[0]).collect()))
            .collect();
        tiles.sort_by_key(|t| t.first());
        let tiling = IntervalTiling::new(n, gaps.clone(), tiles);
        let report = verify_interval_tiling(&tiling, gaps);
        assert!(
            report.ok,
            "oracle produced an invalid interval tiling: {report}"
        );
        tiling
    })
}

/// Smallest `N <= n_max` for which [`solve_interval`] finds a tiling.
pub fn min_interval(
    gaps: &GapSet,
    n_max: u64,
    cfg: &SearchConfig,
) -> Result<(u64, IntervalTiling), OracleError> {
    let per_tile = gaps.points_per_tile() as u64;
    let mut incomplete = false;
    let mut n = per_tile;
    while n <= n_max {
        let mut out = solve_interval(gaps, n, cfg);
        match out.status {
            SearchStatus::Found => return Ok((n, out.witnesses.swap_remove(0))),
            SearchStatus::BudgetExceeded => incomplete = true,
            SearchStatus::ExhaustedNoSolution => {}
        }
        n += per_tile;
    }
    Err(OracleError::NotFoundWithinBound { n_max, incomplete })
}

/// Searches for a tiling of `[0,width-1] × [0,height-1]` by paths of `step_type`.
pub fn solve_rectangle(
    step_type: &StepType,
    width: u64,
    height: u64,
    cfg: &SearchConfig,
) -> Result<SearchOutcome<RectangleTiling>, OracleError> {
    if step_type
        .entries()
        .iter()
        .any(|&(v, _)| v[0] < 0 || v[1] < 0 || v == [0, 0])
    {
        return Err(OracleError::BadStep);
    }
    let per_path = step_type.total() as u64 + 1;
    let area = width * height;
    if area == 0 || !area.is_multiple_of(per_path) {
        return Ok(SearchOutcome {
            status: SearchStatus::ExhaustedNoSolution,
            witnesses: Vec::new(),
            nodes_explored: 0,
        });
    }
    Ok(run(width, height, step_type.entries(), cfg).map(|raw| {
        let paths = raw
            .into_iter()
            .map(LatticePath::from_points_unchecked)
            .collect();
        let r = RectangleTiling::new(width, height, step_type.clone(), paths);
        let report = verify_rectangle_tiling(&r);
        assert!(
            report.ok,
            "oracle produced an invalid rectangle tiling: {report}"
        );
        r
    }))
}

fn run(
    width: u64,
    height: u64,
    steps: &[([i64; 2], usize)],
    cfg: &SearchConfig,
) -> SearchOutcome<RawTiling> {
    let ctl = Control::new(cfg.max_nodes);
    let (solutions, budget_hit) = if cfg.parallel_width == 0 {
        let mut board = Board::new(
            width,
            height,
            steps,
            cfg.canonicalize,
            &ctl,
            cfg.max_solutions,
        );
        board.run();
        (board.solutions, board.budget_hit)
    } else {
        run_parallel(width, height, steps, cfg, &ctl)
    };
    let nodes = ctl.nodes.load(Ordering::Relaxed).min(cfg.max_nodes);
    let status = if !solutions.is_empty() {
        SearchStatus::Found
    } else if budget_hit {
        SearchStatus::BudgetExceeded
    } else {
        SearchStatus::ExhaustedNoSolution
    };
    SearchOutcome {
        status,
        witnesses: solutions,
        nodes_explored: nodes,
    }
}

/// Root branches are handed to workers in index order. Once branch `i` has a
/// solution no branch above `i` is started, every branch below `i` runs to
/// completion, and only solutions from branches `<= i` are kept, so the
/// witnesses do not depend on thread timing.
fn run_parallel(
    width: u64,
    height: u64,
    steps: &[([i64; 2], usize)],
    cfg: &SearchConfig,
    ctl: &Control,
) -> (Vec<RawTiling>, bool) {
    let roots = Board::new(width, height, steps, cfg.canonicalize, ctl, 1).root_paths();
    let next = AtomicUsize::new(0);
    let solved = AtomicUsize::new(usize::MAX);
    let results: Mutex<Vec<(usize, Vec<RawTiling>, bool)>> = Mutex::new(Vec::new());
    std::thread::scope(|scope| {
        for _ in 0..cfg.parallel_width {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= roots.len() || i > solved.load(Ordering::Relaxed) {
                    break;
                }
                let mut board = Board::new(
                    width,
                    height,
                    steps,
                    cfg.canonicalize,
                    ctl,
                    cfg.max_solutions,
                );
                board.place(&roots[i]);
                board.run();
                let found = !board.solutions.is_empty();
                results.lock().expect("worker panicked").push((
                    i,
                    board.solutions,
                    board.budget_hit,
                ));
                if found {
                    solved.fetch_min(i, Ordering::Relaxed);
                }
                if board.budget_hit {
                    break;
                }
            });
        }
    });
    let mut results = results.into_inner().expect("worker panicked");
    results.sort_by_key(|r| r.0);
    let budget_hit = results.iter().any(|r| r.2);
    let cut = solved.into_inner();
    let mut solutions: Vec<RawTiling> = results
        .into_iter()
        .filter(|r| r.0 <= cut)
        .flat_map(|r| r.1)
        .collect();
    solutions.truncate(cfg.max_solutions.max(1));
    (solutions, budget_hit)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gs(s: &str) -> GapSet {
        s.parse().unwrap()
    }

    fn tiles(t: &IntervalTiling) -> Vec<Vec<i64>> {
        t.tiles.iter().map(|t| t.points().to_vec()).collect()
    }

    #[test]
    fn solves_small_intervals() {
        let cfg = SearchConfig::default();
        let out = solve_interval(&gs("1:1,2:1"), 6, &cfg);
        assert_eq!(out.status, SearchStatus::Found);
        assert_eq!(
            tiles(out.first().unwrap()),
            vec![vec![0, 1, 3], vec![2, 4, 5]]
        );

        let out = solve_interval(&gs("1:1"), 2, &cfg);
        assert_eq!(tiles(out.first().unwrap()), vec![vec![0, 1]]);

        let out = solve_interval(&gs("1:1,2:1"), 4, &cfg);
        assert_eq!(out.status, SearchStatus::ExhaustedNoSolution);
        assert_eq!(out.nodes_explored, 0);
        assert_eq!(
            solve_interval(&gs("1:1,2:1"), 3, &cfg).status,
            SearchStatus::ExhaustedNoSolution
        );
    }

    #[test]
    fn min_interval_examples() {
        let cfg = SearchConfig::default();
        let (n, _) = min_interval(&gs("1:1,2:1"), 30, &cfg).unwrap();
        assert_eq!(n, 6);
        let (n, w) = min_interval(&gs("1:2"), 30, &cfg).unwrap();
        assert_eq!(n, 3);
        assert_eq!(tiles(&w), vec![vec![0, 1, 2]]);
        assert_eq!(
            min_interval(&gs("1:1,2:1"), 5, &cfg),
            Err(OracleError::NotFoundWithinBound {
                n_max: 5,
                incomplete: false
            })
        );
    }

    #[test]
    fn budget_is_reported() {
        let cfg = SearchConfig {
            max_nodes: 3,
            ..SearchConfig::default()
        };
        let out = solve_interval(&gs("1:1,2:1,5:1"), 40, &cfg);
        assert_eq!(out.status, SearchStatus::BudgetExceeded);
    }

    #[test]
    fn rectangle_examples() {
        let cfg = SearchConfig::default();
        let out = solve_rectangle(&StepType::unit(1, 1), 2, 3, &cfg).unwrap();
        assert!(out.found());
        let out = solve_rectangle(&StepType::unit(1, 1), 2, 2, &cfg).unwrap();
        assert_eq!(out.status, SearchStatus::ExhaustedNoSolution);
        let out = solve_rectangle(&StepType::unit(3, 4), 8, 5, &cfg).unwrap();
        assert!(out.found());
        assert!(solve_rectangle(&StepType::new([([1, -1], 1)]), 2, 2, &cfg).is_err());
    }

    #[test]
    fn non_canonical_search_sees_duplicate_orderings() {
        let all = |canonicalize| SearchConfig {
            max_solutions: 1000,
            canonicalize,
            ..SearchConfig::default()
        };
        let g = gs("1:2");
        let canon = solve_interval(&g, 6, &all(true));
        let raw = solve_interval(&g, 6, &all(false));
        assert_eq!(canon.witnesses.len(), 1);
        // two equal gaps per tile, two tiles: 2! * 2! orderings
        assert_eq!(raw.witnesses.len(), 4);
    }

    #[test]
    fn parallel_agrees_with_sequential() {
        for (g, ns) in [
            ("1:1,3:1,4:1", &[4, 8, 12, 16, 20][..]),
            ("1,2,3", &[12, 24]),
            ("2,3", &[18]),
        ] {
            let g = gs(g);
            for &n in ns {
                let seq = solve_interval(&g, n, &SearchConfig::default());
                for _ in 0..5 {
                    let par = solve_interval(
                        &g,
                        n,
                        &SearchConfig {
                            parallel_width: 4,
                            ..SearchConfig::default()
                        },
                    );
                    assert_eq!(seq.status, par.status, "n = {n}");
                    let w = |o: &SearchOutcome<IntervalTiling>| o.first().map(tiles);
                    assert_eq!(w(&seq), w(&par), "n = {n}");
                }
            }
        }
    }
}
