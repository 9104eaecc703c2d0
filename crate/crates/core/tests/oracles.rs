//! Second, independent oracles: a memoized bitmask DP for intervals and an
//! Algorithm X exact cover for rectangles. Neither shares code with the
//! search engine in the library.

use std::collections::{HashMap, HashSet};

use gaptile::grid::min_height_rect;
use gaptile::{
    min_interval, solve_interval, verify_interval_tiling, GapSet, SearchConfig, SearchStatus,
};

fn permutations(gaps: &[u64]) -> HashSet<Vec<u64>> {
    fn go(rest: &mut Vec<u64>, cur: &mut Vec<u64>, out: &mut HashSet<Vec<u64>>) {
        if rest.is_empty() {
            out.insert(cur.clone());
            return;
        }
        for i in 0..rest.len() {
            let g = rest.remove(i);
            cur.push(g);
            go(rest, cur, out);
            cur.pop();
            rest.insert(i, g);
        }
    }
    let mut out = HashSet::new();
    go(&mut gaps.to_vec(), &mut Vec::new(), &mut out);
    out
}

/// Placements as bitmasks grouped by their lowest point.
fn interval_placements(gaps: &[u64], n: u64) -> Vec<Vec<u64>> {
    let mut by_start = vec![Vec::new(); n as usize];
    for perm in permutations(gaps) {
        let span: u64 = perm.iter().sum();
        for s in 0..n {
            if s + span >= n {
                break;
            }
            let mut mask = 1u64 << s;
            let mut x = s;
            for g in &perm {
                x += g;
                mask |= 1 << x;
            }
            by_start[s as usize].push(mask);
        }
    }
    by_start
}

fn naive_tiles(gaps: &[u64], n: u64) -> bool {
    fn go(mask: u64, full: u64, by_start: &[Vec<u64>], memo: &mut HashMap<u64, bool>) -> bool {
        if mask == full {
            return true;
        }
        if let Some(&v) = memo.get(&mask) {
            return v;
        }
        let low = (!mask).trailing_zeros() as usize;
        let ok = by_start[low]
            .iter()
            .any(|&p| p & mask == 0 && go(mask | p, full, by_start, memo));
        memo.insert(mask, ok);
        ok
    }
    let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    go(0, full, &interval_placements(gaps, n), &mut HashMap::new())
}

fn multisets(values: &[u64], size: usize) -> Vec<Vec<u64>> {
    if size == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        for mut rest in multisets(&values[i..], size - 1) {
            rest.insert(0, v);
            out.push(rest);
        }
    }
    out
}

#[test]
fn interval_engine_agrees_with_bitmask_dp() {
    let cfg = SearchConfig::default();
    let mut checked = 0;
    for size in 1..=3 {
        for gaps in multisets(&[1, 2, 3, 4, 5], size) {
            let t = GapSet::from_gaps(&gaps).unwrap();
            for n in 1..=24u64 {
                let expected = naive_tiles(&gaps, n);
                let out = solve_interval(&t, n, &cfg);
                assert_ne!(out.status, SearchStatus::BudgetExceeded);
                assert_eq!(out.found(), expected, "gaps {gaps:?}, N={n}");
                if let Some(w) = out.first() {
                    assert!(verify_interval_tiling(w, &t).ok);
                }
                checked += 1;
            }
        }
    }
    assert_eq!(checked, 55 * 24);
}

#[test]
fn smallest_interval_for_one_two() {
    let t: GapSet = "1,2".parse().unwrap();
    let (n, w) = min_interval(&t, 60, &SearchConfig::default()).unwrap();
    assert_eq!(n, 6);
    assert!(verify_interval_tiling(&w, &t).ok);
    assert!((1..6).all(|n| !naive_tiles(&[1, 2], n)));
}

#[test]
fn every_three_point_tile_up_to_four_tiles_within_sixty() {
    for gaps in multisets(&[1, 2, 3, 4], 2) {
        let t = GapSet::from_gaps(&gaps).unwrap();
        let (n, w) = min_interval(&t, 60, &SearchConfig::default())
            .unwrap_or_else(|e| panic!("{gaps:?}: {e}"));
        assert!(verify_interval_tiling(&w, &t).ok);
        assert_eq!(n % 3, 0);
        // nothing shorter works, by the independent oracle
        for m in (3..n).step_by(3) {
            assert!(!naive_tiles(&gaps, m), "{gaps:?} at {m}");
        }
    }
}

/// Knuth's Algorithm X over explicit placement rows, choosing the column
/// with the fewest candidates.
fn exact_cover(columns: usize, rows: &[Vec<usize>]) -> bool {
    let mut by_col = vec![Vec::new(); columns];
    for (i, r) in rows.iter().enumerate() {
        for &c in r {
            by_col[c].push(i);
        }
    }
    fn solve(
        rows: &[Vec<usize>],
        by_col: &[Vec<usize>],
        covered: &mut Vec<bool>,
        left: usize,
    ) -> bool {
        if left == 0 {
            return true;
        }
        let live = |r: usize, covered: &[bool]| rows[r].iter().all(|&c| !covered[c]);
        let col = (0..covered.len())
            .filter(|&c| !covered[c])
            .min_by_key(|&c| by_col[c].iter().filter(|&&r| live(r, covered)).count())
            .expect("uncovered column");
        for &r in &by_col[col] {
            if !live(r, covered) {
                continue;
            }
            for &c in &rows[r] {
                covered[c] = true;
            }
            if solve(rows, by_col, covered, left - rows[r].len()) {
                return true;
            }
            for &c in &rows[r] {
                covered[c] = false;
            }
        }
        false
    }
    solve(rows, &by_col, &mut vec![false; columns], columns)
}

fn rectangle_tileable(k: usize, l: usize, m: usize, f: usize) -> bool {
    let mut words = HashSet::new();
    for perm in permutations(&[vec![0u64; k], vec![1u64; l]].concat()) {
        words.insert(perm);
    }
    let mut rows = Vec::new();
    for y0 in 0..f {
        for x0 in 0..m {
            for w in &words {
                let (mut x, mut y) = (x0, y0);
                let mut cells = vec![y * m + x];
                let mut fits = true;
                for &s in w {
                    if s == 0 {
                        x += 1
                    } else {
                        y += 1
                    }
                    if x >= m || y >= f {
                        fits = false;
                        break;
                    }
                    cells.push(y * m + x);
                }
                if fits {
                    rows.push(cells);
                }
            }
        }
    }
    exact_cover(m * f, &rows)
}

#[test]
fn min_heights_are_minimal() {
    for total in 2..=6 {
        for k in 1..total {
            let l = total - k;
            for m in k + 1..=k + l + 1 {
                let (f, w) = min_height_rect(k, l, m).unwrap();
                assert!(gaptile::verify_rectangle_tiling(&w).ok);
                assert_eq!((m as u64 * f) % (total as u64 + 1), 0);
                assert!(
                    rectangle_tileable(k, l, m, f as usize),
                    "({k},{l},{m}) at f={f}"
                );
                for g in l + 1..f as usize {
                    if (m * g) % (total + 1) == 0 {
                        assert!(
                            !rectangle_tileable(k, l, m, g),
                            "({k},{l},{m}) tiles at {g} < {f}"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn smallest_height_is_three() {
    assert_eq!(min_height_rect(1, 1, 2).unwrap().0, 3);
    assert!(!rectangle_tileable(1, 1, 2, 2) && !rectangle_tileable(1, 1, 2, 1));
}
