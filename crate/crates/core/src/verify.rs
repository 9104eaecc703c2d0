//! Certificate checkers. None of them trusts construction metadata: tiles
//! and paths are re-read point by point.

use std::collections::HashMap;

use crate::gapset::GapSet;
use crate::interval::IntervalTiling;
use crate::lattice::{LatticePath, LiftedTiling, Point2, RectangleTiling, StepType};
use crate::report::{
    Location, ReportBuilder, VerificationReport, ViolationKind, DEFAULT_VIOLATION_CAP,
};
use crate::tile::Tile;

/// Verifier settings.
#[derive(Debug, Clone, Copy)]
pub struct Verifier {
    pub cap: usize,
}

impl Default for Verifier {
    fn default() -> Self {
        Verifier {
            cap: DEFAULT_VIOLATION_CAP,
        }
    }
}

pub fn verify_interval_tiling(t: &IntervalTiling, gaps: &GapSet) -> VerificationReport {
    Verifier::default().interval_tiling(t, gaps)
}

pub fn verify_boundary_prefix(t: &IntervalTiling, d1: u64, count: usize) -> VerificationReport {
    Verifier::default().boundary_prefix(t, d1, count)
}

pub fn verify_homogeneous(seqs: &[Tile], n: u64, gaps: &GapSet) -> VerificationReport {
    Verifier::default().homogeneous(seqs, n, gaps)
}

pub fn verify_rectangle_tiling(r: &RectangleTiling) -> VerificationReport {
    Verifier::default().rectangle_tiling(r)
}

pub fn verify_lifted_tiling(r: &LiftedTiling) -> VerificationReport {
    Verifier::default().lifted_tiling(r)
}

impl Verifier {
    pub fn with_cap(cap: usize) -> Self {
        Verifier { cap }
    }

    /// Partition of `{0..N-1}` plus an exact gap-multiset match for every tile.
    pub fn interval_tiling(&self, t: &IntervalTiling, gaps: &GapSet) -> VerificationReport {
        let mut b = ReportBuilder::new(self.cap);
        check_partition(&t.tiles, t.length, &mut b);
        // sorted gaps against the expanded multiset, one reused buffer
        let expected = gaps.expanded();
        let mut buf = Vec::with_capacity(expected.len());
        for (i, tile) in t.tiles.iter().enumerate() {
            if !tile.is_well_formed() {
                continue;
            }
            buf.clear();
            buf.extend(tile.gaps());
            buf.sort_unstable();
            if buf != expected {
                b.push(
                    ViolationKind::GapMismatch,
                    Location::Tile(i),
                    format!(
                        "gaps {:?} differ from {gaps}",
                        tile.gaps().collect::<Vec<_>>()
                    ),
                );
            }
        }
        b.finish()
    }

    /// Every tile ending in the last `d1` points starts with `count` gaps of `d1`.
    pub fn boundary_prefix(&self, t: &IntervalTiling, d1: u64, count: usize) -> VerificationReport {
        let mut b = ReportBuilder::new(self.cap);
        if count == 0 {
            return b.finish();
        }
        let n = t.length as i64;
        let lo = n - d1 as i64;
        for (i, tile) in t.tiles.iter().enumerate() {
            let Some(&end) = tile.points().last() else {
                continue;
            };
            if end < lo || end >= n {
                continue;
            }
            let gaps: Vec<u64> = tile.gaps().take(count).collect();
            for j in 0..count {
                match gaps.get(j) {
                    Some(&g) if g == d1 => {}
                    other => {
                        b.push(
                            ViolationKind::BoundaryPrefixViolation,
                            Location::TileGap { tile: i, gap: j },
                            match other {
                                Some(g) => format!("tile ending at {end}: gap {g} != {d1}"),
                                None => format!("tile ending at {end} has fewer than {count} gaps"),
                            },
                        );
                        break;
                    }
                }
            }
        }
        b.finish()
    }

    /// Partition of `{0..N-1}` by sequences in which every `|T|+1`
    /// consecutive points form a tile with gap set `T`.
    pub fn homogeneous(&self, seqs: &[Tile], n: u64, gaps: &GapSet) -> VerificationReport {
        let mut b = ReportBuilder::new(self.cap);
        check_partition(seqs, n, &mut b);
        let window = GapWindow::new(gaps);
        for (i, seq) in seqs.iter().enumerate() {
            if !seq.is_well_formed() {
                continue;
            }
            if let Err(start) = window.check_windows(seq.points()) {
                b.push(
                    ViolationKind::WindowMismatch,
                    Location::Window { sequence: i, start },
                    if seq.len() < gaps.points_per_tile() {
                        format!("sequence of {} points is shorter than a tile", seq.len())
                    } else {
                        format!(
                            "window starting at point {} is not a tile of {gaps}",
                            seq.points()[start]
                        )
                    },
                );
            }
        }
        b.finish()
    }

    pub fn rectangle_tiling(&self, r: &RectangleTiling) -> VerificationReport {
        let mut b = ReportBuilder::new(self.cap);
        let width = r.width;
        check_paths(
            |x| (x >= 0 && (x as u64) < width).then_some(x as usize),
            |c| c as i64,
            width as usize,
            r.height,
            &r.step_type,
            r.windowed,
            &r.paths,
            &mut b,
        );
        b.finish()
    }

    /// Same checks over a ragged support `xs × [0, height-1]`.
    pub fn lifted_tiling(&self, r: &LiftedTiling) -> VerificationReport {
        let mut b = ReportBuilder::new(self.cap);
        if r.support.windows(2).any(|w| w[0] >= w[1]) {
            b.push(
                ViolationKind::Malformed,
                Location::Path(0),
                "support is not strictly increasing",
            );
            return b.finish();
        }
        let support = &r.support;
        check_paths(
            |x| support.binary_search(&x).ok(),
            |c| support[c],
            support.len(),
            r.height,
            &r.step_type,
            r.windowed,
            &r.paths,
            &mut b,
        );
        b.finish()
    }
}

/// Streaming coverage check: tiles are visited by increasing minimum and
/// pending points live in a ring of bits no wider than the largest tile
/// span, so memory does not grow with `n`.
fn check_partition(tiles: &[Tile], n: u64, b: &mut ReportBuilder) {
    let n = n as i64;
    let mut order: Vec<(i64, usize)> = Vec::with_capacity(tiles.len());
    let mut max_span: u64 = 0;
    for (i, tile) in tiles.iter().enumerate() {
        let pts = tile.points();
        let (Some(&lo), Some(&hi)) = (pts.iter().min(), pts.iter().max()) else {
            b.push(ViolationKind::Malformed, Location::Tile(i), "empty tile");
            continue;
        };
        if !tile.is_well_formed() {
            b.push(
                ViolationKind::Malformed,
                Location::Tile(i),
                "points are not strictly increasing or fewer than two",
            );
        }
        max_span = max_span.max((hi - lo) as u64);
        order.push((lo, i));
    }
    if !order.windows(2).all(|w| w[0] <= w[1]) {
        order.sort_unstable();
    }

    let mut ring = Ring::new(max_span + 1);
    let mut frontier: i64 = 0;
    let advance = |to: i64, ring: &mut Ring, frontier: &mut i64, b: &mut ReportBuilder| {
        while *frontier < to {
            if !ring.take(*frontier) {
                b.push(
                    ViolationKind::Hole,
                    Location::Point(*frontier),
                    "point not covered",
                );
            }
            *frontier += 1;
        }
    };
    for &(lo, i) in &order {
        advance(lo.min(n), &mut ring, &mut frontier, b);
        for &q in tiles[i].points() {
            if q < 0 || q >= n {
                b.push(
                    ViolationKind::OutOfRange,
                    Location::Point(q),
                    format!("tile {i} leaves [0,{}]", n - 1),
                );
            } else if q < frontier || !ring.insert(q) {
                b.push(
                    ViolationKind::Overlap,
                    Location::Point(q),
                    format!("tile {i} covers an already covered point"),
                );
            }
        }
    }
    advance(n, &mut ring, &mut frontier, b);
}

/// Bit ring addressed by point modulo a power of two.
struct Ring {
    mask: u64,
    words: Vec<u64>,
}

impl Ring {
    fn new(min_len: u64) -> Self {
        let len = min_len.next_power_of_two().max(64);
        Ring {
            mask: len - 1,
            words: vec![0; (len / 64) as usize],
        }
    }

    fn slot(&self, p: i64) -> (usize, u64) {
        let idx = (p as u64) & self.mask;
        ((idx / 64) as usize, 1u64 << (idx % 64))
    }

    /// Sets the bit; false if it was already set.
    fn insert(&mut self, p: i64) -> bool {
        let (w, bit) = self.slot(p);
        let fresh = self.words[w] & bit == 0;
        self.words[w] |= bit;
        fresh
    }

    /// Clears the bit; returns whether it was set.
    fn take(&mut self, p: i64) -> bool {
        let (w, bit) = self.slot(p);
        let was = self.words[w] & bit != 0;
        self.words[w] &= !bit;
        was
    }
}

/// Sliding comparison of consecutive gaps against a target multiset.
struct GapWindow {
    target: HashMap<u64, i64>,
    size: usize,
}

impl GapWindow {
    fn new(gaps: &GapSet) -> Self {
        GapWindow {
            target: gaps.entries().iter().map(|&(d, k)| (d, k as i64)).collect(),
            size: gaps.size(),
        }
    }

    /// `Err(start)` for the first window whose gaps differ from the target.
    fn check_windows(&self, pts: &[i64]) -> Result<(), usize> {
        let gaps: Vec<u64> = pts.windows(2).map(|w| (w[1] - w[0]) as u64).collect();
        if gaps.len() < self.size {
            return Err(0);
        }
        let mut diff: HashMap<u64, i64> = self.target.iter().map(|(&d, &k)| (d, -k)).collect();
        let mut off = diff.len();
        let bump = |diff: &mut HashMap<u64, i64>, g: u64, by: i64, off: &mut usize| {
            let e = diff.entry(g).or_insert(0);
            let before = *e;
            *e += by;
            match (before == 0, *e == 0) {
                (true, false) => *off += 1,
                (false, true) => *off -= 1,
                _ => {}
            }
        };
        for &g in &gaps[..self.size] {
            bump(&mut diff, g, 1, &mut off);
        }
        if off != 0 {
            return Err(0);
        }
        for start in 1..=gaps.len() - self.size {
            bump(&mut diff, gaps[start - 1], -1, &mut off);
            bump(&mut diff, gaps[start + self.size - 1], 1, &mut off);
            if off != 0 {
                return Err(start);
            }
        }
        Ok(())
    }
}

#[allow(clippy::too_many_arguments)]
fn check_paths<F: Fn(i64) -> Option<usize>, G: Fn(usize) -> i64>(
    column: F,
    x_at: G,
    columns: usize,
    height: u64,
    step_type: &StepType,
    windowed: bool,
    paths: &[LatticePath],
    b: &mut ReportBuilder,
) {
    let h = height as usize;
    let mut covered = vec![0u64; (columns * h).div_ceil(64)];
    for (i, path) in paths.iter().enumerate() {
        if !path.is_monotone() {
            b.push(
                ViolationKind::Malformed,
                Location::Path(i),
                "path is empty or has a zero or decreasing step",
            );
        }
        for &[x, y] in path.points() {
            let col = column(x);
            match col {
                Some(c) if y >= 0 && (y as u64) < height => {
                    let idx = y as usize * columns + c;
                    let bit = 1u64 << (idx % 64);
                    if covered[idx / 64] & bit != 0 {
                        b.push(
                            ViolationKind::Overlap,
                            Location::Cell([x, y]),
                            format!("path {i} revisits a covered cell"),
                        );
                    }
                    covered[idx / 64] |= bit;
                }
                _ => b.push(
                    ViolationKind::OutOfRange,
                    Location::Cell([x, y]),
                    format!("path {i} leaves the region"),
                ),
            }
        }
        if path.is_monotone() {
            if let Some(detail) = type_mismatch(path, step_type, windowed) {
                b.push(ViolationKind::TypeMismatch, Location::Path(i), detail);
            }
        }
    }
    for idx in 0..columns * h {
        if covered[idx / 64] & (1u64 << (idx % 64)) == 0 {
            let (c, y) = (idx % columns, idx / columns);
            b.push(
                ViolationKind::Hole,
                Location::Cell([x_at(c), y as i64]),
                "cell not covered",
            );
        }
    }
}

fn type_mismatch(path: &LatticePath, step_type: &StepType, windowed: bool) -> Option<String> {
    let steps: Vec<Point2> = path.steps().collect();
    let w = step_type.total();
    if !windowed {
        let got = StepType::of_steps(steps.iter().copied());
        return (got != *step_type)
            .then(|| format!("steps {:?} differ from the declared type", got.entries()));
    }
    if steps.len() < w {
        return Some(format!(
            "{} steps is shorter than the window of {w}",
            steps.len()
        ));
    }
    let mut diff: HashMap<Point2, i64> = step_type
        .entries()
        .iter()
        .map(|&(v, k)| (v, -(k as i64)))
        .collect();
    for s in &steps[..w] {
        *diff.entry(*s).or_insert(0) += 1;
    }
    let bad = |diff: &HashMap<Point2, i64>| diff.values().any(|&v| v != 0);
    if bad(&diff) {
        return Some("window at offset 0 differs from the declared type".into());
    }
    for start in 1..=steps.len() - w {
        *diff.entry(steps[start - 1]).or_insert(0) -= 1;
        *diff.entry(steps[start + w - 1]).or_insert(0) += 1;
        if bad(&diff) {
            return Some(format!(
                "window at offset {start} differs from the declared type"
            ));
        }
    }
    None
}
