//! Leftmost-cell backtracking over monotone paths with a fixed step multiset.
//!
//! The least uncovered cell in row-major order must start the next path:
//! every earlier cell is already covered and a path only moves to later
//! cells. Step orderings are enumerated lexicographically with repeated
//! steps skipped, so every unordered tiling is reached at most once.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::lattice::Point2;

pub(crate) type RawPath = Vec<Point2>;
pub(crate) type RawTiling = Vec<RawPath>;

/// Node budget shared by all workers of one search.
pub(crate) struct Control {
    pub nodes: AtomicU64,
    pub max_nodes: u64,
}

impl Control {
    pub fn new(max_nodes: u64) -> Self {
        Control {
            nodes: AtomicU64::new(0),
            max_nodes,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Flow {
    Continue,
    Stop,
}

pub(crate) struct Board<'a> {
    width: i64,
    height: i64,
    /// Distinct step vectors in lexicographic order with remaining counts.
    steps: Vec<Point2>,
    counts: Vec<usize>,
    full_counts: Vec<usize>,
    total_steps: usize,
    occ: Vec<u64>,
    done: Vec<RawPath>,
    cur: RawPath,
    ctl: &'a Control,
    max_solutions: usize,
    pub solutions: Vec<RawTiling>,
    pub budget_hit: bool,
}

impl<'a> Board<'a> {
    /// `canonical = false` treats repeated steps as distinguishable, which
    /// revisits the same tiling once per ordering of equal steps.
    pub fn new(
        width: u64,
        height: u64,
        step_type: &[(Point2, usize)],
        canonical: bool,
        ctl: &'a Control,
        max_solutions: usize,
    ) -> Self {
        let mut pairs: Vec<(Point2, usize)> = step_type.to_vec();
        pairs.sort();
        let (steps, counts): (Vec<Point2>, Vec<usize>) = if canonical {
            pairs.into_iter().unzip()
        } else {
            pairs
                .into_iter()
                .flat_map(|(v, k)| std::iter::repeat_n((v, 1), k))
                .unzip()
        };
        let cells = (width * height) as usize;
        Board {
            width: width as i64,
            height: height as i64,
            total_steps: counts.iter().sum(),
            full_counts: counts.clone(),
            steps,
            counts,
            occ: vec![0; cells.div_ceil(64)],
            done: Vec::new(),
            cur: Vec::new(),
            ctl,
            max_solutions: max_solutions.max(1),
            solutions: Vec::new(),
            budget_hit: false,
        }
    }

    fn cells(&self) -> usize {
        (self.width * self.height) as usize
    }

    fn index(&self, p: Point2) -> Option<usize> {
        (p[0] >= 0 && p[0] < self.width && p[1] >= 0 && p[1] < self.height)
            .then(|| (p[1] * self.width + p[0]) as usize)
    }

    fn is_free(&self, i: usize) -> bool {
        self.occ[i / 64] & (1 << (i % 64)) == 0
    }

    fn flip(&mut self, i: usize) {
        self.occ[i / 64] ^= 1 << (i % 64);
    }

    fn point(&self, i: usize) -> Point2 {
        [i as i64 % self.width, i as i64 / self.width]
    }

    fn first_free(&self, from: usize) -> Option<usize> {
        let cells = self.cells();
        let mut w = from / 64;
        let mut mask = !0u64 << (from % 64);
        while w < self.occ.len() {
            let free = !self.occ[w] & mask;
            if free != 0 {
                let i = w * 64 + free.trailing_zeros() as usize;
                return (i < cells).then_some(i);
            }
            w += 1;
            mask = !0;
        }
        None
    }

    /// Marks a whole path as placed (used for root splitting).
    pub fn place(&mut self, path: &RawPath) {
        for &p in path {
            let i = self.index(p).expect("root path inside the board");
            self.flip(i);
        }
        self.done.push(path.clone());
    }

    /// Every complete path starting at cell 0 on the current board.
    pub fn root_paths(&mut self) -> Vec<RawPath> {
        let mut out = Vec::new();
        let Some(start) = self.first_free(0) else {
            return out;
        };
        self.cur.push(self.point(start));
        self.flip(start);
        self.collect_paths(start, 0, &mut out);
        self.flip(start);
        self.cur.clear();
        out
    }

    fn collect_paths(&mut self, at: usize, used: usize, out: &mut Vec<RawPath>) {
        if used == self.total_steps {
            out.push(self.cur.clone());
            return;
        }
        let here = self.point(at);
        for s in 0..self.steps.len() {
            if self.counts[s] == 0 {
                continue;
            }
            let v = self.steps[s];
            let Some(j) = self.index([here[0] + v[0], here[1] + v[1]]) else {
                continue;
            };
            if !self.is_free(j) {
                continue;
            }
            self.counts[s] -= 1;
            self.flip(j);
            self.cur.push(self.point(j));
            self.collect_paths(j, used + 1, out);
            self.cur.pop();
            self.flip(j);
            self.counts[s] += 1;
        }
    }

    /// Runs the search from the current board.
    pub fn run(&mut self) {
        let _ = self.search(0);
    }

    fn search(&mut self, from: usize) -> Flow {
        let Some(start) = self.first_free(from) else {
            self.solutions.push(self.done.clone());
            if self.solutions.len() >= self.max_solutions {
                return Flow::Stop;
            }
            return Flow::Continue;
        };
        self.cur.push(self.point(start));
        self.flip(start);
        let r = self.extend(start, start, 0);
        self.flip(start);
        self.cur.pop();
        r
    }

    fn extend(&mut self, start: usize, at: usize, used: usize) -> Flow {
        if self.ctl.nodes.fetch_add(1, Ordering::Relaxed) >= self.ctl.max_nodes {
            self.budget_hit = true;
            return Flow::Stop;
        }
        if used == self.total_steps {
            let path = std::mem::take(&mut self.cur);
            self.done.push(path);
            self.counts.copy_from_slice(&self.full_counts);
            let r = self.search(start + 1);
            self.counts.iter_mut().for_each(|c| *c = 0);
            self.cur = self.done.pop().expect("pushed above");
            return r;
        }
        let here = self.point(at);
        for s in 0..self.steps.len() {
            if self.counts[s] == 0 {
                continue;
            }
            let v = self.steps[s];
            let Some(j) = self.index([here[0] + v[0], here[1] + v[1]]) else {
                continue;
            };
            if !self.is_free(j) {
                continue;
            }
            self.counts[s] -= 1;
            self.flip(j);
            self.cur.push(self.point(j));
            let r = self.extend(start, j, used + 1);
            self.cur.pop();
            self.flip(j);
            self.counts[s] += 1;
            if r == Flow::Stop {
                return Flow::Stop;
            }
        }
        Flow::Continue
    }
}
