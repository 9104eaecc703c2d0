//! Stage sizes without materializing tiles.
//!
//! Interval stages only need `L` and the heights. Homogeneous stages also
//! depend on which sequence sizes occur, so a histogram of sizes is carried
//! along; counts saturate since only their positivity matters.

use std::collections::BTreeMap;

use num_integer::lcm;
use serde::Serialize;

use crate::gapset::{GapSet, SplitSpec};
use crate::grid::{diagonal_stripe_tiling, HeightTable};
use crate::lattice::RectangleTiling;

use super::{
    base_threshold, check_growth, final_threshold, homogeneous_step_threshold,
    interval_step_threshold, represent_two_coins, BaseDecomposition, ConstructError, StageKind,
    StagedError, ThresholdEntry, ThresholdReport,
};

/// Structural summary of a stage output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StageShape {
    pub stage: String,
    pub kind: StageKind,
    /// The output covers `[0, last]`.
    pub last: u64,
    pub height: u64,
    /// Gaps per tile (window size minus one for homogeneous stages).
    pub n: usize,
    pub d1: u64,
    pub budget: usize,
    /// Sequence size (in points) to number of sequences.
    pub sizes: BTreeMap<usize, u128>,
    /// Size of the sequence containing the last point.
    pub last_size: usize,
    pub required: Option<u64>,
}

type Res<T> = Result<T, ConstructError>;

fn mul(a: u64, b: u64) -> Res<u64> {
    a.checked_mul(b).ok_or(ConstructError::Overflow)
}

/// Heights, and path-size histograms, of the rectangle lifted over a
/// sequence of `len` points.
struct Piece {
    height: u64,
    paths: BTreeMap<usize, u128>,
    top_right: usize,
}

fn piece_of(r: &RectangleTiling) -> Piece {
    let mut paths = BTreeMap::new();
    for p in &r.paths {
        *paths.entry(p.len()).or_insert(0u128) += 1;
    }
    let corner = [r.width as i64 - 1, r.height as i64 - 1];
    let top_right = r.path_containing(corner).map_or(0, |i| r.paths[i].len());
    Piece {
        height: r.height,
        paths,
        top_right,
    }
}

fn bump(map: &mut BTreeMap<usize, u128>, key: usize, by: u128) {
    let e = map.entry(key).or_insert(0);
    *e = e.saturating_add(by);
}

impl StageShape {
    pub fn base(table: &HeightTable, d1: u64, d2: u64, k1: usize, k2: usize) -> Res<Self> {
        if d1 == 0 || k1 == 0 || k2 == 0 || d2 <= d1 {
            return Err(ConstructError::Hypothesis(format!(
                "base stage needs 0 < d1 < d2 and positive multiplicities (d1={d1}, d2={d2}, k1={k1}, k2={k2})"
            )));
        }
        let required = base_threshold(d1, k1, k2)?;
        check_growth(d2, required)?;
        let kk = k1 + k2;
        BaseDecomposition::new(d1, d2, kk as u64)?;
        let h = lcm(k2 as u64 + 1, table.f(k1, k2, kk)?);
        let points = mul(d2, h)?;
        Ok(StageShape {
            stage: "interval-base".into(),
            kind: StageKind::Interval,
            last: points - 1,
            height: h,
            n: kk,
            d1,
            budget: k1,
            sizes: BTreeMap::from([(kk + 1, (points / (kk as u64 + 1)) as u128)]),
            last_size: kk + 1,
            required: Some(required),
        })
    }

    fn expect(&self, kind: StageKind) -> Res<()> {
        if self.kind != kind {
            return Err(ConstructError::WrongStage {
                expected: kind,
                got: self.kind,
            });
        }
        Ok(())
    }

    pub fn interval_step(&self, table: &HeightTable, d: u64, k: usize) -> Res<Self> {
        self.expect(StageKind::Interval)?;
        if k == 0 || k + 1 > self.budget {
            return Err(ConstructError::MultiplicityViolation {
                k,
                budget: self.budget,
            });
        }
        let required = interval_step_threshold(self.last, self.d1, k)?;
        check_growth(d, required)?;
        let n = self.n;
        let h = lcm(
            k as u64 + 1,
            lcm(table.f(n, k, n + 1)?, table.f(n, k, n + 2)?),
        );
        let wide = self.last + k as u64 * self.d1 + 1;
        represent_two_coins(d - wide, self.last + 1, self.last + 2, false)?;
        let points = mul(d, h)?;
        let size = n + k + 1;
        Ok(StageShape {
            stage: "interval-step".into(),
            kind: StageKind::Interval,
            last: points - 1,
            height: h,
            n: n + k,
            d1: self.d1,
            budget: self.budget - k,
            sizes: BTreeMap::from([(size, (points / size as u64) as u128)]),
            last_size: size,
            required: Some(required),
        })
    }

    pub fn homogeneous_base(&self) -> Res<Self> {
        self.expect(StageKind::Interval)?;
        if self.budget == 0 {
            return Err(ConstructError::MultiplicityViolation { k: 0, budget: 0 });
        }
        let mut sizes = self.sizes.clone();
        if let Some(c) = sizes.get_mut(&(self.n + 1)) {
            *c -= 1;
        }
        sizes.retain(|_, c| *c > 0);
        bump(&mut sizes, self.n + 2, 1);
        Ok(StageShape {
            stage: "homogeneous-base".into(),
            kind: StageKind::Homogeneous,
            last: self.last + 1,
            height: 1,
            sizes,
            last_size: self.n + 2,
            required: None,
            ..self.clone()
        })
    }

    /// Sizes of the `[0, L-1]` variant.
    fn reduced_sizes(&self) -> BTreeMap<usize, u128> {
        let mut s = self.sizes.clone();
        if let Some(c) = s.get_mut(&self.last_size) {
            *c -= 1;
        }
        s.retain(|_, c| *c > 0);
        bump(&mut s, self.last_size - 1, 1);
        s
    }

    fn lift<F>(
        &self,
        d: u64,
        require_full: bool,
        mut piece: F,
    ) -> Res<(u64, u64, u64, BTreeMap<usize, Piece>)>
    where
        F: FnMut(usize) -> Res<Piece>,
    {
        let reduced = self.reduced_sizes();
        let mut pieces = BTreeMap::new();
        for &len in self.sizes.keys().chain(reduced.keys()) {
            if let std::collections::btree_map::Entry::Vacant(e) = pieces.entry(len) {
                e.insert(piece(len)?);
            }
        }
        let height_of =
            |m: &BTreeMap<usize, u128>| m.keys().fold(1, |h, l| lcm(h, pieces[l].height));
        let height = lcm(height_of(&self.sizes), height_of(&reduced));
        let (b, c) = represent_two_coins(d, self.last, self.last + 1, require_full)?;
        Ok((height, b, c, pieces))
    }

    pub fn homogeneous_step(&self, table: &HeightTable, d: u64, k: usize) -> Res<Self> {
        self.expect(StageKind::Homogeneous)?;
        let required = homogeneous_step_threshold(self.last)?;
        check_growth(d, required)?;
        if k == 0 {
            return Err(ConstructError::Hypothesis(
                "multiplicity must be positive".into(),
            ));
        }
        let n = self.n;
        let (height, b, c, pieces) = self.lift(d, true, |len| {
            let m = len.wrapping_sub(1);
            if m == n {
                Ok(piece_of(&table.get(n, k, n + 1)?.witness))
            } else if n < m && m < 2 * n {
                Ok(piece_of(&diagonal_stripe_tiling(n, k, m)?))
            } else {
                Err(ConstructError::CardinalityViolation {
                    size: len,
                    lo: n + 1,
                    hi: 2 * n,
                })
            }
        })?;
        let mut sizes = BTreeMap::new();
        for (block, copies) in [(self.sizes.clone(), b), (self.reduced_sizes(), c)] {
            for (len, count) in block {
                let p = &pieces[&len];
                let reps = count
                    .saturating_mul((height / p.height) as u128)
                    .saturating_mul(copies as u128);
                for (&plen, &pc) in &p.paths {
                    bump(&mut sizes, plen, pc.saturating_mul(reps));
                }
            }
        }
        sizes.retain(|_, c| *c > 0);
        Ok(StageShape {
            stage: "homogeneous-step".into(),
            kind: StageKind::Homogeneous,
            last: mul(d, height)? - 1,
            height,
            n: n + k,
            d1: self.d1,
            budget: 0,
            sizes,
            last_size: pieces[&self.last_size].top_right,
            required: Some(required),
        })
    }

    pub fn final_stage(&self, table: &HeightTable, d: u64, k: usize) -> Res<Self> {
        self.expect(StageKind::Homogeneous)?;
        let required = final_threshold(self.last)?;
        check_growth(d, required)?;
        if k == 0 {
            return Err(ConstructError::Hypothesis(
                "multiplicity must be positive".into(),
            ));
        }
        let n = self.n;
        let (height, _, _, _) = self.lift(d, false, |len| {
            if len < n + 1 || len > n + k + 1 {
                return Err(ConstructError::CardinalityViolation {
                    size: len,
                    lo: n + 1,
                    hi: n + k + 1,
                });
            }
            Ok(Piece {
                height: table.f(n, k, len)?,
                paths: BTreeMap::new(),
                top_right: n + k + 1,
            })
        })?;
        let points = mul(d, height)?;
        let size = n + k + 1;
        Ok(StageShape {
            stage: "final".into(),
            kind: StageKind::Final,
            last: points - 1,
            height,
            n: n + k,
            d1: self.d1,
            budget: 0,
            sizes: BTreeMap::from([(size, (points / size as u64) as u128)]),
            last_size: size,
            required: Some(required),
        })
    }
}

fn tag(stage: &str) -> impl Fn(ConstructError) -> StagedError + '_ {
    move |error| StagedError {
        stage: stage.into(),
        error,
    }
}

/// Shapes of every stage introducing distances `2..=upto` under `split`.
fn walk(
    table: &HeightTable,
    gaps: &GapSet,
    split: SplitSpec,
    upto: usize,
) -> Result<Vec<StageShape>, StagedError> {
    let d = |i: usize| gaps.distance(i);
    let k = |i: usize| gaps.multiplicity(i);
    let mut out =
        vec![StageShape::base(table, d(1), d(2), k(1), k(2)).map_err(tag("interval-base"))?];
    for i in 3..=upto {
        let prev = out.last().expect("base stage present");
        let next = if i <= split.s {
            prev.interval_step(table, d(i), k(i))
                .map_err(tag("interval-step"))?
        } else {
            let prev = if i == split.s + 1 {
                let b = prev.homogeneous_base().map_err(tag("homogeneous-base"))?;
                out.push(b);
                out.last().expect("just pushed")
            } else {
                prev
            };
            if i == split.s + split.p {
                prev.final_stage(table, d(i), k(i)).map_err(tag("final"))?
            } else {
                prev.homogeneous_step(table, d(i), k(i))
                    .map_err(tag("homogeneous-step"))?
            }
        };
        out.push(next);
    }
    Ok(out)
}

pub(crate) fn run_shapes(
    table: &HeightTable,
    gaps: &GapSet,
    split: SplitSpec,
) -> Result<Vec<StageShape>, StagedError> {
    walk(table, gaps, split, gaps.distinct())
}

fn entry(
    stage: &str,
    idx: usize,
    required: u64,
    achieved: Option<u64>,
    note: Option<String>,
) -> ThresholdEntry {
    ThresholdEntry {
        stage: stage.into(),
        distance_index: idx,
        required,
        achieved,
        note,
    }
}

/// Stage requirements for a prefix `d_1 < ... < d_r`, followed by the
/// requirement on `d_{r+1}` for every stage that could come next (assuming
/// multiplicity `next_k`).
///
/// Without a split the prefix is read as a run of interval stages; the next
/// distance may then open a further interval stage, the last stage, or a
/// homogeneous stage.
pub fn thresholds(
    table: &HeightTable,
    prefix: &GapSet,
    split: Option<SplitSpec>,
    next_k: usize,
) -> Result<ThresholdReport, StagedError> {
    let r = prefix.distinct();
    let mut report = ThresholdReport::default();
    if r == 1 {
        let req = base_threshold(prefix.distance(1), prefix.multiplicity(1), next_k)
            .map_err(tag("interval-base"))?;
        report
            .entries
            .push(entry("interval-base", 2, req, None, None));
        return Ok(report);
    }
    let split = split.unwrap_or(SplitSpec::new(r.max(2), 0));
    if split.s < 2 || split.s + split.p < r {
        return Err(tag("hypotheses")(ConstructError::Hypothesis(format!(
            "split s={}, p={} cannot cover {r} distances",
            split.s, split.p
        ))));
    }
    let shapes = walk(table, prefix, split, r)?;
    let mut idx = 2;
    for sh in &shapes {
        if let Some(req) = sh.required {
            report
                .entries
                .push(entry(&sh.stage, idx, req, Some(prefix.distance(idx)), None));
            idx += 1;
        }
    }
    let last = shapes.last().expect("at least the base stage");
    let next = r + 1;
    let open_ended = split.p == 0 && split.s == r;
    if r < split.s || open_ended {
        let req =
            interval_step_threshold(last.last, last.d1, next_k).map_err(tag("interval-step"))?;
        let note = (next_k + 1 > last.budget).then(|| {
            format!(
                "infeasible: boundary budget {} < {}",
                last.budget,
                next_k + 1
            )
        });
        report
            .entries
            .push(entry("interval-step", next, req, None, note));
    }
    if (r == split.s && split.p > 0) || open_ended {
        if let Ok(b) = last.homogeneous_base() {
            let fin = final_threshold(b.last).map_err(tag("final"))?;
            let step = homogeneous_step_threshold(b.last).map_err(tag("homogeneous-step"))?;
            if open_ended || split.p == 1 {
                report.entries.push(entry("final", next, fin, None, None));
            }
            if open_ended || split.p > 1 {
                report
                    .entries
                    .push(entry("homogeneous-step", next, step, None, None));
            }
        }
    } else if r > split.s && r < split.s + split.p {
        let (stage, req) = if next == split.s + split.p {
            ("final", final_threshold(last.last))
        } else {
            ("homogeneous-step", homogeneous_step_threshold(last.last))
        };
        report
            .entries
            .push(entry(stage, next, req.map_err(tag(stage))?, None, None));
    }
    Ok(report)
}
