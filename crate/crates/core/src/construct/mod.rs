//! The staged interval construction.
//!
//! A run starts from a two-distance tiling with a *boundary prefix* (the
//! tiles ending at the last `d1` points open with `k1` gaps of `d1`), adds
//! distances one at a time while spending that budget, then switches to
//! tilings by homogeneous sequences, and finally turns sequences back into
//! tiles. Every stage lifts rectangle tilings over the previous tiles,
//! stacks them, lays blocks of consecutive widths side by side and flattens
//! the result row by row.

mod dry;
mod homogeneous_stage;
mod interval_stage;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gapset::{GapSet, GapSetError, SplitSpec};
use crate::grid::{
    concat_columns, lift_over_points, overlay, stack_lifted, GridError, HeightTable,
};
use crate::interval::IntervalTiling;
use crate::lattice::{RectangleTiling, StepType};
use crate::report::VerificationReport;
use crate::verify::verify_rectangle_tiling;

pub use dry::{thresholds, StageShape};
pub use homogeneous_stage::{final_stage, homogeneous_base, homogeneous_step};
pub use interval_stage::{interval_base, interval_step};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstructError {
    #[error("distance {d} is below the required {required}")]
    GrowthViolation { d: u64, required: u64 },
    #[error("multiplicity {k} needs a boundary budget of at least {}, have {budget}", k + 1)]
    MultiplicityViolation { k: usize, budget: usize },
    #[error("sequence of {size} points is outside the admissible range [{lo}, {hi}]")]
    CardinalityViolation { size: usize, lo: usize, hi: usize },
    #[error("{a} is not a combination of {w1} and {w2} with the required signs")]
    NoRepresentation { a: u64, w1: u64, w2: u64 },
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),
    #[error("stage expects a {expected} state, got {got}")]
    WrongStage { expected: StageKind, got: StageKind },
    #[error("stage would produce {points} points, above the limit of {limit}")]
    TooLarge { points: u64, limit: u64 },
    #[error("integer overflow while computing stage sizes")]
    Overflow,
    #[error("no split (s, p) satisfies the multiplicity hypotheses")]
    EmptyResult,
    #[error(transparent)]
    Grid(#[from] GridError),
    #[error(transparent)]
    Gaps(#[from] GapSetError),
    #[error("stage output failed verification: {0}")]
    Verification(Box<VerificationReport>),
}

/// A [`ConstructError`] tagged with the stage it came from.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{stage}: {error}")]
pub struct StagedError {
    pub stage: String,
    #[source]
    pub error: ConstructError,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageKind {
    /// Interval tiling whose last `d1` tiles carry a boundary prefix.
    Interval,
    /// Tiling by homogeneous sequences.
    Homogeneous,
    /// The finished interval tiling.
    Final,
}

impl fmt::Display for StageKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StageKind::Interval => "interval",
            StageKind::Homogeneous => "homogeneous",
            StageKind::Final => "final",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockRecord {
    pub label: String,
    pub width: u64,
    pub count: u64,
}

/// One entry of the construction trace.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    #[serde(rename = "L_in")]
    pub l_in: Option<u64>,
    #[serde(rename = "L_out")]
    pub l_out: u64,
    pub h: u64,
    pub blocks: Vec<BlockRecord>,
    pub threshold_required: Option<u64>,
    pub d_used: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Output of one stage together with what the next stage needs to find.
#[derive(Debug, Clone, PartialEq)]
pub struct StageState {
    pub kind: StageKind,
    pub tiling: IntervalTiling,
    /// The tiling covers `[0, last_point]`.
    pub last_point: u64,
    pub boundary_prefix_count: usize,
    pub d1: u64,
    /// Tile indices ending at `last_point - d1 + 1 ..= last_point`, in order.
    /// Homogeneous stages only keep the sequence ending at `last_point`.
    pub endpoint_index: Vec<usize>,
    pub record: StageRecord,
}

impl StageState {
    pub fn gap_prefix(&self) -> &GapSet {
        &self.tiling.gap_set
    }

    pub fn height(&self) -> u64 {
        self.record.h
    }

    pub(crate) fn expect(&self, kind: StageKind) -> Result<(), ConstructError> {
        if self.kind != kind {
            return Err(ConstructError::WrongStage {
                expected: kind,
                got: self.kind,
            });
        }
        Ok(())
    }

    /// The tile or sequence containing the last point.
    pub fn last_tile(&self) -> usize {
        *self
            .endpoint_index
            .last()
            .expect("stage keeps its last tile")
    }
}

pub(crate) fn endpoint_index(t: &IntervalTiling, from: u64) -> Vec<usize> {
    let last = t.length as i64 - 1;
    let from = from as i64;
    let mut out = vec![usize::MAX; (last - from + 1) as usize];
    for (i, tile) in t.tiles.iter().enumerate() {
        let e = tile.last();
        if e >= from {
            out[(e - from) as usize] = i;
        }
    }
    debug_assert!(out.iter().all(|&i| i != usize::MAX));
    out
}

/// `a = b·w2 + c·w1` with `c ≥ 0` minimal and `b ≥ 1` (or `b ≥ 0`).
pub fn represent_two_coins(
    a: u64,
    w1: u64,
    w2: u64,
    require_positive_b: bool,
) -> Result<(u64, u64), ConstructError> {
    let none = ConstructError::NoRepresentation { a, w1, w2 };
    if w1 == 0 || w2 == 0 {
        return Err(none);
    }
    let min_b = u64::from(require_positive_b);
    for c in 0..w2 {
        let Some(rest) = c.checked_mul(w1).and_then(|cw| a.checked_sub(cw)) else {
            break;
        };
        if rest % w2 == 0 && rest / w2 >= min_b {
            return Ok((rest / w2, c));
        }
    }
    Err(none)
}

/// The coin split behind the two-distance base stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseDecomposition {
    pub a: u64,
    pub t: u64,
    pub b1: u64,
    pub c1: u64,
    pub b2: u64,
    pub c2: u64,
}

impl BaseDecomposition {
    /// `d2 = a·d1 + t`, with `a` and `a + 1` written over block widths
    /// `k` and `k + 1` using at least one wide block each.
    pub fn new(d1: u64, d2: u64, k: u64) -> Result<Self, ConstructError> {
        let (a, t) = (d2 / d1, d2 % d1);
        let (b1, c1) = represent_two_coins(a, k, k + 1, true)?;
        let (b2, c2) = represent_two_coins(a + 1, k, k + 1, true)?;
        Ok(BaseDecomposition {
            a,
            t,
            b1,
            c1,
            b2,
            c2,
        })
    }
}

fn overflow<T>(v: Option<T>) -> Result<T, ConstructError> {
    v.ok_or(ConstructError::Overflow)
}

/// Least `d2` allowed after `d1^(k1)`: `d1·(k1 + k2 + 1)²`.
pub fn base_threshold(d1: u64, k1: usize, k2: usize) -> Result<u64, ConstructError> {
    let w = (k1 + k2 + 1) as u64;
    overflow(w.checked_mul(w).and_then(|s| s.checked_mul(d1)))
}

/// `(L+1)(L+2) + (L + k·d1 + 1)`.
pub fn interval_step_threshold(last: u64, d1: u64, k: usize) -> Result<u64, ConstructError> {
    let wide = last
        .checked_add(1)
        .and_then(|x| x.checked_add((k as u64).checked_mul(d1)?));
    overflow(
        last.checked_add(1)
            .and_then(|a| a.checked_mul(last.checked_add(2)?))
            .and_then(|x| x.checked_add(wide?)),
    )
}

/// `(L+1)²`.
pub fn homogeneous_step_threshold(last: u64) -> Result<u64, ConstructError> {
    overflow(last.checked_add(1).and_then(|a| a.checked_mul(a)))
}

/// `L(L+1)`.
pub fn final_threshold(last: u64) -> Result<u64, ConstructError> {
    overflow(last.checked_add(1).and_then(|a| a.checked_mul(last)))
}

pub(crate) fn check_growth(d: u64, required: u64) -> Result<(), ConstructError> {
    if d < required {
        return Err(ConstructError::GrowthViolation { d, required });
    }
    Ok(())
}

pub(crate) fn verified(r: VerificationReport) -> Result<(), ConstructError> {
    if r.ok {
        Ok(())
    } else {
        Err(ConstructError::Verification(Box::new(r)))
    }
}

/// Lifts each rectangle over its point list, stacks everything to
/// `height`, merges the parts and checks the result against `step_type`.
pub(crate) fn assemble<'a, I>(
    pieces: I,
    height: u64,
    step_type: &StepType,
    windowed: bool,
) -> Result<RectangleTiling, ConstructError>
where
    I: IntoIterator<Item = (Vec<i64>, &'a RectangleTiling)>,
{
    let parts = pieces
        .into_iter()
        .map(|(xs, r)| stack_lifted(&lift_over_points(r, &xs)?, height))
        .collect::<Result<Vec<_>, GridError>>()?;
    let r = overlay(parts)?
        .with_step_type(step_type.clone(), windowed)
        .into_rectangle()
        .ok_or(GridError::NotRectangular)?;
    verified(verify_rectangle_tiling(&r))?;
    Ok(r)
}

/// `counts[i]` copies of `blocks[i]`, left to right.
pub(crate) fn row_of_blocks(
    blocks: &[(&RectangleTiling, u64)],
    step_type: &StepType,
    windowed: bool,
) -> Result<RectangleTiling, ConstructError> {
    let mut r = concat_columns(
        blocks
            .iter()
            .flat_map(|&(b, n)| std::iter::repeat_n(b, n as usize)),
    )?;
    r.step_type = step_type.clone();
    r.windowed = windowed;
    Ok(r)
}

pub(crate) fn guard(points: Option<u64>, limit: u64) -> Result<u64, ConstructError> {
    let points = overflow(points)?;
    if points > limit {
        return Err(ConstructError::TooLarge { points, limit });
    }
    Ok(points)
}

/// Size limit applied to every materialized stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConstructOptions {
    pub max_points: u64,
}

pub const DEFAULT_MAX_POINTS: u64 = 20_000_000;

impl Default for ConstructOptions {
    fn default() -> Self {
        ConstructOptions {
            max_points: DEFAULT_MAX_POINTS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdEntry {
    pub stage: String,
    /// 1-based index of the distance this stage introduces.
    pub distance_index: usize,
    pub required: u64,
    /// `None` for a prospective next stage.
    pub achieved: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Required and achieved distance per stage.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ThresholdReport {
    pub entries: Vec<ThresholdEntry>,
}

impl ThresholdReport {
    pub fn all_met(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.achieved.is_none_or(|a| a >= e.required))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Construction {
    pub tiling: IntervalTiling,
    pub thresholds: ThresholdReport,
    pub trace: Vec<StageRecord>,
}

/// Checks the multiplicity hypotheses for a split of `k_1..k_r`.
pub fn split_is_admissible(ks: &[usize], split: SplitSpec) -> bool {
    let SplitSpec { s, p } = split;
    if s < 2 || s + p != ks.len() || ks.contains(&0) {
        return false;
    }
    let step_multiplicity: usize = ks[2..s].iter().sum();
    if step_multiplicity + 1 > ks[0] {
        return false;
    }
    p == 0 || ks[s..s + p - 1].iter().sum::<usize>() < ks[s + p - 1]
}

/// All admissible splits, largest `s` first.
pub fn auto_split(gaps: &GapSet) -> Result<Vec<SplitSpec>, ConstructError> {
    let ks: Vec<usize> = gaps.entries().iter().map(|e| e.1).collect();
    let r = ks.len();
    let out: Vec<SplitSpec> = (2..=r)
        .rev()
        .map(|s| SplitSpec::new(s, r - s))
        .filter(|&sp| split_is_admissible(&ks, sp))
        .collect();
    if out.is_empty() {
        return Err(ConstructError::EmptyResult);
    }
    Ok(out)
}

fn staged(stage: &str) -> impl Fn(ConstructError) -> StagedError + '_ {
    move |error| StagedError {
        stage: stage.to_string(),
        error,
    }
}

/// Runs the whole pipeline for `gaps` under `split`, verifying every stage.
///
/// With `p = 0` the two-distance-and-up interval tiling is returned as is
/// and the trace notes `interval-only`.
pub fn construct(
    table: &HeightTable,
    gaps: &GapSet,
    split: SplitSpec,
    opts: &ConstructOptions,
) -> Result<Construction, StagedError> {
    let ks: Vec<usize> = gaps.entries().iter().map(|e| e.1).collect();
    if !split_is_admissible(&ks, split) {
        return Err(staged("hypotheses")(ConstructError::Hypothesis(format!(
            "split s={}, p={} does not satisfy the multiplicity conditions for {gaps}",
            split.s, split.p
        ))));
    }
    // Dry run first: refuses oversized instances before any allocation.
    let shapes = dry::run_shapes(table, gaps, split)?;
    for sh in &shapes {
        guard(sh.last.checked_add(1), opts.max_points).map_err(staged(&sh.stage))?;
    }

    let d = |i: usize| gaps.distance(i);
    let k = |i: usize| gaps.multiplicity(i);
    let mut trace = Vec::new();
    let mut report = ThresholdReport::default();
    let mut note = |st: &StageState, idx: usize| {
        trace.push(st.record.clone());
        if let (Some(req), Some(used)) = (st.record.threshold_required, st.record.d_used) {
            report.entries.push(ThresholdEntry {
                stage: st.record.stage.clone(),
                distance_index: idx,
                required: req,
                achieved: Some(used),
                note: None,
            });
        }
    };

    let mut state =
        interval_base(table, d(1), d(2), k(1), k(2)).map_err(staged("interval-base"))?;
    note(&state, 2);
    for i in 3..=split.s {
        state = interval_step(table, &state, d(i), k(i)).map_err(staged("interval-step"))?;
        note(&state, i);
    }
    if split.p == 0 {
        state.record.note = Some("interval-only".into());
        if let Some(last) = trace.last_mut() {
            last.note = Some("interval-only".into());
        }
    } else {
        state = homogeneous_base(&state).map_err(staged("homogeneous-base"))?;
        note(&state, split.s);
        for i in split.s + 1..split.s + split.p {
            state =
                homogeneous_step(table, &state, d(i), k(i)).map_err(staged("homogeneous-step"))?;
            note(&state, i);
        }
        let i = split.s + split.p;
        state = final_stage(table, &state, d(i), k(i)).map_err(staged("final"))?;
        note(&state, i);
    }

    for (rec, sh) in trace.iter().zip(&shapes) {
        assert_eq!(
            rec.l_out, sh.last,
            "dry run disagrees with stage {}",
            rec.stage
        );
    }
    let mut tiling = state.tiling;
    tiling.gap_set = gaps.clone();
    Ok(Construction {
        tiling,
        thresholds: report,
        trace,
    })
}
