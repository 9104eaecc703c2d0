//! Monotone lattice paths and tilings of (possibly ragged) rectangles by them.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gapset::GapSet;

pub type Point2 = [i64; 2];

pub const E1: Point2 = [1, 0];
pub const E2: Point2 = [0, 1];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("a path needs at least one point")]
    Empty,
    #[error("step {0} of the path is zero or decreases a coordinate")]
    NotMonotone(usize),
}

/// A sequence of lattice points whose consecutive steps are nonzero and
/// coordinatewise nonnegative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticePath {
    points: Vec<Point2>,
}

impl LatticePath {
    pub fn new(points: Vec<Point2>) -> Result<Self, PathError> {
        if points.is_empty() {
            return Err(PathError::Empty);
        }
        if let Some(i) = points.windows(2).position(|w| !is_forward_step(w[0], w[1])) {
            return Err(PathError::NotMonotone(i + 1));
        }
        Ok(LatticePath { points })
    }

    pub fn from_points_unchecked(points: Vec<Point2>) -> Self {
        LatticePath { points }
    }

    pub fn points(&self) -> &[Point2] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point2> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn start(&self) -> Point2 {
        self.points[0]
    }

    pub fn end(&self) -> Point2 {
        self.points[self.points.len() - 1]
    }

    /// Number of steps (points minus one).
    pub fn steps_len(&self) -> usize {
        self.points.len().saturating_sub(1)
    }

    pub fn steps(&self) -> impl Iterator<Item = Point2> + '_ {
        self.points
            .windows(2)
            .map(|w| [w[1][0] - w[0][0], w[1][1] - w[0][1]])
    }

    pub fn is_monotone(&self) -> bool {
        !self.points.is_empty() && self.points.windows(2).all(|w| is_forward_step(w[0], w[1]))
    }

    pub fn translated(&self, dx: i64, dy: i64) -> LatticePath {
        LatticePath {
            points: self.points.iter().map(|p| [p[0] + dx, p[1] + dy]).collect(),
        }
    }
}

fn is_forward_step(a: Point2, b: Point2) -> bool {
    b[0] >= a[0] && b[1] >= a[1] && a != b
}

/// A multiset of step vectors, normalized to sorted distinct vectors.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "Vec<(Point2, usize)>", into = "Vec<(Point2, usize)>")]
pub struct StepType {
    entries: Vec<(Point2, usize)>,
}

impl StepType {
    pub fn new<I: IntoIterator<Item = (Point2, usize)>>(entries: I) -> Self {
        let mut map: BTreeMap<Point2, usize> = BTreeMap::new();
        for (v, k) in entries {
            if k > 0 {
                *map.entry(v).or_default() += k;
            }
        }
        StepType {
            entries: map.into_iter().collect(),
        }
    }

    /// `{e1^(k), e2^(l)}`.
    pub fn unit(k: usize, l: usize) -> Self {
        StepType::new([(E1, k), (E2, l)])
    }

    /// `{(d e1)^(k_d) for d^(k_d) in gaps} ∪ {e2^(vertical)}`.
    pub fn horizontal_gaps(gaps: &GapSet, vertical: usize) -> Self {
        StepType::new(
            gaps.entries()
                .iter()
                .map(|&(d, k)| ([d as i64, 0], k))
                .chain(std::iter::once((E2, vertical))),
        )
    }

    /// The step multiset of a run of steps.
    pub fn of_steps<I: IntoIterator<Item = Point2>>(steps: I) -> Self {
        StepType::new(steps.into_iter().map(|s| (s, 1)))
    }

    pub fn entries(&self) -> &[(Point2, usize)] {
        &self.entries
    }

    /// Total number of steps.
    pub fn total(&self) -> usize {
        self.entries.iter().map(|e| e.1).sum()
    }

    pub fn count(&self, v: Point2) -> usize {
        self.entries
            .iter()
            .find(|e| e.0 == v)
            .map(|e| e.1)
            .unwrap_or(0)
    }

    /// Image under `(x, y) ↦ x + y·width`, as a gap multiset.
    pub fn flattened(&self, width: u64) -> Option<GapSet> {
        let gaps = self
            .entries
            .iter()
            .map(|&([dx, dy], k)| ((dx + dy * width as i64) as u64, k));
        GapSet::new(gaps).ok()
    }
}

impl From<Vec<(Point2, usize)>> for StepType {
    fn from(v: Vec<(Point2, usize)>) -> Self {
        StepType::new(v)
    }
}

impl From<StepType> for Vec<(Point2, usize)> {
    fn from(t: StepType) -> Self {
        t.entries
    }
}

/// A claimed tiling of `[0, width-1] × [0, height-1]` by lattice paths.
///
/// In windowed mode every run of `step_type.total() + 1` consecutive points
/// of a path must have step multiset `step_type`; otherwise every path must
/// have exactly that step multiset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RectangleTiling {
    pub width: u64,
    pub height: u64,
    pub step_type: StepType,
    pub windowed: bool,
    pub paths: Vec<LatticePath>,
}

impl RectangleTiling {
    pub fn new(width: u64, height: u64, step_type: StepType, paths: Vec<LatticePath>) -> Self {
        RectangleTiling {
            width,
            height,
            step_type,
            windowed: false,
            paths,
        }
    }

    pub fn area(&self) -> u64 {
        self.width * self.height
    }

    /// Index of the path containing `p`, by linear scan.
    pub fn path_containing(&self, p: Point2) -> Option<usize> {
        self.paths
            .iter()
            .position(|path| path.points().contains(&p))
    }
}

/// A tiling of `support × [0, height-1]` where `support` is an arbitrary
/// strictly increasing set of x-coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftedTiling {
    pub support: Vec<i64>,
    pub height: u64,
    pub step_type: StepType,
    pub windowed: bool,
    pub paths: Vec<LatticePath>,
}

impl LiftedTiling {
    pub fn with_step_type(mut self, step_type: StepType, windowed: bool) -> Self {
        self.step_type = step_type;
        self.windowed = windowed;
        self
    }

    /// Whether the support is exactly `{0, ..., width-1}`.
    pub fn is_rectangle(&self) -> bool {
        self.support.iter().enumerate().all(|(i, &x)| x == i as i64)
    }

    /// Reinterprets a contiguous support starting at 0 as a plain rectangle.
    pub fn into_rectangle(self) -> Option<RectangleTiling> {
        if !self.is_rectangle() {
            return None;
        }
        Some(RectangleTiling {
            width: self.support.len() as u64,
            height: self.height,
            step_type: self.step_type,
            windowed: self.windowed,
            paths: self.paths,
        })
    }
}

impl From<RectangleTiling> for LiftedTiling {
    fn from(r: RectangleTiling) -> Self {
        LiftedTiling {
            support: (0..r.width as i64).collect(),
            height: r.height,
            step_type: r.step_type,
            windowed: r.windowed,
            paths: r.paths,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_validation() {
        assert!(LatticePath::new(vec![[0, 0], [1, 0], [1, 2]]).is_ok());
        assert_eq!(
            LatticePath::new(vec![[0, 0], [0, 0]]),
            Err(PathError::NotMonotone(1))
        );
        assert_eq!(
            LatticePath::new(vec![[0, 1], [1, 0]]),
            Err(PathError::NotMonotone(1))
        );
        assert_eq!(LatticePath::new(vec![]), Err(PathError::Empty));
    }

    #[test]
    fn step_type_normalizes_and_flattens() {
        let t = StepType::new([(E2, 1), (E1, 2), (E2, 1)]);
        assert_eq!(t.entries(), &[(E2, 2), (E1, 2)]);
        assert_eq!(t.total(), 4);
        assert_eq!(t.flattened(3).unwrap(), "1:2,3:2".parse().unwrap());
        let g: GapSet = "1:1,2:1,4:1".parse().unwrap();
        let h = StepType::horizontal_gaps(&g, 2);
        assert_eq!(h.count([4, 0]), 1);
        assert_eq!(h.count(E2), 2);
    }

    #[test]
    fn step_type_serializes_as_nested_pairs() {
        let t = StepType::unit(1, 2);
        assert_eq!(serde_json::to_string(&t).unwrap(), "[[[0,1],2],[[1,0],1]]");
    }
}
