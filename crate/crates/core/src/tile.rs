use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gapset::GapSet;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TileError {
    #[error("a tile needs at least two points")]
    TooShort,
    #[error("tile points must be strictly increasing (index {0})")]
    NotIncreasing(usize),
}

/// One placed copy of a tile: a strictly increasing run of integers.
///
/// Deserialized tiles are not checked; verifiers report malformed ones
/// instead of trusting them.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Tile {
    points: Vec<i64>,
}

impl Tile {
    pub fn new(points: Vec<i64>) -> Result<Self, TileError> {
        if points.len() < 2 {
            return Err(TileError::TooShort);
        }
        if let Some(i) = points.windows(2).position(|w| w[0] >= w[1]) {
            return Err(TileError::NotIncreasing(i + 1));
        }
        Ok(Tile { points })
    }

    pub fn from_points_unchecked(points: Vec<i64>) -> Self {
        Tile { points }
    }

    pub fn points(&self) -> &[i64] {
        &self.points
    }

    pub fn into_points(self) -> Vec<i64> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn first(&self) -> i64 {
        self.points[0]
    }

    pub fn last(&self) -> i64 {
        self.points[self.points.len() - 1]
    }

    pub fn span(&self) -> u64 {
        (self.last() - self.first()) as u64
    }

    pub fn is_well_formed(&self) -> bool {
        self.points.len() >= 2 && self.points.windows(2).all(|w| w[0] < w[1])
    }

    /// Consecutive differences in order.
    pub fn gaps(&self) -> impl Iterator<Item = u64> + '_ {
        self.points.windows(2).map(|w| (w[1] - w[0]) as u64)
    }

    pub fn translated(&self, by: i64) -> Tile {
        Tile {
            points: self.points.iter().map(|p| p + by).collect(),
        }
    }
}

/// The normalized multiset of consecutive differences of `tile`.
pub fn gap_multiset(tile: &Tile) -> GapSet {
    GapSet::new(tile.gaps().map(|g| (g, 1))).expect("well-formed tile has positive gaps")
}
