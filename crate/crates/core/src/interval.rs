use serde::{Deserialize, Serialize};

use crate::gapset::GapSet;
use crate::tile::Tile;

/// Extra properties a construction claims for an interval tiling.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotations {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary_prefix_count: Option<usize>,
    /// When set, `tiles` are homogeneous sequences for this gap set rather
    /// than plain tiles.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub homogeneous_for: Option<GapSet>,
}

impl Annotations {
    pub fn is_empty(&self) -> bool {
        self.boundary_prefix_count.is_none() && self.homogeneous_for.is_none()
    }
}

/// A claimed partition of `{0, ..., length-1}` into tiles.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalTiling {
    pub length: u64,
    pub gap_set: GapSet,
    pub tiles: Vec<Tile>,
    pub annotations: Annotations,
}

impl IntervalTiling {
    pub fn new(length: u64, gap_set: GapSet, tiles: Vec<Tile>) -> Self {
        IntervalTiling {
            length,
            gap_set,
            tiles,
            annotations: Annotations::default(),
        }
    }

    /// Index `L` of the last covered point.
    pub fn last_point(&self) -> i64 {
        self.length as i64 - 1
    }

    /// Sorts tiles by their first point; verifiers and renderers stream in
    /// this order.
    pub fn sort_tiles(&mut self) {
        self.tiles.sort_by_key(|t| t.points().first().copied());
    }

    /// Index of the tile whose largest point is `p`, if any.
    pub fn tile_ending_at(&self, p: i64) -> Option<usize> {
        self.tiles
            .iter()
            .position(|t| t.points().last() == Some(&p))
    }

    pub fn is_homogeneous(&self) -> bool {
        self.annotations.homogeneous_for.is_some()
    }
}
