//! Constructive tilings of integer intervals by translates of gap-permuted
//! tiles.
//!
//! A tile is a strictly increasing run of integers; its gap set is the
//! multiset of consecutive differences. Given a gap set whose distances grow
//! fast enough, [`construct::construct`] builds an explicit tiling of some
//! interval `{0, ..., N-1}` by tiles with that gap set, verifying every
//! intermediate object on the way. The [`oracle`] module decides small
//! instances exhaustively and [`verify`] checks certificates of any size.

pub mod conditions;
pub mod construct;
pub mod format;
pub mod gapset;
pub mod grid;
pub mod interval;
pub mod lattice;
pub mod oracle;
pub mod report;
pub mod tile;
pub mod verify;

pub use conditions::{check_sufficient_conditions, ConditionResult, ConditionStatus};
pub use construct::{
    auto_split, construct, thresholds, ConstructError, ConstructOptions, Construction, StageRecord,
    StageState, StagedError, ThresholdReport,
};
pub use format::{read_tiling, write_tiling, FormatError, TilingFile};
pub use gapset::{GapSet, GapSetError, SplitSpec};
pub use grid::{min_height_rect, GridError, HeightTable};
pub use interval::{Annotations, IntervalTiling};
pub use lattice::{LatticePath, LiftedTiling, Point2, RectangleTiling, StepType, E1, E2};
pub use oracle::{
    min_interval, solve_interval, solve_rectangle, SearchConfig, SearchOutcome, SearchStatus,
};
pub use report::{Location, VerificationReport, Violation, ViolationKind};
pub use tile::{gap_multiset, Tile};
pub use verify::{
    verify_boundary_prefix, verify_homogeneous, verify_interval_tiling, verify_lifted_tiling,
    verify_rectangle_tiling, Verifier,
};
