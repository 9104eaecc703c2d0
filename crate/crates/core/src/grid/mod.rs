//! Rectangle tilings by lattice paths and the maps that carry them onto
//! intervals: lifting over a point set, dilation, stacking, side-by-side
//! concatenation, residue interleaving and flattening.

mod height;
mod stair;
mod stripe;
mod transform;

use thiserror::Error;

use crate::report::VerificationReport;

pub use height::{
    min_height_rect, min_height_rect_with, HeightEntry, HeightTable, CACHE_DIR_ENV,
    DEFAULT_MAX_HEIGHT,
};
pub use stair::stair_tiling;
pub use stripe::diagonal_stripe_tiling;
pub use transform::{
    concat_columns, dilate_x, flatten, lift_over_points, overlay, residue_interleave, stack_lifted,
    stack_to_height, translate_lifted, unflatten, ColumnTiling,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error(
        "width {m} is outside [{lo}, {hi}] for paths with {k} horizontal and {l} vertical steps"
    )]
    RangeError {
        k: usize,
        l: usize,
        m: usize,
        lo: usize,
        hi: usize,
    },
    #[error("no tiling of width {m} found for heights up to {bound} (k={k}, l={l})")]
    SearchExhausted {
        k: usize,
        l: usize,
        m: usize,
        bound: u64,
    },
    #[error("node budget exhausted while searching width {m}, height {f}")]
    SearchBudget { m: usize, f: u64 },
    #[error("stripe tiling needs n < m < 2n (n={n}, m={m})")]
    PreconditionError { n: usize, m: usize },
    #[error("expected width {expected}, got {got}")]
    WidthMismatch { expected: u64, got: u64 },
    #[error("offset {offset} must be below the dilation factor {d}")]
    OffsetError { offset: u64, d: u64 },
    #[error("height {height} is not a multiple of the period {period}")]
    PeriodError { height: u64, period: u64 },
    #[error("blocks have different heights ({0} vs {1})")]
    HeightMismatch(u64, u64),
    #[error("overlaid supports collide at x = {0}")]
    OffsetCollision(i64),
    #[error("interleaved supports do not form a rectangle")]
    NotRectangular,
    #[error("residue count t={t} must be below d1={d1}")]
    ResidueError { t: u64, d1: u64 },
    #[error("column support does not match a dilation by {d1}")]
    SupportMismatch { d1: u64 },
    #[error("height table i/o: {0}")]
    Cache(String),
    #[error("constructed tiling failed verification: {0}")]
    Verification(Box<VerificationReport>),
}
