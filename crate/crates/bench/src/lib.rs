//! Shared fixtures for the criterion benches in `benches/`.

use gaptile::construct::{interval_base, interval_step};
use gaptile::{GapSet, HeightTable, IntervalTiling};

/// The three-distance interval step instance: `{1^(2), 16, 4225}`.
pub fn step_tiling() -> (IntervalTiling, GapSet) {
    let table = HeightTable::in_memory();
    let base = interval_base(&table, 1, 16, 2, 1).expect("base stage");
    let st = interval_step(&table, &base, 4225, 1).expect("interval step");
    let gaps = st.tiling.gap_set.clone();
    (st.tiling, gaps)
}

/// Small gap sets the oracle settles in well under a second.
pub fn oracle_cases() -> Vec<(GapSet, u64)> {
    [("1,2", 6), ("2,3", 18), ("1,2,3", 12), ("1:2,5", 12)]
        .into_iter()
        .map(|(g, n)| (g.parse().expect("valid gap set"), n))
        .collect()
}
