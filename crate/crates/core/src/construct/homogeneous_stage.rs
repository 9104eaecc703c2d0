use std::collections::BTreeMap;

use num_integer::lcm;

use crate::grid::{diagonal_stripe_tiling, flatten, HeightTable};
use crate::interval::IntervalTiling;
use crate::lattice::{RectangleTiling, StepType};
use crate::tile::Tile;
use crate::verify::{verify_homogeneous, verify_interval_tiling};

use super::{
    assemble, check_growth, final_threshold, homogeneous_step_threshold, represent_two_coins,
    row_of_blocks, verified, BlockRecord, ConstructError, StageKind, StageRecord, StageState,
};

/// Appends `L + 1` to the tile ending at `L - d1 + 1`. Its first gap is
/// `d1`, so every window of `|T| + 1` points still has gap multiset `T`.
pub fn homogeneous_base(prev: &StageState) -> Result<StageState, ConstructError> {
    prev.expect(StageKind::Interval)?;
    if prev.boundary_prefix_count == 0 {
        return Err(ConstructError::MultiplicityViolation { k: 0, budget: 0 });
    }
    let last = prev.last_point + 1;
    let idx = prev.endpoint_index[0];
    let mut tiles = prev.tiling.tiles.clone();
    let mut pts = tiles[idx].points().to_vec();
    pts.push(last as i64);
    tiles[idx] = Tile::from_points_unchecked(pts);

    let gaps = prev.gap_prefix().clone();
    let mut tiling = IntervalTiling::new(last + 1, gaps.clone(), tiles);
    tiling.annotations.homogeneous_for = Some(gaps.clone());
    verified(verify_homogeneous(&tiling.tiles, tiling.length, &gaps))?;

    Ok(StageState {
        kind: StageKind::Homogeneous,
        tiling,
        last_point: last,
        boundary_prefix_count: 0,
        d1: prev.d1,
        endpoint_index: vec![idx],
        record: StageRecord {
            stage: "homogeneous-base".into(),
            l_in: Some(prev.last_point),
            l_out: last,
            h: 1,
            blocks: Vec::new(),
            threshold_required: None,
            d_used: None,
            note: Some(format!(
                "extended the tile ending at {}",
                prev.last_point + 1 - prev.d1
            )),
        },
    })
}

struct Lifted {
    row: RectangleTiling,
    height: u64,
    full: u64,
    reduced: u64,
}

/// Lifts a rectangle over every sequence of `prev` (chosen by sequence size),
/// builds the same for `[0, L-1]` with the point `L` dropped, and lays `d`
/// columns out of the two blocks with the `[0, L]` block rightmost.
fn lift_sequences<F>(
    prev: &StageState,
    d: u64,
    k: usize,
    windowed: bool,
    require_full: bool,
    mut rect_for: F,
) -> Result<Lifted, ConstructError>
where
    F: FnMut(usize) -> Result<(u64, RectangleTiling), ConstructError>,
{
    let tiles = &prev.tiling.tiles;
    let last_idx = prev.last_tile();
    let shortened = tiles[last_idx].len() - 1;

    let mut rects: BTreeMap<usize, (u64, RectangleTiling)> = BTreeMap::new();
    for len in tiles.iter().map(Tile::len).chain([shortened]) {
        if let std::collections::btree_map::Entry::Vacant(e) = rects.entry(len) {
            e.insert(rect_for(len)?);
        }
    }
    let mut h_full = 1;
    let mut h_red = rects[&shortened].0;
    for (i, t) in tiles.iter().enumerate() {
        let f = rects[&t.len()].0;
        h_full = lcm(h_full, f);
        if i != last_idx {
            h_red = lcm(h_red, f);
        }
    }
    let height = lcm(h_full, h_red);

    let step_type = StepType::horizontal_gaps(prev.gap_prefix(), k);
    let full = assemble(
        tiles
            .iter()
            .map(|t| (t.points().to_vec(), &rects[&t.len()].1)),
        height,
        &step_type,
        windowed,
    )?;
    let reduced = assemble(
        tiles.iter().enumerate().map(|(i, t)| {
            let pts = t.points();
            let pts = if i == last_idx {
                &pts[..pts.len() - 1]
            } else {
                pts
            };
            (pts.to_vec(), &rects[&pts.len()].1)
        }),
        height,
        &step_type,
        windowed,
    )?;

    let last = prev.last_point;
    let (b, c) = represent_two_coins(d, last, last + 1, require_full)?;
    let row = row_of_blocks(&[(&reduced, c), (&full, b)], &step_type, windowed)?;
    Ok(Lifted {
        row,
        height,
        full: b,
        reduced: c,
    })
}

fn blocks(last: u64, l: &Lifted) -> Vec<BlockRecord> {
    vec![
        BlockRecord {
            label: "[0,L-1]".into(),
            width: last,
            count: l.reduced,
        },
        BlockRecord {
            label: "[0,L]".into(),
            width: last + 1,
            count: l.full,
        },
    ]
}

/// Adds `d^(k)` to a tiling by homogeneous sequences.
pub fn homogeneous_step(
    table: &HeightTable,
    prev: &StageState,
    d: u64,
    k: usize,
) -> Result<StageState, ConstructError> {
    prev.expect(StageKind::Homogeneous)?;
    let last = prev.last_point;
    let required = homogeneous_step_threshold(last)?;
    check_growth(d, required)?;
    let n = prev.gap_prefix().size();
    if k == 0 {
        return Err(ConstructError::Hypothesis(
            "multiplicity must be positive".into(),
        ));
    }

    let lifted = lift_sequences(prev, d, k, true, true, |len| {
        let m = len.wrapping_sub(1);
        if m == n {
            let e = table.get(n, k, n + 1)?;
            Ok((e.f, e.witness.clone()))
        } else if n < m && m < 2 * n {
            Ok(((m + k + 1) as u64, diagonal_stripe_tiling(n, k, m)?))
        } else {
            Err(ConstructError::CardinalityViolation {
                size: len,
                lo: n + 1,
                hi: 2 * n,
            })
        }
    })?;

    let tiling = flatten(&lifted.row, d)?;
    verified(verify_homogeneous(
        &tiling.tiles,
        tiling.length,
        &tiling.gap_set,
    ))?;
    let new_last = tiling.length - 1;
    let end = tiling
        .tile_ending_at(new_last as i64)
        .expect("every point is covered");
    Ok(StageState {
        kind: StageKind::Homogeneous,
        last_point: new_last,
        boundary_prefix_count: 0,
        d1: prev.d1,
        endpoint_index: vec![end],
        record: StageRecord {
            stage: "homogeneous-step".into(),
            l_in: Some(last),
            l_out: new_last,
            h: lifted.height,
            blocks: blocks(last, &lifted),
            threshold_required: Some(required),
            d_used: Some(d),
            note: None,
        },
        tiling,
    })
}

/// Turns a tiling by homogeneous sequences into an interval tiling for the
/// full gap set.
pub fn final_stage(
    table: &HeightTable,
    prev: &StageState,
    d: u64,
    k: usize,
) -> Result<StageState, ConstructError> {
    prev.expect(StageKind::Homogeneous)?;
    let last = prev.last_point;
    let required = final_threshold(last)?;
    check_growth(d, required)?;
    let n = prev.gap_prefix().size();
    if k == 0 {
        return Err(ConstructError::Hypothesis(
            "multiplicity must be positive".into(),
        ));
    }

    let lifted = lift_sequences(prev, d, k, false, false, |len| {
        if len < n + 1 || len > n + k + 1 {
            return Err(ConstructError::CardinalityViolation {
                size: len,
                lo: n + 1,
                hi: n + k + 1,
            });
        }
        let e = table.get(n, k, len)?;
        Ok((e.f, e.witness.clone()))
    })?;

    let tiling = flatten(&lifted.row, d)?;
    verified(verify_interval_tiling(&tiling, &tiling.gap_set))?;
    let new_last = tiling.length - 1;
    let end = tiling
        .tile_ending_at(new_last as i64)
        .expect("every point is covered");
    Ok(StageState {
        kind: StageKind::Final,
        last_point: new_last,
        boundary_prefix_count: 0,
        d1: prev.d1,
        endpoint_index: vec![end],
        record: StageRecord {
            stage: "final".into(),
            l_in: Some(last),
            l_out: new_last,
            h: lifted.height,
            blocks: blocks(last, &lifted),
            threshold_required: Some(required),
            d_used: Some(d),
            note: None,
        },
        tiling,
    })
}
