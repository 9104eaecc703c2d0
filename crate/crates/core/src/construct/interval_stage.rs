use num_integer::lcm;

use crate::grid::{
    concat_columns, dilate_x, flatten, residue_interleave, stack_to_height, stair_tiling,
    ColumnTiling, HeightTable,
};
use crate::lattice::{StepType, E2};
use crate::verify::{verify_boundary_prefix, verify_interval_tiling, verify_rectangle_tiling};

use super::{
    assemble, base_threshold, check_growth, endpoint_index, interval_step_threshold,
    represent_two_coins, row_of_blocks, verified, BaseDecomposition, BlockRecord, ConstructError,
    StageKind, StageRecord, StageState,
};

fn block(label: &str, width: u64, count: u64) -> BlockRecord {
    BlockRecord {
        label: label.into(),
        width,
        count,
    }
}

/// Tiles `[0, h·d2 - 1]` by translates of `{d1^(k1), d2^(k2)}` such that the
/// tiles ending at the last `d1` points start with `k1` gaps of `d1`.
pub fn interval_base(
    table: &HeightTable,
    d1: u64,
    d2: u64,
    k1: usize,
    k2: usize,
) -> Result<StageState, ConstructError> {
    if d1 == 0 || k1 == 0 || k2 == 0 || d2 <= d1 {
        return Err(ConstructError::Hypothesis(format!(
            "base stage needs 0 < d1 < d2 and positive multiplicities (d1={d1}, d2={d2}, k1={k1}, k2={k2})"
        )));
    }
    let required = base_threshold(d1, k1, k2)?;
    check_growth(d2, required)?;
    let kk = k1 + k2;
    let dec = BaseDecomposition::new(d1, d2, kk as u64)?;

    let narrow = table.get(k1, k2, kk)?;
    let h = lcm(k2 as u64 + 1, narrow.f);
    let narrow_col = stack_to_height(&ColumnTiling::new(narrow.witness.clone()), h)?;
    let wide_col = stack_to_height(&ColumnTiling::new(stair_tiling(k1, k2)), h)?;
    let column = |b: u64, c: u64| {
        concat_columns(
            std::iter::repeat_n(&narrow_col, c as usize)
                .chain(std::iter::repeat_n(&wide_col, b as usize)),
        )
    };
    let col_b = dilate_x(&column(dec.b1, dec.c1)?, d1, 0)?;
    let col_a = dilate_x(&column(dec.b2, dec.c2)?, d1, 0)?;

    let mut rect = residue_interleave(&col_a, &col_b, d1, dec.t)?;
    rect.step_type = StepType::new([([d1 as i64, 0], k1), (E2, k2)]);
    rect.windowed = false;
    verified(verify_rectangle_tiling(&rect))?;

    let mut tiling = flatten(&rect, d2)?;
    tiling.annotations.boundary_prefix_count = Some(k1);
    verified(verify_interval_tiling(&tiling, &tiling.gap_set))?;
    verified(verify_boundary_prefix(&tiling, d1, k1))?;

    let last = tiling.length - 1;
    Ok(StageState {
        kind: StageKind::Interval,
        endpoint_index: endpoint_index(&tiling, last + 1 - d1),
        last_point: last,
        boundary_prefix_count: k1,
        d1,
        record: StageRecord {
            stage: "interval-base".into(),
            l_in: None,
            l_out: last,
            h,
            blocks: vec![
                block("column a+1", dec.a + 1, dec.t),
                block("column a", dec.a, d1 - dec.t),
                block("narrow", kk as u64, dec.c1 * (d1 - dec.t) + dec.c2 * dec.t),
                block(
                    "stair",
                    kk as u64 + 1,
                    dec.b1 * (d1 - dec.t) + dec.b2 * dec.t,
                ),
            ],
            threshold_required: Some(required),
            d_used: Some(d2),
            note: None,
        },
        tiling,
    })
}

/// Adds `d^(k)`, spending `k` of the boundary budget.
pub fn interval_step(
    table: &HeightTable,
    prev: &StageState,
    d: u64,
    k: usize,
) -> Result<StageState, ConstructError> {
    prev.expect(StageKind::Interval)?;
    let budget = prev.boundary_prefix_count;
    if k == 0 || k + 1 > budget {
        return Err(ConstructError::MultiplicityViolation { k, budget });
    }
    let (last, d1) = (prev.last_point, prev.d1);
    let required = interval_step_threshold(last, d1, k)?;
    check_growth(d, required)?;

    let gaps = prev.gap_prefix();
    let n = gaps.size();
    let f1 = table.get(n, k, n + 1)?;
    let f2 = table.get(n, k, n + 2)?;
    let stair = stair_tiling(n, k);
    let h = lcm(k as u64 + 1, lcm(f1.f, f2.f));
    let step_type = StepType::horizontal_gaps(gaps, k);
    let tiles = &prev.tiling.tiles;
    let ext = prev.endpoint_index[0];
    let li = last as i64;

    let narrow = assemble(
        tiles.iter().map(|t| (t.points().to_vec(), &f1.witness)),
        h,
        &step_type,
        false,
    )?;
    let middle = assemble(
        tiles.iter().enumerate().map(|(i, t)| {
            let mut xs = t.points().to_vec();
            if i == ext {
                xs.push(li + 1);
                (xs, &f2.witness)
            } else {
                (xs, &f1.witness)
            }
        }),
        h,
        &step_type,
        false,
    )?;
    let mut extended = vec![false; tiles.len()];
    for &i in &prev.endpoint_index {
        extended[i] = true;
    }
    let wide = assemble(
        tiles.iter().enumerate().map(|(i, t)| {
            let mut xs = t.points().to_vec();
            if extended[i] {
                let e = t.last();
                xs.extend((1..=k as i64).map(|j| e + j * d1 as i64));
                (xs, &stair)
            } else {
                (xs, &f1.witness)
            }
        }),
        h,
        &step_type,
        false,
    )?;

    let wide_w = last + k as u64 * d1 + 1;
    let (b, c) = represent_two_coins(d - wide_w, last + 1, last + 2, false)?;
    let rect = row_of_blocks(&[(&narrow, c), (&middle, b), (&wide, 1)], &step_type, false)?;
    debug_assert_eq!(rect.width, d);

    let mut tiling = flatten(&rect, d)?;
    let new_budget = budget - k;
    tiling.annotations.boundary_prefix_count = Some(new_budget);
    verified(verify_interval_tiling(&tiling, &tiling.gap_set))?;
    verified(verify_boundary_prefix(&tiling, d1, new_budget))?;

    let new_last = tiling.length - 1;
    Ok(StageState {
        kind: StageKind::Interval,
        endpoint_index: endpoint_index(&tiling, new_last + 1 - d1),
        last_point: new_last,
        boundary_prefix_count: new_budget,
        d1,
        record: StageRecord {
            stage: "interval-step".into(),
            l_in: Some(last),
            l_out: new_last,
            h,
            blocks: vec![
                block("L+1", last + 1, c),
                block("L+2", last + 2, b),
                block("wide", wide_w, 1),
            ],
            threshold_required: Some(required),
            d_used: Some(d),
            note: None,
        },
        tiling,
    })
}
