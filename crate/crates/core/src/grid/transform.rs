use crate::interval::IntervalTiling;
use crate::lattice::{LatticePath, LiftedTiling, RectangleTiling, StepType};
use crate::tile::Tile;

use super::GridError;

/// A rectangle tiling used as a repeating vertical block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ColumnTiling {
    pub base: RectangleTiling,
    pub period: u64,
}

impl ColumnTiling {
    pub fn new(base: RectangleTiling) -> Self {
        let period = base.height;
        ColumnTiling { base, period }
    }
}

/// Applies `(x, y) ↦ (xs[x], y)`. Vertical steps are kept and a unit step
/// right from `x` becomes a step of `xs[x+1] - xs[x]`.
///
/// The declared step type of the result is read off the first path (its
/// first window in windowed mode); callers that know the intended type
/// should override it with [`LiftedTiling::with_step_type`].
pub fn lift_over_points(r: &RectangleTiling, xs: &[i64]) -> Result<LiftedTiling, GridError> {
    if xs.len() as u64 != r.width {
        return Err(GridError::WidthMismatch {
            expected: r.width,
            got: xs.len() as u64,
        });
    }
    let paths: Vec<LatticePath> = r
        .paths
        .iter()
        .map(|p| {
            LatticePath::from_points_unchecked(
                p.points()
                    .iter()
                    .map(|&[x, y]| [xs[x as usize], y])
                    .collect(),
            )
        })
        .collect();
    let window = r.step_type.total();
    let step_type = paths
        .first()
        .map(|p| StepType::of_steps(p.steps().take(if r.windowed { window } else { usize::MAX })))
        .unwrap_or_default();
    Ok(LiftedTiling {
        support: xs.to_vec(),
        height: r.height,
        step_type,
        windowed: r.windowed,
        paths,
    })
}

/// Lift over `offset, d + offset, 2d + offset, ...`.
pub fn dilate_x(r: &RectangleTiling, d: u64, offset: u64) -> Result<LiftedTiling, GridError> {
    if offset >= d {
        return Err(GridError::OffsetError { offset, d });
    }
    let xs: Vec<i64> = (0..r.width).map(|i| (i * d + offset) as i64).collect();
    lift_over_points(r, &xs)
}

fn stacked_paths(paths: &[LatticePath], period: u64, copies: u64) -> Vec<LatticePath> {
    let mut out = Vec::with_capacity(paths.len() * copies as usize);
    for j in 0..copies {
        out.extend(paths.iter().map(|p| p.translated(0, (j * period) as i64)));
    }
    out
}

/// Vertical translates of the base block filling height `height`.
pub fn stack_to_height(c: &ColumnTiling, height: u64) -> Result<RectangleTiling, GridError> {
    if c.period == 0 || !height.is_multiple_of(c.period) {
        return Err(GridError::PeriodError {
            height,
            period: c.period,
        });
    }
    Ok(RectangleTiling {
        width: c.base.width,
        height,
        step_type: c.base.step_type.clone(),
        windowed: c.base.windowed,
        paths: stacked_paths(&c.base.paths, c.period, height / c.period),
    })
}

/// [`stack_to_height`] for ragged supports; the period is `l.height`.
pub fn stack_lifted(l: &LiftedTiling, height: u64) -> Result<LiftedTiling, GridError> {
    if l.height == 0 || !height.is_multiple_of(l.height) {
        return Err(GridError::PeriodError {
            height,
            period: l.height,
        });
    }
    Ok(LiftedTiling {
        support: l.support.clone(),
        height,
        step_type: l.step_type.clone(),
        windowed: l.windowed,
        paths: stacked_paths(&l.paths, l.height, height / l.height),
    })
}

/// Places blocks side by side, left to right.
pub fn concat_columns<'a, I>(blocks: I) -> Result<RectangleTiling, GridError>
where
    I: IntoIterator<Item = &'a RectangleTiling>,
{
    let mut blocks = blocks.into_iter().peekable();
    let first = *blocks.peek().ok_or(GridError::NotRectangular)?;
    let (height, step_type, windowed) = (first.height, first.step_type.clone(), first.windowed);
    let mut paths = Vec::new();
    let mut x0 = 0u64;
    for b in blocks {
        if b.height != height {
            return Err(GridError::HeightMismatch(height, b.height));
        }
        paths.extend(b.paths.iter().map(|p| p.translated(x0 as i64, 0)));
        x0 += b.width;
    }
    Ok(RectangleTiling {
        width: x0,
        height,
        step_type,
        windowed,
        paths,
    })
}

pub fn translate_lifted(l: &LiftedTiling, dx: i64) -> LiftedTiling {
    LiftedTiling {
        support: l.support.iter().map(|x| x + dx).collect(),
        height: l.height,
        step_type: l.step_type.clone(),
        windowed: l.windowed,
        paths: l.paths.iter().map(|p| p.translated(dx, 0)).collect(),
    }
}

/// Union of tilings over pairwise disjoint supports of equal height. The
/// step type is taken from the first part.
pub fn overlay(parts: Vec<LiftedTiling>) -> Result<LiftedTiling, GridError> {
    let height = parts.first().ok_or(GridError::NotRectangular)?.height;
    let step_type = parts[0].step_type.clone();
    let windowed = parts[0].windowed;
    let mut support = Vec::with_capacity(parts.iter().map(|p| p.support.len()).sum());
    let mut paths = Vec::with_capacity(parts.iter().map(|p| p.paths.len()).sum());
    for p in parts {
        if p.height != height {
            return Err(GridError::HeightMismatch(height, p.height));
        }
        support.extend(p.support);
        paths.extend(p.paths);
    }
    support.sort_unstable();
    if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
        return Err(GridError::OffsetCollision(w[0]));
    }
    Ok(LiftedTiling {
        support,
        height,
        step_type,
        windowed,
        paths,
    })
}

/// Fills `[0, a·d1 + t - 1]` by `t` shifted copies of `col_a` (residues
/// `0..t`) and `d1 - t` shifted copies of `col_b` (residues `t..d1`).
///
/// `col_a` must be supported on `{0, d1, ..., a·d1}` and `col_b` on
/// `{0, d1, ..., (a-1)·d1}`; distinct residues modulo `d1` keep the copies
/// disjoint.
pub fn residue_interleave(
    col_a: &LiftedTiling,
    col_b: &LiftedTiling,
    d1: u64,
    t: u64,
) -> Result<RectangleTiling, GridError> {
    if t >= d1 {
        return Err(GridError::ResidueError { t, d1 });
    }
    let a = col_b.support.len() as u64;
    let dilated = |col: &LiftedTiling, len: u64| {
        col.support.len() as u64 == len
            && col
                .support
                .iter()
                .enumerate()
                .all(|(i, &x)| x == (i as u64 * d1) as i64)
    };
    if !dilated(col_b, a) || (t > 0 && !dilated(col_a, a + 1)) {
        return Err(GridError::SupportMismatch { d1 });
    }
    if t > 0 && col_a.height != col_b.height {
        return Err(GridError::HeightMismatch(col_a.height, col_b.height));
    }
    let parts: Vec<LiftedTiling> = (0..d1)
        .map(|i| translate_lifted(if i < t { col_a } else { col_b }, i as i64))
        .collect();
    let merged = overlay(parts)?;
    let width = merged.support.len() as u64;
    if width != a * d1 + t {
        return Err(GridError::NotRectangular);
    }
    merged.into_rectangle().ok_or(GridError::NotRectangular)
}

/// Sends `(x, y)` to `x + y·width`, turning every path into a tile (or, for
/// windowed tilings, a homogeneous sequence) of `[0, width·height - 1]`.
pub fn flatten(r: &RectangleTiling, width: u64) -> Result<IntervalTiling, GridError> {
    if width != r.width {
        return Err(GridError::WidthMismatch {
            expected: r.width,
            got: width,
        });
    }
    let w = width as i64;
    let mut tiles: Vec<Tile> = r
        .paths
        .iter()
        .map(|p| Tile::from_points_unchecked(p.points().iter().map(|&[x, y]| x + y * w).collect()))
        .collect();
    tiles.sort_by_key(|t| t.points().first().copied());
    let gap_set = r
        .step_type
        .flattened(width)
        .ok_or(GridError::WidthMismatch {
            expected: r.width,
            got: width,
        })?;
    let mut out = IntervalTiling::new(width * r.height, gap_set.clone(), tiles);
    if r.windowed {
        out.annotations.homogeneous_for = Some(gap_set);
    }
    Ok(out)
}

/// Inverse of [`flatten`]: `p ↦ (p mod width, p div width)`.
pub fn unflatten(t: &IntervalTiling, width: u64) -> Result<RectangleTiling, GridError> {
    if width == 0 || !t.length.is_multiple_of(width) {
        return Err(GridError::WidthMismatch {
            expected: width,
            got: t.length,
        });
    }
    let w = width as i64;
    let paths = t
        .tiles
        .iter()
        .map(|tile| {
            LatticePath::from_points_unchecked(
                tile.points()
                    .iter()
                    .map(|&p| [p.rem_euclid(w), p.div_euclid(w)])
                    .collect(),
            )
        })
        .collect();
    let step_type = StepType::new(t.gap_set.entries().iter().map(|&(g, k)| {
        let g = g as i64;
        ([g % w, g / w], k)
    }));
    Ok(RectangleTiling {
        width,
        height: t.length / width,
        step_type,
        windowed: t.is_homogeneous(),
        paths,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{min_height_rect, stair_tiling};
    use crate::lattice::E2;
    use crate::verify::{verify_interval_tiling, verify_lifted_tiling, verify_rectangle_tiling};

    #[test]
    fn lift_to_sample_gaps() {
        // a single 4-wide row path lifted over (0,1,3,7)
        let r = RectangleTiling::new(
            4,
            1,
            StepType::unit(3, 0),
            vec![LatticePath::new(vec![[0, 0], [1, 0], [2, 0], [3, 0]]).unwrap()],
        );
        let l = lift_over_points(&r, &[0, 1, 3, 7]).unwrap();
        let steps: Vec<_> = l.paths[0].steps().collect();
        assert_eq!(steps, vec![[1, 0], [2, 0], [4, 0]]);
        assert!(verify_lifted_tiling(&l).ok);
        assert!(lift_over_points(&r, &[0, 1]).is_err());
    }

    #[test]
    fn identity_lift_and_dilation() {
        let r = stair_tiling(2, 3);
        let id = lift_over_points(&r, &(0..r.width as i64).collect::<Vec<_>>()).unwrap();
        assert_eq!(id.clone().into_rectangle().unwrap(), r);
        assert_eq!(dilate_x(&r, 1, 0).unwrap(), id);
        let l = dilate_x(&stair_tiling(1, 0), 3, 1).unwrap();
        assert_eq!(l.support, vec![1, 4]);
        assert_eq!(
            dilate_x(&r, 3, 3),
            Err(GridError::OffsetError { offset: 3, d: 3 })
        );
        let d = dilate_x(&r, 3, 2).unwrap();
        for p in &d.paths {
            assert!(p.steps().all(|s| s == [3, 0] || s == E2));
        }
    }

    #[test]
    fn stacking() {
        let base = min_height_rect(1, 1, 2).unwrap().1;
        assert_eq!(base.height, 3);
        let c = ColumnTiling::new(base.clone());
        assert_eq!(stack_to_height(&c, 3).unwrap(), base);
        let six = stack_to_height(&c, 6).unwrap();
        assert_eq!(six.paths.len(), 2 * base.paths.len());
        assert!(verify_rectangle_tiling(&six).ok);
        assert_eq!(
            stack_to_height(&c, 4),
            Err(GridError::PeriodError {
                height: 4,
                period: 3
            })
        );
    }

    #[test]
    fn concatenation() {
        let a = stair_tiling(1, 1);
        assert_eq!(concat_columns(std::slice::from_ref(&a)).unwrap(), a);
        let narrow = min_height_rect(1, 1, 2).unwrap().1;
        let h = 6;
        let left = stack_to_height(&ColumnTiling::new(narrow), h).unwrap();
        let right = stack_to_height(&ColumnTiling::new(a.clone()), h).unwrap();
        let both = concat_columns(&[left.clone(), right]).unwrap();
        assert_eq!(both.width, 5);
        assert!(verify_rectangle_tiling(&both).ok);
        assert_eq!(
            concat_columns(&[left, a]),
            Err(GridError::HeightMismatch(6, 2))
        );
    }

    #[test]
    fn interleave_single_residue() {
        let b = stair_tiling(1, 1);
        let col_b = dilate_x(&b, 1, 0).unwrap();
        let r = residue_interleave(&col_b, &col_b, 1, 0).unwrap();
        assert_eq!(r, b);
        assert_eq!(
            residue_interleave(&col_b, &col_b, 2, 2),
            Err(GridError::ResidueError { t: 2, d1: 2 })
        );
    }

    #[test]
    fn interleave_two_residues() {
        // widths a+1 = 3 and a = 2 dilated by 2, t = 1 → width 5
        let three = stair_tiling(1, 1);
        let col_a = dilate_x(&three, 2, 0).unwrap();
        let col_b_src = RectangleTiling::new(
            2,
            2,
            StepType::unit(1, 0),
            vec![
                LatticePath::new(vec![[0, 0], [1, 0]]).unwrap(),
                LatticePath::new(vec![[0, 1], [1, 1]]).unwrap(),
            ],
        );
        let col_b = dilate_x(&col_b_src, 2, 0).unwrap();
        let r = residue_interleave(&col_a, &col_b, 2, 1).unwrap();
        assert_eq!(r.width, 5);
        let mut xs: Vec<i64> = r
            .paths
            .iter()
            .flat_map(|p| p.points().iter().map(|q| q[0]))
            .collect();
        xs.sort_unstable();
        xs.dedup();
        assert_eq!(xs, vec![0, 1, 2, 3, 4]);
    }

    #[test]
    fn flatten_examples() {
        let r = stair_tiling(1, 1);
        let t = flatten(&r, 3).unwrap();
        assert_eq!(t.length, 6);
        let tiles: Vec<Vec<i64>> = t.tiles.iter().map(|t| t.points().to_vec()).collect();
        assert_eq!(tiles, vec![vec![0, 3, 4], vec![1, 2, 5]]);
        assert_eq!(t.gap_set, "1:1,3:1".parse().unwrap());
        assert!(verify_interval_tiling(&t, &t.gap_set).ok);
        assert_eq!(unflatten(&t, 3).unwrap().paths.len(), 2);
        assert!(flatten(&r, 4).is_err());
    }
}
