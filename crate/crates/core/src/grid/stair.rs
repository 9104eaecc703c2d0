use crate::lattice::{LatticePath, Point2, RectangleTiling, StepType};

/// Expands corner points into unit steps.
pub(crate) fn path_through(corners: &[Point2]) -> LatticePath {
    let mut pts = vec![corners[0]];
    for c in &corners[1..] {
        let mut p = *pts.last().expect("non-empty");
        while p[0] < c[0] {
            p[0] += 1;
            pts.push(p);
        }
        while p[1] < c[1] {
            p[1] += 1;
            pts.push(p);
        }
    }
    LatticePath::from_points_unchecked(pts)
}

/// The explicit tiling of `[0, k+l] × [0, l]` by the `l+1` paths
///
/// `W_i = (i,0) → (i,l-i) → (k+i,l-i) → (k+i,l)`,
///
/// each of type `{e1^(k), e2^(l)}`. `W_l` ends in the top-right corner and
/// starts with `k` horizontal steps.
pub fn stair_tiling(k: usize, l: usize) -> RectangleTiling {
    let (k, l) = (k as i64, l as i64);
    let paths = (0..=l)
        .map(|i| path_through(&[[i, 0], [i, l - i], [k + i, l - i], [k + i, l]]))
        .collect();
    RectangleTiling::new(
        (k + l + 1) as u64,
        (l + 1) as u64,
        StepType::unit(k as usize, l as usize),
        paths,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::E1;
    use crate::verify::verify_rectangle_tiling;

    fn pts(r: &RectangleTiling) -> Vec<Vec<Point2>> {
        r.paths.iter().map(|p| p.points().to_vec()).collect()
    }

    #[test]
    fn smallest_stair() {
        let r = stair_tiling(1, 1);
        assert_eq!((r.width, r.height), (3, 2));
        assert_eq!(
            pts(&r),
            vec![vec![[0, 0], [0, 1], [1, 1]], vec![[1, 0], [2, 0], [2, 1]]]
        );
    }

    #[test]
    fn verifies_for_small_parameters() {
        for k in 1..=8 {
            for l in 1..=8 {
                let r = stair_tiling(k, l);
                assert_eq!(r.paths.len(), l + 1);
                for (i, p) in r.paths.iter().enumerate() {
                    assert_eq!(p.start(), [i as i64, 0]);
                }
                let report = verify_rectangle_tiling(&r);
                assert!(report.ok, "k={k} l={l}: {report}");
                let corner = r
                    .paths
                    .iter()
                    .find(|p| p.end() == [(k + l) as i64, l as i64])
                    .unwrap();
                assert!(corner.steps().take(k).all(|s| s == E1));
            }
        }
    }
}
