use crate::lattice::{LatticePath, RectangleTiling, StepType};

use super::GridError;

/// Tiles `[0, m] × [0, m + kv]` by pieces of infinite staircases that
/// alternate `n` unit steps right with `kv` unit steps up.
///
/// The lines `x + y ≡ m` and `x + y ≡ m + kv (mod n + kv)` cut the plane
/// into diagonal stripes. Inside a stripe of width `n` the points of one row
/// belong to one path; inside a stripe of width `kv` the points of one
/// column do. Boundary points join a row piece to a column piece.
///
/// The result is in windowed mode: every `n + kv` consecutive steps of a
/// path contain exactly `kv` vertical steps.
pub fn diagonal_stripe_tiling(n: usize, kv: usize, m: usize) -> Result<RectangleTiling, GridError> {
    if m <= n || m >= 2 * n {
        return Err(GridError::PreconditionError { n, m });
    }
    let (w, h) = (m as i64 + 1, (m + kv) as i64 + 1);
    let period = (n + kv) as i64;
    let kv_i = kv as i64;
    let phase = |x: i64, y: i64| (x + y - m as i64).rem_euclid(period);
    let inside = |x: i64, y: i64| x >= 0 && x < w && y >= 0 && y < h;

    let mut paths = Vec::new();
    for y in 0..h {
        for x in 0..w {
            let u = phase(x, y);
            let pred = if (1..=kv_i).contains(&u) {
                (x, y - 1)
            } else {
                (x - 1, y)
            };
            if inside(pred.0, pred.1) {
                continue;
            }
            let mut pts = Vec::new();
            let (mut px, mut py) = (x, y);
            while inside(px, py) {
                pts.push([px, py]);
                if phase(px, py) < kv_i {
                    py += 1;
                } else {
                    px += 1;
                }
            }
            paths.push(LatticePath::from_points_unchecked(pts));
        }
    }
    let mut r = RectangleTiling::new(w as u64, h as u64, StepType::unit(n, kv), paths);
    r.windowed = true;
    Ok(r)
}
