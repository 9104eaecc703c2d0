use proptest::prelude::*;

use gaptile::grid::{
    diagonal_stripe_tiling, dilate_x, flatten, lift_over_points, min_height_rect, stair_tiling,
    unflatten,
};
use gaptile::{
    gap_multiset, verify_homogeneous, verify_interval_tiling, verify_lifted_tiling,
    verify_rectangle_tiling, GapSet, RectangleTiling, Tile, ViolationKind,
};

/// Small verifier-clean rectangle tilings of both kinds.
fn small_rect() -> impl Strategy<Value = RectangleTiling> {
    prop_oneof![
        (1usize..5, 1usize..5).prop_map(|(k, l)| stair_tiling(k, l)),
        (1usize..4, 1usize..3)
            .prop_flat_map(|(k, l)| (Just(k), Just(l), k + 1..=k + l + 1))
            .prop_map(|(k, l, m)| min_height_rect(k, l, m).unwrap().1),
    ]
}

fn corrupt(mut r: RectangleTiling, seed: usize) -> RectangleTiling {
    let i = seed % r.paths.len();
    let mut pts = r.paths[i].points().to_vec();
    let j = seed / 7 % pts.len();
    pts[j][0] += 1;
    r.paths[i] = gaptile::LatticePath::from_points_unchecked(pts);
    r
}

proptest! {
    #[test]
    fn windowed_equals_uniform_at_full_window(r in small_rect(), seed in 0usize..1000, bad in any::<bool>()) {
        let r = if bad { corrupt(r, seed) } else { r };
        let mut w = r.clone();
        w.windowed = true;
        prop_assert_eq!(verify_rectangle_tiling(&r).ok, verify_rectangle_tiling(&w).ok);
    }

    #[test]
    fn lifting_projects_back(r in small_rect(), gaps in prop::collection::vec(1i64..6, 12)) {
        let mut xs = vec![0i64];
        for g in gaps.iter().take(r.width as usize - 1) {
            xs.push(xs.last().unwrap() + g);
        }
        let lifted = lift_over_points(&r, &xs).unwrap();
        // gaps differ between columns, so only the partition survives
        let rep = verify_lifted_tiling(&lifted);
        prop_assert!(!rep.has(ViolationKind::Overlap) && !rep.has(ViolationKind::Hole));
        for (p, q) in lifted.paths.iter().zip(&r.paths) {
            let back: Vec<[i64; 2]> = p
                .points()
                .iter()
                .map(|&[x, y]| [xs.binary_search(&x).unwrap() as i64, y])
                .collect();
            prop_assert_eq!(back.as_slice(), q.points());
        }
    }

    #[test]
    fn dilation_keeps_one_residue(r in small_rect(), d in 1u64..6, o in 0u64..6) {
        prop_assume!(o < d);
        let l = dilate_x(&r, d, o).unwrap();
        prop_assert!(l.paths.iter().all(|p| p.points().iter().all(|q| (q[0] as u64) % d == o)));
        prop_assert!(verify_lifted_tiling(&l).ok);
    }

    #[test]
    fn flattening_round_trips(r in small_rect()) {
        let t = flatten(&r, r.width).unwrap();
        prop_assert!(verify_interval_tiling(&t, &t.gap_set).ok);
        let back = unflatten(&t, r.width).unwrap();
        prop_assert_eq!(back.paths.len(), r.paths.len());
        prop_assert!(verify_rectangle_tiling(&back).ok);
    }

    #[test]
    fn gap_multiset_counts_points(gaps in prop::collection::vec(1i64..20, 1..10), start in -50i64..50) {
        let mut pts = vec![start];
        for g in &gaps {
            pts.push(pts.last().unwrap() + g);
        }
        let t = Tile::new(pts).unwrap();
        prop_assert_eq!(gap_multiset(&t).size(), t.len() - 1);
    }

    #[test]
    fn single_window_sequence_is_a_tile(gaps in prop::collection::vec(1i64..5, 1..4), perm in any::<prop::sample::Index>()) {
        let t: GapSet = GapSet::from_gaps(&gaps.iter().map(|&g| g as u64).collect::<Vec<_>>()).unwrap();
        let mut order = t.expanded();
        let shift = perm.index(order.len());
        order.rotate_left(shift);
        let mut pts = vec![0i64];
        for g in &order {
            pts.push(pts.last().unwrap() + *g as i64);
        }
        let n = *pts.last().unwrap() as u64 + 1;
        let seqs = vec![Tile::from_points_unchecked(pts.clone())];
        let tiling = gaptile::IntervalTiling::new(n, t.clone(), seqs.clone());
        prop_assert_eq!(
            verify_homogeneous(&seqs, n, &t).ok,
            verify_interval_tiling(&tiling, &t).ok
        );
    }

    #[test]
    fn stripes_verify_in_windowed_mode(n in 2usize..8, kv in 1usize..4, off in 1usize..8) {
        prop_assume!(off < n);
        let r = diagonal_stripe_tiling(n, kv, n + off).unwrap();
        prop_assert!(r.windowed);
        prop_assert!(verify_rectangle_tiling(&r).ok);
    }
}
