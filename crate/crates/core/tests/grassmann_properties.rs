mod common;

use std::f64::consts::FRAC_PI_2;

use proptest::prelude::*;
use wignerkit::grassmann::{
    angles_compatible, bridge, clique_candidates, clique_report, extend_to_orthogonal, geodesic,
    grassmann_distance, greedy_extend, is_adjacent, is_compatible, is_ortho_adjacent,
    is_orthogonal, max_compatible_clique, principal_angles, star_members, top_members, CliqueKind,
};
use wignerkit::hilbert::Subspace;
use wignerkit::isometry::{Isometry, OperatorClass};
use wignerkit::sampling::{orthogonal_pair, pair_with_intersection, random_subspace, seeded};
use wignerkit::tolerance::Tolerance;

use common::squared_cosines;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn angles_agree_with_eigenvalue_route(seed in any::<u64>(), n in 3usize..8, k in 1usize..4) {
        prop_assume!(k <= n);
        let mut rng = seeded(seed);
        let x = random_subspace(n, k, &mut rng);
        let y = random_subspace(n, k, &mut rng);
        let angles = principal_angles(&x, &y).unwrap();
        for (t, c2) in angles.angles().iter().zip(squared_cosines(&x, &y)) {
            prop_assert!((t.cos().powi(2) - c2).abs() < 1e-10, "{t} vs cos^2 {c2}");
        }
    }

    #[test]
    fn angles_symmetric_and_unitarily_invariant(seed in any::<u64>(), n in 3usize..8, k in 1usize..4, conj in any::<bool>()) {
        prop_assume!(k <= n);
        let mut rng = seeded(seed);
        let x = random_subspace(n, k, &mut rng);
        let y = random_subspace(n, k, &mut rng);
        let class = if conj { OperatorClass::ConjugateLinear } else { OperatorClass::Linear };
        let u = Isometry::random(n, class, &mut rng);
        let a = principal_angles(&x, &y).unwrap();
        let b = principal_angles(&y, &x).unwrap();
        let c = principal_angles(&u.apply_subspace(&x), &u.apply_subspace(&y)).unwrap();
        for i in 0..k {
            prop_assert!((a.angles()[i] - b.angles()[i]).abs() < 1e-9);
            prop_assert!((a.angles()[i] - c.angles()[i]).abs() < 1e-9);
        }
        prop_assert!(a.angles().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn distance_counts_nonzero_angles(seed in any::<u64>(), n in 4usize..9, k in 1usize..4, j in 0usize..4) {
        prop_assume!(j <= k && 2 * k - j <= n);
        let tol = Tolerance::default();
        let (x, y) = pair_with_intersection(n, k, j, &mut seeded(seed)).unwrap();
        let d = grassmann_distance(&x, &y, &tol).unwrap();
        prop_assert_eq!(d, k - j);
        prop_assert_eq!(d, principal_angles(&x, &y).unwrap().count_nonzero(&tol));
    }

    #[test]
    fn geodesic_steps_are_adjacent(seed in any::<u64>(), n in 4usize..9, k in 1usize..4, j in 0usize..4) {
        prop_assume!(j <= k && 2 * k - j <= n);
        let tol = Tolerance::default();
        let (x, y) = pair_with_intersection(n, k, j, &mut seeded(seed)).unwrap();
        let path = geodesic(&x, &y, &tol).unwrap();
        prop_assert_eq!(path.len(), k - j);
        prop_assert!(path.consecutive_adjacent(&tol).unwrap());
        prop_assert!(path.nodes()[0].approx_eq(&x, &tol));
        prop_assert!(path.nodes().last().unwrap().approx_eq(&y, &tol));
        for (i, node) in path.nodes().iter().enumerate() {
            prop_assert_eq!(grassmann_distance(&x, node, &tol).unwrap(), i);
        }
    }

    #[test]
    fn compatibility_matches_angles_on_rotated_coordinate_pairs(seed in any::<u64>(), n in 3usize..8) {
        let tol = Tolerance::default();
        let mut rng = seeded(seed);
        let u = Isometry::random(n, OperatorClass::Linear, &mut rng);
        let k = 1 + (seed as usize) % (n - 1);
        let a: Vec<usize> = (0..k).collect();
        let b: Vec<usize> = (n - k..n).collect();
        let x = u.apply_subspace(&Subspace::coordinate(n, &a));
        let y = u.apply_subspace(&Subspace::coordinate(n, &b));
        prop_assert!(is_compatible(&x, &y, &tol).unwrap());
        prop_assert!(angles_compatible(&x, &y, &tol).unwrap());
        let z = random_subspace(n, k, &mut rng);
        prop_assert!(!is_compatible(&x, &z, &tol).unwrap());
        prop_assert!(!angles_compatible(&x, &z, &tol).unwrap());
    }
}

#[test]
fn angles_invariance_on_five_hundred_pairs() {
    let mut rng = seeded(500);
    for trial in 0..500 {
        let n = 3 + trial % 5;
        let k = 1 + trial % (n - 1).min(3);
        let x = random_subspace(n, k, &mut rng);
        let y = random_subspace(n, k, &mut rng);
        let u = Isometry::random(n, OperatorClass::Linear, &mut rng);
        let a = principal_angles(&x, &y).unwrap();
        let b = principal_angles(&y, &x).unwrap();
        let c = principal_angles(&u.apply_subspace(&x), &u.apply_subspace(&y)).unwrap();
        for i in 0..k {
            assert!((a.angles()[i] - b.angles()[i]).abs() < 1e-9);
            assert!((a.angles()[i] - c.angles()[i]).abs() < 1e-9);
        }
    }
}

#[test]
fn adjacency_survives_unitary_images() {
    let tol = Tolerance::default();
    let mut rng = seeded(11);
    let x = Subspace::coordinate(5, &[0, 1]);
    let y = Subspace::coordinate(5, &[0, 2]);
    for _ in 0..20 {
        let u = Isometry::random(5, OperatorClass::Linear, &mut rng);
        let (ux, uy) = (u.apply_subspace(&x), u.apply_subspace(&y));
        assert!(is_adjacent(&ux, &uy, &tol).unwrap());
        assert!(is_ortho_adjacent(&ux, &uy, &tol).unwrap());
    }
}

#[test]
fn geodesics_between_orthogonal_pairs_are_compatible() {
    let tol = Tolerance::default();
    let mut rng = seeded(431);
    let mut checked = 0;
    for k in [2, 3] {
        for trial in 0..100 {
            let n = 2 * k + 1 + trial % 3;
            let (x, y) = orthogonal_pair(n, k, &mut rng).unwrap();
            let path = geodesic(&x, &y, &tol).unwrap();
            assert_eq!(path.len(), k);
            assert!(path.consecutive_adjacent(&tol).unwrap());
            assert!(
                path.pairwise_compatible(&tol).unwrap(),
                "n={n} k={k} trial={trial}"
            );
            checked += 1;
        }
    }
    assert_eq!(checked, 200);
}

#[test]
fn compatible_coordinate_pairs_extend_to_an_orthogonal_geodesic() {
    let tol = Tolerance::default();
    let cases: [(usize, &[usize], &[usize]); 4] = [
        (5, &[0, 1], &[1, 2]),
        (6, &[0, 1, 2], &[0, 3, 4]),
        (7, &[0, 1, 2], &[0, 1, 3]),
        (4, &[0, 1], &[2, 3]),
    ];
    for (n, a, b) in cases {
        let x = Subspace::coordinate(n, a);
        let y = Subspace::coordinate(n, b);
        let (z, path) = extend_to_orthogonal(&x, &y, &tol).unwrap();
        assert!(is_orthogonal(&x, &z, &tol).unwrap());
        assert_eq!(path.len(), a.len());
        assert!(path.consecutive_adjacent(&tol).unwrap());
        assert!(path.nodes().iter().any(|node| node.approx_eq(&y, &tol)));
        assert!(path.pairwise_compatible(&tol).unwrap());
    }
}

#[test]
fn star_members_pairwise_adjacent_and_tops_contained() {
    let tol = Tolerance::default();
    let mut rng = seeded(12);
    for (n, k) in [(5, 2), (6, 3), (7, 3)] {
        let x = random_subspace(n, k - 1, &mut rng);
        let star = star_members(&x, 6, 3, &tol).unwrap();
        for i in 0..star.len() {
            assert!(star[i].contains(&x, &tol));
            for j in i + 1..star.len() {
                assert!(is_adjacent(&star[i], &star[j], &tol).unwrap());
            }
        }
        let y = random_subspace(n, k + 1, &mut rng);
        let top = top_members(&y, 6, 4, &tol).unwrap();
        for i in 0..top.len() {
            assert_eq!(top[i].dim(), k);
            assert!(y.contains(&top[i], &tol));
            for j in i + 1..top.len() {
                assert!(is_adjacent(&top[i], &top[j], &tol).unwrap());
            }
        }
    }
}

#[test]
fn cliques_around_random_anchors_are_maximal() {
    let tol = Tolerance::default();
    let mut rng = seeded(13);
    for (n, k) in [(5, 2), (6, 2), (7, 3), (8, 3)] {
        let star_anchor = random_subspace(n, k - 1, &mut rng);
        let (_, rep) = clique_report(CliqueKind::Star, &star_anchor, 200, 1, &tol).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.size, n - k + 1);
        let top_anchor = random_subspace(n, k + 1, &mut rng);
        let (_, rep) = clique_report(CliqueKind::Top, &top_anchor, 200, 2, &tol).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.size, k + 1);
    }
}

#[test]
fn extension_check_refills_a_depleted_clique() {
    let tol = Tolerance::default();
    let mut rng = seeded(16);
    for kind in [CliqueKind::Star, CliqueKind::Top] {
        let anchor = match kind {
            CliqueKind::Star => random_subspace(6, 1, &mut rng),
            CliqueKind::Top => random_subspace(6, 3, &mut rng),
        };
        let mut clique = max_compatible_clique(kind, &anchor, &tol).unwrap();
        clique.remove(1);
        let pool = clique_candidates(kind, &anchor, 200, 3, &tol).unwrap();
        let added = greedy_extend(&clique, &pool, &tol).unwrap();
        assert_eq!(added.len(), 1, "{kind:?}");
    }
}

#[test]
fn bridges_for_random_adjacent_pairs() {
    let tol = Tolerance::default();
    let mut rng = seeded(14);
    for _ in 0..30 {
        let (x, y) = pair_with_intersection(6, 2, 1, &mut rng).unwrap();
        let (xp, yp) = bridge(&x, &y, &tol).unwrap();
        for a in [&x, &y] {
            assert!(is_ortho_adjacent(a, &xp, &tol).unwrap());
            assert!(is_ortho_adjacent(a, &yp, &tol).unwrap());
        }
        assert!(is_ortho_adjacent(&xp, &yp, &tol).unwrap());
    }
}

#[test]
fn orthogonal_pairs_have_right_angles() {
    let tol = Tolerance::default();
    let mut rng = seeded(15);
    for k in 1..4 {
        let (x, y) = orthogonal_pair(2 * k + 1, k, &mut rng).unwrap();
        let a = principal_angles(&x, &y).unwrap();
        assert!(a.all_right(&tol));
        assert!(a.angles().iter().all(|t| (t - FRAC_PI_2).abs() < 1e-12));
        assert_eq!(grassmann_distance(&x, &y, &tol).unwrap(), k);
    }
}
