//! Property tests over randomly sampled conditioned trees and walks.

use planetree::metric::Excursion;
use planetree::sampler::{sample_conditioned, OffspringLaw, Seeded};
use planetree::tree::TreeFile;
use planetree::walk::{
    contour_walk, height_walk, lukasiewicz_walk, tree_from_contour, tree_from_height,
    tree_from_lukasiewicz, Interpolation, TimeScaledFn,
};
use proptest::prelude::*;

fn random_tree(n: usize, seed: u64) -> planetree::tree::PlaneTree {
    let law = OffspringLaw::geometric();
    sample_conditioned(&law, n.max(1), &mut Seeded::new(seed, 0).rng()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn serialization_round_trips(n in 1usize..200, seed in 0u64..1_000_000) {
        let t = random_tree(n, seed);
        let file = TreeFile::new(&t, serde_json::json!({"seed": seed}));
        let text = serde_json::to_string(&file).unwrap();
        let back: TreeFile = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back.into_tree().unwrap(), t);
    }

    #[test]
    fn mirror_is_involution(n in 1usize..200, seed in 0u64..1_000_000) {
        let t = random_tree(n, seed);
        let (m, _) = t.mirror();
        let (back, _) = m.mirror();
        prop_assert_eq!(back, t);
    }

    #[test]
    fn each_walk_reconstructs_the_tree(n in 1usize..300, seed in 0u64..1_000_000) {
        let t = random_tree(n, seed);
        prop_assert_eq!(tree_from_height(&height_walk(&t).values).unwrap(), t.clone());
        prop_assert_eq!(tree_from_contour(&contour_walk(&t).values).unwrap(), t.clone());
        prop_assert_eq!(tree_from_lukasiewicz(&lukasiewicz_walk(&t).values).unwrap(), t);
    }

    #[test]
    fn mirrored_enumeration_is_a_bijection_preserving_heights(
        n in 1usize..200,
        seed in 0u64..1_000_000,
    ) {
        let t = random_tree(n, seed);
        let w = t.mirrored_enumeration();
        prop_assert!(w.is_bijection(t.n()));
        let mut a: Vec<u32> = (0..t.n()).map(|v| t.depth(v)).collect();
        let mut b: Vec<u32> = w.order.iter().map(|&v| t.depth(v)).collect();
        a.sort_unstable();
        b.sort_unstable();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn pseudo_distance_is_a_grid_pseudometric(n in 2usize..40, seed in 0u64..1_000_000) {
        // symmetry and the triangle inequality, brute-forced over all grid triples
        let t = random_tree(n, seed);
        let x = Excursion::from_walk(TimeScaledFn::new(contour_walk(&t), Interpolation::Linear));
        let p = 2 * (t.n() - 1);
        let times: Vec<f64> = (0..=p).map(|k| k as f64 / p as f64).collect();
        let d = |i: usize, j: usize| x.pseudo_distance(times[i], times[j]);
        for i in 0..=p {
            prop_assert_eq!(d(i, i), 0.0);
            for j in i..=p {
                prop_assert_eq!(d(i, j), d(j, i));
                for k in 0..=p {
                    prop_assert!(d(i, j) <= d(i, k) + d(k, j) + 1e-12);
                }
            }
        }
    }

    #[test]
    fn rotation_walk_identity_on_random_trees(n in 1usize..400, seed in 0u64..1_000_000) {
        let t = random_tree(n, seed);
        let rot = planetree::transform::rotate(&t);
        let mut expected = contour_walk(&t).values;
        expected.push(-1);
        prop_assert_eq!(lukasiewicz_walk(&rot.tree).values, expected);
    }
}
