use std::collections::BTreeSet;

use avalanche_core::avalanche::avalanche_polynomial;
use avalanche_core::families::{all_trees, tree_poly, RootedTree};
use avalanche_core::reconstruct::{reconstruct_tree, reconstruct_tree_traced, validate_tree_poly};
use avalanche_core::{UniPoly, DEFAULT_STATE_LIMIT};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tree(parents: &[Option<usize>]) -> RootedTree {
    RootedTree::from_parents(parents.to_vec()).unwrap()
}

fn random_tree(rng: &mut ChaCha8Rng, k: usize) -> RootedTree {
    let mut labels: Vec<usize> = (1..k).collect();
    for i in (1..labels.len()).rev() {
        labels.swap(i, rng.random_range(0..=i));
    }
    // Vertex i of a random recursive tree is renamed to name(i).
    let name = |i: usize| if i == 0 { 0 } else { labels[i - 1] };
    let mut parents = vec![None; k];
    for i in 1..k {
        parents[name(i)] = Some(name(rng.random_range(0..i)));
    }
    RootedTree::from_parents(parents).unwrap()
}

/// Two 12-vertex trees whose vertices carry avalanche sizes
/// 4, 7, 7, 8 (six times), 9, 10 in different shapes.
fn same_univariate_pair() -> (RootedTree, RootedTree) {
    let s = None;
    let t1 = tree(&[s, Some(0), Some(1), Some(2), Some(2), Some(0), Some(5), Some(5), Some(5), Some(5), Some(5), Some(10)]);
    let t2 = tree(&[s, Some(0), Some(1), Some(2), Some(3), Some(0), Some(5), Some(5), Some(5), Some(5), Some(5), Some(5)]);
    (t1, t2)
}

#[test]
fn equal_univariate_but_different_multivariate() {
    let (t1, t2) = same_univariate_pair();
    let (a1, a2) = (tree_poly(&t1), tree_poly(&t2));
    let expected = UniPoly::from_coeffs([0, 0, 0, 0, 1, 0, 0, 2, 6, 1, 1]);
    assert_eq!(a1.univariate(), expected);
    assert_eq!(a2.univariate(), expected);
    assert_eq!(expected.to_string(), "x^10 + x^9 + 6*x^8 + 2*x^7 + x^4");
    assert_ne!(a1, a2);
    for (t, a) in [(&t1, &a1), (&t2, &a2)] {
        assert_eq!(&avalanche_polynomial(&t.to_graph().unwrap(), DEFAULT_STATE_LIMIT).unwrap(), a);
        assert_eq!(&reconstruct_tree(a).unwrap(), t);
    }
}

#[test]
fn tree_formula_matches_brute_force_exhaustively() {
    for k in 1..=8 {
        for t in all_trees(k) {
            let g = t.to_graph().unwrap();
            let brute = avalanche_polynomial(&g, DEFAULT_STATE_LIMIT).unwrap();
            assert_eq!(tree_poly(&t), brute, "{:?}", t.parents());
        }
    }
}

#[test]
fn tree_formula_matches_brute_force_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..100 {
        let k = rng.random_range(2..=10);
        let t = random_tree(&mut rng, k);
        let g = t.to_graph().unwrap();
        assert_eq!(tree_poly(&t), avalanche_polynomial(&g, DEFAULT_STATE_LIMIT).unwrap());
    }
}

#[test]
fn any_root_is_supported() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..40 {
        let k = rng.random_range(2..=9);
        let t = random_tree(&mut rng, k);
        let r = t.rerooted(rng.random_range(0..k)).unwrap();
        let g = r.to_graph().unwrap();
        assert_eq!(tree_poly(&r), avalanche_polynomial(&g, DEFAULT_STATE_LIMIT).unwrap());
    }
}

#[test]
fn reconstruction_round_trips_exhaustively() {
    for k in 1..=8 {
        for t in all_trees(k) {
            assert_eq!(reconstruct_tree(&tree_poly(&t)).unwrap(), t);
        }
    }
}

#[test]
fn reconstruction_round_trips_on_random_trees() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let k = rng.random_range(1..=12);
        let t = random_tree(&mut rng, k);
        let p = tree_poly(&t);
        let (back, trace) = reconstruct_tree_traced(&p).unwrap();
        assert_eq!(back, t);
        assert!(validate_tree_poly(&p));
        assert_eq!(trace.steps.len(), k - 1);
        // Siblings peel disjoint variable sets.
        for a in &trace.steps {
            for b in &trace.steps {
                if a.child != b.child && a.parent == b.parent {
                    assert!(a.peeled.iter().all(|x| !b.peeled.contains(x)));
                }
            }
        }
    }
}

#[test]
fn tree_polynomial_is_injective() {
    for k in 1..=7 {
        let mut seen = BTreeSet::new();
        let mut count = 0;
        for t in all_trees(k) {
            seen.insert(tree_poly(&t));
            count += 1;
        }
        assert_eq!(seen.len(), count, "trees on {k} vertices");
    }
}
