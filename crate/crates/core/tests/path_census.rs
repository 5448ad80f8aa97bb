//! Literal census of the two-color tree against the analytic counts: walk
//! the materialized tree, count nodes per depth, and classify every descent
//! path by its household signature. Both the totals and the per-class
//! counts must agree with the recurrence and the closed form.

use std::collections::BTreeMap;

use epitrace_core::analytic::paths::{
    class_indices, rb_path_class_count, rb_path_count, rb_path_count_recurrence,
};
use epitrace_core::network::rbtree::{RbParams, RbTree};
use epitrace_core::network::ContactNetwork;
use num_bigint::BigInt;

/// Nodes at each depth up to `max_depth`, breadth first.
fn depth_layers(tree: &RbTree, max_depth: usize) -> Vec<Vec<usize>> {
    let mut layers = vec![vec![0]];
    for _ in 0..max_depth {
        let next: Vec<usize> = layers
            .last()
            .unwrap()
            .iter()
            .flat_map(|&v| tree.children(v))
            .collect();
        layers.push(next);
    }
    layers
}

fn sorted_household(tree: &RbTree, v: usize) -> Vec<usize> {
    let mut hh = tree.household(v);
    hh.sort_unstable();
    hh
}

/// Household signature of the root path ending at `leaf`: how many
/// households hold exactly one path node (`k`), and whether the households
/// of the two endpoints hold two.
fn classify(tree: &RbTree, leaf: usize) -> (usize, usize, usize) {
    let mut path = vec![leaf];
    let mut cur = leaf;
    while let Some(p) = tree.parent(cur) {
        path.push(p);
        cur = p;
    }
    path.reverse();
    let mut visits: BTreeMap<Vec<usize>, usize> = BTreeMap::new();
    for &v in &path {
        *visits.entry(sorted_household(tree, v)).or_insert(0) += 1;
    }
    for (hh, &count) in &visits {
        assert!(count <= 2, "household {hh:?} holds {count} path nodes");
    }
    let k = visits.values().filter(|&&c| c == 1).count();
    let alpha = usize::from(visits[&sorted_household(tree, path[0])] == 2);
    let beta = usize::from(visits[&sorted_household(tree, *path.last().unwrap())] == 2);
    (k, alpha, beta)
}

fn census(d_c: usize, d_h: usize, max_depth: usize) {
    let tree = RbTree::new(RbParams { d_c, d_h }).unwrap();
    let layers = depth_layers(&tree, max_depth);
    for (n, layer) in layers.iter().enumerate() {
        let enumerated = layer.len() as u128;
        assert_eq!(
            enumerated,
            rb_path_count_recurrence(d_c, d_h, n).unwrap(),
            "recurrence vs census at ({d_c}, {d_h}), depth {n}"
        );
        assert_eq!(
            BigInt::from(enumerated),
            rb_path_count(d_c, d_h, n).unwrap(),
            "closed form vs census at ({d_c}, {d_h}), depth {n}"
        );

        let mut observed: BTreeMap<(usize, usize, usize), u128> = BTreeMap::new();
        for &leaf in layer {
            *observed.entry(classify(&tree, leaf)).or_insert(0) += 1;
        }
        let mut expected_total = 0u128;
        for (k, a, b) in class_indices(n) {
            let expected = rb_path_class_count(d_c, d_h, n, k, a, b).unwrap();
            expected_total += expected;
            assert_eq!(
                observed.get(&(k, a, b)).copied().unwrap_or(0),
                expected,
                "class ({k}, {a}, {b}) at ({d_c}, {d_h}), depth {n}"
            );
        }
        assert_eq!(expected_total, enumerated, "classes must partition depth {n}");
        assert!(
            observed.keys().all(|key| class_indices(n).contains(key)),
            "census found a class outside the index set at depth {n}: {observed:?}"
        );
    }
}

#[test]
fn census_matches_counts_for_default_degrees() {
    census(3, 2, 6);
}

#[test]
fn census_matches_counts_for_small_degrees() {
    census(2, 1, 8);
    census(1, 1, 8);
}

#[test]
fn census_matches_counts_for_wide_trees() {
    census(4, 3, 5);
    census(5, 1, 5);
    census(2, 3, 6);
}
