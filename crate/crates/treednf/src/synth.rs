//! Seeded synthetic instances: random trees, random DNFs, and random binary
//! datasets. Used by the test oracles and the benchmark suite; all output is
//! a pure function of the seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::boolean::{Dnf, Literal, Term};
use crate::tree::{Dataset, DecisionTree, Node};

/// A random binary decision tree of depth at most `max_depth` over
/// `dimension` features. No path repeats a feature.
pub fn random_tree(rng: &mut ChaCha8Rng, dimension: usize, max_depth: usize) -> DecisionTree {
    fn grow(rng: &mut ChaCha8Rng, available: &[usize], depth: usize) -> Node {
        if depth == 0 || available.is_empty() || rng.random_bool(0.25) {
            return Node::leaf(rng.random());
        }
        let pick = rng.random_range(0..available.len());
        let feature = available[pick];
        let rest: Vec<usize> = available.iter().copied().filter(|&f| f != feature).collect();
        Node::split(feature, grow(rng, &rest, depth - 1), grow(rng, &rest, depth - 1))
    }
    let available: Vec<usize> = (0..dimension).collect();
    let root = grow(rng, &available, max_depth);
    DecisionTree::new(dimension, None, root).expect("generated trees are structurally valid")
}

/// A random DNF over variables `0..num_vars` with up to `max_terms` terms of
/// up to `max_literals` literals each. May be constant.
pub fn random_dnf(
    rng: &mut ChaCha8Rng,
    num_vars: usize,
    max_terms: usize,
    max_literals: usize,
) -> Dnf {
    let n_terms = rng.random_range(0..=max_terms);
    let mut terms = Vec::with_capacity(n_terms);
    for _ in 0..n_terms {
        let n_lits = rng.random_range(1..=max_literals.min(num_vars));
        let mut vars: Vec<usize> = (0..num_vars).collect();
        for i in 0..n_lits {
            let j = rng.random_range(i..vars.len());
            vars.swap(i, j);
        }
        let term = Term::new(
            vars[..n_lits].iter().map(|&v| Literal { feature: v, positive: rng.random() }),
        )
        .expect("distinct variables cannot contradict");
        terms.push(term);
    }
    Dnf::from_terms(terms)
}

/// A random dataset of `n` rows with labels given by traversing `tree`.
pub fn random_dataset_for(rng: &mut ChaCha8Rng, tree: &DecisionTree, n: usize) -> Dataset {
    let d = tree.dimension();
    let mut rows = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<bool> = (0..d).map(|_| rng.random()).collect();
        labels.push(tree.predict_traverse(&row).expect("row matches dimension"));
        rows.push(row);
    }
    let names = (0..d).map(|j| format!("f{j}")).collect();
    Dataset::new(names, rows, labels).expect("generated dataset is consistent")
}

/// All complete assignments over `dimension` features, in row order.
pub fn all_assignments(dimension: usize) -> Vec<Vec<bool>> {
    (0..1usize << dimension)
        .map(|bits| (0..dimension).map(|j| (bits >> (dimension - 1 - j)) & 1 == 1).collect())
        .collect()
}
