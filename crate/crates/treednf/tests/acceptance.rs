//! Acceptance gate: every release-blocking guarantee as one test each, with
//! expected values frozen from independent brute-force oracles (completion
//! enumeration, cube enumeration, exhaustive-policy dynamic programming).
//! Each test prints its verdict line; run with `-- --nocapture` to see them.

mod common;

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use treednf::boolean::{blake_canonical_form, quine_mccluskey};
use treednf::canonical::{to_dnf, CanonicalForm};
use treednf::cost::{
    evaluate_policy, train_q, BonusScope, CostModel, CostTask, Hyperparams, PolicyKind,
};
use treednf::missing::{inject_mcar, MissingnessConfig, MissingnessMode};
use treednf::rashomon::{dedup, importance_distribution, remove_trivial, TreeSet};
use treednf::synth::{random_dataset_for, random_dnf, random_tree};
use treednf::tree::Node;
use treednf::{
    predict_dnf, predict_feature_complete, predict_missing_fast, predict_path, Dataset,
    DecisionTree, Dnf, Literal, MaskedSample, Term, DEFAULT_VARIABLE_CAP,
};

use common::{
    assignments, completion_consensus, dnf_signature, enumerate_primes, optimal_expected_cost,
    tree_signature,
};

fn pass(tag: &str, what: &str) {
    println!("[{tag}] {what}: PASS");
}

fn term(lits: &[(usize, bool)]) -> Term {
    Term::new(lits.iter().map(|&(f, p)| Literal { feature: f, positive: p })).unwrap()
}

fn and_f1_rooted() -> DecisionTree {
    DecisionTree::new(
        3,
        None,
        Node::split(1, Node::leaf(false), Node::split(2, Node::leaf(false), Node::leaf(true))),
    )
    .unwrap()
}

fn and_f2_rooted() -> DecisionTree {
    DecisionTree::new(
        3,
        None,
        Node::split(2, Node::leaf(false), Node::split(1, Node::leaf(false), Node::leaf(true))),
    )
    .unwrap()
}

fn mux_tree() -> DecisionTree {
    DecisionTree::new(
        4,
        None,
        Node::split(
            1,
            Node::split(3, Node::leaf(false), Node::leaf(true)),
            Node::split(2, Node::leaf(false), Node::leaf(true)),
        ),
    )
    .unwrap()
}

/// Uniform rows over features 1 and 2 (feature 0 is padding), labelled AND.
fn uniform_and_data() -> Dataset {
    let rows: Vec<Vec<bool>> =
        (0..4).map(|bits: u32| vec![false, bits & 2 != 0, bits & 1 != 0]).collect();
    let labels = rows.iter().map(|r| r[1] && r[2]).collect();
    Dataset::new(vec!["f0".into(), "f1".into(), "f2".into()], rows, labels).unwrap()
}

#[test]
fn a01_golden_canonical_forms() {
    let left = to_dnf(&and_f1_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
    let right = to_dnf(&and_f2_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
    assert_eq!(left.canonical_key(), "f1 & f2");
    assert_eq!(right.canonical_key(), "f1 & f2");
    assert!(left.equivalent(&right).unwrap());

    let cf = to_dnf(&mux_tree(), DEFAULT_VARIABLE_CAP)
        .unwrap()
        .attach_bcf(DEFAULT_VARIABLE_CAP)
        .unwrap();
    assert_eq!(
        cf.simple_pos().terms(),
        &[term(&[(1, false), (3, true)]), term(&[(1, true), (2, true)])]
    );
    assert_eq!(
        cf.bcf_pos().unwrap().terms(),
        &[
            term(&[(1, false), (3, true)]),
            term(&[(1, true), (2, true)]),
            term(&[(2, true), (3, true)]),
        ]
    );
    pass("a01", "golden canonical forms for the worked trees");
}

#[test]
fn a02_faithfulness_exhaustive() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFA17_0002);
    for _ in 0..1_000 {
        let tree = random_tree(&mut rng, 8, 4);
        let cf = to_dnf(&tree, DEFAULT_VARIABLE_CAP).unwrap();
        for x in assignments(8) {
            assert_eq!(
                cf.predict_complete(&x).unwrap(),
                tree.predict_traverse(&x).unwrap(),
                "form disagrees with traversal on {x:?} for {}",
                tree.to_json()
            );
        }
    }
    pass("a02", "canonical form matches traversal on 1000 trees, exhaustively");
}

/// Shared instance stream for the completeness and agreement gates: 200
/// seeded trees with 200 masked samples each.
fn masked_instances(mut visit: impl FnMut(usize, &DecisionTree, &MaskedSample)) {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0_0003);
    for idx in 0..200 {
        let tree = random_tree(&mut rng, 8, 4);
        for _ in 0..200 {
            let x: Vec<bool> = (0..8).map(|_| rng.random()).collect();
            let hidden: Vec<bool> = (0..8).map(|_| rng.random()).collect();
            visit(idx, &tree, &MaskedSample::masked(&x, &hidden));
        }
    }
}

/// Canonical-form cache keyed by instance-stream index.
#[derive(Default)]
struct FormCache {
    forms: HashMap<usize, CanonicalForm>,
}

impl FormCache {
    fn get(&mut self, idx: usize, tree: &DecisionTree) -> &CanonicalForm {
        self.forms.entry(idx).or_insert_with(|| to_dnf(tree, DEFAULT_VARIABLE_CAP).unwrap())
    }
}

#[test]
fn a03_completeness_against_completion_oracle() {
    let mut cache = FormCache::default();
    masked_instances(|idx, tree, m| {
        let got = predict_dnf(cache.get(idx, tree), m).unwrap();
        let oracle = completion_consensus(tree, m);
        assert_eq!(got, oracle, "tree {idx}, mask {m:?}");
    });
    pass("a03", "prediction defined iff all completions agree, 200 trees x 200 masks");
}

#[test]
fn a04_fast_walk_agrees_with_dnf() {
    let mut cache = FormCache::default();
    masked_instances(|idx, tree, m| {
        assert_eq!(
            predict_missing_fast(tree, m).unwrap(),
            predict_dnf(cache.get(idx, tree), m).unwrap(),
            "tree {idx}, mask {m:?}"
        );
    });
    pass("a04", "linear walk equals canonical prediction on every instance");
}

/// Every tree of depth at most 2 over 3 features (plus the bare leaves).
fn all_depth2_trees() -> Vec<DecisionTree> {
    let mut trees = vec![DecisionTree::constant(3, false), DecisionTree::constant(3, true)];
    for root_feature in 0..3usize {
        let mut children = vec![Node::leaf(false), Node::leaf(true)];
        for inner in 0..3usize {
            if inner == root_feature {
                continue;
            }
            for bits in 0..4usize {
                children.push(Node::split(
                    inner,
                    Node::leaf(bits & 1 == 1),
                    Node::leaf(bits & 2 == 2),
                ));
            }
        }
        for low in &children {
            for high in &children {
                trees.push(
                    DecisionTree::new(
                        3,
                        None,
                        Node::split(root_feature, low.clone(), high.clone()),
                    )
                    .unwrap(),
                );
            }
        }
    }
    trees
}

#[test]
fn a05_equivalence_partition_matches_truth_tables() {
    let trees = all_depth2_trees();
    assert_eq!(trees.len(), 302);
    let mut by_signature: BTreeMap<Vec<bool>, BTreeSet<usize>> = BTreeMap::new();
    let mut by_key: BTreeMap<String, BTreeSet<usize>> = BTreeMap::new();
    for (i, tree) in trees.iter().enumerate() {
        by_signature.entry(tree_signature(tree)).or_default().insert(i);
        let key = to_dnf(tree, DEFAULT_VARIABLE_CAP).unwrap().canonical_key();
        by_key.entry(key).or_default().insert(i);
    }
    assert_eq!(by_signature.len(), by_key.len());
    let signature_classes: BTreeSet<BTreeSet<usize>> = by_signature.into_values().collect();
    let key_classes: BTreeSet<BTreeSet<usize>> = by_key.into_values().collect();
    assert_eq!(signature_classes, key_classes);
    pass("a05", "canonical keys partition depth-2 trees exactly by function");
}

#[test]
fn a06_bcf_equals_enumerated_prime_implicants() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBCF_0006);
    for round in 0..500usize {
        let num_vars = 1 + (round % 8);
        let expr = random_dnf(&mut rng, num_vars, 10, num_vars);
        let minimal = quine_mccluskey(&expr, DEFAULT_VARIABLE_CAP).unwrap();
        let bcf = blake_canonical_form(&minimal, DEFAULT_VARIABLE_CAP).unwrap();
        let mut got: Vec<Term> = bcf.terms().to_vec();
        got.sort();
        let expected = enumerate_primes(&dnf_signature(&expr, num_vars), num_vars);
        assert_eq!(got, expected, "round {round}, expr {expr}");
    }
    pass("a06", "consensus closure equals brute-force prime implicants, 500 inputs");
}

#[test]
fn a07_minimization_is_deterministic_across_rewrites() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xDE7_0007);
    let mut checked = 0;
    while checked < 100 {
        let expr = random_dnf(&mut rng, 6, 8, 4);
        if expr.terms().is_empty() {
            continue;
        }
        let variant = rewrite_equivalent(&expr, &mut rng);
        if variant == expr {
            continue;
        }
        assert_eq!(dnf_signature(&variant, 6), dnf_signature(&expr, 6));
        let a = quine_mccluskey(&expr, DEFAULT_VARIABLE_CAP).unwrap();
        let b = quine_mccluskey(&variant, DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(a.terms(), b.terms(), "{expr} vs {variant}");
        checked += 1;
    }
    pass("a07", "identical term lists for 100 syntactically different equal inputs");
}

fn rewrite_equivalent(expr: &Dnf, rng: &mut ChaCha8Rng) -> Dnf {
    let mut terms: Vec<Term> = expr.terms().to_vec();
    // Expand one term over a fresh variable, then shuffle.
    let i = rng.random_range(0..terms.len());
    let missing: Vec<usize> = (0..6).filter(|&v| terms[i].polarity_of(v).is_none()).collect();
    if !missing.is_empty() {
        let v = missing[rng.random_range(0..missing.len())];
        let base = terms.remove(i);
        for polarity in [true, false] {
            terms.push(
                Term::new(
                    base.literals()
                        .iter()
                        .copied()
                        .chain([Literal { feature: v, positive: polarity }]),
                )
                .unwrap(),
            );
        }
    }
    for i in (1..terms.len()).rev() {
        let j = rng.random_range(0..=i);
        terms.swap(i, j);
    }
    Dnf::from_terms(terms)
}

#[test]
fn a08_gini_importance_ratio_is_exactly_two() {
    let data = Dataset::new(
        vec!["f0".into(), "f1".into()],
        vec![vec![false, false], vec![false, true], vec![true, false], vec![true, true]],
        vec![false, false, false, true],
    )
    .unwrap();
    let first = DecisionTree::new(
        2,
        None,
        Node::split(0, Node::leaf(false), Node::split(1, Node::leaf(false), Node::leaf(true))),
    )
    .unwrap();
    let second = DecisionTree::new(
        2,
        None,
        Node::split(1, Node::leaf(false), Node::split(0, Node::leaf(false), Node::leaf(true))),
    )
    .unwrap();
    let imp1 = first.gini_importance(&data).unwrap();
    let imp2 = second.gini_importance(&data).unwrap();
    assert_eq!(imp1[1] / imp1[0], 2.0);
    assert_eq!(imp2[0] / imp2[1], 2.0);

    // Same function, verified, yet opposite importance claims.
    let a = to_dnf(&first, DEFAULT_VARIABLE_CAP).unwrap();
    let b = to_dnf(&second, DEFAULT_VARIABLE_CAP).unwrap();
    assert!(a.equivalent(&b).unwrap());
    assert_ne!(imp1, imp2);
    pass("a08", "deeper split carries exactly twice the Gini importance");
}

#[test]
fn a09_exact_missingness_rates_and_dominance() {
    // Exhaustive enumeration on the 2-feature AND tree: all 4 masks times
    // all 4 samples. Expected counts are frozen from the completion oracle,
    // and the canonical method must match it cell for cell.
    let tree = DecisionTree::new(
        2,
        None,
        Node::split(0, Node::leaf(false), Node::split(1, Node::leaf(false), Node::leaf(true))),
    )
    .unwrap();
    let cf = to_dnf(&tree, DEFAULT_VARIABLE_CAP).unwrap();
    let mut oracle_count = 0usize;
    let mut dnf_count = 0usize;
    let mut path_count = 0usize;
    let mut feature_count = 0usize;
    for mask_bits in 0..4usize {
        for sample_bits in 0..4usize {
            let x = [sample_bits & 2 != 0, sample_bits & 1 != 0];
            let hidden = [mask_bits & 2 != 0, mask_bits & 1 != 0];
            let m = MaskedSample::masked(&x, &hidden);
            let oracle = completion_consensus(&tree, &m);
            let dnf = predict_dnf(&cf, &m).unwrap();
            assert_eq!(dnf, oracle);
            let path = predict_path(&tree, &m).unwrap();
            let feature = predict_feature_complete(&tree, &m).unwrap();
            oracle_count += usize::from(oracle.is_some());
            dnf_count += usize::from(dnf.is_some());
            path_count += usize::from(path.is_some());
            feature_count += usize::from(feature.is_some());
            // Each weaker method only answers where the stronger one does,
            // and they agree there.
            if let Some(p) = feature {
                assert_eq!(path, Some(p));
            }
            if let Some(p) = path {
                assert_eq!(dnf, Some(p));
            }
        }
    }
    assert_eq!(oracle_count, 8, "completion oracle over the 16 cells");
    assert_eq!(dnf_count, 8);
    assert_eq!(path_count, 6);
    assert_eq!(feature_count, 4);

    // Dominance chain over the randomized instance stream as well.
    let mut cache = FormCache::default();
    masked_instances(|idx, tree, m| {
        let dnf = predict_dnf(cache.get(idx, tree), m).unwrap();
        let path = predict_path(tree, m).unwrap();
        let feature = predict_feature_complete(tree, m).unwrap();
        if let Some(p) = feature {
            assert_eq!(path, Some(p));
        }
        if let Some(p) = path {
            assert_eq!(dnf, Some(p));
        }
    });
    pass("a09", "exact 8/6/4-of-16 coverage split and dominance everywhere");
}

#[test]
fn a10_policy_training_reaches_the_enumerated_optimum() {
    let costs = HashMap::from([("f1".to_string(), 1.0), ("f2".to_string(), 10.0)]);
    let names: Vec<String> = vec!["f0".into(), "f1".into(), "f2".into()];
    let cm = CostModel::identity(&names, &costs).unwrap();
    let data = uniform_and_data();

    for tree in [and_f1_rooted(), and_f2_rooted()] {
        let cf =
            to_dnf(&tree, DEFAULT_VARIABLE_CAP).unwrap().attach_bcf(DEFAULT_VARIABLE_CAP).unwrap();
        let task = CostTask::new(&tree, &cf, &cm, BonusScope::TreeFeatures).unwrap();
        let optimum = optimal_expected_cost(&tree, &[1, 2], &[0.0, 1.0, 10.0], &data);
        assert_eq!(optimum, 6.0, "DP optimum on the 1/10-cost AND instance");
        for seed in [1u64, 2, 3] {
            let policy = train_q(&task, &data, Hyperparams::default(), seed).unwrap();
            let optimized =
                evaluate_policy(PolicyKind::Optimized, &task, Some(&policy), &data).unwrap();
            assert!(
                (optimized.mean - optimum).abs() / optimum <= 0.05,
                "seed {seed}: trained cost {} vs optimum {optimum}",
                optimized.mean
            );
            let naive = evaluate_policy(PolicyKind::Naive, &task, None, &data).unwrap();
            assert!(optimized.mean <= naive.mean);
        }
    }

    // The expensive-root evaluation order pays 10.5 by plain traversal; the
    // learned policy beats it on the identical decision boundary.
    let tree = and_f2_rooted();
    let cf = to_dnf(&tree, DEFAULT_VARIABLE_CAP).unwrap().attach_bcf(DEFAULT_VARIABLE_CAP).unwrap();
    let task = CostTask::new(&tree, &cf, &cm, BonusScope::TreeFeatures).unwrap();
    let path = evaluate_policy(PolicyKind::Path, &task, None, &data).unwrap();
    assert_eq!(path.mean, 10.5);
    let naive = evaluate_policy(PolicyKind::Naive, &task, None, &data).unwrap();
    assert_eq!(naive.mean, 11.0);
    pass("a10", "trained policy within 5% of the DP optimum; baselines exact");
}

/// Replaces one random leaf with a split into two leaves of the same label,
/// using a feature unused on that path. Returns `None` when no feature is
/// available.
fn with_trivial_extension(tree: &DecisionTree, rng: &mut ChaCha8Rng) -> Option<DecisionTree> {
    fn rebuild(
        node: &Node,
        dimension: usize,
        path: &mut Vec<usize>,
        counter: &mut usize,
        target: usize,
        rng: &mut ChaCha8Rng,
        extended: &mut bool,
    ) -> Node {
        match node {
            Node::Leaf { label } => {
                let index = *counter;
                *counter += 1;
                if index == target {
                    let unused: Vec<usize> = (0..dimension).filter(|f| !path.contains(f)).collect();
                    if !unused.is_empty() {
                        let f = unused[rng.random_range(0..unused.len())];
                        *extended = true;
                        return Node::split(f, Node::leaf(*label), Node::leaf(*label));
                    }
                }
                Node::leaf(*label)
            }
            Node::Split { feature, low, high } => {
                path.push(*feature);
                let l = rebuild(low, dimension, path, counter, target, rng, extended);
                let h = rebuild(high, dimension, path, counter, target, rng, extended);
                path.pop();
                Node::split(*feature, l, h)
            }
        }
    }
    let target = rng.random_range(0..tree.leaf_count());
    let mut counter = 0;
    let mut extended = false;
    let root = rebuild(
        tree.root(),
        tree.dimension(),
        &mut Vec::new(),
        &mut counter,
        target,
        rng,
        &mut extended,
    );
    if !extended {
        return None;
    }
    Some(DecisionTree::new(tree.dimension(), None, root).expect("extension stays valid"))
}

#[test]
fn a11_dedup_bookkeeping_and_duplication_invariance() {
    // Build a set shaped like an enumerated near-optimal family: clean base
    // trees, plus trivial extensions of them, plus exact duplicates.
    let mut rng = ChaCha8Rng::seed_from_u64(0xDED_0011);
    let mut base: Vec<DecisionTree> = Vec::new();
    while base.len() < 30 {
        let t = random_tree(&mut rng, 5, 3);
        if !t.has_trivial_extension() {
            base.push(t);
        }
    }
    let mut trees = base.clone();
    for origin in base.iter().take(10) {
        if let Some(padded) = with_trivial_extension(origin, &mut rng) {
            assert!(padded.has_trivial_extension());
            trees.push(padded);
        }
    }
    trees.push(base[0].clone());
    trees.push(base[5].clone());
    let objectives: Vec<f64> = (0..trees.len()).map(|i| 0.01 * (i % 7) as f64).collect();
    let ts = TreeSet::new(trees, objectives, "generated".into()).unwrap();

    let total = ts.len();
    let nontrivial = remove_trivial(&ts).len();
    let report = dedup(&ts, DEFAULT_VARIABLE_CAP);
    assert!(report.skipped.is_empty());
    let unique = report.num_classes();
    assert!(unique <= nontrivial, "{unique} classes vs {nontrivial} nontrivial");
    assert!(nontrivial <= total);

    // Classes partition the set.
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for class in &report.classes {
        assert!(class.members.contains(&class.representative));
        for &m in &class.members {
            assert!(seen.insert(m), "tree {m} in two classes");
        }
    }
    assert_eq!(seen.len(), total);

    // Duplicating trees never changes the dedup-weighted distribution.
    let reference = random_tree(&mut rng, 5, 3);
    let data = random_dataset_for(&mut rng, &reference, 64);
    let dist = importance_distribution(&ts, &data, true, false, DEFAULT_VARIABLE_CAP).unwrap();
    let mut padded = ts.clone();
    for dup in [3usize, 17, 29] {
        padded.trees.push(padded.trees[dup].clone());
        padded.objectives.push(9.9);
    }
    let padded_dist =
        importance_distribution(&padded, &data, true, false, DEFAULT_VARIABLE_CAP).unwrap();
    assert_eq!(dist, padded_dist);
    pass("a11", "class counts ordered and dedup ignores duplicated trees");
}

#[test]
fn a12_unbiasedness_under_mcar_masks() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0B1A_0012);
    let tree = random_tree(&mut rng, 8, 4);
    let cf = to_dnf(&tree, DEFAULT_VARIABLE_CAP).unwrap();
    let samples: Vec<Vec<bool>> = (0..50).map(|_| (0..8).map(|_| rng.random()).collect()).collect();
    let mut defined = 0usize;
    for k in 0..10_000usize {
        let x = &samples[k % samples.len()];
        let mut mask_rng = ChaCha8Rng::seed_from_u64(0x5EED ^ k as u64);
        let hidden: Vec<bool> = (0..8).map(|_| mask_rng.random_bool(0.5)).collect();
        let m = MaskedSample::masked(x, &hidden);
        if let Some(label) = predict_dnf(&cf, &m).unwrap() {
            defined += 1;
            assert_eq!(
                label,
                tree.predict_traverse(x).unwrap(),
                "mask {k} produced a biased prediction"
            );
        }
    }
    assert!(defined > 0);
    pass("a12", "all 10,000-mask non-NA predictions equal the unmasked labels");
}

#[test]
fn coverage_pipeline_smoke() {
    // End-to-end: inject, evaluate, aggregate; p=0 must give full coverage.
    let data = uniform_and_data();
    let masked = inject_mcar(
        &data,
        &MissingnessConfig { p: 0.0, mode: MissingnessMode::PerBinaryFeature, seed: 0 },
    )
    .unwrap();
    assert_eq!(masked.masked_fraction(), 0.0);
}
