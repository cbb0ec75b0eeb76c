//! Working with sets of near-optimal trees: trivial-extension removal,
//! predictive-equivalence deduplication, and importance distributions that
//! no longer over-count functions expressible by many distinct trees.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::to_dnf;
use crate::error::{Error, Result};
use crate::exec;
use crate::tree::{Dataset, DecisionTree};

/// A list of trees with parallel training objectives (lower is better).
#[derive(Clone, Debug)]
pub struct TreeSet {
    pub trees: Vec<DecisionTree>,
    pub objectives: Vec<f64>,
    pub metadata: String,
}

impl TreeSet {
    pub fn new(trees: Vec<DecisionTree>, objectives: Vec<f64>, metadata: String) -> Result<Self> {
        if trees.len() != objectives.len() {
            return Err(Error::Schema(format!(
                "{} trees but {} objectives",
                trees.len(),
                objectives.len()
            )));
        }
        if objectives.iter().any(|o| !o.is_finite()) {
            return Err(Error::Schema("objectives must be finite".into()));
        }
        Ok(TreeSet { trees, objectives, metadata })
    }

    pub fn len(&self) -> usize {
        self.trees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trees.is_empty()
    }
}

/// Drops every tree containing a split whose two children are leaves with
/// the same label.
pub fn remove_trivial(ts: &TreeSet) -> TreeSet {
    let kept: Vec<usize> =
        (0..ts.len()).filter(|&i| !ts.trees[i].has_trivial_extension()).collect();
    TreeSet {
        trees: kept.iter().map(|&i| ts.trees[i].clone()).collect(),
        objectives: kept.iter().map(|&i| ts.objectives[i]).collect(),
        metadata: ts.metadata.clone(),
    }
}

/// One predictive-equivalence class: the member indices into the input set
/// and the representative (lowest objective, ties to the lowest index).
#[derive(Clone, PartialEq, Debug)]
pub struct EquivClass {
    pub key: String,
    pub members: Vec<usize>,
    pub representative: usize,
}

/// Result of deduplication. Trees whose canonical form exceeded the variable
/// cap are reported in `skipped` and excluded from the classes; the run
/// continues without them.
#[derive(Clone, Debug, Default)]
pub struct DedupReport {
    pub classes: Vec<EquivClass>,
    pub skipped: Vec<(usize, String)>,
}

impl DedupReport {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }
}

/// Partitions a tree set into predictive-equivalence classes keyed by the
/// canonical form. Classes appear in order of their first member.
pub fn dedup(ts: &TreeSet, max_vars: usize) -> DedupReport {
    let keys: Vec<Result<String>> =
        exec::map_collect(&ts.trees, |t| to_dnf(t, max_vars).map(|cf| cf.canonical_key()));
    let mut report = DedupReport::default();
    let mut by_key: HashMap<String, usize> = HashMap::new();
    for (i, key) in keys.into_iter().enumerate() {
        match key {
            Err(e) => report.skipped.push((i, e.to_string())),
            Ok(key) => match by_key.get(&key) {
                Some(&class) => {
                    let c = &mut report.classes[class];
                    c.members.push(i);
                    let better = ts.objectives[i] < ts.objectives[c.representative];
                    if better {
                        c.representative = i;
                    }
                }
                None => {
                    by_key.insert(key.clone(), report.classes.len());
                    report.classes.push(EquivClass { key, members: vec![i], representative: i });
                }
            },
        }
    }
    report
}

/// Empirical per-feature distributions of importance across a tree set:
/// sorted (value, weight) pairs with weights summing to one per feature.
#[derive(Clone, PartialEq, Debug)]
pub struct ImportanceDistribution {
    pub feature_names: Vec<String>,
    pub per_feature: Vec<Vec<(f64, f64)>>,
}

impl ImportanceDistribution {
    pub fn feature(&self, j: usize) -> &[(f64, f64)] {
        &self.per_feature[j]
    }
}

fn sorted_weighted(mut values: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    values.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite importance values"));
    // Merge equal support points so duplicated trees collapse exactly.
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(values.len());
    for (v, w) in values {
        match merged.last_mut() {
            Some(last) if last.0 == v => last.1 += w,
            _ => merged.push((v, w)),
        }
    }
    merged
}

/// Gini-importance distribution over the set. Without deduplication every
/// tree votes once, reproducing the over-representation bias; with it, one
/// representative per equivalence class votes once.
pub fn importance_distribution(
    ts: &TreeSet,
    data: &Dataset,
    dedup_classes: bool,
    normalize: bool,
    max_vars: usize,
) -> Result<ImportanceDistribution> {
    if ts.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let selected: Vec<usize> = if dedup_classes {
        let report = dedup(ts, max_vars);
        if let Some((i, e)) = report.skipped.first() {
            return Err(Error::Schema(format!("tree {i}: {e}")));
        }
        report.classes.iter().map(|c| c.representative).collect()
    } else {
        (0..ts.len()).collect()
    };
    let weight = 1.0 / selected.len() as f64;
    let importances: Vec<Result<Vec<f64>>> =
        exec::map_collect(&selected, |&i| importance_vector(&ts.trees[i], data, normalize));
    let importances: Vec<Vec<f64>> = importances.into_iter().collect::<Result<_>>()?;
    let d = data.dimension();
    let per_feature = (0..d)
        .map(|j| sorted_weighted(importances.iter().map(|imp| (imp[j], weight)).collect()))
        .collect();
    Ok(ImportanceDistribution { feature_names: data.feature_names().to_vec(), per_feature })
}

fn importance_vector(tree: &DecisionTree, data: &Dataset, normalize: bool) -> Result<Vec<f64>> {
    let mut imp = tree.gini_importance(data)?;
    if normalize {
        let total: f64 = imp.iter().sum();
        if total > 0.0 {
            for v in &mut imp {
                *v /= total;
            }
        }
    }
    Ok(imp)
}

/// 1-Wasserstein distance between two one-dimensional weighted empirical
/// distributions: the integral of the absolute CDF difference.
pub fn wasserstein_1(a: &[(f64, f64)], b: &[(f64, f64)]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::EmptyDistribution);
    }
    let mut points: Vec<f64> = a.iter().chain(b).map(|&(v, _)| v).collect();
    points.sort_by(|x, y| x.partial_cmp(y).expect("finite support"));
    points.dedup();
    let total_a: f64 = a.iter().map(|&(_, w)| w).sum();
    let total_b: f64 = b.iter().map(|&(_, w)| w).sum();
    let mut cdf_a = 0.0;
    let mut cdf_b = 0.0;
    let mut distance = 0.0;
    for window in points.windows(2) {
        let (x, next) = (window[0], window[1]);
        cdf_a += a.iter().filter(|&&(v, _)| v == x).map(|&(_, w)| w).sum::<f64>() / total_a;
        cdf_b += b.iter().filter(|&&(v, _)| v == x).map(|&(_, w)| w).sum::<f64>() / total_b;
        distance += (cdf_a - cdf_b).abs() * (next - x);
    }
    Ok(distance)
}

/// Permutation-importance baseline: the drop in label agreement when one
/// feature column is permuted, averaged over `repeats` seeded permutations.
pub fn permutation_importance(
    tree: &DecisionTree,
    data: &Dataset,
    seed: u64,
    repeats: usize,
) -> Result<Vec<f64>> {
    if data.num_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be positive".into()));
    }
    let n = data.num_rows();
    let accuracy = |rows: &dyn Fn(usize) -> Vec<bool>| -> Result<f64> {
        let mut correct = 0usize;
        for i in 0..n {
            if tree.predict_traverse(&rows(i))? == data.labels()[i] {
                correct += 1;
            }
        }
        Ok(correct as f64 / n as f64)
    };
    let baseline = accuracy(&|i| data.rows()[i].clone())?;
    let mut importance = vec![0.0; data.dimension()];
    for j in 0..data.dimension() {
        let mut total_drop = 0.0;
        for r in 0..repeats {
            let mut rng = ChaCha8Rng::seed_from_u64(
                seed ^ (j as u64) << 32 ^ (r as u64).wrapping_mul(0x9E37),
            );
            let mut perm: Vec<usize> = (0..n).collect();
            for i in (1..n).rev() {
                let k = rng.random_range(0..=i);
                perm.swap(i, k);
            }
            let acc = accuracy(&|i| {
                let mut row = data.rows()[i].clone();
                row[j] = data.rows()[perm[i]][j];
                row
            })?;
            total_drop += baseline - acc;
        }
        importance[j] = total_drop / repeats as f64;
    }
    Ok(importance)
}
