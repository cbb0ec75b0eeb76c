//! Minimum-cost feature acquisition for evaluating a fixed tree.
//!
//! An episode starts with every feature unknown and purchases one binary
//! feature at a time. Purchasing any bin of an original feature reveals it
//! at that feature's cost; further bins of the same feature are free. The
//! episode ends as soon as the known values satisfy any clause of the tree's
//! Blake canonical form — at that point the prediction is decided no matter
//! what the remaining features hold.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boolean::TermEval;
use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::exec;
use crate::tree::{Dataset, DecisionTree, GroupMap, Node};

/// Per-original-feature acquisition costs plus the binary-to-original map.
#[derive(Clone, PartialEq, Debug)]
pub struct CostModel {
    groups: GroupMap,
    /// Cost per group id; `None` when no cost was supplied for that feature.
    group_cost: Vec<Option<f64>>,
}

impl CostModel {
    pub fn new(groups: GroupMap, named_costs: &HashMap<String, f64>) -> Result<Self> {
        let group_cost: Vec<Option<f64>> =
            groups.group_names.iter().map(|name| named_costs.get(name).copied()).collect();
        for (name, cost) in groups.group_names.iter().zip(&group_cost) {
            if let Some(c) = cost {
                if !(c.is_finite() && *c > 0.0) {
                    return Err(Error::InvalidConfig(format!(
                        "cost for {name:?} must be strictly positive, got {c}"
                    )));
                }
            }
        }
        Ok(CostModel { groups, group_cost })
    }

    /// Identity grouping: binary feature `j` is its own original feature.
    pub fn identity(feature_names: &[String], named_costs: &HashMap<String, f64>) -> Result<Self> {
        CostModel::new(GroupMap::identity(feature_names), named_costs)
    }

    pub fn groups(&self) -> &GroupMap {
        &self.groups
    }

    pub fn group_of(&self, bin: usize) -> usize {
        self.groups.bin_to_group[bin]
    }

    pub fn cost_of_group(&self, group: usize) -> Option<f64> {
        self.group_cost[group]
    }
}

/// Integer costs drawn uniformly from 1..=10 per original feature.
pub fn random_costs(group_names: &[String], seed: u64) -> HashMap<String, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    group_names.iter().map(|name| (name.clone(), rng.random_range(1..=10) as f64)).collect()
}

/// What the terminal bonus sums over.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BonusScope {
    /// Original features the tree actually uses (keeps rewards on the same
    /// scale as the restricted action set).
    #[default]
    TreeFeatures,
    /// Every original feature with a declared cost.
    AllFeatures,
}

/// Ternary acquisition state: the value of each binary feature, or unknown.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct AcquisitionState {
    values: Vec<Option<bool>>,
}

impl AcquisitionState {
    pub fn all_unknown(dimension: usize) -> Self {
        AcquisitionState { values: vec![None; dimension] }
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn get(&self, feature: usize) -> Option<bool> {
        self.values[feature]
    }

    fn with(&self, feature: usize, value: bool) -> Self {
        let mut next = self.clone();
        next.values[feature] = Some(value);
        next
    }

    /// Stable string key over the tree's features: one of `0`, `1`, `?` per
    /// feature in ascending index order.
    pub fn key(&self, tree_features: &[usize]) -> String {
        tree_features
            .iter()
            .map(|&f| match self.values[f] {
                Some(false) => '0',
                Some(true) => '1',
                None => '?',
            })
            .collect()
    }

    /// Original features already paid for: groups with any known bin.
    fn purchased_groups(&self, cm: &CostModel) -> BTreeSet<usize> {
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_some())
            .map(|(j, _)| cm.group_of(j))
            .collect()
    }
}

/// If the known values satisfy any clause of the attached Blake canonical
/// form, the prediction is already decided; returns it.
pub fn is_terminal(state: &AcquisitionState, cf: &CanonicalForm) -> Result<Option<bool>> {
    let pos = cf.bcf_pos().ok_or(Error::BcfMissing)?;
    let neg = cf.bcf_neg().ok_or(Error::BcfMissing)?;
    for t in pos.terms() {
        if t.eval_masked(state.values()) == TermEval::Satisfied {
            return Ok(Some(true));
        }
    }
    for t in neg.terms() {
        if t.eval_masked(state.values()) == TermEval::Satisfied {
            return Ok(Some(false));
        }
    }
    Ok(None)
}

/// A fully validated acquisition problem: the tree, its canonical form with
/// BCF attached, the cost model, and the precomputed terminal bonus.
pub struct CostTask<'a> {
    tree: &'a DecisionTree,
    cf: &'a CanonicalForm,
    cm: &'a CostModel,
    tree_features: Vec<usize>,
    bonus: f64,
}

impl<'a> CostTask<'a> {
    pub fn new(
        tree: &'a DecisionTree,
        cf: &'a CanonicalForm,
        cm: &'a CostModel,
        scope: BonusScope,
    ) -> Result<Self> {
        if cf.bcf_pos().is_none() || cf.bcf_neg().is_none() {
            return Err(Error::BcfMissing);
        }
        if cf.dimension() != tree.dimension() {
            return Err(Error::DimensionMismatch {
                expected: tree.dimension(),
                got: cf.dimension(),
            });
        }
        if cm.groups.bin_to_group.len() != tree.dimension() {
            return Err(Error::Schema("cost model does not cover every binary feature".into()));
        }
        let tree_features: Vec<usize> = tree.features_used().into_iter().collect();
        let tree_groups: BTreeSet<usize> = tree_features.iter().map(|&f| cm.group_of(f)).collect();
        for &g in &tree_groups {
            if cm.cost_of_group(g).is_none() {
                return Err(Error::InvalidConfig(format!(
                    "no cost declared for feature {:?} used by the tree",
                    cm.groups.group_names[g]
                )));
            }
        }
        let bonus = match scope {
            BonusScope::TreeFeatures => {
                tree_groups.iter().map(|&g| cm.cost_of_group(g).expect("validated")).sum()
            }
            BonusScope::AllFeatures => cm.group_cost.iter().flatten().sum(),
        };
        Ok(CostTask { tree, cf, cm, tree_features, bonus })
    }

    pub fn tree_features(&self) -> &[usize] {
        &self.tree_features
    }

    pub fn terminal_bonus(&self) -> f64 {
        self.bonus
    }

    pub fn canonical_form(&self) -> &CanonicalForm {
        self.cf
    }

    fn legal_actions(&self, state: &AcquisitionState) -> Vec<usize> {
        self.tree_features.iter().copied().filter(|&f| state.get(f).is_none()).collect()
    }

    /// Cost of revealing bin `action` in `state`: the group cost on first
    /// purchase, free afterwards.
    fn action_cost(&self, state: &AcquisitionState, action: usize) -> f64 {
        let group = self.cm.group_of(action);
        if state.purchased_groups(self.cm).contains(&group) {
            0.0
        } else {
            self.cm.cost_of_group(group).expect("validated at construction")
        }
    }

    /// Reveals `sample`'s value of `action`: pays the group cost on first
    /// purchase, and on reaching a terminal state adds the terminal bonus
    /// and ends the episode.
    pub fn step(
        &self,
        state: &AcquisitionState,
        action: usize,
        sample: &[bool],
    ) -> Result<(AcquisitionState, f64, bool)> {
        if !self.tree_features.contains(&action) {
            return Err(Error::IllegalAction { feature: action, reason: "not used by the tree" });
        }
        if state.get(action).is_some() {
            return Err(Error::IllegalAction { feature: action, reason: "already known" });
        }
        let mut reward = -self.action_cost(state, action);
        let next = state.with(action, sample[action]);
        let done = is_terminal(&next, self.cf)?.is_some();
        if done {
            reward += self.bonus;
        }
        Ok((next, reward, done))
    }
}

/// Q-learning hyperparameters.
#[derive(Clone, Copy, PartialEq, Debug, Serialize, Deserialize)]
pub struct Hyperparams {
    pub gamma: f64,
    pub alpha: f64,
    pub epsilon: f64,
    pub episodes: usize,
}

impl Default for Hyperparams {
    fn default() -> Self {
        Hyperparams { gamma: 0.9, alpha: 0.1, epsilon: 0.5, episodes: 10_000 }
    }
}

impl Hyperparams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(Error::InvalidConfig(format!("gamma {} outside [0, 1]", self.gamma)));
        }
        if !(self.alpha > 0.0 && self.alpha <= 1.0) {
            return Err(Error::InvalidConfig(format!("alpha {} outside (0, 1]", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.epsilon) {
            return Err(Error::InvalidConfig(format!("epsilon {} outside [0, 1]", self.epsilon)));
        }
        Ok(())
    }
}

/// A learned tabular policy: state key (over the tree's features) to one
/// action value per binary feature. Only visited states are stored.
#[derive(Clone, PartialEq, Debug, Serialize, Deserialize)]
pub struct QPolicy {
    pub dimension: usize,
    pub tree_features: Vec<usize>,
    pub hyper: Hyperparams,
    pub seed: u64,
    pub table: BTreeMap<String, Vec<f64>>,
}

impl QPolicy {
    /// Greedy action in `state` among legal actions: highest value, ties to
    /// the lowest feature index. Unvisited states read as all zeros.
    pub fn greedy_action(&self, key: &str, legal: &[usize]) -> Option<usize> {
        let row = self.table.get(key);
        let value = |f: usize| row.map_or(0.0, |r| r[f]);
        let mut best: Option<usize> = None;
        for &f in legal {
            if best.is_none_or(|b| value(f) > value(b)) {
                best = Some(f);
            }
        }
        best
    }
}

/// Seeds the Q table by traversing the tree top-down over the training data:
/// each split's value is the branch-probability-weighted child reward minus
/// the split cost, and each leaf is worth the terminal bonus. Nodes reached
/// by zero training rows use even branch probabilities.
pub fn init_q(task: &CostTask, data: &Dataset) -> Result<BTreeMap<String, Vec<f64>>> {
    if data.num_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if data.dimension() != task.tree.dimension() {
        return Err(Error::DimensionMismatch {
            expected: task.tree.dimension(),
            got: data.dimension(),
        });
    }
    let mut table = BTreeMap::new();
    let rows: Vec<usize> = (0..data.num_rows()).collect();
    let state = AcquisitionState::all_unknown(task.tree.dimension());
    traverse_init(task, data, task.tree.root(), &rows, &state, &mut table);
    Ok(table)
}

fn traverse_init(
    task: &CostTask,
    data: &Dataset,
    node: &Node,
    rows: &[usize],
    state: &AcquisitionState,
    table: &mut BTreeMap<String, Vec<f64>>,
) -> f64 {
    let Node::Split { feature, low, high } = node else {
        return task.bonus;
    };
    let j = *feature;
    let (low_rows, high_rows): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&i| !data.rows()[i][j]);
    let (p_low, p_high) = if rows.is_empty() {
        (0.5, 0.5)
    } else {
        (low_rows.len() as f64 / rows.len() as f64, high_rows.len() as f64 / rows.len() as f64)
    };
    let r_low = traverse_init(task, data, low, &low_rows, &state.with(j, false), table);
    let r_high = traverse_init(task, data, high, &high_rows, &state.with(j, true), table);
    let cost = task.cm.cost_of_group(task.cm.group_of(j)).expect("validated");
    let reward = p_low * r_low + p_high * r_high - cost;
    let entry = table
        .entry(state.key(&task.tree_features))
        .or_insert_with(|| vec![0.0; task.tree.dimension()]);
    entry[j] = reward;
    reward
}

/// Standard one-step tabular Q-learning over `hyper.episodes` episodes. Each
/// episode draws a uniform training row (seeded, with replacement), explores
/// epsilon-greedily among legal actions, and applies
/// `Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a))`.
/// The table starts from [`init_q`]; unseen states are lazily zero-filled.
pub fn train_q(task: &CostTask, data: &Dataset, hyper: Hyperparams, seed: u64) -> Result<QPolicy> {
    hyper.validate()?;
    let mut table = init_q(task, data)?;
    let d = task.tree.dimension();
    let n = data.num_rows();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..hyper.episodes {
        let row = &data.rows()[rng.random_range(0..n)];
        let mut state = AcquisitionState::all_unknown(d);
        if is_terminal(&state, task.cf)?.is_some() {
            continue; // constant tree: nothing to learn
        }
        loop {
            let legal = task.legal_actions(&state);
            if legal.is_empty() {
                break;
            }
            let key = state.key(&task.tree_features);
            let action = if rng.random::<f64>() < hyper.epsilon {
                legal[rng.random_range(0..legal.len())]
            } else {
                greedy_from_table(&table, &key, &legal)
            };
            let (next, reward, done) = task.step(&state, action, row)?;
            let next_legal = if done { Vec::new() } else { task.legal_actions(&next) };
            let future = if next_legal.is_empty() {
                0.0
            } else {
                let next_key = next.key(&task.tree_features);
                next_legal
                    .iter()
                    .map(|&f| table.get(&next_key).map_or(0.0, |r| r[f]))
                    .fold(f64::NEG_INFINITY, f64::max)
            };
            let entry = table.entry(key).or_insert_with(|| vec![0.0; d]);
            entry[action] += hyper.alpha * (reward + hyper.gamma * future - entry[action]);
            state = next;
            if done {
                break;
            }
        }
    }
    Ok(QPolicy { dimension: d, tree_features: task.tree_features.clone(), hyper, seed, table })
}

fn greedy_from_table(table: &BTreeMap<String, Vec<f64>>, key: &str, legal: &[usize]) -> usize {
    let row = table.get(key);
    let value = |f: usize| row.map_or(0.0, |r| r[f]);
    let mut best = legal[0];
    for &f in &legal[1..] {
        if value(f) > value(best) {
            best = f;
        }
    }
    best
}

/// The purchasing strategies compared in evaluation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum PolicyKind {
    /// Purchase every feature the tree uses, unconditionally.
    Naive,
    /// Purchase features in root-to-leaf traversal order.
    Path,
    /// Purchase the cheapest unknown tree feature until a BCF clause holds.
    Greedy,
    /// Follow the trained Q policy until a BCF clause holds.
    Optimized,
}

impl PolicyKind {
    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Naive => "naive",
            PolicyKind::Path => "path",
            PolicyKind::Greedy => "greedy",
            PolicyKind::Optimized => "optimized",
        }
    }
}

/// Mean and standard deviation of per-row acquisition cost.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct CostSummary {
    pub mean: f64,
    pub std: f64,
    pub n_rows: usize,
}

/// Simulates `kind` on every row of `data` and reports the acquisition cost.
/// Each original feature is paid for at most once per row.
pub fn evaluate_policy(
    kind: PolicyKind,
    task: &CostTask,
    policy: Option<&QPolicy>,
    data: &Dataset,
) -> Result<CostSummary> {
    if data.num_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if kind == PolicyKind::Optimized && policy.is_none() {
        return Err(Error::InvalidConfig("the optimized policy needs a trained Q table".into()));
    }
    let costs: Vec<Result<f64>> =
        exec::map_collect(data.rows(), |row| row_cost(kind, task, policy, row));
    let costs: Vec<f64> = costs.into_iter().collect::<Result<_>>()?;
    let n = costs.len() as f64;
    let mean = costs.iter().sum::<f64>() / n;
    let std = if costs.len() < 2 {
        0.0
    } else {
        (costs.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
    };
    Ok(CostSummary { mean, std, n_rows: costs.len() })
}

fn row_cost(
    kind: PolicyKind,
    task: &CostTask,
    policy: Option<&QPolicy>,
    row: &[bool],
) -> Result<f64> {
    match kind {
        PolicyKind::Naive => {
            let groups: BTreeSet<usize> =
                task.tree_features.iter().map(|&f| task.cm.group_of(f)).collect();
            Ok(groups.iter().map(|&g| task.cm.cost_of_group(g).expect("validated")).sum())
        }
        PolicyKind::Path => {
            let mut state = AcquisitionState::all_unknown(task.tree.dimension());
            let mut total = 0.0;
            let mut node = task.tree.root();
            loop {
                match node {
                    Node::Leaf { .. } => return Ok(total),
                    Node::Split { feature, low, high } => {
                        if state.get(*feature).is_none() {
                            total += task.action_cost(&state, *feature);
                            state = state.with(*feature, row[*feature]);
                        }
                        node = if row[*feature] { high } else { low };
                    }
                }
            }
        }
        PolicyKind::Greedy => simulate(task, row, |task, state, legal| {
            legal
                .iter()
                .copied()
                .min_by(|&a, &b| {
                    task.action_cost(state, a)
                        .partial_cmp(&task.action_cost(state, b))
                        .expect("finite costs")
                        .then(a.cmp(&b))
                })
                .expect("legal actions nonempty")
        }),
        PolicyKind::Optimized => {
            let policy = policy.expect("checked by evaluate_policy");
            simulate(task, row, |task, state, legal| {
                policy
                    .greedy_action(&state.key(&task.tree_features), legal)
                    .expect("legal actions nonempty")
            })
        }
    }
}

/// Shared purchase loop: pick actions until a BCF clause is satisfied.
/// Exhausting every tree feature without terminating is impossible for a
/// sound canonical form and is reported as a hard error.
fn simulate(
    task: &CostTask,
    row: &[bool],
    choose: impl Fn(&CostTask, &AcquisitionState, &[usize]) -> usize,
) -> Result<f64> {
    let mut state = AcquisitionState::all_unknown(task.tree.dimension());
    let mut total = 0.0;
    loop {
        if is_terminal(&state, task.cf)?.is_some() {
            return Ok(total);
        }
        let legal = task.legal_actions(&state);
        if legal.is_empty() {
            return Err(Error::NonTerminatingPolicy);
        }
        let action = choose(task, &state, &legal);
        total += task.action_cost(&state, action);
        state = state.with(action, row[action]);
    }
}
