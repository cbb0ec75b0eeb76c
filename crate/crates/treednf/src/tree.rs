//! Decision-tree data model: JSON (de)serialization, traversal prediction,
//! leaf-to-term extraction, and Gini importance. Trees split on binarized
//! features and carry 0/1 leaf labels.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::boolean::{Literal, Term};
use crate::error::{Error, Result};

/// A node of a binary decision tree. `low` is taken when the split feature
/// is 0, `high` when it is 1.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Node {
    Leaf { label: bool },
    Split { feature: usize, low: Box<Node>, high: Box<Node> },
}

impl Node {
    pub fn leaf(label: bool) -> Node {
        Node::Leaf { label }
    }

    pub fn split(feature: usize, low: Node, high: Node) -> Node {
        Node::Split { feature, low: Box::new(low), high: Box::new(high) }
    }
}

/// A finite binary decision tree over `dimension` binary features.
///
/// Every internal node has exactly two children, and no root-to-leaf path
/// splits twice on the same feature (the deeper split would be degenerate).
#[derive(Clone, PartialEq, Debug)]
pub struct DecisionTree {
    dimension: usize,
    feature_names: Vec<String>,
    root: Node,
}

impl DecisionTree {
    pub fn new(dimension: usize, feature_names: Option<Vec<String>>, root: Node) -> Result<Self> {
        let feature_names = match feature_names {
            Some(names) => {
                if names.len() != dimension {
                    return Err(Error::Schema(format!(
                        "{} feature names for dimension {}",
                        names.len(),
                        dimension
                    )));
                }
                names
            }
            None => (0..dimension).map(|i| format!("f{i}")).collect(),
        };
        let mut path = Vec::new();
        validate_node(&root, dimension, &mut path)?;
        Ok(DecisionTree { dimension, feature_names, root })
    }

    /// A tree that ignores its input and always predicts `label`.
    pub fn constant(dimension: usize, label: bool) -> Self {
        DecisionTree::new(dimension, None, Node::leaf(label)).expect("leaf is always valid")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// Set of feature indices split on anywhere in the tree.
    pub fn features_used(&self) -> BTreeSet<usize> {
        let mut set = BTreeSet::new();
        collect_features(&self.root, &mut set);
        set
    }

    pub fn leaf_count(&self) -> usize {
        fn count(node: &Node) -> usize {
            match node {
                Node::Leaf { .. } => 1,
                Node::Split { low, high, .. } => count(low) + count(high),
            }
        }
        count(&self.root)
    }

    /// Classic root-to-leaf evaluation of a complete sample.
    pub fn predict_traverse(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: x.len() });
        }
        let mut node = &self.root;
        loop {
            match node {
                Node::Leaf { label } => return Ok(*label),
                Node::Split { feature, low, high } => {
                    node = if x[*feature] { high } else { low };
                }
            }
        }
    }

    /// One term per leaf, encoding the root-to-leaf path, partitioned by leaf
    /// label. Every complete sample satisfies exactly one term overall.
    pub fn leaves_as_terms(&self) -> (Vec<Term>, Vec<Term>) {
        let mut pos = Vec::new();
        let mut neg = Vec::new();
        let mut path: Vec<Literal> = Vec::new();
        collect_leaf_terms(&self.root, &mut path, &mut pos, &mut neg);
        (pos, neg)
    }

    /// True when some split has two leaf children carrying the same label
    /// (the split changes nothing about the predictions).
    pub fn has_trivial_extension(&self) -> bool {
        fn walk(node: &Node) -> bool {
            match node {
                Node::Leaf { .. } => false,
                Node::Split { low, high, .. } => {
                    if let (Node::Leaf { label: a }, Node::Leaf { label: b }) =
                        (low.as_ref(), high.as_ref())
                    {
                        if a == b {
                            return true;
                        }
                    }
                    walk(low) || walk(high)
                }
            }
        }
        walk(&self.root)
    }

    /// Impurity-decrease importance per feature: each split contributes its
    /// node weight times the Gini decrease it achieves on `data`. A node
    /// reached by zero samples contributes 0. Features never split on get 0.
    pub fn gini_importance(&self, data: &Dataset) -> Result<Vec<f64>> {
        if data.num_rows() == 0 {
            return Err(Error::EmptyDataset);
        }
        if data.dimension() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: data.dimension(),
            });
        }
        let mut importance = vec![0.0; self.dimension];
        let all: Vec<usize> = (0..data.num_rows()).collect();
        gini_walk(&self.root, &all, data, data.num_rows() as f64, &mut importance);
        Ok(importance)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&TreeDocument::from(self)).expect("tree serializes")
    }
}

fn validate_node(node: &Node, dimension: usize, path: &mut Vec<usize>) -> Result<()> {
    match node {
        Node::Leaf { .. } => Ok(()),
        Node::Split { feature, low, high } => {
            if *feature >= dimension {
                return Err(Error::UnknownFeatureIndex { feature: *feature, dimension });
            }
            if path.contains(feature) {
                return Err(Error::RepeatedSplitOnPath { feature: *feature });
            }
            path.push(*feature);
            validate_node(low, dimension, path)?;
            validate_node(high, dimension, path)?;
            path.pop();
            Ok(())
        }
    }
}

fn collect_features(node: &Node, set: &mut BTreeSet<usize>) {
    if let Node::Split { feature, low, high } = node {
        set.insert(*feature);
        collect_features(low, set);
        collect_features(high, set);
    }
}

fn collect_leaf_terms(
    node: &Node,
    path: &mut Vec<Literal>,
    pos: &mut Vec<Term>,
    neg: &mut Vec<Term>,
) {
    match node {
        Node::Leaf { label } => {
            let term = Term::new(path.iter().copied()).expect("paths never repeat a feature");
            if *label {
                pos.push(term);
            } else {
                neg.push(term);
            }
        }
        Node::Split { feature, low, high } => {
            path.push(Literal::neg(*feature));
            collect_leaf_terms(low, path, pos, neg);
            path.pop();
            path.push(Literal::pos(*feature));
            collect_leaf_terms(high, path, pos, neg);
            path.pop();
        }
    }
}

fn gini(rows: &[usize], data: &Dataset) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    let positives = rows.iter().filter(|&&i| data.labels()[i]).count() as f64;
    let p = positives / rows.len() as f64;
    2.0 * p * (1.0 - p)
}

fn gini_walk(node: &Node, rows: &[usize], data: &Dataset, n_total: f64, importance: &mut [f64]) {
    let Node::Split { feature, low, high } = node else { return };
    let (low_rows, high_rows): (Vec<usize>, Vec<usize>) =
        rows.iter().partition(|&&i| !data.rows()[i][*feature]);
    if !rows.is_empty() {
        let n = rows.len() as f64;
        let weighted_children = (low_rows.len() as f64 / n) * gini(&low_rows, data)
            + (high_rows.len() as f64 / n) * gini(&high_rows, data);
        let decrease = (n / n_total) * (gini(rows, data) - weighted_children);
        importance[*feature] += decrease;
    }
    gini_walk(low, &low_rows, data, n_total, importance);
    gini_walk(high, &high_rows, data, n_total, importance);
}

// ---------------------------------------------------------------------------
// JSON document format

#[derive(Serialize, Deserialize)]
struct TreeDocument {
    dimension: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    feature_names: Option<Vec<String>>,
    root: NodeDoc,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum NodeDoc {
    Split {
        feature: usize,
        #[serde(rename = "false")]
        low: Box<NodeDoc>,
        #[serde(rename = "true")]
        high: Box<NodeDoc>,
    },
    Leaf {
        leaf: u8,
    },
}

impl From<&DecisionTree> for TreeDocument {
    fn from(tree: &DecisionTree) -> Self {
        fn node_doc(node: &Node) -> NodeDoc {
            match node {
                Node::Leaf { label } => NodeDoc::Leaf { leaf: u8::from(*label) },
                Node::Split { feature, low, high } => NodeDoc::Split {
                    feature: *feature,
                    low: Box::new(node_doc(low)),
                    high: Box::new(node_doc(high)),
                },
            }
        }
        TreeDocument {
            dimension: tree.dimension,
            feature_names: Some(tree.feature_names.clone()),
            root: node_doc(&tree.root),
        }
    }
}

fn node_from_doc(doc: &NodeDoc) -> Result<Node> {
    match doc {
        NodeDoc::Leaf { leaf } => match leaf {
            0 => Ok(Node::leaf(false)),
            1 => Ok(Node::leaf(true)),
            other => Err(Error::Schema(format!("leaf label must be 0 or 1, got {other}"))),
        },
        NodeDoc::Split { feature, low, high } => Ok(Node::Split {
            feature: *feature,
            low: Box::new(node_from_doc(low)?),
            high: Box::new(node_from_doc(high)?),
        }),
    }
}

/// Parses a tree file: `{"dimension": d, "feature_names": [...], "root": node}`
/// where a node is either `{"leaf": 0|1}` or
/// `{"feature": j, "false": node, "true": node}`.
pub fn parse_tree(document: &str) -> Result<DecisionTree> {
    let doc: TreeDocument =
        serde_json::from_str(document).map_err(|e| Error::Schema(e.to_string()))?;
    let root = node_from_doc(&doc.root)?;
    DecisionTree::new(doc.dimension, doc.feature_names, root)
}

// ---------------------------------------------------------------------------
// Datasets

/// A binarized group map: which original feature each binary column belongs
/// to, plus the original feature names.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GroupMap {
    /// `bin_to_group[j]` = original-feature id of binary column `j`.
    pub bin_to_group: Vec<usize>,
    /// Name of each original feature, indexed by group id.
    pub group_names: Vec<String>,
}

impl GroupMap {
    /// Every binary column is its own original feature.
    pub fn identity(feature_names: &[String]) -> Self {
        GroupMap {
            bin_to_group: (0..feature_names.len()).collect(),
            group_names: feature_names.to_vec(),
        }
    }

    pub fn num_groups(&self) -> usize {
        self.group_names.len()
    }

    /// Parses the JSON map of binary-column index to original-feature name.
    pub fn parse(json: &str, dimension: usize) -> Result<Self> {
        let raw: std::collections::BTreeMap<String, String> =
            serde_json::from_str(json).map_err(|e| Error::Schema(e.to_string()))?;
        let mut bin_to_group = vec![usize::MAX; dimension];
        let mut group_names: Vec<String> = Vec::new();
        for (key, name) in raw {
            let bin: usize = key
                .parse()
                .map_err(|_| Error::Schema(format!("group map key {key:?} is not an index")))?;
            if bin >= dimension {
                return Err(Error::UnknownFeatureIndex { feature: bin, dimension });
            }
            let group = match group_names.iter().position(|n| n == &name) {
                Some(g) => g,
                None => {
                    group_names.push(name);
                    group_names.len() - 1
                }
            };
            bin_to_group[bin] = group;
        }
        if bin_to_group.contains(&usize::MAX) {
            return Err(Error::Schema("group map does not cover every binary feature".into()));
        }
        Ok(GroupMap { bin_to_group, group_names })
    }

    pub fn to_json(&self) -> String {
        let map: std::collections::BTreeMap<String, &String> = self
            .bin_to_group
            .iter()
            .enumerate()
            .map(|(bin, &g)| (bin.to_string(), &self.group_names[g]))
            .collect();
        serde_json::to_string_pretty(&map).expect("map serializes")
    }
}

/// A fully observed binary dataset with 0/1 labels.
#[derive(Clone, PartialEq, Debug)]
pub struct Dataset {
    feature_names: Vec<String>,
    rows: Vec<Vec<bool>>,
    labels: Vec<bool>,
    groups: Option<GroupMap>,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<Vec<bool>>,
        labels: Vec<bool>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Schema("rows have inconsistent dimensions".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::Schema(format!("{} rows but {} labels", rows.len(), labels.len())));
        }
        Ok(Dataset { feature_names, rows, labels, groups: None })
    }

    pub fn with_groups(mut self, groups: GroupMap) -> Result<Self> {
        if groups.bin_to_group.len() != self.dimension() {
            return Err(Error::Schema("group map does not cover every binary feature".into()));
        }
        self.groups = Some(groups);
        Ok(self)
    }

    pub fn dimension(&self) -> usize {
        self.feature_names.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }

    pub fn groups(&self) -> Option<&GroupMap> {
        self.groups.as_ref()
    }

    /// Reads a CSV with a header row; the column named `label` holds the 0/1
    /// labels and all other columns are binary features in order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let (feature_names, rows, labels) = read_binary_csv(text, false)?;
        let rows = rows
            .into_iter()
            .map(|r| r.into_iter().map(|c| c.expect("NA rejected")).collect())
            .collect();
        let labels =
            labels.ok_or_else(|| Error::Schema("dataset is missing a \"label\" column".into()))?;
        Dataset::new(feature_names, rows, labels)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.feature_names.join(","));
        out.push_str(",label\n");
        for (row, label) in self.rows.iter().zip(&self.labels) {
            for v in row {
                out.push(if *v { '1' } else { '0' });
                out.push(',');
            }
            out.push(if *label { '1' } else { '0' });
            out.push('\n');
        }
        out
    }
}

/// Header names, ternary feature rows, and optional labels from a CSV.
pub(crate) type ParsedCsv = (Vec<String>, Vec<Vec<Option<bool>>>, Option<Vec<bool>>);

/// Shared CSV reader for complete and masked datasets. Cells are `0`, `1`,
/// or (when `allow_na`) `NA`.
pub(crate) fn read_binary_csv(text: &str, allow_na: bool) -> Result<ParsedCsv> {
    let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
    let headers = reader.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
    let label_col = headers.iter().position(|h| h == "label");
    let feature_names: Vec<String> = headers
        .iter()
        .enumerate()
        .filter(|(i, _)| Some(*i) != label_col)
        .map(|(_, h)| h.to_string())
        .collect();

    let mut rows = Vec::new();
    let mut labels = label_col.map(|_| Vec::new());
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Schema(e.to_string()))?;
        if record.len() != headers.len() {
            return Err(Error::Schema(format!("row {line} has {} cells", record.len())));
        }
        let mut row = Vec::with_capacity(feature_names.len());
        for (i, cell) in record.iter().enumerate() {
            let value = match cell.trim() {
                "0" => Some(false),
                "1" => Some(true),
                "NA" if allow_na && Some(i) != label_col => None,
                other => {
                    return Err(Error::Schema(format!(
                        "row {line}: cell {other:?} is not 0/1{}",
                        if allow_na { "/NA" } else { "" }
                    )))
                }
            };
            if Some(i) == label_col {
                labels.as_mut().expect("label column present").push(value.expect("label not NA"));
            } else {
                row.push(value);
            }
        }
        rows.push(row);
    }
    Ok((feature_names, rows, labels))
}
