//! Prediction under missing feature values.
//!
//! Four evaluators over the same masked sample, from strongest to weakest:
//!
//! * [`predict_dnf`] — the canonical-form evaluator: returns a label exactly
//!   when every completion of the sample agrees on it;
//! * [`predict_missing_fast`] — equivalent output via a linear-time tree
//!   walk that explores both branches of unknown splits;
//! * [`predict_path`] — classical traversal, abstains at the first unknown
//!   split feature;
//! * [`predict_feature_complete`] — abstains whenever any feature the tree
//!   uses is missing.
//!
//! Missingness is expected input: `None` is a first-class result, never an
//! error.

use crate::boolean::{substitute_simplify, Simplified, TermEval};
use crate::canonical::CanonicalForm;
use crate::error::{Error, Result};
use crate::tree::{DecisionTree, Node};

/// A sample with per-feature ternary values: `Some(false)`, `Some(true)`, or
/// `None` for NA. A *completion* assigns 0/1 to every NA position and agrees
/// everywhere else.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct MaskedSample {
    values: Vec<Option<bool>>,
}

impl MaskedSample {
    pub fn new(values: Vec<Option<bool>>) -> Self {
        MaskedSample { values }
    }

    pub fn complete(x: &[bool]) -> Self {
        MaskedSample { values: x.iter().map(|&v| Some(v)).collect() }
    }

    /// Masks the positions of `x` where `hidden` is true.
    pub fn masked(x: &[bool], hidden: &[bool]) -> Self {
        MaskedSample {
            values: x.iter().zip(hidden).map(|(&v, &h)| if h { None } else { Some(v) }).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[Option<bool>] {
        &self.values
    }

    pub fn get(&self, feature: usize) -> Option<bool> {
        self.values[feature]
    }

    pub fn num_missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_none()).count()
    }
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

/// Canonical-form prediction: probe the positive terms, then the negative
/// terms, then substitute the known values into the positive side and
/// re-minimize. Returns `None` exactly when completions disagree.
pub fn predict_dnf(cf: &CanonicalForm, m: &MaskedSample) -> Result<Option<bool>> {
    check_dim(cf.dimension(), m.len())?;
    for t in cf.simple_pos().terms() {
        if t.eval_masked(m.values()) == TermEval::Satisfied {
            return Ok(Some(true));
        }
    }
    for t in cf.simple_neg().terms() {
        if t.eval_masked(m.values()) == TermEval::Satisfied {
            return Ok(Some(false));
        }
    }
    // The residual has at most as many variables as the positive side, so
    // the cap that admitted the form admits the substitution too.
    let cap = cf.simple_pos().variables().len().max(1);
    match substitute_simplify(cf.simple_pos(), m.values(), cap)? {
        Simplified::Constant(label) => Ok(Some(label)),
        Simplified::Residual(_) => Ok(None),
    }
}

/// Linear-time equivalent of [`predict_dnf`]: walk the tree, pushing both
/// children whenever the split feature is unknown, and abstain on the first
/// pair of reachable leaves that disagree.
pub fn predict_missing_fast(tree: &DecisionTree, m: &MaskedSample) -> Result<Option<bool>> {
    check_dim(tree.dimension(), m.len())?;
    let mut stack: Vec<&Node> = vec![tree.root()];
    let mut prediction: Option<bool> = None;
    while let Some(node) = stack.pop() {
        match node {
            Node::Leaf { label } => {
                if let Some(seen) = prediction {
                    if seen != *label {
                        return Ok(None);
                    }
                }
                prediction = Some(*label);
            }
            Node::Split { feature, low, high } => match m.get(*feature) {
                Some(true) => stack.push(high),
                Some(false) => stack.push(low),
                None => {
                    stack.push(high);
                    stack.push(low);
                }
            },
        }
    }
    Ok(prediction)
}

/// Classical traversal baseline: abstains at the first split whose feature
/// is unknown.
pub fn predict_path(tree: &DecisionTree, m: &MaskedSample) -> Result<Option<bool>> {
    check_dim(tree.dimension(), m.len())?;
    let mut node = tree.root();
    loop {
        match node {
            Node::Leaf { label } => return Ok(Some(*label)),
            Node::Split { feature, low, high } => match m.get(*feature) {
                Some(true) => node = high,
                Some(false) => node = low,
                None => return Ok(None),
            },
        }
    }
}

/// Function-agnostic baseline: abstains if any feature used anywhere in the
/// tree is missing, otherwise traverses.
pub fn predict_feature_complete(tree: &DecisionTree, m: &MaskedSample) -> Result<Option<bool>> {
    check_dim(tree.dimension(), m.len())?;
    if tree.features_used().iter().any(|&f| m.get(f).is_none()) {
        return Ok(None);
    }
    predict_path(tree, m)
}
