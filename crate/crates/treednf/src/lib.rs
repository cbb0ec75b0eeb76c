//! Canonical boolean representations for binary decision trees.
//!
//! A decision tree fixes not just a classifier but an evaluation order, and
//! many structurally different trees compute the same function. This crate
//! converts trees to a canonical minimal DNF (and optionally the Blake
//! canonical form holding every minimal sufficient condition), then uses the
//! representation to:
//!
//! * detect predictive equivalence exactly ([`canonical`]),
//! * predict whenever the masked sample already decides the label
//!   ([`predict`]),
//! * measure coverage and accuracy under synthetic missingness
//!   ([`missing`]),
//! * deduplicate tree sets and debias importance distributions
//!   ([`rashomon`]),
//! * learn minimum-cost feature-acquisition policies ([`cost`]).
//!
//! The `parallel` feature (default) runs the embarrassingly parallel loops
//! on rayon; disabling it yields a sequential build with identical results.
//!
//! ```
//! use treednf::{parse_tree, predict_dnf, to_dnf, MaskedSample, DEFAULT_VARIABLE_CAP};
//!
//! let tree = parse_tree(
//!     r#"{"dimension": 2, "root": {"feature": 0, "false": {"leaf": 0},
//!         "true": {"feature": 1, "false": {"leaf": 0}, "true": {"leaf": 1}}}}"#,
//! )?;
//! let form = to_dnf(&tree, DEFAULT_VARIABLE_CAP)?;
//! assert_eq!(form.canonical_key(), "f0 & f1");
//!
//! // f0 is unknown, but f1 = 0 already settles the AND.
//! let sample = MaskedSample::new(vec![None, Some(false)]);
//! assert_eq!(predict_dnf(&form, &sample)?, Some(false));
//! # Ok::<(), treednf::Error>(())
//! ```

pub mod boolean;
pub mod canonical;
pub mod cost;
mod error;
mod exec;
pub mod missing;
pub mod predict;
pub mod rashomon;
pub mod synth;
pub mod tree;

pub use boolean::{
    blake_canonical_form, prime_implicants, quine_mccluskey, substitute_simplify, truth_table, Dnf,
    Literal, Simplified, Term, TermEval, TruthTable, DEFAULT_VARIABLE_CAP,
};
pub use canonical::{to_dnf, CanonicalForm};
pub use error::{Error, Result};
pub use predict::{
    predict_dnf, predict_feature_complete, predict_missing_fast, predict_path, MaskedSample,
};
pub use tree::{parse_tree, Dataset, DecisionTree, GroupMap, Node};
