//! Canonical boolean forms for decision trees and predictive-equivalence
//! checking.
//!
//! A [`CanonicalForm`] holds the minimal DNF of a tree's positive and
//! negative predictions. Because the minimizer output depends only on the
//! truth table, two trees get the identical form exactly when they compute
//! the same function, regardless of split order or trivial extensions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::boolean::{blake_canonical_form, quine_mccluskey, Dnf, Term};
use crate::error::{Error, Result};
use crate::tree::DecisionTree;

/// Seed for the sampled complementarity check on wide forms.
const COMPLEMENT_CHECK_SEED: u64 = 0x7d9f_0001;

/// Canonical positive/negative DNF pair for one tree, with the optional full
/// prime-implicant (Blake canonical form) expansions.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CanonicalForm {
    dimension: usize,
    simple_pos: Dnf,
    simple_neg: Dnf,
    bcf_pos: Option<Dnf>,
    bcf_neg: Option<Dnf>,
}

/// Builds the canonical form of a tree: OR the positive leaves, OR the
/// negative leaves, and minimize each side.
pub fn to_dnf(tree: &DecisionTree, max_vars: usize) -> Result<CanonicalForm> {
    let (pos, neg) = tree.leaves_as_terms();
    let simple_pos = quine_mccluskey(&Dnf::from_terms(pos), max_vars)?;
    let simple_neg = quine_mccluskey(&Dnf::from_terms(neg), max_vars)?;
    let cf = CanonicalForm {
        dimension: tree.dimension(),
        simple_pos,
        simple_neg,
        bcf_pos: None,
        bcf_neg: None,
    };
    cf.assert_complementary();
    Ok(cf)
}

impl CanonicalForm {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn simple_pos(&self) -> &Dnf {
        &self.simple_pos
    }

    pub fn simple_neg(&self) -> &Dnf {
        &self.simple_neg
    }

    pub fn bcf_pos(&self) -> Option<&Dnf> {
        self.bcf_pos.as_ref()
    }

    pub fn bcf_neg(&self) -> Option<&Dnf> {
        self.bcf_neg.as_ref()
    }

    /// Attaches the Blake canonical form of both sides: every minimal
    /// sufficient condition for each prediction.
    pub fn attach_bcf(mut self, max_vars: usize) -> Result<Self> {
        self.bcf_pos = Some(blake_canonical_form(&self.simple_pos, max_vars)?);
        self.bcf_neg = Some(blake_canonical_form(&self.simple_neg, max_vars)?);
        Ok(self)
    }

    /// Predictive equivalence: the canonical positive term lists are equal.
    /// The negative side follows by complementarity.
    pub fn equivalent(&self, other: &CanonicalForm) -> Result<bool> {
        if self.dimension != other.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: other.dimension,
            });
        }
        let eq = self.simple_pos == other.simple_pos;
        debug_assert_eq!(eq, self.simple_neg == other.simple_neg);
        Ok(eq)
    }

    /// A hashable surrogate for equivalence: the rendered positive DNF.
    /// Equal keys hold exactly when the forms are equivalent.
    pub fn canonical_key(&self) -> String {
        self.simple_pos.to_string()
    }

    /// Evaluates the form on a complete sample.
    pub fn predict_complete(&self, x: &[bool]) -> Result<bool> {
        if x.len() != self.dimension {
            return Err(Error::DimensionMismatch { expected: self.dimension, got: x.len() });
        }
        Ok(self.simple_pos.eval_complete(x))
    }

    /// The first canonical term satisfied by `x` on the predicted side. Its
    /// literals alone force the prediction: every term is a prime implicant,
    /// so no literal is redundant.
    pub fn explanation(&self, x: &[bool]) -> Result<Term> {
        let side = if self.predict_complete(x)? { &self.simple_pos } else { &self.simple_neg };
        side.terms()
            .iter()
            .find(|t| t.eval_complete(x))
            .cloned()
            .ok_or_else(|| Error::Schema("no canonical term matches a complete sample".into()))
    }

    /// The positive and negative sides must partition every assignment.
    /// This is the linchpin of prediction under missingness, so it is
    /// verified at construction: exhaustively up to 10 variables, on 4096
    /// seeded samples above that.
    fn assert_complementary(&self) {
        let vars: Vec<usize> = {
            let mut v = self.simple_pos.variables();
            v.extend(self.simple_neg.variables());
            v.sort_unstable();
            v.dedup();
            v
        };
        let mut x = vec![false; self.dimension];
        let check = |x: &[bool]| {
            let pos = self.simple_pos.eval_complete(x);
            let neg = self.simple_neg.eval_complete(x);
            assert!(
                pos != neg,
                "canonical sides are not complementary at {x:?}: pos={pos}, neg={neg}"
            );
        };
        if vars.len() <= 10 {
            for bits in 0..1usize << vars.len() {
                for (i, &v) in vars.iter().enumerate() {
                    x[v] = (bits >> i) & 1 == 1;
                }
                check(&x);
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(COMPLEMENT_CHECK_SEED);
            for _ in 0..4096 {
                for &v in &vars {
                    x[v] = rng.random();
                }
                check(&x);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::{Literal, DEFAULT_VARIABLE_CAP};
    use crate::tree::Node;

    fn term(lits: &[(usize, bool)]) -> Term {
        Term::new(lits.iter().map(|&(f, p)| Literal { feature: f, positive: p })).unwrap()
    }

    pub(crate) fn and_f1_rooted() -> DecisionTree {
        DecisionTree::new(
            3,
            None,
            Node::split(1, Node::leaf(false), Node::split(2, Node::leaf(false), Node::leaf(true))),
        )
        .unwrap()
    }

    pub(crate) fn and_f2_rooted() -> DecisionTree {
        DecisionTree::new(
            3,
            None,
            Node::split(2, Node::leaf(false), Node::split(1, Node::leaf(false), Node::leaf(true))),
        )
        .unwrap()
    }

    pub(crate) fn mux_tree() -> DecisionTree {
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

    #[test]
    fn and_tree_canonical_forms() {
        let cf = to_dnf(&and_f1_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(cf.simple_pos().terms(), &[term(&[(1, true), (2, true)])]);
        assert_eq!(cf.simple_neg().terms(), &[term(&[(1, false)]), term(&[(2, false)])]);
        assert_eq!(cf.canonical_key(), "f1 & f2");
    }

    #[test]
    fn reordered_and_pair_is_equivalent() {
        let a = to_dnf(&and_f1_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
        let b = to_dnf(&and_f2_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
        assert!(a.equivalent(&b).unwrap());
        assert!(a.equivalent(&a).unwrap());
        assert_eq!(a.canonical_key(), b.canonical_key());
    }

    #[test]
    fn mux_dnf_and_bcf() {
        let cf = to_dnf(&mux_tree(), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(
            cf.simple_pos().terms(),
            &[term(&[(1, false), (3, true)]), term(&[(1, true), (2, true)])]
        );
        let cf = cf.attach_bcf(DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(
            cf.bcf_pos().unwrap().terms(),
            &[
                term(&[(1, false), (3, true)]),
                term(&[(1, true), (2, true)]),
                term(&[(2, true), (3, true)]),
            ]
        );
    }

    #[test]
    fn and_bcf_adds_nothing() {
        let cf = to_dnf(&and_f1_rooted(), DEFAULT_VARIABLE_CAP)
            .unwrap()
            .attach_bcf(DEFAULT_VARIABLE_CAP)
            .unwrap();
        assert_eq!(cf.bcf_pos().unwrap(), cf.simple_pos());
    }

    #[test]
    fn constant_trees() {
        let one = to_dnf(&DecisionTree::constant(2, true), DEFAULT_VARIABLE_CAP).unwrap();
        assert!(one.simple_pos().is_true());
        assert!(one.simple_neg().is_false());
        assert_eq!(one.canonical_key(), "TRUE");

        let zero = to_dnf(&DecisionTree::constant(2, false), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(zero.canonical_key(), "FALSE");
    }

    #[test]
    fn and_vs_mux_not_equivalent() {
        // Different dimensions is an error; compare within one universe by
        // rebuilding the AND tree with dimension 4.
        let and4 = DecisionTree::new(
            4,
            None,
            Node::split(1, Node::leaf(false), Node::split(2, Node::leaf(false), Node::leaf(true))),
        )
        .unwrap();
        let a = to_dnf(&and4, DEFAULT_VARIABLE_CAP).unwrap();
        let b = to_dnf(&mux_tree(), DEFAULT_VARIABLE_CAP).unwrap();
        assert!(!a.equivalent(&b).unwrap());

        let narrow = to_dnf(&and_f1_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
        assert!(matches!(narrow.equivalent(&b), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn trivial_extension_same_key() {
        // A redundant split below a leaf leaves the canonical form unchanged,
        // even though the trees use different variable sets.
        let plain = DecisionTree::new(3, None, Node::split(1, Node::leaf(false), Node::leaf(true)))
            .unwrap();
        let padded = DecisionTree::new(
            3,
            None,
            Node::split(1, Node::split(2, Node::leaf(false), Node::leaf(false)), Node::leaf(true)),
        )
        .unwrap();
        let a = to_dnf(&plain, DEFAULT_VARIABLE_CAP).unwrap();
        let b = to_dnf(&padded, DEFAULT_VARIABLE_CAP).unwrap();
        assert!(a.equivalent(&b).unwrap());
        assert_eq!(a.canonical_key(), "f1");
        assert_eq!(b.canonical_key(), "f1");
    }

    #[test]
    fn explanation_picks_matching_prime_implicant() {
        let cf = to_dnf(&mux_tree(), DEFAULT_VARIABLE_CAP).unwrap();
        let x = [false, false, true, true];
        assert_eq!(cf.explanation(&x).unwrap(), term(&[(1, false), (3, true)]));

        let cf1 = to_dnf(&and_f1_rooted(), DEFAULT_VARIABLE_CAP).unwrap();
        assert_eq!(cf1.explanation(&[false, true, true]).unwrap(), term(&[(1, true), (2, true)]));
    }

    #[test]
    fn faithfulness_on_and_trees() {
        for tree in [and_f1_rooted(), and_f2_rooted()] {
            let cf = to_dnf(&tree, DEFAULT_VARIABLE_CAP).unwrap();
            for bits in 0..8usize {
                let x: Vec<bool> = (0..3).map(|j| (bits >> j) & 1 == 1).collect();
                assert_eq!(cf.predict_complete(&x).unwrap(), tree.predict_traverse(&x).unwrap());
            }
        }
    }
}
