//! Cube/DNF algebra: truth tables, deterministic Quine-McCluskey
//! minimization, and the consensus-based Blake canonical form.
//!
//! The minimizer is *canonical*: its output is a pure function of the truth
//! table of its input, so any two logically equivalent expressions over the
//! same relevant variables minimize to the identical term list. Everything
//! downstream (equivalence checking, deduplication, canonical keys) leans on
//! that guarantee.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::fmt;

use crate::error::{Error, Result};

/// Default cap on the number of distinct variables the minimizer will expand.
/// Truth tables are exponential in this count.
pub const DEFAULT_VARIABLE_CAP: usize = 20;

/// A single variable occurrence: a feature index and a required polarity.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Literal {
    pub feature: usize,
    /// `true` means the feature must be 1, `false` means it must be 0.
    pub positive: bool,
}

impl Literal {
    pub fn pos(feature: usize) -> Self {
        Literal { feature, positive: true }
    }

    pub fn neg(feature: usize) -> Self {
        Literal { feature, positive: false }
    }

    pub fn negated(self) -> Self {
        Literal { feature: self.feature, positive: !self.positive }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.positive {
            write!(f, "f{}", self.feature)
        } else {
            write!(f, "~f{}", self.feature)
        }
    }
}

/// Outcome of evaluating a term against partially known feature values.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TermEval {
    /// Every literal agrees with a known value.
    Satisfied,
    /// Some known value contradicts a literal.
    Falsified,
    /// No contradiction, but at least one literal is still unknown.
    Unknown,
}

/// A conjunction of literals (a cube), at most one literal per feature,
/// stored sorted by feature index. The empty term is logical True.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Term {
    literals: Vec<Literal>,
}

impl Term {
    /// The empty conjunction: logical True.
    pub fn truth() -> Self {
        Term { literals: Vec::new() }
    }

    /// Builds a term from literals, sorting and deduplicating. Returns `None`
    /// when two literals demand opposite polarities of the same feature.
    pub fn new(literals: impl IntoIterator<Item = Literal>) -> Option<Self> {
        let mut lits: Vec<Literal> = literals.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        for pair in lits.windows(2) {
            if pair[0].feature == pair[1].feature {
                return None;
            }
        }
        Some(Term { literals: lits })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.literals
    }

    pub fn len(&self) -> usize {
        self.literals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.literals.is_empty()
    }

    /// True when this term denotes logical True.
    pub fn is_truth(&self) -> bool {
        self.literals.is_empty()
    }

    pub fn features(&self) -> impl Iterator<Item = usize> + '_ {
        self.literals.iter().map(|l| l.feature)
    }

    /// Required polarity of `feature` in this term, if constrained.
    pub fn polarity_of(&self, feature: usize) -> Option<bool> {
        self.literals
            .binary_search_by_key(&feature, |l| l.feature)
            .ok()
            .map(|i| self.literals[i].positive)
    }

    /// True when this term's literal set is a subset of `other`'s, i.e. this
    /// term absorbs `other` (every assignment satisfying `other` satisfies
    /// `self`).
    pub fn absorbs(&self, other: &Term) -> bool {
        if self.literals.len() > other.literals.len() {
            return false;
        }
        self.literals.iter().all(|l| other.polarity_of(l.feature) == Some(l.positive))
    }

    /// Evaluates the term on a complete assignment.
    pub fn eval_complete(&self, x: &[bool]) -> bool {
        self.literals.iter().all(|l| x[l.feature] == l.positive)
    }

    /// Evaluates the term against partially known values (`None` = unknown).
    pub fn eval_masked(&self, values: &[Option<bool>]) -> TermEval {
        let mut unknown = false;
        for l in &self.literals {
            match values[l.feature] {
                Some(v) if v == l.positive => {}
                Some(_) => return TermEval::Falsified,
                None => unknown = true,
            }
        }
        if unknown {
            TermEval::Unknown
        } else {
            TermEval::Satisfied
        }
    }

    /// Consensus of two terms: when exactly one feature appears with opposite
    /// polarities, returns the conjunction of everything else; otherwise
    /// `None` (zero or multiple opposed literals yield nothing useful).
    pub fn consensus(&self, other: &Term) -> Option<Term> {
        let mut opposed = None;
        for l in &self.literals {
            if other.polarity_of(l.feature) == Some(!l.positive) {
                if opposed.is_some() {
                    return None;
                }
                opposed = Some(l.feature);
            }
        }
        let z = opposed?;
        let merged =
            self.literals.iter().chain(other.literals.iter()).copied().filter(|l| l.feature != z);
        Term::new(merged)
    }

    /// Order by size first, then lexicographically by literal sequence.
    pub fn canonical_cmp(&self, other: &Term) -> std::cmp::Ordering {
        self.len().cmp(&other.len()).then_with(|| self.cmp(other))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.literals.is_empty() {
            return write!(f, "TRUE");
        }
        for (i, l) in self.literals.iter().enumerate() {
            if i > 0 {
                write!(f, " & ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

/// An ordered list of terms (OR of ANDs). The empty Dnf is logical False;
/// a Dnf whose only term is the empty term is logical True.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Dnf {
    terms: Vec<Term>,
}

impl Dnf {
    pub fn falsity() -> Self {
        Dnf { terms: Vec::new() }
    }

    pub fn truth() -> Self {
        Dnf { terms: vec![Term::truth()] }
    }

    /// Builds a Dnf preserving the given term order (duplicates dropped).
    pub fn from_terms(terms: impl IntoIterator<Item = Term>) -> Self {
        let mut seen = HashSet::new();
        let terms = terms.into_iter().filter(|t| seen.insert(t.clone())).collect();
        Dnf { terms }
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_false(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_true(&self) -> bool {
        self.terms.iter().any(Term::is_truth)
    }

    /// Sorted list of feature indices appearing anywhere in the terms.
    pub fn variables(&self) -> Vec<usize> {
        let set: BTreeSet<usize> = self.terms.iter().flat_map(Term::features).collect();
        set.into_iter().collect()
    }

    pub fn eval_complete(&self, x: &[bool]) -> bool {
        self.terms.iter().any(|t| t.eval_complete(x))
    }

    /// Absorption and size-then-lex ordering holds for every canonical Dnf
    /// produced by this module; raw expressions built with `from_terms` make
    /// no such promise.
    pub fn max_feature(&self) -> Option<usize> {
        self.terms.iter().filter_map(|t| t.literals().last().map(|l| l.feature)).max()
    }
}

impl fmt::Display for Dnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "FALSE");
        }
        for (i, t) in self.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " | ")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

/// A complete truth table over a sorted variable list. Rows are numbered by
/// reading the variable columns as a binary number: row 0 is all-false, row 1
/// sets only the last (rightmost) variable, and the final row is all-true.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct TruthTable {
    variables: Vec<usize>,
    rows: Vec<bool>,
}

impl TruthTable {
    pub fn variables(&self) -> &[usize] {
        &self.variables
    }

    pub fn rows(&self) -> &[bool] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }
}

/// Expands `expr` into its full truth table over exactly the variables that
/// occur in it. Errors when the variable count exceeds `max_vars`.
pub fn truth_table(expr: &Dnf, max_vars: usize) -> Result<TruthTable> {
    let variables = expr.variables();
    let k = variables.len();
    if k > max_vars {
        return Err(Error::VariableCapExceeded { count: k, cap: max_vars });
    }
    let col_of: HashMap<usize, usize> =
        variables.iter().enumerate().map(|(c, &v)| (v, c)).collect();
    let mut rows = vec![false; 1usize << k];
    for (row, out) in rows.iter_mut().enumerate() {
        *out = expr.terms.iter().any(|t| {
            t.literals().iter().all(|l| {
                let col = col_of[&l.feature];
                ((row >> (k - 1 - col)) & 1 == 1) == l.positive
            })
        });
    }
    Ok(TruthTable { variables, rows })
}

/// Enumerates all prime implicants of the table's function by the classic
/// tabulation method: repeatedly merge implicants differing in exactly one
/// specified bit; whatever never merges is prime. Output is deterministic:
/// sorted by term size, then lexicographically by literal sequence.
pub fn prime_implicants(table: &TruthTable) -> Vec<Term> {
    let k = table.variables.len();
    let full_mask: u64 = if k == 64 { u64::MAX } else { (1u64 << k) - 1 };
    let minterms: Vec<u64> =
        (0..table.rows.len()).filter(|&r| table.rows[r]).map(|r| r as u64).collect();
    if minterms.is_empty() {
        return Vec::new();
    }
    if k == 0 {
        return vec![Term::truth()];
    }

    // (mask, value): mask bit set = variable specified; bit b corresponds to
    // column k-1-b, mirroring the row numbering.
    let mut level: HashSet<(u64, u64)> = minterms.iter().map(|&m| (full_mask, m)).collect();
    let mut primes: HashSet<(u64, u64)> = HashSet::new();

    while !level.is_empty() {
        let mut merged: HashSet<(u64, u64)> = HashSet::new();
        let mut next: HashSet<(u64, u64)> = HashSet::new();
        for &(mask, value) in &level {
            for b in 0..k as u64 {
                let bit = 1u64 << b;
                if mask & bit == 0 {
                    continue;
                }
                let partner = (mask, value ^ bit);
                if level.contains(&partner) {
                    merged.insert((mask, value));
                    merged.insert(partner);
                    next.insert((mask & !bit, value & !bit));
                }
            }
        }
        for imp in &level {
            if !merged.contains(imp) {
                primes.insert(*imp);
            }
        }
        level = next;
    }

    let mut terms: Vec<Term> = primes
        .into_iter()
        .map(|(mask, value)| implicant_to_term(mask, value, &table.variables))
        .collect();
    terms.sort_unstable_by(|a, b| a.canonical_cmp(b));
    terms
}

fn implicant_to_term(mask: u64, value: u64, variables: &[usize]) -> Term {
    let k = variables.len();
    let literals = (0..k).filter_map(|col| {
        let bit = 1u64 << (k - 1 - col);
        if mask & bit == 0 {
            None
        } else {
            Some(Literal { feature: variables[col], positive: value & bit != 0 })
        }
    });
    Term::new(literals).expect("implicant has one polarity per column")
}

/// Deterministic two-level minimization. The output is a minimum-cardinality
/// cover of prime implicants and depends only on the truth table of `expr`:
///
/// 1. expand the truth table and collect all prime implicants;
/// 2. drop variables that occur in no prime implicant (restricting the table
///    to rows where those variables are 0);
/// 3. sort prime implicants by the earliest table row satisfying each;
/// 4. take every essential prime implicant, then close the cover with an
///    exact branch-and-bound search, preferring earlier implicants on ties.
pub fn quine_mccluskey(expr: &Dnf, max_vars: usize) -> Result<Dnf> {
    let table = truth_table(expr, max_vars)?;
    Ok(minimize_table(&table))
}

/// Minimization from an existing table; see [`quine_mccluskey`].
pub fn minimize_table(table: &TruthTable) -> Dnf {
    let primes = prime_implicants(table);
    if primes.is_empty() {
        return Dnf::falsity();
    }
    if primes[0].is_truth() {
        return Dnf::truth();
    }

    // Restrict to variables used by some prime implicant. Rows with a nonzero
    // irrelevant variable are redundant for covering purposes.
    let used: Vec<usize> = {
        let set: BTreeSet<usize> = primes.iter().flat_map(Term::features).collect();
        set.into_iter().collect()
    };
    let m = used.len();
    let col_of: HashMap<usize, usize> = used.iter().enumerate().map(|(c, &v)| (v, c)).collect();
    let orig_col: HashMap<usize, usize> =
        table.variables.iter().enumerate().map(|(c, &v)| (v, c)).collect();
    let k = table.variables.len();

    // Reduced table rows, with every irrelevant variable fixed to 0.
    let reduced_value = |row: usize| -> bool {
        let mut orig_row = 0usize;
        for (c, &v) in used.iter().enumerate() {
            if (row >> (m - 1 - c)) & 1 == 1 {
                orig_row |= 1 << (k - 1 - orig_col[&v]);
            }
        }
        table.rows[orig_row]
    };

    // Earliest satisfying row: all unfixed bits 0, positive literals 1.
    let earliest_row = |t: &Term| -> usize {
        t.literals()
            .iter()
            .filter(|l| l.positive)
            .map(|l| 1usize << (m - 1 - col_of[&l.feature]))
            .sum()
    };

    let mut sorted = primes;
    sorted.sort_by_key(|t| earliest_row(t)); // stable: keeps size-then-lex on ties

    let minterms: Vec<usize> = (0..1usize << m).filter(|&r| reduced_value(r)).collect();
    let covers: Vec<CoverBits> = sorted
        .iter()
        .map(|t| {
            let mut bits = CoverBits::new(minterms.len());
            for (i, &row) in minterms.iter().enumerate() {
                let sat = t
                    .literals()
                    .iter()
                    .all(|l| ((row >> (m - 1 - col_of[&l.feature])) & 1 == 1) == l.positive);
                if sat {
                    bits.set(i);
                }
            }
            bits
        })
        .collect();

    let selection = minimum_cover(&covers, minterms.len());
    Dnf { terms: selection.into_iter().map(|i| sorted[i].clone()).collect() }
}

/// Compact bitset over minterm positions.
#[derive(Clone, PartialEq, Eq)]
struct CoverBits {
    words: Vec<u64>,
}

impl CoverBits {
    fn new(len: usize) -> Self {
        CoverBits { words: vec![0; len.div_ceil(64)] }
    }

    fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    fn or_assign(&mut self, other: &CoverBits) {
        for (w, o) in self.words.iter_mut().zip(&other.words) {
            *w |= o;
        }
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Exact minimum-cardinality cover over `n` minterms, deterministic: all
/// essential implicants enter first, the remainder is closed by depth-first
/// branch and bound over implicants in index order, and among equally small
/// covers the lexicographically earliest index set wins.
fn minimum_cover(covers: &[CoverBits], n: usize) -> Vec<usize> {
    if n == 0 {
        // Function is never true on the reduced table: no cover needed.
        return Vec::new();
    }
    let mut essential: Vec<usize> = Vec::new();
    for m in 0..n {
        let mut sole = None;
        for (i, c) in covers.iter().enumerate() {
            if c.get(m) {
                if sole.is_some() {
                    sole = None;
                    break;
                }
                sole = Some(i);
            }
        }
        if let Some(i) = sole {
            if !essential.contains(&i) {
                essential.push(i);
            }
        }
    }
    essential.sort_unstable();

    let mut covered = CoverBits::new(n);
    for &i in &essential {
        covered.or_assign(&covers[i]);
    }
    if covered.count() == n {
        return essential;
    }

    let mut best: Option<Vec<usize>> = None;
    let mut chosen: Vec<usize> = Vec::new();
    branch_cover(covers, n, &covered, &mut chosen, &mut best);
    let mut extra = best.expect("prime implicants always cover their own minterms");
    let mut selection = essential;
    selection.append(&mut extra);
    selection.sort_unstable();
    selection.dedup();
    selection
}

fn branch_cover(
    covers: &[CoverBits],
    n: usize,
    covered: &CoverBits,
    chosen: &mut Vec<usize>,
    best: &mut Option<Vec<usize>>,
) {
    let first_uncovered = (0..n).find(|&m| !covered.get(m));
    let Some(target) = first_uncovered else {
        let mut candidate = chosen.clone();
        candidate.sort_unstable();
        let better = match best {
            None => true,
            Some(b) => (candidate.len(), &candidate) < (b.len(), b),
        };
        if better {
            *best = Some(candidate);
        }
        return;
    };
    if let Some(b) = best {
        if chosen.len() >= b.len() {
            return;
        }
    }
    for (i, c) in covers.iter().enumerate() {
        if !c.get(target) || chosen.contains(&i) {
            continue;
        }
        let mut next = covered.clone();
        next.or_assign(c);
        chosen.push(i);
        branch_cover(covers, n, &next, chosen, best);
        chosen.pop();
    }
}

/// Closes a minimized DNF under pairwise consensus and removes absorbed
/// terms, yielding the complete set of prime implicants (the Blake canonical
/// form). Output sorted by size then literal sequence.
pub fn blake_canonical_form(minimal: &Dnf, max_vars: usize) -> Result<Dnf> {
    let vars = minimal.variables().len();
    if vars > max_vars {
        return Err(Error::VariableCapExceeded { count: vars, cap: max_vars });
    }
    let mut terms: Vec<Term> = Vec::new();
    let mut seen: HashSet<Term> = HashSet::new();
    for t in minimal.terms() {
        if seen.insert(t.clone()) {
            terms.push(t.clone());
        }
    }
    let mut work: VecDeque<(usize, usize)> = VecDeque::new();
    for i in 0..terms.len() {
        for j in (i + 1)..terms.len() {
            work.push_back((i, j));
        }
    }
    while let Some((i, j)) = work.pop_front() {
        let Some(c) = terms[i].consensus(&terms[j]) else { continue };
        if !seen.insert(c.clone()) {
            continue;
        }
        let idx = terms.len();
        for other in 0..idx {
            work.push_back((other, idx));
        }
        terms.push(c);
    }
    // Absorption: keep only terms not strictly contained in another.
    let kept: Vec<Term> =
        terms.iter().filter(|t| !terms.iter().any(|s| s != *t && s.absorbs(t))).cloned().collect();
    let mut kept = kept;
    kept.sort_unstable_by(|a, b| a.canonical_cmp(b));
    Ok(Dnf { terms: kept })
}

/// Result of substituting known values into an expression.
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Simplified {
    Constant(bool),
    Residual(Dnf),
}

/// Substitutes the known entries of `values` into `expr`, then re-minimizes
/// the residual. Satisfied literals vanish, falsified terms drop, and a term
/// fully satisfied by known values makes the whole expression true.
pub fn substitute_simplify(
    expr: &Dnf,
    values: &[Option<bool>],
    max_vars: usize,
) -> Result<Simplified> {
    if let Some(max) = expr.max_feature() {
        if max >= values.len() {
            return Err(Error::DimensionMismatch { expected: max + 1, got: values.len() });
        }
    }
    let mut residual: Vec<Term> = Vec::new();
    'terms: for t in expr.terms() {
        let mut remaining: Vec<Literal> = Vec::new();
        for l in t.literals() {
            match values[l.feature] {
                Some(v) if v == l.positive => {}
                Some(_) => continue 'terms,
                None => remaining.push(*l),
            }
        }
        if remaining.is_empty() {
            return Ok(Simplified::Constant(true));
        }
        residual.push(Term::new(remaining).expect("subset of a valid term"));
    }
    if residual.is_empty() {
        return Ok(Simplified::Constant(false));
    }
    let reduced = quine_mccluskey(&Dnf::from_terms(residual), max_vars)?;
    if reduced.is_true() {
        Ok(Simplified::Constant(true))
    } else if reduced.is_false() {
        Ok(Simplified::Constant(false))
    } else {
        Ok(Simplified::Residual(reduced))
    }
}
