//! Shared oracles for the integration suites. Everything here recomputes
//! expected values by brute force, independently of the library's canonical
//! forms, so the tests cross-check two routes to the same answer.

#![allow(dead_code)]

use treednf::{Dataset, DecisionTree, Dnf, Literal, MaskedSample, Term};

/// Truth signature of an expression over a fixed dimension: one bit per
/// assignment, enumerated in row order.
pub fn dnf_signature(expr: &Dnf, dimension: usize) -> Vec<bool> {
    assignments(dimension).map(|x| expr.eval_complete(&x)).collect()
}

/// Truth signature of a tree by plain traversal.
pub fn tree_signature(tree: &DecisionTree) -> Vec<bool> {
    assignments(tree.dimension())
        .map(|x| tree.predict_traverse(&x).expect("dimension matches"))
        .collect()
}

pub fn assignments(dimension: usize) -> impl Iterator<Item = Vec<bool>> {
    (0..1usize << dimension)
        .map(move |bits| (0..dimension).map(|j| (bits >> (dimension - 1 - j)) & 1 == 1).collect())
}

/// Every completion of a masked sample.
pub fn completions(m: &MaskedSample) -> Vec<Vec<bool>> {
    let missing: Vec<usize> = (0..m.len()).filter(|&j| m.get(j).is_none()).collect();
    let mut out = Vec::with_capacity(1 << missing.len());
    for bits in 0..1usize << missing.len() {
        let mut x: Vec<bool> = m.values().iter().map(|v| v.unwrap_or(false)).collect();
        for (i, &j) in missing.iter().enumerate() {
            x[j] = (bits >> i) & 1 == 1;
        }
        out.push(x);
    }
    out
}

/// The completion oracle: the label every completion agrees on, if any.
pub fn completion_consensus(tree: &DecisionTree, m: &MaskedSample) -> Option<bool> {
    let mut label = None;
    for x in completions(m) {
        let y = tree.predict_traverse(&x).expect("dimension matches");
        match label {
            None => label = Some(y),
            Some(seen) if seen != y => return None,
            Some(_) => {}
        }
    }
    label
}

/// Exact minimum expected acquisition cost by dynamic programming over the
/// empirical row distribution. Independent of the library's policy code: a
/// state is terminal when all completions of the revealed values agree under
/// plain traversal, and identity per-feature costs are paid on first reveal.
pub fn optimal_expected_cost(
    tree: &DecisionTree,
    tree_features: &[usize],
    costs: &[f64],
    data: &Dataset,
) -> f64 {
    fn solve(
        tree: &DecisionTree,
        tree_features: &[usize],
        costs: &[f64],
        data: &Dataset,
        rows: &[usize],
        state: &mut Vec<Option<bool>>,
    ) -> f64 {
        if completion_consensus(tree, &MaskedSample::new(state.clone())).is_some() {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for &f in tree_features {
            if state[f].is_some() {
                continue;
            }
            let (low, high): (Vec<usize>, Vec<usize>) =
                rows.iter().partition(|&&i| !data.rows()[i][f]);
            let mut expected = costs[f];
            for (subset, value) in [(&low, false), (&high, true)] {
                if subset.is_empty() {
                    continue;
                }
                let p = subset.len() as f64 / rows.len() as f64;
                state[f] = Some(value);
                expected += p * solve(tree, tree_features, costs, data, subset, state);
                state[f] = None;
            }
            best = best.min(expected);
        }
        best
    }
    let rows: Vec<usize> = (0..data.num_rows()).collect();
    let mut state = vec![None; data.dimension()];
    solve(tree, tree_features, costs, data, &rows, &mut state)
}

/// Brute-force prime implicants from a truth signature: walk all 3^d cubes
/// (digit 0 = negated, 1 = positive, 2 = absent), keep those implying the
/// function with no weaker implicant parent. Output sorted.
#[allow(clippy::needless_range_loop)] // index arithmetic over cube digits
pub fn enumerate_primes(signature: &[bool], dimension: usize) -> Vec<Term> {
    let codes = 3usize.pow(dimension as u32);
    let digits = |code: usize| -> Vec<u8> {
        let mut c = code;
        (0..dimension)
            .map(|_| {
                let d = (c % 3) as u8;
                c /= 3;
                d
            })
            .collect()
    };
    let mut implicant = vec![false; codes];
    for code in 0..codes {
        let ds = digits(code);
        let free: Vec<usize> = (0..dimension).filter(|&j| ds[j] == 2).collect();
        implicant[code] = (0..1usize << free.len()).all(|bits| {
            let mut row = 0usize;
            for j in 0..dimension {
                let v = match ds[j] {
                    0 => false,
                    1 => true,
                    _ => {
                        let i = free.iter().position(|&f| f == j).unwrap();
                        (bits >> i) & 1 == 1
                    }
                };
                if v {
                    row |= 1 << (dimension - 1 - j);
                }
            }
            signature[row]
        });
    }
    let mut primes = Vec::new();
    for code in 0..codes {
        if !implicant[code] {
            continue;
        }
        let ds = digits(code);
        let mut pow = 1usize;
        let mut is_prime = true;
        for j in 0..dimension {
            if ds[j] != 2 && implicant[code + (2 - ds[j] as usize) * pow] {
                is_prime = false;
                break;
            }
            pow *= 3;
        }
        if is_prime {
            primes.push(
                Term::new(
                    (0..dimension)
                        .filter(|&j| ds[j] != 2)
                        .map(|j| Literal { feature: j, positive: ds[j] == 1 }),
                )
                .expect("cube digits are consistent"),
            );
        }
    }
    primes.sort();
    primes
}
