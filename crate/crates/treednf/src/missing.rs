//! Synthetic MCAR missingness, quantile binarization, and the coverage
//! experiments: how often each prediction method can still answer as feature
//! values go missing, and how accurate the answers stay.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::canonical::{to_dnf, CanonicalForm};
use crate::error::{Error, Result};
use crate::exec;
use crate::predict::{predict_dnf, predict_feature_complete, predict_path, MaskedSample};
use crate::tree::{read_binary_csv, Dataset, DecisionTree, GroupMap};

/// How masking coins are thrown.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum MissingnessMode {
    /// Each binary cell is masked independently.
    PerBinaryFeature,
    /// One coin per (sample, original feature): all bins of a feature go
    /// missing together, mirroring pre-binarization missingness.
    PerOriginalFeature,
}

/// MCAR configuration: masking probability, unit of masking, and seed.
#[derive(Clone, Copy, PartialEq, Debug)]
pub struct MissingnessConfig {
    pub p: f64,
    pub mode: MissingnessMode,
    pub seed: u64,
}

impl MissingnessConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p) {
            return Err(Error::InvalidConfig(format!("p = {} is not a probability", self.p)));
        }
        Ok(())
    }
}

/// A dataset whose cells may be NA. Labels are optional: prediction inputs
/// omit them, experiment inputs carry them.
#[derive(Clone, PartialEq, Debug)]
pub struct MaskedDataset {
    feature_names: Vec<String>,
    rows: Vec<MaskedSample>,
    labels: Option<Vec<bool>>,
}

impl MaskedDataset {
    pub fn new(
        feature_names: Vec<String>,
        rows: Vec<MaskedSample>,
        labels: Option<Vec<bool>>,
    ) -> Result<Self> {
        let d = feature_names.len();
        if rows.iter().any(|r| r.len() != d) {
            return Err(Error::Schema("rows have inconsistent dimensions".into()));
        }
        if let Some(labels) = &labels {
            if labels.len() != rows.len() {
                return Err(Error::Schema("label count differs from row count".into()));
            }
        }
        Ok(MaskedDataset { feature_names, rows, labels })
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

    pub fn rows(&self) -> &[MaskedSample] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[bool]> {
        self.labels.as_deref()
    }

    /// Fraction of feature cells that are NA.
    pub fn masked_fraction(&self) -> f64 {
        let total = self.num_rows() * self.dimension();
        if total == 0 {
            return 0.0;
        }
        let missing: usize = self.rows.iter().map(MaskedSample::num_missing).sum();
        missing as f64 / total as f64
    }

    /// Reads a CSV where cells are 0/1/NA; a `label` column is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let (feature_names, rows, labels) = read_binary_csv(text, true)?;
        let rows = rows.into_iter().map(MaskedSample::new).collect();
        MaskedDataset::new(feature_names, rows, labels)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.feature_names.join(","));
        if self.labels.is_some() {
            out.push_str(",label");
        }
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            for (j, v) in row.values().iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(match v {
                    Some(true) => "1",
                    Some(false) => "0",
                    None => "NA",
                });
            }
            if let Some(labels) = &self.labels {
                out.push(',');
                out.push(if labels[i] { '1' } else { '0' });
            }
            out.push('\n');
        }
        out
    }
}

/// One independent uniform draw per (seed, sample, masking unit). The stream
/// key mixes the three through a SplitMix64 finalizer and seeds a ChaCha8
/// generator, so masks reproduce bit-for-bit across platforms and are
/// independent of evaluation order.
fn cell_draw(seed: u64, sample: u64, unit: u64) -> f64 {
    let mut z = seed
        .wrapping_add(sample.wrapping_mul(0x9E37_79B9_7F4A_7C15))
        .wrapping_add(unit.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    ChaCha8Rng::seed_from_u64(z).random()
}

/// Masks `data` completely at random. Per-binary mode flips one coin per
/// cell; per-original mode flips one coin per (sample, original feature) and
/// hides all of that feature's bins together.
pub fn inject_mcar(data: &Dataset, cfg: &MissingnessConfig) -> Result<MaskedDataset> {
    cfg.validate()?;
    let groups = match cfg.mode {
        MissingnessMode::PerBinaryFeature => None,
        MissingnessMode::PerOriginalFeature => Some(data.groups().ok_or(Error::MissingGroupMap)?),
    };
    let rows = exec::map_range(data.num_rows(), |i| {
        let row = &data.rows()[i];
        let values = (0..data.dimension())
            .map(|j| {
                let unit = match groups {
                    None => j as u64,
                    Some(g) => g.bin_to_group[j] as u64,
                };
                if cell_draw(cfg.seed, i as u64, unit) < cfg.p {
                    None
                } else {
                    Some(row[j])
                }
            })
            .collect();
        MaskedSample::new(values)
    });
    MaskedDataset::new(data.feature_names().to_vec(), rows, Some(data.labels().to_vec()))
}

// ---------------------------------------------------------------------------
// Quantile binarization

/// A raw numeric table, column-major, with 0/1 labels.
#[derive(Clone, PartialEq, Debug)]
pub struct RawTable {
    pub column_names: Vec<String>,
    pub columns: Vec<Vec<f64>>,
    pub labels: Vec<bool>,
}

impl RawTable {
    /// Reads a CSV of numeric feature columns plus a 0/1 `label` column.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new().from_reader(text.as_bytes());
        let headers = reader.headers().map_err(|e| Error::Schema(e.to_string()))?.clone();
        let label_col = headers
            .iter()
            .position(|h| h == "label")
            .ok_or_else(|| Error::Schema("raw table is missing a \"label\" column".into()))?;
        let column_names: Vec<String> = headers
            .iter()
            .enumerate()
            .filter(|&(i, _)| i != label_col)
            .map(|(_, h)| h.to_string())
            .collect();
        let mut columns: Vec<Vec<f64>> = vec![Vec::new(); column_names.len()];
        let mut labels = Vec::new();
        for (line, record) in reader.records().enumerate() {
            let record = record.map_err(|e| Error::Schema(e.to_string()))?;
            let mut col = 0;
            for (i, cell) in record.iter().enumerate() {
                if i == label_col {
                    match cell.trim() {
                        "0" => labels.push(false),
                        "1" => labels.push(true),
                        other => {
                            return Err(Error::Schema(format!(
                                "row {line}: label {other:?} is not 0/1"
                            )))
                        }
                    }
                } else {
                    let v: f64 = cell.trim().parse().map_err(|_| {
                        Error::Schema(format!("row {line}: cell {cell:?} is not numeric"))
                    })?;
                    columns[col].push(v);
                    col += 1;
                }
            }
        }
        Ok(RawTable { column_names, columns, labels })
    }
}

/// Result of binarization: the dataset (with its group map attached) and a
/// warning per column that produced no bins.
#[derive(Clone, Debug)]
pub struct Binarized {
    pub dataset: Dataset,
    pub warnings: Vec<String>,
}

/// Empirical quantile with linear interpolation between closest ranks.
fn quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    let h = (n - 1) as f64 * q;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Thresholds each numeric column at its empirical quantiles: column `name`
/// becomes one `name>t` bin per quantile, all grouped to the original
/// column. Constant columns emit zero bins and a warning.
pub fn binarize_quantile(raw: &RawTable, quantiles: &[f64]) -> Result<Binarized> {
    if quantiles.is_empty()
        || quantiles.iter().any(|&q| !(q > 0.0 && q < 1.0))
        || quantiles.windows(2).any(|w| w[0] >= w[1])
    {
        return Err(Error::InvalidConfig(
            "quantiles must be strictly increasing within (0, 1)".into(),
        ));
    }
    if raw.labels.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let n = raw.labels.len();
    let mut names = Vec::new();
    let mut bin_columns: Vec<Vec<bool>> = Vec::new();
    let mut bin_to_group = Vec::new();
    let mut warnings = Vec::new();
    for (g, column) in raw.columns.iter().enumerate() {
        let name = &raw.column_names[g];
        if column.iter().all(|v| *v == column[0]) {
            warnings.push(format!("column {name:?} is constant; no bins emitted"));
            continue;
        }
        let mut sorted = column.clone();
        sorted.sort_unstable_by(|a, b| a.partial_cmp(b).expect("finite values"));
        for &q in quantiles {
            let t = quantile(&sorted, q);
            names.push(format!("{name}>{t}"));
            bin_columns.push(column.iter().map(|&v| v > t).collect());
            bin_to_group.push(g);
        }
    }
    let rows: Vec<Vec<bool>> = (0..n).map(|i| bin_columns.iter().map(|c| c[i]).collect()).collect();
    let dataset = Dataset::new(names, rows, raw.labels.clone())?
        .with_groups(GroupMap { bin_to_group, group_names: raw.column_names.clone() })?;
    Ok(Binarized { dataset, warnings })
}

// ---------------------------------------------------------------------------
// Coverage experiments

/// One aggregated line of a coverage report: a method at a masking level.
#[derive(Clone, PartialEq, Debug)]
pub struct CoverageRow {
    pub method: String,
    pub p: f64,
    pub fraction_predicted: f64,
    pub stderr_fraction: f64,
    /// Accuracy on the predicted subset; `None` when nothing was predicted
    /// in any seed.
    pub accuracy: Option<f64>,
    pub stderr_accuracy: Option<f64>,
}

/// Coverage rows for every (method, p) pair, seed-averaged.
#[derive(Clone, PartialEq, Debug, Default)]
pub struct CoverageReport {
    pub rows: Vec<CoverageRow>,
}

/// Per-seed tallies for one method.
#[derive(Clone, Copy, Default)]
struct Tally {
    predicted: usize,
    correct: usize,
}

impl Tally {
    fn absorb(&mut self, prediction: Option<bool>, label: bool) {
        if let Some(p) = prediction {
            self.predicted += 1;
            if p == label {
                self.correct += 1;
            }
        }
    }

    fn fraction(&self, n: usize) -> f64 {
        self.predicted as f64 / n as f64
    }

    fn accuracy(&self) -> Option<f64> {
        (self.predicted > 0).then(|| self.correct as f64 / self.predicted as f64)
    }
}

fn mean_stderr(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn mean_stderr_opt(values: &[Option<f64>]) -> (Option<f64>, Option<f64>) {
    let defined: Vec<f64> = values.iter().flatten().copied().collect();
    if defined.is_empty() {
        return (None, None);
    }
    let (m, s) = mean_stderr(&defined);
    (Some(m), Some(s))
}

fn push_row(
    report: &mut CoverageReport,
    method: &str,
    p: f64,
    fractions: &[f64],
    accuracies: &[Option<f64>],
) {
    let (fraction_predicted, stderr_fraction) = mean_stderr(fractions);
    let (accuracy, stderr_accuracy) = mean_stderr_opt(accuracies);
    report.rows.push(CoverageRow {
        method: method.to_string(),
        p,
        fraction_predicted,
        stderr_fraction,
        accuracy,
        stderr_accuracy,
    });
}

fn push_ratio_row(report: &mut CoverageReport, method: &str, p: f64, ratios: &[Option<f64>]) {
    let (mean, stderr) = mean_stderr_opt(ratios);
    report.rows.push(CoverageRow {
        method: method.to_string(),
        p,
        fraction_predicted: mean.unwrap_or(f64::NAN),
        stderr_fraction: stderr.unwrap_or(f64::NAN),
        accuracy: None,
        stderr_accuracy: None,
    });
}

/// Measures, for each masking level `p` and each of the three single-tree
/// methods, the fraction of samples that still get a prediction and the
/// accuracy on that subset, averaged over `seeds` (standard error =
/// std/sqrt(#seeds)). Also reports the per-seed-averaged count ratios of the
/// canonical method over each baseline.
pub fn coverage_experiment(
    tree: &DecisionTree,
    data: &Dataset,
    p_grid: &[f64],
    mode: MissingnessMode,
    seeds: &[u64],
    max_vars: usize,
) -> Result<CoverageReport> {
    if data.num_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let cf = to_dnf(tree, max_vars)?;
    let n = data.num_rows();
    let mut report = CoverageReport::default();
    for &p in p_grid {
        let mut dnf_stats = Vec::new();
        let mut path_stats = Vec::new();
        let mut feat_stats = Vec::new();
        for &seed in seeds {
            let masked = inject_mcar(data, &MissingnessConfig { p, mode, seed })?;
            let labels = masked.labels().expect("labels preserved by injection");
            let per_sample: Vec<(Option<bool>, Option<bool>, Option<bool>)> =
                exec::map_collect(masked.rows(), |m| {
                    (
                        predict_dnf(&cf, m).expect("dimensions agree"),
                        predict_path(tree, m).expect("dimensions agree"),
                        predict_feature_complete(tree, m).expect("dimensions agree"),
                    )
                });
            let mut tallies = [Tally::default(); 3];
            for (i, (d, pth, f)) in per_sample.iter().enumerate() {
                tallies[0].absorb(*d, labels[i]);
                tallies[1].absorb(*pth, labels[i]);
                tallies[2].absorb(*f, labels[i]);
            }
            dnf_stats.push(tallies[0]);
            path_stats.push(tallies[1]);
            feat_stats.push(tallies[2]);
        }
        for (method, stats) in
            [("dnf", &dnf_stats), ("path", &path_stats), ("feature_complete", &feat_stats)]
        {
            let fractions: Vec<f64> = stats.iter().map(|t| t.fraction(n)).collect();
            let accuracies: Vec<Option<f64>> = stats.iter().map(Tally::accuracy).collect();
            push_row(&mut report, method, p, &fractions, &accuracies);
        }
        let ratio = |num: &[Tally], den: &[Tally]| -> Vec<Option<f64>> {
            num.iter()
                .zip(den)
                .map(|(a, b)| (b.predicted > 0).then(|| a.predicted as f64 / b.predicted as f64))
                .collect()
        };
        push_ratio_row(&mut report, "dnf_over_path", p, &ratio(&dnf_stats, &path_stats));
        push_ratio_row(&mut report, "dnf_over_features", p, &ratio(&dnf_stats, &feat_stats));
    }
    Ok(report)
}

/// Coverage when a whole set of near-optimal trees is available: a sample is
/// predictable when any tree's canonical form can answer, and the answer is
/// taken from the best-objective tree able to (ties to the lowest index).
pub fn rashomon_coverage(
    trees: &[DecisionTree],
    objectives: &[f64],
    data: &Dataset,
    p_grid: &[f64],
    mode: MissingnessMode,
    seeds: &[u64],
    max_vars: usize,
) -> Result<CoverageReport> {
    if trees.is_empty() || data.num_rows() == 0 {
        return Err(Error::EmptyDataset);
    }
    if trees.len() != objectives.len() {
        return Err(Error::Schema("one objective per tree is required".into()));
    }
    if seeds.is_empty() {
        return Err(Error::InvalidConfig("at least one seed is required".into()));
    }
    let forms: Vec<CanonicalForm> =
        trees.iter().map(|t| to_dnf(t, max_vars)).collect::<Result<_>>()?;
    // Evaluation order: best objective first, ties by input index.
    let mut order: Vec<usize> = (0..trees.len()).collect();
    order.sort_by(|&a, &b| {
        objectives[a].partial_cmp(&objectives[b]).expect("finite objectives").then(a.cmp(&b))
    });

    let n = data.num_rows();
    let mut report = CoverageReport::default();
    for &p in p_grid {
        let mut fractions = Vec::new();
        let mut accuracies = Vec::new();
        for &seed in seeds {
            let masked = inject_mcar(data, &MissingnessConfig { p, mode, seed })?;
            let labels = masked.labels().expect("labels preserved by injection");
            let preds: Vec<Option<bool>> = exec::map_collect(masked.rows(), |m| {
                order.iter().find_map(|&t| predict_dnf(&forms[t], m).expect("dimensions agree"))
            });
            let mut tally = Tally::default();
            for (i, pred) in preds.iter().enumerate() {
                tally.absorb(*pred, labels[i]);
            }
            fractions.push(tally.fraction(n));
            accuracies.push(tally.accuracy());
        }
        push_row(&mut report, "rashomon", p, &fractions, &accuracies);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolean::DEFAULT_VARIABLE_CAP;
    use crate::tree::Node;

    fn and_tree() -> DecisionTree {
        DecisionTree::new(
            2,
            None,
            Node::split(0, Node::leaf(false), Node::split(1, Node::leaf(false), Node::leaf(true))),
        )
        .unwrap()
    }

    fn and_data() -> Dataset {
        Dataset::new(
            vec!["f0".into(), "f1".into()],
            vec![vec![false, false], vec![false, true], vec![true, false], vec![true, true]],
            vec![false, false, false, true],
        )
        .unwrap()
    }

    fn wide_data(n: usize, d: usize) -> Dataset {
        let names = (0..d).map(|j| format!("f{j}")).collect();
        let rows = vec![vec![false; d]; n];
        let labels = vec![false; n];
        Dataset::new(names, rows, labels).unwrap()
    }

    #[test]
    fn p_zero_and_one() {
        let data = and_data();
        let none = inject_mcar(
            &data,
            &MissingnessConfig { p: 0.0, mode: MissingnessMode::PerBinaryFeature, seed: 1 },
        )
        .unwrap();
        assert_eq!(none.masked_fraction(), 0.0);
        assert!(none.rows().iter().all(|r| r.num_missing() == 0));

        let all = inject_mcar(
            &data,
            &MissingnessConfig { p: 1.0, mode: MissingnessMode::PerBinaryFeature, seed: 1 },
        )
        .unwrap();
        assert_eq!(all.masked_fraction(), 1.0);
    }

    #[test]
    fn masked_fraction_concentrates() {
        // 10,000 cells at p = 0.5: binomial 3-sigma band is ±0.015.
        let data = wide_data(500, 20);
        let masked = inject_mcar(
            &data,
            &MissingnessConfig { p: 0.5, mode: MissingnessMode::PerBinaryFeature, seed: 99 },
        )
        .unwrap();
        let f = masked.masked_fraction();
        assert!((f - 0.5).abs() < 0.015, "masked fraction {f} outside 3 sigma");
    }

    #[test]
    fn seed_determinism() {
        let data = wide_data(50, 8);
        let cfg = MissingnessConfig { p: 0.3, mode: MissingnessMode::PerBinaryFeature, seed: 7 };
        assert_eq!(inject_mcar(&data, &cfg).unwrap(), inject_mcar(&data, &cfg).unwrap());
        let other = MissingnessConfig { seed: 8, ..cfg };
        assert_ne!(inject_mcar(&data, &cfg).unwrap(), inject_mcar(&data, &other).unwrap());
    }

    #[test]
    fn per_original_masks_groups_together() {
        let data = wide_data(200, 4)
            .with_groups(GroupMap {
                bin_to_group: vec![0, 0, 1, 1],
                group_names: vec!["a".into(), "b".into()],
            })
            .unwrap();
        let masked = inject_mcar(
            &data,
            &MissingnessConfig { p: 0.5, mode: MissingnessMode::PerOriginalFeature, seed: 3 },
        )
        .unwrap();
        for row in masked.rows() {
            assert_eq!(row.get(0).is_none(), row.get(1).is_none());
            assert_eq!(row.get(2).is_none(), row.get(3).is_none());
        }

        let ungrouped = wide_data(10, 4);
        assert!(matches!(
            inject_mcar(
                &ungrouped,
                &MissingnessConfig { p: 0.5, mode: MissingnessMode::PerOriginalFeature, seed: 3 },
            ),
            Err(Error::MissingGroupMap)
        ));
    }

    #[test]
    fn masked_csv_round_trip() {
        let data = and_data();
        let masked = inject_mcar(
            &data,
            &MissingnessConfig { p: 0.5, mode: MissingnessMode::PerBinaryFeature, seed: 11 },
        )
        .unwrap();
        let parsed = MaskedDataset::from_csv(&masked.to_csv()).unwrap();
        assert_eq!(parsed, masked);
    }

    #[test]
    fn quantile_binarization() {
        let raw = RawTable {
            column_names: vec!["x".into()],
            columns: vec![vec![1.0, 2.0, 3.0, 4.0]],
            labels: vec![false, false, true, true],
        };
        let out = binarize_quantile(&raw, &[0.5]).unwrap();
        assert!(out.warnings.is_empty());
        assert_eq!(out.dataset.dimension(), 1);
        // Median of 1..4 is 2.5; bins are strictly-greater comparisons.
        assert_eq!(
            out.dataset.rows().iter().map(|r| r[0]).collect::<Vec<_>>(),
            vec![false, false, true, true]
        );

        let two = binarize_quantile(&raw, &[0.33, 0.66]).unwrap();
        assert_eq!(two.dataset.dimension(), 2);
        assert_eq!(two.dataset.groups().unwrap().bin_to_group, vec![0, 0]);
    }

    #[test]
    fn binary_column_reproduced() {
        let raw = RawTable {
            column_names: vec!["b".into()],
            columns: vec![vec![0.0, 1.0, 0.0, 1.0]],
            labels: vec![false, true, false, true],
        };
        let out = binarize_quantile(&raw, &[0.5]).unwrap();
        let col: Vec<bool> = out.dataset.rows().iter().map(|r| r[0]).collect();
        assert_eq!(col, vec![false, true, false, true]);
    }

    #[test]
    fn constant_column_warns() {
        let raw = RawTable {
            column_names: vec!["c".into(), "x".into()],
            columns: vec![vec![5.0, 5.0], vec![0.0, 1.0]],
            labels: vec![false, true],
        };
        let out = binarize_quantile(&raw, &[0.5]).unwrap();
        assert_eq!(out.warnings.len(), 1);
        assert_eq!(out.dataset.dimension(), 1);
    }

    #[test]
    fn bad_quantiles_rejected() {
        let raw = RawTable {
            column_names: vec!["x".into()],
            columns: vec![vec![0.0, 1.0]],
            labels: vec![false, true],
        };
        assert!(binarize_quantile(&raw, &[0.5, 0.5]).is_err());
        assert!(binarize_quantile(&raw, &[0.0]).is_err());
        assert!(binarize_quantile(&raw, &[]).is_err());
    }

    #[test]
    fn coverage_at_p_zero_is_total() {
        let report = coverage_experiment(
            &and_tree(),
            &and_data(),
            &[0.0],
            MissingnessMode::PerBinaryFeature,
            &[1, 2],
            DEFAULT_VARIABLE_CAP,
        )
        .unwrap();
        for row in &report.rows {
            if row.method.starts_with("dnf_over") {
                assert_eq!(row.fraction_predicted, 1.0);
            } else {
                assert_eq!(row.fraction_predicted, 1.0, "{}", row.method);
                assert_eq!(row.accuracy, Some(1.0));
            }
        }
    }

    #[test]
    fn coverage_dominance_across_seeds() {
        let report = coverage_experiment(
            &and_tree(),
            &and_data(),
            &[0.3, 0.6],
            MissingnessMode::PerBinaryFeature,
            &[0, 1, 2, 3, 4],
            DEFAULT_VARIABLE_CAP,
        )
        .unwrap();
        for p in [0.3, 0.6] {
            let get = |m: &str| {
                report.rows.iter().find(|r| r.method == m && r.p == p).unwrap().fraction_predicted
            };
            assert!(get("dnf") >= get("path"));
            assert!(get("path") >= get("feature_complete"));
        }
    }

    #[test]
    fn singleton_rashomon_matches_dnf_row() {
        let tree = and_tree();
        let data = and_data();
        let seeds = [5, 6, 7];
        let single = coverage_experiment(
            &tree,
            &data,
            &[0.4],
            MissingnessMode::PerBinaryFeature,
            &seeds,
            DEFAULT_VARIABLE_CAP,
        )
        .unwrap();
        let set = rashomon_coverage(
            std::slice::from_ref(&tree),
            &[0.1],
            &data,
            &[0.4],
            MissingnessMode::PerBinaryFeature,
            &seeds,
            DEFAULT_VARIABLE_CAP,
        )
        .unwrap();
        let dnf_row = single.rows.iter().find(|r| r.method == "dnf").unwrap();
        let set_row = &set.rows[0];
        assert_eq!(set_row.fraction_predicted, dnf_row.fraction_predicted);
        assert_eq!(set_row.accuracy, dnf_row.accuracy);
    }

    #[test]
    fn rashomon_union_is_monotone() {
        // f0-rooted AND and the mirrored f1-rooted AND are equivalent, so the
        // pair covers exactly what either alone covers.
        let left = and_tree();
        let right = DecisionTree::new(
            2,
            None,
            Node::split(1, Node::leaf(false), Node::split(0, Node::leaf(false), Node::leaf(true))),
        )
        .unwrap();
        let data = and_data();
        let seeds = [1, 2, 3];
        let one = rashomon_coverage(
            std::slice::from_ref(&left),
            &[0.1],
            &data,
            &[0.5],
            MissingnessMode::PerBinaryFeature,
            &seeds,
            DEFAULT_VARIABLE_CAP,
        )
        .unwrap();
        let pair = rashomon_coverage(
            &[left, right],
            &[0.1, 0.1],
            &data,
            &[0.5],
            MissingnessMode::PerBinaryFeature,
            &seeds,
            DEFAULT_VARIABLE_CAP,
        )
        .unwrap();
        assert_eq!(pair.rows[0].fraction_predicted, one.rows[0].fraction_predicted);
    }
}
