//! `treednf` — canonical DNF workflows for binary decision trees, driven by
//! plain files: trees as JSON, datasets as CSV, reports as CSV/JSON. Every
//! file-producing run drops a manifest with resolved flags, seeds, and input
//! digests.

mod manifest;

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use manifest::{atomic_write, read_input, RunManifest};
use treednf::cost::{
    evaluate_policy, train_q, BonusScope, CostModel, CostTask, Hyperparams, PolicyKind, QPolicy,
};
use treednf::missing::{binarize_quantile, CoverageReport, MissingnessMode, RawTable};
use treednf::missing::{coverage_experiment, rashomon_coverage, MaskedDataset};
use treednf::rashomon::{dedup, importance_distribution, remove_trivial, wasserstein_1, TreeSet};
use treednf::{parse_tree, to_dnf, Dataset, DecisionTree, GroupMap};

#[derive(Parser)]
#[command(name = "treednf", version, about = "Canonical DNF tooling for binary decision trees")]
struct Cli {
    /// Cap on the number of distinct variables the minimizer may expand.
    #[arg(long, global = true, default_value_t = treednf::DEFAULT_VARIABLE_CAP)]
    max_vars: usize,

    /// Suppress the human-readable summary on stderr.
    #[arg(long, global = true)]
    quiet: bool,

    /// Where to write the run manifest (default: next to the output file).
    #[arg(long, global = true, value_name = "FILE")]
    manifest_out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    PerBinary,
    PerOriginal,
}

impl From<ModeArg> for MissingnessMode {
    fn from(mode: ModeArg) -> Self {
        match mode {
            ModeArg::PerBinary => MissingnessMode::PerBinaryFeature,
            ModeArg::PerOriginal => MissingnessMode::PerOriginalFeature,
        }
    }
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum BonusArg {
    Tree,
    All,
}

impl From<BonusArg> for BonusScope {
    fn from(b: BonusArg) -> Self {
        match b {
            BonusArg::Tree => BonusScope::TreeFeatures,
            BonusArg::All => BonusScope::AllFeatures,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit a tree's canonical DNF, Blake canonical form, and key as JSON.
    Canonicalize {
        tree: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Decide whether two trees are predictively equivalent.
    Equiv { a: PathBuf, b: PathBuf },

    /// Partition a tree set into predictive-equivalence classes.
    Dedup {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Predict each row of a masked CSV with all four evaluators.
    Predict {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Coverage and accuracy sweep under synthetic MCAR missingness.
    #[command(name = "missing-sim")]
    MissingSim {
        #[arg(long)]
        tree: Option<PathBuf>,
        /// Tree-set JSON for best-available-model coverage.
        #[arg(long)]
        trees: Option<PathBuf>,
        #[arg(long)]
        data: PathBuf,
        /// Group map JSON (required for per-original masking).
        #[arg(long)]
        groups: Option<PathBuf>,
        /// Either start:end:step or a comma-separated list.
        #[arg(long, default_value = "0.1:0.9:0.1")]
        p_grid: String,
        #[arg(long, value_enum, default_value_t = ModeArg::PerBinary)]
        mode: ModeArg,
        /// Number of seeds; streams are seed, seed+1, ...
        #[arg(long, default_value_t = 5)]
        seeds: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },

    /// Train a Q-learning acquisition policy for one tree.
    #[command(name = "cost-train")]
    CostTrain {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// JSON of feature-name to positive cost; may embed a group map.
        #[arg(long)]
        costs: Option<PathBuf>,
        #[arg(long)]
        groups: Option<PathBuf>,
        /// Draw integer costs in 1..=10 per original feature instead.
        #[arg(long, value_name = "SEED")]
        random_costs: Option<u64>,
        #[arg(long, default_value_t = 10_000)]
        episodes: usize,
        #[arg(long, default_value_t = 0.9)]
        gamma: f64,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = BonusArg::Tree)]
        terminal_bonus: BonusArg,
        #[arg(long)]
        out: PathBuf,
    },

    /// Evaluate acquisition strategies on a dataset.
    #[command(name = "cost-eval")]
    CostEval {
        #[arg(long)]
        tree: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        costs: Option<PathBuf>,
        #[arg(long)]
        groups: Option<PathBuf>,
        #[arg(long, value_name = "SEED")]
        random_costs: Option<u64>,
        /// Trained policy JSON (required for the optimized strategy).
        #[arg(long)]
        policy: Option<PathBuf>,
        /// Comma-separated subset of naive,path,greedy,optimized.
        #[arg(long, default_value = "naive,path,greedy,optimized")]
        kinds: String,
        #[arg(long, value_enum, default_value_t = BonusArg::Tree)]
        terminal_bonus: BonusArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },

    /// Importance distribution over a tree set, optionally deduplicated.
    Importance {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        dedup: bool,
        /// Normalize each tree's importance vector to sum to one.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: PathBuf,
        /// Another run's CSV to compare against (1-Wasserstein per feature).
        #[arg(long)]
        compare: Option<PathBuf>,
        #[arg(long)]
        compare_out: Option<PathBuf>,
    },

    /// Quantile-binarize a raw numeric CSV into a binary dataset.
    Binarize {
        #[arg(long)]
        raw: PathBuf,
        #[arg(long, default_value = "0.33,0.66")]
        quantiles: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        groups_out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            let code = match err.downcast_ref::<treednf::Error>() {
                Some(treednf::Error::VariableCapExceeded { .. }) => 3,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let max_vars = cli.max_vars;
    let quiet = cli.quiet;
    let manifest_out = cli.manifest_out.as_deref();
    match cli.command {
        Command::Canonicalize { tree, out } => {
            let mut mf = RunManifest::new("canonicalize");
            let parsed = parse_tree(&read_input(&tree, &mut mf)?)?;
            let cf = to_dnf(&parsed, max_vars)?.attach_bcf(max_vars)?;
            let body = serde_json::to_string_pretty(&serde_json::json!({
                "dnf_pos": cf.simple_pos().to_string(),
                "dnf_neg": cf.simple_neg().to_string(),
                "bcf_pos": cf.bcf_pos().map(|d| d.to_string()),
                "bcf_neg": cf.bcf_neg().map(|d| d.to_string()),
                "key": cf.canonical_key(),
            }))? + "\n";
            let summary = format!("canonical key: {}", cf.canonical_key());
            deliver(&body, out.as_deref(), &mf, manifest_out, quiet, &summary)
        }

        Command::Equiv { a, b } => {
            let mut mf = RunManifest::new("equiv");
            let ta = parse_tree(&read_input(&a, &mut mf)?)?;
            let tb = parse_tree(&read_input(&b, &mut mf)?)?;
            let fa = to_dnf(&ta, max_vars)?;
            let fb = to_dnf(&tb, max_vars)?;
            let verdict = if fa.equivalent(&fb)? { "equivalent" } else { "not equivalent" };
            let summary = format!("{} vs {}: {verdict}", a.display(), b.display());
            deliver(&format!("{verdict}\n"), None, &mf, manifest_out, quiet, &summary)
        }

        Command::Dedup { trees, out } => {
            let mut mf = RunManifest::new("dedup");
            let ts = parse_tree_set(&read_input(&trees, &mut mf)?)?;
            let nontrivial = remove_trivial(&ts).len();
            let report = dedup(&ts, max_vars);
            let body = serde_json::to_string_pretty(&serde_json::json!({
                "total": ts.len(),
                "nontrivial": nontrivial,
                "unique": report.num_classes(),
                "classes": report.classes.iter().map(|c| serde_json::json!({
                    "key": c.key,
                    "members": c.members,
                    "representative": c.representative,
                })).collect::<Vec<_>>(),
                "skipped": report.skipped.iter().map(|(i, reason)| serde_json::json!({
                    "index": i,
                    "reason": reason,
                })).collect::<Vec<_>>(),
            }))? + "\n";
            let summary = format!(
                "{} trees, {} nontrivial, {} unique classes, {} skipped",
                ts.len(),
                nontrivial,
                report.num_classes(),
                report.skipped.len()
            );
            deliver(&body, out.as_deref(), &mf, manifest_out, quiet, &summary)
        }

        Command::Predict { tree, data, out } => {
            let mut mf = RunManifest::new("predict");
            let parsed = parse_tree(&read_input(&tree, &mut mf)?)?;
            let masked = MaskedDataset::from_csv(&read_input(&data, &mut mf)?)?;
            if masked.dimension() != parsed.dimension() {
                bail!(treednf::Error::DimensionMismatch {
                    expected: parsed.dimension(),
                    got: masked.dimension(),
                });
            }
            let cf = to_dnf(&parsed, max_vars)?;
            let mut body = String::from("sample_index,dnf,fast,path,feature_complete\n");
            for (i, m) in masked.rows().iter().enumerate() {
                let cells = [
                    treednf::predict_dnf(&cf, m)?,
                    treednf::predict_missing_fast(&parsed, m)?,
                    treednf::predict_path(&parsed, m)?,
                    treednf::predict_feature_complete(&parsed, m)?,
                ];
                body.push_str(&format!(
                    "{i},{},{},{},{}\n",
                    fmt_pred(cells[0]),
                    fmt_pred(cells[1]),
                    fmt_pred(cells[2]),
                    fmt_pred(cells[3])
                ));
            }
            let summary = format!("predicted {} rows", masked.num_rows());
            deliver(&body, out.as_deref(), &mf, manifest_out, quiet, &summary)
        }

        Command::MissingSim { tree, trees, data, groups, p_grid, mode, seeds, seed, out } => {
            let mut mf = RunManifest::new("missing-sim");
            if tree.is_none() && trees.is_none() {
                bail!(treednf::Error::InvalidConfig("provide --tree and/or --trees".into()));
            }
            let mut dataset = Dataset::from_csv(&read_input(&data, &mut mf)?)?;
            if let Some(path) = &groups {
                let map = GroupMap::parse(&read_input(path, &mut mf)?, dataset.dimension())?;
                dataset = dataset.with_groups(map)?;
            }
            let grid = parse_p_grid(&p_grid)?;
            let base = seed.unwrap_or_else(auto_seed);
            let seed_list: Vec<u64> = (0..seeds as u64).map(|i| base + i).collect();
            mf.seeds = seed_list.clone();
            mf.notes.push(
                "fractions, accuracies, and count ratios are averaged per seed; \
                 stderr = sample std / sqrt(#seeds)"
                    .into(),
            );

            let mut report = CoverageReport::default();
            if let Some(path) = &tree {
                let parsed = parse_tree(&read_input(path, &mut mf)?)?;
                let single = coverage_experiment(
                    &parsed,
                    &dataset,
                    &grid,
                    mode.into(),
                    &seed_list,
                    max_vars,
                )?;
                report.rows.extend(single.rows);
            }
            if let Some(path) = &trees {
                let ts = parse_tree_set(&read_input(path, &mut mf)?)?;
                let set_report = rashomon_coverage(
                    &ts.trees,
                    &ts.objectives,
                    &dataset,
                    &grid,
                    mode.into(),
                    &seed_list,
                    max_vars,
                )?;
                report.rows.extend(set_report.rows);
            }

            let mut body = String::from(
                "method,p,fraction_predicted,accuracy,stderr_fraction,stderr_accuracy\n",
            );
            for row in &report.rows {
                body.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.method,
                    row.p,
                    fmt_f64(row.fraction_predicted),
                    row.accuracy.map_or("NA".into(), fmt_f64),
                    fmt_f64(row.stderr_fraction),
                    row.stderr_accuracy.map_or("NA".into(), fmt_f64),
                ));
            }
            let summary = format!(
                "{} report rows over p grid {:?} with {} seeds",
                report.rows.len(),
                grid,
                seed_list.len()
            );
            deliver(&body, Some(&out), &mf, manifest_out, quiet, &summary)
        }

        Command::CostTrain {
            tree,
            data,
            costs,
            groups,
            random_costs,
            episodes,
            gamma,
            alpha,
            epsilon,
            seed,
            terminal_bonus,
            out,
        } => {
            let mut mf = RunManifest::new("cost-train");
            let parsed = parse_tree(&read_input(&tree, &mut mf)?)?;
            let dataset = Dataset::from_csv(&read_input(&data, &mut mf)?)?;
            let cm = build_cost_model(
                &parsed,
                costs.as_deref(),
                groups.as_deref(),
                random_costs,
                &mut mf,
            )?;
            let cf = to_dnf(&parsed, max_vars)?.attach_bcf(max_vars)?;
            let scope: BonusScope = terminal_bonus.into();
            let task = CostTask::new(&parsed, &cf, &cm, scope)?;
            let hyper = Hyperparams { gamma, alpha, epsilon, episodes };
            let train_seed = seed.unwrap_or_else(auto_seed);
            mf.seeds.push(train_seed);
            if let Some(s) = random_costs {
                mf.notes.push(format!("costs drawn with --random-costs {s}"));
            }
            let policy = train_q(&task, &dataset, hyper, train_seed)?;
            let states = policy.table.len();
            let body =
                serde_json::to_string_pretty(&PolicyFile { bonus_scope: scope, policy })? + "\n";
            let summary =
                format!("trained {episodes} episodes (seed {train_seed}); {states} states");
            deliver(&body, Some(&out), &mf, manifest_out, quiet, &summary)
        }

        Command::CostEval {
            tree,
            data,
            costs,
            groups,
            random_costs,
            policy,
            kinds,
            terminal_bonus,
            out,
        } => {
            let mut mf = RunManifest::new("cost-eval");
            let parsed = parse_tree(&read_input(&tree, &mut mf)?)?;
            let dataset = Dataset::from_csv(&read_input(&data, &mut mf)?)?;
            let cm = build_cost_model(
                &parsed,
                costs.as_deref(),
                groups.as_deref(),
                random_costs,
                &mut mf,
            )?;
            let loaded: Option<PolicyFile> = match &policy {
                Some(path) => Some(
                    serde_json::from_str(&read_input(path, &mut mf)?)
                        .map_err(|e| treednf::Error::Schema(e.to_string()))?,
                ),
                None => None,
            };
            let scope = loaded.as_ref().map_or(terminal_bonus.into(), |p| p.bonus_scope);
            let cf = to_dnf(&parsed, max_vars)?.attach_bcf(max_vars)?;
            let task = CostTask::new(&parsed, &cf, &cm, scope)?;

            let mut body = String::from("policy_kind,mean_cost,std_cost,n_rows\n");
            let mut printed = Vec::new();
            for kind_name in kinds.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let kind = match kind_name {
                    "naive" => PolicyKind::Naive,
                    "path" => PolicyKind::Path,
                    "greedy" => PolicyKind::Greedy,
                    "optimized" => PolicyKind::Optimized,
                    other => bail!(treednf::Error::InvalidConfig(format!(
                        "unknown policy kind {other:?}"
                    ))),
                };
                if kind == PolicyKind::Optimized && loaded.is_none() {
                    bail!(treednf::Error::InvalidConfig(
                        "the optimized strategy needs --policy".into()
                    ));
                }
                let summary =
                    evaluate_policy(kind, &task, loaded.as_ref().map(|p| &p.policy), &dataset)?;
                body.push_str(&format!(
                    "{},{},{},{}\n",
                    kind.name(),
                    fmt_f64(summary.mean),
                    fmt_f64(summary.std),
                    summary.n_rows
                ));
                printed.push(format!("{} {:.3}", kind.name(), summary.mean));
            }
            let summary = format!("mean cost: {}", printed.join(", "));
            deliver(&body, out.as_deref(), &mf, manifest_out, quiet, &summary)
        }

        Command::Importance {
            trees,
            data,
            dedup: dedup_flag,
            normalize,
            out,
            compare,
            compare_out,
        } => {
            let mut mf = RunManifest::new("importance");
            let ts = parse_tree_set(&read_input(&trees, &mut mf)?)?;
            let dataset = Dataset::from_csv(&read_input(&data, &mut mf)?)?;
            let dist = importance_distribution(&ts, &dataset, dedup_flag, normalize, max_vars)?;
            let mut body = String::from("feature,value,weight\n");
            for (j, name) in dist.feature_names.iter().enumerate() {
                for (value, weight) in dist.feature(j) {
                    body.push_str(&format!("{name},{},{}\n", fmt_f64(*value), fmt_f64(*weight)));
                }
            }
            let mut summary = format!(
                "importance over {} trees ({}dedup)",
                ts.len(),
                if dedup_flag { "" } else { "no " }
            );
            if let Some(other_path) = &compare {
                let other = parse_importance_csv(&read_input(other_path, &mut mf)?)?;
                let mut cmp = String::from("feature,wasserstein_1\n");
                for (j, name) in dist.feature_names.iter().enumerate() {
                    if let Some(b) = other.get(name) {
                        let w = wasserstein_1(dist.feature(j), b)?;
                        cmp.push_str(&format!("{name},{}\n", fmt_f64(w)));
                    }
                }
                let target = compare_out.clone().unwrap_or_else(|| {
                    let mut name = out.file_name().unwrap_or_default().to_os_string();
                    name.push(".w1.csv");
                    out.with_file_name(name)
                });
                atomic_write(&target, &cmp)?;
                summary.push_str(&format!("; wasserstein table at {}", target.display()));
            }
            deliver(&body, Some(&out), &mf, manifest_out, quiet, &summary)
        }

        Command::Binarize { raw, quantiles, out, groups_out } => {
            let mut mf = RunManifest::new("binarize");
            let table = RawTable::from_csv(&read_input(&raw, &mut mf)?)?;
            let qs: Vec<f64> = quantiles
                .split(',')
                .map(|s| s.trim().parse::<f64>().context("quantiles must be numbers"))
                .collect::<Result<_>>()?;
            let result = binarize_quantile(&table, &qs)?;
            for warning in &result.warnings {
                eprintln!("warning: {warning}");
            }
            let groups_path = groups_out.clone().unwrap_or_else(|| {
                let mut name = out.file_name().unwrap_or_default().to_os_string();
                name.push(".groups.json");
                out.with_file_name(name)
            });
            atomic_write(
                &groups_path,
                &(result.dataset.groups().expect("binarizer attaches groups").to_json() + "\n"),
            )?;
            let summary = format!(
                "{} rows, {} bins from {} columns; groups at {}",
                result.dataset.num_rows(),
                result.dataset.dimension(),
                table.column_names.len(),
                groups_path.display()
            );
            deliver(&result.dataset.to_csv(), Some(&out), &mf, manifest_out, quiet, &summary)
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PolicyFile {
    bonus_scope: BonusScope,
    policy: QPolicy,
}

fn deliver(
    content: &str,
    out: Option<&Path>,
    mf: &RunManifest,
    manifest_out: Option<&Path>,
    quiet: bool,
    summary: &str,
) -> Result<()> {
    match out {
        Some(path) => {
            atomic_write(path, content)?;
            mf.write(manifest_out, Some(path))?;
        }
        None => {
            print!("{content}");
            mf.write(manifest_out, None)?;
        }
    }
    if !quiet {
        eprintln!("{summary}");
    }
    Ok(())
}

fn fmt_pred(p: Option<bool>) -> &'static str {
    match p {
        Some(true) => "1",
        Some(false) => "0",
        None => "NA",
    }
}

fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NA".into()
    } else {
        format!("{v}")
    }
}

fn auto_seed() -> u64 {
    let nanos = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .expect("clock after epoch")
        .as_nanos() as u64;
    nanos ^ ((std::process::id() as u64) << 32)
}

/// Tree-set files: a JSON array of tree documents, each carrying an extra
/// `objective` field.
#[derive(Deserialize)]
struct TreeWithObjective {
    objective: f64,
    #[serde(flatten)]
    document: serde_json::Value,
}

fn parse_tree_set(content: &str) -> Result<TreeSet> {
    let docs: Vec<TreeWithObjective> =
        serde_json::from_str(content).map_err(|e| treednf::Error::Schema(e.to_string()))?;
    let mut trees = Vec::with_capacity(docs.len());
    let mut objectives = Vec::with_capacity(docs.len());
    for doc in docs {
        trees.push(parse_tree(&doc.document.to_string())?);
        objectives.push(doc.objective);
    }
    Ok(TreeSet::new(trees, objectives, "file".into())?)
}

fn parse_p_grid(grid_spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = grid_spec.split(':').collect();
    let grid: Vec<f64> = match parts.as_slice() {
        [list] => list
            .split(',')
            .map(|s| s.trim().parse::<f64>().context("p grid values must be numbers"))
            .collect::<Result<_>>()?,
        [start, end, step] => {
            let (start, end, step) = (
                start.parse::<f64>().context("bad p grid start")?,
                end.parse::<f64>().context("bad p grid end")?,
                step.parse::<f64>().context("bad p grid step")?,
            );
            if step <= 0.0 {
                bail!(treednf::Error::InvalidConfig("p grid step must be positive".into()));
            }
            let mut grid = Vec::new();
            let mut i = 0u32;
            loop {
                // Snap to 9 decimals so 0.1 * 3 prints as 0.3, not 0.30000000000000004.
                let p = ((start + step * f64::from(i)) * 1e9).round() / 1e9;
                if p > end + 1e-9 {
                    break;
                }
                grid.push(p);
                i += 1;
            }
            grid
        }
        _ => bail!(treednf::Error::InvalidConfig(format!("cannot parse p grid {grid_spec:?}"))),
    };
    if grid.is_empty() || grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        bail!(treednf::Error::InvalidConfig("p grid must lie within [0, 1]".into()));
    }
    Ok(grid)
}

/// Costs file: either a flat `{name: cost}` map or
/// `{"costs": {...}, "groups": {"0": "name", ...}}`.
#[derive(Deserialize)]
#[serde(untagged)]
enum CostsFile {
    Wrapped {
        costs: HashMap<String, f64>,
        #[serde(default)]
        groups: Option<BTreeMap<String, String>>,
    },
    Flat(HashMap<String, f64>),
}

fn build_cost_model(
    tree: &DecisionTree,
    costs_path: Option<&Path>,
    groups_path: Option<&Path>,
    random_seed: Option<u64>,
    mf: &mut RunManifest,
) -> Result<CostModel> {
    let mut embedded_groups: Option<BTreeMap<String, String>> = None;
    let mut named_costs: Option<HashMap<String, f64>> = None;
    if let Some(path) = costs_path {
        let file: CostsFile = serde_json::from_str(&read_input(path, mf)?)
            .map_err(|e| treednf::Error::Schema(e.to_string()))?;
        match file {
            CostsFile::Wrapped { costs, groups } => {
                named_costs = Some(costs);
                embedded_groups = groups;
            }
            CostsFile::Flat(costs) => named_costs = Some(costs),
        }
    }
    let groups = if let Some(path) = groups_path {
        GroupMap::parse(&read_input(path, mf)?, tree.dimension())?
    } else if let Some(map) = embedded_groups {
        let json = serde_json::to_string(&map)?;
        GroupMap::parse(&json, tree.dimension())?
    } else {
        GroupMap::identity(tree.feature_names())
    };
    let named_costs = match (named_costs, random_seed) {
        (_, Some(seed)) => {
            mf.seeds.push(seed);
            treednf::cost::random_costs(&groups.group_names, seed)
        }
        (Some(costs), None) => costs,
        (None, None) => {
            bail!(treednf::Error::InvalidConfig("provide --costs or --random-costs".into()))
        }
    };
    Ok(CostModel::new(groups, &named_costs)?)
}

/// Parses an importance CSV (feature,value,weight) into per-feature
/// weighted support lists.
fn parse_importance_csv(content: &str) -> Result<HashMap<String, Vec<(f64, f64)>>> {
    let mut out: HashMap<String, Vec<(f64, f64)>> = HashMap::new();
    for (i, line) in content.lines().enumerate() {
        if i == 0 || line.trim().is_empty() {
            continue;
        }
        let cells: Vec<&str> = line.split(',').collect();
        if cells.len() != 3 {
            bail!(treednf::Error::Schema(format!(
                "importance CSV line {i} has {} cells",
                cells.len()
            )));
        }
        let value: f64 = cells[1].trim().parse().context("bad importance value")?;
        let weight: f64 = cells[2].trim().parse().context("bad importance weight")?;
        out.entry(cells[0].trim().to_string()).or_default().push((value, weight));
    }
    Ok(out)
}
