//! Subcommand implementations.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use reident_core::alluvial::{alluvial, AlluvialSpec, DEFAULT_MAX_SWEEPS};
use reident_core::community::{louvain_with_resolution, project_level, Dendrogram};
use reident_core::evaluation::{align, evaluate, GroundTruth};
use reident_core::heuristics::{cluster_h1, cluster_with_change, ChangeHeuristic};
use reident_core::hints::build_hint_graph;
use reident_core::ledger::{Address, Ledger};
use reident_core::partition::Partition;
use reident_core::simgen::{self, SimConfig};
use reident_core::WeightedGraph;

use crate::error::AppError;
use crate::formats;
use crate::manifest::RunManifest;
use crate::svg::render_alluvial_svg;

#[derive(Parser)]
#[command(
    name = "reident",
    version,
    about = "Bitcoin address clustering, user re-identification and evaluation toolkit"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Generate a synthetic ledger with exact ground truth.
    Generate(GenerateArgs),
    /// Cluster a ledger's addresses with one of the heuristics.
    Cluster(ClusterArgs),
    /// Compare partition files against a ground-truth labeling.
    Evaluate(EvaluateArgs),
    /// Export alluvial flow data (and optionally an SVG) for partitions.
    Alluvial(AlluvialArgs),
    /// Generate, cluster with every heuristic, evaluate and draw.
    Pipeline(PipelineArgs),
}

#[derive(Args, Clone)]
pub struct GenArgsCommon {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub users: u64,
    #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
    pub txs: u64,
    /// Probability that a recipient reuses one of their addresses.
    #[arg(long, default_value_t = 0.3)]
    pub addr_reuse_prob: f64,
    /// Probability that change goes to a fresh one-time address.
    #[arg(long, default_value_t = 0.7)]
    pub change_prob: f64,
    #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    pub fanout_max: u64,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(1..))]
    pub coinbase_every: u64,
}

impl GenArgsCommon {
    fn to_config(&self) -> SimConfig {
        SimConfig {
            seed: self.seed,
            users: self.users,
            txs: self.txs,
            addr_reuse_prob: self.addr_reuse_prob,
            change_prob: self.change_prob,
            fanout_max: self.fanout_max,
            coinbase_every: self.coinbase_every,
        }
    }
}

#[derive(Args)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub gen: GenArgsCommon,
    /// JSON config file instead of individual flags.
    #[arg(long, conflicts_with_all = [
        "seed", "users", "txs", "addr_reuse_prob", "change_prob", "fanout_max", "coinbase_every",
    ])]
    pub config: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
pub enum HeuristicChoice {
    H1,
    H2,
    H3,
    H4,
}

#[derive(Args)]
pub struct ClusterArgs {
    #[arg(long, value_enum)]
    pub heuristic: HeuristicChoice,
    /// A transaction adds hint edges only when its distinct recipient users
    /// number strictly fewer than this.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(usize))]
    pub max_recipients: usize,
    /// Use hint-edge transaction counts as weights during community
    /// detection instead of treating every edge as weight 1.
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    /// Write only this hierarchy level (1-based); default writes all.
    #[arg(long)]
    pub level: Option<usize>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    pub ledger: PathBuf,
}

#[derive(Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub gt: PathBuf,
    /// Drop ground-truth addresses a heuristic never clustered instead of
    /// scoring them as predicted singletons.
    #[arg(long)]
    pub drop_uncovered: bool,
    /// Directory for report.csv and the manifest; the table always prints.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(required = true)]
    pub partitions: Vec<PathBuf>,
}

#[derive(Args)]
pub struct AlluvialArgs {
    #[arg(long)]
    pub gt: PathBuf,
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_MAX_SWEEPS)]
    pub max_sweeps: usize,
    #[arg(long)]
    pub drop_uncovered: bool,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    #[arg(required = true)]
    pub partitions: Vec<PathBuf>,
}

#[derive(Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub gen: GenArgsCommon,
    #[arg(long, default_value_t = 10)]
    pub max_recipients: usize,
    #[arg(long)]
    pub weighted: bool,
    #[arg(long, default_value_t = 1.0)]
    pub resolution: f64,
    #[arg(long)]
    pub drop_uncovered: bool,
    /// SVG output path; defaults to alluvial.svg in the output directory.
    #[arg(long)]
    pub svg: Option<PathBuf>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

pub fn run(cli: Cli) -> Result<(), AppError> {
    match cli.command {
        Command::Generate(args) => cmd_generate(args),
        Command::Cluster(args) => cmd_cluster(args),
        Command::Evaluate(args) => cmd_evaluate(args),
        Command::Alluvial(args) => cmd_alluvial(args),
        Command::Pipeline(args) => cmd_pipeline(args),
    }
}

/// `SimConfig` as a JSON document; omitted fields take the defaults.
#[derive(Deserialize)]
#[serde(deny_unknown_fields, default)]
struct SimConfigFile {
    seed: u64,
    users: u64,
    txs: u64,
    addr_reuse_prob: f64,
    change_prob: f64,
    fanout_max: u64,
    coinbase_every: u64,
}

impl Default for SimConfigFile {
    fn default() -> Self {
        let d = SimConfig::default();
        SimConfigFile {
            seed: d.seed,
            users: d.users,
            txs: d.txs,
            addr_reuse_prob: d.addr_reuse_prob,
            change_prob: d.change_prob,
            fanout_max: d.fanout_max,
            coinbase_every: d.coinbase_every,
        }
    }
}

fn ensure_out_dir(dir: &Path) -> Result<(), AppError> {
    std::fs::create_dir_all(dir)?;
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> Result<(), AppError> {
    let config = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            let file: SimConfigFile = serde_json::from_str(&text)
                .map_err(|e| AppError::Usage(format!("{}: {e}", path.display())))?;
            SimConfig {
                seed: file.seed,
                users: file.users,
                txs: file.txs,
                addr_reuse_prob: file.addr_reuse_prob,
                change_prob: file.change_prob,
                fanout_max: file.fanout_max,
                coinbase_every: file.coinbase_every,
            }
        }
        None => args.gen.to_config(),
    };
    ensure_out_dir(&args.out)?;
    let (ledger, gt) = simgen::generate(&config)?;
    formats::write_ledger(&ledger, &args.out.join("ledger.jsonl"))?;
    formats::write_ground_truth_csv(&gt, &args.out.join("ground_truth.csv"))?;

    let mut manifest = RunManifest::new(&args.out);
    manifest.seed = Some(config.seed);
    if let Some(config_path) = &args.config {
        manifest.inputs.push(config_path.display().to_string());
    }
    manifest.write(&args.out)?;

    let summary = simgen::describe(&ledger, &gt);
    println!(
        "generated {} transactions, {} addresses, {} users (max {} addresses per user, {} single-address users)",
        summary.transactions,
        summary.distinct_addresses,
        summary.users,
        summary.max_addresses_per_user,
        summary.single_address_users
    );
    Ok(())
}

pub struct H4Output {
    pub dendrogram: Dendrogram,
    pub level_partitions: Vec<(usize, Partition)>,
}

/// Runs H4 over a ledger: H1, hint network, Louvain, projection. `level`
/// restricts the output to one hierarchy level.
pub fn run_h4(
    ledger: &Ledger,
    max_recipients: usize,
    weighted: bool,
    resolution: f64,
    level: Option<usize>,
) -> Result<(Partition, reident_core::HintGraph, H4Output), AppError> {
    let h1 = cluster_h1(ledger);
    let hints = build_hint_graph(ledger, &h1, max_recipients)?;
    let graph = WeightedGraph::from_hint_graph(&hints, weighted);
    let dendrogram = louvain_with_resolution(&graph, resolution)?;
    let levels: Vec<usize> = match level {
        Some(l) => vec![l],
        None => (1..=dendrogram.depth()).collect(),
    };
    let mut level_partitions = Vec::with_capacity(levels.len());
    for l in levels {
        level_partitions.push((l, project_level(&dendrogram, l, &h1)?));
    }
    Ok((
        h1,
        hints,
        H4Output {
            dendrogram,
            level_partitions,
        },
    ))
}

fn cmd_cluster(args: ClusterArgs) -> Result<(), AppError> {
    ensure_out_dir(&args.out)?;
    let ledger = formats::read_ledger(&args.ledger)?;

    let mut manifest = RunManifest::new(&args.out);
    manifest.inputs.push(args.ledger.display().to_string());

    match args.heuristic {
        HeuristicChoice::H1 | HeuristicChoice::H2 | HeuristicChoice::H3 => {
            let (name, partition) = match args.heuristic {
                HeuristicChoice::H1 => ("h1", cluster_h1(&ledger)),
                HeuristicChoice::H2 => ("h2", cluster_with_change(&ledger, ChangeHeuristic::H2)),
                HeuristicChoice::H3 => ("h3", cluster_with_change(&ledger, ChangeHeuristic::H3)),
                HeuristicChoice::H4 => unreachable!(),
            };
            let path = args.out.join(format!("{name}.partition.csv"));
            formats::write_partition_csv(&partition, &path)?;
            manifest.heuristic = Some(name.to_owned());
            manifest.write(&args.out)?;
            println!(
                "{name}: {} addresses in {} clusters -> {}",
                partition.len(),
                partition.cluster_count(),
                path.display()
            );
        }
        HeuristicChoice::H4 => {
            let (h1, hints, h4) = run_h4(
                &ledger,
                args.max_recipients,
                args.weighted,
                args.resolution,
                args.level,
            )?;
            formats::write_hint_graph(
                &hints,
                &args.out.join("hints.edges"),
                &args.out.join("hints.isolates"),
            )?;
            for (level, partition) in &h4.level_partitions {
                formats::write_partition_csv(
                    partition,
                    &args.out.join(format!("h4.l{level}.csv")),
                )?;
                formats::write_user_level_csv(
                    &h4.dendrogram.levels()[level - 1].assignment,
                    &args.out.join(format!("h4.users.l{level}.csv")),
                )?;
            }
            formats::write_dendrogram_summary(&h4.dendrogram, &args.out.join("h4.summary.json"))?;
            manifest.heuristic = Some("h4".to_owned());
            manifest.flags.max_recipients = Some(args.max_recipients);
            manifest.flags.weighted = Some(args.weighted);
            manifest.flags.resolution = Some(args.resolution);
            manifest.flags.level = args.level;
            manifest.write(&args.out)?;
            println!(
                "h4: {} users, {} hint edges, {} levels",
                h1.cluster_count(),
                hints.edge_count(),
                h4.dendrogram.depth()
            );
            for (level, partition) in &h4.level_partitions {
                println!(
                    "  level {level}: {} clusters, modularity {:.4}",
                    partition.cluster_count(),
                    h4.dendrogram.levels()[level - 1].modularity
                );
            }
        }
    }
    Ok(())
}

fn stem_of(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<(), AppError> {
    let gt = formats::read_ground_truth_csv(&args.gt).map_err(|e| AppError::Data(e.to_string()))?;
    let mut named = Vec::new();
    for path in &args.partitions {
        let partition =
            formats::read_partition_csv(path).map_err(|e| AppError::Data(e.to_string()))?;
        named.push((stem_of(path), partition));
    }
    let runs: Vec<(&str, &Partition)> = named.iter().map(|(name, p)| (name.as_str(), p)).collect();
    let rows = evaluate(&gt, &runs, args.drop_uncovered)?;
    print!("{}", formats::format_eval_table(&rows));
    if let Some(out) = &args.out {
        ensure_out_dir(out)?;
        formats::write_eval_csv(&rows, &out.join("report.csv"))?;
        let mut manifest = RunManifest::new(out);
        manifest.inputs.push(args.gt.display().to_string());
        manifest
            .inputs
            .extend(args.partitions.iter().map(|p| p.display().to_string()));
        manifest.flags.drop_uncovered = Some(args.drop_uncovered);
        manifest.write(out)?;
    }
    Ok(())
}

/// Builds the shared-universe axes for an alluvial diagram: the ground truth
/// first, then each predicted partition aligned to it.
pub fn alluvial_axes(
    gt: &GroundTruth,
    predictions: &[(String, Partition)],
    drop_uncovered: bool,
    max_sweeps: usize,
) -> Result<(Vec<(String, Partition)>, AlluvialSpec), AppError> {
    // With drop_uncovered the shared universe is the intersection of the
    // ground truth with every prediction; otherwise it is the full labeled
    // set and uncovered addresses appear as predicted-side singletons.
    let kept: Vec<(Address, String)> = gt
        .iter()
        .filter(|(addr, _)| !drop_uncovered || predictions.iter().all(|(_, p)| p.contains(addr)))
        .map(|(a, l)| (a.clone(), l.to_owned()))
        .collect();
    if kept.is_empty() {
        return Err(AppError::Data(
            "no ground-truth address is covered by all partitions".to_owned(),
        ));
    }
    let restricted = GroundTruth::new(kept).expect("ground-truth entries are unique and non-empty");
    let mut axes: Vec<(String, Partition)> = vec![("gt".to_owned(), restricted.partition())];
    for (name, partition) in predictions {
        let (_, aligned) = align(&restricted, partition, false)?;
        axes.push((name.clone(), aligned));
    }
    let refs: Vec<(&str, &Partition)> = axes.iter().map(|(name, p)| (name.as_str(), p)).collect();
    let mut spec = alluvial(&refs, max_sweeps)?;
    relabel_gt_axis(&mut spec, &restricted);
    Ok((axes, spec))
}

/// Ground-truth clusters are user labels; show them instead of numeric ids.
fn relabel_gt_axis(spec: &mut AlluvialSpec, gt: &GroundTruth) {
    let partition = gt.partition();
    let mut label_of_cluster = vec![String::new(); partition.cluster_count()];
    for (addr, cluster) in partition.iter() {
        let slot = &mut label_of_cluster[cluster.0 as usize];
        if slot.is_empty() {
            if let Some(label) = gt.label_of(addr) {
                *slot = label.to_owned();
            }
        }
    }
    if let Some(axis) = spec.axes.first_mut() {
        for cluster in &mut axis.clusters {
            let label = &label_of_cluster[cluster.id.0 as usize];
            if !label.is_empty() {
                cluster.label = label.clone();
            }
        }
    }
}

fn cmd_alluvial(args: AlluvialArgs) -> Result<(), AppError> {
    let gt = formats::read_ground_truth_csv(&args.gt).map_err(|e| AppError::Data(e.to_string()))?;
    let mut predictions = Vec::new();
    for path in &args.partitions {
        let partition =
            formats::read_partition_csv(path).map_err(|e| AppError::Data(e.to_string()))?;
        predictions.push((stem_of(path), partition));
    }
    let (_, spec) = alluvial_axes(&gt, &predictions, args.drop_uncovered, args.max_sweeps)?;
    ensure_out_dir(&args.out)?;
    formats::write_alluvial_json(&spec, &args.out.join("alluvial.json"))?;
    if let Some(svg_path) = &args.svg {
        let svg = render_alluvial_svg(&spec).map_err(|e| AppError::Data(e.to_string()))?;
        std::fs::write(svg_path, svg)?;
    }
    let mut manifest = RunManifest::new(&args.out);
    manifest.inputs.push(args.gt.display().to_string());
    manifest
        .inputs
        .extend(args.partitions.iter().map(|p| p.display().to_string()));
    manifest.flags.drop_uncovered = Some(args.drop_uncovered);
    manifest.write(&args.out)?;
    println!(
        "alluvial: {} axes, {} flows, {} crossings",
        spec.axes.len(),
        spec.flows.len(),
        spec.crossing_count()
    );
    Ok(())
}

fn cmd_pipeline(args: PipelineArgs) -> Result<(), AppError> {
    ensure_out_dir(&args.out)?;
    let config = args.gen.to_config();

    let (ledger, gt) = simgen::generate(&config)?;
    formats::write_ledger(&ledger, &args.out.join("ledger.jsonl"))?;
    formats::write_ground_truth_csv(&gt, &args.out.join("ground_truth.csv"))?;

    let h2 = cluster_with_change(&ledger, ChangeHeuristic::H2);
    let h3 = cluster_with_change(&ledger, ChangeHeuristic::H3);
    let (h1, hints, h4) = run_h4(
        &ledger,
        args.max_recipients,
        args.weighted,
        args.resolution,
        None,
    )?;

    formats::write_partition_csv(&h1, &args.out.join("h1.partition.csv"))?;
    formats::write_partition_csv(&h2, &args.out.join("h2.partition.csv"))?;
    formats::write_partition_csv(&h3, &args.out.join("h3.partition.csv"))?;
    formats::write_hint_graph(
        &hints,
        &args.out.join("hints.edges"),
        &args.out.join("hints.isolates"),
    )?;
    for (level, partition) in &h4.level_partitions {
        formats::write_partition_csv(partition, &args.out.join(format!("h4.l{level}.csv")))?;
        formats::write_user_level_csv(
            &h4.dendrogram.levels()[level - 1].assignment,
            &args.out.join(format!("h4.users.l{level}.csv")),
        )?;
    }
    formats::write_dendrogram_summary(&h4.dendrogram, &args.out.join("h4.summary.json"))?;

    let mut runs: Vec<(String, &Partition)> = vec![
        ("h1".to_owned(), &h1),
        ("h2".to_owned(), &h2),
        ("h3".to_owned(), &h3),
    ];
    for (level, partition) in &h4.level_partitions {
        runs.push((format!("h4-l{level}"), partition));
    }
    let run_refs: Vec<(&str, &Partition)> =
        runs.iter().map(|(name, p)| (name.as_str(), *p)).collect();
    let rows = evaluate(&gt, &run_refs, args.drop_uncovered)?;
    print!("{}", formats::format_eval_table(&rows));
    formats::write_eval_csv(&rows, &args.out.join("report.csv"))?;

    // Three axes in the style of the reference figures: truth, the
    // common-input baseline and a mid-level community partition.
    let chosen = h4
        .level_partitions
        .iter()
        .find(|(l, _)| *l == 2.min(h4.dendrogram.depth()))
        .or_else(|| h4.level_partitions.first())
        .expect("louvain produces at least one level");
    let predictions = vec![
        ("h1".to_owned(), h1.clone()),
        (format!("h4-l{}", chosen.0), chosen.1.clone()),
    ];
    let (_, spec) = alluvial_axes(&gt, &predictions, args.drop_uncovered, DEFAULT_MAX_SWEEPS)?;
    formats::write_alluvial_json(&spec, &args.out.join("alluvial.json"))?;
    let svg_path = args
        .svg
        .clone()
        .unwrap_or_else(|| args.out.join("alluvial.svg"));
    let svg = render_alluvial_svg(&spec).map_err(|e| AppError::Data(e.to_string()))?;
    std::fs::write(&svg_path, svg)?;

    let mut manifest = RunManifest::new(&args.out);
    manifest.seed = Some(config.seed);
    manifest.flags.max_recipients = Some(args.max_recipients);
    manifest.flags.weighted = Some(args.weighted);
    manifest.flags.resolution = Some(args.resolution);
    manifest.flags.drop_uncovered = Some(args.drop_uncovered);
    manifest.write(&args.out)?;

    println!(
        "pipeline complete: {} transactions, {} users, {} hierarchy levels -> {}",
        ledger.len(),
        gt.partition().cluster_count(),
        h4.dendrogram.depth(),
        args.out.display()
    );
    Ok(())
}
