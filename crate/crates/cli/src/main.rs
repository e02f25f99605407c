use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use hyqgnn::baseline::{self, importance_svg, write_importance_csv, GbdtModel};
use hyqgnn::featurize::{
    featurize_structure, write_dataset_csv, write_graphs_json, EwaldConfig, FeaturizedGraph,
};
use hyqgnn::harness::{
    emit_parity_plot, load_checkpoint, load_dataset, predict_with_checkpoint, r2_report,
    read_parity_csv, run_baseline, synthetic_structures, train, write_run_artifacts, ModelKind,
    RunConfig, DEFAULT_SYNTHETIC_SIZE,
};
use hyqgnn::structure::{read_structures, write_structures};

/// Hybrid quantum-classical GNN for perovskite formation energies.
#[derive(Parser)]
#[command(name = "hyqgnn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Turn a JSON list of ABO3 structures into a featurized dataset.
    Featurize {
        /// Structures JSON.
        input: PathBuf,
        /// Output dataset JSON.
        #[arg(short, long)]
        out: PathBuf,
        /// Also write the flattened 75-column table here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Drop edges longer than this many Å.
        #[arg(long)]
        cutoff: Option<f64>,
        /// Ewald relative accuracy.
        #[arg(long, default_value_t = 1e-5)]
        accuracy: f64,
    },
    /// Train a hybrid or classical model and persist the run.
    Train(TrainArgs),
    /// Fit the boosted-tree baseline and write its importance report.
    Baseline(TrainArgs),
    /// Importance report from a saved boosted-tree model.
    Importance {
        model: PathBuf,
        /// CSV output.
        #[arg(short, long)]
        out: PathBuf,
        /// SVG bar chart output.
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long, default_value_t = 20)]
        top: usize,
    },
    /// Score a checkpoint (or saved tree model) on a dataset.
    Evaluate {
        /// checkpoint.json from `train`, or model.json from `baseline`.
        model: PathBuf,
        dataset: PathBuf,
        /// Write a parity plot (and CSV sidecar) here.
        #[arg(long)]
        plot: Option<PathBuf>,
    },
    /// Redraw a parity plot from a CSV of true,predicted pairs.
    Plot {
        pairs: PathBuf,
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write the deterministic synthetic dataset.
    GenSynthetic {
        #[arg(long, default_value_t = DEFAULT_SYNTHETIC_SIZE)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output directory for structures.json, dataset.json and dataset.csv.
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// TOML run configuration; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Artifacts directory.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, value_parser = ["hybrid", "classical", "gbdt"])]
    model: Option<String>,
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    hidden: Option<usize>,
    #[arg(long)]
    layers: Option<usize>,
    /// Train, validation and test counts, e.g. 196,25,25.
    #[arg(long, value_parser = parse_split)]
    split: Option<[usize; 3]>,
}

fn parse_split(text: &str) -> Result<[usize; 3], String> {
    let parts: Vec<usize> = text
        .split(',')
        .map(|p| p.trim().parse::<usize>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|v: Vec<usize>| format!("expected three counts, got {}", v.len()))
}

impl TrainArgs {
    fn resolve(&self, default_model: ModelKind) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                RunConfig::from_toml(&text)?
            }
            None => RunConfig {
                model: default_model,
                ..Default::default()
            },
        };
        if let Some(m) = &self.model {
            cfg.model = m.parse()?;
        }
        if let Some(b) = self.budget {
            cfg.budget = b;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
            cfg.gbdt.seed = s;
        }
        if let Some(h) = self.hidden {
            cfg.hidden = h;
        }
        if let Some(l) = self.layers {
            cfg.layers = l;
        }
        if let Some(split) = self.split {
            cfg.split_sizes = split;
        }
        if self.dataset.is_some() {
            cfg.dataset = self.dataset.clone();
        }
        if self.out.is_some() {
            cfg.output_dir = self.out.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn dataset_of(cfg: &RunConfig) -> Result<Vec<FeaturizedGraph>> {
    let Some(path) = &cfg.dataset else {
        bail!("no dataset given (use --dataset or set `dataset` in the config)");
    };
    let data = load_dataset(path).with_context(|| format!("loading {}", path.display()))?;
    eprintln!("loaded {} records from {}", data.len(), path.display());
    Ok(data)
}

fn output_dir(cfg: &RunConfig) -> PathBuf {
    cfg.output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("runs/{}-seed{}", cfg.model, cfg.seed)))
}

fn print_r2(label: &str, true_vals: &[f64], predicted: &[f64]) {
    match r2_report(true_vals, predicted) {
        Ok(r) => println!("{label}: R2 fit {:.4}, identity {:.4}", r.fit, r.identity),
        Err(e) => println!("{label}: R2 n/a ({e})"),
    }
}

fn cmd_train(cfg: RunConfig) -> Result<()> {
    if cfg.model == ModelKind::Gbdt {
        return cmd_baseline(cfg);
    }
    let data = dataset_of(&cfg)?;
    let run = train(&cfg, &data)?;
    let dir = output_dir(&cfg);
    write_run_artifacts(&run, &dir)?;
    println!(
        "{} ({}), {} evaluations, best validation MSE {:.4} at iteration {}",
        cfg.model,
        run.algorithm,
        run.loss_history.len(),
        run.val_history[run.best_iteration],
        run.best_iteration + 1
    );
    let (t, p): (Vec<f64>, Vec<f64>) = run.test_predictions.iter().copied().unzip();
    print_r2("test", &t, &p);
    println!("artifacts in {}", dir.display());
    Ok(())
}

fn cmd_baseline(mut cfg: RunConfig) -> Result<()> {
    cfg.model = ModelKind::Gbdt;
    let data = dataset_of(&cfg)?;
    let run = run_baseline(&cfg, &data)?;
    let dir = output_dir(&cfg);
    fs::create_dir_all(&dir)?;
    fs::write(dir.join("config.toml"), cfg.to_toml())?;
    run.model.save(dir.join("model.json"))?;
    write_importance_csv(dir.join("importance.csv"), &run.importances)?;
    fs::write(dir.join("importance.svg"), importance_svg(&run.importances, 20))?;
    emit_parity_plot(&run.test_predictions, dir.join("parity.svg"))?;
    let report = serde_json::json!({
        "model": "gbdt",
        "seed": cfg.seed,
        "n_trees": run.model.trees.len(),
        "n_test": run.test_predictions.len(),
        "r2_fit": run.r2.map(|r| r.fit),
        "r2_identity": run.r2.map(|r| r.identity),
    });
    fs::write(dir.join("report.json"), serde_json::to_string_pretty(&report)?)?;
    let (t, p): (Vec<f64>, Vec<f64>) = run.test_predictions.iter().copied().unzip();
    print_r2("test", &t, &p);
    for (name, share) in run.importances.iter().take(5) {
        println!("  {name:<36} {share:.4}");
    }
    println!("artifacts in {}", dir.display());
    Ok(())
}

fn cmd_featurize(
    input: &Path,
    out: &Path,
    csv: Option<&Path>,
    cutoff: Option<f64>,
    accuracy: f64,
) -> Result<()> {
    let structures =
        read_structures(input).with_context(|| format!("reading {}", input.display()))?;
    let cfg = EwaldConfig {
        relative_accuracy: accuracy,
        ..Default::default()
    };
    let graphs = structures
        .iter()
        .enumerate()
        .map(|(i, s)| featurize_structure(s, &cfg, cutoff).with_context(|| format!("structure {i}")))
        .collect::<Result<Vec<_>>>()?;
    write_graphs_json(out, &graphs)?;
    if let Some(csv) = csv {
        write_dataset_csv(csv, &graphs)?;
    }
    println!("featurized {} structures into {}", graphs.len(), out.display());
    Ok(())
}

fn cmd_evaluate(model: &Path, dataset: &Path, plot: Option<&Path>) -> Result<()> {
    let data = load_dataset(dataset)?;
    let text = fs::read_to_string(model).with_context(|| format!("reading {}", model.display()))?;
    let predicted = if let Ok(gbdt) = serde_json::from_str::<GbdtModel>(&text) {
        data.iter()
            .map(|g| gbdt.predict(&hyqgnn::flatten_graph(g)))
            .collect::<Result<Vec<_>, _>>()?
    } else {
        predict_with_checkpoint(&load_checkpoint(model)?, &data)?
    };
    let truth: Vec<f64> = data.iter().filter_map(|g| g.target).collect();
    let mse = truth
        .iter()
        .zip(&predicted)
        .map(|(t, p)| (t - p) * (t - p))
        .sum::<f64>()
        / truth.len().max(1) as f64;
    println!("{} records, MSE {mse:.6} eV^2", truth.len());
    print_r2("dataset", &truth, &predicted);
    if let Some(path) = plot {
        let pairs: Vec<(f64, f64)> = truth.into_iter().zip(predicted).collect();
        emit_parity_plot(&pairs, path)?;
    }
    Ok(())
}

fn cmd_gen_synthetic(n: usize, seed: u64, out: &Path) -> Result<()> {
    fs::create_dir_all(out)?;
    let structures = synthetic_structures(n, seed);
    write_structures(out.join("structures.json"), &structures)?;
    let cfg = EwaldConfig::default();
    let graphs = structures
        .iter()
        .map(|s| featurize_structure(s, &cfg, None))
        .collect::<Result<Vec<_>, _>>()?;
    write_graphs_json(out.join("dataset.json"), &graphs)?;
    write_dataset_csv(out.join("dataset.csv"), &graphs)?;
    println!("wrote {n} synthetic records to {}", out.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Featurize {
            input,
            out,
            csv,
            cutoff,
            accuracy,
        } => cmd_featurize(&input, &out, csv.as_deref(), cutoff, accuracy),
        Command::Train(args) => cmd_train(args.resolve(ModelKind::Hybrid)?),
        Command::Baseline(args) => cmd_baseline(args.resolve(ModelKind::Gbdt)?),
        Command::Importance {
            model,
            out,
            svg,
            top,
        } => {
            let model = GbdtModel::load(&model)?;
            let ranked = baseline::feature_importances(&model, &hyqgnn::featurize::column_names());
            write_importance_csv(&out, &ranked)?;
            if let Some(svg) = svg {
                fs::write(svg, importance_svg(&ranked, top))?;
            }
            for (name, share) in ranked.iter().take(top.min(10)) {
                println!("{name:<36} {share:.4}");
            }
            Ok(())
        }
        Command::Evaluate {
            model,
            dataset,
            plot,
        } => cmd_evaluate(&model, &dataset, plot.as_deref()),
        Command::Plot { pairs, out } => {
            let pairs = read_parity_csv(&pairs)?;
            emit_parity_plot(&pairs, &out)?;
            println!("plotted {} pairs to {}", pairs.len(), out.display());
            Ok(())
        }
        Command::GenSynthetic { n, seed, out } => cmd_gen_synthetic(n, seed, &out),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
