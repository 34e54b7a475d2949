use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use hyperslice::feature::{FeatureSchema, FeatureKind};
use hyperslice::io::{read_csv, read_csv_columns, read_partition, read_schema, to_json, write_partition};
use hyperslice::positivity::{candidates_table, remove_slices, screen_positivity, PositivityConfig, RemovalReport, ViolationCandidate};
use hyperslice::render::render_svg;
use hyperslice::tree::build_partition;
use hyperslice::uniformity::uniformity_statistic;
use hyperslice::{Dataset, Error, PartitionConfig, PartitionModel, ProxyMethod};

#[derive(Parser)]
#[command(name = "hyperslice", version, about = "Density-based partitioning of tabular data into interpretable slices")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Partition a dataset and write the model as JSON.
    Partition {
        #[command(flatten)]
        input: DataArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Occupancy and uniformity statistics of a model on a dataset.
    Metrics {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        /// Defaults to the features stored in the model.
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Propose positivity-violating slices from treatment-conditioned partitions.
    ScreenPositivity {
        #[command(flatten)]
        input: DataArgs,
        #[command(flatten)]
        tree: TreeArgs,
        #[arg(long)]
        treatment: String,
        #[arg(long, default_value_t = 0.25)]
        sparsity_quantile: f64,
        #[arg(long, default_value_t = 5.0)]
        imbalance_ratio: f64,
        /// Candidates JSON.
        #[arg(long)]
        out: PathBuf,
        /// Text table; printed to stdout when omitted.
        #[arg(long)]
        table: Option<PathBuf>,
    },
    /// Draw a model over two numeric features as SVG.
    Render {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        schema: Option<PathBuf>,
        #[arg(long)]
        x: String,
        #[arg(long)]
        y: String,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    schema: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProxyKind {
    GowerKnn,
    Iforest,
}

#[derive(Args)]
struct TreeArgs {
    #[arg(long, default_value_t = 0.1)]
    min_l: f64,
    #[arg(long, default_value_t = 3)]
    p_star: usize,
    #[arg(long, default_value_t = 0.1)]
    min_support_frac: f64,
    #[arg(long, default_value_t = 0.001)]
    epsilon: f64,
    #[arg(long, value_enum, default_value_t = ProxyKind::GowerKnn)]
    proxy: ProxyKind,
    /// Neighbor rank; defaults to max(5, ceil(0.02 n)).
    #[arg(long)]
    knn_m: Option<usize>,
    #[arg(long, default_value_t = 100)]
    trees: usize,
    #[arg(long, default_value_t = 256)]
    subsample: usize,
    #[arg(long, default_value_t = 0.01)]
    trim: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.01)]
    min_mse_frac: f64,
}

impl TreeArgs {
    fn config(&self) -> PartitionConfig {
        PartitionConfig {
            p_star: self.p_star,
            min_l: self.min_l,
            min_slice_size_frac: self.min_support_frac,
            epsilon: self.epsilon,
            min_mse_decrease_frac: self.min_mse_frac,
            trim_fraction: self.trim,
            proxy: match self.proxy {
                ProxyKind::GowerKnn => ProxyMethod::GowerKnn { m: self.knn_m },
                ProxyKind::Iforest => ProxyMethod::IsolationForest {
                    trees: self.trees,
                    subsample: self.subsample,
                },
            },
            seed: self.seed,
        }
    }
}

#[derive(Serialize)]
struct ScreeningOutput<'a> {
    treatment: &'a str,
    config: PositivityConfig,
    candidates: &'a [ViolationCandidate],
    removal: RemovalReport,
}

enum Failure {
    Usage(String),
    Data(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e)
    }
}

fn model_schema(model: &PartitionModel) -> Vec<FeatureSchema> {
    model
        .space
        .domains()
        .iter()
        .map(|d| FeatureSchema {
            name: d.name.clone(),
            kind: d.kind,
            ordered_levels: (d.kind == FeatureKind::Ordered).then(|| d.ordered_levels.clone()),
        })
        .collect()
}

fn model_data(model: &PartitionModel, data: &Path, schema: Option<&Path>) -> Result<Dataset, Error> {
    match schema {
        Some(path) => read_csv(data, &read_schema(path)?),
        None => read_csv_columns(data, &model_schema(model)),
    }
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    fs::write(path, contents)?;
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Partition { input, tree, out } => {
            let data = read_csv(&input.data, &read_schema(&input.schema)?)?;
            let model = build_partition(&data, &tree.config())?;
            write_partition(&model, &out)?;
            eprintln!("wrote {} slices to {}", model.k(), out.display());
        }
        Command::Metrics {
            model,
            data,
            schema,
            out,
        } => {
            let model = read_partition(&model)?;
            let data = model_data(&model, &data, schema.as_deref())?;
            let json = to_json(&uniformity_statistic(&model, &data)?)?;
            match out {
                Some(path) => write(&path, &json)?,
                None => print!("{json}"),
            }
        }
        Command::ScreenPositivity {
            input,
            tree,
            treatment,
            sparsity_quantile,
            imbalance_ratio,
            out,
            table,
        } => {
            let data = read_csv(&input.data, &read_schema(&input.schema)?)?;
            let positivity = PositivityConfig {
                sparsity_quantile,
                imbalance_ratio,
            };
            let screening = screen_positivity(&data, &treatment, &tree.config(), &positivity)?;
            let (_, removal) = remove_slices(&data, screening.space(), &treatment, &screening.candidates)?;
            let json = to_json(&ScreeningOutput {
                treatment: &treatment,
                config: positivity,
                candidates: &screening.candidates,
                removal,
            })?;
            write(&out, &json)?;
            let text = candidates_table(&screening.candidates);
            match table {
                Some(path) => write(&path, &text)?,
                None => print!("{text}"),
            }
        }
        Command::Render {
            model,
            data,
            schema,
            x,
            y,
            out,
        } => {
            if x == y {
                return Err(Failure::Usage("--x and --y must name two different features".into()));
            }
            let model = read_partition(&model)?;
            let data = model_data(&model, &data, schema.as_deref())?;
            let svg = match render_svg(&model, &data, &x, &y) {
                Err(Error::NonRenderableFeature { feature }) => {
                    return Err(Failure::Usage(format!("feature `{feature}` is nominal and cannot be an axis")))
                }
                other => other?,
            };
            write(&out, &svg)?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Data(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
