//! Thin command-line wrapper around the `ddl` library.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use ddl::data::{self, DatasetSpec, SyntheticSpec};
use ddl::knn;
use ddl::train::{train_greedy, train_mm, TrainConfig};
use ddl::{ActivationKind, Error};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ddl",
    version,
    about = "Deep dictionary learning: train, extract features, evaluate",
    after_help = "Dataset strings:\n  \
        idx:<images>:<labels>[?opts]   MNIST-style IDX pair\n  \
        csv:<path>[?opts]              headered numeric CSV (rows = samples)\n  \
        <path>.csv                     shorthand for csv:<path>\n  \
        synth:<json>                   inline synthetic spec\n\
        Options: ?label=<col>&limit=<n>&scale=none"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Method {
    Mm,
    Greedy,
}

#[derive(Args)]
struct TrainOpts {
    /// Dictionary widths per level, e.g. 200,100,50
    #[arg(long, value_delimiter = ',', required = true)]
    layers: Vec<usize>,
    /// identity | tanh | sigmoid
    #[arg(long, default_value = "tanh", value_parser = parse_activation)]
    activation: ActivationKind,
    /// Outer iterations of the MM trainer
    #[arg(long, default_value_t = 100)]
    outer: usize,
    /// ALS passes at the deepest level per outer iteration
    #[arg(long, default_value_t = 10)]
    deepest: usize,
    /// Repeats of each middle-level update per outer iteration
    #[arg(long, default_value_t = 1)]
    middle: usize,
    /// ALS passes per level for the greedy baseline
    #[arg(long, default_value_t = 10)]
    mod_iters: usize,
    /// Early-stop tolerance on the relative objective change
    #[arg(long, default_value_t = 1e-6)]
    stop_tol: f64,
}

impl TrainOpts {
    fn config(&self) -> TrainConfig {
        let mut cfg = TrainConfig::new(self.layers.clone());
        cfg.activation = self.activation;
        cfg.outer_iters = self.outer;
        cfg.deepest_iters = self.deepest;
        cfg.middle_iters = self.middle;
        cfg.mod_iters = self.mod_iters;
        cfg.stop_rel_tol = self.stop_tol;
        cfg
    }
}

fn parse_activation(s: &str) -> Result<ActivationKind, String> {
    ActivationKind::from_name(s).map_err(|e| e.to_string())
}

#[derive(Subcommand)]
enum Cmd {
    /// Train a model and save it as a .ddlm file
    Train {
        /// Training dataset (see dataset strings below)
        #[arg(long)]
        input: String,
        #[command(flatten)]
        opts: TrainOpts,
        /// mm (joint) or greedy (layer-wise baseline)
        #[arg(long, value_enum, default_value = "mm")]
        method: Method,
        /// Output model path
        #[arg(long)]
        out: PathBuf,
        /// Optional per-iteration objective trace CSV
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Extract deepest-level features for a dataset
    Extract {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        input: String,
        /// Output CSV (one sample per row)
        #[arg(long)]
        out: PathBuf,
    },
    /// Nearest-neighbor evaluation of a trained model
    Eval {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        train: String,
        #[arg(long)]
        test: String,
        /// Neighbors to vote over
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Train both methods and print a comparison table
    Bench {
        #[arg(long)]
        train: String,
        #[arg(long)]
        test: String,
        #[command(flatten)]
        opts: TrainOpts,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Generate a synthetic dataset with known ground truth
    Synth {
        /// Inline JSON spec, e.g. '{"input_dim":50,"layer_atoms":[25,12],
        /// "n_samples":500,"activation":"tanh","coef_scale":0.8,
        /// "noise_sigma":0.0,"seed":42}'
        #[arg(long)]
        spec: String,
        /// Output CSV for the generated samples
        #[arg(long)]
        out: PathBuf,
        /// Where to store the ground-truth model
        #[arg(long)]
        truth: PathBuf,
    },
}

fn run(cli: Cli) -> Result<(), Error> {
    match cli.cmd {
        Cmd::Train {
            input,
            opts,
            method,
            out,
            trace,
        } => {
            let dataset = DatasetSpec::parse(&input)?.load()?;
            let cfg = opts.config();
            let (model, _feats, train_trace) = match method {
                Method::Mm => train_mm(&dataset.features, &cfg)?,
                Method::Greedy => train_greedy(&dataset.features, &cfg)?,
            };
            data::save_model(&model, &out)?;
            if let Some(trace_path) = trace {
                data::csv_io::write_trace_csv(&trace_path, &train_trace)?;
            }
            println!(
                "trained {} levels on {} samples in {:.2}s ({} iterations, final objective {:.6e})",
                model.n_levels(),
                dataset.features.cols(),
                train_trace.wall_seconds,
                train_trace.iters_run,
                train_trace.objective_per_outer.last().copied().unwrap_or(f64::NAN)
            );
            println!("model written to {}", out.display());
        }
        Cmd::Extract { model, input, out } => {
            let model = data::load_model(&model)?;
            let dataset = DatasetSpec::parse(&input)?.load()?;
            let feats = model.extractor()?.extract(&dataset.features)?;
            data::write_csv_matrix(&out, &feats.z, None)?;
            println!(
                "extracted {}-dimensional features for {} samples to {}",
                feats.z.rows(),
                feats.z.cols(),
                out.display()
            );
        }
        Cmd::Eval {
            model,
            train,
            test,
            k,
        } => {
            let model = data::load_model(&model)?;
            let train_set = DatasetSpec::parse(&train)?.load()?.into_labeled()?;
            let test_set = DatasetSpec::parse(&test)?.load()?.into_labeled()?;
            let report = knn::evaluate(&model, &train_set, &test_set, k)?;
            println!(
                "accuracy: {:.4} ({} correct of {})",
                report.accuracy,
                (report.accuracy * report.n_test as f64).round() as usize,
                report.n_test
            );
            print_confusion(&report.confusion);
        }
        Cmd::Bench {
            train,
            test,
            opts,
            k,
        } => {
            let train_set = DatasetSpec::parse(&train)?.load()?.into_labeled()?;
            let test_set = DatasetSpec::parse(&test)?.load()?.into_labeled()?;
            let report = ddl::bench::run_bench(&train_set, &test_set, &opts.config(), k)?;
            print!("{}", report.render());
        }
        Cmd::Synth { spec, out, truth } => {
            let spec: SyntheticSpec = serde_json::from_str(&spec).map_err(|e| Error::InvalidArg {
                op: "synth",
                detail: format!("bad spec JSON: {}", e),
            })?;
            let (x, truth_model, _z) = data::gen_synthetic(&spec)?;
            data::write_csv_matrix(&out, &x, None)?;
            data::save_model(&truth_model, &truth)?;
            println!(
                "generated {} samples of dimension {} to {} (ground truth in {})",
                x.cols(),
                x.rows(),
                out.display(),
                truth.display()
            );
        }
    }
    Ok(())
}

fn print_confusion(confusion: &[Vec<usize>]) {
    if confusion.is_empty() {
        return;
    }
    let n = confusion.len();
    print!("confusion (rows = true, cols = predicted)\n{:>8}", "");
    for j in 0..n {
        print!("{:>7}", j);
    }
    println!();
    for (i, row) in confusion.iter().enumerate() {
        print!("{:>8}", i);
        for &v in row {
            print!("{:>7}", v);
        }
        println!();
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version land here too; they are not failures.
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{}", e);
                return ExitCode::SUCCESS;
            }
            eprint!("{}", e);
            return ExitCode::from(1);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e);
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
