//! Command-line entry point. Every file is written atomically, so a failed
//! command never leaves a partial artifact behind.

use std::ffi::OsString;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::features::{FeatureCombination, FeatureRecord};
use crate::gaze::{detect_fixations, FixationDetectorConfig, GazeSample, ObjectContext, Trial};
use crate::io;
use crate::learn::{self, full_grid, repeated_eval, ClassifierKind, Hyperparams, TrainedModel};
use crate::rng::derive;
use crate::service::{self, ModelStore, ServeConfig};
use crate::stats::{significance_csv, significance_table};
use crate::stream::{as_streamed, Session, WindowConfig};
use crate::synth::{generate_dataset, SynthConfig};

#[derive(Debug, Parser)]
#[command(name = "gaze-intent", version, about = "Grasp-vs-view intention recognition from gaze")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Detect fixations in a gaze stream (JSONL samples to JSONL fixations).
    Detect {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        detector: DetectorArgs,
    },
    /// Compute the feature dump of a trial dataset.
    Extract {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Generate a calibrated synthetic dataset into a directory.
    Synth {
        #[arg(long)]
        seed: u64,
        /// Trials per class on the training shapes.
        #[arg(long)]
        n: usize,
        /// Trials per class on the held-out shapes.
        #[arg(long, default_value_t = 30)]
        n_test: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Train one classifier on trials or a feature dump.
    Train {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        kind: ClassifierKind,
        #[arg(long, default_value = "c4")]
        combination: FeatureCombination,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        hyper: HyperArgs,
        /// Train on features of the trials replayed as gaze streams, matching
        /// what a live window sees. Requires a trial dataset.
        #[arg(long)]
        streamed: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated stratified cross-validation report (CSV).
    Eval {
        #[arg(long)]
        input: PathBuf,
        /// Held-out dataset scored by models trained on all of `input`.
        #[arg(long)]
        test2: Option<PathBuf>,
        /// `all` evaluates every combination with every classifier.
        #[arg(long, conflicts_with_all = ["combination", "kind"])]
        grid: Option<GridArg>,
        #[arg(long)]
        combination: Option<FeatureCombination>,
        #[arg(long)]
        kind: Option<ClassifierKind>,
        #[arg(long, default_value_t = 100)]
        repeats: usize,
        /// Cross-validation folds.
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long)]
        seed: u64,
        #[command(flatten)]
        hyper: HyperArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Between-task permutation F-tests per feature (CSV).
    Ftest {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 10_000)]
        permutations: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run a gaze stream through a streaming session (JSONL event log).
    Replay {
        #[arg(long)]
        input: PathBuf,
        /// JSON object context.
        #[arg(long)]
        context: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        window_ms: Option<f64>,
        #[arg(long)]
        hop_ms: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Start the websocket service.
    Serve {
        /// Full bind address; overrides `--port`.
        #[arg(long, env = "GAZE_INTENT_BIND")]
        bind: Option<SocketAddr>,
        /// Port on 127.0.0.1.
        #[arg(long, env = "GAZE_INTENT_PORT")]
        port: Option<u16>,
        /// Directory of model JSON files.
        #[arg(long)]
        models: Option<PathBuf>,
        /// Also train a C4 KNN default model on synthetic data with this seed.
        #[arg(long)]
        synthetic_seed: Option<u64>,
    },
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum GridArg {
    All,
}

#[derive(Debug, Args)]
struct DetectorArgs {
    #[arg(long, default_value_t = 3.01)]
    dispersion_deg: f64,
    #[arg(long, default_value_t = 30.0)]
    px_per_deg: f64,
    #[arg(long, default_value_t = 80.0)]
    dur_min_ms: f64,
    #[arg(long, default_value_t = 400.0)]
    dur_max_ms: f64,
    #[arg(long, default_value_t = 0.6)]
    min_confidence: f64,
}

impl DetectorArgs {
    fn config(&self) -> FixationDetectorConfig {
        FixationDetectorConfig {
            dispersion_max_deg: self.dispersion_deg,
            px_per_deg: self.px_per_deg,
            dur_min_ms: self.dur_min_ms,
            dur_max_ms: self.dur_max_ms,
            min_confidence: self.min_confidence,
        }
    }
}

#[derive(Debug, Args)]
struct HyperArgs {
    /// Neighbours for KNN.
    #[arg(long, default_value_t = 5)]
    neighbors: usize,
    #[arg(long, default_value_t = 200)]
    epochs: usize,
    #[arg(long, default_value_t = 5)]
    max_depth: usize,
}

impl HyperArgs {
    fn hyperparams(&self) -> Hyperparams {
        Hyperparams {
            knn_k: self.neighbors,
            epochs: self.epochs,
            max_depth: self.max_depth,
            ..Hyperparams::default()
        }
    }
}

/// Parses `argv` (program name first), runs the command and returns the exit status.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

/// Reads a dataset of trials or a feature dump, telling them apart by the
/// presence of a `fixations` field.
pub fn load_records(path: &Path) -> Result<Vec<FeatureRecord>> {
    let rows: Vec<serde_json::Value> = io::read_jsonl(path)?;
    let is_trials = rows.first().is_some_and(|r| r.get("fixations").is_some());
    rows.into_iter()
        .enumerate()
        .map(|(i, row)| {
            let parse = |e| Error::Parse {
                path: path.to_path_buf(),
                line: i + 1,
                source: e,
            };
            if is_trials {
                let trial: Trial = serde_json::from_value(row).map_err(parse)?;
                trial.validate_labeled()?;
                FeatureRecord::from_trial(&trial)
            } else {
                serde_json::from_value(row).map_err(parse)
            }
        })
        .collect()
}

/// Feature records of a trial dataset replayed through a streaming window.
pub fn load_streamed_records(path: &Path, config: &WindowConfig) -> Result<Vec<FeatureRecord>> {
    let trials: Vec<Trial> = io::read_jsonl(path)?;
    trials
        .iter()
        .map(|t| {
            t.validate_labeled()?;
            FeatureRecord::from_trial(&as_streamed(t, config)?)
        })
        .collect()
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Detect { input, out, detector } => {
            let samples: Vec<GazeSample> = io::read_jsonl(&input)?;
            let fixations = detect_fixations(&samples, &detector.config())?;
            io::write_jsonl(&out, &fixations)?;
            eprintln!("{} fixations from {} samples", fixations.len(), samples.len());
        }
        Command::Extract { input, out } => {
            let records = load_records(&input)?;
            io::write_jsonl(&out, &records)?;
            eprintln!("{} feature records", records.len());
        }
        Command::Synth { seed, n, n_test, out } => {
            let config = SynthConfig {
                n_per_class: n,
                n_test_per_class: n_test,
                ..SynthConfig::with_seed(seed)
            };
            let data = generate_dataset(&config)?;
            std::fs::create_dir_all(&out).map_err(|e| Error::io(&out, e))?;
            io::write_jsonl(out.join("train.jsonl"), &data.train)?;
            io::write_jsonl(out.join("test2.jsonl"), &data.test)?;
            io::write_json(out.join("manifest.json"), &data.manifest)?;
            eprintln!(
                "{} training and {} held-out trials in {}",
                data.train.len(),
                data.test.len(),
                out.display()
            );
        }
        Command::Train { input, kind, combination, seed, hyper, streamed, out } => {
            let records = if streamed {
                load_streamed_records(&input, &WindowConfig::default())?
            } else {
                load_records(&input)?
            };
            let hyper = hyper.hyperparams();
            hyper.validate()?;
            let model = learn::train(kind, combination, &records, &hyper, &mut derive(seed, 0))?;
            io::write_json(&out, &model)?;
            eprintln!("trained {kind} on {combination} with {} records", records.len());
        }
        Command::Eval { input, test2, grid, combination, kind, repeats, k, seed, hyper, out } => {
            let train = load_records(&input)?;
            let test = test2.as_deref().map(load_records).transpose()?;
            let cells = match (grid, combination, kind) {
                (Some(GridArg::All), _, _) | (None, None, None) => full_grid(),
                (None, c, kd) => {
                    let combos = c.map_or(FeatureCombination::ALL.to_vec(), |c| vec![c]);
                    let kinds = kd.map_or(ClassifierKind::ALL.to_vec(), |k| vec![k]);
                    combos
                        .iter()
                        .flat_map(|&c| kinds.iter().map(move |&k| (c, k)))
                        .collect()
                }
            };
            let hyper = hyper.hyperparams();
            let table = repeated_eval(&train, test.as_deref(), &cells, repeats, k, &hyper, seed)?;
            let csv = table.to_csv();
            io::write_atomic(&out, csv.as_bytes())?;
            eprint!("{csv}");
        }
        Command::Ftest { input, seed, permutations, out } => {
            let records = load_records(&input)?;
            let rows = significance_table(&records, permutations, seed)?;
            let csv = significance_csv(&rows);
            io::write_atomic(&out, csv.as_bytes())?;
            eprint!("{csv}");
        }
        Command::Replay { input, context, model, window_ms, hop_ms, out } => {
            let samples: Vec<GazeSample> = io::read_jsonl(&input)?;
            let context: ObjectContext = io::read_json(&context)?;
            let model = TrainedModel::load(&model)?;
            let defaults = WindowConfig::default();
            let config = WindowConfig {
                window_ms: window_ms.unwrap_or(defaults.window_ms),
                hop_ms: hop_ms.unwrap_or(defaults.hop_ms),
                ..defaults
            };
            let mut session = Session::new(context, Arc::new(model), config)?;
            let events = session.push_samples(&samples)?;
            io::write_jsonl(&out, &events)?;
            let fired = events.iter().filter(|e| e.fired).count();
            eprintln!("{} window events, {fired} fired", events.len());
        }
        Command::Serve { bind, port, models, synthetic_seed } => {
            let _ = tracing_subscriber::fmt()
                .with_writer(std::io::stderr)
                .try_init();
            let mut store = match models {
                Some(dir) => ModelStore::load_dir(dir)?,
                None => ModelStore::default(),
            };
            if let Some(seed) = synthetic_seed {
                store.add_synthetic_default(seed)?;
            }
            if store.is_empty() {
                return Err(Error::InvalidConfig(
                    "no models: pass --models DIR and/or --synthetic-seed N".into(),
                ));
            }
            let mut config = ServeConfig::default();
            if let Some(port) = port {
                config.bind.set_port(port);
            }
            if let Some(bind) = bind {
                config.bind = bind;
            }
            let runtime = tokio::runtime::Builder::new_multi_thread()
                .enable_all()
                .build()
                .map_err(|e| Error::Session(format!("cannot start runtime: {e}")))?;
            runtime.block_on(service::serve(config, Arc::new(store)))?;
        }
    }
    Ok(())
}
