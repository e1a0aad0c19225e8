//! `nate`: parse, type-check, slice, label, train and evaluate type-error
//! localization models for λML.

use std::fs::{self, File};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use log::info;

use nate_core::features::{extract, write_csv, FeatureSet, SCHEMA_VERSION};
use nate_core::harness::{
    blame, cross_validate, generate_corpus, run_pipeline_with_model, CorpusSpec, PipelineConfig,
    STANDARD_SEED,
};
use nate_core::labeler::{diff_programs, read_corpus, write_corpus, OutlierPolicy, ProgramPair};
use nate_core::lang::{parse, sexpr, Program};
use nate_core::models::{load, save, ModelHeader, ModelKind, TrainConfig};
use nate_core::slicer::{minimal_slices, verify_slice};
use nate_core::typecheck::infer_partial;

#[derive(Parser)]
#[command(name = "nate", version, about = "Learning to localize type errors")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print the syntax tree, one `id kind span` line per node.
    Parse { file: PathBuf },
    /// Print the root type or every type error.
    Check { file: PathBuf },
    /// Print a minimal slice per type error.
    Slice {
        file: PathBuf,
        /// Re-run the hole oracle on each slice.
        #[arg(long)]
        verify: bool,
    },
    /// Print the changed nodes of the ill-typed program and the diff fraction.
    Diff { bad: PathBuf, fix: PathBuf },
    /// Write feature vectors for a corpus as CSV.
    Extract {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long)]
        no_slice_filter: bool,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Train a model on a corpus and write it to a file.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "tree")]
        model: ModelKind,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Rank the likely culprits of a type error with a trained model.
    Blame {
        file: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
        k: u8,
        /// Print JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Cross-validate (or hold out) a model kind on a corpus.
    Eval {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, default_value = "tree")]
        model: ModelKind,
        /// Number of folds; 1 uses a single held-out split.
        #[arg(long, default_value_t = 10)]
        folds: usize,
        /// Count spans that overlap a changed node as correct.
        #[arg(long)]
        span_overlap: bool,
        /// Print JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
    /// Generate a synthetic corpus of (ill-typed, fixed) pairs.
    Gen {
        #[arg(long, default_value_t = 2000)]
        pairs: usize,
        #[arg(long, default_value_t = STANDARD_SEED)]
        seed: u64,
        /// Share of pairs with a wholesale rewrite instead of one mutation.
        #[arg(long, default_value_t = 0.0)]
        rewrite_fraction: f64,
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, default_value = "all")]
    features: FeatureSet,
    #[arg(long)]
    no_slice_filter: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value = "fixed:0.4")]
    threshold: OutlierPolicy,
    #[arg(long)]
    epochs: Option<usize>,
    /// Train 8 epochs with the slice filter and 1 without.
    #[arg(long)]
    balance_samples: bool,
    #[arg(long)]
    workers: Option<usize>,
}

impl CommonArgs {
    fn config(&self, model: ModelKind) -> PipelineConfig {
        let mut train = TrainConfig::default();
        if let Some(e) = self.epochs {
            train.epochs = e;
        }
        PipelineConfig {
            model,
            train,
            features: self.features,
            filter_slice: !self.no_slice_filter,
            outliers: self.threshold,
            seed: self.seed,
            balance_samples: self.balance_samples,
            workers: self.workers,
            ..PipelineConfig::default()
        }
    }
}

fn read_program(path: &Path) -> Result<Program> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse(&src).with_context(|| format!("parsing {}", path.display()))
}

fn read_pairs(path: &Path) -> Result<Vec<ProgramPair>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let pairs = read_corpus(BufReader::new(file))?;
    info!("read {} pairs from {}", pairs.len(), path.display());
    Ok(pairs)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("creating {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn run(cli: Cli) -> Result<()> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::Parse { file } => write!(stdout, "{}", sexpr(&read_program(&file)?))?,
        Command::Check { file } => {
            let p = read_program(&file)?;
            let d = infer_partial(&p);
            if d.well_typed {
                writeln!(stdout, "well-typed: {}", d.root_type())?;
            } else {
                for e in &d.errors {
                    writeln!(stdout, "{e}")?;
                }
            }
        }
        Command::Slice { file, verify } => {
            let p = read_program(&file)?;
            let slices = minimal_slices(&p)?;
            let mut failed = false;
            for s in &slices {
                let nodes: Vec<String> = s
                    .nodes
                    .iter()
                    .map(|&id| {
                        let span = p.span(id).unwrap_or_default();
                        format!("{id}@{}..{}", span.start, span.end)
                    })
                    .collect();
                let mut line = format!("error {}: {}", s.error_index, nodes.join(" "));
                if !s.minimal {
                    line.push_str(" (budget exhausted)");
                }
                if verify {
                    let check = verify_slice(&p, s);
                    failed |= !check.passed();
                    line.push_str(if check.passed() { " [pass]" } else { " [FAIL]" });
                }
                writeln!(stdout, "{line}")?;
            }
            if failed {
                bail!("slice verification failed");
            }
        }
        Command::Diff { bad, fix } => {
            let labels = diff_programs(&read_program(&bad)?, &read_program(&fix)?);
            let ids: Vec<String> = labels.changed.iter().map(|i| i.to_string()).collect();
            writeln!(stdout, "changed: {}", ids.join(" "))?;
            writeln!(stdout, "diff_fraction: {:.4}", labels.diff_fraction)?;
        }
        Command::Extract {
            corpus,
            no_slice_filter,
            out,
        } => {
            let pairs = read_pairs(&corpus)?;
            let mut samples = Vec::new();
            for (i, pair) in pairs.iter().enumerate() {
                let slices = minimal_slices(&pair.bad)?;
                let labels = nate_core::labeler::tree_diff(pair);
                samples.extend(
                    extract(pair, &slices, &labels, !no_slice_filter)
                        .into_iter()
                        .map(|mut s| {
                            s.program = i;
                            s
                        }),
                );
            }
            let mut w = output(out.as_deref())?;
            write_csv(&mut w, &samples)?;
            w.flush()?;
        }
        Command::Train { common, model, out } => {
            let mut cfg = common.config(model);
            cfg.holdout_fraction = 0.0;
            let (report, trained) = run_pipeline_with_model(read_pairs(&common.corpus)?, &cfg)?;
            let header = ModelHeader {
                schema: SCHEMA_VERSION.to_string(),
                features: cfg.features.to_string(),
            };
            fs::write(&out, save(&trained, &header))
                .with_context(|| format!("writing {}", out.display()))?;
            writeln!(
                stdout,
                "trained {} on {} samples; training-set top-1 {:.3}; wrote {}",
                model,
                report.train_samples,
                report.top1,
                out.display()
            )?;
        }
        Command::Blame {
            file,
            model,
            k,
            json,
        } => {
            let bytes = fs::read(&model).with_context(|| format!("reading {}", model.display()))?;
            let (trained, header) = load(&bytes)?;
            if header.schema != SCHEMA_VERSION {
                bail!(
                    "model schema {} does not match {}",
                    header.schema,
                    SCHEMA_VERSION
                );
            }
            let features: FeatureSet = header.features.parse().map_err(anyhow::Error::msg)?;
            let p = read_program(&file)?;
            let report = blame(&trained, features, &p, k as usize)?;
            if json {
                writeln!(stdout, "{}", serde_json::to_string_pretty(&report)?)?;
            } else {
                for (rank, e) in report.entries.iter().enumerate() {
                    let text = p.source().get(e.span.start..e.span.end).unwrap_or("");
                    let text = text.split_whitespace().collect::<Vec<_>>().join(" ");
                    writeln!(
                        stdout,
                        "{}. node {} ({:.3}) {}..{}: {}",
                        rank + 1,
                        e.node,
                        e.confidence,
                        e.span.start,
                        e.span.end,
                        text
                    )?;
                }
            }
        }
        Command::Eval {
            common,
            model,
            folds,
            span_overlap,
            json,
        } => {
            let mut cfg = common.config(model);
            cfg.span_overlap = span_overlap;
            let pairs = read_pairs(&common.corpus)?;
            let report = if folds <= 1 {
                nate_core::harness::run_pipeline(pairs, &cfg)?
            } else {
                cross_validate(pairs, &cfg, folds)?.mean
            };
            if json {
                writeln!(stdout, "{}", report.to_json())?;
            } else {
                write!(stdout, "{}", report.to_table())?;
            }
        }
        Command::Gen {
            pairs,
            seed,
            rewrite_fraction,
            out,
        } => {
            let spec = CorpusSpec {
                pairs,
                rewrite_fraction,
                ..CorpusSpec::standard()
            };
            let corpus = generate_corpus(&spec, seed);
            let mut w = output(out.as_deref())?;
            write_corpus(&mut w, &corpus)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        let broken_pipe = e
            .downcast_ref::<io::Error>()
            .is_some_and(|e| e.kind() == io::ErrorKind::BrokenPipe);
        if broken_pipe {
            return;
        }
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}
