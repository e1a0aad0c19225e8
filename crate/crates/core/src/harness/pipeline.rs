use std::collections::BTreeSet;
use std::fmt::Write as _;

use log::{debug, info};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::features::{extract_program, FeatureSet};
use crate::labeler::{filter_outliers, tree_diff, BlameLabels, OutlierPolicy, ProgramPair};
use crate::lang::NodeId;
use crate::models::{Dataset, Model, ModelKind, TrainConfig};
use crate::slicer::{minimal_slices, ErrorSlice};
use crate::typecheck::{infer_partial, PartialDerivation};

use super::blame::{baseline_random_from, first_error_from, is_hit, rank_program, BlameReport};
use super::metrics::recall;
use super::HarnessError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineConfig {
    pub model: ModelKind,
    pub train: TrainConfig,
    pub features: FeatureSet,
    /// Keep only slice members, both for training and for ranking.
    pub filter_slice: bool,
    #[serde(serialize_with = "display")]
    pub outliers: OutlierPolicy,
    /// Share of programs held out by [`run_pipeline`]; 0 evaluates on the
    /// training programs.
    pub holdout_fraction: f64,
    pub seed: u64,
    /// Count a prediction as correct when its span overlaps a changed node.
    pub span_overlap: bool,
    /// Train for 8 epochs with the slice filter and 1 without, so that both
    /// settings see a similar number of samples.
    pub balance_samples: bool,
    /// Thread count; `None` uses the global pool.
    pub workers: Option<usize>,
}

fn display<S: serde::Serializer, T: std::fmt::Display>(t: &T, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(t)
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            model: ModelKind::Tree,
            train: TrainConfig::default(),
            features: FeatureSet::ALL,
            filter_slice: true,
            outliers: OutlierPolicy::default(),
            holdout_fraction: 0.2,
            seed: 0,
            span_overlap: false,
            balance_samples: false,
            workers: None,
        }
    }
}

impl PipelineConfig {
    fn effective_train(&self) -> TrainConfig {
        let mut t = self.train.clone();
        t.seed = self.seed;
        if self.balance_samples {
            t.epochs = if self.filter_slice { 8 } else { 1 };
        }
        t
    }
}

/// A pair together with everything derived from its ill-typed half.
#[derive(Debug, Clone)]
pub struct Analyzed {
    pub pair: ProgramPair,
    pub derivation: PartialDerivation,
    pub slices: Vec<ErrorSlice>,
    pub labels: BlameLabels,
    pub slice_union: BTreeSet<NodeId>,
}

pub fn analyze(pair: ProgramPair) -> Analyzed {
    let derivation = infer_partial(&pair.bad);
    let slices = minimal_slices(&pair.bad).unwrap_or_default();
    let labels = tree_diff(&pair);
    let slice_union = slices
        .iter()
        .flat_map(|s| s.nodes.iter().copied())
        .collect();
    Analyzed {
        pair,
        derivation,
        slices,
        labels,
        slice_union,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BaselineRow {
    pub name: String,
    pub top1: f64,
    pub top2: f64,
    pub top3: f64,
    pub recall: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub model: String,
    pub features: String,
    pub filter_slice: bool,
    pub top1: f64,
    pub top2: f64,
    pub top3: f64,
    pub recall: f64,
    pub evaluated: usize,
    /// Programs with no changed node at all.
    pub skipped: usize,
    /// Evaluated programs left out of recall: no changed node in the slice.
    pub recall_skipped: usize,
    pub train_samples: usize,
    pub train_positives: usize,
    /// Share of changed nodes that lie inside the slice.
    pub labels_in_slice: f64,
    /// Mean slice size over program size.
    pub mean_slice_fraction: f64,
    pub baselines: Vec<BaselineRow>,
}

impl EvalReport {
    /// Averages rates over `reports` and sums their counts.
    pub fn mean(reports: &[EvalReport]) -> EvalReport {
        let n = reports.len().max(1) as f64;
        let avg = |f: &dyn Fn(&EvalReport) -> f64| reports.iter().map(f).sum::<f64>() / n;
        let sum = |f: &dyn Fn(&EvalReport) -> usize| reports.iter().map(f).sum::<usize>();
        let first = &reports[0];
        let baselines = (0..first.baselines.len())
            .map(|i| BaselineRow {
                name: first.baselines[i].name.clone(),
                top1: avg(&|r| r.baselines[i].top1),
                top2: avg(&|r| r.baselines[i].top2),
                top3: avg(&|r| r.baselines[i].top3),
                recall: avg(&|r| r.baselines[i].recall),
            })
            .collect();
        EvalReport {
            model: first.model.clone(),
            features: first.features.clone(),
            filter_slice: first.filter_slice,
            top1: avg(&|r| r.top1),
            top2: avg(&|r| r.top2),
            top3: avg(&|r| r.top3),
            recall: avg(&|r| r.recall),
            evaluated: sum(&|r| r.evaluated),
            skipped: sum(&|r| r.skipped),
            recall_skipped: sum(&|r| r.recall_skipped),
            train_samples: sum(&|r| r.train_samples),
            train_positives: sum(&|r| r.train_positives),
            labels_in_slice: avg(&|r| r.labels_in_slice),
            mean_slice_fraction: avg(&|r| r.mean_slice_fraction),
            baselines,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Aligned text table of the model and baseline rows.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "{:<34} {:>6} {:>6} {:>6} {:>7}",
            "method", "top1", "top2", "top3", "recall"
        );
        let row = |out: &mut String, name: &str, t1: f64, t2: f64, t3: f64, r: f64| {
            let _ = writeln!(
                out,
                "{name:<34} {:>6.3} {:>6.3} {:>6.3} {:>7.3}",
                t1, t2, t3, r
            );
        };
        let name = format!("{} [{}]", self.model, self.features);
        row(
            &mut out,
            &name,
            self.top1,
            self.top2,
            self.top3,
            self.recall,
        );
        for b in &self.baselines {
            row(&mut out, &b.name, b.top1, b.top2, b.top3, b.recall);
        }
        let _ = writeln!(
            out,
            "evaluated {}  skipped {}  recall-skipped {}  train samples {} ({} blamed)",
            self.evaluated,
            self.skipped,
            self.recall_skipped,
            self.train_samples,
            self.train_positives
        );
        out
    }
}

fn with_pool<T: Send>(
    workers: Option<usize>,
    f: impl FnOnce() -> T + Send,
) -> Result<T, HarnessError> {
    match workers {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Pool(e.to_string()))?;
            Ok(pool.install(f))
        }
    }
}

/// Drops outlier pairs and analyzes the rest.
pub fn prepare(
    corpus: Vec<ProgramPair>,
    policy: OutlierPolicy,
) -> Result<(Vec<Analyzed>, usize), HarnessError> {
    let analyzed: Vec<Analyzed> = corpus.into_par_iter().map(analyze).collect();
    let (kept, discarded) = filter_outliers(analyzed, |a| a.labels.diff_fraction, policy)?;
    info!(
        "kept {} pairs, discarded {} outliers under {}",
        kept.len(),
        discarded.len(),
        policy
    );
    Ok((kept, discarded.len()))
}

fn build_dataset(
    programs: &[(usize, &Analyzed)],
    cfg: &PipelineConfig,
) -> Result<Dataset, HarnessError> {
    let columns = cfg.features.columns();
    let mut x = Vec::new();
    let mut y = Vec::new();
    for &(i, a) in programs {
        let samples = extract_program(
            i,
            &a.pair.bad,
            &a.derivation,
            &a.slices,
            Some(&a.labels.changed),
            cfg.filter_slice,
        );
        for s in samples {
            x.push(columns.iter().map(|&c| s.vector[c]).collect());
            y.push(s.label);
        }
    }
    Ok(Dataset::new(x, y)?)
}

struct Scored {
    /// Rank (0-based) of the first correct entry.
    first_hit: Option<usize>,
}

fn first_hit(r: &BlameReport, a: &Analyzed, span_overlap: bool) -> Scored {
    Scored {
        first_hit: r
            .entries
            .iter()
            .position(|e| is_hit(e, &a.labels.changed, &a.pair.bad, span_overlap)),
    }
}

fn rates(scored: &[Scored]) -> [f64; 3] {
    let n = scored.len().max(1) as f64;
    let at = |k: usize| {
        scored
            .iter()
            .filter(|s| s.first_hit.is_some_and(|r| r < k))
            .count() as f64
            / n
    };
    [at(1), at(2), at(3)]
}

fn evaluate(
    model: &Model,
    test: &[(usize, &Analyzed)],
    cfg: &PipelineConfig,
    train: &Dataset,
) -> Result<EvalReport, HarnessError> {
    let usable: Vec<(usize, &Analyzed)> = test
        .iter()
        .copied()
        .filter(|(_, a)| !a.labels.changed.is_empty())
        .collect();
    let skipped = test.len() - usable.len();

    let reports = usable
        .par_iter()
        .map(|(_, a)| {
            rank_program(
                model,
                cfg.features,
                &a.pair.bad,
                &a.derivation,
                &a.slices,
                cfg.filter_slice,
                3,
            )
        })
        .collect::<Result<Vec<_>, _>>()?;
    let random: Vec<BlameReport> = usable
        .iter()
        .map(|&(i, a)| {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            rng.set_stream(i as u64);
            baseline_random_from(&a.pair.bad, &a.slices, 3, &mut rng)
        })
        .collect();
    let first: Vec<BlameReport> = usable
        .iter()
        .map(|(_, a)| first_error_from(&a.pair.bad, &a.derivation, 3))
        .collect();

    let labels: Vec<BTreeSet<NodeId>> = usable
        .iter()
        .map(|(_, a)| a.labels.changed.clone())
        .collect();
    let slices: Vec<BTreeSet<NodeId>> = usable.iter().map(|(_, a)| a.slice_union.clone()).collect();
    let score = |rs: &[BlameReport]| {
        let scored: Vec<Scored> = rs
            .iter()
            .zip(&usable)
            .map(|(r, (_, a))| first_hit(r, a, cfg.span_overlap))
            .collect();
        (rates(&scored), recall(rs, &labels, &slices))
    };
    let ([top1, top2, top3], model_recall) = score(&reports);
    let baselines = [("random-in-slice", &random), ("first-error", &first)]
        .into_iter()
        .map(|(name, rs)| {
            let ([t1, t2, t3], r) = score(rs);
            BaselineRow {
                name: name.to_string(),
                top1: t1,
                top2: t2,
                top3: t3,
                recall: r.value,
            }
        })
        .collect();

    let changed: usize = labels.iter().map(BTreeSet::len).sum();
    let inside: usize = labels
        .iter()
        .zip(&slices)
        .map(|(l, s)| l.intersection(s).count())
        .sum();
    let slice_fraction = usable
        .iter()
        .map(|(_, a)| a.slice_union.len() as f64 / a.pair.bad.len() as f64)
        .sum::<f64>()
        / usable.len().max(1) as f64;

    Ok(EvalReport {
        model: cfg.model.to_string(),
        features: cfg.features.to_string(),
        filter_slice: cfg.filter_slice,
        top1,
        top2,
        top3,
        recall: model_recall.value,
        evaluated: usable.len(),
        skipped,
        recall_skipped: model_recall.skipped,
        train_samples: train.len(),
        train_positives: train.positives(),
        labels_in_slice: if changed == 0 {
            0.0
        } else {
            inside as f64 / changed as f64
        },
        mean_slice_fraction: slice_fraction,
        baselines,
    })
}

fn train_and_test(
    train: &[(usize, &Analyzed)],
    test: &[(usize, &Analyzed)],
    cfg: &PipelineConfig,
) -> Result<(EvalReport, Model), HarnessError> {
    let data = build_dataset(train, cfg)?;
    debug!(
        "training {} on {} samples ({} blamed)",
        cfg.model,
        data.len(),
        data.positives()
    );
    let model = Model::train(cfg.model, &data, &cfg.effective_train())?;
    let report = evaluate(&model, test, cfg, &data)?;
    Ok((report, model))
}

/// Trains on analyzed programs and evaluates on a held-out share of them.
pub fn train_and_evaluate(
    programs: &[Analyzed],
    cfg: &PipelineConfig,
) -> Result<(EvalReport, Model), HarnessError> {
    with_pool(cfg.workers, || {
        let n = programs.len();
        if n < 2 && cfg.holdout_fraction > 0.0 || n == 0 {
            return Err(HarnessError::TooFewPrograms { needed: 2, got: n });
        }
        let indexed: Vec<(usize, &Analyzed)> = programs.iter().enumerate().collect();
        if cfg.holdout_fraction <= 0.0 {
            return train_and_test(&indexed, &indexed, cfg);
        }
        let mut order = indexed;
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
        let n_test = ((n as f64 * cfg.holdout_fraction).round() as usize).clamp(1, n - 1);
        let (test, train) = order.split_at(n_test);
        let mut test = test.to_vec();
        let mut train = train.to_vec();
        test.sort_by_key(|(i, _)| *i);
        train.sort_by_key(|(i, _)| *i);
        train_and_test(&train, &test, cfg)
    })?
}

/// Outlier filtering, slicing, labelling, extraction, training and
/// held-out evaluation.
pub fn run_pipeline(
    corpus: Vec<ProgramPair>,
    cfg: &PipelineConfig,
) -> Result<EvalReport, HarnessError> {
    run_pipeline_with_model(corpus, cfg).map(|(r, _)| r)
}

pub fn run_pipeline_with_model(
    corpus: Vec<ProgramPair>,
    cfg: &PipelineConfig,
) -> Result<(EvalReport, Model), HarnessError> {
    if corpus.is_empty() {
        return Err(HarnessError::TooFewPrograms { needed: 2, got: 0 });
    }
    let (programs, _) = with_pool(cfg.workers, || prepare(corpus, cfg.outliers))??;
    train_and_evaluate(&programs, cfg)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidation {
    pub folds: Vec<EvalReport>,
    pub mean: EvalReport,
}

/// Seeded k-fold cross-validation over already analyzed programs.
pub fn cross_validate_analyzed(
    programs: &[Analyzed],
    cfg: &PipelineConfig,
    folds: usize,
) -> Result<CrossValidation, HarnessError> {
    if folds < 2 {
        return Err(HarnessError::InvalidConfig(
            "at least two folds are needed".into(),
        ));
    }
    if programs.len() < folds {
        return Err(HarnessError::TooFewPrograms {
            needed: folds,
            got: programs.len(),
        });
    }
    with_pool(cfg.workers, || {
        let mut order: Vec<usize> = (0..programs.len()).collect();
        order.shuffle(&mut ChaCha8Rng::seed_from_u64(cfg.seed));
        let mut fold_of = vec![0; programs.len()];
        for (rank, &i) in order.iter().enumerate() {
            fold_of[i] = rank % folds;
        }
        let reports = (0..folds)
            .into_par_iter()
            .map(|f| {
                let (test, train): (Vec<_>, Vec<_>) = programs
                    .iter()
                    .enumerate()
                    .partition(|(i, _)| fold_of[*i] == f);
                let report = train_and_test(&train, &test, cfg)?.0;
                info!("fold {f}: top1 {:.3}", report.top1);
                Ok(report)
            })
            .collect::<Result<Vec<_>, HarnessError>>()?;
        Ok(CrossValidation {
            mean: EvalReport::mean(&reports),
            folds: reports,
        })
    })?
}

pub fn cross_validate(
    corpus: Vec<ProgramPair>,
    cfg: &PipelineConfig,
    folds: usize,
) -> Result<CrossValidation, HarnessError> {
    let (programs, _) = with_pool(cfg.workers, || prepare(corpus, cfg.outliers))??;
    cross_validate_analyzed(&programs, cfg, folds)
}
