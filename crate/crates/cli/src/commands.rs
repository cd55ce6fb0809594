use std::cmp::Ordering;
use std::fmt::Write as _;

use dtigraph::dataio::{write_affinity, LabeledPair, SplitRequest};
use dtigraph::evaluation::{evaluate_fold, pr_svg, report_tsv, roc_svg, summary_text, ProtocolData};
use dtigraph::trainer::{masked_graph, read_params, write_params};
use dtigraph::{
    fit, forward, plan_splits, EntityKind, EntitySet, EvalReport, InteractionSet, Mat, MetricRecord,
    ModelParams, Split, SplitMode, TrainConfig,
};
use rayon::prelude::*;

use crate::data::{self, Affinities};
use crate::{CliError, Outputs, RunConfig};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Drug(String),
    Target(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Command {
    /// Learn both affinity matrices from the feature views.
    Affinity,
    /// Fit on every labeled pair and save the parameters.
    Train,
    /// Run the configured warm or cold-start protocol.
    Evaluate,
    /// Rank the unknown partners of one drug or target.
    Predict { query: Query, top: usize },
    /// Evaluate every point of the configured grid.
    Sweep,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Affinity => "affinity",
            Command::Train => "train",
            Command::Evaluate => "evaluate",
            Command::Predict { .. } => "predict",
            Command::Sweep => "sweep",
        }
    }
}

/// Computes every output of `command` without touching the file system
/// beyond reading inputs. The returned bundle includes the manifest.
pub fn run(command: &Command, cfg: &RunConfig) -> Result<Outputs, CliError> {
    let mut out = Outputs::default();
    let entities = data::entities(cfg)?;
    match command {
        Command::Affinity => affinity(cfg, &entities, &mut out)?,
        Command::Train => train(cfg, &entities, &mut out)?,
        Command::Evaluate => {
            let bundle = Bundle::load(cfg, &entities)?;
            let tc = cfg.train_config();
            let (report, labels) = bundle.evaluate(cfg, &tc)?;
            emit_report(&mut out, "", &tc, &report, &labels)?;
        }
        Command::Predict { query, top } => predict(cfg, &entities, query, *top, &mut out)?,
        Command::Sweep => sweep(cfg, &entities, &mut out)?,
    }
    // the run directory itself is not part of the run's identity
    let mut recorded = cfg.clone();
    recorded.out_dir = ".".into();
    out.seal(command.name(), &recorded.to_toml());
    Ok(out)
}

fn affinity_bytes(a: &dtigraph::AffinityMatrix, ids: &[String]) -> Vec<u8> {
    let mut buf = Vec::new();
    write_affinity(&mut buf, a, ids).expect("write to vec");
    buf
}

fn affinity(cfg: &RunConfig, entities: &EntitySet, out: &mut Outputs) -> Result<(), CliError> {
    let aff = data::affinities(cfg, entities, true)?;
    out.add("affinity_drug.tsv", affinity_bytes(&aff.drug, entities.drug_ids()));
    out.add("affinity_target.tsv", affinity_bytes(&aff.target, entities.target_ids()));
    let mut log = String::from("kind\titerations\tconverged\tdegenerate\terr_primal\terr_low_rank\terr_sparse\terr_change\n");
    for (kind, o) in &aff.learned {
        let errs: Vec<String> = o.errors.iter().map(|e| format!("{e:.6e}")).collect();
        writeln!(log, "{kind}\t{}\t{}\t{}\t{}", o.iterations, o.converged, o.degenerate, errs.join("\t")).unwrap();
    }
    out.add("convergence.tsv", log);
    Ok(())
}

/// Everything a protocol run needs, loaded once.
struct Bundle<'a> {
    entities: &'a EntitySet,
    aff: Affinities,
    interactions: InteractionSet,
}

impl<'a> Bundle<'a> {
    fn load(cfg: &RunConfig, entities: &'a EntitySet) -> Result<Self, CliError> {
        let aff = data::affinities(cfg, entities, false)?;
        let interactions = data::interactions(cfg, entities, &aff.drug)?;
        Ok(Self {
            entities,
            aff,
            interactions,
        })
    }

    fn protocol(&self, cfg: &RunConfig) -> ProtocolData<'_> {
        ProtocolData {
            entities: self.entities,
            interactions: &self.interactions,
            drug_affinity: &self.aff.drug,
            target_affinity: &self.aff.target,
            threshold: cfg.threshold,
        }
    }

    /// Entities with at least one positive and one negative pair; the only
    /// ones a held-out ranking can be scored on.
    fn eligible(&self, kind: EntityKind) -> Vec<String> {
        let n = self.entities.count(kind);
        let mut seen = vec![(false, false); n];
        for lp in self.interactions.labeled_pairs() {
            let i = match kind {
                EntityKind::Drug => lp.pair.0,
                EntityKind::Target => lp.pair.1,
            };
            if lp.positive {
                seen[i].0 = true;
            } else {
                seen[i].1 = true;
            }
        }
        (0..n)
            .filter(|&i| seen[i] == (true, true))
            .map(|i| self.entities.ids(kind)[i].clone())
            .collect()
    }

    fn evaluate(&self, cfg: &RunConfig, tc: &TrainConfig) -> Result<(EvalReport, Vec<String>), CliError> {
        let request = match cfg.eval.mode {
            SplitMode::Warm => SplitRequest::Warm { k: cfg.eval.folds },
            mode => {
                let kind = if mode == SplitMode::ColdDrug { EntityKind::Drug } else { EntityKind::Target };
                let holdouts = if cfg.eval.holdouts.is_empty() { self.eligible(kind) } else { cfg.eval.holdouts.clone() };
                if holdouts.is_empty() {
                    return Err(CliError::Input(format!(
                        "no {kind} has both positive and negative pairs to hold out; set eval.holdouts"
                    )));
                }
                match kind {
                    EntityKind::Drug => SplitRequest::ColdDrug { holdouts },
                    EntityKind::Target => SplitRequest::ColdTarget { holdouts },
                }
            }
        };
        let plan = plan_splits(&self.interactions, self.entities, &request, cfg.seed)?;
        let labels: Vec<String> = match &request {
            SplitRequest::Warm { .. } => (0..plan.folds.len()).map(|i| i.to_string()).collect(),
            SplitRequest::ColdDrug { holdouts } | SplitRequest::ColdTarget { holdouts } => holdouts.clone(),
        };
        let data = self.protocol(cfg);
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.jobs.max(1))
            .build()
            .map_err(|e| CliError::Input(format!("thread pool: {e}")))?;
        let folds = pool.install(|| {
            plan.folds
                .par_iter()
                .enumerate()
                .map(|(i, s)| {
                    log::info!("fold {i} of {}", plan.folds.len());
                    evaluate_fold(&data, s, i, tc)
                })
                .collect::<Result<Vec<_>, _>>()
        })?;
        Ok((EvalReport::aggregate(plan.mode, folds)?, labels))
    }
}

fn emit_report(out: &mut Outputs, prefix: &str, tc: &TrainConfig, report: &EvalReport, labels: &[String]) -> Result<(), CliError> {
    let v = tc.variant.name();
    out.add(format!("{prefix}report_{v}.tsv"), report_tsv(report, labels));
    out.add(
        format!("{prefix}summary_{v}.txt"),
        summary_text(report, &format!("variant {v}, loss {}", tc.loss.kind.name())),
    );
    for (fold, label) in report.per_fold.iter().zip(labels) {
        let title = format!("{v} fold {label}");
        out.add(format!("{prefix}curves/{v}_{label}_roc.svg"), roc_svg(&fold.scores, &fold.labels, &title)?);
        out.add(format!("{prefix}curves/{v}_{label}_pr.svg"), pr_svg(&fold.scores, &fold.labels, &title)?);
    }
    Ok(())
}

fn full_split(interactions: &InteractionSet) -> Split {
    Split {
        train: interactions.labeled_pairs(),
        test: Vec::<LabeledPair>::new(),
        holdout: None,
    }
}

fn checkpoint_files(params: &ModelParams) -> Result<Vec<(String, Vec<u8>)>, CliError> {
    let dir = tempfile::tempdir().map_err(|e| CliError::Output(e.to_string()))?;
    write_params(dir.path(), params)?;
    let mut files = Vec::new();
    for entry in std::fs::read_dir(dir.path()).map_err(|e| CliError::Output(e.to_string()))? {
        let path = entry.map_err(|e| CliError::Output(e.to_string()))?.path();
        let bytes = std::fs::read(&path).map_err(|e| CliError::Output(e.to_string()))?;
        files.push((path.file_name().unwrap().to_string_lossy().into_owned(), bytes));
    }
    files.sort();
    Ok(files)
}

fn score_table(scores: &Mat, entities: &EntitySet) -> String {
    let mut s = format!("drug\t{}\n", entities.target_ids().join("\t"));
    for (d, id) in entities.drug_ids().iter().enumerate() {
        let row: Vec<String> = scores.row(d).iter().map(|x| format!("{x:.6}")).collect();
        writeln!(s, "{id}\t{}", row.join("\t")).unwrap();
    }
    s
}

fn train(cfg: &RunConfig, entities: &EntitySet, out: &mut Outputs) -> Result<(), CliError> {
    let bundle = Bundle::load(cfg, entities)?;
    let tc = cfg.train_config();
    let split = full_split(&bundle.interactions);
    let graph = masked_graph(&bundle.aff.drug, &bundle.aff.target, &split.train, cfg.threshold)?;
    let (params, log) = fit(&graph, &split, &tc)?;
    let mut trace = String::from("epoch\tloss\n");
    for (e, l) in log.losses.iter().enumerate() {
        writeln!(trace, "{e}\t{l:.9}").unwrap();
    }
    out.add("loss_trace.tsv", trace);
    for (name, bytes) in checkpoint_files(&params)? {
        out.add(format!("checkpoint/{name}"), bytes);
    }
    out.add("scores.tsv", score_table(&forward(&graph, &params, &tc)?, entities));
    Ok(())
}

/// Orders by descending score, then ascending identifier.
fn rank(mut rows: Vec<(String, f64)>) -> Vec<(String, f64)> {
    rows.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap_or(Ordering::Equal).then_with(|| a.0.cmp(&b.0)));
    rows
}

fn predict(cfg: &RunConfig, entities: &EntitySet, query: &Query, top: usize, out: &mut Outputs) -> Result<(), CliError> {
    let (kind, id) = match query {
        Query::Drug(id) => (EntityKind::Drug, id),
        Query::Target(id) => (EntityKind::Target, id),
    };
    let index = entities.require_index(kind, id)?;
    let bundle = Bundle::load(cfg, entities)?;
    let tc = cfg.train_config();
    let split = full_split(&bundle.interactions);
    let graph = masked_graph(&bundle.aff.drug, &bundle.aff.target, &split.train, cfg.threshold)?;
    let params = match &cfg.paths.checkpoint {
        Some(dir) => read_params(dir, &tc.dims(graph.n_nodes()))?,
        None => fit(&graph, &split, &tc)?.0,
    };
    let h = forward(&graph, &params, &tc)?;
    let rows: Vec<(String, f64)> = match kind {
        EntityKind::Drug => (0..entities.n_t())
            .filter(|&t| bundle.interactions.label((index, t)) != Some(true))
            .map(|t| (entities.target_ids()[t].clone(), h[(index, t)]))
            .collect(),
        EntityKind::Target => (0..entities.n_d())
            .filter(|&d| bundle.interactions.label((d, index)) != Some(true))
            .map(|d| (entities.drug_ids()[d].clone(), h[(d, index)]))
            .collect(),
    };
    let partner = match kind {
        EntityKind::Drug => EntityKind::Target,
        EntityKind::Target => EntityKind::Drug,
    };
    let mut table = format!("rank\t{partner}\tscore\n");
    for (r, (pid, score)) in rank(rows).into_iter().take(top).enumerate() {
        writeln!(table, "{}\t{pid}\t{score:.6}", r + 1).unwrap();
    }
    out.add(format!("predictions_{kind}_{id}.tsv"), table);
    Ok(())
}

/// Base value when the axis is empty.
fn axis<T: Copy>(values: &[T], base: T) -> Vec<T> {
    if values.is_empty() {
        vec![base]
    } else {
        values.to_vec()
    }
}

fn sweep(cfg: &RunConfig, entities: &EntitySet, out: &mut Outputs) -> Result<(), CliError> {
    let bundle = Bundle::load(cfg, entities)?;
    let base = cfg.train_config();
    let s = &cfg.sweep;
    let mut summary = String::from("point\tk\talpha\tvarpi\tomega\tgcn_layers");
    for name in MetricRecord::NAMES {
        write!(summary, "\t{name}_mean\t{name}_std").unwrap();
    }
    summary.push('\n');
    for k in axis(&s.k, base.filter.k) {
        for alpha in axis(&s.alpha, base.filter.alpha) {
            for varpi in axis(&s.varpi, base.loss.varpi) {
                for omega in axis(&s.omega, base.fusion_omega) {
                    for layers in axis(&s.gcn_layers, base.gcn_layers) {
                        let mut tc = base.clone();
                        tc.filter.k = k;
                        tc.filter.alpha = alpha;
                        tc.loss.varpi = varpi;
                        tc.fusion_omega = omega;
                        tc.gcn_layers = layers;
                        let point = format!("k{k}_alpha{alpha}_varpi{varpi}_omega{omega}_layers{layers}");
                        log::info!("sweep point {point}");
                        let (report, labels) = bundle.evaluate(cfg, &tc)?;
                        out.add(format!("sweep/{point}.tsv"), report_tsv(&report, &labels));
                        write!(summary, "{point}\t{k}\t{alpha}\t{varpi}\t{omega}\t{layers}").unwrap();
                        for (m, sd) in report.mean.values().iter().zip(report.std.values()) {
                            write!(summary, "\t{m:.6}\t{sd:.6}").unwrap();
                        }
                        summary.push('\n');
                    }
                }
            }
        }
    }
    out.add("sweep/summary.tsv", summary);
    Ok(())
}
