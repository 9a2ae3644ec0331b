use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::Serialize;
use simsmooth::basemodel::{BaseModel, KatzModel, ModelSummary};
use simsmooth::corpus::{parse_pairs, PairCorpus};
use simsmooth::estimator::{ScoreMode, SimEstimator};
use simsmooth::evaluation::{run_experiment, BaseModelId, ExperimentReport, REPORT_FORMAT};
use simsmooth::rng::rand_weight_seed;
use simsmooth::similarity::{Neighborhood, SimilarityContext, WeightConfig};
use simsmooth::MleModel;

use crate::config::{parse_beta_grid, FileConfig, Format};
use crate::error::CliError;
use crate::{EvaluateArgs, IngestArgs, NeighborsArgs, ProbArgs};

/// Reads a pair-count TSV, or a JSON snapshot when the file starts with `{`.
fn load_corpus(path: &Path) -> Result<PairCorpus, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let input = |source| CliError::Input {
        path: path.to_path_buf(),
        source,
    };
    if text.trim_start().starts_with('{') {
        PairCorpus::from_snapshot_json(&text).map_err(input)
    } else {
        parse_pairs(text.as_bytes()).map_err(input)
    }
}

/// Writes via a sibling temporary file so a failed run leaves nothing behind.
fn write_atomically(path: &Path, contents: &str) -> Result<(), CliError> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = PathBuf::from(tmp);
    std::fs::write(&tmp, contents).map_err(|e| CliError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| CliError::io(path, e))
}

fn print(text: &str) -> Result<(), CliError> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())
        .and_then(|()| out.flush())
        .map_err(|e| CliError::io("<stdout>", e))
}

fn to_json<S: Serialize>(value: &S) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("plain data serializes");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct IngestStats {
    nouns: usize,
    verbs: usize,
    total_pairs: u64,
    pair_types: usize,
    singletons: u64,
    model: Option<ModelSummary>,
    model_error: Option<String>,
}

pub fn ingest(args: IngestArgs) -> Result<(), CliError> {
    let corpus = Arc::new(load_corpus(&args.input)?);
    let (model, model_error) = match KatzModel::<f64>::build(corpus.clone(), args.gt_cutoff) {
        Ok(k) => (Some(ModelSummary::from_katz(&k)), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let stats = IngestStats {
        nouns: corpus.nouns().len(),
        verbs: corpus.verbs().len(),
        total_pairs: corpus.total_pairs(),
        pair_types: corpus.type_count(),
        singletons: corpus.singleton_count(),
        model,
        model_error,
    };
    if let Some(out) = &args.out {
        write_atomically(out, &corpus.to_snapshot_json())?;
    }
    let text = match args.format {
        Format::Json => to_json(&stats),
        Format::Tsv => match &stats.model {
            Some(summary) => summary.to_text(),
            None => {
                let mut s = String::new();
                let _ = writeln!(s, "nouns\t{}", stats.nouns);
                let _ = writeln!(s, "verbs\t{}", stats.verbs);
                let _ = writeln!(s, "total_pairs\t{}", stats.total_pairs);
                let _ = writeln!(s, "pair_types\t{}", stats.pair_types);
                let _ = writeln!(s, "singletons\t{}", stats.singletons);
                if let Some(e) = &stats.model_error {
                    let _ = writeln!(s, "warning\tno back-off model: {e}");
                }
                s
            }
        },
    };
    print(&text)
}

/// The corpus, MLE/Katz models and base model behind one base-model id.
struct Cell {
    corpus: Arc<PairCorpus>,
    katz: Option<Arc<KatzModel<f64>>>,
    base: Arc<dyn BaseModel<f64>>,
}

fn build_cell(full: PairCorpus, id: BaseModelId, gt_cutoff: u64) -> Result<Cell, CliError> {
    let full = Arc::new(full);
    let katz_full = match KatzModel::<f64>::build(full.clone(), gt_cutoff) {
        Ok(k) => Some(Arc::new(k)),
        Err(e) if id.is_backoff() => return Err(e.into()),
        Err(e) => {
            log::warn!("no back-off model: {e}");
            None
        }
    };
    let (corpus, katz) = if id.without_singletons() {
        let stripped = Arc::new(full.strip_singletons());
        let katz = katz_full.map(|k| Arc::new(KatzModel::with_discounts(stripped.clone(), k.discounts().clone())));
        (stripped, katz)
    } else {
        (full, katz_full)
    };
    let base: Arc<dyn BaseModel<f64>> = match (&katz, id.is_backoff()) {
        (Some(k), true) => k.clone(),
        _ => Arc::new(MleModel::new(corpus.clone())),
    };
    Ok(Cell { corpus, katz, base })
}

#[derive(Serialize)]
struct NeighborRow {
    measure: String,
    rank: usize,
    word: String,
    raw: f64,
    weight: f64,
}

pub fn neighbors(args: NeighborsArgs) -> Result<(), CliError> {
    let cell = build_cell(load_corpus(&args.input)?, args.model, args.gt_cutoff)?;
    let target = cell
        .corpus
        .noun_id(&args.word)
        .filter(|&n| cell.corpus.noun_total(n) > 0)
        .ok_or_else(|| {
            CliError::Usage(format!(
                "unknown noun {:?} (or no counts under {})",
                args.word, args.model
            ))
        })?;
    let ctx = SimilarityContext::new(
        cell.corpus.clone(),
        cell.base.clone(),
        cell.katz.clone(),
        rand_weight_seed(args.seed),
    );
    let mut rows = Vec::new();
    for &measure in &args.measures {
        let config = WeightConfig::new(measure, args.beta).with_neighborhood(Neighborhood::TopK(args.n.max(1)));
        let profile = ctx.profile(target, &config)?;
        for (i, nb) in profile.neighbors.iter().enumerate() {
            rows.push(NeighborRow {
                measure: measure.to_string(),
                rank: i + 1,
                word: cell.corpus.noun_word(nb.noun).to_string(),
                raw: nb.raw,
                weight: nb.weight,
            });
        }
    }
    let text = match args.format {
        Format::Json => to_json(&rows),
        Format::Tsv => {
            let mut s = String::from("measure\trank\tword\traw\tweight\n");
            for r in &rows {
                let _ = writeln!(s, "{}\t{}\t{}\t{}\t{}", r.measure, r.rank, r.word, r.raw, r.weight);
            }
            s
        }
    };
    print(&text)
}

#[derive(Serialize)]
struct ProbReport {
    noun: String,
    verb: String,
    model: BaseModelId,
    count: u64,
    mle: Option<f64>,
    katz: Option<f64>,
    p_sim: f64,
    p_r: f64,
    p_hat: Option<f64>,
    branch: Option<&'static str>,
}

pub fn prob(args: ProbArgs) -> Result<(), CliError> {
    let cell = build_cell(load_corpus(&args.input)?, args.model, args.gt_cutoff)?;
    let c = &cell.corpus;
    let n = c
        .noun_id(&args.noun)
        .ok_or_else(|| CliError::Usage(format!("unknown noun {:?}", args.noun)))?;
    let v = c
        .verb_id(&args.verb)
        .ok_or_else(|| CliError::Usage(format!("unknown verb {:?}", args.verb)))?;
    if c.noun_total(n) == 0 {
        return Err(CliError::Usage(format!(
            "noun {:?} has no counts under {}",
            args.noun, args.model
        )));
    }
    let ctx = Arc::new(SimilarityContext::new(
        c.clone(),
        cell.base.clone(),
        cell.katz.clone(),
        rand_weight_seed(args.seed),
    ));
    let config = WeightConfig::new(args.measure, args.beta).with_neighborhood(args.neighborhood);
    let est = SimEstimator::new(cell.katz.clone(), ctx, config, args.gamma)?;
    let hat = match &cell.katz {
        Some(_) => Some(est.p_hat_with_branch(n, v)?),
        None => None,
    };
    let report = ProbReport {
        noun: args.noun.clone(),
        verb: args.verb.clone(),
        model: args.model,
        count: c.count(n, v),
        mle: Some(MleModel::new(c.clone()).prob(n, v)?),
        katz: cell.katz.as_ref().map(|k| k.prob(n, v)).transpose()?,
        p_sim: est.p_sim(n, v, ScoreMode::Normalized)?,
        p_r: est.p_r(n, v)?,
        p_hat: hat.map(|h| h.0),
        branch: hat.map(|h| h.1.label()),
    };
    let text = match args.format {
        Format::Json => to_json(&report),
        Format::Tsv => {
            let opt = |x: Option<f64>| x.map_or_else(|| "-".to_string(), |v| v.to_string());
            let mut s = String::new();
            let _ = writeln!(s, "noun\t{}", report.noun);
            let _ = writeln!(s, "verb\t{}", report.verb);
            let _ = writeln!(s, "model\t{}", report.model);
            let _ = writeln!(s, "count\t{}", report.count);
            let _ = writeln!(s, "mle\t{}", opt(report.mle));
            let _ = writeln!(s, "katz\t{}", opt(report.katz));
            let _ = writeln!(s, "p_sim\t{}", report.p_sim);
            let _ = writeln!(s, "p_r\t{}", report.p_r);
            let _ = writeln!(s, "p_hat\t{}", opt(report.p_hat));
            let _ = writeln!(s, "branch\t{}", report.branch.unwrap_or("-"));
            s
        }
    };
    print(&text)
}

/// A `--config` file: TOML, or JSON holding either a config or a whole
/// report, whose embedded config is then reused.
fn load_config(path: &Path) -> Result<FileConfig, CliError> {
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    if !is_json {
        return FileConfig::load(path);
    }
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let bad = |e: serde_json::Error| CliError::Usage(format!("{}: {e}", path.display()));
    let mut value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    if value.get("format").and_then(|f| f.as_str()) == Some(REPORT_FORMAT) {
        value = value["config"].take();
    }
    serde_json::from_value(value).map_err(bad)
}

pub fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(p) => load_config(p)?,
        None => FileConfig::default(),
    };
    let flags = FileConfig {
        input: args.input,
        train_fraction: args.train_fraction,
        folds: args.folds,
        seed: args.seed,
        models: args.models,
        methods: args.methods,
        beta_grid: args
            .beta_grid
            .as_deref()
            .map(parse_beta_grid)
            .transpose()
            .map_err(CliError::Usage)?,
        neighborhood: args.neighborhood,
        gamma: args.gamma,
        gt_cutoff: args.gt_cutoff,
        jobs: args.jobs,
        out: args.out,
        format: args.format,
    };
    let merged = file.overlay(flags);
    let experiment = merged.experiment();
    // reject bad settings before touching the data
    experiment.validate()?;
    let input = experiment
        .input
        .clone()
        .ok_or_else(|| CliError::Usage("no input given (--input or `input` in the config)".into()))?;
    let format = merged.format.unwrap_or_else(|| match &merged.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("json")) => Format::Json,
        _ => Format::Tsv,
    });
    if merged.jobs == Some(0) {
        return Err(CliError::Usage("--jobs must be at least 1".into()));
    }

    let corpus = load_corpus(Path::new(&input))?;
    let report: ExperimentReport = run_experiment(&corpus, &experiment, merged.jobs)?;
    let text = match format {
        Format::Tsv => report.to_tsv()?,
        Format::Json => report.to_json()?,
    };
    match &merged.out {
        Some(path) => write_atomically(path, &text),
        None => print(&text),
    }
}
