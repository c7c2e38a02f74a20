//! The experiment pipeline: tokenize, split, embed, train each requested
//! model, evaluate on the held-out split and write the artifacts.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use folkmotif_core::baselines::{average_embedding, predict_svm, train_linear_svm, Standardizer};
use folkmotif_core::embedding::EmbeddingMatrix;
use folkmotif_core::linalg::Matrix;
use folkmotif_core::metrics::{evaluate, MetricsReport};
use folkmotif_core::multiword::{build_multiwords, phrase_multiwords, MultiwordMode};
use folkmotif_core::network::{predict, train_classifier, BatchGradient, Sequential, SongInput, TrainHistory};
use folkmotif_core::pvdbow::{infer_vector, train_pvdbow};
use folkmotif_core::sgns::{train_skipgram, TrainingReport};
use folkmotif_core::split::split_dataset;
use folkmotif_core::token::tokenize_melody;
use folkmotif_core::{Melody, Representation, Vocabulary};
use serde::Serialize;

use crate::config::{EmbeddingSettings, ExperimentConfig, ModelKind};
use crate::corpus::{load_sources, LabeledCorpus};
use crate::error::{Error, Result, Stage};
use crate::formats::{vocab_hash, write_alpha_csv, write_checkpoint, write_vectors, write_vocab, AlphaRow, Checkpoint, TokenizedSong};
use crate::parallel::{train_skipgram_parallel, Threaded};

/// Multi-word token sequences for every melody, in corpus order. Melodies
/// without a single multi-word are returned separately with the reason.
pub fn tokenize_corpus(
    melodies: &[Melody],
    repr: Representation,
    mw_size: usize,
    mode: MultiwordMode,
) -> (Vec<TokenizedSong>, Vec<(String, String)>) {
    let mut dropped = Vec::new();
    let mut kept: Vec<(&Melody, Vec<String>)> = Vec::new();
    for m in melodies {
        match tokenize_melody(m, repr) {
            Ok(atoms) => kept.push((m, atoms)),
            Err(e) => dropped.push((m.id.clone(), e.to_string())),
        }
    }
    let words: Vec<Vec<String>> = match mode {
        MultiwordMode::Sliding => kept.iter().map(|(_, a)| build_multiwords(a, mw_size, mode)).collect(),
        MultiwordMode::Phrase(p) => {
            let atoms: Vec<Vec<String>> = kept.iter().map(|(_, a)| a.clone()).collect();
            phrase_multiwords(&atoms, mw_size, p)
        }
    };
    let mut songs = Vec::new();
    for ((m, _), tokens) in kept.into_iter().zip(words) {
        if tokens.is_empty() {
            dropped.push((m.id.clone(), format!("fewer than {mw_size} tokens")));
        } else {
            songs.push(TokenizedSong { id: m.id.clone(), label: m.label.clone(), tokens });
        }
    }
    (songs, dropped)
}

/// Sorted distinct labels and the class index of every song.
pub fn class_indices(songs: &[TokenizedSong]) -> (Vec<String>, Vec<usize>) {
    let labels: Vec<String> = songs.iter().map(|s| s.label.clone()).collect::<BTreeSet<_>>().into_iter().collect();
    let classes = songs.iter().map(|s| labels.binary_search(&s.label).unwrap()).collect();
    (labels, classes)
}

/// Builds the vocabulary and trains skip-gram embeddings on `songs`.
pub fn train_embeddings(
    songs: &[&TokenizedSong],
    settings: &EmbeddingSettings,
    seed: u64,
    workers: usize,
) -> Result<(Vocabulary, EmbeddingMatrix, TrainingReport)> {
    let corpus: Vec<Vec<&str>> = songs.iter().map(|s| s.tokens.iter().map(String::as_str).collect()).collect();
    let vocab = Vocabulary::build(&corpus, settings.min_count).map_err(|e| Error::data(Stage::Embed, e))?;
    let encoded: Vec<Vec<u32>> = corpus.iter().map(|s| vocab.encode(s)).collect();
    let sgns = settings.sgns(seed);
    let trained = if workers <= 1 {
        train_skipgram(&encoded, &vocab, &sgns)
    } else {
        train_skipgram_parallel(&encoded, &vocab, &sgns, workers)
    };
    let (emb, report) = trained.map_err(|e| Error::from((Stage::Embed, e)))?;
    Ok((vocab, emb, report))
}

/// What one model produced on the test split.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelOutcome {
    pub model: ModelKind,
    pub metrics: MetricsReport,
    /// Predicted class per test song, in test order.
    pub predictions: Vec<usize>,
    /// Test songs without a single in-vocabulary motif; they are assigned
    /// the majority training class.
    pub untokenizable: usize,
    pub history: Option<TrainHistory>,
    pub checkpoint: Option<Checkpoint>,
    pub alpha: Vec<AlphaRow>,
    /// Song ids and vectors (train songs first, then test songs).
    pub song_vectors: Option<(Vec<String>, Matrix)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentOutcome {
    pub labels: Vec<String>,
    pub songs: Vec<TokenizedSong>,
    pub classes: Vec<usize>,
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub skipped_files: usize,
    pub dropped_songs: Vec<(String, String)>,
    pub vocab: Vocabulary,
    pub embeddings: EmbeddingMatrix,
    pub embedding_report: TrainingReport,
    pub models: Vec<ModelOutcome>,
}

impl ExperimentOutcome {
    pub fn model(&self, kind: ModelKind) -> Option<&ModelOutcome> {
        self.models.iter().find(|m| m.model == kind)
    }
}

fn majority(classes: &[usize], idx: &[usize], n: usize) -> usize {
    let mut counts = vec![0usize; n];
    for &i in idx {
        counts[classes[i]] += 1;
    }
    let mut best = 0;
    for (c, &k) in counts.iter().enumerate() {
        if k > counts[best] {
            best = c;
        }
    }
    best
}

/// A split corpus with trained embeddings, ready for [`run_model`].
pub struct SplitData<'a> {
    pub songs: &'a [TokenizedSong],
    pub classes: &'a [usize],
    pub labels: &'a [String],
    pub train: &'a [usize],
    pub test: &'a [usize],
    pub vocab: &'a Vocabulary,
    pub emb: &'a EmbeddingMatrix,
}

struct Context<'a> {
    cfg: &'a ExperimentConfig,
    songs: &'a [TokenizedSong],
    classes: &'a [usize],
    labels: &'a [String],
    train: &'a [usize],
    test: &'a [usize],
    vocab: &'a Vocabulary,
    emb: &'a EmbeddingMatrix,
    fallback: usize,
}

/// Trains one model on the training songs and scores it on the test songs.
pub fn run_model(kind: ModelKind, data: &SplitData, cfg: &ExperimentConfig) -> Result<ModelOutcome> {
    let ctx = Context {
        cfg,
        songs: data.songs,
        classes: data.classes,
        labels: data.labels,
        train: data.train,
        test: data.test,
        vocab: data.vocab,
        emb: data.emb,
        fallback: majority(data.classes, data.train, data.labels.len()),
    };
    match kind {
        ModelKind::Attention => run_attention(&ctx),
        ModelKind::Doc2VecSvm => run_doc2vec(&ctx),
        ModelKind::AverageSvm => run_average(&ctx),
    }
}

impl Context<'_> {
    fn gold(&self) -> Vec<usize> {
        self.test.iter().map(|&i| self.classes[i]).collect()
    }

    fn score(&self, predictions: &[usize]) -> Result<MetricsReport> {
        evaluate(predictions, &self.gold(), self.labels.len()).map_err(|e| Error::data(Stage::Evaluate, e))
    }
}

fn run_attention(ctx: &Context) -> Result<ModelOutcome> {
    let cfg = ctx.cfg;
    let input = |i: usize| -> Option<(Vec<u32>, SongInput)> {
        let idx = ctx.vocab.encode(&ctx.songs[i].tokens);
        let song = SongInput::from_indices(&idx, &ctx.emb.input, ctx.classes[i]).ok()?;
        Some((idx, song))
    };
    let mut train_idx: Vec<usize> = ctx.train.iter().copied().filter(|&i| !ctx.vocab.encode(&ctx.songs[i].tokens).is_empty()).collect();
    let mut valid_idx = Vec::new();
    if let Some(v) = cfg.network.validation_ratio {
        let labels: Vec<usize> = train_idx.iter().map(|&i| ctx.classes[i]).collect();
        let (inner, held) = split_dataset(&labels, 1.0 - v, cfg.seed.wrapping_add(1)).map_err(|e| Error::data(Stage::Split, e))?;
        valid_idx = held.iter().map(|&k| train_idx[k]).collect();
        train_idx = inner.iter().map(|&k| train_idx[k]).collect();
    }
    let train: Vec<SongInput> = train_idx.iter().filter_map(|&i| input(i).map(|s| s.1)).collect();
    let valid: Vec<SongInput> = valid_idx.iter().filter_map(|&i| input(i).map(|s| s.1)).collect();

    let net = cfg.network.net(ctx.emb.dim(), ctx.labels.len());
    let tc = cfg.network.train(cfg.seed);
    let workers = cfg.worker_count();
    let engine: Box<dyn BatchGradient> = if workers <= 1 { Box::new(Sequential) } else { Box::new(Threaded { workers }) };
    let valid_ref = (!valid.is_empty()).then_some(valid.as_slice());
    let (model, history) = train_classifier(&train, valid_ref, &net, &tc, engine.as_ref()).map_err(|e| Error::from((Stage::Train, e)))?;

    let mut predictions = Vec::with_capacity(ctx.test.len());
    let mut alpha = Vec::new();
    let mut untokenizable = 0;
    for &i in ctx.test {
        match input(i) {
            Some((idx, song)) => {
                let p = predict(&model, &song.vectors).map_err(|e| Error::from((Stage::Evaluate, e)))?;
                for (pos, (&tok, &w)) in idx.iter().zip(&p.weights).enumerate() {
                    alpha.push(AlphaRow { song: ctx.songs[i].id.clone(), position: pos, motif: ctx.vocab.token(tok).to_string(), weight: w });
                }
                predictions.push(p.label);
            }
            None => {
                untokenizable += 1;
                predictions.push(ctx.fallback);
            }
        }
    }
    let checkpoint = Checkpoint { params: model.params, labels: ctx.labels.to_vec(), vocab_hash: vocab_hash(ctx.vocab) };
    Ok(ModelOutcome {
        model: ModelKind::Attention,
        metrics: ctx.score(&predictions)?,
        predictions,
        untokenizable,
        history: Some(history),
        checkpoint: Some(checkpoint),
        alpha,
        song_vectors: None,
    })
}

/// Standardizes on the training vectors, trains the SVM and predicts.
fn svm_stage(ctx: &Context, kind: ModelKind, train: Vec<(usize, Vec<f64>)>, test: Vec<(usize, Option<Vec<f64>>)>) -> Result<ModelOutcome> {
    let xs: Vec<Vec<f64>> = train.iter().map(|(_, x)| x.clone()).collect();
    let ys: Vec<usize> = train.iter().map(|&(i, _)| ctx.classes[i]).collect();
    let scaler = Standardizer::fit(&xs);
    let scaled: Vec<Vec<f64>> = xs.iter().map(|x| scaler.apply(x)).collect();
    let svm = train_linear_svm(&scaled, &ys, &ctx.cfg.svm.svm(ctx.cfg.seed)).map_err(|e| Error::data(Stage::Baseline, e))?;
    let mut predictions = Vec::with_capacity(test.len());
    let mut untokenizable = 0;
    for (_, x) in &test {
        match x {
            Some(x) => predictions.push(predict_svm(&svm, &scaler.apply(x)).map_err(|e| Error::data(Stage::Baseline, e))?),
            None => {
                untokenizable += 1;
                predictions.push(ctx.fallback);
            }
        }
    }
    let dim = ctx.emb.dim();
    let mut ids = Vec::new();
    let mut data = Vec::new();
    for (i, x) in train.iter().map(|(i, x)| (*i, Some(x))).chain(test.iter().map(|(i, x)| (*i, x.as_ref()))) {
        if let Some(x) = x {
            ids.push(ctx.songs[i].id.clone());
            data.extend_from_slice(x);
        }
    }
    let rows = ids.len();
    Ok(ModelOutcome {
        model: kind,
        metrics: ctx.score(&predictions)?,
        predictions,
        untokenizable,
        history: None,
        checkpoint: None,
        alpha: Vec::new(),
        song_vectors: Some((ids, Matrix::from_vec(rows, dim, data))),
    })
}

fn run_average(ctx: &Context) -> Result<ModelOutcome> {
    let vec_of = |i: usize| average_embedding(&ctx.songs[i].tokens, ctx.vocab, &ctx.emb.input).ok();
    let train = ctx.train.iter().filter_map(|&i| vec_of(i).map(|v| (i, v))).collect();
    let test = ctx.test.iter().map(|&i| (i, vec_of(i))).collect();
    svm_stage(ctx, ModelKind::AverageSvm, train, test)
}

fn run_doc2vec(ctx: &Context) -> Result<ModelOutcome> {
    let cfg = ctx.cfg;
    let train_docs: Vec<usize> = ctx.train.iter().copied().filter(|&i| !ctx.vocab.encode(&ctx.songs[i].tokens).is_empty()).collect();
    let corpus: Vec<Vec<u32>> = train_docs.iter().map(|&i| ctx.vocab.encode(&ctx.songs[i].tokens)).collect();
    let train_cfg = folkmotif_core::sgns::SgnsConfig { epochs: cfg.doc2vec.epochs, ..cfg.embedding.sgns(cfg.seed) };
    let (dv, _) = train_pvdbow(&corpus, ctx.vocab, &train_cfg).map_err(|e| Error::from((Stage::Baseline, e)))?;
    let infer_cfg = folkmotif_core::sgns::SgnsConfig { epochs: cfg.doc2vec.infer_epochs, ..train_cfg };
    let train = train_docs.iter().enumerate().map(|(r, &i)| (i, dv.docs.row(r).to_vec())).collect();
    let mut test = Vec::with_capacity(ctx.test.len());
    for &i in ctx.test {
        let idx = ctx.vocab.encode(&ctx.songs[i].tokens);
        let v = if idx.is_empty() {
            None
        } else {
            let seed = cfg.seed.wrapping_add(i as u64 + 1);
            Some(infer_vector(&idx, &dv.output, ctx.vocab, &infer_cfg, seed).map_err(|e| Error::from((Stage::Baseline, e)))?)
        };
        test.push((i, v));
    }
    svm_stage(ctx, ModelKind::Doc2VecSvm, train, test)
}

/// Runs the configured models on an already loaded corpus. Embeddings (and
/// the vocabulary) come from the training split only.
pub fn run_pipeline(corpus: &LabeledCorpus, cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    let (songs, dropped_songs) = tokenize_corpus(&corpus.melodies, cfg.representation.into(), cfg.mw_size, cfg.multiword_mode());
    if songs.is_empty() {
        return Err(Error::data(Stage::Tokenize, "no song yields a multi-word"));
    }
    let (labels, classes) = class_indices(&songs);
    if labels.len() < 2 {
        return Err(Error::data(Stage::Split, "at least two labels are required"));
    }
    let (train, test) = split_dataset(&classes, cfg.split_ratio, cfg.seed).map_err(|e| Error::data(Stage::Split, e))?;
    let train_songs: Vec<&TokenizedSong> = train.iter().map(|&i| &songs[i]).collect();
    let (vocab, embeddings, embedding_report) = train_embeddings(&train_songs, &cfg.embedding, cfg.seed, cfg.worker_count())?;
    let data = SplitData {
        songs: &songs,
        classes: &classes,
        labels: &labels,
        train: &train,
        test: &test,
        vocab: &vocab,
        emb: &embeddings,
    };
    let mut models = Vec::new();
    let kinds: BTreeSet<ModelKind> = cfg.models.iter().copied().collect();
    for kind in kinds {
        models.push(run_model(kind, &data, cfg)?);
    }
    Ok(ExperimentOutcome {
        labels,
        songs,
        classes,
        train,
        test,
        skipped_files: corpus.diagnostics.skipped.len(),
        dropped_songs,
        vocab,
        embeddings,
        embedding_report,
        models,
    })
}

#[derive(Serialize)]
struct ModelJson<'a> {
    model: &'a str,
    accuracy: f64,
    micro_precision: f64,
    macro_precision: f64,
    precision: &'a [f64],
    precision_defined: &'a [bool],
    recall: &'a [f64],
    recall_defined: &'a [bool],
    confusion: &'a [Vec<u64>],
    total: u64,
    untokenizable_test_songs: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    train_loss: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    valid_loss: Option<&'a [f64]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    best_epoch: Option<usize>,
}

#[derive(Serialize)]
struct MetricsJson<'a> {
    experiment: &'a str,
    representation: &'a str,
    mw_size: usize,
    phrase_mode: bool,
    seed: u64,
    labels: &'a [String],
    songs: usize,
    train_size: usize,
    test_size: usize,
    skipped_files: usize,
    dropped_songs: usize,
    vocabulary_size: usize,
    embedding_objective: &'a [f64],
    models: Vec<ModelJson<'a>>,
}

/// Metrics of every model as pretty-printed JSON.
pub fn metrics_json(outcome: &ExperimentOutcome, cfg: &ExperimentConfig) -> String {
    let repr: Representation = cfg.representation.into();
    let repr = repr.to_string();
    let doc = MetricsJson {
        experiment: &cfg.name,
        representation: &repr,
        mw_size: cfg.mw_size,
        phrase_mode: cfg.phrase_mode,
        seed: cfg.seed,
        labels: &outcome.labels,
        songs: outcome.songs.len(),
        train_size: outcome.train.len(),
        test_size: outcome.test.len(),
        skipped_files: outcome.skipped_files,
        dropped_songs: outcome.dropped_songs.len(),
        vocabulary_size: outcome.vocab.len(),
        embedding_objective: &outcome.embedding_report.epoch_objective,
        models: outcome.models.iter().map(|m| model_json(m.model.name(), &m.metrics, m.untokenizable, m.history.as_ref())).collect(),
    };
    let mut s = serde_json::to_string_pretty(&doc).expect("metrics always serialize");
    s.push('\n');
    s
}

fn model_json<'a>(name: &'a str, metrics: &'a MetricsReport, untokenizable: usize, history: Option<&'a TrainHistory>) -> ModelJson<'a> {
    ModelJson {
        model: name,
        accuracy: metrics.accuracy,
        micro_precision: metrics.micro_precision(),
        macro_precision: metrics.macro_precision,
        precision: &metrics.precision,
        precision_defined: &metrics.precision_defined,
        recall: &metrics.recall,
        recall_defined: &metrics.recall_defined,
        confusion: &metrics.confusion,
        total: metrics.total,
        untokenizable_test_songs: untokenizable,
        train_loss: history.map(|h| h.train_loss.as_slice()),
        valid_loss: history.filter(|h| !h.valid_loss.is_empty()).map(|h| h.valid_loss.as_slice()),
        best_epoch: history.map(|h| h.best_epoch),
    }
}

#[derive(Serialize)]
struct SingleJson<'a> {
    labels: &'a [String],
    #[serde(flatten)]
    model: ModelJson<'a>,
}

/// Metrics JSON for a single model evaluated outside a full experiment.
pub fn single_model_json(name: &str, labels: &[String], metrics: &MetricsReport, untokenizable: usize) -> String {
    let doc = SingleJson { labels, model: model_json(name, metrics, untokenizable, None) };
    let mut s = serde_json::to_string_pretty(&doc).expect("metrics always serialize");
    s.push('\n');
    s
}

/// Aligned plain-text summary: one row per model, then per-class rates.
pub fn text_report(outcome: &ExperimentOutcome, cfg: &ExperimentConfig) -> String {
    let repr: Representation = cfg.representation.into();
    let mut out = String::new();
    writeln!(out, "{}", cfg.name).unwrap();
    writeln!(
        out,
        "songs {} ({} classes), train {}, test {}, skipped files {}, dropped songs {}",
        outcome.songs.len(),
        outcome.labels.len(),
        outcome.train.len(),
        outcome.test.len(),
        outcome.skipped_files,
        outcome.dropped_songs.len()
    )
    .unwrap();
    writeln!(out).unwrap();
    writeln!(out, "{:<12} {:>7}  {:<12} {:>9} {:>9} {:>11}", "Repres.", "mw size", "Model", "Precision", "Accuracy", "Macro prec.").unwrap();
    for m in &outcome.models {
        writeln!(
            out,
            "{:<12} {:>7}  {:<12} {:>9.4} {:>9.4} {:>11.4}",
            repr.to_string(),
            cfg.mw_size,
            m.model.name(),
            m.metrics.micro_precision(),
            m.metrics.accuracy,
            m.metrics.macro_precision
        )
        .unwrap();
    }
    for m in &outcome.models {
        writeln!(out).unwrap();
        writeln!(out, "{} by label", m.model.name()).unwrap();
        out.push_str(&per_class_table(&outcome.labels, &m.metrics));
    }
    out
}

/// Precision, recall and support per label, with undefined precision shown
/// as `n/a`.
pub fn per_class_table(labels: &[String], metrics: &MetricsReport) -> String {
    let width = labels.iter().map(String::len).max().unwrap_or(5).max(5);
    let mut out = String::new();
    writeln!(out, "{:<width$} {:>9} {:>7} {:>8}", "Label", "Precision", "Recall", "Support").unwrap();
    for (c, label) in labels.iter().enumerate() {
        let support: u64 = metrics.confusion[c].iter().sum();
        let p = if metrics.precision_defined[c] { format!("{:.4}", metrics.precision[c]) } else { "n/a".into() };
        writeln!(out, "{label:<width$} {p:>9} {:>7.4} {support:>8}", metrics.recall[c]).unwrap();
    }
    writeln!(out, "accuracy {:.4} over {} songs", metrics.accuracy, metrics.total).unwrap();
    out
}

fn write_file(dir: &Path, name: &str, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::io(&path, e))?;
    written.push(path);
    Ok(())
}

/// Writes every artifact of `outcome` into `dir`, returning the paths.
pub fn write_artifacts(outcome: &ExperimentOutcome, cfg: &ExperimentConfig, dir: &Path) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    write_file(dir, "config.json", &cfg.to_json(), &mut written)?;
    write_file(dir, "vocab.tsv", &write_vocab(&outcome.vocab), &mut written)?;
    write_file(dir, "embeddings.txt", &write_vectors(outcome.vocab.tokens(), &outcome.embeddings.input), &mut written)?;
    let mut split = String::new();
    let test: BTreeSet<usize> = outcome.test.iter().copied().collect();
    for (i, s) in outcome.songs.iter().enumerate() {
        writeln!(split, "{}\t{}\t{}", s.id, s.label, if test.contains(&i) { "test" } else { "train" }).unwrap();
    }
    write_file(dir, "split.tsv", &split, &mut written)?;
    for m in &outcome.models {
        match m.model {
            ModelKind::Attention => {
                if let Some(c) = &m.checkpoint {
                    write_file(dir, "attention.ckpt", &write_checkpoint(c), &mut written)?;
                }
                write_file(dir, "attention_alpha.csv", &write_alpha_csv(&m.alpha), &mut written)?;
            }
            ModelKind::Doc2VecSvm | ModelKind::AverageSvm => {
                if let Some((ids, vecs)) = &m.song_vectors {
                    let name = if m.model == ModelKind::Doc2VecSvm { "doc2vec_vectors.txt" } else { "average_vectors.txt" };
                    write_file(dir, name, &write_vectors(ids, vecs), &mut written)?;
                }
            }
        }
    }
    write_file(dir, "metrics.json", &metrics_json(outcome, cfg), &mut written)?;
    write_file(dir, "report.txt", &text_report(outcome, cfg), &mut written)?;
    Ok(written)
}

/// Loads the configured corpora, runs the pipeline and writes the
/// artifacts to `cfg.output_dir`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutcome> {
    cfg.validate()?;
    if cfg.corpora.is_empty() {
        return Err(Error::Usage("config: no corpora given".into()));
    }
    let corpus = load_sources(&cfg.corpora)?;
    let outcome = run_pipeline(&corpus, cfg)?;
    write_artifacts(&outcome, cfg, &cfg.output_dir)?;
    Ok(outcome)
}
