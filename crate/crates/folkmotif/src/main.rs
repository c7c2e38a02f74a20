use std::collections::BTreeSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use folkmotif::config::{ExperimentConfig, Repr, Source};
use folkmotif::corpus::{load_sources, LabeledCorpus};
use folkmotif::error::{Error, Result, Stage};
use folkmotif::formats::{
    read_checkpoint, read_tokens, read_vectors, read_vocab, vocab_hash, write_alpha_csv, write_checkpoint, write_tokens,
    write_vectors, write_vocab, AlphaRow, Checkpoint, TokenizedSong,
};
use folkmotif::harness::{self, SplitData};
use folkmotif::jsonl::{read_jsonl, write_jsonl};
use folkmotif::parallel::Threaded;
use folkmotif::ModelKind;
use folkmotif_core::embedding::{most_similar, EmbeddingError, EmbeddingMatrix};
use folkmotif_core::linalg::Matrix;
use folkmotif_core::metrics::evaluate;
use folkmotif_core::network::{predict, train_classifier, BatchGradient, Sequential, SongInput};
use folkmotif_core::split::split_dataset;
use folkmotif_core::synth::{generate, SynthConfig};
use folkmotif_core::Vocabulary;

#[derive(Parser)]
#[command(name = "folkmotif", version, about = "Motif embeddings and attention classification for folk melodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse kern files (or directories of them) into a JSONL corpus.
    Ingest {
        /// LABEL=PATH; repeat for each collection.
        #[arg(long = "source", required = true, value_parser = parse_source)]
        sources: Vec<Source>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Turn a JSONL corpus into multi-word token sequences.
    Tokenize {
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "intervallic")]
        mode: ModeArg,
        #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(2..=3))]
        mw_size: u8,
        #[arg(long)]
        phrase_mode: bool,
        #[arg(long, default_value_t = 5.0)]
        phrase_delta: f64,
        #[arg(long, default_value_t = 1e-4)]
        phrase_threshold: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Stratified train/test split of a token file.
    Split {
        #[arg(long)]
        tokens: PathBuf,
        #[arg(long, default_value_t = 0.75)]
        ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        train_out: PathBuf,
        #[arg(long)]
        test_out: PathBuf,
    },
    /// Train skip-gram motif embeddings.
    TrainEmbeddings {
        #[arg(long)]
        tokens: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        vocab_out: PathBuf,
        #[arg(long, default_value_t = 150)]
        dim: usize,
        #[arg(long, default_value_t = 4)]
        window: usize,
        #[arg(long, default_value_t = 5)]
        negatives: usize,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 1)]
        min_count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Nearest motifs by cosine similarity.
    Similar {
        token: String,
        #[arg(long)]
        embeddings: PathBuf,
        #[arg(long, default_value_t = 10)]
        k: usize,
    },
    /// Train the attention classifier on every song of a token file.
    TrainClassifier {
        #[arg(long)]
        tokens: PathBuf,
        #[command(flatten)]
        inputs: EmbeddingInputs,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 200)]
        hidden: usize,
        #[arg(long, default_value_t = 100)]
        attention_dim: usize,
        #[arg(long, default_value_t = 30)]
        epochs: usize,
        #[arg(long, default_value_t = 0.05)]
        lr: f64,
        #[arg(long, default_value_t = 10)]
        batch_size: usize,
        #[arg(long, default_value_t = 5.0)]
        clip: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        mode: ModeFlags,
    },
    /// Apply a trained classifier to a token file and report metrics.
    Evaluate {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        tokens: PathBuf,
        #[command(flatten)]
        inputs: EmbeddingInputs,
        #[arg(long)]
        alpha_out: Option<PathBuf>,
        #[arg(long)]
        metrics_out: Option<PathBuf>,
    },
    /// Train and score a song-vector baseline with a linear SVM.
    Baseline {
        #[arg(value_enum)]
        kind: BaselineArg,
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        test: PathBuf,
        #[command(flatten)]
        inputs: EmbeddingInputs,
        #[arg(long, default_value_t = 0.01)]
        lambda: f64,
        #[arg(long, default_value_t = 200)]
        svm_epochs: usize,
        #[arg(long, default_value_t = 20)]
        doc_epochs: usize,
        #[arg(long, default_value_t = 50)]
        infer_epochs: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        vectors_out: Option<PathBuf>,
        #[arg(long)]
        metrics_out: Option<PathBuf>,
    },
    /// Run experiment 1 (two collections, all models) or 2 (three
    /// collections, attention) from a JSON config.
    Experiment {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        number: u8,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Write a synthetic labelled corpus as JSONL.
    SynthCorpus {
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        classes: usize,
        #[arg(long, default_value_t = 200)]
        songs_per_class: usize,
        #[arg(long, default_value_t = 24)]
        min_notes: usize,
        #[arg(long, default_value_t = 48)]
        max_notes: usize,
        #[arg(long, default_value_t = 0.3)]
        noise: f64,
        #[arg(long, default_value_t = 6)]
        motifs_per_class: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Intervallic,
    Rhythmic,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Average,
    Doc2vec,
}

#[derive(Args)]
struct ModeFlags {
    /// Single worker, bit-reproducible output.
    #[arg(long)]
    deterministic: bool,
    /// Worker threads when not deterministic (0 = all cores).
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

impl ModeFlags {
    fn workers(&self) -> usize {
        let cfg = ExperimentConfig { deterministic: self.deterministic, workers: self.workers, ..ExperimentConfig::default() };
        cfg.worker_count()
    }
}

#[derive(Args)]
struct EmbeddingInputs {
    #[arg(long)]
    embeddings: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
}

fn parse_source(s: &str) -> std::result::Result<Source, String> {
    let (label, path) = s.split_once('=').ok_or("expected LABEL=PATH")?;
    if label.is_empty() || label.contains(char::is_whitespace) {
        return Err("label must be a single non-empty word".into());
    }
    Ok(Source { path: PathBuf::from(path), label: label.to_string() })
}

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn emit(out: Option<&Path>, text: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Error::io(p, e)),
        None => std::io::stdout().write_all(text).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn data(stage: Stage, path: &Path) -> impl Fn(folkmotif::formats::FormatError) -> Error + '_ {
    move |e| Error::data(stage, format!("{}: {e}", path.display()))
}

fn report_skips(corpus: &LabeledCorpus) {
    for s in &corpus.diagnostics.skipped {
        eprintln!("skipped {}: {}", s.path.display(), s.reason);
    }
    eprintln!("loaded {} melodies, skipped {} files", corpus.melodies.len(), corpus.diagnostics.skipped.len());
}

fn load_tokens(path: &Path, stage: Stage) -> Result<Vec<TokenizedSong>> {
    let songs = read_tokens(&read_text(path)?).map_err(data(stage, path))?;
    if songs.is_empty() {
        return Err(Error::data(stage, format!("{} holds no songs", path.display())));
    }
    Ok(songs)
}

/// Embedding input matrix and vocabulary, checked against each other.
fn load_embeddings(inputs: &EmbeddingInputs, stage: Stage) -> Result<(Vocabulary, Matrix)> {
    let vocab = read_vocab(&read_text(&inputs.vocab)?).map_err(data(stage, &inputs.vocab))?;
    let (keys, m) = read_vectors(&read_text(&inputs.embeddings)?).map_err(data(stage, &inputs.embeddings))?;
    if keys != vocab.tokens() {
        return Err(Error::data(stage, "embedding rows do not match the vocabulary"));
    }
    Ok((vocab, m))
}

fn label_indices(songs: &[TokenizedSong], labels: &[String], stage: Stage) -> Result<Vec<usize>> {
    songs
        .iter()
        .map(|s| {
            labels.iter().position(|l| *l == s.label).ok_or_else(|| Error::data(stage, format!("song {} has unknown label {:?}", s.id, s.label)))
        })
        .collect()
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest { sources, out } => {
            let corpus = load_sources(&sources)?;
            report_skips(&corpus);
            emit(out.as_deref(), &write_jsonl(&corpus.melodies))
        }
        Command::Tokenize { corpus, mode, mw_size, phrase_mode, phrase_delta, phrase_threshold, out } => {
            let melodies = read_jsonl(&fs::read(&corpus).map_err(|e| Error::io(&corpus, e))?)
                .map_err(|e| Error::data(Stage::Tokenize, format!("{}: {e}", corpus.display())))?;
            let cfg = ExperimentConfig {
                representation: match mode {
                    ModeArg::Intervallic => Repr::Intervallic,
                    ModeArg::Rhythmic => Repr::Rhythmic,
                },
                mw_size: mw_size as usize,
                phrase_mode,
                phrase_delta,
                phrase_threshold,
                ..ExperimentConfig::default()
            };
            let (songs, dropped) = harness::tokenize_corpus(&melodies, cfg.representation.into(), cfg.mw_size, cfg.multiword_mode());
            for (id, why) in &dropped {
                eprintln!("dropped {id}: {why}");
            }
            emit(out.as_deref(), write_tokens(&songs).as_bytes())
        }
        Command::Split { tokens, ratio, seed, train_out, test_out } => {
            let songs = load_tokens(&tokens, Stage::Split)?;
            let (_, classes) = harness::class_indices(&songs);
            let (train, test) = split_dataset(&classes, ratio, seed).map_err(|e| Error::data(Stage::Split, e))?;
            let pick = |idx: &[usize]| idx.iter().map(|&i| songs[i].clone()).collect::<Vec<_>>();
            emit(Some(&train_out), write_tokens(&pick(&train)).as_bytes())?;
            emit(Some(&test_out), write_tokens(&pick(&test)).as_bytes())?;
            eprintln!("train {} songs, test {} songs", train.len(), test.len());
            Ok(())
        }
        Command::TrainEmbeddings { tokens, out, vocab_out, dim, window, negatives, epochs, min_count, seed, mode } => {
            let songs = load_tokens(&tokens, Stage::Embed)?;
            let base = ExperimentConfig::default().embedding;
            let settings = folkmotif::config::EmbeddingSettings { dim, window, negatives, epochs, min_count, ..base };
            let refs: Vec<&TokenizedSong> = songs.iter().collect();
            let (vocab, emb, report) = harness::train_embeddings(&refs, &settings, seed, mode.workers())?;
            for (e, obj) in report.epoch_objective.iter().enumerate() {
                eprintln!("epoch {e}: mean objective {obj:.6}");
            }
            emit(Some(&out), write_vectors(vocab.tokens(), &emb.input).as_bytes())?;
            emit(Some(&vocab_out), write_vocab(&vocab).as_bytes())
        }
        Command::Similar { token, embeddings, k } => {
            let (keys, m) = read_vectors(&read_text(&embeddings)?).map_err(data(Stage::Query, &embeddings))?;
            let counts = vec![1; keys.len()];
            let vocab = Vocabulary::from_parts(keys, counts, 1).map_err(|e| Error::data(Stage::Query, e))?;
            match most_similar(&m, &vocab, &token, k) {
                Ok(hits) => {
                    let text: String = hits.iter().map(|(t, c)| format!("{t}\t{c:.4}\n")).collect();
                    emit(None, text.as_bytes())
                }
                Err(e @ EmbeddingError::ZeroK) => Err(Error::Usage(e.to_string())),
                Err(e) => Err(Error::data(Stage::Query, e)),
            }
        }
        Command::TrainClassifier { tokens, inputs, out, hidden, attention_dim, epochs, lr, batch_size, clip, seed, mode } => {
            let songs = load_tokens(&tokens, Stage::Train)?;
            let (vocab, m) = load_embeddings(&inputs, Stage::Train)?;
            let (labels, classes) = harness::class_indices(&songs);
            let mut train = Vec::new();
            for (s, &c) in songs.iter().zip(&classes) {
                match SongInput::from_indices(&vocab.encode(&s.tokens), &m, c) {
                    Ok(x) => train.push(x),
                    Err(e) => eprintln!("skipping {}: {e}", s.id),
                }
            }
            let net = folkmotif_core::network::NetConfig { input_dim: m.cols(), hidden, attention_dim, classes: labels.len() };
            let tc = folkmotif_core::network::TrainConfig { batch_size, learning_rate: lr, epochs, clip_norm: clip, seed };
            let workers = mode.workers();
            let engine: Box<dyn BatchGradient> = if workers <= 1 { Box::new(Sequential) } else { Box::new(Threaded { workers }) };
            let (model, history) = train_classifier(&train, None, &net, &tc, engine.as_ref()).map_err(|e| Error::from((Stage::Train, e)))?;
            for (e, l) in history.train_loss.iter().enumerate() {
                eprintln!("epoch {e}: mean loss {l:.6}");
            }
            let ckpt = Checkpoint { params: model.params, labels, vocab_hash: vocab_hash(&vocab) };
            emit(Some(&out), write_checkpoint(&ckpt).as_bytes())
        }
        Command::Evaluate { model, tokens, inputs, alpha_out, metrics_out } => {
            let ckpt = read_checkpoint(&read_text(&model)?).map_err(data(Stage::Evaluate, &model))?;
            let songs = load_tokens(&tokens, Stage::Evaluate)?;
            let (vocab, m) = load_embeddings(&inputs, Stage::Evaluate)?;
            if vocab_hash(&vocab) != ckpt.vocab_hash {
                return Err(Error::data(Stage::Evaluate, "vocabulary does not match the one the model was trained with"));
            }
            let gold = label_indices(&songs, &ckpt.labels, Stage::Evaluate)?;
            let model = folkmotif_core::network::AttentionModel { params: ckpt.params };
            let mut predicted = Vec::new();
            let mut alpha = Vec::new();
            let mut gold_kept = Vec::new();
            for (s, &g) in songs.iter().zip(&gold) {
                let idx = vocab.encode(&s.tokens);
                let x = match SongInput::from_indices(&idx, &m, g) {
                    Ok(x) => x,
                    Err(e) => {
                        eprintln!("skipping {}: {e}", s.id);
                        continue;
                    }
                };
                let p = predict(&model, &x.vectors).map_err(|e| Error::from((Stage::Evaluate, e)))?;
                for (pos, (&t, &w)) in idx.iter().zip(&p.weights).enumerate() {
                    alpha.push(AlphaRow { song: s.id.clone(), position: pos, motif: vocab.token(t).to_string(), weight: w });
                }
                predicted.push(p.label);
                gold_kept.push(g);
            }
            let metrics = evaluate(&predicted, &gold_kept, ckpt.labels.len()).map_err(|e| Error::data(Stage::Evaluate, e))?;
            if let Some(p) = alpha_out {
                emit(Some(&p), write_alpha_csv(&alpha).as_bytes())?;
            }
            if let Some(p) = metrics_out {
                let untokenizable = songs.len() - gold_kept.len();
                emit(Some(&p), harness::single_model_json("attention", &ckpt.labels, &metrics, untokenizable).as_bytes())?;
            }
            emit(None, harness::per_class_table(&ckpt.labels, &metrics).as_bytes())
        }
        Command::Baseline { kind, train, test, inputs, lambda, svm_epochs, doc_epochs, infer_epochs, seed, vectors_out, metrics_out } => {
            let train_songs = load_tokens(&train, Stage::Baseline)?;
            let test_songs = load_tokens(&test, Stage::Baseline)?;
            let (vocab, m) = load_embeddings(&inputs, Stage::Baseline)?;
            let mut songs = train_songs;
            let n_train = songs.len();
            songs.extend(test_songs);
            let (labels, classes) = harness::class_indices(&songs);
            let train_idx: Vec<usize> = (0..n_train).collect();
            let test_idx: Vec<usize> = (n_train..songs.len()).collect();
            let emb = EmbeddingMatrix { output: Matrix::zeros(m.rows(), m.cols()), input: m };
            let mut cfg = ExperimentConfig { seed, ..ExperimentConfig::default() };
            cfg.svm.lambda = lambda;
            cfg.svm.epochs = svm_epochs;
            cfg.doc2vec.epochs = doc_epochs;
            cfg.doc2vec.infer_epochs = infer_epochs;
            cfg.embedding.dim = emb.dim();
            let model = match kind {
                BaselineArg::Average => ModelKind::AverageSvm,
                BaselineArg::Doc2vec => ModelKind::Doc2VecSvm,
            };
            let split = SplitData { songs: &songs, classes: &classes, labels: &labels, train: &train_idx, test: &test_idx, vocab: &vocab, emb: &emb };
            let outcome = harness::run_model(model, &split, &cfg)?;
            if let (Some(p), Some((ids, v))) = (vectors_out, &outcome.song_vectors) {
                emit(Some(&p), write_vectors(ids, v).as_bytes())?;
            }
            if let Some(p) = metrics_out {
                emit(Some(&p), harness::single_model_json(model.name(), &labels, &outcome.metrics, outcome.untokenizable).as_bytes())?;
            }
            emit(None, harness::per_class_table(&labels, &outcome.metrics).as_bytes())
        }
        Command::Experiment { number, config, output_dir } => {
            let preset = ExperimentConfig::preset(number).expect("clap restricts the experiment number");
            let mut cfg = preset.overlay_json(&read_text(&config)?)?;
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            if cfg.corpora.is_empty() {
                return Err(Error::Usage("config: no corpora given".into()));
            }
            let corpus = load_sources(&cfg.corpora)?;
            report_skips(&corpus);
            let labels: BTreeSet<&str> = corpus.melodies.iter().map(|m| m.label.as_str()).collect();
            let want = if number == 1 { 2 } else { 3 };
            if labels.len() != want {
                return Err(Error::data(Stage::Ingest, format!("experiment {number} expects {want} labels, found {}", labels.len())));
            }
            let outcome = harness::run_pipeline(&corpus, &cfg)?;
            let written = harness::write_artifacts(&outcome, &cfg, &cfg.output_dir)?;
            for p in written {
                eprintln!("wrote {}", p.display());
            }
            emit(None, harness::text_report(&outcome, &cfg).as_bytes())
        }
        Command::SynthCorpus { out, classes, songs_per_class, min_notes, max_notes, noise, motifs_per_class, seed } => {
            let cfg = SynthConfig { classes, songs_per_class, min_notes, max_notes, noise, motifs_per_class, seed };
            let melodies = generate(&cfg).map_err(|e| Error::Usage(e.to_string()))?;
            emit(out.as_deref(), &write_jsonl(&melodies))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
