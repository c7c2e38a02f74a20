//! Song classifier: BGRU encoder, attention pooling and a softmax output
//! layer trained on the negative log-likelihood of the correct label.

use alloc::vec;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::attention::{attend, attend_backward, AttentionParams, Attended};
use crate::gru::{bgru_backward, bgru_encode, Encoding, GruParams};
use crate::linalg::Matrix;
use crate::math::{ln, softmax_in_place};

/// Longest song, in motifs, fed to the encoder. Longer songs are truncated.
pub const MAX_SONG_LEN: usize = 500;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NetError {
    #[error("song has no in-vocabulary motifs")]
    Untokenizable,
    #[error("label {label} outside 0..{classes}")]
    LabelOutOfRange { label: usize, classes: usize },
    #[error("input dimension {got} does not match the model's {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid configuration: {0}")]
    Config(&'static str),
    #[error("empty training set")]
    EmptyDataset,
    #[error("non-finite gradient or loss in epoch {epoch}")]
    Diverged { epoch: usize },
}

/// Architecture sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NetConfig {
    pub input_dim: usize,
    /// Hidden units per GRU direction.
    pub hidden: usize,
    pub attention_dim: usize,
    pub classes: usize,
}

impl NetConfig {
    pub fn validate(&self) -> Result<(), NetError> {
        if self.input_dim == 0 || self.hidden == 0 || self.attention_dim == 0 {
            return Err(NetError::Config("dimensions must be positive"));
        }
        if self.classes < 2 {
            return Err(NetError::Config("at least two classes are required"));
        }
        Ok(())
    }
}

/// Output layer, `L × 2H` weights and `L × 1` bias.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    pub weight: Matrix,
    pub bias: Matrix,
}

/// Every trainable parameter. Gradients use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    pub gru: GruParams,
    pub attention: AttentionParams,
    pub output: ClassifierParams,
}

impl ModelParams {
    pub fn zeros(cfg: &NetConfig) -> Self {
        let ann = 2 * cfg.hidden;
        ModelParams {
            gru: GruParams::zeros(cfg.input_dim, cfg.hidden),
            attention: AttentionParams::zeros(ann, cfg.attention_dim),
            output: ClassifierParams { weight: Matrix::zeros(cfg.classes, ann), bias: Matrix::zeros(cfg.classes, 1) },
        }
    }

    /// Glorot-uniform matrices and zero biases.
    pub fn init(cfg: &NetConfig, rng: &mut ChaCha8Rng) -> Self {
        let ann = 2 * cfg.hidden;
        let gru = GruParams::init(cfg.input_dim, cfg.hidden, rng);
        let attention = AttentionParams::init(ann, cfg.attention_dim, rng);
        let output = ClassifierParams { weight: Matrix::glorot(cfg.classes, ann, rng), bias: Matrix::zeros(cfg.classes, 1) };
        ModelParams { gru, attention, output }
    }

    pub fn config(&self) -> NetConfig {
        NetConfig {
            input_dim: self.gru.forward.input(),
            hidden: self.gru.hidden(),
            attention_dim: self.attention.w_a.rows(),
            classes: self.output.weight.rows(),
        }
    }

    /// Named tensors in a fixed order; checkpoints and gradient checks rely
    /// on it.
    pub fn tensors(&self) -> Vec<(alloc::string::String, &Matrix)> {
        let mut out = Vec::with_capacity(23);
        for (dir, p) in [("gru.forward", &self.gru.forward), ("gru.backward", &self.gru.backward)] {
            for (n, m) in p.tensors() {
                out.push((alloc::format!("{dir}.{n}"), m));
            }
        }
        for (n, m) in self.attention.tensors() {
            out.push((alloc::format!("attention.{n}"), m));
        }
        out.push(("output.weight".into(), &self.output.weight));
        out.push(("output.bias".into(), &self.output.bias));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Matrix> {
        let mut out: Vec<&mut Matrix> = Vec::with_capacity(23);
        out.extend(self.gru.forward.tensors_mut());
        out.extend(self.gru.backward.tensors_mut());
        out.extend(self.attention.tensors_mut());
        out.push(&mut self.output.weight);
        out.push(&mut self.output.bias);
        out
    }

    pub fn add_scaled(&mut self, scale: f64, other: &ModelParams) {
        let others: Vec<&Matrix> = other.tensors().into_iter().map(|(_, m)| m).collect();
        for (m, o) in self.tensors_mut().into_iter().zip(others) {
            m.add_scaled(scale, o);
        }
    }

    pub fn scale(&mut self, s: f64) {
        for m in self.tensors_mut() {
            m.as_mut_slice().iter_mut().for_each(|x| *x *= s);
        }
    }

    pub fn norm(&self) -> f64 {
        crate::math::sqrt(self.tensors().iter().map(|(_, m)| m.sum_sq()).sum())
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|(_, m)| m.is_finite())
    }
}

/// One song: its motif vectors in order (`T × d`) and its class.
#[derive(Debug, Clone, PartialEq)]
pub struct SongInput {
    pub vectors: Matrix,
    pub label: usize,
}

impl SongInput {
    /// Looks up embedding rows for in-vocabulary motif indices, keeping at
    /// most [`MAX_SONG_LEN`] of them.
    pub fn from_indices(indices: &[u32], embeddings: &Matrix, label: usize) -> Result<Self, NetError> {
        if indices.is_empty() {
            return Err(NetError::Untokenizable);
        }
        let t_len = indices.len().min(MAX_SONG_LEN);
        let d = embeddings.cols();
        let mut data = Vec::with_capacity(t_len * d);
        for &i in &indices[..t_len] {
            data.extend_from_slice(embeddings.row(i as usize));
        }
        Ok(SongInput { vectors: Matrix::from_vec(t_len, d, data), label })
    }

    pub fn len(&self) -> usize {
        self.vectors.rows()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.rows() == 0
    }
}

/// Everything the backward pass needs from a forward pass.
#[derive(Debug, Clone)]
pub struct ForwardCache {
    pub encoding: Encoding,
    pub attended: Attended,
    pub probs: Vec<f64>,
}

fn check_input(vectors: &Matrix, params: &ModelParams) -> Result<(), NetError> {
    if vectors.rows() == 0 {
        return Err(NetError::Untokenizable);
    }
    let expected = params.gru.forward.input();
    if vectors.cols() != expected {
        return Err(NetError::DimensionMismatch { expected, got: vectors.cols() });
    }
    Ok(())
}

pub fn forward(vectors: &Matrix, params: &ModelParams) -> Result<ForwardCache, NetError> {
    check_input(vectors, params)?;
    let encoding = bgru_encode(vectors, &params.gru);
    let attended = attend(&encoding.annotations, &params.attention);
    let mut probs = params.output.bias.as_slice().to_vec();
    params.output.weight.mul_vec_add(&attended.context, &mut probs);
    softmax_in_place(&mut probs);
    Ok(ForwardCache { encoding, attended, probs })
}

fn nll(probs: &[f64], label: usize) -> f64 {
    -ln(probs[label])
}

/// Class probabilities and the negative log-likelihood of the song's label.
pub fn forward_loss(song: &SongInput, params: &ModelParams) -> Result<(Vec<f64>, f64), NetError> {
    let classes = params.output.weight.rows();
    if song.label >= classes {
        return Err(NetError::LabelOutOfRange { label: song.label, classes });
    }
    let cache = forward(&song.vectors, params)?;
    let loss = nll(&cache.probs, song.label);
    Ok((cache.probs, loss))
}

#[derive(Debug, Clone)]
pub struct Backward {
    pub grads: ModelParams,
    pub loss: f64,
    /// `∂loss/∂e_j` for each attention energy.
    pub energy_grads: Vec<f64>,
}

/// Exact gradient of the song's loss with respect to every parameter. The
/// input vectors are treated as constants.
pub fn backward(song: &SongInput, params: &ModelParams) -> Result<Backward, NetError> {
    let classes = params.output.weight.rows();
    if song.label >= classes {
        return Err(NetError::LabelOutOfRange { label: song.label, classes });
    }
    let cache = forward(&song.vectors, params)?;
    let mut grads = ModelParams::zeros(&params.config());
    let loss = accumulate_backward(song, params, &cache, &mut grads);
    let energy_grads = energy_grads(song, params, &cache);
    if !loss.is_finite() || !grads.is_finite() {
        return Err(NetError::Diverged { epoch: 0 });
    }
    Ok(Backward { grads, loss, energy_grads })
}

fn output_backward(params: &ModelParams, cache: &ForwardCache, label: usize, grads: &mut ModelParams) -> Vec<f64> {
    let mut d_logits = cache.probs.clone();
    d_logits[label] -= 1.0;
    grads.output.weight.add_outer(1.0, &d_logits, &cache.attended.context);
    crate::math::axpy(1.0, &d_logits, grads.output.bias.as_mut_slice());
    let mut d_context = vec![0.0; cache.attended.context.len()];
    params.output.weight.mul_t_vec_add(&d_logits, &mut d_context);
    d_context
}

fn energy_grads(song: &SongInput, params: &ModelParams, cache: &ForwardCache) -> Vec<f64> {
    let mut scratch = ModelParams::zeros(&params.config());
    let d_context = output_backward(params, cache, song.label, &mut scratch);
    let (_, de) = attend_backward(&cache.encoding.annotations, &cache.attended, &d_context, &params.attention, &mut scratch.attention);
    de
}

/// Adds the song's gradient into `grads` and returns its loss.
fn accumulate_backward(song: &SongInput, params: &ModelParams, cache: &ForwardCache, grads: &mut ModelParams) -> f64 {
    let d_context = output_backward(params, cache, song.label, grads);
    let (d_ann, _) = attend_backward(
        &cache.encoding.annotations,
        &cache.attended,
        &d_context,
        &params.attention,
        &mut grads.attention,
    );
    bgru_backward(&song.vectors, &cache.encoding, &d_ann, &params.gru, &mut grads.gru);
    nll(&cache.probs, song.label)
}

/// Computes the summed gradient and summed loss of a mini-batch. The
/// training loop is generic over this so that callers can spread a batch
/// over several workers.
pub trait BatchGradient {
    fn batch(&self, params: &ModelParams, songs: &[&SongInput]) -> Result<(ModelParams, f64), NetError>;
}

/// Single-threaded, in-order batch gradient.
#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl BatchGradient for Sequential {
    fn batch(&self, params: &ModelParams, songs: &[&SongInput]) -> Result<(ModelParams, f64), NetError> {
        let mut grads = ModelParams::zeros(&params.config());
        let mut loss = 0.0;
        for song in songs {
            loss += song_gradient_into(song, params, &mut grads)?;
        }
        Ok((grads, loss))
    }
}

/// Adds one song's gradient into `grads`, returning its loss.
pub fn song_gradient_into(song: &SongInput, params: &ModelParams, grads: &mut ModelParams) -> Result<f64, NetError> {
    let classes = params.output.weight.rows();
    if song.label >= classes {
        return Err(NetError::LabelOutOfRange { label: song.label, classes });
    }
    let cache = forward(&song.vectors, params)?;
    Ok(accumulate_backward(song, params, &cache, grads))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub batch_size: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub clip_norm: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig { batch_size: 10, learning_rate: 0.05, epochs: 30, clip_norm: 5.0, seed: 0 }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainHistory {
    /// Mean training loss per epoch, from the forward passes made while
    /// training.
    pub train_loss: Vec<f64>,
    /// Mean held-out loss per epoch, when a validation set is given.
    pub valid_loss: Vec<f64>,
    /// Epoch whose parameters were returned.
    pub best_epoch: usize,
}

/// A trained classifier.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionModel {
    pub params: ModelParams,
}

/// Mean loss over a set of songs.
pub fn mean_loss(songs: &[SongInput], params: &ModelParams) -> Result<f64, NetError> {
    let mut total = 0.0;
    for s in songs {
        total += forward_loss(s, params)?.1;
    }
    Ok(total / songs.len().max(1) as f64)
}

/// Mini-batch SGD on the mean batch NLL with gradient-norm clipping.
///
/// Each epoch reshuffles the training set with a generator seeded from
/// `config.seed`. With a validation set the parameters of the epoch with the
/// lowest held-out loss are returned, otherwise the final ones.
pub fn train_classifier<G: BatchGradient + ?Sized>(
    train: &[SongInput],
    valid: Option<&[SongInput]>,
    net: &NetConfig,
    config: &TrainConfig,
    engine: &G,
) -> Result<(AttentionModel, TrainHistory), NetError> {
    net.validate()?;
    if train.is_empty() {
        return Err(NetError::EmptyDataset);
    }
    if config.batch_size == 0 || !(config.learning_rate > 0.0) {
        return Err(NetError::Config("batch size and learning rate must be positive"));
    }
    for s in train.iter().chain(valid.into_iter().flatten()) {
        if s.label >= net.classes {
            return Err(NetError::LabelOutOfRange { label: s.label, classes: net.classes });
        }
        if s.vectors.cols() != net.input_dim {
            return Err(NetError::DimensionMismatch { expected: net.input_dim, got: s.vectors.cols() });
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut params = ModelParams::init(net, &mut rng);
    let mut history = TrainHistory::default();
    let mut best: Option<(f64, ModelParams)> = None;
    let mut order: Vec<usize> = (0..train.len()).collect();

    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(config.batch_size) {
            let batch: Vec<&SongInput> = chunk.iter().map(|&i| &train[i]).collect();
            let (mut grads, loss) = engine.batch(&params, &batch)?;
            grads.scale(1.0 / batch.len() as f64);
            let norm = grads.norm();
            if !norm.is_finite() || !loss.is_finite() {
                return Err(NetError::Diverged { epoch });
            }
            if config.clip_norm > 0.0 && norm > config.clip_norm {
                grads.scale(config.clip_norm / norm);
            }
            params.add_scaled(-config.learning_rate, &grads);
            epoch_loss += loss;
        }
        let mean = epoch_loss / train.len() as f64;
        if !mean.is_finite() {
            return Err(NetError::Diverged { epoch });
        }
        history.train_loss.push(mean);
        if let Some(valid) = valid.filter(|v| !v.is_empty()) {
            let vl = mean_loss(valid, &params)?;
            history.valid_loss.push(vl);
            if best.as_ref().map_or(true, |(b, _)| vl < *b) {
                best = Some((vl, params.clone()));
                history.best_epoch = epoch;
            }
        } else {
            history.best_epoch = epoch;
        }
    }
    if let Some((_, p)) = best {
        params = p;
    }
    Ok((AttentionModel { params }, history))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub label: usize,
    pub probs: Vec<f64>,
    /// Attention weight of each input motif.
    pub weights: Vec<f64>,
}

/// Most probable class (lowest index on ties) with probabilities and
/// attention weights.
pub fn predict(model: &AttentionModel, vectors: &Matrix) -> Result<Prediction, NetError> {
    let cache = forward(vectors, &model.params)?;
    let label = argmax(&cache.probs);
    Ok(Prediction { label, probs: cache.probs, weights: cache.attended.weights })
}

pub(crate) fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}
