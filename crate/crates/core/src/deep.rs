//! Posterior class frequencies for a classifier, one retraining per draw.
//!
//! Each chain copies the training data and then, `H` times: re-initializes a
//! network, trains it, predicts class probabilities at the query point,
//! samples a pseudo-label from them and appends `(x, label)` to its data.
//! Row `n` of the resulting [`ClassPosterior`] holds the label frequencies of
//! chain `n`; the per-class uncertainty is four times their variance.
//!
//! Labels are 1-based throughout, matching the CSV fixture format.

use std::f64::consts::PI;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::engine::IgmcConfig;
use crate::error::{Error, Result};
use crate::seeding::{stream_rng, stream_seed, StreamRng};

pub const DEFAULT_HIDDEN_WIDTH: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: Vec<f64>,
    labels: Vec<usize>,
    num_classes: usize,
    feature_dim: usize,
}

impl LabeledDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Vec<usize>, num_classes: usize) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidDataset("no examples".into()));
        }
        if rows.len() != labels.len() {
            return Err(Error::InvalidDataset(format!(
                "{} feature rows but {} labels",
                rows.len(),
                labels.len()
            )));
        }
        let feature_dim = rows[0].len();
        if feature_dim == 0 {
            return Err(Error::InvalidDataset("zero-dimensional features".into()));
        }
        let mut data = LabeledDataset {
            features: Vec::with_capacity(rows.len() * feature_dim),
            labels: Vec::with_capacity(rows.len()),
            num_classes,
            feature_dim,
        };
        if num_classes < 2 {
            return Err(Error::InvalidDataset("need at least two classes".into()));
        }
        for (row, label) in rows.iter().zip(labels) {
            data.push(row, label)?;
        }
        Ok(data)
    }

    pub fn push(&mut self, x: &[f64], label: usize) -> Result<()> {
        if x.len() != self.feature_dim {
            return Err(Error::DimensionMismatch {
                expected: self.feature_dim,
                got: x.len(),
            });
        }
        if label == 0 || label > self.num_classes {
            return Err(Error::InvalidDataset(format!(
                "label {label} outside 1..={}",
                self.num_classes
            )));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidDataset("non-finite feature".into()));
        }
        self.features.extend_from_slice(x);
        self.labels.push(label);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn num_classes(&self) -> usize {
        self.num_classes
    }

    pub fn feature_dim(&self) -> usize {
        self.feature_dim
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.features[i * self.feature_dim..(i + 1) * self.feature_dim]
    }

    pub fn label(&self, i: usize) -> usize {
        self.labels[i]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    /// Reads `f1,...,fd,label`. The class count is the largest label seen,
    /// unless `num_classes` is given.
    pub fn read_csv(path: &Path, num_classes: Option<usize>) -> Result<Self> {
        let mut reader = csv::Reader::from_path(path).map_err(csv_error)?;
        let header = reader.headers().map_err(csv_error)?.clone();
        let width = header.len();
        if width < 2 || header.get(width - 1) != Some("label") {
            return Err(Error::InvalidDataset(
                "header must be f1,...,fd,label".into(),
            ));
        }
        for (i, name) in header.iter().take(width - 1).enumerate() {
            if name != format!("f{}", i + 1) {
                return Err(Error::InvalidDataset(format!(
                    "unexpected column {name:?}, expected f{}",
                    i + 1
                )));
            }
        }
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let parse = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidDataset(format!("bad number {s:?}: {e}")))
            };
            let row = record
                .iter()
                .take(width - 1)
                .map(parse)
                .collect::<Result<Vec<_>>>()?;
            let label = record[width - 1]
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::InvalidDataset(format!("bad label: {e}")))?;
            rows.push(row);
            labels.push(label);
        }
        let k = num_classes.unwrap_or_else(|| labels.iter().copied().max().unwrap_or(0));
        LabeledDataset::new(rows, labels, k)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_path(path)
            .map_err(csv_error)?;
        let mut header: Vec<String> = (1..=self.feature_dim).map(|i| format!("f{i}")).collect();
        header.push("label".into());
        writer.write_record(&header).map_err(csv_error)?;
        for i in 0..self.len() {
            let mut row: Vec<String> = self.features(i).iter().map(|v| format!("{v:.16e}")).collect();
            row.push(self.label(i).to_string());
            writer.write_record(&row).map_err(csv_error)?;
        }
        writer.flush()?;
        Ok(())
    }
}

fn csv_error(err: csv::Error) -> Error {
    Error::InvalidDataset(err.to_string())
}

/// Isotropic Gaussian blobs in the plane, one per class.
///
/// Class centers sit on a circle whose radius makes adjacent centers
/// `separation` standard deviations apart; for two classes they are at
/// `(±separation/2, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlobSpec {
    pub classes: usize,
    pub per_class: usize,
    pub separation: f64,
    pub seed: u64,
}

impl Default for BlobSpec {
    fn default() -> Self {
        BlobSpec {
            classes: 2,
            per_class: 20,
            separation: 6.0,
            seed: 0,
        }
    }
}

impl BlobSpec {
    pub fn centers(&self) -> Vec<[f64; 2]> {
        let k = self.classes as f64;
        let radius = self.separation / (2.0 * (PI / k).sin());
        (0..self.classes)
            .map(|c| {
                let angle = 2.0 * PI * c as f64 / k;
                [radius * angle.cos(), radius * angle.sin()]
            })
            .collect()
    }

    pub fn generate(&self) -> Result<LabeledDataset> {
        if self.classes < 2 || self.per_class == 0 || self.separation.is_nan() || self.separation <= 0.0 {
            return Err(Error::InvalidDataset(format!("bad blob spec {self:?}")));
        }
        let mut rng = StreamRng::seed_from_u64(self.seed);
        let mut rows = Vec::with_capacity(self.classes * self.per_class);
        let mut labels = Vec::with_capacity(rows.capacity());
        for (c, center) in self.centers().iter().enumerate() {
            for _ in 0..self.per_class {
                let dx: f64 = StandardNormal.sample(&mut rng);
                let dy: f64 = StandardNormal.sample(&mut rng);
                rows.push(vec![center[0] + dx, center[1] + dy]);
                labels.push(c + 1);
            }
        }
        LabeledDataset::new(rows, labels, self.classes)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Schedule {
    Constant,
    /// `lr · (1 + cos(π·epoch/epochs)) / 2`, stepped once per epoch.
    Cosine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub momentum: f64,
    pub schedule: Schedule,
    pub batch_size: usize,
    pub init_seed: u64,
    pub hidden_width: usize,
    /// Continue from the previous step's parameters instead of a fresh
    /// initialization. Departs from the retrain-from-scratch procedure;
    /// only useful to cut runtime.
    #[serde(default)]
    pub warm_start: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            epochs: 30,
            learning_rate: 0.002,
            momentum: 0.9,
            schedule: Schedule::Cosine,
            batch_size: 1,
            init_seed: 0,
            hidden_width: DEFAULT_HIDDEN_WIDTH,
            warm_start: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning rate must be > 0".into()));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidConfig("momentum must lie in [0, 1)".into()));
        }
        if self.batch_size == 0 || self.hidden_width == 0 {
            return Err(Error::InvalidConfig(
                "batch size and hidden width must be >= 1".into(),
            ));
        }
        Ok(())
    }

    fn learning_rate_at(&self, epoch: usize) -> f64 {
        match self.schedule {
            Schedule::Constant => self.learning_rate,
            Schedule::Cosine => {
                let progress = epoch as f64 / self.epochs as f64;
                0.5 * self.learning_rate * (1.0 + (PI * progress).cos())
            }
        }
    }
}

/// `d → w (ReLU) → K (softmax)` network, stored as one flat vector laid out
/// as `[W1 (w×d), b1 (w), W2 (K×w), b2 (K)]`, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierParams {
    input_dim: usize,
    hidden: usize,
    classes: usize,
    theta: Vec<f64>,
}

impl ClassifierParams {
    fn len_for(d: usize, w: usize, k: usize) -> usize {
        w * d + w + k * w + k
    }

    pub fn zeros(input_dim: usize, hidden: usize, classes: usize) -> Self {
        ClassifierParams {
            input_dim,
            hidden,
            classes,
            theta: vec![0.0; Self::len_for(input_dim, hidden, classes)],
        }
    }

    /// Per-layer uniform initialization in `±1/sqrt(fan_in)`.
    pub fn init(input_dim: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut params = Self::zeros(input_dim, hidden, classes);
        let mut rng = StreamRng::seed_from_u64(seed);
        let first = 1.0 / (input_dim as f64).sqrt();
        let second = 1.0 / (hidden as f64).sqrt();
        let split = hidden * input_dim + hidden;
        for (i, v) in params.theta.iter_mut().enumerate() {
            let bound = if i < split { first } else { second };
            *v = rng.random_range(-bound..bound);
        }
        params
    }

    pub fn from_flat(input_dim: usize, hidden: usize, classes: usize, theta: Vec<f64>) -> Result<Self> {
        let expected = Self::len_for(input_dim, hidden, classes);
        if theta.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: theta.len(),
            });
        }
        Ok(ClassifierParams {
            input_dim,
            hidden,
            classes,
            theta,
        })
    }

    pub fn as_flat(&self) -> &[f64] {
        &self.theta
    }

    pub fn as_flat_mut(&mut self) -> &mut [f64] {
        &mut self.theta
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn hidden(&self) -> usize {
        self.hidden
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    fn offsets(&self) -> (usize, usize, usize) {
        let b1 = self.hidden * self.input_dim;
        let w2 = b1 + self.hidden;
        let b2 = w2 + self.classes * self.hidden;
        (b1, w2, b2)
    }

    /// Hidden activations and logits for one input.
    fn forward(&self, x: &[f64], hidden: &mut [f64], logits: &mut [f64]) {
        let (b1, w2, b2) = self.offsets();
        let t = &self.theta;
        for j in 0..self.hidden {
            let row = &t[j * self.input_dim..(j + 1) * self.input_dim];
            let z = row.iter().zip(x).map(|(w, v)| w * v).sum::<f64>() + t[b1 + j];
            hidden[j] = z.max(0.0);
        }
        for k in 0..self.classes {
            let row = &t[w2 + k * self.hidden..w2 + (k + 1) * self.hidden];
            logits[k] = row.iter().zip(hidden.iter()).map(|(w, h)| w * h).sum::<f64>() + t[b2 + k];
        }
    }

    pub fn logits(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_dim(x)?;
        let mut hidden = vec![0.0; self.hidden];
        let mut logits = vec![0.0; self.classes];
        self.forward(x, &mut hidden, &mut logits);
        Ok(logits)
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.input_dim {
            return Err(Error::DimensionMismatch {
                expected: self.input_dim,
                got: x.len(),
            });
        }
        Ok(())
    }
}

/// Numerically stable softmax, in place.
pub fn softmax(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in logits.iter_mut() {
        *v /= total;
    }
}

pub fn predict_proba(params: &ClassifierParams, x: &[f64]) -> Result<Vec<f64>> {
    let mut p = params.logits(x)?;
    softmax(&mut p);
    Ok(p)
}

/// Mean cross-entropy over `batch` and its gradient with respect to the flat
/// parameter vector.
pub fn loss_and_gradient(
    params: &ClassifierParams,
    data: &LabeledDataset,
    batch: &[usize],
) -> (f64, Vec<f64>) {
    let mut grad = vec![0.0; params.theta.len()];
    let loss = accumulate_gradient(params, data, batch, &mut grad);
    (loss, grad)
}

fn accumulate_gradient(
    params: &ClassifierParams,
    data: &LabeledDataset,
    batch: &[usize],
    grad: &mut [f64],
) -> f64 {
    let (d, w, k) = (params.input_dim, params.hidden, params.classes);
    let (b1, w2, b2) = params.offsets();
    let theta = &params.theta;
    grad.iter_mut().for_each(|g| *g = 0.0);
    let scale = 1.0 / batch.len() as f64;
    let mut hidden = vec![0.0; w];
    let mut probs = vec![0.0; k];
    let mut d_hidden = vec![0.0; w];
    let mut loss = 0.0;
    for &i in batch {
        let x = data.features(i);
        let y = data.label(i) - 1;
        params.forward(x, &mut hidden, &mut probs);
        let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_norm = max + probs.iter().map(|z| (z - max).exp()).sum::<f64>().ln();
        loss -= probs[y] - log_norm;
        for p in probs.iter_mut() {
            *p = (*p - log_norm).exp();
        }
        probs[y] -= 1.0;
        d_hidden.iter_mut().for_each(|v| *v = 0.0);
        for c in 0..k {
            let delta = probs[c] * scale;
            grad[b2 + c] += delta;
            let row = w2 + c * w;
            for j in 0..w {
                grad[row + j] += delta * hidden[j];
                d_hidden[j] += delta * theta[row + j];
            }
        }
        for j in 0..w {
            if hidden[j] <= 0.0 {
                continue;
            }
            let delta = d_hidden[j];
            grad[b1 + j] += delta;
            for (g, v) in grad[j * d..(j + 1) * d].iter_mut().zip(x) {
                *g += delta * v;
            }
        }
    }
    loss * scale
}

/// Mini-batch SGD with momentum from a fresh initialization seeded by
/// `cfg.init_seed`.
pub fn train_classifier(data: &LabeledDataset, cfg: &TrainConfig) -> Result<ClassifierParams> {
    let init = ClassifierParams::init(
        data.feature_dim(),
        cfg.hidden_width,
        data.num_classes(),
        cfg.init_seed,
    );
    train_classifier_from(data, cfg, init)
}

/// Runs `cfg.epochs` epochs starting from `params`. Batch order is drawn from
/// a generator seeded by `cfg.init_seed`.
pub fn train_classifier_from(
    data: &LabeledDataset,
    cfg: &TrainConfig,
    mut params: ClassifierParams,
) -> Result<ClassifierParams> {
    cfg.validate()?;
    if params.input_dim != data.feature_dim() || params.classes != data.num_classes() {
        return Err(Error::DimensionMismatch {
            expected: data.feature_dim(),
            got: params.input_dim,
        });
    }
    // Separate stream from the initializer's.
    let mut rng = StreamRng::seed_from_u64(stream_seed(cfg.init_seed, u64::MAX));
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut velocity = vec![0.0; params.theta.len()];
    let mut grad = vec![0.0; params.theta.len()];
    for epoch in 0..cfg.epochs {
        let lr = cfg.learning_rate_at(epoch);
        order.shuffle(&mut rng);
        for batch in order.chunks(cfg.batch_size) {
            let loss = accumulate_gradient(&params, data, batch, &mut grad);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch });
            }
            for ((theta, v), g) in params.theta.iter_mut().zip(velocity.iter_mut()).zip(&grad) {
                *v = cfg.momentum * *v + g;
                *theta -= lr * *v;
            }
        }
        if params.theta.iter().any(|t| !t.is_finite()) {
            return Err(Error::NonFiniteLoss { epoch });
        }
    }
    Ok(params)
}

/// Inverse-CDF label draw: the first class whose cumulative probability
/// exceeds `u`, accumulating from class 1. Returns a 1-based label.
pub fn sample_label(probs: &[f64], u: f64) -> usize {
    let mut cumulative = 0.0;
    for (k, p) in probs.iter().enumerate() {
        cumulative += p;
        if u < cumulative {
            return k + 1;
        }
    }
    probs.len()
}

/// Something that can be trained on a labelled dataset and queried for
/// class probabilities.
pub trait ClassifierLearner {
    type Model: Send;

    /// `previous` carries the last step's model when warm starting.
    fn fit(&self, data: &LabeledDataset, seed: u64, previous: Option<Self::Model>) -> Result<Self::Model>;

    fn predict(&self, model: &Self::Model, x: &[f64]) -> Result<Vec<f64>>;
}

/// The softmax network trained by [`train_classifier`].
#[derive(Debug, Clone, Copy)]
pub struct SoftmaxLearner {
    pub config: TrainConfig,
}

impl ClassifierLearner for SoftmaxLearner {
    type Model = ClassifierParams;

    fn fit(&self, data: &LabeledDataset, seed: u64, previous: Option<ClassifierParams>) -> Result<ClassifierParams> {
        let cfg = TrainConfig {
            init_seed: seed,
            ..self.config
        };
        match previous {
            Some(params) if self.config.warm_start => train_classifier_from(data, &cfg, params),
            _ => train_classifier(data, &cfg),
        }
    }

    fn predict(&self, model: &ClassifierParams, x: &[f64]) -> Result<Vec<f64>> {
        predict_proba(model, x)
    }
}

/// Per-chain label counts and the frequencies derived from them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassPosterior {
    counts: Vec<Vec<u32>>,
    depth: usize,
    classes: usize,
    pub config: Option<IgmcConfig>,
}

impl ClassPosterior {
    /// `counts[n][k]` is how often chain `n` drew class `k + 1`; every row
    /// must sum to `depth`.
    pub fn from_counts(counts: Vec<Vec<u32>>, depth: usize) -> Result<Self> {
        let classes = counts.first().map_or(0, Vec::len);
        if counts.is_empty() || classes == 0 || depth == 0 {
            return Err(Error::InvalidConfig("empty class posterior".into()));
        }
        for row in &counts {
            if row.len() != classes {
                return Err(Error::DimensionMismatch {
                    expected: classes,
                    got: row.len(),
                });
            }
            if row.iter().map(|&c| c as usize).sum::<usize>() != depth {
                return Err(Error::InvalidCounts(format!(
                    "row {row:?} does not sum to depth {depth}"
                )));
            }
        }
        Ok(ClassPosterior {
            counts,
            depth,
            classes,
            config: None,
        })
    }

    /// Builds a row from a chain's sampled labels (1-based).
    pub fn counts_from_labels(labels: &[usize], classes: usize) -> Vec<u32> {
        let mut row = vec![0u32; classes];
        for &l in labels {
            row[l - 1] += 1;
        }
        row
    }

    pub fn chains(&self) -> usize {
        self.counts.len()
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn classes(&self) -> usize {
        self.classes
    }

    pub fn counts(&self) -> &[Vec<u32>] {
        &self.counts
    }

    /// `μ_{n,k}` = count / H.
    pub fn row(&self, n: usize) -> Vec<f64> {
        self.counts[n]
            .iter()
            .map(|&c| c as f64 / self.depth as f64)
            .collect()
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.chains()).map(|n| self.row(n)).collect()
    }

    /// Frequencies of class `k` (0-based) across chains.
    pub fn column(&self, k: usize) -> Vec<f64> {
        self.counts
            .iter()
            .map(|row| row[k] as f64 / self.depth as f64)
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UncertaintyReport {
    /// Mean of `μ_{·,k}` per class.
    pub mean: Vec<f64>,
    /// `4·Var(μ_{·,k})` (population variance) per class.
    pub uncertainty: Vec<f64>,
}

impl UncertaintyReport {
    /// `"mean% [u]"` cells, e.g. `"100.0 [0.00]"`.
    pub fn cells(&self) -> Vec<String> {
        self.mean
            .iter()
            .zip(&self.uncertainty)
            .map(|(m, u)| format!("{:.1} [{:.2}]", 100.0 * m, u))
            .collect()
    }

    pub fn top_class(&self) -> usize {
        let mut best = 0;
        for (k, m) in self.mean.iter().enumerate() {
            if *m > self.mean[best] {
                best = k;
            }
        }
        best + 1
    }
}

/// Computed from integer counts, so `u_k` is exactly 0 when every chain
/// drew class `k` equally often.
pub fn summarize_uncertainty(posterior: &ClassPosterior) -> Result<UncertaintyReport> {
    let n = posterior.chains();
    if n < 2 {
        return Err(Error::InsufficientSamples { needed: 2, got: n });
    }
    let h = posterior.depth() as f64;
    let mut mean = Vec::with_capacity(posterior.classes());
    let mut uncertainty = Vec::with_capacity(posterior.classes());
    for k in 0..posterior.classes() {
        let (sum, sum_sq) = posterior.counts().iter().fold((0u128, 0u128), |(s, q), row| {
            let c = row[k] as u128;
            (s + c, q + c * c)
        });
        // N·Σc² − (Σc)² ≥ 0 by Cauchy–Schwarz.
        let spread = (n as u128 * sum_sq - sum * sum) as f64;
        let nf = n as f64;
        mean.push(sum as f64 / (nf * h));
        uncertainty.push((4.0 * spread / (nf * nf * h * h)).min(1.0));
    }
    Ok(UncertaintyReport { mean, uncertainty })
}

/// One chain: `depth` rounds of train / predict / sample / append.
fn run_class_chain<L: ClassifierLearner>(
    learner: &L,
    data: &LabeledDataset,
    x: &[f64],
    igmc: &IgmcConfig,
    chain: u64,
) -> Result<Vec<u32>> {
    let chain_seed = stream_seed(igmc.master_seed, chain);
    let mut label_rng = stream_rng(igmc.master_seed, chain);
    let mut working = data.clone();
    let mut model = None;
    let mut labels = Vec::with_capacity(igmc.depth);
    for h in 0..igmc.depth {
        let fitted = learner.fit(&working, stream_seed(chain_seed, h as u64), model.take())?;
        let probs = learner.predict(&fitted, x)?;
        let label = sample_label(&probs, label_rng.random());
        working.push(x, label)?;
        labels.push(label);
        model = Some(fitted);
    }
    Ok(ClassPosterior::counts_from_labels(&labels, data.num_classes()))
}

fn check_query(data: &LabeledDataset, x: &[f64], igmc: &IgmcConfig) -> Result<()> {
    igmc.validate()?;
    if x.len() != data.feature_dim() {
        return Err(Error::DimensionMismatch {
            expected: data.feature_dim(),
            got: x.len(),
        });
    }
    Ok(())
}

/// Chains run on the current rayon pool and are collected in index order.
pub fn run_deep_igmc_with<L>(
    learner: &L,
    data: &LabeledDataset,
    x: &[f64],
    igmc: &IgmcConfig,
) -> Result<ClassPosterior>
where
    L: ClassifierLearner + Sync,
{
    check_query(data, x, igmc)?;
    let counts = (0..igmc.sample_size as u64)
        .into_par_iter()
        .map(|n| run_class_chain(learner, data, x, igmc, n))
        .collect::<Result<Vec<_>>>()?;
    let mut posterior = ClassPosterior::from_counts(counts, igmc.depth)?;
    posterior.config = Some(*igmc);
    Ok(posterior)
}

pub fn run_deep_igmc_sequential_with<L: ClassifierLearner>(
    learner: &L,
    data: &LabeledDataset,
    x: &[f64],
    igmc: &IgmcConfig,
) -> Result<ClassPosterior> {
    check_query(data, x, igmc)?;
    let counts = (0..igmc.sample_size as u64)
        .map(|n| run_class_chain(learner, data, x, igmc, n))
        .collect::<Result<Vec<_>>>()?;
    let mut posterior = ClassPosterior::from_counts(counts, igmc.depth)?;
    posterior.config = Some(*igmc);
    Ok(posterior)
}

pub fn run_deep_igmc(
    data: &LabeledDataset,
    x: &[f64],
    cfg: &TrainConfig,
    igmc: &IgmcConfig,
) -> Result<ClassPosterior> {
    cfg.validate()?;
    run_deep_igmc_with(&SoftmaxLearner { config: *cfg }, data, x, igmc)
}
