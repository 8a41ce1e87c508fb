//! Gated MLP that maps a standardized feature vector to a complexity score.
//!
//! Parameters live in one flat vector, laid out as
//! `W_g (d×d), b_g (d)`, then `W_l (out×in), b_l (out)` per hidden layer,
//! then `W_o (h×h), b_o (h)` and the head `w (h), b (1)`, with matrices
//! row-major. `h` is the last hidden width (or `d` with no hidden layers).

use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::FeatureVector;

pub const MODEL_FORMAT: &str = "synroute-adapter";
pub const MODEL_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdapterConfig {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    pub label_smoothing: f64,
    pub lr: f64,
    pub weight_decay: f64,
    pub epochs: usize,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for AdapterConfig {
    fn default() -> Self {
        Self {
            input_dim: 85,
            hidden_dims: vec![256, 128, 64],
            label_smoothing: 0.1,
            lr: 1e-3,
            weight_decay: 1e-2,
            epochs: 200,
            batch_size: 32,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainingSample {
    pub x: Vec<f64>,
    pub y: u8,
}

#[derive(Debug, Clone, Copy)]
struct Affine {
    w: usize,
    b: usize,
    rows: usize,
    cols: usize,
}

#[derive(Debug, Clone)]
struct Layout {
    gate_in: Affine,
    hidden: Vec<Affine>,
    gate_out: Affine,
    head: Affine,
    len: usize,
}

impl Layout {
    fn new(d: usize, hidden_dims: &[usize]) -> Self {
        let mut off = 0;
        let mut affine = |rows: usize, cols: usize| {
            let a = Affine { w: off, b: off + rows * cols, rows, cols };
            off += rows * cols + rows;
            a
        };
        let gate_in = affine(d, d);
        let mut prev = d;
        let mut hidden = Vec::new();
        for &h in hidden_dims {
            hidden.push(affine(h, prev));
            prev = h;
        }
        let gate_out = affine(prev, prev);
        let head = affine(1, prev);
        Layout { gate_in, hidden, gate_out, head, len: off }
    }
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `y(1-eps) + (1-y)eps`.
pub fn smooth_label(y: u8, eps: f64) -> f64 {
    let y = y as f64;
    y * (1.0 - eps) + (1.0 - y) * eps
}

/// Binary cross-entropy on a logit, stable for large |z|.
pub fn bce_with_logits(z: f64, target: f64) -> f64 {
    z.max(0.0) - z * target + (-z.abs()).exp().ln_1p()
}

/// Four independent partial sums so the loop vectorizes.
fn dot4(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0; 4];
    let (ca, cb) = (a.chunks_exact(4), b.chunks_exact(4));
    let tail: f64 = ca.remainder().iter().zip(cb.remainder()).map(|(x, y)| x * y).sum();
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

fn affine_apply(p: &[f64], a: Affine, x: &[f64]) -> Vec<f64> {
    (0..a.rows).map(|i| p[a.b + i] + dot4(&p[a.w + i * a.cols..a.w + (i + 1) * a.cols], x)).collect()
}

/// Accumulates `dz ⊗ x` into the weight slot and `dz` into the bias slot;
/// returns `Wᵀ dz`.
fn affine_backward(p: &[f64], grad: &mut [f64], a: Affine, x: &[f64], dz: &[f64]) -> Vec<f64> {
    let mut dx = vec![0.0; a.cols];
    for i in 0..a.rows {
        let gi = dz[i];
        grad[a.b + i] += gi;
        let base = a.w + i * a.cols;
        for j in 0..a.cols {
            grad[base + j] += gi * x[j];
            dx[j] += p[base + j] * gi;
        }
    }
    dx
}

struct Trace {
    x: Vec<f64>,
    g: Vec<f64>,
    layers: Vec<(Vec<f64>, Vec<f64>)>,
    h: Vec<f64>,
    og: Vec<f64>,
    o: Vec<f64>,
    logit: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdapterModel {
    config: AdapterConfig,
    layout_len: usize,
    params: Vec<f64>,
}

impl AdapterModel {
    /// Uniform Glorot initialization for weights, zero biases.
    pub fn init(config: AdapterConfig) -> Self {
        let layout = Layout::new(config.input_dim, &config.hidden_dims);
        let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
        let mut params = vec![0.0; layout.len];
        let affines =
            std::iter::once(layout.gate_in).chain(layout.hidden.iter().copied()).chain([layout.gate_out, layout.head]);
        for a in affines {
            let bound = (6.0 / (a.rows + a.cols) as f64).sqrt();
            for v in &mut params[a.w..a.b] {
                *v = rng.gen_range(-bound..bound);
            }
        }
        Self { config, layout_len: layout.len, params }
    }

    pub fn zeros(config: AdapterConfig) -> Self {
        let len = Layout::new(config.input_dim, &config.hidden_dims).len;
        Self { config, layout_len: len, params: vec![0.0; len] }
    }

    pub fn from_params(config: AdapterConfig, params: Vec<f64>) -> Result<Self> {
        let len = Layout::new(config.input_dim, &config.hidden_dims).len;
        if params.len() != len {
            return Err(Error::DimMismatch { expected: len, got: params.len() });
        }
        Ok(Self { config, layout_len: len, params })
    }

    pub fn config(&self) -> &AdapterConfig {
        &self.config
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    pub fn num_params(&self) -> usize {
        self.layout_len
    }

    fn layout(&self) -> Layout {
        Layout::new(self.config.input_dim, &self.config.hidden_dims)
    }

    /// Offset of the output-head bias in the flat parameter vector.
    pub fn head_bias_index(&self) -> usize {
        self.layout().head.b
    }

    /// Range of the output-head weight vector.
    pub fn head_weight_range(&self) -> std::ops::Range<usize> {
        let h = self.layout().head;
        h.w..h.b
    }

    /// Range of hidden layer `i`'s weights followed by its biases.
    pub fn hidden_layer_range(&self, i: usize) -> std::ops::Range<usize> {
        let a = self.layout().hidden[i];
        a.w..a.b + a.rows
    }

    fn trace(&self, x: &[f64]) -> Result<Trace> {
        if x.len() != self.config.input_dim {
            return Err(Error::DimMismatch { expected: self.config.input_dim, got: x.len() });
        }
        let l = self.layout();
        let p = &self.params;
        let g: Vec<f64> = affine_apply(p, l.gate_in, x).into_iter().map(sigmoid).collect();
        let mut h: Vec<f64> = g.iter().zip(x).map(|(a, b)| a * b).collect();
        let mut layers = Vec::with_capacity(l.hidden.len());
        for &a in &l.hidden {
            let z = affine_apply(p, a, &h);
            let mut out: Vec<f64> = z.iter().map(|v| v.max(0.0)).collect();
            if a.rows == a.cols {
                out.iter_mut().zip(&h).for_each(|(o, hi)| *o += hi);
            }
            layers.push((std::mem::replace(&mut h, out), z));
        }
        let og: Vec<f64> = affine_apply(p, l.gate_out, &h).into_iter().map(sigmoid).collect();
        let o: Vec<f64> = og.iter().zip(&h).map(|(a, b)| a * b).collect();
        let logit = affine_apply(p, l.head, &o)[0];
        Ok(Trace { x: x.to_vec(), g, layers, h, og, o, logit })
    }

    pub fn logit(&self, x: &[f64]) -> Result<f64> {
        Ok(self.trace(x)?.logit)
    }

    /// `(logit, s)` with `s = σ(logit)`.
    pub fn forward_score(&self, x: &FeatureVector) -> Result<(f64, f64)> {
        let z = self.logit(&x.values)?;
        Ok((z, sigmoid(z)))
    }

    pub fn score(&self, x: &[f64]) -> Result<f64> {
        Ok(sigmoid(self.logit(x)?))
    }

    /// Smoothed BCE for one sample.
    pub fn loss(&self, x: &[f64], y: u8) -> Result<f64> {
        Ok(bce_with_logits(self.logit(x)?, smooth_label(y, self.config.label_smoothing)))
    }

    pub fn mean_loss(&self, data: &[TrainingSample]) -> Result<f64> {
        let mut s = 0.0;
        for d in data {
            s += self.loss(&d.x, d.y)?;
        }
        Ok(s / data.len() as f64)
    }

    /// Adds the gradient of the smoothed loss on `(x, y)` into `grad`.
    fn accumulate_grad(&self, x: &[f64], y: u8, grad: &mut [f64]) -> Result<f64> {
        let t = self.trace(x)?;
        let l = self.layout();
        let p = &self.params;
        let target = smooth_label(y, self.config.label_smoothing);
        let dl = sigmoid(t.logit) - target;

        let d_o = affine_backward(p, grad, l.head, &t.o, &[dl]);
        let mut dh: Vec<f64> = d_o.iter().zip(&t.og).map(|(a, b)| a * b).collect();
        let dzo: Vec<f64> = d_o.iter().zip(&t.h).zip(&t.og).map(|((d, h), g)| d * h * g * (1.0 - g)).collect();
        let back = affine_backward(p, grad, l.gate_out, &t.h, &dzo);
        dh.iter_mut().zip(back).for_each(|(a, b)| *a += b);

        for (a, (h_in, z)) in l.hidden.iter().zip(&t.layers).rev() {
            let dz: Vec<f64> = dh.iter().zip(z).map(|(d, z)| if *z > 0.0 { *d } else { 0.0 }).collect();
            let mut dh_in = affine_backward(p, grad, *a, h_in, &dz);
            if a.rows == a.cols {
                dh_in.iter_mut().zip(&dh).for_each(|(a, b)| *a += b);
            }
            dh = dh_in;
        }

        let dzg: Vec<f64> = dh.iter().zip(&t.x).zip(&t.g).map(|((d, x), g)| d * x * g * (1.0 - g)).collect();
        affine_backward(p, grad, l.gate_in, &t.x, &dzg);
        Ok(bce_with_logits(t.logit, target))
    }

    /// Analytic gradient of the smoothed loss on one sample.
    pub fn gradient(&self, x: &[f64], y: u8) -> Result<Vec<f64>> {
        let mut g = vec![0.0; self.params.len()];
        self.accumulate_grad(x, y, &mut g)?;
        Ok(g)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            version: MODEL_VERSION,
            config: self.config.clone(),
            params: self.params.clone(),
        };
        std::fs::write(path, serde_json::to_vec(&file)?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        if !path.exists() {
            return Err(Error::MissingFile(path.to_path_buf()));
        }
        let file: ModelFile = serde_json::from_slice(&std::fs::read(path)?)?;
        if file.format != MODEL_FORMAT {
            return Err(Error::InvalidArgument(format!("not an adapter model file: {}", file.format)));
        }
        if file.version != MODEL_VERSION {
            return Err(Error::VersionMismatch { expected: MODEL_VERSION, found: file.version });
        }
        Self::from_params(file.config, file.params)
    }
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    config: AdapterConfig,
    params: Vec<f64>,
}

/// Keeps queries on which exactly one retriever was correct; the label is 1
/// when the graph retriever was the correct one.
pub fn build_disagreement_set(z_rag: &[u8], z_gr: &[u8], feats: &[FeatureVector]) -> Result<Vec<TrainingSample>> {
    if z_rag.len() != z_gr.len() {
        return Err(Error::LengthMismatch(z_rag.len(), z_gr.len()));
    }
    if feats.len() != z_rag.len() {
        return Err(Error::LengthMismatch(z_rag.len(), feats.len()));
    }
    Ok(z_rag
        .iter()
        .zip(z_gr)
        .zip(feats)
        .filter(|((a, b), _)| (**a != 0) != (**b != 0))
        .map(|((_, b), f)| TrainingSample { x: f.values.clone(), y: (*b != 0) as u8 })
        .collect())
}

/// Indices kept by [`build_disagreement_set`].
pub fn disagreement_indices(z_rag: &[u8], z_gr: &[u8]) -> Vec<usize> {
    z_rag.iter().zip(z_gr).enumerate().filter(|(_, (a, b))| (**a != 0) != (**b != 0)).map(|(i, _)| i).collect()
}

/// AdamW state for a flat parameter vector.
#[derive(Debug, Clone)]
pub struct AdamW {
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
    pub weight_decay: f64,
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl AdamW {
    pub fn new(n: usize, weight_decay: f64) -> Self {
        Self { beta1: 0.9, beta2: 0.999, eps: 1e-8, weight_decay, m: vec![0.0; n], v: vec![0.0; n], t: 0 }
    }

    pub fn step(&mut self, params: &mut [f64], grad: &[f64], lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - self.beta1.powi(self.t);
        let bc2 = 1.0 - self.beta2.powi(self.t);
        for i in 0..params.len() {
            self.m[i] = self.beta1 * self.m[i] + (1.0 - self.beta1) * grad[i];
            self.v[i] = self.beta2 * self.v[i] + (1.0 - self.beta2) * grad[i] * grad[i];
            let mh = self.m[i] / bc1;
            let vh = self.v[i] / bc2;
            params[i] -= lr * (self.weight_decay * params[i] + mh / (vh.sqrt() + self.eps));
        }
    }
}

/// Cosine-annealed learning rate at step `t` of `total`.
pub fn cosine_lr(lr: f64, t: usize, total: usize) -> f64 {
    if total == 0 {
        return lr;
    }
    lr * (1.0 + (std::f64::consts::PI * t as f64 / total as f64).cos()) / 2.0
}

/// Mini-batch AdamW on the smoothed BCE loss with a cosine schedule.
pub fn train(cfg: &AdapterConfig, data: &[TrainingSample]) -> Result<AdapterModel> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if !(data.iter().any(|d| d.y == 0) && data.iter().any(|d| d.y == 1)) {
        return Err(Error::SingleClassLabels);
    }
    if let Some(d) = data.iter().find(|d| d.x.len() != cfg.input_dim) {
        return Err(Error::DimMismatch { expected: cfg.input_dim, got: d.x.len() });
    }
    let mut model = AdapterModel::init(cfg.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(1));
    let bs = cfg.batch_size.max(1);
    let batches = data.len().div_ceil(bs);
    let total = cfg.epochs * batches;
    let mut opt = AdamW::new(model.params.len(), cfg.weight_decay);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut grad = vec![0.0; model.params.len()];
    let mut step = 0;
    for _ in 0..cfg.epochs {
        order.shuffle(&mut rng);
        for chunk in order.chunks(bs) {
            grad.iter_mut().for_each(|g| *g = 0.0);
            for &i in chunk {
                model.accumulate_grad(&data[i].x, data[i].y, &mut grad)?;
            }
            let n = chunk.len() as f64;
            grad.iter_mut().for_each(|g| *g /= n);
            opt.step(&mut model.params, &grad, cosine_lr(cfg.lr, step, total));
            step += 1;
        }
    }
    Ok(model)
}

/// Fraction of samples whose thresholded score (s ≥ 0.5) matches the label.
pub fn accuracy(model: &AdapterModel, data: &[TrainingSample]) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut hit = 0;
    for d in data {
        if (model.score(&d.x)? >= 0.5) == (d.y == 1) {
            hit += 1;
        }
    }
    Ok(hit as f64 / data.len() as f64)
}

/// Central-difference step used by [`gradient_check`].
pub const FD_STEP: f64 = 1e-5;

/// Largest relative error between analytic and central-difference gradients
/// over all parameters. Relative error is `|a - n| / max(|a|, |n|, 1e-6)`.
pub fn gradient_check(model: &AdapterModel, x: &[f64], y: u8) -> Result<f64> {
    let analytic = model.gradient(x, y)?;
    let mut probe = model.clone();
    let mut worst = 0.0f64;
    for i in 0..analytic.len() {
        let orig = probe.params[i];
        probe.params[i] = orig + FD_STEP;
        let up = probe.loss(x, y)?;
        probe.params[i] = orig - FD_STEP;
        let down = probe.loss(x, y)?;
        probe.params[i] = orig;
        let numeric = (up - down) / (2.0 * FD_STEP);
        let denom = analytic[i].abs().max(numeric.abs()).max(1e-6);
        worst = worst.max((analytic[i] - numeric).abs() / denom);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(seed: u64) -> AdapterConfig {
        AdapterConfig { input_dim: 8, hidden_dims: vec![8, 8], seed, ..Default::default() }
    }

    fn random_x(seed: u64, d: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect()
    }

    #[test]
    fn zero_model_scores_half() {
        let m = AdapterModel::zeros(AdapterConfig::default());
        let (z, s) = m.forward_score(&FeatureVector { values: vec![1.0; 85] }).unwrap();
        assert_eq!(z, 0.0);
        assert_eq!(s, 0.5);
    }

    #[test]
    fn sigmoid_symmetry() {
        let m = AdapterModel::init(small(3));
        let z = m.logit(&random_x(1, 8)).unwrap();
        let s = sigmoid(z);
        assert!(s > 0.0 && s < 1.0);
        assert!((sigmoid(-z) - (1.0 - s)).abs() < 1e-12);
    }

    #[test]
    fn dim_mismatch() {
        let m = AdapterModel::init(small(0));
        assert!(matches!(m.logit(&[0.0; 3]), Err(Error::DimMismatch { expected: 8, got: 3 })));
    }

    #[test]
    fn disagreement_set() {
        let feats: Vec<FeatureVector> = (0..4).map(|i| FeatureVector { values: vec![i as f64] }).collect();
        let set = build_disagreement_set(&[1, 0, 1, 1], &[0, 1, 1, 0], &feats).unwrap();
        assert_eq!(set.iter().map(|s| s.x[0]).collect::<Vec<_>>(), vec![0.0, 1.0, 3.0]);
        assert_eq!(set.iter().map(|s| s.y).collect::<Vec<_>>(), vec![0, 1, 0]);
        assert!(build_disagreement_set(&[1, 1], &[1, 1], &feats[..2]).unwrap().is_empty());
        assert!(matches!(build_disagreement_set(&[1, 0, 1], &[0, 1, 1, 0], &feats), Err(Error::LengthMismatch(3, 4))));
    }

    #[test]
    fn gradients_match_finite_differences() {
        for seed in 0..5 {
            let m = AdapterModel::init(small(seed));
            let err = gradient_check(&m, &random_x(seed + 100, 8), (seed % 2) as u8).unwrap();
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }

    #[test]
    fn zero_model_bias_gradient() {
        let m = AdapterModel::zeros(small(0));
        let g = m.gradient(&random_x(7, 8), 1).unwrap();
        assert!((g[m.head_bias_index()] - (0.5 - 0.9)).abs() < 1e-6);
    }

    #[test]
    fn smoothing_floor() {
        assert!(bce_with_logits(50.0, smooth_label(1, 0.1)) > 0.0);
        let floor = -(0.1f64 * 0.1f64.ln() + 0.9 * 0.9f64.ln());
        for z in [-10.0, -1.0, 0.0, 1.0, 2.1972245773362196, 10.0] {
            assert!(bce_with_logits(z, 0.9) >= floor - 1e-12);
        }
    }

    #[test]
    fn residual_zero_layer_is_identity() {
        let mut m = AdapterModel::init(small(4));
        let r = m.hidden_layer_range(1);
        m.params_mut()[r].iter_mut().for_each(|v| *v = 0.0);
        let t = m.trace(&random_x(5, 8)).unwrap();
        assert_eq!(t.layers[1].0, t.h);
    }

    #[test]
    fn head_scaling_scales_logit() {
        let mut m = AdapterModel::init(small(9));
        let bi = m.head_bias_index();
        m.params_mut()[bi] = 0.0;
        let x = random_x(2, 8);
        let z = m.logit(&x).unwrap();
        for i in m.head_weight_range() {
            m.params_mut()[i] *= 3.0;
        }
        assert!((m.logit(&x).unwrap() - 3.0 * z).abs() < 1e-12);
    }

    #[test]
    fn single_adamw_step_reduces_loss() {
        let m = AdapterModel::init(small(11));
        let x = random_x(12, 8);
        let before = m.loss(&x, 1).unwrap();
        let mut after_model = m.clone();
        let g = m.gradient(&x, 1).unwrap();
        AdamW::new(g.len(), 1e-2).step(after_model.params_mut(), &g, 1e-3);
        assert!(after_model.loss(&x, 1).unwrap() < before);
    }

    #[test]
    fn training_is_deterministic() {
        let data: Vec<TrainingSample> =
            (0..20).map(|i| TrainingSample { x: random_x(i, 8), y: (i % 2) as u8 }).collect();
        let cfg = AdapterConfig { epochs: 3, ..small(5) };
        let a = train(&cfg, &data).unwrap();
        let b = train(&cfg, &data).unwrap();
        assert_eq!(
            a.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            b.params().iter().map(|v| v.to_bits()).collect::<Vec<_>>()
        );
    }

    #[test]
    fn training_errors() {
        let cfg = small(0);
        assert!(matches!(train(&cfg, &[]), Err(Error::EmptyTrainingSet)));
        let one = vec![TrainingSample { x: vec![0.0; 8], y: 1 }];
        assert!(matches!(train(&cfg, &one), Err(Error::SingleClassLabels)));
    }

    #[test]
    fn save_load_roundtrip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("nested/dir/model.json");
        let m = AdapterModel::init(small(21));
        m.save(&path).unwrap();
        let back = AdapterModel::load(&path).unwrap();
        for i in 0..10 {
            let x = random_x(i, 8);
            assert_eq!(m.logit(&x).unwrap().to_bits(), back.logit(&x).unwrap().to_bits());
        }
    }

    #[test]
    fn load_rejects_bad_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.json");
        std::fs::write(&p, "{\"format\":\"synroute-adapter\",\"version\":7,\"config\":{},\"params\":[]}").unwrap();
        assert!(matches!(AdapterModel::load(&p), Err(Error::VersionMismatch { expected: 1, found: 7 })));
        std::fs::write(&p, "{\"format\":\"synroute-adap").unwrap();
        assert!(matches!(AdapterModel::load(&p), Err(Error::Json(_))));
        assert!(matches!(AdapterModel::load(dir.path().join("none")), Err(Error::MissingFile(_))));
    }
}
