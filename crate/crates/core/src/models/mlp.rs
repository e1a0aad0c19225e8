use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::adam::{epoch_batches, Adam};
use super::scaler::Scaler;
use super::{check_width, cross_entropy, sigmoid, Dataset, ModelError, TrainConfig};

pub fn relu(x: f64) -> f64 {
    x.max(0.0)
}

/// One ReLU hidden layer and a sigmoid output unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MlpModel {
    /// `hidden[j]` holds the input weights of hidden unit j.
    pub hidden: Vec<Vec<f64>>,
    pub hidden_bias: Vec<f64>,
    pub output: Vec<f64>,
    pub output_bias: f64,
    pub scaler: Scaler,
    pub l2: f64,
}

struct Forward {
    z: Vec<f64>,
    pre: Vec<f64>,
    h: Vec<f64>,
    out: f64,
}

impl MlpModel {
    pub fn zeros(width: usize, hidden: usize, l2: f64) -> Self {
        MlpModel {
            hidden: vec![vec![0.0; width]; hidden],
            hidden_bias: vec![0.0; hidden],
            output: vec![0.0; hidden],
            output_bias: 0.0,
            scaler: Scaler::identity(width),
            l2,
        }
    }

    /// He-uniform weights, zero biases.
    pub fn random(width: usize, hidden: usize, l2: f64, rng: &mut ChaCha8Rng) -> Self {
        let mut m = Self::zeros(width, hidden, l2);
        let a = (6.0 / width.max(1) as f64).sqrt();
        for row in &mut m.hidden {
            row.iter_mut().for_each(|w| *w = rng.gen_range(-a..a));
        }
        let a = (6.0 / hidden as f64).sqrt();
        m.output.iter_mut().for_each(|w| *w = rng.gen_range(-a..a));
        m
    }

    pub fn input_width(&self) -> usize {
        self.scaler.mean.len()
    }

    pub fn hidden_units(&self) -> usize {
        self.hidden.len()
    }

    /// Hidden weights row by row, hidden biases, output weights, output bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p: Vec<f64> = self.hidden.iter().flatten().copied().collect();
        p.extend(&self.hidden_bias);
        p.extend(&self.output);
        p.push(self.output_bias);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let d = self.input_width();
        let h = self.hidden_units();
        for (j, row) in self.hidden.iter_mut().enumerate() {
            row.copy_from_slice(&p[j * d..(j + 1) * d]);
        }
        let mut at = h * d;
        self.hidden_bias.copy_from_slice(&p[at..at + h]);
        at += h;
        self.output.copy_from_slice(&p[at..at + h]);
        self.output_bias = p[at + h];
    }

    fn forward(&self, v: &[f64]) -> Forward {
        let z = self.scaler.apply(v);
        let pre: Vec<f64> = self
            .hidden
            .iter()
            .zip(&self.hidden_bias)
            .map(|(row, b)| row.iter().zip(&z).map(|(w, x)| w * x).sum::<f64>() + b)
            .collect();
        let h: Vec<f64> = pre.iter().map(|&a| relu(a)).collect();
        let logit = self.output.iter().zip(&h).map(|(w, x)| w * x).sum::<f64>() + self.output_bias;
        Forward {
            z,
            pre,
            h,
            out: sigmoid(logit),
        }
    }
}

pub fn eval_mlp(m: &MlpModel, v: &[f64]) -> Result<f64, ModelError> {
    check_width(m.input_width(), v)?;
    Ok(m.forward(v).out)
}

/// Mean cross-entropy plus (λ/2) times the squared norm of all parameters.
pub fn loss_mlp(m: &MlpModel, x: &[Vec<f64>], y: &[bool]) -> f64 {
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(v, &b)| cross_entropy(m.forward(v).out, b))
        .sum();
    let data = if x.is_empty() {
        0.0
    } else {
        data / x.len() as f64
    };
    data + 0.5 * m.l2 * m.params().iter().map(|w| w * w).sum::<f64>()
}

/// Backpropagated gradient of [`loss_mlp`], laid out like [`MlpModel::params`].
pub fn gradient_mlp(m: &MlpModel, x: &[Vec<f64>], y: &[bool]) -> Vec<f64> {
    let d = m.input_width();
    let h = m.hidden_units();
    let mut g = vec![0.0; h * d + 2 * h + 1];
    let (gw1, rest) = g.split_at_mut(h * d);
    let (gb1, rest) = rest.split_at_mut(h);
    let (gw2, gb2) = rest.split_at_mut(h);
    for (v, &b) in x.iter().zip(y) {
        let f = m.forward(v);
        let delta = f.out - f64::from(u8::from(b));
        gb2[0] += delta;
        for j in 0..h {
            gw2[j] += delta * f.h[j];
            if f.pre[j] > 0.0 {
                let dj = delta * m.output[j];
                gb1[j] += dj;
                for (gw, zi) in gw1[j * d..(j + 1) * d].iter_mut().zip(&f.z) {
                    *gw += dj * zi;
                }
            }
        }
    }
    if !x.is_empty() {
        let inv = 1.0 / x.len() as f64;
        g.iter_mut().for_each(|gi| *gi *= inv);
    }
    for (gi, w) in g.iter_mut().zip(m.params()) {
        *gi += m.l2 * w;
    }
    g
}

pub fn train_mlp(data: &Dataset, cfg: &TrainConfig) -> Result<MlpModel, ModelError> {
    train_mlp_traced(data, cfg).map(|(m, _)| m)
}

/// Trains and also returns the full-data training loss after each epoch.
pub fn train_mlp_traced(
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(MlpModel, Vec<f64>), ModelError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut m = MlpModel::random(data.width(), cfg.hidden_units, cfg.l2, &mut rng);
    m.scaler = Scaler::fit(data.rows());
    let mut params = m.params();
    let mut adam = Adam::new(params.len(), cfg);
    let mut losses = Vec::with_capacity(cfg.epochs);
    for _ in 0..cfg.epochs {
        for batch in epoch_batches(data.len(), cfg.batch_size, &mut rng) {
            let x: Vec<Vec<f64>> = batch.iter().map(|&i| data.rows()[i].clone()).collect();
            let y: Vec<bool> = batch.iter().map(|&i| data.labels()[i]).collect();
            let g = gradient_mlp(&m, &x, &y);
            adam.step(&mut params, &g);
            m.set_params(&params);
        }
        losses.push(loss_mlp(&m, data.rows(), data.labels()));
    }
    Ok((m, losses))
}
