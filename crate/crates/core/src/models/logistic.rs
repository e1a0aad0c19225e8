use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::adam::{epoch_batches, Adam};
use super::scaler::Scaler;
use super::{check_width, cross_entropy, sigmoid, Dataset, ModelError, TrainConfig};

/// P(blame | v) = σ(W·z + b), where z is v after standardization.
#[derive(Debug, Clone, PartialEq)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub scaler: Scaler,
    /// L2 rate the model was trained with; part of its loss.
    pub l2: f64,
}

impl LogisticModel {
    pub fn zeros(width: usize, l2: f64) -> Self {
        LogisticModel {
            weights: vec![0.0; width],
            bias: 0.0,
            scaler: Scaler::identity(width),
            l2,
        }
    }

    fn logit(&self, z: &[f64]) -> f64 {
        self.weights.iter().zip(z).map(|(w, x)| w * x).sum::<f64>() + self.bias
    }

    /// Weights followed by the bias.
    pub fn params(&self) -> Vec<f64> {
        let mut p = self.weights.clone();
        p.push(self.bias);
        p
    }

    pub fn set_params(&mut self, p: &[f64]) {
        let n = self.weights.len();
        self.weights.copy_from_slice(&p[..n]);
        self.bias = p[n];
    }
}

pub fn eval_logistic(m: &LogisticModel, v: &[f64]) -> Result<f64, ModelError> {
    check_width(m.weights.len(), v)?;
    Ok(sigmoid(m.logit(&m.scaler.apply(v))))
}

/// Mean cross-entropy over the rows plus (λ/2) times the squared norm of
/// all parameters, bias included.
pub fn loss_logistic(m: &LogisticModel, x: &[Vec<f64>], y: &[bool]) -> f64 {
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(v, &b)| cross_entropy(sigmoid(m.logit(&m.scaler.apply(v))), b))
        .sum();
    let data = if x.is_empty() {
        0.0
    } else {
        data / x.len() as f64
    };
    data + 0.5 * m.l2 * m.params().iter().map(|w| w * w).sum::<f64>()
}

/// Gradient of [`loss_logistic`] with respect to [`LogisticModel::params`].
pub fn gradient_logistic(m: &LogisticModel, x: &[Vec<f64>], y: &[bool]) -> Vec<f64> {
    let n = m.weights.len();
    let mut g = vec![0.0; n + 1];
    for (v, &b) in x.iter().zip(y) {
        let z = m.scaler.apply(v);
        let err = sigmoid(m.logit(&z)) - f64::from(u8::from(b));
        for (gi, zi) in g.iter_mut().zip(&z) {
            *gi += err * zi;
        }
        g[n] += err;
    }
    if !x.is_empty() {
        let inv = 1.0 / x.len() as f64;
        g.iter_mut().for_each(|gi| *gi *= inv);
    }
    for (gi, w) in g.iter_mut().zip(&m.params()) {
        *gi += m.l2 * w;
    }
    g
}

pub fn train_logistic(data: &Dataset, cfg: &TrainConfig) -> Result<LogisticModel, ModelError> {
    train_logistic_traced(data, cfg).map(|(m, _)| m)
}

/// Trains and also returns the full-data training loss after each epoch.
pub fn train_logistic_traced(
    data: &Dataset,
    cfg: &TrainConfig,
) -> Result<(LogisticModel, Vec<f64>), ModelError> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let mut m = LogisticModel::zeros(data.width(), cfg.l2);
    m.scaler = Scaler::fit(data.rows());
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut adam = Adam::new(data.width() + 1, cfg);
    let mut losses = Vec::with_capacity(cfg.epochs);
    let mut params = m.params();
    for _ in 0..cfg.epochs {
        for batch in epoch_batches(data.len(), cfg.batch_size, &mut rng) {
            let x: Vec<Vec<f64>> = batch.iter().map(|&i| data.rows()[i].clone()).collect();
            let y: Vec<bool> = batch.iter().map(|&i| data.labels()[i]).collect();
            let g = gradient_logistic(&m, &x, &y);
            adam.step(&mut params, &g);
            m.set_params(&params);
        }
        losses.push(loss_logistic(&m, data.rows(), data.labels()));
    }
    Ok((m, losses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_model_is_half() {
        let m = LogisticModel::zeros(3, 0.0);
        assert_eq!(eval_logistic(&m, &[1.0, -4.0, 9.0]).unwrap(), 0.5);
        assert!(matches!(
            eval_logistic(&m, &[1.0]),
            Err(ModelError::DimensionMismatch {
                expected: 3,
                got: 1
            })
        ));
    }

    #[test]
    fn saturates() {
        let mut m = LogisticModel::zeros(1, 0.0);
        m.weights[0] = 1e3;
        assert!(eval_logistic(&m, &[1.0]).unwrap() > 1.0 - 1e-12);
    }

    #[test]
    fn empty_gradient_is_weight_decay() {
        let mut m = LogisticModel::zeros(2, 0.5);
        m.weights = vec![2.0, -4.0];
        m.bias = 3.0;
        assert_eq!(gradient_logistic(&m, &[], &[]), vec![1.0, -2.0, 1.5]);
    }

    #[test]
    fn symmetric_pair_cancels() {
        let m = LogisticModel::zeros(2, 0.0);
        let x = vec![vec![1.0, 1.0], vec![-1.0, 1.0]];
        let g = gradient_logistic(&m, &x, &[true, true]);
        assert_eq!(g[0], 0.0);
        let g = gradient_logistic(&m, &[vec![0.5, 0.0], vec![0.5, 0.0]], &[true, false]);
        assert_eq!(g[0], 0.0);
    }

    #[test]
    fn one_dimensional_sign() {
        let data = Dataset::new(vec![vec![1.0], vec![-1.0]], vec![true, false]).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.05,
            epochs: 50,
            ..TrainConfig::default()
        };
        let m = train_logistic(&data, &cfg).unwrap();
        assert!(m.weights[0] > 0.0);
    }

    #[test]
    fn single_class_is_bounded() {
        let data = Dataset::new(vec![vec![1.0]; 20], vec![true; 20]).unwrap();
        let cfg = TrainConfig {
            learning_rate: 0.1,
            epochs: 200,
            l2: 0.1,
            ..TrainConfig::default()
        };
        let m = train_logistic(&data, &cfg).unwrap();
        let p = eval_logistic(&m, &[1.0]).unwrap();
        assert!(p > 0.8 && p < 0.95, "{p}");
    }
}
