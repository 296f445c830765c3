//! Binary logistic regression and recursive feature elimination.
//!
//! The trainer is deliberately plain: zero initialization, full-batch
//! gradient descent with a backtracking (Armijo) line search, L2 penalty on
//! the weights only. No randomness anywhere, so training is bit-for-bit
//! deterministic. Features are standardized inside `train` and the
//! transform is stored on the model, which makes coefficient magnitudes
//! comparable across features — the property the elimination rule and the
//! coefficient-based similarity scores rely on.

use serde::{Deserialize, Serialize};

use crate::datapool::Dataset;
use crate::error::{Error, Result};

/// Bias magnitude used by constant (degenerate) models; sigmoid(±25)
/// saturates well past any threshold.
const DEGENERATE_BIAS: f64 = 25.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepRule {
    /// Fixed initial step, halved until the Armijo condition holds.
    FixedWithBacktracking,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L2 penalty on the weights (bias unregularized).
    pub l2_lambda: f64,
    pub max_iters: usize,
    /// Stop when the gradient infinity-norm falls below this.
    pub tolerance: f64,
    pub step_rule: StepRule,
    /// Step size each iteration starts from.
    pub initial_step: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            l2_lambda: 1e-4,
            max_iters: 500,
            tolerance: 1e-6,
            step_rule: StepRule::FixedWithBacktracking,
            initial_step: 1.0,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.l2_lambda.is_nan() || self.l2_lambda < 0.0 {
            return Err(Error::Config {
                field: "l2_lambda",
                reason: "must be nonnegative".into(),
            });
        }
        if self.max_iters < 1 {
            return Err(Error::Config {
                field: "max_iters",
                reason: "must be at least 1".into(),
            });
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(Error::Config {
                field: "tolerance",
                reason: "must be positive".into(),
            });
        }
        if self.initial_step.is_nan() || self.initial_step <= 0.0 {
            return Err(Error::Config {
                field: "initial_step",
                reason: "must be positive".into(),
            });
        }
        Ok(())
    }
}

/// A trained binary classifier. Weights live in standardized feature space;
/// prediction applies the stored transform. When `feature_subset` is set the
/// model reads only those columns of an input vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    /// Sorted original-space indices the model was trained on, if reduced.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub feature_subset: Option<Vec<usize>>,
    /// Per-feature means of the training set (subset order).
    pub feature_means: Vec<f64>,
    /// Per-feature standard deviations; zero-variance features store 1.
    pub feature_scales: Vec<f64>,
    /// True when training data had a single class and the model is a
    /// constant predictor.
    pub degenerate: bool,
}

impl LogisticModel {
    /// A constant model always predicting `label`.
    pub fn constant(label: u8) -> Self {
        LogisticModel {
            weights: Vec::new(),
            bias: if label == 1 {
                DEGENERATE_BIAS
            } else {
                -DEGENERATE_BIAS
            },
            feature_subset: None,
            feature_means: Vec::new(),
            feature_scales: Vec::new(),
            degenerate: true,
        }
    }

    /// Number of features the model consumes (subset size when reduced).
    pub fn num_features(&self) -> usize {
        self.weights.len()
    }

    /// Decision-function margin for a full-dimensional feature vector.
    fn margin(&self, features: &[f64]) -> f64 {
        let mut m = self.bias;
        match &self.feature_subset {
            None => {
                for ((w, x), (mu, s)) in self
                    .weights
                    .iter()
                    .zip(features)
                    .zip(self.feature_means.iter().zip(&self.feature_scales))
                {
                    m += w * (x - mu) / s;
                }
            }
            Some(subset) => {
                for (k, &j) in subset.iter().enumerate() {
                    m += self.weights[k] * (features[j] - self.feature_means[k])
                        / self.feature_scales[k];
                }
            }
        }
        m
    }

    /// Predicted probability of label 1.
    pub fn predict_proba(&self, features: &[f64]) -> f64 {
        sigmoid(self.margin(features))
    }

    /// Thresholded prediction: probability >= 0.5 maps to 1.
    pub fn predict(&self, features: &[f64]) -> u8 {
        u8::from(self.predict_proba(features) >= 0.5)
    }
}

fn sigmoid(m: f64) -> f64 {
    if m >= 0.0 {
        1.0 / (1.0 + (-m).exp())
    } else {
        let e = m.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^m), stable for large |m|.
fn softplus(m: f64) -> f64 {
    if m > 0.0 {
        m + (-m).exp().ln_1p()
    } else {
        m.exp().ln_1p()
    }
}

/// Standardized design matrix for training: row-major `n x d` plus the
/// transform used to build it.
struct Design {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    means: Vec<f64>,
    scales: Vec<f64>,
    labels: Vec<f64>,
}

impl Design {
    fn build(data: &Dataset, subset: &[usize]) -> Design {
        let rows = data.len();
        let cols = subset.len();
        let n = rows as f64;

        let mut means = vec![0.0; cols];
        for p in &data.points {
            for (k, &j) in subset.iter().enumerate() {
                means[k] += p.features[j];
            }
        }
        for m in &mut means {
            *m /= n;
        }

        let mut vars = vec![0.0; cols];
        for p in &data.points {
            for (k, &j) in subset.iter().enumerate() {
                let d = p.features[j] - means[k];
                vars[k] += d * d;
            }
        }
        let scales: Vec<f64> = vars
            .iter()
            .map(|v| {
                let s = (v / n).sqrt();
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();

        let mut matrix = vec![0.0; rows * cols];
        for (i, p) in data.points.iter().enumerate() {
            for (k, &j) in subset.iter().enumerate() {
                matrix[i * cols + k] = (p.features[j] - means[k]) / scales[k];
            }
        }

        Design {
            rows,
            cols,
            data: matrix,
            means,
            scales,
            labels: data.labels_f64(),
        }
    }

    /// Mean log-loss plus L2 penalty, and its exact gradient over
    /// `[weights..., bias]`.
    fn loss_and_grad(&self, weights: &[f64], bias: f64, l2: f64) -> (f64, Vec<f64>) {
        let n = self.rows as f64;
        let mut loss = 0.0;
        let mut grad = vec![0.0; self.cols + 1];
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut m = bias;
            for (w, x) in weights.iter().zip(row) {
                m += w * x;
            }
            let y = self.labels[i];
            loss += softplus(m) - y * m;
            let r = sigmoid(m) - y;
            for (g, x) in grad[..self.cols].iter_mut().zip(row) {
                *g += r * x;
            }
            grad[self.cols] += r;
        }
        loss /= n;
        for g in &mut grad {
            *g /= n;
        }
        for (g, w) in grad[..self.cols].iter_mut().zip(weights) {
            *g += l2 * w;
        }
        loss += 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>();
        (loss, grad)
    }

    fn loss(&self, weights: &[f64], bias: f64, l2: f64) -> f64 {
        let n = self.rows as f64;
        let mut loss = 0.0;
        for i in 0..self.rows {
            let row = &self.data[i * self.cols..(i + 1) * self.cols];
            let mut m = bias;
            for (w, x) in weights.iter().zip(row) {
                m += w * x;
            }
            loss += softplus(m) - self.labels[i] * m;
        }
        loss / n + 0.5 * l2 * weights.iter().map(|w| w * w).sum::<f64>()
    }
}

/// Regularized mean log-loss of `model` on `data` and its gradient over
/// `[weights..., bias]`. Uses the model's stored standardization, so finite
/// differences on the model parameters match the returned gradient.
pub fn loss_and_grad(model: &LogisticModel, data: &Dataset, l2_lambda: f64) -> Result<(f64, Vec<f64>)> {
    if data.is_empty() {
        return Err(Error::EmptyInput("loss of an empty dataset"));
    }
    let expected = model
        .feature_subset
        .as_ref()
        .map_or(model.weights.len(), |s| s.len());
    if model.weights.len() != expected {
        return Err(Error::Dimension(format!(
            "model has {} weights for a {expected}-feature subset",
            model.weights.len()
        )));
    }
    let full_dim = data.dim();
    if let Some(subset) = &model.feature_subset {
        if subset.iter().any(|&j| j >= full_dim) {
            return Err(Error::Dimension(format!(
                "feature subset index out of range for dim {full_dim}"
            )));
        }
    } else if model.weights.len() != full_dim {
        return Err(Error::Dimension(format!(
            "model has {} weights, data has {} features",
            model.weights.len(),
            full_dim
        )));
    }

    let n = data.len() as f64;
    let d = model.weights.len();
    let mut loss = 0.0;
    let mut grad = vec![0.0; d + 1];
    for p in &data.points {
        let m = model.margin(&p.features);
        let y = f64::from(p.label);
        loss += softplus(m) - y * m;
        let r = sigmoid(m) - y;
        match &model.feature_subset {
            None => {
                let cols = p.features.iter().zip(&model.feature_means).zip(&model.feature_scales);
                for (g, ((x, mu), s)) in grad[..d].iter_mut().zip(cols) {
                    *g += r * (x - mu) / s;
                }
            }
            Some(subset) => {
                for (k, &j) in subset.iter().enumerate() {
                    grad[k] += r * (p.features[j] - model.feature_means[k])
                        / model.feature_scales[k];
                }
            }
        }
        grad[d] += r;
    }
    loss /= n;
    for g in &mut grad {
        *g /= n;
    }
    for (g, w) in grad[..d].iter_mut().zip(&model.weights) {
        *g += l2_lambda * w;
    }
    loss += 0.5 * l2_lambda * model.weights.iter().map(|w| w * w).sum::<f64>();
    Ok((loss, grad))
}

/// Trains on all features of `data`.
pub fn train(data: &Dataset, cfg: &TrainConfig) -> Result<LogisticModel> {
    let subset: Vec<usize> = (0..data.dim()).collect();
    let mut model = train_on_features(data, &subset, cfg)?;
    // Full-space models carry no subset marker.
    model.feature_subset = None;
    Ok(model)
}

/// Trains on the given original-space feature columns. The returned model's
/// `feature_subset` is the sorted column list.
pub fn train_on_features(data: &Dataset, subset: &[usize], cfg: &TrainConfig) -> Result<LogisticModel> {
    cfg.validate()?;
    if data.is_empty() {
        return Err(Error::EmptyInput("training on an empty dataset"));
    }
    let dim = data.dim();
    if subset.iter().any(|&j| j >= dim) {
        return Err(Error::Dimension(format!(
            "feature subset index out of range for dim {dim}"
        )));
    }
    let mut subset = subset.to_vec();
    subset.sort_unstable();
    subset.dedup();

    // Single-class data cannot be fit; return the constant predictor.
    let first = data.points[0].label;
    if data.points.iter().all(|p| p.label == first) {
        let mut model = LogisticModel::constant(first);
        model.weights = vec![0.0; subset.len()];
        model.feature_means = vec![0.0; subset.len()];
        model.feature_scales = vec![1.0; subset.len()];
        model.feature_subset = Some(subset);
        return Ok(model);
    }

    let design = Design::build(data, &subset);
    let mut weights = vec![0.0; design.cols];
    let mut bias = 0.0;
    let (mut loss, mut grad) = design.loss_and_grad(&weights, bias, cfg.l2_lambda);

    for _ in 0..cfg.max_iters {
        let grad_inf = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));
        if grad_inf <= cfg.tolerance {
            break;
        }
        let grad_sq: f64 = grad.iter().map(|g| g * g).sum();

        // Armijo backtracking from the fixed initial step.
        let mut step = cfg.initial_step;
        let mut accepted = false;
        for _ in 0..60 {
            let cand_w: Vec<f64> = weights
                .iter()
                .zip(&grad[..design.cols])
                .map(|(w, g)| w - step * g)
                .collect();
            let cand_b = bias - step * grad[design.cols];
            let cand_loss = design.loss(&cand_w, cand_b, cfg.l2_lambda);
            if cand_loss <= loss - 1e-4 * step * grad_sq {
                weights = cand_w;
                bias = cand_b;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No descent step exists at representable sizes; we are done.
            break;
        }
        let (l, g) = design.loss_and_grad(&weights, bias, cfg.l2_lambda);
        loss = l;
        grad = g;
    }

    Ok(LogisticModel {
        weights,
        bias,
        feature_subset: Some(subset),
        feature_means: design.means,
        feature_scales: design.scales,
        degenerate: false,
    })
}

/// Fraction of points whose thresholded prediction equals the label.
pub fn accuracy(model: &LogisticModel, data: &Dataset) -> Result<f64> {
    if data.is_empty() {
        return Err(Error::EmptyInput("accuracy on an empty dataset"));
    }
    let correct = data
        .points
        .iter()
        .filter(|p| model.predict(&p.features) == p.label)
        .count();
    Ok(correct as f64 / data.len() as f64)
}

/// Recursive feature elimination: train, drop the feature with the smallest
/// absolute coefficient (ties: lowest index dropped), retrain, until
/// `target_k` features remain. Returns the surviving indices, sorted.
pub fn rfe(data: &Dataset, target_k: usize, cfg: &TrainConfig) -> Result<Vec<usize>> {
    let dim = data.dim();
    if target_k < 1 || target_k > dim {
        return Err(Error::Parameter(format!(
            "target_k must be in [1, {dim}], got {target_k}"
        )));
    }
    let mut active: Vec<usize> = (0..dim).collect();
    while active.len() > target_k {
        let model = train_on_features(data, &active, cfg)?;
        // Lexicographic argmin over (|coefficient|, feature index).
        let mut drop_pos = 0;
        for (pos, w) in model.weights.iter().enumerate() {
            if w.abs() < model.weights[drop_pos].abs() {
                drop_pos = pos;
            }
        }
        active.remove(drop_pos);
    }
    Ok(active)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datapool::DataPoint;

    fn point(features: Vec<f64>, label: u8) -> DataPoint {
        DataPoint {
            features,
            label,
            category: None,
        }
    }

    /// Two well-separated 2-D blobs, deterministic lattice layout.
    fn separable_blobs(n_per: usize) -> Dataset {
        let mut points = Vec::new();
        for i in 0..n_per {
            let dx = (i % 5) as f64 * 0.1;
            let dy = (i / 5) as f64 * 0.1;
            points.push(point(vec![-3.0 + dx, -3.0 + dy], 0));
            points.push(point(vec![3.0 + dx, 3.0 + dy], 1));
        }
        Dataset::new(points)
    }

    #[test]
    fn zero_model_on_balanced_labels_has_log2_loss() {
        let data = Dataset::new(vec![
            point(vec![1.0, -2.0], 0),
            point(vec![-0.5, 0.25], 1),
            point(vec![2.0, 1.0], 0),
            point(vec![0.1, -0.1], 1),
        ]);
        let model = LogisticModel {
            weights: vec![0.0, 0.0],
            bias: 0.0,
            feature_subset: None,
            feature_means: vec![0.0, 0.0],
            feature_scales: vec![1.0, 1.0],
            degenerate: false,
        };
        let (loss, _) = loss_and_grad(&model, &data, 0.0).unwrap();
        assert!((loss - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        // Deterministic pseudo-random data via the crate generator.
        use rand::Rng;
        let mut rng = crate::rng::rng_from(31);
        let points: Vec<DataPoint> = (0..20)
            .map(|_| {
                point(
                    (0..4).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect(),
                    u8::from(rng.random::<f64>() < 0.5),
                )
            })
            .collect();
        let data = Dataset::new(points);
        let model = LogisticModel {
            weights: (0..4).map(|_| rng.random::<f64>() - 0.5).collect(),
            bias: rng.random::<f64>() - 0.5,
            feature_subset: None,
            feature_means: vec![0.0; 4],
            feature_scales: vec![1.0; 4],
            degenerate: false,
        };
        let l2 = 1e-3;
        let (_, grad) = loss_and_grad(&model, &data, l2).unwrap();
        let h = 1e-6;
        for (k, &gk) in grad.iter().enumerate() {
            let mut plus = model.clone();
            let mut minus = model.clone();
            if k < 4 {
                plus.weights[k] += h;
                minus.weights[k] -= h;
            } else {
                plus.bias += h;
                minus.bias -= h;
            }
            let (lp, _) = loss_and_grad(&plus, &data, l2).unwrap();
            let (lm, _) = loss_and_grad(&minus, &data, l2).unwrap();
            let fd = (lp - lm) / (2.0 * h);
            let rel = (gk - fd).abs() / gk.abs().max(1e-8);
            assert!(rel < 1e-5, "component {k}: grad {gk} vs fd {fd}");
        }
    }

    #[test]
    fn confident_correct_prediction_has_tiny_loss() {
        let data = Dataset::new(vec![point(vec![10.0], 1)]);
        let model = LogisticModel {
            weights: vec![1.0],
            bias: 0.0,
            feature_subset: None,
            feature_means: vec![0.0],
            feature_scales: vec![1.0],
            degenerate: false,
        };
        let (loss, _) = loss_and_grad(&model, &data, 0.0).unwrap();
        assert!(loss < 1e-3, "loss {loss}");
    }

    #[test]
    fn separable_data_trains_to_high_accuracy() {
        let data = separable_blobs(50);
        let model = train(&data, &TrainConfig::default()).unwrap();
        assert!(accuracy(&model, &data).unwrap() >= 0.99);
    }

    #[test]
    fn single_class_data_yields_degenerate_model() {
        let data = Dataset::new(vec![point(vec![1.0], 1), point(vec![2.0], 1)]);
        let model = train(&data, &TrainConfig::default()).unwrap();
        assert!(model.degenerate);
        assert_eq!(model.predict(&[0.0]), 1);
        assert_eq!(model.predict(&[100.0]), 1);
    }

    #[test]
    fn training_is_bit_deterministic() {
        let data = separable_blobs(30);
        let a = train(&data, &TrainConfig::default()).unwrap();
        let b = train(&data, &TrainConfig::default()).unwrap();
        assert_eq!(a.weights, b.weights);
        assert_eq!(a.bias.to_bits(), b.bias.to_bits());
    }

    #[test]
    fn training_descends_monotonically() {
        // Re-run training manually, asserting loss never rises.
        let data = separable_blobs(20);
        let cfg = TrainConfig::default();
        let subset: Vec<usize> = vec![0, 1];
        let design = Design::build(&data, &subset);
        let mut w = vec![0.0; 2];
        let mut b = 0.0;
        let (mut loss, mut grad) = design.loss_and_grad(&w, b, cfg.l2_lambda);
        for _ in 0..50 {
            let grad_sq: f64 = grad.iter().map(|g| g * g).sum();
            let mut step = cfg.initial_step;
            loop {
                let cw: Vec<f64> = w.iter().zip(&grad[..2]).map(|(w, g)| w - step * g).collect();
                let cb = b - step * grad[2];
                let cl = design.loss(&cw, cb, cfg.l2_lambda);
                if cl <= loss - 1e-4 * step * grad_sq {
                    assert!(cl <= loss, "loss rose from {loss} to {cl}");
                    w = cw;
                    b = cb;
                    break;
                }
                step *= 0.5;
                assert!(step > 1e-30, "line search exhausted");
            }
            let (l, g) = design.loss_and_grad(&w, b, cfg.l2_lambda);
            loss = l;
            grad = g;
        }
    }

    #[test]
    fn accuracy_examples() {
        let single = Dataset::new(vec![point(vec![5.0], 1)]);
        let model = train(&single, &TrainConfig::default()).unwrap();
        assert_eq!(accuracy(&model, &single).unwrap(), 1.0);

        // Constant model on mixed labels scores the label frequency.
        let data = Dataset::new(vec![
            point(vec![0.0], 1),
            point(vec![0.0], 1),
            point(vec![0.0], 1),
            point(vec![0.0], 0),
        ]);
        let constant = LogisticModel::constant(1);
        assert_eq!(accuracy(&constant, &data).unwrap(), 0.75);
    }

    #[test]
    fn accuracy_matches_confusion_count_oracle() {
        let data = separable_blobs(50);
        let model = train(&data, &TrainConfig::default()).unwrap();
        let acc = accuracy(&model, &data).unwrap();
        let mut hits = 0usize;
        for p in &data.points {
            let predicted = u8::from(model.predict_proba(&p.features) >= 0.5);
            if predicted == p.label {
                hits += 1;
            }
        }
        assert_eq!(acc, hits as f64 / data.len() as f64);
    }

    #[test]
    fn rfe_with_full_target_keeps_everything() {
        let data = separable_blobs(20);
        let kept = rfe(&data, 2, &TrainConfig::default()).unwrap();
        assert_eq!(kept, vec![0, 1]);
    }

    #[test]
    fn rfe_eliminates_the_noise_feature() {
        // Features 0 and 1 determine the label; feature 2 is fixed noise.
        let mut points = Vec::new();
        for i in 0..40 {
            let wiggle = (i as f64 * 0.37).sin();
            let (x0, x1, label) = if i % 2 == 0 {
                (2.0 + 0.1 * wiggle, 1.5, 1)
            } else {
                (-2.0 + 0.1 * wiggle, -1.5, 0)
            };
            points.push(point(vec![x0, x1, wiggle], label));
        }
        let data = Dataset::new(points);
        let kept = rfe(&data, 2, &TrainConfig::default()).unwrap();
        assert_eq!(kept, vec![0, 1]);
    }

    #[test]
    fn rfe_rejects_oversized_target() {
        let data = separable_blobs(10);
        assert!(matches!(
            rfe(&data, 3, &TrainConfig::default()),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn rfe_output_is_sorted_unique_and_sized() {
        let mut points = Vec::new();
        for i in 0..30 {
            let t = i as f64 * 0.7;
            points.push(point(
                vec![t.sin(), t.cos(), (t * 1.3).sin(), (t * 0.9).cos(), t % 1.0],
                u8::from(t.sin() > 0.0),
            ));
        }
        let data = Dataset::new(points);
        for k in 1..=5 {
            let kept = rfe(&data, k, &TrainConfig::default()).unwrap();
            assert_eq!(kept.len(), k);
            let mut sorted = kept.clone();
            sorted.sort_unstable();
            sorted.dedup();
            assert_eq!(sorted, kept);
            assert!(kept.iter().all(|&j| j < 5));
        }
    }

    #[test]
    fn model_serialization_round_trips() {
        let data = separable_blobs(20);
        let model = train(&data, &TrainConfig::default()).unwrap();
        let text = serde_json::to_string(&model).unwrap();
        let back: LogisticModel = serde_json::from_str(&text).unwrap();
        assert_eq!(back, model);
    }
}
