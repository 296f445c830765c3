//! Synthetic labeled data pool and dataset sampling.
//!
//! The pool is a mixture of per-category isotropic Gaussian clusters with a
//! shared linear ground-truth labeling rule: a point of category `c` gets
//! label 1 iff `w·x + b_c > 0`, where `w` is a unit vector drawn from the
//! pool seed and `b_c` is a per-category offset. Because the offsets vary by
//! category, a single linear model cannot fit every category at once — how
//! useful a dataset is for a given evaluation set depends on how similar the
//! two category mixtures are. Providers sample from the pool with their own
//! category weights, sizes and label-flip rates.
//!
//! All sampling is driven by the ChaCha8 generator (see [`GENERATOR_ID`]);
//! identical configs produce identical datasets run over run.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, GENERATOR_ID, SALT_SAMPLE};

/// Per-category offset jitter, as a multiple of `feature_noise`. At 1.5 the
/// within-category label balance ranges from roughly 7% to 93% positive.
const OFFSET_JITTER_FACTOR: f64 = 1.5;

/// Configuration of the synthetic pool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PoolConfig {
    /// Feature dimension of every data point.
    pub dim: usize,
    /// Number of cluster categories in the pool.
    pub num_categories: usize,
    /// Side length of the hypercube the cluster centers are drawn from.
    pub category_separation: f64,
    /// Within-cluster standard deviation. Must be positive.
    pub feature_noise: f64,
    /// Seed for centers, labeling direction and category offsets.
    pub seed: u64,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            dim: 768,
            num_categories: 21,
            category_separation: 4.0,
            feature_noise: 1.0,
            seed: 0,
        }
    }
}

impl PoolConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::Config {
                field: "dim",
                reason: "must be at least 1".into(),
            });
        }
        if self.num_categories < 1 {
            return Err(Error::Config {
                field: "num_categories",
                reason: "must be at least 1".into(),
            });
        }
        if self.category_separation.is_nan() || self.category_separation < 0.0 {
            return Err(Error::Config {
                field: "category_separation",
                reason: format!("must be nonnegative, got {}", self.category_separation),
            });
        }
        if self.feature_noise.is_nan() || self.feature_noise <= 0.0 {
            return Err(Error::Config {
                field: "feature_noise",
                reason: format!("must be positive, got {}", self.feature_noise),
            });
        }
        Ok(())
    }
}

/// One labeled point: the unit of sale.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub features: Vec<f64>,
    /// Binary label, 0 or 1.
    pub label: u8,
    /// Pool category the point was drawn from. Private generator metadata:
    /// stripped from every public artifact, so it is optional after a
    /// public round trip.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub category: Option<u32>,
}

impl DataPoint {
    /// Copy with the private category removed, for public listings.
    pub(crate) fn sanitized(&self) -> DataPoint {
        DataPoint {
            features: self.features.clone(),
            label: self.label,
            category: None,
        }
    }
}

/// An owned collection of data points with a common dimension.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Dataset {
    pub points: Vec<DataPoint>,
}

impl Dataset {
    pub fn new(points: Vec<DataPoint>) -> Self {
        Dataset { points }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Feature dimension, taken from the first point (0 when empty).
    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.features.len())
    }

    /// Values of feature `j` across all points.
    pub fn feature_column(&self, j: usize) -> Vec<f64> {
        self.points.iter().map(|p| p.features[j]).collect()
    }

    /// Labels as floats, for numeric work.
    pub fn labels_f64(&self) -> Vec<f64> {
        self.points.iter().map(|p| f64::from(p.label)).collect()
    }

    /// Normalized category histogram over `num_categories` bins. Points
    /// without category metadata are ignored.
    pub fn category_histogram(&self, num_categories: usize) -> Vec<f64> {
        let mut counts = vec![0usize; num_categories];
        let mut total = 0usize;
        for p in &self.points {
            if let Some(c) = p.category {
                counts[c as usize] += 1;
                total += 1;
            }
        }
        if total == 0 {
            return vec![0.0; num_categories];
        }
        counts.iter().map(|&c| c as f64 / total as f64).collect()
    }

    pub(crate) fn sanitized(&self) -> Dataset {
        Dataset {
            points: self.points.iter().map(DataPoint::sanitized).collect(),
        }
    }
}

/// How one provider samples its dataset from the pool.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProviderSpec {
    /// Mixture weights over pool categories; nonnegative, sum to 1.
    pub category_weights: Vec<f64>,
    /// Number of points to sample.
    pub size: usize,
    /// Probability of flipping each sampled label, in [0, 0.5].
    pub label_flip_rate: f64,
    /// Seed for this provider's draws.
    pub seed: u64,
}

impl ProviderSpec {
    /// Uniform category weights, no label noise.
    pub fn uniform(num_categories: usize, size: usize, seed: u64) -> Self {
        ProviderSpec {
            category_weights: vec![1.0 / num_categories as f64; num_categories],
            size,
            label_flip_rate: 0.0,
            seed,
        }
    }

    pub fn validate(&self, num_categories: usize) -> Result<()> {
        if self.category_weights.len() != num_categories {
            return Err(Error::Dimension(format!(
                "category_weights has {} entries, pool has {} categories",
                self.category_weights.len(),
                num_categories
            )));
        }
        if self.category_weights.iter().any(|&w| w.is_nan() || w < 0.0) {
            return Err(Error::Config {
                field: "category_weights",
                reason: "entries must be nonnegative".into(),
            });
        }
        let sum: f64 = self.category_weights.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::Config {
                field: "category_weights",
                reason: format!("must sum to 1, got {sum}"),
            });
        }
        if self.size < 1 {
            return Err(Error::Config {
                field: "size",
                reason: "must be at least 1".into(),
            });
        }
        if !(0.0..=0.5).contains(&self.label_flip_rate) {
            return Err(Error::Config {
                field: "label_flip_rate",
                reason: format!("must be in [0, 0.5], got {}", self.label_flip_rate),
            });
        }
        Ok(())
    }
}

/// A generated pool: cluster centers plus the ground-truth labeling rule.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataPool {
    /// PRNG algorithm recorded for reproducibility.
    generator: String,
    config: PoolConfig,
    /// Per-category cluster centers, `num_categories x dim`.
    centers: Vec<Vec<f64>>,
    /// Unit vector of the labeling rule.
    label_direction: Vec<f64>,
    /// Per-category offsets `b_c` of the labeling rule.
    category_offsets: Vec<f64>,
}

impl DataPool {
    /// Generates the pool description from its config. Deterministic: the
    /// same config yields a bit-identical pool.
    pub fn generate(config: &PoolConfig) -> Result<DataPool> {
        config.validate()?;
        let mut rng = rng::rng_from(config.seed);

        let half = config.category_separation / 2.0;
        let centers: Vec<Vec<f64>> = (0..config.num_categories)
            .map(|_| {
                (0..config.dim)
                    .map(|_| rng.random::<f64>() * config.category_separation - half)
                    .collect()
            })
            .collect();

        // Unit labeling direction with random signs and magnitudes bounded
        // away from zero, so every feature carries usable label relevance.
        let label_direction: Vec<f64> = {
            let v: Vec<f64> = (0..config.dim)
                .map(|_| {
                    let sign = if rng.random::<f64>() < 0.5 { -1.0 } else { 1.0 };
                    sign * (0.5 + rng.random::<f64>())
                })
                .collect();
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.into_iter().map(|x| x / norm).collect()
        };

        // Offset each category so its cluster straddles the decision plane,
        // with a per-category jitter so no single global bias fits them all
        // and per-category label balance genuinely varies.
        let category_offsets: Vec<f64> = centers
            .iter()
            .map(|center| {
                let through_center: f64 = label_direction
                    .iter()
                    .zip(center)
                    .map(|(w, c)| w * c)
                    .sum();
                let jitter =
                    (rng.random::<f64>() * 2.0 - 1.0) * OFFSET_JITTER_FACTOR * config.feature_noise;
                -through_center + jitter
            })
            .collect();

        Ok(DataPool {
            generator: GENERATOR_ID.to_string(),
            config: config.clone(),
            centers,
            label_direction,
            category_offsets,
        })
    }

    pub fn config(&self) -> &PoolConfig {
        &self.config
    }

    pub fn centers(&self) -> &[Vec<f64>] {
        &self.centers
    }

    /// Ground-truth label of a feature vector in the given category.
    pub fn true_label(&self, features: &[f64], category: u32) -> u8 {
        let margin: f64 = self
            .label_direction
            .iter()
            .zip(features)
            .map(|(w, x)| w * x)
            .sum();
        u8::from(margin + self.category_offsets[category as usize] > 0.0)
    }

    /// Samples a provider dataset: exactly `spec.size` points, categories
    /// drawn from `spec.category_weights`, labels flipped independently with
    /// probability `spec.label_flip_rate`. Deterministic given (pool, spec).
    pub fn sample_provider_dataset(&self, spec: &ProviderSpec) -> Result<Dataset> {
        spec.validate(self.config.num_categories)?;
        let mut rng = rng::rng_from(rng::mix_indexed(self.config.seed, SALT_SAMPLE, spec.seed));

        let points = (0..spec.size)
            .map(|_| {
                let category = draw_category(&mut rng, &spec.category_weights);
                let center = &self.centers[category as usize];
                let features: Vec<f64> = center
                    .iter()
                    .map(|&c| c + self.config.feature_noise * rng.sample::<f64, _>(StandardNormal))
                    .collect();
                let mut label = self.true_label(&features, category);
                if spec.label_flip_rate > 0.0 && rng.random::<f64>() < spec.label_flip_rate {
                    label = 1 - label;
                }
                DataPoint {
                    features,
                    label,
                    category: Some(category),
                }
            })
            .collect();

        Ok(Dataset::new(points))
    }

    /// Samples the acquirer's evaluation set. Same mechanics as
    /// [`sample_provider_dataset`](Self::sample_provider_dataset); intended
    /// use is a small clean set (`label_flip_rate` 0).
    pub fn sample_acquirer_set(&self, spec: &ProviderSpec) -> Result<Dataset> {
        self.sample_provider_dataset(spec)
    }
}

/// Inverse-CDF draw over mixture weights. The final category absorbs any
/// floating-point shortfall in the cumulative sum.
fn draw_category(rng: &mut rand_chacha::ChaCha8Rng, weights: &[f64]) -> u32 {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (c, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return c as u32;
        }
    }
    (weights.len() - 1) as u32
}
