//! Market construction: pricing functions, summary statistics, provider
//! listings and the public/private information boundary.
//!
//! A [`MarketInstance`] owns the sealed private datasets; everything a
//! purchase strategy may observe lives in [`PublicView`]. Strategy code
//! takes `&PublicView` only, so the boundary is enforced by the type
//! system, and the serialized public section carries nothing beyond the
//! shared samples, summary statistics, pricing and the acquirer's own
//! evaluation set.

use serde::{Deserialize, Serialize};

use crate::datapool::{DataPoint, DataPool, Dataset, PoolConfig, ProviderSpec};
use crate::error::{Error, Result};
use crate::money::Money;
use crate::rng::{self, GENERATOR_ID, SALT_BENCH, SALT_MARKET, SALT_SHARED};
use crate::FORMAT_VERSION;

/// Quantile grid resolution used in summary statistics: 101 values at
/// probabilities 0%, 1%, ..., 100%.
pub const NUM_QUANTILE_DIVISIONS: usize = 100;

/// Number of markets in a standard benchmark bundle.
pub const DEFAULT_MARKET_COUNT: usize = 5;

// ---------------------------------------------------------------------------
// Pricing
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PricingKind {
    Linear,
}

/// Nonnegative, monotone map from purchased sample count to price.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PricingFunction {
    pub kind: PricingKind,
    /// Price of the entire dataset.
    pub total_price: Money,
    /// Number of samples the dataset holds.
    pub dataset_size: usize,
}

impl PricingFunction {
    pub fn linear(total_price: Money, dataset_size: usize) -> Result<Self> {
        if total_price.is_negative() {
            return Err(Error::Config {
                field: "total_price",
                reason: "must be nonnegative".into(),
            });
        }
        if dataset_size < 1 {
            return Err(Error::Config {
                field: "dataset_size",
                reason: "must be at least 1".into(),
            });
        }
        Ok(PricingFunction {
            kind: PricingKind::Linear,
            total_price,
            dataset_size,
        })
    }

    /// Exact price of `q` samples.
    pub fn price(&self, q: usize) -> Result<Money> {
        if q > self.dataset_size {
            return Err(Error::Quantity {
                requested: q,
                size: self.dataset_size,
            });
        }
        match self.kind {
            PricingKind::Linear => Ok(self.total_price.mul_div(q as u64, self.dataset_size as u64)),
        }
    }

    /// Largest `q` with `price(q) <= budget`, capped at the dataset size.
    pub fn max_affordable(&self, budget: &Money) -> usize {
        if budget.is_negative() {
            return 0;
        }
        match self.kind {
            PricingKind::Linear => {
                match self
                    .total_price
                    .inverse_floor(budget, self.dataset_size as u64)
                {
                    // A free dataset is affordable in its entirety.
                    None => self.dataset_size,
                    Some(q) => (q as usize).min(self.dataset_size),
                }
            }
        }
    }

    /// Exact price per sample.
    pub fn unit_cost(&self) -> Money {
        self.total_price.mul_div(1, self.dataset_size as u64)
    }
}

// ---------------------------------------------------------------------------
// Summary statistics
// ---------------------------------------------------------------------------

/// Quantiles at probabilities `k / num_divisions` for `k = 0..=num_divisions`,
/// with linear interpolation between order statistics. The rank arithmetic is
/// done in integers, so grid points that land exactly on an order statistic
/// reproduce it bit-for-bit.
pub fn compute_quantiles(values: &[f64], num_divisions: usize) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(Error::EmptyInput("quantiles of an empty vector"));
    }
    if num_divisions < 1 {
        return Err(Error::Parameter("num_divisions must be at least 1".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len();
    Ok((0..=num_divisions)
        .map(|k| {
            // rank = k (n - 1) / num_divisions
            let num = k * (n - 1);
            let lo = num / num_divisions;
            let rem = num % num_divisions;
            if rem == 0 {
                sorted[lo]
            } else {
                let frac = rem as f64 / num_divisions as f64;
                sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
            }
        })
        .collect())
}

/// Pearson correlation of each feature against the 0/1 label. Features or
/// labels with zero variance yield 0 by convention.
pub fn compute_feature_label_correlations(data: &Dataset) -> Result<Vec<f64>> {
    if data.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "correlations need at least 2 points, got {}",
            data.len()
        )));
    }
    let n = data.len() as f64;
    let labels = data.labels_f64();
    let mean_y = labels.iter().sum::<f64>() / n;
    let syy: f64 = labels.iter().map(|y| (y - mean_y) * (y - mean_y)).sum();

    let dim = data.dim();
    let mut out = Vec::with_capacity(dim);
    for j in 0..dim {
        if syy == 0.0 {
            out.push(0.0);
            continue;
        }
        let xs = data.feature_column(j);
        let mean_x = xs.iter().sum::<f64>() / n;
        let mut sxx = 0.0;
        let mut sxy = 0.0;
        for (x, y) in xs.iter().zip(&labels) {
            let dx = x - mean_x;
            sxx += dx * dx;
            sxy += dx * (y - mean_y);
        }
        if sxx == 0.0 {
            out.push(0.0);
        } else {
            out.push((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0));
        }
    }
    Ok(out)
}

/// Public per-provider statistics: marginal quantiles of every feature and
/// of the label (one row per feature, label row last), plus the correlation
/// of each feature with the label.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryStatistics {
    /// `(dim + 1) x (num_divisions + 1)` quantile grid; the last row is the
    /// label's.
    pub quantiles: Vec<Vec<f64>>,
    /// One Pearson correlation per feature, each in [-1, 1].
    pub label_correlations: Vec<f64>,
}

impl SummaryStatistics {
    pub fn compute(data: &Dataset, num_divisions: usize) -> Result<Self> {
        let dim = data.dim();
        let labels = data.labels_f64();
        let mut quantiles = Vec::with_capacity(dim + 1);
        for j in 0..dim {
            quantiles.push(compute_quantiles(&data.feature_column(j), num_divisions)?);
        }
        quantiles.push(compute_quantiles(&labels, num_divisions)?);
        let label_correlations = compute_feature_label_correlations(data)?;
        Ok(SummaryStatistics {
            quantiles,
            label_correlations,
        })
    }
}

// ---------------------------------------------------------------------------
// Listings and markets
// ---------------------------------------------------------------------------

/// Everything a provider reveals before any purchase.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProviderListing {
    pub provider_id: usize,
    /// A handful of samples from the private dataset, category stripped.
    pub shared_samples: Vec<DataPoint>,
    pub stats: SummaryStatistics,
    pub pricing: PricingFunction,
    /// Size of the private dataset on sale.
    pub size: usize,
}

/// Builds a provider's public listing from its private dataset. Shared
/// samples are drawn uniformly without replacement using `seed`; statistics
/// are computed over the full private dataset.
pub fn make_listing(
    private: &Dataset,
    provider_id: usize,
    total_price: Money,
    n_shared: usize,
    seed: u64,
) -> Result<ProviderListing> {
    if n_shared < 1 {
        return Err(Error::Parameter("n_shared must be at least 1".into()));
    }
    if n_shared > private.len() {
        return Err(Error::SampleCount {
            requested: n_shared,
            size: private.len(),
        });
    }
    let mut rng = rng::rng_from(seed);
    let shared_samples: Vec<DataPoint> = rng::sample_indices(&mut rng, private.len(), n_shared)
        .into_iter()
        .map(|i| private.points[i].sanitized())
        .collect();
    Ok(ProviderListing {
        provider_id,
        shared_samples,
        stats: SummaryStatistics::compute(private, NUM_QUANTILE_DIVISIONS)?,
        pricing: PricingFunction::linear(total_price, private.len())?,
        size: private.len(),
    })
}

/// The acquirer's complete pre-purchase knowledge: listings, budget and its
/// own evaluation set. Holds no reference, direct or transitive, to any
/// private dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PublicView {
    pub listings: Vec<ProviderListing>,
    pub budget: Money,
    pub acquirer_set: Dataset,
}

impl PublicView {
    pub fn num_providers(&self) -> usize {
        self.listings.len()
    }
}

/// One complete market: the public view plus the sealed private datasets.
/// Private data is reachable only through the evaluation path.
#[derive(Clone, Debug)]
pub struct MarketInstance {
    public: PublicView,
    private_datasets: Vec<Dataset>,
    seed: u64,
}

impl MarketInstance {
    pub(crate) fn from_parts(
        public: PublicView,
        private_datasets: Vec<Dataset>,
        seed: u64,
    ) -> Result<Self> {
        if public.listings.len() != private_datasets.len() {
            return Err(Error::Dimension(format!(
                "{} listings but {} private datasets",
                public.listings.len(),
                private_datasets.len()
            )));
        }
        for (listing, data) in public.listings.iter().zip(&private_datasets) {
            if listing.size != data.len() {
                return Err(Error::Dimension(format!(
                    "provider {}: listing size {} but dataset has {} points",
                    listing.provider_id,
                    listing.size,
                    data.len()
                )));
            }
            let full_price = listing.pricing.price(listing.size)?;
            if full_price > public.budget {
                return Err(Error::Affordability {
                    provider: listing.provider_id,
                    price: full_price.to_string(),
                    budget: public.budget.to_string(),
                });
            }
        }
        Ok(MarketInstance {
            public,
            private_datasets,
            seed,
        })
    }

    pub fn public_view(&self) -> &PublicView {
        &self.public
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn num_providers(&self) -> usize {
        self.public.listings.len()
    }

    pub fn budget(&self) -> &Money {
        &self.public.budget
    }

    pub(crate) fn private_dataset(&self, provider: usize) -> &Dataset {
        &self.private_datasets[provider]
    }

    #[cfg(test)]
    pub(crate) fn private_datasets(&self) -> &[Dataset] {
        &self.private_datasets
    }
}

// ---------------------------------------------------------------------------
// Market configuration and construction
// ---------------------------------------------------------------------------

/// Fully explicit recipe for one market instance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarketConfig {
    pub provider_specs: Vec<ProviderSpec>,
    pub acquirer_spec: ProviderSpec,
    pub budget: Money,
    /// Sticker price of every provider's full dataset.
    pub total_price: Money,
    /// Samples each provider shares publicly.
    pub n_shared: usize,
}

/// Knobs for drawing a [`MarketConfig`] from a seed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarketParams {
    pub num_providers: usize,
    pub budget: Money,
    pub total_price: Money,
    pub n_shared: usize,
    /// Inclusive range provider dataset sizes are drawn from. Varying sizes
    /// give varying per-sample costs.
    pub size_range: (usize, usize),
    pub acquirer_size: usize,
    /// Dirichlet-style concentration of provider category mixtures; lower
    /// values yield more skewed mixtures.
    pub mixture_concentration: f64,
    /// Ordinary providers flip labels with a rate drawn from
    /// `[0, base_flip_max]`.
    pub base_flip_max: f64,
    /// How many providers per market sell badly labeled data.
    pub noisy_provider_count: usize,
    /// Flip-rate range for the noisy providers.
    pub noisy_flip_range: (f64, f64),
    /// Mixture concentration of the noisy providers. By default they sample
    /// like everyone else; label quality is their only defect.
    pub noisy_mixture_concentration: f64,
}

impl Default for MarketParams {
    fn default() -> Self {
        MarketParams {
            num_providers: 20,
            budget: Money::from_dollars(150),
            total_price: Money::from_dollars(100),
            n_shared: 5,
            size_range: (800, 2000),
            acquirer_size: 500,
            mixture_concentration: 2.0,
            base_flip_max: 0.05,
            noisy_provider_count: 3,
            noisy_flip_range: (0.4, 0.5),
            noisy_mixture_concentration: 2.0,
        }
    }
}

impl MarketConfig {
    /// Draws a market configuration from `params` and a seed: per-provider
    /// category mixtures, sizes, flip rates and sampling seeds, plus a
    /// uniform clean acquirer spec.
    pub fn sampled(params: &MarketParams, num_categories: usize, seed: u64) -> MarketConfig {
        use rand::Rng;
        let mut rng = rng::rng_from(rng::mix(seed, SALT_MARKET));
        let k = params.num_providers;

        let mut provider_specs: Vec<ProviderSpec> = (0..k)
            .map(|_| {
                let weights = dirichlet(&mut rng, num_categories, params.mixture_concentration);
                let size = rng.random_range(params.size_range.0..=params.size_range.1);
                let label_flip_rate = rng.random::<f64>() * params.base_flip_max;
                ProviderSpec {
                    category_weights: weights,
                    size,
                    label_flip_rate,
                    seed: rng.random::<u64>(),
                }
            })
            .collect();

        let noisy = params.noisy_provider_count.min(k);
        let (lo, hi) = params.noisy_flip_range;
        for idx in rng::sample_indices(&mut rng, k, noisy) {
            provider_specs[idx].label_flip_rate = lo + rng.random::<f64>() * (hi - lo);
            provider_specs[idx].category_weights =
                dirichlet(&mut rng, num_categories, params.noisy_mixture_concentration);
        }

        let acquirer_spec = ProviderSpec {
            category_weights: vec![1.0 / num_categories as f64; num_categories],
            size: params.acquirer_size,
            label_flip_rate: 0.0,
            seed: rng.random::<u64>(),
        };

        MarketConfig {
            provider_specs,
            acquirer_spec,
            budget: params.budget.clone(),
            total_price: params.total_price.clone(),
            n_shared: params.n_shared,
        }
    }
}

/// Symmetric Dirichlet draw via normalized Gamma variates.
fn dirichlet(rng: &mut rand_chacha::ChaCha8Rng, n: usize, concentration: f64) -> Vec<f64> {
    use rand::Rng;
    let gamma = rand_distr::Gamma::new(concentration.max(1e-3), 1.0).expect("valid gamma");
    let draws: Vec<f64> = (0..n).map(|_| rng.sample(gamma)).collect();
    let sum: f64 = draws.iter().sum();
    if sum <= 0.0 {
        return vec![1.0 / n as f64; n];
    }
    draws.into_iter().map(|g| g / sum).collect()
}

/// Builds one market instance: samples every provider's private dataset and
/// the acquirer set from the pool, assembles listings, and verifies that
/// every full dataset is affordable. Deterministic in all inputs.
pub fn build_market(
    pool_cfg: &PoolConfig,
    cfg: &MarketConfig,
    seed: u64,
) -> Result<MarketInstance> {
    if cfg.provider_specs.is_empty() {
        return Err(Error::Parameter("market needs at least one provider".into()));
    }
    let pool = DataPool::generate(pool_cfg)?;

    let mut private_datasets = Vec::with_capacity(cfg.provider_specs.len());
    let mut listings = Vec::with_capacity(cfg.provider_specs.len());
    for (i, spec) in cfg.provider_specs.iter().enumerate() {
        let data = pool.sample_provider_dataset(spec)?;
        let listing = make_listing(
            &data,
            i,
            cfg.total_price.clone(),
            cfg.n_shared,
            rng::mix_indexed(seed, SALT_SHARED, i as u64),
        )?;
        private_datasets.push(data);
        listings.push(listing);
    }

    let acquirer_set = pool.sample_acquirer_set(&cfg.acquirer_spec)?.sanitized();

    MarketInstance::from_parts(
        PublicView {
            listings,
            budget: cfg.budget.clone(),
            acquirer_set,
        },
        private_datasets,
        seed,
    )
}

/// Builds a bundle of `count` markets over one pool. Every market shares the
/// structure (provider count, budget, prices) and differs in provider
/// mixtures, sizes and label quality.
pub fn build_benchmark(
    pool_cfg: &PoolConfig,
    params: &MarketParams,
    base_seed: u64,
    count: usize,
) -> Result<Vec<MarketInstance>> {
    (0..count)
        .map(|i| {
            let market_seed = rng::mix_indexed(base_seed, SALT_BENCH, i as u64);
            let cfg = MarketConfig::sampled(params, pool_cfg.num_categories, market_seed);
            build_market(pool_cfg, &cfg, market_seed)
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Market file format
// ---------------------------------------------------------------------------

/// On-disk form of one market instance. The `private` section is omitted in
/// public-only files; strategies never need it.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarketFile {
    pub format_version: String,
    pub generator: String,
    /// 1-based market number within its benchmark bundle.
    pub index: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest_digest: Option<String>,
    pub public: PublicView,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub private: Option<Vec<Dataset>>,
}

impl MarketFile {
    pub fn new(
        market: &MarketInstance,
        index: usize,
        manifest_digest: Option<String>,
        public_only: bool,
    ) -> Self {
        MarketFile {
            format_version: FORMAT_VERSION.to_string(),
            generator: GENERATOR_ID.to_string(),
            index,
            seed: market.seed,
            manifest_digest,
            public: market.public.clone(),
            private: if public_only {
                None
            } else {
                Some(market.private_datasets.clone())
            },
        }
    }

    pub fn has_private(&self) -> bool {
        self.private.is_some()
    }

    /// Reassembles a full market instance; errors when the private section
    /// is absent or inconsistent with the listings.
    pub fn into_instance(self) -> Result<MarketInstance> {
        let private = self.private.ok_or_else(|| {
            Error::IncompleteData("market file has no private section; cannot evaluate".into())
        })?;
        MarketInstance::from_parts(self.public, private, self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::datapool::PoolConfig;
    use proptest::prelude::*;

    fn small_pool_cfg() -> PoolConfig {
        PoolConfig {
            dim: 4,
            num_categories: 3,
            category_separation: 4.0,
            feature_noise: 1.0,
            seed: 5,
        }
    }

    fn small_market() -> MarketInstance {
        let params = MarketParams {
            num_providers: 4,
            size_range: (60, 120),
            acquirer_size: 50,
            n_shared: 5,
            ..MarketParams::default()
        };
        let cfg = MarketConfig::sampled(&params, 3, 42);
        build_market(&small_pool_cfg(), &cfg, 42).unwrap()
    }

    #[test]
    fn quantiles_of_singleton_are_constant() {
        let q = compute_quantiles(&[5.0], 10).unwrap();
        assert_eq!(q, vec![5.0; 11]);
    }

    #[test]
    fn quantiles_at_exact_order_statistics() {
        let q = compute_quantiles(&[1.0, 2.0, 3.0, 4.0, 5.0], 4).unwrap();
        assert_eq!(q, vec![1.0, 2.0, 3.0, 4.0, 5.0]);
    }

    #[test]
    fn quantiles_of_empty_input_error() {
        assert!(matches!(
            compute_quantiles(&[], 4),
            Err(Error::EmptyInput(_))
        ));
    }

    #[test]
    fn correlation_of_label_with_itself_is_one() {
        let points = (0..10)
            .map(|i| DataPoint {
                features: vec![f64::from(i % 2)],
                label: (i % 2) as u8,
                category: None,
            })
            .collect();
        let corr = compute_feature_label_correlations(&Dataset::new(points)).unwrap();
        assert!((corr[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn constant_feature_has_zero_correlation() {
        let points = (0..10)
            .map(|i| DataPoint {
                features: vec![3.0],
                label: (i % 2) as u8,
                category: None,
            })
            .collect();
        let corr = compute_feature_label_correlations(&Dataset::new(points)).unwrap();
        assert_eq!(corr[0], 0.0);
    }

    #[test]
    fn correlation_needs_two_points() {
        let data = Dataset::new(vec![DataPoint {
            features: vec![1.0],
            label: 1,
            category: None,
        }]);
        assert!(matches!(
            compute_feature_label_correlations(&data),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn linear_price_endpoints_and_midpoint() {
        let p = PricingFunction::linear(Money::from_dollars(100), 1000).unwrap();
        assert_eq!(p.price(0).unwrap(), Money::zero());
        assert_eq!(p.price(1000).unwrap(), Money::from_dollars(100));
        assert_eq!(p.price(500).unwrap(), Money::from_dollars(50));
        assert!(matches!(p.price(1001), Err(Error::Quantity { .. })));
    }

    #[test]
    fn max_affordable_examples() {
        let p = PricingFunction::linear(Money::from_dollars(100), 1000).unwrap();
        assert_eq!(p.max_affordable(&Money::from_dollars(150)), 1000);
        assert_eq!(p.max_affordable(&Money::from_dollars_f64(7.5)), 75);
        assert_eq!(p.max_affordable(&Money::zero()), 0);
    }

    #[test]
    fn listing_shares_exactly_n_samples_from_the_dataset() {
        let pool = DataPool::generate(&small_pool_cfg()).unwrap();
        let data = pool
            .sample_provider_dataset(&ProviderSpec::uniform(3, 1000, 8))
            .unwrap();
        let listing = make_listing(&data, 0, Money::from_dollars(100), 5, 77).unwrap();
        assert_eq!(listing.shared_samples.len(), 5);
        for s in &listing.shared_samples {
            assert!(
                data.points
                    .iter()
                    .any(|p| p.features == s.features && p.label == s.label),
                "shared sample not found in the private dataset"
            );
            assert!(s.category.is_none(), "category must be stripped");
        }
    }

    #[test]
    fn sharing_everything_is_a_permutation() {
        let pool = DataPool::generate(&small_pool_cfg()).unwrap();
        let data = pool
            .sample_provider_dataset(&ProviderSpec::uniform(3, 20, 8))
            .unwrap();
        let listing = make_listing(&data, 0, Money::from_dollars(100), 20, 77).unwrap();
        let mut shared: Vec<_> = listing
            .shared_samples
            .iter()
            .map(|p| format!("{:?}", p.features))
            .collect();
        let mut original: Vec<_> = data
            .points
            .iter()
            .map(|p| format!("{:?}", p.features))
            .collect();
        shared.sort();
        original.sort();
        assert_eq!(shared, original);
    }

    #[test]
    fn listing_is_deterministic_in_the_seed() {
        let pool = DataPool::generate(&small_pool_cfg()).unwrap();
        let data = pool
            .sample_provider_dataset(&ProviderSpec::uniform(3, 100, 8))
            .unwrap();
        let a = make_listing(&data, 0, Money::from_dollars(100), 5, 123).unwrap();
        let b = make_listing(&data, 0, Money::from_dollars(100), 5, 123).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn oversharing_is_a_sample_count_error() {
        let pool = DataPool::generate(&small_pool_cfg()).unwrap();
        let data = pool
            .sample_provider_dataset(&ProviderSpec::uniform(3, 10, 8))
            .unwrap();
        assert!(matches!(
            make_listing(&data, 0, Money::from_dollars(100), 11, 1),
            Err(Error::SampleCount { .. })
        ));
    }

    #[test]
    fn default_benchmark_market_shape() {
        let params = MarketParams {
            size_range: (80, 150),
            acquirer_size: 60,
            ..MarketParams::default()
        };
        let cfg = MarketConfig::sampled(&params, 3, 7);
        let market = build_market(&small_pool_cfg(), &cfg, 7).unwrap();
        assert_eq!(market.num_providers(), 20);
        assert_eq!(*market.budget(), Money::from_dollars(150));
        for l in &market.public_view().listings {
            assert_eq!(l.pricing.total_price, Money::from_dollars(100));
            assert_eq!(l.shared_samples.len(), 5);
        }
    }

    #[test]
    fn single_provider_market_builds() {
        let params = MarketParams {
            num_providers: 1,
            size_range: (30, 40),
            acquirer_size: 20,
            ..MarketParams::default()
        };
        let cfg = MarketConfig::sampled(&params, 3, 9);
        let market = build_market(&small_pool_cfg(), &cfg, 9).unwrap();
        assert_eq!(market.num_providers(), 1);
    }

    #[test]
    fn unaffordable_provider_is_rejected() {
        let params = MarketParams {
            num_providers: 2,
            budget: Money::from_dollars(50),
            total_price: Money::from_dollars(100),
            size_range: (30, 40),
            acquirer_size: 20,
            ..MarketParams::default()
        };
        let cfg = MarketConfig::sampled(&params, 3, 9);
        assert!(matches!(
            build_market(&small_pool_cfg(), &cfg, 9),
            Err(Error::Affordability { .. })
        ));
    }

    #[test]
    fn public_view_serialization_leaks_no_private_data() {
        let market = small_market();
        let view = market.public_view();
        let json = serde_json::to_value(view).unwrap();
        let mut feature_arrays = 0usize;
        let mut category_keys = 0usize;
        count_keys(&json, &mut feature_arrays, &mut category_keys);
        let k = market.num_providers();
        let expected = 5 * k + view.acquirer_set.len();
        assert_eq!(feature_arrays, expected, "unexpected sample count");
        assert_eq!(category_keys, 0, "category metadata leaked");
        let text = json.to_string();
        assert!(!text.contains("private"));
    }

    fn count_keys(v: &serde_json::Value, features: &mut usize, categories: &mut usize) {
        match v {
            serde_json::Value::Object(map) => {
                for (k, val) in map {
                    if k == "features" {
                        *features += 1;
                    }
                    if k == "category" {
                        *categories += 1;
                    }
                    count_keys(val, features, categories);
                }
            }
            serde_json::Value::Array(items) => {
                for item in items {
                    count_keys(item, features, categories);
                }
            }
            _ => {}
        }
    }

    #[test]
    fn benchmark_markets_share_structure_and_differ_in_mixtures() {
        let params = MarketParams {
            num_providers: 5,
            size_range: (50, 90),
            acquirer_size: 40,
            ..MarketParams::default()
        };
        let markets = build_benchmark(&small_pool_cfg(), &params, 3, 5).unwrap();
        assert_eq!(markets.len(), 5);
        for m in &markets {
            assert_eq!(m.num_providers(), 5);
            assert_eq!(*m.budget(), Money::from_dollars(150));
        }
        // Mixtures differ across markets: compare first provider stats.
        let s0 = &markets[0].public_view().listings[0].stats.label_correlations;
        let s1 = &markets[1].public_view().listings[0].stats.label_correlations;
        assert_ne!(s0, s1);
    }

    #[test]
    fn market_file_round_trips_and_public_only_drops_private() {
        let market = small_market();
        let full = MarketFile::new(&market, 1, Some("digest".into()), false);
        let text = serde_json::to_string(&full).unwrap();
        let back: MarketFile = serde_json::from_str(&text).unwrap();
        assert!(back.has_private());
        let instance = back.into_instance().unwrap();
        assert_eq!(instance.num_providers(), market.num_providers());

        let public = MarketFile::new(&market, 1, None, true);
        assert!(!public.has_private());
        assert!(public.into_instance().is_err());
    }

    proptest! {
        #[test]
        fn quantile_rows_are_monotone_with_exact_endpoints(
            values in proptest::collection::vec(-1e6f64..1e6, 1..200),
            divisions in 1usize..150,
        ) {
            let q = compute_quantiles(&values, divisions).unwrap();
            prop_assert_eq!(q.len(), divisions + 1);
            for w in q.windows(2) {
                prop_assert!(w[0] <= w[1]);
            }
            let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert_eq!(q[0], min);
            prop_assert_eq!(q[divisions], max);
        }

        #[test]
        fn linear_pricing_is_additive_and_invertible(
            total in 0i64..1_000_000,
            size in 1usize..5000,
            a in 0usize..5000,
            b in 0usize..5000,
        ) {
            let a = a % (size + 1);
            let b = b % (size + 1 - a);
            let p = PricingFunction::linear(Money::from_milli(total), size).unwrap();
            let pa = p.price(a).unwrap();
            let pb = p.price(b).unwrap();
            let pab = p.price(a + b).unwrap();
            // Exact rational arithmetic: additivity holds exactly.
            prop_assert_eq!(pa.clone() + pb, pab);
            // Inverting the price of q affords at least q.
            let q = a;
            prop_assert!(p.max_affordable(&p.price(q).unwrap()) >= q);
        }
    }
}
