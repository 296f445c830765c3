//! Purchase strategies: pure functions from the public market view (plus
//! the acquirer's own data) to a budget-feasible purchase decision.
//!
//! Six families are built in:
//!
//! - `single:<i>` — spend everything on provider `i`.
//! - `all` — split the budget equally across every provider.
//! - `percent:<p>` — drop the p% of providers whose feature-label
//!   correlation vectors sit farthest from the acquirer's, then split
//!   equally across the rest.
//! - `rfe` — reduce to the top-k features by recursive feature elimination,
//!   rank providers by the consistency of their published feature relevance
//!   with the acquirer's model coefficients, buy top-2.
//! - `cofr` — the same consistency ranking over all features, buy top-2.
//! - `lp:1|2|inf` — rank by Lp distance between normalized coefficients and
//!   normalized feature relevance (small is better), buy top-2.
//!
//! Every strategy emits `cost <= budget` by construction: all splits use
//! exact rational arithmetic and per-provider counts come from
//! [`PricingFunction::max_affordable`].

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::datapool::Dataset;
use crate::error::{Error, Result};
use crate::market::{compute_feature_label_correlations, PublicView};
use crate::model::{self, TrainConfig};
use crate::money::Money;

/// Which Lp norm a distance-based strategy uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpNorm {
    L1,
    L2,
    LInf,
}

/// A named strategy with its parameters.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StrategyKind {
    /// Buy as much of one provider's dataset as the budget allows.
    Single(usize),
    /// Equal budget split across all providers.
    All,
    /// Exclude the p% most-distant providers, split across the rest.
    Percent(u8),
    /// Consistency ranking on RFE-selected features, top-2 allocation.
    Rfe,
    /// Consistency ranking on all features, top-2 allocation.
    CoFr,
    /// Lp-distance ranking on all features, top-2 allocation.
    Lp(LpNorm),
}

/// Human-readable list for error messages.
pub const VALID_STRATEGIES: &str = "single:<i>, all, percent:<p>, rfe, cofr, lp:1, lp:2, lp:inf";

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyKind::Single(i) => write!(f, "single:{i}"),
            StrategyKind::All => write!(f, "all"),
            StrategyKind::Percent(p) => write!(f, "percent:{p}"),
            StrategyKind::Rfe => write!(f, "rfe"),
            StrategyKind::CoFr => write!(f, "cofr"),
            StrategyKind::Lp(LpNorm::L1) => write!(f, "lp:1"),
            StrategyKind::Lp(LpNorm::L2) => write!(f, "lp:2"),
            StrategyKind::Lp(LpNorm::LInf) => write!(f, "lp:inf"),
        }
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let unknown = || Error::UnknownStrategy {
            given: s.to_string(),
            valid: VALID_STRATEGIES.to_string(),
        };
        match s.split_once(':') {
            None => match s {
                "all" => Ok(StrategyKind::All),
                "rfe" => Ok(StrategyKind::Rfe),
                "cofr" => Ok(StrategyKind::CoFr),
                _ => Err(unknown()),
            },
            Some(("single", i)) => i.parse().map(StrategyKind::Single).map_err(|_| unknown()),
            Some(("percent", p)) => {
                let p: u8 = p.parse().map_err(|_| unknown())?;
                if p > 100 {
                    return Err(Error::Parameter(format!(
                        "percent:{p} is out of range, p must be in [0, 100]"
                    )));
                }
                Ok(StrategyKind::Percent(p))
            }
            Some(("lp", norm)) => match norm {
                "1" => Ok(StrategyKind::Lp(LpNorm::L1)),
                "2" => Ok(StrategyKind::Lp(LpNorm::L2)),
                "inf" => Ok(StrategyKind::Lp(LpNorm::LInf)),
                _ => Err(unknown()),
            },
            Some(_) => Err(unknown()),
        }
    }
}

impl StrategyKind {
    /// Canonical report ordering: all, percent:p, single:i, rfe, cofr, lp.
    pub fn sort_key(&self) -> (u8, usize) {
        match self {
            StrategyKind::All => (0, 0),
            StrategyKind::Percent(p) => (1, *p as usize),
            StrategyKind::Single(i) => (2, *i),
            StrategyKind::Rfe => (3, 0),
            StrategyKind::CoFr => (4, 0),
            StrategyKind::Lp(LpNorm::L1) => (5, 1),
            StrategyKind::Lp(LpNorm::L2) => (5, 2),
            StrategyKind::Lp(LpNorm::LInf) => (5, 3),
        }
    }
}

/// How `percent:<p>` splits the budget after exclusion.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PercentSplit {
    /// Budget divided by the number of remaining providers (default).
    ByRemaining,
    /// Budget divided by the full provider count; the excluded providers'
    /// shares go unspent.
    ByTotal,
}

/// Tunables shared by the composite strategies.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct StrategyConfig {
    pub train: TrainConfig,
    /// Features kept by the RFE strategy.
    pub rfe_k: usize,
    /// Skip providers whose per-sample price exceeds this multiple of the
    /// market's median per-sample price.
    pub skip_factor: f64,
    pub percent_split: PercentSplit,
}

impl Default for StrategyConfig {
    fn default() -> Self {
        StrategyConfig {
            train: TrainConfig::default(),
            rfe_k: 5,
            skip_factor: 1.5,
            percent_split: PercentSplit::ByRemaining,
        }
    }
}

/// A per-provider purchase plan with its exact cost.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PurchaseDecision {
    /// Purchased fraction of each provider's dataset, in [0, 1].
    pub fractions: Vec<f64>,
    /// Purchased sample counts; `counts[i] == floor(fractions[i] * size_i)`.
    pub counts: Vec<usize>,
    /// Exact total cost of the counts.
    pub cost: Money,
}

impl PurchaseDecision {
    /// Builds a decision from per-provider counts, deriving fractions and
    /// the exact cost from the view's pricing.
    pub fn from_counts(counts: Vec<usize>, view: &PublicView) -> Result<Self> {
        if counts.len() != view.num_providers() {
            return Err(Error::Dimension(format!(
                "{} counts for {} providers",
                counts.len(),
                view.num_providers()
            )));
        }
        let mut cost = Money::zero();
        let mut fractions = Vec::with_capacity(counts.len());
        for (listing, &c) in view.listings.iter().zip(&counts) {
            cost += &listing.pricing.price(c)?;
            fractions.push(exact_fraction(c, listing.size));
        }
        Ok(PurchaseDecision {
            fractions,
            counts,
            cost,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }
}

/// Smallest f64 `f` with `floor(f * size) == count`. Division rounding can
/// land `count/size` a hair below the exact ratio; nudging by ulps restores
/// the floor identity without ever overshooting `count + 1`.
fn exact_fraction(count: usize, size: usize) -> f64 {
    let mut f = count as f64 / size as f64;
    while (f * size as f64).floor() < count as f64 {
        f = f64::from_bits(f.to_bits() + 1);
    }
    f
}

/// Distance or consistency scores of every provider against the acquirer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityProfile {
    /// The acquirer-side vector the scores were computed from: label
    /// correlations for distance scores, raw model coefficients for
    /// consistency and Lp scores.
    pub acquirer_vector: Vec<f64>,
    /// One score per provider.
    pub provider_scores: Vec<f64>,
}

// ---------------------------------------------------------------------------
// Baseline allocations
// ---------------------------------------------------------------------------

/// Buy as many samples from provider `i` as the whole budget allows.
pub fn strategy_single(i: usize, view: &PublicView) -> Result<PurchaseDecision> {
    let k = view.num_providers();
    if i >= k {
        return Err(Error::Parameter(format!(
            "provider index {i} out of range for {k} providers"
        )));
    }
    let mut counts = vec![0usize; k];
    counts[i] = view.listings[i].pricing.max_affordable(&view.budget);
    PurchaseDecision::from_counts(counts, view)
}

/// Equal budget split across `subset` (all providers when `None`).
pub fn strategy_all(view: &PublicView, subset: Option<&[usize]>) -> Result<PurchaseDecision> {
    let k = view.num_providers();
    let chosen: Vec<usize> = match subset {
        None => (0..k).collect(),
        Some(s) => {
            if s.is_empty() {
                return Err(Error::Parameter("provider subset is empty".into()));
            }
            if let Some(&bad) = s.iter().find(|&&i| i >= k) {
                return Err(Error::Parameter(format!(
                    "provider index {bad} out of range for {k} providers"
                )));
            }
            let dedup: BTreeSet<usize> = s.iter().copied().collect();
            dedup.into_iter().collect()
        }
    };
    allocate_equal(view, &chosen, chosen.len())
}

/// Give each chosen provider `budget / denominator` and buy what that
/// allowance affords. Exact arithmetic; fractional leftovers stay unspent.
fn allocate_equal(view: &PublicView, chosen: &[usize], denominator: usize) -> Result<PurchaseDecision> {
    let allowance = view.budget.div_int(denominator as u64);
    let mut counts = vec![0usize; view.num_providers()];
    for &i in chosen {
        counts[i] = view.listings[i].pricing.max_affordable(&allowance);
    }
    PurchaseDecision::from_counts(counts, view)
}

// ---------------------------------------------------------------------------
// Similarity scores
// ---------------------------------------------------------------------------

/// Squared Euclidean distance between the acquirer's feature-label
/// correlation vector and each provider's published one. Large scores flag
/// dissimilar providers.
pub fn correlation_distances(view: &PublicView, acquirer: &Dataset) -> Result<SimilarityProfile> {
    let r_acquirer = compute_feature_label_correlations(acquirer)?;
    let provider_scores = view
        .listings
        .iter()
        .map(|listing| {
            let r = &listing.stats.label_correlations;
            if r.len() != r_acquirer.len() {
                return Err(Error::Dimension(format!(
                    "provider {} publishes {} correlations, acquirer has {} features",
                    listing.provider_id,
                    r.len(),
                    r_acquirer.len()
                )));
            }
            Ok(r_acquirer
                .iter()
                .zip(r)
                .map(|(a, b)| (a - b) * (a - b))
                .sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SimilarityProfile {
        acquirer_vector: r_acquirer,
        provider_scores,
    })
}

/// Maps a vector affinely onto [0, 1]; a constant vector maps to all zeros.
pub fn min_max_normalize(v: &[f64]) -> Vec<f64> {
    let min = v.iter().copied().fold(f64::INFINITY, f64::min);
    let max = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if v.is_empty() || max == min {
        return vec![0.0; v.len()];
    }
    v.iter().map(|x| (x - min) / (max - min)).collect()
}

/// Consistency of each provider's published feature relevance with a given
/// coefficient vector: dot product of the two min-max-normalized vectors
/// restricted to `feature_set` (all features when `None`). Higher is better.
pub fn consistency_scores_with(
    coefficients: &[f64],
    view: &PublicView,
    feature_set: Option<&[usize]>,
) -> Result<SimilarityProfile> {
    let full: Vec<usize>;
    let fs: &[usize] = match feature_set {
        Some(s) => s,
        None => {
            full = (0..coefficients.len()).collect();
            &full
        }
    };
    if feature_set.is_some() && coefficients.len() != fs.len() {
        return Err(Error::Dimension(format!(
            "{} coefficients for a {}-feature subset",
            coefficients.len(),
            fs.len()
        )));
    }
    let n_coef = min_max_normalize(coefficients);
    let provider_scores = view
        .listings
        .iter()
        .map(|listing| {
            let rel = gather(&listing.stats.label_correlations, fs, listing.provider_id)?;
            let n_rel = min_max_normalize(&rel);
            Ok(n_coef.iter().zip(&n_rel).map(|(a, b)| a * b).sum())
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SimilarityProfile {
        acquirer_vector: coefficients.to_vec(),
        provider_scores,
    })
}

/// Trains on the acquirer's data restricted to `feature_set`, then scores
/// providers with [`consistency_scores_with`].
pub fn consistency_scores(
    view: &PublicView,
    acquirer: &Dataset,
    feature_set: Option<&[usize]>,
    cfg: &TrainConfig,
) -> Result<SimilarityProfile> {
    let fs: Vec<usize> = match feature_set {
        Some(s) => s.to_vec(),
        None => (0..acquirer.dim()).collect(),
    };
    let model = model::train_on_features(acquirer, &fs, cfg)?;
    consistency_scores_with(&model.weights, view, Some(&fs))
}

/// Lp distance between `a` and `b`.
pub fn lp_distance(a: &[f64], b: &[f64], norm: LpNorm) -> f64 {
    match norm {
        LpNorm::L1 => a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum(),
        LpNorm::L2 => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt(),
        LpNorm::LInf => a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    }
}

/// Lp distance between the normalized coefficient vector and each provider's
/// normalized feature relevance, over all features. Lower is better.
pub fn lp_scores_with(
    coefficients: &[f64],
    view: &PublicView,
    norm: LpNorm,
) -> Result<SimilarityProfile> {
    let fs: Vec<usize> = (0..coefficients.len()).collect();
    let n_coef = min_max_normalize(coefficients);
    let provider_scores = view
        .listings
        .iter()
        .map(|listing| {
            let rel = gather(&listing.stats.label_correlations, &fs, listing.provider_id)?;
            let n_rel = min_max_normalize(&rel);
            Ok(lp_distance(&n_coef, &n_rel, norm))
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(SimilarityProfile {
        acquirer_vector: coefficients.to_vec(),
        provider_scores,
    })
}

/// Trains on all of the acquirer's features, then scores providers with
/// [`lp_scores_with`].
pub fn lp_scores(
    view: &PublicView,
    acquirer: &Dataset,
    norm: LpNorm,
    cfg: &TrainConfig,
) -> Result<SimilarityProfile> {
    let model = model::train(acquirer, cfg)?;
    lp_scores_with(&model.weights, view, norm)
}

fn gather(correlations: &[f64], fs: &[usize], provider: usize) -> Result<Vec<f64>> {
    fs.iter()
        .map(|&j| {
            correlations.get(j).copied().ok_or_else(|| {
                Error::Dimension(format!(
                    "provider {provider} publishes {} correlations, feature {j} requested",
                    correlations.len()
                ))
            })
        })
        .collect()
}

// ---------------------------------------------------------------------------
// Top-2 allocation and the composite strategies
// ---------------------------------------------------------------------------

/// Buys the maximum affordable amount of the best-ranked provider, then
/// spends the remaining budget on the runner-up. Providers whose per-sample
/// price exceeds `skip_factor` times the market median are removed from the
/// ranking first.
pub fn top2_allocate(
    ranking: &[usize],
    view: &PublicView,
    skip_factor: f64,
) -> Result<PurchaseDecision> {
    let k = view.num_providers();
    if ranking.is_empty() {
        return Err(Error::Parameter("ranking is empty".into()));
    }
    if let Some(&bad) = ranking.iter().find(|&&i| i >= k) {
        return Err(Error::Parameter(format!(
            "provider index {bad} out of range for {k} providers"
        )));
    }

    let threshold = median_unit_cost(view).scale_f64(skip_factor);
    let filtered: Vec<usize> = ranking
        .iter()
        .copied()
        .filter(|&i| view.listings[i].pricing.unit_cost() <= threshold)
        .collect();
    if filtered.is_empty() {
        return Err(Error::Allocation(format!(
            "no provider in the ranking passes the {skip_factor}x-median unit-cost filter"
        )));
    }
    if filtered.len() < ranking.len() {
        let skipped: Vec<usize> = ranking
            .iter()
            .copied()
            .filter(|i| !filtered.contains(i))
            .collect();
        log::info!("skipping high-unit-cost providers {skipped:?}");
    }

    let mut counts = vec![0usize; k];
    let first = filtered[0];
    counts[first] = view.listings[first].pricing.max_affordable(&view.budget);
    let spent = view.listings[first].pricing.price(counts[first])?;
    let remaining = view.budget.clone() - &spent;
    if let Some(&second) = filtered.get(1) {
        counts[second] = view.listings[second].pricing.max_affordable(&remaining);
    }

    let decision = PurchaseDecision::from_counts(counts, view)?;
    if decision.is_zero() {
        log::warn!("top-2 allocation could not afford a single sample");
    }
    Ok(decision)
}

/// Exact median of the per-sample prices across the whole market.
fn median_unit_cost(view: &PublicView) -> Money {
    let mut costs: Vec<Money> = view
        .listings
        .iter()
        .map(|l| l.pricing.unit_cost())
        .collect();
    costs.sort();
    let n = costs.len();
    if n % 2 == 1 {
        costs[n / 2].clone()
    } else {
        Money::midpoint(&costs[n / 2 - 1], &costs[n / 2])
    }
}

/// Provider indices sorted by descending score; ties favor the lower index.
pub fn rank_descending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Provider indices sorted by ascending score; ties favor the lower index.
pub fn rank_ascending(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| {
        scores[a]
            .partial_cmp(&scores[b])
            .unwrap_or(Ordering::Equal)
            .then(a.cmp(&b))
    });
    order
}

/// Excludes the `ceil(p * K / 100)` providers with the largest correlation
/// distance (ties: higher index excluded first) and splits the budget across
/// the rest.
pub fn strategy_percent(p: u8, view: &PublicView, acquirer: &Dataset) -> Result<PurchaseDecision> {
    strategy_percent_split(p, view, acquirer, PercentSplit::ByRemaining)
}

pub fn strategy_percent_split(
    p: u8,
    view: &PublicView,
    acquirer: &Dataset,
    split: PercentSplit,
) -> Result<PurchaseDecision> {
    if p > 100 {
        return Err(Error::Parameter(format!("p must be in [0, 100], got {p}")));
    }
    let k = view.num_providers();
    let exclude_count = (p as usize * k).div_ceil(100);
    if exclude_count >= k {
        return Err(Error::Parameter(format!(
            "excluding {p}% of {k} providers leaves none to buy from"
        )));
    }

    let profile = correlation_distances(view, acquirer)?;
    let mut order: Vec<usize> = (0..k).collect();
    // Largest distance first; among ties the higher index goes first, so it
    // is excluded first.
    order.sort_by(|&a, &b| {
        profile.provider_scores[b]
            .partial_cmp(&profile.provider_scores[a])
            .unwrap_or(Ordering::Equal)
            .then(b.cmp(&a))
    });
    let excluded: BTreeSet<usize> = order[..exclude_count].iter().copied().collect();
    if !excluded.is_empty() {
        log::info!("percent:{p} excludes providers {excluded:?}");
    }
    let remaining: Vec<usize> = (0..k).filter(|i| !excluded.contains(i)).collect();
    let denominator = match split {
        PercentSplit::ByRemaining => remaining.len(),
        PercentSplit::ByTotal => k,
    };
    allocate_equal(view, &remaining, denominator)
}

/// RFE down to `cfg.rfe_k` features, consistency ranking on the survivors,
/// top-2 allocation. The target is clamped to the data dimension.
pub fn strategy_rfe(
    view: &PublicView,
    acquirer: &Dataset,
    cfg: &StrategyConfig,
) -> Result<PurchaseDecision> {
    let target = cfg.rfe_k.min(acquirer.dim()).max(1);
    let subset = model::rfe(acquirer, target, &cfg.train)?;
    let profile = consistency_scores(view, acquirer, Some(&subset), &cfg.train)?;
    top2_allocate(&rank_descending(&profile.provider_scores), view, cfg.skip_factor)
}

/// Consistency ranking across all features, top-2 allocation.
pub fn strategy_cofr(
    view: &PublicView,
    acquirer: &Dataset,
    cfg: &StrategyConfig,
) -> Result<PurchaseDecision> {
    let profile = consistency_scores(view, acquirer, None, &cfg.train)?;
    top2_allocate(&rank_descending(&profile.provider_scores), view, cfg.skip_factor)
}

/// Lp-distance ranking across all features (ascending), top-2 allocation.
pub fn strategy_lp(
    view: &PublicView,
    acquirer: &Dataset,
    norm: LpNorm,
    cfg: &StrategyConfig,
) -> Result<PurchaseDecision> {
    let profile = lp_scores(view, acquirer, norm, &cfg.train)?;
    top2_allocate(&rank_ascending(&profile.provider_scores), view, cfg.skip_factor)
}

/// Runs any built-in strategy against a public view.
pub fn run_strategy(
    kind: StrategyKind,
    view: &PublicView,
    acquirer: &Dataset,
    cfg: &StrategyConfig,
) -> Result<PurchaseDecision> {
    match kind {
        StrategyKind::Single(i) => strategy_single(i, view),
        StrategyKind::All => strategy_all(view, None),
        StrategyKind::Percent(p) => strategy_percent_split(p, view, acquirer, cfg.percent_split),
        StrategyKind::Rfe => strategy_rfe(view, acquirer, cfg),
        StrategyKind::CoFr => strategy_cofr(view, acquirer, cfg),
        StrategyKind::Lp(norm) => strategy_lp(view, acquirer, norm, cfg),
    }
}
