//! Purchase execution and strategy scoring.
//!
//! This is the only module that touches the sealed private datasets. A
//! decision is executed by drawing the purchased samples (uniformly, without
//! replacement, seeded by market seed and provider id), the evaluation model
//! is trained on the union, and the strategy is scored by
//! `scale * (alpha * accuracy + (1 - alpha) * (budget - cost) / budget)`,
//! averaged over the markets of a benchmark bundle.

use serde::{Deserialize, Serialize};

use crate::datapool::Dataset;
use crate::error::{Error, Result};
use crate::market::MarketInstance;
use crate::model::{self, LogisticModel, TrainConfig};
use crate::money::Money;
use crate::rng::{self, SALT_PURCHASE};
use crate::strategies::{self, PurchaseDecision, StrategyConfig, StrategyKind};

/// Weights of the score formula.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Weight on accuracy versus budget savings, in [0, 1].
    pub alpha: f64,
    /// Overall scale of the score. Fixed at 100 in the standard setup.
    pub scale: f64,
}

impl Default for ScoreConfig {
    fn default() -> Self {
        ScoreConfig {
            alpha: 0.98,
            scale: 100.0,
        }
    }
}

impl ScoreConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(Error::Config {
                field: "alpha",
                reason: format!("must be in [0, 1], got {}", self.alpha),
            });
        }
        Ok(())
    }
}

/// Outcome of one strategy on one market.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarketScore {
    /// Evaluation-model accuracy on the acquirer's set, in [0, 1].
    pub accuracy: f64,
    /// Exact cost of the executed purchase.
    pub cost: Money,
    /// Cost in dollars, for readability.
    pub cost_dollars: f64,
    /// Combined accuracy/savings score.
    pub score: f64,
    pub purchased_counts: Vec<usize>,
}

/// Scores of one strategy across a benchmark bundle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub per_market: Vec<MarketScore>,
    /// Arithmetic mean of the per-market scores.
    pub average_score: f64,
}

/// Executes a decision against the sealed datasets: draws `counts[i]`
/// samples uniformly without replacement from provider `i`, seeded by
/// `(seed, provider id)`. Returns the concatenated purchase and its exact
/// cost. Refuses over-budget decisions outright — no partial fill.
pub fn execute_purchase(
    market: &MarketInstance,
    decision: &PurchaseDecision,
    seed: u64,
) -> Result<(Dataset, Money)> {
    let k = market.num_providers();
    if decision.counts.len() != k {
        return Err(Error::Dimension(format!(
            "decision covers {} providers, market has {k}",
            decision.counts.len()
        )));
    }

    // Recompute the exact cost from the counts; the decision's own cost
    // field is not trusted.
    let mut cost = Money::zero();
    for (listing, &c) in market.public_view().listings.iter().zip(&decision.counts) {
        if c > listing.size {
            return Err(Error::Quantity {
                requested: c,
                size: listing.size,
            });
        }
        cost += &listing.pricing.price(c)?;
    }
    if cost > *market.budget() {
        return Err(Error::BudgetExceeded {
            cost: cost.to_string(),
            budget: market.budget().to_string(),
        });
    }

    let mut points = Vec::new();
    for (i, &c) in decision.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        let private = market.private_dataset(i);
        let mut rng = rng::rng_from(rng::mix_indexed(seed, SALT_PURCHASE, i as u64));
        for idx in rng::sample_indices(&mut rng, private.len(), c) {
            points.push(private.points[idx].clone());
        }
    }
    Ok((Dataset::new(points), cost))
}

/// The score formula: `scale * (alpha * accuracy + (1 - alpha) * savings)`
/// where `savings = (budget - cost) / budget`.
pub fn score(accuracy: f64, cost: &Money, budget: &Money, cfg: &ScoreConfig) -> Result<f64> {
    cfg.validate()?;
    if !(0.0..=1.0).contains(&accuracy) {
        return Err(Error::Parameter(format!(
            "accuracy must be in [0, 1], got {accuracy}"
        )));
    }
    if budget.is_zero() || budget.is_negative() {
        return Err(Error::Parameter("budget must be positive".into()));
    }
    if cost > budget {
        return Err(Error::BudgetExceeded {
            cost: cost.to_string(),
            budget: budget.to_string(),
        });
    }
    let savings = (budget.clone() - cost).dollars() / budget.dollars();
    Ok(cfg.scale * (cfg.alpha * accuracy + (1.0 - cfg.alpha) * savings))
}

/// Trains the evaluation model on a purchase. Empty purchases fall back to
/// a constant model (class 0 by convention) so evaluation stays total.
fn train_evaluation_model(purchased: &Dataset, cfg: &TrainConfig) -> Result<LogisticModel> {
    if purchased.is_empty() {
        return Ok(LogisticModel::constant(0));
    }
    model::train(purchased, cfg)
}

/// Executes, trains, and scores one decision on one market.
pub fn evaluate(
    market: &MarketInstance,
    decision: &PurchaseDecision,
    train_cfg: &TrainConfig,
    score_cfg: &ScoreConfig,
) -> Result<MarketScore> {
    let (purchased, cost) = execute_purchase(market, decision, market.seed())?;
    let model = train_evaluation_model(&purchased, train_cfg)?;
    let accuracy = model::accuracy(&model, &market.public_view().acquirer_set)?;
    let score = score(accuracy, &cost, market.budget(), score_cfg)?;
    Ok(MarketScore {
        accuracy,
        cost_dollars: cost.dollars(),
        cost,
        score,
        purchased_counts: decision.counts.clone(),
    })
}

/// Runs one strategy independently on every market and averages the scores.
pub fn run_benchmark(
    markets: &[MarketInstance],
    kind: StrategyKind,
    strategy_cfg: &StrategyConfig,
    train_cfg: &TrainConfig,
    score_cfg: &ScoreConfig,
) -> Result<EvaluationReport> {
    if markets.is_empty() {
        return Err(Error::Parameter("benchmark needs at least one market".into()));
    }
    let mut per_market = Vec::with_capacity(markets.len());
    for (idx, market) in markets.iter().enumerate() {
        let view = market.public_view();
        let run = || -> Result<MarketScore> {
            let decision =
                strategies::run_strategy(kind, view, &view.acquirer_set, strategy_cfg)?;
            evaluate(market, &decision, train_cfg, score_cfg)
        };
        per_market.push(run().map_err(|e| Error::InMarket {
            index: idx + 1,
            source: Box::new(e),
        })?);
    }
    let average_score =
        per_market.iter().map(|m| m.score).sum::<f64>() / per_market.len() as f64;
    Ok(EvaluationReport {
        per_market,
        average_score,
    })
}
