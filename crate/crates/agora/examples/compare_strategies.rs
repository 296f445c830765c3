//! Runs every built-in strategy family on one market and prints the
//! decision each one makes along with its evaluated outcome.
//!
//!     cargo run --release --example compare_strategies

use agora::datapool::PoolConfig;
use agora::eval::{evaluate, ScoreConfig};
use agora::market::{build_market, MarketConfig, MarketParams};
use agora::model::TrainConfig;
use agora::strategies::{run_strategy, LpNorm, StrategyConfig, StrategyKind};

fn main() {
    let pool_cfg = PoolConfig {
        dim: 16,
        num_categories: 8,
        seed: 5,
        ..PoolConfig::default()
    };
    let params = MarketParams {
        size_range: (300, 800),
        acquirer_size: 600,
        ..MarketParams::default()
    };
    let cfg = MarketConfig::sampled(&params, pool_cfg.num_categories, 99);
    let market = build_market(&pool_cfg, &cfg, 99).expect("market builds");
    let view = market.public_view();

    let noisy: Vec<usize> = cfg
        .provider_specs
        .iter()
        .enumerate()
        .filter(|(_, s)| s.label_flip_rate >= 0.4)
        .map(|(i, _)| i)
        .collect();
    println!(
        "one market, K={}, budget ${:.0}; providers with heavy label noise: {noisy:?}\n",
        view.num_providers(),
        view.budget.dollars()
    );

    let kinds = [
        StrategyKind::All,
        StrategyKind::Percent(20),
        StrategyKind::Percent(40),
        StrategyKind::Single(0),
        StrategyKind::Single(10),
        StrategyKind::Rfe,
        StrategyKind::CoFr,
        StrategyKind::Lp(LpNorm::L1),
        StrategyKind::Lp(LpNorm::L2),
        StrategyKind::Lp(LpNorm::LInf),
    ];

    let strategy_cfg = StrategyConfig::default();
    let train_cfg = TrainConfig::default();
    let score_cfg = ScoreConfig::default();

    println!(
        "{:<12} {:>8} {:>9} {:>10} {:>9} {:>8}",
        "strategy", "samples", "cost $", "providers", "accuracy", "score"
    );
    for kind in kinds {
        let decision = run_strategy(kind, view, &view.acquirer_set, &strategy_cfg)
            .expect("strategy runs");
        let outcome = evaluate(&market, &decision, &train_cfg, &score_cfg).expect("evaluates");
        let bought: usize = decision.counts.iter().sum();
        let providers = decision.counts.iter().filter(|&&c| c > 0).count();
        println!(
            "{:<12} {:>8} {:>9.3} {:>10} {:>9.3} {:>8.3}",
            kind.to_string(),
            bought,
            outcome.cost_dollars,
            providers,
            outcome.accuracy,
            outcome.score
        );
    }
}
