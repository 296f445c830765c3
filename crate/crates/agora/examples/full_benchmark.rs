//! The complete benchmark: five market instances, a roster of strategies,
//! and the final strategy-by-market score table with the five-market
//! average that decides the ranking.
//!
//!     cargo run --release --example full_benchmark

use agora::datapool::PoolConfig;
use agora::eval::{run_benchmark, ScoreConfig};
use agora::market::{build_benchmark, MarketParams, DEFAULT_MARKET_COUNT};
use agora::model::TrainConfig;
use agora::report::ReportTable;
use agora::strategies::{LpNorm, StrategyConfig, StrategyKind};

fn main() {
    let pool_cfg = PoolConfig {
        dim: 16,
        num_categories: 8,
        seed: 1,
        ..PoolConfig::default()
    };
    let params = MarketParams {
        size_range: (300, 800),
        acquirer_size: 800,
        noisy_flip_range: (0.45, 0.5),
        ..MarketParams::default()
    };
    let markets =
        build_benchmark(&pool_cfg, &params, 1, DEFAULT_MARKET_COUNT).expect("benchmark builds");
    println!(
        "{} markets, K={} providers each, budget ${:.0}, {} of them selling noisy labels\n",
        markets.len(),
        params.num_providers,
        params.budget.dollars(),
        params.noisy_provider_count
    );

    let kinds = [
        StrategyKind::All,
        StrategyKind::Percent(20),
        StrategyKind::Percent(40),
        StrategyKind::Percent(60),
        StrategyKind::Single(0),
        StrategyKind::Single(7),
        StrategyKind::Single(14),
        StrategyKind::Rfe,
        StrategyKind::CoFr,
        StrategyKind::Lp(LpNorm::L1),
        StrategyKind::Lp(LpNorm::L2),
        StrategyKind::Lp(LpNorm::LInf),
    ];

    let strategy_cfg = StrategyConfig::default();
    let train_cfg = TrainConfig::default();
    let score_cfg = ScoreConfig::default();

    let mut records = Vec::new();
    for kind in kinds {
        let report = run_benchmark(&markets, kind, &strategy_cfg, &train_cfg, &score_cfg)
            .expect("benchmark runs");
        for (i, market_score) in report.per_market.iter().enumerate() {
            records.push((kind, i + 1, market_score.score));
        }
        eprintln!("  ran {kind}: average {:.3}", report.average_score);
    }

    let table = ReportTable::assemble(&records).expect("table assembles");
    println!("\n{}", table.to_markdown());

    let best = table
        .rows
        .iter()
        .max_by(|a, b| a.2.partial_cmp(&b.2).unwrap())
        .unwrap();
    println!("best average: {} at {:.4}", best.0, best.2);
}
