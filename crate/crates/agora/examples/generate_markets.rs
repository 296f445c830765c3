//! Builds a five-market benchmark bundle and prints what each market looks
//! like from both sides of the counter: the generator's ground truth
//! (category mixtures, label quality) and the public listing the acquirer
//! actually gets to see.
//!
//!     cargo run --example generate_markets

use agora::datapool::PoolConfig;
use agora::market::{build_market, MarketConfig, MarketParams};

fn main() {
    let pool_cfg = PoolConfig {
        dim: 16,
        num_categories: 8,
        seed: 42,
        ..PoolConfig::default()
    };
    let params = MarketParams {
        size_range: (300, 800),
        acquirer_size: 400,
        ..MarketParams::default()
    };

    println!(
        "pool: dim {}, {} categories, seed {}",
        pool_cfg.dim, pool_cfg.num_categories, pool_cfg.seed
    );
    println!(
        "markets: K={}, budget ${:.0}, every dataset priced ${:.0}, {} shared samples\n",
        params.num_providers,
        params.budget.dollars(),
        params.total_price.dollars(),
        params.n_shared
    );

    for market_index in 1..=5u64 {
        let seed = 1000 + market_index;
        let cfg = MarketConfig::sampled(&params, pool_cfg.num_categories, seed);
        let market = build_market(&pool_cfg, &cfg, seed).expect("market builds");
        let view = market.public_view();

        println!("market {market_index} (seed {seed})");
        println!(
            "  {:>4} {:>6} {:>10} {:>7} {:>12} {:>12}",
            "id", "size", "$/sample", "flip", "top category", "max |corr|"
        );
        for (listing, spec) in view.listings.iter().zip(&cfg.provider_specs) {
            let top_cat = spec
                .category_weights
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
                .map(|(c, w)| format!("{c} ({:.0}%)", w * 100.0))
                .unwrap();
            let max_corr = listing
                .stats
                .label_correlations
                .iter()
                .fold(0.0f64, |a, c| a.max(c.abs()));
            println!(
                "  {:>4} {:>6} {:>10.4} {:>7.2} {:>12} {:>12.3}",
                listing.provider_id,
                listing.size,
                listing.pricing.unit_cost().dollars(),
                spec.label_flip_rate,
                top_cat,
                max_corr,
            );
        }
        let label_mean = view
            .acquirer_set
            .labels_f64()
            .iter()
            .sum::<f64>()
            / view.acquirer_set.len() as f64;
        println!(
            "  acquirer set: {} points, {:.0}% positive labels\n",
            view.acquirer_set.len(),
            label_mean * 100.0
        );
    }

    println!("note: sizes, mixtures and flip rates above are generator truth;");
    println!("strategies only ever observe the listing columns (size, price, stats).");
}
