//! Shows exactly what one provider reveals before any purchase: the shared
//! samples, the marginal quantile grid, the feature-label correlations, and
//! the pricing function. This is the complete pre-acquisition interface a
//! strategy works with.
//!
//!     cargo run --example summary_statistics

use agora::datapool::PoolConfig;
use agora::market::{build_market, MarketConfig, MarketParams};
use agora::money::Money;

fn main() {
    let pool_cfg = PoolConfig {
        dim: 8,
        num_categories: 5,
        seed: 7,
        ..PoolConfig::default()
    };
    let params = MarketParams {
        num_providers: 4,
        size_range: (500, 900),
        acquirer_size: 300,
        ..MarketParams::default()
    };
    let cfg = MarketConfig::sampled(&params, pool_cfg.num_categories, 11);
    let market = build_market(&pool_cfg, &cfg, 11).expect("market builds");
    let listing = &market.public_view().listings[0];

    println!(
        "provider {}: {} samples on sale for ${:.0}\n",
        listing.provider_id,
        listing.size,
        listing.pricing.total_price.dollars()
    );

    println!("shared samples ({}):", listing.shared_samples.len());
    for s in &listing.shared_samples {
        let head: Vec<String> = s.features.iter().take(4).map(|x| format!("{x:+.2}")).collect();
        println!("  label {}  features [{}, ...]", s.label, head.join(", "));
    }

    // The quantile grid has one row per feature plus a final row for the
    // label; print a condensed view of each row.
    println!("\nmarginal quantiles (min / 25% / 50% / 75% / max):");
    for (row, quantiles) in listing.stats.quantiles.iter().enumerate() {
        let name = if row < pool_cfg.dim {
            format!("feature {row}")
        } else {
            "label".to_string()
        };
        println!(
            "  {name:>9}: {:+.3} / {:+.3} / {:+.3} / {:+.3} / {:+.3}",
            quantiles[0], quantiles[25], quantiles[50], quantiles[75], quantiles[100]
        );
    }

    println!("\nfeature-label correlations:");
    for (j, c) in listing.stats.label_correlations.iter().enumerate() {
        let bar_len = (c.abs() * 40.0).round() as usize;
        let bar: String = std::iter::repeat_n('#', bar_len).collect();
        println!("  feature {j}: {c:+.3} {bar}");
    }

    println!("\npricing (linear):");
    for q in [0, 1, listing.size / 4, listing.size / 2, listing.size] {
        println!(
            "  {q:>5} samples -> ${:.3}",
            listing.pricing.price(q).unwrap().dollars()
        );
    }
    for budget in [0i64, 25, 50, 150] {
        println!(
            "  ${budget:>3} affords {} samples",
            listing.pricing.max_affordable(&Money::from_dollars(budget))
        );
    }
}
