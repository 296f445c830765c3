//! Trains the logistic evaluation model on the acquirer's own data, then
//! runs recursive feature elimination and compares the surviving features
//! with the published feature-label correlations.
//!
//!     cargo run --example train_and_select

use agora::datapool::{DataPool, PoolConfig, ProviderSpec};
use agora::market::compute_feature_label_correlations;
use agora::model::{accuracy, loss_and_grad, rfe, train, TrainConfig};

fn main() {
    let pool_cfg = PoolConfig {
        dim: 12,
        num_categories: 6,
        seed: 3,
        ..PoolConfig::default()
    };
    let pool = DataPool::generate(&pool_cfg).expect("pool generates");
    let train_set = pool
        .sample_acquirer_set(&ProviderSpec::uniform(6, 1000, 21))
        .unwrap();
    let holdout = pool
        .sample_acquirer_set(&ProviderSpec::uniform(6, 1000, 22))
        .unwrap();

    let cfg = TrainConfig::default();
    let model = train(&train_set, &cfg).expect("training succeeds");
    let (loss, grad) = loss_and_grad(&model, &train_set, cfg.l2_lambda).unwrap();
    let grad_inf = grad.iter().fold(0.0f64, |a, g| a.max(g.abs()));

    println!("trained on {} points, dim {}", train_set.len(), pool_cfg.dim);
    println!("  final loss {loss:.4}, gradient max-norm {grad_inf:.2e}");
    println!(
        "  accuracy: train {:.3}, holdout {:.3}",
        accuracy(&model, &train_set).unwrap(),
        accuracy(&model, &holdout).unwrap()
    );

    let correlations = compute_feature_label_correlations(&train_set).unwrap();
    println!("\ncoefficients (standardized space) vs published-style correlations:");
    for (j, (w, c)) in model.weights.iter().zip(&correlations).enumerate() {
        println!("  feature {j:>2}: coef {w:+.3}  corr {c:+.3}");
    }

    let kept = rfe(&train_set, 5, &cfg).expect("rfe succeeds");
    println!("\nrfe keeps 5 of {} features: {kept:?}", pool_cfg.dim);
    let reduced = agora::model::train_on_features(&train_set, &kept, &cfg).unwrap();
    println!(
        "reduced model holdout accuracy: {:.3}",
        accuracy(&reduced, &holdout).unwrap()
    );
}
