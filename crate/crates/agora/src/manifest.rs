//! Run manifests: a self-describing record of every parameter that went
//! into a generated benchmark, sealed with a SHA-256 digest. Replaying a
//! manifest reproduces the same market files byte for byte, and every
//! output file embeds the digest so results can be traced to their inputs.

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::datapool::PoolConfig;
use crate::market::MarketParams;
use crate::rng::GENERATOR_ID;
use crate::FORMAT_VERSION;

/// Strategy-side defaults resolved at generation time.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ResolvedDefaults {
    pub alpha: f64,
    pub rfe_k: usize,
    pub skip_factor: f64,
}

impl Default for ResolvedDefaults {
    fn default() -> Self {
        ResolvedDefaults {
            alpha: 0.98,
            rfe_k: 5,
            skip_factor: 1.5,
        }
    }
}

/// Everything needed to reproduce a benchmark run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunManifest {
    pub format_version: String,
    pub generator: String,
    /// Seed the per-market seeds are derived from.
    pub base_seed: u64,
    /// Derived seed of each market, in order.
    pub market_seeds: Vec<u64>,
    pub pool: PoolConfig,
    pub market: MarketParams,
    pub defaults: ResolvedDefaults,
    /// Whether the bundle was written without its private sections.
    #[serde(default)]
    pub public_only: bool,
    /// Strategy string, present on manifests written by a strategy run.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub strategy: Option<String>,
    /// SHA-256 over the manifest with this field blank.
    pub digest: String,
}

impl RunManifest {
    pub fn new(
        base_seed: u64,
        market_seeds: Vec<u64>,
        pool: PoolConfig,
        market: MarketParams,
        defaults: ResolvedDefaults,
        public_only: bool,
    ) -> Self {
        let mut manifest = RunManifest {
            format_version: FORMAT_VERSION.to_string(),
            generator: GENERATOR_ID.to_string(),
            base_seed,
            market_seeds,
            pool,
            market,
            defaults,
            public_only,
            strategy: None,
            digest: String::new(),
        };
        manifest.digest = manifest.compute_digest();
        manifest
    }

    /// Digest over the canonical JSON form with the digest field blank.
    pub fn compute_digest(&self) -> String {
        let mut blanked = self.clone();
        blanked.digest = String::new();
        let bytes = serde_json::to_vec(&blanked).expect("manifest serializes");
        hex::encode(Sha256::digest(&bytes))
    }

    /// True when the stored digest matches the content.
    pub fn verify(&self) -> bool {
        self.digest == self.compute_digest()
    }

    /// Copy of this manifest annotated with a strategy and resealed.
    pub fn with_strategy(&self, strategy: &str) -> RunManifest {
        let mut m = self.clone();
        m.strategy = Some(strategy.to_string());
        m.digest = m.compute_digest();
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> RunManifest {
        RunManifest::new(
            42,
            vec![1, 2, 3],
            PoolConfig::default(),
            MarketParams::default(),
            ResolvedDefaults::default(),
            false,
        )
    }

    #[test]
    fn digest_is_stable_and_verifies() {
        let a = manifest();
        let b = manifest();
        assert_eq!(a.digest, b.digest);
        assert!(a.verify());
    }

    #[test]
    fn digest_changes_with_content() {
        let a = manifest();
        let mut b = manifest();
        b.base_seed = 43;
        assert_ne!(a.digest, b.compute_digest());
        assert!(!b.verify());
    }

    #[test]
    fn strategy_annotation_reseals() {
        let a = manifest();
        let b = a.with_strategy("all");
        assert!(b.verify());
        assert_ne!(a.digest, b.digest);
        assert_eq!(b.strategy.as_deref(), Some("all"));
    }

    #[test]
    fn manifest_round_trips_through_json() {
        let a = manifest();
        let text = serde_json::to_string_pretty(&a).unwrap();
        let back: RunManifest = serde_json::from_str(&text).unwrap();
        assert!(back.verify());
        assert_eq!(back.digest, a.digest);
    }
}
