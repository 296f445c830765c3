//! Command implementations behind the thin `agora` binary: `gen` writes a
//! reproducible bundle of market files plus a sealed manifest, `run`
//! executes one strategy against a bundle, and `report` aggregates score
//! files into the strategy-by-market table.
//!
//! Strategies only ever read the `public` section of a market file; the
//! private section is touched exclusively by the evaluation step, so the
//! information boundary holds at the file layer too.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::datapool::PoolConfig;
use crate::error::{Error, Result};
use crate::eval::{self, MarketScore, ScoreConfig};
use crate::manifest::{ResolvedDefaults, RunManifest};
use crate::market::{build_market, MarketConfig, MarketFile, MarketParams, DEFAULT_MARKET_COUNT};
use crate::model::TrainConfig;
use crate::money::Money;
use crate::rng::{mix_indexed, SALT_BENCH};
use crate::strategies::{run_strategy, PercentSplit, PurchaseDecision, StrategyConfig, StrategyKind};
use crate::FORMAT_VERSION;

/// Options for `gen`.
#[derive(Clone, Debug)]
pub struct GenOptions {
    pub seed: u64,
    pub out: PathBuf,
    /// Number of market instances to generate.
    pub count: usize,
    pub k: usize,
    pub dim: usize,
    pub categories: usize,
    pub separation: f64,
    pub noise: f64,
    /// Budget in dollars.
    pub budget: f64,
    /// Full-dataset price in dollars.
    pub total_price: f64,
    pub n_shared: usize,
    pub size_min: usize,
    pub size_max: usize,
    pub acquirer_size: usize,
    /// Strip private datasets from the written files.
    pub public_only: bool,
    /// Regenerate from an existing manifest instead of the flags above.
    pub from_manifest: Option<PathBuf>,
}

impl Default for GenOptions {
    fn default() -> Self {
        let params = MarketParams::default();
        let pool = PoolConfig::default();
        GenOptions {
            seed: 0,
            out: PathBuf::from("markets"),
            count: DEFAULT_MARKET_COUNT,
            k: params.num_providers,
            dim: pool.dim,
            categories: pool.num_categories,
            separation: pool.category_separation,
            noise: pool.feature_noise,
            budget: 150.0,
            total_price: 100.0,
            n_shared: params.n_shared,
            size_min: params.size_range.0,
            size_max: params.size_range.1,
            acquirer_size: params.acquirer_size,
            public_only: false,
            from_manifest: None,
        }
    }
}

/// Options for `run`.
#[derive(Clone, Debug)]
pub struct RunOptions {
    /// Directory of market files (or a single market file).
    pub markets: PathBuf,
    /// Output directory; defaults to the market directory.
    pub out: Option<PathBuf>,
    pub strategy: String,
    pub alpha: f64,
    pub rfe_k: usize,
    pub skip_factor: f64,
    /// Split the percent-strategy budget over all K providers instead of
    /// the remaining ones.
    pub percent_split_by_total: bool,
}

impl Default for RunOptions {
    fn default() -> Self {
        let d = ResolvedDefaults::default();
        RunOptions {
            markets: PathBuf::from("markets"),
            out: None,
            strategy: "all".into(),
            alpha: d.alpha,
            rfe_k: d.rfe_k,
            skip_factor: d.skip_factor,
            percent_split_by_total: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Markdown,
}

/// Options for `report`.
#[derive(Clone, Debug)]
pub struct ReportOptions {
    /// Directory containing `score_*.json` files.
    pub scores: PathBuf,
    /// Where to write the table; stdout only when absent.
    pub out: Option<PathBuf>,
    pub format: ReportFormat,
}

/// On-disk form of a strategy's decision on one market.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DecisionFile {
    pub format_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest_digest: Option<String>,
    pub strategy: String,
    pub market_index: usize,
    pub decision: PurchaseDecision,
}

/// On-disk form of one market score.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScoreFile {
    pub format_version: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub manifest_digest: Option<String>,
    pub strategy: String,
    pub market_index: usize,
    pub result: MarketScore,
}

fn write_bytes(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| Error::io(path.display().to_string(), e))
}

fn write_json_pretty<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value).expect("serializable value");
    bytes.push(b'\n');
    write_bytes(path, &bytes)
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))
}

fn parse_json<T: for<'de> Deserialize<'de>>(path: &Path, text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

/// Generates `count` market files plus `manifest.json` under `out`.
/// Returns the written market file paths, in market order.
pub fn cmd_gen(opts: &GenOptions) -> Result<Vec<PathBuf>> {
    let manifest = match &opts.from_manifest {
        Some(path) => {
            let manifest: RunManifest = parse_json(path, &read_to_string(path)?)?;
            if !manifest.verify() {
                return Err(Error::parse(
                    path.display().to_string(),
                    "manifest digest does not match its content",
                ));
            }
            manifest
        }
        None => {
            if opts.size_min < 1 || opts.size_min > opts.size_max {
                return Err(Error::Parameter(format!(
                    "invalid size range [{}, {}]",
                    opts.size_min, opts.size_max
                )));
            }
            let pool = PoolConfig {
                dim: opts.dim,
                num_categories: opts.categories,
                category_separation: opts.separation,
                feature_noise: opts.noise,
                seed: opts.seed,
            };
            pool.validate()?;
            let params = MarketParams {
                num_providers: opts.k,
                budget: Money::from_dollars_f64(opts.budget),
                total_price: Money::from_dollars_f64(opts.total_price),
                n_shared: opts.n_shared,
                size_range: (opts.size_min, opts.size_max),
                acquirer_size: opts.acquirer_size,
                ..MarketParams::default()
            };
            let market_seeds: Vec<u64> = (0..opts.count)
                .map(|i| mix_indexed(opts.seed, SALT_BENCH, i as u64))
                .collect();
            RunManifest::new(
                opts.seed,
                market_seeds,
                pool,
                params,
                ResolvedDefaults::default(),
                opts.public_only,
            )
        }
    };

    fs::create_dir_all(&opts.out).map_err(|e| Error::io(opts.out.display().to_string(), e))?;

    let mut written = Vec::with_capacity(manifest.market_seeds.len());
    for (i, &market_seed) in manifest.market_seeds.iter().enumerate() {
        let cfg = MarketConfig::sampled(&manifest.market, manifest.pool.num_categories, market_seed);
        let market = build_market(&manifest.pool, &cfg, market_seed)?;
        let file = MarketFile::new(
            &market,
            i + 1,
            Some(manifest.digest.clone()),
            manifest.public_only,
        );
        let path = opts.out.join(format!("market_{}.json", i + 1));
        let mut bytes = serde_json::to_vec(&file).expect("market serializes");
        bytes.push(b'\n');
        write_bytes(&path, &bytes)?;
        written.push(path);
    }

    write_json_pretty(&opts.out.join("manifest.json"), &manifest)?;
    Ok(written)
}

/// All market files under `markets` (or the single file it names), sorted
/// by market index.
fn list_market_files(markets: &Path) -> Result<Vec<PathBuf>> {
    if markets.is_file() {
        return Ok(vec![markets.to_path_buf()]);
    }
    let entries =
        fs::read_dir(markets).map_err(|e| Error::io(markets.display().to_string(), e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("market_") && n.ends_with(".json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::IncompleteData(format!(
            "no market_*.json files under {}",
            markets.display()
        )));
    }
    Ok(files)
}

fn sanitize_strategy(strategy: &str) -> String {
    strategy.replace(':', "-")
}

/// Runs one strategy over every market file: writes a decision file per
/// market, and a score file when the market file carries private data.
/// Returns the per-market scores (empty for public-only bundles).
pub fn cmd_run(opts: &RunOptions) -> Result<Vec<(usize, MarketScore)>> {
    let kind: StrategyKind = opts.strategy.parse()?;
    let strategy_cfg = StrategyConfig {
        train: TrainConfig::default(),
        rfe_k: opts.rfe_k,
        skip_factor: opts.skip_factor,
        percent_split: if opts.percent_split_by_total {
            PercentSplit::ByTotal
        } else {
            PercentSplit::ByRemaining
        },
    };
    let score_cfg = ScoreConfig {
        alpha: opts.alpha,
        ..ScoreConfig::default()
    };
    score_cfg.validate()?;
    let train_cfg = TrainConfig::default();

    // Resolve the inputs before touching the filesystem for output.
    let market_paths = list_market_files(&opts.markets)?;
    let out_dir = opts.out.clone().unwrap_or_else(|| {
        if opts.markets.is_file() {
            opts.markets.parent().unwrap_or(Path::new(".")).to_path_buf()
        } else {
            opts.markets.clone()
        }
    });
    fs::create_dir_all(&out_dir).map_err(|e| Error::io(out_dir.display().to_string(), e))?;

    let tag = sanitize_strategy(&opts.strategy);
    let mut scores = Vec::new();
    let mut digest = None;
    for path in market_paths {
        let file: MarketFile = parse_json(&path, &read_to_string(&path)?)?;
        let index = file.index;
        digest.clone_from(&file.manifest_digest);

        // The strategy sees only the public section.
        let view = &file.public;
        let decision = run_strategy(kind, view, &view.acquirer_set, &strategy_cfg)?;
        write_json_pretty(
            &out_dir.join(format!("decision_{tag}_m{index}.json")),
            &DecisionFile {
                format_version: FORMAT_VERSION.to_string(),
                manifest_digest: file.manifest_digest.clone(),
                strategy: kind.to_string(),
                market_index: index,
                decision: decision.clone(),
            },
        )?;

        if file.has_private() {
            let market = file.into_instance()?;
            let result = eval::evaluate(&market, &decision, &train_cfg, &score_cfg)?;
            write_json_pretty(
                &out_dir.join(format!("score_{tag}_m{index}.json")),
                &ScoreFile {
                    format_version: FORMAT_VERSION.to_string(),
                    manifest_digest: digest.clone(),
                    strategy: kind.to_string(),
                    market_index: index,
                    result: result.clone(),
                },
            )?;
            scores.push((index, result));
        } else {
            log::info!(
                "{}: public-only market, decision written without a score",
                path.display()
            );
        }
    }

    // Record the run parameters next to the outputs when the bundle has a
    // generation manifest.
    let manifest_path = if opts.markets.is_file() {
        opts.markets
            .parent()
            .unwrap_or(Path::new("."))
            .join("manifest.json")
    } else {
        opts.markets.join("manifest.json")
    };
    if manifest_path.is_file() {
        let manifest: RunManifest = parse_json(&manifest_path, &read_to_string(&manifest_path)?)?;
        write_json_pretty(
            &out_dir.join(format!("run_{tag}.json")),
            &manifest.with_strategy(&kind.to_string()),
        )?;
    }

    Ok(scores)
}

/// Aggregates `score_*.json` files into the strategy-by-market table.
/// Returns the rendered table; also writes it when `out` is set.
pub fn cmd_report(opts: &ReportOptions) -> Result<String> {
    let entries =
        fs::read_dir(&opts.scores).map_err(|e| Error::io(opts.scores.display().to_string(), e))?;
    let mut files: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| n.starts_with("score_") && n.ends_with(".json"))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(Error::IncompleteData(format!(
            "no score_*.json files under {}",
            opts.scores.display()
        )));
    }

    let mut records = Vec::with_capacity(files.len());
    for path in &files {
        let file: ScoreFile = parse_json(path, &read_to_string(path)?)?;
        let kind: StrategyKind = file.strategy.parse().map_err(|e| {
            Error::parse(path.display().to_string(), format!("{e}"))
        })?;
        records.push((kind, file.market_index, file.result.score));
    }

    let table = crate::report::ReportTable::assemble(&records)?;
    let rendered = match opts.format {
        ReportFormat::Csv => table.to_csv(),
        ReportFormat::Markdown => table.to_markdown(),
    };
    if let Some(out) = &opts.out {
        write_bytes(out, rendered.as_bytes())?;
    }
    Ok(rendered)
}
