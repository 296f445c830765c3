//! Strategy-by-market score tables in CSV and Markdown.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::strategies::StrategyKind;

/// One aggregated table: a row per strategy, a column per market, plus the
/// cross-market average.
#[derive(Clone, Debug)]
pub struct ReportTable {
    pub num_markets: usize,
    /// Rows in canonical strategy order: (strategy, per-market scores, average).
    pub rows: Vec<(StrategyKind, Vec<f64>, f64)>,
}

impl ReportTable {
    /// Assembles a table from (strategy, market index, score) records.
    /// Market indices are 1-based. Every strategy must cover every market
    /// index seen anywhere, otherwise the table is incomplete.
    pub fn assemble(records: &[(StrategyKind, usize, f64)]) -> Result<ReportTable> {
        if records.is_empty() {
            return Err(Error::IncompleteData("no score records to report".into()));
        }
        let num_markets = records.iter().map(|r| r.1).max().unwrap_or(0);
        let mut by_strategy: BTreeMap<(u8, usize), (StrategyKind, BTreeMap<usize, f64>)> =
            BTreeMap::new();
        for &(kind, market, score) in records {
            if market == 0 {
                return Err(Error::IncompleteData(
                    "market indices are 1-based; got 0".into(),
                ));
            }
            by_strategy
                .entry(kind.sort_key())
                .or_insert_with(|| (kind, BTreeMap::new()))
                .1
                .insert(market, score);
        }

        let mut rows = Vec::with_capacity(by_strategy.len());
        for (_, (kind, scores)) in by_strategy {
            let mut per_market = Vec::with_capacity(num_markets);
            for m in 1..=num_markets {
                match scores.get(&m) {
                    Some(&s) => per_market.push(s),
                    None => {
                        return Err(Error::IncompleteData(format!(
                            "strategy {kind} has no score for market {m}"
                        )))
                    }
                }
            }
            let average = per_market.iter().sum::<f64>() / num_markets as f64;
            rows.push((kind, per_market, average));
        }
        Ok(ReportTable { num_markets, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("strategy");
        for m in 1..=self.num_markets {
            out.push_str(&format!(",market_{m}"));
        }
        out.push_str(",average\n");
        for (kind, scores, average) in &self.rows {
            out.push_str(&kind.to_string());
            for s in scores {
                out.push_str(&format!(",{s:.4}"));
            }
            out.push_str(&format!(",{average:.4}\n"));
        }
        out
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| strategy |");
        for m in 1..=self.num_markets {
            out.push_str(&format!(" market {m} |"));
        }
        out.push_str(" average |\n|---|");
        for _ in 0..self.num_markets {
            out.push_str("---|");
        }
        out.push_str("---|\n");
        for (kind, scores, average) in &self.rows {
            out.push_str(&format!("| {kind} |"));
            for s in scores {
                out.push_str(&format!(" {s:.4} |"));
            }
            out.push_str(&format!(" {average:.4} |\n"));
        }
        out
    }
}
