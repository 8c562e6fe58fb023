use std::collections::BTreeMap;

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::trace::SimulationTrace;
use crate::error::{Error, Result};

/// How many of `owner`'s queries each proxy forwarded.
pub fn proxy_counts(trace: &SimulationTrace, owner: usize) -> Result<BTreeMap<usize, u64>> {
    let owners = trace.owners();
    let mut counts = BTreeMap::new();
    for rec in &trace.server_log {
        if owners.get(&rec.query_id) == Some(&owner) {
            *counts.entry(rec.proxy).or_insert(0) += 1;
        }
    }
    if counts.is_empty() {
        return Err(Error::NoData(owner));
    }
    Ok(counts)
}

/// Empirical distribution of proxies over `owner`'s forwarded queries.
pub fn proxy_distribution(trace: &SimulationTrace, owner: usize) -> Result<BTreeMap<usize, f64>> {
    let counts = proxy_counts(trace, owner)?;
    let total: u64 = counts.values().sum();
    Ok(counts.into_iter().map(|(p, c)| (p, c as f64 / total as f64)).collect())
}

/// One `(owner, proxy, count)` row per observed pair, sorted.
pub fn proxy_summary(trace: &SimulationTrace) -> Vec<(usize, usize, u64)> {
    let owners = trace.owners();
    let mut counts: BTreeMap<(usize, usize), u64> = BTreeMap::new();
    for rec in &trace.server_log {
        if let Some(&owner) = owners.get(&rec.query_id) {
            *counts.entry((owner, rec.proxy)).or_insert(0) += 1;
        }
    }
    counts.into_iter().map(|((o, p), c)| (o, p, c)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GoodnessOfFit {
    pub statistic: f64,
    pub degrees_of_freedom: usize,
    pub p_value: f64,
}

/// Pearson chi-square test of `counts` against the uniform distribution over
/// the same categories. Zero counts must be included.
pub fn uniform_goodness_of_fit(counts: &[u64]) -> Result<GoodnessOfFit> {
    let total: u64 = counts.iter().sum();
    if counts.len() < 2 || total == 0 {
        return Err(Error::Precondition(
            "goodness of fit needs at least two categories and one observation".into(),
        ));
    }
    let expected = total as f64 / counts.len() as f64;
    let statistic = counts
        .iter()
        .map(|&c| {
            let d = c as f64 - expected;
            d * d / expected
        })
        .sum();
    let degrees_of_freedom = counts.len() - 1;
    let dist = ChiSquared::new(degrees_of_freedom as f64).expect("positive degrees of freedom");
    Ok(GoodnessOfFit { statistic, degrees_of_freedom, p_value: dist.sf(statistic) })
}
