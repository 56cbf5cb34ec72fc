//! Rank-frequency (Zipf) and vocabulary-growth (Heaps) fits by ordinary least
//! squares on log10-log10 coordinates.

use std::collections::HashMap;

use serde::Serialize;

use crate::corpus::{yearly_sizes, Corpus};
use crate::error::{Error, Result};

pub const DEFAULT_MIN_COUNT: u64 = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "year")]
pub enum RankScope {
    AllYears,
    Year(i32),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankRow {
    pub rank: usize,
    pub id: String,
    pub count: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RankTable {
    pub scope: RankScope,
    pub rows: Vec<RankRow>,
}

impl RankTable {
    /// Ranks `(id, count)` pairs by descending count, then ascending id.
    pub fn from_counts(scope: RankScope, counts: impl IntoIterator<Item = (String, u64)>) -> Self {
        let mut pairs: Vec<(String, u64)> = counts.into_iter().filter(|(_, c)| *c > 0).collect();
        pairs.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
        RankTable {
            scope,
            rows: pairs
                .into_iter()
                .enumerate()
                .map(|(i, (id, count))| RankRow {
                    rank: i + 1,
                    id,
                    count,
                })
                .collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn rank_of(&self, id: &str) -> Option<usize> {
        self.rows.iter().find(|r| r.id == id).map(|r| r.rank)
    }
}

/// C(r): the number of publications carrying each descriptor, ranked.
pub fn rank_table(corpus: &Corpus, scope: RankScope) -> RankTable {
    let mut counts: HashMap<&str, u64> = HashMap::new();
    let pubs: Box<dyn Iterator<Item = _>> = match scope {
        RankScope::AllYears => Box::new(corpus.publications().iter()),
        RankScope::Year(y) => Box::new(corpus.publications_in(y)),
    };
    for p in pubs {
        for id in &p.mesh_ids {
            *counts.entry(id.as_str()).or_default() += 1;
        }
    }
    RankTable::from_counts(scope, counts.into_iter().map(|(k, v)| (k.to_string(), v)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingFit {
    /// ξ for Zipf, β for Heaps.
    pub exponent: f64,
    /// C(1) for Zipf, b for Heaps.
    pub prefactor: f64,
    pub stderr_exponent: f64,
    pub r_squared: f64,
    /// Smallest and largest abscissa used (rank or M).
    pub fit_range: [f64; 2],
    pub n_points: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub stderr_slope: f64,
    pub r_squared: f64,
}

/// Least-squares line y = intercept + slope * x.
pub fn ols(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len();
    if n != ys.len() {
        return Err(Error::InvalidArgument("x and y lengths differ".into()));
    }
    if n < 3 {
        return Err(Error::InsufficientData(format!(
            "a fit needs at least 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientData("all abscissae are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr_slope = (sse / (nf - 2.0) / sxx).sqrt();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - sse / syy };
    Ok(LineFit {
        slope,
        intercept,
        stderr_slope,
        r_squared,
    })
}

/// Fits C(r) = C(1) r^-ξ over the rows with count >= `min_count`.
pub fn zipf_fit(table: &RankTable, min_count: u64) -> Result<ScalingFit> {
    let used: Vec<(f64, f64)> = table
        .rows
        .iter()
        .filter(|r| r.count >= min_count)
        .map(|r| (r.rank as f64, r.count as f64))
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} ranks with count >= {min_count}; need 3",
            used.len()
        )));
    }
    zipf_fit_points(&used)
}

/// Zipf fit over raw (rank, count) points.
pub fn zipf_fit_points(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let mut fit = log_log_fit(points)?;
    fit.exponent = -fit.exponent;
    Ok(fit)
}

fn log_log_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    let used: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .collect();
    if used.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "{} usable points; need 3",
            used.len()
        )));
    }
    let xs: Vec<f64> = used.iter().map(|p| p.0.log10()).collect();
    let ys: Vec<f64> = used.iter().map(|p| p.1.log10()).collect();
    let line = ols(&xs, &ys)?;
    let lo = used.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = used.iter().map(|p| p.0).fold(f64::NEG_INFINITY, f64::max);
    Ok(ScalingFit {
        exponent: line.slope,
        prefactor: 10f64.powf(line.intercept),
        stderr_exponent: line.stderr_slope,
        r_squared: line.r_squared,
        fit_range: [lo, hi],
        n_points: used.len(),
    })
}

/// Fits V = b M^β to (M, V) points; points with M or V of zero are ignored.
pub fn heaps_fit(points: &[(f64, f64)]) -> Result<ScalingFit> {
    log_log_fit(points)
}

/// Yearly (M_q(y), V_q(y)) pairs of a corpus.
pub fn heaps_points(corpus: &Corpus) -> Vec<(f64, f64)> {
    yearly_sizes(corpus)
        .into_iter()
        .map(|r| (r.assignments as f64, r.distinct as f64))
        .collect()
}

/// dM/dV = b^(-1/β) V^(1/β - 1) for a Heaps fit.
pub fn marginal_returns(fit: &ScalingFit, vocabulary: f64) -> Result<f64> {
    let beta = fit.exponent;
    if beta <= 0.0 || !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "exponent must be positive, got {beta}"
        )));
    }
    if vocabulary <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "V must be positive, got {vocabulary}"
        )));
    }
    Ok(fit.prefactor.powf(-1.0 / beta) * vocabulary.powf(1.0 / beta - 1.0))
}
