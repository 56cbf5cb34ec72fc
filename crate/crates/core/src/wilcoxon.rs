//! Wilcoxon signed-rank test for paired integer samples.

use serde::Serialize;

use crate::error::{Error, Result};

/// Largest number of non-zero differences for which the null distribution is
/// computed exactly; above it the tie-corrected normal approximation is used.
pub const EXACT_LIMIT: usize = 25;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ZeroMethod {
    /// Zero differences are discarded before ranking.
    #[default]
    Wilcox,
    /// Zero differences take part in ranking and are discarded afterwards.
    Pratt,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignedRankTest {
    /// Signed-rank sum W = W+ - W-.
    pub statistic: f64,
    pub w_plus: f64,
    pub w_minus: f64,
    /// Two-sided p-value.
    pub p_value: f64,
    pub n_effective: usize,
    pub exact: bool,
}

pub fn wilcoxon_signed_rank(x: &[i64], y: &[i64]) -> Result<SignedRankTest> {
    wilcoxon_signed_rank_with(x, y, ZeroMethod::default())
}

pub fn wilcoxon_signed_rank_with(
    x: &[i64],
    y: &[i64],
    zeros: ZeroMethod,
) -> Result<SignedRankTest> {
    if x.len() != y.len() {
        return Err(Error::InvalidArgument(format!(
            "paired samples differ in length ({} vs {})",
            x.len(),
            y.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::InsufficientData("empty paired samples".into()));
    }
    let mut diffs: Vec<i64> = x.iter().zip(y).map(|(a, b)| a - b).collect();
    if zeros == ZeroMethod::Wilcox {
        diffs.retain(|&d| d != 0);
    }
    let doubled = doubled_ranks(&diffs);

    // (sign, doubled rank) for the non-zero differences
    let signed: Vec<(bool, u64)> = diffs
        .iter()
        .zip(&doubled)
        .filter(|(d, _)| **d != 0)
        .map(|(d, r)| (*d > 0, *r))
        .collect();
    let n_effective = signed.len();
    if n_effective == 0 {
        return Ok(SignedRankTest {
            statistic: 0.0,
            w_plus: 0.0,
            w_minus: 0.0,
            p_value: 1.0,
            n_effective: 0,
            exact: true,
        });
    }

    let plus2: u64 = signed.iter().filter(|(pos, _)| *pos).map(|(_, r)| r).sum();
    let total2: u64 = signed.iter().map(|(_, r)| r).sum();
    let minus2 = total2 - plus2;
    let w_plus = plus2 as f64 / 2.0;
    let w_minus = minus2 as f64 / 2.0;

    let (p_value, exact) = if n_effective <= EXACT_LIMIT {
        let ranks: Vec<u64> = signed.iter().map(|(_, r)| *r).collect();
        (exact_two_sided(&ranks, plus2), true)
    } else {
        let ranks: Vec<f64> = signed.iter().map(|(_, r)| *r as f64 / 2.0).collect();
        (normal_two_sided(&ranks, w_plus), false)
    };

    Ok(SignedRankTest {
        statistic: w_plus - w_minus,
        w_plus,
        w_minus,
        p_value,
        n_effective,
        exact,
    })
}

/// Twice the average (mid-)rank of each |d|, so tied ranks stay integral.
fn doubled_ranks(diffs: &[i64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..diffs.len()).collect();
    order.sort_by_key(|&i| diffs[i].unsigned_abs());
    let mut ranks = vec![0u64; diffs.len()];
    let mut start = 0;
    while start < order.len() {
        let key = diffs[order[start]].unsigned_abs();
        let mut end = start;
        while end < order.len() && diffs[order[end]].unsigned_abs() == key {
            end += 1;
        }
        // ranks start+1..=end averaged, doubled
        let doubled = (start + 1 + end) as u64;
        for &i in &order[start..end] {
            ranks[i] = doubled;
        }
        start = end;
    }
    ranks
}

/// P(|2W+ - T| >= |2w+ - T|) under independent fair signs, from the exact
/// distribution of subset sums of the doubled ranks.
fn exact_two_sided(doubled: &[u64], observed_plus2: u64) -> f64 {
    let total: u64 = doubled.iter().sum();
    let mut ways = vec![0f64; total as usize + 1];
    ways[0] = 1.0;
    let mut reach = 0usize;
    for &r in doubled {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if ways[s] != 0.0 {
                ways[s + r] += ways[s];
            }
        }
        reach += r;
    }
    let observed = (2 * observed_plus2 as i64 - total as i64).abs();
    let extreme: f64 = ways
        .iter()
        .enumerate()
        .filter(|(s, _)| (2 * *s as i64 - total as i64).abs() >= observed)
        .map(|(_, w)| w)
        .sum();
    (extreme / 2f64.powi(doubled.len() as i32)).min(1.0)
}

fn normal_two_sided(ranks: &[f64], w_plus: f64) -> f64 {
    let mean = ranks.iter().sum::<f64>() / 2.0;
    let var = ranks.iter().map(|r| r * r).sum::<f64>() / 4.0;
    if var <= 0.0 {
        return 1.0;
    }
    let z = (w_plus - mean) / var.sqrt();
    libm::erfc(z.abs() / std::f64::consts::SQRT_2).min(1.0)
}
