//! Projection of publications onto per-branch descriptor counts and the three
//! count maps (binary, median threshold, full count).

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::corpus::{Corpus, Publication};
use crate::error::{Error, Result};
use crate::mesh::Vocabulary;

/// The three helices: Diseases, Drugs and Chemicals, Techniques and Equipment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Branch {
    C,
    D,
    E,
}

impl Branch {
    pub const ALL: [Branch; 3] = [Branch::C, Branch::D, Branch::E];

    pub fn letter(self) -> char {
        match self {
            Branch::C => 'C',
            Branch::D => 'D',
            Branch::E => 'E',
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_letter(c: char) -> Option<Branch> {
        match c.to_ascii_uppercase() {
            'C' => Some(Branch::C),
            'D' => Some(Branch::D),
            'E' => Some(Branch::E),
            _ => None,
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Branch {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut chars = s.trim().chars();
        match (chars.next().and_then(Branch::from_letter), chars.next()) {
            (Some(b), None) => Ok(b),
            _ => Err(Error::InvalidArgument(format!("unknown branch {s:?}"))),
        }
    }
}

/// How a descriptor filed under several branches contributes to the counts.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountingRule {
    /// Increment every C/D/E branch the descriptor belongs to.
    #[default]
    Membership,
    /// Increment only the descriptor's primary branch.
    PrimaryOnly,
}

/// (n_C, n_D, n_E) for one publication.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize)]
pub struct BranchTriple(pub [u32; 3]);

impl BranchTriple {
    pub fn new(c: u32, d: u32, e: u32) -> Self {
        BranchTriple([c, d, e])
    }

    pub fn get(&self, branch: Branch) -> u32 {
        self.0[branch.index()]
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }
}

pub fn branch_triple(
    publication: &Publication,
    vocabulary: &Vocabulary,
    rule: CountingRule,
) -> Result<BranchTriple> {
    let mut counts = [0u32; 3];
    for id in &publication.mesh_ids {
        let d = vocabulary
            .get(id)
            .ok_or_else(|| Error::UnresolvedDescriptor(id.clone()))?;
        match rule {
            CountingRule::Membership => {
                for b in Branch::ALL {
                    if d.in_branch(b.letter()) {
                        counts[b.index()] += 1;
                    }
                }
            }
            CountingRule::PrimaryOnly => {
                if let Some(b) = Branch::from_letter(d.primary_branch()) {
                    counts[b.index()] += 1;
                }
            }
        }
    }
    Ok(BranchTriple(counts))
}

/// Triples for every publication of `corpus`, in corpus order.
pub fn corpus_triples(corpus: &Corpus, rule: CountingRule) -> Result<Vec<BranchTriple>> {
    corpus
        .publications()
        .iter()
        .map(|p| branch_triple(p, corpus.vocabulary(), rule))
        .collect()
}

/// Branch triples grouped by year, years ascending.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct YearlyTriples {
    pub years: Vec<(i32, Vec<BranchTriple>)>,
}

impl YearlyTriples {
    pub fn from_corpus(corpus: &Corpus, rule: CountingRule) -> Result<Self> {
        let all = corpus_triples(corpus, rule)?;
        let years = corpus
            .years()
            .map(|y| (y, corpus.year_indices(y).iter().map(|&i| all[i]).collect()))
            .collect();
        Ok(YearlyTriples { years })
    }

    pub fn pooled(&self) -> impl Iterator<Item = &BranchTriple> {
        self.years.iter().flat_map(|(_, t)| t.iter())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CountMapKind {
    Binary,
    Median,
    Full,
}

impl CountMapKind {
    pub fn name(self) -> &'static str {
        match self {
            CountMapKind::Binary => "binary",
            CountMapKind::Median => "median",
            CountMapKind::Full => "full",
        }
    }
}

impl fmt::Display for CountMapKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CountMapKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "binary" => Ok(CountMapKind::Binary),
            "median" => Ok(CountMapKind::Median),
            "full" => Ok(CountMapKind::Full),
            other => Err(Error::InvalidArgument(format!(
                "unknown count map {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CountVector {
    pub z: [u32; 3],
    pub kind: CountMapKind,
}

/// Applies a count map. `medians` is only consulted for the median map, where
/// a component is 1 only when the count strictly exceeds the median.
pub fn count_map(t: BranchTriple, kind: CountMapKind, medians: &BranchStats) -> CountVector {
    let z = match kind {
        CountMapKind::Binary => t.0.map(|n| u32::from(n > 0)),
        CountMapKind::Median => {
            let mut z = [0; 3];
            for b in Branch::ALL {
                z[b.index()] = u32::from(f64::from(t.get(b)) > medians.median[b.index()]);
            }
            z
        }
        CountMapKind::Full => t.0,
    };
    CountVector { z, kind }
}

/// Per-branch mean, population standard deviation and median.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct BranchStats {
    pub n: usize,
    pub mean: [f64; 3],
    pub sd: [f64; 3],
    pub median: [f64; 3],
}

impl BranchStats {
    pub fn mean_of(&self, b: Branch) -> f64 {
        self.mean[b.index()]
    }

    pub fn sd_of(&self, b: Branch) -> f64 {
        self.sd[b.index()]
    }

    pub fn median_of(&self, b: Branch) -> f64 {
        self.median[b.index()]
    }
}

pub fn branch_stats<'a>(
    triples: impl IntoIterator<Item = &'a BranchTriple>,
) -> Result<BranchStats> {
    let mut columns: [Vec<u32>; 3] = Default::default();
    for t in triples {
        for b in Branch::ALL {
            columns[b.index()].push(t.get(b));
        }
    }
    let n = columns[0].len();
    if n == 0 {
        return Err(Error::InsufficientData(
            "branch statistics need at least one publication".into(),
        ));
    }
    let mut stats = BranchStats {
        n,
        ..Default::default()
    };
    for (i, col) in columns.iter_mut().enumerate() {
        let mean = col.iter().map(|&v| f64::from(v)).sum::<f64>() / n as f64;
        let var = col
            .iter()
            .map(|&v| (f64::from(v) - mean).powi(2))
            .sum::<f64>()
            / n as f64;
        col.sort_unstable();
        let median = if n % 2 == 1 {
            f64::from(col[n / 2])
        } else {
            (f64::from(col[n / 2 - 1]) + f64::from(col[n / 2])) / 2.0
        };
        stats.mean[i] = mean;
        stats.sd[i] = var.sqrt();
        stats.median[i] = median;
    }
    Ok(stats)
}

/// Empirical P(n_α = n) over the observed support.
pub fn distribution_of_counts<'a>(
    triples: impl IntoIterator<Item = &'a BranchTriple>,
    branch: Branch,
) -> BTreeMap<u32, f64> {
    let mut hist: BTreeMap<u32, u64> = BTreeMap::new();
    let mut n = 0u64;
    for t in triples {
        *hist.entry(t.get(branch)).or_default() += 1;
        n += 1;
    }
    hist.into_iter()
        .map(|(k, c)| (k, c as f64 / n as f64))
        .collect()
}
