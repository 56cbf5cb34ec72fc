//! Descriptor-level dynamics: yearly rank trajectories of the most used
//! descriptors, entry of new descriptors and their impact, cross-branch pair
//! tables and branch shares.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::counts::{corpus_triples, Branch, CountingRule};
use crate::error::{Error, Result};
use crate::scaling::{rank_table, RankScope, RankTable};

pub const DEFAULT_TOP_K: usize = 200;

/// Sizes of the six rank groups for a top-`k` list; the first `k % 6` groups
/// take one extra rank so the sizes add up to `k`.
pub fn sextile_sizes(k: usize) -> [usize; 6] {
    let base = k / 6;
    let extra = k % 6;
    std::array::from_fn(|i| base + usize::from(i < extra))
}

/// 1-based sextile of `rank` within a top-`k` list, `None` outside 1..=k.
pub fn sextile_of(rank: usize, k: usize) -> Option<u8> {
    if rank == 0 || rank > k {
        return None;
    }
    let mut upper = 0;
    for (i, size) in sextile_sizes(k).iter().enumerate() {
        upper += size;
        if rank <= upper {
            return Some(i as u8 + 1);
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum TrajectoryCell {
    /// No publication that year carries the descriptor.
    Absent,
    /// Used, but ranked below the top k that year.
    OutOfTopK,
    Sextile(u8),
}

impl TrajectoryCell {
    /// Integer code used in CSV output: -2 absent, -1 out of top k, 1..=6.
    pub fn code(self) -> i8 {
        match self {
            TrajectoryCell::Absent => -2,
            TrajectoryCell::OutOfTopK => -1,
            TrajectoryCell::Sextile(s) => s as i8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectoryRow {
    pub id: String,
    pub name: String,
    pub primary_branch: char,
    pub overall_rank: usize,
    pub cells: Vec<TrajectoryCell>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankTrajectoryMatrix {
    pub k: usize,
    pub years: Vec<i32>,
    pub rows: Vec<TrajectoryRow>,
}

/// C(r, y) for every year of the corpus.
fn yearly_tables(corpus: &Corpus) -> BTreeMap<i32, RankTable> {
    corpus
        .years()
        .map(|y| (y, rank_table(corpus, RankScope::Year(y))))
        .collect()
}

struct YearIndex {
    rank: HashMap<String, usize>,
    count: HashMap<String, u64>,
}

fn index_tables(tables: &BTreeMap<i32, RankTable>) -> BTreeMap<i32, YearIndex> {
    tables
        .iter()
        .map(|(&y, t)| {
            let rank = t.rows.iter().map(|r| (r.id.clone(), r.rank)).collect();
            let count = t.rows.iter().map(|r| (r.id.clone(), r.count)).collect();
            (y, YearIndex { rank, count })
        })
        .collect()
}

pub fn rank_trajectories(corpus: &Corpus, k: usize) -> Result<RankTrajectoryMatrix> {
    let years: Vec<i32> = corpus.years().collect();
    if years.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "rank trajectories need at least 2 years, corpus spans {}",
            years.len()
        )));
    }
    let overall = rank_table(corpus, RankScope::AllYears);
    let k = k.min(overall.len());
    let index = index_tables(&yearly_tables(corpus));

    let rows = overall.rows[..k]
        .iter()
        .map(|row| {
            let descriptor = corpus.vocabulary().get(&row.id);
            let cells = years
                .iter()
                .map(|y| match index[y].rank.get(&row.id) {
                    None => TrajectoryCell::Absent,
                    Some(&r) => sextile_of(r, k)
                        .map(TrajectoryCell::Sextile)
                        .unwrap_or(TrajectoryCell::OutOfTopK),
                })
                .collect();
            TrajectoryRow {
                id: row.id.clone(),
                name: descriptor.map(|d| d.name().to_string()).unwrap_or_default(),
                primary_branch: descriptor.map(|d| d.primary_branch()).unwrap_or('?'),
                overall_rank: row.rank,
                cells,
            }
        })
        .collect();
    Ok(RankTrajectoryMatrix { k, years, rows })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntryRecord {
    pub id: String,
    pub name: String,
    pub birth_year: i32,
    /// Appearances from the birth year to the last corpus year.
    pub appearances: u64,
    /// `appearances` over the top-k appearances in the same window.
    pub impact: f64,
    pub primary_branch: char,
}

/// Top-k descriptors first used after the corpus's first year, with their
/// net impact. Descriptors already present in the first year are treated as
/// pre-existing.
pub fn detect_entries(corpus: &Corpus, k: usize) -> Result<Vec<EntryRecord>> {
    let matrix = rank_trajectories(corpus, k)?;
    let index = index_tables(&yearly_tables(corpus));
    let top_mass_from = |start: i32| -> u64 {
        matrix
            .rows
            .iter()
            .map(|row| appearances_from(&index, &row.id, start))
            .sum()
    };

    let mut entries = Vec::new();
    for row in &matrix.rows {
        let Some(first) = row.cells.iter().position(|c| *c != TrajectoryCell::Absent) else {
            continue;
        };
        if first == 0 {
            continue;
        }
        let birth_year = matrix.years[first];
        let appearances = appearances_from(&index, &row.id, birth_year);
        let denominator = top_mass_from(birth_year);
        entries.push(EntryRecord {
            id: row.id.clone(),
            name: row.name.clone(),
            birth_year,
            appearances,
            impact: appearances as f64 / denominator as f64,
            primary_branch: row.primary_branch,
        });
    }
    entries.sort_by(|a, b| (a.birth_year, &a.id).cmp(&(b.birth_year, &b.id)));
    Ok(entries)
}

fn appearances_from(index: &BTreeMap<i32, YearIndex>, id: &str, start: i32) -> u64 {
    index
        .range(start..)
        .map(|(_, yi)| yi.count.get(id).copied().unwrap_or(0))
        .sum()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CohortImpact {
    pub birth_window: [i32; 2],
    pub entrants: usize,
    /// First birth year among the entrants; the share is measured from here.
    pub window_start: Option<i32>,
    pub share: f64,
}

/// Combined share of the entrants born within `[lo, hi]`, measured against the
/// top-k appearances from the cohort's earliest birth year onward.
pub fn cohort_impact(corpus: &Corpus, k: usize, lo: i32, hi: i32) -> Result<CohortImpact> {
    let entries = detect_entries(corpus, k)?;
    let cohort: Vec<&EntryRecord> = entries
        .iter()
        .filter(|e| (lo..=hi).contains(&e.birth_year))
        .collect();
    let Some(start) = cohort.iter().map(|e| e.birth_year).min() else {
        return Ok(CohortImpact {
            birth_window: [lo, hi],
            entrants: 0,
            window_start: None,
            share: 0.0,
        });
    };
    let matrix = rank_trajectories(corpus, k)?;
    let index = index_tables(&yearly_tables(corpus));
    let numerator: u64 = cohort.iter().map(|e| e.appearances).sum();
    let denominator: u64 = matrix
        .rows
        .iter()
        .map(|row| appearances_from(&index, &row.id, start))
        .sum();
    Ok(CohortImpact {
        birth_window: [lo, hi],
        entrants: cohort.len(),
        window_start: Some(start),
        share: numerator as f64 / denominator as f64,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairRecord {
    pub descriptor_a: String,
    pub name_a: String,
    pub branch_a: Branch,
    pub descriptor_b: String,
    pub name_b: String,
    pub branch_b: Branch,
    /// Publications in the window carrying both descriptors.
    pub co_count: u64,
    pub window: [i32; 2],
}

/// Most frequent (a, b) pairs with a filed under `first` and b under
/// `second`, counted once per publication in `[lo, hi]`.
pub fn top_pairs(
    corpus: &Corpus,
    first: Branch,
    second: Branch,
    window: (i32, i32),
    limit: usize,
) -> Result<Vec<PairRecord>> {
    if first == second {
        return Err(Error::InvalidArgument(format!(
            "pair branches must differ, got {first} twice"
        )));
    }
    let (lo, hi) = window;
    let vocab = corpus.vocabulary();
    let mut counts: HashMap<(&str, &str), u64> = HashMap::new();
    for year in corpus.years().filter(|y| (lo..=hi).contains(y)) {
        for p in corpus.publications_in(year) {
            let in_branch = |b: Branch| -> Vec<&str> {
                p.mesh_ids
                    .iter()
                    .filter(|id| vocab.get(id).is_some_and(|d| d.in_branch(b.letter())))
                    .map(String::as_str)
                    .collect()
            };
            let left = in_branch(first);
            let right = in_branch(second);
            for &a in &left {
                for &b in &right {
                    if a != b {
                        *counts.entry((a, b)).or_default() += 1;
                    }
                }
            }
        }
    }
    let mut pairs: Vec<((&str, &str), u64)> = counts.into_iter().collect();
    pairs.sort_by(|x, y| y.1.cmp(&x.1).then_with(|| x.0.cmp(&y.0)));
    pairs.truncate(limit);
    let name = |id: &str| {
        vocab
            .get(id)
            .map(|d| d.name().to_string())
            .unwrap_or_default()
    };
    Ok(pairs
        .into_iter()
        .map(|((a, b), co_count)| PairRecord {
            descriptor_a: a.to_string(),
            name_a: name(a),
            branch_a: first,
            descriptor_b: b.to_string(),
            name_b: name(b),
            branch_b: second,
            co_count,
            window: [lo, hi],
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShareRow {
    pub year: i32,
    /// C/D/E descriptor occurrences.
    pub counts: [u64; 3],
    /// Fractions of `counts`; `None` when the year has no C/D/E occurrence.
    pub shares: Option<[f64; 3]>,
}

pub fn branch_share_series(corpus: &Corpus, rule: CountingRule) -> Result<Vec<ShareRow>> {
    let triples = corpus_triples(corpus, rule)?;
    Ok(corpus
        .years()
        .map(|year| {
            let mut counts = [0u64; 3];
            for &i in corpus.year_indices(year) {
                for b in Branch::ALL {
                    counts[b.index()] += u64::from(triples[i].get(b));
                }
            }
            let total: u64 = counts.iter().sum();
            let shares = (total > 0).then(|| counts.map(|c| c as f64 / total as f64));
            ShareRow {
                year,
                counts,
                shares,
            }
        })
        .collect())
}
