//! Shuffling null model for the information series.
//!
//! Within each year the C/D/E descriptor labels of all publications are pooled,
//! permuted uniformly and dealt back so that every publication keeps its total
//! n_C + n_D + n_E and every year keeps its per-branch totals. Only the
//! allocation of labels to publications is randomized.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::counts::{branch_stats, Branch, BranchStats, BranchTriple, CountMapKind, YearlyTriples};
use crate::error::{Error, Result};
use crate::info::{yearly_mi_from_triples, MiSeries, MiTarget};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ShuffleConfig {
    pub replicates: usize,
    pub ci_level: f64,
    pub seed: u64,
    pub map_kind: CountMapKind,
    pub include_zero_vectors: bool,
}

impl Default for ShuffleConfig {
    fn default() -> Self {
        ShuffleConfig {
            replicates: 100,
            ci_level: 0.90,
            seed: 0,
            map_kind: CountMapKind::Full,
            include_zero_vectors: true,
        }
    }
}

impl ShuffleConfig {
    pub fn validate(&self) -> Result<()> {
        if self.replicates < 2 {
            return Err(Error::InvalidArgument(format!(
                "at least 2 replicates are required, got {}",
                self.replicates
            )));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level must lie in (0, 1), got {}",
                self.ci_level
            )));
        }
        Ok(())
    }
}

/// Seed of replicate `replicate`, a SplitMix64 finalizer over the pair.
pub fn replicate_seed(seed: u64, replicate: u64) -> u64 {
    let mut z = seed
        ^ replicate
            .wrapping_add(1)
            .wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn replicate_rng(seed: u64, replicate: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(replicate_seed(seed, replicate))
}

/// Permutes one year's branch labels across its publications.
pub fn shuffle_year<R: Rng + ?Sized>(triples: &[BranchTriple], rng: &mut R) -> Vec<BranchTriple> {
    let mut pool: Vec<u8> = Vec::with_capacity(triples.iter().map(|t| t.total() as usize).sum());
    for b in Branch::ALL {
        let n: u32 = triples.iter().map(|t| t.get(b)).sum();
        pool.extend(std::iter::repeat_n(b.index() as u8, n as usize));
    }
    pool.shuffle(rng);

    let mut labels = pool.iter();
    triples
        .iter()
        .map(|t| {
            let mut out = [0u32; 3];
            for &label in labels.by_ref().take(t.total() as usize) {
                out[label as usize] += 1;
            }
            BranchTriple(out)
        })
        .collect()
}

/// Shuffles every year of `triples` with one replicate stream, years in
/// ascending order.
pub fn shuffle_all<R: Rng + ?Sized>(triples: &YearlyTriples, rng: &mut R) -> YearlyTriples {
    YearlyTriples {
        years: triples
            .years
            .iter()
            .map(|(y, t)| (*y, shuffle_year(t, rng)))
            .collect(),
    }
}

/// Nearest-rank percentile of ascending `sorted`: the value at 1-based index
/// ceil(p * n), clamped to the data.
pub fn percentile(sorted: &[f64], p: f64) -> Result<f64> {
    if sorted.is_empty() {
        return Err(Error::InsufficientData("percentile of empty data".into()));
    }
    let n = sorted.len();
    // guard against p * n landing a hair above an integer
    let rank = (p * n as f64 - 1e-9).ceil().clamp(1.0, n as f64) as usize;
    Ok(sorted[rank - 1])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BandFlag {
    Inside,
    Above,
    Below,
}

impl BandFlag {
    pub fn name(self) -> &'static str {
        match self {
            BandFlag::Inside => "inside",
            BandFlag::Above => "above",
            BandFlag::Below => "below",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BandRow {
    pub year: i32,
    pub mean_rand: f64,
    pub lo: f64,
    pub hi: f64,
    pub observed: f64,
    pub flag: BandFlag,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NullBand {
    pub target: MiTarget,
    pub map_kind: CountMapKind,
    pub rows: Vec<BandRow>,
}

impl NullBand {
    pub fn count(&self, flag: BandFlag) -> usize {
        self.rows.iter().filter(|r| r.flag == flag).count()
    }
}

/// Observed series plus the information series of every replicate, in
/// replicate order.
#[derive(Debug, Clone)]
pub struct NullEnsemble {
    pub config: ShuffleConfig,
    pub observed: MiSeries,
    pub replicates: Vec<MiSeries>,
}

/// Runs all replicates. Medians for the median map come from the observed
/// pooled triples and stay fixed across replicates.
pub fn null_ensemble(triples: &YearlyTriples, config: &ShuffleConfig) -> Result<NullEnsemble> {
    config.validate()?;
    let medians: BranchStats = branch_stats(triples.pooled())?;
    let observed = yearly_mi_from_triples(
        triples,
        config.map_kind,
        &medians,
        config.include_zero_vectors,
    )?;
    let replicates = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = replicate_rng(config.seed, r);
            let shuffled = shuffle_all(triples, &mut rng);
            yearly_mi_from_triples(
                &shuffled,
                config.map_kind,
                &medians,
                config.include_zero_vectors,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(NullEnsemble {
        config: *config,
        observed,
        replicates,
    })
}

impl NullEnsemble {
    pub fn band(&self, target: MiTarget) -> Result<NullBand> {
        let tail = (1.0 - self.config.ci_level) / 2.0;
        let mut rows = Vec::with_capacity(self.observed.records.len());
        for (i, rec) in self.observed.records.iter().enumerate() {
            let mut values: Vec<f64> = self
                .replicates
                .iter()
                .map(|s| {
                    let r = &s.records[i];
                    debug_assert_eq!(r.year, rec.year);
                    r.target(target)
                })
                .collect();
            let mean_rand = values.iter().sum::<f64>() / values.len() as f64;
            values.sort_by(f64::total_cmp);
            let lo = percentile(&values, tail)?;
            let hi = percentile(&values, 1.0 - tail)?;
            let observed = rec.target(target);
            let flag = if observed > hi {
                BandFlag::Above
            } else if observed < lo {
                BandFlag::Below
            } else {
                BandFlag::Inside
            };
            rows.push(BandRow {
                year: rec.year,
                mean_rand,
                lo,
                hi,
                observed,
                flag,
            });
        }
        Ok(NullBand {
            target,
            map_kind: self.config.map_kind,
            rows,
        })
    }
}

pub fn null_band(
    triples: &YearlyTriples,
    config: &ShuffleConfig,
    target: MiTarget,
) -> Result<NullBand> {
    null_ensemble(triples, config)?.band(target)
}
