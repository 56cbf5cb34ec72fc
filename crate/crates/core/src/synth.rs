//! Synthetic corpora with planted C/D/E coupling, used as test oracles.
//!
//! Branch counts are drawn per publication as Poisson variates; the mode then
//! couples them:
//!
//! * `independent`: n_C, n_D, n_E independent.
//! * `pairwise`: with probability ρ, n_D is a copy of n_C.
//! * `xor`: with probability ρ, z_E = z_C xor z_D at the binary level (n_E is
//!   zero, or a zero-truncated Poisson draw when the xor is 1).
//!
//! Every publication also carries at least one descriptor from a non-C/D/E
//! branch so that no record is empty.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, Zipf};
use serde::Serialize;

use crate::corpus::{Corpus, Publication};
use crate::counts::Branch;
use crate::error::{Error, Result};
use crate::mesh::{MeshDescriptor, TreeNumber, Vocabulary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SynthMode {
    Independent,
    Pairwise,
    Xor,
}

impl fmt::Display for SynthMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SynthMode::Independent => "independent",
            SynthMode::Pairwise => "pairwise",
            SynthMode::Xor => "xor",
        })
    }
}

impl FromStr for SynthMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "independent" => Ok(SynthMode::Independent),
            "pairwise" => Ok(SynthMode::Pairwise),
            "xor" => Ok(SynthMode::Xor),
            other => Err(Error::InvalidArgument(format!(
                "unknown synth mode {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SynthConfig {
    pub mode: SynthMode,
    pub pubs_per_year: usize,
    pub years: usize,
    pub start_year: i32,
    /// Coupling probability ρ.
    pub rho: f64,
    pub seed: u64,
    /// Poisson rates of n_C, n_D, n_E. The default ln 2 makes each binary
    /// indicator a fair coin.
    pub rates: [f64; 3],
    /// Poisson rate of extra non-C/D/E descriptors on top of the one every
    /// publication carries.
    pub other_rate: f64,
    pub vocab_per_branch: usize,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            mode: SynthMode::Independent,
            pubs_per_year: 1000,
            years: 10,
            start_year: 2000,
            rho: 1.0,
            seed: 0,
            rates: [std::f64::consts::LN_2; 3],
            other_rate: 1.0,
            vocab_per_branch: 400,
        }
    }
}

const OTHER_LETTER: char = 'A';

fn descriptor_id(letter: char, i: usize) -> String {
    format!("S{letter}{i:05}")
}

/// The synthetic vocabulary: `vocab_per_branch` descriptors under each of C,
/// D, E and an unrelated branch.
pub fn synth_vocabulary(vocab_per_branch: usize) -> Result<Vocabulary> {
    let mut descriptors = Vec::with_capacity(4 * vocab_per_branch);
    for letter in ['C', 'D', 'E', OTHER_LETTER] {
        for i in 0..vocab_per_branch {
            let tree = TreeNumber::parse(&format!("{letter}{:02}.{:04}", 1 + i / 1000, i % 1000))?;
            descriptors.push(MeshDescriptor::new(
                descriptor_id(letter, i),
                format!("Synthetic {letter} term {i}"),
                vec![tree],
            )?);
        }
    }
    Vocabulary::from_descriptors(descriptors)
}

/// Draws a raw (n_C, n_D, n_E) for one publication under `config`.
pub fn draw_counts<R: Rng + ?Sized>(config: &SynthConfig, rng: &mut R) -> Result<[u32; 3]> {
    let pois = |rate: f64| Poisson::new(rate).map_err(|e| Error::InvalidArgument(e.to_string()));
    let dists = [
        pois(config.rates[0])?,
        pois(config.rates[1])?,
        pois(config.rates[2])?,
    ];
    let mut n: [u32; 3] = std::array::from_fn(|i| dists[i].sample(rng) as u32);
    match config.mode {
        SynthMode::Independent => {}
        SynthMode::Pairwise => {
            if rng.random::<f64>() < config.rho {
                n[1] = n[0];
            }
        }
        SynthMode::Xor => {
            if rng.random::<f64>() < config.rho {
                let bit = (n[0] > 0) ^ (n[1] > 0);
                n[2] = if bit {
                    loop {
                        let v = dists[2].sample(rng) as u32;
                        if v > 0 {
                            break v;
                        }
                    }
                } else {
                    0
                };
            }
        }
    }
    Ok(n)
}

pub fn synth_corpus(config: &SynthConfig) -> Result<Corpus> {
    if !(0.0..=1.0).contains(&config.rho) {
        return Err(Error::InvalidArgument(format!(
            "rho must lie in [0, 1], got {}",
            config.rho
        )));
    }
    if config.vocab_per_branch == 0 {
        return Err(Error::InvalidArgument(
            "vocab_per_branch must be positive".into(),
        ));
    }
    let vocabulary = Arc::new(synth_vocabulary(config.vocab_per_branch)?);
    let popularity = Zipf::new(config.vocab_per_branch as f64, 1.0)
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let other =
        Poisson::new(config.other_rate).map_err(|e| Error::InvalidArgument(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let mut publications = Vec::with_capacity(config.years * config.pubs_per_year);
    for y in 0..config.years {
        let year = config.start_year + y as i32;
        for i in 0..config.pubs_per_year {
            let n = draw_counts(config, &mut rng)?;
            let extra = 1 + other.sample(&mut rng) as u32;
            let mut ids = Vec::new();
            let letters = Branch::ALL.map(|b| b.letter());
            for (letter, count) in letters.into_iter().zip(n).chain([(OTHER_LETTER, extra)]) {
                let count = (count as usize).min(config.vocab_per_branch);
                let mut chosen: Vec<usize> = Vec::with_capacity(count);
                while chosen.len() < count {
                    let idx = popularity.sample(&mut rng) as usize - 1;
                    if !chosen.contains(&idx) {
                        chosen.push(idx);
                    }
                }
                ids.extend(chosen.into_iter().map(|i| descriptor_id(letter, i)));
            }
            publications.push(Publication::new(format!("{year}-{i:06}"), year, ids));
        }
    }
    Corpus::new(format!("synth-{}", config.mode), publications, vocabulary)
}
