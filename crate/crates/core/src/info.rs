//! Plug-in Shannon entropy, bilateral mutual information and the three-way
//! interaction information over C/D/E count vectors.
//!
//! All quantities are in bits. Probabilities are maximum-likelihood
//! frequencies; no small-sample correction is applied.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::corpus::Corpus;
use crate::counts::{
    branch_stats, count_map, Branch, BranchStats, BranchTriple, CountMapKind, CountVector,
    CountingRule, YearlyTriples,
};
use crate::error::{Error, Result};

/// Tolerance on the total probability mass of a table.
pub const MASS_TOLERANCE: f64 = 1e-12;
/// Negative bilateral information above `-MI_CLAMP` is rounding noise and is
/// reported as zero.
pub const MI_CLAMP: f64 = 1e-12;
/// Years with fewer publications than this are flagged `low_support`.
pub const LOW_SUPPORT: usize = 30;

/// Empirical joint distribution over one to three branch axes.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    axes: Vec<Branch>,
    cells: BTreeMap<Vec<u32>, f64>,
    n_obs: usize,
}

impl JointTable {
    /// Builds a table from explicit cell probabilities. Zero cells are
    /// dropped; the remaining mass must sum to one.
    pub fn from_probabilities(
        axes: &[Branch],
        cells: impl IntoIterator<Item = (Vec<u32>, f64)>,
    ) -> Result<Self> {
        check_axes(axes)?;
        let mut map = BTreeMap::new();
        for (key, p) in cells {
            if key.len() != axes.len() {
                return Err(Error::InvalidArgument(format!(
                    "cell {key:?} does not match {} axes",
                    axes.len()
                )));
            }
            if !(0.0..=1.0).contains(&p) || p.is_nan() {
                return Err(Error::InvalidArgument(format!(
                    "probability {p} out of range"
                )));
            }
            if p > 0.0 {
                *map.entry(key).or_insert(0.0) += p;
            }
        }
        let mass: f64 = map.values().sum();
        if (mass - 1.0).abs() > MASS_TOLERANCE {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {mass}"
            )));
        }
        Ok(JointTable {
            axes: axes.to_vec(),
            cells: map,
            n_obs: 0,
        })
    }

    /// Frequency table of observed value tuples.
    pub fn from_observations<'a>(
        axes: &[Branch],
        rows: impl IntoIterator<Item = &'a [u32]>,
    ) -> Result<Self> {
        check_axes(axes)?;
        let mut counts: HashMap<&[u32], u64> = HashMap::new();
        let mut n = 0usize;
        for row in rows {
            if row.len() != axes.len() {
                return Err(Error::InvalidArgument(format!(
                    "observation {row:?} does not match {} axes",
                    axes.len()
                )));
            }
            *counts.entry(row).or_default() += 1;
            n += 1;
        }
        if n == 0 {
            return Err(Error::InsufficientData("no observations".into()));
        }
        let cells = counts
            .into_iter()
            .map(|(k, c)| (k.to_vec(), c as f64 / n as f64))
            .collect();
        Ok(JointTable {
            axes: axes.to_vec(),
            cells,
            n_obs: n,
        })
    }

    /// C/D/E table from count vectors.
    pub fn from_vectors(vectors: &[CountVector]) -> Result<Self> {
        JointTable::from_observations(&Branch::ALL, vectors.iter().map(|v| v.z.as_slice()))
    }

    pub fn axes(&self) -> &[Branch] {
        &self.axes
    }

    pub fn dims(&self) -> usize {
        self.axes.len()
    }

    pub fn cells(&self) -> &BTreeMap<Vec<u32>, f64> {
        &self.cells
    }

    pub fn support_size(&self) -> usize {
        self.cells.len()
    }

    pub fn n_obs(&self) -> usize {
        self.n_obs
    }

    /// Sums out every axis not listed in `keep`; the result follows the order
    /// of `keep`.
    pub fn marginal(&self, keep: &[Branch]) -> Result<JointTable> {
        let positions = keep
            .iter()
            .map(|b| {
                self.axes
                    .iter()
                    .position(|a| a == b)
                    .ok_or_else(|| Error::InvalidArgument(format!("axis {b} not in table")))
            })
            .collect::<Result<Vec<_>>>()?;
        check_axes(keep)?;
        let mut cells: BTreeMap<Vec<u32>, f64> = BTreeMap::new();
        for (key, p) in &self.cells {
            let sub: Vec<u32> = positions.iter().map(|&i| key[i]).collect();
            *cells.entry(sub).or_insert(0.0) += p;
        }
        Ok(JointTable {
            axes: keep.to_vec(),
            cells,
            n_obs: self.n_obs,
        })
    }
}

fn check_axes(axes: &[Branch]) -> Result<()> {
    if axes.is_empty() || axes.len() > 3 {
        return Err(Error::InvalidArgument(format!(
            "a joint table has 1 to 3 axes, got {}",
            axes.len()
        )));
    }
    for (i, a) in axes.iter().enumerate() {
        if axes[..i].contains(a) {
            return Err(Error::InvalidArgument(format!("axis {a} repeated")));
        }
    }
    Ok(())
}

/// -Σ p log2 p, summed from the most probable cell down.
pub fn entropy(table: &JointTable) -> f64 {
    let mut ps: Vec<f64> = table.cells.values().copied().collect();
    ps.sort_by(|a, b| b.total_cmp(a));
    let h: f64 = ps.iter().map(|&p| -p * p.log2()).sum();
    h.max(0.0)
}

fn require_dims(table: &JointTable, dims: usize) -> Result<()> {
    if table.dims() == dims {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "expected a {dims}-axis table, got {}",
            table.dims()
        )))
    }
}

/// H_x + H_y - H_xy without clamping.
pub fn mutual_info_2_raw(table: &JointTable) -> Result<f64> {
    require_dims(table, 2)?;
    let hx = entropy(&table.marginal(&table.axes[..1])?);
    let hy = entropy(&table.marginal(&table.axes[1..])?);
    Ok(hx + hy - entropy(table))
}

pub fn mutual_info_2(table: &JointTable) -> Result<f64> {
    mutual_info_2_raw(table).map(clamp_mi)
}

fn clamp_mi(t: f64) -> f64 {
    if t < 0.0 && t > -MI_CLAMP {
        0.0
    } else {
        t
    }
}

/// The seven entropies of a three-axis table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyProfile {
    /// H_x, H_y, H_z in table axis order.
    pub single: [f64; 3],
    /// H_xy, H_xz, H_yz.
    pub pair: [f64; 3],
    pub joint: f64,
}

impl EntropyProfile {
    pub fn of(table: &JointTable) -> Result<Self> {
        require_dims(table, 3)?;
        let a = &table.axes;
        let h = |keep: &[Branch]| table.marginal(keep).map(|m| entropy(&m));
        Ok(EntropyProfile {
            single: [h(&[a[0]])?, h(&[a[1]])?, h(&[a[2]])?],
            pair: [h(&[a[0], a[1]])?, h(&[a[0], a[2]])?, h(&[a[1], a[2]])?],
            joint: entropy(table),
        })
    }

    /// Bilateral information for the pairs (xy, xz, yz), unclamped.
    pub fn pairwise_raw(&self) -> [f64; 3] {
        let s = &self.single;
        [
            s[0] + s[1] - self.pair[0],
            s[0] + s[2] - self.pair[1],
            s[1] + s[2] - self.pair[2],
        ]
    }

    pub fn pairwise(&self) -> [f64; 3] {
        self.pairwise_raw().map(clamp_mi)
    }

    /// H_x + H_y + H_z - H_xy - H_xz - H_yz + H_xyz.
    pub fn interaction(&self) -> f64 {
        self.single.iter().sum::<f64>() - self.pair.iter().sum::<f64>() + self.joint
    }
}

pub fn mutual_info_3(table: &JointTable) -> Result<f64> {
    Ok(EntropyProfile::of(table)?.interaction())
}

/// T_xyz split into the non-negative pairwise part and the non-positive
/// subadditivity gap.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    pub pairwise_sum: f64,
    pub subadditivity_gap: f64,
    pub t3: f64,
}

pub fn decomposition(table: &JointTable) -> Result<Decomposition> {
    let profile = EntropyProfile::of(table)?;
    Ok(decompose(&profile))
}

fn decompose(profile: &EntropyProfile) -> Decomposition {
    let pairwise_sum: f64 = profile.pairwise().iter().sum();
    let raw_gap = profile.joint - profile.single.iter().sum::<f64>();
    // rounding residue above zero is clamped like the pairwise terms
    let subadditivity_gap = if raw_gap > 0.0 && raw_gap <= MI_CLAMP {
        0.0
    } else {
        raw_gap
    };
    Decomposition {
        pairwise_sum,
        subadditivity_gap,
        t3: pairwise_sum + subadditivity_gap,
    }
}

/// Normalized entropy of a usage distribution: H / log V where V is the
/// number of non-zero counts. A single used descriptor has efficiency 0.
pub fn efficiency(counts: &[u64]) -> Result<f64> {
    let mut used: Vec<u64> = counts.iter().copied().filter(|&c| c > 0).collect();
    if used.is_empty() {
        return Err(Error::InsufficientData(
            "efficiency of all-zero counts".into(),
        ));
    }
    if used.len() == 1 {
        return Ok(0.0);
    }
    used.sort_unstable_by(|a, b| b.cmp(a));
    let total: u64 = used.iter().sum();
    let h: f64 = used
        .iter()
        .map(|&c| {
            let p = c as f64 / total as f64;
            -p * p.log2()
        })
        .sum();
    Ok((h / (used.len() as f64).log2()).clamp(0.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EfficiencyRow {
    pub year: i32,
    /// E_α(y); `None` when no descriptor of the branch is used that year.
    pub efficiency: [Option<f64>; 3],
    /// V_α(y)
    pub vocabulary: [usize; 3],
    /// M_α(y)
    pub uses: [u64; 3],
}

/// Per-year efficiency of descriptor usage inside each of C, D and E.
pub fn efficiency_series(corpus: &Corpus) -> Vec<EfficiencyRow> {
    corpus
        .years()
        .map(|year| {
            let mut usage: [HashMap<&str, u64>; 3] = Default::default();
            for p in corpus.publications_in(year) {
                for id in &p.mesh_ids {
                    let Some(d) = corpus.vocabulary().get(id) else {
                        continue;
                    };
                    for b in Branch::ALL {
                        if d.in_branch(b.letter()) {
                            *usage[b.index()].entry(id.as_str()).or_default() += 1;
                        }
                    }
                }
            }
            let mut row = EfficiencyRow {
                year,
                efficiency: [None; 3],
                vocabulary: [0; 3],
                uses: [0; 3],
            };
            for b in Branch::ALL {
                let counts: Vec<u64> = usage[b.index()].values().copied().collect();
                row.vocabulary[b.index()] = counts.len();
                row.uses[b.index()] = counts.iter().sum();
                row.efficiency[b.index()] = efficiency(&counts).ok();
            }
            row
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiRecord {
    pub year: i32,
    pub h_c: f64,
    pub h_d: f64,
    pub h_e: f64,
    pub h_cd: f64,
    pub h_ce: f64,
    pub h_de: f64,
    pub h_cde: f64,
    pub t_cd: f64,
    pub t_ce: f64,
    pub t_de: f64,
    pub t_cde: f64,
    pub n_obs: usize,
    pub low_support: bool,
    /// Unclamped (T_CD, T_CE, T_DE).
    #[serde(skip)]
    pub pairwise_raw: [f64; 3],
}

impl MiRecord {
    pub fn from_vectors(year: i32, vectors: &[CountVector]) -> Result<Self> {
        let table = JointTable::from_vectors(vectors)?;
        let profile = EntropyProfile::of(&table)?;
        let [t_cd, t_ce, t_de] = profile.pairwise();
        Ok(MiRecord {
            year,
            h_c: profile.single[0],
            h_d: profile.single[1],
            h_e: profile.single[2],
            h_cd: profile.pair[0],
            h_ce: profile.pair[1],
            h_de: profile.pair[2],
            h_cde: profile.joint,
            t_cd,
            t_ce,
            t_de,
            t_cde: profile.interaction(),
            n_obs: table.n_obs(),
            low_support: table.n_obs() < LOW_SUPPORT,
            pairwise_raw: profile.pairwise_raw(),
        })
    }

    pub fn target(&self, target: MiTarget) -> f64 {
        match target {
            MiTarget::Cd => self.t_cd,
            MiTarget::Ce => self.t_ce,
            MiTarget::De => self.t_de,
            MiTarget::Cde => self.t_cde,
        }
    }
}

/// One of the four information series.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum MiTarget {
    #[serde(rename = "T_CD")]
    Cd,
    #[serde(rename = "T_CE")]
    Ce,
    #[serde(rename = "T_DE")]
    De,
    #[serde(rename = "T_CDE")]
    Cde,
}

impl MiTarget {
    pub const ALL: [MiTarget; 4] = [MiTarget::Cd, MiTarget::Ce, MiTarget::De, MiTarget::Cde];

    pub fn name(self) -> &'static str {
        match self {
            MiTarget::Cd => "T_CD",
            MiTarget::Ce => "T_CE",
            MiTarget::De => "T_DE",
            MiTarget::Cde => "T_CDE",
        }
    }
}

impl std::fmt::Display for MiTarget {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for MiTarget {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_uppercase();
        let key = key.strip_prefix("T_").unwrap_or(&key);
        match key {
            "CD" | "DC" => Ok(MiTarget::Cd),
            "CE" | "EC" => Ok(MiTarget::Ce),
            "DE" | "ED" => Ok(MiTarget::De),
            "CDE" => Ok(MiTarget::Cde),
            _ => Err(Error::InvalidArgument(format!("unknown target {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct MiOptions {
    pub rule: CountingRule,
    /// Keep publications whose count vector is (0,0,0).
    pub include_zero_vectors: bool,
}

impl Default for MiOptions {
    fn default() -> Self {
        MiOptions {
            rule: CountingRule::Membership,
            include_zero_vectors: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MiSeries {
    pub map_kind: CountMapKind,
    pub records: Vec<MiRecord>,
}

impl MiSeries {
    pub fn values(&self, target: MiTarget) -> Vec<(i32, f64)> {
        self.records
            .iter()
            .map(|r| (r.year, r.target(target)))
            .collect()
    }
}

pub fn yearly_mi(corpus: &Corpus, map_kind: CountMapKind) -> Result<MiSeries> {
    yearly_mi_with(corpus, map_kind, MiOptions::default())
}

pub fn yearly_mi_with(
    corpus: &Corpus,
    map_kind: CountMapKind,
    options: MiOptions,
) -> Result<MiSeries> {
    let triples = YearlyTriples::from_corpus(corpus, options.rule)?;
    let medians = branch_stats(triples.pooled())?;
    yearly_mi_from_triples(&triples, map_kind, &medians, options.include_zero_vectors)
}

/// Maps one year's triples to count vectors, optionally dropping (0,0,0).
pub fn year_vectors(
    triples: &[BranchTriple],
    map_kind: CountMapKind,
    medians: &BranchStats,
    include_zero_vectors: bool,
) -> Vec<CountVector> {
    triples
        .iter()
        .map(|&t| count_map(t, map_kind, medians))
        .filter(|v| include_zero_vectors || v.z != [0, 0, 0])
        .collect()
}

/// Series over pre-computed triples. `medians` should be the pooled corpus
/// statistics; it only matters for the median map.
pub fn yearly_mi_from_triples(
    triples: &YearlyTriples,
    map_kind: CountMapKind,
    medians: &BranchStats,
    include_zero_vectors: bool,
) -> Result<MiSeries> {
    let mut records = Vec::with_capacity(triples.years.len());
    for (year, year_triples) in &triples.years {
        let vectors = year_vectors(year_triples, map_kind, medians, include_zero_vectors);
        if vectors.is_empty() {
            continue;
        }
        records.push(MiRecord::from_vectors(*year, &vectors)?);
    }
    Ok(MiSeries { map_kind, records })
}
