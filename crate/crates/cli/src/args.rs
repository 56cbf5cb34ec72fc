use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use helix_core::counts::{Branch, CountMapKind, CountingRule};
use helix_core::info::MiTarget;
use helix_core::synth::SynthMode;
use helix_core::YearRange;

#[derive(Debug, Parser)]
#[command(
    name = "helix",
    version,
    about = "Triple-helix MeSH measurements over publication corpora"
)]
pub struct Cli {
    /// Worker threads; 0 uses every available core.
    #[arg(long, global = true, env = "HELIX_THREADS", default_value_t = 0)]
    pub threads: usize,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Load a corpus against a MeSH vocabulary and write its canonical form.
    Ingest(IngestArgs),
    /// Corpus summary, yearly sizes, branch count statistics and efficiencies.
    Stats(StatsArgs),
    /// Yearly entropies and mutual information of the C/D/E count vectors.
    Mi(MiArgs),
    /// Shuffling null model band around one information series.
    Null(NullArgs),
    /// Zipf and Heaps fits.
    Scaling(ScalingArgs),
    /// Rank trajectories, entrants, cross-branch pairs and branch shares.
    Dynamics(DynamicsArgs),
    /// Most frequent cross-branch descriptor pairs.
    Pairs(PairsArgs),
    /// Generate a synthetic corpus with planted coupling.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct InputArgs {
    /// Corpus as JSON lines or MEDLINE text.
    #[arg(long)]
    pub corpus: PathBuf,
    /// MeSH descriptors as ASCII (d20xx.bin) or id/name/tree_numbers TSV.
    #[arg(long)]
    pub mesh: PathBuf,
    /// Inclusive publication year range, LO:HI; either side may be empty.
    #[arg(long, value_parser = parse_year_range)]
    pub years: Option<YearRange>,
    /// Label used in summary tables; defaults to the corpus file stem.
    #[arg(long)]
    pub query: Option<String>,
    /// How descriptors filed under several branches are counted.
    #[arg(long, value_enum, default_value_t = RuleArg::Membership)]
    pub counting: RuleArg,
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct MiArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = MapArg::Full)]
    pub map: MapArg,
    /// Drop publications whose count vector is (0,0,0).
    #[arg(long)]
    pub exclude_zero: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct NullArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, value_enum, default_value_t = MapArg::Full)]
    pub map: MapArg,
    /// One of T_CD, T_CE, T_DE, T_CDE, or "all".
    #[arg(long, default_value = "T_CDE", value_parser = parse_targets)]
    pub target: Targets,
    #[arg(long, default_value_t = 100)]
    pub replicates: usize,
    /// Two-sided confidence level of the band.
    #[arg(long, default_value_t = 0.90)]
    pub ci: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub exclude_zero: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Smallest descriptor count kept in the Zipf fit.
    #[arg(long, default_value_t = helix_core::scaling::DEFAULT_MIN_COUNT)]
    pub min_count: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct DynamicsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = helix_core::dynamics::DEFAULT_TOP_K)]
    pub topk: usize,
    #[command(flatten)]
    pub pairs: PairOptions,
    /// Birth-year window LO:HI of an entrant cohort to summarize.
    #[arg(long, value_parser = parse_year_range)]
    pub cohort: Option<YearRange>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub pairs: PairOptions,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Args)]
pub struct PairOptions {
    /// Two distinct branches, e.g. D,E.
    #[arg(long, default_value = "D,E", value_parser = parse_branches)]
    pub branches: (Branch, Branch),
    /// Year window LO:HI; defaults to the whole corpus.
    #[arg(long, value_parser = parse_year_range)]
    pub window: Option<YearRange>,
    #[arg(long, default_value_t = 10)]
    pub limit: usize,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, value_enum, default_value_t = ModeArg::Independent)]
    pub mode: ModeArg,
    /// Publications per year.
    #[arg(long, default_value_t = 1000)]
    pub pubs: usize,
    #[arg(long, default_value_t = 10)]
    pub years: usize,
    #[arg(long, default_value_t = 2000)]
    pub start_year: i32,
    /// Coupling probability.
    #[arg(long, default_value_t = 1.0)]
    pub rho: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Poisson rates of n_C, n_D, n_E as C,D,E; defaults to ln 2 each.
    #[arg(long, value_parser = parse_rates)]
    pub rates: Option<[f64; 3]>,
    /// Descriptors per branch in the generated vocabulary.
    #[arg(long, default_value_t = 400)]
    pub vocab: usize,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MapArg {
    Binary,
    Median,
    Full,
}

impl From<MapArg> for CountMapKind {
    fn from(m: MapArg) -> Self {
        match m {
            MapArg::Binary => CountMapKind::Binary,
            MapArg::Median => CountMapKind::Median,
            MapArg::Full => CountMapKind::Full,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RuleArg {
    Membership,
    Primary,
}

impl From<RuleArg> for CountingRule {
    fn from(r: RuleArg) -> Self {
        match r {
            RuleArg::Membership => CountingRule::Membership,
            RuleArg::Primary => CountingRule::PrimaryOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Independent,
    Pairwise,
    Xor,
}

impl From<ModeArg> for SynthMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Independent => SynthMode::Independent,
            ModeArg::Pairwise => SynthMode::Pairwise,
            ModeArg::Xor => SynthMode::Xor,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Targets(pub Vec<MiTarget>);

fn parse_targets(s: &str) -> Result<Targets, String> {
    if s.eq_ignore_ascii_case("all") {
        return Ok(Targets(MiTarget::ALL.to_vec()));
    }
    s.split(',')
        .map(|t| MiTarget::from_str(t.trim()).map_err(|e| e.to_string()))
        .collect::<Result<Vec<_>, _>>()
        .map(Targets)
}

fn parse_year_range(s: &str) -> Result<YearRange, String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("expected LO:HI, got {s:?}"))?;
    let year = |v: &str| -> Result<Option<i32>, String> {
        let v = v.trim();
        if v.is_empty() {
            Ok(None)
        } else {
            v.parse()
                .map(Some)
                .map_err(|_| format!("invalid year {v:?}"))
        }
    };
    let range = YearRange {
        min: year(lo)?,
        max: year(hi)?,
    };
    if let (Some(lo), Some(hi)) = (range.min, range.max) {
        if lo > hi {
            return Err(format!("empty year range {s:?}"));
        }
    }
    Ok(range)
}

fn parse_branches(s: &str) -> Result<(Branch, Branch), String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let [a, b] = parts[..] else {
        return Err(format!("expected two branches such as D,E, got {s:?}"));
    };
    let a = Branch::from_str(a).map_err(|e| e.to_string())?;
    let b = Branch::from_str(b).map_err(|e| e.to_string())?;
    if a == b {
        return Err(format!("branches must differ, got {a} twice"));
    }
    Ok((a, b))
}

fn parse_rates(s: &str) -> Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| format!("invalid rate {x:?}"))
        })
        .collect::<Result<_, _>>()?;
    let [c, d, e] = v[..] else {
        return Err(format!("expected three rates C,D,E, got {s:?}"));
    };
    if [c, d, e].iter().any(|r| !(r.is_finite() && *r > 0.0)) {
        return Err(format!("rates must be positive, got {s:?}"));
    }
    Ok([c, d, e])
}
