//! Triple-helix measurements over MeSH-annotated publication corpora.
//!
//! Publications are projected onto their Diseases (C), Drugs (D) and
//! Techniques (E) descriptor counts. From these the crate computes yearly
//! entropies, bilateral and three-way mutual information, a shuffling null
//! model with empirical bands, Zipf/Heaps scaling fits and descriptor rank
//! dynamics.

pub mod corpus;
pub mod counts;
pub mod dynamics;
pub mod error;
pub mod info;
pub mod mesh;
pub mod null_model;
pub mod scaling;
pub mod synth;
pub mod wilcoxon;

pub use corpus::{Corpus, IngestReport, Publication, YearRange};
pub use counts::{
    Branch, BranchStats, BranchTriple, CountMapKind, CountVector, CountingRule, YearlyTriples,
};
pub use error::{Error, Result};
pub use info::{JointTable, MiRecord, MiSeries, MiTarget};
pub use mesh::{MeshDescriptor, TreeNumber, Vocabulary};
pub use null_model::{NullBand, ShuffleConfig};
