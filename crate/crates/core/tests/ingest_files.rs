use std::io::Write;
use std::sync::Arc;

use helix_core::corpus::{ingest_corpus, yearly_sizes};
use helix_core::counts::{
    branch_stats, corpus_triples, distribution_of_counts, BranchTriple, CountingRule,
};
use helix_core::mesh::load_mesh;
use helix_core::synth::{draw_counts, synth_vocabulary, SynthConfig};
use helix_core::{Branch, Error, YearRange};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const ASCII: &str = "*NEWRECORD
RECTYPE = D
MH = Brain
MN = A08.186.211
UI = D001921

*NEWRECORD
RECTYPE = D
MH = DNA, Viral
MN = D13.444.308.300
UI = D004279

*NEWRECORD
RECTYPE = D
MH = Polymerase Chain Reaction
MN = E05.393.620
MN = E05.601.262
UI = D016133

*NEWRECORD
RECTYPE = D
MH = Papillomavirus Infections
MN = C02.256.650.810
MN = C04.925.400
UI = D030361

*NEWRECORD
RECTYPE = D
MH = Female
UI = D005260
";

const MEDLINE: &str = "PMID- 100
DP  - 1997 Mar
MH  - *Papillomavirus Infections/diagnosis
MH  - DNA, Viral/*analysis
MH  - Polymerase Chain Reaction
MH  - Female

PMID- 101
DP  - 2014 Jan
MH  - Brain

PMID- 102
DP  - 1999
TI  - No headings here

PMID- 103
DP  - 1998 Dec 1
MH  - Brain
MH  - Polymerase Chain
      Reaction
";

fn write_temp(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
    let path = dir.path().join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(body.as_bytes())
        .unwrap();
    path
}

#[test]
fn ascii_vocabulary_and_medline_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let (vocab, report) = load_mesh(write_temp(&dir, "d2014.bin", ASCII)).unwrap();
    assert_eq!(vocab.len(), 4);
    assert_eq!(report.skipped_no_tree_numbers, 1);
    let brain = vocab.by_name("brain").unwrap();
    assert_eq!(brain.tree_numbers()[0].depth(), 3);
    assert_eq!(vocab.get("D030361").unwrap().primary_branch(), 'C');

    let tsv = dir.path().join("mesh.tsv");
    vocab
        .write_tsv(std::fs::File::create(&tsv).unwrap())
        .unwrap();
    let (again, _) = load_mesh(&tsv).unwrap();
    assert_eq!(again.len(), vocab.len());

    let vocab = Arc::new(vocab);
    let (corpus, report) = ingest_corpus(
        write_temp(&dir, "hpv.txt", MEDLINE),
        vocab,
        YearRange::new(1960, 2013),
    )
    .unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(report.excluded_year, 1);
    assert_eq!(report.excluded_no_mesh, 1);
    assert_eq!(
        report
            .unresolved_terms
            .iter()
            .map(|u| u.count)
            .sum::<usize>(),
        1
    );
    let first = &corpus.publications()[0];
    assert_eq!((first.id.as_str(), first.year), ("100", 1997));
    let t = corpus_triples(&corpus, CountingRule::Membership).unwrap();
    assert_eq!(t[0], BranchTriple::new(1, 1, 1));
    assert_eq!(t[1], BranchTriple::new(0, 0, 1));
    let sizes = yearly_sizes(&corpus);
    assert_eq!(
        sizes.iter().map(|s| s.year).collect::<Vec<_>>(),
        [1997, 1998]
    );
}

#[test]
fn jsonl_corpus_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let vocab = Arc::new(synth_vocabulary(5).unwrap());
    let body = r#"{"id": "a", "year": 2001, "mesh": ["SC00001", "SD00002"]}
{"id": 7, "year": 2000, "mesh": ["SE00003", "Synthetic A term 0"]}
{"id": "a", "year": 2002, "mesh": ["SC00001"]}
"#;
    let (corpus, report) = ingest_corpus(
        write_temp(&dir, "c.jsonl", body),
        vocab.clone(),
        YearRange::unbounded(),
    )
    .unwrap();
    assert_eq!(corpus.len(), 2);
    assert_eq!(report.duplicate_ids, 1);
    assert_eq!(corpus.publications()[0].id, "7");
    assert_eq!(corpus.publications()[0].mesh_ids, ["SA00000", "SE00003"]);

    let mut out = Vec::new();
    corpus.write_canonical_jsonl(&mut out).unwrap();
    let path = write_temp(&dir, "canon.jsonl", std::str::from_utf8(&out).unwrap());
    let (back, _) = ingest_corpus(path, vocab, YearRange::unbounded()).unwrap();
    assert_eq!(back.publications(), corpus.publications());
}

#[test]
fn missing_files_are_io_errors() {
    let err = load_mesh("/nonexistent/mesh.tsv").unwrap_err();
    assert!(matches!(err, Error::Io { .. }));
}

#[test]
fn poisson_counts_follow_the_pmf() {
    let cfg = SynthConfig {
        rates: [2.0; 3],
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let n = 100_000usize;
    let triples: Vec<BranchTriple> = (0..n)
        .map(|_| BranchTriple(draw_counts(&cfg, &mut rng).unwrap()))
        .collect();
    for b in Branch::ALL {
        let hist = distribution_of_counts(&triples, b);
        let mut pmf = (-2.0f64).exp();
        for k in 0..12u32 {
            let observed = hist.get(&k).copied().unwrap_or(0.0);
            let sigma = (pmf * (1.0 - pmf) / n as f64).sqrt();
            assert!(
                (observed - pmf).abs() <= 3.0 * sigma,
                "{b} k={k}: {observed} vs {pmf}"
            );
            pmf *= 2.0 / f64::from(k + 1);
        }
    }
    let stats = branch_stats(&triples).unwrap();
    for b in 0..3 {
        assert!((stats.mean[b] - 2.0).abs() < 3.0 * (2.0 / n as f64).sqrt());
        assert_eq!(stats.median[b], 2.0);
    }
}
