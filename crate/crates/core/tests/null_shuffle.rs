use helix_core::counts::{branch_stats, Branch, BranchTriple, CountMapKind, YearlyTriples};
use helix_core::info::MiTarget;
use helix_core::null_model::{
    null_band, null_ensemble, replicate_rng, shuffle_all, BandFlag, ShuffleConfig,
};
use helix_core::synth::{draw_counts, SynthConfig, SynthMode};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn synthetic_triples(mode: SynthMode, years: usize, per_year: usize, seed: u64) -> YearlyTriples {
    let cfg = SynthConfig {
        mode,
        seed,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    YearlyTriples {
        years: (0..years)
            .map(|y| {
                let ts = (0..per_year)
                    .map(|_| BranchTriple(draw_counts(&cfg, &mut rng).unwrap()))
                    .collect();
                (2000 + y as i32, ts)
            })
            .collect(),
    }
}

fn branch_totals(ts: &[BranchTriple]) -> [u64; 3] {
    let mut out = [0u64; 3];
    for t in ts {
        for b in Branch::ALL {
            out[b.index()] += u64::from(t.get(b));
        }
    }
    out
}

fn triples_strategy() -> impl Strategy<Value = YearlyTriples> {
    prop::collection::vec(
        prop::collection::vec((0u32..5, 0u32..5, 0u32..5), 1..40),
        1..4,
    )
    .prop_map(|years| YearlyTriples {
        years: years
            .into_iter()
            .enumerate()
            .map(|(i, ts)| {
                (
                    1990 + i as i32,
                    ts.into_iter()
                        .map(|(c, d, e)| BranchTriple::new(c, d, e))
                        .collect(),
                )
            })
            .collect(),
    })
}

proptest! {
    #[test]
    fn shuffles_preserve_both_margins(triples in triples_strategy(), seed in any::<u64>()) {
        let mut rng = replicate_rng(seed, 0);
        let shuffled = shuffle_all(&triples, &mut rng);
        prop_assert_eq!(shuffled.years.len(), triples.years.len());
        for ((y0, before), (y1, after)) in triples.years.iter().zip(&shuffled.years) {
            prop_assert_eq!(y0, y1);
            prop_assert_eq!(branch_totals(before), branch_totals(after));
            let tb: Vec<u32> = before.iter().map(BranchTriple::total).collect();
            let ta: Vec<u32> = after.iter().map(BranchTriple::total).collect();
            prop_assert_eq!(tb, ta);
        }
    }
}

#[test]
fn mean_is_preserved_by_every_shuffle() {
    let triples = synthetic_triples(SynthMode::Pairwise, 2, 3000, 5);
    let pooled: Vec<BranchTriple> = triples.pooled().copied().collect();
    let before = branch_stats(&pooled).unwrap();
    for r in 0..20 {
        let shuffled = shuffle_all(&triples, &mut replicate_rng(9, r));
        let after = branch_stats(shuffled.pooled()).unwrap();
        for b in 0..3 {
            assert!((after.mean[b] - before.mean[b]).abs() < 1e-12);
        }
    }
}

#[test]
fn ensemble_is_independent_of_thread_count() {
    let triples = synthetic_triples(SynthMode::Independent, 3, 400, 17);
    let cfg = ShuffleConfig {
        replicates: 40,
        seed: 42,
        ..Default::default()
    };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| null_band(&triples, &cfg, MiTarget::Cde).unwrap())
    };
    let one = run(1);
    let four = run(4);
    assert_eq!(one, four);
    for (a, b) in one.rows.iter().zip(&four.rows) {
        assert_eq!(a.lo.to_bits(), b.lo.to_bits());
        assert_eq!(a.mean_rand.to_bits(), b.mean_rand.to_bits());
    }
}

#[test]
fn adding_replicates_keeps_earlier_ones() {
    let triples = synthetic_triples(SynthMode::Independent, 2, 200, 3);
    let small = ShuffleConfig {
        replicates: 5,
        seed: 1,
        ..Default::default()
    };
    let large = ShuffleConfig {
        replicates: 12,
        ..small
    };
    let a = null_ensemble(&triples, &small).unwrap();
    let b = null_ensemble(&triples, &large).unwrap();
    assert_eq!(a.observed, b.observed);
    assert_eq!(a.replicates[..], b.replicates[..5]);
}

#[test]
fn xor_synergy_falls_below_the_band() {
    let triples = synthetic_triples(SynthMode::Xor, 4, 2000, 23);
    for map_kind in [CountMapKind::Full, CountMapKind::Binary] {
        let cfg = ShuffleConfig {
            replicates: 100,
            seed: 8,
            map_kind,
            ..Default::default()
        };
        let band = null_band(&triples, &cfg, MiTarget::Cde).unwrap();
        assert_eq!(band.count(BandFlag::Below), 4, "{map_kind}: {band:?}");
        for row in &band.rows {
            assert!(row.observed < -0.5);
        }
    }
}

#[test]
fn bands_are_ordered() {
    let triples = synthetic_triples(SynthMode::Pairwise, 3, 500, 31);
    for map_kind in [
        CountMapKind::Binary,
        CountMapKind::Median,
        CountMapKind::Full,
    ] {
        let cfg = ShuffleConfig {
            replicates: 30,
            seed: 2,
            map_kind,
            ..Default::default()
        };
        for target in MiTarget::ALL {
            let band = null_band(&triples, &cfg, target).unwrap();
            for row in &band.rows {
                assert!(row.lo <= row.hi);
                let expected = if row.observed > row.hi {
                    BandFlag::Above
                } else if row.observed < row.lo {
                    BandFlag::Below
                } else {
                    BandFlag::Inside
                };
                assert_eq!(row.flag, expected);
            }
        }
    }
}

#[test]
fn too_few_replicates() {
    let triples = synthetic_triples(SynthMode::Independent, 1, 10, 0);
    let cfg = ShuffleConfig {
        replicates: 1,
        ..Default::default()
    };
    assert!(null_band(&triples, &cfg, MiTarget::Cd).is_err());
}
