mod common;

use common::{oracle_entropies, oracle_t3, oracle_t_xy, Dense3};
use helix_core::counts::Branch;
use helix_core::info::{
    decomposition, entropy, mutual_info_2, mutual_info_3, EntropyProfile, JointTable,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CDE: [Branch; 3] = Branch::ALL;

fn table(d: &Dense3) -> JointTable {
    JointTable::from_probabilities(&CDE, d.cells()).unwrap()
}

fn dense_strategy() -> impl Strategy<Value = Dense3> {
    (any::<u64>(), 1usize..=4).prop_map(|(seed, side)| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Dense3::random(&mut rng, side)
    })
}

#[test]
fn matches_direct_summation_on_random_tables() {
    let mut rng = ChaCha8Rng::seed_from_u64(20151204);
    for _ in 0..500 {
        let d = Dense3::random(&mut rng, 4);
        let t = table(&d);
        let oracle = oracle_entropies(&d);
        let p = EntropyProfile::of(&t).unwrap();
        let ours = [
            p.single[0],
            p.single[1],
            p.single[2],
            p.pair[0],
            p.pair[1],
            p.pair[2],
            p.joint,
        ];
        for (a, b) in ours.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-12, "{ours:?} vs {oracle:?}");
        }
        assert!((entropy(&t) - oracle[6]).abs() < 1e-12);
        assert!((mutual_info_3(&t).unwrap() - oracle_t3(&d)).abs() < 1e-12);
        let cd = t.marginal(&[Branch::C, Branch::D]).unwrap();
        assert!((mutual_info_2(&cd).unwrap() - oracle_t_xy(&d).max(0.0)).abs() < 1e-12);
    }
}

#[test]
fn independent_product_tables_have_no_information() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let margins: Vec<Vec<f64>> = (0..3)
            .map(|_| {
                let n = rand::Rng::random_range(&mut rng, 1..=4);
                let v: Vec<f64> = (0..n)
                    .map(|_| rand::Rng::random::<f64>(&mut rng) + 0.05)
                    .collect();
                let s: f64 = v.iter().sum();
                v.into_iter().map(|x| x / s).collect()
            })
            .collect();
        let mut cells = Vec::new();
        for (i, a) in margins[0].iter().enumerate() {
            for (j, b) in margins[1].iter().enumerate() {
                for (k, c) in margins[2].iter().enumerate() {
                    cells.push((vec![i as u32, j as u32, k as u32], a * b * c));
                }
            }
        }
        let t = JointTable::from_probabilities(&CDE, cells).unwrap();
        assert!(mutual_info_3(&t).unwrap().abs() < 1e-12);
        let d = decomposition(&t).unwrap();
        assert!((d.subadditivity_gap + d.pairwise_sum).abs() < 1e-12);
        assert!(d.subadditivity_gap.abs() < 1e-12);
    }
}

proptest! {
    #[test]
    fn decomposition_identity(d in dense_strategy()) {
        let t = table(&d);
        let dec = decomposition(&t).unwrap();
        let direct = mutual_info_3(&t).unwrap();
        prop_assert!((dec.t3 - direct).abs() < 1e-9);
        prop_assert!(dec.subadditivity_gap <= 0.0);
        prop_assert!(dec.pairwise_sum >= 0.0);
    }

    #[test]
    fn subadditivity_and_nonnegativity(d in dense_strategy()) {
        let t = table(&d);
        let p = EntropyProfile::of(&t).unwrap();
        prop_assert!(p.pair[0] <= p.single[0] + p.single[1] + 1e-12);
        prop_assert!(p.pair[1] <= p.single[0] + p.single[2] + 1e-12);
        prop_assert!(p.pair[2] <= p.single[1] + p.single[2] + 1e-12);
        prop_assert!(p.joint <= p.single.iter().sum::<f64>() + 1e-12);
        for t in p.pairwise() {
            prop_assert!(t >= 0.0);
        }
    }

    #[test]
    fn relabeling_axes_leaves_information_unchanged(d in dense_strategy(), shift in 1u32..50, flip in any::<bool>()) {
        let t = table(&d);
        let [a, _, c] = d.dims;
        // bijective recoding of each axis: reverse x, shift y, scale z
        let recoded = JointTable::from_probabilities(
            &CDE,
            d.cells().into_iter().map(|(k, p)| {
                let x = if flip { a as u32 - 1 - k[0] } else { k[0] };
                (vec![x, k[1] + shift, (c as u32 - k[2]) * 7], p)
            }),
        ).unwrap();
        let p1 = EntropyProfile::of(&t).unwrap();
        let p2 = EntropyProfile::of(&recoded).unwrap();
        prop_assert!((p1.joint - p2.joint).abs() < 1e-12);
        prop_assert!((p1.interaction() - p2.interaction()).abs() < 1e-12);
        for i in 0..3 {
            prop_assert!((p1.pairwise()[i] - p2.pairwise()[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn marginals_are_valid_tables(d in dense_strategy()) {
        let t = table(&d);
        for keep in [&[Branch::C][..], &[Branch::D, Branch::E], &[Branch::E, Branch::C, Branch::D]] {
            let m = t.marginal(keep).unwrap();
            let mass: f64 = m.cells().values().sum();
            prop_assert!((mass - 1.0).abs() < 1e-12);
            prop_assert!(m.cells().values().all(|&p| p > 0.0 && p <= 1.0 + 1e-15));
        }
    }
}
