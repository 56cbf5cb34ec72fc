//! Independent reference computations used by the integration tests.
#![allow(dead_code)]

use rand::Rng;

/// Dense probability array p[i][j][k] with dimensions (a, b, c).
#[derive(Debug, Clone)]
pub struct Dense3 {
    pub dims: [usize; 3],
    pub p: Vec<f64>,
}

impl Dense3 {
    pub fn at(&self, i: usize, j: usize, k: usize) -> f64 {
        self.p[(i * self.dims[1] + j) * self.dims[2] + k]
    }

    /// Random table with some cells forced to zero.
    pub fn random<R: Rng>(rng: &mut R, max_side: usize) -> Dense3 {
        let dims = [
            rng.random_range(1..=max_side),
            rng.random_range(1..=max_side),
            rng.random_range(1..=max_side),
        ];
        let n = dims.iter().product();
        let mut p: Vec<f64> = (0..n)
            .map(|_| {
                if rng.random_bool(0.25) {
                    0.0
                } else {
                    rng.random::<f64>()
                }
            })
            .collect();
        if p.iter().all(|&x| x == 0.0) {
            p[0] = 1.0;
        }
        let s: f64 = p.iter().sum();
        p.iter_mut().for_each(|x| *x /= s);
        Dense3 { dims, p }
    }

    pub fn cells(&self) -> Vec<(Vec<u32>, f64)> {
        let mut out = Vec::new();
        for i in 0..self.dims[0] {
            for j in 0..self.dims[1] {
                for k in 0..self.dims[2] {
                    out.push((vec![i as u32, j as u32, k as u32], self.at(i, j, k)));
                }
            }
        }
        out
    }
}

fn h(ps: impl IntoIterator<Item = f64>) -> f64 {
    ps.into_iter()
        .filter(|&p| p > 0.0)
        .map(|p| -p * p.ln() / std::f64::consts::LN_2)
        .sum()
}

/// The seven entropies by explicit nested summation:
/// (H_x, H_y, H_z, H_xy, H_xz, H_yz, H_xyz).
pub fn oracle_entropies(t: &Dense3) -> [f64; 7] {
    let [a, b, c] = t.dims;
    let mut px = vec![0.0; a];
    let mut py = vec![0.0; b];
    let mut pz = vec![0.0; c];
    let mut pxy = vec![0.0; a * b];
    let mut pxz = vec![0.0; a * c];
    let mut pyz = vec![0.0; b * c];
    for i in 0..a {
        for j in 0..b {
            for k in 0..c {
                let p = t.at(i, j, k);
                px[i] += p;
                py[j] += p;
                pz[k] += p;
                pxy[i * b + j] += p;
                pxz[i * c + k] += p;
                pyz[j * c + k] += p;
            }
        }
    }
    [
        h(px),
        h(py),
        h(pz),
        h(pxy),
        h(pxz),
        h(pyz),
        h(t.p.iter().copied()),
    ]
}

pub fn oracle_t3(t: &Dense3) -> f64 {
    let e = oracle_entropies(t);
    e[0] + e[1] + e[2] - e[3] - e[4] - e[5] + e[6]
}

/// Bilateral information of the first two axes.
pub fn oracle_t_xy(t: &Dense3) -> f64 {
    let e = oracle_entropies(t);
    e[0] + e[1] - e[3]
}

/// Wilcoxon signed-rank oracle: literal enumeration of all 2^n sign
/// assignments over the non-zero differences (zeros dropped before ranking).
/// Returns (W+ - W-, two-sided p).
pub fn oracle_wilcoxon(x: &[i64], y: &[i64]) -> (f64, f64) {
    let d: Vec<i64> = x
        .iter()
        .zip(y)
        .map(|(a, b)| a - b)
        .filter(|&d| d != 0)
        .collect();
    let n = d.len();
    // mid-ranks by counting, independent of any sort
    let ranks: Vec<f64> = d
        .iter()
        .map(|di| {
            let less = d.iter().filter(|dj| dj.abs() < di.abs()).count() as f64;
            let equal = d.iter().filter(|dj| dj.abs() == di.abs()).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect();
    let w: f64 = d
        .iter()
        .zip(&ranks)
        .map(|(di, r)| if *di > 0 { *r } else { -*r })
        .sum();
    let mut extreme = 0u64;
    for mask in 0u64..(1 << n) {
        let s: f64 = (0..n)
            .map(|i| {
                if mask >> i & 1 == 1 {
                    ranks[i]
                } else {
                    -ranks[i]
                }
            })
            .sum();
        if s.abs() >= w.abs() - 1e-9 {
            extreme += 1;
        }
    }
    (w, extreme as f64 / (1u64 << n) as f64)
}
