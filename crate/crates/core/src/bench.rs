//! Size and compression sweeps over random point clouds in a unit cube.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::complex::{ComplexError, DistanceMatrix, MorseCounts};

/// Counts averaged over seeds for one point count. `rank` is the rank of
/// `∂_n` on the full simplex, `C(n_points - 1, n)`; ratios divide by it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SizeReport {
    pub n_points: usize,
    pub seeds: usize,
    pub e: Vec<f64>,
    pub x: Vec<f64>,
    pub m: Vec<f64>,
    pub rank: Vec<f64>,
    pub compression_ratio: f64,
    pub seconds: f64,
}

impl SizeReport {
    /// `(|E_n|, |X_n|, |M_n|)` over `rank ∂_n`, or `None` when the rank is 0.
    pub fn ratios(&self, n: usize) -> Option<(f64, f64, f64)> {
        let r = self.rank[n];
        (r > 0.0).then(|| (self.e[n] / r, self.x[n] / r, self.m[n] / r))
    }
}

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// `n` points uniform in `[0, 1]^ambient`.
pub fn uniform_cloud(seed: u64, n: usize, ambient: usize) -> DistanceMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..ambient).map(|_| rng.gen::<f64>()).collect()).collect();
    DistanceMatrix::from_points(&pts).expect("finite coordinates")
}

/// Morse counts of the full Rips complex through dimension `dim_max` for
/// each point count, averaged over seeds `0..seeds`.
pub fn size_sweep(counts: &[usize], ambient: usize, dim_max: usize, seeds: usize) -> Result<Vec<SizeReport>, ComplexError> {
    let mut out = Vec::with_capacity(counts.len());
    for &n in counts {
        let start = Instant::now();
        let mut sum = MorseCounts {
            e: vec![0; dim_max + 1],
            x: vec![0; dim_max + 1],
            m: vec![0; dim_max + 1],
        };
        let mut cr = 0.0;
        for seed in 0..seeds {
            let d = uniform_cloud(seed as u64, n, ambient);
            let c = MorseCounts::rips(&d, dim_max, f64::INFINITY)?;
            for k in 0..=dim_max {
                sum.e[k] += c.e[k];
                sum.x[k] += c.x[k];
                sum.m[k] += c.m[k];
            }
            cr += c.compression_ratio();
        }
        let avg = |v: &[usize]| v.iter().map(|&c| c as f64 / seeds.max(1) as f64).collect::<Vec<_>>();
        out.push(SizeReport {
            n_points: n,
            seeds,
            e: avg(&sum.e),
            x: avg(&sum.x),
            m: avg(&sum.m),
            rank: (0..=dim_max).map(|k| if n == 0 { 0.0 } else { binomial(n - 1, k) as f64 }).collect(),
            compression_ratio: cr / seeds.max(1) as f64,
            seconds: start.elapsed().as_secs_f64(),
        });
    }
    Ok(out)
}
