#![allow(dead_code)]

use purification::bloch::{ito_step, BlochState};
use purification::density::{sme_step, DensityMatrix};
use purification::ensemble::trajectory_rng;
use rand::Rng;
use rand_distr::StandardNormal;

/// Fine Brownian increments over [0, t_end], one path per index.
pub fn brownian_path(seed: u64, index: u64, dt_fine: f64, t_end: f64) -> Vec<f64> {
    let mut rng = trajectory_rng(seed, index);
    let n = (t_end / dt_fine).round() as usize;
    let sd = dt_fine.sqrt();
    (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Integrates the Bloch and density-matrix equations side by side from the
/// maximally mixed state, with each step driven by the sum of `group` fine
/// increments. Returns the largest |z_bloch - z_density| along the path.
pub fn shared_noise_deviation(fine: &[f64], dt_fine: f64, group: usize) -> f64 {
    let dt = dt_fine * group as f64;
    let mut bloch = BlochState::MAXIMALLY_MIXED;
    let mut rho = DensityMatrix::maximally_mixed();
    let mut worst: f64 = 0.0;
    for chunk in fine.chunks_exact(group) {
        let dw: f64 = chunk.iter().sum();
        bloch = ito_step(bloch, dt, dw).unwrap();
        rho = sme_step(&rho, dt, dw).unwrap();
        let z = rho.to_bloch().unwrap().z();
        worst = worst.max((bloch.z() - z).abs());
    }
    worst
}

/// Ordinary least-squares slope of y on x.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Pearson chi-square of observed counts against expected probabilities,
/// merging neighbouring cells left to right until each expects at least
/// `min_expected` counts. Returns (statistic, cells, p-value).
pub fn pooled_chi_square(observed: &[u64], probabilities: &[f64], n: f64, min_expected: f64) -> (f64, usize, f64) {
    use statrs::distribution::{ChiSquared, ContinuousCDF};
    let mut cells: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&k, &p) in observed.iter().zip(probabilities) {
        o += k as f64;
        e += n * p;
        if e >= min_expected {
            cells.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match cells.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => cells.push((o, e)),
        }
    }
    let stat: f64 = cells.iter().map(|(o, e)| (o - e) * (o - e) / e).sum();
    let dof = (cells.len() - 1) as f64;
    let p = ChiSquared::new(dof).unwrap().sf(stat);
    (stat, cells.len(), p)
}
