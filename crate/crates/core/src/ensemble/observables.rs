use rayon::prelude::*;
use serde::Serialize;

use super::histogram::Histogram;
use super::rng::trajectory_rng;
use super::walker::Walker;
use super::SimConfig;
use crate::bloch::WienerIncrement;
use crate::error::{invalid, Result};

/// Trajectories per reduction chunk. Fixed so the summation order never
/// depends on the worker count.
const CHUNK: u64 = 64;

/// Ensemble means at one time, with standard errors of the means.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ObservableMeans {
    pub t: f64,
    pub n: usize,
    pub mean_z: f64,
    pub se_z: f64,
    pub mean_abs_z: f64,
    pub se_abs_z: f64,
    pub mean_z2: f64,
    /// Mean of x² + z², the squared Bloch radius.
    pub mean_r2: f64,
    pub mean_purity: f64,
    pub se_purity: f64,
    /// Mean of ln s over trajectories with s > 0.
    pub mean_ln_s: f64,
    pub se_ln_s: f64,
    /// Trajectories that reached s = 0 exactly and are left out of `mean_ln_s`.
    pub pure_count: usize,
}

#[derive(Debug, Clone, Copy, Default)]
struct Moments {
    n: usize,
    sum: f64,
    sum_sq: f64,
}

impl Moments {
    fn add(&mut self, v: f64) {
        self.n += 1;
        self.sum += v;
        self.sum_sq += v * v;
    }

    fn merge(&mut self, o: &Moments) {
        self.n += o.n;
        self.sum += o.sum;
        self.sum_sq += o.sum_sq;
    }

    fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.sum / self.n as f64
        }
    }

    fn standard_error(&self) -> f64 {
        if self.n < 2 {
            return 0.0;
        }
        let n = self.n as f64;
        let mean = self.sum / n;
        let var = ((self.sum_sq - n * mean * mean) / (n - 1.0)).max(0.0);
        (var / n).sqrt()
    }
}

#[derive(Debug, Clone, Copy, Default)]
struct Accumulator {
    z: Moments,
    abs_z: Moments,
    z2: Moments,
    r2: Moments,
    purity: Moments,
    ln_s: Moments,
    pure: usize,
}

impl Accumulator {
    fn add(&mut self, w: &Walker) {
        let b = w.bloch();
        let s = w.linear_entropy();
        self.z.add(b.z());
        self.abs_z.add(b.z().abs());
        self.z2.add(b.z() * b.z());
        self.r2.add(b.radius_squared());
        self.purity.add(1.0 - s);
        if s > 0.0 {
            self.ln_s.add(s.ln());
        } else {
            self.pure += 1;
        }
    }

    fn merge(&mut self, o: &Accumulator) {
        self.z.merge(&o.z);
        self.abs_z.merge(&o.abs_z);
        self.z2.merge(&o.z2);
        self.r2.merge(&o.r2);
        self.purity.merge(&o.purity);
        self.ln_s.merge(&o.ln_s);
        self.pure += o.pure;
    }

    fn finish(&self, t: f64) -> ObservableMeans {
        ObservableMeans {
            t,
            n: self.z.n,
            mean_z: self.z.mean(),
            se_z: self.z.standard_error(),
            mean_abs_z: self.abs_z.mean(),
            se_abs_z: self.abs_z.standard_error(),
            mean_z2: self.z2.mean(),
            mean_r2: self.r2.mean(),
            mean_purity: self.purity.mean(),
            se_purity: self.purity.standard_error(),
            mean_ln_s: self.ln_s.mean(),
            se_ln_s: self.ln_s.standard_error(),
            pure_count: self.pure,
        }
    }
}

fn check_times(cfg: &SimConfig, times: &[f64]) -> Result<Vec<usize>> {
    cfg.validate()?;
    if times.is_empty() {
        return Err(invalid("times", "need at least one snapshot time"));
    }
    if times.iter().any(|t| !(t.is_finite() && *t >= 0.0 && *t <= cfg.t_max)) {
        return Err(invalid("times", format!("snapshot times must lie in [0, {}]", cfg.t_max)));
    }
    if times.windows(2).any(|w| w[1] < w[0]) {
        return Err(invalid("times", "snapshot times must be nondecreasing"));
    }
    Ok(times.iter().map(|&t| cfg.steps_to(t)).collect())
}

/// Evolves one trajectory freely (no absorbing stop) and calls `visit` at
/// each requested step count, in order.
fn free_evolution(
    cfg: &SimConfig,
    index: u64,
    steps: &[usize],
    mut visit: impl FnMut(usize, &Walker),
) -> Result<()> {
    let mut rng = trajectory_rng(cfg.master_seed, index);
    let mut walker = Walker::start(cfg.protocol, cfg.feedback, cfg.z0)?;
    let step = cfg.step_size();
    let mut n = 0;
    for (k, &target) in steps.iter().enumerate() {
        while n < target {
            let dw = WienerIncrement::sample(&mut rng, step).get();
            walker.advance(cfg.dt, dw)?;
            n += 1;
        }
        visit(k, &walker);
    }
    Ok(())
}

/// Linear entropy of every trajectory at time t, in trajectory order.
pub fn entropy_samples(cfg: &SimConfig, t: f64) -> Result<Vec<f64>> {
    let steps = check_times(cfg, &[t])?;
    (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut s = f64::NAN;
            free_evolution(cfg, i, &steps, |_, w| s = w.linear_entropy())?;
            Ok(s)
        })
        .collect()
}

/// Histogram of log₁₀ s at time t over the given edges. Trajectories with
/// s = 0 land in the underflow count.
pub fn purity_snapshot(cfg: &SimConfig, t: f64, edges: Vec<f64>) -> Result<Histogram> {
    let mut h = Histogram::from_edges(edges)?;
    h.extend(entropy_samples(cfg, t)?.into_iter().map(f64::log10));
    Ok(h)
}

/// Ensemble means at each of `times` (nondecreasing, within `t_max`).
pub fn observable_series(cfg: &SimConfig, times: &[f64]) -> Result<Vec<ObservableMeans>> {
    let steps = check_times(cfg, times)?;
    let n = cfg.n_traj as u64;
    let chunks = n.div_ceil(CHUNK);
    let partials = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut acc = vec![Accumulator::default(); steps.len()];
            for i in c * CHUNK..((c + 1) * CHUNK).min(n) {
                free_evolution(cfg, i, &steps, |k, w| acc[k].add(w))?;
            }
            Ok(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = vec![Accumulator::default(); steps.len()];
    for part in &partials {
        for (t, p) in total.iter_mut().zip(part) {
            t.merge(p);
        }
    }
    Ok(total.iter().zip(times).map(|(a, &t)| a.finish(t)).collect())
}

pub fn mean_observables(cfg: &SimConfig, t: f64) -> Result<ObservableMeans> {
    Ok(observable_series(cfg, &[t])?[0])
}
