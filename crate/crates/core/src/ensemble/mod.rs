//! Reproducible Monte Carlo ensembles of monitored qubits: first-passage
//! times through a purity threshold, purity snapshots and ensemble means.
//!
//! Every trajectory draws from its own ChaCha8 stream keyed by
//! `(master_seed, index)`, and per-trajectory results are reduced in index
//! order, so outputs are bitwise identical for any rayon pool size.

mod histogram;
mod observables;
mod rng;
mod walker;

use rand::Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::analytics::tau_q;
use crate::bloch::{BlochState, StepSize, WienerIncrement};
use crate::error::{invalid, Result};
use crate::protocols::{FeedbackModel, ProtocolKind};

pub use histogram::Histogram;
pub use observables::{
    entropy_samples, mean_observables, observable_series, purity_snapshot, ObservableMeans,
};
pub use rng::trajectory_rng;
use walker::Walker;

/// Ensemble configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimConfig {
    pub dt: f64,
    pub t_max: f64,
    pub n_traj: usize,
    /// Target infidelity: trajectories stop once the purity reaches 1 - ε.
    pub epsilon: f64,
    pub protocol: ProtocolKind,
    pub feedback: FeedbackModel,
    pub master_seed: u64,
    pub z0: f64,
    /// Steps between recorded path points; 0 disables path recording.
    pub record_stride: usize,
}

impl SimConfig {
    pub const DEFAULT_DT: f64 = 1e-4;
    pub const DEFAULT_N_TRAJ: usize = 20_000;
    pub const DEFAULT_SEED: u64 = 20_061_207;

    /// Defaults: dt = 1e-4, 20 000 trajectories, z₀ = 0 and a horizon of ten
    /// times the feedback purification time for ε.
    pub fn new(protocol: ProtocolKind, epsilon: f64) -> Result<Self> {
        let cfg = Self {
            dt: Self::DEFAULT_DT,
            t_max: Self::default_t_max(epsilon)?,
            n_traj: Self::DEFAULT_N_TRAJ,
            epsilon,
            protocol,
            feedback: FeedbackModel::Ideal,
            master_seed: Self::DEFAULT_SEED,
            z0: 0.0,
            record_stride: 0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn default_t_max(epsilon: f64) -> Result<f64> {
        if !(epsilon > 0.0 && epsilon < 0.5) {
            return Err(invalid("epsilon", format!("need 0 < ε < 1/2, got {epsilon}")));
        }
        Ok(10.0 * tau_q(epsilon)?)
    }

    pub fn with_dt(mut self, dt: f64) -> Self {
        self.dt = dt;
        self
    }

    pub fn with_t_max(mut self, t_max: f64) -> Self {
        self.t_max = t_max;
        self
    }

    pub fn with_n_traj(mut self, n: usize) -> Self {
        self.n_traj = n;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.master_seed = seed;
        self
    }

    pub fn with_z0(mut self, z0: f64) -> Self {
        self.z0 = z0;
        self
    }

    pub fn with_feedback(mut self, feedback: FeedbackModel) -> Self {
        self.feedback = feedback;
        self
    }

    pub fn with_record_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        StepSize::new(self.dt)?;
        if !(self.t_max.is_finite() && self.t_max > self.dt) {
            return Err(invalid("t_max", format!("need t_max > dt, got {} vs {}", self.t_max, self.dt)));
        }
        if self.n_traj == 0 {
            return Err(invalid("n_traj", "need at least one trajectory"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 0.5) {
            return Err(invalid("epsilon", format!("need 0 < ε < 1/2, got {}", self.epsilon)));
        }
        if !(self.z0.is_finite() && self.z0.abs() <= 1.0) {
            return Err(invalid("z0", format!("need |z0| <= 1, got {}", self.z0)));
        }
        if self.protocol == ProtocolKind::JacobsFeedback
            && self.feedback == FeedbackModel::Ideal
            && self.dt >= 0.25
        {
            return Err(invalid("dt", "ideal feedback needs dt < 1/4"));
        }
        Ok(())
    }

    /// |z| at which the purity reaches 1 - ε.
    pub fn threshold_z(&self) -> f64 {
        (1.0 - 2.0 * self.epsilon).sqrt()
    }

    pub(crate) fn step_size(&self) -> StepSize {
        StepSize::new(self.dt).expect("validated")
    }

    /// Number of integrator steps to reach time t (rounded to the nearest step).
    pub fn steps_to(&self, t: f64) -> usize {
        (t / self.dt).round() as usize
    }

    fn max_steps(&self) -> usize {
        (self.t_max / self.dt - 1e-9).ceil() as usize
    }
}

/// Pole of the Bloch sphere at which a no-feedback trajectory was absorbed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Pole {
    Up,
    Down,
}

impl Pole {
    pub fn sign(self) -> i8 {
        match self {
            Pole::Up => 1,
            Pole::Down => -1,
        }
    }
}

/// First passage of one trajectory through the purity threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FirstPassageRecord {
    pub index: u64,
    /// Hitting time, or `t_max` when censored.
    pub time: f64,
    /// `None` under feedback, where the threshold is crossed along x.
    pub pole: Option<Pole>,
    pub censored: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PathPoint {
    pub t: f64,
    pub x: f64,
    pub z: f64,
    pub linear_entropy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryOutcome {
    pub record: FirstPassageRecord,
    pub path: Vec<PathPoint>,
}

/// Brownian-bridge check for threshold crossings between grid points.
///
/// In u = artanh|z| the no-feedback diffusion is constant (du = ±2 dW + 4|z| dt),
/// so given two endpoints below the barrier U the path crossed in between with
/// probability exp(-(U - u₀)(U - u₁) / (2 dt)).
struct BridgeCheck {
    barrier: f64,
    /// Below this gap the crossing probability is worth evaluating.
    gap_trigger: f64,
    two_dt: f64,
}

impl BridgeCheck {
    fn new(cfg: &SimConfig) -> Self {
        let eps = cfg.epsilon;
        let z = cfg.threshold_z();
        // artanh Z with 1 - Z formed without cancellation
        let barrier = 0.5 * ((1.0 + z) * (1.0 + z) / (2.0 * eps)).ln();
        // beyond ~10 sqrt(dt) from the barrier the probability is below e^-50
        let near = barrier - 10.0 * cfg.dt.sqrt();
        let gap_trigger = if near <= 0.0 { 1.0 } else { 2.0 / ((2.0 * near).exp() + 1.0) };
        Self {
            barrier,
            gap_trigger,
            two_dt: 2.0 * cfg.dt,
        }
    }

    fn crossing_probability(&self, before: f64, after: f64) -> f64 {
        (-(self.barrier - before) * (self.barrier - after) / self.two_dt).exp()
    }
}

fn pole_of(sign: Option<i8>) -> Option<Pole> {
    sign.map(|s| if s < 0 { Pole::Down } else { Pole::Up })
}

/// Integrates one trajectory until the purity first reaches 1 - ε or `t_max`.
///
/// The crossing time within the final step is found by linear interpolation
/// of the purity. Without feedback, a Brownian-bridge test also catches
/// crossings that happen and revert between two grid points; those are placed
/// at the middle of the step.
pub fn run_trajectory(cfg: &SimConfig, index: u64) -> Result<TrajectoryOutcome> {
    cfg.validate()?;
    let mut rng = trajectory_rng(cfg.master_seed, index);
    let mut walker = Walker::start(cfg.protocol, cfg.feedback, cfg.z0)?;
    let dt = cfg.dt;
    let step = cfg.step_size();
    let eps = cfg.epsilon;
    let bridge = (cfg.protocol == ProtocolKind::NoFeedback).then(|| BridgeCheck::new(cfg));
    let stride = cfg.record_stride;
    let mut path = Vec::new();
    let record_point = |path: &mut Vec<PathPoint>, t: f64, w: &Walker| {
        let b: BlochState = w.bloch();
        path.push(PathPoint {
            t,
            x: b.x(),
            z: b.z(),
            linear_entropy: w.linear_entropy(),
        });
    };
    if stride > 0 {
        record_point(&mut path, 0.0, &walker);
    }

    let finish = |time: f64, pole: Option<i8>, censored: bool, path: Vec<PathPoint>| TrajectoryOutcome {
        record: FirstPassageRecord {
            index,
            time,
            pole: pole_of(pole),
            censored,
        },
        path,
    };

    if walker.linear_entropy() <= eps {
        return Ok(finish(0.0, walker.pole(), false, path));
    }

    let n_steps = cfg.max_steps();
    for n in 1..=n_steps {
        let before = walker;
        let s_before = before.linear_entropy();
        let dw = WienerIncrement::sample(&mut rng, step).get();
        walker.advance(dt, dw)?;
        let s_after = walker.linear_entropy();
        let t_prev = (n - 1) as f64 * dt;
        if stride > 0 && n % stride == 0 {
            record_point(&mut path, n as f64 * dt, &walker);
        }
        if s_after <= eps {
            let frac = ((s_before - eps) / (s_before - s_after)).clamp(0.0, 1.0);
            let time = (t_prev + frac * dt).min(cfg.t_max);
            return Ok(finish(time, walker.pole(), false, path));
        }
        if let (Some(bridge), Some(a0), Some(a1)) = (&bridge, before.axis(), walker.axis()) {
            if a0.sign() == a1.sign()
                && a0.gap() <= bridge.gap_trigger
                && a1.gap() <= bridge.gap_trigger
            {
                let p = bridge.crossing_probability(a0.artanh_abs_z(), a1.artanh_abs_z());
                if rng.random::<f64>() < p {
                    let time = (t_prev + 0.5 * dt).min(cfg.t_max);
                    return Ok(finish(time, before.pole(), false, path));
                }
            }
        }
    }
    Ok(finish(cfg.t_max, None, true, path))
}

/// Aggregate of an ensemble of first-passage records.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary {
    pub n_traj: usize,
    pub n_uncensored: usize,
    pub censored: usize,
    /// Mean over uncensored records.
    pub mean_time: f64,
    /// Sample standard deviation over uncensored records (0 for a single record).
    pub std_time: f64,
    pub standard_error: f64,
    pub pole_up: usize,
    pub pole_down: usize,
    #[serde(skip)]
    pub records: Vec<FirstPassageRecord>,
}

impl EnsembleSummary {
    pub fn from_records(records: Vec<FirstPassageRecord>) -> Self {
        let n_traj = records.len();
        let times: Vec<f64> = records.iter().filter(|r| !r.censored).map(|r| r.time).collect();
        let n = times.len();
        let mean = if n > 0 { times.iter().sum::<f64>() / n as f64 } else { f64::NAN };
        let std = if n > 1 {
            (times.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
        } else if n == 1 {
            0.0
        } else {
            f64::NAN
        };
        let se = if n > 0 { std / (n as f64).sqrt() } else { f64::NAN };
        let pole_up = records.iter().filter(|r| r.pole == Some(Pole::Up)).count();
        let pole_down = records.iter().filter(|r| r.pole == Some(Pole::Down)).count();
        Self {
            n_traj,
            n_uncensored: n,
            censored: n_traj - n,
            mean_time: mean,
            std_time: std,
            standard_error: se,
            pole_up,
            pole_down,
            records,
        }
    }

    /// Histogram of uncensored hitting times on `bins` uniform bins over [0, max T].
    pub fn fpt_histogram(&self, bins: usize) -> Result<Histogram> {
        let max = self
            .records
            .iter()
            .filter(|r| !r.censored)
            .map(|r| r.time)
            .fold(0.0, f64::max);
        let hi = if max > 0.0 { max } else { 1.0 };
        let mut h = Histogram::uniform(0.0, hi, bins)?;
        h.extend(self.records.iter().filter(|r| !r.censored).map(|r| r.time));
        Ok(h)
    }

    /// Fraction of uncensored records with T below `t`.
    pub fn fraction_before(&self, t: f64) -> f64 {
        let hits = self.records.iter().filter(|r| !r.censored && r.time < t).count();
        hits as f64 / self.n_uncensored.max(1) as f64
    }
}

/// Runs `cfg.n_traj` trajectories on the current rayon pool.
pub fn run_ensemble(cfg: &SimConfig) -> Result<EnsembleSummary> {
    cfg.validate()?;
    let records = (0..cfg.n_traj as u64)
        .into_par_iter()
        .map(|i| {
            let mut c = cfg.clone();
            c.record_stride = 0;
            run_trajectory(&c, i).map(|o| o.record)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleSummary::from_records(records))
}
