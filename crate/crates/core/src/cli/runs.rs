use clap::Args;
use serde::Serialize;

use super::{record_config, EnsembleArgs};
use crate::analytics::{mean_abs_z, mean_fpt_exact, mean_purity, tau_q, threshold_z, QuadratureSpec};
use crate::ensemble::{observable_series, run_ensemble, Pole};
use crate::error::{invalid, Result};
use crate::output::{Cell, Manifest, OutputSet, Table};
use crate::protocols::{jacobs_purity, ProtocolKind};

#[derive(Debug, Clone, Args, Serialize)]
pub struct FptArgs {
    /// Target infidelity: trajectories stop at purity 1 - ε.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// `none` or `jacobs`.
    #[arg(long, default_value_t = ProtocolKind::NoFeedback)]
    pub protocol: ProtocolKind,
    /// Initial z (the feedback protocol starts from the rotated state |z0| on x).
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z0: f64,
    /// First-passage histogram bins.
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}

/// Closed-form mean hitting time from z0 for either protocol.
fn expected_time(protocol: ProtocolKind, eps: f64, z0: f64) -> Result<f64> {
    let s0 = 0.5 * (1.0 - z0 * z0);
    if s0 <= eps {
        return Ok(0.0);
    }
    match protocol {
        ProtocolKind::NoFeedback => mean_fpt_exact(z0, threshold_z(eps)?),
        ProtocolKind::JacobsFeedback => Ok(tau_q(eps)? - tau_q(s0)?),
    }
}

pub(super) fn fpt(a: &FptArgs, out: &mut OutputSet, manifest: &mut Manifest) -> Result<()> {
    let tq = tau_q(a.epsilon)?;
    let cfg = a.ensemble.config(a.protocol, a.epsilon, 10.0 * tq)?.with_z0(a.z0);
    cfg.validate()?;
    manifest.extend_from(a);
    record_config(manifest, &cfg);
    let s = run_ensemble(&cfg)?;

    let mut records = Table::new(["index", "time", "pole", "censored"]);
    for r in &s.records {
        records.push(vec![
            r.index.into(),
            r.time.into(),
            r.pole.map_or(Cell::Int(0), |p: Pole| Cell::Int(p.sign() as i64)),
            r.censored.into(),
        ])?;
    }
    let h = s.fpt_histogram(a.bins)?;
    let mut hist = Table::new(["t_lo", "t_hi", "t_mid", "count", "density"]);
    let n = s.n_uncensored.max(1) as f64;
    for i in 0..h.bin_count() {
        let (lo, hi) = h.bin(i);
        let k = h.counts()[i];
        hist.push(vec![lo.into(), hi.into(), (0.5 * (lo + hi)).into(), k.into(), (k as f64 / (n * (hi - lo))).into()])?;
    }
    let mut summary = Table::new([
        "epsilon",
        "protocol",
        "n_traj",
        "n_uncensored",
        "censored",
        "mean",
        "std",
        "se",
        "pole_up",
        "pole_down",
        "expected_mean",
        "t_q",
        "fraction_before_t_q",
    ]);
    summary.push(vec![
        a.epsilon.into(),
        a.protocol.name().into(),
        s.n_traj.into(),
        s.n_uncensored.into(),
        s.censored.into(),
        s.mean_time.into(),
        s.std_time.into(),
        s.standard_error.into(),
        s.pole_up.into(),
        s.pole_down.into(),
        expected_time(a.protocol, a.epsilon, a.z0)?.into(),
        tq.into(),
        s.fraction_before(tq).into(),
    ])?;
    out.add("fpt_records.csv", records);
    out.add("fpt_histogram.csv", hist);
    out.add("fpt_summary.csv", summary);
    manifest.insert("censored", s.censored);
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PurityArgs {
    /// `none` or `jacobs`.
    #[arg(long, default_value_t = ProtocolKind::NoFeedback)]
    pub protocol: ProtocolKind,
    /// Sample times, comma separated and nondecreasing.
    #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 1.72694, 2.0, 3.2806])]
    pub times: Vec<f64>,
    /// Initial z.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z0: f64,
    /// Target infidelity recorded with the configuration; no stopping is applied.
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}

pub(super) fn purity(a: &PurityArgs, out: &mut OutputSet, manifest: &mut Manifest) -> Result<()> {
    let horizon = a.times.iter().cloned().fold(0.0, f64::max);
    if !(horizon > 0.0) {
        return Err(invalid("times", "need at least one time > 0"));
    }
    let cfg = a.ensemble.config(a.protocol, a.epsilon, horizon)?.with_z0(a.z0);
    cfg.validate()?;
    manifest.extend_from(a);
    record_config(manifest, &cfg);
    let series = observable_series(&cfg, &a.times)?;
    let spec = QuadratureSpec::default();
    let from_mixed = a.z0 == 0.0;
    let mut table = Table::new([
        "t",
        "n",
        "mean_z",
        "se_z",
        "mean_abs_z",
        "se_abs_z",
        "mean_z2",
        "mean_r2",
        "mean_purity",
        "se_purity",
        "mean_ln_s",
        "se_ln_s",
        "pure_count",
        "analytic_mean_purity",
        "analytic_mean_abs_z",
    ]);
    for m in &series {
        let (p, abs_z) = match (a.protocol, from_mixed, m.t > 0.0) {
            (ProtocolKind::NoFeedback, true, true) => (mean_purity(m.t, &spec)?, mean_abs_z(m.t, &spec)?),
            (ProtocolKind::JacobsFeedback, true, _) => (jacobs_purity(m.t)?, 0.0),
            (ProtocolKind::NoFeedback, true, false) => (0.5, 0.0),
            _ => (f64::NAN, f64::NAN),
        };
        table.push(vec![
            m.t.into(),
            m.n.into(),
            m.mean_z.into(),
            m.se_z.into(),
            m.mean_abs_z.into(),
            m.se_abs_z.into(),
            m.mean_z2.into(),
            m.mean_r2.into(),
            m.mean_purity.into(),
            m.se_purity.into(),
            m.mean_ln_s.into(),
            m.se_ln_s.into(),
            m.pure_count.into(),
            p.into(),
            abs_z.into(),
        ])?;
    }
    out.add(format!("purity_{}.csv", a.protocol.name()), table);
    Ok(())
}
