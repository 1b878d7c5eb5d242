use clap::Args;
use serde::Serialize;

use super::{record_config, tag, EnsembleArgs};
use crate::analytics::{
    log10_entropy_pdf, log10_entropy_probability, mean_fpt_exact, ratio_curve, tau_q, tbar_c_asymptotic,
    threshold_z, QuadratureSpec, TbarVariant,
};
use crate::ensemble::{purity_snapshot, run_ensemble};
use crate::error::{invalid, Result};
use crate::output::{Cell, Manifest, OutputSet, Table};
use crate::protocols::{jacobs_purity, ProtocolKind};

#[derive(Debug, Clone, Args, Serialize)]
pub struct Figure1Args {
    /// Target infidelity (sets the default horizon only).
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Snapshot times, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = [1.72694, 3.2806])]
    pub times: Vec<f64>,
    /// Number of log₁₀ s bins between --log10-min and log₁₀(1/2).
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    /// Lower edge of the log₁₀ s histogram.
    #[arg(long, default_value_t = -30.0, allow_negative_numbers = true)]
    pub log10_min: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}

/// Uniform edges in log₁₀ s from `lo` up to log₁₀(1/2), the largest possible s.
pub fn log10_entropy_edges(lo: f64, bins: usize) -> Result<Vec<f64>> {
    let hi = 0.5f64.log10();
    if bins == 0 || !(lo < hi) {
        return Err(invalid("bins", format!("need bins > 0 and log10-min < {hi}")));
    }
    let w = (hi - lo) / bins as f64;
    Ok((0..=bins).map(|i| if i == bins { hi } else { lo + w * i as f64 }).collect())
}

pub(super) fn figure1(a: &Figure1Args, out: &mut OutputSet, manifest: &mut Manifest) -> Result<()> {
    if a.times.is_empty() || a.times.iter().any(|t| !(t.is_finite() && *t > 0.0)) {
        return Err(invalid("times", "need one or more snapshot times > 0"));
    }
    let horizon = a.times.iter().cloned().fold(0.0, f64::max);
    let cfg = a.ensemble.config(ProtocolKind::NoFeedback, a.epsilon, horizon)?;
    manifest.extend_from(a);
    record_config(manifest, &cfg);
    let edges = log10_entropy_edges(a.log10_min, a.bins)?;
    let spec = QuadratureSpec::default();
    let n = cfg.n_traj as f64;
    let mut underflow = Vec::new();
    for &t in &a.times {
        let h = purity_snapshot(&cfg, t, edges.clone())?;
        underflow.push(h.underflow());
        let jacobs_s = 1.0 - jacobs_purity(t)?;
        let jacobs_log = jacobs_s.log10();
        let mut table = Table::new([
            "log10_s_lo",
            "log10_s_hi",
            "log10_s_mid",
            "count",
            "empirical_density",
            "analytic_probability",
            "analytic_density",
            "analytic_pdf_mid",
            "jacobs_s",
            "jacobs_mass",
        ]);
        for i in 0..h.bin_count() {
            let (lo, hi) = h.bin(i);
            let width = hi - lo;
            let mid = 0.5 * (lo + hi);
            let prob = log10_entropy_probability(lo, hi, t, &spec)?;
            let in_bin = jacobs_log >= lo && (jacobs_log < hi || i + 1 == h.bin_count() && jacobs_log <= hi);
            table.push(vec![
                lo.into(),
                hi.into(),
                mid.into(),
                h.counts()[i].into(),
                (h.counts()[i] as f64 / (n * width)).into(),
                prob.into(),
                (prob / width).into(),
                log10_entropy_pdf(mid, t)?.into(),
                jacobs_s.into(),
                (if in_bin { 1.0 } else { 0.0 }).into(),
            ])?;
        }
        out.add(format!("figure1_t{}.csv", tag(t)), table);
    }
    manifest.insert("underflow_counts", underflow);
    Ok(())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Figure23Args {
    /// Target infidelities, comma separated.
    #[arg(long = "epsilon", value_delimiter = ',', default_values_t = [0.1, 0.01, 0.003, 0.001, 1e-4, 1e-5, 1e-6])]
    pub epsilons: Vec<f64>,
    /// First-passage histogram bins.
    #[arg(long, default_value_t = 60)]
    pub bins: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub ensemble: EnsembleArgs,
}

pub(super) fn figure2_3(a: &Figure23Args, out: &mut OutputSet, manifest: &mut Manifest) -> Result<()> {
    if a.epsilons.is_empty() {
        return Err(invalid("epsilon", "need at least one ε"));
    }
    manifest.extend_from(a);
    let mut table = Table::new([
        "epsilon",
        "mc_mean",
        "mc_std",
        "mc_se",
        "n_uncensored",
        "censored",
        "exact_mean",
        "tbar_ln2_over_eps",
        "tbar_ln1_over_eps",
        "t_q",
        "jacobs_mc_mean",
        "jacobs_mc_std",
        "mc_ratio",
        "exact_ratio",
        "ratio_curve",
        "separation_in_std",
    ]);
    let mut censored = Vec::new();
    let mut t_max = Vec::new();
    for &eps in &a.epsilons {
        let tq = tau_q(eps)?;
        let classical = a.ensemble.config(ProtocolKind::NoFeedback, eps, 10.0 * tq)?;
        let quantum = a.ensemble.config(ProtocolKind::JacobsFeedback, eps, 10.0 * tq)?;
        t_max.push(classical.t_max);
        let c = run_ensemble(&classical)?;
        let q = run_ensemble(&quantum)?;
        censored.push(c.censored);
        let exact = mean_fpt_exact(0.0, threshold_z(eps)?)?;
        table.push(vec![
            eps.into(),
            c.mean_time.into(),
            c.std_time.into(),
            c.standard_error.into(),
            c.n_uncensored.into(),
            c.censored.into(),
            exact.into(),
            tbar_c_asymptotic(eps, TbarVariant::LnTwoOverEpsilon)?.into(),
            tbar_c_asymptotic(eps, TbarVariant::LnOneOverEpsilon)?.into(),
            tq.into(),
            q.mean_time.into(),
            q.std_time.into(),
            (q.mean_time / c.mean_time).into(),
            (tq / exact).into(),
            ratio_curve(eps)?.into(),
            ((tq - c.mean_time) / c.std_time).into(),
        ])?;

        let h = c.fpt_histogram(a.bins)?;
        let mut hist = Table::new(["t_lo", "t_hi", "t_mid", "count", "density", "jacobs_t_q", "jacobs_mc_mean"]);
        let n = c.n_uncensored.max(1) as f64;
        for i in 0..h.bin_count() {
            let (lo, hi) = h.bin(i);
            let k = h.counts()[i];
            hist.push(vec![
                lo.into(),
                hi.into(),
                (0.5 * (lo + hi)).into(),
                k.into(),
                (k as f64 / (n * (hi - lo))).into(),
                tq.into(),
                Cell::Num(q.mean_time),
            ])?;
        }
        out.add(format!("figure2_fpt_eps{}.csv", tag(eps)), hist);
    }
    out.add("figure3_ratios.csv", table);
    manifest.insert("censored", censored);
    manifest.insert("t_max", t_max);
    manifest.insert("protocols", vec!["none", "jacobs"]);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_edges_end_at_half() {
        let e = log10_entropy_edges(-30.0, 60).unwrap();
        assert_eq!(e.len(), 61);
        assert_eq!(e[0], -30.0);
        assert_eq!(*e.last().unwrap(), 0.5f64.log10());
        assert!(log10_entropy_edges(0.0, 10).is_err());
        assert!(log10_entropy_edges(-5.0, 0).is_err());
    }
}
