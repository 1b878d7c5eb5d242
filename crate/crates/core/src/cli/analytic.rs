use clap::{Args, ValueEnum};
use serde::Serialize;

use crate::analytics::{
    average_state_purity, epsilon_asymptotic, fokker_planck_survival, mean_abs_z, mean_fpt_exact, mean_infidelity,
    mean_purity, operational_epsilon, purity_pdf_classical, ratio_curve, tau_c, tau_q, tbar_c_asymptotic,
    threshold_z, wp_q, FPGrid, QuadratureSpec, TbarVariant,
};
use crate::error::{invalid, Result};
use crate::output::{Cell, Manifest, OutputSet, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[value(rename_all = "snake_case")]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    /// Average no-feedback purity against t.
    MeanPurity,
    /// Large-t mean infidelity against t.
    EpsilonAsymptotic,
    /// Time for the average purity to reach 1 - ε, against ε.
    TauC,
    /// Feedback purification time against ε.
    TauQ,
    /// Mean first-passage time from --z0, against ε.
    MeanFpt,
    /// Ratio of feedback to no-feedback hitting times, against ε.
    Ratio,
    /// Density of the linear-trajectory variable q at --t, against q.
    WpQ,
    /// Density of the purity at --t, against p.
    PurityPdf,
    /// ⟨|z|⟩ and the purity of the rotated average state, against t.
    AbsZ,
    /// Fokker–Planck survival probability for --epsilon and --z0, against t.
    FpSurvival,
}

impl Quantity {
    fn variable(self) -> &'static str {
        match self {
            Quantity::MeanPurity | Quantity::EpsilonAsymptotic | Quantity::AbsZ | Quantity::FpSurvival => "t",
            Quantity::TauC | Quantity::TauQ | Quantity::MeanFpt | Quantity::Ratio => "epsilon",
            Quantity::WpQ => "q",
            Quantity::PurityPdf => "p",
        }
    }

    fn name(self) -> &'static str {
        match self {
            Quantity::MeanPurity => "mean_purity",
            Quantity::EpsilonAsymptotic => "epsilon_asymptotic",
            Quantity::TauC => "tau_c",
            Quantity::TauQ => "tau_q",
            Quantity::MeanFpt => "mean_fpt",
            Quantity::Ratio => "ratio",
            Quantity::WpQ => "wp_q",
            Quantity::PurityPdf => "purity_pdf",
            Quantity::AbsZ => "abs_z",
            Quantity::FpSurvival => "fp_survival",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct AnalyticArgs {
    #[arg(long, value_enum)]
    pub quantity: Quantity,
    /// Explicit input values, comma separated.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true, conflicts_with_all = ["from", "to"])]
    pub values: Vec<f64>,
    /// Start of an input range.
    #[arg(long, allow_negative_numbers = true, requires = "to")]
    pub from: Option<f64>,
    /// End of an input range.
    #[arg(long, allow_negative_numbers = true, requires = "from")]
    pub to: Option<f64>,
    /// Points in the range, endpoints included.
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Space the range points logarithmically.
    #[arg(long)]
    pub log: bool,
    /// Time for wp_q and purity_pdf.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Starting z for mean_fpt and fp_survival.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub z0: f64,
    /// Target infidelity for fp_survival.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Interior grid nodes for fp_survival.
    #[arg(long, default_value_t = 799)]
    pub grid_nodes: usize,
    /// PDE time step for fp_survival.
    #[arg(long, default_value_t = 1e-2)]
    pub pde_dt: f64,
}

impl AnalyticArgs {
    fn inputs(&self) -> Result<Vec<f64>> {
        if !self.values.is_empty() {
            return Ok(self.values.clone());
        }
        let (Some(a), Some(b)) = (self.from, self.to) else {
            return Err(invalid("values", "give --values or --from/--to"));
        };
        if self.points < 2 {
            return Err(invalid("points", "a range needs at least two points"));
        }
        let k = (self.points - 1) as f64;
        if self.log {
            if !(a > 0.0 && b > 0.0) {
                return Err(invalid("from", "a log range needs positive endpoints"));
            }
            let (la, lb) = (a.ln(), b.ln());
            Ok((0..self.points).map(|i| (la + (lb - la) * i as f64 / k).exp()).collect())
        } else {
            Ok((0..self.points).map(|i| a + (b - a) * i as f64 / k).collect())
        }
    }
}

pub(super) fn analytic(a: &AnalyticArgs, out: &mut OutputSet, manifest: &mut Manifest) -> Result<()> {
    let xs = a.inputs()?;
    manifest.extend_from(a);
    let spec = QuadratureSpec::default();
    let var = a.quantity.variable();
    let table = match a.quantity {
        Quantity::MeanPurity => tabulate(&xs, [var, "mean_purity", "mean_infidelity"], |t| {
            Ok(vec![mean_purity(t, &spec)?, mean_infidelity(t, &spec)?])
        })?,
        Quantity::EpsilonAsymptotic => {
            tabulate(&xs, [var, "epsilon_asymptotic"], |t| Ok(vec![epsilon_asymptotic(t)?]))?
        }
        Quantity::TauC => tabulate(&xs, [var, "tau_c", "tau_c_asymptotic_root", "tau_c_leading_order"], |e| {
            let r = tau_c(e, &spec)?;
            Ok(vec![r.exact, r.asymptotic_root, r.leading_order])
        })?,
        Quantity::TauQ => tabulate(&xs, [var, "tau_q"], |e| Ok(vec![tau_q(e)?]))?,
        Quantity::MeanFpt => tabulate(&xs, [var, "mean_fpt", "tbar_ln2_over_eps", "tbar_ln1_over_eps"], |e| {
            Ok(vec![
                mean_fpt_exact(a.z0, threshold_z(e)?)?,
                tbar_c_asymptotic(e, TbarVariant::LnTwoOverEpsilon)?,
                tbar_c_asymptotic(e, TbarVariant::LnOneOverEpsilon)?,
            ])
        })?,
        Quantity::Ratio => tabulate(&xs, [var, "ratio"], |e| Ok(vec![ratio_curve(e)?]))?,
        Quantity::WpQ => tabulate(&xs, [var, "wp_q"], |q| Ok(vec![wp_q(q, a.t)?]))?,
        Quantity::PurityPdf => tabulate(&xs, [var, "purity_pdf"], |p| Ok(vec![purity_pdf_classical(p, a.t)?]))?,
        Quantity::AbsZ => tabulate(
            &xs,
            [var, "mean_abs_z", "average_state_purity", "operational_epsilon"],
            |t| {
                Ok(vec![
                    mean_abs_z(t, &spec)?,
                    average_state_purity(t, &spec)?,
                    operational_epsilon(t)?,
                ])
            },
        )?,
        Quantity::FpSurvival => {
            let z = threshold_z(a.epsilon)?;
            let curve = fokker_planck_survival(a.z0, &FPGrid::new(a.grid_nodes, z, a.pde_dt)?)?;
            manifest.insert("fp_mean_fpt", curve.mean_fpt);
            manifest.insert("fp_tail_correction", curve.tail_correction);
            manifest.insert("fp_start_node", curve.start_node);
            manifest.insert("exact_mean_fpt", mean_fpt_exact(curve.start_node, z)?);
            tabulate(&xs, [var, "survival"], |t| {
                if !(t >= 0.0) {
                    return Err(invalid("t", format!("need t >= 0, got {t}")));
                }
                Ok(vec![interpolate(&curve.times, &curve.survival, t)])
            })?
        }
    };
    out.add(format!("analytic_{}.csv", a.quantity.name()), table);
    Ok(())
}

fn tabulate<const N: usize>(
    xs: &[f64],
    header: [&str; N],
    f: impl Fn(f64) -> Result<Vec<f64>>,
) -> Result<Table> {
    let mut table = Table::new(header);
    for &x in xs {
        let mut row = vec![Cell::Num(x)];
        row.extend(f(x)?.into_iter().map(Cell::Num));
        table.push(row)?;
    }
    Ok(table)
}

/// Linear interpolation on an increasing grid; zero past its end (survival has decayed).
fn interpolate(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let i = xs.partition_point(|&v| v <= x);
    if i == 0 {
        return ys[0];
    }
    if i == xs.len() {
        return if x == xs[i - 1] { ys[i - 1] } else { 0.0 };
    }
    let (x0, x1, y0, y1) = (xs[i - 1], xs[i], ys[i - 1], ys[i]);
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}
