//! Survival probability of |z| < Z from the Fokker–Planck equation
//! ∂ₜ℘ = ∂²_z [2(1 - z²)² ℘] with absorbing walls at ±Z.
//!
//! The equation is discretised in conservative form on a uniform grid and
//! stepped with backward Euler. The time integral of the survival curve is
//! then independent of the PDE time step: Σₙ Δt Gₙ telescopes to 1ᵀ(-A)⁻¹ m₀.

use crate::error::{invalid, Error, Result};

/// Grid for [`fokker_planck_survival`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FPGrid {
    /// Interior nodes; the walls at ±Z carry zero density.
    pub n_interior: usize,
    /// Absorbing boundary Z, strictly below 1.
    pub boundary: f64,
    /// PDE time step.
    pub dt: f64,
    /// Integration stops once the survival probability drops below this.
    pub stop_threshold: f64,
    pub max_steps: usize,
}

impl FPGrid {
    pub fn new(n_interior: usize, boundary: f64, dt: f64) -> Result<Self> {
        let grid = Self {
            n_interior,
            boundary,
            dt,
            stop_threshold: 1e-8,
            max_steps: 50_000_000,
        };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_interior < 3 {
            return Err(invalid("n_interior", "need at least 3 interior nodes"));
        }
        if !(self.boundary > 0.0 && self.boundary < 1.0) {
            return Err(invalid("Z", format!("boundary must lie in (0, 1), got {}", self.boundary)));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(invalid("dt", format!("PDE step must be > 0, got {}", self.dt)));
        }
        if !(self.stop_threshold > 0.0 && self.stop_threshold < 1.0) {
            return Err(invalid("stop_threshold", "must lie in (0, 1)"));
        }
        Ok(())
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.boundary / (self.n_interior + 1) as f64
    }

    pub fn node(&self, i: usize) -> f64 {
        // integer numerator keeps the grid exactly symmetric about 0
        let k = 2 * (i as i64 + 1) - (self.n_interior as i64 + 1);
        self.boundary * k as f64 / (self.n_interior + 1) as f64
    }

    fn nearest_node(&self, z: f64) -> usize {
        let idx = ((z + self.boundary) / self.spacing()).round() as isize - 1;
        idx.clamp(0, self.n_interior as isize - 1) as usize
    }
}

/// Output of [`fokker_planck_survival`].
#[derive(Debug, Clone, PartialEq)]
pub struct SurvivalCurve {
    /// tₙ = n Δt, starting at 0.
    pub times: Vec<f64>,
    /// G(tₙ | z₀).
    pub survival: Vec<f64>,
    /// ∫₀^∞ G dt, including the tail correction.
    pub mean_fpt: f64,
    /// Geometric estimate of the integral beyond the last step.
    pub tail_correction: f64,
    /// Grid node that carried the initial mass.
    pub start_node: f64,
}

/// Pre-factored tridiagonal system for (I - Δt A) m' = m.
struct Implicit {
    lower: Vec<f64>,
    upper_mod: Vec<f64>,
    inv_pivot: Vec<f64>,
}

impl Implicit {
    fn new(grid: &FPGrid) -> Self {
        let n = grid.n_interior;
        let h = grid.spacing();
        let r = grid.dt / (h * h);
        let diffusion: Vec<f64> = (0..n)
            .map(|i| {
                let z = grid.node(i);
                2.0 * (1.0 - z * z).powi(2)
            })
            .collect();
        let lower: Vec<f64> = (0..n).map(|i| if i == 0 { 0.0 } else { -r * diffusion[i - 1] }).collect();
        let diag: Vec<f64> = diffusion.iter().map(|d| 1.0 + 2.0 * r * d).collect();
        let upper: Vec<f64> = (0..n).map(|i| if i + 1 == n { 0.0 } else { -r * diffusion[i + 1] }).collect();

        let mut upper_mod = vec![0.0; n];
        let mut inv_pivot = vec![0.0; n];
        let mut prev_upper = 0.0;
        for i in 0..n {
            let pivot = diag[i] - lower[i] * prev_upper;
            inv_pivot[i] = 1.0 / pivot;
            upper_mod[i] = upper[i] * inv_pivot[i];
            prev_upper = upper_mod[i];
        }
        Self {
            lower,
            upper_mod,
            inv_pivot,
        }
    }

    fn solve_in_place(&self, m: &mut [f64]) {
        let n = m.len();
        let mut prev = 0.0;
        for ((v, l), p) in m.iter_mut().zip(&self.lower).zip(&self.inv_pivot) {
            *v = (*v - l * prev) * p;
            prev = *v;
        }
        for i in (0..n - 1).rev() {
            m[i] -= self.upper_mod[i] * m[i + 1];
        }
    }
}

/// Solves for the survival probability of a walker started at `z0`, with the
/// initial delta placed as unit mass on the nearest grid node.
pub fn fokker_planck_survival(z0: f64, grid: &FPGrid) -> Result<SurvivalCurve> {
    grid.validate()?;
    if !(z0.abs() < grid.boundary) {
        return Err(invalid("z0", format!("need |z0| < Z = {}, got {z0}", grid.boundary)));
    }
    let n = grid.n_interior;
    let system = Implicit::new(grid);
    let start = grid.nearest_node(z0);
    let mut mass = vec![0.0; n];
    mass[start] = 1.0;

    let mut times = vec![0.0];
    let mut survival = vec![1.0];
    let mut integral = 0.0;
    let decade_mark = grid.stop_threshold * 10.0;
    let mut decade_start: Option<usize> = None;

    for step in 1..=grid.max_steps {
        system.solve_in_place(&mut mass);
        let g: f64 = mass.iter().sum();
        if let Some((node, &value)) = mass
            .iter()
            .enumerate()
            .find(|(_, &v)| v < -1e-12 * g.abs().max(1e-300) || !v.is_finite())
        {
            return Err(Error::Unstable {
                step,
                time: step as f64 * grid.dt,
                node,
                value,
            });
        }
        integral += grid.dt * g;
        times.push(step as f64 * grid.dt);
        survival.push(g);
        if decade_start.is_none() && g < decade_mark {
            decade_start = Some(step);
        }
        if g < grid.stop_threshold {
            let from = decade_start.unwrap_or(step - 1).min(step - 1);
            let ratio = (g / survival[from]).powf(1.0 / (step - from) as f64);
            let tail = if ratio < 1.0 {
                grid.dt * g * ratio / (1.0 - ratio)
            } else {
                0.0
            };
            return Ok(SurvivalCurve {
                times,
                survival,
                mean_fpt: integral + tail,
                tail_correction: tail,
                start_node: grid.node(start),
            });
        }
    }
    Err(Error::SurvivalNotConverged {
        steps: grid.max_steps,
        threshold: grid.stop_threshold,
        survival: *survival.last().unwrap_or(&1.0),
    })
}
