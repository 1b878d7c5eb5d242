//! Bloch-plane representation of the monitored qubit and the Itô update rules
//! for continuous measurement of σ_z.
//!
//! Units follow the convention where the measurement strength is 1/2, so the
//! conditional dynamics read
//!
//! ```text
//! dz = 2 (1 - z²) dW
//! dx = -2 x dt - 2 z x dW
//! ```
//!
//! with y = 0 throughout.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Error, Result};

/// Slack allowed on x² + z² ≤ 1 when constructing a state from user input.
const DISC_TOLERANCE: f64 = 1e-12;

/// Conditional qubit state as a point (x, z) in the Bloch disc.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochState {
    x: f64,
    z: f64,
}

impl BlochState {
    pub const MAXIMALLY_MIXED: BlochState = BlochState { x: 0.0, z: 0.0 };

    pub fn new(x: f64, z: f64) -> Result<Self> {
        if !x.is_finite() || !z.is_finite() || x * x + z * z > 1.0 + DISC_TOLERANCE {
            return Err(Error::OutsideBlochDisc { x, z });
        }
        Ok(Self { x, z })
    }

    /// Builds a state, projecting it radially onto the unit circle when it lies outside.
    pub(crate) fn clamped(x: f64, z: f64) -> Self {
        let r2 = x * x + z * z;
        if r2 > 1.0 {
            let r = r2.sqrt();
            Self { x: x / r, z: z / r }
        } else {
            Self { x, z }
        }
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn z(&self) -> f64 {
        self.z
    }

    /// Squared length of the Bloch vector.
    pub fn radius_squared(&self) -> f64 {
        self.x * self.x + self.z * self.z
    }

    /// Tr[ρ²] = (1 + x² + z²)/2.
    pub fn purity(&self) -> f64 {
        purity(*self)
    }

    pub fn linear_entropy(&self) -> f64 {
        linear_entropy(*self)
    }
}

impl Default for BlochState {
    fn default() -> Self {
        Self::MAXIMALLY_MIXED
    }
}

/// Integrator time step. Always strictly positive.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct StepSize(f64);

impl StepSize {
    pub fn new(dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(invalid("dt", format!("step size must be finite and > 0, got {dt}")));
        }
        Ok(Self(dt))
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

/// Wiener increment over one step: a centred Gaussian with variance dt.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WienerIncrement(f64);

impl WienerIncrement {
    pub fn sample<R: Rng + ?Sized>(rng: &mut R, dt: StepSize) -> Self {
        let n: f64 = rng.sample(StandardNormal);
        Self(n * dt.get().sqrt())
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

pub fn purity(state: BlochState) -> f64 {
    (0.5 * (1.0 + state.radius_squared())).min(1.0)
}

/// s = 1 - p.
pub fn linear_entropy(state: BlochState) -> f64 {
    (0.5 * (1.0 - state.radius_squared())).max(0.0)
}

fn check_step(dt: f64, dw: f64) -> Result<()> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(invalid("dt", format!("step size must be finite and >= 0, got {dt}")));
    }
    if !dw.is_finite() {
        return Err(invalid("dW", format!("Wiener increment must be finite, got {dw}")));
    }
    Ok(())
}

/// One Euler–Maruyama step of the conditional Bloch dynamics.
///
/// A zero `dt` is accepted and leaves only the innovation term. Steps that
/// leave the disc are projected back onto the unit circle.
pub fn ito_step(state: BlochState, dt: f64, dw: f64) -> Result<BlochState> {
    check_step(dt, dw)?;
    let BlochState { x, z } = state;
    let z_next = z + 2.0 * (1.0 - z * z) * dw;
    let x_next = x - 2.0 * x * dt - 2.0 * z * x * dw;
    Ok(BlochState::clamped(x_next, z_next))
}

/// Drift coefficient of d ln s, namely -4 (2s + x² + 2z²).
pub fn log_entropy_drift(state: BlochState) -> Result<f64> {
    let s = linear_entropy(state);
    if s <= 0.0 {
        return Err(Error::PureState);
    }
    let BlochState { x, z } = state;
    Ok(-4.0 * (2.0 * s + x * x + 2.0 * z * z))
}

/// State on the measurement axis (x = 0) stored as the sign of z and the
/// distance `gap = 1 - |z|` to the nearest pole.
///
/// Linear entropies far below machine epsilon stay resolvable because
/// s = gap (2 - gap) / 2 never forms 1 - z² explicitly. The update is the same
/// Euler–Maruyama step as [`ito_step`], rewritten in the gap coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisState {
    sign: f64,
    gap: f64,
}

impl AxisState {
    pub fn from_z(z: f64) -> Result<Self> {
        if !z.is_finite() || z.abs() > 1.0 {
            return Err(Error::OutsideBlochDisc { x: 0.0, z });
        }
        Ok(Self {
            sign: if z < 0.0 { -1.0 } else { 1.0 },
            gap: 1.0 - z.abs(),
        })
    }

    pub fn z(&self) -> f64 {
        self.sign * (1.0 - self.gap)
    }

    pub fn sign(&self) -> f64 {
        self.sign
    }

    pub fn gap(&self) -> f64 {
        self.gap
    }

    pub fn linear_entropy(&self) -> f64 {
        0.5 * self.gap * (2.0 - self.gap)
    }

    pub fn purity(&self) -> f64 {
        1.0 - self.linear_entropy()
    }

    /// artanh |z|, the coordinate in which the diffusion coefficient is constant (= 4).
    pub fn artanh_abs_z(&self) -> f64 {
        0.5 * ((2.0 - self.gap) / self.gap).ln()
    }

    pub fn to_bloch(&self) -> BlochState {
        BlochState {
            x: 0.0,
            z: self.z(),
        }
    }

    pub fn step(&mut self, dw: f64) {
        let g = self.gap;
        let mut next = g - 2.0 * self.sign * g * (2.0 - g) * dw;
        if next < 0.0 {
            next = 0.0;
        } else if next > 1.0 {
            // crossed z = 0
            self.sign = -self.sign;
            next = (2.0 - next).max(0.0);
        }
        self.gap = next;
    }
}
