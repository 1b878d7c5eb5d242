//! The two purification strategies: leave the Bloch vector on the measurement
//! axis, or rotate it onto the +x axis after every measurement increment.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::bloch::{ito_step, linear_entropy, BlochState};
use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolKind {
    /// No control; the state stays on the z axis when started there.
    #[serde(rename = "none")]
    NoFeedback,
    /// Hamiltonian feedback keeping the Bloch vector on the +x axis.
    #[serde(rename = "jacobs")]
    JacobsFeedback,
}

impl ProtocolKind {
    pub fn name(self) -> &'static str {
        match self {
            ProtocolKind::NoFeedback => "none",
            ProtocolKind::JacobsFeedback => "jacobs",
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtocolKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(ProtocolKind::NoFeedback),
            "jacobs" => Ok(ProtocolKind::JacobsFeedback),
            other => Err(invalid("protocol", format!("expected `none` or `jacobs`, got `{other}`"))),
        }
    }
}

/// How the feedback rotation is discretised in time.
///
/// `Ideal` integrates the closed-loop dynamics of continuous feedback, in
/// which the innovation only enters through its Itô correction and the
/// linear entropy obeys ds = -4 s dt. `Sampled` applies the rotation after each
/// Euler–Maruyama step ([`simulated_jacobs_step`]); its linear entropy carries
/// an O(dt) random error per step, which accumulates to an absolute spread of
/// order sqrt(t dt).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeedbackModel {
    #[default]
    Ideal,
    Sampled,
}

impl fmt::Display for FeedbackModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeedbackModel::Ideal => "ideal",
            FeedbackModel::Sampled => "sampled",
        })
    }
}

impl FromStr for FeedbackModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ideal" => Ok(FeedbackModel::Ideal),
            "sampled" => Ok(FeedbackModel::Sampled),
            other => Err(invalid("feedback", format!("expected `ideal` or `sampled`, got `{other}`"))),
        }
    }
}

/// Control map applied after each integrator step.
pub fn apply_control(kind: ProtocolKind, state: BlochState) -> BlochState {
    match kind {
        ProtocolKind::NoFeedback => state,
        ProtocolKind::JacobsFeedback => BlochState::clamped(state.radius_squared().sqrt(), 0.0),
    }
}

/// Purity under ideal feedback from the maximally mixed state: 1 - e^{-4t}/2.
pub fn jacobs_purity(t: f64) -> Result<f64> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t", format!("time must be finite and >= 0, got {t}")));
    }
    Ok(1.0 - 0.5 * (-4.0 * t).exp())
}

/// Measurement step followed by the rotation onto the +x axis.
pub fn simulated_jacobs_step(state: BlochState, dt: f64, dw: f64) -> Result<BlochState> {
    Ok(apply_control(ProtocolKind::JacobsFeedback, ito_step(state, dt, dw)?))
}

/// Closed-loop linear-entropy update under continuous feedback, s (1 - 4 dt).
pub fn ideal_feedback_entropy_step(s: f64, dt: f64) -> Result<f64> {
    if !(dt.is_finite() && (0.0..0.25).contains(&dt)) {
        return Err(invalid("dt", format!("closed-loop step needs 0 <= dt < 1/4, got {dt}")));
    }
    Ok(s * (1.0 - 4.0 * dt))
}

/// Closed-loop step of the ideal feedback protocol: rotate onto the +x axis,
/// then advance the Bloch length by d(x²) = 4 (1 - x²) dt.
pub fn ideal_feedback_step(state: BlochState, dt: f64) -> Result<BlochState> {
    let s = ideal_feedback_entropy_step(linear_entropy(state), dt)?;
    Ok(BlochState::clamped((1.0 - 2.0 * s).sqrt(), 0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bloch::{purity, StepSize, WienerIncrement};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn st(x: f64, z: f64) -> BlochState {
        BlochState::new(x, z).unwrap()
    }

    #[test]
    fn apply_control_examples() {
        assert_eq!(apply_control(ProtocolKind::NoFeedback, st(0.0, 0.3)), st(0.0, 0.3));
        let r = apply_control(ProtocolKind::JacobsFeedback, st(0.3, 0.4));
        assert_abs_diff_eq!(r.x(), 0.5, epsilon = 1e-15);
        assert_eq!(r.z(), 0.0);
    }

    #[test]
    fn protocol_names_roundtrip() {
        for kind in [ProtocolKind::NoFeedback, ProtocolKind::JacobsFeedback] {
            assert_eq!(kind.name().parse::<ProtocolKind>().unwrap(), kind);
        }
        assert!("feedback".parse::<ProtocolKind>().is_err());
        assert_eq!("sampled".parse::<FeedbackModel>().unwrap(), FeedbackModel::Sampled);
    }

    #[test]
    fn jacobs_purity_examples() {
        assert_eq!(jacobs_purity(0.0).unwrap(), 0.5);
        assert_abs_diff_eq!(jacobs_purity(2f64.ln() / 4.0).unwrap(), 0.75, epsilon = 1e-15);
        let s = 1.0 - jacobs_purity(3.2806).unwrap();
        assert!((s / 1e-6 - 1.0).abs() < 1e-4, "s = {s}");
        assert!(jacobs_purity(-0.1).is_err());
    }

    #[test]
    fn deterministic_step_without_noise() {
        let dt = 1e-3;
        let next = simulated_jacobs_step(st(0.8, 0.0), dt, 0.0).unwrap();
        assert_abs_diff_eq!(next.x(), 0.8 * (1.0 - 2.0 * dt), epsilon = 1e-15);
        assert_eq!(next.z(), 0.0);
        // with no measurement kick only the dephasing drift acts: s grows
        assert!(linear_entropy(next) > linear_entropy(st(0.8, 0.0)));
    }

    #[test]
    fn ideal_step_contracts_entropy_at_rate_four() {
        let dt = 1e-4;
        let mut state = BlochState::MAXIMALLY_MIXED;
        for _ in 0..10_000 {
            state = ideal_feedback_step(state, dt).unwrap();
            assert_eq!(state.z(), 0.0);
        }
        let expected = 0.5 * (-4.0f64).exp();
        assert!((linear_entropy(state) / expected - 1.0).abs() < 1e-3);
        assert!(ideal_feedback_entropy_step(0.1, 0.3).is_err());
    }

    fn sampled_ensemble(dt: f64, t: f64, n: usize, seed: u64) -> (f64, f64, f64) {
        let step = StepSize::new(dt).unwrap();
        let steps = (t / dt).round() as usize;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut s_values = Vec::with_capacity(n);
        let mut purity_gain = 0.0;
        for _ in 0..n {
            let mut state = BlochState::MAXIMALLY_MIXED;
            for k in 0..steps {
                let dw = WienerIncrement::sample(&mut rng, step).get();
                let next = simulated_jacobs_step(state, dt, dw).unwrap();
                if k == 0 {
                    purity_gain += purity(next) - purity(state);
                }
                state = next;
            }
            s_values.push(linear_entropy(state));
        }
        let mean = s_values.iter().sum::<f64>() / n as f64;
        let var = s_values.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var.sqrt(), purity_gain / n as f64)
    }

    #[test]
    fn sampled_feedback_contracts_in_mean() {
        let t = 0.25;
        let (mean, sd, gain) = sampled_ensemble(1e-4, t, 400, 9);
        let expected = 0.5 * (-4.0 * t).exp();
        let se = sd / 20.0;
        assert!((mean - expected).abs() < 4.0 * se + 1e-4, "mean {mean} vs {expected}");
        assert!(gain > 0.0);
    }

    #[test]
    fn sampled_feedback_spread_shrinks_with_dt() {
        let (_, coarse, _) = sampled_ensemble(1e-3, 0.25, 400, 1);
        let (_, fine, _) = sampled_ensemble(1e-4, 0.25, 400, 2);
        // spread scales like sqrt(dt)
        assert!(coarse / fine > 2.0, "coarse {coarse} fine {fine}");
    }

    proptest! {
        #[test]
        fn control_preserves_purity(th in 0.0..std::f64::consts::TAU, r in 0.0f64..=1.0) {
            let s = st(r * th.cos(), r * th.sin());
            for kind in [ProtocolKind::NoFeedback, ProtocolKind::JacobsFeedback] {
                let out = apply_control(kind, s);
                prop_assert!((purity(out) - purity(s)).abs() < 1e-15);
            }
            prop_assert_eq!(apply_control(ProtocolKind::JacobsFeedback, s).z(), 0.0);
        }

        #[test]
        fn no_feedback_keeps_x_zero(z0 in -1.0f64..=1.0, dw in -0.2f64..0.2, dt in 0.0f64..1e-3) {
            let s = apply_control(ProtocolKind::NoFeedback, ito_step(st(0.0, z0), dt, dw).unwrap());
            prop_assert_eq!(s.x(), 0.0);
        }
    }
}
