use crate::bloch::{linear_entropy, AxisState, BlochState};
use crate::error::Result;
use crate::protocols::{ideal_feedback_entropy_step, simulated_jacobs_step, FeedbackModel, ProtocolKind};

/// Per-trajectory state in the representation best suited to each protocol.
#[derive(Debug, Clone, Copy)]
pub(crate) enum Walker {
    /// No feedback: on the z axis, stored relative to the nearest pole.
    Axis(AxisState),
    /// Ideal feedback: on the +x axis, only the linear entropy evolves.
    Ideal { entropy: f64 },
    /// Feedback applied after each Euler–Maruyama step.
    Sampled(BlochState),
}

impl Walker {
    pub(crate) fn start(protocol: ProtocolKind, feedback: FeedbackModel, z0: f64) -> Result<Self> {
        Ok(match (protocol, feedback) {
            (ProtocolKind::NoFeedback, _) => Walker::Axis(AxisState::from_z(z0)?),
            (ProtocolKind::JacobsFeedback, FeedbackModel::Ideal) => Walker::Ideal {
                entropy: linear_entropy(BlochState::new(0.0, z0)?),
            },
            (ProtocolKind::JacobsFeedback, FeedbackModel::Sampled) => {
                Walker::Sampled(BlochState::new(z0.abs(), 0.0)?)
            }
        })
    }

    pub(crate) fn advance(&mut self, dt: f64, dw: f64) -> Result<()> {
        match self {
            Walker::Axis(a) => a.step(dw),
            Walker::Ideal { entropy } => *entropy = ideal_feedback_entropy_step(*entropy, dt)?,
            Walker::Sampled(s) => *s = simulated_jacobs_step(*s, dt, dw)?,
        }
        Ok(())
    }

    pub(crate) fn linear_entropy(&self) -> f64 {
        match self {
            Walker::Axis(a) => a.linear_entropy(),
            Walker::Ideal { entropy } => *entropy,
            Walker::Sampled(s) => linear_entropy(*s),
        }
    }

    pub(crate) fn bloch(&self) -> BlochState {
        match self {
            Walker::Axis(a) => a.to_bloch(),
            Walker::Ideal { entropy } => BlochState::clamped((1.0 - 2.0 * entropy).sqrt(), 0.0),
            Walker::Sampled(s) => *s,
        }
    }

    /// Sign of z for on-axis walkers.
    pub(crate) fn pole(&self) -> Option<i8> {
        match self {
            Walker::Axis(a) => Some(if a.sign() < 0.0 { -1 } else { 1 }),
            _ => None,
        }
    }

    pub(crate) fn axis(&self) -> Option<&AxisState> {
        match self {
            Walker::Axis(a) => Some(a),
            _ => None,
        }
    }
}
