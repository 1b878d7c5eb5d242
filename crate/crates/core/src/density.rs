//! Full 2×2 density-matrix integrator for the stochastic master equation
//!
//! ```text
//! dρ = dt D[σ_z]ρ + dW H[σ_z]ρ
//! ```
//!
//! It keeps complex arithmetic throughout and shares no code with
//! [`crate::bloch`], so it can serve as a cross-check of the Bloch-plane
//! integrator.

use num_complex::Complex64;

use crate::bloch::BlochState;
use crate::error::{invalid, Result};

type Mat2 = [[Complex64; 2]; 2];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

const SIGMA_X: Mat2 = [[ZERO, ONE], [ONE, ZERO]];
const SIGMA_Z: Mat2 = [[ONE, ZERO], [ZERO, Complex64::new(-1.0, 0.0)]];

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn trace(a: &Mat2) -> Complex64 {
    a[0][0] + a[1][1]
}

fn axpy(alpha: f64, x: &Mat2, y: &Mat2) -> Mat2 {
    let mut out = *y;
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] += x[i][j] * alpha;
        }
    }
    out
}

/// A qubit density matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix {
    m: Mat2,
}

impl DensityMatrix {
    /// Tolerance for the Hermiticity, trace and positivity checks in [`DensityMatrix::new`].
    pub const TOLERANCE: f64 = 1e-10;

    pub fn new(entries: [[Complex64; 2]; 2]) -> Result<Self> {
        let rho = Self { m: entries };
        if entries.iter().flatten().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(invalid("rho", "non-finite entry"));
        }
        if (entries[1][0] - entries[0][1].conj()).norm() > Self::TOLERANCE
            || entries[0][0].im.abs() > Self::TOLERANCE
            || entries[1][1].im.abs() > Self::TOLERANCE
        {
            return Err(invalid("rho", "matrix is not Hermitian"));
        }
        if (rho.trace() - ONE).norm() > Self::TOLERANCE {
            return Err(invalid("rho", format!("trace {} differs from 1", rho.trace())));
        }
        if rho.determinant() < -Self::TOLERANCE || entries[0][0].re < -Self::TOLERANCE {
            return Err(invalid("rho", "matrix is not positive semidefinite"));
        }
        Ok(rho)
    }

    pub fn maximally_mixed() -> Self {
        Self {
            m: [[Complex64::new(0.5, 0.0), ZERO], [ZERO, Complex64::new(0.5, 0.0)]],
        }
    }

    pub fn diagonal(p0: f64) -> Result<Self> {
        Self::new([[Complex64::new(p0, 0.0), ZERO], [ZERO, Complex64::new(1.0 - p0, 0.0)]])
    }

    /// ρ = (I + x σ_x + z σ_z)/2.
    pub fn from_bloch(state: BlochState) -> Self {
        let (x, z) = (state.x(), state.z());
        let half = Complex64::new(0.5, 0.0);
        let m = axpy(
            0.5 * x,
            &SIGMA_X,
            &axpy(0.5 * z, &SIGMA_Z, &[[half, ZERO], [ZERO, half]]),
        );
        Self { m }
    }

    /// Inverse of [`DensityMatrix::from_bloch`]: x = Tr[σ_x ρ], z = Tr[σ_z ρ].
    pub fn to_bloch(&self) -> Result<BlochState> {
        BlochState::new(self.expectation(&SIGMA_X), self.expectation(&SIGMA_Z))
    }

    pub fn entries(&self) -> &[[Complex64; 2]; 2] {
        &self.m
    }

    pub fn trace(&self) -> Complex64 {
        trace(&self.m)
    }

    pub fn determinant(&self) -> f64 {
        (self.m[0][0] * self.m[1][1] - self.m[0][1] * self.m[1][0]).re
    }

    /// Tr[ρ²].
    pub fn purity(&self) -> f64 {
        trace(&mul(&self.m, &self.m)).re
    }

    pub fn is_hermitian(&self) -> bool {
        self.m[1][0] == self.m[0][1].conj() && self.m[0][0].im == 0.0 && self.m[1][1].im == 0.0
    }

    fn expectation(&self, op: &Mat2) -> f64 {
        trace(&mul(op, &self.m)).re
    }

    /// Clips a negative eigenvalue to zero and renormalises the trace.
    fn project_positive(self) -> Self {
        if self.determinant() >= 0.0 {
            return self;
        }
        let tr = self.trace().re;
        let a = self.m[0][0].re;
        let d = self.m[1][1].re;
        let half_gap = (0.25 * (a - d) * (a - d) + self.m[0][1].norm_sqr()).sqrt();
        let lambda_plus = 0.5 * tr + half_gap;
        let lambda_minus = 0.5 * tr - half_gap;
        // projector onto the positive eigenvector: (ρ - λ₋ I)/(λ₊ - λ₋)
        let scale = 1.0 / (lambda_plus - lambda_minus);
        let mut m = self.m;
        m[0][0] = (m[0][0] - lambda_minus) * scale;
        m[1][1] = (m[1][1] - lambda_minus) * scale;
        m[0][1] *= scale;
        m[1][0] *= scale;
        Self { m }
    }
}

/// D[σ_z]ρ = σ_z ρ σ_z - ρ.
pub fn dissipator(rho: &DensityMatrix) -> [[Complex64; 2]; 2] {
    let sandwiched = mul(&mul(&SIGMA_Z, &rho.m), &SIGMA_Z);
    axpy(-1.0, &rho.m, &sandwiched)
}

/// H[σ_z]ρ = σ_z ρ + ρ σ_z - 2 Tr[σ_z ρ] ρ.
pub fn innovation_term(rho: &DensityMatrix) -> [[Complex64; 2]; 2] {
    let left = mul(&SIGMA_Z, &rho.m);
    let right = mul(&rho.m, &SIGMA_Z);
    let mean = trace(&left).re;
    let mut out = [[ZERO; 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = left[i][j] + right[i][j] - rho.m[i][j] * (2.0 * mean);
        }
    }
    out
}

/// One Euler–Maruyama step ρ + dt D[σ_z]ρ + dW H[σ_z]ρ, followed by
/// Hermitian symmetrisation and a positivity projection when the step
/// produced a negative eigenvalue.
pub fn sme_step(rho: &DensityMatrix, dt: f64, dw: f64) -> Result<DensityMatrix> {
    if !(dt.is_finite() && dt >= 0.0) {
        return Err(invalid("dt", format!("step size must be finite and >= 0, got {dt}")));
    }
    if !dw.is_finite() {
        return Err(invalid("dW", format!("Wiener increment must be finite, got {dw}")));
    }
    let mut m = axpy(dw, &innovation_term(rho), &axpy(dt, &dissipator(rho), &rho.m));
    m[0][0].im = 0.0;
    m[1][1].im = 0.0;
    m[1][0] = m[0][1].conj();
    Ok(DensityMatrix { m }.project_positive())
}
