//! Adaptive Gauss–Kronrod (7/15) quadrature with global error control.

#![allow(clippy::excessive_precision)]

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{invalid, Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

// Gauss weights at XGK[1], XGK[3], XGK[5], XGK[7]
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and truncation policy for the improper integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Smallest half-width used when truncating an integral over the real line.
    pub min_half_width: f64,
    /// Gaussian widths kept beyond the centre of a Gaussian-like integrand.
    pub gaussian_sigmas: f64,
    pub max_intervals: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-13,
            rel_tol: 1e-11,
            min_half_width: 25.0,
            gaussian_sigmas: 12.0,
            max_intervals: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0 && self.rel_tol > 0.0) {
            return Err(invalid("quadrature", "tolerances must be > 0"));
        }
        if !(self.min_half_width > 0.0 && self.gaussian_sigmas > 0.0) {
            return Err(invalid("quadrature", "truncation widths must be > 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
    pub intervals: usize,
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(centre - dx) + f(centre + dx);
        kron += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kron * half,
        error: ((kron - gauss) * half).abs(),
    }
}

/// Integrates `f` over the finite interval [a, b], starting from `initial_panels`
/// equal panels and repeatedly bisecting the panel with the largest error.
pub fn integrate<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    initial_panels: usize,
    spec: &QuadratureSpec,
) -> Result<QuadResult> {
    spec.validate()?;
    if !(a.is_finite() && b.is_finite()) || a > b {
        return Err(invalid("interval", format!("need finite a <= b, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
            intervals: 0,
        });
    }
    let n0 = initial_panels.max(1);
    let width = (b - a) / n0 as f64;
    let mut heap = BinaryHeap::with_capacity(2 * n0);
    for i in 0..n0 {
        let lo = a + width * i as f64;
        let hi = if i + 1 == n0 { b } else { a + width * (i + 1) as f64 };
        heap.push(kronrod(&f, lo, hi));
    }
    loop {
        let value: f64 = heap.iter().map(|p| p.value).sum();
        let error: f64 = heap.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Quadrature {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if error <= spec.abs_tol.max(spec.rel_tol * value.abs()) {
            return Ok(QuadResult {
                value,
                error,
                intervals: heap.len(),
            });
        }
        if heap.len() >= spec.max_intervals {
            return Err(Error::Quadrature {
                value,
                error,
                intervals: heap.len(),
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // cannot bisect further in floating point
            return Err(Error::Quadrature {
                value,
                error,
                intervals: heap.len() + 1,
            });
        }
        heap.push(kronrod(&f, worst.a, mid));
        heap.push(kronrod(&f, mid, worst.b));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn weights_sum_to_interval_length() {
        let r = integrate(|_| 1.0, -1.0, 1.0, 1, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-15);
    }

    #[test]
    fn exact_for_low_degree_polynomials() {
        // K15 is exact to degree 22 on a single panel
        let r = integrate(|x: f64| x.powi(20), 0.0, 1.0, 1, &QuadratureSpec::default()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0 / 21.0, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_integral() {
        let spec = QuadratureSpec::default();
        let r = integrate(|x: f64| (-x * x).exp(), -30.0, 30.0, 8, &spec).unwrap();
        assert_abs_diff_eq!(r.value, std::f64::consts::PI.sqrt(), epsilon = 1e-13);
    }

    #[test]
    fn endpoint_singularity_converges() {
        let spec = QuadratureSpec {
            abs_tol: 1e-10,
            rel_tol: 1e-10,
            ..Default::default()
        };
        let r = integrate(|x: f64| 1.0 / x.sqrt(), 0.0, 1.0, 1, &spec).unwrap();
        assert_abs_diff_eq!(r.value, 2.0, epsilon = 1e-9);
    }

    #[test]
    fn reports_non_convergence() {
        let spec = QuadratureSpec {
            max_intervals: 3,
            ..Default::default()
        };
        let err = integrate(|x: f64| (50.0 * x).sin().abs(), 0.0, 10.0, 1, &spec).unwrap_err();
        assert!(matches!(err, Error::Quadrature { .. }));
    }

    #[test]
    fn rejects_reversed_interval() {
        assert!(integrate(|x| x, 1.0, 0.0, 1, &QuadratureSpec::default()).is_err());
    }
}
