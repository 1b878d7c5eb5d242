//! Closed-form results for the two protocols, and the quadratures and root
//! searches needed where the results are left as integrals.

use std::f64::consts::{LN_10, PI};

use crate::analytics::quadrature::{integrate, QuadratureSpec};
use crate::analytics::roots::{bisect, TIME_BRACKET};
use crate::error::{invalid, Result};

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t > 0.0) {
        return Err(invalid("t", format!("time must be finite and > 0, got {t}")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(invalid("epsilon", format!("target infidelity must lie in (0, 1/2), got {eps}")));
    }
    Ok(())
}

/// ln cosh x without overflow.
fn ln_cosh(x: f64) -> f64 {
    let a = x.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// 1/cosh x without overflow.
fn sech(x: f64) -> f64 {
    let e = (-x.abs()).exp();
    2.0 * e / (1.0 + e * e)
}

/// artanh(√(1 - 2s)) for s in (0, 1/2], accurate for tiny s.
fn artanh_sqrt_one_minus_2s(s: f64) -> f64 {
    let y = (1.0 - 2.0 * s).sqrt();
    let one_minus_y = 2.0 * s / (1.0 + y);
    0.5 * ((1.0 + y) / one_minus_y).ln()
}

/// Threshold |z| at which the purity reaches 1 - ε: Z = √(1 - 2ε).
pub fn threshold_z(eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    Ok((1.0 - 2.0 * eps).sqrt())
}

/// z = tanh(2q) for the linear-trajectory variable q.
pub fn z_of_q(q: f64) -> f64 {
    (2.0 * q).tanh()
}

/// Density of the linear-trajectory variable q at time t (start maximally mixed):
/// e^{-2t} cosh(2q) e^{-q²/2t} / √(2πt).
pub fn wp_q(q: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let log = -2.0 * t + ln_cosh(2.0 * q) - q * q / (2.0 * t) - 0.5 * (2.0 * PI * t).ln();
    Ok(log.exp())
}

/// Half-width beyond which ℘(q) is negligible: its mass sits at ±2t with width √t.
fn wp_q_half_width(t: f64, spec: &QuadratureSpec) -> f64 {
    2.0 * t + spec.gaussian_sigmas * t.sqrt() + 1.0
}

/// ∫ ℘(q) dq over the truncated real line; 1 analytically.
pub fn wp_q_normalization(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let l = wp_q_half_width(t, spec);
    let r = integrate(|q| wp_q(q, t).unwrap_or(f64::NAN), -l, l, 32, spec)?;
    Ok(r.value)
}

/// 1 - p̄(t) = e^{-2t}/√(8πt) ∫ e^{-q²/2t}/cosh(2q) dq.
pub fn mean_infidelity(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let l = spec.min_half_width.max(spec.gaussian_sigmas * t.sqrt());
    let integral = integrate(
        |q| (-q * q / (2.0 * t)).exp() * sech(2.0 * q),
        -l,
        l,
        32,
        spec,
    )?;
    Ok((-2.0 * t).exp() / (8.0 * PI * t).sqrt() * integral.value)
}

/// Average purity p̄(t) of the no-feedback ensemble started maximally mixed.
pub fn mean_purity(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    Ok(1.0 - mean_infidelity(t, spec)?)
}

/// Large-t form of the mean infidelity, π e^{-2t} / (4 √(2πt)).
pub fn epsilon_asymptotic(t: f64) -> Result<f64> {
    check_time(t)?;
    Ok(PI * (-2.0 * t).exp() / (4.0 * (2.0 * PI * t).sqrt()))
}

/// Times at which the no-feedback average purity reaches 1 - ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TauC {
    /// Root of p̄(t) = 1 - ε with p̄ evaluated by quadrature.
    pub exact: f64,
    /// Root of the large-t form `epsilon_asymptotic(t) = ε`.
    pub asymptotic_root: f64,
    /// Leading-order estimate ½ ln(1/ε).
    pub leading_order: f64,
}

const ROOT_TOL: f64 = 1e-12;

/// Root of `epsilon_asymptotic(t) = ε` by bisection.
pub fn tau_c_asymptotic_root(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(invalid("epsilon", format!("need 0 < ε <= 1/2, got {eps}")));
    }
    let target = eps.ln();
    bisect(
        |t| Ok(epsilon_asymptotic(t)?.ln() - target),
        TIME_BRACKET.0,
        TIME_BRACKET.1,
        ROOT_TOL,
    )
}

/// Time for the average purity to reach 1 - ε, together with its asymptotic estimates.
pub fn tau_c(eps: f64, spec: &QuadratureSpec) -> Result<TauC> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(invalid("epsilon", format!("need 0 < ε <= 1/2, got {eps}")));
    }
    let exact = if eps == 0.5 {
        0.0
    } else {
        let target = eps.ln();
        bisect(
            |t| Ok(mean_infidelity(t, spec)?.ln() - target),
            TIME_BRACKET.0,
            TIME_BRACKET.1,
            ROOT_TOL,
        )?
    };
    Ok(TauC {
        exact,
        asymptotic_root: tau_c_asymptotic_root(eps)?,
        leading_order: 0.5 * (1.0 / eps).ln(),
    })
}

/// Mean first-passage time of |z| to Z from z₀: ¼ (Z artanh Z - z₀ artanh z₀).
pub fn mean_fpt_exact(z0: f64, big_z: f64) -> Result<f64> {
    if !(big_z.is_finite() && (0.0..1.0).contains(&big_z)) {
        return Err(invalid("Z", format!("boundary must satisfy 0 <= Z < 1, got {big_z}")));
    }
    if !(z0.abs() <= big_z) {
        return Err(invalid("z0", format!("need |z0| <= Z = {big_z}, got {z0}")));
    }
    Ok(0.25 * (big_z * big_z.atanh() - z0 * z0.atanh()))
}

/// Which logarithm to use in the small-ε estimate of the mean first-passage time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbarVariant {
    /// ⅛ ln(2/ε), from expanding the exact form.
    LnTwoOverEpsilon,
    /// ⅛ ln(1/ε), the cruder form behind the 1.72694 figure value.
    LnOneOverEpsilon,
}

pub fn tbar_c_asymptotic(eps: f64, variant: TbarVariant) -> Result<f64> {
    check_epsilon(eps)?;
    Ok(match variant {
        TbarVariant::LnTwoOverEpsilon => (2.0 / eps).ln() / 8.0,
        TbarVariant::LnOneOverEpsilon => (1.0 / eps).ln() / 8.0,
    })
}

/// Purification time under ideal feedback, -¼ ln 2ε. Zero at ε = 1/2.
pub fn tau_q(eps: f64) -> Result<f64> {
    if !(eps > 0.0 && eps <= 0.5) {
        return Err(invalid("epsilon", format!("need 0 < ε <= 1/2, got {eps}")));
    }
    Ok(-0.25 * (2.0 * eps).ln())
}

/// Density of the purity p under no feedback at time t, for 1/2 < p < 1.
pub fn purity_pdf_classical(p: f64, t: f64) -> Result<f64> {
    if !(p > 0.5 && p < 1.0) {
        return Err(invalid("p", format!("purity must lie in (1/2, 1), got {p}")));
    }
    purity_pdf_classical_s(1.0 - p, t)
}

/// Same density written in terms of s = 1 - p, usable for s far below machine epsilon.
pub fn purity_pdf_classical_s(s: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    if !(s > 0.0 && s < 0.5) {
        return Err(invalid("s", format!("linear entropy must lie in (0, 1/2), got {s}")));
    }
    let a = artanh_sqrt_one_minus_2s(s);
    let log = -2.0 * t - (4.0 * (PI * t).sqrt()).ln() - a * a / (8.0 * t)
        - 0.5 * (3.0 * s.ln() + (1.0 - 2.0 * s).ln());
    Ok(log.exp())
}

/// Density of log₁₀ s under no feedback: ℘_c(s) · s · ln 10.
pub fn log10_entropy_pdf(log10_s: f64, t: f64) -> Result<f64> {
    let s = 10f64.powf(log10_s);
    Ok(purity_pdf_classical_s(s, t)? * s * LN_10)
}

/// Smallest s that carries non-negligible probability at time t.
fn entropy_floor(t: f64, spec: &QuadratureSpec) -> f64 {
    // s ≈ 2 e^{-4|q|}, with |q| concentrated within a few √t of 2t
    let q_max = wp_q_half_width(t, spec);
    (2f64.ln() - 4.0 * q_max).exp().max(f64::MIN_POSITIVE)
}

/// ∫ g(s) ℘_c(s; t) ds over s ∈ [s_lo, s_hi] ⊆ [0, 1/2].
///
/// Below s = 1/4 the integral runs in ln s; above it the substitution
/// w = √(1 - 2s) removes the inverse-square-root endpoint singularity.
pub fn integrate_over_entropy<G: Fn(f64) -> f64>(
    g: G,
    s_lo: f64,
    s_hi: f64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<f64> {
    check_time(t)?;
    if !(0.0 <= s_lo && s_lo <= s_hi && s_hi <= 0.5) {
        return Err(invalid("s", format!("need 0 <= s_lo <= s_hi <= 1/2, got [{s_lo}, {s_hi}]")));
    }
    let lo = s_lo.max(entropy_floor(t, spec));
    let mut total = 0.0;
    let split: f64 = 0.25;
    if lo < split.min(s_hi) {
        let (v0, v1) = (lo.ln(), split.min(s_hi).ln());
        let panels = ((v1 - v0) / 2.0).ceil().max(1.0) as usize;
        total += integrate(
            |v| {
                let s = v.exp();
                g(s) * purity_pdf_classical_s(s, t).unwrap_or(f64::NAN) * s
            },
            v0,
            v1,
            panels,
            spec,
        )?
        .value;
    }
    if s_hi > split {
        let s0 = lo.max(split);
        let (w_lo, w_hi) = ((1.0 - 2.0 * s_hi).max(0.0).sqrt(), (1.0 - 2.0 * s0).sqrt());
        total += integrate(
            |w| {
                let s = 0.5 * (1.0 - w * w);
                g(s) * purity_pdf_classical_s(s, t).unwrap_or(f64::NAN) * w
            },
            w_lo,
            w_hi,
            4,
            spec,
        )?
        .value;
    }
    Ok(total)
}

/// ∫ ℘_c(p; t) dp over (1/2, 1); 1 analytically.
pub fn purity_pdf_normalization(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    integrate_over_entropy(|_| 1.0, 0.0, 0.5, t, spec)
}

/// Probability that log₁₀ s falls in [lo, hi).
pub fn log10_entropy_probability(lo: f64, hi: f64, t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let cap = 0.5f64.log10();
    let (a, b) = (lo.min(cap), hi.min(cap));
    if a >= b {
        return Ok(0.0);
    }
    let s_lo = if a == f64::NEG_INFINITY { 0.0 } else { 10f64.powf(a) };
    let s_hi = if b >= cap { 0.5 } else { 10f64.powf(b) };
    integrate_over_entropy(|_| 1.0, s_lo, s_hi, t, spec)
}

/// T_q / T̄_c as a function of ε: ln(1/2ε) / (√(1-2ε) artanh √(1-2ε)).
pub fn ratio_curve(eps: f64) -> Result<f64> {
    check_epsilon(eps)?;
    let z = (1.0 - 2.0 * eps).sqrt();
    // artanh z with 1 - z formed without cancellation
    let artanh = 0.5 * ((1.0 + z) * (1.0 + z) / (2.0 * eps)).ln();
    Ok((1.0 / (2.0 * eps)).ln() / (z * artanh))
}

/// ⟨|z|⟩ = 1 - (2e^{-2t}/√(2πt)) ∫₀^∞ e^{-q²/2t - 2q} dq.
pub fn mean_abs_z(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let l = spec.min_half_width.max(spec.gaussian_sigmas * t.sqrt());
    let integral = integrate(|q| (-q * q / (2.0 * t) - 2.0 * q).exp(), 0.0, l, 16, spec)?;
    Ok(1.0 - 2.0 * (-2.0 * t).exp() / (2.0 * PI * t).sqrt() * integral.value)
}

/// ⟨|z|⟩ = 2 ∫₀^∞ tanh(2q) ℘(q) dq, integrated directly against ℘(q).
pub fn mean_abs_z_from_density(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    check_time(t)?;
    let l = wp_q_half_width(t, spec);
    let integral = integrate(
        |q: f64| z_of_q(q) * wp_q(q, t).unwrap_or(f64::NAN),
        0.0,
        l,
        32,
        spec,
    )?;
    Ok(2.0 * integral.value)
}

/// Large-t infidelity of the rotated average state, e^{-2t}/√(2πt).
pub fn operational_epsilon(t: f64) -> Result<f64> {
    check_time(t)?;
    Ok((-2.0 * t).exp() / (2.0 * PI * t).sqrt())
}

/// Purity of the average state after rotating each run to z > 0: (1 + ⟨|z|⟩²)/2.
pub fn average_state_purity(t: f64, spec: &QuadratureSpec) -> Result<f64> {
    let m = mean_abs_z(t, spec)?;
    Ok(0.5 * (1.0 + m * m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    #[test]
    fn wp_q_is_even_and_normalised() {
        for &t in &[0.1, 1.0, 5.0] {
            for &q in &[0.0, 0.3, 1.7, 9.0] {
                assert_eq!(wp_q(q, t).unwrap(), wp_q(-q, t).unwrap());
            }
            let norm = wp_q_normalization(t, &spec()).unwrap();
            assert!((norm - 1.0).abs() < 1e-8, "t = {t}: {norm}");
        }
        assert!(wp_q(0.0, 0.0).is_err());
        assert_eq!(z_of_q(0.0), 0.0);
    }

    #[test]
    fn wp_q_is_a_shifted_gaussian_pair() {
        // cosh(2q) e^{-2t} e^{-q²/2t} = ½[e^{-(q-2t)²/2t} + e^{-(q+2t)²/2t}]
        let t = 0.7;
        for &q in &[-2.0, -0.1, 0.5, 3.0] {
            let g = |c: f64| (-(q - c) * (q - c) / (2.0 * t)).exp() / (2.0 * PI * t).sqrt();
            let expected = 0.5 * (g(2.0 * t) + g(-2.0 * t));
            assert_abs_diff_eq!(wp_q(q, t).unwrap(), expected, epsilon = 1e-15);
        }
    }

    #[test]
    fn mean_purity_limits() {
        let p = mean_purity(1e-6, &spec()).unwrap();
        assert!((p - 0.5).abs() < 1e-2, "{p}");
        // relative correction to the asymptote is O(1/t)
        for &t in &[5.0, 20.0, 50.0] {
            let r = mean_infidelity(t, &spec()).unwrap() / epsilon_asymptotic(t).unwrap();
            assert!(r < 1.0 && 1.0 - r < 0.35 / t, "t = {t}: {r}");
        }
        assert!(mean_purity(-1.0, &spec()).is_err());
    }

    #[test]
    fn epsilon_asymptotic_examples() {
        let v = epsilon_asymptotic(5.0).unwrap();
        assert_eq!(v, PI * (-10f64).exp() / (4.0 * (10.0 * PI).sqrt()));
        let mut prev = f64::INFINITY;
        for i in 0..200 {
            let e = epsilon_asymptotic(0.25 + 0.1 * i as f64).unwrap();
            assert!(e < prev);
            prev = e;
        }
    }

    #[test]
    fn tau_c_roots() {
        let tc = tau_c(1e-6, &spec()).unwrap();
        assert!((tc.asymptotic_root - 5.8846).abs() < 1e-3, "{tc:?}");
        assert_abs_diff_eq!(tc.leading_order, 0.5 * 1e6f64.ln(), epsilon = 1e-12);
        assert!(tc.exact < tc.asymptotic_root);
        assert!((mean_infidelity(tc.exact, &spec()).unwrap() / 1e-6 - 1.0).abs() < 1e-9);
        assert_eq!(tau_c(0.5, &spec()).unwrap().exact, 0.0);
        assert!(tau_c(0.7, &spec()).is_err());

        let mut prev = f64::INFINITY;
        for k in 3..=14 {
            let eps = 10f64.powi(-k);
            let ratio = tau_c_asymptotic_root(eps).unwrap() / (0.5 * (1.0 / eps).ln());
            assert!((ratio - 1.0).abs() < (prev - 1.0).abs());
            prev = ratio;
        }
    }

    #[test]
    fn mean_fpt_examples() {
        let z = 0.5f64.sqrt();
        assert_eq!(mean_fpt_exact(z, z).unwrap(), 0.0);
        assert!((mean_fpt_exact(0.0, z).unwrap() - 0.1558).abs() < 1e-4);
        let z6 = threshold_z(1e-6).unwrap();
        assert!((mean_fpt_exact(0.0, z6).unwrap() - 1.8136).abs() < 1e-4);
        assert!(mean_fpt_exact(0.0, 1.0).is_err());
        assert!(mean_fpt_exact(0.9, 0.5).is_err());
    }

    #[test]
    fn tbar_asymptotic_variants() {
        let crude = tbar_c_asymptotic(1e-6, TbarVariant::LnOneOverEpsilon).unwrap();
        assert!((crude - 1.72694).abs() < 1e-5);
        let full = tbar_c_asymptotic(1e-6, TbarVariant::LnTwoOverEpsilon).unwrap();
        assert!((full - 1.8136).abs() < 1e-4);
        assert!(tbar_c_asymptotic(2.0, TbarVariant::LnTwoOverEpsilon).is_err());
    }

    #[test]
    fn tau_q_examples() {
        assert_eq!(tau_q(0.5).unwrap(), 0.0);
        assert!((tau_q(1e-6).unwrap() - 3.2806).abs() < 1e-4);
        assert!(tau_q(0.6).is_err());
        for &eps in &[0.3, 1e-3, 1e-9] {
            let p = crate::protocols::jacobs_purity(tau_q(eps).unwrap()).unwrap();
            assert_abs_diff_eq!(p, 1.0 - eps, epsilon = 1e-15);
        }
    }

    #[test]
    fn purity_pdf_normalisation_and_mean() {
        for &t in &[1.72694, 3.2806] {
            let n = purity_pdf_normalization(t, &spec()).unwrap();
            assert!((n - 1.0).abs() < 1e-6, "t = {t}: {n}");
            let mean_s = integrate_over_entropy(|s| s, 0.0, 0.5, t, &spec()).unwrap();
            let direct = mean_infidelity(t, &spec()).unwrap();
            assert!((mean_s / direct - 1.0).abs() < 1e-7, "{mean_s} vs {direct}");
        }
        assert!(purity_pdf_classical(0.5, 1.0).is_err());
        assert!(purity_pdf_classical(1.0, 1.0).is_err());
    }

    #[test]
    fn purity_pdf_is_pushforward_of_wp_q() {
        // p = (1 + tanh²2q)/2 ⇒ ℘_c(p) = ℘(q) / (tanh 2q sech² 2q), both branches ±q
        let mut count = 0;
        for i in 1..=10 {
            let t = 0.3 * i as f64;
            for j in 1..=10 {
                let q = 0.17 * j as f64;
                let th = (2.0 * q).tanh();
                let sech2 = sech(2.0 * q).powi(2);
                let p = 0.5 * (1.0 + th * th);
                let pushed = wp_q(q, t).unwrap() / (th * sech2);
                let direct = purity_pdf_classical(p, t).unwrap();
                assert!((pushed / direct - 1.0).abs() < 1e-9, "t={t} q={q}: {pushed} {direct}");
                count += 1;
            }
        }
        assert_eq!(count, 100);
    }

    #[test]
    fn log10_bins_sum_to_one() {
        let t = 1.72694;
        let edges: Vec<f64> = (0..=40).map(|i| -20.0 + 0.5 * i as f64).collect();
        let mut total = log10_entropy_probability(f64::NEG_INFINITY, -20.0, t, &spec()).unwrap();
        for w in edges.windows(2) {
            total += log10_entropy_probability(w[0], w[1], t, &spec()).unwrap();
        }
        assert!((total - 1.0).abs() < 1e-7, "{total}");
    }

    #[test]
    fn ratio_curve_examples() {
        assert!((ratio_curve(1e-6).unwrap() - 1.809).abs() < 1e-3);
        assert!((ratio_curve(1e-12).unwrap() - 1.902).abs() < 1e-3);
        for &eps in &[0.25, 0.01, 1e-4, 1e-6] {
            let z = threshold_z(eps).unwrap();
            let alt = tau_q(eps).unwrap() / mean_fpt_exact(0.0, z).unwrap();
            // f64::atanh near 1 loses ~1e-10 relative; the curve itself does not
            assert!((ratio_curve(eps).unwrap() / alt - 1.0).abs() < 1e-9);
        }
        assert!(ratio_curve(0.0).is_err());
        assert!(ratio_curve(0.5).is_err());
    }

    #[test]
    fn ratio_curve_increases_towards_two() {
        let mut prev = 0.0;
        for i in 0..=100 {
            let eps = 10f64.powf(-2.0 - 0.1 * i as f64);
            let r = ratio_curve(eps).unwrap();
            assert!(r > prev && r < 2.0);
            prev = r;
        }
    }

    #[test]
    fn feedback_ordering_of_times() {
        for k in 2..=12 {
            let eps = 10f64.powi(-k);
            let tq = tau_q(eps).unwrap();
            let tc = tau_c(eps, &spec()).unwrap();
            assert!(tq < tc.exact && tq < tc.asymptotic_root);
            assert!(tq > mean_fpt_exact(0.0, threshold_z(eps).unwrap()).unwrap());
        }
    }

    #[test]
    fn mean_abs_z_two_routes() {
        for &t in &[0.2, 1.0, 2.0, 5.0] {
            let a = mean_abs_z(t, &spec()).unwrap();
            let b = mean_abs_z_from_density(t, &spec()).unwrap();
            assert!((a - b).abs() < 1e-9, "t = {t}: {a} vs {b}");
        }
        assert!(1.0 - mean_abs_z(20.0, &spec()).unwrap() < 1e-15);
        // = 1 - 2Φ(-2√t); statrs' normal CDF is good to a few 1e-11
        let normal = statrs::distribution::Normal::standard();
        use statrs::distribution::ContinuousCDF;
        for &t in &[0.2, 1.0, 3.0] {
            let expected = 1.0 - 2.0 * normal.cdf(-2.0 * f64::sqrt(t));
            let got = mean_abs_z(t, &spec()).unwrap();
            assert!((got - expected).abs() < 1e-10, "t = {t}: {got} vs {expected}");
        }
    }

    #[test]
    fn operational_epsilon_factor() {
        for &t in &[0.5, 2.0, 5.0, 10.0] {
            let r = operational_epsilon(t).unwrap() / epsilon_asymptotic(t).unwrap();
            assert!((r - 4.0 / PI).abs() < 1e-12);
        }
        let p = average_state_purity(10.0, &spec()).unwrap();
        let eps = 1.0 - p;
        assert!((eps / operational_epsilon(10.0).unwrap() - 1.0).abs() < 0.1);
    }
}
