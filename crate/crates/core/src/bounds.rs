//! Analytic error bounds for band truncation and for replacing the causal
//! law by the power law, with the exact errors they are meant to bound.
//!
//! The truncation bound reads
//!
//! ```text
//!   ||G_c - G_c,M|| / ||G_c|| <= (2 A1 / (pi A0^2))^(1/4)
//!                                 exp(-(alpha(M) + A2^2 / (4 A1)) r) / r^(1/4)
//! ```
//!
//! under the envelope `alpha(M) + A0 |w - M| <= alpha_c(w) <= A1 w^2 + A2 |w|`
//! for `|w| > M`. The model-error bound is
//! `sqrt((1 - delta) D1 + delta D2)` with `D_j` the maximum of `C^2` on
//! `I1 = [-M_delta, M_delta]` and its complement `I2`, where
//! `C = |1 - exp(-(B1 + i B2) r)|^2` and `B = alpha*_pl - alpha*_c`.
//!
//! Quantities that span hundreds of decades are also carried as natural
//! logarithms.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laws::{alpha_difference, CausalLaw, DispersionLaw, MediumPreset};
use crate::numeric::{self, Maximum};
use crate::spectrum::SpectralIntegrator;

/// Coefficient printed for the castor-oil truncation bound.
pub const PRINTED_THEOREM1_COEFFICIENT: f64 = 0.0828;
/// Exponential rate printed for the castor-oil truncation bound.
pub const PRINTED_THEOREM1_RATE: f64 = 4.877e6;
/// Factor applied to the power-law slope at `M` to obtain `A0`.
pub const A0_SLOPE_FACTOR: f64 = 0.7;

/// Envelope constants of the truncation bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem1Constants {
    pub m: f64,
    pub a0: f64,
    pub a1: f64,
    pub a2: f64,
    /// `Re alpha*_c(M)`
    pub alpha_m: f64,
}

impl Theorem1Constants {
    /// Exponential decay rate `alpha(M) + A2^2 / (4 A1)` in 1/cm.
    pub fn rate(&self) -> f64 {
        self.alpha_m + self.a2 * self.a2 / (4.0 * self.a1)
    }

    /// Prefactor `(2 A1 / (pi A0^2))^(1/4)`.
    pub fn coefficient(&self) -> f64 {
        (2.0 * self.a1 / (std::f64::consts::PI * self.a0 * self.a0)).powf(0.25)
    }
}

/// Constants with `A0 = 0.7 * d(a1 w^gamma)/dw (M)`, `A1 = a1`, `A2 = a2`.
pub fn theorem1_constants(preset: &MediumPreset, m: f64) -> Result<Theorem1Constants> {
    theorem1_constants_with_factor(preset, m, A0_SLOPE_FACTOR)
}

/// As [`theorem1_constants`] with `A0 = factor * slope`.
pub fn theorem1_constants_with_factor(
    preset: &MediumPreset,
    m: f64,
    factor: f64,
) -> Result<Theorem1Constants> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("M must be > 0, got {m}")));
    }
    let pl = preset.powerlaw();
    let slope = pl.a1() * pl.gamma() * m.powf(pl.gamma() - 1.0);
    Ok(Theorem1Constants {
        m,
        a0: factor * slope,
        a1: pl.a1(),
        a2: pl.a2(),
        alpha_m: preset.causal().alpha(m).re,
    })
}

/// `ln(coefficient * exp(-rate r) / r^(1/4))`.
pub fn ln_truncation_bound(coefficient: f64, rate: f64, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Err(Error::ZeroDistance);
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be > 0, got {r}"
        )));
    }
    Ok(coefficient.ln() - rate * r - 0.25 * r.ln())
}

/// The truncation bound evaluated with the formula coefficient.
pub fn theorem1_bound(c: &Theorem1Constants, r: f64) -> Result<f64> {
    Ok(ln_truncation_bound(c.coefficient(), c.rate(), r)?.exp())
}

/// Outcome of checking the envelope hypothesis on a frequency grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnvelopeCheck {
    pub holds_lower: bool,
    pub holds_upper: bool,
    /// Largest `(alpha(M) + A0 (w - M) - alpha_c(w))^+` on the grid.
    pub worst_lower_violation: f64,
    /// Largest `(alpha_c(w) - A1 w^2 - A2 w)^+` on the grid.
    pub worst_upper_violation: f64,
    pub omega_checked_max: f64,
    pub points: usize,
}

/// Number of log-spaced points used by [`verify_envelope`].
pub const ENVELOPE_POINTS: usize = 10_000;

/// Checks both envelope inequalities on `ENVELOPE_POINTS` log-spaced
/// frequencies in `(M, omega_max]`. By even symmetry only `w > M` is
/// sampled.
pub fn verify_envelope(
    causal: &CausalLaw,
    c: &Theorem1Constants,
    omega_max: f64,
) -> Result<EnvelopeCheck> {
    if !(omega_max > c.m) {
        return Err(Error::InvalidParameter(format!(
            "omega_max = {omega_max} must exceed M = {}",
            c.m
        )));
    }
    let n = ENVELOPE_POINTS;
    let ratio = omega_max / c.m;
    let mut worst_lower: f64 = 0.0;
    let mut worst_upper: f64 = 0.0;
    for i in 1..=n {
        let w = if i == n {
            omega_max
        } else {
            c.m * ratio.powf(i as f64 / n as f64)
        };
        let alpha = causal.alpha(w).re;
        let lower = c.alpha_m + c.a0 * (w - c.m);
        let upper = c.a1 * w * w + c.a2 * w;
        worst_lower = worst_lower.max(lower - alpha);
        worst_upper = worst_upper.max(alpha - upper);
    }
    Ok(EnvelopeCheck {
        holds_lower: worst_lower <= 0.0,
        holds_upper: worst_upper <= 0.0,
        worst_lower_violation: worst_lower,
        worst_upper_violation: worst_upper,
        omega_checked_max: omega_max,
        points: n,
    })
}

/// Frequency beyond which `|G_c(r, w)|^2` is below `e^-70` of its peak: the
/// effective support of the norms at distance `r`.
pub fn envelope_support(causal: &CausalLaw, r: f64) -> Result<f64> {
    SpectralIntegrator::default().tail_cut(&DispersionLaw::Causal(*causal), r)
}

/// `C(r, w) = |1 - 2 e^{-B1 r} cos(B2 r) + e^{-2 B1 r}|`, evaluated in the
/// equivalent form `|exp(-(B1 + i B2) r) - 1|^2`, which keeps full relative
/// precision when `|B| r` is small.
pub fn c_factor(causal: &DispersionLaw, powerlaw: &DispersionLaw, r: f64, omega: f64) -> f64 {
    let b = alpha_difference(causal, powerlaw, omega);
    numeric::expm1_complex(-b * r).norm_sqr()
}

/// `C(r, w)` exactly as displayed, `|1 - 2 e^{-B1 r} cos(B2 r) + e^{-2 B1 r}|`.
pub fn c_factor_display(
    causal: &DispersionLaw,
    powerlaw: &DispersionLaw,
    r: f64,
    omega: f64,
) -> f64 {
    let b = alpha_difference(causal, powerlaw, omega);
    let e = (-b.re * r).exp();
    (1.0 - 2.0 * e * (b.im * r).cos() + e * e).abs()
}

/// `sqrt((1 - delta) d1 + delta d2)` for `delta` in `[0, 1]`.
pub fn theorem2_bound(delta: f64, d1: f64, d2: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&delta) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    Ok(((1.0 - delta) * d1 + delta * d2).sqrt())
}

/// Grid samples used to seed each extremum search.
pub const EXTREMA_SAMPLES: usize = 100_000;
/// `B1 r` beyond which `C` equals its limit 1 to double precision.
const C_SATURATION: f64 = 40.0;

/// Everything entering the model-error bound at one distance.
///
/// `d1`, `d2`, `bound` follow the squared convention (`D_j = max C^2`);
/// the `_sup_c` fields use `D_j = max C`, which is what the integral
/// estimate behind the bound actually needs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Theorem2Report {
    pub r: f64,
    pub m: f64,
    pub delta: f64,
    pub m_delta: f64,
    pub d1: f64,
    pub d2: f64,
    pub d1_sup_c: f64,
    pub d2_sup_c: f64,
    /// Frequencies where the maxima of `C` on `I1` and `I2` occur.
    pub d1_at: f64,
    pub d2_at: f64,
    pub b1_at_d2: f64,
    pub b2_at_d2: f64,
    /// Upper end of the sampled part of `I2`.
    pub scan_end: f64,
    /// Whether the limit `C -> 1` (as `B1 r -> inf`) was included in `D2`.
    pub limit_appended: bool,
    pub bound: f64,
    pub bound_sup_c: f64,
    /// `||G_c,M - G_pl,M|| / ||G_c||`
    pub exact_error: f64,
    /// `||G_c,M - G_pl,M|| / ||G_c,M||`
    pub exact_error_proof: f64,
    pub dominates: bool,
    pub dominates_sup_c: bool,
}

/// Evaluates the model-error bound and the exact errors for `r`, `M`,
/// `delta`.
pub fn theorem2_report(
    causal: &DispersionLaw,
    powerlaw: &DispersionLaw,
    r: f64,
    m: f64,
    delta: f64,
) -> Result<Theorem2Report> {
    theorem2_report_with(
        &SpectralIntegrator::default(),
        causal,
        powerlaw,
        r,
        m,
        delta,
    )
}

pub fn theorem2_report_with(
    integ: &SpectralIntegrator,
    causal: &DispersionLaw,
    powerlaw: &DispersionLaw,
    r: f64,
    m: f64,
    delta: f64,
) -> Result<Theorem2Report> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!("M must be > 0, got {m}")));
    }
    let m_delta = integ.find_m_delta(causal, r, delta)?;
    let c = |w: f64| c_factor(causal, powerlaw, r, w);

    // C is even in w, so both sets reduce to w >= 0.
    let d1 = numeric::maximize(c, 0.0, m_delta, EXTREMA_SAMPLES, false);

    let b1 = |w: f64| powerlaw.attenuation(w) - causal.attenuation(w);
    let saturation = numeric::expand_until(m_delta.max(1e-6), 1e250, |w| b1(w) * r >= C_SATURATION);
    let (scan_end, limit_appended) = match saturation {
        Some(w) => (w.max(2.0 * m_delta), true),
        None => (m.max(integ.tail_cut(causal, r)?).max(2.0 * m_delta), false),
    };
    let mut d2 = numeric::maximize(c, m_delta, scan_end, EXTREMA_SAMPLES, true);
    if limit_appended && d2.value < 1.0 {
        d2 = Maximum {
            at: f64::INFINITY,
            value: 1.0,
        };
    }
    let b_at = if d2.at.is_finite() {
        alpha_difference(causal, powerlaw, d2.at)
    } else {
        num_complex::Complex64::new(f64::INFINITY, f64::NAN)
    };

    let parts = integ.model_error_parts(causal, powerlaw, r, m)?;
    let exact_error = parts.relative_to_full();
    let exact_error_proof = parts.relative_to_band();
    let bound = theorem2_bound(delta, d1.value.powi(2), d2.value.powi(2))?;
    let bound_sup_c = theorem2_bound(delta, d1.value, d2.value)?;

    Ok(Theorem2Report {
        r,
        m,
        delta,
        m_delta,
        d1: d1.value.powi(2),
        d2: d2.value.powi(2),
        d1_sup_c: d1.value,
        d2_sup_c: d2.value,
        d1_at: d1.at,
        d2_at: d2.at,
        b1_at_d2: b_at.re,
        b2_at_d2: b_at.im,
        scan_end,
        limit_appended,
        bound,
        bound_sup_c,
        exact_error,
        exact_error_proof,
        dominates: bound >= exact_error_proof,
        dominates_sup_c: bound_sup_c >= exact_error_proof,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn laws() -> (DispersionLaw, DispersionLaw) {
        let p = MediumPreset::castor_oil();
        ((*p.causal()).into(), (*p.powerlaw()).into())
    }

    #[test]
    fn constants_castor_oil() {
        let c = theorem1_constants(&MediumPreset::castor_oil(), 100.0).unwrap();
        assert!(rel(c.a1, 0.04344) < 5e-3);
        assert!(rel(c.a2, 920.55) < 5e-3);
        // mpmath: 0.7 a1 gamma 100^0.66 and alpha_c(100)
        assert!(rel(c.a0, 1.054_602_169_122_782_3) < 1e-12);
        assert!(rel(c.alpha_m, 90.598_758_277_056_1) < 1e-12);
        assert!(rel(c.coefficient(), 0.397_096_750_938_699_83) < 1e-12);
    }

    #[test]
    fn a0_is_linear_in_factor() {
        let p = MediumPreset::castor_oil();
        let base = theorem1_constants_with_factor(&p, 100.0, 1.0).unwrap();
        let scaled = theorem1_constants_with_factor(&p, 100.0, 0.35).unwrap();
        assert!(rel(scaled.a0, 0.35 * base.a0) < 1e-15);
    }

    #[test]
    fn rate_castor_oil() {
        let c = theorem1_constants(&MediumPreset::castor_oil(), 100.0).unwrap();
        assert!(rel(c.rate(), 4_876_908.226_164_428) < 1e-12);
        assert!(rel(c.rate(), PRINTED_THEOREM1_RATE) < 2e-3);
    }

    #[test]
    fn truncation_bound_decreases_in_r() {
        let c = theorem1_constants(&MediumPreset::castor_oil(), 100.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..50 {
            let r = 1e-8 * 1.3f64.powi(i);
            let b = ln_truncation_bound(c.coefficient(), c.rate(), r).unwrap();
            assert!(b < prev);
            prev = b;
        }
        assert!(theorem1_bound(&c, 0.0).is_err());
    }

    #[test]
    fn truncation_bound_printed_value() {
        let b = ln_truncation_bound(PRINTED_THEOREM1_COEFFICIENT, PRINTED_THEOREM1_RATE, 1e-6)
            .unwrap()
            .exp();
        assert!(rel(b, 0.0828 * (-4.877f64).exp() / 1e-6f64.powf(0.25)) < 1e-12);
        assert!((b - 0.0199).abs() < 1e-4);
    }

    #[test]
    fn envelope_upper_holds() {
        let p = MediumPreset::castor_oil();
        let c = theorem1_constants(&p, 100.0).unwrap();
        let check = verify_envelope(p.causal(), &c, 1e6).unwrap();
        assert!(check.holds_upper);
        assert_eq!(check.worst_upper_violation, 0.0);
        assert_eq!(check.points, ENVELOPE_POINTS);
    }

    #[test]
    fn envelope_lower_with_zero_slope_is_monotonicity() {
        let p = MediumPreset::castor_oil();
        let c = Theorem1Constants {
            a0: 0.0,
            ..theorem1_constants(&p, 100.0).unwrap()
        };
        assert!(verify_envelope(p.causal(), &c, 1e8).unwrap().holds_lower);
    }

    #[test]
    fn envelope_lower_fails_at_very_large_frequencies() {
        // alpha_c grows like w^((3-gamma)/2), slower than the linear envelope
        let p = MediumPreset::castor_oil();
        let c = theorem1_constants(&p, 100.0).unwrap();
        let check = verify_envelope(p.causal(), &c, 1e16).unwrap();
        assert!(!check.holds_lower);
        assert!(check.worst_lower_violation > 0.0);
        assert!(verify_envelope(p.causal(), &c, 50.0).is_err());
    }

    #[test]
    fn c_factor_limits() {
        let (c, p) = laws();
        assert_eq!(c_factor(&c, &c, 1.0, 42.0), 0.0);
        assert_eq!(c_factor_display(&c, &c, 1.0, 42.0), 0.0);
        // B1 r -> inf
        assert!((c_factor(&c, &p, 1.0, 1e5) - 1.0).abs() < 1e-15);
        assert!((c_factor_display(&c, &p, 1.0, 1e5) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn c_factor_small_range_scale() {
        // prototype: max of C over [0, 10] at r = 1 is C(10) = 7.5e-7,
        // whose square is the 5.6e-13 quoted for D1
        let (c, p) = laws();
        let m = numeric::maximize(|w| c_factor(&c, &p, 1.0, w), 0.0, 10.0, 10_001, false);
        assert!((m.at - 10.0).abs() < 1e-6);
        assert!(m.value > 5e-7 && m.value < 1e-6, "{}", m.value);
        assert!(rel(m.value.powi(2), 5.6e-13) < 0.1, "{}", m.value.powi(2));
    }

    #[test]
    fn theorem2_bound_edges() {
        assert_eq!(theorem2_bound(1.0, 0.3, 0.49).unwrap(), 0.7);
        assert_eq!(theorem2_bound(0.0, 0.25, 9.0).unwrap(), 0.5);
        assert!(theorem2_bound(1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn theorem2_identical_laws() {
        let (c, _) = laws();
        let rep = theorem2_report(&c, &c, 1.0, 100.0, 6e-4).unwrap();
        assert_eq!(rep.d1, 0.0);
        assert_eq!(rep.d2, 0.0);
        assert_eq!(rep.bound, 0.0);
        assert!(!rep.limit_appended);
    }

    #[test]
    fn theorem2_castor_oil_unit_distance() {
        let (c, p) = laws();
        let rep = theorem2_report(&c, &p, 1.0, 100.0, 6e-4).unwrap();
        // prototype (numpy scan, scipy quad): M_delta 13.135, max C on I2
        // 1.02190463 at w = 391.3, eps 1.7866e-4
        assert!(rel(rep.m_delta, 13.134_955) < 1e-4);
        assert!(rel(rep.d2_sup_c, 1.021_904_634) < 1e-8, "{}", rep.d2_sup_c);
        assert!(rel(rep.d2, 1.044_289_08) < 1e-7);
        assert!((rep.d2_at - 391.3).abs() < 0.1, "{}", rep.d2_at);
        assert!(rel(rep.bound, 0.025) < 0.01, "{}", rep.bound);
        assert!(rel(rep.exact_error_proof, 1.786_604_287_98e-4) < 1e-6);
        assert!(rep.dominates && rep.dominates_sup_c);
    }
}
