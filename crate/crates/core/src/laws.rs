//! Attenuation-dispersion laws.
//!
//! The causal law
//!
//! ```text
//!   alpha*_c(w) = alpha1 (-i w) / (c0 sqrt(1 + (-i tau0 w)^(gamma-1)))
//! ```
//!
//! and the frequency power law
//!
//! ```text
//!   alpha*_pl(w) = a1 (-i w)^gamma / cos(gamma pi / 2) + a2 (-i w)
//! ```
//!
//! agree for `|tau0 w|^(gamma-1) << 1` when `a1`, `a2` are derived from the
//! causal constants by [`derive_powerlaw_coeffs`].
//!
//! Fractional powers use `(-i w)^p = |w|^p exp(-i p (pi/2) sgn(w))`. For
//! `gamma` in (1, 2] the square-root argument of the causal law has real part
//! at least 1, so the principal square root never meets its branch cut.

use std::f64::consts::PI;
use std::fmt;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// `(-i w)^p` on the principal branch continued from the lower half-plane.
pub fn minus_i_pow(omega: f64, p: f64) -> Complex64 {
    if omega == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let modulus = omega.abs().powf(p);
    let phase = -p * 0.5 * PI * omega.signum();
    Complex64::from_polar(modulus, phase)
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !v.is_finite() || v <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "{name} must be finite and > 0, got {v}"
        )));
    }
    Ok(())
}

/// Causal attenuation-dispersion law with relaxation time `tau0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalLaw {
    gamma: f64,
    c0: f64,
    alpha1: f64,
    tau0: f64,
}

impl CausalLaw {
    /// `gamma` in (1, 2]; `c0` in cm/us; `alpha1` in 1/us; `tau0` in us.
    pub fn new(gamma: f64, c0: f64, alpha1: f64, tau0: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma <= 2.0) {
            return Err(Error::InvalidParameter(format!(
                "gamma must lie in (1, 2], got {gamma}"
            )));
        }
        check_positive("c0", c0)?;
        check_positive("alpha1", alpha1)?;
        check_positive("tau0", tau0)?;
        Ok(Self {
            gamma,
            c0,
            alpha1,
            tau0,
        })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn alpha1(&self) -> f64 {
        self.alpha1
    }
    pub fn tau0(&self) -> f64 {
        self.tau0
    }

    pub fn alpha(&self, omega: f64) -> Complex64 {
        // evaluate at |w| and conjugate so the Hermitian symmetry is exact
        let w = omega.abs();
        let z = minus_i_pow(self.tau0 * w, self.gamma - 1.0);
        let num = Complex64::new(0.0, -self.alpha1 * w);
        let v = num / (self.c0 * (1.0 + z).sqrt());
        if omega < 0.0 {
            v.conj()
        } else {
            v
        }
    }
}

/// Frequency power law `a1 |w|^gamma` with its dispersion companion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerLaw {
    gamma: f64,
    a1: f64,
    a2: f64,
}

impl PowerLaw {
    /// `gamma` in (1, 2); `a1 > 0`; `a2 >= 0`.
    pub fn new(gamma: f64, a1: f64, a2: f64) -> Result<Self> {
        if !(gamma > 1.0 && gamma < 2.0) {
            return Err(Error::InvalidParameter(format!(
                "power-law gamma must lie in (1, 2), got {gamma}"
            )));
        }
        Self::checked(gamma, a1, a2)
    }

    /// The `gamma = 2` (thermoviscous) law `a1 w^2 - i a2 w`.
    pub fn thermoviscous(a1: f64, a2: f64) -> Result<Self> {
        Self::checked(2.0, a1, a2)
    }

    fn checked(gamma: f64, a1: f64, a2: f64) -> Result<Self> {
        check_positive("a1", a1)?;
        if !a2.is_finite() || a2 < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "a2 must be finite and >= 0, got {a2}"
            )));
        }
        Ok(Self { gamma, a1, a2 })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn a1(&self) -> f64 {
        self.a1
    }
    pub fn a2(&self) -> f64 {
        self.a2
    }

    pub fn alpha(&self, omega: f64) -> Complex64 {
        let w = omega.abs();
        let v = if self.gamma == 2.0 {
            Complex64::new(self.a1 * w * w, -self.a2 * w)
        } else {
            let c = (self.gamma * 0.5 * PI).cos();
            self.a1 * minus_i_pow(w, self.gamma) / c + Complex64::new(0.0, -self.a2 * w)
        };
        if omega < 0.0 {
            v.conj()
        } else {
            v
        }
    }

    /// `|tan(gamma pi / 2)|`, the coefficient of the `w^gamma` dispersion term.
    fn tan_factor(&self) -> f64 {
        (self.gamma * 0.5 * PI).tan().abs()
    }
}

/// Either law, or the dissipation-free limit `alpha* = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersionLaw {
    Causal(CausalLaw),
    Power(PowerLaw),
    Lossless,
}

impl DispersionLaw {
    /// Complex attenuation `alpha*(w)` in 1/cm. No input checking.
    pub fn alpha(&self, omega: f64) -> Complex64 {
        match self {
            DispersionLaw::Causal(l) => l.alpha(omega),
            DispersionLaw::Power(l) => l.alpha(omega),
            DispersionLaw::Lossless => Complex64::new(0.0, 0.0),
        }
    }

    /// Attenuation law `Re alpha*(w)` in Np/cm.
    pub fn attenuation(&self, omega: f64) -> f64 {
        self.alpha(omega).re
    }

    pub fn tag(&self) -> &'static str {
        match self {
            DispersionLaw::Causal(_) => "causal",
            DispersionLaw::Power(_) => "powerlaw",
            DispersionLaw::Lossless => "lossless",
        }
    }
}

impl fmt::Display for DispersionLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DispersionLaw::Causal(l) => write!(
                f,
                "causal(gamma={}, c0={}, alpha1={}, tau0={})",
                l.gamma, l.c0, l.alpha1, l.tau0
            ),
            DispersionLaw::Power(l) => {
                write!(f, "powerlaw(gamma={}, a1={}, a2={})", l.gamma, l.a1, l.a2)
            }
            DispersionLaw::Lossless => f.write_str("lossless"),
        }
    }
}

impl From<CausalLaw> for DispersionLaw {
    fn from(l: CausalLaw) -> Self {
        DispersionLaw::Causal(l)
    }
}

impl From<PowerLaw> for DispersionLaw {
    fn from(l: PowerLaw) -> Self {
        DispersionLaw::Power(l)
    }
}

/// `other.alpha(w) - reference.alpha(w)`.
///
/// For a causal reference and a power law of the same exponent the leading
/// terms of the two laws cancel analytically; writing `z = (-i tau0 w)^(g-1)`,
/// `s = sqrt(1 + z)`, `A = alpha1 / c0` and `a1 (-i w)^(g-1) / cos(g pi/2) = -k z`,
///
/// ```text
///   B / (-i w) = (a2 - A) + (A/2 - k) z - A z^2 (2 + s) / (2 s (1 + s)^2)
/// ```
///
/// which avoids subtracting two nearly equal values of size `a2 w`.
pub fn alpha_difference(reference: &DispersionLaw, other: &DispersionLaw, omega: f64) -> Complex64 {
    match (reference, other) {
        (DispersionLaw::Causal(c), DispersionLaw::Power(p)) if c.gamma == p.gamma => {
            causal_to_power_difference(c, p, omega)
        }
        (DispersionLaw::Power(p), DispersionLaw::Causal(c)) if c.gamma == p.gamma => {
            -causal_to_power_difference(c, p, omega)
        }
        _ => other.alpha(omega) - reference.alpha(omega),
    }
}

fn causal_to_power_difference(c: &CausalLaw, p: &PowerLaw, omega: f64) -> Complex64 {
    let w = omega.abs();
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let g1 = c.gamma - 1.0;
    let z = minus_i_pow(c.tau0 * w, g1);
    let s = (1.0 + z).sqrt();
    let big_a = c.alpha1 / c.c0;
    let kappa = -p.a1 / ((c.gamma * 0.5 * PI).cos() * c.tau0.powf(g1));
    let bracket = (p.a2 - big_a) + (0.5 * big_a - kappa) * z
        - big_a * z * z * (2.0 + s) / (2.0 * s * (1.0 + s) * (1.0 + s));
    let v = Complex64::new(0.0, -w) * bracket;
    if omega < 0.0 {
        v.conj()
    } else {
        v
    }
}

/// Checked evaluation of `alpha*(w)`.
pub fn eval_alpha(law: &DispersionLaw, omega: f64) -> Result<Complex64> {
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    Ok(law.alpha(omega))
}

/// A dispersion law together with the reference speed `c0` of the phase
/// factor `exp(i w r / c0)`.
///
/// The power law has no `c0` of its own; it borrows the one of the preset it
/// was derived from so that both Green functions differ only through
/// `alpha*`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaveModel {
    pub law: DispersionLaw,
    pub c0: f64,
}

impl WaveModel {
    pub fn new(law: DispersionLaw, c0: f64) -> Result<Self> {
        check_positive("c0", c0)?;
        Ok(Self { law, c0 })
    }

    pub fn lossless(c0: f64) -> Result<Self> {
        Self::new(DispersionLaw::Lossless, c0)
    }

    /// Effective wavenumber `w / c0 - Im alpha*(w)`.
    pub fn wavenumber(&self, omega: f64) -> f64 {
        omega / self.c0 - self.law.alpha(omega).im
    }
}

/// Phase speed `c(w) = w / (w / c0 - Im alpha*(w))` in cm/us.
pub fn phase_speed(model: &WaveModel, omega: f64) -> Result<f64> {
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    if omega == 0.0 {
        return Err(Error::InvalidParameter(
            "phase speed undefined at omega = 0".into(),
        ));
    }
    let im = model.law.alpha(omega).im;
    let k = omega / model.c0 - im;
    let scale = omega.abs() / model.c0 + im.abs();
    if k.abs() <= 1e-10 * scale {
        return Err(Error::SingularPhaseSpeed {
            omega,
            wavenumber: k,
        });
    }
    Ok(omega / k)
}

/// Coefficients `(a1, a2)` of the power law matching `causal` at small
/// frequencies.
pub fn derive_powerlaw_coeffs(causal: &CausalLaw) -> (f64, f64) {
    let CausalLaw {
        gamma,
        c0,
        alpha1,
        tau0,
    } = *causal;
    let a1 = alpha1 * tau0.powf(gamma - 1.0) * (gamma * 0.5 * PI).cos().abs() / (2.0 * c0);
    let a2 = alpha1 / c0;
    (a1, a2)
}

/// Inverse of the `a1` relation: `alpha1 = 2 c0 a1 / (tau0^(gamma-1) |cos(gamma pi/2)|)`.
pub fn alpha1_from_a1(gamma: f64, c0: f64, a1: f64, tau0: f64) -> f64 {
    2.0 * c0 * a1 / (tau0.powf(gamma - 1.0) * (gamma * 0.5 * PI).cos().abs())
}

/// Upper end `M` of the small-frequency range `|tau0 w|^(gamma-1) <= threshold`.
pub fn small_frequency_bound(gamma: f64, tau0: f64, threshold: f64) -> Result<f64> {
    if !(gamma > 1.0) || !gamma.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "gamma must be > 1, got {gamma}"
        )));
    }
    check_positive("tau0", tau0)?;
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "threshold must lie in (0, 1), got {threshold}"
        )));
    }
    Ok(threshold.powf(1.0 / (gamma - 1.0)) / tau0)
}

/// On-disk preset: the causal constants only; power-law coefficients are
/// always re-derived on load.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PresetFile {
    pub name: String,
    pub gamma: f64,
    pub c0: f64,
    pub alpha1: f64,
    pub tau0: f64,
}

/// Named medium: causal law plus the power law derived from it.
#[derive(Debug, Clone, PartialEq)]
pub struct MediumPreset {
    name: String,
    causal: CausalLaw,
    powerlaw: PowerLaw,
}

impl MediumPreset {
    pub fn new(name: impl Into<String>, causal: CausalLaw) -> Result<Self> {
        let (a1, a2) = derive_powerlaw_coeffs(&causal);
        let powerlaw = if causal.gamma == 2.0 {
            PowerLaw::thermoviscous(a1, a2)?
        } else {
            PowerLaw::new(causal.gamma, a1, a2)?
        };
        Ok(Self {
            name: name.into(),
            causal,
            powerlaw,
        })
    }

    /// Castor-oil-like liquid: `gamma = 1.66`, `c0 = 0.15` cm/us,
    /// `alpha1 = 138.08` 1/us, `tau0 = 1e-6` us.
    pub fn castor_oil() -> Self {
        let causal = CausalLaw::new(1.66, 0.15, 138.08, 1e-6).expect("valid built-in constants");
        Self::new("castor-oil", causal).expect("valid built-in constants")
    }

    /// Looks up a built-in preset by name.
    pub fn builtin(name: &str) -> Option<Self> {
        match name {
            "castor-oil" => Some(Self::castor_oil()),
            _ => None,
        }
    }

    pub fn from_file_record(rec: &PresetFile) -> Result<Self> {
        Self::new(
            rec.name.clone(),
            CausalLaw::new(rec.gamma, rec.c0, rec.alpha1, rec.tau0)?,
        )
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_file_record(&serde_json::from_str(s)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&std::fs::read_to_string(path)?)
    }

    pub fn to_file_record(&self) -> PresetFile {
        PresetFile {
            name: self.name.clone(),
            gamma: self.causal.gamma,
            c0: self.causal.c0,
            alpha1: self.causal.alpha1,
            tau0: self.causal.tau0,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn causal(&self) -> &CausalLaw {
        &self.causal
    }
    pub fn powerlaw(&self) -> &PowerLaw {
        &self.powerlaw
    }
    pub fn c0(&self) -> f64 {
        self.causal.c0
    }

    pub fn causal_model(&self) -> WaveModel {
        WaveModel {
            law: self.causal.into(),
            c0: self.causal.c0,
        }
    }

    pub fn powerlaw_model(&self) -> WaveModel {
        WaveModel {
            law: self.powerlaw.into(),
            c0: self.causal.c0,
        }
    }
}

/// Positive frequency `w1` where the power-law phase speed diverges, i.e.
/// the root of `w (1/c0 + a2) - a1 |tan(gamma pi/2)| w^gamma`.
///
/// Found by bisection on `[1, 1e10]`; the closed form
/// `((1/c0 + a2) / (a1 |tan(gamma pi/2)|))^(1/(gamma-1))` is a cross-check.
pub fn powerlaw_phase_singularity(preset: &MediumPreset) -> Result<f64> {
    let pl = preset.powerlaw;
    if pl.gamma >= 2.0 {
        return Err(Error::NoSingularity(
            "gamma = 2 has no w^gamma dispersion term".into(),
        ));
    }
    let tan = pl.tan_factor();
    if !(pl.a1 * tan > 0.0) {
        return Err(Error::NoSingularity("a1 |tan(gamma pi/2)| vanishes".into()));
    }
    let model = preset.powerlaw_model();
    // k(w)/w is monotone decreasing in w > 0
    let reduced = |w: f64| Ok(model.wavenumber(w) / w);
    let closed = ((1.0 / model.c0 + pl.a2) / (pl.a1 * tan)).powf(1.0 / (pl.gamma - 1.0));
    let root = match numeric::bisect(reduced, 1.0, 1e10, 1e-12, 400, true) {
        Ok(r) => r,
        Err(Error::Bisection(_)) => {
            numeric::bisect(reduced, 0.5 * closed, 2.0 * closed, 1e-12, 400, true)?
        }
        Err(e) => return Err(e),
    };
    if ((root - closed) / closed).abs() > 1e-9 {
        return Err(Error::Bisection(format!(
            "singularity root {root:e} disagrees with closed form {closed:e}"
        )));
    }
    Ok(root)
}

/// Root of `Im alpha*_pl(w) = 0` for `w > 0`: where the dispersion term
/// cancels `a2 w`, ignoring the `1/c0` contribution to the wavenumber.
pub fn powerlaw_dispersion_null(pl: &PowerLaw) -> Result<f64> {
    if pl.gamma >= 2.0 || pl.a2 == 0.0 {
        return Err(Error::NoSingularity("no sign change of Im alpha*".into()));
    }
    Ok((pl.a2 / (pl.a1 * pl.tan_factor())).powf(1.0 / (pl.gamma - 1.0)))
}
