//! Time-domain signals from sampled spectra.
//!
//! A [`FrequencyGrid`] with `n` samples and edge `omega_max` is paired with
//! the time grid `t_j = t0 + j dt`, `dt = pi / omega_max`. Synthesis evaluates
//! the inverse transform as the Riemann sum
//!
//! ```text
//!   g(t_j) = (2 pi)^{-1/2} sum_k v_k exp(-i w_k t_j) dw
//! ```
//!
//! and analysis is its discrete inverse, so the pair satisfies the discrete
//! Parseval identity `sum g_j^2 dt = sum |v_k|^2 dw` exactly. The Nyquist
//! sample `w_0 = -omega_max` has no mirror partner; synthesis replaces its
//! term by the real part of `v_0 exp(-i w_0 t)`.

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::laws::{DispersionLaw, WaveModel};
use crate::numeric;
use crate::spectrum::{sample_green_spectrum, tail_spectrum, ComplexSpectrum, FrequencyGrid};

/// Relative Hermitian deviation accepted by [`synthesize_time_signal`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;
/// `|g(omega_max)| / max |g|` allowed for a forcing spectrum.
pub const FORCING_EDGE_RATIO: f64 = 1e-12;

/// A real signal sampled at `t0 + j dt`.
#[derive(Debug, Clone, PartialEq)]
pub struct RealSignal {
    pub t0: f64,
    pub dt: f64,
    pub samples: Vec<f64>,
    pub r: f64,
    /// Largest imaginary part discarded when the signal was synthesized.
    pub residual_imag: f64,
    pub law_tag: String,
}

impl RealSignal {
    pub fn time(&self, j: usize) -> f64 {
        self.t0 + j as f64 * self.dt
    }

    /// End of the (periodic) window, `t0 + n dt`.
    pub fn window_end(&self) -> f64 {
        self.time(self.samples.len())
    }

    /// The frequency grid conjugate to the time grid.
    pub fn grid(&self) -> Result<FrequencyGrid> {
        FrequencyGrid::new(PI / self.dt, self.samples.len())
    }

    /// `sum g_j^2 dt`.
    pub fn energy(&self) -> f64 {
        self.samples.iter().map(|g| g * g).sum::<f64>() * self.dt
    }

    pub fn l2_norm(&self) -> f64 {
        self.energy().sqrt()
    }

    pub fn peak(&self) -> f64 {
        self.samples.iter().fold(0.0, |m: f64, g| m.max(g.abs()))
    }

    /// Time of the largest `|g_j|`.
    pub fn peak_time(&self) -> f64 {
        let mut best = 0;
        for (j, g) in self.samples.iter().enumerate() {
            if g.abs() > self.samples[best].abs() {
                best = j;
            }
        }
        self.time(best)
    }

    /// CSV: a `#` metadata line, then `t,value`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(
            w,
            "# law={} r={} t0={} dt={} n={} omega_max={} convention=unitary,forward-kernel=exp(+i*w*t)",
            self.law_tag,
            numeric::fmt17(self.r),
            numeric::fmt17(self.t0),
            numeric::fmt17(self.dt),
            self.samples.len(),
            numeric::fmt17(PI / self.dt)
        )?;
        writeln!(w, "t,value")?;
        for (j, g) in self.samples.iter().enumerate() {
            writeln!(w, "{},{}", numeric::fmt17(self.time(j)), numeric::fmt17(*g))?;
        }
        Ok(())
    }
}

fn sign(j: usize) -> f64 {
    if j.is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// Inverse transform of `s` onto `t_j = t0 + j dt`.
pub fn synthesize_time_signal(s: &ComplexSpectrum, t0: f64) -> Result<RealSignal> {
    if !t0.is_finite() {
        return Err(Error::NonFinite("t0"));
    }
    let deviation = s.hermitian_deviation();
    if deviation > HERMITIAN_TOLERANCE {
        return Err(Error::NonHermitian { deviation });
    }
    let grid = s.grid;
    let n = grid.len();
    let dw = grid.step();
    let omega_max = grid.omega_max();

    let mut buf: Vec<Complex64> = s.values.clone();
    // Nyquist term: Re(v0 e^{i W t}) on the grid equals v0' e^{i W t_j}
    // with v0' = (v0 + conj(v0) e^{-2 i W t0}) / 2.
    let v0 = buf[0];
    buf[0] = 0.5 * (v0 + v0.conj() * Complex64::from_polar(1.0, -2.0 * omega_max * t0));
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= Complex64::from_polar(1.0, -(k as f64) * dw * t0);
    }
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let front = Complex64::from_polar(dw / (2.0 * PI).sqrt(), omega_max * t0);
    let mut residual: f64 = 0.0;
    let samples = buf
        .iter()
        .enumerate()
        .map(|(j, v)| {
            let g = *v * front * sign(j);
            residual = residual.max(g.im.abs());
            g.re
        })
        .collect();
    Ok(RealSignal {
        t0,
        dt: grid.dt(),
        samples,
        r: s.r,
        residual_imag: residual,
        law_tag: s.law_tag.clone(),
    })
}

/// Discrete forward transform, the inverse of [`synthesize_time_signal`].
pub fn analyze_time_signal(sig: &RealSignal) -> Result<ComplexSpectrum> {
    let grid = sig.grid()?;
    let n = grid.len();
    let dw = grid.step();
    let mut buf: Vec<Complex64> = sig
        .samples
        .iter()
        .enumerate()
        .map(|(j, g)| Complex64::new(g * sign(j), 0.0))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let front = Complex64::from_polar(sig.dt / (2.0 * PI).sqrt(), -grid.omega_max() * sig.t0);
    for (k, v) in buf.iter_mut().enumerate() {
        *v *= front * Complex64::from_polar(1.0, k as f64 * dw * sig.t0);
    }
    Ok(ComplexSpectrum {
        grid,
        r: sig.r,
        values: buf,
        law_tag: sig.law_tag.clone(),
        cutoff: None,
    })
}

/// Fraction of the signal energy before `arrival - guard`:
/// `sum_{t_j < arrival - guard} g_j^2 / sum g_j^2`. A guard of `2 dt`
/// absorbs the ringing of the discrete transform around a sharp front.
pub fn causality_energy_fraction(sig: &RealSignal, arrival: f64, guard: f64) -> Result<f64> {
    if !(guard.is_finite() && guard >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "guard must be >= 0, got {guard}"
        )));
    }
    if !arrival.is_finite() || arrival > sig.window_end() {
        return Err(Error::InvalidParameter(format!(
            "arrival {arrival} outside the window [{}, {}]",
            sig.t0,
            sig.window_end()
        )));
    }
    let cut = arrival - guard;
    if cut < sig.t0 {
        return Err(Error::WindowTooShort { cut, t0: sig.t0 });
    }
    let mut before = 0.0;
    let mut total = 0.0;
    for (j, g) in sig.samples.iter().enumerate() {
        let e = g * g;
        total += e;
        if sig.time(j) < cut {
            before += e;
        }
    }
    if total == 0.0 {
        return Ok(0.0);
    }
    Ok(before / total)
}

/// Guarded (`2 dt`) and raw pre-arrival fractions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CausalityFractions {
    pub guarded: f64,
    pub raw: f64,
}

pub fn causality_fractions(sig: &RealSignal, arrival: f64) -> Result<CausalityFractions> {
    Ok(CausalityFractions {
        guarded: causality_energy_fraction(sig, arrival, 2.0 * sig.dt)?,
        raw: causality_energy_fraction(sig, arrival, 0.0)?,
    })
}

/// Source time functions with closed-form spectra.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForcingKind {
    /// `exp(-(t - tc)^2 / (2 w^2))`
    GaussianPulse,
    /// `exp(-(t - tc)^2 / (2 w^2)) sin(carrier (t - tc))`
    GaussianModulatedSine,
    /// `delta(t - tc)`
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForcingSignal {
    kind: ForcingKind,
    center: f64,
    width: f64,
    carrier: f64,
}

impl ForcingSignal {
    pub fn gaussian_pulse(center: f64, width: f64) -> Result<Self> {
        Self::checked(ForcingKind::GaussianPulse, center, width, 0.0)
    }

    pub fn gaussian_modulated_sine(center: f64, width: f64, carrier: f64) -> Result<Self> {
        if !carrier.is_finite() {
            return Err(Error::NonFinite("carrier"));
        }
        Self::checked(ForcingKind::GaussianModulatedSine, center, width, carrier)
    }

    pub fn delta(center: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite("center"));
        }
        Ok(Self {
            kind: ForcingKind::Delta,
            center,
            width: 0.0,
            carrier: 0.0,
        })
    }

    fn checked(kind: ForcingKind, center: f64, width: f64, carrier: f64) -> Result<Self> {
        if !center.is_finite() {
            return Err(Error::NonFinite("center"));
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "width must be > 0, got {width}"
            )));
        }
        Ok(Self {
            kind,
            center,
            width,
            carrier,
        })
    }

    pub fn kind(&self) -> ForcingKind {
        self.kind
    }
    pub fn center(&self) -> f64 {
        self.center
    }
    pub fn width(&self) -> f64 {
        self.width
    }
    pub fn carrier(&self) -> f64 {
        self.carrier
    }

    /// Value at `t` (the delta has no pointwise value and returns 0).
    pub fn value(&self, t: f64) -> f64 {
        let s = t - self.center;
        let env = (-s * s / (2.0 * self.width * self.width)).exp();
        match self.kind {
            ForcingKind::GaussianPulse => env,
            ForcingKind::GaussianModulatedSine => env * (self.carrier * s).sin(),
            ForcingKind::Delta => 0.0,
        }
    }

    /// Unitary transform `(2 pi)^{-1/2} \int g(t) e^{i w t} dt`.
    pub fn spectrum(&self, omega: f64) -> Complex64 {
        let shift = Complex64::from_polar(1.0, omega * self.center);
        let w = self.width;
        let gauss = |x: f64| (-0.5 * w * w * x * x).exp();
        match self.kind {
            ForcingKind::GaussianPulse => shift * w * gauss(omega),
            ForcingKind::GaussianModulatedSine => {
                let d = gauss(omega + self.carrier) - gauss(omega - self.carrier);
                shift * Complex64::new(0.0, -0.5 * w * d)
            }
            ForcingKind::Delta => shift / (2.0 * PI).sqrt(),
        }
    }
}

/// Pressure `p(r, t) = (G(r, .) * g)(t)` of a point source with time
/// function `g`, computed as the inverse transform of `sqrt(2 pi) G g`.
pub fn forward_point_source(
    model: &WaveModel,
    r: f64,
    forcing: &ForcingSignal,
    grid: FrequencyGrid,
    t0: f64,
) -> Result<RealSignal> {
    let green = sample_green_spectrum(model, r, grid)?;
    let forcing_values: Vec<Complex64> = grid.omegas().map(|w| forcing.spectrum(w)).collect();
    if forcing.kind != ForcingKind::Delta {
        let peak = forcing_values.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        let edge = forcing.spectrum(grid.omega_max()).norm();
        let ratio = edge / peak;
        if !(ratio < FORCING_EDGE_RATIO) {
            return Err(Error::ForcingBandExceedsGrid { ratio });
        }
    }
    let root = (2.0 * PI).sqrt();
    let values = green
        .values
        .iter()
        .zip(&forcing_values)
        .map(|(g, f)| root * g * f)
        .collect();
    let product = ComplexSpectrum {
        values,
        law_tag: format!("{}-source", green.law_tag),
        ..green
    };
    synthesize_time_signal(&product, t0)
}

/// Relative residual of the radial equation `u'' = k*^2 u` for
/// `u(r) = r G(r, w)`, `k* = alpha*(w) - i w / c0`, with `u''` replaced by
/// the central second difference of step `h`.
pub fn helmholtz_radial_residual(model: &WaveModel, r: f64, omega: f64, h: f64) -> Result<f64> {
    if !(h.is_finite() && h > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "step must be > 0, got {h}"
        )));
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be > 0, got {r}"
        )));
    }
    if h >= 0.5 * r {
        return Err(Error::StepTooLarge { h, r });
    }
    let u = |x: f64| -> Result<Complex64> { Ok(x * crate::spectrum::green_hat(model, x, omega)?) };
    let (um, u0, up) = (u(r - h)?, u(r)?, u(r + h)?);
    let second = (up - 2.0 * u0 + um) / (h * h);
    let k = model.law.alpha(omega) - Complex64::new(0.0, omega / model.c0);
    let rhs = k * k * u0;
    Ok((second - rhs).norm() / rhs.norm())
}

/// Applies a Fourier multiplier `m(w)` to a real signal.
pub fn apply_multiplier<F>(sig: &RealSignal, multiplier: F) -> Result<RealSignal>
where
    F: Fn(f64) -> Complex64,
{
    let mut spec = analyze_time_signal(sig)?;
    for (k, v) in spec.values.iter_mut().enumerate() {
        *v *= multiplier(spec.grid.omega(k));
    }
    synthesize_time_signal(&spec, sig.t0)
}

/// The dissipation operator `D*`, with multiplier `alpha*(w) / sqrt(2 pi)`.
pub fn apply_dissipation_operator(law: &DispersionLaw, sig: &RealSignal) -> Result<RealSignal> {
    let scale = 1.0 / (2.0 * PI).sqrt();
    let mut out = apply_multiplier(sig, |w| law.alpha(w) * scale)?;
    out.law_tag = format!("{}-dissipation", sig.law_tag);
    Ok(out)
}

/// `||G - G_M|| / ||G||` from synthesized signals of the full and tail
/// spectra on `grid`. Use [`FrequencyGrid::with_midpoint_edge`] for a
/// second-order approximation of the continuous norms; with a sample on the
/// edge the error is first order in `dw`.
pub fn time_domain_truncation_error(
    model: &WaveModel,
    r: f64,
    m: f64,
    grid: FrequencyGrid,
) -> Result<f64> {
    let full = sample_green_spectrum(model, r, grid)?;
    let tail = tail_spectrum(&full, m)?;
    let full_sig = synthesize_time_signal(&full, 0.0)?;
    let tail_sig = synthesize_time_signal(&tail, 0.0)?;
    Ok((tail_sig.energy() / full_sig.energy()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::{MediumPreset, PowerLaw};
    use crate::spectrum::truncate_spectrum;

    fn castor() -> MediumPreset {
        MediumPreset::castor_oil()
    }

    fn direct_synthesis(s: &ComplexSpectrum, t: f64) -> Complex64 {
        let dw = s.grid.step();
        let mut acc = Complex64::new(0.0, 0.0);
        for (k, v) in s.values.iter().enumerate() {
            let w = s.grid.omega(k);
            acc += v * Complex64::from_polar(1.0, -w * t);
        }
        acc * dw / (2.0 * PI).sqrt()
    }

    #[test]
    fn lossless_green_is_a_delayed_spike() {
        let model = WaveModel::lossless(0.15).unwrap();
        let grid = FrequencyGrid::new(50.0, 1024).unwrap();
        let s = sample_green_spectrum(&model, 1.0, grid).unwrap();
        let sig = synthesize_time_signal(&s, 0.0).unwrap();
        assert!((sig.peak_time() - 1.0 / 0.15).abs() <= sig.dt);
    }

    #[test]
    fn fft_matches_direct_summation_with_offset() {
        let model = castor().causal_model();
        let grid = FrequencyGrid::new(20.0, 64).unwrap();
        let s = sample_green_spectrum(&model, 0.01, grid).unwrap();
        let t0 = -3.7;
        let sig = synthesize_time_signal(&s, t0).unwrap();
        let scale = sig.peak();
        for j in [0, 1, 17, 40, 63] {
            // the real part of the direct sum realifies the Nyquist term too
            let expected = direct_synthesis(&s, sig.time(j)).re;
            assert!((sig.samples[j] - expected).abs() < 1e-12 * scale, "{j}");
        }
    }

    #[test]
    fn analysis_inverts_synthesis() {
        let model = castor().causal_model();
        let grid = FrequencyGrid::new(100.0, 256).unwrap();
        let s = sample_green_spectrum(&model, 0.05, grid).unwrap();
        let sig = synthesize_time_signal(&s, 1.25).unwrap();
        let back = analyze_time_signal(&sig).unwrap();
        let peak = s.values.iter().fold(0.0, |m: f64, v| m.max(v.norm()));
        for k in 1..grid.len() {
            assert!((back.values[k] - s.values[k]).norm() < 1e-12 * peak, "{k}");
        }
    }

    #[test]
    fn discrete_parseval() {
        let model = castor().causal_model();
        let grid = FrequencyGrid::new(200.0, 1 << 14).unwrap();
        let s = sample_green_spectrum(&model, 0.1, grid).unwrap();
        let sig = synthesize_time_signal(&s, 0.0).unwrap();
        assert!((sig.energy() / s.grid_energy() - 1.0).abs() < 1e-10);
        assert!(sig.residual_imag <= 1e-8 * sig.peak());
    }

    #[test]
    fn rejects_non_hermitian() {
        let grid = FrequencyGrid::new(10.0, 16).unwrap();
        let mut values = vec![Complex64::new(0.0, 0.0); 16];
        values[3] = Complex64::new(1.0, 0.0);
        let s = ComplexSpectrum {
            grid,
            r: 1.0,
            values,
            law_tag: "x".into(),
            cutoff: None,
        };
        assert!(matches!(
            synthesize_time_signal(&s, 0.0),
            Err(Error::NonHermitian { .. })
        ));
    }

    #[test]
    fn thermoviscous_matches_dense_direct_sum() {
        let law = PowerLaw::thermoviscous(0.2, 0.0).unwrap();
        let model = WaveModel::new(law.into(), 1.0).unwrap();
        let grid = FrequencyGrid::new(30.0, 128).unwrap();
        let s = sample_green_spectrum(&model, 1.0, grid).unwrap();
        let sig = synthesize_time_signal(&s, -2.0).unwrap();
        let peak = sig.peak();
        for j in 0..grid.len() {
            let direct = direct_synthesis(&s, sig.time(j)).re;
            assert!((sig.samples[j] - direct).abs() <= 1e-4 * peak, "{j}");
        }
        // heat-kernel shape: peak at r / c0
        assert!((sig.peak_time() - 1.0).abs() <= sig.dt);
    }

    #[test]
    fn causality_fraction_edges() {
        let sig = RealSignal {
            t0: 0.0,
            dt: 1.0,
            samples: vec![0.0, 0.0, 1.0, 2.0],
            r: 1.0,
            residual_imag: 0.0,
            law_tag: "x".into(),
        };
        assert_eq!(causality_energy_fraction(&sig, 2.0, 0.0).unwrap(), 0.0);
        assert_eq!(causality_energy_fraction(&sig, 3.0, 0.0).unwrap(), 0.2);
        assert!(matches!(
            causality_energy_fraction(&sig, 1.0, 2.0),
            Err(Error::WindowTooShort { .. })
        ));
        assert!(causality_energy_fraction(&sig, 10.0, 0.0).is_err());
    }

    #[test]
    fn causal_green_has_no_precursor() {
        let p = castor();
        let grid = FrequencyGrid::new(200.0, 1 << 16).unwrap();
        let s = sample_green_spectrum(&p.causal_model(), 1.0, grid).unwrap();
        let sig = synthesize_time_signal(&s, 0.0).unwrap();
        let f = causality_fractions(&sig, 1.0 / p.causal().c0()).unwrap();
        assert!(f.guarded < 1e-6, "{f:?}");
        assert!(f.raw >= f.guarded);
    }

    #[test]
    fn truncated_power_law_has_small_precursor() {
        let p = castor();
        let grid = FrequencyGrid::new(200.0, 1 << 16).unwrap();
        let s = sample_green_spectrum(&p.powerlaw_model(), 1.0, grid).unwrap();
        let s = truncate_spectrum(&s, 100.0).unwrap();
        let sig = synthesize_time_signal(&s, 0.0).unwrap();
        let f = causality_energy_fraction(&sig, 1.0 / p.causal().c0(), 2.0 * sig.dt).unwrap();
        assert!(f > 0.0 && f < 1e-3, "{f}");
    }

    #[test]
    fn forcing_spectra_match_quadrature() {
        let forcings = [
            ForcingSignal::gaussian_pulse(1.5, 0.7).unwrap(),
            ForcingSignal::gaussian_modulated_sine(-0.5, 0.5, 10.0).unwrap(),
        ];
        for f in forcings {
            for w in [-12.0, -1.0, 0.0, 3.0, 9.5] {
                let re = numeric::trapezoid(|t| f.value(t) * (w * t).cos(), -20.0, 20.0, 40_001);
                let im = numeric::trapezoid(|t| f.value(t) * (w * t).sin(), -20.0, 20.0, 40_001);
                let q = Complex64::new(re, im) / (2.0 * PI).sqrt();
                assert!((q - f.spectrum(w)).norm() < 1e-10, "{f:?} {w}");
            }
        }
        assert!(ForcingSignal::gaussian_pulse(0.0, 0.0).is_err());
    }

    #[test]
    fn delta_forcing_reproduces_green_function() {
        let model = castor().causal_model();
        let grid = FrequencyGrid::new(200.0, 1 << 12).unwrap();
        let d = ForcingSignal::delta(0.0).unwrap();
        let p = forward_point_source(&model, 0.1, &d, grid, 0.0).unwrap();
        let g = synthesize_time_signal(&sample_green_spectrum(&model, 0.1, grid).unwrap(), 0.0)
            .unwrap();
        let peak = g.peak();
        for (a, b) in p.samples.iter().zip(&g.samples) {
            assert!((a - b).abs() <= 1e-12 * peak);
        }
    }

    #[test]
    fn lossless_transport_delays_and_scales() {
        let c0 = 0.15;
        let r = 0.3;
        let model = WaveModel::lossless(c0).unwrap();
        let grid = FrequencyGrid::new(20.0, 1 << 12).unwrap();
        let f = ForcingSignal::gaussian_pulse(5.0, 1.0).unwrap();
        let p = forward_point_source(&model, r, &f, grid, 0.0).unwrap();
        let tau = r / c0;
        let scale = (2.0 * PI).sqrt() / (4.0 * PI * r);
        assert!((p.peak_time() - (5.0 + tau)).abs() <= p.dt);
        for j in 0..p.samples.len() {
            let expected = scale * f.value(p.time(j) - tau);
            assert!((p.samples[j] - expected).abs() < 1e-10 * scale, "{j}");
        }
    }

    #[test]
    fn forcing_band_is_checked() {
        let model = castor().causal_model();
        let grid = FrequencyGrid::new(5.0, 1 << 10).unwrap();
        let f = ForcingSignal::gaussian_pulse(0.0, 0.5).unwrap();
        assert!(matches!(
            forward_point_source(&model, 1.0, &f, grid, 0.0),
            Err(Error::ForcingBandExceedsGrid { .. })
        ));
    }

    #[test]
    fn modulated_pulse_is_attenuated() {
        let p = castor();
        let model = p.causal_model();
        let grid = FrequencyGrid::new(200.0, 1 << 16).unwrap();
        let f = ForcingSignal::gaussian_modulated_sine(5.0, 0.5, 10.0).unwrap();
        let out = forward_point_source(&model, 1.0, &f, grid, 0.0).unwrap();
        let input_peak = (0..20_000)
            .map(|i| f.value(i as f64 * 1e-3).abs())
            .fold(0.0, f64::max);
        // |p(t)| <= int |G(w)| |g(w)| dw; a weakly dispersed packet nearly
        // attains it
        let product: f64 = grid
            .omegas()
            .map(|w| {
                crate::spectrum::green_hat(&model, 1.0, w).unwrap().norm() * f.spectrum(w).norm()
            })
            .sum::<f64>()
            * grid.step();
        assert!(
            out.peak() <= product && out.peak() > 0.9 * product,
            "{} {product}",
            out.peak()
        );
        let lossless = (2.0 * PI).sqrt() * input_peak / (4.0 * PI);
        assert!(out.peak() < lossless * (-p.causal().alpha(6.0).re).exp());
    }

    #[test]
    fn helmholtz_residual_converges_quadratically() {
        let p = castor();
        // |k*| is about 9.3e3 for the dissipative laws and 67 without loss
        let lossless = WaveModel::lossless(0.15).unwrap();
        for (model, h) in [
            (p.causal_model(), 1e-5),
            (p.powerlaw_model(), 1e-5),
            (lossless, 1e-3),
        ] {
            let a = helmholtz_radial_residual(&model, 1.0, 10.0, h).unwrap();
            let b = helmholtz_radial_residual(&model, 1.0, 10.0, h / 2.0).unwrap();
            assert!((a / b - 4.0).abs() < 0.4, "{} {a} {b}", model.law);
            assert!(helmholtz_radial_residual(&model, 1.0, 10.0, h / 5.0).unwrap() < 1e-4);
        }
        let model = p.causal_model();
        assert!(matches!(
            helmholtz_radial_residual(&model, 1.0, 10.0, 0.5),
            Err(Error::StepTooLarge { .. })
        ));
    }

    fn test_pulse(grid: FrequencyGrid, center: f64) -> RealSignal {
        let f = ForcingSignal::gaussian_modulated_sine(center, 0.5, 8.0).unwrap();
        let dt = grid.dt();
        RealSignal {
            t0: 0.0,
            dt,
            samples: (0..grid.len()).map(|j| f.value(j as f64 * dt)).collect(),
            r: 1.0,
            residual_imag: 0.0,
            law_tag: "pulse".into(),
        }
    }

    #[test]
    fn dissipation_operator_of_lossless_law_is_zero() {
        let grid = FrequencyGrid::new(100.0, 1024).unwrap();
        let sig = test_pulse(grid, 10.0);
        let out = apply_dissipation_operator(&DispersionLaw::Lossless, &sig).unwrap();
        assert!(out.samples.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn dissipation_operator_twice_is_squared_symbol() {
        let law = DispersionLaw::from(*castor().causal());
        let grid = FrequencyGrid::new(100.0, 1024).unwrap();
        let sig = test_pulse(grid, 10.0);
        let twice =
            apply_dissipation_operator(&law, &apply_dissipation_operator(&law, &sig).unwrap())
                .unwrap();
        let once = apply_multiplier(&sig, |w| law.alpha(w) * law.alpha(w) / (2.0 * PI)).unwrap();
        let peak = once.peak();
        for (a, b) in twice.samples.iter().zip(&once.samples) {
            assert!((a - b).abs() <= 1e-10 * peak);
        }
    }

    #[test]
    fn time_domain_truncation_matches_spectral() {
        let p = castor();
        let model = p.causal_model();
        let grid = FrequencyGrid::with_midpoint_edge(200.0, 1 << 16, 100.0).unwrap();
        for r in [0.1, 1.0] {
            let td = time_domain_truncation_error(&model, r, 100.0, grid).unwrap();
            let sp = crate::spectrum::relative_truncation_error(&model.law, r, 100.0).unwrap();
            assert!((td / sp - 1.0).abs() < 1e-4, "{r} {td} {sp}");
        }
    }

    #[test]
    fn csv_header_records_grid() {
        let grid = FrequencyGrid::new(100.0, 16).unwrap();
        let sig = test_pulse(grid, 0.1);
        let mut out = Vec::new();
        sig.write_csv(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let mut lines = text.lines();
        assert!(lines
            .next()
            .unwrap()
            .starts_with("# law=pulse r=1.0000000000000000e0"));
        assert_eq!(lines.next().unwrap(), "t,value");
        assert_eq!(text.lines().count(), 18);
    }
}
