//! Frequency-domain Green function: sampling, band truncation and L2 norms.
//!
//! Norms are computed by adaptive quadrature over `[0, inf)` and doubled,
//! using `|G(r, -w)| = |G(r, w)|`. Semi-infinite ranges are cut where
//! `2 Re alpha*(w) r` reaches [`SpectralIntegrator::tail_exponent`] (70 by
//! default, i.e. the integrand has fallen below `e^-70` of its peak).

use std::f64::consts::PI;
use std::io::{self, Write};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::laws::{alpha_difference, DispersionLaw, WaveModel};
use crate::numeric::{self, AdaptiveSimpson};

/// Uniform grid `w_k = -omega_max + k dw`, `dw = 2 omega_max / n`,
/// `k = 0..n`. Sample `k = n/2` is `w = 0`; sample `0` is the Nyquist
/// frequency and has no mirror partner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid {
    omega_max: f64,
    n: usize,
}

impl FrequencyGrid {
    pub fn new(omega_max: f64, n: usize) -> Result<Self> {
        if !(omega_max.is_finite() && omega_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "omega_max must be > 0, got {omega_max}"
            )));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::InvalidParameter(format!(
                "sample count must be a power of two >= 16, got {n}"
            )));
        }
        Ok(Self { omega_max, n })
    }

    /// The grid of `n` samples whose edge is closest to `omega_max` among
    /// those placing `m` at the midpoint between two samples. Grid sums over
    /// `|w| < m` or `|w| > m` are then midpoint rules, second-order accurate
    /// in `dw`, with no sample on the edge itself.
    pub fn with_midpoint_edge(omega_max: f64, n: usize, m: f64) -> Result<Self> {
        let approx = Self::new(omega_max, n)?;
        if !(m.is_finite() && m > 0.0 && m < omega_max) {
            return Err(Error::InvalidParameter(format!(
                "edge {m} must lie in (0, {omega_max})"
            )));
        }
        let cells = (m / approx.step() - 0.5).round().max(0.0) + 0.5;
        Self::new(m * n as f64 / (2.0 * cells), n)
    }

    pub fn omega_max(&self) -> f64 {
        self.omega_max
    }
    pub fn len(&self) -> usize {
        self.n
    }
    pub fn is_empty(&self) -> bool {
        false
    }
    pub fn step(&self) -> f64 {
        2.0 * self.omega_max / self.n as f64
    }
    pub fn omega(&self, k: usize) -> f64 {
        // exact for k = n/2
        (k as f64 - (self.n / 2) as f64) * self.step()
    }
    pub fn omegas(&self) -> impl Iterator<Item = f64> + '_ {
        (0..self.n).map(|k| self.omega(k))
    }
    /// Time step of the conjugate grid, `2 pi / (n dw) = pi / omega_max`.
    pub fn dt(&self) -> f64 {
        PI / self.omega_max
    }
    /// Length of the periodic time window, `n dt`.
    pub fn window(&self) -> f64 {
        self.n as f64 * self.dt()
    }
    /// Index of the mirror frequency `-w_k` (the Nyquist sample maps to itself).
    pub fn mirror(&self, k: usize) -> usize {
        (self.n - k) % self.n
    }
}

/// Sampled values of `G(r, .)` on a [`FrequencyGrid`].
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSpectrum {
    pub grid: FrequencyGrid,
    pub r: f64,
    pub values: Vec<Complex64>,
    pub law_tag: String,
    pub cutoff: Option<f64>,
}

impl ComplexSpectrum {
    /// Largest `|v(-w) - conj v(w)|` relative to the largest modulus. The
    /// Nyquist sample is excluded.
    pub fn hermitian_deviation(&self) -> f64 {
        let peak = self.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if peak == 0.0 {
            return 0.0;
        }
        let mut worst: f64 = 0.0;
        for k in 1..self.values.len() {
            let m = self.grid.mirror(k);
            worst = worst.max((self.values[m] - self.values[k].conj()).norm());
        }
        worst / peak
    }

    /// Riemann sum `sum |v_k|^2 dw`, the grid approximation of the squared
    /// spectral norm.
    pub fn grid_energy(&self) -> f64 {
        self.values.iter().map(|v| v.norm_sqr()).sum::<f64>() * self.grid.step()
    }

    /// CSV: a `#` metadata line, then `omega,re,im,modulus`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        let cutoff = self
            .cutoff
            .map_or_else(|| "none".to_string(), numeric::fmt17);
        writeln!(
            w,
            "# law={} r={} cutoff={} omega_max={} n={}",
            self.law_tag,
            numeric::fmt17(self.r),
            cutoff,
            numeric::fmt17(self.grid.omega_max),
            self.grid.n
        )?;
        writeln!(w, "omega,re,im,modulus")?;
        for (k, v) in self.values.iter().enumerate() {
            writeln!(
                w,
                "{},{},{},{}",
                numeric::fmt17(self.grid.omega(k)),
                numeric::fmt17(v.re),
                numeric::fmt17(v.im),
                numeric::fmt17(v.norm())
            )?;
        }
        Ok(())
    }
}

/// Integration domain for [`SpectralIntegrator::l2_norm`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NormDomain {
    FullLine,
    /// `[-M, M]`
    Band(f64),
    /// `|w| > M`
    Tail(f64),
}

fn check_distance(r: f64) -> Result<()> {
    if r == 0.0 {
        return Err(Error::ZeroDistance);
    }
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "distance must be > 0, got {r}"
        )));
    }
    Ok(())
}

fn check_cutoff(m: f64) -> Result<()> {
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "band edge must be > 0, got {m}"
        )));
    }
    Ok(())
}

/// `G(r, w) = exp(-alpha*(w) r) / (4 pi r) * exp(i w r / c0)`.
pub fn green_hat(model: &WaveModel, r: f64, omega: f64) -> Result<Complex64> {
    check_distance(r)?;
    if !omega.is_finite() {
        return Err(Error::NonFinite("omega"));
    }
    Ok(green_unchecked(model, r, omega))
}

fn green_unchecked(model: &WaveModel, r: f64, omega: f64) -> Complex64 {
    let w = omega.abs();
    let exponent = -model.law.alpha(w) * r + Complex64::new(0.0, w * r / model.c0);
    let v = exponent.exp() / (4.0 * PI * r);
    if omega < 0.0 {
        v.conj()
    } else {
        v
    }
}

pub fn sample_green_spectrum(
    model: &WaveModel,
    r: f64,
    grid: FrequencyGrid,
) -> Result<ComplexSpectrum> {
    check_distance(r)?;
    let values = grid
        .omegas()
        .map(|w| green_unchecked(model, r, w))
        .collect();
    Ok(ComplexSpectrum {
        grid,
        r,
        values,
        law_tag: model.law.tag().to_string(),
        cutoff: None,
    })
}

/// Band-limit weight of grid frequency `w` for edge `m`: 1 inside, 0
/// outside, and 1/2 for a sample lying exactly on the edge (the value a
/// Fourier series takes at a jump, which keeps grid sums second-order
/// accurate for the hard cut).
pub fn band_weight(omega: f64, m: f64, dw: f64) -> f64 {
    let d = omega.abs() - m;
    if d.abs() <= 1e-9 * dw {
        0.5
    } else if d < 0.0 {
        1.0
    } else {
        0.0
    }
}

/// Multiplies the samples by the characteristic function of `[-M, M]`.
/// Truncating at an edge at or beyond the current cutoff is the identity, so
/// `truncate(truncate(s, M), M') == truncate(s, min(M, M'))`.
pub fn truncate_spectrum(s: &ComplexSpectrum, m: f64) -> Result<ComplexSpectrum> {
    check_cutoff(m)?;
    let mut out = s.clone();
    if let Some(existing) = s.cutoff {
        if m >= existing {
            return Ok(out);
        }
    }
    let dw = s.grid.step();
    for (k, v) in out.values.iter_mut().enumerate() {
        let w = band_weight(s.grid.omega(k), m, dw);
        if w != 1.0 {
            *v *= w;
        }
    }
    out.cutoff = Some(m);
    Ok(out)
}

/// The complement `s - truncate(s, M)`: the part of the spectrum with
/// `|w| > M` (half of any sample lying on the edge).
pub fn tail_spectrum(s: &ComplexSpectrum, m: f64) -> Result<ComplexSpectrum> {
    let band = truncate_spectrum(s, m)?;
    let mut out = s.clone();
    for (v, b) in out.values.iter_mut().zip(&band.values) {
        *v -= *b;
    }
    out.law_tag = format!("{}-tail", s.law_tag);
    Ok(out)
}

/// An L2 norm together with its squared value in log form (tails of large
/// distances underflow `f64`) and the frequency where the integration range
/// was cut, if it was.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct L2Norm {
    pub value: f64,
    pub ln_squared: f64,
    pub cut: Option<f64>,
}

impl L2Norm {
    fn from_ln_squared(ln_squared: f64, cut: Option<f64>) -> Self {
        Self {
            value: (0.5 * ln_squared).exp(),
            ln_squared,
            cut,
        }
    }
}

/// Squared norms entering the model error between two band-limited Green
/// functions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelErrorParts {
    /// `||G_a,M - G_b,M||^2`
    pub difference_sq: f64,
    /// `||G_a,M||^2`
    pub band_sq: f64,
    /// `||G_a||^2`
    pub full_sq: f64,
}

impl ModelErrorParts {
    /// Normalized by the band-limited reference, `eps_M`.
    pub fn relative_to_band(&self) -> f64 {
        (self.difference_sq / self.band_sq).sqrt()
    }
    /// Normalized by the full reference.
    pub fn relative_to_full(&self) -> f64 {
        (self.difference_sq / self.full_sq).sqrt()
    }
}

/// Quadrature settings for the spectral norms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralIntegrator {
    pub quad: AdaptiveSimpson,
    /// Cut semi-infinite ranges where `2 Re alpha*(w) r` reaches this value.
    pub tail_exponent: f64,
}

impl Default for SpectralIntegrator {
    fn default() -> Self {
        Self {
            quad: AdaptiveSimpson::default(),
            tail_exponent: 70.0,
        }
    }
}

/// Largest frequency considered when searching for a tail cut.
const SEARCH_LIMIT: f64 = 1e250;

impl SpectralIntegrator {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            quad: AdaptiveSimpson::with_rel_tol(rel_tol),
            ..Self::default()
        }
    }

    /// Frequency above `from` where `2 (Re alpha*(w) - Re alpha*(from)) r`
    /// first reaches `excess`.
    fn cut_above(&self, law: &DispersionLaw, r: f64, from: f64, excess: f64) -> Result<f64> {
        let base = law.attenuation(from);
        let g = |w: f64| 2.0 * (law.attenuation(w) - base) * r - excess;
        let start = if from > 0.0 { from } else { 1e-6 };
        let hi = numeric::expand_until(start, SEARCH_LIMIT, |w| g(w) >= 0.0).ok_or_else(|| {
            Error::UnboundedSupport(format!(
                "{} attenuation stays bounded above w = {from}",
                law.tag()
            ))
        })?;
        let lo = if hi == start { from } else { 0.5 * hi };
        if lo == hi {
            return Ok(hi);
        }
        numeric::bisect(|w| Ok(g(w)), lo, hi, 1e-10, 400, false)
    }

    /// Frequency where `2 Re alpha*(w) r` reaches the tail exponent.
    pub fn tail_cut(&self, law: &DispersionLaw, r: f64) -> Result<f64> {
        check_distance(r)?;
        self.cut_above(law, r, 0.0, self.tail_exponent)
    }

    /// `int_0^upper exp(-2 Re alpha*(w) r) dw`, the reduced half-line energy.
    fn reduced_energy(&self, law: &DispersionLaw, r: f64, upper: f64) -> Result<f64> {
        self.quad
            .integrate(|w| (-2.0 * law.attenuation(w) * r).exp(), 0.0, upper)
    }

    /// Squared norm over `[-M, M]`, `M` clipped to the tail cut when one
    /// exists. Works for the lossless law.
    pub fn band_squared(&self, law: &DispersionLaw, r: f64, m: f64) -> Result<f64> {
        check_distance(r)?;
        check_cutoff(m)?;
        let upper = match self.tail_cut(law, r) {
            Ok(cut) => m.min(cut),
            Err(Error::UnboundedSupport(_)) => m,
            Err(e) => return Err(e),
        };
        Ok(2.0 * self.reduced_energy(law, r, upper)? / (4.0 * PI * r).powi(2))
    }

    /// Squared band norms for increasing edges `ms`, accumulated panel by
    /// panel so the curve is nondecreasing by construction (separate calls
    /// to [`Self::band_squared`] agree only to the quadrature tolerance).
    pub fn band_squared_curve(&self, law: &DispersionLaw, r: f64, ms: &[f64]) -> Result<Vec<f64>> {
        check_distance(r)?;
        for m in ms {
            check_cutoff(*m)?;
        }
        if ms.windows(2).any(|p| p[1] < p[0]) {
            return Err(Error::InvalidParameter(
                "band edges must be nondecreasing".into(),
            ));
        }
        let cut = match self.tail_cut(law, r) {
            Ok(cut) => cut,
            Err(Error::UnboundedSupport(_)) => f64::INFINITY,
            Err(e) => return Err(e),
        };
        let scale = 2.0 / (4.0 * PI * r).powi(2);
        let f = |w: f64| (-2.0 * law.attenuation(w) * r).exp();
        let mut out = Vec::with_capacity(ms.len());
        let mut edge = 0.0;
        let mut acc = 0.0;
        for &m in ms {
            let upper = m.min(cut);
            if upper > edge {
                acc += if edge == 0.0 {
                    self.reduced_energy(law, r, upper)?
                } else {
                    self.quad.integrate(f, edge, upper)?
                };
                edge = upper;
            }
            out.push(acc * scale);
        }
        Ok(out)
    }

    /// Squared full-line norm and its cut frequency.
    pub fn full_squared(&self, law: &DispersionLaw, r: f64) -> Result<(f64, f64)> {
        let cut = self.tail_cut(law, r)?;
        Ok((
            2.0 * self.reduced_energy(law, r, cut)? / (4.0 * PI * r).powi(2),
            cut,
        ))
    }

    /// `ln ||G restricted to |w| > M||^2`, integrated with the integrand
    /// rescaled by `exp(2 Re alpha*(M) r)` so that it does not underflow.
    pub fn ln_tail_squared(&self, law: &DispersionLaw, r: f64, m: f64) -> Result<(f64, f64)> {
        check_distance(r)?;
        check_cutoff(m)?;
        let base = law.attenuation(m);
        let cut = self.cut_above(law, r, m, self.tail_exponent)?;
        let scaled =
            self.quad
                .integrate(|w| (-2.0 * (law.attenuation(w) - base) * r).exp(), m, cut)?;
        let ln = (2.0 * scaled).ln() - 2.0 * base * r - 2.0 * (4.0 * PI * r).ln();
        Ok((ln, cut))
    }

    /// `(int_domain |G(r, w)|^2 dw)^(1/2)`.
    pub fn l2_norm(&self, law: &DispersionLaw, r: f64, domain: NormDomain) -> Result<L2Norm> {
        check_distance(r)?;
        match domain {
            NormDomain::FullLine => {
                let (sq, cut) = self.full_squared(law, r)?;
                Ok(L2Norm::from_ln_squared(sq.ln(), Some(cut)))
            }
            NormDomain::Band(m) => {
                let sq = self.band_squared(law, r, m)?;
                let cut = self.tail_cut(law, r).ok().filter(|c| *c < m);
                Ok(L2Norm::from_ln_squared(sq.ln(), cut))
            }
            NormDomain::Tail(m) => {
                let (ln, cut) = self.ln_tail_squared(law, r, m)?;
                Ok(L2Norm::from_ln_squared(ln, Some(cut)))
            }
        }
    }

    /// Natural log of `||G - G_M|| / ||G||`.
    pub fn ln_relative_truncation_error(&self, law: &DispersionLaw, r: f64, m: f64) -> Result<f64> {
        let (ln_tail, _) = self.ln_tail_squared(law, r, m)?;
        let (full, _) = self.full_squared(law, r)?;
        Ok(0.5 * (ln_tail - full.ln()))
    }

    /// `||G - G_M|| / ||G||`, in `[0, 1]`.
    pub fn relative_truncation_error(&self, law: &DispersionLaw, r: f64, m: f64) -> Result<f64> {
        Ok(self.ln_relative_truncation_error(law, r, m)?.exp().min(1.0))
    }

    /// Squared norms of `G_a,M - G_b,M`, `G_a,M` and `G_a`. Both Green
    /// functions share the phase factor, so only `alpha*` enters.
    pub fn model_error_parts(
        &self,
        reference: &DispersionLaw,
        other: &DispersionLaw,
        r: f64,
        m: f64,
    ) -> Result<ModelErrorParts> {
        check_distance(r)?;
        check_cutoff(m)?;
        let cut_ref = self.tail_cut(reference, r)?;
        let cut = match self.tail_cut(other, r) {
            Ok(c) => c.max(cut_ref),
            Err(Error::UnboundedSupport(_)) => m,
            Err(e) => return Err(e),
        };
        let upper = m.min(cut);
        let diff = |w: f64| {
            let b = alpha_difference(reference, other, w);
            (-2.0 * reference.attenuation(w) * r).exp() * numeric::expm1_complex(-b * r).norm_sqr()
        };
        let scale = (4.0 * PI * r).powi(2);
        let difference_sq = 2.0 * self.quad.integrate(diff, 0.0, upper)? / scale;
        let band_sq = 2.0 * self.reduced_energy(reference, r, m.min(cut_ref))? / scale;
        let full_sq = 2.0 * self.reduced_energy(reference, r, cut_ref)? / scale;
        Ok(ModelErrorParts {
            difference_sq,
            band_sq,
            full_sq,
        })
    }

    /// `eps_M = ||G_c,M - G_pl,M|| / ||G_c,M||`.
    pub fn relative_model_error(
        &self,
        causal: &DispersionLaw,
        powerlaw: &DispersionLaw,
        r: f64,
        m: f64,
    ) -> Result<f64> {
        Ok(self
            .model_error_parts(causal, powerlaw, r, m)?
            .relative_to_band())
    }

    /// Band edge `M_delta` with `||G_M_delta||^2 = (1 - delta) ||G||^2`.
    ///
    /// For `delta` so small that the energy equation is already met at the
    /// tail cut, the tail cut is returned.
    pub fn find_m_delta(&self, law: &DispersionLaw, r: f64, delta: f64) -> Result<f64> {
        check_distance(r)?;
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::DeltaOutOfRange(delta));
        }
        let (_, cut) = self.full_squared(law, r)?;
        let total = self.reduced_energy(law, r, cut)?;
        solve_band_edge(
            |m| self.reduced_energy(law, r, m),
            total,
            delta,
            cut * 1e-12,
            cut,
        )
    }
}

/// Bisection for the band edge `m` in `[lo, hi]` with
/// `energy(m) = (1 - delta) total`, `energy` increasing and
/// `energy(hi) = total`. Stops at relative residual `1e-6` or 200 steps.
pub fn solve_band_edge<F>(
    energy: F,
    total: f64,
    delta: f64,
    mut lo: f64,
    mut hi: f64,
) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::DeltaOutOfRange(delta));
    }
    let target = (1.0 - delta) * total;
    let tol = 1e-6 * target;
    if (energy(hi)? - target).abs() <= tol {
        return Ok(hi);
    }
    if energy(lo)? > target {
        return Err(Error::Bisection(format!(
            "band energy exceeds target already at {lo:e}"
        )));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let e = energy(mid)?;
        if (e - target).abs() <= tol {
            return Ok(mid);
        }
        if e < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Bisection(
        "band edge did not converge in 200 iterations".into(),
    ))
}

pub fn spectral_l2_norm(law: &DispersionLaw, r: f64, domain: NormDomain) -> Result<L2Norm> {
    SpectralIntegrator::default().l2_norm(law, r, domain)
}

pub fn relative_truncation_error(law: &DispersionLaw, r: f64, m: f64) -> Result<f64> {
    SpectralIntegrator::default().relative_truncation_error(law, r, m)
}

pub fn relative_model_error_eps_m(
    causal: &DispersionLaw,
    powerlaw: &DispersionLaw,
    r: f64,
    m: f64,
) -> Result<f64> {
    SpectralIntegrator::default().relative_model_error(causal, powerlaw, r, m)
}

pub fn find_m_delta(law: &DispersionLaw, r: f64, delta: f64) -> Result<f64> {
    SpectralIntegrator::default().find_m_delta(law, r, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laws::MediumPreset;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    fn castor() -> (WaveModel, WaveModel) {
        let p = MediumPreset::castor_oil();
        (p.causal_model(), p.powerlaw_model())
    }

    #[test]
    fn midpoint_edge_grid_straddles_the_cutoff() {
        let g = FrequencyGrid::with_midpoint_edge(200.0, 1 << 16, 100.0).unwrap();
        assert!((g.omega_max() / 200.0 - 1.0).abs() < 1e-4);
        let k = (100.0 / g.step()).floor() as usize + g.len() / 2;
        assert!((g.omega(k) + 0.5 * g.step() - 100.0).abs() < 1e-9);
        assert!((g.omega(k + 1) - 0.5 * g.step() - 100.0).abs() < 1e-9);
        assert!(FrequencyGrid::with_midpoint_edge(10.0, 64, 20.0).is_err());
    }

    #[test]
    fn grid_rejects_bad_sizes() {
        assert!(FrequencyGrid::new(1.0, 8).is_err());
        assert!(FrequencyGrid::new(1.0, 24).is_err());
        assert!(FrequencyGrid::new(0.0, 16).is_err());
        let g = FrequencyGrid::new(200.0, 1 << 16).unwrap();
        assert_eq!(g.omega(1 << 15), 0.0);
        assert!(rel(g.window(), 1029.4) < 1e-4);
        assert!(rel(g.dt(), 0.015708) < 1e-4);
    }

    #[test]
    fn green_at_zero_frequency() {
        let (c, _) = castor();
        let g = green_hat(&c, 2.5, 0.0).unwrap();
        assert_eq!(g, Complex64::new(1.0 / (4.0 * PI * 2.5), 0.0));
        assert!(matches!(green_hat(&c, 0.0, 1.0), Err(Error::ZeroDistance)));
    }

    #[test]
    fn green_modulus_identity() {
        let (c, p) = castor();
        for m in [c, p] {
            for &(r, w) in &[(0.3, 17.0), (1.0, -4.0), (1e-4, 3e3)] {
                let g = green_hat(&m, r, w).unwrap();
                let expected = (-m.law.attenuation(w) * r).exp() / (4.0 * PI * r);
                assert!(rel(g.norm(), expected) < 1e-13);
            }
        }
    }

    #[test]
    fn green_castor_reference_modulus() {
        // exp(-Re alpha_c(10)) / (4 pi), mpmath
        let (c, _) = castor();
        let g = green_hat(&c, 1.0, 10.0).unwrap();
        assert!(rel(g.norm(), 0.010_934_610_970_656_002) < 1e-12);
        assert!(rel(g.norm(), 0.010926) < 2e-3);
    }

    #[test]
    fn sampled_spectrum_shape() {
        let (c, _) = castor();
        let grid = FrequencyGrid::new(5.0, 16).unwrap();
        let s = sample_green_spectrum(&c, 1.0, grid).unwrap();
        assert_eq!(s.values.len(), 16);
        assert_eq!(s.values[8], Complex64::new(1.0 / (4.0 * PI), 0.0));
        assert_eq!(s.hermitian_deviation(), 0.0);
    }

    #[test]
    fn sampled_spectrum_peaks_at_zero() {
        let (c, _) = castor();
        let grid = FrequencyGrid::new(200.0, 4096).unwrap();
        let s = sample_green_spectrum(&c, 1.0, grid).unwrap();
        let (kmax, _) = s
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
            .unwrap();
        assert_eq!(grid.omega(kmax), 0.0);
    }

    #[test]
    fn truncation_identity_and_composition() {
        let (c, _) = castor();
        let grid = FrequencyGrid::new(200.0, 4096).unwrap();
        let s = sample_green_spectrum(&c, 1.0, grid).unwrap();
        assert_eq!(truncate_spectrum(&s, 250.0).unwrap().values, s.values);
        for &(m1, m2) in &[(100.0, 50.0), (50.0, 100.0), (100.0, 100.0), (33.3, 80.0)] {
            let twice = truncate_spectrum(&truncate_spectrum(&s, m1).unwrap(), m2).unwrap();
            let once = truncate_spectrum(&s, f64::min(m1, m2)).unwrap();
            assert_eq!(twice.values, once.values);
            assert_eq!(twice.cutoff, Some(f64::min(m1, m2)));
        }
        let t = truncate_spectrum(&s, 100.0).unwrap();
        for (k, v) in t.values.iter().enumerate() {
            if grid.omega(k).abs() > 100.0 {
                assert_eq!(*v, Complex64::new(0.0, 0.0));
            }
        }
        assert!(truncate_spectrum(&s, 0.0).is_err());
    }

    #[test]
    fn truncation_removes_little_mass() {
        // Riemann sums of |G|^2 inside and outside [-100, 100]
        let (c, _) = castor();
        let grid = FrequencyGrid::new(200.0, 4096).unwrap();
        let s = sample_green_spectrum(&c, 1.0, grid).unwrap();
        let t = truncate_spectrum(&s, 100.0).unwrap();
        let removed = 1.0 - t.grid_energy() / s.grid_energy();
        assert!((0.0..1e-3).contains(&removed), "{removed}");
    }

    #[test]
    fn lossless_band_norm_is_closed_form() {
        let law = DispersionLaw::Lossless;
        for &(r, m) in &[(1.0, 100.0), (0.01, 3.0)] {
            let n = spectral_l2_norm(&law, r, NormDomain::Band(m)).unwrap();
            assert!(rel(n.value, (2.0 * m).sqrt() / (4.0 * PI * r)) < 1e-12);
        }
        assert!(matches!(
            spectral_l2_norm(&law, 1.0, NormDomain::FullLine),
            Err(Error::UnboundedSupport(_))
        ));
    }

    #[test]
    fn full_line_dominates_band() {
        let (c, _) = castor();
        let full = spectral_l2_norm(&c.law, 1.0, NormDomain::FullLine).unwrap();
        let band = spectral_l2_norm(&c.law, 1.0, NormDomain::Band(100.0)).unwrap();
        assert!(full.value >= band.value);
        // at r = 1 the cut sits below M = 100, so the two coincide
        assert!(rel(band.value, full.value) < 1e-9);
        let cut = full.cut.unwrap();
        assert!(rel(2.0 * c.law.attenuation(cut), 70.0) < 1e-8);
        let below = spectral_l2_norm(&c.law, 1.0, NormDomain::Band(10.0)).unwrap();
        let split = 1.0 - (below.value / full.value).powi(2);
        assert!(split > 6e-4 && split < 1e-2, "{split}");
    }

    #[test]
    fn truncation_error_limits() {
        let (c, _) = castor();
        let e = relative_truncation_error(&c.law, 1.0, 100.0).unwrap();
        assert!((0.0..1e-30).contains(&e));
        let e = relative_truncation_error(&c.law, 0.01, 1e5).unwrap();
        assert!((0.0..1e-12).contains(&e));
        let e = relative_truncation_error(&c.law, 0.01, 1.0).unwrap();
        assert!(e > 0.5 && e <= 1.0);
    }

    #[test]
    fn truncation_error_small_distance_reference() {
        // scipy quad in the prototype: 0.99699
        let (c, _) = castor();
        let e = relative_truncation_error(&c.law, 1e-6, 100.0).unwrap();
        assert!(rel(e, 0.996_993_686_768_792_2) < 1e-6, "{e}");
    }

    #[test]
    fn model_error_identical_laws_is_zero() {
        let (c, _) = castor();
        assert_eq!(
            relative_model_error_eps_m(&c.law, &c.law, 0.1, 100.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn m_delta_range_checked() {
        let (c, _) = castor();
        assert!(matches!(
            find_m_delta(&c.law, 1.0, 0.0),
            Err(Error::DeltaOutOfRange(_))
        ));
        assert!(matches!(
            find_m_delta(&c.law, 1.0, 1.0),
            Err(Error::DeltaOutOfRange(_))
        ));
    }

    #[test]
    fn m_delta_tiny_delta_returns_cut() {
        let (c, _) = castor();
        let integ = SpectralIntegrator::default();
        let cut = integ.tail_cut(&c.law, 1.0).unwrap();
        assert_eq!(integ.find_m_delta(&c.law, 1.0, 1e-9).unwrap(), cut);
    }

    #[test]
    fn m_delta_flat_spectrum() {
        // constant spectrum on [-W, W]: energy(m) = min(m, W), so m = (1 - delta) W
        let w = 37.0;
        for delta in [0.5, 0.1, 6e-4] {
            let m = solve_band_edge(|m| Ok(m.min(w)), w, delta, 1e-9, w).unwrap();
            assert!(rel(m, (1.0 - delta) * w) < 1e-6);
        }
    }

    #[test]
    fn m_delta_castor_oil() {
        let (c, _) = castor();
        let m = find_m_delta(&c.law, 1.0, 6e-4).unwrap();
        assert!(m > 5.0 && m < 20.0, "{m}");
        // scipy brentq on quad energies
        assert!(rel(m, 13.134_955_016_275_166) < 1e-4, "{m}");
    }
}
