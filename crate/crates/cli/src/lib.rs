//! Reproduction commands behind the `causalwave` binary.
//!
//! Each `cmd_*` function computes its result in memory ([`Table`] or a
//! serializable report); writing files is left to [`write_table`] and
//! [`write_json`] so the computations can be tested without touching disk.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use causalwave::bounds::{
    self, c_factor, theorem1_constants, EnvelopeCheck, Theorem1Constants, Theorem2Report,
    PRINTED_THEOREM1_COEFFICIENT,
};
use causalwave::laws::{self, phase_speed, PresetFile};
use causalwave::numeric::fmt17;
use causalwave::spectrum::{
    sample_green_spectrum, truncate_spectrum, FrequencyGrid, SpectralIntegrator,
};
use causalwave::timedomain::{self, ForcingSignal, RealSignal};
use causalwave::{DispersionLaw, Error, MediumPreset, WaveModel};
use serde::Serialize;
use serde_json::{json, Value};

pub const DEFAULT_TABLE2_DISTANCES: [f64; 4] = [1e-6, 1e-3, 1e-1, 10.0];
pub const DEFAULT_BOUNDS_DISTANCES: [f64; 5] = [1e-6, 1e-4, 1e-2, 1.0, 10.0];
pub const DEFAULT_TABLE1_GAMMAS: [f64; 3] = [1.1, 1.5, 2.0];
pub const DEFAULT_M: f64 = 100.0;
pub const DEFAULT_DELTA: f64 = 6e-4;
pub const DEFAULT_OMEGA_MAX: f64 = 200.0;
pub const DEFAULT_SAMPLES: usize = 1 << 16;
pub const DEFAULT_QUAD_TOL: f64 = 1e-9;
/// Upper end of the frequency range checked for the envelope hypothesis.
pub const ENVELOPE_CHECK_MAX: f64 = 1e16;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] Error),
    #[error("output: {0}")]
    Io(#[from] io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for bad input, 3 for failures of the numerics, 1 for I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Model(e) if e.is_numerical() => 3,
            CliError::Model(_) => 2,
            CliError::Io(_) | CliError::Json(_) => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// A table cell. Non-finite numbers print as `inf`/`NaN` in CSV and as
/// `null` in JSON.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }

    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => fmt17(*v),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) if v.is_finite() => json!(v),
            Cell::Num(_) => Value::Null,
            Cell::Text(s) => json!(s),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

/// A named result table plus the settings that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub settings: Value,
}

impl Table {
    fn new(name: &str, columns: &[&str], settings: Value) -> Self {
        Self {
            name: name.to_string(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            settings,
        }
    }

    fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i].clone()).collect())
    }

    /// The numeric values of a column (text cells are skipped).
    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        Some(self.column(name)?.iter().filter_map(Cell::as_f64).collect())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(w, "{}", cells.join(","))?;
        }
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(Cell::json).collect()))
            .collect();
        json!({
            "table": self.name,
            "settings": self.settings,
            "columns": self.columns,
            "rows": rows,
        })
    }
}

/// Resolves `--preset`: a built-in name or a path to a preset JSON file.
pub fn load_preset(spec: &str) -> CliResult<MediumPreset> {
    if let Some(p) = MediumPreset::builtin(spec) {
        return Ok(p);
    }
    let path = Path::new(spec);
    if path.exists() {
        return Ok(MediumPreset::load(path)?);
    }
    Err(CliError::Usage(format!(
        "unknown preset '{spec}' (not a built-in name or an existing file)"
    )))
}

fn preset_json(p: &MediumPreset) -> Value {
    let rec: PresetFile = p.to_file_record();
    json!({
        "name": rec.name,
        "gamma": rec.gamma,
        "c0": rec.c0,
        "alpha1": rec.alpha1,
        "tau0": rec.tau0,
        "a1": p.powerlaw().a1(),
        "a2": p.powerlaw().a2(),
    })
}

fn check_distances(rs: &[f64]) -> CliResult<()> {
    if rs.is_empty() {
        return Err(CliError::Usage("the distance list is empty".into()));
    }
    if let Some(r) = rs.iter().find(|r| !(r.is_finite() && **r > 0.0)) {
        return Err(CliError::Usage(format!(
            "distances must be positive, got {r}"
        )));
    }
    Ok(())
}

fn check_points(points: usize) -> CliResult<()> {
    if points < 2 {
        return Err(CliError::Usage(format!(
            "need at least 2 points, got {points}"
        )));
    }
    Ok(())
}

/// Upper ends `M` of the small-frequency range for each `gamma`.
pub fn cmd_table1(gammas: &[f64], tau0: f64, threshold: f64) -> CliResult<Table> {
    if gammas.is_empty() {
        return Err(CliError::Usage("the gamma list is empty".into()));
    }
    let mut t = Table::new(
        "table1",
        &["gamma", "small_frequency_bound"],
        json!({ "tau0": tau0, "threshold": threshold }),
    );
    for &g in gammas {
        t.push(vec![
            g.into(),
            laws::small_frequency_bound(g, tau0, threshold)?.into(),
        ]);
    }
    Ok(t)
}

/// `eps_M` between the band-limited causal and power-law Green functions.
pub fn cmd_table2(
    preset: &MediumPreset,
    m: f64,
    distances: &[f64],
    quad_tol: f64,
) -> CliResult<Table> {
    check_distances(distances)?;
    let integ = SpectralIntegrator::with_rel_tol(quad_tol);
    let causal = DispersionLaw::from(*preset.causal());
    let powerlaw = DispersionLaw::from(*preset.powerlaw());
    let mut t = Table::new(
        "table2",
        &[
            "r",
            "eps_m",
            "eps_m_over_full_norm",
            "difference_norm",
            "causal_band_norm",
        ],
        json!({
            "preset": preset_json(preset),
            "m": m,
            "quadrature_rel_tol": quad_tol,
            "tail_exponent": integ.tail_exponent,
        }),
    );
    for &r in distances {
        let parts = integ.model_error_parts(&causal, &powerlaw, r, m)?;
        t.push(vec![
            r.into(),
            parts.relative_to_band().into(),
            parts.relative_to_full().into(),
            parts.difference_sq.sqrt().into(),
            parts.band_sq.sqrt().into(),
        ]);
    }
    Ok(t)
}

fn phase_speed_or_pole(model: &WaveModel, w: f64) -> CliResult<f64> {
    match phase_speed(model, w) {
        Ok(c) => Ok(c),
        Err(Error::SingularPhaseSpeed { .. }) => Ok(f64::INFINITY),
        Err(e) => Err(e.into()),
    }
}

/// Attenuation and phase speed of both laws on `w_i = 60 i / points`,
/// `i = 1..=points`.
pub fn cmd_fig1(preset: &MediumPreset, points: usize) -> CliResult<Vec<Table>> {
    check_points(points)?;
    let settings = json!({ "preset": preset_json(preset), "omega_max": 60.0, "points": points });
    let (cm, pm) = (preset.causal_model(), preset.powerlaw_model());
    let mut att = Table::new(
        "fig1_attenuation",
        &["omega", "alpha_causal", "alpha_powerlaw"],
        settings.clone(),
    );
    let mut speed = Table::new(
        "fig1_phasespeed",
        &["omega", "c_causal", "c_powerlaw"],
        settings,
    );
    for i in 1..=points {
        let w = 60.0 * i as f64 / points as f64;
        att.push(vec![
            w.into(),
            cm.law.attenuation(w).into(),
            pm.law.attenuation(w).into(),
        ]);
        speed.push(vec![
            w.into(),
            phase_speed_or_pole(&cm, w)?.into(),
            phase_speed_or_pole(&pm, w)?.into(),
        ]);
    }
    Ok(vec![att, speed])
}

/// The same curves on a log grid over `[1, 1e8]`, with the power-law
/// phase-speed pole inserted and flagged in the `pole` column.
pub fn cmd_fig2(preset: &MediumPreset, points: usize) -> CliResult<Vec<Table>> {
    check_points(points)?;
    let omega1 = laws::powerlaw_phase_singularity(preset)?;
    let null = laws::powerlaw_dispersion_null(preset.powerlaw())?;
    let settings = json!({
        "preset": preset_json(preset),
        "omega_min": 1.0,
        "omega_max": 1e8,
        "points": points,
        "phase_speed_pole": omega1,
        "dispersion_null": null,
    });
    let (cm, pm) = (preset.causal_model(), preset.powerlaw_model());
    let mut grid: Vec<(f64, f64)> = (0..points)
        .map(|i| (10f64.powf(8.0 * i as f64 / (points - 1) as f64), 0.0))
        .collect();
    grid.push((omega1, 1.0));
    grid.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut att = Table::new(
        "fig2_attenuation",
        &["omega", "alpha_causal", "alpha_powerlaw"],
        settings.clone(),
    );
    let mut speed = Table::new(
        "fig2_phasespeed",
        &["omega", "c_causal", "c_powerlaw", "pole"],
        settings.clone(),
    );
    for (w, pole) in grid {
        att.push(vec![
            w.into(),
            cm.law.attenuation(w).into(),
            pm.law.attenuation(w).into(),
        ]);
        let c_pl = if pole == 1.0 {
            f64::INFINITY
        } else {
            phase_speed_or_pole(&pm, w)?
        };
        speed.push(vec![
            w.into(),
            phase_speed_or_pole(&cm, w)?.into(),
            c_pl.into(),
            pole.into(),
        ]);
    }
    let mut marker = Table::new("fig2_pole", &["quantity", "omega"], settings);
    marker.push(vec!["phase_speed_pole".into(), omega1.into()]);
    marker.push(vec!["dispersion_null".into(), null.into()]);
    Ok(vec![att, speed, marker])
}

/// Band-norm curve `M0 -> ||G_c,M0||` on `M0_i = m_max i / points` and the
/// factor `C(r, w)` on a log grid over `[1e-2, 1e4]`.
pub fn cmd_fig3(preset: &MediumPreset, r: f64, m_max: f64, points: usize) -> CliResult<Vec<Table>> {
    check_distances(&[r])?;
    check_points(points)?;
    let causal = DispersionLaw::from(*preset.causal());
    let powerlaw = DispersionLaw::from(*preset.powerlaw());
    let integ = SpectralIntegrator::default();
    let settings = json!({
        "preset": preset_json(preset),
        "r": r,
        "m_max": m_max,
        "points": points,
        "quadrature_rel_tol": DEFAULT_QUAD_TOL,
    });
    let ms: Vec<f64> = (1..=points)
        .map(|i| m_max * i as f64 / points as f64)
        .collect();
    let curve = integ.band_squared_curve(&causal, r, &ms)?;
    let (full, _) = integ.full_squared(&causal, r)?;
    let mut band = Table::new(
        "fig3_band_norm",
        &["m0", "band_norm", "energy_fraction"],
        settings.clone(),
    );
    for (m, sq) in ms.iter().zip(&curve) {
        band.push(vec![(*m).into(), sq.sqrt().into(), (sq / full).into()]);
    }
    let mut cf = Table::new("fig3_c_factor", &["omega", "c", "c_squared"], settings);
    for i in 0..points {
        let w = 10f64.powf(-2.0 + 6.0 * i as f64 / (points - 1) as f64);
        let c = c_factor(&causal, &powerlaw, r, w);
        cf.push(vec![w.into(), c.into(), (c * c).into()]);
    }
    Ok(vec![band, cf])
}

/// Truncation bound and exact truncation error at one distance.
#[derive(Debug, Clone, Serialize)]
pub struct TruncationEntry {
    pub r: f64,
    /// `ln` of the bound with the printed coefficient 0.0828.
    pub ln_bound_printed: f64,
    /// `ln` of the bound with the coefficient from its formula.
    pub ln_bound_formula: f64,
    pub ln_exact_error: f64,
    pub exact_error: f64,
    pub holds_printed: bool,
    pub holds_formula: bool,
    /// Frequency beyond which `|G_c|^2` is below `e^-70` of its peak.
    pub effective_support: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundsReport {
    pub preset: Value,
    pub settings: Value,
    pub theorem1_constants: Theorem1Constants,
    pub rate: f64,
    pub coefficient_formula: f64,
    pub coefficient_printed: f64,
    pub envelope: EnvelopeCheck,
    pub truncation: Vec<TruncationEntry>,
    pub model_error: Vec<Theorem2Report>,
}

pub fn cmd_bounds(
    preset: &MediumPreset,
    m: f64,
    distances: &[f64],
    delta: f64,
) -> CliResult<BoundsReport> {
    check_distances(distances)?;
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CliError::Usage(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    let integ = SpectralIntegrator::default();
    let causal = DispersionLaw::from(*preset.causal());
    let powerlaw = DispersionLaw::from(*preset.powerlaw());
    let constants = theorem1_constants(preset, m)?;
    let envelope = bounds::verify_envelope(preset.causal(), &constants, ENVELOPE_CHECK_MAX)?;

    let mut truncation = Vec::new();
    let mut model_error = Vec::new();
    for &r in distances {
        let ln_exact = integ.ln_relative_truncation_error(&causal, r, m)?;
        let ln_printed =
            bounds::ln_truncation_bound(PRINTED_THEOREM1_COEFFICIENT, constants.rate(), r)?;
        let ln_formula = bounds::ln_truncation_bound(constants.coefficient(), constants.rate(), r)?;
        truncation.push(TruncationEntry {
            r,
            ln_bound_printed: ln_printed,
            ln_bound_formula: ln_formula,
            ln_exact_error: ln_exact,
            exact_error: ln_exact.exp(),
            holds_printed: ln_printed >= ln_exact,
            holds_formula: ln_formula >= ln_exact,
            effective_support: integ.tail_cut(&causal, r)?,
        });
        model_error.push(bounds::theorem2_report_with(
            &integ, &causal, &powerlaw, r, m, delta,
        )?);
    }
    Ok(BoundsReport {
        preset: preset_json(preset),
        settings: json!({
            "m": m,
            "delta": delta,
            "quadrature_rel_tol": DEFAULT_QUAD_TOL,
            "tail_exponent": integ.tail_exponent,
            "a0_slope_factor": bounds::A0_SLOPE_FACTOR,
            "envelope_points": bounds::ENVELOPE_POINTS,
            "envelope_omega_max": ENVELOPE_CHECK_MAX,
            "extrema_samples": bounds::EXTREMA_SAMPLES,
        }),
        rate: constants.rate(),
        coefficient_formula: constants.coefficient(),
        coefficient_printed: PRINTED_THEOREM1_COEFFICIENT,
        theorem1_constants: constants,
        envelope,
        truncation,
        model_error,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LawChoice {
    Causal,
    Powerlaw,
    Lossless,
}

pub fn model_for(preset: &MediumPreset, law: LawChoice) -> WaveModel {
    match law {
        LawChoice::Causal => preset.causal_model(),
        LawChoice::Powerlaw => preset.powerlaw_model(),
        LawChoice::Lossless => WaveModel {
            law: DispersionLaw::Lossless,
            c0: preset.c0(),
        },
    }
}

/// Point-source response at distance `r`.
pub fn cmd_pulse(
    preset: &MediumPreset,
    law: LawChoice,
    r: f64,
    forcing: &ForcingSignal,
    grid: FrequencyGrid,
    t0: f64,
) -> CliResult<RealSignal> {
    check_distances(&[r])?;
    Ok(timedomain::forward_point_source(
        &model_for(preset, law),
        r,
        forcing,
        grid,
        t0,
    )?)
}

/// Pre-arrival energy fractions of the causal Green function and of the
/// band-limited power-law Green function, on `grid` and on the grid with
/// twice the samples.
pub fn cmd_causality(
    preset: &MediumPreset,
    r: f64,
    m: f64,
    grid: FrequencyGrid,
) -> CliResult<Table> {
    check_distances(&[r])?;
    let arrival = r / preset.c0();
    let fine = FrequencyGrid::new(grid.omega_max(), 2 * grid.len())?;
    let mut t = Table::new(
        "causality",
        &[
            "law",
            "samples",
            "arrival",
            "guard",
            "fraction_guarded",
            "fraction_raw",
            "residual_imag",
        ],
        json!({
            "preset": preset_json(preset),
            "r": r,
            "m": m,
            "omega_max": grid.omega_max(),
        }),
    );
    for (tag, model, cutoff) in [
        ("causal", preset.causal_model(), None),
        ("powerlaw-band", preset.powerlaw_model(), Some(m)),
    ] {
        for g in [grid, fine] {
            let mut s = sample_green_spectrum(&model, r, g)?;
            if let Some(m) = cutoff {
                s = truncate_spectrum(&s, m)?;
            }
            let sig = timedomain::synthesize_time_signal(&s, 0.0)?;
            let f = timedomain::causality_fractions(&sig, arrival)?;
            t.push(vec![
                tag.into(),
                (g.len() as f64).into(),
                arrival.into(),
                (2.0 * sig.dt).into(),
                f.guarded.into(),
                f.raw.into(),
                sig.residual_imag.into(),
            ]);
        }
    }
    Ok(t)
}

fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir)?;
    Ok(())
}

/// Writes `table` to `dir/<name>.<csv|json>` and returns the path.
pub fn write_table(dir: &Path, table: &Table, format: Format) -> CliResult<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(format!("{}.{}", table.name, format.extension()));
    let mut buf = Vec::new();
    match format {
        Format::Csv => table.write_csv(&mut buf)?,
        Format::Json => {
            serde_json::to_writer_pretty(&mut buf, &table.to_json())?;
            buf.push(b'\n');
        }
    }
    fs::write(&path, buf)?;
    Ok(path)
}

pub fn write_json<T: Serialize>(dir: &Path, name: &str, value: &T) -> CliResult<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut buf = serde_json::to_vec_pretty(value)?;
    buf.push(b'\n');
    fs::write(&path, buf)?;
    Ok(path)
}

pub fn write_signal(dir: &Path, name: &str, sig: &RealSignal) -> CliResult<PathBuf> {
    ensure_dir(dir)?;
    let path = dir.join(name);
    let mut buf = Vec::new();
    sig.write_csv(&mut buf)?;
    fs::write(&path, buf)?;
    Ok(path)
}
