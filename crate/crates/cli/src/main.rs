use std::path::PathBuf;
use std::process::ExitCode;

use causalwave::spectrum::FrequencyGrid;
use causalwave::timedomain::ForcingSignal;
use causalwave_cli::{
    cmd_bounds, cmd_causality, cmd_fig1, cmd_fig2, cmd_fig3, cmd_pulse, cmd_table1, cmd_table2,
    load_preset, write_json, write_signal, write_table, CliError, CliResult, Format, LawChoice,
    DEFAULT_BOUNDS_DISTANCES, DEFAULT_DELTA, DEFAULT_M, DEFAULT_OMEGA_MAX, DEFAULT_QUAD_TOL,
    DEFAULT_SAMPLES, DEFAULT_TABLE1_GAMMAS, DEFAULT_TABLE2_DISTANCES,
};
use clap::{Parser, Subcommand, ValueEnum};

/// Green functions of dissipative pressure waves: tables, figure data and
/// error bounds for the causal and power-law attenuation models.
#[derive(Debug, Parser)]
#[command(name = "causalwave", version)]
struct Cli {
    /// Built-in preset name or path to a preset JSON file.
    #[arg(long, global = true, default_value = "castor-oil")]
    preset: String,
    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,
    /// Table format (reports are always JSON, signals always CSV).
    #[arg(long, global = true, value_enum, default_value_t = FormatArg::Csv)]
    format: FormatArg,
    /// Edge of the synthesis frequency grid in rad/us.
    #[arg(long, global = true, default_value_t = DEFAULT_OMEGA_MAX)]
    omega_max: f64,
    /// Number of synthesis grid samples (a power of two).
    #[arg(long, global = true, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum LawArg {
    Causal,
    Powerlaw,
    Lossless,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ForcingArg {
    Gaussian,
    Modulated,
    Delta,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Small-frequency range bound for each gamma.
    Table1 {
        #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_TABLE1_GAMMAS)]
        gammas: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tau0: f64,
        #[arg(long, default_value_t = 0.1)]
        threshold: f64,
    },
    /// Relative model error eps_M for each distance.
    Table2 {
        #[arg(long, default_value_t = DEFAULT_M)]
        m: f64,
        /// Comma-separated distances in cm.
        #[arg(long = "r", value_delimiter = ',', default_values_t = DEFAULT_TABLE2_DISTANCES)]
        distances: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_QUAD_TOL)]
        tol: f64,
    },
    /// Attenuation and phase speed on [0, 60].
    Fig1 {
        #[arg(long, default_value_t = 600)]
        points: usize,
    },
    /// Attenuation and phase speed on [1, 1e8] with the phase-speed pole.
    Fig2 {
        #[arg(long, default_value_t = 801)]
        points: usize,
    },
    /// Band-norm curve and the C factor.
    Fig3 {
        #[arg(long = "r", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_M)]
        m_max: f64,
        #[arg(long, default_value_t = 500)]
        points: usize,
    },
    /// Both error bounds with the exact errors, as bounds.json.
    Bounds {
        #[arg(long, default_value_t = DEFAULT_M)]
        m: f64,
        #[arg(long = "r", value_delimiter = ',', default_values_t = DEFAULT_BOUNDS_DISTANCES)]
        distances: Vec<f64>,
        #[arg(long, default_value_t = DEFAULT_DELTA)]
        delta: f64,
    },
    /// Point-source response p(r, t), written to pulse.csv.
    Pulse {
        #[arg(long, value_enum, default_value_t = LawArg::Causal)]
        law: LawArg,
        #[arg(long = "r", default_value_t = 1.0)]
        r: f64,
        #[arg(long, value_enum, default_value_t = ForcingArg::Modulated)]
        forcing: ForcingArg,
        #[arg(long, default_value_t = 5.0)]
        center: f64,
        #[arg(long, default_value_t = 0.5)]
        width: f64,
        #[arg(long, default_value_t = 10.0)]
        carrier: f64,
        /// Time of the first output sample in us.
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
    },
    /// Pre-arrival energy of the synthesized Green functions.
    Causality {
        #[arg(long = "r", default_value_t = 1.0)]
        r: f64,
        #[arg(long, default_value_t = DEFAULT_M)]
        m: f64,
    },
}

fn run(cli: Cli) -> CliResult<Vec<PathBuf>> {
    let preset = load_preset(&cli.preset)?;
    let format = match cli.format {
        FormatArg::Csv => Format::Csv,
        FormatArg::Json => Format::Json,
    };
    let grid = || {
        FrequencyGrid::new(cli.omega_max, cli.samples).map_err(|e| CliError::Usage(e.to_string()))
    };
    let out = cli.out.as_path();
    let tables = |ts: Vec<causalwave_cli::Table>| -> CliResult<Vec<PathBuf>> {
        ts.iter().map(|t| write_table(out, t, format)).collect()
    };
    match cli.command {
        Command::Table1 {
            gammas,
            tau0,
            threshold,
        } => tables(vec![cmd_table1(&gammas, tau0, threshold)?]),
        Command::Table2 { m, distances, tol } => {
            tables(vec![cmd_table2(&preset, m, &distances, tol)?])
        }
        Command::Fig1 { points } => tables(cmd_fig1(&preset, points)?),
        Command::Fig2 { points } => tables(cmd_fig2(&preset, points)?),
        Command::Fig3 { r, m_max, points } => tables(cmd_fig3(&preset, r, m_max, points)?),
        Command::Bounds {
            m,
            distances,
            delta,
        } => {
            let report = cmd_bounds(&preset, m, &distances, delta)?;
            Ok(vec![write_json(out, "bounds.json", &report)?])
        }
        Command::Pulse {
            law,
            r,
            forcing,
            center,
            width,
            carrier,
            t0,
        } => {
            let law = match law {
                LawArg::Causal => LawChoice::Causal,
                LawArg::Powerlaw => LawChoice::Powerlaw,
                LawArg::Lossless => LawChoice::Lossless,
            };
            let f = match forcing {
                ForcingArg::Gaussian => ForcingSignal::gaussian_pulse(center, width),
                ForcingArg::Modulated => {
                    ForcingSignal::gaussian_modulated_sine(center, width, carrier)
                }
                ForcingArg::Delta => ForcingSignal::delta(center),
            }
            .map_err(|e| CliError::Usage(e.to_string()))?;
            let sig = cmd_pulse(&preset, law, r, &f, grid()?, t0)?;
            Ok(vec![write_signal(out, "pulse.csv", &sig)?])
        }
        Command::Causality { r, m } => tables(vec![cmd_causality(&preset, r, m, grid()?)?]),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(paths) => {
            for p in paths {
                println!("{}", p.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
