use std::fs;
use std::io::Write;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use genpair_core::bethe::{SeedStrategy, SolverOptions};
use genpair_core::model::{builtin, ModelSpace};
use genpair_core::oracle::{commutator_check, DEFAULT_DIM_CAP};
use genpair_core::spectrum::{reproduce_table, spectrum_report, Mode, SpectrumReport};
use genpair_core::state::{nonzero_state, zero_state, ExpandedState};
use genpair_core::Error;
use serde::Serialize;

mod format;

use format::Format;

const ALGEBRA_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(
    name = "genpair",
    version,
    about = "Exact spectra of the separable pairing Hamiltonian"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve sectors of one model.
    Solve {
        /// JSON model file or built-in model name.
        #[arg(long)]
        config: String,
        /// Inclusive pair-number range `a..b` (or a single `N`); default: every sector.
        #[arg(long, value_parser = parse_range::<usize>)]
        pairs: Option<RangeInclusive<usize>>,
        /// `oracle`, `bethe` or `cross` (both, matched level by level).
        #[arg(long, default_value = "cross", value_parser = parse_mode)]
        mode: Mode,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        /// Seed of the random strategy.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// `continuation`, `bracket`, `random` or `oracle-seeded`.
        #[arg(long, default_value = "continuation", value_parser = parse_strategy)]
        strategy: SeedStrategy,
        /// Newton residual tolerance.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
        /// Start budget of the random and oracle-seeded strategies.
        #[arg(long, default_value_t = 400)]
        max_starts: usize,
        /// Write rebuilt eigenvectors as JSON files into this directory.
        #[arg(long)]
        dump_states: Option<PathBuf>,
        /// Write the report here instead of standard output.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare lowest levels with the published tables.
    Tables {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=2))]
        which: u8,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the commutation relations of the generators on the Fock space.
    CheckAlgebra {
        #[arg(long)]
        config: String,
        /// Inclusive index range `a..b` for `m` and `n`.
        #[arg(long, default_value = "-2..2", allow_hyphen_values = true, value_parser = parse_range::<i32>)]
        m_range: RangeInclusive<i32>,
        #[arg(long, default_value_t = DEFAULT_DIM_CAP)]
        dim_cap: usize,
        #[arg(long, value_enum, default_value = "table")]
        format: Format,
    },
}

fn parse_range<T>(s: &str) -> Result<RangeInclusive<T>, String>
where
    T: std::str::FromStr + PartialOrd + Copy,
{
    let parse = |v: &str| {
        v.trim()
            .parse::<T>()
            .map_err(|_| format!("`{v}` is not a valid bound"))
    };
    let (lo, hi) = match s.split_once("..") {
        Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
        None => {
            let v = parse(s)?;
            (v, v)
        }
    };
    if lo > hi {
        return Err(format!("empty range `{s}`"));
    }
    Ok(lo..=hi)
}

fn parse_mode(s: &str) -> Result<Mode, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<SeedStrategy, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

/// Resolves a config argument to `(case name, model)`: an existing file
/// is parsed as JSON, otherwise a built-in name is looked up.
fn load_model(config: &str) -> Result<(String, ModelSpace), String> {
    let path = Path::new(config);
    if path.is_file() {
        let text = fs::read_to_string(path).map_err(|e| format!("{config}: {e}"))?;
        let model = ModelSpace::from_json_str(&text).map_err(|e| format!("{config}: {e}"))?;
        let case = path
            .file_stem()
            .map_or(config.into(), |s| s.to_string_lossy().into_owned());
        return Ok((case, model));
    }
    builtin::get(config)
        .map(|m| (config.to_string(), m))
        .ok_or_else(|| {
            format!(
                "{config}: no such file or built-in model (built-ins: {})",
                builtin::NAMES.join(", ")
            )
        })
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), String> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| format!("{}: {e}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| format!("stdout: {e}"))
        }
    }
}

#[derive(Serialize)]
struct DumpedState {
    kind: &'static str,
    h: f64,
    #[serde(flatten)]
    state: ExpandedState,
}

fn dump_states(model: &ModelSpace, report: &SpectrumReport, dir: &Path) -> Result<(), String> {
    fs::create_dir_all(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
    for sector in &report.sectors {
        let mut states = Vec::new();
        for line in &sector.lines {
            for sol in &line.rapidities {
                let state = nonzero_state(model, sol).map_err(|e| e.to_string())?;
                states.push(DumpedState {
                    kind: "nonzero",
                    h: sol.h,
                    state,
                });
            }
            for roots in &line.zero_modes {
                let state = zero_state(model, roots).map_err(|e| e.to_string())?;
                states.push(DumpedState {
                    kind: "zero",
                    h: 0.0,
                    state,
                });
            }
        }
        let path = dir.join(format!("{}_N{}.json", report.case, sector.pairs));
        fs::write(&path, format::json(&states)).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve {
            config,
            pairs,
            mode,
            format,
            seed,
            strategy,
            tolerance,
            max_starts,
            dump_states: dump_dir,
            out,
        } => {
            if tolerance.is_nan() || tolerance <= 0.0 {
                return Err("--tolerance must be positive".into());
            }
            let (case, model) = load_model(&config)?;
            let cap = model.omega_total();
            let pairs = pairs.unwrap_or(0..=cap);
            if *pairs.end() > cap {
                return Err(format!(
                    "--pairs {}..{} exceeds the capacity {cap}",
                    pairs.start(),
                    pairs.end()
                ));
            }
            let opts = SolverOptions {
                tolerance,
                accept_tolerance: SolverOptions::default().accept_tolerance.max(tolerance),
                strategy,
                max_starts,
                seed,
                ..SolverOptions::default()
            };
            let report =
                spectrum_report(&case, &model, pairs, mode, &opts).map_err(|e| e.to_string())?;
            emit(
                &format::spectrum(std::slice::from_ref(&report), format),
                out.as_deref(),
            )?;
            if let Some(dir) = dump_dir {
                dump_states(&model, &report, &dir)?;
            }
            if report.is_complete() {
                return Ok(ExitCode::SUCCESS);
            }
            for s in report.sectors.iter().filter(|s| !s.is_complete()) {
                eprintln!(
                    "incomplete: N={} found {} of {} nonzero levels and {} of {} zero modes; \
                     unmatched oracle levels {:?}",
                    s.pairs,
                    s.bethe_nonzero.unwrap_or(0),
                    s.expected_nonzero,
                    s.bethe_zero.unwrap_or(0),
                    s.expected_zero,
                    s.missing
                );
            }
            Ok(ExitCode::from(2))
        }
        Command::Tables { which, format, out } => {
            let report =
                reproduce_table(which, &SolverOptions::default()).map_err(|e| e.to_string())?;
            emit(&format::table(&report, format), out.as_deref())?;
            Ok(ExitCode::SUCCESS)
        }
        Command::CheckAlgebra {
            config,
            m_range,
            dim_cap,
            format,
        } => {
            let (_, model) = load_model(&config)?;
            let report = commutator_check(&model, *m_range.start(), *m_range.end(), dim_cap)
                .map_err(|e| e.to_string())?;
            emit(&format::algebra(&report, ALGEBRA_TOL, format), None)?;
            Ok(if report.passes(ALGEBRA_TOL) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::FAILURE
        }
    }
}
