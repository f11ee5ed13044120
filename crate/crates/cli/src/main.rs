//! `radaim`: bound-state spectra, wavefunctions and AIM diagnostics for
//! diatomic radial potentials.
//!
//! Exit codes: 0 success, 2 invalid input, 3 a requested computation failed
//! (partial results are still written).

mod commands;
mod config;
mod output;

use std::io::{IsTerminal, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Failure;
use config::{parse_levels, parse_param, ConfigError, Format, RunConfig, Verify};

const EXIT_INVALID: u8 = 2;
const EXIT_FAILED: u8 = 3;
const EXIT_IO: u8 = 1;

#[derive(Parser)]
#[command(name = "radaim", version, about = "Bound states of diatomic radial potentials")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form energies, optionally checked by AIM and the oracle.
    Spectrum(RunArgs),
    /// Sampled closed-form radial wavefunction of one level.
    Wavefunction(RunArgs),
    /// Termination condition versus iteration count at one trial energy.
    AimTable(RunArgs),
    /// `spectrum --verify all`.
    Verify(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// mie | kratzer | coulomb | pseudoharmonic
    #[arg(long)]
    potential: Option<String>,
    /// Model parameter `key=value` (mie: V0,a; kratzer: De,re; coulomb: coupling; pseudoharmonic: V0,r0).
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    /// Levels `n:l[,n:l...]`.
    #[arg(long)]
    levels: Option<String>,
    #[arg(long)]
    hbar: Option<f64>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long, value_enum)]
    verify: Option<Verify>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file (default: standard output).
    #[arg(long)]
    out: Option<PathBuf>,
    /// JSON configuration file; flags override its values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Points of the wavefunction and oracle grids.
    #[arg(long)]
    grid_points: Option<usize>,
    /// Fixed outer radius (disables automatic grid extension).
    #[arg(long)]
    r_max: Option<f64>,
    /// AIM evaluation point.
    #[arg(long)]
    rho0: Option<f64>,
    #[arg(long)]
    k_max: Option<usize>,
    /// Angular momentum for aim-table.
    #[arg(long)]
    l: Option<usize>,
    /// Trial energy for aim-table.
    #[arg(long, allow_hyphen_values = true)]
    energy: Option<f64>,
    /// Print the resolved configuration as JSON and exit.
    #[arg(long)]
    dump_config: bool,
}

impl RunArgs {
    /// Defaults, then the config file, then flags.
    fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.potential {
            c.potential = Some(p.clone());
        }
        for p in &self.params {
            let (k, v) = parse_param(p)?;
            c.params.insert(k, v);
        }
        if let Some(l) = &self.levels {
            c.levels = parse_levels(l)?;
        }
        set(&mut c.units.hbar, self.hbar);
        set(&mut c.units.mu, self.mu);
        set(&mut c.output.verify, self.verify);
        set(&mut c.output.format, self.format);
        if self.out.is_some() {
            c.output.path = self.out.clone();
        }
        set(&mut c.grid.points, self.grid_points);
        if self.r_max.is_some() {
            c.grid.r_max = self.r_max;
        }
        if self.rho0.is_some() {
            c.aim.rho0 = self.rho0;
        }
        set(&mut c.aim.k_max, self.k_max);
        set(&mut c.aim.l, self.l);
        if self.energy.is_some() {
            c.aim.energy = self.energy;
        }
        Ok(c)
    }
}

fn set<T: Copy>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn diag(msg: &str) {
    let color = std::env::var_os("NO_COLOR").is_none() && std::io::stderr().is_terminal();
    if color {
        eprintln!("\x1b[31merror:\x1b[0m {msg}");
    } else {
        eprintln!("error: {msg}");
    }
}

fn write_output(cfg: &RunConfig, text: &str) -> Result<(), String> {
    match &cfg.output.path {
        Some(p) => std::fs::write(p, text).map_err(|e| format!("cannot write {}: {e}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| format!("cannot write output: {e}"))
        }
    }
}

enum Outcome {
    Done(String),
    Partial(String, Vec<Failure>),
    Failed(Vec<Failure>),
}

fn run(command: &Command, cfg: &RunConfig) -> Result<Outcome, ConfigError> {
    let fmt = cfg.output.format;
    Ok(match command {
        Command::Spectrum(_) | Command::Verify(_) => {
            let (rows, failures) = commands::spectrum(cfg)?;
            let text = output::spectrum(cfg, &rows, fmt);
            if failures.is_empty() {
                Outcome::Done(text)
            } else {
                Outcome::Partial(text, failures)
            }
        }
        Command::Wavefunction(_) => match commands::wavefunction(cfg)? {
            Ok(w) => Outcome::Done(output::wavefunction(cfg, &w, fmt)),
            Err(f) => Outcome::Failed(vec![f]),
        },
        Command::AimTable(_) => match commands::aim_table(cfg)? {
            Ok(t) => Outcome::Done(output::aim_table(cfg, &t, fmt)),
            Err(f) => Outcome::Failed(vec![f]),
        },
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let args = match &cli.command {
        Command::Spectrum(a) | Command::Wavefunction(a) | Command::AimTable(a) | Command::Verify(a) => a,
    };
    let mut cfg = match args.resolve() {
        Ok(c) => c,
        Err(e) => {
            diag(&e.to_string());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    if matches!(cli.command, Command::Verify(_)) {
        cfg.output.verify = Verify::All;
    }
    if args.dump_config {
        print!("{}", cfg.to_json());
        return ExitCode::SUCCESS;
    }
    let outcome = match run(&cli.command, &cfg) {
        Ok(o) => o,
        Err(e) => {
            diag(&e.to_string());
            return ExitCode::from(EXIT_INVALID);
        }
    };
    let (text, failures) = match outcome {
        Outcome::Done(t) => (Some(t), vec![]),
        Outcome::Partial(t, f) => (Some(t), f),
        Outcome::Failed(f) => (None, f),
    };
    if let Some(t) = text {
        if let Err(e) = write_output(&cfg, &t) {
            diag(&e);
            return ExitCode::from(EXIT_IO);
        }
    }
    for f in &failures {
        diag(&format!("{}: {}", f.what, f.error));
    }
    if failures.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}
