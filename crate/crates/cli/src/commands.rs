//! The computations behind each subcommand.

use std::collections::BTreeMap;

use radaim_core::{
    delta_sequence, find_eigenvalues, solve_levels_with, Error, GridSpec, RadialWavefunction, SpectrumResult,
};

use crate::config::{ConfigError, RunConfig};

/// Failure of a computation after validation succeeded.
#[derive(Debug)]
pub struct Failure {
    pub what: String,
    pub error: Error,
}

/// Short status code for the CSV `status` column.
pub fn error_code(e: &Error) -> &'static str {
    match e {
        Error::Pole { .. } => "pole",
        Error::ZeroDenominator => "zero_denominator",
        Error::Overflow { .. } => "overflow",
        Error::NoConvergence { .. } => "no_convergence",
        Error::BracketTooNarrow { .. } => "bracket_too_narrow",
        Error::DegenerateSeed { .. } => "degenerate_seed",
        Error::Domain(_) => "domain",
        Error::Quadrature(_) => "quadrature",
        Error::Grid(_) => "grid",
        Error::UnconvergedLevel { .. } => "unconverged_level",
    }
}

/// Errors that mean the inputs were unusable rather than that a solve failed.
fn as_validation(e: &Error) -> Option<ConfigError> {
    matches!(e, Error::Domain(_) | Error::Grid(_)).then(|| ConfigError::Invalid(e.to_string()))
}

pub struct SpectrumRow {
    pub result: SpectrumResult,
    pub status: String,
}

/// One row per distinct requested level, ordered by `(ℓ, n)`.
pub fn spectrum(cfg: &RunConfig) -> Result<(Vec<SpectrumRow>, Vec<Failure>), ConfigError> {
    let model = cfg.model()?;
    cfg.check_levels()?;
    let verify = cfg.output.verify;
    let aim_opts = if verify.aim() { Some(cfg.aim_options()?) } else { None };
    let oracle_opts = if verify.oracle() { Some(cfg.oracle_options()?) } else { None };

    let mut by_l: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for &(n, l) in &cfg.levels {
        by_l.entry(l).or_default().push(n);
    }
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for (l, mut ns) in by_l {
        ns.sort_unstable();
        ns.dedup();
        let count = ns.last().copied().unwrap_or(0) + 1;

        let aim = aim_opts.as_ref().map(|o| {
            let bracket = cfg.aim.bracket.unwrap_or_else(|| model.default_bracket(l, count));
            find_eigenvalues(&model, l, count, bracket, o)
        });
        let oracle = oracle_opts.as_ref().map(|o| solve_levels_with(&model, l, count, o));

        let mut status = Vec::new();
        for (tag, err) in [
            ("aim", aim.as_ref().and_then(|r| r.as_ref().err())),
            ("oracle", oracle.as_ref().and_then(|r| r.as_ref().err())),
        ] {
            if let Some(e) = err {
                if let Some(v) = as_validation(e) {
                    return Err(v);
                }
                status.push(format!("{tag}:{}", error_code(e)));
                failures.push(Failure { what: format!("{tag} l={l}"), error: e.clone() });
            }
        }
        let status = if status.is_empty() { "ok".to_string() } else { status.join(";") };
        for n in ns {
            let e_aim = aim.as_ref().and_then(|r| r.as_ref().ok()).map(|r| r[n].energy);
            let e_oracle = oracle.as_ref().and_then(|r| r.as_ref().ok()).map(|r| r[n]);
            rows.push(SpectrumRow {
                result: SpectrumResult::new(n, l, model.closed_form_energy(n, l), e_aim, e_oracle),
                status: status.clone(),
            });
        }
    }
    Ok((rows, failures))
}

/// Closed-form wavefunction of the single requested level.
pub fn wavefunction(cfg: &RunConfig) -> Result<Result<RadialWavefunction, Failure>, ConfigError> {
    let model = cfg.model()?;
    cfg.check_grid()?;
    let &[(n, l)] = cfg.levels.as_slice() else {
        return Err(ConfigError::Invalid(format!(
            "wavefunction needs exactly one level, got {}",
            cfg.levels.len()
        )));
    };
    let mut spec = GridSpec::default_for(&model);
    spec.points = cfg.grid.points;
    let extensions = match cfg.grid.r_max {
        Some(r) if r <= spec.r_min => {
            return Err(ConfigError::Invalid(format!("r_max {r} must exceed r_min {}", spec.r_min)))
        }
        Some(r) => {
            spec.r_max = r;
            0
        }
        None => 3,
    };
    match model.radial_wavefunction_extending(n, l, &spec, extensions) {
        Ok(w) => Ok(Ok(w)),
        Err(e) => match as_validation(&e) {
            Some(v) => Err(v),
            None => Ok(Err(Failure { what: format!("wavefunction ({n},{l})"), error: e })),
        },
    }
}

pub struct AimTable {
    pub l: usize,
    pub energy: f64,
    pub rho0: f64,
    pub rows: Vec<(usize, f64)>,
}

/// `Δₖ(ρ₀)` for `k = 1..=k_max` at one trial energy.
pub fn aim_table(cfg: &RunConfig) -> Result<Result<AimTable, Failure>, ConfigError> {
    let model = cfg.model()?;
    let Some(energy) = cfg.aim.energy else {
        return Err(ConfigError::Invalid("aim-table needs a trial energy (use --energy)".into()));
    };
    if cfg.aim.k_max == 0 {
        return Err(ConfigError::Invalid("k_max must be at least 1".into()));
    }
    if let Some(r) = cfg.aim.rho0 {
        if !(r > 0.0 && r.is_finite()) {
            return Err(ConfigError::Invalid(format!("rho0 must be positive, got {r}")));
        }
    }
    let opts = radaim_core::AimOptions { rho0: cfg.aim.rho0, ..Default::default() };
    let l = cfg.aim.l;
    match delta_sequence(&model, l, energy, cfg.aim.k_max, &opts) {
        Ok((rho0, rows)) => Ok(Ok(AimTable { l, energy, rho0, rows })),
        Err(e) => match as_validation(&e) {
            Some(v) => Err(v),
            None => Ok(Err(Failure { what: format!("aim-table l={l} E={energy}"), error: e })),
        },
    }
}
