//! The four diatomic potentials, their parameter maps onto the transformed
//! variable `ρ = 2α r^k`, AIM seeds, closed-form spectra and radial
//! wavefunctions.

use serde::{Deserialize, Serialize};

use crate::aim::AimSeed;
use crate::error::{Error, Result};
use crate::ratfun::RationalFunction;
use crate::special::{self, LaguerreSpec, RadialWavefunction};

/// Action and reduced-mass units.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub mu: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        Self { hbar: 1.0, mu: 1.0 }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, mu: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite() && mu > 0.0 && mu.is_finite()) {
            return Err(Error::Domain(format!("units must be positive: hbar = {hbar}, mu = {mu}")));
        }
        Ok(Self { hbar, mu })
    }

    /// Reduced mass `m1 m2 / (m1 + m2)`.
    pub fn reduced_mass(m1: f64, m2: f64) -> f64 {
        m1 * m2 / (m1 + m2)
    }

    /// `ħ² / 2μ`
    pub fn kinetic(&self) -> f64 {
        self.hbar * self.hbar / (2.0 * self.mu)
    }
}

/// Potential family and its physical parameters.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Potential {
    /// `V₀ [½ (a/r)² − a/r]`
    Mie { v0: f64, a: f64 },
    /// `Dₑ [(r − rₑ)/r]²`
    Kratzer { de: f64, re: f64 },
    /// `−kZe² / r`
    Coulomb { coupling: f64 },
    /// `V₀ [r/r₀ − r₀/r]²`
    Pseudoharmonic { v0: f64, r0: f64 },
}

impl Potential {
    pub fn name(&self) -> &'static str {
        match self {
            Potential::Mie { .. } => "mie",
            Potential::Kratzer { .. } => "kratzer",
            Potential::Coulomb { .. } => "coulomb",
            Potential::Pseudoharmonic { .. } => "pseudoharmonic",
        }
    }

    fn parameters(&self) -> Vec<(&'static str, f64)> {
        match *self {
            Potential::Mie { v0, a } => vec![("V0", v0), ("a", a)],
            Potential::Kratzer { de, re } => vec![("De", de), ("re", re)],
            Potential::Coulomb { coupling } => vec![("coupling", coupling)],
            Potential::Pseudoharmonic { v0, r0 } => vec![("V0", v0), ("r0", r0)],
        }
    }
}

/// How the Kratzer spectrum formula is read (the printed formula equates an
/// unsquared ε to a quantity defined through ε²).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum KratzerReading {
    /// `2μ(Eₙ − Dₑ)/ħ² = −(2β)² [2n+1+√(1+4σ)]⁻²`
    #[default]
    Adopted,
    /// `2μ(Eₙ − Dₑ)/ħ² = εₙ²` with `εₙ = −(2β)² [2n+1+√(1+4σ)]⁻²`
    Literal,
}

/// α, β, γ, σ and the transform exponent k for one (ℓ, E).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedParams {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub sigma: f64,
    pub k: u32,
}

/// A potential together with its unit system.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PotentialModel {
    potential: Potential,
    units: UnitSystem,
}

/// Closed-form energies of the k = 1 family:
/// `−(ħ²/2μ)(2β)² [2n+1+√(1+4σ)]⁻²`.
pub fn kernel_energy(units: &UnitSystem, beta: f64, sigma: f64, n: usize) -> f64 {
    let denom = 2.0 * n as f64 + 1.0 + (1.0 + 4.0 * sigma).sqrt();
    -units.kinetic() * (2.0 * beta).powi(2) / (denom * denom)
}

fn centrifugal(l: usize) -> f64 {
    (l * (l + 1)) as f64
}

impl PotentialModel {
    pub fn new(potential: Potential, units: UnitSystem) -> Result<Self> {
        UnitSystem::new(units.hbar, units.mu)?;
        for (name, v) in potential.parameters() {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Domain(format!("{} parameter {name} = {v} must be positive", potential.name())));
            }
        }
        Ok(Self { potential, units })
    }

    /// Model in natural units `ħ = μ = 1`.
    pub fn natural(potential: Potential) -> Result<Self> {
        Self::new(potential, UnitSystem::default())
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn units(&self) -> &UnitSystem {
        &self.units
    }

    pub fn name(&self) -> &'static str {
        self.potential.name()
    }

    /// Exponent `k` of the transform `ρ = 2α r^k`.
    pub fn transform_exponent(&self) -> u32 {
        match self.potential {
            Potential::Pseudoharmonic { .. } => 2,
            _ => 1,
        }
    }

    /// Length scale of the model: `a`, `rₑ`, `r₀`, or the Bohr-like `ħ²/(μ kZe²)`.
    pub fn natural_length(&self) -> f64 {
        match self.potential {
            Potential::Mie { a, .. } => a,
            Potential::Kratzer { re, .. } => re,
            Potential::Pseudoharmonic { r0, .. } => r0,
            Potential::Coulomb { coupling } => self.units.hbar * self.units.hbar / (self.units.mu * coupling),
        }
    }

    pub fn value(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return Err(Error::Domain(format!("potential evaluated at r = {r} <= 0")));
        }
        Ok(match self.potential {
            Potential::Mie { v0, a } => {
                let x = a / r;
                v0 * (0.5 * x * x - x)
            }
            Potential::Kratzer { de, re } => {
                let x = (r - re) / r;
                de * x * x
            }
            Potential::Coulomb { coupling } => -coupling / r,
            Potential::Pseudoharmonic { v0, r0 } => {
                let x = r / r0 - r0 / r;
                v0 * x * x
            }
        })
    }

    /// Energy offset of the dissociation plateau entering α (Dₑ for Kratzer).
    fn alpha_shift(&self) -> f64 {
        match self.potential {
            Potential::Kratzer { de, .. } => de,
            _ => 0.0,
        }
    }

    /// β, σ, γ: the energy-independent part of the parameter map.
    fn static_params(&self, l: usize) -> (f64, f64, f64) {
        let UnitSystem { hbar, mu } = self.units;
        let h2 = hbar * hbar;
        let ll = centrifugal(l);
        match self.potential {
            Potential::Mie { v0, a } => {
                let beta = mu * v0 * a / h2;
                let sigma = ll + beta * a;
                (beta, sigma, 0.5 * (-1.0 + (1.0 + 4.0 * sigma).sqrt()))
            }
            Potential::Kratzer { de, re } => {
                let beta = 2.0 * mu * de * re / h2;
                let sigma = ll + beta * re;
                (beta, sigma, 0.5 * (-1.0 + (1.0 + 4.0 * sigma).sqrt()))
            }
            Potential::Coulomb { coupling } => (mu * coupling / h2, ll, l as f64),
            Potential::Pseudoharmonic { v0, r0 } => {
                let beta = mu * v0 * r0 * r0 / (2.0 * h2);
                let sigma = beta + ll / 4.0;
                (beta, sigma, 0.25 * (-1.0 + (1.0 + 16.0 * sigma).sqrt()))
            }
        }
    }

    fn pseudoharmonic_alpha(&self) -> Option<f64> {
        match self.potential {
            Potential::Pseudoharmonic { v0, r0 } => {
                let UnitSystem { hbar, mu } = self.units;
                Some((mu * v0 / (2.0 * hbar * hbar * r0 * r0)).sqrt())
            }
            _ => None,
        }
    }

    /// Parameter map at trial energy `e`. For k = 1 models α depends on the
    /// energy and must be real.
    pub fn derive_params(&self, l: usize, e: f64) -> Result<DerivedParams> {
        let (beta, sigma, gamma) = self.static_params(l);
        let k = self.transform_exponent();
        let alpha = match self.pseudoharmonic_alpha() {
            Some(a) => a,
            None => {
                let UnitSystem { hbar, mu } = self.units;
                let alpha2 = -2.0 * mu * (e - self.alpha_shift()) / (hbar * hbar);
                if !(alpha2 > 0.0) {
                    return Err(Error::Domain(format!(
                        "{}: alpha² = {alpha2} <= 0 at E = {e}; bound states need E < {}",
                        self.name(),
                        self.alpha_shift()
                    )));
                }
                alpha2.sqrt()
            }
        };
        Ok(DerivedParams { alpha, beta, gamma, sigma, k })
    }

    /// Seed coefficients `(c, d)` of `λ₀ = 1 − c/ρ`, `s₀ = d/ρ`.
    pub fn seed_coefficients(&self, l: usize, e: f64) -> Result<(f64, f64)> {
        let p = self.derive_params(l, e)?;
        Ok(match self.potential {
            Potential::Pseudoharmonic { v0, .. } => {
                let UnitSystem { hbar, mu } = self.units;
                let eps = mu * (e + 2.0 * v0) / (4.0 * hbar * hbar * p.alpha);
                (2.0 * p.gamma + 1.5, p.gamma + 0.75 - eps)
            }
            _ => (2.0 * (p.gamma + 1.0), p.gamma + 1.0 - p.beta / p.alpha),
        })
    }

    /// AIM seed at trial energy `e`, evaluated by default at `ρ₀ = max(1, c) + 1`.
    pub fn aim_seed(&self, l: usize, e: f64) -> Result<AimSeed> {
        let (c, d) = self.seed_coefficients(l, e)?;
        let lambda0 = RationalFunction::laurent(&[1.0, -c]);
        let s0 = RationalFunction::laurent(&[0.0, d]);
        AimSeed::new(lambda0, s0, c.max(1.0) + 1.0, e)
    }

    /// Closed-form bound-state energy of level `(n, ℓ)`.
    pub fn closed_form_energy(&self, n: usize, l: usize) -> f64 {
        self.closed_form_energy_with(n, l, KratzerReading::Adopted)
    }

    pub fn closed_form_energy_with(&self, n: usize, l: usize, reading: KratzerReading) -> f64 {
        let (beta, sigma, gamma) = self.static_params(l);
        let units = &self.units;
        match self.potential {
            Potential::Mie { .. } => kernel_energy(units, beta, sigma, n),
            Potential::Kratzer { de, .. } => match reading {
                KratzerReading::Adopted => de + kernel_energy(units, beta, sigma, n),
                KratzerReading::Literal => {
                    let denom = 2.0 * n as f64 + 1.0 + (1.0 + 4.0 * sigma).sqrt();
                    let eps = -(2.0 * beta).powi(2) / (denom * denom);
                    de + units.kinetic() * eps * eps
                }
            },
            Potential::Coulomb { coupling } => {
                let m = (n + l + 1) as f64;
                -units.mu * coupling * coupling / (2.0 * units.hbar * units.hbar * m * m)
            }
            Potential::Pseudoharmonic { v0, .. } => {
                let alpha = self.pseudoharmonic_alpha().expect("pseudoharmonic");
                2.0 * units.hbar * units.hbar / units.mu * alpha * (2.0 * n as f64 + 1.0 + 2.0 * (gamma + 0.25))
                    - 2.0 * v0
            }
        }
    }

    /// Level spacing `4ħ²α/μ` of the pseudoharmonic ladder.
    pub fn pseudoharmonic_spacing(&self) -> Option<f64> {
        self.pseudoharmonic_alpha()
            .map(|a| 4.0 * self.units.hbar * self.units.hbar * a / self.units.mu)
    }

    /// Parameters at the closed-form energy of `(n, ℓ)`.
    pub fn level_params(&self, n: usize, l: usize) -> DerivedParams {
        let (beta, sigma, gamma) = self.static_params(l);
        let alpha = self.pseudoharmonic_alpha().unwrap_or(beta / (n as f64 + gamma + 1.0));
        DerivedParams { alpha, beta, gamma, sigma, k: self.transform_exponent() }
    }

    /// Laguerre upper parameter `w` of the level's polynomial factor.
    pub fn laguerre_parameter(&self, l: usize) -> f64 {
        let (_, _, gamma) = self.static_params(l);
        match self.potential {
            Potential::Pseudoharmonic { .. } => 2.0 * gamma + 0.5,
            Potential::Coulomb { .. } => (2 * l + 1) as f64,
            _ => 2.0 * gamma + 1.0,
        }
    }

    /// Energy bracket expected to contain the lowest `count` levels of ℓ.
    pub fn default_bracket(&self, l: usize, count: usize) -> (f64, f64) {
        let (beta, _, gamma) = self.static_params(l);
        match self.potential {
            Potential::Pseudoharmonic { v0, .. } => {
                let spacing = self.pseudoharmonic_spacing().expect("pseudoharmonic");
                let floor = -2.0 * v0;
                (floor + 1e-6 * spacing, floor + spacing * (3.0 * count as f64 + gamma))
            }
            _ => {
                let scale = self.units.kinetic() * (2.0 * beta).powi(2);
                let shift = self.alpha_shift();
                (shift - 1.05 * scale, shift - 1e-6 * scale)
            }
        }
    }

    /// Unnormalized `ρ^γ e^{−ρ/2} L_n^{(w)}(ρ)` at radius `r` for level (n, ℓ).
    fn raw_radial(&self, p: &DerivedParams, spec: LaguerreSpec, r: f64) -> f64 {
        let rho = 2.0 * p.alpha * r.powi(p.k as i32);
        let envelope = (p.gamma * rho.ln() - 0.5 * rho).exp();
        envelope * special::laguerre_eval(spec, rho)
    }

    /// Normalized closed-form radial wavefunction sampled on a uniform grid.
    pub fn radial_wavefunction(&self, n: usize, l: usize, grid: &[f64]) -> Result<RadialWavefunction> {
        let p = self.level_params(n, l);
        let spec = LaguerreSpec::new(n, self.laguerre_parameter(l))?;
        let energy = self.closed_form_energy(n, l);
        let values = grid.iter().map(|&r| self.raw_radial(&p, spec, r)).collect();
        let raw = RadialWavefunction::from_samples(grid.to_vec(), values, n, l, energy)?;
        let mut w = special::normalize(&raw)?;
        w.residual_l2 = special::ode_residual(self, energy, &w)?;
        Ok(w)
    }

    /// [`Self::radial_wavefunction`] on the default grid
    /// `[1e-4 L, 40 L]` with 20000 points, doubled in extent (same spacing)
    /// up to three times while the tail condition fails.
    pub fn radial_wavefunction_auto(&self, n: usize, l: usize) -> Result<RadialWavefunction> {
        self.radial_wavefunction_extending(n, l, &GridSpec::default_for(self), 3)
    }

    /// Samples on `spec`, doubling its extent at fixed spacing up to
    /// `extensions` times while the tail condition fails.
    pub fn radial_wavefunction_extending(
        &self,
        n: usize,
        l: usize,
        spec: &GridSpec,
        extensions: usize,
    ) -> Result<RadialWavefunction> {
        let mut last = None;
        for grid in spec.extensions(extensions) {
            match self.radial_wavefunction(n, l, &grid) {
                Err(e @ Error::Quadrature(_)) => last = Some(e),
                other => return other,
            }
        }
        Err(last.expect("at least one grid"))
    }
}

/// Uniform sampling grid `[r_min, r_max]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub r_min: f64,
    pub r_max: f64,
    pub points: usize,
}

impl GridSpec {
    pub const DEFAULT_POINTS: usize = 20000;

    pub fn default_for(model: &PotentialModel) -> Self {
        let l = model.natural_length();
        Self { r_min: 1e-4 * l, r_max: 40.0 * l, points: Self::DEFAULT_POINTS }
    }

    pub fn grid(&self) -> Vec<f64> {
        special::uniform_grid(self.r_min, self.r_max, self.points)
    }

    /// This grid followed by `times` doublings of its extent at fixed spacing.
    pub fn extensions(&self, times: usize) -> impl Iterator<Item = Vec<f64>> + '_ {
        let h = (self.r_max - self.r_min) / (self.points - 1) as f64;
        (0..=times).map(move |i| {
            let factor = (1usize << i) as f64;
            let r_max = self.r_min + (self.r_max - self.r_min) * factor;
            let points = ((r_max - self.r_min) / h).round() as usize + 1;
            special::uniform_grid(self.r_min, r_max, points)
        })
    }
}

/// Closed-form, AIM and oracle energies for one level.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumResult {
    pub n: usize,
    pub l: usize,
    pub e_closed: f64,
    pub e_aim: Option<f64>,
    pub e_oracle: Option<f64>,
    pub rel_diff_aim: Option<f64>,
    pub rel_diff_oracle: Option<f64>,
}

/// `|a − b| / max(|a|, |b|, 1e-300)`
pub fn relative_difference(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

impl SpectrumResult {
    pub fn new(n: usize, l: usize, e_closed: f64, e_aim: Option<f64>, e_oracle: Option<f64>) -> Self {
        Self {
            n,
            l,
            e_closed,
            e_aim,
            e_oracle,
            rel_diff_aim: e_aim.map(|e| relative_difference(e, e_closed)),
            rel_diff_oracle: e_oracle.map(|e| relative_difference(e, e_closed)),
        }
    }
}
