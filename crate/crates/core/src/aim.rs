//! Asymptotic iteration: the coefficient recurrence, the termination
//! condition and the root-stabilization loop that turns it into bound-state
//! energies.
//!
//! For `y'' = λ₀ y' + s₀ y` the recurrence is
//! `λₖ = λ'ₖ₋₁ + sₖ₋₁ + λₖ₋₁ λ₀`, `sₖ = s'ₖ₋₁ + λₖ₋₁ s₀`, and energies are the
//! zeros in `E` of `Δₖ = λₖ sₖ₋₁ − λₖ₋₁ sₖ` at a fixed point `ρ₀`.
//!
//! Evaluating `Δₖ` loses roughly `k/2` significant digits to cancellation at
//! the default evaluation point, so the iteration normally runs in
//! double-double ([`Precision::DoubleDouble`]); seeds are still built in
//! `f64` and widened exactly.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::{relative_difference, PotentialModel};
use crate::ratfun::{DoubleDouble, RationalFunction, Scalar};

/// `(λ₀, s₀)` at a frozen trial energy, with the evaluation point `ρ₀`.
#[derive(Clone, Debug, PartialEq)]
pub struct AimSeed<T: Scalar = f64> {
    lambda0: RationalFunction<T>,
    s0: RationalFunction<T>,
    eval_point: f64,
    energy: f64,
}

impl<T: Scalar> AimSeed<T> {
    pub fn new(lambda0: RationalFunction<T>, s0: RationalFunction<T>, eval_point: f64, energy: f64) -> Result<Self> {
        if !(eval_point > 0.0 && eval_point.is_finite()) {
            return Err(Error::Domain(format!("evaluation point must be positive, got {eval_point}")));
        }
        if lambda0.is_zero() {
            return Err(Error::Domain("lambda0 is identically zero".into()));
        }
        lambda0.eval(T::of(eval_point))?;
        s0.eval(T::of(eval_point))?;
        Ok(Self { lambda0, s0, eval_point, energy })
    }

    pub fn lambda0(&self) -> &RationalFunction<T> {
        &self.lambda0
    }

    pub fn s0(&self) -> &RationalFunction<T> {
        &self.s0
    }

    pub fn eval_point(&self) -> f64 {
        self.eval_point
    }

    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Same seed evaluated at another point.
    pub fn with_eval_point(&self, eval_point: f64) -> Result<Self> {
        Self::new(self.lambda0.clone(), self.s0.clone(), eval_point, self.energy)
    }
}

impl AimSeed<f64> {
    /// Exact widening to a higher-precision scalar.
    pub fn widen<U: Scalar>(&self) -> AimSeed<U> {
        AimSeed {
            lambda0: self.lambda0.widen(),
            s0: self.s0.widen(),
            eval_point: self.eval_point,
            energy: self.energy,
        }
    }
}

/// `λ₀…λₙ` and `s₀…sₙ`, each pair `k ≥ 1` divided by a recorded positive factor.
#[derive(Clone, Debug)]
pub struct AimState<T: Scalar = f64> {
    pub lambdas: Vec<RationalFunction<T>>,
    pub esses: Vec<RationalFunction<T>>,
    /// `ln` of the factor the pair at each index was divided by (0 at index 0).
    pub log_scales: Vec<f64>,
}

impl<T: Scalar> AimState<T> {
    /// Index of the last computed pair.
    pub fn last_index(&self) -> usize {
        self.lambdas.len() - 1
    }

    /// Accumulated `ln` of all rescaling factors.
    pub fn scale_log(&self) -> f64 {
        self.log_scales.iter().sum()
    }
}

/// Runs `n` steps of the recurrence with joint rescaling.
pub fn iterate<T: Scalar>(seed: &AimSeed<T>, n: usize) -> Result<AimState<T>> {
    iterate_with(seed, n, true)
}

/// Runs `n` steps; with `rescale`, each new pair is divided by the largest
/// coefficient magnitude of the two.
pub fn iterate_with<T: Scalar>(seed: &AimSeed<T>, n: usize, rescale: bool) -> Result<AimState<T>> {
    let l0 = &seed.lambda0;
    let s0 = &seed.s0;
    let mut lambdas = Vec::with_capacity(n + 1);
    let mut esses = Vec::with_capacity(n + 1);
    let mut log_scales = Vec::with_capacity(n + 1);
    lambdas.push(l0.clone());
    esses.push(s0.clone());
    log_scales.push(0.0);
    for k in 1..=n {
        let lp = &lambdas[k - 1];
        let sp = &esses[k - 1];
        let mut lam = lp.derivative().add(sp).add(&lp.mul(l0));
        let mut s = sp.derivative().add(&lp.mul(s0));
        if !(lam.is_finite() && s.is_finite()) {
            return Err(Error::Overflow { iteration: k });
        }
        let mut log = 0.0;
        if rescale {
            let f = lam.max_abs_coeff().max(s.max_abs_coeff());
            if f > T::zero() {
                let inv = T::one() / f;
                lam = lam.scale(inv);
                s = s.scale(inv);
                log = f.as_f64().ln();
            }
        }
        lambdas.push(lam);
        esses.push(s);
        log_scales.push(log);
    }
    Ok(AimState { lambdas, esses, log_scales })
}

/// `Δₖ(x₀)` in the state's own precision.
pub fn delta_exact<T: Scalar>(state: &AimState<T>, k: usize, x0: f64) -> Result<T> {
    if k == 0 || k > state.last_index() {
        return Err(Error::Domain(format!("delta index {k} outside 1..={}", state.last_index())));
    }
    let x = T::of(x0);
    let lk = state.lambdas[k].eval(x)?;
    let lp = state.lambdas[k - 1].eval(x)?;
    let sk = state.esses[k].eval(x)?;
    let sp = state.esses[k - 1].eval(x)?;
    Ok(lk * sp - lp * sk)
}

/// `Δₖ(x₀) = λₖ(x₀) sₖ₋₁(x₀) − λₖ₋₁(x₀) sₖ(x₀)` on the rescaled functions.
pub fn delta<T: Scalar>(state: &AimState<T>, k: usize, x0: f64) -> Result<f64> {
    delta_exact(state, k, x0).map(Scalar::as_f64)
}

/// Returns `n` when `d = −n` within 1e-9, i.e. the seed `λ₀ = 1 − c/ρ`,
/// `s₀ = d/ρ` terminates exactly at level `n`.
pub fn laguerre_quantization(c: f64, d: f64) -> Option<usize> {
    if !(c.is_finite() && d.is_finite()) {
        return None;
    }
    let n = (-d).round();
    (n >= 0.0 && (d + n).abs() <= 1e-9).then_some(n as usize)
}

/// Arithmetic used for the recurrence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Precision {
    Double,
    #[default]
    DoubleDouble,
}

/// Tuning of [`find_eigenvalues`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AimOptions {
    pub k_min: usize,
    pub k_step: usize,
    pub k_max: usize,
    /// Initial number of trial energies in the scan.
    pub grid_points: usize,
    /// Bisection stops when the bracket is narrower than this.
    pub energy_tol: f64,
    /// Roots are stable when they move less than this between stages.
    pub stability_tol: f64,
    /// Absolute `ρ₀`; `None` uses the seed default `max(1, c) + 1`.
    pub rho0: Option<f64>,
    pub rescale: bool,
    pub precision: Precision,
    /// Times the scan grid may be doubled while the lowest roots still move.
    pub max_grid_refinements: usize,
}

impl Default for AimOptions {
    fn default() -> Self {
        Self {
            k_min: 8,
            k_step: 4,
            k_max: 60,
            grid_points: 400,
            energy_tol: 1e-10,
            stability_tol: 1e-9,
            rho0: None,
            rescale: true,
            precision: Precision::DoubleDouble,
            max_grid_refinements: 4,
        }
    }
}

impl AimOptions {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if self.k_min == 0 || self.k_step == 0 {
            return bad(format!("k_min ({}) and k_step ({}) must be at least 1", self.k_min, self.k_step));
        }
        if self.k_max < self.k_min {
            return bad(format!("k_max ({}) below k_min ({})", self.k_max, self.k_min));
        }
        if self.grid_points < 2 {
            return bad(format!("grid_points must be at least 2, got {}", self.grid_points));
        }
        for (name, v) in [("energy_tol", self.energy_tol), ("stability_tol", self.stability_tol)] {
            if !(v > 0.0 && v.is_finite()) {
                return bad(format!("{name} must be positive, got {v}"));
            }
        }
        if let Some(r) = self.rho0 {
            if !(r > 0.0 && r.is_finite()) {
                return bad(format!("rho0 must be positive, got {r}"));
            }
        }
        Ok(())
    }
}

/// One stabilized root of the termination condition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenvalueReport {
    pub energy: f64,
    /// Position among the roots found in the bracket, from 0.
    pub level_index: usize,
    pub iterations_used: usize,
    /// `|Δ|` at the refined root.
    pub delta_residual: f64,
    /// Distance to the matching root of the previous stage.
    pub stability_gap: f64,
}

fn seed_for(model: &PotentialModel, l: usize, e: f64, rho0: Option<f64>) -> Result<AimSeed> {
    let seed = model.aim_seed(l, e)?;
    match rho0 {
        Some(x) => seed.with_eval_point(x),
        None => Ok(seed),
    }
}

fn delta_in<T: Scalar>(seed: &AimSeed, k: usize, rescale: bool) -> Result<f64> {
    let seed = seed.widen::<T>();
    let state = iterate_with(&seed, k, rescale)?;
    delta(&state, k, seed.eval_point())
}

/// `Δₖ(ρ₀; E)` for the model seed at trial energy `e`.
pub fn delta_at_energy(model: &PotentialModel, l: usize, e: f64, k: usize, opts: &AimOptions) -> Result<f64> {
    let seed = seed_for(model, l, e, opts.rho0)?;
    match opts.precision {
        Precision::Double => delta_in::<f64>(&seed, k, opts.rescale),
        Precision::DoubleDouble => delta_in::<DoubleDouble>(&seed, k, opts.rescale),
    }
}

/// `(k, Δₖ(ρ₀))` for `k = 1..=k_max` from a single iteration at energy `e`.
pub fn delta_sequence(
    model: &PotentialModel,
    l: usize,
    e: f64,
    k_max: usize,
    opts: &AimOptions,
) -> Result<(f64, Vec<(usize, f64)>)> {
    fn run<T: Scalar>(seed: &AimSeed, k_max: usize, rescale: bool) -> Result<Vec<(usize, f64)>> {
        let wide = seed.widen::<T>();
        let state = iterate_with(&wide, k_max, rescale)?;
        (1..=k_max).map(|k| Ok((k, delta(&state, k, wide.eval_point())?))).collect()
    }
    let seed = seed_for(model, l, e, opts.rho0)?;
    let rows = match opts.precision {
        Precision::Double => run::<f64>(&seed, k_max, opts.rescale)?,
        Precision::DoubleDouble => run::<DoubleDouble>(&seed, k_max, opts.rescale)?,
    };
    Ok((seed.eval_point(), rows))
}

/// Decides whether an exact zero of Δ at `e` is a genuine level.
///
/// A vanishing `s₀` makes every Δₖ vanish; that is accepted only when the
/// seed terminates at some level `n` whose closed-form energy is `e`.
fn confirm_exact_zero(
    c: f64,
    d: f64,
    e: f64,
    s0_is_zero: bool,
    closed_form: impl Fn(usize) -> f64,
) -> Result<bool> {
    if !s0_is_zero {
        return Ok(true);
    }
    match laguerre_quantization(c, d) {
        Some(n) if relative_difference(closed_form(n), e) <= 1e-9 => Ok(true),
        _ => Err(Error::DegenerateSeed { energy: e }),
    }
}

struct Scanner<'a> {
    model: &'a PotentialModel,
    l: usize,
    opts: &'a AimOptions,
}

impl Scanner<'_> {
    fn eval(&self, e: f64, k: usize) -> Result<f64> {
        delta_at_energy(self.model, self.l, e, k, self.opts)
    }

    fn exact_zero(&self, e: f64) -> Result<bool> {
        let (c, d) = self.model.seed_coefficients(self.l, e)?;
        let s0_is_zero = self.model.aim_seed(self.l, e)?.s0().is_zero();
        confirm_exact_zero(c, d, e, s0_is_zero, |n| self.model.closed_form_energy(n, self.l))
    }

    fn bisect(&self, k: usize, mut a: f64, mut b: f64, fa: f64) -> Result<f64> {
        let sa = fa.signum();
        while b - a > self.opts.energy_tol {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            let fm = self.eval(m, k)?;
            if fm == 0.0 && self.exact_zero(m)? {
                return Ok(m);
            }
            if fm.signum() == sa {
                a = m;
            } else {
                b = m;
            }
        }
        Ok(0.5 * (a + b))
    }

    /// All roots of Δₖ on a uniform grid of `points` energies, refined and
    /// sorted, as `(energy, |Δ| at energy)`.
    fn roots(&self, k: usize, lo: f64, hi: f64, points: usize) -> Result<Vec<(f64, f64)>> {
        let step = (hi - lo) / (points - 1) as f64;
        let energies: Vec<f64> =
            (0..points).map(|i| if i + 1 == points { hi } else { lo + step * i as f64 }).collect();
        let values: Vec<f64> = energies.par_iter().map(|&e| self.eval(e, k)).collect::<Result<_>>()?;

        enum Hit {
            Point(f64),
            Bracket(f64, f64, f64),
        }
        let mut hits = Vec::new();
        for i in 0..points {
            if values[i] == 0.0 {
                if self.exact_zero(energies[i])? {
                    hits.push(Hit::Point(energies[i]));
                }
                continue;
            }
            if i + 1 < points && values[i + 1] != 0.0 && values[i].signum() != values[i + 1].signum() {
                hits.push(Hit::Bracket(energies[i], energies[i + 1], values[i]));
            }
        }
        let mut roots: Vec<(f64, f64)> = hits
            .par_iter()
            .map(|h| {
                let e = match *h {
                    Hit::Point(e) => e,
                    Hit::Bracket(a, b, fa) => self.bisect(k, a, b, fa)?,
                };
                Ok((e, self.eval(e, k)?.abs()))
            })
            .collect::<Result<_>>()?;
        roots.sort_by(|x, y| x.0.total_cmp(&y.0));
        Ok(roots)
    }
}

/// Largest distance from each of the first `count` roots of `cur` to the
/// nearest root of `prev`, per root.
fn gaps(cur: &[(f64, f64)], prev: &[(f64, f64)], count: usize) -> Vec<f64> {
    cur.iter()
        .take(count)
        .map(|&(e, _)| prev.iter().map(|&(p, _)| (e - p).abs()).fold(f64::INFINITY, f64::min))
        .collect()
}

fn lowest_agree(a: &[(f64, f64)], b: &[(f64, f64)], count: usize, tol: f64) -> bool {
    let m = count.min(a.len());
    m == count.min(b.len()) && a.iter().zip(b).take(m).all(|(x, y)| (x.0 - y.0).abs() <= tol)
}

/// Lowest `count` energies in `bracket` at which Δₖ(ρ₀; E) has stabilized
/// roots, in increasing order.
pub fn find_eigenvalues(
    model: &PotentialModel,
    l: usize,
    count: usize,
    bracket: (f64, f64),
    opts: &AimOptions,
) -> Result<Vec<EigenvalueReport>> {
    opts.validate()?;
    let (lo, hi) = bracket;
    if !(lo < hi && lo.is_finite() && hi.is_finite()) {
        return Err(Error::Domain(format!("invalid bracket ({lo}, {hi})")));
    }
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    seed_for(model, l, lo, opts.rho0)?;
    seed_for(model, l, hi, opts.rho0)?;

    let scan = Scanner { model, l, opts };

    // Close pairs of roots can share one scan cell; refine the grid until
    // the lowest roots stop changing.
    let mut points = opts.grid_points;
    let mut prev = scan.roots(opts.k_min, lo, hi, points)?;
    for _ in 0..opts.max_grid_refinements {
        let finer = scan.roots(opts.k_min, lo, hi, 2 * points - 1)?;
        let agree = lowest_agree(&prev, &finer, count, opts.stability_tol);
        points = 2 * points - 1;
        prev = finer;
        if agree {
            break;
        }
    }

    let mut last_gap = f64::INFINITY;
    let mut k = opts.k_min + opts.k_step;
    while k <= opts.k_max {
        let cur = scan.roots(k, lo, hi, points)?;
        let g = gaps(&cur, &prev, count);
        let stable = g.iter().all(|&x| x < opts.stability_tol);
        last_gap = g.iter().copied().fold(0.0, f64::max);
        if stable && cur.len() >= count {
            return Ok(cur
                .iter()
                .zip(g)
                .take(count)
                .enumerate()
                .map(|(i, (&(energy, res), gap))| EigenvalueReport {
                    energy,
                    level_index: i,
                    iterations_used: k,
                    delta_residual: res,
                    stability_gap: gap,
                })
                .collect());
        }
        if stable && cur.len() == prev.len() {
            return Err(Error::BracketTooNarrow { found: cur.len(), requested: count });
        }
        prev = cur;
        k += opts.k_step;
    }
    if prev.len() < count {
        return Err(Error::BracketTooNarrow { found: prev.len(), requested: count });
    }
    Err(Error::NoConvergence { k_max: opts.k_max, last_gap })
}
