//! Generalized Laguerre polynomials, radial quadrature and the
//! finite-difference residual of the radial equation.

use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::ratfun::Polynomial;

/// Degree and (real) upper parameter of `L_n^{(w)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LaguerreSpec {
    pub n: usize,
    pub w: f64,
}

impl LaguerreSpec {
    pub fn new(n: usize, w: f64) -> Result<Self> {
        if !(w > -1.0) {
            return Err(Error::Domain(format!("Laguerre parameter w = {w} must exceed -1")));
        }
        Ok(Self { n, w })
    }
}

/// `L_n^{(w)}(x)` by the upward three-term recurrence
/// `(k+1) L_{k+1} = (2k+1+w-x) L_k - (k+w) L_{k-1}`.
pub fn laguerre_eval(spec: LaguerreSpec, x: f64) -> f64 {
    let LaguerreSpec { n, w } = spec;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = 1.0 + w - x;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + w - x) * cur - (kf + w) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Coefficients of `L_n^{(w)}` in powers of `x`, from the same recurrence
/// carried out on polynomials.
pub fn laguerre_poly(spec: LaguerreSpec) -> Polynomial {
    let LaguerreSpec { n, w } = spec;
    let mut prev = Polynomial::one();
    if n == 0 {
        return prev;
    }
    let mut cur = Polynomial::from_f64(&[1.0 + w, -1.0]);
    for k in 1..n {
        let kf = k as f64;
        let lin = Polynomial::from_f64(&[2.0 * kf + 1.0 + w, -1.0]);
        let next = &(&lin * &cur) - &prev.scale(kf + w);
        prev = cur;
        cur = next.scale(1.0 / (kf + 1.0));
    }
    cur
}

/// Sampled radial wavefunction `R(r)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialWavefunction {
    pub r_grid: Vec<f64>,
    pub values: Vec<f64>,
    pub n: usize,
    pub l: usize,
    /// Energy the samples belong to.
    pub energy: f64,
    /// Multiplier applied by the last [`normalize`] call.
    pub norm_constant: f64,
    pub node_count: usize,
    pub residual_l2: f64,
}

impl RadialWavefunction {
    /// Wraps raw samples; node count is filled in, residual left at NaN.
    pub fn from_samples(r_grid: Vec<f64>, values: Vec<f64>, n: usize, l: usize, energy: f64) -> Result<Self> {
        if r_grid.len() != values.len() {
            return Err(Error::Grid(format!(
                "grid has {} points but {} values",
                r_grid.len(),
                values.len()
            )));
        }
        check_increasing(&r_grid)?;
        let node_count = count_nodes(&values);
        Ok(Self { r_grid, values, n, l, energy, norm_constant: 1.0, node_count, residual_l2: f64::NAN })
    }

    pub fn step(&self) -> Option<f64> {
        uniform_step(&self.r_grid)
    }
}

/// `points` equally spaced values from `r_min` to `r_max` inclusive.
pub fn uniform_grid(r_min: f64, r_max: f64, points: usize) -> Vec<f64> {
    let h = (r_max - r_min) / (points - 1) as f64;
    (0..points).map(|i| r_min + i as f64 * h).collect()
}

fn check_increasing(r: &[f64]) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Grid("empty grid".into()));
    }
    if r[0] <= 0.0 {
        return Err(Error::Domain(format!("grid starts at r = {} <= 0", r[0])));
    }
    if r.windows(2).any(|p| !(p[1] > p[0])) {
        return Err(Error::Grid("grid is not strictly increasing".into()));
    }
    Ok(())
}

/// Spacing of a uniform grid, `None` when the spacing varies.
pub fn uniform_step(r: &[f64]) -> Option<f64> {
    if r.len() < 2 {
        return None;
    }
    let h = (r[r.len() - 1] - r[0]) / (r.len() - 1) as f64;
    let tol = 1e-8 * h;
    r.windows(2).all(|p| ((p[1] - p[0]) - h).abs() <= tol).then_some(h)
}

/// Interior sign changes; exact zeros (underflowed tails) are skipped.
pub fn count_nodes(values: &[f64]) -> usize {
    let mut nodes = 0;
    let mut last_sign = 0.0;
    for &v in values {
        if v == 0.0 || !v.is_finite() {
            continue;
        }
        let s = v.signum();
        if last_sign != 0.0 && s != last_sign {
            nodes += 1;
        }
        last_sign = s;
    }
    nodes
}

/// Composite Simpson rule for samples on a uniform grid with step `h`.
/// An odd number of intervals closes with the 3/8 rule on the last three.
pub fn simpson(f: &[f64], h: f64) -> f64 {
    let n = f.len();
    match n {
        0 | 1 => 0.0,
        2 => 0.5 * h * (f[0] + f[1]),
        3 => h / 3.0 * (f[0] + 4.0 * f[1] + f[2]),
        _ => {
            let intervals = n - 1;
            let (simpson_end, tail) = if intervals % 2 == 0 { (n - 1, 0.0) } else {
                let k = n - 4;
                (k, 3.0 * h / 8.0 * (f[k] + 3.0 * f[k + 1] + 3.0 * f[k + 2] + f[k + 3]))
            };
            let mut s = f[0] + f[simpson_end];
            for (i, v) in f.iter().enumerate().take(simpson_end).skip(1) {
                s += if i % 2 == 1 { 4.0 * v } else { 2.0 * v };
            }
            h / 3.0 * s + tail
        }
    }
}

/// Tail threshold relative to the peak for normalizable samples.
pub const TAIL_TOL: f64 = 1e-8;

fn tail_ratio(values: &[f64]) -> f64 {
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let last = values.last().map_or(0.0, |v| v.abs());
    if peak == 0.0 { f64::INFINITY } else { last / peak }
}

/// Scales `w` so that `∫ R² r² dr = 1` by composite Simpson on its grid.
pub fn normalize(w: &RadialWavefunction) -> Result<RadialWavefunction> {
    let h = w.step().ok_or_else(|| Error::Grid("normalization needs a uniform grid".into()))?;
    let tail = tail_ratio(&w.values);
    if !(tail < TAIL_TOL) {
        return Err(Error::Quadrature(format!(
            "tail |R(r_max)| / max|R| = {tail:e} exceeds {TAIL_TOL:e}; extend the grid"
        )));
    }
    let integrand: Vec<f64> = w.r_grid.iter().zip(&w.values).map(|(r, v)| v * v * r * r).collect();
    let norm2 = simpson(&integrand, h);
    if !(norm2 > 0.0 && norm2.is_finite()) {
        return Err(Error::Quadrature(format!("non-positive norm integral {norm2}")));
    }
    let c = 1.0 / norm2.sqrt();
    Ok(RadialWavefunction {
        values: w.values.iter().map(|v| v * c).collect(),
        norm_constant: c,
        ..w.clone()
    })
}

/// Fraction of the natural length below which the residual is not sampled.
/// Near the origin `R ~ r^γ` with non-integer `γ`, whose higher derivatives
/// are unbounded, so a fixed-width stencil cannot resolve it.
pub const RESIDUAL_CUTOFF: f64 = 0.2;

/// Relative L2 residual of the radial equation for sampled `R` at energy `e`.
///
/// The equation is applied in the equivalent form for `u = rR`,
/// `u'' + (2μ/ħ²)[E − V − ħ²ℓ(ℓ+1)/(2μr²)] u = 0`, with the second-order
/// central difference for `u''` on interior points with
/// `r ≥ RESIDUAL_CUTOFF · L`. The result is normalised by `‖(2μ/ħ²) E u‖`.
pub fn ode_residual(model: &PotentialModel, e: f64, w: &RadialWavefunction) -> Result<f64> {
    ode_residual_from(model, e, w, RESIDUAL_CUTOFF * model.natural_length())
}

/// [`ode_residual`] with an explicit lower cutoff radius.
pub fn ode_residual_from(model: &PotentialModel, e: f64, w: &RadialWavefunction, r_cut: f64) -> Result<f64> {
    if w.r_grid.len() < 5 {
        return Err(Error::Grid(format!("residual needs at least 5 points, got {}", w.r_grid.len())));
    }
    let h = w.step().ok_or_else(|| Error::Grid("residual stencil needs a uniform grid".into()))?;
    let units = model.units();
    let k2 = 2.0 * units.mu / (units.hbar * units.hbar);
    let cent = (w.l * (w.l + 1)) as f64;
    let u: Vec<f64> = w.r_grid.iter().zip(&w.values).map(|(r, v)| r * v).collect();
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 1..u.len() - 1 {
        let r = w.r_grid[i];
        if r < r_cut {
            continue;
        }
        let d2 = (u[i + 1] - 2.0 * u[i] + u[i - 1]) / (h * h);
        let res = d2 + (k2 * (e - model.value(r)?) - cent / (r * r)) * u[i];
        num += res * res;
        let t = k2 * e * u[i];
        den += t * t;
    }
    if !(den > 0.0) {
        return Err(Error::Domain("residual reference norm is zero (R ≡ 0 or E = 0)".into()));
    }
    Ok((num / den).sqrt())
}
