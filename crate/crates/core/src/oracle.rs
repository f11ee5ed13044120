//! Independent finite-difference eigensolver for the reduced radial
//! equation `−(ħ²/2μ) u'' + [V + ħ²ℓ(ℓ+1)/(2μr²)] u = E u`, `u = rR`, with
//! Dirichlet ends. Eigenvalues come from Sturm-count bisection on the
//! symmetric tridiagonal matrix.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::potential::PotentialModel;
use crate::special::uniform_grid;

/// Uniform grid; the end points carry the Dirichlet conditions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialGrid {
    r_min: f64,
    r_max: f64,
    points: usize,
}

impl RadialGrid {
    pub const MIN_POINTS: usize = 100;

    pub fn new(r_min: f64, r_max: f64, points: usize) -> Result<Self> {
        if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
            return Err(Error::Grid(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
        }
        if points < Self::MIN_POINTS {
            return Err(Error::Grid(format!("need at least {} points, got {points}", Self::MIN_POINTS)));
        }
        Ok(Self { r_min, r_max, points })
    }

    pub fn r_min(&self) -> f64 {
        self.r_min
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn step(&self) -> f64 {
        (self.r_max - self.r_min) / (self.points - 1) as f64
    }

    /// Same interval at half the step.
    pub fn halved(&self) -> Self {
        Self { points: 2 * self.points - 1, ..*self }
    }

    /// Interval extended by `factor` at the same step.
    pub fn extended(&self, factor: f64) -> Self {
        let r_max = self.r_min + (self.r_max - self.r_min) * factor;
        let points = ((r_max - self.r_min) / self.step()).round() as usize + 1;
        Self { r_max, points, ..*self }
    }

    /// The interior radii (matrix rows).
    pub fn interior(&self) -> Vec<f64> {
        let mut r = uniform_grid(self.r_min, self.r_max, self.points);
        r.pop();
        r.remove(0);
        r
    }
}

/// Symmetric tridiagonal matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalSystem {
    pub diag: Vec<f64>,
    pub offdiag: Vec<f64>,
}

impl TridiagonalSystem {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() || offdiag.len() + 1 != diag.len() {
            return Err(Error::Domain(format!(
                "tridiagonal shape mismatch: {} diagonal, {} off-diagonal",
                diag.len(),
                offdiag.len()
            )));
        }
        if !diag.iter().chain(&offdiag).all(|v| v.is_finite()) {
            return Err(Error::Domain("non-finite matrix entry".into()));
        }
        Ok(Self { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    fn off(&self, i: usize) -> f64 {
        if i < self.offdiag.len() {
            self.offdiag[i].abs()
        } else {
            0.0
        }
    }

    /// Gershgorin interval containing the spectrum.
    pub fn gershgorin(&self) -> (f64, f64) {
        (0..self.dim()).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
            let r = self.off(i) + if i > 0 { self.off(i - 1) } else { 0.0 };
            (lo.min(self.diag[i] - r), hi.max(self.diag[i] + r))
        })
    }

    fn pivmin(&self) -> f64 {
        let m = self.offdiag.iter().map(|e| e * e).fold(1.0f64, f64::max);
        f64::MIN_POSITIVE * m
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn sturm_count(&self, x: f64) -> usize {
        let pivmin = self.pivmin();
        let mut count = 0;
        let mut q = self.diag[0] - x;
        for i in 0..self.dim() {
            if i > 0 {
                let e = self.offdiag[i - 1];
                q = self.diag[i] - x - e * e / q;
            }
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `j`-th smallest eigenvalue (from 0) by bisection on the Sturm count.
    fn eigenvalue(&self, j: usize, (mut lo, mut hi): (f64, f64)) -> f64 {
        let norm = lo.abs().max(hi.abs());
        let tol = 2.0 * f64::EPSILON * norm + 4.0 * self.pivmin();
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.sturm_count(mid) > j {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Solves `(T − shift I) x = rhs` by LU with partial pivoting.
    pub fn solve_shifted(&self, shift: f64, rhs: &[f64]) -> Vec<f64> {
        let n = self.dim();
        let mut b = rhs.to_vec();
        let mut d: Vec<f64> = self.diag.iter().map(|v| v - shift).collect();
        if n == 1 {
            b[0] /= nonzero(d[0]);
            return b;
        }
        let mut dl = self.offdiag.clone();
        let mut du = self.offdiag.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                let fact = dl[i] / nonzero(d[i]);
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let t = du[i];
                du[i] = d[i + 1];
                d[i + 1] = t - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] *= -fact;
                }
                swapped[i] = true;
            }
        }
        for i in 0..n - 1 {
            if swapped[i] {
                b.swap(i, i + 1);
            }
            b[i + 1] -= dl[i] * b[i];
        }
        b[n - 1] /= nonzero(d[n - 1]);
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / nonzero(d[n - 2]);
        for i in (0..n - 2).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / nonzero(d[i]);
        }
        b
    }

    /// Eigenvector for an accurate eigenvalue `lambda`, unit max-norm.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.dim();
        let mut v = vec![1.0 / (n as f64).sqrt(); n];
        for _ in 0..3 {
            v = self.solve_shifted(lambda, &v);
            let m = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if !(m > 0.0 && m.is_finite()) {
                break;
            }
            v.iter_mut().for_each(|x| *x /= m);
        }
        v
    }
}

fn nonzero(p: f64) -> f64 {
    if p == 0.0 {
        f64::EPSILON * f64::MIN_POSITIVE.sqrt()
    } else {
        p
    }
}

/// Finite-difference matrix of the reduced radial equation on the interior
/// points of `grid`.
pub fn discretize(model: &PotentialModel, l: usize, grid: &RadialGrid) -> Result<TridiagonalSystem> {
    let u = model.units();
    let h = grid.step();
    let kin = u.hbar * u.hbar / (u.mu * h * h);
    let cent = u.hbar * u.hbar * (l * (l + 1)) as f64 / (2.0 * u.mu);
    let diag = grid
        .interior()
        .iter()
        .map(|&r| Ok(kin + model.value(r)? + cent / (r * r)))
        .collect::<Result<Vec<f64>>>()?;
    let offdiag = vec![-0.5 * kin; diag.len() - 1];
    TridiagonalSystem::new(diag, offdiag)
}

/// The `count` smallest eigenvalues, ascending.
pub fn lowest_eigenvalues(sys: &TridiagonalSystem, count: usize) -> Result<Vec<f64>> {
    if count > sys.dim() {
        return Err(Error::Domain(format!("{count} eigenvalues requested from a {}-dimensional system", sys.dim())));
    }
    let bounds = sys.gershgorin();
    Ok((0..count).into_par_iter().map(|j| sys.eigenvalue(j, bounds)).collect())
}

/// Oracle grid policy.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleOptions {
    /// Left end, in units of the model's natural length.
    pub r_min_factor: f64,
    /// Right end, in units of the natural length.
    pub r_max_factor: f64,
    /// Explicit right end; disables extension.
    pub r_max: Option<f64>,
    pub points: usize,
    /// Times `r_max` may be doubled (same step) while a tail is too large.
    pub max_extensions: usize,
    /// Largest `|u|` over the outer tenth of the box, relative to the peak.
    pub tail_tol: f64,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            r_min_factor: 1e-9,
            r_max_factor: 40.0,
            r_max: None,
            points: 20000,
            max_extensions: 3,
            tail_tol: 1e-6,
        }
    }
}

impl OracleOptions {
    pub fn grid(&self, model: &PotentialModel) -> Result<RadialGrid> {
        let len = model.natural_length();
        let r_max = self.r_max.unwrap_or(self.r_max_factor * len);
        RadialGrid::new(self.r_min_factor * len, r_max, self.points)
    }
}

/// Largest `|v|` on the outer tenth of the box over the peak `|v|`.
fn tail_ratio(grid: &RadialGrid, v: &[f64]) -> f64 {
    let cut = grid.r_max() - 0.1 * (grid.r_max() - grid.r_min());
    let peak = v.iter().fold(0.0f64, |a, x| a.max(x.abs()));
    let tail = grid
        .interior()
        .iter()
        .zip(v)
        .filter(|(r, _)| **r >= cut)
        .fold(0.0f64, |a, (_, x)| a.max(x.abs()));
    tail / peak
}

/// Richardson-extrapolated lowest `count` levels on one grid; errors with
/// the first level whose eigenvector has not decayed inside the box.
pub fn solve_on_grid(model: &PotentialModel, l: usize, count: usize, grid: &RadialGrid, tail_tol: f64) -> Result<Vec<f64>> {
    let sys = discretize(model, l, grid)?;
    let coarse = lowest_eigenvalues(&sys, count)?;
    let tails: Vec<f64> = coarse.par_iter().map(|&e| tail_ratio(grid, &sys.eigenvector(e))).collect();
    if let Some((level, &tail)) = tails.iter().enumerate().find(|(_, t)| !(**t < tail_tol)) {
        return Err(Error::UnconvergedLevel { level, tail, r_max: grid.r_max() });
    }
    let fine = lowest_eigenvalues(&discretize(model, l, &grid.halved())?, count)?;
    Ok(coarse.iter().zip(&fine).map(|(c, f)| (4.0 * f - c) / 3.0).collect())
}

/// Lowest `count` bound-state energies of angular momentum `l`.
pub fn solve_levels(model: &PotentialModel, l: usize, count: usize) -> Result<Vec<f64>> {
    solve_levels_with(model, l, count, &OracleOptions::default())
}

pub fn solve_levels_with(model: &PotentialModel, l: usize, count: usize, opts: &OracleOptions) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Domain("count must be at least 1".into()));
    }
    let base = opts.grid(model)?;
    let extensions = if opts.r_max.is_some() { 0 } else { opts.max_extensions };
    let mut last = None;
    for i in 0..=extensions {
        let grid = base.extended((1usize << i) as f64);
        match solve_on_grid(model, l, count, &grid, opts.tail_tol) {
            Err(e @ Error::UnconvergedLevel { .. }) => last = Some(e),
            other => return other,
        }
    }
    Err(last.expect("at least one attempt"))
}
