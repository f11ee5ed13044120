//! Dense univariate polynomials and rational functions over floating-point
//! scalars.
//!
//! These carry the AIM coefficient functions. Everything here is a pure
//! value type; no operation mutates its inputs.
//!
//! Canonical form:
//! - a [`Polynomial`] never stores trailing (highest-power) zeros; the zero
//!   polynomial is the empty list and has degree -1;
//! - a [`RationalFunction`] has a monic denominator, a zero numerator implies
//!   a unit denominator, and common factors of `x^j` are cancelled.
//!
//! No general polynomial GCD is taken. Only the power-of-`x` factor is
//! removed, and only when the low-order coefficients are exactly zero, which
//! keeps the pure-power denominators of the AIM seeds from doubling in degree
//! at every quotient-rule step.

use std::fmt::{self, Debug};
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{Float, NumCast};
use twofloat::TwoFloat;

use crate::error::{Error, Result};

/// Double-double scalar (about 31 significant digits).
pub type DoubleDouble = TwoFloat;

/// Relative magnitude below which a leading coefficient that arose from
/// cancellation in an addition is treated as zero (f64).
pub const TRIM_TOL: f64 = 1e-13;

/// `|den(x)|` must exceed this fraction of `sum |den_i| |x|^i`.
pub const POLE_TOL: f64 = 1e-12;

/// Floating-point coefficient type for [`Polynomial`] and [`RationalFunction`].
pub trait Scalar: Float + Debug + Send + Sync + 'static {
    /// Cancellation threshold used when trimming sums, relative to the
    /// operands' magnitude at the same power.
    const CANCEL_TOL: f64;

    fn of(x: f64) -> Self {
        <Self as NumCast>::from(x).expect("f64 converts to every Scalar")
    }

    fn of_usize(n: usize) -> Self {
        Self::of(n as f64)
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    const CANCEL_TOL: f64 = TRIM_TOL;
}

impl Scalar for TwoFloat {
    const CANCEL_TOL: f64 = 1e-28;
}

/// Dense polynomial; `coeffs[i]` multiplies `x^i`.
#[derive(Clone, PartialEq)]
pub struct Polynomial<T: Scalar = f64> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Debug for Polynomial<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c: Vec<f64> = self.coeffs.iter().map(|c| c.as_f64()).collect();
        write!(f, "Polynomial{c:?}")
    }
}

impl<T: Scalar> Polynomial<T> {
    /// Builds a polynomial from ascending coefficients, dropping trailing zeros.
    pub fn new(coeffs: Vec<T>) -> Self {
        let mut p = Self { coeffs };
        p.trim();
        p
    }

    pub fn from_f64(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| T::of(c)).collect())
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^power`
    pub fn monomial(c: T, power: usize) -> Self {
        let mut coeffs = vec![T::zero(); power + 1];
        coeffs[power] = c;
        Self::new(coeffs)
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    /// Degree, with -1 for the zero polynomial.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading(&self) -> Option<T> {
        self.coeffs.last().copied()
    }

    /// Coefficient of `x^i` (zero beyond the degree).
    pub fn coeff(&self, i: usize) -> T {
        self.coeffs.get(i).copied().unwrap_or_else(T::zero)
    }

    pub fn max_abs(&self) -> T {
        self.coeffs
            .iter()
            .fold(T::zero(), |m, c| if c.abs() > m { c.abs() } else { m })
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    /// Horner evaluation.
    pub fn eval(&self, x: T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * x + c)
    }

    /// `sum |c_i| |x|^i`, the magnitude scale of an evaluation at `x`.
    pub fn eval_abs(&self, x: T) -> T {
        let ax = x.abs();
        self.coeffs.iter().rev().fold(T::zero(), |acc, &c| acc * ax + c.abs())
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() <= 1 {
            return Self::zero();
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(i, &c)| c * T::of_usize(i))
            .collect();
        Self::new(coeffs)
    }

    pub fn scale(&self, s: T) -> Self {
        Self::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() || k == 0 {
            return self.clone();
        }
        let mut coeffs = vec![T::zero(); k];
        coeffs.extend_from_slice(&self.coeffs);
        Self { coeffs }
    }

    /// Number of exactly-zero low-order coefficients (the largest `j` with
    /// `x^j` dividing the polynomial exactly).
    pub fn low_zeros(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// Divides by `x^k`; the caller guarantees `k <= low_zeros()`.
    fn shift_down(&self, k: usize) -> Self {
        debug_assert!(k <= self.low_zeros() || self.is_zero());
        if self.is_zero() {
            return Self::zero();
        }
        Self { coeffs: self.coeffs[k..].to_vec() }
    }

    /// `Some(m)` when the polynomial is exactly `x^m`.
    pub fn monic_monomial_power(&self) -> Option<usize> {
        let m = self.coeffs.len().checked_sub(1)?;
        (self.coeffs[m] == T::one() && self.coeffs[..m].iter().all(|c| c.is_zero())).then_some(m)
    }

    pub fn cast<U: Scalar>(&self) -> Polynomial<U> {
        Polynomial::new(self.coeffs.iter().map(|&c| U::of(c.as_f64())).collect())
    }

    /// Exact widening from f64 (no rounding).
    pub fn from_f64_poly(p: &Polynomial<f64>) -> Self {
        Self::new(p.coeffs.iter().map(|&c| T::of(c)).collect())
    }

    fn trim(&mut self) {
        while self.coeffs.last().is_some_and(|c| c.is_zero()) {
            self.coeffs.pop();
        }
    }

    /// Coefficient-wise `a + sign * b`; a leading result smaller than
    /// `CANCEL_TOL` times the operands at that power is cancellation noise
    /// and is dropped.
    fn combine(a: &Self, b: &Self, negate_b: bool) -> Self {
        let n = a.coeffs.len().max(b.coeffs.len());
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let bi = if negate_b { -b.coeff(i) } else { b.coeff(i) };
            out.push(a.coeff(i) + bi);
        }
        let tol = T::of(T::CANCEL_TOL);
        while let Some(&last) = out.last() {
            let i = out.len() - 1;
            let scale = a.coeff(i).abs().max(b.coeff(i).abs());
            if last.is_zero() || last.abs() <= tol * scale {
                out.pop();
            } else {
                break;
            }
        }
        Self { coeffs: out }
    }

    fn convolve(a: &Self, b: &Self) -> Self {
        if a.is_zero() || b.is_zero() {
            return Self::zero();
        }
        let mut out = vec![T::zero(); a.coeffs.len() + b.coeffs.len() - 1];
        for (i, &x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, &y) in b.coeffs.iter().enumerate() {
                out[i + j] = out[i + j] + x * y;
            }
        }
        Self::new(out)
    }
}

impl<T: Scalar> Add for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        Polynomial::combine(self, rhs, false)
    }
}

impl<T: Scalar> Sub for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        Polynomial::combine(self, rhs, true)
    }
}

impl<T: Scalar> Mul for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        Polynomial::convolve(self, rhs)
    }
}

impl<T: Scalar> Neg for &Polynomial<T> {
    type Output = Polynomial<T>;
    fn neg(self) -> Polynomial<T> {
        Polynomial { coeffs: self.coeffs.iter().map(|&c| -c).collect() }
    }
}

impl<T: Scalar> Add for Polynomial<T> {
    type Output = Polynomial<T>;
    fn add(self, rhs: Self) -> Polynomial<T> {
        &self + &rhs
    }
}

impl<T: Scalar> Sub for Polynomial<T> {
    type Output = Polynomial<T>;
    fn sub(self, rhs: Self) -> Polynomial<T> {
        &self - &rhs
    }
}

impl<T: Scalar> Mul for Polynomial<T> {
    type Output = Polynomial<T>;
    fn mul(self, rhs: Self) -> Polynomial<T> {
        &self * &rhs
    }
}

/// Quotient `num / den` of two polynomials, kept in canonical form.
#[derive(Clone, PartialEq)]
pub struct RationalFunction<T: Scalar = f64> {
    num: Polynomial<T>,
    den: Polynomial<T>,
}

impl<T: Scalar> Debug for RationalFunction<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?}) / ({:?})", self.num, self.den)
    }
}

impl<T: Scalar> RationalFunction<T> {
    pub fn new(num: Polynomial<T>, den: Polynomial<T>) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        Ok(Self::normalized(num, den))
    }

    pub fn from_poly(p: Polynomial<T>) -> Self {
        Self::normalized(p, Polynomial::one())
    }

    pub fn zero() -> Self {
        Self { num: Polynomial::zero(), den: Polynomial::one() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::from_poly(Polynomial::constant(c))
    }

    /// `sum_i coeffs[i] / x^i`, the natural form of the AIM seeds.
    pub fn laurent(coeffs: &[T]) -> Self {
        let m = coeffs.len().saturating_sub(1);
        let num: Vec<T> = coeffs.iter().rev().copied().collect();
        Self::normalized(Polynomial::new(num), Polynomial::monomial(T::one(), m))
    }

    pub fn num(&self) -> &Polynomial<T> {
        &self.num
    }

    pub fn den(&self) -> &Polynomial<T> {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.num.is_finite() && self.den.is_finite()
    }

    /// Largest numerator coefficient magnitude (the denominator is monic).
    pub fn max_abs_coeff(&self) -> T {
        self.num.max_abs()
    }

    /// Canonical form: monic denominator, common `x^j` cancelled, unit
    /// denominator for zero.
    fn normalized(num: Polynomial<T>, den: Polynomial<T>) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        let lead = den.leading().expect("nonzero denominator");
        let (mut num, mut den) = if lead == T::one() {
            (num, den)
        } else {
            let inv = T::one() / lead;
            let mut d = den.scale(inv);
            // guard the monic invariant against rounding in 1/lead * lead
            if let Some(last) = d.coeffs.last_mut() {
                *last = T::one();
            }
            (num.scale(inv), d)
        };
        let common = num.low_zeros().min(den.low_zeros());
        if common > 0 {
            num = num.shift_down(common);
            den = den.shift_down(common);
        }
        Self { num, den }
    }

    /// Re-applies canonical normalization (idempotent).
    pub fn renormalized(&self) -> Self {
        Self::normalized(self.num.clone(), self.den.clone())
    }

    pub fn scale(&self, s: T) -> Self {
        Self::normalized(self.num.scale(s), self.den.clone())
    }

    pub fn neg(&self) -> Self {
        Self { num: -&self.num, den: self.den.clone() }
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, false)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, true)
    }

    fn combine(&self, other: &Self, negate: bool) -> Self {
        let join = |a: &Polynomial<T>, b: &Polynomial<T>| if negate { a - b } else { a + b };
        if self.is_zero() {
            return if negate { other.neg() } else { other.clone() };
        }
        if other.is_zero() {
            return self.clone();
        }
        if self.den == other.den {
            return Self::normalized(join(&self.num, &other.num), self.den.clone());
        }
        if let (Some(a), Some(b)) =
            (self.den.monic_monomial_power(), other.den.monic_monomial_power())
        {
            let m = a.max(b);
            let num = join(&self.num.shift_up(m - a), &other.num.shift_up(m - b));
            return Self::normalized(num, Polynomial::monomial(T::one(), m));
        }
        let num = join(&(&self.num * &other.den), &(&other.num * &self.den));
        Self::normalized(num, &self.den * &other.den)
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        Self::normalized(&self.num * &other.num, &self.den * &other.den)
    }

    /// Quotient rule `(num' den - num den') / den^2`.
    pub fn derivative(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        if let Some(m) = self.den.monic_monomial_power() {
            // d/dx [N / x^m] = (x N' - m N) / x^(m+1)
            let num = &self.num.derivative().shift_up(1) - &self.num.scale(T::of_usize(m));
            return Self::normalized(num, Polynomial::monomial(T::one(), m + 1));
        }
        self.derivative_general()
    }

    /// Quotient rule without the pure-power fast path.
    pub fn derivative_general(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let num = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        Self::normalized(num, &self.den * &self.den)
    }

    pub fn eval(&self, x: T) -> Result<T> {
        let d = self.den.eval(x);
        let scale = self.den.eval_abs(x);
        if !(d.abs() > T::of(POLE_TOL) * scale) {
            return Err(Error::Pole { x: x.as_f64() });
        }
        Ok(self.num.eval(x) / d)
    }

    pub fn cast<U: Scalar>(&self) -> RationalFunction<U> {
        RationalFunction::normalized(self.num.cast(), self.den.cast())
    }
}

impl RationalFunction<f64> {
    /// Exact widening into a higher-precision scalar.
    pub fn widen<U: Scalar>(&self) -> RationalFunction<U> {
        RationalFunction {
            num: Polynomial::from_f64_poly(&self.num),
            den: Polynomial::from_f64_poly(&self.den),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(c: &[f64]) -> Polynomial {
        Polynomial::from_f64(c)
    }

    fn rf(num: &[f64], den: &[f64]) -> RationalFunction {
        RationalFunction::new(p(num), p(den)).unwrap()
    }

    #[test]
    fn add_cancels_to_constant() {
        assert_eq!(&p(&[1.0, 1.0]) + &p(&[1.0, -1.0]), p(&[2.0]));
        assert_eq!((&p(&[1.0, 1.0]) + &p(&[1.0, -1.0])).degree(), 0);
    }

    #[test]
    fn add_identity_and_disjoint_degrees() {
        let q = p(&[3.0, -1.0, 0.5]);
        assert_eq!(&Polynomial::zero() + &q, q);
        assert_eq!(&p(&[1.0, 2.0]) + &p(&[0.0, 0.0, 3.0]), p(&[1.0, 2.0, 3.0]));
    }

    #[test]
    fn zero_polynomial_has_degree_minus_one() {
        assert_eq!(Polynomial::<f64>::zero().degree(), -1);
        assert_eq!(p(&[0.0, 0.0]).degree(), -1);
        assert!((&p(&[1.0, 2.0]) - &p(&[1.0, 2.0])).is_zero());
    }

    #[test]
    fn near_cancellation_of_leading_term_is_trimmed() {
        let a = p(&[1.0, 0.1 + 0.2]);
        let b = p(&[0.0, -0.3]);
        // 0.1 + 0.2 - 0.3 = 5.5e-17, pure rounding noise
        assert_eq!((&a + &b).degree(), 0);
    }

    #[test]
    fn small_but_genuine_leading_term_survives() {
        // a leading coefficient that is tiny relative to the rest but not the
        // product of cancellation must be kept
        let a = p(&[1e20, 1.0]);
        let b = p(&[1.0]);
        assert_eq!((&a + &b).degree(), 1);
    }

    #[test]
    fn mul_examples() {
        assert_eq!(&p(&[1.0, 1.0]) * &p(&[1.0, -1.0]), p(&[1.0, 0.0, -1.0]));
        let q = p(&[2.0, -3.0, 4.0]);
        assert_eq!(&q * &Polynomial::one(), q);
        assert_eq!(&p(&[1.0, 1.0]) * &p(&[1.0, 1.0]), p(&[1.0, 2.0, 1.0]));
        assert_eq!((&q * &p(&[1.0, 1.0])).degree(), q.degree() + 1);
    }

    #[test]
    fn derivative_of_reciprocal() {
        let f = rf(&[1.0], &[0.0, 1.0]);
        let d = f.derivative();
        assert_eq!(d, rf(&[-1.0], &[0.0, 0.0, 1.0]));
    }

    #[test]
    fn derivative_of_constant_is_zero() {
        assert!(RationalFunction::constant(4.2).derivative().is_zero());
    }

    #[test]
    fn derivative_quotient_rule_example() {
        // d/dρ ((ρ+1)/ρ²) = (−ρ−2)/ρ³
        let f = rf(&[1.0, 1.0], &[0.0, 0.0, 1.0]);
        let d = f.derivative();
        assert_eq!(d, rf(&[-2.0, -1.0], &[0.0, 0.0, 0.0, 1.0]));
        // central difference at ρ = 2
        let h = 1e-6;
        let fd = (f.eval(2.0 + h).unwrap() - f.eval(2.0 - h).unwrap()) / (2.0 * h);
        assert!((d.eval(2.0).unwrap() - fd).abs() < 1e-8);
        assert!((d.eval(2.0).unwrap() + 0.5).abs() < 1e-15);
    }

    #[test]
    fn monomial_fast_path_matches_general_quotient_rule() {
        let f = rf(&[0.3, -2.0, 1.5, 0.25], &[0.0, 0.0, 0.0, 1.0]);
        let fast = f.derivative();
        let slow = f.derivative_general();
        assert_eq!(fast.den(), slow.den());
        for (a, b) in fast.num().coeffs().iter().zip(slow.num().coeffs()) {
            assert!((a - b).abs() <= 1e-15 * a.abs().max(1.0));
        }
    }

    #[test]
    fn arith_examples() {
        let inv = rf(&[1.0], &[0.0, 1.0]);
        assert_eq!(inv.add(&inv), rf(&[2.0], &[0.0, 1.0]));
        // (1 − 2/ρ)·(−1/ρ) = (−ρ + 2)/ρ²
        let a = RationalFunction::laurent(&[1.0, -2.0]);
        let b = RationalFunction::laurent(&[0.0, -1.0]);
        assert_eq!(a.mul(&b), rf(&[2.0, -1.0], &[0.0, 0.0, 1.0]));
        assert_eq!(a.add(&RationalFunction::zero()), a);
    }

    #[test]
    fn general_denominators_use_product() {
        // 1/(x+1) + 1/(x-1) = 2x/(x²-1)
        let a = rf(&[1.0], &[1.0, 1.0]);
        let b = rf(&[1.0], &[-1.0, 1.0]);
        let s = a.add(&b);
        assert_eq!(s, rf(&[0.0, 2.0], &[-1.0, 0.0, 1.0]));
    }

    #[test]
    fn eval_examples() {
        assert_eq!(RationalFunction::laurent(&[1.0, -2.0]).eval(2.0).unwrap(), 0.0);
        assert_eq!(rf(&[1.0], &[0.0, 1.0]).eval(4.0).unwrap(), 0.25);
        assert_eq!(rf(&[1.0, 0.0, 1.0], &[0.0, 1.0]).eval(1.0).unwrap(), 2.0);
    }

    #[test]
    fn eval_at_pole_fails() {
        let f = rf(&[1.0], &[0.0, 1.0]);
        assert_eq!(f.eval(0.0), Err(Error::Pole { x: 0.0 }));
        let g = rf(&[1.0], &[-1.0, 1.0]);
        assert!(matches!(g.eval(1.0), Err(Error::Pole { .. })));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            RationalFunction::new(p(&[1.0]), Polynomial::zero()),
            Err(Error::ZeroDenominator)
        );
    }

    #[test]
    fn denominator_is_monic() {
        let f = rf(&[2.0, 4.0], &[0.0, 2.0]);
        assert_eq!(f.den().leading(), Some(1.0));
        assert_eq!(f, rf(&[1.0, 2.0], &[0.0, 1.0]));
    }

    #[test]
    fn double_double_matches_f64_on_exact_data() {
        let f = RationalFunction::laurent(&[1.0, -3.0, 2.0]);
        let g: RationalFunction<DoubleDouble> = f.widen();
        let d = g.derivative().mul(&g).eval(DoubleDouble::of(3.0)).unwrap();
        let e = f.derivative().mul(&f).eval(3.0).unwrap();
        assert!((d.as_f64() - e).abs() < 1e-15);
    }
}
