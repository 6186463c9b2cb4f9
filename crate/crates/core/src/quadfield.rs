//! Exact arithmetic in quadratic fields `Q(sqrt d)`.
//!
//! Integers are written `x + y*omega` with `omega = (s + sqrt(d_K))/2`, where
//! `s = d_K mod 2`. All coordinates are arbitrary precision.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{exact_sqrt_i128, is_prime, is_squarefree};
use crate::budget::Budget;
use crate::error::{Error, Result};

/// Kronecker symbol `(a | n)` for `n >= 1`.
pub fn kronecker(a: i128, n: u64) -> i32 {
    assert!(n >= 1, "kronecker symbol needs n >= 1");
    let mut n = n as i128;
    let mut result = 1;
    while n % 2 == 0 {
        n /= 2;
        match a.rem_euclid(8) {
            1 | 7 => {}
            3 | 5 => result = -result,
            _ => return 0,
        }
    }
    // Jacobi symbol for odd n.
    let mut a = a.rem_euclid(n);
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum SplittingType {
    Inert,
    Split,
    Ramified,
}

/// Multiplication data of a rank-two ring `Z[w]` with `w^2 = t*w - n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct QuadBasis {
    pub trace: BigInt,
    pub norm: BigInt,
}

impl QuadBasis {
    pub fn mul(&self, a: (&BigInt, &BigInt), b: (&BigInt, &BigInt)) -> (BigInt, BigInt) {
        let (x1, y1) = a;
        let (x2, y2) = b;
        let yy = y1 * y2;
        (
            x1 * x2 - &self.norm * &yy,
            x1 * y2 + y1 * x2 + &self.trace * &yy,
        )
    }

    pub fn conj(&self, a: (&BigInt, &BigInt)) -> (BigInt, BigInt) {
        (a.0 + &self.trace * a.1, -a.1)
    }

    pub fn norm_of(&self, a: (&BigInt, &BigInt)) -> BigInt {
        a.0 * a.0 + &self.trace * a.0 * a.1 + &self.norm * a.1 * a.1
    }

    /// `t^2 - 4n`.
    pub fn disc(&self) -> BigInt {
        &self.trace * &self.trace - BigInt::from(4) * &self.norm
    }

    /// All `x` with `N(x + y*w) = target` for a fixed `y`.
    pub fn solve_for_x(&self, y: i128, target: i128) -> Result<Vec<i128>> {
        let overflow = || Error::Resource("norm equation exceeds 128-bit range".into());
        let t = self.trace.to_i128().ok_or_else(overflow)?;
        let disc = self.disc().to_i128().ok_or_else(overflow)?;
        let rad = disc
            .checked_mul(y)
            .and_then(|v| v.checked_mul(y))
            .and_then(|v| v.checked_add(target.checked_mul(4)?))
            .ok_or_else(overflow)?;
        let Some(r) = exact_sqrt_i128(rad) else {
            return Ok(vec![]);
        };
        let mut out = Vec::new();
        for num in [-t * y + r, -t * y - r] {
            if num % 2 == 0 && !out.contains(&(num / 2)) {
                out.push(num / 2);
            }
        }
        Ok(out)
    }
}

/// The quadratic field `Q(sqrt d)` with `d` squarefree, `d` not 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct QuadraticField {
    d: i64,
    disc: i64,
}

/// `x + y*omega` in the ring of integers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct AlgebraicInteger {
    pub x: BigInt,
    pub y: BigInt,
}

impl AlgebraicInteger {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        AlgebraicInteger {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn one() -> Self {
        Self::new(1, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }
}

impl fmt::Display for AlgebraicInteger {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// The fundamental unit, normalized to be greater than one under the embedding
/// with `sqrt d > 0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FundamentalUnit {
    pub element: AlgebraicInteger,
    pub norm: i32,
}

impl QuadraticField {
    pub fn new(d: i64) -> Result<Self> {
        if d == 0 || d == 1 || !is_squarefree(d) {
            return Err(Error::InvalidInput(format!(
                "d = {d} must be a squarefree integer other than 0 and 1"
            )));
        }
        let disc = if d.rem_euclid(4) == 1 { d } else { 4 * d };
        Ok(QuadraticField { d, disc })
    }

    pub fn d(&self) -> i64 {
        self.d
    }

    /// Field discriminant `d_K`.
    pub fn discriminant(&self) -> i64 {
        self.disc
    }

    pub fn is_real(&self) -> bool {
        self.d > 0
    }

    /// `s` in `omega = (s + sqrt(d_K))/2`.
    pub fn omega_shift(&self) -> i64 {
        self.disc.rem_euclid(2)
    }

    pub(crate) fn basis(&self) -> QuadBasis {
        let s = self.omega_shift();
        QuadBasis {
            trace: BigInt::from(s),
            norm: BigInt::from((s - self.disc) / 4),
        }
    }

    pub fn multiply(&self, a: &AlgebraicInteger, b: &AlgebraicInteger) -> AlgebraicInteger {
        let (x, y) = self.basis().mul((&a.x, &a.y), (&b.x, &b.y));
        AlgebraicInteger { x, y }
    }

    pub fn conjugate(&self, a: &AlgebraicInteger) -> AlgebraicInteger {
        let (x, y) = self.basis().conj((&a.x, &a.y));
        AlgebraicInteger { x, y }
    }

    pub fn norm(&self, a: &AlgebraicInteger) -> BigInt {
        self.basis().norm_of((&a.x, &a.y))
    }

    pub fn pow(&self, a: &AlgebraicInteger, mut k: u64) -> AlgebraicInteger {
        let mut acc = AlgebraicInteger::one();
        let mut base = a.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `a / b` if the quotient is integral.
    pub fn divide(&self, a: &AlgebraicInteger, b: &AlgebraicInteger) -> Option<AlgebraicInteger> {
        let n = self.norm(b);
        if n.is_zero() {
            return None;
        }
        let num = self.multiply(a, &self.conjugate(b));
        if (&num.x % &n).is_zero() && (&num.y % &n).is_zero() {
            Some(AlgebraicInteger::new(&num.x / &n, &num.y / &n))
        } else {
            None
        }
    }

    /// Value under the real embedding with `sqrt d > 0` (real fields only).
    pub fn embed(&self, a: &AlgebraicInteger) -> f64 {
        let root = (self.disc as f64).sqrt();
        let omega = (self.omega_shift() as f64 + root) / 2.0;
        a.x.to_f64().unwrap_or(f64::NAN) + a.y.to_f64().unwrap_or(f64::NAN) * omega
    }

    pub fn splitting_type(&self, p: u64) -> Result<SplittingType> {
        if !is_prime(p) {
            return Err(Error::InvalidInput(format!("{p} is not a rational prime")));
        }
        Ok(match kronecker(self.disc as i128, p) {
            0 => SplittingType::Ramified,
            -1 => SplittingType::Inert,
            _ => SplittingType::Split,
        })
    }

    /// Every element of norm `n` (imaginary fields, where the set is finite).
    pub fn elements_of_norm(&self, n: u64) -> Result<Vec<AlgebraicInteger>> {
        if self.is_real() {
            return Err(Error::Unsupported(
                "norm enumeration is finite only in imaginary fields".into(),
            ));
        }
        elements_of_norm_in(&self.basis(), n)
    }

    /// The finite unit group of an imaginary field.
    pub fn torsion_units(&self) -> Vec<AlgebraicInteger> {
        if self.is_real() {
            return vec![AlgebraicInteger::one(), AlgebraicInteger::new(-1, 0)];
        }
        self.elements_of_norm(1).expect("imaginary field")
    }

    /// Fundamental unit from the continued fraction of `omega`.
    pub fn fundamental_unit(&self) -> Result<FundamentalUnit> {
        self.fundamental_unit_with(&Budget::default())
    }

    pub fn fundamental_unit_with(&self, budget: &Budget) -> Result<FundamentalUnit> {
        if !self.is_real() {
            return Err(Error::Precondition(
                "fundamental units exist only in real quadratic fields".into(),
            ));
        }
        let big_d = BigInt::from(self.disc);
        let root = big_d.sqrt();
        let s = BigInt::from(self.omega_shift());
        // omega = (p + sqrt D)/q with q | D - p^2
        let (mut p, mut q) = (s.clone(), BigInt::from(2));
        let (mut h_prev, mut h) = (BigInt::zero(), BigInt::one());
        let (mut k_prev, mut k) = (BigInt::one(), BigInt::zero());
        let field_basis = self.basis();
        for _ in 0..budget.cf_steps {
            let a = (&p + &root).div_floor(&q);
            let h_next = &a * &h + &h_prev;
            let k_next = &a * &k + &k_prev;
            h_prev = std::mem::replace(&mut h, h_next);
            k_prev = std::mem::replace(&mut k, k_next);
            p = &a * &q - &p;
            q = (&big_d - &p * &p) / &q;
            // h/k approximates omega, so h - k*conj(omega) is the unit candidate.
            let x = &h - &k * &s;
            let norm = field_basis.norm_of((&x, &k));
            if norm.abs().is_one() {
                return Ok(FundamentalUnit {
                    element: AlgebraicInteger::new(x, k.clone()),
                    norm: if norm.is_positive() { 1 } else { -1 },
                });
            }
        }
        Err(Error::Resource(format!(
            "continued fraction of omega did not close within {} steps",
            budget.cf_steps
        )))
    }
}

/// Elements of norm `n` in a ring with positive-definite norm form.
pub(crate) fn elements_of_norm_in(basis: &QuadBasis, n: u64) -> Result<Vec<AlgebraicInteger>> {
    let disc = basis
        .disc()
        .to_i128()
        .ok_or_else(|| Error::Resource("discriminant too large".into()))?;
    if disc >= 0 {
        return Err(Error::Unsupported("norm form is indefinite".into()));
    }
    // N(x + y w) = (x + t y/2)^2 + |disc| y^2/4, so |disc| y^2 <= 4n.
    let mut out = Vec::new();
    let n = n as i128;
    let mut y = 0i128;
    while (-disc) * y * y <= 4 * n {
        for sy in if y == 0 { vec![0] } else { vec![y, -y] } {
            for x in basis.solve_for_x(sy, n)? {
                out.push(AlgebraicInteger::new(x, sy));
            }
        }
        y += 1;
    }
    out.sort();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field(d: i64) -> QuadraticField {
        QuadraticField::new(d).unwrap()
    }

    #[test]
    fn kronecker_values() {
        assert_eq!(kronecker(-14, 11), -1);
        assert_eq!(kronecker(10, 17), -1);
        assert_eq!(kronecker(12345, 1), 1);
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(4, 2), 0);
        assert_eq!(kronecker(641, 449), -1);
    }

    #[test]
    fn kronecker_agrees_with_euler_criterion() {
        for p in [3u64, 5, 7, 11, 13, 101] {
            for a in -50i128..50 {
                let r = a.rem_euclid(p as i128);
                let euler = if r == 0 {
                    0
                } else {
                    let mut acc = 1i128;
                    for _ in 0..(p - 1) / 2 {
                        acc = acc * r % p as i128;
                    }
                    if acc == 1 { 1 } else { -1 }
                };
                assert_eq!(kronecker(a, p), euler, "({a} | {p})");
            }
        }
    }

    #[test]
    fn splitting_examples() {
        assert_eq!(field(-7).splitting_type(5).unwrap(), SplittingType::Inert);
        assert_eq!(field(-1).splitting_type(5).unwrap(), SplittingType::Split);
        assert_eq!(field(10).splitting_type(2).unwrap(), SplittingType::Ramified);
        assert_eq!(field(10).splitting_type(17).unwrap(), SplittingType::Inert);
        assert!(field(10).splitting_type(15).is_err());
    }

    #[test]
    fn rejects_non_squarefree() {
        assert!(QuadraticField::new(12).is_err());
        assert!(QuadraticField::new(1).is_err());
        assert!(QuadraticField::new(0).is_err());
        assert_eq!(field(-7).discriminant(), -7);
        assert_eq!(field(-14).discriminant(), -56);
        assert_eq!(field(10).discriminant(), 40);
    }

    #[test]
    fn norms() {
        let k = field(-7);
        assert_eq!(k.norm(&AlgebraicInteger::new(0, 1)), BigInt::from(2));
        assert_eq!(k.norm(&AlgebraicInteger::one()), BigInt::one());
        assert_eq!(k.conjugate(&AlgebraicInteger::one()), AlgebraicInteger::one());
        let k14 = field(-14);
        assert_eq!(k14.norm(&AlgebraicInteger::new(325, 42)), BigInt::from(130_321));
        assert_eq!(BigInt::from(130_321), BigInt::from(19).pow(4));
    }

    #[test]
    fn fundamental_units() {
        let u10 = field(10).fundamental_unit().unwrap();
        assert_eq!(u10.element, AlgebraicInteger::new(3, 1));
        assert_eq!(u10.norm, -1);
        let u5 = field(5).fundamental_unit().unwrap();
        assert_eq!(u5.element, AlgebraicInteger::new(0, 1));
        assert_eq!(u5.norm, -1);
        let u2 = field(2).fundamental_unit().unwrap();
        assert_eq!(u2.element, AlgebraicInteger::new(1, 1));
        let u641 = field(641).fundamental_unit().unwrap();
        assert_eq!(field(641).norm(&u641.element).abs(), BigInt::one());
        assert!(field(641).embed(&u641.element) > 1.0);
        assert!(field(-7).fundamental_unit().is_err());
    }

    #[test]
    fn torsion() {
        assert_eq!(field(-1).torsion_units().len(), 4);
        assert_eq!(field(-3).torsion_units().len(), 6);
        assert_eq!(field(-7).torsion_units().len(), 2);
    }
}
