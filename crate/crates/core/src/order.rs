//! Quadratic orders `R = Z + f*O_K`, their ideals, and the passage between ideals
//! of `R` and of `O_K` across the conductor `f*O_K`.
//!
//! An order is handled through its ring generator `w = f*omega`, so `R = Z[w]`.
//! Ideals are rank-two `Z`-modules in Hermite normal form `{a, b + c*w}` with
//! `a, c > 0`, `c | a`, `c | b` and `0 <= b < a`; equal ideals have equal triples.

use std::fmt;
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{egcd, factor_bigint, factor_u64, is_prime, sqrt_mod_prime};
use crate::budget::Budget;
use crate::error::{Error, Result};
use crate::quadfield::{
    elements_of_norm_in, AlgebraicInteger, FundamentalUnit, QuadBasis, QuadraticField, SplittingType,
};

/// `x + y*w` in an order with generator `w = f*omega`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderElement {
    pub x: BigInt,
    pub y: BigInt,
}

impl OrderElement {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        OrderElement {
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

impl fmt::Display for OrderElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.x, self.y)
    }
}

/// An ideal of a quadratic order, in Hermite normal form over the order's basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct OrderIdeal {
    d: i64,
    f: u64,
    a: BigInt,
    b: BigInt,
    c: BigInt,
}

impl OrderIdeal {
    /// `(a, b, c)` for the basis `{a, b + c*w}`.
    pub fn hnf(&self) -> (&BigInt, &BigInt, &BigInt) {
        (&self.a, &self.b, &self.c)
    }

    /// Conductor index of the ring the ideal lives in.
    pub fn ring_index(&self) -> u64 {
        self.f
    }

    /// Index of the ideal in its ring.
    pub fn norm(&self) -> BigInt {
        &self.a * &self.c
    }

    pub fn is_unit_ideal(&self) -> bool {
        self.a.is_one() && self.c.is_one()
    }
}

impl fmt::Display for OrderIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {} + {}w]", self.a, self.b, self.c)
    }
}

/// Prime ideals with exponents; the product is the factored ideal.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdealFactorization {
    pub factors: Vec<(OrderIdeal, u32)>,
}

impl IdealFactorization {
    /// Number of prime factors counted with multiplicity.
    pub fn prime_count(&self) -> u32 {
        self.factors.iter().map(|(_, e)| e).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }
}

/// Hermite normal form `(a, b, c)` of the module spanned by `vectors`, or `None` if
/// the span has rank below two.
fn hnf(vectors: &[(BigInt, BigInt)]) -> Option<(BigInt, BigInt, BigInt)> {
    let mut pivot: Option<(BigInt, BigInt)> = None;
    let mut a = BigInt::zero();
    for (x, y) in vectors {
        if y.is_zero() {
            a = a.gcd(x);
            continue;
        }
        match pivot.take() {
            None => pivot = Some((x.clone(), y.clone())),
            Some((px, py)) => {
                let (g, s, t) = egcd(&py, y);
                let new_pivot = (&s * &px + &t * x, g.clone());
                // (y/g)*pivot - (py/g)*v has zero second coordinate
                let residue = (y / &g) * &px - (&py / &g) * x;
                a = a.gcd(&residue);
                pivot = Some(new_pivot);
            }
        }
    }
    let (px, py) = pivot?;
    if a.is_zero() {
        return None;
    }
    let c = py.abs();
    let px = if py.is_negative() { -px } else { px };
    let b = px.mod_floor(&a);
    Some((a, b, c))
}

fn crt(r1: &BigInt, m1: &BigInt, r2: &BigInt, m2: &BigInt) -> Option<(BigInt, BigInt)> {
    let (g, s, _) = egcd(m1, m2);
    let diff = r2 - r1;
    if !(&diff % &g).is_zero() {
        return None;
    }
    let lcm = m1 / &g * m2;
    let x = r1 + m1 * ((&diff / &g) * s);
    Some((x.mod_floor(&lcm), lcm))
}

/// `Z + f*O_K` for a quadratic field `K`.
#[derive(Debug, Clone)]
pub struct QuadraticOrder {
    field: QuadraticField,
    f: u64,
    unit: OnceLock<Option<FundamentalUnit>>,
    unit_index: OnceLock<u64>,
}

impl PartialEq for QuadraticOrder {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.f == other.f
    }
}

impl Eq for QuadraticOrder {}

impl fmt::Display for QuadraticOrder {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(fmt, "Z + {}*O_K, K = Q(sqrt {})", self.f, self.field.d())
    }
}

impl QuadraticOrder {
    pub fn new(d: i64, f: u64) -> Result<Self> {
        if f == 0 {
            return Err(Error::InvalidInput("conductor index must be at least 1".into()));
        }
        Ok(QuadraticOrder {
            field: QuadraticField::new(d)?,
            f,
            unit: OnceLock::new(),
            unit_index: OnceLock::new(),
        })
    }

    pub fn field(&self) -> &QuadraticField {
        &self.field
    }

    pub fn conductor_index(&self) -> u64 {
        self.f
    }

    pub fn is_maximal(&self) -> bool {
        self.f == 1
    }

    pub fn is_imaginary(&self) -> bool {
        !self.field.is_real()
    }

    /// The maximal order `O_K` of the same field.
    pub fn maximal(&self) -> QuadraticOrder {
        if self.is_maximal() {
            return self.clone();
        }
        let m = QuadraticOrder::new(self.field.d(), 1).expect("field already validated");
        if let Some(u) = self.unit.get() {
            let _ = m.unit.set(u.clone());
        }
        let _ = m.unit_index.set(1);
        m
    }

    /// `f^2 * d_K`.
    pub fn discriminant(&self) -> i128 {
        (self.f as i128).pow(2) * self.field.discriminant() as i128
    }

    /// The conductor `f*O_K` is a prime ideal of `O_K` exactly when `f` is a prime
    /// that stays inert.
    pub fn conductor_is_prime(&self) -> bool {
        is_prime(self.f) && self.field.splitting_type(self.f) == Ok(SplittingType::Inert)
    }

    pub(crate) fn basis(&self) -> QuadBasis {
        let base = self.field.basis();
        let f = BigInt::from(self.f);
        QuadBasis {
            trace: &base.trace * &f,
            norm: &base.norm * &f * &f,
        }
    }

    // ---- elements ----

    pub fn to_field(&self, a: &OrderElement) -> AlgebraicInteger {
        AlgebraicInteger::new(a.x.clone(), &a.y * self.f)
    }

    /// The element as a member of this order, if it lies in it.
    pub fn from_field(&self, a: &AlgebraicInteger) -> Option<OrderElement> {
        let f = BigInt::from(self.f);
        if (&a.y % &f).is_zero() {
            Some(OrderElement::new(a.x.clone(), &a.y / &f))
        } else {
            None
        }
    }

    pub fn multiply(&self, a: &OrderElement, b: &OrderElement) -> OrderElement {
        let (x, y) = self.basis().mul((&a.x, &a.y), (&b.x, &b.y));
        OrderElement { x, y }
    }

    pub fn conjugate(&self, a: &OrderElement) -> OrderElement {
        let (x, y) = self.basis().conj((&a.x, &a.y));
        OrderElement { x, y }
    }

    pub fn norm(&self, a: &OrderElement) -> BigInt {
        self.basis().norm_of((&a.x, &a.y))
    }

    pub fn pow(&self, a: &OrderElement, k: u32) -> OrderElement {
        (0..k).fold(OrderElement::one(), |acc, _| self.multiply(&acc, a))
    }

    /// `a / b` if the quotient lies in this order.
    pub fn divide(&self, a: &OrderElement, b: &OrderElement) -> Option<OrderElement> {
        let q = self.field.divide(&self.to_field(a), &self.to_field(b))?;
        self.from_field(&q)
    }

    // ---- ideals ----

    fn make_ideal(&self, a: BigInt, b: BigInt, c: BigInt) -> OrderIdeal {
        OrderIdeal {
            d: self.field.d(),
            f: self.f,
            a,
            b,
            c,
        }
    }

    fn owns(&self, ideal: &OrderIdeal) -> Result<()> {
        if ideal.d == self.field.d() && ideal.f == self.f {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!(
                "ideal of Z + {}*O_K(d={}) used in {self}",
                ideal.f, ideal.d
            )))
        }
    }

    /// Builds an ideal from a candidate HNF triple, checking closure under `w`.
    pub fn ideal(&self, a: impl Into<BigInt>, b: impl Into<BigInt>, c: impl Into<BigInt>) -> Result<OrderIdeal> {
        let (a, b, c) = (a.into(), b.into(), c.into());
        let Some((a2, b2, c2)) = hnf(&[(a.clone(), BigInt::zero()), (b.clone(), c.clone())]) else {
            return Err(Error::InvalidInput("degenerate ideal basis".into()));
        };
        let candidate = self.make_ideal(a2, b2, c2);
        let w = OrderElement::new(0, 1);
        for g in self.ideal_basis(&candidate) {
            if !self.contains(&candidate, &self.multiply(&g, &w)) {
                return Err(Error::InvalidInput(format!(
                    "module [{a}, {b} + {c}w] is not an ideal of {self}"
                )));
            }
        }
        Ok(candidate)
    }

    pub fn unit_ideal(&self) -> OrderIdeal {
        self.make_ideal(BigInt::one(), BigInt::zero(), BigInt::one())
    }

    /// The conductor `f*O_K` as an ideal of this order.
    pub fn conductor(&self) -> OrderIdeal {
        self.make_ideal(BigInt::from(self.f), BigInt::zero(), BigInt::one())
    }

    /// The two HNF basis vectors.
    pub fn ideal_basis(&self, ideal: &OrderIdeal) -> [OrderElement; 2] {
        [
            OrderElement::new(ideal.a.clone(), 0),
            OrderElement::new(ideal.b.clone(), ideal.c.clone()),
        ]
    }

    pub fn contains(&self, ideal: &OrderIdeal, el: &OrderElement) -> bool {
        if !(&el.y % &ideal.c).is_zero() {
            return false;
        }
        let k = &el.y / &ideal.c;
        ((&el.x - k * &ideal.b) % &ideal.a).is_zero()
    }

    /// The ideal generated by `gens` as a module over this order.
    pub fn ideal_from_generators(&self, gens: &[OrderElement]) -> Result<OrderIdeal> {
        let w = OrderElement::new(0, 1);
        let mut vectors = Vec::with_capacity(2 * gens.len());
        for g in gens {
            let gw = self.multiply(g, &w);
            vectors.push((g.x.clone(), g.y.clone()));
            vectors.push((gw.x, gw.y));
        }
        let (a, b, c) = hnf(&vectors).ok_or_else(|| Error::InvalidInput("zero ideal".into()))?;
        Ok(self.make_ideal(a, b, c))
    }

    pub fn principal_ideal(&self, g: &OrderElement) -> Result<OrderIdeal> {
        self.ideal_from_generators(std::slice::from_ref(g))
    }

    pub fn ideal_product(&self, i: &OrderIdeal, j: &OrderIdeal) -> Result<OrderIdeal> {
        self.owns(i)?;
        self.owns(j)?;
        let mut vectors = Vec::with_capacity(4);
        for g in self.ideal_basis(i) {
            for h in self.ideal_basis(j) {
                let p = self.multiply(&g, &h);
                vectors.push((p.x, p.y));
            }
        }
        let (a, b, c) = hnf(&vectors).ok_or_else(|| Error::Internal("product of nonzero ideals vanished".into()))?;
        Ok(self.make_ideal(a, b, c))
    }

    pub fn ideal_pow(&self, i: &OrderIdeal, k: u32) -> Result<OrderIdeal> {
        let mut acc = self.unit_ideal();
        for _ in 0..k {
            acc = self.ideal_product(&acc, i)?;
        }
        Ok(acc)
    }

    pub fn ideal_sum(&self, i: &OrderIdeal, j: &OrderIdeal) -> Result<OrderIdeal> {
        self.owns(i)?;
        self.owns(j)?;
        let vectors: Vec<(BigInt, BigInt)> = self
            .ideal_basis(i)
            .into_iter()
            .chain(self.ideal_basis(j))
            .map(|e| (e.x, e.y))
            .collect();
        let (a, b, c) = hnf(&vectors).expect("sum of full-rank modules");
        Ok(self.make_ideal(a, b, c))
    }

    pub fn ideal_intersection(&self, i: &OrderIdeal, j: &OrderIdeal) -> Result<OrderIdeal> {
        self.owns(i)?;
        self.owns(j)?;
        let (a, b, c) = intersect_modules(i.hnf(), j.hnf());
        Ok(self.make_ideal(a, b, c))
    }

    pub fn conjugate_ideal(&self, i: &OrderIdeal) -> Result<OrderIdeal> {
        self.owns(i)?;
        let gens: Vec<OrderElement> = self.ideal_basis(i).iter().map(|g| self.conjugate(g)).collect();
        self.ideal_from_generators(&gens)
    }

    /// Whether `J + f*O_K = R`.
    pub fn is_coprime_to_conductor(&self, j: &OrderIdeal) -> Result<bool> {
        Ok(self.ideal_sum(j, &self.conductor())?.is_unit_ideal())
    }

    /// `J * O_K`.
    pub fn extend(&self, j: &OrderIdeal) -> Result<OrderIdeal> {
        self.owns(j)?;
        let big = self.maximal();
        let gens: Vec<OrderElement> = self
            .ideal_basis(j)
            .iter()
            .map(|g| {
                let a = self.to_field(g);
                OrderElement::new(a.x, a.y)
            })
            .collect();
        big.ideal_from_generators(&gens)
    }

    /// `J ∩ R` for an ideal `J` of `O_K`.
    pub fn contract(&self, j: &OrderIdeal) -> Result<OrderIdeal> {
        if j.d != self.field.d() || j.f != 1 {
            return Err(Error::InvalidInput("contract expects an ideal of the maximal order".into()));
        }
        let f = BigInt::from(self.f);
        let ring = (BigInt::one(), BigInt::zero(), f.clone());
        let (a, b, c) = intersect_modules(j.hnf(), (&ring.0, &ring.1, &ring.2));
        Ok(self.make_ideal(a, b, c / f))
    }

    /// Invertibility via the multiplier ring: `J` is invertible exactly when
    /// `(J : J) = R`, i.e. no `(f/p)*omega` with `p | f` maps `J` into itself.
    pub fn is_invertible(&self, j: &OrderIdeal) -> Result<bool> {
        self.owns(j)?;
        for (p, _) in factor_u64(self.f) {
            let theta = AlgebraicInteger::new(0, self.f / p);
            let stable = self.ideal_basis(j).iter().all(|g| {
                let prod = self.field.multiply(&theta, &self.to_field(g));
                self.from_field(&prod).is_some_and(|e| self.contains(j, &e))
            });
            if stable {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Whether the ideal is prime.
    ///
    /// A norm-`p^2` ideal is either `pR`, prime exactly when the minimal polynomial
    /// of `w` has no root mod `p`, or has `R/J = Z/p^2`.
    pub fn is_prime_ideal(&self, j: &OrderIdeal) -> Result<bool> {
        self.owns(j)?;
        let n = j
            .norm()
            .to_u64()
            .ok_or_else(|| Error::Resource("ideal norm too large".into()))?;
        let fac = factor_u64(n);
        match fac.as_slice() {
            [(_, 1)] => Ok(true),
            [(p, 2)] => {
                if j.c.is_one() {
                    return Ok(false);
                }
                let basis = self.basis();
                let p = BigInt::from(*p);
                let (t, m) = (basis.trace.mod_floor(&p), basis.norm.mod_floor(&p));
                let mut x = BigInt::zero();
                while x < p {
                    if ((&x * &x) - &t * &x + &m).mod_floor(&p).is_zero() {
                        return Ok(false);
                    }
                    x += 1;
                }
                Ok(true)
            }
            _ => Ok(false),
        }
    }

    // ---- factorization ----

    /// Prime ideals of `O_K` above the rational prime `p`.
    pub fn primes_above(&self, p: u64) -> Result<Vec<OrderIdeal>> {
        let big = self.maximal();
        let kind = self.field.splitting_type(p)?;
        if kind == SplittingType::Inert {
            return Ok(vec![big.make_ideal(BigInt::from(p), BigInt::zero(), BigInt::from(p))]);
        }
        let basis = self.field.basis();
        let (t, n) = (basis.trace.to_i64().unwrap(), basis.norm.to_i64().unwrap());
        // roots of X^2 - tX + n mod p
        let roots: Vec<u64> = if p == 2 {
            (0..2u64)
                .filter(|&r| (r as i64 * r as i64 - t * r as i64 + n).rem_euclid(2) == 0)
                .collect()
        } else {
            let disc = (t * t - 4 * n).rem_euclid(p as i64) as u64;
            let s = sqrt_mod_prime(disc, p).ok_or_else(|| Error::Internal("split prime without root".into()))?;
            let inv2 = p.div_ceil(2);
            let t = t.rem_euclid(p as i64) as u64;
            let mut rs = vec![
                (t + s) % p * inv2 % p,
                (t + p - s) % p * inv2 % p,
            ];
            rs.sort_unstable();
            rs.dedup();
            rs
        };
        roots
            .into_iter()
            .map(|r| {
                big.ideal_from_generators(&[
                    OrderElement::new(p, 0),
                    OrderElement::new(-BigInt::from(r), 1),
                ])
            })
            .collect()
    }

    fn require_maximal(&self, j: &OrderIdeal) -> Result<()> {
        if j.d != self.field.d() || j.f != 1 {
            return Err(Error::InvalidInput("expected an ideal of the maximal order".into()));
        }
        Ok(())
    }

    /// Prime factorization of an ideal of `O_K`.
    pub fn factor_maximal_ideal(&self, j: &OrderIdeal) -> Result<IdealFactorization> {
        self.require_maximal(j)?;
        let big = self.maximal();
        let mut factors = Vec::new();
        for (p, e) in factor_bigint(&j.norm(), 1_000_000)? {
            let primes = self.primes_above(p)?;
            match self.field.splitting_type(p)? {
                SplittingType::Inert => factors.push((primes[0].clone(), e / 2)),
                SplittingType::Ramified => factors.push((primes[0].clone(), e)),
                SplittingType::Split => {
                    let mut k = 0;
                    let mut power = big.unit_ideal();
                    loop {
                        let next = big.ideal_product(&power, &primes[0])?;
                        if !big.ideal_basis(j).iter().all(|g| big.contains(&next, g)) {
                            break;
                        }
                        power = next;
                        k += 1;
                    }
                    if k > 0 {
                        factors.push((primes[0].clone(), k));
                    }
                    if e > k {
                        factors.push((primes[1].clone(), e - k));
                    }
                }
            }
        }
        let product = factors.iter().try_fold(big.unit_ideal(), |acc, (q, e)| {
            big.ideal_product(&acc, &big.ideal_pow(q, *e)?)
        })?;
        if product != *j {
            return Err(Error::Internal(format!("factorization of {j} does not multiply back")));
        }
        Ok(IdealFactorization { factors })
    }

    /// Factorization of `alpha * O_K` into prime ideals of `O_K`.
    pub fn factor_principal_in_maximal(&self, alpha: &AlgebraicInteger) -> Result<IdealFactorization> {
        if alpha.is_zero() {
            return Err(Error::InvalidInput("cannot factor zero".into()));
        }
        let big = self.maximal();
        let j = big.principal_ideal(&OrderElement::new(alpha.x.clone(), alpha.y.clone()))?;
        self.factor_maximal_ideal(&j)
    }

    /// Prime factorization of an ideal of `R` coprime to the conductor: extend,
    /// factor in `O_K`, contract each prime.
    pub fn factor_order_ideal(&self, j: &OrderIdeal) -> Result<IdealFactorization> {
        if !self.is_coprime_to_conductor(j)? {
            return Err(Error::Precondition(format!("{j} is not coprime to the conductor")));
        }
        let upstairs = self.factor_maximal_ideal(&self.extend(j)?)?;
        let mut factors = Vec::new();
        for (q, e) in upstairs.factors {
            factors.push((self.contract(&q)?, e));
        }
        let product = factors.iter().try_fold(self.unit_ideal(), |acc, (q, e)| {
            self.ideal_product(&acc, &self.ideal_pow(q, *e)?)
        })?;
        if product != *j {
            return Err(Error::Internal(format!("factorization of {j} does not multiply back")));
        }
        Ok(IdealFactorization { factors })
    }

    // ---- units and principality ----

    /// The fundamental unit of `O_K` (real fields), cached.
    pub fn fundamental_unit(&self) -> Result<FundamentalUnit> {
        if !self.field.is_real() {
            return Err(Error::Precondition("imaginary fields have no fundamental unit".into()));
        }
        if let Some(Some(u)) = self.unit.get() {
            return Ok(u.clone());
        }
        let u = self.field.fundamental_unit()?;
        let _ = self.unit.set(Some(u.clone()));
        Ok(u)
    }

    /// `|U(O_K)/U(R)|`: the least `k` with `u^k` in `R` for real fields, and the
    /// index of the torsion subgroups for imaginary ones.
    pub fn unit_index(&self) -> Result<u64> {
        if let Some(&k) = self.unit_index.get() {
            return Ok(k);
        }
        let k = if self.is_maximal() {
            1
        } else if self.field.is_real() {
            let u = self.fundamental_unit()?.element;
            let cap = 4 * self.f * self.f + 8;
            let mut power = u.clone();
            let mut k = 1;
            while self.from_field(&power).is_none() {
                power = self.field.multiply(&power, &u);
                k += 1;
                if k > cap {
                    return Err(Error::Internal(format!("no power of the unit below {cap} lies in the order")));
                }
            }
            k
        } else {
            let all = self.field.torsion_units();
            let inside = all.iter().filter(|u| self.from_field(u).is_some()).count();
            (all.len() / inside) as u64
        };
        let _ = self.unit_index.set(k);
        Ok(k)
    }

    /// `(|U(O_K/pO_K)|, |U(R/pO_K)|)` for a prime conductor `p*O_K`.
    pub fn quotient_unit_counts(&self) -> Result<(u64, u64)> {
        if !self.conductor_is_prime() {
            return Err(Error::Precondition(format!("conductor of {self} is not prime")));
        }
        let p = self.f;
        let counts = (p * p - 1, p - 1);
        if p <= 64 {
            let enumerated = self.enumerate_residue_units();
            if enumerated != counts {
                return Err(Error::Internal(format!(
                    "residue unit enumeration {enumerated:?} disagrees with {counts:?}"
                )));
            }
        }
        Ok(counts)
    }

    /// Unit counts of `O_K/fO_K` and `R/fO_K` by direct enumeration of residues.
    pub fn enumerate_residue_units(&self) -> (u64, u64) {
        let f = self.f as i64;
        let basis = self.field.basis();
        let mut big_units = 0;
        let mut small_units = 0;
        for x in 0..f {
            for y in 0..f {
                // a unit mod f*O_K has norm coprime to f
                let n = basis.norm_of((&BigInt::from(x), &BigInt::from(y)));
                let unit = n.gcd(&BigInt::from(f)).is_one();
                if unit {
                    big_units += 1;
                    if y == 0 {
                        small_units += 1;
                    }
                }
            }
        }
        (big_units, small_units)
    }

    /// `(|U(O_K/fO_K)|, |U(R/fO_K)|)` for any conductor index, by the product formula.
    pub fn conductor_unit_counts(&self) -> Result<(u64, u64)> {
        let mut big = 1u64;
        let mut small = 1u64;
        for (p, e) in factor_u64(self.f) {
            let residue = match self.field.splitting_type(p)? {
                SplittingType::Inert => p * p - 1,
                SplittingType::Split => (p - 1) * (p - 1),
                SplittingType::Ramified => p * (p - 1),
            };
            big *= residue * p.pow(2 * (e - 1));
            small *= (p - 1) * p.pow(e - 1);
        }
        Ok((big, small))
    }

    /// A generator of an ideal of `O_K` if it is principal.
    fn generator_in_maximal(&self, j: &OrderIdeal, budget: &Budget) -> Result<Option<AlgebraicInteger>> {
        self.require_maximal(j)?;
        let big = self.maximal();
        let n = j
            .norm()
            .to_u64()
            .ok_or_else(|| Error::Resource("ideal norm exceeds 64 bits".into()))?;
        let basis = self.field.basis();
        let member = |x: i128, y: i128| big.contains(j, &OrderElement::new(x, y));
        if !self.field.is_real() {
            for e in elements_of_norm_in(&basis, n)? {
                if big.contains(j, &OrderElement::new(e.x.clone(), e.y.clone())) {
                    return Ok(Some(e));
                }
            }
            return Ok(None);
        }
        // A generator can be scaled by units so that |alpha| and |conj(alpha)| both
        // lie below sqrt(n * eps); then |y| * sqrt(d_K) <= 2 sqrt(n * eps).
        let eps = self.field.embed(&self.fundamental_unit()?.element);
        let bound = 2.0 * (n as f64 * eps).sqrt() / (self.field.discriminant() as f64).sqrt();
        let y_max = bound.floor() as u64 + 1;
        if y_max > budget.generator_scan {
            return Err(Error::Resource(format!(
                "generator search needs {y_max} coordinates, budget is {}",
                budget.generator_scan
            )));
        }
        let n = n as i128;
        for y in 0..=y_max as i128 {
            for sy in [y, -y] {
                for target in [n, -n] {
                    for x in basis.solve_for_x(sy, target)? {
                        if member(x, sy) {
                            return Ok(Some(AlgebraicInteger::new(x, sy)));
                        }
                    }
                }
                if y == 0 {
                    break;
                }
            }
        }
        Ok(None)
    }

    /// A generator of `J` if `J` is principal, else `None`.
    pub fn find_generator(&self, j: &OrderIdeal) -> Result<Option<OrderElement>> {
        self.find_generator_with(j, &Budget::default())
    }

    pub fn find_generator_with(&self, j: &OrderIdeal, budget: &Budget) -> Result<Option<OrderElement>> {
        self.owns(j)?;
        let upstairs = self.extend(j)?;
        let Some(alpha) = self.generator_in_maximal(&upstairs, budget)? else {
            return Ok(None);
        };
        // Any generator of J generates J*O_K, so it is alpha times a unit of O_K
        // taken modulo U(R).
        let cosets: Vec<AlgebraicInteger> = if self.field.is_real() {
            let u = self.fundamental_unit()?.element;
            let k = self.unit_index()?;
            let mut reps = vec![AlgebraicInteger::one()];
            for _ in 1..k {
                let last = reps.last().unwrap().clone();
                reps.push(self.field.multiply(&last, &u));
            }
            reps
        } else {
            self.field.torsion_units()
        };
        for u in cosets {
            let candidate = self.field.multiply(&alpha, &u);
            if let Some(g) = self.from_field(&candidate) {
                if self.principal_ideal(&g)? == *j {
                    return Ok(Some(g));
                }
            }
        }
        Ok(None)
    }

    pub fn is_principal(&self, j: &OrderIdeal) -> Result<bool> {
        Ok(self.find_generator(j)?.is_some())
    }

    /// Units of an imaginary order.
    pub fn torsion_units(&self) -> Vec<OrderElement> {
        self.field
            .torsion_units()
            .iter()
            .filter_map(|u| self.from_field(u))
            .collect()
    }

    /// Ideals `a*Z + (b + omega)*Z` of `O_K` with `a <= bound` (every ideal class
    /// contains one when `bound` is the Minkowski bound).
    pub fn primitive_maximal_ideals(&self, bound: u64) -> Vec<OrderIdeal> {
        let big = self.maximal();
        let basis = self.field.basis();
        let mut out = Vec::new();
        for a in 1..=bound {
            let big_a = BigInt::from(a);
            for b in 0..a {
                let nb = basis.norm_of((&BigInt::from(b), &BigInt::one()));
                if (nb % &big_a).is_zero() {
                    out.push(big.make_ideal(big_a.clone(), BigInt::from(b), BigInt::one()));
                }
            }
        }
        out
    }
}

/// Intersection of two full-rank modules given in HNF over the same basis.
fn intersect_modules(
    m1: (&BigInt, &BigInt, &BigInt),
    m2: (&BigInt, &BigInt, &BigInt),
) -> (BigInt, BigInt, BigInt) {
    let (a1, b1, c1) = m1;
    let (a2, b2, c2) = m2;
    let l = c1.lcm(c2);
    let a = a1.lcm(a2);
    let mut k = BigInt::one();
    loop {
        let y = &l * &k;
        // x must satisfy x = (y/c1) b1 mod a1 and x = (y/c2) b2 mod a2
        let r1 = (&y / c1) * b1;
        let r2 = (&y / c2) * b2;
        if let Some((x, _)) = crt(&r1, a1, &r2, a2) {
            return (a.clone(), x.mod_floor(&a), y);
        }
        k += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn order(d: i64, f: u64) -> QuadraticOrder {
        QuadraticOrder::new(d, f).unwrap()
    }

    fn el(x: i64, y: i64) -> OrderElement {
        OrderElement::new(x, y)
    }

    #[test]
    fn conductor_primality() {
        assert!(order(-7, 5).conductor_is_prime());
        assert!(!order(-1, 5).conductor_is_prime());
        assert!(order(10, 17).conductor_is_prime());
        assert!(order(-14, 11).conductor_is_prime());
        assert!(order(641, 449).conductor_is_prime());
        let max = order(-7, 1);
        assert!(max.is_maximal() && !max.conductor_is_prime());
        assert!(max.conductor().is_unit_ideal());
        assert!(QuadraticOrder::new(18, 3).is_err());
        assert!(QuadraticOrder::new(-7, 0).is_err());
    }

    #[test]
    fn ideals_from_generators() {
        let r = order(10, 17);
        let j = r.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        assert_eq!(j.hnf(), (&BigInt::from(2), &BigInt::zero(), &BigInt::one()));
        assert!(r.ideal_from_generators(&[el(1, 0)]).unwrap().is_unit_ideal());
        let ok = order(10, 1);
        let p2 = ok.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        assert_eq!(p2.hnf(), (&BigInt::from(2), &BigInt::zero(), &BigInt::one()));
        assert!(r.ideal_from_generators(&[el(0, 0)]).is_err());
        // permuted generators give the same HNF
        let a = r.ideal_from_generators(&[el(7, 3), el(34, 0), el(5, 1)]).unwrap();
        let b = r.ideal_from_generators(&[el(5, 1), el(7, 3), el(34, 0)]).unwrap();
        assert_eq!(a, b);
        assert!(r.ideal(5, 1, 1).is_err());
        assert!(r.ideal(3, 1, 1).is_ok());
    }

    #[test]
    fn products() {
        let r = order(10, 17);
        let j = r.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        let two = r.principal_ideal(&el(2, 0)).unwrap();
        assert_eq!(r.ideal_product(&j, &j).unwrap(), two);
        assert_eq!(r.ideal_product(&j, &r.unit_ideal()).unwrap(), j);
        let zi = order(-1, 1);
        let a = zi.principal_ideal(&el(1, 2)).unwrap();
        let b = zi.principal_ideal(&el(1, -2)).unwrap();
        assert_eq!(zi.ideal_product(&a, &b).unwrap(), zi.principal_ideal(&el(5, 0)).unwrap());
        assert!(r.ideal_product(&j, &zi.unit_ideal()).is_err());
    }

    #[test]
    fn coprimality() {
        let r = order(10, 17);
        assert!(!r.is_coprime_to_conductor(&r.conductor()).unwrap());
        assert!(r.is_coprime_to_conductor(&r.unit_ideal()).unwrap());
        let j = r.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        assert!(r.is_coprime_to_conductor(&j).unwrap());
    }

    #[test]
    fn extension_and_contraction() {
        let r = order(10, 17);
        let j = r.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        let up = r.extend(&j).unwrap();
        let ok = order(10, 1);
        assert_eq!(up, ok.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap());
        assert_eq!(r.contract(&up).unwrap(), j);
        let conductor_up = ok.principal_ideal(&el(17, 0)).unwrap();
        assert_eq!(r.contract(&conductor_up).unwrap(), r.conductor());
    }

    #[test]
    fn invertibility() {
        let r = order(-1, 5);
        assert!(!r.is_invertible(&r.conductor()).unwrap());
        assert!(r.is_invertible(&r.unit_ideal()).unwrap());
        let j = r.contract(&r.primes_above(2).unwrap()[0]).unwrap();
        assert!(r.is_invertible(&j).unwrap());
    }

    #[test]
    fn factor_in_maximal() {
        let r = order(10, 17);
        let f = r.factor_principal_in_maximal(&AlgebraicInteger::new(2, 0)).unwrap();
        assert_eq!(f.factors.len(), 1);
        assert_eq!(f.factors[0].1, 2);
        assert_eq!(f.factors[0].0.hnf(), (&BigInt::from(2), &BigInt::zero(), &BigInt::one()));

        let zi = order(-1, 5);
        let f = zi.factor_principal_in_maximal(&AlgebraicInteger::new(5, 0)).unwrap();
        assert_eq!(f.prime_count(), 2);
        assert_eq!(f.factors.len(), 2);
        let ok = zi.maximal();
        let mut expected = vec![
            ok.principal_ideal(&el(1, 2)).unwrap(),
            ok.principal_ideal(&el(1, -2)).unwrap(),
        ];
        expected.sort();
        let mut got: Vec<OrderIdeal> = f.factors.iter().map(|(p, _)| p.clone()).collect();
        got.sort();
        assert_eq!(got, expected);

        let r7 = order(-7, 5);
        let f = r7.factor_principal_in_maximal(&AlgebraicInteger::new(0, 1)).unwrap();
        assert_eq!(f.prime_count(), 1);
        assert_eq!(f.factors[0].0.norm(), BigInt::from(2));
    }

    #[test]
    fn factor_in_order() {
        let r = order(-7, 5);
        assert!(r.factor_order_ideal(&r.unit_ideal()).unwrap().is_empty());
        let two = r.principal_ideal(&el(2, 0)).unwrap();
        let f = r.factor_order_ideal(&two).unwrap();
        assert_eq!(f.factors.len(), 2);
        assert!(f.factors.iter().all(|(p, e)| *e == 1 && p.norm() == BigInt::from(2)));
        assert_ne!(f.factors[0].0, f.factors[1].0);
        assert_eq!(r.conjugate_ideal(&f.factors[0].0).unwrap(), f.factors[1].0);
        let prime = f.factors[0].0.clone();
        let again = r.factor_order_ideal(&prime).unwrap();
        assert_eq!(again.factors, vec![(prime, 1)]);
        assert!(matches!(r.factor_order_ideal(&r.conductor()), Err(Error::Precondition(_))));
    }

    #[test]
    fn generators() {
        let r = order(10, 17);
        let two = r.principal_ideal(&el(2, 0)).unwrap();
        let g = r.find_generator(&two).unwrap().unwrap();
        assert_eq!(r.norm(&g).abs(), BigInt::from(4));
        assert_eq!(r.principal_ideal(&g).unwrap(), two);
        let ok = order(10, 1);
        let p2 = ok.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        assert_eq!(ok.find_generator(&p2).unwrap(), None);
        assert_eq!(r.find_generator(&r.unit_ideal()).unwrap().map(|g| r.norm(&g).abs()), Some(BigInt::one()));
        let j = r.ideal_from_generators(&[el(2, 0), el(0, 1)]).unwrap();
        assert_eq!(r.find_generator(&j).unwrap(), None);
    }

    #[test]
    fn unit_indices() {
        assert_eq!(order(10, 17).unit_index().unwrap(), 9);
        assert_eq!(order(641, 449).unit_index().unwrap(), 3);
        assert_eq!(order(10, 1).unit_index().unwrap(), 1);
        assert_eq!(order(-7, 5).unit_index().unwrap(), 1);
        assert_eq!(order(-1, 5).unit_index().unwrap(), 2);
        assert_eq!(order(-3, 2).unit_index().unwrap(), 3);
    }

    #[test]
    fn residue_unit_counts() {
        assert_eq!(order(10, 17).quotient_unit_counts().unwrap(), (288, 16));
        assert_eq!(order(-14, 11).quotient_unit_counts().unwrap(), (120, 10));
        assert_eq!(order(641, 449).quotient_unit_counts().unwrap(), (201_600, 448));
        assert!(order(-1, 5).quotient_unit_counts().is_err());
        for (d, f) in [(-1i64, 5u64), (-7, 6), (10, 9), (-14, 11)] {
            let r = order(d, f);
            assert_eq!(r.conductor_unit_counts().unwrap(), r.enumerate_residue_units(), "d={d} f={f}");
        }
    }

    #[test]
    fn prime_ideals() {
        let r = order(-7, 5);
        for p in [2u64, 3, 7, 11] {
            for q in r.primes_above(p).unwrap() {
                assert!(r.maximal().is_prime_ideal(&q).unwrap());
            }
        }
        assert!(!r.is_prime_ideal(&r.principal_ideal(&el(6, 0)).unwrap()).unwrap());
        assert!(!r.maximal().is_prime_ideal(&r.maximal().principal_ideal(&el(2, 0)).unwrap()).unwrap());
        // against a zero-divisor scan of the residue ring
        for (d, f) in [(-7, 5), (-14, 11), (10, 17), (-1, 3), (2, 1)] {
            let r = order(d, f);
            for p in [2u64, 3, 5, 7, 11, 13] {
                let mut ideals = vec![r.principal_ideal(&el(p as i64, 0)).unwrap()];
                if f % p != 0 {
                    ideals.extend(r.primes_above(p).unwrap().iter().map(|q| r.contract(q).unwrap()));
                }
                ideals.extend((0..p * p).find_map(|b| r.ideal(p * p, b, 1).ok()));
                for j in ideals {
                    let (a, _, c) = j.hnf();
                    let (a, c) = (a.to_i64().unwrap(), c.to_i64().unwrap());
                    let reps: Vec<OrderElement> = (0..c)
                        .flat_map(|y| (0..a).map(move |x| el(x, y)))
                        .filter(|e| !r.contains(&j, e))
                        .collect();
                    let domain = reps
                        .iter()
                        .all(|x| reps.iter().all(|y| !r.contains(&j, &r.multiply(x, y))));
                    assert_eq!(r.is_prime_ideal(&j).unwrap(), domain, "{j} in ({d}, {f})");
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn any_order() -> impl Strategy<Value = QuadraticOrder> {
            prop::sample::select(vec![(-7i64, 5u64), (-14, 11), (10, 17), (-1, 3), (2, 3)])
                .prop_map(|(d, f)| QuadraticOrder::new(d, f).unwrap())
        }

        proptest! {
            #[test]
            fn norm_is_multiplicative(r in any_order(), x1 in -40i64..40, y1 in -40i64..40, x2 in -40i64..40, y2 in -40i64..40) {
                let (a, b) = (el(x1, y1), el(x2, y2));
                prop_assert_eq!(r.norm(&r.multiply(&a, &b)), r.norm(&a) * r.norm(&b));
            }

            #[test]
            fn principal_ideal_norm(r in any_order(), x in -30i64..30, y in -30i64..30) {
                let a = el(x, y);
                prop_assume!(!a.is_zero());
                prop_assert_eq!(r.principal_ideal(&a).unwrap().norm(), r.norm(&a).abs());
            }

            #[test]
            fn hnf_ignores_generator_order(r in any_order(), gens in prop::collection::vec((-30i64..30, -30i64..30), 1..4)) {
                let gens: Vec<OrderElement> = gens.into_iter().map(|(x, y)| el(x, y)).collect();
                prop_assume!(gens.iter().any(|g| !g.is_zero()));
                let mut rev = gens.clone();
                rev.reverse();
                let i = r.ideal_from_generators(&gens).unwrap();
                prop_assert_eq!(&i, &r.ideal_from_generators(&rev).unwrap());
                for g in &gens {
                    prop_assert!(r.contains(&i, g));
                }
            }

            #[test]
            fn intersection_contains_product(r in any_order(), a in 1i64..20, b in 1i64..20) {
                let i = r.principal_ideal(&el(a, 1)).unwrap();
                let j = r.principal_ideal(&el(b, 0)).unwrap();
                let meet = r.ideal_intersection(&i, &j).unwrap();
                let prod = r.ideal_product(&i, &j).unwrap();
                for g in r.ideal_basis(&prod) {
                    prop_assert!(r.contains(&meet, &g));
                }
                for g in r.ideal_basis(&meet) {
                    prop_assert!(r.contains(&i, &g) && r.contains(&j, &g));
                }
            }
        }
    }
}
