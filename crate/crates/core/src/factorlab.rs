//! Brute-force factorization in imaginary quadratic orders.
//!
//! Everything here works directly on coordinates `x + y*w` with `w = f*omega` and
//! the positive definite norm form; no ideal arithmetic is involved, so the results
//! serve as an independent check on the class group and elasticity computations.

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use num_rational::Ratio;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::arith::{exact_sqrt_i128, factor_u64, is_squarefree};
use crate::budget::Budget;
use crate::error::{Error, Result};

/// An element `x + y*w` of the order.
pub type Coords = (i128, i128);

/// Sorted set of factorization lengths.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LengthSet {
    pub lengths: BTreeSet<u32>,
}

impl LengthSet {
    pub fn min(&self) -> u32 {
        *self.lengths.first().expect("length sets are nonempty")
    }

    pub fn max(&self) -> u32 {
        *self.lengths.last().expect("length sets are nonempty")
    }

    pub fn contains(&self, k: u32) -> bool {
        self.lengths.contains(&k)
    }

    pub fn elasticity(&self) -> Ratio<u64> {
        Ratio::new(self.max() as u64, self.min() as u64)
    }
}

/// Factorization oracle for `Z + f*O_K` with `K` imaginary.
#[derive(Debug)]
pub struct FactorLab {
    trace: i128,
    norm: i128,
    units: Vec<Coords>,
    norm_cap: u64,
    memoize: bool,
    memo: RefCell<HashMap<Coords, BTreeSet<u32>>>,
}

impl FactorLab {
    pub fn new(d: i64, f: u64) -> Result<Self> {
        Self::with_budget(d, f, &Budget::from_env())
    }

    pub fn with_budget(d: i64, f: u64, budget: &Budget) -> Result<Self> {
        if d >= 0 {
            return Err(Error::Unsupported(
                "brute-force factorization needs an imaginary field".into(),
            ));
        }
        if !is_squarefree(d) || f == 0 {
            return Err(Error::InvalidInput(format!("bad order parameters d={d}, f={f}")));
        }
        let (s, dk) = if d.rem_euclid(4) == 1 { (1i128, d as i128) } else { (0, 4 * d as i128) };
        let f = f as i128;
        // omega = (s + sqrt dk)/2 has trace s and norm (s - dk)/4
        let trace = f * s;
        let norm = f * f * (s * s - dk) / 4;
        let mut lab = FactorLab {
            trace,
            norm,
            units: Vec::new(),
            norm_cap: budget.norm,
            memoize: true,
            memo: RefCell::new(HashMap::new()),
        };
        lab.units = lab.elements_of_norm(1);
        Ok(lab)
    }

    /// The same oracle with memoization switched off.
    pub fn without_memo(mut self) -> Self {
        self.memoize = false;
        self
    }

    pub fn units(&self) -> &[Coords] {
        &self.units
    }

    pub fn norm(&self, a: Coords) -> i128 {
        let (x, y) = a;
        x * x + self.trace * x * y + self.norm * y * y
    }

    pub fn mul(&self, a: Coords, b: Coords) -> Coords {
        let (x1, y1) = a;
        let (x2, y2) = b;
        (
            x1 * x2 - self.norm * y1 * y2,
            x1 * y2 + x2 * y1 + self.trace * y1 * y2,
        )
    }

    fn conj(&self, a: Coords) -> Coords {
        (a.0 + self.trace * a.1, -a.1)
    }

    /// `a / b` if it lies in the order.
    pub fn div(&self, a: Coords, b: Coords) -> Option<Coords> {
        let n = self.norm(b);
        if n == 0 {
            return None;
        }
        let (x, y) = self.mul(a, self.conj(b));
        (x % n == 0 && y % n == 0).then(|| (x / n, y / n))
    }

    pub fn is_unit(&self, a: Coords) -> bool {
        self.norm(a) == 1
    }

    /// The associate with the smallest `(|y|, |x|, y < 0, x < 0)`.
    pub fn canonical(&self, a: Coords) -> Coords {
        self.units
            .iter()
            .map(|&u| self.mul(a, u))
            .min_by_key(|&(x, y)| (y.abs(), x.abs(), y < 0, x < 0))
            .expect("units contain 1")
    }

    /// All elements of norm `m`.
    pub fn elements_of_norm(&self, m: i128) -> Vec<Coords> {
        // 4N = (2x + t y)^2 + (4n - t^2) y^2
        let delta = 4 * self.norm - self.trace * self.trace;
        let mut out = Vec::new();
        let mut y = 0i128;
        while delta * y * y <= 4 * m {
            for sy in if y == 0 { vec![0] } else { vec![y, -y] } {
                let rest = 4 * m - delta * sy * sy;
                if let Some(r) = exact_sqrt_i128(rest) {
                    for u in if r == 0 { vec![0] } else { vec![r, -r] } {
                        let twice_x = u - self.trace * sy;
                        if twice_x % 2 == 0 {
                            out.push((twice_x / 2, sy));
                        }
                    }
                }
            }
            y += 1;
        }
        out
    }

    fn check_budget(&self, a: Coords) -> Result<u64> {
        if a == (0, 0) {
            return Err(Error::InvalidInput("zero has no factorizations".into()));
        }
        let n = self.norm(a);
        match n.to_u64() {
            Some(v) if v <= self.norm_cap => Ok(v),
            _ => Err(Error::Resource(format!(
                "norm {n} exceeds the enumeration budget {}",
                self.norm_cap
            ))),
        }
    }

    /// Divisors of `a` in the order, one per associate class, sorted by norm.
    pub fn divisors_in_order(&self, a: Coords) -> Result<Vec<Coords>> {
        let n = self.check_budget(a)?;
        let mut out = BTreeSet::new();
        for m in divisors_of(n) {
            for b in self.elements_of_norm(m as i128) {
                if self.div(a, b).is_some() {
                    out.insert((m, self.canonical(b)));
                }
            }
        }
        Ok(out.into_iter().map(|(_, b)| b).collect())
    }

    pub fn is_irreducible(&self, a: Coords) -> Result<bool> {
        let n = self.check_budget(a)?;
        if n == 1 {
            return Ok(false);
        }
        Ok(self
            .divisors_in_order(a)?
            .into_iter()
            .all(|b| matches!(self.norm(b), 1) || self.norm(b) as u64 == n))
    }

    /// Irreducible divisors of `a`, one per associate class.
    fn irreducible_divisors(&self, a: Coords) -> Result<Vec<Coords>> {
        let divs = self.divisors_in_order(a)?;
        let mut out = Vec::new();
        for &b in &divs {
            let nb = self.norm(b);
            if nb == 1 {
                continue;
            }
            // b is irreducible iff no divisor of a strictly between 1 and N(b) divides b
            let reducible = divs.iter().any(|&c| {
                let nc = self.norm(c);
                nc > 1 && nc < nb && nb % nc == 0 && self.div(b, c).is_some()
            });
            if !reducible {
                out.push(b);
            }
        }
        Ok(out)
    }

    pub fn length_set(&self, a: Coords) -> Result<LengthSet> {
        let n = self.check_budget(a)?;
        if n == 1 {
            return Err(Error::InvalidInput("units have no factorizations".into()));
        }
        Ok(LengthSet {
            lengths: self.lengths(self.canonical(a))?,
        })
    }

    fn lengths(&self, a: Coords) -> Result<BTreeSet<u32>> {
        if self.memoize {
            if let Some(hit) = self.memo.borrow().get(&a) {
                return Ok(hit.clone());
            }
        }
        let mut out = BTreeSet::new();
        for b in self.irreducible_divisors(a)? {
            let rest = self.div(a, b).expect("listed divisor");
            if self.is_unit(rest) {
                out.insert(1);
            } else {
                for k in self.lengths(self.canonical(rest))? {
                    out.insert(k + 1);
                }
            }
        }
        if self.memoize {
            self.memo.borrow_mut().insert(a, out.clone());
        }
        Ok(out)
    }

    /// `max / min` of the length set.
    pub fn element_elasticity(&self, a: Coords) -> Result<Ratio<u64>> {
        Ok(self.length_set(a)?.elasticity())
    }

    /// Nonunit elements with norm at most `bound`, one per associate class.
    pub fn nonunits_up_to(&self, bound: u64) -> Vec<Coords> {
        let mut out = BTreeSet::new();
        for m in 2..=bound as i128 {
            for a in self.elements_of_norm(m) {
                out.insert((m, self.canonical(a)));
            }
        }
        out.into_iter().map(|(_, a)| a).collect()
    }
}

fn divisors_of(n: u64) -> Vec<u64> {
    let mut divs = vec![1u64];
    for (p, e) in factor_u64(n) {
        let current = divs.clone();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            divs.extend(current.iter().map(|d| d * pk));
        }
    }
    divs.sort_unstable();
    divs
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lab(d: i64, f: u64) -> FactorLab {
        FactorLab::with_budget(d, f, &Budget::default()).unwrap()
    }

    #[test]
    fn divisors() {
        let r = lab(-7, 5);
        assert_eq!(r.divisors_in_order((2, 0)).unwrap(), vec![(1, 0), (2, 0)]);
        assert_eq!(r.divisors_in_order((1, 0)).unwrap(), vec![(1, 0)]);
        let zi = lab(-1, 1);
        let d5 = zi.divisors_in_order((5, 0)).unwrap();
        assert_eq!(d5.len(), 4);
        assert!(d5.contains(&zi.canonical((1, 2))) && d5.contains(&zi.canonical((1, -2))));
        assert_ne!(zi.canonical((1, 2)), zi.canonical((1, -2)));
        assert!(r.divisors_in_order((0, 0)).is_err());
        assert!(FactorLab::with_budget(10, 17, &Budget::default()).is_err());
    }

    #[test]
    fn irreducibility() {
        let r = lab(-7, 5);
        assert!(r.is_irreducible((2, 0)).unwrap());
        // omega^5 = 6 - omega, so 5*omega^5 = 30 - w
        assert!(r.is_irreducible((30, -1)).unwrap());
        assert_eq!(r.norm((30, -1)), 800);
        assert!(!lab(-1, 1).is_irreducible((4, 0)).unwrap());
        assert!(!r.is_irreducible((1, 0)).unwrap());
    }

    #[test]
    fn example_lengths() {
        let r = lab(-7, 5);
        let ls = r.length_set((800, 0)).unwrap();
        assert!(ls.contains(2) && ls.contains(7));
        assert_eq!(ls.elasticity(), Ratio::new(7, 2));
        assert_eq!(r.length_set((2, 0)).unwrap().lengths, BTreeSet::from([1]));
        let z5i = lab(-1, 5);
        let ls = z5i.length_set((125, 0)).unwrap();
        assert!(ls.contains(2) && ls.contains(3));
        assert!(r.length_set((1, 0)).is_err());
    }

    #[test]
    fn gaussian_integers_are_half_factorial() {
        let zi = lab(-1, 1);
        for a in zi.nonunits_up_to(1000) {
            assert_eq!(zi.element_elasticity(a).unwrap(), Ratio::from_integer(1), "{a:?}");
        }
    }

    #[test]
    fn budget_is_enforced() {
        let tight = Budget {
            norm: 100,
            ..Budget::default()
        };
        let r = FactorLab::with_budget(-7, 5, &tight).unwrap();
        assert!(r.length_set((800, 0)).unwrap_err().is_resource());
    }

    #[test]
    fn memo_does_not_change_answers() {
        let a = lab(-7, 5);
        let b = lab(-7, 5).without_memo();
        for x in a.nonunits_up_to(400) {
            assert_eq!(a.length_set(x).unwrap(), b.length_set(x).unwrap());
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn sums_of_lengths_appear(x1 in -12i128..12, y1 in -2i128..3, x2 in -12i128..12, y2 in -2i128..3) {
            let r = lab(-7, 5);
            let (a, b) = ((x1, y1), (x2, y2));
            prop_assume!(r.norm(a) > 1 && r.norm(b) > 1);
            prop_assume!(r.norm(a) * r.norm(b) <= 1_000_000);
            let la = r.length_set(a).unwrap();
            let lb = r.length_set(b).unwrap();
            let lab_ = r.length_set(r.mul(a, b)).unwrap();
            for i in &la.lengths {
                for j in &lb.lengths {
                    prop_assert!(lab_.contains(i + j));
                }
            }
        }

        #[test]
        fn associates_share_lengths(x in -40i128..40, y in -3i128..4, k in 0usize..6) {
            let r = lab(-3, 1);
            prop_assume!(r.norm((x, y)) > 1);
            let u = r.units()[k % r.units().len()];
            prop_assert_eq!(r.length_set((x, y)).unwrap(), r.length_set(r.mul((x, y), u)).unwrap());
        }
    }
}
