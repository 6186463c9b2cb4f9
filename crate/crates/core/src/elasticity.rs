//! Elasticity of quadratic orders with prime conductor, and explicit elements that
//! realize it.
//!
//! For a prime conductor the elasticity is `(D + 1)/2` or `D/2`, where `D` is the
//! Davenport constant of `Cl(R)`, depending on whether some class in the kernel of
//! `Cl(R) -> Cl(O_K)` lies on an extremal zero-sum sequence. The conductor of a
//! quadratic order is generated by the rational integer `f`, so it is always
//! principal in `O_K`; the non-principal branch is reachable only through
//! [`elasticity_from_abstract_data`].

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::Ratio;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};

use crate::abelian::{
    case1_condition, case1_element, davenport_with, extremal_sequence_containing, FiniteAbelianGroup,
    GroupElement, Subgroup,
};
use crate::arith::{factor_u64, primes_up_to};
use crate::budget::Budget;
use crate::classgroup::{ideal_to_form, ClassGroupData, FormClassGroup};
use crate::error::{Error, Result};
use crate::factorlab::{Coords, FactorLab};
use crate::order::{OrderElement, OrderIdeal, QuadraticOrder};
use crate::quadfield::{AlgebraicInteger, SplittingType};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Elasticity {
    Finite(Ratio<u64>),
    Infinite,
    Undetermined,
}

impl fmt::Display for Elasticity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Elasticity::Finite(r) if r.is_integer() => write!(f, "{}", r.numer()),
            Elasticity::Finite(r) => write!(f, "{}/{}", r.numer(), r.denom()),
            Elasticity::Infinite => f.write_str("inf"),
            Elasticity::Undetermined => f.write_str("unknown"),
        }
    }
}

impl Serialize for Elasticity {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CaseTag {
    Case1,
    Case2,
    ConductorNotPrime,
    TrivialClassGroup,
    /// `f = 1` with a nontrivial class group, where the elasticity is `D/2`.
    MaximalOrder,
    Undetermined,
}

/// Two factorizations of one element into irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub element: OrderElement,
    pub short: Vec<OrderElement>,
    pub long: Vec<OrderElement>,
}

impl Witness {
    pub fn lengths(&self) -> (usize, usize) {
        (self.short.len(), self.long.len())
    }

    /// `long / short`, the elasticity this witness certifies.
    pub fn ratio(&self) -> Ratio<u64> {
        Ratio::new(self.long.len() as u64, self.short.len() as u64)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ElasticityResult {
    pub value: Elasticity,
    pub case: CaseTag,
    pub davenport: Option<u64>,
    pub witness: Option<Witness>,
}

impl ElasticityResult {
    fn finite(case: CaseTag, value: Ratio<u64>, davenport: Option<u64>) -> Self {
        ElasticityResult {
            value: Elasticity::Finite(value),
            case,
            davenport,
            witness: None,
        }
    }
}

fn by_case(case1: bool, d: u64) -> ElasticityResult {
    if case1 {
        ElasticityResult::finite(CaseTag::Case1, Ratio::new(d + 1, 2), Some(d))
    } else {
        ElasticityResult::finite(CaseTag::Case2, Ratio::new(d, 2), Some(d))
    }
}

/// A rational prime dividing `f` that splits in `K`, if any.
pub fn split_conductor_prime(order: &QuadraticOrder) -> Result<Option<u64>> {
    for (p, _) in factor_u64(order.conductor_index()) {
        if order.field().splitting_type(p)? == SplittingType::Split {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

/// `rho(R)` from class group data.
pub fn elasticity_of_order(order: &QuadraticOrder, data: &ClassGroupData, budget: &Budget) -> Result<ElasticityResult> {
    let davenport = match &data.cl_r {
        Some(g) => Some(davenport_with(g, budget)?),
        None => None,
    };
    if order.is_maximal() {
        let d = davenport.expect("maximal orders have a known class group");
        return Ok(if d == 1 {
            ElasticityResult::finite(CaseTag::TrivialClassGroup, Ratio::from_integer(1), Some(1))
        } else {
            ElasticityResult::finite(CaseTag::MaximalOrder, Ratio::new(d, 2), Some(d))
        });
    }
    if !order.conductor_is_prime() {
        let value = if split_conductor_prime(order)?.is_some() {
            Elasticity::Infinite
        } else {
            Elasticity::Undetermined
        };
        return Ok(ElasticityResult {
            value,
            case: CaseTag::ConductorNotPrime,
            davenport,
            witness: None,
        });
    }
    if data.class_number == 1 {
        return Ok(ElasticityResult::finite(
            CaseTag::TrivialClassGroup,
            Ratio::from_integer(1),
            Some(1),
        ));
    }
    let (Some(g), Some(d)) = (&data.cl_r, davenport) else {
        return Ok(ElasticityResult {
            value: Elasticity::Undetermined,
            case: CaseTag::Undetermined,
            davenport: None,
            witness: None,
        });
    };
    if data.cl_bar.is_trivial() {
        return Ok(by_case(true, d));
    }
    if data.kernel_order == 1 {
        return Ok(by_case(false, d));
    }
    if data.kernels.is_empty() {
        return Err(Error::Inconsistent(format!("no admissible kernel in {g}")));
    }
    Ok(match data.case1_verdict(budget)? {
        Some(case1) => by_case(case1, d),
        None => ElasticityResult {
            value: Elasticity::Undetermined,
            case: CaseTag::Undetermined,
            davenport: Some(d),
            witness: None,
        },
    })
}

/// The elasticity for an order described only by its class group, the kernel of
/// the map to the maximal order's class group, and whether the (prime) conductor
/// is principal there.
pub fn elasticity_from_abstract_data(
    group: &FiniteAbelianGroup,
    kernel: &Subgroup,
    conductor_principal: bool,
    cl_bar_trivial: bool,
    budget: &Budget,
) -> Result<ElasticityResult> {
    if kernel.parent() != group {
        return Err(Error::InvalidInput("kernel is not a subgroup of the class group".into()));
    }
    if group.is_trivial() {
        return Ok(ElasticityResult::finite(
            CaseTag::TrivialClassGroup,
            Ratio::from_integer(1),
            Some(1),
        ));
    }
    let d = davenport_with(group, budget)?;
    if !conductor_principal {
        return Ok(by_case(false, d));
    }
    if cl_bar_trivial {
        return Ok(by_case(true, d));
    }
    Ok(by_case(case1_condition(group, kernel, budget)?, d))
}

fn coords(e: &OrderElement) -> Result<Coords> {
    match (e.x.to_i128(), e.y.to_i128()) {
        (Some(x), Some(y)) => Ok((x, y)),
        _ => Err(Error::Resource("element exceeds 128-bit coordinates".into())),
    }
}

/// Checks that both factorizations multiply to the element and that every factor
/// is irreducible according to the brute-force oracle.
pub fn verify_witness(order: &QuadraticOrder, lab: &FactorLab, w: &Witness) -> Result<()> {
    for side in [&w.short, &w.long] {
        let prod = side.iter().fold(OrderElement::one(), |acc, p| order.multiply(&acc, p));
        if prod != w.element {
            return Err(Error::Internal(format!("factors do not multiply to {}", w.element)));
        }
        for p in side {
            if !lab.is_irreducible(coords(p)?)? {
                return Err(Error::Internal(format!("{p} is not irreducible")));
            }
        }
    }
    Ok(())
}

fn ensure_imaginary(order: &QuadraticOrder) -> Result<()> {
    if order.is_imaginary() {
        Ok(())
    } else {
        Err(Error::Unsupported("witnesses are verified only in imaginary orders".into()))
    }
}

/// Prime ideals of `R` coprime to the conductor, one for each requested class.
fn prime_supply(
    order: &QuadraticOrder,
    forms: &FormClassGroup,
    needed: &[GroupElement],
    budget: &Budget,
) -> Result<HashMap<GroupElement, OrderIdeal>> {
    let mut found: HashMap<GroupElement, OrderIdeal> = HashMap::new();
    let missing = |found: &HashMap<GroupElement, OrderIdeal>| needed.iter().any(|g| !found.contains_key(g));
    for p in primes_up_to(budget.prime_bound) {
        if !missing(&found) {
            break;
        }
        if order.conductor_index().is_multiple_of(p) {
            continue;
        }
        for q in order.primes_above(p)? {
            let j = order.contract(&q)?;
            let class = forms.element_of(&ideal_to_form(order, &j)?)?.clone();
            found.entry(class).or_insert(j);
        }
    }
    if missing(&found) {
        return Err(Error::Resource(format!(
            "no prime ideal found in every class using rational primes up to {}",
            budget.prime_bound
        )));
    }
    Ok(found)
}

fn product(order: &QuadraticOrder, ideals: &[&OrderIdeal]) -> Result<OrderIdeal> {
    ideals
        .iter()
        .try_fold(order.unit_ideal(), |acc, j| order.ideal_product(&acc, j))
}

fn generator(order: &QuadraticOrder, j: &OrderIdeal) -> Result<OrderElement> {
    order
        .find_generator(j)?
        .ok_or_else(|| Error::Internal(format!("{j} should be principal")))
}

fn check_norm(order: &QuadraticOrder, e: &OrderElement, budget: &Budget) -> Result<()> {
    let n = order.norm(e).abs();
    if n > BigInt::from(budget.norm) {
        return Err(Error::Resource(format!(
            "witness element has norm {n}, above the verification budget {}",
            budget.norm
        )));
    }
    Ok(())
}

/// An element with factorizations of lengths 2 and `D(Cl(R))`, built from an
/// extremal zero-sum sequence and prime ideals in each of its classes.
pub fn lower_bound_witness(order: &QuadraticOrder, data: &ClassGroupData, budget: &Budget) -> Result<Witness> {
    ensure_imaginary(order)?;
    if data.class_number <= 1 {
        return Err(Error::Precondition("the class group is trivial".into()));
    }
    let forms = FormClassGroup::new(order.discriminant() as i64)?;
    let g = forms.group().clone();
    let mut sequence = None;
    for x in g.elements() {
        if x == g.identity() {
            continue;
        }
        if let Some(seq) = extremal_sequence_containing(&g, &x, budget)? {
            sequence = Some(seq);
            break;
        }
    }
    let seq = sequence.ok_or_else(|| Error::Internal("no extremal sequence exists".into()))?;
    let mut needed: Vec<GroupElement> = seq.terms().to_vec();
    needed.extend(seq.terms().iter().map(|t| g.neg(t)));
    let supply = prime_supply(order, &forms, &needed, budget)?;
    let ps: Vec<&OrderIdeal> = seq.terms().iter().map(|t| &supply[t]).collect();
    let negs: Vec<GroupElement> = seq.terms().iter().map(|t| g.neg(t)).collect();
    let qs: Vec<&OrderIdeal> = negs.iter().map(|t| &supply[t]).collect();
    let norm_bound: BigInt = ps.iter().chain(&qs).map(|j| j.norm()).product();
    if norm_bound > BigInt::from(budget.norm) {
        return Err(Error::Resource(format!(
            "witness element has norm {norm_bound}, above the verification budget {}",
            budget.norm
        )));
    }
    let alpha = generator(order, &product(order, &ps)?)?;
    let beta = generator(order, &product(order, &qs)?)?;
    let mut pis = Vec::with_capacity(ps.len());
    for (p, q) in ps.iter().zip(&qs) {
        pis.push(generator(order, &order.ideal_product(p, q)?)?);
    }
    let element = order.multiply(&alpha, &beta);
    let rest = pis.iter().skip(1).fold(OrderElement::one(), |acc, p| order.multiply(&acc, p));
    // absorb the unit relating the two sides into the first factor
    pis[0] = order
        .divide(&element, &rest)
        .ok_or_else(|| Error::Internal("factor products differ by a non-unit".into()))?;
    let w = Witness {
        element,
        short: vec![alpha, beta],
        long: pis,
    };
    let lab = FactorLab::with_budget(order.field().d(), order.conductor_index(), budget)?;
    verify_witness(order, &lab, &w)?;
    Ok(w)
}

/// An element of elasticity `(D + 1)/2` when the kernel meets an extremal sequence:
/// `(p*alpha)(p*beta) = p^2 * pi_1 ... pi_{D-1}` with `p` the conductor prime.
/// When `p` splits this falls back to the `n = 1` member of the unbounded family.
pub fn case1_witness(order: &QuadraticOrder, data: &ClassGroupData, budget: &Budget) -> Result<Witness> {
    ensure_imaginary(order)?;
    let rho = elasticity_of_order(order, data, budget)?;
    if rho.value == Elasticity::Infinite && crate::arith::is_prime(order.conductor_index()) {
        return infinite_elasticity_witness(order, 1, budget);
    }
    if rho.case != CaseTag::Case1 {
        return Err(Error::Precondition(format!("{order} is not in the extremal-kernel case")));
    }
    let forms = FormClassGroup::new(order.discriminant() as i64)?;
    let g = forms.group().clone();
    let kernel = data
        .kernel()
        .ok_or_else(|| Error::Internal("imaginary orders have an explicit kernel".into()))?;
    let (k, seq) = case1_element(&g, kernel, budget)?
        .ok_or_else(|| Error::Internal("case 1 without a kernel element on an extremal sequence".into()))?;
    // the sequence minus one copy of k
    let mut others: Vec<GroupElement> = seq.terms().to_vec();
    let at = others.iter().position(|t| *t == k).expect("sequence passes through k");
    others.remove(at);
    let mut needed = others.clone();
    needed.extend(others.iter().map(|t| g.neg(t)));
    let supply = prime_supply(order, &forms, &needed, budget)?;
    let negs: Vec<GroupElement> = others.iter().map(|t| g.neg(t)).collect();
    let ps: Vec<&OrderIdeal> = others.iter().map(|t| &supply[t]).collect();
    let qs: Vec<&OrderIdeal> = negs.iter().map(|t| &supply[t]).collect();
    let p = order.conductor_index();
    let norm_bound: BigInt = ps.iter().chain(&qs).map(|j| j.norm()).product::<BigInt>() * BigInt::from(p).pow(4);
    if norm_bound > BigInt::from(budget.norm) {
        return Err(Error::Resource(format!(
            "witness element has norm {norm_bound}, above the verification budget {}",
            budget.norm
        )));
    }

    let big = order.maximal();
    let lift = |j: &OrderIdeal| order.extend(j);
    let up = |list: &[&OrderIdeal]| -> Result<OrderIdeal> {
        list.iter().try_fold(big.unit_ideal(), |acc, j| big.ideal_product(&acc, &lift(j)?))
    };
    let alpha = big
        .find_generator(&up(&ps)?)?
        .ok_or_else(|| Error::Internal("extension of the sequence product is not principal".into()))?;
    let beta = big
        .find_generator(&up(&qs)?)?
        .ok_or_else(|| Error::Internal("extension of the inverse product is not principal".into()))?;
    let mut pis = Vec::with_capacity(ps.len());
    for (p, q) in ps.iter().zip(&qs) {
        pis.push(generator(order, &order.ideal_product(p, q)?)?);
    }
    let f_elem = AlgebraicInteger::new(p, 0);
    let field = order.field();
    let to_field = |e: &OrderElement| AlgebraicInteger::new(e.x.clone(), e.y.clone());
    let alpha = field.multiply(&f_elem, &to_field(&alpha));
    let beta = field.multiply(&f_elem, &to_field(&beta));
    let into_r = |a: &AlgebraicInteger| {
        order
            .from_field(a)
            .ok_or_else(|| Error::Internal("multiple of the conductor outside the order".into()))
    };
    let (pa, pb) = (into_r(&alpha)?, into_r(&beta)?);
    let element = order.multiply(&pa, &pb);
    check_norm(order, &element, budget)?;
    let mut long = vec![OrderElement::new(p, 0), OrderElement::new(p, 0)];
    long.extend(pis);
    let rest = long.iter().skip(1).fold(OrderElement::one(), |acc, x| order.multiply(&acc, x));
    long[0] = order
        .divide(&element, &rest)
        .ok_or_else(|| Error::Internal("factor products differ by a non-unit".into()))?;
    let w = Witness {
        element,
        short: vec![pa, pb],
        long,
    };
    let lab = FactorLab::with_budget(order.field().d(), order.conductor_index(), budget)?;
    verify_witness(order, &lab, &w)?;
    Ok(w)
}

/// `p^(n+2) = (p*gamma^n)(p*conj(gamma)^n)` for a conductor `f = p` whose prime
/// factors in `O_K` are principal, giving lengths 2 and `n + 2`.
pub fn infinite_elasticity_witness(order: &QuadraticOrder, n: u32, budget: &Budget) -> Result<Witness> {
    ensure_imaginary(order)?;
    if n == 0 {
        return Err(Error::InvalidInput("n must be at least 1".into()));
    }
    let p = order.conductor_index();
    if !crate::arith::is_prime(p) || order.field().splitting_type(p)? == SplittingType::Inert {
        return Err(Error::Precondition(format!(
            "conductor index {p} is not a split or ramified prime"
        )));
    }
    let big = order.maximal();
    let q = order.primes_above(p)?.remove(0);
    let gamma = big
        .find_generator(&q)?
        .ok_or_else(|| Error::Unsupported(format!("the primes above {p} are not principal")))?;
    let field = order.field();
    let gamma = AlgebraicInteger::new(gamma.x, gamma.y);
    let gbar = field.conjugate(&gamma);
    let pe = AlgebraicInteger::new(p, 0);
    let left = field.multiply(&pe, &field.pow(&gamma, n as u64));
    let right = field.multiply(&pe, &field.pow(&gbar, n as u64));
    let into_r = |a: &AlgebraicInteger| {
        order
            .from_field(a)
            .ok_or_else(|| Error::Internal("multiple of the conductor outside the order".into()))
    };
    let (left, right) = (into_r(&left)?, into_r(&right)?);
    let element = order.multiply(&left, &right);
    check_norm(order, &element, budget)?;
    let mut long = vec![OrderElement::new(p, 0); n as usize + 2];
    let rest = long.iter().skip(1).fold(OrderElement::one(), |acc, x| order.multiply(&acc, x));
    long[0] = order
        .divide(&element, &rest)
        .ok_or_else(|| Error::Internal("conductor powers do not match".into()))?;
    let w = Witness {
        element,
        short: vec![left, right],
        long,
    };
    let lab = FactorLab::with_budget(order.field().d(), order.conductor_index(), budget)?;
    verify_witness(order, &lab, &w)?;
    Ok(w)
}

/// Outcome of checking the prime-count bound for irreducibles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrimeCountReport {
    pub norm_bound: u64,
    pub davenport: u64,
    pub irreducibles: usize,
    pub max_count: u32,
    pub attained_by: Option<OrderElement>,
    /// Irreducibles whose extension has more than `davenport` prime factors.
    pub violations: Vec<(OrderElement, u32)>,
}

/// Enumerates irreducibles of norm up to `norm_bound` and checks that each
/// generates an `O_K`-ideal with at most `D(Cl(R))` prime factors.
pub fn irreducible_prime_bound_check(
    order: &QuadraticOrder,
    data: &ClassGroupData,
    norm_bound: u64,
    budget: &Budget,
) -> Result<PrimeCountReport> {
    ensure_imaginary(order)?;
    if !order.conductor_is_prime() && !order.is_maximal() {
        return Err(Error::Precondition(format!("conductor of {order} is not prime")));
    }
    if norm_bound > budget.norm {
        return Err(Error::Resource(format!(
            "norm bound {norm_bound} exceeds the enumeration budget {}",
            budget.norm
        )));
    }
    let g = data
        .cl_r
        .as_ref()
        .ok_or_else(|| Error::Undetermined("class group structure unknown".into()))?;
    let davenport = davenport_with(g, budget)?;
    let lab = FactorLab::with_budget(order.field().d(), order.conductor_index(), budget)?;
    let mut report = PrimeCountReport {
        norm_bound,
        davenport,
        irreducibles: 0,
        max_count: 0,
        attained_by: None,
        violations: Vec::new(),
    };
    for (x, y) in lab.nonunits_up_to(norm_bound) {
        if !lab.is_irreducible((x, y))? {
            continue;
        }
        report.irreducibles += 1;
        let el = OrderElement::new(x, y);
        let count = order.factor_principal_in_maximal(&order.to_field(&el))?.prime_count();
        if count > report.max_count {
            report.max_count = count;
            report.attained_by = Some(el.clone());
        }
        if count as u64 > davenport {
            report.violations.push((el, count));
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StrippedFactor {
    pub quotient: OrderElement,
    pub is_unit: bool,
}

/// `alpha / pi` for `pi` prime in `O_K` and coprime to the conductor; the quotient
/// always lies in `R`.
pub fn strip_prime_factor(order: &QuadraticOrder, alpha: &OrderElement, pi: &OrderElement) -> Result<StrippedFactor> {
    if pi.is_zero() || alpha.is_zero() {
        return Err(Error::Precondition("elements must be nonzero".into()));
    }
    let field = order.field();
    let (a, p) = (order.to_field(alpha), order.to_field(pi));
    let fac = order.factor_principal_in_maximal(&p)?;
    if fac.prime_count() != 1 {
        return Err(Error::Precondition(format!("{pi} is not prime in O_K")));
    }
    let n = field.norm(&p).abs();
    if !num_integer::Integer::gcd(&n, &BigInt::from(order.conductor_index())).is_one() {
        return Err(Error::Precondition(format!("{pi} is not coprime to the conductor")));
    }
    let q = field
        .divide(&a, &p)
        .ok_or_else(|| Error::Precondition(format!("{pi} does not divide {alpha} in O_K")))?;
    let quotient = order
        .from_field(&q)
        .ok_or_else(|| Error::Internal(format!("{alpha} / {pi} left the order")))?;
    let is_unit = order.norm(&quotient).abs().is_one();
    Ok(StrippedFactor { quotient, is_unit })
}
