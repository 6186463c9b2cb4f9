//! Finite abelian groups in invariant-factor form, Davenport constants and
//! zero-sum sequence searches.
//!
//! Elements are coordinate vectors against the invariant factors. Every element also
//! has a dense index (mixed radix, first coordinate most significant), which the
//! searches use for bitset bookkeeping.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::arith::factor_u64;
use crate::budget::Budget;
use crate::error::{Error, Result};

/// Largest group handled by the bitset-based exhaustive searches.
pub const EXHAUSTIVE_LIMIT: u64 = 128;

/// A finite abelian group `Z_{n_1} + ... + Z_{n_k}` with `n_1 | n_2 | ... | n_k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiniteAbelianGroup {
    factors: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupElement {
    pub coords: Vec<u64>,
}

impl GroupElement {
    pub fn new(coords: Vec<u64>) -> Self {
        GroupElement { coords }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coords.len() == 1 {
            return write!(f, "{}", self.coords[0]);
        }
        let parts: Vec<String> = self.coords.iter().map(u64::to_string).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Display for FiniteAbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self.factors.iter().map(|n| format!("Z{n}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

/// Splits the factor list into prime-power exponents per prime.
fn primary_parts(factors: &[u64]) -> BTreeMap<u64, Vec<u32>> {
    let mut parts: BTreeMap<u64, Vec<u32>> = BTreeMap::new();
    for &n in factors {
        for (p, e) in factor_u64(n) {
            parts.entry(p).or_default().push(e);
        }
    }
    parts
}

fn assemble(parts: &BTreeMap<u64, Vec<u32>>) -> Vec<u64> {
    let rank = parts.values().map(Vec::len).max().unwrap_or(0);
    let mut factors = vec![1u64; rank];
    for (&p, exps) in parts {
        let mut exps = exps.clone();
        exps.sort_unstable_by(|a, b| b.cmp(a));
        for (i, e) in exps.into_iter().enumerate() {
            factors[rank - 1 - i] *= p.pow(e);
        }
    }
    factors
}

fn partitions(n: u32, max: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

impl FiniteAbelianGroup {
    /// Canonical invariant-factor form of `Z_{f_1} + ... + Z_{f_k}`.
    ///
    /// Any presentation by cyclic factors is accepted; coprime parts are merged and
    /// the divisibility chain is rebuilt, so isomorphic inputs give equal outputs.
    pub fn from_factors(factors: &[u64]) -> Result<Self> {
        if let Some(bad) = factors.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidInput(format!(
                "invalid presentation: cyclic factor {bad} is below 2"
            )));
        }
        Ok(FiniteAbelianGroup {
            factors: assemble(&primary_parts(factors)),
        })
    }

    pub fn trivial() -> Self {
        FiniteAbelianGroup { factors: vec![] }
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            FiniteAbelianGroup { factors: vec![n] }
        }
    }

    /// Every abelian group of order `n`, up to isomorphism, in a fixed order.
    pub fn all_of_order(n: u64) -> Vec<Self> {
        let mut groups = vec![BTreeMap::new()];
        for (p, e) in factor_u64(n) {
            let mut next = Vec::new();
            for g in &groups {
                for part in partitions(e, e) {
                    let mut h: BTreeMap<u64, Vec<u32>> = g.clone();
                    h.insert(p, part);
                    next.push(h);
                }
            }
            groups = next;
        }
        let mut out: Vec<Self> = groups
            .iter()
            .map(|parts| FiniteAbelianGroup {
                factors: assemble(parts),
            })
            .collect();
        out.sort_by(|a, b| a.factors.len().cmp(&b.factors.len()).reverse().then(a.cmp(b)));
        out
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_cyclic(&self) -> bool {
        self.factors.len() <= 1
    }

    /// The prime `p` if the group is a nontrivial `p`-group.
    pub fn p_group_prime(&self) -> Option<u64> {
        let primes = factor_u64(self.order());
        match primes.as_slice() {
            [(p, _)] => Some(*p),
            _ => None,
        }
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(vec![0; self.factors.len()])
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        g.coords.len() == self.factors.len()
            && g.coords.iter().zip(&self.factors).all(|(c, n)| c < n)
    }

    fn check(&self, g: &GroupElement) -> Result<()> {
        if self.contains(g) {
            Ok(())
        } else {
            Err(Error::InvalidInput(format!("{g} is not an element of {self}")))
        }
    }

    pub fn add(&self, a: &GroupElement, b: &GroupElement) -> GroupElement {
        GroupElement::new(
            a.coords
                .iter()
                .zip(&b.coords)
                .zip(&self.factors)
                .map(|((x, y), n)| (x + y) % n)
                .collect(),
        )
    }

    pub fn neg(&self, a: &GroupElement) -> GroupElement {
        GroupElement::new(
            a.coords
                .iter()
                .zip(&self.factors)
                .map(|(x, n)| (n - x) % n)
                .collect(),
        )
    }

    pub fn scale(&self, k: u64, a: &GroupElement) -> GroupElement {
        GroupElement::new(
            a.coords
                .iter()
                .zip(&self.factors)
                .map(|(x, n)| ((*x as u128 * k as u128) % *n as u128) as u64)
                .collect(),
        )
    }

    pub fn element_order(&self, a: &GroupElement) -> u64 {
        a.coords
            .iter()
            .zip(&self.factors)
            .map(|(&x, &n)| n / num_integer::gcd(x, n))
            .fold(1, num_integer::lcm)
    }

    pub fn index_of(&self, a: &GroupElement) -> usize {
        a.coords
            .iter()
            .zip(&self.factors)
            .fold(0usize, |acc, (&x, &n)| acc * n as usize + x as usize)
    }

    pub fn element_at(&self, mut index: usize) -> GroupElement {
        let mut coords = vec![0; self.factors.len()];
        for (slot, &n) in coords.iter_mut().zip(&self.factors).rev() {
            *slot = (index % n as usize) as u64;
            index /= n as usize;
        }
        GroupElement::new(coords)
    }

    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    pub fn sum<'a>(&self, terms: impl IntoIterator<Item = &'a GroupElement>) -> GroupElement {
        terms
            .into_iter()
            .fold(self.identity(), |acc, t| self.add(&acc, t))
    }

    /// Addition table on dense indices.
    fn addition_table(&self) -> Vec<Vec<usize>> {
        let n = self.order() as usize;
        let elems: Vec<GroupElement> = self.elements().collect();
        (0..n)
            .map(|i| (0..n).map(|j| self.index_of(&self.add(&elems[i], &elems[j]))).collect())
            .collect()
    }

    /// Structure of a group given only the multiset of its element orders.
    pub fn from_element_orders(orders: &[u64]) -> Result<Self> {
        let n = orders.len() as u64;
        let mut parts = BTreeMap::new();
        for (p, e) in factor_u64(n) {
            // |G[p^k]| = p^(sum_i min(lambda_i, k))
            let mut sums = vec![0u32];
            for k in 1..=e {
                let pk = p.pow(k);
                let count = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                let mut log = 0u32;
                let mut c = count;
                while c.is_multiple_of(p) {
                    c /= p;
                    log += 1;
                }
                if c != 1 {
                    return Err(Error::Internal(format!(
                        "element orders are not those of an abelian group (|G[{pk}]| = {count})"
                    )));
                }
                sums.push(log);
            }
            let mut lambda = Vec::new();
            // sums[k] - sums[k-1] counts the parts of size at least k
            for k in 1..=e as usize {
                for i in 0..(sums[k] - sums[k - 1]) as usize {
                    if lambda.len() <= i {
                        lambda.push(0u32);
                    }
                    lambda[i] += 1;
                }
            }
            if lambda.iter().sum::<u32>() != e {
                return Err(Error::Internal("inconsistent p-part in element orders".into()));
            }
            parts.insert(p, lambda);
        }
        Ok(FiniteAbelianGroup {
            factors: assemble(&parts),
        })
    }

    /// The subgroup generated by `gens`.
    pub fn subgroup_generated(&self, gens: &[GroupElement]) -> Result<Subgroup> {
        for g in gens {
            self.check(g)?;
        }
        let mut seen: HashSet<GroupElement> = HashSet::new();
        seen.insert(self.identity());
        let mut frontier = vec![self.identity()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = self.add(&x, g);
                if seen.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        Ok(Subgroup::from_set(self.clone(), seen))
    }

    pub fn cyclic_subgroup(&self, g: &GroupElement) -> Result<Subgroup> {
        self.subgroup_generated(std::slice::from_ref(g))
    }

    /// All cyclic subgroups of order `k`, each listed once.
    pub fn cyclic_subgroups_of_order(&self, k: u64) -> Vec<Subgroup> {
        let mut found: Vec<Subgroup> = Vec::new();
        for g in self.elements() {
            if self.element_order(&g) != k {
                continue;
            }
            if found.iter().any(|s| s.contains(&g)) {
                continue;
            }
            found.push(self.cyclic_subgroup(&g).expect("element of the group"));
        }
        found
    }

    /// Structure of `self / sub`.
    pub fn quotient_structure(&self, sub: &Subgroup) -> Result<Self> {
        if sub.parent() != self {
            return Err(Error::InvalidInput("subgroup of a different group".into()));
        }
        let mut orders = Vec::new();
        let mut covered = vec![false; self.order() as usize];
        for g in self.elements() {
            let idx = self.index_of(&g);
            if covered[idx] {
                continue;
            }
            for h in sub.elements() {
                covered[self.index_of(&self.add(&g, h))] = true;
            }
            let mut m = 1u64;
            let mut acc = g.clone();
            while !sub.contains(&acc) {
                acc = self.add(&acc, &g);
                m += 1;
            }
            orders.push(m);
        }
        Self::from_element_orders(&orders)
    }
}

/// A subgroup stored as its explicit element set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgroup {
    parent: FiniteAbelianGroup,
    elements: Vec<GroupElement>,
    members: Vec<bool>,
}

impl Subgroup {
    fn from_set(parent: FiniteAbelianGroup, set: HashSet<GroupElement>) -> Self {
        let mut elements: Vec<GroupElement> = set.into_iter().collect();
        elements.sort_by_key(|g| parent.index_of(g));
        let mut members = vec![false; parent.order() as usize];
        for g in &elements {
            members[parent.index_of(g)] = true;
        }
        Subgroup {
            parent,
            elements,
            members,
        }
    }

    /// Builds a subgroup from an element set, checking closure.
    pub fn from_elements(parent: &FiniteAbelianGroup, elements: Vec<GroupElement>) -> Result<Self> {
        for g in &elements {
            parent.check(g)?;
        }
        let set: HashSet<GroupElement> = elements.into_iter().collect();
        if !set.contains(&parent.identity()) {
            return Err(Error::InvalidInput("subgroup must contain the identity".into()));
        }
        for a in &set {
            if !set.contains(&parent.neg(a)) {
                return Err(Error::InvalidInput(format!("subgroup not closed under negation at {a}")));
            }
            for b in &set {
                if !set.contains(&parent.add(a, b)) {
                    return Err(Error::InvalidInput(format!(
                        "subgroup not closed under addition at {a} + {b}"
                    )));
                }
            }
        }
        Ok(Self::from_set(parent.clone(), set))
    }

    pub fn trivial(parent: &FiniteAbelianGroup) -> Self {
        Self::from_set(parent.clone(), HashSet::from([parent.identity()]))
    }

    pub fn whole(parent: &FiniteAbelianGroup) -> Self {
        Self::from_set(parent.clone(), parent.elements().collect())
    }

    pub fn parent(&self) -> &FiniteAbelianGroup {
        &self.parent
    }

    pub fn elements(&self) -> &[GroupElement] {
        &self.elements
    }

    pub fn order(&self) -> u64 {
        self.elements.len() as u64
    }

    pub fn contains(&self, g: &GroupElement) -> bool {
        self.parent.contains(g) && self.members[self.parent.index_of(g)]
    }

    pub fn is_cyclic(&self) -> bool {
        let n = self.order();
        self.elements.iter().any(|g| self.parent.element_order(g) == n)
    }

    /// Structure of the subgroup as an abstract group.
    pub fn structure(&self) -> FiniteAbelianGroup {
        let orders: Vec<u64> = self.elements.iter().map(|g| self.parent.element_order(g)).collect();
        FiniteAbelianGroup::from_element_orders(&orders).expect("subgroup of an abelian group")
    }
}

/// A sequence over `G` whose terms sum to the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ZeroSumSequence {
    group: FiniteAbelianGroup,
    terms: Vec<GroupElement>,
}

impl ZeroSumSequence {
    pub fn new(group: &FiniteAbelianGroup, mut terms: Vec<GroupElement>) -> Result<Self> {
        for t in &terms {
            group.check(t)?;
        }
        if group.sum(&terms) != group.identity() {
            return Err(Error::InvalidInput("sequence does not sum to the identity".into()));
        }
        terms.sort_by_key(|g| group.index_of(g));
        Ok(ZeroSumSequence {
            group: group.clone(),
            terms,
        })
    }

    pub fn group(&self) -> &FiniteAbelianGroup {
        &self.group
    }

    pub fn terms(&self) -> &[GroupElement] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Whether some strict, nonempty sub-multiset of `seq` sums to zero.
pub fn has_proper_zero_subsequence(seq: &ZeroSumSequence) -> Result<bool> {
    has_proper_zero_subsequence_with_limit(seq, Budget::default().sequence_terms)
}

pub fn has_proper_zero_subsequence_with_limit(seq: &ZeroSumSequence, limit: usize) -> Result<bool> {
    if seq.len() > limit {
        return Err(Error::SearchLimit(format!(
            "sequence of {} terms exceeds the limit of {limit}",
            seq.len()
        )));
    }
    let Some((_, head)) = seq.terms.split_last() else {
        return Ok(false);
    };
    // The whole sequence sums to zero, so a proper zero-sum part exists exactly when
    // the sequence minus one term already has a nonempty zero-sum part.
    let g = &seq.group;
    let n = g.order() as usize;
    let mut reachable = vec![false; n];
    for t in head {
        let shift = g.index_of(t);
        let ti = t.clone();
        let mut next = reachable.clone();
        next[shift] = true;
        for (i, hit) in reachable.iter().enumerate() {
            if *hit {
                next[g.index_of(&g.add(&g.element_at(i), &ti))] = true;
            }
        }
        if next[0] {
            return Ok(true);
        }
        reachable = next;
    }
    Ok(false)
}

/// Closed forms: cyclic, rank two, and p-groups. `None` when none applies.
pub fn davenport_closed_form(g: &FiniteAbelianGroup) -> Option<u64> {
    let f = g.invariant_factors();
    if f.len() <= 2 || g.p_group_prime().is_some() {
        Some(1 + f.iter().map(|n| n - 1).sum::<u64>())
    } else {
        None
    }
}

/// The Davenport constant, by closed form where one is known and by exhaustive
/// search otherwise.
pub fn davenport(g: &FiniteAbelianGroup) -> Result<u64> {
    davenport_with(g, &Budget::default())
}

pub fn davenport_with(g: &FiniteAbelianGroup, budget: &Budget) -> Result<u64> {
    if let Some(d) = davenport_closed_form(g) {
        return Ok(d);
    }
    if g.order() > EXHAUSTIVE_LIMIT {
        return Err(Error::Unsupported(format!(
            "no closed form for {g} and its order exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}"
        )));
    }
    davenport_exhaustive(g, budget)
}

/// Dense bitset machinery for groups with at most 128 elements.
struct SmallGroup {
    n: usize,
    table: Vec<Vec<usize>>,
    neg: Vec<usize>,
}

impl SmallGroup {
    fn new(g: &FiniteAbelianGroup) -> Result<Self> {
        if g.order() > EXHAUSTIVE_LIMIT {
            return Err(Error::Unsupported(format!(
                "{g} exceeds the exhaustive limit {EXHAUSTIVE_LIMIT}"
            )));
        }
        let table = g.addition_table();
        let n = table.len();
        let neg = (0..n).map(|i| table[i].iter().position(|&k| k == 0).unwrap()).collect();
        Ok(SmallGroup { n, table, neg })
    }

    /// Subsums after appending `x` to a sequence with subsum set `sums`.
    fn extend(&self, sums: u128, x: usize) -> u128 {
        let mut out = sums | (1u128 << x);
        let mut rest = sums;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            out |= 1u128 << self.table[i][x];
        }
        out
    }
}

struct NodeCounter {
    used: u64,
    cap: u64,
}

impl NodeCounter {
    fn tick(&mut self) -> Result<()> {
        self.used += 1;
        if self.used > self.cap {
            Err(Error::SearchLimit(format!("node budget of {} exhausted", self.cap)))
        } else {
            Ok(())
        }
    }
}

/// Exhaustive Davenport constant: one more than the longest zero-sum free sequence.
///
/// The extensions of a zero-sum free sequence depend only on its set of subsums, so
/// the search runs over subsum sets with memoization.
pub fn davenport_exhaustive(g: &FiniteAbelianGroup, budget: &Budget) -> Result<u64> {
    let sg = SmallGroup::new(g)?;
    let mut memo: HashMap<u128, u32> = HashMap::new();
    let mut counter = NodeCounter {
        used: 0,
        cap: budget.nodes,
    };
    fn longest(
        sg: &SmallGroup,
        sums: u128,
        memo: &mut HashMap<u128, u32>,
        counter: &mut NodeCounter,
    ) -> Result<u32> {
        if let Some(&v) = memo.get(&sums) {
            return Ok(v);
        }
        counter.tick()?;
        let mut best = 0;
        let room = (sg.n - 1) as u32 - sums.count_ones();
        for x in 1..sg.n {
            if best >= room {
                break;
            }
            if sums >> sg.neg[x] & 1 == 1 {
                continue;
            }
            let next = sg.extend(sums, x);
            if next & 1 == 1 {
                continue;
            }
            best = best.max(1 + longest(sg, next, memo, counter)?);
        }
        memo.insert(sums, best);
        Ok(best)
    }
    Ok(1 + longest(&sg, 0, &mut memo, &mut counter)? as u64)
}

/// A zero-sum sequence of length `D(G)` through `g` with no proper zero-sum
/// subsequence, or `None` if there is none.
///
/// For cyclic groups such sequences are exactly `n` copies of a generator; this is
/// used directly (and checked against [`extremal_sequence_search`] in the tests).
pub fn extremal_sequence_containing(
    group: &FiniteAbelianGroup,
    g: &GroupElement,
    budget: &Budget,
) -> Result<Option<ZeroSumSequence>> {
    group.check(g)?;
    if group.is_trivial() {
        return Ok(Some(ZeroSumSequence::new(group, vec![g.clone()])?));
    }
    if group.is_cyclic() {
        let n = group.order();
        if group.element_order(g) != n {
            return Ok(None);
        }
        return Ok(Some(ZeroSumSequence::new(group, vec![g.clone(); n as usize])?));
    }
    extremal_sequence_search(group, g, budget)
}

/// Backtracking search for an extremal sequence through `g`, with no structural
/// shortcuts.
///
/// A zero-sum sequence `T g` of length `D(G)` is minimal exactly when `T` is zero-sum
/// free, so the search looks for a zero-sum free `T` of length `D(G) - 1` summing to
/// `-g`. Dead states `(subsums, sum, length)` are memoized.
pub fn extremal_sequence_search(
    group: &FiniteAbelianGroup,
    g: &GroupElement,
    budget: &Budget,
) -> Result<Option<ZeroSumSequence>> {
    group.check(g)?;
    let d = davenport_with(group, budget)? as usize;
    if group.is_trivial() {
        return Ok(Some(ZeroSumSequence::new(group, vec![g.clone()])?));
    }
    let sg = SmallGroup::new(group)?;
    let target = sg.neg[group.index_of(g)];
    if target == 0 {
        return Ok(None);
    }
    let want = d - 1;
    let mut counter = NodeCounter {
        used: 0,
        cap: budget.nodes,
    };
    let mut path = Vec::with_capacity(want);
    if !dfs_ordered(&sg, want, target, &mut path, &mut counter)? {
        return Ok(None);
    }
    let mut terms: Vec<GroupElement> = path.iter().map(|&i| group.element_at(i)).collect();
    terms.push(g.clone());
    Ok(Some(ZeroSumSequence::new(group, terms)?))
}

type DeadKey = (u128, usize, usize, usize);

/// Nondecreasing-index backtracking; dead states are keyed on
/// `(subsums, running sum, last index, length)`.
fn dfs_ordered(
    sg: &SmallGroup,
    want: usize,
    target: usize,
    path: &mut Vec<usize>,
    counter: &mut NodeCounter,
) -> Result<bool> {
    let mut dead: HashSet<DeadKey> = HashSet::new();
    #[allow(clippy::too_many_arguments)]
    fn go(
        sg: &SmallGroup,
        sums: u128,
        total: usize,
        want: usize,
        target: usize,
        path: &mut Vec<usize>,
        dead: &mut HashSet<DeadKey>,
        counter: &mut NodeCounter,
    ) -> Result<bool> {
        let len = path.len();
        if len == want {
            return Ok(total == target);
        }
        if len > 0 && sums >> target & 1 == 1 {
            return Ok(false);
        }
        if sums.count_ones() as usize + (want - len) > sg.n - 1 {
            return Ok(false);
        }
        let first = path.last().copied().unwrap_or(1);
        let key = (sums, total, first, len);
        if dead.contains(&key) {
            return Ok(false);
        }
        counter.tick()?;
        for x in first..sg.n {
            if sums >> sg.neg[x] & 1 == 1 {
                continue;
            }
            let next = sg.extend(sums, x);
            if next & 1 == 1 {
                continue;
            }
            path.push(x);
            if go(sg, next, sg.table[total][x], want, target, path, dead, counter)? {
                return Ok(true);
            }
            path.pop();
        }
        dead.insert(key);
        Ok(false)
    }
    go(sg, 0, 0, want, target, path, &mut dead, counter)
}

/// Whether some element of `kernel` lies in an extremal zero-sum sequence of `G`.
///
/// The trivial group counts as satisfying the condition.
pub fn case1_condition(group: &FiniteAbelianGroup, kernel: &Subgroup, budget: &Budget) -> Result<bool> {
    Ok(case1_element(group, kernel, budget)?.is_some())
}

/// Like [`case1_condition`], returning the first kernel element and sequence found.
pub fn case1_element(
    group: &FiniteAbelianGroup,
    kernel: &Subgroup,
    budget: &Budget,
) -> Result<Option<(GroupElement, ZeroSumSequence)>> {
    if kernel.parent() != group {
        return Err(Error::InvalidInput("kernel is not a subgroup of the given group".into()));
    }
    if group.is_trivial() {
        let e = group.identity();
        return Ok(Some((e.clone(), ZeroSumSequence::new(group, vec![e])?)));
    }
    for g in kernel.elements() {
        if *g == group.identity() {
            continue;
        }
        if let Some(seq) = extremal_sequence_containing(group, g, budget)? {
            return Ok(Some((g.clone(), seq)));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grp(f: &[u64]) -> FiniteAbelianGroup {
        FiniteAbelianGroup::from_factors(f).unwrap()
    }

    fn el(c: &[u64]) -> GroupElement {
        GroupElement::new(c.to_vec())
    }

    #[test]
    fn canonical_presentations() {
        assert_eq!(grp(&[2, 2]).invariant_factors(), &[2, 2]);
        assert_eq!(grp(&[2, 3]).invariant_factors(), &[6]);
        assert_eq!(grp(&[4, 12]).invariant_factors(), &[4, 12]);
        assert_eq!(grp(&[12, 4]).invariant_factors(), &[4, 12]);
        assert_eq!(grp(&[6, 10]).invariant_factors(), &[2, 30]);
        assert_eq!(grp(&[]), FiniteAbelianGroup::trivial());
        assert!(matches!(
            FiniteAbelianGroup::from_factors(&[1, 3]),
            Err(Error::InvalidInput(_))
        ));
        assert!(FiniteAbelianGroup::from_factors(&[0]).is_err());
    }

    #[test]
    fn groups_of_order() {
        let g48 = FiniteAbelianGroup::all_of_order(48);
        assert_eq!(g48.len(), 5);
        assert!(g48.contains(&grp(&[48])));
        assert!(g48.contains(&grp(&[2, 24])));
        assert!(g48.contains(&grp(&[4, 12])));
        assert_eq!(FiniteAbelianGroup::all_of_order(150).len(), 2);
        assert_eq!(FiniteAbelianGroup::all_of_order(1), vec![FiniteAbelianGroup::trivial()]);
    }

    #[test]
    fn proper_zero_subsequences() {
        let z6 = grp(&[6]);
        let ones = ZeroSumSequence::new(&z6, vec![el(&[1]); 6]).unwrap();
        assert!(!has_proper_zero_subsequence(&ones).unwrap());
        let mixed = ZeroSumSequence::new(&z6, vec![el(&[3]), el(&[3]), el(&[2]), el(&[2]), el(&[2])]).unwrap();
        assert!(has_proper_zero_subsequence(&mixed).unwrap());
        let v4 = grp(&[2, 2]);
        let klein = ZeroSumSequence::new(&v4, vec![el(&[1, 0]), el(&[0, 1]), el(&[1, 1])]).unwrap();
        assert!(!has_proper_zero_subsequence(&klein).unwrap());
        assert!(ZeroSumSequence::new(&z6, vec![el(&[1])]).is_err());
        let long = ZeroSumSequence::new(&z6, vec![el(&[0]); 70]).unwrap();
        assert!(matches!(has_proper_zero_subsequence(&long), Err(Error::SearchLimit(_))));
    }

    #[test]
    fn davenport_examples() {
        assert_eq!(davenport(&grp(&[6])).unwrap(), 6);
        assert_eq!(davenport(&grp(&[2, 2])).unwrap(), 3);
        assert_eq!(davenport(&grp(&[48])).unwrap(), 48);
        assert_eq!(davenport(&FiniteAbelianGroup::trivial()).unwrap(), 1);
        assert_eq!(davenport(&grp(&[2, 24])).unwrap(), 25);
        assert_eq!(davenport(&grp(&[4, 12])).unwrap(), 15);
        assert_eq!(davenport(&grp(&[2, 2, 6])).unwrap(), 8);
    }

    #[test]
    fn exhaustive_budget_is_an_error() {
        let tiny = Budget {
            nodes: 3,
            ..Budget::default()
        };
        assert!(matches!(davenport_exhaustive(&grp(&[2, 2, 6]), &tiny), Err(Error::SearchLimit(_))));
    }

    #[test]
    fn element_orders_recover_structure() {
        for g in [grp(&[2, 24]), grp(&[48]), grp(&[2, 2, 4]), grp(&[3, 9]), FiniteAbelianGroup::trivial()] {
            let orders: Vec<u64> = g.elements().map(|x| g.element_order(&x)).collect();
            assert_eq!(FiniteAbelianGroup::from_element_orders(&orders).unwrap(), g);
        }
    }

    #[test]
    fn quotients_and_subgroups() {
        let g = grp(&[4, 12]);
        let k = g.cyclic_subgroup(&el(&[0, 1])).unwrap();
        assert_eq!(k.order(), 12);
        assert_eq!(g.quotient_structure(&k).unwrap(), grp(&[4]));
        let z48 = grp(&[48]);
        let subs = z48.cyclic_subgroups_of_order(12);
        assert_eq!(subs.len(), 1);
        assert!(subs[0].is_cyclic());
        assert_eq!(z48.quotient_structure(&subs[0]).unwrap(), grp(&[4]));
        assert!(Subgroup::from_elements(&z48, vec![el(&[0]), el(&[1])]).is_err());
    }

    #[test]
    fn extremal_sequences() {
        let z6 = grp(&[6]);
        let b = Budget::default();
        let seq = extremal_sequence_containing(&z6, &el(&[1]), &b).unwrap().unwrap();
        assert_eq!(seq.terms(), vec![el(&[1]); 6].as_slice());
        assert!(extremal_sequence_containing(&z6, &el(&[2]), &b).unwrap().is_none());

        let z48 = grp(&[48]);
        assert!(extremal_sequence_containing(&z48, &el(&[4]), &b).unwrap().is_none());

        let v4 = grp(&[2, 2]);
        let seq = extremal_sequence_containing(&v4, &el(&[1, 0]), &b).unwrap().unwrap();
        let mut terms = seq.terms().to_vec();
        terms.sort();
        assert_eq!(terms, vec![el(&[0, 1]), el(&[1, 0]), el(&[1, 1])]);
    }

    #[test]
    fn case1_examples() {
        let b = Budget::default();
        let z6 = grp(&[6]);
        assert!(case1_condition(&z6, &Subgroup::whole(&z6), &b).unwrap());
        assert!(!case1_condition(&z6, &Subgroup::trivial(&z6), &b).unwrap());
        let z48 = grp(&[48]);
        let k12 = z48.cyclic_subgroups_of_order(12).remove(0);
        assert!(!case1_condition(&z48, &k12, &b).unwrap());
        let t = FiniteAbelianGroup::trivial();
        assert!(case1_condition(&t, &Subgroup::whole(&t), &b).unwrap());
    }
}
