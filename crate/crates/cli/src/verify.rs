//! Reproduction table: recomputes the worked examples and compares them with a
//! file of expected values.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use num_bigint::BigInt;
use quadorder::abelian::{case1_condition, davenport_closed_form, davenport_exhaustive, davenport_with, FiniteAbelianGroup};
use quadorder::classgroup::{
    class_group_data, class_number_formula, class_order, reduced_forms, prime_conductor_structure,
};
use quadorder::elasticity::{elasticity_from_abstract_data, elasticity_of_order, infinite_elasticity_witness};
use quadorder::factorlab::FactorLab;
use quadorder::order::{OrderElement, QuadraticOrder};
use quadorder::quadfield::{AlgebraicInteger, QuadraticField};
use quadorder::{Budget, Result};
use serde::Deserialize;
use thiserror::Error;

const EMBEDDED: &str = include_str!("../data/expected.json");

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("expected-values file is unreadable: {0}")]
    Corrupt(String),
    #[error("no row {0}")]
    UnknownRow(u32),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExpectedRow {
    pub id: u32,
    pub title: String,
    pub checks: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Expected {
    pub rows: Vec<ExpectedRow>,
}

impl Expected {
    pub fn embedded() -> Self {
        Self::parse(EMBEDDED).expect("embedded expected values parse")
    }

    pub fn parse(text: &str) -> std::result::Result<Self, VerifyError> {
        let e: Expected = serde_json::from_str(text).map_err(|err| VerifyError::Corrupt(err.to_string()))?;
        let mut ids: Vec<u32> = e.rows.iter().map(|r| r.id).collect();
        ids.sort_unstable();
        if ids != (1..=ROWS.len() as u32).collect::<Vec<_>>() {
            return Err(VerifyError::Corrupt(format!("row ids {ids:?} do not cover 1..={}", ROWS.len())));
        }
        Ok(e)
    }

    pub fn from_path(path: &Path) -> std::result::Result<Self, VerifyError> {
        let text = std::fs::read_to_string(path).map_err(|err| VerifyError::Corrupt(format!("{}: {err}", path.display())))?;
        Self::parse(&text)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckOutcome {
    pub name: String,
    pub expected: String,
    pub computed: String,
}

impl CheckOutcome {
    pub fn passed(&self) -> bool {
        self.expected == self.computed
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowOutcome {
    pub id: u32,
    pub title: String,
    pub checks: Vec<CheckOutcome>,
    pub error: Option<String>,
}

impl RowOutcome {
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.checks.iter().all(CheckOutcome::passed)
    }
}

impl fmt::Display for RowOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "[{status}] row {}: {}", self.id, self.title)?;
        if let Some(e) = &self.error {
            writeln!(f, "         error: {e}")?;
        }
        for c in &self.checks {
            let mark = if c.passed() { "ok" } else { "MISMATCH" };
            writeln!(f, "         {:<40} expected {:<12} computed {:<12} {mark}", c.name, c.expected, c.computed)?;
        }
        Ok(())
    }
}

type Computed = Vec<(&'static str, String)>;

type RowFn = fn(&Budget) -> Result<Computed>;

const ROWS: [RowFn; 7] = [row1, row2, row3, row4, row5, row6, row7];

fn order(d: i64, f: u64) -> Result<QuadraticOrder> {
    QuadraticOrder::new(d, f)
}

fn structure(g: &Option<FiniteAbelianGroup>) -> String {
    g.as_ref().map_or_else(|| "unknown".into(), ToString::to_string)
}

fn case_label(c: quadorder::elasticity::CaseTag) -> String {
    use quadorder::elasticity::CaseTag::*;
    match c {
        Case1 => "1",
        Case2 => "2",
        _ => "na",
    }
    .into()
}

fn row1(b: &Budget) -> Result<Computed> {
    let r = order(-7, 5)?;
    let data = class_group_data(&r, b)?;
    let rho = elasticity_of_order(&r, &data, b)?;
    let lab = FactorLab::with_budget(-7, 5, b)?;
    let ls = lab.length_set((800, 0))?;
    Ok(vec![
        ("formula_class_number", data.components.class_number()?.to_string()),
        ("reduced_forms_disc_-175", reduced_forms(-175)?.len().to_string()),
        ("structure", structure(&data.cl_r)),
        ("davenport", rho.davenport.map_or("unknown".into(), |d| d.to_string())),
        ("case", case_label(rho.case)),
        ("elasticity", rho.value.to_string()),
        ("length_set_800_has_2_and_7", (ls.contains(2) && ls.contains(7)).to_string()),
        ("element_elasticity_800", lab.element_elasticity((800, 0))?.to_string()),
    ])
}

fn row2(b: &Budget) -> Result<Computed> {
    let r = order(10, 17)?;
    let (u_bar, u_r) = r.quotient_unit_counts()?;
    let data = class_group_data(&r, b)?;
    let rho = elasticity_of_order(&r, &data, b)?;
    let probe = r.ideal_from_generators(&[OrderElement::new(2, 0), OrderElement::new(0, 1)])?;
    let square = r.ideal_pow(&probe, 2)?;
    let two = r.principal_ideal(&OrderElement::new(2, 0))?;
    let extended = r.extend(&probe)?;
    let gen = r.maximal().find_generator_with(&extended, b)?;
    Ok(vec![
        ("unit_index", r.unit_index()?.to_string()),
        ("quotient_unit_counts", format!("{u_bar},{u_r}")),
        ("class_number", data.class_number.to_string()),
        (
            "probe_class_order",
            class_order(&r, &probe, data.class_number, b)?.map_or("none".into(), |k| k.to_string()),
        ),
        ("probe_square_is_2R", (square == two).to_string()),
        ("generator_of_(2,sqrt10)", gen.as_ref().map_or("none".into(), ToString::to_string)),
        ("probe_in_kernel", gen.is_some().to_string()),
        ("structure", structure(&data.cl_r)),
        ("davenport", rho.davenport.map_or("unknown".into(), |d| d.to_string())),
        ("case", case_label(rho.case)),
        ("elasticity", rho.value.to_string()),
    ])
}

fn row3(b: &Budget) -> Result<Computed> {
    let r = order(-1, 5)?;
    let data = class_group_data(&r, b)?;
    let rho = elasticity_of_order(&r, &data, b)?;
    let wide = Budget {
        norm: b.norm.max(10_000_000),
        ..*b
    };
    let lab = FactorLab::with_budget(-1, 5, &wide)?;
    let mut out = vec![
        ("conductor_prime", r.conductor_is_prime().to_string()),
        ("elasticity", rho.value.to_string()),
    ];
    let names = ["witness_125_lengths_2_3", "witness_625_lengths_2_4", "witness_3125_lengths_2_5"];
    for (n, name) in (1u32..=3).zip(names) {
        let w = infinite_elasticity_witness(&r, n, &wide)?;
        let x = w.element.x.clone();
        let target = BigInt::from(5).pow(n + 2);
        let ls = lab.length_set((i128::try_from(&x).unwrap_or(0), 0))?;
        let ok = x == target && w.element.y == BigInt::from(0) && ls.contains(2) && ls.contains(n + 2);
        out.push((name, ok.to_string()));
    }
    Ok(out)
}

fn row4(b: &Budget) -> Result<Computed> {
    let r = order(641, 449)?;
    let (u_bar, u_r) = r.quotient_unit_counts()?;
    let data = class_group_data(&r, b)?;
    let rho = elasticity_of_order(&r, &data, b)?;
    Ok(vec![
        ("quotient_unit_counts", format!("{u_bar},{u_r}")),
        ("unit_index", r.unit_index()?.to_string()),
        ("class_number", data.class_number.to_string()),
        ("prime_conductor_structure", prime_conductor_structure(&r)?.to_string()),
        ("elasticity", rho.value.to_string()),
    ])
}

fn row5(b: &Budget) -> Result<Computed> {
    let r = order(-14, 11)?;
    let data = class_group_data(&r, b)?;
    let rho = elasticity_of_order(&r, &data, b)?;
    let kernel = data
        .kernel()
        .ok_or_else(|| quadorder::Error::Internal("imaginary kernel not pinned down".into()))?;
    let z48 = FiniteAbelianGroup::cyclic(48);
    let k12 = z48.cyclic_subgroups_of_order(12).remove(0);
    let field = QuadraticField::new(-14)?;
    Ok(vec![
        ("kernel_order", kernel.order().to_string()),
        ("kernel_cyclic", kernel.is_cyclic().to_string()),
        ("class_number", data.class_number.to_string()),
        ("reduced_forms_disc_-6776", reduced_forms(-6776)?.len().to_string()),
        ("structure", structure(&data.cl_r)),
        ("case1_condition_Z48_order_12", case1_condition(&z48, &k12, b)?.to_string()),
        ("elasticity", rho.value.to_string()),
        ("norm_325+42sqrt-14", field.norm(&AlgebraicInteger::new(325, 42)).to_string()),
    ])
}

fn row6(b: &Budget) -> Result<Computed> {
    let h = class_number_formula(3, 120, 10, 6)?;
    let z6 = FiniteAbelianGroup::cyclic(6);
    let kernel_order = class_number_formula(1, 120, 10, 6)?;
    let kernel = z6.cyclic_subgroups_of_order(kernel_order).remove(0);
    let rho = elasticity_from_abstract_data(&z6, &kernel, false, false, b)?;
    Ok(vec![
        ("class_number_formula(3,120,10,6)", h.to_string()),
        ("abstract_elasticity_Z6_non_principal", rho.value.to_string()),
    ])
}

/// `1 + sum(n_i - 1)`, the value every closed form reduces to.
fn structural_bound(g: &FiniteAbelianGroup) -> u64 {
    1 + g.invariant_factors().iter().map(|n| n - 1).sum::<u64>()
}

fn row7(b: &Budget) -> Result<Computed> {
    let mut agree = true;
    for n in 1..=36 {
        for g in FiniteAbelianGroup::all_of_order(n) {
            let reference = davenport_closed_form(&g).unwrap_or_else(|| structural_bound(&g));
            agree &= davenport_exhaustive(&g, b)? == reference;
        }
    }
    let d = |fs: &[u64]| -> Result<String> { Ok(davenport_with(&FiniteAbelianGroup::from_factors(fs)?, b)?.to_string()) };
    Ok(vec![
        ("exhaustive_agrees_order_le_36", agree.to_string()),
        ("D(Z6)", d(&[6])?),
        ("D(Z2 x Z2)", d(&[2, 2])?),
        ("D(trivial)", d(&[])?),
    ])
}

fn run_row(id: u32, expected: &ExpectedRow, budget: &Budget) -> std::result::Result<RowOutcome, VerifyError> {
    let computed = ROWS[id as usize - 1](budget);
    let mut outcome = RowOutcome {
        id,
        title: expected.title.clone(),
        checks: Vec::new(),
        error: None,
    };
    match computed {
        Ok(values) => {
            let names: Vec<&str> = values.iter().map(|(n, _)| *n).collect();
            if expected.checks.keys().map(String::as_str).collect::<std::collections::BTreeSet<_>>()
                != names.iter().copied().collect()
            {
                return Err(VerifyError::Corrupt(format!(
                    "row {id} lists checks {:?}, expected {names:?}",
                    expected.checks.keys().collect::<Vec<_>>()
                )));
            }
            outcome.checks = values
                .into_iter()
                .map(|(name, computed)| CheckOutcome {
                    name: name.to_string(),
                    expected: expected.checks[name].clone(),
                    computed,
                })
                .collect();
        }
        Err(e) => outcome.error = Some(e.to_string()),
    }
    Ok(outcome)
}

/// Runs every row, or only `only`, in id order.
pub fn verify(
    expected: &Expected,
    only: Option<u32>,
    budget: &Budget,
) -> std::result::Result<Vec<RowOutcome>, VerifyError> {
    if let Some(id) = only {
        if id == 0 || id as usize > ROWS.len() {
            return Err(VerifyError::UnknownRow(id));
        }
    }
    let mut rows: Vec<&ExpectedRow> = expected.rows.iter().filter(|r| only.is_none_or(|id| r.id == id)).collect();
    rows.sort_by_key(|r| r.id);
    rows.into_iter().map(|r| run_row(r.id, r, budget)).collect()
}
