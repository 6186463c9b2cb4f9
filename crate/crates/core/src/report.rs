//! One-shot analysis of an order, as printed by the command-line tool.

use std::fmt;

use crate::classgroup::{class_group_data, FormulaComponents, StructureCertainty};
use crate::elasticity::{
    case1_witness, elasticity_of_order, infinite_elasticity_witness, lower_bound_witness, CaseTag, Elasticity,
    Witness,
};
use crate::order::{OrderElement, QuadraticOrder};
use crate::{Budget, Error, Result};
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WitnessSummary {
    pub element: String,
    pub short: Vec<String>,
    pub long: Vec<String>,
    pub lengths: [usize; 2],
}

impl From<&Witness> for WitnessSummary {
    fn from(w: &Witness) -> Self {
        let show = |v: &[OrderElement]| v.iter().map(ToString::to_string).collect();
        let (s, l) = w.lengths();
        WitnessSummary {
            element: w.element.to_string(),
            short: show(&w.short),
            long: show(&w.long),
            lengths: [s, l],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub d: i64,
    pub f: u64,
    pub conductor_prime: bool,
    #[serde(rename = "clR_order")]
    pub cl_r_order: u64,
    #[serde(rename = "clR_factors")]
    pub cl_r_factors: Option<Vec<u64>>,
    pub structure_certainty: StructureCertainty,
    pub kernel_order: u64,
    pub davenport: Option<u64>,
    pub case: &'static str,
    pub elasticity: Option<String>,
    pub witness: Option<WitnessSummary>,
    pub formula: FormulaComponents,
}

fn case_label(c: CaseTag) -> &'static str {
    match c {
        CaseTag::Case1 => "1",
        CaseTag::Case2 => "2",
        _ => "na",
    }
}

/// A witness when one can be built and checked within the budget.
fn witness_for(
    order: &QuadraticOrder,
    data: &crate::classgroup::ClassGroupData,
    value: Elasticity,
    case: CaseTag,
    budget: &Budget,
) -> Result<Option<Witness>> {
    if !order.is_imaginary() {
        return Ok(None);
    }
    let attempt = match (value, case) {
        (Elasticity::Infinite, _) => infinite_elasticity_witness(order, 1, budget),
        (_, CaseTag::Case1) => case1_witness(order, data, budget),
        (_, CaseTag::Case2 | CaseTag::MaximalOrder) => lower_bound_witness(order, data, budget),
        _ => return Ok(None),
    };
    match attempt {
        Ok(w) => Ok(Some(w)),
        Err(e) if e.is_resource() || matches!(e, Error::Precondition(_) | Error::Unsupported(_)) => Ok(None),
        Err(e) => Err(e),
    }
}

pub fn analyze(d: i64, f: u64, budget: &Budget) -> Result<AnalysisReport> {
    let order = QuadraticOrder::new(d, f)?;
    let data = class_group_data(&order, budget)?;
    let rho = elasticity_of_order(&order, &data, budget)?;
    let witness = witness_for(&order, &data, rho.value, rho.case, budget)?;
    Ok(AnalysisReport {
        d,
        f,
        conductor_prime: order.conductor_is_prime(),
        cl_r_order: data.class_number,
        cl_r_factors: data.cl_r.as_ref().map(|g| g.invariant_factors().to_vec()),
        structure_certainty: data.certainty,
        kernel_order: data.kernel_order,
        davenport: rho.davenport,
        case: case_label(rho.case),
        elasticity: match rho.value {
            Elasticity::Undetermined => None,
            v => Some(v.to_string()),
        },
        witness: witness.as_ref().map(WitnessSummary::from),
        formula: data.components,
    })
}

impl AnalysisReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }
}

fn or_unknown<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| "unknown".to_string(), ToString::to_string)
}

impl fmt::Display for AnalysisReport {
    fn fmt(&self, out: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.formula;
        let structure = match &self.cl_r_factors {
            Some(fs) if fs.is_empty() => "trivial".to_string(),
            Some(fs) => fs.iter().map(|n| format!("Z{n}")).collect::<Vec<_>>().join(" x "),
            None => "unknown".to_string(),
        };
        let certainty = match self.structure_certainty {
            StructureCertainty::Proven => "proven",
            StructureCertainty::OrderOnly => "order only",
        };
        writeln!(out, "order          Z + {}*O_K in Q(sqrt({}))", self.f, self.d)?;
        writeln!(out, "conductor      {}", if self.conductor_prime { "prime" } else { "not prime" })?;
        writeln!(
            out,
            "formula        h(O_K)={} |(O_K/f)*|={} |(R/f)*|={} unit index {}",
            c.h_bar, c.u_bar, c.u_r, c.unit_index
        )?;
        writeln!(out, "|Cl(R)|        {}", self.cl_r_order)?;
        writeln!(out, "structure      {structure} ({certainty})")?;
        writeln!(out, "kernel order   {}", self.kernel_order)?;
        writeln!(out, "davenport      {}", or_unknown(&self.davenport))?;
        writeln!(out, "case           {}", self.case)?;
        writeln!(out, "elasticity     {}", or_unknown(&self.elasticity))?;
        match &self.witness {
            Some(w) => write!(
                out,
                "witness        {} = ({}) = ({}), lengths {} and {}",
                w.element,
                w.short.join(")("),
                w.long.join(")("),
                w.lengths[0],
                w.lengths[1]
            ),
            None => write!(out, "witness        none"),
        }
    }
}
