//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fails.

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use num_rational::Ratio;
use quadorder::abelian::{
    case1_condition, davenport_closed_form, davenport_exhaustive, davenport_with, FiniteAbelianGroup,
};
use quadorder::arith::primes_up_to;
use quadorder::classgroup::{
    class_group_data, class_number_formula, class_order, formula_components, reduced_forms, prime_conductor_structure,
};
use quadorder::elasticity::{
    elasticity_from_abstract_data, elasticity_of_order, infinite_elasticity_witness, irreducible_prime_bound_check,
    CaseTag, Elasticity,
};
use quadorder::factorlab::FactorLab;
use quadorder::order::{OrderElement, QuadraticOrder};
use quadorder::quadfield::{AlgebraicInteger, QuadraticField, SplittingType};
use quadorder::Budget;

type Outcome = Result<(), String>;

type Criterion = (u32, &'static str, Duration, fn() -> Outcome);

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn e<E: std::fmt::Display>(err: E) -> String {
    err.to_string()
}

fn gcd(a: i64, b: i64) -> i64 {
    if b == 0 {
        a.abs()
    } else {
        gcd(b, a % b)
    }
}

/// Reduced primitive positive definite forms of discriminant `disc`, counted from
/// the definition: |b| <= a <= c, b >= 0 when |b| = a or a = c.
fn oracle_reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -disc {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if gcd(gcd(a, b), c) == 1 {
                out.push((a, b, c));
            }
        }
        a += 1;
    }
    out
}

fn rho(order: &QuadraticOrder, b: &Budget) -> Result<quadorder::elasticity::ElasticityResult, String> {
    let data = class_group_data(order, b).map_err(e)?;
    elasticity_of_order(order, &data, b).map_err(e)
}

fn c1() -> Outcome {
    let b = Budget::default();
    let r = QuadraticOrder::new(-7, 5).map_err(e)?;
    let formula = formula_components(&r, &b).map_err(e)?.class_number().map_err(e)?;
    ensure!(formula == 6, "formula gives {formula}");
    let forms = reduced_forms(-175).map_err(e)?.len();
    ensure!(forms == 6, "{forms} reduced forms");
    ensure!(oracle_reduced_forms(-175).len() == 6, "oracle form count differs");
    let data = class_group_data(&r, &b).map_err(e)?;
    ensure!(data.cl_r == Some(FiniteAbelianGroup::cyclic(6)), "structure {:?}", data.cl_r);
    let res = elasticity_of_order(&r, &data, &b).map_err(e)?;
    ensure!(res.davenport == Some(6), "D = {:?}", res.davenport);
    ensure!(res.case == CaseTag::Case1, "case {:?}", res.case);
    ensure!(res.value == Elasticity::Finite(Ratio::new(7, 2)), "rho = {}", res.value);
    let lab = FactorLab::with_budget(-7, 5, &b).map_err(e)?;
    let ls = lab.length_set((800, 0)).map_err(e)?;
    ensure!(ls.contains(2) && ls.contains(7), "length set of 800 is {:?}", ls.lengths);
    let el = lab.element_elasticity((800, 0)).map_err(e)?;
    ensure!(el == Ratio::new(7, 2), "element elasticity of 800 is {el}");
    Ok(())
}

fn c2() -> Outcome {
    let b = Budget::default();
    let r = QuadraticOrder::new(10, 17).map_err(e)?;
    ensure!(r.unit_index().map_err(e)? == 9, "unit index");
    ensure!(r.quotient_unit_counts().map_err(e)? == (288, 16), "quotient unit counts");
    let data = class_group_data(&r, &b).map_err(e)?;
    ensure!(data.class_number == 4, "|Cl(R)| = {}", data.class_number);
    let probe = r
        .ideal_from_generators(&[OrderElement::new(2, 0), OrderElement::new(0, 1)])
        .map_err(e)?;
    let sq = r.ideal_pow(&probe, 2).map_err(e)?;
    let two = r.principal_ideal(&OrderElement::new(2, 0)).map_err(e)?;
    ensure!(sq == two, "(2, 17 sqrt10)^2 = {sq}, not 2R");
    ensure!(class_order(&r, &probe, 4, &b).map_err(e)? == Some(2), "probe class order");
    let ext = r.extend(&probe).map_err(e)?;
    ensure!(r.maximal().find_generator(&ext).map_err(e)?.is_none(), "(2, sqrt10) has a generator");
    ensure!(data.cl_r == FiniteAbelianGroup::from_factors(&[2, 2]).ok(), "structure {:?}", data.cl_r);
    let res = elasticity_of_order(&r, &data, &b).map_err(e)?;
    ensure!(res.davenport == Some(3), "D = {:?}", res.davenport);
    ensure!(res.case == CaseTag::Case1, "case {:?}", res.case);
    ensure!(res.value == Elasticity::Finite(Ratio::from_integer(2)), "rho = {}", res.value);
    Ok(())
}

fn c3() -> Outcome {
    let b = Budget {
        norm: 10_000_000,
        ..Budget::default()
    };
    let r = QuadraticOrder::new(-1, 5).map_err(e)?;
    ensure!(!r.conductor_is_prime(), "conductor reported prime");
    ensure!(
        r.field().splitting_type(5).map_err(e)? == SplittingType::Split,
        "5 does not split in Q(i)"
    );
    let res = rho(&r, &b)?;
    ensure!(res.value == Elasticity::Infinite, "rho = {}", res.value);
    let lab = FactorLab::with_budget(-1, 5, &b).map_err(e)?;
    for n in 1..=3u32 {
        let w = infinite_elasticity_witness(&r, n, &b).map_err(e)?;
        let p = 5i128.pow(n + 2);
        ensure!(w.element == OrderElement::new(p, 0), "witness element {}", w.element);
        ensure!(w.lengths() == (2, n as usize + 2), "witness lengths {:?}", w.lengths());
        let ls = lab.length_set((p, 0)).map_err(e)?;
        ensure!(ls.contains(2) && ls.contains(n + 2), "length set of {p} is {:?}", ls.lengths);
    }
    Ok(())
}

fn c4() -> Outcome {
    let b = Budget::default();
    let r = QuadraticOrder::new(641, 449).map_err(e)?;
    ensure!(r.quotient_unit_counts().map_err(e)? == (201_600, 448), "quotient unit counts");
    ensure!(r.unit_index().map_err(e)? == 3, "unit index");
    let data = class_group_data(&r, &b).map_err(e)?;
    ensure!(data.class_number == 150, "|Cl(R)| = {}", data.class_number);
    let g = prime_conductor_structure(&r).map_err(e)?;
    ensure!(g == FiniteAbelianGroup::cyclic(150), "structure {g}");
    let res = elasticity_of_order(&r, &data, &b).map_err(e)?;
    ensure!(res.value == Elasticity::Finite(Ratio::new(151, 2)), "rho = {}", res.value);
    Ok(())
}

fn c5() -> Outcome {
    let b = Budget::default();
    let field = QuadraticField::new(-14).map_err(e)?;
    let n = field.norm(&AlgebraicInteger::new(325, 42));
    ensure!(n == 19i64.pow(4).into() && 325 * 325 + 14 * 42 * 42 == 19i64.pow(4), "N = {n}");
    let z48 = FiniteAbelianGroup::cyclic(48);
    let k12 = z48.cyclic_subgroups_of_order(12).remove(0);
    ensure!(!case1_condition(&z48, &k12, &b).map_err(e)?, "case1_condition(Z48, order 12) holds");

    let r = QuadraticOrder::new(-14, 11).map_err(e)?;
    let data = class_group_data(&r, &b).map_err(e)?;
    let kernel = data.kernel().ok_or("kernel not determined")?;
    ensure!(kernel.order() == 12 && kernel.is_cyclic(), "kernel {}", kernel.structure());
    ensure!(data.class_number == 48, "|Cl(R)| = {}", data.class_number);
    let forms = oracle_reduced_forms(-6776);
    ensure!(forms.len() == 48, "oracle finds {} forms", forms.len());
    ensure!(reduced_forms(-6776).map_err(e)?.len() == 48, "library form count");
    let ambiguous = forms.iter().filter(|&&(a, b, c)| b == 0 || a == b || a == c).count();
    let res = elasticity_of_order(&r, &data, &b).map_err(e)?;
    ensure!(
        data.cl_r == Some(z48.clone()),
        "Cl(R) is {} ({} ambiguous forms, so the 2-torsion has {} elements); rho = {}",
        data.cl_r.as_ref().map_or("unknown".into(), ToString::to_string),
        ambiguous,
        ambiguous,
        res.value
    );
    ensure!(res.value == Elasticity::Finite(Ratio::from_integer(24)), "rho = {}", res.value);
    Ok(())
}

fn c6() -> Outcome {
    let b = Budget::default();
    ensure!(class_number_formula(3, 120, 10, 6).map_err(e)? == 6, "class number formula");
    let z6 = FiniteAbelianGroup::cyclic(6);
    let kernel = z6.cyclic_subgroups_of_order(120 / (10 * 6)).remove(0);
    let res = elasticity_from_abstract_data(&z6, &kernel, false, false, &b).map_err(e)?;
    ensure!(res.value == Elasticity::Finite(Ratio::from_integer(3)), "rho = {}", res.value);
    Ok(())
}

fn c7() -> Outcome {
    let b = Budget::default();
    for n in 1..=36 {
        for g in FiniteAbelianGroup::all_of_order(n) {
            let ex = davenport_exhaustive(&g, &b).map_err(e)?;
            let reference = davenport_closed_form(&g)
                .unwrap_or_else(|| 1 + g.invariant_factors().iter().map(|k| k - 1).sum::<u64>());
            ensure!(ex == reference, "D({g}): exhaustive {ex}, closed form {reference}");
        }
    }
    let d = |fs: &[u64]| davenport_with(&FiniteAbelianGroup::from_factors(fs).unwrap(), &b).map_err(e);
    ensure!(d(&[6])? == 6, "D(Z6)");
    ensure!(d(&[2, 2])? == 3, "D(Z2 x Z2)");
    ensure!(d(&[])? == 1, "D(trivial)");
    Ok(())
}

fn round_trips(d: i64, f: u64) -> Outcome {
    let r = QuadraticOrder::new(d, f).map_err(e)?;
    let mut checked = 0;
    for p in primes_up_to(100_000) {
        if checked >= 100 {
            break;
        }
        if f.is_multiple_of(p) {
            continue;
        }
        let inert = r.field().splitting_type(p).map_err(e)? == SplittingType::Inert;
        if inert && p > 100 {
            continue;
        }
        for q in r.primes_above(p).map_err(e)? {
            let j = r.contract(&q).map_err(e)?;
            ensure!(r.is_coprime_to_conductor(&j).map_err(e)?, "{j} meets the conductor");
            ensure!(r.extend(&j).map_err(e)? == q, "extend(contract({q})) != {q}");
            ensure!(r.contract(&r.extend(&j).map_err(e)?).map_err(e)? == j, "contract(extend({j})) != {j}");
            ensure!(r.is_prime_ideal(&j).map_err(e)?, "{j} is not prime in R");
            ensure!(r.maximal().is_prime_ideal(&q).map_err(e)?, "{q} is not prime in O_K");
            checked += 1;
        }
    }
    ensure!(checked >= 100, "only {checked} primes sampled for ({d}, {f})");
    Ok(())
}

fn c8() -> Outcome {
    for (d, f) in [(-7, 5), (-14, 11), (10, 17), (-1, 3), (641, 449)] {
        round_trips(d, f)?;
    }
    let b = Budget::default();
    let r = QuadraticOrder::new(-7, 5).map_err(e)?;
    let data = class_group_data(&r, &b).map_err(e)?;
    let report = irreducible_prime_bound_check(&r, &data, 2000, &b).map_err(e)?;
    ensure!(report.violations.is_empty(), "prime-count violations {:?}", report.violations);
    ensure!(report.max_count == 6, "maximum prime count {}", report.max_count);

    let bound = Ratio::new(7, 2);
    let lab = FactorLab::with_budget(-7, 5, &b).map_err(e)?;
    for a in lab.nonunits_up_to(2000) {
        let el = lab.element_elasticity(a).map_err(e)?;
        ensure!(el <= bound, "element {a:?} has elasticity {el}");
    }
    let zi = FactorLab::with_budget(-1, 1, &b).map_err(e)?;
    for a in zi.nonunits_up_to(1000) {
        let el = zi.element_elasticity(a).map_err(e)?;
        ensure!(el == Ratio::from_integer(1), "Z[i] element {a:?} has elasticity {el}");
    }
    Ok(())
}

fn c9() -> Outcome {
    let out = Command::new(env!("CARGO_BIN_EXE_quadorder"))
        .arg("verify-paper")
        .output()
        .map_err(e)?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    let failing: Vec<&str> = stdout.lines().filter(|l| l.starts_with("[FAIL]")).collect();
    ensure!(out.status.success(), "exit {:?}; {}", out.status.code(), failing.join("; "));
    Ok(())
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        (1, "Z[5w]: Cl = Z6, D = 6, case 1, rho = 7/2, 800 has lengths 2 and 7", Duration::from_secs(60), c1),
        (2, "Z[17 sqrt10]: unit index 9, probes give Z2 x Z2, rho = 2", Duration::from_secs(120), c2),
        (3, "Z[5i]: conductor not prime, rho = inf, witnesses 5^(n+2)", Duration::from_secs(60), c3),
        (4, "d = 641, f = 449: Cl = Z150, rho = 151/2", Duration::from_secs(300), c4),
        (5, "Z[11 sqrt-14]: kernel Z12, Cl = Z48, rho = 24", Duration::from_secs(120), c5),
        (6, "class number formula 6, abstract elasticity 3", Duration::from_secs(5), c6),
        (7, "Davenport exhaustive = closed form for |G| <= 36", Duration::from_secs(300), c7),
        (8, "round trips, prime-count bound, corpus elasticities", Duration::from_secs(600), c8),
        (9, "verify-paper exits 0", Duration::from_secs(600), c9),
    ];
    let mut failed = 0;
    for (id, title, limit, check) in criteria {
        let start = Instant::now();
        let mut outcome = check();
        let took = start.elapsed();
        if outcome.is_ok() && took > limit {
            outcome = Err(format!("took {took:.1?}, limit {limit:?}"));
        }
        match outcome {
            Ok(()) => println!("PASS criterion {id}: {title} ({took:.2?})"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {id}: {title} ({took:.2?}): {why}");
            }
        }
    }
    println!("{} of 9 criteria pass", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
