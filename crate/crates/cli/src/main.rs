use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use quadorder::abelian::{davenport_with, FiniteAbelianGroup};
use quadorder::factorlab::FactorLab;
use quadorder::{Budget, Error};
use quadorder_cli::exit_code;
use quadorder::report::analyze;
use quadorder_cli::verify::{verify, Expected, VerifyError};

/// Class groups, Davenport constants and elasticity of quadratic orders Z + f*O_K.
///
/// Search limits default to built-in values; ORDER_ELASTICITY_BUDGET replaces the
/// node and norm caps.
#[derive(Parser)]
#[command(name = "quadorder", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Class group, Davenport constant, case and elasticity of Z + f*O_K in Q(sqrt(d)).
    Analyze {
        /// Squarefree d of the field Q(sqrt(d)).
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        /// Conductor index f.
        #[arg(long)]
        f: u64,
        /// Print a single line of JSON.
        #[arg(long)]
        json: bool,
    },
    /// Lengths of all factorizations of one element (imaginary fields only).
    LengthSet {
        #[arg(long, allow_negative_numbers = true)]
        d: i64,
        #[arg(long)]
        f: u64,
        /// "x,y" for x + y*f*omega, coordinates in the order's own basis
        /// {1, f*omega} with omega = (s + sqrt(d_K))/2 and s = d_K mod 2.
        #[arg(long, allow_hyphen_values = true)]
        elt: String,
    },
    /// Davenport constant of Z_n1 + Z_n2 + ...
    Davenport {
        /// Comma-separated cyclic factors; empty for the trivial group.
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        factors: String,
    },
    /// Recompute the worked examples and compare with the expected values.
    VerifyPaper {
        /// Run a single row.
        #[arg(long)]
        only: Option<u32>,
        /// Expected-values JSON file replacing the built-in one.
        #[arg(long)]
        expected: Option<PathBuf>,
    },
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    ExitCode::from(exit_code(e) as u8)
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>, Error> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| Error::InvalidInput(format!("bad {what} entry {t:?}"))))
        .collect()
}

fn run(cmd: Command) -> Result<ExitCode, Error> {
    let budget = Budget::from_env();
    match cmd {
        Command::Analyze { d, f, json } => {
            let report = analyze(d, f, &budget)?;
            if json {
                println!("{}", report.to_json());
            } else {
                println!("{report}");
            }
        }
        Command::LengthSet { d, f, elt } => {
            let coords: Vec<i128> = parse_list(&elt, "element")?;
            let [x, y] = coords[..] else {
                return Err(Error::InvalidInput(format!("element {elt:?} is not of the form x,y")));
            };
            let lab = FactorLab::with_budget(d, f, &budget)?;
            let ls = lab.length_set((x, y))?;
            let lengths: Vec<String> = ls.lengths.iter().map(ToString::to_string).collect();
            println!("lengths    {{{}}}", lengths.join(", "));
            println!("elasticity {}", ls.elasticity());
        }
        Command::Davenport { factors } => {
            let fs: Vec<u64> = parse_list(&factors, "factor")?;
            let g = FiniteAbelianGroup::from_factors(&fs)?;
            println!("{}", davenport_with(&g, &budget)?);
        }
        Command::VerifyPaper { only, expected } => {
            let table = match expected {
                Some(p) => Expected::from_path(&p),
                None => Ok(Expected::embedded()),
            }
            .and_then(|e| verify(&e, only, &budget));
            let rows = match table {
                Ok(rows) => rows,
                Err(e @ (VerifyError::Corrupt(_) | VerifyError::UnknownRow(_))) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::from(2));
                }
            };
            for row in &rows {
                print!("{row}");
            }
            let passed = rows.iter().filter(|r| r.passed()).count();
            println!("{passed}/{} rows pass", rows.len());
            if passed != rows.len() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => fail(&e),
    }
}
