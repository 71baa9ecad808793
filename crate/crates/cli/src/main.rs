use std::io::{self, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use weyr_core::commutant::commutant_basis;
use weyr_core::decomposition::weyr_decomposition;
use weyr_core::harness::{random_instance, run_selftest};
use weyr_core::io::{parse_json, to_grid, to_json, MatrixDocument, PairDocument};
use weyr_core::{
    build_weyr_matrix, h_pattern, k_matrix, reduce_pair, verify_normal_form, CommutingPair, Error, FieldDescriptor,
    SegreStructure,
};

const EXIT_USAGE: u8 = 1;
const EXIT_PRECONDITION: u8 = 2;
const EXIT_INTERNAL: u8 = 3;
const EXIT_PROPERTY: u8 = 4;

#[derive(Parser)]
#[command(name = "weyr", version, about = "Weyr forms, commutants and normal forms of commuting nilpotent pairs")]
struct Cli {
    /// Field for documents without one: rational or prime:<p>
    #[arg(long, global = true, default_value = "rational")]
    field: FieldDescriptor,

    /// Write structured output here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Structure {
    /// Strictly decreasing Jordan block sizes, comma separated
    #[arg(long, value_delimiter = ',', required = true)]
    k: Vec<usize>,

    /// Multiplicities of the sizes (default: all 1)
    #[arg(long, value_delimiter = ',')]
    p: Vec<usize>,
}

impl Structure {
    fn segre(&self) -> Result<SegreStructure, Error> {
        let p = if self.p.is_empty() { vec![1; self.k.len()] } else { self.p.clone() };
        SegreStructure::from_lists(&self.k, &p)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Weyr characteristic, Weyr form W and witness S of a nilpotent matrix
    Weyr {
        /// Matrix document (default: standard input)
        input: Option<PathBuf>,
    },
    /// K matrix, H grid and dimension of the commutant of a Weyr matrix
    Commutant {
        #[command(flatten)]
        structure: Structure,

        /// Also emit a basis of the commutant
        #[arg(long)]
        basis: bool,
    },
    /// Reduce a commuting nilpotent pair to its normal form
    Reduce {
        /// Pair document (default: standard input)
        input: Option<PathBuf>,
    },
    /// Check whether a pair document (m = W, n = B) is in normal form
    Verify {
        /// Pair document (default: standard input)
        input: Option<PathBuf>,
    },
    /// Generate a random conjugated normal pair
    Gen {
        #[command(flatten)]
        structure: Structure,

        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Run the randomized property suites, one JSON report per line
    Selftest {
        #[arg(long, default_value_t = 10)]
        max_dim: usize,

        #[arg(long, default_value_t = 200)]
        trials: usize,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        /// Corrupt reduced outputs before checking them
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

/// A failed command: exit code plus a message for standard error.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if e.is_precondition() {
            EXIT_PRECONDITION
        } else if e.is_internal() || e == Error::Singular {
            EXIT_INTERNAL
        } else {
            EXIT_USAGE
        };
        Failure(code, e.to_string())
    }
}

fn read_input(path: &Option<PathBuf>) -> Result<String, Failure> {
    match path {
        Some(p) if p.as_os_str() != "-" => {
            std::fs::read_to_string(p).map_err(|e| Failure(EXIT_USAGE, format!("{}: {e}", p.display())))
        }
        _ => {
            let mut s = String::new();
            io::stdin().read_to_string(&mut s).map_err(|e| Failure(EXIT_USAGE, format!("stdin: {e}")))?;
            Ok(s)
        }
    }
}

fn read_pair(path: &Option<PathBuf>, field: FieldDescriptor) -> Result<(FieldDescriptor, CommutingPair), Failure> {
    let doc: PairDocument = parse_json(&read_input(path)?)?;
    let field = doc.field.unwrap_or(field);
    let (m, n) = doc.to_matrices(field)?;
    Ok((field, CommutingPair::new(m, n)?))
}

/// Structured output plus the exit code it comes with.
struct Output {
    text: String,
    code: u8,
}

impl Output {
    fn ok(v: Value) -> Self {
        Output { text: v.to_string(), code: 0 }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    let field = cli.field;
    match &cli.command {
        Command::Weyr { input } => {
            let doc: MatrixDocument = parse_json(&read_input(input)?)?;
            let field = doc.field.unwrap_or(field);
            let m = doc.to_matrix(field)?;
            let d = weyr_decomposition(&m).map_err(|e| match e {
                Error::NotNilpotent(_) => Error::NotNilpotent("input matrix"),
                other => other,
            })?;
            Ok(Output::ok(json!({
                "field": field,
                "r": d.weyr.r(),
                "segre": d.weyr.segre().parts(),
                "w": to_grid(&d.w),
                "s": to_grid(&d.s),
            })))
        }
        Command::Commutant { structure, basis } => {
            let j = structure.segre()?;
            let pattern = h_pattern(&j);
            let grid = pattern.render_h_grid();
            eprintln!("{grid}");
            let mut out = json!({
                "k": j.sizes(),
                "p": j.multiplicities(),
                "K": k_matrix(&j).0,
                "H": grid.lines().collect::<Vec<_>>(),
                "dimension": j.commutant_dimension(),
            });
            if *basis {
                let w = build_weyr_matrix(pattern.weyr(), field);
                let b = commutant_basis(&w, &pattern)?;
                out["field"] = json!(field);
                out["basis"] = b.basis.iter().map(to_grid).collect();
            }
            Ok(Output::ok(out))
        }
        Command::Reduce { input } => {
            let (field, pair) = read_pair(input, field)?;
            let res = reduce_pair(&pair)?;
            let report = verify_normal_form(&res.w, &res.b);
            let code = if report.passed() { 0 } else { EXIT_PROPERTY };
            let text = json!({
                "field": field,
                "r": res.weyr.r(),
                "w": to_grid(&res.w),
                "b": to_grid(&res.b),
                "s": to_grid(&res.s),
                "report": report,
            })
            .to_string();
            Ok(Output { text, code })
        }
        Command::Verify { input } => {
            let doc: PairDocument = parse_json(&read_input(input)?)?;
            let (w, b) = doc.to_matrices(doc.field.unwrap_or(field))?;
            let report = verify_normal_form(&w, &b);
            for f in report.failures() {
                eprintln!("failed {f}");
            }
            let code = if report.passed() { 0 } else { EXIT_PROPERTY };
            Ok(Output { text: to_json(&report), code })
        }
        Command::Gen { structure, seed } => {
            let j = structure.segre()?;
            let inst = random_instance(&j, field, *seed);
            let mut doc = PairDocument::new(inst.input.m(), inst.input.n());
            if j.t() == 1 {
                doc.ground_truth_b = Some(to_grid(&inst.b));
            }
            Ok(Output { text: to_json(&doc), code: 0 })
        }
        Command::Selftest { max_dim, trials, seed, inject_fault } => {
            let reports = run_selftest(*max_dim, *trials, *seed, field, *inject_fault);
            let failures = reports.iter().filter(|r| r.outcome.is_failure()).count();
            eprintln!("{} trials, {failures} failed", reports.len());
            let text = reports.iter().map(|r| r.to_json_line()).collect::<Vec<_>>().join("\n");
            Ok(Output { text, code: if failures > 0 { EXIT_PROPERTY } else { 0 } })
        }
    }
}

fn emit(out: &Option<PathBuf>, text: &str) -> io::Result<()> {
    let mut text = text.to_string();
    if !text.is_empty() {
        text.push('\n');
    }
    match out {
        Some(p) => std::fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_USAGE } else { 0 });
        }
    };
    match run(&cli) {
        Ok(Output { text, code }) => {
            if let Err(e) = emit(&cli.out, &text) {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_USAGE);
            }
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
