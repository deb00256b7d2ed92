use clap::{Parser, Subcommand, ValueEnum};
use expsum::dichotomy::{
    bp_matrix, classify_s, gadget_hp, gadget_star, generalized_group_condition, group_condition, is_discrete_unitary,
    orthogonality_violation, rank1_violation, Check, DichotomyError, Gadget, DEFAULT_TOL,
};
use expsum::gauss::gauss_sum;
use expsum::oracle::{brute_counts, OracleError, DEFAULT_BUDGET};
use expsum::polyring::{parse_poly, PolyError, SparsePoly};
use expsum::solver::{z_eval, SolverError};
use expsum::{Complex64, ExponentMatrix, SymbolicValue};
use num_bigint::BigInt;
use serde_json::{json, Value};
use std::process::ExitCode;

/// Exact quadratic exponential sums and partition-function tractability checks.
#[derive(Parser)]
#[command(name = "expsum", version)]
struct Cli {
    /// Print JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Maximum number of points the brute-force oracle may enumerate.
    #[arg(long, global = true, default_value_t = DEFAULT_BUDGET)]
    budget: u64,
    /// Tolerance: relative to N^{n/2} for verify (default 1e-6), per row
    /// length for matrix tests (default 1e-9).
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// Seed for any randomized step. No current command draws random
    /// numbers, so output never depends on it.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Z(N, f) in closed form.
    Eval(PolyArgs),
    /// Value distribution of f over Z_N^n and the resulting complex sum.
    Brute(PolyArgs),
    /// Compare the closed form with the brute-force sum.
    Verify(PolyArgs),
    /// The Gauss sum G(a, b).
    Gauss { a: BigInt, b: BigInt },
    /// Classify S[q, h] for a two-variable polynomial h.
    Classify {
        q: u64,
        /// Polynomial in x1, x2 (or @file).
        h: String,
    },
    /// Run one condition test on an exponent matrix given as JSON.
    MatrixTest { file: String, test: MatrixTest },
    /// Print a gadget as a multigraph ("n" then "u v mult" lines).
    Gadget {
        #[command(subcommand)]
        kind: GadgetKind,
    },
    /// The matrix B^{[p]} of an exponent matrix given as JSON.
    Bp { file: String, p: u32 },
}

#[derive(clap::Args)]
struct PolyArgs {
    /// Modulus N >= 1.
    modulus: BigInt,
    /// Number of variables.
    nvars: usize,
    /// Polynomial in x1..xn (or @file).
    poly: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum MatrixTest {
    Unitary,
    Ortho,
    Group,
    Ggc,
    Rank1,
}

#[derive(Subcommand)]
enum GadgetKind {
    /// The gadget realizing B^{[p]}.
    Hp {
        p: usize,
        #[arg(value_name = "M")]
        order: u64,
    },
    /// The gadget realizing A*.
    Star {
        #[arg(value_name = "M")]
        order: u64,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

const USAGE: u8 = 2;
const PARSE: u8 = 3;
const RESOURCE: u8 = 4;
const MISMATCH: u8 = 5;

fn fail(code: u8, message: impl Into<String>) -> Failure {
    Failure { code, message: message.into() }
}

impl From<PolyError> for Failure {
    fn from(e: PolyError) -> Self {
        let code = if matches!(e, PolyError::InvalidModulus(_)) { USAGE } else { PARSE };
        fail(code, e.to_string())
    }
}

impl From<SolverError> for Failure {
    fn from(e: SolverError) -> Self {
        match e {
            SolverError::Poly(p) => p.into(),
            other => fail(USAGE, other.to_string()),
        }
    }
}

impl From<OracleError> for Failure {
    fn from(e: OracleError) -> Self {
        let code = match e {
            OracleError::Budget { .. } | OracleError::ModulusTooLarge(_) => RESOURCE,
            _ => USAGE,
        };
        fail(code, e.to_string())
    }
}

impl From<DichotomyError> for Failure {
    fn from(e: DichotomyError) -> Self {
        match e {
            DichotomyError::Poly(p) => p.into(),
            other => fail(USAGE, other.to_string()),
        }
    }
}

/// Inline text, or the contents of a file for `@path`.
fn read_inline(arg: &str) -> Result<String, Failure> {
    match arg.strip_prefix('@') {
        Some(path) => read_file(path),
        None => Ok(arg.to_string()),
    }
}

fn read_file(path: &str) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| fail(USAGE, format!("cannot read {path}: {e}")))
}

fn read_matrix(path: &str) -> Result<ExponentMatrix, Failure> {
    serde_json::from_str(&read_file(path)?).map_err(|e| fail(PARSE, format!("{path}: {e}")))
}

/// A bare array of rows, or an object with a `"matrix"` field.
fn read_real_matrix(path: &str) -> Result<Vec<Vec<f64>>, Failure> {
    let value: Value = serde_json::from_str(&read_file(path)?).map_err(|e| fail(PARSE, format!("{path}: {e}")))?;
    let rows = value.get("matrix").cloned().unwrap_or(value);
    let b: Vec<Vec<f64>> = serde_json::from_value(rows)
        .map_err(|_| fail(PARSE, format!("{path}: rank1 expects a real matrix (array of rows or {{\"matrix\": ...}})")))?;
    if b.iter().any(|r| r.len() != b.len()) {
        return Err(fail(PARSE, format!("{path}: matrix is not square")));
    }
    Ok(b)
}

fn poly(args: &PolyArgs) -> Result<SparsePoly, Failure> {
    Ok(parse_poly(&read_inline(&args.poly)?, &args.modulus, args.nvars)?)
}

fn complex_json(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

fn value_json(v: &SymbolicValue) -> Value {
    let mut out = serde_json::to_value(v).expect("serializable");
    out["text"] = json!(v.to_string());
    out
}

fn check_json(test: &str, check: &Check) -> Value {
    json!({ "test": test, "holds": check.holds(), "witness": check.witness().map(|w| w.to_string()) })
}

fn check_text(check: &Check) -> String {
    match check.witness() {
        None => "holds".to_string(),
        Some(w) => format!("violated: {w}"),
    }
}

struct Output {
    text: String,
    json: Value,
    code: u8,
}

impl Output {
    fn ok(text: impl Into<String>, json: Value) -> Self {
        Output { text: text.into(), json, code: 0 }
    }
}

fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Eval(args) => {
            let v = z_eval(&poly(args)?)?;
            Ok(Output::ok(v.to_string(), value_json(&v)))
        }
        Command::Brute(args) => {
            let counts = brute_counts(&poly(args)?, cli.budget)?;
            let z: Complex64 = counts.value();
            let counts_text: Vec<String> = counts.counts.iter().map(u64::to_string).collect();
            Ok(Output::ok(
                format!("counts: {}\nvalue: {z:.12}", counts_text.join(" ")),
                json!({ "counts": counts, "value": complex_json(z) }),
            ))
        }
        Command::Verify(args) => {
            let f = poly(args)?;
            let symbolic = z_eval(&f)?;
            let brute: Complex64 = brute_counts(&f, cli.budget)?.value();
            let closed = symbolic.approx().complex.ok_or_else(|| fail(RESOURCE, "value too large to compare"))?;
            let discrepancy = (closed - brute).norm();
            let scale = args.modulus.to_string().parse::<f64>().unwrap_or(f64::INFINITY).powf(args.nvars as f64 / 2.0);
            let tolerance = cli.tol.unwrap_or(1e-6) * scale;
            let agree = discrepancy <= tolerance;
            Ok(Output {
                text: format!(
                    "{}: closed form {symbolic}, brute force {brute:.12}, discrepancy {discrepancy:e} (tolerance {tolerance:e})",
                    if agree { "agree" } else { "MISMATCH" }
                ),
                json: json!({
                    "agree": agree,
                    "closed_form": value_json(&symbolic),
                    "brute_force": complex_json(brute),
                    "discrepancy": discrepancy,
                    "tolerance": tolerance,
                }),
                code: if agree { 0 } else { MISMATCH },
            })
        }
        Command::Gauss { a, b } => {
            let v = gauss_sum(a, b).map_err(|e| fail(USAGE, e.to_string()))?;
            Ok(Output::ok(v.to_string(), value_json(&v)))
        }
        Command::Classify { q, h } => {
            let h = parse_poly(&read_inline(h)?, &BigInt::from(*q), 2)?;
            let verdict = classify_s(*q, &h, cli.tol.unwrap_or(DEFAULT_TOL))?;
            Ok(Output::ok(
                format!("{:?}: {}", verdict.outcome, verdict.witness),
                serde_json::to_value(&verdict).expect("serializable"),
            ))
        }
        Command::MatrixTest { file, test } => {
            let tol = cli.tol.unwrap_or(DEFAULT_TOL);
            let (name, check) = match test {
                MatrixTest::Unitary => ("unitary", is_discrete_unitary(&read_matrix(file)?, tol)),
                MatrixTest::Ortho => ("ortho", to_check(orthogonality_violation(&read_matrix(file)?, tol))),
                MatrixTest::Group => ("group", group_condition(&read_matrix(file)?, tol)?),
                MatrixTest::Rank1 => ("rank1", to_check(rank1_violation(&read_real_matrix(file)?, tol))),
                MatrixTest::Ggc => {
                    let verdict = generalized_group_condition(&read_matrix(file)?, tol)?;
                    return Ok(Output::ok(
                        format!("{:?}: {}", verdict.outcome, verdict.witness),
                        serde_json::to_value(&verdict).expect("serializable"),
                    ));
                }
            };
            Ok(Output::ok(check_text(&check), check_json(name, &check)))
        }
        Command::Gadget { kind } => {
            let gadget = match kind {
                GadgetKind::Hp { p, order } => gadget_hp(*p, *order)?,
                GadgetKind::Star { order } => gadget_star(*order)?,
            };
            Ok(gadget_output(&gadget))
        }
        Command::Bp { file, p } => {
            let b = bp_matrix::<f64>(&read_matrix(file)?, *p);
            let text: Vec<String> =
                b.iter().map(|r| r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")).collect();
            Ok(Output::ok(text.join("\n"), json!({ "p": p, "matrix": b })))
        }
    }
}

fn to_check(violation: Option<expsum::dichotomy::Witness>) -> Check {
    violation.map_or(Check::Holds, Check::Violated)
}

fn gadget_output(g: &Gadget) -> Output {
    let edges: Vec<Value> = g.graph.edges().map(|(u, v, m)| json!([u, v, m])).collect();
    Output::ok(
        format!("# u = {}, v = {}\n{}", g.u, g.v, g.graph.to_text().trim_end()),
        json!({ "u": g.u, "v": g.v, "nverts": g.graph.nverts(), "edges": edges }),
    )
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    if cli.tol.is_some_and(|t| !(t.is_finite() && t >= 0.0)) {
        eprintln!("error: --tol must be a nonnegative number");
        return ExitCode::from(USAGE);
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", out.json);
            } else {
                println!("{}", out.text);
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
