//! `seqfactory`: check, decompose, simulate and inspect qubit isometries.
//!
//! Every invocation prints exactly one JSON document on stdout. Exit codes:
//! 0 success or implementable, 1 criterion rejection, 2 usage or input
//! error, 3 internal numeric failure.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod formats;
mod operators;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use seqfactory::linalg::{vec_norm, DEFAULT_RANK_TOL};
use seqfactory::mps::{check_canonical, operator_to_mps};
use seqfactory::sequencer::{
    build_plan, operator_schmidt_ranks, sequentiality_test, simulate, verify_plan,
    DEFAULT_CRIT_TOL,
};
use seqfactory::{Error, Isometry, SequentialityReport, Tolerances, C64};

use formats::{
    encode_matrix, encode_vector, read_json, to_json, write_json, JsonMatrix, PlanFile,
    PlanReport, TolerancesJson,
};

/// Largest basis-input error accepted before a plan is written.
const PLAN_ERROR_LIMIT: f64 = 1e-9;

#[derive(Parser)]
#[command(name = "seqfactory", version, about = "Sequential qubit-ancilla decomposition of isometries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct OperatorArgs {
    /// Builtin (cnot, swap, cz, shor, cloner:<n>, ghz:<n>, random:<m>,<n>,<seed>, product) or operator file
    operator: String,

    /// JSON list of 2x2 matrices for `product`
    #[arg(long)]
    factors: Option<PathBuf>,
}

#[derive(Args)]
struct TolArgs {
    /// Relative cutoff for numerically-zero singular values
    #[arg(long, default_value_t = DEFAULT_RANK_TOL)]
    rank_tol: f64,

    /// Threshold on the per-site criterion residuals
    #[arg(long, default_value_t = DEFAULT_CRIT_TOL)]
    crit_tol: f64,
}

impl TolArgs {
    fn get(&self) -> Result<Tolerances, Failure> {
        if !(self.rank_tol >= 0.0 && self.crit_tol > 0.0) {
            return Err(Failure::input("tolerances must be nonnegative (crit-tol positive)"));
        }
        Ok(Tolerances {
            rank_tol: self.rank_tol,
            crit_tol: self.crit_tol,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether the operator has a sequential implementation
    Check {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
    /// Build and verify the minimal-ancilla plan
    Decompose {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Plan file to write; without it the plan goes to stdout
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a plan file on an input state
    Simulate {
        /// Plan file written by `decompose`
        plan: PathBuf,
        /// Basis label over 0/1/+/- (one character per input qubit) or a JSON list of [re, im]
        #[arg(long)]
        input_state: String,
        /// Also print the reduced density matrix of this output site (1-based)
        #[arg(long)]
        reduce: Option<usize>,
    },
    /// Bond dimensions, Schmidt ranks and canonical-form residuals
    Info {
        #[command(flatten)]
        op: OperatorArgs,
        #[command(flatten)]
        tol: TolArgs,
    },
}

pub struct Failure {
    code: u8,
    kind: &'static str,
    message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            kind: "input",
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: 3,
            kind: "internal",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Contract(_) => Failure::input(e.to_string()),
            _ => Failure::internal(e.to_string()),
        }
    }
}

struct Output {
    json: String,
    code: u8,
}

impl Output {
    fn ok<T: Serialize>(value: &T) -> Self {
        Self {
            json: to_json(value),
            code: 0,
        }
    }
}

#[derive(Serialize)]
struct CheckJson {
    operator: String,
    m_qubits: usize,
    n_qubits: usize,
    implementable: bool,
    per_site_residuals: Vec<f64>,
    max_residual: f64,
    bond_dims: Vec<usize>,
    ancilla_dim_if_yes: Option<usize>,
    tolerances: TolerancesJson,
}

impl CheckJson {
    fn new(name: &str, u: &Isometry, r: &SequentialityReport) -> Self {
        Self {
            operator: name.to_string(),
            m_qubits: u.m_in(),
            n_qubits: u.n_out(),
            implementable: r.implementable,
            per_site_residuals: r.per_site_residuals.clone(),
            max_residual: r.max_residual(),
            bond_dims: r.bond_dims.clone(),
            ancilla_dim_if_yes: r.ancilla_dim_if_yes,
            tolerances: tol_json(&r.tolerances),
        }
    }
}

#[derive(Serialize)]
struct DecomposeSummary {
    written: String,
    ancilla_dim: usize,
    bond_dims: Vec<usize>,
    verification_error: f64,
    decoupling_residual: f64,
}

#[derive(Serialize)]
struct SimulateJson {
    n_qubits: usize,
    amplitudes: Vec<[f64; 2]>,
    decoupling_residual: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    reduced: Option<ReducedJson>,
}

#[derive(Serialize)]
struct ReducedJson {
    site: usize,
    density_matrix: JsonMatrix,
}

#[derive(Serialize)]
struct InfoJson {
    operator: String,
    m_qubits: usize,
    n_qubits: usize,
    bond_dims: Vec<usize>,
    max_bond_dim: usize,
    schmidt_ranks: Option<Vec<usize>>,
    canonical_residuals: CanonicalJson,
    criterion_residuals: Vec<f64>,
    tolerances: TolerancesJson,
}

#[derive(Serialize)]
struct CanonicalJson {
    left_normalization: f64,
    weight_recursion: f64,
    weight_trace: f64,
    weights_positive: bool,
    passes: bool,
}

#[derive(Serialize)]
struct ErrorJson<'a> {
    error: ErrorBody<'a>,
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    kind: &'a str,
    message: &'a str,
}

fn tol_json(t: &Tolerances) -> TolerancesJson {
    TolerancesJson {
        rank_tol: t.rank_tol,
        crit_tol: t.crit_tol,
    }
}

fn cmd_check(op: &OperatorArgs, tol: &TolArgs) -> Result<Output, Failure> {
    let tol = tol.get()?;
    let u = operators::load(&op.operator, op.factors.as_deref())?;
    let report = sequentiality_test(&u, &tol)?;
    let code = if report.implementable { 0 } else { 1 };
    if !report.implementable {
        eprintln!(
            "{}: not sequentially implementable (max residual {:.3e})",
            op.operator,
            report.max_residual()
        );
    }
    Ok(Output {
        json: to_json(&CheckJson::new(&op.operator, &u, &report)),
        code,
    })
}

fn cmd_decompose(op: &OperatorArgs, tol: &TolArgs, output: Option<&PathBuf>) -> Result<Output, Failure> {
    let tol = tol.get()?;
    let u = operators::load(&op.operator, op.factors.as_deref())?;
    let report = sequentiality_test(&u, &tol)?;
    if !report.implementable {
        eprintln!("{}: not sequentially implementable, no plan written", op.operator);
        return Ok(Output {
            json: to_json(&CheckJson::new(&op.operator, &u, &report)),
            code: 1,
        });
    }
    let plan = match build_plan(&u, &tol) {
        Ok(p) => p,
        Err(Error::NotImplementable(r)) => {
            return Ok(Output {
                json: to_json(&CheckJson::new(&op.operator, &u, &r)),
                code: 1,
            })
        }
        Err(e) => return Err(e.into()),
    };
    let v = verify_plan(&plan, &u)?;
    if !(v.max_error < PLAN_ERROR_LIMIT) {
        return Err(Failure::internal(format!(
            "plan verification error {:.3e} exceeds {PLAN_ERROR_LIMIT:e}",
            v.max_error
        )));
    }
    let file = PlanFile {
        ancilla_dim: plan.ancilla_dim(),
        m_in: plan.m_in(),
        steps: plan.steps().iter().map(encode_matrix).collect(),
        bond_dims: plan.bond_dims().to_vec(),
        report: PlanReport {
            implementable: true,
            residuals: report.per_site_residuals.clone(),
            verification_error: v.max_error,
            decoupling_residual: v.max_decoupling_residual,
            tolerances: tol_json(&tol),
        },
    };
    match output {
        Some(path) => {
            write_json(path, &file)?;
            Ok(Output::ok(&DecomposeSummary {
                written: path.display().to_string(),
                ancilla_dim: plan.ancilla_dim(),
                bond_dims: plan.bond_dims().to_vec(),
                verification_error: v.max_error,
                decoupling_residual: v.max_decoupling_residual,
            }))
        }
        None => Ok(Output::ok(&file)),
    }
}

fn parse_state(spec: &str, m: usize) -> Result<Vec<C64>, Failure> {
    let trimmed = spec.trim();
    if trimmed.starts_with('[') {
        let raw: Vec<[f64; 2]> = serde_json::from_str(trimmed).map_err(|e| {
            Failure::input(format!("--input-state:{}:{}: {e}", e.line(), e.column()))
        })?;
        if raw.len() != 1 << m {
            return Err(Failure::input(format!(
                "--input-state has {} amplitudes, the plan takes {} qubits ({} amplitudes)",
                raw.len(),
                m,
                1usize << m
            )));
        }
        let v: Vec<C64> = raw.iter().map(|&[re, im]| C64::new(re, im)).collect();
        let norm = vec_norm(&v);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Failure::input("--input-state must be a nonzero finite vector"));
        }
        return Ok(v.into_iter().map(|z| z / norm).collect());
    }
    if trimmed.chars().count() != m {
        return Err(Failure::input(format!(
            "--input-state '{trimmed}' has {} labels, the plan takes {m} qubits",
            trimmed.chars().count()
        )));
    }
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut state = vec![C64::new(1.0, 0.0)];
    for ch in trimmed.chars() {
        let q = match ch {
            '0' => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
            '1' => [C64::new(0.0, 0.0), C64::new(1.0, 0.0)],
            '+' => [C64::new(h, 0.0), C64::new(h, 0.0)],
            '-' => [C64::new(h, 0.0), C64::new(-h, 0.0)],
            other => {
                return Err(Failure::input(format!(
                    "--input-state: unknown label '{other}' (use 0, 1, + or -)"
                )))
            }
        };
        state = state.iter().flat_map(|a| q.iter().map(move |b| a * b)).collect();
    }
    Ok(state)
}

/// Reduced density matrix of one qubit (0-based) of a pure state.
fn reduce(psi: &[C64], n: usize, site: usize) -> JsonMatrix {
    let shift = n - 1 - site;
    let mut rho = [[C64::new(0.0, 0.0); 2]; 2];
    for (x, amp) in psi.iter().enumerate() {
        if (x >> shift) & 1 == 1 {
            continue;
        }
        let y = x | (1 << shift);
        rho[0][0] += amp * amp.conj();
        rho[0][1] += amp * psi[y].conj();
        rho[1][0] += psi[y] * amp.conj();
        rho[1][1] += psi[y] * psi[y].conj();
    }
    rho.iter()
        .map(|row| row.iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

fn cmd_simulate(plan_path: &Path, input: &str, site: Option<usize>) -> Result<Output, Failure> {
    let file: PlanFile = read_json(plan_path)?;
    let plan = file.to_plan(&plan_path.display().to_string())?;
    let n = plan.n_out();
    if let Some(s) = site {
        if s == 0 || s > n {
            return Err(Failure::input(format!("--reduce={s} is outside sites 1..={n}")));
        }
    }
    let psi = parse_state(input, plan.m_in())?;
    let out = simulate(&plan, &psi)?;
    let norm = vec_norm(&out.chain_state);
    let chain: Vec<C64> = if norm > 0.0 {
        out.chain_state.iter().map(|z| z / norm).collect()
    } else {
        out.chain_state.clone()
    };
    let reduced = site.map(|s| ReducedJson {
        site: s,
        density_matrix: reduce(&chain, n, s - 1),
    });
    Ok(Output::ok(&SimulateJson {
        n_qubits: n,
        amplitudes: encode_vector(&chain),
        decoupling_residual: out.decoupling_residual,
        reduced,
    }))
}

fn cmd_info(op: &OperatorArgs, tol: &TolArgs) -> Result<Output, Failure> {
    let tol = tol.get()?;
    let u = operators::load(&op.operator, op.factors.as_deref())?;
    let (mps, weights) = operator_to_mps(&u, tol.rank_tol)?;
    let canonical = check_canonical(mps.mps(), &weights, 1e-10);
    let schmidt_ranks = if u.is_square() {
        Some(operator_schmidt_ranks(&u, tol.rank_tol)?)
    } else {
        None
    };
    let report = sequentiality_test(&u, &tol)?;
    Ok(Output::ok(&InfoJson {
        operator: op.operator.clone(),
        m_qubits: u.m_in(),
        n_qubits: u.n_out(),
        bond_dims: mps.bond_dims(),
        max_bond_dim: mps.max_bond_dim(),
        schmidt_ranks,
        canonical_residuals: CanonicalJson {
            left_normalization: canonical.left_normalization,
            weight_recursion: canonical.weight_recursion,
            weight_trace: canonical.weight_trace,
            weights_positive: canonical.weights_positive,
            passes: canonical.passes,
        },
        criterion_residuals: report.per_site_residuals,
        tolerances: tol_json(&tol),
    }))
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!("error: {}", f.message);
    emit_error(f)
}

fn emit_error(f: &Failure) -> ExitCode {
    println!(
        "{}",
        to_json(&ErrorJson {
            error: ErrorBody {
                kind: f.kind,
                message: &f.message,
            },
        })
    );
    ExitCode::from(f.code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return emit_error(&Failure::input(e.kind().to_string()));
        }
    };
    let result = match &cli.command {
        Command::Check { op, tol } => cmd_check(op, tol),
        Command::Decompose { op, tol, output } => cmd_decompose(op, tol, output.as_ref()),
        Command::Simulate {
            plan,
            input_state,
            reduce,
        } => cmd_simulate(plan, input_state, *reduce),
        Command::Info { op, tol } => cmd_info(op, tol),
    };
    match result {
        Ok(out) => {
            println!("{}", out.json);
            ExitCode::from(out.code)
        }
        Err(f) => fail(&f),
    }
}
