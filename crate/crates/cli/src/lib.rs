//! The `pqn` command line: verification, deformation, hierarchies, involutivity tables,
//! identity suites and flow runs, each producing a JSON report.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use pqn_core::expr::ScalarExpr;
use pqn_core::flow::{self, FlowError};
use pqn_core::forms::Form;
use pqn_core::models::{self, ModelDescriptor, ModelError, BUILTIN_MODELS};
use pqn_core::pqn::{self, Check, CheckReport, PqNStructure, PqnError};

#[derive(Debug, Parser)]
#[command(name = "pqn", version, about = "Build, deform and verify Poisson quasi-Nijenhuis structures")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Built-in model name or path to a JSON model file
    #[arg(long)]
    pub model: String,
    /// Particle number for built-in models (default 3)
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Write the JSON report here instead of standard output
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Classify a structure as PN, PqN or invalid
    Verify(ModelArgs),
    /// Deform by a closed 2-form
    Deform {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long = "two-form")]
        two_form: String,
        /// Save the deformed model here
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print H_k, X_k, Y_k and phi_k
    Hierarchy(ModelArgs),
    /// Tabulate {H_l, H_m}
    Involutivity(ModelArgs),
    /// Run one identity suite
    Identities {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long = "two-form")]
        two_form: Option<String>,
    },
    /// Integrate the flow of H_k with RK4
    Flow {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long, default_value_t = 2)]
        hamiltonian: usize,
        #[arg(long, default_value_t = 10.0)]
        t: f64,
        #[arg(long, default_value_t = 1e-3)]
        dt: f64,
        /// CSV file holding the initial state
        #[arg(long)]
        x0: Option<PathBuf>,
        /// Save the trajectory as CSV here
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    #[value(name = "recursion")]
    Recursion,
    /// Identities of a factorized 3-form `phi = alpha ^ beta ^ gamma`
    #[value(name = "factorization")]
    Factorization,
    /// Involutivity when `phi = -2 dH_1 ^ Omega`
    #[value(name = "two-form")]
    TwoForm,
    /// Involutivity when `phi = dH_1 ^ beta ^ gamma`
    #[value(name = "triple")]
    Triple,
    /// `N* dH_k = dH_(k+1) + phi_(k-1)`
    #[value(name = "nstar-dh")]
    NstarDh,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot load model: {0}")]
    Model(ModelError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Output(_) => 2,
            CliError::Model(_) => 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub model: String,
    pub checks: Vec<Check>,
    pub tables: BTreeMap<String, Value>,
}

impl Report {
    fn new(model: &str) -> Self {
        Report { model: model.to_string(), checks: Vec::new(), tables: BTreeMap::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn add(&mut self, r: CheckReport) {
        self.checks.extend(r.checks);
    }

    fn fail(&mut self, name: &str, witness: impl Into<String>) {
        self.checks.push(Check { name: name.to_string(), pass: false, witness: Some(witness.into()) });
    }

    fn table(&mut self, key: &str, v: Value) {
        self.tables.insert(key.to_string(), v);
    }
}

/// Parses arguments, runs the command and writes the report. Returns the exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let report_path = cli.command.model_args().report.clone();
    let outcome = run(&cli).and_then(|report| {
        let body = report.to_json();
        match &report_path {
            Some(p) => models::write_atomic(p, body.as_bytes()).map_err(|e| CliError::Output(e.to_string()))?,
            None => print!("{body}"),
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}: {}", c.name, c.witness.as_deref().unwrap_or(""));
            }
            if report.all_pass() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

impl Command {
    pub fn model_args(&self) -> &ModelArgs {
        match self {
            Command::Verify(m) | Command::Hierarchy(m) | Command::Involutivity(m) => m,
            Command::Deform { model, .. } | Command::Identities { model, .. } | Command::Flow { model, .. } => model,
        }
    }
}

pub fn load(args: &ModelArgs) -> Result<ModelDescriptor, CliError> {
    if BUILTIN_MODELS.contains(&args.model.as_str()) {
        return models::builtin(&args.model, args.n.unwrap_or(3)).map_err(|e| match e {
            ModelError::TooFewParticles(_) => CliError::Usage(e.to_string()),
            e => CliError::Model(e),
        });
    }
    if args.n.is_some() {
        return Err(CliError::Usage("--n only applies to built-in models".into()));
    }
    models::load_model(&args.model).map_err(CliError::Model)
}

fn kmax(args: &ModelArgs, model: &ModelDescriptor, min: usize) -> Result<usize, CliError> {
    let k = args.kmax.unwrap_or(model.structure.dim());
    if k < min {
        return Err(CliError::Usage(format!("--kmax must be at least {min}")));
    }
    Ok(k)
}

fn two_form(model: &ModelDescriptor, name: &str) -> Result<Form, CliError> {
    if let Some(f) = model.two_forms.get(name) {
        return Ok(f.clone());
    }
    if let Some(n) = model.n {
        if let Some(f) = models::standard_two_forms(n).map_err(CliError::Model)?.named().remove(name) {
            return Ok(f);
        }
    }
    Err(CliError::Usage(format!("unknown two-form `{name}` for model `{}`", model.name)))
}

fn exact_or_zero(model: &ModelDescriptor, name: &str) -> Form {
    model.exact_form(name).unwrap_or_else(|| Form::zero(model.structure.dim(), 1))
}

/// Failed computations become failing checks carrying the error text.
fn record_error(report: &mut Report, name: &str, e: PqnError) -> Result<(), CliError> {
    match e {
        PqnError::Invalid(msg) => Err(CliError::Usage(msg)),
        e => {
            report.fail(name, e.to_string());
            Ok(())
        }
    }
}

fn label_table(report: &mut Report, s: &PqNStructure) {
    let (label, checks) = pqn::classify_structure(s);
    report.add(checks);
    report.table("label", json!(label.to_string()));
}

pub fn run(cli: &Cli) -> Result<Report, CliError> {
    let args = cli.command.model_args();
    let model = load(args)?;
    let s = &model.structure;
    let c = &s.chart;
    let mut report = Report::new(&model.name);
    match &cli.command {
        Command::Verify(_) => {
            label_table(&mut report, s);
            if label_is_invalid(&report) && report.all_pass() {
                report.fail("label", "structure is neither PN nor PqN");
            }
        }
        Command::Deform { two_form: name, out, .. } => {
            let omega = two_form(&model, name)?;
            match pqn::deform(s, &omega) {
                Ok(hat) => {
                    label_table(&mut report, &hat);
                    report.table("N", json!(hat.n.display(&hat.chart)));
                    report.table("phi", json!(hat.phi.display(&hat.chart)));
                    if let Some(path) = out {
                        let saved = deformed_model(&model, name, hat)?;
                        models::save_model(&saved, path).map_err(|e| CliError::Output(e.to_string()))?;
                    }
                }
                Err(e) => record_error(&mut report, "deform", e)?,
            }
        }
        Command::Hierarchy(_) => {
            let k = kmax(args, &model, 1)?;
            match pqn::hierarchy(s, k) {
                Ok(hi) => {
                    report.table("H", json!(hi.h.iter().map(|e| e.to_string_in(c)).collect::<Vec<_>>()));
                    report.table("X", json!(hi.x.iter().map(|v| v.display(c)).collect::<Vec<_>>()));
                    report.table("Y", json!(hi.y.iter().map(|v| v.display(c)).collect::<Vec<_>>()));
                    report.table("phi", json!(hi.phi_k.iter().map(|f| f.display(c)).collect::<Vec<_>>()));
                    let bad = hi.recursion_residuals.iter().enumerate().find(|(_, r)| !r.is_zero());
                    report.checks.push(Check {
                        name: "N* dH_k = dH_(k+1) + phi_(k-1)".into(),
                        pass: bad.is_none(),
                        witness: bad.map(|(i, r)| format!("k = {}: {}", i + 1, r.display(c))),
                    });
                }
                Err(e) => record_error(&mut report, "hierarchy", e)?,
            }
        }
        Command::Involutivity(_) => {
            let k = kmax(args, &model, 1)?;
            match pqn::involutivity_table(s, k) {
                Ok(t) => {
                    let mut witness = None;
                    for (l, row) in t.iter().enumerate() {
                        for (m, e) in row.iter().enumerate() {
                            if witness.is_none() && !e.is_zero() {
                                witness = Some(format!("{{H_{}, H_{}}} = {}", l + 1, m + 1, e.to_string_in(c)));
                            }
                        }
                    }
                    let strings: Vec<Vec<String>> =
                        t.iter().map(|r| r.iter().map(|e| e.to_string_in(c)).collect()).collect();
                    report.table("involutivity", json!(strings));
                    report.checks.push(Check { name: "{H_l, H_m} = 0".into(), pass: witness.is_none(), witness });
                }
                Err(e) => record_error(&mut report, "involutivity", e)?,
            }
        }
        Command::Identities { suite, two_form: name, .. } => {
            let result = match suite {
                Suite::Recursion | Suite::NstarDh => {
                    let k = kmax(args, &model, 2)?;
                    pqn::verify_recursion_identity(s, k).map(|mut r| {
                        let keep = if *suite == Suite::Recursion { "recursion identity" } else { "N* dH_k" };
                        r.checks.retain(|c| c.name.starts_with(keep));
                        r
                    })
                }
                Suite::Factorization => {
                    let k = kmax(args, &model, 1)?;
                    let alpha = Form::function(s.n.trace()).d();
                    let half = pqn_core::expr::Coeff::new(1.into(), 2.into());
                    let beta = exact_or_zero(&model, "factor_beta").scale(&half);
                    let gamma = exact_or_zero(&model, "factor_gamma");
                    pqn::verify_section4_identities(s, &alpha, &beta, &gamma, k)
                }
                Suite::TwoForm => {
                    let k = kmax(args, &model, 1)?;
                    let name = name.as_deref().ok_or_else(|| CliError::Usage("the two-form suite needs --two-form".into()))?;
                    pqn::verify_theorem1(s, &two_form(&model, name)?, k)
                }
                Suite::Triple => {
                    let k = kmax(args, &model, 1)?;
                    let beta = exact_or_zero(&model, "factor_beta");
                    let gamma = exact_or_zero(&model, "factor_gamma");
                    pqn::verify_theorem3(s, &beta, &gamma, k)
                }
            };
            match result {
                Ok(r) => report.add(r),
                Err(e) => record_error(&mut report, "suite", e)?,
            }
        }
        Command::Flow { hamiltonian, t, dt, x0, out, .. } => {
            run_flow(&mut report, &model, args.kmax, *hamiltonian, *t, *dt, x0.as_ref(), out.as_ref())?;
        }
    }
    Ok(report)
}

fn label_is_invalid(report: &Report) -> bool {
    report.tables.get("label").and_then(Value::as_str) == Some("invalid")
}

/// The deformed model keeps the source scalars; factorization potentials are taken from a
/// built-in model with the same structure, or cleared.
fn deformed_model(src: &ModelDescriptor, two_form: &str, hat: PqNStructure) -> Result<ModelDescriptor, CliError> {
    let mut scalars = src.scalars.clone();
    let zero = ScalarExpr::zero(hat.dim());
    scalars.insert("factor_beta".into(), zero.clone());
    scalars.insert("factor_gamma".into(), zero);
    if let Some(n) = src.n {
        for name in BUILTIN_MODELS {
            let Ok(b) = models::builtin(name, n) else { continue };
            if b.structure == hat {
                for key in ["factor_beta", "factor_gamma"] {
                    if let Some(v) = b.scalars.get(key) {
                        scalars.insert(key.into(), v.clone());
                    }
                }
                break;
            }
        }
    }
    Ok(ModelDescriptor::new(format!("{}+{two_form}", src.name), hat, scalars, src.two_forms.clone()))
}

#[allow(clippy::too_many_arguments)]
fn run_flow(
    report: &mut Report,
    model: &ModelDescriptor,
    kmax: Option<usize>,
    k: usize,
    t: f64,
    dt: f64,
    x0: Option<&PathBuf>,
    out: Option<&PathBuf>,
) -> Result<(), CliError> {
    if !(t > 0.0 && t.is_finite() && dt > 0.0 && dt.is_finite()) {
        return Err(CliError::Usage("--t and --dt must be positive".into()));
    }
    let s = &model.structure;
    let kmax = kmax.unwrap_or(s.dim() / 2).max(k);
    if k == 0 {
        return Err(CliError::Usage("--hamiltonian must be at least 1".into()));
    }
    let x0 = match x0 {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::Usage(format!("{}: {e}", p.display())))?;
            flow::parse_initial_state(&text).map_err(|e| CliError::Usage(e.to_string()))?
        }
        None => match model.n {
            Some(n) => flow::default_initial_state(n),
            None => return Err(CliError::Usage("model has no default initial state; pass --x0".into())),
        },
    };
    if x0.len() != s.dim() {
        return Err(CliError::Usage(format!("initial state has {} entries, chart has {}", x0.len(), s.dim())));
    }
    let hi = match pqn::hierarchy(s, kmax) {
        Ok(h) => h,
        Err(e) => return record_error(report, "hierarchy", e),
    };
    let field = flow::hamiltonian_vf(&s.pi, hi.h(k));
    let steps = (t / dt).round() as usize;
    report.table("steps", json!(steps));
    report.table("dt", json!(dt));
    let traj = match flow::integrate_rk4(&field, &x0, dt, steps) {
        Ok(traj) => {
            report.checks.push(Check { name: "integration".into(), pass: true, witness: None });
            traj
        }
        Err(FlowError::Pole { step, partial }) => {
            report.fail("integration", format!("state left the domain at step {step}, t = {}", step as f64 * dt));
            partial
        }
        Err(e) => {
            report.fail("integration", e.to_string());
            return Ok(());
        }
    };
    if let Some(path) = out {
        models::write_atomic(path, traj.to_csv().as_bytes()).map_err(|e| CliError::Output(e.to_string()))?;
    }
    report.table("final_state", json!(traj.last()));
    match flow::conservation_report(&traj, &hi.h) {
        Ok(drift) => {
            for (i, d) in drift.iter().enumerate() {
                let name = format!("drift H_{} <= 1e-8", i + 1);
                if *d <= 1e-8 {
                    report.checks.push(Check { name, pass: true, witness: None });
                } else {
                    report.fail(&name, format!("{d:e}"));
                }
            }
            report.table("drift", json!(drift));
        }
        Err(e) => report.fail("conservation", e.to_string()),
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("pqn").chain(args.iter().copied())).unwrap()
    }

    #[test]
    fn parses_suites_and_defaults() {
        let cli = parse(&["identities", "--model", "n-2", "--suite", "factorization"]);
        assert!(matches!(cli.command, Command::Identities { suite: Suite::Factorization, .. }));
        let cli = parse(&["flow", "--model", "n-plus", "--dt", "0.005"]);
        match cli.command {
            Command::Flow { hamiltonian, t, dt, .. } => assert_eq!((hamiltonian, t, dt), (2, 10.0, 0.005)),
            _ => unreachable!(),
        }
        assert!(Cli::try_parse_from(["pqn", "identities", "--model", "x", "--suite", "nope"]).is_err());
    }

    #[test]
    fn deformed_model_inherits_known_factorization() {
        let src = models::builtin("das-okubo", 2).unwrap();
        let hat = pqn::deform(&src.structure, &src.two_forms["omega1"]).unwrap();
        let out = deformed_model(&src, "omega1", hat).unwrap();
        let minus = models::builtin("n-minus", 2).unwrap();
        assert_eq!(out.name, "das-okubo+omega1");
        assert_eq!(out.scalar("factor_beta"), minus.scalar("factor_beta"));
        assert_eq!(out.scalar("factor_gamma"), minus.scalar("factor_gamma"));
    }

    #[test]
    fn report_json_is_stable() {
        let cli = parse(&["verify", "--model", "n-minus", "--n", "2"]);
        let a = run(&cli).unwrap().to_json();
        let b = run(&cli).unwrap().to_json();
        assert_eq!(a, b);
        assert!(a.ends_with("}\n"));
        assert!(a.contains("\"label\": \"PqN\""));
    }

    #[test]
    fn file_models_reject_particle_number() {
        let cli = parse(&["verify", "--model", "some.json", "--n", "2"]);
        assert_eq!(run(&cli).unwrap_err().exit_code(), 2);
    }
}
