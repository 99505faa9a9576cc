//! Command-line interface: `edist`, `activate`, `witness`, `teleport-sim`
//! and `lemma-check`. Every report embeds a [`RunManifest`].
//!
//! Exit codes: 0 success, 1 error, 2 not found (activation only).

mod report;

use std::ffi::OsString;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::activation::{
    certify_e_bound, run_activation_experiment, witness_from_rho, ActivationOutcome, Budget,
    RhoFamily,
};
use crate::error::{Error, Result};
use crate::filters::{bipartite_matrix, e_d_seesaw, f_d_from_e, SeesawConfig};
use crate::states::StateSpec;
use crate::teleport::{
    average_fidelity_mc, standard_fidelity_closed_form, verify_conclusive_fidelity, TeleportConfig,
};

pub use report::{emit, flatten, render, Format, InputDigest, Report, RunManifest};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_NOT_FOUND: i32 = 2;

#[derive(Debug, Parser, Serialize)]
#[command(
    name = "entangle",
    version,
    about = "Single-copy entanglement fraction, conclusive teleportation and activation experiments"
)]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "ENTANGLE_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Maximum worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Report format; CSV is a flat `key,value` projection of the JSON.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Lower bound on the entanglement fraction E_d by seesaw.
    Edist(EdistArgs),
    /// Search a certified family for a state that sigma activates.
    Activate(ActivateArgs),
    /// Build the witness of a certified rho and evaluate it.
    Witness(WitnessArgs),
    /// Monte Carlo teleportation fidelity through a resource state.
    TeleportSim(TeleportArgs),
    /// Random probes of the separable-map lemmas.
    LemmaCheck(LemmaArgs),
}

/// State given as `kind=K,key=val,...` or as a path to a matrix JSON file.
fn parse_state(s: &str) -> std::result::Result<StateSpec, String> {
    if s.contains("kind=") {
        s.parse().map_err(|e: Error| e.to_string())
    } else {
        Ok(StateSpec::File {
            path: PathBuf::from(s),
        })
    }
}

fn parse_family(s: &str) -> std::result::Result<RhoFamily, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SeesawArgs {
    /// Seesaw starts after the deterministic ones.
    #[arg(long, default_value_t = 64)]
    pub restarts: usize,
    /// Maximum A/B sweeps per start.
    #[arg(long, default_value_t = 500)]
    pub max_iterations: usize,
    /// Convergence threshold on the change per sweep.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Denominator regularization relative to its trace.
    #[arg(long, default_value_t = 1e-12)]
    pub regularization: f64,
}

impl SeesawArgs {
    fn config(&self, seed: u64) -> SeesawConfig {
        SeesawConfig {
            restarts: self.restarts,
            max_iterations: self.max_iterations,
            tolerance: self.tolerance,
            regularization: self.regularization,
            seed,
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct EdistArgs {
    /// State spec (`kind=werner,d=2,mu=0.8`, `kind=file,path=...`) or a path to a matrix JSON file.
    #[arg(long, value_parser = parse_state)]
    pub state: StateSpec,
    /// Target dimension of the maximally entangled state.
    #[arg(long)]
    pub d: usize,
    #[command(flatten)]
    pub seesaw: SeesawArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct ActivateArgs {
    /// State to activate, on `A1 (x) B1`. Same syntax as `edist --state`.
    #[arg(long, value_parser = parse_state)]
    pub sigma: StateSpec,
    /// Threshold in `[1/d, 1)` that the joint entanglement fraction must exceed.
    #[arg(long)]
    pub lambda: f64,
    /// Target dimension.
    #[arg(long)]
    pub d: usize,
    /// `separable`, `schmidt:K` or `ppt-twirled` (default: `ppt-twirled`
    /// for sigma on n x n, else `separable`).
    #[arg(long, value_parser = parse_family)]
    pub family: Option<RhoFamily>,
    /// Independent starts of the family search.
    #[arg(long, default_value_t = 8)]
    pub candidates: usize,
    /// Sweeps per family-search start.
    #[arg(long, default_value_t = 200)]
    pub search_iterations: usize,
    /// Random restarts of the joint seesaw.
    #[arg(long, default_value_t = 8)]
    pub restarts: usize,
    /// Maximum sweeps per joint seesaw start.
    #[arg(long, default_value_t = 300)]
    pub max_iterations: usize,
    /// Joint seesaw convergence threshold.
    #[arg(long, default_value_t = 1e-9)]
    pub tolerance: f64,
    /// Haar product states used to check the witness on separable inputs.
    #[arg(long, default_value_t = 10_000)]
    pub witness_samples: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct WitnessArgs {
    /// Certified state on `A2 A3 B2 B3` (usually a file written by `activate`).
    #[arg(long, value_parser = parse_state)]
    pub rho: StateSpec,
    /// Threshold in `[1/d, 1)`.
    #[arg(long)]
    pub lambda: f64,
    /// Target dimension (size of `A3` and `B3`).
    #[arg(long)]
    pub d: usize,
    /// Optional state to evaluate the witness on.
    #[arg(long, value_parser = parse_state)]
    pub sigma: Option<StateSpec>,
    /// Haar product states used to check nonnegativity.
    #[arg(long, default_value_t = 10_000)]
    pub samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeArg {
    Standard,
    Conclusive,
}

#[derive(Debug, Args, Serialize)]
pub struct TeleportArgs {
    /// Shared resource state. Same syntax as `edist --state`.
    #[arg(long, value_parser = parse_state)]
    pub resource: StateSpec,
    /// Local dimension (default: inferred from the resource).
    #[arg(long)]
    pub d: Option<usize>,
    /// Haar-random input states.
    #[arg(long, default_value_t = 20_000)]
    pub samples: usize,
    /// `conclusive` first applies the seesaw-optimal local filter.
    #[arg(long, value_enum, default_value_t = ModeArg::Standard)]
    pub mode: ModeArg,
    #[command(flatten)]
    pub seesaw: SeesawArgs,
}

#[derive(Debug, Args, Serialize)]
pub struct LemmaArgs {
    /// Local dimension of the probed maps.
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Thresholds for the trace-gap probe.
    #[arg(long, num_args = 1.., default_values_t = vec![0.6])]
    pub lambda: Vec<f64>,
    /// Random maps per threshold.
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    /// Werner weights for the monotonicity probe (none: skipped).
    #[arg(long, num_args = 1..)]
    pub mu: Vec<f64>,
    /// Random maps per Werner weight.
    #[arg(long, default_value_t = 1_000)]
    pub mu_trials: usize,
}

/// Result of executing a command: a complete report and its exit code.
#[derive(Debug)]
pub struct Execution {
    pub report: Report,
    pub exit_code: i32,
}

/// Parses `args` (program name first), runs the command and writes the
/// report. Returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let argv: Vec<String> = argv
        .iter()
        .map(|a| a.to_string_lossy().into_owned())
        .collect();
    match execute(&cli, argv).and_then(|ex| {
        let text = render(&ex.report, cli.format)?;
        emit(&text, cli.output.as_deref())?;
        Ok(ex.exit_code)
    }) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}

/// Runs a parsed command inside a pool capped at `--threads`.
pub fn execute(cli: &Cli, argv: Vec<String>) -> Result<Execution> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cli.threads {
        if t == 0 {
            return Err(Error::arg("--threads must be positive"));
        }
        builder = builder.num_threads(t);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Numerical(e.to_string()))?;
    pool.install(|| {
        let start = Instant::now();
        let (name, body, code, inputs) = match &cli.command {
            Command::Edist(a) => ("edist", cmd_edist(a, cli.seed)?, EXIT_OK, vec![&a.state]),
            Command::Activate(a) => {
                let (body, code) = cmd_activate(a, cli.seed)?;
                ("activate", body, code, vec![&a.sigma])
            }
            Command::Witness(a) => {
                let mut inputs = vec![&a.rho];
                inputs.extend(a.sigma.as_ref());
                ("witness", cmd_witness(a, cli.seed)?, EXIT_OK, inputs)
            }
            Command::TeleportSim(a) => (
                "teleport-sim",
                cmd_teleport(a, cli.seed)?,
                EXIT_OK,
                vec![&a.resource],
            ),
            Command::LemmaCheck(a) => ("lemma-check", cmd_lemma(a, cli.seed)?, EXIT_OK, vec![]),
        };
        let input_digests = inputs
            .into_iter()
            .filter_map(StateSpec::file_path)
            .map(|p| InputDigest::of_file(p))
            .collect::<Result<_>>()?;
        let manifest = RunManifest {
            command: name.to_string(),
            argv,
            config: serde_json::to_value(cli)?,
            seed: cli.seed,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            threads: rayon::current_num_threads(),
            wall_clock_seconds: start.elapsed().as_secs_f64(),
            input_digests,
        };
        Ok(Execution {
            report: Report {
                manifest,
                report: body,
            },
            exit_code: code,
        })
    })
}

fn cmd_edist(a: &EdistArgs, seed: u64) -> Result<Value> {
    let rho = a.state.build()?;
    let res = e_d_seesaw(&rho, a.d, &a.seesaw.config(seed))?;
    let floor = 1.0 / a.d as f64;
    let upper = certify_e_bound(&rho, a.d)?;
    Ok(json!({
        "state": a.state.to_string(),
        "space": rho.space(),
        "d": a.d,
        "e_lower": res.e_lower,
        "f_d": f_d_from_e(res.e_lower, a.d)?,
        "success_probability": res.success_probability,
        "converged": res.converged,
        "certified_upper_bound": upper,
        "diagnostic": if res.e_lower > floor + 1e-9 { "above-separable-floor" } else { "at-separable-floor" },
        "seesaw": res,
    }))
}

fn default_family(sigma: &crate::tensor::DensityOperator) -> Result<RhoFamily> {
    let (_, na, nb) = bipartite_matrix(sigma)?;
    Ok(if na == nb && na >= 2 {
        RhoFamily::PptTwirled
    } else {
        RhoFamily::SeparableFloor
    })
}

fn cmd_activate(a: &ActivateArgs, seed: u64) -> Result<(Value, i32)> {
    let sigma = a.sigma.build()?;
    let family = match a.family {
        Some(f) => f,
        None => default_family(&sigma)?,
    };
    let budget = Budget {
        candidates: a.candidates,
        search_iterations: a.search_iterations,
        seesaw: SeesawConfig {
            restarts: a.restarts,
            max_iterations: a.max_iterations,
            tolerance: a.tolerance,
            seed,
            ..SeesawConfig::default()
        },
    };
    let outcome = run_activation_experiment(&sigma, a.lambda, a.d, family, &budget)?;
    let mut body = json!({
        "sigma": a.sigma.to_string(),
        "lambda": a.lambda,
        "d": a.d,
        "family": family.to_string(),
        "budget": budget,
    });
    let code = match &outcome {
        ActivationOutcome::Found(inst) => {
            let w = inst.witness()?;
            let min_products = w.min_over_products(a.witness_samples, seed);
            let detection = w.detect(&inst.sigma)?;
            body["certificate"] = serde_json::to_value(&inst.e_rho_bound)?;
            body["activation_condition"] = json!(inst.activation_condition);
            body["e_joint_lower"] = json!(inst.e_joint_lower.e_lower);
            body["witness"] = json!({
                "samples": a.witness_samples,
                "min_over_products": min_products,
                "detection_value": detection,
                "detects_sigma": detection < 0.0,
            });
            EXIT_OK
        }
        ActivationOutcome::NotFound(r) => {
            body["activation_condition"] = json!(r.min_activation_condition);
            body["e_joint_lower"] = json!(r.best_e_joint_lower);
            EXIT_NOT_FOUND
        }
    };
    body["result"] = serde_json::to_value(&outcome)?;
    Ok((body, code))
}

fn cmd_witness(a: &WitnessArgs, seed: u64) -> Result<Value> {
    let rho = a.rho.build()?;
    let (_, da, _) = bipartite_matrix(&rho)?;
    if a.d < 2 || da % a.d != 0 {
        return Err(Error::arg(format!(
            "rho's A side (dimension {da}) is not A2 (x) C^{}",
            a.d
        )));
    }
    let w = witness_from_rho(&rho, a.lambda, a.d, da / a.d)?;
    let min_products = w.min_over_products(a.samples, seed);
    let mut body = json!({
        "rho": a.rho.to_string(),
        "lambda": a.lambda,
        "d": a.d,
        "certificate": w.provenance.certificate,
        "samples": a.samples,
        "min_over_products": min_products,
        "witness": w,
    });
    if let Some(spec) = &a.sigma {
        let sigma = spec.build()?;
        let value = w.detect(&sigma)?;
        body["sigma"] = json!(spec.to_string());
        body["detection_value"] = json!(value);
        body["detected"] = json!(value < 0.0);
    }
    Ok(body)
}

fn cmd_teleport(a: &TeleportArgs, seed: u64) -> Result<Value> {
    let resource = a.resource.build()?;
    let (_, da, db) = bipartite_matrix(&resource)?;
    let d = a.d.unwrap_or(da);
    match a.mode {
        ModeArg::Standard => {
            if da != db || da != d {
                return Err(Error::arg(format!(
                    "standard teleportation needs a resource on C^{d} (x) C^{d}, got {da} x {db}"
                )));
            }
            let est =
                average_fidelity_mc(&resource, &TeleportConfig::standard(d, a.samples, seed))?;
            Ok(json!({
                "resource": a.resource.to_string(),
                "mode": "standard",
                "d": d,
                "n_samples": est.n_samples,
                "mean": est.mean,
                "standard_error": est.standard_error,
                "closed_form": standard_fidelity_closed_form(&resource, d)?,
            }))
        }
        ModeArg::Conclusive => {
            let mc = TeleportConfig::standard(d, a.samples, seed);
            let r = verify_conclusive_fidelity(&resource, d, &a.seesaw.config(seed), &mc)?;
            Ok(json!({
                "resource": a.resource.to_string(),
                "mode": "conclusive",
                "d": d,
                "n_samples": r.mc.n_samples,
                "mean": r.mc.mean,
                "standard_error": r.mc.standard_error,
                "predicted": r.predicted_from_filter,
                "predicted_from_e_lower": r.predicted,
                "e_lower": r.e_lower,
                "filter_fidelity": r.filter_fidelity,
                "success_probability": r.success_probability,
                "consistent": r.consistent,
            }))
        }
    }
}

fn cmd_lemma(a: &LemmaArgs, seed: u64) -> Result<Value> {
    use crate::activation::{trace_gap_suite, werner_mu_suite};
    let lemma: Vec<_> = a
        .lambda
        .iter()
        .map(|&l| trace_gap_suite(a.d, l, a.trials, seed))
        .collect::<Result<_>>()?;
    let mu: Vec<_> =
        a.mu.iter()
            .map(|&m| werner_mu_suite(m, a.d, a.mu_trials, seed))
            .collect::<Result<_>>()?;
    let counterexamples: usize = lemma.iter().map(|s| s.counterexamples).sum();
    let violations: usize = mu.iter().map(|s| s.violations).sum();
    Ok(json!({
        "d": a.d,
        "trace_gap": lemma,
        "werner_mu": mu,
        "counterexamples": counterexamples,
        "mu_violations": violations,
        "holds": counterexamples == 0 && violations == 0,
    }))
}
