use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use anyhow::{bail, Context as _, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gleason_csm::csm::{
    classical_family, refinement_contradiction_demo, verify_theorem1_with, verify_theorem2_fig1, QuantumSystem,
};
use gleason_csm::frame::{check_frame_condition, check_frame_condition_on, reconstruct_rho_with, FrameFixture};
use gleason_csm::hilbert::{random_basis, unitary_path_to_permutation};
use gleason_csm::pipeline::{exact_step_marginals, run_chains, run_measurement_chain};
use gleason_csm::scalar_lemma::{lemma_report, LemmaVerdict};
use gleason_csm::seed::split;
use gleason_csm::sphere::{build_piron_chain, chain_profile, verify_monotonicity};
use gleason_csm::{
    DensityMatrix, Field, FrameFunction, MeasurementPlan, OrthonormalBasis, Permutation, ScalarCandidate, Tolerances,
    UnitVector, Verdict,
};
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

const SCHEMA: &str = "v1";
const THREADS_VAR: &str = "GLEASON_CSM_THREADS";

#[derive(Parser)]
#[command(name = "gleason-csm", version, about = "Frame-function, descent-chain and contextual measurement experiments")]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// JSON file overriding numerical tolerances.
    #[arg(long, global = true)]
    tolerances: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Reconstruct a density matrix from a frame function.
    GleasonFit {
        #[arg(long)]
        input: PathBuf,
        /// Expected dimension of the function.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Check the frame condition on random bases, or on the stored bases of a table.
    FrameCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1000)]
        bases: usize,
        #[arg(long)]
        seed: u64,
    },
    /// Descent chain from u to v below a pole, as CSV (step,x,y,z,h,f).
    PironDemo {
        #[arg(long, value_parser = parse_vec3)]
        u: [f64; 3],
        #[arg(long, value_parser = parse_vec3)]
        v: [f64; 3],
        #[arg(long, value_parser = parse_vec3, default_value = "0,0,1")]
        pole: [f64; 3],
        #[arg(long, default_value_t = 200)]
        max_len: usize,
        /// Frame function on R^3; defaults to the squared cosine to the pole.
        #[arg(long)]
        input: Option<PathBuf>,
    },
    /// Scalar lemma report for a grid candidate.
    MagicCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Contextual measurement experiments.
    CsmSim {
        #[arg(long, value_enum)]
        experiment: Experiment,
        #[arg(long, default_value_t = 3)]
        dim: usize,
        #[arg(long, value_enum, default_value_t = FieldArg::C)]
        field: FieldArg,
        #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
        #[arg(long)]
        seed: u64,
        /// Contexts in the classical family.
        #[arg(long, default_value_t = 8)]
        contexts: usize,
        /// Also write the frequency table as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Run a measurement plan repeatedly.
    MeasureDemo {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1000, value_parser = clap::value_parser!(u64).range(1..))]
        runs: u64,
        #[arg(long)]
        seed: u64,
        /// Also write per-step frequencies as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Unitary path from the identity to a permutation matrix.
    UnitaryPath {
        /// Images of 0..n, e.g. "1,0,2".
        #[arg(long)]
        perm: String,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        steps: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Experiment {
    Theorem1,
    #[value(name = "theorem2-fig1")]
    Theorem2Fig1,
    Roundtrip,
    Classical,
}

#[derive(Clone, Copy, ValueEnum)]
enum FieldArg {
    R,
    C,
}

impl From<FieldArg> for Field {
    fn from(f: FieldArg) -> Field {
        match f {
            FieldArg::R => Field::Real,
            FieldArg::C => Field::Complex,
        }
    }
}

fn parse_vec3(s: &str) -> std::result::Result<[f64; 3], String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| p.trim().parse::<f64>().map_err(|e| format!("{p:?}: {e}")))
        .collect::<std::result::Result<_, _>>()?;
    parts.try_into().map_err(|v: Vec<f64>| format!("expected 3 components, got {}", v.len()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn load_frame(path: &Path) -> Result<FrameFunction> {
    let fixture: FrameFixture = read_json(path)?;
    Ok(FrameFunction::from_fixture(fixture)?)
}

/// Report with the schema tag; keys come out sorted.
fn tagged(report: impl Serialize) -> Result<Value> {
    let mut v = serde_json::to_value(report)?;
    match v.as_object_mut() {
        Some(map) => {
            map.insert("schema".into(), SCHEMA.into());
            Ok(v)
        }
        None => Ok(json!({ "schema": SCHEMA, "report": v })),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_json(common: &Common, v: &Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(v)?;
    text.push('\n');
    write_out(common.output.as_deref(), &text)
}

fn write_csv(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// Outcome of a subcommand: `true` for a positive verdict.
type Verdicted = Result<bool>;

fn gleason_fit(common: &Common, tol: &Tolerances, input: &Path, dim: Option<usize>, samples: usize, seed: u64) -> Verdicted {
    let f = load_frame(input)?;
    if let Some(d) = dim {
        if d != f.dim() {
            bail!("--dim {d} does not match the function's dimension {}", f.dim());
        }
    }
    let report = reconstruct_rho_with(&f, samples, seed, tol)?;
    let ok = report.verdict == Verdict::Regular;
    let mut v = tagged(&report)?;
    v["function"] = f.name().into();
    v["seed"] = seed.into();
    emit_json(common, &v)?;
    Ok(ok)
}

fn frame_check(common: &Common, tol: &Tolerances, input: &Path, bases: usize, seed: u64) -> Verdicted {
    let f = load_frame(input)?;
    let report = if f.entries().is_some() {
        check_frame_condition_on(&f, &f.stored_bases(bases))?
    } else {
        check_frame_condition(&f, bases, seed)?
    };
    let ok = report.max_deviation <= tol.frame;
    let mut v = tagged(&report)?;
    v["function"] = f.name().into();
    v["pass"] = ok.into();
    emit_json(common, &v)?;
    Ok(ok)
}

fn piron_demo(
    common: &Common,
    u: [f64; 3],
    v: [f64; 3],
    pole: [f64; 3],
    max_len: usize,
    input: Option<&Path>,
) -> Verdicted {
    let (u, v, p) = (UnitVector::real(&u)?, UnitVector::real(&v)?, UnitVector::real(&pole)?);
    let f = match input {
        Some(path) => load_frame(path)?,
        None => FrameFunction::born(DensityMatrix::pure(&p), Field::Real),
    };
    let chain = build_piron_chain(&u, &v, &p, max_len)?;
    let mut csv = String::from("step,x,y,z,h,f\n");
    for s in chain_profile(&f, &chain)? {
        let [x, y, z] = s.vector;
        writeln!(csv, "{},{x},{y},{z},{},{}", s.step, s.h, s.f)?;
    }
    write_out(common.output.as_deref(), &csv)?;
    match verify_monotonicity(&f, &chain) {
        Ok(_) => Ok(true),
        Err(gleason_csm::Error::MonotonicityViolation { step, before, after }) => {
            eprintln!("monotonicity violated at step {step}: {before} -> {after}");
            Ok(false)
        }
        Err(e) => Err(e.into()),
    }
}

fn magic_check(common: &Common, input: &Path) -> Verdicted {
    let c: ScalarCandidate = read_json(input)?;
    let report = lemma_report(&c);
    emit_json(common, &tagged(&report)?)?;
    Ok(report.verdict == LemmaVerdict::Identity)
}

/// The z and x bases of a qubit.
fn qubit_contexts(field: Field) -> Result<(OrthonormalBasis, OrthonormalBasis)> {
    let s = 0.5f64.sqrt();
    let vec = |a: f64, b: f64| match field {
        Field::Real => UnitVector::real(&[a, b]),
        Field::Complex => UnitVector::complex(&[Complex64::new(a, 0.0), Complex64::new(b, 0.0)]),
    };
    let z = OrthonormalBasis::standard(2, field, "z")?;
    let x = OrthonormalBasis::new("x", vec![vec(s, s)?, vec(s, -s)?])?;
    Ok((z, x))
}

#[allow(clippy::too_many_arguments)]
fn csm_sim(
    common: &Common,
    tol: &Tolerances,
    experiment: Experiment,
    dim: usize,
    field: Field,
    trials: usize,
    seed: u64,
    contexts: usize,
    csv: Option<&Path>,
) -> Verdicted {
    let sys = QuantumSystem::new(dim, field)?;
    let random_pair = || -> Result<_> {
        Ok((Arc::new(random_basis(dim, field, split(seed, 0))?), Arc::new(random_basis(dim, field, split(seed, 1))?)))
    };
    let (report, table, pass) = match experiment {
        Experiment::Theorem1 => {
            let (ca, cb) = random_pair()?;
            let r = verify_theorem1_with(&sys, &ca, &cb, trials, split(seed, 2), tol)?;
            let mut t = String::from("from,to,exact,empirical\n");
            for (i, row) in r.exact.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    writeln!(t, "{i},{j},{p},{}", r.empirical[i][j])?;
                }
            }
            (tagged(&r)?, t, r.pass)
        }
        Experiment::Theorem2Fig1 => {
            let r = verify_theorem2_fig1(&sys, trials, seed)?;
            let mut t = String::from("path,exact,empirical\n");
            for k in 0..4 {
                writeln!(t, "{},{},{}", r.labels[k], r.exact[k], r.empirical[k])?;
            }
            for two in [&r.two_step_certain, &r.two_step_generic] {
                writeln!(t, "via {},{},{}", two.via, two.exact, two.empirical)?;
            }
            (tagged(&r)?, t, r.pass)
        }
        Experiment::Roundtrip => {
            let (cu, cv) = if dim == 2 {
                let (z, x) = qubit_contexts(field)?;
                (Arc::new(z), Arc::new(x))
            } else {
                random_pair()?
            };
            let r = refinement_contradiction_demo(&sys, &cu, &cv, trials, split(seed, 2))?;
            let t = format!("quantity,exact,empirical\nreturn,{},{}\n", r.exact_return, r.empirical_return);
            (tagged(&r)?, t, r.pass)
        }
        Experiment::Classical => {
            let r = classical_family(&sys, contexts, seed)?;
            let t = format!("contexts,modalities,classes\n{},{},{}\n", r.contexts, r.modalities, r.classes);
            (tagged(&r)?, t, r.pass)
        }
    };
    let mut report = report;
    report["seed"] = seed.into();
    report["field"] = field.to_string().into();
    emit_json(common, &report)?;
    if let Some(path) = csv {
        write_csv(path, &table)?;
    }
    Ok(pass)
}

fn measure_demo(common: &Common, input: &Path, runs: usize, seed: u64, csv: Option<&Path>) -> Verdicted {
    let plan: MeasurementPlan = read_json(input)?;
    let first = run_measurement_chain(&plan, split(seed, 0))?;
    let stats = run_chains(&plan, runs, seed)?;
    let exact = exact_step_marginals(&plan)?;
    let mut steps = Vec::new();
    let mut table = String::from("step,context,outcome,count,frequency,exact\n");
    for (t, (counts, step)) in stats.steps.iter().zip(&plan.steps).enumerate() {
        let label = step.context.label();
        for (k, &n) in counts.counts.iter().enumerate() {
            writeln!(table, "{t},{label},{k},{n},{},{}", counts.frequency(k), exact[t][k])?;
        }
        steps.push(json!({
            "context": label,
            "counts": counts.counts,
            "frequencies": counts.frequencies(),
            "exact": exact[t],
        }));
    }
    let report = json!({
        "schema": SCHEMA,
        "seed": seed,
        "runs": runs,
        "record": first.record,
        "steps": steps,
        "sequences": stats.sequences,
    });
    emit_json(common, &report)?;
    if let Some(path) = csv {
        write_csv(path, &table)?;
    }
    Ok(true)
}

fn unitary_path(common: &Common, tol: &Tolerances, perm: &str, steps: usize) -> Verdicted {
    let images: Vec<usize> = perm
        .split(',')
        .map(|p| p.trim().parse().with_context(|| format!("bad permutation entry {p:?}")))
        .collect::<Result<_>>()?;
    let perm = Permutation::new(images)?;
    let path = unitary_path_to_permutation(&perm, steps)?;
    let det = path.last().map(|u| u.determinant()).unwrap_or(Complex64::new(1.0, 0.0));
    let max_defect = path.iter().map(|u| u.defect()).fold(0.0, f64::max);
    let max_imaginary = path.iter().map(|u| u.max_imaginary()).fold(0.0, f64::max);
    let ok = max_defect <= tol.on_circle;
    let report = json!({
        "schema": SCHEMA,
        "permutation": perm.as_slice(),
        "sign": perm.sign(),
        "steps": steps,
        "endpoint_det": [det.re, det.im],
        "max_unitarity_defect": max_defect,
        "max_imaginary": max_imaginary,
        "unitary_throughout": ok,
        "path": path,
    });
    emit_json(common, &report)?;
    Ok(ok)
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_VAR) else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().with_context(|| format!("{THREADS_VAR}={raw:?} is not a thread count"))?;
    if n == 0 {
        bail!("{THREADS_VAR} must be at least 1");
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    Ok(())
}

fn run(cli: Cli) -> Verdicted {
    configure_threads()?;
    let tol = match &cli.common.tolerances {
        Some(p) => read_json(p)?,
        None => Tolerances::default(),
    };
    let common = &cli.common;
    match cli.command {
        Command::GleasonFit { input, dim, samples, seed } => gleason_fit(common, &tol, &input, dim, samples, seed),
        Command::FrameCheck { input, bases, seed } => frame_check(common, &tol, &input, bases, seed),
        Command::PironDemo { u, v, pole, max_len, input } => piron_demo(common, u, v, pole, max_len, input.as_deref()),
        Command::MagicCheck { input } => magic_check(common, &input),
        Command::CsmSim { experiment, dim, field, trials, seed, contexts, csv } => {
            csm_sim(common, &tol, experiment, dim, field.into(), trials as usize, seed, contexts, csv.as_deref())
        }
        Command::MeasureDemo { input, runs, seed, csv } => measure_demo(common, &input, runs as usize, seed, csv.as_deref()),
        Command::UnitaryPath { perm, steps } => unitary_path(common, &tol, &perm, steps as usize),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
