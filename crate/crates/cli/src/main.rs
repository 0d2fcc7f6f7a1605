//! `pmod`: command-line front end for the persistence module toolkit.
//!
//! Exit codes: 0 success, 1 verification failure, 2 malformed input, 3 precondition violation.
//! Diagnostics go to stderr as one JSON object.

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand};
use pmod_construct::ConstructError;
use pmod_core::json::{ModuleJson, MorphismJson};
use pmod_core::rational::{fmt_q, parse_q};
use pmod_core::{CoreError, FieldConfig, GridModule, Q};
use pmod_decomp::DecompError;
use pmod_interleave::{Certificate, CertificateJson, InterleaveError};
use pmod_match::{MatchError, Slot};
use serde::Serialize;
use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "pmod", version, about = "Exact multiparameter persistence modules over finite grids")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check that a module file is well formed and functorial.
    Validate { module: PathBuf },
    /// Split a module into indecomposable summands.
    Decompose {
        module: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the verified isomorphism onto the sum of the summands.
        #[arg(long)]
        emit_proof: Option<PathBuf>,
    },
    /// Tack two indecomposables into one indecomposable within `--delta`.
    Tack {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        delta: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_proof: Option<PathBuf>,
    },
    /// Approximate a module by an indecomposable one within `--eps`.
    ApproxIndec {
        module: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        emit_proof: Option<PathBuf>,
    },
    /// Search for an ε-matching between the decompositions of two modules.
    Match {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        eps: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Whether a module is an indecomposable plus a strictly ε-trivial module.
    EpsIndec {
        module: PathBuf,
        #[arg(long)]
        eps: String,
    },
    /// Tack the summands of a decomposable module and bound the bottleneck distance from below.
    Instability {
        module: PathBuf,
        #[arg(long)]
        delta: String,
    },
    /// Re-verify a certificate or a proof file written by `--emit-proof`.
    Certify {
        proof: PathBuf,
        /// Require the certificate's source to equal this module.
        #[arg(long)]
        source: Option<PathBuf>,
        /// Require the certificate's target to equal this module.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Generate a random valid module.
    Random {
        #[arg(long, default_value_t = 2)]
        params: usize,
        #[arg(long, default_value_t = 4)]
        size: usize,
        #[arg(long, default_value_t = 3)]
        max_dim: usize,
        #[arg(long, default_value_t = 65521)]
        prime: u32,
        #[arg(long, env = "PF_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the gadget module `G`.
    Gadget {
        #[arg(long, default_value_t = 65521)]
        prime: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failure with its exit code.
struct Failure {
    code: u8,
    kind: &'static str,
    err: anyhow::Error,
}

impl Failure {
    fn verification(err: anyhow::Error) -> Self {
        Failure { code: 1, kind: "verification", err }
    }
    fn malformed(err: anyhow::Error) -> Self {
        Failure { code: 2, kind: "malformed-input", err }
    }
    fn precondition(err: anyhow::Error) -> Self {
        Failure { code: 3, kind: "precondition", err }
    }
}

type Res<T> = Result<T, Failure>;

fn core_failure(e: CoreError) -> Failure {
    match e {
        CoreError::Parse(_) => Failure::malformed(e.into()),
        _ => Failure::precondition(e.into()),
    }
}

fn interleave_failure(e: InterleaveError) -> Failure {
    match e {
        InterleaveError::Verification(_) => Failure::verification(e.into()),
        InterleaveError::Core(c) => core_failure(c),
        _ => Failure::precondition(e.into()),
    }
}

fn decomp_failure(e: DecompError) -> Failure {
    match e {
        DecompError::Internal(_) => Failure::verification(e.into()),
        _ => Failure::precondition(e.into()),
    }
}

fn construct_failure(e: ConstructError) -> Failure {
    match e {
        ConstructError::NotIndecomposable(_) => Failure::verification(e.into()),
        ConstructError::Interleave(i) => interleave_failure(i),
        ConstructError::Decomp(d) => decomp_failure(d),
        ConstructError::Core(c) => core_failure(c),
        _ => Failure::precondition(e.into()),
    }
}

fn match_failure(e: MatchError) -> Failure {
    match e {
        MatchError::Interleave(i) => interleave_failure(i),
        MatchError::Decomp(d) => decomp_failure(d),
        MatchError::Construct(c) => construct_failure(c),
        MatchError::Core(c) => core_failure(c),
        _ => Failure::precondition(e.into()),
    }
}

fn read_json(path: &Path) -> Res<Value> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::malformed)?;
    serde_json::from_str(&text)
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(Failure::malformed)
}

fn decode<T: serde::de::DeserializeOwned>(v: Value, what: &str) -> Res<T> {
    serde_json::from_value(v).with_context(|| format!("decoding {what}")).map_err(Failure::malformed)
}

/// Read and validate a module file.
fn read_module(path: &Path) -> Res<Arc<GridModule>> {
    let j: ModuleJson = decode(read_json(path)?, &path.display().to_string())?;
    let m = j.to_module().map_err(|e| Failure::malformed(anyhow!(e).context(format!("module {}", path.display()))))?;
    m.validate()
        .map_err(|v| Failure::malformed(anyhow!("{v}").context(format!("module {} is not a functor", path.display()))))?;
    Ok(Arc::new(m))
}

fn parse_rational(s: &str, flag: &str) -> Res<Q> {
    parse_q(s).map_err(|e| Failure::malformed(anyhow!(e).context(format!("--{flag}"))))
}

fn emit(out: Option<&Path>, v: &impl Serialize) -> Res<()> {
    let text = serde_json::to_string_pretty(v).expect("serializable");
    match out {
        Some(p) => std::fs::write(p, text + "\n")
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::precondition),
        None => {
            // a closed pipe downstream is not an error of ours
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            Ok(())
        }
    }
}

fn module_json(m: &GridModule) -> ModuleJson {
    m.into()
}

fn cert_json(c: &Certificate) -> CertificateJson {
    c.into()
}

fn slot_json(s: Slot) -> Value {
    match s {
        Slot::Summand(i) => json!(i),
        Slot::Zero => Value::Null,
    }
}

fn bound_json(b: &pmod_interleave::Bound) -> Value {
    match b {
        pmod_interleave::Bound::Finite(q) => json!(fmt_q(q)),
        pmod_interleave::Bound::Infinite => json!("inf"),
    }
}

/// Verify one certificate, optionally pinning its end points.
fn check_certificate(c: &Certificate, source: Option<&GridModule>, target: Option<&GridModule>) -> Res<()> {
    c.verify().map_err(interleave_failure)?;
    if let Some(s) = source {
        if !pmod_kan::semantically_equal(c.m(), s) {
            return Err(Failure::verification(anyhow!("certificate source differs from the given module")));
        }
    }
    if let Some(t) = target {
        if !pmod_kan::semantically_equal(c.n(), t) {
            return Err(Failure::verification(anyhow!("certificate target differs from the given module")));
        }
    }
    Ok(())
}

fn run(cmd: Cmd) -> Res<()> {
    match cmd {
        Cmd::Validate { module } => {
            let j: ModuleJson = decode(read_json(&module)?, "module")?;
            let m = j.to_module().map_err(core_failure)?;
            match m.validate() {
                Ok(()) => emit(None, &json!({ "valid": true, "n": m.n(), "vertices": m.grid().num_vertices() })),
                Err(v) => {
                    emit(None, &json!({ "valid": false, "violation": v.to_string() }))?;
                    Err(Failure::verification(anyhow!("{v}")))
                }
            }
        }
        Cmd::Decompose { module, out, emit_proof } => {
            let m = read_module(&module)?;
            if m.is_zero() {
                return emit(out.as_deref(), &json!({ "summands": [] }));
            }
            let d = pmod_decomp::decompose(&m).map_err(decomp_failure)?;
            let summands: Vec<ModuleJson> = d.summands.iter().map(|x| module_json(x)).collect();
            if let Some(p) = emit_proof {
                emit(Some(&p), &json!({ "iso": MorphismJson::from(&d.iso) }))?;
            }
            emit(out.as_deref(), &json!({ "summands": summands }))
        }
        Cmd::Tack { a, b, delta, out, emit_proof } => {
            let delta = parse_rational(&delta, "delta")?;
            let (a, b) = (read_module(&a)?, read_module(&b)?);
            let rep = pmod_construct::tack(&a, &b, &delta).map_err(construct_failure)?;
            rep.certificate.verify().map_err(interleave_failure)?;
            if let Some(p) = emit_proof {
                let stages: Vec<Value> = rep
                    .stages
                    .iter()
                    .map(|(name, st)| json!({ "name": name, "eps": fmt_q(st.certificate.eps()), "certificate": cert_json(&st.certificate) }))
                    .collect();
                emit(Some(&p), &json!({ "eps": fmt_q(rep.certificate.eps()), "certificate": cert_json(&rep.certificate), "stages": stages }))?;
            }
            emit(out.as_deref(), &module_json(&rep.module))
        }
        Cmd::ApproxIndec { module, eps, out, emit_proof } => {
            let eps = parse_rational(&eps, "eps")?;
            let n = read_module(&module)?;
            let a = pmod_construct::approximate_indecomposable(&n, &eps).map_err(construct_failure)?;
            a.certificate.verify().map_err(interleave_failure)?;
            if let Some(p) = emit_proof {
                let steps: Vec<String> = a.steps.iter().map(fmt_q).collect();
                emit(
                    Some(&p),
                    &json!({ "eps": fmt_q(a.certificate.eps()), "summands": a.summands, "steps": steps, "certificate": cert_json(&a.certificate) }),
                )?;
            }
            emit(out.as_deref(), &module_json(&a.module))
        }
        Cmd::Match { a, b, eps, out } => {
            let eps = parse_rational(&eps, "eps")?;
            let (a, b) = (read_module(&a)?, read_module(&b)?);
            let o = pmod_match::bottleneck_upper_bound(&a, &b, &eps).map_err(match_failure)?;
            let pairs: Vec<Value> = o
                .pairs
                .iter()
                .zip(&o.certificates)
                .map(|((l, r), c)| json!({ "left": slot_json(*l), "right": slot_json(*r), "certificate": cert_json(c) }))
                .collect();
            let edges: Vec<Value> = o
                .edges
                .iter()
                .map(|e| json!({ "left": slot_json(e.left), "right": slot_json(e.right), "rank_lower_bound": bound_json(&e.obstruction), "certified": e.certificate.is_some() }))
                .collect();
            emit(
                out.as_deref(),
                &json!({ "eps": fmt_q(&eps), "matched": o.matched, "left_summands": o.left.len(), "right_summands": o.right.len(), "pairs": pairs, "edges": edges }),
            )
        }
        Cmd::EpsIndec { module, eps } => {
            let eps = parse_rational(&eps, "eps")?;
            let m = read_module(&module)?;
            let r = pmod_match::is_eps_indecomposable(&m, &eps).map_err(match_failure)?;
            emit(
                None,
                &json!({ "eps_indecomposable": r.holds, "zero_module": r.zero_module, "nontrivial_summands": r.nontrivial, "trivial_summands": r.trivial.len() }),
            )
        }
        Cmd::Instability { module, delta } => {
            let delta = parse_rational(&delta, "delta")?;
            let m = read_module(&module)?;
            let r = pmod_match::instability_demo(&m, &delta).map_err(match_failure)?;
            let cands: Vec<Value> = r
                .candidates
                .iter()
                .map(|c| json!({ "partner": c.partner, "bound": bound_json(&c.bound) }))
                .collect();
            emit(
                None,
                &json!({
                    "interleaving_upper": fmt_q(r.interleaving_upper()),
                    "bottleneck_lower": bound_json(&r.bottleneck_lower),
                    "gap": r.gap().map(|g| fmt_q(&g)),
                    "candidates": cands,
                    "tacked": module_json(&r.tacked),
                }),
            )
        }
        Cmd::Certify { proof, source, target } => {
            let v = read_json(&proof)?;
            let source = source.map(|p| read_module(&p)).transpose()?;
            let target = target.map(|p| read_module(&p)).transpose()?;
            // a bare certificate, or a proof file with a top-level certificate and optional stages
            let (main, stages) = match v.get("certificate") {
                Some(c) => (c.clone(), v.get("stages").and_then(Value::as_array).cloned().unwrap_or_default()),
                None => (v, vec![]),
            };
            let c = decode::<CertificateJson>(main, "certificate")?.to_certificate().map_err(interleave_failure)?;
            check_certificate(&c, source.as_deref(), target.as_deref())?;
            for (i, st) in stages.iter().enumerate() {
                let sc = st.get("certificate").cloned().ok_or_else(|| Failure::malformed(anyhow!("stage {i} has no certificate")))?;
                let sc = decode::<CertificateJson>(sc, "stage certificate")?.to_certificate().map_err(interleave_failure)?;
                check_certificate(&sc, None, None)?;
            }
            emit(None, &json!({ "verified": true, "eps": fmt_q(c.eps()), "stages": stages.len() }))
        }
        Cmd::Random { params, size, max_dim, prime, seed, out } => {
            if params == 0 || size == 0 {
                return Err(Failure::precondition(anyhow!("--params and --size must be positive")));
            }
            let f = FieldConfig::new(prime).map_err(core_failure)?;
            let m = pmod_core::random::random_module(f, params, size, max_dim, seed);
            emit(out.as_deref(), &module_json(&m))
        }
        Cmd::Gadget { prime, out } => {
            let f = FieldConfig::new(prime).map_err(core_failure)?;
            emit(out.as_deref(), &module_json(&pmod_construct::module_g(f)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let chain: Vec<String> = f.err.chain().map(|e| e.to_string()).collect();
            eprintln!("{}", json!({ "error": f.kind, "message": chain.join(": "), "exit_code": f.code }));
            ExitCode::from(f.code)
        }
    }
}
