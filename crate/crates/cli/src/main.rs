//! `cubiclass`: construct cubic number fields whose discriminant lies in a
//! prescribed square class d·Q*² and whose class number is divisible by a
//! chosen odd n, with machine-verifiable certificates for every step.
//!
//! Commands compose the library pipeline:
//!
//! * `construct` — build one instance (d, n, s, a) and report the defining
//!   polynomial, the ramification survey, and the verified facts about the
//!   distinguished element alpha.
//! * `search` — find, for a base parameter ã, the split-prime pairs whose
//!   residue conditions drive the congruence method; resumable and
//!   deterministic.
//! * `solve` — turn a search certificate into a concrete construction
//!   parameter `a` by solving the recorded congruences.
//! * `verify` — produce a class-number divisibility certificate for an
//!   instance (exit 0 only when the claim is certified).
//! * `report` — summarize any produced JSON documents as TSV.
//! * `selftest` — run quick built-in consistency checks.
//!
//! All JSON outputs share an envelope `{schema, meta, body}`; integers are
//! decimal strings; the generation timestamp is confined to `meta` so that
//! bodies are byte-identical across runs with the same configuration. Exit
//! codes: 0 success, 2 parameter/usage error, 3 search or factorization
//! bound exhausted, 4 inconclusive result, 5 internal assertion failure.

use clap::{Args, Parser, Subcommand};
use cubiclass_core::arith::Budget;
use cubiclass_core::cert::{self, Envelope, Meta};
use cubiclass_core::error::{Error, Result};
use cubiclass_core::oracle::{self, DivisibilityCertificate, EvenOrderEvidence, Verdict};
use cubiclass_core::search::{
    self, SearchCertificate, SearchConfig, SearchProgress, TripleOutcome,
};
use cubiclass_core::uchida::{self, Params};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;

const TOOL: &str = concat!("cubiclass ", env!("CARGO_PKG_VERSION"));

#[derive(Parser)]
#[command(
    name = "cubiclass",
    version,
    about = "Cubic fields with prescribed discriminant class and class number divisible by odd n",
    long_about = None
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build one instance and write its report
    Construct(ConstructArgs),
    /// Search split-prime pairs for a base parameter
    Search(SearchArgs),
    /// Solve the congruences recorded in a search certificate
    Solve(SolveArgs),
    /// Produce a class-number divisibility certificate
    Verify(VerifyArgs),
    /// Summarize produced JSON documents as TSV
    Report(ReportArgs),
    /// Run built-in consistency checks
    Selftest,
}

#[derive(Args)]
struct ConstructArgs {
    /// Squarefree negative integer ≡ 1 (mod 4)
    #[arg(long, allow_hyphen_values = true)]
    d: String,
    /// Odd positive target divisor of the class number
    #[arg(long)]
    n: u32,
    /// Power-of-two exponent parameter (1 ≤ s ≤ 30)
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Odd positive construction parameter
    #[arg(long, default_value = "1")]
    a: String,
    /// Factorization budget multiplier
    #[arg(long, default_value_t = 1)]
    effort: u64,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SearchArgs {
    /// Odd positive base parameter ã
    #[arg(long = "a-tilde", default_value = "1")]
    a_tilde: String,
    /// Odd n coprime to 3
    #[arg(long)]
    n: u32,
    /// Power-of-two exponent parameter (1 ≤ s ≤ 30)
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Squarefree integer ≠ 0, 1 (the discriminant class)
    #[arg(long, allow_hyphen_values = true)]
    d: String,
    /// Upper bound on searched primes
    #[arg(long = "q-bound", default_value_t = 1_000_000)]
    q_bound: u64,
    /// Worker threads for segment scanning
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Progress file: loaded when present, updated after the run
    #[arg(long)]
    resume: Option<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    /// Search certificate JSON produced by `search`
    cert: PathBuf,
    /// Number of extra totally-ramified primes to adjoin
    #[arg(long, default_value_t = 0)]
    effort: u64,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Squarefree negative integer ≡ 1 (mod 4)
    #[arg(long, allow_hyphen_values = true)]
    d: String,
    /// Odd positive target divisor of the class number
    #[arg(long)]
    n: u32,
    /// Power-of-two exponent parameter (1 ≤ s ≤ 30)
    #[arg(long, default_value_t = 1)]
    s: u32,
    /// Odd positive construction parameter
    #[arg(long, default_value = "1")]
    a: String,
    /// Lattice enumeration budget per principality test
    #[arg(long, default_value_t = 5_000_000)]
    effort: u64,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Document files to summarize
    files: Vec<PathBuf>,
    /// Output file (stdout when absent)
    #[arg(long)]
    out: Option<PathBuf>,
}

// ---------------------------------------------------------------------------
// Run configuration (hashed into every output's meta block)
// ---------------------------------------------------------------------------

/// Canonical record of the parameters a command ran with. Serializes with
/// every field present so the file form round-trips losslessly; its
/// SHA-256 is embedded in each output document.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct RunConfig {
    command: String,
    d: Option<String>,
    n: Option<String>,
    s: Option<String>,
    a: Option<String>,
    a_tilde: Option<String>,
    q_bound: Option<String>,
    effort: Option<String>,
    workers: Option<String>,
    precision: String,
}

impl RunConfig {
    fn new(command: &str) -> Self {
        RunConfig {
            command: command.into(),
            d: None,
            n: None,
            s: None,
            a: None,
            a_tilde: None,
            q_bound: None,
            effort: None,
            workers: None,
            precision: cubiclass_core::start_precision().to_string(),
        }
    }

    fn hash(&self) -> String {
        let canon = serde_json::to_string(self).expect("config serialization cannot fail");
        let mut h = Sha256::new();
        h.update(canon.as_bytes());
        let digest = h.finalize();
        let mut out = String::with_capacity(64);
        for b in digest {
            out.push_str(&format!("{b:02x}"));
        }
        out
    }
}

fn envelope<T>(schema: &str, config: &RunConfig, body: T) -> Envelope<T> {
    let now = std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0);
    Envelope {
        schema: format!("cubiclass/{schema}/1"),
        meta: Meta {
            tool: TOOL.into(),
            generated_unix: now.to_string(),
            config_hash: config.hash(),
        },
        body,
    }
}

fn emit<T: Serialize>(doc: &Envelope<T>, out: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)
        .map_err(|e| Error::internal(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_text(&text, out)
}

fn write_text(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| Error::parameter(format!("cannot write {}: {e}", path.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Error::internal(format!("stdout write failed: {e}"))),
    }
}

fn parse_big(label: &str, v: &str) -> Result<BigInt> {
    BigInt::from_str(v.trim())
        .map_err(|_| Error::parameter(format!("{label} must be a decimal integer, got {v:?}")))
}

fn exit_for(e: &Error) -> u8 {
    match e {
        Error::Parameter(_) => 2,
        Error::FactorBudget(_) | Error::BoundExhausted(_) => 3,
        Error::Inconclusive(_) | Error::PrecisionExhausted { .. } => 4,
        Error::Internal(_) => 5,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(v) = std::env::var("CUBICLASS_PRECISION") {
        match v.trim().parse::<u32>() {
            Ok(bits) if bits >= 8 => cubiclass_core::set_start_precision(bits),
            _ => {
                eprintln!("error: CUBICLASS_PRECISION must be an integer ≥ 8, got {v:?}");
                return ExitCode::from(2);
            }
        }
    }
    let outcome = match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Search(a) => cmd_search(a),
        Command::Solve(a) => cmd_solve(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Report(a) => cmd_report(a),
        Command::Selftest => cmd_selftest(),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_for(&e))
        }
    }
}

// ---------------------------------------------------------------------------
// construct
// ---------------------------------------------------------------------------

fn cmd_construct(args: ConstructArgs) -> Result<u8> {
    let mut config = RunConfig::new("construct");
    config.d = Some(args.d.clone());
    config.n = Some(args.n.to_string());
    config.s = Some(args.s.to_string());
    config.a = Some(args.a.clone());
    config.effort = Some(args.effort.to_string());

    let d = parse_big("--d", &args.d)?;
    let a = parse_big("--a", &args.a)?;
    let params = Params::new(d, args.n, args.s, a)?;
    let inst = uchida::build_instance(params)?;
    let budget = Budget::default().scaled(args.effort.max(1));
    let report = cert::instance_report(&inst, &budget)?;

    eprintln!("m = {}", report.m);
    eprintln!(
        "totally ramified primes: {} (count {}, genus addendum t = {}){}",
        report.totally_ramified.join(", "),
        report.ramified_count,
        report.genus_exponent_addendum,
        if report.ramification_complete {
            ""
        } else {
            " [factorization incomplete: lower bound]"
        }
    );
    emit(&envelope("instance", &config, report), args.out.as_deref())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// search
// ---------------------------------------------------------------------------

fn cmd_search(args: SearchArgs) -> Result<u8> {
    let mut config = RunConfig::new("search");
    config.a_tilde = Some(args.a_tilde.clone());
    config.n = Some(args.n.to_string());
    config.s = Some(args.s.to_string());
    config.d = Some(args.d.clone());
    config.q_bound = Some(args.q_bound.to_string());
    config.workers = Some(args.workers.to_string());

    let a_tilde = parse_big("--a-tilde", &args.a_tilde)?;
    let d = parse_big("--d", &args.d)?;
    let base = search::build_base(a_tilde, args.n, args.s)?;
    let cfg = SearchConfig {
        q_bound: args.q_bound,
        workers: args.workers.max(1),
        ..SearchConfig::default()
    };

    let mut progress = match &args.resume {
        Some(path) if path.exists() => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::parameter(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str::<SearchProgress>(&text).map_err(|e| {
                Error::parameter(format!("malformed progress file {}: {e}", path.display()))
            })?
        }
        _ => SearchProgress::new(&base, &d, cfg.q_bound, cfg.segment_size),
    };

    let certificate = search::search_pairs(&base, &d, &cfg, &mut progress)?;

    if let Some(path) = &args.resume {
        let mut text = serde_json::to_string_pretty(&progress)
            .map_err(|e| Error::internal(format!("progress serialization failed: {e}")))?;
        text.push('\n');
        std::fs::write(path, text)
            .map_err(|e| Error::parameter(format!("cannot write {}: {e}", path.display())))?;
    }

    // Never emit a certificate that does not re-verify from scratch.
    search::verify_certificate(&base, &d, &certificate)?;

    let mut found = 0usize;
    let mut flagged = 0usize;
    let mut missing = 0usize;
    for rec in &certificate.triples {
        match &rec.outcome {
            TripleOutcome::Pair { .. } => found += 1,
            TripleOutcome::UnsatisfiableQ2 { .. } => flagged += 1,
            TripleOutcome::NotFound { .. } => missing += 1,
        }
    }
    eprintln!(
        "triples: {} found, {} flagged unsatisfiable, {} not found below {}",
        found, flagged, missing, certificate.q_bound
    );
    emit(&envelope("search", &config, certificate), args.out.as_deref())?;
    if missing > 0 {
        eprintln!("hint: raise --q-bound and re-run with the same --resume file");
        return Ok(3);
    }
    Ok(0)
}

// ---------------------------------------------------------------------------
// solve
// ---------------------------------------------------------------------------

/// Body of the `solve` output: the search parameters echoed alongside the
/// congruence solution so the document is self-describing.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SolutionDoc {
    a_tilde: String,
    n: String,
    s: String,
    d: String,
    solution: search::CongruenceSolution,
}

fn read_envelope_body(path: &Path, expect_schema: &str) -> Result<serde_json::Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::parameter(format!("cannot read {}: {e}", path.display())))?;
    let v: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| Error::parameter(format!("malformed JSON in {}: {e}", path.display())))?;
    let schema = v
        .get("schema")
        .and_then(|s| s.as_str())
        .unwrap_or_default()
        .to_string();
    if schema != expect_schema {
        return Err(Error::parameter(format!(
            "{} has schema {:?}, expected {:?}",
            path.display(),
            schema,
            expect_schema
        )));
    }
    v.get("body")
        .cloned()
        .ok_or_else(|| Error::parameter(format!("{} has no body", path.display())))
}

fn cmd_solve(args: SolveArgs) -> Result<u8> {
    let mut config = RunConfig::new("solve");
    config.effort = Some(args.effort.to_string());

    let body = read_envelope_body(&args.cert, "cubiclass/search/1")?;
    let certificate: SearchCertificate = serde_json::from_value(body)
        .map_err(|e| Error::parameter(format!("malformed search certificate: {e}")))?;

    let base = search::build_base(certificate.a_tilde.clone(), certificate.n, certificate.s)?;
    let d = certificate.d.clone();
    // Re-verify the input: solutions must never be derived from an
    // unchecked certificate.
    search::verify_certificate(&base, &d, &certificate)?;

    let sol = search::solve_congruences(&base, &d, &certificate)?;
    let extra = u32::try_from(args.effort.min(8)).unwrap();
    let sol = search::augment_ramification(&sol, &base, &d, extra)?;
    search::verify_solution(&base, &d, &sol)?;

    eprintln!("a = {} (mod {})", sol.a, sol.modulus);
    let doc = SolutionDoc {
        a_tilde: certificate.a_tilde.to_string(),
        n: certificate.n.to_string(),
        s: certificate.s.to_string(),
        d: certificate.d.to_string(),
        solution: sol,
    };
    emit(&envelope("solution", &config, doc), args.out.as_deref())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// verify
// ---------------------------------------------------------------------------

/// Body of the `verify` output: the divisibility certificate plus the
/// report-only evidence about the distinguished ideal of the compositum
/// (no verdict is attached to the latter).
#[derive(Debug, Clone, Serialize, Deserialize)]
struct VerifyDoc {
    certificate: DivisibilityCertificate,
    even_order: Option<EvenOrderEvidence>,
}

fn cmd_verify(args: VerifyArgs) -> Result<u8> {
    let mut config = RunConfig::new("verify");
    config.d = Some(args.d.clone());
    config.n = Some(args.n.to_string());
    config.s = Some(args.s.to_string());
    config.a = Some(args.a.clone());
    config.effort = Some(args.effort.to_string());

    let d = parse_big("--d", &args.d)?;
    let a = parse_big("--a", &args.a)?;
    let params = Params::new(d, args.n, args.s, a)?;
    let inst = uchida::build_instance(params)?;
    let certificate = oracle::certify_instance(&inst, args.effort)?;
    let even_order = uchida::alpha_data(&inst)
        .and_then(|alpha| oracle::even_order_evidence(&inst, &alpha))
        .ok();

    let certified = certificate.verdict == Verdict::Certified;
    eprintln!("{}", certificate.statement);
    let doc = VerifyDoc {
        certificate,
        even_order,
    };
    emit(&envelope("divisibility", &config, doc), args.out.as_deref())?;
    Ok(if certified { 0 } else { 4 })
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

fn tsv_field(v: &serde_json::Value, path: &[&str]) -> String {
    let mut cur = v;
    for p in path {
        match cur.get(p) {
            Some(next) => cur = next,
            None => return String::new(),
        }
    }
    match cur {
        serde_json::Value::String(s) => s.clone(),
        serde_json::Value::Bool(b) => b.to_string(),
        other => other.to_string(),
    }
}

fn cmd_report(args: ReportArgs) -> Result<u8> {
    if args.files.is_empty() {
        return Err(Error::parameter("report needs at least one document file"));
    }
    let mut out = String::new();
    out.push_str("file\tkind\td\tn\ts\ta\ta_tilde\tq_bound\tstatus\tdetail\n");
    for path in &args.files {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::parameter(format!("cannot read {}: {e}", path.display())))?;
        let v: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::parameter(format!("malformed JSON in {}: {e}", path.display())))?;
        let schema = v.get("schema").and_then(|s| s.as_str()).unwrap_or_default();
        let body = v.get("body").cloned().unwrap_or(serde_json::Value::Null);
        let file = path.display().to_string();
        let row = match schema {
            "cubiclass/instance/1" => {
                let detail = format!(
                    "m={} totally_ramified=[{}]",
                    tsv_field(&body, &["m"]),
                    body.get("totally_ramified")
                        .and_then(|t| t.as_array())
                        .map(|a| a
                            .iter()
                            .filter_map(|x| x.as_str())
                            .collect::<Vec<_>>()
                            .join(","))
                        .unwrap_or_default()
                );
                let status = if body
                    .get("ramification_complete")
                    .and_then(|b| b.as_bool())
                    .unwrap_or(false)
                {
                    "ok"
                } else {
                    "partial"
                };
                [
                    file,
                    "instance".into(),
                    tsv_field(&body, &["d"]),
                    tsv_field(&body, &["n"]),
                    tsv_field(&body, &["s"]),
                    tsv_field(&body, &["a"]),
                    String::new(),
                    String::new(),
                    status.into(),
                    detail,
                ]
            }
            "cubiclass/search/1" => {
                let triples = body
                    .get("triples")
                    .and_then(|t| t.as_array())
                    .cloned()
                    .unwrap_or_default();
                let mut found = 0;
                let mut flagged = 0;
                let mut missing = 0;
                for t in &triples {
                    match t
                        .get("outcome")
                        .and_then(|o| o.get("kind"))
                        .and_then(|k| k.as_str())
                    {
                        Some("pair") => found += 1,
                        Some("unsatisfiable-q2") => flagged += 1,
                        _ => missing += 1,
                    }
                }
                let status = if missing == 0 { "complete" } else { "incomplete" };
                [
                    file,
                    "search".into(),
                    tsv_field(&body, &["d"]),
                    tsv_field(&body, &["n"]),
                    tsv_field(&body, &["s"]),
                    String::new(),
                    tsv_field(&body, &["a_tilde"]),
                    tsv_field(&body, &["q_bound"]),
                    status.into(),
                    format!("{found} pairs, {flagged} flagged, {missing} missing"),
                ]
            }
            "cubiclass/solution/1" => [
                file,
                "solution".into(),
                tsv_field(&body, &["d"]),
                tsv_field(&body, &["n"]),
                tsv_field(&body, &["s"]),
                tsv_field(&body, &["solution", "a"]),
                tsv_field(&body, &["a_tilde"]),
                String::new(),
                "verified".into(),
                format!(
                    "modulus={} ram_primes={}",
                    tsv_field(&body, &["solution", "modulus"]),
                    body.get("solution")
                        .and_then(|s| s.get("ramification"))
                        .and_then(|r| r.as_array())
                        .map(|a| a.len())
                        .unwrap_or(0)
                ),
            ],
            "cubiclass/divisibility/1" => {
                let c = body
                    .get("certificate")
                    .cloned()
                    .unwrap_or(serde_json::Value::Null);
                [
                    file,
                    "divisibility".into(),
                    tsv_field(&c, &["d"]),
                    tsv_field(&c, &["n"]),
                    tsv_field(&c, &["s"]),
                    tsv_field(&c, &["a"]),
                    String::new(),
                    String::new(),
                    tsv_field(&c, &["verdict"]),
                    tsv_field(&c, &["statement"]),
                ]
            }
            other => {
                return Err(Error::parameter(format!(
                    "{}: unknown schema {other:?}",
                    path.display()
                )))
            }
        };
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    write_text(&out, args.out.as_deref())?;
    Ok(0)
}

// ---------------------------------------------------------------------------
// selftest
// ---------------------------------------------------------------------------

fn selfcheck(name: &str, ok: bool) -> Result<()> {
    if ok {
        println!("ok {name}");
        Ok(())
    } else {
        Err(Error::internal(format!("selftest failed: {name}")))
    }
}

fn cmd_selftest() -> Result<u8> {
    // Construction fixture: m and the defining polynomial.
    let params = Params::new(BigInt::from(-7), 3, 1, BigInt::from(1))?;
    let inst = uchida::build_instance(params)?;
    selfcheck("construct d=-7 n=3 m=-62505", inst.m == BigInt::from(-62505))?;
    let m = &inst.m;
    let four_m_27 = BigInt::from(4) * m - BigInt::from(27);
    selfcheck(
        "disc(u) = m^2(4m-27)",
        inst.u.discriminant() == m * m * &four_m_27,
    )?;

    // The 3 | d branch: alpha's verified trace and norm facts.
    let params3 = Params::new(BigInt::from(-3), 3, 1, BigInt::from(1))?;
    let inst3 = uchida::build_instance(params3)?;
    let alpha3 = uchida::alpha_data(&inst3)?;
    selfcheck(
        "alpha facts on the 3|d branch",
        alpha3.norm_q == BigInt::from(3).pow(3),
    )?;

    // Base field fixture: m-tilde and the triple grid.
    let base = search::build_base(BigInt::from(1), 5, 1)?;
    selfcheck("base a-tilde=1 n=5 m-tilde=7", base.m_tilde == BigInt::from(7))?;
    selfcheck(
        "triple grid size for n=5",
        search::triple_indices(5).len() == 29,
    )?;
    selfcheck(
        "q=29 splits in the base field",
        search::splits_completely(&base, 29)?.is_some(),
    )?;

    // Class-group oracle on the smallest complex cubic field.
    let k = cubiclass_core::cubic::CubicField::new(
        cubiclass_core::arith::Poly::from_int_vec(vec![-1, -1, 0, 1]),
    )?;
    let cg = oracle::class_group_small(&k, 10_000, 200_000)?;
    selfcheck("class group of x^3-x-1 is trivial", cg.h == 1)?;

    println!("selftest passed");
    Ok(0)
}
