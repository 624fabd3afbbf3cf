//! Command-line front end for the detsqrt toolkit.
//!
//! Every subcommand prints a short text answer by default and a
//! machine-readable JSON document with `--json`. Exit codes: 0 when a
//! verdict or value was produced (a "composite" verdict is an answer, not an
//! error), 1 on a mathematical failure (reported with a stable error code),
//! 2 on usage errors. All mathematically sized integers are parsed and
//! printed as decimal strings.

use std::process::ExitCode;

use clap::{Parser, Subcommand};
use num_bigint::BigUint;
use serde_json::{json, Map, Value};

use detsqrt::bigring::{Ring, RingError};
use detsqrt::periods::{self, Precision};
use detsqrt::proth::{self, Verdict};
use detsqrt::roots::{self, RootsError, ZetaSpec};
use detsqrt::selftest::{self, SelftestOptions};
use detsqrt::sqrt::{self, Branch, SqrtConfig, SqrtError, SqrtTrace};

#[derive(Parser)]
#[command(
    name = "detsqrt",
    version,
    about = "Deterministic square roots, roots of unity, radical towers, and Proth primality proving over odd moduli"
)]
struct Cli {
    /// Emit a machine-readable JSON document on stdout.
    #[arg(long, global = true)]
    json: bool,
    /// Include the structured algorithm trace in the output.
    #[arg(long, global = true)]
    trace: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Both square roots of beta modulo an odd prime.
    Sqrt {
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        beta: String,
        /// Trial-division bound for factoring modulus-1.
        #[arg(long, default_value_t = 1_000_000)]
        bound: u64,
    },
    /// A primitive root of unity of the given order (an odd prime, or 4).
    Zeta {
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        order: u64,
    },
    /// A cube root modulo a prime p = 1 (mod 4) with p = 4,7 (mod 9).
    Cuberoot {
        #[arg(long)]
        modulus: String,
        #[arg(long)]
        value: String,
    },
    /// Prove or refute primality of a Proth number N = 2^e*t+1, 2^e > t.
    Proth {
        n: String,
        /// Print the certificate witness alongside the verdict.
        #[arg(long)]
        certificate: bool,
    },
    /// The radical tower for zeta_q (q = 2*3^n+1), optionally reduced mod p.
    Periods {
        #[arg(long)]
        q: u64,
        #[arg(long)]
        modulus: Option<String>,
        /// Working precision in bits (ladder doubles up to 4096 on demand).
        #[arg(long, default_value_t = 256)]
        precision: u32,
    },
    /// Run the desk-scale verification suites.
    Selftest {
        #[arg(long, default_value_t = 5000)]
        max_prime: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_proth: u64,
    },
}

/// A mathematical failure with a stable code; always exits 1.
struct MathError {
    code: &'static str,
    message: String,
}

impl MathError {
    fn new(code: &'static str, message: impl Into<String>) -> Self {
        MathError {
            code,
            message: message.into(),
        }
    }
}

fn ring_code(e: &RingError) -> &'static str {
    match e {
        RingError::EvenOrTinyModulus { .. } => "EVEN_OR_TINY_MODULUS",
        RingError::NonInvertible { .. } => "COMPOSITE_DETECTED",
        RingError::EulerAmbiguous { .. } => "COMPOSITE_DETECTED",
    }
}

fn roots_code(e: &RootsError) -> &'static str {
    match e {
        RootsError::OrderDoesNotDivide { .. } => "ORDER_DOES_NOT_DIVIDE",
        RootsError::NoWitnessFound => "COMPOSITE_DETECTED",
        RootsError::PrecondViolated { .. } => "PRECOND_VIOLATED",
        RootsError::NotCubicResidue => "NOT_CUBIC_RESIDUE",
        RootsError::WrongResidueClass => "WRONG_RESIDUE_CLASS",
        RootsError::NotASquare => "NOT_A_SQUARE",
        RootsError::CompositeSignal { .. } => "COMPOSITE_DETECTED",
        RootsError::Ring(e) => ring_code(e),
    }
}

fn sqrt_code(e: &SqrtError) -> &'static str {
    match e {
        SqrtError::NotASquare => "NOT_A_SQUARE",
        SqrtError::NotEasyCase | SqrtError::EasyCaseModulus => "PRECOND_VIOLATED",
        SqrtError::InfeasibleFactorization { .. } => "INFEASIBLE",
        SqrtError::InternalContradiction { .. } => "COMPOSITE_DETECTED",
        SqrtError::Ring(e) => ring_code(e),
        SqrtError::Roots(e) => roots_code(e),
        SqrtError::Periods(e) => periods_code(e),
    }
}

fn periods_code(e: &periods::PeriodsError) -> &'static str {
    match e {
        periods::PeriodsError::NotTowerPrime { .. } => "NOT_TOWER_PRIME",
        periods::PeriodsError::RecognitionFailed { .. } => "RECOGNITION_FAILED",
        periods::PeriodsError::CubeRootsHard => "CUBE_ROOTS_HARD",
        periods::PeriodsError::NoPrimitiveRoot => "NO_PRIMITIVE_ROOT",
        periods::PeriodsError::ModulusInadmissible { .. } => "MODULUS_INADMISSIBLE",
        periods::PeriodsError::ChoiceSpaceTooLarge { .. } => "CHOICE_SPACE_TOO_LARGE",
        periods::PeriodsError::BadPrecision => "PRECOND_VIOLATED",
        periods::PeriodsError::Roots(e) => roots_code(e),
        periods::PeriodsError::Ring(e) => ring_code(e),
    }
}

fn parse_biguint(text: &str, what: &str) -> Result<BigUint, String> {
    text.parse::<BigUint>()
        .map_err(|_| format!("{} must be a decimal integer, got {:?}", what, text))
}

fn make_ring(modulus: &BigUint) -> Result<Ring, MathError> {
    Ring::new(modulus.clone()).map_err(|e| MathError::new(ring_code(&e), e.to_string()))
}

fn trace_value(t: &SqrtTrace) -> Value {
    let mut m = Map::new();
    m.insert("branch".into(), json!(t.branch.to_string()));
    let opt_str = |v: &Option<BigUint>| -> Value {
        v.as_ref().map(|x| json!(x.to_string())).unwrap_or(Value::Null)
    };
    m.insert("cofactor".into(), opt_str(&t.cofactor));
    m.insert("witness".into(), opt_str(&t.witness));
    m.insert(
        "k".into(),
        t.k.map(|k| json!(k.to_string())).unwrap_or(Value::Null),
    );
    m.insert(
        "prime_index".into(),
        t.prime_index
            .map(|i| json!(i.to_string()))
            .unwrap_or(Value::Null),
    );
    m.insert(
        "r".into(),
        t.r.map(|r| json!(r.to_string())).unwrap_or(Value::Null),
    );
    m.insert(
        "j".into(),
        t.j.map(|j| json!(j.to_string())).unwrap_or(Value::Null),
    );
    m.insert(
        "zeta".into(),
        t.zeta
            .as_ref()
            .map(|z| json!(z.to_string()))
            .unwrap_or(Value::Null),
    );
    Value::Object(m)
}

/// Assembles the output document in canonical field order.
fn output_doc(
    command: &str,
    inputs: Value,
    outcome: &Result<(Value, Option<Value>), MathError>,
) -> Value {
    let mut m = Map::new();
    m.insert("command".into(), json!(command));
    m.insert("inputs".into(), inputs);
    match outcome {
        Ok((result, trace)) => {
            m.insert("result".into(), result.clone());
            if let Some(t) = trace {
                m.insert("trace".into(), t.clone());
            }
            m.insert("status".into(), json!("ok"));
        }
        Err(e) => {
            m.insert("status".into(), json!("error"));
            m.insert(
                "error".into(),
                json!({"code": e.code, "message": e.message}),
            );
        }
    }
    Value::Object(m)
}

/// Text lines on success.
type TextLines = Vec<String>;

fn run_sqrt(
    modulus: &str,
    beta: &str,
    bound: u64,
    want_trace: bool,
) -> Result<(Value, Value, Option<Value>, TextLines), MathError> {
    let m = parse_biguint(modulus, "--modulus").map_err(usage)?;
    let b = parse_biguint(beta, "--beta").map_err(usage)?;
    let inputs = json!({
        "modulus": m.to_string(),
        "beta": b.to_string(),
        "bound": bound.to_string(),
    });
    let ring = make_ring(&m)?;
    let config = SqrtConfig {
        bound,
        ..SqrtConfig::default()
    };
    let out = sqrt::sqrt_mod(&ring, &ring.elem(b), &config)
        .map_err(|e| MathError::new(sqrt_code(&e), e.to_string()))?;
    let (lo, hi) = (&out.roots.0, &out.roots.1);
    let result = json!({"roots": [lo.to_string(), hi.to_string()]});
    let mut lines = vec![format!("roots: {} {}", lo, hi)];
    let trace = if want_trace {
        lines.push(format!("branch: {}", out.trace.branch));
        if out.trace.branch != Branch::Easy {
            lines.push(format!(
                "trace: t={} g={} k={} r={} j={} zeta={}",
                out.trace
                    .cofactor
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "-".into()),
                out.trace
                    .witness
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "-".into()),
                out.trace.k.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                out.trace.r.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                out.trace.j.map(|v| v.to_string()).unwrap_or_else(|| "-".into()),
                out.trace
                    .zeta
                    .as_ref()
                    .map(|v| v.to_string())
                    .unwrap_or_else(|| "-".into()),
            ));
        }
        Some(trace_value(&out.trace))
    } else {
        None
    };
    Ok((inputs, result, trace, lines))
}

fn run_zeta(modulus: &str, order: u64) -> Result<(Value, Value, TextLines), MathError> {
    let m = parse_biguint(modulus, "--modulus").map_err(usage)?;
    let inputs = json!({"modulus": m.to_string(), "order": order.to_string()});
    let ring = make_ring(&m)?;
    let spec = ZetaSpec::for_order(ring.modulus(), order)
        .map_err(|e| MathError::new(roots_code(&e), e.to_string()))?;
    let zeta = if order == 4 {
        roots::find_zeta4(&ring, &spec)
    } else {
        roots::find_zeta_r(&ring, &spec)
    }
    .map_err(|e| MathError::new(roots_code(&e), e.to_string()))?;
    // Verify the multiplicative order before reporting it.
    let ok = !zeta.is_one()
        && zeta.pow_u64(order).is_one()
        && (order == 4 && zeta.square().is_minus_one() || order != 4);
    if !ok {
        return Err(MathError::new(
            "COMPOSITE_DETECTED",
            "constructed value does not have the requested order",
        ));
    }
    let result = json!({"zeta": zeta.to_string(), "order": order.to_string()});
    let lines = vec![format!("zeta: {}", zeta), format!("order: {} (verified)", order)];
    Ok((inputs, result, lines))
}

fn run_cuberoot(modulus: &str, value: &str) -> Result<(Value, Value, TextLines), MathError> {
    let m = parse_biguint(modulus, "--modulus").map_err(usage)?;
    let v = parse_biguint(value, "--value").map_err(usage)?;
    let inputs = json!({"modulus": m.to_string(), "value": v.to_string()});
    let ring = make_ring(&m)?;
    let root = roots::cube_root(&ring, &ring.elem(v))
        .map_err(|e| MathError::new(roots_code(&e), e.to_string()))?;
    let result = json!({"root": root.to_string()});
    let lines = vec![format!("root: {}", root)];
    Ok((inputs, result, lines))
}

fn run_proth(n: &str, certificate: bool) -> Result<(Value, Value, TextLines), MathError> {
    let nb = parse_biguint(n, "N").map_err(usage)?;
    let inputs = json!({"n": nb.to_string(), "certificate": certificate});
    let verdict = proth::prove(&nb)
        .map_err(|e| MathError::new("NOT_PROTH_FORM", e.to_string()))?;
    match verdict {
        Verdict::Prime(cert) => {
            debug_assert!(proth::verify_certificate(&cert).unwrap_or(false));
            let mut lines = Vec::new();
            if certificate {
                lines.push(format!("prime, witness {}", cert.witness));
            } else {
                lines.push("prime".to_string());
            }
            let result = json!({
                "verdict": "prime",
                "witness": cert.witness.to_string(),
            });
            Ok((inputs, result, lines))
        }
        Verdict::Composite(reason) => {
            let mut result = Map::new();
            result.insert("verdict".into(), json!("composite"));
            result.insert("step".into(), json!(reason.step));
            result.insert("detail".into(), json!(reason.detail));
            if let Some(f) = &reason.factor {
                result.insert("factor".into(), json!(f.to_string()));
            }
            let mut lines = vec!["composite".to_string()];
            lines.push(format!("reason: {}", reason));
            Ok((inputs, Value::Object(result), lines))
        }
    }
}

fn run_periods(
    q: u64,
    modulus: Option<&str>,
    precision: u32,
) -> Result<(Value, Value, TextLines), MathError> {
    let mut inputs = Map::new();
    inputs.insert("q".into(), json!(q.to_string()));
    if let Some(m) = modulus {
        inputs.insert("modulus".into(), json!(m.to_string()));
    }
    inputs.insert("precision".into(), json!(precision.to_string()));
    let prec = Precision {
        bits: precision,
        ..Precision::default()
    };
    let tower = periods::build_tower(q, &prec)
        .map_err(|e| MathError::new(periods_code(&e), e.to_string()))?;
    let mut lines = vec![
        format!("q: {}", q),
        format!("n: {}", tower.n),
        format!("sigma_base: {}", tower.sigma_base),
        format!("nodes: {}", tower.nodes.len()),
        format!("relations: {}", tower.relations.len()),
    ];
    let mut result = Map::new();
    result.insert("tower".into(), tower.to_json_value());
    if let Some(mtext) = modulus {
        let m = parse_biguint(mtext, "--modulus").map_err(usage)?;
        let ring = make_ring(&m)?;
        let z = periods::eval_mod_p(&tower, &ring)
            .map_err(|e| MathError::new(periods_code(&e), e.to_string()))?;
        lines.push(format!("zeta_{} mod {}: {}", q, m, z));
        result.insert("zeta_mod_p".into(), json!(z.to_string()));
    }
    Ok((Value::Object(inputs), Value::Object(result), lines))
}

fn run_selftest(max_prime: u64, max_proth: u64) -> (Value, Value, TextLines, bool) {
    let inputs = json!({
        "max_prime": max_prime.to_string(),
        "max_proth": max_proth.to_string(),
    });
    let opts = SelftestOptions {
        max_prime,
        max_proth,
    };
    let reports = selftest::run_all(&opts);
    let mut lines = Vec::new();
    let mut suites = Vec::new();
    let mut all_passed = true;
    for r in &reports {
        let status = if r.passed() { "pass" } else { "FAIL" };
        lines.push(format!(
            "suite {:<20} {}  cases={} time={}ms{}",
            r.name,
            status,
            r.cases,
            r.millis,
            if r.gating { "" } else { "  (informational)" }
        ));
        for note in &r.notes {
            lines.push(format!("  {}", note));
        }
        for f in r.failures.iter().take(5) {
            lines.push(format!("  failure: {}", f));
        }
        if r.gating && !r.passed() {
            all_passed = false;
        }
        suites.push(json!({
            "name": r.name,
            "passed": r.passed(),
            "gating": r.gating,
            "cases": r.cases.to_string(),
            "millis": r.millis.to_string(),
            "failures": r.failures,
            "notes": r.notes,
        }));
    }
    lines.push(if all_passed {
        "all suites passed".to_string()
    } else {
        "SELFTEST FAILED".to_string()
    });
    let result = json!({"suites": suites, "all_passed": all_passed});
    (inputs, result, lines, all_passed)
}

/// Usage problems exit 2, like clap's own errors.
fn usage(message: String) -> MathError {
    MathError {
        code: "USAGE",
        message,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, outcome, lines, extra_fail): (
        &str,
        Result<(Value, Option<Value>), MathError>,
        TextLines,
        bool,
    );
    let inputs;
    match &cli.command {
        Command::Sqrt {
            modulus,
            beta,
            bound,
        } => {
            command = "sqrt";
            match run_sqrt(modulus, beta, *bound, cli.trace || cli.json) {
                Ok((i, result, trace, l)) => {
                    inputs = i;
                    outcome = Ok((result, if cli.trace { trace } else { None }));
                    lines = l;
                }
                Err(e) => {
                    inputs = json!({"modulus": modulus, "beta": beta, "bound": bound.to_string()});
                    outcome = Err(e);
                    lines = Vec::new();
                }
            }
            extra_fail = false;
        }
        Command::Zeta { modulus, order } => {
            command = "zeta";
            match run_zeta(modulus, *order) {
                Ok((i, result, l)) => {
                    inputs = i;
                    outcome = Ok((result, None));
                    lines = l;
                }
                Err(e) => {
                    inputs = json!({"modulus": modulus, "order": order.to_string()});
                    outcome = Err(e);
                    lines = Vec::new();
                }
            }
            extra_fail = false;
        }
        Command::Cuberoot { modulus, value } => {
            command = "cuberoot";
            match run_cuberoot(modulus, value) {
                Ok((i, result, l)) => {
                    inputs = i;
                    outcome = Ok((result, None));
                    lines = l;
                }
                Err(e) => {
                    inputs = json!({"modulus": modulus, "value": value});
                    outcome = Err(e);
                    lines = Vec::new();
                }
            }
            extra_fail = false;
        }
        Command::Proth { n, certificate } => {
            command = "proth";
            match run_proth(n, *certificate) {
                Ok((i, result, l)) => {
                    inputs = i;
                    outcome = Ok((result, None));
                    lines = l;
                }
                Err(e) => {
                    inputs = json!({"n": n, "certificate": certificate});
                    outcome = Err(e);
                    lines = Vec::new();
                }
            }
            extra_fail = false;
        }
        Command::Periods {
            q,
            modulus,
            precision,
        } => {
            command = "periods";
            match run_periods(*q, modulus.as_deref(), *precision) {
                Ok((i, result, l)) => {
                    inputs = i;
                    outcome = Ok((result, None));
                    lines = l;
                }
                Err(e) => {
                    inputs = json!({"q": q.to_string(), "precision": precision.to_string()});
                    outcome = Err(e);
                    lines = Vec::new();
                }
            }
            extra_fail = false;
        }
        Command::Selftest {
            max_prime,
            max_proth,
        } => {
            command = "selftest";
            let (i, result, l, all_passed) = run_selftest(*max_prime, *max_proth);
            inputs = i;
            outcome = Ok((result, None));
            lines = l;
            extra_fail = !all_passed;
        }
    }

    // Usage errors exit 2 without a JSON document, mirroring clap.
    if let Err(e) = &outcome {
        if e.code == "USAGE" {
            eprintln!("error: {}", e.message);
            return ExitCode::from(2);
        }
    }

    if cli.json {
        let doc = output_doc(command, inputs, &outcome);
        println!("{}", serde_json::to_string(&doc).expect("serializable"));
    } else {
        match &outcome {
            Ok(_) => {
                for line in &lines {
                    println!("{}", line);
                }
            }
            Err(e) => {
                eprintln!("error[{}]: {}", e.code, e.message);
            }
        }
    }

    match (&outcome, extra_fail) {
        (Err(_), _) => ExitCode::from(1),
        (Ok(_), true) => ExitCode::from(1),
        (Ok(_), false) => ExitCode::SUCCESS,
    }
}
