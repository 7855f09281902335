//! `powind`: certify, verify and explore linear independence of powers of
//! polynomials. JSON goes to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 success, 1 mathematical negative, 2 usage or parse error,
//! 3 resource budget exhausted.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use powind::cert::{
    certify, lemma2_witness, verify_certificate, Certificate, CertificateDoc, CertifyConfig,
    DEFAULT_MAX_R, SCHEMA_VERSION,
};
use powind::counterexamples::{extension_field_demo, fermat_demo, FermatRing};
use powind::error::Error;
use powind::field::{parse_scalar, FieldElement, FieldSpec};
use powind::oracle::{
    bound_experiment, exponent_profile, ExperimentConfig, FamilyConfig, DEFAULT_TERM_BUDGET,
};
use powind::perm::factorial;
use powind::poly::{family_digest, parse_polynomials, Polynomial};
use powind::witness::{find_witness, WitnessConfig, WitnessSet};

/// Kept in sync with `SCHEMA_VERSION` by a unit test.
const VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), " (json schema 1)");

#[derive(Parser, Debug)]
#[command(name = "powind", version = VERSION, about = "Linear independence of powers of polynomials")]
struct Cli {
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Increase log verbosity on stderr (-v, -vv).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct FamilyArgs {
    /// File with one polynomial per line; `#` starts a comment.
    #[arg(long)]
    polys: PathBuf,

    /// Coefficient field: q, fp:<p> or fpk:<p>:<k>:<c0,...,ck>.
    #[arg(long, default_value = "q")]
    field: String,

    /// Number of variables; inferred from the highest index when omitted.
    #[arg(long)]
    nvars: Option<usize>,
}

#[derive(Args, Debug, Clone)]
struct SearchArgs {
    /// Initial sampling bound over the rationals (default 4r).
    #[arg(long)]
    initial_bound: Option<u64>,

    #[arg(long, default_value_t = WitnessConfig::default().max_attempts_per_point)]
    max_attempts: u32,

    #[arg(long, default_value_t = WitnessConfig::default().max_escalations)]
    max_escalations: u32,
}

impl SearchArgs {
    fn config(&self) -> WitnessConfig {
        WitnessConfig {
            initial_bound: self.initial_bound,
            max_attempts_per_point: self.max_attempts,
            max_escalations: self.max_escalations,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search witness points and certify independence of some power.
    Certify {
        #[command(flatten)]
        family: FamilyArgs,
        /// Generated and recorded in the output when omitted.
        #[arg(long)]
        seed: Option<u64>,
        /// Include the permutation products even for r >= 6.
        #[arg(long)]
        emit_c_values: bool,
        #[arg(long, default_value_t = DEFAULT_MAX_R)]
        max_r: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Recheck a certificate against a family; exit 0 iff it holds.
    Verify {
        #[arg(long)]
        cert: PathBuf,
        #[arg(long)]
        polys: PathBuf,
    },
    /// Find s witness points for a family.
    Witness {
        #[command(flatten)]
        family: FamilyArgs,
        /// Number of points (default r).
        #[arg(long)]
        s: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Decide independence of the e-th powers for e = 1..e_max by exact rank.
    Oracle {
        #[command(flatten)]
        family: FamilyArgs,
        /// Default r!.
        #[arg(long)]
        e_max: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        term_budget: usize,
    },
    /// Compare minimal good exponents with certified ones on random families.
    Experiment {
        #[arg(long)]
        r: usize,
        #[arg(long, default_value_t = 1)]
        nvars: usize,
        #[arg(long, default_value = "q")]
        field: String,
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 3)]
        max_degree: u32,
        #[arg(long, default_value_t = 3)]
        max_terms: usize,
        #[arg(long, default_value_t = 10)]
        coefficient_bound: u64,
        /// Profiles scan up to r! + slack.
        #[arg(long, default_value_t = 2)]
        e_slack: u64,
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        term_budget: usize,
        /// Worker threads; the report does not depend on it.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[command(flatten)]
        search: SearchArgs,
    },
    /// Powers of the variables in k[x_1..x_d]/(x_1^s + ... + x_d^s).
    FermatDemo {
        #[arg(long)]
        d: usize,
        #[arg(long)]
        s: u32,
        #[arg(long, default_value = "q")]
        field: String,
        /// Default s + 2.
        #[arg(long)]
        e_max: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_TERM_BUDGET)]
        term_budget: usize,
    },
    /// Coordinate ranks of powers of r > k elements of F_{p^k}.
    ExtfieldDemo {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        k: usize,
        /// Monic modulus coefficients, constant term first.
        #[arg(long, value_delimiter = ',')]
        modulus: Vec<u64>,
        /// Comma-separated elements such as `1,t,t+1`.
        #[arg(long, value_delimiter = ',')]
        elements: Vec<String>,
        #[arg(long, default_value_t = 12)]
        e_max: u64,
    },
    /// Smallest j with sum_i beta_i * alpha_i^j != 0.
    Lemma2 {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alphas: Vec<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        betas: Vec<String>,
        #[arg(long, default_value = "q")]
        field: String,
    },
}

/// A failed run: exit code, optional JSON for stdout, message for stderr.
#[derive(Debug)]
struct Failure {
    code: u8,
    json: Option<Value>,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            json: None,
            message: message.into(),
        }
    }
}

fn error_kind(e: &Error) -> &'static str {
    match e {
        Error::FamilyInvalid(_) => "family_invalid",
        Error::WitnessInvalid(_) => "witness_invalid",
        Error::SingularMatrix => "singular_matrix",
        Error::MatrixMismatch { .. } => "matrix_mismatch",
        Error::DeterminantMismatch => "determinant_mismatch",
        Error::FamilyMismatch => "family_mismatch",
        Error::BoundViolated { .. } => "bound_violated",
        Error::SearchExhausted { .. } => "search_exhausted",
        Error::TermBudgetExceeded { .. } => "term_budget_exceeded",
        Error::GenerationExhausted { .. } => "generation_exhausted",
        Error::TooManyPolynomials { .. } => "too_many_polynomials",
        _ => "invalid_input",
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::FamilyInvalid(_)
            | Error::WitnessInvalid(_)
            | Error::SingularMatrix
            | Error::MatrixMismatch { .. }
            | Error::DeterminantMismatch
            | Error::FamilyMismatch
            | Error::BoundViolated { .. } => 1,
            Error::SearchExhausted { .. }
            | Error::TermBudgetExceeded { .. }
            | Error::GenerationExhausted { .. }
            | Error::TooManyPolynomials { .. } => 3,
            _ => 2,
        };
        let json = (code != 2).then(|| {
            let mut v = json!({
                "schema_version": SCHEMA_VERSION,
                "status": error_kind(&e),
                "message": e.to_string(),
            });
            let detail = match &e {
                Error::FamilyInvalid(violation) => serde_json::to_value(violation).ok(),
                Error::WitnessInvalid(violation) => serde_json::to_value(violation).ok(),
                _ => None,
            };
            if let Some(d) = detail {
                v["violation"] = d;
            }
            v
        });
        Failure {
            code,
            json,
            message: e.to_string(),
        }
    }
}

type Outcome = std::result::Result<Value, Failure>;

fn read(path: &Path) -> std::result::Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::usage(format!("{}: {e}", path.display())))
}

fn load_family(args: &FamilyArgs) -> std::result::Result<Vec<Polynomial>, Failure> {
    let spec: FieldSpec = args.field.parse()?;
    Ok(parse_polynomials(&read(&args.polys)?, &spec, args.nvars)?)
}

fn seed_or_random(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random();
        log::info!("no --seed given, using {s}");
        s
    })
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize")
}

#[derive(Serialize)]
struct WitnessDoc {
    schema_version: u32,
    field: String,
    eval_field: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    embedding: Option<String>,
    nvars: usize,
    family_digest: String,
    s: usize,
    seed: u64,
    points: Vec<Vec<String>>,
    product_count: String,
    attempts: u64,
    escalations: u32,
}

fn witness_doc(polys: &[Polynomial], w: &WitnessSet) -> WitnessDoc {
    WitnessDoc {
        schema_version: SCHEMA_VERSION,
        field: polys[0].spec().to_string(),
        eval_field: w.eval_spec.to_string(),
        embedding: w.embedding.as_ref().map(|e| e.image().to_string()),
        nvars: polys[0].nvars(),
        family_digest: family_digest(polys),
        s: w.points.len(),
        seed: w.seed,
        points: w
            .points
            .iter()
            .map(|p| p.iter().map(ToString::to_string).collect())
            .collect(),
        product_count: w.product_count.to_string(),
        attempts: w.attempts,
        escalations: w.escalations,
    }
}

fn parse_list(
    spec: &FieldSpec,
    items: &[String],
) -> std::result::Result<Vec<FieldElement>, Failure> {
    Ok(items
        .iter()
        .map(|s| parse_scalar(spec, s.trim()))
        .collect::<powind::error::Result<_>>()?)
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Certify {
            family,
            seed,
            emit_c_values,
            max_r,
            search,
        } => {
            let polys = load_family(&family)?;
            let config = CertifyConfig {
                witness: search.config(),
                max_r,
            };
            let cert = certify(&polys, seed_or_random(seed), &config)?;
            log::info!("certified e = {} with det {}", cert.e, cert.determinant);
            Ok(to_value(&cert.to_doc(&polys, emit_c_values)))
        }
        Command::Verify { cert, polys } => {
            let doc: CertificateDoc = serde_json::from_str(&read(&cert)?)
                .map_err(|e| Failure::usage(format!("{}: {e}", cert.display())))?;
            let spec: FieldSpec = doc.field.parse()?;
            let family = parse_polynomials(&read(&polys)?, &spec, Some(doc.nvars))?;
            let certificate = Certificate::from_doc(&doc)?;
            match verify_certificate(&family, &certificate) {
                Ok(()) => Ok(json!({
                    "schema_version": SCHEMA_VERSION,
                    "verified": true,
                    "e": doc.e,
                    "det": doc.det,
                })),
                Err(e) => {
                    let mut f = Failure::from(e);
                    if let Some(v) = f.json.as_mut() {
                        v["verified"] = Value::Bool(false);
                    }
                    Err(f)
                }
            }
        }
        Command::Witness {
            family,
            s,
            seed,
            search,
        } => {
            let polys = load_family(&family)?;
            let s = s.unwrap_or(polys.len());
            let w = find_witness(&polys, s, seed_or_random(seed), &search.config())?;
            Ok(to_value(&witness_doc(&polys, &w)))
        }
        Command::Oracle {
            family,
            e_max,
            term_budget,
        } => {
            let polys = load_family(&family)?;
            let e_max = e_max.unwrap_or_else(|| factorial(polys.len()));
            Ok(to_value(&exponent_profile(&polys, e_max, term_budget)?))
        }
        Command::Experiment {
            r,
            nvars,
            field,
            trials,
            seed,
            max_degree,
            max_terms,
            coefficient_bound,
            e_slack,
            term_budget,
            jobs,
            search,
        } => {
            let family = FamilyConfig {
                r,
                nvars,
                max_degree,
                max_terms,
                coefficient_bound,
                field: field.parse()?,
            };
            let mut config = ExperimentConfig::new(family, trials, seed_or_random(seed));
            config.e_slack = e_slack;
            config.term_budget = term_budget;
            config.jobs = jobs;
            config.certify.witness = search.config();
            let report = bound_experiment(&config)?;
            let a = &report.aggregates;
            log::info!(
                "{} trials, {} failed, max minimal good {:?}, max certified {:?}",
                trials,
                a.failed,
                a.max_minimal_good,
                a.max_certified_e
            );
            Ok(to_value(&report))
        }
        Command::FermatDemo {
            d,
            s,
            field,
            e_max,
            term_budget,
        } => {
            let ring = FermatRing::new(d, s, field.parse()?)?;
            let rep = fermat_demo(&ring, e_max.unwrap_or(s as u64 + 2), term_budget)?;
            if !rep.checks_pass {
                return Err(Failure {
                    code: 1,
                    json: Some(to_value(&rep)),
                    message: "expected dependence pattern not observed".into(),
                });
            }
            Ok(to_value(&rep))
        }
        Command::ExtfieldDemo {
            p,
            k,
            modulus,
            elements,
            e_max,
        } => {
            if modulus.len() != k + 1 {
                return Err(Failure::usage(format!(
                    "modulus of degree {k} needs {} coefficients, got {}",
                    k + 1,
                    modulus.len()
                )));
            }
            let spec = FieldSpec::extension(p, &modulus)?;
            let elems = parse_list(&spec, &elements)?;
            Ok(to_value(&extension_field_demo(&spec, &elems, e_max)?))
        }
        Command::Lemma2 {
            alphas,
            betas,
            field,
        } => {
            let spec: FieldSpec = field.parse()?;
            let (j, sum) =
                lemma2_witness(&parse_list(&spec, &alphas)?, &parse_list(&spec, &betas)?)?;
            Ok(json!({
                "schema_version": SCHEMA_VERSION,
                "j": j,
                "sum": sum.to_string(),
            }))
        }
    }
}

fn emit(value: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("json values serialize");
    text.push('\n');
    match out {
        Some(path) => fs::write(path, text),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let (value, code) = match run(cli.command) {
        Ok(v) => (Some(v), 0),
        Err(f) => {
            eprintln!("powind: {}", f.message);
            (f.json, f.code)
        }
    };
    if let Some(v) = value {
        if let Err(e) = emit(&v, cli.out.as_deref()) {
            eprintln!("powind: cannot write output: {e}");
            return ExitCode::from(2);
        }
    }
    ExitCode::from(code)
}
