//! The `horn` command-line tool.
//!
//! Every subcommand reads JSON inputs, prints one JSON document on
//! standard output and exits with 0 on success, 1 when a certificate
//! reports a failed check, and 2 on usage or input errors. Exact values
//! are printed as strings (`"num/den"`); every document echoes the tool
//! version and the seed in effect.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use horn_core::adisc::{self, PointConfig};
use horn_core::gale;
use horn_core::horn::{self, FactoredMap, HornMap};
use horn_core::linalg::{format_rat, parse_rat, IntMatrix, Rat};
use horn_core::mldeg::{self, MlDegreeOptions, Var};
use horn_core::mle::{self, CountVector, Registry};
use horn_core::poly::{parse_poly, MultiPoly, PolyJson};
use horn_core::random;
use horn_core::Certificate;
use serde::de::DeserializeOwned;
use serde_json::{json, Value};

mod selftest;

pub const DEFAULT_SEED: u64 = random::TEST_SEED;

#[derive(Parser, Debug)]
#[command(
    name = "horn",
    version,
    about = "Horn uniformizations, Gale duality, A-discriminants and ML degrees"
)]
pub struct Cli {
    /// Seed for every randomized check.
    #[arg(long, global = true, env = "HORN_SEED", default_value_t = DEFAULT_SEED)]
    pub seed: u64,

    /// Pairing, torus and smoothness threshold for numeric root pairing.
    #[arg(long, global = true, default_value_t = mldeg::FILTER_TOL)]
    pub tol: f64,

    /// Also write the JSON document to this file.
    #[arg(long, global = true, value_name = "PATH")]
    pub json_out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Gale data (A, Bsat, C) from an exponent matrix, or a kernel basis from A.
    Gale(GaleArgs),
    /// Evaluate a Horn map at a data vector.
    HornEval {
        #[arg(long)]
        map: PathBuf,
        /// Comma-separated rationals, e.g. 4,2,3,1 or 1/2,3.
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// Certify the criticality identities of a Horn map at random data.
    HornCheck {
        #[arg(long)]
        map: PathBuf,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Check at this data vector instead of random ones.
        #[arg(long, allow_hyphen_values = true)]
        u: Option<String>,
    },
    /// Recover Horn data from a map given as products of linear forms.
    Recognize {
        #[arg(long)]
        factored: PathBuf,
    },
    /// Push a Horn map forward along v -> Cv.
    Pushforward {
        #[arg(long)]
        map: PathBuf,
        #[arg(long = "C", alias = "c")]
        c: PathBuf,
    },
    /// A-discriminant parametrizations and polynomials.
    #[command(subcommand)]
    Adisc(AdiscCommand),
    /// ML degree of a plane curve.
    Mldeg(MldegArgs),
    /// Closed-form maximum likelihood estimate for a registered model.
    Mle(MleArgs),
    /// Run the built-in example checks.
    Selftest,
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct GaleArgs {
    /// Exponent matrix with zero column sums.
    #[arg(long = "B", alias = "b")]
    b: Option<PathBuf>,
    /// Point configuration with all-ones first row.
    #[arg(long = "A", alias = "a")]
    a: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
pub enum AdiscCommand {
    /// Coefficients singular at (1, t) from kernel coordinates v.
    Param {
        #[arg(long = "A", alias = "a")]
        a: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Non-homogeneous torus coordinates (may be empty when k = 1).
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        t: String,
    },
    /// Discriminant polynomial of a one-variable family (k = 2).
    Poly {
        #[arg(long = "A", alias = "a")]
        a: PathBuf,
        #[arg(long, default_value_t = 20)]
        samples: usize,
    },
    /// The reduced point (ℬv)^ℬ.
    Reduced {
        #[arg(long = "A", alias = "a")]
        a: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
    },
}

#[derive(Args, Debug)]
pub struct MldegArgs {
    /// Polynomial JSON in two variables.
    #[arg(long, required_unless_present = "expr", conflicts_with = "expr")]
    f: Option<PathBuf>,
    /// The curve as an expression in p1, p2, e.g. "p1^2 + p2^2 - 1".
    #[arg(long)]
    expr: Option<String>,
    /// Number of random data vectors.
    #[arg(long, default_value_t = mldeg::DEFAULT_DRAWS)]
    trials: usize,
    #[arg(long, value_enum, default_value_t = ElimVar::P2)]
    eliminate: ElimVar,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
pub enum ElimVar {
    P1,
    P2,
}

#[derive(Args, Debug)]
pub struct MleArgs {
    #[arg(long)]
    model: String,
    /// Nonnegative integer counts, comma-separated.
    #[arg(long)]
    u: String,
    /// JSON list of models to use instead of the built-in registry.
    #[arg(long)]
    registry: Option<PathBuf>,
    /// Also compare log-likelihoods with random model points.
    #[arg(long)]
    compare: bool,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<horn_core::Error> for Failure {
    fn from(e: horn_core::Error) -> Self {
        Failure::input(e.to_string())
    }
}

type CmdResult = Result<(Value, bool), Failure>;

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    let name = command_name(&cli.command);
    let (mut doc, code, stderr) = match execute(&cli) {
        Ok((payload, ok)) => (payload, if ok { 0 } else { 1 }, String::new()),
        Err(f) => (
            json!({ "error": f.message }),
            f.code,
            format!("error: {}\n", f.message),
        ),
    };
    let obj = doc.as_object_mut().expect("documents are objects");
    obj.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    obj.insert("seed".into(), json!(cli.seed));
    obj.insert("command".into(), json!(name));
    let mut stdout = serde_json::to_string_pretty(&doc).expect("serializable");
    stdout.push('\n');
    if let Some(path) = &cli.json_out {
        if let Err(e) = fs::write(path, &stdout) {
            return Outcome {
                code: 2,
                stdout,
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            };
        }
    }
    Outcome {
        code,
        stdout,
        stderr,
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Gale(_) => "gale",
        Command::HornEval { .. } => "horn-eval",
        Command::HornCheck { .. } => "horn-check",
        Command::Recognize { .. } => "recognize",
        Command::Pushforward { .. } => "pushforward",
        Command::Adisc(AdiscCommand::Param { .. }) => "adisc param",
        Command::Adisc(AdiscCommand::Poly { .. }) => "adisc poly",
        Command::Adisc(AdiscCommand::Reduced { .. }) => "adisc reduced",
        Command::Mldeg(_) => "mldeg",
        Command::Mle(_) => "mle",
        Command::Selftest => "selftest",
    }
}

// ---- input helpers

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let src = fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&src).map_err(|e| Failure::input(format!("{}: {e}", path.display())))
}

fn parse_rats(s: &str) -> Result<Vec<Rat>, Failure> {
    if s.trim().is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| parse_rat(x.trim()).map_err(Failure::from))
        .collect()
}

fn rat_strings(v: &[Rat]) -> Vec<String> {
    v.iter().map(format_rat).collect()
}

fn cert_json(c: &Certificate) -> Value {
    json!({ "passed": c.passed(), "checks": c.checks })
}

fn poly_json(p: &MultiPoly, names: &[String]) -> Value {
    json!({
        "text": p.display_with(names).to_string(),
        "poly": PolyJson::from_poly(p, names),
    })
}

// ---- commands

fn execute(cli: &Cli) -> CmdResult {
    match &cli.command {
        Command::Gale(args) => cmd_gale(args),
        Command::HornEval { map, u } => {
            let h: HornMap = read_json(map)?;
            h.validate()?;
            let psi = h.eval(&parse_rats(u)?)?;
            Ok((json!({ "psi": rat_strings(&psi) }), true))
        }
        Command::HornCheck { map, trials, u } => {
            cmd_horn_check(map, *trials, u.as_deref(), cli.seed)
        }
        Command::Recognize { factored } => {
            let f: FactoredMap = read_json(factored)?;
            let h = horn::recognize(&f)?;
            Ok((json!({ "recognized": h.is_some(), "map": h }), true))
        }
        Command::Pushforward { map, c } => cmd_pushforward(map, c, cli.seed),
        Command::Adisc(sub) => cmd_adisc(sub, cli.seed),
        Command::Mldeg(args) => cmd_mldeg(args, cli.seed, cli.tol),
        Command::Mle(args) => cmd_mle(args, cli.seed),
        Command::Selftest => {
            let cert = selftest::run(cli.seed);
            let ok = cert.passed();
            Ok((
                json!({ "certificate": cert_json(&cert), "count": cert.checks.len() }),
                ok,
            ))
        }
    }
}

fn cmd_gale(args: &GaleArgs) -> CmdResult {
    if let Some(path) = &args.b {
        let b: IntMatrix = read_json(path)?;
        let g = gale::gale_from_B(&b)?;
        let cert = gale::verify_exactness(&g);
        let ok = cert.passed();
        return Ok((
            json!({
                "gale": g,
                "k": g.k(),
                "certificate": cert_json(&cert),
                "conventions": "A is the all-ones row followed by the Hermite normal form of the remaining rows; Bsat is Hermite-normalized",
            }),
            ok,
        ));
    }
    let path = args.a.as_ref().expect("clap enforces one of --B, --A");
    let a: IntMatrix = read_json(path)?;
    let k = gale::kernel_gale(&a)?;
    let sums_zero = k.column_sums().iter().all(num_traits::Zero::is_zero);
    let mut cert = Certificate::new();
    cert.check("A·ℬ = 0", a.mul(&k).map(|p| p.is_zero()).unwrap_or(false));
    cert.check("columns of ℬ sum to zero", sums_zero);
    cert.check(
        "SNF(ℬ) has all invariant factors 1",
        k.cols() == 0 || horn_core::linalg::all_invariant_factors_one(&k),
    );
    let ok = cert.passed();
    Ok((
        json!({
            "kernel": k,
            "certificate": cert_json(&cert),
            "conventions": "columns form a Hermite-normalized lattice basis of ker A",
        }),
        ok,
    ))
}

fn cmd_horn_check(map: &Path, trials: usize, u: Option<&str>, seed: u64) -> CmdResult {
    let h: HornMap = read_json(map)?;
    let mut cert = Certificate::new();
    cert.check_with(
        "map satisfies the Horn invariants",
        h.is_valid(),
        h.validate()
            .err()
            .map_or_else(|| "ok".to_string(), |e| e.to_string()),
    );
    let checked = match u {
        Some(u) => horn::certify_criticality(&h, &parse_rats(u)?)?,
        None => horn::certify_random(&h, trials, seed)?,
    };
    cert.absorb("", checked);
    let ok = cert.passed();
    Ok((
        json!({
            "certificate": cert_json(&cert),
            "trials": if u.is_some() { 1 } else { trials },
        }),
        ok,
    ))
}

fn cmd_pushforward(map: &Path, c: &Path, seed: u64) -> CmdResult {
    let h: HornMap = read_json(map)?;
    h.validate()?;
    let c: IntMatrix = read_json(c)?;
    let pushed = horn::pushforward(&h, &c)?;
    let mut rng = random::rng(seed);
    let mut agree = true;
    for _ in 0..5 {
        let v = horn::random_point_off_base_locus(&mut rng, &[&pushed], -20, 20)?;
        let cv = c.mul_rat_vec(&v)?;
        let lhs = horn_core::monomial::monomial_apply(&c, &h.eval(&cv)?)?;
        agree &= lhs == pushed.eval(&v)?;
    }
    let mut cert = Certificate::new();
    cert.check_with(
        "commuting diagram: (Psi(Cv))^C = Psi'(v)",
        agree,
        "5 seeded data vectors",
    );
    let ok = cert.passed();
    Ok((
        json!({ "map": pushed, "certificate": cert_json(&cert) }),
        ok,
    ))
}

fn cmd_adisc(sub: &AdiscCommand, seed: u64) -> CmdResult {
    match sub {
        AdiscCommand::Param { a, v, t } => {
            let p: PointConfig = read_json(a)?;
            let (q, cert) = adisc::singular_point_param(&p, &parse_rats(v)?, &parse_rats(t)?)?;
            let ok = cert.passed();
            Ok((
                json!({ "q": rat_strings(&q), "certificate": cert_json(&cert) }),
                ok,
            ))
        }
        AdiscCommand::Poly { a, samples } => {
            let p: PointConfig = read_json(a)?;
            let d = adisc::discriminant_univariate(&p)?;
            let names: Vec<String> = (1..=p.n()).map(|i| format!("q{i}")).collect();
            let dnames: Vec<String> = d.exponents.iter().map(|e| format!("c{e}")).collect();
            let cert = adisc::discriminant_vanishes(&p, &d.poly, *samples, seed)?;
            let ok = cert.passed();
            Ok((
                json!({
                    "discriminant": poly_json(&d.poly, &names),
                    "distinct_exponents": d.exponents,
                    "distinct_discriminant": poly_json(&d.distinct, &dnames),
                    "certificate": cert_json(&cert),
                    "conventions": "sign (-1)^(D(D-1)/2) Res_t(F, F'); monomial and rational content removed; not certified irreducible",
                }),
                ok,
            ))
        }
        AdiscCommand::Reduced { a, v } => {
            let p: PointConfig = read_json(a)?;
            let point = adisc::reduced_horn_point(&p, &parse_rats(v)?)?;
            Ok((
                json!({ "point": rat_strings(&point), "kernel": p.kernel() }),
                true,
            ))
        }
    }
}

fn cmd_mldeg(args: &MldegArgs, seed: u64, tol: f64) -> CmdResult {
    let names = vec!["p1".to_string(), "p2".to_string()];
    let f = match (&args.f, &args.expr) {
        (Some(path), _) => {
            let pj: PolyJson = read_json(path)?;
            if pj.vars.len() != 2 {
                return Err(Failure::input(format!(
                    "a plane curve needs 2 variables, got {}",
                    pj.vars.len()
                )));
            }
            pj.to_poly()?
        }
        (None, Some(e)) => parse_poly(e, &names)?,
        (None, None) => unreachable!("clap requires --f or --expr"),
    };
    if args.trials == 0 {
        return Err(Failure::input("--trials must be positive"));
    }
    let opts = MlDegreeOptions {
        draws: args.trials,
        tol,
        eliminate: match args.eliminate {
            ElimVar::P1 => Var::P1,
            ElimVar::P2 => Var::P2,
        },
    };
    let report = mldeg::ml_degree_plane(&f, seed, opts)?;
    let ok = report.ml_degree.is_some();
    Ok((
        json!({
            "curve": f.display_with(&names).to_string(),
            "ml_degree": report.ml_degree,
            "agreeing_draws": report.agreeing_draws,
            "stable": report.stable,
            "rule": report.rule,
            "draws": report.draws,
            "solutions": report.solutions(),
        }),
        ok,
    ))
}

fn cmd_mle(args: &MleArgs, seed: u64) -> CmdResult {
    let registry = match &args.registry {
        Some(path) => {
            let src = fs::read_to_string(path)
                .map_err(|e| Failure::input(format!("cannot read {}: {e}", path.display())))?;
            Registry::from_json(&src)?
        }
        None => Registry::builtin(),
    };
    let model = registry.get(&args.model).ok_or_else(|| {
        Failure::input(format!(
            "unknown model {:?}; available: {}",
            args.model,
            registry.names().join(", ")
        ))
    })?;
    let counts = args
        .u
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<u64>()
                .map_err(|_| Failure::input(format!("bad count {x:?}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let u = CountVector::new(counts)?;
    let est = mle::estimate(model, &u)?;
    let mut ok = est.certificate.passed() && est.on_model && est.critical;
    if model.simplex {
        ok &= est.simplex;
    }
    let mut doc = json!({
        "model": model.name,
        "p_hat": rat_strings(&est.p_hat),
        "simplex": est.simplex,
        "on_model": est.on_model,
        "critical": est.critical,
        "certificate": cert_json(&est.certificate),
    });
    if args.compare {
        let (cert, report) = mle::loglik_compare(model, &u, &est.p_hat, seed)?;
        ok &= cert.passed();
        doc["loglik"] = json!({ "report": report, "certificate": cert_json(&cert) });
    }
    Ok((doc, ok))
}
