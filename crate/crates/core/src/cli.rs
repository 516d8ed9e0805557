//! Command-line front end and report formats.
//!
//! Exit codes: 0 when everything checked passes, 1 on a statistical or
//! exact failure, 2 on usage errors (bad flags, out-of-range parameters,
//! unreadable or malformed inputs).

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::duality::{
    eq2_eq3_pointwise, expect_identity_eq3, expect_identity_eq4, inclusion_exclusion_check,
    verify_involution, MomentKind, MomentVector,
};
use crate::error::Error;
use crate::exactsym::{probe_values, rational, verify_generating_function, verify_proposition, verify_recurrence, Rational, SymReport};
use crate::geometry::ConvexBody;
use crate::montecarlo::{check_identity, with_workers, IdentityKind, IdentityReport, Mode};
use crate::oracle::{compute_ev3_ratio, interval_ev2_entry, interval_vertex_law, interval_volume_moment, Registry};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Environment variable supplying the default master seed.
pub const SEED_ENV: &str = "EFRON_DUAL_SEED";
const BUILTIN_SEED: u64 = 1;

#[derive(Parser, Debug)]
#[command(name = "efron-dual", version, about = "Verify volume/vertex-count duality identities for random polytopes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact checks of the symmetric-polynomial decomposition, recurrence and generating function.
    VerifySym {
        #[arg(long)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Exact checks of the involution, the pointwise product/factorial identity and round trips.
    VerifyDual {
        #[arg(long)]
        k_max: usize,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Monte Carlo check of one identity instance.
    Check(Box<CheckArgs>),
    /// Merge report files into one document.
    Report {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
        inputs: Vec<PathBuf>,
    },
    /// Recompute the planar reference constants by quadrature and simulation.
    Oracle {
        #[arg(long, default_value_t = 48)]
        nodes: usize,
        #[arg(long, default_value_t = 20_000_000)]
        reps: u64,
        #[arg(long, default_value_t = 20240901)]
        seed: u64,
        /// Write the registry here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args, Debug, Default)]
struct CheckArgs {
    /// Flat `key = value` file; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    identity: Option<String>,
    #[arg(long)]
    body: Option<String>,
    #[arg(long)]
    n: Option<u64>,
    #[arg(long)]
    k: Option<u64>,
    #[arg(long)]
    m: Option<u64>,
    #[arg(long)]
    j: Option<u64>,
    #[arg(long)]
    reps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    tolerance_sigma: Option<f64>,
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the replication loop (results do not depend on it).
    #[arg(long)]
    workers: Option<usize>,
}

/// Fully resolved parameters of a `check` run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub identity: IdentityKind,
    pub body: ConvexBody,
    pub first: u64,
    pub second: u64,
    pub reps: u64,
    pub seed: u64,
    pub mode: Mode,
    pub tolerance_sigma: f64,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub workers: Option<usize>,
}

/// Parses a flat `key = value` config file. `#` starts a comment line.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, Error> {
    let mut out = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("config line {}: expected key = value", i + 1)))?;
        out.insert(key.trim().replace('_', "-"), value.trim().to_string());
    }
    Ok(out)
}

fn usage(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}

impl CheckArgs {
    fn resolve(self, env_seed: Option<String>) -> Result<RunConfig, Error> {
        let file = match &self.config {
            Some(path) => parse_config(
                &fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?,
            )?,
            None => BTreeMap::new(),
        };
        let known = [
            "identity", "body", "n", "k", "m", "j", "reps", "seed", "mode", "tolerance-sigma",
            "format", "out", "workers",
        ];
        if let Some(bad) = file.keys().find(|k| !known.contains(&k.as_str())) {
            return Err(usage(format!("unknown config key {bad:?}")));
        }
        let from_file = |key: &str| file.get(key).cloned();
        fn num<T: std::str::FromStr>(key: &str, v: Option<String>) -> Result<Option<T>, Error> {
            v.map(|s| s.parse::<T>().map_err(|_| usage(format!("bad value for {key}: {s:?}"))))
                .transpose()
        }

        let identity: IdentityKind = self
            .identity
            .or_else(|| from_file("identity"))
            .ok_or_else(|| usage("--identity is required"))?
            .parse()?;
        let body: ConvexBody = self
            .body
            .or_else(|| from_file("body"))
            .ok_or_else(|| usage("--body is required"))?
            .parse()?;
        let n = self.n.map(Ok).or_else(|| num("n", from_file("n")).transpose()).transpose()?;
        let k = self.k.map(Ok).or_else(|| num("k", from_file("k")).transpose()).transpose()?;
        let m = self.m.map(Ok).or_else(|| num("m", from_file("m")).transpose()).transpose()?;
        let j = self.j.map(Ok).or_else(|| num("j", from_file("j")).transpose()).transpose()?;
        let (first, second) = if identity == IdentityKind::Thm2DirectVsRatio {
            (
                m.or(n).ok_or_else(|| usage("--m is required"))?,
                j.or(k).ok_or_else(|| usage("--j is required"))?,
            )
        } else {
            if m.is_some() || j.is_some() {
                return Err(usage(format!("{identity} takes --n and --k, not --m/--j")));
            }
            (n.ok_or_else(|| usage("--n is required"))?, k.unwrap_or(1))
        };
        let reps = match self.reps {
            Some(r) => r,
            None => num("reps", from_file("reps"))?.unwrap_or(100_000),
        };
        let seed = match self.seed {
            Some(s) => s,
            None => match num("seed", from_file("seed"))? {
                Some(s) => s,
                None => num(SEED_ENV, env_seed)?.unwrap_or(BUILTIN_SEED),
            },
        };
        let mode: Mode = self
            .mode
            .or_else(|| from_file("mode"))
            .map(|s| s.parse())
            .transpose()?
            .unwrap_or(Mode::Coupled);
        let tolerance_sigma = match self.tolerance_sigma {
            Some(t) => t,
            None => num("tolerance-sigma", from_file("tolerance-sigma"))?.unwrap_or(4.0),
        };
        let format = match self.format.or_else(|| from_file("format")).as_deref() {
            None | Some("json") => Format::Json,
            Some("csv") => Format::Csv,
            Some(other) => return Err(usage(format!("unknown format {other:?}"))),
        };
        let out = self.out.or_else(|| from_file("out").map(PathBuf::from));
        let workers = match self.workers {
            Some(w) => Some(w),
            None => num("workers", from_file("workers"))?,
        };
        Ok(RunConfig {
            identity,
            body,
            first,
            second,
            reps,
            seed,
            mode,
            tolerance_sigma,
            format,
            out,
            workers,
        })
    }
}

pub const CSV_HEADER: [&str; 19] = [
    "identity", "body", "mode", "n", "k", "m", "j", "lhs_mean", "lhs_stderr", "lhs_reps",
    "rhs_mean", "rhs_stderr", "rhs_reps", "z_score", "tolerance_sigma", "pass", "master_seed",
    "artifact_version", "exact_target",
];

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Reports as a JSON array, pretty-printed, with a trailing newline.
pub fn reports_to_json(reports: &[IdentityReport]) -> String {
    let mut s = serde_json::to_string_pretty(reports).expect("reports serialize");
    s.push('\n');
    s
}

/// One report as a pretty JSON object with a trailing newline.
pub fn report_to_json(report: &IdentityReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report serializes");
    s.push('\n');
    s
}

pub fn reports_to_csv(reports: &[IdentityReport]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER).expect("in-memory write");
    for r in reports {
        let p = &r.parameters;
        let z = if r.z_score.is_finite() { r.z_score.to_string() } else { "inf".into() };
        w.write_record([
            r.identity.to_string(),
            r.body.clone(),
            r.mode.to_string(),
            opt(p.n),
            opt(p.k),
            opt(p.m),
            opt(p.j),
            r.lhs.mean.to_string(),
            r.lhs.stderr.to_string(),
            r.lhs.replications.to_string(),
            r.rhs.mean.to_string(),
            r.rhs.stderr.to_string(),
            r.rhs.replications.to_string(),
            z,
            r.tolerance_sigma.to_string(),
            r.pass.to_string(),
            r.master_seed.to_string(),
            r.artifact_version.clone(),
            opt(r.exact_target),
        ])
        .expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("utf-8")
}

/// Reads a report file holding either one report object or an array.
pub fn read_reports(path: &Path) -> Result<Vec<IdentityReport>, Error> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    let parsed = if value.is_array() {
        serde_json::from_value(value)
    } else {
        serde_json::from_value(value).map(|r| vec![r])
    };
    parsed.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
}

fn emit(out: &mut dyn Write, path: Option<&Path>, text: &str) -> Result<(), Error> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| usage(format!("{}: {e}", p.display()))),
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| usage(format!("stdout: {e}"))),
    }
}

/// Pass/fail tally of one suite.
#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize)]
pub struct SuiteSummary {
    pub suite: String,
    pub cases: usize,
    pub failures: usize,
}

impl SuiteSummary {
    fn from_checks(suite: &str, results: impl IntoIterator<Item = bool>) -> Self {
        let (mut cases, mut failures) = (0, 0);
        for ok in results {
            cases += 1;
            failures += usize::from(!ok);
        }
        SuiteSummary {
            suite: suite.into(),
            cases,
            failures,
        }
    }

    fn from_report(r: &SymReport) -> Self {
        Self::from_checks(&r.suite, r.checks.iter().map(|c| c.pass))
    }
}

fn print_summaries(out: &mut dyn Write, format: Format, summaries: &[SuiteSummary]) -> Result<(), Error> {
    let text = match format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(summaries).expect("serialize");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("suite,cases,failures\n");
            for x in summaries {
                s.push_str(&format!("{},{},{}\n", x.suite, x.cases, x.failures));
            }
            s
        }
        Format::Text => {
            let mut s = format!("{:<28} {:>8} {:>9}  status\n", "suite", "cases", "failures");
            for x in summaries {
                let status = if x.failures == 0 { "PASS" } else { "FAIL" };
                s.push_str(&format!("{:<28} {:>8} {:>9}  {status}\n", x.suite, x.cases, x.failures));
            }
            s
        }
    };
    emit(out, None, &text)
}

fn verdict(summaries: &[SuiteSummary]) -> i32 {
    if summaries.iter().all(|s| s.failures == 0) {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}

/// Runs the exact symmetric-polynomial suites up to `k_max`.
pub fn sym_suites(k_max: usize) -> Result<Vec<SuiteSummary>, Error> {
    let prop = verify_proposition(k_max)?;
    Ok(vec![
        SuiteSummary::from_report(&prop),
        SuiteSummary::from_report(&verify_recurrence(k_max)),
        SuiteSummary::from_report(&verify_generating_function(k_max)),
    ])
}

/// Runs the exact duality suites up to `k_max`.
pub fn dual_suites(k_max: usize) -> Vec<SuiteSummary> {
    let involution = SuiteSummary::from_checks("involution", (0..=k_max).map(verify_involution));

    let k_sweep = k_max.min(10) as u64;
    let mut pointwise = Vec::new();
    for k in 1..=k_sweep {
        for n in 1..=20 {
            for nv in 0..=40 {
                let (l, r) = eq2_eq3_pointwise(nv, n, k);
                pointwise.push(l == r);
            }
        }
    }
    let pointwise = SuiteSummary::from_checks("pointwise-product-factorial", pointwise);

    let round_trip = SuiteSummary::from_checks(
        "round-trip",
        (0..=k_max).map(|k| {
            let mut entries = probe_values(k + 1);
            entries[0] = rational(1);
            let v = MomentVector::new(MomentKind::VolumeSide, 3, k, entries).expect("well-formed");
            v.transform().and_then(|w| w.transform()).is_ok_and(|back| back == v)
        }),
    );

    let mut chain = Vec::new();
    for k in 1..=k_sweep.min(4) {
        for n in 1..=10 {
            let eq3 = expect_identity_eq3(&interval_vertex_law(n + k), n, k, &interval_volume_moment(n, k));
            let vm: Vec<Rational> = (0..=k).map(|j| interval_volume_moment(n + k - j, j)).collect();
            let eq4 = expect_identity_eq4(&interval_vertex_law(n + k), n, k, &vm);
            let ie = inclusion_exclusion_check(&interval_vertex_law(n + k), n, k);
            chain.push(eq3.is_ok_and(|r| r.pass) && eq4.is_ok_and(|r| r.pass) && ie.unwrap_or(false));
        }
    }
    let chain = SuiteSummary::from_checks("interval-exact-chain", chain);
    vec![involution, pointwise, round_trip, chain]
}

fn run_check(args: CheckArgs, env_seed: Option<String>, out: &mut dyn Write) -> Result<i32, Error> {
    let cfg = args.resolve(env_seed)?;
    let run = || {
        check_identity(
            &cfg.body,
            cfg.identity,
            cfg.first,
            cfg.second,
            cfg.reps,
            cfg.seed,
            cfg.mode,
            cfg.tolerance_sigma,
        )
    };
    let report = match cfg.workers {
        Some(w) => with_workers(w, run)?,
        None => run()?,
    };
    let text = match cfg.format {
        Format::Csv => reports_to_csv(std::slice::from_ref(&report)),
        _ => report_to_json(&report),
    };
    emit(out, cfg.out.as_deref(), &text)?;
    Ok(if report.pass { EXIT_PASS } else { EXIT_FAIL })
}

fn run_report(format: Format, out_path: Option<&Path>, inputs: &[PathBuf], out: &mut dyn Write) -> Result<i32, Error> {
    let mut all = Vec::new();
    for path in inputs {
        all.extend(read_reports(path)?);
    }
    let text = match format {
        Format::Csv => reports_to_csv(&all),
        _ => reports_to_json(&all),
    };
    emit(out, out_path, &text)?;
    Ok(EXIT_PASS)
}

fn run_oracle(nodes: usize, reps: u64, seed: u64, out_path: Option<&Path>, out: &mut dyn Write) -> Result<i32, Error> {
    let mut registry = Registry::default();
    registry.insert(interval_ev2_entry());
    let mut agree = true;
    for name in ["triangle", "square"] {
        let body: ConvexBody = name.parse()?;
        let dual = compute_ev3_ratio(name, &body, nodes, reps, seed)?;
        eprintln!(
            "{name}: quadrature {:.6}, simulation {:.6} +- {:.6}, {}",
            dual.quadrature,
            dual.simulation,
            dual.simulation_stderr,
            if dual.agree { "agree" } else { "DISAGREE" }
        );
        agree &= dual.agree;
        registry.insert(dual.value);
    }
    if !agree {
        eprintln!("methods disagree at three significant figures; registry not written");
        return Ok(EXIT_FAIL);
    }
    emit(out, out_path, &registry.to_tsv())?;
    Ok(EXIT_PASS)
}

/// Runs the CLI on `args` (including the program name), writing results to
/// `out` and diagnostics to stderr. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::VerifySym { k_max, format } => {
            sym_suites(k_max).and_then(|s| print_summaries(out, format, &s).map(|_| verdict(&s)))
        }
        Command::VerifyDual { k_max, format } => {
            let s = dual_suites(k_max);
            print_summaries(out, format, &s).map(|_| verdict(&s))
        }
        Command::Check(args) => run_check(*args, std::env::var(SEED_ENV).ok(), out),
        Command::Report { format, out: path, inputs } => run_report(format, path.as_deref(), &inputs, out),
        Command::Oracle { nodes, reps, seed, out: path } => run_oracle(nodes, reps, seed, path.as_deref(), out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("efron-dual: {e}");
            EXIT_USAGE
        }
    }
}
