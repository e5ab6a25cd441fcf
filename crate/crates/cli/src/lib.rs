//! Command-line front end for `qbound`.
//!
//! Data goes to standard output, or into files under the directory named by
//! `QBOUND_OUT_DIR` when that variable is set. Warnings and errors go to
//! standard error as one JSON object per line.

mod error;
mod output;
mod state;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use qbound::classical_binary::{rate_curve, BinaryPair, RATE_CURVE_HEADER};
use qbound::exact_oracles::{beta_eps_exact, np_test_errors, quantum_mixed_error_exact};
use qbound::finite_bounds::{
    hoeffding_upper, mixed_upper, quantum_chernoff_lower, second_order_reference, stein_lower, stein_upper,
    SteinVariant, StatePair,
};
use qbound::linalg::DensityMatrix;
use rayon::prelude::*;
use serde::Serialize;

pub use error::CliError;
pub use output::fmt_float;
pub use state::{parse_state_file, LoadedState};

use output::{fmt_opt, int, Table};

/// Environment variable naming the output directory.
pub const OUT_DIR_ENV: &str = "QBOUND_OUT_DIR";

#[derive(Parser, Debug)]
#[command(name = "qbound", version, about = "Finite-sample error bounds for binary quantum hypothesis testing")]
struct Cli {
    /// Worker threads for sweeps over n (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Report entropic quantities in bits instead of nats.
    #[arg(long, global = true)]
    bits: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct PairArgs {
    /// JSON file with the state rho.
    #[arg(long)]
    rho: PathBuf,
    /// JSON file with the state sigma.
    #[arg(long)]
    sigma: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Variant {
    AsDerived,
    AsPrinted,
}

impl From<Variant> for SteinVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::AsDerived => SteinVariant::AsDerived,
            Variant::AsPrinted => SteinVariant::AsPrinted,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Divergence profile (JSON) and the psi curve on [0, 1] (CSV).
    Divergences {
        #[command(flatten)]
        pair: PairArgs,
        /// Number of grid points for the psi curve.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Stein-regime bounds on (1/n) log beta_{n,eps}.
    Stein {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        n_max: usize,
        #[arg(long, value_enum, default_value_t = Variant::AsDerived)]
        variant: Variant,
    },
    /// Hoeffding-regime upper bound on (1/n) log beta_{n, e^{-nr}}.
    Hoeffding {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        n_max: usize,
    },
    /// Bounds on the symmetric (a = 0) mixed error rate.
    Chernoff {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n_max: usize,
    },
    /// Exact rate and incomplete-beta envelope for two binary distributions.
    Binary {
        #[arg(long)]
        p: f64,
        #[arg(long)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
        #[arg(long)]
        n_max: usize,
    },
    /// Exact errors of the Holevo-Helstrom test at threshold a.
    Oracle {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n: usize,
        #[arg(long, allow_hyphen_values = true)]
        a: f64,
    },
}

/// One emitted document.
struct Document {
    file_name: &'static str,
    body: String,
}

struct Context {
    unit: f64,
    threads: Option<usize>,
    warnings: Vec<String>,
}

impl Context {
    fn rate(&self, x: f64) -> String {
        fmt_float(x / self.unit)
    }

    fn opt_rate(&self, x: Option<f64>) -> String {
        fmt_opt(x.map(|x| x / self.unit))
    }

    fn load_pair(&mut self, pair: &PairArgs) -> Result<(DensityMatrix, DensityMatrix), CliError> {
        let mut load = |p: &Path| -> Result<DensityMatrix, CliError> {
            let loaded = parse_state_file(p)?;
            self.warnings
                .extend(loaded.warnings.into_iter().map(|w| format!("{}: {w}", p.display())));
            Ok(loaded.state)
        };
        let rho = load(&pair.rho)?;
        let sigma = load(&pair.sigma)?;
        if rho.dim() != sigma.dim() {
            return Err(qbound::Error::DimensionMismatch(rho.dim(), sigma.dim()).into());
        }
        Ok((rho, sigma))
    }

    /// `f(n)` for `n = 1..=n_max`, in order of `n`.
    fn sweep<T, F>(&self, n_max: usize, f: F) -> Result<Vec<T>, CliError>
    where
        T: Send,
        F: Fn(usize) -> Result<T, CliError> + Sync + Send,
    {
        if n_max == 0 {
            return Err(qbound::Error::InvalidInput("--n-max must be at least 1".into()).into());
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(t) = self.threads {
            builder = builder.num_threads(t);
        }
        let pool = builder
            .build()
            .map_err(|e| qbound::Error::InvalidInput(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (1..=n_max).into_par_iter().map(&f).collect())
    }
}

/// `Some(value)` unless the tensor power exceeds the dimension cap.
fn if_feasible<T>(r: qbound::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(qbound::Error::ResourceLimit { .. }) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn json_line<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    s
}

#[derive(Serialize)]
struct ProfileReport {
    units: &'static str,
    relative_entropy: f64,
    chernoff: f64,
    chernoff_argmin_t: f64,
    eta: f64,
    variance: Option<f64>,
}

#[derive(Serialize)]
struct OracleReport {
    n: usize,
    a: f64,
    e_n: f64,
    alpha: f64,
    beta: f64,
    degenerate_kernel: bool,
}

fn divergences(ctx: &mut Context, pair: &PairArgs, points: usize) -> Result<Vec<Document>, CliError> {
    if points < 2 {
        return Err(qbound::Error::InvalidInput("--points must be at least 2".into()).into());
    }
    let (rho, sigma) = ctx.load_pair(pair)?;
    let curve = StatePair::new(rho, sigma)?.curve().clone();
    let profile = curve.profile();
    let u = ctx.unit;
    let report = ProfileReport {
        units: if u == 1.0 { "nats" } else { "bits" },
        relative_entropy: profile.relative_entropy / u,
        chernoff: profile.chernoff / u,
        chernoff_argmin_t: profile.chernoff_argmin_t,
        eta: profile.eta,
        variance: curve.variance().ok().map(|v| v / (u * u)),
    };
    let mut table = Table::new(&["t", "psi", "psi_prime", "psi_second"]);
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let (psi, d1, d2) = curve.moments(t);
        table.push(vec![fmt_float(t), fmt_float(psi / u), fmt_float(d1 / u), fmt_float(d2 / u)]);
    }
    Ok(vec![
        Document {
            file_name: "divergences.json",
            body: json_line(&report),
        },
        Document {
            file_name: "psi_curve.csv",
            body: table.to_csv(),
        },
    ])
}

fn stein(
    ctx: &mut Context,
    pair: &PairArgs,
    eps: f64,
    n_max: usize,
    variant: SteinVariant,
) -> Result<Vec<Document>, CliError> {
    let (rho, sigma) = ctx.load_pair(pair)?;
    let sp = StatePair::new(rho, sigma)?;
    let curve = sp.curve();
    let rows = ctx.sweep(n_max, |n| {
        let lo = stein_lower(curve, n, eps, variant)?;
        let up = stein_upper(curve, n, eps, variant)?;
        let exact = if_feasible(beta_eps_exact(sp.rho(), sp.sigma(), n, eps))?.map(|b| b.ln() / n as f64);
        let reference = second_order_reference(curve, n, eps).ok();
        Ok((n, lo, up, exact, reference))
    })?;
    let mut table = Table::new(&[
        "n",
        "lower",
        "upper",
        "exact",
        "second_order_ref",
        "lower_valid",
        "upper_valid",
    ]);
    for (n, lo, up, exact, reference) in rows {
        table.push(vec![
            int(n),
            ctx.rate(lo.bound_value),
            ctx.rate(up.bound_value),
            ctx.opt_rate(exact),
            ctx.opt_rate(reference),
            int(lo.valid),
            int(up.valid),
        ]);
    }
    Ok(vec![Document {
        file_name: "stein.csv",
        body: table.to_csv(),
    }])
}

fn hoeffding(ctx: &mut Context, pair: &PairArgs, r: f64, n_max: usize) -> Result<Vec<Document>, CliError> {
    let (rho, sigma) = ctx.load_pair(pair)?;
    let curve = StatePair::new(rho, sigma)?.curve().clone();
    let rows = ctx.sweep(n_max, |n| Ok(hoeffding_upper(&curve, n, r)?))?;
    if let Some(reason) = rows.first().and_then(|r| r.reason.clone()) {
        return Err(qbound::Error::InvalidInput(reason).into());
    }
    let mut table = Table::new(&["n", "upper", "t_r", "H_r"]);
    for rep in rows {
        table.push(vec![
            int(rep.n),
            ctx.rate(rep.bound_value),
            fmt_float(rep.parameters["t_r"]),
            ctx.rate(rep.parameters["hoeffding"]),
        ]);
    }
    Ok(vec![Document {
        file_name: "hoeffding.csv",
        body: table.to_csv(),
    }])
}

fn chernoff(ctx: &mut Context, pair: &PairArgs, n_max: usize) -> Result<Vec<Document>, CliError> {
    let (rho, sigma) = ctx.load_pair(pair)?;
    let sp = StatePair::new(rho, sigma)?;
    let rows = ctx.sweep(n_max, |n| {
        let upper = mixed_upper(sp.curve(), n, 0.0)?.mixed.bound_value;
        let lower = quantum_chernoff_lower(&sp, n)?.filter(|r| r.valid).map(|r| r.bound_value);
        let exact = if_feasible(quantum_mixed_error_exact(sp.rho(), sp.sigma(), n, 0.0))?.map(|e| e.ln() / n as f64);
        Ok((n, upper, lower, exact))
    })?;
    let mut table = Table::new(&["n", "mixed_upper_rate", "mixed_lower_rate", "exact_rate"]);
    for (n, upper, lower, exact) in rows {
        table.push(vec![int(n), ctx.rate(upper), ctx.opt_rate(lower), ctx.opt_rate(exact)]);
    }
    Ok(vec![Document {
        file_name: "chernoff.csv",
        body: table.to_csv(),
    }])
}

fn binary(ctx: &mut Context, p: f64, q: f64, a: f64, n_max: usize) -> Result<Vec<Document>, CliError> {
    let bp = BinaryPair::new(p, q)?;
    let rows = rate_curve(&bp, a, n_max)?;
    let mut table = Table::new(&RATE_CURVE_HEADER.split(',').collect::<Vec<_>>());
    for r in rows {
        table.push(vec![
            int(r.n),
            ctx.rate(r.rate_exact),
            ctx.rate(r.rate_lower),
            ctx.rate(r.rate_upper),
            ctx.rate(r.chernoff),
        ]);
    }
    Ok(vec![Document {
        file_name: "binary.csv",
        body: table.to_csv(),
    }])
}

fn oracle(ctx: &mut Context, pair: &PairArgs, n: usize, a: f64) -> Result<Vec<Document>, CliError> {
    let (rho, sigma) = ctx.load_pair(pair)?;
    let e_n = quantum_mixed_error_exact(&rho, &sigma, n, a)?;
    let np = np_test_errors(&rho, &sigma, n, a)?;
    let report = OracleReport {
        n,
        a,
        e_n,
        alpha: np.alpha,
        beta: np.beta,
        degenerate_kernel: np.degenerate_kernel,
    };
    Ok(vec![Document {
        file_name: "oracle.json",
        body: json_line(&report),
    }])
}

fn dispatch(cli: Cli, ctx: &mut Context) -> Result<Vec<Document>, CliError> {
    match cli.command {
        Command::Divergences { pair, points } => divergences(ctx, &pair, points),
        Command::Stein {
            pair,
            eps,
            n_max,
            variant,
        } => stein(ctx, &pair, eps, n_max, variant.into()),
        Command::Hoeffding { pair, r, n_max } => hoeffding(ctx, &pair, r, n_max),
        Command::Chernoff { pair, n_max } => chernoff(ctx, &pair, n_max),
        Command::Binary { p, q, a, n_max } => binary(ctx, p, q, a, n_max),
        Command::Oracle { pair, n, a } => oracle(ctx, &pair, n, a),
    }
}

fn emit(docs: &[Document], out_dir: Option<&Path>, out: &mut dyn Write) -> Result<(), CliError> {
    match out_dir {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(CliError::Output)?;
            for d in docs {
                std::fs::write(dir.join(d.file_name), &d.body).map_err(CliError::Output)?;
            }
        }
        None => {
            for d in docs {
                out.write_all(d.body.as_bytes()).map_err(CliError::Output)?;
            }
        }
    }
    out.flush().map_err(CliError::Output)
}

#[derive(Serialize)]
struct Diagnostic<'a> {
    level: &'static str,
    code: &'a str,
    message: &'a str,
}

fn diagnose(err: &mut dyn Write, level: &'static str, code: &str, message: &str) {
    let line = serde_json::to_string(&Diagnostic { level, code, message }).expect("serializable diagnostic");
    let _ = writeln!(err, "{line}");
}

/// Run the command line `args` (program name first) and return the exit code:
/// 0 success, 1 numerical non-convergence or output failure, 2 invalid input,
/// 3 resource cap.
pub fn run<I, T>(args: I, out_dir: Option<&Path>, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    0
                }
                _ => {
                    diagnose(err, "error", "usage", e.to_string().trim_end());
                    2
                }
            };
        }
    };
    let mut ctx = Context {
        unit: if cli.bits { std::f64::consts::LN_2 } else { 1.0 },
        threads: cli.threads.filter(|&t| t > 0),
        warnings: Vec::new(),
    };
    let result = dispatch(cli, &mut ctx);
    for w in &ctx.warnings {
        diagnose(err, "warning", "renormalized_trace", w);
    }
    match result.and_then(|docs| emit(&docs, out_dir, out)) {
        Ok(()) => 0,
        Err(e) => {
            diagnose(err, "error", e.code(), &e.to_string());
            e.exit_code()
        }
    }
}
