//! The `hmix` command line.
//!
//! Every command builds its data section in memory first, then writes a
//! `#`-prefixed metadata block (version, config, seed, wall time) followed by
//! the data. Data sections depend only on the config.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::dirichlet::{bound_row_general, bound_sweep, write_bound_csv};
use crate::error::{Error, Result};
use crate::harper::{spectrum_sweep, RESIDUAL_TOLERANCE};
use crate::mixing::{
    center_table, exact_tv_curve, theorem1_constants, write_center_csv, write_tv_csv,
};
use crate::repr::{
    character_gram, dimension_square_sum, irrep_count, write_bound_curve_csv,
    write_irrep_table_csv, UpperBoundLemma, DEFAULT_GRAM_CAP,
};
use crate::sim::{conjectured_constant, return_probability, zn_limit_test};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_NUMERICAL: i32 = 2;

#[derive(Parser, Debug, Serialize)]
#[command(
    name = "hmix",
    version,
    about = "Random walk on the Heisenberg group mod n"
)]
pub struct Cli {
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Cosine,
    File,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    /// Extreme eigenvalues of M(n, xi, alpha) over a range of xi, plus the spectrum of M(1).
    Spectrum {
        #[arg(long)]
        n: usize,
        /// Inclusive range a:b (default 1:n-1).
        #[arg(long, value_parser = parse_range)]
        xi_range: Option<(u64, u64)>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
    },
    /// Exact total variation with Fourier and projection bounds.
    Mix {
        /// One or more odd moduli, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, default_value_t = 1000)]
        kmax: u64,
        /// Evaluate tv at k = ceil(eta n^2) for these eta instead of a full curve.
        #[arg(long, value_delimiter = ',')]
        eta_grid: Option<Vec<f64>>,
        /// Only the upper bound lemma terms (no exact convolution, any odd n).
        #[arg(long)]
        fourier_only: bool,
    },
    /// Path bounds on the extreme eigenvalues against exact values.
    Bound {
        #[arg(long)]
        n: Option<usize>,
        /// Inclusive range a:b (default 1:ceil(n/2)-1).
        #[arg(long, value_parser = parse_range)]
        xi_range: Option<(u64, u64)>,
        #[arg(long, value_enum, default_value = "cosine")]
        profile: Profile,
        /// Diagonal values for `--profile file`, separated by whitespace or commas.
        #[arg(long)]
        diagonal: Option<PathBuf>,
    },
    /// Fourier formula for the law of the central coordinate against exact convolution.
    Center {
        #[arg(long)]
        p: u64,
        /// Largest step count; rows for k = 1..=k.
        #[arg(long)]
        k: u64,
    },
    /// Table of irreducible representations with completeness and orthogonality checks.
    Repcheck {
        #[arg(long)]
        n: u64,
    },
    /// Monte Carlo on the integer Heisenberg group.
    Simulate {
        #[command(subcommand)]
        experiment: Experiment,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Experiment {
    /// P(return to the identity at step k).
    Return {
        #[arg(long, default_value_t = 100)]
        k: u64,
        #[arg(long, default_value_t = 1_000_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Z_k / k against the Levy area law.
    Levy {
        #[arg(long, default_value_t = 10_000)]
        k: u64,
        #[arg(long, default_value_t = 100_000)]
        trials: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

fn parse_range(s: &str) -> std::result::Result<(u64, u64), String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("expected a:b, got {s:?}"))?;
    let a: u64 = a.trim().parse().map_err(|e| format!("{a:?}: {e}"))?;
    let b: u64 = b.trim().parse().map_err(|e| format!("{b:?}: {e}"))?;
    if a > b {
        return Err(format!("empty range {a}:{b}"));
    }
    Ok((a, b))
}

/// What a command produced: data plus extra metadata lines.
struct Output {
    data: Vec<u8>,
    /// Additional `(name, path)` files, written next to `--out`.
    extra: Vec<(String, Vec<u8>)>,
    notes: Vec<(String, String)>,
    seed: Option<u64>,
    /// Set when a numerical check failed; the data is still written.
    failure: Option<String>,
}

impl Output {
    fn new(data: Vec<u8>) -> Self {
        Self {
            data,
            extra: Vec::new(),
            notes: Vec::new(),
            seed: None,
            failure: None,
        }
    }
}

fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NoConvergence { .. } | Error::Numerical(_) => EXIT_NUMERICAL,
        _ => EXIT_INVALID,
    }
}

/// Runs the CLI on `args` (including the program name) with the process's
/// stdout and stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() {
                EXIT_INVALID
            } else {
                EXIT_OK
            };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(None) => EXIT_OK,
        Ok(Some(failure)) => {
            let _ = writeln!(err, "hmix: numerical check failed: {failure}");
            EXIT_NUMERICAL
        }
        Err(e) => {
            let _ = writeln!(err, "hmix: {e}");
            exit_code(&e)
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Result<Option<String>> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(invalid("--jobs must be positive"));
        }
        builder = builder.num_threads(j);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::Numerical(format!("thread pool: {e}")))?;
    let start = Instant::now();
    let output = pool.install(|| dispatch(cli))?;
    let elapsed = start.elapsed().as_secs_f64();

    let format = resolved_format(cli);
    let mut doc = Vec::new();
    if format == Format::Json {
        let mut value: serde_json::Value = serde_json::from_slice(&output.data)
            .map_err(|e| Error::Numerical(format!("json: {e}")))?;
        value["metadata"] = metadata_json(cli, &output, elapsed);
        serde_json::to_writer_pretty(&mut doc, &value)
            .map_err(|e| Error::Numerical(format!("json: {e}")))?;
        doc.push(b'\n');
    } else {
        write_metadata(&mut doc, cli, &output, elapsed)?;
        doc.extend_from_slice(&output.data);
    }

    match &cli.out {
        Some(path) => {
            fs::write(path, &doc)?;
            for (suffix, bytes) in &output.extra {
                let mut extra = Vec::new();
                write_metadata(&mut extra, cli, &output, elapsed)?;
                extra.extend_from_slice(bytes);
                fs::write(sibling(path, suffix), extra)?;
            }
        }
        None => {
            out.write_all(&doc)?;
            for (suffix, bytes) in &output.extra {
                writeln!(out, "# section: {suffix}")?;
                out.write_all(bytes)?;
            }
        }
    }
    Ok(output.failure)
}

/// `dir/stem.suffix` for `dir/stem.ext`.
pub fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "out".into());
    path.with_file_name(format!("{stem}.{suffix}"))
}

fn resolved_format(cli: &Cli) -> Format {
    cli.format.unwrap_or(match cli.command {
        Command::Simulate { .. } => Format::Json,
        _ => Format::Csv,
    })
}

fn command_name(cli: &Cli) -> &'static str {
    match &cli.command {
        Command::Spectrum { .. } => "spectrum",
        Command::Mix { .. } => "mix",
        Command::Bound { .. } => "bound",
        Command::Center { .. } => "center",
        Command::Repcheck { .. } => "repcheck",
        Command::Simulate {
            experiment: Experiment::Return { .. },
        } => "simulate return",
        Command::Simulate {
            experiment: Experiment::Levy { .. },
        } => "simulate levy",
    }
}

fn config_json(cli: &Cli) -> String {
    serde_json::to_string(cli).unwrap_or_else(|_| "{}".into())
}

fn write_metadata(w: &mut Vec<u8>, cli: &Cli, output: &Output, elapsed: f64) -> Result<()> {
    writeln!(w, "# hmix {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command: {}", command_name(cli))?;
    writeln!(w, "# config: {}", config_json(cli))?;
    match output.seed {
        Some(s) => writeln!(w, "# seed: {s}")?,
        None => writeln!(w, "# seed: none")?,
    }
    for (k, v) in &output.notes {
        writeln!(w, "# {k}: {v}")?;
    }
    writeln!(w, "# wall_time_s: {elapsed:.3}")?;
    Ok(())
}

fn metadata_json(cli: &Cli, output: &Output, elapsed: f64) -> serde_json::Value {
    let notes: serde_json::Map<String, serde_json::Value> = output
        .notes
        .iter()
        .map(|(k, v)| (k.clone(), json!(v)))
        .collect();
    json!({
        "version": env!("CARGO_PKG_VERSION"),
        "command": command_name(cli),
        "config": serde_json::to_value(cli).unwrap_or(json!({})),
        "seed": output.seed,
        "notes": notes,
        "wall_time_s": elapsed,
    })
}

fn require_csv(cli: &Cli) -> Result<()> {
    if resolved_format(cli) != Format::Csv {
        return Err(invalid(format!("{} writes CSV only", command_name(cli))));
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<Output> {
    match &cli.command {
        Command::Spectrum { n, xi_range, alpha } => {
            require_csv(cli)?;
            spectrum(*n, *xi_range, *alpha)
        }
        Command::Mix {
            n,
            kmax,
            eta_grid,
            fourier_only,
        } => {
            require_csv(cli)?;
            mix(n, *kmax, eta_grid.as_deref(), *fourier_only)
        }
        Command::Bound {
            n,
            xi_range,
            profile,
            diagonal,
        } => {
            require_csv(cli)?;
            bound(*n, *xi_range, *profile, diagonal.as_deref())
        }
        Command::Center { p, k } => {
            require_csv(cli)?;
            center(*p, *k)
        }
        Command::Repcheck { n } => {
            require_csv(cli)?;
            repcheck(*n)
        }
        Command::Simulate { experiment } => simulate(experiment, resolved_format(cli)),
    }
}

fn spectrum(n: usize, xi_range: Option<(u64, u64)>, alpha: f64) -> Result<Output> {
    if n < 3 {
        return Err(invalid("--n must be at least 3"));
    }
    let (a, b) = xi_range.unwrap_or((1, n as u64 - 1));
    if a < 1 || b >= n as u64 {
        return Err(invalid(format!("--xi-range must lie in 1:{}", n - 1)));
    }
    let sweep = spectrum_sweep(n, a..=b, alpha)?;
    let mut data = Vec::new();
    sweep.write_sweep_csv(&mut data)?;
    let mut spec = Vec::new();
    sweep.full.write_csv(&mut spec)?;
    let mut output = Output::new(data);
    output.extra.push(("spectrum.csv".into(), spec));
    let residual = sweep.max_residual();
    output
        .notes
        .push(("max_residual".into(), format!("{residual:e}")));
    if residual > RESIDUAL_TOLERANCE {
        output.failure = Some(format!("eigenpair residual {residual:e}"));
    }
    if alpha == 0.0 {
        let asym = sweep.rows.iter().find(|r| {
            sweep
                .rows
                .iter()
                .find(|s| s.xi == n as u64 - r.xi)
                .is_some_and(|s| s.beta_top != r.beta_top || s.beta_bottom != r.beta_bottom)
        });
        if let Some(r) = asym {
            output.failure = Some(format!("xi = {} breaks the xi <-> n - xi symmetry", r.xi));
        }
    }
    Ok(output)
}

fn mix(ns: &[u64], kmax: u64, eta_grid: Option<&[f64]>, fourier_only: bool) -> Result<Output> {
    for &n in ns {
        if n < 3 || n % 2 == 0 {
            return Err(invalid(format!("--n must be odd and at least 3, got {n}")));
        }
    }
    let mut data = Vec::new();
    let mut output_notes = Vec::new();
    let mut failure = None;
    if fourier_only {
        let ks: Vec<u64> = (0..=kmax).collect();
        for (i, &n) in ns.iter().enumerate() {
            let lemma = UpperBoundLemma::new(n)?;
            let mut block = Vec::new();
            write_bound_curve_csv(&lemma, &ks, &mut block)?;
            let text = String::from_utf8_lossy(&block).into_owned();
            let body = if i == 0 {
                &text[..]
            } else {
                text.split_once('\n').map_or("", |x| x.1)
            };
            data.extend_from_slice(body.as_bytes());
        }
    } else if let Some(grid) = eta_grid {
        let summary = theorem1_constants(ns, grid)?;
        summary.write_csv(&mut data)?;
        output_notes.push(("a_estimate".into(), format!("{:e}", summary.a_estimate())));
        output_notes.push(("c_estimate".into(), format!("{:e}", summary.c_estimate())));
        output_notes.push(("stable_within_2".into(), summary.is_stable(2.0).to_string()));
    } else {
        let mut all = Vec::new();
        for &n in ns {
            all.extend(exact_tv_curve(n, kmax)?);
        }
        if let Some(r) = all.iter().find(|r| !r.is_sandwiched(1e-12)) {
            failure = Some(format!("sandwich violated at n = {}, k = {}", r.n, r.k));
        }
        write_tv_csv(&all, &mut data)?;
    }
    let mut output = Output::new(data);
    output.notes = output_notes;
    output.failure = failure;
    Ok(output)
}

fn read_diagonal(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(|l| l.split(|c: char| c == ',' || c.is_whitespace()))
        .filter(|t| !t.is_empty())
        .map(|t| {
            t.parse::<f64>()
                .map_err(|e| Error::Parse(format!("{t:?}: {e}")))
        })
        .collect()
}

fn bound(
    n: Option<usize>,
    xi_range: Option<(u64, u64)>,
    profile: Profile,
    diagonal: Option<&Path>,
) -> Result<Output> {
    let rows = match profile {
        Profile::Cosine => {
            let n = n.ok_or_else(|| invalid("--n is required for the cosine profile"))?;
            if n < 5 {
                return Err(invalid("--n must be at least 5"));
            }
            let top = (n as u64 - 1) / 2;
            let (a, b) = xi_range.unwrap_or((1, top));
            if a < 1 || b > top {
                return Err(invalid(format!(
                    "--xi-range must lie in 1:{top} (xi < n/2)"
                )));
            }
            let xis: Vec<u64> = (a..=b).collect();
            bound_sweep(n, &xis)?
        }
        Profile::File => {
            let path = diagonal.ok_or_else(|| invalid("--profile file needs --diagonal PATH"))?;
            let d = read_diagonal(path)?;
            if let Some(n) = n {
                if n != d.len() {
                    return Err(invalid(format!(
                        "--n {n} but the file has {} values",
                        d.len()
                    )));
                }
            }
            vec![bound_row_general(&d)?]
        }
    };
    let mut data = Vec::new();
    write_bound_csv(&rows, &mut data)?;
    let mut output = Output::new(data);
    let violations = rows.iter().filter(|r| !r.is_valid()).count();
    output
        .notes
        .push(("violations".into(), violations.to_string()));
    if violations > 0 {
        output.failure = Some(format!("{violations} bound violations"));
    }
    Ok(output)
}

fn center(p: u64, k: u64) -> Result<Output> {
    if k == 0 || k > u32::MAX as u64 {
        return Err(invalid("--k must be positive"));
    }
    let rows = center_table(p, k)?;
    let worst = rows
        .iter()
        .map(|r| (r.prob_fourier - r.prob_exact).abs())
        .fold(0.0, f64::max);
    let mut data = Vec::new();
    write_center_csv(&rows, &mut data)?;
    let mut output = Output::new(data);
    output
        .notes
        .push(("max_abs_diff".into(), format!("{worst:e}")));
    if worst > 1e-10 {
        output.failure = Some(format!("Fourier and exact laws differ by {worst:e}"));
    }
    Ok(output)
}

fn repcheck(n: u64) -> Result<Output> {
    if n == 0 {
        return Err(invalid("--n must be positive"));
    }
    let mut data = Vec::new();
    write_irrep_table_csv(n, &mut data)?;
    let mut output = Output::new(data);
    let square_sum = dimension_square_sum(n);
    output
        .notes
        .push(("irreps".into(), irrep_count(n).to_string()));
    output
        .notes
        .push(("dimension_square_sum".into(), square_sum.to_string()));
    if square_sum != n * n * n {
        output.failure = Some(format!("sum of squared dimensions {square_sum} != n^3"));
    }
    if n <= DEFAULT_GRAM_CAP {
        let defect = character_gram(n, DEFAULT_GRAM_CAP)?.identity_defect();
        output
            .notes
            .push(("gram_defect".into(), format!("{defect:e}")));
        if defect > 1e-9 {
            output.failure = Some(format!("character Gram defect {defect:e}"));
        }
    }
    Ok(output)
}

fn simulate(experiment: &Experiment, format: Format) -> Result<Output> {
    let (seed, value) = match *experiment {
        Experiment::Return { k, trials, seed } => {
            let s = return_probability(k, trials, seed)?;
            let value = json!({
                "k": k,
                "trials": trials,
                "seed": seed,
                "estimate": s.estimate(),
                "stderr": s.stderr(),
                "k2_scaled": s.k2_scaled(),
                "c_conjectured": conjectured_constant(),
                "xy_estimate": s.xy_estimate(),
                "xy_stderr": s.xy_stderr(),
                "xy_pi_k_scaled": s.xy_scaled(),
            });
            (seed, value)
        }
        Experiment::Levy { k, trials, seed } => {
            let s = zn_limit_test(k, trials, seed)?;
            let value = json!({
                "k": k,
                "trials": trials,
                "seed": seed,
                "ks_halved": s.ks_halved,
                "ks_full": s.ks_full,
                "median": s.median,
                "variance": s.variance,
            });
            (seed, value)
        }
    };
    let data = match format {
        Format::Json => serde_json::to_vec(&value).map_err(|e| Error::Numerical(e.to_string()))?,
        Format::Csv => {
            let obj = value.as_object().expect("object literal");
            let header: Vec<&str> = obj.keys().map(String::as_str).collect();
            let row: Vec<String> = obj.values().map(|v| v.to_string()).collect();
            format!("{}\n{}\n", header.join(","), row.join(",")).into_bytes()
        }
    };
    let mut output = Output::new(data);
    output.seed = Some(seed);
    Ok(output)
}
