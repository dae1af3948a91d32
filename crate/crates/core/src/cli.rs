//! Command-line driver.
//!
//! JSON outputs are wrapped as `{"command", "invocation", "result"}` so every
//! file carries the parameters that produced it; CSV outputs start with a
//! `#`-prefixed line holding the same invocation.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use crate::amo::{
    butterfly, butterfly_csv, default_gap_close_tol, spectrum_fixed_phase, spectrum_irrational,
    spectrum_rational, SpectrumResult, DEFAULT_EDGE_TOL,
};
use crate::dioph::{convergent, dc_constants, DcVariant, FrequencySpec};
use crate::gaplemma::{verify_prediction_with, AstelsOptions};
use crate::ids::{
    default_label_tol, ids_at_gaps, ids_curve, label_gaps, IdsParams, DEFAULT_N_MAX, DEFAULT_PHASE_AVG,
};
use crate::pipeline::{find_threshold, load_config, run_main_theorem, DEFAULT_APPROX_ORDER};
use crate::setalg::{cantor, minkowski_sum_all, thickness, IntervalUnion};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "QUASISUM_OUT_DIR";

const FREQ_HELP: &str = "Frequency: \"p/q\", a periodic continued fraction \"[a0;a1,...,(b1,b2,...)]\" \
(the parenthesised block repeats; \"[0;(1)]\" is the golden mean), or a decimal string such as \"0.6180339887\"";

#[derive(Debug, Parser)]
#[command(
    name = "quasisum",
    version,
    about = "Spectra of almost Mathieu operators, Cantor-set thickness and Gap Lemma checks",
    long_about = None,
    after_help = FREQ_HELP
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Output file; defaults to $QUASISUM_OUT_DIR/<command>.<format>, else stdout
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    fn ext(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VariantArg {
    Plain,
    TwoPi,
}

fn parse_freq(s: &str) -> Result<FrequencySpec, String> {
    s.parse::<FrequencySpec>().map_err(|e| e.to_string())
}

fn parse_union(s: &str) -> Result<IntervalUnion, String> {
    let pairs: Vec<[f64; 2]> = serde_json::from_str(s).map_err(|e| format!("expected [[lo,hi],...]: {e}"))?;
    let pairs: Vec<(f64, f64)> = pairs.into_iter().map(|[a, b]| (a, b)).collect();
    IntervalUnion::from_pairs(&pairs).map_err(|e| e.to_string())
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: f64,
    #[arg(long, value_parser = parse_freq, help = FREQ_HELP)]
    pub freq: FrequencySpec,
    /// Convergent order for irrational frequencies, counting from 1
    #[arg(long)]
    pub order: Option<usize>,
    /// Fixed phase; the union over phases is computed when absent
    #[arg(long)]
    pub phase: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_EDGE_TOL)]
    pub edge_tol: f64,
    /// Defaults to 1e-9*(4+4|lambda|)
    #[arg(long)]
    pub gap_close_tol: Option<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SetsArgs {
    /// Explicit set as JSON pairs, e.g. "[[0,1],[2,3]]" (repeatable)
    #[arg(long = "set", value_parser = parse_union)]
    pub sets: Vec<IntervalUnion>,
    /// Spectrum frequency (repeatable, paired with --lambda)
    #[arg(long = "freq", value_parser = parse_freq)]
    pub freqs: Vec<FrequencySpec>,
    /// Spectrum coupling (repeatable, paired with --freq)
    #[arg(long = "lambda", allow_negative_numbers = true)]
    pub lambdas: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_APPROX_ORDER)]
    pub order: usize,
    #[arg(long, default_value_t = DEFAULT_EDGE_TOL)]
    pub edge_tol: f64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum at a rational frequency or a convergent of an irrational one
    Spectrum(SpectrumArgs),
    /// Phase-union spectra for all p/q with q <= qmax
    Butterfly {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long)]
        qmax: i64,
        #[arg(long, default_value_t = DEFAULT_EDGE_TOL)]
        edge_tol: f64,
    },
    /// Thickness of a set, a middle-thirds stage or a spectrum
    Thickness {
        #[arg(long, value_parser = parse_union)]
        set: Option<IntervalUnion>,
        /// Middle-thirds Cantor set at this stage, on [0, 1]
        #[arg(long)]
        cantor: Option<u32>,
        #[arg(long, allow_negative_numbers = true)]
        lambda: Option<f64>,
        #[arg(long, value_parser = parse_freq)]
        freq: Option<FrequencySpec>,
        #[arg(long, default_value_t = DEFAULT_APPROX_ORDER)]
        order: usize,
    },
    /// Exact Minkowski sum of sets or spectra
    Sum(SetsArgs),
    /// Gap Lemma verdict compared with the exact sum
    Check {
        #[command(flatten)]
        sets: SetsArgs,
        /// Try other orderings when the given one fails the hypotheses
        #[arg(long)]
        search_orderings: bool,
    },
    /// Integrated density of states on a uniform grid
    Ids {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_parser = parse_freq)]
        freq: FrequencySpec,
        #[arg(long, default_value_t = 0.0)]
        phase: f64,
        #[arg(long, default_value_t = 2000)]
        volume: usize,
        #[arg(long, default_value_t = DEFAULT_PHASE_AVG)]
        phase_avg: usize,
        /// Grid "lo:hi:count"; defaults to the spectral hull bound with 201 points
        #[arg(long)]
        grid: Option<String>,
    },
    /// Gap labels of a spectrum from the IDS at its gap midpoints
    Label {
        #[arg(long, allow_negative_numbers = true)]
        lambda: f64,
        #[arg(long, value_parser = parse_freq)]
        freq: FrequencySpec,
        #[arg(long, default_value_t = DEFAULT_APPROX_ORDER)]
        order: usize,
        #[arg(long, default_value_t = 20000)]
        volume: usize,
        #[arg(long, default_value_t = DEFAULT_PHASE_AVG)]
        phase_avg: usize,
        #[arg(long, default_value_t = DEFAULT_N_MAX)]
        n_max: u64,
        /// Defaults to max(5/volume, 1e-4)
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Empirical Diophantine constant by exhaustive scan
    Dc {
        #[arg(long, value_parser = parse_freq)]
        freq: FrequencySpec,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        qmax: u64,
        #[arg(long, value_enum, default_value_t = VariantArg::Plain)]
        variant: VariantArg,
    },
    /// Run an experiment config over its coupling sweep
    Pipeline {
        #[arg(long)]
        config: PathBuf,
    },
    /// Locate the coupling where the sum stops being an interval
    Threshold {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 0.05)]
        lo: f64,
        #[arg(long, default_value_t = 0.95)]
        hi: f64,
        #[arg(long, default_value_t = 8)]
        steps: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectrum(_) => "spectrum",
            Command::Butterfly { .. } => "butterfly",
            Command::Thickness { .. } => "thickness",
            Command::Sum(_) => "sum",
            Command::Check { .. } => "check",
            Command::Ids { .. } => "ids",
            Command::Label { .. } => "label",
            Command::Dc { .. } => "dc",
            Command::Pipeline { .. } => "pipeline",
            Command::Threshold { .. } => "threshold",
        }
    }
}

/// What a failed command should exit with.
#[derive(Debug)]
pub enum CliError {
    /// Malformed or inconsistent arguments: exit 2.
    Usage(String),
    /// The computation itself refused or failed: exit 1.
    Domain(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) => f.write_str(m),
        }
    }
}

fn domain<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Domain(e.to_string())
}

/// A command's result: JSON payload plus its CSV rendering.
struct Output {
    invocation: Value,
    json: Value,
    csv: String,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable output")
}

fn spectrum_csv(union: &IntervalUnion) -> String {
    let mut out = String::from("band_index,lo,hi\n");
    for (i, p) in union.parts().iter().enumerate() {
        out.push_str(&format!("{i},{:?},{:?}\n", p.lo, p.hi));
    }
    out
}

fn compute_spectrum(a: &SpectrumArgs) -> Result<SpectrumResult, CliError> {
    let gap_tol = a.gap_close_tol.unwrap_or_else(|| default_gap_close_tol(a.lambda));
    match (&a.freq, a.phase) {
        (FrequencySpec::Rational(r), None) => spectrum_rational(a.lambda, *r, a.edge_tol, gap_tol).map_err(domain),
        (FrequencySpec::Rational(r), Some(w)) => spectrum_fixed_phase(a.lambda, *r, w, a.edge_tol).map_err(domain),
        (spec, None) => {
            spectrum_irrational(a.lambda, spec, a.order.unwrap_or(DEFAULT_APPROX_ORDER), a.edge_tol, gap_tol)
                .map_err(domain)
        }
        (spec, Some(w)) => {
            let order = a.order.unwrap_or(DEFAULT_APPROX_ORDER);
            let f = convergent(spec, order).map_err(domain)?;
            let mut s = spectrum_fixed_phase(a.lambda, f, w, a.edge_tol).map_err(domain)?;
            s.approx_order = order;
            s.freq_spec = Some(spec.to_string());
            Ok(s)
        }
    }
}

fn collect_sets(a: &SetsArgs) -> Result<Vec<IntervalUnion>, CliError> {
    if a.freqs.len() != a.lambdas.len() {
        return Err(CliError::Usage(format!(
            "--freq given {} times but --lambda {} times; they pair up",
            a.freqs.len(),
            a.lambdas.len()
        )));
    }
    let mut sets = a.sets.clone();
    for (spec, &lambda) in a.freqs.iter().zip(&a.lambdas) {
        let args = SpectrumArgs {
            lambda,
            freq: spec.clone(),
            order: Some(a.order),
            phase: None,
            edge_tol: a.edge_tol,
            gap_close_tol: None,
        };
        sets.push(compute_spectrum(&args)?.union);
    }
    if sets.len() < 2 {
        return Err(CliError::Usage("need at least two sets (--set or --freq/--lambda pairs)".into()));
    }
    Ok(sets)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, CliError> {
    let bad = || CliError::Usage(format!("--grid expects lo:hi:count, got {s:?}"));
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else { return Err(bad()) };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    let n: usize = n.parse().map_err(|_| bad())?;
    if n < 2 || !(hi > lo) {
        return Err(bad());
    }
    Ok((0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect())
}

fn execute(cmd: &Command) -> Result<Output, CliError> {
    match cmd {
        Command::Spectrum(a) => {
            let s = compute_spectrum(a)?;
            Ok(Output { invocation: to_value(a), json: to_value(&s), csv: spectrum_csv(&s.union) })
        }
        Command::Butterfly { lambda, qmax, edge_tol } => {
            let rows = butterfly(*lambda, *qmax, *edge_tol).map_err(domain)?;
            Ok(Output {
                invocation: json!({"lambda": lambda, "qmax": qmax, "edge_tol": edge_tol,
                    "gap_close_tol": default_gap_close_tol(*lambda)}),
                json: to_value(&rows),
                csv: butterfly_csv(&rows),
            })
        }
        Command::Thickness { set, cantor: level, lambda, freq, order } => {
            let (k, source) = match (set, level, lambda, freq) {
                (Some(k), None, None, None) => (k.clone(), json!({"set": k})),
                (None, Some(n), None, None) => (cantor::middle_thirds(*n), json!({"cantor": n})),
                (None, None, Some(l), Some(f)) => {
                    let args = SpectrumArgs {
                        lambda: *l,
                        freq: f.clone(),
                        order: Some(*order),
                        phase: None,
                        edge_tol: DEFAULT_EDGE_TOL,
                        gap_close_tol: None,
                    };
                    (compute_spectrum(&args)?.union, to_value(&args))
                }
                _ => {
                    return Err(CliError::Usage(
                        "thickness takes exactly one of --set, --cantor, or --lambda with --freq".into(),
                    ))
                }
            };
            let report = thickness(&k);
            let mut csv = String::from("gap_lo,gap_hi,left_plank,right_plank,local_tau\n");
            for g in &report.gaps {
                csv.push_str(&format!(
                    "{:?},{:?},{:?},{:?},{:?}\n",
                    g.gap.lo, g.gap.hi, g.left_plank_len, g.right_plank_len, g.local_tau
                ));
            }
            Ok(Output { invocation: source, json: json!({"set": k, "thickness": report}), csv })
        }
        Command::Sum(a) => {
            let sets = collect_sets(a)?;
            let sum = minkowski_sum_all(&sets).expect("two or more sets");
            let th = thickness(&sum);
            Ok(Output {
                invocation: to_value(a),
                csv: spectrum_csv(&sum),
                json: json!({"sets": sets, "sum": sum, "is_interval": sum.is_interval(), "thickness": th}),
            })
        }
        Command::Check { sets, search_orderings } => {
            let ks = collect_sets(sets)?;
            let opts = AstelsOptions { search_orderings: *search_orderings };
            let report = verify_prediction_with(&ks, opts).map_err(domain)?;
            let mut csv = String::from("condition,holds\n");
            for c in &report.verdict.conditions {
                csv.push_str(&format!("\"{}\",{}\n", c.name.replace('"', "\"\""), c.holds));
            }
            let mut inv = to_value(sets);
            inv["search_orderings"] = json!(search_orderings);
            Ok(Output { invocation: inv, json: json!({"sets": ks, "report": report}), csv })
        }
        Command::Ids { lambda, freq, phase, volume, phase_avg, grid } => {
            let bound = 2.0 + 2.0 * lambda.abs() + 0.5;
            let grid_spec = grid.clone().unwrap_or_else(|| format!("{}:{}:201", -bound, bound));
            let xs = parse_grid(&grid_spec)?;
            let params = IdsParams::new(*lambda, freq.clone(), *phase);
            let curve = ids_curve(&params, *volume, *phase_avg, &xs).map_err(domain)?;
            Ok(Output {
                invocation: json!({"lambda": lambda, "freq": freq, "phase": phase, "volume": volume,
                    "phase_avg": phase_avg, "grid": grid_spec}),
                csv: curve.to_csv(),
                json: to_value(&curve),
            })
        }
        Command::Label { lambda, freq, order, volume, phase_avg, n_max, tol } => {
            let tol = tol.unwrap_or_else(|| default_label_tol(*volume));
            let args = SpectrumArgs {
                lambda: *lambda,
                freq: freq.clone(),
                order: Some(*order),
                phase: None,
                edge_tol: DEFAULT_EDGE_TOL,
                gap_close_tol: None,
            };
            let spectrum = compute_spectrum(&args)?;
            let params = IdsParams::new(*lambda, freq.clone(), 0.0);
            let curve = ids_at_gaps(&params, &spectrum, *volume, *phase_avg).map_err(domain)?;
            let report = label_gaps(&spectrum, &curve, *n_max, tol).map_err(domain)?;
            let mut csv = String::from("gap_index,gap_lo,gap_hi,label_n,ids_value,residual\n");
            for a in &report.labeled {
                csv.push_str(&format!(
                    "{},{:?},{:?},{},{:?},{:?}\n",
                    a.gap_index, a.gap.lo, a.gap.hi, a.label_n, a.ids_value, a.residual
                ));
            }
            for u in &report.unlabeled {
                csv.push_str(&format!("{},{:?},{:?},,{:?},{:?}\n", u.gap_index, u.gap.lo, u.gap.hi, u.ids_value, u.best_residual));
            }
            Ok(Output {
                invocation: json!({"lambda": lambda, "freq": freq, "order": order, "volume": volume,
                    "phase_avg": phase_avg, "n_max": n_max, "tol": tol, "edge_tol": DEFAULT_EDGE_TOL}),
                json: json!({"spectrum": spectrum, "labels": report}),
                csv,
            })
        }
        Command::Dc { freq, t, qmax, variant } => {
            let v = match variant {
                VariantArg::Plain => DcVariant::Plain,
                VariantArg::TwoPi => DcVariant::TwoPi,
            };
            let r = dc_constants(freq, *t, *qmax, v).map_err(domain)?;
            let csv = format!("freq,variant,t,q_max,c_best,argmin_q\n{},{},{:?},{},{:?},{}\n",
                r.freq, variant_name(*variant), r.t, r.q_max, r.c_best, r.argmin_q);
            Ok(Output {
                invocation: json!({"freq": freq, "t": t, "qmax": qmax, "variant": variant}),
                json: to_value(&r),
                csv,
            })
        }
        Command::Pipeline { config } => {
            let cfg = load_config(config).map_err(config_error)?;
            let report = run_main_theorem(&cfg).map_err(domain)?;
            Ok(Output { invocation: json!({"config": cfg}), csv: report.to_csv(), json: to_value(&report) })
        }
        Command::Threshold { config, lo, hi, steps } => {
            let cfg = load_config(config).map_err(config_error)?;
            let report = find_threshold(&cfg, (*lo, *hi), *steps).map_err(domain)?;
            let mut csv = String::from("lambda,oracle_parts,is_interval\n");
            for p in &report.probes {
                csv.push_str(&format!("{:?},{},{}\n", p.lambda, p.oracle_parts, p.is_interval));
            }
            Ok(Output {
                invocation: json!({"config": cfg, "lo": lo, "hi": hi, "steps": steps}),
                json: to_value(&report),
                csv,
            })
        }
    }
}

fn variant_name(v: VariantArg) -> &'static str {
    match v {
        VariantArg::Plain => "plain",
        VariantArg::TwoPi => "two_pi",
    }
}

fn config_error(e: crate::pipeline::ConfigError) -> CliError {
    match e {
        crate::pipeline::ConfigError::Io { .. } => CliError::Usage(e.to_string()),
        _ => CliError::Domain(e.to_string()),
    }
}

/// Write `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(&dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn render(name: &str, format: Format, out: Output) -> String {
    match format {
        Format::Json => {
            let doc = json!({"command": name, "invocation": out.invocation, "result": out.json});
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
        Format::Csv => format!("# quasisum {name} {}\n{}", out.invocation, out.csv),
    }
}

fn output_path(cli: &Cli) -> Option<PathBuf> {
    cli.common.output.clone().or_else(|| {
        std::env::var_os(OUT_DIR_ENV)
            .map(|dir| Path::new(&dir).join(format!("{}.{}", cli.command.name(), cli.common.format.ext())))
    })
}

/// Run a parsed invocation, writing its output; returns the exit code.
pub fn dispatch(cli: &Cli) -> i32 {
    let work = || execute(&cli.command);
    let result = match cli.common.threads {
        Some(0) => Err(CliError::Usage("--threads must be >= 1".into())),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(work),
            Err(e) => Err(CliError::Domain(e.to_string())),
        },
        None => work(),
    };
    let out = match result {
        Ok(out) => out,
        Err(e) => {
            eprintln!("error: {e}");
            if let CliError::Usage(_) = e {
                eprintln!("usage: quasisum {} [OPTIONS]  (see quasisum {} --help)", cli.command.name(), cli.command.name());
            }
            return e.exit_code();
        }
    };
    let text = render(cli.command.name(), cli.common.format, out);
    match output_path(cli) {
        Some(path) => match write_atomic(&path, text.as_bytes()) {
            Ok(()) => 0,
            Err(e) => {
                eprintln!("error: cannot write {}: {e}", path.display());
                1
            }
        },
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(text.as_bytes()) {
                Ok(()) => 0,
                Err(e) => {
                    eprintln!("error: {e}");
                    1
                }
            }
        }
    }
}

/// Parse `args` (including the program name) and run; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli),
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            code
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(args: &[&str]) -> Result<Cli, clap::Error> {
        Cli::try_parse_from(std::iter::once("quasisum").chain(args.iter().copied()))
    }

    #[test]
    fn malformed_rational_is_usage_error() {
        let e = parse(&["sum", "--freq", "1/0", "--lambda", "0.1"]).unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }

    #[test]
    fn negative_coupling_parses() {
        let cli = parse(&["spectrum", "--lambda", "-0.3", "--freq", "1/3"]).unwrap();
        match cli.command {
            Command::Spectrum(a) => assert_eq!(a.lambda, -0.3),
            _ => unreachable!(),
        }
    }

    #[test]
    fn format_defaults_to_json() {
        let cli = parse(&["dc", "--freq", "[0;(1)]", "--t", "2", "--qmax", "10"]).unwrap();
        assert_eq!(cli.common.format, Format::Json);
    }

    #[test]
    fn grid_parsing() {
        assert_eq!(parse_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        assert!(parse_grid("0:1").is_err());
        assert!(parse_grid("1:0:5").is_err());
    }

    #[test]
    fn unpaired_spectra_rejected() {
        let a = SetsArgs {
            sets: vec![],
            freqs: vec![FrequencySpec::golden_mean()],
            lambdas: vec![],
            order: 7,
            edge_tol: 1e-10,
        };
        assert!(matches!(collect_sets(&a), Err(CliError::Usage(_))));
    }

    #[test]
    fn spectrum_output_carries_tolerances() {
        let cli = parse(&["spectrum", "--lambda", "0", "--freq", "1/5"]).unwrap();
        let out = execute(&cli.command).unwrap();
        let text = render("spectrum", Format::Json, out);
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["result"]["union"]["parts"].as_array().unwrap().len(), 1);
        assert_eq!(v["result"]["edge_tol"], json!(1e-10));
        assert_eq!(v["invocation"]["edge_tol"], json!(1e-10));
    }
}
