use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{error::ErrorKind, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use super::convergence::{run_convergence, SweepAxis};
use crate::bounds::pointwise_report;
use crate::cubature::{build_rule, integrate_with_moduli, write_rule, DEFAULT_QUADRATURE_POINTS};
use crate::error::Error;
use crate::format::{g17, Sig17};
use crate::grid::GridSpec;
use crate::gruss::{d_functional, oscillation_bound_i, t_pointwise, BOUND_OSCILLATION};
use crate::moduli::{ConcaveMajorant, DEFAULT_METRIC_RESOLUTION};
use crate::operators::tensor_composite;
use crate::registry::{lookup, reference_integral, standard_corpus};

#[derive(Debug, Parser)]
#[command(
    name = "bernstein-cubature",
    version,
    about = "Composite Bernstein operators, cubature and their error bounds"
)]
struct Cli {
    /// Write output to FILE instead of stdout.
    #[arg(short = 'o', long = "output", global = true, value_name = "FILE")]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operator surface B̄F on a uniform sample grid (CSV).
    Eval {
        #[command(flatten)]
        target: Target,
        /// Sample points per axis.
        #[arg(long, default_value_t = 11)]
        samples: usize,
    },
    /// Cubature value, remainder and integrated bounds (JSON).
    Cubature {
        #[command(flatten)]
        target: Target,
        /// Gauss-Legendre points per cell for the modulus bound.
        #[arg(long, default_value_t = DEFAULT_QUADRATURE_POINTS)]
        quadrature_points: usize,
        /// Print the node/weight table `x y w` instead of the report.
        #[arg(long)]
        dump_rule: bool,
    },
    /// Pointwise error and bounds on a uniform sample grid (CSV).
    Bounds {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 21)]
        samples: usize,
    },
    /// Grüss reports for D(f, g) and T(f, g; x, y) (JSON).
    Gruss {
        #[command(flatten)]
        target: Target,
        /// Second function.
        #[arg(short = 'g', long = "with", value_name = "NAME")]
        with: String,
        #[arg(long, default_value_t = 0.5)]
        x: f64,
        #[arg(long, default_value_t = 0.5)]
        y: f64,
        /// Grid resolution of the metric modulus behind ω̃.
        #[arg(long, default_value_t = DEFAULT_METRIC_RESOLUTION)]
        resolution: usize,
    },
    /// Remainder table and empirical orders (CSV).
    Converge {
        #[arg(short = 'f', long = "function", value_name = "NAME")]
        function: String,
        #[arg(long, value_enum, default_value_t = Sweep::N)]
        sweep: Sweep,
        /// Swept values (n for `n` and `both`, m for `m`).
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<usize>,
        /// m values for `--sweep both`.
        #[arg(long, value_delimiter = ',')]
        m_values: Vec<usize>,
        /// Fixed n when sweeping m.
        #[arg(long, default_value_t = 1)]
        n: usize,
        /// Fixed m when sweeping n.
        #[arg(long, default_value_t = 1)]
        m: usize,
    },
    /// Registry functions with tags and exact integrals.
    ListFunctions,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Sweep {
    N,
    M,
    Both,
}

#[derive(Debug, Args)]
struct Target {
    /// Registry function name.
    #[arg(short = 'f', long = "function", value_name = "NAME")]
    function: String,
    #[arg(long, default_value_t = 1)]
    n1: usize,
    #[arg(long, default_value_t = 1)]
    n2: usize,
    #[arg(long, default_value_t = 1)]
    m1: usize,
    #[arg(long, default_value_t = 1)]
    m2: usize,
}

impl Target {
    fn grid(&self) -> Result<GridSpec, Error> {
        GridSpec::new(self.n1, self.n2, self.m1, self.m2)
    }
}

enum Failure {
    Usage(String),
    Domain(Error),
    Io(std::io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Domain(e)
    }
}

/// Runs the CLI on `argv` (program name first) and returns the exit code:
/// 0 on success, 2 on usage errors, 1 on domain or I/O errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 2,
            };
            let _ = e.print();
            return code;
        }
    };
    let result = execute(&cli.command).and_then(|text| emit(cli.output.as_ref(), &text));
    match result {
        Ok(()) => 0,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(Failure::Domain(e)) => {
            eprintln!("error: {e}");
            1
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(Failure::Io),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|_| out.flush())
                .map_err(Failure::Io)
        }
    }
}

fn execute(command: &Command) -> Result<String, Failure> {
    match command {
        Command::Eval { target, samples } => eval(target, *samples),
        Command::Cubature {
            target,
            quadrature_points,
            dump_rule,
        } => cubature(target, *quadrature_points, *dump_rule),
        Command::Bounds { target, samples } => bounds(target, *samples),
        Command::Gruss {
            target,
            with,
            x,
            y,
            resolution,
        } => gruss(target, with, *x, *y, *resolution),
        Command::Converge {
            function,
            sweep,
            values,
            m_values,
            n,
            m,
        } => converge(function, *sweep, values, m_values, *n, *m),
        Command::ListFunctions => Ok(list_functions()),
    }
}

fn sample_points(samples: usize) -> Result<Vec<f64>, Failure> {
    if samples < 2 {
        return Err(Failure::Usage(format!(
            "--samples {samples} must be at least 2"
        )));
    }
    let last = (samples - 1) as f64;
    Ok((0..samples).map(|i| i as f64 / last).collect())
}

fn eval(target: &Target, samples: usize) -> Result<String, Failure> {
    let entry = lookup(&target.function)?;
    let grid = target.grid()?;
    let pts = sample_points(samples)?;
    let mut out = String::from("x,y,f,operator,abs_error\n");
    for &x in &pts {
        for &y in &pts {
            let f = entry.field.eval(x, y);
            let b = tensor_composite(&entry.field, &grid, x, y)?;
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                g17(x),
                g17(y),
                g17(f),
                g17(b),
                g17((f - b).abs())
            );
        }
    }
    Ok(out)
}

fn sig_map(map: &BTreeMap<String, f64>) -> BTreeMap<String, Sig17> {
    map.iter().map(|(k, &v)| (k.clone(), Sig17(v))).collect()
}

#[derive(Serialize)]
struct CubatureJson<'a> {
    function: &'a str,
    grid: GridSpec,
    value: Sig17,
    reference: Option<Sig17>,
    remainder: Option<Sig17>,
    bounds: BTreeMap<String, Sig17>,
    tightness: BTreeMap<String, Sig17>,
}

fn to_json<T: Serialize>(value: &T) -> Result<String, Failure> {
    serde_json::to_string_pretty(value)
        .map(|s| s + "\n")
        .map_err(|e| Failure::Io(e.into()))
}

fn cubature(target: &Target, quadrature_points: usize, dump_rule: bool) -> Result<String, Failure> {
    let entry = lookup(&target.function)?;
    let grid = target.grid()?;
    if dump_rule {
        let mut buf = Vec::new();
        write_rule(&build_rule(&grid), &mut buf).map_err(Failure::Io)?;
        return Ok(String::from_utf8(buf).expect("ascii output"));
    }
    let result = integrate_with_moduli(&entry.field, &grid, &entry, quadrature_points)?
        .with_reference(reference_integral(&entry.field)?);
    to_json(&CubatureJson {
        function: entry.name(),
        grid,
        value: Sig17(result.value),
        reference: result.reference.map(Sig17),
        remainder: result.remainder.map(Sig17),
        bounds: sig_map(&result.bounds),
        tightness: sig_map(&result.tightness()),
    })
}

fn bounds(target: &Target, samples: usize) -> Result<String, Failure> {
    let entry = lookup(&target.function)?;
    let grid = target.grid()?;
    let pts = sample_points(samples)?;
    let mut out = String::from("x,y,actual_error,moduli,three_term\n");
    for &x in &pts {
        for &y in &pts {
            let r = pointwise_report(&entry.field, &entry, &grid, x, y)?;
            let three = r
                .bounds
                .get("three_term")
                .map(|&v| g17(v))
                .unwrap_or_default();
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                g17(x),
                g17(y),
                g17(r.actual_error),
                g17(r.bounds["moduli"]),
                three
            );
        }
    }
    Ok(out)
}

#[derive(Serialize)]
struct ReportJson {
    value: Sig17,
    second_moment: Option<Sig17>,
    psi: Option<Sig17>,
    bounds: BTreeMap<String, Sig17>,
    tightness: BTreeMap<String, Sig17>,
}

#[derive(Serialize)]
struct PointJson {
    x: Sig17,
    y: Sig17,
    #[serde(flatten)]
    report: ReportJson,
}

#[derive(Serialize)]
struct GrussJson<'a> {
    function: &'a str,
    function_g: &'a str,
    grid: GridSpec,
    d: ReportJson,
    t: PointJson,
}

fn report_json(r: &crate::gruss::GrussReport) -> ReportJson {
    ReportJson {
        value: Sig17(r.value),
        second_moment: r.second_moment.map(Sig17),
        psi: r.psi.map(Sig17),
        bounds: sig_map(&r.bounds),
        tightness: sig_map(&r.tightness()),
    }
}

fn gruss(
    target: &Target,
    with: &str,
    x: f64,
    y: f64,
    resolution: usize,
) -> Result<String, Failure> {
    let f = lookup(&target.function)?;
    let g = lookup(with)?;
    let grid = target.grid()?;
    let wf = ConcaveMajorant::of_metric_modulus(&f.field, resolution)?;
    let wg = if f.name() == g.name() {
        wf.clone()
    } else {
        ConcaveMajorant::of_metric_modulus(&g.field, resolution)?
    };
    let mut d = d_functional(&f.field, &g.field, &grid, &wf, &wg);
    let osc = oscillation_bound_i(&f.field, &g.field, &grid);
    d.bounds
        .insert(BOUND_OSCILLATION.to_string(), osc.bounds[BOUND_OSCILLATION]);
    let t = t_pointwise(&f.field, &g.field, &grid, x, y, &wf, &wg)?;
    to_json(&GrussJson {
        function: f.name(),
        function_g: g.name(),
        grid,
        d: report_json(&d),
        t: PointJson {
            x: Sig17(x),
            y: Sig17(y),
            report: report_json(&t),
        },
    })
}

fn converge(
    function: &str,
    sweep: Sweep,
    values: &[usize],
    m_values: &[usize],
    n: usize,
    m: usize,
) -> Result<String, Failure> {
    let (n_list, m_list, axis) = match sweep {
        Sweep::N => (values.to_vec(), vec![m], SweepAxis::N),
        Sweep::M => (vec![n], values.to_vec(), SweepAxis::M),
        Sweep::Both => {
            if m_values.is_empty() {
                return Err(Failure::Usage("--sweep both requires --m-values".into()));
            }
            (values.to_vec(), m_values.to_vec(), SweepAxis::Both)
        }
    };
    let rows = run_convergence(function, &n_list, &m_list, axis)?;
    let opt = |v: Option<f64>| v.map(g17).unwrap_or_default();
    let bound = |r: &BTreeMap<String, f64>, k: &str| r.get(k).map(|&v| g17(v)).unwrap_or_default();
    let mut out = String::from(
        "n1,n2,m1,m2,remainder,three_term,two_term,moduli_integrated,order_n,order_m\n",
    );
    for r in &rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.grid.n1,
            r.grid.n2,
            r.grid.m1,
            r.grid.m2,
            g17(r.remainder),
            bound(&r.bounds, "three_term"),
            bound(&r.bounds, "two_term"),
            bound(&r.bounds, "moduli_integrated"),
            opt(r.empirical_order_n),
            opt(r.empirical_order_m)
        );
    }
    Ok(out)
}

fn list_functions() -> String {
    let mut out = format!("{:<20} {:<36} {}\n", "name", "tags", "exact_integral");
    for e in standard_corpus() {
        let integral = e
            .field
            .exact_integral()
            .map(g17)
            .unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<20} {:<36} {}",
            e.name(),
            e.tags.join(","),
            integral
        );
    }
    out
}
