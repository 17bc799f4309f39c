//! The `lane-emden` command-line tool.
//!
//! Every subcommand writes plain text or CSV to a caller-supplied writer so
//! the same code serves the binary and the tests. Exit codes: 0 success,
//! 1 failed verification, 2 any error.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::elliptic::{weierstrass_real_period, WeierstrassInvariants};
use crate::error::Error;
use crate::factor::{cardano_roots, classify, modulus_k, positive_root_f, sextic_eval, Regime};
use crate::families::{
    apply_scaling, calibrate_b, scaling_lambda, scaling_parity, Branch, Sample, Solution,
    SolutionParams,
};
use crate::oracle::{log_space, sextic_roots_oracle};
use crate::verify::{self, Fault, Thresholds};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Lib(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed table, line {line}: {msg}")]
    Table { line: usize, msg: String },
    #[error("{0}")]
    Usage(String),
}

fn stdout_err(source: io::Error) -> CliError {
    CliError::Io {
        path: "<output>".into(),
        source,
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "lane-emden",
    version,
    about = "Closed-form n = 5 Lane-Emden solutions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone, Copy)]
pub struct ConstantArg {
    /// Energy constant C.
    #[arg(short = 'C', long = "constant", allow_negative_numbers = true)]
    pub c: f64,
}

#[derive(Debug, Args, Clone)]
pub struct SolutionArgs {
    #[command(flatten)]
    pub constant: ConstantArg,
    /// Scale constant B > 0.
    #[arg(short = 'B', long = "scale", default_value_t = 1.0)]
    pub b: f64,
    /// Overall sign: + or -.
    #[arg(long, default_value = "+", allow_hyphen_values = true)]
    pub branch: Branch,
    /// Representation to use. Defaults to the one selected by C; `weierstrass`
    /// is also accepted for 0 < C < 2.
    #[arg(long)]
    pub family: Option<String>,
}

impl SolutionArgs {
    pub fn params(&self) -> Result<SolutionParams, CliError> {
        let c = self.constant.c;
        match self.family.as_deref() {
            None => Ok(SolutionParams::new(c, self.b, self.branch)?),
            Some(name) if name.eq_ignore_ascii_case("weierstrass") => {
                Ok(SolutionParams::weierstrass(c, self.b, self.branch)?)
            }
            Some(name) => {
                let wanted: Regime = name.parse()?;
                if wanted == Regime::WeierstrassFamily {
                    return Ok(SolutionParams::weierstrass(c, self.b, self.branch)?);
                }
                let params = SolutionParams::new(c, self.b, self.branch)?;
                if params.family != wanted {
                    return Err(CliError::Usage(format!(
                        "C = {c} belongs to {}, not {wanted}",
                        params.family
                    )));
                }
                Ok(params)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FaultArg {
    /// Pass k² where the modulus k is expected.
    KSquared,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regime, roots, modulus and invariants for a constant C.
    Classify(ConstantArg),
    /// Real roots of -z⁶ + 3z² + C, closed form against bisection.
    Roots(ConstantArg),
    /// Evaluate θ and dθ/dξ at the given radii.
    Eval {
        #[command(flatten)]
        solution: SolutionArgs,
        #[arg(required = true)]
        xi: Vec<f64>,
    },
    /// Tabulate a solution as CSV.
    Sample {
        #[command(flatten)]
        solution: SolutionArgs,
        #[arg(long, default_value_t = 0.05)]
        xi_min: f64,
        #[arg(long, default_value_t = 20.0)]
        xi_max: f64,
        #[arg(short = 'n', long, default_value_t = 400)]
        points: usize,
        /// Space ξ linearly instead of logarithmically.
        #[arg(long)]
        linear: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Curve data for figure 1 (dc family) or 2 (oscillating families).
    Figure {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=2))]
        id: u8,
        #[arg(short = 'n', long, default_value_t = 400)]
        points: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run the self-check battery. Thresholds can be overridden through
    /// LE_VERIFY_TOL, e.g. `1e-6` or `residual=1e-6,energy=1e-8`.
    Verify {
        /// Comma-separated constants; defaults to the acceptance grid.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        grid: Option<Vec<f64>>,
        #[arg(long)]
        json: bool,
        #[arg(long, value_enum)]
        inject_fault: Option<FaultArg>,
    },
    /// Discrete scale factor λ(C, m) and how well θ(ξ/λ)/sqrt(λ) reproduces θ.
    Lambda {
        #[command(flatten)]
        constant: ConstantArg,
        #[arg(short, long, default_value_t = 1, allow_negative_numbers = true)]
        m: i32,
    },
}

/// Parses the process arguments, runs, and reports errors on stderr.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(&cli, &mut out) {
        Ok(code) => ExitCode::from(code),
        // reader closed early, e.g. `| head`
        Err(CliError::Io { source, .. }) if source.kind() == io::ErrorKind::BrokenPipe => {
            ExitCode::SUCCESS
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("lane-emden: {e}");
            ExitCode::from(2)
        }
    }
}

/// Runs one subcommand; returns the exit code for non-error outcomes.
pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<u8, CliError> {
    match &cli.command {
        Command::Classify(arg) => emit(out, &classify_report(arg.c)?)?,
        Command::Roots(arg) => emit(out, &roots_report(arg.c)?)?,
        Command::Eval { solution, xi } => {
            let sol = Solution::new(solution.params()?)?;
            let mut text = String::from("xi,theta,dtheta\n");
            for &x in xi {
                let s = sol.eval(x)?;
                writeln!(text, "{},{},{}", num(s.xi), num(s.theta), num(s.dtheta)).unwrap();
            }
            emit(out, &text)?;
        }
        Command::Sample {
            solution,
            xi_min,
            xi_max,
            points,
            linear,
            output,
        } => {
            let table = sample_table(&solution.params()?, *xi_min, *xi_max, *points, !linear)?;
            write_table(&table, output.as_deref(), out)?;
        }
        Command::Figure { id, points, output } => {
            let table = figure_table(*id, *points)?;
            write_table(&table, output.as_deref(), out)?;
        }
        Command::Verify {
            grid,
            json,
            inject_fault,
        } => {
            let thresholds = Thresholds::from_env()?;
            let fault = match inject_fault {
                Some(FaultArg::KSquared) => Fault::ModulusSquared,
                None => Fault::None,
            };
            let grid = grid.as_deref().unwrap_or(&verify::DEFAULT_GRID);
            let records = verify::run(grid, &thresholds, fault);
            let text = if *json {
                verify::json_report(&records) + "\n"
            } else {
                verify::text_report(&records)
            };
            emit(out, &text)?;
            return Ok(if verify::all_pass(&records) { 0 } else { 1 });
        }
        Command::Lambda { constant, m } => emit(out, &lambda_report(constant.c, *m)?)?,
    }
    Ok(0)
}

fn emit(out: &mut dyn Write, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes()).map_err(stdout_err)
}

fn write_table(
    table: &SampleTable,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    match path {
        None => table.write_csv(out).map_err(stdout_err),
        Some(p) => {
            let io_err = |source| CliError::Io {
                path: p.display().to_string(),
                source,
            };
            let mut file = io::BufWriter::new(std::fs::File::create(p).map_err(io_err)?);
            table.write_csv(&mut file).map_err(io_err)?;
            file.flush().map_err(io_err)
        }
    }
}

/// 17 significant digits, enough to reproduce every `f64`.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn classify_report(c: f64) -> Result<String, CliError> {
    let regime = classify(c)?;
    let mut s = String::new();
    writeln!(s, "C: {c}").unwrap();
    writeln!(s, "regime: {regime}").unwrap();
    match regime {
        Regime::DcFamily | Regime::ScFamily => {
            let r = cardano_roots(c)?;
            writeln!(s, "roots (a, b, c): ({}, {}, {})", r.a, r.b, r.c).unwrap();
            let m = modulus_k(&r)?;
            writeln!(s, "modulus k: {}", m.k()).unwrap();
        }
        Regime::Srivastava | Regime::WeierstrassFamily => {
            writeln!(s, "root f: {}", positive_root_f(c)?.f).unwrap();
        }
        _ => {}
    }
    if c > 0.0 {
        let inv = WeierstrassInvariants::lane_emden(c);
        writeln!(s, "invariants (g2, g3): ({}, {})", inv.g2(), inv.g3()).unwrap();
        writeln!(s, "discriminant: {}", inv.discriminant()).unwrap();
        if c != 2.0 {
            writeln!(s, "real period 2w: {}", weierstrass_real_period(inv)?).unwrap();
        }
    }
    if let Ok(lambda) = scaling_lambda(c, 1) {
        writeln!(s, "lambda(1): {lambda}").unwrap();
        writeln!(s, "parity(1): {}", scaling_parity(c, 1)?).unwrap();
    }
    Ok(s)
}

pub fn roots_report(c: f64) -> Result<String, CliError> {
    let regime = classify(c)?;
    let mut s = String::new();
    writeln!(s, "C: {c}").unwrap();
    writeln!(s, "regime: {regime}").unwrap();
    let mut closed: Vec<f64> = match regime {
        Regime::NoRealSolution => Vec::new(),
        Regime::SingularFixedPoint => vec![1.0],
        Regime::Schuster => vec![0.0, 3f64.sqrt().sqrt()],
        Regime::DcFamily => {
            let r = cardano_roots(c)?;
            vec![r.a.sqrt(), r.b.sqrt()]
        }
        Regime::ScFamily => vec![cardano_roots(c)?.c.sqrt()],
        Regime::Srivastava | Regime::WeierstrassFamily => vec![positive_root_f(c)?.f.sqrt()],
    };
    let negatives: Vec<f64> = closed.iter().filter(|&&z| z != 0.0).map(|z| -z).collect();
    closed.extend(negatives);
    closed.sort_by(f64::total_cmp);
    let oracle = sextic_roots_oracle(c);
    writeln!(s, "z,w(z),bisection").unwrap();
    for (i, z) in closed.iter().enumerate() {
        let o = oracle.get(i).map_or("-".to_string(), |v| num(*v));
        writeln!(s, "{},{},{}", num(*z), num(sextic_eval(*z, c)), o).unwrap();
    }
    Ok(s)
}

pub fn lambda_report(c: f64, m: i32) -> Result<String, CliError> {
    let lambda = scaling_lambda(c, m)?;
    let parity = scaling_parity(c, m)?;
    let params = SolutionParams::new(c, 1.0, Branch::Plus)?;
    let sol = Solution::new(params)?;
    let image = Solution::new(apply_scaling(&params, lambda)?)?;
    let mut dev = 0.0_f64;
    for xi in log_space(0.1, 10.0, 200) {
        let lhs = image.theta(xi)?;
        let rhs = parity * sol.theta(xi)?;
        dev = dev.max((lhs - rhs).abs());
    }
    let mut s = String::new();
    writeln!(s, "C: {c}").unwrap();
    writeln!(s, "m: {m}").unwrap();
    writeln!(s, "lambda: {}", num(lambda)).unwrap();
    writeln!(s, "parity: {parity}").unwrap();
    writeln!(s, "max deviation: {dev:.3e}").unwrap();
    Ok(s)
}

/// A CSV table: `# key: value` metadata lines, one header row, numeric rows.
/// The first column is `xi`, strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTable {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SampleTable {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.meta
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv(&self, w: &mut dyn Write) -> io::Result<()> {
        for (k, v) in &self.meta {
            writeln!(w, "# {k}: {v}")?;
        }
        writeln!(w, "{}", self.columns.join(","))?;
        let mut line = String::new();
        for row in &self.rows {
            line.clear();
            for (i, x) in row.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&num(*x));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("csv is ascii")
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let bad = |line: usize, msg: String| CliError::Table {
            line: line + 1,
            msg,
        };
        let mut meta = Vec::new();
        let mut columns: Option<Vec<String>> = None;
        let mut rows = Vec::new();
        for (n, line) in text.lines().enumerate() {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .trim_start()
                    .split_once(": ")
                    .ok_or_else(|| bad(n, "metadata line without `key: value`".into()))?;
                meta.push((k.to_string(), v.to_string()));
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            match &columns {
                None => columns = Some(line.split(',').map(str::to_string).collect()),
                Some(cols) => {
                    let row = line
                        .split(',')
                        .map(|f| f.trim().parse::<f64>())
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| bad(n, e.to_string()))?;
                    if row.len() != cols.len() {
                        return Err(bad(
                            n,
                            format!("{} fields, expected {}", row.len(), cols.len()),
                        ));
                    }
                    rows.push(row);
                }
            }
        }
        let columns = columns.ok_or_else(|| bad(0, "missing header row".into()))?;
        let table = SampleTable {
            meta,
            columns,
            rows,
        };
        table.validate()?;
        Ok(table)
    }

    /// Rows strictly increasing in the first column, all values finite.
    pub fn validate(&self) -> Result<(), CliError> {
        for (i, row) in self.rows.iter().enumerate() {
            if let Some(x) = row.iter().find(|x| !x.is_finite()) {
                return Err(CliError::Table {
                    line: i + 1,
                    msg: format!("non-finite value {x}"),
                });
            }
            if i > 0 && row[0] <= self.rows[i - 1][0] {
                return Err(CliError::Table {
                    line: i + 1,
                    msg: "xi is not strictly increasing".into(),
                });
            }
        }
        Ok(())
    }

    /// Rows as [`Sample`]s, for a table with `xi,theta,dtheta` columns.
    pub fn samples(&self) -> Option<Vec<Sample>> {
        let (xi, theta, dtheta) = (
            self.column("xi")?,
            self.column("theta")?,
            self.column("dtheta")?,
        );
        Some(
            (0..xi.len())
                .map(|i| Sample {
                    xi: xi[i],
                    theta: theta[i],
                    dtheta: dtheta[i],
                })
                .collect(),
        )
    }
}

fn spacing(lo: f64, hi: f64, n: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if !(lo.is_finite() && hi.is_finite() && hi > lo && lo >= 0.0) || n < 2 {
        return Err(CliError::Usage(format!(
            "need 0 <= xi_min < xi_max and at least 2 points, got [{lo}, {hi}] with {n}"
        )));
    }
    if log {
        if lo == 0.0 {
            return Err(CliError::Usage("log spacing needs xi_min > 0".into()));
        }
        return Ok(log_space(lo, hi, n));
    }
    let mut v: Vec<f64> = (0..n)
        .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
        .collect();
    v[n - 1] = hi;
    Ok(v)
}

pub fn sample_table(
    params: &SolutionParams,
    xi_min: f64,
    xi_max: f64,
    n: usize,
    log: bool,
) -> Result<SampleTable, CliError> {
    let sol = Solution::new(*params)?;
    let rows = spacing(xi_min, xi_max, n, log)?
        .into_iter()
        .map(|xi| sol.eval(xi).map(|s| vec![s.xi, s.theta, s.dtheta]))
        .collect::<Result<Vec<_>, _>>()?;
    let meta = vec![
        ("family".to_string(), params.family.to_string()),
        ("C".to_string(), params.c.to_string()),
        ("B".to_string(), params.b.to_string()),
        ("branch".to_string(), params.branch.to_string()),
        ("version".to_string(), VERSION.to_string()),
    ];
    let table = SampleTable {
        meta,
        columns: vec!["xi".into(), "theta".into(), "dtheta".into()],
        rows,
    };
    table.validate()?;
    Ok(table)
}

/// Constants drawn in each figure.
pub fn figure_constants(id: u8) -> Result<&'static [f64], CliError> {
    match id {
        1 => Ok(&[-2.0, -1.5, -1.0, -0.5]),
        2 => Ok(&[0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5]),
        _ => Err(CliError::Usage(format!("no figure {id}; expected 1 or 2"))),
    }
}

/// The solutions drawn in a figure. Figure 1 pins every curve to
/// `θ(1/2) = 1`; figure 2 uses `B = 1`.
pub fn figure_solutions(id: u8) -> Result<Vec<Solution>, CliError> {
    figure_constants(id)?
        .iter()
        .map(|&c| {
            let b = match (id, classify(c)?) {
                (1, Regime::DcFamily) => calibrate_b(c, 0.5, 1.0)?,
                _ => 1.0,
            };
            Ok(Solution::new(SolutionParams::new(c, b, Branch::Plus)?)?)
        })
        .collect()
}

/// Column name for the curve with constant `c`.
pub fn figure_column(c: f64) -> String {
    format!("theta[C={c}]")
}

/// One `theta[C=..]` column per curve over a log-spaced ξ axis:
/// `[1e-2, 1e2]` for figure 1, `[1e-4, 1e4]` for figure 2.
pub fn figure_table(id: u8, n: usize) -> Result<SampleTable, CliError> {
    let (lo, hi) = if id == 1 { (1e-2, 1e2) } else { (1e-4, 1e4) };
    let sols = figure_solutions(id)?;
    let xi = spacing(lo, hi, n, true)?;
    let mut meta = vec![
        ("figure".to_string(), id.to_string()),
        ("version".to_string(), VERSION.to_string()),
    ];
    let mut columns = vec!["xi".to_string()];
    for sol in &sols {
        let p = sol.params();
        let col = figure_column(p.c);
        meta.push((
            col.clone(),
            format!(
                "family={} C={} B={} branch={}",
                p.family, p.c, p.b, p.branch
            ),
        ));
        columns.push(col);
    }
    let rows = xi
        .iter()
        .map(|&x| {
            let mut row = vec![x];
            for sol in &sols {
                row.push(sol.theta(x)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let table = SampleTable {
        meta,
        columns,
        rows,
    };
    table.validate()?;
    Ok(table)
}
