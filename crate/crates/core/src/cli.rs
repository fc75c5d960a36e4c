use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::error::{Error, Result};
use crate::expfun::ExpPolyFunction;
use crate::fourier::{l1_norm_numeric, Grid, SampledFunction};
use crate::greens::{check_hyperbolic, green_function_with, AXIS_TOL};
use crate::hyersulam::{
    counterexample_probe, residual, solve, verify_with, ProbeFamily, ProbeReport, Problem, Signal,
    VERIFY_SLACK,
};
use crate::poly::Poly;

pub const EXIT_OK: i32 = 0;
pub const EXIT_BOUND_VIOLATED: i32 = 3;

const AXIS_TOL_RANGE: (f64, f64) = (1e-12, 1e-3);
const SLACK_RANGE: (f64, f64) = (0.0, 1e-3);
const SLOW_LADDER: [f64; 5] = [2.0, 4.0, 8.0, 16.0, 32.0];

#[derive(Debug, Parser)]
#[command(name = "hu-l1", version, about = "L1 Hyers-Ulam stability of linear ODEs with constant coefficients")]
pub struct Cli {
    /// JSON config with optional grid, tolerances and output path.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Half-width T of the sampling grid.
    #[arg(long = "grid-T", global = true)]
    pub grid_t: Option<f64>,
    /// Number of samples N (a power of two >= 8).
    #[arg(long = "grid-N", global = true)]
    pub grid_n: Option<usize>,
    /// Relative distance from the imaginary axis treated as zero.
    #[arg(long, global = true)]
    pub axis_tol: Option<f64>,
    /// Output path for CSV results.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Roots, Green's kernel and stability constant M of a polynomial.
    Stability { poly: PathBuf },
    /// Particular L1 solution y_a = G * f.
    Solve { poly: PathBuf, forcing: PathBuf },
    /// Check ||y - y_a||_1 <= M ||p(d/dt) y - f||_1 for a candidate y.
    Verify {
        poly: PathBuf,
        forcing: PathBuf,
        candidate: PathBuf,
    },
    /// Approximate solutions of y' - iy = 0 far from the only L1 solution.
    Probe {
        #[arg(long, value_enum)]
        example: Example,
        #[arg(long, default_value_t = 0.1, allow_negative_numbers = true)]
        eps: f64,
        #[arg(long = "T", allow_negative_numbers = true)]
        t: Option<f64>,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Example {
    Paper,
    Slow,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub grid: Option<Grid>,
    #[serde(default)]
    pub tolerances: ToleranceOverrides,
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    pub axis_tol: Option<f64>,
    pub verify_slack: Option<f64>,
}

impl Config {
    pub fn load(path: &Path) -> Result<Config> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Config = serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Applies command-line overrides and checks ranges.
    fn merged(mut self, cli: &Cli) -> Result<Config> {
        if cli.grid_t.is_some() || cli.grid_n.is_some() {
            let base = self.grid.unwrap_or_else(Grid::reference);
            let t = cli.grid_t.unwrap_or(base.half_width());
            let n = cli.grid_n.unwrap_or(base.len());
            self.grid = Some(Grid::new(t, n).map_err(|e| Error::Config(e.to_string()))?);
        } else if let Some(g) = self.grid {
            self.grid = Some(Grid::new(g.half_width(), g.len()).map_err(|e| Error::Config(e.to_string()))?);
        }
        if cli.axis_tol.is_some() {
            self.tolerances.axis_tol = cli.axis_tol;
        }
        if cli.out.is_some() {
            self.out = cli.out.clone();
        }
        check_range("axis_tol", self.tolerances.axis_tol, AXIS_TOL_RANGE)?;
        check_range("verify_slack", self.tolerances.verify_slack, SLACK_RANGE)?;
        Ok(self)
    }

    pub fn grid(&self) -> Grid {
        self.grid.unwrap_or_else(Grid::reference)
    }

    pub fn axis_tol(&self) -> f64 {
        self.tolerances.axis_tol.unwrap_or(AXIS_TOL)
    }

    pub fn verify_slack(&self) -> f64 {
        self.tolerances.verify_slack.unwrap_or(VERIFY_SLACK)
    }
}

fn check_range(name: &str, value: Option<f64>, (lo, hi): (f64, f64)) -> Result<()> {
    match value {
        Some(v) if !(lo..=hi).contains(&v) => Err(Error::Config(format!(
            "{name} = {v} outside the supported range [{lo:e}, {hi:e}]"
        ))),
        _ => Ok(()),
    }
}

pub fn read_poly(path: &Path) -> Result<Poly> {
    let text = std::fs::read_to_string(path)?;
    Ok(serde_json::from_str(&text)?)
}

/// Term JSON, or samples when the file ends in `.csv`.
pub fn read_signal(path: &Path) -> Result<Signal> {
    if path.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) {
        Ok(Signal::Sampled(SampledFunction::read_csv_file(path)?))
    } else {
        let text = std::fs::read_to_string(path)?;
        let f: ExpPolyFunction = serde_json::from_str(&text)?;
        Ok(Signal::Closed(f))
    }
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut stdout = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut stdout, value)?;
    writeln!(stdout)?;
    Ok(())
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // usage errors belong to the parse class, not clap's default 2
            let _ = e.print();
            return if e.use_stderr() { 1 } else { EXIT_OK };
        }
    };
    match dispatch(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<i32> {
    let config = match &cli.config {
        Some(path) => Config::load(path)?,
        None => Config::default(),
    }
    .merged(cli)?;
    match &cli.command {
        Command::Stability { poly } => cmd_stability(poly, &config),
        Command::Solve { poly, forcing } => cmd_solve(poly, forcing, &config),
        Command::Verify {
            poly,
            forcing,
            candidate,
        } => cmd_verify(poly, forcing, candidate, &config),
        Command::Probe { example, eps, t } => cmd_probe(*example, *eps, *t, &config),
    }
}

pub fn cmd_stability(poly: &Path, config: &Config) -> Result<i32> {
    let p = read_poly(poly)?;
    let check = check_hyperbolic(&p, config.axis_tol())?;
    if !check.hyperbolic {
        print_json(&json!({
            "charpoly": p,
            "roots": check.roots,
            "hyperbolic": false,
            "witness": check.witness,
        }))?;
        let e = Error::NotHyperbolic {
            witness: check.witness,
        };
        eprintln!("error: {e}");
        return Ok(e.exit_code());
    }
    let g = green_function_with(&p, config.axis_tol())?;
    print_json(&json!({
        "charpoly": g.charpoly,
        "roots": g.roots,
        "hyperbolic": true,
        "kernel": g.kernel,
        "M": g.m,
        "M_error": g.m_error,
        "triangle_bound": g.triangle_bound(),
    }))?;
    Ok(EXIT_OK)
}

pub fn cmd_solve(poly: &Path, forcing: &Path, config: &Config) -> Result<i32> {
    let prob = Problem::new(read_poly(poly)?, read_signal(forcing)?)?.with_axis_tol(config.axis_tol());
    let ya = solve(&prob)?;
    let defect = residual(&prob, &ya)?;
    let grid = prob.forcing.grid().unwrap_or_else(|| config.grid());
    let samples = ya.to_samples(grid)?;
    let (norm, path) = match &ya {
        Signal::Closed(f) => (f.l1_norm()?.value, "closed"),
        Signal::Sampled(s) => (l1_norm_numeric(s), "sampled"),
    };
    let terms_file = match &config.out {
        Some(out) => {
            samples.write_csv_file(out)?;
            match &ya {
                Signal::Closed(f) => {
                    let terms = out.with_extension("terms.json");
                    std::fs::write(&terms, serde_json::to_string_pretty(f)? + "\n")?;
                    Some(terms)
                }
                Signal::Sampled(_) => None,
            }
        }
        None => {
            samples.write_csv(std::io::stdout().lock())?;
            None
        }
    };
    let summary = json!({
        "path": path,
        "grid": grid,
        "l1_norm": norm,
        "defect": defect.norm,
        "defect_error": defect.norm_error,
        "out": config.out,
        "terms": terms_file,
    });
    if config.out.is_some() {
        print_json(&summary)?;
    } else {
        eprintln!("{summary}");
    }
    Ok(EXIT_OK)
}

pub fn cmd_verify(poly: &Path, forcing: &Path, candidate: &Path, config: &Config) -> Result<i32> {
    let prob = Problem::new(read_poly(poly)?, read_signal(forcing)?)?.with_axis_tol(config.axis_tol());
    let y = read_signal(candidate)?;
    let report = verify_with(&prob, &y, config.verify_slack())?;
    print_json(&report)?;
    if report.satisfied {
        Ok(EXIT_OK)
    } else {
        eprintln!(
            "bound violated: distance {:.6e} > M*eps = {:.6e} (+ slack {:.3e}){}",
            report.distance,
            report.bound,
            report.tolerances.quadrature_slack,
            if report.singular_part_excluded {
                "; the candidate's top derivative jumps, and that delta part is not in eps"
            } else {
                "; for exact inputs this is a numerical tolerance breach"
            }
        );
        Ok(EXIT_BOUND_VIOLATED)
    }
}

pub fn cmd_probe(example: Example, eps: f64, t: Option<f64>, config: &Config) -> Result<i32> {
    let families: Vec<ProbeFamily> = match (example, t) {
        (Example::Paper, None) => vec![ProbeFamily::PaperExample],
        (Example::Paper, Some(_)) => {
            return Err(Error::Config("--T applies only to --example slow".into()))
        }
        (Example::Slow, Some(t)) => vec![ProbeFamily::SlowModulation { t }],
        (Example::Slow, None) => SLOW_LADDER
            .iter()
            .map(|&t| ProbeFamily::SlowModulation { t })
            .collect(),
    };
    let reports = families
        .into_iter()
        .map(|f| counterexample_probe(eps, f))
        .collect::<Result<Vec<ProbeReport>>>()?;
    if let Some(out) = &config.out {
        let mut w = csv::Writer::from_path(out)?;
        w.write_record(ProbeReport::CSV_HEADER)?;
        for r in &reports {
            w.write_record(r.csv_row().map(|v| format!("{v:.16e}")))?;
        }
        w.flush()?;
    }
    print_json(&json!({ "reports": reports }))?;
    Ok(EXIT_OK)
}
