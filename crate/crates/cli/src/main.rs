//! `octads`: evaluation grids and validation runs for the subelliptic heat
//! kernel on the octonionic anti-de Sitter fibration.
//!
//! Exit codes: 0 success, 1 a validation threshold was missed (or a
//! numerical routine failed), 2 usage or configuration error.

mod checks;
mod commands;
mod records;
mod settings;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use octads::mc::SdeConfig;
use octads::subelliptic::{FdSteps, MeasureSpec, QuadratureSpec};
use octads::{Error, SeriesControl, SeriesMode};

use commands::{Grid, Output, Pair, Rep, DEFAULT_ETA, DEFAULT_R, DEFAULT_T};
use records::{write_records, Format};
use settings::{FileSettings, SettingsError};

#[derive(Parser)]
#[command(name = "octads", version, about = "Subelliptic heat kernel on the octonionic AdS fibration")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Flat `key = value` file; flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
}

#[derive(Args, Default)]
struct GridArgs {
    /// Comma-separated times.
    #[arg(long)]
    t: Option<String>,
    /// Comma-separated radial distances.
    #[arg(long)]
    r: Option<String>,
    /// Comma-separated fiber angles (`pi/4` style accepted).
    #[arg(long)]
    eta: Option<String>,
}

#[derive(Args, Default)]
struct NumArgs {
    #[arg(long)]
    u_max: Option<f64>,
    #[arg(long)]
    n_u: Option<usize>,
    #[arg(long)]
    n_phi: Option<usize>,
    #[arg(long)]
    quad_tol: Option<f64>,
    #[arg(long)]
    series_tol: Option<f64>,
    #[arg(long)]
    m_cap: Option<usize>,
    /// normalized or paper_constant.
    #[arg(long)]
    mode: Option<String>,
}

#[derive(Args, Default)]
struct MeasureArgs {
    #[arg(long)]
    r_max: Option<f64>,
    #[arg(long)]
    n_r: Option<usize>,
    #[arg(long)]
    n_eta: Option<usize>,
}

#[derive(Args, Default)]
struct SdeArgs {
    #[arg(long)]
    n_paths: Option<usize>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    eps_r: Option<f64>,
    #[arg(long)]
    eps_eta: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    substep_eps: Option<f64>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate the kernel on a grid (both representations by default).
    Eval {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        num: NumArgs,
        /// 1, 2 or both.
        #[arg(long)]
        rep: Option<String>,
        /// Rep-2 path: mode or direct.
        #[arg(long)]
        path: Option<String>,
    },
    /// Compare two evaluation routes over a grid.
    CompareReps {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        num: NumArgs,
        /// reps, paths or printed.
        #[arg(long)]
        pair: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
    /// Heat-equation residual of both representations.
    Residual {
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        num: NumArgs,
    },
    /// Total mass and eigen-moment against the invariant measure.
    Mass {
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        num: NumArgs,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// Monte Carlo expectations against quadrature.
    McCheck {
        #[arg(long)]
        t: Option<String>,
        #[command(flatten)]
        sde: SdeArgs,
        #[command(flatten)]
        num: NumArgs,
        #[command(flatten)]
        measure: MeasureArgs,
    },
    /// The S^7 fiber kernel, or one of its checks.
    Fiber {
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        eta: Option<String>,
        #[arg(long)]
        u: Option<String>,
        /// Evaluate s_t(eta, i u) instead of s_t(eta, u).
        #[arg(long)]
        continued: bool,
        /// jacobi, profile or chebyshev.
        #[arg(long)]
        check: Option<String>,
        #[command(flatten)]
        num: NumArgs,
    },
    /// Odd-dimensional hyperbolic heat kernels.
    Hyperbolic {
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        t: Option<String>,
        #[arg(long)]
        s: Option<String>,
        /// Print the expanded operator terms instead of values.
        #[arg(long)]
        dump_terms: bool,
        /// Normalisation, radial heat equation and the n = 3 closed form.
        #[arg(long)]
        check: bool,
    },
    /// Octonion algebra and quadric checks on random samples.
    OctonionCheck {
        #[arg(long)]
        pairs: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Settings(#[from] SettingsError),
    #[error(transparent)]
    Core(#[from] Error),
    #[error(transparent)]
    Write(#[from] records::WriteError),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Config(_)) | CliError::Core(Error::Domain(_)) => 2,
            CliError::Core(_) => 1,
            _ => 2,
        }
    }
}

fn usage<T>(r: Result<T, String>) -> Result<T, CliError> {
    r.map_err(CliError::Usage)
}

struct Ctx {
    file: FileSettings,
}

impl Ctx {
    fn list(&self, flag: &Option<String>, key: &str, default: &[f64]) -> Result<Vec<f64>, CliError> {
        Ok(self.file.pick_list(flag.as_deref(), key, default)?)
    }

    fn grid(&self, g: &GridArgs, t: &[f64], r: &[f64], eta: &[f64]) -> Result<Grid, CliError> {
        Ok(Grid {
            t: self.list(&g.t, "t", t)?,
            r: self.list(&g.r, "r", r)?,
            eta: self.list(&g.eta, "eta", eta)?,
        })
    }

    fn quad(&self, n: &NumArgs) -> Result<QuadratureSpec, CliError> {
        let d = QuadratureSpec::default();
        let q = QuadratureSpec {
            u_max: self.file.pick_opt(n.u_max, "u_max")?,
            n_u: self.file.pick(n.n_u, "n_u", d.n_u)?,
            n_phi: self.file.pick(n.n_phi, "n_phi", d.n_phi)?,
            tol: self.file.pick(n.quad_tol, "quad_tol", d.tol)?,
            ..d
        };
        q.validate()?;
        Ok(q)
    }

    fn series(&self, n: &NumArgs) -> Result<SeriesControl, CliError> {
        let d = SeriesControl::default();
        let mode_text: Option<String> = self.file.pick_opt(n.mode.clone(), "mode")?;
        let mode = match mode_text {
            Some(m) => m.parse::<SeriesMode>()?,
            None => d.mode,
        };
        let c = SeriesControl {
            tol: self.file.pick(n.series_tol, "series_tol", d.tol)?,
            m_cap: self.file.pick(n.m_cap, "m_cap", d.m_cap)?,
            mode,
        };
        c.validate()?;
        Ok(c)
    }

    fn measure(&self, m: &MeasureArgs) -> Result<MeasureSpec, CliError> {
        let d = MeasureSpec::default();
        Ok(MeasureSpec {
            r_max: self.file.pick_opt(m.r_max, "r_max")?,
            n_r: self.file.pick(m.n_r, "n_r", d.n_r)?,
            n_eta: self.file.pick(m.n_eta, "n_eta", d.n_eta)?,
            ..d
        })
    }

    fn sde(&self, s: &SdeArgs) -> Result<SdeConfig, CliError> {
        let d = SdeConfig::default();
        let cfg = SdeConfig {
            n_paths: self.file.pick(s.n_paths, "n_paths", d.n_paths)?,
            dt: self.file.pick(s.dt, "dt", d.dt)?,
            eps_r: self.file.pick(s.eps_r, "eps_r", d.eps_r)?,
            eps_eta: self.file.pick(s.eps_eta, "eps_eta", d.eps_eta)?,
            seed: self.file.pick(s.seed, "seed", d.seed)?,
            substep_eps: self.file.pick(s.substep_eps, "substep_eps", d.substep_eps)?,
            ..d
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    let file = match &cli.config {
        Some(p) => FileSettings::load(p)?,
        None => FileSettings::default(),
    };
    let ctx = Ctx { file };
    let format: Format = usage(ctx.file.pick(cli.format.clone(), "format", "csv".to_string())?.parse())?;
    let output: Option<PathBuf> = ctx.file.pick_opt(cli.output.clone(), "output")?;

    let outcome = match &cli.cmd {
        Cmd::Eval { grid, num, rep, path } => {
            let g = ctx.grid(grid, &[1.0], DEFAULT_R, DEFAULT_ETA)?;
            let rep: Rep = usage(ctx.file.pick(rep.clone(), "rep", "both".into())?.parse())?;
            let path = usage(commands::parse_path(&ctx.file.pick(path.clone(), "path", "mode".into())?))?;
            commands::eval(&g, &ctx.quad(num)?, &ctx.series(num)?, rep, path)?
        }
        Cmd::CompareReps { grid, num, pair, tol } => {
            let g = ctx.grid(grid, DEFAULT_T, DEFAULT_R, DEFAULT_ETA)?;
            let pair: Pair = usage(ctx.file.pick(pair.clone(), "pair", "reps".into())?.parse())?;
            let tol = ctx.file.pick_opt(*tol, "tol")?;
            commands::compare_reps(&g, &ctx.quad(num)?, &ctx.series(num)?, pair, tol)?
        }
        Cmd::Residual { grid, num } => {
            let g = ctx.grid(grid, &[1.0], &[0.5, 1.0], &[DEFAULT_ETA[1], DEFAULT_ETA[2], DEFAULT_ETA[3]])?;
            commands::residual(&g, &ctx.quad(num)?, &ctx.series(num)?, &FdSteps::default())?
        }
        Cmd::Mass { t, num, measure } => {
            let ts = ctx.list(t, "t", DEFAULT_T)?;
            commands::mass(&ts, &ctx.measure(measure)?, &ctx.series(num)?)?
        }
        Cmd::McCheck { t, sde, num, measure } => {
            let ts = ctx.list(t, "t", &[0.5, 1.0])?;
            commands::mc_check(&ts, &ctx.sde(sde)?, &ctx.measure(measure)?, &ctx.series(num)?)?
        }
        Cmd::Fiber { t, eta, u, continued, check, num } => {
            let ts = ctx.list(t, "t", &[0.1, 0.5, 1.0, 2.0])?;
            let etas = ctx.list(eta, "eta", DEFAULT_ETA)?;
            let us = ctx.list(u, "u", &[0.0, 0.5, 1.0])?;
            let check = match ctx.file.pick_opt(check.clone(), "check")? {
                Some(c) => Some(usage(c.parse())?),
                None => None,
            };
            let continued = *continued || ctx.file.raw("continued") == Some("true");
            commands::fiber(&ts, &etas, &us, continued, check, &ctx.series(num)?)?
        }
        Cmd::Hyperbolic { n, t, s, dump_terms, check } => {
            let n = ctx.file.pick(*n, "n", 15)?;
            let ts = ctx.list(t, "t", DEFAULT_T)?;
            let ss = ctx.list(s, "s", &[0.0, 0.5, 1.0, 2.0, 4.0])?;
            commands::hyperbolic(n, &ts, &ss, *dump_terms, *check)?
        }
        Cmd::OctonionCheck { pairs, seed } => {
            let pairs = ctx.file.pick(*pairs, "pairs", 1000)?;
            let seed = ctx.file.pick(*seed, "seed", 7)?;
            commands::octonion_check(pairs, seed)?
        }
    };

    match &outcome.output {
        Output::Table(t) => write_records(t, format, output.as_deref())?,
        Output::Text(s) => match &output {
            Some(p) => std::fs::write(p, s).map_err(|source| records::WriteError {
                path: p.display().to_string(),
                source,
            })?,
            None => print!("{s}"),
        },
    }
    if let Some(s) = &outcome.summary {
        eprintln!("{s}");
    }
    if !outcome.passed {
        eprintln!("validation threshold not met");
    }
    Ok(outcome.passed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
