//! Subcommand definitions and dispatch.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use suita_core::bergman::kernel_j;
use suita_core::geometry::parse_point;
use suita_core::green::{critical_points, green_eval, robin_capacity};
use suita_core::oracles::{grid_min_gradient, mc_area, robin_extrapolate, wos_green};
use suita_core::sublevel::{profile_scan_with, DEFAULT_GRID};
use suita_core::verify::{fmt_num, run_suite, Status, Suite};
use suita_core::weights::{eval_weights, identity_residual, war_probe};
use suita_core::{DomainSpec, McEstimate, Point64};

use crate::config::Config;
use crate::error::{CliError, Result};
use crate::report::{render, Format};
use crate::svg::emit_contours;
use crate::exit;

pub const SEED_ENV: &str = "SUITA_LAB_SEED";
pub const DEFAULT_SEED: u64 = 42;

#[derive(Debug, Parser)]
#[command(name = "suita-lab", version, about = "Green functions, capacities, Bergman kernels and sublevel areas of planar domains")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

fn domain_arg(s: &str) -> std::result::Result<DomainSpec<f64>, String> {
    s.parse().map_err(|e: suita_core::Error| e.to_string())
}

fn point_arg(s: &str) -> std::result::Result<Point64, String> {
    parse_point(s).map_err(|e| e.to_string())
}

/// Domain and pole shared by most subcommands.
#[derive(Debug, Clone, Args)]
pub struct Target {
    /// domain literal, e.g. `annulus:0.5` or `disc:0,0,1`
    #[arg(long, value_parser = domain_arg, allow_hyphen_values = true)]
    pub domain: DomainSpec<f64>,
    /// pole `x,y`
    #[arg(long, value_parser = point_arg, allow_hyphen_values = true)]
    pub pole: Point64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// G(z, w) and its gradient: `value,gradX,gradY,truncBound`
    Green {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_parser = point_arg, allow_hyphen_values = true)]
        at: Point64,
    },
    /// Logarithmic capacity: `c,logc,truncBound`
    Capacity {
        #[command(flatten)]
        target: Target,
    },
    /// Interior critical points of G: `x,y,level,residual`
    Critical {
        #[command(flatten)]
        target: Target,
    },
    /// Higher-order Bergman kernel: `j,value,N,tailBound`
    Kernel {
        #[command(flatten)]
        target: Target,
        #[arg(long)]
        order: usize,
    },
    /// Sublevel area profile on `[tmin, tmax]`
    Sublevel {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        tmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        tmax: f64,
        #[arg(long)]
        steps: usize,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        grid: usize,
        /// also plot the sampled level curves
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Weight functions at one `s`, or the probe at a list of `s`
    Weights {
        #[arg(long, allow_hyphen_values = true, conflicts_with = "probe", required_unless_present = "probe")]
        s: Option<f64>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        probe: Option<Vec<f64>>,
    },
    /// Brute-force cross-checks
    #[command(subcommand)]
    Oracle(OracleCommand),
    /// Run the verification suite
    Verify {
        /// comma separated families or `all`
        #[arg(long)]
        suite: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(Debug, Subcommand)]
pub enum OracleCommand {
    /// Walk-on-spheres G(z, w): `mean,std_error,samples,seed`
    Wos {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_parser = point_arg, allow_hyphen_values = true)]
        at: Point64,
        #[arg(long, default_value_t = 100_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Monte Carlo area of `{G < t}`: `mean,std_error,samples,seed`
    Area {
        #[command(flatten)]
        target: Target,
        #[arg(long, allow_hyphen_values = true)]
        t: f64,
        #[arg(long, default_value_t = 200_000)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Capacity from extrapolated circle means: `capacity,radii`
    Robin {
        #[command(flatten)]
        target: Target,
        /// decreasing radii, at most half the boundary distance
        #[arg(long, value_delimiter = ',')]
        radii: Option<Vec<f64>>,
    },
    /// Lattice seeds for critical points: `x,y`
    Gridscan {
        #[command(flatten)]
        target: Target,
        #[arg(long, default_value_t = 256)]
        grid: usize,
    },
}

/// `SUITA_LAB_SEED` when set, otherwise [`DEFAULT_SEED`].
pub fn env_seed() -> Result<u64> {
    match std::env::var(SEED_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("{SEED_ENV}={v:?} is not an unsigned integer"))),
        Err(_) => Ok(DEFAULT_SEED),
    }
}

fn io(e: std::io::Error) -> CliError {
    CliError::Io { path: "<stdout>".into(), source: e }
}

fn line(out: &mut dyn Write, fields: &[String]) -> Result<()> {
    writeln!(out, "{}", fields.join(",")).map_err(io)
}

fn mc_lines(out: &mut dyn Write, e: &McEstimate) -> Result<()> {
    writeln!(out, "mean,std_error,samples,seed").map_err(io)?;
    line(out, &[fmt_num(e.mean), fmt_num(e.std_error), e.samples.to_string(), e.seed.to_string()])
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, fmt_num)
}

/// Executes a parsed command, writing its CSV output to `out`. Returns the
/// process exit code; errors map to [`exit::USAGE`].
pub fn run(cli: Cli, out: &mut dyn Write) -> Result<i32> {
    match cli.command {
        Command::Green { target, at } => {
            let g = green_eval(&target.domain, target.pole, at)?;
            writeln!(out, "value,gradX,gradY,truncBound").map_err(io)?;
            line(out, &[fmt_num(g.value), fmt_num(g.grad_x), fmt_num(g.grad_y), fmt_num(g.truncation_bound)])?;
        }
        Command::Capacity { target } => {
            let c = robin_capacity(&target.domain, target.pole)?;
            writeln!(out, "c,logc,truncBound").map_err(io)?;
            line(out, &[fmt_num(c.capacity), fmt_num(c.robin_constant), fmt_num(c.truncation_bound)])?;
        }
        Command::Critical { target } => {
            writeln!(out, "x,y,level,residual").map_err(io)?;
            for cp in critical_points(&target.domain, target.pole)? {
                let z = cp.location;
                line(out, &[fmt_num(z.re), fmt_num(z.im), fmt_num(cp.level), fmt_num(cp.gradient_residual)])?;
            }
        }
        Command::Kernel { target, order } => {
            let k = kernel_j(&target.domain, target.pole, order)?;
            writeln!(out, "j,value,N,tailBound").map_err(io)?;
            line(out, &[k.j.to_string(), fmt_num(k.value), k.truncation_order.to_string(), fmt_num(k.tail_bound)])?;
        }
        Command::Sublevel { target, tmin, tmax, steps, grid, svg } => {
            let p = profile_scan_with(&target.domain, target.pole, tmin, tmax, steps, grid)?;
            writeln!(out, "t,lambda,log_lambda,gamma_prime,second_diff,e2t_lambda,err_est").map_err(io)?;
            for k in 0..p.len() {
                line(
                    out,
                    &[
                        fmt_num(p.t_samples[k]),
                        fmt_num(p.lambda[k]),
                        fmt_num(p.log_lambda[k]),
                        opt(p.gamma_prime[k]),
                        opt(p.second_diff[k]),
                        fmt_num(p.e2t_lambda[k]),
                        fmt_num(p.err_est[k]),
                    ],
                )?;
            }
            if let Some(path) = svg {
                emit_contours(&target.domain, target.pole, &p.t_samples, grid, &path)?;
            }
        }
        Command::Weights { s, probe } => match (s, probe) {
            (Some(s), _) => {
                let v = eval_weights(s)?;
                writeln!(out, "s,eta0,eta0p,eta0pp,gamma0,gamma0p,gap,residual").map_err(io)?;
                let fields = [v.s, v.eta0, v.eta0p, v.eta0pp, v.gamma0, v.gamma0p, v.gap, identity_residual(s)?];
                line(out, &fields.map(fmt_num))?;
            }
            (None, Some(list)) => {
                writeln!(out, "s,war").map_err(io)?;
                for (s, v) in list.iter().zip(war_probe(&list)?) {
                    line(out, &[fmt_num(*s), fmt_num(v)])?;
                }
            }
            (None, None) => return Err(CliError::Usage("weights needs --s or --probe".into())),
        },
        Command::Oracle(cmd) => oracle(cmd, out)?,
        Command::Verify { suite, config, out: path, format, seed } => return verify(suite, config, path, format, seed, out),
    }
    Ok(exit::PASS)
}

fn oracle(cmd: OracleCommand, out: &mut dyn Write) -> Result<()> {
    match cmd {
        OracleCommand::Wos { target, at, samples, seed } => {
            let e = wos_green(&target.domain, target.pole, at, samples, seed.map_or_else(env_seed, Ok)?)?;
            mc_lines(out, &e)
        }
        OracleCommand::Area { target, t, samples, seed } => {
            let e = mc_area(&target.domain, target.pole, t, samples, seed.map_or_else(env_seed, Ok)?)?;
            mc_lines(out, &e)
        }
        OracleCommand::Robin { target, radii } => {
            let radii = match radii {
                Some(r) => r,
                None => {
                    let r0 = 0.5 * target.domain.boundary_distance(target.pole)?.delta.min(0.2);
                    (0..5).map(|k| r0 / 2f64.powi(k)).collect()
                }
            };
            let c = robin_extrapolate(&target.domain, target.pole, &radii)?;
            writeln!(out, "capacity,radii").map_err(io)?;
            line(out, &[fmt_num(c), radii.len().to_string()])
        }
        OracleCommand::Gridscan { target, grid } => {
            writeln!(out, "x,y").map_err(io)?;
            for z in grid_min_gradient(&target.domain, target.pole, grid)? {
                line(out, &[fmt_num(z.re), fmt_num(z.im)])?;
            }
            Ok(())
        }
    }
}

fn verify(
    suite: Option<String>,
    config: Option<PathBuf>,
    path: Option<PathBuf>,
    format: Option<Format>,
    seed: Option<u64>,
    out: &mut dyn Write,
) -> Result<i32> {
    let mut cfg = match &config {
        Some(p) => Config::parse(&std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?)?,
        None => Config::default(),
    };
    if !cfg.seed_set {
        cfg.suite.seed = env_seed()?;
    }
    if let Some(s) = seed {
        cfg.suite.seed = s;
    }
    if let Some(s) = suite {
        let mut suites = Vec::new();
        for name in s.split(',') {
            suites.extend(Suite::parse(name.trim()).map_err(|e| CliError::Usage(e.to_string()))?);
        }
        suites.sort();
        suites.dedup();
        cfg.suite.suites = suites;
    }
    let path = path.or(cfg.out.clone());
    let format = format.or(cfg.format).unwrap_or_else(|| path.as_deref().map_or(Format::Csv, Format::from_path));
    let start = Instant::now();
    let report = run_suite(&cfg.suite)?;
    let text = render(&report, format)?;
    match &path {
        Some(p) => std::fs::write(p, &text).map_err(|e| CliError::io(p, e))?,
        None => out.write_all(text.as_bytes()).map_err(io)?,
    }
    eprintln!(
        "{} checks: {} pass, {} fail, {} skipped in {:.1} s",
        report.checks.len(),
        report.count(Status::Pass),
        report.count(Status::Fail),
        report.count(Status::Skipped),
        start.elapsed().as_secs_f64()
    );
    Ok(if report.all_pass() { exit::PASS } else { exit::CHECK_FAILURE })
}
