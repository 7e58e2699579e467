mod config;
mod tasks;

use clap::{Args, Parser, Subcommand};
use config::{BoundCheck, ExperimentConfig, GridConfig, Task};
use nonlocal_frac::mittag_leffler::ml_bounded;
use nonlocal_frac::subordination::{phi_beta, SubordinatorSpec};
use nonlocal_frac::sv_calculus::CATALOG;
use nonlocal_frac::{Error, Result};
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

/// Kernels, fundamental solutions and bound checks for time-fractional
/// nonlocal equations.
#[derive(Parser)]
#[command(name = "nlfrac", version, arg_required_else_help = true)]
struct Cli {
    /// Print catalog profile names with their routes and exit.
    #[arg(long)]
    list_catalog: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Args)]
struct Common {
    /// Catalog profile, e.g. power:1, log, log-pow:1,1,1.
    #[arg(long, default_value = "power:1")]
    symbol: String,
    #[arg(long, default_value_t = 1)]
    dimension: usize,
    /// Output directory; without it the main table or report goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment described by a TOML config.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides the config's output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve the zero-initial-data problem from a config (task = "solve").
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scale functions K, L, h and the symbol ψ as a table, plus the route.
    Symbol {
        #[command(flatten)]
        common: Common,
    },
    /// Heat kernel p(t, ·).
    Heatkernel {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        /// Half width and points per axis, e.g. 64,1024; automatic if omitted.
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Fundamental solution q^{α,β}(t, ·).
    Fundsol {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Defaults to alpha.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        t: Vec<f64>,
        #[arg(long, value_delimiter = ',')]
        grid: Option<Vec<f64>>,
    },
    /// Numerical check of one bound family; emits JSON reports.
    VerifyBounds {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        lemma: BoundCheck,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        /// Restrict to one β (default: α, 1 and α + 1).
        #[arg(long)]
        beta: Option<f64>,
    },
    /// Class-𝒢 statistics for every catalog family.
    VerifyClassG {
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Refinement study of the L_q(L_p) estimate on seeded random forcing.
    VerifyApriori {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 2.0)]
        p: f64,
        #[arg(long, default_value_t = 2.0)]
        q: f64,
        #[arg(long, default_value_t = 20)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Points per axis on the coarse level (the fine level doubles it).
        #[arg(long, default_value_t = 64)]
        points: usize,
        /// Time steps on the coarse level.
        #[arg(long, default_value_t = 64)]
        steps: usize,
    },
    /// Mittag-Leffler function E_{a,b}(z).
    Ml {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, allow_negative_numbers = true)]
        z: f64,
        /// Largest |z| accepted on the negative axis.
        #[arg(long, default_value_t = 1e6)]
        z_max: f64,
    },
    /// Density φ_{α,β}(t, r) of the inverse stable subordinator as a table.
    Subordinator {
        #[arg(long)]
        alpha: f64,
        #[arg(long)]
        t: f64,
        /// α (the density itself) or 1.
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long, default_value_t = 5.0)]
        r_max: f64,
        #[arg(long, default_value_t = 200)]
        points: usize,
    },
}

fn grid_arg(g: Option<Vec<f64>>) -> Result<Option<GridConfig>> {
    match g.as_deref() {
        None => Ok(None),
        Some([w, n]) if n.fract() == 0.0 && *n >= 1.0 => Ok(Some(GridConfig {
            half_width: *w,
            points: *n as usize,
        })),
        Some(_) => Err(Error::Config("--grid expects HALF_WIDTH,POINTS".into())),
    }
}

fn from_common(task: Task, c: Common) -> (ExperimentConfig, Option<PathBuf>) {
    let mut cfg = ExperimentConfig::for_task(task);
    cfg.profile = c.symbol;
    cfg.dimension = c.dimension;
    (cfg, c.out)
}

fn load_for(path: &std::path::Path, forced: Option<Task>) -> Result<ExperimentConfig> {
    let cfg = ExperimentConfig::load(path)?;
    match forced {
        Some(t) if cfg.task != t => Err(Error::Config(format!(
            "{} declares task {:?}; this subcommand runs task solve",
            path.display(),
            cfg.task
        ))),
        _ => Ok(cfg),
    }
}

fn execute(mut cfg: ExperimentConfig, out: Option<PathBuf>) -> Result<()> {
    if out.is_some() {
        cfg.output = out;
    }
    cfg.validate()?;
    let art = tasks::run(&cfg)?;
    match &cfg.output {
        Some(dir) => art.write_to(dir),
        None => match std::io::stdout().write_all(&art.files[art.primary].bytes) {
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Error::Numeric(format!("stdout: {e}"))),
            _ => Ok(()),
        },
    }
}

fn subordinator_table(alpha: f64, t: f64, beta: Option<f64>, r_max: f64, points: usize) -> Result<String> {
    let spec = SubordinatorSpec::new(alpha)?;
    let beta = beta.unwrap_or(spec.alpha);
    if !(t > 0.0 && r_max > 0.0 && points >= 2) {
        return Err(Error::Config("subordinator needs t > 0, r_max > 0 and at least 2 points".into()));
    }
    let mut s = String::from("r,phi\n");
    for i in 1..=points {
        let r = r_max * i as f64 / points as f64;
        s.push_str(&format!("{r:.12e},{:.12e}\n", phi_beta(spec.alpha, beta, t, r)?));
    }
    Ok(s)
}

fn dispatch(cli: Cli) -> Result<()> {
    if cli.list_catalog {
        let mut s = String::from("profile\troute\tdescription\n");
        for (name, desc, route) in CATALOG {
            let route = serde_json::to_value(route).expect("route serializes");
            s.push_str(&format!("{name}\t{}\t{desc}\n", route.as_str().unwrap_or("?")));
        }
        print!("{s}");
        return Ok(());
    }
    let Some(command) = cli.command else {
        return Err(Error::Config("no subcommand given".into()));
    };
    match command {
        Command::Run { config, out } => execute(load_for(&config, None)?, out),
        Command::Solve { config, out } => execute(load_for(&config, Some(Task::Solve))?, out),
        Command::Symbol { common } => {
            let (cfg, out) = from_common(Task::Symbol, common);
            execute(cfg, out)
        }
        Command::Heatkernel { common, t, grid } => {
            let (mut cfg, out) = from_common(Task::Heatkernel, common);
            cfg.times = Some(t);
            cfg.grid = grid_arg(grid)?;
            execute(cfg, out)
        }
        Command::Fundsol {
            common,
            alpha,
            beta,
            t,
            grid,
        } => {
            let (mut cfg, out) = from_common(Task::Fundsol, common);
            cfg.alpha = alpha;
            cfg.beta = beta;
            cfg.times = Some(t);
            cfg.grid = grid_arg(grid)?;
            execute(cfg, out)
        }
        Command::VerifyBounds {
            common,
            lemma,
            alpha,
            beta,
        } => {
            let (mut cfg, out) = from_common(Task::VerifyBounds, common);
            cfg.verify.check = Some(lemma);
            cfg.alpha = alpha;
            cfg.beta = beta;
            execute(cfg, out)
        }
        Command::VerifyClassG { out } => execute(ExperimentConfig::for_task(Task::VerifyClassG), out),
        Command::VerifyApriori {
            common,
            alpha,
            p,
            q,
            samples,
            seed,
            points,
            steps,
        } => {
            let (mut cfg, out) = from_common(Task::VerifyApriori, common);
            cfg.alpha = alpha;
            cfg.verify.p = p;
            cfg.verify.q = q;
            cfg.verify.samples = samples;
            cfg.seed = seed;
            cfg.time.steps = steps;
            cfg.grid = Some(GridConfig {
                half_width: std::f64::consts::PI,
                points,
            });
            execute(cfg, out)
        }
        Command::Ml { a, b, z, z_max } => {
            let v = ml_bounded(a, b, z, z_max)?;
            println!("{v:.17e}");
            Ok(())
        }
        Command::Subordinator {
            alpha,
            t,
            beta,
            r_max,
            points,
        } => {
            print!("{}", subordinator_table(alpha, t, beta, r_max, points)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("nlfrac: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
