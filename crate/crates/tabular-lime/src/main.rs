use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;
use tabular_lime::grid::{fit_grid, read_matrix_csv, BinGrid};
use tabular_lime::harness::{
    concentration_probe, field_map, run_experiment, sweep_bandwidth, write_field_csv, DataSource, ExperimentConfig,
    ModelRef, NuKeyword, NuSpec, XiKeyword, XiSpec,
};
use tabular_lime::models::ModelSpec;
use tabular_lime::theory::{explain, ExplainOptions};

#[derive(Parser)]
#[command(name = "tabular-lime", version, about = "Tabular LIME experiments and closed-form explanations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fit a quantile grid to a numeric CSV and write it as JSON.
    FitGrid {
        csv: PathBuf,
        #[arg(long, default_value_t = 4)]
        bins: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Repeated empirical LIME compared with the limit explanation.
    Explain {
        #[command(flatten)]
        run: RunArgs,
        /// Summary CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-repetition CSV.
        #[arg(long)]
        repetitions_out: Option<PathBuf>,
    },
    /// Limit explanation only, as JSON.
    Theory {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "bin-center")]
        xi: String,
        #[arg(long, default_value = "default")]
        nu: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// One experiment per bandwidth.
    Sweep {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        nus: Vec<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Concentration of the empirical normal equations.
    Probe {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_delimiter = ',', required = true)]
        ns: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Limit explanations at every bin centre of a 2-D grid.
    Field {
        #[arg(long)]
        grid: PathBuf,
        #[arg(long)]
        model: PathBuf,
        #[arg(long, default_value = "default")]
        nu: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Either a config file or a grid + model pair; flags override the file.
#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    grid: Option<PathBuf>,
    #[arg(long)]
    model: Option<PathBuf>,
    /// Comma-separated point, "bin-center" or "bin-center:b1,b2,…" (1-based).
    #[arg(long)]
    xi: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// A positive number or "default".
    #[arg(long)]
    nu: Option<String>,
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
}

fn parse_nu(s: &str) -> Result<NuSpec> {
    if s == "default" {
        return Ok(NuSpec::Named(NuKeyword::Default));
    }
    Ok(NuSpec::Value(s.parse().with_context(|| format!("bad bandwidth {s:?}"))?))
}

fn parse_list<T: std::str::FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::error::Error + Send + Sync + 'static,
{
    s.split(',').map(|v| v.trim().parse::<T>().with_context(|| format!("bad list entry {v:?}"))).collect()
}

fn parse_xi(s: &str) -> Result<XiSpec> {
    if s == "bin-center" {
        return Ok(XiSpec::Named(XiKeyword::BinCenter));
    }
    if let Some(rest) = s.strip_prefix("bin-center:") {
        return Ok(XiSpec::BinCenter { bin_center: parse_list(rest)? });
    }
    Ok(XiSpec::Point(parse_list(s)?))
}

impl RunArgs {
    fn build(&self) -> Result<ExperimentConfig> {
        let mut cfg = match (&self.config, &self.grid, &self.model) {
            (Some(path), _, _) => ExperimentConfig::load(path)?,
            (None, Some(grid), Some(model)) => {
                ExperimentConfig::new(DataSource::Grid { path: grid.clone() }, ModelSpec::load(model)?)
            }
            _ => bail!("pass --config, or both --grid and --model"),
        };
        if self.config.is_some() {
            if let Some(g) = &self.grid {
                cfg.data = DataSource::Grid { path: std::env::current_dir()?.join(g) };
            }
            if let Some(m) = &self.model {
                cfg.model = ModelRef::Inline(ModelSpec::load(m)?);
            }
        }
        if let Some(x) = &self.xi {
            cfg.xi = parse_xi(x)?;
        }
        if let Some(n) = self.n {
            cfg.n = n;
        }
        if let Some(nu) = &self.nu {
            cfg.nu = parse_nu(nu)?;
        }
        if let Some(l) = self.lambda {
            cfg.lambda = l;
        }
        if let Some(r) = self.reps {
            cfg.repetitions = r;
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        Ok(cfg)
    }
}

fn load_grid(path: &PathBuf) -> Result<BinGrid> {
    Ok(BinGrid::from_json(&std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?)?)
}

fn writer(out: &Option<PathBuf>) -> Result<Box<dyn std::io::Write>> {
    Ok(match out {
        Some(p) => Box::new(std::fs::File::create(p).with_context(|| format!("creating {}", p.display()))?),
        None => Box::new(std::io::stdout()),
    })
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::FitGrid { csv, bins, out } => {
            let grid = fit_grid(&read_matrix_csv(&csv)?, bins)?;
            std::fs::write(&out, grid.to_json()?)?;
            eprintln!("wrote {} ({} features, {} bins)", out.display(), grid.d(), grid.p());
            Ok(true)
        }
        Command::Explain { run, out, repetitions_out } => {
            let report = run_experiment(&run.build()?)?;
            report.write_summary_csv(writer(&out)?)?;
            if let Some(p) = &repetitions_out {
                report.write_repetitions_csv(std::fs::File::create(p)?)?;
            }
            let failed = report.summary.iter().filter(|s| !s.pass).count();
            eprintln!(
                "{} repetitions ({} rank-deficient), {} of {} coefficients outside tolerance, {:.2}s",
                report.repetitions.len(),
                report.failed_repetitions(),
                failed,
                report.summary.len(),
                report.runtime_secs
            );
            Ok(report.all_pass())
        }
        Command::Theory { grid, model, xi, nu, out } => {
            let grid = load_grid(&grid)?;
            let model = ModelSpec::load(&model)?;
            let point = parse_xi(&xi)?.resolve(&grid)?;
            let b_star = grid.bin_id(&point)?;
            let e = explain(&model, &grid, &b_star, parse_nu(&nu)?.resolve(grid.d()), ExplainOptions::default())?;
            writeln!(writer(&out)?, "{}", e.to_json()?)?;
            Ok(true)
        }
        Command::Sweep { run, nus, out } => {
            let sweep = sweep_bandwidth(&run.build()?, &nus)?;
            sweep.write_csv(writer(&out)?)?;
            let flips: Vec<usize> = (0..sweep.sign_changes.len()).filter(|&k| sweep.sign_changes[k]).collect();
            eprintln!("theory changes sign along the sweep for coefficients {flips:?}");
            Ok(sweep.all_pass())
        }
        Command::Probe { run, ns, trials, out } => {
            let report = concentration_probe(&run.build()?, &ns, trials)?;
            report.write_csv(writer(&out)?)?;
            for (w, r) in ns.windows(2).zip(&report.sigma_ratios) {
                eprintln!("median ‖Σ̂−Σ‖ ratio n={} → n={}: {r:.3}", w[0], w[1]);
            }
            Ok(report.passes((1.4, 2.9)))
        }
        Command::Field { grid, model, nu, out } => {
            let grid = load_grid(&grid)?;
            let model = ModelSpec::load(&model)?;
            let rows = field_map(&model, &grid, parse_nu(&nu)?.resolve(grid.d()))?;
            write_field_csv(&rows, writer(&out)?)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
