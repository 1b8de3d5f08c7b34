use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sldg::emit::{emit, emit_groups, write_field_csv};
use sldg::{convergence, registry, run_setup, ExperimentConfig, Format, HarnessError, Result};

#[derive(Parser)]
#[command(name = "sldg", version, about = "Semi-Lagrangian DG convergence studies")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one configuration and print its error row.
    Run {
        #[command(flatten)]
        common: Common,
        /// Write the final nodal values (1D examples) as CSV.
        #[arg(long)]
        field: Option<PathBuf>,
    },
    /// Run successive refinements, doubling M (and M2) and N.
    Convergence {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 5)]
        levels: u32,
    },
    /// List the registered experiments.
    List,
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    example: Option<String>,
    /// Polynomial degree; a comma list gives one table column per degree.
    #[arg(long, value_delimiter = ',')]
    k: Vec<usize>,
    #[arg(long = "M")]
    m: Option<usize>,
    #[arg(long = "M2")]
    m2: Option<usize>,
    #[arg(long = "N")]
    n: Option<usize>,
    #[arg(long)]
    scheme: Option<String>,
    /// Final time.
    #[arg(long = "T")]
    t_final: Option<f64>,
    /// Sets N from ‖b‖∞Δt/Δx.
    #[arg(long)]
    cfl: Option<f64>,
    /// Sets N from the time step.
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Allow multithreaded sweeps (worker count capped by SLDG_THREADS).
    #[arg(long)]
    parallel: bool,
    /// JSON file with configuration fields; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

impl Common {
    fn configs(&self) -> Result<Vec<ExperimentConfig>> {
        let base = match &self.config {
            Some(path) => ExperimentConfig::from_json(&std::fs::read_to_string(path)?)?,
            None => ExperimentConfig::default(),
        };
        let flags = ExperimentConfig {
            example: self.example.clone().unwrap_or_default(),
            k: None,
            m: self.m,
            m2: self.m2,
            n: self.n,
            scheme: self.scheme.clone(),
            t_final: self.t_final,
            cfl: self.cfl,
            dt: self.dt,
            format: self.format,
            parallel: self.parallel.then_some(true),
        };
        let cfg = base.overlay(&flags);
        if cfg.example.is_empty() {
            return Err(HarnessError::Config("--example is required".into()));
        }
        if self.k.is_empty() {
            return Ok(vec![cfg]);
        }
        Ok(self
            .k
            .iter()
            .map(|&k| ExperimentConfig { k: Some(k), ..cfg.clone() })
            .collect())
    }

    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(p) => Box::new(BufWriter::new(File::create(p)?)),
            None => Box::new(io::stdout().lock()),
        })
    }
}

fn threads(parallel: bool) -> usize {
    let cap = std::env::var("SLDG_THREADS").ok().and_then(|v| v.parse::<usize>().ok()).filter(|&n| n > 0);
    if !parallel {
        return 1;
    }
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    cap.map_or(avail, |c| c.min(avail))
}

fn in_pool<T: Send>(parallel: bool, f: impl FnOnce() -> Result<T> + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads(parallel))
        .build()
        .map_err(|e| HarnessError::Config(e.to_string()))?;
    pool.install(f)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.cmd {
        Cmd::List => {
            let mut out = io::stdout().lock();
            for e in registry() {
                writeln!(
                    out,
                    "{:<7} {}D  T={:<5} schemes: {}\n        {}",
                    e.id,
                    e.dim,
                    e.t_final,
                    e.schemes.join(", "),
                    e.title
                )?;
            }
            Ok(())
        }
        Cmd::Run { common, field } => {
            let cfgs = common.configs()?;
            if cfgs.len() != 1 {
                return Err(HarnessError::Config("run takes a single --k".into()));
            }
            let cfg = &cfgs[0];
            let setup = cfg.resolve()?;
            let (row, outcome) = in_pool(setup.parallel, || run_setup(&setup))?;
            if let Some(path) = field {
                let Some(u) = outcome.field else {
                    return Err(HarnessError::Config("field export is available for 1D examples only".into()));
                };
                let mut w = BufWriter::new(File::create(path)?);
                write_field_csv(&u, &mut w)?;
                w.flush()?;
            }
            let mut w = common.writer()?;
            emit(&[row], cfg.format.unwrap_or_default(), &mut w)?;
            w.flush()?;
            Ok(())
        }
        Cmd::Convergence { common, levels } => {
            let cfgs = common.configs()?;
            let format = cfgs[0].format.unwrap_or_default();
            let parallel = cfgs[0].parallel.unwrap_or(false);
            let mut groups = Vec::with_capacity(cfgs.len());
            for cfg in &cfgs {
                let k = cfg.resolve()?.k;
                let rows = in_pool(parallel, || convergence(cfg, levels))?;
                groups.push((format!("k={k}"), rows));
            }
            let mut w = common.writer()?;
            if groups.len() == 1 {
                emit(&groups[0].1, format, &mut w)?;
            } else {
                emit_groups(&groups, format, &mut w)?;
            }
            w.flush()?;
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sldg: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
