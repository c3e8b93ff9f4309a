use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mesoleads::scenario::{self, oracle_check, Outcome, ScenarioConfig, ScenarioKind};

#[derive(Parser)]
#[command(name = "mesoleads", version, about = "Open fermion chains with mesoscopic leads")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Infidelity of the steady state against the global thermal state, over N, L and T.
    ThermalizationSweep(Common),
    /// Spohn versus current-based entropy production for a grid of (T, L).
    EntropyRates(Common),
    /// Entropy budget for one lead.
    BudgetSingle(Common),
    /// Entropy budget for several leads.
    BudgetMulti(Common),
    /// Compare against brute-force many-body references.
    OracleCheck {
        #[command(flatten)]
        common: Common,
        /// Flip the sign of the Gaussian dissipator; the dynamics check must then fail.
        #[arg(long, hide = true)]
        flip_dissipator: bool,
    },
}

#[derive(Args)]
struct Common {
    /// JSON file overriding the built-in defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Integration step.
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Final time.
    #[arg(long = "tmax", allow_negative_numbers = true)]
    t_max: Option<f64>,
    /// Worker threads for sweeps.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn resolve(&self, kind: ScenarioKind) -> mesoleads::Result<ScenarioConfig> {
        let mut cfg = ScenarioConfig::load(kind, self.config.as_deref())?;
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        if let Some(dt) = self.dt {
            cfg.dt = dt;
        }
        if let Some(t) = self.t_max {
            cfg.t_max = t;
        }
        if let Some(n) = self.threads {
            cfg.threads = n;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

fn run(cli: Cli) -> mesoleads::Result<ExitCode> {
    let (kind, common, flip) = match &cli.command {
        Command::ThermalizationSweep(c) => (ScenarioKind::ThermalizationSweep, c, false),
        Command::EntropyRates(c) => (ScenarioKind::EntropyRates, c, false),
        Command::BudgetSingle(c) => (ScenarioKind::BudgetSingle, c, false),
        Command::BudgetMulti(c) => (ScenarioKind::BudgetMulti, c, false),
        Command::OracleCheck { common, flip_dissipator } => (ScenarioKind::OracleCheck, common, *flip_dissipator),
    };
    let cfg = common.resolve(kind)?;
    let outcome = if flip {
        Outcome::Checks(oracle_check::run_oracle_check(&cfg, true)?)
    } else {
        scenario::execute(&cfg)?
    };
    match outcome {
        Outcome::Written { csv, manifest, failed_cells } => {
            println!("wrote {}", csv.display());
            println!("wrote {}", manifest.display());
            if failed_cells > 0 {
                eprintln!("{failed_cells} cell(s) failed; see the manifest");
                return Ok(ExitCode::from(2));
            }
            Ok(ExitCode::SUCCESS)
        }
        Outcome::Checks(checks) => {
            for c in &checks {
                println!("{c}");
            }
            let failed = checks.iter().filter(|c| !c.passed()).count();
            if failed > 0 {
                println!("{failed} of {} checks failed", checks.len());
                return Ok(ExitCode::from(3));
            }
            println!("all {} checks passed", checks.len());
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
