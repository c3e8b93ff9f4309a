//! Canned numerical experiments and their file output.
//!
//! Each scenario writes `<out>/<name>.csv` and `<out>/<name>.manifest.txt`;
//! the manifest holds the fully resolved configuration.

pub mod config;
pub mod csv;
pub mod oracle_check;
pub mod runners;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub use config::{LeadConfig, ScenarioConfig, ScenarioKind, SweepConfig, SystemConfig};
pub use oracle_check::Check;

use crate::error::{Error, Result};
use csv::{dynamics_header, dynamics_row, Cell, Table};

/// What a scenario produced.
#[derive(Debug)]
pub enum Outcome {
    Written {
        csv: PathBuf,
        manifest: PathBuf,
        /// Sweep cells that failed and were left out of the CSV.
        failed_cells: usize,
    },
    Checks(Vec<Check>),
}

pub fn csv_path(cfg: &ScenarioConfig) -> PathBuf {
    cfg.output_dir.join(format!("{}.csv", cfg.scenario.name()))
}

pub fn manifest_path(cfg: &ScenarioConfig) -> PathBuf {
    cfg.output_dir.join(format!("{}.manifest.txt", cfg.scenario.name()))
}

fn manifest(cfg: &ScenarioConfig, header: &[String], notes: &[String]) -> String {
    let mut m = String::new();
    writeln!(m, "{} {}", env!("CARGO_PKG_NAME"), env!("CARGO_PKG_VERSION")).unwrap();
    writeln!(m, "scenario: {}", cfg.scenario.name()).unwrap();
    writeln!(m, "units: energies in units of the on-site energy, times in its inverse").unwrap();
    writeln!(m, "columns: {}", header.join(",")).unwrap();
    if header.iter().any(|h| h.starts_with("dF_L")) {
        writeln!(m, "dF_L.a: beta_a times the lead free-energy change (dimensionless)").unwrap();
        writeln!(m, "cumulative integrals: trapezoid with Gregory end corrections").unwrap();
    }
    for n in notes {
        writeln!(m, "{n}").unwrap();
    }
    writeln!(m, "config:").unwrap();
    writeln!(m, "{}", serde_json::to_string_pretty(cfg).expect("config serialises")).unwrap();
    m
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

fn finish(cfg: &ScenarioConfig, table: &Table, notes: &[String], failed_cells: usize) -> Result<Outcome> {
    ensure_dir(&cfg.output_dir)?;
    let csv = csv_path(cfg);
    table.write(&csv)?;
    let manifest_file = manifest_path(cfg);
    std::fs::write(&manifest_file, manifest(cfg, &table.header, notes)).map_err(|e| Error::io(&manifest_file, e))?;
    Ok(Outcome::Written { csv, manifest: manifest_file, failed_cells })
}

pub fn thermalization_sweep(cfg: &ScenarioConfig) -> Result<Outcome> {
    let out = runners::run_thermalization_sweep(cfg);
    let header = ["N", "L", "T", "infidelity", "rel_entropy"].map(String::from).to_vec();
    let mut table = Table::new(header);
    for r in &out.rows {
        table.push(vec![
            Cell::Int(r.cell.sites),
            Cell::Int(r.cell.modes),
            Cell::Real(r.cell.temperature),
            Cell::Real(r.infidelity),
            Cell::Real(r.relative_entropy),
        ]);
    }
    let notes: Vec<String> = out
        .failures
        .iter()
        .map(|(c, e)| format!("failed cell N={} L={} T={}: {e}", c.sites, c.modes, c.temperature))
        .collect();
    finish(cfg, &table, &notes, out.failures.len())
}

pub fn entropy_rates(cfg: &ScenarioConfig) -> Result<Outcome> {
    let cells = runners::run_entropy_rates(cfg)?;
    let mut header = vec!["T".to_string(), "L".to_string()];
    header.extend(dynamics_header(1));
    let mut table = Table::new(header);
    for ((t, l), record) in &cells {
        for s in &record.samples {
            let mut row = vec![Cell::Real(*t), Cell::Int(*l)];
            row.extend(dynamics_row(s));
            table.push(row);
        }
    }
    finish(cfg, &table, &[], 0)
}

pub fn budget(cfg: &ScenarioConfig) -> Result<Outcome> {
    let record = runners::run_budget(cfg)?;
    let mut table = Table::new(dynamics_header(cfg.leads.len()));
    for s in &record.samples {
        table.push(dynamics_row(s));
    }
    let worst = record.samples.iter().map(|s| s.budget.residual.abs()).fold(0.0, f64::max);
    finish(cfg, &table, &[format!("max |budget_residual|: {worst:.3e}")], 0)
}

/// Run the scenario named in `cfg`.
pub fn execute(cfg: &ScenarioConfig) -> Result<Outcome> {
    cfg.validate()?;
    match cfg.scenario {
        ScenarioKind::ThermalizationSweep => thermalization_sweep(cfg),
        ScenarioKind::EntropyRates => entropy_rates(cfg),
        ScenarioKind::BudgetSingle | ScenarioKind::BudgetMulti => budget(cfg),
        ScenarioKind::OracleCheck => oracle_check::run_oracle_check(cfg, false).map(Outcome::Checks),
    }
}
