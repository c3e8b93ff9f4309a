use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use super::config::ScenarioConfig;
use crate::dynamics::{steady_state, Drift};
use crate::error::Result;
use crate::gaussian::{log_fidelity_with, relative_entropy_with, thermal_covariance, GaussianForm};
use crate::thermo::{simulate, RunSettings, ThermoRecord};

/// Apply `f` to every item on up to `threads` workers; output keeps input order.
pub fn parallel_map<T: Sync, R: Send>(items: &[T], threads: usize, f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let workers = threads.max(1).min(items.len());
    if workers <= 1 {
        return items.iter().map(f).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<R>>> = Mutex::new((0..items.len()).map(|_| None).collect());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= items.len() {
                    break;
                }
                let r = f(&items[i]);
                slots.lock().expect("worker panicked")[i] = Some(r);
            });
        }
    });
    slots.into_inner().expect("worker panicked").into_iter().map(|r| r.expect("every slot filled")).collect()
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepCell {
    pub sites: usize,
    pub modes: usize,
    pub temperature: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub cell: SweepCell,
    /// `1 - F(rho_ss, rho_beta)`.
    pub infidelity: f64,
    /// `D(rho_ss || rho_beta)`.
    pub relative_entropy: f64,
}

#[derive(Debug)]
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    pub failures: Vec<(SweepCell, crate::Error)>,
}

/// Cells in output order: N, then L, then T.
pub fn sweep_cells(cfg: &ScenarioConfig) -> Vec<SweepCell> {
    let s = &cfg.sweep;
    let mut cells = Vec::new();
    for &sites in &s.sites {
        for &modes in &s.modes {
            for &temperature in &s.temperatures {
                cells.push(SweepCell { sites, modes, temperature });
            }
        }
    }
    cells
}

/// Steady state of one cell against the thermal state of the whole extended
/// Hamiltonian at the lead's temperature and chemical potential.
pub fn thermalization_cell(cfg: &ScenarioConfig, cell: SweepCell) -> Result<SweepRow> {
    let model = cfg.cell_model(cell.sites, cell.modes, cell.temperature)?;
    let css = steady_state(&Drift::new(&model))?;
    let mu = model.leads()[0].lead.chemical_potential;
    let cth = thermal_covariance(model.hamiltonian(), cell.temperature, mu)?;
    let fss = GaussianForm::new(&css)?;
    let fth = GaussianForm::new(&cth)?;
    Ok(SweepRow {
        cell,
        infidelity: -log_fidelity_with(&fss, &fth)?.exp_m1(),
        relative_entropy: relative_entropy_with(&fss, &css, &fth),
    })
}

/// Failed cells are reported, not fatal.
pub fn run_thermalization_sweep(cfg: &ScenarioConfig) -> SweepOutcome {
    let cells = sweep_cells(cfg);
    let results = parallel_map(&cells, cfg.threads, |&c| thermalization_cell(cfg, c));
    let mut outcome = SweepOutcome { rows: Vec::new(), failures: Vec::new() };
    for (cell, r) in cells.into_iter().zip(results) {
        match r {
            Ok(row) => outcome.rows.push(row),
            Err(e) => outcome.failures.push((cell, e)),
        }
    }
    outcome
}

pub fn settings(cfg: &ScenarioConfig) -> RunSettings {
    RunSettings { dt: cfg.dt, t_max: cfg.t_max, sample_every: cfg.sample_every }
}

/// `(T, L)` cells of the entropy-rate comparison, temperature-major.
pub fn rate_cells(cfg: &ScenarioConfig) -> Vec<(f64, usize)> {
    let mut cells = Vec::new();
    for &t in &cfg.sweep.temperatures {
        for &l in &cfg.sweep.modes {
            cells.push((t, l));
        }
    }
    cells
}

pub fn entropy_rate_cell(cfg: &ScenarioConfig, temperature: f64, modes: usize) -> Result<ThermoRecord> {
    let sites = cfg.system.sites;
    let model = cfg.cell_model(sites, modes, temperature)?;
    simulate(&model, &cfg.system_initial(None), settings(cfg))
}

pub fn run_entropy_rates(cfg: &ScenarioConfig) -> Result<Vec<((f64, usize), ThermoRecord)>> {
    let cells = rate_cells(cfg);
    let records = parallel_map(&cells, cfg.threads, |&(t, l)| entropy_rate_cell(cfg, t, l));
    cells.into_iter().zip(records).map(|(c, r)| r.map(|r| (c, r))).collect()
}

/// Single- or multi-lead budget run with the configured leads.
pub fn run_budget(cfg: &ScenarioConfig) -> Result<ThermoRecord> {
    simulate(&cfg.model()?, &cfg.system_initial(None), settings(cfg))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::config::ScenarioKind;

    #[test]
    fn parallel_map_keeps_order() {
        let items: Vec<usize> = (0..23).collect();
        let out = parallel_map(&items, 4, |x| x * x);
        assert_eq!(out, items.iter().map(|x| x * x).collect::<Vec<_>>());
    }

    #[test]
    fn small_sweep_is_sorted_and_thermalises() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::ThermalizationSweep);
        cfg.sweep.sites = vec![1, 2];
        cfg.sweep.modes = vec![8, 32];
        cfg.sweep.temperatures = vec![1.0];
        cfg.threads = 3;
        let out = run_thermalization_sweep(&cfg);
        assert!(out.failures.is_empty());
        let keys: Vec<_> = out.rows.iter().map(|r| (r.cell.sites, r.cell.modes)).collect();
        assert_eq!(keys, vec![(1, 8), (1, 32), (2, 8), (2, 32)]);
        for pair in out.rows.chunks(2) {
            assert!(pair[1].infidelity < pair[0].infidelity);
            assert!(pair[0].relative_entropy > 0.0);
        }
    }

    #[test]
    fn bad_cell_is_reported_not_fatal() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::ThermalizationSweep);
        cfg.sweep.sites = vec![1];
        cfg.sweep.modes = vec![4];
        cfg.sweep.temperatures = vec![1.0];
        cfg.leads[0].coupling = 0.0;
        let out = run_thermalization_sweep(&cfg);
        assert!(out.rows.is_empty());
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.failures[0].1.exit_code(), 2);
    }
}
