//! Deterministic CSV output.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::thermo::ThermoSample;

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Cell {
    Int(usize),
    Real(f64),
}

/// 17 significant digits, round-trip exact.
pub fn format_real(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Clone, Debug, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Render; any non-finite value is an error rather than `NaN` in a file.
    pub fn render(&self) -> Result<String> {
        let mut out = self.header.join(",");
        out.push('\n');
        for (r, row) in self.rows.iter().enumerate() {
            for (c, cell) in row.iter().enumerate() {
                if c > 0 {
                    out.push(',');
                }
                match *cell {
                    Cell::Int(v) => write!(out, "{v}").unwrap(),
                    Cell::Real(v) if v.is_finite() => out.push_str(&format_real(v)),
                    Cell::Real(_) => {
                        return Err(Error::NonFiniteOutput { column: self.header[c].clone(), row: r });
                    }
                }
            }
            out.push('\n');
        }
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.render()?;
        std::fs::write(path, text).map_err(|e| Error::io(path, e))
    }
}

pub fn dynamics_header(leads: usize) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    for a in 1..=leads {
        for name in ["I_E", "I_P", "I_Q", "J_E", "J_P", "J_Q", "S_L", "dF_L"] {
            h.push(format!("{name}.{a}"));
        }
    }
    h.extend(
        [
            "S_S",
            "S_SL",
            "sigma_int",
            "sigma_ext",
            "sigma_spohn",
            "Sigma_int",
            "Sigma_ext",
            "mutual_or_total_corr",
            "budget_lhs",
            "budget_rhs",
            "budget_residual",
        ]
        .map(String::from),
    );
    h
}

pub fn dynamics_row(s: &ThermoSample) -> Vec<Cell> {
    let mut row = vec![s.t];
    for l in &s.leads {
        let c = &l.currents;
        row.extend([
            c.energy_ext,
            c.particle_ext,
            c.heat_ext,
            c.energy_int,
            c.particle_int,
            c.heat_int,
            l.entropy,
            l.free_energy,
        ]);
    }
    row.extend([
        s.system_entropy,
        s.total_entropy,
        s.rates.internal,
        s.rates.external,
        s.rates.spohn,
        s.cumulative_internal,
        s.cumulative_external,
        s.correlations,
        s.budget.lhs,
        s.budget.rhs,
        s.budget.residual,
    ]);
    row.into_iter().map(Cell::Real).collect()
}
