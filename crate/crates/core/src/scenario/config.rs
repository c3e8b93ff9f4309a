use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussian::Covariance;
use crate::lattice::{discretize, ExtendedModel, LeadSpec, SystemSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioKind {
    ThermalizationSweep,
    EntropyRates,
    BudgetSingle,
    BudgetMulti,
    OracleCheck,
}

impl ScenarioKind {
    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::ThermalizationSweep => "thermalization-sweep",
            ScenarioKind::EntropyRates => "entropy-rates",
            ScenarioKind::BudgetSingle => "budget-single",
            ScenarioKind::BudgetMulti => "budget-multi",
            ScenarioKind::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemConfig {
    pub sites: usize,
    pub onsite: f64,
    pub hopping: f64,
    /// Initial occupation of every site; overridden by `initial_occupations`.
    pub initial_occupation: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub onsite_energies: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_occupations: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LeadConfig {
    pub modes: usize,
    pub half_bandwidth: f64,
    pub coupling: f64,
    pub temperature: f64,
    pub chemical_potential: f64,
    /// 1-based system site.
    pub site: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub sites: Vec<usize>,
    pub modes: Vec<usize>,
    pub temperatures: Vec<f64>,
}

/// Fully resolved scenario parameters. Energies in units of the on-site
/// energy, times in its inverse.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioKind,
    pub system: SystemConfig,
    /// For sweeps and entropy-rate cells, the first lead is a template whose
    /// modes and temperature are replaced cell by cell.
    pub leads: Vec<LeadConfig>,
    pub sweep: SweepConfig,
    pub dt: f64,
    pub t_max: f64,
    pub sample_every: usize,
    pub threads: usize,
    pub output_dir: PathBuf,
}

fn lead(modes: usize, temperature: f64) -> LeadConfig {
    LeadConfig { modes, half_bandwidth: 10.0, coupling: 1.0, temperature, chemical_potential: 0.0, site: 1 }
}

impl ScenarioConfig {
    pub fn defaults(kind: ScenarioKind) -> Self {
        let system = SystemConfig {
            sites: 1,
            onsite: 1.0,
            hopping: 1.0,
            initial_occupation: 0.5,
            onsite_energies: None,
            initial_occupations: None,
        };
        let sweep = SweepConfig { sites: vec![1], modes: vec![100], temperatures: vec![1.0] };
        let base = Self {
            scenario: kind,
            system,
            leads: vec![lead(100, 1.0)],
            sweep,
            dt: 0.01,
            t_max: 20.0,
            sample_every: 10,
            threads: 1,
            output_dir: PathBuf::from("out"),
        };
        match kind {
            ScenarioKind::ThermalizationSweep => Self {
                sweep: SweepConfig {
                    sites: vec![1, 2, 3, 4],
                    modes: vec![16, 32, 64, 128, 256],
                    temperatures: vec![0.5, 1.0, 5.0],
                },
                ..base
            },
            ScenarioKind::EntropyRates => Self {
                sweep: SweepConfig { sites: vec![1], modes: vec![5, 100], temperatures: vec![0.1, 1.0] },
                t_max: 30.0,
                ..base
            },
            ScenarioKind::BudgetSingle => base,
            // long enough to get past the first lead revival near t = 2 pi / e_k
            ScenarioKind::BudgetMulti => Self { leads: vec![lead(100, 0.5), lead(100, 1.0)], t_max: 60.0, ..base },
            ScenarioKind::OracleCheck => Self {
                leads: vec![lead(2, 1.0)],
                sweep: SweepConfig { sites: vec![1], modes: vec![2, 3, 4], temperatures: vec![1.0] },
                dt: 0.005,
                t_max: 10.0,
                ..base
            },
        }
    }

    /// Defaults for `kind`, overlaid with the JSON object at `path` if given.
    pub fn load(kind: ScenarioKind, path: Option<&Path>) -> Result<Self> {
        match path {
            None => {
                let cfg = Self::defaults(kind);
                cfg.validate()?;
                Ok(cfg)
            }
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|e| Error::io(p, e))?;
                Self::from_json(kind, &text, p)
            }
        }
    }

    pub fn from_json(kind: ScenarioKind, text: &str, origin: &Path) -> Result<Self> {
        let bad = |reason: String| Error::Config { path: origin.to_path_buf(), reason };
        let overlay: serde_json::Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        if !overlay.is_object() {
            return Err(bad("top level must be an object".into()));
        }
        let mut merged = serde_json::to_value(Self::defaults(kind)).expect("defaults serialise");
        merge(&mut merged, overlay);
        let cfg: Self = serde_json::from_value(merged).map_err(|e| bad(e.to_string()))?;
        if cfg.scenario != kind {
            return Err(bad(format!("file is for `{}`, not `{}`", cfg.scenario.name(), kind.name())));
        }
        cfg.validate().map_err(|e| bad(e.to_string()))?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(Error::invalid("dt", "must be positive"));
        }
        if !(self.t_max > self.dt && self.t_max.is_finite()) {
            return Err(Error::invalid("t_max", "must exceed dt"));
        }
        if self.sample_every == 0 {
            return Err(Error::invalid("sample_every", "must be at least 1"));
        }
        if self.threads == 0 {
            return Err(Error::invalid("threads", "must be at least 1"));
        }
        if self.leads.is_empty() {
            return Err(Error::invalid("leads", "at least one lead is required"));
        }
        let sweeps = matches!(
            self.scenario,
            ScenarioKind::ThermalizationSweep | ScenarioKind::EntropyRates | ScenarioKind::OracleCheck
        );
        if sweeps {
            let s = &self.sweep;
            if s.sites.is_empty() || s.modes.is_empty() || s.temperatures.is_empty() {
                return Err(Error::invalid("sweep", "axes must be non-empty"));
            }
            if s.sites.contains(&0) || s.modes.contains(&0) {
                return Err(Error::invalid("sweep", "site and mode counts must be positive"));
            }
            if s.temperatures.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                return Err(Error::invalid("sweep.temperatures", "must be positive"));
            }
        }
        let sites = self.system.sites;
        if let Some(e) = &self.system.onsite_energies {
            if e.len() != sites {
                return Err(Error::invalid("system.onsite_energies", format!("expected {sites} values")));
            }
        }
        if let Some(n) = &self.system.initial_occupations {
            if n.len() != sites {
                return Err(Error::invalid("system.initial_occupations", format!("expected {sites} values")));
            }
        }
        let occ = self.system.initial_occupations.clone().unwrap_or_else(|| vec![self.system.initial_occupation]);
        if occ.iter().any(|n| !(0.0..=1.0).contains(n)) {
            return Err(Error::invalid("system.initial_occupation", "must lie in [0, 1]"));
        }
        for l in &self.leads {
            if l.site == 0 || (!sweeps && l.site > sites) {
                return Err(Error::invalid("leads.site", format!("site {} outside 1..={sites}", l.site)));
            }
        }
        // catch bad physical parameters before any work starts
        for spec in self.lead_specs() {
            discretize(&spec)?;
        }
        Ok(())
    }

    /// Chain with `sites` sites (the configured count if `None`).
    pub fn system_spec(&self, sites: Option<usize>) -> Result<SystemSpec> {
        let s = &self.system;
        match (sites, &s.onsite_energies) {
            (None, Some(e)) => SystemSpec::new(e.clone(), s.hopping),
            (Some(n), _) => SystemSpec::uniform(n, s.onsite, s.hopping),
            (None, None) => SystemSpec::uniform(s.sites, s.onsite, s.hopping),
        }
    }

    /// Initial system covariance, diagonal.
    pub fn system_initial(&self, sites: Option<usize>) -> Covariance {
        let n = sites.unwrap_or(self.system.sites);
        match (&self.system.initial_occupations, sites) {
            (Some(v), None) => Covariance::diagonal(v),
            _ => Covariance::diagonal(&vec![self.system.initial_occupation; n]),
        }
    }

    pub fn lead_specs(&self) -> Vec<LeadSpec> {
        self.leads.iter().map(|l| LeadSpec {
            modes: l.modes,
            half_bandwidth: l.half_bandwidth,
            coupling: l.coupling,
            temperature: l.temperature,
            chemical_potential: l.chemical_potential,
            attachment: l.site - 1,
        })
        .collect()
    }

    /// Model with the configured system and leads.
    pub fn model(&self) -> Result<ExtendedModel> {
        let leads = self.lead_specs().iter().map(discretize).collect::<Result<Vec<_>>>()?;
        ExtendedModel::assemble(&self.system_spec(None)?, &leads)
    }

    /// Single-lead model for one sweep cell, built from the first lead.
    pub fn cell_model(&self, sites: usize, modes: usize, temperature: f64) -> Result<ExtendedModel> {
        let template = self.lead_specs()[0];
        let spec = LeadSpec { modes, temperature, ..template };
        if spec.attachment >= sites {
            return Err(Error::IndexOutOfRange { index: spec.attachment, dim: sites });
        }
        ExtendedModel::assemble(&self.system_spec(Some(sites))?, &[discretize(&spec)?])
    }
}

fn merge(base: &mut serde_json::Value, overlay: serde_json::Value) {
    match (base, overlay) {
        (serde_json::Value::Object(b), serde_json::Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (slot, v) => *slot = v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_default_validates() {
        for kind in [
            ScenarioKind::ThermalizationSweep,
            ScenarioKind::EntropyRates,
            ScenarioKind::BudgetSingle,
            ScenarioKind::BudgetMulti,
            ScenarioKind::OracleCheck,
        ] {
            ScenarioConfig::defaults(kind).validate().unwrap();
        }
    }

    #[test]
    fn overlay_keeps_unspecified_defaults() {
        let cfg = ScenarioConfig::from_json(
            ScenarioKind::BudgetSingle,
            r#"{"dt": 0.005, "system": {"initial_occupation": 1.0}}"#,
            Path::new("x.json"),
        )
        .unwrap();
        assert_eq!(cfg.dt, 0.005);
        assert_eq!(cfg.system.initial_occupation, 1.0);
        assert_eq!(cfg.system.hopping, 1.0);
        assert_eq!(cfg.leads[0].modes, 100);
    }

    #[test]
    fn config_errors() {
        let p = Path::new("x.json");
        let kind = ScenarioKind::BudgetSingle;
        for text in [
            "not json",
            "[1, 2]",
            r#"{"dt": -1}"#,
            r#"{"t_max": 0.001}"#,
            r#"{"bogus": 1}"#,
            r#"{"scenario": "budget-multi"}"#,
            r#"{"leads": []}"#,
            r#"{"leads": [{"modes": 4, "half_bandwidth": 1, "coupling": 1, "temperature": 1, "chemical_potential": 0, "site": 2}]}"#,
            r#"{"leads": [{"modes": 4, "half_bandwidth": 1, "coupling": 1, "temperature": -1, "chemical_potential": 0, "site": 1}]}"#,
        ] {
            let err = ScenarioConfig::from_json(kind, text, p).unwrap_err();
            assert!(matches!(err, Error::Config { .. }), "{text}: {err}");
            assert_eq!(err.exit_code(), 1);
        }
        let sweep = ScenarioKind::ThermalizationSweep;
        assert!(ScenarioConfig::from_json(sweep, r#"{"sweep": {"sites": [], "modes": [4], "temperatures": [1]}}"#, p).is_err());
    }

    #[test]
    fn site_indices_are_one_based() {
        let mut cfg = ScenarioConfig::defaults(ScenarioKind::BudgetSingle);
        cfg.system.sites = 3;
        cfg.leads[0].site = 3;
        cfg.leads[0].modes = 4;
        let m = cfg.model().unwrap();
        assert_eq!(m.leads()[0].lead.attachment, 2);
    }
}
