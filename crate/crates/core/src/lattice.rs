//! Single-particle model: a tight-binding chain plus discretised leads.
//!
//! Mode ordering in the extended space is system sites `0..N` followed by the
//! lead blocks in the order they were given.

use std::ops::Range;

use faer::{Mat, MatRef};

use crate::error::{Error, Result};

/// Finite chain with nearest-neighbour hopping `-g`.
#[derive(Clone, Debug, PartialEq)]
pub struct SystemSpec {
    onsite: Vec<f64>,
    hopping: f64,
}

impl SystemSpec {
    pub fn new(onsite: Vec<f64>, hopping: f64) -> Result<Self> {
        if onsite.is_empty() {
            return Err(Error::invalid("onsite", "system needs at least one site"));
        }
        if onsite.iter().any(|e| !e.is_finite()) {
            return Err(Error::invalid("onsite", "energies must be finite"));
        }
        if !hopping.is_finite() {
            return Err(Error::invalid("hopping", "must be finite"));
        }
        Ok(Self { onsite, hopping })
    }

    pub fn uniform(sites: usize, onsite: f64, hopping: f64) -> Result<Self> {
        Self::new(vec![onsite; sites], hopping)
    }

    pub fn sites(&self) -> usize {
        self.onsite.len()
    }

    pub fn onsite(&self) -> &[f64] {
        &self.onsite
    }

    pub fn hopping(&self) -> f64 {
        self.hopping
    }
}

/// Physical description of one lead.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeadSpec {
    /// Number of discrete modes `L`.
    pub modes: usize,
    /// Band is `[-W, W]`.
    pub half_bandwidth: f64,
    /// Wide-band coupling strength `Gamma`.
    pub coupling: f64,
    pub temperature: f64,
    pub chemical_potential: f64,
    /// System site (0-based) the lead is attached to.
    pub attachment: usize,
}

impl LeadSpec {
    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// Discrete mode data for one lead.
#[derive(Clone, Debug, PartialEq)]
pub struct LeadDiscretization {
    pub energies: Vec<f64>,
    /// Mode spacing `e_k`; equal to the damping `gamma_k` on the uniform grid.
    pub widths: Vec<f64>,
    /// Tunnelling amplitude `kappa_k` to the attachment site.
    pub couplings: Vec<f64>,
    pub damping: Vec<f64>,
    /// Fermi occupation each mode is damped toward.
    pub occupations: Vec<f64>,
    pub temperature: f64,
    pub chemical_potential: f64,
    pub attachment: usize,
}

impl LeadDiscretization {
    pub fn modes(&self) -> usize {
        self.energies.len()
    }

    pub fn beta(&self) -> f64 {
        1.0 / self.temperature
    }
}

/// Fermi-Dirac occupation, written so that `exp` never overflows.
pub fn fermi(energy: f64, temperature: f64, chemical_potential: f64) -> f64 {
    let x = (energy - chemical_potential) / temperature;
    if x >= 0.0 {
        let e = (-x).exp();
        e / (1.0 + e)
    } else {
        1.0 / (1.0 + x.exp())
    }
}

/// Uniform midpoint grid on `[-W, W]` with `gamma_k = e_k = 2W/L` and
/// `kappa_k = sqrt(Gamma e_k / 2 pi)`.
pub fn discretize(spec: &LeadSpec) -> Result<LeadDiscretization> {
    if spec.modes == 0 {
        return Err(Error::invalid("modes", "lead needs at least one mode"));
    }
    if !(spec.half_bandwidth > 0.0 && spec.half_bandwidth.is_finite()) {
        return Err(Error::invalid("half_bandwidth", "must be positive"));
    }
    if !(spec.coupling >= 0.0 && spec.coupling.is_finite()) {
        return Err(Error::invalid("coupling", "must be non-negative"));
    }
    if !(spec.temperature > 0.0 && spec.temperature.is_finite()) {
        return Err(Error::invalid("temperature", "must be positive"));
    }
    if !spec.chemical_potential.is_finite() {
        return Err(Error::invalid("chemical_potential", "must be finite"));
    }
    let l = spec.modes;
    let w = spec.half_bandwidth;
    let spacing = 2.0 * w / l as f64;
    let energies: Vec<f64> = (0..l).map(|k| -w + (k as f64 + 0.5) * spacing).collect();
    let kappa = (spec.coupling * spacing / (2.0 * std::f64::consts::PI)).sqrt();
    let occupations = energies
        .iter()
        .map(|&e| fermi(e, spec.temperature, spec.chemical_potential))
        .collect();
    Ok(LeadDiscretization {
        energies,
        widths: vec![spacing; l],
        couplings: vec![kappa; l],
        damping: vec![spacing; l],
        occupations,
        temperature: spec.temperature,
        chemical_potential: spec.chemical_potential,
        attachment: spec.attachment,
    })
}

/// A lead placed in the extended index space.
#[derive(Clone, Debug)]
pub struct LeadBlock {
    pub offset: usize,
    pub lead: LeadDiscretization,
}

impl LeadBlock {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.lead.modes()
    }
}

/// Extended single-particle model `H`, damping `gamma` and drive `F = gamma f`.
#[derive(Clone, Debug)]
pub struct ExtendedModel {
    system: SystemSpec,
    hamiltonian: Mat<f64>,
    entries: Vec<(usize, usize, f64)>,
    damping: Vec<f64>,
    drive: Vec<f64>,
    leads: Vec<LeadBlock>,
}

impl ExtendedModel {
    pub fn assemble(system: &SystemSpec, leads: &[LeadDiscretization]) -> Result<Self> {
        let n = system.sites();
        if leads.is_empty() {
            return Err(Error::invalid("leads", "at least one lead is required"));
        }
        for lead in leads {
            if lead.attachment >= n {
                return Err(Error::IndexOutOfRange { index: lead.attachment, dim: n });
            }
            let l = lead.modes();
            for (name, len) in [
                ("widths", lead.widths.len()),
                ("couplings", lead.couplings.len()),
                ("damping", lead.damping.len()),
                ("occupations", lead.occupations.len()),
            ] {
                if len != l {
                    return Err(Error::invalid(name, format!("expected {l} entries, got {len}")));
                }
            }
        }
        let dim = n + leads.iter().map(|l| l.modes()).sum::<usize>();
        let mut h = Mat::<f64>::zeros(dim, dim);
        let mut damping = vec![0.0; dim];
        let mut drive = vec![0.0; dim];
        for (j, &e) in system.onsite().iter().enumerate() {
            h[(j, j)] = e;
        }
        for j in 0..n.saturating_sub(1) {
            h[(j, j + 1)] = -system.hopping();
            h[(j + 1, j)] = -system.hopping();
        }
        let mut blocks = Vec::with_capacity(leads.len());
        let mut offset = n;
        for lead in leads {
            let p = lead.attachment;
            for k in 0..lead.modes() {
                let i = offset + k;
                h[(i, i)] = lead.energies[k];
                h[(i, p)] = lead.couplings[k];
                h[(p, i)] = lead.couplings[k];
                damping[i] = lead.damping[k];
                drive[i] = lead.damping[k] * lead.occupations[k];
            }
            blocks.push(LeadBlock { offset, lead: lead.clone() });
            offset += lead.modes();
        }
        let mut entries = Vec::new();
        for j in 0..dim {
            for i in 0..dim {
                if h[(i, j)] != 0.0 {
                    entries.push((i, j, h[(i, j)]));
                }
            }
        }
        Ok(Self { system: system.clone(), hamiltonian: h, entries, damping, drive, leads: blocks })
    }

    pub fn dim(&self) -> usize {
        self.damping.len()
    }

    pub fn system(&self) -> &SystemSpec {
        &self.system
    }

    pub fn system_range(&self) -> Range<usize> {
        0..self.system.sites()
    }

    pub fn leads(&self) -> &[LeadBlock] {
        &self.leads
    }

    pub fn hamiltonian(&self) -> MatRef<'_, f64> {
        self.hamiltonian.as_ref()
    }

    /// Nonzero entries `(row, col, value)` of `H`, column-major.
    pub fn hamiltonian_entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    pub fn damping(&self) -> &[f64] {
        &self.damping
    }

    pub fn drive(&self) -> &[f64] {
        &self.drive
    }

    /// Principal block of `H` on `range`.
    pub fn block_hamiltonian(&self, range: Range<usize>) -> Mat<f64> {
        self.hamiltonian.as_ref().submatrix(range.start, range.start, range.len(), range.len()).to_owned()
    }

    /// Tunnelling entries `(system site, lead mode, kappa)` of lead `alpha`.
    pub fn coupling_entries(&self, alpha: usize) -> Vec<(usize, usize, f64)> {
        let block = &self.leads[alpha];
        block
            .range()
            .zip(&block.lead.couplings)
            .filter(|(_, &k)| k != 0.0)
            .map(|(i, &k)| (block.lead.attachment, i, k))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lead(modes: usize, attachment: usize) -> LeadSpec {
        LeadSpec {
            modes,
            half_bandwidth: 10.0,
            coupling: 1.0,
            temperature: 1.0,
            chemical_potential: 0.0,
            attachment,
        }
    }

    #[test]
    fn midpoint_grid_and_widths() {
        let d = discretize(&lead(4, 0)).unwrap();
        assert_eq!(d.energies, vec![-7.5, -2.5, 2.5, 7.5]);
        assert!(d.widths.iter().all(|&e| e == 5.0));
        assert_eq!(d.damping, d.widths);
        let kappa = (5.0 / (2.0 * std::f64::consts::PI)).sqrt();
        assert!(d.couplings.iter().all(|&k| (k - kappa).abs() < 1e-15));
        // symmetric band at mu = 0
        assert!((d.occupations[0] + d.occupations[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn widths_sum_to_bandwidth() {
        for l in [1, 3, 16, 101] {
            let d = discretize(&lead(l, 0)).unwrap();
            assert!((d.widths.iter().sum::<f64>() - 20.0).abs() < 1e-12);
        }
    }

    #[test]
    fn fermi_is_overflow_safe() {
        assert_eq!(fermi(0.0, 1.0, 0.0), 0.5);
        assert_eq!(fermi(1e4, 1e-3, 0.0), 0.0);
        assert_eq!(fermi(-1e4, 1e-3, 0.0), 1.0);
        assert!((fermi(1.0, 1.0, 0.0) - 1.0 / (1.0 + 1f64.exp())).abs() < 1e-16);
    }

    #[test]
    fn assemble_layout() {
        let sys = SystemSpec::uniform(2, 1.0, 1.0).unwrap();
        let leads = [discretize(&lead(3, 0)).unwrap(), discretize(&lead(2, 1)).unwrap()];
        let m = ExtendedModel::assemble(&sys, &leads).unwrap();
        assert_eq!(m.dim(), 7);
        let h = m.hamiltonian();
        assert_eq!(h[(0, 1)], -1.0);
        assert_eq!(h[(0, 0)], 1.0);
        assert_eq!(m.leads()[0].range(), 2..5);
        assert_eq!(m.leads()[1].range(), 5..7);
        assert_eq!(h[(5, 1)], leads[1].couplings[0]);
        assert_eq!(h[(5, 0)], 0.0);
        // leads do not talk to each other
        assert_eq!(h[(2, 5)], 0.0);
        assert_eq!(&m.damping()[..2], &[0.0, 0.0]);
        for j in 0..7 {
            for i in 0..7 {
                assert_eq!(h[(i, j)], h[(j, i)]);
            }
        }
        assert_eq!(m.coupling_entries(1).len(), 2);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SystemSpec::new(vec![], 1.0).is_err());
        assert!(discretize(&LeadSpec { modes: 0, ..lead(1, 0) }).is_err());
        assert!(discretize(&LeadSpec { temperature: 0.0, ..lead(1, 0) }).is_err());
        let sys = SystemSpec::uniform(1, 0.0, 1.0).unwrap();
        let far = discretize(&lead(2, 3)).unwrap();
        assert!(matches!(
            ExtendedModel::assemble(&sys, &[far]),
            Err(Error::IndexOutOfRange { index: 3, dim: 1 })
        ));
    }
}
