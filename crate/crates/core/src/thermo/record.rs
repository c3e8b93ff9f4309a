use super::{entropy_rates, CurrentOperators, EntropyRates, LeadCurrents};
use crate::dynamics::{initial_covariance, rk4_step, steady_state, validate_dt, Drift, PHYSICALITY_TOL};
use crate::error::{Error, Result};
use crate::gaussian::{check_physical, entropy, Covariance, GaussianForm};
use crate::lattice::ExtendedModel;
use crate::linalg::CMat;
use crate::quadrature::cumulative_gregory;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunSettings {
    pub dt: f64,
    pub t_max: f64,
    /// Emit a sample every this many steps (the final step is always sampled).
    pub sample_every: usize,
}

/// Two sides of the entropy budget `Sigma - Sigma~ = sum beta dF + correlations`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Budget {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LeadSample {
    pub currents: LeadCurrents,
    pub entropy: f64,
    /// `beta (dE - mu dN) - dS_L`, the change in lead free energy in units of `T`.
    pub free_energy: f64,
    pub delta_particles: f64,
    pub delta_energy: f64,
    /// `int (I_P - J_P) dt - dN_L`.
    pub particle_residual: f64,
    /// `int (I_E - J_E) dt - dE_L`.
    pub energy_residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ThermoSample {
    pub t: f64,
    pub leads: Vec<LeadSample>,
    pub system_entropy: f64,
    pub total_entropy: f64,
    pub rates: EntropyRates,
    /// `Sigma`, integrated internal rate.
    pub cumulative_internal: f64,
    /// `Sigma~`, integrated external rate.
    pub cumulative_external: f64,
    /// Mutual information (one lead) or total correlation, relative to t = 0.
    pub correlations: f64,
    pub budget: Budget,
}

#[derive(Clone, Debug)]
pub struct ThermoRecord {
    pub settings: RunSettings,
    pub samples: Vec<ThermoSample>,
    /// Rates at every integration step, for diagnostics.
    pub step_rates: Vec<EntropyRates>,
}

impl ThermoRecord {
    pub fn dt(&self) -> f64 {
        self.settings.dt
    }
}

struct Functionals {
    system_entropy: f64,
    total_entropy: f64,
    lead_entropy: Vec<f64>,
    lead_particles: Vec<f64>,
    lead_energy: Vec<f64>,
}

fn functionals(model: &ExtendedModel, c: &Covariance, form: &GaussianForm) -> Result<Functionals> {
    let h = model.hamiltonian();
    let mut out = Functionals {
        system_entropy: entropy(&c.block_range(model.system_range())?)?,
        total_entropy: form.entropy(),
        lead_entropy: Vec::new(),
        lead_particles: Vec::new(),
        lead_energy: Vec::new(),
    };
    for block in model.leads() {
        let r = block.range();
        out.lead_entropy.push(entropy(&c.block_range(r.clone())?)?);
        out.lead_particles.push(r.clone().map(|i| c.matrix()[(i, i)].re).sum());
        let mut e = 0.0;
        for i in r.clone() {
            for j in r.clone() {
                e += h[(i, j)] * c.matrix()[(j, i)].re;
            }
        }
        out.lead_energy.push(e);
    }
    Ok(out)
}

/// Integrate from a product initial state (system covariance `system0`,
/// leads thermal) and account for every entropy and energy flow.
pub fn simulate(model: &ExtendedModel, system0: &Covariance, settings: RunSettings) -> Result<ThermoRecord> {
    simulate_with(model, system0, settings, |_, _| {})
}

/// As [`simulate`], calling `observe(t, C)` at every sample.
pub fn simulate_with(
    model: &ExtendedModel,
    system0: &Covariance,
    settings: RunSettings,
    mut observe: impl FnMut(f64, &Covariance),
) -> Result<ThermoRecord> {
    let steps = validate_dt(settings.dt, settings.t_max)?;
    if settings.sample_every == 0 {
        return Err(Error::invalid("sample_every", "must be at least 1"));
    }
    let dt = settings.dt;
    let drift = Drift::new(model);
    let ops = CurrentOperators::new(model);
    let steady = GaussianForm::new(&steady_state(&drift)?)?;
    let k = model.leads().len();

    let mut c: CMat = initial_covariance(model, system0)?.into_inner();
    let mut step_rates = Vec::with_capacity(steps + 1);
    let mut particle_flow = vec![Vec::with_capacity(steps + 1); k];
    let mut energy_flow = vec![Vec::with_capacity(steps + 1); k];
    let mut sampled: Vec<(usize, Vec<LeadCurrents>, Functionals)> = Vec::new();

    for s in 0..=steps {
        let t = s as f64 * dt;
        let cov = Covariance::new(c)?;
        let form = GaussianForm::new(&cov)?;
        check_physical(&form, PHYSICALITY_TOL, t)?;
        let c_dot = drift.derivative(cov.matrix());
        let currents: Vec<LeadCurrents> = model
            .leads()
            .iter()
            .enumerate()
            .map(|(alpha, block)| {
                let dcdiss = drift.dissipative_part(cov.matrix(), Some(block.range()));
                ops.lead(alpha, cov.matrix(), dcdiss.as_ref())
            })
            .collect();
        let rates = entropy_rates(model, &cov, &form, c_dot.as_ref(), &steady, &currents)?;
        for (alpha, cur) in currents.iter().enumerate() {
            particle_flow[alpha].push(cur.particle_ext - cur.particle_int);
            energy_flow[alpha].push(cur.energy_ext - cur.energy_int);
        }
        step_rates.push(rates);
        if s % settings.sample_every == 0 || s == steps {
            observe(t, &cov);
            sampled.push((s, currents, functionals(model, &cov, &form)?));
        }
        c = if s < steps { rk4_step(&drift, cov.matrix(), dt) } else { cov.into_inner() };
    }

    let sigma_int = cumulative_gregory(&step_rates.iter().map(|r| r.internal).collect::<Vec<_>>(), dt);
    let sigma_ext = cumulative_gregory(&step_rates.iter().map(|r| r.external).collect::<Vec<_>>(), dt);
    let particles_in: Vec<Vec<f64>> = particle_flow.iter().map(|f| cumulative_gregory(f, dt)).collect();
    let energy_in: Vec<Vec<f64>> = energy_flow.iter().map(|f| cumulative_gregory(f, dt)).collect();

    let first = &sampled[0].2;
    let corr0 = first.system_entropy + first.lead_entropy.iter().sum::<f64>() - first.total_entropy;
    let mut samples = Vec::with_capacity(sampled.len());
    for (s, currents, f) in &sampled {
        let s = *s;
        let mut leads = Vec::with_capacity(k);
        let mut free_total = 0.0;
        for (alpha, block) in model.leads().iter().enumerate() {
            let lead = &block.lead;
            let dn = f.lead_particles[alpha] - first.lead_particles[alpha];
            let de = f.lead_energy[alpha] - first.lead_energy[alpha];
            let ds = f.lead_entropy[alpha] - first.lead_entropy[alpha];
            let free_energy = lead.beta() * (de - lead.chemical_potential * dn) - ds;
            free_total += free_energy;
            leads.push(LeadSample {
                currents: currents[alpha],
                entropy: f.lead_entropy[alpha],
                free_energy,
                delta_particles: dn,
                delta_energy: de,
                particle_residual: particles_in[alpha][s] - dn,
                energy_residual: energy_in[alpha][s] - de,
            });
        }
        let correlations = f.system_entropy + f.lead_entropy.iter().sum::<f64>() - f.total_entropy - corr0;
        let lhs = sigma_int[s] - sigma_ext[s];
        let rhs = free_total + correlations;
        samples.push(ThermoSample {
            t: s as f64 * dt,
            leads,
            system_entropy: f.system_entropy,
            total_entropy: f.total_entropy,
            rates: step_rates[s],
            cumulative_internal: sigma_int[s],
            cumulative_external: sigma_ext[s],
            correlations,
            budget: Budget { lhs, rhs, residual: lhs - rhs },
        });
    }
    Ok(ThermoRecord { settings, samples, step_rates })
}

/// Budget at one sample of a single-lead run.
pub fn budget_single(sample: &ThermoSample) -> Result<Budget> {
    if sample.leads.len() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: sample.leads.len() });
    }
    Ok(sample.budget)
}

/// Budget at one sample of a run with any number of leads.
pub fn budget_multi(sample: &ThermoSample) -> Budget {
    sample.budget
}

/// Worst `(particle, energy)` lead-balance residual per lead over the record.
pub fn lead_balance_residuals(record: &ThermoRecord) -> Vec<(f64, f64)> {
    let k = record.samples.first().map_or(0, |s| s.leads.len());
    (0..k)
        .map(|alpha| {
            record.samples.iter().fold((0.0f64, 0.0f64), |(p, e), s| {
                let l = &s.leads[alpha];
                (p.max(l.particle_residual.abs()), e.max(l.energy_residual.abs()))
            })
        })
        .collect()
}
