use faer::{c64, MatRef};

use super::LeadCurrents;
use crate::dynamics::Drift;
use crate::error::Result;
use crate::gaussian::{Covariance, GaussianForm};
use crate::lattice::ExtendedModel;
use crate::linalg::trace_product;

/// Instantaneous entropy rates.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct EntropyRates {
    /// `dS_S/dt`.
    pub system: f64,
    /// `dS_SL/dt`.
    pub total: f64,
    /// `sigma = dS_S/dt - sum beta J_Q`.
    pub internal: f64,
    /// `sigma~ = dS_SL/dt - sum beta I_Q`.
    pub external: f64,
    /// `Re Tr[(M - M_ss) dC/dt]`, minus the time derivative of `D(rho || rho_ss)`.
    pub spohn: f64,
    /// `M` was built from a clamped spectrum.
    pub near_pure: bool,
}

/// All entropy rates at one instant. `form` must be the form of `c`, and
/// `currents` lists the leads in model order.
pub fn entropy_rates(
    model: &ExtendedModel,
    c: &Covariance,
    form: &GaussianForm,
    c_dot: MatRef<'_, c64>,
    steady: &GaussianForm,
    currents: &[LeadCurrents],
) -> Result<EntropyRates> {
    let n = model.system().sites();
    let system = c.block_range(model.system_range())?;
    let system_form = GaussianForm::new(&system)?;
    let total = trace_product(form.m(), c_dot).re;
    let system_rate = trace_product(system_form.m(), c_dot.submatrix(0, 0, n, n)).re;
    let spohn = total - trace_product(steady.m(), c_dot).re;
    let (mut q_int, mut q_ext) = (0.0, 0.0);
    for (block, cur) in model.leads().iter().zip(currents) {
        let beta = block.lead.beta();
        q_int += beta * cur.heat_int;
        q_ext += beta * cur.heat_ext;
    }
    Ok(EntropyRates {
        system: system_rate,
        total,
        internal: system_rate - q_int,
        external: total - q_ext,
        spohn,
        near_pure: form.near_pure() || system_form.near_pure(),
    })
}

/// Per-lead terms `Re Tr[(M - beta_a (H - mu_a)) (-i[H, C] + dC_diss_a)]`.
///
/// The reference for lead `a` is the thermal state of the whole extended
/// Hamiltonian at `(T_a, mu_a)`, whose `M` is known in closed form. The
/// terms add up to the current-based `sigma~`.
pub fn per_bath_spohn_terms(model: &ExtendedModel, c: &Covariance, form: &GaussianForm, drift: &Drift) -> Vec<f64> {
    let unitary = drift.unitary_part(c.matrix());
    model
        .leads()
        .iter()
        .map(|block| {
            let lead = &block.lead;
            let beta = lead.beta();
            let mut gen = drift.dissipative_part(c.matrix(), Some(block.range()));
            gen += &unitary;
            let m_term = trace_product(form.m(), gen.as_ref()).re;
            let h_term: f64 = model
                .hamiltonian_entries()
                .iter()
                .map(|&(i, j, h)| h * gen[(j, i)].re)
                .sum();
            let n_term: f64 = (0..gen.nrows()).map(|i| gen[(i, i)].re).sum();
            m_term - beta * (h_term - lead.chemical_potential * n_term)
        })
        .collect()
}
