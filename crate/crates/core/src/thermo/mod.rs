//! Thermodynamic accounting along a covariance trajectory.
//!
//! Sign convention: external currents `I` are positive into the extended
//! system (system plus leads), internal currents `J` positive into the
//! central system.

mod currents;
mod rates;
mod record;

pub use currents::{CurrentOperators, LeadCurrents};
pub use rates::{entropy_rates, per_bath_spohn_terms, EntropyRates};
pub use record::{
    budget_multi, budget_single, lead_balance_residuals, simulate, simulate_with, Budget, LeadSample,
    RunSettings, ThermoRecord, ThermoSample,
};
