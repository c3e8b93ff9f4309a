use faer::{c64, Mat, MatRef};

use crate::lattice::ExtendedModel;

type RealSparse = Vec<(usize, usize, f64)>;

/// External and internal currents of one lead at one instant.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LeadCurrents {
    pub energy_ext: f64,
    pub particle_ext: f64,
    pub heat_ext: f64,
    pub energy_int: f64,
    pub particle_int: f64,
    pub heat_int: f64,
}

#[derive(Clone, Debug)]
struct LeadOperators {
    mu: f64,
    /// `[P_L, H_SL]`
    number_comm: RealSparse,
    /// `[H_L, H_SL]`
    energy_comm: RealSparse,
    coupling: RealSparse,
}

/// Sparse commutators needed for the currents, built once per model.
#[derive(Clone, Debug)]
pub struct CurrentOperators {
    hamiltonian: RealSparse,
    leads: Vec<LeadOperators>,
}

fn embed(dim: usize, entries: impl Iterator<Item = (usize, usize, f64)>) -> Mat<f64> {
    let mut m = Mat::<f64>::zeros(dim, dim);
    for (i, j, v) in entries {
        m[(i, j)] += v;
    }
    m
}

fn sparse(m: MatRef<'_, f64>) -> RealSparse {
    let mut out = Vec::new();
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            if m[(i, j)] != 0.0 {
                out.push((i, j, m[(i, j)]));
            }
        }
    }
    out
}

/// `Tr[X C]` for sparse real `X`.
fn trace_with(x: &RealSparse, c: MatRef<'_, c64>) -> c64 {
    x.iter().map(|&(a, b, v)| c[(b, a)] * v).sum()
}

impl CurrentOperators {
    pub fn new(model: &ExtendedModel) -> Self {
        let d = model.dim();
        let h = model.hamiltonian();
        let leads = model
            .leads()
            .iter()
            .enumerate()
            .map(|(alpha, block)| {
                let r = block.range();
                let coupling: RealSparse = model
                    .coupling_entries(alpha)
                    .into_iter()
                    .flat_map(|(p, i, k)| [(p, i, k), (i, p, k)])
                    .collect();
                let h_sl = embed(d, coupling.iter().copied());
                let h_l = embed(
                    d,
                    r.clone().flat_map(|i| r.clone().map(move |j| (i, j))).map(|(i, j)| (i, j, h[(i, j)])),
                );
                let p = embed(d, r.clone().map(|i| (i, i, 1.0)));
                let number_comm = &p * &h_sl - &h_sl * &p;
                let energy_comm = &h_l * &h_sl - &h_sl * &h_l;
                LeadOperators {
                    mu: block.lead.chemical_potential,
                    number_comm: sparse(number_comm.as_ref()),
                    energy_comm: sparse(energy_comm.as_ref()),
                    coupling,
                }
            })
            .collect();
        Self { hamiltonian: model.hamiltonian_entries().to_vec(), leads }
    }

    pub fn leads(&self) -> usize {
        self.leads.len()
    }

    /// `(I_E, I_P) = (Re Tr[H dC_diss], Re Tr[dC_diss])`.
    pub fn external(&self, dcdiss: MatRef<'_, c64>) -> (f64, f64) {
        let energy = trace_with(&self.hamiltonian, dcdiss).re;
        let particles = (0..dcdiss.nrows()).map(|i| dcdiss[(i, i)].re).sum();
        (energy, particles)
    }

    /// `(J_E, J_P)`: `J_P = Re(i Tr([P_L, H_SL] C))`,
    /// `J_E = Re(i Tr([H_L, H_SL] C) + Tr[H_SL dC_diss])`.
    pub fn internal(&self, alpha: usize, c: MatRef<'_, c64>, dcdiss: MatRef<'_, c64>) -> (f64, f64) {
        let ops = &self.leads[alpha];
        let i = c64::new(0.0, 1.0);
        let particles = (i * trace_with(&ops.number_comm, c)).re;
        let energy = (i * trace_with(&ops.energy_comm, c) + trace_with(&ops.coupling, dcdiss)).re;
        (energy, particles)
    }

    pub fn lead(&self, alpha: usize, c: MatRef<'_, c64>, dcdiss: MatRef<'_, c64>) -> LeadCurrents {
        let mu = self.leads[alpha].mu;
        let (energy_ext, particle_ext) = self.external(dcdiss);
        let (energy_int, particle_int) = self.internal(alpha, c, dcdiss);
        LeadCurrents {
            energy_ext,
            particle_ext,
            heat_ext: energy_ext - mu * particle_ext,
            energy_int,
            particle_int,
            heat_int: energy_int - mu * particle_int,
        }
    }
}
