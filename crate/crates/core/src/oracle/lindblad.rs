use faer::{c64, Mat, MatRef};

use super::fock::{DensityOperator, FockSpace};
use crate::error::{Error, Result};
use crate::lattice::ExtendedModel;
use crate::linalg::{expm, CMat};

pub const MAX_LINDBLAD_MODES: usize = 5;

/// Many-body Lindblad equation for an extended model: unitary evolution under
/// the quadratic Hamiltonian plus, for every lead mode, loss
/// `sqrt(gamma (1 - f)) d_k` and gain `sqrt(gamma f) d_k^dag`.
///
/// Superoperators act on column-stacked `vec(rho)`, so `A rho B` becomes
/// `(B^T kron A) vec(rho)`.
#[derive(Clone, Debug)]
pub struct LindbladOracle {
    fock: FockSpace,
    hamiltonian: CMat,
    jumps: Vec<(usize, CMat)>,
    generator: CMat,
}

type Sparse = Vec<(usize, usize, c64)>;

fn nonzeros(a: MatRef<'_, c64>) -> Sparse {
    let mut out = Vec::new();
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if a[(i, j)] != c64::new(0.0, 0.0) {
                out.push((i, j, a[(i, j)]));
            }
        }
    }
    out
}

/// `gen += coeff (B^T kron A)`.
fn add_sandwich(gen: &mut CMat, n: usize, a: &Sparse, b: &Sparse, coeff: c64) {
    for &(r, rp, av) in a {
        for &(cp, c, bv) in b {
            gen[(c * n + r, cp * n + rp)] += coeff * av * bv;
        }
    }
}

fn identity_entries(n: usize) -> Sparse {
    (0..n).map(|i| (i, i, c64::new(1.0, 0.0))).collect()
}

impl LindbladOracle {
    pub fn new(model: &ExtendedModel) -> Result<Self> {
        let d = model.dim();
        if d > MAX_LINDBLAD_MODES {
            return Err(Error::TooManyModes { what: "Lindblad oracle", modes: d, max: MAX_LINDBLAD_MODES });
        }
        let fock = FockSpace::new(d)?;
        let hamiltonian = fock.quadratic_real(model.hamiltonian());
        let mut jumps = Vec::new();
        for (alpha, block) in model.leads().iter().enumerate() {
            for (k, i) in block.range().enumerate() {
                let g = block.lead.damping[k];
                let f = block.lead.occupations[k];
                let loss = (g * (1.0 - f)).sqrt();
                let gain = (g * f).sqrt();
                let a = fock.annihilator(i);
                jumps.push((alpha, Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(r, c)] * loss)));
                jumps.push((alpha, Mat::from_fn(a.nrows(), a.ncols(), |r, c| a[(c, r)].conj() * gain)));
            }
        }
        let n = fock.dim();
        let mut generator = CMat::zeros(n * n, n * n);
        let id = identity_entries(n);
        let h = nonzeros(hamiltonian.as_ref());
        add_sandwich(&mut generator, n, &h, &id, c64::new(0.0, -1.0));
        add_sandwich(&mut generator, n, &id, &h, c64::new(0.0, 1.0));
        for (_, j) in &jumps {
            let jd = j.adjoint().to_owned();
            let jdj = jd.as_ref() * j.as_ref();
            let (js, jds, jdjs) = (nonzeros(j.as_ref()), nonzeros(jd.as_ref()), nonzeros(jdj.as_ref()));
            add_sandwich(&mut generator, n, &js, &jds, c64::new(1.0, 0.0));
            add_sandwich(&mut generator, n, &jdjs, &id, c64::new(-0.5, 0.0));
            add_sandwich(&mut generator, n, &id, &jdjs, c64::new(-0.5, 0.0));
        }
        Ok(Self { fock, hamiltonian, jumps, generator })
    }

    pub fn fock(&self) -> &FockSpace {
        &self.fock
    }

    pub fn hamiltonian(&self) -> MatRef<'_, c64> {
        self.hamiltonian.as_ref()
    }

    pub fn generator(&self) -> MatRef<'_, c64> {
        self.generator.as_ref()
    }

    /// Dissipator of lead `alpha` applied directly to `rho`.
    pub fn dissipator(&self, rho: MatRef<'_, c64>, alpha: usize) -> CMat {
        let n = rho.nrows();
        let mut out = CMat::zeros(n, n);
        for (_, j) in self.jumps.iter().filter(|(a, _)| *a == alpha) {
            let jdj = j.adjoint() * j.as_ref();
            out += j.as_ref() * rho * j.adjoint();
            out -= Mat::from_fn(n, n, |r, c| {
                let left = (jdj.as_ref() * rho)[(r, c)];
                let right = (rho * jdj.as_ref())[(r, c)];
                (left + right) * 0.5
            });
        }
        out
    }

    /// Full right-hand side `L[rho]` without the superoperator.
    pub fn apply(&self, rho: MatRef<'_, c64>) -> CMat {
        let h = self.hamiltonian.as_ref();
        let comm = h * rho - rho * h;
        let n = rho.nrows();
        let mut out = Mat::from_fn(n, n, |r, c| comm[(r, c)] * c64::new(0.0, -1.0));
        let leads = self.jumps.iter().map(|(a, _)| *a).max().map_or(0, |m| m + 1);
        for alpha in 0..leads {
            out += self.dissipator(rho, alpha);
        }
        out
    }

    pub fn propagator(&self, dt: f64) -> CMat {
        let g = self.generator.as_ref();
        expm(Mat::from_fn(g.nrows(), g.ncols(), |i, j| g[(i, j)] * dt).as_ref())
    }

    /// Exact evolution on the grid `t = k dt`, `k = 0..=steps`; returns the
    /// single-particle covariance at each grid point.
    pub fn covariance_trajectory(&self, rho0: &DensityOperator, dt: f64, steps: usize) -> Result<Vec<CMat>> {
        let n = self.fock.dim();
        let p = self.propagator(dt);
        let mut v = Mat::from_fn(n * n, 1, |k, _| rho0.matrix()[(k % n, k / n)]);
        let mut out = Vec::with_capacity(steps + 1);
        for step in 0..=steps {
            let rho = DensityOperator::new(Mat::from_fn(n, n, |r, c| v[(c * n + r, 0)]))?;
            out.push(self.fock.covariance(&rho));
            if step < steps {
                v = p.as_ref() * v.as_ref();
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{discretize, LeadSpec, SystemSpec};
    use crate::linalg::{max_abs, trace};

    fn model(modes: usize) -> ExtendedModel {
        let sys = SystemSpec::uniform(1, 1.0, 1.0).unwrap();
        let lead = LeadSpec {
            modes,
            half_bandwidth: 10.0,
            coupling: 1.0,
            temperature: 1.0,
            chemical_potential: 0.0,
            attachment: 0,
        };
        ExtendedModel::assemble(&sys, &[discretize(&lead).unwrap()]).unwrap()
    }

    #[test]
    fn superoperator_matches_direct_action() {
        let o = LindbladOracle::new(&model(2)).unwrap();
        let n = o.fock().dim();
        let rho = Mat::from_fn(n, n, |i, j| c64::new((i + 2 * j) as f64 * 0.01, (i as f64 - j as f64) * 0.02));
        let direct = o.apply(rho.as_ref());
        let v = Mat::from_fn(n * n, 1, |k, _| rho[(k % n, k / n)]);
        let lv = o.generator() * v.as_ref();
        let back = Mat::from_fn(n, n, |r, c| lv[(c * n + r, 0)]);
        assert!(max_abs((back - direct).as_ref()) < 1e-13);
    }

    #[test]
    fn trace_preserving() {
        let o = LindbladOracle::new(&model(3)).unwrap();
        let n = o.fock().dim();
        let rho = DensityOperator::basis(n, 1);
        let l = o.apply(rho.matrix());
        assert!(trace(l.as_ref()).norm() < 1e-14);
        let p = o.propagator(0.5);
        let v = Mat::from_fn(n * n, 1, |k, _| rho.matrix()[(k % n, k / n)]);
        let out = p.as_ref() * v.as_ref();
        let tr: c64 = (0..n).map(|i| out[(i * n + i, 0)]).sum();
        assert!((tr - c64::new(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn size_limit() {
        assert!(LindbladOracle::new(&model(5)).is_err());
    }
}
