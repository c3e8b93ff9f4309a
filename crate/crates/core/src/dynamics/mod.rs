//! Covariance dynamics `dC/dt = -(W C + C W^H) + F`, `W = iH + gamma/2`.

mod sylvester;

pub use sylvester::{lyapunov_residual, solve_lyapunov};

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::gaussian::{check_physical, Covariance, GaussianForm};
use crate::lattice::ExtendedModel;
use crate::linalg::{hermitize_in_place, CMat};

/// Eigenvalues of `C` may leave `[0, 1]` by this much before a step is
/// rejected as unphysical.
pub const PHYSICALITY_TOL: f64 = 1e-8;

/// Right-hand side of the Lyapunov equation for one extended model.
#[derive(Clone, Debug)]
pub struct Drift {
    entries: Vec<(usize, usize, f64)>,
    damping: Vec<f64>,
    drive: Vec<f64>,
    sign: f64,
}

impl Drift {
    pub fn new(model: &ExtendedModel) -> Self {
        Self {
            entries: model.hamiltonian_entries().to_vec(),
            damping: model.damping().to_vec(),
            drive: model.drive().to_vec(),
            sign: 1.0,
        }
    }

    /// Same Hamiltonian, dissipator with the wrong sign. Only useful to check
    /// that the oracle comparison can actually fail.
    pub fn with_flipped_dissipator(mut self) -> Self {
        self.sign = -self.sign;
        self
    }

    pub fn dim(&self) -> usize {
        self.damping.len()
    }

    pub fn drive(&self) -> &[f64] {
        &self.drive
    }

    /// Dense `W = iH + s gamma / 2`.
    pub fn matrix(&self) -> CMat {
        let n = self.dim();
        let mut w = CMat::zeros(n, n);
        for &(i, j, h) in &self.entries {
            w[(i, j)] = c64::new(0.0, h);
        }
        for i in 0..n {
            w[(i, i)] += c64::new(self.sign * 0.5 * self.damping[i], 0.0);
        }
        w
    }

    fn h_times(&self, c: MatRef<'_, c64>) -> CMat {
        let n = self.dim();
        let mut out = CMat::zeros(n, n);
        for &(i, k, h) in &self.entries {
            for j in 0..n {
                out[(i, j)] += c[(k, j)] * h;
            }
        }
        out
    }

    /// `-i [H, C]`.
    pub fn unitary_part(&self, c: MatRef<'_, c64>) -> CMat {
        let hc = self.h_times(c);
        let n = self.dim();
        Mat::from_fn(n, n, |i, j| {
            let comm = hc[(i, j)] - hc[(j, i)].conj();
            c64::new(comm.im, -comm.re)
        })
    }

    /// `-(gamma C + C gamma) / 2 + F` restricted to the modes in `range`
    /// (all damped modes if `None`).
    pub fn dissipative_part(&self, c: MatRef<'_, c64>, range: Option<std::ops::Range<usize>>) -> CMat {
        let n = self.dim();
        let range = range.unwrap_or(0..n);
        let g = |i: usize| if range.contains(&i) { self.sign * self.damping[i] } else { 0.0 };
        let mut out = CMat::zeros(n, n);
        for j in 0..n {
            let gj = g(j);
            for i in 0..n {
                let gi = g(i);
                if gi != 0.0 || gj != 0.0 {
                    out[(i, j)] = c[(i, j)] * (-0.5 * (gi + gj));
                }
            }
            if range.contains(&j) {
                out[(j, j)] += c64::new(self.sign * self.drive[j], 0.0);
            }
        }
        out
    }

    pub fn derivative(&self, c: MatRef<'_, c64>) -> CMat {
        let n = self.dim();
        let hc = self.h_times(c);
        Mat::from_fn(n, n, |i, j| {
            let comm = hc[(i, j)] - hc[(j, i)].conj();
            let mut v = c64::new(comm.im, -comm.re) - c[(i, j)] * (0.5 * self.sign * (self.damping[i] + self.damping[j]));
            if i == j {
                v += c64::new(self.sign * self.drive[i], 0.0);
            }
            v
        })
    }
}

/// One classical RK4 step, re-Hermitised.
pub fn rk4_step(drift: &Drift, c: MatRef<'_, c64>, dt: f64) -> CMat {
    let n = c.nrows();
    let axpy = |base: MatRef<'_, c64>, k: &CMat, h: f64| Mat::from_fn(n, n, |i, j| base[(i, j)] + k[(i, j)] * h);
    let k1 = drift.derivative(c);
    let k2 = drift.derivative(axpy(c, &k1, 0.5 * dt).as_ref());
    let k3 = drift.derivative(axpy(c, &k2, 0.5 * dt).as_ref());
    let k4 = drift.derivative(axpy(c, &k3, dt).as_ref());
    let mut next = Mat::from_fn(n, n, |i, j| {
        c[(i, j)] + (k1[(i, j)] + (k2[(i, j)] + k3[(i, j)]) * 2.0 + k4[(i, j)]) * (dt / 6.0)
    });
    hermitize_in_place(&mut next);
    next
}

/// RK4 step with a physicality check on the result.
pub fn step(drift: &Drift, c: &Covariance, dt: f64, time: f64) -> Result<Covariance> {
    let next = Covariance::new(rk4_step(drift, c.matrix(), dt))?;
    let form = GaussianForm::new(&next)?;
    check_physical(&form, PHYSICALITY_TOL, time + dt)?;
    Ok(next)
}

pub fn validate_dt(dt: f64, t_max: f64) -> Result<usize> {
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::invalid("dt", "must be positive"));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::invalid("t_max", "must be non-negative"));
    }
    Ok((t_max / dt).round() as usize)
}

/// Product state: system covariance `system` (N x N), leads diagonal in their
/// own Fermi distributions.
pub fn initial_covariance(model: &ExtendedModel, system: &Covariance) -> Result<Covariance> {
    let n = model.system().sites();
    if system.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: system.dim() });
    }
    for lambda in system.spectrum()? {
        if !(-PHYSICALITY_TOL..=1.0 + PHYSICALITY_TOL).contains(&lambda) {
            return Err(Error::invalid("initial system covariance", format!("eigenvalue {lambda} outside [0, 1]")));
        }
    }
    let d = model.dim();
    let mut c = CMat::zeros(d, d);
    for j in 0..n {
        for i in 0..n {
            c[(i, j)] = system.matrix()[(i, j)];
        }
    }
    for block in model.leads() {
        for (k, i) in block.range().enumerate() {
            c[(i, i)] = c64::new(block.lead.occupations[k], 0.0);
        }
    }
    Covariance::new(c)
}

/// Stored trajectory, for small problems and tests.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Covariance>,
}

impl Trajectory {
    /// Integrate to `t_max`, recording every `record_every`-th step (and t = 0).
    /// Each recorded state is checked for physicality.
    pub fn compute(drift: &Drift, c0: &Covariance, dt: f64, t_max: f64, record_every: usize) -> Result<Self> {
        let steps = validate_dt(dt, t_max)?;
        let every = record_every.max(1);
        let mut c = c0.matrix().to_owned();
        let mut times = vec![0.0];
        let mut states = vec![c0.clone()];
        for s in 1..=steps {
            c = rk4_step(drift, c.as_ref(), dt);
            if s % every == 0 || s == steps {
                let t = s as f64 * dt;
                let cov = Covariance::new(c.clone())?;
                check_physical(&GaussianForm::new(&cov)?, PHYSICALITY_TOL, t)?;
                times.push(t);
                states.push(cov);
            }
        }
        Ok(Self { times, states })
    }
}

/// Unique solution of `W C + C W^H = F`.
pub fn steady_state(drift: &Drift) -> Result<Covariance> {
    let n = drift.dim();
    let w = drift.matrix();
    let f = Mat::from_fn(n, n, |i, j| if i == j { c64::new(drift.drive[i], 0.0) } else { c64::new(0.0, 0.0) });
    let mut c = solve_lyapunov(w.as_ref(), f.as_ref())?;
    hermitize_in_place(&mut c);
    Covariance::new(c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{discretize, LeadSpec, SystemSpec};
    use crate::linalg::max_abs;
    use proptest::prelude::*;

    pub(crate) fn small_model(sites: usize, modes: usize, temperature: f64) -> ExtendedModel {
        let sys = SystemSpec::uniform(sites, 1.0, 1.0).unwrap();
        let lead = LeadSpec {
            modes,
            half_bandwidth: 10.0,
            coupling: 1.0,
            temperature,
            chemical_potential: 0.0,
            attachment: 0,
        };
        ExtendedModel::assemble(&sys, &[discretize(&lead).unwrap()]).unwrap()
    }

    #[test]
    fn derivative_splits_into_parts() {
        let m = small_model(2, 3, 1.0);
        let d = Drift::new(&m);
        let c0 = initial_covariance(&m, &Covariance::diagonal(&[0.5, 0.2])).unwrap();
        let c = rk4_step(&d, c0.matrix(), 0.3);
        let total = d.derivative(c.as_ref());
        let parts = d.unitary_part(c.as_ref()) + d.dissipative_part(c.as_ref(), None);
        assert!(max_abs((total - &parts).as_ref()) < 1e-14);
        // and agrees with the dense W form
        let w = d.matrix();
        let n = m.dim();
        let f = Mat::from_fn(n, n, |i, j| if i == j { c64::new(m.drive()[i], 0.0) } else { c64::new(0.0, 0.0) });
        let dense = f - (w.as_ref() * c.as_ref() + c.as_ref() * w.adjoint());
        assert!(max_abs((dense - parts).as_ref()) < 1e-13);
    }

    #[test]
    fn steady_state_is_fixed_point() {
        let m = small_model(2, 6, 0.7);
        let d = Drift::new(&m);
        let css = steady_state(&d).unwrap();
        assert!(max_abs(d.derivative(css.matrix()).as_ref()) < 1e-13);
    }

    #[test]
    fn undamped_system_has_no_unique_steady_state() {
        let sys = SystemSpec::uniform(1, 0.0, 1.0).unwrap();
        let lead = LeadSpec {
            modes: 2,
            half_bandwidth: 1.0,
            coupling: 0.0,
            temperature: 1.0,
            chemical_potential: 0.0,
            attachment: 0,
        };
        let m = ExtendedModel::assemble(&sys, &[discretize(&lead).unwrap()]).unwrap();
        assert!(matches!(steady_state(&Drift::new(&m)), Err(Error::SingularLyapunov { .. })));
    }

    #[test]
    fn unphysical_state_is_flagged() {
        let m = small_model(1, 2, 1.0);
        let d = Drift::new(&m).with_flipped_dissipator();
        let c0 = initial_covariance(&m, &Covariance::diagonal(&[1.0])).unwrap();
        let err = Trajectory::compute(&d, &c0, 0.01, 20.0, 10).unwrap_err();
        assert!(matches!(err, Error::Unphysical { .. }));
    }

    #[test]
    fn bad_dt_rejected() {
        assert!(validate_dt(0.0, 1.0).is_err());
        assert!(validate_dt(0.1, -1.0).is_err());
        assert_eq!(validate_dt(0.01, 10.0).unwrap(), 1000);
    }

    proptest! {
        // The flow is affine: C(t) - Css evolves linearly, so an RK4 step of a
        // mixture is the mixture of steps.
        #[test]
        fn rk4_is_affine(a in 0.0f64..1.0, b in 0.0f64..1.0, s in 0.0f64..1.0) {
            let m = small_model(2, 3, 2.0);
            let d = Drift::new(&m);
            let ca = initial_covariance(&m, &Covariance::diagonal(&[a, 1.0 - a])).unwrap();
            let cb = initial_covariance(&m, &Covariance::diagonal(&[b, b * 0.5])).unwrap();
            let mix = Mat::from_fn(m.dim(), m.dim(), |i, j| ca.matrix()[(i, j)] * s + cb.matrix()[(i, j)] * (1.0 - s));
            let lhs = rk4_step(&d, mix.as_ref(), 0.05);
            let sa = rk4_step(&d, ca.matrix(), 0.05);
            let sb = rk4_step(&d, cb.matrix(), 0.05);
            let rhs = Mat::from_fn(m.dim(), m.dim(), |i, j| sa[(i, j)] * s + sb[(i, j)] * (1.0 - s));
            prop_assert!(max_abs((lhs - rhs).as_ref()) < 1e-14);
        }
    }
}
