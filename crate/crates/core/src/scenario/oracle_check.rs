//! Cross-checks of the Gaussian code paths against brute-force many-body
//! references.

use faer::{c64, Mat};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::ScenarioConfig;
use crate::dynamics::{initial_covariance, rk4_step, validate_dt, Drift};
use crate::error::Result;
use crate::gaussian::{entropy, fidelity, relative_entropy, Covariance, GaussianForm};
use crate::lattice::ExtendedModel;
use crate::linalg::{max_abs, trace_product, CMat, HermitianEigen};
use crate::oracle::{DensityOperator, FockSpace, LindbladOracle};
use crate::thermo::{lead_balance_residuals, simulate, CurrentOperators, RunSettings};

/// One line of the report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.residual <= self.tolerance
    }
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{verdict} {:<40} residual {:.3e}  tolerance {:.1e}", self.name, self.residual, self.tolerance)
    }
}

/// Worst absolute deviations between Gaussian formulas and the Fock oracle.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FunctionalErrors {
    pub covariance: f64,
    pub entropy: f64,
    pub relative_entropy: f64,
    pub fidelity: f64,
    pub reduced: f64,
}

/// Random unitary from the eigenvectors of a random Hermitian matrix.
fn random_unitary(rng: &mut ChaCha8Rng, dim: usize) -> CMat {
    let x = Mat::from_fn(dim, dim, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h = x.as_ref() + x.adjoint();
    HermitianEigen::new(h.as_ref()).expect("small Hermitian eigenproblem").vectors
}

fn with_spectrum(u: &CMat, spectrum: &[f64]) -> Covariance {
    let scaled = Mat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * spectrum[j]);
    Covariance::new(scaled.as_ref() * u.adjoint()).expect("Hermitian by construction")
}

fn random_spectrum(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(0.02..0.98)).collect()
}

/// `samples` random covariances with `1 <= D <= max_modes`. Fidelity is
/// compared on commuting pairs, where the Uhlmann value is the reference.
pub fn gaussian_vs_fock(samples: usize, max_modes: usize, seed: u64) -> Result<FunctionalErrors> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut err = FunctionalErrors::default();
    for s in 0..samples {
        let dim = 1 + s % max_modes;
        let fock = FockSpace::new(dim)?;
        let u = random_unitary(&mut rng, dim);
        let c1 = with_spectrum(&u, &random_spectrum(&mut rng, dim));
        let c2 = with_spectrum(&u, &random_spectrum(&mut rng, dim));
        let v = random_unitary(&mut rng, dim);
        let c3 = with_spectrum(&v, &random_spectrum(&mut rng, dim));
        let rho = |c: &Covariance| -> Result<DensityOperator> { fock.gaussian_state(&GaussianForm::new(c)?) };
        let (r1, r2, r3) = (rho(&c1)?, rho(&c2)?, rho(&c3)?);

        err.covariance = err.covariance.max(max_abs((fock.covariance(&r1) - c1.matrix()).as_ref()));
        err.entropy = err.entropy.max((entropy(&c1)? - r1.entropy()?).abs());
        err.relative_entropy = err.relative_entropy.max((relative_entropy(&c1, &c3)? - r1.relative_entropy(&r3)?).abs());
        err.relative_entropy = err.relative_entropy.max((relative_entropy(&c2, &c1)? - r2.relative_entropy(&r1)?).abs());
        err.fidelity = err.fidelity.max((fidelity(&c1, &c2)? - r1.fidelity(&r2)?).abs());

        let keep: Vec<usize> = (0..dim).filter(|_| rng.random_bool(0.5)).collect();
        if !keep.is_empty() {
            let block = c3.block(&keep)?;
            let reduced = fock.partial_trace(&r3, &keep)?;
            let small = FockSpace::new(keep.len())?;
            err.reduced = err.reduced.max(max_abs((small.covariance(&reduced) - block.matrix()).as_ref()));
            err.reduced = err.reduced.max((entropy(&block)? - reduced.entropy()?).abs());
        }
    }
    Ok(err)
}

/// Worst entrywise gap between RK4 covariances and the exact many-body
/// evolution on the grid `k dt`, `k dt <= t_max`.
pub fn dynamics_vs_lindblad(model: &ExtendedModel, drift: &Drift, system0: &Covariance, dt: f64, t_max: f64) -> Result<f64> {
    let steps = validate_dt(dt, t_max)?;
    let c0 = initial_covariance(model, system0)?;
    let oracle = LindbladOracle::new(model)?;
    let rho0 = oracle.fock().gaussian_state(&GaussianForm::new(&c0)?)?;
    let exact = oracle.covariance_trajectory(&rho0, dt, steps)?;
    let mut c = c0.into_inner();
    let mut worst = max_abs((&c - &exact[0]).as_ref());
    for reference in &exact[1..] {
        c = rk4_step(drift, c.as_ref(), dt);
        worst = worst.max(max_abs((&c - reference).as_ref()));
    }
    Ok(worst)
}

/// Worst gap between Gaussian currents and many-body expectation values at
/// the exact state at time `t`.
pub fn currents_vs_lindblad(model: &ExtendedModel, system0: &Covariance, t: f64) -> Result<f64> {
    let c0 = initial_covariance(model, system0)?;
    let oracle = LindbladOracle::new(model)?;
    let fock = oracle.fock();
    let rho0 = fock.gaussian_state(&GaussianForm::new(&c0)?)?;
    let n = fock.dim();
    let p = oracle.propagator(t);
    let v0 = Mat::from_fn(n * n, 1, |k, _| rho0.matrix()[(k % n, k / n)]);
    let v = p.as_ref() * v0.as_ref();
    let rho = DensityOperator::new(Mat::from_fn(n, n, |r, c| v[(c * n + r, 0)]))?;
    let c = Covariance::new(fock.covariance(&rho))?;

    let drift = Drift::new(model);
    let ops = CurrentOperators::new(model);
    let d = model.dim();
    let h = model.hamiltonian();
    let h_mb = fock.quadratic_real(h);
    let i = c64::new(0.0, 1.0);
    let mut worst = 0.0f64;
    for (alpha, block) in model.leads().iter().enumerate() {
        let r = block.range();
        let dcdiss = drift.dissipative_part(c.matrix(), Some(r.clone()));
        let cur = ops.lead(alpha, c.matrix(), dcdiss.as_ref());

        let diss = oracle.dissipator(rho.matrix(), alpha);
        let number = fock.quadratic(Mat::from_fn(d, d, |a, b| c64::new(if a == b && r.contains(&a) { 1.0 } else { 0.0 }, 0.0)).as_ref());
        let lead_h = fock.quadratic(Mat::from_fn(d, d, |a, b| {
            c64::new(if r.contains(&a) && r.contains(&b) { h[(a, b)] } else { 0.0 }, 0.0)
        }).as_ref());
        let mut coupling = CMat::zeros(d, d);
        for (p_site, k, kappa) in model.coupling_entries(alpha) {
            coupling[(p_site, k)] = c64::new(kappa, 0.0);
            coupling[(k, p_site)] = c64::new(kappa, 0.0);
        }
        let h_sl = fock.quadratic(coupling.as_ref());
        let comm = |a: &CMat, b: &CMat| -> CMat { a.as_ref() * b.as_ref() - b.as_ref() * a.as_ref() };

        let ie = trace_product(h_mb.as_ref(), diss.as_ref()).re;
        let ip = trace_product(number.as_ref(), diss.as_ref()).re;
        let jp = (i * rho.expectation(comm(&number, &h_sl).as_ref())).re;
        let je = (i * rho.expectation(comm(&lead_h, &h_sl).as_ref()) + trace_product(h_sl.as_ref(), diss.as_ref())).re;
        for (gauss, exact) in [(cur.energy_ext, ie), (cur.particle_ext, ip), (cur.particle_int, jp), (cur.energy_int, je)] {
            worst = worst.max((gauss - exact).abs());
        }
    }
    Ok(worst)
}

/// The full self-test. `flip_dissipator` deliberately breaks the Gaussian
/// dynamics to show the comparison has teeth.
pub fn run_oracle_check(cfg: &ScenarioConfig, flip_dissipator: bool) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let f = gaussian_vs_fock(50, 5, 0x5eed)?;
    for (name, residual) in [
        ("covariance of Fock Gaussian state", f.covariance),
        ("entropy", f.entropy),
        ("relative entropy", f.relative_entropy),
        ("fidelity (commuting pairs)", f.fidelity),
        ("reduced block", f.reduced),
    ] {
        checks.push(Check { name: format!("gaussian vs Fock: {name}"), residual, tolerance: 1e-10 });
    }

    let system0 = cfg.system_initial(Some(1));
    for &modes in &cfg.sweep.modes {
        let model = cfg.cell_model(1, modes, cfg.leads[0].temperature)?;
        let mut drift = Drift::new(&model);
        if flip_dissipator {
            drift = drift.with_flipped_dissipator();
        }
        let residual = dynamics_vs_lindblad(&model, &drift, &system0, cfg.dt, cfg.t_max)?;
        checks.push(Check {
            name: format!("dynamics vs Lindblad, L = {modes}, dt = {}", cfg.dt),
            residual,
            tolerance: 1e-8,
        });
    }

    let model = cfg.cell_model(1, 3, cfg.leads[0].temperature)?;
    let residual = currents_vs_lindblad(&model, &Covariance::diagonal(&[0.9]), 0.7)?;
    checks.push(Check { name: "currents vs Lindblad, D = 4".into(), residual, tolerance: 1e-8 });

    let model = cfg.cell_model(1, 4, cfg.leads[0].temperature)?;
    let record = simulate(&model, &system0, RunSettings { dt: cfg.dt, t_max: cfg.t_max, sample_every: 10 })?;
    let (p, e) = lead_balance_residuals(&record)[0];
    checks.push(Check { name: "lead particle balance".into(), residual: p, tolerance: 1e-5 });
    checks.push(Check { name: "lead energy balance".into(), residual: e, tolerance: 1e-5 });
    Ok(checks)
}
