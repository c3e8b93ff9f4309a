//! Gaussian (quasi-free) state functionals of a covariance matrix.
//!
//! A Gaussian state `rho = exp(-sum M_ij d_i^dag d_j) / Z` is fixed by its
//! covariance `C_ij = <d_j^dag d_i>` through `C = (1 + exp(M))^{-1}`, so
//! `M = log((1 - C) / C)` evaluated on the spectrum of `C`.

use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{
    ensure_finite, ensure_square, hermitian_eigenvalues, hermiticity_defect, hermitize_in_place,
    trace_product, CMat, HermitianEigen,
};

/// Eigenvalues of `C` are clamped to `[DELTA, 1 - DELTA]` before taking logs.
pub const SPECTRUM_CLAMP: f64 = 1e-12;

/// Largest anti-Hermitian part tolerated on input.
pub const HERMITICITY_TOL: f64 = 1e-8;

/// A single-particle covariance: Hermitian, finite, square.
///
/// Physicality (`0 <= C <= 1`) is checked separately because integrators
/// routinely overshoot by rounding.
#[derive(Clone, Debug)]
pub struct Covariance(CMat);

impl Covariance {
    /// Accepts matrices within [`HERMITICITY_TOL`] of Hermitian and stores the
    /// Hermitian part.
    pub fn new(mut matrix: CMat) -> Result<Self> {
        ensure_square(matrix.as_ref())?;
        ensure_finite(matrix.as_ref(), "covariance")?;
        let defect = hermiticity_defect(matrix.as_ref());
        if defect > HERMITICITY_TOL {
            return Err(Error::NotHermitian { defect });
        }
        hermitize_in_place(&mut matrix);
        Ok(Self(matrix))
    }

    pub fn from_real(matrix: MatRef<'_, f64>) -> Result<Self> {
        Self::new(crate::linalg::real_to_complex(matrix))
    }

    pub fn diagonal(occupations: &[f64]) -> Self {
        let n = occupations.len();
        let mut m = CMat::zeros(n, n);
        for (i, &f) in occupations.iter().enumerate() {
            m[(i, i)] = c64::new(f, 0.0);
        }
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.0.as_ref()
    }

    pub fn into_inner(self) -> CMat {
        self.0
    }

    pub fn spectrum(&self) -> Result<Vec<f64>> {
        hermitian_eigenvalues(self.matrix())
    }

    /// Principal sub-block on `indices`, in the order given.
    pub fn block(&self, indices: &[usize]) -> Result<Covariance> {
        let n = self.dim();
        let mut seen = vec![false; n];
        for &i in indices {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        let k = indices.len();
        Ok(Self(Mat::from_fn(k, k, |a, b| self.0[(indices[a], indices[b])])))
    }

    pub fn block_range(&self, range: std::ops::Range<usize>) -> Result<Covariance> {
        let idx: Vec<usize> = range.collect();
        self.block(&idx)
    }
}

/// `M`, `log Z` and the spectral data they were built from.
#[derive(Clone, Debug)]
pub struct GaussianForm {
    eigen: HermitianEigen,
    clamped: Vec<f64>,
    m: CMat,
    log_z: f64,
}

impl GaussianForm {
    pub fn new(c: &Covariance) -> Result<Self> {
        let eigen = HermitianEigen::new(c.matrix())?;
        Ok(Self::from_eigen(eigen))
    }

    pub fn from_eigen(eigen: HermitianEigen) -> Self {
        let clamped: Vec<f64> =
            eigen.values.iter().map(|&l| l.clamp(SPECTRUM_CLAMP, 1.0 - SPECTRUM_CLAMP)).collect();
        let w: Vec<f64> = clamped.iter().map(|&l| ((1.0 - l) / l).ln()).collect();
        let m = eigen.with_weights(&w);
        let log_z = -clamped.iter().map(|&l| (-l).ln_1p()).sum::<f64>();
        Self { eigen, clamped, m, log_z }
    }

    pub fn m(&self) -> MatRef<'_, c64> {
        self.m.as_ref()
    }

    pub fn log_partition(&self) -> f64 {
        self.log_z
    }

    /// Raw (unclamped) eigenvalues of `C`, ascending.
    pub fn occupations(&self) -> &[f64] {
        &self.eigen.values
    }

    pub fn clamped_occupations(&self) -> &[f64] {
        &self.clamped
    }

    pub fn eigenvectors(&self) -> MatRef<'_, c64> {
        self.eigen.vectors.as_ref()
    }

    /// von Neumann entropy `sum h(lambda)` on the raw spectrum clipped to `[0, 1]`.
    pub fn entropy(&self) -> f64 {
        self.eigen.values.iter().map(|&l| binary_entropy(l.clamp(0.0, 1.0))).sum()
    }

    /// True if any eigenvalue sits within `10 DELTA` of 0 or 1, where `M` is
    /// dominated by the clamp.
    pub fn near_pure(&self) -> bool {
        let margin = 10.0 * SPECTRUM_CLAMP;
        self.eigen.values.iter().any(|&l| l < margin || l > 1.0 - margin)
    }

    pub fn min_occupation(&self) -> f64 {
        self.eigen.values.first().copied().unwrap_or(0.0)
    }

    pub fn max_occupation(&self) -> f64 {
        self.eigen.values.last().copied().unwrap_or(0.0)
    }
}

/// `-p ln p - (1 - p) ln(1 - p)`, zero at the endpoints.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x > 0.0 { -x * x.ln() } else { 0.0 };
    term(p) + term(1.0 - p)
}

pub fn entropy(c: &Covariance) -> Result<f64> {
    let eig = c.spectrum()?;
    Ok(eig.into_iter().map(|l| binary_entropy(l.clamp(0.0, 1.0))).sum())
}

fn check_pair(a: &Covariance, b: &Covariance) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    Ok(())
}

/// `D(C1 || C2) = log Z2 - log Z1 + Tr[(M2 - M1) C1]`.
pub fn relative_entropy(c1: &Covariance, c2: &Covariance) -> Result<f64> {
    check_pair(c1, c2)?;
    let f1 = GaussianForm::new(c1)?;
    let f2 = GaussianForm::new(c2)?;
    Ok(relative_entropy_with(&f1, c1, &f2))
}

/// Relative entropy from precomputed forms; `c1` must be the state of `f1`.
pub fn relative_entropy_with(f1: &GaussianForm, c1: &Covariance, f2: &GaussianForm) -> f64 {
    let dm = f2.m() - f1.m();
    f2.log_partition() - f1.log_partition() + trace_product(dm.as_ref(), c1.matrix()).re
}

/// Uhlmann fidelity `F = Tr sqrt(sqrt(rho1) rho2 sqrt(rho1))` of two Gaussian states.
///
/// Evaluated as `det(1 + exp(-M1/2) exp(-M2/2)) / sqrt(Z1 Z2)` through the
/// similar Hermitian matrix `A^{1/2} B A^{1/2}` (`A = exp(-M1/2)`,
/// `B = exp(-M2/2)`), whose eigenvalues are real and non-negative. Exact for
/// commuting states.
pub fn fidelity(c1: &Covariance, c2: &Covariance) -> Result<f64> {
    check_pair(c1, c2)?;
    let f1 = GaussianForm::new(c1)?;
    let f2 = GaussianForm::new(c2)?;
    fidelity_with(&f1, &f2)
}

pub fn fidelity_with(f1: &GaussianForm, f2: &GaussianForm) -> Result<f64> {
    Ok(log_fidelity_with(f1, f2)?.exp())
}

/// `ln F`; `1 - F = -expm1(ln F)` keeps small infidelities accurate.
pub fn log_fidelity_with(f1: &GaussianForm, f2: &GaussianForm) -> Result<f64> {
    let ratio = |l: f64| l / (1.0 - l);
    let w1: Vec<f64> = f1.clamped.iter().map(|&l| ratio(l).sqrt().sqrt()).collect();
    let w2: Vec<f64> = f2.clamped.iter().map(|&l| ratio(l).sqrt()).collect();
    let a_half = f1.eigen.with_weights(&w1);
    let b = f2.eigen.with_weights(&w2);
    let mut x: CMat = a_half.as_ref() * b.as_ref() * a_half.as_ref();
    hermitize_in_place(&mut x);
    let mu = hermitian_eigenvalues(x.as_ref())?;
    let log_det: f64 = mu.iter().map(|&m| m.max(0.0).ln_1p()).sum();
    Ok(log_det - 0.5 * (f1.log_partition() + f2.log_partition()))
}

/// Thermal covariance `(1 + exp(beta (H - mu)))^{-1}`; `temperature = inf`
/// gives `1/2`.
pub fn thermal_covariance(h: MatRef<'_, f64>, temperature: f64, chemical_potential: f64) -> Result<Covariance> {
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::invalid("temperature", "must be positive"));
    }
    let n = h.nrows();
    if temperature.is_infinite() {
        return Ok(Covariance::diagonal(&vec![0.5; n]));
    }
    let eig = HermitianEigen::new(crate::linalg::real_to_complex(h).as_ref())?;
    let c = eig.map(|e| crate::lattice::fermi(e, temperature, chemical_potential));
    Covariance::new(c)
}

/// Check `lambda_min >= -tol` and `lambda_max <= 1 + tol`.
pub fn check_physical(form: &GaussianForm, tol: f64, time: f64) -> Result<()> {
    let lo = form.min_occupation();
    let hi = form.max_occupation();
    if lo < -tol {
        return Err(Error::Unphysical { time, eigenvalue: lo });
    }
    if hi > 1.0 + tol {
        return Err(Error::Unphysical { time, eigenvalue: hi });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_abs;
    use proptest::prelude::*;

    fn random_covariance(values: &[f64], phases: &[f64]) -> Covariance {
        // rotate a diagonal spectrum by a product of Givens rotations
        let n = values.len();
        let mut u = Mat::<c64>::identity(n, n);
        let mut p = phases.iter().cycle();
        for i in 0..n {
            for j in i + 1..n {
                let th = *p.next().unwrap();
                let ph = *p.next().unwrap();
                let (c, s) = (th.cos(), c64::from_polar(th.sin(), ph));
                for r in 0..n {
                    let (a, b) = (u[(r, i)], u[(r, j)]);
                    u[(r, i)] = a * c - b * s.conj();
                    u[(r, j)] = a * s + b * c;
                }
            }
        }
        let d = Mat::from_fn(n, n, |i, j| if i == j { c64::new(values[i], 0.0) } else { c64::new(0.0, 0.0) });
        Covariance::new(u.as_ref() * d.as_ref() * u.adjoint()).unwrap()
    }

    #[test]
    fn pure_states_have_zero_entropy() {
        assert_eq!(entropy(&Covariance::diagonal(&[0.0, 1.0])).unwrap(), 0.0);
        let half = entropy(&Covariance::diagonal(&[0.5])).unwrap();
        assert!((half - 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn thermal_single_mode() {
        let h = Mat::from_fn(1, 1, |_, _| 1.0);
        let c = thermal_covariance(h.as_ref(), 1.0, 0.0).unwrap();
        assert!((c.matrix()[(0, 0)].re - 1.0 / (1.0 + 1f64.exp())).abs() < 1e-15);
        let inf = thermal_covariance(h.as_ref(), f64::INFINITY, 0.0).unwrap();
        assert_eq!(inf.matrix()[(0, 0)].re, 0.5);
    }

    #[test]
    fn block_rejects_bad_indices() {
        let c = Covariance::diagonal(&[0.1, 0.2, 0.3]);
        assert!(matches!(c.block(&[0, 3]), Err(Error::IndexOutOfRange { .. })));
        assert!(matches!(c.block(&[1, 1]), Err(Error::DuplicateIndex(1))));
        let b = c.block(&[2, 0]).unwrap();
        assert_eq!(b.matrix()[(0, 0)].re, 0.3);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMat::zeros(2, 2);
        m[(0, 1)] = c64::new(1e-3, 0.0);
        assert!(matches!(Covariance::new(m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn form_round_trip_reproduces_covariance() {
        let c = random_covariance(&[0.05, 0.4, 0.77, 0.99], &[0.3, 1.1, -0.4, 2.0, 0.9]);
        let f = GaussianForm::new(&c).unwrap();
        // C = (1 + e^M)^{-1} in the same eigenbasis
        let back = HermitianEigen::new(f.m()).unwrap().map(|m| 1.0 / (1.0 + m.exp()));
        assert!(max_abs((back - c.matrix()).as_ref()) < 1e-12);
    }

    proptest! {
        #[test]
        fn relative_entropy_nonnegative(
            a in prop::collection::vec(0.01f64..0.99, 3),
            b in prop::collection::vec(0.01f64..0.99, 3),
            ph in prop::collection::vec(-3.0f64..3.0, 6),
        ) {
            let c1 = random_covariance(&a, &ph);
            let c2 = random_covariance(&b, &ph[1..]);
            let d = relative_entropy(&c1, &c2).unwrap();
            prop_assert!(d >= -1e-12);
            prop_assert!(relative_entropy(&c1, &c1).unwrap().abs() < 1e-11);
            let f = fidelity(&c1, &c2).unwrap();
            prop_assert!(f > 0.0 && f <= 1.0);
            prop_assert!((fidelity(&c1, &c1).unwrap() - 1.0).abs() < 1e-11);
        }

        #[test]
        fn entropy_is_additive_on_blocks(
            a in prop::collection::vec(0.0f64..1.0, 2),
            b in prop::collection::vec(0.0f64..1.0, 3),
        ) {
            let mut all = a.clone();
            all.extend(&b);
            let joint = entropy(&Covariance::diagonal(&all)).unwrap();
            let sa = entropy(&Covariance::diagonal(&a)).unwrap();
            let sb = entropy(&Covariance::diagonal(&b)).unwrap();
            prop_assert!((joint - sa - sb).abs() < 1e-13);
        }

        #[test]
        fn entropy_matches_partition_identity(v in prop::collection::vec(0.001f64..0.999, 4)) {
            // S = log Z + Tr[M C] away from the clamp
            let c = random_covariance(&v, &[0.2, -1.0, 0.7]);
            let f = GaussianForm::new(&c).unwrap();
            let s = f.log_partition() + trace_product(f.m(), c.matrix()).re;
            prop_assert!((s - f.entropy()).abs() < 1e-11);
        }
    }
}
