use faer::{c64, Mat, MatRef};

use crate::error::{Error, Result};
use crate::gaussian::GaussianForm;
use crate::linalg::{hermitize_in_place, trace, trace_product, CMat, HermitianEigen};

pub const MAX_FOCK_MODES: usize = 6;

/// Jordan-Wigner Fock space; bit `i` of a basis index is the occupation of
/// mode `i`, and `|b> = prod_{i ascending} (d_i^dag)^{b_i} |0>`.
#[derive(Clone, Debug)]
pub struct FockSpace {
    modes: usize,
    annihilators: Vec<CMat>,
}

impl FockSpace {
    pub fn new(modes: usize) -> Result<Self> {
        if modes > MAX_FOCK_MODES {
            return Err(Error::TooManyModes { what: "Fock oracle", modes, max: MAX_FOCK_MODES });
        }
        let dim = 1usize << modes;
        let annihilators = (0..modes)
            .map(|i| {
                let mut a = CMat::zeros(dim, dim);
                for b in 0..dim {
                    if b >> i & 1 == 1 {
                        let parity = (b & ((1 << i) - 1)).count_ones();
                        let sign = if parity % 2 == 0 { 1.0 } else { -1.0 };
                        a[(b ^ (1 << i), b)] = c64::new(sign, 0.0);
                    }
                }
                a
            })
            .collect();
        Ok(Self { modes, annihilators })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        1 << self.modes
    }

    pub fn annihilator(&self, i: usize) -> MatRef<'_, c64> {
        self.annihilators[i].as_ref()
    }

    pub fn creator(&self, i: usize) -> CMat {
        self.annihilators[i].adjoint().to_owned()
    }

    /// `sum_ij A_ij d_i^dag d_j`.
    pub fn quadratic(&self, a: MatRef<'_, c64>) -> CMat {
        let dim = self.dim();
        let mut out = CMat::zeros(dim, dim);
        for i in 0..self.modes {
            for j in 0..self.modes {
                let coeff = a[(i, j)];
                if coeff == c64::new(0.0, 0.0) {
                    continue;
                }
                let op = self.annihilators[i].adjoint() * self.annihilators[j].as_ref();
                out += Mat::from_fn(dim, dim, |r, c| op[(r, c)] * coeff);
            }
        }
        out
    }

    pub fn quadratic_real(&self, a: MatRef<'_, f64>) -> CMat {
        self.quadratic(crate::linalg::real_to_complex(a).as_ref())
    }

    /// `rho = exp(-sum M_ij d_i^dag d_j) / Z`.
    pub fn gaussian_state(&self, form: &GaussianForm) -> Result<DensityOperator> {
        let k = self.quadratic(form.m());
        let eig = HermitianEigen::new(k.as_ref())?;
        let shift = eig.values[0];
        let rho = eig.map(|e| (-(e - shift)).exp());
        DensityOperator::normalized(rho)
    }

    /// `C_ij = Tr[rho d_j^dag d_i]`, applying the operators bit by bit.
    pub fn covariance(&self, rho: &DensityOperator) -> CMat {
        let n = self.modes;
        let sign = |b: usize, i: usize| if (b & ((1 << i) - 1)).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
        let mut c = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                let mut acc = c64::new(0.0, 0.0);
                for b in (0..self.dim()).filter(|b| b >> i & 1 == 1) {
                    let b1 = b ^ (1 << i);
                    if b1 >> j & 1 == 1 {
                        continue;
                    }
                    let b2 = b1 | (1 << j);
                    acc += rho.0[(b, b2)] * (sign(b, i) * sign(b1, j));
                }
                c[(i, j)] = acc;
            }
        }
        c
    }

    /// Reduced state on `keep` (in that order), tracing out everything else.
    pub fn partial_trace(&self, rho: &DensityOperator, keep: &[usize]) -> Result<DensityOperator> {
        let n = self.modes;
        let mut order: Vec<usize> = keep.to_vec();
        let mut seen = vec![false; n];
        for &i in keep {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, dim: n });
            }
            if std::mem::replace(&mut seen[i], true) {
                return Err(Error::DuplicateIndex(i));
            }
        }
        order.extend((0..n).filter(|&i| !seen[i]));
        let mut position = vec![0; n];
        for (p, &i) in order.iter().enumerate() {
            position[i] = p;
        }
        // fermionic reorder: |b> -> sign |b'>
        let dim = self.dim();
        let mut target = vec![0usize; dim];
        let mut sign = vec![1.0f64; dim];
        for b in 0..dim {
            let occupied: Vec<usize> = (0..n).filter(|&i| b >> i & 1 == 1).collect();
            let mut inversions = 0;
            for x in 0..occupied.len() {
                for y in x + 1..occupied.len() {
                    if position[occupied[x]] > position[occupied[y]] {
                        inversions += 1;
                    }
                }
            }
            sign[b] = if inversions % 2 == 0 { 1.0 } else { -1.0 };
            target[b] = occupied.iter().map(|&i| 1 << position[i]).sum();
        }
        let mut permuted = CMat::zeros(dim, dim);
        for b2 in 0..dim {
            for b1 in 0..dim {
                permuted[(target[b1], target[b2])] = rho.0[(b1, b2)] * (sign[b1] * sign[b2]);
            }
        }
        let kept = 1usize << keep.len();
        let rest = dim / kept;
        let reduced = Mat::from_fn(kept, kept, |a1, a2| {
            (0..rest).map(|r| permuted[(a1 + r * kept, a2 + r * kept)]).sum()
        });
        DensityOperator::new(reduced)
    }
}

/// Dense many-body density matrix.
#[derive(Clone, Debug)]
pub struct DensityOperator(CMat);

impl DensityOperator {
    pub fn new(mut m: CMat) -> Result<Self> {
        crate::linalg::ensure_square(m.as_ref())?;
        hermitize_in_place(&mut m);
        Ok(Self(m))
    }

    pub fn normalized(m: CMat) -> Result<Self> {
        let tr = trace(m.as_ref()).re;
        let n = m.nrows();
        Self::new(Mat::from_fn(n, n, |i, j| m[(i, j)] / tr))
    }

    /// Fock basis state with the given occupation bitmask.
    pub fn basis(dim: usize, index: usize) -> Self {
        let mut m = CMat::zeros(dim, dim);
        m[(index, index)] = c64::new(1.0, 0.0);
        Self(m)
    }

    pub fn matrix(&self) -> MatRef<'_, c64> {
        self.0.as_ref()
    }

    pub fn expectation(&self, op: MatRef<'_, c64>) -> c64 {
        trace_product(self.matrix(), op)
    }

    pub fn entropy(&self) -> Result<f64> {
        let eig = HermitianEigen::new(self.matrix())?;
        Ok(eig.values.iter().filter(|&&p| p > 0.0).map(|&p| -p * p.ln()).sum())
    }

    /// `Tr[rho (ln rho - ln sigma)]`.
    pub fn relative_entropy(&self, other: &DensityOperator) -> Result<f64> {
        let ln = |m: MatRef<'_, c64>| -> Result<CMat> {
            Ok(HermitianEigen::new(m)?.map(|p| p.max(1e-300).ln()))
        };
        let diff = ln(self.matrix())? - ln(other.matrix())?;
        Ok(trace_product(self.matrix(), diff.as_ref()).re)
    }

    /// Uhlmann fidelity `Tr sqrt(sqrt(rho) sigma sqrt(rho))`.
    pub fn fidelity(&self, other: &DensityOperator) -> Result<f64> {
        let sqrt = HermitianEigen::new(self.matrix())?.map(|p| p.max(0.0).sqrt());
        let mut inner: CMat = sqrt.as_ref() * other.matrix() * sqrt.as_ref();
        hermitize_in_place(&mut inner);
        let eig = crate::linalg::hermitian_eigenvalues(inner.as_ref())?;
        Ok(eig.iter().map(|&x| x.max(0.0).sqrt()).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::Covariance;
    use crate::linalg::max_abs;

    #[test]
    fn canonical_anticommutation() {
        let f = FockSpace::new(3).unwrap();
        let id = Mat::<c64>::identity(8, 8);
        for i in 0..3 {
            for j in 0..3 {
                let ai = f.annihilator(i);
                let aj = f.annihilator(j);
                let anti = ai * aj.adjoint() + aj.adjoint() * ai;
                let expect = if i == j { id.clone() } else { CMat::zeros(8, 8) };
                assert!(max_abs((anti - expect).as_ref()) < 1e-15);
                let aa = ai * aj + aj * ai;
                assert!(max_abs(aa.as_ref()) < 1e-15);
            }
        }
    }

    #[test]
    fn too_many_modes() {
        assert!(FockSpace::new(7).is_err());
    }

    #[test]
    fn gaussian_state_reproduces_covariance() {
        let mut c = CMat::zeros(3, 3);
        c[(0, 0)] = c64::new(0.3, 0.0);
        c[(1, 1)] = c64::new(0.6, 0.0);
        c[(2, 2)] = c64::new(0.8, 0.0);
        c[(0, 1)] = c64::new(0.1, 0.05);
        c[(1, 0)] = c64::new(0.1, -0.05);
        c[(1, 2)] = c64::new(-0.07, 0.02);
        c[(2, 1)] = c64::new(-0.07, -0.02);
        let cov = Covariance::new(c.clone()).unwrap();
        let f = FockSpace::new(3).unwrap();
        let rho = f.gaussian_state(&GaussianForm::new(&cov).unwrap()).unwrap();
        assert!(max_abs((f.covariance(&rho) - &c).as_ref()) < 1e-12);
        // reduced state matches the covariance block
        let red = f.partial_trace(&rho, &[2, 0]).unwrap();
        let f2 = FockSpace::new(2).unwrap();
        let block = cov.block(&[2, 0]).unwrap();
        assert!(max_abs((f2.covariance(&red) - block.matrix()).as_ref()) < 1e-12);
    }
}
