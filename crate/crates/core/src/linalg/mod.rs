//! Dense complex helpers on top of `faer`.

mod schur;

pub use schur::{complex_schur, Schur};

use faer::{c64, Mat, MatRef, Side};

use crate::error::{Error, Result};

pub type CMat = Mat<c64>;

pub fn ensure_square(a: MatRef<'_, c64>) -> Result<usize> {
    if a.nrows() != a.ncols() {
        return Err(Error::NotSquare { rows: a.nrows(), cols: a.ncols() });
    }
    Ok(a.nrows())
}

pub fn ensure_finite(a: MatRef<'_, c64>, what: &'static str) -> Result<()> {
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            let z = a[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(Error::NonFinite(what));
            }
        }
    }
    Ok(())
}

/// `max_ij |A_ij - conj(A_ji)|`.
pub fn hermiticity_defect(a: MatRef<'_, c64>) -> f64 {
    let n = a.nrows();
    let mut worst = 0.0f64;
    for j in 0..n {
        for i in 0..=j {
            worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Replace `A` by `(A + A^H) / 2`.
pub fn hermitize_in_place(a: &mut CMat) {
    let n = a.nrows();
    for j in 0..n {
        let d = a[(j, j)].re;
        a[(j, j)] = c64::new(d, 0.0);
        for i in 0..j {
            let z = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
            a[(i, j)] = z;
            a[(j, i)] = z.conj();
        }
    }
}

pub fn real_to_complex(a: MatRef<'_, f64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| c64::new(a[(i, j)], 0.0))
}

pub fn trace(a: MatRef<'_, c64>) -> c64 {
    (0..a.nrows().min(a.ncols())).map(|i| a[(i, i)]).sum()
}

/// `Tr[A B]` without forming the product.
pub fn trace_product(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> c64 {
    debug_assert_eq!(a.ncols(), b.nrows());
    debug_assert_eq!(a.nrows(), b.ncols());
    let mut acc = c64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

/// Induced 1-norm (max column sum).
pub fn one_norm(a: MatRef<'_, c64>) -> f64 {
    (0..a.ncols())
        .map(|j| (0..a.nrows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral decomposition of a Hermitian matrix, eigenvalues ascending.
#[derive(Clone, Debug)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: CMat,
}

impl HermitianEigen {
    /// Reads only the lower triangle.
    pub fn new(a: MatRef<'_, c64>) -> Result<Self> {
        ensure_square(a)?;
        let evd = a.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NoConvergence)?;
        let s = evd.S().column_vector();
        let values = (0..a.nrows()).map(|i| s[i].re).collect();
        Ok(Self { values, vectors: evd.U().to_owned() })
    }

    /// `V diag(f(lambda)) V^H`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> CMat {
        let w: Vec<f64> = self.values.iter().map(|&x| f(x)).collect();
        self.with_weights(&w)
    }

    pub fn with_weights(&self, w: &[f64]) -> CMat {
        let v = self.vectors.as_ref();
        let scaled = Mat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)] * w[j]);
        scaled.as_ref() * v.adjoint()
    }
}

pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>> {
    ensure_square(a)?;
    a.self_adjoint_eigenvalues(Side::Lower).map_err(|_| Error::NoConvergence)
}

/// Matrix exponential by scaling and squaring of a truncated Taylor series.
pub fn expm(a: MatRef<'_, c64>) -> CMat {
    let n = a.nrows();
    let norm = one_norm(a);
    let mut squarings = 0u32;
    let mut scale = 1.0;
    while norm * scale > 0.5 {
        scale *= 0.5;
        squarings += 1;
    }
    let x = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale);
    let mut result = Mat::<c64>::identity(n, n);
    let mut term = Mat::<c64>::identity(n, n);
    for k in 1..40 {
        term = term.as_ref() * x.as_ref();
        let inv = 1.0 / k as f64;
        for j in 0..n {
            for i in 0..n {
                term[(i, j)] *= inv;
            }
        }
        result += &term;
        if max_abs(term.as_ref()) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = result.as_ref() * result.as_ref();
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn expm_of_diagonal_and_nilpotent() {
        let mut a = CMat::zeros(3, 3);
        a[(0, 0)] = c64::new(2.0, 0.0);
        a[(1, 1)] = c64::new(0.0, 1.5);
        a[(2, 2)] = c64::new(-7.0, 0.0);
        let e = expm(a.as_ref());
        assert!((e[(0, 0)] - c64::new(2f64.exp(), 0.0)).norm() < 1e-13);
        assert!((e[(1, 1)] - c64::new(0.0, 1.5).exp()).norm() < 1e-14);
        assert!((e[(2, 2)].re - (-7f64).exp()).abs() < 1e-15);

        let mut n = CMat::zeros(2, 2);
        n[(0, 1)] = c64::new(3.0, 0.0);
        let e = expm(n.as_ref());
        assert!((e[(0, 1)].re - 3.0).abs() < 1e-14);
        assert!((e[(0, 0)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigen_map_reconstructs() {
        let a = Mat::from_fn(4, 4, |i, j| {
            let re = (i + j) as f64 * 0.3;
            let im = if i == j { 0.0 } else { (i as f64 - j as f64) * 0.2 };
            c64::new(re, im)
        });
        let eig = HermitianEigen::new(a.as_ref()).unwrap();
        let back = eig.map(|x| x);
        assert!(max_abs((back - &a).as_ref()) < 1e-13);
        assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn trace_product_matches_matmul() {
        let a = Mat::from_fn(3, 3, |i, j| c64::new(i as f64 - j as f64, 1.0 + i as f64));
        let b = Mat::from_fn(3, 3, |i, j| c64::new((i * j) as f64, -(j as f64)));
        let direct = trace((a.as_ref() * b.as_ref()).as_ref());
        assert!((trace_product(a.as_ref(), b.as_ref()) - direct).norm() < 1e-12);
    }
}
