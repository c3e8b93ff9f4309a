use faer::{c64, MatRef};

use crate::error::{Error, Result};
use crate::linalg::{complex_schur, ensure_square, max_abs, CMat};

/// Operator `X -> W X + X W^H` is treated as singular below this margin.
pub const SINGULARITY_TOL: f64 = 1e-14;

/// Solve `W X + X W^H = F` by Bartels-Stewart on the complex Schur form.
pub fn solve_lyapunov(w: MatRef<'_, c64>, f: MatRef<'_, c64>) -> Result<CMat> {
    let n = ensure_square(w)?;
    if f.nrows() != n || f.ncols() != n {
        return Err(Error::DimensionMismatch { expected: n, found: f.nrows() });
    }
    let schur = complex_schur(w)?;
    let t = schur.triangular.as_ref();
    let q = schur.unitary.as_ref();
    let abscissa = (0..n).map(|i| t[(i, i)].re).fold(f64::INFINITY, f64::min);
    if n > 0 && abscissa < SINGULARITY_TOL {
        return Err(Error::SingularLyapunov { abscissa });
    }
    // T Y + Y T^H = G, G = Q^H F Q
    let g: CMat = q.adjoint() * f * q;
    let mut y = CMat::zeros(n, n);
    let mut rhs = vec![c64::new(0.0, 0.0); n];
    for j in (0..n).rev() {
        for i in 0..n {
            rhs[i] = g[(i, j)];
        }
        for k in j + 1..n {
            let tjk = t[(j, k)].conj();
            if tjk != c64::new(0.0, 0.0) {
                for i in 0..n {
                    rhs[i] -= y[(i, k)] * tjk;
                }
            }
        }
        let shift = t[(j, j)].conj();
        for i in (0..n).rev() {
            let mut acc = rhs[i];
            for l in i + 1..n {
                acc -= t[(i, l)] * y[(l, j)];
            }
            y[(i, j)] = acc / (t[(i, i)] + shift);
        }
    }
    Ok(q * y.as_ref() * q.adjoint())
}

/// `||W X + X W^H - F||_max` together with the scale
/// `max(||F||, ||W|| ||X||)` it should be compared against.
pub fn lyapunov_residual(w: MatRef<'_, c64>, x: MatRef<'_, c64>, f: MatRef<'_, c64>) -> (f64, f64) {
    let r: CMat = w * x + x * w.adjoint() - f;
    let scale = max_abs(f).max(max_abs(w) * max_abs(x));
    (max_abs(r.as_ref()), scale)
}
