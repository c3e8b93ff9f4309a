//! Complex Schur decomposition `A = Q T Q^H`.
//!
//! Householder reduction to Hessenberg form followed by single-shift QR
//! sweeps with Wilkinson shifts. `faer` keeps its own Schur kernel private,
//! and the Lyapunov solver needs the triangular factor itself.

use faer::{c64, Mat, MatRef};

use super::{ensure_finite, ensure_square, CMat};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct Schur {
    /// Unitary `Q`.
    pub unitary: CMat,
    /// Upper-triangular `T`.
    pub triangular: CMat,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<c64> {
        (0..self.triangular.nrows()).map(|i| self.triangular[(i, i)]).collect()
    }
}

pub fn complex_schur(a: MatRef<'_, c64>) -> Result<Schur> {
    let n = ensure_square(a)?;
    ensure_finite(a, "Schur input")?;
    let mut h = a.to_owned();
    let mut q = Mat::<c64>::identity(n, n);
    hessenberg(&mut h, &mut q);
    qr_iterate(&mut h, &mut q)?;
    for j in 0..n {
        for i in j + 1..n {
            h[(i, j)] = c64::new(0.0, 0.0);
        }
    }
    Ok(Schur { unitary: q, triangular: h })
}

fn hessenberg(h: &mut CMat, q: &mut CMat) {
    let n = h.nrows();
    if n < 3 {
        return;
    }
    let mut v = vec![c64::new(0.0, 0.0); n];
    for k in 0..n - 2 {
        let len = n - k - 1;
        let x = &mut v[..len];
        for (r, xr) in x.iter_mut().enumerate() {
            *xr = h[(k + 1 + r, k)];
        }
        let tail: f64 = x[1..].iter().map(|z| z.norm_sqr()).sum();
        if tail == 0.0 {
            continue;
        }
        let alpha = (x[0].norm_sqr() + tail).sqrt();
        let phase = if x[0].norm() == 0.0 { c64::new(1.0, 0.0) } else { x[0] / x[0].norm() };
        // v = x + phase*alpha*e1, reflector I - 2 v v^H / (v^H v)
        x[0] += phase * alpha;
        let vnorm2: f64 = x.iter().map(|z| z.norm_sqr()).sum();
        let tau = 2.0 / vnorm2;

        // left: rows k+1.., all columns from k
        for j in k..n {
            let mut s = c64::new(0.0, 0.0);
            for r in 0..len {
                s += x[r].conj() * h[(k + 1 + r, j)];
            }
            s *= tau;
            for r in 0..len {
                h[(k + 1 + r, j)] -= x[r] * s;
            }
        }
        // right: all rows, columns k+1..
        for mat in [&mut *h, &mut *q] {
            for i in 0..n {
                let mut s = c64::new(0.0, 0.0);
                for r in 0..len {
                    s += mat[(i, k + 1 + r)] * x[r];
                }
                s *= tau;
                for r in 0..len {
                    mat[(i, k + 1 + r)] -= s * x[r].conj();
                }
            }
        }
        for r in 1..len {
            h[(k + 1 + r, k)] = c64::new(0.0, 0.0);
        }
    }
}

/// Rotation `[c, s; -conj(s), c]` taking `(x, y)` to `(r, 0)`.
fn givens(x: c64, y: c64) -> (f64, c64) {
    let ay = y.norm();
    if ay == 0.0 {
        return (1.0, c64::new(0.0, 0.0));
    }
    let ax = x.norm();
    if ax == 0.0 {
        return (0.0, y.conj() / ay);
    }
    let norm = ax.hypot(ay);
    (ax / norm, (x / ax) * y.conj() / norm)
}

fn qr_iterate(h: &mut CMat, q: &mut CMat) -> Result<()> {
    let n = h.nrows();
    if n < 2 {
        return Ok(());
    }
    let eps = f64::EPSILON;
    let scale = (0..n)
        .flat_map(|j| (0..n).map(move |i| (i, j)))
        .map(|(i, j)| h[(i, j)].norm())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let max_iter = 60 * n;
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n - 1;

    while hi > 0 {
        let mut lo = 0;
        for k in (1..=hi).rev() {
            let sub = h[(k, k - 1)].norm();
            let mut diag = h[(k - 1, k - 1)].norm() + h[(k, k)].norm();
            if diag == 0.0 {
                diag = scale;
            }
            if sub <= eps * diag {
                h[(k, k - 1)] = c64::new(0.0, 0.0);
                lo = k;
                break;
            }
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        total += 1;
        since_deflation += 1;
        if total > max_iter {
            return Err(Error::NoConvergence);
        }

        let shift = if since_deflation.is_multiple_of(11) {
            h[(hi, hi)] + c64::new(0.75 * h[(hi, hi - 1)].norm(), 0.0)
        } else {
            let a = h[(hi - 1, hi - 1)];
            let b = h[(hi - 1, hi)];
            let c = h[(hi, hi - 1)];
            let d = h[(hi, hi)];
            let half = (a - d) * 0.5;
            let disc = (half * half + b * c).sqrt();
            let mid = (a + d) * 0.5;
            let (r1, r2) = (mid + disc, mid - disc);
            if (r1 - d).norm() < (r2 - d).norm() { r1 } else { r2 }
        };

        for k in lo..hi {
            let (x, y) = if k == lo {
                (h[(lo, lo)] - shift, h[(lo + 1, lo)])
            } else {
                (h[(k, k - 1)], h[(k + 1, k - 1)])
            };
            let (c, s) = givens(x, y);
            let sc = s.conj();
            let first_col = if k == lo { lo } else { k - 1 };
            for j in first_col..n {
                let (h1, h2) = (h[(k, j)], h[(k + 1, j)]);
                h[(k, j)] = h1 * c + s * h2;
                h[(k + 1, j)] = -sc * h1 + h2 * c;
            }
            let last_row = (k + 2).min(hi);
            for i in 0..=last_row {
                let (h1, h2) = (h[(i, k)], h[(i, k + 1)]);
                h[(i, k)] = h1 * c + sc * h2;
                h[(i, k + 1)] = -s * h1 + h2 * c;
            }
            for i in 0..n {
                let (q1, q2) = (q[(i, k)], q[(i, k + 1)]);
                q[(i, k)] = q1 * c + sc * q2;
                q[(i, k + 1)] = -s * q1 + q2 * c;
            }
            if k > lo {
                h[(k + 1, k - 1)] = c64::new(0.0, 0.0);
            }
        }
    }
    Ok(())
}
