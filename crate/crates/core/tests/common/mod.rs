#![allow(dead_code)]

use faer::Mat;
use mesoleads::c64;
use mesoleads::gaussian::Covariance;
use mesoleads::linalg::{CMat, HermitianEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// `U diag(spectrum) U^H` with `U` from the eigenvectors of a random Hermitian matrix.
pub fn random_covariance(spectrum: &[f64], seed: u64) -> Covariance {
    let d = spectrum.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = Mat::from_fn(d, d, |_, _| c64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    let h: CMat = &a + a.adjoint();
    let eig = HermitianEigen::new(h.as_ref()).unwrap();
    Covariance::new(eig.with_weights(spectrum)).unwrap()
}

pub fn max_gap(a: faer::MatRef<'_, c64>, b: faer::MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}
