//! Cumulative integration of uniformly sampled rates.

/// Running integrals `I_n = int_0^{t_n} f dt` for samples `f_k = f(k h)`.
///
/// Gregory end corrections on the composite trapezoid rule give
/// `O(h^4)` error at every node; the first three nodes use low-order
/// closed rules of the same order.
pub fn cumulative_gregory(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    if n < 2 {
        return out;
    }
    let f = values;
    if n == 2 {
        out[1] = 0.5 * h * (f[0] + f[1]);
        return out;
    }
    out[2] = h * (f[0] + 4.0 * f[1] + f[2]) / 3.0;
    if n == 3 {
        out[1] = h * (5.0 * f[0] + 8.0 * f[1] - f[2]) / 12.0;
        return out;
    }
    out[1] = h * (9.0 * f[0] + 19.0 * f[1] - 5.0 * f[2] + f[3]) / 24.0;
    out[3] = 3.0 * h * (f[0] + 3.0 * f[1] + 3.0 * f[2] + f[3]) / 8.0;
    let head = 3.0 * f[0] - 4.0 * f[1] + f[2];
    let mut trap = h * (0.5 * f[0] + f[1] + f[2] + 0.5 * f[3]);
    for k in 4..n {
        trap += 0.5 * h * (f[k - 1] + f[k]);
        let tail = 3.0 * f[k] - 4.0 * f[k - 1] + f[k - 2];
        out[k] = trap - h / 24.0 * (tail + head);
    }
    out
}

/// Plain cumulative trapezoid rule.
pub fn cumulative_trapezoid(values: &[f64], h: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    let mut acc = 0.0;
    for (k, &v) in values.iter().enumerate() {
        if k > 0 {
            acc += 0.5 * h * (values[k - 1] + v);
        }
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_cubics() {
        let h = 0.1;
        let f: Vec<f64> = (0..20).map(|k| {
            let t = k as f64 * h;
            1.0 - 2.0 * t + 3.0 * t * t - 0.5 * t * t * t
        })
        .collect();
        let got = cumulative_gregory(&f, h);
        for (k, &g) in got.iter().enumerate() {
            let t = k as f64 * h;
            let exact = t - t * t + t * t * t - 0.125 * t.powi(4);
            assert!((g - exact).abs() < 1e-12, "node {k}: {g} vs {exact}");
        }
    }

    #[test]
    fn fourth_order_convergence() {
        let err = |n: usize| {
            let h = 2.0 / n as f64;
            let f: Vec<f64> = (0..=n).map(|k| (3.0 * k as f64 * h).sin()).collect();
            let i = cumulative_gregory(&f, h);
            (0..=n)
                .map(|k| {
                    let t = k as f64 * h;
                    (i[k] - (1.0 - (3.0 * t).cos()) / 3.0).abs()
                })
                .fold(0.0, f64::max)
        };
        let ratio = err(40) / err(80);
        assert!(ratio > 12.0, "ratio {ratio}");
    }

    #[test]
    fn short_inputs() {
        assert_eq!(cumulative_gregory(&[], 1.0), Vec::<f64>::new());
        assert_eq!(cumulative_gregory(&[3.0], 1.0), vec![0.0]);
        assert_eq!(cumulative_gregory(&[1.0, 3.0], 1.0), vec![0.0, 2.0]);
        assert_eq!(cumulative_trapezoid(&[1.0, 3.0, 5.0], 0.5), vec![0.0, 1.0, 3.0]);
    }
}
