//! Small numerical helpers.

/// Pairwise (cascade) summation; the result does not depend on how the
/// terms were produced, only on their order.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    const BLOCK: usize = 8;
    if xs.len() <= BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Sup norm and root-mean-square of a sample, with the index of the
/// largest entry (first one on ties).
pub fn sup_rms(xs: &[f64]) -> (f64, f64, usize) {
    let mut sup = 0.0;
    let mut at = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > sup || x.is_nan() {
            sup = x;
            at = i;
        }
    }
    let squares: Vec<f64> = xs.iter().map(|x| x * x).collect();
    let rms = if xs.is_empty() { 0.0 } else { (pairwise_sum(&squares) / xs.len() as f64).sqrt() };
    (sup, rms, at)
}

/// First and second derivatives of a `2π`-periodic function sampled at
/// `θ_i = 2πi/N`, by Fourier differentiation. The Nyquist mode is dropped
/// from the first derivative.
pub fn spectral_derivatives(y: &[f64]) -> (Vec<f64>, Vec<f64>) {
    use rustfft::{num_complex::Complex64, FftPlanner};
    let n = y.len();
    if n == 0 {
        return (Vec::new(), Vec::new());
    }
    let mut planner = FftPlanner::new();
    let mut spec: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    planner.plan_fft_forward(n).process(&mut spec);
    let wavenumber = |j: usize| -> f64 {
        if 2 * j < n {
            j as f64
        } else {
            j as f64 - n as f64
        }
    };
    let mut d1 = spec.clone();
    let mut d2 = spec;
    for j in 0..n {
        let w = wavenumber(j);
        let nyquist = n.is_multiple_of(2) && 2 * j == n;
        d1[j] = if nyquist { Complex64::new(0.0, 0.0) } else { d1[j] * Complex64::new(0.0, w) };
        d2[j] *= -w * w;
    }
    let inverse = planner.plan_fft_inverse(n);
    inverse.process(&mut d1);
    inverse.process(&mut d2);
    let scale = 1.0 / n as f64;
    (
        d1.iter().map(|z| z.re * scale).collect(),
        d2.iter().map(|z| z.re * scale).collect(),
    )
}

/// Solve the dense square system `a x = b` by Gaussian elimination with
/// partial pivoting; `None` when a pivot vanishes.
pub fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col] == 0.0 || !a[pivot][col].is_finite() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            if factor != 0.0 {
                for k in col..n {
                    a[row][k] -= factor * a[col][k];
                }
                b[row] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = b[row];
        for k in (row + 1)..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_derivatives_of_trig_polynomial() {
        let n = 32;
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
                (3.0 * t).sin() + 0.5 * (2.0 * t).cos()
            })
            .collect();
        let (d1, d2) = spectral_derivatives(&y);
        for i in 0..n {
            let t = 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            assert!((d1[i] - (3.0 * (3.0 * t).cos() - (2.0 * t).sin())).abs() < 1e-12);
            assert!((d2[i] - (-9.0 * (3.0 * t).sin() - 2.0 * (2.0 * t).cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn dense_solve() {
        let a = vec![vec![0.0, 2.0, 1.0], vec![1.0, 1.0, 0.0], vec![3.0, 0.0, 1.0]];
        let x = solve_dense(a, vec![5.0, 3.0, 6.0]).unwrap();
        for (got, want) in x.iter().zip([1.4, 1.6, 1.8]) {
            assert!((got - want).abs() < 1e-14, "{x:?}");
        }
        assert!(solve_dense(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0]).is_none());
    }

    #[test]
    fn pairwise_matches_naive_on_small_input() {
        let v: Vec<f64> = (0..100).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 4950.0);
    }

    #[test]
    fn sup_rms_basic() {
        let (s, r, i) = sup_rms(&[1.0, 3.0, 2.0, 3.0]);
        assert_eq!((s, i), (3.0, 1));
        assert!((r - (23.0f64 / 4.0).sqrt()).abs() < 1e-15);
    }
}
