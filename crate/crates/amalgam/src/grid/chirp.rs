//! Bluestein chirp-z evaluation of `Σ_m f_m e^{-2πi α m k}` on evenly spaced `k`.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::{forward_plan, inverse_plan};

fn chirp(alpha: f64, t: f64) -> Complex64 {
    let turns = (alpha * t * t / 2.0).rem_euclid(1.0);
    Complex64::from_polar(1.0, -2.0 * PI * turns)
}

/// `ks` must be `k0, k0 + 1, …`.
pub(crate) fn dtft(values: &[Complex64], alpha: f64, ks: &[f64]) -> Vec<Complex64> {
    let (m_len, n_len) = (values.len(), ks.len());
    if n_len == 0 {
        return Vec::new();
    }
    let k0 = ks[0];
    let size = (m_len + n_len - 1).next_power_of_two();
    let mut a = vec![Complex64::new(0.0, 0.0); size];
    for (m, v) in values.iter().enumerate() {
        let shift = Complex64::from_polar(1.0, -2.0 * PI * (alpha * m as f64 * k0).rem_euclid(1.0));
        a[m] = v * shift * chirp(alpha, m as f64);
    }
    let mut b = vec![Complex64::new(0.0, 0.0); size];
    for (t, slot) in b.iter_mut().enumerate().take(n_len) {
        *slot = chirp(alpha, t as f64).conj();
    }
    for t in 1..m_len {
        b[size - t] = chirp(alpha, t as f64).conj();
    }
    let fwd = forward_plan(size);
    fwd.process(&mut a);
    fwd.process(&mut b);
    for (x, y) in a.iter_mut().zip(&b) {
        *x *= y;
    }
    inverse_plan(size).process(&mut a);
    let norm = 1.0 / size as f64;
    (0..n_len)
        .map(|j| a[j] * norm * chirp(alpha, j as f64))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_direct_sum() {
        let values: Vec<Complex64> = (0..37)
            .map(|m| Complex64::new((m as f64).sin(), (m as f64 * 0.3).cos()))
            .collect();
        let alpha = 0.0123;
        let ks: Vec<f64> = (0..20).map(|j| -7.0 + j as f64).collect();
        let fast = dtft(&values, alpha, &ks);
        for (k, got) in ks.iter().zip(fast) {
            let direct: Complex64 = values
                .iter()
                .enumerate()
                .map(|(m, v)| v * Complex64::from_polar(1.0, -2.0 * PI * alpha * m as f64 * k))
                .sum();
            assert!((got - direct).norm() < 1e-10);
        }
    }
}
