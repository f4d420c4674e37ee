use std::f64::consts::PI;

use crate::hilbert::{CMatrix, C64};

/// Grid `x_j = j L / M`, `j = 0..M`.
pub fn grid_points(points: usize, length: f64) -> Vec<f64> {
    (0..points).map(|j| j as f64 * length / points as f64).collect()
}

/// Wavenumber resolved by [`spectral_derivative`] for Fourier index `k`
/// (taken modulo `M`). The Nyquist mode of an even grid is differentiated
/// to zero.
pub fn discrete_wavenumber(points: usize, length: f64, k: i64) -> f64 {
    let m = points as i64;
    let mut k = k.rem_euclid(m);
    if 2 * k > m {
        k -= m;
    }
    if 2 * k == m {
        return 0.0;
    }
    2.0 * PI * k as f64 / length
}

/// Fourier-spectral first-derivative matrix on a periodic grid of `points`
/// nodes over a box of length `length`.
///
/// Entries come from the closed form `½ (−1)^{j−k} cot((j−k)h/2)` (even `M`)
/// or `csc` (odd `M`) with `h = 2π/M`, scaled by `2π/L`. Only the upper
/// triangle is evaluated; the lower one is its negative, so the matrix is
/// exactly real antisymmetric.
pub fn spectral_derivative(points: usize, length: f64) -> CMatrix {
    let m = points;
    let mut d = CMatrix::zeros(m, m);
    if m < 2 {
        return d;
    }
    let h = 2.0 * PI / m as f64;
    let scale = 2.0 * PI / length;
    for j in 0..m {
        for k in (j + 1)..m {
            let diff = j as f64 - k as f64;
            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
            let half = diff * h / 2.0;
            let val = if m.is_multiple_of(2) {
                0.5 * sign / half.tan()
            } else {
                0.5 * sign / half.sin()
            };
            let v = scale * val;
            d[(j, k)] = C64::new(v, 0.0);
            d[(k, j)] = C64::new(-v, 0.0);
        }
    }
    d
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::CVector;

    /// Independent route: D = F⁻¹ diag(i k̂) F with an explicit DFT.
    fn dft_derivative(m: usize, length: f64) -> CMatrix {
        let mut out = CMatrix::zeros(m, m);
        for k in 0..m as i64 {
            let kh = discrete_wavenumber(m, length, k);
            let mode = CVector::from_fn(m, |j, _| {
                C64::from_polar(1.0, 2.0 * PI * (k as f64) * j as f64 / m as f64)
            });
            // rank-one piece (i k̂) φ φ* / M
            out += (&mode * mode.adjoint()).scale(1.0 / m as f64) * C64::new(0.0, kh);
        }
        out
    }

    #[test]
    fn matches_dft_route_even_and_odd() {
        for &(m, l) in &[(8usize, 2.0 * PI), (9, 2.0 * PI), (16, 10.0), (15, 3.0)] {
            let a = spectral_derivative(m, l);
            let b = dft_derivative(m, l);
            assert!((a - b).norm() < 1e-11 * m as f64, "m = {m}");
        }
    }

    #[test]
    fn antisymmetric_and_kills_constants() {
        for m in [7usize, 32, 33] {
            let d = spectral_derivative(m, 2.0 * PI);
            assert_eq!(d.clone() + d.adjoint(), CMatrix::zeros(m, m));
            let ones = CVector::from_element(m, C64::new(1.0, 0.0));
            assert!((&d * ones).norm() < 1e-12 * m as f64);
        }
    }

    #[test]
    fn wavenumbers() {
        assert_eq!(discrete_wavenumber(8, 2.0 * PI, 4), 0.0);
        assert_eq!(discrete_wavenumber(8, 2.0 * PI, 3), 3.0);
        assert_eq!(discrete_wavenumber(8, 2.0 * PI, -3), -3.0);
        assert_eq!(discrete_wavenumber(8, 2.0 * PI, 5), -3.0);
        assert!((discrete_wavenumber(9, 4.0 * PI, 4) - 2.0).abs() < 1e-15);
    }
}
