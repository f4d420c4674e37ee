use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::ShiftSpec;
use crate::error::{invalid, Result};
use crate::hilbert::{CVector, HVector, C64};

/// Canonical vector `e_n` of the shift window.
pub fn shift_noncyclic_datum(spec: &ShiftSpec, site: i64) -> Result<HVector> {
    HVector::basis(spec.dim(), spec.position(site)?)
}

/// Parameters of the symbol `θ ↦ exp(−1/(s|θ|))` used as a cyclic stand-in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SzegoParams {
    /// `s`; larger values flatten the dip at `θ = 0`, pushing the datum
    /// towards `e_0`.
    #[serde(default = "one")]
    pub sharpness: f64,
    /// Offset of the frequency grid in bins; must lie in `(0, 1)` so that
    /// `θ = 0` is never sampled.
    #[serde(default = "half")]
    pub bin_offset: f64,
}

fn one() -> f64 {
    1.0
}

fn half() -> f64 {
    0.5
}

impl Default for SzegoParams {
    fn default() -> Self {
        SzegoParams { sharpness: 1.0, bin_offset: 0.5 }
    }
}

/// Frequency samples `(θ_k, symbol(θ_k))` with `θ_k = 2π(k + offset)/K`
/// wrapped to `(−π, π]`, `k = −N..=N`, `K = 2N + 1`.
pub fn szego_symbol(spec: &ShiftSpec, params: &SzegoParams) -> Result<Vec<(f64, f64)>> {
    if !(params.sharpness > 0.0 && params.sharpness.is_finite()) {
        return invalid("Szegő sharpness must be positive");
    }
    if !(params.bin_offset > 0.0 && params.bin_offset < 1.0) {
        return invalid("Szegő bin offset must lie strictly between 0 and 1");
    }
    let k_total = spec.dim() as f64;
    let r = spec.radius as i64;
    Ok((-r..=r)
        .map(|k| {
            let mut theta = 2.0 * PI * (k as f64 + params.bin_offset) / k_total;
            if theta > PI {
                theta -= 2.0 * PI;
            }
            (theta, (-1.0 / (params.sharpness * theta.abs())).exp())
        })
        .collect())
}

/// Datum whose discrete Fourier samples are the Szegő symbol:
/// `x_n = (1/K) Σ_k ŝ_k e^{i n θ_k}`. With this normalization the symbol
/// `ŝ ≡ 1` maps to `e_0` and `‖x‖` equals the root-mean-square of `ŝ`.
pub fn shift_szego_datum(spec: &ShiftSpec, params: &SzegoParams) -> Result<HVector> {
    let samples = szego_symbol(spec, params)?;
    let k_total = spec.dim() as f64;
    let x = CVector::from_fn(spec.dim(), |p, _| {
        let n = spec.site(p) as f64;
        samples
            .iter()
            .map(|&(theta, s)| C64::from_polar(s, n * theta))
            .sum::<C64>()
            / k_total
    });
    HVector::from_vector(x)
}

/// Unit-norm Fourier mode `e^{i k x_j} / √M` on an `M`-point periodic grid.
pub fn fourier_mode(points: usize, k: i64) -> CVector {
    let m = points as f64;
    CVector::from_fn(points, |j, _| {
        C64::from_polar(1.0 / m.sqrt(), 2.0 * PI * k as f64 * j as f64 / m)
    })
}

/// Finite combination of Fourier modes.
pub fn band_limited_datum(points: usize, modes: &[(i64, C64)]) -> Result<HVector> {
    if points == 0 || modes.is_empty() {
        return invalid("band-limited datum needs a grid and at least one mode");
    }
    let mut v = CVector::zeros(points);
    for &(k, a) in modes {
        v += fourier_mode(points, k) * a;
    }
    HVector::from_vector(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gallery::ShiftFill;

    #[test]
    fn noncyclic_datum_is_canonical() {
        let spec = ShiftSpec::new(4, ShiftFill::ZeroFill);
        let e0 = shift_noncyclic_datum(&spec, 0).unwrap();
        assert_eq!(e0.entries()[4], C64::new(1.0, 0.0));
        assert!((e0.norm() - 1.0).abs() < 1e-15);
        assert!(shift_noncyclic_datum(&spec, 5).is_err());
    }

    #[test]
    fn szego_samples_are_all_nonzero() {
        let spec = ShiftSpec::new(40, ShiftFill::ZeroFill);
        let s = szego_symbol(&spec, &SzegoParams::default()).unwrap();
        assert_eq!(s.len(), 81);
        assert!(s.iter().all(|&(t, v)| t != 0.0 && v > 0.0));
    }

    #[test]
    fn szego_norm_is_symbol_rms() {
        let spec = ShiftSpec::new(20, ShiftFill::ZeroFill);
        let p = SzegoParams { sharpness: 2.0, bin_offset: 0.5 };
        let s = szego_symbol(&spec, &p).unwrap();
        let rms = (s.iter().map(|(_, v)| v * v).sum::<f64>() / s.len() as f64).sqrt();
        let x = shift_szego_datum(&spec, &p).unwrap();
        assert!((x.norm() - rms).abs() < 1e-13);
    }

    #[test]
    fn flat_symbol_limit_approaches_e0() {
        let spec = ShiftSpec::new(30, ShiftFill::ZeroFill);
        let e0 = shift_noncyclic_datum(&spec, 0).unwrap();
        let d = |s: f64| {
            let x = shift_szego_datum(&spec, &SzegoParams { sharpness: s, bin_offset: 0.5 }).unwrap();
            (x.as_vector() - e0.as_vector()).norm()
        };
        assert!(d(1.0) > d(4.0) && d(4.0) > d(16.0));
    }

    #[test]
    fn bad_params_rejected() {
        let spec = ShiftSpec::new(3, ShiftFill::ZeroFill);
        assert!(szego_symbol(&spec, &SzegoParams { sharpness: 1.0, bin_offset: 0.0 }).is_err());
        assert!(szego_symbol(&spec, &SzegoParams { sharpness: -1.0, bin_offset: 0.5 }).is_err());
    }
}
