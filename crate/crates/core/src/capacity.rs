//! Equal-power MIMO capacity `C = log₂ det(I + (ρ/N)·H·H†)`.
//!
//! Two independent evaluation routes are provided: the log-determinant of
//! `I + (ρ/N)G` through LU pivots, and the sum `Σ log₂(1 + (ρ/N)·λᵢ)` over the
//! Hermitian eigenvalues of `G`. For 2×2 channels a scalar closed form
//! serves as a third, library-free check.

use std::fmt;

use thiserror::Error;

use crate::channel::{ChannelMatrix, ChannelModel};
use crate::linalg::ComplexMatrix;

/// Negative Gram eigenvalues down to this (scaled by the largest
/// eigenvalue when it exceeds 1) are round-off and clamp to zero.
pub const EIGENVALUE_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CapacityError {
    #[error("SNR must be finite and non-negative, got {0}")]
    Snr(f64),
    #[error("frobenius normalization of an all-zero channel")]
    ZeroChannel,
    #[error("closed form needs a 2x2 channel, got {0}x{0}")]
    NotTwoByTwo(usize),
    #[error("Gram eigenvalue {0:.3e} is negative beyond round-off")]
    NegativeEigenvalue(f64),
}

/// Signal-to-noise power ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snr {
    db: f64,
    linear: f64,
}

impl Snr {
    /// Power decibels: ρ = 10^(dB/10).
    pub fn from_db(db: f64) -> Result<Self, CapacityError> {
        if db.is_nan() || db == f64::INFINITY {
            return Err(CapacityError::Snr(db));
        }
        Ok(Self { db, linear: 10f64.powf(db / 10.0) })
    }

    pub fn from_linear(linear: f64) -> Result<Self, CapacityError> {
        if !(linear >= 0.0 && linear.is_finite()) {
            return Err(CapacityError::Snr(linear));
        }
        Ok(Self { db: 10.0 * linear.log10(), linear })
    }

    pub fn db(&self) -> f64 {
        self.db
    }

    pub fn linear(&self) -> f64 {
        self.linear
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normalization {
    None,
    /// Rescale so `‖H‖²_F = N²`, i.e. unit mean power per entry.
    Frobenius,
}

impl Normalization {
    /// Phase-only channels already have unit-modulus entries; anything
    /// carrying physical amplitudes is normalized.
    pub fn default_for(model: ChannelModel) -> Self {
        match model {
            ChannelModel::PhaseOnly => Normalization::None,
            ChannelModel::AmplitudeWeighted | ChannelModel::Measured => Normalization::Frobenius,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Normalization::None => "none",
            Normalization::Frobenius => "frobenius",
        }
    }
}

impl fmt::Display for Normalization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityResult {
    pub bps_per_hz: f64,
    /// Gram eigenvalues of the (normalized) channel, descending.
    pub eigenvalues: Vec<f64>,
    pub orthogonality_defect: f64,
    pub normalization: Normalization,
    /// Factor applied to H before evaluation; 1 when not normalized.
    pub scale: f64,
    pub snr: Snr,
}

/// Returns the channel entries rescaled per `norm` along with the factor used.
pub fn normalize(h: &ChannelMatrix, norm: Normalization) -> Result<(ComplexMatrix, f64), CapacityError> {
    let m = h.entries();
    match norm {
        Normalization::None => Ok((m.clone(), 1.0)),
        Normalization::Frobenius => {
            let fro = m.frobenius_norm();
            if fro == 0.0 {
                return Err(CapacityError::ZeroChannel);
            }
            if h.model() == ChannelModel::PhaseOnly {
                return Ok((m.clone(), 1.0));
            }
            let scale = m.dim() as f64 / fro;
            Ok((m.scale_real(scale), scale))
        }
    }
}

/// `log₂ det(I + (ρ/N)·G)` through LU pivots.
pub fn log_det_capacity(gram: &ComplexMatrix, rho: f64) -> f64 {
    let n = gram.dim();
    let a = ComplexMatrix::from_fn(n, |i, j| {
        let id = if i == j { 1.0 } else { 0.0 };
        gram[(i, j)] * (rho / n as f64) + id
    });
    // I + (ρ/N)G is Hermitian positive definite, so |det| = det.
    a.log2_abs_det().max(0.0)
}

/// `Σ log₂(1 + (ρ/N)·λᵢ)`.
pub fn eigen_capacity(eigenvalues: &[f64], rho: f64) -> f64 {
    let n = eigenvalues.len() as f64;
    eigenvalues.iter().map(|l| (rho / n * l).ln_1p()).sum::<f64>() / std::f64::consts::LN_2
}

/// Gram eigenvalues, descending, with round-off negatives clamped to zero.
pub fn gram_eigenvalues(gram: &ComplexMatrix) -> Result<Vec<f64>, CapacityError> {
    let mut eig = gram.hermitian_eigenvalues();
    let floor = EIGENVALUE_FLOOR * eig.first().copied().unwrap_or(0.0).max(1.0);
    for l in &mut eig {
        if *l < 0.0 {
            if *l < -floor {
                return Err(CapacityError::NegativeEigenvalue(*l));
            }
            *l = 0.0;
        }
    }
    Ok(eig)
}

fn defect_of_gram(g: &ComplexMatrix) -> f64 {
    let n = g.dim();
    let mean = g.trace().re / n as f64;
    let total = g.frobenius_norm_sqr();
    if total == 0.0 {
        return 0.0;
    }
    // ‖G - mean·I‖² = ‖G‖² - N·mean², which loses precision when G ≈ mean·I;
    // accumulate the residual directly instead.
    let mut resid = 0.0;
    for i in 0..n {
        for j in 0..n {
            let z = if i == j { g[(i, j)] - mean } else { g[(i, j)] };
            resid += z.norm_sqr();
        }
    }
    (resid / total).sqrt().clamp(0.0, 1.0)
}

/// `‖G − (tr G / N)·I‖_F / ‖G‖_F` on the Frobenius-normalized channel.
/// Zero exactly when the sub-channels are orthogonal with equal power.
pub fn orthogonality_defect(h: &ChannelMatrix) -> Result<f64, CapacityError> {
    let (m, _) = normalize(h, Normalization::Frobenius)?;
    Ok(defect_of_gram(&m.gram()))
}

pub fn capacity(h: &ChannelMatrix, snr: Snr, norm: Normalization) -> Result<CapacityResult, CapacityError> {
    let (m, scale) = normalize(h, norm)?;
    let gram = m.gram();
    let eigenvalues = gram_eigenvalues(&gram)?;
    let orthogonality_defect = if m.frobenius_norm_sqr() == 0.0 { 0.0 } else { defect_of_gram(&gram) };
    Ok(CapacityResult {
        bps_per_hz: log_det_capacity(&gram, snr.linear()),
        eigenvalues,
        orthogonality_defect,
        normalization: norm,
        scale,
        snr,
    })
}

/// Capacity of a 2×2 channel with nothing but scalar arithmetic:
/// `det(I + (ρ/2)G) = (1 + ρa/2)(1 + ρc/2) − (ρ/2)²|b|²` for `G = [[a, b], [b̄, c]]`.
/// No normalization is applied.
pub fn capacity_2x2_closed_form(h: &ChannelMatrix, snr: Snr) -> Result<f64, CapacityError> {
    if h.n() != 2 {
        return Err(CapacityError::NotTwoByTwo(h.n()));
    }
    let (h11, h12, h21, h22) = (h.get(0, 0), h.get(0, 1), h.get(1, 0), h.get(1, 1));
    let a = h11.norm_sqr() + h12.norm_sqr();
    let c = h21.norm_sqr() + h22.norm_sqr();
    let r = snr.linear() / 2.0;
    // (1 + ra)(1 + rc) - r²|b|² = 1 + r(a + c) + r²(ac - |b|²), and the bracket
    // is det(G) = |det H|², taken directly to avoid cancellation.
    let det_h = h11 * h22 - h12 * h21;
    let det = 1.0 + r * (a + c) + r * r * det_h.norm_sqr();
    Ok(det.log2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn hadamard() -> ChannelMatrix {
        ChannelMatrix::measured(vec![c(1., 0.), c(1., 0.), c(1., 0.), c(-1., 0.)]).unwrap()
    }

    fn ones() -> ChannelMatrix {
        ChannelMatrix::measured(vec![c(1., 0.); 4]).unwrap()
    }

    fn one() -> Snr {
        Snr::from_db(0.0).unwrap()
    }

    #[test]
    fn snr_conversions() {
        assert_eq!(one().linear(), 1.0);
        let s = Snr::from_db(30.83).unwrap();
        let back = Snr::from_linear(s.linear()).unwrap();
        assert!((back.db() - 30.83).abs() / 30.83 < 1e-12);
        assert_eq!(Snr::from_linear(0.0).unwrap().db(), f64::NEG_INFINITY);
        assert!(Snr::from_linear(-1.0).is_err());
        assert!(Snr::from_db(f64::NAN).is_err());
    }

    #[test]
    fn orthogonal_channel_at_zero_db() {
        let r = capacity(&hadamard(), one(), Normalization::None).unwrap();
        assert!((r.bps_per_hz - 2.0).abs() < 1e-12);
        assert_eq!(r.orthogonality_defect, 0.0);
        assert!((r.eigenvalues[0] - 2.0).abs() < 1e-12 && (r.eigenvalues[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rank_one_channel() {
        // det [[1+ρ, ρ], [ρ, 1+ρ]] = 1 + 2ρ
        let rho = 1.0_f64;
        let oracle = ((1.0 + rho) * (1.0 + rho) - rho * rho).log2();
        let r = capacity(&ones(), one(), Normalization::None).unwrap();
        assert!((r.bps_per_hz - oracle).abs() < 1e-12);
        assert!((r.bps_per_hz - 1.584963).abs() < 1e-6);
        assert!((capacity_2x2_closed_form(&ones(), one()).unwrap() - oracle).abs() < 1e-12);
    }

    #[test]
    fn zero_snr_gives_zero() {
        let zero = Snr::from_linear(0.0).unwrap();
        assert_eq!(capacity(&ones(), zero, Normalization::None).unwrap().bps_per_hz, 0.0);
        assert_eq!(capacity(&hadamard(), zero, Normalization::Frobenius).unwrap().bps_per_hz, 0.0);
    }

    #[test]
    fn closed_form_matches_general_path() {
        let general = capacity(&hadamard(), one(), Normalization::None).unwrap().bps_per_hz;
        assert!((capacity_2x2_closed_form(&hadamard(), one()).unwrap() - general).abs() < 1e-12);
        let three = ChannelMatrix::measured(vec![c(1., 0.); 9]).unwrap();
        assert_eq!(capacity_2x2_closed_form(&three, one()), Err(CapacityError::NotTwoByTwo(3)));
    }

    #[test]
    fn defect_values() {
        assert_eq!(orthogonality_defect(&hadamard()).unwrap(), 0.0);
        // ‖[[0,2],[2,0]]‖ / ‖[[2,2],[2,2]]‖ = 2√2 / 4
        let brute = {
            let off: f64 = 2.0 * 2.0 * 2.0;
            let all: f64 = 4.0 * 2.0 * 2.0;
            (off / all).sqrt()
        };
        assert!((orthogonality_defect(&ones()).unwrap() - brute).abs() < 1e-15);
        assert!((brute - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-12);
        let scalar = ChannelMatrix::measured(vec![c(0.3, -2.0)]).unwrap();
        assert_eq!(orthogonality_defect(&scalar).unwrap(), 0.0);
    }

    #[test]
    fn zero_channel() {
        let z = ChannelMatrix::measured(vec![c(0., 0.); 4]).unwrap();
        assert_eq!(orthogonality_defect(&z), Err(CapacityError::ZeroChannel));
        assert_eq!(capacity(&z, one(), Normalization::Frobenius).unwrap_err(), CapacityError::ZeroChannel);
        assert_eq!(capacity(&z, one(), Normalization::None).unwrap().bps_per_hz, 0.0);
    }

    #[test]
    fn frobenius_normalization_scales_to_n_squared() {
        let h = ChannelMatrix::measured(vec![c(3., 0.), c(0., 1.), c(0.5, 0.5), c(-2., 0.)]).unwrap();
        let r = capacity(&h, one(), Normalization::Frobenius).unwrap();
        let sum: f64 = r.eigenvalues.iter().sum();
        assert!((sum - 4.0).abs() < 1e-12);
        assert!((r.scale - 2.0 / h.entries().frobenius_norm()).abs() < 1e-15);
    }

    #[test]
    fn eigen_path_agrees() {
        let h = ChannelMatrix::measured(vec![c(0.2, 1.), c(-0.7, 0.1), c(0.4, -0.4), c(1.3, 0.9)]).unwrap();
        let snr = Snr::from_db(7.0).unwrap();
        let r = capacity(&h, snr, Normalization::None).unwrap();
        let e = eigen_capacity(&r.eigenvalues, snr.linear());
        assert!((r.bps_per_hz - e).abs() / r.bps_per_hz < 1e-12);
    }

    #[test]
    fn default_normalization() {
        assert_eq!(Normalization::default_for(ChannelModel::PhaseOnly), Normalization::None);
        assert_eq!(Normalization::default_for(ChannelModel::Measured), Normalization::Frobenius);
        assert_eq!(Normalization::default_for(ChannelModel::AmplitudeWeighted), Normalization::Frobenius);
    }
}
