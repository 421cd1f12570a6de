//! Line-of-sight channel matrices.
//!
//! Entry `(i, j)` is the response from transmit element `i` to receive
//! element `j`, `e^{-jk·d_ij}` for the phase-only model and
//! `e^{-jk·d_ij} / d_ij` when free-space amplitude decay is kept.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::geometry::DistanceMatrix;
use crate::linalg::ComplexMatrix;

/// Speed of light in vacuum, m/s (exact by definition of the metre).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChannelError {
    #[error("carrier frequency must be positive and finite, got {0} Hz")]
    Frequency(f64),
    #[error("wavelength must be positive and finite, got {0} m")]
    Wavelength(f64),
    #[error("channel matrix must be square with {0} entries")]
    NotSquare(usize),
    #[error("channel matrix has non-finite entries")]
    NonFinite,
    #[error("phase-only entry ({0}, {1}) does not have unit modulus")]
    NotUnitModulus(usize, usize),
    #[error("gain profile has {tx} tx and {rx} rx gains for a {n}x{n} channel")]
    GainLength { tx: usize, rx: usize, n: usize },
    #[error("gains must be positive and finite, got {0}")]
    Gain(f64),
}

/// Carrier frequency with its derived wavelength and wavenumber.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Carrier {
    frequency: f64,
    wavelength: f64,
}

impl Carrier {
    pub fn from_frequency(hz: f64) -> Result<Self, ChannelError> {
        if !(hz > 0.0 && hz.is_finite()) {
            return Err(ChannelError::Frequency(hz));
        }
        Ok(Self { frequency: hz, wavelength: SPEED_OF_LIGHT / hz })
    }

    pub fn from_wavelength(meters: f64) -> Result<Self, ChannelError> {
        if !(meters > 0.0 && meters.is_finite()) {
            return Err(ChannelError::Wavelength(meters));
        }
        Ok(Self { frequency: SPEED_OF_LIGHT / meters, wavelength: meters })
    }

    pub fn frequency(&self) -> f64 {
        self.frequency
    }

    pub fn wavelength(&self) -> f64 {
        self.wavelength
    }

    /// k = 2π/λ, rad/m.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.wavelength
    }

    /// `e^{-jk·d}`. The path is reduced to a fraction of a wavelength before
    /// scaling by 2π so whole-wavelength paths land exactly on 1.
    pub fn phasor(&self, distance: f64) -> Complex64 {
        let cycles = distance / self.wavelength;
        let frac = cycles - cycles.round();
        let (s, c) = (-TAU * frac).sin_cos();
        Complex64::new(c, s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChannelModel {
    PhaseOnly,
    AmplitudeWeighted,
    Measured,
}

impl ChannelModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            ChannelModel::PhaseOnly => "phase_only",
            ChannelModel::AmplitudeWeighted => "amplitude_weighted",
            ChannelModel::Measured => "measured",
        }
    }
}

impl fmt::Display for ChannelModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Geometric models that [`los_channel`] can synthesize.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LosModel {
    PhaseOnly,
    AmplitudeWeighted,
}

impl From<LosModel> for ChannelModel {
    fn from(m: LosModel) -> Self {
        match m {
            LosModel::PhaseOnly => ChannelModel::PhaseOnly,
            LosModel::AmplitudeWeighted => ChannelModel::AmplitudeWeighted,
        }
    }
}

const UNIT_MODULUS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelMatrix {
    entries: ComplexMatrix,
    model: ChannelModel,
    carrier: Option<Carrier>,
}

impl ChannelMatrix {
    pub fn new(entries: ComplexMatrix, model: ChannelModel, carrier: Option<Carrier>) -> Result<Self, ChannelError> {
        if entries.dim() == 0 {
            return Err(ChannelError::NotSquare(0));
        }
        if !entries.is_finite() {
            return Err(ChannelError::NonFinite);
        }
        if model == ChannelModel::PhaseOnly {
            let n = entries.dim();
            for i in 0..n {
                for j in 0..n {
                    if (entries[(i, j)].norm() - 1.0).abs() > UNIT_MODULUS_TOLERANCE {
                        return Err(ChannelError::NotUnitModulus(i, j));
                    }
                }
            }
        }
        Ok(Self { entries, model, carrier })
    }

    /// Convenience constructor for measured data given as row-major entries.
    pub fn measured(entries: Vec<Complex64>) -> Result<Self, ChannelError> {
        let len = entries.len();
        let m = ComplexMatrix::from_row_major(entries).ok_or(ChannelError::NotSquare(len))?;
        Self::new(m, ChannelModel::Measured, None)
    }

    pub fn n(&self) -> usize {
        self.entries.dim()
    }

    pub fn entries(&self) -> &ComplexMatrix {
        &self.entries
    }

    pub fn get(&self, tx: usize, rx: usize) -> Complex64 {
        self.entries[(tx, rx)]
    }

    pub fn model(&self) -> ChannelModel {
        self.model
    }

    pub fn carrier(&self) -> Option<&Carrier> {
        self.carrier.as_ref()
    }

    /// Swaps transmit and receive roles (`Hᵀ`).
    pub fn reversed(&self) -> Self {
        Self { entries: self.entries.transpose(), ..self.clone() }
    }

    /// Multiplies every entry by `c`. The result is tagged measured unless
    /// `c` is exactly unit-modulus-preserving for a phase-only input.
    pub fn scaled(&self, c: Complex64) -> Result<Self, ChannelError> {
        let model = match self.model {
            ChannelModel::PhaseOnly if (c.norm() - 1.0).abs() <= UNIT_MODULUS_TOLERANCE => ChannelModel::PhaseOnly,
            ChannelModel::PhaseOnly => ChannelModel::Measured,
            m => m,
        };
        Self::new(self.entries.scale(c), model, self.carrier)
    }

    /// `H·H†`.
    pub fn gram(&self) -> ComplexMatrix {
        self.entries.gram()
    }
}

/// Synthesizes the line-of-sight channel for the given path lengths.
pub fn los_channel(d: &DistanceMatrix, carrier: &Carrier, model: LosModel) -> ChannelMatrix {
    let n = d.n();
    let entries = ComplexMatrix::from_fn(n, |i, j| {
        let dij = d.get(i, j);
        let h = carrier.phasor(dij);
        match model {
            LosModel::PhaseOnly => h,
            LosModel::AmplitudeWeighted => h / dij,
        }
    });
    ChannelMatrix { entries, model: model.into(), carrier: Some(*carrier) }
}

/// Per-element amplitude (voltage) gains. A power asymmetry `P` maps to an
/// amplitude factor `√P`.
#[derive(Debug, Clone, PartialEq)]
pub struct GainProfile {
    tx: Vec<f64>,
    rx: Vec<f64>,
}

impl GainProfile {
    pub fn new(tx: Vec<f64>, rx: Vec<f64>) -> Result<Self, ChannelError> {
        if let Some(&g) = tx.iter().chain(&rx).find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(ChannelError::Gain(g));
        }
        Ok(Self { tx, rx })
    }

    pub fn uniform(n: usize, gain: f64) -> Result<Self, ChannelError> {
        Self::new(vec![gain; n], vec![gain; n])
    }

    pub fn tx(&self) -> &[f64] {
        &self.tx
    }

    pub fn rx(&self) -> &[f64] {
        &self.rx
    }

    pub fn is_unity(&self) -> bool {
        self.tx.iter().chain(&self.rx).all(|g| *g == 1.0)
    }
}

/// `h'_ij = rx_j · h_ij · tx_i`.
pub fn apply_gains(h: &ChannelMatrix, gains: &GainProfile) -> Result<ChannelMatrix, ChannelError> {
    let n = h.n();
    if gains.tx.len() != n || gains.rx.len() != n {
        return Err(ChannelError::GainLength { tx: gains.tx.len(), rx: gains.rx.len(), n });
    }
    let entries = ComplexMatrix::from_fn(n, |i, j| h.entries[(i, j)] * (gains.rx[j] * gains.tx[i]));
    let model = match h.model {
        ChannelModel::PhaseOnly if !gains.is_unity() => ChannelModel::Measured,
        m => m,
    };
    Ok(ChannelMatrix { entries, model, carrier: h.carrier })
}
