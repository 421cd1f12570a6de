//! Synthetic sweep files with a declared channel and SNR.
//!
//! Every pair trace holds `level · H[tx][rx]` at every grid point, and the
//! noise trace sits `snr_db` below the mean pair power, so both the
//! per-pair SNR of a unit-modulus channel and the array SNR read back as
//! `snr_db`.

use crate::linalg::ComplexMatrix;
use crate::measurement::{MeasurementError, MeasurementSweep, Metadata, Pair, SweepPoint, SweepTrace, TraceLabel};

#[derive(Debug, Clone)]
pub struct FixtureSpec {
    pub h: ComplexMatrix,
    pub snr_db: Option<f64>,
    /// Overall received level applied to `h`, in dB.
    pub level_db: f64,
    pub start_hz: f64,
    pub stop_hz: f64,
    pub points: usize,
    pub distance_m: f64,
    pub metadata: Metadata,
}

impl FixtureSpec {
    pub fn new(h: ComplexMatrix, start_hz: f64, stop_hz: f64, points: usize) -> Self {
        Self {
            h,
            snr_db: None,
            level_db: 0.0,
            start_hz,
            stop_hz,
            points,
            distance_m: 0.3,
            metadata: Metadata::default(),
        }
    }

    pub fn snr_db(mut self, db: f64) -> Self {
        self.snr_db = Some(db);
        self
    }

    pub fn level_db(mut self, db: f64) -> Self {
        self.level_db = db;
        self
    }

    pub fn distance_m(mut self, d: f64) -> Self {
        self.distance_m = d;
        self
    }

    /// Uniform grid from start to stop inclusive; the last point is exactly
    /// `stop_hz`.
    pub fn grid(&self) -> Vec<f64> {
        let step = (self.stop_hz - self.start_hz) / (self.points - 1) as f64;
        (0..self.points)
            .map(|k| if k + 1 == self.points { self.stop_hz } else { self.start_hz + k as f64 * step })
            .collect()
    }
}

pub fn generate(spec: &FixtureSpec) -> Result<MeasurementSweep, MeasurementError> {
    if spec.points < 2 {
        return Err(MeasurementError::TooFewPoints(spec.points));
    }
    if !(spec.start_hz < spec.stop_hz && spec.start_hz > 0.0 && spec.stop_hz.is_finite()) {
        return Err(MeasurementError::Invalid(format!(
            "fixture grid needs 0 < start < stop, got [{}, {}]",
            spec.start_hz, spec.stop_hz
        )));
    }
    if !spec.level_db.is_finite() {
        return Err(MeasurementError::Invalid("level must be finite".into()));
    }
    let n = spec.h.dim();
    if n == 0 {
        return Err(MeasurementError::Invalid("empty channel matrix".into()));
    }
    if spec.h.as_slice().iter().any(|z| z.norm() == 0.0 || !z.norm().is_finite()) {
        return Err(MeasurementError::Invalid("channel entries must be nonzero and finite to encode in dB".into()));
    }
    let grid = spec.grid();
    let amp = 10f64.powf(spec.level_db / 20.0);
    let mut traces = Vec::with_capacity(n * n);
    for tx in 0..n {
        for rx in 0..n {
            let v = spec.h[(tx, rx)] * amp;
            traces.push(SweepTrace {
                label: TraceLabel::Pair(Pair::new(tx + 1, rx + 1)),
                points: grid.iter().map(|f| SweepPoint::from_complex(*f, v)).collect(),
            });
        }
    }
    let noise = spec
        .snr_db
        .map(|snr| {
            if !snr.is_finite() {
                return Err(MeasurementError::Invalid("SNR must be finite".into()));
            }
            let mean_power = spec.h.frobenius_norm_sqr() / (n * n) as f64;
            let noise_db = 10.0 * mean_power.log10() + spec.level_db - snr;
            Ok(SweepTrace {
                label: TraceLabel::Noise,
                points: grid
                    .iter()
                    .map(|f| SweepPoint { frequency: *f, magnitude_db: noise_db, phase_deg: 0.0 })
                    .collect(),
            })
        })
        .transpose()?;
    MeasurementSweep::new(n, spec.distance_m, spec.metadata.clone(), traces, noise)
}
