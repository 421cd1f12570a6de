//! Parameter sweeps over the theoretical 2×2 (or N×N) parallel-array link.
//!
//! Every row is computed independently, so sweeps run in parallel with
//! rayon and still come back in abscissa order. Results serialize to CSV
//! with `#`-prefixed provenance lines carrying the resolved spec, which is
//! enough to read a result back with [`SweepResult::from_csv`].

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use thiserror::Error;

use crate::capacity::{capacity, Normalization, Snr};
use crate::channel::{apply_gains, los_channel, Carrier, GainProfile, LosModel};
use crate::format::{fixed6, sig9};
use crate::geometry::build_parallel_ulas;

#[derive(Debug, Error)]
pub enum SweepError {
    #[error("sweep range needs start < stop, got [{0}, {1}]")]
    Range(f64, f64),
    #[error("sweep step must be positive and finite, got {0}")]
    Step(f64),
    #[error("sweep count must be at least 2, got {0}")]
    Count(usize),
    #[error("invalid sweep parameter: {0}")]
    Parameter(String),
    #[error("csv line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error(transparent)]
    CsvIo(#[from] csv::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SweepVariable {
    Distance,
    Spacing,
    Frequency,
    Snr,
}

impl SweepVariable {
    pub fn as_str(&self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance",
            SweepVariable::Spacing => "spacing",
            SweepVariable::Frequency => "frequency",
            SweepVariable::Snr => "snr",
        }
    }

    /// CSV column name including the unit.
    pub fn column(&self) -> &'static str {
        match self {
            SweepVariable::Distance => "distance_m",
            SweepVariable::Spacing => "spacing_m",
            SweepVariable::Frequency => "frequency_hz",
            SweepVariable::Snr => "snr_db",
        }
    }
}

impl FromStr for SweepVariable {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "distance" => Ok(SweepVariable::Distance),
            "spacing" => Ok(SweepVariable::Spacing),
            "frequency" => Ok(SweepVariable::Frequency),
            "snr" => Ok(SweepVariable::Snr),
            _ => Err(format!("unknown sweep variable {s:?}")),
        }
    }
}

/// Which path-length model feeds the channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PathModel {
    #[default]
    Exact,
    /// `d ≈ a + r²/(2a)`, under which the closed-form design optima are exact.
    Paraxial,
}

impl PathModel {
    pub fn as_str(&self) -> &'static str {
        match self {
            PathModel::Exact => "exact",
            PathModel::Paraxial => "paraxial",
        }
    }
}

impl FromStr for PathModel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "exact" => Ok(PathModel::Exact),
            "paraxial" => Ok(PathModel::Paraxial),
            _ => Err(format!("unknown path model {s:?}")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Grid {
    Step(f64),
    Count(usize),
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Step(s) => write!(f, "step:{s}"),
            Grid::Count(c) => write!(f, "count:{c}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub variable: SweepVariable,
    pub start: f64,
    pub stop: f64,
    pub grid: Grid,
    /// Elements per array.
    pub n: usize,
    pub frequency_hz: f64,
    pub spacing_m: f64,
    pub distance_m: f64,
    pub snr: Snr,
    pub model: LosModel,
    pub normalization: Normalization,
    pub path: PathModel,
    pub gains: Option<GainProfile>,
}

impl SweepSpec {
    /// A distance sweep with phase-only, unnormalized defaults.
    pub fn distance(start: f64, stop: f64, grid: Grid, frequency_hz: f64, spacing_m: f64, snr: Snr) -> Self {
        Self {
            variable: SweepVariable::Distance,
            start,
            stop,
            grid,
            n: 2,
            frequency_hz,
            spacing_m,
            distance_m: start,
            snr,
            model: LosModel::PhaseOnly,
            normalization: Normalization::None,
            path: PathModel::Exact,
            gains: None,
        }
    }

    pub fn validate(&self) -> Result<(), SweepError> {
        if !(self.start.is_finite() && self.stop.is_finite() && self.start < self.stop) {
            return Err(SweepError::Range(self.start, self.stop));
        }
        match self.grid {
            Grid::Step(s) if !(s > 0.0 && s.is_finite()) => return Err(SweepError::Step(s)),
            Grid::Count(c) if c < 2 => return Err(SweepError::Count(c)),
            _ => {}
        }
        if self.n == 0 {
            return Err(SweepError::Parameter("n must be at least 1".into()));
        }
        let positive = |name: &str, v: f64, swept: SweepVariable| {
            if self.variable == swept || (v > 0.0 && v.is_finite()) {
                Ok(())
            } else {
                Err(SweepError::Parameter(format!("{name} must be positive, got {v}")))
            }
        };
        positive("frequency", self.frequency_hz, SweepVariable::Frequency)?;
        positive("distance", self.distance_m, SweepVariable::Distance)?;
        if self.n > 1 {
            positive("spacing", self.spacing_m, SweepVariable::Spacing)?;
        }
        if let Some(g) = &self.gains {
            if g.tx().len() != self.n || g.rx().len() != self.n {
                return Err(SweepError::Parameter(format!("gain profile does not match n={}", self.n)));
            }
        }
        Ok(())
    }

    /// Abscissa values in increasing order.
    pub fn abscissas(&self) -> Vec<f64> {
        match self.grid {
            Grid::Count(c) => {
                let step = (self.stop - self.start) / (c - 1) as f64;
                (0..c)
                    .map(|k| if k + 1 == c { self.stop } else { self.start + k as f64 * step })
                    .collect()
            }
            Grid::Step(step) => {
                let count = ((self.stop - self.start) / step + 1e-9).floor() as usize + 1;
                (0..count).map(|k| self.start + k as f64 * step).collect()
            }
        }
    }

    /// Capacity at one abscissa value.
    pub fn evaluate(&self, x: f64) -> SweepRow {
        match self.try_evaluate(x) {
            Ok(row) => row,
            Err(reason) => SweepRow {
                abscissa: x,
                capacity_bps_hz: f64::NAN,
                orthogonality_defect: f64::NAN,
                eigenvalues: vec![f64::NAN; self.n],
                error: Some(reason),
            },
        }
    }

    fn try_evaluate(&self, x: f64) -> Result<SweepRow, String> {
        let (mut f, mut s, mut d, mut snr) = (self.frequency_hz, self.spacing_m, self.distance_m, self.snr);
        match self.variable {
            SweepVariable::Distance => d = x,
            SweepVariable::Spacing => s = x,
            SweepVariable::Frequency => f = x,
            SweepVariable::Snr => snr = Snr::from_db(x).map_err(|e| e.to_string())?,
        }
        let carrier = Carrier::from_frequency(f).map_err(|e| e.to_string())?;
        let link = build_parallel_ulas(self.n, s, d).map_err(|e| e.to_string())?;
        let dist = match self.path {
            PathModel::Exact => link.distance_matrix(),
            PathModel::Paraxial => link.paraxial_distance_matrix().map_err(|e| e.to_string())?,
        };
        let mut h = los_channel(&dist, &carrier, self.model);
        if let Some(g) = &self.gains {
            h = apply_gains(&h, g).map_err(|e| e.to_string())?;
        }
        let r = capacity(&h, snr, self.normalization).map_err(|e| e.to_string())?;
        Ok(SweepRow {
            abscissa: x,
            capacity_bps_hz: r.bps_per_hz,
            orthogonality_defect: r.orthogonality_defect,
            eigenvalues: r.eigenvalues,
            error: None,
        })
    }

    fn provenance(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("variable", self.variable.as_str().to_string()),
            ("start", self.start.to_string()),
            ("stop", self.stop.to_string()),
            ("grid", self.grid.to_string()),
            ("n", self.n.to_string()),
            ("frequency_hz", self.frequency_hz.to_string()),
            ("spacing_m", self.spacing_m.to_string()),
            ("distance_m", self.distance_m.to_string()),
            ("snr_db", self.snr.db().to_string()),
            ("model", model_name(self.model).to_string()),
            ("norm", self.normalization.as_str().to_string()),
            ("path", self.path.as_str().to_string()),
        ];
        if let Some(g) = &self.gains {
            out.push(("gains_tx", join(g.tx())));
            out.push(("gains_rx", join(g.rx())));
        }
        out
    }

    fn from_provenance(pairs: &[(String, String)]) -> Result<Self, String> {
        let get = |k: &str| {
            pairs
                .iter()
                .find(|(key, _)| key == k)
                .map(|(_, v)| v.as_str())
                .ok_or_else(|| format!("missing provenance key {k}"))
        };
        let num = |k: &str| -> Result<f64, String> { get(k)?.parse().map_err(|_| format!("bad number for {k}")) };
        let grid = match get("grid")?.split_once(':') {
            Some(("step", v)) => Grid::Step(v.parse().map_err(|_| "bad grid step".to_string())?),
            Some(("count", v)) => Grid::Count(v.parse().map_err(|_| "bad grid count".to_string())?),
            _ => return Err("bad grid".into()),
        };
        let n: usize = get("n")?.parse().map_err(|_| "bad n".to_string())?;
        let list = |k: &str| -> Result<Option<Vec<f64>>, String> {
            match get(k) {
                Ok(v) => v.split(';').map(|x| x.parse().map_err(|_| format!("bad {k}"))).collect::<Result<_, _>>().map(Some),
                Err(_) => Ok(None),
            }
        };
        let gains = match (list("gains_tx")?, list("gains_rx")?) {
            (Some(tx), Some(rx)) => Some(GainProfile::new(tx, rx).map_err(|e| e.to_string())?),
            (None, None) => None,
            _ => return Err("gains_tx and gains_rx must appear together".into()),
        };
        Ok(Self {
            variable: get("variable")?.parse()?,
            start: num("start")?,
            stop: num("stop")?,
            grid,
            n,
            frequency_hz: num("frequency_hz")?,
            spacing_m: num("spacing_m")?,
            distance_m: num("distance_m")?,
            snr: Snr::from_db(num("snr_db")?).map_err(|e| e.to_string())?,
            model: parse_model(get("model")?)?,
            normalization: parse_norm(get("norm")?)?,
            path: get("path")?.parse()?,
            gains,
        })
    }
}

fn join(v: &[f64]) -> String {
    v.iter().map(f64::to_string).collect::<Vec<_>>().join(";")
}

pub fn model_name(m: LosModel) -> &'static str {
    match m {
        LosModel::PhaseOnly => "phase",
        LosModel::AmplitudeWeighted => "amplitude",
    }
}

pub fn parse_model(s: &str) -> Result<LosModel, String> {
    match s {
        "phase" | "phase_only" => Ok(LosModel::PhaseOnly),
        "amplitude" | "amplitude_weighted" => Ok(LosModel::AmplitudeWeighted),
        _ => Err(format!("unknown model {s:?}")),
    }
}

pub fn parse_norm(s: &str) -> Result<Normalization, String> {
    match s {
        "none" => Ok(Normalization::None),
        "frobenius" => Ok(Normalization::Frobenius),
        _ => Err(format!("unknown normalization {s:?}")),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub abscissa: f64,
    pub capacity_bps_hz: f64,
    pub orthogonality_defect: f64,
    pub eigenvalues: Vec<f64>,
    /// Set when this grid point could not be evaluated.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub spec: SweepSpec,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn flagged(&self) -> impl Iterator<Item = &SweepRow> {
        self.rows.iter().filter(|r| r.error.is_some())
    }

    pub fn has_errors(&self) -> bool {
        self.flagged().next().is_some()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("# losmimo theory sweep\n");
        for (k, v) in self.spec.provenance() {
            out.push_str(&format!("# {k}={v}\n"));
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        let mut header = vec![
            self.spec.variable.column().to_string(),
            "capacity_bps_hz".into(),
            "orthogonality_defect".into(),
        ];
        header.extend((1..=self.spec.n).map(|i| format!("eig_{i}")));
        header.push("status".into());
        w.write_record(&header).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![sig9(r.abscissa), fixed6(r.capacity_bps_hz), sig9(r.orthogonality_defect)];
            rec.extend(r.eigenvalues.iter().map(|e| sig9(*e)));
            rec.push(match &r.error {
                None => "ok".into(),
                Some(e) => format!("error: {e}"),
            });
            w.write_record(&rec).expect("in-memory write");
        }
        out.push_str(&String::from_utf8(w.into_inner().expect("flush")).expect("utf-8"));
        out
    }

    pub fn from_csv(text: &str) -> Result<Self, SweepError> {
        let mut provenance = Vec::new();
        let mut header_line = 0;
        for (i, line) in text.lines().enumerate() {
            let Some(rest) = line.strip_prefix('#') else {
                header_line = i + 1;
                break;
            };
            if let Some((k, v)) = rest.trim_start().split_once('=') {
                provenance.push((k.to_string(), v.to_string()));
            }
        }
        let spec = SweepSpec::from_provenance(&provenance).map_err(|reason| SweepError::Csv { line: header_line, reason })?;
        let mut reader = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(text.as_bytes());
        let cols = reader.headers()?.len();
        if cols != spec.n + 4 {
            return Err(SweepError::Csv { line: header_line, reason: format!("expected {} columns, got {cols}", spec.n + 4) });
        }
        let mut rows = Vec::new();
        for (k, rec) in reader.records().enumerate() {
            let rec = rec?;
            let line = header_line + 1 + k;
            let num = |i: usize| -> Result<f64, SweepError> {
                rec[i].parse().map_err(|_| SweepError::Csv { line, reason: format!("bad number {:?}", &rec[i]) })
            };
            let status = &rec[cols - 1];
            rows.push(SweepRow {
                abscissa: num(0)?,
                capacity_bps_hz: num(1)?,
                orthogonality_defect: num(2)?,
                eigenvalues: (3..cols - 1).map(num).collect::<Result<_, _>>()?,
                error: status.strip_prefix("error: ").map(str::to_string),
            });
        }
        Ok(Self { spec, rows })
    }
}

/// Evaluates every grid point in parallel; row order follows the grid.
pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let rows = spec.abscissas().par_iter().map(|x| spec.evaluate(*x)).collect();
    Ok(SweepResult { spec: spec.clone(), rows })
}

/// Single-threaded [`run_sweep`].
pub fn run_sweep_serial(spec: &SweepSpec) -> Result<SweepResult, SweepError> {
    spec.validate()?;
    let rows = spec.abscissas().iter().map(|x| spec.evaluate(*x)).collect();
    Ok(SweepResult { spec: spec.clone(), rows })
}
