//! Per-antenna-pair frequency sweeps and the measured-channel pipeline.
//!
//! Sweeps are exchanged as `THZSWEEP v1` text files:
//!
//! ```text
//! THZSWEEP v1 n=2 distance_m=0.3 points=1751
//! # temperature_f=72
//! TRACE tx=1 rx=1
//! 325000000000 -41.2 17.5
//! ...
//! TRACE noise
//! 325000000000 -72.03 0
//! ```
//!
//! Each data line is `<frequency_hz> <magnitude_db> <phase_deg>`. Magnitudes
//! are 20·log₁₀|S|, so a point's power is `10^(magnitude_db/10)`. Pair
//! indices on disk are 1-based.
//!
//! [`MeasurementSweep::to_canonical_string`] writes metadata in a fixed key
//! order, traces sorted by `(tx, rx)` with the noise trace last, and every
//! number in Rust's shortest round-trip form. Parsing a canonical file and
//! writing it back reproduces it byte for byte.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use thiserror::Error;

use crate::capacity::{capacity, CapacityError, CapacityResult, Normalization, Snr};
use crate::channel::{Carrier, ChannelError, ChannelMatrix, ChannelModel};
use crate::linalg::ComplexMatrix;

pub const MAGIC: &str = "THZSWEEP";
pub const VERSION: &str = "v1";

/// Transmit/receive pair, 1-based as on disk.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Pair {
    pub tx: usize,
    pub rx: usize,
}

impl Pair {
    pub fn new(tx: usize, rx: usize) -> Self {
        Self { tx, rx }
    }
}

impl fmt::Display for Pair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.tx, self.rx)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum TraceLabel {
    Pair(Pair),
    Noise,
}

impl fmt::Display for TraceLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceLabel::Pair(p) => write!(f, "pair {p}"),
            TraceLabel::Noise => f.write_str("noise trace"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeasurementError {
    #[error("input is not valid UTF-8")]
    Encoding,
    #[error("line {line}: bad header: {reason}")]
    Header { line: usize, reason: String },
    #[error("line {line}: bad metadata: {reason}")]
    Metadata { line: usize, reason: String },
    #[error("line {line}: unexpected content {content:?}")]
    Unexpected { line: usize, content: String },
    #[error("line {line}: bad data line in {trace}: {reason}")]
    DataLine { line: usize, trace: TraceLabel, reason: String },
    #[error("line {line}: frequencies in {trace} are not strictly increasing")]
    NonMonotone { line: usize, trace: TraceLabel },
    #[error("line {line}: {trace} is truncated after {got} of {want} points")]
    Truncated { line: usize, trace: TraceLabel, got: usize, want: usize },
    #[error("line {line}: duplicate trace for pair {pair}")]
    DuplicatePair { line: usize, pair: Pair },
    #[error("line {line}: duplicate noise trace")]
    DuplicateNoise { line: usize },
    #[error("line {line}: pair {pair} is outside 1..={n}")]
    PairOutOfRange { line: usize, pair: Pair, n: usize },
    #[error("missing trace for pair {0}")]
    MissingPair(Pair),
    #[error("frequency grids differ between {first} and {second} at point {index}")]
    GridMismatch { first: TraceLabel, second: TraceLabel, index: usize },
    #[error("sweep needs at least 2 points, got {0}")]
    TooFewPoints(usize),
    #[error("invalid sweep: {0}")]
    Invalid(String),
    #[error("no noise trace present")]
    MissingNoise,
    #[error("no grid points inside band [{lo}, {hi}] Hz")]
    EmptyBand { lo: f64, hi: f64 },
    #[error("frequency {frequency} Hz outside sweep span [{lo}, {hi}] Hz")]
    OutOfSpan { frequency: f64, lo: f64, hi: f64 },
    #[error("frequency {frequency} Hz is {offset} Hz from the nearest grid point, more than half a grid step ({tolerance} Hz)")]
    OffGrid { frequency: f64, offset: f64, tolerance: f64 },
    #[error(transparent)]
    Channel(#[from] ChannelError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
}

/// One sweep sample as stored on disk.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub frequency: f64,
    pub magnitude_db: f64,
    pub phase_deg: f64,
}

impl SweepPoint {
    pub fn from_complex(frequency: f64, value: Complex64) -> Self {
        Self {
            frequency,
            magnitude_db: 10.0 * value.norm_sqr().log10(),
            phase_deg: value.im.atan2(value.re).to_degrees(),
        }
    }

    /// Linear complex value `10^(dB/20)·e^{jφ}`.
    pub fn value(&self) -> Complex64 {
        cis_deg(self.phase_deg) * 10f64.powf(self.magnitude_db / 20.0)
    }

    /// `|value|²`.
    pub fn power(&self) -> f64 {
        10f64.powf(self.magnitude_db / 10.0)
    }
}

/// `e^{jφ}` for φ in degrees, exact at multiples of 90°.
fn cis_deg(deg: f64) -> Complex64 {
    let r = deg.rem_euclid(360.0);
    let quarter = (r / 90.0).round();
    let (s, c) = (r - 90.0 * quarter).to_radians().sin_cos();
    match quarter as i64 % 4 {
        0 => Complex64::new(c, s),
        1 => Complex64::new(-s, c),
        2 => Complex64::new(-c, -s),
        _ => Complex64::new(s, -c),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    pub label: TraceLabel,
    pub points: Vec<SweepPoint>,
}

impl SweepTrace {
    pub fn frequencies(&self) -> impl Iterator<Item = f64> + '_ {
        self.points.iter().map(|p| p.frequency)
    }
}

/// Acquisition conditions. Unknown keys are kept in file order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Metadata {
    pub temperature_f: Option<f64>,
    pub humidity_pct: Option<f64>,
    pub if_bandwidth_hz: Option<f64>,
    pub averaging: Option<u32>,
    pub power_dbm: Option<f64>,
    pub extra: Vec<(String, String)>,
}

impl Metadata {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let float = |v: &str| -> Result<f64, String> {
            v.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| format!("{key} expects a number, got {v:?}"))
        };
        let slot_taken = |taken: bool| if taken { Err(format!("duplicate key {key}")) } else { Ok(()) };
        match key {
            "temperature_f" => {
                slot_taken(self.temperature_f.is_some())?;
                self.temperature_f = Some(float(value)?);
            }
            "humidity_pct" => {
                slot_taken(self.humidity_pct.is_some())?;
                self.humidity_pct = Some(float(value)?);
            }
            "if_bandwidth_hz" => {
                slot_taken(self.if_bandwidth_hz.is_some())?;
                self.if_bandwidth_hz = Some(float(value)?);
            }
            "averaging" => {
                slot_taken(self.averaging.is_some())?;
                self.averaging = Some(value.parse().map_err(|_| format!("averaging expects an integer, got {value:?}"))?);
            }
            "power_dbm" => {
                slot_taken(self.power_dbm.is_some())?;
                self.power_dbm = Some(float(value)?);
            }
            _ => {
                slot_taken(self.extra.iter().any(|(k, _)| k == key))?;
                self.extra.push((key.to_owned(), value.to_owned()));
            }
        }
        Ok(())
    }

    fn lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut push = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                out.push(format!("# {k}={v}"));
            }
        };
        push("temperature_f", self.temperature_f.map(|v| v.to_string()));
        push("humidity_pct", self.humidity_pct.map(|v| v.to_string()));
        push("if_bandwidth_hz", self.if_bandwidth_hz.map(|v| v.to_string()));
        push("averaging", self.averaging.map(|v| v.to_string()));
        push("power_dbm", self.power_dbm.map(|v| v.to_string()));
        for (k, v) in &self.extra {
            out.push(format!("# {k}={v}"));
        }
        out
    }
}

/// A full N×N set of pair traces on one frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementSweep {
    n: usize,
    distance: f64,
    metadata: Metadata,
    /// Row-major by `(tx, rx)`.
    traces: Vec<SweepTrace>,
    noise: Option<SweepTrace>,
}

impl MeasurementSweep {
    /// Validates a trace set: every pair exactly once, shared strictly
    /// increasing grid with at least two points, finite samples.
    pub fn new(
        n: usize,
        distance: f64,
        metadata: Metadata,
        traces: Vec<SweepTrace>,
        noise: Option<SweepTrace>,
    ) -> Result<Self, MeasurementError> {
        if n == 0 {
            return Err(MeasurementError::Invalid("n must be at least 1".into()));
        }
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(MeasurementError::Invalid(format!("distance must be positive, got {distance}")));
        }
        let mut by_pair: BTreeMap<Pair, SweepTrace> = BTreeMap::new();
        for t in traces {
            let TraceLabel::Pair(pair) = t.label else {
                return Err(MeasurementError::Invalid("noise trace passed as a pair trace".into()));
            };
            if pair.tx == 0 || pair.rx == 0 || pair.tx > n || pair.rx > n {
                return Err(MeasurementError::PairOutOfRange { line: 0, pair, n });
            }
            if by_pair.insert(pair, t).is_some() {
                return Err(MeasurementError::DuplicatePair { line: 0, pair });
            }
        }
        let mut ordered = Vec::with_capacity(n * n);
        for tx in 1..=n {
            for rx in 1..=n {
                let pair = Pair::new(tx, rx);
                ordered.push(by_pair.remove(&pair).ok_or(MeasurementError::MissingPair(pair))?);
            }
        }
        let reference = &ordered[0];
        check_trace(reference)?;
        for t in ordered.iter().skip(1).chain(noise.as_ref()) {
            check_trace(t)?;
            if t.points.len() != reference.points.len() {
                let index = t.points.len().min(reference.points.len());
                return Err(MeasurementError::GridMismatch { first: reference.label, second: t.label, index });
            }
            if let Some(index) = reference.frequencies().zip(t.frequencies()).position(|(a, b)| a != b) {
                return Err(MeasurementError::GridMismatch { first: reference.label, second: t.label, index });
            }
        }
        if noise.as_ref().is_some_and(|t| t.label != TraceLabel::Noise) {
            return Err(MeasurementError::Invalid("noise trace must carry the noise label".into()));
        }
        Ok(Self { n, distance, metadata, traces: ordered, noise })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Tx-Rx separation recorded in the header, meters.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    pub fn metadata(&self) -> &Metadata {
        &self.metadata
    }

    pub fn points(&self) -> usize {
        self.traces[0].points.len()
    }

    pub fn grid(&self) -> impl Iterator<Item = f64> + '_ {
        self.traces[0].frequencies()
    }

    pub fn traces(&self) -> &[SweepTrace] {
        &self.traces
    }

    /// Trace for a 1-based pair.
    pub fn trace(&self, pair: Pair) -> Option<&SweepTrace> {
        if pair.tx == 0 || pair.rx == 0 || pair.tx > self.n || pair.rx > self.n {
            return None;
        }
        self.traces.get((pair.tx - 1) * self.n + pair.rx - 1)
    }

    pub fn noise(&self) -> Option<&SweepTrace> {
        self.noise.as_ref()
    }

    /// Index of the grid point nearest `frequency`. Fails outside the swept
    /// span, or when the nearest point is more than half the mean grid step
    /// away.
    pub fn grid_index(&self, frequency: f64) -> Result<usize, MeasurementError> {
        let pts = &self.traces[0].points;
        let (lo, hi) = (pts[0].frequency, pts[pts.len() - 1].frequency);
        if !(frequency >= lo && frequency <= hi) {
            return Err(MeasurementError::OutOfSpan { frequency, lo, hi });
        }
        let above = pts.partition_point(|p| p.frequency < frequency);
        let index = if above == 0 {
            0
        } else if above == pts.len() {
            pts.len() - 1
        } else if pts[above].frequency - frequency < frequency - pts[above - 1].frequency {
            above
        } else {
            above - 1
        };
        let tolerance = 0.5 * (hi - lo) / (pts.len() - 1) as f64;
        let offset = (pts[index].frequency - frequency).abs();
        if offset > tolerance {
            return Err(MeasurementError::OffGrid { frequency, offset, tolerance });
        }
        Ok(index)
    }

    pub fn parse(bytes: &[u8]) -> Result<Self, MeasurementError> {
        let text = std::str::from_utf8(bytes).map_err(|_| MeasurementError::Encoding)?;
        Parser::new(text).run()
    }

    pub fn to_canonical_string(&self) -> String {
        let mut out = format!(
            "{MAGIC} {VERSION} n={} distance_m={} points={}\n",
            self.n,
            self.distance,
            self.points()
        );
        for line in self.metadata.lines() {
            out.push_str(&line);
            out.push('\n');
        }
        for t in self.traces.iter().chain(&self.noise) {
            match t.label {
                TraceLabel::Pair(p) => out.push_str(&format!("TRACE tx={} rx={}\n", p.tx, p.rx)),
                TraceLabel::Noise => out.push_str("TRACE noise\n"),
            }
            for p in &t.points {
                out.push_str(&format!("{} {} {}\n", p.frequency, p.magnitude_db, p.phase_deg));
            }
        }
        out
    }
}

fn check_trace(t: &SweepTrace) -> Result<(), MeasurementError> {
    if t.points.len() < 2 {
        return Err(MeasurementError::TooFewPoints(t.points.len()));
    }
    for p in &t.points {
        if !(p.frequency.is_finite() && p.magnitude_db.is_finite() && p.phase_deg.is_finite()) {
            return Err(MeasurementError::Invalid(format!("non-finite sample in {}", t.label)));
        }
    }
    if t.points.windows(2).any(|w| w[1].frequency <= w[0].frequency) {
        return Err(MeasurementError::NonMonotone { line: 0, trace: t.label });
    }
    Ok(())
}

struct Parser<'a> {
    lines: std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>,
    last_line: usize,
}

impl<'a> Parser<'a> {
    fn new(text: &'a str) -> Self {
        Self { lines: text.lines().enumerate().peekable(), last_line: 0 }
    }

    fn next_line(&mut self) -> Option<(usize, &'a str)> {
        let (i, l) = self.lines.next()?;
        self.last_line = i + 1;
        Some((i + 1, l))
    }

    fn run(mut self) -> Result<MeasurementSweep, MeasurementError> {
        let (n, distance, points) = self.header()?;
        let mut metadata = Metadata::default();
        let mut traces: Vec<SweepTrace> = Vec::new();
        let mut seen: BTreeMap<Pair, usize> = BTreeMap::new();
        let mut noise: Option<SweepTrace> = None;

        while let Some((line, text)) = self.next_line() {
            if text.trim().is_empty() {
                continue;
            }
            if let Some(rest) = text.strip_prefix('#') {
                if !traces.is_empty() || noise.is_some() {
                    return Err(MeasurementError::Metadata { line, reason: "metadata after first trace".into() });
                }
                let (k, v) = rest
                    .trim_start()
                    .split_once('=')
                    .ok_or_else(|| MeasurementError::Metadata { line, reason: "expected `# key=value`".into() })?;
                if k.is_empty() || k.contains(char::is_whitespace) {
                    return Err(MeasurementError::Metadata { line, reason: format!("bad key {k:?}") });
                }
                metadata.set(k, v).map_err(|reason| MeasurementError::Metadata { line, reason })?;
                continue;
            }
            let label = trace_label(line, text)?;
            match label {
                TraceLabel::Pair(pair) => {
                    if pair.tx == 0 || pair.rx == 0 || pair.tx > n || pair.rx > n {
                        return Err(MeasurementError::PairOutOfRange { line, pair, n });
                    }
                    if seen.insert(pair, line).is_some() {
                        return Err(MeasurementError::DuplicatePair { line, pair });
                    }
                }
                TraceLabel::Noise if noise.is_some() => return Err(MeasurementError::DuplicateNoise { line }),
                TraceLabel::Noise => {}
            }
            let trace = self.block(label, points)?;
            match label {
                TraceLabel::Noise => noise = Some(trace),
                TraceLabel::Pair(_) => traces.push(trace),
            }
        }
        MeasurementSweep::new(n, distance, metadata, traces, noise)
    }

    fn header(&mut self) -> Result<(usize, f64, usize), MeasurementError> {
        let (line, text) = self
            .next_line()
            .ok_or_else(|| MeasurementError::Header { line: 1, reason: "empty input".into() })?;
        let bad = |reason: String| MeasurementError::Header { line, reason };
        let tok: Vec<&str> = text.split(' ').collect();
        if tok.len() != 5 || tok[0] != MAGIC {
            return Err(bad(format!("expected `{MAGIC} {VERSION} n=<N> distance_m=<m> points=<P>`")));
        }
        if tok[1] != VERSION {
            return Err(bad(format!("unsupported version {:?}", tok[1])));
        }
        let field = |t: &str, key: &str| -> Result<String, MeasurementError> {
            t.strip_prefix(key)
                .and_then(|r| r.strip_prefix('='))
                .map(str::to_owned)
                .ok_or_else(|| bad(format!("expected {key}=<value>, got {t:?}")))
        };
        let n: usize = field(tok[2], "n")?.parse().map_err(|_| bad("n must be a positive integer".into()))?;
        let distance: f64 = field(tok[3], "distance_m")?
            .parse()
            .map_err(|_| bad("distance_m must be a number".into()))?;
        let points: usize = field(tok[4], "points")?
            .parse()
            .map_err(|_| bad("points must be an integer".into()))?;
        if n == 0 {
            return Err(bad("n must be at least 1".into()));
        }
        if !(distance > 0.0 && distance.is_finite()) {
            return Err(bad(format!("distance_m must be positive, got {distance}")));
        }
        if points < 2 {
            return Err(bad(format!("points must be at least 2, got {points}")));
        }
        Ok((n, distance, points))
    }

    fn block(&mut self, label: TraceLabel, want: usize) -> Result<SweepTrace, MeasurementError> {
        let mut points = Vec::with_capacity(want);
        while points.len() < want {
            let is_data = matches!(self.lines.peek(), Some((_, l)) if !l.starts_with("TRACE") && !l.starts_with('#'));
            if !is_data {
                let line = self.last_line + 1;
                return Err(MeasurementError::Truncated { line, trace: label, got: points.len(), want });
            }
            let (line, text) = self.next_line().expect("peeked");
            let p = data_line(line, label, text)?;
            if let Some(prev) = points.last() {
                let prev: &SweepPoint = prev;
                if p.frequency <= prev.frequency {
                    return Err(MeasurementError::NonMonotone { line, trace: label });
                }
            }
            points.push(p);
        }
        Ok(SweepTrace { label, points })
    }
}

fn trace_label(line: usize, text: &str) -> Result<TraceLabel, MeasurementError> {
    let unexpected = || MeasurementError::Unexpected { line, content: text.to_owned() };
    let rest = text.strip_prefix("TRACE ").ok_or_else(unexpected)?;
    if rest == "noise" {
        return Ok(TraceLabel::Noise);
    }
    let (tx, rx) = rest.split_once(' ').ok_or_else(unexpected)?;
    let tx = tx.strip_prefix("tx=").and_then(|v| v.parse().ok()).ok_or_else(unexpected)?;
    let rx = rx.strip_prefix("rx=").and_then(|v| v.parse().ok()).ok_or_else(unexpected)?;
    Ok(TraceLabel::Pair(Pair::new(tx, rx)))
}

fn data_line(line: usize, trace: TraceLabel, text: &str) -> Result<SweepPoint, MeasurementError> {
    let bad = |reason: String| MeasurementError::DataLine { line, trace, reason };
    let tok: Vec<&str> = text.split(' ').collect();
    if tok.len() != 3 {
        return Err(bad(format!("expected 3 space-separated fields, got {}", tok.len())));
    }
    let num = |t: &str, what: &str| -> Result<f64, MeasurementError> {
        t.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or_else(|| bad(format!("{what} is not a finite number: {t:?}")))
    };
    Ok(SweepPoint {
        frequency: num(tok[0], "frequency")?,
        magnitude_db: num(tok[1], "magnitude")?,
        phase_deg: num(tok[2], "phase")?,
    })
}

fn power_db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// Mean noise power over `[lo, hi]` Hz, averaged in the linear domain and
/// reported in dB.
pub fn noise_floor(sweep: &MeasurementSweep, band: (f64, f64)) -> Result<f64, MeasurementError> {
    let noise = sweep.noise().ok_or(MeasurementError::MissingNoise)?;
    let (lo, hi) = band;
    let (sum, count) = noise
        .points
        .iter()
        .filter(|p| p.frequency >= lo && p.frequency <= hi)
        .fold((0.0, 0usize), |(s, c), p| (s + p.power(), c + 1));
    if count == 0 {
        return Err(MeasurementError::EmptyBand { lo, hi });
    }
    Ok(power_db(sum / count as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrEstimate {
    /// Grid frequency actually used.
    pub frequency: f64,
    pub signal_power_db: f64,
    pub noise_power_db: f64,
    pub snr_db: f64,
}

impl SnrEstimate {
    fn new(frequency: f64, signal_power_db: f64, noise_power_db: f64) -> Self {
        Self { frequency, signal_power_db, noise_power_db, snr_db: signal_power_db - noise_power_db }
    }
}

/// SNR of one pair against the shared noise trace at the nearest grid point.
pub fn snr_estimate(sweep: &MeasurementSweep, pair: Pair, frequency: f64) -> Result<SnrEstimate, MeasurementError> {
    let noise = sweep.noise().ok_or(MeasurementError::MissingNoise)?;
    let trace = sweep.trace(pair).ok_or(MeasurementError::MissingPair(pair))?;
    let k = sweep.grid_index(frequency)?;
    let p = &trace.points[k];
    Ok(SnrEstimate::new(p.frequency, p.magnitude_db, noise.points[k].magnitude_db))
}

/// Array-level SNR: mean power over all pairs against the noise trace. This
/// is the per-entry ρ that matches a Frobenius-normalized channel.
pub fn array_snr_estimate(sweep: &MeasurementSweep, frequency: f64) -> Result<SnrEstimate, MeasurementError> {
    let noise = sweep.noise().ok_or(MeasurementError::MissingNoise)?;
    let k = sweep.grid_index(frequency)?;
    let mean = sweep.traces().iter().map(|t| t.points[k].power()).sum::<f64>() / sweep.traces().len() as f64;
    Ok(SnrEstimate::new(sweep.traces()[0].points[k].frequency, power_db(mean), noise.points[k].magnitude_db))
}

/// Channel matrix from the pair traces at the nearest grid point.
pub fn channel_from_sweeps(sweep: &MeasurementSweep, frequency: f64) -> Result<ChannelMatrix, MeasurementError> {
    let k = sweep.grid_index(frequency)?;
    let n = sweep.n();
    let entries = ComplexMatrix::from_fn(n, |i, j| sweep.traces()[i * n + j].points[k].value());
    let carrier = Carrier::from_frequency(sweep.traces()[0].points[k].frequency)?;
    Ok(ChannelMatrix::new(entries, ChannelModel::Measured, Some(carrier))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SnrPolicy {
    Fixed(Snr),
    FromNoiseFloor,
}

impl SnrPolicy {
    pub fn as_str(&self) -> &'static str {
        match self {
            SnrPolicy::Fixed(_) => "fixed",
            SnrPolicy::FromNoiseFloor => "noise_floor",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasuredCapacity {
    /// Grid frequency actually used.
    pub frequency: f64,
    pub policy: SnrPolicy,
    /// Present when the SNR came from the noise trace.
    pub snr_estimate: Option<SnrEstimate>,
    pub result: CapacityResult,
}

/// Measured channel → Frobenius normalization → capacity.
pub fn measured_capacity(
    sweep: &MeasurementSweep,
    frequency: f64,
    policy: SnrPolicy,
) -> Result<MeasuredCapacity, MeasurementError> {
    let h = channel_from_sweeps(sweep, frequency)?;
    let (snr, snr_estimate) = match policy {
        SnrPolicy::Fixed(snr) => (snr, None),
        SnrPolicy::FromNoiseFloor => {
            let est = array_snr_estimate(sweep, frequency)?;
            (Snr::from_db(est.snr_db)?, Some(est))
        }
    };
    let result = capacity(&h, snr, Normalization::Frobenius)?;
    let frequency = h.carrier().map(Carrier::frequency).unwrap_or(frequency);
    Ok(MeasuredCapacity { frequency, policy, snr_estimate, result })
}
