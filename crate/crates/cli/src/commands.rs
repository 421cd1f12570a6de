use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::Context;
use losmimo::design::Method;
use losmimo::fixture::{self, FixtureSpec};
use losmimo::format::{fixed6, sig9};
use losmimo::measurement::{measured_capacity, snr_estimate, MeasurementSweep, Pair, SnrPolicy};
use losmimo::sweep::SweepError;
use losmimo::{
    optimal_distances, optimal_spacing, plot, refine_exact, run_sweep, Carrier, DesignSolution, GainProfile, Grid,
    LosModel, Normalization, PathModel, Snr, SweepSpec, SweepVariable, Vary,
};

use crate::units::{self, Length};
use crate::{
    DesignDistancesArgs, DesignSpacingArgs, FixtureArgs, LinkArgs, MeasureCapacityArgs, MeasureSnrArgs, ModelArg,
    NormArg, PathArg, TheoryCapacityArgs, TheorySweepArgs, VarArg,
};

pub enum Status {
    Clean,
    /// Output was written but some rows could not be evaluated.
    Flagged,
}

pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

type Outcome = Result<Status, Failure>;

fn usage(msg: impl Into<String>) -> Failure {
    Failure::Usage(msg.into())
}

fn emit(output: Option<&Path>, text: &str) -> Result<(), Failure> {
    match output {
        Some(path) => std::fs::write(path, text)
            .with_context(|| format!("cannot write {}", path.display()))
            .map_err(Failure::Runtime),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn carrier(hz: f64) -> Result<Carrier, Failure> {
    Carrier::from_frequency(hz).map_err(|e| usage(e.to_string()))
}

fn status_text(err: Option<&str>) -> String {
    match err {
        None => "ok".into(),
        Some(e) => format!("error: {}", e.replace(',', ";")),
    }
}

fn link_spec(link: &LinkArgs, variable: SweepVariable) -> Result<SweepSpec, Failure> {
    let c = carrier(link.frequency)?;
    let spacing = match (link.spacing, variable) {
        (Some(s), _) => s.resolve(&c),
        (None, SweepVariable::Spacing) => 0.0,
        (None, _) if link.elements == 1 => 0.0,
        (None, _) => return Err(usage("--spacing is required")),
    };
    let distance = match (link.distance, variable) {
        (Some(d), _) => d.resolve(&c),
        (None, SweepVariable::Distance) => 0.0,
        (None, _) => return Err(usage("--distance is required")),
    };
    let model = match link.model {
        ModelArg::Phase => LosModel::PhaseOnly,
        ModelArg::Amplitude => LosModel::AmplitudeWeighted,
    };
    let normalization = match link.norm {
        Some(NormArg::None) => Normalization::None,
        Some(NormArg::Frobenius) => Normalization::Frobenius,
        None => Normalization::default_for(model.into()),
    };
    let gains = match (&link.gains_tx, &link.gains_rx) {
        (None, None) => None,
        (tx, rx) => {
            let ones = vec![1.0; link.elements];
            let tx = tx.clone().unwrap_or_else(|| ones.clone());
            let rx = rx.clone().unwrap_or(ones);
            Some(GainProfile::new(tx, rx).map_err(|e| usage(e.to_string()))?)
        }
    };
    Ok(SweepSpec {
        variable,
        start: distance,
        stop: distance,
        grid: Grid::Count(2),
        n: link.elements,
        frequency_hz: link.frequency,
        spacing_m: spacing,
        distance_m: distance,
        snr: Snr::from_db(link.snr_db).map_err(|e| usage(e.to_string()))?,
        model,
        normalization,
        path: match link.path {
            PathArg::Exact => PathModel::Exact,
            PathArg::Paraxial => PathModel::Paraxial,
        },
        gains,
    })
}

pub fn theory_capacity(args: TheoryCapacityArgs) -> Outcome {
    let spec = link_spec(&args.link, SweepVariable::Snr)?;
    let row = spec.evaluate(spec.snr.db());
    if let Some(e) = &row.error {
        return Err(Failure::Runtime(anyhow::anyhow!("{e}")));
    }
    let mut out = String::from("# losmimo theory capacity\n");
    let _ = writeln!(out, "# model={} norm={} path={}", losmimo::sweep::model_name(spec.model), spec.normalization, spec.path.as_str());
    let mut header = "frequency_hz,spacing_m,distance_m,snr_db,capacity_bps_hz,orthogonality_defect".to_string();
    for i in 1..=spec.n {
        let _ = write!(header, ",eig_{i}");
    }
    let _ = writeln!(out, "{header}");
    let mut line = format!(
        "{},{},{},{},{},{}",
        sig9(spec.frequency_hz),
        sig9(spec.spacing_m),
        sig9(spec.distance_m),
        sig9(spec.snr.db()),
        fixed6(row.capacity_bps_hz),
        sig9(row.orthogonality_defect)
    );
    for e in &row.eigenvalues {
        let _ = write!(line, ",{}", sig9(*e));
    }
    let _ = writeln!(out, "{line}");
    emit(args.output.as_deref(), &out)?;
    Ok(Status::Clean)
}

fn sweep_value(var: SweepVariable, raw: &str, c: &Carrier) -> Result<f64, Failure> {
    match var {
        SweepVariable::Distance | SweepVariable::Spacing => Ok(units::length(raw).map_err(usage)?.resolve(c)),
        SweepVariable::Frequency => units::frequency(raw).map_err(usage),
        SweepVariable::Snr => units::decibels(raw).map_err(usage),
    }
}

pub fn theory_sweep(args: TheorySweepArgs) -> Outcome {
    let variable = match args.variable {
        VarArg::Distance => SweepVariable::Distance,
        VarArg::Spacing => SweepVariable::Spacing,
        VarArg::Frequency => SweepVariable::Frequency,
        VarArg::Snr => SweepVariable::Snr,
    };
    let mut spec = link_spec(&args.link, variable)?;
    let c = carrier(args.link.frequency)?;
    spec.start = sweep_value(variable, &args.start, &c)?;
    spec.stop = sweep_value(variable, &args.stop, &c)?;
    spec.grid = match (args.count, &args.step) {
        (Some(n), _) => Grid::Count(n),
        (None, Some(step)) => Grid::Step(sweep_value(variable, step, &c)?),
        (None, None) => return Err(usage("one of --count or --step is required")),
    };
    if variable == SweepVariable::Distance && args.link.distance.is_none() {
        spec.distance_m = spec.start;
    }
    if variable == SweepVariable::Spacing && args.link.spacing.is_none() {
        spec.spacing_m = spec.start;
    }
    let result = run_sweep(&spec).map_err(|e| match e {
        SweepError::Range(..) | SweepError::Step(_) | SweepError::Count(_) | SweepError::Parameter(_) => usage(e.to_string()),
        other => Failure::Runtime(other.into()),
    })?;
    emit(args.output.as_deref(), &result.to_csv())?;
    if let Some(path) = &args.plot {
        plot::emit_plot(&result, path).map_err(|e| Failure::Runtime(e.into()))?;
    }
    for row in result.flagged() {
        eprintln!("warning: {} = {}: {}", spec.variable.column(), row.abscissa, row.error.as_deref().unwrap_or(""));
    }
    Ok(if result.has_errors() { Status::Flagged } else { Status::Clean })
}

const DESIGN_HEADER: &str = "p,spacing_m,distance_m,wavelength_m,path_difference_m,residual_m,far_field_ok,method,status";

fn design_row(out: &mut String, s: &DesignSolution) {
    let _ = writeln!(
        out,
        "{},{},{},{},{},{},{},{},ok",
        s.p,
        sig9(s.spacing),
        sig9(s.distance),
        sig9(s.wavelength),
        sig9(s.path_difference),
        sig9(s.residual),
        s.far_field_ok(),
        s.method.as_str()
    );
}

fn design_table(title: &str, provenance: &[(&str, String)], seeds: Vec<DesignSolution>, refine: Option<(&Carrier, Vary)>) -> (String, bool) {
    let mut out = format!("# losmimo {title}\n");
    for (k, v) in provenance {
        let _ = writeln!(out, "# {k}={v}");
    }
    let _ = writeln!(out, "{DESIGN_HEADER}");
    let mut flagged = false;
    for seed in seeds {
        design_row(&mut out, &seed);
        if let Some((c, vary)) = refine {
            match refine_exact(&seed, c, vary) {
                Ok(r) => design_row(&mut out, &r),
                Err(e) => {
                    flagged = true;
                    let _ = writeln!(
                        out,
                        "{},NaN,NaN,{},NaN,NaN,false,{},{}",
                        seed.p,
                        sig9(seed.wavelength),
                        Method::Exact.as_str(),
                        status_text(Some(&e.to_string()))
                    );
                }
            }
        }
    }
    (out, flagged)
}

pub fn design_spacing(args: DesignSpacingArgs) -> Outcome {
    let c = carrier(args.frequency)?;
    let distance = args.distance.resolve(&c);
    let orders = match args.p_max {
        Some(pm) => 0..=pm,
        None => args.p..=args.p,
    };
    let seeds = orders
        .map(|p| optimal_spacing(distance, &c, p))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| usage(e.to_string()))?;
    let provenance = [("frequency_hz", c.frequency().to_string()), ("distance_m", distance.to_string())];
    let (out, flagged) = design_table("design spacing", &provenance, seeds, args.refine.then_some((&c, Vary::Spacing)));
    emit(args.output.as_deref(), &out)?;
    Ok(if flagged { Status::Flagged } else { Status::Clean })
}

pub fn design_distances(args: DesignDistancesArgs) -> Outcome {
    let c = carrier(args.frequency)?;
    let spacing = args.spacing.resolve(&c);
    let seeds = optimal_distances(spacing, &c, args.p_max).map_err(|e| usage(e.to_string()))?;
    let provenance = [("frequency_hz", c.frequency().to_string()), ("spacing_m", spacing.to_string())];
    let (out, flagged) = design_table("design distances", &provenance, seeds, args.refine.then_some((&c, Vary::Distance)));
    emit(args.output.as_deref(), &out)?;
    Ok(if flagged { Status::Flagged } else { Status::Clean })
}

fn load_sweep(path: &PathBuf) -> anyhow::Result<MeasurementSweep> {
    let bytes = std::fs::read(path).with_context(|| format!("cannot read {}", path.display()))?;
    MeasurementSweep::parse(&bytes).with_context(|| path.display().to_string())
}

pub fn measure_capacity(args: MeasureCapacityArgs) -> Outcome {
    let sweep = load_sweep(&args.file)?;
    let policy = match args.snr_db {
        Some(db) => SnrPolicy::Fixed(Snr::from_db(db).map_err(|e| usage(e.to_string()))?),
        None => SnrPolicy::FromNoiseFloor,
    };
    let mut out = String::from("# losmimo measure capacity\n");
    let _ = writeln!(out, "# file={}", args.file.display());
    let _ = writeln!(out, "# distance_m={}", sweep.distance());
    let _ = writeln!(out, "# snr_policy={}", policy.as_str());
    let mut header = "frequency_hz,capacity_bps_hz,snr_db,orthogonality_defect".to_string();
    for i in 1..=sweep.n() {
        let _ = write!(header, ",eig_{i}");
    }
    let _ = writeln!(out, "{header},diagnostics");
    for f in &args.frequency {
        let m = measured_capacity(&sweep, *f, policy).with_context(|| format!("{} at {f} Hz", args.file.display()))?;
        let r = &m.result;
        let mut line = format!(
            "{},{},{},{}",
            sig9(m.frequency),
            fixed6(r.bps_per_hz),
            fixed6(r.snr.db()),
            sig9(r.orthogonality_defect)
        );
        for e in &r.eigenvalues {
            let _ = write!(line, ",{}", sig9(*e));
        }
        let _ = writeln!(
            out,
            "{line},snr_policy={};norm={};scale={}",
            policy.as_str(),
            r.normalization,
            sig9(r.scale)
        );
    }
    emit(args.output.as_deref(), &out)?;
    Ok(Status::Clean)
}

pub fn measure_snr(args: MeasureSnrArgs) -> Outcome {
    let sweep = load_sweep(&args.file)?;
    let pairs: Vec<Pair> = match args.pair {
        Some((tx, rx)) => vec![Pair::new(tx, rx)],
        None => (1..=sweep.n()).flat_map(|tx| (1..=sweep.n()).map(move |rx| Pair::new(tx, rx))).collect(),
    };
    let mut out = String::from("# losmimo measure snr\n");
    let _ = writeln!(out, "# file={}", args.file.display());
    let _ = writeln!(out, "frequency_hz,tx,rx,signal_power_db,noise_power_db,snr_db");
    for f in &args.frequency {
        for pair in &pairs {
            let e = snr_estimate(&sweep, *pair, *f).with_context(|| format!("{} at {f} Hz", args.file.display()))?;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                sig9(e.frequency),
                pair.tx,
                pair.rx,
                fixed6(e.signal_power_db),
                fixed6(e.noise_power_db),
                fixed6(e.snr_db)
            );
        }
    }
    emit(args.output.as_deref(), &out)?;
    Ok(Status::Clean)
}

pub fn fixture_generate(args: FixtureArgs) -> Outcome {
    let h = units::complex_matrix(&args.matrix).map_err(usage)?;
    let distance = match args.distance {
        Length::Meters(m) => m,
        Length::Wavelengths(w) => w * carrier(args.start)?.wavelength(),
    };
    let mut spec = FixtureSpec::new(h, args.start, args.stop, args.points).level_db(args.level_db).distance_m(distance);
    spec.snr_db = args.snr_db;
    let sweep = fixture::generate(&spec).map_err(|e| usage(e.to_string()))?;
    emit(args.output.as_deref(), &sweep.to_canonical_string())?;
    Ok(Status::Clean)
}
