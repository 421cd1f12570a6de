#![allow(clippy::neg_cmp_op_on_partial_ord)]

//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use losmimo::capacity::{eigen_capacity, gram_eigenvalues, log_det_capacity};
use losmimo::fixture::{generate, FixtureSpec};
use losmimo::measurement::{array_snr_estimate, SnrPolicy};
use losmimo::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn losmimo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_losmimo")).args(args).output().expect("spawn losmimo")
}

fn stdout(out: &Output) -> Result<String, String> {
    if !out.status.success() {
        return Err(format!("exit {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

/// Data rows of a CSV with `#` provenance lines, keyed by header name.
fn csv_rows(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let header: Vec<String> = lines.next().unwrap_or("").split(',').map(String::from).collect();
    lines.map(|l| header.iter().cloned().zip(l.split(',').map(String::from)).collect()).collect()
}

fn field(row: &[(String, String)], key: &str) -> Result<f64, String> {
    let raw = row.iter().find(|(k, _)| k == key).ok_or_else(|| format!("missing column {key}"))?;
    raw.1.parse().map_err(|_| format!("bad {key}: {}", raw.1))
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// log2 det(I + (ρ/2)·A·A†) for 2×2 A, expanded by hand.
fn oracle_capacity_2x2(a: &ComplexMatrix, rho: f64) -> f64 {
    let r = rho / 2.0;
    let row = |i: usize| [a[(i, 0)], a[(i, 1)]];
    let (r0, r1) = (row(0), row(1));
    let g00 = r0[0].norm_sqr() + r0[1].norm_sqr();
    let g11 = r1[0].norm_sqr() + r1[1].norm_sqr();
    let g01 = r0[0] * r1[0].conj() + r0[1] * r1[1].conj();
    ((1.0 + r * g00) * (1.0 + r * g11) - r * r * g01.norm_sqr()).log2()
}

fn wavelength(f: f64) -> f64 {
    299_792_458.0 / f
}

fn criterion_1() -> Check {
    let table = [("340GHz", 0.939), ("410GHz", 0.855), ("460GHz", 0.807)];
    let mut got = Vec::new();
    for (f, want_cm) in table {
        let out = stdout(&losmimo(&["design", "spacing", "-d", "0.20", "-f", f, "-p", "0"]))?;
        let rows = csv_rows(&out);
        let row = rows.iter().find(|r| r.iter().any(|(k, v)| k == "method" && v == "closed_form")).ok_or("no closed_form row")?;
        let cm = field(row, "spacing_m")? * 100.0;
        ensure!((cm - want_cm).abs() <= 0.0005, "{f}: {cm:.6} cm vs {want_cm} cm");
        got.push(format!("{f}={cm:.4}cm"));
    }
    Ok(got.join(" "))
}

fn criterion_2() -> Check {
    let f = 340e9;
    let lambda = wavelength(f);
    let points = 2000;
    let mut spec = SweepSpec::distance(5.0 * lambda, 100.0 * lambda, Grid::Count(points), f, 5.0 * lambda, Snr::from_db(0.0).unwrap());
    spec.path = PathModel::Paraxial;
    let started = Instant::now();
    let result = run_sweep(&spec).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "sweep took {elapsed:?}");
    ensure!(result.rows.len() == points, "{} rows", result.rows.len());

    let caps: Vec<f64> = result.rows.iter().map(|r| r.capacity_bps_hz).collect();
    let (lo, hi) = (3f64.log2() - 0.01, 2.0 + 1e-6);
    for (r, c) in result.rows.iter().zip(&caps) {
        ensure!((lo..=hi).contains(c), "capacity {c} at d={}λ outside [{lo}, {hi}]", r.abscissa / lambda);
    }
    let step = 95.0 * lambda / (points - 1) as f64;
    let peaks: Vec<usize> = (1..caps.len() - 1).filter(|&i| caps[i] >= caps[i - 1] && caps[i] > caps[i + 1]).collect();
    let mut found = Vec::new();
    for want in [50.0, 50.0 / 3.0, 10.0] {
        let i = *peaks
            .iter()
            .min_by(|a, b| (result.rows[**a].abscissa - want * lambda).abs().total_cmp(&(result.rows[**b].abscissa - want * lambda).abs()))
            .ok_or("no local maxima")?;
        let d = result.rows[i].abscissa;
        ensure!((d - want * lambda).abs() <= step, "nearest maximum to {want:.4}λ is at {:.4}λ", d / lambda);
        ensure!((caps[i] - 2.0).abs() <= 0.001, "capacity {} at {:.4}λ", caps[i], d / lambda);
        found.push(format!("{:.3}λ:{:.4}", d / lambda, caps[i]));
    }
    Ok(format!("maxima {} in {elapsed:.1?}", found.join(" ")))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x105_3100);
    let started = Instant::now();
    let mut worst = 0f64;
    for k in 0..2000 {
        let entries: Vec<Complex64> = (0..4)
            .map(|_| {
                if k < 1000 {
                    Complex64::from_polar(1.0, rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI))
                } else {
                    Complex64::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0))
                }
            })
            .collect();
        let rho = 10f64.powf(rng.gen_range(-2.0..3.0));
        let h = ChannelMatrix::measured(entries).map_err(|e| e.to_string())?;
        let g = h.gram();
        let det = log_det_capacity(&g, rho);
        let eig = eigen_capacity(&gram_eigenvalues(&g).map_err(|e| e.to_string())?, rho);
        let cf = capacity_2x2_closed_form(&h, Snr::from_linear(rho).unwrap()).map_err(|e| e.to_string())?;
        for (a, b) in [(det, eig), (det, cf), (eig, cf)] {
            let rel = (a - b).abs() / a.abs().max(b.abs());
            worst = worst.max(rel);
            ensure!(rel <= 1e-9, "sample {k}: {det} / {eig} / {cf}");
        }
    }
    let elapsed = started.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    Ok(format!("2000 matrices, worst relative gap {worst:.1e}, {elapsed:.1?}"))
}

fn criterion_4() -> Check {
    let carrier = Carrier::from_frequency(340e9).unwrap();
    let lambda = carrier.wavelength();
    let d = 0.20;
    let mut worst_defect = 0f64;
    let mut worst_gap = 0f64;
    for p in 0..=4u32 {
        let delta = (2 * p + 1) as f64 * lambda / 4.0;
        let dm = DistanceMatrix::from_entries(2, vec![d, d + delta, d + delta, d]).map_err(|e| e.to_string())?;
        let h = los_channel(&dm, &carrier, LosModel::PhaseOnly);
        for rho in [0.5, 1.0, 10.0] {
            let r = capacity(&h, Snr::from_linear(rho).unwrap(), Normalization::None).map_err(|e| e.to_string())?;
            let gap = (r.bps_per_hz - 2.0 * (1.0 + rho).log2()).abs();
            ensure!(r.orthogonality_defect < 1e-9, "p={p}: defect {}", r.orthogonality_defect);
            ensure!(gap <= 1e-9, "p={p} rho={rho}: capacity {}", r.bps_per_hz);
            worst_defect = worst_defect.max(r.orthogonality_defect);
            worst_gap = worst_gap.max(gap);
        }
    }
    Ok(format!("p=0..4, worst defect {worst_defect:.1e}, worst capacity gap {worst_gap:.1e}"))
}

fn fixture_via_cli(dir: &Path, name: &str, h: &str, snr_db: f64, level_db: f64) -> Result<std::path::PathBuf, String> {
    let path = dir.join(name);
    let args = [
        "fixture", "generate", "--h", h, "--start", "330GHz", "--stop", "350GHz", "--points", "201",
        "--snr-db", &snr_db.to_string(), "--level-db", &level_db.to_string(), "-o", path.to_str().unwrap(),
    ];
    stdout(&losmimo(&args))?;
    Ok(path)
}

fn criterion_5() -> Check {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let f = 340e9;

    // Hadamard channel with a 30.83 dB noise trace at 340 GHz.
    let path = fixture_via_cli(dir.path(), "hadamard.thz", "1,1;1,-1", 30.83, 0.0)?;
    let bytes = std::fs::read(&path).map_err(|e| e.to_string())?;
    let sweep = MeasurementSweep::parse(&bytes).map_err(|e| e.to_string())?;
    ensure!(sweep.to_canonical_string().as_bytes() == bytes.as_slice(), "round trip not byte-identical");
    let h = channel_from_sweeps(&sweep, f).map_err(|e| e.to_string())?;
    let want = [1.0, 1.0, 1.0, -1.0];
    for (k, w) in want.iter().enumerate() {
        let z = h.get(k / 2, k % 2);
        ensure!(z == Complex64::new(*w, 0.0), "entry {k}: {z}");
    }
    let est = array_snr_estimate(&sweep, f).map_err(|e| e.to_string())?;
    ensure!((est.snr_db - 30.83).abs() <= 0.01, "snr {}", est.snr_db);
    let out = stdout(&losmimo(&["measure", "capacity", path.to_str().unwrap(), "-f", "340GHz", "--snr-from-noise"]))?;
    let cli_cap = field(&csv_rows(&out)[0], "capacity_bps_hz")?;
    let oracle = oracle_capacity_2x2(&ComplexMatrix::from_rows(&[[1.0.into(), 1.0.into()], [1.0.into(), (-1.0).into()]]).unwrap(), 10f64.powf(3.083));
    ensure!((cli_cap - oracle).abs() <= 1e-6, "cli capacity {cli_cap} vs oracle {oracle}");
    let out = stdout(&losmimo(&["measure", "snr", path.to_str().unwrap(), "-f", "340GHz", "--pair", "2,2"]))?;
    let pair_snr = field(&csv_rows(&out)[0], "snr_db")?;
    ensure!((pair_snr - 30.83).abs() <= 0.01, "pair snr {pair_snr}");

    // Generic channels at assorted levels and SNRs.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for k in 0..20 {
        let entries: Vec<Complex64> = (0..4)
            .map(|_| Complex64::from_polar(rng.gen_range(0.05..2.0), rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI)))
            .collect();
        let m = ComplexMatrix::from_row_major(entries).unwrap();
        let snr_db = rng.gen_range(-5.0..45.0);
        let level = rng.gen_range(-70.0..0.0);
        let spec = FixtureSpec::new(m.clone(), 330e9, 350e9, 101).snr_db(snr_db).level_db(level);
        let generated = generate(&spec).map_err(|e| e.to_string())?;
        let text = generated.to_canonical_string();
        let parsed = MeasurementSweep::parse(text.as_bytes()).map_err(|e| e.to_string())?;
        ensure!(parsed.to_canonical_string() == text, "fixture {k}: round trip differs");
        let a = channel_from_sweeps(&generated, f).map_err(|e| e.to_string())?;
        let b = channel_from_sweeps(&parsed, f).map_err(|e| e.to_string())?;
        ensure!(a.entries() == b.entries(), "fixture {k}: parsed H differs");
        let scale = 10f64.powf(level / 20.0);
        for (x, y) in b.entries().as_slice().iter().zip(m.as_slice()) {
            ensure!((x - y * scale).norm() <= 1e-12 * scale, "fixture {k}: {x} vs {}", y * scale);
        }
        let est = array_snr_estimate(&parsed, f).map_err(|e| e.to_string())?;
        ensure!((est.snr_db - snr_db).abs() <= 0.01, "fixture {k}: snr {} vs {snr_db}", est.snr_db);
        let got = measured_capacity(&parsed, f, SnrPolicy::FromNoiseFloor).map_err(|e| e.to_string())?;
        let unit = m.scale_real(2.0 / m.frobenius_norm());
        let oracle = oracle_capacity_2x2(&unit, 10f64.powf(snr_db / 10.0));
        ensure!((got.result.bps_per_hz - oracle).abs() <= 1e-6, "fixture {k}: {} vs oracle {oracle}", got.result.bps_per_hz);
    }

    // Error handling at the command line.
    let missing = losmimo(&["measure", "capacity", path.to_str().unwrap(), "--snr-db", "10"]);
    ensure!(missing.status.code() == Some(2), "missing flag exit {:?}", missing.status.code());
    let truncated = dir.path().join("truncated.thz");
    let cut = bytes.len() / 3;
    std::fs::write(&truncated, &bytes[..cut]).map_err(|e| e.to_string())?;
    let bad = losmimo(&["measure", "capacity", truncated.to_str().unwrap(), "-f", "340GHz", "--snr-db", "10"]);
    let err = String::from_utf8_lossy(&bad.stderr);
    ensure!(bad.status.code() == Some(1), "truncated file exit {:?}", bad.status.code());
    ensure!(err.contains("truncated.thz") && err.contains("line "), "error lacks file/line: {err}");

    Ok("hadamard 30.83 dB + 20 random fixtures; exit codes 2/1".into())
}

fn criterion_6() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let carrier = Carrier::from_frequency(340e9).unwrap();
    let snr = |rho: f64| Snr::from_linear(rho).unwrap();
    let random_matrix = |rng: &mut ChaCha8Rng, n: usize| {
        ComplexMatrix::from_fn(n, |_, _| Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0)))
    };
    let cap = |h: &ChannelMatrix, rho: f64, norm| capacity(h, snr(rho), norm).map(|r| r.bps_per_hz).map_err(|e| e.to_string());
    let samples = 300;

    for _ in 0..samples {
        let n = rng.gen_range(1..=4);
        let h = ChannelMatrix::measured(random_matrix(&mut rng, n).as_slice().to_vec()).unwrap();
        let nf = n as f64;

        let (r1, r2) = (rng.gen_range(0.0..50.0), rng.gen_range(50.0..100.0));
        ensure!(cap(&h, r1, Normalization::None)? <= cap(&h, r2, Normalization::None)?, "monotonicity");

        let rho = rng.gen_range(0.01..100.0);
        ensure!(cap(&h, rho, Normalization::Frobenius)? >= (1.0 + nf * rho).log2() - 1e-9, "lower bound");

        let phases = ComplexMatrix::from_fn(n, |_, _| Complex64::from_polar(1.0, rng.gen_range(-3.2..3.2)));
        let po = ChannelMatrix::new(phases, ChannelModel::PhaseOnly, None).unwrap();
        ensure!(cap(&po, rho, Normalization::None)? <= nf * (1.0 + rho).log2() + 1e-9, "upper bound");

        let a = h.gram().hermitian_eigenvalues();
        let b = h.reversed().gram().hermitian_eigenvalues();
        for (x, y) in a.iter().zip(&b) {
            ensure!((x - y).abs() <= 1e-9 * a[0].max(1.0), "reciprocity {a:?} vs {b:?}");
        }

        let c = Complex64::from_polar(rng.gen_range(0.1..3.0), rng.gen_range(-3.2..3.2));
        let lhs = cap(&h.scaled(c).unwrap(), rho, Normalization::None)?;
        let rhs = cap(&h, c.norm_sqr() * rho, Normalization::None)?;
        ensure!(rel_close(lhs, rhs, 1e-9), "scalar scaling {lhs} vs {rhs}");
    }

    for _ in 0..samples {
        let n = rng.gen_range(1..=4);
        let s = rng.gen_range(1e-3..0.02);
        let sep = rng.gen_range(0.05..1.0);
        let link = build_parallel_ulas(n, s, sep).unwrap();
        let d = link.distance_matrix();

        let rot = Rotation3::about_x(rng.gen_range(-3.2..3.2))
            .then(&Rotation3::about_y(rng.gen_range(-3.2..3.2)))
            .then(&Rotation3::about_z(rng.gen_range(-3.2..3.2)));
        let shift = Point3::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)).unwrap();
        let moved = link.transform(&rot, shift).unwrap().distance_matrix();
        for (x, y) in d.entries().iter().zip(moved.entries()) {
            ensure!((x - y).abs() <= 1e-12, "rigid transform {x} vs {y}");
        }

        let g0 = los_channel(&d, &carrier, LosModel::PhaseOnly).gram();
        let g1 = los_channel(&d.offset(rng.gen_range(0.0..0.01)).unwrap(), &carrier, LosModel::PhaseOnly).gram();
        for (x, y) in g0.as_slice().iter().zip(g1.as_slice()) {
            ensure!((x - y).norm() <= 1e-9 * g0.frobenius_norm(), "global phase");
        }
    }

    let lambda = carrier.wavelength();
    for _ in 0..samples {
        let p = rng.gen_range(0..=4u32);
        let delta = (2 * p + 1) as f64 * lambda / 4.0;
        let d = rng.gen_range(0.05..1.0);
        let dm = DistanceMatrix::from_entries(2, vec![d, d + delta, d + delta, d]).unwrap();
        let h = los_channel(&dm, &carrier, LosModel::PhaseOnly);
        let mut g = || rng.gen_range(0.1..10.0);
        let gains = GainProfile::new(vec![g(), g()], vec![g(), g()]).unwrap();
        if gains.tx()[0] == gains.tx()[1] && gains.rx()[0] == gains.rx()[1] {
            continue;
        }
        let base = cap(&h, 1.0, Normalization::Frobenius)?;
        let skewed = cap(&apply_gains(&h, &gains).unwrap(), 1.0, Normalization::Frobenius)?;
        ensure!(skewed < base, "gain asymmetry {skewed} !< {base} for {gains:?}");
    }

    Ok(format!("{samples} samples each: monotonicity, bounds, rigid/global-phase invariance, reciprocity, scaling, gain asymmetry"))
}

fn criterion_7() -> Check {
    let out = stdout(&losmimo(&["design", "spacing", "-d", "0.20", "-f", "340GHz"]))?;
    let spacing = field(&csv_rows(&out)[0], "spacing_m")?;
    let at = |d: f64| -> Result<f64, String> {
        let args = [
            "theory", "capacity", "-f", "340GHz", "-s", &spacing.to_string(), "-d", &d.to_string(),
            "--model", "amplitude", "--norm", "none", "--snr-db", "0",
        ];
        field(&csv_rows(&stdout(&losmimo(&args))?)[0], "capacity_bps_hz")
    };
    let (near, far) = (at(0.10)?, at(0.30)?);
    ensure!(far < near, "C(0.30 m) = {far} not below C(0.10 m) = {near}");
    Ok(format!("amplitude model, s={:.4} cm, 0 dB: C(0.10 m)={near:.4} > C(0.30 m)={far:.4}", spacing * 100.0))
}

fn main() {
    // `cargo test` passes harness flags; a name filter that matches no
    // criterion skips the suite.
    let args: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    if !args.is_empty() && !args.iter().any(|a| "acceptance criterion".contains(a.as_str())) {
        return;
    }
    let criteria: [Criterion; 7] = [
        ("1 spacing table", criterion_1),
        ("2 distance sweep maxima", criterion_2),
        ("3 capacity path equivalence", criterion_3),
        ("4 orthogonality condition", criterion_4),
        ("5 measurement pipeline", criterion_5),
        ("6 property suites", criterion_6),
        ("7 amplitude model distance trend", criterion_7),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS criterion {name}: {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {name}: {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", 7 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
