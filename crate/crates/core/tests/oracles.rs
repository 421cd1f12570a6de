mod common;

use common::{oracle_capacity, rel_close};
use losmimo::sweep::run_sweep_serial;
use losmimo::*;

const C0: f64 = 299_792_458.0;

/// 2×2 phase-only channel from explicit path lengths.
fn oracle_channel(d11: f64, d12: f64, lambda: f64) -> ComplexMatrix {
    let phasor = |d: f64| Complex64::from_polar(1.0, -2.0 * std::f64::consts::PI * d / lambda);
    ComplexMatrix::from_rows(&[[phasor(d11), phasor(d12)], [phasor(d12), phasor(d11)]]).unwrap()
}

fn exact_capacity(s: f64, d: f64, lambda: f64, rho: f64) -> f64 {
    oracle_capacity(&oracle_channel(d, (d * d + s * s).sqrt(), lambda), rho)
}

fn paraxial_capacity(s: f64, d: f64, lambda: f64, rho: f64) -> f64 {
    oracle_capacity(&oracle_channel(d, d + s * s / (2.0 * d), lambda), rho)
}

fn local_maxima(ys: &[f64]) -> Vec<usize> {
    (1..ys.len() - 1).filter(|&i| ys[i] >= ys[i - 1] && ys[i] > ys[i + 1]).collect()
}

#[test]
fn brute_force_spacing_matches_refined_root() {
    let f = 410e9;
    let lambda = C0 / f;
    let carrier = Carrier::from_frequency(f).unwrap();
    let seed = optimal_spacing(0.20, &carrier, 1).unwrap();
    let refined = refine_exact(&seed, &carrier, Vary::Spacing).unwrap();

    let (lo, hi, n) = (0.012, 0.017, 50_001);
    let step = (hi - lo) / (n - 1) as f64;
    let best = (0..n)
        .map(|k| lo + k as f64 * step)
        .max_by(|a, b| exact_capacity(*a, 0.20, lambda, 1.0).total_cmp(&exact_capacity(*b, 0.20, lambda, 1.0)))
        .unwrap();
    assert!((best - refined.spacing).abs() <= step, "brute {best} refined {}", refined.spacing);
    assert!((exact_capacity(best, 0.20, lambda, 1.0) - 2.0).abs() < 1e-6);
    // The closed form misses the exact optimum by more than the scan step.
    assert!((seed.spacing - refined.spacing).abs() > step);
}

#[test]
fn sweep_rows_match_oracle() {
    let f = 340e9;
    let lambda = C0 / f;
    for path in [PathModel::Exact, PathModel::Paraxial] {
        let mut spec = SweepSpec::distance(5.0 * lambda, 100.0 * lambda, Grid::Count(400), f, 5.0 * lambda, Snr::from_db(0.0).unwrap());
        spec.path = path;
        let result = run_sweep_serial(&spec).unwrap();
        for row in &result.rows {
            let want = match path {
                PathModel::Exact => exact_capacity(spec.spacing_m, row.abscissa, lambda, 1.0),
                PathModel::Paraxial => paraxial_capacity(spec.spacing_m, row.abscissa, lambda, 1.0),
            };
            assert!(rel_close(row.capacity_bps_hz, want, 1e-9), "{path:?} d={} {} vs {want}", row.abscissa, row.capacity_bps_hz);
        }
    }
}

#[test]
fn brute_force_distance_maxima() {
    let f = 340e9;
    let lambda = C0 / f;
    let s = 5.0 * lambda;
    let n = 2000;
    let step = 95.0 * lambda / (n - 1) as f64;
    let ds: Vec<f64> = (0..n).map(|k| 5.0 * lambda + k as f64 * step).collect();

    let para: Vec<f64> = ds.iter().map(|&d| paraxial_capacity(s, d, lambda, 1.0)).collect();
    let peaks = local_maxima(&para);
    let found: Vec<f64> = peaks.iter().map(|&i| ds[i]).collect();
    // Every peak is some d = 2s²/((2p+1)λ).
    for d in &found {
        let order = (2.0 * s * s / (d * lambda) - 1.0) / 2.0;
        let p = order.round();
        assert!((d - 2.0 * s * s / ((2.0 * p + 1.0) * lambda)).abs() <= step, "stray peak at {}λ", d / lambda);
    }
    for want in [50.0, 50.0 / 3.0, 10.0] {
        assert!(found.iter().any(|d| (d - want * lambda).abs() <= step), "no peak near {want}λ");
    }

    let exact: Vec<f64> = ds.iter().map(|&d| exact_capacity(s, d, lambda, 1.0)).collect();
    let carrier = Carrier::from_frequency(f).unwrap();
    let roots: Vec<f64> = optimal_distances(s, &carrier, 2)
        .unwrap()
        .iter()
        .map(|sol| refine_exact(sol, &carrier, Vary::Distance).unwrap().distance)
        .collect();
    let peaks: Vec<f64> = local_maxima(&exact).iter().map(|&i| ds[i]).collect();
    for root in roots {
        assert!(peaks.iter().any(|p| (p - root).abs() <= step), "no peak near {}", root / lambda);
    }
}
