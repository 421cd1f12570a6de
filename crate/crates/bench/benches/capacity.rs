use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use losmimo::{build_parallel_ulas, capacity, capacity_2x2_closed_form, los_channel, Carrier, LosModel, Normalization, Snr};

fn bench_capacity(c: &mut Criterion) {
    let carrier = Carrier::from_frequency(340e9).unwrap();
    let snr = Snr::from_db(10.0).unwrap();
    for n in [2, 8] {
        let link = build_parallel_ulas(n, 5.0 * carrier.wavelength(), 0.2).unwrap();
        let h = los_channel(&link.distance_matrix(), &carrier, LosModel::AmplitudeWeighted);
        c.bench_function(&format!("capacity {n}x{n} frobenius"), |b| {
            b.iter(|| capacity(black_box(&h), snr, Normalization::Frobenius).unwrap())
        });
        if n == 2 {
            c.bench_function("capacity 2x2 closed form", |b| b.iter(|| capacity_2x2_closed_form(black_box(&h), snr).unwrap()));
        }
    }
}

criterion_group!(benches, bench_capacity);
criterion_main!(benches);
