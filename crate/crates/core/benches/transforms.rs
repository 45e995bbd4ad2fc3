use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use parafourier::quadric::{enumerate_quadric, fourier_raw_with};
use parafourier::sampling::{random_function, rng};
use parafourier::sl3::{bk_transform_vec_with, sprime_basis, Sl3Space};
use parafourier::{CharacterContext, Execution, FieldSpec};

const MODES: [(&str, Execution); 2] = [("parallel", Execution::Parallel), ("sequential", Execution::Sequential)];

fn quadric_transform(c: &mut Criterion) {
    let mut group = c.benchmark_group("quadric_fourier_raw");
    group.sample_size(10);
    for (d, q) in [(2, 5), (3, 5)] {
        let ctx = CharacterContext::new(&FieldSpec::prime(q).unwrap());
        let set = enumerate_quadric(d, &ctx, 20_000).unwrap();
        let h = random_function(set.points(), q, &mut rng(0));
        let g = set.special_generator(1);
        for (name, exec) in MODES {
            group.bench_with_input(BenchmarkId::new(format!("{name}/dense"), format!("d{d}q{q}")), &h, |b, h| {
                b.iter(|| fourier_raw_with(&set, h, exec).unwrap())
            });
            group.bench_with_input(BenchmarkId::new(format!("{name}/sparse"), format!("d{d}q{q}")), &g, |b, g| {
                b.iter(|| fourier_raw_with(&set, g, exec).unwrap())
            });
        }
    }
    group.finish();
}

fn sl3_vector_slot(c: &mut Criterion) {
    let mut group = c.benchmark_group("sl3_bk_transform");
    group.sample_size(10);
    let field = FieldSpec::with_q(4, None).unwrap();
    let space = Sl3Space::new(&CharacterContext::new(&field), 20_000).unwrap();
    let basis = sprime_basis(&space);
    let f = &basis.functions[0];
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, "q4"), |b| {
            b.iter(|| bk_transform_vec_with(&space, f, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, quadric_transform, sl3_vector_slot);
criterion_main!(benches);
