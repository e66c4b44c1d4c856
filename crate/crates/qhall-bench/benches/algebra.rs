use criterion::{criterion_group, criterion_main, Criterion};
use qhall::canonbasis::dual_canonical_basis;
use qhall::double::basis::DoubleBasis;
use qhall::double::{parse_word, DoubleAlgebra};
use qhall::ihall::SplitRankOne;
use qhall::{HallAlgebra, QuiverShape};
use std::hint::black_box;

fn hall(c: &mut Criterion) {
    c.bench_function("dual canonical A3 (1,2,1)", |b| {
        b.iter(|| {
            let h = HallAlgebra::new(QuiverShape::new(3, vec![(0, 1), (2, 1)]).unwrap());
            black_box(dual_canonical_basis(&h, &[1, 2, 1]).unwrap())
        })
    });
}

fn double(c: &mut Criterion) {
    let word = parse_word("F1 F2 E1 E2 K1 F1 E2 E1", 2).unwrap();
    c.bench_function("normal form A2 length 8", |b| {
        b.iter(|| {
            let d = DoubleAlgebra::new(QuiverShape::linear_a(2));
            black_box(d.normal_form(&word).unwrap())
        })
    });
    c.bench_function("sl2 double basis window 4", |b| {
        b.iter(|| {
            let d = DoubleAlgebra::new(QuiverShape::linear_a(1));
            black_box(DoubleBasis::new(&d).window(4).unwrap())
        })
    });
}

fn ihall(c: &mut Criterion) {
    let mut g = c.benchmark_group("split rank one");
    g.sample_size(10);
    g.bench_function("dual window 4", |b| {
        b.iter(|| {
            let r = SplitRankOne::new();
            black_box(r.dual_window(4).unwrap())
        })
    });
    g.finish();
}

criterion_group!(benches, hall, double, ihall);
criterion_main!(benches);
