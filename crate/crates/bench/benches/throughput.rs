use criterion::{criterion_group, criterion_main, BatchSize, Criterion, Throughput};
use edchaos::{
    bundled, sample_demands, smolyak_grid, CommitmentSchedule, DispatchModel, SurrogateBuilder,
};
use std::hint::black_box;

fn dispatch(c: &mut Criterion) {
    let mut g = c.benchmark_group("dispatch");
    for (name, case) in [("case6", bundled::case6()), ("case24", bundled::case24())] {
        let x = CommitmentSchedule::all_on(case.n_generators(), case.n_periods());
        let model = DispatchModel::new(&case, &x).unwrap();
        let demands = sample_demands(&case.loads, 64, 1);
        let mut i = 0;
        g.bench_function(format!("{name}/solve"), |b| {
            b.iter(|| {
                i = (i + 1) % demands.len();
                black_box(model.solve(&demands[i]).unwrap().total)
            })
        });
        g.bench_function(format!("{name}/full_lp"), |b| {
            b.iter(|| {
                i = (i + 1) % demands.len();
                black_box(model.solve_full(&demands[i]).unwrap().total)
            })
        });
    }
    g.finish();
}

fn surrogate_eval(c: &mut Criterion) {
    let case = bundled::case24();
    let x = CommitmentSchedule::all_on(10, 24);
    let pce = SurrogateBuilder::new(&case, &x).unwrap().build(2, 2).unwrap();
    let demands = sample_demands(&case.loads, 1024, 2);
    let mut g = c.benchmark_group("surrogate");
    g.throughput(Throughput::Elements(demands.len() as u64));
    g.bench_function("case24_order2_eval", |b| {
        b.iter(|| demands.iter().map(|d| pce.surrogate_eval(d).unwrap()).sum::<f64>())
    });
    g.finish();
}

fn grids(c: &mut Criterion) {
    let mut g = c.benchmark_group("grid");
    for (dim, level) in [(6, 3), (6, 5), (24, 2)] {
        g.bench_function(format!("smolyak_{dim}_{level}"), |b| {
            b.iter(|| black_box(smolyak_grid(dim, level).unwrap().len()))
        });
    }
    g.finish();
}

fn build(c: &mut Criterion) {
    let case = bundled::case6();
    let x = CommitmentSchedule::all_on(3, 6);
    c.bench_function("build/case6_order2_level3", |b| {
        b.iter_batched(
            || SurrogateBuilder::new(&case, &x).unwrap(),
            |mut s| black_box(s.build(2, 3).unwrap().mean()),
            BatchSize::SmallInput,
        )
    });
}

criterion_group!(benches, dispatch, surrogate_eval, grids, build);
criterion_main!(benches);
