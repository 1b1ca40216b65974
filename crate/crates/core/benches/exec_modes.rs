use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wachred::modp::build_catalog;
use wachred::reduce::{default_x_precision, identify_seed};
use wachred::seed::hensel_seed;
use wachred::wach::{ConstructionLog, WachSeed};
use wachred::{Exec, Field, PadicElem};

const MODES: [Exec; 2] = [Exec::Parallel, Exec::Sequential];

fn lift(c: &mut Criterion) {
    let mut g = c.benchmark_group("hensel_seed");
    g.sample_size(10);
    for (p, k, ap, n) in [(5u64, 5u32, 10i64, 6u32), (7, 4, 14, 5)] {
        let f = Field::qp(p).unwrap();
        let a = PadicElem::from_int(&f, ap, 30);
        for mode in MODES {
            g.bench_with_input(
                BenchmarkId::new(mode.name(), format!("p{p}_k{k}_n{n}")),
                &mode,
                |b, &m| b.iter(|| hensel_seed(&f, k, &a, n, m).unwrap()),
            );
        }
    }
    g.finish();
}

fn catalog(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_catalog");
    g.sample_size(10);
    for (p, k) in [(3u64, 5u32), (5, 4)] {
        let f = Field::qp(p).unwrap();
        let n = default_x_precision(&f, k);
        for mode in MODES {
            g.bench_with_input(
                BenchmarkId::new(mode.name(), format!("p{p}_k{k}")),
                &mode,
                |b, &m| b.iter(|| build_catalog(&f, k, n, m).unwrap()),
            );
        }
    }
    g.finish();
}

fn identification(c: &mut Criterion) {
    let mut g = c.benchmark_group("identify_seed");
    g.sample_size(10);
    let (p, k) = (7u64, 6u32);
    let f = Field::qp(p).unwrap();
    let a = PadicElem::from_int(&f, 7, 30);
    let (pair, report, _) = hensel_seed(&f, k, &a, 4, Exec::default()).unwrap();
    let seed = WachSeed {
        k,
        a_p: a,
        n: 4,
        pair,
        report,
        log: ConstructionLog {
            strategy: "lift".into(),
            detail: String::new(),
            precision_spent: 0,
        },
    };
    let cat = build_catalog(&f, k, default_x_precision(&f, k), Exec::default()).unwrap();
    for mode in MODES {
        g.bench_with_input(BenchmarkId::new(mode.name(), "p7_k6"), &mode, |b, &m| {
            b.iter(|| identify_seed(&seed, &cat, m).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, lift, catalog, identification);
criterion_main!(benches);
