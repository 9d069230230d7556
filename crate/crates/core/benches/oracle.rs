use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pencilform::{
    brute_stabilizer, enumerate_orbits, Constraint, Exec, Field, Group, Mat, Mode, OracleConfig,
    Pencil,
};
use std::hint::black_box;

fn tables(c: &mut Criterion) {
    let mut g = c.benchmark_group("enumerate_orbits");
    g.sample_size(10);
    let cases = [
        ("F3_n1_GL_general", 3, 1, Group::GL, Mode::General),
        ("F5_n1_SL_symmetric", 5, 1, Group::SL, Mode::Symmetric),
        ("F3_n2_GL_symmetric", 3, 2, Group::GL, Mode::Symmetric),
    ];
    for (name, q, n, group, mode) in cases {
        let k = Field::prime(q).unwrap();
        for exec in [Exec::Sequential, Exec::Parallel] {
            let cfg = OracleConfig {
                exec,
                ..OracleConfig::default()
            };
            g.bench_with_input(
                BenchmarkId::new(name, format!("{exec:?}")),
                &cfg,
                |b, cfg| {
                    b.iter(|| {
                        black_box(
                            enumerate_orbits(&k, n, group, mode, &Constraint::All, cfg)
                                .unwrap()
                                .orbits
                                .len(),
                        )
                    })
                },
            );
        }
    }
    g.finish();
}

fn stabilizers(c: &mut Criterion) {
    let mut g = c.benchmark_group("brute_stabilizer");
    g.sample_size(10);
    let k = Field::prime(3).unwrap();
    let m = Pencil::new(
        Mat::identity(&k, 3),
        Mat::diag(&k, &[k.zero(), k.one(), k.from_i64(2)]),
    )
    .unwrap();
    for exec in [Exec::Sequential, Exec::Parallel] {
        let cfg = OracleConfig {
            exec,
            ..OracleConfig::default()
        };
        g.bench_with_input(
            BenchmarkId::new("F3_size3_GL", format!("{exec:?}")),
            &cfg,
            |b, cfg| b.iter(|| black_box(brute_stabilizer(&m, Group::GL, cfg).unwrap().order)),
        );
    }
    g.finish();
}

criterion_group!(benches, tables, stabilizers);
criterion_main!(benches);
