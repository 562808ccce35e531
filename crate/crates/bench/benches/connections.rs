use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use oddconn::catalog::{library_changes, rnn_chart, smink44};
use oddconn::sample::Sampler;

fn smink(c: &mut Criterion) {
    let (conn, par, _) = smink44();
    let z = par.frame();
    c.bench_function("smink44/torsion all pairs", |b| {
        b.iter(|| {
            for x in z {
                for y in z {
                    black_box(conn.torsion(x, y).unwrap());
                }
            }
        })
    });
    c.bench_function("smink44/curvature one triple", |b| b.iter(|| black_box(conn.curvature(&z[4], &z[5], &z[6]).unwrap())));
}

fn random(c: &mut Criterion) {
    let chart = rnn_chart(2).unwrap();
    let mut s = Sampler::new(1);
    let conn = s.odd_connection(&chart);
    let (x, y, w) = (s.any_vector(&chart), s.any_vector(&chart), s.any_vector(&chart));
    c.bench_function("r22/nabla", |b| b.iter(|| black_box(conn.nabla(&x, &y).unwrap())));
    c.bench_function("r22/bianchi", |b| b.iter(|| black_box(conn.bianchi(&x, &y, &w).unwrap())));
    c.bench_function("r22/odd divergence", |b| b.iter(|| black_box(conn.odd_divergence(&x).unwrap())));
    let (_, change) = library_changes(&chart).unwrap().into_iter().next().unwrap();
    c.bench_function("r22/transform connection", |b| b.iter(|| black_box(conn.transform(&change).unwrap())));
}

criterion_group!(benches, smink, random);
criterion_main!(benches);
