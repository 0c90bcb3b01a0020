use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use ergoblock::decompose::{decompose_bounded, decompose_unbounded};
use ergoblock::generators::{gen_bernoulli, gen_nested, striped_field};
use ergoblock::grid2d::{audit_tiles, profile2d, GridTilingSystem, Region2D};
use ergoblock::rational::ratio;
use ergoblock::{profile, Region};

fn band() -> Region {
    Region::frequency_window("0", ratio(1, 5), ratio(4, 5), 2).unwrap()
}

fn profiles(c: &mut Criterion) {
    let x = gen_bernoulli(0.5, 1, 1 << 18).unwrap();
    let mut g = c.benchmark_group("profile");
    for depth in [4, 8, 12] {
        g.bench_with_input(BenchmarkId::from_parameter(depth), &depth, |b, &d| {
            b.iter(|| profile(black_box(&x), d).unwrap())
        });
    }
    g.finish();

    let field = striped_field(256, 32, 0.1, 0.9, 1).unwrap();
    c.bench_function("profile2d/256x256/depth6", |b| b.iter(|| profile2d(black_box(&field), 6).unwrap()));
}

fn decompositions(c: &mut Criterion) {
    let x = gen_nested(200_000).unwrap().block;
    let r = band();
    let mut g = c.benchmark_group("decompose");
    g.sample_size(10);
    for n in [20, 160, 1280] {
        g.bench_with_input(BenchmarkId::new("bounded", n), &n, |b, &n| {
            b.iter(|| decompose_bounded(black_box(&x), 10, n, &r).unwrap())
        });
    }
    g.bench_function("unbounded", |b| b.iter(|| decompose_unbounded(black_box(&x), 10, &r).unwrap()));
    g.finish();
}

fn tile_audit(c: &mut Criterion) {
    let field = striped_field(512, 64, 0.05, 0.95, 3).unwrap();
    let sys = GridTilingSystem::default();
    let r = Region2D::from_json_str(r#"{"type":"frequency_window","symbol":"1","low":"1/5","high":"4/5"}"#).unwrap();
    let mut g = c.benchmark_group("audit_tiles");
    g.sample_size(10);
    for level in [3u32, 5] {
        g.bench_with_input(BenchmarkId::from_parameter(level), &level, |b, &l| {
            b.iter(|| audit_tiles(black_box(&field), &sys, l, &r).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, profiles, decompositions, tile_audit);
criterion_main!(benches);
