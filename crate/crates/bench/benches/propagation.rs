use criterion::{criterion_group, criterion_main, BatchSize, BenchmarkId, Criterion};
use muse_bench::{chain, lattice, poisoned_lattice, tree};
use muse_core::cdg::{builtin_grammar, parse, Builtin, WordGraph};
use muse_core::{ac4, muse_ac1, muse_pc1};

fn arc_consistency(c: &mut Criterion) {
    let mut g = c.benchmark_group("muse_ac1");
    for layers in [4, 8, 16] {
        let m = lattice(2, layers, 4, 0.5, 11);
        g.bench_with_input(BenchmarkId::new("lattice_w2", layers), &m, |b, m| {
            b.iter_batched(|| m.clone(), muse_ac1, BatchSize::SmallInput)
        });
    }
    let m = tree(2, 5, 4, 0.5, 11);
    g.bench_function("tree_b2_d5", |b| b.iter_batched(|| m.clone(), muse_ac1, BatchSize::SmallInput));
    let m = poisoned_lattice(2, 8, 4);
    g.bench_function("wipe_out_w2_l8", |b| b.iter_batched(|| m.clone(), muse_ac1, BatchSize::SmallInput));
    g.finish();
}

fn single_segment(c: &mut Criterion) {
    let mut g = c.benchmark_group("single_segment");
    let m = chain(12, 5, 0.5, 3);
    g.bench_function("muse_ac1", |b| b.iter_batched(|| m.clone(), muse_ac1, BatchSize::SmallInput));
    g.bench_function("ac4", |b| b.iter_batched(|| m.csp().clone(), ac4, BatchSize::SmallInput));
    g.finish();
}

fn path_consistency(c: &mut Criterion) {
    let mut g = c.benchmark_group("muse_pc1");
    g.sample_size(20);
    for layers in [3, 5] {
        let m = lattice(2, layers, 3, 0.5, 5);
        g.bench_with_input(BenchmarkId::new("lattice_w2", layers), &m, |b, m| {
            b.iter_batched(|| m.clone(), muse_pc1, BatchSize::SmallInput)
        });
    }
    g.finish();
}

fn lattice_parsing(c: &mut Criterion) {
    let mut g = c.benchmark_group("parse");
    g.sample_size(10);
    let abc = builtin_grammar(Builtin::G2);
    let ww = builtin_grammar(Builtin::G3);
    for n in [2, 3] {
        let wg = WordGraph::full_lattice(3 * n, &["a", "b", "c"]);
        g.bench_with_input(BenchmarkId::new("abc", 3 * n), &wg, |b, wg| b.iter(|| parse(wg, &abc).unwrap()));
    }
    let wg = WordGraph::full_lattice(6, &["a", "b", "c"]);
    g.bench_function("ww/6", |b| b.iter(|| parse(&wg, &ww).unwrap()));
    g.finish();
}

criterion_group!(benches, arc_consistency, single_segment, path_consistency, lattice_parsing);
criterion_main!(benches);
