use criterion::{black_box, criterion_group, criterion_main, Criterion};
use loopstab::loopgroup::ParityVector;
use loopstab::matgroup::{closure, decompose_glz, sv_filter, sv_generators, sv_reduce};
use loopstab::permutation::decompose_even;
use loopstab::stabilizer::image_mod2;
use loopstab_bench::{even_8, loops_331, unimodular_3};

const CAP: usize = 1_000_000;

fn bench_closure(c: &mut Criterion) {
    let v = ParityVector::new(vec![0, 0, 0]);
    let gens = sv_generators(&v);
    c.bench_function("closure/full_gl3_mod2", |b| {
        b.iter(|| closure(3, 2, black_box(&gens), CAP).unwrap())
    });
}

fn bench_sv_reduce(c: &mut Criterion) {
    let v = ParityVector::new(vec![1, 1, 0]);
    let members: Vec<_> = sv_filter(&v).unwrap().into_iter().collect();
    c.bench_function("sv_reduce/all_of_s110", |b| {
        b.iter(|| {
            for m in &members {
                let word = sv_reduce(black_box(m), &v).unwrap();
                black_box(word.product_mod(3, 2));
            }
        })
    });
}

fn bench_decompose_even(c: &mut Criterion) {
    let p = even_8();
    c.bench_function("decompose_even/n8_m4", |b| {
        b.iter(|| decompose_even(black_box(&p), 4).unwrap())
    });
}

fn bench_image_mod2(c: &mut Criterion) {
    let u = loops_331();
    c.bench_function("image_mod2/loops_331", |b| {
        b.iter(|| image_mod2(black_box(&u), CAP).unwrap())
    });
}

fn bench_decompose_glz(c: &mut Criterion) {
    let m = unimodular_3();
    c.bench_function("decompose_glz/mixed_sign_3x3", |b| {
        b.iter(|| decompose_glz(black_box(&m)).unwrap())
    });
}

criterion_group!(
    benches,
    bench_closure,
    bench_sv_reduce,
    bench_decompose_even,
    bench_image_mod2,
    bench_decompose_glz
);
criterion_main!(benches);
