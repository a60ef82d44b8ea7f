//! Criterion benchmarks for the simulator, the closed-form network and the
//! hybrid pipeline. Run with `cargo bench -p qrnn-bench`.

use std::hint::black_box;

use criterion::{BenchmarkId, Criterion};
use qrnn::qubit::ry;
use qrnn::vqc::VqcParams;
use qrnn::{seeded_rng, ModelConfig, MotherRidgelet, QrnnModel, QrnnSingleQubit, StateVector};

fn window(e: usize) -> Vec<f64> {
    (0..e).map(|i| 0.3 + 0.05 * i as f64).collect()
}

fn statevector(c: &mut Criterion) {
    let mut group = c.benchmark_group("statevector_ry_layer");
    let gate = ry(0.37).unwrap();
    for n in [1usize, 4, 8, 10] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut s = StateVector::zero(n).unwrap();
            b.iter(|| {
                for q in 0..n {
                    s.apply_gate(&gate, q).unwrap();
                }
                black_box(s.expectation_z(0).unwrap())
            })
        });
    }
    group.finish();
}

fn closed_form(c: &mut Criterion) {
    let mut rng = seeded_rng(1);
    let x = window(8);
    let mut group = c.benchmark_group("single_qubit_forward");
    for j in [1usize, 16, 64] {
        let model = QrnnSingleQubit::random(8, j, MotherRidgelet::GaussianDerivative, &mut rng).unwrap();
        group.bench_with_input(BenchmarkId::new("closed_form", j), &model, |b, m| {
            b.iter(|| black_box(m.forward(black_box(&x)).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("gate_product", j), &model, |b, m| {
            b.iter(|| black_box(m.unitary_by_product(black_box(&x)).unwrap()))
        });
    }
    group.finish();
}

fn circuit(c: &mut Criterion) {
    let mut rng = seeded_rng(2);
    let mut group = c.benchmark_group("vqc");
    for qubits in [1usize, 2, 4] {
        let params = VqcParams::random(6, qubits, &mut rng).unwrap();
        let angles = vec![0.4; qubits];
        group.bench_with_input(BenchmarkId::new("expectations", qubits), &params, |b, p| {
            b.iter(|| black_box(p.expectations(black_box(&angles)).unwrap()))
        });
        group.bench_with_input(BenchmarkId::new("param_shift", qubits), &params, |b, p| {
            b.iter(|| black_box(p.param_shift(black_box(&angles)).unwrap()))
        });
    }
    let params = VqcParams::random(6, 1, &mut rng).unwrap();
    group.bench_function("shots_1e4", |b| {
        b.iter(|| black_box(params.forward(&[0.4], Some(10_000), 3).unwrap()))
    });
    group.finish();
}

fn pipeline(c: &mut Criterion) {
    let model = QrnnModel::random(&ModelConfig::default(), 8, 42).unwrap();
    let xs: Vec<Vec<f64>> = (0..32).map(|k| window(8).iter().map(|v| v + 0.01 * k as f64).collect()).collect();
    let refs: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
    let ys = vec![0.5; 32];
    let mut group = c.benchmark_group("hybrid_model");
    group.bench_function("forward", |b| b.iter(|| black_box(model.forward(black_box(&xs[0])).unwrap())));
    group.bench_function("loss_grad_batch32", |b| {
        b.iter(|| black_box(model.loss_grad(black_box(&refs), &ys).unwrap()))
    });
    group.finish();
}

pub fn benchmarks(c: &mut Criterion) {
    statevector(c);
    closed_form(c);
    circuit(c);
    pipeline(c);
}
