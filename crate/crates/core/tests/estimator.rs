mod common;

use common::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use susyvqe::pauli::DEFAULT_THRESHOLD;
use susyvqe::scan::{crossover, noise_scan, NoiseScanConfig, ScanVariant};
use susyvqe::sim::{sample_circuit_expectation, sample_expectation};
use susyvqe::{build_hamiltonian, decompose, Ansatz, GateTemplate, NoiseModel, Superpotential};

#[test]
fn coverage_of_five_stderr() {
    let frac = estimator_coverage(1000, 1000);
    assert!(frac >= 0.99, "{frac}");
}

#[test]
fn stderr_halves_with_four_times_shots() {
    let r = stderr_ratio(100, 2000);
    assert!((r - 0.5).abs() <= 0.1, "{r}");
}

#[test]
fn same_seed_same_estimate() {
    let h = build_hamiltonian(&spec(Superpotential::DoubleWell), 4).unwrap();
    let sum = decompose(&h, DEFAULT_THRESHOLD).unwrap();
    let psi = random_state(3, &mut ChaCha8Rng::seed_from_u64(3));
    let noise = NoiseModel::new(0.01, 0.02, 0.01, 0.02).unwrap();
    let a = sample_expectation(&psi, &sum, 500, &noise, 9).unwrap();
    let b = sample_expectation(&psi, &sum, 500, &noise, 9).unwrap();
    assert_eq!(a, b);
}

#[test]
fn circuit_sampling_matches_statevector_without_noise() {
    let h = build_hamiltonian(&spec(Superpotential::DoubleWell), 4).unwrap();
    let sum = decompose(&h, DEFAULT_THRESHOLD).unwrap();
    let a = Ansatz::new(
        "100".parse().unwrap(),
        vec![GateTemplate::ry(1), GateTemplate::cry(1, 2)],
    )
    .unwrap();
    let theta = [0.7, -1.1];
    let exact = a.energy(&h, &theta).unwrap();
    let est =
        sample_circuit_expectation(&a, &theta, &sum, 20_000, &NoiseModel::noiseless(), 5).unwrap();
    assert!((est.estimate - exact).abs() < 5.0 * est.stderr);
}

#[test]
fn depolarizing_pulls_towards_mixed_state() {
    // a fully depolarized register has energy Tr(H)/dim
    let h = build_hamiltonian(&spec(Superpotential::DoubleWell), 2).unwrap();
    let sum = decompose(&h, DEFAULT_THRESHOLD).unwrap();
    let mixed = sum.coefficient("II").unwrap();
    let a = Ansatz::new("00".parse().unwrap(), vec![GateTemplate::cry(0, 1); 30]).unwrap();
    let theta = vec![0.0; 30];
    let clean = a.energy(&h, &theta).unwrap();
    let noisy = sample_circuit_expectation(
        &a,
        &theta,
        &sum,
        20_000,
        &NoiseModel::new(0.0, 0.3, 0.0, 0.0).unwrap(),
        1,
    )
    .unwrap();
    assert!((noisy.estimate - mixed).abs() < (clean - mixed).abs() * 0.2);
}

#[test]
fn short_circuit_wins_under_heavy_noise() {
    let sp = spec(Superpotential::DoubleWell);
    let h = build_hamiltonian(&sp, 8).unwrap();
    let sum = decompose(&h, DEFAULT_THRESHOLD).unwrap();
    let e_exact = susyvqe::exact_spectrum(&h, 1).unwrap()[0];
    let t = susyvqe::avqe::avqe_run_with(&h, 1e-6, 12, &small_opt()).unwrap();
    let full = ScanVariant {
        name: "full".into(),
        ansatz: t.final_ansatz.clone(),
        theta: t.final_theta.clone(),
    };
    let short = susyvqe::avqe::truncate_ansatz(&t.final_ansatz, 1).unwrap();
    let (short, _) = ScanVariant::optimized("short", short, &h, &small_opt()).unwrap();
    let cfg = NoiseScanConfig {
        p2_grid: vec![0.0, 0.2],
        p1: 0.0,
        r01: 0.0,
        r10: 0.0,
        shots: 4000,
        seeds: 4,
        seed: 0,
    };
    let rows = noise_scan(&sum, e_exact, &[full, short], &cfg).unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(crossover(&rows[2..], "full", "short"), Some(0.2));
}
