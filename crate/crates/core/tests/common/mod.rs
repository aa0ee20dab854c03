//! Independent oracles and property checks shared by the integration tests
//! and the acceptance runner.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use susyvqe::avqe::{avqe_run, pool_gradients, OperatorPool};
use susyvqe::model::max_abs;
use susyvqe::pauli::DEFAULT_THRESHOLD;
use susyvqe::sim::sample_expectation;
use susyvqe::{
    build_hamiltonian, build_supercharges, decompose, exact_spectrum, expectation, reconstruct,
    shift_gradient, Ansatz, BasisState, GateTemplate, NoiseModel, OptimizerConfig, StateVector,
    Superpotential, SuperpotentialSpec,
};

pub type M = DMatrix<Complex64>;

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

pub fn spec(kind: Superpotential) -> SuperpotentialSpec {
    SuperpotentialSpec::new(kind)
}

/// Annihilation operator on `lambda` levels.
pub fn annihilation(lambda: usize) -> M {
    M::from_fn(lambda, lambda, |i, j| {
        if j == i + 1 {
            c((j as f64).sqrt())
        } else {
            c(0.0)
        }
    })
}

/// `q` and `p` rebuilt from ladder operators.
pub fn ladder_qp(lambda: usize, m: f64) -> (M, M) {
    let a = annihilation(lambda);
    let ad = a.adjoint();
    let q = (&a + &ad) * c(1.0 / (2.0 * m).sqrt());
    let p = (&ad - &a) * Complex64::new(0.0, (m / 2.0).sqrt());
    (q, p)
}

/// Hamiltonian assembled from the ladder construction with explicit
/// polynomials in the truncated `q`.
pub fn oracle_hamiltonian(kind: Superpotential, lambda: usize) -> M {
    let (m, g, mu) = (1.0, 1.0, 1.0);
    let (q, p) = ladder_qp(lambda, m);
    let id = M::identity(lambda, lambda);
    let q2 = &q * &q;
    let (w1, w2) = match kind {
        Superpotential::HarmonicOscillator => (&q * c(m), &id * c(m)),
        Superpotential::AnharmonicOscillator => {
            (&q * c(m) + &q2 * &q * c(g), &id * c(m) + &q2 * c(3.0 * g))
        }
        Superpotential::DoubleWell => (
            &q * c(m) + (&q2 + &id * c(mu * mu)) * c(g),
            &id * c(m) + &q * c(2.0 * g),
        ),
    };
    let boson = (&p * &p + &w1 * &w1) * c(0.5);
    let z = M::from_diagonal(&nalgebra::DVector::from_vec(vec![c(1.0), c(-1.0)]));
    M::identity(2, 2).kronecker(&boson) + z.kronecker(&(w2 * c(0.5)))
}

/// Ground energy of the oracle matrix via nalgebra directly.
pub fn oracle_ground_energy(kind: Superpotential, lambda: usize) -> f64 {
    let h = oracle_hamiltonian(kind, lambda);
    let eig = nalgebra::linalg::SymmetricEigen::new(h);
    eig.eigenvalues
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}

pub fn random_state(n_qubits: usize, rng: &mut impl Rng) -> StateVector {
    let amps = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    StateVector::from_amplitudes(amps).unwrap()
}

pub fn random_gate(n_qubits: usize, rng: &mut impl Rng) -> GateTemplate {
    match rng.gen_range(0..3) {
        0 => GateTemplate::ry(rng.gen_range(0..n_qubits)),
        1 => GateTemplate::rz(rng.gen_range(0..n_qubits)),
        _ => {
            let c = rng.gen_range(0..n_qubits);
            let t = (c + rng.gen_range(1..n_qubits)) % n_qubits;
            GateTemplate::cry(c, t)
        }
    }
}

pub fn random_ansatz(n_qubits: usize, n_gates: usize, rng: &mut impl Rng) -> Ansatz {
    let bits = (0..n_qubits).map(|_| rng.gen_bool(0.5)).collect();
    let gates = (0..n_gates).map(|_| random_gate(n_qubits, rng)).collect();
    Ansatz::new(BasisState::from_bits(bits), gates).unwrap()
}

pub const CUTOFFS: [usize; 3] = [2, 4, 8];

/// Largest `|reconstruct(decompose(H)) - H|` over all superpotentials at `CUTOFFS`.
pub fn pauli_roundtrip_error() -> f64 {
    let mut worst: f64 = 0.0;
    for kind in Superpotential::ALL {
        for lambda in CUTOFFS {
            let h = build_hamiltonian(&spec(kind), lambda).unwrap();
            let back = reconstruct(&decompose(&h, DEFAULT_THRESHOLD).unwrap());
            worst = worst.max(max_abs(&(back - &h.matrix)));
        }
    }
    worst
}

/// Largest deviation of `[q, p]` from `i(1 - lambda |lambda-1><lambda-1|)`,
/// together with the gap between library and ladder-built operators.
pub fn commutator_defect(max_lambda: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let mut lambda = 2;
    while lambda <= max_lambda {
        for m in [1.0, 0.5, 3.0] {
            let ops = susyvqe::make_boson_ops(lambda, m).unwrap();
            let (q, p) = ladder_qp(lambda, m);
            worst = worst
                .max(max_abs(&(&ops.q - &q)))
                .max(max_abs(&(&ops.p - &p)));
            let mut expected = M::identity(lambda, lambda) * Complex64::i();
            expected[(lambda - 1, lambda - 1)] = Complex64::new(0.0, 1.0 - lambda as f64);
            worst = worst.max(max_abs(&(&ops.q * &ops.p - &ops.p * &ops.q - expected)));
        }
        lambda *= 2;
    }
    worst
}

/// Largest entry of `Q^2` or `Q†^2`.
pub fn nilpotency_defect() -> f64 {
    let mut worst: f64 = 0.0;
    for kind in Superpotential::ALL {
        for lambda in [2, 4, 8, 16] {
            let s = build_supercharges(&spec(kind), lambda).unwrap();
            worst = worst
                .max(max_abs(&(&s.q * &s.q)))
                .max(max_abs(&(&s.q_dag * &s.q_dag)));
        }
    }
    worst
}

/// `P ({Q,Q†}/2 - H) P` with `P` keeping boson levels `0..=lambda-3` in both
/// fermion sectors.
pub fn interior_algebra_defect() -> f64 {
    let mut worst: f64 = 0.0;
    for kind in Superpotential::ALL {
        for lambda in [4, 8, 16, 32] {
            let sp = spec(kind);
            let h = build_hamiltonian(&sp, lambda).unwrap();
            let s = build_supercharges(&sp, lambda).unwrap();
            let anti = (&s.q * &s.q_dag + &s.q_dag * &s.q) * c(0.5);
            let diff = anti - &h.matrix;
            let keep = |i: usize| i % lambda <= lambda - 3;
            for i in (0..2 * lambda).filter(|&i| keep(i)) {
                for j in (0..2 * lambda).filter(|&j| keep(j)) {
                    worst = worst.max(diff[(i, j)].norm());
                }
            }
        }
    }
    worst
}

fn central_difference(
    a: &Ansatz,
    h: &susyvqe::QubitHamiltonian,
    theta: &[f64],
    k: usize,
    step: f64,
) -> f64 {
    let mut plus = theta.to_vec();
    let mut minus = theta.to_vec();
    plus[k] += step;
    minus[k] -= step;
    (a.energy(h, &plus).unwrap() - a.energy(h, &minus).unwrap()) / (2.0 * step)
}

/// Worst `|shift_gradient - finite difference|` over random 3-gate ansätze
/// on AHO at lambda = 4, one ansatz per seed.
pub fn shift_vs_fd(seeds: u64) -> f64 {
    let h = build_hamiltonian(&spec(Superpotential::AnharmonicOscillator), 4).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..seeds {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_ansatz(h.n_qubits, 3, &mut rng);
        let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
        let g = shift_gradient(&a, &h, &theta).unwrap();
        for (k, gk) in g.iter().enumerate() {
            worst = worst.max((gk - central_difference(&a, &h, &theta, k, 1e-6)).abs());
        }
    }
    worst
}

/// Worst `|pool gradient - |dE/dθ| of the appended gate at zero angle|`.
pub fn screening_vs_shift(seeds: u64) -> f64 {
    let mut worst: f64 = 0.0;
    for (kind, lambda) in [
        (Superpotential::AnharmonicOscillator, 4),
        (Superpotential::DoubleWell, 4),
        (Superpotential::DoubleWell, 8),
    ] {
        let h = build_hamiltonian(&spec(kind), lambda).unwrap();
        let pool = OperatorPool::new(h.n_qubits);
        for seed in 0..seeds {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + seed);
            let a = random_ansatz(h.n_qubits, 3, &mut rng);
            let theta: Vec<f64> = (0..3).map(|_| rng.gen_range(-3.0..3.0)).collect();
            let screened = pool_gradients(&a, &theta, &pool, &h).unwrap();
            for (entry, s) in pool.entries().iter().zip(&screened) {
                let mut ext = a.clone();
                ext.push(*entry).unwrap();
                let mut t = theta.clone();
                t.push(0.0);
                let direct = shift_gradient(&ext, &h, &t).unwrap()[3].abs();
                worst = worst.max((s - direct).abs());
            }
        }
    }
    worst
}

/// Smallest `E(θ) - E0` over random ansätze and angles; negative means a
/// violated bound.
pub fn variational_margin(trials: u64) -> f64 {
    let mut margin = f64::INFINITY;
    for kind in Superpotential::ALL {
        for lambda in [2, 4, 8] {
            let h = build_hamiltonian(&spec(kind), lambda).unwrap();
            let e0 = exact_spectrum(&h, 1).unwrap()[0];
            for seed in 0..trials {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let a = random_ansatz(h.n_qubits, 6, &mut rng);
                let theta: Vec<f64> = (0..6).map(|_| rng.gen_range(-3.2..3.2)).collect();
                margin = margin.min(a.energy(&h, &theta).unwrap() - e0);
            }
        }
    }
    margin
}

pub fn small_opt() -> OptimizerConfig {
    OptimizerConfig {
        restarts: 8,
        ..OptimizerConfig::default()
    }
}

/// Largest energy increase between consecutive AVQE trace rows, together
/// with the worst final energy below the exact ground energy.
pub fn avqe_trace_monotonicity() -> (f64, f64) {
    let mut rise: f64 = f64::NEG_INFINITY;
    let mut below: f64 = f64::NEG_INFINITY;
    for kind in Superpotential::ALL {
        for lambda in [2, 4, 8] {
            let t = avqe_run(&spec(kind), lambda, 1e-6, 12, &small_opt()).unwrap();
            for w in t.rows().windows(2) {
                rise = rise.max(w[1].energy - w[0].energy);
            }
            below = below.max(t.e_exact - t.final_energy);
        }
    }
    (rise, below)
}

/// Two identical AVQE runs serialize to identical JSON.
pub fn avqe_reproducible() -> bool {
    let run = || {
        let t = avqe_run(&spec(Superpotential::DoubleWell), 8, 1e-6, 10, &small_opt()).unwrap();
        serde_json::to_string(&t).unwrap()
    };
    run() == run()
}

/// Fraction of noiseless sampled estimates within `5 stderr` of the exact
/// expectation, over `trials` seeds and random states.
pub fn estimator_coverage(trials: u64, shots: usize) -> f64 {
    let h = build_hamiltonian(&spec(Superpotential::AnharmonicOscillator), 4).unwrap();
    let sum = decompose(&h, DEFAULT_THRESHOLD).unwrap();
    let noise = NoiseModel::noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let states: Vec<StateVector> = (0..8).map(|_| random_state(h.n_qubits, &mut rng)).collect();
    let exact: Vec<f64> = states.iter().map(|s| expectation(s, &h).unwrap()).collect();
    let hits = (0..trials)
        .filter(|&t| {
            let k = t as usize % states.len();
            let e = sample_expectation(&states[k], &sum, shots, &noise, t).unwrap();
            (e.estimate - exact[k]).abs() <= 5.0 * e.stderr
        })
        .count();
    hits as f64 / trials as f64
}

/// Mean over seeds of `stderr(4 shots) / stderr(shots)`.
pub fn stderr_ratio(seeds: u64, shots: usize) -> f64 {
    let h = build_hamiltonian(&spec(Superpotential::DoubleWell), 4).unwrap();
    let sum = decompose(&h, DEFAULT_THRESHOLD).unwrap();
    let noise = NoiseModel::noiseless();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let state = random_state(h.n_qubits, &mut rng);
    let total: f64 = (0..seeds)
        .map(|s| {
            let a = sample_expectation(&state, &sum, shots, &noise, s).unwrap();
            let b = sample_expectation(&state, &sum, 4 * shots, &noise, 10_000 + s).unwrap();
            b.stderr / a.stderr
        })
        .sum();
    total / seeds as f64
}
