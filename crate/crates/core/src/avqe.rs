//! Adaptive VQE: grow the ansatz one pool gate at a time, picking the gate
//! whose angle has the largest energy gradient at zero, then re-optimize with
//! the previous angles as a warm start.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    build_hamiltonian, exact_spectrum, QubitHamiltonian, Superpotential, SuperpotentialSpec,
};
use crate::opt::{minimize, OptimizerConfig};
use crate::sim::{expectation, Ansatz, BasisState, GateTemplate, StateVector};

pub const DEFAULT_THRESHOLD: f64 = 1e-6;
pub const DEFAULT_MAX_GATES: usize = 30;

/// Candidate gates in a fixed order: every `RY`, every `RZ`, then every
/// `CRY(control, target)` with ascending `(control, target)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OperatorPool {
    entries: Vec<GateTemplate>,
}

impl OperatorPool {
    pub fn new(n_qubits: usize) -> Self {
        let ry = (0..n_qubits).map(GateTemplate::ry);
        let rz = (0..n_qubits).map(GateTemplate::rz);
        let cry = (0..n_qubits).flat_map(|c| {
            (0..n_qubits)
                .filter(move |&t| t != c)
                .map(move |t| GateTemplate::cry(c, t))
        });
        OperatorPool {
            entries: ry.chain(rz).chain(cry).collect(),
        }
    }

    pub fn entries(&self) -> &[GateTemplate] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// `|dE/dθ|` at `θ = 0` for each pool gate appended after the current circuit,
/// i.e. `|i <psi|[G, H]|psi>| = 2 |Im <G psi|H psi>|`.
pub fn pool_gradients(
    current: &Ansatz,
    theta: &[f64],
    pool: &OperatorPool,
    h: &QubitHamiltonian,
) -> Result<Vec<f64>> {
    let psi = current.prepare(theta)?;
    state_gradients(&psi, pool, h)
}

pub fn state_gradients(
    psi: &StateVector,
    pool: &OperatorPool,
    h: &QubitHamiltonian,
) -> Result<Vec<f64>> {
    if psi.n_qubits() != h.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: h.n_qubits,
            actual: psi.n_qubits(),
        });
    }
    for g in pool.entries() {
        g.validate(h.n_qubits)?;
    }
    let hpsi = h.apply(psi.amplitudes());
    Ok(pool
        .entries()
        .par_iter()
        .map(|g| {
            let gpsi = g.apply_generator(psi);
            let overlap: Complex64 = gpsi.iter().zip(&hpsi).map(|(a, b)| a.conj() * b).sum();
            2.0 * overlap.im.abs()
        })
        .collect())
}

/// Index of the largest entry; the earliest wins ties.
fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, &v) in values.iter().enumerate() {
        if best.is_none_or(|(_, b)| v > b) {
            best = Some((i, v));
        }
    }
    best.map(|(i, _)| i)
}

/// `|10…0>` for HO and AHO, `|100>` for DW at `lambda = 4`, otherwise `|0…0>`.
pub fn choose_basis_state(spec: &SuperpotentialSpec, lambda: usize) -> Result<BasisState> {
    let n = crate::model::boson_qubits(lambda)? + 1;
    let fermion_occupied = match spec.kind {
        Superpotential::HarmonicOscillator | Superpotential::AnharmonicOscillator => true,
        Superpotential::DoubleWell => lambda == 4,
    };
    let mut bits = vec![false; n];
    bits[0] = fermion_occupied;
    Ok(BasisState::from_bits(bits))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AVQEStep {
    pub step_index: usize,
    /// Screened `|dE/dθ|`, one per pool entry in pool order.
    pub gradients: Vec<f64>,
    pub chosen: GateTemplate,
    pub energy_after: f64,
    pub n_params: usize,
    /// False for the final step whose gate failed to lower the energy by the
    /// threshold; that gate is not part of the final ansatz.
    pub accepted: bool,
    pub restart_index: usize,
    pub evals: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "detail")]
pub enum Termination {
    Converged,
    MaxGates,
    Aborted(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AVQETrace {
    pub spec: SuperpotentialSpec,
    pub lambda: usize,
    pub initial_bitstring: BasisState,
    pub initial_energy: f64,
    pub steps: Vec<AVQEStep>,
    pub final_ansatz: Ansatz,
    pub final_theta: Vec<f64>,
    pub final_energy: f64,
    pub e_exact: f64,
    pub termination: Termination,
}

/// One row of the per-step energy export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub step: usize,
    pub n_gates: usize,
    pub energy: f64,
    pub e_exact: f64,
}

impl AVQETrace {
    pub fn n_gates(&self) -> usize {
        self.final_ansatz.n_params()
    }

    /// Step 0 is the bare basis state; each later row is one AVQE step.
    pub fn rows(&self) -> Vec<TraceRow> {
        std::iter::once(TraceRow {
            step: 0,
            n_gates: 0,
            energy: self.initial_energy,
            e_exact: self.e_exact,
        })
        .chain(self.steps.iter().map(|s| TraceRow {
            step: s.step_index + 1,
            n_gates: s.n_params,
            energy: s.energy_after,
            e_exact: self.e_exact,
        }))
        .collect()
    }

    pub fn is_aborted(&self) -> bool {
        matches!(self.termination, Termination::Aborted(_))
    }
}

fn step_seed(seed: u64, step: usize) -> u64 {
    // splitmix64 finalizer
    let mut z = seed.wrapping_add((step as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn avqe_run(
    spec: &SuperpotentialSpec,
    lambda: usize,
    threshold: f64,
    max_gates: usize,
    opt_config: &OptimizerConfig,
) -> Result<AVQETrace> {
    let h = build_hamiltonian(spec, lambda)?;
    avqe_run_with(&h, threshold, max_gates, opt_config)
}

/// The adaptive loop against a prebuilt Hamiltonian.
pub fn avqe_run_with(
    h: &QubitHamiltonian,
    threshold: f64,
    max_gates: usize,
    opt_config: &OptimizerConfig,
) -> Result<AVQETrace> {
    if !(threshold.is_finite() && threshold > 0.0) {
        return Err(Error::InvalidConfig("threshold must be > 0".into()));
    }
    if max_gates == 0 {
        return Err(Error::InvalidConfig("max_gates must be >= 1".into()));
    }
    opt_config.validate()?;
    let e_exact = exact_spectrum(h, 1)?[0];
    let bits = choose_basis_state(&h.spec, h.lambda)?;
    let pool = OperatorPool::new(h.n_qubits);

    let mut ansatz = Ansatz::new(bits.clone(), Vec::new())?;
    let mut theta: Vec<f64> = Vec::new();
    let initial_energy = ansatz.energy(h, &theta)?;
    let mut energy = initial_energy;
    let mut steps = Vec::new();
    let mut termination = Termination::MaxGates;

    for step in 0..max_gates {
        let gradients = pool_gradients(&ansatz, &theta, &pool, h)?;
        if gradients.iter().any(|g| !g.is_finite()) {
            termination = Termination::Aborted(Error::NonFiniteEnergy { step }.to_string());
            break;
        }
        let chosen = pool.entries()[argmax(&gradients).expect("pool is never empty")];

        let mut candidate = ansatz.clone();
        candidate.push(chosen)?;
        let mut theta0 = theta.clone();
        theta0.push(0.0);
        let cfg = OptimizerConfig {
            seed: step_seed(opt_config.seed, step),
            ..*opt_config
        };
        let objective = |t: &[f64]| candidate.energy(h, t).unwrap_or(f64::NAN);
        let result = match minimize(objective, &theta0, &cfg) {
            Ok(r) => r,
            Err(_) => {
                termination = Termination::Aborted(Error::NonFiniteEnergy { step }.to_string());
                break;
            }
        };

        let delta = (energy - result.energy).abs();
        let accepted = step == 0 || delta >= threshold;
        steps.push(AVQEStep {
            step_index: step,
            gradients,
            chosen,
            energy_after: result.energy,
            n_params: candidate.n_params(),
            accepted,
            restart_index: result.restart_index,
            evals: result.evals,
        });
        if accepted {
            ansatz = candidate;
            theta = result.theta_opt;
            energy = result.energy;
        }
        if delta < threshold {
            termination = Termination::Converged;
            break;
        }
    }

    Ok(AVQETrace {
        spec: h.spec,
        lambda: h.lambda,
        initial_bitstring: bits,
        initial_energy,
        steps,
        final_ansatz: ansatz,
        final_theta: theta,
        final_energy: energy,
        e_exact,
        termination,
    })
}

/// First `k` gates of `full`, same initial state, fresh parameter slots.
pub fn truncate_ansatz(full: &Ansatz, k: usize) -> Result<Ansatz> {
    if k == 0 {
        return Err(Error::InvalidConfig(
            "truncation length must be >= 1".into(),
        ));
    }
    Ansatz::new(
        full.initial_bitstring.clone(),
        full.gates.iter().take(k).copied().collect(),
    )
}

/// Gate written in little-endian labels: label `k` is qubit `n - 1 - k`
/// here, so the fermion carries the highest label.
#[derive(Debug, Clone, Copy)]
enum Labelled {
    Ry(usize),
    Cry(usize, usize),
}

const AHO_PATTERN: [Labelled; 4] = [
    Labelled::Ry(2),
    Labelled::Ry(3),
    Labelled::Ry(1),
    Labelled::Cry(1, 2),
];

const DW_PATTERN: [Labelled; 4] = [
    Labelled::Ry(0),
    Labelled::Cry(0, 1),
    Labelled::Ry(2),
    Labelled::Ry(1),
];

fn relabel(label: usize, n: usize) -> Option<usize> {
    (label < n).then(|| n - 1 - label)
}

/// The fixed four-gate pattern for any cutoff. Gates whose labels do not
/// exist on a small register are dropped, so `lambda < 8` yields fewer gates.
pub fn extrapolate_ansatz(spec: &SuperpotentialSpec, lambda: usize) -> Result<Ansatz> {
    let bits = choose_basis_state(spec, lambda)?;
    let n = bits.len();
    let pattern: &[Labelled] = match spec.kind {
        Superpotential::HarmonicOscillator => return Ansatz::new(bits, vec![GateTemplate::ry(0)]),
        Superpotential::AnharmonicOscillator => &AHO_PATTERN,
        Superpotential::DoubleWell => &DW_PATTERN,
    };
    let gates = pattern
        .iter()
        .filter_map(|g| match *g {
            Labelled::Ry(q) => relabel(q, n).map(GateTemplate::ry),
            Labelled::Cry(c, t) => Some(GateTemplate::cry(relabel(c, n)?, relabel(t, n)?)),
        })
        .collect();
    Ansatz::new(bits, gates)
}

/// Noiseless energy of `ansatz` at `theta` as a plain objective value.
pub fn energy_objective<'a>(
    ansatz: &'a Ansatz,
    h: &'a QubitHamiltonian,
) -> impl Fn(&[f64]) -> f64 + Sync + 'a {
    move |t: &[f64]| {
        ansatz
            .prepare(t)
            .and_then(|s| expectation(&s, h))
            .unwrap_or(f64::NAN)
    }
}
