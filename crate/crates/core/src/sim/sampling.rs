//! Shot-based energy estimation with a stochastic Pauli noise proxy.
//!
//! Each qubit-wise commuting group is measured with its own `shots`. When
//! gate noise is on, every shot is an independent trajectory: after each gate
//! a uniformly random non-identity Pauli on the gate's qubits is inserted with
//! probability `p1` (one qubit) or `p2` (two qubits). Basis-change rotations
//! count as one-qubit gates. Readout flips are applied to the sampled bits.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{init_basis_state, Ansatz, StateVector};
use crate::error::{Error, Result};
use crate::pauli::{group_commuting, CommutingGroup, Pauli, PauliSum};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Depolarizing probability after each one-qubit gate.
    pub p1: f64,
    /// Depolarizing probability after each two-qubit gate.
    pub p2: f64,
    /// Probability a true 0 is read as 1.
    pub r01: f64,
    /// Probability a true 1 is read as 0.
    pub r10: f64,
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        NoiseModel::default()
    }

    pub fn new(p1: f64, p2: f64, r01: f64, r10: f64) -> Result<Self> {
        let m = NoiseModel { p1, p2, r01, r10 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("p1", self.p1),
            ("p2", self.p2),
            ("r01", self.r01),
            ("r10", self.r10),
        ] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name, value });
            }
        }
        Ok(())
    }

    pub fn has_gate_noise(&self) -> bool {
        self.p1 > 0.0 || self.p2 > 0.0
    }

    pub fn has_readout_noise(&self) -> bool {
        self.r01 > 0.0 || self.r10 > 0.0
    }

    pub fn is_noiseless(&self) -> bool {
        !self.has_gate_noise() && !self.has_readout_noise()
    }
}

impl FromStr for NoiseModel {
    type Err = Error;

    /// Parses `p1,p2,r01,r10`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 4 {
            return Err(Error::InvalidNoiseSpec(s.to_string()));
        }
        let mut v = [0.0; 4];
        for (slot, part) in v.iter_mut().zip(&parts) {
            *slot = part
                .parse::<f64>()
                .map_err(|_| Error::InvalidNoiseSpec(s.to_string()))?;
        }
        NoiseModel::new(v[0], v[1], v[2], v[3])
    }
}

impl fmt::Display for NoiseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{},{},{}", self.p1, self.p2, self.r01, self.r10)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SampledEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

enum Preparation<'a> {
    State(&'a StateVector),
    Circuit {
        ansatz: &'a Ansatz,
        theta: &'a [f64],
    },
}

impl Preparation<'_> {
    fn n_qubits(&self) -> usize {
        match self {
            Preparation::State(s) => s.n_qubits(),
            Preparation::Circuit { ansatz, .. } => ansatz.n_qubits(),
        }
    }

    fn ideal(&self) -> StateVector {
        match self {
            Preparation::State(s) => (*s).clone(),
            Preparation::Circuit { ansatz, theta } => {
                ansatz.prepare(theta).expect("validated before sampling")
            }
        }
    }
}

/// Position in the circuit after which an error is inserted, and the error.
type ErrorEvent = (usize, usize, Pauli);

const PAULIS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn basis_rotation(p: Pauli) -> Option<[Complex64; 4]> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    match p {
        Pauli::X => Some([h.into(), h.into(), h.into(), (-h).into()]),
        // H S^dagger maps the Y eigenbasis onto the computational basis.
        Pauli::Y => Some([
            h.into(),
            Complex64::new(0.0, -h),
            h.into(),
            Complex64::new(0.0, h),
        ]),
        Pauli::I | Pauli::Z => None,
    }
}

struct GroupPlan {
    rotations: Vec<(usize, [Complex64; 4])>,
    /// `(coeff, support mask)` per term.
    terms: Vec<(f64, usize)>,
}

impl GroupPlan {
    fn new(group: &CommutingGroup) -> Self {
        let n = group.basis.len();
        let rotations = group
            .basis
            .iter()
            .enumerate()
            .filter_map(|(q, &p)| basis_rotation(p).map(|u| (q, u)))
            .collect();
        let terms = group
            .terms
            .iter()
            .map(|t| {
                let mask = t
                    .string
                    .letters()
                    .iter()
                    .enumerate()
                    .filter(|(_, &l)| l != Pauli::I)
                    .fold(0usize, |m, (q, _)| m | (1 << (n - 1 - q)));
                (t.coeff, mask)
            })
            .collect();
        GroupPlan { rotations, terms }
    }

    fn value(&self, outcome: usize) -> f64 {
        self.terms
            .iter()
            .map(|&(c, mask)| {
                if (outcome & mask).count_ones().is_multiple_of(2) {
                    c
                } else {
                    -c
                }
            })
            .sum()
    }
}

fn cumulative(probs: &[f64]) -> Vec<f64> {
    let mut acc = 0.0;
    probs
        .iter()
        .map(|p| {
            acc += p;
            acc
        })
        .collect()
}

fn draw(cdf: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total = *cdf.last().unwrap_or(&1.0);
    let u = rng.gen::<f64>() * total;
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn draw_errors(
    prep: &Preparation<'_>,
    plan: &GroupPlan,
    noise: &NoiseModel,
    rng: &mut ChaCha8Rng,
    out: &mut Vec<ErrorEvent>,
) {
    out.clear();
    let mut pos = 0;
    if let Preparation::Circuit { ansatz, .. } = prep {
        for g in &ansatz.gates {
            match g.control {
                Some(c) if noise.p2 > 0.0 && rng.gen::<f64>() < noise.p2 => {
                    // one of the 15 non-identity two-qubit Paulis
                    let k = rng.gen_range(1..16);
                    out.push((pos, c, PAULIS[k / 4]));
                    out.push((pos, g.target, PAULIS[k % 4]));
                }
                None if noise.p1 > 0.0 && rng.gen::<f64>() < noise.p1 => {
                    out.push((pos, g.target, PAULIS[rng.gen_range(1..4)]));
                }
                _ => {}
            }
            pos += 1;
        }
    }
    if noise.p1 > 0.0 {
        for &(q, _) in &plan.rotations {
            if rng.gen::<f64>() < noise.p1 {
                out.push((pos, q, PAULIS[rng.gen_range(1..4)]));
            }
            pos += 1;
        }
    }
}

fn run_trajectory(prep: &Preparation<'_>, plan: &GroupPlan, errors: &[ErrorEvent]) -> StateVector {
    let mut pos = 0;
    let inject = |state: &mut StateVector, pos: usize| {
        for &(_, q, p) in errors.iter().filter(|e| e.0 == pos) {
            state.apply_pauli(q, p);
        }
    };
    let mut state = match prep {
        Preparation::State(s) => (*s).clone(),
        Preparation::Circuit { ansatz, theta } => {
            let mut s = init_basis_state(&ansatz.initial_bitstring);
            for (g, &t) in ansatz.gates.iter().zip(theta.iter()) {
                s.apply_matrix(g.target, g.control, g.matrix(t));
                inject(&mut s, pos);
                pos += 1;
            }
            s
        }
    };
    for &(q, u) in &plan.rotations {
        state.apply_matrix(q, None, u);
        inject(&mut state, pos);
        pos += 1;
    }
    state
}

fn apply_readout(
    mut outcome: usize,
    n_qubits: usize,
    noise: &NoiseModel,
    rng: &mut ChaCha8Rng,
) -> usize {
    for q in 0..n_qubits {
        let bit = 1 << q;
        let flip = if outcome & bit == 0 {
            noise.r01
        } else {
            noise.r10
        };
        if flip > 0.0 && rng.gen::<f64>() < flip {
            outcome ^= bit;
        }
    }
    outcome
}

fn estimate(
    prep: Preparation<'_>,
    sum: &PauliSum,
    shots: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<SampledEstimate> {
    if shots == 0 {
        return Err(Error::ZeroShots);
    }
    noise.validate()?;
    let n = prep.n_qubits();
    if sum.n_qubits() != n && !sum.is_empty() {
        return Err(Error::DimensionMismatch {
            expected: sum.n_qubits(),
            actual: n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ideal = prep.ideal();
    let mut total = 0.0;
    let mut variance = 0.0;
    let mut errors = Vec::new();
    for group in group_commuting(sum) {
        let plan = GroupPlan::new(&group);
        if plan.terms.iter().all(|&(_, mask)| mask == 0) {
            total += plan.value(0);
            continue;
        }
        let mut rotated = ideal.clone();
        for &(q, u) in &plan.rotations {
            rotated.apply_matrix(q, None, u);
        }
        let ideal_cdf = cumulative(&rotated.probabilities());
        let (mut mean, mut m2) = (0.0, 0.0);
        for shot in 0..shots {
            let outcome = if noise.has_gate_noise() {
                draw_errors(&prep, &plan, noise, &mut rng, &mut errors);
                if errors.is_empty() {
                    draw(&ideal_cdf, &mut rng)
                } else {
                    let traj = run_trajectory(&prep, &plan, &errors);
                    draw(&cumulative(&traj.probabilities()), &mut rng)
                }
            } else {
                draw(&ideal_cdf, &mut rng)
            };
            let outcome = if noise.has_readout_noise() {
                apply_readout(outcome, n, noise, &mut rng)
            } else {
                outcome
            };
            // Welford update
            let x = plan.value(outcome);
            let delta = x - mean;
            mean += delta / (shot + 1) as f64;
            m2 += delta * (x - mean);
        }
        total += mean;
        // population variance keeps the binomial bound exact
        variance += m2 / (shots * shots) as f64;
    }
    Ok(SampledEstimate {
        estimate: total,
        stderr: variance.sqrt(),
    })
}

/// Shot-based estimate of `<psi|sum|psi>` for an already prepared state.
///
/// Gate noise only touches the basis-change rotations here; use
/// [`sample_circuit_expectation`] to also corrupt the preparation circuit.
pub fn sample_expectation(
    state: &StateVector,
    sum: &PauliSum,
    shots: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<SampledEstimate> {
    estimate(Preparation::State(state), sum, shots, noise, seed)
}

/// Shot-based estimate with each shot's trajectory running the full ansatz.
pub fn sample_circuit_expectation(
    ansatz: &Ansatz,
    theta: &[f64],
    sum: &PauliSum,
    shots: usize,
    noise: &NoiseModel,
    seed: u64,
) -> Result<SampledEstimate> {
    ansatz.validate()?;
    if theta.len() != ansatz.n_params() {
        return Err(Error::DimensionMismatch {
            expected: ansatz.n_params(),
            actual: theta.len(),
        });
    }
    estimate(
        Preparation::Circuit { ansatz, theta },
        sum,
        shots,
        noise,
        seed,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliTerm;
    use crate::sim::{expectation, GateTemplate};

    fn single(coeff: f64, s: &str) -> PauliSum {
        PauliSum::new(
            s.len(),
            vec![PauliTerm {
                coeff,
                string: s.parse().unwrap(),
            }],
        )
        .unwrap()
    }

    fn plus_state() -> StateVector {
        let a = Ansatz::new("0".parse().unwrap(), vec![GateTemplate::ry(0)]).unwrap();
        a.prepare(&[std::f64::consts::FRAC_PI_2]).unwrap()
    }

    #[test]
    fn noise_spec_parsing() {
        let m: NoiseModel = "0.01, 0.02,0,0.05".parse().unwrap();
        assert_eq!(m, NoiseModel::new(0.01, 0.02, 0.0, 0.05).unwrap());
        assert!("0.1,0.2,0.3".parse::<NoiseModel>().is_err());
        assert!("0.1,0.2,0.3,x".parse::<NoiseModel>().is_err());
        assert!("0.1,1.2,0.3,0".parse::<NoiseModel>().is_err());
        assert!("nan,0,0,0".parse::<NoiseModel>().is_err());
    }

    #[test]
    fn zero_shots_rejected() {
        let s = plus_state();
        assert_eq!(
            sample_expectation(&s, &single(1.0, "X"), 0, &NoiseModel::noiseless(), 1),
            Err(Error::ZeroShots)
        );
    }

    #[test]
    fn basis_rotations_read_the_right_axis() {
        // |+> has <X> = 1 exactly, so sampling has no spread.
        let s = plus_state();
        let e =
            sample_expectation(&s, &single(1.0, "X"), 100, &NoiseModel::noiseless(), 3).unwrap();
        assert!((e.estimate - 1.0).abs() < 1e-12);
        assert!(e.stderr < 1e-12);
        // RX-like state with <Y> = 1: RZ(π/2) on |+>.
        let a = Ansatz::new(
            "0".parse().unwrap(),
            vec![GateTemplate::ry(0), GateTemplate::rz(0)],
        )
        .unwrap();
        let s = a
            .prepare(&[std::f64::consts::FRAC_PI_2, std::f64::consts::FRAC_PI_2])
            .unwrap();
        assert!((expectation(&s, &single(1.0, "Y")).unwrap() - 1.0).abs() < 1e-12);
        let e = sample_expectation(&s, &single(1.0, "Y"), 50, &NoiseModel::noiseless(), 3).unwrap();
        assert!((e.estimate - 1.0).abs() < 1e-12);
    }

    #[test]
    fn binomial_stderr_bound() {
        let s = plus_state();
        let e =
            sample_expectation(&s, &single(1.0, "Z"), 4096, &NoiseModel::noiseless(), 11).unwrap();
        assert!(e.stderr <= 1.0 / 4096f64.sqrt() + 1e-12);
        assert!(e.estimate.abs() < 5.0 * e.stderr);
    }

    #[test]
    fn seeded_runs_repeat() {
        let s = plus_state();
        let sum = single(0.7, "Z");
        let a = sample_expectation(&s, &sum, 500, &NoiseModel::noiseless(), 42).unwrap();
        let b = sample_expectation(&s, &sum, 500, &NoiseModel::noiseless(), 42).unwrap();
        assert_eq!(a, b);
        let c = sample_expectation(&s, &sum, 500, &NoiseModel::noiseless(), 43).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn full_readout_flip_inverts_z() {
        let s = init_basis_state(&"0".parse().unwrap());
        let noise = NoiseModel::new(0.0, 0.0, 1.0, 1.0).unwrap();
        let e = sample_expectation(&s, &single(1.0, "Z"), 64, &noise, 0).unwrap();
        assert_eq!(e.estimate, -1.0);
    }

    #[test]
    fn full_depolarizing_scrambles_z() {
        // p2 = 1: a random non-identity two-qubit Pauli follows the CRY on
        // every shot.
        let a = Ansatz::new("11".parse().unwrap(), vec![GateTemplate::cry(0, 1)]).unwrap();
        let noise = NoiseModel::new(0.0, 1.0, 0.0, 0.0).unwrap();
        let e =
            sample_circuit_expectation(&a, &[0.0], &single(1.0, "IZ"), 20_000, &noise, 5).unwrap();
        // Target Z after a uniformly random non-II Pauli: flipped by X or Y on
        // the target (8 of 15), so <Z> = -(7 - 8)/15 = 1/15.
        assert!((e.estimate - 1.0 / 15.0).abs() < 5.0 * e.stderr, "{e:?}");
    }
}
