//! Dense statevector simulation of rotation-gate circuits.

mod sampling;

pub use sampling::{sample_circuit_expectation, sample_expectation, NoiseModel, SampledEstimate};

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::QubitHamiltonian;
use crate::pauli::{Pauli, PauliSum};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Largest register the dense simulator accepts.
pub const MAX_QUBITS: usize = 24;

/// Computational basis state, written fermion-first and read big-endian.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BasisState(Vec<bool>);

impl BasisState {
    pub fn zeros(n_qubits: usize) -> Self {
        BasisState(vec![false; n_qubits])
    }

    pub fn from_bits(bits: Vec<bool>) -> Self {
        BasisState(bits)
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn index(&self) -> usize {
        self.0.iter().fold(0, |acc, &b| (acc << 1) | b as usize)
    }
}

impl FromStr for BasisState {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() || s.len() > MAX_QUBITS {
            return Err(Error::InvalidBitstring(s.to_string()));
        }
        s.chars()
            .map(|c| match c {
                '0' => Some(false),
                '1' => Some(true),
                _ => None,
            })
            .collect::<Option<Vec<_>>>()
            .map(BasisState)
            .ok_or_else(|| Error::InvalidBitstring(s.to_string()))
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.0 {
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl Serialize for BasisState {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for BasisState {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    amps: Vec<Complex64>,
    n_qubits: usize,
}

impl StateVector {
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::DimensionMismatch {
                expected: dim.next_power_of_two().max(2),
                actual: dim,
            });
        }
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidGate(
                "state has zero or non-finite norm".into(),
            ));
        }
        let amps = amps.into_iter().map(|a| a / norm).collect();
        Ok(StateVector {
            amps,
            n_qubits: dim.trailing_zeros() as usize,
        })
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.n_qubits - 1 - qubit)
    }

    /// Applies a 2x2 unitary `[[u00, u01], [u10, u11]]` to `target`,
    /// conditioned on `control` being `|1>` when given.
    pub(crate) fn apply_matrix(
        &mut self,
        target: usize,
        control: Option<usize>,
        u: [Complex64; 4],
    ) {
        let t = self.bit(target);
        let c = control.map_or(0, |c| self.bit(c));
        for i in 0..self.amps.len() {
            if i & t != 0 || i & c != c {
                continue;
            }
            let j = i | t;
            let (a0, a1) = (self.amps[i], self.amps[j]);
            self.amps[i] = u[0] * a0 + u[1] * a1;
            self.amps[j] = u[2] * a0 + u[3] * a1;
        }
    }

    pub(crate) fn apply_pauli(&mut self, qubit: usize, p: Pauli) {
        let b = self.bit(qubit);
        match p {
            Pauli::I => {}
            Pauli::X => {
                for i in 0..self.amps.len() {
                    if i & b == 0 {
                        self.amps.swap(i, i | b);
                    }
                }
            }
            Pauli::Y => {
                let i_unit = Complex64::new(0.0, 1.0);
                for i in 0..self.amps.len() {
                    if i & b == 0 {
                        let (a0, a1) = (self.amps[i], self.amps[i | b]);
                        self.amps[i] = -i_unit * a1;
                        self.amps[i | b] = i_unit * a0;
                    }
                }
            }
            Pauli::Z => {
                for (i, a) in self.amps.iter_mut().enumerate() {
                    if i & b != 0 {
                        *a = -*a;
                    }
                }
            }
        }
    }

    pub fn inner(&self, other: &[Complex64]) -> Complex64 {
        self.amps.iter().zip(other).map(|(a, b)| a.conj() * b).sum()
    }
}

pub fn init_basis_state(bits: &BasisState) -> StateVector {
    let mut amps = vec![ZERO; 1 << bits.len()];
    amps[bits.index()] = ONE;
    StateVector {
        amps,
        n_qubits: bits.len(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum GateKind {
    RY,
    RZ,
    CRY,
}

/// A parametrized gate slot: kind and wiring, no angle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GateTemplate {
    pub kind: GateKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub control: Option<usize>,
    pub target: usize,
}

impl GateTemplate {
    pub fn ry(target: usize) -> Self {
        GateTemplate {
            kind: GateKind::RY,
            control: None,
            target,
        }
    }

    pub fn rz(target: usize) -> Self {
        GateTemplate {
            kind: GateKind::RZ,
            control: None,
            target,
        }
    }

    pub fn cry(control: usize, target: usize) -> Self {
        GateTemplate {
            kind: GateKind::CRY,
            control: Some(control),
            target,
        }
    }

    pub fn with_angle(self, theta: f64) -> Gate {
        Gate {
            template: self,
            theta,
        }
    }

    pub fn validate(&self, n_qubits: usize) -> Result<()> {
        for q in std::iter::once(self.target).chain(self.control) {
            if q >= n_qubits {
                return Err(Error::QubitOutOfRange { index: q, n_qubits });
            }
        }
        match (self.kind, self.control) {
            (GateKind::CRY, Some(c)) if c == self.target => {
                Err(Error::InvalidGate(format!("control equals target ({c})")))
            }
            (GateKind::CRY, None) => Err(Error::InvalidGate("CRY needs a control qubit".into())),
            (GateKind::RY | GateKind::RZ, Some(_)) => Err(Error::InvalidGate(format!(
                "{:?} takes no control qubit",
                self.kind
            ))),
            _ => Ok(()),
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        self.control.is_some()
    }

    fn matrix(&self, theta: f64) -> [Complex64; 4] {
        let (s, c) = (theta / 2.0).sin_cos();
        match self.kind {
            GateKind::RY | GateKind::CRY => [c.into(), (-s).into(), s.into(), c.into()],
            GateKind::RZ => [
                Complex64::from_polar(1.0, -theta / 2.0),
                ZERO,
                ZERO,
                Complex64::from_polar(1.0, theta / 2.0),
            ],
        }
    }

    /// `G v` for the Hermitian generator `G` with `gate(theta) = exp(-i theta G)`:
    /// `Y/2`, `Z/2`, or `|1><1|_c ⊗ Y/2`.
    pub fn apply_generator(&self, state: &StateVector) -> Vec<Complex64> {
        let mut out = state.clone();
        match self.kind {
            GateKind::RY | GateKind::CRY => out.apply_pauli(self.target, Pauli::Y),
            GateKind::RZ => out.apply_pauli(self.target, Pauli::Z),
        }
        if let Some(c) = self.control {
            let cb = out.bit(c);
            for (i, a) in out.amps.iter_mut().enumerate() {
                if i & cb == 0 {
                    *a = ZERO;
                }
            }
        }
        out.amps.iter_mut().for_each(|a| *a *= 0.5);
        out.amps
    }
}

impl fmt::Display for GateTemplate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.control {
            Some(c) => write!(f, "{:?}[{}, {}]", self.kind, c, self.target),
            None => write!(f, "{:?}[{}]", self.kind, self.target),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gate {
    pub template: GateTemplate,
    pub theta: f64,
}

/// `RY(θ) = exp(-iθY/2)`, `RZ(θ) = exp(-iθZ/2)`, `CRY` = controlled `RY`.
pub fn apply_gate(state: &mut StateVector, gate: &Gate) -> Result<()> {
    let g = &gate.template;
    g.validate(state.n_qubits)?;
    state.apply_matrix(g.target, g.control, g.matrix(gate.theta));
    Ok(())
}

/// Initial basis state followed by an ordered list of parametrized gates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ansatz {
    pub initial_bitstring: BasisState,
    pub gates: Vec<GateTemplate>,
}

impl Ansatz {
    pub fn new(initial_bitstring: BasisState, gates: Vec<GateTemplate>) -> Result<Self> {
        let a = Ansatz {
            initial_bitstring,
            gates,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn n_qubits(&self) -> usize {
        self.initial_bitstring.len()
    }

    pub fn n_params(&self) -> usize {
        self.gates.len()
    }

    pub fn validate(&self) -> Result<()> {
        self.gates
            .iter()
            .try_for_each(|g| g.validate(self.n_qubits()))
    }

    /// Parses and validates an ansatz from JSON.
    pub fn from_json(s: &str) -> Result<Self> {
        let a: Ansatz = serde_json::from_str(s)?;
        a.validate()?;
        Ok(a)
    }

    pub fn push(&mut self, gate: GateTemplate) -> Result<()> {
        gate.validate(self.n_qubits())?;
        self.gates.push(gate);
        Ok(())
    }

    /// Runs the circuit at `theta` from the initial basis state.
    pub fn prepare(&self, theta: &[f64]) -> Result<StateVector> {
        if theta.len() != self.gates.len() {
            return Err(Error::DimensionMismatch {
                expected: self.gates.len(),
                actual: theta.len(),
            });
        }
        let mut state = init_basis_state(&self.initial_bitstring);
        for (g, &t) in self.gates.iter().zip(theta) {
            state.apply_matrix(g.target, g.control, g.matrix(t));
        }
        Ok(state)
    }

    pub fn energy(&self, h: &QubitHamiltonian, theta: &[f64]) -> Result<f64> {
        expectation(&self.prepare(theta)?, h)
    }
}

impl fmt::Display for Ansatz {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|{}>", self.initial_bitstring)?;
        for g in &self.gates {
            write!(f, " {g}")?;
        }
        Ok(())
    }
}

/// Anything whose expectation value can be taken against a statevector.
pub trait Observable {
    fn n_qubits(&self) -> usize;
    fn expectation_complex(&self, amps: &[Complex64]) -> Complex64;
}

impl Observable for QubitHamiltonian {
    fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    fn expectation_complex(&self, amps: &[Complex64]) -> Complex64 {
        let hv = self.apply(amps);
        amps.iter().zip(&hv).map(|(a, b)| a.conj() * b).sum()
    }
}

impl Observable for PauliSum {
    fn n_qubits(&self) -> usize {
        PauliSum::n_qubits(self)
    }

    fn expectation_complex(&self, amps: &[Complex64]) -> Complex64 {
        PauliSum::expectation(self, amps)
    }
}

/// `<psi|H|psi>`; errors on dimension mismatch or a non-negligible imaginary part.
pub fn expectation<O: Observable + ?Sized>(state: &StateVector, op: &O) -> Result<f64> {
    if op.n_qubits() != state.n_qubits {
        return Err(Error::DimensionMismatch {
            expected: op.n_qubits(),
            actual: state.n_qubits,
        });
    }
    let e = op.expectation_complex(&state.amps);
    if e.im.abs() > 1e-10 * e.re.abs().max(1.0) {
        return Err(Error::NotHermitian(e.im.abs()));
    }
    Ok(e.re)
}
