//! Truncated supersymmetric quantum mechanics in the Fock basis.
//!
//! The boson is cut off at `lambda = 2^n_b` modes and the fermion is a single
//! qubit. Qubit 0 is the fermion and is the most significant bit of every
//! basis index, so a full index reads `f * lambda + n_boson`. The boson
//! occupation is stored big-endian across qubits `1..=n_b`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Superpotential {
    /// `W = m q^2 / 2`
    #[serde(rename = "HO")]
    HarmonicOscillator,
    /// `W = m q^2 / 2 + g q^4 / 4`
    #[serde(rename = "AHO")]
    AnharmonicOscillator,
    /// `W = m q^2 / 2 + g (q^3 / 3 + mu^2 q)`
    #[serde(rename = "DW")]
    DoubleWell,
}

impl Superpotential {
    pub const ALL: [Superpotential; 3] = [
        Superpotential::HarmonicOscillator,
        Superpotential::AnharmonicOscillator,
        Superpotential::DoubleWell,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Superpotential::HarmonicOscillator => "HO",
            Superpotential::AnharmonicOscillator => "AHO",
            Superpotential::DoubleWell => "DW",
        }
    }

    /// Whether supersymmetry is expected to break in the untruncated theory.
    ///
    /// A polynomial superpotential of even degree admits a normalizable
    /// zero-energy state; odd degree does not. This is a documented
    /// expectation, not a computation.
    pub fn expects_broken_susy(self) -> bool {
        matches!(self, Superpotential::DoubleWell)
    }
}

impl fmt::Display for Superpotential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Superpotential {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "HO" => Ok(Superpotential::HarmonicOscillator),
            "AHO" => Ok(Superpotential::AnharmonicOscillator),
            "DW" => Ok(Superpotential::DoubleWell),
            _ => Err(format!(
                "unknown superpotential {s:?} (expected HO, AHO or DW)"
            )),
        }
    }
}

/// A superpotential together with its couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuperpotentialSpec {
    pub kind: Superpotential,
    pub m: f64,
    pub g: f64,
    pub mu: f64,
}

impl SuperpotentialSpec {
    /// Unit couplings `m = g = mu = 1`.
    pub fn new(kind: Superpotential) -> Self {
        SuperpotentialSpec {
            kind,
            m: 1.0,
            g: 1.0,
            mu: 1.0,
        }
    }

    pub fn with_couplings(kind: Superpotential, m: f64, g: f64, mu: f64) -> Result<Self> {
        let spec = SuperpotentialSpec { kind, m, g, mu };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m.is_finite() && self.m > 0.0) {
            return Err(Error::InvalidMass(self.m));
        }
        if !self.g.is_finite() {
            return Err(Error::InvalidCoupling {
                name: "g",
                value: self.g,
            });
        }
        if !self.mu.is_finite() {
            return Err(Error::InvalidCoupling {
                name: "mu",
                value: self.mu,
            });
        }
        Ok(())
    }
}

/// Checks `lambda = 2^n_b` with `n_b >= 1` and returns `n_b`.
pub fn boson_qubits(lambda: usize) -> Result<usize> {
    if lambda < 2 || !lambda.is_power_of_two() {
        return Err(Error::InvalidCutoff(lambda));
    }
    Ok(lambda.trailing_zeros() as usize)
}

/// Truncated position and momentum matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct BosonOperators {
    pub lambda: usize,
    pub q: CMatrix,
    pub p: CMatrix,
}

pub fn make_boson_ops(lambda: usize, m: f64) -> Result<BosonOperators> {
    boson_qubits(lambda)?;
    if !(m.is_finite() && m > 0.0) {
        return Err(Error::InvalidMass(m));
    }
    let mut q = CMatrix::zeros(lambda, lambda);
    let mut p = CMatrix::zeros(lambda, lambda);
    let q_scale = 1.0 / (2.0 * m).sqrt();
    let p_scale = (m / 2.0).sqrt();
    for j in 0..lambda - 1 {
        let s = ((j + 1) as f64).sqrt();
        q[(j, j + 1)] = Complex64::new(q_scale * s, 0.0);
        q[(j + 1, j)] = Complex64::new(q_scale * s, 0.0);
        p[(j, j + 1)] = Complex64::new(0.0, -p_scale * s);
        p[(j + 1, j)] = Complex64::new(0.0, p_scale * s);
    }
    Ok(BosonOperators { lambda, q, p })
}

/// `W'(q)` and `W''(q)` as matrix polynomials in the truncated `q`.
pub fn superpotential_derivatives(
    spec: &SuperpotentialSpec,
    ops: &BosonOperators,
) -> Result<(CMatrix, CMatrix)> {
    spec.validate()?;
    let id = CMatrix::identity(ops.lambda, ops.lambda);
    let q = &ops.q;
    let m = Complex64::from(spec.m);
    let g = Complex64::from(spec.g);
    let out = match spec.kind {
        Superpotential::HarmonicOscillator => (q * m, &id * m),
        Superpotential::AnharmonicOscillator => {
            let q2 = q * q;
            let q3 = &q2 * q;
            (q * m + q3 * g, &id * m + q2 * (g * 3.0))
        }
        Superpotential::DoubleWell => {
            let q2 = q * q;
            let mu2 = Complex64::from(spec.mu * spec.mu);
            (q * m + (q2 + &id * mu2) * g, &id * m + q * (g * 2.0))
        }
    };
    Ok(out)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![
        Complex64::new(1.0, 0.0),
        Complex64::new(-1.0, 0.0),
    ]))
}

/// Fermion annihilation `(X + iY)/2 = |0><1|`.
pub fn fermion_annihilation() -> CMatrix {
    let mut b = CMatrix::zeros(2, 2);
    b[(0, 1)] = Complex64::new(1.0, 0.0);
    b
}

/// The qubit Hamiltonian on `1 + n_b` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitHamiltonian {
    pub spec: SuperpotentialSpec,
    pub lambda: usize,
    pub n_qubits: usize,
    pub matrix: CMatrix,
}

impl QubitHamiltonian {
    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    /// `H v` for a vector in the computational basis.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        debug_assert_eq!(v.len(), n);
        let mut out = vec![Complex64::new(0.0, 0.0); n];
        // nalgebra storage is column-major
        for (j, &vj) in v.iter().enumerate() {
            if vj.re == 0.0 && vj.im == 0.0 {
                continue;
            }
            let col = self.matrix.column(j);
            for (o, h) in out.iter_mut().zip(col.iter()) {
                *o += h * vj;
            }
        }
        out
    }

    /// Largest entry of `|H - H^dagger|`.
    pub fn hermiticity_defect(&self) -> f64 {
        max_abs(&(&self.matrix - self.matrix.adjoint()))
    }
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// `H = 1 ⊗ (p^2 + W'^2)/2 + Z ⊗ W''/2`, using `[b^dagger, b] = -Z`.
pub fn build_hamiltonian(spec: &SuperpotentialSpec, lambda: usize) -> Result<QubitHamiltonian> {
    let n_b = boson_qubits(lambda)?;
    spec.validate()?;
    let ops = make_boson_ops(lambda, spec.m)?;
    let (wp, wpp) = superpotential_derivatives(spec, &ops)?;
    let half = Complex64::from(0.5);
    let bosonic = (&ops.p * &ops.p + &wp * &wp) * half;
    let id2 = CMatrix::identity(2, 2);
    let mut matrix = kron(&id2, &bosonic) + kron(&pauli_z(), &wpp) * half;
    // Symmetrize away rounding so the Hermitian invariant holds exactly.
    let adj = matrix.adjoint();
    matrix = (&matrix + adj) * half;
    Ok(QubitHamiltonian {
        spec: *spec,
        lambda,
        n_qubits: n_b + 1,
        matrix,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Supercharges {
    pub q: CMatrix,
    pub q_dag: CMatrix,
}

/// `Q = b ⊗ (i p + W')`, `Q^dagger = b^dagger ⊗ (-i p + W')`.
pub fn build_supercharges(spec: &SuperpotentialSpec, lambda: usize) -> Result<Supercharges> {
    boson_qubits(lambda)?;
    let ops = make_boson_ops(lambda, spec.m)?;
    let (wp, _) = superpotential_derivatives(spec, &ops)?;
    let b = fermion_annihilation();
    let q = kron(&b, &(&ops.p * I + &wp));
    let q_dag = kron(&b.adjoint(), &(&ops.p * (-I) + &wp));
    Ok(Supercharges { q, q_dag })
}

/// The `k` lowest eigenvalues in ascending order.
pub fn exact_spectrum(h: &QubitHamiltonian, k: usize) -> Result<Vec<f64>> {
    let dim = h.dim();
    if k > dim {
        return Err(Error::TooManyEigenvalues { requested: k, dim });
    }
    let eig = nalgebra::SymmetricEigen::try_new(h.matrix.clone(), 1e-14, 10_000)
        .ok_or(Error::EigenNonConvergence)?;
    let mut values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::EigenNonConvergence);
    }
    values.sort_by(|a, b| a.total_cmp(b));
    values.truncate(k);
    Ok(values)
}

/// Lowest eigenvalue together with a normalized eigenvector.
pub fn ground_state(h: &QubitHamiltonian) -> Result<(f64, Vec<Complex64>)> {
    let eig = nalgebra::SymmetricEigen::try_new(h.matrix.clone(), 1e-14, 10_000)
        .ok_or(Error::EigenNonConvergence)?;
    let (idx, e0) = eig
        .eigenvalues
        .iter()
        .copied()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .ok_or(Error::EigenNonConvergence)?;
    let v = eig.eigenvectors.column(idx).iter().copied().collect();
    Ok((e0, v))
}

/// Below this cutoff small-`lambda` truncation can itself break supersymmetry.
pub const RELIABLE_CUTOFF: usize = 8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SusyVerdict {
    pub preserved: bool,
    /// `E1 - E0` when at least two levels were computed.
    pub gap: Option<f64>,
    /// Set when `lambda` is too small for the verdict to be trusted.
    pub advisory: bool,
}

impl SusyVerdict {
    pub fn from_spectrum(levels: &[f64], lambda: usize, tol: f64) -> Option<Self> {
        let e0 = *levels.first()?;
        Some(SusyVerdict {
            preserved: e0 < tol,
            gap: levels.get(1).map(|e1| e1 - e0),
            advisory: lambda < RELIABLE_CUTOFF,
        })
    }
}

impl fmt::Display for SusyVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.preserved {
            f.write_str("SUSY preserved (E0 ≈ 0)")?;
        } else {
            f.write_str("SUSY broken (E0 > 0, check degeneracy)")?;
            if let Some(gap) = self.gap {
                write!(f, " [E1 - E0 = {gap:.3e}]")?;
            }
        }
        if self.advisory {
            f.write_str(" (advisory: lambda < 8, truncation artifacts likely)")?;
        }
        Ok(())
    }
}
