//! Pauli-string expansion of qubit operators.
//!
//! Letters are written fermion-first: position 0 is qubit 0, the most
//! significant bit of a basis index.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::model::{CMatrix, QubitHamiltonian};

/// Default absolute pruning threshold for [`decompose`].
pub const DEFAULT_THRESHOLD: f64 = 1e-12;

/// Largest register [`decompose`] will enumerate (4^N strings).
pub const MAX_DECOMPOSE_QUBITS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PauliString(Vec<Pauli>);

impl PauliString {
    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString(letters)
    }

    pub fn identity(n_qubits: usize) -> Self {
        PauliString(vec![Pauli::I; n_qubits])
    }

    pub fn letters(&self) -> &[Pauli] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().all(|&p| p == Pauli::I)
    }

    /// Bit masks `(x, z, n_y)` such that
    /// `P|j> = i^n_y (-1)^popcount(j & z) |j ^ x>`.
    pub fn masks(&self) -> (usize, usize, u32) {
        let n = self.0.len();
        let mut x = 0usize;
        let mut z = 0usize;
        let mut n_y = 0u32;
        for (q, &p) in self.0.iter().enumerate() {
            let bit = 1usize << (n - 1 - q);
            match p {
                Pauli::I => {}
                Pauli::X => x |= bit,
                Pauli::Y => {
                    x |= bit;
                    z |= bit;
                    n_y += 1;
                }
                Pauli::Z => z |= bit,
            }
        }
        (x, z, n_y)
    }

    /// Dense matrix of the tensor product.
    pub fn to_matrix(&self) -> CMatrix {
        let dim = 1usize << self.len();
        let (x, z, n_y) = self.masks();
        let base = i_pow(n_y);
        let mut m = CMatrix::zeros(dim, dim);
        for j in 0..dim {
            m[(j ^ x, j)] = base * sign(j & z);
        }
        m
    }

    /// `P v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        let (x, z, n_y) = self.masks();
        let base = i_pow(n_y);
        let mut out = vec![Complex64::new(0.0, 0.0); v.len()];
        for (j, &a) in v.iter().enumerate() {
            out[j ^ x] = base * sign(j & z) * a;
        }
        out
    }

    /// `<v|P|v>`.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        let (x, z, n_y) = self.masks();
        let mut acc = Complex64::new(0.0, 0.0);
        for (j, &a) in v.iter().enumerate() {
            acc += v[j ^ x].conj() * a * sign(j & z);
        }
        acc * i_pow(n_y)
    }
}

fn i_pow(n: u32) -> Complex64 {
    match n % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn sign(bits: usize) -> f64 {
    if bits.count_ones().is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.0 {
            write!(f, "{}", p.as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.chars()
            .map(Pauli::from_char)
            .collect::<Option<Vec<_>>>()
            .map(PauliString)
            .ok_or_else(|| Error::InvalidPauliString(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PauliTerm {
    pub coeff: f64,
    #[serde(with = "string_form")]
    pub string: PauliString,
}

mod string_form {
    use super::PauliString;
    use serde::{de::Error as _, Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(p: &PauliString, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(p)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<PauliString, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(D::Error::custom)
    }
}

/// Weighted sum of Pauli strings with real coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliSum {
    terms: Vec<PauliTerm>,
    n_qubits: usize,
}

impl PauliSum {
    pub fn new(n_qubits: usize, terms: Vec<PauliTerm>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(terms.len());
        for t in &terms {
            if t.string.len() != n_qubits {
                return Err(Error::DimensionMismatch {
                    expected: n_qubits,
                    actual: t.string.len(),
                });
            }
            if !t.coeff.is_finite() {
                return Err(Error::Json(format!(
                    "non-finite coefficient for {}",
                    t.string
                )));
            }
            if !seen.insert(&t.string) {
                return Err(Error::DuplicatePauliString(t.string.to_string()));
            }
        }
        Ok(PauliSum { terms, n_qubits })
    }

    pub fn empty(n_qubits: usize) -> Self {
        PauliSum {
            terms: Vec::new(),
            n_qubits,
        }
    }

    pub fn terms(&self) -> &[PauliTerm] {
        &self.terms
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, s: &str) -> Option<f64> {
        let s: PauliString = s.parse().ok()?;
        self.terms.iter().find(|t| t.string == s).map(|t| t.coeff)
    }

    /// `<v|sum|v>`, real part only.
    pub fn expectation(&self, v: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.string.expectation(v) * t.coeff)
            .sum()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("PauliSum serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

impl Serialize for PauliSum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.terms.serialize(s)
    }
}

impl<'de> Deserialize<'de> for PauliSum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms = Vec::<PauliTerm>::deserialize(d)?;
        let n = terms.first().map_or(0, |t| t.string.len());
        PauliSum::new(n, terms).map_err(D::Error::custom)
    }
}

/// Expand `H` as `sum_s tr(P_s H) / 2^N · P_s`, dropping `|c| <= threshold`.
pub fn decompose(h: &QubitHamiltonian, threshold: f64) -> Result<PauliSum> {
    decompose_matrix(&h.matrix, h.n_qubits, threshold)
}

pub fn decompose_matrix(m: &CMatrix, n_qubits: usize, threshold: f64) -> Result<PauliSum> {
    if n_qubits > MAX_DECOMPOSE_QUBITS {
        return Err(Error::DimensionMismatch {
            expected: MAX_DECOMPOSE_QUBITS,
            actual: n_qubits,
        });
    }
    let dim = 1usize << n_qubits;
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            actual: m.nrows().max(m.ncols()),
        });
    }
    let threshold = threshold.max(0.0);
    let mut terms = Vec::new();
    for code in 0..(1usize << (2 * n_qubits)) {
        let letters = (0..n_qubits)
            .map(|q| Pauli::ALL[(code >> (2 * (n_qubits - 1 - q))) & 3])
            .collect();
        let string = PauliString(letters);
        let (x, z, n_y) = string.masks();
        // tr(P H) = sum_k <k^x|P|k> H[k, k^x]
        let mut tr = Complex64::new(0.0, 0.0);
        for k in 0..dim {
            tr += m[(k, k ^ x)] * sign(k & z);
        }
        let c = tr * i_pow(n_y) / dim as f64;
        if c.im.abs() > 1e-10 {
            return Err(Error::NotHermitian(c.im.abs()));
        }
        if c.re.abs() > threshold {
            terms.push(PauliTerm {
                coeff: c.re,
                string,
            });
        }
    }
    Ok(PauliSum { terms, n_qubits })
}

/// `sum_s c_s P_s` as a dense matrix.
pub fn reconstruct(sum: &PauliSum) -> CMatrix {
    let dim = 1usize << sum.n_qubits;
    let mut m = CMatrix::zeros(dim, dim);
    for t in &sum.terms {
        let (x, z, n_y) = t.string.masks();
        let base = i_pow(n_y) * t.coeff;
        for j in 0..dim {
            m[(j ^ x, j)] += base * sign(j & z);
        }
    }
    m
}

/// Terms that can be read out from a single per-qubit measurement setting.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutingGroup {
    /// Measurement basis per qubit; `I` where no term in the group acts.
    pub basis: Vec<Pauli>,
    pub terms: Vec<PauliTerm>,
}

impl CommutingGroup {
    fn accepts(&self, s: &PauliString) -> bool {
        self.basis
            .iter()
            .zip(s.letters())
            .all(|(&b, &l)| l == Pauli::I || b == Pauli::I || b == l)
    }

    fn push(&mut self, t: PauliTerm) {
        for (b, &l) in self.basis.iter_mut().zip(t.string.letters()) {
            if l != Pauli::I {
                *b = l;
            }
        }
        self.terms.push(t);
    }
}

/// Greedy first-fit qubit-wise commuting partition, visiting terms by
/// descending `|c|` and then lexicographic string.
pub fn group_commuting(sum: &PauliSum) -> Vec<CommutingGroup> {
    let mut order: Vec<&PauliTerm> = sum.terms.iter().collect();
    order.sort_by(|a, b| {
        b.coeff
            .abs()
            .total_cmp(&a.coeff.abs())
            .then_with(|| a.string.cmp(&b.string))
    });
    let mut groups: Vec<CommutingGroup> = Vec::new();
    for t in order {
        match groups.iter_mut().find(|g| g.accepts(&t.string)) {
            Some(g) => g.push(t.clone()),
            None => {
                let mut g = CommutingGroup {
                    basis: vec![Pauli::I; sum.n_qubits],
                    terms: Vec::new(),
                };
                g.push(t.clone());
                groups.push(g);
            }
        }
    }
    groups
}

/// Letter rule: every qubit sees at most one non-identity letter.
pub fn is_qubit_wise_commuting(terms: &[PauliTerm]) -> bool {
    let Some(first) = terms.first() else {
        return true;
    };
    (0..first.string.len()).all(|q| {
        let mut seen = Pauli::I;
        terms.iter().all(|t| {
            let l = t.string.letters()[q];
            if l == Pauli::I {
                return true;
            }
            if seen == Pauli::I {
                seen = l;
            }
            seen == l
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{build_hamiltonian, max_abs, Superpotential, SuperpotentialSpec};

    fn sum_of(pairs: &[(f64, &str)]) -> PauliSum {
        let n = pairs.first().map_or(0, |p| p.1.len());
        PauliSum::new(
            n,
            pairs
                .iter()
                .map(|&(c, s)| PauliTerm {
                    coeff: c,
                    string: s.parse().unwrap(),
                })
                .collect(),
        )
        .unwrap()
    }

    fn ham(kind: Superpotential, lambda: usize) -> QubitHamiltonian {
        build_hamiltonian(&SuperpotentialSpec::new(kind), lambda).unwrap()
    }

    #[test]
    fn ho_lambda_two_terms() {
        let s = decompose(
            &ham(Superpotential::HarmonicOscillator, 2),
            DEFAULT_THRESHOLD,
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert!((s.coefficient("II").unwrap() - 0.5).abs() < 1e-12);
        assert!((s.coefficient("ZI").unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn dw_lambda_two_terms() {
        let s = decompose(&ham(Superpotential::DoubleWell, 2), DEFAULT_THRESHOLD).unwrap();
        assert_eq!(s.len(), 4);
        let expect = [
            ("II", 1.625),
            ("IX", 1.060_660_171_779_821_2),
            ("ZI", 0.5),
            ("ZX", std::f64::consts::FRAC_1_SQRT_2),
        ];
        for (p, c) in expect {
            assert!((s.coefficient(p).unwrap() - c).abs() < 1e-12, "{p}");
        }
    }

    #[test]
    fn decompose_rejects_wrong_dimension() {
        let h = ham(Superpotential::DoubleWell, 4);
        assert!(matches!(
            decompose_matrix(&h.matrix, 2, DEFAULT_THRESHOLD),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn reconstruct_edge_cases() {
        assert_eq!(reconstruct(&PauliSum::empty(2)), CMatrix::zeros(4, 4));
        let m = reconstruct(&sum_of(&[(1.0, "ZI")]));
        let expected = CMatrix::from_diagonal(&nalgebra::DVector::from_vec(
            [1.0, 1.0, -1.0, -1.0].map(Complex64::from).to_vec(),
        ));
        assert_eq!(m, expected);
    }

    #[test]
    fn round_trip_aho_lambda_four() {
        let h = ham(Superpotential::AnharmonicOscillator, 4);
        let s = decompose(&h, DEFAULT_THRESHOLD).unwrap();
        assert!(max_abs(&(reconstruct(&s) - &h.matrix)) < 1e-12);
    }

    #[test]
    fn single_qubit_action() {
        let y: PauliString = "Y".parse().unwrap();
        let out = y.apply(&[Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)]);
        assert_eq!(out[1], Complex64::new(0.0, 1.0));
        assert_eq!(y.to_matrix()[(0, 1)], Complex64::new(0.0, -1.0));
    }

    #[test]
    fn grouping_examples() {
        let g = group_commuting(&sum_of(&[
            (1.625, "II"),
            (1.06, "IX"),
            (0.5, "ZI"),
            (0.7, "ZX"),
        ]));
        assert_eq!(g.len(), 1);
        assert_eq!(g[0].basis, vec![Pauli::Z, Pauli::X]);

        assert_eq!(
            group_commuting(&sum_of(&[(1.0, "XI"), (1.0, "ZI")])).len(),
            2
        );
        assert!(group_commuting(&PauliSum::empty(3)).is_empty());
    }

    #[test]
    fn parse_rejects_bad_letters() {
        assert!("IXq".parse::<PauliString>().is_err());
        assert!("ixz".parse::<PauliString>().is_err());
        assert_eq!("".parse::<PauliString>().unwrap().len(), 0);
    }

    #[test]
    fn json_shape() {
        let s = sum_of(&[(0.5, "II"), (0.5, "ZI")]);
        let text = s.to_json();
        assert_eq!(
            text,
            r#"[{"coeff":0.5,"string":"II"},{"coeff":0.5,"string":"ZI"}]"#
        );
        assert_eq!(PauliSum::from_json(&text).unwrap(), s);
        assert!(
            PauliSum::from_json(r#"[{"coeff":1,"string":"ZI"},{"coeff":2,"string":"ZI"}]"#)
                .is_err()
        );
        assert!(
            PauliSum::from_json(r#"[{"coeff":1,"string":"ZI"},{"coeff":2,"string":"Z"}]"#).is_err()
        );
    }
}
