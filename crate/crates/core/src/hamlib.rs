//! Decomposed Hamiltonians `H = sum_i H_i`.
//!
//! Terms come from Pauli-string groups in a JSON document, from a seeded
//! random ensemble, or straight from matrices. Ingestion is where the
//! `||H_i|| <= 1/2` norm precondition of the downstream recovery stage is
//! enforced: either the document opts into a single global rescale or the
//! violation is an error. The applied factor is kept in the result so callers
//! can reinterpret time (simulating `sH` for time `t/s`).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matkernel::{self, kron, spectral_norm, ComplexMatrix};
use crate::rng::SplitMix64;

pub const NORM_CAP: f64 = 0.5;

/// One weighted Pauli string, e.g. `0.2 * XXI`.
#[derive(Debug, Clone, PartialEq)]
pub struct PauliTerm {
    pub string: String,
    pub coeff: f64,
}

impl PauliTerm {
    pub fn new(string: impl Into<String>, coeff: f64) -> Self {
        Self { string: string.into(), coeff }
    }
}

fn single_pauli(c: char) -> Result<ComplexMatrix> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let entries = match c {
        'I' => vec![one, zero, zero, one],
        'X' => vec![zero, one, one, zero],
        'Y' => vec![zero, Complex64::new(0.0, -1.0), Complex64::new(0.0, 1.0), zero],
        'Z' => vec![one, zero, zero, -one],
        other => return Err(Error::BadCharacter(other)),
    };
    Ok(ComplexMatrix::new(2, 2, entries))
}

/// Dense matrix of a Pauli term; qubit 0 is the highest-order tensor factor.
pub fn pauli_term_to_matrix(term: &PauliTerm) -> Result<ComplexMatrix> {
    pauli_term_to_matrix_n(term, term.string.chars().count())
}

/// Same, but validated against a declared qubit count.
pub fn pauli_term_to_matrix_n(term: &PauliTerm, n_qubits: usize) -> Result<ComplexMatrix> {
    let got = term.string.chars().count();
    if got != n_qubits || n_qubits == 0 {
        return Err(Error::LengthMismatch { expected: n_qubits, got });
    }
    if !term.coeff.is_finite() {
        return Err(Error::ArgumentOutOfRange(format!("non-finite coefficient {}", term.coeff)));
    }
    let mut m: Option<ComplexMatrix> = None;
    for c in term.string.chars() {
        let p = single_pauli(c)?;
        m = Some(match m {
            None => p,
            Some(acc) => kron(&acc, &p)?,
        });
    }
    Ok(m.expect("nonempty string").scale_real(term.coeff))
}

/// Hamiltonian decomposed into an ordered list of Hermitian terms.
#[derive(Debug, Clone)]
pub struct HamiltonianSum {
    pub n_qubits: usize,
    pub terms: Vec<ComplexMatrix>,
    pub total: ComplexMatrix,
    pub norms: Vec<f64>,
    /// True when every `||H_i|| <= 1/2` has been checked at construction.
    pub norm_enforced: bool,
    /// Global scale applied at ingestion to meet the cap, if any.
    pub rescale_factor: Option<f64>,
    /// Declared per-term sparsity, used only as a reporting cost weight.
    pub sparsities: Vec<f64>,
}

impl HamiltonianSum {
    /// Number of terms `m`.
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn dim(&self) -> usize {
        1usize << self.n_qubits
    }

    /// Build from raw Hermitian matrices. `enforce_norms` makes the 1/2 cap a
    /// hard error; without it the flag is recorded as false.
    pub fn from_terms(n_qubits: usize, terms: Vec<ComplexMatrix>, enforce_norms: bool) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::EmptyList);
        }
        let dim = 1usize << n_qubits;
        let mut total = ComplexMatrix::zeros(dim, dim);
        let mut norms = Vec::with_capacity(terms.len());
        for t in &terms {
            if t.rows() != dim || t.cols() != dim {
                return Err(Error::DimensionMismatch(t.rows(), dim));
            }
            let defect = t.hermiticity_defect()?;
            if defect > 1e-12 {
                return Err(Error::NonHermitian(defect));
            }
            let norm = spectral_norm(t)?;
            if enforce_norms && norm > NORM_CAP + 1e-9 {
                return Err(Error::NormViolation(norm));
            }
            norms.push(norm);
            total = total.add(t);
        }
        let sparsities = vec![dim as f64; terms.len()];
        Ok(Self {
            n_qubits,
            terms,
            total,
            norms,
            norm_enforced: enforce_norms,
            rescale_factor: None,
            sparsities,
        })
    }
}

/// On-disk Hamiltonian description. Group order defines `i = 1..m`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HamiltonianSpecDoc {
    pub qubits: usize,
    #[serde(default)]
    pub rescale: bool,
    pub groups: Vec<GroupDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct GroupDoc {
    pub name: String,
    pub paulis: Vec<PauliDoc>,
    /// Declared sparsity for the cost-weight report; defaults to dense (2^n).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sparsity: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct PauliDoc {
    pub string: String,
    pub coeff: f64,
}

impl HamiltonianSpecDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::ParseError(e.to_string()))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec document serializes")
    }
}

/// Build a [`HamiltonianSum`] from a parsed spec document.
///
/// Each group becomes one Hermitian term. If some `||H_i||` exceeds 1/2 the
/// whole sum is either scaled by a single factor (when `rescale` is set, the
/// factor is recorded) or rejected.
pub fn load_hamiltonian(doc: &HamiltonianSpecDoc) -> Result<HamiltonianSum> {
    if doc.qubits == 0 {
        return Err(Error::ParseError("qubit count must be positive".into()));
    }
    if doc.qubits > 12 {
        return Err(Error::DimensionTooLarge(1usize << doc.qubits, matkernel::max_dim()));
    }
    if doc.groups.is_empty() {
        return Err(Error::ParseError("no groups".into()));
    }
    let dim = 1usize << doc.qubits;
    let mut terms = Vec::with_capacity(doc.groups.len());
    for group in &doc.groups {
        if group.paulis.is_empty() {
            return Err(Error::ParseError(format!("group {:?} has no Pauli terms", group.name)));
        }
        let mut h_i = ComplexMatrix::zeros(dim, dim);
        for p in &group.paulis {
            let got = p.string.chars().count();
            if got != doc.qubits {
                return Err(Error::QubitCountMismatch(format!(
                    "group {:?}: string {:?} has {} characters, document declares {} qubits",
                    group.name, p.string, got, doc.qubits
                )));
            }
            let term = PauliTerm::new(p.string.clone(), p.coeff);
            let m = pauli_term_to_matrix_n(&term, doc.qubits)
                .map_err(|e| Error::ParseError(format!("group {:?}: {e}", group.name)))?;
            h_i = h_i.add(&m);
        }
        terms.push(h_i);
    }

    let mut norms = Vec::with_capacity(terms.len());
    for t in &terms {
        norms.push(spectral_norm(t)?);
    }
    let max_norm = norms.iter().cloned().fold(0.0f64, f64::max);
    let mut rescale_factor = None;
    if max_norm > NORM_CAP + 1e-12 {
        if doc.rescale {
            let s = NORM_CAP / max_norm;
            terms = terms.into_iter().map(|t| t.scale_real(s)).collect();
            rescale_factor = Some(s);
        } else {
            return Err(Error::NormViolation(max_norm));
        }
    }

    let mut sum = HamiltonianSum::from_terms(doc.qubits, terms, true)?;
    sum.rescale_factor = rescale_factor;
    sum.sparsities = doc
        .groups
        .iter()
        .map(|g| g.sparsity.unwrap_or(dim as f64))
        .collect();
    Ok(sum)
}

/// `m` independent random Hermitian terms on `n_qubits`, each rescaled to
/// spectral norm exactly `norm_cap`. Deterministic per seed.
pub fn random_decomposed_hamiltonian(
    n_qubits: usize,
    m: usize,
    norm_cap: f64,
    seed: u64,
) -> Result<HamiltonianSum> {
    if n_qubits == 0 || n_qubits > 5 || m == 0 || m > 8 {
        return Err(Error::DimensionTooLarge(1usize << n_qubits.max(1), 32));
    }
    if !(norm_cap > 0.0 && norm_cap <= NORM_CAP) {
        return Err(Error::ArgumentOutOfRange(format!(
            "norm_cap {norm_cap} must lie in (0, 0.5]"
        )));
    }
    let dim = 1usize << n_qubits;
    let mut rng = SplitMix64::new(seed);
    let mut terms = Vec::with_capacity(m);
    for _ in 0..m {
        let g = matkernel::random_hermitian(dim, &mut rng);
        let sigma = spectral_norm(&g)?;
        // Gaussian Hermitian matrices are never numerically zero at these dims.
        terms.push(g.scale_real(norm_cap / sigma));
    }
    HamiltonianSum::from_terms(n_qubits, terms, true)
}
