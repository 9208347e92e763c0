//! Why a transversal `CĈ` between equal-length codes fails.
//!
//! Transversal `CĈ^{⊗n}` maps `|u⟩|v⟩ ↦ |u⟩|(1 + u) ∧ v⟩` (`∧` the
//! componentwise product over `F_3`, the qubit bits read as `0/1`). For it
//! to act logically, the componentwise multipliers coming from qubit
//! codewords must preserve the qutrit coset structure. For a code whose
//! spaces `𝓗_X` and `𝓗_Z^⊥` are indecomposable, only constant multipliers
//! preserve both.

use std::collections::BTreeMap;

use super::field::{all_vectors, schur, Echelon};
use super::{ConcatError, QuditCSSCode};
use crate::algebra::C64;

/// Which qutrit code space a multiplier fails to preserve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchurSpace {
    /// The row space `𝓗_X` of the `X`-type checks.
    XStabilizers,
    /// The space `𝓗_Z^⊥` spanned by all codeword strings.
    CodewordSupport,
}

/// `a ∧ v` leaves the space although `v` lies in it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurWitness {
    pub multiplier: Vec<u8>,
    pub space: SchurSpace,
    pub vector: Vec<u8>,
    pub product: Vec<u8>,
}

/// First basis vector `v` of `𝓗_X` or `𝓗_Z^⊥` with `a ∧ v` outside the
/// same space, or `None` if `a` preserves both.
pub fn schur_violation(code: &QuditCSSCode, a: &[u8]) -> Result<Option<SchurWitness>, ConcatError> {
    if code.p() != 3 {
        return Err(ConcatError::IncompatibleCodes("the Schur check is defined for qutrit codes".into()));
    }
    if a.len() != code.n() || a.iter().any(|&x| x > 2) {
        return Err(ConcatError::InvalidLogical(format!("{a:?} is not a vector of F_3^{}", code.n())));
    }
    Ok(violation(&spaces(code), a))
}

fn spaces(code: &QuditCSSCode) -> [(SchurSpace, Echelon); 2] {
    let n = code.n();
    let support = super::field::kernel(3, n, code.hz());
    [
        (SchurSpace::XStabilizers, Echelon::new(3, n, code.hx())),
        (SchurSpace::CodewordSupport, Echelon::new(3, n, &support)),
    ]
}

fn violation(spaces: &[(SchurSpace, Echelon); 2], a: &[u8]) -> Option<SchurWitness> {
    for (kind, space) in spaces {
        for v in space.basis() {
            let product = schur(a, v, 3);
            if !space.contains(&product) {
                return Some(SchurWitness { multiplier: a.to_vec(), space: *kind, vector: v.clone(), product });
            }
        }
    }
    None
}

/// Exhaustive scan of all multipliers `a ∈ F_3^n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SchurReport {
    pub n: usize,
    /// Every `a` with `a ∧ 𝓗_X ⊆ 𝓗_X` and `a ∧ 𝓗_Z^⊥ ⊆ 𝓗_Z^⊥`.
    pub preserving: Vec<Vec<u8>>,
    /// Whether those are exactly the multiples of the all-ones vector.
    pub only_constant_multipliers: bool,
    /// A violation for the first non-constant multiplier, if any fails.
    pub witness: Option<SchurWitness>,
}

/// Scans every multiplier for a qutrit code with `n ≤ 9`.
pub fn schur_obstruction_check(code: &QuditCSSCode) -> Result<SchurReport, ConcatError> {
    if code.p() != 3 {
        return Err(ConcatError::IncompatibleCodes("the Schur check is defined for qutrit codes".into()));
    }
    if code.n() > super::EXHAUSTIVE_LENGTH {
        return Err(ConcatError::ResourceLimit(format!("exhaustive Schur scan needs n ≤ 9, got {}", code.n())));
    }
    let sp = spaces(code);
    let mut report = SchurReport { n: code.n(), preserving: Vec::new(), only_constant_multipliers: true, witness: None };
    for a in all_vectors(3, code.n()) {
        let constant = a.iter().all(|&x| x == a[0]);
        match violation(&sp, &a) {
            None => {
                report.only_constant_multipliers &= constant;
                report.preserving.push(a);
            }
            Some(w) => {
                if report.witness.is_none() && !constant {
                    report.witness = Some(w);
                }
            }
        }
    }
    Ok(report)
}

/// Transversal `CĈ^{⊗n}` between two codes of equal length.
#[derive(Clone, Debug, PartialEq)]
pub struct NaiveTransversalReport {
    /// `(α, β̂, squared norm of the output inside the joint code space)`.
    pub code_space_weights: Vec<(u8, u8, f64)>,
    /// `(α, β̂, fidelity with |α⟩_L |(1 + α) β̂⟩_L)`.
    pub logical_fidelities: Vec<(u8, u8, f64)>,
    /// A qubit string `u` and qutrit strings `v ↦ (1 + u) ∧ v` where the
    /// image violates a `Z`-type check of the qutrit code.
    pub witness: Option<(Vec<u8>, Vec<u8>, Vec<u8>)>,
}

/// Applies transversal `CĈ^{⊗n}` to every `|α⟩_L |β̂⟩_L` and measures how
/// much of the output stays in the joint code space.
pub fn naive_transversal_cc(qubit: &QuditCSSCode, qutrit: &QuditCSSCode) -> Result<NaiveTransversalReport, ConcatError> {
    if qubit.p() != 2 || qutrit.p() != 3 || qubit.k() != 1 || qutrit.k() != 1 {
        return Err(ConcatError::IncompatibleCodes("need a one-qubit and a one-qutrit code".into()));
    }
    if qubit.n() != qutrit.n() {
        return Err(ConcatError::IncompatibleCodes(format!(
            "lengths differ: {} qubits, {} qutrits",
            qubit.n(),
            qutrit.n()
        )));
    }
    type Joint = BTreeMap<(Vec<u8>, Vec<u8>), C64>;
    let joint = |a: u8, b: u8| -> Result<Joint, ConcatError> {
        let (q, t) = (qubit.codeword(&[a])?, qutrit.codeword(&[b])?);
        let mut m = Joint::new();
        for (u, x) in q.amplitudes() {
            for (v, y) in t.amplitudes() {
                m.insert((u.clone(), v.clone()), x * y);
            }
        }
        Ok(m)
    };
    let inner = |a: &Joint, b: &Joint| -> C64 {
        a.iter().map(|(k, x)| x.conj() * b.get(k).copied().unwrap_or_default()).sum()
    };
    let basis: Vec<((u8, u8), Joint)> =
        (0..2u8).flat_map(|a| (0..3u8).map(move |b| (a, b))).map(|(a, b)| Ok(((a, b), joint(a, b)?))).collect::<Result<_, ConcatError>>()?;
    let mut report = NaiveTransversalReport { code_space_weights: Vec::new(), logical_fidelities: Vec::new(), witness: None };
    for ((alpha, beta), input) in &basis {
        let mut out = Joint::new();
        for ((u, v), &x) in input {
            let mult: Vec<u8> = u.iter().map(|&b| 1 + b).collect();
            let image = schur(&mult, v, 3);
            if report.witness.is_none() && !qutrit.passes_z_checks(&image) {
                report.witness = Some((u.clone(), v.clone(), image.clone()));
            }
            *out.entry((u.clone(), image)).or_default() += x;
        }
        let weight = basis.iter().map(|(_, b)| inner(b, &out).norm_sqr()).sum();
        report.code_space_weights.push((*alpha, *beta, weight));
        let target = &basis.iter().find(|(k, _)| *k == (*alpha, ((1 + alpha) * beta) % 3)).expect("basis is complete").1;
        report.logical_fidelities.push((*alpha, *beta, inner(target, &out).norm_sqr()));
    }
    Ok(report)
}
