//! Qudit CSS codes and the fault-tolerant logical controlled charge
//! conjugation between a qubit Shor code and a qutrit CSS code.
//!
//! * [`QuditCSSCode`]: validated parity-check pairs over `F_2` / `F_3`,
//!   logical operators, codewords, exhaustive distances (`n ≤ 9`) and a
//!   single-error lookup [`Decoder`].
//! * [`logical_cc`]: the schedule of transversal `CĈ^{⊗n}` blocks
//!   interleaved with qutrit corrections `R̂`, simulated exactly in the
//!   block basis of the qubit code ([`ConcatState`]) and, for `n = 3`, on
//!   dense physical registers through the circuit interpreter.
//! * [`schur_obstruction_check`] and [`naive_transversal_cc`]: why the
//!   transversal gate between equal-length codes cannot work.

mod code;
mod field;
mod lemma;
mod schur;

use thiserror::Error;

use crate::circuits::CircuitError;

pub use code::{
    format_matrix, parse_matrix, CodeState, Decoder, QuditCSSCode, SitePauli, EXHAUSTIVE_LENGTH, MAX_CODEWORD_TERMS,
};
pub use lemma::{
    charge_conjugation_deviation, correction_circuit, fault_tolerance_demo, logical_cc, logical_patterns,
    pow2_mod3, run_schedule, single_error_sweep, site_paulis, verify_block_patterns, verify_dense,
    verify_logical_action, BlockStructure, ConcatState, DenseReport, FaultToleranceReport, InjectedError,
    LogicalActionReport, LogicalCcSchedule, PatternReport, RunBranch, ScheduleStep, SweepReport, FIDELITY_TOL,
    MAX_BLOCKS, MAX_QUTRITS,
};
pub use schur::{
    naive_transversal_cc, schur_obstruction_check, schur_violation, NaiveTransversalReport, SchurReport, SchurSpace,
    SchurWitness,
};

/// Errors of the code constructions and simulations.
#[derive(Debug, Error)]
pub enum ConcatError {
    #[error("only the primes 2 and 3 are supported, got {0}")]
    InvalidPrime(u8),
    #[error("row {row} of {matrix} has length {found}, expected {expected}")]
    RowLength { matrix: &'static str, row: usize, expected: usize, found: usize },
    #[error("entry {value} is not an element of F_{p}")]
    EntryOutOfField { value: u8, p: u8 },
    #[error("row {x_row} of H_X is not orthogonal to row {z_row} of H_Z")]
    NotOrthogonal { x_row: usize, z_row: usize },
    #[error("no logical qudit: n = {n}, rank H_X = {rank_x}, rank H_Z = {rank_z}")]
    NoLogicalQudits { n: usize, rank_x: usize, rank_z: usize },
    #[error("invalid logical data: {0}")]
    InvalidLogical(String),
    #[error("claimed distance {claimed} but the minimum logical weight is {actual}")]
    DistanceMismatch { claimed: usize, actual: usize },
    #[error(
        "n = {0} is even: the logical-one codeword 1^(n²) then has an even number of 1̃ blocks, \
         and 2^even ≡ 1 (mod 3) would leave the qutrit unchanged"
    )]
    EvenBlockCount(usize),
    #[error("incompatible codes: {0}")]
    IncompatibleCodes(String),
    #[error(
        "qutrit code distance {distance} < 3: a single-qutrit error cannot be corrected, so the \
         fault-tolerance demonstration does not apply"
    )]
    DistanceTooSmall { distance: usize },
    #[error("invalid injected error: {0}")]
    InvalidError(String),
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}
