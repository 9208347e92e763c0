//! The logical controlled charge conjugation between an `[[n², 1, n]]`
//! qubit Shor code and an `[[n, 1, d]]` qutrit CSS code.
//!
//! Every codeword of the qubit Shor code is constant on each block of `n`
//! qubits, so the qubit side is stored in the block basis: one bit per
//! block (bit `t` of a `u64` pattern). The block of qubits `tn … tn + n − 1`
//! controls a transversal `CĈ^{⊗n}` onto the qutrit code (qubit `tn + j`
//! controls qutrit `j`), which multiplies every qutrit digit by `2` when the
//! block bit is `1`. Since `2^q mod 3` is `1` for even `q` and `2` for odd
//! `q`, and the logical-one codewords carry an odd number of `1̃` blocks when
//! the logical representative is the all-ones vector (odd `n`), the
//! composite maps `|α⟩_L |β̂⟩_L ↦ |α⟩_L |(1 + α) β̂⟩_L`.

use std::collections::{BTreeMap, BTreeSet};

use super::code::{CodeState, Decoder, QuditCSSCode, SitePauli};
use super::ConcatError;
use crate::algebra::{omega_pow, C64};
use crate::circuits::{
    enumerate_branches, AdaptiveCircuit, AncillaInit, CircuitBuilder, GateKind, MeasureBasis, QuditRegister,
};

/// Amplitudes below this magnitude are dropped after projections.
const DROP_TOL: f64 = 1e-13;
/// Tolerance of the eigenstate shortcut in syndrome measurements.
const EIGEN_TOL: f64 = 1e-12;
/// Fidelity tolerance of the fault-tolerance checks.
pub const FIDELITY_TOL: f64 = 1e-9;
/// Largest block count handled by the block-basis simulator.
pub const MAX_BLOCKS: usize = 20;
/// Largest qutrit count handled by the block-basis simulator.
pub const MAX_QUTRITS: usize = 20;

/// `2^q mod 3`.
pub fn pow2_mod3(q: u64) -> u8 {
    if q.is_multiple_of(2) {
        1
    } else {
        2
    }
}

/// Base-3 indexing of qutrit strings (site 0 most significant).
#[derive(Clone, Debug, PartialEq, Eq)]
struct Trits {
    pow: Vec<u32>,
}

impl Trits {
    fn new(m: usize) -> Self {
        Trits { pow: (0..m).map(|s| 3u32.pow((m - 1 - s) as u32)).collect() }
    }

    fn len(&self) -> usize {
        self.pow.len()
    }

    fn digit(&self, q: u32, site: usize) -> u8 {
        ((q / self.pow[site]) % 3) as u8
    }

    fn encode(&self, v: &[u8]) -> u32 {
        v.iter().zip(&self.pow).map(|(&d, &w)| d as u32 * w).sum()
    }

    fn decode(&self, q: u32) -> Vec<u8> {
        (0..self.len()).map(|s| self.digit(q, s)).collect()
    }

    fn negate(&self, q: u32) -> u32 {
        (0..self.len()).map(|s| ((3 - self.digit(q, s)) % 3) as u32 * self.pow[s]).sum()
    }

    fn shift(&self, q: u32, v: &[u8], times: u8) -> u32 {
        (0..self.len()).map(|s| ((self.digit(q, s) + times * v[s]) % 3) as u32 * self.pow[s]).sum()
    }

    fn dot(&self, q: u32, h: &[u8]) -> u8 {
        ((0..self.len()).map(|s| self.digit(q, s) as u32 * h[s] as u32).sum::<u32>() % 3) as u8
    }
}

fn key(pattern: u64, q: u32) -> u64 {
    pattern << 32 | q as u64
}

fn split(k: u64) -> (u64, u32) {
    (k >> 32, k as u32)
}

fn canonical(mut entries: Vec<(u64, C64)>) -> Vec<(u64, C64)> {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out: Vec<(u64, C64)> = Vec::with_capacity(entries.len());
    for (k, a) in entries {
        match out.last_mut() {
            Some(last) if last.0 == k => last.1 += a,
            _ => out.push((k, a)),
        }
    }
    out.retain(|e| e.1.norm() > DROP_TOL);
    out
}

/// Block-basis description of a qubit Shor-type code.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockStructure {
    blocks: usize,
    /// `X`-type checks compressed to block masks.
    x_masks: Vec<u64>,
    /// Logical-one representative as a block mask.
    logical: u64,
}

impl BlockStructure {
    /// Compresses a qubit code of length `n²` whose `X`-type checks and
    /// logical representative are constant on every block of `n` qubits.
    pub fn of(qubit: &QuditCSSCode) -> Result<Self, ConcatError> {
        if qubit.p() != 2 || qubit.k() != 1 {
            return Err(ConcatError::IncompatibleCodes("the control code must encode one qubit".into()));
        }
        let blocks = (qubit.n() as f64).sqrt().round() as usize;
        if blocks * blocks != qubit.n() {
            return Err(ConcatError::IncompatibleCodes(format!("qubit code length {} is not a square", qubit.n())));
        }
        if blocks > MAX_BLOCKS {
            return Err(ConcatError::ResourceLimit(format!("{blocks} blocks exceed the limit {MAX_BLOCKS}")));
        }
        let compress = |v: &[u8]| -> Result<u64, ConcatError> {
            let mut mask = 0u64;
            for t in 0..blocks {
                let block = &v[t * blocks..(t + 1) * blocks];
                if block.iter().any(|&b| b != block[0]) {
                    return Err(ConcatError::IncompatibleCodes(format!(
                        "{v:?} is not constant on block {t}; the qubit code is not Shor-structured"
                    )));
                }
                mask |= (block[0] as u64) << t;
            }
            Ok(mask)
        };
        let x_masks = qubit.hx().iter().map(|r| compress(r)).collect::<Result<_, _>>()?;
        let logical = compress(&qubit.logical_x()[0])?;
        Ok(BlockStructure { blocks, x_masks, logical })
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn x_masks(&self) -> &[u64] {
        &self.x_masks
    }

    pub fn logical_mask(&self) -> u64 {
        self.logical
    }

    /// Block patterns of the logical value `α`: `α·x + span(x_masks)`.
    pub fn patterns(&self, alpha: u8) -> Vec<u64> {
        let mut span: BTreeSet<u64> = [0u64].into_iter().collect();
        for &m in &self.x_masks {
            let shifted: Vec<u64> = span.iter().map(|s| s ^ m).collect();
            span.extend(shifted);
        }
        let base = if alpha % 2 == 1 { self.logical } else { 0 };
        span.into_iter().map(|s| s ^ base).collect::<BTreeSet<_>>().into_iter().collect()
    }
}

/// Joint state of a qubit Shor code (block basis) and a qutrit code.
///
/// Stored as a sparse amplitude list keyed by `(block pattern, qutrit
/// string)`; amplitudes are not renormalized by projections.
#[derive(Clone, Debug, PartialEq)]
pub struct ConcatState {
    blocks: usize,
    trits: Trits,
    entries: Vec<(u64, C64)>,
}

impl ConcatState {
    fn check_sizes(blocks: usize, qutrits: usize) -> Result<(), ConcatError> {
        if blocks > MAX_BLOCKS || qutrits > MAX_QUTRITS {
            return Err(ConcatError::ResourceLimit(format!(
                "{blocks} blocks and {qutrits} qutrits exceed the limits {MAX_BLOCKS}/{MAX_QUTRITS}"
            )));
        }
        Ok(())
    }

    /// `Σ_p c_p |p⟩ ⊗ |φ⟩` for block-pattern amplitudes `c` and a qutrit state.
    pub fn product(blocks: usize, patterns: &BTreeMap<u64, C64>, qutrits: &CodeState) -> Result<Self, ConcatError> {
        if qutrits.p() != 3 {
            return Err(ConcatError::IncompatibleCodes("the target state must be a qutrit state".into()));
        }
        Self::check_sizes(blocks, qutrits.n())?;
        if let Some(p) = patterns.keys().find(|&&p| blocks < 64 && p >> blocks != 0) {
            return Err(ConcatError::InvalidLogical(format!("pattern {p:#b} has more than {blocks} blocks")));
        }
        let trits = Trits::new(qutrits.n());
        let mut entries = Vec::with_capacity(patterns.len() * qutrits.amplitudes().len());
        for (&p, &c) in patterns {
            for (k, &a) in qutrits.amplitudes() {
                entries.push((key(p, trits.encode(k)), c * a));
            }
        }
        Ok(ConcatState { blocks, trits, entries: canonical(entries) })
    }

    /// `|α⟩_L ⊗ |β̂⟩_L`.
    pub fn logical(qubit: &QuditCSSCode, qutrit: &QuditCSSCode, alpha: u8, beta: u8) -> Result<Self, ConcatError> {
        let bs = BlockStructure::of(qubit)?;
        if alpha > 1 {
            return Err(ConcatError::InvalidLogical(format!("{alpha} is not a qubit logical value")));
        }
        let patterns = bs.patterns(alpha);
        let c = C64::new(1.0 / (patterns.len() as f64).sqrt(), 0.0);
        let amps = patterns.into_iter().map(|p| (p, c)).collect();
        Self::product(bs.blocks, &amps, &qutrit.codeword(&[beta])?)
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn qutrits(&self) -> usize {
        self.trits.len()
    }

    /// Number of stored basis states.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(pattern, qutrit string, amplitude)` in key order.
    pub fn entries(&self) -> impl Iterator<Item = (u64, Vec<u8>, C64)> + '_ {
        self.entries.iter().map(|&(k, a)| {
            let (p, q) = split(k);
            (p, self.trits.decode(q), a)
        })
    }

    fn lookup(&self, k: u64) -> C64 {
        self.entries.binary_search_by_key(&k, |e| e.0).map(|i| self.entries[i].1).unwrap_or_default()
    }

    pub fn amplitude(&self, pattern: u64, qutrits: &[u8]) -> C64 {
        self.lookup(key(pattern, self.trits.encode(qutrits)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|e| e.1.norm_sqr()).sum()
    }

    pub fn inner(&self, other: &ConcatState) -> C64 {
        self.entries.iter().map(|&(k, a)| a.conj() * other.lookup(k)).sum()
    }

    /// `|⟨a|b⟩|² / (‖a‖² ‖b‖²)`.
    pub fn fidelity(&self, other: &ConcatState) -> f64 {
        let (na, nb) = (self.norm_sqr(), other.norm_sqr());
        if na == 0.0 || nb == 0.0 {
            return 0.0;
        }
        self.inner(other).norm_sqr() / (na * nb)
    }

    /// Largest amplitude difference.
    pub fn max_difference(&self, other: &ConcatState) -> f64 {
        let keys: BTreeSet<u64> = self.entries.iter().chain(&other.entries).map(|e| e.0).collect();
        keys.into_iter().map(|k| (self.lookup(k) - other.lookup(k)).norm()).fold(0.0, f64::max)
    }

    /// Block patterns present in the state.
    pub fn patterns(&self) -> BTreeSet<u64> {
        self.entries.iter().map(|e| split(e.0).0).collect()
    }

    /// The part of the state on the given block patterns.
    pub fn restricted(&self, patterns: &BTreeSet<u64>) -> ConcatState {
        let entries = self.entries.iter().filter(|e| patterns.contains(&split(e.0).0)).copied().collect();
        ConcatState { blocks: self.blocks, trits: self.trits.clone(), entries }
    }

    /// Transversal `CĈ^{⊗n}` controlled by block `t`.
    pub fn apply_block(&mut self, t: usize) {
        let trits = &self.trits;
        let entries = self
            .entries
            .iter()
            .map(|&(k, a)| {
                let (p, q) = split(k);
                if p >> t & 1 == 1 {
                    (key(p, trits.negate(q)), a)
                } else {
                    (k, a)
                }
            })
            .collect();
        self.entries = canonical(entries);
    }

    /// Applies `X̂^x Ẑ^z` to one qutrit.
    pub fn apply_qutrit_pauli(&mut self, e: SitePauli) {
        let trits = &self.trits;
        let mut unit = vec![0u8; trits.len()];
        unit[e.site] = 1;
        let entries = self
            .entries
            .iter()
            .map(|&(k, a)| {
                let (p, q) = split(k);
                let phase = omega_pow((e.z as u32 * trits.digit(q, e.site) as u32) as i64);
                (key(p, trits.shift(q, &unit, e.x)), a * phase)
            })
            .collect();
        self.entries = canonical(entries);
    }

    /// Applies the single-block phase flip `Z̃_t`.
    pub fn apply_block_phase(&mut self, t: usize) {
        for e in &mut self.entries {
            if split(e.0).0 >> t & 1 == 1 {
                e.1 = -e.1;
            }
        }
    }

    /// Dense amplitudes over `blocks²` physical qubits followed by the
    /// qutrits (first wire most significant); qubit `tn + j` carries the
    /// bit of block `t`.
    pub fn to_physical(&self) -> Result<Vec<C64>, ConcatError> {
        let n = self.blocks;
        let qubits = n * n;
        let qdim = 3usize.pow(self.qutrits() as u32);
        if qubits > 26 || (1usize << qubits).saturating_mul(qdim) > 1 << 26 {
            return Err(ConcatError::ResourceLimit(format!("{qubits} qubits and {} qutrits", self.qutrits())));
        }
        let mut v = vec![C64::default(); (1 << qubits) * qdim];
        for &(k, a) in &self.entries {
            let (p, q) = split(k);
            let bits = (0..qubits).fold(0usize, |acc, i| acc << 1 | (p >> (i / n) & 1) as usize);
            v[bits * qdim + q as usize] = a;
        }
        Ok(v)
    }

    /// Eigen-phase `λ` with `ψ(shift(k)) = λ ψ(k)` for every stored key,
    /// if the state is an eigenstate of the shift.
    fn shift_eigenphase(&self, shift: impl Fn(u64) -> u64) -> Option<C64> {
        let &(k0, a0) = self.entries.first()?;
        let lambda = self.lookup(shift(k0)) / a0;
        if (lambda.norm() - 1.0).abs() > EIGEN_TOL {
            return None;
        }
        self.entries
            .iter()
            .all(|&(k, a)| (self.lookup(shift(k)) - lambda * a).norm() <= EIGEN_TOL)
            .then_some(lambda)
    }

    /// Measures `X̂^h` on the qutrits. Returns `(s, branch)` for every
    /// eigenvalue `ω^s` with non-zero weight.
    fn measure_qutrit_shift(&self, h: &[u8]) -> Vec<(u8, ConcatState)> {
        let trits = &self.trits;
        let shift = |k: u64| {
            let (p, q) = split(k);
            key(p, trits.shift(q, h, 1))
        };
        // X̂^h ψ = ω^s ψ  ⇔  ψ(k + h) = ω^{−s} ψ(k).
        if let Some(lambda) = self.shift_eigenphase(shift) {
            if let Some(s) = (0..3u8).find(|&s| (omega_pow(-(s as i64)) - lambda).norm() < 1e-9) {
                return vec![(s, self.clone())];
            }
        }
        let total = self.norm_sqr();
        (0..3u8)
            .filter_map(|s| {
                let mut entries = Vec::with_capacity(3 * self.entries.len());
                for &(k, a) in &self.entries {
                    let (p, q) = split(k);
                    for m in 0..3u8 {
                        let phase = omega_pow(-((s as i64) * m as i64)) / 3.0;
                        entries.push((key(p, trits.shift(q, h, m)), a * phase));
                    }
                }
                let branch = ConcatState { blocks: self.blocks, trits: self.trits.clone(), entries: canonical(entries) };
                (branch.norm_sqr() > 1e-20 * total).then_some((s, branch))
            })
            .collect()
    }

    /// Measures the block flip `X̃^mask`. Returns `(s, branch)` for the
    /// eigenvalues `(−1)^s` with non-zero weight.
    fn measure_block_flip(&self, mask: u64) -> Vec<(u8, ConcatState)> {
        let flip = |k: u64| {
            let (p, q) = split(k);
            key(p ^ mask, q)
        };
        if let Some(lambda) = self.shift_eigenphase(flip) {
            if (lambda.re.abs() - 1.0).abs() < 1e-9 && lambda.im.abs() < 1e-9 {
                return vec![(u8::from(lambda.re < 0.0), self.clone())];
            }
        }
        let total = self.norm_sqr();
        (0..2u8)
            .filter_map(|s| {
                let sign = if s == 0 { 0.5 } else { -0.5 };
                let entries =
                    self.entries.iter().flat_map(|&(k, a)| [(k, a * 0.5), (flip(k), a * sign)]).collect::<Vec<_>>();
                let branch = ConcatState { blocks: self.blocks, trits: self.trits.clone(), entries: canonical(entries) };
                (branch.norm_sqr() > 1e-20 * total).then_some((s, branch))
            })
            .collect()
    }

    /// Splits the state by the `Z`-check syndrome `H_Z k`.
    fn measure_z_checks(&self, hz: &[Vec<u8>]) -> Vec<(Vec<u8>, ConcatState)> {
        let mut groups: BTreeMap<Vec<u8>, Vec<(u64, C64)>> = BTreeMap::new();
        for &(k, a) in &self.entries {
            let q = split(k).1;
            let s: Vec<u8> = hz.iter().map(|h| self.trits.dot(q, h)).collect();
            groups.entry(s).or_default().push((k, a));
        }
        groups
            .into_iter()
            .map(|(s, entries)| (s, ConcatState { blocks: self.blocks, trits: self.trits.clone(), entries }))
            .collect()
    }
}

/// One step of the logical `CĈ` schedule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ScheduleStep {
    /// Transversal `CĈ^{⊗n}` controlled by the qubits of block `t`.
    Block(usize),
    /// Qutrit error correction `R̂`: syndrome extraction and single-error
    /// lookup correction.
    Correct,
}

/// The logical `CĈ` gate as a time-ordered list of steps.
///
/// In operator order the gate is `CĈ_{block 0} R̂ CĈ_{block 1} ⋯ R̂
/// CĈ_{block n−1}`, so in time order the last block acts first.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LogicalCcSchedule {
    n: usize,
    steps: Vec<ScheduleStep>,
}

impl LogicalCcSchedule {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn steps(&self) -> &[ScheduleStep] {
        &self.steps
    }

    /// The physical circuit on `n²` qubits (wires `0 … n² − 1`) and `n`
    /// qutrits (wires `n² …`), with syndrome ancillas allocated per check.
    pub fn to_circuit(&self, qutrit: &QuditCSSCode) -> Result<AdaptiveCircuit, ConcatError> {
        let n = self.n;
        let mut dims = vec![2; n * n];
        dims.extend(std::iter::repeat_n(3, n));
        let mut c = CircuitBuilder::new(format!("logical-cchat-n{n}"), &dims);
        let data: Vec<usize> = (n * n..n * n + n).collect();
        let decoder = qutrit.decoder();
        for step in &self.steps {
            match *step {
                ScheduleStep::Block(t) => {
                    for (j, &q) in data.iter().enumerate() {
                        c.gate(GateKind::CCHat, &[t * n + j, q]);
                    }
                }
                ScheduleStep::Correct => emit_correction(&mut c, qutrit, &decoder, &data),
            }
        }
        Ok(c.finish()?)
    }
}

/// Syndrome extraction and lookup correction on the given qutrit wires.
///
/// `Z`-type check `h`: a `|0̂⟩` ancilla collects `Σ h_j k_j` through
/// `CX̂^{h_j}` gates and is read in the `Ẑ` basis. `X`-type check `h`: a
/// `|0̂₊⟩` ancilla controls `CX̂^{h_j}` onto the data, i.e. a controlled
/// `X̂^h`, and its `X̂`-basis outcome is the eigenvalue exponent.
fn emit_correction(c: &mut CircuitBuilder, code: &QuditCSSCode, decoder: &Decoder, data: &[usize]) {
    let mut z_slots = Vec::new();
    for h in code.hz() {
        let a = c.ancilla(3, AncillaInit::Zero);
        for (j, &hj) in h.iter().enumerate() {
            c.cxhat_pow(data[j], a, hj as i64);
        }
        z_slots.push(c.measure(a, MeasureBasis::ZHat));
        c.free(a);
    }
    let mut x_slots = Vec::new();
    for h in code.hx() {
        let a = c.ancilla(3, AncillaInit::Plus);
        for (j, &hj) in h.iter().enumerate() {
            c.cxhat_pow(a, data[j], hj as i64);
        }
        x_slots.push(c.measure(a, MeasureBasis::XHat));
        c.free(a);
    }
    for (syndrome, &(site, power)) in decoder.x_table() {
        let cond: Vec<(usize, u8)> = z_slots.iter().copied().zip(syndrome.iter().copied()).collect();
        c.begin_if(&cond);
        c.xhat_pow(data[site], -(power as i64));
        c.end_if();
    }
    for (syndrome, &(site, power)) in decoder.z_table() {
        let cond: Vec<(usize, u8)> = x_slots.iter().copied().zip(syndrome.iter().copied()).collect();
        c.begin_if(&cond);
        c.zhat_pow(data[site], -(power as i64));
        c.end_if();
    }
}

/// The correction `R̂` alone, on `n` qutrit wires `0 … n − 1`.
pub fn correction_circuit(code: &QuditCSSCode) -> Result<AdaptiveCircuit, ConcatError> {
    if code.p() != 3 {
        return Err(ConcatError::IncompatibleCodes("R̂ is defined for qutrit codes".into()));
    }
    let mut c = CircuitBuilder::new("qutrit-correction", &vec![3; code.n()]);
    let data: Vec<usize> = (0..code.n()).collect();
    emit_correction(&mut c, code, &code.decoder(), &data);
    Ok(c.finish()?)
}

/// Builds the logical `CĈ` schedule for a qubit Shor code `[[n², 1, n]]`
/// and a qutrit code `[[n, 1, d]]`. Rejects even `n`.
pub fn logical_cc(qubit: &QuditCSSCode, qutrit: &QuditCSSCode) -> Result<LogicalCcSchedule, ConcatError> {
    if qutrit.p() != 3 || qutrit.k() != 1 {
        return Err(ConcatError::IncompatibleCodes("the target code must encode one qutrit".into()));
    }
    let n = qutrit.n();
    if n.is_multiple_of(2) {
        return Err(ConcatError::EvenBlockCount(n));
    }
    let bs = BlockStructure::of(qubit)?;
    if bs.blocks != n {
        return Err(ConcatError::IncompatibleCodes(format!(
            "a qutrit code of length {n} needs a qubit code of length {}, got {}",
            n * n,
            qubit.n()
        )));
    }
    if bs.logical.count_ones() % 2 != 1 || bs.patterns(0).iter().any(|p| p.count_ones() % 2 != 0) {
        return Err(ConcatError::IncompatibleCodes(
            "logical-zero patterns must have an even and logical-one patterns an odd number of 1̃ blocks".into(),
        ));
    }
    let mut steps = Vec::with_capacity(2 * n - 1);
    for t in (0..n).rev() {
        steps.push(ScheduleStep::Block(t));
        if t > 0 {
            steps.push(ScheduleStep::Correct);
        }
    }
    Ok(LogicalCcSchedule { n, steps })
}

/// A single-qutrit Pauli inserted right after a schedule step.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct InjectedError {
    /// Index of the step (time order) after which the error acts.
    pub after_step: usize,
    pub pauli: SitePauli,
}

/// One measurement branch of a run. `state` is unnormalized; its squared
/// norm is the branch probability times the input squared norm.
#[derive(Clone, Debug)]
pub struct RunBranch {
    pub state: ConcatState,
    /// `(Z-check syndrome, X-check syndrome)` of every correction round.
    pub syndromes: Vec<(Vec<u8>, Vec<u8>)>,
    /// Whether every syndrome was found in the decoder tables.
    pub recognized: bool,
}

fn correct_qutrits(branch: RunBranch, code: &QuditCSSCode, decoder: &Decoder) -> Vec<RunBranch> {
    let mut out = Vec::new();
    for (zs, zstate) in branch.state.measure_z_checks(code.hz()) {
        let mut partial = vec![(Vec::new(), zstate)];
        for h in code.hx() {
            partial = partial
                .into_iter()
                .flat_map(|(xs, st)| {
                    st.measure_qutrit_shift(h).into_iter().map(move |(s, b)| {
                        let mut xs = xs.clone();
                        xs.push(s);
                        (xs, b)
                    })
                })
                .collect();
        }
        for (xs, mut st) in partial {
            let mut recognized = branch.recognized;
            match decoder.x_error(&zs) {
                Some(Some((site, c))) => st.apply_qutrit_pauli(SitePauli { site, x: (3 - c) % 3, z: 0 }),
                Some(None) => {}
                None => recognized = false,
            }
            match decoder.z_error(&xs) {
                Some(Some((site, c))) => st.apply_qutrit_pauli(SitePauli { site, x: 0, z: (3 - c) % 3 }),
                Some(None) => {}
                None => recognized = false,
            }
            let mut syndromes = branch.syndromes.clone();
            syndromes.push((zs.clone(), xs));
            out.push(RunBranch { state: st, syndromes, recognized });
        }
    }
    out
}

/// Runs the schedule (plus an optional trailing `R̂`) on a joint state,
/// expanding every syndrome outcome.
pub fn run_schedule(
    schedule: &LogicalCcSchedule,
    qutrit: &QuditCSSCode,
    input: &ConcatState,
    errors: &[InjectedError],
    trailing_correction: bool,
) -> Result<Vec<RunBranch>, ConcatError> {
    if input.blocks() != schedule.n || input.qutrits() != qutrit.n() {
        return Err(ConcatError::IncompatibleCodes("state does not match the schedule".into()));
    }
    for e in errors {
        if e.after_step >= schedule.steps.len() || e.pauli.site >= qutrit.n() || e.pauli.x > 2 || e.pauli.z > 2 {
            return Err(ConcatError::InvalidError(format!("{e:?}")));
        }
    }
    let decoder = qutrit.decoder();
    let mut branches =
        vec![RunBranch { state: input.clone(), syndromes: Vec::new(), recognized: true }];
    let mut steps = schedule.steps.clone();
    if trailing_correction {
        steps.push(ScheduleStep::Correct);
    }
    for (i, step) in steps.iter().enumerate() {
        branches = match *step {
            ScheduleStep::Block(t) => {
                for b in &mut branches {
                    b.state.apply_block(t);
                }
                branches
            }
            ScheduleStep::Correct => {
                branches.into_iter().flat_map(|b| correct_qutrits(b, qutrit, &decoder)).collect()
            }
        };
        for e in errors.iter().filter(|e| e.after_step == i) {
            for b in &mut branches {
                b.state.apply_qutrit_pauli(e.pauli);
            }
        }
    }
    Ok(branches)
}

/// Comparison of the schedule with `|α⟩_L|β̂⟩_L ↦ |α⟩_L|(1+α)β̂⟩_L`.
#[derive(Clone, Debug, PartialEq)]
pub struct LogicalActionReport {
    /// `(α, β̂, number of branches, largest amplitude error)`.
    pub rows: Vec<(u8, u8, usize, f64)>,
    pub max_deviation: f64,
}

/// Runs the error-free schedule on all six logical basis inputs.
pub fn verify_logical_action(
    schedule: &LogicalCcSchedule,
    qubit: &QuditCSSCode,
    qutrit: &QuditCSSCode,
) -> Result<LogicalActionReport, ConcatError> {
    let mut rows = Vec::new();
    for alpha in 0..2u8 {
        for beta in 0..3u8 {
            let input = ConcatState::logical(qubit, qutrit, alpha, beta)?;
            let expected = ConcatState::logical(qubit, qutrit, alpha, ((1 + alpha) * beta) % 3)?;
            let branches = run_schedule(schedule, qutrit, &input, &[], false)?;
            let dev = match branches.as_slice() {
                [only] => only.state.max_difference(&expected),
                _ => f64::INFINITY,
            };
            rows.push((alpha, beta, branches.len(), dev));
        }
    }
    let max_deviation = rows.iter().map(|r| r.3).fold(0.0, f64::max);
    Ok(LogicalActionReport { rows, max_deviation })
}

/// Block-basis check on every `(block pattern, logical qutrit)` pair:
/// `|p⟩|β̂⟩_L ↦ |p⟩|2^{|p|} β̂⟩_L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PatternReport {
    pub checked: usize,
    pub max_deviation: f64,
}

pub fn verify_block_patterns(schedule: &LogicalCcSchedule, qutrit: &QuditCSSCode) -> Result<PatternReport, ConcatError> {
    let n = schedule.n;
    if n > MAX_BLOCKS {
        return Err(ConcatError::ResourceLimit(format!("{n} blocks")));
    }
    let codewords: Vec<CodeState> = (0..3u8).map(|b| qutrit.codeword(&[b])).collect::<Result<_, _>>()?;
    let one = C64::new(1.0, 0.0);
    let mut report = PatternReport { checked: 0, max_deviation: 0.0 };
    for p in 0..1u64 << n {
        for beta in 0..3u8 {
            let amps: BTreeMap<u64, C64> = [(p, one)].into_iter().collect();
            let input = ConcatState::product(n, &amps, &codewords[beta as usize])?;
            let target = (pow2_mod3(p.count_ones() as u64) * beta) % 3;
            let expected = ConcatState::product(n, &amps, &codewords[target as usize])?;
            let branches = run_schedule(schedule, qutrit, &input, &[], false)?;
            let dev = match branches.as_slice() {
                [only] => only.state.max_difference(&expected),
                _ => f64::INFINITY,
            };
            report.checked += 1;
            report.max_deviation = report.max_deviation.max(dev);
        }
    }
    Ok(report)
}

/// Result of running the physical circuit on dense registers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DenseReport {
    /// Largest `1 − F` between a normalized circuit branch and the target.
    pub max_infidelity: f64,
    /// Largest amplitude error between the block-basis result and the
    /// dense target.
    pub block_basis_deviation: f64,
    /// Largest deviation of the total branch weight from `1`.
    pub weight_defect: f64,
}

/// Runs [`LogicalCcSchedule::to_circuit`] on dense physical registers for
/// all six logical inputs and compares with the target states and with the
/// block-basis simulation. Feasible for `n = 3`.
pub fn verify_dense(
    schedule: &LogicalCcSchedule,
    qubit: &QuditCSSCode,
    qutrit: &QuditCSSCode,
) -> Result<DenseReport, ConcatError> {
    let n = schedule.n;
    let circuit = schedule.to_circuit(qutrit)?;
    let wires = circuit.system_wires();
    let dense = |alpha: u8, beta: u8| -> Result<Vec<C64>, ConcatError> {
        let q = qubit.codeword(&[alpha])?.to_dense()?;
        let t = qutrit.codeword(&[beta])?.to_dense()?;
        Ok(q.iter().flat_map(|a| t.iter().map(move |b| a * b)).collect())
    };
    if (1usize << (n * n)) * 3usize.pow(n as u32) > 1 << 22 {
        return Err(ConcatError::ResourceLimit(format!("dense simulation of n = {n}")));
    }
    let mut report = DenseReport { max_infidelity: 0.0, block_basis_deviation: 0.0, weight_defect: 0.0 };
    for alpha in 0..2u8 {
        for beta in 0..3u8 {
            let target = dense(alpha, ((1 + alpha) * beta) % 3)?;
            let reg = QuditRegister::from_amplitudes(&wires, dense(alpha, beta)?)?;
            let mut total = 0.0;
            for br in enumerate_branches(&circuit, reg)? {
                let w = br.weight();
                total += w;
                let overlap: C64 = br.register.amplitudes().iter().zip(&target).map(|(a, b)| b.conj() * a).sum();
                report.max_infidelity = report.max_infidelity.max(1.0 - overlap.norm_sqr() / w);
            }
            report.weight_defect = report.weight_defect.max((total - 1.0).abs());
            let block = ConcatState::logical(qubit, qutrit, alpha, beta)?;
            let out = run_schedule(schedule, qutrit, &block, &[], false)?;
            let dev = match out.as_slice() {
                [only] => only
                    .state
                    .to_physical()?
                    .iter()
                    .zip(&target)
                    .map(|(a, b)| (a - b).norm())
                    .fold(0.0, f64::max),
                _ => f64::INFINITY,
            };
            report.block_basis_deviation = report.block_basis_deviation.max(dev);
        }
    }
    Ok(report)
}

/// Whether transversal `Ĉ^{⊗n}` maps every `|β̂⟩_L` to `|2β̂⟩_L`; returns
/// the largest amplitude error.
pub fn charge_conjugation_deviation(qutrit: &QuditCSSCode) -> Result<f64, ConcatError> {
    let mut worst: f64 = 0.0;
    for beta in 0..3u8 {
        let c = qutrit.codeword(&[beta])?.mapped(|k| k.iter().map(|&d| (3 - d) % 3).collect());
        worst = worst.max(c.max_difference(&qutrit.codeword(&[(2 * beta) % 3])?));
    }
    Ok(worst)
}

/// Phase-flip correction of the qubit Shor code in the block basis:
/// measures the `X`-type checks and undoes a single-block `Z̃_t`.
fn correct_qubit_phases(state: ConcatState, bs: &BlockStructure) -> Vec<(ConcatState, bool)> {
    let mut partial = vec![(Vec::new(), state)];
    for &m in &bs.x_masks {
        partial = partial
            .into_iter()
            .flat_map(|(ss, st)| {
                st.measure_block_flip(m).into_iter().map(move |(s, b)| {
                    let mut ss = ss.clone();
                    ss.push(s);
                    (ss, b)
                })
            })
            .collect();
    }
    partial
        .into_iter()
        .map(|(ss, mut st)| {
            if ss.iter().all(|&s| s == 0) {
                return (st, true);
            }
            let block = (0..bs.blocks)
                .find(|&t| bs.x_masks.iter().zip(&ss).all(|(&m, &s)| (m >> t & 1) as u8 == s));
            match block {
                Some(t) => {
                    st.apply_block_phase(t);
                    (st, true)
                }
                None => (st, false),
            }
        })
        .collect()
}

/// Outcome of a fault-tolerance run.
#[derive(Clone, Debug, PartialEq)]
pub struct FaultToleranceReport {
    pub errors: Vec<InjectedError>,
    /// Logical basis inputs run (all six).
    pub inputs: usize,
    /// Measurement branches over all inputs (after qubit-side correction).
    pub branches: usize,
    /// Smallest fidelity, over branches, between the state after the final
    /// `R̂` and the ideal output restricted to the branch's block patterns.
    pub min_qutrit_fidelity: f64,
    /// Smallest fidelity with the ideal output after the qubit code's
    /// phase-flip correction.
    pub min_joint_fidelity: f64,
    /// Branches with a syndrome outside the decoder tables.
    pub unrecognized: usize,
    pub passed: bool,
}

/// Runs the schedule followed by one more `R̂` with the given errors
/// injected, on all six logical inputs, and compares every branch with the
/// error-free output. Requires qutrit distance ≥ 3.
///
/// A qutrit error that sits in front of a transversal block is conjugated
/// to `X̂^{±x} Ẑ^{±z}` depending on that block's control bit, so the next
/// syndrome readout can learn the bit. That projects the qubit code with
/// `(1 ± Z̃_t)/2`, a single-qubit phase-type disturbance; the report
/// therefore also applies the qubit code's phase-flip correction before the
/// final comparison.
pub fn fault_tolerance_demo(
    schedule: &LogicalCcSchedule,
    qubit: &QuditCSSCode,
    qutrit: &QuditCSSCode,
    errors: &[InjectedError],
) -> Result<FaultToleranceReport, ConcatError> {
    let d = qutrit.distance().unwrap_or(0);
    if d < 3 {
        return Err(ConcatError::DistanceTooSmall { distance: d });
    }
    let bs = BlockStructure::of(qubit)?;
    let mut report = FaultToleranceReport {
        errors: errors.to_vec(),
        inputs: 0,
        branches: 0,
        min_qutrit_fidelity: 1.0,
        min_joint_fidelity: 1.0,
        unrecognized: 0,
        passed: false,
    };
    for alpha in 0..2u8 {
        for beta in 0..3u8 {
            report.inputs += 1;
            let input = ConcatState::logical(qubit, qutrit, alpha, beta)?;
            let ideal = ConcatState::logical(qubit, qutrit, alpha, ((1 + alpha) * beta) % 3)?;
            for br in run_schedule(schedule, qutrit, &input, errors, true)? {
                let restricted = ideal.restricted(&br.state.patterns());
                report.min_qutrit_fidelity = report.min_qutrit_fidelity.min(br.state.fidelity(&restricted));
                if !br.recognized {
                    report.unrecognized += 1;
                }
                for (st, ok) in correct_qubit_phases(br.state, &bs) {
                    report.branches += 1;
                    if !ok {
                        report.unrecognized += 1;
                    }
                    report.min_joint_fidelity = report.min_joint_fidelity.min(st.fidelity(&ideal));
                }
            }
        }
    }
    report.passed =
        report.min_qutrit_fidelity >= 1.0 - FIDELITY_TOL && report.min_joint_fidelity >= 1.0 - FIDELITY_TOL;
    Ok(report)
}

/// All eight non-identity single-qutrit Paulis `X̂^x Ẑ^z` on a site.
pub fn site_paulis(site: usize) -> Vec<SitePauli> {
    (0..3u8).flat_map(|x| (0..3u8).map(move |z| SitePauli { site, x, z })).filter(|e| e.x != 0 || e.z != 0).collect()
}

/// Summary of the exhaustive single-error sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepReport {
    pub cases: usize,
    pub passed: usize,
    pub min_joint_fidelity: f64,
    pub failures: Vec<FaultToleranceReport>,
}

/// Every single-qutrit Pauli on every site after every step except the last
/// block (the locations between two transversal blocks).
pub fn single_error_sweep(
    schedule: &LogicalCcSchedule,
    qubit: &QuditCSSCode,
    qutrit: &QuditCSSCode,
) -> Result<SweepReport, ConcatError> {
    let mut sweep = SweepReport { cases: 0, passed: 0, min_joint_fidelity: 1.0, failures: Vec::new() };
    for after_step in 0..schedule.steps.len() - 1 {
        for site in 0..qutrit.n() {
            for pauli in site_paulis(site) {
                let r = fault_tolerance_demo(schedule, qubit, qutrit, &[InjectedError { after_step, pauli }])?;
                sweep.cases += 1;
                sweep.min_joint_fidelity = sweep.min_joint_fidelity.min(r.min_joint_fidelity);
                if r.passed {
                    sweep.passed += 1;
                } else {
                    sweep.failures.push(r);
                }
            }
        }
    }
    Ok(sweep)
}

/// Block-pattern amplitudes for the qubit logical value `α` (uniform over
/// the coset), e.g. for building custom joint inputs.
pub fn logical_patterns(qubit: &QuditCSSCode, alpha: u8) -> Result<BTreeMap<u64, C64>, ConcatError> {
    let bs = BlockStructure::of(qubit)?;
    let patterns = bs.patterns(alpha);
    let c = C64::new(1.0 / (patterns.len() as f64).sqrt(), 0.0);
    Ok(patterns.into_iter().map(|p| (p, c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn powers_of_two_mod_three_alternate() {
        let mut x = 1u64;
        for q in 0..64u64 {
            assert_eq!(pow2_mod3(q) as u64, x);
            x = x * 2 % 3;
        }
    }

    #[test]
    fn trit_helpers_round_trip() {
        let t = Trits::new(4);
        let v = vec![2, 0, 1, 2];
        let q = t.encode(&v);
        assert_eq!(t.decode(q), v);
        assert_eq!(t.decode(t.negate(q)), vec![1, 0, 2, 1]);
        assert_eq!(t.decode(t.shift(q, &[1, 1, 1, 1], 2)), vec![1, 2, 0, 1]);
    }
}
