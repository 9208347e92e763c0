//! Dense mixed-dimension register and the circuit interpreter.
//!
//! The amplitude index is big-endian in the wire order: the first wire is
//! the most significant digit.

use rand::Rng;

use super::{AdaptiveCircuit, AncillaInit, CircuitError, GateKind, MeasureBasis, Op};
use crate::algebra::{omega_pow, C64};

/// Dense state of a list of qubit and qutrit wires.
#[derive(Clone, Debug, PartialEq)]
pub struct QuditRegister {
    /// `(wire id, dimension)` in index order.
    wires: Vec<(usize, usize)>,
    amps: Vec<C64>,
}

impl QuditRegister {
    /// `|0…0⟩` on the given wires.
    pub fn zero(wires: &[(usize, usize)]) -> Result<Self, CircuitError> {
        Self::basis_state(wires, &vec![0; wires.len()])
    }

    /// Computational basis state with the given digits.
    pub fn basis_state(wires: &[(usize, usize)], digits: &[usize]) -> Result<Self, CircuitError> {
        let n = check_wires(wires)?;
        if digits.len() != wires.len() {
            return Err(CircuitError::LengthMismatch { expected: wires.len(), found: digits.len() });
        }
        let mut index = 0;
        for (&(id, d), &x) in wires.iter().zip(digits) {
            if x >= d {
                return Err(CircuitError::DimensionMismatch { wire: id, expected: d, found: x });
            }
            index = index * d + x;
        }
        let mut amps = vec![C64::default(); n];
        amps[index] = C64::new(1.0, 0.0);
        Ok(QuditRegister { wires: wires.to_vec(), amps })
    }

    pub fn from_amplitudes(wires: &[(usize, usize)], amps: Vec<C64>) -> Result<Self, CircuitError> {
        let n = check_wires(wires)?;
        if amps.len() != n {
            return Err(CircuitError::LengthMismatch { expected: n, found: amps.len() });
        }
        Ok(QuditRegister { wires: wires.to_vec(), amps })
    }

    pub fn wires(&self) -> &[(usize, usize)] {
        &self.wires
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn len(&self) -> usize {
        self.amps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.amps.is_empty()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Rescales to norm 1 and returns the previous squared norm.
    pub fn normalize(&mut self) -> Result<f64, CircuitError> {
        let n2 = self.norm_sqr();
        if n2 < 1e-300 {
            return Err(CircuitError::ZeroNorm);
        }
        let s = 1.0 / n2.sqrt();
        self.amps.iter_mut().for_each(|a| *a *= s);
        Ok(n2)
    }

    /// `⟨self|other⟩`; both registers must have the same wire layout.
    pub fn inner(&self, other: &QuditRegister) -> Result<C64, CircuitError> {
        if self.wires != other.wires {
            return Err(CircuitError::LengthMismatch { expected: self.len(), found: other.len() });
        }
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// `|⟨self|other⟩|²` for normalized registers.
    pub fn fidelity(&self, other: &QuditRegister) -> Result<f64, CircuitError> {
        Ok(self.inner(other)?.norm_sqr())
    }

    fn position(&self, id: usize) -> Result<usize, CircuitError> {
        self.wires.iter().position(|&(w, _)| w == id).ok_or(CircuitError::UnknownWire(id))
    }

    fn stride(&self, pos: usize) -> usize {
        self.wires[pos + 1..].iter().map(|&(_, d)| d).product()
    }

    /// Base indices (all listed positions at digit 0) and the offset of each
    /// local index (first position most significant).
    fn blocks(&self, positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
        let dims: Vec<usize> = positions.iter().map(|&p| self.wires[p].1).collect();
        let mut local = vec![0usize; dims.iter().product()];
        for (li, slot) in local.iter_mut().enumerate() {
            let mut rem = li;
            let mut off = 0;
            for (j, &p) in positions.iter().enumerate().rev() {
                let x = rem % dims[j];
                rem /= dims[j];
                off += x * self.stride(p);
            }
            *slot = off;
        }
        let mut bases = vec![0usize];
        for (p, &(_, d)) in self.wires.iter().enumerate() {
            if positions.contains(&p) {
                continue;
            }
            let s = self.stride(p);
            bases = bases.iter().flat_map(|&b| (0..d).map(move |x| b + x * s)).collect();
        }
        (bases, local)
    }

    /// Applies a unitary gate kind to the listed wires.
    pub fn apply_gate(&mut self, kind: GateKind, wires: &[usize]) -> Result<(), CircuitError> {
        let dims = kind.dims();
        if wires.len() != dims.len() {
            return Err(CircuitError::Arity { kind, expected: dims.len(), found: wires.len() });
        }
        if wires.len() == 2 && wires[0] == wires[1] {
            return Err(CircuitError::RepeatedWire(kind));
        }
        let mut positions = Vec::with_capacity(wires.len());
        for (&w, &d) in wires.iter().zip(dims) {
            let p = self.position(w)?;
            if self.wires[p].1 != d {
                return Err(CircuitError::DimensionMismatch { wire: w, expected: d, found: self.wires[p].1 });
            }
            positions.push(p);
        }
        let table = kind.monomial();
        let (bases, offsets) = self.blocks(&positions);
        let mut out = vec![C64::default(); self.amps.len()];
        for &b in &bases {
            for (li, &(lo, phase)) in table.iter().enumerate() {
                out[b + offsets[lo]] = phase * self.amps[b + offsets[li]];
            }
        }
        self.amps = out;
        Ok(())
    }

    /// Applies a `d × d` matrix (row-major, `m[r][c]`) to one wire.
    fn apply_local(&mut self, pos: usize, m: &[Vec<C64>]) {
        let (bases, offsets) = self.blocks(&[pos]);
        let d = offsets.len();
        let mut v = vec![C64::default(); d];
        for &b in &bases {
            for (x, slot) in v.iter_mut().enumerate() {
                *slot = self.amps[b + offsets[x]];
            }
            for r in 0..d {
                self.amps[b + offsets[r]] = (0..d).map(|c| m[r][c] * v[c]).sum();
            }
        }
    }

    fn check_basis(&self, wire: usize, basis: MeasureBasis) -> Result<usize, CircuitError> {
        let p = self.position(wire)?;
        if self.wires[p].1 != basis.dim() {
            return Err(CircuitError::DimensionMismatch { wire, expected: basis.dim(), found: self.wires[p].1 });
        }
        Ok(p)
    }

    /// Unnormalized outcome weights `‖P_o ψ‖²` of a measurement.
    pub fn outcome_weights(&self, wire: usize, basis: MeasureBasis) -> Result<Vec<f64>, CircuitError> {
        let p = self.check_basis(wire, basis)?;
        let projectors = projectors(basis);
        let (bases, offsets) = self.blocks(&[p]);
        let d = offsets.len();
        let mut w = vec![0.0; projectors.len()];
        let mut v = vec![C64::default(); d];
        for &b in &bases {
            for (x, slot) in v.iter_mut().enumerate() {
                *slot = self.amps[b + offsets[x]];
            }
            for (o, proj) in projectors.iter().enumerate() {
                w[o] += (0..d).map(|r| (0..d).map(|c| proj[r][c] * v[c]).sum::<C64>().norm_sqr()).sum::<f64>();
            }
        }
        Ok(w)
    }

    /// Applies the projector of one outcome (no renormalization).
    pub fn project(&mut self, wire: usize, basis: MeasureBasis, outcome: usize) -> Result<(), CircuitError> {
        let p = self.check_basis(wire, basis)?;
        let proj = projectors(basis);
        let m = proj.get(outcome).ok_or(CircuitError::UnknownSlot(outcome))?;
        self.apply_local(p, m);
        Ok(())
    }

    /// Appends a wire in the given single-wire state.
    pub fn append_wire(&mut self, id: usize, state: &[C64]) -> Result<(), CircuitError> {
        let d = state.len();
        if d != 2 && d != 3 {
            return Err(CircuitError::InvalidDimension(d));
        }
        if self.wires.iter().any(|&(w, _)| w == id) {
            return Err(CircuitError::WireInUse(id));
        }
        let mut out = Vec::with_capacity(self.amps.len() * d);
        for a in &self.amps {
            out.extend(state.iter().map(|s| a * s));
        }
        self.amps = out;
        self.wires.push((id, d));
        Ok(())
    }

    /// Squared-norm weight of each computational value of a wire.
    pub fn marginal(&self, wire: usize) -> Result<Vec<f64>, CircuitError> {
        let p = self.position(wire)?;
        let (bases, offsets) = self.blocks(&[p]);
        Ok(offsets.iter().map(|&o| bases.iter().map(|&b| self.amps[b + o].norm_sqr()).sum()).collect())
    }

    /// Keeps the slice where `wire` has `value` and removes the wire.
    pub fn remove_wire(&mut self, wire: usize, value: usize) -> Result<(), CircuitError> {
        let p = self.position(wire)?;
        let d = self.wires[p].1;
        if value >= d {
            return Err(CircuitError::DimensionMismatch { wire, expected: d, found: value });
        }
        let (bases, offsets) = self.blocks(&[p]);
        // `bases` enumerates the remaining wires in big-endian order.
        self.amps = bases.iter().map(|&b| self.amps[b + offsets[value]]).collect();
        self.wires.remove(p);
        Ok(())
    }
}

fn check_wires(wires: &[(usize, usize)]) -> Result<usize, CircuitError> {
    let mut n = 1usize;
    for (i, &(id, d)) in wires.iter().enumerate() {
        if d != 2 && d != 3 {
            return Err(CircuitError::InvalidDimension(d));
        }
        if wires[..i].iter().any(|&(w, _)| w == id) {
            return Err(CircuitError::WireInUse(id));
        }
        n = n.checked_mul(d).ok_or_else(|| CircuitError::ResourceLimit("register too large".into()))?;
    }
    if n > 1 << 26 {
        return Err(CircuitError::ResourceLimit(format!("register dimension {n} exceeds 2^26")));
    }
    Ok(n)
}

/// Projectors (row-major) of a measurement basis.
fn projectors(basis: MeasureBasis) -> Vec<Vec<Vec<C64>>> {
    let outer = |v: &[C64]| -> Vec<Vec<C64>> { v.iter().map(|a| v.iter().map(|b| a * b.conj()).collect()).collect() };
    let unit = |d: usize, i: usize| -> Vec<C64> {
        (0..d).map(|j| if i == j { C64::new(1.0, 0.0) } else { C64::default() }).collect()
    };
    let fourier = |j: usize| -> Vec<C64> {
        (0..3).map(|a| omega_pow((j * a) as i64) / 3f64.sqrt()).collect()
    };
    match basis {
        MeasureBasis::Z => (0..2).map(|i| outer(&unit(2, i))).collect(),
        MeasureBasis::ZHat => (0..3).map(|i| outer(&unit(3, i))).collect(),
        MeasureBasis::X => {
            let s = 1.0 / 2f64.sqrt();
            vec![
                outer(&[C64::new(s, 0.0), C64::new(s, 0.0)]),
                outer(&[C64::new(s, 0.0), C64::new(-s, 0.0)]),
            ]
        }
        MeasureBasis::XHat => (0..3).map(|j| outer(&fourier(j))).collect(),
        MeasureBasis::XHatZeroVsRest => {
            let p0 = outer(&fourier(0));
            let rest = (0..3)
                .map(|r| (0..3).map(|c| if r == c { C64::new(1.0, 0.0) - p0[r][c] } else { -p0[r][c] }).collect())
                .collect();
            vec![p0, rest]
        }
    }
}

fn init_state(init: AncillaInit, d: usize, value: usize) -> Vec<C64> {
    match init {
        AncillaInit::Zero | AncillaInit::MaximallyMixed => {
            (0..d).map(|x| if x == value { C64::new(1.0, 0.0) } else { C64::default() }).collect()
        }
        AncillaInit::Plus => vec![C64::new(1.0 / (d as f64).sqrt(), 0.0); d],
    }
}

/// Classical record of one run.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Transcript {
    /// Measurement outcome per slot (`None` when the slot was not reached).
    pub outcomes: Vec<Option<u8>>,
    /// Values sampled for maximally mixed ancillas and traced-out wires, in
    /// program order.
    pub hidden: Vec<u8>,
}

impl Transcript {
    pub fn new(slots: usize) -> Self {
        Transcript { outcomes: vec![None; slots], hidden: Vec::new() }
    }

    pub fn get(&self, slot: usize) -> Option<u8> {
        self.outcomes.get(slot).copied().flatten()
    }

    fn satisfies(&self, condition: &[(usize, u8)]) -> bool {
        condition.iter().all(|&(s, v)| self.get(s) == Some(v))
    }
}

fn check_register(circuit: &AdaptiveCircuit, register: &QuditRegister) -> Result<(), CircuitError> {
    for &w in circuit.system() {
        let p = register.position(w)?;
        let d = circuit.dims()[w];
        if register.wires[p].1 != d {
            return Err(CircuitError::DimensionMismatch { wire: w, expected: d, found: register.wires[p].1 });
        }
    }
    for &(w, _) in &register.wires {
        if w < circuit.dims().len() && !circuit.system().contains(&w) {
            return Err(CircuitError::WireInUse(w));
        }
    }
    Ok(())
}

fn sample_index<R: Rng + ?Sized>(weights: &[f64], rng: &mut R) -> usize {
    let total: f64 = weights.iter().sum();
    let mut x = rng.gen::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        if x < w {
            return i;
        }
        x -= w;
    }
    weights.iter().rposition(|&w| w > 0.0).unwrap_or(0)
}

/// Runs one trajectory: measurements and traced-out wires are sampled with
/// Born probabilities and the state is renormalized after each. The register
/// may carry extra spectator wires whose ids lie outside the circuit.
pub fn simulate<R: Rng + ?Sized>(
    circuit: &AdaptiveCircuit,
    mut register: QuditRegister,
    rng: &mut R,
) -> Result<(QuditRegister, Transcript), CircuitError> {
    check_register(circuit, &register)?;
    register.normalize()?;
    let mut transcript = Transcript::new(circuit.slots());
    run_trajectory(circuit, circuit.ops(), &mut register, &mut transcript, rng)?;
    Ok((register, transcript))
}

fn run_trajectory<R: Rng + ?Sized>(
    circuit: &AdaptiveCircuit,
    ops: &[Op],
    reg: &mut QuditRegister,
    tr: &mut Transcript,
    rng: &mut R,
) -> Result<(), CircuitError> {
    for op in ops {
        match op {
            Op::Gate { kind, wires } => reg.apply_gate(*kind, wires)?,
            Op::Measure { wire, basis, slot } => {
                let w = reg.outcome_weights(*wire, *basis)?;
                let o = sample_index(&w, rng);
                reg.project(*wire, *basis, o)?;
                reg.normalize()?;
                tr.outcomes[*slot] = Some(o as u8);
            }
            Op::Alloc { wire, init } => {
                let d = circuit.dims()[*wire];
                let value = if *init == AncillaInit::MaximallyMixed {
                    let v = rng.gen_range(0..d);
                    tr.hidden.push(v as u8);
                    v
                } else {
                    0
                };
                reg.append_wire(*wire, &init_state(*init, d, value))?;
            }
            Op::Free { wire } => {
                let w = reg.marginal(*wire)?;
                let v = sample_index(&w, rng);
                reg.remove_wire(*wire, v)?;
                reg.normalize()?;
                tr.hidden.push(v as u8);
            }
            Op::If { condition, body } => {
                if tr.satisfies(condition) {
                    run_trajectory(circuit, body, reg, tr, rng)?;
                }
            }
        }
    }
    Ok(())
}

/// One branch of the exhaustive expansion. The register is unnormalized;
/// its squared norm is the branch probability times the input squared norm.
#[derive(Clone, Debug)]
pub struct Branch {
    pub register: QuditRegister,
    pub transcript: Transcript,
}

impl Branch {
    pub fn weight(&self) -> f64 {
        self.register.norm_sqr()
    }
}

/// Expands every measurement outcome, mixed-ancilla value and traced-out
/// value, without renormalizing. Branches with relative weight below
/// `1e-24` are dropped.
pub fn enumerate_branches(circuit: &AdaptiveCircuit, register: QuditRegister) -> Result<Vec<Branch>, CircuitError> {
    check_register(circuit, &register)?;
    let tol = 1e-24 * register.norm_sqr();
    let mut out = Vec::new();
    explore(circuit, vec![(circuit.ops(), 0)], register, Transcript::new(circuit.slots()), tol, &mut out)?;
    Ok(out)
}

fn explore<'c>(
    circuit: &'c AdaptiveCircuit,
    mut frames: Vec<(&'c [Op], usize)>,
    mut reg: QuditRegister,
    tr: Transcript,
    tol: f64,
    out: &mut Vec<Branch>,
) -> Result<(), CircuitError> {
    loop {
        let Some(top) = frames.last_mut() else {
            out.push(Branch { register: reg, transcript: tr });
            return Ok(());
        };
        let (ops, pc) = (top.0, top.1);
        if pc >= ops.len() {
            frames.pop();
            continue;
        }
        top.1 += 1;
        match &ops[pc] {
            Op::Gate { kind, wires } => reg.apply_gate(*kind, wires)?,
            Op::If { condition, body } => {
                if tr.satisfies(condition) {
                    frames.push((body, 0));
                }
            }
            Op::Alloc { wire, init } => {
                let d = circuit.dims()[*wire];
                if *init != AncillaInit::MaximallyMixed {
                    reg.append_wire(*wire, &init_state(*init, d, 0))?;
                    continue;
                }
                for v in 0..d {
                    let mut r = reg.clone();
                    let mut state = init_state(*init, d, v);
                    state.iter_mut().for_each(|a| *a /= (d as f64).sqrt());
                    r.append_wire(*wire, &state)?;
                    let mut t = tr.clone();
                    t.hidden.push(v as u8);
                    explore(circuit, frames.clone(), r, t, tol, out)?;
                }
                return Ok(());
            }
            Op::Measure { wire, basis, slot } => {
                let w = reg.outcome_weights(*wire, *basis)?;
                for (o, &p) in w.iter().enumerate() {
                    if p <= tol {
                        continue;
                    }
                    let mut r = reg.clone();
                    r.project(*wire, *basis, o)?;
                    let mut t = tr.clone();
                    t.outcomes[*slot] = Some(o as u8);
                    explore(circuit, frames.clone(), r, t, tol, out)?;
                }
                return Ok(());
            }
            Op::Free { wire } => {
                let w = reg.marginal(*wire)?;
                for (v, &p) in w.iter().enumerate() {
                    if p <= tol {
                        continue;
                    }
                    let mut r = reg.clone();
                    r.remove_wire(*wire, v)?;
                    let mut t = tr.clone();
                    t.hidden.push(v as u8);
                    explore(circuit, frames.clone(), r, t, tol, out)?;
                }
                return Ok(());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::CircuitBuilder;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_register(wires: &[(usize, usize)], seed: u64) -> QuditRegister {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n: usize = wires.iter().map(|w| w.1).product();
        let amps = (0..n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut r = QuditRegister::from_amplitudes(wires, amps).unwrap();
        r.normalize().unwrap();
        r
    }

    #[test]
    fn big_endian_indexing_and_wire_removal() {
        let wires = [(0, 3), (1, 2)];
        let mut r = QuditRegister::basis_state(&wires, &[2, 1]).unwrap();
        assert_eq!(r.amplitudes()[5], C64::new(1.0, 0.0));
        r.apply_gate(GateKind::XHat(1), &[0]).unwrap();
        assert_eq!(r.amplitudes()[1], C64::new(1.0, 0.0));
        r.apply_gate(GateKind::CCHat, &[1, 0]).unwrap();
        assert_eq!(r.amplitudes()[1], C64::new(1.0, 0.0), "Ĉ fixes 0̂");
        r.remove_wire(0, 0).unwrap();
        assert_eq!(r.wires(), &[(1, 2)]);
        assert_eq!(r.amplitudes(), &[C64::default(), C64::new(1.0, 0.0)]);
    }

    #[test]
    fn gates_are_norm_preserving_on_random_states() {
        let wires = [(0, 2), (1, 3), (2, 3), (3, 2)];
        for (kind, ws) in [
            (GateKind::Y, vec![3]),
            (GateKind::ZHat(2), vec![2]),
            (GateKind::CXHat(1), vec![2, 1]),
            (GateKind::CCHat, vec![0, 2]),
            (GateKind::Cnot, vec![3, 0]),
        ] {
            let mut r = random_register(&wires, 3);
            r.apply_gate(kind, &ws).unwrap();
            assert!((r.norm_sqr() - 1.0).abs() < 1e-12);
            r.apply_gate(kind.inverse(), &ws).unwrap();
            if kind != GateKind::Y {
                assert!((r.fidelity(&random_register(&wires, 3)).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let mut r = QuditRegister::zero(&[(0, 2)]).unwrap();
        assert!(matches!(r.apply_gate(GateKind::XHat(1), &[0]), Err(CircuitError::DimensionMismatch { .. })));
        assert!(matches!(r.apply_gate(GateKind::X, &[5]), Err(CircuitError::UnknownWire(5))));
    }

    #[test]
    fn xhat_basis_convention() {
        // |ĵ₊⟩ is the X̂-eigenstate with eigenvalue ω^{−j}.
        for j in 0..3 {
            let amps: Vec<C64> = (0..3).map(|a| omega_pow((j * a) as i64) / 3f64.sqrt()).collect();
            let r = QuditRegister::from_amplitudes(&[(0, 3)], amps).unwrap();
            let w = r.outcome_weights(0, MeasureBasis::XHat).unwrap();
            assert!((w[j] - 1.0).abs() < 1e-12);
            let mut x = r.clone();
            x.apply_gate(GateKind::XHat(1), &[0]).unwrap();
            let ev = r.inner(&x).unwrap();
            assert!((ev - omega_pow(-(j as i64))).norm() < 1e-12);
        }
    }

    #[test]
    fn empty_circuit_is_identity() {
        let c = CircuitBuilder::new("empty", &[3, 2]).finish().unwrap();
        let r = random_register(&c.system_wires(), 9);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let (out, tr) = simulate(&c, r.clone(), &mut rng).unwrap();
        assert!((out.fidelity(&r).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(tr, Transcript::new(0));
    }

    #[test]
    fn trajectory_and_exhaustive_statistics_agree() {
        let mut b = CircuitBuilder::new("mixed", &[3]);
        let a = b.ancilla(2, AncillaInit::MaximallyMixed);
        b.gate(GateKind::CCHat, &[a, 0]);
        b.free(a);
        let s = b.measure(0, MeasureBasis::XHat);
        let c = b.finish().unwrap();
        let r = QuditRegister::basis_state(&c.system_wires(), &[1]).unwrap();
        let branches = enumerate_branches(&c, r.clone()).unwrap();
        let total: f64 = branches.iter().map(Branch::weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let mut counts = [0usize; 3];
        for _ in 0..3000 {
            let (_, t) = simulate(&c, r.clone(), &mut rng).unwrap();
            counts[t.get(s).unwrap() as usize] += 1;
        }
        for j in 0..3 {
            let p: f64 =
                branches.iter().filter(|b| b.transcript.get(s) == Some(j as u8)).map(Branch::weight).sum();
            let se = (p * (1.0 - p) / 3000.0).sqrt().max(1e-3);
            assert!(((counts[j] as f64 / 3000.0) - p).abs() < 4.0 * se);
        }
    }
}
