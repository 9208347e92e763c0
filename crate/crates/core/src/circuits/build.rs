//! Circuit builders for the `L`, `T` and shortest-ribbon operators.
//!
//! System wires of an `n`-edge circuit are `2i` (qutrit) and `2i + 1`
//! (qubit) for edge `i`; ancillas get fresh ids after them.

use super::{AdaptiveCircuit, AncillaInit, CircuitError, GateKind, MeasureBasis, Op};
use crate::algebra::{Anyon, CentralizerIrrep, ClassId, GroupElement};
use crate::lattice::RibbonDirection;

/// Incremental construction of an [`AdaptiveCircuit`].
#[derive(Clone, Debug)]
pub struct CircuitBuilder {
    name: String,
    dims: Vec<usize>,
    system: Vec<usize>,
    slots: usize,
    stack: Vec<(Vec<(usize, u8)>, Vec<Op>)>,
}

impl CircuitBuilder {
    /// Starts a circuit whose system wires `0..n` have the given dimensions.
    pub fn new(name: impl Into<String>, system_dims: &[usize]) -> Self {
        CircuitBuilder {
            name: name.into(),
            dims: system_dims.to_vec(),
            system: (0..system_dims.len()).collect(),
            slots: 0,
            stack: vec![(Vec::new(), Vec::new())],
        }
    }

    /// Starts a circuit on `edges` qutrit–qubit pairs.
    pub fn for_edges(name: impl Into<String>, edges: usize) -> Self {
        let dims: Vec<usize> = (0..edges).flat_map(|_| [3, 2]).collect();
        Self::new(name, &dims)
    }

    fn push(&mut self, op: Op) {
        self.stack.last_mut().expect("root block").1.push(op);
    }

    /// Allocates a fresh ancilla wire.
    pub fn ancilla(&mut self, dim: usize, init: AncillaInit) -> usize {
        let w = self.dims.len();
        self.dims.push(dim);
        self.push(Op::Alloc { wire: w, init });
        w
    }

    /// Traces an ancilla out.
    pub fn free(&mut self, wire: usize) {
        self.push(Op::Free { wire });
    }

    pub fn gate(&mut self, kind: GateKind, wires: &[usize]) {
        self.push(Op::Gate { kind, wires: wires.to_vec() });
    }

    /// Reserves a classical slot.
    pub fn slot(&mut self) -> usize {
        self.slots += 1;
        self.slots - 1
    }

    /// Measures into a fresh slot.
    pub fn measure(&mut self, wire: usize, basis: MeasureBasis) -> usize {
        let s = self.slot();
        self.measure_into(wire, basis, s);
        s
    }

    pub fn measure_into(&mut self, wire: usize, basis: MeasureBasis, slot: usize) {
        self.push(Op::Measure { wire, basis, slot });
    }

    /// Opens a block that runs when every `(slot, value)` pair matches.
    pub fn begin_if(&mut self, condition: &[(usize, u8)]) {
        self.stack.push((condition.to_vec(), Vec::new()));
    }

    pub fn end_if(&mut self) {
        assert!(self.stack.len() > 1, "end_if without begin_if");
        let (condition, body) = self.stack.pop().expect("checked length");
        self.push(Op::If { condition, body });
    }

    /// `X̂^p` for any integer `p` (omitted when `p ≡ 0`).
    pub fn xhat_pow(&mut self, q: usize, p: i64) {
        let p = p.rem_euclid(3) as u8;
        if p != 0 {
            self.gate(GateKind::XHat(p), &[q]);
        }
    }

    /// `Ẑ^p` for any integer `p`.
    pub fn zhat_pow(&mut self, q: usize, p: i64) {
        let p = p.rem_euclid(3) as u8;
        if p != 0 {
            self.gate(GateKind::ZHat(p), &[q]);
        }
    }

    /// `CX̂^p` from qutrit `c` to qutrit `t`.
    pub fn cxhat_pow(&mut self, c: usize, t: usize, p: i64) {
        let p = p.rem_euclid(3) as u8;
        if p != 0 {
            self.gate(GateKind::CXHat(p), &[c, t]);
        }
    }

    /// `X̂^{pZ}` on an edge: `|k̂, l⟩ ↦ |k + (−1)^l p, l⟩`, emitted as
    /// `CĈ · X̂^p · CĈ`.
    pub fn xhat_pow_z(&mut self, q: usize, b: usize, p: i64) {
        if p.rem_euclid(3) != 0 {
            self.gate(GateKind::CCHat, &[b, q]);
            self.xhat_pow(q, p);
            self.gate(GateKind::CCHat, &[b, q]);
        }
    }

    /// `X̂^p` on qutrit `q` controlled by qubit `c`, emitted in time order as
    /// `X̂^{−p}, CĈ, X̂^p, CĈ`.
    pub fn qubit_controlled_xhat(&mut self, c: usize, q: usize, p: i64) {
        // c = 0: k ↦ k; c = 1: k ↦ −((p − k) + p) = k − 2p ≡ k + p.
        if p.rem_euclid(3) != 0 {
            self.xhat_pow(q, -p);
            self.gate(GateKind::CCHat, &[c, q]);
            self.xhat_pow(q, p);
            self.gate(GateKind::CCHat, &[c, q]);
        }
    }

    /// `X̂^{pZ}` on edge `(q, b)` controlled by qubit `c`.
    pub fn qubit_controlled_xhat_pow_z(&mut self, c: usize, q: usize, b: usize, p: i64) {
        if p.rem_euclid(3) != 0 {
            self.gate(GateKind::CCHat, &[b, q]);
            self.qubit_controlled_xhat(c, q, p);
            self.gate(GateKind::CCHat, &[b, q]);
        }
    }

    /// `L^g_±` on edge `(q, b)`.
    pub fn l_op(&mut self, q: usize, b: usize, plus: bool, g: GroupElement) {
        let (a, s) = (g.k() as i64, g.l() == 1);
        if plus {
            // g μ^k σ^l = μ^{a + (−1)^s k} σ^{s+l}
            if s {
                self.gate(GateKind::CHat, &[q]);
            }
            self.xhat_pow(q, a);
        } else {
            // μ^k σ^l ḡ = μ^{k + (−1)^l a'} σ^{l+s} with a' = a (s = 1) or −a.
            let ap = if s { a } else { -a };
            self.xhat_pow_z(q, b, ap);
        }
        if s {
            self.gate(GateKind::X, &[b]);
        }
    }

    /// `L^g_±` on edge `(q, b)` controlled by the qubit `c`.
    pub fn qubit_controlled_l(&mut self, c: usize, q: usize, b: usize, plus: bool, g: GroupElement) {
        let (a, s) = (g.k() as i64, g.l() == 1);
        if plus {
            if s {
                self.gate(GateKind::CCHat, &[c, q]);
            }
            self.qubit_controlled_xhat(c, q, a);
        } else {
            let ap = if s { a } else { -a };
            self.qubit_controlled_xhat_pow_z(c, q, b, ap);
        }
        if s {
            self.gate(GateKind::Cnot, &[c, b]);
        }
    }

    /// `(L^{μ^p}_±)^a` on edge `(q, b)` with `a` the value of qutrit `c`.
    pub fn qutrit_controlled_l_mu(&mut self, c: usize, q: usize, b: usize, plus: bool, p: i64) {
        if plus {
            self.cxhat_pow(c, q, p);
        } else if p.rem_euclid(3) != 0 {
            self.gate(GateKind::CCHat, &[b, q]);
            self.cxhat_pow(c, q, -p);
            self.gate(GateKind::CCHat, &[b, q]);
        }
    }

    pub fn finish(mut self) -> Result<AdaptiveCircuit, CircuitError> {
        if self.stack.len() != 1 {
            return Err(CircuitError::Parse { line: 0, message: "unterminated if block".into() });
        }
        let ops = self.stack.pop().expect("root block").1;
        AdaptiveCircuit::new(self.name, self.dims, self.system, self.slots, ops)
    }
}

/// Single-edge operators `L^g_±` and `T^h_±`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LtOperator {
    L { g: GroupElement, plus: bool },
    T { h: GroupElement, plus: bool },
}

/// A single-edge circuit. For `T^h_±` the circuit measures the edge and the
/// operator is the branch selected by `postselect`.
#[derive(Clone, Debug)]
pub struct LtCircuit {
    pub circuit: AdaptiveCircuit,
    pub postselect: Vec<(usize, u8)>,
}

/// Circuit of `L^g_±` (unitary) or `T^h_±` (measurement plus postselection).
pub fn build_lt_circuit(which: LtOperator) -> Result<LtCircuit, CircuitError> {
    let (q, b) = (0, 1);
    match which {
        LtOperator::L { g, plus } => {
            let mut c = CircuitBuilder::for_edges(format!("L^{g}_{}", sign(plus)), 1);
            c.l_op(q, b, plus, g);
            Ok(LtCircuit { circuit: c.finish()?, postselect: Vec::new() })
        }
        LtOperator::T { h, plus } => {
            let mut c = CircuitBuilder::for_edges(format!("T^{h}_{}", sign(plus)), 1);
            if !plus {
                // Rotate so that the computational value of the qutrit is the
                // eigenvalue exponent of Ẑ^{−Z}: k ↦ −(−1)^l k.
                c.gate(GateKind::CCHat, &[b, q]);
                c.gate(GateKind::CHat, &[q]);
            }
            let mk = c.measure(q, MeasureBasis::ZHat);
            let ml = c.measure(b, MeasureBasis::Z);
            if !plus {
                c.gate(GateKind::CHat, &[q]);
                c.gate(GateKind::CCHat, &[b, q]);
            }
            Ok(LtCircuit { circuit: c.finish()?, postselect: vec![(mk, h.k()), (ml, h.l())] })
        }
    }
}

fn sign(plus: bool) -> char {
    if plus {
        '+'
    } else {
        '-'
    }
}

/// Character exponent `r` with `χ(μ) = ω^r` for the irreps of `Z(C3)`.
fn c3_exponent(irrep: CentralizerIrrep) -> i64 {
    let chi = irrep.character(GroupElement::MU).expect("μ lies in Z(C3)");
    (0..3).find(|&r| (chi - crate::algebra::omega_pow(r)).norm() < 1e-9).expect("character is a cube root of unity")
}

/// Maximally mixed `F^{R,C}` on the shortest ribbon `ρ_h` or `ρ_v`, as a
/// channel on its two edges (edge 1 on wires 0, 1; edge 2 on wires 2, 3).
///
/// The sum over `n ∈ Z(C)` of the `T` projectors in `F^{R,C;u,v}` is
/// diagonal in the edge basis. For the `C2` fluxons it equals
/// `T^{a} ± T^{b}` on a pair `{a, b}` that the basis change `(Ĉ⊗I)X̂^{−wZ}`
/// maps to `{|ŵ', 0⟩, |ŵ', 1⟩}`, i.e. `|ŵ'⟩⟨ŵ'| ⊗ 1` for `D` and
/// `|ŵ'⟩⟨ŵ'| ⊗ Z` for `E`; the circuit therefore measures the rotated qutrit
/// non-destructively, applies `Z` for `E`, and rotates back. The maximally
/// mixed labels come from `|+⟩` / `|0̂₊⟩` control ancillas that are traced
/// out, and from the dephasing measurement itself.
pub fn build_ribbon_circuit(anyon: Anyon, dir: RibbonDirection) -> Result<AdaptiveCircuit, CircuitError> {
    let name = format!("F^{anyon}_{}", dir_tag(dir));
    let mut c = CircuitBuilder::for_edges(name, 2);
    // `t` is the edge carrying the T part, `l` the edge carrying L.
    let ((tq, tb), (lq, lb)) = match dir {
        RibbonDirection::Horizontal => ((0, 1), (2, 3)),
        RibbonDirection::Vertical => ((2, 3), (0, 1)),
    };
    match anyon.class() {
        ClassId::C1 => match anyon.irrep() {
            CentralizerIrrep::S3Plus => {}
            CentralizerIrrep::S3Minus => c.gate(GateKind::Z, &[tb]),
            _ => {
                // Ẑ^{±(w+1)} ⊗ |w+w'⟩⟨w+w'| on the T edge, nothing on the L edge.
                let w = c.ancilla(2, AncillaInit::Plus);
                c.gate(GateKind::CCHat, &[w, tq]);
                c.gate(GateKind::ZHat(1), &[tq]);
                c.gate(GateKind::CCHat, &[w, tq]);
                c.measure(tb, MeasureBasis::Z);
                c.free(w);
            }
        },
        ClassId::C2 => {
            let odd = anyon.irrep() == CentralizerIrrep::Z2Minus;
            let w = c.ancilla(3, AncillaInit::Plus);
            // Basis change (Ĉ⊗I) X̂^{−wZ} on the T edge.
            c.gate(GateKind::CCHat, &[tb, tq]);
            c.cxhat_pow(w, tq, -1);
            c.gate(GateKind::CCHat, &[tb, tq]);
            c.gate(GateKind::CHat, &[tq]);
            c.measure(tq, MeasureBasis::ZHat);
            if odd {
                c.gate(GateKind::Z, &[tb]);
            }
            c.gate(GateKind::CHat, &[tq]);
            c.gate(GateKind::CCHat, &[tb, tq]);
            c.cxhat_pow(w, tq, 1);
            c.gate(GateKind::CCHat, &[tb, tq]);
            // L^{μ^w σ}_+ = X̂^w Ĉ ⊗ X on the L edge.
            c.gate(GateKind::CHat, &[lq]);
            c.cxhat_pow(w, lq, 1);
            c.gate(GateKind::X, &[lb]);
            c.free(w);
        }
        ClassId::C3 => {
            let r = c3_exponent(anyon.irrep());
            // T edge: Ẑ^{±r(w+1)} ⊗ |w+w'⟩⟨w+w'|; L edge: X̂^{w'+1} with w' = z ⊕ w.
            let w = c.ancilla(2, AncillaInit::Plus);
            if r != 0 {
                let r = if dir == RibbonDirection::Horizontal { r } else { -r };
                c.gate(GateKind::CCHat, &[w, tq]);
                c.zhat_pow(tq, r);
                c.gate(GateKind::CCHat, &[w, tq]);
            }
            let z = c.measure(tb, MeasureBasis::Z);
            c.gate(GateKind::CCHat, &[w, lq]);
            c.begin_if(&[(z, 1)]);
            c.gate(GateKind::CHat, &[lq]);
            c.end_if();
            c.gate(GateKind::XHat(1), &[lq]);
            c.begin_if(&[(z, 1)]);
            c.gate(GateKind::CHat, &[lq]);
            c.end_if();
            c.gate(GateKind::CCHat, &[w, lq]);
            c.free(w);
        }
    }
    c.finish()
}

/// The `D`/`E` ribbon circuit as literally published: after the basis change
/// the T-edge qubit is measured in the `X` basis and a wrong-charge outcome
/// is fixed with `Z`. Kept for comparison only; its channel differs from the
/// operator channel (see the module tests).
pub fn build_published_c2_ribbon_circuit(anyon: Anyon, dir: RibbonDirection) -> Result<AdaptiveCircuit, CircuitError> {
    if anyon.class() != ClassId::C2 {
        return Err(CircuitError::ResourceLimit(format!("{anyon} is not a C2 fluxon")));
    }
    let odd = anyon.irrep() == CentralizerIrrep::Z2Minus;
    let mut c = CircuitBuilder::for_edges(format!("F^{anyon}_{}(published)", dir_tag(dir)), 2);
    let ((tq, tb), (lq, lb)) = match dir {
        RibbonDirection::Horizontal => ((0, 1), (2, 3)),
        RibbonDirection::Vertical => ((2, 3), (0, 1)),
    };
    let w = c.ancilla(3, AncillaInit::Plus);
    c.gate(GateKind::CCHat, &[tb, tq]);
    c.cxhat_pow(w, tq, -1);
    c.gate(GateKind::CCHat, &[tb, tq]);
    c.gate(GateKind::CHat, &[tq]);
    c.measure(tq, MeasureBasis::ZHat);
    let x = c.measure(tb, MeasureBasis::X);
    // Expected X outcome: |+⟩ (0) for D, |−⟩ (1) for E.
    c.begin_if(&[(x, if odd { 0 } else { 1 })]);
    c.gate(GateKind::Z, &[tb]);
    c.end_if();
    c.gate(GateKind::CHat, &[tq]);
    c.gate(GateKind::CCHat, &[tb, tq]);
    c.cxhat_pow(w, tq, 1);
    c.gate(GateKind::CCHat, &[tb, tq]);
    c.gate(GateKind::CHat, &[lq]);
    c.cxhat_pow(w, lq, 1);
    c.gate(GateKind::X, &[lb]);
    c.free(w);
    c.finish()
}

fn dir_tag(dir: RibbonDirection) -> &'static str {
    match dir {
        RibbonDirection::Horizontal => "h",
        RibbonDirection::Vertical => "v",
    }
}
