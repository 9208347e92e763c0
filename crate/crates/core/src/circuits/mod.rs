//! Qutrit–qubit circuits for the quantum-double operators.
//!
//! Every edge `|μ^k σ^l⟩` is stored as a qutrit `|k̂⟩` followed by a qubit
//! `|l⟩`. Circuits are built from a small gate set in which every unitary
//! kind is monomial (a permutation with phases):
//!
//! * qubit Paulis `X`, `Y`, `Z` and `CNOT`;
//! * qutrit `X̂^p`, `Ẑ^p`, charge conjugation `Ĉ |k̂⟩ = |−k̂⟩` and the
//!   qutrit-controlled `CX̂^p |c, t⟩ = |c, t + p·c⟩`;
//! * the qubit-controlled charge conjugation `CĈ |l, k̂⟩ = |l, (−1)^l k̂⟩`,
//!   the only non-Clifford kind.
//!
//! Composite operations such as `X̂^{±Z}` (`X̂^{±1}` conjugated by `CĈ`) are
//! emitted as these primitives. Ancillas are allocated and freed explicitly;
//! freeing traces the wire out. Measurements record an outcome in a
//! classical slot, and `If` blocks branch on earlier outcomes.
//!
//! Outcome conventions: a qubit `Z`/`X` measurement returns `l` / `0` for
//! `|+⟩` and `1` for `|−⟩`; a qutrit `Ẑ` measurement returns `k`; a qutrit
//! `X̂` measurement returns `j` for `|ĵ₊⟩ = 3^{-1/2} Σ_a ω^{ja} |â⟩`, which is
//! the state a controlled-`U^a` leaves on an ancilla when `U` has eigenvalue
//! `ω^j`. The two-outcome measurement `{|0̂₊⟩, ⊥}` returns `0` or `1`.

mod build;
mod equivalence;
mod kmeasure;
mod register;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::lattice::LatticeError;

pub use build::{
    build_lt_circuit, build_published_c2_ribbon_circuit, build_ribbon_circuit, CircuitBuilder, LtCircuit, LtOperator,
};
pub use equivalence::{
    check_equivalence, check_instrument, choi_distance, choi_max_entry_distance, circuit_kraus, is_clifford, lt_operator_matrix, mutate, non_clifford_kinds,
    ribbon_operator_channel, Instrument, Mutation, OperatorChannel, MAX_CHANNEL_DIM, MAX_INSTRUMENT_DIM,
};
pub use kmeasure::{
    build_k_circuit, edge_digit, group_from_digit, k_circuit_outcomes, k_support, k_sampling_check, refined_k_instrument,
    site_ensemble, KCircuit, KSamplingReport, KSlots, SiteEnsemble,
};
pub use register::{enumerate_branches, simulate, Branch, QuditRegister, Transcript};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("wire {wire} has dimension {found}, expected {expected}")]
    DimensionMismatch { wire: usize, expected: usize, found: usize },
    #[error("wire {0} is not live in the register")]
    UnknownWire(usize),
    #[error("wire {0} is already live")]
    WireInUse(usize),
    #[error("wire dimension {0} is not 2 or 3")]
    InvalidDimension(usize),
    #[error("gate {kind} needs {expected} wires, got {found}")]
    Arity { kind: GateKind, expected: usize, found: usize },
    #[error("gate {0} acts twice on one wire")]
    RepeatedWire(GateKind),
    #[error("classical slot {0} is out of range")]
    UnknownSlot(usize),
    #[error("ancilla wire {0} is still live at the end of a block")]
    UnfreedAncilla(usize),
    #[error("amplitude vector has length {found}, expected {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("resource limit: {0}")]
    ResourceLimit(String),
    #[error("operator is not proportional to a trace-preserving channel: {0}")]
    NotTracePreserving(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// Unitary gate kinds. Powers are taken mod 3 and must be 1 or 2.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GateKind {
    X,
    Y,
    Z,
    XHat(u8),
    ZHat(u8),
    CHat,
    /// Control qubit, target qubit.
    Cnot,
    /// Control qutrit, target qutrit: `|c, t⟩ ↦ |c, t + p·c⟩`.
    CXHat(u8),
    /// Control qubit, target qutrit: `|l, k̂⟩ ↦ |l, (−1)^l k̂⟩`.
    CCHat,
}

impl GateKind {
    /// Wire dimensions in gate order (controls first).
    pub fn dims(self) -> &'static [usize] {
        match self {
            GateKind::X | GateKind::Y | GateKind::Z => &[2],
            GateKind::XHat(_) | GateKind::ZHat(_) | GateKind::CHat => &[3],
            GateKind::Cnot => &[2, 2],
            GateKind::CXHat(_) => &[3, 3],
            GateKind::CCHat => &[2, 3],
        }
    }

    /// Monomial form: local input index (first wire most significant) ↦
    /// `(output index, phase)`.
    pub fn monomial(self) -> Vec<(usize, crate::algebra::C64)> {
        use crate::algebra::{omega_pow, C64};
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match self {
            GateKind::X => vec![(1, one), (0, one)],
            GateKind::Y => vec![(1, i), (0, -i)],
            GateKind::Z => vec![(0, one), (1, -one)],
            GateKind::XHat(p) => (0..3).map(|k| ((k + p as usize) % 3, one)).collect(),
            GateKind::ZHat(p) => (0..3).map(|k| (k, omega_pow((p as usize * k) as i64))).collect(),
            GateKind::CHat => (0..3).map(|k| ((3 - k) % 3, one)).collect(),
            GateKind::Cnot => (0..4).map(|x| ((x >> 1) << 1 | ((x & 1) ^ (x >> 1)), one)).collect(),
            GateKind::CXHat(p) => (0..9)
                .map(|x| {
                    let (c, t) = (x / 3, x % 3);
                    (c * 3 + (t + p as usize * c) % 3, one)
                })
                .collect(),
            GateKind::CCHat => (0..6)
                .map(|x| {
                    let (l, k) = (x / 3, x % 3);
                    (l * 3 + if l == 1 { (3 - k) % 3 } else { k }, one)
                })
                .collect(),
        }
    }

    /// Inverse kind.
    pub fn inverse(self) -> GateKind {
        match self {
            GateKind::XHat(p) => GateKind::XHat(3 - p),
            GateKind::ZHat(p) => GateKind::ZHat(3 - p),
            GateKind::CXHat(p) => GateKind::CXHat(3 - p),
            other => other,
        }
    }

    fn validate(self) -> Result<(), CircuitError> {
        match self {
            GateKind::XHat(p) | GateKind::ZHat(p) | GateKind::CXHat(p) if p == 0 || p > 2 => Err(
                CircuitError::Parse { line: 0, message: format!("power {p} of {self:?} must be 1 or 2") },
            ),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateKind::X => f.write_str("x"),
            GateKind::Y => f.write_str("y"),
            GateKind::Z => f.write_str("z"),
            GateKind::XHat(p) => write!(f, "xhat^{p}"),
            GateKind::ZHat(p) => write!(f, "zhat^{p}"),
            GateKind::CHat => f.write_str("chat"),
            GateKind::Cnot => f.write_str("cnot"),
            GateKind::CXHat(p) => write!(f, "cxhat^{p}"),
            GateKind::CCHat => f.write_str("cchat"),
        }
    }
}

impl FromStr for GateKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (name, power) = match s.split_once('^') {
            Some((n, p)) => (n, Some(p.parse::<u8>().map_err(|_| format!("bad power in {s}"))?)),
            None => (s, None),
        };
        let kind = match (name, power) {
            ("x", None) => GateKind::X,
            ("y", None) => GateKind::Y,
            ("z", None) => GateKind::Z,
            ("xhat", Some(p)) => GateKind::XHat(p),
            ("zhat", Some(p)) => GateKind::ZHat(p),
            ("chat", None) => GateKind::CHat,
            ("cnot", None) => GateKind::Cnot,
            ("cxhat", Some(p)) => GateKind::CXHat(p),
            ("cchat", None) => GateKind::CCHat,
            _ => return Err(format!("unknown gate {s}")),
        };
        kind.validate().map_err(|e| e.to_string())?;
        Ok(kind)
    }
}

/// Single-wire measurement bases.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasureBasis {
    /// Qubit computational basis.
    Z,
    /// Qubit `{|+⟩, |−⟩}`.
    X,
    /// Qutrit computational basis.
    ZHat,
    /// Qutrit `{|ĵ₊⟩}`.
    XHat,
    /// Qutrit `{|0̂₊⟩, ⊥}`.
    XHatZeroVsRest,
}

impl MeasureBasis {
    pub fn dim(self) -> usize {
        match self {
            MeasureBasis::Z | MeasureBasis::X => 2,
            _ => 3,
        }
    }

    pub fn outcomes(self) -> usize {
        match self {
            MeasureBasis::Z | MeasureBasis::X | MeasureBasis::XHatZeroVsRest => 2,
            MeasureBasis::ZHat | MeasureBasis::XHat => 3,
        }
    }

    fn name(self) -> &'static str {
        match self {
            MeasureBasis::Z => "z",
            MeasureBasis::X => "x",
            MeasureBasis::ZHat => "zhat",
            MeasureBasis::XHat => "xhat",
            MeasureBasis::XHatZeroVsRest => "xhat0",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [MeasureBasis::Z, MeasureBasis::X, MeasureBasis::ZHat, MeasureBasis::XHat, MeasureBasis::XHatZeroVsRest]
            .into_iter()
            .find(|b| b.name() == s)
    }
}

/// Initial state of an allocated ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AncillaInit {
    /// `|0⟩` or `|0̂⟩`.
    Zero,
    /// `|+⟩` or `|0̂₊⟩`.
    Plus,
    /// Maximally mixed; simulated by sampling a computational basis state.
    MaximallyMixed,
}

impl AncillaInit {
    fn name(self) -> &'static str {
        match self {
            AncillaInit::Zero => "zero",
            AncillaInit::Plus => "plus",
            AncillaInit::MaximallyMixed => "mixed",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [AncillaInit::Zero, AncillaInit::Plus, AncillaInit::MaximallyMixed].into_iter().find(|a| a.name() == s)
    }
}

/// One circuit instruction.
#[derive(Clone, Debug, PartialEq)]
pub enum Op {
    Gate { kind: GateKind, wires: Vec<usize> },
    /// Projective measurement; the post-measurement state is kept.
    Measure { wire: usize, basis: MeasureBasis, slot: usize },
    Alloc { wire: usize, init: AncillaInit },
    /// Traces the wire out.
    Free { wire: usize },
    /// Runs `body` when every `(slot, value)` pair matches the transcript.
    If { condition: Vec<(usize, u8)>, body: Vec<Op> },
}

/// Circuit with classical branch points. Immutable once built.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptiveCircuit {
    name: String,
    dims: Vec<usize>,
    system: Vec<usize>,
    slots: usize,
    ops: Vec<Op>,
}

impl AdaptiveCircuit {
    /// Validates and assembles a circuit. `dims[w]` is the dimension of wire
    /// `w`; `system` lists the wires present at the start, in register order.
    pub fn new(
        name: impl Into<String>,
        dims: Vec<usize>,
        system: Vec<usize>,
        slots: usize,
        ops: Vec<Op>,
    ) -> Result<Self, CircuitError> {
        let circuit = AdaptiveCircuit { name: name.into(), dims, system, slots, ops };
        circuit.validate()?;
        Ok(circuit)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn system(&self) -> &[usize] {
        &self.system
    }

    /// `(wire, dimension)` of the system wires.
    pub fn system_wires(&self) -> Vec<(usize, usize)> {
        self.system.iter().map(|&w| (w, self.dims[w])).collect()
    }

    /// Product of the system wire dimensions.
    pub fn system_dim(&self) -> usize {
        self.system.iter().map(|&w| self.dims[w]).product()
    }

    pub fn slots(&self) -> usize {
        self.slots
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    /// Every gate in every branch, in program order.
    pub fn gates(&self) -> Vec<(GateKind, Vec<usize>)> {
        fn walk(ops: &[Op], out: &mut Vec<(GateKind, Vec<usize>)>) {
            for op in ops {
                match op {
                    Op::Gate { kind, wires } => out.push((*kind, wires.clone())),
                    Op::If { body, .. } => walk(body, out),
                    _ => {}
                }
            }
        }
        let mut out = Vec::new();
        walk(&self.ops, &mut out);
        out
    }

    fn validate(&self) -> Result<(), CircuitError> {
        for &d in &self.dims {
            if d != 2 && d != 3 {
                return Err(CircuitError::InvalidDimension(d));
            }
        }
        let mut live = vec![false; self.dims.len()];
        for &w in &self.system {
            if w >= self.dims.len() {
                return Err(CircuitError::UnknownWire(w));
            }
            if live[w] {
                return Err(CircuitError::WireInUse(w));
            }
            live[w] = true;
        }
        self.validate_block(&self.ops, &mut live)?;
        let system_only = (0..self.dims.len()).all(|w| live[w] == self.system.contains(&w));
        if !system_only {
            let w = (0..self.dims.len()).find(|&w| live[w] && !self.system.contains(&w)).unwrap_or(0);
            return Err(CircuitError::UnfreedAncilla(w));
        }
        Ok(())
    }

    fn validate_block(&self, ops: &[Op], live: &mut Vec<bool>) -> Result<(), CircuitError> {
        let check = |w: usize, dim: usize, live: &Vec<bool>| -> Result<(), CircuitError> {
            if w >= self.dims.len() || !live[w] {
                return Err(CircuitError::UnknownWire(w));
            }
            if self.dims[w] != dim {
                return Err(CircuitError::DimensionMismatch { wire: w, expected: dim, found: self.dims[w] });
            }
            Ok(())
        };
        for op in ops {
            match op {
                Op::Gate { kind, wires } => {
                    kind.validate()?;
                    let dims = kind.dims();
                    if wires.len() != dims.len() {
                        return Err(CircuitError::Arity { kind: *kind, expected: dims.len(), found: wires.len() });
                    }
                    if wires.len() == 2 && wires[0] == wires[1] {
                        return Err(CircuitError::RepeatedWire(*kind));
                    }
                    for (&w, &d) in wires.iter().zip(dims) {
                        check(w, d, live)?;
                    }
                }
                Op::Measure { wire, basis, slot } => {
                    check(*wire, basis.dim(), live)?;
                    if *slot >= self.slots {
                        return Err(CircuitError::UnknownSlot(*slot));
                    }
                }
                Op::Alloc { wire, .. } => {
                    if *wire >= self.dims.len() {
                        return Err(CircuitError::UnknownWire(*wire));
                    }
                    if live[*wire] {
                        return Err(CircuitError::WireInUse(*wire));
                    }
                    live[*wire] = true;
                }
                Op::Free { wire } => {
                    check(*wire, self.dims.get(*wire).copied().unwrap_or(0), live)?;
                    live[*wire] = false;
                }
                Op::If { condition, body } => {
                    for &(slot, _) in condition {
                        if slot >= self.slots {
                            return Err(CircuitError::UnknownSlot(slot));
                        }
                    }
                    let before = live.clone();
                    self.validate_block(body, live)?;
                    if *live != before {
                        let w = (0..live.len()).find(|&w| live[w] != before[w]).unwrap_or(0);
                        return Err(CircuitError::UnfreedAncilla(w));
                    }
                }
            }
        }
        Ok(())
    }

    /// Line-oriented text form (one instruction per line).
    pub fn to_text(&self) -> String {
        fn block(ops: &[Op], depth: usize, out: &mut String) {
            let pad = "  ".repeat(depth);
            for op in ops {
                match op {
                    Op::Gate { kind, wires } => {
                        let ws: Vec<String> = wires.iter().map(|w| format!("w{w}")).collect();
                        out.push_str(&format!("{pad}{kind} {}\n", ws.join(" ")));
                    }
                    Op::Measure { wire, basis, slot } => {
                        out.push_str(&format!("{pad}measure {} w{wire} -> m{slot}\n", basis.name()));
                    }
                    Op::Alloc { wire, init } => out.push_str(&format!("{pad}alloc w{wire} {}\n", init.name())),
                    Op::Free { wire } => out.push_str(&format!("{pad}free w{wire}\n")),
                    Op::If { condition, body } => {
                        let c: Vec<String> = condition.iter().map(|(s, v)| format!("m{s}={v}")).collect();
                        out.push_str(&format!("{pad}if {} {{\n", c.join(" ")));
                        block(body, depth + 1, out);
                        out.push_str(&format!("{pad}}}\n"));
                    }
                }
            }
        }
        let mut out = String::new();
        out.push_str(&format!("circuit {}\n", self.name));
        let dims: Vec<String> = self.dims.iter().map(|d| d.to_string()).collect();
        out.push_str(&format!("wires {}\n", dims.join(" ")));
        let sys: Vec<String> = self.system.iter().map(|w| format!("w{w}")).collect();
        out.push_str(&format!("system {}\n", sys.join(" ")));
        out.push_str(&format!("slots {}\n", self.slots));
        block(&self.ops, 0, &mut out);
        out
    }

    /// Parses the output of [`AdaptiveCircuit::to_text`].
    pub fn from_text(text: &str) -> Result<Self, CircuitError> {
        let err = |line: usize, message: String| CircuitError::Parse { line, message };
        let wire = |line: usize, s: &str| -> Result<usize, CircuitError> {
            s.strip_prefix('w').and_then(|n| n.parse().ok()).ok_or_else(|| err(line, format!("bad wire {s}")))
        };
        let slot = |line: usize, s: &str| -> Result<usize, CircuitError> {
            s.strip_prefix('m').and_then(|n| n.parse().ok()).ok_or_else(|| err(line, format!("bad slot {s}")))
        };
        let mut name = None;
        let mut dims = None;
        let mut system = None;
        let mut slots = None;
        let mut stack: Vec<(Vec<(usize, u8)>, Vec<Op>)> = vec![(Vec::new(), Vec::new())];
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let t = raw.trim();
            if t.is_empty() || t.starts_with('#') {
                continue;
            }
            let mut parts = t.split_whitespace();
            let head = parts.next().unwrap_or_default();
            let rest: Vec<&str> = parts.collect();
            match head {
                "circuit" => name = Some(t["circuit".len()..].trim().to_string()),
                "wires" => {
                    let d: Result<Vec<usize>, _> = rest.iter().map(|s| s.parse::<usize>()).collect();
                    dims = Some(d.map_err(|e| err(line, e.to_string()))?);
                }
                "system" => system = Some(rest.iter().map(|s| wire(line, s)).collect::<Result<Vec<_>, _>>()?),
                "slots" => {
                    slots = Some(
                        rest.first().and_then(|s| s.parse().ok()).ok_or_else(|| err(line, "bad slot count".into()))?,
                    )
                }
                "measure" => {
                    if rest.len() != 4 || rest[2] != "->" {
                        return Err(err(line, "expected: measure <basis> w<i> -> m<j>".into()));
                    }
                    let basis =
                        MeasureBasis::parse(rest[0]).ok_or_else(|| err(line, format!("unknown basis {}", rest[0])))?;
                    let op = Op::Measure { wire: wire(line, rest[1])?, basis, slot: slot(line, rest[3])? };
                    stack.last_mut().expect("root block").1.push(op);
                }
                "alloc" => {
                    if rest.len() != 2 {
                        return Err(err(line, "expected: alloc w<i> <init>".into()));
                    }
                    let init =
                        AncillaInit::parse(rest[1]).ok_or_else(|| err(line, format!("unknown init {}", rest[1])))?;
                    stack.last_mut().expect("root block").1.push(Op::Alloc { wire: wire(line, rest[0])?, init });
                }
                "free" => {
                    let w = wire(line, rest.first().copied().unwrap_or_default())?;
                    stack.last_mut().expect("root block").1.push(Op::Free { wire: w });
                }
                "if" => {
                    if rest.last() != Some(&"{") {
                        return Err(err(line, "if line must end with {".into()));
                    }
                    let mut cond = Vec::new();
                    for c in &rest[..rest.len() - 1] {
                        let (s, v) = c.split_once('=').ok_or_else(|| err(line, format!("bad condition {c}")))?;
                        let v = v.parse::<u8>().map_err(|e| err(line, e.to_string()))?;
                        cond.push((slot(line, s)?, v));
                    }
                    stack.push((cond, Vec::new()));
                }
                "}" => {
                    if stack.len() < 2 {
                        return Err(err(line, "unbalanced }".into()));
                    }
                    let (condition, body) = stack.pop().expect("checked length");
                    stack.last_mut().expect("root block").1.push(Op::If { condition, body });
                }
                _ => {
                    let kind = GateKind::from_str(head).map_err(|m| err(line, m))?;
                    let wires = rest.iter().map(|s| wire(line, s)).collect::<Result<Vec<_>, _>>()?;
                    stack.last_mut().expect("root block").1.push(Op::Gate { kind, wires });
                }
            }
        }
        if stack.len() != 1 {
            return Err(err(text.lines().count(), "unterminated if block".into()));
        }
        let ops = stack.pop().expect("root block").1;
        let missing = |what: &str| err(0, format!("missing {what} header"));
        AdaptiveCircuit::new(
            name.ok_or_else(|| missing("circuit"))?,
            dims.ok_or_else(|| missing("wires"))?,
            system.ok_or_else(|| missing("system"))?,
            slots.ok_or_else(|| missing("slots"))?,
            ops,
        )
    }
}

impl fmt::Display for AdaptiveCircuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}
