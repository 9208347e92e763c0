//! Exact comparison of circuits with the lattice operators they implement.
//!
//! A circuit defines an instrument: one Kraus operator per full transcript
//! (visible outcomes plus traced-out values), extracted by expanding every
//! branch on every computational basis input. Two Kraus families define the
//! same completely positive map iff their Choi matrices `Σ vec(K) vec(K)†`
//! agree. Two distances are provided: the largest entry of `|J_a − J_b|`
//! (dense, two-edge systems) and the Frobenius norm `‖J_a − J_b‖_F`, which
//! bounds it and is computed from the inner products `tr(K_i† K_j)` so the
//! `d² × d²` Choi matrices are never formed.

use std::collections::{BTreeMap, BTreeSet};

use nalgebra::DMatrix;

use super::kmeasure::{edge_digit, group_from_digit};
use super::register::{enumerate_branches, QuditRegister, Transcript};
use super::{AdaptiveCircuit, CircuitError, GateKind, LtOperator, Op};
use crate::algebra::{omega_pow, Anyon, GroupElement, C64};
use crate::lattice::state::{get, l_action, pack, set, t_passes};
use crate::lattice::{anyon_ribbon_terms, Lattice, Ribbon, RibbonDirection, Site};

/// Largest system dimension accepted by [`check_equivalence`] (two edges).
pub const MAX_CHANNEL_DIM: usize = 36;
/// Largest system dimension accepted by [`circuit_kraus`] (four edges).
pub const MAX_INSTRUMENT_DIM: usize = 1296;

const ENTRY_TOL: f64 = 1e-12;

/// Sparse square matrix: sorted `(row · d + column, value)` entries.
type Sparse = Vec<(usize, C64)>;

/// A completely positive map given by Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorChannel {
    dim: usize,
    kraus: Vec<Sparse>,
}

impl OperatorChannel {
    /// The zero map on a `dim`-dimensional space.
    pub fn empty(dim: usize) -> Self {
        OperatorChannel { dim, kraus: Vec::new() }
    }

    /// Channel with the given Kraus matrices (all `d × d`).
    pub fn from_dense(dim: usize, kraus: &[DMatrix<C64>]) -> Result<Self, CircuitError> {
        let mut out = Vec::with_capacity(kraus.len());
        for k in kraus {
            if k.nrows() != dim || k.ncols() != dim {
                return Err(CircuitError::LengthMismatch { expected: dim * dim, found: k.nrows() * k.ncols() });
            }
            let mut s = Sparse::new();
            for r in 0..dim {
                for c in 0..dim {
                    if k[(r, c)].norm() > ENTRY_TOL {
                        s.push((r * dim + c, k[(r, c)]));
                    }
                }
            }
            out.push(s);
        }
        Ok(OperatorChannel { dim, kraus: out })
    }

    pub(crate) fn from_entries(dim: usize, mut kraus: Vec<Sparse>) -> Self {
        for k in &mut kraus {
            k.sort_by_key(|e| e.0);
        }
        OperatorChannel { dim, kraus }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Kraus operators.
    pub fn len(&self) -> usize {
        self.kraus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.kraus.is_empty()
    }

    /// Dense Kraus matrices.
    pub fn dense(&self) -> Vec<DMatrix<C64>> {
        self.kraus
            .iter()
            .map(|k| {
                let mut m = DMatrix::zeros(self.dim, self.dim);
                for &(i, z) in k {
                    m[(i / self.dim, i % self.dim)] = z;
                }
                m
            })
            .collect()
    }

    /// Multiplies every Kraus operator by `s`.
    pub fn scaled(mut self, s: f64) -> Self {
        for k in &mut self.kraus {
            k.iter_mut().for_each(|e| e.1 *= s);
        }
        self
    }

    /// Union of the Kraus families (sum of the maps).
    pub fn plus(mut self, other: &OperatorChannel) -> Result<Self, CircuitError> {
        if other.dim != self.dim {
            return Err(CircuitError::LengthMismatch { expected: self.dim, found: other.dim });
        }
        self.kraus.extend(other.kraus.iter().cloned());
        Ok(self)
    }

    /// Largest entry of `|Σ K†K − λ·1|` together with `λ = tr(Σ K†K) / d`.
    pub fn trace_defect(&self) -> (f64, f64) {
        let d = self.dim;
        let mut m = vec![C64::default(); d * d];
        for k in &self.kraus {
            // Group entries by row: (K†K)_{c1 c2} = Σ_r conj(K_{r c1}) K_{r c2}.
            let mut rows: BTreeMap<usize, Vec<(usize, C64)>> = BTreeMap::new();
            for &(i, z) in k {
                rows.entry(i / d).or_default().push((i % d, z));
            }
            for row in rows.values() {
                for &(c1, z1) in row {
                    for &(c2, z2) in row {
                        m[c1 * d + c2] += z1.conj() * z2;
                    }
                }
            }
        }
        let lambda = (0..d).map(|i| m[i * d + i].re).sum::<f64>() / d as f64;
        let defect = (0..d * d)
            .map(|i| {
                let id = if i / d == i % d { lambda } else { 0.0 };
                (m[i] - id).norm()
            })
            .fold(0.0, f64::max);
        (defect, lambda)
    }
}

/// `‖J_a − J_b‖_F` for the Choi matrices `J = Σ vec(K) vec(K)†` of two
/// maps; an upper bound on the largest entry difference.
///
/// With `V = [vec(A_1) … vec(B_1) …]` (restricted to the rows where some
/// operator is non-zero) and `S = diag(1, …, −1, …)` the difference is
/// `V S V†`. A Householder factorization `V = QR` gives
/// `‖V S V†‖_F = ‖R S R†‖_F`, which is evaluated entrywise so equal maps
/// cancel to rounding error.
pub fn choi_distance(a: &OperatorChannel, b: &OperatorChannel) -> Result<f64, CircuitError> {
    if a.dim != b.dim {
        return Err(CircuitError::LengthMismatch { expected: a.dim, found: b.dim });
    }
    let family: Vec<(&Sparse, f64)> =
        a.kraus.iter().map(|k| (k, 1.0)).chain(b.kraus.iter().map(|k| (k, -1.0))).collect();
    let rows: BTreeSet<usize> = family.iter().flat_map(|(k, _)| k.iter().map(|e| e.0)).collect();
    if rows.is_empty() {
        return Ok(0.0);
    }
    let position: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut v = DMatrix::<C64>::zeros(rows.len(), family.len());
    for (j, (k, _)) in family.iter().enumerate() {
        for &(i, z) in k.iter() {
            v[(position[&i], j)] = z;
        }
    }
    let r = v.qr().r();
    let mut rs = r.clone();
    for (j, (_, sign)) in family.iter().enumerate() {
        rs.column_mut(j).scale_mut(*sign);
    }
    Ok((rs * r.adjoint()).norm())
}

/// Largest entry of `|J_a − J_b|`, evaluated densely (system dimension at
/// most [`MAX_CHANNEL_DIM`]).
pub fn choi_max_entry_distance(a: &OperatorChannel, b: &OperatorChannel) -> Result<f64, CircuitError> {
    if a.dim != b.dim {
        return Err(CircuitError::LengthMismatch { expected: a.dim, found: b.dim });
    }
    if a.dim > MAX_CHANNEL_DIM {
        return Err(CircuitError::ResourceLimit(format!(
            "dense Choi comparison needs dimension ≤ {MAX_CHANNEL_DIM}, got {}",
            a.dim
        )));
    }
    let n = a.dim * a.dim;
    let mut j = vec![C64::default(); n * n];
    for (family, sign) in [(&a.kraus, 1.0), (&b.kraus, -1.0)] {
        for k in family.iter() {
            for &(x, zx) in k {
                for &(y, zy) in k {
                    j[x * n + y] += zx * zy.conj() * sign;
                }
            }
        }
    }
    Ok(j.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Kraus operators of a circuit, one per full transcript.
#[derive(Clone, Debug)]
pub struct Instrument {
    dim: usize,
    operators: Vec<(Transcript, Sparse)>,
}

impl Instrument {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.operators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.operators.is_empty()
    }

    pub fn transcripts(&self) -> impl Iterator<Item = &Transcript> {
        self.operators.iter().map(|(t, _)| t)
    }

    /// The whole instrument as one channel (outcomes forgotten).
    pub fn channel(&self) -> OperatorChannel {
        self.channel_where(|_| true)
    }

    /// Sum of the branches whose transcript satisfies `keep`.
    pub fn channel_where(&self, keep: impl Fn(&Transcript) -> bool) -> OperatorChannel {
        OperatorChannel {
            dim: self.dim,
            kraus: self.operators.iter().filter(|(t, _)| keep(t)).map(|(_, k)| k.clone()).collect(),
        }
    }
}

/// Extracts the Kraus operators of a circuit by expanding every branch on
/// every computational basis input of the system wires.
pub fn circuit_kraus(circuit: &AdaptiveCircuit) -> Result<Instrument, CircuitError> {
    let d = circuit.system_dim();
    if d > MAX_INSTRUMENT_DIM {
        return Err(CircuitError::ResourceLimit(format!(
            "instrument extraction needs system dimension ≤ {MAX_INSTRUMENT_DIM}, got {d}"
        )));
    }
    let wires = circuit.system_wires();
    let mut ops: BTreeMap<Transcript, Sparse> = BTreeMap::new();
    for c in 0..d {
        let mut amps = vec![C64::default(); d];
        amps[c] = C64::new(1.0, 0.0);
        let reg = QuditRegister::from_amplitudes(&wires, amps)?;
        for br in enumerate_branches(circuit, reg)? {
            if br.register.wires() != wires.as_slice() {
                let w = br.register.wires().iter().map(|w| w.0).find(|w| !circuit.system().contains(w));
                return Err(CircuitError::UnfreedAncilla(w.unwrap_or(0)));
            }
            let entry = ops.entry(br.transcript).or_default();
            for (r, &a) in br.register.amplitudes().iter().enumerate() {
                if a.norm() > ENTRY_TOL {
                    entry.push((r * d + c, a));
                }
            }
        }
    }
    let operators = ops
        .into_iter()
        .map(|(t, mut k)| {
            k.sort_by_key(|e| e.0);
            (t, k)
        })
        .collect();
    Ok(Instrument { dim: d, operators })
}

/// Largest Choi-matrix entry difference between a circuit (outcomes
/// forgotten, ancillas traced out) and a target channel. Limited to
/// two-edge systems.
pub fn check_equivalence(circuit: &AdaptiveCircuit, target: &OperatorChannel) -> Result<f64, CircuitError> {
    let d = circuit.system_dim();
    if d > MAX_CHANNEL_DIM {
        return Err(CircuitError::ResourceLimit(format!(
            "channel comparison needs system dimension ≤ {MAX_CHANNEL_DIM}, got {d}"
        )));
    }
    choi_max_entry_distance(&circuit_kraus(circuit)?.channel(), target)
}

/// Compares a circuit outcome by outcome. Transcripts are grouped by
/// `classify`; every group is compared with its target (the zero map when
/// no target is given), and every target without branches with the zero map.
/// Distances are [`choi_distance`] values.
pub fn check_instrument<K: Ord + Clone>(
    circuit: &AdaptiveCircuit,
    classify: impl Fn(&Transcript) -> K,
    targets: &BTreeMap<K, OperatorChannel>,
) -> Result<BTreeMap<K, f64>, CircuitError> {
    let inst = circuit_kraus(circuit)?;
    let d = inst.dim();
    let mut groups: BTreeMap<K, OperatorChannel> = BTreeMap::new();
    for (t, k) in &inst.operators {
        groups.entry(classify(t)).or_insert_with(|| OperatorChannel::empty(d)).kraus.push(k.clone());
    }
    let keys: BTreeSet<K> = groups.keys().chain(targets.keys()).cloned().collect();
    let empty = OperatorChannel::empty(d);
    keys.into_iter()
        .map(|key| {
            let a = groups.get(&key).unwrap_or(&empty);
            let b = targets.get(&key).unwrap_or(&empty);
            Ok((key.clone(), choi_distance(a, b)?))
        })
        .collect()
}

/// `6 × 6` matrix of `L^g_±` or `T^h_±` in the edge register basis.
pub fn lt_operator_matrix(which: LtOperator) -> DMatrix<C64> {
    let mut m = DMatrix::zeros(6, 6);
    for g in GroupElement::all() {
        let i = g.index() as u8;
        let col = edge_digit(g);
        match which {
            LtOperator::L { g: a, plus } => {
                let out = GroupElement::from_index(l_action(i, plus, a.index() as u8) as usize);
                m[(edge_digit(out), col)] = C64::new(1.0, 0.0);
            }
            LtOperator::T { h, plus } => {
                if t_passes(i, plus, h.index() as u8) {
                    m[(col, col)] = C64::new(1.0, 0.0);
                }
            }
        }
    }
    m
}

/// Maximally mixed `F^{R,C}` on a shortest ribbon as a channel on its two
/// edges (first ribbon edge on wires 0, 1). The Kraus operators are the
/// `F^{R,C;u,v}` for all local labels, rescaled so the map is trace
/// preserving; an error is returned if `Σ F†F` is not proportional to the
/// identity.
pub fn ribbon_operator_channel(anyon: Anyon, dir: RibbonDirection) -> Result<OperatorChannel, CircuitError> {
    let (lattice, site) = match dir {
        RibbonDirection::Horizontal => (Lattice::new(2, 1)?, Site::new(0, 0)),
        RibbonDirection::Vertical => (Lattice::new(1, 2)?, Site::new(0, 1)),
    };
    let ribbon = Ribbon::shortest(&lattice, site, dir)?;
    let edges = ribbon.edges();
    if edges.len() != 2 {
        return Err(CircuitError::ResourceLimit(format!("expected a two-edge ribbon, got {}", edges.len())));
    }
    let identity = vec![GroupElement::E; lattice.edge_count()];
    let base = pack(&identity);
    let dim = anyon.dim();
    let mut kraus = Vec::with_capacity(dim * dim);
    for u in 0..dim {
        for v in 0..dim {
            let terms = anyon_ribbon_terms(anyon, u, v)?;
            let mut m = DMatrix::<C64>::zeros(36, 36);
            for col in 0..36 {
                let (a, b) = (group_from_digit(col / 6), group_from_digit(col % 6));
                let key = set(set(base, edges[0], a.index() as u8), edges[1], b.index() as u8);
                for &(h, g, z) in &terms {
                    if let Some(k2) = ribbon.act_packed(key, h.index() as u8, g.index() as u8) {
                        let a2 = GroupElement::from_index(get(k2, edges[0]) as usize);
                        let b2 = GroupElement::from_index(get(k2, edges[1]) as usize);
                        m[(edge_digit(a2) * 6 + edge_digit(b2), col)] += z;
                    }
                }
            }
            kraus.push(m);
        }
    }
    let channel = OperatorChannel::from_dense(36, &kraus)?;
    let (defect, lambda) = channel.trace_defect();
    if lambda < 1e-12 || defect > 1e-9 * lambda.max(1.0) {
        return Err(CircuitError::NotTracePreserving(format!(
            "Σ F†F for {anyon} deviates from {lambda}·1 by {defect}"
        )));
    }
    Ok(channel.scaled(1.0 / lambda.sqrt()))
}

/// Single-gate edits used to confirm that the equivalence checks are sharp.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mutation {
    /// Replace the `i`-th gate (program order, all branches) by its inverse.
    Adjoint(usize),
    /// Delete the `i`-th gate.
    Remove(usize),
}

/// Applies a mutation; the index counts gates as listed by
/// [`AdaptiveCircuit::gates`].
pub fn mutate(circuit: &AdaptiveCircuit, mutation: Mutation) -> Result<AdaptiveCircuit, CircuitError> {
    fn walk(ops: &[Op], target: usize, counter: &mut usize, mutation: Mutation) -> Vec<Op> {
        let mut out = Vec::with_capacity(ops.len());
        for op in ops {
            match op {
                Op::Gate { kind, wires } => {
                    let here = *counter == target;
                    *counter += 1;
                    match (here, mutation) {
                        (true, Mutation::Remove(_)) => {}
                        (true, Mutation::Adjoint(_)) => out.push(Op::Gate { kind: kind.inverse(), wires: wires.clone() }),
                        _ => out.push(op.clone()),
                    }
                }
                Op::If { condition, body } => {
                    out.push(Op::If { condition: condition.clone(), body: walk(body, target, counter, mutation) })
                }
                other => out.push(other.clone()),
            }
        }
        out
    }
    let target = match mutation {
        Mutation::Adjoint(i) | Mutation::Remove(i) => i,
    };
    let total = circuit.gates().len();
    if target >= total {
        return Err(CircuitError::ResourceLimit(format!("gate index {target} out of range ({total} gates)")));
    }
    let mut counter = 0;
    let ops = walk(circuit.ops(), target, &mut counter, mutation);
    AdaptiveCircuit::new(
        format!("{}~{mutation:?}", circuit.name()),
        circuit.dims().to_vec(),
        circuit.system().to_vec(),
        circuit.slots(),
        ops,
    )
}

fn gate_matrix(kind: GateKind) -> DMatrix<C64> {
    let table = kind.monomial();
    let mut m = DMatrix::zeros(table.len(), table.len());
    for (i, &(o, z)) in table.iter().enumerate() {
        m[(o, i)] = z;
    }
    m
}

/// Generalized Pauli operators `X^a Z^b` on one wire.
fn wire_paulis(d: usize) -> Vec<DMatrix<C64>> {
    let mut out = Vec::new();
    for a in 0..d {
        for b in 0..d {
            let mut m = DMatrix::zeros(d, d);
            for k in 0..d {
                let phase = if d == 2 {
                    C64::new(if (b * k) % 2 == 1 { -1.0 } else { 1.0 }, 0.0)
                } else {
                    omega_pow((b * k) as i64)
                };
                m[((k + a) % d, k)] = phase;
            }
            out.push(m);
        }
    }
    out
}

fn paulis(dims: &[usize]) -> Vec<DMatrix<C64>> {
    dims.iter().fold(vec![DMatrix::from_element(1, 1, C64::new(1.0, 0.0))], |acc, &d| {
        acc.iter().flat_map(|p| wire_paulis(d).into_iter().map(move |q| p.kronecker(&q))).collect()
    })
}

/// Whether a gate kind maps every generalized Pauli operator to a Pauli
/// operator (up to phase) under conjugation.
pub fn is_clifford(kind: GateKind) -> bool {
    let u = gate_matrix(kind);
    let dim = u.nrows() as f64;
    let group = paulis(kind.dims());
    group.iter().all(|p| {
        let conj = &u * p * u.adjoint();
        group.iter().any(|q| ((q.adjoint() * &conj).trace() / dim).norm() > 1.0 - 1e-9)
    })
}

/// Distinct non-Clifford gate kinds used by a circuit.
pub fn non_clifford_kinds(circuit: &AdaptiveCircuit) -> Vec<GateKind> {
    let kinds: BTreeSet<GateKind> = circuit.gates().into_iter().map(|(k, _)| k).collect();
    kinds.into_iter().filter(|&k| !is_clifford(k)).collect()
}
