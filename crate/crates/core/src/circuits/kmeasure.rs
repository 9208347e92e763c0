//! Circuit for the single-site anyon-type measurement `K^{R,C}_s`.
//!
//! The circuit acts on the support of the site: the four plaquette edges and
//! the edges at the site vertex. It runs four steps:
//!
//! 1. `Z_p`: the parity of the plaquette qubits gives the `σ` part `l_h` of
//!    the flux `h` (a qubit ancilla collects four CNOTs);
//! 2. `Ẑ^±_p`, conditioned on `l_h`: a qutrit ancilla accumulates the `μ`
//!    exponent `k_L + (−1)^{l_L} k_B − (−1)^{l_h + l_T} k_R − (−1)^{l_h} k_T`
//!    of `h = g_L g_B ḡ_R ḡ_T`;
//! 3. a vertex measurement chosen by `h`, using an ancilla that controls
//!    `A^g_v`:
//!    * `h = e`: `{P_{μ=1}, 1 − P_{μ=1}}` with a `|0̂₊⟩` ancilla, controlled
//!      `(A^μ)^a` and the two-outcome `{|0̂₊⟩, ⊥}` measurement, followed by
//!      the inverse controlled operation so the `⊥` branch stays coherent;
//!      on the `P_{μ=1}` branch a `|+⟩` ancilla and controlled `A^σ` split
//!      `A` from `B`;
//!    * `h = μ^k σ`: the eigenvalue `±1` of `A^h`;
//!    * `h = μ^{±1}`: the eigenvalue `ω^j` of `A^μ` (qutrit `X̂` measurement);
//! 4. classical post-processing: the label is the anyon whose projector,
//!    restricted to flux `h`, equals 1 on the measured eigenspace.
//!
//! The flux is read out exactly, so the instrument is the refinement
//! `{K^{R,C}_s B^h_p}_{h ∈ C}` of `{K^{R,C}_s}`: outcome statistics agree,
//! and states carrying a superposition of fluxes within one class are
//! dephased between them.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use rand::distributions::{Distribution, WeightedIndex};
use rand::Rng;

use super::build::CircuitBuilder;
use super::equivalence::{OperatorChannel, MAX_INSTRUMENT_DIM};
use super::register::{enumerate_branches, simulate, QuditRegister, Transcript};
use super::{AdaptiveCircuit, AncillaInit, CircuitError, GateKind, MeasureBasis};
use crate::algebra::{omega_pow, Anyon, ClassId, GroupElement, ANYONS, C64};
use crate::lattice::state::{get, pack, set, vertex_act};
use crate::lattice::{k_projector_coefficients, Lattice, LatticeState, Site};

/// Register digit `2k + l` of the edge value `μ^k σ^l` (qutrit major).
pub fn edge_digit(g: GroupElement) -> usize {
    2 * g.k() as usize + g.l() as usize
}

/// Inverse of [`edge_digit`].
pub fn group_from_digit(d: usize) -> GroupElement {
    GroupElement::new((d / 2) as i64, (d % 2) as i64)
}

/// Edges touched by `K^{R,C}_s`: plaquette edges and vertex edges, sorted.
pub fn k_support(lattice: &Lattice, site: Site) -> Result<Vec<usize>, CircuitError> {
    lattice.check_site(site)?;
    let p = lattice.plaquette_edges(site);
    let mut edges: Vec<usize> = [p.left, p.bottom, p.right, p.top]
        .into_iter()
        .chain(lattice.incident(site.vertex()).iter().map(|&(e, _)| e))
        .collect();
    edges.sort_unstable();
    edges.dedup();
    Ok(edges)
}

/// Classical slots of a [`KCircuit`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct KSlots {
    /// `σ` part of the flux.
    pub lp: usize,
    /// `μ` exponent of the flux.
    pub kp: usize,
    /// First vertex measurement.
    pub a1: usize,
    /// Second vertex measurement (flux `e`, trivial-`μ` branch only).
    pub a2: usize,
}

/// The `K^{R,C}_s` measurement circuit of one site.
#[derive(Clone, Debug)]
pub struct KCircuit {
    pub circuit: AdaptiveCircuit,
    pub site: Site,
    /// Lattice edges of the support; local edge `i` is on wires `2i`, `2i+1`.
    pub support: Vec<usize>,
    pub slots: KSlots,
}

/// Builds the four-step measurement circuit of `K^{R,C}_s`.
pub fn build_k_circuit(lattice: &Lattice, site: Site) -> Result<KCircuit, CircuitError> {
    let support = k_support(lattice, site)?;
    let local = |e: usize| support.iter().position(|&x| x == e).expect("edge in support");
    let (q, b) = (|e: usize| 2 * local(e), |e: usize| 2 * local(e) + 1);
    let p = lattice.plaquette_edges(site);
    let incident: Vec<(usize, usize, bool)> =
        lattice.incident(site.vertex()).iter().map(|&(e, out)| (q(e), b(e), out)).collect();
    let mut c = CircuitBuilder::for_edges(format!("K_({},{})", site.x, site.y), support.len());

    // Step 1: Z_p.
    let z = c.ancilla(2, AncillaInit::Zero);
    for e in [p.left, p.bottom, p.right, p.top] {
        c.gate(GateKind::Cnot, &[b(e), z]);
    }
    let lp = c.measure(z, MeasureBasis::Z);
    c.free(z);

    // Step 2: Ẑ^±_p conditioned on l_h.
    let kp = c.slot();
    for lh in 0..2u8 {
        c.begin_if(&[(lp, lh)]);
        let a = c.ancilla(3, AncillaInit::Zero);
        let sign = if lh == 0 { -1 } else { 1 };
        c.cxhat_pow(q(p.left), a, 1);
        c.gate(GateKind::CCHat, &[b(p.left), a]);
        c.cxhat_pow(q(p.bottom), a, 1);
        c.gate(GateKind::CCHat, &[b(p.left), a]);
        c.gate(GateKind::CCHat, &[b(p.top), a]);
        c.cxhat_pow(q(p.right), a, sign);
        c.gate(GateKind::CCHat, &[b(p.top), a]);
        c.cxhat_pow(q(p.top), a, sign);
        c.measure_into(a, MeasureBasis::ZHat, kp);
        c.free(a);
        c.end_if();
    }

    // Step 3: vertex measurement chosen by the flux.
    let (a1, a2) = (c.slot(), c.slot());
    c.begin_if(&[(lp, 0), (kp, 0)]);
    {
        let t = c.ancilla(3, AncillaInit::Plus);
        for &(eq, eb, out) in &incident {
            c.qutrit_controlled_l_mu(t, eq, eb, out, 1);
        }
        c.measure_into(t, MeasureBasis::XHatZeroVsRest, a1);
        for &(eq, eb, out) in &incident {
            c.qutrit_controlled_l_mu(t, eq, eb, out, -1);
        }
        c.free(t);
        c.begin_if(&[(a1, 0)]);
        let s = c.ancilla(2, AncillaInit::Plus);
        for &(eq, eb, out) in &incident {
            c.qubit_controlled_l(s, eq, eb, out, GroupElement::SIGMA);
        }
        c.measure_into(s, MeasureBasis::X, a2);
        c.free(s);
        c.end_if();
    }
    c.end_if();
    for k in 1..3u8 {
        c.begin_if(&[(lp, 0), (kp, k)]);
        let t = c.ancilla(3, AncillaInit::Plus);
        for &(eq, eb, out) in &incident {
            c.qutrit_controlled_l_mu(t, eq, eb, out, 1);
        }
        c.measure_into(t, MeasureBasis::XHat, a1);
        c.free(t);
        c.end_if();
    }
    for k in 0..3u8 {
        c.begin_if(&[(lp, 1), (kp, k)]);
        let s = c.ancilla(2, AncillaInit::Plus);
        let h = GroupElement::new(k as i64, 1);
        for &(eq, eb, out) in &incident {
            c.qubit_controlled_l(s, eq, eb, out, h);
        }
        c.measure_into(s, MeasureBasis::X, a1);
        c.free(s);
        c.end_if();
    }
    Ok(KCircuit { circuit: c.finish()?, site, support, slots: KSlots { lp, kp, a1, a2 } })
}

/// The anyon of class `[h]` whose projector, restricted to flux `h`, acts
/// as 1 when `A^m_v` has eigenvalue `eig(m)` for every `m` in the
/// centralizer of `h`.
fn anyon_for_eigenvalues(h: GroupElement, eig: impl Fn(GroupElement) -> C64) -> Option<Anyon> {
    ANYONS.into_iter().filter(|a| a.class() == h.class()).find(|&a| {
        let value: C64 =
            k_projector_coefficients(a).into_iter().filter(|&(c, _, _)| c == h).map(|(_, m, z)| z * eig(m)).sum();
        (value - C64::new(1.0, 0.0)).norm() < 1e-9
    })
}

impl KCircuit {
    /// Anyon label and flux read from a transcript.
    pub fn decode(&self, t: &Transcript) -> Option<(Anyon, GroupElement)> {
        let s = self.slots;
        let h = GroupElement::new(t.get(s.kp)? as i64, t.get(s.lp)? as i64);
        let a1 = t.get(s.a1)?;
        let anyon = match h.class() {
            ClassId::C1 => {
                if a1 == 1 {
                    Anyon::C
                } else if t.get(s.a2)? == 0 {
                    Anyon::A
                } else {
                    Anyon::B
                }
            }
            ClassId::C2 => {
                let lambda = if a1 == 0 { 1.0 } else { -1.0 };
                anyon_for_eigenvalues(h, |m| C64::new(if m.is_identity() { 1.0 } else { lambda }, 0.0))?
            }
            ClassId::C3 => anyon_for_eigenvalues(h, |m| omega_pow(a1 as i64 * m.k() as i64))?,
        };
        Some((anyon, h))
    }

    /// Runs one trajectory on a support state and returns the label.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        state: QuditRegister,
        rng: &mut R,
    ) -> Result<(Anyon, GroupElement), CircuitError> {
        let (_, t) = simulate(&self.circuit, state, rng)?;
        self.decode(&t).ok_or(CircuitError::UnknownSlot(self.slots.a1))
    }

    fn support_wires(&self) -> Vec<(usize, usize)> {
        self.circuit.system_wires()
    }
}

/// Schmidt decomposition of a lattice state across support × rest: the
/// support is in state `components[i].1` with probability
/// `components[i].0`.
#[derive(Clone, Debug)]
pub struct SiteEnsemble {
    pub support: Vec<usize>,
    pub components: Vec<(f64, QuditRegister)>,
}

/// Reduced state of the `K^{R,C}_s` support as an ensemble of pure states.
pub fn site_ensemble(state: &LatticeState, site: Site) -> Result<SiteEnsemble, CircuitError> {
    let plain = state.to_plain();
    let lattice = plain.lattice().clone();
    let support = k_support(&lattice, site)?;
    let d = 6usize.pow(support.len() as u32);
    if d > MAX_INSTRUMENT_DIM {
        return Err(CircuitError::ResourceLimit(format!("support dimension {d} exceeds {MAX_INSTRUMENT_DIM}")));
    }
    let mut columns: BTreeMap<u64, usize> = BTreeMap::new();
    let mut entries = Vec::new();
    for (config, amp) in plain.stored_terms() {
        let mut key = pack(&config);
        let mut row = 0;
        for &e in &support {
            row = row * 6 + edge_digit(GroupElement::from_index(get(key, e) as usize));
            key = set(key, e, 0);
        }
        let n = columns.len();
        let col = *columns.entry(key).or_insert(n);
        entries.push((row, col, amp));
    }
    if entries.is_empty() {
        return Err(CircuitError::ZeroNorm);
    }
    let mut psi = DMatrix::<C64>::zeros(d, columns.len());
    for (r, c, z) in entries {
        psi[(r, c)] += z;
    }
    // Schmidt vectors from the Hermitian eigenproblem of the smaller Gram
    // matrix: ΨΨ† directly when the support is the smaller side, otherwise
    // Ψ†Ψ = V Λ V† with support vectors Ψ v_i / √λ_i.
    let vectors: Vec<(f64, Vec<C64>)> = if d <= psi.ncols() {
        let eig = (&psi * psi.adjoint()).symmetric_eigen();
        (0..d).map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())).collect()
    } else {
        let eig = (psi.adjoint() * &psi).symmetric_eigen();
        (0..psi.ncols())
            .filter(|&i| eig.eigenvalues[i] > 0.0)
            .map(|i| {
                let l = eig.eigenvalues[i];
                let u = &psi * eig.eigenvectors.column(i) / C64::new(l.sqrt(), 0.0);
                (l, u.iter().copied().collect())
            })
            .collect()
    };
    let total: f64 = vectors.iter().map(|v| v.0.max(0.0)).sum();
    if total < 1e-300 {
        return Err(CircuitError::ZeroNorm);
    }
    let wires: Vec<(usize, usize)> = (0..2 * support.len()).map(|w| (w, if w % 2 == 0 { 3 } else { 2 })).collect();
    let mut components = Vec::new();
    for (l, amps) in vectors {
        let p = l / total;
        if p > 1e-14 {
            let mut reg = QuditRegister::from_amplitudes(&wires, amps)?;
            reg.normalize()?;
            components.push((p, reg));
        }
    }
    let kept: f64 = components.iter().map(|c| c.0).sum();
    components.iter_mut().for_each(|c| c.0 /= kept);
    Ok(SiteEnsemble { support, components })
}

/// Exact outcome distribution of the circuit on an ensemble.
pub fn k_circuit_outcomes(kc: &KCircuit, ensemble: &SiteEnsemble) -> Result<BTreeMap<Anyon, f64>, CircuitError> {
    if ensemble.support != kc.support {
        return Err(CircuitError::LengthMismatch { expected: kc.support.len(), found: ensemble.support.len() });
    }
    let mut out = BTreeMap::new();
    for (p, reg) in &ensemble.components {
        if reg.wires() != kc.support_wires().as_slice() {
            return Err(CircuitError::LengthMismatch { expected: kc.support_wires().len(), found: reg.wires().len() });
        }
        for br in enumerate_branches(&kc.circuit, reg.clone())? {
            let (a, _) = kc.decode(&br.transcript).ok_or(CircuitError::UnknownSlot(kc.slots.a1))?;
            *out.entry(a).or_insert(0.0) += p * br.weight();
        }
    }
    out.retain(|_, p| *p > 1e-15);
    Ok(out)
}

/// Operator-level instrument `{K^{R,C}_s B^h_p}` on the support, keyed by
/// `(anyon, flux)`. Only keys with a non-zero operator are present.
pub fn refined_k_instrument(
    lattice: &Lattice,
    site: Site,
) -> Result<BTreeMap<(Anyon, GroupElement), OperatorChannel>, CircuitError> {
    let support = k_support(lattice, site)?;
    let n = support.len();
    let d = 6usize.pow(n as u32);
    if d > MAX_INSTRUMENT_DIM {
        return Err(CircuitError::ResourceLimit(format!("support dimension {d} exceeds {MAX_INSTRUMENT_DIM}")));
    }
    let v = lattice.vertex_index(site.vertex());
    let base = pack(&vec![GroupElement::E; lattice.edge_count()]);
    let to_key = |index: usize| {
        let mut key = base;
        let mut rem = index;
        for &e in support.iter().rev() {
            key = set(key, e, group_from_digit(rem % 6).index() as u8);
            rem /= 6;
        }
        key
    };
    let to_index = |key: u64| support.iter().fold(0, |acc, &e| acc * 6 + edge_digit(GroupElement::from_index(get(key, e) as usize)));
    let mut acc: BTreeMap<(Anyon, GroupElement), BTreeMap<usize, C64>> = BTreeMap::new();
    let coeffs: Vec<(Anyon, Vec<(GroupElement, GroupElement, C64)>)> =
        ANYONS.into_iter().map(|a| (a, k_projector_coefficients(a))).collect();
    for col in 0..d {
        let key = to_key(col);
        let flux = GroupElement::from_index(LatticeState::flux_packed(lattice, key, site) as usize);
        for (a, terms) in &coeffs {
            for &(c, m, z) in terms {
                if c == flux {
                    let row = to_index(vertex_act(lattice, key, v, m.index() as u8));
                    *acc.entry((*a, flux)).or_default().entry(row * d + col).or_default() += z;
                }
            }
        }
    }
    Ok(acc
        .into_iter()
        .filter_map(|(k, entries)| {
            let sparse: Vec<(usize, C64)> = entries.into_iter().filter(|(_, z)| z.norm() > 1e-12).collect();
            (!sparse.is_empty()).then(|| (k, OperatorChannel::from_entries(d, vec![sparse])))
        })
        .collect())
}

/// Outcome counts of the circuit against the lattice-level distribution.
#[derive(Clone, Debug, PartialEq)]
pub struct KSamplingReport {
    pub site: Site,
    pub trials: usize,
    pub counts: BTreeMap<Anyon, usize>,
    pub expected: BTreeMap<Anyon, f64>,
}

impl KSamplingReport {
    /// Largest deviation `|n − N p| / √(N p (1 − p))` over all labels; a
    /// label with `p ∈ {0, 1}` contributes 0 if its count is exact and
    /// infinity otherwise.
    pub fn max_sigma(&self) -> f64 {
        let n = self.trials as f64;
        ANYONS
            .into_iter()
            .map(|a| {
                let p = self.expected.get(&a).copied().unwrap_or(0.0);
                let count = self.counts.get(&a).copied().unwrap_or(0) as f64;
                let var = n * p * (1.0 - p);
                if var < 1e-9 {
                    if (count - n * p).abs() < 0.5 {
                        0.0
                    } else {
                        f64::INFINITY
                    }
                } else {
                    (count - n * p).abs() / var.sqrt()
                }
            })
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, sigmas: f64) -> bool {
        self.max_sigma() <= sigmas
    }
}

/// Samples the circuit `trials` times on the reduced support state of
/// `state` and compares with the lattice-level `K^{R,C}_s` distribution.
pub fn k_sampling_check<R: Rng + ?Sized>(
    state: &LatticeState,
    site: Site,
    trials: usize,
    rng: &mut R,
) -> Result<KSamplingReport, CircuitError> {
    let kc = build_k_circuit(state.lattice(), site)?;
    let ensemble = site_ensemble(state, site)?;
    let expected = state.site_distribution(site)?;
    let weights = WeightedIndex::new(ensemble.components.iter().map(|c| c.0))
        .map_err(|e| CircuitError::ResourceLimit(e.to_string()))?;
    let mut counts = BTreeMap::new();
    for _ in 0..trials {
        let i = weights.sample(rng);
        let (a, _) = kc.sample(ensemble.components[i].1.clone(), rng)?;
        *counts.entry(a).or_insert(0) += 1;
    }
    Ok(KSamplingReport { site, trials, counts, expected })
}
