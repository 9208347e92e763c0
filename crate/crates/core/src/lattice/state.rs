//! Sparse lattice states.
//!
//! Configurations are packed into a `u64` with three bits per edge holding
//! the group index `k + 3l` of `μ^k σ^l`.
//!
//! Two representations are supported:
//!
//! * [`Representation::Plain`]: one entry per basis configuration.
//! * [`Representation::BoundaryGaugeFixed`]: the state is invariant under
//!   `A^g_v` for every vertex `v` that is not the north-west vertex of a site
//!   (the right and bottom boundary). No operation used by the simulator acts
//!   non-trivially at those vertices, so the invariance is preserved. Each
//!   gauge orbit is stored once, by a canonical representative in which the
//!   edges of a spanning forest (rooted at site vertices) carry `e`. Every
//!   configuration of an orbit has the stored amplitude. This shrinks the
//!   3×1 ground state from 6⁷ to 6² entries.
//!
//! Operations that would break the invariance (a bare `L`, `T` or Pauli on an
//! edge at a frozen vertex) first expand the state to the plain form, so the
//! result is always exact.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;

use num_complex::Complex64;

use super::{EdgePauli, Lattice, LatticeError, Site, Vertex, MAX_TERMS, MAX_VERTICES, PRUNE};
use crate::algebra::{omega_pow, GroupElement, C64};

/// Product of two packed group indices.
pub(crate) const fn mul_idx(a: u8, b: u8) -> u8 {
    let (ka, la) = (a % 3, a / 3);
    let (kb, lb) = (b % 3, b / 3);
    let k = if la == 0 { (ka + kb) % 3 } else { (ka + 3 - kb) % 3 };
    k + 3 * ((la + lb) % 2)
}

/// Inverse of a packed group index.
pub(crate) const fn inv_idx(a: u8) -> u8 {
    if a / 3 == 0 {
        (3 - a % 3) % 3
    } else {
        a
    }
}

pub(crate) fn get(key: u64, e: usize) -> u8 {
    ((key >> (3 * e)) & 7) as u8
}

pub(crate) fn set(key: u64, e: usize, value: u8) -> u64 {
    (key & !(7u64 << (3 * e))) | ((value as u64) << (3 * e))
}

/// Packs a configuration.
pub fn pack(config: &[GroupElement]) -> u64 {
    config.iter().enumerate().fold(0, |key, (e, g)| set(key, e, g.index() as u8))
}

/// Unpacks a configuration of `n` edges.
pub fn unpack(key: u64, n: usize) -> Vec<GroupElement> {
    (0..n).map(|e| GroupElement::from_index(get(key, e) as usize)).collect()
}

/// How a [`LatticeState`] stores its amplitudes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Plain,
    BoundaryGaugeFixed,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct GaugeFixing {
    frozen: Vec<bool>,
    /// `(vertex index, parent edge, parent edge ends at the vertex)` in BFS order.
    order: Vec<(usize, usize, bool)>,
}

impl GaugeFixing {
    fn new(lattice: &Lattice) -> Self {
        let frozen: Vec<bool> = lattice.vertices().map(|v| !lattice.is_site_vertex(v)).collect();
        let mut visited: Vec<bool> = frozen.iter().map(|f| !f).collect();
        let mut queue: VecDeque<usize> = (0..frozen.len()).filter(|&i| !frozen[i]).collect();
        let mut order = Vec::new();
        while let Some(u) = queue.pop_front() {
            for &(e, u_is_start) in lattice.incident(lattice.vertex_at(u)) {
                let edge = lattice.edge(e);
                let w = lattice.vertex_index(if u_is_start { edge.end } else { edge.start });
                if !visited[w] {
                    visited[w] = true;
                    order.push((w, e, u_is_start));
                    queue.push_back(w);
                }
            }
        }
        GaugeFixing { frozen, order }
    }

    fn frozen_count(&self) -> usize {
        self.frozen.iter().filter(|&&f| f).count()
    }
}

/// Sparse state of the edge degrees of freedom.
#[derive(Clone, Debug)]
pub struct LatticeState {
    pub(super) lattice: Lattice,
    gauge: Option<GaugeFixing>,
    pub(super) terms: BTreeMap<u64, C64>,
}

impl LatticeState {
    fn empty(lattice: &Lattice, repr: Representation) -> Self {
        let gauge = match repr {
            Representation::Plain => None,
            Representation::BoundaryGaugeFixed => Some(GaugeFixing::new(lattice)),
        };
        LatticeState { lattice: lattice.clone(), gauge, terms: BTreeMap::new() }
    }

    /// The basis state `|g_0 g_1 …⟩` (plain representation).
    pub fn basis(lattice: &Lattice, config: &[GroupElement]) -> Result<Self, LatticeError> {
        Self::from_terms(lattice, [(config.to_vec(), C64::new(1.0, 0.0))])
    }

    /// A plain state from explicit configurations; repeated configurations add.
    pub fn from_terms(
        lattice: &Lattice,
        terms: impl IntoIterator<Item = (Vec<GroupElement>, C64)>,
    ) -> Result<Self, LatticeError> {
        let mut s = Self::empty(lattice, Representation::Plain);
        for (config, amp) in terms {
            if config.len() != lattice.edge_count() {
                return Err(LatticeError::ConfigLength { got: config.len(), expected: lattice.edge_count() });
            }
            *s.terms.entry(pack(&config)).or_default() += amp;
        }
        s.prune();
        Ok(s)
    }

    /// Ground state `Π_v A_v |e…e⟩`, normalized, in the gauge-fixed representation.
    pub fn ground_state(lattice: &Lattice) -> Result<Self, LatticeError> {
        Self::ground_state_with(lattice, Representation::BoundaryGaugeFixed)
    }

    pub fn ground_state_with(lattice: &Lattice, repr: Representation) -> Result<Self, LatticeError> {
        let mut s = Self::empty(lattice, repr);
        let free: Vec<Vertex> = lattice.vertices().filter(|&v| !s.is_frozen(v)).collect();
        let estimated_terms = 6u64.saturating_pow(free.len() as u32);
        if lattice.vertex_count() > MAX_VERTICES || estimated_terms > MAX_TERMS {
            return Err(LatticeError::Resource { vertices: lattice.vertex_count(), estimated_terms });
        }
        s.terms.insert(0, C64::new(1.0, 0.0));
        for v in free {
            s.project_vertex(v);
        }
        s.normalize()?;
        Ok(s)
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn representation(&self) -> Representation {
        if self.gauge.is_some() {
            Representation::BoundaryGaugeFixed
        } else {
            Representation::Plain
        }
    }

    /// Number of stored entries (orbit representatives in the gauge-fixed form).
    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Stored entries as `(configuration, amplitude)`.
    pub fn stored_terms(&self) -> impl Iterator<Item = (Vec<GroupElement>, C64)> + '_ {
        let n = self.lattice.edge_count();
        self.terms.iter().map(move |(&k, &a)| (unpack(k, n), a))
    }

    /// Number of configurations represented by one stored entry.
    fn orbit_weight(&self) -> f64 {
        self.gauge.as_ref().map_or(1.0, |g| 6f64.powi(g.frozen_count() as i32))
    }

    fn is_frozen(&self, v: Vertex) -> bool {
        self.gauge.as_ref().is_some_and(|g| g.frozen[self.lattice.vertex_index(v)])
    }

    /// Amplitude of a single basis configuration.
    pub fn amplitude(&self, config: &[GroupElement]) -> C64 {
        self.amplitude_packed(pack(config))
    }

    pub(crate) fn amplitude_packed(&self, key: u64) -> C64 {
        self.terms.get(&self.canonical(key)).copied().unwrap_or_default()
    }

    /// `⟨ψ|ψ⟩` over the full edge Hilbert space.
    pub fn norm_sqr(&self) -> f64 {
        self.orbit_weight() * self.terms.values().map(|a| a.norm_sqr()).sum::<f64>()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn normalize(&mut self) -> Result<f64, LatticeError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(LatticeError::ZeroNorm);
        }
        for a in self.terms.values_mut() {
            *a /= n;
        }
        Ok(n)
    }

    pub fn scale(&mut self, z: C64) {
        for a in self.terms.values_mut() {
            *a *= z;
        }
        self.prune();
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &LatticeState) -> Result<C64, LatticeError> {
        if self.lattice != other.lattice {
            return Err(LatticeError::LatticeMismatch);
        }
        Ok(match (&self.gauge, &other.gauge) {
            (Some(_), Some(_)) => {
                let w = self.orbit_weight();
                self.terms
                    .iter()
                    .filter_map(|(k, a)| other.terms.get(k).map(|b| a.conj() * b))
                    .sum::<C64>()
                    * w
            }
            (None, _) => self.terms.iter().map(|(&k, a)| a.conj() * other.amplitude_packed(k)).sum(),
            (Some(_), None) => other.inner(self)?.conj(),
        })
    }

    /// `|⟨a|b⟩|² / (‖a‖²‖b‖²)`.
    pub fn fidelity(&self, other: &LatticeState) -> Result<f64, LatticeError> {
        let ip = self.inner(other)?;
        Ok(ip.norm_sqr() / (self.norm_sqr() * other.norm_sqr()))
    }

    /// `‖self − other‖`.
    pub fn distance(&self, other: &LatticeState) -> Result<f64, LatticeError> {
        if self.lattice != other.lattice {
            return Err(LatticeError::LatticeMismatch);
        }
        // Sum |a − b|² term by term; the expansion |a|² + |b|² − 2 Re⟨a,b⟩
        // loses half the significant digits to cancellation.
        let (a, b) = match (&self.gauge, &other.gauge) {
            (Some(_), Some(_)) | (None, None) => (self.clone(), other.clone()),
            _ => (self.to_plain(), other.to_plain()),
        };
        let w = a.orbit_weight();
        let zero = C64::default();
        let mut sum: f64 = a.terms.iter().map(|(k, x)| (x - b.terms.get(k).unwrap_or(&zero)).norm_sqr()).sum();
        sum += b.terms.iter().filter(|(k, _)| !a.terms.contains_key(k)).map(|(_, y)| y.norm_sqr()).sum::<f64>();
        Ok((sum * w).sqrt())
    }

    /// Expands to the plain representation.
    pub fn to_plain(&self) -> LatticeState {
        let mut out = self.clone();
        out.make_plain();
        out
    }

    fn make_plain(&mut self) {
        let Some(gauge) = self.gauge.take() else { return };
        let frozen: Vec<usize> = (0..gauge.frozen.len()).filter(|&i| gauge.frozen[i]).collect();
        let mut orbit = vec![0u64];
        let lattice = self.lattice.clone();
        let mut terms = BTreeMap::new();
        for (&rep, &amp) in &self.terms {
            orbit.clear();
            orbit.push(rep);
            for &v in &frozen {
                let current = std::mem::take(&mut orbit);
                for key in current {
                    for g in 0..6u8 {
                        orbit.push(vertex_act(&lattice, key, v, g));
                    }
                }
            }
            for &key in &orbit {
                *terms.entry(key).or_insert(C64::default()) += amp;
            }
        }
        self.terms = terms;
    }

    /// Canonical representative of the gauge orbit of `key`.
    pub(crate) fn canonical(&self, key: u64) -> u64 {
        let Some(gauge) = &self.gauge else { return key };
        let mut k = key;
        for &(v, parent, ends_at_v) in &gauge.order {
            let x = get(k, parent);
            let g = if ends_at_v { x } else { inv_idx(x) };
            if g != 0 {
                k = vertex_act(&self.lattice, k, v, g);
            }
        }
        k
    }

    /// Expands the state if an operation fails to commute with the gauge
    /// action at one of `vertices`.
    pub(super) fn require_free(&mut self, vertices: &[Vertex]) {
        if vertices.iter().any(|&v| self.is_frozen(v)) {
            self.make_plain();
        }
    }

    /// Applies a monomial map to every stored representative.
    pub(super) fn map_monomial(&mut self, f: impl Fn(u64) -> Option<(u64, C64)>) {
        let old = std::mem::take(&mut self.terms);
        for (k, a) in old {
            if let Some((k2, c)) = f(k) {
                *self.terms.entry(self.canonical(k2)).or_default() += a * c;
            }
        }
        self.prune();
    }

    /// Applies a general sparse linear map given branch by branch.
    pub(super) fn map_linear(&mut self, f: impl Fn(u64, &mut Vec<(u64, C64)>)) {
        let old = std::mem::take(&mut self.terms);
        let mut buf = Vec::new();
        for (k, a) in old {
            buf.clear();
            f(k, &mut buf);
            for &(k2, c) in &buf {
                *self.terms.entry(self.canonical(k2)).or_default() += a * c;
            }
        }
        self.prune();
    }

    pub(super) fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() > PRUNE);
    }

    /// `L^g_±` on one edge (`plus` selects `L_+`).
    pub fn apply_l(&mut self, edge: usize, plus: bool, g: GroupElement) {
        let e = self.lattice.edge(edge);
        self.require_free(&[if plus { e.start } else { e.end }]);
        let g = g.index() as u8;
        self.map_monomial(|k| Some((set(k, edge, l_action(get(k, edge), plus, g)), C64::new(1.0, 0.0))));
    }

    /// `T^h_±` on one edge.
    pub fn apply_t(&mut self, edge: usize, plus: bool, h: GroupElement) {
        let e = self.lattice.edge(edge);
        self.require_free(&[e.start, e.end]);
        let h = h.index() as u8;
        self.map_monomial(|k| t_passes(get(k, edge), plus, h).then_some((k, C64::new(1.0, 0.0))));
    }

    /// `A^g_v`.
    pub fn apply_vertex(&mut self, v: Vertex, g: GroupElement) {
        if self.is_frozen(v) {
            // The state is invariant under every A^g at frozen vertices.
            return;
        }
        let vi = self.lattice.vertex_index(v);
        let g = g.index() as u8;
        let lattice = self.lattice.clone();
        self.map_monomial(|k| Some((vertex_act(&lattice, k, vi, g), C64::new(1.0, 0.0))));
    }

    /// `A_v = |G|⁻¹ Σ_g A^g_v`.
    pub fn project_vertex(&mut self, v: Vertex) {
        if self.is_frozen(v) {
            return;
        }
        let vi = self.lattice.vertex_index(v);
        let lattice = self.lattice.clone();
        let w = C64::new(1.0 / 6.0, 0.0);
        self.map_linear(|k, out| {
            for g in 0..6u8 {
                out.push((vertex_act(&lattice, k, vi, g), w));
            }
        });
    }

    /// Flux `g_left g_bottom ḡ_right ḡ_top` of the plaquette of `s` in one configuration.
    pub(crate) fn flux_packed(lattice: &Lattice, key: u64, s: Site) -> u8 {
        let p = lattice.plaquette_edges(s);
        let a = mul_idx(get(key, p.left), get(key, p.bottom));
        let b = mul_idx(a, inv_idx(get(key, p.right)));
        mul_idx(b, inv_idx(get(key, p.top)))
    }

    /// `B^h_p` for the plaquette of site `s`.
    pub fn apply_plaquette(&mut self, s: Site, h: GroupElement) {
        let lattice = self.lattice.clone();
        let h = h.index() as u8;
        self.map_monomial(|k| (Self::flux_packed(&lattice, k, s) == h).then_some((k, C64::new(1.0, 0.0))));
    }

    /// `B_p = B^e_p`.
    pub fn project_plaquette(&mut self, s: Site) {
        self.apply_plaquette(s, GroupElement::E);
    }

    /// Applies a single-edge Pauli in the encoding `|μ^k σ^l⟩ ↦ |k̂, l⟩`.
    pub fn apply_pauli(&mut self, edge: usize, p: EdgePauli) {
        if p == EdgePauli::I {
            return;
        }
        let e = self.lattice.edge(edge);
        // X = L^σ_- commutes with gauge transformations at the start vertex
        // and X̂ = L^μ_+ with those at the end vertex; every other Pauli
        // interacts with both.
        match p {
            EdgePauli::X => self.require_free(&[e.end]),
            EdgePauli::XHat => self.require_free(&[e.start]),
            _ => self.require_free(&[e.start, e.end]),
        }
        self.map_monomial(|key| {
            let g = get(key, edge);
            let (k, l) = (g % 3, g / 3);
            let (k2, l2, phase) = pauli_action(p, k, l);
            Some((set(key, edge, k2 + 3 * l2), phase))
        });
    }

    /// `‖(1 − A_v)ψ‖ / ‖ψ‖`.
    pub fn vertex_residual(&self, v: Vertex) -> f64 {
        let mut p = self.clone();
        p.project_vertex(v);
        p.distance(self).unwrap_or(f64::INFINITY) / self.norm()
    }

    /// `‖(1 − B_p)ψ‖ / ‖ψ‖`.
    pub fn plaquette_residual(&self, s: Site) -> f64 {
        let mut p = self.clone();
        p.project_plaquette(s);
        p.distance(self).unwrap_or(f64::INFINITY) / self.norm()
    }

    /// Largest residual over every vertex and plaquette projector.
    pub fn max_stabilizer_residual(&self) -> f64 {
        let v = self.lattice.vertices().map(|v| self.vertex_residual(v));
        let p = self.lattice.sites().map(|s| self.plaquette_residual(s));
        v.chain(p).fold(0.0, f64::max)
    }

    /// Structured text snapshot: header, edge order, then one line per stored
    /// entry with the configuration as group indices `k + 3l`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let repr = match self.representation() {
            Representation::Plain => "plain",
            Representation::BoundaryGaugeFixed => "gauge-fixed",
        };
        writeln!(out, "lattice {} {}", self.lattice.width(), self.lattice.height()).unwrap();
        writeln!(out, "representation {repr}").unwrap();
        let names: Vec<String> = self.lattice.edges().iter().map(|e| e.to_string()).collect();
        writeln!(out, "edges {}", names.join(" ")).unwrap();
        writeln!(out, "terms {}", self.terms.len()).unwrap();
        for (&k, a) in &self.terms {
            let digits: String =
                (0..self.lattice.edge_count()).map(|e| char::from(b'0' + get(k, e))).collect();
            writeln!(out, "{digits} {:e} {:e}", a.re, a.im).unwrap();
        }
        out
    }

    /// Inverse of [`LatticeState::dump`].
    pub fn parse_dump(text: &str) -> Result<Self, LatticeError> {
        let bad = |m: &str| LatticeError::Dump(m.to_string());
        let mut lines = text.lines();
        let mut header = |tag: &str| -> Result<Vec<String>, LatticeError> {
            let line = lines.next().ok_or_else(|| bad("truncated header"))?;
            let mut parts = line.split_whitespace();
            if parts.next() != Some(tag) {
                return Err(bad(&format!("expected '{tag}' line")));
            }
            Ok(parts.map(str::to_string).collect())
        };
        let dims = header("lattice")?;
        let parse_usize = |s: &str| s.parse::<usize>().map_err(|_| bad("bad integer"));
        if dims.len() != 2 {
            return Err(bad("lattice line needs width and height"));
        }
        let lattice = Lattice::new(parse_usize(&dims[0])?, parse_usize(&dims[1])?)?;
        let repr = match header("representation")?.first().map(String::as_str) {
            Some("plain") => Representation::Plain,
            Some("gauge-fixed") => Representation::BoundaryGaugeFixed,
            _ => return Err(bad("unknown representation")),
        };
        header("edges")?;
        let count = header("terms")?.first().map(|s| parse_usize(s)).transpose()?.ok_or_else(|| bad("missing term count"))?;
        let mut s = Self::empty(&lattice, repr);
        for line in lines.take(count) {
            let parts: Vec<&str> = line.split_whitespace().collect();
            if parts.len() != 3 || parts[0].len() != lattice.edge_count() {
                return Err(bad("malformed term line"));
            }
            let mut key = 0;
            for (e, ch) in parts[0].bytes().enumerate() {
                if !(b'0'..b'6').contains(&ch) {
                    return Err(bad("group index out of range"));
                }
                key = set(key, e, ch - b'0');
            }
            let re: f64 = parts[1].parse().map_err(|_| bad("bad amplitude"))?;
            let im: f64 = parts[2].parse().map_err(|_| bad("bad amplitude"))?;
            s.terms.insert(key, Complex64::new(re, im));
        }
        if s.terms.len() != count {
            return Err(bad("term count mismatch"));
        }
        Ok(s)
    }
}

/// `L^g_+ |m⟩ = |gm⟩`, `L^g_- |m⟩ = |m ḡ⟩` on packed indices.
pub(crate) fn l_action(m: u8, plus: bool, g: u8) -> u8 {
    if plus {
        mul_idx(g, m)
    } else {
        mul_idx(m, inv_idx(g))
    }
}

/// Whether `T^h_±` keeps `|m⟩` (`T_+` needs `m = h`, `T_-` needs `m = h̄`).
pub(crate) fn t_passes(m: u8, plus: bool, h: u8) -> bool {
    if plus {
        m == h
    } else {
        m == inv_idx(h)
    }
}

/// `A^g_v` on a packed configuration (vertex given by index).
pub(crate) fn vertex_act(lattice: &Lattice, key: u64, v: usize, g: u8) -> u64 {
    let mut k = key;
    for &(e, starts) in lattice.incident(lattice.vertex_at(v)) {
        k = set(k, e, l_action(get(k, e), starts, g));
    }
    k
}

/// Action of an edge Pauli on `|k̂, l⟩`: new `(k, l)` and phase.
pub(crate) fn pauli_action(p: EdgePauli, k: u8, l: u8) -> (u8, u8, C64) {
    let one = C64::new(1.0, 0.0);
    let i = C64::new(0.0, 1.0);
    match p {
        EdgePauli::I => (k, l, one),
        EdgePauli::X => (k, 1 - l, one),
        EdgePauli::Z => (k, l, if l == 1 { -one } else { one }),
        // Y = iXZ: Y|0⟩ = i|1⟩, Y|1⟩ = −i|0⟩.
        EdgePauli::Y => (k, 1 - l, if l == 0 { i } else { -i }),
        EdgePauli::XHat => ((k + 1) % 3, l, one),
        EdgePauli::ZHat => (k, l, omega_pow(k as i64)),
        EdgePauli::XHatZHat => ((k + 1) % 3, l, omega_pow(k as i64)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(i: usize) -> GroupElement {
        GroupElement::from_index(i)
    }

    #[test]
    fn packed_tables_match_group_arithmetic() {
        for a in 0..6u8 {
            assert_eq!(inv_idx(a) as usize, g(a as usize).inv().index());
            for b in 0..6u8 {
                assert_eq!(mul_idx(a, b) as usize, (g(a as usize) * g(b as usize)).index());
            }
        }
    }

    #[test]
    fn pack_round_trips() {
        let config: Vec<GroupElement> = (0..21).map(|i| g(i % 6)).collect();
        assert_eq!(unpack(pack(&config), 21), config);
    }

    #[test]
    fn ground_states_are_stabilized() {
        for (w, h) in [(1, 1), (2, 1), (3, 1)] {
            let lat = Lattice::new(w, h).unwrap();
            for repr in [Representation::Plain, Representation::BoundaryGaugeFixed] {
                if repr == Representation::Plain && w == 3 {
                    continue;
                }
                let s = LatticeState::ground_state_with(&lat, repr).unwrap();
                assert!((s.norm() - 1.0).abs() < 1e-12);
                assert!(s.max_stabilizer_residual() < 1e-10, "{w}×{h} {repr:?}");
            }
        }
    }

    #[test]
    fn gauge_fixed_and_plain_ground_states_agree() {
        let lat = Lattice::new(2, 1).unwrap();
        let plain = LatticeState::ground_state_with(&lat, Representation::Plain).unwrap();
        let fixed = LatticeState::ground_state(&lat).unwrap();
        assert_eq!(fixed.term_count(), 6);
        assert_eq!(plain.term_count(), 6usize.pow(5));
        assert!((fixed.fidelity(&plain).unwrap() - 1.0).abs() < 1e-12);
        assert!((fixed.to_plain().fidelity(&plain).unwrap() - 1.0).abs() < 1e-12);
        assert!(fixed.to_plain().distance(&plain).unwrap() < 1e-10);
    }

    #[test]
    fn oversized_ground_state_reports_resource_error() {
        let lat = Lattice::new(2, 2).unwrap();
        let err = LatticeState::ground_state_with(&lat, Representation::Plain).unwrap_err();
        assert!(matches!(err, LatticeError::Resource { vertices: 9, estimated_terms: 10_077_696 }));
        assert!(LatticeState::ground_state(&lat).is_ok());
    }

    #[test]
    fn drinfeld_double_relations_hold_on_one_plaquette() {
        let lat = Lattice::new(1, 1).unwrap();
        let s = Site::new(0, 0);
        let v = s.vertex();
        let config: Vec<GroupElement> = [1, 4, 2, 3].into_iter().map(g).collect();
        let psi = LatticeState::from_terms(
            &lat,
            GroupElement::all().into_iter().enumerate().map(|(i, x)| {
                let mut c = config.clone();
                c[i % 4] = x * c[i % 4];
                (c, C64::new(1.0 + i as f64, 0.5 * i as f64))
            }),
        )
        .unwrap();
        for a in GroupElement::all() {
            for b in GroupElement::all() {
                let mut lhs = psi.clone();
                lhs.apply_vertex(v, b);
                lhs.apply_vertex(v, a);
                let mut rhs = psi.clone();
                rhs.apply_vertex(v, a * b);
                assert!(lhs.distance(&rhs).unwrap() < 1e-12);

                let mut lhs = psi.clone();
                lhs.apply_plaquette(s, b);
                lhs.apply_plaquette(s, a);
                let mut rhs = psi.clone();
                if a == b {
                    rhs.apply_plaquette(s, a);
                } else {
                    rhs.scale(C64::default());
                }
                assert!(lhs.distance(&rhs).unwrap() < 1e-12);

                let mut lhs = psi.clone();
                lhs.apply_plaquette(s, b);
                lhs.apply_vertex(v, a);
                let mut rhs = psi.clone();
                rhs.apply_vertex(v, a);
                rhs.apply_plaquette(s, b.conj_by(a));
                assert!(lhs.distance(&rhs).unwrap() < 1e-12);
            }
        }
    }

    #[test]
    fn bare_edge_operator_at_frozen_vertex_expands_state() {
        let lat = Lattice::new(1, 1).unwrap();
        let mut s = LatticeState::ground_state(&lat).unwrap();
        let mut reference = s.to_plain();
        let e = lat.h_edge(0, 1).unwrap();
        s.apply_l(e, true, GroupElement::MU);
        reference.apply_l(e, true, GroupElement::MU);
        assert_eq!(s.representation(), Representation::Plain);
        assert!(s.distance(&reference).unwrap() < 1e-12);
    }

    #[test]
    fn dump_round_trips() {
        let lat = Lattice::new(2, 1).unwrap();
        let s = LatticeState::ground_state(&lat).unwrap();
        let back = LatticeState::parse_dump(&s.dump()).unwrap();
        assert_eq!(back.representation(), Representation::BoundaryGaugeFixed);
        assert!(back.distance(&s).unwrap() < 1e-12);
        assert!(LatticeState::parse_dump("lattice 1").is_err());
    }

    #[test]
    fn pauli_actions_match_lt_identities() {
        // X̂ = L^μ_+ and X = L^σ_- on every basis element.
        for m in 0..6u8 {
            let (k, l) = (m % 3, m / 3);
            let (k2, l2, _) = pauli_action(EdgePauli::XHat, k, l);
            assert_eq!(k2 + 3 * l2, l_action(m, true, GroupElement::MU.index() as u8));
            let (k2, l2, _) = pauli_action(EdgePauli::X, k, l);
            assert_eq!(k2 + 3 * l2, l_action(m, false, GroupElement::SIGMA.index() as u8));
        }
    }
}
