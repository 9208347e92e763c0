//! Dense reference backend for lattices with at most seven edges.
//!
//! Written directly against [`GroupElement`] arithmetic and a base-6 index,
//! independently of the packed sparse code, so that it can serve as an
//! oracle.

use super::{Lattice, LatticeError, LatticeState, Site, Vertex};
use crate::algebra::{GroupElement, C64};

/// Largest edge count handled densely (6⁷ = 279 936 amplitudes).
pub const DENSE_MAX_EDGES: usize = 7;

#[derive(Clone, Debug)]
pub struct DenseState {
    lattice: Lattice,
    amps: Vec<C64>,
}

fn decode(mut i: usize, n: usize) -> Vec<GroupElement> {
    (0..n)
        .map(|_| {
            let g = GroupElement::from_index(i % 6);
            i /= 6;
            g
        })
        .collect()
}

fn encode(c: &[GroupElement]) -> usize {
    c.iter().rev().fold(0, |acc, g| acc * 6 + g.index())
}

fn check(lattice: &Lattice) -> Result<(), LatticeError> {
    if lattice.edge_count() > DENSE_MAX_EDGES {
        return Err(LatticeError::DenseTooLarge { edges: lattice.edge_count(), max: DENSE_MAX_EDGES });
    }
    Ok(())
}

/// `A^g_v` on a configuration.
fn gauge(lattice: &Lattice, c: &mut [GroupElement], v: Vertex, g: GroupElement) {
    for e in lattice.edges() {
        if e.start == v {
            c[e.id] = g * c[e.id];
        }
        if e.end == v {
            c[e.id] = c[e.id] * g.inv();
        }
    }
}

fn flux(lattice: &Lattice, c: &[GroupElement], s: Site) -> GroupElement {
    let p = lattice.plaquette_edges(s);
    c[p.left] * c[p.bottom] * c[p.right].inv() * c[p.top].inv()
}

impl DenseState {
    /// `|e…e⟩`.
    pub fn identity_config(lattice: &Lattice) -> Result<Self, LatticeError> {
        check(lattice)?;
        let mut amps = vec![C64::default(); 6usize.pow(lattice.edge_count() as u32)];
        amps[0] = C64::new(1.0, 0.0);
        Ok(DenseState { lattice: lattice.clone(), amps })
    }

    /// Dense copy of a sparse state.
    pub fn from_sparse(state: &LatticeState) -> Result<Self, LatticeError> {
        let lattice = state.lattice().clone();
        check(&lattice)?;
        let plain = state.to_plain();
        let mut amps = vec![C64::default(); 6usize.pow(lattice.edge_count() as u32)];
        for (c, a) in plain.stored_terms() {
            amps[encode(&c)] = a;
        }
        Ok(DenseState { lattice, amps })
    }

    /// Ground state by projecting `|e…e⟩` with every `A_v` and `B_p`.
    pub fn ground_state(lattice: &Lattice) -> Result<Self, LatticeError> {
        let mut s = Self::identity_config(lattice)?;
        for v in lattice.vertices().collect::<Vec<_>>() {
            s.project_vertex(v);
        }
        for p in lattice.sites().collect::<Vec<_>>() {
            s.project_plaquette(p);
        }
        let n = s.norm();
        s.amps.iter_mut().for_each(|a| *a /= n);
        Ok(s)
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn project_vertex(&mut self, v: Vertex) {
        let n = self.lattice.edge_count();
        let mut out = vec![C64::default(); self.amps.len()];
        for (i, &a) in self.amps.iter().enumerate() {
            if a == C64::default() {
                continue;
            }
            for g in GroupElement::all() {
                let mut c = decode(i, n);
                gauge(&self.lattice, &mut c, v, g);
                out[encode(&c)] += a / 6.0;
            }
        }
        self.amps = out;
    }

    pub fn project_plaquette(&mut self, s: Site) {
        let n = self.lattice.edge_count();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if flux(&self.lattice, &decode(i, n), s) != GroupElement::E {
                *a = C64::default();
            }
        }
    }

    /// `|⟨self|sparse⟩|²` for normalized inputs.
    pub fn fidelity_with(&self, state: &LatticeState) -> Result<f64, LatticeError> {
        let other = DenseState::from_sparse(state)?;
        let ip: C64 = self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum();
        Ok(ip.norm_sqr() / (self.norm().powi(2) * other.norm().powi(2)))
    }
}

/// Dimension of the common `+1` eigenspace of every `A_v` and `B_p`,
/// computed as `Tr(Π_v A_v Π_p B_p)`. A flat configuration `x` contributes
/// the fraction of gauge transformations that fix it.
pub fn ground_space_dimension(lattice: &Lattice) -> Result<f64, LatticeError> {
    check(lattice)?;
    let n = lattice.edge_count();
    let vertices: Vec<Vertex> = lattice.vertices().collect();
    let sites: Vec<Site> = lattice.sites().collect();
    let mut trace = 0.0;
    for i in 0..6usize.pow(n as u32) {
        let c = decode(i, n);
        if sites.iter().any(|&s| flux(lattice, &c, s) != GroupElement::E) {
            continue;
        }
        // A gauge transformation fixing `c` is determined by its value at the
        // first vertex; propagate along edges and check consistency.
        let mut fixing = 0usize;
        for g0 in GroupElement::all() {
            let mut gv: Vec<Option<GroupElement>> = vec![None; vertices.len()];
            gv[0] = Some(g0);
            let mut changed = true;
            let mut ok = true;
            while changed && ok {
                changed = false;
                for e in lattice.edges() {
                    let (a, b) = (lattice.vertex_index(e.start), lattice.vertex_index(e.end));
                    let x = c[e.id];
                    match (gv[a], gv[b]) {
                        (Some(ga), None) => {
                            gv[b] = Some(x.inv() * ga * x);
                            changed = true;
                        }
                        (None, Some(gb)) => {
                            gv[a] = Some(x * gb * x.inv());
                            changed = true;
                        }
                        (Some(ga), Some(gb)) => ok &= ga * x * gb.inv() == x,
                        (None, None) => {}
                    }
                }
            }
            if ok {
                fixing += 1;
            }
        }
        trace += fixing as f64 / 6f64.powi(vertices.len() as i32 - 1) / 6.0;
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_one_ground_space_is_one_dimensional() {
        let lat = Lattice::new(2, 1).unwrap();
        let d = ground_space_dimension(&lat).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "dimension {d}");
    }

    #[test]
    fn dense_and_sparse_ground_states_agree() {
        for (w, h) in [(1, 1), (2, 1)] {
            let lat = Lattice::new(w, h).unwrap();
            let dense = DenseState::ground_state(&lat).unwrap();
            let sparse = LatticeState::ground_state(&lat).unwrap();
            assert!((dense.fidelity_with(&sparse).unwrap() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn large_lattices_are_rejected() {
        let lat = Lattice::new(3, 1).unwrap();
        assert!(matches!(ground_space_dimension(&lat), Err(LatticeError::DenseTooLarge { .. })));
    }
}
