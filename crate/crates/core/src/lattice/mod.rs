//! Exact simulation of the D(S3) quantum double on an open, directed square
//! lattice.
//!
//! Geometry: the lattice has `W × H` plaquettes and a `(W+1) × (H+1)` vertex
//! grid. Vertex `(x, y)` has `x` increasing to the right and `y` increasing
//! downward. Horizontal edges point right and vertical edges point down. A
//! site `(x, y)` is the plaquette with north-west corner `(x, y)` together
//! with that corner.
//!
//! Every edge holds a six-level system with basis `|g⟩`, `g ∈ S3`. States are
//! sparse maps from packed edge configurations to amplitudes (see
//! [`LatticeState`]). All vertex, plaquette and ribbon operators are monomial
//! in this basis.

mod dense;
mod measure;
mod orthonormality;
mod ribbon;
pub(crate) mod state;

use std::fmt;

use thiserror::Error;

use crate::algebra::Anyon;

pub use dense::{ground_space_dimension, DenseState};
pub use measure::{k_projector_coefficients, AnyonConfiguration};
pub use orthonormality::{
    shortest_ribbon_operators, verify_orthonormality, OrthonormalityReport, OverlapPattern, RibbonOperator,
};
pub use ribbon::{anyon_ribbon_terms, AnyonRibbonOutcome, Ribbon, RibbonDirection, SitePoint, Triangle, TriangleKind};
pub use state::{LatticeState, Representation};

/// Largest number of edges a packed configuration can hold (3 bits per edge).
pub const MAX_EDGES: usize = 21;
/// Largest vertex count accepted by [`LatticeState::ground_state`].
pub const MAX_VERTICES: usize = 10;
/// Largest estimated term count accepted when building a ground state.
pub const MAX_TERMS: u64 = 2_000_000;
/// Amplitudes below this magnitude are dropped after projections.
pub const PRUNE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LatticeError {
    #[error("lattice must have at least one plaquette, got {width}×{height}")]
    Empty { width: usize, height: usize },
    #[error("lattice with {edges} edges exceeds the packed limit of {MAX_EDGES}")]
    TooManyEdges { edges: usize },
    #[error("lattice with {vertices} vertices needs about {estimated_terms} terms; the desk-scale bound is {MAX_VERTICES} vertices and {MAX_TERMS} terms")]
    Resource { vertices: usize, estimated_terms: u64 },
    #[error("site ({x}, {y}) is outside the {width}×{height} lattice")]
    InvalidSite { x: usize, y: usize, width: usize, height: usize },
    #[error("invalid ribbon: {0}")]
    InvalidRibbon(String),
    #[error("the {anyon} ribbon annihilates the state for every choice of local indices")]
    AnnihilationImpossible { anyon: Anyon },
    #[error("local index {index} is outside the {dim}-dimensional irrep of {anyon}")]
    InvalidLocalIndex { anyon: Anyon, index: usize, dim: usize },
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("states live on different lattices")]
    LatticeMismatch,
    #[error("configuration has {got} edges, lattice has {expected}")]
    ConfigLength { got: usize, expected: usize },
    #[error("dense backend supports at most {max} edges, lattice has {edges}")]
    DenseTooLarge { edges: usize, max: usize },
    #[error("malformed dump: {0}")]
    Dump(String),
}

/// A vertex `(x, y)` of the grid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: usize,
    pub y: usize,
}

impl Vertex {
    pub fn new(x: usize, y: usize) -> Self {
        Vertex { x, y }
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

/// A site: plaquette `(x, y)` and its north-west vertex `(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Site {
    pub x: usize,
    pub y: usize,
}

impl Site {
    pub fn new(x: usize, y: usize) -> Self {
        Site { x, y }
    }

    pub fn vertex(self) -> Vertex {
        Vertex::new(self.x, self.y)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "s({}, {})", self.x, self.y)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Orientation {
    Horizontal,
    Vertical,
}

/// A directed edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub id: usize,
    pub start: Vertex,
    pub end: Vertex,
    pub orientation: Orientation,
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = match self.orientation {
            Orientation::Horizontal => 'h',
            Orientation::Vertical => 'v',
        };
        write!(f, "{tag}({},{})", self.start.x, self.start.y)
    }
}

/// Edges of one plaquette in the order used by the flux `g_left g_bottom ḡ_right ḡ_top`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlaquetteEdges {
    pub left: usize,
    pub bottom: usize,
    pub right: usize,
    pub top: usize,
}

/// Open `W × H` lattice with the fixed edge orientation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lattice {
    width: usize,
    height: usize,
    edges: Vec<Edge>,
    /// Per vertex: `(edge, vertex_is_start)`.
    incidence: Vec<Vec<(usize, bool)>>,
}

impl Lattice {
    /// Builds the lattice. Horizontal edges come first (row by row), then
    /// vertical edges (row by row).
    pub fn new(width: usize, height: usize) -> Result<Self, LatticeError> {
        if width == 0 || height == 0 {
            return Err(LatticeError::Empty { width, height });
        }
        let n_edges = width * (height + 1) + height * (width + 1);
        if n_edges > MAX_EDGES {
            return Err(LatticeError::TooManyEdges { edges: n_edges });
        }
        let mut edges = Vec::with_capacity(n_edges);
        for y in 0..=height {
            for x in 0..width {
                edges.push(Edge {
                    id: edges.len(),
                    start: Vertex::new(x, y),
                    end: Vertex::new(x + 1, y),
                    orientation: Orientation::Horizontal,
                });
            }
        }
        for y in 0..height {
            for x in 0..=width {
                edges.push(Edge {
                    id: edges.len(),
                    start: Vertex::new(x, y),
                    end: Vertex::new(x, y + 1),
                    orientation: Orientation::Vertical,
                });
            }
        }
        let mut incidence = vec![Vec::new(); (width + 1) * (height + 1)];
        for e in &edges {
            incidence[e.start.y * (width + 1) + e.start.x].push((e.id, true));
            incidence[e.end.y * (width + 1) + e.end.x].push((e.id, false));
        }
        Ok(Lattice { width, height, edges, incidence })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn vertex_count(&self) -> usize {
        (self.width + 1) * (self.height + 1)
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn site_count(&self) -> usize {
        self.width * self.height
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> Edge {
        self.edges[id]
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..=self.height).flat_map(move |y| (0..=self.width).map(move |x| Vertex::new(x, y)))
    }

    /// Sites in row-major order.
    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (0..self.height).flat_map(move |y| (0..self.width).map(move |x| Site::new(x, y)))
    }

    pub fn vertex_index(&self, v: Vertex) -> usize {
        v.y * (self.width + 1) + v.x
    }

    pub fn vertex_at(&self, index: usize) -> Vertex {
        Vertex::new(index % (self.width + 1), index / (self.width + 1))
    }

    pub fn site_index(&self, s: Site) -> usize {
        s.y * self.width + s.x
    }

    pub fn contains_vertex(&self, v: Vertex) -> bool {
        v.x <= self.width && v.y <= self.height
    }

    pub fn contains_site(&self, s: Site) -> bool {
        s.x < self.width && s.y < self.height
    }

    pub fn check_site(&self, s: Site) -> Result<(), LatticeError> {
        if self.contains_site(s) {
            Ok(())
        } else {
            Err(LatticeError::InvalidSite { x: s.x, y: s.y, width: self.width, height: self.height })
        }
    }

    /// Whether `v` is the north-west vertex of some site.
    pub fn is_site_vertex(&self, v: Vertex) -> bool {
        v.x < self.width && v.y < self.height
    }

    /// Horizontal edge `(x, y) → (x+1, y)`.
    pub fn h_edge(&self, x: usize, y: usize) -> Option<usize> {
        (x < self.width && y <= self.height).then(|| y * self.width + x)
    }

    /// Vertical edge `(x, y) → (x, y+1)`.
    pub fn v_edge(&self, x: usize, y: usize) -> Option<usize> {
        (x <= self.width && y < self.height).then(|| self.width * (self.height + 1) + y * (self.width + 1) + x)
    }

    /// Edge joining two vertices, with `true` when it points from `a` to `b`.
    pub fn edge_between(&self, a: Vertex, b: Vertex) -> Option<(usize, bool)> {
        self.incident(a)
            .iter()
            .find(|&&(e, starts)| {
                let edge = self.edges[e];
                if starts {
                    edge.end == b
                } else {
                    edge.start == b
                }
            })
            .copied()
    }

    /// Edges at `v` as `(edge, v_is_start)`.
    pub fn incident(&self, v: Vertex) -> &[(usize, bool)] {
        &self.incidence[self.vertex_index(v)]
    }

    pub fn plaquette_edges(&self, s: Site) -> PlaquetteEdges {
        PlaquetteEdges {
            left: self.v_edge(s.x, s.y).expect("site inside lattice"),
            bottom: self.h_edge(s.x, s.y + 1).expect("site inside lattice"),
            right: self.v_edge(s.x + 1, s.y).expect("site inside lattice"),
            top: self.h_edge(s.x, s.y).expect("site inside lattice"),
        }
    }
}

impl fmt::Display for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}×{} lattice ({} edges)", self.width, self.height, self.edges.len())
    }
}

/// Single-edge Pauli errors in the qutrit-qubit encoding `|μ^k σ^l⟩ ↦ |k̂, l⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EdgePauli {
    I,
    X,
    Z,
    Y,
    XHat,
    ZHat,
    XHatZHat,
}

impl EdgePauli {
    pub const NONTRIVIAL: [EdgePauli; 6] =
        [EdgePauli::X, EdgePauli::Z, EdgePauli::Y, EdgePauli::XHat, EdgePauli::ZHat, EdgePauli::XHatZHat];

    pub fn name(self) -> &'static str {
        match self {
            EdgePauli::I => "I",
            EdgePauli::X => "X",
            EdgePauli::Z => "Z",
            EdgePauli::Y => "Y",
            EdgePauli::XHat => "X̂",
            EdgePauli::ZHat => "Ẑ",
            EdgePauli::XHatZHat => "X̂Ẑ",
        }
    }
}

impl fmt::Display for EdgePauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_match_grid_formulas() {
        for (w, h) in [(1, 1), (2, 1), (3, 1), (4, 1), (2, 2)] {
            let lat = Lattice::new(w, h).unwrap();
            assert_eq!(lat.edge_count(), w * (h + 1) + h * (w + 1));
            assert_eq!(lat.site_count(), w * h);
            assert_eq!(lat.vertex_count(), (w + 1) * (h + 1));
            assert_eq!(lat.sites().count(), w * h);
        }
    }

    #[test]
    fn edges_point_right_and_down() {
        let lat = Lattice::new(2, 2).unwrap();
        for e in lat.edges() {
            match e.orientation {
                Orientation::Horizontal => assert_eq!((e.end.x, e.end.y), (e.start.x + 1, e.start.y)),
                Orientation::Vertical => assert_eq!((e.end.x, e.end.y), (e.start.x, e.start.y + 1)),
            }
        }
        let p = lat.plaquette_edges(Site::new(1, 0));
        assert_eq!(lat.edge(p.top).start, Vertex::new(1, 0));
        assert_eq!(lat.edge(p.left).start, Vertex::new(1, 0));
        assert_eq!(lat.edge(p.right).start, Vertex::new(2, 0));
        assert_eq!(lat.edge(p.bottom).start, Vertex::new(1, 1));
    }

    #[test]
    fn oversized_and_empty_lattices_are_rejected() {
        assert!(matches!(Lattice::new(0, 3), Err(LatticeError::Empty { .. })));
        assert!(matches!(Lattice::new(5, 3), Err(LatticeError::TooManyEdges { .. })));
    }

    #[test]
    fn edge_between_reports_direction() {
        let lat = Lattice::new(1, 1).unwrap();
        let (e, fwd) = lat.edge_between(Vertex::new(1, 0), Vertex::new(0, 0)).unwrap();
        assert_eq!(e, lat.h_edge(0, 0).unwrap());
        assert!(!fwd);
        assert!(lat.edge_between(Vertex::new(0, 0), Vertex::new(1, 1)).is_none());
    }
}
