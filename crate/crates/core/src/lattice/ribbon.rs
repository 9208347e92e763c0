//! Ribbons and ribbon operators.
//!
//! A ribbon is a chain of generalized sites `(vertex, plaquette)` where each
//! step changes either the vertex (a direct triangle, acting with `T` on the
//! edge joining the two vertices) or the plaquette (a dual triangle, acting
//! with `L` on the edge separating the two plaquettes).
//!
//! Sign rules: a direct triangle uses `T_+` when the ribbon runs along the
//! edge orientation and `T_-` otherwise; a dual triangle uses `L_+` when the
//! ribbon's vertex is the start of the crossed edge and `L_-` otherwise.
//!
//! `F^{h,g}` is evaluated by peeling triangles off the front with the gluing
//! rule `F^{h,g}_{τρ} = Σ_m F^{h,m}_τ F^{m̄hm, m̄g}_ρ`. On a basis
//! configuration a direct triangle fixes `m` to the edge value, a dual
//! triangle forces `m = e`, and the empty ribbon is `δ_{g,e}`. Hence every
//! `F^{h,g}` maps each basis configuration to at most one configuration.

use std::collections::BTreeMap;

use rand::Rng;

use super::state::{get, inv_idx, l_action, mul_idx, set};
use super::{Lattice, LatticeError, LatticeState, Site, Vertex};
use crate::algebra::{Anyon, GroupElement, C64};

/// Generalized site: a vertex and an adjacent plaquette. Plaquette
/// coordinates may lie one step outside the lattice so that ribbons can run
/// along the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SitePoint {
    pub vertex: Vertex,
    pub plaquette: (i64, i64),
}

impl SitePoint {
    pub fn new(vertex: Vertex, plaquette: (i64, i64)) -> Self {
        SitePoint { vertex, plaquette }
    }

    pub fn of_site(s: Site) -> Self {
        SitePoint { vertex: s.vertex(), plaquette: (s.x as i64, s.y as i64) }
    }

    /// The lattice site this point coincides with, if any.
    pub fn site(self) -> Option<Site> {
        let (px, py) = self.plaquette;
        (px >= 0 && py >= 0 && self.vertex == Vertex::new(px as usize, py as usize))
            .then(|| Site::new(px as usize, py as usize))
    }

    fn is_corner(self) -> bool {
        let (px, py) = self.plaquette;
        let (vx, vy) = (self.vertex.x as i64, self.vertex.y as i64);
        (vx == px || vx == px + 1) && (vy == py || vy == py + 1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TriangleKind {
    Direct,
    Dual,
}

/// One triangle: the edge it acts on and the sign of its `T` or `L`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Triangle {
    pub kind: TriangleKind,
    pub edge: usize,
    pub plus: bool,
    pub from: SitePoint,
    pub to: SitePoint,
}

/// Shortest ribbons between neighbouring sites.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RibbonDirection {
    /// `ρ_h`: from site `(x, y)` to `(x+1, y)`; `T_+` on the top edge, then
    /// `L_+` on the vertical edge below `(x+1, y)`.
    Horizontal,
    /// `ρ_v`: from site `(x, y)` to `(x, y−1)`; `L_+` on the top edge, then
    /// `T_-` on the vertical edge above `(x, y)`.
    Vertical,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ribbon {
    start: SitePoint,
    triangles: Vec<Triangle>,
}

impl Ribbon {
    /// Builds a ribbon through the given generalized sites.
    pub fn from_points(lattice: &Lattice, points: &[SitePoint]) -> Result<Self, LatticeError> {
        let bad = |m: String| Err(LatticeError::InvalidRibbon(m));
        let Some(&start) = points.first() else {
            return bad("a ribbon needs at least one site".into());
        };
        for p in points {
            if !lattice.contains_vertex(p.vertex) || !p.is_corner() {
                return bad(format!("{:?} is not a vertex–plaquette pair of the lattice", p));
            }
        }
        let mut triangles = Vec::new();
        for w in points.windows(2) {
            let (a, b) = (w[0], w[1]);
            let t = if a.plaquette == b.plaquette && a.vertex != b.vertex {
                let Some((edge, forward)) = lattice.edge_between(a.vertex, b.vertex) else {
                    return bad(format!("vertices {} and {} are not joined by an edge", a.vertex, b.vertex));
                };
                Triangle { kind: TriangleKind::Direct, edge, plus: forward, from: a, to: b }
            } else if a.vertex == b.vertex && a.plaquette != b.plaquette {
                let Some(edge) = separating_edge(lattice, a.plaquette, b.plaquette) else {
                    return bad(format!("plaquettes {:?} and {:?} do not share an edge", a.plaquette, b.plaquette));
                };
                let e = lattice.edge(edge);
                if e.start != a.vertex && e.end != a.vertex {
                    return bad(format!("crossed edge {e} does not touch the ribbon vertex {}", a.vertex));
                }
                Triangle { kind: TriangleKind::Dual, edge, plus: e.start == a.vertex, from: a, to: b }
            } else {
                return bad(format!("consecutive sites {:?} and {:?} are not neighbours", a, b));
            };
            if triangles.iter().any(|x: &Triangle| x.edge == t.edge) {
                return bad(format!("edge {} is used twice", lattice.edge(t.edge)));
            }
            triangles.push(t);
        }
        Ok(Ribbon { start, triangles })
    }

    /// Shortest horizontal or vertical ribbon starting at `site`.
    pub fn shortest(lattice: &Lattice, site: Site, dir: RibbonDirection) -> Result<Self, LatticeError> {
        lattice.check_site(site)?;
        let s0 = SitePoint::of_site(site);
        let (px, py) = s0.plaquette;
        let points = match dir {
            RibbonDirection::Horizontal => {
                let target = Site::new(site.x + 1, site.y);
                lattice.check_site(target)?;
                vec![s0, SitePoint::new(target.vertex(), (px, py)), SitePoint::of_site(target)]
            }
            RibbonDirection::Vertical => {
                if site.y == 0 {
                    return Err(LatticeError::InvalidRibbon(format!("no site above {site}")));
                }
                let target = Site::new(site.x, site.y - 1);
                vec![s0, SitePoint::new(site.vertex(), (px, py - 1)), SitePoint::of_site(target)]
            }
        };
        Self::from_points(lattice, &points)
    }

    /// Shortest ribbon joining two neighbouring sites (in either order).
    pub fn between(lattice: &Lattice, a: Site, b: Site) -> Result<Self, LatticeError> {
        if b.y == a.y && b.x == a.x + 1 {
            Self::shortest(lattice, a, RibbonDirection::Horizontal)
        } else if b.x == a.x && b.y + 1 == a.y {
            Self::shortest(lattice, a, RibbonDirection::Vertical)
        } else if (a.y == b.y && a.x == b.x + 1) || (a.x == b.x && a.y + 1 == b.y) {
            Self::between(lattice, b, a)
        } else {
            Err(LatticeError::InvalidRibbon(format!("{a} and {b} are not neighbouring sites")))
        }
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn start(&self) -> SitePoint {
        self.start
    }

    pub fn end(&self) -> SitePoint {
        self.triangles.last().map_or(self.start, |t| t.to)
    }

    /// Edges acted on, in triangle order.
    pub fn edges(&self) -> Vec<usize> {
        self.triangles.iter().map(|t| t.edge).collect()
    }

    /// Splits into `ρ₁ρ₂` after `at` triangles.
    pub fn split(&self, at: usize) -> (Ribbon, Ribbon) {
        let at = at.min(self.triangles.len());
        let first = Ribbon { start: self.start, triangles: self.triangles[..at].to_vec() };
        let second = Ribbon { start: first.end(), triangles: self.triangles[at..].to_vec() };
        (first, second)
    }

    /// `F^{h,g}` on one packed configuration.
    pub(crate) fn act_packed(&self, key: u64, h: u8, g: u8) -> Option<u64> {
        let (mut h, mut g, mut k) = (h, g, key);
        for t in &self.triangles {
            match t.kind {
                TriangleKind::Direct => {
                    let x = get(k, t.edge);
                    let m = if t.plus { x } else { inv_idx(x) };
                    let mi = inv_idx(m);
                    h = mul_idx(mul_idx(mi, h), m);
                    g = mul_idx(mi, g);
                }
                TriangleKind::Dual => k = set(k, t.edge, l_action(get(k, t.edge), t.plus, h)),
            }
        }
        (g == 0).then_some(k)
    }

    /// `F^{h,g}` on a basis configuration.
    pub fn act(&self, config: &[GroupElement], h: GroupElement, g: GroupElement) -> Option<Vec<GroupElement>> {
        let key = super::state::pack(config);
        self.act_packed(key, h.index() as u8, g.index() as u8)
            .map(|k| super::state::unpack(k, config.len()))
    }

    fn endpoint_vertices(&self) -> [Vertex; 2] {
        [self.start.vertex, self.end().vertex]
    }
}

fn separating_edge(lattice: &Lattice, p: (i64, i64), q: (i64, i64)) -> Option<usize> {
    let (a, b) = if (p.0, p.1) <= (q.0, q.1) { (p, q) } else { (q, p) };
    if a.1 == b.1 && b.0 == a.0 + 1 && b.0 >= 0 && a.1 >= 0 {
        lattice.v_edge(b.0 as usize, a.1 as usize)
    } else if a.0 == b.0 && b.1 == a.1 + 1 && b.1 >= 0 && a.0 >= 0 {
        lattice.h_edge(a.0 as usize, b.1 as usize)
    } else {
        None
    }
}

/// Linear combination `Σ coeff · F^{h,g}` defining `F^{R,C;u,v}`:
/// `(|R|/|Z(C)|) Σ_{n ∈ Z(C)} Γ^R_{jj'}(n) F^{c, τ_c n τ̄_{c'}}` with
/// `u = (c, j)` and `v = (c', j')` given as positions in the irrep basis.
pub fn anyon_ribbon_terms(
    anyon: Anyon,
    u: usize,
    v: usize,
) -> Result<Vec<(GroupElement, GroupElement, C64)>, LatticeError> {
    let basis = anyon.basis();
    let dim = basis.len();
    for index in [u, v] {
        if index >= dim {
            return Err(LatticeError::InvalidLocalIndex { anyon, index, dim });
        }
    }
    let (bu, bv) = (basis[u], basis[v]);
    let class = anyon.class();
    let irrep = anyon.irrep();
    let pref = irrep.dim() as f64 / class.centralizer().len() as f64;
    let mut out = Vec::new();
    for &n in class.centralizer() {
        let gamma = irrep.matrix(n).expect("centralizer element")[(bu.j, bv.j)];
        if gamma.norm() < 1e-15 {
            continue;
        }
        let g = class.tau(bu.c) * n * class.tau(bv.c).inv();
        out.push((bu.c, g, gamma * pref));
    }
    Ok(out)
}

/// Branch chosen by a maximally mixed anyon ribbon.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnyonRibbonOutcome {
    pub u: usize,
    pub v: usize,
    pub probability: f64,
}

impl LatticeState {
    /// Applies `F^{h,g}_ρ`.
    pub fn apply_ribbon(&mut self, ribbon: &Ribbon, h: GroupElement, g: GroupElement) {
        self.apply_ribbon_combination(ribbon, &[(h, g, C64::new(1.0, 0.0))]);
    }

    /// Applies `Σ coeff · F^{h,g}_ρ`.
    pub fn apply_ribbon_combination(&mut self, ribbon: &Ribbon, terms: &[(GroupElement, GroupElement, C64)]) {
        self.require_free(&ribbon.endpoint_vertices());
        let packed: Vec<(u8, u8, C64)> =
            terms.iter().map(|&(h, g, c)| (h.index() as u8, g.index() as u8, c)).collect();
        self.map_linear(|k, out| {
            for &(h, g, c) in &packed {
                if let Some(k2) = ribbon.act_packed(k, h, g) {
                    out.push((k2, c));
                }
            }
        });
    }

    /// Applies `F^{R,C;u,v}_ρ` and renormalizes.
    pub fn apply_anyon_ribbon(&mut self, ribbon: &Ribbon, anyon: Anyon, u: usize, v: usize) -> Result<f64, LatticeError> {
        let terms = anyon_ribbon_terms(anyon, u, v)?;
        let before = self.norm_sqr();
        self.apply_ribbon_combination(ribbon, &terms);
        let after = self.norm_sqr();
        if after < 1e-24 {
            return Err(LatticeError::AnnihilationImpossible { anyon });
        }
        self.normalize()?;
        Ok(after / before)
    }

    /// Squared norms `‖F^{R,C;u,v}ψ‖²` of every local-index branch.
    pub fn anyon_ribbon_branches(&self, ribbon: &Ribbon, anyon: Anyon) -> Vec<((usize, usize), LatticeState, f64)> {
        let d = anyon.dim();
        let mut out = Vec::with_capacity(d * d);
        for u in 0..d {
            for v in 0..d {
                let mut s = self.clone();
                let terms = anyon_ribbon_terms(anyon, u, v).expect("indices within the irrep");
                s.apply_ribbon_combination(ribbon, &terms);
                let w = s.norm_sqr();
                out.push(((u, v), s, w));
            }
        }
        out
    }

    /// Maximally mixed anyon ribbon, unravelled as a trajectory: samples a
    /// branch `(u, v)` with probability proportional to `‖F^{R,C;u,v}ψ‖²` and
    /// keeps the renormalized branch.
    pub fn apply_anyon_ribbon_mixed<R: Rng + ?Sized>(
        &mut self,
        ribbon: &Ribbon,
        anyon: Anyon,
        rng: &mut R,
    ) -> Result<AnyonRibbonOutcome, LatticeError> {
        let branches = self.anyon_ribbon_branches(ribbon, anyon);
        let total: f64 = branches.iter().map(|b| b.2).sum();
        if total < 1e-24 {
            return Err(LatticeError::AnnihilationImpossible { anyon });
        }
        let dist: BTreeMap<usize, f64> = branches.iter().enumerate().map(|(i, b)| (i, b.2 / total)).collect();
        let pick = crate::fusion_sim::sample(&dist, rng);
        let ((u, v), mut state, w) = branches.into_iter().nth(pick).expect("sampled index exists");
        state.normalize()?;
        *self = state;
        Ok(AnyonRibbonOutcome { u, v, probability: w / total })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Representation;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn random_plain(lattice: &Lattice, edges: &[usize], seed: u64) -> LatticeState {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = edges.len() as u32;
        let terms = (0..6usize.pow(n)).map(|mut idx| {
            let mut c = vec![GroupElement::E; lattice.edge_count()];
            for &e in edges {
                c[e] = GroupElement::from_index(idx % 6);
                idx /= 6;
            }
            (c, C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        });
        LatticeState::from_terms(lattice, terms).unwrap()
    }

    #[test]
    fn shortest_ribbons_have_expected_triangles() {
        let lat = Lattice::new(2, 2).unwrap();
        let rh = Ribbon::shortest(&lat, Site::new(0, 1), RibbonDirection::Horizontal).unwrap();
        let t = rh.triangles();
        assert_eq!((t[0].kind, t[0].edge, t[0].plus), (TriangleKind::Direct, lat.h_edge(0, 1).unwrap(), true));
        assert_eq!((t[1].kind, t[1].edge, t[1].plus), (TriangleKind::Dual, lat.v_edge(1, 1).unwrap(), true));
        assert_eq!(rh.end().site(), Some(Site::new(1, 1)));
        let rv = Ribbon::shortest(&lat, Site::new(0, 1), RibbonDirection::Vertical).unwrap();
        let t = rv.triangles();
        assert_eq!((t[0].kind, t[0].edge, t[0].plus), (TriangleKind::Dual, lat.h_edge(0, 1).unwrap(), true));
        assert_eq!((t[1].kind, t[1].edge, t[1].plus), (TriangleKind::Direct, lat.v_edge(0, 0).unwrap(), false));
        assert_eq!(rv.end().site(), Some(Site::new(0, 0)));
        assert!(Ribbon::shortest(&lat, Site::new(1, 0), RibbonDirection::Horizontal).is_err());
        assert!(Ribbon::shortest(&lat, Site::new(0, 0), RibbonDirection::Vertical).is_err());
    }

    #[test]
    fn shortest_ribbon_matches_t_then_l() {
        // ρ_h: F^{h,g} = T^g_+ on edge 1 and L^{ḡhg}_+ on edge 2.
        let lat = Lattice::new(2, 1).unwrap();
        let rh = Ribbon::shortest(&lat, Site::new(0, 0), RibbonDirection::Horizontal).unwrap();
        let (e1, e2) = (rh.edges()[0], rh.edges()[1]);
        for h in GroupElement::all() {
            for g in GroupElement::all() {
                for x1 in GroupElement::all() {
                    let mut c = vec![GroupElement::MU; lat.edge_count()];
                    c[e1] = x1;
                    let got = rh.act(&c, h, g);
                    if x1 != g {
                        assert!(got.is_none());
                    } else {
                        let mut want = c.clone();
                        want[e2] = h.conj_by(g.inv()) * c[e2];
                        assert_eq!(got, Some(want));
                    }
                }
            }
        }
    }

    #[test]
    fn single_direct_triangle_is_a_projector() {
        let lat = Lattice::new(1, 1).unwrap();
        let points = [
            SitePoint::of_site(Site::new(0, 0)),
            SitePoint::new(Vertex::new(1, 0), (0, 0)),
        ];
        let r = Ribbon::from_points(&lat, &points).unwrap();
        let psi = random_plain(&lat, &[0, 1], 3);
        let mut once = psi.clone();
        once.apply_ribbon(&r, GroupElement::E, GroupElement::E);
        let mut twice = once.clone();
        twice.apply_ribbon(&r, GroupElement::E, GroupElement::E);
        assert!(once.distance(&twice).unwrap() < 1e-12);
        assert!(once.distance(&psi).unwrap() > 0.1);
        assert!((once.norm_sqr() - psi.norm_sqr()).abs() > 0.01);
    }

    #[test]
    fn gluing_rule_holds_on_three_triangle_ribbon() {
        let lat = Lattice::new(2, 2).unwrap();
        let points = [
            SitePoint::of_site(Site::new(0, 1)),
            SitePoint::new(Vertex::new(1, 1), (0, 1)),
            SitePoint::of_site(Site::new(1, 1)),
            SitePoint::new(Vertex::new(2, 1), (1, 1)),
        ];
        let r = Ribbon::from_points(&lat, &points).unwrap();
        assert_eq!(r.len(), 3);
        let psi = random_plain(&lat, &r.edges(), 11);
        for at in 1..3 {
            let (r1, r2) = r.split(at);
            for h in GroupElement::all() {
                for g in GroupElement::all() {
                    let mut whole = psi.clone();
                    whole.apply_ribbon(&r, h, g);
                    let mut glued = psi.clone();
                    glued.scale(C64::default());
                    for m in GroupElement::all() {
                        let mut part = psi.clone();
                        part.apply_ribbon(&r2, h.conj_by(m.inv()), m.inv() * g);
                        part.apply_ribbon(&r1, h, m);
                        for (c, a) in part.stored_terms() {
                            glued.terms.entry(super::super::state::pack(&c)).and_modify(|x| *x += a).or_insert(a);
                        }
                    }
                    assert!(whole.distance(&glued).unwrap() < 1e-12, "split {at}, h={h}, g={g}");
                }
            }
        }
    }

    /// Six-triangle ribbon `T L T L L T` from site (0,1) to site (2,0) on a
    /// 3×2 lattice.
    fn six_triangle_ribbon(lat: &Lattice) -> Ribbon {
        let pts = [
            SitePoint::of_site(Site::new(0, 1)),
            SitePoint::new(Vertex::new(1, 1), (0, 1)),
            SitePoint::new(Vertex::new(1, 1), (1, 1)),
            SitePoint::new(Vertex::new(2, 1), (1, 1)),
            SitePoint::new(Vertex::new(2, 1), (2, 1)),
            SitePoint::new(Vertex::new(2, 1), (2, 0)),
            SitePoint::of_site(Site::new(2, 0)),
        ];
        Ribbon::from_points(lat, &pts).unwrap()
    }

    #[test]
    fn six_triangle_example_matches_explicit_sum() {
        let lat = Lattice::new(3, 2).unwrap();
        let r = six_triangle_ribbon(&lat);
        let kinds: Vec<TriangleKind> = r.triangles().iter().map(|t| t.kind).collect();
        use TriangleKind::*;
        assert_eq!(kinds, vec![Direct, Dual, Direct, Dual, Dual, Direct]);
        let edges = r.edges();
        let t = r.triangles();
        // Dense vector over the six support edges, base-6 index in edge order.
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let dense: Vec<C64> =
            (0..6usize.pow(6)).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let decode = |mut i: usize| -> Vec<GroupElement> {
            (0..6)
                .map(|_| {
                    let g = GroupElement::from_index(i % 6);
                    i /= 6;
                    g
                })
                .collect()
        };
        let encode = |c: &[GroupElement]| c.iter().rev().fold(0, |acc, g| acc * 6 + g.index());
        let psi = LatticeState::from_terms(
            &lat,
            dense.iter().enumerate().map(|(i, &a)| {
                let local = decode(i);
                let mut c = vec![GroupElement::E; lat.edge_count()];
                for (slot, &e) in edges.iter().enumerate() {
                    c[e] = local[slot];
                }
                (c, a)
            }),
        )
        .unwrap();
        let l = |x: GroupElement, plus: bool, g: GroupElement| if plus { g * x } else { x * g.inv() };
        let tpass = |x: GroupElement, plus: bool, h: GroupElement| if plus { x == h } else { x == h.inv() };
        for h in GroupElement::all() {
            for g in [GroupElement::E, GroupElement::MU, GroupElement::MU_SIGMA] {
                // Σ_{g1 g2 g3 = g} T^{g1} L^{ḡ1 h g1} T^{g2} L^{(g1g2)⁻¹h(g1g2)} L^{…} T^{g3}
                let mut out = vec![C64::default(); dense.len()];
                for (i, &a) in dense.iter().enumerate() {
                    let x = decode(i);
                    for g1 in GroupElement::all() {
                        for g2 in GroupElement::all() {
                            let g3 = (g1 * g2).inv() * g;
                            let h1 = h.conj_by(g1.inv());
                            let h2 = h.conj_by((g1 * g2).inv());
                            if !(tpass(x[0], t[0].plus, g1) && tpass(x[2], t[2].plus, g2) && tpass(x[5], t[5].plus, g3)) {
                                continue;
                            }
                            let mut y = x.clone();
                            y[1] = l(y[1], t[1].plus, h1);
                            y[3] = l(y[3], t[3].plus, h2);
                            y[4] = l(y[4], t[4].plus, h2);
                            out[encode(&y)] += a;
                        }
                    }
                }
                let mut got = psi.clone();
                got.apply_ribbon(&r, h, g);
                let mut err: f64 = 0.0;
                for (i, &want) in out.iter().enumerate() {
                    let local = decode(i);
                    let mut c = vec![GroupElement::E; lat.edge_count()];
                    for (slot, &e) in edges.iter().enumerate() {
                        c[e] = local[slot];
                    }
                    err = err.max((got.amplitude(&c) - want).norm());
                }
                assert!(err < 1e-12, "h={h} g={g} err={err}");
                assert!(got.term_count() <= psi.term_count());
            }
        }
    }

    #[test]
    fn vacuum_ribbon_is_identity() {
        let lat = Lattice::new(2, 1).unwrap();
        let r = Ribbon::shortest(&lat, Site::new(0, 0), RibbonDirection::Horizontal).unwrap();
        let psi = random_plain(&lat, &r.edges(), 2);
        let mut out = psi.clone();
        let terms = anyon_ribbon_terms(Anyon::A, 0, 0).unwrap();
        out.apply_ribbon_combination(&r, &terms);
        // The prefactor |R|/|Z(C)| = 1/6 makes the vacuum operator a multiple
        // of the identity; after renormalization it leaves every state alone.
        let mut sixth = psi.clone();
        sixth.scale(C64::new(1.0 / 6.0, 0.0));
        assert!(out.distance(&sixth).unwrap() < 1e-12);
        let mut normalized = psi.clone();
        normalized.normalize().unwrap();
        let mut created = normalized.clone();
        created.apply_anyon_ribbon(&r, Anyon::A, 0, 0).unwrap();
        assert!(created.distance(&normalized).unwrap() < 1e-12);
    }

    #[test]
    fn invalid_local_index_is_rejected() {
        assert!(matches!(
            anyon_ribbon_terms(Anyon::D, 3, 0),
            Err(LatticeError::InvalidLocalIndex { dim: 3, .. })
        ));
    }

    #[test]
    fn ribbons_keep_the_gauge_fixed_form_exact() {
        let lat = Lattice::new(2, 1).unwrap();
        let fixed = LatticeState::ground_state(&lat).unwrap();
        let r = Ribbon::shortest(&lat, Site::new(0, 0), RibbonDirection::Horizontal).unwrap();
        let mut a = fixed.clone();
        a.apply_ribbon(&r, GroupElement::MU, GroupElement::SIGMA);
        assert_eq!(a.representation(), Representation::BoundaryGaugeFixed);
        let mut b = fixed.to_plain();
        b.apply_ribbon(&r, GroupElement::MU, GroupElement::SIGMA);
        assert!(a.to_plain().distance(&b).unwrap() < 1e-10);
    }
}
