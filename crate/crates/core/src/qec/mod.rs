//! Error correction in the anyon-configuration picture.
//!
//! A single-edge Pauli error on the ground state is converted by `M_K` into
//! a deterministic pattern of anyons on the (at most three) sites touching
//! the edge. A greedy nearest-neighbour decoder pairs the observed anyons,
//! and recovery pushes the charge of one partner into the other along a
//! path of shortest ribbons, using only ribbons and `M_K`.
//!
//! Two levels are provided:
//!
//! * microscopic: the lattice state is simulated exactly (desk-scale
//!   lattices only);
//! * phenomenological: only anyon letters on a site grid are tracked, and
//!   every fusion is sampled from `N^γ_{αβ} d_γ / (d_α d_β)`. This drops
//!   coherent fusion-space information and is therefore lossy.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{Anyon, ANYONS};
use crate::category::CategoryData;
use crate::lattice::{
    AnyonConfiguration, EdgePauli, Lattice, LatticeError, LatticeState, Orientation, Site,
};
use crate::protocols::{push_charge, ProtocolError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QecError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error("error rate {0} is outside [0, 1]")]
    InvalidRate(f64),
    #[error("Pauli weights must be non-negative and sum to 1, got {0:?}")]
    InvalidWeights([f64; 6]),
    #[error("grid must be at least 1×1")]
    EmptyGrid,
}

/// Independent single-edge Pauli noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseModel {
    /// Probability that an edge suffers an error in one round.
    pub p: f64,
    /// Relative weights of `X, Z, Y, X̂, Ẑ, X̂Ẑ` (in [`EdgePauli::NONTRIVIAL`] order).
    pub weights: [f64; 6],
}

impl NoiseModel {
    pub fn new(p: f64, weights: [f64; 6]) -> Result<Self, QecError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(QecError::InvalidRate(p));
        }
        if weights.iter().any(|&w| w < 0.0) || (weights.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(QecError::InvalidWeights(weights));
        }
        Ok(NoiseModel { p, weights })
    }

    /// All six error kinds equally likely.
    pub fn uniform(p: f64) -> Result<Self, QecError> {
        Self::new(p, [1.0 / 6.0; 6])
    }

    /// Samples the error on one edge (`None` for no error).
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<EdgePauli> {
        if self.p == 0.0 || rng.gen::<f64>() >= self.p {
            return None;
        }
        let mut u = rng.gen::<f64>();
        for (i, &w) in self.weights.iter().enumerate() {
            if u < w {
                return Some(EdgePauli::NONTRIVIAL[i]);
            }
            u -= w;
        }
        Some(EdgePauli::NONTRIVIAL[5])
    }
}

/// `M_K` outcome distribution at every site that is not certainly vacuum.
pub type SiteDistributions = Vec<(Site, BTreeMap<Anyon, f64>)>;

fn nonvacuum_distributions(state: &LatticeState) -> Result<SiteDistributions, QecError> {
    let lat = state.lattice();
    let mut out = Vec::new();
    for s in lat.sites() {
        let dist = state.site_distribution(s)?;
        if dist.get(&Anyon::A).is_some_and(|&p| (p - 1.0).abs() < 1e-9) {
            continue;
        }
        out.push((s, dist));
    }
    Ok(out)
}

/// `M_K` outcome distributions after a single Pauli error on `edge` of the
/// ground state, computed by exact lattice simulation. Sites that stay
/// vacuum with certainty are omitted.
pub fn pauli_syndrome(lattice: &Lattice, edge: usize, pauli: EdgePauli) -> Result<SiteDistributions, QecError> {
    let mut state = LatticeState::ground_state(lattice)?;
    state.apply_pauli(edge, pauli);
    nonvacuum_distributions(&state)
}

/// Most likely letter and its probability.
fn modal(dist: &BTreeMap<Anyon, f64>) -> (Anyon, f64) {
    dist.iter().max_by(|a, b| a.1.total_cmp(b.1)).map(|(&a, &p)| (a, p)).expect("non-empty distribution")
}

/// One row of the single-error syndrome table for a horizontal edge: `s₁`
/// is the site above the edge, `s₂` the site whose vertex is the edge's
/// start, `s₃` the site whose vertex is its end. Each entry is the most
/// likely `M_K` letter with its probability.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SyndromeRow {
    pub pauli: EdgePauli,
    pub letters: [Anyon; 3],
    pub probabilities: [f64; 3],
}

impl SyndromeRow {
    /// Every entry occurs with certainty.
    pub fn is_deterministic(&self) -> bool {
        self.probabilities.iter().all(|&p| (p - 1.0).abs() < 1e-9)
    }
}

/// Reference geometry: the horizontal edge `h(0,1)` of a 2×2 lattice, with
/// `s₁ = (0,0)`, `s₂ = (0,1)`, `s₃ = (1,1)`.
///
/// `X = L^σ_-` acts on the end vertex by a single group element; the charge
/// it leaves there has weight `(d_R/6)(χ_R(e) + χ_R(σ))` on irrep `R`, so
/// `s₃` reads `C` with probability 2/3 and `A` (for `Y`: `B`) with 1/3. All
/// other entries are certain.
pub fn syndrome_table() -> Result<Vec<SyndromeRow>, QecError> {
    let lat = Lattice::new(2, 2)?;
    let edge = lat.h_edge(0, 1).expect("edge of the 2×2 lattice");
    let sites = [Site::new(0, 0), Site::new(0, 1), Site::new(1, 1)];
    EdgePauli::NONTRIVIAL
        .iter()
        .map(|&pauli| {
            let mut state = LatticeState::ground_state(&lat)?;
            state.apply_pauli(edge, pauli);
            let mut row = SyndromeRow { pauli, letters: [Anyon::A; 3], probabilities: [1.0; 3] };
            for (i, &s) in sites.iter().enumerate() {
                let (a, p) = modal(&state.site_distribution(s)?);
                row.letters[i] = a;
                row.probabilities[i] = p;
            }
            Ok(row)
        })
        .collect()
}

/// Anyon distributions created by a Pauli, as offsets `(dx, dy)` from the
/// site whose vertex is the edge's start.
pub type SyndromePattern = Vec<((i64, i64), BTreeMap<Anyon, f64>)>;

/// Relative pattern of every Pauli on a horizontal or vertical edge,
/// derived once by simulation on a 2×2 lattice (edges `h(0,1)` and
/// `v(1,0)`, whose neighbourhoods lie inside the lattice).
pub fn pauli_to_anyons(orientation: Orientation, pauli: EdgePauli) -> Result<SyndromePattern, QecError> {
    type Table = BTreeMap<(bool, EdgePauli), SyndromePattern>;
    static TABLE: OnceLock<Result<Table, QecError>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let lat = Lattice::new(2, 2)?;
        let mut out = BTreeMap::new();
        for (horizontal, edge, origin) in [
            (true, lat.h_edge(0, 1).expect("edge"), (0i64, 1i64)),
            (false, lat.v_edge(1, 0).expect("edge"), (1, 0)),
        ] {
            for pauli in EdgePauli::NONTRIVIAL {
                let pattern = pauli_syndrome(&lat, edge, pauli)?
                    .into_iter()
                    .map(|(s, d)| ((s.x as i64 - origin.0, s.y as i64 - origin.1), d))
                    .collect();
                out.insert((horizontal, pauli), pattern);
            }
        }
        Ok(out)
    });
    if pauli == EdgePauli::I {
        return Ok(Vec::new());
    }
    let table = table.as_ref().map_err(Clone::clone)?;
    Ok(table[&(orientation == Orientation::Horizontal, pauli)].clone())
}

/// A decoded pair: the charge at `from` is pushed along `path` into `to`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FusionPath {
    pub from: Site,
    pub to: Site,
    /// Sites from `from` to `to` inclusive, first horizontally then
    /// vertically.
    pub path: Vec<Site>,
}

fn manhattan(a: Site, b: Site) -> usize {
    a.x.abs_diff(b.x) + a.y.abs_diff(b.y)
}

fn row_major(s: Site) -> (usize, usize) {
    (s.y, s.x)
}

fn l_path(a: Site, b: Site) -> Vec<Site> {
    let mut path = vec![a];
    let mut cur = a;
    while cur.x != b.x {
        cur.x = if b.x > cur.x { cur.x + 1 } else { cur.x - 1 };
        path.push(cur);
    }
    while cur.y != b.y {
        cur.y = if b.y > cur.y { cur.y + 1 } else { cur.y - 1 };
        path.push(cur);
    }
    path
}

/// Greedy matching of the non-trivial sites: repeatedly pairs the closest
/// two (Manhattan distance, ties broken by row-major order of the pair). An
/// odd anyon out stays unmatched.
pub fn decode_greedy(config: &AnyonConfiguration) -> Vec<FusionPath> {
    let mut open: Vec<Site> = config.nontrivial().into_iter().map(|(s, _)| s).collect();
    let mut out = Vec::new();
    while open.len() >= 2 {
        let mut best: Option<(usize, (usize, usize), (usize, usize), usize, usize)> = None;
        for i in 0..open.len() {
            for j in (i + 1)..open.len() {
                let key = (manhattan(open[i], open[j]), row_major(open[i]), row_major(open[j]), i, j);
                if best.is_none_or(|b| (key.0, key.1, key.2) < (b.0, b.1, b.2)) {
                    best = Some(key);
                }
            }
        }
        let (_, _, _, i, j) = best.expect("at least one pair");
        let (a, b) = (open[i], open[j]);
        out.push(FusionPath { from: a, to: b, path: l_path(a, b) });
        open.remove(j);
        open.remove(i);
    }
    out
}

/// Edges on which the microscopic simulator injects noise: both endpoints
/// are site vertices, so the gauge-fixed representation stays exact.
pub fn bulk_edges(lattice: &Lattice) -> Vec<usize> {
    lattice
        .edges()
        .iter()
        .filter(|e| lattice.is_site_vertex(e.start) && lattice.is_site_vertex(e.end))
        .map(|e| e.id)
        .collect()
}

/// Recovery bookkeeping of one decoding pass.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovery {
    pub actions: Vec<FusionPath>,
    /// `M_K` rounds spent inside the recovery.
    pub mk_rounds: usize,
    /// Pairs whose push exhausted the budget.
    pub incomplete: usize,
}

/// Pushes every decoded pair together on the lattice.
pub fn recover<R: Rng + ?Sized>(
    state: &mut LatticeState,
    config: &AnyonConfiguration,
    budget: usize,
    rng: &mut R,
) -> Result<Recovery, QecError> {
    let actions = decode_greedy(config);
    let mut rec = Recovery { actions: actions.clone(), mk_rounds: 0, incomplete: 0 };
    for fp in &actions {
        for w in fp.path.windows(2) {
            let r = push_charge(state, w[0], w[1], budget, rng)?;
            rec.mk_rounds += r.rounds;
            if !r.cleared {
                rec.incomplete += 1;
                break;
            }
        }
    }
    Ok(rec)
}

/// Report of one microscopic round.
#[derive(Clone, Debug, PartialEq)]
pub struct CycleRecord {
    pub round: usize,
    pub injected: Vec<(usize, EdgePauli)>,
    pub syndrome: AnyonConfiguration,
    pub recovery: Recovery,
    /// Non-trivial anyons left after recovery (by a fresh `M_K`).
    pub residual: usize,
    /// `|⟨Ω|ψ⟩|²` after recovery.
    pub fidelity: f64,
}

/// Microscopic error-correction loop starting from `|Ω⟩`: per round,
/// inject noise on the bulk edges, measure `M_K`, decode, recover.
pub fn qec_cycle_micro<R: Rng + ?Sized>(
    lattice: &Lattice,
    noise: &NoiseModel,
    rounds: usize,
    budget: usize,
    rng: &mut R,
) -> Result<Vec<CycleRecord>, QecError> {
    let omega = LatticeState::ground_state(lattice)?;
    let mut state = omega.clone();
    let edges = bulk_edges(lattice);
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let injected: Vec<(usize, EdgePauli)> =
            edges.iter().filter_map(|&e| noise.sample(rng).map(|p| (e, p))).collect();
        for &(e, p) in &injected {
            state.apply_pauli(e, p);
        }
        let syndrome = state.measure_mk(rng)?;
        let recovery = recover(&mut state, &syndrome, budget, rng)?;
        let after = state.measure_mk(rng)?;
        out.push(CycleRecord {
            round,
            injected,
            syndrome,
            recovery,
            residual: after.nontrivial().len(),
            fidelity: state.fidelity(&omega)?,
        });
    }
    Ok(out)
}

/// Anyon letters on a `width × height` site grid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PhenomenologicalGrid {
    width: usize,
    height: usize,
    cells: Vec<Anyon>,
}

impl PhenomenologicalGrid {
    pub fn new(width: usize, height: usize) -> Result<Self, QecError> {
        if width == 0 || height == 0 {
            return Err(QecError::EmptyGrid);
        }
        Ok(PhenomenologicalGrid { width, height, cells: vec![Anyon::A; width * height] })
    }

    pub fn get(&self, s: Site) -> Anyon {
        self.cells[s.y * self.width + s.x]
    }

    fn set(&mut self, s: Site, a: Anyon) {
        self.cells[s.y * self.width + s.x] = a;
    }

    pub fn nontrivial_count(&self) -> usize {
        self.cells.iter().filter(|&&a| a != Anyon::A).count()
    }

    /// Letters as an [`AnyonConfiguration`].
    pub fn configuration(&self) -> AnyonConfiguration {
        let mut c = AnyonConfiguration::new(self.width, self.height);
        for y in 0..self.height {
            for x in 0..self.width {
                c.set(Site::new(x, y), self.get(Site::new(x, y)));
            }
        }
        c
    }

    /// Fuses `a` into site `s`, sampling the outcome.
    fn deposit<R: Rng + ?Sized>(&mut self, s: Site, a: Anyon, rng: &mut R) {
        let current = self.get(s);
        let fused = sample_fusion(current, a, rng);
        self.set(s, fused);
    }
}

/// Samples `γ ∈ α × β` with probability `N^γ_{αβ} d_γ / (d_α d_β)`.
pub fn sample_fusion<R: Rng + ?Sized>(alpha: Anyon, beta: Anyon, rng: &mut R) -> Anyon {
    let cat = CategoryData::ds3();
    let dist: BTreeMap<Anyon, f64> = ANYONS
        .iter()
        .map(|&g| (g, cat.fusion_probability(alpha, beta, g)))
        .filter(|&(_, p)| p > 0.0)
        .collect();
    crate::fusion_sim::sample(&dist, rng)
}

/// Report of one phenomenological round.
#[derive(Clone, Debug, PartialEq)]
pub struct PhenomenologicalRecord {
    pub round: usize,
    pub errors: usize,
    /// Non-trivial anyons seen by the syndrome measurement.
    pub syndrome_count: usize,
    pub pairs: usize,
    /// Non-trivial anyons left after recovery; they are re-enqueued for the
    /// next round.
    pub residual: usize,
}

/// Phenomenological loop on a site grid: every edge of the matching
/// lattice errs with the noise model, depositing its `M_K` pattern (sites
/// outside the grid are dropped); the greedy decoder pairs anyons and each
/// pair is fused by walking the charge along its path, sampling every
/// intermediate fusion.
pub fn qec_cycle_phenomenological<R: Rng + ?Sized>(
    width: usize,
    height: usize,
    noise: &NoiseModel,
    rounds: usize,
    rng: &mut R,
) -> Result<Vec<PhenomenologicalRecord>, QecError> {
    let mut grid = PhenomenologicalGrid::new(width, height)?;
    let lat_edges: Vec<(Orientation, (i64, i64))> = {
        let mut v = Vec::new();
        for y in 0..=height {
            for x in 0..width {
                v.push((Orientation::Horizontal, (x as i64, y as i64)));
            }
        }
        for y in 0..height {
            for x in 0..=width {
                v.push((Orientation::Vertical, (x as i64, y as i64)));
            }
        }
        v
    };
    let mut out = Vec::with_capacity(rounds);
    for round in 1..=rounds {
        let mut errors = 0;
        for &(orientation, (ex, ey)) in &lat_edges {
            let Some(pauli) = noise.sample(rng) else { continue };
            errors += 1;
            for ((dx, dy), dist) in pauli_to_anyons(orientation, pauli)? {
                let (x, y) = (ex + dx, ey + dy);
                if x >= 0 && y >= 0 && (x as usize) < width && (y as usize) < height {
                    let a = crate::fusion_sim::sample(&dist, rng);
                    grid.deposit(Site::new(x as usize, y as usize), a, rng);
                }
            }
        }
        let syndrome = grid.configuration();
        let actions = decode_greedy(&syndrome);
        for fp in &actions {
            for w in fp.path.windows(2) {
                let charge = grid.get(w[0]);
                if charge == Anyon::A {
                    break;
                }
                grid.set(w[0], Anyon::A);
                grid.deposit(w[1], charge, rng);
            }
        }
        out.push(PhenomenologicalRecord {
            round,
            errors,
            syndrome_count: syndrome.nontrivial().len(),
            pairs: actions.len(),
            residual: grid.nontrivial_count(),
        });
    }
    Ok(out)
}
