//! Anyonic states as superpositions of labeled fusion trees, with F-moves,
//! braids, charge measurements and fusions, plus the remote-measurement and
//! merge/split protocols built on them.
//!
//! A tree node `Node(l, r, c)` fuses the total charges of `l` and `r` into `c`.
//! A node is addressed by a path of [`Side`]s from the root. Every tree of a
//! state shares the same shape and leaf labels; only internal charges differ.

mod merge;
mod remote;

pub use merge::{merge_qutrits, merge_separated, merged_from_logical, split_qutrit, two_qutrit_logical};
pub use remote::{
    interferometer, literal_interferometry_amplitude, measure_ma, measure_ma_at, measure_mu, measure_mu_once, project_u,
    project_u_perp,
};

use std::collections::BTreeMap;
use std::fmt;

use rand::Rng;
use thiserror::Error;

use crate::algebra::{Anyon, C64};
use crate::category::CategoryData;

const PRUNE: f64 = 1e-14;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("path {0:?} does not address a node of the required shape")]
    Shape(Vec<Side>),
    #[error("node at {0:?} is not a pair of leaves")]
    NotLeafPair(Vec<Side>),
    #[error("leaves {0} and {1} are not siblings")]
    NotAdjacent(usize, usize),
    #[error("trees of a state must share leaves, shape and root charge")]
    Signature,
    #[error("vertex {a} × {b} → {c} is not admissible")]
    Inadmissible { a: Anyon, b: Anyon, c: Anyon },
    #[error("state has zero norm")]
    Empty,
    #[error("state is not supported on the required space: {0}")]
    OutsideSpace(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Left,
    Right,
}

/// Over: counterclockwise exchange, amplitude `R^{ab}_c`. Under: its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Crossing {
    Over,
    Under,
}

/// Direction of an F-move at a node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Assoc {
    /// `((a b)_e c)_d → Σ_f [F^{abc}_d]_{ef} (a (b c)_f)_d`
    LeftToRight,
    /// `(a (b c)_f)_d → Σ_e conj([F^{abc}_d]_{ef}) ((a b)_e c)_d`
    RightToLeft,
}

/// A labeled binary fusion tree.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Tree {
    Leaf(Anyon),
    Node(Box<Tree>, Box<Tree>, Anyon),
}

impl Tree {
    pub fn leaf(a: Anyon) -> Tree {
        Tree::Leaf(a)
    }

    pub fn node(l: Tree, r: Tree, c: Anyon) -> Tree {
        Tree::Node(Box::new(l), Box::new(r), c)
    }

    /// `((D D)_x (D D)_y)_G`, the basis state `|xy⟩` of `V^{DDDD}_G`.
    pub fn qutrit(x: Anyon, y: Anyon) -> Tree {
        use Anyon::*;
        Tree::node(Tree::node(Tree::Leaf(D), Tree::Leaf(D), x), Tree::node(Tree::Leaf(D), Tree::Leaf(D), y), G)
    }

    pub fn charge(&self) -> Anyon {
        match self {
            Tree::Leaf(a) => *a,
            Tree::Node(_, _, c) => *c,
        }
    }

    pub fn leaves(&self) -> Vec<Anyon> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves(&self, out: &mut Vec<Anyon>) {
        match self {
            Tree::Leaf(a) => out.push(*a),
            Tree::Node(l, r, _) => {
                l.collect_leaves(out);
                r.collect_leaves(out);
            }
        }
    }

    /// Shape with every label erased, for signature comparisons.
    pub fn shape(&self) -> String {
        match self {
            Tree::Leaf(_) => "*".into(),
            Tree::Node(l, r, _) => format!("({} {})", l.shape(), r.shape()),
        }
    }

    pub fn at(&self, path: &[Side]) -> Option<&Tree> {
        match (path.split_first(), self) {
            (None, t) => Some(t),
            (Some((Side::Left, rest)), Tree::Node(l, _, _)) => l.at(rest),
            (Some((Side::Right, rest)), Tree::Node(_, r, _)) => r.at(rest),
            _ => None,
        }
    }

    /// Rebuilds the tree with the subtree at `path` replaced by each of the
    /// weighted alternatives returned by `f`.
    fn rewrite(
        &self,
        path: &[Side],
        f: &mut dyn FnMut(&Tree) -> Result<Vec<(Tree, C64)>, FusionError>,
    ) -> Result<Vec<(Tree, C64)>, FusionError> {
        match path.split_first() {
            None => f(self),
            Some((side, rest)) => match self {
                Tree::Leaf(_) => Err(FusionError::Shape(path.to_vec())),
                Tree::Node(l, r, c) => {
                    let child = if *side == Side::Left { l } else { r };
                    let subs = child.rewrite(rest, f)?;
                    Ok(subs
                        .into_iter()
                        .map(|(t, a)| {
                            let rebuilt = if *side == Side::Left {
                                Tree::Node(Box::new(t), r.clone(), *c)
                            } else {
                                Tree::Node(l.clone(), Box::new(t), *c)
                            };
                            (rebuilt, a)
                        })
                        .collect())
                }
            },
        }
    }

    /// Checks that every vertex is admissible.
    pub fn is_admissible(&self, cat: &CategoryData) -> bool {
        match self {
            Tree::Leaf(_) => true,
            Tree::Node(l, r, c) => cat.allowed(l.charge(), r.charge(), *c) && l.is_admissible(cat) && r.is_admissible(cat),
        }
    }

    /// Path of the `i`-th leaf (left to right).
    pub fn leaf_path(&self, i: usize) -> Option<Vec<Side>> {
        fn go(t: &Tree, i: &mut usize, path: &mut Vec<Side>) -> bool {
            match t {
                Tree::Leaf(_) => {
                    if *i == 0 {
                        return true;
                    }
                    *i -= 1;
                    false
                }
                Tree::Node(l, r, _) => {
                    path.push(Side::Left);
                    if go(l, i, path) {
                        return true;
                    }
                    path.pop();
                    path.push(Side::Right);
                    if go(r, i, path) {
                        return true;
                    }
                    path.pop();
                    false
                }
            }
        }
        let mut path = Vec::new();
        let mut k = i;
        go(self, &mut k, &mut path).then_some(path)
    }
}

impl fmt::Display for Tree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tree::Leaf(a) => write!(f, "{a}"),
            Tree::Node(l, r, c) => write!(f, "({l} {r})_{c}"),
        }
    }
}

/// A normalized superposition of fusion trees sharing one signature.
#[derive(Clone, Debug)]
pub struct FusionState {
    cat: &'static CategoryData,
    terms: BTreeMap<Tree, C64>,
}

impl PartialEq for FusionState {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl FusionState {
    /// A single basis tree over the D(S3) data.
    pub fn basis(tree: Tree) -> Result<Self, FusionError> {
        Self::from_terms(CategoryData::ds3(), vec![(tree, C64::new(1.0, 0.0))])
    }

    /// A superposition over D(S3); amplitudes are used as given (not normalized).
    pub fn superposition(terms: Vec<(Tree, C64)>) -> Result<Self, FusionError> {
        Self::from_terms(CategoryData::ds3(), terms)
    }

    pub fn from_terms(cat: &'static CategoryData, terms: Vec<(Tree, C64)>) -> Result<Self, FusionError> {
        let mut map = BTreeMap::new();
        let mut sig: Option<(String, Vec<Anyon>, Anyon)> = None;
        for (t, a) in terms {
            if !t.is_admissible(cat) {
                return Err(FusionError::Signature);
            }
            let s = (t.shape(), t.leaves(), t.charge());
            match &sig {
                None => sig = Some(s),
                Some(prev) if *prev != s => return Err(FusionError::Signature),
                _ => {}
            }
            *map.entry(t).or_insert(C64::default()) += a;
        }
        let mut st = FusionState { cat, terms: map };
        st.prune();
        if st.terms.is_empty() {
            return Err(FusionError::Empty);
        }
        Ok(st)
    }

    /// A normalized logical qutrit `Σ c_{xy} |xy⟩`.
    pub fn qutrit(amps: &[(Anyon, Anyon, C64)]) -> Result<Self, FusionError> {
        let mut st = Self::superposition(amps.iter().map(|&(x, y, a)| (Tree::qutrit(x, y), a)).collect())?;
        st.normalize()?;
        Ok(st)
    }

    pub fn category(&self) -> &'static CategoryData {
        self.cat
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Tree, &C64)> {
        self.terms.iter()
    }

    pub fn amplitude(&self, t: &Tree) -> C64 {
        self.terms.get(t).copied().unwrap_or_default()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    fn any_tree(&self) -> &Tree {
        self.terms.keys().next().expect("states are never empty")
    }

    pub fn leaves(&self) -> Vec<Anyon> {
        self.any_tree().leaves()
    }

    pub fn root_charge(&self) -> Anyon {
        self.any_tree().charge()
    }

    pub fn norm(&self) -> f64 {
        self.terms.values().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) -> Result<f64, FusionError> {
        let n = self.norm();
        if n < 1e-300 {
            return Err(FusionError::Empty);
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
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &FusionState) -> C64 {
        self.terms
            .iter()
            .map(|(t, a)| a.conj() * other.amplitude(t))
            .sum()
    }

    /// `|⟨self|other⟩|²` for normalized states.
    pub fn fidelity(&self, other: &FusionState) -> f64 {
        self.inner(other).norm_sqr()
    }

    fn prune(&mut self) {
        self.terms.retain(|_, a| a.norm() > PRUNE);
    }

    fn rewrite_all(
        &self,
        path: &[Side],
        mut f: impl FnMut(&Tree) -> Result<Vec<(Tree, C64)>, FusionError>,
    ) -> Result<Self, FusionError> {
        let mut out: BTreeMap<Tree, C64> = BTreeMap::new();
        for (t, a) in &self.terms {
            for (nt, c) in t.rewrite(path, &mut f)? {
                *out.entry(nt).or_default() += a * c;
            }
        }
        let mut st = FusionState { cat: self.cat, terms: out };
        st.prune();
        if st.terms.is_empty() {
            return Err(FusionError::Empty);
        }
        Ok(st)
    }

    /// Re-associates the node at `path`.
    pub fn f_move(&self, path: &[Side], dir: Assoc) -> Result<Self, FusionError> {
        let cat = self.cat;
        let p = path.to_vec();
        self.rewrite_all(path, |t| {
            let Tree::Node(l, r, d) = t else {
                return Err(FusionError::Shape(p.clone()));
            };
            match dir {
                Assoc::LeftToRight => {
                    let Tree::Node(a, b, e) = l.as_ref() else {
                        return Err(FusionError::Shape(p.clone()));
                    };
                    let (ca, cb, cc) = (a.charge(), b.charge(), r.charge());
                    Ok(cat
                        .right_channels(ca, cb, cc, *d)
                        .into_iter()
                        .map(|f| {
                            let nt = Tree::node((**a).clone(), Tree::node((**b).clone(), (**r).clone(), f), *d);
                            (nt, cat.f(ca, cb, cc, *d, *e, f))
                        })
                        .collect())
                }
                Assoc::RightToLeft => {
                    let Tree::Node(b, c, f) = r.as_ref() else {
                        return Err(FusionError::Shape(p.clone()));
                    };
                    let (ca, cb, cc) = (l.charge(), b.charge(), c.charge());
                    Ok(cat
                        .left_channels(ca, cb, cc, *d)
                        .into_iter()
                        .map(|e| {
                            let nt = Tree::node(Tree::node((**l).clone(), (**b).clone(), e), (**c).clone(), *d);
                            (nt, cat.f(ca, cb, cc, *d, e, *f).conj())
                        })
                        .collect())
                }
            }
        })
    }

    /// Exchanges the two children of the node at `path`.
    pub fn braid(&self, path: &[Side], crossing: Crossing) -> Result<Self, FusionError> {
        let cat = self.cat;
        let p = path.to_vec();
        self.rewrite_all(path, |t| {
            let Tree::Node(l, r, c) = t else {
                return Err(FusionError::Shape(p.clone()));
            };
            let (a, b) = (l.charge(), r.charge());
            let phase = match crossing {
                Crossing::Over => cat.r(a, b, *c),
                Crossing::Under => cat.r(b, a, *c).conj(),
            };
            Ok(vec![(Tree::Node(r.clone(), l.clone(), *c), phase)])
        })
    }

    /// Exchanges leaves `i` and `i + 1`, which must be siblings.
    pub fn braid_leaves(&self, i: usize, crossing: Crossing) -> Result<Self, FusionError> {
        let t = self.any_tree();
        let (Some(p), Some(q)) = (t.leaf_path(i), t.leaf_path(i + 1)) else {
            return Err(FusionError::NotAdjacent(i, i + 1));
        };
        if p.len() != q.len() || p[..p.len() - 1] != q[..q.len() - 1] || p.last() != Some(&Side::Left) {
            return Err(FusionError::NotAdjacent(i, i + 1));
        }
        self.braid(&p[..p.len() - 1], crossing)
    }

    /// Probability of each charge value at the node `path`.
    pub fn charge_distribution(&self, path: &[Side]) -> Result<BTreeMap<Anyon, f64>, FusionError> {
        let mut out = BTreeMap::new();
        for (t, a) in &self.terms {
            let c = t.at(path).ok_or_else(|| FusionError::Shape(path.to_vec()))?.charge();
            *out.entry(c).or_insert(0.0) += a.norm_sqr();
        }
        let total: f64 = out.values().sum();
        for v in out.values_mut() {
            *v /= total;
        }
        Ok(out)
    }

    /// Keeps only trees whose node at `path` carries `charge`, renormalizing.
    /// Returns the probability of that outcome.
    pub fn project_charge(&mut self, path: &[Side], charge: Anyon) -> Result<f64, FusionError> {
        let before = self.norm().powi(2);
        let mut kept = BTreeMap::new();
        for (t, a) in std::mem::take(&mut self.terms) {
            let c = t.at(path).ok_or_else(|| FusionError::Shape(path.to_vec()))?.charge();
            if c == charge {
                kept.insert(t, a);
            }
        }
        self.terms = kept;
        if self.terms.is_empty() {
            return Err(FusionError::Empty);
        }
        let p = self.norm().powi(2) / before;
        self.normalize()?;
        Ok(p)
    }

    /// Samples the total charge at `path` with the Born rule.
    pub fn measure_charge<R: Rng + ?Sized>(&mut self, path: &[Side], rng: &mut R) -> Result<(Anyon, f64), FusionError> {
        let dist = self.charge_distribution(path)?;
        let c = sample(&dist, rng);
        let p = self.project_charge(path, c)?;
        Ok((c, p))
    }

    /// Fuses the two leaves under `path` into a single leaf carrying their
    /// (definite per tree) total charge.
    pub fn fuse_leaves(&self, path: &[Side]) -> Result<Self, FusionError> {
        let p = path.to_vec();
        self.rewrite_all(path, |t| match t {
            Tree::Node(l, r, c) if matches!(**l, Tree::Leaf(_)) && matches!(**r, Tree::Leaf(_)) => {
                Ok(vec![(Tree::Leaf(*c), C64::new(1.0, 0.0))])
            }
            _ => Err(FusionError::NotLeafPair(p.clone())),
        })
    }

    /// Replaces the subtree `S` at `path` by `(S (a a)_A)_s`: a pair of `a`
    /// anyons created from the vacuum right of `S`.
    pub fn create_pair_right(&self, path: &[Side], a: Anyon) -> Result<Self, FusionError> {
        self.rewrite_all(path, |t| {
            let pair = Tree::node(Tree::Leaf(a), Tree::Leaf(a), Anyon::A);
            Ok(vec![(Tree::node(t.clone(), pair, t.charge()), C64::new(1.0, 0.0))])
        })
    }

    /// Splits the leaf at `path` into a pair of leaves `(l r)_c` with unit
    /// amplitude.
    pub fn split_leaf(&self, path: &[Side], l: Anyon, r: Anyon) -> Result<Self, FusionError> {
        let cat = self.cat;
        let p = path.to_vec();
        self.rewrite_all(path, |t| match t {
            Tree::Leaf(c) if cat.allowed(l, r, *c) => {
                Ok(vec![(Tree::node(Tree::Leaf(l), Tree::Leaf(r), *c), C64::new(1.0, 0.0))])
            }
            Tree::Leaf(c) => Err(FusionError::Inadmissible { a: l, b: r, c: *c }),
            _ => Err(FusionError::Shape(p.clone())),
        })
    }

    /// Removes a vacuum leaf that is one child of the node at `path`.
    pub fn drop_vacuum_leaf(&self, path: &[Side]) -> Result<Self, FusionError> {
        let p = path.to_vec();
        self.rewrite_all(path, |t| match t {
            Tree::Node(l, r, _) if **l == Tree::Leaf(Anyon::A) => Ok(vec![((**r).clone(), C64::new(1.0, 0.0))]),
            Tree::Node(l, r, _) if **r == Tree::Leaf(Anyon::A) => Ok(vec![((**l).clone(), C64::new(1.0, 0.0))]),
            _ => Err(FusionError::Shape(p.clone())),
        })
    }

    /// Replaces `(w S)_s` at the root by `S`, absorbing the Abelian leaf `w`
    /// into an anyon outside the tree that carries the conjugate of the root charge.
    pub fn absorb_root_leaf(&self) -> Result<Self, FusionError> {
        self.rewrite_all(&[], |t| match t {
            Tree::Node(l, r, c) if matches!(**l, Tree::Leaf(_)) && r.charge() == *c && l.charge().qdim() == 1.0 => {
                Ok(vec![((**r).clone(), C64::new(1.0, 0.0))])
            }
            _ => Err(FusionError::Shape(vec![])),
        })
    }

    /// Applies a per-tree phase.
    pub fn map_amplitudes(&self, mut f: impl FnMut(&Tree) -> C64) -> Result<Self, FusionError> {
        self.rewrite_all(&[], |t| Ok(vec![(t.clone(), f(t))]))
    }

    /// Relabels leaves through `f` (used after Abelian corrections).
    pub fn relabel(&self, path: &[Side], to: Anyon) -> Result<Self, FusionError> {
        let p = path.to_vec();
        self.rewrite_all(path, |t| match t {
            Tree::Leaf(_) => Ok(vec![(Tree::Leaf(to), C64::new(1.0, 0.0))]),
            _ => Err(FusionError::Shape(p.clone())),
        })
    }

    /// Converts every node to left-comb association by F-moves.
    pub fn to_left_comb(&self) -> Result<Self, FusionError> {
        fn go(st: FusionState, path: &mut Vec<Side>) -> Result<FusionState, FusionError> {
            let mut st = st;
            loop {
                match st.any_tree().at(path) {
                    Some(Tree::Node(_, r, _)) if matches!(**r, Tree::Node(..)) => {
                        st = st.f_move(path, Assoc::RightToLeft)?;
                    }
                    Some(Tree::Node(..)) => {
                        path.push(Side::Left);
                        let out = go(st, path);
                        path.pop();
                        return out;
                    }
                    _ => return Ok(st),
                }
            }
        }
        go(self.clone(), &mut Vec::new())
    }

    /// `‖self − other‖` after aligning the global phase.
    pub fn distance_up_to_phase(&self, other: &FusionState) -> f64 {
        let ov = other.inner(self);
        let phase = if ov.norm() > 1e-300 { ov / ov.norm() } else { C64::new(1.0, 0.0) };
        let mut keys: Vec<&Tree> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.sort();
        keys.dedup();
        keys.into_iter()
            .map(|t| (self.amplitude(t) - phase * other.amplitude(t)).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn sample<K: Copy + Ord, R: Rng + ?Sized>(dist: &BTreeMap<K, f64>, rng: &mut R) -> K {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    let mut last = None;
    for (&k, &p) in dist {
        if p <= 0.0 {
            continue;
        }
        acc += p;
        last = Some(k);
        if u < acc {
            return k;
        }
    }
    last.expect("distribution has positive mass")
}

/// Result tag of a fusion-space protocol.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutcomeTag {
    /// Left pair has trivial charge.
    A,
    /// Left pair has charge `G`.
    APrime,
    U,
    UPerp,
    Merged,
    Split,
    Timeout,
}

impl fmt::Display for OutcomeTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            OutcomeTag::A => "A",
            OutcomeTag::APrime => "A'",
            OutcomeTag::U => "U",
            OutcomeTag::UPerp => "U_perp",
            OutcomeTag::Merged => "merged",
            OutcomeTag::Split => "split",
            OutcomeTag::Timeout => "timeout",
        };
        f.write_str(s)
    }
}

/// Transcript and final state of a protocol run.
#[derive(Clone, Debug)]
pub struct ProtocolOutcome {
    pub tag: OutcomeTag,
    /// One measured label per step, in order.
    pub transcript: Vec<Anyon>,
    /// Born probability of each transcript entry given the preceding ones.
    pub probabilities: Vec<f64>,
    pub state: FusionState,
    pub rounds: usize,
}

impl ProtocolOutcome {
    /// Probability of the whole transcript.
    pub fn transcript_probability(&self) -> f64 {
        self.probabilities.iter().product()
    }
}

/// Default cap on repeat-until-success loops.
pub const DEFAULT_MAX_ROUNDS: usize = 64;

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use Anyon::*;

    fn comb4(a: Anyon, b: Anyon, c: Anyon, d: Anyon, e: Anyon, f: Anyon, root: Anyon) -> Tree {
        Tree::node(Tree::node(Tree::node(Tree::Leaf(a), Tree::Leaf(b), e), Tree::Leaf(c), f), Tree::Leaf(d), root)
    }

    #[test]
    fn vacuum_leaf_f_move_is_identity_map() {
        let t = Tree::node(Tree::node(Tree::Leaf(A), Tree::Leaf(D), D), Tree::Leaf(D), C);
        let st = FusionState::basis(t).unwrap();
        let moved = st.f_move(&[], Assoc::LeftToRight).unwrap();
        let expect = Tree::node(Tree::Leaf(A), Tree::node(Tree::Leaf(D), Tree::Leaf(D), C), C);
        assert_eq!(moved.len(), 1);
        assert!((moved.amplitude(&expect) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn ggg_f_move_expansion() {
        // (G (G G)_A)_G re-expressed in the left-associated basis ((G G)_e G)_G.
        let t = Tree::node(Tree::Leaf(G), Tree::node(Tree::Leaf(G), Tree::Leaf(G), A), G);
        let moved = FusionState::basis(t).unwrap().f_move(&[], Assoc::RightToLeft).unwrap();
        let s = 0.5f64.sqrt();
        let amp = |e| moved.amplitude(&Tree::node(Tree::node(Tree::Leaf(G), Tree::Leaf(G), e), Tree::Leaf(G), G));
        assert!((amp(A) - C64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((amp(B) - C64::new(0.5, 0.0)).norm() < 1e-12);
        assert!((amp(G) - C64::new(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn f_move_round_trip() {
        let t = comb4(D, D, D, D, G, D, G);
        let st = FusionState::basis(t).unwrap();
        let back = st
            .f_move(&[Side::Left], Assoc::LeftToRight)
            .unwrap()
            .f_move(&[Side::Left], Assoc::RightToLeft)
            .unwrap();
        assert!(back.distance_up_to_phase(&st) < 1e-12);
        assert!((back.inner(&st) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn braid_with_vacuum_and_inverse() {
        let t = Tree::node(Tree::Leaf(A), Tree::Leaf(D), D);
        let st = FusionState::basis(t).unwrap();
        let b = st.braid_leaves(0, Crossing::Over).unwrap();
        let expect = Tree::node(Tree::Leaf(D), Tree::Leaf(A), D);
        assert!((b.amplitude(&expect) - C64::new(1.0, 0.0)).norm() < 1e-12);
        let q = FusionState::basis(Tree::qutrit(G, G)).unwrap();
        let back = q
            .braid(&[Side::Left], Crossing::Over)
            .unwrap()
            .braid(&[Side::Left], Crossing::Under)
            .unwrap();
        assert!((back.inner(&q) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn b_around_g_double_exchange_is_trivial() {
        let st = FusionState::basis(Tree::node(Tree::Leaf(B), Tree::Leaf(G), G)).unwrap();
        let twice = st.braid(&[], Crossing::Over).unwrap().braid(&[], Crossing::Over).unwrap();
        assert!((twice.inner(&st) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn non_adjacent_leaves_are_rejected() {
        let st = FusionState::basis(Tree::qutrit(A, G)).unwrap();
        assert_eq!(st.braid_leaves(1, Crossing::Over).unwrap_err(), FusionError::NotAdjacent(1, 2));
        assert!(st.f_move(&[Side::Left, Side::Left], Assoc::LeftToRight).is_err());
    }

    #[test]
    fn left_comb_conversion_preserves_norm() {
        let st = FusionState::qutrit(&[(A, G, C64::new(0.6, 0.0)), (G, G, C64::new(0.0, 0.8))]).unwrap();
        let comb = st.to_left_comb().unwrap();
        assert!((comb.norm() - 1.0).abs() < 1e-12);
        for (t, _) in comb.terms() {
            assert_eq!(t.shape(), "(((* *) *) *)");
        }
    }

    #[test]
    fn measurement_statistics_follow_born_rule() {
        // (C C) fusion: A, B, C with probabilities 1/4, 1/4, 1/2 from a vacuum pair basis change.
        let t = Tree::node(Tree::node(Tree::Leaf(C), Tree::Leaf(C), A), Tree::node(Tree::Leaf(C), Tree::Leaf(C), A), A);
        let st = FusionState::basis(t).unwrap().f_move(&[], Assoc::LeftToRight).unwrap();
        let st = st.f_move(&[Side::Right], Assoc::RightToLeft).unwrap();
        let dist = st.charge_distribution(&[Side::Right, Side::Left]).unwrap();
        assert!((dist[&A] - 0.25).abs() < 1e-12);
        assert!((dist[&B] - 0.25).abs() < 1e-12);
        assert!((dist[&C] - 0.5).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = st.clone();
        let (c, p) = s.measure_charge(&[Side::Right, Side::Left], &mut rng).unwrap();
        assert!((p - dist[&c]).abs() < 1e-12);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }
}
