//! Remote charge measurements by anyon interferometry on the U-model qutrit
//! `|xy⟩ = ((D D)_x (D D)_y)_G`.

use std::collections::BTreeMap;

use rand::Rng;

use super::{sample, Assoc, Crossing, FusionError, FusionState, OutcomeTag, ProtocolOutcome, Side, Tree, DEFAULT_MAX_ROUNDS};
use crate::algebra::{Anyon, C64};
use crate::category::{CategoryData, U_BASIS, U_PERP_1, U_PERP_2};

/// Creates a `z` pair, takes one member around the subtree at `path` and fuses
/// the pair. Samples the outcome `w` with probability `Σ |c I_{x;z,w}|²`; the
/// `w` line is attached to the left of the measured subtree, `(w S)_x`
/// (omitted when `w = A`). Returns `(w, probability, post-measurement state)`.
pub fn interferometer<R: Rng + ?Sized>(
    state: &FusionState,
    path: &[Side],
    z: Anyon,
    rng: &mut R,
) -> Result<(Anyon, f64, FusionState), FusionError> {
    let cat = state.category();
    let mut dist: BTreeMap<Anyon, f64> = BTreeMap::new();
    for (t, a) in state.terms() {
        let x = t.at(path).ok_or_else(|| FusionError::Shape(path.to_vec()))?.charge();
        for &w in cat.labels() {
            let amp = cat.interferometry_amplitude(x, z, w);
            if amp.norm() > 1e-14 {
                *dist.entry(w).or_insert(0.0) += (a * amp).norm_sqr();
            }
        }
    }
    let total: f64 = dist.values().sum();
    for v in dist.values_mut() {
        *v /= total;
    }
    let w = sample(&dist, rng);
    let p = dist[&w];
    let mut next = state.rewrite_all(path, |s| {
        let x = s.charge();
        let amp = cat.interferometry_amplitude(x, z, w);
        let t = if w == Anyon::A { s.clone() } else { Tree::node(Tree::Leaf(w), s.clone(), x) };
        Ok(vec![(t, amp)])
    })?;
    next.normalize()?;
    Ok((w, p, next))
}

/// Amplitude of fusion outcome `w` obtained by literally creating a `z` pair
/// next to a charge `x`, taking one `z` around `x` (two exchanges), and
/// reading off the pair channel. Agrees with `|I_{x;z,w}|` in magnitude; the
/// phase differs by an `x`-dependent vertex convention.
pub fn literal_interferometry_amplitude(cat: &'static CategoryData, x: Anyon, z: Anyon, w: Anyon) -> C64 {
    let start = Tree::node(Tree::Leaf(x), Tree::node(Tree::Leaf(z), Tree::Leaf(z), Anyon::A), x);
    let Ok(st) = FusionState::from_terms(cat, vec![(start, C64::new(1.0, 0.0))]) else {
        return C64::default();
    };
    let run = || -> Result<FusionState, FusionError> {
        st.f_move(&[], Assoc::RightToLeft)?
            .braid(&[Side::Left], Crossing::Over)?
            .braid(&[Side::Left], Crossing::Over)?
            .f_move(&[], Assoc::LeftToRight)
    };
    match run() {
        Ok(out) => out.amplitude(&Tree::node(Tree::Leaf(x), Tree::node(Tree::Leaf(z), Tree::Leaf(z), w), x)),
        Err(_) => C64::default(),
    }
}

fn qutrit_labels(t: &Tree) -> Option<(Anyon, Anyon)> {
    use Anyon::*;
    let (Tree::Node(l, r, G), Tree::Node(..)) = (t, t) else { return None };
    match (l.as_ref(), r.as_ref()) {
        (Tree::Node(a, b, x), Tree::Node(c, d, y))
            if [a, b, c, d].iter().all(|leaf| ***leaf == Tree::Leaf(D)) =>
        {
            Some((*x, *y))
        }
        _ => None,
    }
}

fn check_support(state: &FusionState, path: &[Side], allowed: &[(Anyon, Anyon)]) -> Result<(), FusionError> {
    for (t, _) in state.terms() {
        let sub = t.at(path).ok_or_else(|| FusionError::Shape(path.to_vec()))?;
        match qutrit_labels(sub) {
            Some(xy) if allowed.contains(&xy) => {}
            _ => return Err(FusionError::OutsideSpace(format!("term {t}"))),
        }
    }
    Ok(())
}

fn join(base: &[Side], rest: &[Side]) -> Vec<Side> {
    base.iter().chain(rest.iter()).copied().collect()
}

/// `M_A = {Π_A, Π_A'}` on a qutrit supported on `U`.
pub fn measure_ma<R: Rng + ?Sized>(state: &FusionState, rng: &mut R, max_rounds: usize) -> Result<ProtocolOutcome, FusionError> {
    measure_ma_at(state, &[], rng, max_rounds)
}

/// [`measure_ma`] on the qutrit subtree at `base`.
///
/// A `D` interferometer around the left pair yields `w = A` (charge `A`) or
/// `w = G` (charge `G`). For `w = G` the `w` anyon is fused with the leftmost
/// `D`, giving `D` or `E` with probability 1/2 each. An `E` is turned back
/// into `D` with a `B` pair; this multiplies `|Gy⟩` by
/// `[F^{BDD}_G]_{EG} [F^{BGy}_G]_{GG}`, a relative sign between `y = A` and
/// `y = G` that the next `E` outcome cancels.
pub fn measure_ma_at<R: Rng + ?Sized>(
    state: &FusionState,
    base: &[Side],
    rng: &mut R,
    max_rounds: usize,
) -> Result<ProtocolOutcome, FusionError> {
    check_support(state, base, &U_BASIS)?;
    let cat = state.category();
    let left = join(base, &[Side::Left]);
    let left_left = join(base, &[Side::Left, Side::Left]);
    let right = join(base, &[Side::Right]);
    let mut st = state.clone();
    let mut transcript = Vec::new();
    let mut probabilities = Vec::new();
    let mut pending_sign = false;
    for round in 1..=max_rounds.max(1) {
        let (w, p, next) = interferometer(&st, &left, Anyon::D, rng)?;
        transcript.push(w);
        probabilities.push(p);
        st = next;
        if w == Anyon::A {
            return Ok(ProtocolOutcome { tag: OutcomeTag::A, transcript, probabilities, state: st, rounds: round });
        }
        // (w (D D)_G)_G → ((w D)_{x'} D)_G, then fuse w with the leftmost D.
        st = st.f_move(&left, Assoc::RightToLeft)?;
        let (xp, p) = st.measure_charge(&left_left, rng)?;
        transcript.push(xp);
        probabilities.push(p);
        st = st.fuse_leaves(&left_left)?;
        if xp == Anyon::E {
            let phase_b = cat.f(Anyon::B, Anyon::D, Anyon::D, Anyon::G, Anyon::E, Anyon::G);
            let r = right.clone();
            st = st.map_amplitudes(|t| {
                let y = t.at(&r).map(Tree::charge).unwrap_or(Anyon::A);
                phase_b * cat.f(Anyon::B, Anyon::G, y, Anyon::G, Anyon::G, Anyon::G)
            })?;
            st = st.relabel(&left_left, Anyon::D)?;
            pending_sign = !pending_sign;
        }
        if !pending_sign {
            return Ok(ProtocolOutcome { tag: OutcomeTag::APrime, transcript, probabilities, state: st, rounds: round });
        }
    }
    Ok(ProtocolOutcome { tag: OutcomeTag::Timeout, transcript, probabilities, state: st, rounds: max_rounds })
}

/// One round of the `H` interferometer `M̃_U`: outcome `w ∈ {A, B}` with
/// amplitude `I^U_{(x,y);H,w}` on `|xy⟩`. A `B` outcome is fused into the
/// `G` anyon carrying the qutrit's total charge.
pub fn measure_mu_once<R: Rng + ?Sized>(state: &FusionState, rng: &mut R) -> Result<(Anyon, f64, FusionState), FusionError> {
    let all: Vec<(Anyon, Anyon)> = crate::category::vdddd_basis();
    check_support(state, &[], &all)?;
    let (w, p, mut st) = interferometer(state, &[Side::Left], Anyon::H, rng)?;
    if w != Anyon::A {
        // ((w X)_x Y)_G → (w (X Y)_G)_G with amplitude [F^{wxy}_G]_{xG}.
        st = st.f_move(&[], Assoc::LeftToRight)?.absorb_root_leaf()?;
    }
    Ok((w, p, st))
}

/// `M_U = {Π_U, Π_U⊥}` by repeated `M̃_U`. Stops with `U` after `n`
/// consecutive `A` outcomes; after a first `B` it continues until a second
/// `B` cancels the relative sign between `U⊥_1` and `U⊥_2` (tag `U⊥`), or
/// reports a timeout after [`DEFAULT_MAX_ROUNDS`] further rounds.
pub fn measure_mu<R: Rng + ?Sized>(state: &FusionState, rng: &mut R, n: usize) -> Result<ProtocolOutcome, FusionError> {
    let n = n.max(1);
    let mut st = state.clone();
    let mut transcript = Vec::new();
    let mut probabilities = Vec::new();
    let mut b_seen = 0usize;
    let mut round = 0usize;
    let mut after_first_b = 0usize;
    loop {
        round += 1;
        let (w, p, next) = measure_mu_once(&st, rng)?;
        transcript.push(w);
        probabilities.push(p);
        st = next;
        if w == Anyon::B {
            b_seen += 1;
            if b_seen == 2 {
                return Ok(ProtocolOutcome { tag: OutcomeTag::UPerp, transcript, probabilities, state: st, rounds: round });
            }
        } else if b_seen == 0 && round >= n {
            return Ok(ProtocolOutcome { tag: OutcomeTag::U, transcript, probabilities, state: st, rounds: round });
        }
        if b_seen == 1 {
            after_first_b += 1;
            if after_first_b > DEFAULT_MAX_ROUNDS {
                return Ok(ProtocolOutcome { tag: OutcomeTag::Timeout, transcript, probabilities, state: st, rounds: round });
            }
        }
    }
}

/// `Π_{U⊥}|ψ⟩` normalized, or `None` when the projection vanishes.
pub fn project_u_perp(state: &FusionState) -> Option<FusionState> {
    let terms: Vec<(Tree, C64)> = state
        .terms()
        .filter(|(t, _)| qutrit_labels(t).is_some_and(|xy| U_PERP_1.contains(&xy) || U_PERP_2.contains(&xy)))
        .map(|(t, a)| (t.clone(), *a))
        .collect();
    let mut st = FusionState::from_terms(state.category(), terms).ok()?;
    st.normalize().ok()?;
    Some(st)
}

/// `Π_U|ψ⟩` normalized, or `None` when the projection vanishes.
pub fn project_u(state: &FusionState) -> Option<FusionState> {
    let terms: Vec<(Tree, C64)> = state
        .terms()
        .filter(|(t, _)| qutrit_labels(t).is_some_and(|xy| U_BASIS.contains(&xy)))
        .map(|(t, a)| (t.clone(), *a))
        .collect();
    let mut st = FusionState::from_terms(state.category(), terms).ok()?;
    st.normalize().ok()?;
    Some(st)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ANYONS;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use Anyon::*;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn literal_interferometry_matches_closed_form_magnitude() {
        let cat = CategoryData::ds3();
        for x in ANYONS {
            for z in ANYONS {
                for w in ANYONS {
                    let lit = literal_interferometry_amplitude(cat, x, z, w).norm();
                    let closed = cat.interferometry_amplitude(x, z, w).norm();
                    assert!((lit - closed).abs() < 1e-12, "x={x} z={z} w={w}");
                }
            }
        }
    }

    #[test]
    fn ma_on_ag_is_deterministic() {
        let st = FusionState::qutrit(&[(A, G, C64::new(1.0, 0.0))]).unwrap();
        for seed in 0..20 {
            let out = measure_ma(&st, &mut rng(seed), DEFAULT_MAX_ROUNDS).unwrap();
            assert_eq!(out.tag, OutcomeTag::A);
            assert!((out.state.inner(&st) - C64::new(1.0, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn ma_on_gg_returns_gg() {
        let st = FusionState::qutrit(&[(G, G, C64::new(1.0, 0.0))]).unwrap();
        for seed in 0..50 {
            let out = measure_ma(&st, &mut rng(seed), DEFAULT_MAX_ROUNDS).unwrap();
            assert_eq!(out.tag, OutcomeTag::APrime);
            assert!(out.state.fidelity(&st) > 1.0 - 1e-9);
        }
    }

    #[test]
    fn ma_preserves_a_prime_coherence() {
        let st = FusionState::qutrit(&[
            (A, G, C64::new(0.5, 0.0)),
            (G, G, C64::new(0.5, 0.5)),
            (G, A, C64::new(0.0, -0.5)),
        ])
        .unwrap();
        let target = FusionState::qutrit(&[(G, G, C64::new(0.5, 0.5)), (G, A, C64::new(0.0, -0.5))]).unwrap();
        let mut saw_e = false;
        for seed in 0..200 {
            let out = measure_ma(&st, &mut rng(seed), DEFAULT_MAX_ROUNDS).unwrap();
            if out.tag == OutcomeTag::APrime {
                saw_e |= out.transcript.contains(&E);
                assert!(out.state.fidelity(&target) > 1.0 - 1e-9, "{:?}", out.transcript);
            }
        }
        assert!(saw_e);
    }

    #[test]
    fn ma_rejects_states_outside_u() {
        let st = FusionState::qutrit(&[(F, C, C64::new(1.0, 0.0))]).unwrap();
        assert!(matches!(measure_ma(&st, &mut rng(0), 8), Err(FusionError::OutsideSpace(_))));
    }

    #[test]
    fn mu_once_amplitudes() {
        // Outcome probabilities on U⊥ states: 1/4 and 3/4.
        let st = FusionState::qutrit(&[(F, C, C64::new(1.0, 0.0))]).unwrap();
        let mut counts = [0usize; 2];
        for seed in 0..400 {
            let (w, p, _) = measure_mu_once(&st, &mut rng(seed)).unwrap();
            let expect = if w == A { 0.25 } else { 0.75 };
            assert!((p - expect).abs() < 1e-12);
            counts[(w == B) as usize] += 1;
        }
        assert!(counts[0] > 60 && counts[1] > 250);
    }

    #[test]
    fn mu_on_u_is_invariant() {
        let st = FusionState::qutrit(&[(A, G, C64::new(0.6, 0.0)), (G, A, C64::new(0.0, 0.8))]).unwrap();
        let out = measure_mu(&st, &mut rng(1), 5).unwrap();
        assert_eq!(out.tag, OutcomeTag::U);
        assert_eq!(out.transcript, vec![A; 5]);
        assert!((out.state.inner(&st) - C64::new(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn mu_b_outcome_flips_relative_sign() {
        let st = FusionState::qutrit(&[(F, C, C64::new(1.0, 0.0)), (C, F, C64::new(1.0, 0.0))]).unwrap();
        let mut r = rng(5);
        loop {
            let (w, _, out) = measure_mu_once(&st, &mut r).unwrap();
            if w == B {
                let fc = out.amplitude(&Tree::qutrit(F, C));
                let cf = out.amplitude(&Tree::qutrit(C, F));
                assert!((fc + cf).norm() < 1e-12);
                break;
            }
        }
    }
}
