//! Adaptive anyon movement on the lattice, plus the pair-creation and
//! pair-fusion experiments it is built from.
//!
//! Every protocol uses only two primitives: maximally mixed shortest
//! ribbons between neighbouring sites and the all-site measurement `M_K`.
//!
//! Moving an anyon `X` from `s` to a neighbour `t` repeats rounds of
//! "apply a shortest ribbon on `(s, t)`, then `M_K`". With outcomes
//! `(c_s, c_t)`:
//!
//! * `c_s = A`: the move succeeded.
//! * `c_s = B`: a `B` ribbon on `(s, t)` removes it (`B × B = A`,
//!   `B × c_t = X`), so the move succeeded.
//! * `c_s = Y` non-Abelian: if `c_t` differs from the wanted charge by a
//!   `B` (`c_t = B`, or `c_t × B = X ≠ c_t`), a `B` ribbon moves that `B` onto
//!   `s`, where `Y × B = Y`. The next round uses a `Y` ribbon, which tries to
//!   annihilate `Y`.
//!
//! For `C, F, G, H` this is the two-subroutine tree with success `1 − 2⁻ⁿ`
//! after `n` rounds. For `D, E` the first round succeeds with probability
//! `1/9` and every later round with `1/2`, giving `1 − (8/9)·2^{1−n}`.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::algebra::{Anyon, ANYONS};
use crate::category::CategoryData;
use crate::lattice::{AnyonConfiguration, Lattice, LatticeError, LatticeState, Ribbon, Site};

/// Default number of `M_K` rounds allowed per single-site move.
pub const DEFAULT_ROUND_BUDGET: usize = 32;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error("sites {0} and {1} are not neighbours")]
    NotAdjacent(Site, Site),
    #[error("site {site} carries {found} with probability {probability}, expected {expected}")]
    SourceMismatch { site: Site, expected: Anyon, found: Anyon, probability: f64 },
    #[error("outcome ({source_outcome}, {target_outcome}) is impossible while moving {anyon}")]
    UnexpectedOutcome { anyon: Anyon, source_outcome: Anyon, target_outcome: Anyon },
    #[error("at least {min} trials are required, got {got}")]
    TooFewTrials { min: usize, got: usize },
}

/// Independent, reproducible generator for trial `index` of a seeded run.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// `a × b` for an Abelian factor (unique outcome).
fn fuse_abelian(a: Anyon, b: Anyon) -> Anyon {
    let out = CategoryData::ds3().products(a, b);
    debug_assert_eq!(out.len(), 1);
    out[0]
}

/// Creates an `anyon` pair on neighbouring sites `a`, `b` with a maximally
/// mixed shortest ribbon (trajectory sampled).
pub fn create_pair<R: rand::Rng + ?Sized>(
    state: &mut LatticeState,
    a: Site,
    b: Site,
    anyon: Anyon,
    rng: &mut R,
) -> Result<(), ProtocolError> {
    let ribbon = Ribbon::between(state.lattice(), a, b).map_err(|_| ProtocolError::NotAdjacent(a, b))?;
    state.apply_anyon_ribbon_mixed(&ribbon, anyon, rng)?;
    Ok(())
}

/// The 3×1 strip used by the statistics experiments.
pub fn demo_lattice() -> Lattice {
    Lattice::new(3, 1).expect("3×1 is a valid lattice")
}

/// Ground state of the demo strip with an `anyon` pair on sites `(0,0)`
/// and `(1,0)`.
pub fn demo_pair_state<R: rand::Rng + ?Sized>(anyon: Anyon, rng: &mut R) -> Result<LatticeState, ProtocolError> {
    let lat = demo_lattice();
    let mut state = LatticeState::ground_state(&lat)?;
    create_pair(&mut state, Site::new(0, 0), Site::new(1, 0), anyon, rng)?;
    Ok(state)
}

/// Outcome of the pair-creation check for one anyon type.
#[derive(Clone, Debug, PartialEq)]
pub struct CreationReport {
    pub anyon: Anyon,
    pub trials: usize,
    /// Trials whose `M_K` configuration differed from `X X A`.
    pub deviations: usize,
    /// First deviating configuration, if any.
    pub first_deviation: Option<String>,
}

/// Creates an `anyon` pair on the demo strip and measures `M_K`, `trials`
/// times. The expected configuration is the anyon at both ribbon ends and
/// `A` on the third site.
pub fn creation_check(anyon: Anyon, trials: usize, seed: u64) -> Result<CreationReport, ProtocolError> {
    let configs: Vec<AnyonConfiguration> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let mut state = demo_pair_state(anyon, &mut rng)?;
            Ok(state.measure_mk(&mut rng)?)
        })
        .collect::<Result<_, ProtocolError>>()?;
    let mut expected = AnyonConfiguration::vacuum(&demo_lattice());
    expected.set(Site::new(0, 0), anyon);
    expected.set(Site::new(1, 0), anyon);
    let bad: Vec<&AnyonConfiguration> = configs.iter().filter(|c| **c != expected).collect();
    Ok(CreationReport {
        anyon,
        trials,
        deviations: bad.len(),
        first_deviation: bad.first().map(|c| c.to_string()),
    })
}

/// Empirical fusion statistics of two independently created pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct FusionReport {
    pub anyon: Anyon,
    pub trials: usize,
    pub counts: BTreeMap<Anyon, usize>,
    /// `N^γ_{αα} d_γ / d_α²`.
    pub expected: BTreeMap<Anyon, f64>,
    /// Largest `|empirical − expected| / σ` over all outcomes.
    pub max_z: f64,
}

/// `|p̂ − p| / sqrt(p(1−p)/n)`; zero variance counts as exact agreement only
/// when the frequencies coincide.
pub fn z_score(successes: usize, trials: usize, p: f64) -> f64 {
    let emp = successes as f64 / trials as f64;
    let var = p * (1.0 - p) / trials as f64;
    if var <= 0.0 {
        if (emp - p).abs() < 1e-12 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (emp - p).abs() / var.sqrt()
    }
}

/// Pairs on `(0,0)–(1,0)` and `(1,0)–(2,0)` of the demo strip; the two
/// anyons meeting at `(1,0)` are fused by `M_K`.
pub fn fusion_statistics(anyon: Anyon, trials: usize, seed: u64) -> Result<FusionReport, ProtocolError> {
    let outcomes: Vec<Anyon> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let mut state = demo_pair_state(anyon, &mut rng)?;
            create_pair(&mut state, Site::new(1, 0), Site::new(2, 0), anyon, &mut rng)?;
            Ok(state.measure_mk(&mut rng)?.get(Site::new(1, 0)))
        })
        .collect::<Result<_, ProtocolError>>()?;
    let cat = CategoryData::ds3();
    let expected: BTreeMap<Anyon, f64> = ANYONS
        .iter()
        .map(|&g| (g, cat.fusion_probability(anyon, anyon, g)))
        .filter(|&(_, p)| p > 0.0)
        .collect();
    let mut counts = BTreeMap::new();
    for o in outcomes {
        *counts.entry(o).or_insert(0) += 1;
    }
    let max_z = ANYONS
        .iter()
        .map(|g| z_score(*counts.get(g).unwrap_or(&0), trials, *expected.get(g).unwrap_or(&0.0)))
        .fold(0.0, f64::max);
    Ok(FusionReport { anyon, trials, counts, expected, max_z })
}

/// A single-site move.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MovePlan {
    pub anyon: Anyon,
    pub source: Site,
    pub target: Site,
    /// Largest number of `M_K` rounds before giving up.
    pub max_rounds: usize,
}

/// Result of a move; on failure `state` is where the protocol stopped.
#[derive(Clone, Debug)]
pub struct MoveResult {
    pub success: bool,
    /// `M_K` rounds used.
    pub rounds: usize,
    /// Configuration observed after every round.
    pub transcripts: Vec<AnyonConfiguration>,
    pub state: LatticeState,
}

fn apply_abelian_ribbon(state: &mut LatticeState, ribbon: &Ribbon, anyon: Anyon) -> Result<(), ProtocolError> {
    state.apply_anyon_ribbon(ribbon, anyon, 0, 0)?;
    Ok(())
}

/// What to do after a round with outcomes `(c_s, c_t)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Decision {
    /// Done, optionally after a `B` ribbon.
    Success { b_fix: bool },
    /// Another round with a ribbon of this type, optionally after a `B`
    /// ribbon.
    Continue { b_fix: bool, next: Anyon },
}

fn decide(anyon: Anyon, cs: Anyon, ct: Anyon) -> Result<Decision, ProtocolError> {
    let unexpected = ProtocolError::UnexpectedOutcome { anyon, source_outcome: cs, target_outcome: ct };
    match cs {
        Anyon::A if ct == anyon => Ok(Decision::Success { b_fix: false }),
        Anyon::B if fuse_abelian(ct, Anyon::B) == anyon => Ok(Decision::Success { b_fix: true }),
        Anyon::A | Anyon::B => Err(unexpected),
        y => {
            // The charge at `t` must be compatible with `X` at `s ∪ t`.
            if !CategoryData::ds3().allowed(y, ct, anyon) {
                return Err(unexpected);
            }
            let b_fix = ct == Anyon::B || (ct != anyon && fuse_abelian(ct, Anyon::B) == anyon);
            Ok(Decision::Continue { b_fix, next: y })
        }
    }
}

/// Moves the anyon at `plan.source` to `plan.target`.
pub fn move_step<R: rand::Rng + ?Sized>(
    state: &LatticeState,
    plan: &MovePlan,
    rng: &mut R,
) -> Result<MoveResult, ProtocolError> {
    let mut state = state.clone();
    let ribbon = Ribbon::between(state.lattice(), plan.source, plan.target)
        .map_err(|_| ProtocolError::NotAdjacent(plan.source, plan.target))?;
    let dist = state.site_distribution(plan.source)?;
    let p = dist.get(&plan.anyon).copied().unwrap_or(0.0);
    if (p - 1.0).abs() > 1e-9 {
        let found = dist.iter().max_by(|a, b| a.1.total_cmp(b.1)).map_or(Anyon::A, |(&a, _)| a);
        return Err(ProtocolError::SourceMismatch {
            site: plan.source,
            expected: plan.anyon,
            found,
            probability: p,
        });
    }
    let mut transcripts = Vec::new();
    let mut next = plan.anyon;
    for round in 1..=plan.max_rounds {
        state.apply_anyon_ribbon_mixed(&ribbon, next, rng)?;
        let config = state.measure_mk(rng)?;
        let (cs, ct) = (config.get(plan.source), config.get(plan.target));
        transcripts.push(config);
        match decide(plan.anyon, cs, ct)? {
            Decision::Success { b_fix } => {
                if b_fix {
                    apply_abelian_ribbon(&mut state, &ribbon, Anyon::B)?;
                }
                return Ok(MoveResult { success: true, rounds: round, transcripts, state });
            }
            Decision::Continue { b_fix, next: n } => {
                if b_fix {
                    apply_abelian_ribbon(&mut state, &ribbon, Anyon::B)?;
                }
                next = n;
            }
        }
    }
    Ok(MoveResult { success: false, rounds: plan.max_rounds, transcripts, state })
}

/// Moves an anyon along `path` (`path[0]` is its current site), stopping at
/// the first failed step. `rounds` accumulates over all steps.
pub fn move_path<R: rand::Rng + ?Sized>(
    state: &LatticeState,
    anyon: Anyon,
    path: &[Site],
    rng: &mut R,
    budget: usize,
) -> Result<MoveResult, ProtocolError> {
    let mut result = MoveResult { success: true, rounds: 0, transcripts: Vec::new(), state: state.clone() };
    for pair in path.windows(2) {
        let plan = MovePlan { anyon, source: pair[0], target: pair[1], max_rounds: budget };
        let step = move_step(&result.state, &plan, rng)?;
        result.rounds += step.rounds;
        result.transcripts.extend(step.transcripts);
        result.state = step.state;
        if !step.success {
            result.success = false;
            break;
        }
    }
    Ok(result)
}

/// Closed-form probability of having moved `anyon` one site within `n`
/// rounds.
pub fn analytic_success(anyon: Anyon, n: usize) -> f64 {
    let half = 0.5f64.powi(n as i32);
    match anyon {
        Anyon::A | Anyon::B => 1.0,
        Anyon::C | Anyon::F | Anyon::G | Anyon::H => 1.0 - half,
        Anyon::D | Anyon::E => {
            if n == 0 {
                0.0
            } else {
                1.0 - 8.0 / 9.0 * 0.5f64.powi(n as i32 - 1)
            }
        }
    }
}

/// Empirical versus closed-form success probability after `n` rounds.
#[derive(Clone, Debug, PartialEq)]
pub struct SuccessRecord {
    pub anyon: Anyon,
    pub n: usize,
    pub trials: usize,
    pub successes: usize,
    pub empirical: f64,
    pub analytic: f64,
    pub z: f64,
}

/// Minimum trial count accepted by [`success_statistics`].
pub const MIN_TRIALS: usize = 100;

/// Moves the anyon at `(1,0)` of the demo strip (partner at `(0,0)`) to
/// `(2,0)` in `trials` independent runs with a budget of `n_max` rounds,
/// and compares the success curve with [`analytic_success`] for
/// `n = 1..=n_max`.
pub fn success_statistics(
    anyon: Anyon,
    n_max: usize,
    trials: usize,
    seed: u64,
) -> Result<Vec<SuccessRecord>, ProtocolError> {
    if trials < MIN_TRIALS {
        return Err(ProtocolError::TooFewTrials { min: MIN_TRIALS, got: trials });
    }
    let plan = MovePlan { anyon, source: Site::new(1, 0), target: Site::new(2, 0), max_rounds: n_max };
    let rounds: Vec<Option<usize>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = trial_rng(seed, t as u64);
            let state = demo_pair_state(anyon, &mut rng)?;
            let r = move_step(&state, &plan, &mut rng)?;
            Ok(r.success.then_some(r.rounds))
        })
        .collect::<Result<_, ProtocolError>>()?;
    Ok((1..=n_max)
        .map(|n| {
            let successes = rounds.iter().filter(|r| r.is_some_and(|r| r <= n)).count();
            let analytic = analytic_success(anyon, n);
            SuccessRecord {
                anyon,
                n,
                trials,
                successes,
                empirical: successes as f64 / trials as f64,
                analytic,
                z: z_score(successes, trials, analytic),
            }
        })
        .collect())
}

/// Result of pushing the charge of one site onto a neighbour.
#[derive(Clone, Debug)]
pub struct PushResult {
    /// The source site ended with charge `A`.
    pub cleared: bool,
    pub rounds: usize,
    pub transcripts: Vec<AnyonConfiguration>,
}

/// Fuses whatever charge sits at `from` into the neighbouring site `to`.
///
/// Each round applies a maximally mixed ribbon of the current charge `Y` of
/// `from` on `(from, to)` and measures `M_K`; a `B` left at `from` is moved
/// across deterministically. `from` must carry a definite charge.
pub fn push_charge<R: rand::Rng + ?Sized>(
    state: &mut LatticeState,
    from: Site,
    to: Site,
    budget: usize,
    rng: &mut R,
) -> Result<PushResult, ProtocolError> {
    let ribbon = Ribbon::between(state.lattice(), from, to).map_err(|_| ProtocolError::NotAdjacent(from, to))?;
    let dist = state.site_distribution(from)?;
    let (&initial, &p) = dist.iter().max_by(|a, b| a.1.total_cmp(b.1)).expect("non-empty distribution");
    if (p - 1.0).abs() > 1e-9 {
        return Err(ProtocolError::SourceMismatch { site: from, expected: initial, found: initial, probability: p });
    }
    let mut charge = initial;
    let mut out = PushResult { cleared: false, rounds: 0, transcripts: Vec::new() };
    loop {
        match charge {
            Anyon::A => {
                out.cleared = true;
                return Ok(out);
            }
            Anyon::B => {
                apply_abelian_ribbon(state, &ribbon, Anyon::B)?;
                out.cleared = true;
                return Ok(out);
            }
            y => {
                if out.rounds == budget {
                    return Ok(out);
                }
                state.apply_anyon_ribbon_mixed(&ribbon, y, rng)?;
                let config = state.measure_mk(rng)?;
                charge = config.get(from);
                out.transcripts.push(config);
                out.rounds += 1;
            }
        }
    }
}
