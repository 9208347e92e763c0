//! Qudit CSS codes and the logical controlled charge conjugation between a
//! qubit Shor code and a qutrit code.

use std::collections::{BTreeMap, BTreeSet};

use proptest::prelude::*;
use qds3::algebra::C64;
use qds3::circuits::{enumerate_branches, AdaptiveCircuit, QuditRegister};
use qds3::concat_code::{
    charge_conjugation_deviation, correction_circuit, fault_tolerance_demo, format_matrix, logical_cc,
    logical_patterns, naive_transversal_cc, parse_matrix, pow2_mod3, run_schedule, schur_obstruction_check,
    schur_violation, single_error_sweep, site_paulis, verify_block_patterns, verify_dense, verify_logical_action,
    BlockStructure, CodeState, ConcatError, ConcatState, InjectedError, QuditCSSCode, SchurSpace, ScheduleStep,
    SitePauli, FIDELITY_TOL,
};

const TOL: f64 = 1e-12;

fn shor3() -> QuditCSSCode {
    QuditCSSCode::shor(3).unwrap()
}

fn qutrit_shor3() -> QuditCSSCode {
    QuditCSSCode::qutrit_shor(3).unwrap()
}

fn shor9() -> QuditCSSCode {
    QuditCSSCode::shor(9).unwrap()
}

fn repetition3() -> QuditCSSCode {
    QuditCSSCode::qutrit_repetition(3).unwrap()
}

/// Expands a block string such as "110" into nine qubits.
fn blocks(s: &str) -> Vec<u8> {
    s.bytes().flat_map(|b| std::iter::repeat_n(b - b'0', 3)).collect()
}

// ---------------------------------------------------------------- codewords

#[test]
fn shor_logical_states_are_the_four_term_block_sums() {
    let code = shor3();
    assert_eq!((code.n(), code.k(), code.distance()), (9, 1, Some(3)));
    let expected = [["000", "110", "011", "101"], ["111", "001", "100", "010"]];
    for (alpha, terms) in expected.iter().enumerate() {
        let state = code.codeword(&[alpha as u8]).unwrap();
        assert_eq!(state.amplitudes().len(), 4);
        for t in terms {
            let a = state.amplitude(&blocks(t));
            assert!((a - C64::new(0.5, 0.0)).norm() < TOL, "α = {alpha}, term {t}: {a}");
        }
        assert!((state.norm_sqr() - 1.0).abs() < TOL);
    }
}

#[test]
fn qutrit_repetition_codewords_are_constant_strings() {
    let code = repetition3();
    assert_eq!((code.k(), code.rank_x(), code.rank_z()), (1, 0, 2));
    for beta in 0..3u8 {
        let state = code.codeword(&[beta]).unwrap();
        assert_eq!(state.amplitudes().len(), 1);
        assert!((state.amplitude(&[beta; 3]) - C64::new(1.0, 0.0)).norm() < TOL);
    }
}

#[test]
fn empty_checks_on_one_qudit_encode_trivially() {
    for p in [2u8, 3] {
        let code = QuditCSSCode::new(p, 1, Vec::new(), Vec::new()).unwrap();
        assert_eq!((code.k(), code.distance()), (1, Some(1)));
        for v in 0..p {
            let state = code.codeword(&[v]).unwrap();
            assert_eq!(state.amplitudes().len(), 1);
            assert!((state.amplitude(&[v]) - C64::new(1.0, 0.0)).norm() < TOL);
        }
    }
}

#[test]
fn invalid_logical_values_are_rejected() {
    let code = repetition3();
    assert!(matches!(code.codeword(&[3]), Err(ConcatError::InvalidLogical(_))));
    assert!(matches!(code.codeword(&[0, 1]), Err(ConcatError::InvalidLogical(_))));
    assert!(matches!(shor3().codeword(&[2]), Err(ConcatError::InvalidLogical(_))));
}

#[test]
fn qutrit_shor_analog_is_a_distance_three_code() {
    let code = qutrit_shor3();
    assert_eq!((code.n(), code.k(), code.rank_x(), code.rank_z()), (9, 1, 2, 6));
    assert_eq!(code.exhaustive_distances(), Some((3, 3)));
    for (_, state) in code.codewords().unwrap() {
        assert_eq!(state.amplitudes().len(), 9);
        assert!(code.stabilizer_deviation(&state) < TOL);
    }
}

#[test]
fn codewords_are_orthonormal() {
    for code in [shor3(), qutrit_shor3(), repetition3(), QuditCSSCode::qubit_phase_repetition(3).unwrap()] {
        let words = code.codewords().unwrap();
        for (a, x) in &words {
            for (b, y) in &words {
                let expected = if a == b { 1.0 } else { 0.0 };
                assert!((x.inner(y) - C64::new(expected, 0.0)).norm() < TOL);
            }
        }
    }
}

#[test]
fn charge_conjugation_is_transversal_on_the_qutrit_codes() {
    assert!(charge_conjugation_deviation(&repetition3()).unwrap() < TOL);
    assert!(charge_conjugation_deviation(&qutrit_shor3()).unwrap() < TOL);
}

#[test]
fn parity_matrices_round_trip_through_text() {
    let code = qutrit_shor3();
    let hx = format_matrix(code.hx());
    let hz = format_matrix(code.hz());
    assert_eq!(parse_matrix(&hx, 3).unwrap(), code.hx());
    let again = QuditCSSCode::from_text(3, 9, &hx, &hz).unwrap();
    assert_eq!((again.hx(), again.hz()), (code.hx(), code.hz()));
    assert!(matches!(parse_matrix("1 0\n2 x\n", 3), Err(ConcatError::Parse { line: 2, .. })));
    assert!(matches!(parse_matrix("1 3\n", 3), Err(ConcatError::Parse { .. }) | Err(ConcatError::EntryOutOfField { .. })));
}

#[test]
fn invalid_codes_are_rejected() {
    assert!(matches!(QuditCSSCode::new(5, 1, vec![], vec![]), Err(ConcatError::InvalidPrime(5))));
    assert!(matches!(
        QuditCSSCode::new(3, 2, vec![vec![1, 1]], vec![vec![1, 1]]),
        Err(ConcatError::NotOrthogonal { .. })
    ));
    assert!(matches!(
        QuditCSSCode::new(3, 3, vec![vec![1, 1]], vec![]),
        Err(ConcatError::RowLength { .. })
    ));
    assert!(matches!(
        QuditCSSCode::qutrit_shor(3).unwrap().with_claimed_distance(5),
        Err(ConcatError::DistanceMismatch { claimed: 5, actual: 3 })
    ));
}

// -------------------------------------------------------------- arithmetic

#[test]
fn two_to_the_q_mod_three_depends_on_the_parity_of_q() {
    for q in 0..200u64 {
        let expected = if q % 2 == 0 { 1 } else { 2 };
        assert_eq!(pow2_mod3(q), expected, "q = {q}");
    }
}

#[test]
fn shor_block_patterns_have_the_logical_parity() {
    for r in [3usize, 5, 7, 9] {
        let bs = BlockStructure::of(&QuditCSSCode::shor(r).unwrap()).unwrap();
        assert_eq!(bs.blocks(), r);
        for alpha in 0..2u8 {
            let patterns = bs.patterns(alpha);
            assert_eq!(patterns.len(), 1 << (r - 1));
            assert!(patterns.iter().all(|p| p.count_ones() % 2 == alpha as u32));
        }
    }
}

// ------------------------------------------------------------ logical gate

#[test]
fn schedule_interleaves_blocks_and_corrections_in_reverse_block_order() {
    let s = logical_cc(&shor3(), &repetition3()).unwrap();
    assert_eq!(
        s.steps(),
        [ScheduleStep::Block(2), ScheduleStep::Correct, ScheduleStep::Block(1), ScheduleStep::Correct, ScheduleStep::Block(0)]
    );
}

#[test]
fn toy_concatenation_realizes_the_logical_gate_exactly() {
    let (qubit, qutrit) = (shor3(), repetition3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let report = verify_logical_action(&s, &qubit, &qutrit).unwrap();
    assert_eq!(report.rows.len(), 6);
    for &(alpha, beta, branches, dev) in &report.rows {
        assert_eq!(branches, 1, "α = {alpha}, β̂ = {beta}");
        assert!(dev < TOL, "α = {alpha}, β̂ = {beta}: {dev}");
    }
    // |1⟩_L|β̂⟩_L ↦ |1⟩_L|2β̂⟩_L, |0⟩_L|β̂⟩_L unchanged.
    let input = ConcatState::logical(&qubit, &qutrit, 1, 1).unwrap();
    let out = run_schedule(&s, &qutrit, &input, &[], false).unwrap();
    let target = ConcatState::logical(&qubit, &qutrit, 1, 2).unwrap();
    assert!((out[0].state.fidelity(&target) - 1.0).abs() < TOL);
}

#[test]
fn toy_concatenation_circuit_matches_on_dense_registers() {
    let (qubit, qutrit) = (shor3(), repetition3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let report = verify_dense(&s, &qubit, &qutrit).unwrap();
    assert!(report.max_infidelity < 1e-10, "{report:?}");
    assert!(report.block_basis_deviation < TOL, "{report:?}");
    assert!(report.weight_defect < 1e-10, "{report:?}");
}

#[test]
fn each_one_block_doubles_the_qutrit_and_zero_blocks_act_trivially() {
    let (qubit, qutrit) = (shor3(), repetition3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let one = C64::new(1.0, 0.0);
    for t in 0..3 {
        for (pattern, factor) in [(0u64, 1u8), (1 << t, 2)] {
            for beta in 0..3u8 {
                let amps: BTreeMap<u64, C64> = [(pattern, one)].into_iter().collect();
                let mut st = ConcatState::product(3, &amps, &qutrit.codeword(&[beta]).unwrap()).unwrap();
                st.apply_block(t);
                let expected =
                    ConcatState::product(3, &amps, &qutrit.codeword(&[(factor * beta) % 3]).unwrap()).unwrap();
                assert!(st.max_difference(&expected) < TOL);
            }
        }
    }
    let patterns = verify_block_patterns(&s, &qutrit).unwrap();
    assert_eq!(patterns.checked, 8 * 3);
    assert!(patterns.max_deviation < TOL);
}

#[test]
fn nine_block_instance_matches_on_every_pattern() {
    let (qubit, qutrit) = (QuditCSSCode::shor(9).unwrap(), QuditCSSCode::qutrit_shor(3).unwrap());
    assert_eq!(qubit.n(), 81);
    let s = logical_cc(&qubit, &qutrit).unwrap();
    assert_eq!(s.steps().len(), 17);
    let patterns = verify_block_patterns(&s, &qutrit).unwrap();
    assert_eq!(patterns.checked, 512 * 3);
    assert!(patterns.max_deviation < TOL, "{patterns:?}");
    let action = verify_logical_action(&s, &qubit, &qutrit).unwrap();
    assert!(action.max_deviation < TOL, "{action:?}");
}

#[test]
fn inter_block_states_stay_in_the_code_space() {
    let (qubit, qutrit) = (shor9(), qutrit_shor3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let input = ConcatState::logical(&qubit, &qutrit, 1, 1).unwrap();
    let mut st = input.clone();
    for step in s.steps() {
        if let ScheduleStep::Block(t) = *step {
            st.apply_block(t);
        }
        // Every pattern slice is a qutrit codeword.
        for p in st.patterns() {
            let amps: BTreeMap<Vec<u8>, C64> =
                st.entries().filter(|e| e.0 == p).map(|(_, k, a)| (k, a)).collect();
            let slice = CodeState::from_amplitudes(3, 9, amps).unwrap();
            let w = qutrit.code_space_weight(&slice).unwrap();
            assert!((w - slice.norm_sqr()).abs() < TOL);
        }
    }
}

#[test]
fn even_block_counts_are_rejected() {
    let err = logical_cc(&QuditCSSCode::shor(2).unwrap(), &QuditCSSCode::qutrit_repetition(2).unwrap());
    assert!(matches!(err, Err(ConcatError::EvenBlockCount(2))));
    let err = logical_cc(&QuditCSSCode::shor(4).unwrap(), &QuditCSSCode::qutrit_shor(2).unwrap());
    assert!(matches!(err, Err(ConcatError::EvenBlockCount(4))));
    assert!(err.unwrap_err().to_string().contains("mod 3"));
}

#[test]
fn mismatched_lengths_are_rejected() {
    let err = logical_cc(&QuditCSSCode::shor(5).unwrap(), &repetition3());
    assert!(matches!(err, Err(ConcatError::IncompatibleCodes(_))));
}

#[test]
fn schedules_serialize_to_circuit_text() {
    let s = logical_cc(&shor9(), &qutrit_shor3()).unwrap();
    let c = s.to_circuit(&qutrit_shor3()).unwrap();
    let text = c.to_text();
    assert_eq!(AdaptiveCircuit::from_text(&text).unwrap(), c);
    assert_eq!(c.system().len(), 81 + 9);
}

// ----------------------------------------------------------- fault tolerance

#[test]
fn error_free_run_passes() {
    let (qubit, qutrit) = (shor9(), qutrit_shor3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let r = fault_tolerance_demo(&s, &qubit, &qutrit, &[]).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!((r.inputs, r.branches, r.unrecognized), (6, 6, 0));
}

#[test]
fn x_error_on_qutrit_four_after_block_one_is_corrected() {
    let (qubit, qutrit) = (shor9(), qutrit_shor3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let after_step = s.steps().iter().position(|&x| x == ScheduleStep::Block(1)).unwrap();
    let e = InjectedError { after_step, pauli: SitePauli { site: 4, x: 1, z: 0 } };
    let r = fault_tolerance_demo(&s, &qubit, &qutrit, &[e]).unwrap();
    assert!(r.passed, "{r:?}");
    assert_eq!(r.unrecognized, 0);
}

#[test]
fn every_single_qutrit_error_between_blocks_is_corrected() {
    let (qubit, qutrit) = (shor9(), qutrit_shor3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let sweep = single_error_sweep(&s, &qubit, &qutrit).unwrap();
    assert_eq!(sweep.cases, 16 * 9 * 8);
    assert_eq!(sweep.passed, sweep.cases, "failures: {:?}", sweep.failures.first());
    assert!(sweep.min_joint_fidelity >= 1.0 - FIDELITY_TOL);
}

#[test]
fn two_errors_in_one_window_cause_a_logical_failure() {
    let (qubit, qutrit) = (shor9(), qutrit_shor3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let errors = [
        InjectedError { after_step: 0, pauli: SitePauli { site: 0, x: 1, z: 0 } },
        InjectedError { after_step: 0, pauli: SitePauli { site: 1, x: 1, z: 0 } },
    ];
    let r = fault_tolerance_demo(&s, &qubit, &qutrit, &errors).unwrap();
    assert!(!r.passed, "{r:?}");
    assert!(r.min_joint_fidelity < 0.5);
}

#[test]
fn distance_below_three_is_rejected() {
    let (qubit, qutrit) = (shor3(), repetition3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    let err = fault_tolerance_demo(&s, &qubit, &qutrit, &[]).unwrap_err();
    assert!(matches!(err, ConcatError::DistanceTooSmall { distance: 1 }));
    assert!(err.to_string().contains("< 3"));
}

#[test]
fn invalid_injected_errors_are_rejected() {
    let (qubit, qutrit) = (shor9(), qutrit_shor3());
    let s = logical_cc(&qubit, &qutrit).unwrap();
    for e in [
        InjectedError { after_step: 99, pauli: SitePauli { site: 0, x: 1, z: 0 } },
        InjectedError { after_step: 0, pauli: SitePauli { site: 9, x: 1, z: 0 } },
    ] {
        assert!(matches!(
            fault_tolerance_demo(&s, &qubit, &qutrit, &[e]),
            Err(ConcatError::InvalidError(_))
        ));
    }
}

#[test]
fn site_paulis_are_the_eight_non_identity_elements() {
    let ps = site_paulis(2);
    assert_eq!(ps.len(), 8);
    let set: BTreeSet<(u8, u8)> = ps.iter().map(|p| (p.x, p.z)).collect();
    assert_eq!(set.len(), 8);
    assert!(!set.contains(&(0, 0)));
}

/// Dense run of the correction circuit on an errored codeword.
fn corrected_dense(code: &QuditCSSCode, beta: u8, error: SitePauli) -> Vec<f64> {
    let circuit = correction_circuit(code).unwrap();
    let wires = circuit.system_wires();
    let codeword = code.codeword(&[beta]).unwrap();
    let errored = codeword.shifted(&unit(code.n(), error.site, error.x));
    let phase = |k: &[u8]| C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0 * (error.z as f64) * (k[error.site] as f64));
    // Ẑ acts before X̂: the phase is read off the pre-shift digit.
    let amps: BTreeMap<Vec<u8>, C64> = errored
        .amplitudes()
        .iter()
        .map(|(k, &a)| {
            let mut pre = k.clone();
            pre[error.site] = (pre[error.site] + 3 - error.x) % 3;
            (k.clone(), a * phase(&pre))
        })
        .collect();
    let input = CodeState::from_amplitudes(3, code.n(), amps).unwrap().to_dense().unwrap();
    let target = codeword.to_dense().unwrap();
    let reg = QuditRegister::from_amplitudes(&wires, input).unwrap();
    enumerate_branches(&circuit, reg)
        .unwrap()
        .iter()
        .map(|br| {
            let overlap: C64 = br.register.amplitudes().iter().zip(&target).map(|(a, b)| b.conj() * a).sum();
            overlap.norm_sqr() / br.weight()
        })
        .collect()
}

fn unit(n: usize, site: usize, power: u8) -> Vec<u8> {
    let mut v = vec![0u8; n];
    v[site] = power;
    v
}

#[test]
fn correction_circuit_removes_single_errors_on_dense_registers() {
    let code = qutrit_shor3();
    let cases = [
        (0u8, SitePauli { site: 0, x: 0, z: 0 }),
        (1, SitePauli { site: 4, x: 1, z: 0 }),
        (2, SitePauli { site: 8, x: 2, z: 0 }),
        (1, SitePauli { site: 3, x: 0, z: 1 }),
        (0, SitePauli { site: 7, x: 0, z: 2 }),
        (2, SitePauli { site: 5, x: 1, z: 2 }),
    ];
    for (beta, e) in cases {
        let fids = corrected_dense(&code, beta, e);
        assert!(!fids.is_empty());
        for f in fids {
            assert!((f - 1.0).abs() < 1e-10, "β̂ = {beta}, {e:?}: fidelity {f}");
        }
    }
}

#[test]
fn correction_circuit_fixes_bit_errors_of_the_repetition_code() {
    let code = repetition3();
    for beta in 0..3u8 {
        for site in 0..3 {
            for x in 1..3u8 {
                for f in corrected_dense(&code, beta, SitePauli { site, x, z: 0 }) {
                    assert!((f - 1.0).abs() < 1e-10);
                }
            }
        }
    }
}

// --------------------------------------------------------- Schur obstruction

#[test]
fn constant_multipliers_always_preserve_the_code() {
    for code in [repetition3(), qutrit_shor3()] {
        for c in 1..3u8 {
            assert_eq!(schur_violation(&code, &vec![c; code.n()]).unwrap(), None);
        }
    }
}

#[test]
fn repetition_code_with_multiplier_112_has_a_witness() {
    let w = schur_violation(&repetition3(), &[1, 1, 2]).unwrap().expect("a violation");
    assert_eq!(w.space, SchurSpace::CodewordSupport);
    assert_eq!(w.vector, vec![1, 1, 1]);
    assert_eq!(w.product, vec![1, 1, 2]);
    assert!(!repetition3().passes_z_checks(&w.product));
}

#[test]
fn exhaustive_scan_finds_only_constant_multipliers() {
    for code in [repetition3(), qutrit_shor3()] {
        let r = schur_obstruction_check(&code).unwrap();
        assert!(r.only_constant_multipliers, "{:?}", r.preserving);
        let preserving: BTreeSet<Vec<u8>> = r.preserving.into_iter().collect();
        let n = code.n();
        let constants: BTreeSet<Vec<u8>> = (0..3u8).map(|c| vec![c; n]).collect();
        assert_eq!(preserving, constants);
        assert!(r.witness.is_some());
    }
}

#[test]
fn naive_transversal_gate_between_equal_length_codes_fails() {
    let qubit = QuditCSSCode::qubit_phase_repetition(3).unwrap();
    let report = naive_transversal_cc(&qubit, &repetition3()).unwrap();
    let (u, _v, image) = report.witness.clone().expect("a violating pair");
    assert!(u.contains(&1) && u.contains(&0));
    assert!(!repetition3().passes_z_checks(&image));
    let worst = report.code_space_weights.iter().map(|r| r.2).fold(1.0, f64::min);
    assert!(worst < 1.0 - 1e-6, "{report:?}");
}

#[test]
fn naive_transversal_gate_with_a_bit_repetition_control_works() {
    let qubit = QuditCSSCode::new(2, 3, Vec::new(), vec![vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
    let report = naive_transversal_cc(&qubit, &repetition3()).unwrap();
    assert!(report.witness.is_none());
    for &(_, _, f) in &report.logical_fidelities {
        assert!((f - 1.0).abs() < TOL);
    }
}

// --------------------------------------------------------------- properties

/// Random orthogonal pair over F_3 on `n` qutrits: `H_Z` rows drawn from
/// the orthogonal complement of `H_X` by brute force.
fn random_code(n: usize, hx_rows: Vec<Vec<u8>>, picks: Vec<usize>) -> Option<QuditCSSCode> {
    let dot = |a: &[u8], b: &[u8]| a.iter().zip(b).map(|(&x, &y)| x as u32 * y as u32).sum::<u32>() % 3;
    let perp: Vec<Vec<u8>> = (0..3usize.pow(n as u32))
        .map(|mut x| {
            let mut v = vec![0u8; n];
            for s in v.iter_mut().rev() {
                *s = (x % 3) as u8;
                x /= 3;
            }
            v
        })
        .filter(|v| v.iter().any(|&d| d != 0) && hx_rows.iter().all(|h| dot(h, v) == 0))
        .collect();
    let hz: Vec<Vec<u8>> = picks.iter().filter(|_| !perp.is_empty()).map(|&i| perp[i % perp.len()].clone()).collect();
    QuditCSSCode::new(3, n, hx_rows, hz).ok()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn codewords_of_random_codes_are_stabilizer_eigenstates(
        n in 2usize..6,
        hx in prop::collection::vec(prop::collection::vec(0u8..3, 6), 0..3),
        picks in prop::collection::vec(0usize..1000, 0..3),
    ) {
        let hx: Vec<Vec<u8>> = hx.into_iter().map(|r| r[..n].to_vec()).collect();
        if let Some(code) = random_code(n, hx, picks) {
            for (_, state) in code.codewords().unwrap() {
                prop_assert!(code.stabilizer_deviation(&state) < 1e-12);
                prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-12);
            }
            let (dx, dz) = code.exhaustive_distances().unwrap();
            prop_assert!(dx >= 1 && dz >= 1);
        }
    }

    #[test]
    fn toy_gate_is_linear_on_random_logical_superpositions(
        re in prop::collection::vec(-1.0f64..1.0, 6),
        im in prop::collection::vec(-1.0f64..1.0, 6),
    ) {
        let (qubit, qutrit) = (shor3(), repetition3());
        let s = logical_cc(&qubit, &qutrit).unwrap();
        let zero = logical_patterns(&qubit, 0).unwrap();
        let one = logical_patterns(&qubit, 1).unwrap();
        // Σ c_{αβ} |α⟩_L|β̂⟩_L, built as a sum of product states.
        let mut input: BTreeMap<(u64, Vec<u8>), C64> = BTreeMap::new();
        let mut target: BTreeMap<(u64, Vec<u8>), C64> = BTreeMap::new();
        for alpha in 0..2u8 {
            for beta in 0..3u8 {
                let c = C64::new(re[(alpha * 3 + beta) as usize], im[(alpha * 3 + beta) as usize]);
                let pats = if alpha == 0 { &zero } else { &one };
                let out_beta = ((1 + alpha) * beta) % 3;
                for (word, map) in [(beta, &mut input), (out_beta, &mut target)] {
                    let st = ConcatState::product(3, pats, &qutrit.codeword(&[word]).unwrap()).unwrap();
                    for (p, k, a) in st.entries() {
                        *map.entry((p, k)).or_default() += c * a;
                    }
                }
            }
        }
        // Each pattern slice runs as its own product state.
        let mut by_pattern: BTreeMap<u64, BTreeMap<Vec<u8>, C64>> = BTreeMap::new();
        for ((p, k), a) in &input {
            by_pattern.entry(*p).or_default().insert(k.clone(), *a);
        }
        let one_amp = C64::new(1.0, 0.0);
        let mut parts = Vec::new();
        for (p, amps) in by_pattern {
            let cs = CodeState::from_amplitudes(3, 3, amps).unwrap();
            parts.push(ConcatState::product(3, &[(p, one_amp)].into_iter().collect(), &cs).unwrap());
        }
        let out: Vec<ConcatState> = parts
            .iter()
            .map(|st| {
                let br = run_schedule(&s, &qutrit, st, &[], false).unwrap();
                assert_eq!(br.len(), 1);
                br.into_iter().next().unwrap().state
            })
            .collect();
        let mut got: BTreeMap<(u64, Vec<u8>), C64> = BTreeMap::new();
        for st in &out {
            for (p, k, a) in st.entries() {
                *got.entry((p, k)).or_default() += a;
            }
        }
        let keys: BTreeSet<_> = got.keys().chain(target.keys()).cloned().collect();
        for k in keys {
            let d = got.get(&k).copied().unwrap_or_default() - target.get(&k).copied().unwrap_or_default();
            prop_assert!(d.norm() < 1e-12);
        }
    }
}
