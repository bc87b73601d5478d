use std::f64::consts::PI;

use cvbell::bell::{
    ch_parity_formalism, ch_q_formalism, chsh_gbw, k_of_gamma, wrap_angle, BellFunctional, BellSettings, EvalPath,
    Formalism, FunctionalOptions, StateModel, CH_LOWER_BOUND, CH_UPPER_BOUND, CIRELSON_BOUND,
};
use cvbell::fock::{make_ecs, make_tmss, FockCutoff};
use cvbell::phase_space::{q_tmss, q_two_mode, wigner_tmss, PhasePoint, WignerOracle};
use cvbell::Complex64;
use proptest::prelude::*;
use proptest::strategy::ValueTree;

fn point() -> impl Strategy<Value = PhasePoint> {
    prop::array::uniform4(-1.5f64..1.5)
        .prop_map(|[a, b, c, d]| PhasePoint::new(Complex64::new(a, b), Complex64::new(c, d)))
}

fn angles() -> impl Strategy<Value = BellSettings> {
    prop::array::uniform4(-PI..PI).prop_map(|[a, b, c, d]| BellSettings::angles(a, b, c, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn wrapped_angles_are_equivalent(x in -100.0f64..100.0) {
        let w = wrap_angle(x);
        prop_assert!(w > -PI && w <= PI);
        prop_assert!((w.sin() - x.sin()).abs() < 1e-9 && (w.cos() - x.cos()).abs() < 1e-9);
    }

    #[test]
    fn k_is_a_fidelity(g in 0.01f64..30.0) {
        let k = k_of_gamma(g).unwrap();
        prop_assert!(k > 0.0 && k <= 1.0);
    }

    #[test]
    fn ch_parity_stays_in_quantum_range(s in angles(), r in 0.0f64..4.0, g in 0.05f64..6.0) {
        for m in [StateModel::Tmss { r }, StateModel::Ecs { gamma: g }, StateModel::SinglePhoton] {
            let v = ch_parity_formalism(m, &s).unwrap();
            prop_assert!(v >= CH_LOWER_BOUND - 1e-12 && v <= CH_UPPER_BOUND + 1e-12);
        }
    }

    #[test]
    fn ch_q_stays_in_quantum_range(p in point(), q in point(), g in 0.05f64..3.0) {
        let s = BellSettings::displacements(p.alpha, q.alpha, p.beta, q.beta);
        for m in [StateModel::Tmss { r: 1.0 }, StateModel::Ecs { gamma: g }, StateModel::SinglePhoton] {
            let v = ch_q_formalism(m, &s).unwrap();
            prop_assert!(v >= CH_LOWER_BOUND - 1e-12 && v <= CH_UPPER_BOUND + 1e-12);
        }
    }

    #[test]
    fn gbw_respects_cirelson(p in point(), q in point(), r in 0.0f64..3.0) {
        let s = BellSettings::displacements(p.alpha, q.alpha, p.beta, q.beta);
        let v = chsh_gbw(StateModel::Tmss { r }, &s).unwrap();
        prop_assert!(v.abs() <= CIRELSON_BOUND + 1e-12);
    }
}

#[test]
fn tmss_phase_space_closed_forms_match_truncation() {
    let r = 0.9;
    let st = make_tmss(r, FockCutoff::for_tmss(r)).unwrap();
    let oracle = WignerOracle::new(&st, 2.2);
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for _ in 0..30 {
        let p = point().new_tree(&mut runner).unwrap().current();
        assert!((wigner_tmss(p, r).unwrap() - oracle.wigner(p)).abs() < 1e-9);
        assert!((q_tmss(p, r).unwrap() - q_two_mode(p, &st)).abs() < 1e-12);
    }
}

#[test]
fn analytic_and_matrix_paths_agree() {
    let matrix = FunctionalOptions {
        path: EvalPath::Matrix,
        ..FunctionalOptions::default()
    };
    let cases = [
        (StateModel::Ecs { gamma: 1.2 }, Formalism::Pseudospin),
        (StateModel::Tmss { r: 0.6 }, Formalism::Gbw),
        (StateModel::Ecs { gamma: 0.8 }, Formalism::ChQ),
        (StateModel::Tmss { r: 1.0 }, Formalism::ChParity),
    ];
    let mut runner = proptest::test_runner::TestRunner::deterministic();
    for (m, f) in cases {
        let a = BellFunctional::new(m, f, FunctionalOptions::default()).unwrap();
        let b = BellFunctional::new(m, f, matrix).unwrap();
        for _ in 0..10 {
            let x: Vec<f64> = a
                .bounds()
                .iter()
                .map(|&(lo, hi)| (lo..hi).new_tree(&mut runner).unwrap().current())
                .collect();
            assert!((a.eval(&x) - b.eval(&x)).abs() < 1e-8, "{m:?} {f:?}");
        }
    }
}

#[test]
fn custom_states_use_the_matrix_path() {
    let st = make_ecs(1.0, FockCutoff::for_ecs(1.0)).unwrap();
    let custom = BellFunctional::new(st, Formalism::Pseudospin, FunctionalOptions::default()).unwrap();
    let model = BellFunctional::new(StateModel::Ecs { gamma: 1.0 }, Formalism::Pseudospin, FunctionalOptions::default()).unwrap();
    let x = [0.3, 0.1, 1.2, -0.4, 2.0, 0.7, -0.9, 1.5];
    assert!((custom.eval(&x) - model.eval(&x)).abs() < 1e-10);
}
