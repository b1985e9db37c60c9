use genpair_core::bethe::{n1_energy, solve_nonzero, solve_zero, SolverOptions};
use genpair_core::model::{builtin, validate_model, ModelSpace, RawShell};
use genpair_core::oracle::{diagonalize_sector, zero_multiplicity};
use genpair_core::spectrum::{full_spectrum, spectrum_report, Mode};
use genpair_core::state::{nonzero_state, verify_eigenpair};
use proptest::prelude::*;

// lowest levels from exact diagonalization, frozen
const TABLE1A: [f64; 7] = [
    0.0,
    2.6,
    4.083630430472391,
    4.7352807048381935,
    4.735280704838194,
    4.083630430472392,
    2.6,
];
const SHELL6_MIDDLE: f64 = 14.27061972996402;
const SHELL5_N6: f64 = 9.319421030706371;

#[test]
fn frozen_lowest_levels() {
    let opts = SolverOptions::default();
    let m = builtin::get("table1a").unwrap();
    for (n, &want) in TABLE1A.iter().enumerate() {
        let got = full_spectrum(&m, n, Mode::Cross, &opts)
            .unwrap()
            .lowest_level();
        assert!((got - want).abs() < 1e-10, "N={n}: {got}");
    }
    let shell5 = builtin::get("table2-shell5").unwrap();
    let got = solve_nonzero(&shell5, 6, &opts, None).unwrap().solutions[0].h;
    assert!((got - SHELL5_N6).abs() < 1e-10);
    let shell6 = builtin::get("table2-shell6").unwrap();
    for n in [8, 9] {
        let got = solve_nonzero(&shell6, n, &opts, None).unwrap().solutions[0].h;
        assert!((got - SHELL6_MIDDLE).abs() < 1e-10, "N={n}: {got}");
    }
}

#[test]
fn published_values_that_reproduce() {
    let opts = SolverOptions::default();
    let a = builtin::get("table1a").unwrap();
    for (n, published) in [(1, 2.6), (2, 4.083), (3, 4.735), (5, 4.084), (6, 2.600)] {
        let got = full_spectrum(&a, n, Mode::Bethe, &opts)
            .unwrap()
            .lowest_level();
        assert!((got - published).abs() < 5e-3, "N={n}: {got}");
    }
    let shell6 = builtin::get("table2-shell6").unwrap();
    assert!((shell6.weighted_capacity() - 3.220).abs() < 1e-9);
    assert!((builtin::get("table2-shell5").unwrap().weighted_capacity() - 2.86).abs() < 1e-9);
}

#[test]
fn full_report_is_complete_and_covers_every_state() {
    let opts = SolverOptions::default();
    for name in ["fig1", "table1c", "table2-shell5"] {
        let m = builtin::get(name).unwrap();
        let report = spectrum_report(name, &m, 0..=m.omega_total(), Mode::Cross, &opts).unwrap();
        assert!(report.is_complete(), "{name}");
        for s in &report.sectors {
            assert_eq!(s.total_degeneracy(), s.dim, "{name} N={}", s.pairs);
        }
    }
}

// generic weights: integer ratios can satisfy the codimension-one condition
// for a root pair collapsing onto a capacity-one pole
fn model_strategy() -> impl Strategy<Value = ModelSpace> {
    prop::collection::vec((1usize..=3, 0.05f64..1.0), 1..=3)
        .prop_filter("separated couplings", |shells| {
            let mut w: Vec<f64> = shells.iter().map(|s| s.1).collect();
            w.sort_by(f64::total_cmp);
            w.windows(2).all(|p| p[1] - p[0] > 1e-3)
        })
        .prop_map(|shells| {
            let total: f64 = shells.iter().map(|s| s.1).sum();
            let raw: Vec<RawShell> = shells
                .iter()
                .enumerate()
                .map(|(j, &(omega, w))| RawShell {
                    label: format!("s{j}"),
                    two_j: None,
                    omega: Some(omega as i64),
                    c_squared: w / total,
                })
                .collect();
            validate_model(&raw).unwrap()
        })
}

#[test]
fn collapsed_pair_zero_mode_is_flagged() {
    let raw: Vec<RawShell> = [(1, 4.0), (1, 12.0), (2, 3.0)]
        .iter()
        .enumerate()
        .map(|(j, &(omega, w))| RawShell {
            label: format!("s{j}"),
            two_j: None,
            omega: Some(omega),
            c_squared: w / 19.0,
        })
        .collect();
    let m = validate_model(&raw).unwrap();
    let opts = SolverOptions::default();
    assert_eq!(zero_multiplicity(&m, 2), 1);
    let sector = full_spectrum(&m, 2, Mode::Cross, &opts).unwrap();
    assert_eq!(sector.expected_zero, 1);
    assert_eq!(sector.bethe_zero, Some(0));
    assert!(!sector.is_complete());
    // the nonzero levels are unaffected
    let eig = diagonalize_sector(&m, 2).unwrap();
    assert_eq!(
        solve_nonzero(&m, 2, &opts, None).unwrap().solutions.len(),
        eig.nonzero_levels().len()
    );
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn rapidity_levels_match_oracle(m in model_strategy()) {
        let opts = SolverOptions::default();
        for n in 1..=m.omega_total() {
            let eig = diagonalize_sector(&m, n).unwrap();
            let oracle = eig.nonzero_levels();
            let mut found = if n == 1 {
                vec![n1_energy(&m)]
            } else {
                solve_nonzero(&m, n, &opts, None).unwrap().solutions.iter().map(|s| s.h).collect()
            };
            found.sort_by(|a, b| b.total_cmp(a));
            prop_assert_eq!(found.len(), oracle.len(), "N={}", n);
            for (h, e) in found.iter().zip(&oracle) {
                prop_assert!((h - e).abs() < 1e-8 * e.max(1.0), "N={}: {} vs {}", n, h, e);
            }
            let zeros = solve_zero(&m, n, &opts).unwrap().roots.len();
            prop_assert_eq!(zeros, zero_multiplicity(&m, n));
        }
    }

    #[test]
    fn nonzero_spectrum_mirrors(m in model_strategy()) {
        let full = m.omega_total();
        for n in 1..=full {
            let a = diagonalize_sector(&m, n).unwrap().nonzero_levels();
            let b = diagonalize_sector(&m, full + 1 - n).unwrap().nonzero_levels();
            prop_assert_eq!(a.len(), b.len());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10 * x.max(1.0));
            }
        }
    }

    #[test]
    fn rebuilt_states_are_unit_eigenvectors(m in model_strategy()) {
        let opts = SolverOptions::default();
        for n in 2..=m.omega_total() {
            for sol in solve_nonzero(&m, n, &opts, None).unwrap().solutions {
                let st = nonzero_state(&m, &sol).unwrap();
                let norm: f64 = st.amplitudes.iter().map(|a| a.norm_sqr()).sum();
                prop_assert!((norm - 1.0).abs() < 1e-12);
                let chk = verify_eigenpair(&m, &st, sol.h).unwrap();
                prop_assert!(chk.residual < 1e-8 && chk.overlap > 1.0 - 1e-8, "N={}: {:?}", n, chk);
            }
        }
    }
}
