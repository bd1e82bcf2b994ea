//! Three-point support patterns, helicity violation, gauge independence,
//! and the closed-form ratio: the fixed points of the amplitude conventions.

use mmb_core::amplitudes::{
    amplitude, gauge_independence_suite, helicity_state, state_homology_coords,
    three_point_closed_form,
};
use mmb_core::dgla::{build_gr, build_ym, DgLaSpec, InternalLieAlgebra};
use mmb_core::gamma::Sign;
use mmb_core::kinematics::sample_onshell_tuple;
use mmb_core::linalg::ExactMatrix;
use once_cell::sync::Lazy;

static YM: Lazy<DgLaSpec> = Lazy::new(|| build_ym(InternalLieAlgebra::sl2()).unwrap());
static GR: Lazy<DgLaSpec> = Lazy::new(|| build_gr().unwrap());

#[test]
fn transported_states_are_independent_cycles() {
    for spec in [&*YM, &*GR] {
        let t = sample_onshell_tuple(4, "++--", 5, None).unwrap();
        let sp = &t.spinors[0];
        let plus = helicity_state(spec, sp, Sign::Plus, 0, 3).unwrap();
        let minus = helicity_state(spec, sp, Sign::Minus, 0, 3).unwrap();
        let cp = state_homology_coords(spec, &plus, 11).unwrap();
        let cm = state_homology_coords(spec, &minus, 11).unwrap();
        let m = ExactMatrix::from_cols(vec![cp, cm]);
        assert_eq!(m.rank(), 2, "{:?}: independent homology classes", spec.label);
    }
}

#[test]
fn three_point_support_on_plus_branch() {
    for spec in [&*YM, &*GR] {
        // two-plus patterns are the nonzero ones on the shared-left branch
        let nonzero = sample_onshell_tuple(3, "++-", 7, Some(Sign::Plus)).unwrap();
        let a = amplitude(spec, &nonzero, 1).unwrap();
        assert!(
            !a.value.is_zero(),
            "{:?}: ++- supported on plus branch",
            spec.label
        );
        for hel in ["+++", "--+", "---", "-++"] {
            let t = sample_onshell_tuple(3, hel, 7, Some(Sign::Plus)).unwrap();
            let mut t = t;
            // keep internal labels fixed for comparability
            t.u_labels = vec![0, 1, 2 % spec.u.dim];
            let a = amplitude(spec, &t, 1).unwrap();
            if hel.matches('+').count() == 2 {
                assert!(!a.value.is_zero(), "{:?}: {hel} nonzero", spec.label);
            } else {
                assert!(
                    a.value.is_zero(),
                    "{:?}: {hel} must vanish on plus branch",
                    spec.label
                );
            }
        }
    }
}

#[test]
fn three_point_support_on_minus_branch() {
    for spec in [&*YM, &*GR] {
        let nonzero = sample_onshell_tuple(3, "--+", 9, Some(Sign::Minus)).unwrap();
        let a = amplitude(spec, &nonzero, 1).unwrap();
        assert!(!a.value.is_zero(), "{:?}", spec.label);
        let zero = sample_onshell_tuple(3, "++-", 9, Some(Sign::Minus)).unwrap();
        let a = amplitude(spec, &zero, 1).unwrap();
        assert!(a.value.is_zero(), "{:?}", spec.label);
    }
}

#[test]
fn three_point_ratio_to_closed_form_is_constant() {
    for spec in [&*YM, &*GR] {
        for (hel, branch) in [("++-", Sign::Plus), ("-+-", Sign::Minus)] {
            let mut ratios = Vec::new();
            for trial in 0..10u64 {
                let mut t = sample_onshell_tuple(3, hel, 100 + trial, Some(branch)).unwrap();
                t.u_labels = vec![0, 1, 2 % spec.u.dim];
                let a = amplitude(spec, &t, trial).unwrap();
                let c = three_point_closed_form(spec, &t).unwrap();
                assert!(!c.is_zero());
                ratios.push(a.value.div(&c).unwrap());
            }
            for r in &ratios[1..] {
                assert_eq!(
                    r, &ratios[0],
                    "{:?} {hel}: amplitude/closed-form constant",
                    spec.label
                );
            }
            assert!(!ratios[0].is_zero());
        }
    }
}

#[test]
fn closed_form_branch_mismatch_rejected() {
    let t = sample_onshell_tuple(3, "+++", 3, Some(Sign::Plus)).unwrap();
    assert!(matches!(
        three_point_closed_form(&YM, &t),
        Err(mmb_core::Error::WrongBranch)
    ));
}

#[test]
fn helicity_violation_vanishes_at_four_points() {
    for spec in [&*YM, &*GR] {
        for hel in ["-+++", "+---"] {
            for trial in 0..3u64 {
                let t = sample_onshell_tuple(4, hel, 40 + trial, None).unwrap();
                let a = amplitude(spec, &t, trial).unwrap();
                assert!(a.value.is_zero(), "{:?}: {hel} vanishes", spec.label);
            }
        }
        // and the generic two-two pattern does not
        let t = sample_onshell_tuple(4, "--++", 77, None).unwrap();
        let a = amplitude(spec, &t, 5).unwrap();
        assert!(!a.value.is_zero(), "{:?}: --++ generic", spec.label);
    }
}

#[test]
fn gauge_independence_four_points() {
    for spec in [&*YM, &*GR] {
        let rep = gauge_independence_suite(spec, 4, "--++", 2, 3, 1234).unwrap();
        assert!(rep.all_equal, "{:?}", spec.label);
        assert!(rep.values.iter().any(|v| !v.is_zero()));
    }
}

#[test]
fn input_permutation_invariance_four_points() {
    for spec in [&*YM, &*GR] {
        let t = sample_onshell_tuple(4, "-+-+", 15, None).unwrap();
        let base = amplitude(spec, &t, 3).unwrap().value;
        for perm in [[1usize, 0, 2], [2, 0, 1], [0, 2, 1]] {
            let mut tp = t.clone();
            for (slot, &src) in perm.iter().enumerate() {
                tp.spinors[slot] = t.spinors[src].clone();
                tp.helicities[slot] = t.helicities[src];
                tp.u_labels[slot] = t.u_labels[src];
            }
            let a = amplitude(spec, &tp, 3).unwrap().value;
            assert_eq!(a, base, "{:?}: inputs commute, perm {perm:?}", spec.label);
        }
    }
}
