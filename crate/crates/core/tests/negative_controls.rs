//! Deliberate corruption must be detected: these tests guard against the
//! checks silently passing on broken data.

use mmb_core::amplitudes::{amplitude, helicity_state, output_covector_value};
use mmb_core::dgla::{build_ym, DgLaSpec, InternalLieAlgebra};
use mmb_core::kinematics::{sample_onshell_tuple, SpinorPair};
use mmb_core::momentum::Mom;
use mmb_core::scalar::Gq;
use mmb_core::trees::{build_homotopy_cache, enumerate_trees, eval_tree};
use once_cell::sync::Lazy;

static YM: Lazy<DgLaSpec> = Lazy::new(|| build_ym(InternalLieAlgebra::sl2()).unwrap());

/// Dropping one tree from the sum breaks gauge independence: the truncated
/// value must differ between homotopy draws.
#[test]
fn dropped_tree_breaks_gauge_independence() {
    let spec = &*YM;
    let t = sample_onshell_tuple(4, "--++", 5, None).unwrap();
    let full = amplitude(spec, &t, 1).unwrap().value;
    assert_eq!(full, amplitude(spec, &t, 2).unwrap().value);
    let mut truncated = Vec::new();
    for seed in [1u64, 2] {
        let n = 3usize;
        let mut inputs = Vec::new();
        for i in 0..n {
            let st = helicity_state(
                spec,
                &t.spinors[i],
                t.helicities[i].flip(),
                t.u_labels[i] % spec.u.dim,
                seed ^ ((i as u64 + 1) * 0x9e37_79b9),
            )
            .unwrap();
            inputs.push(st.element);
        }
        let moms: Vec<Mom> = (0..n).map(|i| t.mom(i)).collect();
        let cache = build_homotopy_cache(spec, &moms, seed).unwrap();
        let trees = enumerate_trees(n);
        // sum all but the last tree
        let mut root: Option<mmb_core::dgla::Element> = None;
        for tr in &trees[..trees.len() - 1] {
            let v = eval_tree(tr, spec, &cache, &inputs).unwrap();
            root = Some(match root {
                None => v,
                Some(a) => a.add(&v),
            });
        }
        let root = root.unwrap();
        let out_leg = &t.spinors[n];
        let out_sp = SpinorPair {
            v: [-&out_leg.v[0], -&out_leg.v[1]],
            w: out_leg.w.clone(),
        };
        let u_dual: Vec<Gq> = (0..spec.u.dim)
            .map(|b| spec.u.form[(t.u_labels[n] % spec.u.dim, b)].clone())
            .collect();
        let v = output_covector_value(spec, &out_sp, t.helicities[n], &u_dual, &root, seed)
            .unwrap();
        truncated.push(v);
    }
    assert_ne!(
        truncated[0], truncated[1],
        "a truncated tree sum must be gauge dependent"
    );
}

/// A corrupted bracket constant fails the axiom battery.
#[test]
fn corrupted_bracket_detected() {
    let mut bad = YM.clone();
    bad.bracket.corrupt_for_testing();
    assert!(!bad.check_axioms(50, 3).all_pass());
}
