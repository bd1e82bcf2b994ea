//! Helicity states, the scalar pairing at the output leg, and the full tree
//! amplitude: a sum over all trivalent trees evaluated on transported
//! helicity classes, paired against a canonical functional on the output
//! homology.
//!
//! Conventions (frozen; see docs/CONVENTIONS.md): a leg labeled `+` carries
//! the left-spinor power line of the section the amplitude represents. As a
//! multilinear functional the evaluator therefore consumes the dual class at
//! every input leg — the state built from the opposite spinor power — and
//! reads the labeled component at the output leg. The output leg is the last
//! one; its momentum entering the trees is the negative of the stored leg
//! momentum, realized by negating the left spinor (degreewise sign reversal
//! is invisible at integer helicity).

use crate::dgla::{DgLaSpec, Element, Theory};
use crate::error::{Error, Result};
use crate::gamma::{pair_state, read_pair_coefficient, Sign};
use crate::homotopy::{optimal_homotopy, zigzag_equivalence};
use crate::kinematics::{KinematicTuple, SpinorPair};
use crate::linalg::build_contraction;
use crate::momentum::{eps_pair, Mom};
use crate::scalar::Gq;
use crate::trees::{build_homotopy_cache, double_factorial_count, tree_sum_all};
use serde::Serialize;

/// A realized helicity class: a degree-1 cycle of the theory at `k = v w^T`.
#[derive(Clone, Debug)]
pub struct HelicityState {
    pub sp: SpinorPair,
    pub sign: Sign,
    pub u_label: usize,
    pub element: Element,
}

/// Builds the degree-1 cycle representing the helicity line of the given
/// sign at `k = v w^T`, transported from the helicity pair into the theory
/// and tensored with the chosen internal basis vector.
pub fn helicity_state(
    spec: &DgLaSpec,
    sp: &SpinorPair,
    sign: Sign,
    u_label: usize,
    seed: u64,
) -> Result<HelicityState> {
    let k = sp.mom();
    if k.is_zero() {
        return Err(Error::SingularMomentum);
    }
    let ses = &spec.ses;
    let st = pair_state(&sp.v, &sp.w, sign, spec.two_h);
    let mut gamma_total = vec![Gq::zero(); ses.gamma_pair.grading.total()];
    gamma_total[..st.len()].clone_from_slice(&st);
    let z = zigzag_equivalence(ses, &k, seed)?;
    let cpp_vec = {
        let mut v = ses.psi.apply(&gamma_total);
        // keep only the degree-2 block of the sub complex (the image of the
        // gamma degree-1 block); psi is block aligned so this is automatic,
        // but stay defensive about stray coordinates
        let g = &ses.cpp.grading;
        for (idx, x) in v.iter_mut().enumerate() {
            if g.degree_of(idx) != 2 {
                *x = Gq::zero();
            }
        }
        v
    };
    let fiber_vec = z.r_map.apply(&cpp_vec);
    // tensor with the internal algebra basis vector
    let du = ses.dim_u;
    if u_label >= spec.u.dim {
        return Err(Error::Construction("internal label out of range".into()));
    }
    let mut v = vec![Gq::zero(); spec.dim()];
    for (f, x) in fiber_vec.iter().enumerate() {
        if !x.is_zero() {
            v[f * du + u_label] = x.clone();
        }
    }
    let element = Element {
        degree: 1,
        mom: k,
        v,
    };
    if element.is_zero() {
        return Err(Error::Construction("state transported to zero".into()));
    }
    debug_assert!(spec.apply_d(&element).is_zero(), "state must be a cycle");
    Ok(HelicityState {
        sp: sp.clone(),
        sign,
        u_label,
        element,
    })
}

/// The canonical functional machinery at an output momentum: a zig-zag
/// transport to the helicity pair and the inverse of the induced homology
/// differential. Reusable across internal-algebra duals and signs.
pub struct OutputReader {
    out_sp: SpinorPair,
    z: crate::homotopy::ZigZag,
    oh: crate::homotopy::OptimalHomotopy,
}

impl OutputReader {
    pub fn new(spec: &DgLaSpec, out_sp: &SpinorPair, seed: u64) -> Result<OutputReader> {
        let k = out_sp.mom();
        if k.is_zero() {
            return Err(Error::SingularMomentum);
        }
        let ses = &spec.ses;
        let z = zigzag_equivalence(ses, &k, seed ^ 0x5bd1_e995)?;
        let oh = optimal_homotopy(&ses.gamma_pair, &k, seed ^ 0xc2b2_ae35)?;
        Ok(OutputReader {
            out_sp: out_sp.clone(),
            z,
            oh,
        })
    }

    /// Pairs a degree-2 output element against the functional of the given
    /// sign, with `u_dual` as plain dual coordinates on the internal algebra:
    /// transport to the helicity pair, apply the canonical inverse
    /// differential on homology, read the sign's component normalized by the
    /// opposite spinor power.
    pub fn read(&self, spec: &DgLaSpec, sign: Sign, u_dual: &[Gq], y: &Element) -> Result<Gq> {
        let ses = &spec.ses;
        let du = ses.dim_u;
        assert_eq!(y.v.len(), spec.dim());
        let mut y_fiber = vec![Gq::zero(); ses.fiber_dim];
        for (f, slot) in y_fiber.iter_mut().enumerate() {
            let mut acc = Gq::zero();
            for b in 0..du {
                if !u_dual[b].is_zero() && !y.v[f * du + b].is_zero() {
                    acc += &(&u_dual[b] * &y.v[f * du + b]);
                }
            }
            *slot = acc;
        }
        let cpp_vec = self.z.l_map.apply(&y_fiber);
        let gamma_vec = ses.psi_inv.apply(&cpp_vec);
        let hcoords = self.oh.base.p.apply(&gamma_vec);
        let h1 = self.oh.hprime_q.apply(&hcoords);
        let g1 = self.oh.base.i.apply(&h1);
        let dim1 = ses.gamma_pair.grading.dim(1);
        read_pair_coefficient(&g1[..dim1], &self.out_sp.v, &self.out_sp.w, sign, spec.two_h)
            .ok_or_else(|| Error::Construction("output class is not a helicity line".into()))
    }
}

/// One-shot read; see `OutputReader`.
pub fn output_covector_value(
    spec: &DgLaSpec,
    out_sp: &SpinorPair,
    sign: Sign,
    u_dual: &[Gq],
    y: &Element,
    seed: u64,
) -> Result<Gq> {
    OutputReader::new(spec, out_sp, seed)?.read(spec, sign, u_dual, y)
}

#[derive(Clone, Debug, Serialize)]
pub struct AmplitudeValue {
    pub value: Gq,
    pub trees_evaluated: u64,
}

/// The input class consumed at a leg labeled with a sign: the opposite
/// spinor power (the functional slot of the labeled section).
fn input_sign(label: Sign) -> Sign {
    label.flip()
}

/// The summed tree expansion before the output pairing: the degree-2 root
/// element at minus the last leg's momentum, and the output spinor pair.
pub fn amplitude_root(
    spec: &DgLaSpec,
    kin: &KinematicTuple,
    seed: u64,
) -> Result<(Element, SpinorPair)> {
    let n_legs = kin.n();
    assert!(n_legs >= 3);
    if !kin.is_generic(None) {
        return Err(Error::OnShellInternalLine);
    }
    let n = n_legs - 1;
    let mut inputs = Vec::with_capacity(n);
    for i in 0..n {
        let st = helicity_state(
            spec,
            &kin.spinors[i],
            input_sign(kin.helicities[i]),
            kin.u_labels[i] % spec.u.dim,
            seed ^ ((i as u64 + 1) * 0x9e37_79b9),
        )?;
        inputs.push(st.element);
    }
    let moms: Vec<Mom> = (0..n).map(|i| kin.mom(i)).collect();
    let cache = build_homotopy_cache(spec, &moms, seed)?;
    let root = tree_sum_all(spec, &cache, &inputs)?;
    // output leg: momentum is minus the stored one
    let out_leg = &kin.spinors[n];
    let out_sp = SpinorPair {
        v: [-&out_leg.v[0], -&out_leg.v[1]],
        w: out_leg.w.clone(),
    };
    debug_assert_eq!(root.mom, out_sp.mom());
    Ok((root, out_sp))
}

/// Evaluates the tree amplitude of the labeled tuple: legs `1..N-1` are
/// inputs, leg `N` is the output, read through the invariant form at its
/// internal label. Homotopy data is seeded; the value is independent of the
/// seed.
pub fn amplitude(spec: &DgLaSpec, kin: &KinematicTuple, seed: u64) -> Result<AmplitudeValue> {
    let n = kin.n() - 1;
    let (root, out_sp) = amplitude_root(spec, kin, seed)?;
    let u_dual: Vec<Gq> = (0..spec.u.dim)
        .map(|b| spec.u.form[(kin.u_labels[n] % spec.u.dim, b)].clone())
        .collect();
    let value = output_covector_value(spec, &out_sp, kin.helicities[n], &u_dual, &root, seed)?;
    Ok(AmplitudeValue {
        value,
        trees_evaluated: double_factorial_count(n),
    })
}

/// Closed-form three-point value on a branch: the epsilon power of the two
/// same-sign spinors times the internal structure constant.
pub fn three_point_closed_form(spec: &DgLaSpec, kin: &KinematicTuple) -> Result<Gq> {
    assert_eq!(kin.n(), 3);
    let branch = kin.branch.ok_or(Error::WrongBranch)?;
    let plus_count = kin
        .helicities
        .iter()
        .filter(|s| **s == Sign::Plus)
        .count();
    let h = (spec.two_h / 2) as u32;
    let (pair_legs, use_w): (Vec<usize>, bool) = match branch {
        Sign::Plus => {
            if plus_count != 2 {
                return Err(Error::WrongBranch);
            }
            (
                (0..3).filter(|&i| kin.helicities[i] == Sign::Plus).collect(),
                true,
            )
        }
        Sign::Minus => {
            if plus_count != 1 {
                return Err(Error::WrongBranch);
            }
            (
                (0..3)
                    .filter(|&i| kin.helicities[i] == Sign::Minus)
                    .collect(),
                false,
            )
        }
    };
    let (p, q) = (pair_legs[0], pair_legs[1]);
    let factor = if use_w {
        eps_pair(&kin.spinors[p].w, &kin.spinors[q].w)
    } else {
        eps_pair(&kin.spinors[p].v, &kin.spinors[q].v)
    };
    let mut value = factor.pow(h);
    // structure-constant factor: <[e_a, e_b], e_c> with the leg order
    let labels: Vec<usize> = kin.u_labels.iter().map(|l| l % spec.u.dim).collect();
    if spec.label == Theory::Ym {
        let br = &spec.u.bracket[labels[0]][labels[1]];
        let mut acc = Gq::zero();
        for (t, c) in br.iter().enumerate() {
            if !c.is_zero() {
                acc += &(c * &spec.u.form[(t, labels[2])]);
            }
        }
        value = &value * &acc;
    }
    Ok(value)
}

/// Runs several homotopy-data draws on each of several sampled tuples and
/// reports exact equality across the draws.
#[derive(Clone, Debug, Serialize)]
pub struct GaugeReport {
    pub trials: usize,
    pub seeds_per_trial: usize,
    pub all_equal: bool,
    pub values: Vec<Gq>,
}

pub fn gauge_independence_suite(
    spec: &DgLaSpec,
    n: usize,
    helicities: &str,
    trials: usize,
    seeds_per_trial: usize,
    seed: u64,
) -> Result<GaugeReport> {
    use rayon::prelude::*;
    // evaluations are independent; the reduction below is order-fixed
    let evals: Result<Vec<(usize, Gq)>> = (0..trials * seeds_per_trial)
        .into_par_iter()
        .map(|idx| {
            let t = idx / seeds_per_trial;
            let s = idx % seeds_per_trial;
            let kin = crate::kinematics::sample_onshell_tuple(
                n,
                helicities,
                seed ^ ((t as u64 + 1) * 131),
                None,
            )?;
            let a = amplitude(spec, &kin, seed ^ 0xdead ^ ((s as u64 + 1) * 7919))?;
            Ok((t, a.value))
        })
        .collect();
    let mut per_trial: Vec<Vec<Gq>> = vec![Vec::new(); trials];
    let mut evals = evals?;
    evals.sort_by_key(|(t, _)| *t);
    for (t, v) in evals {
        per_trial[t].push(v);
    }
    let mut all_equal = true;
    let mut values = Vec::new();
    for trial_vals in &per_trial {
        for v in &trial_vals[1..] {
            if v != &trial_vals[0] {
                all_equal = false;
            }
        }
        values.push(trial_vals[0].clone());
    }
    Ok(GaugeReport {
        trials,
        seeds_per_trial,
        all_equal,
        values,
    })
}

/// Homology coordinates of a transported state: used to check that plus and
/// minus states at the same momentum stay independent in homology.
pub fn state_homology_coords(
    spec: &DgLaSpec,
    st: &HelicityState,
    seed: u64,
) -> Result<Vec<Gq>> {
    let k = st.sp.mom();
    let d = spec.eval_d(&k);
    let c = build_contraction(&d, spec.grading(), seed)?;
    Ok(c.p.apply(&st.element.v))
}
