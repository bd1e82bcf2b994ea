//! The acceptance battery: every structural claim the crate makes, run as an
//! exact pass/fail check. The `acceptance` integration test and the CLI
//! `suite` subcommand both drive this module.

use crate::amplitudes::{amplitude, gauge_independence_suite, three_point_closed_form};
use crate::dgla::{build_gr, build_ym, DgLaSpec, InternalLieAlgebra, Theory};
use crate::error::Result;
use crate::gamma::{build_gamma, build_gamma_pair, Sign};
use crate::homotopy::{abc_connect, hpl_perturb, optimal_homotopy, trivial_homotopy};
use crate::kinematics::{
    pencil_through_divisor, sample_onshell_tuple, DivisorId, KinematicTuple,
};
use crate::linalg::{build_contraction, ExactMatrix};
use crate::momentum::Mom;
use crate::residues::{
    calibrate_constant, check_factorization, extract_residue, factorization_trial,
    labels_for_mask, relative_residue_identity, three_term_cancellation,
};
use crate::scalar::Gq;
use crate::trees::{
    build_homotopy_cache, double_factorial_count, enumerate_trees, eval_tree,
    planar_embeddings,
};
use once_cell::sync::Lazy;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::Serialize;
use std::time::Instant;

static YM: Lazy<DgLaSpec> = Lazy::new(|| build_ym(InternalLieAlgebra::sl2()).expect("ym"));
static GR: Lazy<DgLaSpec> = Lazy::new(|| build_gr().expect("gr"));

pub fn ym_spec() -> &'static DgLaSpec {
    &YM
}

pub fn gr_spec() -> &'static DgLaSpec {
    &GR
}

pub fn spec_for(theory: Theory) -> &'static DgLaSpec {
    match theory {
        Theory::Ym => ym_spec(),
        Theory::Gr => gr_spec(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub pass: bool,
    pub details: String,
    pub millis: u128,
}

fn run_criterion(
    id: usize,
    name: &str,
    f: impl FnOnce() -> Result<(bool, String)>,
) -> CriterionResult {
    let t0 = Instant::now();
    let (pass, details) = match f() {
        Ok(x) => x,
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name: name.into(),
        pass,
        details,
        millis: t0.elapsed().as_millis(),
    }
}

fn random_onshell_mom(rng: &mut ChaCha12Rng) -> Mom {
    loop {
        let v = [Gq::random_nonzero(rng, 4), Gq::random_int(rng, 4)];
        let w = [Gq::random_nonzero(rng, 4), Gq::random_int(rng, 4)];
        let k = Mom::from_spinors(&v, &w);
        if !k.is_zero() {
            return k;
        }
    }
}

fn random_offshell_mom(rng: &mut ChaCha12Rng) -> Mom {
    loop {
        let k = Mom::from_ints(
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
            rng.gen_range(-4..=4),
        );
        if !k.det().is_zero() {
            return k;
        }
    }
}

// 1. dgLa axioms
fn c1(quick: bool) -> CriterionResult {
    run_criterion(1, "dgLa axioms (d^2 symbolic; Leibniz, antisymmetry, Jacobi)", || {
        let samples = if quick { 20 } else { 100 };
        let ym = YM.check_axioms(samples, 11);
        let gr = GR.check_axioms(samples, 12);
        Ok((
            ym.all_pass() && gr.all_pass(),
            format!("ym {ym:?}; gr {gr:?}"),
        ))
    })
}

// 2. dimensions, frozen blocks
fn c2() -> CriterionResult {
    run_criterion(2, "graded dimensions and frozen helicity-2 blocks", || {
        let mut ok = YM.grading().dims == vec![3, 21, 21, 3]
            && GR.grading().dims == vec![10, 40, 50, 24, 4];
        // frozen 8x5 and 3x8 blocks at a symbolic sample point
        let c = build_gamma(4, Sign::Plus)?;
        let k = Mom::from_ints(1, 2, 3, 5);
        let d = c.eval_d(&k);
        let g = &c.grading;
        let expect1 = ExactMatrix::from_int_rows(&[
            &[1, 3, 0, 0, 0],
            &[2, 5, 0, 0, 0],
            &[0, 1, 3, 0, 0],
            &[0, 2, 5, 0, 0],
            &[0, 0, 1, 3, 0],
            &[0, 0, 2, 5, 0],
            &[0, 0, 0, 1, 3],
            &[0, 0, 0, 2, 5],
        ]);
        let expect2 = ExactMatrix::from_int_rows(&[
            &[2, -1, 5, -3, 0, 0, 0, 0],
            &[0, 0, 2, -1, 5, -3, 0, 0],
            &[0, 0, 0, 0, 2, -1, 5, -3],
        ]);
        for (deg, expect) in [(1i64, expect1), (2, expect2)] {
            let (ro, rd) = (g.offset(deg + 1), g.dim(deg + 1));
            let (co, cd) = (g.offset(deg), g.dim(deg));
            let mut m = ExactMatrix::zeros(rd, cd);
            for r in 0..rd {
                for cc in 0..cd {
                    m[(r, cc)] = d[(ro + r, co + cc)].clone();
                }
            }
            ok &= m == expect;
        }
        Ok((ok, "ym (3,21,21,3); gr (10,40,50,24,4); blocks verbatim".into()))
    })
}

// 3. homology dimensions
fn c3(quick: bool) -> CriterionResult {
    run_criterion(3, "homology dimensions on and off the cone", || {
        let points = if quick { 5 } else { 20 };
        let mut rng = ChaCha12Rng::seed_from_u64(33);
        let mut ok = true;
        for _ in 0..points {
            let on = random_onshell_mom(&mut rng);
            let off = random_offshell_mom(&mut rng);
            for two_h in [2u32, 4] {
                let g = build_gamma(two_h, Sign::Plus)?;
                ok &= g.homology_dims(&on) == vec![1, 1, 0];
                ok &= g.homology_dims(&off) == vec![0, 0, 0];
                let gm = build_gamma(two_h, Sign::Minus)?;
                ok &= gm.homology_dims(&on) == vec![1, 1, 0];
                ok &= gm.homology_dims(&off) == vec![0, 0, 0];
            }
            ok &= YM.complex.homology_dims(&on) == vec![0, 6, 6, 0];
            ok &= YM.complex.homology_dims(&off) == vec![0, 0, 0, 0];
            ok &= GR.complex.homology_dims(&on) == vec![0, 2, 2, 0, 0];
            ok &= GR.complex.homology_dims(&off) == vec![0, 0, 0, 0, 0];
        }
        Ok((ok, format!("{points} on-shell and {points} off-shell points")))
    })
}

// 4. homotopy identities
fn c4(quick: bool) -> CriterionResult {
    run_criterion(
        4,
        "homotopy identities: perturbation, trivial, optimal, abc",
        || {
            let instances = if quick { 5 } else { 20 };
            let mut rng = ChaCha12Rng::seed_from_u64(44);
            let pair = build_gamma_pair(4)?;
            let mut ok = true;
            for inst in 0..instances {
                let seed = 1000 + inst as u64;
                // trivial homotopy on a dgLa at an off-shell point
                let k_off = random_offshell_mom(&mut rng);
                let h = trivial_homotopy(&YM.complex, &k_off, seed)?;
                let d = YM.complex.eval_d(&k_off);
                ok &= h.mul(&h).is_zero_matrix();
                ok &= h.mul(&d).add(&d.mul(&h)) == ExactMatrix::identity(YM.dim());

                // optimal homotopy on the pair complex at an on-shell point
                let q = random_onshell_mom(&mut rng);
                let oh = optimal_homotopy(&pair, &q, seed)?;
                let hn = oh.base.homology.total();
                let idh = ExactMatrix::identity(hn);
                ok &= oh.dprime_q.mul(&oh.dprime_q).is_zero_matrix();
                ok &= oh
                    .hprime_q
                    .mul(&oh.dprime_q)
                    .add(&oh.dprime_q.mul(&oh.hprime_q))
                    == idh;
                // evaluate nearby off shell: p d i = Q dprime by exact division
                let k = random_offshell_mom(&mut rng);
                if let Ok(ev) = oh.eval(&pair, &k) {
                    let d = pair.eval_d(&k);
                    ok &= ev.p.mul(&d).mul(&ev.i) == ev.dprime.scale(&ev.q_value);
                    let big = ev.big_h.unwrap();
                    ok &= big.mul(&big).is_zero_matrix();
                    ok &= big.mul(&d).add(&d.mul(&big))
                        == ExactMatrix::identity(pair.grading.total());
                }
                // hpl: perturb the point contraction to another cone point
                let q2 = random_onshell_mom(&mut rng);
                let c0 = build_contraction(&pair.eval_d(&q), &pair.grading, seed)?;
                let delta = pair.eval_d(&q2).sub(&pair.eval_d(&q));
                if let Ok(c1) = hpl_perturb(&c0, &delta) {
                    let d2 = pair.eval_d(&q2);
                    ok &= c1.h.mul(&d2).mul(&c1.h) == c1.h;
                    ok &= c1.p.mul(&c1.i) == ExactMatrix::identity(c1.homology.total());
                }
                // abc: connect two seeded contractions at q
                let d_q = pair.eval_d(&q);
                let ca = build_contraction(&d_q, &pair.grading, seed ^ 1)?;
                let cb = build_contraction(&d_q, &pair.grading, seed ^ 2)?;
                let abc = abc_connect(&ca.h, &cb.h, &d_q)?;
                ok &= abc.h_c == cb.h;
            }
            Ok((ok, format!("{instances} seeded instances, all exact")))
        },
    )
}

// 5. tree layer
fn c5(quick: bool) -> CriterionResult {
    run_criterion(5, "tree counts, embedding independence, obstruction sum", || {
        let mut ok = true;
        let max_n = if quick { 5 } else { 7 };
        for n in 2..=max_n {
            ok &= enumerate_trees(n).len() as u64 == double_factorial_count(n);
        }
        // embedding counts and independence at n = 3, 4
        let mut rng = ChaCha12Rng::seed_from_u64(55);
        for n in [3usize, 4] {
            let tuple = sample_onshell_tuple(n + 1, &"+".repeat(n + 1), 91 + n as u64, None)?;
            let inputs: Vec<crate::dgla::Element> = (0..n)
                .map(|i| YM.random_element(1, tuple.mom(i), &mut rng))
                .collect();
            let moms: Vec<Mom> = (0..n).map(|i| tuple.mom(i)).collect();
            let cache = build_homotopy_cache(&YM, &moms, 5)?;
            for t in enumerate_trees(n) {
                let em = planar_embeddings(&t);
                ok &= em.len() == 1 << (n - 1);
                let vals: Vec<_> = em
                    .iter()
                    .map(|p| eval_tree(p, &YM, &cache, &inputs).unwrap())
                    .collect();
                ok &= vals.iter().all(|v| *v == vals[0]);
            }
        }
        // obstruction sums at n = 3, 4: output decorated by N d vanishes
        for n in [3usize, 4] {
            ok &= obstruction_sum_is_zero(&YM, n, 31 + n as u64)?;
        }
        Ok((ok, format!("counts to n={max_n}; embeddings and cancellations exact")))
    })
}

fn obstruction_sum_is_zero(spec: &DgLaSpec, n: usize, seed: u64) -> Result<bool> {
    let tuple = sample_onshell_tuple(n + 1, &"+".repeat(n + 1), seed, None)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x77);
    let degrees: Vec<i64> = (0..n).map(|i| if i == n - 1 { 2 } else { 1 }).collect();
    let inputs: Vec<crate::dgla::Element> = (0..n)
        .map(|i| {
            let k = tuple.mom(i);
            let raw = spec.random_element(degrees[i], k.clone(), &mut rng);
            let c = build_contraction(&spec.eval_d(&k), spec.grading(), seed ^ (i as u64))
                .expect("contraction");
            let d = spec.eval_d(&k);
            let id = ExactMatrix::identity(spec.dim());
            let pi = id.sub(&d.mul(&c.h)).sub(&c.h.mul(&d));
            crate::dgla::Element {
                degree: raw.degree,
                mom: raw.mom.clone(),
                v: pi.apply(&raw.v),
            }
        })
        .collect();
    let moms: Vec<Mom> = (0..n).map(|i| tuple.mom(i)).collect();
    let cache = build_homotopy_cache(spec, &moms, seed)?;
    let k_out = moms.iter().fold(Mom::zero(), |a, b| a.add(b));
    let g = spec.grading();
    let mut nmat = ExactMatrix::zeros(spec.dim(), spec.dim());
    for dg in g.degrees() {
        if g.dim(dg) == 0 || g.dim(dg - 1) == 0 {
            continue;
        }
        for r in 0..g.dim(dg - 1) {
            for c in 0..g.dim(dg) {
                nmat[(g.offset(dg - 1) + r, g.offset(dg) + c)] =
                    Gq::from_int(rng.gen_range(-2..=2));
            }
        }
    }
    let d_out = spec.eval_d(&k_out);
    let mut total: Option<Vec<Gq>> = None;
    for t in enumerate_trees(n) {
        let v = eval_tree(&t, spec, &cache, &inputs)?;
        let dec = nmat.apply(&d_out.apply(&v.v));
        total = Some(match total {
            None => dec,
            Some(acc) => acc.iter().zip(dec.iter()).map(|(a, b)| a + b).collect(),
        });
    }
    Ok(total.unwrap().iter().all(|x| x.is_zero()))
}

// 6. gauge independence
fn c6(quick: bool) -> CriterionResult {
    run_criterion(6, "gauge independence across homotopy seeds (N=4, N=5)", || {
        let (trials, seeds) = if quick { (2, 2) } else { (5, 3) };
        let mut ok = true;
        let mut nonzero = 0usize;
        for spec in [&*YM, &*GR] {
            for (n, hel) in [(4usize, "--++"), (5, "+--++")] {
                let rep = gauge_independence_suite(spec, n, hel, trials, seeds, 77)?;
                ok &= rep.all_equal;
                nonzero += rep.values.iter().filter(|v| !v.is_zero()).count();
            }
        }
        Ok((
            ok && nonzero > 0,
            format!("{trials} trials x {seeds} seeds, both theories, N=4 and N=5; {nonzero} nonzero values"),
        ))
    })
}

// 7. three-point closed form
fn c7(quick: bool) -> CriterionResult {
    run_criterion(7, "three-point amplitudes match the closed form", || {
        let tuples = if quick { 4 } else { 10 };
        let mut ok = true;
        for spec in [&*YM, &*GR] {
            for (hel, branch) in [
                ("++-", Sign::Plus),
                ("+-+", Sign::Plus),
                ("--+", Sign::Minus),
                ("-+-", Sign::Minus),
            ] {
                use rayon::prelude::*;
                let collected: Result<Vec<Gq>> = (0..tuples)
                    .into_par_iter()
                    .map(|trial| {
                        let mut t =
                            sample_onshell_tuple(3, hel, 700 + trial as u64, Some(branch))?;
                        t.u_labels = vec![0, 1, 2 % spec.u.dim];
                        let a = amplitude(spec, &t, trial as u64)?;
                        let c = three_point_closed_form(spec, &t)?;
                        a.value.div(&c)
                    })
                    .collect();
                let ratios = collected?;
                ok &= !ratios.is_empty()
                    && ratios.iter().all(|r| *r == ratios[0])
                    && !ratios[0].is_zero();
            }
        }
        Ok((ok, format!("{tuples} tuples per branch and pattern, exact constancy")))
    })
}

// 8. helicity violation
fn c8(quick: bool) -> CriterionResult {
    run_criterion(8, "helicity-violating four-point amplitudes vanish", || {
        use rayon::prelude::*;
        let tuples = if quick { 3 } else { 10 };
        let mut ok = true;
        for spec in [&*YM, &*GR] {
            for hel in ["-+++", "+---"] {
                let zeros: Result<Vec<bool>> = (0..tuples)
                    .into_par_iter()
                    .map(|trial| {
                        let t = sample_onshell_tuple(4, hel, 800 + trial as u64, None)?;
                        let a = amplitude(spec, &t, trial as u64)?;
                        Ok(a.value.is_zero())
                    })
                    .collect();
                ok &= zeros?.into_iter().all(|z| z);
            }
        }
        Ok((ok, format!("{tuples} tuples per pattern, both theories, exact zeros")))
    })
}

// 9. factorization at a pair divisor, five points
fn c9(quick: bool) -> CriterionResult {
    run_criterion(9, "five-point residue factorization at a pair divisor", || {
        let pencils = if quick { 1 } else { 3 };
        let kappa = calibrate_constant(&YM)?;
        let div = DivisorId::PairPlus { i: 0, j: 1 };
        let rep = check_factorization(&YM, 5, &div, "+--++", pencils, 31)?;
        let mut ok = rep
            .trials
            .iter()
            .all(|t| !t.indeterminate && t.ratio.as_ref() == Some(&kappa));
        // MHV zero residues at the forbidden divisors
        for div in [
            DivisorId::PairPlus { i: 0, j: 1 },
            DivisorId::PairMinus { i: 0, j: 1 },
            DivisorId::PairMinus { i: 2, j: 3 },
        ] {
            let p = pencil_through_divisor(5, &div, "--+++", 7)?;
            let r = extract_residue(&YM, &p, 3)?;
            ok &= r.raw.is_zero();
        }
        Ok((
            ok,
            format!("{pencils} pencils, ratio = {kappa} exactly; forbidden residues vanish"),
        ))
    })
}

// 10. four-point factorization: three-term divisor and mixed divisor
fn c10(_quick: bool) -> CriterionResult {
    run_criterion(10, "four-point factorization: three-term and mixed divisors", || {
        let mut ok = true;
        let mut detail = String::new();
        for spec in [&*YM, &*GR] {
            let kappa = calibrate_constant(spec)?;
            // mixed divisor ratio
            let div = DivisorId::MixedPair { i: 0, j: 1 };
            let rep = check_factorization(spec, 4, &div, "++--", 2, 99)?;
            ok &= rep
                .trials
                .iter()
                .all(|t| !t.indeterminate && t.ratio.as_ref() == Some(&kappa));
            // all-shared divisor: relative residues and the cancellation
            let p = pencil_through_divisor(4, &DivisorId::AllPlus, "-+++", 31)?;
            ok &= relative_residue_identity(&p)?;
            let mut p2 = p;
            p2.base.u_labels = labels_for_mask(4, 0b0011);
            let trial = factorization_trial(spec, &p2, 3)?;
            ok &= trial.lhs.is_zero() && trial.rhs.is_zero();
            let (sum, terms) = three_term_cancellation(spec, 17)?;
            let live = terms.iter().filter(|t| !t.is_zero()).count();
            ok &= sum.is_zero() && live >= 2;
            detail.push_str(&format!(
                "{:?}: kappa {kappa}, {live} live cancelling channels; ",
                spec.label
            ));
        }
        Ok((ok, detail))
    })
}

/// The frozen homogeneity law for `v -> lambda v` on every leg: the exponent
/// is `(3 - 2n) + 1 + 2h (#minus inputs) - 2h [output is plus]`, where the
/// `+1` is the canonical normalization of the inverse differential and the
/// `2h` terms are the state normalizations.
pub fn homogeneity_exponent(spec: &DgLaSpec, kin: &KinematicTuple) -> i64 {
    let n = (kin.n() - 1) as i64;
    let two_h = spec.two_h as i64;
    let minus_inputs = kin.helicities[..kin.n() - 1]
        .iter()
        .filter(|s| **s == Sign::Minus)
        .count() as i64;
    let out_plus = if *kin.helicities.last().unwrap() == Sign::Plus {
        1
    } else {
        0
    };
    (3 - 2 * n) + 1 + two_h * minus_inputs - two_h * out_plus
}

// 11. homogeneity
fn c11(_quick: bool) -> CriterionResult {
    run_criterion(11, "homogeneity under momentum rescaling", || {
        let lambdas = [Gq::from_int(2), Gq::from_int(3), Gq::new(
            num_rational::BigRational::from_integer(1.into()),
            num_rational::BigRational::from_integer(1.into()),
        )];
        let mut ok = true;
        for spec in [&*YM, &*GR] {
            for hel in ["--++", "-+-+", "-++-"] {
                let t = sample_onshell_tuple(4, hel, 19, None)?;
                let base = amplitude(spec, &t, 3)?.value;
                if base.is_zero() {
                    ok = false;
                    continue;
                }
                let e = homogeneity_exponent(spec, &t);
                for lam in &lambdas {
                    let mut ts = t.clone();
                    for sp in ts.spinors.iter_mut() {
                        sp.v = [&sp.v[0] * lam, &sp.v[1] * lam];
                    }
                    let scaled = amplitude(spec, &ts, 3)?.value;
                    let expected = if e >= 0 {
                        &base * &lam.pow(e as u32)
                    } else {
                        base.div(&lam.pow((-e) as u32))?
                    };
                    ok &= scaled == expected;
                }
            }
        }
        Ok((
            ok,
            "lambda in {2, 3, 1+i}; exponent (3-2n) + 1 + 2h(#minus in) - 2h[out +]".into(),
        ))
    })
}

// 12. permutation invariance
fn c12(quick: bool) -> CriterionResult {
    run_criterion(12, "permutation invariance of inputs and output exchange", || {
        let mut ok = true;
        // S_{N-1} on inputs at N = 4 and N = 5
        for spec in [&*YM, &*GR] {
            let t = sample_onshell_tuple(4, "-+-+", 15, None)?;
            let base = amplitude(spec, &t, 3)?.value;
            for perm in [[1usize, 0, 2], [2, 0, 1], [0, 2, 1]] {
                let mut tp = t.clone();
                for (slot, &src) in perm.iter().enumerate() {
                    tp.spinors[slot] = t.spinors[src].clone();
                    tp.helicities[slot] = t.helicities[src];
                    tp.u_labels[slot] = t.u_labels[src];
                }
                ok &= amplitude(spec, &tp, 3)?.value == base;
            }
        }
        if !quick {
            let t5 = sample_onshell_tuple(5, "+--++", 25, None)?;
            let base5 = amplitude(&YM, &t5, 3)?.value;
            for perm in [[1usize, 0, 2, 3], [3, 1, 2, 0], [2, 3, 0, 1]] {
                let mut tp = t5.clone();
                for (slot, &src) in perm.iter().enumerate() {
                    tp.spinors[slot] = t5.spinors[src].clone();
                    tp.helicities[slot] = t5.helicities[src];
                    tp.u_labels[slot] = t5.u_labels[src];
                }
                ok &= amplitude(&YM, &tp, 3)?.value == base5;
            }
        }
        // output exchange at N = 4: constant ratio (equal to one here)
        let mut ratios: Vec<Gq> = Vec::new();
        for spec in [&*YM, &*GR] {
            for seed_t in [19u64, 20, 21] {
                let t = sample_onshell_tuple(4, "--++", seed_t, None)?;
                let base = amplitude(spec, &t, 3)?.value;
                if base.is_zero() {
                    continue;
                }
                for swap_leg in [2usize, 0] {
                    let mut ts = t.clone();
                    ts.spinors.swap(swap_leg, 3);
                    ts.helicities.swap(swap_leg, 3);
                    ts.u_labels.swap(swap_leg, 3);
                    let swapped = amplitude(spec, &ts, 3)?.value;
                    ratios.push(swapped.div(&base)?);
                }
            }
        }
        ok &= !ratios.is_empty() && ratios.iter().all(|r| *r == ratios[0]);
        let const_ratio = ratios.first().map(|r| r.to_string()).unwrap_or_default();
        Ok((ok, format!("inputs exact; output-exchange ratio constant = {const_ratio}")))
    })
}

pub fn run_one(id: usize, quick: bool) -> Option<CriterionResult> {
    Some(match id {
        1 => c1(quick),
        2 => c2(),
        3 => c3(quick),
        4 => c4(quick),
        5 => c5(quick),
        6 => c6(quick),
        7 => c7(quick),
        8 => c8(quick),
        9 => c9(quick),
        10 => c10(quick),
        11 => c11(quick),
        12 => c12(quick),
        _ => return None,
    })
}

/// Runs the full battery. `quick` trims trial counts for smoke runs; the
/// acceptance test always runs the full version.
pub fn run_all(quick: bool) -> Vec<CriterionResult> {
    (1..=12).filter_map(|id| run_one(id, quick)).collect()
}

pub fn run_selected(ids: &[usize], quick: bool) -> Vec<CriterionResult> {
    ids.iter().filter_map(|&id| run_one(id, quick)).collect()
}
