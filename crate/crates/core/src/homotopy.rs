//! Homotopies for the momentum-dependent differentials: perturbation of a
//! contraction along a change of the differential, trivial homotopies where
//! the homology vanishes, optimal homotopies at on-shell points (with the
//! explicit `1/Q` singular part factored through the homology), the three
//! elementary transformations connecting any two homotopies, and the zig-zag
//! transport between a theory's fiber and its helicity pair.

use crate::dgla::{DgLaSpec, SesData};
use crate::error::{Error, Result};
use crate::linalg::{build_contraction, Contraction, ExactMatrix, Grading};
use crate::momentum::Mom;
use crate::polymat::PolyComplex;
use crate::scalar::Gq;

/// Transports a contraction along a perturbation `delta` of the differential:
/// `h' = h (1 + delta h)^{-1}`, `i' = (1 + h delta)^{-1} i`,
/// `p' = p (1 + delta h)^{-1}`.
pub fn hpl_perturb(base: &Contraction, delta: &ExactMatrix) -> Result<Contraction> {
    let n = base.ambient.total();
    let id = ExactMatrix::identity(n);
    let m = id.add(&delta.mul(&base.h));
    let minv = m.inverse().ok_or(Error::PerturbationTooLarge)?;
    let m2 = id.add(&base.h.mul(delta));
    let m2inv = m2.inverse().ok_or(Error::PerturbationTooLarge)?;
    Ok(Contraction {
        ambient: base.ambient.clone(),
        homology: base.homology.clone(),
        h: base.h.mul(&minv),
        i: m2inv.mul(&base.i),
        p: base.p.mul(&minv),
    })
}

/// A homotopy witnessing exactness at an off-shell point: `H^2 = 0` and
/// `H d + d H = 1`. Errors with `OnShellInternalLine` when homology persists.
pub fn trivial_homotopy(complex: &PolyComplex, k: &Mom, seed: u64) -> Result<ExactMatrix> {
    let d = complex.eval_d(k);
    let c = build_contraction(&d, &complex.grading, seed)?;
    if c.homology.total() != 0 {
        return Err(Error::OnShellInternalLine);
    }
    Ok(c.h)
}

/// Optimal homotopy data anchored at an on-shell point `q`: a point
/// contraction, the transversal direction fixing the canonical differential
/// on homology, and the exact homotopy inverting it.
#[derive(Clone, Debug)]
pub struct OptimalHomotopy {
    pub q: Mom,
    pub xi: [Gq; 4],
    pub q_dot: Gq,
    pub base: Contraction,
    /// Canonical differential on the homology of the point contraction,
    /// normalized by the transversal derivative of `Q`.
    pub dprime_q: ExactMatrix,
    pub hprime_q: ExactMatrix,
}

/// All matrices of an optimal homotopy evaluated at a momentum near the
/// anchor: the contraction triple, the regular part of `p d i / Q`, its
/// inverse homotopy, and the assembled off-shell homotopy `H`.
#[derive(Clone, Debug)]
pub struct OptimalEval {
    pub h: ExactMatrix,
    pub i: ExactMatrix,
    pub p: ExactMatrix,
    pub dprime: ExactMatrix,
    pub hprime: ExactMatrix,
    /// `H = h + (1/Q) i hprime p`; only present off shell.
    pub big_h: Option<ExactMatrix>,
    pub q_value: Gq,
}

/// Picks the transversal direction: the gradient of `Q = det` at `q`, unless
/// its pairing with itself degenerates, in which case a coordinate direction
/// with nonvanishing derivative is used.
fn transversal_direction(q: &Mom) -> Result<([Gq; 4], Gq)> {
    let grad = q.det_gradient();
    let pair = {
        let mut acc = Gq::zero();
        for g in grad.iter() {
            acc += &(g * g);
        }
        acc
    };
    if !pair.is_zero() {
        return Ok((grad, pair));
    }
    for idx in 0..4 {
        if !grad[idx].is_zero() {
            let mut xi = [Gq::zero(), Gq::zero(), Gq::zero(), Gq::zero()];
            xi[idx] = Gq::one();
            return Ok((xi, grad[idx].clone()));
        }
    }
    Err(Error::NotRegularHomologyPoint)
}

/// Builds an optimal homotopy anchored at the on-shell point `q`.
pub fn optimal_homotopy(complex: &PolyComplex, q: &Mom, seed: u64) -> Result<OptimalHomotopy> {
    if q.is_zero() || !q.det().is_zero() {
        return Err(Error::NotRegularHomologyPoint);
    }
    let d_q = complex.eval_d(q);
    let base = build_contraction(&d_q, &complex.grading, seed)?;
    if base.homology.total() == 0 {
        return Err(Error::NotRegularHomologyPoint);
    }
    let (xi, q_dot) = transversal_direction(q)?;
    // d is affine in the momentum, so the directional derivative is constant.
    let d_dot = complex.d.directional(&xi);
    let dprime_q = base
        .p
        .mul(&d_dot)
        .mul(&base.i)
        .scale(&q_dot.inv().map_err(|_| Error::NotRegularHomologyPoint)?);
    if !dprime_q.mul(&dprime_q).is_zero_matrix() {
        return Err(Error::NotRegularHomologyPoint);
    }
    // The induced differential must be exact: contract it to nothing.
    let hc = build_contraction(&dprime_q, &base.homology, seed ^ 0x9e37_79b9_7f4a_7c15)?;
    if hc.homology.total() != 0 {
        return Err(Error::NotRegularHomologyPoint);
    }
    Ok(OptimalHomotopy {
        q: q.clone(),
        xi,
        q_dot,
        base,
        dprime_q,
        hprime_q: hc.h,
    })
}

impl OptimalHomotopy {
    /// Evaluates the homotopy family at a momentum `k` where the pencil of
    /// perturbations is invertible.
    pub fn eval(&self, complex: &PolyComplex, k: &Mom) -> Result<OptimalEval> {
        let d_k = complex.eval_d(k);
        let d_q = complex.eval_d(&self.q);
        let delta = d_k.sub(&d_q);
        let c = hpl_perturb(&self.base, &delta)?;
        let q_value = k.det();
        let (dprime, hprime, big_h) = if q_value.is_zero() {
            // On the cone the regular part is anchored data; only the anchor
            // itself is served.
            if *k != self.q {
                return Err(Error::PerturbationTooLarge);
            }
            (self.dprime_q.clone(), self.hprime_q.clone(), None)
        } else {
            let qinv = q_value.inv().expect("nonzero");
            let dprime = c.p.mul(&d_k).mul(&c.i).scale(&qinv);
            let hn = self.base.homology.total();
            let idn = ExactMatrix::identity(hn);
            let m = idn.add(&dprime.sub(&self.dprime_q).mul(&self.hprime_q));
            let minv = m.inverse().ok_or(Error::PerturbationTooLarge)?;
            let hprime = self.hprime_q.mul(&minv);
            let big = c.h.add(&c.i.mul(&hprime).mul(&c.p).scale(&qinv));
            (dprime, hprime, Some(big))
        };
        Ok(OptimalEval {
            h: c.h,
            i: c.i,
            p: c.p,
            dprime,
            hprime,
            big_h,
            q_value,
        })
    }
}

/// The three elementary transformations connecting two homotopies of the
/// same differential, with the connecting data `(a, b, c)` read off from the
/// pair; `h_c` must land exactly on the target.
#[derive(Debug)]
pub struct AbcData {
    pub a: ExactMatrix,
    pub b: ExactMatrix,
    pub c: ExactMatrix,
    pub h_a: ExactMatrix,
    pub h_b: ExactMatrix,
    pub h_c: ExactMatrix,
}

fn is_homotopy(h: &ExactMatrix, d: &ExactMatrix) -> bool {
    h.mul(h).is_zero_matrix() && h.mul(d).mul(h) == *h && d.mul(h).mul(d) == *d
}

pub fn abc_connect(h: &ExactMatrix, h_target: &ExactMatrix, d: &ExactMatrix) -> Result<AbcData> {
    if !is_homotopy(h, d) || !is_homotopy(h_target, d) {
        return Err(Error::NotAHomotopy);
    }
    let n = h.rows;
    let id = ExactMatrix::identity(n);
    let pi = |hh: &ExactMatrix| id.sub(&d.mul(hh)).sub(&hh.mul(d));

    let pi_h = pi(h);
    // A: a = -d h' pi, h_a = h (1 - a pi)
    let a = d.mul(h_target).mul(&pi_h).neg();
    let h_a = h.mul(&id.sub(&a.mul(&pi_h)));
    // B: b = -h_a d h' h_a, h_b = (1 + d b d) h_a (1 - d b d)
    let b = h_a.mul(d).mul(h_target).mul(&h_a).neg();
    let dbd = d.mul(&b).mul(d);
    let h_b = id.add(&dbd).mul(&h_a).mul(&id.sub(&dbd));
    // C: c = -pi_b h' d, h_c = (1 - pi_b c) h_b
    let pi_b = pi(&h_b);
    let c = pi_b.mul(h_target).mul(d).neg();
    let h_c = id.sub(&pi_b.mul(&c)).mul(&h_b);
    Ok(AbcData {
        a,
        b,
        c,
        h_a,
        h_b,
        h_c,
    })
}

/// Zig-zag homotopy equivalence between a theory's fiber complex and the
/// helicity pair (through the sub complex), with witnesses. Degree shifts by
/// one: `r_map` lowers, `l_map` raises.
#[derive(Clone, Debug)]
pub struct ZigZag {
    /// sub -> fiber, degree -1
    pub r_map: ExactMatrix,
    /// fiber -> sub, degree +1
    pub l_map: ExactMatrix,
    /// witness on the fiber side
    pub u: ExactMatrix,
    /// witness on the sub side
    pub u_pp: ExactMatrix,
    pub k: Mom,
}

/// Builds the zig-zag equivalence at momentum `k != 0` from the stored short
/// exact sequence: a point homotopy witnesses the exactness of the middle,
/// and the constant splittings assemble the two quasi-isomorphisms.
pub fn zigzag_equivalence(ses: &SesData, k: &Mom, seed: u64) -> Result<ZigZag> {
    if k.is_zero() {
        return Err(Error::MiddleNotExact);
    }
    let h_mid = trivial_homotopy(&ses.mid, k, seed).map_err(|_| Error::MiddleNotExact)?;
    let d_mid = ses.mid.eval_d(k);
    let r_map = ses.r.mul(&h_mid).mul(&ses.rp);
    let l_map = ses.lp.mul(&d_mid).mul(&ses.l);
    let u = ses.r.mul(&h_mid).mul(&ses.l);
    let u_pp = ses.lp.mul(&h_mid).mul(&ses.rp);
    Ok(ZigZag {
        r_map,
        l_map,
        u,
        u_pp,
        k: k.clone(),
    })
}

impl ZigZag {
    /// Exact identity battery: chain anticommutation and the two homotopy
    /// equivalence relations.
    pub fn check(&self, ses: &SesData) -> bool {
        let d_f = fiber_d(ses, &self.k);
        let d_c = ses.cpp.eval_d(&self.k);
        let nf = ses.fiber_dim;
        let nc = ses.cpp.grading.total();
        let anti1 = self.l_map.mul(&d_f) == d_c.mul(&self.l_map).neg();
        let anti2 = self.r_map.mul(&d_c) == d_f.mul(&self.r_map).neg();
        let rl = self.r_map.mul(&self.l_map);
        let rl_ok = rl
            == ExactMatrix::identity(nf)
                .sub(&d_f.mul(&self.u))
                .sub(&self.u.mul(&d_f));
        let lr = self.l_map.mul(&self.r_map);
        let lr_ok = lr
            == ExactMatrix::identity(nc)
                .sub(&d_c.mul(&self.u_pp))
                .sub(&self.u_pp.mul(&d_c));
        anti1 && anti2 && rl_ok && lr_ok
    }
}

/// Fiber differential at a momentum (the quotient complex for gravity, the
/// 16-dimensional algebra for the gauge theory), realized through the
/// splitting of the middle complex.
pub fn fiber_d(ses: &SesData, k: &Mom) -> ExactMatrix {
    ses.r.mul(&ses.mid.eval_d(k)).mul(&ses.l)
}

/// Grading of the fiber complex (the full complex with the internal tensor
/// factor divided out).
pub fn fiber_grading(spec: &DgLaSpec) -> Grading {
    if spec.ses.dim_u == 1 {
        spec.complex.grading.clone()
    } else {
        Grading::new(
            spec.complex.grading.min_degree,
            spec.complex
                .grading
                .dims
                .iter()
                .map(|d| d / spec.ses.dim_u)
                .collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgla::{build_gr, build_ym, InternalLieAlgebra};
    use crate::gamma::{build_gamma, build_gamma_pair};
    use crate::momentum::Mom;
    use once_cell::sync::Lazy;

    static YM: Lazy<crate::dgla::DgLaSpec> =
        Lazy::new(|| build_ym(InternalLieAlgebra::sl2()).unwrap());
    static GR: Lazy<crate::dgla::DgLaSpec> = Lazy::new(|| build_gr().unwrap());

    #[test]
    fn hpl_zero_perturbation_is_identity() {
        let g2 = build_gamma(4, crate::gamma::Sign::Plus).unwrap();
        let q = Mom::from_ints(1, 0, 0, 0);
        let c = build_contraction(&g2.eval_d(&q), &g2.grading, 3).unwrap();
        let zero = ExactMatrix::zeros(c.ambient.total(), c.ambient.total());
        let c2 = hpl_perturb(&c, &zero).unwrap();
        assert_eq!(c2.h, c.h);
        assert_eq!(c2.i, c.i);
        assert_eq!(c2.p, c.p);
    }

    #[test]
    fn hpl_perturbed_contraction_identities() {
        let g2 = build_gamma(4, crate::gamma::Sign::Plus).unwrap();
        let q = Mom::from_ints(1, 0, 0, 0);
        let k = Mom::from_entries(Gq::one(), Gq::from_ratio(1, 3), Gq::zero(), Gq::zero());
        assert!(k.det().is_zero());
        let c = build_contraction(&g2.eval_d(&q), &g2.grading, 3).unwrap();
        let delta = g2.eval_d(&k).sub(&g2.eval_d(&q));
        let c2 = hpl_perturb(&c, &delta).unwrap();
        let d = g2.eval_d(&k);
        let n = c2.ambient.total();
        let id = ExactMatrix::identity(n);
        assert!(c2.h.mul(&c2.h).is_zero_matrix());
        assert_eq!(c2.h.mul(&d).mul(&c2.h), c2.h);
        assert_eq!(c2.p.mul(&c2.i), ExactMatrix::identity(c2.homology.total()));
        assert_eq!(c2.i.mul(&c2.p), id.sub(&d.mul(&c2.h)).sub(&c2.h.mul(&d)));
    }

    #[test]
    fn hpl_singular_perturbation_rejected() {
        let grading = Grading::new(0, vec![1, 1]);
        let mut d = ExactMatrix::zeros(2, 2);
        d[(1, 0)] = Gq::one();
        let c = build_contraction(&d, &grading, 0).unwrap();
        let delta = d.neg();
        assert_eq!(
            hpl_perturb(&c, &delta).unwrap_err(),
            Error::PerturbationTooLarge
        );
    }

    #[test]
    fn trivial_homotopy_gamma_offshell() {
        let g2 = build_gamma(4, crate::gamma::Sign::Plus).unwrap();
        let k = Mom::from_ints(1, 0, 0, 1); // det 1
        let h = trivial_homotopy(&g2, &k, 5).unwrap();
        let d = g2.eval_d(&k);
        let n = g2.grading.total();
        assert!(h.mul(&h).is_zero_matrix());
        assert_eq!(h.mul(&d).add(&d.mul(&h)), ExactMatrix::identity(n));
    }

    #[test]
    fn trivial_homotopy_dgla_offshell_and_onshell() {
        let k_off = Mom::from_ints(2, 1, 1, 1); // det 1
        let h = trivial_homotopy(&YM.complex, &k_off, 9).unwrap();
        let d = YM.complex.eval_d(&k_off);
        assert_eq!(h.mul(&d).add(&d.mul(&h)), ExactMatrix::identity(YM.dim()));
        let k_on = Mom::from_ints(1, 0, 0, 0);
        assert_eq!(
            trivial_homotopy(&YM.complex, &k_on, 9).unwrap_err(),
            Error::OnShellInternalLine
        );
    }

    #[test]
    fn optimal_homotopy_identities() {
        let q = Mom::from_ints(1, 0, 0, 0);
        let pair = build_gamma_pair(4).unwrap();
        let ym_complex = YM.complex.clone();
        for (complex, tag) in [(&pair, "gamma pair"), (&ym_complex, "ym")] {
            let oh = optimal_homotopy(complex, &q, 11).unwrap();
            let hn = oh.base.homology.total();
            let idh = ExactMatrix::identity(hn);
            assert!(oh.dprime_q.mul(&oh.dprime_q).is_zero_matrix(), "{tag}");
            assert_eq!(
                oh.hprime_q
                    .mul(&oh.dprime_q)
                    .add(&oh.dprime_q.mul(&oh.hprime_q)),
                idh,
                "{tag}"
            );
            let k = Mom::from_entries(
                Gq::one(),
                Gq::from_ratio(1, 5),
                Gq::from_ratio(1, 7),
                Gq::zero(),
            );
            assert!(!k.det().is_zero());
            let ev = oh.eval(complex, &k).unwrap();
            let d = complex.eval_d(&k);
            let n = complex.grading.total();
            let id = ExactMatrix::identity(n);
            assert!(ev.h.mul(&ev.h).is_zero_matrix(), "{tag}");
            assert_eq!(ev.h.mul(&d).mul(&ev.h), ev.h, "{tag}");
            assert_eq!(ev.p.mul(&ev.i), idh, "{tag}");
            assert_eq!(
                ev.i.mul(&ev.p),
                id.sub(&d.mul(&ev.h)).sub(&ev.h.mul(&d)),
                "{tag}"
            );
            assert_eq!(
                ev.p.mul(&d).mul(&ev.i),
                ev.dprime.scale(&ev.q_value),
                "{tag}: p d i = Q dprime"
            );
            assert!(ev.dprime.mul(&ev.dprime).is_zero_matrix(), "{tag}");
            assert_eq!(
                ev.hprime.mul(&ev.dprime).add(&ev.dprime.mul(&ev.hprime)),
                idh,
                "{tag}"
            );
            let big = ev.big_h.unwrap();
            assert!(big.mul(&big).is_zero_matrix(), "{tag}");
            assert_eq!(big.mul(&d).add(&d.mul(&big)), id, "{tag}");
        }
    }

    #[test]
    fn canonical_differential_matches_transversal_quotient() {
        let q = Mom::from_ints(1, 0, 0, 0);
        assert_eq!(
            q.det_gradient(),
            [Gq::zero(), Gq::zero(), Gq::zero(), Gq::one()]
        );
        let pair = build_gamma_pair(4).unwrap();
        let oh = optimal_homotopy(&pair, &q, 3).unwrap();
        let d_dot = pair.d.directional(&oh.xi);
        let lhs = oh.base.p.mul(&d_dot).mul(&oh.base.i);
        assert_eq!(lhs.scale(&oh.q_dot.inv().unwrap()), oh.dprime_q);
        // Independence of the contraction seed for the induced map on cycles.
        let oh2 = optimal_homotopy(&pair, &q, 77).unwrap();
        let m1 = oh.base.i.mul(&oh.dprime_q).mul(&oh.base.p);
        let m2 = oh2.base.i.mul(&oh2.dprime_q).mul(&oh2.base.p);
        let d_q = pair.eval_d(&q);
        let probe = oh.base.i.clone(); // columns are cycles
        assert_eq!(m1.mul(&probe), m2.mul(&probe));
        assert!(d_q.mul(&probe).is_zero_matrix());
    }

    #[test]
    fn abc_reconstructs_target() {
        let pair = build_gamma_pair(4).unwrap();
        let q = Mom::from_ints(1, 0, 0, 0);
        let d = pair.eval_d(&q);
        let c1 = build_contraction(&d, &pair.grading, 1).unwrap();
        let c2 = build_contraction(&d, &pair.grading, 2).unwrap();
        let same = abc_connect(&c1.h, &c1.h, &d).unwrap();
        assert_eq!(same.h_c, c1.h);
        let data = abc_connect(&c1.h, &c2.h, &d).unwrap();
        assert_eq!(data.h_c, c2.h, "composition lands on the target homotopy");
        let n = d.rows;
        let id = ExactMatrix::identity(n);
        let pi = id.sub(&d.mul(&c1.h)).sub(&c1.h.mul(&d));
        assert!(d.mul(&data.a).is_zero_matrix());
        assert!(pi.mul(&data.a).is_zero_matrix());
        assert!(data.a.mul(&d).is_zero_matrix());
        assert!(data.a.mul(&c1.h).is_zero_matrix());
        assert!(pi.mul(&data.b).is_zero_matrix());
        assert!(c1.h.mul(&data.b).is_zero_matrix());
        assert!(data.b.mul(&c1.h).is_zero_matrix());
        assert!(data.b.mul(&pi).is_zero_matrix());
        assert_eq!(abc_connect(&d, &c1.h, &d).unwrap_err(), Error::NotAHomotopy);
    }

    #[test]
    fn zigzag_identities_ym_and_gr() {
        for spec in [&*YM, &*GR] {
            for k in [Mom::from_ints(1, 0, 0, 0), Mom::from_ints(2, 1, 1, 1)] {
                let z = zigzag_equivalence(&spec.ses, &k, 5).unwrap();
                assert!(z.check(&spec.ses), "{:?} at {:?}", spec.label, k);
            }
            assert_eq!(
                zigzag_equivalence(&spec.ses, &Mom::zero(), 5).unwrap_err(),
                Error::MiddleNotExact
            );
        }
    }

    #[test]
    fn zigzag_transports_cycles() {
        let spec = &*GR;
        let k = Mom::from_ints(1, 0, 0, 0);
        let z = zigzag_equivalence(&spec.ses, &k, 9).unwrap();
        let d_f = fiber_d(&spec.ses, &k);
        let d_c = spec.ses.cpp.eval_d(&k);
        let c = build_contraction(&d_f, &spec.complex.grading, 2).unwrap();
        for j in 0..c.i.cols {
            let cycle = c.i.col(j);
            let image = z.l_map.apply(&cycle);
            assert!(d_c.apply(&image).iter().all(|x| x.is_zero()));
        }
        let cs = build_contraction(&d_c, &spec.ses.cpp.grading, 4).unwrap();
        for j in 0..cs.i.cols {
            let cycle = cs.i.col(j);
            let image = z.r_map.apply(&cycle);
            assert!(d_f.apply(&image).iter().all(|x| x.is_zero()));
        }
    }
}
