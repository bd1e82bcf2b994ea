//! Exact kinematics: tuples of on-shell momenta with exact conservation,
//! the catalog of codimension-one loci where amplitudes can have poles, and
//! one-parameter families crossing a single such locus transversally.
//!
//! All sampling draws small integers and retries until the genericity
//! conditions hold: nonzero momenta, pairwise independence, and nonvanishing
//! internal Minkowski squares away from an explicitly targeted divisor.

use crate::error::{Error, Result};
use crate::gamma::Sign;
use crate::momentum::{adjugate, eps_pair, Mom, Spinor};
use crate::poly::ratfun_interpolate;
use crate::scalar::Gq;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

pub const MAX_RETRIES: usize = 400;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpinorPair {
    pub v: Spinor,
    pub w: Spinor,
}

impl SpinorPair {
    pub fn mom(&self) -> Mom {
        Mom::from_spinors(&self.v, &self.w)
    }
}

/// N on-shell momenta with exact conservation, plus per-leg helicity signs
/// and internal-algebra basis labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KinematicTuple {
    pub spinors: Vec<SpinorPair>,
    pub helicities: Vec<Sign>,
    pub u_labels: Vec<usize>,
    /// For three-point tuples: which irreducible branch the point lies on
    /// (shared left spinor = Plus, shared right spinor = Minus).
    pub branch: Option<Sign>,
}

impl KinematicTuple {
    pub fn n(&self) -> usize {
        self.spinors.len()
    }

    pub fn mom(&self, i: usize) -> Mom {
        self.spinors[i].mom()
    }

    pub fn mom_subset(&self, mask: u32) -> Mom {
        let mut k = Mom::zero();
        for i in 0..self.n() {
            if mask & (1 << i) != 0 {
                k = k.add(&self.mom(i));
            }
        }
        k
    }

    pub fn conserves(&self) -> bool {
        self.mom_subset((1 << self.n()) - 1).is_zero()
    }

    /// Canonical internal subsets: one representative per {J, J^c} pair,
    /// chosen not to contain the last leg.
    pub fn canonical_internal_subsets(n: usize) -> Vec<u32> {
        let mut out = Vec::new();
        for mask in 1u32..(1 << (n - 1)) {
            let sz = mask.count_ones() as usize;
            if sz >= 2 && sz <= n - 2 {
                out.push(mask);
            }
        }
        out
    }

    /// Genericity away from the bad codimension-two locus: all momenta
    /// nonzero and pairwise independent, all internal squares nonzero except
    /// for an explicitly exempted subset (which must then vanish).
    pub fn is_generic(&self, exempt: Option<u32>) -> bool {
        let n = self.n();
        let full = (1u32 << n) - 1;
        let canon = |m: u32| -> u32 {
            if m & (1 << (n - 1)) != 0 {
                full & !m
            } else {
                m
            }
        };
        let exempt = exempt.map(canon);
        for i in 0..n {
            if self.mom(i).is_zero() {
                return false;
            }
            for j in (i + 1)..n {
                if self.mom(i).parallel_to(&self.mom(j)) {
                    return false;
                }
            }
        }
        if n >= 4 {
            for mask in Self::canonical_internal_subsets(n) {
                let q = self.mom_subset(mask).det();
                if Some(mask) == exempt {
                    if !q.is_zero() {
                        return false;
                    }
                } else if q.is_zero() {
                    return false;
                }
            }
        }
        true
    }

    pub fn helicity_string(&self) -> String {
        self.helicities.iter().map(|s| s.as_char()).collect()
    }
}

/// JSON form of a tuple: spinor components as exact strings.
#[derive(Serialize, Deserialize)]
pub struct TupleJson {
    #[serde(rename = "N")]
    pub n: usize,
    pub spinors: Vec<SpinorPair>,
    pub helicities: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_labels: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub branch: Option<char>,
}

impl From<&KinematicTuple> for TupleJson {
    fn from(t: &KinematicTuple) -> Self {
        TupleJson {
            n: t.n(),
            spinors: t.spinors.clone(),
            helicities: t.helicity_string(),
            u_labels: Some(t.u_labels.clone()),
            branch: t.branch.map(|b| b.as_char()),
        }
    }
}

impl TryFrom<TupleJson> for KinematicTuple {
    type Error = Error;
    fn try_from(j: TupleJson) -> Result<KinematicTuple> {
        let helicities: Option<Vec<Sign>> = j.helicities.chars().map(Sign::from_char).collect();
        let helicities =
            helicities.ok_or_else(|| Error::Construction("bad helicity string".into()))?;
        if helicities.len() != j.spinors.len() || j.n != j.spinors.len() {
            return Err(Error::Construction("tuple length mismatch".into()));
        }
        let n = j.spinors.len();
        Ok(KinematicTuple {
            spinors: j.spinors,
            helicities,
            u_labels: j.u_labels.unwrap_or_else(|| default_u_labels(n)),
            branch: j.branch.and_then(Sign::from_char),
        })
    }
}

fn random_spinor<R: Rng>(rng: &mut R, bound: i64) -> Spinor {
    loop {
        let s = [Gq::random_int(rng, bound), Gq::random_int(rng, bound)];
        if !s[0].is_zero() || !s[1].is_zero() {
            return s;
        }
    }
}

/// Default internal-algebra labels: `(0, 1, 2, 2, ...)`. With the standard
/// sl2 basis this keeps the invariant contraction of a generic amplitude
/// nonzero at every leg count (the trace form only pairs opposite charges).
pub fn default_u_labels(n: usize) -> Vec<usize> {
    (0..n).map(|i| i.min(2)).collect()
}

fn parse_helicities(h: &str) -> Result<Vec<Sign>> {
    h.chars()
        .map(|c| Sign::from_char(c).ok_or_else(|| Error::Construction("bad helicity".into())))
        .collect()
}

/// Completes `fixed` leading legs to an `n`-leg conserving on-shell tuple:
/// all but the last two extra legs are free draws, the second-to-last right
/// spinor is drawn, and its left spinor solves the determinant condition so
/// the final leg closes conservation on shell.
fn sample_completing<R: Rng>(
    fixed: &[SpinorPair],
    n: usize,
    rng: &mut R,
) -> Option<Vec<SpinorPair>> {
    assert!(n >= fixed.len() + 2, "need two closing legs");
    let mut legs: Vec<SpinorPair> = fixed.to_vec();
    while legs.len() < n - 2 {
        legs.push(SpinorPair {
            v: random_spinor(rng, 3),
            w: random_spinor(rng, 3),
        });
    }
    let mut p = Mom::zero();
    for leg in &legs {
        p = p.sub(&leg.mom());
    }
    // Need k_{n-2} + k_{n-1} = p with both on shell.
    let w = random_spinor(rng, 3);
    // det(p - v w^T) = det p - w^T adj(p) v must vanish; linear in v.
    let adj = adjugate(&p);
    let phi = [
        &adj.a * &w[0] + &adj.c * &w[1],
        &adj.b * &w[0] + &adj.d * &w[1],
    ];
    if phi[0].is_zero() && phi[1].is_zero() {
        return None;
    }
    let target = p.det();
    let v0 = if !phi[0].is_zero() {
        [target.div(&phi[0]).ok()?, Gq::zero()]
    } else {
        [Gq::zero(), target.div(&phi[1]).ok()?]
    };
    let kdir = [-&phi[1], phi[0].clone()];
    let t = Gq::random_int(rng, 3);
    let v = [&v0[0] + &(&t * &kdir[0]), &v0[1] + &(&t * &kdir[1])];
    let k_pen = Mom::from_spinors(&v, &w);
    let k_last = p.sub(&k_pen);
    let (vl, wl) = k_last.factor_rank_one()?;
    legs.push(SpinorPair { v, w });
    legs.push(SpinorPair { v: vl, w: wl });
    Some(legs)
}

/// Samples an exact conserving on-shell tuple. For `n = 3` the caller picks
/// the branch: shared left spinor (`Plus`) or shared right spinor (`Minus`).
pub fn sample_onshell_tuple(
    n: usize,
    helicities: &str,
    seed: u64,
    branch: Option<Sign>,
) -> Result<KinematicTuple> {
    let hel = parse_helicities(helicities)?;
    if hel.len() != n {
        return Err(Error::Construction("helicity count != N".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    if n == 3 {
        let branch = branch.unwrap_or(Sign::Plus);
        for _ in 0..MAX_RETRIES {
            let shared = random_spinor(&mut rng, 4);
            let s1 = random_spinor(&mut rng, 4);
            let s2 = random_spinor(&mut rng, 4);
            let s3 = [-(&s1[0] + &s2[0]), -(&s1[1] + &s2[1])];
            if s3[0].is_zero() && s3[1].is_zero() {
                continue;
            }
            let spinors: Vec<SpinorPair> = match branch {
                Sign::Plus => [s1, s2, s3]
                    .iter()
                    .map(|w| SpinorPair {
                        v: shared.clone(),
                        w: w.clone(),
                    })
                    .collect(),
                Sign::Minus => [s1, s2, s3]
                    .iter()
                    .map(|v| SpinorPair {
                        v: v.clone(),
                        w: shared.clone(),
                    })
                    .collect(),
            };
            let t = KinematicTuple {
                spinors,
                helicities: hel.clone(),
                u_labels: default_u_labels(n),
                branch: Some(branch),
            };
            if t.conserves() && t.is_generic(None) {
                return Ok(t);
            }
        }
        return Err(Error::SamplingFailure);
    }
    for _ in 0..MAX_RETRIES {
        let Some(spinors) = sample_completing(&[], n, &mut rng) else {
            continue;
        };
        let t = KinematicTuple {
            spinors,
            helicities: hel.clone(),
            u_labels: default_u_labels(n),
            branch: None,
        };
        if t.conserves() && t.is_generic(None) {
            return Ok(t);
        }
    }
    Err(Error::SamplingFailure)
}

// ---------------------------------------------------------------------------
// Divisors
// ---------------------------------------------------------------------------

/// Irreducible codimension-one components of the internal on-shell loci.
/// Leg indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum DivisorId {
    /// N = 4: all left spinors share a line.
    AllPlus,
    /// N = 4: all right spinors share a line.
    AllMinus,
    /// N = 4: legs {i, j} share the left spinor, the others the right.
    MixedPair { i: usize, j: usize },
    /// N >= 5: legs {i, j} share the left spinor.
    PairPlus { i: usize, j: usize },
    /// N >= 5: legs {i, j} share the right spinor.
    PairMinus { i: usize, j: usize },
    /// |J|, |J^c| >= 3: the internal square of J vanishes (itself prime).
    QjPrime { mask: u32 },
}

impl DivisorId {
    /// Internal subsets J with `divisor ⊇ (Q_J)` and the last leg not in J.
    pub fn fusion_subsets(&self, n: usize) -> Vec<u32> {
        let full = (1u32 << n) - 1;
        let canon = |m: u32| -> u32 {
            if m & (1 << (n - 1)) != 0 {
                full & !m
            } else {
                m
            }
        };
        match self {
            DivisorId::AllPlus | DivisorId::AllMinus => {
                assert_eq!(n, 4);
                vec![0b0011, 0b0101, 0b0110]
            }
            DivisorId::MixedPair { i, j } => vec![canon((1 << i) | (1 << j))],
            DivisorId::PairPlus { i, j } | DivisorId::PairMinus { i, j } => {
                vec![canon((1 << i) | (1 << j))]
            }
            DivisorId::QjPrime { mask } => vec![canon(*mask)],
        }
    }

    pub fn format(&self) -> String {
        match self {
            DivisorId::AllPlus => "pppp".into(),
            DivisorId::AllMinus => "mmmm".into(),
            DivisorId::MixedPair { i, j } => {
                let others: Vec<usize> = (0..4).filter(|x| x != i && x != j).collect();
                format!("ppmm:{}{}|{}{}", i + 1, j + 1, others[0] + 1, others[1] + 1)
            }
            DivisorId::PairPlus { i, j } => format!("p+:{}{}", i + 1, j + 1),
            DivisorId::PairMinus { i, j } => format!("p-:{}{}", i + 1, j + 1),
            DivisorId::QjPrime { mask } => {
                let legs: Vec<String> = (0..32)
                    .filter(|b| mask & (1 << b) != 0)
                    .map(|b| (b + 1).to_string())
                    .collect();
                format!("qj:{}", legs.join(""))
            }
        }
    }

    pub fn parse(s: &str, n: usize) -> Result<DivisorId> {
        let bad = || Error::Construction(format!("unknown divisor: {s}"));
        let digits = |t: &str| -> Result<Vec<usize>> {
            t.chars()
                .map(|c| c.to_digit(10).map(|d| d as usize - 1).ok_or_else(bad))
                .collect()
        };
        if s == "pppp" {
            return Ok(DivisorId::AllPlus);
        }
        if s == "mmmm" {
            return Ok(DivisorId::AllMinus);
        }
        if let Some(rest) = s.strip_prefix("ppmm:") {
            let (a, _) = rest.split_once('|').ok_or_else(bad)?;
            let d = digits(a)?;
            if d.len() != 2 {
                return Err(bad());
            }
            return Ok(DivisorId::MixedPair { i: d[0], j: d[1] });
        }
        if let Some(rest) = s.strip_prefix("p+:") {
            let d = digits(rest)?;
            return Ok(DivisorId::PairPlus { i: d[0], j: d[1] });
        }
        if let Some(rest) = s.strip_prefix("p-:") {
            let d = digits(rest)?;
            return Ok(DivisorId::PairMinus { i: d[0], j: d[1] });
        }
        if let Some(rest) = s.strip_prefix("qj:") {
            let d = digits(rest)?;
            let mut mask = 0u32;
            for leg in d {
                if leg >= n {
                    return Err(bad());
                }
                mask |= 1 << leg;
            }
            return Ok(DivisorId::QjPrime { mask });
        }
        Err(bad())
    }
}

/// The divisor catalog for N legs.
pub fn divisors(n: usize) -> Vec<DivisorId> {
    assert!(n >= 4);
    let mut out = Vec::new();
    if n == 4 {
        out.push(DivisorId::AllPlus);
        out.push(DivisorId::AllMinus);
        for i in 0..4 {
            for j in (i + 1)..4 {
                out.push(DivisorId::MixedPair { i, j });
            }
        }
        return out;
    }
    for i in 0..n {
        for j in (i + 1)..n {
            out.push(DivisorId::PairPlus { i, j });
            out.push(DivisorId::PairMinus { i, j });
        }
    }
    // One QjPrime per {J, J^c} with both sides >= 3; the representative
    // avoids the last leg.
    for mask in 1u32..(1 << (n - 1)) {
        let sz = mask.count_ones() as usize;
        if sz >= 3 && n - sz >= 3 {
            out.push(DivisorId::QjPrime { mask });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Pencils
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum PencilKind {
    /// `v_{i0}(t) = v_{i0} + t v_{last}`, `w_{last}(t) = w_{last} - t w_{i0}`;
    /// mirrored, the roles of the two spinor columns swap. Divisors built
    /// from shared right spinors need the mirrored version, since the plain
    /// shift moves along them.
    Shift { i0: usize, mirror: bool },
    /// All left spinors move, right spinors ride the kernel of the spinor
    /// matrix; for the all-shared-right divisor the roles are mirrored.
    AllEqual {
        mirror: bool,
        dirs: Vec<Spinor>,
        c: [Gq; 2],
        cp: [Gq; 2],
    },
}

/// One-parameter family of conserving on-shell tuples crossing the targeted
/// divisor transversally at `t = 0` and generic elsewhere.
#[derive(Clone, Debug)]
pub struct Pencil {
    pub n: usize,
    pub divisor: DivisorId,
    pub base: KinematicTuple,
    /// Rank-one factorizations of the internal momenta of each fusion subset
    /// at the base point: `k_J = v* w*^T`.
    pub internal_factors: Vec<(u32, Spinor, Spinor)>,
    kind: PencilKind,
}

impl Pencil {
    pub fn tuple_at(&self, t: &Gq) -> KinematicTuple {
        let mut out = self.base.clone();
        match &self.kind {
            PencilKind::Shift { i0, mirror } => {
                let last = self.n - 1;
                if *mirror {
                    let wlast = self.base.spinors[last].w.clone();
                    let vi0 = self.base.spinors[*i0].v.clone();
                    for a in 0..2 {
                        let shift = t * &wlast[a];
                        out.spinors[*i0].w[a] = &out.spinors[*i0].w[a] + &shift;
                        let shift2 = t * &vi0[a];
                        out.spinors[last].v[a] = &out.spinors[last].v[a] - &shift2;
                    }
                } else {
                    let vlast = self.base.spinors[last].v.clone();
                    let wi0 = self.base.spinors[*i0].w.clone();
                    for a in 0..2 {
                        let shift = t * &vlast[a];
                        out.spinors[*i0].v[a] = &out.spinors[*i0].v[a] + &shift;
                        let shift2 = t * &wi0[a];
                        out.spinors[last].w[a] = &out.spinors[last].w[a] - &shift2;
                    }
                }
            }
            PencilKind::AllEqual {
                mirror,
                dirs,
                c,
                cp,
            } => {
                let shared = if *mirror {
                    self.base.spinors[0].w.clone()
                } else {
                    self.base.spinors[0].v.clone()
                };
                let moving: Vec<Spinor> = (0..4)
                    .map(|i| {
                        [
                            &shared[0] + &(t * &dirs[i][0]),
                            &shared[1] + &(t * &dirs[i][1]),
                        ]
                    })
                    .collect();
                let det2 = |x: &Spinor, y: &Spinor| -> Gq { &x[0] * &y[1] - &x[1] * &y[0] };
                // m'_{ij}(t) = det(moving_i, moving_j)/t, a polynomial in t.
                let mp = |i: usize, j: usize| -> Gq {
                    let alpha = det2(&shared, &dirs[j]) + det2(&dirs[i], &shared);
                    let beta = det2(&dirs[i], &dirs[j]);
                    &alpha + &(t * &beta)
                };
                // Kernel combinations supported on legs {0,1,2} and {0,1,3}.
                let k123 = [mp(1, 2), -mp(0, 2), mp(0, 1), Gq::zero()];
                let k124 = [mp(1, 3), -mp(0, 3), Gq::zero(), mp(0, 1)];
                for i in 0..4 {
                    let riding = [
                        &(&c[0] * &k123[i]) + &(&cp[0] * &k124[i]),
                        &(&c[1] * &k123[i]) + &(&cp[1] * &k124[i]),
                    ];
                    if *mirror {
                        out.spinors[i].w = moving[i].clone();
                        out.spinors[i].v = riding;
                    } else {
                        out.spinors[i].v = moving[i].clone();
                        out.spinors[i].w = riding;
                    }
                }
            }
        }
        out
    }

    /// `dQ_J/dt` at `t = 0`, computed exactly through a rational fit of
    /// `Q_J(t)` along the pencil.
    pub fn q_dot_at_zero(&self, mask: u32) -> Result<Gq> {
        let bound = 6usize;
        let mut samples = Vec::new();
        let mut t = 1i64;
        while samples.len() < 2 * bound + 5 {
            let tq = Gq::from_int(t);
            let tuple = self.tuple_at(&tq);
            samples.push((tq, tuple.mom_subset(mask).det()));
            t += 1;
        }
        let f = ratfun_interpolate(&samples, bound)?;
        let at0 = f.eval(&Gq::zero())?;
        if !at0.is_zero() {
            return Err(Error::WrongDivisor);
        }
        let qd = f.derivative_at(&Gq::zero())?;
        if qd.is_zero() {
            return Err(Error::WrongDivisor);
        }
        Ok(qd)
    }

    /// Sample parameters for amplitude evaluation: nonzero, pairwise
    /// distinct, and generic for the tuple.
    pub fn sample_points(&self, count: usize) -> Vec<Gq> {
        let mut out = Vec::new();
        let mut t = 1i64;
        while out.len() < count && t < 4000 {
            let tq = Gq::from_int(t);
            let tuple = self.tuple_at(&tq);
            if tuple.is_generic(None) {
                out.push(tq);
            }
            t += 1;
        }
        out
    }
}

/// Builds a pencil through the given divisor with a fresh base point.
pub fn pencil_through_divisor(
    n: usize,
    divisor: &DivisorId,
    helicities: &str,
    seed: u64,
) -> Result<Pencil> {
    let hel = parse_helicities(helicities)?;
    if hel.len() != n {
        return Err(Error::Construction("helicity count != N".into()));
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    for _ in 0..MAX_RETRIES {
        if let Some(p) = try_build_pencil(n, divisor, &hel, &mut rng) {
            return Ok(p);
        }
    }
    Err(Error::SamplingFailure)
}

/// Builds a second, independent pencil through the same base point by
/// shifting a different leg of the fused subset. Only shift-style pencils
/// support this.
pub fn pencil_with_base(
    n: usize,
    divisor: &DivisorId,
    base: &KinematicTuple,
    internal_factors: &[(u32, Spinor, Spinor)],
    i0: usize,
) -> Result<Pencil> {
    let subsets = divisor.fusion_subsets(n);
    let mask = subsets[0];
    if mask & (1 << i0) == 0 {
        return Err(Error::WrongDivisor);
    }
    let mirror = matches!(divisor, DivisorId::PairMinus { .. });
    let p = Pencil {
        n,
        divisor: divisor.clone(),
        base: base.clone(),
        internal_factors: internal_factors.to_vec(),
        kind: PencilKind::Shift { i0, mirror },
    };
    p.q_dot_at_zero(mask)?;
    Ok(p)
}

fn try_build_pencil(
    n: usize,
    divisor: &DivisorId,
    hel: &[Sign],
    rng: &mut ChaCha12Rng,
) -> Option<Pencil> {
    match divisor {
        DivisorId::AllPlus | DivisorId::AllMinus => {
            assert_eq!(n, 4, "all-shared divisors only exist for four legs");
            let mirror = matches!(divisor, DivisorId::AllMinus);
            let shared = random_spinor(rng, 3);
            let dirs: Vec<Spinor> = (0..4).map(|_| random_spinor(rng, 3)).collect();
            let c = [Gq::random_int(rng, 3), Gq::random_int(rng, 3)];
            let cp = [Gq::random_int(rng, 3), Gq::random_int(rng, 3)];
            let dummy_base = KinematicTuple {
                spinors: (0..4)
                    .map(|_| SpinorPair {
                        v: shared.clone(),
                        w: shared.clone(),
                    })
                    .collect(),
                helicities: hel.to_vec(),
                u_labels: default_u_labels(4),
                branch: None,
            };
            let mut pencil = Pencil {
                n,
                divisor: divisor.clone(),
                base: dummy_base,
                internal_factors: vec![],
                kind: PencilKind::AllEqual {
                    mirror,
                    dirs,
                    c,
                    cp,
                },
            };
            let base = pencil.tuple_at(&Gq::zero());
            if !base.conserves() {
                return None;
            }
            for i in 0..4 {
                if base.mom(i).is_zero() {
                    return None;
                }
                for j in (i + 1)..4 {
                    // stay off the mirrored and mixed divisors: the riding
                    // spinors must be pairwise independent
                    let (ri, rj) = if mirror {
                        (&base.spinors[i].v, &base.spinors[j].v)
                    } else {
                        (&base.spinors[i].w, &base.spinors[j].w)
                    };
                    if eps_pair(ri, rj).is_zero() {
                        return None;
                    }
                }
            }
            for mask in divisor.fusion_subsets(4) {
                if !base.mom_subset(mask).det().is_zero() {
                    return None;
                }
            }
            let factors: Option<Vec<(u32, Spinor, Spinor)>> = divisor
                .fusion_subsets(4)
                .into_iter()
                .map(|m| {
                    base.mom_subset(m)
                        .factor_rank_one()
                        .map(|(v, w)| (m, v, w))
                })
                .collect();
            pencil.base = base;
            pencil.internal_factors = factors?;
            for mask in divisor.fusion_subsets(4) {
                pencil.q_dot_at_zero(mask).ok()?;
            }
            if pencil.sample_points(3).len() < 3 {
                return None;
            }
            Some(pencil)
        }
        _ => {
            // Fused base point: a degenerate sub-tuple sharing the internal
            // momentum, completed by a generic one.
            let subsets = divisor.fusion_subsets(n);
            let mask = subsets[0];
            let j_legs: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            let jc_legs: Vec<usize> = (0..n).filter(|i| mask & (1 << i) == 0).collect();
            let (left_legs, internal) = match divisor {
                DivisorId::PairPlus { .. } | DivisorId::MixedPair { .. } => {
                    let shared = random_spinor(rng, 3);
                    let ws: Vec<Spinor> = j_legs.iter().map(|_| random_spinor(rng, 3)).collect();
                    let wsum = ws.iter().fold([Gq::zero(), Gq::zero()], |acc, w| {
                        [&acc[0] + &w[0], &acc[1] + &w[1]]
                    });
                    if wsum[0].is_zero() && wsum[1].is_zero() {
                        return None;
                    }
                    let legs: Vec<SpinorPair> = ws
                        .iter()
                        .map(|w| SpinorPair {
                            v: shared.clone(),
                            w: w.clone(),
                        })
                        .collect();
                    (legs, (shared, wsum))
                }
                DivisorId::PairMinus { .. } => {
                    let shared = random_spinor(rng, 3);
                    let vs: Vec<Spinor> = j_legs.iter().map(|_| random_spinor(rng, 3)).collect();
                    let vsum = vs.iter().fold([Gq::zero(), Gq::zero()], |acc, v| {
                        [&acc[0] + &v[0], &acc[1] + &v[1]]
                    });
                    if vsum[0].is_zero() && vsum[1].is_zero() {
                        return None;
                    }
                    let legs: Vec<SpinorPair> = vs
                        .iter()
                        .map(|v| SpinorPair {
                            v: v.clone(),
                            w: shared.clone(),
                        })
                        .collect();
                    (legs, (vsum, shared))
                }
                DivisorId::QjPrime { .. } => {
                    let sub = sample_completing(&[], j_legs.len() + 1, rng)?;
                    let last = sub.last().unwrap().clone();
                    let legs = sub[..j_legs.len()].to_vec();
                    // k_J = -k_last = (-v_last) w_last^T
                    let vint = [-&last.v[0], -&last.v[1]];
                    (legs, (vint, last.w))
                }
                _ => unreachable!(),
            };
            let (vstar, wstar) = internal;
            let kj = Mom::from_spinors(&vstar, &wstar);
            if kj.is_zero() {
                return None;
            }
            // Right part. For the mixed divisor the complement pair must
            // share the right spinor, which three-point conservation pins
            // completely; otherwise a generic completion does it.
            let right_legs: Vec<SpinorPair> = if matches!(divisor, DivisorId::MixedPair { .. }) {
                let vk = random_spinor(rng, 3);
                let vl = [-&vstar[0] - &vk[0], -&vstar[1] - &vk[1]];
                if vl[0].is_zero() && vl[1].is_zero() {
                    return None;
                }
                vec![
                    SpinorPair {
                        v: vk,
                        w: wstar.clone(),
                    },
                    SpinorPair {
                        v: vl,
                        w: wstar.clone(),
                    },
                ]
            } else {
                let first = SpinorPair {
                    v: vstar.clone(),
                    w: wstar.clone(),
                };
                let rest = sample_completing(&[first], jc_legs.len() + 1, rng)?;
                rest[1..].to_vec()
            };
            let mut spinors = vec![
                SpinorPair {
                    v: [Gq::zero(), Gq::zero()],
                    w: [Gq::zero(), Gq::zero()],
                };
                n
            ];
            for (pos, leg) in j_legs.iter().zip(left_legs.iter()) {
                spinors[*pos] = leg.clone();
            }
            for (pos, leg) in jc_legs.iter().zip(right_legs.iter()) {
                spinors[*pos] = leg.clone();
            }
            let base = KinematicTuple {
                spinors,
                helicities: hel.to_vec(),
                u_labels: default_u_labels(n),
                branch: None,
            };
            if !base.conserves() || !base.is_generic(Some(mask)) {
                return None;
            }
            // Stay off the opposite pair divisor: the non-shared spinors of
            // the fused pair must remain independent.
            if let DivisorId::PairPlus { i, j } | DivisorId::MixedPair { i, j } = divisor {
                if eps_pair(&base.spinors[*i].w, &base.spinors[*j].w).is_zero() {
                    return None;
                }
            }
            if let DivisorId::PairMinus { i, j } = divisor {
                if eps_pair(&base.spinors[*i].v, &base.spinors[*j].v).is_zero() {
                    return None;
                }
            }
            let i0 = j_legs[0];
            let mirror = matches!(divisor, DivisorId::PairMinus { .. });
            let pencil = Pencil {
                n,
                divisor: divisor.clone(),
                base,
                internal_factors: vec![(mask, vstar, wstar)],
                kind: PencilKind::Shift { i0, mirror },
            };
            pencil.q_dot_at_zero(mask).ok()?;
            if pencil.sample_points(3).len() < 3 {
                return None;
            }
            Some(pencil)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_branches() {
        let t = sample_onshell_tuple(3, "++-", 5, Some(Sign::Plus)).unwrap();
        assert!(t.conserves());
        assert_eq!(t.spinors[0].v, t.spinors[1].v);
        assert_eq!(t.spinors[0].v, t.spinors[2].v);
        let tm = sample_onshell_tuple(3, "--+", 5, Some(Sign::Minus)).unwrap();
        assert!(tm.conserves());
        assert_eq!(tm.spinors[0].w, tm.spinors[2].w);
    }

    #[test]
    fn four_point_generic() {
        let t = sample_onshell_tuple(4, "-+++", 11, None).unwrap();
        assert!(t.conserves());
        assert!(t.is_generic(None));
        for i in 0..4 {
            assert!(t.mom(i).det().is_zero());
        }
    }

    #[test]
    fn five_point_internal_squares() {
        let t = sample_onshell_tuple(5, "--+++", 3, None).unwrap();
        assert!(t.conserves());
        let subs = KinematicTuple::canonical_internal_subsets(5);
        assert_eq!(subs.len(), 10);
        for m in subs {
            assert!(!t.mom_subset(m).det().is_zero());
        }
    }

    #[test]
    fn divisor_counts() {
        assert_eq!(divisors(4).len(), 8);
        assert_eq!(divisors(5).len(), 20);
        assert_eq!(divisors(6).len(), 40);
    }

    #[test]
    fn divisor_format_parse_roundtrip() {
        for n in [4usize, 5, 6] {
            for d in divisors(n) {
                let s = d.format();
                let back = DivisorId::parse(&s, n).unwrap();
                assert_eq!(back, d, "roundtrip {s}");
            }
        }
    }

    #[test]
    fn pair_pencil_properties() {
        let div = DivisorId::PairPlus { i: 0, j: 1 };
        let p = pencil_through_divisor(5, &div, "+--++", 7).unwrap();
        let mask = 0b00011u32;
        let qd = p.q_dot_at_zero(mask).unwrap();
        assert!(!qd.is_zero());
        assert!(p.base.mom_subset(mask).det().is_zero());
        for t in p.sample_points(4) {
            let tup = p.tuple_at(&t);
            assert!(tup.conserves());
            assert!(tup.is_generic(None));
            assert!(!tup.mom_subset(mask).det().is_zero());
        }
        let tup = p.tuple_at(&Gq::from_int(9));
        for i in 0..5 {
            assert!(tup.mom(i).det().is_zero());
        }
    }

    #[test]
    fn all_plus_pencil_properties() {
        let p = pencil_through_divisor(4, &DivisorId::AllPlus, "-+++", 131).unwrap();
        for m in [0b0011u32, 0b0101, 0b0110] {
            assert!(p.base.mom_subset(m).det().is_zero());
            assert!(!p.q_dot_at_zero(m).unwrap().is_zero());
        }
        for t in p.sample_points(3) {
            let tup = p.tuple_at(&t);
            assert!(tup.conserves());
            assert!(tup.is_generic(None));
        }
        // epsilon identity at the base: e12 e34 + e23 e14 + e31 e24 = 0.
        let w = |i: usize| p.base.spinors[i].w.clone();
        let e = |i: usize, j: usize| eps_pair(&w(i), &w(j));
        let total = &(&(&e(0, 1) * &e(2, 3)) + &(&e(1, 2) * &e(0, 3))) + &(&e(2, 0) * &e(1, 3));
        assert!(total.is_zero());
    }

    #[test]
    fn mixed_pencil_properties() {
        let p =
            pencil_through_divisor(4, &DivisorId::MixedPair { i: 0, j: 1 }, "++--", 19).unwrap();
        let mask = 0b0011u32;
        assert!(p.base.mom_subset(mask).det().is_zero());
        assert!(!p.q_dot_at_zero(mask).unwrap().is_zero());
        let b = &p.base;
        assert!(eps_pair(&b.spinors[0].v, &b.spinors[1].v).is_zero());
        assert!(eps_pair(&b.spinors[2].w, &b.spinors[3].w).is_zero());
    }

    #[test]
    fn qj_pencil_n6() {
        let div = DivisorId::QjPrime { mask: 0b000111 };
        let p = pencil_through_divisor(6, &div, "++--++", 23).unwrap();
        assert!(p.base.mom_subset(0b000111).det().is_zero());
        assert!(!p.q_dot_at_zero(0b000111).unwrap().is_zero());
    }

    #[test]
    fn second_pencil_same_base() {
        let div = DivisorId::PairPlus { i: 0, j: 1 };
        let p1 = pencil_through_divisor(5, &div, "--+++", 77).unwrap();
        let p2 = pencil_with_base(5, &div, &p1.base, &p1.internal_factors, 1).unwrap();
        assert_eq!(p1.base, p2.base);
        let t = Gq::from_int(2);
        assert_ne!(p1.tuple_at(&t), p2.tuple_at(&t));
    }

    #[test]
    fn tuple_json_roundtrip() {
        let t = sample_onshell_tuple(4, "-+-+", 2, None).unwrap();
        let j = TupleJson::from(&t);
        let s = serde_json::to_string(&j).unwrap();
        let back: TupleJson = serde_json::from_str(&s).unwrap();
        let t2: KinematicTuple = back.try_into().unwrap();
        assert_eq!(t, t2);
    }
}
