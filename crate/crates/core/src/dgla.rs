//! The two differential graded Lie algebras whose tree expansions are
//! computed here: a gauge theory built from de Rham forms with a shifted
//! field-strength slot, tensored with an internal Lie algebra, and a gravity
//! algebra built as a quotient of forms valued in translations plus Lorentz
//! generators.
//!
//! Both carry a momentum grading: the differential is a matrix of affine
//! forms in one momentum, the bracket structure constants are at most linear
//! in the two incoming momenta, and momenta add at every bracket.

use crate::error::{Error, Result};
use crate::exterior::{
    degree_masks, f_in_sorted_basis, form_add, form_normalize, form_wedge, generator_for_form,
    lorentz_action_on_form, mask_index, omega2_basis_change, so13_basis, so13_coords, FormVec,
    FORM_DIMS,
};
use crate::gamma::build_gamma_pair;
use crate::linalg::{ExactMatrix, Grading};
use crate::momentum::Mom;
use crate::polymat::{LinForm, PolyComplex, PolyMatrix};
use crate::scalar::Gq;
use serde::Serialize;
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Theory {
    Ym,
    Gr,
}

impl Theory {
    pub fn as_str(&self) -> &'static str {
        match self {
            Theory::Ym => "ym",
            Theory::Gr => "gr",
        }
    }
}

/// Finite-dimensional Lie algebra with an invariant nondegenerate form.
#[derive(Clone, Debug)]
pub struct InternalLieAlgebra {
    pub dim: usize,
    /// bracket[i][j] = coordinates of [e_i, e_j]
    pub bracket: Vec<Vec<Vec<Gq>>>,
    pub form: ExactMatrix,
    pub form_inv: ExactMatrix,
}

impl InternalLieAlgebra {
    pub fn new(dim: usize, bracket: Vec<Vec<Vec<Gq>>>, form: ExactMatrix) -> Result<Self> {
        let form_inv = form
            .inverse()
            .ok_or_else(|| Error::InvalidInternalAlgebra("degenerate form".into()))?;
        let alg = InternalLieAlgebra {
            dim,
            bracket,
            form,
            form_inv,
        };
        alg.validate()?;
        Ok(alg)
    }

    /// sl2 with ordered basis (e, f, h) and the trace form of the 2x2
    /// representation: <e,f> = 1, <h,h> = 2.
    pub fn sl2() -> Self {
        let z = || vec![Gq::zero(); 3];
        let co = |a: i64, b: i64, c: i64| vec![Gq::from_int(a), Gq::from_int(b), Gq::from_int(c)];
        let mut br = vec![vec![z(); 3]; 3];
        br[0][1] = co(0, 0, 1); // [e,f] = h
        br[1][0] = co(0, 0, -1);
        br[2][0] = co(2, 0, 0); // [h,e] = 2e
        br[0][2] = co(-2, 0, 0);
        br[2][1] = co(0, -2, 0); // [h,f] = -2f
        br[1][2] = co(0, 2, 0);
        let form = ExactMatrix::from_int_rows(&[&[0, 1, 0], &[1, 0, 0], &[0, 0, 2]]);
        InternalLieAlgebra::new(3, br, form).expect("sl2 is valid")
    }

    /// One-dimensional trivial algebra with multiplication as its form.
    pub fn trivial() -> Self {
        InternalLieAlgebra::new(
            1,
            vec![vec![vec![Gq::zero()]]],
            ExactMatrix::identity(1),
        )
        .expect("trivial algebra is valid")
    }

    pub fn is_abelian(&self) -> bool {
        self.bracket
            .iter()
            .flatten()
            .all(|v| v.iter().all(|c| c.is_zero()))
    }

    fn bracket_vec(&self, x: &[Gq], y: &[Gq]) -> Vec<Gq> {
        let mut out = vec![Gq::zero(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                let f = xi * yj;
                for (k, c) in self.bracket[i][j].iter().enumerate() {
                    if !c.is_zero() {
                        out[k] += &(&f * c);
                    }
                }
            }
        }
        out
    }

    fn form_pair(&self, x: &[Gq], y: &[Gq]) -> Gq {
        let mut acc = Gq::zero();
        for i in 0..self.dim {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..self.dim {
                if !self.form[(i, j)].is_zero() && !y[j].is_zero() {
                    acc += &(&(&x[i] * &self.form[(i, j)]) * &y[j]);
                }
            }
        }
        acc
    }

    pub fn validate(&self) -> Result<()> {
        let basis: Vec<Vec<Gq>> = (0..self.dim)
            .map(|i| {
                let mut v = vec![Gq::zero(); self.dim];
                v[i] = Gq::one();
                v
            })
            .collect();
        if self.form != self.form.transpose() {
            return Err(Error::InvalidInternalAlgebra("form not symmetric".into()));
        }
        for x in &basis {
            for y in &basis {
                let xy = self.bracket_vec(x, y);
                let yx = self.bracket_vec(y, x);
                for (a, b) in xy.iter().zip(yx.iter()) {
                    if (a + b) != Gq::zero() {
                        return Err(Error::InvalidInternalAlgebra("not antisymmetric".into()));
                    }
                }
                for z in &basis {
                    // Jacobi
                    let t1 = self.bracket_vec(x, &self.bracket_vec(y, z));
                    let t2 = self.bracket_vec(y, &self.bracket_vec(z, x));
                    let t3 = self.bracket_vec(z, &self.bracket_vec(x, y));
                    for i in 0..self.dim {
                        if (&(&t1[i] + &t2[i]) + &t3[i]) != Gq::zero() {
                            return Err(Error::InvalidInternalAlgebra("Jacobi fails".into()));
                        }
                    }
                    // invariance <[x,y],z> = <x,[y,z]>
                    let lhs = self.form_pair(&xy, z);
                    let rhs = self.form_pair(x, &self.bracket_vec(y, z));
                    if lhs != rhs {
                        return Err(Error::InvalidInternalAlgebra("form not invariant".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

/// One term of a structure constant: a coefficient times 1, an entry of the
/// first momentum, or an entry of the second momentum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum CTerm {
    One,
    K1(usize),
    K2(usize),
}

pub type Coeff = Vec<(CTerm, Gq)>;

fn coeff_eval(c: &Coeff, k1: &Mom, k2: &Mom) -> Gq {
    let e1 = k1.entries();
    let e2 = k2.entries();
    let mut acc = Gq::zero();
    for (t, v) in c {
        let f = match t {
            CTerm::One => v.clone(),
            CTerm::K1(s) => v * &e1[*s],
            CTerm::K2(s) => v * &e2[*s],
        };
        acc += &f;
    }
    acc
}

/// Sparse graded bracket structure constants.
#[derive(Clone, Debug, Serialize)]
pub struct Bracket {
    pub dim: usize,
    entries: BTreeMap<(u32, u32), Vec<(u32, Coeff)>>,
}

impl Bracket {
    fn new(dim: usize) -> Self {
        Bracket {
            dim,
            entries: BTreeMap::new(),
        }
    }

    fn add(&mut self, i: usize, j: usize, k: usize, coeff: Coeff) {
        if coeff.is_empty() {
            return;
        }
        self.entries
            .entry((i as u32, j as u32))
            .or_default()
            .push((k as u32, coeff));
    }

    pub fn entry_count(&self) -> usize {
        self.entries.values().map(|v| v.len()).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(u32, u32), &Vec<(u32, Coeff)>)> {
        self.entries.iter()
    }

    /// Corrupts one structure constant; negative-control testing only.
    pub fn corrupt_for_testing(&mut self) {
        if let Some((_, outs)) = self.entries.iter_mut().next() {
            if let Some((_, coeff)) = outs.first_mut() {
                coeff.push((CTerm::One, Gq::from_int(1)));
            }
        }
    }
}

/// Homogeneous element of a momentum-graded dgLa.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Element {
    pub degree: i64,
    pub mom: Mom,
    pub v: Vec<Gq>,
}

impl Element {
    pub fn is_zero(&self) -> bool {
        self.v.iter().all(|x| x.is_zero())
    }

    pub fn add(&self, other: &Element) -> Element {
        assert_eq!(self.degree, other.degree);
        assert_eq!(self.mom, other.mom);
        Element {
            degree: self.degree,
            mom: self.mom.clone(),
            v: self
                .v
                .iter()
                .zip(other.v.iter())
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn scale(&self, s: &Gq) -> Element {
        Element {
            degree: self.degree,
            mom: self.mom.clone(),
            v: self.v.iter().map(|x| x * s).collect(),
        }
    }
}

/// Short-exact-sequence transport data tying the dgLa fiber to the pair of
/// helicity complexes: middle complex, splittings, and the frozen chain
/// isomorphism between the sub-complex and the helicity pair.
#[derive(Clone, Debug)]
pub struct SesData {
    pub fiber_dim: usize,
    pub dim_u: usize,
    pub gamma_pair: PolyComplex,
    pub cpp: PolyComplex,
    pub psi: ExactMatrix,
    pub psi_inv: ExactMatrix,
    pub mid: PolyComplex,
    pub r: ExactMatrix,
    pub l: ExactMatrix,
    pub rp: ExactMatrix,
    pub lp: ExactMatrix,
}

#[derive(Clone, Debug)]
pub struct DgLaSpec {
    pub label: Theory,
    pub two_h: u32,
    pub complex: PolyComplex,
    pub bracket: Bracket,
    pub u: InternalLieAlgebra,
    pub ses: SesData,
}

impl DgLaSpec {
    pub fn grading(&self) -> &Grading {
        &self.complex.grading
    }

    pub fn dim(&self) -> usize {
        self.complex.grading.total()
    }

    pub fn eval_d(&self, k: &Mom) -> ExactMatrix {
        self.complex.eval_d(k)
    }

    pub fn zero_element(&self, degree: i64, mom: Mom) -> Element {
        Element {
            degree,
            mom,
            v: vec![Gq::zero(); self.dim()],
        }
    }

    /// `[x, y]` with momenta added; structure constants evaluated at the two
    /// incoming momenta.
    pub fn eval_bracket(&self, x: &Element, y: &Element) -> Element {
        let mut out = self.zero_element(x.degree + y.degree, x.mom.add(&y.mom));
        for (&(i, j), outs) in self.bracket.iter() {
            let xi = &x.v[i as usize];
            if xi.is_zero() {
                continue;
            }
            let yj = &y.v[j as usize];
            if yj.is_zero() {
                continue;
            }
            let f = xi * yj;
            for (k, coeff) in outs {
                let c = coeff_eval(coeff, &x.mom, &y.mom);
                if !c.is_zero() {
                    out.v[*k as usize] += &(&f * &c);
                }
            }
        }
        out
    }

    pub fn apply_d(&self, x: &Element) -> Element {
        let d = self.eval_d(&x.mom);
        Element {
            degree: x.degree + 1,
            mom: x.mom.clone(),
            v: d.apply(&x.v),
        }
    }

    pub fn random_element<R: rand::Rng>(&self, degree: i64, mom: Mom, rng: &mut R) -> Element {
        let g = self.grading();
        let mut v = vec![Gq::zero(); self.dim()];
        let off = g.offset(degree);
        for slot in v.iter_mut().skip(off).take(g.dim(degree)) {
            *slot = Gq::random_int(rng, 3);
        }
        Element { degree, mom, v }
    }

    /// Exhaustive axiom check on random data; failures are counted exactly.
    pub fn check_axioms(&self, samples: usize, seed: u64) -> AxiomReport {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let mut report = AxiomReport {
            d_squared_ok: self.complex.d.squares_to_zero_symbolically(),
            ..AxiomReport::default()
        };
        let g = self.grading().clone();
        let degs: Vec<i64> = g.degrees().filter(|&d| g.dim(d) > 0).collect();
        let rand_mom = |rng: &mut rand_chacha::ChaCha12Rng| {
            Mom::from_ints(
                rng.gen_range(-3..=3),
                rng.gen_range(-3..=3),
                rng.gen_range(-3..=3),
                rng.gen_range(-3..=3),
            )
        };
        for _ in 0..samples {
            let k1 = rand_mom(&mut rng);
            let k2 = rand_mom(&mut rng);
            let k3 = rand_mom(&mut rng);
            let dx = degs[rng.gen_range(0..degs.len())];
            let dy = degs[rng.gen_range(0..degs.len())];
            let dz = degs[rng.gen_range(0..degs.len())];
            let x = self.random_element(dx, k1.clone(), &mut rng);
            let y = self.random_element(dy, k2.clone(), &mut rng);
            let z = self.random_element(dz, k3.clone(), &mut rng);

            // Leibniz: d[x,y] = [dx,y] + (-1)^x [x,dy]
            let lhs = self.apply_d(&self.eval_bracket(&x, &y));
            let sx = if dx % 2 == 0 { Gq::one() } else { -Gq::one() };
            let rhs = self
                .eval_bracket(&self.apply_d(&x), &y)
                .add(&self.eval_bracket(&x, &self.apply_d(&y)).scale(&sx));
            if lhs != rhs {
                report.leibniz_failures += 1;
            }

            // Graded antisymmetry: [x,y] + (-1)^{xy} [y,x] = 0
            let sxy = if (dx * dy) % 2 == 0 {
                Gq::one()
            } else {
                -Gq::one()
            };
            let anti = self
                .eval_bracket(&x, &y)
                .add(&self.eval_bracket(&y, &x).scale(&sxy));
            if !anti.is_zero() {
                report.antisymmetry_failures += 1;
            }

            // Graded Jacobi
            let s1 = Gq::one();
            let s2 = if (dx * (dy + dz)) % 2 == 0 {
                Gq::one()
            } else {
                -Gq::one()
            };
            let s3 = if (dz * (dx + dy)) % 2 == 0 {
                Gq::one()
            } else {
                -Gq::one()
            };
            let j = self
                .eval_bracket(&x, &self.eval_bracket(&y, &z))
                .scale(&s1)
                .add(
                    &self
                        .eval_bracket(&y, &self.eval_bracket(&z, &x))
                        .scale(&s2),
                )
                .add(
                    &self
                        .eval_bracket(&z, &self.eval_bracket(&x, &y))
                        .scale(&s3),
                );
            if !j.is_zero() {
                report.jacobi_failures += 1;
            }
        }
        report
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct AxiomReport {
    pub d_squared_ok: bool,
    pub leibniz_failures: usize,
    pub antisymmetry_failures: usize,
    pub jacobi_failures: usize,
}

impl AxiomReport {
    pub fn all_pass(&self) -> bool {
        self.d_squared_ok
            && self.leibniz_failures == 0
            && self.antisymmetry_failures == 0
            && self.jacobi_failures == 0
    }
}

/// Momentum entry linear forms for the plane-wave components `k0..k3`:
/// `k0=(a+d)/2, k1=(b+c)/2, k2=i(b-c)/2, k3=(a-d)/2`.
fn component_linforms() -> [LinForm; 4] {
    let half = Gq::from_ratio(1, 2);
    let ih = &Gq::i() * &half;
    let mut k0 = LinForm::zero();
    k0.k[0] = half.clone();
    k0.k[3] = half.clone();
    let mut k1 = LinForm::zero();
    k1.k[1] = half.clone();
    k1.k[2] = half.clone();
    let mut k2 = LinForm::zero();
    k2.k[1] = ih.clone();
    k2.k[2] = -&ih;
    let mut k3 = LinForm::zero();
    k3.k[0] = half.clone();
    k3.k[3] = -&half;
    [k0, k1, k2, k3]
}

/// Coefficient terms for `<k, basis mu>` of the first or second momentum.
fn component_coeff(mu: usize, second: bool) -> Coeff {
    let lf = &component_linforms()[mu];
    let mut out = Coeff::new();
    for (slot, c) in lf.k.iter().enumerate() {
        if !c.is_zero() {
            let term = if second {
                CTerm::K2(slot)
            } else {
                CTerm::K1(slot)
            };
            out.push((term, c.clone()));
        }
    }
    out
}

fn scale_coeff(c: &Coeff, s: &Gq) -> Coeff {
    c.iter().map(|(t, v)| (t.clone(), v * s)).collect()
}

fn const_coeff(s: &Gq) -> Coeff {
    if s.is_zero() {
        Coeff::new()
    } else {
        vec![(CTerm::One, s.clone())]
    }
}

// ---------------------------------------------------------------------------
// Gauge theory (two_h = 2)
// ---------------------------------------------------------------------------

/// Basis element of the 16-dimensional fiber algebra: an optional shift flag
/// and a wedge-basis form. See `docs/CONVENTIONS.md` for the frozen order.
#[derive(Clone, Debug)]
struct YmBasisElt {
    eps: bool,
    form: FormVec,
}

/// Frozen fiber basis: degree 0: [1]; degree 1: [e0..e3, s f1+..s f3+];
/// degree 2: [f1+..f3+, s(om3 x4)]; degree 3: [s om4]. `s` marks the shifted
/// (degree minus one) copy.
fn ym_fiber_basis() -> (Grading, Vec<YmBasisElt>) {
    let grading = Grading::new(0, vec![1, 7, 7, 1]);
    let mut basis = Vec::new();
    basis.push(YmBasisElt {
        eps: false,
        form: vec![(0u8, Gq::one())],
    });
    for mu in 0..4u8 {
        basis.push(YmBasisElt {
            eps: false,
            form: vec![(1 << mu, Gq::one())],
        });
    }
    let fplus = f_in_sorted_basis(true);
    for f in &fplus {
        basis.push(YmBasisElt {
            eps: true,
            form: f.clone(),
        });
    }
    for f in &fplus {
        basis.push(YmBasisElt {
            eps: false,
            form: f.clone(),
        });
    }
    for mask in degree_masks(3) {
        basis.push(YmBasisElt {
            eps: true,
            form: vec![(mask, Gq::one())],
        });
    }
    basis.push(YmBasisElt {
        eps: true,
        form: vec![(0b1111, Gq::one())],
    });
    (grading, basis)
}

/// Projects a plain form (no shift flag) onto fiber coordinates; kills
/// anti-self-dual degree-2 parts and all plain forms of degree >= 3.
fn ym_project_plain(form: &FormVec, out: &mut [Gq]) {
    let (_, inv) = omega2_basis_change();
    for (mask, c) in form {
        match mask.count_ones() {
            0 => out[0] += c,
            1 => {
                let mu = mask.trailing_zeros() as usize;
                out[1 + mu] += c;
            }
            2 => {
                // f+ coordinates are the first three rows of the inverse change.
                let col = mask_index(*mask);
                for i in 0..3 {
                    let t = &inv[(i, col)] * c;
                    out[8 + i] += &t;
                }
            }
            _ => {} // killed by the quotient
        }
    }
}

/// Projects a shifted form onto fiber coordinates. Shifted parts live in
/// degrees (form degree - 1); degree-2 shifted parts must ride the self-dual
/// slots — an anti-self-dual residue would escape the subalgebra, so it is
/// asserted away.
fn ym_project_shift(form: &FormVec, out: &mut [Gq]) {
    let (_, inv) = omega2_basis_change();
    let mut asd = [Gq::zero(), Gq::zero(), Gq::zero()];
    for (mask, c) in form {
        match mask.count_ones() {
            2 => {
                let col = mask_index(*mask);
                for i in 0..3 {
                    let t = &inv[(i, col)] * c;
                    out[5 + i] += &t;
                }
                for i in 0..3 {
                    let t = &inv[(3 + i, col)] * c;
                    asd[i] += &t;
                }
            }
            3 => {
                let pos = degree_masks(3).iter().position(|m| m == mask).unwrap();
                out[11 + pos] += c;
            }
            4 => out[15] += c,
            _ => panic!("shifted form of degree < 2 cannot appear"),
        }
    }
    assert!(
        asd.iter().all(|x| x.is_zero()),
        "shifted degree-2 parts must be self-dual"
    );
}

/// Builds the gauge-theory dgLa over the given internal algebra.
pub fn build_ym(u: InternalLieAlgebra) -> Result<DgLaSpec> {
    if u.is_abelian() {
        return Err(Error::InvalidInternalAlgebra(
            "internal algebra must be non-Abelian".into(),
        ));
    }
    u.validate()?;
    let (fiber_grading, basis) = ym_fiber_basis();
    let nf = fiber_grading.total();
    let comps = component_linforms();

    // Fiber differential.
    let mut d_fiber = PolyMatrix::zeros(nf, nf);
    for (col, b) in basis.iter().enumerate() {
        let p = b.form[0].0.count_ones() as usize;
        if !b.eps {
            match p {
                0 | 1 => {
                    // kappa wedge, projected
                    for mu in 0..4usize {
                        let e_mu: FormVec = vec![(1 << mu, Gq::one())];
                        let w = form_wedge(&e_mu, &b.form);
                        let mut coords = vec![Gq::zero(); nf];
                        ym_project_plain(&w, &mut coords);
                        for (row, c) in coords.iter().enumerate() {
                            if !c.is_zero() {
                                d_fiber.add_to(row, col, &comps[mu].scale(c));
                            }
                        }
                    }
                }
                _ => {} // degree-2 plain parts map into killed territory
            }
        } else {
            // d(s b) = b - s (kappa wedge b)
            let mut coords = vec![Gq::zero(); nf];
            ym_project_plain(&b.form, &mut coords);
            for (row, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    d_fiber.add_to(row, col, &LinForm::constant(c.clone()));
                }
            }
            for mu in 0..4usize {
                let e_mu: FormVec = vec![(1 << mu, Gq::one())];
                let w = form_wedge(&e_mu, &b.form);
                let mut coords = vec![Gq::zero(); nf];
                ym_project_shift(&w, &mut coords);
                for (row, c) in coords.iter().enumerate() {
                    if !c.is_zero() {
                        d_fiber.add_to(row, col, &comps[mu].scale(&-c));
                    }
                }
            }
        }
    }

    // Fiber product table (graded commutative, momentum independent).
    let mut prod: Vec<Vec<Vec<(usize, Gq)>>> = vec![vec![Vec::new(); nf]; nf];
    for (i, x) in basis.iter().enumerate() {
        for (j, y) in basis.iter().enumerate() {
            if x.eps && y.eps {
                continue;
            }
            let w = form_wedge(&x.form, &y.form);
            if w.is_empty() {
                continue;
            }
            let mut coords = vec![Gq::zero(); nf];
            if !x.eps && !y.eps {
                ym_project_plain(&w, &mut coords);
            } else if x.eps {
                // (s a)(b) = s(ab)
                ym_project_shift(&w, &mut coords);
            } else {
                // (a)(s b) = (-1)^{|a|} s(ab)
                let sgn = if x.form[0].0.count_ones() % 2 == 0 {
                    Gq::one()
                } else {
                    -Gq::one()
                };
                ym_project_shift(&w, &mut coords);
                for c in coords.iter_mut() {
                    *c *= &sgn;
                }
            }
            for (k, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    prod[i][j].push((k, c.clone()));
                }
            }
        }
    }

    // Tensor with the internal algebra: index = fiber * dim_u + u.
    let du = u.dim;
    let n = nf * du;
    let grading = Grading::new(
        0,
        fiber_grading.dims.iter().map(|d| d * du).collect(),
    );
    let mut d = PolyMatrix::zeros(n, n);
    for r in 0..nf {
        for c in 0..nf {
            let f = d_fiber.get(r, c);
            if f.is_zero() {
                continue;
            }
            for a in 0..du {
                d.set(r * du + a, c * du + a, f.clone());
            }
        }
    }
    let mut bracket = Bracket::new(n);
    for i in 0..nf {
        for j in 0..nf {
            for (k, c) in &prod[i][j] {
                for a in 0..du {
                    for b in 0..du {
                        for (t, uc) in u.bracket[a][b].iter().enumerate() {
                            if !uc.is_zero() {
                                bracket.add(
                                    i * du + a,
                                    j * du + b,
                                    k * du + t,
                                    const_coeff(&(c * uc)),
                                );
                            }
                        }
                    }
                }
            }
        }
    }

    let complex = PolyComplex::new(grading, d)?;
    let ses = build_ym_ses(&d_fiber, du)?;
    Ok(DgLaSpec {
        label: Theory::Ym,
        two_h: 2,
        complex,
        bracket,
        u,
        ses,
    })
}

/// Middle complex and splittings for the gauge-theory fiber.
fn build_ym_ses(d_fiber: &PolyMatrix, dim_u: usize) -> Result<SesData> {
    let comps = component_linforms();
    let (f_change, _) = omega2_basis_change();

    // Middle layout per degree:
    // 0: [om0]                               (1)
    // 1: [om1 x4 | s f+ x3]                  (7)
    // 2: [om2 x6 | s om3 x4 | c f+ x3]       (13)
    // 3: [om3 x4 | s om4 x1 | c om3 x4]      (9)
    // 4: [om4 x1 | c om4 x1]                 (2)
    let mid_grading = Grading::new(0, vec![1, 7, 13, 9, 2]);
    let nm = mid_grading.total();
    // Offsets of the three summands within each degree.
    // (omega offset, shift offset, copy offset) per degree 0..4.
    let om_off = [0usize, 0, 0, 0, 0];
    let sh_off = [usize::MAX, 4, 6, 4, usize::MAX];
    let cp_off = [usize::MAX, usize::MAX, 10, 5, 1];
    let sh_dim = [0usize, 3, 4, 1, 0];
    let cp_dim = [0usize, 0, 3, 4, 1];

    let deg_offs: Vec<usize> = (0..=4).map(|p| mid_grading.offset(p)).collect();
    let deg_off = move |p: usize| deg_offs[p];

    // kappa wedge on plain form coordinates, as linform entries between
    // sorted-mask bases of adjacent degrees.
    let kappa_entry = |pmask: u8, qmask: u8| -> Option<LinForm> {
        // q = e_mu ^ p for some mu
        let diff = qmask & !pmask;
        if diff.count_ones() != 1 || (pmask & !qmask) != 0 {
            return None;
        }
        let mu = diff.trailing_zeros() as usize;
        let (s, _) = crate::exterior::wedge_masks(1 << mu, pmask)?;
        let mut f = comps[mu].clone();
        if s < 0 {
            f = f.scale(&-Gq::one());
        }
        Some(f)
    };

    let mut d_mid = PolyMatrix::zeros(nm, nm);
    // Omega part: kappa wedge within the omega slots.
    for p in 0..4usize {
        for (ci, cm) in degree_masks(p).iter().enumerate() {
            for (ri, rm) in degree_masks(p + 1).iter().enumerate() {
                if let Some(f) = kappa_entry(*cm, *rm) {
                    d_mid.add_to(
                        deg_off(p + 1) + om_off[p + 1] + ri,
                        deg_off(p) + om_off[p] + ci,
                        &f,
                    );
                }
            }
        }
    }
    // Shift part: d(s b) = b (into omega) - s(kappa wedge b).
    // Shift coordinates at degree g hold forms of degree g+1.
    for g in 1..=3usize {
        let formdeg = g + 1;
        for ci in 0..sh_dim[g] {
            // inclusion into the omega part
            if formdeg == 2 {
                // f+ basis column ci expanded in sorted-mask coords
                for row in 0..6 {
                    let c = &f_change[(row, ci)];
                    if !c.is_zero() {
                        d_mid.add_to(
                            deg_off(formdeg) + om_off[formdeg] + row,
                            deg_off(g) + sh_off[g] + ci,
                            &LinForm::constant(c.clone()),
                        );
                    }
                }
            } else {
                d_mid.add_to(
                    deg_off(formdeg) + om_off[formdeg] + ci,
                    deg_off(g) + sh_off[g] + ci,
                    &LinForm::constant(Gq::one()),
                );
            }
        }
        // -s(kappa ^ b): express on the shifted bases.
        if g == 1 {
            // b = f+_i (2-form) -> 3-forms
            let fplus = f_in_sorted_basis(true);
            for (ci, f) in fplus.iter().enumerate() {
                for (mask, c) in f {
                    for (ri, rm) in degree_masks(3).iter().enumerate() {
                        if let Some(lf) = kappa_entry(*mask, *rm) {
                            d_mid.add_to(
                                deg_off(2) + sh_off[2] + ri,
                                deg_off(1) + sh_off[1] + ci,
                                &lf.scale(&-c.clone()),
                            );
                        }
                    }
                }
            }
        } else if g == 2 {
            // b = 3-form -> 4-form
            for (ci, cm) in degree_masks(3).iter().enumerate() {
                if let Some(lf) = kappa_entry(*cm, 0b1111) {
                    d_mid.add_to(
                        deg_off(3) + sh_off[3],
                        deg_off(2) + sh_off[2] + ci,
                        &lf.scale(&-Gq::one()),
                    );
                }
            }
        }
    }
    // Copy part: d(c) = kappa wedge c in the copy slots, plus the shift part
    // feeding it: (a, b, c) -> (..., b + kappa c).
    for g in 2..=3usize {
        // kappa within copy slots: forms of degree g -> g+1
        if g == 2 {
            let fplus = f_in_sorted_basis(true);
            for (ci, f) in fplus.iter().enumerate() {
                for (mask, c) in f {
                    for (ri, rm) in degree_masks(3).iter().enumerate() {
                        if let Some(lf) = kappa_entry(*mask, *rm) {
                            d_mid.add_to(
                                deg_off(3) + cp_off[3] + ri,
                                deg_off(2) + cp_off[2] + ci,
                                &lf.scale(c),
                            );
                        }
                    }
                }
            }
        } else {
            for (ci, cm) in degree_masks(3).iter().enumerate() {
                if let Some(lf) = kappa_entry(*cm, 0b1111) {
                    d_mid.add_to(
                        deg_off(4) + cp_off[4],
                        deg_off(3) + cp_off[3] + ci,
                        &lf,
                    );
                }
            }
        }
    }
    // b feeding the copy: identity from shift coords at degree g to copy
    // coords at degree g+1 (same underlying form degree g+1).
    for g in 1..=3usize {
        let formdeg = g + 1;
        if cp_dim[formdeg] != sh_dim[g] {
            return Err(Error::Construction("ses layout mismatch".into()));
        }
        for ci in 0..sh_dim[g] {
            d_mid.add_to(
                deg_off(formdeg) + cp_off[formdeg] + ci,
                deg_off(g) + sh_off[g] + ci,
                &LinForm::constant(Gq::one()),
            );
        }
    }
    let mid = PolyComplex::new(mid_grading, d_mid)?;

    // Sub complex: minus block then plus block per degree.
    // Degrees 2..4, dims (3+3, 4+4, 1+1).
    let cpp_grading = Grading::new(2, vec![6, 8, 2]);
    let nc = cpp_grading.total();
    let mut d_cpp = PolyMatrix::zeros(nc, nc);
    {
        let co = |deg: usize| cpp_grading.offset(deg as i64);
        for (half, plus) in [(0usize, false), (1usize, true)] {
            let f_half = f_in_sorted_basis(plus);
            let blk2 = |i: usize| co(2) + half * 3 + i;
            let blk3 = |i: usize| co(3) + half * 4 + i;
            let blk4 = || co(4) + half;
            for (ci, f) in f_half.iter().enumerate() {
                for (mask, c) in f {
                    for (ri, rm) in degree_masks(3).iter().enumerate() {
                        if let Some(lf) = kappa_entry(*mask, *rm) {
                            d_cpp.add_to(blk3(ri), blk2(ci), &lf.scale(c));
                        }
                    }
                }
            }
            for (ci, cm) in degree_masks(3).iter().enumerate() {
                if let Some(lf) = kappa_entry(*cm, 0b1111) {
                    d_cpp.add_to(blk4(), blk3(ci), &lf);
                }
            }
        }
    }
    let cpp = PolyComplex::new(cpp_grading, d_cpp)?;

    // rp: sub -> mid. Minus parts into the omega slots (f- expanded),
    // plus parts into the copy slots.
    let mut rp = ExactMatrix::zeros(nm, nc);
    {
        let co = |deg: usize| cpp.grading.offset(deg as i64);
        // degree 2 minus: f-_i
        let fminus = f_in_sorted_basis(false);
        for (ci, f) in fminus.iter().enumerate() {
            for (mask, c) in f {
                rp[(deg_off(2) + om_off[2] + mask_index(*mask), co(2) + ci)] = c.clone();
            }
        }
        for ci in 0..4 {
            rp[(deg_off(3) + om_off[3] + ci, co(3) + ci)] = Gq::one();
        }
        rp[(deg_off(4) + om_off[4], co(4))] = Gq::one();
        // plus parts into copy slots
        for ci in 0..3 {
            rp[(deg_off(2) + cp_off[2] + ci, co(2) + 3 + ci)] = Gq::one();
        }
        for ci in 0..4 {
            rp[(deg_off(3) + cp_off[3] + ci, co(3) + 4 + ci)] = Gq::one();
        }
        rp[(deg_off(4) + cp_off[4], co(4) + 1)] = Gq::one();
    }

    // l: fiber -> mid. Plain parts into omega (f+ expanded at degree 2),
    // shifted parts into shift slots.
    let nf = 16usize;
    let fiber_grading = Grading::new(0, vec![1, 7, 7, 1]);
    let mut l = ExactMatrix::zeros(nm, nf);
    {
        let fo = |deg: usize| fiber_grading.offset(deg as i64);
        l[(deg_off(0), fo(0))] = Gq::one();
        for mu in 0..4 {
            l[(deg_off(1) + om_off[1] + mu, fo(1) + mu)] = Gq::one();
        }
        for ci in 0..3 {
            l[(deg_off(1) + sh_off[1] + ci, fo(1) + 4 + ci)] = Gq::one();
        }
        let fplus = f_in_sorted_basis(true);
        for (ci, f) in fplus.iter().enumerate() {
            for (mask, c) in f {
                l[(deg_off(2) + om_off[2] + mask_index(*mask), fo(2) + ci)] = c.clone();
            }
        }
        for ci in 0..4 {
            l[(deg_off(2) + sh_off[2] + ci, fo(2) + 3 + ci)] = Gq::one();
        }
        l[(deg_off(3) + sh_off[3], fo(3))] = Gq::one();
    }

    finish_ses(d_fiber, &fiber_grading, mid, cpp, rp, l, 2, dim_u)
}

/// Shared tail: invert the decomposition, solve the chain isomorphism to the
/// helicity pair, and verify every structural identity symbolically.
#[allow(clippy::too_many_arguments)]
fn finish_ses(
    d_fiber: &PolyMatrix,
    fiber_grading: &Grading,
    mid: PolyComplex,
    cpp: PolyComplex,
    rp: ExactMatrix,
    l: ExactMatrix,
    two_h: u32,
    dim_u: usize,
) -> Result<SesData> {
    let nm = mid.grading.total();
    let nc = cpp.grading.total();
    let nf = fiber_grading.total();
    assert_eq!(nm, nc + nf, "middle must decompose");

    let m = rp.hstack(&l);
    let minv = m
        .inverse()
        .ok_or_else(|| Error::Construction("ses decomposition not invertible".into()))?;
    let mut lp = ExactMatrix::zeros(nc, nm);
    let mut r = ExactMatrix::zeros(nf, nm);
    for cidx in 0..nm {
        for ridx in 0..nc {
            lp[(ridx, cidx)] = minv[(ridx, cidx)].clone();
        }
        for ridx in 0..nf {
            r[(ridx, cidx)] = minv[(nc + ridx, cidx)].clone();
        }
    }

    // Chain-map identities, symbolically per coefficient slot.
    for slot in 0..5usize {
        let dm = coeff_slot(&mid.d, slot);
        let dc = coeff_slot(&cpp.d, slot);
        let df = coeff_slot(d_fiber, slot);
        // r d_mid = d_fiber r
        if r.mul(&dm) != df.mul(&r) {
            return Err(Error::Construction("quotient map is not a chain map".into()));
        }
        // d_mid rp = rp d_cpp
        if dm.mul(&rp) != rp.mul(&dc) {
            return Err(Error::Construction("inclusion is not a chain map".into()));
        }
    }

    let gamma_pair = build_gamma_pair(two_h)?;
    let psi = solve_chain_iso(&gamma_pair, &cpp)?;
    let psi_inv = psi
        .inverse()
        .ok_or_else(|| Error::Construction("chain iso not invertible".into()))?;

    Ok(SesData {
        fiber_dim: nf,
        dim_u,
        gamma_pair,
        cpp,
        psi,
        psi_inv,
        mid,
        r,
        l,
        rp,
        lp,
    })
}

/// Extracts one coefficient matrix of a linform matrix (slot 0 = constant,
/// slots 1..=4 the four momentum entries).
pub fn coeff_slot(p: &PolyMatrix, slot: usize) -> ExactMatrix {
    let mut out = ExactMatrix::zeros(p.rows, p.cols);
    for r in 0..p.rows {
        for c in 0..p.cols {
            let f = p.get(r, c);
            out[(r, c)] = if slot == 0 {
                f.c0.clone()
            } else {
                f.k[slot - 1].clone()
            };
        }
    }
    out
}

/// Finds a constant invertible chain map `from -> to` with a degree shift of
/// one (to-degree = from-degree + 1), one helicity block at a time:
/// the intertwiner space per block is expected to be one-dimensional.
fn solve_chain_iso(from: &PolyComplex, to: &PolyComplex) -> Result<ExactMatrix> {
    let gf = &from.grading;
    let gt = &to.grading;
    // The pair complex splits per degree into (minus | plus) halves of equal
    // dimension; solve each half into the full target and combine.
    let mut total = ExactMatrix::zeros(gt.total(), gf.total());
    for half in 0..2usize {
        let cols: Vec<(i64, usize)> = gf
            .degrees()
            .flat_map(|deg| {
                let dim = gf.dim(deg) / 2;
                (0..dim).map(move |j| (deg, half * dim + j))
            })
            .collect();
        // Unknowns: psi entries (target row, source col within this half).
        let unknowns: Vec<(usize, usize)> = cols
            .iter()
            .enumerate()
            .flat_map(|(ci, (deg, _))| {
                let t_deg = *deg + 1;
                (0..gt.dim(t_deg)).map(move |r| (gt.offset(t_deg) + r, ci))
            })
            .collect();
        let ncols_u = unknowns.len();
        let uidx = |row: usize, ci: usize| -> usize {
            unknowns
                .iter()
                .position(|&(r, c)| r == row && c == ci)
                .expect("unknown index")
        };
        // Equations: psi d_from = d_to psi per coefficient slot.
        let mut rows: Vec<Vec<Gq>> = Vec::new();
        for slot in 0..5usize {
            let df = coeff_slot(&from.d, slot);
            let dt = coeff_slot(&to.d, slot);
            // For each source column ci (degree deg) and target row tr of
            // degree deg+2: sum_r psi[tr', r-part]...
            for (ci, (deg, local)) in cols.iter().enumerate() {
                let src_col = gf.offset(*deg) + local;
                let t_deg2 = *deg + 2;
                if t_deg2 > gt.max_degree() {
                    continue;
                }
                for tr in 0..gt.dim(t_deg2) {
                    let trow = gt.offset(t_deg2) + tr;
                    let mut eq = vec![Gq::zero(); ncols_u];
                    // (psi d_from)[trow, src_col] = sum_{cj} psi[trow, cj] df[cj_row, src_col]
                    for (cj, (degj, localj)) in cols.iter().enumerate() {
                        if *degj != *deg + 1 {
                            continue;
                        }
                        let mid_row = gf.offset(*degj) + localj;
                        let c = df[(mid_row, src_col)].clone();
                        if !c.is_zero() {
                            eq[uidx(trow, cj)] += &c;
                        }
                    }
                    // -(d_to psi)[trow, src_col] = -sum_m dt[trow, m] psi[m, ci]
                    for m in 0..gt.dim(*deg + 1) {
                        let mrow = gt.offset(*deg + 1) + m;
                        let c = dt[(trow, mrow)].clone();
                        if !c.is_zero() {
                            eq[uidx(mrow, ci)] -= &c;
                        }
                    }
                    if eq.iter().any(|x| !x.is_zero()) {
                        rows.push(eq);
                    }
                }
            }
        }
        let system = ExactMatrix::from_rows(rows);
        let kernel = system.kernel_basis();
        if kernel.cols != 1 {
            return Err(Error::Construction(format!(
                "intertwiner space has dimension {}; expected 1",
                kernel.cols
            )));
        }
        let sol = kernel.col(0);
        // Normalize: first nonzero entry = 1.
        let pivot = sol
            .iter()
            .position(|x| !x.is_zero())
            .ok_or_else(|| Error::Construction("zero intertwiner".into()))?;
        let inv = sol[pivot].inv().unwrap();
        for (un, (row, ci)) in unknowns.iter().enumerate() {
            let (deg, local) = cols[*ci];
            let src = gf.offset(deg) + local;
            total[(*row, src)] = &sol[un] * &inv;
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// Gravity (two_h = 4)
// ---------------------------------------------------------------------------

/// Pre-quotient basis index: (form mask position within its degree) * 10 +
/// coefficient index, where coefficients 0..=3 are translations and 4..=9 the
/// Lorentz generators in the frozen order.
fn gr_pre_index(grading: &Grading, mask: u8, vidx: usize) -> usize {
    let p = mask.count_ones() as usize;
    grading.offset(p as i64) + mask_index(mask) * 10 + vidx
}

struct GrPre {
    grading: Grading,
    d: PolyMatrix,
    /// generator matrices (4x4), index 0..6
    gens: Vec<ExactMatrix>,
}

fn build_gr_pre() -> Result<GrPre> {
    let grading = Grading::new(0, FORM_DIMS.iter().map(|d| d * 10).collect());
    let n = grading.total();
    let comps = component_linforms();
    let gens: Vec<ExactMatrix> = so13_basis().into_iter().map(|(_, g)| g).collect();

    let mut d = PolyMatrix::zeros(n, n);
    for p in 0..=4usize {
        for mask in degree_masks(p) {
            for vidx in 0..10usize {
                let col = gr_pre_index(&grading, mask, vidx);
                // (kappa wedge e_S) x P
                if p < 4 {
                    for mu in 0..4usize {
                        if let Some((s, m2)) = crate::exterior::wedge_masks(1 << mu, mask) {
                            let mut f = comps[mu].clone();
                            if s < 0 {
                                f = f.scale(&-Gq::one());
                            }
                            d.add_to(gr_pre_index(&grading, m2, vidx), col, &f);
                        }
                    }
                }
                // minus sum_mu (lambda e_mu) wedge e_S x d_mu, for Lorentz P
                if vidx >= 4 {
                    let lambda = &gens[vidx - 4];
                    for mu in 0..4usize {
                        for r in 0..4usize {
                            let c = &lambda[(r, mu)];
                            if c.is_zero() {
                                continue;
                            }
                            if let Some((s, m2)) =
                                crate::exterior::wedge_masks(1 << (r as u8), mask)
                            {
                                let mut coeff = -c.clone();
                                if s < 0 {
                                    coeff = -coeff;
                                }
                                d.add_to(
                                    gr_pre_index(&grading, m2, mu),
                                    col,
                                    &LinForm::constant(coeff),
                                );
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(GrPre { grading, d, gens })
}

/// Bracket of two pre-quotient basis elements, as sparse coefficient terms.
fn gr_pre_bracket(
    pre: &GrPre,
    mask_s: u8,
    v_s: usize,
    mask_t: u8,
    v_t: usize,
) -> Vec<(usize, Coeff)> {
    let mut out: Vec<(usize, Coeff)> = Vec::new();
    let mut push = |idx: usize, coeff: Coeff| {
        if coeff.is_empty() {
            return;
        }
        for (i, c) in out.iter_mut() {
            if *i == idx {
                c.extend(coeff.clone());
                return;
            }
        }
        out.push((idx, coeff));
    };

    // term 1: (e_S wedge P(e_T)) x P'
    //   P translation mu: <k2, mu> e_T; P Lorentz: lambda(e_T)
    if v_s < 4 {
        if let Some((s, m2)) = crate::exterior::wedge_masks(mask_s, mask_t) {
            let mut c = component_coeff(v_s, true);
            if s < 0 {
                c = scale_coeff(&c, &-Gq::one());
            }
            push(gr_pre_index(&pre.grading, m2, v_t), c);
        }
    } else {
        let lam = &pre.gens[v_s - 4];
        for (m_act, c_act) in lorentz_action_on_form(lam, mask_t) {
            if let Some((s, m2)) = crate::exterior::wedge_masks(mask_s, m_act) {
                let mut c = c_act.clone();
                if s < 0 {
                    c = -c;
                }
                push(
                    gr_pre_index(&pre.grading, m2, v_t),
                    const_coeff(&c),
                );
            }
        }
    }

    // term 2: minus (P'(e_S) wedge e_T) x P
    if v_t < 4 {
        if let Some((s, m2)) = crate::exterior::wedge_masks(mask_s, mask_t) {
            let mut c = component_coeff(v_t, false);
            c = scale_coeff(&c, &-Gq::one());
            if s < 0 {
                c = scale_coeff(&c, &-Gq::one());
            }
            push(gr_pre_index(&pre.grading, m2, v_s), c);
        }
    } else {
        let lam = &pre.gens[v_t - 4];
        for (m_act, c_act) in lorentz_action_on_form(lam, mask_s) {
            if let Some((s, m2)) = crate::exterior::wedge_masks(m_act, mask_t) {
                let mut c = -c_act.clone();
                if s < 0 {
                    c = -c;
                }
                push(
                    gr_pre_index(&pre.grading, m2, v_s),
                    const_coeff(&c),
                );
            }
        }
    }

    // term 3: (e_S wedge e_T) x [P, P'] -- nonzero only for two Lorentz parts.
    if v_s >= 4 && v_t >= 4 {
        if let Some((s, m2)) = crate::exterior::wedge_masks(mask_s, mask_t) {
            let x = &pre.gens[v_s - 4];
            let y = &pre.gens[v_t - 4];
            let br = x.mul(y).sub(&y.mul(x));
            let coords = so13_coords(&br).expect("so(1,3) closes");
            for (m, c) in coords.iter().enumerate() {
                if !c.is_zero() {
                    let mut cc = c.clone();
                    if s < 0 {
                        cc = -cc;
                    }
                    push(gr_pre_index(&pre.grading, m2, 4 + m), const_coeff(&cc));
                }
            }
        }
    }
    out
}

/// The ten-dimensional span defining the gravity ideal: inside each half
/// (self-dual 2-forms paired with the matching sl2 factor) take the kernel of
/// the action map `omega x v -> (omega' -> omega ^ v(omega'))`. Each half
/// contributes the unique five-dimensional irreducible copy.
fn gr_w_basis(pre: &GrPre) -> Result<Vec<Vec<Gq>>> {
    let n = pre.grading.total();
    let mut basis = Vec::new();
    let masks3 = degree_masks(3);
    for plus in [true, false] {
        let fs = f_in_sorted_basis(plus);
        // The sl2 half that acts nontrivially on this 2-form half is the one
        // raised from the opposite-duality forms in these coordinates.
        let lam_mats: Vec<ExactMatrix> = f_in_sorted_basis(!plus)
            .iter()
            .map(generator_for_form)
            .collect();
        let lam_coords: Vec<Vec<Gq>> = lam_mats
            .iter()
            .map(|m| so13_coords(m).expect("phi lands in so(1,3)"))
            .collect();
        // Columns: the nine f_i x lambda_j pairs. Rows: action output
        // components over (mu, 3-form mask).
        let mut act = ExactMatrix::zeros(16, 9);
        for i in 0..3usize {
            for j in 0..3usize {
                let col = 3 * i + j;
                for mu in 0..4usize {
                    for (m_act, c_act) in lorentz_action_on_form(&lam_mats[j], 1 << mu) {
                        for (mask, fc) in &fs[i] {
                            if let Some((s, m2)) = crate::exterior::wedge_masks(*mask, m_act) {
                                let mut c = fc * &c_act;
                                if s < 0 {
                                    c = -c;
                                }
                                let row =
                                    4 * mu + masks3.iter().position(|m| *m == m2).unwrap();
                                act[(row, col)] += &c;
                            }
                        }
                    }
                }
            }
        }
        let ker = act.kernel_basis();
        if ker.cols != 5 {
            return Err(Error::Construction(format!(
                "action kernel in one half has dimension {}; expected 5",
                ker.cols
            )));
        }
        for kcol in 0..5 {
            let mut v = vec![Gq::zero(); n];
            for i in 0..3usize {
                for j in 0..3usize {
                    let coeff = ker[(3 * i + j, kcol)].clone();
                    if coeff.is_zero() {
                        continue;
                    }
                    for (mask, fc) in &fs[i] {
                        for (m, lc) in lam_coords[j].iter().enumerate() {
                            if lc.is_zero() {
                                continue;
                            }
                            let idx = gr_pre_index(&pre.grading, *mask, 4 + m);
                            v[idx] += &(&(&coeff * fc) * lc);
                        }
                    }
                }
            }
            basis.push(v);
        }
    }
    Ok(basis)
}

pub fn build_gr() -> Result<DgLaSpec> {
    let pre = build_gr_pre()?;
    let n = pre.grading.total();
    if !pre.d.squares_to_zero_symbolically() {
        return Err(Error::NotADifferential);
    }

    // The ideal: W and its wedge closure, organized per degree.
    let w = gr_w_basis(&pre)?;
    // Kernel-of-action check: sum_j form_j ^ (lambda_j e_mu) = 0 for each W
    // basis vector. This is what makes the quotient differential constant-free
    // on the ideal and the bracket descend.
    for wv in &w {
        for mu in 0..4usize {
            let mut total: FormVec = Vec::new();
            for (idx, c) in wv.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let deg = pre.grading.degree_of(idx) as usize;
                let local = idx - pre.grading.offset(deg as i64);
                let (mpos, vidx) = (local / 10, local % 10);
                let mask = degree_masks(deg)[mpos];
                assert!(vidx >= 4, "W lives in the Lorentz part");
                let lam = &pre.gens[vidx - 4];
                for (m_act, c_act) in lorentz_action_on_form(lam, 1 << mu) {
                    if let Some((s, m2)) = crate::exterior::wedge_masks(mask, m_act) {
                        let mut cc = c * &c_act;
                        if s < 0 {
                            cc = -cc;
                        }
                        form_add(&mut total, m2, cc);
                    }
                }
            }
            if !form_normalize(total).is_empty() {
                return Err(Error::Construction(
                    "ideal candidate is not in the action kernel".into(),
                ));
            }
        }
    }

    // Ideal basis per degree: W at 2, e^W at 3, e^e^W at 4.
    let mut ideal_cols: Vec<Vec<Gq>> = Vec::new();
    ideal_cols.extend(w.iter().cloned());
    let wedge_vec = |mu: usize, v: &Vec<Gq>| -> Vec<Gq> {
        let mut out = vec![Gq::zero(); n];
        for (idx, c) in v.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let deg = pre.grading.degree_of(idx) as usize;
            let local = idx - pre.grading.offset(deg as i64);
            let (mpos, vidx) = (local / 10, local % 10);
            let mask = degree_masks(deg)[mpos];
            if let Some((s, m2)) = crate::exterior::wedge_masks(1 << mu, mask) {
                let mut cc = c.clone();
                if s < 0 {
                    cc = -cc;
                }
                out[gr_pre_index(&pre.grading, m2, vidx)] += &cc;
            }
        }
        out
    };
    let mut deg3: Vec<Vec<Gq>> = Vec::new();
    for v in &w {
        for mu in 0..4 {
            deg3.push(wedge_vec(mu, v));
        }
    }
    let mut deg4: Vec<Vec<Gq>> = Vec::new();
    for v in &deg3 {
        for mu in 0..4 {
            deg4.push(wedge_vec(mu, v));
        }
    }
    // Reduce to independent columns with a deterministic greedy pass.
    let reduce = |vs: &[Vec<Gq>]| -> Vec<Vec<Gq>> {
        let mut chosen: Vec<Vec<Gq>> = Vec::new();
        for v in vs {
            let mut trial = chosen.clone();
            trial.push(v.clone());
            if ExactMatrix::from_cols(trial.clone()).rank() > chosen.len() {
                chosen = trial;
            }
        }
        chosen
    };
    let deg3 = reduce(&deg3);
    let deg4 = reduce(&deg4);
    if w.len() != 10 || deg3.len() != 16 || deg4.len() != 6 {
        return Err(Error::Construction(format!(
            "ideal dimensions ({}, {}, {}) differ from (10, 16, 6)",
            w.len(),
            deg3.len(),
            deg4.len()
        )));
    }
    ideal_cols.extend(deg3);
    ideal_cols.extend(deg4);
    let b_ideal = ExactMatrix::from_cols(ideal_cols);

    // d preserves the ideal, slotwise.
    for slot in 0..5usize {
        let ds = coeff_slot(&pre.d, slot);
        let img = ds.mul(&b_ideal);
        for j in 0..img.cols {
            if !b_ideal.contains_in_span(&img.col(j)) {
                return Err(Error::Construction("ideal is not d-invariant".into()));
            }
        }
    }

    // Complement: standard basis vectors extending the ideal columns.
    let mut span = Vec::new();
    for j in 0..b_ideal.cols {
        span.push(b_ideal.col(j));
    }
    let mut complement_idx: Vec<usize> = Vec::new();
    {
        let coords: Vec<Vec<Gq>> = (0..n)
            .map(|j| {
                let mut v = vec![Gq::zero(); n];
                v[j] = Gq::one();
                v
            })
            .collect();
        let chosen = super_greedy(&span, &coords);
        for v in chosen {
            let idx = v.iter().position(|x| x.is_one()).unwrap();
            complement_idx.push(idx);
        }
    }
    let quotient_dim = complement_idx.len();
    if quotient_dim != 128 {
        return Err(Error::Construction(format!(
            "quotient dimension {quotient_dim} != 128"
        )));
    }
    let b_comp = ExactMatrix::from_cols(
        complement_idx
            .iter()
            .map(|&j| {
                let mut v = vec![Gq::zero(); n];
                v[j] = Gq::one();
                v
            })
            .collect(),
    );

    let m = b_ideal.hstack(&b_comp);
    let minv = m
        .inverse()
        .ok_or_else(|| Error::Construction("ideal-complement decomposition failed".into()))?;
    let ni = b_ideal.cols;
    let mut lp = ExactMatrix::zeros(ni, n);
    let mut proj = ExactMatrix::zeros(quotient_dim, n);
    for c in 0..n {
        for rr in 0..ni {
            lp[(rr, c)] = minv[(rr, c)].clone();
        }
        for rr in 0..quotient_dim {
            proj[(rr, c)] = minv[(ni + rr, c)].clone();
        }
    }

    // Quotient grading from the complement choice (must be degreewise).
    let mut qdims = vec![0usize; 5];
    for &idx in &complement_idx {
        qdims[pre.grading.degree_of(idx) as usize] += 1;
    }
    if qdims != vec![10, 40, 50, 24, 4] {
        return Err(Error::Construction(format!(
            "quotient grading {qdims:?} != [10, 40, 50, 24, 4]"
        )));
    }
    let grading = Grading::new(0, qdims);

    // Quotient differential: proj . d . section, per coefficient slot.
    let mut d_q = PolyMatrix::zeros(quotient_dim, quotient_dim);
    for slot in 0..5usize {
        let ds = coeff_slot(&pre.d, slot);
        let composed = proj.mul(&ds).mul(&b_comp);
        for r in 0..quotient_dim {
            for c in 0..quotient_dim {
                let v = composed[(r, c)].clone();
                if v.is_zero() {
                    continue;
                }
                let f = d_q.get_mut(r, c);
                if slot == 0 {
                    f.c0 += &v;
                } else {
                    f.k[slot - 1] += &v;
                }
            }
        }
    }

    // Quotient bracket: project the pre-quotient bracket of complement pairs.
    let mut bracket = Bracket::new(quotient_dim);
    for (ci, &pi) in complement_idx.iter().enumerate() {
        let deg_i = pre.grading.degree_of(pi) as usize;
        let loc_i = pi - pre.grading.offset(deg_i as i64);
        let (mpos_i, v_i) = (loc_i / 10, loc_i % 10);
        let mask_i = degree_masks(deg_i)[mpos_i];
        for (cj, &pj) in complement_idx.iter().enumerate() {
            let deg_j = pre.grading.degree_of(pj) as usize;
            let loc_j = pj - pre.grading.offset(deg_j as i64);
            let (mpos_j, v_j) = (loc_j / 10, loc_j % 10);
            let mask_j = degree_masks(deg_j)[mpos_j];
            for (t, coeff) in gr_pre_bracket(&pre, mask_i, v_i, mask_j, v_j) {
                for q in 0..quotient_dim {
                    let pcoef = &proj[(q, t)];
                    if pcoef.is_zero() {
                        continue;
                    }
                    bracket.add(ci, cj, q, scale_coeff(&coeff, pcoef));
                }
            }
        }
    }

    let complex = PolyComplex::new(grading, d_q)?;

    // Middle complex is the pre-quotient algebra; sub is the ideal with the
    // restricted differential.
    let cpp_grading = Grading::new(2, vec![10, 16, 6]);
    let mut d_cpp = PolyMatrix::zeros(32, 32);
    for slot in 0..5usize {
        let ds = coeff_slot(&pre.d, slot);
        let img = ds.mul(&b_ideal);
        let coords = lp.mul(&img); // ideal coordinates of d(ideal)
        for r in 0..32 {
            for c in 0..32 {
                let v = coords[(r, c)].clone();
                if v.is_zero() {
                    continue;
                }
                let f = d_cpp.get_mut(r, c);
                if slot == 0 {
                    f.c0 += &v;
                } else {
                    f.k[slot - 1] += &v;
                }
            }
        }
    }
    let cpp = PolyComplex::new(cpp_grading, d_cpp)?;
    let mid = PolyComplex::new(pre.grading.clone(), pre.d.clone())?;

    let ses = finish_ses(&complex.d, &complex.grading, mid, cpp, b_ideal, b_comp, 4, 1)?;

    Ok(DgLaSpec {
        label: Theory::Gr,
        two_h: 4,
        complex,
        bracket,
        u: InternalLieAlgebra::trivial(),
        ses,
    })
}

/// Greedy independent-extension used by the quotient construction; kept
/// separate from the contraction machinery to stay deterministic (no seed).
fn super_greedy(base: &[Vec<Gq>], candidates: &[Vec<Gq>]) -> Vec<Vec<Gq>> {
    struct Inc {
        basis: Vec<(usize, Vec<Gq>)>,
    }
    impl Inc {
        fn try_insert(&mut self, v: &[Gq]) -> bool {
            let mut v = v.to_vec();
            for (piv, b) in &self.basis {
                if !v[*piv].is_zero() {
                    let f = v[*piv].clone();
                    for (x, y) in v.iter_mut().zip(b.iter()) {
                        *x -= &(&f * y);
                    }
                }
            }
            let Some(piv) = v.iter().position(|x| !x.is_zero()) else {
                return false;
            };
            let inv = v[piv].inv().unwrap();
            for x in v.iter_mut() {
                *x *= &inv;
            }
            self.basis.push((piv, v));
            true
        }
    }
    let mut inc = Inc { basis: Vec::new() };
    for b in base {
        inc.try_insert(b);
    }
    let mut chosen = Vec::new();
    for c in candidates {
        if inc.try_insert(c) {
            chosen.push(c.clone());
        }
    }
    chosen
}

/// The flat background element of the gravity algebra, at momentum zero, in
/// quotient coordinates: the identity coupling of 1-forms to translations.
pub fn gr_flat_element(spec: &DgLaSpec) -> Element {
    assert_eq!(spec.label, Theory::Gr);
    // In pre-quotient coordinates m = sum_mu e_mu x d_mu. The quotient keeps
    // degree-1 coordinates untouched (the ideal starts in degree 2), so the
    // complement contains these indices verbatim.
    let g = spec.grading();
    let mut v = vec![Gq::zero(); spec.dim()];
    // degree-1 block layout matches the pre-quotient one: mask position * 10 + vidx
    for mu in 0..4usize {
        let local = mu * 10 + mu; // mask position of e_mu equals mu in sorted masks
        v[g.offset(1) + local] = Gq::one();
    }
    Element {
        degree: 1,
        mom: Mom::zero(),
        v,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use once_cell::sync::Lazy;

    pub static YM: Lazy<DgLaSpec> =
        Lazy::new(|| build_ym(InternalLieAlgebra::sl2()).expect("ym builds"));
    pub static GR: Lazy<DgLaSpec> = Lazy::new(|| build_gr().expect("gr builds"));

    #[test]
    fn sl2_is_valid() {
        InternalLieAlgebra::sl2().validate().unwrap();
    }

    #[test]
    fn ym_dimensions() {
        assert_eq!(YM.grading().dims, vec![3, 21, 21, 3]);
    }

    #[test]
    fn gr_dimensions() {
        assert_eq!(GR.grading().dims, vec![10, 40, 50, 24, 4]);
    }

    #[test]
    fn ym_axioms() {
        let report = YM.check_axioms(60, 17);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn gr_axioms() {
        let report = GR.check_axioms(40, 18);
        assert!(report.all_pass(), "{report:?}");
    }

    #[test]
    fn corrupted_bracket_fails_jacobi() {
        let mut bad = YM.clone();
        bad.bracket.corrupt_for_testing();
        let report = bad.check_axioms(60, 19);
        assert!(!report.all_pass());
    }

    #[test]
    fn gr_flat_element_squares_to_zero() {
        let m = gr_flat_element(&GR);
        let mm = GR.eval_bracket(&m, &m);
        assert!(mm.is_zero(), "[m,m] must vanish in the quotient");
    }

    #[test]
    fn gr_differential_is_flat_bracket() {
        // d = [m,-] on random degree-1 elements at random momenta.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(7);
        let m = gr_flat_element(&GR);
        for _ in 0..5 {
            let k = Mom::from_ints(1, 2, -1, 3);
            let x = GR.random_element(1, k, &mut rng);
            let dx = GR.apply_d(&x);
            let bx = GR.eval_bracket(&m, &x);
            assert_eq!(dx.v, bx.v);
        }
    }

    #[test]
    fn on_shell_homology_dimensions() {
        // On the punctured cone: two helicity lines per internal dimension in
        // degrees 1 and 2; off shell: exact.
        let on = Mom::from_ints(1, 0, 0, 0);
        let off = Mom::from_ints(1, 0, 0, 1);
        assert_eq!(YM.complex.homology_dims(&on), vec![0, 6, 6, 0]);
        assert_eq!(YM.complex.homology_dims(&off), vec![0, 0, 0, 0]);
        assert_eq!(GR.complex.homology_dims(&on), vec![0, 2, 2, 0, 0]);
        assert_eq!(GR.complex.homology_dims(&off), vec![0, 0, 0, 0, 0]);
    }

    #[test]
    fn ses_identities() {
        for spec in [&*YM, &*GR] {
            let ses = &spec.ses;
            let nf = ses.fiber_dim;
            let nc = ses.cpp.grading.total();
            // r l = 1, lp rp = 1, rp lp + l r = 1
            assert_eq!(ses.r.mul(&ses.l), ExactMatrix::identity(nf));
            assert_eq!(ses.lp.mul(&ses.rp), ExactMatrix::identity(nc));
            let sum = ses.rp.mul(&ses.lp).add(&ses.l.mul(&ses.r));
            assert_eq!(sum, ExactMatrix::identity(ses.mid.grading.total()));
            // psi intertwines gamma-pair with the sub complex at a sample k.
            let k = Mom::from_ints(2, 3, 1, -2);
            let dg = ses.gamma_pair.eval_d(&k);
            let dc = ses.cpp.eval_d(&k);
            assert_eq!(ses.psi.mul(&dg), dc.mul(&ses.psi));
            assert_eq!(
                ses.psi.mul(&ses.psi_inv),
                ExactMatrix::identity(ses.cpp.grading.total())
            );
        }
    }

    #[test]
    fn gr_ideal_is_bracket_ideal() {
        // [g, I] subset I at random momenta: check on the middle model, using
        // rp as the ideal embedding.
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(23);
        let pre = build_gr_pre().unwrap();
        let spec = &*GR;
        let ses = &spec.ses;
        for _ in 0..20 {
            let k1 = Mom::from_ints(
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
            );
            let k2 = Mom::from_ints(
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
                rng.gen_range(-2..=2),
            );
            // random pre element x, random ideal column w
            let n = pre.grading.total();
            let xi = rng.gen_range(0..n);
            let wj = rng.gen_range(0..ses.rp.cols);
            let deg_x = pre.grading.degree_of(xi) as usize;
            let loc_x = xi - pre.grading.offset(deg_x as i64);
            let (mpos_x, v_x) = (loc_x / 10, loc_x % 10);
            let mask_x = degree_masks(deg_x)[mpos_x];
            // bracket of x with each pre-basis component of w, then check
            // membership in the ideal span.
            let mut out = vec![Gq::zero(); n];
            for t in 0..n {
                let c = &ses.rp[(t, wj)];
                if c.is_zero() {
                    continue;
                }
                let deg_t = pre.grading.degree_of(t) as usize;
                let loc_t = t - pre.grading.offset(deg_t as i64);
                let (mpos_t, v_t) = (loc_t / 10, loc_t % 10);
                let mask_t = degree_masks(deg_t)[mpos_t];
                for (tt, coeff) in gr_pre_bracket(&pre, mask_x, v_x, mask_t, v_t) {
                    let val = coeff_eval(&coeff, &k1, &k2);
                    if !val.is_zero() {
                        out[tt] += &(&val * c);
                    }
                }
            }
            if out.iter().all(|x| x.is_zero()) {
                continue;
            }
            assert!(
                ses.rp.contains_in_span(&out),
                "[g, I] must stay in the ideal"
            );
        }
    }
}
