//! Matrices whose entries are affine-linear forms in one momentum, and graded
//! complexes built from them. The differential of every complex in this crate
//! is such a matrix; squaring to zero is checked symbolically on coefficients,
//! never by sampling.

use crate::error::{Error, Result};
use crate::linalg::{ExactMatrix, Grading};
use crate::momentum::Mom;
use crate::scalar::Gq;
use serde::Serialize;
use std::collections::BTreeMap;

/// `c0 + ca*a + cb*b + cc*c + cd*d` in the four matrix entries of a momentum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LinForm {
    pub c0: Gq,
    pub k: [Gq; 4],
}

impl LinForm {
    pub fn zero() -> Self {
        LinForm {
            c0: Gq::zero(),
            k: [Gq::zero(), Gq::zero(), Gq::zero(), Gq::zero()],
        }
    }

    pub fn constant(c: Gq) -> Self {
        LinForm {
            c0: c,
            ..LinForm::zero()
        }
    }

    /// The linear form picking out entry `idx` of the momentum (a=0,...,d=3).
    pub fn coord(idx: usize, coeff: Gq) -> Self {
        let mut f = LinForm::zero();
        f.k[idx] = coeff;
        f
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.k.iter().all(|c| c.is_zero())
    }

    pub fn eval(&self, m: &Mom) -> Gq {
        let e = m.entries();
        let mut acc = self.c0.clone();
        for (c, x) in self.k.iter().zip(e.iter()) {
            if !c.is_zero() {
                acc += &(c * x);
            }
        }
        acc
    }

    pub fn add(&self, other: &LinForm) -> LinForm {
        let mut out = self.clone();
        out.c0 += &other.c0;
        for (x, y) in out.k.iter_mut().zip(other.k.iter()) {
            *x += y;
        }
        out
    }

    pub fn scale(&self, s: &Gq) -> LinForm {
        let mut out = self.clone();
        out.c0 *= s;
        for x in out.k.iter_mut() {
            *x *= s;
        }
        out
    }

    /// Directional derivative along `xi` in `(a,b,c,d)` coordinates.
    pub fn directional(&self, xi: &[Gq; 4]) -> Gq {
        let mut acc = Gq::zero();
        for (c, x) in self.k.iter().zip(xi.iter()) {
            if !c.is_zero() {
                acc += &(c * x);
            }
        }
        acc
    }
}

/// Polynomial in the four momentum entries, used only for symbolic checks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly4 {
    pub terms: BTreeMap<[u8; 4], Gq>,
}

impl Poly4 {
    pub fn zero() -> Self {
        Poly4 {
            terms: BTreeMap::new(),
        }
    }

    pub fn from_lin(f: &LinForm) -> Self {
        let mut p = Poly4::zero();
        p.insert([0, 0, 0, 0], f.c0.clone());
        for (i, c) in f.k.iter().enumerate() {
            let mut e = [0u8; 4];
            e[i] = 1;
            p.insert(e, c.clone());
        }
        p
    }

    fn insert(&mut self, e: [u8; 4], c: Gq) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(e).or_insert_with(Gq::zero);
        *entry += &c;
        if entry.is_zero() {
            self.terms.remove(&e);
        }
    }

    pub fn add_assign(&mut self, other: &Poly4) {
        for (e, c) in &other.terms {
            self.insert(*e, c.clone());
        }
    }

    pub fn mul(&self, other: &Poly4) -> Poly4 {
        let mut out = Poly4::zero();
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e = [ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2], ea[3] + eb[3]];
                out.insert(e, ca * cb);
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
}

/// Matrix of affine-linear forms in one momentum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PolyMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<LinForm>,
}

impl PolyMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        PolyMatrix {
            rows,
            cols,
            data: vec![LinForm::zero(); rows * cols],
        }
    }

    pub fn get(&self, r: usize, c: usize) -> &LinForm {
        &self.data[r * self.cols + c]
    }

    pub fn get_mut(&mut self, r: usize, c: usize) -> &mut LinForm {
        &mut self.data[r * self.cols + c]
    }

    pub fn set(&mut self, r: usize, c: usize, f: LinForm) {
        self.data[r * self.cols + c] = f;
    }

    pub fn add_to(&mut self, r: usize, c: usize, f: &LinForm) {
        let cur = self.get(r, c).add(f);
        self.set(r, c, cur);
    }

    pub fn eval(&self, m: &Mom) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                let f = self.get(r, c);
                if !f.is_zero() {
                    out[(r, c)] = f.eval(m);
                }
            }
        }
        out
    }

    /// The constant matrix of directional derivatives along `xi`; exact since
    /// entries are affine in the momentum.
    pub fn directional(&self, xi: &[Gq; 4]) -> ExactMatrix {
        let mut out = ExactMatrix::zeros(self.rows, self.cols);
        for r in 0..self.rows {
            for c in 0..self.cols {
                out[(r, c)] = self.get(r, c).directional(xi);
            }
        }
        out
    }

    /// Symbolic product as momentum polynomials; for `d^2 = 0` checks.
    pub fn mul_symbolic(&self, other: &PolyMatrix) -> Vec<Vec<Poly4>> {
        assert_eq!(self.cols, other.rows);
        let mut out = vec![vec![Poly4::zero(); other.cols]; self.rows];
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                let pa = Poly4::from_lin(a);
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if b.is_zero() {
                        continue;
                    }
                    let pb = Poly4::from_lin(b);
                    out[i][j].add_assign(&pa.mul(&pb));
                }
            }
        }
        out
    }

    pub fn squares_to_zero_symbolically(&self) -> bool {
        assert_eq!(self.rows, self.cols);
        self.mul_symbolic(self)
            .iter()
            .all(|row| row.iter().all(|p| p.is_zero()))
    }
}

/// A graded vector space with a momentum-dependent differential.
#[derive(Clone, Debug, Serialize)]
pub struct PolyComplex {
    pub grading: Grading,
    pub d: PolyMatrix,
}

impl PolyComplex {
    pub fn new(grading: Grading, d: PolyMatrix) -> Result<Self> {
        let n = grading.total();
        if d.rows != n || d.cols != n {
            return Err(Error::Construction("differential size mismatch".into()));
        }
        let c = PolyComplex { grading, d };
        if !c.d.squares_to_zero_symbolically() {
            return Err(Error::NotADifferential);
        }
        Ok(c)
    }

    pub fn eval_d(&self, k: &Mom) -> ExactMatrix {
        self.d.eval(k)
    }

    /// Per-degree homology dimensions of `d(k)`.
    pub fn homology_dims(&self, k: &Mom) -> Vec<usize> {
        let d = self.eval_d(k);
        let g = &self.grading;
        let block = |deg: i64| -> ExactMatrix {
            let (ro, rd) = (g.offset(deg + 1), g.dim(deg + 1));
            let (co, cd) = (g.offset(deg), g.dim(deg));
            let mut m = ExactMatrix::zeros(rd, cd);
            for r in 0..rd {
                for c in 0..cd {
                    m[(r, c)] = d[(ro + r, co + c)].clone();
                }
            }
            m
        };
        g.degrees()
            .map(|deg| {
                let rk_out = block(deg).rank();
                let rk_in = if deg > g.min_degree {
                    block(deg - 1).rank()
                } else {
                    0
                };
                g.dim(deg) - rk_out - rk_in
            })
            .collect()
    }

    /// Block direct sum, matching degrees; `self` occupies the leading
    /// coordinates of every degree.
    pub fn direct_sum(&self, other: &PolyComplex) -> PolyComplex {
        let grading = self.grading.sum(&other.grading);
        let n = grading.total();
        let mut d = PolyMatrix::zeros(n, n);
        let mut place = |src: &PolyComplex, shift_by_self: bool| {
            let g = &src.grading;
            for deg_r in g.degrees() {
                for deg_c in g.degrees() {
                    let ro = g.offset(deg_r);
                    let co = g.offset(deg_c);
                    let gro = grading.offset(deg_r)
                        + if shift_by_self { self.grading.dim(deg_r) } else { 0 };
                    let gco = grading.offset(deg_c)
                        + if shift_by_self { self.grading.dim(deg_c) } else { 0 };
                    for r in 0..g.dim(deg_r) {
                        for c in 0..g.dim(deg_c) {
                            let f = src.d.get(ro + r, co + c);
                            if !f.is_zero() {
                                d.set(gro + r, gco + c, f.clone());
                            }
                        }
                    }
                }
            }
        };
        place(self, false);
        place(other, true);
        PolyComplex { grading, d }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linform_eval() {
        let f = LinForm {
            c0: Gq::from_int(1),
            k: [
                Gq::from_int(2),
                Gq::zero(),
                Gq::zero(),
                Gq::from_int(-1),
            ],
        };
        let m = Mom::from_ints(3, 0, 0, 4);
        assert_eq!(f.eval(&m), Gq::from_int(3));
    }

    #[test]
    fn poly4_products() {
        let a = Poly4::from_lin(&LinForm::coord(0, Gq::one())); // a
        let d = Poly4::from_lin(&LinForm::coord(3, Gq::one())); // d
        let ad = a.mul(&d);
        let da = d.mul(&a);
        let mut diff = ad.clone();
        for (e, c) in &da.terms {
            diff.insert(*e, -c.clone());
        }
        assert!(diff.is_zero());
    }
}
