//! Univariate polynomials and rational functions over the Gaussian rationals,
//! plus rational-function reconstruction from exact samples.
//!
//! Reconstruction is used to read residues off one-parameter kinematic
//! families: the values of an amplitude along such a family are exact
//! evaluations of a rational function of the parameter, so a successful fit
//! with held-out validation recovers that function exactly.

use crate::error::{Error, Result};
use crate::linalg::ExactMatrix;
use crate::scalar::Gq;

/// Dense univariate polynomial, coefficients low-to-high, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Poly {
    pub coeffs: Vec<Gq>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Gq>) -> Self {
        while coeffs.last().map(|c| c.is_zero()).unwrap_or(false) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly {
            coeffs: vec![Gq::one()],
        }
    }

    pub fn constant(c: Gq) -> Self {
        Poly::new(vec![c])
    }

    pub fn x() -> Self {
        Poly {
            coeffs: vec![Gq::zero(), Gq::one()],
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; zero polynomial reports -1 for convenience.
    pub fn degree(&self) -> i64 {
        self.coeffs.len() as i64 - 1
    }

    pub fn eval(&self, t: &Gq) -> Gq {
        let mut acc = Gq::zero();
        for c in self.coeffs.iter().rev() {
            acc = &acc * t + c;
        }
        acc
    }

    pub fn derivative(&self) -> Poly {
        if self.coeffs.len() <= 1 {
            return Poly::zero();
        }
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Gq::from_int(k as i64) * c)
                .collect(),
        )
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Gq::zero(); n];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::new(out)
    }

    pub fn neg(&self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        if self.is_zero() || other.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Gq::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (a, ca) in self.coeffs.iter().enumerate() {
            if ca.is_zero() {
                continue;
            }
            for (b, cb) in other.coeffs.iter().enumerate() {
                let t = ca * cb;
                out[a + b] += &t;
            }
        }
        Poly::new(out)
    }

    pub fn scale(&self, s: &Gq) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// Euclidean division: `self = q*div + r` with `deg r < deg div`.
    pub fn divrem(&self, div: &Poly) -> (Poly, Poly) {
        assert!(!div.is_zero(), "division by zero polynomial");
        let mut rem = self.clone();
        let mut q = vec![Gq::zero(); self.coeffs.len().saturating_sub(div.coeffs.len()) + 1];
        let lead_inv = div.coeffs.last().unwrap().inv().expect("nonzero lead");
        while !rem.is_zero() && rem.degree() >= div.degree() {
            let shift = (rem.degree() - div.degree()) as usize;
            let f = rem.coeffs.last().unwrap() * &lead_inv;
            q[shift] = f.clone();
            let mut sub = vec![Gq::zero(); shift];
            sub.extend(div.coeffs.iter().map(|c| c * &f));
            rem = rem.sub(&Poly::new(sub));
        }
        (Poly::new(q), rem)
    }

    /// Monic greatest common divisor.
    pub fn gcd(&self, other: &Poly) -> Poly {
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let (_, r) = a.divrem(&b);
            a = b;
            b = r;
        }
        if a.is_zero() {
            a
        } else {
            let inv = a.coeffs.last().unwrap().inv().unwrap();
            a.scale(&inv)
        }
    }
}

/// Rational function in one variable: `num/den`, `den` monic, gcd cancelled.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatFun1 {
    pub num: Poly,
    pub den: Poly,
}

impl RatFun1 {
    pub fn new(num: Poly, den: Poly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return RatFun1 {
                num: Poly::zero(),
                den: Poly::one(),
            };
        }
        let g = num.gcd(&den);
        let (num, _) = num.divrem(&g);
        let (den, _) = den.divrem(&g);
        let lead_inv = den.coeffs.last().unwrap().inv().unwrap();
        RatFun1 {
            num: num.scale(&lead_inv),
            den: den.scale(&lead_inv),
        }
    }

    pub fn constant(c: Gq) -> Self {
        RatFun1 {
            num: Poly::constant(c),
            den: Poly::one(),
        }
    }

    pub fn eval(&self, t: &Gq) -> Result<Gq> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(Error::PoleHit);
        }
        self.num.eval(t).div(&d)
    }

    /// Exact derivative value at `t`.
    pub fn derivative_at(&self, t: &Gq) -> Result<Gq> {
        let d = self.den.eval(t);
        if d.is_zero() {
            return Err(Error::PoleHit);
        }
        let n = self.num.eval(t);
        let np = self.num.derivative().eval(t);
        let dp = self.den.derivative().eval(t);
        (&np * &d - &n * &dp).div(&(&d * &d))
    }
}

/// Reconstructs the unique rational function of numerator and denominator
/// degree at most `degree_bound` through the samples.
///
/// The last three samples are held out and used only for validation; the
/// rest feed a homogeneous linear system for the coefficients. Returns
/// `InterpolationMismatch` when no function of this degree fits (callers
/// escalate the bound), `PoleHit` when a sample sits on the candidate's pole.
pub fn ratfun_interpolate(samples: &[(Gq, Gq)], degree_bound: usize) -> Result<RatFun1> {
    let d = degree_bound;
    if samples.len() < 2 * d + 2 + 3 {
        return Err(Error::Construction(format!(
            "need at least {} samples for degree bound {d}, got {}",
            2 * d + 5,
            samples.len()
        )));
    }
    {
        let mut nodes: Vec<&Gq> = samples.iter().map(|(t, _)| t).collect();
        nodes.sort_by_key(|t| t.to_string());
        nodes.dedup();
        if nodes.len() != samples.len() {
            return Err(Error::Construction("duplicate sample nodes".into()));
        }
    }
    // The last three samples are excluded from the fit; the validation loop
    // below runs over everything, so they act as held-out checks.
    let (fit, _holdout) = samples.split_at(samples.len() - 3);

    // Unknowns: numerator coefficients n_0..n_d then denominator m_0..m_d.
    // Row per sample: sum n_j t^j - f * sum m_j t^j = 0.
    let mut m = ExactMatrix::zeros(fit.len(), 2 * d + 2);
    for (row, (t, f)) in fit.iter().enumerate() {
        let mut tp = Gq::one();
        for j in 0..=d {
            m[(row, j)] = tp.clone();
            m[(row, d + 1 + j)] = -(f * &tp);
            tp = &tp * t;
        }
    }
    let kernel = m.kernel_basis();
    if kernel.cols == 0 {
        return Err(Error::InterpolationMismatch);
    }
    // Any kernel vector reduces to the same rational function when the data
    // really comes from one; normalization and validation sort out the rest.
    let v = kernel.col(0);
    let num = Poly::new(v[..=d].to_vec());
    let den = Poly::new(v[d + 1..].to_vec());
    if den.is_zero() {
        return Err(Error::InterpolationMismatch);
    }
    let f = RatFun1::new(num, den);
    for (t, val) in samples.iter() {
        match f.eval(t) {
            Ok(y) if y == *val => {}
            Ok(_) => return Err(Error::InterpolationMismatch),
            Err(_) => return Err(Error::PoleHit),
        }
    }
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn q(n: i64, d: i64) -> Gq {
        Gq::from_ratio(n, d)
    }

    #[test]
    fn eval_simple_inverse() {
        let f = RatFun1::new(Poly::one(), Poly::x());
        assert_eq!(f.eval(&Gq::from_int(2)).unwrap(), q(1, 2));
        assert_eq!(f.eval(&Gq::zero()).unwrap_err(), Error::PoleHit);
    }

    #[test]
    fn cancellation_normalizes() {
        // (t^2 - 1)/(t - 1) = t + 1
        let num = Poly::new(vec![Gq::from_int(-1), Gq::zero(), Gq::one()]);
        let den = Poly::new(vec![Gq::from_int(-1), Gq::one()]);
        let f = RatFun1::new(num, den);
        assert_eq!(f.den, Poly::one());
        assert_eq!(f.eval(&Gq::from_int(3)).unwrap(), Gq::from_int(4));
    }

    #[test]
    fn identity_at_i() {
        let f = RatFun1::new(Poly::x(), Poly::one());
        assert_eq!(f.eval(&Gq::i()).unwrap(), Gq::i());
    }

    #[test]
    fn interpolate_shifted_inverse() {
        // f(t) = 1/(t-1) sampled away from the pole.
        let f = RatFun1::new(
            Poly::one(),
            Poly::new(vec![Gq::from_int(-1), Gq::one()]),
        );
        let samples: Vec<(Gq, Gq)> = [0, 2, 3, 4, 5, 6, 7]
            .iter()
            .map(|&n| {
                let t = Gq::from_int(n);
                let v = f.eval(&t).unwrap();
                (t, v)
            })
            .collect();
        let g = ratfun_interpolate(&samples, 1).unwrap();
        assert_eq!(g, f);
    }

    #[test]
    fn interpolate_constant() {
        let samples: Vec<(Gq, Gq)> = (0..9)
            .map(|n| (Gq::from_int(n), Gq::from_int(7)))
            .collect();
        let g = ratfun_interpolate(&samples, 1).unwrap();
        assert_eq!(g.eval(&Gq::from_int(100)).unwrap(), Gq::from_int(7));
        assert_eq!(g.num, Poly::constant(Gq::from_int(7)));
    }

    #[test]
    fn interpolate_then_evaluate_fresh_point() {
        // f(t) = (2t+1)/(t^2+1); direct evaluation is the oracle.
        let f = RatFun1::new(
            Poly::new(vec![Gq::from_int(1), Gq::from_int(2)]),
            Poly::new(vec![Gq::from_int(1), Gq::zero(), Gq::from_int(1)]),
        );
        let samples: Vec<(Gq, Gq)> = (0..9)
            .map(|n| {
                let t = Gq::from_int(n);
                let v = f.eval(&t).unwrap();
                (t, v)
            })
            .collect();
        let g = ratfun_interpolate(&samples, 2).unwrap();
        let fresh = Gq::from_int(10);
        assert_eq!(g.eval(&fresh).unwrap(), q(21, 101));
        assert_eq!(g.eval(&fresh).unwrap(), f.eval(&fresh).unwrap());
    }

    #[test]
    fn degree_bound_too_small_detected() {
        let f = RatFun1::new(
            Poly::new(vec![Gq::from_int(1), Gq::from_int(2)]),
            Poly::new(vec![Gq::from_int(1), Gq::zero(), Gq::from_int(1)]),
        );
        let samples: Vec<(Gq, Gq)> = (0..9)
            .map(|n| {
                let t = Gq::from_int(n);
                let v = f.eval(&t).unwrap();
                (t, v)
            })
            .collect();
        assert!(matches!(
            ratfun_interpolate(&samples, 1),
            Err(Error::InterpolationMismatch)
        ));
    }

    #[test]
    fn roundtrip_random_ratfun() {
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        for _ in 0..10 {
            let dn = rng.gen_range(0..=4usize);
            let dd = rng.gen_range(0..=4usize);
            let num = Poly::new(
                (0..=dn)
                    .map(|_| Gq::from_int(rng.gen_range(-5..=5)))
                    .collect(),
            );
            let mut den_coeffs: Vec<Gq> = (0..dd)
                .map(|_| Gq::from_int(rng.gen_range(-5..=5)))
                .collect();
            den_coeffs.push(Gq::one());
            let den = Poly::new(den_coeffs);
            if num.is_zero() {
                continue;
            }
            let f = RatFun1::new(num, den);
            let bound = 8usize;
            let mut samples = Vec::new();
            let mut t = 0i64;
            while samples.len() < 2 * bound + 5 {
                let tq = Gq::from_int(t);
                if let Ok(v) = f.eval(&tq) {
                    samples.push((tq, v));
                }
                t += 1;
            }
            let g = ratfun_interpolate(&samples, bound).unwrap();
            assert_eq!(g, f);
        }
    }
}
