//! Complex momenta as 2x2 matrices, and their spinor factorizations.
//!
//! A momentum is `k = (a b; c d)` with Minkowski square `Q = det k = ad - bc`.
//! On the cone `Q = 0` every nonzero `k` factors as `k = v w^T` for spinors
//! `v, w` in C^2. The translation between matrix entries and the four
//! plane-wave components is
//!   `k0 = (a+d)/2, k1 = (b+c)/2, k2 = i(b-c)/2, k3 = (a-d)/2`
//! so that `det k = k0^2 - k1^2 - k2^2 - k3^2`.

use crate::scalar::Gq;
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mom {
    pub a: Gq,
    pub b: Gq,
    pub c: Gq,
    pub d: Gq,
}

pub type Spinor = [Gq; 2];

impl Mom {
    pub fn zero() -> Self {
        Mom {
            a: Gq::zero(),
            b: Gq::zero(),
            c: Gq::zero(),
            d: Gq::zero(),
        }
    }

    pub fn from_entries(a: Gq, b: Gq, c: Gq, d: Gq) -> Self {
        Mom { a, b, c, d }
    }

    pub fn from_ints(a: i64, b: i64, c: i64, d: i64) -> Self {
        Mom {
            a: Gq::from_int(a),
            b: Gq::from_int(b),
            c: Gq::from_int(c),
            d: Gq::from_int(d),
        }
    }

    pub fn from_spinors(v: &Spinor, w: &Spinor) -> Self {
        Mom {
            a: &v[0] * &w[0],
            b: &v[0] * &w[1],
            c: &v[1] * &w[0],
            d: &v[1] * &w[1],
        }
    }

    pub fn det(&self) -> Gq {
        &self.a * &self.d - &self.b * &self.c
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero() && self.c.is_zero() && self.d.is_zero()
    }

    pub fn add(&self, other: &Mom) -> Mom {
        Mom {
            a: &self.a + &other.a,
            b: &self.b + &other.b,
            c: &self.c + &other.c,
            d: &self.d + &other.d,
        }
    }

    pub fn sub(&self, other: &Mom) -> Mom {
        Mom {
            a: &self.a - &other.a,
            b: &self.b - &other.b,
            c: &self.c - &other.c,
            d: &self.d - &other.d,
        }
    }

    pub fn neg(&self) -> Mom {
        Mom {
            a: -&self.a,
            b: -&self.b,
            c: -&self.c,
            d: -&self.d,
        }
    }

    pub fn scale(&self, s: &Gq) -> Mom {
        Mom {
            a: &self.a * s,
            b: &self.b * s,
            c: &self.c * s,
            d: &self.d * s,
        }
    }

    pub fn entries(&self) -> [Gq; 4] {
        [
            self.a.clone(),
            self.b.clone(),
            self.c.clone(),
            self.d.clone(),
        ]
    }

    /// Plane-wave components `(k0, k1, k2, k3)`.
    pub fn components(&self) -> [Gq; 4] {
        let half = Gq::from_ratio(1, 2);
        let half_i = &Gq::i() * &half;
        [
            (&self.a + &self.d) * &half,
            (&self.b + &self.c) * &half,
            (&self.b - &self.c) * &half_i,
            (&self.a - &self.d) * &half,
        ]
    }

    /// Gradient of `Q = det` in `(a, b, c, d)` coordinates: `(d, -c, -b, a)`.
    pub fn det_gradient(&self) -> [Gq; 4] {
        [self.d.clone(), -&self.c, -&self.b, self.a.clone()]
    }

    /// Two momenta are parallel iff all 2x2 minors of the 4x2 stack vanish.
    pub fn parallel_to(&self, other: &Mom) -> bool {
        let x = self.entries();
        let y = other.entries();
        for i in 0..4 {
            for j in (i + 1)..4 {
                if !(&x[i] * &y[j] - &x[j] * &y[i]).is_zero() {
                    return false;
                }
            }
        }
        true
    }

    /// Factors a rank-one matrix as `v w^T`. `None` if zero or rank two.
    pub fn factor_rank_one(&self) -> Option<(Spinor, Spinor)> {
        if self.is_zero() || !self.det().is_zero() {
            return None;
        }
        // Pick the nonzero row/column structure.
        if !self.a.is_zero() || !self.b.is_zero() {
            // first row nonzero: w^T proportional to (a, b)
            let (w0, w1) = (self.a.clone(), self.b.clone());
            // v = (1, c/a) or (1, d/b)
            let v1 = if !self.a.is_zero() {
                self.c.div(&self.a).ok()?
            } else {
                self.d.div(&self.b).ok()?
            };
            Some(([Gq::one(), v1], [w0, w1]))
        } else {
            // second row nonzero: v = (0, 1), w^T = (c, d)
            Some(([Gq::zero(), Gq::one()], [self.c.clone(), self.d.clone()]))
        }
    }
}

/// `v^T eps w` with `eps = (0 1; -1 0)`: the symplectic spinor pairing.
pub fn eps_pair(v: &Spinor, w: &Spinor) -> Gq {
    &v[0] * &w[1] - &v[1] * &w[0]
}

/// `adj(k)` for 2x2 `k`: `(d -b; -c a)`, so `k adj(k) = det(k) 1`.
pub fn adjugate(k: &Mom) -> Mom {
    Mom {
        a: k.d.clone(),
        b: -&k.b,
        c: -&k.c,
        d: k.a.clone(),
    }
}
