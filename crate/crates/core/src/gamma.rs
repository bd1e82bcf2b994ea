//! The helicity complexes: for each half-integer helicity a three-term graded
//! complex in degrees 1,2,3 whose differential is linear in the momentum.
//!
//! Conventions are frozen so that for helicity 2 (positive sign) the two
//! blocks are exactly
//!
//! ```text
//!   ( a c 0 0 0 )            ( b -a  d -c  0  0  0  0 )
//!   ( b d 0 0 0 )            ( 0  0  b -a  d -c  0  0 )
//!   ( 0 a c 0 0 )            ( 0  0  0  0  b -a  d -c )
//!   ( 0 b d 0 0 )
//!   ( 0 0 a c 0 )
//!   ( 0 0 b d 0 )
//!   ( 0 0 0 a c )
//!   ( 0 0 0 b d )
//! ```
//!
//! and the negative-sign complex swaps the entries `b` and `c`. The degree-3
//! term is dropped for helicity 1/2. Off the cone `det k != 0` these are
//! exact; on the punctured cone the homology is one line in degree 1 and one
//! in degree 2.

use crate::error::Result;
use crate::linalg::Grading;
use crate::momentum::Spinor;
use crate::polymat::{LinForm, PolyComplex, PolyMatrix};
use crate::scalar::Gq;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }

    pub fn from_char(c: char) -> Option<Sign> {
        match c {
            '+' => Some(Sign::Plus),
            '-' => Some(Sign::Minus),
            _ => None,
        }
    }
}

/// Builds the helicity complex for `two_h = 2h >= 1` and the given sign.
///
/// Dimensions are `(2h+1, 4h, 2h-1)` in degrees 1..3; the degree-3 term is
/// dropped when `2h = 1`.
pub fn build_gamma(two_h: u32, sign: Sign) -> Result<PolyComplex> {
    assert!(two_h >= 1, "helicity must be at least 1/2");
    let m = two_h as usize;
    let dims = if m == 1 {
        vec![m + 1, 2 * m]
    } else {
        vec![m + 1, 2 * m, m - 1]
    };
    let grading = Grading::new(1, dims);
    let n = grading.total();
    let mut d = PolyMatrix::zeros(n, n);

    // Entry slots: a=0, b=1, c=2, d=3. For the minus sign, swap b and c.
    let (slot_b, slot_c) = match sign {
        Sign::Plus => (1usize, 2usize),
        Sign::Minus => (2usize, 1usize),
    };
    let one = Gq::one;

    // First block: rows (K, alpha) over columns K of degree 1.
    let off1 = grading.offset(1);
    let off2 = grading.offset(2);
    for k in 0..m {
        d.set(off2 + 2 * k, off1 + k, LinForm::coord(0, one()));
        d.set(off2 + 2 * k, off1 + k + 1, LinForm::coord(slot_c, one()));
        d.set(off2 + 2 * k + 1, off1 + k, LinForm::coord(slot_b, one()));
        d.set(off2 + 2 * k + 1, off1 + k + 1, LinForm::coord(3, one()));
    }

    // Second block: row L hits columns (L,1),(L,2),(L+1,1),(L+1,2).
    if m >= 2 {
        let off3 = grading.offset(3);
        for l in 0..(m - 1) {
            d.set(off3 + l, off2 + 2 * l, LinForm::coord(slot_b, one()));
            d.set(off3 + l, off2 + 2 * l + 1, LinForm::coord(0, -one()));
            d.set(off3 + l, off2 + 2 * l + 2, LinForm::coord(3, one()));
            d.set(off3 + l, off2 + 2 * l + 3, LinForm::coord(slot_c, -one()));
        }
    }

    PolyComplex::new(grading, d)
}

/// Both helicity complexes side by side: the minus block first, then plus.
/// This is the homology model every theory here retracts onto.
pub fn build_gamma_pair(two_h: u32) -> Result<PolyComplex> {
    let minus = build_gamma(two_h, Sign::Minus)?;
    let plus = build_gamma(two_h, Sign::Plus)?;
    Ok(minus.direct_sum(&plus))
}

/// The degree-1 cycle representing the positive-helicity state at `k = v w^T`:
/// in the frozen basis its coordinates are `u_K = (-1)^K v0^K v1^(2h-K)`.
pub fn state_plus(v: &Spinor, two_h: u32) -> Vec<Gq> {
    let m = two_h as usize;
    (0..=m)
        .map(|k| {
            let s = if k % 2 == 0 { Gq::one() } else { -Gq::one() };
            s * v[0].pow(k as u32) * v[1].pow((m - k) as u32)
        })
        .collect()
}

/// Negative-helicity state: same formula built from the right spinor.
pub fn state_minus(w: &Spinor, two_h: u32) -> Vec<Gq> {
    state_plus(w, two_h)
}

/// Coordinates of a state of the given sign inside the combined pair complex
/// (minus block first), as a full degree-1 vector of the pair complex.
pub fn pair_state(v: &Spinor, w: &Spinor, sign: Sign, two_h: u32) -> Vec<Gq> {
    let m = two_h as usize;
    let dim1 = 2 * (m + 1);
    let mut out = vec![Gq::zero(); dim1];
    match sign {
        Sign::Minus => {
            for (j, x) in state_minus(w, two_h).into_iter().enumerate() {
                out[j] = x;
            }
        }
        Sign::Plus => {
            for (j, x) in state_plus(v, two_h).into_iter().enumerate() {
                out[m + 1 + j] = x;
            }
        }
    }
    out
}

/// Reads the coefficient of the sign-block state inside a degree-1 vector of
/// the pair complex. Returns `None` when the block is not proportional to the
/// state (which would mean the vector is not the class of a helicity line).
pub fn read_pair_coefficient(
    vec1: &[Gq],
    v: &Spinor,
    w: &Spinor,
    sign: Sign,
    two_h: u32,
) -> Option<Gq> {
    let m = two_h as usize;
    let (block, state): (&[Gq], Vec<Gq>) = match sign {
        Sign::Minus => (&vec1[..m + 1], state_minus(w, two_h)),
        Sign::Plus => (&vec1[m + 1..2 * (m + 1)], state_plus(v, two_h)),
    };
    let pivot = state.iter().position(|x| !x.is_zero())?;
    let lambda = block[pivot].div(&state[pivot]).ok()?;
    for (b, s) in block.iter().zip(state.iter()) {
        if *b != &lambda * s {
            return None;
        }
    }
    Some(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ExactMatrix;
    use crate::momentum::Mom;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn block(c: &PolyComplex, k: &Mom, deg: i64) -> ExactMatrix {
        let d = c.eval_d(k);
        let g = &c.grading;
        let (ro, rd) = (g.offset(deg + 1), g.dim(deg + 1));
        let (co, cd) = (g.offset(deg), g.dim(deg));
        let mut m = ExactMatrix::zeros(rd, cd);
        for r in 0..rd {
            for cc in 0..cd {
                m[(r, cc)] = d[(ro + r, co + cc)].clone();
            }
        }
        m
    }

    #[test]
    fn helicity_two_blocks_match_frozen_tables() {
        let c = build_gamma(4, Sign::Plus).unwrap();
        assert_eq!(c.grading.dims, vec![5, 8, 3]);
        // Evaluate at a=1,b=2,c=3,d=5 and compare against the table.
        let k = Mom::from_ints(1, 2, 3, 5);
        let b1 = block(&c, &k, 1);
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
        assert_eq!(b1, expect1);
        let b2 = block(&c, &k, 2);
        let expect2 = ExactMatrix::from_int_rows(&[
            &[2, -1, 5, -3, 0, 0, 0, 0],
            &[0, 0, 2, -1, 5, -3, 0, 0],
            &[0, 0, 0, 0, 2, -1, 5, -3],
        ]);
        assert_eq!(b2, expect2);

        // Minus sign swaps b and c.
        let cm = build_gamma(4, Sign::Minus).unwrap();
        let b1m = block(&cm, &k, 1);
        let expect1m = ExactMatrix::from_int_rows(&[
            &[1, 2, 0, 0, 0],
            &[3, 5, 0, 0, 0],
            &[0, 1, 2, 0, 0],
            &[0, 3, 5, 0, 0],
            &[0, 0, 1, 2, 0],
            &[0, 0, 3, 5, 0],
            &[0, 0, 0, 1, 2],
            &[0, 0, 0, 3, 5],
        ]);
        assert_eq!(b1m, expect1m);
    }

    #[test]
    fn helicity_one_dimensions_and_square() {
        let c = build_gamma(2, Sign::Plus).unwrap();
        assert_eq!(c.grading.dims, vec![3, 4, 1]);
        assert!(c.d.squares_to_zero_symbolically());
    }

    #[test]
    fn helicity_half_drops_top_term() {
        let c = build_gamma(1, Sign::Plus).unwrap();
        assert_eq!(c.grading.dims, vec![2, 2]);
    }

    #[test]
    fn homology_dimensions() {
        let c = build_gamma(4, Sign::Plus).unwrap();
        // Off shell: exact.
        assert_eq!(c.homology_dims(&Mom::from_ints(1, 0, 0, 1)), vec![0, 0, 0]);
        // On shell, k != 0: one line in degrees 1 and 2.
        assert_eq!(c.homology_dims(&Mom::from_ints(1, 0, 0, 0)), vec![1, 1, 0]);
        // k = 0: the differential vanishes.
        let g1 = build_gamma(2, Sign::Plus).unwrap();
        assert_eq!(g1.homology_dims(&Mom::zero()), vec![3, 4, 1]);
    }

    #[test]
    fn homology_dims_random_points() {
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let c = build_gamma(4, Sign::Minus).unwrap();
        for _ in 0..50 {
            let v = [
                Gq::random_nonzero(&mut rng, 5),
                Gq::random_int(&mut rng, 5),
            ];
            let w = [
                Gq::random_nonzero(&mut rng, 5),
                Gq::random_int(&mut rng, 5),
            ];
            let k = Mom::from_spinors(&v, &w);
            assert_eq!(c.homology_dims(&k), vec![1, 1, 0]);
        }
        for _ in 0..50 {
            let k = Mom::from_ints(
                rng.gen_range(1..=6),
                rng.gen_range(-6..=6),
                rng.gen_range(-6..=6),
                rng.gen_range(1..=6),
            );
            if k.det().is_zero() {
                continue;
            }
            assert_eq!(c.homology_dims(&k), vec![0, 0, 0]);
        }
    }

    #[test]
    fn states_are_cycles_and_readable() {
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for two_h in [2u32, 4] {
            for _ in 0..10 {
                let v = [
                    Gq::random_nonzero(&mut rng, 4),
                    Gq::random_int(&mut rng, 4),
                ];
                let w = [
                    Gq::random_nonzero(&mut rng, 4),
                    Gq::random_int(&mut rng, 4),
                ];
                let k = Mom::from_spinors(&v, &w);
                let pair = build_gamma_pair(two_h).unwrap();
                let d = pair.eval_d(&k);
                for sign in [Sign::Plus, Sign::Minus] {
                    let mut full = vec![Gq::zero(); pair.grading.total()];
                    let st = pair_state(&v, &w, sign, two_h);
                    full[..st.len()].clone_from_slice(&st);
                    assert!(d.apply(&full).iter().all(|x| x.is_zero()), "state closed");
                    let got = read_pair_coefficient(&st, &v, &w, sign, two_h).unwrap();
                    assert!(got.is_one());
                    // Opposite block reads zero.
                    let other = read_pair_coefficient(&st, &v, &w, sign.flip(), two_h);
                    assert_eq!(other, Some(Gq::zero()));
                }
            }
        }
    }

    #[test]
    fn plus_state_scales_with_v_power() {
        let v = [Gq::from_int(2), Gq::from_int(3)];
        let lam = Gq::from_int(5);
        let scaled = [&v[0] * &lam, &v[1] * &lam];
        let a = state_plus(&v, 4);
        let b = state_plus(&scaled, 4);
        let factor = lam.pow(4);
        for (x, y) in a.iter().zip(b.iter()) {
            assert_eq!(&factor * x, y.clone());
        }
    }
}
