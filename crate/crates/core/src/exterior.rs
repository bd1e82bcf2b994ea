//! Exterior algebra on four generators and the (anti-)self-dual bases used
//! by the gauge-theory and gravity constructions. Everything here is basis
//! bookkeeping: subsets of {0,1,2,3} with merge signs, the distinguished
//! 2-form bases, and the complexified Lorentz generators.

use crate::linalg::ExactMatrix;
use crate::scalar::Gq;

/// Basis 1-forms are indexed 0..4; a basis p-form is a sorted subset mask.
/// Masks are u8 bitmasks over the four generators.
pub const FORM_DIMS: [usize; 5] = [1, 4, 6, 4, 1];

/// Sorted list of masks for each form degree, the frozen basis order.
pub fn degree_masks(p: usize) -> Vec<u8> {
    let mut v: Vec<u8> = (0u8..16).filter(|m| m.count_ones() as usize == p).collect();
    v.sort();
    v
}

/// Index of a mask within its degree list.
pub fn mask_index(mask: u8) -> usize {
    degree_masks(mask.count_ones() as usize)
        .iter()
        .position(|&m| m == mask)
        .unwrap()
}

/// Wedge of two basis forms: `None` if they overlap, else (sign, union mask).
pub fn wedge_masks(x: u8, y: u8) -> Option<(i64, u8)> {
    if x & y != 0 {
        return None;
    }
    // Sign: count transpositions merging sorted(x) ++ sorted(y).
    let mut sign = 0u32;
    for i in 0..4u8 {
        if y & (1 << i) != 0 {
            // generators of x strictly above i must move past y's generator i
            sign += (x >> (i + 1)).count_ones();
        }
    }
    Some((if sign % 2 == 0 { 1 } else { -1 }, x | y))
}

/// A sparse multivector: (mask, coefficient) pairs with distinct masks.
pub type FormVec = Vec<(u8, Gq)>;

pub fn form_add(acc: &mut FormVec, mask: u8, c: Gq) {
    if c.is_zero() {
        return;
    }
    for (m, x) in acc.iter_mut() {
        if *m == mask {
            *x += &c;
            return;
        }
    }
    acc.push((mask, c));
}

pub fn form_normalize(acc: FormVec) -> FormVec {
    acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
}

/// Wedge of two sparse forms.
pub fn form_wedge(a: &FormVec, b: &FormVec) -> FormVec {
    let mut out = FormVec::new();
    for (ma, ca) in a {
        for (mb, cb) in b {
            if let Some((s, m)) = wedge_masks(*ma, *mb) {
                let mut c = ca * cb;
                if s < 0 {
                    c = -c;
                }
                form_add(&mut out, m, c);
            }
        }
    }
    form_normalize(out)
}

/// Expands `f_i^± = e0i ± i e_jk` ((i,j,k) cyclic in (1,2,3)) over the
/// sorted-mask degree-2 basis; `e31 = -e13` is folded in.
pub fn f_in_sorted_basis(sign_plus: bool) -> [FormVec; 3] {
    let ii = if sign_plus { Gq::i() } else { -Gq::i() };
    let m01 = 0b0011u8;
    let m02 = 0b0101u8;
    let m03 = 0b1001u8;
    let m12 = 0b0110u8;
    let m13 = 0b1010u8;
    let m23 = 0b1100u8;
    [
        vec![(m01, Gq::one()), (m23, ii.clone())],
        vec![(m02, Gq::one()), (m13, -&ii)],
        vec![(m03, Gq::one()), (m12, ii)],
    ]
}

/// Change of basis on degree-2 forms: columns are `f1+ f2+ f3+ f1- f2- f3-`
/// in sorted-mask coordinates; the inverse extracts (plus|minus) parts.
pub fn omega2_basis_change() -> (ExactMatrix, ExactMatrix) {
    let plus = f_in_sorted_basis(true);
    let minus = f_in_sorted_basis(false);
    let mut m = ExactMatrix::zeros(6, 6);
    for (j, f) in plus.iter().chain(minus.iter()).enumerate() {
        for (mask, c) in f {
            m[(mask_index(*mask), j)] = c.clone();
        }
    }
    let inv = m.inverse().expect("2-form basis change invertible");
    (m, inv)
}

/// The metric `diag(1,-1,-1,-1)` in plane-wave coordinates.
pub fn eta() -> [i64; 4] {
    [1, -1, -1, -1]
}

/// Lorentz generator attached to the basis 2-form `e_{mu nu}` (`mu < nu`):
/// the matrix with entries `M[r][s] = eta^{rr} (delta_{r mu} delta_{s nu}
/// - delta_{r nu} delta_{s mu})` acting on column vectors.
pub fn lorentz_generator(mu: usize, nu: usize) -> ExactMatrix {
    let eta = eta();
    let mut m = ExactMatrix::zeros(4, 4);
    // omega_{mu nu} = 1, omega_{nu mu} = -1; (phi omega)^r_s = eta^{rr} omega_{r s}
    m[(mu, nu)] = Gq::from_int(eta[mu]);
    m[(nu, mu)] = Gq::from_int(-eta[nu]);
    m
}

/// The six generators in the frozen order `(01),(02),(03),(12),(13),(23)`.
pub fn so13_basis() -> Vec<((usize, usize), ExactMatrix)> {
    let pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    pairs
        .iter()
        .map(|&(a, b)| ((a, b), lorentz_generator(a, b)))
        .collect()
}

/// Generator attached to a 2-form basis mask (two set bits).
pub fn generator_for_mask(mask: u8) -> ExactMatrix {
    let mut bits = (0..4usize).filter(|i| mask & (1 << i) != 0);
    let mu = bits.next().unwrap();
    let nu = bits.next().unwrap();
    lorentz_generator(mu, nu)
}

/// so(1,3) element attached to a sparse 2-form via the index-raising map.
pub fn generator_for_form(f: &FormVec) -> ExactMatrix {
    let mut m = ExactMatrix::zeros(4, 4);
    for (mask, c) in f {
        m = m.add(&generator_for_mask(*mask).scale(c));
    }
    m
}

/// Expands a 4x4 matrix in the span of the six generators; `None` if outside.
pub fn so13_coords(m: &ExactMatrix) -> Option<Vec<Gq>> {
    let basis = so13_basis();
    let cols: Vec<Vec<Gq>> = basis
        .iter()
        .map(|(_, g)| {
            let mut v = Vec::with_capacity(16);
            for r in 0..4 {
                for c in 0..4 {
                    v.push(g[(r, c)].clone());
                }
            }
            v
        })
        .collect();
    let mut target = Vec::with_capacity(16);
    for r in 0..4 {
        for c in 0..4 {
            target.push(m[(r, c)].clone());
        }
    }
    let a = ExactMatrix::from_cols(cols);
    let b = ExactMatrix::from_cols(vec![target]);
    let x = a.solve(&b)?;
    // verify
    let mut recon = ExactMatrix::zeros(4, 4);
    for (j, (_, g)) in basis.iter().enumerate() {
        recon = recon.add(&g.scale(&x[(j, 0)]));
    }
    if &recon == m {
        Some((0..6).map(|j| x[(j, 0)].clone()).collect())
    } else {
        None
    }
}

/// Action of a Lorentz generator on a basis form `e_mask` as a derivation:
/// each generator `e_s -> sum_r lambda[r][s] e_r`.
pub fn lorentz_action_on_form(lambda: &ExactMatrix, mask: u8) -> FormVec {
    let mut out = FormVec::new();
    for pos in 0..4u8 {
        if mask & (1 << pos) == 0 {
            continue;
        }
        // replace generator `pos` by its image
        for r in 0..4u8 {
            let coeff = lambda[(r as usize, pos as usize)].clone();
            if coeff.is_zero() {
                continue;
            }
            let rest = mask & !(1 << pos);
            if rest & (1 << r) != 0 {
                continue; // repeated generator dies
            }
            // sign: move e_r into the sorted position within `rest`
            // count generators in `rest` strictly below `pos` vs below `r`:
            // removing e_pos and inserting e_r at sorted position costs
            // (# of rest-generators between min(r,pos)..max(r,pos)) swaps.
            let lo = r.min(pos);
            let hi = r.max(pos);
            let mut between = 0;
            for t in (lo + 1)..hi {
                if rest & (1 << t) != 0 {
                    between += 1;
                }
            }
            let sign = if between % 2 == 0 {
                Gq::one()
            } else {
                -Gq::one()
            };
            form_add(&mut out, rest | (1 << r), &coeff * &sign);
        }
    }
    form_normalize(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        // e1 ^ e0 = -e0 ^ e1
        assert_eq!(wedge_masks(0b0010, 0b0001), Some((-1, 0b0011)));
        assert_eq!(wedge_masks(0b0001, 0b0010), Some((1, 0b0011)));
        assert_eq!(wedge_masks(0b0001, 0b0001), None);
        // e01 ^ e23 = + e0123
        assert_eq!(wedge_masks(0b0011, 0b1100), Some((1, 0b1111)));
        // e02 ^ e13 = - e0123 (one transposition: 1 past 2)
        assert_eq!(wedge_masks(0b0101, 0b1010), Some((-1, 0b1111)));
    }

    #[test]
    fn generators_preserve_eta() {
        // lambda^T eta + eta lambda = 0 for all generators.
        let eta_m = {
            let mut m = ExactMatrix::zeros(4, 4);
            for (i, e) in eta().iter().enumerate() {
                m[(i, i)] = Gq::from_int(*e);
            }
            m
        };
        for (_, g) in so13_basis() {
            let lhs = g.transpose().mul(&eta_m).add(&eta_m.mul(&g));
            assert!(lhs.is_zero_matrix());
        }
    }

    #[test]
    fn so13_closes_under_bracket() {
        let basis = so13_basis();
        for (_, x) in &basis {
            for (_, y) in &basis {
                let br = x.mul(y).sub(&y.mul(x));
                assert!(so13_coords(&br).is_some(), "bracket stays in so(1,3)");
            }
        }
    }

    #[test]
    fn self_dual_splits_so13() {
        // lambda_i^± := phi(f_i^±) span two commuting sl2's.
        let lam = |sign_plus: bool, i: usize| -> ExactMatrix {
            generator_for_form(&f_in_sorted_basis(sign_plus)[i])
        };
        for i in 0..3 {
            for j in 0..3 {
                let p = lam(true, i);
                let mm = lam(false, j);
                let br = p.mul(&mm).sub(&mm.mul(&p));
                assert!(br.is_zero_matrix(), "plus and minus halves commute");
            }
            // And each half closes on itself.
            for j in 0..3 {
                let x = lam(true, i);
                let y = lam(true, j);
                let br = x.mul(&y).sub(&y.mul(&x));
                assert!(so13_coords(&br).is_some());
            }
        }
    }
}
