//! Trivalent trees with labeled inputs: enumeration, planar embeddings,
//! sign bookkeeping, and evaluation against a graded Lie algebra decorated
//! with homotopies on internal lines.
//!
//! Planar trees are parenthesizations; the unordered tree is the class under
//! node flips. The sign of a planar evaluation has three factors: a node sign
//! `(-1)^{deg x}` folded into each bracket, a permutation sign counting only
//! the even-degree inputs, and a global per-arity sign normalized so that
//! all-odd inputs always evaluate with a plus sign.

use crate::dgla::{DgLaSpec, Element};
use crate::error::{Error, Result};
use crate::homotopy::trivial_homotopy;
use crate::linalg::ExactMatrix;
use crate::momentum::Mom;
use crate::scalar::Gq;
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Tree {
    Leaf(usize),
    Node(Box<Tree>, Box<Tree>),
}

impl Tree {
    pub fn leaves(&self) -> Vec<usize> {
        match self {
            Tree::Leaf(j) => vec![*j],
            Tree::Node(a, b) => {
                let mut v = a.leaves();
                v.extend(b.leaves());
                v
            }
        }
    }

    pub fn leaf_mask(&self) -> u32 {
        self.leaves().iter().fold(0, |m, j| m | (1 << j))
    }

    pub fn format(&self) -> String {
        match self {
            Tree::Leaf(j) => (j + 1).to_string(),
            Tree::Node(a, b) => format!("({},{})", a.format(), b.format()),
        }
    }

    /// Canonical representative of the unordered tree: at every node the
    /// lexicographically smaller branch goes left.
    pub fn canonical(&self) -> Tree {
        match self {
            Tree::Leaf(j) => Tree::Leaf(*j),
            Tree::Node(a, b) => {
                let ca = a.canonical();
                let cb = b.canonical();
                if ca <= cb {
                    Tree::Node(Box::new(ca), Box::new(cb))
                } else {
                    Tree::Node(Box::new(cb), Box::new(ca))
                }
            }
        }
    }

    fn attach_everywhere(&self, leaf: usize, out: &mut Vec<Tree>) {
        // Replace self by (self, leaf) ...
        out.push(Tree::Node(
            Box::new(self.clone()),
            Box::new(Tree::Leaf(leaf)),
        ));
        // ... or recurse into branches.
        if let Tree::Node(a, b) = self {
            let mut sub = Vec::new();
            a.attach_everywhere(leaf, &mut sub);
            for s in sub {
                out.push(Tree::Node(Box::new(s), Box::new((**b).clone())));
            }
            let mut sub = Vec::new();
            b.attach_everywhere(leaf, &mut sub);
            for s in sub {
                out.push(Tree::Node(Box::new((**a).clone()), Box::new(s)));
            }
        }
    }
}

/// All unordered trivalent trees with inputs `0..n`, one planar
/// representative each, built by attaching each new leaf to every edge.
/// The count is the double factorial `(2n-3)!!`.
pub fn enumerate_trees(n: usize) -> Vec<Tree> {
    assert!(n >= 2);
    let mut trees = vec![Tree::Node(
        Box::new(Tree::Leaf(0)),
        Box::new(Tree::Leaf(1)),
    )];
    for leaf in 2..n {
        let mut next = Vec::new();
        for t in &trees {
            t.attach_everywhere(leaf, &mut next);
        }
        trees = next;
    }
    trees
}

pub fn double_factorial_count(n: usize) -> u64 {
    // (2n-3)!!
    let mut acc = 1u64;
    let mut k = 2 * n as i64 - 3;
    while k > 1 {
        acc *= k as u64;
        k -= 2;
    }
    acc
}

/// All planar embeddings of a tree: every internal node flips independently,
/// `2^(n-1)` in total.
pub fn planar_embeddings(t: &Tree) -> Vec<Tree> {
    match t {
        Tree::Leaf(j) => vec![Tree::Leaf(*j)],
        Tree::Node(a, b) => {
            let la = planar_embeddings(a);
            let lb = planar_embeddings(b);
            let mut out = Vec::new();
            for x in &la {
                for y in &lb {
                    out.push(Tree::Node(Box::new(x.clone()), Box::new(y.clone())));
                    out.push(Tree::Node(Box::new(y.clone()), Box::new(x.clone())));
                }
            }
            out
        }
    }
}

/// Permutation sign over the even-degree inputs plus the fixed per-arity
/// sign. Degrees are indexed by input label. Normalized so that the total
/// planar evaluation (including the node signs folded into the brackets) of
/// any tree on all-odd inputs carries a plus sign.
pub fn koszul_sign(p: &Tree, degrees: &[i64]) -> i64 {
    let order = p.leaves();
    let n = degrees.len();
    // Inversions among even-degree labels in planar order.
    let evens: Vec<usize> = order
        .iter()
        .copied()
        .filter(|&j| degrees[j].rem_euclid(2) == 0)
        .collect();
    let mut inv = 0usize;
    for i in 0..evens.len() {
        for j in (i + 1)..evens.len() {
            if evens[i] > evens[j] {
                inv += 1;
            }
        }
    }
    // Fixed sign: degrees at 1-based positions n-1, n-3, ...
    let mut s = 0i64;
    let mut idx = n as i64 - 1;
    while idx >= 1 {
        s += degrees[(idx - 1) as usize].rem_euclid(2);
        idx -= 2;
    }
    // Normalization making all-odd inputs come out plus.
    let norm = (n - 1) + n / 2;
    if (inv as i64 + s + norm as i64) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Homotopies for the internal lines of a tree evaluation, keyed by the
/// leaf subset below the line.
#[derive(Clone)]
pub struct HomotopyCache {
    pub by_mask: BTreeMap<u32, ExactMatrix>,
}

impl HomotopyCache {
    pub fn get(&self, mask: u32) -> Result<&ExactMatrix> {
        self.by_mask.get(&mask).ok_or(Error::IncompleteAssignment)
    }
}

/// Trivial homotopies at every internal momentum of an n-input evaluation.
/// The momenta must be off shell, which genericity of the ambient tuple
/// guarantees.
pub fn build_homotopy_cache(
    spec: &DgLaSpec,
    input_moms: &[Mom],
    seed: u64,
) -> Result<HomotopyCache> {
    let n = input_moms.len();
    let mut by_mask = BTreeMap::new();
    for mask in 1u32..(1 << n) {
        let sz = mask.count_ones() as usize;
        if sz < 2 || sz >= n {
            continue;
        }
        let mut k = Mom::zero();
        for (i, m) in input_moms.iter().enumerate() {
            if mask & (1 << i) != 0 {
                k = k.add(m);
            }
        }
        let h = trivial_homotopy(&spec.complex, &k, seed ^ (0x5851_f42d * mask as u64))?;
        by_mask.insert(mask, h);
    }
    Ok(HomotopyCache { by_mask })
}

fn eval_subtree(
    t: &Tree,
    spec: &DgLaSpec,
    cache: &HomotopyCache,
    inputs: &[Element],
    is_root: bool,
) -> Result<Element> {
    match t {
        Tree::Leaf(j) => Ok(inputs[*j].clone()),
        Tree::Node(a, b) => {
            let xa = eval_subtree(a, spec, cache, inputs, false)?;
            let xb = eval_subtree(b, spec, cache, inputs, false)?;
            // bracket with the degree sign folded in
            let mut z = spec.eval_bracket(&xa, &xb);
            if xa.degree.rem_euclid(2) == 1 {
                z = z.scale(&-Gq::one());
            }
            if is_root {
                return Ok(z);
            }
            let h = cache.get(t.leaf_mask())?;
            Ok(Element {
                degree: z.degree - 1,
                mom: z.mom.clone(),
                v: h.apply(&z.v),
            })
        }
    }
}

/// Evaluates one planar tree: nested signed brackets with homotopies on the
/// internal lines, times the Koszul sign. The root line carries no homotopy
/// and no projection; the caller pairs the output.
pub fn eval_tree(
    p: &Tree,
    spec: &DgLaSpec,
    cache: &HomotopyCache,
    inputs: &[Element],
) -> Result<Element> {
    let degrees: Vec<i64> = inputs.iter().map(|e| e.degree).collect();
    let raw = eval_subtree(p, spec, cache, inputs, true)?;
    let sign = koszul_sign(p, &degrees);
    Ok(if sign < 0 {
        raw.scale(&-Gq::one())
    } else {
        raw
    })
}

/// The sum over all trees, computed by the subset recursion
/// `S(J) = H_J * sum over unordered splits of [S(A), S(B)]`.
///
/// Valid for odd-degree inputs, where the signed bracket is symmetric and the
/// permutation sign is trivial; the per-tree evaluation is the oracle this
/// is tested against.
pub fn tree_sum_all(
    spec: &DgLaSpec,
    cache: &HomotopyCache,
    inputs: &[Element],
) -> Result<Element> {
    let n = inputs.len();
    assert!(n >= 2);
    assert!(
        inputs.iter().all(|e| e.degree.rem_euclid(2) == 1),
        "subset recursion requires odd inputs"
    );
    let full = (1u32 << n) - 1;
    let mut memo: BTreeMap<u32, Element> = BTreeMap::new();
    for (i, e) in inputs.iter().enumerate() {
        memo.insert(1 << i, e.clone());
    }
    // Subsets in increasing popcount order.
    let mut masks: Vec<u32> = (1..=full).filter(|m| m.count_ones() >= 2).collect();
    masks.sort_by_key(|m| m.count_ones());
    for mask in masks {
        let mut acc: Option<Element> = None;
        // Unordered splits: submasks containing the lowest set bit.
        let low = mask & mask.wrapping_neg();
        let mut sub = (mask - 1) & mask;
        while sub > 0 {
            if sub & low != 0 && sub != mask {
                let other = mask & !sub;
                let xa = memo.get(&sub).expect("built in order");
                let xb = memo.get(&other).expect("built in order");
                let mut z = spec.eval_bracket(xa, xb);
                if xa.degree.rem_euclid(2) == 1 {
                    z = z.scale(&-Gq::one());
                }
                acc = Some(match acc {
                    None => z,
                    Some(a) => a.add(&z),
                });
            }
            sub = (sub - 1) & mask;
        }
        let mut z = acc.expect("nonempty split set");
        if mask != full {
            let h = cache.get(mask)?;
            z = Element {
                degree: z.degree - 1,
                mom: z.mom.clone(),
                v: h.apply(&z.v),
            };
        }
        memo.insert(mask, z);
    }
    // Global sign for all-odd inputs: the node signs contribute (-1)^(n-1),
    // the normalized fixed sign cancels it.
    let mut out = memo.remove(&full).unwrap();
    if (n - 1) % 2 == 1 {
        out = out.scale(&-Gq::one());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgla::{build_ym, InternalLieAlgebra};
    use crate::kinematics::sample_onshell_tuple;
    use once_cell::sync::Lazy;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    static YM: Lazy<DgLaSpec> = Lazy::new(|| build_ym(InternalLieAlgebra::sl2()).unwrap());

    #[test]
    fn enumeration_counts() {
        for n in 2..=7usize {
            let trees = enumerate_trees(n);
            assert_eq!(trees.len() as u64, double_factorial_count(n), "n = {n}");
            // no duplicates up to flips
            let mut canon: Vec<Tree> = trees.iter().map(|t| t.canonical()).collect();
            canon.sort();
            canon.dedup();
            assert_eq!(canon.len(), trees.len(), "n = {n}");
        }
    }

    #[test]
    fn embedding_counts() {
        for n in 2..=4usize {
            for t in enumerate_trees(n) {
                let em = planar_embeddings(&t);
                assert_eq!(em.len(), 1 << (n - 1));
                let mut canon: Vec<Tree> = em.iter().map(|e| e.canonical()).collect();
                canon.sort();
                canon.dedup();
                assert_eq!(canon.len(), 1, "all embeddings of one tree");
            }
        }
    }

    fn parse_tree(s: &str) -> Tree {
        // tiny parser for "(A,B)" / integer labels (1-based)
        fn inner(chars: &mut std::iter::Peekable<std::str::Chars>) -> Tree {
            if chars.peek() == Some(&'(') {
                chars.next();
                let a = inner(chars);
                assert_eq!(chars.next(), Some(','));
                let b = inner(chars);
                assert_eq!(chars.next(), Some(')'));
                Tree::Node(Box::new(a), Box::new(b))
            } else {
                let mut num = String::new();
                while chars.peek().map(|c| c.is_ascii_digit()).unwrap_or(false) {
                    num.push(chars.next().unwrap());
                }
                Tree::Leaf(num.parse::<usize>().unwrap() - 1)
            }
        }
        inner(&mut s.chars().peekable())
    }

    /// Total coefficient of the plain-bracket expression for a planar tree,
    /// i.e. Koszul sign times the inline node signs, computed symbolically.
    fn total_plain_sign(p: &Tree, degrees: &[i64]) -> i64 {
        fn node_signs(t: &Tree, degrees: &[i64], is_root: bool) -> (i64, i64) {
            // returns (sign, resulting degree of the subtree value)
            match t {
                Tree::Leaf(j) => (1, degrees[*j]),
                Tree::Node(a, b) => {
                    let (sa, da) = node_signs(a, degrees, false);
                    let (sb, db) = node_signs(b, degrees, false);
                    let node = if da.rem_euclid(2) == 1 { -1 } else { 1 };
                    let deg = da + db - if is_root { 0 } else { 1 };
                    (sa * sb * node, deg)
                }
            }
        }
        let (s, _) = node_signs(p, degrees, true);
        s * koszul_sign(p, degrees)
    }

    #[test]
    fn plain_bracket_signs_match_frozen_examples() {
        // left comb on five inputs: always plus
        let comb = parse_tree("((((1,2),3),4),5)");
        for degs in [
            vec![1i64, 1, 1, 1, 1],
            vec![2, 1, 1, 2, 1],
            vec![2, 2, 2, 2, 2],
            vec![1, 2, 2, 1, 2],
        ] {
            assert_eq!(total_plain_sign(&comb, &degs), 1, "{degs:?}");
        }
        // (((1,2),3),(4,5)): coefficient (-1)^(1 + x1 + x2 + x3)
        let split = parse_tree("(((1,2),3),(4,5))");
        for degs in [
            vec![1i64, 1, 1, 1, 1],
            vec![2, 1, 1, 2, 1],
            vec![1, 2, 1, 1, 2],
            vec![2, 2, 2, 2, 2],
        ] {
            let expect = if (1 + degs[0] + degs[1] + degs[2]) % 2 == 0 {
                1
            } else {
                -1
            };
            assert_eq!(total_plain_sign(&split, &degs), expect, "{degs:?}");
        }
        // two inputs: m_(12) = p[i x1, i x2] with a plus for any degrees
        let pair = parse_tree("(1,2)");
        for degs in [vec![1i64, 1], vec![2, 1], vec![1, 2], vec![2, 2]] {
            assert_eq!(total_plain_sign(&pair, &degs), 1);
        }
        // all odd always plus, any tree, up to n = 5
        for n in 2..=5usize {
            for t in enumerate_trees(n) {
                for p in planar_embeddings(&t) {
                    assert_eq!(total_plain_sign(&p, &vec![1i64; n]), 1);
                }
            }
        }
    }

    fn random_odd_inputs(n: usize, seed: u64) -> (Vec<Element>, HomotopyCache) {
        // independent on-shell momenta from a conserving (n+1)-tuple keep all
        // internal lines off shell
        let tuple = sample_onshell_tuple(n + 1, &"+".repeat(n + 1), seed, None).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0xabcd);
        let inputs: Vec<Element> = (0..n)
            .map(|i| YM.random_element(1, tuple.mom(i), &mut rng))
            .collect();
        let moms: Vec<Mom> = (0..n).map(|i| tuple.mom(i)).collect();
        let cache = build_homotopy_cache(&YM, &moms, seed).unwrap();
        (inputs, cache)
    }

    #[test]
    fn two_input_tree_is_plain_bracket() {
        let (inputs, cache) = random_odd_inputs(2, 5);
        let t = Tree::Node(Box::new(Tree::Leaf(0)), Box::new(Tree::Leaf(1)));
        let v = eval_tree(&t, &YM, &cache, &inputs).unwrap();
        // plus sign: [x1, x2] with the inline (-1)^{x1} and normalization
        let plain = YM.eval_bracket(&inputs[0], &inputs[1]);
        assert_eq!(v, plain);
    }

    #[test]
    fn embedding_independence() {
        for n in [3usize, 4] {
            let (inputs, cache) = random_odd_inputs(n, 7 + n as u64);
            for t in enumerate_trees(n) {
                let vals: Vec<Element> = planar_embeddings(&t)
                    .iter()
                    .map(|p| eval_tree(p, &YM, &cache, &inputs).unwrap())
                    .collect();
                for v in &vals[1..] {
                    assert_eq!(*v, vals[0], "all embeddings agree, n = {n}");
                }
            }
        }
    }

    #[test]
    fn zero_inputs_give_zero() {
        let (mut inputs, cache) = random_odd_inputs(3, 9);
        inputs[1] = Element {
            degree: 1,
            mom: inputs[1].mom.clone(),
            v: vec![Gq::zero(); YM.dim()],
        };
        for t in enumerate_trees(3) {
            let v = eval_tree(&t, &YM, &cache, &inputs).unwrap();
            assert!(v.is_zero());
        }
    }

    #[test]
    fn dp_sum_matches_tree_by_tree() {
        for n in [3usize, 4] {
            let (inputs, cache) = random_odd_inputs(n, 21 + n as u64);
            let mut total: Option<Element> = None;
            for t in enumerate_trees(n) {
                let v = eval_tree(&t, &YM, &cache, &inputs).unwrap();
                total = Some(match total {
                    None => v,
                    Some(a) => a.add(&v),
                });
            }
            let dp = tree_sum_all(&YM, &cache, &inputs).unwrap();
            assert_eq!(dp, total.unwrap(), "n = {n}");
        }
    }

    /// Output decorated with N d and inputs with projections: the sum over
    /// all trees cancels exactly when internal lines are off shell.
    #[test]
    fn obstruction_sum_vanishes() {
        use crate::linalg::build_contraction;
        for n in [3usize, 4] {
            let seed = 31 + n as u64;
            let tuple = sample_onshell_tuple(n + 1, &"+".repeat(n + 1), seed, None).unwrap();
            let mut rng = ChaCha12Rng::seed_from_u64(seed ^ 0x77);
            // degree pattern mixing odd and even inputs
            let degrees: Vec<i64> = (0..n).map(|i| if i == n - 1 { 2 } else { 1 }).collect();
            let inputs: Vec<Element> = (0..n)
                .map(|i| {
                    let k = tuple.mom(i);
                    let raw = YM.random_element(degrees[i], k.clone(), &mut rng);
                    // project with a seeded contraction at k_i
                    let c =
                        build_contraction(&YM.eval_d(&k), YM.grading(), seed ^ (i as u64))
                            .unwrap();
                    let d = YM.eval_d(&k);
                    let n_amb = YM.dim();
                    let id = ExactMatrix::identity(n_amb);
                    let pi = id.sub(&d.mul(&c.h)).sub(&c.h.mul(&d));
                    Element {
                        degree: raw.degree,
                        mom: raw.mom.clone(),
                        v: pi.apply(&raw.v),
                    }
                })
                .collect();
            let moms: Vec<Mom> = (0..n).map(|i| tuple.mom(i)).collect();
            let cache = build_homotopy_cache(&YM, &moms, seed).unwrap();
            // random momentum-conserving degree -1 operator at the output
            let k_out = moms.iter().fold(Mom::zero(), |a, b| a.add(b));
            let g = YM.grading();
            let mut nmat = ExactMatrix::zeros(YM.dim(), YM.dim());
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
            let d_out = YM.eval_d(&k_out);
            let mut total: Option<Element> = None;
            for t in enumerate_trees(n) {
                let v = eval_tree(&t, &YM, &cache, &inputs).unwrap();
                let decorated = Element {
                    degree: v.degree, // bookkeeping only
                    mom: v.mom.clone(),
                    v: nmat.apply(&d_out.apply(&v.v)),
                };
                total = Some(match total {
                    None => decorated,
                    Some(a) => a.add(&decorated),
                });
            }
            assert!(
                total.unwrap().is_zero(),
                "obstruction cancellation fails at n = {n}"
            );
        }
    }
}
