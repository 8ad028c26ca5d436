//! Groups with exact element arithmetic, commutator calculus, and finite-group analysis.
//!
//! Conventions: `g^f = f^-1 g f`, `[g, f] = g^-1 f^-1 g f`, and
//! `[g, f; k+1] = [[g, f; k], f]`. Products are written left to right.

mod effective;
pub mod finite;
mod matrix;
mod perm;
pub mod spec;
pub mod word;

use std::fmt::Debug;

use crate::error::{Error, Result};

pub use effective::{Backend, EffectiveGroup, GroupElement};
pub use finite::{
    abelianization, canonical_words, commutator_decomposition_oracle, derived_length, derived_length_of,
    derived_series, finite_index_subgroup_data, subgroup_closure, AbelianizationData, CommutatorDecomposition,
    FiniteGroup, GeneratorDescriptor, GeneratorRole, DEFAULT_CLOSURE_BOUND, MAX_DECOMPOSITION_LENGTH,
};
pub use matrix::IntMatrix;
pub use perm::Permutation;
pub use spec::GroupSpec;
pub use word::{check_relations, eval_word, first_failing_relator, Presentation, Word};

/// A group whose elements can be multiplied, inverted and compared exactly
/// (or, for lazily represented elements, on a documented window).
pub trait Group: Send + Sync {
    type Elem: Clone + Debug + Send + Sync;

    fn identity(&self) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Self::Elem;
    fn elem_eq(&self, a: &Self::Elem, b: &Self::Elem) -> bool;

    fn is_identity(&self, a: &Self::Elem) -> bool {
        self.elem_eq(a, &self.identity())
    }

    fn pow(&self, a: &Self::Elem, n: i64) -> Self::Elem {
        pow_by_squaring(self, a, n)
    }

    /// Human-readable rendering used in dumps and certificates.
    fn render(&self, a: &Self::Elem) -> String {
        format!("{a:?}")
    }
}

/// `a^n` by square-and-multiply.
pub fn pow_by_squaring<G: Group + ?Sized>(group: &G, a: &G::Elem, n: i64) -> G::Elem {
    let base = if n < 0 { group.inv(a) } else { a.clone() };
    let mut e = n.unsigned_abs();
    let mut acc = group.identity();
    let mut sq = base;
    while e > 0 {
        if e & 1 == 1 {
            acc = group.mul(&acc, &sq);
        }
        e >>= 1;
        if e > 0 {
            sq = group.mul(&sq, &sq);
        }
    }
    acc
}

/// `f^-1 g f`.
pub fn conjugate<G: Group + ?Sized>(group: &G, g: &G::Elem, f: &G::Elem) -> G::Elem {
    group.mul(&group.mul(&group.inv(f), g), f)
}

/// `g^-1 f^-1 g f`.
pub fn commutator<G: Group + ?Sized>(group: &G, g: &G::Elem, f: &G::Elem) -> G::Elem {
    group.mul(&group.inv(g), &conjugate(group, g, f))
}

/// `[g, f; k]`, left-normed. `k = 0` is rejected.
pub fn iterated_commutator<G: Group + ?Sized>(group: &G, g: &G::Elem, f: &G::Elem, k: usize) -> Result<G::Elem> {
    if k == 0 {
        return Err(Error::ZeroCommutatorLength);
    }
    let mut acc = commutator(group, g, f);
    for _ in 1..k {
        acc = commutator(group, &acc, f);
    }
    Ok(acc)
}

/// Least `k >= 1` with `g^k = 1`, searching up to `bound`.
pub fn order_by_powers<G: Group + ?Sized>(group: &G, g: &G::Elem, bound: u64) -> Result<u64> {
    let mut acc = g.clone();
    for k in 1..=bound {
        if group.is_identity(&acc) {
            return Ok(k);
        }
        acc = group.mul(&acc, g);
    }
    Err(Error::OrderUndetected { bound })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s3() -> EffectiveGroup {
        EffectiveGroup::permutation("S3", 3, &["(1 2)", "(1 2 3)"]).unwrap()
    }

    #[test]
    fn commutator_basics() {
        let g = s3();
        let a = g.generators()[0].clone();
        let b = g.generators()[1].clone();
        assert!(g.is_identity(&commutator(&g, &a, &a)));
        assert_eq!(conjugate(&g, &a, &g.identity()), a);
        assert!(g.is_identity(&conjugate(&g, &g.identity(), &b)));
        assert!(matches!(
            iterated_commutator(&g, &a, &b, 0),
            Err(Error::ZeroCommutatorLength)
        ));
        for k in 1..5 {
            assert!(g.is_identity(&iterated_commutator(&g, &g.identity(), &b, k).unwrap()));
        }
    }

    #[test]
    fn s3_iterated_commutator_by_hand() {
        // a = (1 2), b = (1 2 3), b^-1 = (1 3 2), composing left to right.
        // [a, b] = a b^-1 a b sends 1->2->1->2->3, 2->1->3->3->1, 3->3->2->1->2,
        // so [a, b] = (1 3 2) = b^-1. It commutes with b, hence [a, b; 2] = 1.
        let g = s3();
        let a = g.parse_element("(1 2)").unwrap();
        let b = g.parse_element("(1 2 3)").unwrap();
        let c1 = iterated_commutator(&g, &a, &b, 1).unwrap();
        assert_eq!(g.render(&c1), "(1 3 2)");
        let c2 = iterated_commutator(&g, &a, &b, 2).unwrap();
        assert!(g.is_identity(&c2));
        // Unrolled definition.
        let step = commutator(&g, &c1, &b);
        assert_eq!(c2, step);
    }

    #[test]
    fn pow_matches_repeated_product() {
        let g = s3();
        let b = g.generators()[1].clone();
        let mut acc = g.identity();
        for k in 0..7 {
            assert_eq!(g.pow(&b, k), acc);
            acc = g.mul(&acc, &b);
        }
        assert_eq!(g.pow(&b, -1), g.inv(&b));
    }
}
