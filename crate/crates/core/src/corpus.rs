//! Small test algebras used by the sweeps, the CLI and the test suites.
//!
//! Algebras come in four similarity types so that products can be formed
//! within each type:
//!
//! * `mul/2`: semilattices, chains, cyclic groups written additively, a
//!   non-commutative groupoid, a left-zero band, the trivial algebra
//! * `meet/2, join/2`: small lattices
//! * `f/1, g/1`: algebras with two unary operations
//! * `mul/2, inv/1, one/0`: groups in full signature

use crate::algebra::{Algebra, ElemId, Signature};

fn binary_sig() -> Signature {
    Signature::from_pairs(&[("mul", 2)]).expect("valid signature")
}

fn lattice_sig() -> Signature {
    Signature::from_pairs(&[("meet", 2), ("join", 2)]).expect("valid signature")
}

fn unary_sig() -> Signature {
    Signature::from_pairs(&[("f", 1), ("g", 1)]).expect("valid signature")
}

fn group_sig() -> Signature {
    Signature::from_pairs(&[("mul", 2), ("inv", 1), ("one", 0)]).expect("valid signature")
}

fn table2(n: usize, f: impl Fn(ElemId, ElemId) -> ElemId) -> Vec<ElemId> {
    (0..n * n).map(|i| f(i / n, i % n)).collect()
}

fn binary(name: &str, n: usize, f: impl Fn(ElemId, ElemId) -> ElemId) -> Algebra {
    Algebra::new(name, binary_sig(), n, vec![table2(n, f)]).expect("corpus algebra")
}

/// One-element algebra.
pub fn t1() -> Algebra {
    binary("T1", 1, |_, _| 0)
}

/// Two-element meet-semilattice (and-table).
pub fn s2() -> Algebra {
    binary("S2", 2, |a, b| a & b)
}

/// `n`-element chain under min.
pub fn chain(n: usize) -> Algebra {
    binary(&format!("C{n}"), n, |a, b| a.min(b))
}

pub fn c3() -> Algebra {
    chain(3)
}

pub fn c4() -> Algebra {
    chain(4)
}

/// Cyclic group of order `n` under addition, binary signature only.
pub fn cyclic(n: usize) -> Algebra {
    binary(&format!("Z{n}"), n, |a, b| (a + b) % n)
}

/// Two-element group as the xor table.
pub fn z2() -> Algebra {
    cyclic(2)
}

pub fn z3() -> Algebra {
    cyclic(3)
}

pub fn z4() -> Algebra {
    cyclic(4)
}

pub fn z6() -> Algebra {
    cyclic(6)
}

/// A non-commutative, non-associative three-element groupoid.
pub fn g3() -> Algebra {
    const T: [ElemId; 9] = [0, 0, 1, 2, 1, 1, 2, 2, 2];
    binary("G3", 3, |a, b| T[3 * a + b])
}

/// Left-zero band: `xy = x`.
pub fn lz2() -> Algebra {
    binary("LZ2", 2, |a, _| a)
}

fn lattice(
    name: &str,
    n: usize,
    meet: impl Fn(usize, usize) -> usize,
    join: impl Fn(usize, usize) -> usize,
) -> Algebra {
    Algebra::new(
        name,
        lattice_sig(),
        n,
        vec![table2(n, meet), table2(n, join)],
    )
    .expect("corpus algebra")
}

pub fn l2() -> Algebra {
    lattice("L2", 2, usize::min, usize::max)
}

pub fn l3() -> Algebra {
    lattice("L3", 3, usize::min, usize::max)
}

/// The four-element Boolean lattice, elements as bit patterns.
pub fn b4() -> Algebra {
    lattice("B4", 4, |a, b| a & b, |a, b| a | b)
}

/// A three-cycle `f` with a constant map `g`.
pub fn u3() -> Algebra {
    Algebra::new("U3", unary_sig(), 3, vec![vec![1, 2, 0], vec![0, 0, 0]]).expect("corpus algebra")
}

/// Two swapped pairs under `f`, collapsed pairwise by `g`.
pub fn u4() -> Algebra {
    Algebra::new(
        "U4",
        unary_sig(),
        4,
        vec![vec![1, 0, 3, 2], vec![0, 0, 2, 2]],
    )
    .expect("corpus algebra")
}

fn group(name: &str, n: usize, mul: impl Fn(usize, usize) -> usize) -> Algebra {
    let table = table2(n, &mul);
    let one = (0..n)
        .find(|&e| (0..n).all(|x| mul(e, x) == x && mul(x, e) == x))
        .expect("group has an identity");
    let inv = (0..n)
        .map(|x| {
            (0..n)
                .find(|&y| mul(x, y) == one)
                .expect("group has inverses")
        })
        .collect();
    Algebra::new(name, group_sig(), n, vec![table, inv, vec![one]]).expect("corpus algebra")
}

pub fn z2g() -> Algebra {
    group("Z2g", 2, |a, b| (a + b) % 2)
}

pub fn z3g() -> Algebra {
    group("Z3g", 3, |a, b| (a + b) % 3)
}

/// Symmetric group on three points; elements are the permutations in
/// lexicographic order, multiplied as `(p·q)(x) = p(q(x))`.
pub fn s3() -> Algebra {
    const PERMS: [[usize; 3]; 6] = [
        [0, 1, 2],
        [0, 2, 1],
        [1, 0, 2],
        [1, 2, 0],
        [2, 0, 1],
        [2, 1, 0],
    ];
    group("S3", 6, |a, b| {
        let composed = [0, 1, 2].map(|x| PERMS[a][PERMS[b][x]]);
        PERMS.iter().position(|p| *p == composed).expect("closed")
    })
}

/// Every corpus algebra, grouped by similarity type.
pub fn all() -> Vec<Algebra> {
    vec![
        t1(),
        s2(),
        c3(),
        c4(),
        z2(),
        z3(),
        z4(),
        z6(),
        g3(),
        lz2(),
        l2(),
        l3(),
        b4(),
        u3(),
        u4(),
        z2g(),
        z3g(),
        s3(),
    ]
}

pub fn by_name(name: &str) -> Option<Algebra> {
    all().into_iter().find(|a| a.name() == name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_are_unique() {
        let names: std::collections::HashSet<_> =
            all().iter().map(|a| a.name().to_string()).collect();
        assert_eq!(names.len(), all().len());
        assert_eq!(by_name("C3"), Some(c3()));
    }

    #[test]
    fn g3_is_not_commutative() {
        let g = g3();
        assert_ne!(
            g.apply("mul", &[0, 2]).unwrap(),
            g.apply("mul", &[2, 0]).unwrap()
        );
    }

    #[test]
    fn s3_is_a_nonabelian_group() {
        let g = s3();
        let one = g.apply("one", &[]).unwrap();
        assert_eq!(one, 0);
        for x in 0..6 {
            let inv = g.apply("inv", &[x]).unwrap();
            assert_eq!(g.apply("mul", &[x, inv]).unwrap(), one);
        }
        assert_ne!(
            g.apply("mul", &[1, 2]).unwrap(),
            g.apply("mul", &[2, 1]).unwrap()
        );
    }
}
