//! Library results checked against definition-level oracles that share no
//! code with the library's algorithms.

use proptest::prelude::*;
use ultracon_core::algebra::Signature;
use ultracon_core::ultrafilter::{all_families, check_4star, check_axioms, IndexSet};
use ultracon_core::{
    con_lattice, corpus, direct_product, enumerate_ultrafilters, find_isomorphism, is_homomorphism,
    quotient, ultraproduct, Algebra, Congruence, Partition, Ultrafilter,
};

/// Every partition of `0..n` as a vector of block labels.
fn all_labellings(n: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        let mut next = Vec::new();
        for l in &out {
            let fresh = l.iter().max().map_or(0, |m| m + 1);
            for b in 0..=fresh {
                let mut l2 = l.clone();
                l2.push(b);
                next.push(l2);
            }
        }
        out = next;
    }
    out
}

/// Compatibility with every operation on every pair of related tuples.
fn compatible(a: &Algebra, label: &[usize]) -> bool {
    let n = a.size();
    for (op, s) in a.signature().symbols().iter().enumerate() {
        let k = s.arity;
        let tuples = n.pow(k as u32);
        let args = |mut code: usize| {
            let mut v = vec![0; k];
            for j in (0..k).rev() {
                v[j] = code % n;
                code /= n;
            }
            v
        };
        for x in 0..tuples {
            for y in 0..tuples {
                let (ax, ay) = (args(x), args(y));
                if (0..k).all(|j| label[ax[j]] == label[ay[j]])
                    && label[a.table(op)[x]] != label[a.table(op)[y]]
                {
                    return false;
                }
            }
        }
    }
    true
}

fn oracle_congruences(a: &Algebra) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = all_labellings(a.size())
        .into_iter()
        .filter(|l| compatible(a, l))
        .map(|l| Partition::from_labels(&l).blocks())
        .collect();
    out.sort();
    out
}

fn library_congruences(a: &Algebra) -> Vec<Vec<Vec<usize>>> {
    let mut out: Vec<Vec<Vec<usize>>> = con_lattice(a)
        .unwrap()
        .congruences()
        .iter()
        .map(|c| c.blocks())
        .collect();
    out.sort();
    out
}

#[test]
fn corpus_lattices_match_definition() {
    for a in corpus::all().into_iter().filter(|a| a.size() <= 6) {
        assert_eq!(
            library_congruences(&a),
            oracle_congruences(&a),
            "{}",
            a.name()
        );
    }
}

#[test]
fn named_lattice_sizes() {
    for (a, n) in [
        (corpus::c3(), 4),
        (corpus::s2(), 2),
        (corpus::z3(), 2),
        (corpus::c4(), 8),
    ] {
        assert_eq!(oracle_congruences(&a).len(), n, "{}", a.name());
        assert_eq!(con_lattice(&a).unwrap().len(), n);
    }
}

/// Filter axioms straight from their statements over explicit subset lists.
fn oracle_is_ultrafilter(n: usize, family: &[u64]) -> bool {
    let full = (1u64 << n) - 1;
    let has = |s: u64| family.contains(&s);
    has(full)
        && !has(0)
        && family.iter().all(|&a| family.iter().all(|&b| has(a & b)))
        && family
            .iter()
            .all(|&a| (0..=full).filter(|&s| s & a == a).all(has))
        && (0..=full).all(|s| has(s) || has(full & !s))
}

fn oracle_four_star(n: usize, family: &[u64]) -> bool {
    let full = (1u64 << n) - 1;
    let has = |s: u64| family.contains(&s);
    (0..=full).all(|a| (0..=full).all(|b| !has(a | b) || has(a) || has(b)))
}

#[test]
fn ultrafilter_axioms_match_definition() {
    for n in 1..=3 {
        let mut count = 0;
        for fam in all_families(n).unwrap() {
            let bits: Vec<u64> = fam.iter().map(IndexSet::bits).collect();
            let report = check_axioms(n, &fam).unwrap();
            let expected = oracle_is_ultrafilter(n, &bits);
            assert_eq!(report.is_ultrafilter(), expected, "{bits:?}");
            if report.is_filter() {
                assert_eq!(check_4star(n, &fam).unwrap(), oracle_four_star(n, &bits));
                assert_eq!(report.is_ultrafilter(), oracle_four_star(n, &bits));
            }
            count += usize::from(expected);
        }
        assert_eq!(count, n);
    }
}

#[test]
fn enumerated_ultrafilters_are_the_principal_ones() {
    for n in 1..=4 {
        let found = enumerate_ultrafilters(n).unwrap();
        assert_eq!(found.len(), n);
        for (i, d) in found.iter().enumerate() {
            assert_eq!(d.principal_index(), Some(i));
            let members: Vec<u64> = d.members().iter().map(IndexSet::bits).collect();
            let expected: Vec<u64> = (0..1u64 << n).filter(|s| s & (1 << i) != 0).collect();
            let mut sorted = members.clone();
            sorted.sort();
            assert_eq!(sorted, expected);
        }
    }
}

fn arb_algebra(max_size: usize) -> impl Strategy<Value = Algebra> {
    (1..=max_size, 0usize..3).prop_flat_map(|(n, shape)| {
        let arities: Vec<usize> = match shape {
            0 => vec![2],
            1 => vec![1, 1],
            _ => vec![1, 2],
        };
        let tables: Vec<BoxedStrategy<Vec<usize>>> = arities
            .iter()
            .map(|&k| proptest::collection::vec(0..n, n.pow(k as u32)).boxed())
            .collect();
        (Just(n), Just(arities), tables).prop_map(|(n, arities, tables)| {
            let names = ["f", "g"];
            let pairs: Vec<(&str, usize)> = arities
                .iter()
                .enumerate()
                .map(|(i, &k)| (names[i], k))
                .collect();
            let sig = Signature::from_pairs(&pairs).unwrap();
            Algebra::new("R", sig, n, tables).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn random_lattices_match_definition(a in arb_algebra(5)) {
        prop_assert_eq!(library_congruences(&a), oracle_congruences(&a));
    }

    #[test]
    fn projections_are_surjective_homomorphisms(a in arb_algebra(5)) {
        for theta in con_lattice(&a).unwrap().congruences() {
            let q = quotient(&a, theta).unwrap();
            prop_assert!(is_homomorphism(q.projection(), &a, q.algebra()).unwrap());
            prop_assert!(q.projection().is_surjective());
            prop_assert_eq!(&ultracon_core::kernel(q.projection()), theta.partition());
        }
    }

    #[test]
    fn principal_ultraproducts_collapse(a in arb_algebra(3), b in arb_algebra(3), i in 0usize..2) {
        prop_assume!(a.signature() == b.signature());
        let factors = [a, b];
        let up = ultraproduct(&factors, &Ultrafilter::principal(2, i).unwrap()).unwrap();
        prop_assert!(find_isomorphism(up.algebra(), &factors[i]).unwrap().found);
    }

    #[test]
    fn product_coordinates_roundtrip(a in arb_algebra(4), b in arb_algebra(4)) {
        prop_assume!(a.signature() == b.signature());
        let p = direct_product(&[a.clone(), b.clone()]).unwrap();
        for e in 0..p.size() {
            let c = p.decode(e);
            prop_assert_eq!(p.encode(&c), e);
            prop_assert_eq!(e, c[0] * b.size() + c[1]);
        }
    }

    #[test]
    fn ultrapower_restriction_is_join_of_meets(a in arb_algebra(4), pick in proptest::collection::vec(0usize..64, 3), i0 in 0usize..3) {
        let lat = con_lattice(&a).unwrap();
        let sigma: Vec<Congruence> = pick.iter().map(|&k| lat.get(k % lat.len()).clone()).collect();
        let d = Ultrafilter::principal(3, i0).unwrap();
        let r = ultracon_core::restriction(&a, &sigma, &d).unwrap();
        prop_assert_eq!(&r, &ultracon_core::join_of_meets(&a, &sigma, &d).unwrap());
        prop_assert_eq!(&r, &sigma[i0]);
    }
}
