//! Congruence testing, principal congruence generation and congruence
//! lattices.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::{self, Write as _};
use std::ops::Deref;

use crate::algebra::{Algebra, ElemId, Limits, Signature};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::radix::for_each_tuple;
use crate::union_find::UnionFind;

/// A partition known to have the substitution property for some algebra.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Congruence(Partition);

impl Congruence {
    /// Validates `p` against `a`.
    pub fn new(a: &Algebra, p: Partition) -> Result<Self> {
        match congruence_violation(a, &p)? {
            Some(err) => Err(err),
            None => Ok(Congruence(p)),
        }
    }

    pub fn identity(a: &Algebra) -> Self {
        Congruence(Partition::identity(a.size()))
    }

    pub fn total(a: &Algebra) -> Self {
        Congruence(Partition::total(a.size()))
    }

    pub fn partition(&self) -> &Partition {
        &self.0
    }

    pub fn into_partition(self) -> Partition {
        self.0
    }

    /// Meet of two congruences of the same algebra.
    pub fn meet(&self, other: &Congruence) -> Result<Congruence> {
        Ok(Congruence(self.0.meet(&other.0)?))
    }

    /// Join of two congruences of the same algebra.
    pub fn join(&self, other: &Congruence) -> Result<Congruence> {
        Ok(Congruence(self.0.join(&other.0)?))
    }
}

impl Deref for Congruence {
    type Target = Partition;

    fn deref(&self) -> &Partition {
        &self.0
    }
}

impl fmt::Display for Congruence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Calls `f(op, before, after)` where `before`/`after` are the argument
/// tuples obtained by placing `x` resp. `y` at each position of every
/// context tuple. Stops when `f` returns `false`.
fn for_each_translate(
    a: &Algebra,
    x: ElemId,
    y: ElemId,
    mut f: impl FnMut(usize, ElemId, ElemId) -> bool,
) -> bool {
    for (op, symbol) in a.signature().symbols().iter().enumerate() {
        let k = symbol.arity;
        if k == 0 {
            continue;
        }
        let mut args = vec![0; k];
        for pos in 0..k {
            let mut go = true;
            for_each_tuple(a.size(), k - 1, |ctx| {
                if !go {
                    return;
                }
                args[..pos].copy_from_slice(&ctx[..pos]);
                args[pos + 1..].copy_from_slice(&ctx[pos..]);
                args[pos] = x;
                let fx = a.apply_op(op, &args);
                args[pos] = y;
                let fy = a.apply_op(op, &args);
                go = f(op, fx, fy);
            });
            if !go {
                return false;
            }
        }
    }
    true
}

/// Describes the first substitution failure of `p`, if any. Only pairs
/// `(rep, e)` are tested and one argument position is varied at a time; the
/// full property follows by transitivity.
pub fn congruence_violation(a: &Algebra, p: &Partition) -> Result<Option<Error>> {
    if p.size() != a.size() {
        return Err(Error::SizeMismatch {
            expected: a.size(),
            found: p.size(),
        });
    }
    for e in 0..a.size() {
        let rep = p.class_of(e);
        if rep == e {
            continue;
        }
        let mut found = None;
        for_each_translate(a, rep, e, |op, fx, fy| {
            if p.related(fx, fy) {
                true
            } else {
                found = Some((op, fx, fy));
                false
            }
        });
        if let Some((op, fx, fy)) = found {
            return Ok(Some(Error::NotACongruence {
                partition: p.to_string(),
                symbol: a.signature().symbols()[op].name.clone(),
                left: rep,
                right: e,
                image_left: fx,
                image_right: fy,
            }));
        }
    }
    Ok(None)
}

pub fn is_congruence(a: &Algebra, p: &Partition) -> Result<bool> {
    Ok(congruence_violation(a, p)?.is_none())
}

pub fn meet(p: &Partition, q: &Partition) -> Result<Partition> {
    p.meet(q)
}

pub fn join(p: &Partition, q: &Partition) -> Result<Partition> {
    p.join(q)
}

/// Least congruence containing the given pairs, by union-find closure:
/// every merge of `(x, y)` schedules the merge of all one-position
/// translates `f(…,x,…)`, `f(…,y,…)`.
pub fn congruence_generated_by(a: &Algebra, pairs: &[(ElemId, ElemId)]) -> Result<Congruence> {
    let n = a.size();
    if let Some(&element) = pairs.iter().flat_map(|(x, y)| [x, y]).find(|&&e| e >= n) {
        return Err(Error::ElementOutOfRange { element, size: n });
    }
    let mut uf = UnionFind::new(n);
    let mut queue: Vec<(ElemId, ElemId)> = pairs.to_vec();
    while let Some((x, y)) = queue.pop() {
        if !uf.union(x, y) {
            continue;
        }
        for_each_translate(a, x, y, |_, fx, fy| {
            if fx != fy {
                queue.push((fx, fy));
            }
            true
        });
    }
    Ok(Congruence(uf.to_partition()))
}

/// Cg(x, y).
pub fn principal_congruence(a: &Algebra, x: ElemId, y: ElemId) -> Result<Congruence> {
    congruence_generated_by(a, &[(x, y)])
}

/// All congruences of an algebra in canonical order: descending number of
/// classes (Δ first, ∇ last), ties broken by the class-id arrays.
#[derive(Debug, Clone)]
pub struct ConLattice {
    algebra: Algebra,
    congruences: Vec<Congruence>,
    index: HashMap<Partition, usize>,
}

impl ConLattice {
    fn from_unsorted(algebra: &Algebra, mut congruences: Vec<Congruence>) -> Self {
        congruences.sort_by(|p, q| {
            q.num_classes()
                .cmp(&p.num_classes())
                .then_with(|| p.class_ids().cmp(q.class_ids()))
        });
        congruences.dedup();
        let index = congruences
            .iter()
            .enumerate()
            .map(|(i, c)| (c.partition().clone(), i))
            .collect();
        ConLattice {
            algebra: algebra.clone(),
            congruences,
            index,
        }
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn congruences(&self) -> &[Congruence] {
        &self.congruences
    }

    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.congruences.is_empty()
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn index_of(&self, p: &Partition) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// Index of Δ.
    pub fn bottom(&self) -> usize {
        0
    }

    /// Index of ∇.
    pub fn top(&self) -> usize {
        self.len() - 1
    }

    pub fn meet_index(&self, i: usize, j: usize) -> usize {
        let m = self.congruences[i]
            .meet(&self.congruences[j])
            .expect("same carrier");
        self.index[m.partition()]
    }

    pub fn join_index(&self, i: usize, j: usize) -> usize {
        let m = self.congruences[i]
            .join(&self.congruences[j])
            .expect("same carrier");
        self.index[m.partition()]
    }

    /// Covering pairs `(lower, upper)` of the refinement order.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let below =
            |i: usize, j: usize| i != j && self.congruences[i].refines(&self.congruences[j]);
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if below(i, j) && !(0..self.len()).any(|k| below(i, k) && below(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Hasse diagram in Graphviz DOT, bottom to top.
    pub fn to_dot(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "digraph \"Con({})\" {{", self.algebra.name());
        let _ = writeln!(s, "  rankdir=BT;");
        let _ = writeln!(s, "  node [shape=box];");
        for (i, c) in self.congruences.iter().enumerate() {
            let _ = writeln!(s, "  n{i} [label=\"{c}\"];");
        }
        for (lo, hi) in self.covers() {
            let _ = writeln!(s, "  n{lo} -> n{hi} [arrowhead=none];");
        }
        s.push_str("}\n");
        s
    }
}

/// Con(A) as the join-closure of Δ and all principal congruences.
pub fn con_lattice(a: &Algebra) -> Result<ConLattice> {
    con_lattice_with(a, &Limits::default())
}

pub fn con_lattice_with(a: &Algebra, limits: &Limits) -> Result<ConLattice> {
    if a.size() > limits.max_carrier {
        return Err(Error::SizeGuard {
            what: "congruence lattice carrier",
            size: a.size(),
            limit: limits.max_carrier,
        });
    }
    let n = a.size();
    let mut principals: Vec<Partition> = Vec::new();
    for x in 0..n {
        for y in x + 1..n {
            principals.push(principal_congruence(a, x, y)?.into_partition());
        }
    }
    principals.sort();
    principals.dedup();

    let mut seen: HashSet<Partition> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut visit = |p: Partition, queue: &mut VecDeque<Partition>| {
        if seen.contains(&p) {
            return Ok(());
        }
        if seen.len() >= limits.max_congruences {
            return Err(Error::SizeGuard {
                what: "congruence lattice",
                size: seen.len() + 1,
                limit: limits.max_congruences,
            });
        }
        seen.insert(p.clone());
        queue.push_back(p);
        Ok(())
    };
    visit(Partition::identity(n), &mut queue)?;
    for p in &principals {
        visit(p.clone(), &mut queue)?;
    }
    while let Some(x) = queue.pop_front() {
        for p in &principals {
            visit(x.join(p)?, &mut queue)?;
        }
    }
    let congruences = seen.into_iter().map(Congruence).collect();
    Ok(ConLattice::from_unsorted(a, congruences))
}

/// Largest carrier accepted by [`con_lattice_bruteforce`]; Bell(8) = 4140.
pub const BRUTEFORCE_MAX: usize = 8;

/// Calls `f` on every partition of `0..n`, via restricted growth strings.
pub fn for_each_partition(n: usize, mut f: impl FnMut(Partition)) {
    if n == 0 {
        f(Partition::identity(0));
        return;
    }
    // rgs[i] <= 1 + max(rgs[..i]); rgs[0] = 0
    let mut rgs = vec![0usize; n];
    let mut maxes = vec![0usize; n];
    loop {
        f(Partition::from_labels(&rgs));
        let mut i = n - 1;
        loop {
            if i == 0 {
                return;
            }
            if rgs[i] <= maxes[i - 1] {
                rgs[i] += 1;
                maxes[i] = maxes[i - 1].max(rgs[i]);
                for j in i + 1..n {
                    rgs[j] = 0;
                    maxes[j] = maxes[i];
                }
                break;
            }
            i -= 1;
        }
    }
}

/// Con(A) by filtering every partition of the carrier.
pub fn con_lattice_bruteforce(a: &Algebra) -> Result<ConLattice> {
    if a.size() > BRUTEFORCE_MAX {
        return Err(Error::EnumerationBound {
            what: "brute-force congruence enumeration",
            found: a.size(),
            max: BRUTEFORCE_MAX,
        });
    }
    let mut found = Vec::new();
    let mut err = None;
    for_each_partition(a.size(), |p| match is_congruence(a, &p) {
        Ok(true) => found.push(Congruence(p)),
        Ok(false) => {}
        Err(e) => err = Some(e),
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(ConLattice::from_unsorted(a, found))
}

/// Con(A) packaged as a meet-semilattice with one binary symbol `meet` whose
/// carrier is the lattice's index order.
pub fn con_as_algebra(lattice: &ConLattice) -> Algebra {
    let m = lattice.len();
    let table = (0..m * m)
        .map(|t| lattice.meet_index(t / m, t % m))
        .collect();
    Algebra::new(
        format!("Con({})", lattice.algebra().name()),
        Signature::from_pairs(&[("meet", 2)]).expect("valid signature"),
        m,
        vec![table],
    )
    .expect("meet table stays inside the lattice")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn p(s: &str) -> Partition {
        s.parse().unwrap()
    }

    fn strings(l: &ConLattice) -> Vec<String> {
        l.congruences().iter().map(ToString::to_string).collect()
    }

    #[test]
    fn is_congruence_examples() {
        let c3 = corpus::c3();
        assert!(is_congruence(&c3, &p("[[0],[1,2]]")).unwrap());
        assert!(!is_congruence(&c3, &p("[[0,2],[1]]")).unwrap());
        for a in corpus::all() {
            assert!(is_congruence(&a, &Partition::identity(a.size())).unwrap());
            assert!(is_congruence(&a, &Partition::total(a.size())).unwrap());
        }
        assert!(is_congruence(&c3, &Partition::identity(2)).is_err());
    }

    #[test]
    fn violation_names_the_witness() {
        let err = Congruence::new(&corpus::c3(), p("[[0,2],[1]]")).unwrap_err();
        let Error::NotACongruence {
            left,
            right,
            image_left,
            image_right,
            ..
        } = err
        else {
            panic!("{err}");
        };
        assert_eq!((left, right), (0, 2));
        assert!(!p("[[0,2],[1]]").related(image_left, image_right));
    }

    #[test]
    fn principal_examples() {
        let c3 = corpus::c3();
        assert_eq!(
            principal_congruence(&c3, 0, 1).unwrap().to_string(),
            "[[0,1],[2]]"
        );
        assert_eq!(
            principal_congruence(&c3, 0, 2).unwrap().to_string(),
            "[[0,1,2]]"
        );
        assert!(principal_congruence(&c3, 1, 1).unwrap().is_identity());
        assert!(principal_congruence(&c3, 0, 3).is_err());
    }

    #[test]
    fn lattice_examples() {
        assert_eq!(con_lattice(&corpus::s2()).unwrap().len(), 2);
        assert_eq!(
            strings(&con_lattice(&corpus::c3()).unwrap()),
            ["[[0],[1],[2]]", "[[0,1],[2]]", "[[0],[1,2]]", "[[0,1,2]]"]
        );
        assert_eq!(con_lattice(&corpus::z3()).unwrap().len(), 2);
        assert_eq!(con_lattice(&corpus::t1()).unwrap().len(), 1);
    }

    #[test]
    fn bruteforce_examples() {
        assert_eq!(
            strings(&con_lattice_bruteforce(&corpus::c3()).unwrap()),
            strings(&con_lattice(&corpus::c3()).unwrap())
        );
        assert_eq!(con_lattice_bruteforce(&corpus::t1()).unwrap().len(), 1);
        assert_eq!(con_lattice_bruteforce(&corpus::s2()).unwrap().len(), 2);
        assert!(matches!(
            con_lattice_bruteforce(&corpus::chain(9)),
            Err(Error::EnumerationBound { found: 9, .. })
        ));
    }

    #[test]
    fn partition_enumeration_counts_bell_numbers() {
        let bell = [1, 1, 2, 5, 15, 52, 203, 877, 4140];
        for (n, &b) in bell.iter().enumerate() {
            let mut count = 0;
            let mut all = std::collections::HashSet::new();
            for_each_partition(n, |q| {
                count += 1;
                all.insert(q);
            });
            assert_eq!(count, b, "Bell({n})");
            assert_eq!(all.len(), b);
        }
    }

    #[test]
    fn lattice_matches_bruteforce_on_corpus() {
        for a in corpus::all() {
            let fast = con_lattice(&a).unwrap();
            let slow = con_lattice_bruteforce(&a).unwrap();
            assert_eq!(strings(&fast), strings(&slow), "{}", a.name());
            assert_eq!(
                fast.get(fast.bottom()).partition(),
                &Partition::identity(a.size())
            );
            assert_eq!(
                fast.get(fast.top()).partition(),
                &Partition::total(a.size())
            );
        }
    }

    #[test]
    fn lattice_is_closed_and_principals_are_least() {
        for a in corpus::all() {
            let l = con_lattice(&a).unwrap();
            for x in l.congruences() {
                for y in l.congruences() {
                    assert!(is_congruence(&a, &x.meet(y).unwrap()).unwrap());
                    assert!(is_congruence(&a, &x.join(y).unwrap()).unwrap());
                }
            }
            for u in 0..a.size() {
                for v in 0..a.size() {
                    let cg = principal_congruence(&a, u, v).unwrap();
                    assert!(cg.related(u, v));
                    for c in l.congruences().iter().filter(|c| c.related(u, v)) {
                        assert!(cg.refines(c), "Cg({u},{v}) of {} not below {c}", a.name());
                    }
                }
            }
        }
    }

    #[test]
    fn con_as_algebra_is_a_semilattice() {
        let c3 = con_as_algebra(&con_lattice(&corpus::c3()).unwrap());
        assert_eq!(c3.size(), 4);
        // Δ=0, {01|2}=1, {0|12}=2, ∇=3
        assert_eq!(
            c3.table(0),
            &[0, 0, 0, 0, 0, 1, 0, 1, 0, 0, 2, 2, 0, 1, 2, 3]
        );
        let s2 = con_as_algebra(&con_lattice(&corpus::s2()).unwrap());
        assert_eq!(s2.table(0), corpus::s2().table(0));
        for a in corpus::all() {
            let m = con_as_algebra(&con_lattice(&a).unwrap());
            let n = m.size();
            for x in 0..n {
                assert_eq!(m.apply_op(0, &[x, x]), x);
                for y in 0..n {
                    assert_eq!(m.apply_op(0, &[x, y]), m.apply_op(0, &[y, x]));
                    for z in 0..n {
                        let l = m.apply_op(0, &[m.apply_op(0, &[x, y]), z]);
                        let r = m.apply_op(0, &[x, m.apply_op(0, &[y, z])]);
                        assert_eq!(l, r);
                    }
                }
            }
        }
    }

    #[test]
    fn dot_lists_covers() {
        let l = con_lattice(&corpus::c3()).unwrap();
        assert_eq!(l.covers(), vec![(0, 1), (0, 2), (1, 3), (2, 3)]);
        let dot = l.to_dot();
        assert!(dot.starts_with("digraph \"Con(C3)\""));
        assert!(dot.contains("n1 [label=\"[[0,1],[2]]\"];"));
        assert!(dot.contains("n0 -> n2"));
    }

    #[test]
    fn size_guard() {
        let limits = Limits {
            max_carrier: 2,
            ..Limits::default()
        };
        assert!(matches!(
            con_lattice_with(&corpus::c3(), &limits),
            Err(Error::SizeGuard { .. })
        ));
        let limits = Limits {
            max_congruences: 3,
            ..Limits::default()
        };
        assert!(matches!(
            con_lattice_with(&corpus::c3(), &limits),
            Err(Error::SizeGuard { .. })
        ));
    }
}
