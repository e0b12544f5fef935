//! Isomorphism search between finite algebras of the same signature.
//!
//! Plain backtracking over partial bijections. Elements are first split by an
//! isomorphism-invariant fingerprint; a candidate image must share the
//! fingerprint, and every operation tuple whose arguments are all assigned is
//! checked as soon as its last argument is placed.

use crate::algebra::{homomorphism_violation, Algebra, ElemId, ElemMap, Limits};
use crate::error::{Error, Result};
use crate::radix::for_each_tuple;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IsoResult {
    pub found: bool,
    /// A bijective homomorphism whose inverse is also a homomorphism.
    pub witness: Option<ElemMap>,
}

impl IsoResult {
    fn none() -> Self {
        IsoResult {
            found: false,
            witness: None,
        }
    }
}

/// Per-element invariants preserved by every isomorphism.
fn fingerprints(a: &Algebra) -> Vec<Vec<usize>> {
    let n = a.size();
    let mut prints = vec![Vec::new(); n];
    for (op, symbol) in a.signature().symbols().iter().enumerate() {
        let k = symbol.arity;
        let table = a.table(op);
        let mut hits = vec![0usize; n];
        for &v in table {
            hits[v] += 1;
        }
        for e in 0..n {
            let fp = &mut prints[e];
            fp.push(hits[e]);
            if k == 0 {
                continue;
            }
            fp.push(usize::from(a.apply_op(op, &vec![e; k]) == e));
            match k {
                1 => {
                    // tail length and cycle length of e under iteration
                    let mut seen = vec![usize::MAX; n];
                    let (mut x, mut step) = (e, 0);
                    while seen[x] == usize::MAX {
                        seen[x] = step;
                        x = table[x];
                        step += 1;
                    }
                    fp.push(seen[x]);
                    fp.push(step - seen[x]);
                }
                2 => {
                    let row: Vec<ElemId> = (0..n).map(|y| a.apply_op(op, &[e, y])).collect();
                    let col: Vec<ElemId> = (0..n).map(|y| a.apply_op(op, &[y, e])).collect();
                    fp.push(distinct(&row));
                    fp.push(distinct(&col));
                    fp.push(row.iter().filter(|&&v| v == e).count());
                    fp.push(col.iter().filter(|&&v| v == e).count());
                }
                _ => {}
            }
        }
    }
    prints
}

fn distinct(values: &[ElemId]) -> usize {
    let mut v = values.to_vec();
    v.sort_unstable();
    v.dedup();
    v.len()
}

struct Search<'a> {
    a: &'a Algebra,
    b: &'a Algebra,
    fp_a: Vec<Vec<usize>>,
    fp_b: Vec<Vec<usize>>,
    order: Vec<ElemId>,
    forward: Vec<Option<ElemId>>,
    backward: Vec<Option<ElemId>>,
}

impl Search<'_> {
    /// Checks every operation tuple over assigned elements that uses `x`.
    fn consistent(&self, x: ElemId, assigned: &[ElemId]) -> bool {
        for (op, symbol) in self.a.signature().symbols().iter().enumerate() {
            let k = symbol.arity;
            if k == 0 {
                let ca = self.a.apply_op(op, &[]);
                let cb = self.b.apply_op(op, &[]);
                if ca == x && self.forward[x] != Some(cb) {
                    return false;
                }
                continue;
            }
            let mut ok = true;
            let mut args = vec![0; k];
            let mut mapped = vec![0; k];
            for_each_tuple(assigned.len(), k, |idx| {
                if !ok {
                    return;
                }
                for j in 0..k {
                    args[j] = assigned[idx[j]];
                }
                if !args.contains(&x) {
                    return;
                }
                for j in 0..k {
                    mapped[j] = self.forward[args[j]].expect("assigned");
                }
                let ra = self.a.apply_op(op, &args);
                let rb = self.b.apply_op(op, &mapped);
                ok = match (self.forward[ra], self.backward[rb]) {
                    (Some(img), _) => img == rb,
                    (None, Some(_)) => false,
                    (None, None) => self.fp_a[ra] == self.fp_b[rb],
                };
            });
            if !ok {
                return false;
            }
        }
        true
    }

    fn extend(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            return true;
        }
        let x = self.order[depth];
        let assigned: Vec<ElemId> = self.order[..=depth].to_vec();
        for y in 0..self.b.size() {
            if self.backward[y].is_some() || self.fp_a[x] != self.fp_b[y] {
                continue;
            }
            self.forward[x] = Some(y);
            self.backward[y] = Some(x);
            if self.consistent(x, &assigned) && self.extend(depth + 1) {
                return true;
            }
            self.forward[x] = None;
            self.backward[y] = None;
        }
        false
    }
}

pub fn find_isomorphism(a: &Algebra, b: &Algebra) -> Result<IsoResult> {
    find_isomorphism_with(a, b, Limits::default().max_iso)
}

pub fn find_isomorphism_with(a: &Algebra, b: &Algebra, max_size: usize) -> Result<IsoResult> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch);
    }
    let largest = a.size().max(b.size());
    if largest > max_size {
        return Err(Error::SizeGuard {
            what: "isomorphism search carrier",
            size: largest,
            limit: max_size,
        });
    }
    if a.size() != b.size() {
        return Ok(IsoResult::none());
    }
    let fp_a = fingerprints(a);
    let fp_b = fingerprints(b);
    let mut sorted_a = fp_a.clone();
    let mut sorted_b = fp_b.clone();
    sorted_a.sort();
    sorted_b.sort();
    if sorted_a != sorted_b {
        return Ok(IsoResult::none());
    }
    let class_size = |fp: &Vec<usize>| sorted_a.iter().filter(|&g| g == fp).count();
    let mut order: Vec<ElemId> = (0..a.size()).collect();
    order.sort_by_key(|&e| (class_size(&fp_a[e]), e));

    let mut search = Search {
        a,
        b,
        fp_a,
        fp_b,
        order,
        forward: vec![None; a.size()],
        backward: vec![None; b.size()],
    };
    if !search.extend(0) {
        return Ok(IsoResult::none());
    }
    let image: Vec<ElemId> = search
        .forward
        .into_iter()
        .map(|y| y.expect("complete"))
        .collect();
    let witness = ElemMap::new(a.size(), b.size(), image)?;
    let inverse = witness.inverse().ok_or(Error::InvalidWitness)?;
    if homomorphism_violation(&witness, a, b)?.is_some()
        || homomorphism_violation(&inverse, b, a)?.is_some()
    {
        return Err(Error::InvalidWitness);
    }
    Ok(IsoResult {
        found: true,
        witness: Some(witness),
    })
}
