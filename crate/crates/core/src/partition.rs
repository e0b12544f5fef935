//! Equivalence relations on `0..n`, in canonical least-member form, and
//! plain binary relations for results whose transitivity is in question.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::str::FromStr;

use crate::algebra::ElemId;
use crate::error::{Error, Result};
use crate::union_find::UnionFind;

/// An equivalence relation on `0..n`, stored as `class_id[e]` = least member
/// of the class of `e`. Two partitions are equal iff they are equal as
/// relations.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    class_id: Vec<ElemId>,
}

impl Partition {
    /// The identity relation Δ.
    pub fn identity(n: usize) -> Self {
        Partition {
            class_id: (0..n).collect(),
        }
    }

    /// The full relation ∇.
    pub fn total(n: usize) -> Self {
        Partition {
            class_id: vec![0; n],
        }
    }

    /// Canonicalizes an arbitrary labelling: elements with equal labels share
    /// a class.
    pub fn from_labels<L: Eq + Hash>(labels: &[L]) -> Self {
        let mut first: HashMap<&L, ElemId> = HashMap::with_capacity(labels.len());
        let class_id = labels
            .iter()
            .enumerate()
            .map(|(e, l)| *first.entry(l).or_insert(e))
            .collect();
        Partition { class_id }
    }

    /// Accepts a class-id array that is already in canonical form.
    pub fn from_class_ids(class_id: Vec<ElemId>) -> Result<Self> {
        for (e, &c) in class_id.iter().enumerate() {
            if c > e || class_id[c] != c {
                return Err(Error::InvalidPartition(format!(
                    "class_id[{e}] = {c} is not a canonical representative"
                )));
            }
        }
        Ok(Partition { class_id })
    }

    /// Builds a partition of `0..n` from explicit blocks, which must cover
    /// every element exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<ElemId>]) -> Result<Self> {
        let mut label = vec![usize::MAX; n];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &e in block {
                if e >= n {
                    return Err(Error::ElementOutOfRange {
                        element: e,
                        size: n,
                    });
                }
                if label[e] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {e} appears in more than one block"
                    )));
                }
                label[e] = b;
            }
        }
        if let Some(e) = label.iter().position(|&l| l == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "element {e} is not in any block"
            )));
        }
        Ok(Partition::from_labels(&label))
    }

    /// Builds the partition of a relation given as a predicate, checking that
    /// the predicate really is an equivalence. Quadratic in `n`.
    pub fn from_equivalence_fn(n: usize, related: impl Fn(ElemId, ElemId) -> bool) -> Result<Self> {
        let mut class_id = Vec::with_capacity(n);
        for b in 0..n {
            let rep = (0..=b).find(|&a| related(a, b)).ok_or_else(|| {
                Error::NotAnEquivalence(format!("({b}, {b}) is missing (not reflexive)"))
            })?;
            class_id.push(rep);
        }
        let candidate = Partition { class_id };
        for a in 0..n {
            for b in 0..n {
                if related(a, b) != candidate.related(a, b) {
                    return Err(Error::NotAnEquivalence(equivalence_witness(n, &related)));
                }
            }
        }
        Ok(candidate)
    }

    pub fn size(&self) -> usize {
        self.class_id.len()
    }

    pub fn class_ids(&self) -> &[ElemId] {
        &self.class_id
    }

    /// Least member of the class of `e`.
    pub fn class_of(&self, e: ElemId) -> ElemId {
        self.class_id[e]
    }

    pub fn related(&self, a: ElemId, b: ElemId) -> bool {
        self.class_id[a] == self.class_id[b]
    }

    /// Class representatives in ascending order.
    pub fn representatives(&self) -> impl Iterator<Item = ElemId> + '_ {
        self.class_id
            .iter()
            .enumerate()
            .filter(|&(e, &c)| e == c)
            .map(|(e, _)| e)
    }

    pub fn num_classes(&self) -> usize {
        self.representatives().count()
    }

    /// Blocks sorted by least member, each block sorted.
    pub fn blocks(&self) -> Vec<Vec<ElemId>> {
        let mut index = vec![usize::MAX; self.size()];
        let mut blocks: Vec<Vec<ElemId>> = Vec::new();
        for (e, &c) in self.class_id.iter().enumerate() {
            if c == e {
                index[e] = blocks.len();
                blocks.push(Vec::new());
            }
            blocks[index[c]].push(e);
        }
        blocks
    }

    pub fn is_identity(&self) -> bool {
        self.class_id.iter().enumerate().all(|(e, &c)| e == c)
    }

    pub fn is_total(&self) -> bool {
        self.class_id.iter().all(|&c| c == 0)
    }

    /// `self ⊆ other` as relations.
    pub fn refines(&self, other: &Partition) -> bool {
        self.size() == other.size()
            && self
                .class_id
                .iter()
                .enumerate()
                .all(|(e, &c)| other.related(e, c))
    }

    /// First pair related by `self` but not by `other`.
    pub fn refinement_witness(&self, other: &Partition) -> Option<(ElemId, ElemId)> {
        self.class_id
            .iter()
            .enumerate()
            .find(|&(e, &c)| !other.related(e, c))
            .map(|(e, &c)| (c, e))
    }

    fn check_size(&self, other: &Partition) -> Result<()> {
        if self.size() != other.size() {
            return Err(Error::SizeMismatch {
                expected: self.size(),
                found: other.size(),
            });
        }
        Ok(())
    }

    /// Intersection of the two relations.
    pub fn meet(&self, other: &Partition) -> Result<Partition> {
        self.check_size(other)?;
        let pairs: Vec<(ElemId, ElemId)> = self
            .class_id
            .iter()
            .zip(&other.class_id)
            .map(|(&a, &b)| (a, b))
            .collect();
        Ok(Partition::from_labels(&pairs))
    }

    /// Transitive closure of the union of the two relations.
    pub fn join(&self, other: &Partition) -> Result<Partition> {
        self.check_size(other)?;
        let mut uf = UnionFind::from_partition(self);
        for (e, &c) in other.class_id.iter().enumerate() {
            uf.union(e, c);
        }
        Ok(uf.to_partition())
    }

    /// Pulls the partition back along `image`: `a ~ b` iff `image[a] ~ image[b]`.
    pub fn pullback(&self, image: &[ElemId]) -> Partition {
        let labels: Vec<ElemId> = image.iter().map(|&t| self.class_id[t]).collect();
        Partition::from_labels(&labels)
    }

    pub fn to_relation(&self) -> Relation {
        Relation::from_fn(self.size(), |a, b| self.related(a, b))
    }
}

fn equivalence_witness(n: usize, related: &impl Fn(ElemId, ElemId) -> bool) -> String {
    for a in 0..n {
        if !related(a, a) {
            return format!("({a}, {a}) is missing (not reflexive)");
        }
    }
    for a in 0..n {
        for b in 0..n {
            if related(a, b) && !related(b, a) {
                return format!("({a}, {b}) is present but ({b}, {a}) is not (not symmetric)");
            }
        }
    }
    for a in 0..n {
        for b in 0..n {
            if !related(a, b) {
                continue;
            }
            for c in 0..n {
                if related(b, c) && !related(a, c) {
                    return format!(
                        "({a}, {b}) and ({b}, {c}) are present but ({a}, {c}) is not (not transitive)"
                    );
                }
            }
        }
    }
    "no witness found".into()
}

impl fmt::Display for Partition {
    /// Sorted blocks of sorted elements, e.g. `[[0,1],[2]]`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            f.write_str("[")?;
            for (j, e) in block.iter().enumerate() {
                if j > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{e}")?;
            }
            f.write_str("]")?;
        }
        f.write_str("]")
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the block list form; the carrier is `0..n` where `n` is the
    /// total number of listed elements.
    fn from_str(s: &str) -> Result<Self> {
        let blocks: Vec<Vec<ElemId>> =
            serde_json::from_str(s).map_err(|e| Error::Parse(format!("partition `{s}`: {e}")))?;
        let n = blocks.iter().map(Vec::len).sum();
        Partition::from_blocks(n, &blocks)
    }
}

/// A binary relation on `0..n` stored as a dense bit matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Relation {
    n: usize,
    bits: Vec<bool>,
}

impl Relation {
    pub fn empty(n: usize) -> Self {
        Relation {
            n,
            bits: vec![false; n * n],
        }
    }

    pub fn from_fn(n: usize, f: impl Fn(ElemId, ElemId) -> bool) -> Self {
        let mut bits = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                bits.push(f(a, b));
            }
        }
        Relation { n, bits }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn contains(&self, a: ElemId, b: ElemId) -> bool {
        self.bits[a * self.n + b]
    }

    pub fn insert(&mut self, a: ElemId, b: ElemId) {
        self.bits[a * self.n + b] = true;
    }

    /// Set-theoretic union.
    pub fn union_with(&mut self, other: &Relation) {
        debug_assert_eq!(self.n, other.n);
        for (x, &y) in self.bits.iter_mut().zip(&other.bits) {
            *x |= y;
        }
    }

    /// Set-theoretic intersection.
    pub fn intersect_with(&mut self, other: &Relation) {
        debug_assert_eq!(self.n, other.n);
        for (x, &y) in self.bits.iter_mut().zip(&other.bits) {
            *x &= y;
        }
    }

    pub fn pairs(&self) -> impl Iterator<Item = (ElemId, ElemId)> + '_ {
        let n = self.n;
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(i, _)| (i / n, i % n))
    }

    /// Converts to a partition if the relation is an equivalence; otherwise
    /// reports a reflexivity, symmetry or transitivity witness.
    pub fn to_partition(&self) -> Result<Partition> {
        Partition::from_equivalence_fn(self.n, |a, b| self.contains(a, b))
    }
}
