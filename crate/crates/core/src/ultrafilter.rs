//! Subsets of a finite index set and ultrafilters over it.
//!
//! A family 𝒟 of subsets of `I` is an ultrafilter when
//!
//! 1. `I ∈ 𝒟` and `∅ ∉ 𝒟`,
//! 2. 𝒟 is closed under pairwise intersection,
//! 3. 𝒟 is closed upward under `⊆`,
//! 4. for every `S ⊆ I`, `S ∈ 𝒟` or `I∖S ∈ 𝒟`.
//!
//! Over a finite `I` every ultrafilter is principal, so the constructors here
//! only ever produce principal ones; explicit families are accepted and
//! validated against the axioms.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest index set an [`Ultrafilter`] may live on; membership is kept as a
/// table over all `2^|I|` subsets.
pub const MAX_UNIVERSE: usize = 16;

/// Largest `|I|` for which [`enumerate_ultrafilters`] scans all `2^(2^n)`
/// families.
pub const ENUMERATION_MAX: usize = 4;

/// A subset of `{0, …, universe−1}` as a bitmask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct IndexSet {
    universe: usize,
    bits: u64,
}

impl IndexSet {
    fn check_universe(universe: usize) -> Result<()> {
        if universe == 0 || universe > 64 {
            return Err(Error::UniverseSize {
                found: universe,
                max: 64,
            });
        }
        Ok(())
    }

    fn mask(universe: usize) -> u64 {
        if universe == 64 {
            u64::MAX
        } else {
            (1u64 << universe) - 1
        }
    }

    pub fn from_bits(universe: usize, bits: u64) -> Result<Self> {
        Self::check_universe(universe)?;
        if bits & !Self::mask(universe) != 0 {
            return Err(Error::IndexOutOfRange {
                index: 63 - (bits & !Self::mask(universe)).leading_zeros() as usize,
                universe,
            });
        }
        Ok(IndexSet { universe, bits })
    }

    pub fn from_elements(universe: usize, elements: &[usize]) -> Result<Self> {
        Self::check_universe(universe)?;
        let mut bits = 0;
        for &i in elements {
            if i >= universe {
                return Err(Error::IndexOutOfRange { index: i, universe });
            }
            bits |= 1 << i;
        }
        Ok(IndexSet { universe, bits })
    }

    pub fn empty(universe: usize) -> Self {
        IndexSet { universe, bits: 0 }
    }

    pub fn full(universe: usize) -> Self {
        IndexSet {
            universe,
            bits: Self::mask(universe),
        }
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn contains(&self, i: usize) -> bool {
        i < self.universe && self.bits >> i & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.bits.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.bits == 0
    }

    pub fn complement(&self) -> Self {
        IndexSet {
            universe: self.universe,
            bits: !self.bits & Self::mask(self.universe),
        }
    }

    pub fn intersection(&self, other: &IndexSet) -> Self {
        IndexSet {
            universe: self.universe,
            bits: self.bits & other.bits,
        }
    }

    pub fn union(&self, other: &IndexSet) -> Self {
        IndexSet {
            universe: self.universe,
            bits: self.bits | other.bits,
        }
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.bits & !other.bits == 0
    }

    pub fn elements(&self) -> Vec<usize> {
        (0..self.universe).filter(|&i| self.contains(i)).collect()
    }
}

impl Ord for IndexSet {
    /// By size, then by bitmask.
    fn cmp(&self, other: &Self) -> Ordering {
        (self.universe, self.bits.count_ones(), self.bits).cmp(&(
            other.universe,
            other.bits.count_ones(),
            other.bits,
        ))
    }
}

impl PartialOrd for IndexSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (k, i) in self.elements().into_iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{i}")?;
        }
        f.write_str("}")
    }
}

/// The first violation found for one axiom, with a witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    /// A listed set is not a subset of the index set.
    ForeignMember { member: String },
    /// Axiom (1): `I ∉ 𝒟`.
    MissingUniverse,
    /// Axiom (1): `∅ ∈ 𝒟`.
    ContainsEmpty,
    /// Axiom (2): `A, B ∈ 𝒟` but `A ∩ B ∉ 𝒟`.
    NotIntersectionClosed { a: IndexSet, b: IndexSet },
    /// Axiom (3): `A ∈ 𝒟`, `A ⊆ C` but `C ∉ 𝒟`.
    NotUpwardClosed {
        member: IndexSet,
        superset: IndexSet,
    },
    /// Axiom (4): neither `S` nor `I∖S` is in 𝒟.
    Undecided { set: IndexSet },
    /// (4*): `A ∪ B ∈ 𝒟` but neither `A` nor `B` is.
    NotPrime { a: IndexSet, b: IndexSet },
}

impl AxiomViolation {
    /// Axiom number, `"4*"` for the prime condition.
    pub fn axiom(&self) -> &'static str {
        match self {
            AxiomViolation::ForeignMember { .. }
            | AxiomViolation::MissingUniverse
            | AxiomViolation::ContainsEmpty => "1",
            AxiomViolation::NotIntersectionClosed { .. } => "2",
            AxiomViolation::NotUpwardClosed { .. } => "3",
            AxiomViolation::Undecided { .. } => "4",
            AxiomViolation::NotPrime { .. } => "4*",
        }
    }
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AxiomViolation::ForeignMember { member } => {
                write!(f, "axiom (1): member {member} is not a subset of I")
            }
            AxiomViolation::MissingUniverse => write!(f, "axiom (1): I is not a member"),
            AxiomViolation::ContainsEmpty => write!(f, "axiom (1): the empty set is a member"),
            AxiomViolation::NotIntersectionClosed { a, b } => write!(
                f,
                "axiom (2): {a} and {b} are members but their intersection {} is not",
                a.intersection(b)
            ),
            AxiomViolation::NotUpwardClosed { member, superset } => write!(
                f,
                "axiom (3): {member} is a member but its superset {superset} is not"
            ),
            AxiomViolation::Undecided { set } => write!(
                f,
                "axiom (4): neither {set} nor its complement {} is a member",
                set.complement()
            ),
            AxiomViolation::NotPrime { a, b } => write!(
                f,
                "condition (4*): {} is a member but neither {a} nor {b} is",
                a.union(b)
            ),
        }
    }
}

/// Per-axiom outcome of checking a family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AxiomReport {
    pub axiom1: Option<AxiomViolation>,
    pub axiom2: Option<AxiomViolation>,
    pub axiom3: Option<AxiomViolation>,
    pub axiom4: Option<AxiomViolation>,
}

impl AxiomReport {
    pub fn is_filter(&self) -> bool {
        self.axiom1.is_none() && self.axiom2.is_none() && self.axiom3.is_none()
    }

    pub fn is_ultrafilter(&self) -> bool {
        self.is_filter() && self.axiom4.is_none()
    }

    /// Violation of the lowest-numbered failing axiom.
    pub fn first_violation(&self) -> Option<&AxiomViolation> {
        [&self.axiom1, &self.axiom2, &self.axiom3, &self.axiom4]
            .into_iter()
            .flatten()
            .next()
    }
}

/// Membership table over all subsets, indexed by bitmask.
struct Table<'a> {
    n: usize,
    member: &'a [bool],
}

impl Table<'_> {
    fn set(&self, bits: usize) -> IndexSet {
        IndexSet {
            universe: self.n,
            bits: bits as u64,
        }
    }

    fn full(&self) -> usize {
        (1 << self.n) - 1
    }

    fn members(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.member.len()).filter(|&s| self.member[s])
    }

    fn axiom1(&self) -> Option<AxiomViolation> {
        if !self.member[self.full()] {
            Some(AxiomViolation::MissingUniverse)
        } else if self.member[0] {
            Some(AxiomViolation::ContainsEmpty)
        } else {
            None
        }
    }

    fn axiom2(&self) -> Option<AxiomViolation> {
        let members: Vec<usize> = self.members().collect();
        for (k, &a) in members.iter().enumerate() {
            for &b in &members[k..] {
                if !self.member[a & b] {
                    return Some(AxiomViolation::NotIntersectionClosed {
                        a: self.set(a),
                        b: self.set(b),
                    });
                }
            }
        }
        None
    }

    // Upward closure follows from closure under adding single elements.
    fn axiom3(&self) -> Option<AxiomViolation> {
        for a in self.members() {
            for i in 0..self.n {
                let c = a | 1 << i;
                if !self.member[c] {
                    return Some(AxiomViolation::NotUpwardClosed {
                        member: self.set(a),
                        superset: self.set(c),
                    });
                }
            }
        }
        None
    }

    fn axiom4(&self) -> Option<AxiomViolation> {
        (0..self.member.len())
            .find(|&s| !self.member[s] && !self.member[self.full() ^ s])
            .map(|s| AxiomViolation::Undecided { set: self.set(s) })
    }

    fn four_star(&self) -> Option<AxiomViolation> {
        let all = self.member.len();
        for a in 0..all {
            if self.member[a] {
                continue;
            }
            for b in 0..all {
                if !self.member[b] && self.member[a | b] {
                    return Some(AxiomViolation::NotPrime {
                        a: self.set(a),
                        b: self.set(b),
                    });
                }
            }
        }
        None
    }

    fn report(&self) -> AxiomReport {
        AxiomReport {
            axiom1: self.axiom1(),
            axiom2: self.axiom2(),
            axiom3: self.axiom3(),
            axiom4: self.axiom4(),
        }
    }
}

fn membership_table(n: usize, family: &[IndexSet]) -> Result<Vec<bool>, AxiomViolation> {
    let mut member = vec![false; 1 << n];
    for s in family {
        if s.universe != n {
            return Err(AxiomViolation::ForeignMember {
                member: s.to_string(),
            });
        }
        member[s.bits as usize] = true;
    }
    Ok(member)
}

fn check_universe(n: usize) -> Result<()> {
    if n == 0 || n > MAX_UNIVERSE {
        return Err(Error::UniverseSize {
            found: n,
            max: MAX_UNIVERSE,
        });
    }
    Ok(())
}

/// Checks every axiom separately.
pub fn check_axioms(n: usize, family: &[IndexSet]) -> Result<AxiomReport> {
    check_universe(n)?;
    Ok(match membership_table(n, family) {
        Ok(member) => Table { n, member: &member }.report(),
        Err(v) => AxiomReport {
            axiom1: Some(v),
            axiom2: None,
            axiom3: None,
            axiom4: None,
        },
    })
}

pub fn is_ultrafilter(n: usize, family: &[IndexSet]) -> Result<bool> {
    Ok(check_axioms(n, family)?.is_ultrafilter())
}

/// Whether a filter satisfies (4*); families failing (1)–(3) are rejected.
pub fn check_4star(n: usize, family: &[IndexSet]) -> Result<bool> {
    Ok(four_star_violation(n, family)?.is_none())
}

pub fn four_star_violation(n: usize, family: &[IndexSet]) -> Result<Option<AxiomViolation>> {
    let report = check_axioms(n, family)?;
    if let Some(v) = [report.axiom1, report.axiom2, report.axiom3]
        .into_iter()
        .flatten()
        .next()
    {
        return Err(Error::NotAFilter(v));
    }
    let member = membership_table(n, family).expect("checked above");
    Ok(Table { n, member: &member }.four_star())
}

/// An ultrafilter stored extensionally. Members are ordered by size, then by
/// bitmask; that order is the index range `J` of the family `{K_j}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ultrafilter {
    universe: usize,
    members: Vec<IndexSet>,
    table: Vec<bool>,
}

impl Ultrafilter {
    /// Validates an explicit family against axioms (1)–(4).
    pub fn from_family(n: usize, family: &[IndexSet]) -> Result<Self> {
        check_universe(n)?;
        let member = membership_table(n, family).map_err(Error::NotAnUltrafilter)?;
        let table = Table { n, member: &member };
        if let Some(v) = table.report().first_violation() {
            return Err(Error::NotAnUltrafilter(v.clone()));
        }
        Ok(Self::from_table(n, member))
    }

    fn from_table(n: usize, table: Vec<bool>) -> Self {
        let mut members: Vec<IndexSet> = (0..table.len())
            .filter(|&s| table[s])
            .map(|s| IndexSet {
                universe: n,
                bits: s as u64,
            })
            .collect();
        members.sort();
        Ultrafilter {
            universe: n,
            members,
            table,
        }
    }

    /// All subsets of `0..n` containing `i0`.
    pub fn principal(n: usize, i0: usize) -> Result<Self> {
        check_universe(n)?;
        if i0 >= n {
            return Err(Error::IndexOutOfRange {
                index: i0,
                universe: n,
            });
        }
        let table = (0..1usize << n).map(|s| s >> i0 & 1 == 1).collect();
        Ok(Self::from_table(n, table))
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    /// The family `{K_j | j ∈ J}` in `J` order.
    pub fn members(&self) -> &[IndexSet] {
        &self.members
    }

    pub fn member(&self, s: &IndexSet) -> Result<bool> {
        if s.universe != self.universe {
            return Err(Error::UniverseMismatch {
                expected: self.universe,
                found: s.universe,
            });
        }
        Ok(self.table[s.bits as usize])
    }

    /// Membership of a raw bitmask over this universe.
    #[inline]
    pub fn contains_bits(&self, bits: u64) -> bool {
        self.table[bits as usize]
    }

    /// The point `i0` with `𝒟 = {S | i0 ∈ S}`.
    pub fn principal_index(&self) -> Option<usize> {
        let core = self
            .members
            .iter()
            .fold(IndexSet::full(self.universe), |acc, s| acc.intersection(s));
        (core.len() == 1 && self.members.len() == 1 << (self.universe - 1))
            .then(|| core.elements()[0])
    }

    /// `principal:<i0>` when principal, otherwise the explicit member list.
    pub fn label(&self) -> String {
        match self.principal_index() {
            Some(i) => format!("principal:{i}"),
            None => {
                let lists: Vec<Vec<usize>> = self.members.iter().map(IndexSet::elements).collect();
                serde_json::to_string(&lists).expect("serializable")
            }
        }
    }
}

/// Every family of subsets of `0..n`, `n <= 4`, in bitmask order.
pub fn all_families(n: usize) -> Result<impl Iterator<Item = Vec<IndexSet>>> {
    if n == 0 || n > ENUMERATION_MAX {
        return Err(Error::EnumerationBound {
            what: "family enumeration",
            found: n,
            max: ENUMERATION_MAX,
        });
    }
    let subsets = 1usize << n;
    Ok((0..1u64 << subsets).map(move |mask| {
        (0..subsets)
            .filter(|&s| mask >> s & 1 == 1)
            .map(|s| IndexSet {
                universe: n,
                bits: s as u64,
            })
            .collect()
    }))
}

/// Every ultrafilter over `0..n`, found by scanning all `2^(2^n)` families.
pub fn enumerate_ultrafilters(n: usize) -> Result<Vec<Ultrafilter>> {
    if n == 0 || n > ENUMERATION_MAX {
        return Err(Error::EnumerationBound {
            what: "ultrafilter enumeration",
            found: n,
            max: ENUMERATION_MAX,
        });
    }
    let subsets = 1usize << n;
    let mut out = Vec::new();
    let mut member = vec![false; subsets];
    for mask in 0..1u64 << subsets {
        for (s, m) in member.iter_mut().enumerate() {
            *m = mask >> s & 1 == 1;
        }
        if (Table { n, member: &member }).report().is_ultrafilter() {
            out.push(Ultrafilter::from_table(n, member.clone()));
        }
    }
    Ok(out)
}

/// Command-line form of an ultrafilter: `principal:<i0>` or a JSON list of
/// subsets such as `[[1],[0,1],[1,2],[0,1,2]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum UltrafilterSpec {
    Principal(usize),
    Explicit(Vec<Vec<usize>>),
}

impl UltrafilterSpec {
    /// Builds and validates the ultrafilter over `0..n`.
    pub fn resolve(&self, n: usize) -> Result<Ultrafilter> {
        match self {
            UltrafilterSpec::Principal(i0) => Ultrafilter::principal(n, *i0),
            UltrafilterSpec::Explicit(lists) => {
                check_universe(n)?;
                let family = lists
                    .iter()
                    .map(|l| IndexSet::from_elements(n, l))
                    .collect::<Result<Vec<_>>>()?;
                Ultrafilter::from_family(n, &family)
            }
        }
    }
}

impl FromStr for UltrafilterSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some(rest) = s.strip_prefix("principal:") {
            let i0 = rest
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad principal index in `{s}`")))?;
            return Ok(UltrafilterSpec::Principal(i0));
        }
        serde_json::from_str(s)
            .map(UltrafilterSpec::Explicit)
            .map_err(|e| {
                Error::Parse(format!(
                    "ultrafilter `{s}`: expected principal:<i0> or a JSON list of subsets ({e})"
                ))
            })
    }
}
