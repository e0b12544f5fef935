//! Finite algebras as operation tables.
//!
//! Elements are dense integers `0..n`. The table of a `k`-ary symbol has
//! `n^k` entries in row-major order, most significant argument first, so the
//! value of `f(a₁,…,a_k)` sits at index `Σ aⱼ·n^(k−j)`. Constants are
//! length-1 tables.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::congruence;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::radix::{for_each_tuple, table_index, MixedRadix};

pub type ElemId = usize;

/// Size limits applied by constructions that multiply carrier sizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Limits {
    /// Largest carrier a product, ultraproduct or congruence lattice may have.
    pub max_carrier: usize,
    /// Largest operation table a construction may materialize.
    pub max_table_entries: usize,
    /// Largest carrier handed to isomorphism search.
    pub max_iso: usize,
    /// Largest number of congruences a lattice computation may produce.
    pub max_congruences: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_carrier: 10_000,
            max_table_entries: 1 << 24,
            max_iso: 12,
            max_congruences: 100_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
}

/// Ordered list of operation symbols. Algebras are similar iff their
/// signatures are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &symbols {
            if s.name.is_empty() {
                return Err(Error::EmptySymbolName);
            }
            if !seen.insert(s.name.as_str()) {
                return Err(Error::DuplicateSymbol(s.name.clone()));
            }
        }
        Ok(Signature { symbols })
    }

    /// Convenience constructor from `(name, arity)` pairs.
    pub fn from_pairs(pairs: &[(&str, usize)]) -> Result<Self> {
        Signature::new(
            pairs
                .iter()
                .map(|&(name, arity)| Symbol {
                    name: name.to_string(),
                    arity,
                })
                .collect(),
        )
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Algebra {
    name: String,
    signature: Signature,
    size: usize,
    tables: Vec<Vec<ElemId>>,
}

impl Algebra {
    /// Validates raw tables given in signature order.
    pub fn new(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        tables: Vec<Vec<ElemId>>,
    ) -> Result<Self> {
        if size == 0 {
            return Err(Error::EmptyCarrier);
        }
        if tables.len() != signature.len() {
            let missing = signature
                .symbols()
                .get(tables.len())
                .map(|s| s.name.clone())
                .unwrap_or_default();
            return Err(Error::MissingTable(missing));
        }
        for (symbol, table) in signature.symbols().iter().zip(&tables) {
            let expected = u32::try_from(symbol.arity)
                .ok()
                .and_then(|k| size.checked_pow(k))
                .ok_or(Error::SizeGuard {
                    what: "operation table",
                    size: usize::MAX,
                    limit: usize::MAX,
                })?;
            if table.len() != expected {
                return Err(Error::TableLength {
                    symbol: symbol.name.clone(),
                    expected,
                    found: table.len(),
                });
            }
            if let Some((index, &value)) = table.iter().enumerate().find(|(_, &v)| v >= size) {
                return Err(Error::EntryOutOfRange {
                    symbol: symbol.name.clone(),
                    index,
                    value,
                    size,
                });
            }
        }
        Ok(Algebra {
            name: name.into(),
            signature,
            size,
            tables,
        })
    }

    /// Validates tables keyed by symbol name.
    pub fn from_named_tables<I>(
        name: impl Into<String>,
        signature: Signature,
        size: usize,
        tables: I,
    ) -> Result<Self>
    where
        I: IntoIterator<Item = (String, Vec<ElemId>)>,
    {
        let mut ordered: Vec<Option<Vec<ElemId>>> = vec![None; signature.len()];
        for (symbol, table) in tables {
            let i = signature
                .position(&symbol)
                .ok_or_else(|| Error::UnexpectedTable(symbol.clone()))?;
            ordered[i] = Some(table);
        }
        let tables = ordered
            .into_iter()
            .zip(signature.symbols())
            .map(|(t, s)| t.ok_or_else(|| Error::MissingTable(s.name.clone())))
            .collect::<Result<Vec<_>>>()?;
        Algebra::new(name, signature, size, tables)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn table(&self, op: usize) -> &[ElemId] {
        &self.tables[op]
    }

    pub fn arity(&self, op: usize) -> usize {
        self.signature.symbols[op].arity
    }

    /// Applies the `op`-th symbol. Arguments are trusted.
    #[inline]
    pub fn apply_op(&self, op: usize, args: &[ElemId]) -> ElemId {
        debug_assert_eq!(args.len(), self.arity(op));
        self.tables[op][table_index(self.size, args)]
    }

    /// Checked application by symbol name.
    pub fn apply(&self, symbol: &str, args: &[ElemId]) -> Result<ElemId> {
        let op = self
            .signature
            .position(symbol)
            .ok_or_else(|| Error::UnknownSymbol(symbol.to_string()))?;
        let arity = self.arity(op);
        if args.len() != arity {
            return Err(Error::ArityMismatch {
                symbol: symbol.to_string(),
                expected: arity,
                found: args.len(),
            });
        }
        if let Some(&element) = args.iter().find(|&&a| a >= self.size) {
            return Err(Error::ElementOutOfRange {
                element,
                size: self.size,
            });
        }
        Ok(self.apply_op(op, args))
    }

    pub(crate) fn check_similar(&self, other: &Algebra) -> Result<()> {
        if self.signature != other.signature {
            return Err(Error::SignatureMismatch);
        }
        Ok(())
    }
}

/// A total map between carriers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ElemMap {
    target_size: usize,
    image: Vec<ElemId>,
}

impl ElemMap {
    pub fn new(source_size: usize, target_size: usize, image: Vec<ElemId>) -> Result<Self> {
        if image.len() != source_size {
            return Err(Error::SizeMismatch {
                expected: source_size,
                found: image.len(),
            });
        }
        if let Some(&element) = image.iter().find(|&&t| t >= target_size) {
            return Err(Error::ElementOutOfRange {
                element,
                size: target_size,
            });
        }
        Ok(ElemMap { target_size, image })
    }

    pub fn identity(n: usize) -> Self {
        ElemMap {
            target_size: n,
            image: (0..n).collect(),
        }
    }

    pub fn source_size(&self) -> usize {
        self.image.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn image(&self) -> &[ElemId] {
        &self.image
    }

    pub fn get(&self, e: ElemId) -> ElemId {
        self.image[e]
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target_size];
        self.image
            .iter()
            .all(|&t| !std::mem::replace(&mut seen[t], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.target_size];
        for &t in &self.image {
            seen[t] = true;
        }
        seen.into_iter().all(|s| s)
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &ElemMap) -> Result<ElemMap> {
        if self.target_size != other.source_size() {
            return Err(Error::SizeMismatch {
                expected: self.target_size,
                found: other.source_size(),
            });
        }
        Ok(ElemMap {
            target_size: other.target_size,
            image: self.image.iter().map(|&t| other.image[t]).collect(),
        })
    }

    /// Inverse of a bijection.
    pub fn inverse(&self) -> Option<ElemMap> {
        if self.source_size() != self.target_size || !self.is_injective() {
            return None;
        }
        let mut inv = vec![0; self.target_size];
        for (s, &t) in self.image.iter().enumerate() {
            inv[t] = s;
        }
        Some(ElemMap {
            target_size: self.source_size(),
            image: inv,
        })
    }
}

/// First operation and argument tuple at which `h` fails to commute with the
/// operations, or `None` if `h` is a homomorphism.
pub fn homomorphism_violation(
    h: &ElemMap,
    a: &Algebra,
    b: &Algebra,
) -> Result<Option<(String, Vec<ElemId>)>> {
    a.check_similar(b)?;
    if h.source_size() != a.size() {
        return Err(Error::SizeMismatch {
            expected: a.size(),
            found: h.source_size(),
        });
    }
    if h.target_size() != b.size() {
        return Err(Error::SizeMismatch {
            expected: b.size(),
            found: h.target_size(),
        });
    }
    for (op, symbol) in a.signature().symbols().iter().enumerate() {
        let mut mapped = vec![0; symbol.arity];
        let mut bad = None;
        for_each_tuple(a.size(), symbol.arity, |args| {
            if bad.is_some() {
                return;
            }
            for (m, &x) in mapped.iter_mut().zip(args) {
                *m = h.get(x);
            }
            if h.get(a.apply_op(op, args)) != b.apply_op(op, &mapped) {
                bad = Some(args.to_vec());
            }
        });
        if let Some(args) = bad {
            return Ok(Some((symbol.name.clone(), args)));
        }
    }
    Ok(None)
}

/// `h(f_A(a₁,…,a_k)) = f_B(h(a₁),…,h(a_k))` for every symbol and tuple.
pub fn is_homomorphism(h: &ElemMap, a: &Algebra, b: &Algebra) -> Result<bool> {
    Ok(homomorphism_violation(h, a, b)?.is_none())
}

/// Groups source elements by equal image.
pub fn kernel(h: &ElemMap) -> Partition {
    Partition::from_labels(h.image())
}

/// Direct product with mixed-radix element coding: element `e` stands for the
/// tuple `decode(e)`, coordinate 0 most significant.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductAlgebra {
    factors: Vec<Algebra>,
    coding: MixedRadix,
    algebra: Algebra,
}

impl ProductAlgebra {
    pub fn new(factors: Vec<Algebra>, limits: &Limits) -> Result<Self> {
        let first = factors.first().ok_or(Error::NoFactors)?;
        for f in &factors[1..] {
            first.check_similar(f)?;
        }
        let coding = MixedRadix::new(factors.iter().map(Algebra::size).collect()).ok_or(
            Error::SizeGuard {
                what: "direct product",
                size: usize::MAX,
                limit: limits.max_carrier,
            },
        )?;
        let size = coding.total();
        if size > limits.max_carrier {
            return Err(Error::SizeGuard {
                what: "direct product",
                size,
                limit: limits.max_carrier,
            });
        }
        let m = factors.len();
        let coords: Vec<Vec<ElemId>> = (0..size).map(|e| coding.decode(e)).collect();
        let mut tables = Vec::with_capacity(first.signature().len());
        for (op, symbol) in first.signature().symbols().iter().enumerate() {
            let k = symbol.arity;
            let entries = u32::try_from(k)
                .ok()
                .and_then(|k| size.checked_pow(k))
                .filter(|&e| e <= limits.max_table_entries)
                .ok_or(Error::SizeGuard {
                    what: "product operation table",
                    size: size.saturating_pow(k.min(u32::MAX as usize) as u32),
                    limit: limits.max_table_entries,
                })?;
            let mut table = Vec::with_capacity(entries);
            let mut result = vec![0; m];
            for_each_tuple(size, k, |args| {
                for (i, factor) in factors.iter().enumerate() {
                    let n = factor.size();
                    let idx = args.iter().fold(0, |acc, &x| acc * n + coords[x][i]);
                    result[i] = factor.table(op)[idx];
                }
                table.push(coding.encode(&result));
            });
            tables.push(table);
        }
        let name = factors
            .iter()
            .map(Algebra::name)
            .collect::<Vec<_>>()
            .join(" x ");
        let algebra = Algebra::new(name, first.signature().clone(), size, tables)?;
        Ok(ProductAlgebra {
            factors,
            coding,
            algebra,
        })
    }

    pub fn factors(&self) -> &[Algebra] {
        &self.factors
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn coding(&self) -> &MixedRadix {
        &self.coding
    }

    pub fn size(&self) -> usize {
        self.algebra.size()
    }

    pub fn encode(&self, tuple: &[ElemId]) -> ElemId {
        self.coding.encode(tuple)
    }

    pub fn decode(&self, e: ElemId) -> Vec<ElemId> {
        self.coding.decode(e)
    }

    /// Coordinate `i` of product element `e`.
    pub fn coord(&self, e: ElemId, i: usize) -> ElemId {
        self.coding.digit(e, i)
    }
}

/// Direct product under the default [`Limits`].
pub fn direct_product(factors: &[Algebra]) -> Result<ProductAlgebra> {
    ProductAlgebra::new(factors.to_vec(), &Limits::default())
}

/// `parent/θ`. Classes are numbered by ascending least member.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientAlgebra {
    parent: Algebra,
    congruence: Partition,
    algebra: Algebra,
    projection: ElemMap,
    representatives: Vec<ElemId>,
}

impl QuotientAlgebra {
    pub fn new(parent: &Algebra, theta: &Partition) -> Result<Self> {
        if theta.size() != parent.size() {
            return Err(Error::SizeMismatch {
                expected: parent.size(),
                found: theta.size(),
            });
        }
        if let Some(err) = congruence::congruence_violation(parent, theta)? {
            return Err(err);
        }
        let representatives: Vec<ElemId> = theta.representatives().collect();
        let mut class_index = vec![0; parent.size()];
        for (i, &r) in representatives.iter().enumerate() {
            class_index[r] = i;
        }
        let image: Vec<ElemId> = (0..parent.size())
            .map(|e| class_index[theta.class_of(e)])
            .collect();
        let m = representatives.len();
        let mut tables = Vec::with_capacity(parent.signature().len());
        for (op, symbol) in parent.signature().symbols().iter().enumerate() {
            let mut table = Vec::with_capacity(m.pow(symbol.arity as u32));
            let mut lifted = vec![0; symbol.arity];
            for_each_tuple(m, symbol.arity, |args| {
                for (l, &c) in lifted.iter_mut().zip(args) {
                    *l = representatives[c];
                }
                table.push(image[parent.apply_op(op, &lifted)]);
            });
            tables.push(table);
        }
        let algebra = Algebra::new(
            format!("{}/{}", parent.name(), theta),
            parent.signature().clone(),
            m,
            tables,
        )?;
        Ok(QuotientAlgebra {
            parent: parent.clone(),
            congruence: theta.clone(),
            algebra,
            projection: ElemMap::new(parent.size(), m, image)?,
            representatives,
        })
    }

    pub(crate) fn rename(mut self, name: String) -> Self {
        self.algebra = self.algebra.with_name(name);
        self
    }

    pub fn parent(&self) -> &Algebra {
        &self.parent
    }

    pub fn congruence(&self) -> &Partition {
        &self.congruence
    }

    pub fn algebra(&self) -> &Algebra {
        &self.algebra
    }

    pub fn projection(&self) -> &ElemMap {
        &self.projection
    }

    /// Least parent element of class `c`.
    pub fn representative(&self, c: ElemId) -> ElemId {
        self.representatives[c]
    }

    pub fn representatives(&self) -> &[ElemId] {
        &self.representatives
    }
}

pub fn quotient(a: &Algebra, theta: &Partition) -> Result<QuotientAlgebra> {
    QuotientAlgebra::new(a, theta)
}
