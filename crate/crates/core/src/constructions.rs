//! Relations on direct products defined through an ultrafilter, and the
//! ultraproduct itself.
//!
//! For a product element `a` and an ultrafilter 𝒟 over the factor indices:
//!
//! * `(a, b) ∈ 𝒟*` iff `{i | a(i) = b(i)} ∈ 𝒟`;
//! * `(a, b) ∈ Π(σ(i))` iff `{i | (a(i), b(i)) ∈ σ(i)} ∈ 𝒟`;
//! * the ultraproduct is the product modulo 𝒟*, and `Π(σ(i))/𝒟*` is the
//!   congruence it induces there.
//!
//! Both relations are built by evaluating the membership test on every pair
//! of product elements; the result is then checked to be an equivalence and a
//! congruence rather than assumed to be one.

use crate::algebra::{Algebra, ElemId, ElemMap, Limits, ProductAlgebra, QuotientAlgebra};
use crate::congruence::Congruence;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::ultrafilter::Ultrafilter;

/// A choice `σ(i) ∈ Con(Aᵢ)` for every factor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CongruenceFamily {
    choice: Vec<Congruence>,
}

impl CongruenceFamily {
    /// Validates `choice[i]` as a congruence of `factors[i]`.
    pub fn new(factors: &[Algebra], choice: Vec<Partition>) -> Result<Self> {
        if choice.len() != factors.len() {
            return Err(Error::FamilyLength {
                expected: factors.len(),
                found: choice.len(),
            });
        }
        let choice = factors
            .iter()
            .zip(choice)
            .map(|(a, p)| Congruence::new(a, p))
            .collect::<Result<Vec<_>>>()?;
        Ok(CongruenceFamily { choice })
    }

    /// Assembles already-validated congruences, checking only shapes.
    pub fn from_congruences(factors: &[Algebra], choice: Vec<Congruence>) -> Result<Self> {
        if choice.len() != factors.len() {
            return Err(Error::FamilyLength {
                expected: factors.len(),
                found: choice.len(),
            });
        }
        for (a, c) in factors.iter().zip(&choice) {
            if a.size() != c.size() {
                return Err(Error::SizeMismatch {
                    expected: a.size(),
                    found: c.size(),
                });
            }
        }
        Ok(CongruenceFamily { choice })
    }

    /// `σ(i) = Δ` everywhere.
    pub fn identity(factors: &[Algebra]) -> Self {
        CongruenceFamily {
            choice: factors.iter().map(Congruence::identity).collect(),
        }
    }

    /// `σ(i) = ∇` everywhere.
    pub fn total(factors: &[Algebra]) -> Self {
        CongruenceFamily {
            choice: factors.iter().map(Congruence::total).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.choice.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choice.is_empty()
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.choice[i]
    }

    pub fn choice(&self) -> &[Congruence] {
        &self.choice
    }

    /// Coordinatewise meet.
    pub fn meet(&self, other: &CongruenceFamily) -> Result<CongruenceFamily> {
        if self.len() != other.len() {
            return Err(Error::FamilyLength {
                expected: self.len(),
                found: other.len(),
            });
        }
        let choice = self
            .choice
            .iter()
            .zip(&other.choice)
            .map(|(a, b)| a.meet(b))
            .collect::<Result<_>>()?;
        Ok(CongruenceFamily { choice })
    }

    /// Text form of each coordinate.
    pub fn describe(&self) -> Vec<String> {
        self.choice.iter().map(ToString::to_string).collect()
    }
}

fn check_universe(product: &ProductAlgebra, d: &Ultrafilter) -> Result<()> {
    if d.universe() != product.factors().len() {
        return Err(Error::UniverseMismatch {
            expected: product.factors().len(),
            found: d.universe(),
        });
    }
    Ok(())
}

fn coordinates(product: &ProductAlgebra) -> Vec<Vec<ElemId>> {
    (0..product.size()).map(|e| product.decode(e)).collect()
}

/// Set of coordinates on which `pred(i, a(i), b(i))` holds, as a bitmask.
pub fn index_set_of(
    a: &[ElemId],
    b: &[ElemId],
    mut pred: impl FnMut(usize, ElemId, ElemId) -> bool,
) -> u64 {
    a.iter()
        .zip(b)
        .enumerate()
        .filter(|&(i, (&x, &y))| pred(i, x, y))
        .fold(0, |acc, (i, _)| acc | 1 << i)
}

/// The ultraproduct congruence 𝒟* on the product.
pub fn dstar(product: &ProductAlgebra, d: &Ultrafilter) -> Result<Congruence> {
    check_universe(product, d)?;
    let coords = coordinates(product);
    let p = Partition::from_equivalence_fn(product.size(), |a, b| {
        d.contains_bits(index_set_of(&coords[a], &coords[b], |_, x, y| x == y))
    })?;
    Congruence::new(product.algebra(), p)
}

/// The congruence Π(σ(i)|i∈I) on the product, relative to `d`.
pub fn product_congruence(
    product: &ProductAlgebra,
    fam: &CongruenceFamily,
    d: &Ultrafilter,
) -> Result<Congruence> {
    check_universe(product, d)?;
    if fam.len() != product.factors().len() {
        return Err(Error::FamilyLength {
            expected: product.factors().len(),
            found: fam.len(),
        });
    }
    for (a, c) in product.factors().iter().zip(fam.choice()) {
        if a.size() != c.size() {
            return Err(Error::SizeMismatch {
                expected: a.size(),
                found: c.size(),
            });
        }
    }
    let coords = coordinates(product);
    let p = Partition::from_equivalence_fn(product.size(), |a, b| {
        d.contains_bits(index_set_of(&coords[a], &coords[b], |i, x, y| {
            fam.get(i).related(x, y)
        }))
    })?;
    Congruence::new(product.algebra(), p)
}

/// Π_𝒟(Aᵢ) = Π(Aᵢ)/𝒟*, keeping the product and 𝒟 so that classes can be
/// traced back to coordinates. Class representatives are least product
/// elements.
#[derive(Debug, Clone)]
pub struct UltraproductAlgebra {
    product: ProductAlgebra,
    ultrafilter: Ultrafilter,
    dstar: Congruence,
    quotient: QuotientAlgebra,
}

impl UltraproductAlgebra {
    pub fn algebra(&self) -> &Algebra {
        self.quotient.algebra()
    }

    pub fn product(&self) -> &ProductAlgebra {
        &self.product
    }

    pub fn factors(&self) -> &[Algebra] {
        self.product.factors()
    }

    pub fn ultrafilter(&self) -> &Ultrafilter {
        &self.ultrafilter
    }

    pub fn dstar(&self) -> &Congruence {
        &self.dstar
    }

    pub fn quotient(&self) -> &QuotientAlgebra {
        &self.quotient
    }

    /// Product element ↦ its 𝒟*-class.
    pub fn projection(&self) -> &ElemMap {
        self.quotient.projection()
    }

    /// Least product element of class `c`.
    pub fn representative(&self, c: ElemId) -> ElemId {
        self.quotient.representative(c)
    }

    pub fn size(&self) -> usize {
        self.quotient.algebra().size()
    }
}

pub fn ultraproduct(factors: &[Algebra], d: &Ultrafilter) -> Result<UltraproductAlgebra> {
    ultraproduct_with(factors, d, &Limits::default())
}

pub fn ultraproduct_with(
    factors: &[Algebra],
    d: &Ultrafilter,
    limits: &Limits,
) -> Result<UltraproductAlgebra> {
    if d.universe() != factors.len() {
        return Err(Error::UniverseMismatch {
            expected: factors.len(),
            found: d.universe(),
        });
    }
    let product = ProductAlgebra::new(factors.to_vec(), limits)?;
    let dstar = dstar(&product, d)?;
    let quotient = QuotientAlgebra::new(product.algebra(), dstar.partition())?;
    let name = format!(
        "Π_{}({})",
        d.label(),
        factors
            .iter()
            .map(Algebra::name)
            .collect::<Vec<_>>()
            .join(", ")
    );
    let quotient = QuotientAlgebra::rename(quotient, name);
    Ok(UltraproductAlgebra {
        product,
        ultrafilter: d.clone(),
        dstar,
        quotient,
    })
}

/// θ/base on `parent/base`, for congruences `base ⊆ θ` of the parent.
pub fn induced_congruence(theta: &Partition, quotient: &QuotientAlgebra) -> Result<Congruence> {
    let base = quotient.congruence();
    if theta.size() != base.size() {
        return Err(Error::SizeMismatch {
            expected: base.size(),
            found: theta.size(),
        });
    }
    if let Some((left, right)) = base.refinement_witness(theta) {
        return Err(Error::NotContained { left, right });
    }
    let theta = Congruence::new(quotient.parent(), theta.clone())?;
    let labels: Vec<ElemId> = quotient
        .representatives()
        .iter()
        .map(|&r| theta.class_of(r))
        .collect();
    Congruence::new(quotient.algebra(), Partition::from_labels(&labels))
}
