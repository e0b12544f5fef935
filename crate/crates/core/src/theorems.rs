//! Executable forms of the congruence maps on ultraproducts and their
//! verification.
//!
//! * [`phi`] sends a family σ to `Π_𝒟(σ(i)) = Π(σ(i))/𝒟*` on the
//!   ultraproduct. [`verify_thm1`] checks that it is well defined on
//!   𝒟*-classes of families, injective, and preserves meets.
//! * [`delta_map`] sends a product element `a` to the 𝒟*-class of
//!   `([a(i)]_σ(i))ᵢ` in the ultraproduct of the factor algebras.
//!   [`verify_thm2`] checks that it is a surjective homomorphism with kernel
//!   `Π(σ(i))`, and that it induces an isomorphism between
//!   `Π_𝒟(Aᵢ)/Π_𝒟(σ(i))` and `Π_𝒟(Aᵢ/σ(i))`.
//! * For an ultrapower of a single algebra, [`restriction`] is
//!   `Π_𝒟(σ(i))` pulled back along the natural embedding, and
//!   [`verify_thm3`] checks that it equals both the union and the join over
//!   `j ∈ J` of the meets `∧_{k∈K_j} σ(k)`.

use std::collections::{BTreeMap, HashMap};

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    homomorphism_violation, kernel, Algebra, ElemId, ElemMap, Limits, ProductAlgebra,
    QuotientAlgebra,
};
use crate::congruence::{con_as_algebra, con_lattice_with, ConLattice, Congruence};
use crate::constructions::{
    index_set_of, induced_congruence, product_congruence, ultraproduct_with, CongruenceFamily,
    UltraproductAlgebra,
};
use crate::error::{Error, Result};
use crate::iso::find_isomorphism_with;
use crate::partition::{Partition, Relation};
use crate::radix::MixedRadix;
use crate::report::{Check, Instance, Tally, TheoremId, VerificationReport, Witness};
use crate::ultrafilter::Ultrafilter;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyOptions {
    /// Seed for family sampling when a sweep is not exhaustive.
    pub seed: u64,
    /// Family sweeps are exhaustive up to this many families.
    pub max_exhaustive: usize,
    /// Number of sampled families above `max_exhaustive`.
    pub samples: usize,
    pub limits: Limits,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            seed: 0,
            max_exhaustive: 4096,
            samples: 500,
            limits: Limits::default(),
        }
    }
}

/// The families a sweep visits, in ascending index order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilySelection {
    pub indices: Vec<usize>,
    pub exhaustive: bool,
    pub space: usize,
}

pub fn select_families(space: usize, opts: &VerifyOptions) -> FamilySelection {
    if space <= opts.max_exhaustive || space <= opts.samples {
        return FamilySelection {
            indices: (0..space).collect(),
            exhaustive: true,
            space,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut indices = sample(&mut rng, space, opts.samples).into_vec();
    indices.sort_unstable();
    FamilySelection {
        indices,
        exhaustive: false,
        space,
    }
}

/// Π Con(Aᵢ), with families numbered in mixed radix over the lattice
/// sizes (each lattice in its canonical order).
#[derive(Debug, Clone)]
pub struct FamilySpace {
    factors: Vec<Algebra>,
    lattices: Vec<ConLattice>,
    coding: MixedRadix,
}

impl FamilySpace {
    pub fn new(factors: &[Algebra], limits: &Limits) -> Result<Self> {
        let lattices = factors
            .iter()
            .map(|a| con_lattice_with(a, limits))
            .collect::<Result<Vec<_>>>()?;
        let coding = MixedRadix::new(lattices.iter().map(ConLattice::len).collect()).ok_or(
            Error::SizeGuard {
                what: "family space",
                size: usize::MAX,
                limit: usize::MAX,
            },
        )?;
        Ok(FamilySpace {
            factors: factors.to_vec(),
            lattices,
            coding,
        })
    }

    pub fn lattices(&self) -> &[ConLattice] {
        &self.lattices
    }

    pub fn size(&self) -> usize {
        self.coding.total()
    }

    pub fn family(&self, index: usize) -> CongruenceFamily {
        let choice = self
            .coding
            .decode(index)
            .into_iter()
            .zip(&self.lattices)
            .map(|(k, l)| l.get(k).clone())
            .collect();
        CongruenceFamily::from_congruences(&self.factors, choice).expect("lattice entries fit")
    }

    /// Index of a family whose coordinates all come from the lattices.
    pub fn index_of(&self, fam: &CongruenceFamily) -> Option<usize> {
        let digits = fam
            .choice()
            .iter()
            .zip(&self.lattices)
            .map(|(c, l)| l.index_of(c.partition()))
            .collect::<Option<Vec<_>>>()?;
        Some(self.coding.encode(&digits))
    }
}

fn instance(
    factors: &[Algebra],
    d: &Ultrafilter,
    sel: &FamilySelection,
    opts: &VerifyOptions,
) -> Instance {
    Instance {
        factors: factors.iter().map(|a| a.name().to_string()).collect(),
        index_set_size: d.universe(),
        ultrafilter: d.label(),
        families: sel.indices.len(),
        family_space: sel.space,
        exhaustive: sel.exhaustive,
        seed: (!sel.exhaustive).then_some(opts.seed),
    }
}

fn single_family() -> FamilySelection {
    FamilySelection {
        indices: vec![0],
        exhaustive: true,
        space: 1,
    }
}

/// First pair on which two partitions of the same carrier disagree.
fn partition_difference(p: &Partition, q: &Partition) -> Option<(ElemId, ElemId)> {
    p.refinement_witness(q).or_else(|| q.refinement_witness(p))
}

fn relation_difference(r: &Relation, s: &Relation) -> Option<(ElemId, ElemId)> {
    r.pairs()
        .find(|&(a, b)| !s.contains(a, b))
        .or_else(|| s.pairs().find(|&(a, b)| !r.contains(a, b)))
}

fn element_witness(pair: Option<(ElemId, ElemId)>, detail: impl Into<String>) -> Witness {
    let (left, right) = pair.unwrap_or_default();
    Witness::Elements {
        left,
        right,
        detail: detail.into(),
    }
}

fn family_witness(
    a: &CongruenceFamily,
    b: &CongruenceFamily,
    detail: impl Into<String>,
) -> Witness {
    Witness::Families {
        left: a.describe(),
        right: b.describe(),
        detail: detail.into(),
    }
}

/// Φ(σ/𝒟*) = Π(σ(i))/𝒟* on the ultraproduct carried by `up`.
pub fn phi(up: &UltraproductAlgebra, fam: &CongruenceFamily) -> Result<Congruence> {
    let theta = product_congruence(up.product(), fam, up.ultrafilter())?;
    induced_congruence(theta.partition(), up.quotient())
}

/// Caches `Π(σ(i))` and Φ per family index.
struct PhiCache<'a> {
    ua: &'a UltraproductAlgebra,
    space: &'a FamilySpace,
    thetas: HashMap<usize, Congruence>,
    phis: HashMap<usize, Option<Partition>>,
}

impl PhiCache<'_> {
    fn theta(&mut self, e: usize) -> Result<&Congruence> {
        if !self.thetas.contains_key(&e) {
            let fam = self.space.family(e);
            let theta = product_congruence(self.ua.product(), &fam, self.ua.ultrafilter())?;
            self.thetas.insert(e, theta);
        }
        Ok(&self.thetas[&e])
    }

    /// `None` when 𝒟* ⊄ Π(σ(i)), where Φ is undefined.
    fn phi(&mut self, e: usize) -> Result<Option<Partition>> {
        if let Some(p) = self.phis.get(&e) {
            return Ok(p.clone());
        }
        let theta = self.theta(e)?.partition().clone();
        let out = match induced_congruence(&theta, self.ua.quotient()) {
            Ok(c) => Some(c.into_partition()),
            Err(Error::NotContained { .. }) => None,
            Err(e) => return Err(e),
        };
        self.phis.insert(e, out.clone());
        Ok(out)
    }
}

/// Checks that Φ embeds `Π_𝒟(Con(Aᵢ))` into `Con(Π_𝒟(Aᵢ))` as
/// ∧-semilattices. `Π_𝒟(Con(Aᵢ))` is built as the ultraproduct of the
/// meet-semilattices [`con_as_algebra`]; its product elements are exactly the
/// family indices of [`FamilySpace`].
pub fn verify_thm1(
    factors: &[Algebra],
    d: &Ultrafilter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let limits = &opts.limits;
    let ua = ultraproduct_with(factors, d, limits)?;
    let space = FamilySpace::new(factors, limits)?;
    let semis: Vec<Algebra> = space.lattices().iter().map(con_as_algebra).collect();
    let us = ultraproduct_with(&semis, d, limits)?;
    debug_assert_eq!(us.product().size(), space.size());
    let sel = select_families(space.size(), opts);

    let mut cache = PhiCache {
        ua: &ua,
        space: &space,
        thetas: HashMap::new(),
        phis: HashMap::new(),
    };
    let mut contained = Tally::new("dstar-contained-in-product-congruence");
    for &e in &sel.indices {
        let theta = cache.theta(e)?.clone();
        contained.record(ua.dstar().refines(&theta), || {
            element_witness(
                ua.dstar().refinement_witness(&theta),
                format!("family {:?}", space.family(e).describe()),
            )
        });
    }

    // (a) well defined: families in one 𝒟*-class share Φ
    let mut well_defined = Tally::new("well-defined");
    let mut class_rep: BTreeMap<ElemId, usize> = BTreeMap::new();
    for &e in &sel.indices {
        let class = us.projection().get(e);
        match class_rep.get(&class) {
            None => {
                class_rep.insert(class, e);
            }
            Some(&r) => {
                let (pr, pe) = (cache.phi(r)?, cache.phi(e)?);
                well_defined.record(pr.is_some() && pr == pe, || {
                    family_witness(
                        &space.family(r),
                        &space.family(e),
                        "same 𝒟*-class, different Φ",
                    )
                });
            }
        }
    }

    // (b) injective: distinct classes have distinct images
    let mut injective = Tally::new("injective");
    let reps: Vec<(ElemId, usize)> = class_rep.iter().map(|(&c, &e)| (c, e)).collect();
    for (k, &(_, ex)) in reps.iter().enumerate() {
        for &(_, ey) in &reps[k + 1..] {
            let (px, py) = (cache.phi(ex)?, cache.phi(ey)?);
            injective.record(px.is_none() || px != py, || {
                family_witness(
                    &space.family(ex),
                    &space.family(ey),
                    "different 𝒟*-classes, same Φ",
                )
            });
        }
    }

    // (c) meets, at the level of families, product congruences, agreement
    // sets and Φ
    let mut family_meet = Tally::new("family-meet-is-coordinatewise");
    let mut class_meet = Tally::new("class-meet-is-well-defined");
    let mut index_sets = Tally::new("meet-index-set-is-intersection");
    let mut product_meet = Tally::new("product-congruence-preserves-meet");
    let mut meet_preserved = Tally::new("phi-preserves-meet");
    let mut joins_preserved = true;
    let n = ua.product().size();
    let coords: Vec<Vec<ElemId>> = (0..n).map(|a| ua.product().decode(a)).collect();
    for &(cx, ex) in &reps {
        for &(cy, ey) in &reps {
            let em = us.product().algebra().apply_op(0, &[ex, ey]);
            let (fx, fy, fm) = (space.family(ex), space.family(ey), space.family(em));
            family_meet.record(fx.meet(&fy)? == fm, || {
                family_witness(&fx, &fy, "meet in Π Con(Aᵢ) is not coordinatewise")
            });
            class_meet.record(
                us.projection().get(em) == us.algebra().apply_op(0, &[cx, cy]),
                || family_witness(&fx, &fy, "class of the meet is not the meet of classes"),
            );

            let mut bad_pair = None;
            for a in 0..n {
                for b in 0..n {
                    let ix =
                        index_set_of(&coords[a], &coords[b], |i, u, v| fx.get(i).related(u, v));
                    let iy =
                        index_set_of(&coords[a], &coords[b], |i, u, v| fy.get(i).related(u, v));
                    let im =
                        index_set_of(&coords[a], &coords[b], |i, u, v| fm.get(i).related(u, v));
                    let ok = im == ix & iy
                        && d.contains_bits(ix & iy) == (d.contains_bits(ix) && d.contains_bits(iy));
                    if !ok && bad_pair.is_none() {
                        bad_pair = Some((a, b));
                    }
                }
            }
            index_sets.record(bad_pair.is_none(), || {
                element_witness(
                    bad_pair,
                    format!("families {:?} and {:?}", fx.describe(), fy.describe()),
                )
            });

            let tx = cache.theta(ex)?.clone();
            let ty = cache.theta(ey)?.clone();
            let tm = cache.theta(em)?.clone();
            let met = tx.meet(&ty)?;
            product_meet.record(met == tm, || {
                element_witness(
                    partition_difference(met.partition(), tm.partition()),
                    format!("families {:?} and {:?}", fx.describe(), fy.describe()),
                )
            });

            let (px, py, pm) = (cache.phi(ex)?, cache.phi(ey)?, cache.phi(em)?);
            let expected = match (&px, &py) {
                (Some(px), Some(py)) => Some(px.meet(py)?),
                _ => None,
            };
            meet_preserved.record(expected.is_some() && expected == pm, || {
                family_witness(&fx, &fy, "Φ(α∧β) differs from Φ(α)∧Φ(β)")
            });

            let join_digits: Vec<usize> = (0..factors.len())
                .map(|i| {
                    let l = &space.lattices()[i];
                    l.join_index(us.product().coord(ex, i), us.product().coord(ey, i))
                })
                .collect();
            let ej = us.product().encode(&join_digits);
            if let (Some(px), Some(py), Some(pj)) = (px, py, cache.phi(ej)?) {
                joins_preserved &= px.join(&py)? == pj;
            }
        }
    }

    let image: std::collections::HashSet<Partition> = sel
        .indices
        .iter()
        .filter_map(|&e| cache.phis.get(&e).cloned().flatten())
        .collect();
    let checks: Vec<Check> = [
        contained,
        well_defined,
        injective,
        family_meet,
        class_meet,
        index_sets,
        product_meet,
        meet_preserved,
    ]
    .into_iter()
    .map(Tally::finish)
    .collect();
    Ok(
        VerificationReport::new(TheoremId::Thm1, instance(factors, d, &sel, opts), checks)
            .with_info("phi_image_size", image.len())
            .with_info("classes", reps.len())
            .with_info("ultraproduct_size", ua.size())
            .with_info(
                "con_sizes",
                space
                    .lattices()
                    .iter()
                    .map(ConLattice::len)
                    .collect::<Vec<_>>(),
            )
            .with_info("joins_preserved", joins_preserved),
    )
}

/// Δ together with the algebras it is built from.
#[derive(Debug, Clone)]
pub struct DeltaMap {
    /// Product element ↦ element of `target`.
    pub map: ElemMap,
    /// `Aᵢ/σ(i)`.
    pub quotients: Vec<QuotientAlgebra>,
    /// `Π_𝒟(Aᵢ/σ(i))`.
    pub target: UltraproductAlgebra,
}

/// `Δ(a) = ([a(i)]_σ(i))ᵢ / 𝒟*`.
pub fn delta_map(
    product: &ProductAlgebra,
    fam: &CongruenceFamily,
    d: &Ultrafilter,
) -> Result<DeltaMap> {
    let factors = product.factors();
    if fam.len() != factors.len() {
        return Err(Error::FamilyLength {
            expected: factors.len(),
            found: fam.len(),
        });
    }
    let quotients = factors
        .iter()
        .zip(fam.choice())
        .map(|(a, s)| QuotientAlgebra::new(a, s.partition()))
        .collect::<Result<Vec<_>>>()?;
    let qalgs: Vec<Algebra> = quotients.iter().map(|q| q.algebra().clone()).collect();
    // never larger than `product`, which already passed its guard
    let unbounded = Limits {
        max_carrier: usize::MAX,
        max_table_entries: usize::MAX,
        ..Limits::default()
    };
    let target = ultraproduct_with(&qalgs, d, &unbounded)?;
    let mut tuple = vec![0; factors.len()];
    let image = (0..product.size())
        .map(|a| {
            for (i, q) in quotients.iter().enumerate() {
                tuple[i] = q.projection().get(product.coord(a, i));
            }
            target.projection().get(target.product().encode(&tuple))
        })
        .collect();
    let map = ElemMap::new(product.size(), target.size(), image)?;
    Ok(DeltaMap {
        map,
        quotients,
        target,
    })
}

struct Thm2Tallies {
    hom: Tally,
    surjective: Tally,
    kernel: Tally,
    induced_well_defined: Tally,
    induced_bijective: Tally,
    induced_iso: Tally,
    search: Tally,
}

impl Thm2Tallies {
    fn new() -> Self {
        Thm2Tallies {
            hom: Tally::new("delta-is-homomorphism"),
            surjective: Tally::new("delta-is-surjective"),
            kernel: Tally::new("kernel-equals-product-congruence"),
            induced_well_defined: Tally::new("induced-map-well-defined"),
            induced_bijective: Tally::new("induced-map-bijective"),
            induced_iso: Tally::new("induced-map-is-isomorphism"),
            search: Tally::new("isomorphism-search-agrees"),
        }
    }

    fn finish(self) -> Vec<Check> {
        [
            self.hom,
            self.surjective,
            self.kernel,
            self.induced_well_defined,
            self.induced_bijective,
            self.induced_iso,
            self.search,
        ]
        .into_iter()
        .map(Tally::finish)
        .collect()
    }

    fn check(
        &mut self,
        ua: &UltraproductAlgebra,
        fam: &CongruenceFamily,
        limits: &Limits,
    ) -> Result<()> {
        let d = ua.ultrafilter();
        let product = ua.product();
        let label = || format!("family {:?}", fam.describe());
        let delta = delta_map(product, fam, d)?;
        let target = delta.target.algebra();

        let violation = homomorphism_violation(&delta.map, product.algebra(), target)?;
        self.hom.record(violation.is_none(), || {
            let (symbol, args) = violation.clone().unwrap_or_default();
            Witness::Detail {
                detail: format!(
                    "{}: Δ does not commute with `{symbol}` at {args:?}",
                    label()
                ),
            }
        });
        self.surjective
            .record(delta.map.is_surjective(), || Witness::Detail {
                detail: label(),
            });

        let theta = product_congruence(product, fam, d)?;
        let ker = kernel(&delta.map);
        self.kernel.record(&ker == theta.partition(), || {
            element_witness(partition_difference(&ker, theta.partition()), label())
        });

        let phi_c = induced_congruence(theta.partition(), ua.quotient())?;
        let q_theta = QuotientAlgebra::new(ua.algebra(), phi_c.partition())?;
        let psi_image: Vec<ElemId> = q_theta
            .representatives()
            .iter()
            .map(|&u| delta.map.get(ua.representative(u)))
            .collect();
        let mut bad = None;
        for a in 0..product.size() {
            let c = q_theta.projection().get(ua.projection().get(a));
            if psi_image[c] != delta.map.get(a) && bad.is_none() {
                bad = Some((ua.representative(q_theta.representative(c)), a));
            }
        }
        self.induced_well_defined
            .record(bad.is_none(), || element_witness(bad, label()));

        let psi = ElemMap::new(q_theta.algebra().size(), target.size(), psi_image)?;
        let inverse = psi.inverse();
        self.induced_bijective
            .record(inverse.is_some(), || Witness::Detail { detail: label() });
        let iso_ok = match &inverse {
            Some(inv) => {
                homomorphism_violation(&psi, q_theta.algebra(), target)?.is_none()
                    && homomorphism_violation(inv, target, q_theta.algebra())?.is_none()
            }
            None => false,
        };
        self.induced_iso
            .record(iso_ok, || Witness::Detail { detail: label() });

        let found = find_isomorphism_with(q_theta.algebra(), target, limits.max_iso)?.found;
        self.search
            .record(found, || Witness::Detail { detail: label() });
        Ok(())
    }
}

/// Checks Δ and the induced isomorphism for one family.
pub fn verify_thm2(
    factors: &[Algebra],
    fam: &CongruenceFamily,
    d: &Ultrafilter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let ua = ultraproduct_with(factors, d, &opts.limits)?;
    let mut tallies = Thm2Tallies::new();
    tallies.check(&ua, fam, &opts.limits)?;
    Ok(VerificationReport::new(
        TheoremId::Thm2,
        instance(factors, d, &single_family(), opts),
        tallies.finish(),
    )
    .with_info("sigma", fam.describe()))
}

/// [`verify_thm2`] over every family of Π Con(Aᵢ), or a seeded sample.
pub fn verify_thm2_sweep(
    factors: &[Algebra],
    d: &Ultrafilter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let ua = ultraproduct_with(factors, d, &opts.limits)?;
    let space = FamilySpace::new(factors, &opts.limits)?;
    let sel = select_families(space.size(), opts);
    let mut tallies = Thm2Tallies::new();
    for &e in &sel.indices {
        tallies.check(&ua, &space.family(e), &opts.limits)?;
    }
    Ok(VerificationReport::new(
        TheoremId::Thm2,
        instance(factors, d, &sel, opts),
        tallies.finish(),
    ))
}

fn check_sigma(a: &Algebra, sigma: &[Congruence], d: &Ultrafilter) -> Result<()> {
    if sigma.len() != d.universe() {
        return Err(Error::FamilyLength {
            expected: d.universe(),
            found: sigma.len(),
        });
    }
    for s in sigma {
        if s.size() != a.size() {
            return Err(Error::SizeMismatch {
                expected: a.size(),
                found: s.size(),
            });
        }
    }
    Ok(())
}

/// `(a, b)` related iff `K_{a,b} = {i | (a, b) ∈ σ(i)} ∈ 𝒟`, as a bare
/// relation.
pub fn restriction_relation(
    a: &Algebra,
    sigma: &[Congruence],
    d: &Ultrafilter,
) -> Result<Relation> {
    check_sigma(a, sigma, d)?;
    Ok(Relation::from_fn(a.size(), |x, y| {
        let k_xy = sigma
            .iter()
            .enumerate()
            .filter(|(_, s)| s.related(x, y))
            .fold(0u64, |acc, (i, _)| acc | 1 << i);
        d.contains_bits(k_xy)
    }))
}

/// `Π_𝒟(σ(i))|A`, checked to be a congruence of `a`.
pub fn restriction(a: &Algebra, sigma: &[Congruence], d: &Ultrafilter) -> Result<Congruence> {
    let r = restriction_relation(a, sigma, d)?;
    Congruence::new(a, r.to_partition()?)
}

fn meet_relation(n: usize, sigma: &[Congruence], k: &crate::ultrafilter::IndexSet) -> Relation {
    let mut r = Relation::from_fn(n, |_, _| true);
    for i in k.elements() {
        r.intersect_with(&sigma[i].to_relation());
    }
    r
}

/// `∪_{j∈J} ∩_{k∈K_j} σ(k)` as a set of pairs; not assumed transitive.
pub fn union_of_meets(a: &Algebra, sigma: &[Congruence], d: &Ultrafilter) -> Result<Relation> {
    check_sigma(a, sigma, d)?;
    let mut out = Relation::empty(a.size());
    for k in d.members() {
        out.union_with(&meet_relation(a.size(), sigma, k));
    }
    Ok(out)
}

/// `∨_{j∈J} ∧_{k∈K_j} σ(k)` in Con(A).
pub fn join_of_meets(a: &Algebra, sigma: &[Congruence], d: &Ultrafilter) -> Result<Congruence> {
    check_sigma(a, sigma, d)?;
    let mut out = Congruence::identity(a);
    for k in d.members() {
        let mut m = Congruence::total(a);
        for i in k.elements() {
            m = m.meet(&sigma[i])?;
        }
        out = out.join(&m)?;
    }
    Ok(out)
}

#[derive(Debug, Clone)]
pub struct NaturalEmbedding {
    /// `a ↦ (a, a, …, a)/𝒟*`.
    pub map: ElemMap,
    pub ultrapower: UltraproductAlgebra,
}

pub fn natural_embedding(a: &Algebra, d: &Ultrafilter) -> Result<NaturalEmbedding> {
    natural_embedding_with(a, d, &Limits::default())
}

pub fn natural_embedding_with(
    a: &Algebra,
    d: &Ultrafilter,
    limits: &Limits,
) -> Result<NaturalEmbedding> {
    let factors = vec![a.clone(); d.universe()];
    let ultrapower = ultraproduct_with(&factors, d, limits)?;
    let image = (0..a.size())
        .map(|x| {
            let constant = ultrapower.product().encode(&vec![x; d.universe()]);
            ultrapower.projection().get(constant)
        })
        .collect();
    let map = ElemMap::new(a.size(), ultrapower.size(), image)?;
    Ok(NaturalEmbedding { map, ultrapower })
}

struct Thm3Tallies {
    restriction_union: Tally,
    equivalence: Tally,
    congruence: Tally,
    union_join: Tally,
    pullback: Tally,
    principal: Tally,
}

impl Thm3Tallies {
    fn new() -> Self {
        Thm3Tallies {
            restriction_union: Tally::new("restriction-equals-union-of-meets"),
            equivalence: Tally::new("union-of-meets-is-equivalence"),
            congruence: Tally::new("union-of-meets-is-congruence"),
            union_join: Tally::new("union-of-meets-equals-join-of-meets"),
            pullback: Tally::new("ultrapower-pullback-equals-restriction"),
            principal: Tally::new("principal-restriction-selects-coordinate"),
        }
    }

    fn check(&mut self, a: &Algebra, sigma: &[Congruence], emb: &NaturalEmbedding) -> Result<()> {
        let d = emb.ultrapower.ultrafilter();
        let label = || {
            format!(
                "sigma {:?}",
                sigma.iter().map(ToString::to_string).collect::<Vec<_>>()
            )
        };
        let restricted = restriction_relation(a, sigma, d)?;
        let union = union_of_meets(a, sigma, d)?;
        self.restriction_union.record(restricted == union, || {
            element_witness(relation_difference(&restricted, &union), label())
        });

        let union_partition = union.to_partition();
        self.equivalence
            .record(union_partition.is_ok(), || Witness::Detail {
                detail: format!(
                    "{}: {}",
                    label(),
                    union_partition
                        .as_ref()
                        .err()
                        .map(ToString::to_string)
                        .unwrap_or_default()
                ),
            });
        let joined = join_of_meets(a, sigma, d)?;
        match &union_partition {
            Ok(p) => {
                let violation = crate::congruence::congruence_violation(a, p)?;
                self.congruence
                    .record(violation.is_none(), || Witness::Detail {
                        detail: format!(
                            "{}: {}",
                            label(),
                            violation.clone().map(|e| e.to_string()).unwrap_or_default()
                        ),
                    });
                self.union_join.record(p == joined.partition(), || {
                    element_witness(partition_difference(p, joined.partition()), label())
                });
            }
            Err(_) => {
                self.congruence
                    .record(false, || Witness::Detail { detail: label() });
                self.union_join.record(false, || {
                    element_witness(relation_difference(&union, &joined.to_relation()), label())
                });
            }
        }

        let fam = CongruenceFamily::from_congruences(emb.ultrapower.factors(), sigma.to_vec())?;
        let pulled = phi(&emb.ultrapower, &fam)?
            .pullback(emb.map.image())
            .to_relation();
        self.pullback.record(pulled == restricted, || {
            element_witness(relation_difference(&pulled, &restricted), label())
        });

        if let Some(i0) = d.principal_index() {
            let selected = sigma[i0].to_relation();
            self.principal.record(restricted == selected, || {
                element_witness(relation_difference(&restricted, &selected), label())
            });
        }
        Ok(())
    }

    fn finish(self, embedding: Tally) -> Vec<Check> {
        let mut checks = vec![embedding];
        checks.extend([
            self.restriction_union,
            self.equivalence,
            self.congruence,
            self.union_join,
            self.pullback,
        ]);
        if self.principal.cases_seen() {
            checks.push(self.principal);
        }
        checks.into_iter().map(Tally::finish).collect()
    }
}

fn embedding_tally(a: &Algebra, emb: &NaturalEmbedding) -> Result<Tally> {
    let mut t = Tally::new("natural-embedding-is-injective-homomorphism");
    let violation = homomorphism_violation(&emb.map, a, emb.ultrapower.algebra())?;
    t.record(violation.is_none() && emb.map.is_injective(), || {
        Witness::Detail {
            detail: format!("ξ = {:?}, violation {violation:?}", emb.map.image()),
        }
    });
    Ok(t)
}

/// Checks, for one family σ of congruences of `a` indexed by the universe
/// of `d`, that the restriction, the union of meets and the join of meets
/// coincide and form a congruence.
pub fn verify_thm3(
    a: &Algebra,
    sigma: &[Congruence],
    d: &Ultrafilter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    check_sigma(a, sigma, d)?;
    let emb = natural_embedding_with(a, d, &opts.limits)?;
    let embedding = embedding_tally(a, &emb)?;
    let mut tallies = Thm3Tallies::new();
    tallies.check(a, sigma, &emb)?;
    let factors = vec![a.clone(); d.universe()];
    let fam = CongruenceFamily::from_congruences(&factors, sigma.to_vec())?;
    Ok(VerificationReport::new(
        TheoremId::Thm3,
        instance(&factors, d, &single_family(), opts),
        tallies.finish(embedding),
    )
    .with_info("sigma", fam.describe()))
}

/// [`verify_thm3`] over every family in Con(A)^I, or a seeded sample.
pub fn verify_thm3_sweep(
    a: &Algebra,
    d: &Ultrafilter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let factors = vec![a.clone(); d.universe()];
    let emb = natural_embedding_with(a, d, &opts.limits)?;
    let embedding = embedding_tally(a, &emb)?;
    let space = FamilySpace::new(&factors, &opts.limits)?;
    let sel = select_families(space.size(), opts);
    let mut tallies = Thm3Tallies::new();
    for &e in &sel.indices {
        tallies.check(a, space.family(e).choice(), &emb)?;
    }
    Ok(VerificationReport::new(
        TheoremId::Thm3,
        instance(&factors, d, &sel, opts),
        tallies.finish(embedding),
    ))
}

/// Checks that an ultraproduct over a principal ultrafilter at `i0` is
/// isomorphic to factor `i0`, with the witness verified in both directions.
pub fn verify_collapse(
    factors: &[Algebra],
    d: &Ultrafilter,
    opts: &VerifyOptions,
) -> Result<VerificationReport> {
    let ua = ultraproduct_with(factors, d, &opts.limits)?;
    let mut principal = Tally::new("ultrafilter-is-principal");
    let mut found = Tally::new("isomorphic-to-selected-factor");
    let mut witness = Tally::new("witness-is-isomorphism-both-directions");
    let i0 = d.principal_index();
    principal.record(i0.is_some(), || Witness::Detail { detail: d.label() });
    if let Some(i0) = i0 {
        let result = find_isomorphism_with(ua.algebra(), &factors[i0], opts.limits.max_iso)?;
        found.record(result.found, || Witness::Detail {
            detail: format!("no isomorphism onto {}", factors[i0].name()),
        });
        if let Some(w) = result.witness {
            let ok = match w.inverse() {
                Some(inv) => {
                    homomorphism_violation(&w, ua.algebra(), &factors[i0])?.is_none()
                        && homomorphism_violation(&inv, &factors[i0], ua.algebra())?.is_none()
                }
                None => false,
            };
            witness.record(ok, || Witness::Detail {
                detail: format!("{:?}", w.image()),
            });
        }
    }
    let sel = FamilySelection {
        indices: vec![],
        exhaustive: true,
        space: 0,
    };
    Ok(VerificationReport::new(
        TheoremId::Collapse,
        instance(factors, d, &sel, opts),
        [principal, found, witness]
            .into_iter()
            .map(Tally::finish)
            .collect(),
    ))
}
