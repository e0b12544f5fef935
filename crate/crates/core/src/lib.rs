//! Finite algebras, their congruence lattices, ultrafilters on finite index
//! sets, and ultraproducts, with executable checks of how congruences of an
//! ultraproduct relate to congruences of its factors.

pub mod algebra;
pub mod congruence;
pub mod constructions;
pub mod corpus;
pub mod error;
pub mod format;
pub mod iso;
pub mod partition;
pub mod radix;
pub mod report;
pub mod sweep;
pub mod theorems;
pub mod ultrafilter;
pub mod union_find;

pub use algebra::{
    direct_product, homomorphism_violation, is_homomorphism, kernel, quotient, Algebra, ElemId,
    ElemMap, Limits, ProductAlgebra, QuotientAlgebra, Signature, Symbol,
};
pub use congruence::{
    con_as_algebra, con_lattice, con_lattice_bruteforce, con_lattice_with, congruence_generated_by,
    is_congruence, principal_congruence, ConLattice, Congruence,
};
pub use constructions::{
    dstar, induced_congruence, product_congruence, ultraproduct, ultraproduct_with,
    CongruenceFamily, UltraproductAlgebra,
};
pub use error::{Error, Result};
pub use iso::{find_isomorphism, find_isomorphism_with, IsoResult};
pub use partition::{Partition, Relation};
pub use report::{Check, Instance, TheoremId, VerificationReport, Witness};
pub use theorems::{
    delta_map, join_of_meets, natural_embedding, phi, restriction, union_of_meets, verify_collapse,
    verify_thm1, verify_thm2, verify_thm2_sweep, verify_thm3, verify_thm3_sweep, VerifyOptions,
};
pub use ultrafilter::{enumerate_ultrafilters, IndexSet, Ultrafilter, UltrafilterSpec};
