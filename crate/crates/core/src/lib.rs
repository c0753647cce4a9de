//! Executable workbench for heterogeneous (many-sorted) Ramsey algebras.
//!
//! The library makes the objects of the theory concrete at finite scale:
//! sorted algebras over disjoint phyla ([`algebra`]), orderly terms and their
//! enumeration ([`terms`]), reductions of infinite sequences truncated to
//! finite prefixes ([`reduction`]), homogeneity searches against colorings
//! ([`homogeneity`]), the classification of unary systems ([`unary`]), and
//! the vector-space constructions that separate finite from infinite scalar
//! fields ([`vspace`]).
//!
//! All arithmetic is exact: prime fields use modular integers, the rationals
//! use arbitrary-precision `BigRational`. No floating point anywhere.

pub mod algebra;
pub mod homogeneity;
pub mod reduction;
pub mod terms;
pub mod unary;
pub mod vspace;

pub use algebra::{
    Evaluator, FieldKind, OmegaClass, OperationDef, Phylum, Scalar, Signature, SortIndex,
    SortWord, Value, VectorElem,
};
pub use terms::OrderlyTerm;
