//! Finite checkers and constructions around a strong form of
//! well-foundedness: a relation is accepted when every descending
//! transitive chain is finite, which over a finite carrier means no
//! element sits below itself.
//!
//! The crate revolves around one closure fact: the union of two such
//! relations is again one, even though unions of merely well-founded
//! relations are not. The supporting cast makes that fact checkable at
//! desk scale:
//!
//! - [`relations`]: finite binary relations, cycle and loop witnesses,
//!   unions, products, successors, and the disjunctive termination check.
//! - [`colored_lists`]: descending chains of a union, each step tagged by
//!   the relation that justifies it, and the split of such a chain into
//!   its two single-relation parts.
//! - [`trees`]: finitely branching trees presented as branch sets, the
//!   equivalence with an algebraic view, and grafting one more element
//!   onto a tree that covers a chain.
//! - [`simulation`]: step-preserving tables between relations, and the
//!   two bounded verifications tying colored chains to products and
//!   covering trees to grafts.
//! - [`ramsey`]: two-colorings of complete graphs, homogeneous subsets,
//!   and the extraction of a single-relation subchain from a union chain.
//!
//! Everything is exhaustive or explicitly bounded; no checker samples
//! unless handed a seed.

pub mod colored_lists;
pub mod ramsey;
pub mod relations;
pub mod simulation;
pub mod trees;
