//! Binary trees represented as prefix-closed sets of colored branches.
//!
//! A branch set contains the empty list, at most one singleton (the root),
//! the one-step restriction of each of its members, and at most one
//! extension per color of each nonempty member. Color 1 is the left child,
//! color 2 the right child; the equivalent algebraic view is the usual
//! nil-or-node structure. Trees grow only at the fringe: a new leaf may be
//! attached where a color slot is free, and the very first leaf replaces the
//! bare nil tree.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::colored_lists::{is_t1t2_list, Color, ColoredList};
use crate::relations::{Relation, RelationError};

// ---- validation ----

/// A violated branch-set condition. The letters name the four conditions:
/// (a) the empty branch is present, (b) at most one root, (c) closure under
/// one-step restriction, (d) at most one extension per color.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TreeViolation {
    MissingEmptyBranch,
    MultipleRoots { first: usize, second: usize },
    MissingRestriction { branch: ColoredList },
    DuplicateExtension { base: ColoredList, color: Color },
}

impl TreeViolation {
    pub fn condition(&self) -> char {
        match self {
            TreeViolation::MissingEmptyBranch => 'a',
            TreeViolation::MultipleRoots { .. } => 'b',
            TreeViolation::MissingRestriction { .. } => 'c',
            TreeViolation::DuplicateExtension { .. } => 'd',
        }
    }
}

impl fmt::Display for TreeViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TreeViolation::MissingEmptyBranch => write!(f, "(a) the empty branch is missing"),
            TreeViolation::MultipleRoots { first, second } => {
                write!(f, "(b) more than one root: {first} and {second}")
            }
            TreeViolation::MissingRestriction { branch } => {
                write!(f, "(c) branch {branch} lacks its one-step restriction")
            }
            TreeViolation::DuplicateExtension { base, color } => {
                write!(f, "(d) branch {base} has two color-{color} extensions")
            }
        }
    }
}

/// Checks the four branch-set conditions, reporting every violation in
/// deterministic order. Branches must be sorted and deduplicated.
pub fn validate_tree(branches: &[ColoredList]) -> Vec<TreeViolation> {
    let contains = |b: &ColoredList| branches.binary_search(b).is_ok();
    let mut violations = Vec::new();
    if !contains(&ColoredList::empty()) {
        violations.push(TreeViolation::MissingEmptyBranch);
    }
    let roots: Vec<usize> = branches.iter().filter(|b| b.len() == 1).map(|b| b.elems()[0]).collect();
    for pair in roots.windows(2) {
        violations.push(TreeViolation::MultipleRoots { first: pair[0], second: pair[1] });
    }
    let mut extensions: BTreeMap<(ColoredList, Color), usize> = BTreeMap::new();
    for branch in branches {
        if branch.len() < 2 {
            continue;
        }
        let (base, _, color) = branch.parent().expect("branch is nonempty");
        let color = color.expect("branches of length >= 2 end in a colored segment");
        if !contains(&base) {
            violations.push(TreeViolation::MissingRestriction { branch: branch.clone() });
        }
        *extensions.entry((base, color)).or_insert(0) += 1;
    }
    for ((base, color), count) in extensions {
        if count > 1 {
            violations.push(TreeViolation::DuplicateExtension { base, color });
        }
    }
    violations
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TreeError {
    #[error("branch {branch} is not in the tree")]
    BranchNotInTree { branch: ColoredList },
    #[error("the root slot is already occupied (the tree is not nil)")]
    RootOccupied,
    #[error("branch {base} already has a color-{color} extension")]
    SlotOccupied { base: ColoredList, color: Color },
    #[error("extending at the empty branch takes no color")]
    ColorOnRoot,
    #[error("extending at a nonempty branch requires a color")]
    MissingColor,
    #[error("invalid tree: {}", violations.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidTree { violations: Vec<TreeViolation> },
    #[error("branch {branch} does not satisfy the colored segment constraints")]
    BranchNotColored { branch: ColoredList },
    #[error("tree universe {tree:?} does not equal chain universe {chain:?}")]
    NotCovering { tree: Vec<usize>, chain: Vec<usize> },
    #[error("chain {chain:?} extended by {new} is not a decreasing transitive list of the union")]
    ChainNotDecreasing { chain: Vec<usize>, new: usize },
    #[error("{new} is related to {old} (position {position}) by neither relation")]
    NeitherRelated { new: usize, old: usize, position: usize },
    #[error("anchor {branch} is not in the tree")]
    AnchorNotInTree { branch: ColoredList },
    #[error("branch {branch} is comparable with neither anchor")]
    IncomparableBranch { branch: ColoredList },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

// ---- branch-set trees ----

/// A binary tree as a prefix-closed set of colored branches. Branches are
/// kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BinaryTree {
    branches: Vec<ColoredList>,
}

impl BinaryTree {
    /// The tree with no nodes: just the empty branch.
    pub fn nil() -> BinaryTree {
        BinaryTree { branches: vec![ColoredList::empty()] }
    }

    /// The one-node tree with root `x`.
    pub fn leaf(x: usize) -> BinaryTree {
        BinaryTree { branches: vec![ColoredList::empty(), ColoredList::singleton(x)] }
    }

    /// Builds a tree from raw branches, rejecting invalid sets.
    pub fn from_branches(
        branches: impl IntoIterator<Item = ColoredList>,
    ) -> Result<BinaryTree, Vec<TreeViolation>> {
        let tree = BinaryTree::from_branches_unchecked(branches);
        let violations = tree.validate();
        if violations.is_empty() {
            Ok(tree)
        } else {
            Err(violations)
        }
    }

    /// Wraps raw branches without validation, for representing candidate
    /// sets that may violate the branch-set conditions.
    pub fn from_branches_unchecked(branches: impl IntoIterator<Item = ColoredList>) -> BinaryTree {
        let mut branches: Vec<ColoredList> = branches.into_iter().collect();
        branches.sort_unstable();
        branches.dedup();
        BinaryTree { branches }
    }

    pub fn branch_set(&self) -> &[ColoredList] {
        &self.branches
    }

    pub fn branches(&self) -> impl Iterator<Item = &ColoredList> {
        self.branches.iter()
    }

    pub fn contains(&self, branch: &ColoredList) -> bool {
        self.branches.binary_search(branch).is_ok()
    }

    pub fn is_nil(&self) -> bool {
        self.branches.len() == 1 && self.branches[0].is_empty()
    }

    pub fn nonempty_branch_count(&self) -> usize {
        self.branches.iter().filter(|b| !b.is_empty()).count()
    }

    pub fn validate(&self) -> Vec<TreeViolation> {
        validate_tree(&self.branches)
    }

    /// The root branch (the unique singleton), if the tree has nodes.
    pub fn root_branch(&self) -> Option<&ColoredList> {
        self.branches.iter().find(|b| b.len() == 1)
    }

    /// All elements mentioned by any branch, sorted and deduplicated.
    pub fn universe(&self) -> Vec<usize> {
        let mut out: Vec<usize> =
            self.branches.iter().flat_map(|b| b.elems().iter().copied()).collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The color-`c` extension of `base` inside this tree, if present.
    pub fn extension_of(&self, base: &ColoredList, color: Color) -> Option<&ColoredList> {
        self.branches.iter().find(|b| {
            b.len() == base.len() + 1
                && b.colors().last() == Some(&color)
                && base.is_prefix_of(b)
        })
    }

    /// Grows the tree by one node. The empty branch can be extended (with no
    /// color) only when the tree is nil; a nonempty branch takes a color
    /// whose slot must be free.
    pub fn extend_one(
        &self,
        at: &ColoredList,
        y: usize,
        color: Option<Color>,
    ) -> Result<BinaryTree, TreeError> {
        if !self.contains(at) {
            return Err(TreeError::BranchNotInTree { branch: at.clone() });
        }
        if at.is_empty() {
            if color.is_some() {
                return Err(TreeError::ColorOnRoot);
            }
            if !self.is_nil() {
                return Err(TreeError::RootOccupied);
            }
            return Ok(BinaryTree::leaf(y));
        }
        let c = color.ok_or(TreeError::MissingColor)?;
        if self.extension_of(at, c).is_some() {
            return Err(TreeError::SlotOccupied { base: at.clone(), color: c });
        }
        let branch = at.extend(y, Some(c)).expect("nonempty branch takes a color");
        let mut out = self.clone();
        let slot = out.branches.binary_search(&branch).expect_err("slot checked free");
        out.branches.insert(slot, branch);
        Ok(out)
    }

    /// True iff `self` is `small` grown by exactly one admissible node.
    pub fn is_one_step_extension_of(&self, small: &BinaryTree) -> bool {
        if self.branches.len() != small.branches.len() + 1 {
            return false;
        }
        // Both branch lists are sorted, so the single extra branch is the
        // first mismatch and the tails must agree afterwards.
        let split = (0..small.branches.len())
            .find(|&i| self.branches[i] != small.branches[i])
            .unwrap_or(small.branches.len());
        if self.branches[split + 1..] != small.branches[split..] {
            return false;
        }
        let beta = &self.branches[split];
        let Some((base, y, color)) = beta.parent() else { return false };
        match small.extend_one(&base, y, color) {
            Ok(t) => t == *self,
            Err(_) => false,
        }
    }

    /// Converts to the algebraic view. Requires a valid branch set.
    pub fn to_algebraic(&self) -> Result<AlgebraicTree, TreeError> {
        let violations = self.validate();
        if !violations.is_empty() {
            return Err(TreeError::InvalidTree { violations });
        }
        Ok(match self.root_branch() {
            None => AlgebraicTree::Nil,
            Some(root) => self.node_at(root),
        })
    }

    fn node_at(&self, branch: &ColoredList) -> AlgebraicTree {
        let label = branch.last().expect("node branches are nonempty");
        let child = |color| match self.extension_of(branch, color) {
            Some(b) => self.node_at(b),
            None => AlgebraicTree::Nil,
        };
        AlgebraicTree::Node {
            label,
            left: Box::new(child(Color::One)),
            right: Box::new(child(Color::Two)),
        }
    }
}

impl fmt::Display for BinaryTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.branches.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

impl Serialize for BinaryTree {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let branches: Vec<String> = self.branches.iter().map(|b| b.to_string()).collect();
        let mut s = serializer.serialize_struct("BinaryTree", 1)?;
        s.serialize_field("branches", &branches)?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for BinaryTree {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<BinaryTree, D::Error> {
        #[derive(Deserialize)]
        struct Repr {
            branches: Vec<String>,
        }
        let repr = Repr::deserialize(deserializer)?;
        let mut branches = Vec::new();
        for s in &repr.branches {
            let b: ColoredList = s.parse().map_err(D::Error::custom)?;
            branches.push(b);
        }
        BinaryTree::from_branches(branches).map_err(|violations| {
            D::Error::custom(TreeError::InvalidTree { violations }.to_string())
        })
    }
}

// ---- algebraic view ----

/// The usual nil-or-node binary tree, equivalent to a valid branch set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AlgebraicTree {
    Nil,
    Node { label: usize, left: Box<AlgebraicTree>, right: Box<AlgebraicTree> },
}

impl AlgebraicTree {
    pub fn leaf(label: usize) -> AlgebraicTree {
        AlgebraicTree::Node {
            label,
            left: Box::new(AlgebraicTree::Nil),
            right: Box::new(AlgebraicTree::Nil),
        }
    }

    pub fn node(label: usize, left: AlgebraicTree, right: AlgebraicTree) -> AlgebraicTree {
        AlgebraicTree::Node { label, left: Box::new(left), right: Box::new(right) }
    }

    pub fn node_count(&self) -> usize {
        match self {
            AlgebraicTree::Nil => 0,
            AlgebraicTree::Node { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    pub fn universe(&self) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        self.collect_labels(&mut out);
        out
    }

    fn collect_labels(&self, out: &mut BTreeSet<usize>) {
        if let AlgebraicTree::Node { label, left, right } = self {
            out.insert(*label);
            left.collect_labels(out);
            right.collect_labels(out);
        }
    }

    /// Converts to the branch-set view: each node contributes the colored
    /// path from the root to it, left edges wearing color 1 and right edges
    /// color 2.
    pub fn to_branch_set(&self) -> BinaryTree {
        let mut branches = vec![ColoredList::empty()];
        self.collect_branches(&ColoredList::empty(), None, &mut branches);
        BinaryTree::from_branches_unchecked(branches)
    }

    fn collect_branches(
        &self,
        prefix: &ColoredList,
        color: Option<Color>,
        out: &mut Vec<ColoredList>,
    ) {
        if let AlgebraicTree::Node { label, left, right } = self {
            let here = prefix.extend(*label, color).expect("the walk respects color arity");
            left.collect_branches(&here, Some(Color::One), out);
            right.collect_branches(&here, Some(Color::Two), out);
            out.push(here);
        }
    }
}

// ---- colored-tree operations ----

/// True iff every branch satisfies the colored segment constraints.
pub fn is_t1t2_tree(t1: &Relation, t2: &Relation, tree: &BinaryTree) -> Result<bool, RelationError> {
    for branch in tree.branches() {
        if !is_t1t2_list(t1, t2, branch)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// True iff the tree's universe equals the set of chain elements
/// (repetitions ignored).
pub fn covers(tree: &BinaryTree, chain: &[usize]) -> bool {
    tree.branches().all(|b| b.elems().iter().all(|x| chain.contains(x)))
        && chain.iter().all(|x| tree.branches().any(|b| b.elems().contains(x)))
}

/// Partitions the branches by prefix-comparability with the two anchors.
/// Branches comparable with both (common prefixes) land in both parts; a
/// branch comparable with neither is an error.
pub fn decompose(
    tree: &BinaryTree,
    lam1: &ColoredList,
    lam2: &ColoredList,
) -> Result<(BTreeSet<ColoredList>, BTreeSet<ColoredList>), TreeError> {
    for anchor in [lam1, lam2] {
        if !tree.contains(anchor) {
            return Err(TreeError::AnchorNotInTree { branch: anchor.clone() });
        }
    }
    let mut part1 = BTreeSet::new();
    let mut part2 = BTreeSet::new();
    for branch in tree.branches() {
        let with1 = branch.is_comparable_with(lam1);
        let with2 = branch.is_comparable_with(lam2);
        if !with1 && !with2 {
            return Err(TreeError::IncomparableBranch { branch: branch.clone() });
        }
        if with1 {
            part1.insert(branch.clone());
        }
        if with2 {
            part2.insert(branch.clone());
        }
    }
    Ok((part1, part2))
}

/// Assigns each chain position the color of a relation that relates `y` to
/// the element there, preferring color 1 on overlap. Errors when some
/// position is related by neither.
pub fn choose_color_map(
    t1: &Relation,
    t2: &Relation,
    chain: &[usize],
    y: usize,
) -> Result<Vec<Color>, TreeError> {
    if t1.size() != t2.size() {
        return Err(RelationError::SizeMismatch { expected: t1.size(), got: t2.size() }.into());
    }
    for &x in chain.iter().chain([&y]) {
        if x >= t1.size() {
            return Err(RelationError::OutOfRange { element: x, size: t1.size() }.into());
        }
    }
    chain
        .iter()
        .enumerate()
        .map(|(position, &old)| {
            if t1.contains(y, old) {
                Ok(Color::One)
            } else if t2.contains(y, old) {
                Ok(Color::Two)
            } else {
                Err(TreeError::NeitherRelated { new: y, old, position })
            }
        })
        .collect()
}

/// Grafts `y` onto a tree covering `chain`: starting at the root, repeatedly
/// descend through the existing extension of the color assigned to the
/// current branch's last element, and attach `y` at the first free slot.
/// The resulting tree is a one-step extension, still satisfies the colored
/// constraints, and covers `chain ++ [y]`.
pub fn graft(
    t1: &Relation,
    t2: &Relation,
    tree: &BinaryTree,
    chain: &[usize],
    y: usize,
) -> Result<BinaryTree, TreeError> {
    let violations = tree.validate();
    if !violations.is_empty() {
        return Err(TreeError::InvalidTree { violations });
    }
    for branch in tree.branches() {
        if !is_t1t2_list(t1, t2, branch)? {
            return Err(TreeError::BranchNotColored { branch: branch.clone() });
        }
    }
    if !covers(tree, chain) {
        return Err(TreeError::NotCovering { tree: tree.universe(), chain: chain.to_vec() });
    }
    let union = Relation::union(&[t1.clone(), t2.clone()])?;
    let mut extended = chain.to_vec();
    extended.push(y);
    if !union.is_h_list(&extended)? {
        return Err(TreeError::ChainNotDecreasing { chain: chain.to_vec(), new: y });
    }
    if tree.is_nil() {
        return tree.extend_one(&ColoredList::empty(), y, None);
    }
    let colors = choose_color_map(t1, t2, chain, y)?;
    // Repeated chain elements get equal colors, so any occurrence serves.
    let color_of = |x: usize| {
        colors[chain.iter().position(|&e| e == x).expect("the walk stays on chain elements")]
    };
    let mut cur = tree.root_branch().expect("a non-nil tree has a root");
    loop {
        let last = cur.last().expect("the walk stays on nonempty branches");
        let c = color_of(last);
        match tree.extension_of(cur, c) {
            None => return tree.extend_one(cur, y, Some(c)),
            Some(next) => cur = next,
        }
    }
}

/// All valid colored trees with at most `max_branches` nonempty branches,
/// in canonical order.
pub fn enumerate_t1t2_trees(
    t1: &Relation,
    t2: &Relation,
    max_branches: usize,
) -> Result<Vec<BinaryTree>, RelationError> {
    if t1.size() != t2.size() {
        return Err(RelationError::SizeMismatch { expected: t1.size(), got: t2.size() });
    }
    let size = t1.size();
    let mut seen: BTreeSet<BinaryTree> = BTreeSet::new();
    seen.insert(BinaryTree::nil());
    let mut frontier: Vec<BinaryTree> = vec![BinaryTree::nil()];
    for _ in 0..max_branches {
        let mut next = Vec::new();
        for tree in &frontier {
            if tree.is_nil() {
                for y in 0..size {
                    let leaf = BinaryTree::leaf(y);
                    if seen.insert(leaf.clone()) {
                        next.push(leaf);
                    }
                }
                continue;
            }
            for base in tree.branches() {
                if base.is_empty() {
                    continue;
                }
                for c in Color::BOTH {
                    if tree.extension_of(base, c).is_some() {
                        continue;
                    }
                    for y in 0..size {
                        // The new node only adds constraints about y itself:
                        // y must relate to each branch element under that
                        // element's outgoing color, the new segment included.
                        let ok = (0..base.len()).all(|i| {
                            let color =
                                if i < base.colors().len() { base.colors()[i] } else { c };
                            color.pick(t1, t2).contains(y, base.elems()[i])
                        });
                        if !ok {
                            continue;
                        }
                        let grown =
                            tree.extend_one(base, y, Some(c)).expect("slot checked free");
                        if seen.insert(grown.clone()) {
                            next.push(grown);
                        }
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(seen.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(size: usize, pairs: &[(usize, usize)]) -> Relation {
        Relation::new(size, pairs.iter().copied()).expect("test relation is well formed")
    }

    fn cl(s: &str) -> ColoredList {
        s.parse().expect("test list is well formed")
    }

    fn tree_from(strs: &[&str]) -> BinaryTree {
        BinaryTree::from_branches_unchecked(strs.iter().map(|s| cl(s)))
    }

    /// Complete relation with loops: every colored list is valid, so tree
    /// enumeration under it ranges over all trees.
    fn full(size: usize) -> Relation {
        let pairs: Vec<(usize, usize)> =
            (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).collect();
        rel(size, &pairs)
    }

    /// All algebraic trees with at most `max_nodes` nodes over `[0, size)`.
    fn all_algebraic(size: usize, max_nodes: usize) -> Vec<AlgebraicTree> {
        fn build(size: usize, nodes: usize) -> Vec<AlgebraicTree> {
            if nodes == 0 {
                return vec![AlgebraicTree::Nil];
            }
            let mut out = Vec::new();
            for label in 0..size {
                for left_nodes in 0..nodes {
                    for left in build(size, left_nodes) {
                        for right in build(size, nodes - 1 - left_nodes) {
                            out.push(AlgebraicTree::node(label, left.clone(), right));
                        }
                    }
                }
            }
            out
        }
        (0..=max_nodes).flat_map(|n| build(size, n)).collect()
    }

    // ---- validation ----

    #[test]
    fn nil_and_leaf_are_valid() {
        assert!(BinaryTree::nil().validate().is_empty());
        assert!(BinaryTree::leaf(0).validate().is_empty());
        assert_eq!(BinaryTree::nil().branch_set().len(), 1);
        assert_eq!(BinaryTree::leaf(7).universe(), vec![7]);
    }

    #[test]
    fn validation_frozen_examples() {
        // A lone deep branch misses both the empty branch and its parent.
        let v = tree_from(&["[0 1 1]"]).validate();
        let conditions: Vec<char> = v.iter().map(|x| x.condition()).collect();
        assert_eq!(conditions, vec!['a', 'c']);

        let v = tree_from(&["[]", "[0]", "[1]"]).validate();
        assert_eq!(
            v,
            vec![TreeViolation::MultipleRoots { first: 0, second: 1 }]
        );

        let v = tree_from(&["[]", "[0]", "[0 1 1]", "[0 1 2]"]).validate();
        assert_eq!(
            v,
            vec![TreeViolation::DuplicateExtension { base: cl("[0]"), color: Color::One }]
        );

        assert!(tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]"]).validate().is_empty());
    }

    // ---- the two views agree ----

    #[test]
    fn branch_set_of_a_small_node() {
        let t = AlgebraicTree::node(0, AlgebraicTree::leaf(1), AlgebraicTree::leaf(2));
        let b = t.to_branch_set();
        assert_eq!(b, tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]"]));
        assert_eq!(b.universe(), t.universe());
    }

    #[test]
    fn views_round_trip_exhaustively() {
        for tree in all_algebraic(3, 4) {
            let branches = tree.to_branch_set();
            assert!(branches.validate().is_empty(), "branch set of a tree is valid");
            assert_eq!(branches.universe(), tree.universe());
            assert_eq!(
                branches.to_algebraic().expect("valid by construction"),
                tree,
                "round trip through {branches:?}"
            );
        }
    }

    #[test]
    fn branch_sets_round_trip_back() {
        // The opposite direction, over every tree reachable by extension.
        let f = full(2);
        for tree in enumerate_t1t2_trees(&f, &f, 3).unwrap() {
            let alg = tree.to_algebraic().expect("enumerated trees are valid");
            assert_eq!(alg.to_branch_set(), tree);
        }
    }

    #[test]
    fn to_algebraic_rejects_invalid_sets() {
        assert!(matches!(
            tree_from(&["[0 1 1]"]).to_algebraic(),
            Err(TreeError::InvalidTree { .. })
        ));
    }

    // ---- growth ----

    #[test]
    fn extend_one_frozen_cases() {
        let nil = BinaryTree::nil();
        assert_eq!(nil.extend_one(&ColoredList::empty(), 0, None), Ok(BinaryTree::leaf(0)));
        assert_eq!(
            nil.extend_one(&ColoredList::empty(), 0, Some(Color::One)),
            Err(TreeError::ColorOnRoot)
        );
        let leaf = BinaryTree::leaf(0);
        assert_eq!(
            leaf.extend_one(&ColoredList::empty(), 1, None),
            Err(TreeError::RootOccupied)
        );
        assert_eq!(
            leaf.extend_one(&ColoredList::singleton(1), 0, Some(Color::One)),
            Err(TreeError::BranchNotInTree { branch: cl("[1]") })
        );
        assert_eq!(
            leaf.extend_one(&ColoredList::singleton(0), 1, None),
            Err(TreeError::MissingColor)
        );
        let grown = leaf.extend_one(&ColoredList::singleton(0), 1, Some(Color::One)).unwrap();
        assert_eq!(grown, tree_from(&["[]", "[0]", "[0 1 1]"]));
        assert_eq!(
            grown.extend_one(&ColoredList::singleton(0), 2, Some(Color::One)),
            Err(TreeError::SlotOccupied { base: cl("[0]"), color: Color::One })
        );
    }

    #[test]
    fn one_step_matches_extension_search_exhaustively() {
        let f = full(2);
        let trees = enumerate_t1t2_trees(&f, &f, 3).unwrap();
        for small in &trees {
            // Oracle: collect every admissible one-step extension directly.
            let mut grown: Vec<BinaryTree> = Vec::new();
            for at in small.branches() {
                for y in 0..2 {
                    for color in [None, Some(Color::One), Some(Color::Two)] {
                        if let Ok(t) = small.extend_one(at, y, color) {
                            grown.push(t);
                        }
                    }
                }
            }
            for big in &trees {
                assert_eq!(
                    big.is_one_step_extension_of(small),
                    grown.contains(big),
                    "one-step disagreement: {big:?} over {small:?}"
                );
            }
        }
    }

    // ---- colored trees, covering, decomposition ----

    #[test]
    fn colored_tree_checks() {
        let t1 = rel(3, &[(1, 0)]);
        let t2 = rel(3, &[(2, 0)]);
        let good = tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]"]);
        assert_eq!(is_t1t2_tree(&t1, &t2, &good), Ok(true));
        let bad = tree_from(&["[]", "[0]", "[0 1 2]"]);
        assert_eq!(is_t1t2_tree(&t1, &t2, &bad), Ok(false), "2 is not t1-below 0");
    }

    #[test]
    fn covering_ignores_repetition_and_order() {
        let tree = tree_from(&["[]", "[0]", "[0 1 1]"]);
        assert!(covers(&tree, &[0, 1]));
        assert!(covers(&tree, &[1, 0, 1]));
        assert!(!covers(&tree, &[0]));
        assert!(!covers(&tree, &[0, 1, 2]));
        assert!(covers(&BinaryTree::nil(), &[]));
    }

    #[test]
    fn decompose_splits_by_comparability() {
        let tree = tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]"]);
        let (p1, p2) = decompose(&tree, &cl("[0 1 1]"), &cl("[0 2 2]")).unwrap();
        assert_eq!(p1, ["[]", "[0]", "[0 1 1]"].iter().map(|s| cl(s)).collect());
        assert_eq!(p2, ["[]", "[0]", "[0 2 2]"].iter().map(|s| cl(s)).collect());
    }

    #[test]
    fn decompose_with_equal_anchors_keeps_chains_whole() {
        // On a chain-shaped tree all branches are pairwise comparable.
        let tree = tree_from(&["[]", "[0]", "[0 1 1]", "[0 1 1 1 2]"]);
        let anchor = cl("[0 1 1]");
        let (p1, p2) = decompose(&tree, &anchor, &anchor).unwrap();
        assert_eq!(p1.iter().collect::<Vec<_>>(), tree.branch_set().iter().collect::<Vec<_>>());
        assert_eq!(p2.iter().collect::<Vec<_>>(), tree.branch_set().iter().collect::<Vec<_>>());
    }

    #[test]
    fn decompose_reports_stray_branches() {
        // [0 1 1 2 2] diverges from the anchor [0 1 1 1 2] at the last
        // color and from [0 2 2] at the first, so neither part can take it.
        let tree =
            tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]", "[0 1 1 1 2]", "[0 1 1 2 2]"]);
        assert_eq!(
            decompose(&tree, &cl("[0 1 1 1 2]"), &cl("[0 2 2]")),
            Err(TreeError::IncomparableBranch { branch: cl("[0 1 1 2 2]") })
        );
        assert_eq!(
            decompose(&tree, &cl("[1]"), &cl("[0 2 2]")),
            Err(TreeError::AnchorNotInTree { branch: cl("[1]") })
        );
    }

    // ---- color choice and grafting ----

    #[test]
    fn choose_color_map_frozen_examples() {
        let t1 = rel(3, &[(1, 0)]);
        let t2 = rel(3, &[(2, 1), (2, 0)]);
        assert_eq!(choose_color_map(&t1, &t2, &[], 0), Ok(vec![]));
        assert_eq!(
            choose_color_map(&t1, &t2, &[0, 1], 2),
            Ok(vec![Color::Two, Color::Two])
        );
        // Split example: one position answered by each relation.
        let s1 = rel(3, &[(2, 0)]);
        let s2 = rel(3, &[(2, 1)]);
        assert_eq!(
            choose_color_map(&s1, &s2, &[0, 1], 2),
            Ok(vec![Color::One, Color::Two])
        );
        // Overlap prefers color 1.
        let both = rel(3, &[(2, 0)]);
        assert_eq!(choose_color_map(&both, &both, &[0], 2), Ok(vec![Color::One]));
        assert_eq!(
            choose_color_map(&t1, &t2, &[1], 0),
            Err(TreeError::NeitherRelated { new: 0, old: 1, position: 0 })
        );
    }

    #[test]
    fn graft_walks_the_worked_example() {
        let t1 = rel(3, &[(1, 0)]);
        let t2 = rel(3, &[(2, 1), (2, 0)]);
        let step0 = BinaryTree::nil();
        let step1 = graft(&t1, &t2, &step0, &[], 0).unwrap();
        assert_eq!(step1, BinaryTree::leaf(0));
        let step2 = graft(&t1, &t2, &step1, &[0], 1).unwrap();
        assert_eq!(step2, tree_from(&["[]", "[0]", "[0 1 1]"]));
        let step3 = graft(&t1, &t2, &step2, &[0, 1], 2).unwrap();
        assert_eq!(
            step3,
            tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]"]),
            "the new element hangs off the root on the color-2 side"
        );
    }

    #[test]
    fn graft_descends_through_occupied_slots() {
        let t1 = rel(3, &[(1, 0), (2, 0), (2, 1)]);
        let t2 = rel(3, &[]);
        let tree = tree_from(&["[]", "[0]", "[0 1 1]"]);
        let grown = graft(&t1, &t2, &tree, &[0, 1], 2).unwrap();
        assert_eq!(
            grown,
            tree_from(&["[]", "[0]", "[0 1 1]", "[0 1 1 1 2]"]),
            "color 1 at the root is taken, so the graft descends and attaches below 1"
        );
        assert!(grown.is_one_step_extension_of(&tree));
        assert_eq!(is_t1t2_tree(&t1, &t2, &grown), Ok(true));
        assert!(covers(&grown, &[0, 1, 2]));
    }

    #[test]
    fn graft_rejects_broken_preconditions() {
        let t1 = rel(2, &[(1, 0)]);
        let t2 = rel(2, &[]);
        assert!(matches!(
            graft(&t1, &t2, &tree_from(&["[0 1 1]"]), &[0, 1], 1),
            Err(TreeError::InvalidTree { .. })
        ));
        // Valid shape, but the branch color has no backing pair.
        assert!(matches!(
            graft(&t1, &t2, &tree_from(&["[]", "[0]", "[0 2 1]"]), &[0, 1], 1),
            Err(TreeError::BranchNotColored { .. })
        ));
        assert!(matches!(
            graft(&t1, &t2, &BinaryTree::leaf(0), &[0, 1], 1),
            Err(TreeError::NotCovering { .. })
        ));
        // Chain plus new element must stay a decreasing transitive list.
        assert!(matches!(
            graft(&t1, &t2, &BinaryTree::leaf(0), &[0], 0),
            Err(TreeError::ChainNotDecreasing { .. })
        ));
    }

    #[test]
    fn graft_lands_in_the_valid_extension_set() {
        // Full-search oracle: some valid one-step colored extension covering
        // the grown chain exists, and graft returns one of them.
        let families = [
            (rel(3, &[(1, 0), (2, 0), (2, 1), (1, 1)]), rel(3, &[(2, 1), (1, 0)])),
            (rel(3, &[(2, 1), (1, 0)]), rel(3, &[(1, 0), (2, 0), (2, 1), (1, 1)])),
            (rel(3, &[(1, 0), (2, 0), (0, 0)]), rel(3, &[(2, 1), (2, 0), (1, 0)])),
        ];
        let mut checked = 0;
        for (t1, t2) in &families {
            let union = Relation::union(&[t1.clone(), t2.clone()]).unwrap();
            let chains: Vec<Vec<usize>> = union
                .enumerate_h_lists(3)
                .into_iter()
                .filter(|l| !l.is_empty())
                .collect();
            let trees = enumerate_t1t2_trees(t1, t2, 3).unwrap();
            for chain in &chains {
                let (prefix, y) = (&chain[..chain.len() - 1], chain[chain.len() - 1]);
                for tree in &trees {
                    if !covers(tree, prefix) {
                        continue;
                    }
                    let mut valid_next = Vec::new();
                    for at in tree.branches() {
                        for color in [None, Some(Color::One), Some(Color::Two)] {
                            if let Ok(t) = tree.extend_one(at, y, color) {
                                if is_t1t2_tree(t1, t2, &t).unwrap() && covers(&t, chain) {
                                    valid_next.push(t);
                                }
                            }
                        }
                    }
                    let got = graft(t1, t2, tree, prefix, y).expect("graft succeeds");
                    assert!(!valid_next.is_empty(), "some valid extension exists");
                    assert!(valid_next.contains(&got), "graft picks a valid extension");
                    checked += 1;
                }
            }
        }
        assert!(checked > 50, "the oracle family is not degenerate ({checked} cases)");
    }

    // ---- enumeration ----

    #[test]
    fn enumerate_counts_match_shape_formula() {
        // Under a complete loopy relation every labeling of every shape is
        // valid: 1, 1, 2, 5, 14 shapes for 0..=4 nodes.
        let f1 = full(1);
        assert_eq!(enumerate_t1t2_trees(&f1, &f1, 3).unwrap().len(), 1 + 1 + 2 + 5);
        let f2 = full(2);
        assert_eq!(
            enumerate_t1t2_trees(&f2, &f2, 3).unwrap().len(),
            1 + 2 + 2 * 4 + 5 * 8
        );
        let f3 = full(3);
        assert_eq!(
            enumerate_t1t2_trees(&f3, &f3, 4).unwrap().len(),
            1 + 3 + 2 * 9 + 5 * 27 + 14 * 81
        );
    }

    #[test]
    fn enumerate_respects_bounds_and_validity() {
        assert_eq!(
            enumerate_t1t2_trees(&rel(2, &[]), &rel(2, &[]), 0).unwrap(),
            vec![BinaryTree::nil()]
        );
        // Empty relations admit no colored segment, so only nil and leaves.
        let got = enumerate_t1t2_trees(&rel(2, &[]), &rel(2, &[]), 4).unwrap();
        assert_eq!(got.len(), 3);
        let t1 = rel(3, &[(1, 0), (2, 1)]);
        let t2 = rel(3, &[(2, 0)]);
        for tree in enumerate_t1t2_trees(&t1, &t2, 4).unwrap() {
            assert!(tree.validate().is_empty());
            assert!(is_t1t2_tree(&t1, &t2, &tree).unwrap());
            assert!(tree.nonempty_branch_count() <= 4);
        }
    }

    #[test]
    fn enumerate_matches_filtered_full_enumeration() {
        // Oracle: enumerate all trees under the complete relation, then keep
        // those whose branches satisfy the colored constraints.
        let t1 = rel(2, &[(1, 0)]);
        let t2 = rel(2, &[(0, 1), (1, 1)]);
        let f = full(2);
        let expected: Vec<BinaryTree> = enumerate_t1t2_trees(&f, &f, 3)
            .unwrap()
            .into_iter()
            .filter(|t| is_t1t2_tree(&t1, &t2, t).unwrap())
            .collect();
        assert_eq!(enumerate_t1t2_trees(&t1, &t2, 3).unwrap(), expected);
    }

    // ---- serialization ----

    #[test]
    fn tree_json_is_canonical_and_round_trips() {
        let tree = tree_from(&["[]", "[0]", "[0 1 1]", "[0 2 2]", "[0 1 1 1 2]"]);
        let json = serde_json::to_string(&tree).unwrap();
        assert_eq!(
            json,
            r#"{"branches":["[]","[0]","[0 1 1]","[0 2 2]","[0 1 1 1 2]"]}"#,
            "branches are ordered by length, then lexicographically"
        );
        let back: BinaryTree = serde_json::from_str(&json).unwrap();
        assert_eq!(back, tree);
    }

    #[test]
    fn tree_json_rejects_invalid_branch_sets() {
        let err = serde_json::from_str::<BinaryTree>(r#"{"branches":["[0 1 1]"]}"#);
        assert!(err.is_err());
        let err = serde_json::from_str::<BinaryTree>(r#"{"branches":["[]","[0 3 1]"]}"#);
        assert!(err.is_err(), "colors must be 1 or 2");
    }
}
