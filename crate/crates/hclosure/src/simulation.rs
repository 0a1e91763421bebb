//! Finite simulation and morphism checking, plus bounded verification that
//! the color split and the graft really do act as simulations.
//!
//! A simulation table between two structures closes the step diagram: every
//! predecessor step on the left must be matched by a predecessor step on the
//! right that stays inside the table. The two `verify_*` sweeps build the
//! bounded fragments explicitly, index their points in enumeration order,
//! and report a checkable counterexample on any failure.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::colored_lists::{enumerate_t1t2_lists, Color, ColoredList, SplitResult};
use crate::relations::{ProductElement, Relation, RelationError};
use crate::trees::{covers, enumerate_t1t2_trees, graft, is_t1t2_tree, BinaryTree, TreeError};

// ---- structures and tables ----

/// A finite structure: the carrier is `[0, rel.size())`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Structure {
    pub rel: Relation,
}

impl Structure {
    pub fn new(rel: Relation) -> Structure {
        Structure { rel }
    }

    pub fn size(&self) -> usize {
        self.rel.size()
    }
}

impl From<Relation> for Structure {
    fn from(rel: Relation) -> Structure {
        Structure { rel }
    }
}

/// A finite relation between the carriers of two structures. Pairs are kept
/// sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SimulationTable {
    a_size: usize,
    b_size: usize,
    pairs: Vec<(usize, usize)>,
}

impl SimulationTable {
    pub fn new(
        a_size: usize,
        b_size: usize,
        pairs: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<SimulationTable, RelationError> {
        let mut out = Vec::new();
        for (x, y) in pairs {
            if x >= a_size {
                return Err(RelationError::OutOfRange { element: x, size: a_size });
            }
            if y >= b_size {
                return Err(RelationError::OutOfRange { element: y, size: b_size });
            }
            out.push((x, y));
        }
        out.sort_unstable();
        out.dedup();
        Ok(SimulationTable { a_size, b_size, pairs: out })
    }

    pub fn a_size(&self) -> usize {
        self.a_size
    }

    pub fn b_size(&self) -> usize {
        self.b_size
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().copied()
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.pairs.binary_search(&(x, y)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// The set of left components.
    pub fn dom(&self) -> BTreeSet<usize> {
        self.pairs.iter().map(|&(x, _)| x).collect()
    }
}

/// Outcome of a diagram check, with the first violating triple on failure.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimCheck {
    Holds,
    Fails { x: usize, y: usize, z: usize },
}

impl SimCheck {
    pub fn holds(&self) -> bool {
        matches!(self, SimCheck::Holds)
    }
}

/// Predecessor lists packed into one flat allocation: the predecessors of
/// `q` are `elems[offsets[q]..offsets[q + 1]]`, in ascending order.
struct PredTable {
    offsets: Vec<usize>,
    elems: Vec<usize>,
}

impl PredTable {
    fn new(r: &Relation) -> PredTable {
        let mut offsets = vec![0usize; r.size() + 1];
        for (_, q) in r.pairs() {
            offsets[q + 1] += 1;
        }
        for q in 0..r.size() {
            offsets[q + 1] += offsets[q];
        }
        let mut next = offsets.clone();
        let mut elems = vec![0usize; r.pair_count()];
        for (p, q) in r.pairs() {
            elems[next[q]] = p;
            next[q] += 1;
        }
        PredTable { offsets, elems }
    }

    fn preds(&self, q: usize) -> &[usize] {
        &self.elems[self.offsets[q]..self.offsets[q + 1]]
    }
}

/// First point where two sorted predecessor slices diverge, flagged true
/// when `expected` holds it and `actual` does not.
fn first_pred_difference(expected: &[usize], actual: &[usize]) -> Option<(usize, bool)> {
    let mut i = 0;
    let mut j = 0;
    while i < expected.len() && j < actual.len() {
        match expected[i].cmp(&actual[j]) {
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
            Ordering::Less => return Some((expected[i], true)),
            Ordering::Greater => return Some((actual[j], false)),
        }
    }
    if i < expected.len() {
        Some((expected[i], true))
    } else {
        actual.get(j).map(|&p| (p, false))
    }
}

/// Checks the step diagram: for every `(x, y)` in the table and every `z`
/// with `(z, x)` in `a.rel`, some `w` must satisfy `(w, y)` in `b.rel` and
/// `(z, w)` in the table. Returns the lexicographically first violating
/// `(x, y, z)` on failure.
pub fn check_simulation(a: &Structure, b: &Structure, table: &SimulationTable) -> SimCheck {
    assert_eq!(table.a_size(), a.size(), "table domain must index a's carrier");
    assert_eq!(table.b_size(), b.size(), "table codomain must index b's carrier");
    let preds_a = PredTable::new(&a.rel);
    let preds_b = PredTable::new(&b.rel);
    for (x, y) in table.pairs() {
        for &z in preds_a.preds(x) {
            if !preds_b.preds(y).iter().any(|&w| table.contains(z, w)) {
                return SimCheck::Fails { x, y, z };
            }
        }
    }
    SimCheck::Holds
}

/// True iff every carrier point of `a` occurs on the left of some pair.
pub fn is_total(table: &SimulationTable, a: &Structure) -> bool {
    let dom = table.dom();
    (0..a.size()).all(|x| dom.contains(&x))
}

/// The graph of a function given as `f[x] = image of x`.
pub fn morphism_table(f: &[usize], b_size: usize) -> Result<SimulationTable, RelationError> {
    SimulationTable::new(f.len(), b_size, f.iter().enumerate().map(|(x, &y)| (x, y)))
}

/// True iff `f` carries every `a`-step to a `b`-step. `f` must be a total
/// map from `a`'s carrier into `b`'s.
pub fn check_morphism(f: &[usize], a: &Structure, b: &Structure) -> Result<bool, RelationError> {
    if f.len() != a.size() {
        return Err(RelationError::SizeMismatch { expected: a.size(), got: f.len() });
    }
    for &y in f {
        if y >= b.size() {
            return Err(RelationError::OutOfRange { element: y, size: b.size() });
        }
    }
    Ok(a.rel.pairs().all(|(z, x)| b.rel.contains(f[z], f[x])))
}

// ---- bounded verification sweeps ----

/// Result of one bounded verification sweep, serializable for the CLI.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LemmaReport {
    pub lemma: String,
    pub instance: String,
    pub bound: usize,
    pub pass: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub counterexample: Option<String>,
}

/// Checks that splitting colored lists by color is a simulation into the
/// product-of-fragments structure with a fresh top point. Structure A holds
/// the bounded colored lists under one-step extension (extensions leaving
/// the bound are dropped, so the diagram quantifies over in-bound steps
/// only); structure B holds pairs of bounded single-relation lists plus
/// top; the table is the graph of the split.
pub fn verify_pairing_simulation(t1: &Relation, t2: &Relation, max_len: usize) -> LemmaReport {
    verify_pairing_simulation_with_product(t1, t2, max_len, |r, s| r.product(s))
}

/// The same sweep with a pluggable product construction, so tests can
/// inject a faulty product and confirm the sweep catches it. The built
/// product-plus-top relation is cross-checked pair by pair against a second
/// route that generates each point's predecessors directly from list
/// extensions.
pub fn verify_pairing_simulation_with_product(
    t1: &Relation,
    t2: &Relation,
    max_len: usize,
    product: impl Fn(&Relation, &Relation) -> Relation,
) -> LemmaReport {
    assert_eq!(t1.size(), t2.size(), "the relations must share a universe");
    let report = |pass: bool, counterexample: Option<String>| LemmaReport {
        lemma: "pairing-simulation".to_owned(),
        instance: format!("t1 = {t1}, t2 = {t2}"),
        bound: max_len,
        pass,
        counterexample,
    };

    let colored = enumerate_t1t2_lists(t1, t2, max_len).expect("sizes agree");
    let lists1 = t1.enumerate_h_lists(max_len);
    let lists2 = t2.enumerate_h_lists(max_len);
    let n1 = lists1.len();
    let n2 = lists2.len();
    let top = n1 * n2;
    let encode = |left: usize, right: usize| ProductElement { left, right }.encode(n2);
    let describe = |point: usize| {
        if point == top {
            "top".to_owned()
        } else {
            let pe = ProductElement::decode(point, n2);
            format!("({:?}, {:?})", lists1[pe.left], lists2[pe.right])
        }
    };

    // One-step extension pairs of each factor fragment, as (extension, base)
    // index pairs.
    let exts1 = in_bound_extensions(&lists1, t1, max_len);
    let exts2 = in_bound_extensions(&lists2, t2, max_len);

    // Route one: the product-plus-top construction under test.
    let f1 = Relation::new(n1, pairs_of(&exts1)).expect("indices are in range");
    let f2 = Relation::new(n2, pairs_of(&exts2)).expect("indices are in range");
    let constructed = product(&f1, &f2).successor();
    if constructed.size() != top + 1 {
        return report(
            false,
            Some(format!(
                "product-plus-top universe has {} points instead of {}",
                constructed.size(),
                top + 1
            )),
        );
    }

    // Route two: generate each point's predecessors directly and compare
    // them with the constructed relation's, point by point. A step below
    // (l1, l2) extends the left list, the right list, or both; every point
    // sits below top.
    let preds = PredTable::new(&constructed);
    let mut expected: Vec<usize> = Vec::new();
    for base in 0..=top {
        expected.clear();
        if base == top {
            expected.extend(0..top);
        } else {
            let pe = ProductElement::decode(base, n2);
            let (i1, i2) = (pe.left, pe.right);
            for &e1 in &exts1[i1] {
                expected.push(encode(e1, i2));
            }
            for &e2 in &exts2[i2] {
                expected.push(encode(i1, e2));
            }
            for &e1 in &exts1[i1] {
                for &e2 in &exts2[i2] {
                    expected.push(encode(e1, e2));
                }
            }
            expected.sort_unstable();
            expected.dedup();
        }
        if let Some((point, missing)) = first_pred_difference(&expected, preds.preds(base)) {
            return report(
                false,
                Some(if missing {
                    format!(
                        "construction lacks the step from {} up to {}",
                        describe(point),
                        describe(base)
                    )
                } else {
                    format!(
                        "construction has a spurious step from {} up to {}",
                        describe(point),
                        describe(base)
                    )
                }),
            );
        }
    }

    // Structure A and the split table.
    let index1: BTreeMap<&Vec<usize>, usize> = lists1.iter().zip(0..).collect();
    let index2: BTreeMap<&Vec<usize>, usize> = lists2.iter().zip(0..).collect();
    let a_rel = Relation::new(colored.len(), colored_extension_pairs(&colored, t1, t2, max_len))
        .expect("indices are in range");
    let a = Structure::new(a_rel);
    let b = Structure::new(constructed);
    let table = SimulationTable::new(
        colored.len(),
        top + 1,
        colored.iter().enumerate().map(|(i, cl)| {
            let image = match cl.split_by_color() {
                SplitResult::Top => top,
                SplitResult::Pair { left, right } => encode(
                    *index1.get(&left).expect("split parts are bounded decreasing lists"),
                    *index2.get(&right).expect("split parts are bounded decreasing lists"),
                ),
            };
            (i, image)
        }),
    )
    .expect("images are in range");

    if !is_total(&table, &a) {
        return report(false, Some("the split table misses some colored list".to_owned()));
    }
    match check_simulation(&a, &b, &table) {
        SimCheck::Holds => report(true, None),
        SimCheck::Fails { x, y, z } => report(
            false,
            Some(format!(
                "diagram fails at list {}, image {}, in-bound extension {}",
                colored[x],
                describe(y),
                colored[z]
            )),
        ),
    }
}

/// For each list index, the indices of its in-bound one-step extensions.
fn in_bound_extensions(lists: &[Vec<usize>], t: &Relation, max_len: usize) -> Vec<Vec<usize>> {
    let index: BTreeMap<&Vec<usize>, usize> = lists.iter().zip(0..).collect();
    let mut out = vec![Vec::new(); lists.len()];
    for (i, l) in lists.iter().enumerate() {
        if l.len() == max_len {
            continue;
        }
        for y in 0..t.size() {
            if l.iter().all(|&x| t.contains(y, x)) {
                let mut e = l.clone();
                e.push(y);
                out[i].push(*index.get(&e).expect("extension stays in the enumeration"));
            }
        }
    }
    out
}

fn pairs_of(extensions: &[Vec<usize>]) -> Vec<(usize, usize)> {
    extensions
        .iter()
        .enumerate()
        .flat_map(|(base, exts)| exts.iter().map(move |&e| (e, base)))
        .collect()
}

/// One-step colored extension pairs (extension index, base index) over the
/// canonical enumeration, restricted to the length bound.
fn colored_extension_pairs(
    colored: &[ColoredList],
    t1: &Relation,
    t2: &Relation,
    max_len: usize,
) -> Vec<(usize, usize)> {
    let index: BTreeMap<&ColoredList, usize> = colored.iter().zip(0..).collect();
    let mut pairs = Vec::new();
    for (i, cl) in colored.iter().enumerate() {
        if cl.len() == max_len {
            continue;
        }
        if cl.is_empty() {
            for y in 0..t1.size() {
                let ext = ColoredList::singleton(y);
                pairs.push((*index.get(&ext).expect("singletons are enumerated"), i));
            }
            continue;
        }
        for c in Color::BOTH {
            for y in 0..t1.size() {
                let ok = (0..cl.len()).all(|s| {
                    let color = if s < cl.colors().len() { cl.colors()[s] } else { c };
                    color.pick(t1, t2).contains(y, cl.elems()[s])
                });
                if ok {
                    let ext = cl.extend(y, Some(c)).expect("nonempty list takes a color");
                    pairs.push((*index.get(&ext).expect("valid extensions are enumerated"), i));
                }
            }
        }
    }
    pairs
}

/// Checks that grafting acts as a simulation of chain growth: for every
/// bounded decreasing list of the union, every one-step growth of it that
/// stays in bound, and every bounded colored tree covering the shorter
/// list, the graft succeeds and its result is a one-step tree extension,
/// still colored-valid, covering the grown list. Trees range over
/// `enumerate_t1t2_trees` with at most `max_len` nonempty branches.
pub fn verify_covering_simulation(t1: &Relation, t2: &Relation, max_len: usize) -> LemmaReport {
    verify_covering_bounded(t1, t2, max_len, max_len)
}

/// As `verify_covering_simulation`, with the tree-size bound chosen
/// separately from the list-length bound.
pub fn verify_covering_bounded(
    t1: &Relation,
    t2: &Relation,
    max_len: usize,
    max_branches: usize,
) -> LemmaReport {
    verify_covering_with_graft(t1, t2, max_len, max_branches, graft)
}

/// The same sweep with a pluggable graft, so tests can inject a faulty
/// graft and confirm the postcondition checks catch it.
pub fn verify_covering_with_graft(
    t1: &Relation,
    t2: &Relation,
    max_len: usize,
    max_branches: usize,
    graft_fn: impl Fn(&Relation, &Relation, &BinaryTree, &[usize], usize) -> Result<BinaryTree, TreeError>,
) -> LemmaReport {
    assert_eq!(t1.size(), t2.size(), "the relations must share a universe");
    let report = |pass: bool, counterexample: Option<String>| LemmaReport {
        lemma: "covering-simulation".to_owned(),
        instance: format!("t1 = {t1}, t2 = {t2}, tree bound {max_branches}"),
        bound: max_len,
        pass,
        counterexample,
    };

    let union = Relation::union(&[t1.clone(), t2.clone()]).expect("sizes agree");
    let chains = union.enumerate_h_lists(max_len);
    let trees = enumerate_t1t2_trees(t1, t2, max_branches).expect("sizes agree");
    let mut by_universe: BTreeMap<Vec<usize>, Vec<&BinaryTree>> = BTreeMap::new();
    for tree in &trees {
        by_universe.entry(tree.universe()).or_default().push(tree);
    }

    for chain in &chains {
        let Some((&y, prefix)) = chain.split_last() else { continue };
        let mut key = prefix.to_vec();
        key.sort_unstable();
        key.dedup();
        let covering = by_universe.get(&key);
        for &tree in covering.into_iter().flatten() {
            let grown = match graft_fn(t1, t2, tree, prefix, y) {
                Ok(grown) => grown,
                Err(e) => {
                    return report(
                        false,
                        Some(format!("graft refused tree {tree}, chain {prefix:?} + {y}: {e}")),
                    )
                }
            };
            if !grown.is_one_step_extension_of(tree) {
                return report(
                    false,
                    Some(format!(
                        "graft of {y} onto {tree} over {prefix:?} gave {grown}, \
                         not a one-step extension"
                    )),
                );
            }
            if !is_t1t2_tree(t1, t2, &grown).expect("sizes agree") {
                return report(
                    false,
                    Some(format!(
                        "graft of {y} onto {tree} over {prefix:?} gave {grown}, \
                         which breaks a colored segment constraint"
                    )),
                );
            }
            if !covers(&grown, chain) {
                return report(
                    false,
                    Some(format!(
                        "graft of {y} onto {tree} over {prefix:?} gave {grown}, \
                         which does not cover {chain:?}"
                    )),
                );
            }
        }
    }
    report(true, None)
}
