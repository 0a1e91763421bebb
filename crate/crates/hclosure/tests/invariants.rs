//! Cross-module invariant sweeps: exhaustive where the universe is small
//! enough, property-based where it is not.

use std::collections::BTreeSet;

use proptest::prelude::*;

use hclosure::colored_lists::{is_t1t2_list, Color, ColoredList, SplitResult};
use hclosure::ramsey::PairColoring;
use hclosure::relations::{Certificate, Relation, Verdict, Witness};
use hclosure::simulation::{
    check_morphism, check_simulation, is_total, morphism_table, LemmaReport, SimulationTable,
    Structure,
};
use hclosure::trees::{decompose, enumerate_t1t2_trees, validate_tree, BinaryTree};

fn rel(size: usize, pairs: &[(usize, usize)]) -> Relation {
    Relation::new(size, pairs.iter().copied()).expect("test relation is well formed")
}

/// All relations over `[0, size)`, indexed by pair-set bitmask.
fn all_relations(size: usize) -> Vec<Relation> {
    let cells: Vec<(usize, usize)> =
        (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).collect();
    (0..1u32 << cells.len())
        .map(|mask| {
            rel(
                size,
                &cells
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| mask >> i & 1 == 1)
                    .map(|(_, &p)| p)
                    .collect::<Vec<_>>(),
            )
        })
        .collect()
}

fn relation_strategy(size: usize) -> impl Strategy<Value = Relation> {
    let cells: Vec<(usize, usize)> =
        (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).collect();
    let count = cells.len();
    proptest::collection::vec(any::<bool>(), count).prop_map(move |keep| {
        rel(
            size,
            &cells
                .iter()
                .zip(&keep)
                .filter(|(_, &k)| k)
                .map(|(&p, _)| p)
                .collect::<Vec<_>>(),
        )
    })
}

// ---- relations ----

#[test]
fn heights_exist_exactly_when_acyclic() {
    for size in 0..=3 {
        for r in all_relations(size) {
            match (r.find_cycle(), r.height_map()) {
                (None, Ok(heights)) => {
                    for (x, &h) in heights.iter().enumerate() {
                        assert!(h < size.max(1), "height {h} of {x} exceeds the universe");
                    }
                    for (a, b) in r.pairs() {
                        assert!(
                            heights[a] < heights[b],
                            "heights must strictly increase along {a} R {b} in {r:?}"
                        );
                    }
                }
                (Some(_), Err(_)) => {}
                (cycle, heights) => {
                    panic!("cycle {cycle:?} and heights {heights:?} disagree on {r:?}")
                }
            }
        }
    }
}

#[test]
fn successor_preserves_acyclicity() {
    for size in 0..=3 {
        for r in all_relations(size) {
            if r.find_cycle().is_none() {
                assert_eq!(
                    r.successor().find_cycle(),
                    None,
                    "adding a fresh top to {r:?} must not create a cycle"
                );
            }
        }
    }
}

#[test]
fn subrelations_of_acyclic_are_acyclic() {
    let rs = all_relations(3);
    let acyclic: Vec<bool> = rs.iter().map(|r| r.find_cycle().is_none()).collect();
    for (is_, s) in acyclic.iter().zip(&rs) {
        if !is_ {
            continue;
        }
        for (ir, r) in rs.iter().enumerate() {
            if r.is_subset_of(s) {
                assert!(acyclic[ir], "subset {r:?} of acyclic {s:?} has a cycle");
            }
        }
    }
}

proptest! {
    #[test]
    fn enumeration_agrees_with_the_membership_predicate(
        r in (0usize..=4).prop_flat_map(relation_strategy),
        max_len in 0usize..=4,
    ) {
        let enumerated: BTreeSet<Vec<usize>> =
            r.enumerate_h_lists(max_len).into_iter().collect();
        let mut by_filter = BTreeSet::new();
        let mut frontier: Vec<Vec<usize>> = vec![vec![]];
        while let Some(l) = frontier.pop() {
            prop_assert_eq!(r.is_h_list(&l), Ok(true));
            if l.len() < max_len {
                for y in 0..r.size() {
                    let mut next = l.clone();
                    next.push(y);
                    if r.is_h_list(&next) == Ok(true) {
                        frontier.push(next);
                    }
                }
            }
            by_filter.insert(l);
        }
        prop_assert_eq!(enumerated, by_filter);
    }
}

// ---- colored lists ----

/// The colorings a list can grow by: none on the empty list, either color
/// otherwise.
fn color_options(l: &ColoredList) -> Vec<Option<Color>> {
    if l.is_empty() {
        vec![None]
    } else {
        Color::BOTH.iter().copied().map(Some).collect()
    }
}

/// Valid colored lists are closed under prefixes, so growing them
/// element-by-element reaches all of them.
fn all_t1t2_lists(t1: &Relation, t2: &Relation, max_len: usize) -> Vec<ColoredList> {
    let mut out = vec![ColoredList::empty()];
    let mut frontier = vec![ColoredList::empty()];
    while let Some(l) = frontier.pop() {
        if l.len() == max_len {
            continue;
        }
        for y in 0..t1.size() {
            for color in color_options(&l) {
                let next = l.extend(y, color).expect("color shape matches the list");
                if is_t1t2_list(t1, t2, &next).unwrap() {
                    out.push(next.clone());
                    frontier.push(next);
                }
            }
        }
    }
    out.sort();
    out.dedup();
    out
}

#[test]
fn split_preserves_content_and_validity() {
    for t1 in all_relations(2) {
        for t2 in all_relations(2) {
            for l in all_t1t2_lists(&t1, &t2, 3) {
                match l.split_by_color() {
                    SplitResult::Top => {
                        assert!(l.is_empty(), "only the empty list splits to top")
                    }
                    SplitResult::Pair { left, right } => {
                        assert_eq!(t1.is_h_list(&left), Ok(true), "left part of {l}");
                        assert_eq!(t2.is_h_list(&right), Ok(true), "right part of {l}");
                        let mut merged: Vec<usize> =
                            left.iter().chain(right.iter()).copied().collect();
                        merged.sort_unstable();
                        let mut expected: Vec<usize> =
                            l.elems()[..l.len() - 1].to_vec();
                        expected.sort_unstable();
                        assert_eq!(
                            merged, expected,
                            "split of {l} must keep every element but the last"
                        );
                    }
                }
            }
        }
    }
}

#[test]
fn one_step_extension_moves_one_split_coordinate() {
    for t1 in all_relations(2) {
        for t2 in all_relations(2) {
            for l in all_t1t2_lists(&t1, &t2, 2) {
                for y in 0..2 {
                    for color in color_options(&l) {
                        let next = l.extend(y, color).expect("color shape matches the list");
                        if !is_t1t2_list(&t1, &t2, &next).unwrap() {
                            continue;
                        }
                        let after = next.split_by_color();
                        match (l.split_by_color(), after) {
                            (SplitResult::Top, SplitResult::Pair { left, right }) => {
                                assert!(
                                    left.is_empty() && right.is_empty(),
                                    "a singleton splits to two empty parts"
                                );
                            }
                            (
                                SplitResult::Pair { left, right },
                                SplitResult::Pair { left: left2, right: right2 },
                            ) => {
                                let last = l.last().expect("nonempty by split");
                                let color = color.expect("nonempty base grows with a color");
                                let mut grown = match color {
                                    Color::One => {
                                        assert_eq!(right, right2, "color 1 leaves part 2 alone");
                                        left.clone()
                                    }
                                    Color::Two => {
                                        assert_eq!(left, left2, "color 2 leaves part 1 alone");
                                        right.clone()
                                    }
                                };
                                grown.push(last);
                                let moved = match color {
                                    Color::One => left2,
                                    Color::Two => right2,
                                };
                                assert_eq!(moved, grown, "the split gains exactly the old last");
                            }
                            (before, after) => {
                                panic!("split shapes regressed: {before:?} then {after:?}")
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn valid_colored_lists_are_union_chains() {
    for t1 in all_relations(2) {
        for t2 in all_relations(2) {
            let union = Relation::union(&[t1.clone(), t2.clone()]).unwrap();
            for l in all_t1t2_lists(&t1, &t2, 3) {
                assert_eq!(
                    union.is_h_list(l.elems()),
                    Ok(true),
                    "{l} must be decreasing transitive in the union"
                );
            }
        }
    }
}

// ---- trees ----

#[test]
fn extension_attempts_grow_by_exactly_one_branch() {
    let t1 = rel(3, &[(1, 0), (2, 0), (2, 1)]);
    let t2 = rel(3, &[(1, 0), (2, 1)]);
    for tree in enumerate_t1t2_trees(&t1, &t2, 3).unwrap() {
        for at in tree.branches() {
            for color in [None, Some(Color::One), Some(Color::Two)] {
                for y in 0..3 {
                    let Ok(next) = tree.extend_one(at, y, color) else { continue };
                    assert_eq!(
                        next.nonempty_branch_count(),
                        tree.nonempty_branch_count() + 1,
                        "extend_one must add one branch to {tree}"
                    );
                    let old = tree.universe();
                    let new = next.universe();
                    assert!(old.iter().all(|x| new.contains(x)), "universe must only grow");
                    assert!(
                        new.len() <= old.len() + 1,
                        "universe of {next} grew by more than the new element"
                    );
                    assert!(next.is_one_step_extension_of(&tree));
                }
            }
        }
    }
}

#[test]
fn decompose_partitions_into_valid_trees() {
    let t1 = rel(3, &[(1, 0), (2, 0), (2, 1)]);
    let t2 = rel(3, &[(1, 0), (2, 1)]);
    let mut checked = 0;
    for tree in enumerate_t1t2_trees(&t1, &t2, 3).unwrap() {
        let branches: Vec<ColoredList> = tree.branch_set().iter().cloned().collect();
        for lam1 in &branches {
            for lam2 in &branches {
                let Ok((p1, p2)) = decompose(&tree, lam1, lam2) else { continue };
                let rejoined: Vec<ColoredList> = p1.union(&p2).cloned().collect();
                assert_eq!(rejoined, tree.branch_set(), "parts must cover {tree}");
                for part in [&p1, &p2] {
                    let part: Vec<ColoredList> = part.iter().cloned().collect();
                    assert!(
                        validate_tree(&part).is_empty(),
                        "part {part:?} of {tree} is not a tree"
                    );
                }
                checked += 1;
            }
        }
    }
    assert!(checked > 100, "the decompose sweep is not degenerate ({checked} cases)");
}

// ---- simulation ----

#[test]
fn morphisms_are_simulations() {
    let rs = all_relations(3);
    let functions: Vec<Vec<usize>> = (0..27)
        .map(|i| vec![i % 3, i / 3 % 3, i / 9])
        .collect();
    let mut confirmed = 0;
    for ra in &rs {
        let a = Structure::new(ra.clone());
        for rb in &rs {
            let b = Structure::new(rb.clone());
            for f in &functions {
                // Cheap reject first; the diagram check runs on survivors.
                if !check_morphism(f, &a, &b).unwrap() {
                    continue;
                }
                let table = morphism_table(f, 3).unwrap();
                assert!(
                    check_simulation(&a, &b, &table).holds(),
                    "graph of {f:?} fails between {ra:?} and {rb:?}"
                );
                confirmed += 1;
            }
        }
    }
    assert!(confirmed > 10_000, "the morphism sweep is not degenerate ({confirmed} cases)");
}

#[test]
fn total_simulations_into_acyclic_force_acyclicity() {
    // Total tables over a 3-element universe: a nonempty target set for
    // each source element.
    let rs = all_relations(3);
    let acyclic: Vec<bool> = rs.iter().map(|r| r.find_cycle().is_none()).collect();
    let mut tables = Vec::new();
    for s0 in 1u32..8 {
        for s1 in 1u32..8 {
            for s2 in 1u32..8 {
                let mut pairs = Vec::new();
                for (x, set) in [s0, s1, s2].into_iter().enumerate() {
                    for y in 0..3 {
                        if set >> y & 1 == 1 {
                            pairs.push((x, y));
                        }
                    }
                }
                tables.push(SimulationTable::new(3, 3, pairs.into_iter()).unwrap());
            }
        }
    }
    let mut nontrivial = 0;
    for (rb, b_ok) in rs.iter().zip(&acyclic) {
        if !b_ok {
            continue;
        }
        let b = Structure::new(rb.clone());
        for (ra, a_ok) in rs.iter().zip(&acyclic) {
            let a = Structure::new(ra.clone());
            for table in &tables {
                if !check_simulation(&a, &b, table).holds() {
                    continue;
                }
                assert!(is_total(table, &a), "these tables are total by construction");
                assert!(
                    a_ok,
                    "{ra:?} simulates into acyclic {rb:?} via {table:?} yet has a cycle"
                );
                if ra.pair_count() > 0 {
                    nontrivial += 1;
                }
            }
        }
    }
    assert!(nontrivial > 1_000, "the shadow sweep is not degenerate ({nontrivial} cases)");
}

// ---- serialization round trips ----

fn witness_strategy() -> impl Strategy<Value = Option<Witness>> {
    prop_oneof![
        Just(None),
        proptest::collection::vec(0usize..8, 0..6).prop_map(|c| Some(Witness::Cycle(c))),
        (0usize..8).prop_map(|x| Some(Witness::Loop(x))),
        proptest::collection::vec(0usize..8, 0..6).prop_map(|h| Some(Witness::HeightMap(h))),
        (0usize..8, 0usize..8).prop_map(|(a, b)| Some(Witness::UncoveredPair(a, b))),
        (0usize..4, 0usize..8)
            .prop_map(|(index, element)| Some(Witness::RelationLoop { index, element })),
    ]
}

fn verdict_strategy() -> impl Strategy<Value = Verdict> {
    prop_oneof![
        Just(Verdict::WellFounded),
        Just(Verdict::NotWellFounded),
        Just(Verdict::HWellFounded),
        Just(Verdict::NotHWellFounded),
        Just(Verdict::Terminating),
        Just(Verdict::Unknown),
    ]
}

proptest! {
    #[test]
    fn certificates_round_trip_as_json(
        verdict in verdict_strategy(),
        witness in witness_strategy(),
    ) {
        let cert = Certificate::new(verdict, witness);
        let text = serde_json::to_string(&cert).unwrap();
        let back: Certificate = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, cert);
    }

    #[test]
    fn lemma_reports_round_trip_as_json(
        lemma in "[a-z-]{1,20}",
        instance in ".{0,40}",
        bound in 0usize..100,
        pass in any::<bool>(),
        counterexample in proptest::option::of(".{0,40}"),
    ) {
        let report = LemmaReport { lemma, instance, bound, pass, counterexample };
        let text = serde_json::to_string(&report).unwrap();
        let back: LemmaReport = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, report);
    }

    #[test]
    fn relations_round_trip_as_text(r in (0usize..=5).prop_flat_map(relation_strategy)) {
        let text = r.to_text();
        prop_assert_eq!(Relation::parse_text(&text), Ok(r));
    }

    #[test]
    fn colored_lists_round_trip_as_text(
        elems in proptest::collection::vec(0usize..9, 0..6),
        colorbits in proptest::collection::vec(any::<bool>(), 5),
    ) {
        let colors: Vec<Color> = colorbits
            .iter()
            .take(elems.len().saturating_sub(1))
            .map(|&b| if b { Color::One } else { Color::Two })
            .collect();
        let l = ColoredList::new(elems, colors).unwrap();
        let text = l.to_string();
        prop_assert_eq!(text.parse::<ColoredList>(), Ok(l));
    }

    #[test]
    fn pair_colorings_round_trip_as_text(n in 0usize..=7, bits in any::<u64>()) {
        let col = PairColoring::from_bits(n, bits);
        let text = col.to_text();
        prop_assert_eq!(PairColoring::parse_text(&text), Ok(col));
    }

    #[test]
    fn trees_round_trip_as_json(
        mask1 in any::<u16>(),
        mask2 in any::<u16>(),
        pick in any::<proptest::sample::Index>(),
    ) {
        let t1 = relation_from_mask(2, mask1);
        let t2 = relation_from_mask(2, mask2);
        let trees = enumerate_t1t2_trees(&t1, &t2, 3).unwrap();
        let tree = &trees[pick.index(trees.len())];
        let text = serde_json::to_string(tree).unwrap();
        let back: BinaryTree = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(&back, tree);
    }
}

fn relation_from_mask(size: usize, mask: u16) -> Relation {
    let cells: Vec<(usize, usize)> =
        (0..size).flat_map(|a| (0..size).map(move |b| (a, b))).collect();
    rel(
        size,
        &cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &p)| p)
            .collect::<Vec<_>>(),
    )
}
