//! Two-colorings of complete graphs, homogeneous subsets, and the
//! extraction of a single-relation subchain from a chain of a union.
//!
//! A decreasing transitive chain of s ∪ t colors each position pair by
//! which relation justifies it. A monochromatic set of positions then
//! yields a subchain decreasing in one relation alone; at desk scale the
//! homogeneous set comes from exhaustive search instead of an infinite
//! pigeonhole.

use std::fmt;

use thiserror::Error;

use crate::colored_lists::Color;
use crate::relations::{Relation, RelationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RamseyError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("coloring is missing pair ({i}, {j})")]
    MissingPair { i: usize, j: usize },
    #[error("positions ({i}, {j}): the later chain element is not union-below the earlier one")]
    NotAChain { i: usize, j: usize },
    #[error(transparent)]
    Relation(#[from] RelationError),
}

// ---- pair colorings ----

/// A total assignment of colors 1 and 2 to the unordered pairs of [0, n).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairColoring {
    n: usize,
    colors: Vec<Color>,
}

impl PairColoring {
    pub fn pair_count(n: usize) -> usize {
        n * n.saturating_sub(1) / 2
    }

    /// Row-major slot of the unordered pair, assuming i < j.
    fn slot(n: usize, i: usize, j: usize) -> usize {
        debug_assert!(i < j && j < n);
        i * n - i * (i + 1) / 2 + j - i - 1
    }

    /// Builds a coloring by asking `f` for every pair i < j.
    pub fn new(n: usize, mut f: impl FnMut(usize, usize) -> Color) -> PairColoring {
        let mut colors = Vec::with_capacity(PairColoring::pair_count(n));
        for i in 0..n {
            for j in i + 1..n {
                colors.push(f(i, j));
            }
        }
        PairColoring { n, colors }
    }

    /// Decodes a coloring from the low bits of `bits`, one bit per pair in
    /// row-major order: a set bit means color 1. Handy for exhaustive
    /// sweeps over all colorings of a small complete graph.
    pub fn from_bits(n: usize, bits: u64) -> PairColoring {
        assert!(PairColoring::pair_count(n) <= 64, "too many pairs for a bit sweep");
        let mut k = 0;
        PairColoring::new(n, |_, _| {
            let c = if bits >> k & 1 == 1 { Color::One } else { Color::Two };
            k += 1;
            c
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    /// The color of an unordered pair of distinct vertices.
    pub fn color(&self, i: usize, j: usize) -> Color {
        assert!(i != j, "self-pairs carry no color");
        assert!(i < self.n && j < self.n, "vertex out of range");
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        self.colors[PairColoring::slot(self.n, i, j)]
    }

    /// Parses the coloring text format: a `vertices N` header, then one
    /// `i j c` line per pair with c in {1, 2}. Every pair must appear
    /// exactly once. Blank lines and `#` comments are ignored.
    pub fn parse_text(input: &str) -> Result<PairColoring, RamseyError> {
        let parse_err = |line: usize, message: String| RamseyError::Parse { line, message };
        let mut n: Option<usize> = None;
        let mut slots: Vec<Option<Color>> = Vec::new();
        for (idx, raw) in input.lines().enumerate() {
            let line = idx + 1;
            let text = raw.trim();
            if text.is_empty() || text.starts_with('#') {
                continue;
            }
            let Some(seen) = n else {
                let Some(count) = text
                    .strip_prefix("vertices")
                    .map(str::trim)
                    .and_then(|v| v.parse::<usize>().ok())
                else {
                    return Err(parse_err(line, format!("expected `vertices N`, found `{text}`")));
                };
                n = Some(count);
                slots = vec![None; PairColoring::pair_count(count)];
                continue;
            };
            let fields: Vec<&str> = text.split_whitespace().collect();
            let entry = match fields[..] {
                [i, j, c] => {
                    (i.parse::<usize>().ok(), j.parse::<usize>().ok(), c.parse::<u8>().ok())
                }
                _ => (None, None, None),
            };
            let ((i, j), c) = match entry {
                (Some(i), Some(j), Some(c)) => ((i, j), c),
                _ => {
                    return Err(parse_err(line, format!("expected `i j c` triple, found `{text}`")))
                }
            };
            if i == j {
                return Err(parse_err(line, format!("self-pair ({i}, {j}) carries no color")));
            }
            if i >= seen || j >= seen {
                return Err(parse_err(
                    line,
                    format!("pair ({i}, {j}) out of range for {seen} vertices"),
                ));
            }
            let Some(color) = Color::from_index(c) else {
                return Err(parse_err(line, format!("color must be 1 or 2, found `{c}`")));
            };
            let (i, j) = if i < j { (i, j) } else { (j, i) };
            let slot = PairColoring::slot(seen, i, j);
            if slots[slot].is_some() {
                return Err(parse_err(line, format!("pair ({i}, {j}) colored twice")));
            }
            slots[slot] = Some(color);
        }
        let Some(n) = n else {
            return Err(parse_err(1, "expected `vertices N`, found end of input".to_owned()));
        };
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                if slots[k].is_none() {
                    return Err(RamseyError::MissingPair { i, j });
                }
                k += 1;
            }
        }
        Ok(PairColoring { n, colors: slots.into_iter().map(|c| c.expect("checked")).collect() })
    }

    pub fn to_text(&self) -> String {
        use fmt::Write as _;
        let mut out = format!("vertices {}\n", self.n);
        for i in 0..self.n {
            for j in i + 1..self.n {
                writeln!(out, "{i} {j} {}", self.color(i, j)).expect("writing to a string");
            }
        }
        out
    }
}

// ---- homogeneous subsets ----

/// The lexicographically first k-subset of vertices all of whose internal
/// pairs share one color, with that color; none when no such subset exists
/// or k is outside [2, n].
pub fn homogeneous_subset(col: &PairColoring, k: usize) -> Option<(Vec<usize>, Color)> {
    let n = col.vertex_count();
    if k < 2 || k > n {
        return None;
    }
    let mut chosen = Vec::with_capacity(k);
    extend_clique(col, k, &mut chosen, None)
}

fn extend_clique(
    col: &PairColoring,
    k: usize,
    chosen: &mut Vec<usize>,
    color: Option<Color>,
) -> Option<(Vec<usize>, Color)> {
    if chosen.len() == k {
        return Some((chosen.clone(), color.expect("subsets of size >= 2 fix a color")));
    }
    let n = col.vertex_count();
    let start = chosen.last().map_or(0, |&v| v + 1);
    for v in start..n {
        if n - v < k - chosen.len() {
            break;
        }
        let next_color = match color {
            Some(c) => {
                if chosen.iter().any(|&u| col.color(u, v) != c) {
                    continue;
                }
                Some(c)
            }
            // With one vertex chosen the first pair fixes the color; with
            // none there is nothing to match yet.
            None => chosen.first().map(|&u| col.color(u, v)),
        };
        chosen.push(v);
        if let Some(hit) = extend_clique(col, k, chosen, next_color) {
            return Some(hit);
        }
        chosen.pop();
    }
    None
}

// ---- chains over a union ----

/// Keeps only the ascending pairs of `r`: those (a, b) with a < b.
pub fn star_relation(r: &Relation) -> Relation {
    Relation::new(r.size(), r.pairs().filter(|&(a, b)| a < b)).expect("pairs stay in range")
}

/// Colors the position pairs of a decreasing transitive chain of s ∪ t:
/// pair {i, j} with i < j gets color 1 when s relates the later element to
/// the earlier one, else color 2 (s wins overlaps). The chain must be a
/// valid list of the union.
pub fn coloring_from_chain(
    s: &Relation,
    t: &Relation,
    chain: &[usize],
) -> Result<PairColoring, RamseyError> {
    let union = Relation::union(&[s.clone(), t.clone()])?;
    if let Some((i, j)) = union.h_list_violation(chain)? {
        return Err(RamseyError::NotAChain { i, j });
    }
    Ok(PairColoring::new(chain.len(), |i, j| {
        if s.contains(chain[j], chain[i]) {
            Color::One
        } else {
            Color::Two
        }
    }))
}

/// Which of the two input relations carries an extracted subchain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WhichRelation {
    First,
    Second,
}

impl fmt::Display for WhichRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            WhichRelation::First => "first",
            WhichRelation::Second => "second",
        })
    }
}

/// Finds k chain positions whose subchain is decreasing transitive in s
/// alone or in t alone, by coloring the position pairs and searching for a
/// homogeneous subset. The subchain is re-verified before returning.
pub fn extract_monochromatic_chain(
    s: &Relation,
    t: &Relation,
    chain: &[usize],
    k: usize,
) -> Result<Option<(Vec<usize>, WhichRelation)>, RamseyError> {
    let coloring = coloring_from_chain(s, t, chain)?;
    let Some((positions, color)) = homogeneous_subset(&coloring, k) else {
        return Ok(None);
    };
    let which = match color {
        Color::One => WhichRelation::First,
        Color::Two => WhichRelation::Second,
    };
    let subchain: Vec<usize> = positions.iter().map(|&p| chain[p]).collect();
    let verified = color.pick(s, t).is_h_list(&subchain)?;
    assert!(verified, "internal: homogeneous positions must give a single-relation subchain");
    Ok(Some((positions, which)))
}
