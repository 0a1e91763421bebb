//! Lists whose internal segments carry one of two colors.
//!
//! A colored list over a universe pairs elements `x1 ... xn` with colors
//! `c1 ... c(n-1)`: color `ci` sits on the segment leaving `xi`, and the last
//! element has no outgoing segment. A colored list is valid for a pair of
//! relations `(t1, t2)` when a segment of color `k` at `xi` forces every
//! later element to be `tk`-related to `xi`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::relations::{Relation, RelationError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ColoredListError {
    #[error("a list of {elements} elements needs {expected} colors, got {got}")]
    ColorArity { elements: usize, expected: usize, got: usize },
    #[error("extending the empty list takes no color")]
    ColorOnEmpty,
    #[error("extending a nonempty list requires a color")]
    MissingColor,
    #[error("invalid colored list `{input}`: {message}")]
    Parse { input: String, message: String },
}

/// One of the two segment colors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    One,
    Two,
}

impl Color {
    pub const BOTH: [Color; 2] = [Color::One, Color::Two];

    pub fn index(&self) -> u8 {
        match self {
            Color::One => 1,
            Color::Two => 2,
        }
    }

    pub fn from_index(i: u8) -> Option<Color> {
        match i {
            1 => Some(Color::One),
            2 => Some(Color::Two),
            _ => None,
        }
    }

    /// The relation this color selects out of a pair.
    pub fn pick<'a>(&self, t1: &'a Relation, t2: &'a Relation) -> &'a Relation {
        match self {
            Color::One => t1,
            Color::Two => t2,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.index())
    }
}

/// Elements with colored internal segments. Always `colors.len() ==
/// max(elems.len() - 1, 0)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ColoredList {
    elems: Vec<usize>,
    colors: Vec<Color>,
}

impl ColoredList {
    pub fn new(elems: Vec<usize>, colors: Vec<Color>) -> Result<ColoredList, ColoredListError> {
        let expected = elems.len().saturating_sub(1);
        if colors.len() != expected {
            return Err(ColoredListError::ColorArity {
                elements: elems.len(),
                expected,
                got: colors.len(),
            });
        }
        Ok(ColoredList { elems, colors })
    }

    pub fn empty() -> ColoredList {
        ColoredList { elems: Vec::new(), colors: Vec::new() }
    }

    pub fn singleton(x: usize) -> ColoredList {
        ColoredList { elems: vec![x], colors: Vec::new() }
    }

    pub fn elems(&self) -> &[usize] {
        &self.elems
    }

    pub fn colors(&self) -> &[Color] {
        &self.colors
    }

    pub fn len(&self) -> usize {
        self.elems.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    pub fn last(&self) -> Option<usize> {
        self.elems.last().copied()
    }

    /// Appends an element. The empty list takes no color; a nonempty list
    /// requires one for the new segment.
    pub fn extend(&self, y: usize, color: Option<Color>) -> Result<ColoredList, ColoredListError> {
        match (self.is_empty(), color) {
            (true, Some(_)) => Err(ColoredListError::ColorOnEmpty),
            (false, None) => Err(ColoredListError::MissingColor),
            (empty, color) => {
                let mut out = self.clone();
                out.elems.push(y);
                if !empty {
                    out.colors.push(color.expect("checked above"));
                }
                Ok(out)
            }
        }
    }

    /// Splits off the final element: the base list, the removed element, and
    /// the removed segment color (absent when the base is empty).
    pub fn parent(&self) -> Option<(ColoredList, usize, Option<Color>)> {
        let (&y, elems) = self.elems.split_last()?;
        let (color, colors) = match self.colors.split_last() {
            Some((&c, rest)) => (Some(c), rest.to_vec()),
            None => (None, Vec::new()),
        };
        Some((ColoredList { elems: elems.to_vec(), colors }, y, color))
    }

    /// True iff `self` extends `small` by exactly one element.
    pub fn is_one_step_extension_of(&self, small: &ColoredList) -> bool {
        match self.parent() {
            Some((base, _, _)) => base == *small,
            None => false,
        }
    }

    /// Componentwise prefix order on (elements, colors).
    pub fn is_prefix_of(&self, other: &ColoredList) -> bool {
        other.elems.starts_with(&self.elems) && other.colors.starts_with(&self.colors)
    }

    pub fn is_comparable_with(&self, other: &ColoredList) -> bool {
        self.is_prefix_of(other) || other.is_prefix_of(self)
    }

    /// Splits the elements that have an outgoing segment by that segment's
    /// color. The empty list maps to the adjoined top; the last element of a
    /// nonempty list belongs to neither part.
    pub fn split_by_color(&self) -> SplitResult {
        if self.is_empty() {
            return SplitResult::Top;
        }
        let mut left = Vec::new();
        let mut right = Vec::new();
        for (i, &c) in self.colors.iter().enumerate() {
            match c {
                Color::One => left.push(self.elems[i]),
                Color::Two => right.push(self.elems[i]),
            }
        }
        SplitResult::Pair { left, right }
    }
}

/// Result of [`ColoredList::split_by_color`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SplitResult {
    Top,
    Pair { left: Vec<usize>, right: Vec<usize> },
}

// Canonical order: shorter lists first, then elements, then colors. This is
// the branch order inside trees and the order of every serialized branch set.
impl Ord for ColoredList {
    fn cmp(&self, other: &Self) -> Ordering {
        self.elems
            .len()
            .cmp(&other.elems.len())
            .then_with(|| self.elems.cmp(&other.elems))
            .then_with(|| self.colors.cmp(&other.colors))
    }
}

impl PartialOrd for ColoredList {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ColoredList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, &x) in self.elems.iter().enumerate() {
            if i > 0 {
                write!(f, " {} ", self.colors[i - 1])?;
            }
            write!(f, "{x}")?;
        }
        write!(f, "]")
    }
}

impl FromStr for ColoredList {
    type Err = ColoredListError;

    /// Parses the textual form `[x1 c1 x2 c2 ... xn]`, e.g. `[0 1 1 2 2]`
    /// for elements 0, 1, 2 with segment colors 1, 2.
    fn from_str(s: &str) -> Result<ColoredList, ColoredListError> {
        let err = |message: &str| ColoredListError::Parse {
            input: s.to_string(),
            message: message.to_string(),
        };
        let trimmed = s.trim();
        let inner = trimmed
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| err("expected surrounding brackets"))?;
        let tokens: Vec<&str> = inner.split_whitespace().collect();
        if tokens.is_empty() {
            return Ok(ColoredList::empty());
        }
        if tokens.len() % 2 == 0 {
            return Err(err("expected alternating elements and colors, ending in an element"));
        }
        let mut elems = Vec::with_capacity(tokens.len() / 2 + 1);
        let mut colors = Vec::with_capacity(tokens.len() / 2);
        for (i, tok) in tokens.iter().enumerate() {
            if i % 2 == 0 {
                elems.push(tok.parse::<usize>().map_err(|_| err("invalid element"))?);
            } else {
                let c = tok
                    .parse::<u8>()
                    .ok()
                    .and_then(Color::from_index)
                    .ok_or_else(|| err("colors must be 1 or 2"))?;
                colors.push(c);
            }
        }
        Ok(ColoredList { elems, colors })
    }
}

/// True iff every colored segment constraint of `cl` holds: a segment of
/// color `k` at position `i` demands that all later elements relate to
/// `elems[i]` under the color-`k` relation.
pub fn is_t1t2_list(
    t1: &Relation,
    t2: &Relation,
    cl: &ColoredList,
) -> Result<bool, RelationError> {
    if t1.size() != t2.size() {
        return Err(RelationError::SizeMismatch { expected: t1.size(), got: t2.size() });
    }
    for &x in cl.elems() {
        if x >= t1.size() {
            return Err(RelationError::OutOfRange { element: x, size: t1.size() });
        }
    }
    for (i, &c) in cl.colors().iter().enumerate() {
        let t = c.pick(t1, t2);
        for j in i + 1..cl.len() {
            if !t.contains(cl.elems()[j], cl.elems()[i]) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// All valid colored lists of length at most `max_len`, in canonical order
/// (length, then elements, then colors). This order is the canonical
/// indexing of the bounded fragment.
pub fn enumerate_t1t2_lists(
    t1: &Relation,
    t2: &Relation,
    max_len: usize,
) -> Result<Vec<ColoredList>, RelationError> {
    if t1.size() != t2.size() {
        return Err(RelationError::SizeMismatch { expected: t1.size(), got: t2.size() });
    }
    let size = t1.size();
    let mut out = vec![ColoredList::empty()];
    let mut frontier = vec![ColoredList::empty()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for l in &frontier {
            if l.is_empty() {
                next.extend((0..size).map(ColoredList::singleton));
                continue;
            }
            for y in 0..size {
                // Constraints from existing segments do not mention the new
                // color, so check them once per candidate element.
                let old_ok = l
                    .colors()
                    .iter()
                    .enumerate()
                    .all(|(i, c)| c.pick(t1, t2).contains(y, l.elems()[i]));
                if !old_ok {
                    continue;
                }
                let last = l.last().expect("nonempty");
                for c in Color::BOTH {
                    if c.pick(t1, t2).contains(y, last) {
                        let e = l.extend(y, Some(c)).expect("arity is respected");
                        next.push(e);
                    }
                }
            }
        }
        if next.is_empty() {
            break;
        }
        next.sort();
        out.extend(next.iter().cloned());
        frontier = next;
    }
    Ok(out)
}
